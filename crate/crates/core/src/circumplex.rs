//! The octant circumplex of perceived affective quality (PAQ) attributes.
//!
//! Eight attributes sit at 45° spacing. The four at multiples of 90° form the
//! main axes; the four between them form the derived axes. Every scoring
//! formula only needs to know, for a given attribute, its two adjacent
//! attributes and the one directly opposite it.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Which pair of axes an attribute lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    Main,
    Derived,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::Main => "main",
            Axis::Derived => "derived",
        })
    }
}

/// One of the eight PAQ attributes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PaqAttribute {
    Pleasant,
    Vibrant,
    Eventful,
    Chaotic,
    Annoying,
    Monotonous,
    Uneventful,
    Calm,
}

impl PaqAttribute {
    /// All attributes in angular order, starting at 0°.
    pub const ALL: [PaqAttribute; 8] = [
        PaqAttribute::Pleasant,
        PaqAttribute::Vibrant,
        PaqAttribute::Eventful,
        PaqAttribute::Chaotic,
        PaqAttribute::Annoying,
        PaqAttribute::Monotonous,
        PaqAttribute::Uneventful,
        PaqAttribute::Calm,
    ];

    /// Order used by every analysis and report surface.
    pub const REPORT_ORDER: [PaqAttribute; 8] = [
        PaqAttribute::Pleasant,
        PaqAttribute::Annoying,
        PaqAttribute::Eventful,
        PaqAttribute::Uneventful,
        PaqAttribute::Calm,
        PaqAttribute::Chaotic,
        PaqAttribute::Monotonous,
        PaqAttribute::Vibrant,
    ];

    pub fn angle_deg(self) -> u16 {
        match self {
            PaqAttribute::Pleasant => 0,
            PaqAttribute::Vibrant => 45,
            PaqAttribute::Eventful => 90,
            PaqAttribute::Chaotic => 135,
            PaqAttribute::Annoying => 180,
            PaqAttribute::Monotonous => 225,
            PaqAttribute::Uneventful => 270,
            PaqAttribute::Calm => 315,
        }
    }

    /// Attribute at the given angle; the angle is taken modulo 360 and must
    /// be a multiple of 45.
    pub fn at_angle(angle_deg: i32) -> Option<PaqAttribute> {
        let a = angle_deg.rem_euclid(360);
        if a % 45 != 0 {
            return None;
        }
        Some(Self::ALL[(a / 45) as usize])
    }

    pub fn axis(self) -> Axis {
        axis_of(self)
    }

    pub fn name(self) -> &'static str {
        match self {
            PaqAttribute::Pleasant => "pleasant",
            PaqAttribute::Vibrant => "vibrant",
            PaqAttribute::Eventful => "eventful",
            PaqAttribute::Chaotic => "chaotic",
            PaqAttribute::Annoying => "annoying",
            PaqAttribute::Monotonous => "monotonous",
            PaqAttribute::Uneventful => "uneventful",
            PaqAttribute::Calm => "calm",
        }
    }
}

impl fmt::Display for PaqAttribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown PAQ attribute `{0}`")]
pub struct UnknownAttribute(pub String);

impl FromStr for PaqAttribute {
    type Err = UnknownAttribute;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let needle = s.trim().to_ascii_lowercase();
        Self::ALL
            .iter()
            .copied()
            .find(|a| a.name() == needle)
            .ok_or_else(|| UnknownAttribute(s.to_string()))
    }
}

/// The adjacency of one attribute on the circumplex.
///
/// `neighbor_cw` is the neighbor rated by the `*_cw` prompts and
/// `neighbor_ccw` the one rated by the `*_ccw` prompts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Neighborhood {
    pub attribute: PaqAttribute,
    pub neighbor_cw: PaqAttribute,
    pub neighbor_ccw: PaqAttribute,
    pub antipode: PaqAttribute,
}

/// Neighborhood of `attribute`: CW neighbor at +45°, CCW at −45°, antipode at 180°.
pub fn neighbors(attribute: PaqAttribute) -> Neighborhood {
    let angle = i32::from(attribute.angle_deg());
    let at = |delta: i32| PaqAttribute::at_angle(angle + delta).expect("octant angle");
    Neighborhood {
        attribute,
        neighbor_cw: at(45),
        neighbor_ccw: at(-45),
        antipode: at(180),
    }
}

pub fn axis_of(attribute: PaqAttribute) -> Axis {
    if attribute.angle_deg().is_multiple_of(90) {
        Axis::Main
    } else {
        Axis::Derived
    }
}
