//! Nonparametric rank tests.
//!
//! Everything here is a pure function of its inputs. Inputs are canonicalized
//! (group labels kept, values sorted within each group) before any
//! floating-point reduction, so results are bit-identical under reordering of
//! observations within a group.

pub mod distributions;

mod blocks;
mod kruskal;
mod mann_whitney;
mod ranks;

pub use blocks::{friedman, prentice, BlockedObservation};
pub use distributions::{chi_square_sf, normal_sf, student_t_sf};
pub use kruskal::{conover_iman, effect_band, kruskal_wallis, kw_eta_squared, ConoverIman};
pub use mann_whitney::mann_whitney;
pub use ranks::{midranks, tie_sizes};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TestError {
    #[error("need at least {needed} groups, got {got}")]
    TooFewGroups { needed: usize, got: usize },
    #[error("group `{0}` is empty")]
    EmptyGroup(String),
    #[error("need at least {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },
    #[error("non-finite value in group `{0}`")]
    NonFinite(String),
    #[error("block matrix is not complete: row {row} has {got} cells, expected {expected}")]
    IncompleteMatrix { row: usize, got: usize, expected: usize },
    #[error("no usable blocks: every block needs at least two observations spanning two groups")]
    NoUsableBlocks,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// A labelled sample of observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub label: String,
    pub values: Vec<f64>,
}

impl Sample {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Self {
        Sample {
            label: label.into(),
            values,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    KruskalWallis,
    Friedman,
    Prentice,
    MannWhitney,
    ConoverIman,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::KruskalWallis => "Kruskal-Wallis",
            Method::Friedman => "Friedman",
            Method::Prentice => "Prentice",
            Method::MannWhitney => "Mann-Whitney-Wilcoxon",
            Method::ConoverIman => "Conover-Iman",
        }
    }
}

/// Notes attached to a result when the computation left the regular path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TestFlag {
    /// No rank variation at all; statistic forced to 0 and p to 1.
    Degenerate,
    /// Covariance had lower rank than the group count implies.
    PseudoInverse { rank: usize },
    /// Blocks dropped because they held fewer than two observations or one group only.
    DroppedBlocks(usize),
    /// p-value from the exact null distribution.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EffectBand {
    Small,
    Moderate,
    Large,
}

impl EffectBand {
    pub fn label(self) -> &'static str {
        match self {
            EffectBand::Small => "small",
            EffectBand::Moderate => "moderate",
            EffectBand::Large => "large",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectSize {
    pub eta_sq: f64,
    pub band: EffectBand,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub method: Method,
    pub statistic: f64,
    /// Degrees of freedom; `None` for tests without one (Mann-Whitney).
    pub df: Option<f64>,
    pub p_value: f64,
    pub effect_size: Option<EffectSize>,
    pub flags: Vec<TestFlag>,
}

impl TestResult {
    pub fn is_degenerate(&self) -> bool {
        self.flags.contains(&TestFlag::Degenerate)
    }

    pub(crate) fn degenerate(method: Method, df: Option<f64>) -> Self {
        TestResult {
            method,
            statistic: 0.0,
            df,
            p_value: 1.0,
            effect_size: None,
            flags: vec![TestFlag::Degenerate],
        }
    }
}

/// One pairwise comparison of a posthoc family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseResult {
    pub pair: (String, String),
    pub statistic: f64,
    pub p_raw: f64,
    pub p_adjusted: f64,
}

/// Bonferroni adjustment: `p ↦ min(1, m·p)`.
pub fn bonferroni(p_values: &[f64], family_size: usize) -> Result<Vec<f64>, TestError> {
    if family_size == 0 {
        return Err(TestError::InvalidArgument("family size must be positive".into()));
    }
    if family_size < p_values.len() {
        return Err(TestError::InvalidArgument(format!(
            "family size {family_size} is smaller than the {} p-values supplied",
            p_values.len()
        )));
    }
    let m = family_size as f64;
    Ok(p_values.iter().map(|p| (m * p).min(1.0)).collect())
}

pub(crate) fn check_samples(groups: &[Sample], min_groups: usize) -> Result<(), TestError> {
    if groups.len() < min_groups {
        return Err(TestError::TooFewGroups {
            needed: min_groups,
            got: groups.len(),
        });
    }
    for g in groups {
        if g.values.is_empty() {
            return Err(TestError::EmptyGroup(g.label.clone()));
        }
        if g.values.iter().any(|v| !v.is_finite()) {
            return Err(TestError::NonFinite(g.label.clone()));
        }
    }
    Ok(())
}
