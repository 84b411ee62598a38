//! Radar-chart data for a chosen candidate per attribute, as CSV or SVG.
//!
//! The SVG is 960×520 with two panels, main axis on the left and derived axis
//! on the right. Each panel has radius 180, gridline circles at 0.25, 0.5,
//! 0.75 and 1, one spoke per criterion starting at 12 o'clock and proceeding
//! clockwise, and one polygon per selected candidate. Polygon colours cycle
//! through a fixed eight-colour palette in report order. Coordinates are
//! printed with two decimals, so output is byte-stable.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::circumplex::{Axis, PaqAttribute, UnknownAttribute};
use crate::pipeline::StudyResult;
use crate::scoring::Criterion;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RadarError {
    #[error("selection `{0}` is not of the form attribute=candidate")]
    BadSelection(String),
    #[error(transparent)]
    UnknownAttribute(#[from] UnknownAttribute),
    #[error("attribute `{0}` was selected twice")]
    DuplicateAttribute(PaqAttribute),
    #[error("attribute `{0}` has no analysis in this study")]
    NotAnalyzed(PaqAttribute),
    #[error("unknown candidate `{candidate}` for attribute `{attribute}` (known: {known})")]
    UnknownCandidate {
        attribute: PaqAttribute,
        candidate: String,
        known: String,
    },
    #[error("empty selection")]
    EmptySelection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadarFormat {
    Csv,
    Svg,
}

/// Mean scores of one candidate along its axis' radar spokes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadarSeries {
    pub attribute: PaqAttribute,
    pub candidate: String,
    pub axis: Axis,
    pub points: Vec<(Criterion, f64)>,
}

/// Parse `attr=candidate[,attr=candidate...]`.
pub fn parse_selection(text: &str) -> Result<BTreeMap<PaqAttribute, String>, RadarError> {
    let mut out = BTreeMap::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (attr, cand) = part
            .split_once('=')
            .ok_or_else(|| RadarError::BadSelection(part.to_string()))?;
        let cand = cand.trim();
        if cand.is_empty() {
            return Err(RadarError::BadSelection(part.to_string()));
        }
        let attr: PaqAttribute = attr.parse()?;
        if out.insert(attr, cand.to_string()).is_some() {
            return Err(RadarError::DuplicateAttribute(attr));
        }
    }
    if out.is_empty() {
        return Err(RadarError::EmptySelection);
    }
    Ok(out)
}

/// Combined-population means of the selected candidates, in report order.
pub fn radar_series(
    result: &StudyResult,
    selection: &BTreeMap<PaqAttribute, String>,
) -> Result<Vec<RadarSeries>, RadarError> {
    if selection.is_empty() {
        return Err(RadarError::EmptySelection);
    }
    let mut series = Vec::with_capacity(selection.len());
    for attribute in PaqAttribute::REPORT_ORDER {
        let Some(candidate) = selection.get(&attribute) else { continue };
        let analysis = result.analysis(attribute).ok_or(RadarError::NotAnalyzed(attribute))?;
        let row = analysis
            .mean_table
            .iter()
            .find(|m| &m.candidate == candidate)
            .ok_or_else(|| RadarError::UnknownCandidate {
                attribute,
                candidate: candidate.clone(),
                known: analysis.candidates.join(", "),
            })?;
        let axis = attribute.axis();
        let points = Criterion::radar_order(axis)
            .iter()
            .map(|&c| (c, row.combined.scores.get(c).unwrap_or(0.0)))
            .collect();
        series.push(RadarSeries {
            attribute,
            candidate: candidate.clone(),
            axis,
            points,
        });
    }
    Ok(series)
}

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 520.0;
const RADIUS: f64 = 180.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn spoke(cx: f64, cy: f64, i: usize, n: usize, r: f64) -> (f64, f64) {
    let theta = std::f64::consts::TAU * i as f64 / n as f64;
    (cx + r * theta.sin(), cy - r * theta.cos())
}

fn panel(out: &mut String, title: &str, cx: f64, cy: f64, axis: Axis, series: &[(usize, &RadarSeries)]) {
    let criteria = Criterion::radar_order(axis);
    let n = criteria.len();
    let _ = writeln!(out, "  <g class=\"panel\">");
    let _ = writeln!(
        out,
        "    <text x=\"{cx:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"16\">{title}</text>",
        cy - RADIUS - 44.0
    );
    for step in 1..=4 {
        let r = RADIUS * step as f64 / 4.0;
        let _ = writeln!(
            out,
            "    <circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"{r:.2}\" fill=\"none\" stroke=\"#cccccc\" stroke-width=\"1\"/>"
        );
    }
    for (i, c) in criteria.iter().enumerate() {
        let (x, y) = spoke(cx, cy, i, n, RADIUS);
        let _ = writeln!(
            out,
            "    <line x1=\"{cx:.2}\" y1=\"{cy:.2}\" x2=\"{x:.2}\" y2=\"{y:.2}\" stroke=\"#cccccc\" stroke-width=\"1\"/>"
        );
        let (lx, ly) = spoke(cx, cy, i, n, RADIUS + 20.0);
        let _ = writeln!(
            out,
            "    <text x=\"{lx:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"12\">{}</text>",
            ly + 4.0,
            c.label()
        );
    }
    for (k, (colour_idx, s)) in series.iter().enumerate() {
        let colour = PALETTE[colour_idx % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .enumerate()
            .map(|(i, &(_, v))| {
                let (x, y) = spoke(cx, cy, i, n, RADIUS * v.clamp(0.0, 1.0));
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = writeln!(
            out,
            "    <polygon points=\"{}\" fill=\"{colour}\" fill-opacity=\"0.15\" stroke=\"{colour}\" stroke-width=\"2\"/>",
            pts.join(" ")
        );
        let ly = cy + RADIUS + 40.0 + 16.0 * k as f64;
        let lx = cx - RADIUS;
        let _ = writeln!(
            out,
            "    <rect x=\"{lx:.2}\" y=\"{:.2}\" width=\"10\" height=\"10\" fill=\"{colour}\"/>",
            ly - 9.0
        );
        let _ = writeln!(
            out,
            "    <text x=\"{:.2}\" y=\"{ly:.2}\" font-size=\"12\">{} ({})</text>",
            lx + 16.0,
            xml_escape(&s.candidate),
            s.attribute
        );
    }
    let _ = writeln!(out, "  </g>");
}

/// Render the selected series as CSV (`attribute,candidate,axis,criterion,mean`)
/// or as a two-panel SVG.
pub fn emit_radar(
    result: &StudyResult,
    selection: &BTreeMap<PaqAttribute, String>,
    format: RadarFormat,
) -> Result<String, RadarError> {
    let series = radar_series(result, selection)?;
    Ok(match format {
        RadarFormat::Csv => render_csv(&series),
        RadarFormat::Svg => render_svg(&series),
    })
}

pub fn render_csv(series: &[RadarSeries]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    w.write_record(["attribute", "candidate", "axis", "criterion", "mean"])
        .expect("in-memory write");
    for s in series {
        for (c, v) in &s.points {
            w.write_record([
                s.attribute.name(),
                &s.candidate,
                &s.axis.to_string(),
                c.label(),
                &format!("{v:.6}"),
            ])
            .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8 cells")
}

pub fn render_svg(series: &[RadarSeries]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\">"
    );
    let _ = writeln!(out, "  <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>");
    let indexed: Vec<(usize, &RadarSeries)> = series.iter().enumerate().collect();
    let main: Vec<_> = indexed.iter().copied().filter(|(_, s)| s.axis == Axis::Main).collect();
    let derived: Vec<_> = indexed.iter().copied().filter(|(_, s)| s.axis == Axis::Derived).collect();
    let cy = 60.0 + RADIUS;
    panel(&mut out, "Main axis", WIDTH / 4.0, cy, Axis::Main, &main);
    panel(&mut out, "Derived axis", 3.0 * WIDTH / 4.0, cy, Axis::Derived, &derived);
    let _ = writeln!(out, "</svg>");
    out
}
