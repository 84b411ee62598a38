//! Scoring and nonparametric analysis of translation candidates for the eight
//! perceived affective quality (PAQ) attributes of the soundscape circumplex.
//!
//! The crate is organised bottom-up:
//!
//! - [`circumplex`]: attribute layout, axes and neighborhoods.
//! - [`scoring`]: criterion scores from normalized ratings.
//! - [`ranktests`]: Kruskal-Wallis, Conover-Iman, Mann-Whitney, Friedman,
//!   Prentice and the distribution kernels behind them.
//! - [`ingest`]: configuration, CSV loading and the residence filter.
//! - [`pipeline`]: per-attribute cross-national and intra-country analysis.
//! - [`report`] and [`radar`]: tables and radar-chart output.
//! - [`synth`]: seeded synthetic survey generator.

pub mod circumplex;
pub mod ingest;
pub mod pipeline;
pub mod radar;
pub mod report;
pub mod ranktests;
pub mod scoring;
pub mod synth;

pub use circumplex::{axis_of, neighbors, Axis, Neighborhood, PaqAttribute};
pub use ingest::{CountryCode, ExclusionReport, Respondent, StudyConfig};
pub use scoring::{Criterion, CriterionScores, RatingRecord};
pub use pipeline::{analyze_attribute, run_study, AnalysisOptions, AttributeAnalysis, StudyResult};
