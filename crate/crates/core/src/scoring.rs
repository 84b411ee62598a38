//! Per-respondent criterion scores.
//!
//! A respondent rates one translation candidate on up to eight prompts. Each
//! rating is already normalized to `[0, 1]`; the functions here turn those
//! ratings into the criterion scores used by every downstream test.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circumplex::{Axis, PaqAttribute};
use crate::ingest::CountryCode;

/// Evaluation criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Criterion {
    Appr,
    Undr,
    Clar,
    Anto,
    Orth,
    Ncon,
    Conn,
    Ibal,
}

impl Criterion {
    /// Criteria evaluated for an axis, in analysis order.
    pub fn for_axis(axis: Axis) -> &'static [Criterion] {
        use Criterion::*;
        match axis {
            Axis::Main => &[Appr, Undr, Clar, Anto, Orth, Ncon, Ibal],
            Axis::Derived => &[Appr, Undr, Clar, Conn, Ibal],
        }
    }

    /// Row order of the published mean-score and p-value tables.
    pub fn table_order(axis: Axis) -> &'static [Criterion] {
        use Criterion::*;
        match axis {
            Axis::Main => &[Appr, Undr, Clar, Orth, Anto, Ncon, Ibal],
            Axis::Derived => &[Appr, Undr, Clar, Conn, Ibal],
        }
    }

    /// Spoke order of the radar plots.
    pub fn radar_order(axis: Axis) -> &'static [Criterion] {
        use Criterion::*;
        match axis {
            Axis::Main => &[Appr, Undr, Clar, Anto, Orth, Ncon, Ibal],
            Axis::Derived => &[Appr, Undr, Clar, Ibal, Conn],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Criterion::Appr => "APPR",
            Criterion::Undr => "UNDR",
            Criterion::Clar => "CLAR",
            Criterion::Anto => "ANTO",
            Criterion::Orth => "ORTH",
            Criterion::Ncon => "NCON",
            Criterion::Conn => "CONN",
            Criterion::Ibal => "IBAL",
        }
    }

    pub const ALL: [Criterion; 8] = [
        Criterion::Appr,
        Criterion::Undr,
        Criterion::Clar,
        Criterion::Anto,
        Criterion::Orth,
        Criterion::Ncon,
        Criterion::Conn,
        Criterion::Ibal,
    ];
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Criterion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Criterion::ALL
            .iter()
            .copied()
            .find(|c| c.label().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown criterion `{s}`"))
    }
}

/// Questionnaire prompt whose rating feeds one or more criteria.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Prompt {
    Appr,
    Undr,
    AssoCw,
    AssoCcw,
    ImplCw,
    ImplCcw,
    Anto,
    Bias,
}

impl Prompt {
    pub const ALL: [Prompt; 8] = [
        Prompt::Appr,
        Prompt::Undr,
        Prompt::AssoCw,
        Prompt::AssoCcw,
        Prompt::ImplCw,
        Prompt::ImplCcw,
        Prompt::Anto,
        Prompt::Bias,
    ];

    /// Prompts that must be answered for an attribute on `axis`.
    pub fn required_for(axis: Axis) -> &'static [Prompt] {
        match axis {
            Axis::Main => &Prompt::ALL,
            Axis::Derived => &Prompt::ALL[..6],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Prompt::Appr => "appr",
            Prompt::Undr => "undr",
            Prompt::AssoCw => "asso_cw",
            Prompt::AssoCcw => "asso_ccw",
            Prompt::ImplCw => "impl_cw",
            Prompt::ImplCcw => "impl_ccw",
            Prompt::Anto => "anto",
            Prompt::Bias => "bias",
        }
    }
}

impl fmt::Display for Prompt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Prompt {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let s = s.strip_prefix("r_").unwrap_or(s);
        Prompt::ALL
            .iter()
            .copied()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown prompt `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScoreError {
    #[error("rating {value} for `{what}` is outside [0, 1]")]
    OutOfRange { what: &'static str, value: f64 },
    #[error("incomplete record for respondent `{respondent}`, candidate `{candidate}`: missing prompt `{prompt}`")]
    IncompleteRecord {
        respondent: String,
        candidate: String,
        prompt: Prompt,
    },
    #[error("record for respondent `{respondent}`, candidate `{candidate}` carries prompt `{prompt}` which a {axis}-axis attribute does not use")]
    UnexpectedPrompt {
        respondent: String,
        candidate: String,
        prompt: Prompt,
        axis: Axis,
    },
    #[error("empty population: {0}")]
    EmptyPopulation(String),
}

fn unit(what: &'static str, value: f64) -> Result<f64, ScoreError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(ScoreError::OutOfRange { what, value })
    }
}

/// Direct score: the rating itself (APPR, UNDR, ANTO).
pub fn score_direct(r: f64) -> Result<f64, ScoreError> {
    unit("r", r)
}

/// Clarity: penalizes association with either adjacent attribute.
pub fn score_clarity(r_asso_cw: f64, r_asso_ccw: f64) -> Result<f64, ScoreError> {
    let cw = unit("r_asso_cw", r_asso_cw)?;
    let ccw = unit("r_asso_ccw", r_asso_ccw)?;
    Ok(1.0 - 0.5 * (cw + ccw))
}

/// Orthogonality: 1 at a neutral bias rating of 0.5, 0 at either extreme.
pub fn score_orthogonality(r_bias: f64) -> Result<f64, ScoreError> {
    let b = unit("r_bias", r_bias)?;
    Ok(1.0 - 2.0 * (b - 0.5).abs())
}

/// Non-connotativeness of a main-axis attribute towards its derived neighbors.
pub fn score_nonconnotativeness(r_impl_cw: f64, r_impl_ccw: f64) -> Result<f64, ScoreError> {
    Ok(1.0 - score_connotativeness(r_impl_cw, r_impl_ccw)?)
}

/// Connotativeness of a derived-axis attribute towards its main neighbors.
pub fn score_connotativeness(r_impl_cw: f64, r_impl_ccw: f64) -> Result<f64, ScoreError> {
    let cw = unit("r_impl_cw", r_impl_cw)?;
    let ccw = unit("r_impl_ccw", r_impl_ccw)?;
    Ok(0.5 * (cw + ccw))
}

/// Implicative balance between the two neighbors; used on both axes.
pub fn score_implicative_balance(r_impl_cw: f64, r_impl_ccw: f64) -> Result<f64, ScoreError> {
    let cw = unit("r_impl_cw", r_impl_cw)?;
    let ccw = unit("r_impl_ccw", r_impl_ccw)?;
    Ok(1.0 - (cw - ccw).abs())
}

/// One respondent's normalized ratings of one candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingRecord {
    pub respondent_id: String,
    pub candidate: String,
    pub attribute: PaqAttribute,
    pub ccr: CountryCode,
    pub appr: f64,
    pub undr: f64,
    pub asso_cw: f64,
    pub asso_ccw: f64,
    pub impl_cw: f64,
    pub impl_ccw: f64,
    /// Main axis only.
    pub anto: Option<f64>,
    /// Main axis only.
    pub bias: Option<f64>,
}

impl RatingRecord {
    pub fn rating(&self, prompt: Prompt) -> Option<f64> {
        match prompt {
            Prompt::Appr => Some(self.appr),
            Prompt::Undr => Some(self.undr),
            Prompt::AssoCw => Some(self.asso_cw),
            Prompt::AssoCcw => Some(self.asso_ccw),
            Prompt::ImplCw => Some(self.impl_cw),
            Prompt::ImplCcw => Some(self.impl_ccw),
            Prompt::Anto => self.anto,
            Prompt::Bias => self.bias,
        }
    }
}

/// Criterion scores of one record. Fields that do not apply to the record's
/// axis are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CriterionScores {
    pub appr: f64,
    pub undr: f64,
    pub clar: f64,
    pub ibal: f64,
    pub anto: Option<f64>,
    pub orth: Option<f64>,
    pub ncon: Option<f64>,
    pub conn: Option<f64>,
}

impl CriterionScores {
    pub fn get(&self, criterion: Criterion) -> Option<f64> {
        match criterion {
            Criterion::Appr => Some(self.appr),
            Criterion::Undr => Some(self.undr),
            Criterion::Clar => Some(self.clar),
            Criterion::Ibal => Some(self.ibal),
            Criterion::Anto => self.anto,
            Criterion::Orth => self.orth,
            Criterion::Ncon => self.ncon,
            Criterion::Conn => self.conn,
        }
    }
}

pub fn score_record(record: &RatingRecord) -> Result<CriterionScores, ScoreError> {
    let axis = record.attribute.axis();
    let incomplete = |prompt| ScoreError::IncompleteRecord {
        respondent: record.respondent_id.clone(),
        candidate: record.candidate.clone(),
        prompt,
    };
    let unexpected = |prompt| ScoreError::UnexpectedPrompt {
        respondent: record.respondent_id.clone(),
        candidate: record.candidate.clone(),
        prompt,
        axis,
    };

    let mut scores = CriterionScores {
        appr: unit("r_appr", record.appr)?,
        undr: unit("r_undr", record.undr)?,
        clar: score_clarity(record.asso_cw, record.asso_ccw)?,
        ibal: score_implicative_balance(record.impl_cw, record.impl_ccw)?,
        ..Default::default()
    };
    match axis {
        Axis::Main => {
            let anto = record.anto.ok_or_else(|| incomplete(Prompt::Anto))?;
            let bias = record.bias.ok_or_else(|| incomplete(Prompt::Bias))?;
            scores.anto = Some(score_direct(anto)?);
            scores.orth = Some(score_orthogonality(bias)?);
            scores.ncon = Some(score_nonconnotativeness(record.impl_cw, record.impl_ccw)?);
        }
        Axis::Derived => {
            if record.anto.is_some() {
                return Err(unexpected(Prompt::Anto));
            }
            if record.bias.is_some() {
                return Err(unexpected(Prompt::Bias));
            }
            scores.conn = Some(score_connotativeness(record.impl_cw, record.impl_ccw)?);
        }
    }
    Ok(scores)
}

/// A record together with its computed scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredRecord {
    pub respondent_id: String,
    pub candidate: String,
    pub attribute: PaqAttribute,
    pub ccr: CountryCode,
    pub scores: CriterionScores,
}

impl ScoredRecord {
    pub fn from_record(record: &RatingRecord) -> Result<Self, ScoreError> {
        Ok(ScoredRecord {
            respondent_id: record.respondent_id.clone(),
            candidate: record.candidate.clone(),
            attribute: record.attribute,
            ccr: record.ccr.clone(),
            scores: score_record(record)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grouping {
    Combined,
    ByCountry,
}

/// Key of one population in a mean table. `country` is `None` for the
/// combined population.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupKey {
    pub candidate: String,
    pub country: Option<CountryCode>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanScores {
    pub n: usize,
    pub scores: CriterionScores,
}

/// Arithmetic mean of every criterion over one population.
///
/// Records are reduced in `(respondent_id, candidate)` order so the result
/// does not depend on input order.
pub fn mean_of(records: &[&ScoredRecord]) -> Result<MeanScores, ScoreError> {
    if records.is_empty() {
        return Err(ScoreError::EmptyPopulation("no records to average".into()));
    }
    let mut sorted: Vec<&ScoredRecord> = records.to_vec();
    sorted.sort_by(|a, b| {
        (&a.respondent_id, &a.candidate).cmp(&(&b.respondent_id, &b.candidate))
    });
    let n = sorted.len() as f64;
    let mean = |f: &dyn Fn(&CriterionScores) -> f64| sorted.iter().map(|r| f(&r.scores)).sum::<f64>() / n;
    let mean_opt = |f: &dyn Fn(&CriterionScores) -> Option<f64>| {
        let present: Vec<f64> = sorted.iter().filter_map(|r| f(&r.scores)).collect();
        if present.is_empty() {
            None
        } else {
            Some(present.iter().sum::<f64>() / present.len() as f64)
        }
    };
    Ok(MeanScores {
        n: sorted.len(),
        scores: CriterionScores {
            appr: mean(&|s| s.appr),
            undr: mean(&|s| s.undr),
            clar: mean(&|s| s.clar),
            ibal: mean(&|s| s.ibal),
            anto: mean_opt(&|s| s.anto),
            orth: mean_opt(&|s| s.orth),
            ncon: mean_opt(&|s| s.ncon),
            conn: mean_opt(&|s| s.conn),
        },
    })
}

/// Mean scores per candidate (and per country under [`Grouping::ByCountry`]).
pub fn mean_scores(
    records: &[ScoredRecord],
    grouping: Grouping,
) -> Result<BTreeMap<GroupKey, MeanScores>, ScoreError> {
    if records.is_empty() {
        return Err(ScoreError::EmptyPopulation("no scored records".into()));
    }
    let mut groups: BTreeMap<GroupKey, Vec<&ScoredRecord>> = BTreeMap::new();
    for r in records {
        let key = GroupKey {
            candidate: r.candidate.clone(),
            country: match grouping {
                Grouping::Combined => None,
                Grouping::ByCountry => Some(r.ccr.clone()),
            },
        };
        groups.entry(key).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|(k, v)| mean_of(&v).map(|m| (k, m)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn record(attribute: PaqAttribute, v: f64) -> RatingRecord {
        let main = attribute.axis() == Axis::Main;
        RatingRecord {
            respondent_id: "r1".into(),
            candidate: "c".into(),
            attribute,
            ccr: CountryCode::new("SG"),
            appr: v,
            undr: v,
            asso_cw: v,
            asso_ccw: v,
            impl_cw: v,
            impl_ccw: v,
            anto: main.then_some(v),
            bias: main.then_some(v),
        }
    }

    #[test]
    fn direct_is_identity() {
        assert_eq!(score_direct(0.0).unwrap(), 0.0);
        assert_eq!(score_direct(1.0).unwrap(), 1.0);
        assert_eq!(score_direct(0.73).unwrap(), 0.73);
        assert!(score_direct(1.01).is_err());
        assert!(score_direct(-0.01).is_err());
        assert!(score_direct(f64::NAN).is_err());
    }

    #[test]
    fn clarity_examples() {
        assert_eq!(score_clarity(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(score_clarity(1.0, 1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(score_clarity(0.4, 0.6).unwrap(), 0.5, epsilon = 1e-15);
        assert!(score_clarity(0.5, 2.0).is_err());
    }

    #[test]
    fn orthogonality_examples() {
        assert_eq!(score_orthogonality(0.5).unwrap(), 1.0);
        assert_eq!(score_orthogonality(0.0).unwrap(), 0.0);
        assert_eq!(score_orthogonality(1.0).unwrap(), 0.0);
        assert_eq!(score_orthogonality(0.25).unwrap(), 0.5);
        assert!(score_orthogonality(-1.0).is_err());
    }

    #[test]
    fn connotation_examples() {
        assert_eq!(score_nonconnotativeness(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(score_nonconnotativeness(1.0, 1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(score_nonconnotativeness(0.2, 0.4).unwrap(), 0.7, epsilon = 1e-15);
        assert_eq!(score_connotativeness(1.0, 1.0).unwrap(), 1.0);
        assert_eq!(score_connotativeness(0.0, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(score_connotativeness(0.515, 0.579).unwrap(), 0.547, epsilon = 1e-12);
    }

    #[test]
    fn balance_examples() {
        for x in [0.0, 0.3, 0.77, 1.0] {
            assert_eq!(score_implicative_balance(x, x).unwrap(), 1.0);
        }
        assert_eq!(score_implicative_balance(1.0, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(score_implicative_balance(0.3, 0.7).unwrap(), 0.6, epsilon = 1e-15);
    }

    #[test]
    fn main_record_at_half() {
        let s = score_record(&record(PaqAttribute::Pleasant, 0.5)).unwrap();
        assert_eq!((s.appr, s.undr, s.clar, s.ibal), (0.5, 0.5, 0.5, 1.0));
        assert_eq!(s.anto, Some(0.5));
        assert_eq!(s.orth, Some(1.0));
        assert_eq!(s.ncon, Some(0.5));
        assert_eq!(s.conn, None);
    }

    #[test]
    fn derived_record_at_zero() {
        let s = score_record(&record(PaqAttribute::Calm, 0.0)).unwrap();
        assert_eq!((s.appr, s.undr, s.clar, s.ibal), (0.0, 0.0, 1.0, 1.0));
        assert_eq!(s.conn, Some(0.0));
        assert_eq!((s.anto, s.orth, s.ncon), (None, None, None));
    }

    #[test]
    fn derived_record_unbalanced() {
        let mut r = record(PaqAttribute::Vibrant, 0.0);
        r.impl_cw = 1.0;
        let s = score_record(&r).unwrap();
        assert_eq!(s.conn, Some(0.5));
        assert_eq!(s.ibal, 0.0);
    }

    #[test]
    fn missing_and_unexpected_prompts() {
        let mut r = record(PaqAttribute::Annoying, 0.5);
        r.bias = None;
        match score_record(&r) {
            Err(ScoreError::IncompleteRecord { prompt, .. }) => assert_eq!(prompt, Prompt::Bias),
            other => panic!("unexpected {other:?}"),
        }
        let mut r = record(PaqAttribute::Chaotic, 0.5);
        r.anto = Some(0.5);
        assert!(matches!(
            score_record(&r),
            Err(ScoreError::UnexpectedPrompt { prompt: Prompt::Anto, .. })
        ));
    }

    #[test]
    fn means_group_and_single_record() {
        let a = ScoredRecord::from_record(&record(PaqAttribute::Calm, 0.2)).unwrap();
        let mut b = ScoredRecord::from_record(&record(PaqAttribute::Calm, 0.6)).unwrap();
        b.respondent_id = "r2".into();
        b.ccr = CountryCode::new("MY");

        let single = mean_scores(std::slice::from_ref(&a), Grouping::Combined).unwrap();
        let m = single.values().next().unwrap();
        assert_eq!(m.scores, a.scores);

        let combined = mean_scores(&[a.clone(), b.clone()], Grouping::Combined).unwrap();
        assert_eq!(combined.len(), 1);
        let m = combined.values().next().unwrap();
        assert_eq!(m.n, 2);
        assert_abs_diff_eq!(m.scores.appr, 0.4, epsilon = 1e-15);

        let split = mean_scores(&[a, b], Grouping::ByCountry).unwrap();
        assert_eq!(split.len(), 2);
        assert!(mean_scores(&[], Grouping::Combined).is_err());
    }

    #[test]
    fn criteria_match_axis() {
        assert_eq!(Criterion::for_axis(Axis::Main).len(), 7);
        assert_eq!(Criterion::for_axis(Axis::Derived).len(), 5);
        assert!(!Criterion::for_axis(Axis::Derived).contains(&Criterion::Ncon));
        assert!(!Criterion::for_axis(Axis::Main).contains(&Criterion::Conn));
    }
}
