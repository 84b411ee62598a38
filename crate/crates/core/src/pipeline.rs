//! Per-attribute analysis: mean tables, the cross-national omnibus with its
//! gated Mann-Whitney posthoc, and the intra-country Kruskal-Wallis with its
//! gated Conover-Iman posthoc.
//!
//! Routing per criterion:
//!
//! - cross-national: Prentice over blocks = candidates and groups = countries
//!   when the attribute has more than one candidate, otherwise Kruskal-Wallis
//!   across countries. Skipped when only one country is present.
//! - posthoc (cross-national): only when the omnibus p < alpha. One
//!   Mann-Whitney test per candidate and country pair, Bonferroni over the
//!   whole family.
//! - intra-country: Kruskal-Wallis across candidates within each country,
//!   multi-candidate attributes only.
//! - posthoc (intra-country): Conover-Iman, only when that test has p < alpha
//!   and more than two candidates.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circumplex::{Axis, PaqAttribute};
use crate::ingest::{filter_ccr, CountryCode, ExclusionReport, IngestError, Respondent, StudyConfig};
use crate::ranktests::{
    bonferroni, conover_iman, kruskal_wallis, mann_whitney, prentice, BlockedObservation,
    ConoverIman, Sample, TestError, TestResult,
};
use crate::scoring::{mean_of, Criterion, MeanScores, RatingRecord, ScoreError, ScoredRecord};

/// Significance level used when neither the config nor the caller overrides it.
pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("scoring {attribute}: {source}")]
    Score {
        attribute: PaqAttribute,
        #[source]
        source: ScoreError,
    },
    #[error("{attribute}: record of respondent `{respondent}` has no {criterion} score, which a {axis}-axis attribute requires")]
    MissingCriterion {
        attribute: PaqAttribute,
        axis: Axis,
        criterion: Criterion,
        respondent: String,
    },
    #[error("{attribute}: {context}: {source}")]
    Test {
        attribute: PaqAttribute,
        context: String,
        #[source]
        source: TestError,
    },
    #[error("{attribute}: no records")]
    NoRecords { attribute: PaqAttribute },
    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
}

/// Result of a test that may not be computable on the data at hand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Outcome<T> {
    Tested(T),
    Skipped { reason: String },
}

impl<T> Outcome<T> {
    pub fn tested(&self) -> Option<&T> {
        match self {
            Outcome::Tested(t) => Some(t),
            Outcome::Skipped { .. } => None,
        }
    }

    fn from_test(r: Result<T, TestError>) -> Self {
        match r {
            Ok(t) => Outcome::Tested(t),
            Err(e) => Outcome::Skipped { reason: e.to_string() },
        }
    }
}

impl Outcome<TestResult> {
    /// p-value below `alpha`; skipped and degenerate results never are.
    pub fn is_significant(&self, alpha: f64) -> bool {
        self.tested().is_some_and(|r| !r.is_degenerate() && r.p_value < alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    pub alpha: f64,
    /// Also run Kruskal-Wallis across candidates on the pooled population.
    pub combined: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            alpha: DEFAULT_ALPHA,
            combined: false,
        }
    }
}

impl AnalysisOptions {
    pub fn from_config(config: &StudyConfig) -> Self {
        AnalysisOptions {
            alpha: config.alpha,
            combined: false,
        }
    }

    fn validate(&self) -> Result<(), PipelineError> {
        if self.alpha > 0.0 && self.alpha < 1.0 {
            Ok(())
        } else {
            Err(PipelineError::InvalidAlpha(self.alpha))
        }
    }
}

/// Mean scores of one candidate, pooled and per country.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanRow {
    pub candidate: String,
    pub combined: MeanScores,
    pub by_country: BTreeMap<CountryCode, MeanScores>,
}

/// One Mann-Whitney comparison of the cross-national posthoc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MwwPosthoc {
    pub candidate: String,
    pub countries: (CountryCode, CountryCode),
    pub outcome: Outcome<TestResult>,
    /// Bonferroni-adjusted p; `None` when the comparison was skipped.
    pub p_adjusted: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossNationalTest {
    pub criterion: Criterion,
    pub omnibus: Outcome<TestResult>,
    /// Present only when the omnibus is significant.
    pub posthoc: Option<Vec<MwwPosthoc>>,
    pub family_size: usize,
}

/// Kruskal-Wallis across candidates within one population, with its posthoc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateTest {
    /// `None` for the pooled population.
    pub country: Option<CountryCode>,
    pub criterion: Criterion,
    pub omnibus: Outcome<TestResult>,
    /// Present only when the omnibus is significant and there are more than two candidates.
    pub posthoc: Option<ConoverIman>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeAnalysis {
    pub attribute: PaqAttribute,
    pub axis: Axis,
    pub candidates: Vec<String>,
    pub countries: Vec<CountryCode>,
    pub mean_table: Vec<MeanRow>,
    pub cross_national: Vec<CrossNationalTest>,
    /// Empty for single-candidate attributes.
    pub intra_country: Vec<CandidateTest>,
    /// Only filled when the combined mode is on and there are several candidates.
    pub combined: Vec<CandidateTest>,
}

impl AttributeAnalysis {
    pub fn criteria(&self) -> &'static [Criterion] {
        Criterion::table_order(self.axis)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub exclusion: ExclusionReport,
    pub alpha: f64,
    pub combined_mode: bool,
    /// In report order; attributes without records are absent.
    pub analyses: Vec<AttributeAnalysis>,
}

impl StudyResult {
    pub fn analysis(&self, attribute: PaqAttribute) -> Option<&AttributeAnalysis> {
        self.analyses.iter().find(|a| a.attribute == attribute)
    }
}

fn values<'a>(
    records: impl IntoIterator<Item = &'a ScoredRecord>,
    criterion: Criterion,
) -> Vec<f64> {
    records
        .into_iter()
        .filter_map(|r| r.scores.get(criterion))
        .collect()
}

/// Analyze one attribute.
///
/// `candidate_order` fixes row order (normally the config's list); candidates
/// found in `records` but not listed there follow in sorted order. Records
/// for other attributes are ignored.
pub fn analyze_attribute(
    attribute: PaqAttribute,
    candidate_order: &[String],
    records: &[ScoredRecord],
    options: &AnalysisOptions,
) -> Result<AttributeAnalysis, PipelineError> {
    options.validate()?;
    let axis = attribute.axis();
    let mut records: Vec<&ScoredRecord> = records.iter().filter(|r| r.attribute == attribute).collect();
    if records.is_empty() {
        return Err(PipelineError::NoRecords { attribute });
    }
    records.sort_by(|a, b| {
        (&a.candidate, &a.ccr, &a.respondent_id).cmp(&(&b.candidate, &b.ccr, &b.respondent_id))
    });
    for r in &records {
        for &criterion in Criterion::for_axis(axis) {
            if r.scores.get(criterion).is_none() {
                return Err(PipelineError::MissingCriterion {
                    attribute,
                    axis,
                    criterion,
                    respondent: r.respondent_id.clone(),
                });
            }
        }
    }

    let present: BTreeSet<&str> = records.iter().map(|r| r.candidate.as_str()).collect();
    let mut candidates: Vec<String> = candidate_order
        .iter()
        .filter(|c| present.contains(c.as_str()))
        .cloned()
        .collect();
    for c in &present {
        if !candidates.iter().any(|k| k == c) {
            candidates.push(c.to_string());
        }
    }
    let countries: Vec<CountryCode> = records
        .iter()
        .map(|r| r.ccr.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    // cell (candidate, country) -> records
    let mut cells: BTreeMap<(String, CountryCode), Vec<&ScoredRecord>> = BTreeMap::new();
    for r in &records {
        cells.entry((r.candidate.clone(), r.ccr.clone())).or_default().push(r);
    }
    let empty: Vec<&ScoredRecord> = Vec::new();
    let cell = |cand: &str, country: &CountryCode| -> &Vec<&ScoredRecord> {
        cells.get(&(cand.to_string(), country.clone())).unwrap_or(&empty)
    };
    let of_candidate = |cand: &str| -> Vec<&ScoredRecord> {
        records.iter().copied().filter(|r| r.candidate == cand).collect()
    };
    let score_ctx = |source| PipelineError::Score { attribute, source };

    let mut mean_table = Vec::with_capacity(candidates.len());
    for cand in &candidates {
        let combined = mean_of(&of_candidate(cand)).map_err(score_ctx)?;
        let mut by_country = BTreeMap::new();
        for country in &countries {
            let rs = cell(cand, country);
            if !rs.is_empty() {
                by_country.insert(country.clone(), mean_of(rs).map_err(score_ctx)?);
            }
        }
        mean_table.push(MeanRow {
            candidate: cand.clone(),
            combined,
            by_country,
        });
    }

    let criteria = Criterion::table_order(axis);
    let multi = candidates.len() > 1;
    let country_pairs: Vec<(usize, usize)> = (0..countries.len())
        .flat_map(|i| ((i + 1)..countries.len()).map(move |j| (i, j)))
        .collect();

    let mut cross_national = Vec::with_capacity(criteria.len());
    for &criterion in criteria {
        let omnibus = if countries.len() < 2 {
            Outcome::Skipped {
                reason: format!("only one country present ({})", countries[0]),
            }
        } else if multi {
            let obs: Vec<BlockedObservation> = records
                .iter()
                .filter_map(|r| {
                    r.scores
                        .get(criterion)
                        .map(|v| BlockedObservation::new(r.candidate.clone(), r.ccr.as_str(), v))
                })
                .collect();
            Outcome::from_test(prentice(&obs))
        } else {
            let samples: Vec<Sample> = countries
                .iter()
                .map(|c| Sample::new(c.as_str(), values(cell(&candidates[0], c).iter().copied(), criterion)))
                .collect();
            Outcome::from_test(kruskal_wallis(&samples))
        };

        let family_size = candidates.len() * country_pairs.len();
        let posthoc = if omnibus.is_significant(options.alpha) {
            let mut entries = Vec::with_capacity(family_size);
            for cand in &candidates {
                for &(i, j) in &country_pairs {
                    let x = Sample::new(countries[i].as_str(), values(cell(cand, &countries[i]).iter().copied(), criterion));
                    let y = Sample::new(countries[j].as_str(), values(cell(cand, &countries[j]).iter().copied(), criterion));
                    let outcome = Outcome::from_test(mann_whitney(&x, &y));
                    let p_adjusted = match &outcome {
                        Outcome::Tested(r) => Some(bonferroni(&[r.p_value], family_size).map_err(|source| {
                            PipelineError::Test {
                                attribute,
                                context: format!("{criterion} posthoc"),
                                source,
                            }
                        })?[0]),
                        Outcome::Skipped { .. } => None,
                    };
                    entries.push(MwwPosthoc {
                        candidate: cand.clone(),
                        countries: (countries[i].clone(), countries[j].clone()),
                        outcome,
                        p_adjusted,
                    });
                }
            }
            Some(entries)
        } else {
            None
        };
        cross_national.push(CrossNationalTest {
            criterion,
            omnibus,
            posthoc,
            family_size,
        });
    }

    let candidate_test = |country: Option<&CountryCode>, criterion: Criterion| -> CandidateTest {
        let samples: Vec<Sample> = candidates
            .iter()
            .map(|cand| {
                let vals = match country {
                    Some(c) => values(cell(cand, c).iter().copied(), criterion),
                    None => values(of_candidate(cand), criterion),
                };
                Sample::new(cand.as_str(), vals)
            })
            .filter(|s| !s.values.is_empty())
            .collect();
        let omnibus = Outcome::from_test(kruskal_wallis(&samples));
        let posthoc = (samples.len() > 2 && omnibus.is_significant(options.alpha))
            .then(|| conover_iman(&samples).ok())
            .flatten();
        CandidateTest {
            country: country.cloned(),
            criterion,
            omnibus,
            posthoc,
        }
    };

    let mut intra_country = Vec::new();
    let mut combined = Vec::new();
    if multi {
        for country in &countries {
            for &criterion in criteria {
                intra_country.push(candidate_test(Some(country), criterion));
            }
        }
        if options.combined {
            for &criterion in criteria {
                combined.push(candidate_test(None, criterion));
            }
        }
    }

    Ok(AttributeAnalysis {
        attribute,
        axis,
        candidates,
        countries,
        mean_table,
        cross_national,
        intra_country,
        combined,
    })
}

/// Filter, score and analyze every attribute present in `records`.
///
/// Attributes are analyzed in parallel; the result lists them in
/// [`PaqAttribute::REPORT_ORDER`] regardless of scheduling.
pub fn run_study(
    records: &[RatingRecord],
    respondents: &[Respondent],
    config: &StudyConfig,
    options: &AnalysisOptions,
) -> Result<StudyResult, PipelineError> {
    options.validate()?;
    let (kept, _, exclusion) = filter_ccr(records, respondents, config)?;
    let scored: Vec<ScoredRecord> = kept
        .iter()
        .map(|r| {
            ScoredRecord::from_record(r).map_err(|source| PipelineError::Score {
                attribute: r.attribute,
                source,
            })
        })
        .collect::<Result<_, _>>()?;
    let present: BTreeSet<PaqAttribute> = scored.iter().map(|r| r.attribute).collect();
    let attributes: Vec<PaqAttribute> = PaqAttribute::REPORT_ORDER
        .into_iter()
        .filter(|a| present.contains(a))
        .collect();
    let no_candidates = Vec::new();
    let analyses = attributes
        .par_iter()
        .map(|&attribute| {
            let order = config.attributes.get(&attribute).unwrap_or(&no_candidates);
            analyze_attribute(attribute, order, &scored, options)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(StudyResult {
        exclusion,
        alpha: options.alpha,
        combined_mode: options.combined,
        analyses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scoring::CriterionScores;

    fn scored(id: &str, cand: &str, ccr: &str, attribute: PaqAttribute, v: f64) -> ScoredRecord {
        let main = attribute.axis() == Axis::Main;
        ScoredRecord {
            respondent_id: id.into(),
            candidate: cand.into(),
            attribute,
            ccr: CountryCode::new(ccr),
            scores: CriterionScores {
                appr: v,
                undr: v,
                clar: v,
                ibal: v,
                anto: main.then_some(v),
                orth: main.then_some(v),
                ncon: main.then_some(v),
                conn: (!main).then_some(v),
            },
        }
    }

    fn spread(cand: &str, ccr: &str, attribute: PaqAttribute, base: f64, n: usize) -> Vec<ScoredRecord> {
        (0..n)
            .map(|i| scored(&format!("{ccr}{i:03}"), cand, ccr, attribute, base + 0.01 * i as f64))
            .collect()
    }

    #[test]
    fn single_candidate_routes_to_kruskal_wallis() {
        let mut rs = spread("a", "MY", PaqAttribute::Vibrant, 0.1, 8);
        rs.extend(spread("a", "SG", PaqAttribute::Vibrant, 0.5, 8));
        let a = analyze_attribute(PaqAttribute::Vibrant, &["a".into()], &rs, &AnalysisOptions::default()).unwrap();
        assert_eq!(a.cross_national.len(), 5);
        let t = a.cross_national[0].omnibus.tested().unwrap();
        assert_eq!(t.method, crate::ranktests::Method::KruskalWallis);
        assert!(t.p_value < 0.01);
        let post = a.cross_national[0].posthoc.as_ref().unwrap();
        assert_eq!(post.len(), 1);
        assert!(a.intra_country.is_empty());
        assert!(a.cross_national.iter().all(|c| c.criterion != Criterion::Anto));
    }

    #[test]
    fn multi_candidate_routes_to_prentice() {
        let mut rs = Vec::new();
        for (cand, base) in [("a", 0.1), ("b", 0.3), ("c", 0.6)] {
            rs.extend(spread(cand, "MY", PaqAttribute::Calm, base, 6));
            rs.extend(spread(cand, "SG", PaqAttribute::Calm, base + 0.005, 6));
        }
        let a = analyze_attribute(
            PaqAttribute::Calm,
            &["c".into(), "a".into(), "b".into()],
            &rs,
            &AnalysisOptions::default(),
        )
        .unwrap();
        assert_eq!(a.candidates, vec!["c", "a", "b"]);
        let t = a.cross_national[0].omnibus.tested().unwrap();
        assert_eq!(t.method, crate::ranktests::Method::Prentice);
        assert_eq!(a.intra_country.len(), 2 * 5);
        let kw = &a.intra_country[0];
        assert!(kw.omnibus.is_significant(0.05));
        let ci = kw.posthoc.as_ref().unwrap();
        assert_eq!(ci.pairs.len(), 3);
        assert!(a.combined.is_empty());
    }

    #[test]
    fn single_country_skips_cross_national() {
        let rs = spread("a", "SG", PaqAttribute::Pleasant, 0.2, 5);
        let a = analyze_attribute(PaqAttribute::Pleasant, &[], &rs, &AnalysisOptions::default()).unwrap();
        assert!(a
            .cross_national
            .iter()
            .all(|c| matches!(c.omnibus, Outcome::Skipped { .. }) && c.posthoc.is_none()));
    }

    #[test]
    fn missing_criterion_is_schema_error() {
        let mut r = scored("x", "a", "SG", PaqAttribute::Pleasant, 0.5);
        r.scores.orth = None;
        let err = analyze_attribute(PaqAttribute::Pleasant, &[], &[r], &AnalysisOptions::default()).unwrap_err();
        assert!(matches!(err, PipelineError::MissingCriterion { criterion: Criterion::Orth, .. }));
    }

    #[test]
    fn single_respondent_never_crashes() {
        let rs = vec![
            scored("a", "c1", "SG", PaqAttribute::Calm, 0.5),
            scored("a", "c2", "SG", PaqAttribute::Calm, 0.4),
        ];
        let a = analyze_attribute(PaqAttribute::Calm, &[], &rs, &AnalysisOptions::default()).unwrap();
        for t in &a.intra_country {
            assert!(matches!(t.omnibus, Outcome::Skipped { .. }) || t.omnibus.tested().unwrap().p_value >= 0.0);
            assert!(t.posthoc.is_none());
        }
    }

    #[test]
    fn rejects_bad_alpha() {
        let rs = spread("a", "SG", PaqAttribute::Calm, 0.2, 3);
        let opts = AnalysisOptions { alpha: 0.0, combined: false };
        assert!(matches!(
            analyze_attribute(PaqAttribute::Calm, &[], &rs, &opts),
            Err(PipelineError::InvalidAlpha(_))
        ));
    }
}
