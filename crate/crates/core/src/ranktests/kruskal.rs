use serde::{Deserialize, Serialize};

use super::distributions::{chi_square_sf, student_t_sf};
use super::ranks::{midranks, tie_term};
use super::{
    bonferroni, check_samples, EffectBand, EffectSize, Method, PairwiseResult, Sample, TestError,
    TestFlag, TestResult,
};

/// Pooled midranks of several samples, with each sample's values sorted first.
pub(crate) struct PooledRanks {
    pub sizes: Vec<usize>,
    pub ranks: Vec<Vec<f64>>,
    pub pooled_values: Vec<f64>,
}

impl PooledRanks {
    pub fn new(groups: &[Sample]) -> Self {
        let mut pooled_values = Vec::new();
        let mut sizes = Vec::with_capacity(groups.len());
        for g in groups {
            let mut v = g.values.clone();
            v.sort_by(f64::total_cmp);
            sizes.push(v.len());
            pooled_values.extend(v);
        }
        let all = midranks(&pooled_values);
        let mut ranks = Vec::with_capacity(groups.len());
        let mut offset = 0;
        for &n in &sizes {
            ranks.push(all[offset..offset + n].to_vec());
            offset += n;
        }
        PooledRanks {
            sizes,
            ranks,
            pooled_values,
        }
    }

    pub fn total(&self) -> usize {
        self.pooled_values.len()
    }

    pub fn mean_rank(&self, i: usize) -> f64 {
        self.ranks[i].iter().sum::<f64>() / self.sizes[i] as f64
    }

    /// Tie-corrected Kruskal-Wallis statistic, or `None` when all values tie.
    pub fn kw_statistic(&self) -> Option<f64> {
        let n = self.total() as f64;
        let correction = 1.0 - tie_term(&self.pooled_values) / (n * n * n - n);
        if correction <= 0.0 {
            return None;
        }
        let centre = (n + 1.0) / 2.0;
        let between: f64 = (0..self.sizes.len())
            .map(|i| {
                let d = self.mean_rank(i) - centre;
                self.sizes[i] as f64 * d * d
            })
            .sum();
        Some(12.0 / (n * (n + 1.0)) * between / correction)
    }
}

/// Kruskal-Wallis H test across two or more samples.
///
/// The effect size is η² from [`kw_eta_squared`] whenever `N > k`.
pub fn kruskal_wallis(groups: &[Sample]) -> Result<TestResult, TestError> {
    check_samples(groups, 2)?;
    let pooled = PooledRanks::new(groups);
    let n = pooled.total();
    if n < 3 {
        return Err(TestError::TooFewObservations { needed: 3, got: n });
    }
    let k = groups.len();
    let df = (k - 1) as f64;
    let Some(h) = pooled.kw_statistic() else {
        return Ok(TestResult::degenerate(Method::KruskalWallis, Some(df)));
    };
    let effect_size = kw_eta_squared(h, k, n).ok().map(|eta_sq| EffectSize {
        eta_sq,
        band: effect_band(eta_sq),
    });
    Ok(TestResult {
        method: Method::KruskalWallis,
        statistic: h,
        df: Some(df),
        p_value: chi_square_sf(h, df),
        effect_size,
        flags: Vec::new(),
    })
}

/// η² for Kruskal-Wallis: `(H − k + 1) / (n − k)`. Can be negative for small H.
pub fn kw_eta_squared(h: f64, k: usize, n: usize) -> Result<f64, TestError> {
    if k < 2 || n <= k {
        return Err(TestError::InvalidArgument(format!(
            "eta squared needs n > k >= 2 (n = {n}, k = {k})"
        )));
    }
    Ok((h - k as f64 + 1.0) / (n - k) as f64)
}

pub fn effect_band(eta_sq: f64) -> EffectBand {
    if eta_sq < 0.06 {
        EffectBand::Small
    } else if eta_sq <= 0.14 {
        EffectBand::Moderate
    } else {
        EffectBand::Large
    }
}

/// Output of a Conover-Iman posthoc family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConoverIman {
    /// Student-t degrees of freedom, `N − k`.
    pub df: f64,
    /// Tie-corrected Kruskal-Wallis statistic of the same data.
    pub h: f64,
    pub pairs: Vec<PairwiseResult>,
    pub flags: Vec<TestFlag>,
}

/// Conover-Iman pairwise comparisons on pooled midranks.
///
/// Pairs are `(i, j)` with `i < j` in input order. p-values are two-sided
/// from Student-t with `N − k` degrees of freedom and Bonferroni-adjusted over
/// the `k(k−1)/2` pairs.
pub fn conover_iman(groups: &[Sample]) -> Result<ConoverIman, TestError> {
    check_samples(groups, 2)?;
    let pooled = PooledRanks::new(groups);
    let n_total = pooled.total();
    let k = groups.len();
    if n_total <= k {
        return Err(TestError::TooFewObservations {
            needed: k + 1,
            got: n_total,
        });
    }
    let n = n_total as f64;
    let df = (n_total - k) as f64;
    let m = k * (k - 1) / 2;

    let sum_sq: f64 = pooled.ranks.iter().flatten().map(|r| r * r).sum();
    let s2 = (sum_sq - n * (n + 1.0) * (n + 1.0) / 4.0) / (n - 1.0);
    let h = pooled.kw_statistic();

    let mut pairs = Vec::with_capacity(m);
    let mut raw = Vec::with_capacity(m);
    let degenerate = h.is_none() || s2 <= 0.0;
    let h = h.unwrap_or(0.0);
    let scale = s2 * (n - 1.0 - h) / df;
    for i in 0..k {
        for j in (i + 1)..k {
            let diff = pooled.mean_rank(i) - pooled.mean_rank(j);
            let (t, p) = if degenerate {
                (0.0, 1.0)
            } else if n - 1.0 - h <= 1e-12 * n {
                // groups perfectly separated with internal ties only
                if diff == 0.0 {
                    (0.0, 1.0)
                } else {
                    (diff.signum() * f64::INFINITY, 0.0)
                }
            } else {
                let se = (scale * (1.0 / pooled.sizes[i] as f64 + 1.0 / pooled.sizes[j] as f64)).sqrt();
                let t = diff / se;
                (t, (2.0 * student_t_sf(t.abs(), df)).min(1.0))
            };
            pairs.push(PairwiseResult {
                pair: (groups[i].label.clone(), groups[j].label.clone()),
                statistic: t,
                p_raw: p,
                p_adjusted: p,
            });
            raw.push(p);
        }
    }
    let adjusted = bonferroni(&raw, m)?;
    for (pr, adj) in pairs.iter_mut().zip(adjusted) {
        pr.p_adjusted = adj;
    }
    Ok(ConoverIman {
        df,
        h,
        pairs,
        flags: if degenerate { vec![TestFlag::Degenerate] } else { Vec::new() },
    })
}
