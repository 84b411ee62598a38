//! Block-design rank tests: Friedman for complete balanced layouts and the
//! Prentice generalization for replicated, incomplete or unbalanced ones.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::distributions::chi_square_sf;
use super::ranks::{midranks, tie_term};
use super::{Method, TestError, TestFlag, TestResult};

/// One observation in a block design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockedObservation {
    pub block: String,
    pub group: String,
    pub value: f64,
}

impl BlockedObservation {
    pub fn new(block: impl Into<String>, group: impl Into<String>, value: f64) -> Self {
        BlockedObservation {
            block: block.into(),
            group: group.into(),
            value,
        }
    }
}

/// Friedman test on a `b × k` matrix: one row per block, one column per treatment.
pub fn friedman(blocks: &[Vec<f64>]) -> Result<TestResult, TestError> {
    let b = blocks.len();
    if b < 2 {
        return Err(TestError::TooFewObservations { needed: 2, got: b });
    }
    let k = blocks[0].len();
    if k < 2 {
        return Err(TestError::TooFewGroups { needed: 2, got: k });
    }
    for (row, cells) in blocks.iter().enumerate() {
        if cells.len() != k {
            return Err(TestError::IncompleteMatrix {
                row,
                got: cells.len(),
                expected: k,
            });
        }
        if cells.iter().any(|v| !v.is_finite()) {
            return Err(TestError::NonFinite(format!("block {row}")));
        }
    }
    let (bf, kf) = (b as f64, k as f64);
    let mut rank_sums = vec![0.0; k];
    let mut ties = 0.0;
    for cells in blocks {
        for (sum, r) in rank_sums.iter_mut().zip(midranks(cells)) {
            *sum += r;
        }
        ties += tie_term(cells);
    }
    let df = kf - 1.0;
    let denom = bf * kf * (kf + 1.0) - ties / (kf - 1.0);
    if denom <= 0.0 {
        return Ok(TestResult::degenerate(Method::Friedman, Some(df)));
    }
    let centre = bf * (kf + 1.0) / 2.0;
    let ss: f64 = rank_sums.iter().map(|r| (r - centre) * (r - centre)).sum();
    let q = 12.0 * ss / denom;
    Ok(TestResult {
        method: Method::Friedman,
        statistic: q,
        df: Some(df),
        p_value: chi_square_sf(q, df),
        effect_size: None,
        flags: Vec::new(),
    })
}

/// Prentice rank test for replicated, incomplete or unbalanced block designs.
///
/// Observations are ranked within their block and each rank is scaled by
/// `1 / (n_b + 1)`, so blocks of any size map onto `(0, 1)`. Centred scores are
/// summed per group, and their covariance under within-block permutation is
/// accumulated over blocks. The statistic is the quadratic form `S' V⁺ S`,
/// chi-square with `rank(V)` degrees of freedom (normally `g − 1`).
pub fn prentice(observations: &[BlockedObservation]) -> Result<TestResult, TestError> {
    if let Some(o) = observations.iter().find(|o| !o.value.is_finite()) {
        return Err(TestError::NonFinite(o.group.clone()));
    }
    let groups: Vec<&str> = {
        let mut g: Vec<&str> = observations.iter().map(|o| o.group.as_str()).collect();
        g.sort_unstable();
        g.dedup();
        g
    };
    let g = groups.len();
    if g < 2 {
        return Err(TestError::TooFewGroups { needed: 2, got: g });
    }
    let group_index = |label: &str| groups.binary_search(&label).expect("known group");

    let mut by_block: BTreeMap<&str, Vec<(usize, f64)>> = BTreeMap::new();
    for o in observations {
        by_block
            .entry(o.block.as_str())
            .or_default()
            .push((group_index(&o.group), o.value));
    }

    let mut sums = DVector::<f64>::zeros(g);
    let mut cov = DMatrix::<f64>::zeros(g, g);
    let mut used = 0usize;
    let mut dropped = 0usize;
    for (label, mut cells) in by_block {
        cells.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let n = cells.len();
        let mut counts = vec![0usize; g];
        for &(gi, _) in &cells {
            counts[gi] += 1;
        }
        if n < 2 || counts.iter().filter(|&&c| c > 0).count() < 2 {
            log::warn!("dropping block `{label}`: {n} observation(s) in fewer than two groups");
            dropped += 1;
            continue;
        }
        used += 1;

        let values: Vec<f64> = cells.iter().map(|c| c.1).collect();
        let ranks = midranks(&values);
        let nf = n as f64;
        let mean_rank = (nf + 1.0) / 2.0;
        let ss: f64 = ranks.iter().map(|r| (r - mean_rank) * (r - mean_rank)).sum();
        if ss <= 0.0 {
            // all tied: no information, contributes nothing
            continue;
        }
        let scale = 1.0 / (nf + 1.0);
        for (&(gi, _), r) in cells.iter().zip(&ranks) {
            sums[gi] += scale * (r - mean_rank);
        }
        // permutation covariance of group sums: s² (diag(n_j) − n n'/N)
        let s2 = scale * scale * ss / (nf - 1.0);
        for a in 0..g {
            if counts[a] == 0 {
                continue;
            }
            let na = counts[a] as f64;
            cov[(a, a)] += s2 * na;
            for b in 0..g {
                cov[(a, b)] -= s2 * na * counts[b] as f64 / nf;
            }
        }
    }
    if used == 0 {
        return Err(TestError::NoUsableBlocks);
    }

    let mut flags = Vec::new();
    if dropped > 0 {
        flags.push(TestFlag::DroppedBlocks(dropped));
    }
    let max_diag = cov.diagonal().max();
    if max_diag.is_nan() || max_diag <= 0.0 {
        let mut r = TestResult::degenerate(Method::Prentice, Some((g - 1) as f64));
        r.flags.extend(flags);
        return Ok(r);
    }

    let eig = SymmetricEigen::new(cov);
    let tol = max_diag * g as f64 * 1e-12;
    let mut q = 0.0;
    let mut rank = 0usize;
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda > tol {
            let proj = eig.eigenvectors.column(i).dot(&sums);
            q += proj * proj / lambda;
            rank += 1;
        }
    }
    if rank < g - 1 {
        flags.push(TestFlag::PseudoInverse { rank });
    }
    let df = rank as f64;
    Ok(TestResult {
        method: Method::Prentice,
        statistic: q,
        df: Some(df),
        p_value: chi_square_sf(q, df),
        effect_size: None,
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ranktests::{kruskal_wallis, Sample};
    use approx::assert_abs_diff_eq;

    #[test]
    fn friedman_identical_ordering() {
        let r = friedman(&[vec![1.0, 2.0, 3.0], vec![10.0, 20.0, 30.0]]).unwrap();
        assert_abs_diff_eq!(r.statistic, 4.0, epsilon = 1e-12);
        assert_eq!(r.df, Some(2.0));
    }

    #[test]
    fn friedman_constant_blocks() {
        let r = friedman(&[vec![5.0; 3], vec![6.0; 3], vec![7.0; 3]]).unwrap();
        assert!(r.is_degenerate());
        assert_eq!((r.statistic, r.p_value), (0.0, 1.0));
    }

    #[test]
    fn friedman_rejects_ragged() {
        assert!(matches!(
            friedman(&[vec![1.0, 2.0], vec![1.0]]),
            Err(TestError::IncompleteMatrix { row: 1, .. })
        ));
    }

    fn balanced(rows: &[Vec<f64>]) -> Vec<BlockedObservation> {
        rows.iter()
            .enumerate()
            .flat_map(|(b, row)| {
                row.iter()
                    .enumerate()
                    .map(move |(g, &v)| BlockedObservation::new(format!("b{b}"), format!("g{g}"), v))
            })
            .collect()
    }

    #[test]
    fn prentice_reduces_to_friedman() {
        let rows = vec![
            vec![3.0, 1.0, 2.0],
            vec![2.0, 2.0, 5.0],
            vec![9.0, 4.0, 4.0],
            vec![1.0, 7.0, 3.0],
        ];
        let f = friedman(&rows).unwrap();
        let p = prentice(&balanced(&rows)).unwrap();
        assert_abs_diff_eq!(p.statistic, f.statistic, epsilon = 1e-9);
        assert_eq!(p.df, f.df);
    }

    #[test]
    fn prentice_single_block_is_kruskal_wallis() {
        let a = [1.0, 3.0, 3.0, 7.0];
        let b = [2.0, 3.0, 8.0];
        let c = [0.5, 9.0];
        let mut obs = Vec::new();
        for (label, vals) in [("a", &a[..]), ("b", &b[..]), ("c", &c[..])] {
            for &v in vals {
                obs.push(BlockedObservation::new("only", label, v));
            }
        }
        let kw = kruskal_wallis(&[
            Sample::new("a", a.to_vec()),
            Sample::new("b", b.to_vec()),
            Sample::new("c", c.to_vec()),
        ])
        .unwrap();
        let p = prentice(&obs).unwrap();
        assert_abs_diff_eq!(p.statistic, kw.statistic, epsilon = 1e-9);
    }

    #[test]
    fn prentice_drops_single_group_blocks() {
        let mut obs = balanced(&[vec![1.0, 2.0], vec![2.0, 1.0], vec![1.0, 3.0]]);
        obs.push(BlockedObservation::new("lonely", "g0", 4.0));
        obs.push(BlockedObservation::new("lonely", "g0", 5.0));
        let r = prentice(&obs).unwrap();
        assert!(r.flags.contains(&TestFlag::DroppedBlocks(1)));
    }

    #[test]
    fn prentice_errors_and_degenerate() {
        assert!(matches!(
            prentice(&[BlockedObservation::new("b", "g", 1.0)]),
            Err(TestError::TooFewGroups { .. })
        ));
        assert!(matches!(
            prentice(&[
                BlockedObservation::new("b1", "g1", 1.0),
                BlockedObservation::new("b2", "g2", 1.0)
            ]),
            Err(TestError::NoUsableBlocks)
        ));
        let tied = balanced(&[vec![1.0, 1.0], vec![2.0, 2.0]]);
        let r = prentice(&tied).unwrap();
        assert!(r.is_degenerate());
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn prentice_is_order_invariant() {
        let mut obs = balanced(&[vec![1.0, 2.0, 0.5], vec![2.0, 1.0, 3.0], vec![1.0, 3.0, 3.0]]);
        obs.push(BlockedObservation::new("b0", "g1", 0.7));
        let forward = prentice(&obs).unwrap();
        obs.reverse();
        let backward = prentice(&obs).unwrap();
        assert_eq!(forward.statistic.to_bits(), backward.statistic.to_bits());
    }
}
