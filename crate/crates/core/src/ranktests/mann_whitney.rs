use super::distributions::normal_sf;
use super::kruskal::PooledRanks;
use super::ranks::tie_term;
use super::{check_samples, Method, Sample, TestError, TestFlag, TestResult};

/// Largest combined sample size that uses the exact null distribution.
pub const EXACT_MAX_N: usize = 20;

/// Two-sided Mann-Whitney-Wilcoxon rank-sum test.
///
/// The statistic is `U = R_x − n_x(n_x+1)/2`. Tie-free samples with
/// `n_x + n_y <= 20` get an exact p-value; everything else uses the normal
/// approximation with tie-corrected variance and a 0.5 continuity correction.
pub fn mann_whitney(x: &Sample, y: &Sample) -> Result<TestResult, TestError> {
    let groups = [x.clone(), y.clone()];
    check_samples(&groups, 2)?;
    let pooled = PooledRanks::new(&groups);
    let nx = pooled.sizes[0];
    let ny = pooled.sizes[1];
    let n = nx + ny;
    let rank_sum_x: f64 = pooled.ranks[0].iter().sum();
    let u = rank_sum_x - (nx * (nx + 1)) as f64 / 2.0;
    let ties = tie_term(&pooled.pooled_values);

    if n <= EXACT_MAX_N && ties == 0.0 {
        // U is an integer in this branch
        let u_int = u.round() as usize;
        let counts = u_distribution(nx, ny);
        let total: f64 = counts.iter().sum();
        let lower: f64 = counts[..=u_int].iter().sum::<f64>() / total;
        let upper: f64 = counts[u_int..].iter().sum::<f64>() / total;
        let p = (2.0 * lower.min(upper)).min(1.0);
        return Ok(TestResult {
            method: Method::MannWhitney,
            statistic: u,
            df: None,
            p_value: p,
            effect_size: None,
            flags: vec![TestFlag::Exact],
        });
    }

    let nxf = nx as f64;
    let nyf = ny as f64;
    let nf = n as f64;
    let sigma = (nxf * nyf / 12.0 * ((nf + 1.0) - ties / (nf * (nf - 1.0)))).sqrt();
    if sigma.is_nan() || sigma <= 0.0 {
        let mut r = TestResult::degenerate(Method::MannWhitney, None);
        r.statistic = u;
        return Ok(r);
    }
    let centred = u - nxf * nyf / 2.0;
    // continuity correction toward zero; none when U sits exactly at its mean
    let correction = if centred > 0.0 { 0.5 } else if centred < 0.0 { -0.5 } else { 0.0 };
    let z = (centred - correction) / sigma;
    let p = (2.0 * normal_sf(z.abs())).min(1.0);
    Ok(TestResult {
        method: Method::MannWhitney,
        statistic: u,
        df: None,
        p_value: p,
        effect_size: None,
        flags: Vec::new(),
    })
}

/// Frequencies of `U = 0..=nx·ny` over all `C(nx+ny, nx)` rank assignments.
fn u_distribution(nx: usize, ny: usize) -> Vec<f64> {
    // f[m][k][u]: ways with m x-values and k y-values giving U = u.
    // Recurrence on the largest observation: it is either an x (adds k to U)
    // or a y (adds nothing).
    let max_u = nx * ny;
    let mut prev: Vec<Vec<f64>> = vec![vec![0.0; max_u + 1]; ny + 1];
    for row in prev.iter_mut() {
        row[0] = 1.0;
    }
    for m in 1..=nx {
        let mut cur: Vec<Vec<f64>> = vec![vec![0.0; max_u + 1]; ny + 1];
        cur[0][0] = 1.0;
        for k in 1..=ny {
            for u in 0..=m * k {
                let with_x = if u >= k { prev[k][u - k] } else { 0.0 };
                let with_y = cur[k - 1][u];
                cur[k][u] = with_x + with_y;
            }
        }
        prev = cur;
    }
    prev.swap_remove(ny)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn exact_small_case() {
        let r = mann_whitney(&Sample::new("x", vec![1.0, 2.0]), &Sample::new("y", vec![3.0, 4.0]))
            .unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0 / 3.0);
        assert!(r.flags.contains(&TestFlag::Exact));
    }

    #[test]
    fn distribution_sums_to_binomial() {
        let d = u_distribution(4, 6);
        assert_eq!(d.iter().sum::<f64>(), 210.0);
        assert_eq!(d.len(), 25);
        // symmetric about nx·ny/2
        for u in 0..d.len() {
            assert_eq!(d[u], d[d.len() - 1 - u]);
        }
    }

    #[test]
    fn identical_samples() {
        let x = Sample::new("x", vec![1.0, 2.0, 3.0]);
        let r = mann_whitney(&x, &x).unwrap();
        assert_eq!(r.statistic, 4.5);
        assert_abs_diff_eq!(r.p_value, 1.0);
        let one = Sample::new("x", vec![5.0]);
        let r = mann_whitney(&one, &one).unwrap();
        assert_eq!(r.statistic, 0.5);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn normal_branch_matches_hand_computation() {
        // 12 + 12 > 20 so the normal approximation is used.
        let x: Vec<f64> = (0..12).map(|i| i as f64).collect();
        let y: Vec<f64> = (0..12).map(|i| i as f64 + 6.5).collect();
        let r = mann_whitney(&Sample::new("x", x), &Sample::new("y", y)).unwrap();
        // x ranks: 0..=5 → 1..=6, 6..=11 interleave with y 6.5.. → ranks 7,9,...,17
        let rx: f64 = (1..=6).sum::<i32>() as f64 + (0..6).map(|i| 7.0 + 2.0 * i as f64).sum::<f64>();
        let u = rx - 78.0;
        assert_eq!(r.statistic, u);
        let sigma = (144.0f64 / 12.0 * 25.0).sqrt();
        let z = (u - 72.0 + 0.5) / sigma;
        assert_abs_diff_eq!(r.p_value, 2.0 * normal_sf(z.abs()), epsilon = 1e-15);
        assert!(!r.flags.contains(&TestFlag::Exact));
    }

    #[test]
    fn all_tied_is_degenerate() {
        let r = mann_whitney(&Sample::new("x", vec![1.0; 3]), &Sample::new("y", vec![1.0; 4])).unwrap();
        assert!(r.is_degenerate());
        assert_eq!(r.p_value, 1.0);
    }
}
