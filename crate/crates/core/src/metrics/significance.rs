//! Two-sided Mann-Whitney U test with Bonferroni correction.
//!
//! For small pooled samples the p-value is exact: pooled values receive
//! mid-ranks, and the null distribution of the rank sum of the first sample
//! is counted over all `C(n+m, n)` equally likely assignments. Ranks are
//! handled doubled so every count is an integer.

use crate::error::{Error, Result};
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

/// Largest pooled sample size evaluated exactly; larger samples use the
/// tie-corrected normal approximation.
pub const EXACT_LIMIT: usize = 40;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignificanceResult {
    /// `U` of the first sample: pairs where it is larger, plus half the ties.
    pub u: f64,
    pub p_value: f64,
    /// `alpha / n_comparisons`.
    pub corrected_alpha: f64,
    pub significant: bool,
    pub exact: bool,
}

/// Doubled mid-ranks (1-based) of `values`, plus the sizes of tie groups.
fn doubled_midranks(values: &[f64]) -> (Vec<u64>, Vec<u64>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0u64; values.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // positions i+1 ..= j+1, doubled midrank = first + last
        let r2 = (i + 1 + j + 1) as u64;
        for &k in &order[i..=j] {
            ranks[k] = r2;
        }
        ties.push((j - i + 1) as u64);
        i = j + 1;
    }
    (ranks, ties)
}

/// Exact two-sided p-value from doubled ranks: the share of size-`n`
/// subsets whose rank sum deviates from its mean at least as much as the
/// observed one.
fn exact_p(ranks2: &[u64], n: usize, observed2: u64) -> f64 {
    let total_sum: u64 = ranks2.iter().sum();
    // dp[k][s]: number of k-subsets of the items seen so far with doubled rank sum s
    let mut dp = vec![vec![0u64; total_sum as usize + 1]; n + 1];
    dp[0][0] = 1;
    for &r in ranks2 {
        for k in (1..=n).rev() {
            for s in (r as usize..=total_sum as usize).rev() {
                let add = dp[k - 1][s - r as usize];
                if add != 0 {
                    dp[k][s] += add;
                }
            }
        }
    }
    let pooled = ranks2.len() as i128;
    // mean of the doubled rank sum is n (N + 1); compare doubled deviations
    let centre = n as i128 * (pooled + 1);
    let observed_dev = (observed2 as i128 - centre).abs();
    let mut extreme = 0u64;
    let mut all = 0u64;
    for (s, &c) in dp[n].iter().enumerate() {
        all += c;
        if (s as i128 - centre).abs() >= observed_dev {
            extreme += c;
        }
    }
    extreme as f64 / all as f64
}

/// Tie-corrected normal approximation with continuity correction.
pub fn normal_approximation_p(a: &[f64], b: &[f64]) -> f64 {
    let (n, m) = (a.len() as f64, b.len() as f64);
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks2, ties) = doubled_midranks(&pooled);
    let r_a: f64 = ranks2[..a.len()].iter().sum::<u64>() as f64 / 2.0;
    let u = r_a - n * (n + 1.0) / 2.0;
    let total = n + m;
    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / (total * (total - 1.0));
    let variance = n * m / 12.0 * ((total + 1.0) - tie_term);
    if variance <= 0.0 {
        return 1.0;
    }
    let z = ((u - n * m / 2.0).abs() - 0.5).max(0.0) / variance.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    (2.0 * (1.0 - normal.cdf(z))).min(1.0)
}

/// Compares two sets of run scores. The difference is significant when the
/// two-sided p-value is below `alpha / n_comparisons`.
pub fn mann_whitney_u(a: &[f64], b: &[f64], alpha: f64, n_comparisons: usize) -> Result<SignificanceResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Misaligned("both samples need at least one score".into()));
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(Error::Misaligned("scores must not be NaN".into()));
    }
    if n_comparisons == 0 {
        return Err(Error::Misaligned("number of comparisons must be at least 1".into()));
    }
    let n = a.len();
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks2, _) = doubled_midranks(&pooled);
    let rank_sum2: u64 = ranks2[..n].iter().sum();
    // 2U = 2R - n(n+1)
    let u = (rank_sum2 as f64 - (n * (n + 1)) as f64) / 2.0;

    let exact = pooled.len() <= EXACT_LIMIT;
    let p_value = if exact {
        exact_p(&ranks2, n, rank_sum2)
    } else {
        normal_approximation_p(a, b)
    };
    let corrected_alpha = alpha / n_comparisons as f64;
    Ok(SignificanceResult {
        u,
        p_value,
        corrected_alpha,
        significant: p_value < corrected_alpha,
        exact,
    })
}
