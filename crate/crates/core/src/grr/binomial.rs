//! Band probabilities of binomial and Poisson neighbor counts.

/// `ln(sum(exp(terms)))` without overflow.
fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// `P(lo <= K <= hi)` for `K ~ Binomial(m, q)`.
///
/// The band is clamped to `[0, m]`; an empty band gives 0. Terms are built
/// in log space from `ln pmf(0) = m ln(1 - q)` with the ratio recurrence
/// `pmf(k+1) / pmf(k) = (m - k) / (k + 1) * q / (1 - q)`.
pub fn binomial_band(m: u64, q: f64, lo: i64, hi: i64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&q), "q = {q}");
    let lo = lo.max(0);
    let hi = hi.min(m as i64);
    if lo > hi {
        return 0.0;
    }
    let (lo, hi) = (lo as u64, hi as u64);
    if q <= 0.0 {
        return if lo == 0 { 1.0 } else { 0.0 };
    }
    if q >= 1.0 {
        return if hi == m { 1.0 } else { 0.0 };
    }
    if lo == 0 && hi == m {
        return 1.0;
    }
    // Sum whichever side of the band is shorter.
    if hi - lo > m / 2 {
        let below = if lo == 0 { 0.0 } else { binomial_band(m, q, 0, lo as i64 - 1) };
        let above = if hi == m { 0.0 } else { binomial_band(m, q, hi as i64 + 1, m as i64) };
        return (1.0 - below - above).clamp(0.0, 1.0);
    }
    let log_odds = q.ln() - (-q).ln_1p();
    let mut log_pmf = m as f64 * (-q).ln_1p();
    let mut terms = Vec::with_capacity((hi - lo + 1) as usize);
    for k in 0..=hi {
        if k >= lo {
            terms.push(log_pmf);
        }
        log_pmf += ((m - k) as f64).ln() - ((k + 1) as f64).ln() + log_odds;
    }
    log_sum_exp(&terms).exp().min(1.0)
}

/// `P(lo <= K <= hi)` for `K ~ Poisson(lambda)`.
pub fn poisson_band(lambda: f64, lo: i64, hi: i64) -> f64 {
    debug_assert!(lambda >= 0.0);
    let lo = lo.max(0);
    if lo > hi {
        return 0.0;
    }
    if lambda == 0.0 {
        return if lo == 0 { 1.0 } else { 0.0 };
    }
    let (lo, hi) = (lo as u64, hi as u64);
    let ln_lambda = lambda.ln();
    let mut log_pmf = -lambda;
    let mut terms = Vec::with_capacity((hi - lo + 1) as usize);
    for k in 0..=hi {
        if k >= lo {
            terms.push(log_pmf);
        }
        log_pmf += ln_lambda - ((k + 1) as f64).ln();
    }
    log_sum_exp(&terms).exp().min(1.0)
}
