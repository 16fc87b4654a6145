//! Small statistical helpers: Wilson intervals, empirical quantiles and the
//! two-sample Kolmogorov–Smirnov test.

use serde::{Deserialize, Serialize};

/// Two-sided 99% standard normal critical value, `Φ⁻¹(0.995)`.
pub const Z_99: f64 = 2.575_829_303_548_900_4;

/// Wilson score interval for `hits` successes out of `trials`.
pub fn wilson_interval(hits: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let m = trials as f64;
    let p = hits as f64 / m;
    let z2 = z * z;
    let denom = 1.0 + z2 / m;
    let center = (p + z2 / (2.0 * m)) / denom;
    let half = z / denom * (p * (1.0 - p) / m + z2 / (4.0 * m * m)).sqrt();
    let lo = (center - half).max(0.0).min(p);
    let hi = (center + half).min(1.0).max(p);
    (lo, hi)
}

/// Lower empirical quantile: the smallest order statistic `x` with
/// `F_m(x) >= level`. Level 0 gives the minimum, level 1 the maximum.
///
/// `sorted` must be nondecreasing and non-empty.
pub fn empirical_quantile(sorted: &[f64], level: f64) -> f64 {
    assert!(!sorted.is_empty(), "empirical_quantile of empty slice");
    let m = sorted.len();
    let rank = (level.clamp(0.0, 1.0) * m as f64).ceil() as usize;
    sorted[rank.clamp(1, m) - 1]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsTwoSample {
    /// `sup_t |F_a(t) - F_b(t)|`.
    pub statistic: f64,
    /// Asymptotic p-value from the Kolmogorov distribution.
    pub p_value: f64,
    /// Rejection threshold for the statistic at the requested level.
    pub critical: f64,
    pub rejected: bool,
}

/// Two-sample KS statistic of two samples (sorted internally).
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    assert!(
        !a.is_empty() && !b.is_empty(),
        "KS test needs non-empty samples"
    );
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let t = a[i].min(b[j]);
        while i < a.len() && a[i] <= t {
            i += 1;
        }
        while j < b.len() && b[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Survival function of the Kolmogorov distribution,
/// `P(K > x) = 2 Σ_{k>=1} (-1)^{k-1} exp(-2 k² x²)`.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 0.2 {
        // Series converges slowly here; the value is 1 to double precision.
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = (-2.0 * k * k * x * x).exp();
        sum += if k as u64 % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sample KS test at significance `alpha` using the asymptotic critical
/// value `sqrt(-ln(alpha/2)/2) * sqrt((m+n)/(m n))`.
pub fn ks_two_sample(a: &[f64], b: &[f64], alpha: f64) -> KsTwoSample {
    let statistic = ks_statistic(a, b);
    let (m, n) = (a.len() as f64, b.len() as f64);
    let scale = ((m + n) / (m * n)).sqrt();
    let critical = (-(alpha / 2.0).ln() / 2.0).sqrt() * scale;
    let en = (m * n / (m + n)).sqrt();
    let p_value = kolmogorov_sf((en + 0.12 + 0.11 / en) * statistic);
    KsTwoSample {
        statistic,
        p_value,
        critical,
        rejected: statistic > critical,
    }
}
