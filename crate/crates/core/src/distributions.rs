//! Distribution families with CDF, quantile, density and tail classification.
//!
//! All families are continuous. The quantile function is defined on the open
//! interval (0, 1) only; 0 and 1 are rejected rather than mapped to ±∞.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quadrature;

mod normal;

/// Family and parameters of a supported distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Uniform01,
    Normal {
        mean: f64,
        sd: f64,
    },
    Exponential {
        rate: f64,
    },
    Laplace {
        loc: f64,
        scale: f64,
    },
    /// Density proportional to `exp(-|x|^p)`, `p >= 1`.
    GenExp {
        p: f64,
    },
}

/// Tail regime of a distribution.
///
/// `SuperExponential`: `(1 - F(t + e)) / (1 - F(t)) -> 0` for every `e > 0`,
/// and symmetrically in the left tail. `ExponentialTail`: the same ratios
/// only stay bounded away from 1. The first implies the second.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailClass {
    SuperExponential,
    ExponentialTail,
}

impl TailClass {
    /// Whether the exponential-decay conditions (bounded tail ratios) hold.
    pub fn has_exponential_decay(self) -> bool {
        true
    }

    /// Whether the super-exponential conditions (vanishing tail ratios) hold.
    pub fn is_super_exponential(self) -> bool {
        matches!(self, TailClass::SuperExponential)
    }
}

// Upper integration limit offset: the integrand exp(-(t^p - a^p)) is below
// e^-45 past (a^p + 45)^(1/p).
const GENEXP_TAIL_SPAN: f64 = 45.0;
const GENEXP_ASYMPTOTIC_BELOW: f64 = 1e-14;

/// An immutable distribution instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "Family", try_from = "Family")]
pub struct DistributionModel {
    family: Family,
    // ln of the GenExp normalizer, computed once by quadrature.
    log_norm: f64,
}

impl From<DistributionModel> for Family {
    fn from(m: DistributionModel) -> Family {
        m.family
    }
}

impl TryFrom<Family> for DistributionModel {
    type Error = Error;

    fn try_from(f: Family) -> Result<Self> {
        DistributionModel::new(f)
    }
}

impl fmt::Display for DistributionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Uniform01 => write!(f, "uniform(0,1)"),
            Family::Normal { mean, sd } => write!(f, "normal({mean},{sd})"),
            Family::Exponential { rate } => write!(f, "exponential({rate})"),
            Family::Laplace { loc, scale } => write!(f, "laplace({loc},{scale})"),
            Family::GenExp { p } => write!(f, "genexp({p})"),
        }
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(domain(format!(
            "{name} must be finite and positive, got {v}"
        )))
    }
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("{name} must be finite, got {v}")))
    }
}

impl DistributionModel {
    pub fn new(family: Family) -> Result<Self> {
        let mut log_norm = 0.0;
        match family {
            Family::Uniform01 => {}
            Family::Normal { mean, sd } => {
                check_finite("mean", mean)?;
                check_positive("sd", sd)?;
            }
            Family::Exponential { rate } => check_positive("rate", rate)?,
            Family::Laplace { loc, scale } => {
                check_finite("loc", loc)?;
                check_positive("scale", scale)?;
            }
            Family::GenExp { p } => {
                if !(p.is_finite() && p >= 1.0) {
                    return Err(domain(format!("genexp exponent must be >= 1, got {p}")));
                }
                log_norm = genexp_log_normalizer(p)?;
            }
        }
        Ok(DistributionModel { family, log_norm })
    }

    pub fn uniform() -> Self {
        DistributionModel {
            family: Family::Uniform01,
            log_norm: 0.0,
        }
    }

    pub fn standard_normal() -> Self {
        DistributionModel {
            family: Family::Normal { mean: 0.0, sd: 1.0 },
            log_norm: 0.0,
        }
    }

    pub fn normal(mean: f64, sd: f64) -> Result<Self> {
        Self::new(Family::Normal { mean, sd })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        Self::new(Family::Exponential { rate })
    }

    pub fn laplace(loc: f64, scale: f64) -> Result<Self> {
        Self::new(Family::Laplace { loc, scale })
    }

    pub fn genexp(p: f64) -> Result<Self> {
        Self::new(Family::GenExp { p })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Largest `p` for which the law is p-log-concave: 2 for the normal, 1 for
    /// the exponential and Laplace, `p` for GenExp, and unbounded for the
    /// uniform (its density is `exp(-g^p)` with `g` zero on the support).
    pub fn p_index(&self) -> f64 {
        match self.family {
            Family::Uniform01 => f64::INFINITY,
            Family::Normal { .. } => 2.0,
            Family::Exponential { .. } | Family::Laplace { .. } => 1.0,
            Family::GenExp { p } => p,
        }
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(domain(format!("cdf argument must be finite, got {x}")));
        }
        Ok(self.cdf_finite(x))
    }

    fn cdf_finite(&self, x: f64) -> f64 {
        match self.family {
            Family::Uniform01 => x.clamp(0.0, 1.0),
            Family::Normal { mean, sd } => normal::cdf((x - mean) / sd),
            Family::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            Family::Laplace { loc, scale } => {
                let z = (x - loc) / scale;
                if z < 0.0 {
                    0.5 * z.exp()
                } else {
                    1.0 - 0.5 * (-z).exp()
                }
            }
            Family::GenExp { p } => {
                if x < 0.0 {
                    self.genexp_log_sf(p, -x).exp()
                } else {
                    1.0 - self.genexp_log_sf(p, x).exp()
                }
            }
        }
    }

    /// `ln F(x)`, accurate deep in the left tail; `-inf` outside the support.
    pub fn log_cdf(&self, x: f64) -> f64 {
        match self.family {
            Family::Uniform01 => {
                if x <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    x.min(1.0).ln()
                }
            }
            Family::Normal { mean, sd } => normal::log_cdf((x - mean) / sd),
            Family::Exponential { rate } => {
                if x <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    (-(-rate * x).exp_m1()).ln()
                }
            }
            Family::Laplace { loc, scale } => {
                let z = (x - loc) / scale;
                if z < 0.0 {
                    z - std::f64::consts::LN_2
                } else {
                    (-0.5 * (-z).exp()).ln_1p()
                }
            }
            Family::GenExp { p } => {
                if x < 0.0 {
                    self.genexp_log_sf(p, -x)
                } else {
                    (-self.genexp_log_sf(p, x).exp()).ln_1p()
                }
            }
        }
    }

    /// `ln (1 - F(x))`, accurate deep in the right tail.
    pub fn log_sf(&self, x: f64) -> f64 {
        match self.family {
            Family::Uniform01 => {
                if x >= 1.0 {
                    f64::NEG_INFINITY
                } else {
                    (-x.max(0.0)).ln_1p()
                }
            }
            Family::Normal { mean, sd } => normal::log_cdf(-(x - mean) / sd),
            Family::Exponential { rate } => -rate * x.max(0.0),
            Family::Laplace { loc, scale } => {
                let z = (x - loc) / scale;
                if z > 0.0 {
                    -z - std::f64::consts::LN_2
                } else {
                    (-0.5 * z.exp()).ln_1p()
                }
            }
            Family::GenExp { p } => {
                if x > 0.0 {
                    self.genexp_log_sf(p, x)
                } else {
                    (-self.genexp_log_sf(p, -x).exp()).ln_1p()
                }
            }
        }
    }

    /// Inverse CDF on (0, 1).
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(domain(format!(
                "quantile argument must lie in the open interval (0,1), got {u}"
            )));
        }
        Ok(self.quantile_interior(u))
    }

    /// Quantile for `u` already known to lie in (0, 1).
    pub(crate) fn quantile_interior(&self, u: f64) -> f64 {
        debug_assert!(u > 0.0 && u < 1.0);
        match self.family {
            Family::Uniform01 => u,
            Family::Normal { mean, sd } => mean + sd * normal::quantile(u),
            Family::Exponential { rate } => -(-u).ln_1p() / rate,
            Family::Laplace { loc, scale } => {
                if u < 0.5 {
                    loc + scale * (2.0 * u).ln()
                } else {
                    loc - scale * (2.0 * (1.0 - u)).ln()
                }
            }
            Family::GenExp { p } => {
                if u == 0.5 {
                    0.0
                } else if u < 0.5 {
                    -self.genexp_tail_inverse(p, u)
                } else {
                    self.genexp_tail_inverse(p, 1.0 - u)
                }
            }
        }
    }

    /// Natural log of the density; `-inf` outside the support.
    pub fn log_density(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(domain(format!(
                "log_density argument must be finite, got {x}"
            )));
        }
        Ok(self.log_density_finite(x))
    }

    pub(crate) fn log_density_finite(&self, x: f64) -> f64 {
        match self.family {
            Family::Uniform01 => {
                if (0.0..=1.0).contains(&x) {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
            Family::Normal { mean, sd } => normal::log_pdf((x - mean) / sd) - sd.ln(),
            Family::Exponential { rate } => {
                if x < 0.0 {
                    f64::NEG_INFINITY
                } else {
                    rate.ln() - rate * x
                }
            }
            Family::Laplace { loc, scale } => -(2.0 * scale).ln() - (x - loc).abs() / scale,
            Family::GenExp { p } => self.log_norm - x.abs().powf(p),
        }
    }

    /// Analytically known tail regime of the family.
    pub fn classify_tail(&self) -> TailClass {
        match self.family {
            // Bounded support: both tail ratios vanish identically.
            Family::Uniform01 => TailClass::SuperExponential,
            Family::Normal { .. } => TailClass::SuperExponential,
            Family::Exponential { .. } | Family::Laplace { .. } => TailClass::ExponentialTail,
            Family::GenExp { p } => {
                if p > 1.0 {
                    TailClass::SuperExponential
                } else {
                    TailClass::ExponentialTail
                }
            }
        }
    }

    /// `(1 - F(t + eps)) / (1 - F(t))`, or `None` once the right tail is
    /// exhausted (`F(t) = 1`).
    pub fn right_tail_ratio(&self, t: f64, eps: f64) -> Option<f64> {
        let base = self.log_sf(t);
        if base == f64::NEG_INFINITY {
            return None;
        }
        Some((self.log_sf(t + eps) - base).exp())
    }

    /// `F(t) / F(t + eps)`, or `None` when `F(t) = 0`.
    pub fn left_tail_ratio(&self, t: f64, eps: f64) -> Option<f64> {
        let base = self.log_cdf(t + eps);
        let low = self.log_cdf(t);
        if low == f64::NEG_INFINITY {
            return None;
        }
        Some((low - base).exp())
    }

    // ln ∫_a^∞ c exp(-t^p) dt for a >= 0, with the factor exp(-a^p) pulled out
    // so the integrand is O(1) however deep the tail.
    fn genexp_log_sf(&self, p: f64, a: f64) -> f64 {
        let ap = a.powf(p);
        let upper = (ap + GENEXP_TAIL_SPAN).powf(1.0 / p);
        let r = quadrature::integrate(|t| (-(t.powf(p) - ap)).exp(), a, upper, 0.0, 1e-14, 400);
        self.log_norm - ap + r.value.ln()
    }

    // Solve S(t) = v for t >= 0, v in (0, 1/2).
    fn genexp_tail_inverse(&self, p: f64, v: f64) -> f64 {
        let start = genexp_asymptotic_inverse(self.log_norm, p, v);
        if v < GENEXP_ASYMPTOTIC_BELOW {
            return start;
        }
        let target = v.ln();
        let h = |t: f64| self.genexp_log_sf(p, t) - target;
        // h is decreasing, h(0) = ln(1/2) - ln v > 0.
        let mut lo = 0.0;
        let mut hi = start.max(1.0);
        while h(hi) > 0.0 {
            lo = hi;
            hi *= 2.0;
        }
        let mut t = start.clamp(lo, hi);
        for _ in 0..200 {
            let log_sf = self.genexp_log_sf(p, t);
            let value = log_sf - target;
            if value == 0.0 {
                return t;
            }
            if value > 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            // d/dt ln S(t) = -f(t) / S(t)
            let slope = -(self.log_norm - t.powf(p) - log_sf).exp();
            let mut next = t - value / slope;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - t).abs() <= 4.0 * f64::EPSILON * t.max(1e-3) || hi - lo <= f64::EPSILON * hi
            {
                return next;
            }
            t = next;
        }
        t
    }
}

// Leading-order tail inversion: S(t) ≈ (c/p) t^(1-p) exp(-t^p).
fn genexp_asymptotic_inverse(log_norm: f64, p: f64, v: f64) -> f64 {
    let rhs = log_norm - p.ln() - v.ln();
    if rhs <= 0.0 {
        return 0.0;
    }
    let mut t = rhs.powf(1.0 / p);
    if p == 1.0 {
        return t;
    }
    for _ in 0..50 {
        let g = t.powf(p) + (p - 1.0) * t.ln() - rhs;
        let dg = p * t.powf(p - 1.0) + (p - 1.0) / t;
        let next = (t - g / dg).max(0.5 * t);
        if (next - t).abs() <= 1e-15 * t {
            return next;
        }
        t = next;
    }
    t
}

// ln(p / (2 ∫_0^∞ exp(-t^p) dt)), the integral by quadrature.
fn genexp_log_normalizer(p: f64) -> Result<f64> {
    let upper = GENEXP_TAIL_SPAN.powf(1.0 / p);
    // Split at 1, where the integrand bends sharply for large p.
    let head = quadrature::integrate(|t| (-t.powf(p)).exp(), 0.0, 1.0, 0.0, 1e-15, 400);
    let tail = quadrature::integrate(|t| (-t.powf(p)).exp(), 1.0, upper.max(1.0), 0.0, 1e-15, 400);
    let half_mass = head.value + tail.value;
    if !(head.converged && tail.converged && half_mass.is_finite() && half_mass > 0.0) {
        return Err(Error::Numerical(format!(
            "genexp normalizer quadrature failed for p = {p}"
        )));
    }
    Ok(-(2.0 * half_mass).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn all_models() -> Vec<DistributionModel> {
        vec![
            DistributionModel::uniform(),
            DistributionModel::standard_normal(),
            DistributionModel::normal(1.5, 2.0).unwrap(),
            DistributionModel::exponential(1.0).unwrap(),
            DistributionModel::exponential(3.0).unwrap(),
            DistributionModel::laplace(0.0, 1.0).unwrap(),
            DistributionModel::laplace(-1.0, 0.5).unwrap(),
            DistributionModel::genexp(1.0).unwrap(),
            DistributionModel::genexp(1.5).unwrap(),
            DistributionModel::genexp(2.0).unwrap(),
            DistributionModel::genexp(4.0).unwrap(),
        ]
    }

    #[test]
    fn cdf_examples() {
        let n = DistributionModel::standard_normal();
        assert_eq!(n.cdf(0.0).unwrap(), 0.5);
        let e = DistributionModel::exponential(1.0).unwrap();
        assert_abs_diff_eq!(e.cdf(std::f64::consts::LN_2).unwrap(), 0.5, epsilon = 1e-16);
    }

    #[test]
    fn normal_cdf_against_simpson_oracle() {
        // 0.5 + ∫_0^x φ by composite Simpson, 20000 panels.
        let x = 1.959964;
        let m = 20_000;
        let h = x / m as f64;
        let phi = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mut s = phi(0.0) + phi(x);
        for k in 1..m {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            s += w * phi(k as f64 * h);
        }
        let oracle = 0.5 + s * h / 3.0;
        let got = DistributionModel::standard_normal().cdf(x).unwrap();
        assert_abs_diff_eq!(got, oracle, epsilon = 1e-12);
        assert_abs_diff_eq!(got, 0.975, epsilon = 1e-6);
    }

    #[test]
    fn cdf_rejects_non_finite() {
        let n = DistributionModel::standard_normal();
        assert!(matches!(n.cdf(f64::NAN), Err(Error::Domain(_))));
        assert!(matches!(n.cdf(f64::INFINITY), Err(Error::Domain(_))));
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(DistributionModel::uniform().quantile(0.3).unwrap(), 0.3);
        assert_eq!(
            DistributionModel::standard_normal().quantile(0.5).unwrap(),
            0.0
        );
        let e = DistributionModel::exponential(1.0).unwrap();
        let u = -(-1.0f64).exp_m1();
        assert_abs_diff_eq!(e.quantile(u).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn quantile_rejects_endpoints() {
        for m in all_models() {
            for u in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
                assert!(matches!(m.quantile(u), Err(Error::Domain(_))), "{m} {u}");
            }
        }
    }

    #[test]
    fn normal_quantile_reference_values() {
        let n = DistributionModel::standard_normal();
        // Values of the probit from high-precision tables.
        assert_abs_diff_eq!(
            n.quantile(0.975).unwrap(),
            1.959_963_984_540_054,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            n.quantile(0.75).unwrap(),
            0.674_489_750_196_081_7,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            n.quantile(1e-10).unwrap(),
            -6.361_340_902_404_056,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            n.quantile(1e-300).unwrap(),
            -37.047_096_299_361_2,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            n.quantile(1.0 - 1e-16).unwrap(),
            8.209_536_151_601_387,
            epsilon = 1e-11
        );
    }

    #[test]
    fn log_density_examples() {
        let l = DistributionModel::laplace(0.0, 1.0).unwrap();
        assert_abs_diff_eq!(l.log_density(0.0).unwrap(), 0.5f64.ln(), epsilon = 1e-15);
        let g = DistributionModel::genexp(2.0).unwrap();
        let d = g.log_density(0.0).unwrap() - g.log_density(1.0).unwrap();
        assert_abs_diff_eq!(d, 1.0, epsilon = 1e-15);
        let n = DistributionModel::standard_normal();
        for x in [0.1, 1.0, 3.7, 12.0] {
            assert_eq!(n.log_density(x).unwrap(), n.log_density(-x).unwrap());
        }
    }

    #[test]
    fn genexp_normalizer_matches_gamma_function() {
        for p in [1.0, 1.5, 2.0, 3.0, 8.0] {
            let m = DistributionModel::genexp(p).unwrap();
            let exact = (p / (2.0 * libm::tgamma(1.0 / p))).ln();
            assert_abs_diff_eq!(m.log_norm, exact, epsilon = 1e-13);
        }
    }

    #[test]
    fn densities_integrate_to_one() {
        // Composite Simpson over a range holding all but negligible mass.
        for m in all_models() {
            let (a, b) = match m.family() {
                Family::Uniform01 => (0.0, 1.0),
                Family::Exponential { rate } => (0.0, 60.0 / rate),
                _ => (-60.0, 60.0),
            };
            let panels = 400_000;
            let h = (b - a) / panels as f64;
            let f = |x: f64| m.log_density(x).unwrap().exp();
            let mut s = f(a) + f(b);
            for k in 1..panels {
                let w = if k % 2 == 1 { 4.0 } else { 2.0 };
                s += w * f(a + k as f64 * h);
            }
            assert_abs_diff_eq!(s * h / 3.0, 1.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn genexp_one_is_standard_laplace() {
        let g = DistributionModel::genexp(1.0).unwrap();
        let l = DistributionModel::laplace(0.0, 1.0).unwrap();
        for x in [-30.0, -5.0, -0.3, 0.0, 0.7, 4.0, 25.0] {
            assert_abs_diff_eq!(g.cdf(x).unwrap(), l.cdf(x).unwrap(), epsilon = 1e-14);
            let rel = (g.log_cdf(x) - l.log_cdf(x)).abs();
            assert!(rel < 1e-12, "x={x} {rel}");
        }
        for u in [1e-13, 1e-6, 0.2, 0.5, 0.8, 1.0 - 1e-9] {
            let diff = (g.quantile(u).unwrap() - l.quantile(u).unwrap()).abs();
            assert!(diff < 1e-10, "u={u} diff={diff}");
        }
    }

    #[test]
    fn genexp_tail_matches_incomplete_gamma_oracle() {
        // S(a) = Q(1/p, a^p) / 2 for the regularized upper incomplete gamma Q.
        for p in [1.5, 2.0, 3.0] {
            let m = DistributionModel::genexp(p).unwrap();
            for a in [0.05f64, 0.4, 1.0, 2.5, 4.0] {
                let oracle = 0.5 * statrs::function::gamma::gamma_ur(1.0 / p, a.powf(p));
                let got = m.log_sf(a).exp();
                assert!(
                    (got - oracle).abs() <= 1e-12 * oracle.max(1e-300) + 1e-15,
                    "p={p} a={a} got={got} oracle={oracle}"
                );
            }
        }
    }

    #[test]
    fn genexp_asymptotic_switch_keeps_order() {
        let m = DistributionModel::genexp(2.0).unwrap();
        let above = m.quantile(1.01e-14).unwrap();
        let below = m.quantile(0.99e-14).unwrap();
        assert!(below < above);
        let far = m.quantile(1e-200).unwrap();
        assert!(far < below && far.is_finite());
        // Leading asymptotic term is within a few percent of the exact tail.
        let exact = m.quantile(2e-14).unwrap();
        let approx = -genexp_asymptotic_inverse(m.log_norm, 2.0, 2e-14);
        assert!((exact - approx).abs() / exact.abs() < 1e-3);
    }

    #[test]
    fn round_trip_cdf_quantile() {
        for m in all_models() {
            let mut us = Vec::new();
            for k in 0..=600 {
                let u = 10f64.powf(-12.0 + 11.7 * k as f64 / 600.0);
                us.push(u);
                us.push(1.0 - u);
            }
            us.push(0.5);
            for u in us {
                let x = m.quantile(u).unwrap();
                let back = m.cdf(x).unwrap();
                assert!((back - u).abs() <= 1e-10, "{m}: u={u} x={x} back={back}");
            }
        }
    }

    #[test]
    fn round_trip_quantile_cdf_central() {
        // Central 99.9999% range.
        for m in all_models() {
            let lo = m.quantile(5e-7).unwrap();
            let hi = m.quantile(1.0 - 5e-7).unwrap();
            for k in 0..=400 {
                let x = lo + (hi - lo) * k as f64 / 400.0;
                let u = m.cdf(x).unwrap();
                if u <= 0.0 || u >= 1.0 {
                    continue;
                }
                let back = m.quantile(u).unwrap();
                assert!((back - x).abs() <= 1e-8, "{m}: x={x} back={back}");
            }
        }
    }

    #[test]
    fn cdf_monotone_with_limits() {
        for m in all_models() {
            let mut prev = 0.0;
            for k in 0..=2000 {
                let x = -50.0 + 0.05 * k as f64;
                let c = m.cdf(x).unwrap();
                assert!((0.0..=1.0).contains(&c));
                assert!(c >= prev, "{m} at {x}");
                prev = c;
            }
            assert!(m.cdf(-1e6).unwrap() < 1e-300);
            assert_eq!(m.cdf(1e6).unwrap(), 1.0);
        }
    }

    #[test]
    fn tail_classification_table() {
        assert_eq!(
            DistributionModel::standard_normal().classify_tail(),
            TailClass::SuperExponential
        );
        assert_eq!(
            DistributionModel::exponential(1.0).unwrap().classify_tail(),
            TailClass::ExponentialTail
        );
        assert_eq!(
            DistributionModel::genexp(2.0).unwrap().classify_tail(),
            TailClass::SuperExponential
        );
        assert_eq!(
            DistributionModel::laplace(0.0, 1.0)
                .unwrap()
                .classify_tail(),
            TailClass::ExponentialTail
        );
        for m in all_models() {
            assert!(m.classify_tail().has_exponential_decay());
        }
    }

    #[test]
    fn tail_classification_numeric_guard() {
        for m in all_models() {
            let class = m.classify_tail();
            let ratios: Vec<f64> = [5.0, 10.0, 20.0, 40.0]
                .iter()
                .filter_map(|&t| m.right_tail_ratio(t, 1.0))
                .collect();
            let left: Vec<f64> = [-5.0, -10.0, -20.0, -40.0]
                .iter()
                .filter_map(|&t| m.left_tail_ratio(t, 1.0))
                .collect();
            for r in ratios.iter().chain(left.iter()) {
                assert!(*r < 1.0, "{m}: ratio {r}");
            }
            if class.is_super_exponential() {
                for w in ratios.windows(2).chain(left.windows(2)) {
                    assert!(w[1] < w[0] || w[1] == 0.0, "{m}: {w:?}");
                }
                if let Some(last) = ratios.last() {
                    assert!(*last < 1e-3, "{m}: {last}");
                }
            }
        }
        let e = DistributionModel::exponential(1.0).unwrap();
        for t in [5.0, 10.0, 20.0, 40.0] {
            assert_abs_diff_eq!(
                e.right_tail_ratio(t, 1.0).unwrap(),
                (-1.0f64).exp(),
                epsilon = 1e-15
            );
        }
        let g = DistributionModel::genexp(2.0).unwrap();
        let r = g.right_tail_ratio(20.0, 1.0).unwrap();
        // exp(-(21² - 20²)) up to the slowly varying prefactor.
        assert!(r < (-40.0f64).exp());
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(DistributionModel::normal(0.0, 0.0).is_err());
        assert!(DistributionModel::normal(f64::NAN, 1.0).is_err());
        assert!(DistributionModel::exponential(-1.0).is_err());
        assert!(DistributionModel::laplace(0.0, f64::INFINITY).is_err());
        assert!(DistributionModel::genexp(0.5).is_err());
    }

    #[test]
    fn serde_round_trip_through_family() {
        let m = DistributionModel::genexp(2.0).unwrap();
        let fam: Family = m.into();
        let back = DistributionModel::try_from(fam).unwrap();
        assert_eq!(back, m);
    }
}
