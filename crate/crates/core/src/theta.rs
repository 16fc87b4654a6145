//! The θ_p metric on (0, 1) and grid estimates of the moduli of continuity
//! of the quantile function.
//!
//! For `0 < x <= y < 1` and `a = 1 - 1/p`,
//!
//! ```text
//! θ_p(x, y) = max{ ln(y/x) / (ln 1/x)^a , ln((1-x)/(1-y)) / (ln 1/(1-y))^a }
//! ```
//!
//! Every calibration here returns a supremum over a finite grid. Grids are
//! built so that [`GridSpec::refined`] yields a superset of the original
//! points, which makes the returned constants nondecreasing under refinement.

use serde::{Deserialize, Serialize};

use crate::distributions::DistributionModel;
use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaParams {
    p: f64,
}

impl ThetaParams {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_finite() && p >= 1.0 {
            Ok(ThetaParams { p })
        } else {
            Err(domain(format!(
                "theta exponent p must satisfy 1 <= p < inf, got {p}"
            )))
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

fn check_open_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(domain(format!("{name} must lie in (0,1), got {v}")))
    }
}

/// θ_p distance; arguments may come in either order.
pub fn theta_distance(params: &ThetaParams, x: f64, y: f64) -> Result<f64> {
    check_open_unit("x", x)?;
    check_open_unit("y", y)?;
    Ok(theta_raw(params.p, x, y))
}

pub(crate) fn theta_raw(p: f64, x: f64, y: f64) -> f64 {
    let (x, y) = if x <= y { (x, y) } else { (y, x) };
    if x == y {
        return 0.0;
    }
    let a = 1.0 - 1.0 / p;
    let gap = y - x;
    let left = (gap / x).ln_1p() / (-x.ln()).powf(a);
    let right = (gap / (1.0 - y)).ln_1p() / (-(-y).ln_1p()).powf(a);
    left.max(right)
}

/// Grid of probabilities: log-spaced tails down to `floor`, mirrored in the
/// upper tail, plus uniformly spaced central points between the tail cuts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub tail_points: usize,
    pub central_points: usize,
    pub floor: f64,
    pub tail_cut: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            tail_points: 64,
            central_points: 64,
            floor: 1e-12,
            tail_cut: 0.1,
        }
    }
}

fn linspace(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    match k {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (k - 1) as f64;
            (0..k)
                .map(|i| if i == k - 1 { hi } else { lo + i as f64 * step })
                .collect()
        }
    }
}

fn refine_count(k: usize) -> usize {
    if k <= 1 {
        k
    } else {
        2 * k - 1
    }
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

impl GridSpec {
    /// Tail points only: the regime where the quantile-gap inequality is
    /// informative.
    pub fn tails_only() -> Self {
        GridSpec {
            central_points: 0,
            ..GridSpec::default()
        }
    }

    /// Roughly twice the resolution; the new point set contains the old one.
    pub fn refined(&self) -> Self {
        GridSpec {
            tail_points: refine_count(self.tail_points),
            central_points: refine_count(self.central_points),
            ..*self
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.floor > 0.0 && self.floor < self.tail_cut && self.tail_cut <= 0.5) {
            return Err(domain(format!(
                "grid needs 0 < floor < tail_cut <= 0.5, got floor={} tail_cut={}",
                self.floor, self.tail_cut
            )));
        }
        if self.tail_points + self.central_points < 2 {
            return Err(domain("grid needs at least two points"));
        }
        Ok(())
    }

    pub fn points(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let mut pts = Vec::new();
        for l in linspace(self.floor.ln(), self.tail_cut.ln(), self.tail_points) {
            let u = l.exp();
            pts.push(u);
            pts.push(1.0 - u);
        }
        pts.extend(linspace(
            self.tail_cut,
            1.0 - self.tail_cut,
            self.central_points,
        ));
        Ok(sorted_unique(pts))
    }

    pub fn describe(&self) -> String {
        format!(
            "{} log-spaced points per tail on [{:e}, {}], {} uniform central points",
            self.tail_points, self.floor, self.tail_cut, self.central_points
        )
    }
}

/// Points in `[eps, 1 - eps]` clustered at both ends, so that secant slopes
/// next to the endpoints approach the endpoint derivative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CentralGrid {
    pub edge_points: usize,
    pub central_points: usize,
    /// Smallest offset from an endpoint, relative to `eps`.
    pub min_offset: f64,
}

impl Default for CentralGrid {
    fn default() -> Self {
        CentralGrid {
            edge_points: 64,
            central_points: 64,
            min_offset: 1e-4,
        }
    }
}

impl CentralGrid {
    pub fn refined(&self) -> Self {
        CentralGrid {
            edge_points: refine_count(self.edge_points),
            central_points: refine_count(self.central_points),
            ..*self
        }
    }

    pub fn points(&self, eps: f64) -> Result<Vec<f64>> {
        if !(eps > 0.0 && eps < 0.5) {
            return Err(domain(format!("epsilon must lie in (0, 1/2), got {eps}")));
        }
        if !(self.min_offset > 0.0 && self.min_offset * eps < 0.5 - eps) {
            return Err(domain("central grid min_offset out of range"));
        }
        let mut pts = vec![eps, 1.0 - eps];
        for l in linspace(
            (self.min_offset * eps).ln(),
            (0.5 - eps).ln(),
            self.edge_points,
        ) {
            let d = l.exp();
            pts.push(eps + d);
            pts.push(1.0 - eps - d);
        }
        pts.extend(linspace(eps, 1.0 - eps, self.central_points));
        let pts: Vec<f64> = pts
            .into_iter()
            .filter(|&u| u >= eps && u <= 1.0 - eps)
            .collect();
        Ok(sorted_unique(pts))
    }

    pub fn describe(&self, eps: f64) -> String {
        format!(
            "[{eps}, {}]: {} log-spaced edge offsets from {:e}·eps, {} uniform points",
            1.0 - eps,
            self.edge_points,
            self.min_offset,
            self.central_points
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModulusKind {
    Lipschitz,
    UniformContinuityTable,
}

/// One row of a uniform-continuity table: every grid pair with
/// `θ_1(x, y) < log_t` has `|F⁻¹(x) - F⁻¹(y)| <= delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuityEntry {
    pub delta: f64,
    /// Supremum of admissible `ln T`; `inf` when no grid pair is farther
    /// apart than `delta`.
    pub log_t: f64,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusEstimate {
    pub constant: f64,
    pub grid: String,
    pub kind: ModulusKind,
    /// Pair attaining the supremum, for Lipschitz estimates.
    pub argmax: Option<(f64, f64)>,
    pub table: Vec<ContinuityEntry>,
}

fn quantiles(model: &DistributionModel, pts: &[f64]) -> Vec<f64> {
    pts.iter().map(|&u| model.quantile_interior(u)).collect()
}

fn require_p(model: &DistributionModel, p: f64) -> Result<()> {
    if p > model.p_index() {
        return Err(Error::Precondition(format!(
            "{model} is only {}-log-concave; bound with p = {p} does not apply",
            model.p_index()
        )));
    }
    Ok(())
}

/// Grid supremum of `|F⁻¹(x) - F⁻¹(y)| / θ_p(x, y)`.
pub fn lipschitz_modulus(
    model: &DistributionModel,
    params: &ThetaParams,
    grid: &GridSpec,
) -> Result<ModulusEstimate> {
    require_p(model, params.p)?;
    let pts = grid.points()?;
    let q = quantiles(model, &pts);
    let mut best = 0.0;
    let mut argmax = None;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let r = (q[j] - q[i]).abs() / theta_raw(params.p, pts[i], pts[j]);
            if r > best || r.is_nan() {
                if r.is_nan() {
                    return Err(Error::Numerical(format!(
                        "non-finite ratio at ({}, {})",
                        pts[i], pts[j]
                    )));
                }
                best = r;
                argmax = Some((pts[i], pts[j]));
            }
        }
    }
    Ok(ModulusEstimate {
        constant: best,
        grid: grid.describe(),
        kind: ModulusKind::Lipschitz,
        argmax,
        table: vec![],
    })
}

/// For each `delta`, the largest θ_1-radius `ln T` within which all grid
/// pairs have quantile gap at most `delta`.
///
/// The radius is the smallest θ_1 distance among grid pairs whose gap
/// exceeds `delta`. The estimate's `constant` is the largest `delta / ln T`
/// across the table.
pub fn continuity_table(
    model: &DistributionModel,
    deltas: &[f64],
    grid: &GridSpec,
) -> Result<ModulusEstimate> {
    if !model.classify_tail().has_exponential_decay() {
        return Err(Error::Precondition(format!(
            "{model} lacks exponential tail decay"
        )));
    }
    if deltas.is_empty() || deltas.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
        return Err(domain("deltas must be a non-empty list of positive reals"));
    }
    let pts = grid.points()?;
    let q = quantiles(model, &pts);
    let mut pairs = Vec::with_capacity(pts.len() * pts.len() / 2);
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            pairs.push((theta_raw(1.0, pts[i], pts[j]), (q[j] - q[i]).abs()));
        }
    }
    let mut table = Vec::with_capacity(deltas.len());
    let mut constant: f64 = 0.0;
    for &delta in deltas {
        let log_t = pairs
            .iter()
            .filter(|(_, gap)| *gap > delta)
            .map(|(th, _)| *th)
            .fold(f64::INFINITY, f64::min);
        constant = constant.max(delta / log_t);
        table.push(ContinuityEntry {
            delta,
            log_t,
            t: log_t.exp(),
        });
    }
    Ok(ModulusEstimate {
        constant,
        grid: grid.describe(),
        kind: ModulusKind::UniformContinuityTable,
        argmax: None,
        table,
    })
}

/// A grid point (or pair) where `lhs > c * rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub x: f64,
    pub y: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
}

/// Smallest constant making an inequality `lhs <= c * rhs` hold on a grid,
/// with a re-check of every evaluation at that constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCalibration {
    pub constant: f64,
    /// Maximizing point `(x, y)`; `y == x` for single-point or diagonal terms.
    pub argmax: (f64, f64),
    pub evaluations: usize,
    pub violations: Vec<Violation>,
    pub grid: String,
}

// Relative slack for the re-check: c is itself a rounded quotient.
const RECHECK_SLACK: f64 = 1e-12;

struct Calibrator {
    terms: Vec<(f64, Option<f64>, f64, f64)>,
}

impl Calibrator {
    fn new() -> Self {
        Calibrator { terms: Vec::new() }
    }

    fn push(&mut self, x: f64, y: Option<f64>, lhs: f64, rhs: f64) {
        self.terms.push((x, y, lhs, rhs));
    }

    fn finish(self, grid: String) -> Result<BoundCalibration> {
        let mut constant: f64 = 0.0;
        let mut argmax = (f64::NAN, f64::NAN);
        for &(x, y, lhs, rhs) in &self.terms {
            let r = lhs / rhs;
            if r > constant {
                constant = r;
                argmax = (x, y.unwrap_or(x));
            }
        }
        if self.terms.is_empty() {
            return Err(domain("grid produced no admissible evaluation points"));
        }
        let violations = self
            .terms
            .iter()
            .filter(|(_, _, lhs, rhs)| {
                !(lhs.is_finite() && rhs.is_finite())
                    || *lhs > constant * rhs * (1.0 + RECHECK_SLACK)
            })
            .map(|&(x, y, lhs, rhs)| Violation { x, y, lhs, rhs })
            .collect();
        Ok(BoundCalibration {
            constant,
            argmax,
            evaluations: self.terms.len(),
            violations,
            grid,
        })
    }
}

fn require_log_concave(model: &DistributionModel) -> Result<()> {
    if model.p_index() >= 1.0 {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{model} is not log-concave")))
    }
}

// Bracket of the quantile-gap inequality for x < y.
fn gap_bracket(x: f64, y: f64, qx: f64, qy: f64) -> f64 {
    let first = qy.abs() * ((y - x) / x).ln_1p() / (-y.ln());
    let second = qx.abs() * ((y - x) / (1.0 - y)).ln_1p() / (-(-x).ln_1p());
    first.max(second)
}

/// Calibrates `c` in
/// `F⁻¹(y) - F⁻¹(x) <= c max{ |F⁻¹(y)| ln(y/x)/ln(1/y), |F⁻¹(x)| ln((1-x)/(1-y))/ln(1/(1-x)) }`
/// over all grid pairs `x < y`, together with the diagonal limit `y -> x`
/// at every grid point (the ratio of derivatives, `1/f(F⁻¹(u))` over the
/// bracket's first-order coefficient).
///
/// Pairs whose bracket vanishes are skipped. The bracket shrinks
/// quadratically for pairs straddling the point where `F⁻¹` is zero, so the
/// ratio is unbounded there; [`GridSpec::tails_only`] is the default grid.
pub fn check_quantile_gap_bound(
    model: &DistributionModel,
    grid: &GridSpec,
) -> Result<BoundCalibration> {
    require_log_concave(model)?;
    let pts = grid.points()?;
    let q = quantiles(model, &pts);
    let mut cal = Calibrator::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let rhs = gap_bracket(pts[i], pts[j], q[i], q[j]);
            if rhs > 0.0 {
                cal.push(pts[i], Some(pts[j]), q[j] - q[i], rhs);
            }
        }
        let u = pts[i];
        let slope = (-model.log_density_finite(q[i])).exp();
        let rhs = (q[i].abs() / (u * -u.ln())).max(q[i].abs() / ((1.0 - u) * -(-u).ln_1p()));
        if rhs > 0.0 {
            cal.push(u, None, slope, rhs);
        }
    }
    cal.finish(format!("{} (pairs and diagonal limits)", grid.describe()))
}

/// Calibrates `c` in `|F⁻¹(x)| <= c max{ (ln 1/x)^(1/p), (ln 1/(1-x))^(1/p) }`.
pub fn check_quantile_tail_bound(
    model: &DistributionModel,
    params: &ThetaParams,
    grid: &GridSpec,
) -> Result<BoundCalibration> {
    require_p(model, params.p)?;
    let pts = grid.points()?;
    let inv_p = 1.0 / params.p;
    let mut cal = Calibrator::new();
    for &u in &pts {
        let lhs = model.quantile_interior(u).abs();
        let rhs = (-u.ln()).powf(inv_p).max((-(-u).ln_1p()).powf(inv_p));
        cal.push(u, None, lhs, rhs);
    }
    cal.finish(grid.describe())
}

/// Calibrates `c` in `|F⁻¹(x) - F⁻¹(y)| <= c |x - y| / eps` over grid pairs
/// in `[eps, 1 - eps]`.
pub fn check_central_lipschitz(
    model: &DistributionModel,
    eps: f64,
    grid: &CentralGrid,
) -> Result<BoundCalibration> {
    require_log_concave(model)?;
    let pts = grid.points(eps)?;
    let q = quantiles(model, &pts);
    let mut cal = Calibrator::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            cal.push(pts[i], Some(pts[j]), q[j] - q[i], (pts[j] - pts[i]) / eps);
        }
    }
    cal.finish(grid.describe(eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn th(p: f64, x: f64, y: f64) -> f64 {
        theta_distance(&ThetaParams::new(p).unwrap(), x, y).unwrap()
    }

    #[test]
    fn theta_examples() {
        assert_eq!(th(1.0, 0.3, 0.3), 0.0);
        assert_eq!(th(2.5, 0.9, 0.9), 0.0);
        assert_abs_diff_eq!(th(1.0, 0.25, 0.5), std::f64::consts::LN_2, epsilon = 1e-15);
        let e = std::f64::consts::E;
        assert_abs_diff_eq!(th(2.0, e.powi(-4), e.powi(-1)), 1.5, epsilon = 1e-14);
        // Second term of that example, by direct evaluation.
        let (x, y): (f64, f64) = (e.powi(-4), e.powi(-1));
        let second = ((1.0 - x) / (1.0 - y)).ln() / (-(1.0 - y).ln()).sqrt();
        assert!((second - 0.650).abs() < 1e-3);
    }

    #[test]
    fn theta_domain_errors() {
        let p = ThetaParams::new(1.0).unwrap();
        assert!(theta_distance(&p, 0.0, 0.5).is_err());
        assert!(theta_distance(&p, 0.5, 1.0).is_err());
        assert!(theta_distance(&p, f64::NAN, 0.5).is_err());
        assert!(ThetaParams::new(0.5).is_err());
        assert!(ThetaParams::new(f64::INFINITY).is_err());
    }

    proptest! {
        #[test]
        fn theta_metric_axioms(
            x in 1e-9f64..1.0,
            y in 1e-9f64..1.0,
            z in 1e-9f64..1.0,
            p in prop::sample::select(vec![1.0, 1.5, 2.0, 4.0]),
        ) {
            prop_assume!(x < 1.0 && y < 1.0 && z < 1.0);
            let dxy = th(p, x, y);
            prop_assert_eq!(dxy, th(p, y, x));
            prop_assert!(dxy >= 0.0);
            prop_assert_eq!(dxy == 0.0, x == y);
            let bound = dxy + th(p, y, z);
            prop_assert!(th(p, x, z) <= bound * (1.0 + 1e-12));
        }

        #[test]
        fn theta_monotone_structure(
            a in 1e-6f64..0.999_999,
            b in 1e-6f64..0.999_999,
            c in 1e-6f64..0.999_999,
            p in 1.0f64..6.0,
        ) {
            let mut v = [a, b, c];
            v.sort_by(f64::total_cmp);
            let [x1, x2, y] = v;
            // nonincreasing in x on (0, y]
            prop_assert!(th(p, x2, y) <= th(p, x1, y));
            // nondecreasing in y on [x, 1)
            prop_assert!(th(p, x1, x2) <= th(p, x1, y));
        }
    }

    #[test]
    fn refined_grid_is_superset() {
        let g = GridSpec::default();
        let a = g.points().unwrap();
        let b = g.refined().points().unwrap();
        assert!(b.len() > a.len());
        for u in &a {
            assert!(b.contains(u), "{u}");
        }
        let c = CentralGrid::default();
        let a = c.points(0.02).unwrap();
        let b = c.refined().points(0.02).unwrap();
        for u in &a {
            assert!(b.contains(u), "{u}");
        }
        assert_eq!(a[0], 0.02);
        assert_eq!(*a.last().unwrap(), 0.98);
    }

    #[test]
    fn uniform_lipschitz_at_most_one() {
        let m = DistributionModel::uniform();
        let est =
            lipschitz_modulus(&m, &ThetaParams::new(1.0).unwrap(), &GridSpec::default()).unwrap();
        assert!(
            est.constant > 0.0 && est.constant <= 1.0,
            "{}",
            est.constant
        );
    }

    #[test]
    fn lipschitz_stable_under_refinement() {
        for (m, p) in [
            (DistributionModel::laplace(0.0, 1.0).unwrap(), 1.0),
            (DistributionModel::standard_normal(), 2.0),
        ] {
            let params = ThetaParams::new(p).unwrap();
            let a = lipschitz_modulus(&m, &params, &GridSpec::default()).unwrap();
            let b = lipschitz_modulus(&m, &params, &GridSpec::default().refined()).unwrap();
            assert!(a.constant.is_finite());
            assert!(b.constant >= a.constant);
            assert!(
                (b.constant - a.constant) / a.constant <= 0.05,
                "{m}: {} {}",
                a.constant,
                b.constant
            );
        }
    }

    #[test]
    fn lipschitz_rejects_p_above_index() {
        let m = DistributionModel::laplace(0.0, 1.0).unwrap();
        let r = lipschitz_modulus(&m, &ThetaParams::new(2.0).unwrap(), &GridSpec::default());
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn continuity_table_uniform_admits_delta() {
        let m = DistributionModel::uniform();
        let deltas = [0.01, 0.05, 0.1, 0.3];
        let est = continuity_table(&m, &deltas, &GridSpec::default()).unwrap();
        for e in &est.table {
            assert!(e.log_t >= e.delta, "{e:?}");
        }
    }

    #[test]
    fn continuity_table_exponential_right_tail() {
        let m = DistributionModel::exponential(1.0).unwrap();
        let g = GridSpec::default();
        // Log spacing of the tail grid, the resolution of the table.
        let spacing = (g.tail_cut.ln() - g.floor.ln()) / (g.tail_points - 1) as f64;
        let est = continuity_table(&m, &[0.5, 1.0, 2.0], &g).unwrap();
        for e in &est.table {
            assert!(
                e.log_t > e.delta * 0.999 && e.log_t <= e.delta + spacing,
                "{e:?}"
            );
        }
    }

    #[test]
    fn continuity_table_monotone_in_delta() {
        let m = DistributionModel::standard_normal();
        let deltas = [0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0];
        let est = continuity_table(&m, &deltas, &GridSpec::default()).unwrap();
        for w in est.table.windows(2) {
            assert!(w[1].t >= w[0].t);
        }
        assert!(continuity_table(&m, &[], &GridSpec::default()).is_err());
        assert!(continuity_table(&m, &[-1.0], &GridSpec::default()).is_err());
    }

    #[test]
    fn gap_bound_exponential_stable() {
        let m = DistributionModel::exponential(1.0).unwrap();
        let a = check_quantile_gap_bound(&m, &GridSpec::tails_only()).unwrap();
        let b = check_quantile_gap_bound(&m, &GridSpec::tails_only().refined()).unwrap();
        assert!(a.violations.is_empty() && b.violations.is_empty());
        assert!((b.constant - a.constant).abs() / a.constant <= 0.05);
    }

    #[test]
    fn gap_bound_normal_small() {
        let m = DistributionModel::standard_normal();
        let a = check_quantile_gap_bound(&m, &GridSpec::tails_only()).unwrap();
        assert!(a.constant <= 10.0 && a.constant > 0.0, "{}", a.constant);
        assert!(a.violations.is_empty());
    }

    #[test]
    fn gap_ratio_bounded_near_diagonal() {
        // Pairs (u, u(1+h)) with h -> 0 approach the diagonal limit.
        let m = DistributionModel::laplace(0.0, 1.0).unwrap();
        let u: f64 = 1e-3;
        let diag = check_quantile_gap_bound(&m, &GridSpec::tails_only())
            .unwrap()
            .constant;
        for h in [1e-2, 1e-4, 1e-6] {
            let y = u * (1.0 + h);
            let (qx, qy) = (m.quantile(u).unwrap(), m.quantile(y).unwrap());
            let r = (qy - qx) / gap_bracket(u, y, qx, qy);
            assert!(r.is_finite() && r <= diag * 1.01, "h={h}: {r}");
        }
    }

    #[test]
    fn gap_ratio_blows_up_across_the_median() {
        let m = DistributionModel::standard_normal();
        let ratio = |h: f64| {
            let (x, y) = (0.5 - h, 0.5 + 2.0 * h);
            let (qx, qy) = (m.quantile(x).unwrap(), m.quantile(y).unwrap());
            (qy - qx) / gap_bracket(x, y, qx, qy)
        };
        assert!(ratio(1e-4) > 10.0 * ratio(1e-2));
    }

    #[test]
    fn tail_bound_examples() {
        let one = ThetaParams::new(1.0).unwrap();
        let e = DistributionModel::exponential(1.0).unwrap();
        let c = check_quantile_tail_bound(&e, &one, &GridSpec::default()).unwrap();
        assert!((c.constant - 1.0).abs() < 1e-9, "{}", c.constant);

        let n = DistributionModel::standard_normal();
        let c =
            check_quantile_tail_bound(&n, &ThetaParams::new(2.0).unwrap(), &GridSpec::default())
                .unwrap();
        assert!(c.constant <= 2.0 && c.violations.is_empty());

        let u = DistributionModel::uniform();
        let c = check_quantile_tail_bound(&u, &one, &GridSpec::default()).unwrap();
        assert!(c.constant <= 1.0 / std::f64::consts::LN_2);
    }

    #[test]
    fn tail_bound_consistency_on_finer_grid() {
        for (m, p) in [
            (DistributionModel::standard_normal(), 2.0),
            (DistributionModel::genexp(2.0).unwrap(), 2.0),
            (DistributionModel::genexp(3.0).unwrap(), 3.0),
        ] {
            let params = ThetaParams::new(p).unwrap();
            let c = check_quantile_tail_bound(&m, &params, &GridSpec::default())
                .unwrap()
                .constant;
            let fine = GridSpec::default().refined().refined().points().unwrap();
            for u in fine {
                let lhs = m.quantile(u).unwrap().abs();
                let rhs = (-u.ln()).powf(1.0 / p).max((-(1.0 - u).ln()).powf(1.0 / p));
                assert!(lhs <= 1.1 * c * rhs, "{m} u={u}");
            }
        }
    }

    #[test]
    fn central_lipschitz_examples() {
        let g = CentralGrid::default();
        let u = DistributionModel::uniform();
        for eps in [0.01, 0.02, 0.05] {
            let c = check_central_lipschitz(&u, eps, &g).unwrap();
            assert!(
                (c.constant - eps).abs() < 1e-9 * eps.max(1.0) + 1e-12,
                "{}",
                c.constant
            );
        }
        let e = DistributionModel::exponential(1.0).unwrap();
        let c = check_central_lipschitz(&e, 0.01, &g).unwrap();
        assert!((c.constant - 1.0).abs() < 1e-3, "{}", c.constant);
        assert!(check_central_lipschitz(&e, 0.5, &g).is_err());
        assert!(check_central_lipschitz(&e, 0.0, &g).is_err());
    }

    #[test]
    fn central_lipschitz_normal_matches_mills_oracle() {
        // The supremum of the quantile slope on [eps, 1-eps] is its value at
        // the endpoints, 1/φ(Φ⁻¹(eps)); c(eps) = eps/φ(Φ⁻¹(eps)). This stays
        // bounded as eps shrinks (it decays like 1/|Φ⁻¹(eps)|) but is not
        // constant: it moves from 0.375 to 0.485 over eps in {0.01, 0.05}.
        let m = DistributionModel::standard_normal();
        let mut cs = Vec::new();
        for eps in [0.01, 0.02, 0.05] {
            let z = m.quantile(eps).unwrap();
            let oracle = eps * (2.0 * std::f64::consts::PI).sqrt() * (0.5 * z * z).exp();
            let c = check_central_lipschitz(&m, eps, &CentralGrid::default()).unwrap();
            assert!(
                (c.constant - oracle).abs() / oracle < 1e-3,
                "{eps}: {} vs {oracle}",
                c.constant
            );
            cs.push(c.constant);
        }
        assert!(cs.iter().all(|&c| c > 0.3 && c < 0.5));
    }
}
