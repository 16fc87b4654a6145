//! Sorted i.i.d. samples without sorting.
//!
//! Uniform order statistics have the law of normalized partial sums of `n + 1`
//! standard exponentials, `y_i = (z_1 + … + z_i) / (z_1 + … + z_{n+1})`.
//! Mapping them through an increasing quantile function gives sorted samples
//! from any continuous law in O(n).

use serde::{Deserialize, Serialize};

use crate::distributions::DistributionModel;
use crate::error::{domain, Result};
use crate::rng::TrialStream;

/// Order statistics `x(1) <= … <= x(n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SortedSample {
    values: Vec<f64>,
}

// Interior clamp for uniforms: floating point can land exactly on 0 or 1.
const UNIFORM_FLOOR: f64 = f64::MIN_POSITIVE;
const UNIFORM_CEIL: f64 = 1.0 - f64::EPSILON / 2.0;

impl SortedSample {
    /// Wraps values that must already be nondecreasing and non-empty.
    pub fn from_sorted(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(domain("sample must be non-empty"));
        }
        if values.iter().any(|v| v.is_nan()) || values.windows(2).any(|w| w[0] > w[1]) {
            return Err(domain("sample values must be nondecreasing"));
        }
        Ok(SortedSample { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(domain("sample size n must be at least 1"))
    } else {
        Ok(())
    }
}

/// Fills `out` with `n` uniform order statistics.
pub(crate) fn fill_uniform_order_stats(out: &mut Vec<f64>, n: usize, stream: &mut TrialStream) {
    out.clear();
    out.reserve(n);
    let mut running = 0.0;
    for _ in 0..n {
        running += stream.exponential();
        out.push(running);
    }
    let total = running + stream.exponential();
    let scale = 1.0 / total;
    for y in out.iter_mut() {
        *y = (*y * scale).clamp(UNIFORM_FLOOR, UNIFORM_CEIL);
    }
}

/// Uniform order statistics from `n + 1` exponentials, in O(n) with no sort.
pub fn sample_uniform_order_stats(n: usize, stream: &mut TrialStream) -> Result<SortedSample> {
    check_n(n)?;
    let mut values = Vec::with_capacity(n);
    fill_uniform_order_stats(&mut values, n, stream);
    Ok(SortedSample { values })
}

/// Maps uniform order statistics in place through the model's quantile.
pub(crate) fn map_through_quantile(model: &DistributionModel, values: &mut [f64]) {
    for v in values.iter_mut() {
        *v = model.quantile_interior(*v);
    }
}

/// Order statistics of an i.i.d. sample of size `n` from `model`.
pub fn sample_order_stats(
    model: &DistributionModel,
    n: usize,
    stream: &mut TrialStream,
) -> Result<SortedSample> {
    let mut sample = sample_uniform_order_stats(n, stream)?;
    map_through_quantile(model, &mut sample.values);
    Ok(sample)
}

/// Reference sampler: `n` independent inversion draws, then a sort.
pub fn sort_oracle_sample(
    model: &DistributionModel,
    n: usize,
    stream: &mut TrialStream,
) -> Result<SortedSample> {
    check_n(n)?;
    let mut values: Vec<f64> = (0..n)
        .map(|_| {
            let u = stream.uniform().clamp(UNIFORM_FLOOR, UNIFORM_CEIL);
            model.quantile_interior(u)
        })
        .collect();
    values.sort_by(f64::total_cmp);
    Ok(SortedSample { values })
}

/// `F_n(t)`: the fraction of sample values `<= t`.
pub fn empirical_cdf_at(sample: &SortedSample, t: f64) -> f64 {
    let count = sample.values.partition_point(|&v| v <= t);
    count as f64 / sample.values.len() as f64
}
