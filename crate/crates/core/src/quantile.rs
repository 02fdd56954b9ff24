//! Quantile functions of finitely supported laws.
//!
//! A law is identified with its left-continuous quantile function `q`, stored
//! as a step function on `(0, 1)`. The upper quantile `q+`, the distribution
//! function `F`, the integrated quantile `Q(u) = ∫_u^1 q` and its reflection
//! `Q̄(u) = -Q_{-ξ}(u)` are derived on demand and never stored.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::DistributionJson;
use crate::pwl::PiecewiseLinearFn;

/// Tolerance for the weight sum of sample input.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;

/// Canonical left-continuous non-decreasing step function on `(0, 1)`.
///
/// `q(u) = values[i]` for `u` in `(breakpoints[i-1], breakpoints[i]]`, with an
/// implicit breakpoint 0 in front. The last breakpoint is exactly 1 and no two
/// adjacent pieces share a value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistributionJson", into = "DistributionJson")]
pub struct StepQuantile {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl StepQuantile {
    /// Quantile function of the discrete law putting mass `weights[i]` on
    /// `values[i]`. Missing weights default to uniform.
    pub fn from_samples(values: &[f64], weights: Option<&[f64]>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let weights: Vec<f64> = match weights {
            Some(w) => {
                if w.len() != values.len() {
                    return Err(Error::LengthMismatch {
                        left: values.len(),
                        right: w.len(),
                    });
                }
                for (index, &weight) in w.iter().enumerate() {
                    if !weight.is_finite() {
                        return Err(Error::NonFinite);
                    }
                    if weight <= 0.0 {
                        return Err(Error::NonPositiveWeight { index, weight });
                    }
                }
                w.to_vec()
            }
            None => vec![1.0 / values.len() as f64; values.len()],
        };
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::WeightSum(total));
        }

        let mut atoms: Vec<(f64, f64)> = values
            .iter()
            .zip(&weights)
            .map(|(&v, &w)| (v, w / total))
            .collect();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut out_values: Vec<f64> = Vec::with_capacity(atoms.len());
        let mut masses: Vec<f64> = Vec::with_capacity(atoms.len());
        for (v, w) in atoms {
            // -0.0 and 0.0 are the same outcome
            if out_values.last() == Some(&v) {
                *masses.last_mut().unwrap() += w;
            } else {
                out_values.push(v);
                masses.push(w);
            }
        }
        let mut acc = 0.0;
        let mut breakpoints: Vec<f64> = masses
            .iter()
            .map(|m| {
                acc += m;
                acc
            })
            .collect();
        *breakpoints.last_mut().unwrap() = 1.0;
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) || breakpoints[0] <= 0.0 {
            return Err(Error::InvalidQuantile(
                "atom masses too small to separate cumulative probabilities".into(),
            ));
        }
        Ok(Self {
            breakpoints,
            values: out_values,
        })
    }

    /// Builds a quantile function from its pieces, merging adjacent pieces
    /// with equal values.
    pub fn from_parts(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(Error::Empty);
        }
        if breakpoints.len() != values.len() {
            return Err(Error::LengthMismatch {
                left: breakpoints.len(),
                right: values.len(),
            });
        }
        if breakpoints.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if breakpoints[0] <= 0.0 || breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidQuantile(
                "breakpoints must increase strictly inside (0, 1]".into(),
            ));
        }
        if *breakpoints.last().unwrap() != 1.0 {
            return Err(Error::InvalidQuantile("last breakpoint must be 1".into()));
        }
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidQuantile("values must be non-decreasing".into()));
        }
        Ok(Self::canonical(breakpoints, values))
    }

    /// Merges equal neighbours; inputs are assumed otherwise valid.
    pub(crate) fn canonical(breakpoints: Vec<f64>, values: Vec<f64>) -> Self {
        let mut bps: Vec<f64> = Vec::with_capacity(breakpoints.len());
        let mut vals: Vec<f64> = Vec::with_capacity(values.len());
        for (b, v) in breakpoints.into_iter().zip(values) {
            if vals.last() == Some(&v) {
                *bps.last_mut().unwrap() = b;
            } else {
                bps.push(b);
                vals.push(v);
            }
        }
        Self {
            breakpoints: bps,
            values: vals,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self {
            breakpoints: vec![1.0],
            values: vec![c],
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of pieces.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Breakpoints strictly inside `(0, 1)`; these are where `q` jumps.
    pub fn interior_breakpoints(&self) -> &[f64] {
        &self.breakpoints[..self.breakpoints.len() - 1]
    }

    /// `q(u)` for `u` in `(0, 1]`, with `q(1) := q(1-)`.
    pub fn eval(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u <= 1.0) {
            return Err(Error::OutOfRange {
                name: "u",
                value: u,
                range: "(0, 1]",
            });
        }
        Ok(self.at(u))
    }

    /// `q+(u)` for `u` in `[0, 1)`, with `q+(0) := q(0+)`.
    pub fn eval_plus(&self, u: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&u) {
            return Err(Error::OutOfRange {
                name: "u",
                value: u,
                range: "[0, 1)",
            });
        }
        Ok(self.at_plus(u))
    }

    /// Unchecked `q`; clamps to the end values outside `(0, 1]`.
    pub(crate) fn at(&self, u: f64) -> f64 {
        let i = self.breakpoints.partition_point(|&b| b < u);
        self.values[i.min(self.values.len() - 1)]
    }

    /// Unchecked `q+`.
    pub(crate) fn at_plus(&self, u: f64) -> f64 {
        let i = self.breakpoints.partition_point(|&b| b <= u);
        self.values[i.min(self.values.len() - 1)]
    }

    /// Right-continuous distribution function `F(x) = P(ξ <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        let k = self.values.partition_point(|&v| v <= x);
        if k == 0 {
            0.0
        } else {
            self.breakpoints[k - 1]
        }
    }

    /// Left limit `F(x-) = P(ξ < x)`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        let k = self.values.partition_point(|&v| v < x);
        if k == 0 {
            0.0
        } else {
            self.breakpoints[k - 1]
        }
    }

    /// Mass of piece `i`.
    pub fn piece_mass(&self, i: usize) -> f64 {
        let lo = if i == 0 { 0.0 } else { self.breakpoints[i - 1] };
        self.breakpoints[i] - lo
    }

    /// Masses of all pieces.
    pub fn masses(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.piece_mass(i)).collect()
    }

    pub fn mean(&self) -> f64 {
        // accumulate from the top, matching integrated()
        (0..self.len())
            .rev()
            .fold(0.0, |acc, i| acc + self.values[i] * self.piece_mass(i))
    }

    /// `q(0+)`, the essential infimum.
    pub fn lowest(&self) -> f64 {
        self.values[0]
    }

    /// `q(1-)`, the essential supremum.
    pub fn highest(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// Law of `ξ + c`.
    pub fn translate(&self, c: f64) -> Self {
        Self::canonical(
            self.breakpoints.clone(),
            self.values.iter().map(|v| v + c).collect(),
        )
    }

    /// Representative of the translation class with `q(0+) = 0`.
    pub fn anchored(&self) -> Self {
        self.translate(-self.lowest())
    }

    /// Jump `q(w+) - q(w)` at `w`; zero away from the breakpoints.
    pub fn jump_at(&self, w: f64) -> f64 {
        match self.breakpoints.binary_search_by(|b| b.total_cmp(&w)) {
            Ok(i) if i + 1 < self.values.len() => self.values[i + 1] - self.values[i],
            _ => 0.0,
        }
    }

    /// `Q(u) = ∫_u^1 q(v) dv`, accumulated backwards from `Q(1) = 0`.
    pub fn integrated(&self) -> PiecewiseLinearFn {
        let n = self.len();
        let mut knots = Vec::with_capacity(n + 1);
        knots.push(0.0);
        knots.extend_from_slice(&self.breakpoints);
        let mut values = vec![0.0; n + 1];
        for i in (0..n).rev() {
            values[i] = values[i + 1] + self.values[i] * self.piece_mass(i);
        }
        let slopes = self.values.iter().map(|v| -v).collect();
        PiecewiseLinearFn::from_parts(knots, values, slopes)
    }

    /// `L(w) = ∫_0^w q(t) dt`, accumulated forwards from `L(0) = 0`.
    ///
    /// `Q̄(u) = L(1 - u)`, so `L` carries the increasing concave order without
    /// reflecting the breakpoints.
    pub fn lower_integrated(&self) -> PiecewiseLinearFn {
        let n = self.len();
        let mut knots = Vec::with_capacity(n + 1);
        knots.push(0.0);
        knots.extend_from_slice(&self.breakpoints);
        let mut values = vec![0.0; n + 1];
        for i in 0..n {
            values[i + 1] = values[i] + self.values[i] * self.piece_mass(i);
        }
        PiecewiseLinearFn::from_parts(knots, values, self.values.clone())
    }

    /// `Q̄(u) = -∫_u^1 q_{-ξ}(v) dv` as a function of `u`; convex, `Q̄(0+)` is
    /// the mean and `Q̄(1-) = 0`.
    pub fn reflected_integrated(&self) -> PiecewiseLinearFn {
        let lower = self.lower_integrated();
        let n = self.len();
        let mut knots = Vec::with_capacity(n + 1);
        let mut values = Vec::with_capacity(n + 1);
        let mut slopes = Vec::with_capacity(n);
        knots.push(0.0);
        values.push(lower.right_value());
        for i in (0..n).rev() {
            // piece i of q occupies [1 - b_i, 1 - b_{i-1}] in u
            let x = if i == 0 { 1.0 } else { 1.0 - self.breakpoints[i - 1] };
            if x <= *knots.last().unwrap() {
                continue;
            }
            knots.push(x);
            values.push(if i == 0 { 0.0 } else { lower.values()[i] });
            slopes.push(-self.values[i]);
        }
        PiecewiseLinearFn::from_parts(knots, values, slopes)
    }
}

/// Canonical quantile function of a discrete law given by atoms and weights.
pub fn build_distribution(values: &[f64], weights: &[f64]) -> Result<StepQuantile> {
    StepQuantile::from_samples(values, Some(weights))
}

/// Law of `-ξ` from the atoms of `ξ`.
pub fn negate(values: &[f64], weights: &[f64]) -> Result<StepQuantile> {
    let neg: Vec<f64> = values.iter().map(|v| -v).collect();
    build_distribution(&neg, weights)
}

pub fn integrated_quantile(q: &StepQuantile) -> PiecewiseLinearFn {
    q.integrated()
}

/// `Q̄ = -Q_{-ξ}` from the atoms of `ξ`.
pub fn reflected_integrated(values: &[f64], weights: &[f64]) -> Result<PiecewiseLinearFn> {
    Ok(negate(values, weights)?.integrated().neg())
}

/// Recovers `q = -Q'` (left derivative) from a concave integrated quantile.
pub fn quantile_from_integrated(f: &PiecewiseLinearFn, tol: f64) -> Result<StepQuantile> {
    if f.right_value().abs() > tol {
        return Err(Error::NonZeroAtOne(f.right_value()));
    }
    if !f.is_concave(tol) {
        return Err(Error::NotConcave);
    }
    let values = monotone_values(f.slopes().iter().map(|s| -s));
    Ok(StepQuantile::canonical(f.knots()[1..].to_vec(), values))
}

/// Recovers `q = L'` from a convex lower integral `L(w) = ∫_0^w q`.
pub(crate) fn quantile_from_lower_integrated(
    f: &PiecewiseLinearFn,
    tol: f64,
) -> Result<StepQuantile> {
    if f.left_value().abs() > tol {
        return Err(Error::InvalidPiecewiseLinear(format!(
            "lower integral must vanish at 0, found {}",
            f.left_value()
        )));
    }
    if !f.is_convex(tol) {
        return Err(Error::NotConvex);
    }
    let values = monotone_values(f.slopes().iter().copied());
    Ok(StepQuantile::canonical(f.knots()[1..].to_vec(), values))
}

// slopes that decrease within tolerance are lifted to a running maximum
fn monotone_values(it: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for v in it {
        let v = match out.last() {
            Some(&prev) if v < prev => prev,
            _ => v,
        };
        out.push(v);
    }
    out
}
