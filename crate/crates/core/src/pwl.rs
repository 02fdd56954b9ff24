//! Continuous piecewise-linear functions on `[0, 1]`.
//!
//! Integrated quantiles, their reflections, concave envelopes and
//! piecewise-linear penalty curves all share this representation. Besides the
//! knot values every piece carries its slope. For functions built from a step
//! quantile the slopes are the (negated) quantile values themselves, so slope
//! extraction never has to difference two accumulated sums.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearFn {
    knots: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl PiecewiseLinearFn {
    /// Builds the interpolant through `(knots[i], values[i])`.
    ///
    /// Knots must start at 0, end at 1 and increase strictly. The values at 0
    /// and 1 are read as the one-sided limits `f(0+)` and `f(1-)`.
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        validate_knots(&knots, &values)?;
        let slopes = knots
            .windows(2)
            .zip(values.windows(2))
            .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
            .collect();
        Ok(Self {
            knots,
            values,
            slopes,
        })
    }

    /// Trusted constructor for callers that know the exact slope of every piece.
    pub(crate) fn from_parts(knots: Vec<f64>, values: Vec<f64>, slopes: Vec<f64>) -> Self {
        debug_assert_eq!(knots.len(), values.len());
        debug_assert_eq!(knots.len(), slopes.len() + 1);
        debug_assert!(knots.windows(2).all(|w| w[0] < w[1]));
        Self {
            knots,
            values,
            slopes,
        }
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    /// Index of the piece `[knots[k], knots[k + 1]]` that contains `u`.
    /// Points outside `[0, 1]` map to the first or last piece.
    pub fn piece_index(&self, u: f64) -> usize {
        let idx = self.knots.partition_point(|&x| x <= u);
        idx.saturating_sub(1).min(self.slopes.len() - 1)
    }

    /// Evaluates the function; arguments outside `[0, 1]` are clamped.
    pub fn eval(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let k = self.piece_index(u);
        let (x0, x1) = (self.knots[k], self.knots[k + 1]);
        if u == x0 {
            return self.values[k];
        }
        if u == x1 {
            return self.values[k + 1];
        }
        // anchor at the nearer knot
        if u - x0 <= x1 - u {
            self.values[k] + self.slopes[k] * (u - x0)
        } else {
            self.values[k + 1] - self.slopes[k] * (x1 - u)
        }
    }

    /// Value at the right end, `f(1-)`.
    pub fn right_value(&self) -> f64 {
        *self.values.last().expect("non-empty")
    }

    /// Value at the left end, `f(0+)`.
    pub fn left_value(&self) -> f64 {
        self.values[0]
    }

    /// Slopes are non-increasing up to `tol`.
    pub fn is_concave(&self, tol: f64) -> bool {
        self.slopes.windows(2).all(|s| s[1] <= s[0] + tol)
    }

    /// Slopes are non-decreasing up to `tol`.
    pub fn is_convex(&self, tol: f64) -> bool {
        self.slopes.windows(2).all(|s| s[1] >= s[0] - tol)
    }

    pub fn neg(&self) -> Self {
        Self {
            knots: self.knots.clone(),
            values: self.values.iter().map(|v| -v).collect(),
            slopes: self.slopes.iter().map(|s| -s).collect(),
        }
    }

    /// Exact pointwise maximum of a non-empty family, including the kinks
    /// where two members cross between shared knots.
    ///
    /// Segments lying on a single member piece keep that member's slope.
    pub fn pointwise_max(fns: &[PiecewiseLinearFn]) -> Result<Self> {
        if fns.is_empty() {
            return Err(Error::Empty);
        }
        let grid = merged_knots(fns.iter().map(|f| f.knots()));
        let mut xs: Vec<f64> = Vec::with_capacity(grid.len());
        for w in grid.windows(2) {
            let (a, b) = (w[0], w[1]);
            xs.push(a);
            let mid = 0.5 * (a + b);
            let lines: Vec<(f64, f64)> = fns
                .iter()
                .map(|f| (f.eval(a), f.slopes[f.piece_index(mid)]))
                .collect();
            let mut crossings = Vec::new();
            for i in 0..lines.len() {
                for j in (i + 1)..lines.len() {
                    let (yi, si) = lines[i];
                    let (yj, sj) = lines[j];
                    if si != sj {
                        let x = a + (yj - yi) / (si - sj);
                        if x > a && x < b {
                            crossings.push(x);
                        }
                    }
                }
            }
            crossings.sort_by(f64::total_cmp);
            crossings.dedup();
            xs.extend(crossings);
        }
        xs.push(1.0);

        let values: Vec<f64> = xs
            .iter()
            .map(|&x| fns.iter().map(|f| f.eval(x)).fold(f64::NEG_INFINITY, f64::max))
            .collect();
        // slope of each segment comes from the member on top at its midpoint
        let slopes: Vec<f64> = xs
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                let mut best = (f64::NEG_INFINITY, 0.0);
                for f in fns {
                    let y = f.eval(mid);
                    if y > best.0 {
                        best = (y, f.slopes[f.piece_index(mid)]);
                    }
                }
                best.1
            })
            .collect();

        // drop knots that separate two segments of equal slope
        let mut knots = vec![xs[0]];
        let mut vals = vec![values[0]];
        let mut out_slopes: Vec<f64> = Vec::new();
        for (i, &s) in slopes.iter().enumerate() {
            if let Some(&last) = out_slopes.last() {
                if last == s {
                    *knots.last_mut().unwrap() = xs[i + 1];
                    *vals.last_mut().unwrap() = values[i + 1];
                    continue;
                }
            }
            out_slopes.push(s);
            knots.push(xs[i + 1]);
            vals.push(values[i + 1]);
        }
        Ok(Self::from_parts(knots, vals, out_slopes))
    }
}

fn validate_knots(knots: &[f64], values: &[f64]) -> Result<()> {
    if knots.len() != values.len() {
        return Err(Error::LengthMismatch {
            left: knots.len(),
            right: values.len(),
        });
    }
    if knots.len() < 2 {
        return Err(Error::InvalidPiecewiseLinear(
            "need at least the knots 0 and 1".into(),
        ));
    }
    if knots.iter().chain(values).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    if knots[0] != 0.0 || *knots.last().unwrap() != 1.0 {
        return Err(Error::InvalidPiecewiseLinear(
            "knots must start at 0 and end at 1".into(),
        ));
    }
    if knots.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidPiecewiseLinear(
            "knots must increase strictly".into(),
        ));
    }
    Ok(())
}

/// Sorted, deduplicated union of several knot vectors.
pub(crate) fn merged_knots<'a>(sets: impl Iterator<Item = &'a [f64]>) -> Vec<f64> {
    let mut all: Vec<f64> = sets.flat_map(|s| s.iter().copied()).collect();
    all.sort_by(f64::total_cmp);
    all.dedup();
    all
}
