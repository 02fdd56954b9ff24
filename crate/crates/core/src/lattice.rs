//! Suprema of finite families and the total variation of a family of quantiles.

use crate::error::{Error, Result};
use crate::orders::{merged_jumps, OrderRelation};
use crate::pwl::{merged_knots, PiecewiseLinearFn};
use crate::quantile::{quantile_from_integrated, quantile_from_lower_integrated, StepQuantile};

/// Non-empty finite family of quantile functions.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileFamily {
    members: Vec<StepQuantile>,
}

impl QuantileFamily {
    pub fn new(members: Vec<StepQuantile>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Empty);
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[StepQuantile] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Sorted union of the members' breakpoints inside `(0, 1)`.
    pub fn merged_grid(&self) -> Vec<f64> {
        merged_knots(self.members.iter().map(|q| q.interior_breakpoints()))
    }

    /// Merged grid with the largest member jump at each point.
    pub fn max_jumps(&self) -> (Vec<f64>, Vec<f64>) {
        let refs: Vec<&StepQuantile> = self.members.iter().collect();
        let (grid, jumps) = merged_jumps(&refs);
        let max = (0..grid.len())
            .map(|k| jumps.iter().map(|j| j[k]).fold(f64::NEG_INFINITY, f64::max))
            .collect();
        (grid, max)
    }
}

impl From<StepQuantile> for QuantileFamily {
    fn from(q: StepQuantile) -> Self {
        Self { members: vec![q] }
    }
}

/// Knots closer than this are treated as one hull vertex.
const KNOT_GAP: f64 = 1e-12;

/// Least upper bound of `fam` in the lattice of `rel`.
///
/// The dispersive supremum is only unique up to translation; the
/// representative with `q(0+) = 0` is returned.
pub fn sup_order(rel: OrderRelation, fam: &QuantileFamily, tol: f64) -> Result<StepQuantile> {
    match rel {
        OrderRelation::St => Ok(sup_st(fam)),
        OrderRelation::Icx => sup_icx(fam, tol),
        OrderRelation::Cx => {
            let means: Vec<f64> = fam.members.iter().map(StepQuantile::mean).collect();
            let min = means.iter().copied().fold(f64::INFINITY, f64::min);
            let max = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if max - min > tol {
                return Err(Error::UnequalMeans { min, max });
            }
            sup_icx(fam, tol)
        }
        OrderRelation::Icv => {
            let lower: Vec<PiecewiseLinearFn> =
                fam.members.iter().map(StepQuantile::lower_integrated).collect();
            let top = PiecewiseLinearFn::pointwise_max(&lower)?;
            quantile_from_lower_integrated(&top, tol)
        }
        OrderRelation::Disp => Ok(sup_disp(fam)),
    }
}

fn sup_st(fam: &QuantileFamily) -> StepQuantile {
    let grid = merged_knots(fam.members.iter().map(|q| q.breakpoints()));
    let values = grid
        .iter()
        .map(|&w| {
            fam.members
                .iter()
                .map(|q| q.at(w))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    StepQuantile::canonical(grid, values)
}

fn sup_icx(fam: &QuantileFamily, tol: f64) -> Result<StepQuantile> {
    let integrated: Vec<PiecewiseLinearFn> =
        fam.members.iter().map(StepQuantile::integrated).collect();
    let envelope = concave_envelope(&integrated, tol)?;
    quantile_from_integrated(&envelope, tol)
}

fn sup_disp(fam: &QuantileFamily) -> StepQuantile {
    let (mut grid, jumps) = fam.max_jumps();
    let mut values = Vec::with_capacity(grid.len() + 1);
    let mut level = 0.0;
    values.push(level);
    for j in jumps {
        level += j;
        values.push(level);
    }
    grid.push(1.0);
    StepQuantile::canonical(grid, values)
}

/// Smallest concave majorant of a family of concave functions vanishing at 1.
///
/// Upper hull (monotone chain) of the pointwise maximum sampled at the merged
/// knots, anchored at `(0, max f(0))` and `(1, 0)`. Points within `tol` of
/// collinear are dropped. A hull edge lying on a single member piece keeps
/// that member's slope.
pub fn concave_envelope(fns: &[PiecewiseLinearFn], tol: f64) -> Result<PiecewiseLinearFn> {
    if fns.is_empty() {
        return Err(Error::Empty);
    }
    for f in fns {
        if !f.is_concave(tol) {
            return Err(Error::NotConcave);
        }
        if f.right_value().abs() > tol {
            return Err(Error::NonZeroAtOne(f.right_value()));
        }
    }
    let xs = separated(merged_knots(fns.iter().map(|f| f.knots())));
    let n = xs.len();
    let ys: Vec<f64> = xs
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            if k + 1 == n {
                0.0
            } else {
                fns.iter().map(|f| f.eval(x)).fold(f64::NEG_INFINITY, f64::max)
            }
        })
        .collect();

    let slope = |i: usize, j: usize| (ys[j] - ys[i]) / (xs[j] - xs[i]);
    let mut hull: Vec<usize> = Vec::with_capacity(n);
    for p in 0..n {
        while hull.len() >= 2 {
            let last = hull[hull.len() - 1];
            let prev = hull[hull.len() - 2];
            if slope(prev, last) - slope(last, p) <= tol {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }

    let knots: Vec<f64> = hull.iter().map(|&i| xs[i]).collect();
    let values: Vec<f64> = hull.iter().map(|&i| ys[i]).collect();
    let slopes: Vec<f64> = hull
        .windows(2)
        .map(|e| member_slope(fns, xs[e[0]], ys[e[0]], xs[e[1]], ys[e[1]]).unwrap_or(slope(e[0], e[1])))
        .collect();
    Ok(PiecewiseLinearFn::from_parts(knots, values, slopes))
}

// knots closer than `KNOT_GAP` collapse onto the larger one
fn separated(xs: Vec<f64>) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(xs.len());
    for x in xs {
        match out.last_mut() {
            Some(last) if x - *last < KNOT_GAP && *last > 0.0 => *last = x,
            _ => out.push(x),
        }
    }
    out
}

// slope of a member that is linear on [a, b] and attains the hull at both ends
fn member_slope(fns: &[PiecewiseLinearFn], a: f64, ya: f64, b: f64, yb: f64) -> Option<f64> {
    fns.iter().find_map(|f| {
        let k = f.piece_index(a);
        let spans = f.knots()[k] <= a && f.knots()[k + 1] >= b;
        (spans && f.eval(a) == ya && f.eval(b) == yb).then(|| f.slopes()[k])
    })
}

/// `TV_[u, v]` of the family: the sum over merged breakpoints `w` with
/// `u <= w < v` of the largest member jump at `w`.
pub fn total_variation(fam: &QuantileFamily, u: f64, v: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::OutOfRange {
            name: "u",
            value: u,
            range: "[0, 1]",
        });
    }
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::OutOfRange {
            name: "v",
            value: v,
            range: "[0, 1]",
        });
    }
    if u >= v {
        return Err(Error::InvalidGrid(format!("interval [{u}, {v}] is empty")));
    }
    let (grid, jumps) = fam.max_jumps();
    Ok(grid
        .iter()
        .zip(jumps)
        .filter(|(&w, _)| u <= w && w < v)
        .map(|(_, j)| j)
        .sum())
}
