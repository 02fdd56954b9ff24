//! Slow reference implementations: dense grids, brute-force chords and
//! partition enumeration. They share no code paths with the exact
//! merged-breakpoint procedures they are compared against.

use crate::error::{Error, Result};
use crate::lattice::QuantileFamily;
use crate::orders::OrderRelation;
use crate::pwl::PiecewiseLinearFn;
use crate::quantile::StepQuantile;

/// Sampling grid on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub points: usize,
    /// Offset used to probe one-sided limits next to breakpoints.
    pub epsilon: f64,
}

impl GridSpec {
    pub fn envelope() -> Self {
        Self {
            points: 401,
            epsilon: 1e-7,
        }
    }

    pub fn pointwise() -> Self {
        Self {
            points: 10_001,
            epsilon: 1e-7,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 3 {
            return Err(Error::InvalidGrid(format!(
                "need at least 3 points, found {}",
                self.points
            )));
        }
        let spacing = 1.0 / (self.points as f64 + 1.0);
        if !(self.epsilon > 0.0 && self.epsilon < spacing) {
            return Err(Error::InvalidGrid(format!(
                "epsilon {} must lie in (0, {spacing})",
                self.epsilon
            )));
        }
        Ok(())
    }

    /// `points` equispaced nodes covering `[0, 1]`.
    pub fn closed(&self) -> Vec<f64> {
        let n = self.points - 1;
        (0..=n).map(|i| i as f64 / n as f64).collect()
    }

    /// Equispaced interior nodes plus every breakpoint and its `±epsilon`
    /// neighbours, restricted to `(0, 1)`.
    pub fn open_with(&self, breakpoints: &[f64]) -> Vec<f64> {
        let n = self.points as f64 + 1.0;
        let mut pts: Vec<f64> = (1..=self.points).map(|i| i as f64 / n).collect();
        for &b in breakpoints {
            pts.extend([b - self.epsilon, b, b + self.epsilon]);
        }
        pts.retain(|&u| u > 0.0 && u < 1.0);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }
}

/// Concave envelope of `max_k f_k` sampled on the grid plus every member knot:
/// at each node `u`, the best chord `λ M(a) + (1 - λ) M(b)` over nodes
/// `a <= u <= b`.
pub fn envelope_oracle(fns: &[PiecewiseLinearFn], grid: &GridSpec) -> Result<Vec<(f64, f64)>> {
    if fns.is_empty() {
        return Err(Error::Empty);
    }
    grid.validate()?;
    let mut xs = grid.closed();
    for f in fns {
        xs.extend_from_slice(f.knots());
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let m: Vec<f64> = xs
        .iter()
        .map(|&x| fns.iter().map(|f| f.eval(x)).fold(f64::NEG_INFINITY, f64::max))
        .collect();

    // Sweeping u downwards, best[a] is the steepest chord from a to any b >= u;
    // for fixed a < u the chord value grows with that slope.
    let n = xs.len();
    let mut best = vec![f64::NEG_INFINITY; n];
    let mut env = vec![0.0; n];
    for j in (0..n).rev() {
        let u = xs[j];
        let mut top = m[j];
        for a in 0..j {
            let s = (m[j] - m[a]) / (xs[j] - xs[a]);
            if s > best[a] {
                best[a] = s;
            }
            top = top.max(m[a] + (u - xs[a]) * best[a]);
        }
        env[j] = top;
    }
    Ok(xs.into_iter().zip(env).collect())
}

/// Which partition sum to maximize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionSum {
    /// `Σ sup_q (q(t_i) - q(t_{i-1}))`.
    Left,
    /// `Σ sup_q (q(t_i) - q⁺(t_{i-1}))`.
    Upper,
}

// q with q(0) := q(0+) and q(1) := q(1-)
fn q_left(q: &StepQuantile, t: f64) -> f64 {
    if t <= 0.0 {
        q.at_plus(0.0)
    } else {
        q.at(t)
    }
}

/// `sup_π S_π` over partitions of `[u, v]` whose interior points are drawn
/// from the merged breakpoints in `(u, v)` and the midpoints between
/// consecutive candidates. Small candidate sets are enumerated subset by
/// subset, larger ones by a longest-path recursion over the same set.
pub fn tv_partition_oracle(
    fam: &QuantileFamily,
    u: f64,
    v: f64,
    max_points: usize,
    sum: PartitionSum,
) -> Result<f64> {
    if !(0.0 <= u && u < v && v <= 1.0) {
        return Err(Error::InvalidGrid(format!("need 0 <= u < v <= 1, found [{u}, {v}]")));
    }
    let inside: Vec<f64> = fam
        .merged_grid()
        .into_iter()
        .filter(|&w| u <= w && w <= v)
        .collect();
    if inside.len() > max_points {
        return Err(Error::GridTooLarge {
            found: inside.len(),
            limit: max_points,
        });
    }
    let mut nodes = vec![u];
    nodes.extend(inside.iter().copied().filter(|&w| u < w && w < v));
    nodes.push(v);
    let mut cands = Vec::with_capacity(2 * nodes.len());
    for w in nodes.windows(2) {
        cands.push(w[0]);
        cands.push(0.5 * (w[0] + w[1]));
    }
    cands.push(v);

    let members = fam.members();
    let gain = |s: f64, t: f64| {
        members
            .iter()
            .map(|q| {
                let lower = match sum {
                    PartitionSum::Left => q_left(q, s),
                    PartitionSum::Upper => q.at_plus(s),
                };
                q_left(q, t) - lower
            })
            .fold(f64::NEG_INFINITY, f64::max)
    };

    let interior = cands.len() - 2;
    if interior <= 12 {
        let mut best = f64::NEG_INFINITY;
        for mask in 0u32..(1 << interior) {
            let mut prev = cands[0];
            let mut total = 0.0;
            for (k, &t) in cands[1..=interior].iter().enumerate() {
                if mask & (1 << k) != 0 {
                    total += gain(prev, t);
                    prev = t;
                }
            }
            total += gain(prev, v);
            best = best.max(total);
        }
        Ok(best)
    } else {
        let n = cands.len();
        let mut best = vec![f64::NEG_INFINITY; n];
        best[0] = 0.0;
        for j in 1..n {
            for i in 0..j {
                best[j] = best[j].max(best[i] + gain(cands[i], cands[j]));
            }
        }
        Ok(best[n - 1])
    }
}

/// Atoms `(x, F(x-), F(x))` read off the distribution function.
fn atoms(q: &StepQuantile) -> Vec<(f64, f64, f64)> {
    q.values()
        .iter()
        .map(|&x| (x, q.cdf_left(x), q.cdf(x)))
        .collect()
}

/// `Q(u) = ∫_u^1 q` summed atom by atom.
pub fn integrated_from_atoms(q: &StepQuantile, u: f64) -> f64 {
    atoms(q)
        .iter()
        .map(|&(x, lo, hi)| x * (hi - u.max(lo)).max(0.0))
        .sum()
}

/// `Q̄(u) = ∫_0^{1-u} q` summed atom by atom.
pub fn reflected_from_atoms(q: &StepQuantile, u: f64) -> f64 {
    let top = 1.0 - u;
    atoms(q)
        .iter()
        .map(|&(x, lo, hi)| x * (top.min(hi) - lo).max(0.0))
        .sum()
}

/// Checks the defining inequality of `rel` at every grid point, or every
/// pair of grid points for the dispersive order (both characterizations
/// must hold).
pub fn grid_order_oracle(
    rel: OrderRelation,
    a: &StepQuantile,
    b: &StepQuantile,
    grid: &GridSpec,
    tol: f64,
) -> bool {
    let mut bps = a.breakpoints().to_vec();
    bps.extend_from_slice(b.breakpoints());
    let pts = grid.open_with(&bps);
    let mean_a = integrated_from_atoms(a, 0.0);
    let mean_b = integrated_from_atoms(b, 0.0);
    match rel {
        OrderRelation::St => pts.iter().all(|&u| a.at(u) <= b.at(u) + tol),
        OrderRelation::Icx => {
            mean_a <= mean_b + tol
                && pts
                    .iter()
                    .all(|&u| integrated_from_atoms(a, u) <= integrated_from_atoms(b, u) + tol)
        }
        OrderRelation::Cx => {
            (mean_a - mean_b).abs() <= tol
                && grid_order_oracle(OrderRelation::Icx, a, b, grid, tol)
        }
        OrderRelation::Icv => {
            mean_a <= mean_b + tol
                && pts
                    .iter()
                    .all(|&u| reflected_from_atoms(a, u) <= reflected_from_atoms(b, u) + tol)
        }
        OrderRelation::Disp => {
            let (inc, upper) = disp_characterizations(a, b, grid, tol);
            inc && upper
        }
    }
}

/// The two dispersive characterizations on all grid pairs: increments
/// `q(v) - q(u)` for `u <= v`, and `q(v) - q⁺(u)` for `u < v`.
pub fn disp_characterizations(
    a: &StepQuantile,
    b: &StepQuantile,
    grid: &GridSpec,
    tol: f64,
) -> (bool, bool) {
    let mut bps = a.breakpoints().to_vec();
    bps.extend_from_slice(b.breakpoints());
    let pts = grid.open_with(&bps);
    let qa: Vec<f64> = pts.iter().map(|&u| a.at(u)).collect();
    let qb: Vec<f64> = pts.iter().map(|&u| b.at(u)).collect();
    let pa: Vec<f64> = pts.iter().map(|&u| a.at_plus(u)).collect();
    let pb: Vec<f64> = pts.iter().map(|&u| b.at_plus(u)).collect();
    let mut increments = true;
    let mut upper = true;
    for i in 0..pts.len() {
        for j in i..pts.len() {
            if qa[j] - qa[i] > qb[j] - qb[i] + tol {
                increments = false;
            }
            if j > i && qa[j] - pa[i] > qb[j] - pb[i] + tol {
                upper = false;
            }
        }
    }
    (increments, upper)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantile::build_distribution;

    fn d01() -> StepQuantile {
        build_distribution(&[0.0, 1.0], &[0.5, 0.5]).unwrap()
    }

    fn dm12() -> StepQuantile {
        build_distribution(&[-1.0, 2.0], &[0.5, 0.5]).unwrap()
    }

    #[test]
    fn grid_spec_validation() {
        assert!(GridSpec::envelope().validate().is_ok());
        assert!(GridSpec::pointwise().validate().is_ok());
        assert!(GridSpec { points: 2, epsilon: 1e-7 }.validate().is_err());
        assert!(GridSpec { points: 401, epsilon: 0.1 }.validate().is_err());
    }

    #[test]
    fn envelope_of_single_concave_function() {
        let q = build_distribution(&[-1.0, 0.5, 3.0], &[0.2, 0.3, 0.5]).unwrap();
        let f = q.integrated();
        for (x, y) in envelope_oracle(std::slice::from_ref(&f), &GridSpec::envelope()).unwrap() {
            assert!((y - f.eval(x)).abs() <= 1e-9, "x = {x}");
        }
    }

    #[test]
    fn envelope_of_dominated_pair() {
        let qb = dm12().integrated();
        let env = envelope_oracle(&[d01().integrated(), qb.clone()], &GridSpec::envelope()).unwrap();
        for (x, y) in env {
            assert!((y - qb.eval(x)).abs() <= 1e-9, "x = {x}");
        }
    }

    #[test]
    fn envelope_of_crossing_pair() {
        let other = build_distribution(&[-0.5, 1.2], &[0.5, 0.5]).unwrap();
        let env = envelope_oracle(&[d01().integrated(), other.integrated()], &GridSpec::envelope())
            .unwrap();
        let want = PiecewiseLinearFn::new(vec![0.0, 0.5, 1.0], vec![0.5, 0.6, 0.0]).unwrap();
        for (x, y) in env {
            assert!((y - want.eval(x)).abs() <= 1e-9, "x = {x}");
        }
    }

    #[test]
    fn partition_oracle_examples() {
        let fam = QuantileFamily::new(vec![d01(), dm12()]).unwrap();
        assert_eq!(tv_partition_oracle(&fam, 0.0, 1.0, 12, PartitionSum::Left).unwrap(), 3.0);
        assert_eq!(tv_partition_oracle(&fam, 0.0, 0.5, 12, PartitionSum::Left).unwrap(), 0.0);
        let x = build_distribution(&[-1.0, 0.5, 3.0], &[0.2, 0.3, 0.5]).unwrap();
        let single: QuantileFamily = x.clone().into();
        let tv = tv_partition_oracle(&single, 0.1, 0.9, 12, PartitionSum::Left).unwrap();
        assert_eq!(tv, x.at(0.9) - x.at(0.1));
        let consts = QuantileFamily::new(vec![
            StepQuantile::constant(1.0),
            StepQuantile::constant(-2.0),
        ])
        .unwrap();
        assert_eq!(tv_partition_oracle(&consts, 0.0, 1.0, 12, PartitionSum::Left).unwrap(), 0.0);
        let big = QuantileFamily::new(
            (0..13)
                .map(|i| {
                    let w = 0.05 + 0.05 * i as f64;
                    StepQuantile::from_parts(vec![w, 1.0], vec![0.0, 1.0]).unwrap()
                })
                .collect(),
        )
        .unwrap();
        assert!(matches!(
            tv_partition_oracle(&big, 0.0, 1.0, 12, PartitionSum::Left),
            Err(Error::GridTooLarge { found: 13, limit: 12 })
        ));
    }

    #[test]
    fn grid_order_examples() {
        let g = GridSpec::pointwise();
        let zero = StepQuantile::constant(0.0);
        assert!(grid_order_oracle(OrderRelation::St, &zero, &d01(), &g, 1e-9));
        assert!(!grid_order_oracle(OrderRelation::St, &d01(), &dm12(), &g, 1e-9));
        assert!(grid_order_oracle(OrderRelation::Icx, &d01(), &dm12(), &g, 1e-9));
        assert!(grid_order_oracle(OrderRelation::Cx, &d01(), &dm12(), &g, 1e-9));
        let pairs = GridSpec::envelope();
        assert!(grid_order_oracle(OrderRelation::Disp, &StepQuantile::constant(3.0), &dm12(), &pairs, 1e-9));
        assert!(!grid_order_oracle(OrderRelation::Disp, &dm12(), &d01(), &pairs, 1e-9));
    }

    #[test]
    fn atom_integrals() {
        let q = d01();
        assert_eq!(integrated_from_atoms(&q, 0.25), 0.5);
        assert_eq!(integrated_from_atoms(&q, 0.75), 0.25);
        assert_eq!(reflected_from_atoms(&q, 0.25), 0.25);
        assert_eq!(reflected_from_atoms(&q, 0.75), 0.0);
    }
}
