//! Seeded generators of random laws, families, ordered pairs and penalties.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lattice::{sup_order, QuantileFamily};
use crate::maxitive::{PenaltyCurve, PenaltyFamily};
use crate::orders::OrderRelation;
use crate::pwl::PiecewiseLinearFn;
use crate::quantile::{build_distribution, StepQuantile};

/// Generator for trial `trial` under the master `seed`; each trial reads its
/// own ChaCha stream so results do not depend on scheduling.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Master seed of a named sub-check.
pub fn derive_seed(seed: u64, name: &str) -> u64 {
    // FNV-1a over the name, folded into the seed
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    seed ^ h
}

/// Rounds `x` to the nearest multiple of `step`.
pub fn round_to(x: f64, step: f64) -> f64 {
    (x / step).round() * step
}

/// Parameters of the random laws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Generator {
    pub min_support: usize,
    pub max_support: usize,
    /// Atoms are uniform on `[-value_bound, value_bound]`.
    pub value_bound: f64,
    /// Rounding step for atoms and weights.
    pub resolution: f64,
}

impl Default for Generator {
    fn default() -> Self {
        Self {
            min_support: 2,
            max_support: 8,
            value_bound: 5.0,
            resolution: 1e-3,
        }
    }
}

impl Generator {
    pub fn with_support(max_support: usize) -> Self {
        Self {
            max_support,
            min_support: 2.min(max_support),
            ..Self::default()
        }
    }

    /// Atoms and weights of a random discrete law.
    pub fn atoms<R: Rng>(&self, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
        let n = rng.gen_range(self.min_support..=self.max_support);
        let b = self.value_bound;
        let values: Vec<f64> = (0..n)
            .map(|_| round_to(rng.gen_range(-b..=b), self.resolution))
            .collect();
        // exponential draws give a flat Dirichlet
        let raw: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
        let total: f64 = raw.iter().sum();
        let rounded: Vec<f64> = raw
            .iter()
            .map(|w| round_to(w / total, self.resolution).max(self.resolution))
            .collect();
        let total: f64 = rounded.iter().sum();
        let weights = rounded.iter().map(|w| w / total).collect();
        (values, weights)
    }

    pub fn quantile<R: Rng>(&self, rng: &mut R) -> StepQuantile {
        let (values, weights) = self.atoms(rng);
        build_distribution(&values, &weights).expect("generated weights are valid")
    }

    /// Law with mean exactly representable near zero, for the convex order.
    pub fn centered<R: Rng>(&self, rng: &mut R) -> StepQuantile {
        let q = self.quantile(rng);
        q.translate(-q.mean())
    }

    fn member<R: Rng>(&self, rng: &mut R, relation: OrderRelation) -> StepQuantile {
        if relation == OrderRelation::Cx {
            self.centered(rng)
        } else {
            self.quantile(rng)
        }
    }

    /// Family of `1..=max_size` members (at least two when allowed).
    pub fn family<R: Rng>(
        &self,
        rng: &mut R,
        relation: OrderRelation,
        max_size: usize,
    ) -> QuantileFamily {
        let size = rng.gen_range(2.min(max_size).max(1)..=max_size.max(1));
        let members = (0..size).map(|_| self.member(rng, relation)).collect();
        QuantileFamily::new(members).expect("non-empty")
    }

    /// Random `(a, b)` with `a ≼ b` under `relation`.
    pub fn ordered_pair<R: Rng>(
        &self,
        rng: &mut R,
        relation: OrderRelation,
    ) -> (StepQuantile, StepQuantile) {
        let a = self.member(rng, relation);
        let b = self.dominating(rng, relation, &a);
        (a, b)
    }

    /// Random `b` with `a ≼ b`: the supremum of `a` and a fresh law, moved
    /// up where the order allows it.
    pub fn dominating<R: Rng>(
        &self,
        rng: &mut R,
        relation: OrderRelation,
        a: &StepQuantile,
    ) -> StepQuantile {
        let fam = QuantileFamily::new(vec![a.clone()]).expect("non-empty");
        self.upper_bound(rng, relation, &fam)
    }

    /// An upper bound of `fam` built without reference to its supremum: the
    /// supremum of `fam` together with a fresh law, then lifted.
    pub fn upper_bound<R: Rng>(
        &self,
        rng: &mut R,
        relation: OrderRelation,
        fam: &QuantileFamily,
    ) -> StepQuantile {
        let mut extra = self.member(rng, relation);
        if relation == OrderRelation::Cx {
            extra = extra.translate(fam.members()[0].mean() - extra.mean());
        }
        let mut members = fam.members().to_vec();
        members.push(extra);
        let wider = QuantileFamily::new(members).expect("non-empty");
        let s = sup_order(relation, &wider, crate::DEFAULT_TOL).expect("valid family");
        let shift = match relation {
            OrderRelation::St | OrderRelation::Icx | OrderRelation::Icv => rng.gen_range(0.0..1.0),
            OrderRelation::Disp => rng.gen_range(-self.value_bound..=self.value_bound),
            OrderRelation::Cx => 0.0,
        };
        s.translate(round_to(shift, self.resolution))
    }

    fn interior_grid<R: Rng>(&self, rng: &mut R, max_points: usize) -> Vec<f64> {
        let k = rng.gen_range(0..=max_points);
        let mut grid: Vec<f64> = (0..k)
            .map(|_| round_to(rng.gen_range(0.0..1.0), self.resolution))
            .filter(|&g| g > 0.0 && g < 1.0)
            .collect();
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        grid
    }

    /// Concave piecewise-linear penalty; `α(1-)` is mostly non-negative.
    pub fn concave_curve<R: Rng>(&self, rng: &mut R) -> PenaltyCurve {
        let mut knots = vec![0.0];
        knots.extend(self.interior_grid(rng, 3));
        knots.push(1.0);
        let mut slopes: Vec<f64> = (1..knots.len())
            .map(|_| round_to(rng.gen_range(-10.0..=10.0), self.resolution))
            .collect();
        slopes.sort_by(|a, b| b.total_cmp(a));
        let end = match rng.gen_range(0..10) {
            0..=2 => 0.0,
            3 => -round_to(rng.gen_range(0.0..1.0), self.resolution),
            _ => round_to(rng.gen_range(0.0..5.0), self.resolution),
        };
        let mut values = vec![end; knots.len()];
        for i in (0..slopes.len()).rev() {
            values[i] = values[i + 1] - slopes[i] * (knots[i + 1] - knots[i]);
        }
        PenaltyCurve::PiecewiseLinear(PiecewiseLinearFn::from_parts(knots, values, slopes))
    }

    /// Step-left penalty, occasionally `-∞` on one piece.
    pub fn step_curve<R: Rng>(&self, rng: &mut R) -> PenaltyCurve {
        let grid = self.interior_grid(rng, 4);
        let b = self.value_bound;
        let mut values: Vec<f64> = (0..=grid.len())
            .map(|_| round_to(rng.gen_range(-b..=b), self.resolution))
            .collect();
        if rng.gen_range(0..20) == 0 {
            let i = rng.gen_range(0..values.len());
            values[i] = f64::NEG_INFINITY;
        }
        PenaltyCurve::step_left(grid, values).expect("valid grid")
    }

    /// Any penalty admissible for `relation`.
    pub fn curve<R: Rng>(&self, rng: &mut R, relation: OrderRelation) -> PenaltyCurve {
        match relation {
            OrderRelation::Icx | OrderRelation::Cx => self.concave_curve(rng),
            _ => {
                if rng.gen_bool(0.5) {
                    self.step_curve(rng)
                } else {
                    self.concave_curve(rng)
                }
            }
        }
    }

    /// Levels `s_1 < … < s_m` with curves shifted upwards level by level.
    pub fn penalty_family<R: Rng>(&self, rng: &mut R, relation: OrderRelation) -> PenaltyFamily {
        let m = rng.gen_range(1..=4);
        let base = self.curve(rng, relation);
        let mut level = round_to(rng.gen_range(-2.0..=2.0), self.resolution);
        let mut offset = 0.0;
        let mut levels = Vec::with_capacity(m);
        let mut curves = Vec::with_capacity(m);
        for _ in 0..m {
            levels.push(level);
            curves.push(shift_curve(&base, offset));
            level += round_to(rng.gen_range(0.1..=1.0), self.resolution);
            offset += round_to(rng.gen_range(0.0..=2.0), self.resolution);
        }
        PenaltyFamily::new(levels, curves, crate::DEFAULT_TOL).expect("shifted curves increase")
    }

    /// Nested acceptance sets `A_1 ⊆ A_2 ⊆ …`.
    pub fn nested_sets<R: Rng>(&self, rng: &mut R, levels: usize) -> Vec<QuantileFamily> {
        let mut members = vec![self.quantile(rng)];
        let mut sets = Vec::with_capacity(levels);
        for _ in 0..levels {
            let extra = rng.gen_range(0..=2);
            members.extend((0..extra).map(|_| self.quantile(rng)));
            sets.push(QuantileFamily::new(members.clone()).expect("non-empty"));
        }
        sets
    }
}

fn shift_curve(curve: &PenaltyCurve, c: f64) -> PenaltyCurve {
    match curve {
        PenaltyCurve::StepLeft { grid, values } => PenaltyCurve::StepLeft {
            grid: grid.clone(),
            values: values.iter().map(|v| v + c).collect(),
        },
        PenaltyCurve::PiecewiseLinear(f) => PenaltyCurve::PiecewiseLinear(PiecewiseLinearFn::from_parts(
            f.knots().to_vec(),
            f.values().iter().map(|v| v + c).collect(),
            f.slopes().to_vec(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orders::check_order;

    #[test]
    fn streams_are_reproducible() {
        let g = Generator::default();
        let a = g.quantile(&mut trial_rng(7, 3));
        let b = g.quantile(&mut trial_rng(7, 3));
        assert_eq!(a, b);
        let c = g.quantile(&mut trial_rng(7, 4));
        assert_ne!(a, c);
    }

    #[test]
    fn quantiles_respect_bounds() {
        let g = Generator::default();
        for t in 0..200 {
            let q = g.quantile(&mut trial_rng(1, t));
            assert!(q.len() <= 8);
            assert!(q.lowest() >= -5.0 && q.highest() <= 5.0);
            assert_eq!(*q.breakpoints().last().unwrap(), 1.0);
        }
    }

    #[test]
    fn ordered_pairs_are_ordered() {
        let g = Generator::default();
        for rel in OrderRelation::ALL {
            for t in 0..50 {
                let (a, b) = g.ordered_pair(&mut trial_rng(11, t), rel);
                assert!(check_order(rel, &a, &b, 1e-9).holds, "{rel} trial {t}");
            }
        }
    }

    #[test]
    fn concave_curves_are_concave() {
        let g = Generator::default();
        for t in 0..100 {
            assert!(g.concave_curve(&mut trial_rng(5, t)).is_concave(0.0));
        }
    }
}
