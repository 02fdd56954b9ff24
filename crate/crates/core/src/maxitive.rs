//! Maxitive functionals: VaR, expected shortfall, penalty representations,
//! the G-transform and minimal penalties of acceptance sets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::json::{CurveJson, FamilyJson};
use crate::lattice::{concave_envelope, sup_order, QuantileFamily};
use crate::orders::OrderRelation;
use crate::pwl::{merged_knots, PiecewiseLinearFn};
use crate::quantile::StepQuantile;
use crate::random::{trial_rng, Generator};
use crate::report::{Counterexample, Report};

/// A penalty `α: (0, 1) -> [-∞, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CurveJson", into = "CurveJson")]
pub enum PenaltyCurve {
    /// `α(u) = values[i]` on `(grid[i-1], grid[i]]`, with the grid extended by 0
    /// and 1. `values` has one more entry than `grid` and may hold `-∞`.
    StepLeft { grid: Vec<f64>, values: Vec<f64> },
    /// Continuous interpolant; the values at 0 and 1 are the one-sided limits.
    PiecewiseLinear(PiecewiseLinearFn),
}

impl PenaltyCurve {
    pub fn step_left(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() + 1 {
            return Err(Error::InvalidCurve(format!(
                "a step curve on {} grid points needs {} values, found {}",
                grid.len(),
                grid.len() + 1,
                values.len()
            )));
        }
        if grid.iter().any(|g| !(*g > 0.0 && *g < 1.0)) {
            return Err(Error::InvalidCurve("grid must lie inside (0, 1)".into()));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidCurve("grid must increase strictly".into()));
        }
        if values.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
            return Err(Error::InvalidCurve("values must lie in [-inf, inf)".into()));
        }
        Ok(Self::StepLeft { grid, values })
    }

    pub fn piecewise_linear(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        PiecewiseLinearFn::new(knots, values)
            .map(Self::PiecewiseLinear)
            .map_err(|e| Error::InvalidCurve(e.to_string()))
    }

    pub fn constant(c: f64) -> Self {
        Self::StepLeft {
            grid: Vec::new(),
            values: vec![c],
        }
    }

    /// The quantile function itself, read as a step curve.
    pub fn from_quantile(q: &StepQuantile) -> Self {
        Self::StepLeft {
            grid: q.interior_breakpoints().to_vec(),
            values: q.values().to_vec(),
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        match self {
            Self::StepLeft { grid, values } => values[grid.partition_point(|&g| g < u)],
            Self::PiecewiseLinear(f) => f.eval(u),
        }
    }

    /// Nodes that split `[0, 1]` into pieces where the curve is constant or linear.
    pub fn nodes(&self) -> Vec<f64> {
        match self {
            Self::StepLeft { grid, .. } => {
                let mut nodes = Vec::with_capacity(grid.len() + 2);
                nodes.push(0.0);
                nodes.extend_from_slice(grid);
                nodes.push(1.0);
                nodes
            }
            Self::PiecewiseLinear(f) => f.knots().to_vec(),
        }
    }

    /// One-sided limits `α(a+)` and `α(b-)` on a piece `(a, b)` free of nodes.
    pub fn limits(&self, a: f64, b: f64) -> (f64, f64) {
        match self {
            Self::StepLeft { .. } => {
                let v = self.eval(b);
                (v, v)
            }
            Self::PiecewiseLinear(f) => (f.eval(a), f.eval(b)),
        }
    }

    /// Slope on the last piece.
    pub fn final_slope(&self) -> f64 {
        match self {
            Self::StepLeft { .. } => 0.0,
            Self::PiecewiseLinear(f) => *f.slopes().last().unwrap(),
        }
    }

    pub fn is_concave(&self, tol: f64) -> bool {
        match self {
            Self::StepLeft { values, .. } => values.len() == 1 && values[0].is_finite(),
            Self::PiecewiseLinear(f) => f.is_concave(tol),
        }
    }
}

/// Level-indexed penalties `α(s, ·)`, right-continuous in `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FamilyJson", into = "FamilyJson")]
pub struct PenaltyFamily {
    levels: Vec<f64>,
    curves: Vec<PenaltyCurve>,
}

impl PenaltyFamily {
    pub fn new(levels: Vec<f64>, curves: Vec<PenaltyCurve>, tol: f64) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Empty);
        }
        if levels.len() != curves.len() {
            return Err(Error::LengthMismatch {
                left: levels.len(),
                right: curves.len(),
            });
        }
        if levels.iter().any(|s| !s.is_finite()) {
            return Err(Error::NonFinite);
        }
        if levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidCurve("levels must increase strictly".into()));
        }
        for j in 1..curves.len() {
            if let Some(u) = first_decrease(&curves[j - 1], &curves[j], tol) {
                return Err(Error::NonMonotoneFamily {
                    lower: levels[j - 1],
                    upper: levels[j],
                    u,
                });
            }
        }
        Ok(Self { levels, curves })
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn curves(&self) -> &[PenaltyCurve] {
        &self.curves
    }
}

fn first_decrease(lower: &PenaltyCurve, upper: &PenaltyCurve, tol: f64) -> Option<f64> {
    let nodes = merged_knots([lower.nodes(), upper.nodes()].iter().map(Vec::as_slice));
    nodes.windows(2).find_map(|w| {
        let (la, lb) = lower.limits(w[0], w[1]);
        let (ua, ub) = upper.limits(w[0], w[1]);
        if ua < la - tol {
            Some(w[0])
        } else if ub < lb - tol {
            Some(w[1])
        } else {
            None
        }
    })
}

/// Declarative description of a maxitive functional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum FunctionalSpec {
    Var { u: f64 },
    Es { u: f64 },
    EsBar { u: f64 },
    PenaltySt { curve: PenaltyCurve },
    PenaltyIcx { curve: PenaltyCurve },
    PenaltyIcv { curve: PenaltyCurve },
    GFamily {
        #[serde(flatten)]
        family: PenaltyFamily,
        relation: OrderRelation,
    },
}

impl FunctionalSpec {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Var { .. } => "var",
            Self::Es { .. } => "es",
            Self::EsBar { .. } => "es_bar",
            Self::PenaltySt { .. } => "penalty_st",
            Self::PenaltyIcx { .. } => "penalty_icx",
            Self::PenaltyIcv { .. } => "penalty_icv",
            Self::GFamily { .. } => "g_family",
        }
    }

    /// The order under which the functional is monotone and maxitive.
    pub fn native_relation(&self) -> OrderRelation {
        match self {
            Self::Var { .. } | Self::PenaltySt { .. } => OrderRelation::St,
            Self::Es { .. } | Self::PenaltyIcx { .. } => OrderRelation::Icx,
            Self::EsBar { .. } | Self::PenaltyIcv { .. } => OrderRelation::Icv,
            Self::GFamily { relation, .. } => *relation,
        }
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        match self {
            Self::Var { u } | Self::Es { u } | Self::EsBar { u } => check_level(*u).map(|_| ()),
            Self::PenaltySt { .. } | Self::PenaltyIcv { .. } => Ok(()),
            Self::PenaltyIcx { curve } => {
                if curve.is_concave(tol) {
                    Ok(())
                } else {
                    Err(Error::NotConcave)
                }
            }
            Self::GFamily { family, relation } => match relation {
                OrderRelation::St | OrderRelation::Icv => Ok(()),
                OrderRelation::Icx => {
                    if family.curves.iter().all(|c| c.is_concave(tol)) {
                        Ok(())
                    } else {
                        Err(Error::NotConcave)
                    }
                }
                other => Err(Error::UnsupportedRelation(other.to_string())),
            },
        }
    }

    /// `ψ(q)`; `+∞` is a legitimate value.
    pub fn evaluate(&self, q: &StepQuantile, tol: f64) -> Result<f64> {
        match self {
            Self::Var { u } => var(q, *u),
            Self::Es { u } => es(q, *u),
            Self::EsBar { u } => es_bar(q, *u),
            Self::GFamily { family, relation } => g_transform_eval(family, q, *relation, tol),
            _ => eval_penalty(self, q, tol),
        }
    }

    /// Checks that the functional belongs to `relation`.
    pub fn check_relation(&self, relation: OrderRelation) -> Result<()> {
        let native = self.native_relation();
        if native == relation || (native == OrderRelation::Icx && relation == OrderRelation::Cx) {
            Ok(())
        } else {
            Err(Error::RelationMismatch {
                spec: self.name().to_string(),
                relation: relation.to_string(),
            })
        }
    }
}

fn check_level(u: f64) -> Result<f64> {
    if u > 0.0 && u < 1.0 {
        Ok(u)
    } else {
        Err(Error::OutOfRange {
            name: "u",
            value: u,
            range: "(0, 1)",
        })
    }
}

/// Value at risk `q(u)`.
pub fn var(q: &StepQuantile, u: f64) -> Result<f64> {
    Ok(q.at(check_level(u)?))
}

/// Expected shortfall `Q(u) / (1 - u)`.
pub fn es(q: &StepQuantile, u: f64) -> Result<f64> {
    Ok(tail_mean(q, check_level(u)?))
}

/// Lower-tail counterpart `Q̄(u) / (1 - u) = -ES_u(-ξ)`.
pub fn es_bar(q: &StepQuantile, u: f64) -> Result<f64> {
    Ok(head_mean(q, 1.0 - check_level(u)?))
}

// average of q over (u, 1] for u in [0, 1), accumulated as an offset from
// the first value so that constant tails are exact
fn tail_mean(q: &StepQuantile, u: f64) -> f64 {
    let bps = q.breakpoints();
    let vals = q.values();
    let k = bps.partition_point(|&b| b <= u);
    let base = vals[k];
    let mut mass = 0.0;
    let mut excess = 0.0;
    for i in (k..q.len()).rev() {
        let lo = if i == k { u } else { bps[i - 1] };
        let w = bps[i] - lo;
        mass += w;
        excess += w * (vals[i] - base);
    }
    base + excess / mass
}

// average of q over (0, w] for w in (0, 1]
fn head_mean(q: &StepQuantile, w: f64) -> f64 {
    let bps = q.breakpoints();
    let vals = q.values();
    let k = bps.partition_point(|&b| b < w).min(q.len() - 1);
    let base = vals[k];
    let mut mass = 0.0;
    let mut excess = 0.0;
    for i in 0..=k {
        let lo = if i == 0 { 0.0 } else { bps[i - 1] };
        let hi = if i == k { w } else { bps[i] };
        mass += hi - lo;
        excess += (hi - lo) * (vals[i] - base);
    }
    base + excess / mass
}

/// Exact `sup_u {statistic(u) - α(u)}`-type value of a penalty form.
pub fn eval_penalty(spec: &FunctionalSpec, q: &StepQuantile, tol: f64) -> Result<f64> {
    spec.validate(tol)?;
    match spec {
        FunctionalSpec::PenaltySt { curve } => Ok(sup_quantile_minus(q, curve)),
        FunctionalSpec::PenaltyIcx { curve } => {
            let nodes = merged_knots([q.integrated().knots(), &curve.nodes()].into_iter());
            Ok(sup_ratio(&nodes, curve, |u| tail_mean(q, u), q.highest()))
        }
        FunctionalSpec::PenaltyIcv { curve } => {
            let nodes =
                merged_knots([q.reflected_integrated().knots(), &curve.nodes()].into_iter());
            Ok(sup_ratio(&nodes, curve, |u| head_mean(q, 1.0 - u), q.lowest()))
        }
        other => Err(Error::UnsupportedRelation(format!(
            "`{}` is not a penalty form",
            other.name()
        ))),
    }
}

// sup over (0, 1) of q(u) - α(u)
fn sup_quantile_minus(q: &StepQuantile, curve: &PenaltyCurve) -> f64 {
    let mut nodes = curve.nodes();
    nodes.extend_from_slice(q.breakpoints());
    let nodes = merged_knots(std::iter::once(nodes.as_slice()));
    let mut best = f64::NEG_INFINITY;
    for w in nodes.windows(2) {
        let v = q.at(w[1]);
        let (a, b) = curve.limits(w[0], w[1]);
        best = best.max(v - a.min(b));
    }
    best
}

// sup over (0, 1) of mean(u) - α(u) / (1 - u); `mean` is the tail or head
// average and `limit` its value as u -> 1
fn sup_ratio(nodes: &[f64], curve: &PenaltyCurve, mean: impl Fn(f64) -> f64, limit: f64) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for w in nodes.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (alpha_a, alpha_b) = curve.limits(a, b);
        if alpha_a == f64::NEG_INFINITY || alpha_b == f64::NEG_INFINITY {
            return f64::INFINITY;
        }
        best = best.max(mean(a) - alpha_a / (1.0 - a));
        if b < 1.0 {
            best = best.max(mean(b) - alpha_b / (1.0 - b));
        } else if alpha_b < 0.0 {
            return f64::INFINITY;
        } else if alpha_b == 0.0 {
            best = best.max(limit + curve.final_slope());
        }
    }
    best
}

// sup over (0, 1) of statistic(u) - α(u) for a piecewise-linear statistic
fn sup_linear_minus(stat: &PiecewiseLinearFn, curve: &PenaltyCurve) -> f64 {
    let nodes = merged_knots([stat.knots(), &curve.nodes()].into_iter());
    let mut best = f64::NEG_INFINITY;
    for w in nodes.windows(2) {
        let (alpha_a, alpha_b) = curve.limits(w[0], w[1]);
        best = best
            .max(stat.eval(w[0]) - alpha_a)
            .max(stat.eval(w[1]) - alpha_b);
    }
    best
}

/// `sup_u G(t(u), u)` with `G(t, u)` the smallest level whose curve dominates
/// `t` at `u`. Statistics below the lowest curve are truncated to the first
/// level; `+∞` when the top curve is exceeded somewhere.
pub fn g_transform_eval(
    fam: &PenaltyFamily,
    q: &StepQuantile,
    relation: OrderRelation,
    tol: f64,
) -> Result<f64> {
    let excess: Box<dyn Fn(&PenaltyCurve) -> f64> = match relation {
        OrderRelation::St => Box::new(|c| sup_quantile_minus(q, c)),
        OrderRelation::Icx => {
            let stat = q.integrated();
            Box::new(move |c| sup_linear_minus(&stat, c))
        }
        OrderRelation::Icv => {
            let stat = q.reflected_integrated();
            Box::new(move |c| sup_linear_minus(&stat, c))
        }
        other => return Err(Error::UnsupportedRelation(other.to_string())),
    };
    Ok(fam
        .levels
        .iter()
        .zip(&fam.curves)
        .find(|(_, c)| excess(c) <= tol)
        .map_or(f64::INFINITY, |(s, _)| *s))
}

/// Minimal penalty `α_min` of an acceptance set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MinimalPenalty {
    Curve(PenaltyCurve),
    /// `α_min(u, v) = β(v) - β(u)` with `β(t) = TV_[0, t]`.
    Dispersive { beta: PenaltyCurve },
}

impl MinimalPenalty {
    pub fn curve(&self) -> &PenaltyCurve {
        match self {
            Self::Curve(c) => c,
            Self::Dispersive { beta } => beta,
        }
    }
}

/// Minimal penalties of nested acceptance sets, one per level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LeveledPenalty {
    Family(PenaltyFamily),
    Dispersive {
        levels: Vec<f64>,
        betas: Vec<PenaltyCurve>,
    },
}

/// `α_min = sup_{ξ ∈ A}` of the statistic of `relation`.
pub fn alpha_min_from_set(
    relation: OrderRelation,
    acceptance: &QuantileFamily,
    tol: f64,
) -> Result<MinimalPenalty> {
    let members = acceptance.members();
    match relation {
        OrderRelation::St => Ok(MinimalPenalty::Curve(PenaltyCurve::from_quantile(
            &sup_order(OrderRelation::St, acceptance, tol)?,
        ))),
        OrderRelation::Icx => {
            let fns: Vec<PiecewiseLinearFn> = members.iter().map(StepQuantile::integrated).collect();
            Ok(MinimalPenalty::Curve(PenaltyCurve::PiecewiseLinear(
                concave_envelope(&fns, tol)?,
            )))
        }
        OrderRelation::Icv => {
            let fns: Vec<PiecewiseLinearFn> =
                members.iter().map(StepQuantile::reflected_integrated).collect();
            Ok(MinimalPenalty::Curve(PenaltyCurve::PiecewiseLinear(
                PiecewiseLinearFn::pointwise_max(&fns)?,
            )))
        }
        OrderRelation::Disp => Ok(MinimalPenalty::Dispersive {
            beta: PenaltyCurve::from_quantile(&sup_order(OrderRelation::Disp, acceptance, tol)?),
        }),
        OrderRelation::Cx => Err(Error::UnsupportedRelation(relation.to_string())),
    }
}

/// Leveled `α_min(s, ·)` from acceptance sets `A_{s_1} ⊆ A_{s_2} ⊆ …`.
pub fn alpha_min_leveled(
    relation: OrderRelation,
    levels: &[f64],
    sets: &[QuantileFamily],
    tol: f64,
) -> Result<LeveledPenalty> {
    if levels.len() != sets.len() {
        return Err(Error::LengthMismatch {
            left: levels.len(),
            right: sets.len(),
        });
    }
    for (j, pair) in sets.windows(2).enumerate() {
        let nested = pair[0]
            .members()
            .iter()
            .all(|m| pair[1].members().contains(m));
        if !nested {
            return Err(Error::NotNested(j));
        }
    }
    let curves = sets
        .iter()
        .map(|s| alpha_min_from_set(relation, s, tol).map(|p| p.curve().clone()))
        .collect::<Result<Vec<_>>>()?;
    if relation == OrderRelation::Disp {
        if levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidCurve("levels must increase strictly".into()));
        }
        return Ok(LeveledPenalty::Dispersive {
            levels: levels.to_vec(),
            betas: curves,
        });
    }
    PenaltyFamily::new(levels.to_vec(), curves, tol).map(LeveledPenalty::Family)
}

/// Settings of a randomized maxitivity run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxitivityParams {
    pub trials: u64,
    pub family_size: usize,
    pub seed: u64,
    pub tol: f64,
    pub generator: Generator,
}

impl Default for MaxitivityParams {
    fn default() -> Self {
        Self {
            trials: 500,
            family_size: 5,
            seed: 0,
            tol: crate::DEFAULT_TOL,
            generator: Generator::default(),
        }
    }
}

/// Gap between `ψ(sup Y)` and `max ψ(Y)`; two infinite sides agree.
pub fn maxitivity_deviation(lhs: f64, rhs: f64) -> f64 {
    if lhs == rhs {
        0.0
    } else {
        (lhs - rhs).abs()
    }
}

/// One randomized maxitivity trial: a random family and a random ordered
/// pair. Returns the deviation `|ψ(sup Y) - max ψ(Y)|` and the failing
/// inputs when either maxitivity or monotonicity breaks by more than `tol`.
pub fn maxitivity_trial<R: rand::Rng>(
    relation: OrderRelation,
    spec: &FunctionalSpec,
    rng: &mut R,
    trial: u64,
    family_size: usize,
    gen: &Generator,
    tol: f64,
) -> Result<(f64, Option<Counterexample>)> {
    let fam = gen.family(rng, relation, family_size);
    let sup = sup_order(relation, &fam, tol)?;
    let lhs = spec.evaluate(&sup, tol)?;
    let mut rhs = f64::NEG_INFINITY;
    for m in fam.members() {
        rhs = rhs.max(spec.evaluate(m, tol)?);
    }
    let deviation = maxitivity_deviation(lhs, rhs);
    if deviation > tol {
        return Ok((
            deviation,
            Some(Counterexample {
                trial,
                kind: "maxitivity".into(),
                deviation,
                distributions: fam.members().to_vec(),
                values: vec![lhs, rhs],
            }),
        ));
    }
    let (a, b) = gen.ordered_pair(rng, relation);
    let (pa, pb) = (spec.evaluate(&a, tol)?, spec.evaluate(&b, tol)?);
    let counterexample = (pa > pb + tol).then(|| Counterexample {
        trial,
        kind: "monotonicity".into(),
        deviation: pa - pb,
        distributions: vec![a, b],
        values: vec![pa, pb],
    });
    Ok((deviation, counterexample))
}

/// Randomized check of `ψ(sup Y) = max ψ(Y)` over `params.trials` families,
/// plus monotonicity along random ordered pairs. Deterministic in the seed.
pub fn check_maxitivity(
    relation: OrderRelation,
    spec: &FunctionalSpec,
    params: &MaxitivityParams,
    exec: Execution,
) -> Result<Report> {
    spec.check_relation(relation)?;
    spec.validate(params.tol)?;
    let outcomes = exec.map_trials(params.trials, |t| {
        let mut rng = trial_rng(params.seed, t);
        maxitivity_trial(
            relation,
            spec,
            &mut rng,
            t,
            params.family_size,
            &params.generator,
            params.tol,
        )
    });
    let mut report = Report::new(params.trials, params.seed);
    for outcome in outcomes {
        let (deviation, counterexample) = outcome?;
        report.record(deviation, counterexample);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantile::{build_distribution, negate};

    fn d01() -> StepQuantile {
        build_distribution(&[0.0, 1.0], &[0.5, 0.5]).unwrap()
    }

    fn dm12() -> StepQuantile {
        build_distribution(&[-1.0, 2.0], &[0.5, 0.5]).unwrap()
    }

    fn zero_pl() -> PenaltyCurve {
        PenaltyCurve::piecewise_linear(vec![0.0, 1.0], vec![0.0, 0.0]).unwrap()
    }

    #[test]
    fn var_examples() {
        assert_eq!(var(&d01(), 0.75).unwrap(), 1.0);
        assert_eq!(var(&StepQuantile::constant(2.5), 0.3).unwrap(), 2.5);
        assert_eq!(var(&d01().translate(2.0), 0.75).unwrap(), 3.0);
        assert!(var(&d01(), 1.0).is_err());
        assert!(var(&d01(), 0.0).is_err());
    }

    #[test]
    fn es_examples() {
        assert_eq!(es(&d01(), 0.5).unwrap(), 1.0);
        assert_eq!(es(&dm12(), 0.5).unwrap(), 2.0);
        assert_eq!(es(&StepQuantile::constant(-1.5), 0.2).unwrap(), -1.5);
        assert!((es(&d01(), 0.25).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(es(&d01(), 1.0).is_err());
    }

    #[test]
    fn es_bar_examples() {
        assert_eq!(es_bar(&d01(), 0.5).unwrap(), 0.0);
        assert_eq!(es_bar(&StepQuantile::constant(4.0), 0.7).unwrap(), 4.0);
        let v = [0.3, -1.2, 4.0];
        let w = [0.2, 0.5, 0.3];
        let x = build_distribution(&v, &w).unwrap();
        let n = negate(&v, &w).unwrap();
        for u in [0.1, 0.3, 0.5, 0.75, 0.95] {
            let direct = es_bar(&x, u).unwrap();
            assert!((direct + es(&n, u).unwrap()).abs() < 1e-12, "u = {u}");
            let via_q = x.reflected_integrated().eval(u) / (1.0 - u);
            assert!((direct - via_q).abs() < 1e-12, "u = {u}");
        }
    }

    #[test]
    fn penalty_st_examples() {
        let spec = FunctionalSpec::PenaltySt {
            curve: PenaltyCurve::constant(0.0),
        };
        assert_eq!(eval_penalty(&spec, &d01(), 1e-9).unwrap(), 1.0);
        assert_eq!(
            eval_penalty(&spec, &StepQuantile::constant(-3.0), 1e-9).unwrap(),
            -3.0
        );
        let spec = FunctionalSpec::PenaltySt {
            curve: PenaltyCurve::step_left(vec![0.3], vec![0.0, f64::NEG_INFINITY]).unwrap(),
        };
        assert_eq!(eval_penalty(&spec, &d01(), 1e-9).unwrap(), f64::INFINITY);
        // a linear curve is approached at the open end of a piece
        let spec = FunctionalSpec::PenaltySt {
            curve: PenaltyCurve::piecewise_linear(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap(),
        };
        assert_eq!(eval_penalty(&spec, &d01(), 1e-9).unwrap(), 0.5);
    }

    #[test]
    fn penalty_icx_examples() {
        let spec = FunctionalSpec::PenaltyIcx { curve: zero_pl() };
        assert_eq!(eval_penalty(&spec, &d01(), 1e-9).unwrap(), 1.0);
        // α(1-) > 0 leaves the left end of the last piece
        let spec = FunctionalSpec::PenaltyIcx {
            curve: PenaltyCurve::piecewise_linear(vec![0.0, 1.0], vec![0.1, 0.1]).unwrap(),
        };
        assert!((eval_penalty(&spec, &d01(), 1e-9).unwrap() - 0.8).abs() < 1e-15);
        // α(1-) < 0 diverges
        let spec = FunctionalSpec::PenaltyIcx {
            curve: PenaltyCurve::piecewise_linear(vec![0.0, 1.0], vec![-0.1, -0.1]).unwrap(),
        };
        assert_eq!(eval_penalty(&spec, &d01(), 1e-9).unwrap(), f64::INFINITY);
        // α(u) = 1 - u: the limit picks up the curve slope
        let spec = FunctionalSpec::PenaltyIcx {
            curve: PenaltyCurve::piecewise_linear(vec![0.0, 1.0], vec![1.0, 0.0]).unwrap(),
        };
        assert_eq!(eval_penalty(&spec, &d01(), 1e-9).unwrap(), 0.0);
        let convex = FunctionalSpec::PenaltyIcx {
            curve: PenaltyCurve::piecewise_linear(vec![0.0, 0.5, 1.0], vec![1.0, 0.0, 1.0])
                .unwrap(),
        };
        assert_eq!(eval_penalty(&convex, &d01(), 1e-9), Err(Error::NotConcave));
    }

    #[test]
    fn penalty_icv_examples() {
        let spec = FunctionalSpec::PenaltyIcv { curve: zero_pl() };
        // ES̄_u decreases from the mean towards q(0+)
        assert_eq!(eval_penalty(&spec, &d01(), 1e-9).unwrap(), 0.5);
        let spec = FunctionalSpec::PenaltyIcv {
            curve: PenaltyCurve::constant(f64::NEG_INFINITY),
        };
        assert_eq!(eval_penalty(&spec, &d01(), 1e-9).unwrap(), f64::INFINITY);
    }

    fn two_levels() -> PenaltyFamily {
        PenaltyFamily::new(
            vec![0.0, 1.0],
            vec![PenaltyCurve::constant(0.0), PenaltyCurve::constant(1.0)],
            1e-9,
        )
        .unwrap()
    }

    #[test]
    fn g_transform_examples() {
        let fam = two_levels();
        let st = OrderRelation::St;
        assert_eq!(g_transform_eval(&fam, &d01(), st, 1e-9).unwrap(), 1.0);
        assert_eq!(
            g_transform_eval(&fam, &StepQuantile::constant(2.0), st, 1e-9).unwrap(),
            f64::INFINITY
        );
        assert_eq!(
            g_transform_eval(&fam, &StepQuantile::constant(-5.0), st, 1e-9).unwrap(),
            0.0
        );
        assert!(g_transform_eval(&fam, &d01(), OrderRelation::Disp, 1e-9).is_err());
    }

    #[test]
    fn family_must_increase() {
        let err = PenaltyFamily::new(
            vec![0.0, 1.0],
            vec![PenaltyCurve::constant(1.0), PenaltyCurve::constant(0.0)],
            1e-9,
        );
        assert!(matches!(err, Err(Error::NonMonotoneFamily { .. })));
        let err = PenaltyFamily::new(
            vec![1.0, 0.0],
            vec![PenaltyCurve::constant(0.0), PenaltyCurve::constant(1.0)],
            1e-9,
        );
        assert!(err.is_err());
    }

    #[test]
    fn alpha_min_examples() {
        let fam = QuantileFamily::new(vec![d01(), dm12()]).unwrap();
        let st = alpha_min_from_set(OrderRelation::St, &fam, 1e-9).unwrap();
        assert_eq!(
            st,
            MinimalPenalty::Curve(PenaltyCurve::step_left(vec![0.5], vec![0.0, 2.0]).unwrap())
        );
        let single = alpha_min_from_set(OrderRelation::St, &d01().into(), 1e-9).unwrap();
        assert_eq!(single.curve(), &PenaltyCurve::from_quantile(&d01()));
        let disp = alpha_min_from_set(OrderRelation::Disp, &fam, 1e-9).unwrap();
        let beta = disp.curve();
        assert_eq!(beta.eval(0.25), 0.0);
        assert_eq!(beta.eval(0.5), 0.0);
        assert_eq!(beta.eval(0.75), 3.0);
        assert!(alpha_min_from_set(OrderRelation::Cx, &fam, 1e-9).is_err());
    }

    #[test]
    fn leveled_alpha_min_requires_nesting() {
        let a = QuantileFamily::new(vec![d01()]).unwrap();
        let b = QuantileFamily::new(vec![d01(), dm12()]).unwrap();
        let ok = alpha_min_leveled(OrderRelation::St, &[0.0, 1.0], &[a.clone(), b.clone()], 1e-9);
        assert!(matches!(ok, Ok(LeveledPenalty::Family(_))));
        let err = alpha_min_leveled(OrderRelation::St, &[0.0, 1.0], &[b, a], 1e-9);
        assert_eq!(err, Err(Error::NotNested(0)));
    }

    #[test]
    fn relation_mismatch_is_rejected() {
        let spec = FunctionalSpec::PenaltySt {
            curve: PenaltyCurve::constant(0.0),
        };
        let err = check_maxitivity(
            OrderRelation::Icx,
            &spec,
            &MaxitivityParams::default(),
            Execution::Sequential,
        );
        assert!(matches!(err, Err(Error::RelationMismatch { .. })));
    }

    #[test]
    fn var_is_maxitive_on_example_family() {
        let fam = QuantileFamily::new(vec![d01(), dm12()]).unwrap();
        let sup = sup_order(OrderRelation::St, &fam, 1e-9).unwrap();
        assert_eq!(var(&sup, 0.7).unwrap(), 2.0);
        assert_eq!(var(&dm12(), 0.7).unwrap(), 2.0);
    }
}
