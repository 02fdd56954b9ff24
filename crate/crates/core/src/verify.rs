//! Oracle-backed property suites.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::json::DistributionJson;
use crate::lattice::{sup_order, total_variation, QuantileFamily};
use crate::maxitive::{
    alpha_min_from_set, es, es_bar, g_transform_eval, maxitivity_trial, FunctionalSpec,
    PenaltyFamily,
};
use crate::oracles::{
    disp_characterizations, envelope_oracle, grid_order_oracle, tv_partition_oracle, GridSpec,
    PartitionSum,
};
use crate::orders::{check_order, OrderRelation};
use crate::pwl::PiecewiseLinearFn;
use crate::quantile::{negate, quantile_from_integrated, StepQuantile};
use crate::random::{derive_seed, round_to, trial_rng, Generator};
use crate::report::{CheckReport, Counterexample, Report};

/// Slack for identities that hold up to floating-point rounding.
const EXACT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Quantile,
    Orders,
    Lattice,
    Maxitive,
    All,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Quantile,
        Suite::Orders,
        Suite::Lattice,
        Suite::Maxitive,
        Suite::All,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Quantile => "quantile",
            Suite::Orders => "orders",
            Suite::Lattice => "lattice",
            Suite::Maxitive => "maxitive",
            Suite::All => "all",
        }
    }

    fn contains(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.as_str() == s)
            .ok_or_else(|| Error::UnknownCheck(s.to_string()))
    }
}

/// Result of a single trial of a check.
#[derive(Debug, Clone, PartialEq)]
struct Outcome {
    deviation: f64,
    failure: Option<Failure>,
}

#[derive(Debug, Clone, PartialEq)]
struct Failure {
    kind: String,
    deviation: f64,
    distributions: Vec<StepQuantile>,
    values: Vec<f64>,
}

impl Outcome {
    fn ok() -> Self {
        Self {
            deviation: 0.0,
            failure: None,
        }
    }

    /// Fails when `deviation` exceeds `bound` or is NaN.
    fn bounded(
        deviation: f64,
        bound: f64,
        kind: &str,
        distributions: &[&StepQuantile],
        values: &[f64],
    ) -> Self {
        let failure = (deviation.is_nan() || deviation > bound).then(|| Failure {
            kind: kind.to_string(),
            deviation,
            distributions: distributions.iter().map(|&q| q.clone()).collect(),
            values: values.to_vec(),
        });
        Self { deviation, failure }
    }

    fn expect(cond: bool, kind: &str, distributions: &[&StepQuantile], values: &[f64]) -> Self {
        let deviation = if cond { 0.0 } else { 1.0 };
        Self::bounded(deviation, 0.5, kind, distributions, values)
    }

    /// Keeps the larger deviation and the first failure.
    fn and(mut self, other: Outcome) -> Outcome {
        if other.deviation > self.deviation || other.deviation.is_nan() {
            self.deviation = other.deviation;
        }
        if self.failure.is_none() {
            self.failure = other.failure;
        }
        self
    }
}

/// Shared trial context.
struct Ctx {
    tol: f64,
    gen: Generator,
}

type CheckFn = fn(&mut ChaCha8Rng, &Ctx) -> Result<Outcome>;

struct CheckDef {
    name: &'static str,
    suite: Suite,
    run: CheckFn,
}

const CHECKS: &[CheckDef] = &[
    CheckDef { name: "quantile.lemma", suite: Suite::Quantile, run: quantile_lemma },
    CheckDef { name: "quantile.negate", suite: Suite::Quantile, run: quantile_negate },
    CheckDef { name: "quantile.translate_mean", suite: Suite::Quantile, run: quantile_translate_mean },
    CheckDef { name: "quantile.roundtrip", suite: Suite::Quantile, run: quantile_roundtrip },
    CheckDef { name: "quantile.concave_realization", suite: Suite::Quantile, run: quantile_concave_realization },
    CheckDef { name: "orders.reflexivity", suite: Suite::Orders, run: orders_reflexivity },
    CheckDef { name: "orders.transitivity", suite: Suite::Orders, run: orders_transitivity },
    CheckDef { name: "orders.implication", suite: Suite::Orders, run: orders_implication },
    CheckDef { name: "orders.cx_definition", suite: Suite::Orders, run: orders_cx_definition },
    CheckDef { name: "orders.icv_reflection", suite: Suite::Orders, run: orders_icv_reflection },
    CheckDef { name: "orders.disp_characterizations", suite: Suite::Orders, run: orders_disp_characterizations },
    CheckDef { name: "orders.disp_translation", suite: Suite::Orders, run: orders_disp_translation },
    CheckDef { name: "orders.grid_oracle", suite: Suite::Orders, run: orders_grid_oracle },
    CheckDef { name: "lattice.upper_bound", suite: Suite::Lattice, run: lattice_upper_bound },
    CheckDef { name: "lattice.least", suite: Suite::Lattice, run: lattice_least },
    CheckDef { name: "lattice.associativity", suite: Suite::Lattice, run: lattice_associativity },
    CheckDef { name: "lattice.envelope_oracle", suite: Suite::Lattice, run: lattice_envelope_oracle },
    CheckDef { name: "lattice.tv_oracle", suite: Suite::Lattice, run: lattice_tv_oracle },
    CheckDef { name: "lattice.tv_additivity", suite: Suite::Lattice, run: lattice_tv_additivity },
    CheckDef { name: "lattice.tv_left_continuity", suite: Suite::Lattice, run: lattice_tv_left_continuity },
    CheckDef { name: "lattice.underline_s", suite: Suite::Lattice, run: lattice_underline_s },
    CheckDef { name: "lattice.disp_anchor", suite: Suite::Lattice, run: lattice_disp_anchor },
    CheckDef { name: "lattice.cx_mean", suite: Suite::Lattice, run: lattice_cx_mean },
    CheckDef { name: "maxitive.penalty_st", suite: Suite::Maxitive, run: maxitive_penalty_st },
    CheckDef { name: "maxitive.penalty_icx", suite: Suite::Maxitive, run: maxitive_penalty_icx },
    CheckDef { name: "maxitive.penalty_icv", suite: Suite::Maxitive, run: maxitive_penalty_icv },
    CheckDef { name: "maxitive.g_family_st", suite: Suite::Maxitive, run: maxitive_g_st },
    CheckDef { name: "maxitive.g_family_icx", suite: Suite::Maxitive, run: maxitive_g_icx },
    CheckDef { name: "maxitive.g_family_icv", suite: Suite::Maxitive, run: maxitive_g_icv },
    CheckDef { name: "maxitive.var", suite: Suite::Maxitive, run: maxitive_var },
    CheckDef { name: "maxitive.translation", suite: Suite::Maxitive, run: maxitive_translation },
    CheckDef { name: "maxitive.monotonicity", suite: Suite::Maxitive, run: maxitive_monotonicity },
    CheckDef { name: "maxitive.alpha_min", suite: Suite::Maxitive, run: maxitive_alpha_min },
    CheckDef { name: "maxitive.es_bounds", suite: Suite::Maxitive, run: maxitive_es_bounds },
    CheckDef { name: "maxitive.g_consistency", suite: Suite::Maxitive, run: maxitive_g_consistency },
];

/// Names of all registered checks in `suite`, in run order.
pub fn check_names(suite: Suite) -> Vec<&'static str> {
    CHECKS
        .iter()
        .filter(|c| suite.contains(c.suite))
        .map(|c| c.name)
        .collect()
}

/// Runs one named check for `trials` seeded trials. A library error inside
/// a trial counts as a violation.
pub fn run_check(name: &str, trials: u64, seed: u64, tol: f64, exec: Execution) -> Result<CheckReport> {
    let def = CHECKS
        .iter()
        .find(|c| c.name == name)
        .ok_or_else(|| Error::UnknownCheck(name.to_string()))?;
    let ctx = Ctx {
        tol,
        gen: Generator::default(),
    };
    let stream = derive_seed(seed, name);
    let outcomes = exec.map_trials(trials, |t| {
        let mut rng = trial_rng(stream, t);
        (def.run)(&mut rng, &ctx)
    });
    let mut report = CheckReport::new(name, trials);
    for (t, outcome) in (0..trials).zip(outcomes) {
        let outcome = outcome.unwrap_or_else(|e| Outcome {
            deviation: f64::INFINITY,
            failure: Some(Failure {
                kind: format!("error: {e}"),
                deviation: f64::INFINITY,
                distributions: Vec::new(),
                values: Vec::new(),
            }),
        });
        let counterexample = outcome.failure.map(|f| Counterexample {
            trial: t,
            kind: f.kind,
            deviation: f.deviation,
            distributions: f.distributions,
            values: f.values,
        });
        report.record(outcome.deviation, counterexample);
    }
    Ok(report)
}

/// Runs every check of `suite` and aggregates the reports.
pub fn run_suite(suite: Suite, trials: u64, seed: u64, tol: f64, exec: Execution) -> Report {
    let checks = check_names(suite)
        .into_iter()
        .map(|name| run_check(name, trials, seed, tol, exec).expect("registered check"))
        .collect();
    Report::from_checks(suite.as_str(), trials, seed, checks)
}

fn family_of(members: Vec<StepQuantile>) -> Result<QuantileFamily> {
    QuantileFamily::new(members)
}

fn small_generator() -> Generator {
    Generator::with_support(4)
}

/// Levels around every breakpoint plus a regular grid, kept away from 0 and 1.
fn probe_levels<R: Rng>(rng: &mut R, q: &StepQuantile) -> Vec<f64> {
    let mut ts: Vec<f64> = (1..40).map(|i| i as f64 / 40.0).collect();
    for &b in q.interior_breakpoints() {
        ts.extend([b - 1e-7, b, b + 1e-7]);
    }
    ts.extend((0..5).map(|_| rng.gen_range(0.0..1.0)));
    ts.retain(|&t| t > 1e-6 && t < 1.0 - 1e-6);
    ts
}

fn probe_points(q: &StepQuantile) -> Vec<f64> {
    let vals = q.values();
    let mut xs = Vec::with_capacity(4 * vals.len() + 2);
    for w in vals.windows(2) {
        xs.push(0.5 * (w[0] + w[1]));
    }
    for &v in vals {
        xs.extend([v - 1e-6, v, v + 1e-6]);
    }
    xs.push(q.lowest() - 1.0);
    xs.push(q.highest() + 1.0);
    xs
}

fn quantile_lemma(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Outcome> {
    let q = ctx.gen.quantile(rng);
    let eps = 1e-9;
    let ts = probe_levels(rng, &q);
    let xs = probe_points(&q);
    let fail = |kind: &str, vals: &[f64]| Ok(Outcome::expect(false, kind, &[&q], vals));
    for &t in &ts {
        let (qt, pt) = (q.at(t), q.at_plus(t));
        if qt > pt {
            return fail("q_le_qplus", &[t]);
        }
        if q.at(t - eps) > qt || q.at_plus(t - eps) > qt {
            return fail("left_limit", &[t]);
        }
        if q.at(t + eps) < pt || q.at_plus(t + eps) < pt {
            return fail("right_limit", &[t]);
        }
        if q.at(t - eps) != qt && !q.breakpoints().iter().any(|&b| t - eps < b && b < t) {
            return fail("left_continuity", &[t]);
        }
        if q.at_plus(t + eps) != pt && !q.breakpoints().iter().any(|&b| t < b && b <= t + eps) {
            return fail("right_continuity", &[t]);
        }
        if q.cdf(qt) < t {
            return fail("cdf_of_quantile", &[t]);
        }
        for &x in &xs {
            if (qt <= x) != (t <= q.cdf(x)) {
                return fail("galois_q", &[t, x]);
            }
            if (x <= pt) != (t >= q.cdf_left(x)) {
                return fail("galois_qplus", &[t, x]);
            }
        }
    }
    for &x in &xs {
        let f = q.cdf(x);
        if f > 0.0 && q.at(f) > x {
            return fail("quantile_of_cdf", &[x]);
        }
    }
    let mut nodes: Vec<f64> = q.interior_breakpoints().to_vec();
    nodes.extend((0..3).map(|_| rng.gen_range(1e-6..1.0 - 1e-6)));
    for &s in &nodes {
        for &r in &nodes {
            let h = q.at(r) - q.at_plus(s);
            for ds in [-eps, 0.0, eps] {
                for dr in [-eps, 0.0, eps] {
                    let (s2, r2) = (s + ds, r + dr);
                    if !(0.0 < s2 && s2 < 1.0 && 0.0 < r2 && r2 <= 1.0) {
                        continue;
                    }
                    if q.at(r2) - q.at_plus(s2) < h {
                        return fail("lower_semicontinuity", &[s, r, s2, r2]);
                    }
                }
            }
        }
    }
    Ok(Outcome::ok())
}

fn quantile_negate(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Outcome> {
    let q = ctx.gen.quantile(rng);
    let n = negate(q.values(), &q.masses())?;
    let near = |u: f64| {
        q.breakpoints()
            .iter()
            .chain(n.breakpoints())
            .any(|&b| (u - b).abs() < 1e-6 || (1.0 - u - b).abs() < 1e-6)
    };
    let mut out = Outcome::ok();
    for i in 1..50 {
        let u = i as f64 / 50.0;
        if near(u) {
            continue;
        }
        let dev = (n.at(u) + q.at_plus(1.0 - u)).abs();
        out = out.and(Outcome::bounded(dev, 0.0, "negate", &[&q, &n], &[u]));
    }
    Ok(out)
}

fn quantile_translate_mean(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Outcome> {
    let q = ctx.gen.quantile(rng);
    let c = round_to(rng.gen_range(-5.0..=5.0), ctx.gen.resolution);
    let dev = (q.translate(c).mean() - q.mean() - c).abs();
    Ok(Outcome::bounded(dev, EXACT, "translate_mean", &[&q], &[c]))
}

fn quantile_roundtrip(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Outcome> {
    let (values, weights) = ctx.gen.atoms(rng);
    let q = StepQuantile::from_samples(&values, Some(&weights))?;
    let back = quantile_from_integrated(&q.integrated(), ctx.tol)?;
    let mut out = Outcome::expect(back == q, "integrated_roundtrip", &[&q, &back], &[]);
    let json = serde_json::to_string(&q).map_err(|e| Error::Json(e.to_string()))?;
    let parsed: StepQuantile = serde_json::from_str(&json).map_err(|e| Error::Json(e.to_string()))?;
    out = out.and(Outcome::expect(parsed == q, "json_roundtrip", &[&q, &parsed], &[]));
    let samples = DistributionJson::Samples {
        values,
        weights: Some(weights),
    };
    let json = serde_json::to_string(&samples).map_err(|e| Error::Json(e.to_string()))?;
    let ingested: StepQuantile = serde_json::from_str(&json).map_err(|e| Error::Json(e.to_string()))?;
    Ok(out.and(Outcome::expect(ingested == q, "samples_roundtrip", &[&q, &ingested], &[])))
}

fn quantile_concave_realization(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Outcome> {
    let q = ctx.gen.quantile(rng);
    let knots = q.breakpoints().iter().copied();
    let mut all = vec![0.0];
    all.extend(knots);
    let values: Vec<f64> = all.iter().map(|&u| q.integrated().eval(u)).collect();
    let f = PiecewiseLinearFn::new(all.clone(), values)?;
    let r = quantile_from_integrated(&f, ctx.tol)?;
    let g = r.integrated();
    let dev = all
        .iter()
        .map(|&u| (g.eval(u) - f.eval(u)).abs())
        .fold(0.0, f64::max);
    Ok(Outcome::bounded(dev, EXACT, "concave_realization", &[&q, &r], &[]))
}

fn random_pair<R: Rng>(
    rng: &mut R,
    gen: &Generator,
    rel: OrderRelation,
) -> (StepQuantile, StepQuantile) {
    if rng.gen_bool(0.5) {
        gen.ordered_pair(rng, rel)
    } else if rel == OrderRelation::Cx {
        (gen.centered(rng), gen.centered(rng))
    } else {
        (gen.quantile(rng), gen.quantile(rng))
    }
}

fn orders_reflexivity(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Outcome> {
    let a = ctx.gen.quantile(rng);
    let mut out = Outcome::ok();
    for rel in OrderRelation::ALL {
        let v = check_order(rel, &a, &a, ctx.tol);
        out = out.and(Outcome::expect(v.holds, rel.as_str(), &[&a], &[v.margin]));
    }
    Ok(out)
}

fn orders_transitivity(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Outcome> {
    let mut out = Outcome::ok();
    for rel in OrderRelation::ALL {
        let (a, b) = ctx.gen.ordered_pair(rng, rel);
        let c = ctx.gen.dominating(rng, rel, &b);
        let ab = check_order(rel, &a, &b, ctx.tol).holds;
        let bc = check_order(rel, &b, &c, ctx.tol).holds;
        let ac = check_order(rel, &a, &c, ctx.tol);
        out = out.and(Outcome::expect(!(ab && bc) || ac.holds, rel.as_str(), &[&a, &b, &c], &[ac.margin]));
    }
    Ok(out)
}

fn orders_implication(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Outcome> {
    let (a, b) = random_pair(rng, &ctx.gen, OrderRelation::St);
    if !check_order(OrderRelation::St, &a, &b, ctx.tol).holds {
        return Ok(Outcome::ok());
    }
    let icx = check_order(OrderRelation::Icx, &a, &b, ctx.tol);
    let icv = check_order(OrderRelation::Icv, &a, &b, ctx.tol);
    Ok(Outcome::expect(icx.holds, "st_implies_icx", &[&a, &b], &[icx.margin])
        .and(Outcome::expect(icv.holds, "st_implies_icv", &[&a, &b], &[icv.margin])))
}

fn orders_cx_definition(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Outcome> {
    let (a, b) = random_pair(rng, &ctx.gen, OrderRelation::Cx);
    let cx = check_order(OrderRelation::Cx, &a, &b, ctx.tol);
    let icx = check_order(OrderRelation::Icx, &a, &b, ctx.tol);
    let same_mean = (a.mean() - b.mean()).abs() <= ctx.tol;
    Ok(Outcome::expect(
        cx.holds == (icx.holds && same_mean),
        "cx_definition",
        &[&a, &b],
        &[cx.margin, icx.margin],
    ))
}

fn orders_icv_reflection(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Outcome> {
    let (a, b) = random_pair(rng, &ctx.gen, OrderRelation::Icv);
    let na = negate(a.values(), &a.masses())?;
    let nb = negate(b.values(), &b.masses())?;
    let forward = check_order(OrderRelation::Icv, &a, &b, ctx.tol);
    let mirrored = check_order(OrderRelation::Icx, &nb, &na, ctx.tol);
    let backward = check_order(OrderRelation::Icv, &b, &a, ctx.tol);
    let mirrored_back = check_order(OrderRelation::Icx, &na, &nb, ctx.tol);
    Ok(Outcome::expect(
        forward.holds == mirrored.holds && backward.holds == mirrored_back.holds,
        "icv_reflection",
        &[&a, &b],
        &[forward.margin, mirrored.margin],
    ))
}

fn orders_disp_characterizations(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Outcome> {
    let (a, b) = random_pair(rng, &ctx.gen, OrderRelation::Disp);
    let verdict = check_order(OrderRelation::Disp, &a, &b, ctx.tol);
    let (inc, upper) = disp_characterizations(&a, &b, &GridSpec::envelope(), ctx.tol);
    Ok(Outcome::expect(
        inc == upper && upper == verdict.holds,
        "disp_characterizations",
        &[&a, &b],
        &[verdict.margin],
    ))
}

fn orders_disp_translation(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Outcome> {
    let (a, b) = random_pair(rng, &ctx.gen, OrderRelation::Disp);
    let c = round_to(rng.gen_range(-5.0..=5.0), ctx.gen.resolution);
    let d = round_to(rng.gen_range(-5.0..=5.0), ctx.gen.resolution);
    let base = check_order(OrderRelation::Disp, &a, &b, ctx.tol);
    let moved = check_order(OrderRelation::Disp, &a.translate(c), &b.translate(d), ctx.tol);
    let near_boundary = base.margin.abs() <= 1e-6;
    Ok(Outcome::expect(
        base.holds == moved.holds || near_boundary,
        "disp_translation",
        &[&a, &b],
        &[c, d, base.margin, moved.margin],
    ))
}

fn orders_grid_oracle(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Outcome> {
    let mut out = Outcome::ok();
    for rel in OrderRelation::ALL {
        let (a, b) = random_pair(rng, &ctx.gen, rel);
        let verdict = check_order(rel, &a, &b, ctx.tol);
        let grid = match rel {
            OrderRelation::Disp => GridSpec::envelope(),
            _ => GridSpec::pointwise(),
        };
        let oracle = grid_order_oracle(rel, &a, &b, &grid, ctx.tol);
        let agree = verdict.holds == oracle || verdict.margin.abs() <= 1e-6;
        out = out.and(Outcome::expect(agree, rel.as_str(), &[&a, &b], &[verdict.margin]));
    }
    Ok(out)
}

fn lattice_upper_bound(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Outcome> {
    let mut out = Outcome::ok();
    for rel in OrderRelation::ALL {
        let fam = ctx.gen.family(rng, rel, 5);
        let s = sup_order(rel, &fam, ctx.tol)?;
        for m in fam.members() {
            let v = check_order(rel, m, &s, ctx.tol);
            out = out.and(Outcome::expect(v.holds, rel.as_str(), &[m, &s], &[v.margin]));
        }
    }
    Ok(out)
}

fn lattice_least(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Outcome> {
    let mut out = Outcome::ok();
    for rel in OrderRelation::ALL {
        let fam = ctx.gen.family(rng, rel, 5);
        let s = sup_order(rel, &fam, ctx.tol)?;
        let zeta = ctx.gen.upper_bound(rng, rel, &fam);
        let bounds = fam
            .members()
            .iter()
            .all(|m| check_order(rel, m, &zeta, ctx.tol).holds);
        if !bounds {
            continue;
        }
        let v = check_order(rel, &s, &zeta, ctx.tol);
        out = out.and(Outcome::expect(v.holds, rel.as_str(), &[&s, &zeta], &[v.margin]));
    }
    Ok(out)
}

fn equivalent(rel: OrderRelation, a: &StepQuantile, b: &StepQuantile, tol: f64) -> bool {
    check_order(rel, a, b, tol).holds && check_order(rel, b, a, tol).holds
}

fn lattice_associativity(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Outcome> {
    let mut out = Outcome::ok();
    for rel in OrderRelation::ALL {
        let fam = ctx.gen.family(rng, rel, 5);
        let s = sup_order(rel, &fam, ctx.tol)?;
        let mut shuffled = fam.members().to_vec();
        shuffled.shuffle(rng);
        let p = sup_order(rel, &family_of(shuffled)?, ctx.tol)?;
        let kind = format!("{rel}_permutation");
        out = out.and(Outcome::expect(p == s, &kind, &[&s, &p], &[]));
        if fam.len() < 2 {
            continue;
        }
        let k = rng.gen_range(1..fam.len());
        let (head, tail) = fam.members().split_at(k);
        let s1 = sup_order(rel, &family_of(head.to_vec())?, ctx.tol)?;
        let s2 = sup_order(rel, &family_of(tail.to_vec())?, ctx.tol)?;
        let nested = sup_order(rel, &family_of(vec![s1, s2])?, ctx.tol)?;
        let same = if rel == OrderRelation::St {
            nested == s
        } else {
            equivalent(rel, &nested, &s, ctx.tol)
        };
        let kind = format!("{rel}_rebracket");
        out = out.and(Outcome::expect(same, &kind, &[&s, &nested], &[]));
    }
    Ok(out)
}

fn lattice_envelope_oracle(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Outcome> {
    let fam = ctx.gen.family(rng, OrderRelation::Icx, 2);
    let s = sup_order(OrderRelation::Icx, &fam, ctx.tol)?;
    let fns: Vec<PiecewiseLinearFn> = fam.members().iter().map(|m| m.integrated()).collect();
    let env = envelope_oracle(&fns, &GridSpec::envelope())?;
    let integrated = s.integrated();
    let dev = env
        .iter()
        .map(|&(x, y)| (integrated.eval(x) - y).abs())
        .fold(0.0, f64::max);
    let members: Vec<&StepQuantile> = fam.members().iter().collect();
    Ok(Outcome::bounded(dev, 1e-9, "envelope_oracle", &members, &[]))
}

fn tv_levels<R: Rng>(rng: &mut R, grid: &[f64]) -> Vec<f64> {
    let mut ts: Vec<f64> = grid.to_vec();
    let mut prev = 0.0;
    for &w in grid {
        ts.push(0.5 * (prev + w));
        prev = w;
    }
    ts.push(0.5 * (prev + 1.0));
    ts.push(1.0);
    ts.extend((0..3).map(|_| rng.gen_range(1e-6..1.0)));
    ts
}

fn lattice_tv_oracle(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Outcome> {
    let fam = small_generator().family(rng, OrderRelation::Disp, 3);
    let s = sup_order(OrderRelation::Disp, &fam, ctx.tol)?;
    let members: Vec<&StepQuantile> = fam.members().iter().collect();
    let mut out = Outcome::ok();
    for t in tv_levels(rng, &fam.merged_grid()) {
        let oracle = tv_partition_oracle(&fam, 0.0, t, 12, PartitionSum::Left)?;
        let dev = (s.at(t) - oracle).abs();
        out = out.and(Outcome::bounded(dev, EXACT, "sup_vs_oracle", &members, &[t, s.at(t), oracle]));
    }
    let mut uv = [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)];
    uv.sort_by(f64::total_cmp);
    if uv[0] < uv[1] {
        let tv = total_variation(&fam, uv[0], uv[1])?;
        let oracle = tv_partition_oracle(&fam, uv[0], uv[1], 12, PartitionSum::Left)?;
        out = out.and(Outcome::bounded(
            (tv - oracle).abs(),
            EXACT,
            "tv_vs_oracle",
            &members,
            &[uv[0], uv[1], tv, oracle],
        ));
    }
    Ok(out)
}

fn lattice_tv_additivity(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Outcome> {
    let fam = ctx.gen.family(rng, OrderRelation::Disp, 5);
    let grid = fam.merged_grid();
    let pick = |rng: &mut ChaCha8Rng| {
        if !grid.is_empty() && rng.gen_bool(0.3) {
            grid[rng.gen_range(0..grid.len())]
        } else {
            rng.gen_range(1e-6..1.0)
        }
    };
    let (mut u, mut v) = (pick(rng), pick(rng));
    if u > v {
        std::mem::swap(&mut u, &mut v);
    }
    if u == v {
        return Ok(Outcome::ok());
    }
    let whole = total_variation(&fam, 0.0, v)?;
    let parts = total_variation(&fam, 0.0, u)? + total_variation(&fam, u, v)?;
    let members: Vec<&StepQuantile> = fam.members().iter().collect();
    Ok(Outcome::bounded((whole - parts).abs(), EXACT, "tv_additivity", &members, &[u, v]))
}

fn lattice_tv_left_continuity(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Outcome> {
    let fam = ctx.gen.family(rng, OrderRelation::Disp, 5);
    let members: Vec<&StepQuantile> = fam.members().iter().collect();
    let grid = fam.merged_grid();
    let mut out = Outcome::ok();
    let mut prev_w = 0.0;
    for &w in &grid {
        let gap = w - prev_w;
        prev_w = w;
        if gap < 1e-12 {
            continue;
        }
        let at = total_variation(&fam, 0.0, w)?;
        let before = total_variation(&fam, 0.0, w - (0.5 * gap).min(1e-9))?;
        out = out.and(Outcome::bounded((at - before).abs(), EXACT, "left_continuity", &members, &[w]));
    }
    let mut ts = tv_levels(rng, &grid);
    ts.sort_by(f64::total_cmp);
    let mut prev = 0.0;
    for &t in &ts {
        let cur = total_variation(&fam, 0.0, t)?;
        out = out.and(Outcome::bounded(prev - cur, EXACT, "non_decreasing", &members, &[t]));
        prev = cur;
    }
    Ok(out)
}

fn lattice_underline_s(rng: &mut ChaCha8Rng, _ctx: &Ctx) -> Result<Outcome> {
    let fam = small_generator().family(rng, OrderRelation::Disp, 3);
    let grid = fam.merged_grid();
    let mut u = if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..1.0) };
    if grid.contains(&u) {
        u = 0.0;
    }
    let v = rng.gen_range(u..=1.0);
    if v <= u {
        return Ok(Outcome::ok());
    }
    let tv = total_variation(&fam, u, v)?;
    let oracle = tv_partition_oracle(&fam, u, v, 12, PartitionSum::Upper)?;
    let members: Vec<&StepQuantile> = fam.members().iter().collect();
    Ok(Outcome::bounded((tv - oracle).abs(), EXACT, "underline_s", &members, &[u, v, tv, oracle]))
}

fn lattice_disp_anchor(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Outcome> {
    let fam = ctx.gen.family(rng, OrderRelation::Disp, 5);
    let s = sup_order(OrderRelation::Disp, &fam, ctx.tol)?;
    Ok(Outcome::expect(s.lowest() == 0.0, "disp_anchor", &[&s], &[s.lowest()]))
}

fn lattice_cx_mean(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Outcome> {
    let fam = ctx.gen.family(rng, OrderRelation::Cx, 5);
    let s = sup_order(OrderRelation::Cx, &fam, ctx.tol)?;
    let m = fam.members()[0].mean();
    Ok(Outcome::bounded((s.mean() - m).abs(), EXACT, "cx_mean", &[&s], &[s.mean(), m]))
}

fn maxitivity_outcome(
    relation: OrderRelation,
    spec: &FunctionalSpec,
    rng: &mut ChaCha8Rng,
    ctx: &Ctx,
    tol: f64,
) -> Result<Outcome> {
    let (deviation, cex) = maxitivity_trial(relation, spec, rng, 0, 5, &ctx.gen, tol)?;
    Ok(Outcome {
        deviation,
        failure: cex.map(|c| Failure {
            kind: c.kind,
            deviation: c.deviation,
            distributions: c.distributions,
            values: c.values,
        }),
    })
}

fn maxitive_penalty_st(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Outcome> {
    let curve = ctx.gen.curve(rng, OrderRelation::St);
    maxitivity_outcome(OrderRelation::St, &FunctionalSpec::PenaltySt { curve }, rng, ctx, ctx.tol)
}

fn maxitive_penalty_icx(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Outcome> {
    let curve = ctx.gen.concave_curve(rng);
    maxitivity_outcome(OrderRelation::Icx, &FunctionalSpec::PenaltyIcx { curve }, rng, ctx, ctx.tol)
}

fn maxitive_penalty_icv(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Outcome> {
    let curve = ctx.gen.curve(rng, OrderRelation::Icv);
    maxitivity_outcome(OrderRelation::Icv, &FunctionalSpec::PenaltyIcv { curve }, rng, ctx, ctx.tol)
}

fn g_family(rng: &mut ChaCha8Rng, ctx: &Ctx, relation: OrderRelation) -> Result<Outcome> {
    let family = ctx.gen.penalty_family(rng, relation);
    let spec = FunctionalSpec::GFamily { family, relation };
    maxitivity_outcome(relation, &spec, rng, ctx, ctx.tol)
}

fn maxitive_g_st(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Outcome> {
    g_family(rng, ctx, OrderRelation::St)
}

fn maxitive_g_icx(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Outcome> {
    g_family(rng, ctx, OrderRelation::Icx)
}

fn maxitive_g_icv(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Outcome> {
    g_family(rng, ctx, OrderRelation::Icv)
}

fn random_level<R: Rng>(rng: &mut R) -> f64 {
    rng.gen_range(1e-3..1.0 - 1e-3)
}

fn maxitive_var(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Outcome> {
    let u = random_level(rng);
    maxitivity_outcome(OrderRelation::St, &FunctionalSpec::Var { u }, rng, ctx, EXACT)
}

fn translation_specs<R: Rng>(rng: &mut R, gen: &Generator) -> Vec<FunctionalSpec> {
    let u = random_level(rng);
    vec![
        FunctionalSpec::Var { u },
        FunctionalSpec::Es { u },
        FunctionalSpec::EsBar { u },
        FunctionalSpec::PenaltySt {
            curve: gen.curve(rng, OrderRelation::St),
        },
        FunctionalSpec::PenaltyIcx {
            curve: gen.concave_curve(rng),
        },
        FunctionalSpec::PenaltyIcv {
            curve: gen.curve(rng, OrderRelation::Icv),
        },
    ]
}

fn maxitive_translation(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Outcome> {
    let q = ctx.gen.quantile(rng);
    let c = round_to(rng.gen_range(-5.0..=5.0), ctx.gen.resolution);
    let moved = q.translate(c);
    let mut out = Outcome::ok();
    for spec in translation_specs(rng, &ctx.gen) {
        let base = spec.evaluate(&q, ctx.tol)?;
        let shifted = spec.evaluate(&moved, ctx.tol)?;
        let dev = if base == shifted && base.is_infinite() {
            0.0
        } else {
            (shifted - base - c).abs()
        };
        out = out.and(Outcome::bounded(dev, EXACT, spec.name(), &[&q], &[c, base, shifted]));
    }
    Ok(out)
}

fn maxitive_monotonicity(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Outcome> {
    let mut out = Outcome::ok();
    for spec in translation_specs(rng, &ctx.gen) {
        let rel = spec.native_relation();
        let (a, b) = ctx.gen.ordered_pair(rng, rel);
        let (pa, pb) = (spec.evaluate(&a, ctx.tol)?, spec.evaluate(&b, ctx.tol)?);
        let dev = if pa <= pb { 0.0 } else { pa - pb };
        out = out.and(Outcome::bounded(dev, EXACT, spec.name(), &[&a, &b], &[pa, pb]));
    }
    Ok(out)
}

fn maxitive_alpha_min(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Outcome> {
    let fam = ctx.gen.family(rng, OrderRelation::St, 5);
    let curve = alpha_min_from_set(OrderRelation::St, &fam, ctx.tol)?.curve().clone();
    let spec = FunctionalSpec::PenaltySt { curve };
    let members: Vec<&StepQuantile> = fam.members().iter().collect();
    let mut out = Outcome::ok();
    for m in fam.members() {
        let v = spec.evaluate(m, ctx.tol)?;
        out = out.and(Outcome::bounded(v, EXACT, "member", &members, &[v]));
    }
    let s = sup_order(OrderRelation::St, &fam, ctx.tol)?;
    let v = spec.evaluate(&s, ctx.tol)?;
    Ok(out.and(Outcome::bounded(v.abs(), EXACT, "supremum", &members, &[v])))
}

fn maxitive_es_bounds(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Outcome> {
    let q = ctx.gen.quantile(rng);
    let mut us: Vec<f64> = (1..20).map(|i| i as f64 / 20.0).collect();
    us.push(random_level(rng));
    us.sort_by(f64::total_cmp);
    let (mean, top, bottom) = (q.mean(), q.highest(), q.lowest());
    let mut out = Outcome::ok();
    let mut prev = f64::NEG_INFINITY;
    let mut prev_bar = f64::INFINITY;
    for u in us {
        let e = es(&q, u)?;
        let eb = es_bar(&q, u)?;
        let dev = (mean - e).max(e - top).max(prev - e).max(0.0);
        out = out.and(Outcome::bounded(dev, EXACT, "es_bounds", &[&q], &[u, e]));
        let dev = (eb - mean).max(bottom - eb).max(eb - prev_bar).max(0.0);
        out = out.and(Outcome::bounded(dev, EXACT, "es_bar_bounds", &[&q], &[u, eb]));
        prev = e;
        prev_bar = eb;
    }
    Ok(out)
}

fn maxitive_g_consistency(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<Outcome> {
    let q = ctx.gen.quantile(rng);
    let curve = ctx.gen.curve(rng, OrderRelation::St);
    let family = PenaltyFamily::new(vec![0.0], vec![curve.clone()], ctx.tol)?;
    let g = g_transform_eval(&family, &q, OrderRelation::St, ctx.tol)?;
    let p = FunctionalSpec::PenaltySt { curve }.evaluate(&q, ctx.tol)?;
    let expected = if p <= ctx.tol { 0.0 } else { f64::INFINITY };
    Ok(Outcome::expect(g == expected, "g_consistency", &[&q], &[g, p]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_parse() {
        for s in Suite::ALL {
            assert_eq!(s.as_str().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn registry_names_are_unique() {
        let names = check_names(Suite::All);
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), names.len());
        assert!(run_check("missing", 1, 0, 1e-9, Execution::Sequential).is_err());
    }

    #[test]
    fn every_check_passes_a_few_trials() {
        for name in check_names(Suite::All) {
            let r = run_check(name, 20, 3, 1e-9, Execution::Sequential).unwrap();
            assert!(r.passed(), "{name}: {:?}", r.counterexample);
        }
    }

    #[test]
    fn outcome_keeps_first_failure() {
        let a = Outcome::bounded(2.0, 1.0, "first", &[], &[]);
        let b = Outcome::bounded(3.0, 1.0, "second", &[], &[]);
        let c = a.and(b);
        assert_eq!(c.deviation, 3.0);
        assert_eq!(c.failure.unwrap().kind, "first");
        assert!(Outcome::ok().failure.is_none());
    }
}
