use stochorder::lattice::concave_envelope;
use stochorder::maxitive::{alpha_min_from_set, check_maxitivity, MaxitivityParams, MinimalPenalty};
use stochorder::oracles::{envelope_oracle, grid_order_oracle, tv_partition_oracle, GridSpec, PartitionSum};
use stochorder::{
    build_distribution, check_order, es, es_bar, integrated_quantile, negate, quantile_from_integrated,
    reflected_integrated, sup_order, total_variation, var, Execution, FunctionalSpec, OrderRelation,
    PenaltyCurve, PenaltyFamily, PiecewiseLinearFn, QuantileFamily, StepQuantile,
};

const TOL: f64 = 1e-9;

fn d01() -> StepQuantile {
    build_distribution(&[0.0, 1.0], &[0.5, 0.5]).unwrap()
}

fn dm12() -> StepQuantile {
    build_distribution(&[-1.0, 2.0], &[0.5, 0.5]).unwrap()
}

fn crossing() -> StepQuantile {
    build_distribution(&[-0.5, 1.2], &[0.5, 0.5]).unwrap()
}

fn family(members: &[StepQuantile]) -> QuantileFamily {
    QuantileFamily::new(members.to_vec()).unwrap()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12
}

#[test]
fn building_distributions() {
    let q = d01();
    assert_eq!(q.breakpoints(), &[0.5, 1.0]);
    assert_eq!(q.values(), &[0.0, 1.0]);
    let c = build_distribution(&[3.5], &[1.0]).unwrap();
    assert_eq!(c, StepQuantile::constant(3.5));
    let tied = build_distribution(&[1.0, 1.0, 2.0], &[0.25, 0.25, 0.5]).unwrap();
    assert_eq!(tied.breakpoints(), &[0.5, 1.0]);
    assert_eq!(tied.values(), &[1.0, 2.0]);
    assert!(build_distribution(&[], &[]).is_err());
    assert!(build_distribution(&[1.0], &[0.0]).is_err());
    assert!(build_distribution(&[1.0, 2.0], &[0.5, 0.6]).is_err());
}

#[test]
fn evaluating_quantiles() {
    let q = d01();
    assert_eq!(q.eval(0.5).unwrap(), 0.0);
    assert_eq!(q.eval(0.5 + 1e-6).unwrap(), 1.0);
    assert_eq!(q.eval(1.0).unwrap(), 1.0);
    assert!(q.eval(0.0).is_err());
    assert_eq!(q.eval_plus(0.5).unwrap(), 1.0);
    assert_eq!(q.eval_plus(0.49).unwrap(), 0.0);
    assert_eq!(q.eval_plus(0.0).unwrap(), 0.0);
    assert!(q.eval_plus(1.0).is_err());
    let c = StepQuantile::constant(-2.0);
    assert_eq!(c.eval(0.3).unwrap(), -2.0);
    assert_eq!(c.eval_plus(0.3).unwrap(), -2.0);
}

#[test]
fn distribution_function_and_mean() {
    let q = d01();
    assert_eq!(q.cdf(0.0), 0.5);
    assert_eq!(q.cdf(-1.0), 0.0);
    assert_eq!(q.cdf(1.0), 1.0);
    assert_eq!(q.mean(), 0.5);
    assert_eq!(StepQuantile::constant(4.0).mean(), 4.0);
    assert_eq!(dm12().mean(), 0.5);
}

#[test]
fn translation_and_negation() {
    let t = d01().translate(2.0);
    assert_eq!(t.values(), &[2.0, 3.0]);
    assert_eq!(d01().translate(0.0), d01());
    assert_eq!(StepQuantile::constant(1.0).translate(2.0), StepQuantile::constant(3.0));
    let n = negate(&[0.0, 1.0], &[0.5, 0.5]).unwrap();
    assert_eq!(n.breakpoints(), &[0.5, 1.0]);
    assert_eq!(n.values(), &[-1.0, 0.0]);
    assert_eq!(negate(&[4.0], &[1.0]).unwrap(), StepQuantile::constant(-4.0));
    let back = negate(n.values(), &n.masses()).unwrap();
    assert_eq!(back, d01());
}

#[test]
fn integrated_quantiles() {
    let q = integrated_quantile(&d01());
    assert!(close(q.eval(0.25), 0.5));
    assert!(close(q.eval(0.75), 0.25));
    assert!(close(integrated_quantile(&StepQuantile::constant(2.0)).eval(0.4), 1.2));
    let r = reflected_integrated(&[0.0, 1.0], &[0.5, 0.5]).unwrap();
    assert!(close(r.eval(0.25), 0.25));
    assert!(close(r.eval(0.75), 0.0));
    assert!(close(StepQuantile::constant(2.0).reflected_integrated().eval(0.4), 1.2));
}

#[test]
fn recovering_quantiles_from_integrals() {
    assert_eq!(quantile_from_integrated(&integrated_quantile(&d01()), TOL).unwrap(), d01());
    let f = PiecewiseLinearFn::new(vec![0.0, 0.5, 1.0], vec![0.5, 0.6, 0.0]).unwrap();
    let q = quantile_from_integrated(&f, TOL).unwrap();
    assert_eq!(q.breakpoints(), &[0.5, 1.0]);
    assert!(close(q.values()[0], -0.2));
    assert!(close(q.values()[1], 1.2));
    let line = PiecewiseLinearFn::new(vec![0.0, 1.0], vec![3.0, 0.0]).unwrap();
    assert_eq!(quantile_from_integrated(&line, TOL).unwrap(), StepQuantile::constant(3.0));
    let convex = PiecewiseLinearFn::new(vec![0.0, 0.5, 1.0], vec![0.5, 0.0, 0.0]).unwrap();
    assert!(quantile_from_integrated(&convex, TOL).is_err());
}

#[test]
fn order_checks() {
    let zero = StepQuantile::constant(0.0);
    assert!(check_order(OrderRelation::St, &zero, &d01(), TOL).holds);
    let v = check_order(OrderRelation::St, &d01(), &dm12(), TOL);
    assert!(!v.holds);
    assert!(check_order(OrderRelation::Icx, &d01(), &dm12(), TOL).holds);
    assert!(check_order(OrderRelation::Cx, &d01(), &dm12(), TOL).holds);
    assert!(check_order(OrderRelation::Disp, &StepQuantile::constant(5.0), &d01(), TOL).holds);
}

#[test]
fn suprema() {
    let fam = family(&[d01(), dm12()]);
    let st = sup_order(OrderRelation::St, &fam, TOL).unwrap();
    assert_eq!(st.breakpoints(), &[0.5, 1.0]);
    assert_eq!(st.values(), &[0.0, 2.0]);
    let disp = sup_order(OrderRelation::Disp, &fam, TOL).unwrap();
    assert_eq!(disp.values(), &[0.0, 3.0]);
    let icx = sup_order(OrderRelation::Icx, &family(&[d01(), crossing()]), TOL).unwrap();
    assert_eq!(icx.breakpoints(), &[0.5, 1.0]);
    assert!(close(icx.values()[0], -0.2));
    assert!(close(icx.values()[1], 1.2));
    for rel in OrderRelation::ALL {
        let single = sup_order(rel, &family(&[dm12()]), TOL).unwrap();
        let expected = if rel == OrderRelation::Disp { dm12().anchored() } else { dm12() };
        assert_eq!(single, expected, "{rel}");
    }
}

#[test]
fn envelopes() {
    let qd = integrated_quantile(&d01());
    assert_eq!(concave_envelope(std::slice::from_ref(&qd), TOL).unwrap().values(), qd.values());
    let qm = integrated_quantile(&dm12());
    let env = concave_envelope(&[qd.clone(), qm.clone()], TOL).unwrap();
    for i in 0..=20 {
        let u = i as f64 / 20.0;
        assert!(close(env.eval(u), qm.eval(u)), "u = {u}");
    }
    let qc = integrated_quantile(&crossing());
    let env = concave_envelope(&[qd.clone(), qc.clone()], TOL).unwrap();
    let expected = PiecewiseLinearFn::new(vec![0.0, 0.5, 1.0], vec![0.5, 0.6, 0.0]).unwrap();
    for (x, y) in envelope_oracle(&[qd, qc], &GridSpec::envelope()).unwrap() {
        assert!((y - expected.eval(x)).abs() <= 1e-9, "x = {x}");
        assert!((env.eval(x) - expected.eval(x)).abs() <= 1e-12, "x = {x}");
    }
}

#[test]
fn total_variation_examples() {
    let fam = family(&[d01(), dm12()]);
    assert_eq!(total_variation(&fam, 0.0, 1.0).unwrap(), 3.0);
    assert_eq!(total_variation(&fam, 0.0, 0.5).unwrap(), 0.0);
    let q = build_distribution(&[0.0, 1.0, 3.0], &[0.2, 0.3, 0.5]).unwrap();
    let single = family(std::slice::from_ref(&q));
    assert_eq!(total_variation(&single, 0.0, 1.0).unwrap(), q.highest() - q.lowest());
    let consts = family(&[StepQuantile::constant(1.0), StepQuantile::constant(-4.0)]);
    assert_eq!(total_variation(&consts, 0.0, 1.0).unwrap(), 0.0);
    assert_eq!(tv_partition_oracle(&fam, 0.0, 1.0, 12, PartitionSum::Left).unwrap(), 3.0);
    assert_eq!(tv_partition_oracle(&consts, 0.0, 1.0, 12, PartitionSum::Left).unwrap(), 0.0);
    assert!(total_variation(&fam, 0.5, 0.5).is_err());
}

#[test]
fn grid_oracle_examples() {
    let grid = GridSpec::pointwise();
    let zero = StepQuantile::constant(0.0);
    assert!(grid_order_oracle(OrderRelation::St, &zero, &d01(), &grid, TOL));
    assert!(!grid_order_oracle(OrderRelation::St, &d01(), &dm12(), &grid, TOL));
    let c = StepQuantile::constant(5.0);
    assert!(grid_order_oracle(OrderRelation::Disp, &c, &dm12(), &GridSpec::envelope(), TOL));
}

#[test]
fn risk_functionals() {
    assert_eq!(var(&d01(), 0.75).unwrap(), 1.0);
    assert_eq!(var(&d01().translate(2.0), 0.75).unwrap(), 3.0);
    assert_eq!(es(&d01(), 0.5).unwrap(), 1.0);
    assert_eq!(es(&dm12(), 0.5).unwrap(), 2.0);
    assert_eq!(es_bar(&d01(), 0.5).unwrap(), 0.0);
    assert_eq!(es(&StepQuantile::constant(7.0), 0.1).unwrap(), 7.0);
    assert_eq!(es_bar(&StepQuantile::constant(7.0), 0.1).unwrap(), 7.0);
}

#[test]
fn penalty_forms() {
    let zero = PenaltyCurve::constant(0.0);
    let st = FunctionalSpec::PenaltySt { curve: zero.clone() };
    assert_eq!(st.evaluate(&d01(), TOL).unwrap(), 1.0);
    assert_eq!(st.evaluate(&StepQuantile::constant(-3.0), TOL).unwrap(), -3.0);
    let minus_inf = PenaltyCurve::step_left(vec![0.4], vec![0.0, f64::NEG_INFINITY]).unwrap();
    let st_inf = FunctionalSpec::PenaltySt { curve: minus_inf };
    assert_eq!(st_inf.evaluate(&d01(), TOL).unwrap(), f64::INFINITY);
    let flat = PenaltyCurve::piecewise_linear(vec![0.0, 1.0], vec![0.0, 0.0]).unwrap();
    let icx = FunctionalSpec::PenaltyIcx { curve: flat };
    assert!(close(icx.evaluate(&d01(), TOL).unwrap(), 1.0));
}

#[test]
fn g_transform_examples() {
    let fam = PenaltyFamily::new(
        vec![0.0, 1.0],
        vec![PenaltyCurve::constant(0.0), PenaltyCurve::constant(1.0)],
        TOL,
    )
    .unwrap();
    let spec = FunctionalSpec::GFamily {
        family: fam,
        relation: OrderRelation::St,
    };
    assert_eq!(spec.evaluate(&d01(), TOL).unwrap(), 1.0);
    assert_eq!(spec.evaluate(&StepQuantile::constant(2.0), TOL).unwrap(), f64::INFINITY);
    assert_eq!(spec.evaluate(&StepQuantile::constant(-5.0), TOL).unwrap(), 0.0);
}

#[test]
fn minimal_penalties() {
    let fam = family(&[d01(), dm12()]);
    match alpha_min_from_set(OrderRelation::St, &fam, TOL).unwrap() {
        MinimalPenalty::Curve(c) => {
            assert_eq!(c.eval(0.3), 0.0);
            assert_eq!(c.eval(0.5), 0.0);
            assert_eq!(c.eval(0.7), 2.0);
        }
        other => panic!("unexpected {other:?}"),
    }
    let single = alpha_min_from_set(OrderRelation::St, &family(&[d01()]), TOL).unwrap();
    assert_eq!(single.curve(), &PenaltyCurve::from_quantile(&d01()));
    match alpha_min_from_set(OrderRelation::Disp, &fam, TOL).unwrap() {
        MinimalPenalty::Dispersive { beta } => {
            assert_eq!(beta.eval(0.5), 0.0);
            assert_eq!(beta.eval(0.6), 3.0);
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(alpha_min_from_set(OrderRelation::Cx, &fam, TOL).is_err());
}

#[test]
fn maxitivity_runs() {
    let fam = family(&[d01(), dm12()]);
    let spec = FunctionalSpec::Var { u: 0.7 };
    let s = sup_order(OrderRelation::St, &fam, TOL).unwrap();
    assert_eq!(spec.evaluate(&s, TOL).unwrap(), 2.0);
    let params = MaxitivityParams {
        trials: 50,
        ..MaxitivityParams::default()
    };
    let zero = FunctionalSpec::PenaltySt {
        curve: PenaltyCurve::constant(0.0),
    };
    let report = check_maxitivity(OrderRelation::St, &zero, &params, Execution::default()).unwrap();
    assert_eq!(report.violations, 0);
    assert_eq!(report.max_deviation, 0.0);
    let es_params = MaxitivityParams {
        trials: 1000,
        ..MaxitivityParams::default()
    };
    let es_spec = FunctionalSpec::Es { u: 0.5 };
    let report = check_maxitivity(OrderRelation::Icx, &es_spec, &es_params, Execution::default()).unwrap();
    assert!(report.violations > 0);
    assert!(report.max_deviation > 0.0);
    assert!(check_maxitivity(OrderRelation::St, &es_spec, &params, Execution::default()).is_err());
}

#[test]
fn sequential_and_parallel_agree() {
    let params = MaxitivityParams {
        trials: 40,
        ..MaxitivityParams::default()
    };
    let spec = FunctionalSpec::Es { u: 0.3 };
    let a = check_maxitivity(OrderRelation::Icx, &spec, &params, Execution::Sequential).unwrap();
    let b = check_maxitivity(OrderRelation::Icx, &spec, &params, Execution::default()).unwrap();
    assert_eq!(a, b);
}
