//! Scheme derivation: decomposition, branch consistency and trivial cases.

use lowreg::cli_experiments::fit_slope;
use lowreg::operator_algebra::{coef, OperatorExpr, OperatorSet};
use lowreg::scheme_engine::{
    build_scheme, dominant_decomposition, duhamel_residual, enumerate_trees, pi_exact, pi_term, EquationSpec, Evaluator,
    RegularityDomain,
};
use lowreg::spectral_backend::{smooth_data, Field, Grid};
use lowreg::tree_core::{graft, DecoratedTree, PlusLabel};
use lowreg::Error;
use num_complex::Complex64;
use num_rational::Rational64;

fn o() -> PlusLabel {
    PlusLabel::new("o")
}

fn gp_inputs(n: usize) -> (std::sync::Arc<Grid>, lowreg::scheme_engine::Inputs) {
    let g = Grid::periodic(n).unwrap();
    let u = smooth_data(4, &g, 1.0);
    let v = smooth_data(5, &g, 1.0).map(|z| Complex64::new(z.re, 0.0));
    let eq = EquationSpec::gp();
    let inputs = eq.inputs(&u, Some(&v));
    (g, inputs)
}

#[test]
fn cubic_tree_decomposes_into_oscillatory_and_unit_summands() {
    let eq = EquationSpec::gp();
    let l = OperatorExpr::laplacian().scale(coef(0, 1));
    let parts = dominant_decomposition(&eq, &o(), &DecoratedTree::leaf(0), 0, RegularityDomain::new(1.0)).unwrap();
    assert_eq!(parts.len(), 2);
    assert_eq!(parts[0].subtree, Some(graft(&o(), &DecoratedTree::leaf(0))));
    assert_eq!(parts[0].dominant, [-l.clone(), l].into_iter().collect::<OperatorSet>());
    assert!(parts[1].subtree.is_none() && parts[1].dominant.is_empty());
}

#[test]
fn fully_taylor_expanded_tree_has_a_single_unit_summand() {
    let eq = EquationSpec::gp();
    let parts = dominant_decomposition(&eq, &o(), &DecoratedTree::leaf(0), 0, RegularityDomain::new(10.0)).unwrap();
    assert_eq!(parts.len(), 1);
    assert!(parts[0].subtree.is_none());
}

#[test]
fn decomposition_resums_on_second_order_trees() {
    let eq = EquationSpec::gp();
    let (g, inputs) = gp_inputs(32);
    let dom = RegularityDomain::new(2.0);
    for t in enumerate_trees(&eq, 2, &o()).unwrap() {
        let Some(whole) = pi_term(&eq, &o(), &t, 1, dom).unwrap() else { continue };
        for tau in [0.3, 0.05] {
            let mut ev = Evaluator::new(g.clone(), tau);
            let want = ev.eval(&whole, &inputs).unwrap();
            let mut got = Field::zeros(&g);
            for p in dominant_decomposition(&eq, &o(), &t, 1, dom).unwrap() {
                got = got.add(&ev.eval(&p.term, &inputs).unwrap());
            }
            let d = got.sub(&want).l2_norm();
            assert!(d <= 1e-12 * want.l2_norm().max(1.0), "{t} at τ = {tau}: {d:e}");
        }
    }
}

#[test]
fn decomposition_rejects_operator_outer_layer() {
    let eq = EquationSpec::sg(Rational64::from_integer(1));
    let r = dominant_decomposition(&eq, &o(), &DecoratedTree::leaf(0), 0, RegularityDomain::new(0.75));
    assert!(matches!(r, Err(Error::Unsupported(_))));
}

#[test]
fn resonant_branch_agrees_with_full_taylor_to_local_order() {
    let eq = EquationSpec::gp();
    let (g, inputs) = gp_inputs(32);
    let taus: Vec<f64> = (3..=7).map(|j| 2f64.powi(-j)).collect();
    for t in enumerate_trees(&eq, 2, &o()).unwrap() {
        let a = pi_term(&eq, &o(), &t, 1, RegularityDomain::new(2.0)).unwrap();
        let b = pi_term(&eq, &o(), &t, 1, RegularityDomain::new(10.0)).unwrap();
        let (Some(a), Some(b)) = (a, b) else { continue };
        let d: Vec<f64> = taus
            .iter()
            .map(|&tau| {
                let mut ev = Evaluator::new(g.clone(), tau);
                ev.eval(&a, &inputs).unwrap().sub(&ev.eval(&b, &inputs).unwrap()).l2_norm()
            })
            .collect();
        if d.iter().all(|&x| x < 1e-14) {
            continue;
        }
        let (s, _) = fit_slope(&taus, &d);
        assert!(s >= 2.8, "{t}: slope {s}");
    }
}

#[test]
fn empty_interval_gives_zero() {
    let eq = EquationSpec::gp();
    let (_, inputs) = gp_inputs(16);
    for t in enumerate_trees(&eq, 2, &o()).unwrap() {
        assert_eq!(pi_exact(&eq, &o(), &t, &inputs, 0.0).unwrap().max_abs(), 0.0);
    }
    assert!(duhamel_residual(&eq, &o(), 1, &inputs, 0.0).unwrap().max_abs() < 1e-15);
}

#[test]
fn schemes_report_their_branches() {
    let gp = EquationSpec::gp();
    let s1 = build_scheme(&gp, &o(), 1, RegularityDomain::new(1.0)).unwrap().to_string();
    assert!(s1.contains("resonant"), "{s1}");
    let sg = EquationSpec::sg(Rational64::from_integer(1));
    let low = build_scheme(&sg, &o(), 1, RegularityDomain::new(0.75)).unwrap().to_string();
    assert!(low.contains("resonant, L_dom"), "{low}");
    let high = build_scheme(&sg, &o(), 1, RegularityDomain::new(10.0)).unwrap().to_string();
    assert!(high.contains("full Taylor") && !high.contains("resonant,"), "{high}");
}
