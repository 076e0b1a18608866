//! Hand-coded steppers, the Klein–Gordon transform and the reference solver.

use lowreg::integrators::{
    filter, kg_to_u, reference_solve, reference_solve_with, step_gp1, step_gp1_classical, step_gp2, step_gp2_stab,
    step_sg1, u_to_kg, EngineSpec, SchemeId, Stepper, StepperConfig,
};
use lowreg::operator_algebra::{coef, OperatorExpr};
use lowreg::scheme_engine::EquationKind;
use lowreg::spectral_backend::{phi, rough_data, rough_real_data, smooth_data, Field, Grid};
use lowreg::Error;
use num_complex::Complex64;
use num_rational::Rational64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn one() -> Rational64 {
    Rational64::from_integer(1)
}

fn i_lap() -> OperatorExpr {
    OperatorExpr::laplacian().scale(coef(0, 1))
}

fn total_slope(xs: &[f64], ys: &[f64]) -> f64 {
    (ys[0].ln() - ys[ys.len() - 1].ln()) / (xs[0].ln() - xs[xs.len() - 1].ln())
}

#[test]
fn gp1_on_constants_and_zero() {
    let g = Grid::periodic(8).unwrap();
    let cc = c(0.4, 0.9);
    let tau = 0.2;
    let zero = Field::zeros(&g);
    let u = Field::constant(&g, cc);
    let want = cc - c(0.0, tau) * cc.norm_sqr() * cc;
    for f in [step_gp1(&u, &zero, tau).unwrap(), step_gp1_classical(&u, &zero, tau).unwrap()] {
        assert!(f.sub(&Field::constant(&g, want)).max_abs() < 1e-15);
    }
    assert_eq!(step_gp1_classical(&zero, &zero, tau).unwrap().max_abs(), 0.0);
}

#[test]
fn gp1_single_mode_closed_form() {
    let g = Grid::periodic(16).unwrap();
    let cc = c(0.6, -0.3);
    let tau = 0.15;
    let u = Field::single_mode(&g, 1, cc);
    let got = step_gp1(&u, &Field::zeros(&g), tau).unwrap();
    let coef1 = cc * c(0.0, -tau).exp() - c(0.0, tau) * cc * cc * cc.conj() * c(0.0, -5.0 * tau).exp() * phi(1, c(0.0, 2.0 * tau));
    let want = Field::single_mode(&g, 1, coef1);
    assert!(got.sub(&want).l2_norm() < 1e-14);
}

#[test]
fn gp1_and_classical_differ_at_second_order_on_a_mode() {
    let g = Grid::periodic(16).unwrap();
    let u = Field::single_mode(&g, 2, c(0.5, 0.2));
    let zero = Field::zeros(&g);
    let taus = [0.02, 0.01, 0.005, 0.0025];
    let d: Vec<f64> = taus
        .iter()
        .map(|&t| step_gp1(&u, &zero, t).unwrap().sub(&step_gp1_classical(&u, &zero, t).unwrap()).l2_norm())
        .collect();
    let s = total_slope(&taus, &d);
    assert!((s - 2.0).abs() < 0.1, "slope {s}");
}

#[test]
fn gp2_constants_without_potential() {
    let g = Grid::periodic(8).unwrap();
    let cc = c(-0.5, 0.7);
    let tau = 0.1;
    let m = cc.norm_sqr();
    let got = step_gp2(&Field::constant(&g, cc), &Field::zeros(&g), tau).unwrap();
    let want = cc - c(0.0, tau) * m * cc - 0.5 * tau * tau * cc * m * m;
    assert!(got.sub(&Field::constant(&g, want)).max_abs() < 1e-15);
}

#[test]
fn stabilised_gp2_equals_gp2_on_constants() {
    let g = Grid::periodic(8).unwrap();
    let u = Field::constant(&g, c(0.3, 0.2));
    let v = Field::constant(&g, c(0.7, 0.0));
    let a = step_gp2(&u, &v, 0.1).unwrap();
    for p in [2, 3] {
        assert!(step_gp2_stab(&u, &v, 0.1, p).unwrap().sub(&a).max_abs() < 1e-15);
    }
}

#[test]
fn sine_gordon_keeps_zero() {
    let g = Grid::periodic(16).unwrap();
    let zero = Field::zeros(&g);
    assert_eq!(step_sg1(&zero, one(), 0.1).unwrap().max_abs(), 0.0);
    assert!(matches!(step_sg1(&zero, Rational64::from_integer(0), 0.1), Err(Error::Validation(_))));
}

#[test]
fn engine_scheme_on_constants() {
    let g = Grid::periodic(8).unwrap();
    let (cc, w, tau) = (c(0.2, -0.6), 0.4, 0.05);
    let mut st = Stepper::new(
        StepperConfig::engine(EngineSpec { kind: EquationKind::Gp, order: 1, sobolev: 1.0 }, tau).unwrap(),
        &g,
        Some(&Field::constant(&g, c(w, 0.0))),
    )
    .unwrap();
    let got = st.step(&Field::constant(&g, cc)).unwrap();
    let want = cc - c(0.0, tau) * (cc.norm_sqr() * cc + w * cc);
    assert!(got.sub(&Field::constant(&g, want)).max_abs() < 1e-15);
}

#[test]
fn config_validation() {
    assert!(StepperConfig::new(SchemeId::Gp1, 0.0).is_err());
    assert!(StepperConfig::new(SchemeId::Gp1, -0.1).is_err());
    let sg = StepperConfig::new(SchemeId::Sg1, 0.1).unwrap();
    assert!(sg.with_mass(Rational64::from_integer(0)).is_err());
    assert!(StepperConfig::new(SchemeId::Engine, 0.1).is_err());
    assert!(StepperConfig::new(SchemeId::Gp2Stab, 0.1).unwrap().with_stab_order(0).is_err());
}

#[test]
fn klein_gordon_transform_examples() {
    let g = Grid::periodic(32).unwrap();
    let z = rough_real_data(1.0, 3, &g);
    let u = kg_to_u(&z, &Field::zeros(&g), one()).unwrap();
    assert!(u.sub(&z).max_abs() < 1e-15);
    let u = kg_to_u(&Field::constant(&g, c(0.8, 0.0)), &Field::constant(&g, c(-0.3, 0.0)), one()).unwrap();
    assert!(u.sub(&Field::constant(&g, c(0.8, 0.3))).max_abs() < 1e-15);
    let zero = Rational64::from_integer(0);
    assert!(kg_to_u(&z, &z, zero).is_err());
    assert!(u_to_kg(&z, zero).is_err());
}

#[test]
fn filter_expansion_bound() {
    let g = Grid::periodic(128).unwrap();
    for seed in 0..5 {
        let f = rough_data(1.0, seed, &g);
        for tau in [0.2, 0.05, 0.01] {
            let lhs = filter(&f, tau, 2).sub(&f).l2_norm();
            assert!(lhs <= 0.5 * tau * f.sobolev_norm(1.0) * (1.0 + 1e-6));
        }
    }
}

/// `τ‖Ψ𝒞[u², iΔ](u)‖ / (‖u‖²_{H¹}‖u‖)` with `𝒞[u², iΔ](u) = −2i(∂ₓu)²`.
fn commutator_ratio(n: usize, p: Option<u32>) -> f64 {
    let g = Grid::periodic(n).unwrap();
    let u = rough_data(1.0, 8, &g);
    let du = u.apply_operator(&OperatorExpr::dx()).unwrap();
    let comm = du.mul(&du).scale(c(0.0, -2.0));
    let tau = 0.1;
    let comm = match p {
        Some(p) => filter(&comm, tau, p),
        None => comm,
    };
    tau * comm.l2_norm() / (u.sobolev_norm(1.0).powi(2) * u.l2_norm())
}

#[test]
fn filter_keeps_commutator_bounded_under_refinement() {
    let ns = [64usize, 128, 256, 512, 1024];
    let raw: Vec<f64> = ns.iter().map(|&n| commutator_ratio(n, None)).collect();
    let filtered: Vec<f64> = ns.iter().map(|&n| commutator_ratio(n, Some(2))).collect();
    assert!(raw.windows(2).all(|w| w[1] > w[0]), "unfiltered ratios {raw:?}");
    assert!(raw[4] > 1.5 * raw[0], "unfiltered ratios {raw:?}");
    // Filtered ratios must not grow past the coarsest one while the raw ones do.
    assert!(filtered.iter().all(|&r| r <= 1.05 * filtered[0]), "filtered ratios {filtered:?}");
}

#[test]
fn reference_self_converges_at_second_order() {
    let g = Grid::periodic(32).unwrap();
    let u = smooth_data(2, &g, 1.0);
    let v = smooth_data(3, &g, 1.0).map(|z| c(z.re, 0.0));
    let r = reference_solve(EquationKind::Gp, &u, Some(&v), one(), 1.0, 2f64.powi(-4)).unwrap();
    assert!((r.ratio - 4.0).abs() < 0.2, "ratio {}", r.ratio);
    assert!(r.agreement <= 1e-9);
}

#[test]
fn reference_of_linear_flow_is_exact() {
    let g = Grid::periodic(32).unwrap();
    let u0 = rough_data(1.0, 6, &g);
    let w = 0.7;
    let step = |u: &Field, t: f64| -> lowreg::Result<Field> {
        Ok(u.semigroup(&i_lap(), t)?.scale(c(1.0 - 0.5 * t * t * w * w, -t * w)))
    };
    let r = reference_solve_with(step, &u0, 1.0, 2f64.powi(-10)).unwrap();
    let exact = u0.semigroup(&i_lap(), 1.0).unwrap().scale(c(0.0, -w).exp());
    let e = r.solution.sub(&exact).l2_norm();
    assert!(e < 1e-11, "error {e:e}");
}

#[test]
fn reference_of_constant_data_is_a_phase_rotation() {
    let g = Grid::periodic(8).unwrap();
    let (cc, w) = (c(0.6, 0.3), 0.5);
    let u = Field::constant(&g, cc);
    let v = Field::constant(&g, c(w, 0.0));
    let r = reference_solve(EquationKind::Gp, &u, Some(&v), one(), 1.0, 2f64.powi(-4)).unwrap();
    let want = cc * c(0.0, -(cc.norm_sqr() + w)).exp();
    assert!(r.solution.sub(&Field::constant(&g, want)).max_abs() < 1e-9);
}

#[test]
fn reference_rejects_indivisible_horizon() {
    let g = Grid::periodic(8).unwrap();
    let u = Field::constant(&g, c(0.1, 0.0));
    let step = |u: &Field, _t: f64| -> lowreg::Result<Field> { Ok(u.clone()) };
    assert!(reference_solve_with(step, &u, 1.0, 0.3).is_err());
}

/// A wrong symmetry factor in any second-order tree would leave an
/// `O(τ²)` one-step defect; the derived scheme must be `O(τ³)` on two modes.
#[test]
fn derived_second_order_scheme_has_third_order_local_error() {
    let g = Grid::periodic(16).unwrap();
    let u = Field::single_mode(&g, 1, c(0.5, 0.1)).add(&Field::single_mode(&g, -2, c(-0.2, 0.3)));
    let v = Field::from_fn(&g, |x| c(0.4 * x.cos(), 0.0));
    let taus = [2f64.powi(-3), 2f64.powi(-4), 2f64.powi(-5), 2f64.powi(-6)];
    let errs: Vec<f64> = taus
        .iter()
        .map(|&tau| {
            let cfg = StepperConfig::engine(EngineSpec { kind: EquationKind::Gp, order: 2, sobolev: 2.0 }, tau).unwrap();
            let one_step = Stepper::new(cfg, &g, Some(&v)).unwrap().step(&u).unwrap();
            let r = reference_solve(EquationKind::Gp, &u, Some(&v), one(), tau, tau).unwrap();
            one_step.sub(&r.solution).l2_norm()
        })
        .collect();
    let s = total_slope(&taus, &errs);
    assert!(s >= 2.8, "slope {s}, errors {errs:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn schemes_are_gauge_equivariant(theta in -3.0f64..3.0, seed in 0u64..1000) {
        let g = Grid::periodic(32).unwrap();
        let u = rough_data(1.0, seed, &g);
        let v = rough_real_data(1.0, seed + 1, &g);
        let rot = c(0.0, theta).exp();
        let ur = u.scale(rot);
        for step in [step_gp1, step_gp1_classical, step_gp2] {
            let a = step(&ur, &v, 0.1).unwrap();
            let b = step(&u, &v, 0.1).unwrap().scale(rot);
            prop_assert!(a.sub(&b).l2_norm() < 1e-13);
        }
        let a = step_gp2_stab(&ur, &v, 0.1, 2).unwrap();
        let b = step_gp2_stab(&u, &v, 0.1, 2).unwrap().scale(rot);
        prop_assert!(a.sub(&b).l2_norm() < 1e-13);
    }

    #[test]
    fn klein_gordon_round_trip(seed in 0u64..1000, m in 1i64..4) {
        let g = Grid::periodic(32).unwrap();
        let z = rough_real_data(1.0, seed, &g);
        let zt = rough_real_data(0.0, seed + 7, &g);
        let mass = Rational64::from_integer(m);
        let u = kg_to_u(&z, &zt, mass).unwrap();
        let (z2, zt2) = u_to_kg(&u, mass).unwrap();
        prop_assert!(z2.sub(&z).max_abs() < 1e-12);
        prop_assert!(zt2.sub(&zt).max_abs() < 1e-12);
    }
}
