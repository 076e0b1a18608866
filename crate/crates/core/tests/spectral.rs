//! Grids, multipliers, φ-filters, commutators and rough data.

use std::sync::Arc;

use lowreg::operator_algebra::{coef, OperatorExpr};
use lowreg::scheme_engine::term::{commutator, input, product, slot};
use lowreg::scheme_engine::{Evaluator, Inputs};
use lowreg::spectral_backend::{dealiased_product, phi, rough_data, smooth_data, Basis, Field, Grid, ROUGH_EPS};
use num_complex::Complex64;
use num_rational::Rational64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn i_lap() -> OperatorExpr {
    OperatorExpr::laplacian().scale(coef(0, 1))
}

fn band(f: &Field, kmax: f64) -> Field {
    f.apply_symbol(|k| if k.abs() <= kmax { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

fn total_slope(xs: &[f64], ys: &[f64]) -> f64 {
    (ys[0].ln() - ys[ys.len() - 1].ln()) / (xs[0].ln() - xs[xs.len() - 1].ln())
}

#[test]
fn operator_symbols() {
    let g = Grid::periodic(16).unwrap();
    let e1 = Field::single_mode(&g, 1, c(1.0, 0.0));
    let d = e1.apply_operator(&OperatorExpr::laplacian()).unwrap().add(&e1);
    assert!(d.l2_norm() < 1e-13);
    let k = Field::constant(&g, c(2.0, 0.0)).apply_operator(&OperatorExpr::bracket(Rational64::from_integer(3))).unwrap();
    assert!(k.sub(&Field::constant(&g, c(6.0, 0.0))).max_abs() < 1e-13);
}

#[test]
fn operator_linearity() {
    let g = Grid::periodic(64).unwrap();
    let f = band(&rough_data(1.0, 3, &g), 20.0);
    let a = i_lap() + OperatorExpr::dx();
    let lhs = f.apply_operator(&a).unwrap();
    let rhs = f.apply_operator(&i_lap()).unwrap().add(&f.apply_operator(&OperatorExpr::dx()).unwrap());
    assert!(lhs.sub(&rhs).l2_norm() < 1e-13 * lhs.l2_norm().max(1.0));
}

#[test]
fn schroedinger_group_is_unitary_and_a_flow() {
    let g = Grid::periodic(64).unwrap();
    let f = rough_data(0.5, 4, &g);
    let l = i_lap();
    let a = f.semigroup(&l, 0.3).unwrap();
    assert!((a.l2_norm() - f.l2_norm()).abs() < 1e-13);
    let b = a.semigroup(&l, -0.7).unwrap();
    assert!(b.sub(&f.semigroup(&l, -0.4).unwrap()).l2_norm() < 1e-12);
    assert!(f.semigroup(&l, 0.0).unwrap().sub(&f).l2_norm() < 1e-15);
    let m = Field::single_mode(&g, 3, c(0.5, 0.2)).semigroup(&l, 0.1).unwrap();
    let want = Field::single_mode(&g, 3, c(0.5, 0.2) * c(0.0, -0.9).exp());
    assert!(m.sub(&want).l2_norm() < 1e-14);
}

#[test]
fn phi_filters_on_constants() {
    let g = Grid::periodic(16).unwrap();
    let one = Field::constant(&g, c(1.0, 0.0));
    assert!(one.phi_filter(1, &i_lap(), 0.3).unwrap().sub(&one).max_abs() < 1e-15);
    assert!(one.phi_filter(2, &i_lap(), 0.3).unwrap().sub(&one.scale(c(0.5, 0.0))).max_abs() < 1e-15);
}

#[test]
fn unit_mode_sobolev_norm() {
    let g = Grid::periodic(16).unwrap();
    let e1 = Field::single_mode(&g, 1, c(1.0, 0.0));
    for s in [0.0, 0.5, 1.0, 2.0] {
        let r = e1.sobolev_norm(s) / e1.l2_norm();
        assert!((r - 2f64.powf(s / 2.0)).abs() < 1e-13, "s = {s}: {r}");
    }
}

#[test]
fn sine_of_zero_is_zero() {
    let g = Grid::periodic(16).unwrap();
    assert_eq!(Field::zeros(&g).map(|z| z.sin()).max_abs(), 0.0);
}

/// Products on coefficient vectors by direct convolution in an unbounded
/// wavenumber range, truncated back to the grid modes.
fn convolve_oracle(g: &Arc<Grid>, fs: &[&Field]) -> Field {
    let ks: Vec<i64> = g.wavenumbers().iter().map(|&k| k.round() as i64).collect();
    let ny = g.size() / 2;
    let mut acc = std::collections::BTreeMap::from([(0i64, c(1.0, 0.0))]);
    for f in fs {
        let cf = f.spectral();
        let mut next = std::collections::BTreeMap::new();
        for (&k1, &a) in &acc {
            for (j, &k2) in ks.iter().enumerate() {
                if j == ny {
                    continue;
                }
                *next.entry(k1 + k2).or_insert(c(0.0, 0.0)) += a * cf[j];
            }
        }
        acc = next;
    }
    let out = ks
        .iter()
        .enumerate()
        .map(|(j, k)| if j == ny { c(0.0, 0.0) } else { acc.get(k).copied().unwrap_or(c(0.0, 0.0)) })
        .collect();
    Field::from_spectral(g.clone(), out)
}

#[test]
fn dealiased_cubic_matches_padded_oracle() {
    let g = Grid::periodic(32).unwrap();
    let u = rough_data(1.0, 9, &g);
    let ub = u.conj();
    let got = dealiased_product(&[&u, &u, &ub]);
    let want = convolve_oracle(&g, &[&u, &u, &ub]);
    let rel = got.sub(&want).l2_norm() / want.l2_norm();
    assert!(rel < 1e-12, "relative deviation {rel:e}");
}

#[test]
fn commutator_of_square_on_sine() {
    let g = Grid::periodic(32).unwrap();
    let v = Field::from_fn(&g, |x| c(x.sin(), 0.0));
    let h = product(vec![slot(0), slot(0)]).unwrap();
    let t = commutator(h, vec![OperatorExpr::laplacian()], vec![input("v")]).unwrap();
    let inputs: Inputs = [("v".to_string(), v)].into_iter().collect();
    let got = Evaluator::new(g.clone(), 0.0).eval(&t, &inputs).unwrap();
    let want = Field::from_fn(&g, |x| c(-2.0 * x.cos().powi(2), 0.0));
    assert!(got.sub(&want).max_abs() < 1e-12);
}

#[test]
fn commutator_vanishes_on_constants() {
    let g = Grid::periodic(16).unwrap();
    let h = product(vec![slot(0), slot(0), slot(1)]).unwrap();
    for l in [OperatorExpr::laplacian(), OperatorExpr::dx()] {
        let t = commutator(h.clone(), vec![l], vec![input("a"), input("b")]).unwrap();
        let inputs: Inputs = [
            ("a".to_string(), Field::constant(&g, c(0.3, 0.1))),
            ("b".to_string(), Field::constant(&g, c(-1.0, 2.0))),
        ]
        .into_iter()
        .collect();
        assert!(Evaluator::new(g.clone(), 0.0).eval(&t, &inputs).unwrap().max_abs() < 1e-14);
    }
}

#[test]
fn commutator_matches_operator_finite_difference() {
    let g = Grid::periodic(64).unwrap();
    let v = smooth_data(5, &g, 1.0);
    let l = i_lap();
    let h = product(vec![slot(0), slot(0)]).unwrap();
    let t = commutator(h, vec![l.clone()], vec![input("v")]).unwrap();
    let inputs: Inputs = [("v".to_string(), v.clone())].into_iter().collect();
    let comm = Evaluator::new(g.clone(), 0.0).eval(&t, &inputs).unwrap();
    let eps = [1e-2, 5e-3, 2.5e-3, 1.25e-3];
    let errs: Vec<f64> = eps
        .iter()
        .map(|&e| {
            let ev = v.semigroup(&l, e).unwrap();
            let fd = ev.mul(&ev).sub(&v.mul(&v).semigroup(&l, e).unwrap()).scale(c(1.0 / e, 0.0));
            fd.sub(&comm).l2_norm()
        })
        .collect();
    let s = total_slope(&eps, &errs);
    assert!((s - 1.0).abs() < 0.1, "slope {s}, errors {errs:?}");
}

#[test]
fn dirichlet_fields_keep_zero_trace() {
    let g = Grid::dirichlet(64).unwrap();
    let u = rough_data(1.0, 2, &g);
    let ops = [OperatorExpr::laplacian(), OperatorExpr::bracket(Rational64::from_integer(1))];
    let mut fields = vec![u.clone()];
    fields.extend(ops.iter().map(|a| u.apply_operator(a).unwrap()));
    for f in fields {
        let (a, b) = f.boundary_trace();
        assert!(a.norm() < 1e-12 && b.norm() < 1e-12, "trace {a} {b}");
    }
    assert!(u.apply_operator(&OperatorExpr::dx()).is_err());
}

#[test]
fn rough_data_is_normalised_and_deterministic() {
    for s in [0.5, 1.0, 1.5, 2.0] {
        let g = Grid::periodic(128).unwrap();
        let u = rough_data(s, 17, &g);
        assert!((u.sobolev_norm(s) - 1.0).abs() < 1e-10);
        assert_eq!(u.spectral(), rough_data(s, 17, &g).spectral());
        assert_ne!(u.spectral(), rough_data(s, 18, &g).spectral());
    }
}

/// `‖rough_data(1)‖_{H²}` depends only on the deterministic amplitudes, so the
/// growth under mode doubling has a closed form.
fn h2_of_h1_normalised(n: usize) -> f64 {
    let g = Grid::periodic(n).unwrap();
    let ny = g.size() / 2;
    let (mut h1, mut h2) = (0.0, 0.0);
    for (j, &k) in g.wavenumbers().iter().enumerate() {
        if j == ny {
            continue;
        }
        let a2 = (1.0 + k.abs()).powf(-2.0 * (1.5 + ROUGH_EPS));
        h1 += (1.0 + k * k) * a2;
        h2 += (1.0 + k * k).powi(2) * a2;
    }
    (h2 / h1).sqrt()
}

#[test]
fn rough_h1_data_grows_in_h2_under_refinement() {
    for n in [64usize, 128, 256] {
        let a = rough_data(1.0, 1, &Grid::periodic(n).unwrap()).sobolev_norm(2.0);
        let b = rough_data(1.0, 1, &Grid::periodic(2 * n).unwrap()).sobolev_norm(2.0);
        let want = h2_of_h1_normalised(2 * n) / h2_of_h1_normalised(n);
        assert!((b / a - want).abs() < 1e-10, "N = {n}: {} vs {want}", b / a);
        assert!(b / a > 1.8);
    }
}

#[test]
fn grid_rejects_bad_sizes() {
    assert!(Grid::periodic(48).is_err());
    assert!(Grid::new(Basis::Periodic, 64, 1.0, true).is_ok());
}

proptest! {
    #[test]
    fn parseval_round_trip(re in prop::collection::vec(-1.0f64..1.0, 32), im in prop::collection::vec(-1.0f64..1.0, 32)) {
        let g = Grid::periodic(32).unwrap();
        let data: Vec<Complex64> = re.iter().zip(&im).map(|(&a, &b)| c(a, b)).collect();
        let f = Field::from_physical(g.clone(), data.clone());
        let n0 = f.l2_norm();
        let back = f.clone().into_spectral().into_physical();
        let diff = back.physical().iter().zip(&data).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(diff < 1e-13);
        prop_assert!((back.l2_norm() - n0).abs() <= 1e-13 * n0.max(1.0));
    }

    #[test]
    fn phi_identity_holds(tau in 1e-6f64..1.0, k in 0i32..200) {
        let s = c(0.0, -2.0 * tau * (k * k) as f64);
        prop_assert!((s * phi(2, s) + phi(1, s) - s.exp()).norm() < 1e-12);
    }
}
