//! Adaptive Gauss–Kronrod (7/15) quadrature for vector-valued integrands.

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
/// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

const MAX_INTERVALS: usize = 4096;

fn norm(v: &[Complex64], weight: f64) -> f64 {
    (weight * v.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
}

fn gk15(f: &mut dyn FnMut(f64) -> Result<Vec<Complex64>>, a: f64, b: f64, weight: f64) -> Result<(Vec<Complex64>, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let n = fc.len();
    let mut k: Vec<Complex64> = fc.iter().map(|z| z * WGK[7]).collect();
    let mut g: Vec<Complex64> = fc.iter().map(|z| z * WG[3]).collect();
    for j in 0..7 {
        let x = h * XGK[j];
        let f1 = f(c - x)?;
        let f2 = f(c + x)?;
        for i in 0..n {
            let s = f1[i] + f2[i];
            k[i] += s * WGK[j];
            if j % 2 == 1 {
                g[i] += s * WG[j / 2];
            }
        }
    }
    for i in 0..n {
        k[i] *= h;
        g[i] *= h;
    }
    let diff: Vec<Complex64> = k.iter().zip(&g).map(|(x, y)| x - y).collect();
    Ok((k, norm(&diff, weight)))
}

/// `∫_a^b f` to absolute tolerance `tol`, measured in the norm
/// `(weight · Σ|cᵢ|²)^{1/2}`.
pub fn integrate(
    f: &mut dyn FnMut(f64) -> Result<Vec<Complex64>>,
    a: f64,
    b: f64,
    tol: f64,
    weight: f64,
) -> Result<Vec<Complex64>> {
    if b <= a {
        let n = f(a)?.len();
        return Ok(vec![Complex64::new(0.0, 0.0); n]);
    }
    let mut pending = vec![(a, b, gk15(f, a, b, weight)?)];
    let mut total: Option<Vec<Complex64>> = None;
    let mut accepted_err = 0.0;
    let mut intervals = 1;
    while let Some((lo, hi, (val, err))) = pending.pop() {
        let share = tol * (hi - lo) / (b - a);
        if err <= share || intervals >= MAX_INTERVALS {
            if err > share {
                let rest: f64 = pending.iter().map(|p| p.2 .1).sum::<f64>() + err + accepted_err;
                return Err(Error::Quadrature { achieved: rest, requested: tol });
            }
            accepted_err += err;
            match &mut total {
                None => total = Some(val),
                Some(t) => t.iter_mut().zip(&val).for_each(|(x, y)| *x += y),
            }
            continue;
        }
        let mid = 0.5 * (lo + hi);
        pending.push((lo, mid, gk15(f, lo, mid, weight)?));
        pending.push((mid, hi, gk15(f, mid, hi, weight)?));
        intervals += 1;
    }
    Ok(total.expect("at least one interval"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_oscillatory_exponential() {
        let w = 40.0;
        let mut f = |x: f64| Ok(vec![Complex64::new(0.0, w * x).exp(), Complex64::new(x * x, 0.0)]);
        let v = integrate(&mut f, 0.0, 1.0, 1e-13, 1.0).unwrap();
        let exact = (Complex64::new(0.0, w).exp() - 1.0) / Complex64::new(0.0, w);
        assert!((v[0] - exact).norm() < 1e-13);
        assert!((v[1].re - 1.0 / 3.0).abs() < 1e-14);
    }
}
