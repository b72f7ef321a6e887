//! Explicit Runge–Kutta steppers on flat `f64` state vectors.

use crate::error::Result;

pub(crate) type Rhs<'a> = dyn FnMut(&[f64]) -> Result<Vec<f64>> + 'a;

fn axpy_into(out: &mut [f64], y: &[f64], h: f64, terms: &[(f64, &[f64])]) {
    for i in 0..y.len() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] = y[i] + h * acc;
    }
}

/// One classical fourth-order step.
pub(crate) fn rk4_step(f: &mut Rhs, y: &[f64], h: f64) -> Result<Vec<f64>> {
    let n = y.len();
    let mut t = vec![0.0; n];
    let k1 = f(y)?;
    axpy_into(&mut t, y, h, &[(0.5, &k1)]);
    let k2 = f(&t)?;
    axpy_into(&mut t, y, h, &[(0.5, &k2)]);
    let k3 = f(&t)?;
    axpy_into(&mut t, y, h, &[(1.0, &k3)]);
    let k4 = f(&t)?;
    axpy_into(&mut t, y, h, &[(1.0 / 6.0, &k1), (1.0 / 3.0, &k2), (1.0 / 3.0, &k3), (1.0 / 6.0, &k4)]);
    Ok(t)
}

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];

/// Fifth-order minus fourth-order weights.
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

pub(crate) struct Dp5Step {
    pub y: Vec<f64>,
    /// Derivative at the new point (first stage of the next step).
    pub f: Vec<f64>,
    /// Scaled max-norm error estimate.
    pub err: f64,
}

/// One Dormand–Prince 5(4) trial step from `(y, f0)`.
pub(crate) fn dp5_step(f: &mut Rhs, y: &[f64], f0: &[f64], h: f64, atol: f64, rtol: f64) -> Result<Dp5Step> {
    let n = y.len();
    let mut k: Vec<Vec<f64>> = Vec::with_capacity(7);
    k.push(f0.to_vec());
    let mut t = vec![0.0; n];
    for row in A.iter() {
        let s = k.len();
        for i in 0..n {
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate().take(s) {
                acc += row[j] * kj[i];
            }
            t[i] = y[i] + h * acc;
        }
        k.push(f(&t)?);
    }
    // t holds the fifth-order solution after the last row
    let mut err: f64 = 0.0;
    for i in 0..n {
        let e: f64 = h * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>();
        let sc = atol + rtol * y[i].abs().max(t[i].abs());
        err = err.max(e.abs() / sc);
    }
    let fnew = k.pop().unwrap_or_default();
    Ok(Dp5Step { y: t, f: fnew, err })
}

/// Max-norm starting step estimate.
pub(crate) fn initial_step(f: &mut Rhs, y: &[f64], f0: &[f64], atol: f64, rtol: f64, hmax: f64) -> Result<f64> {
    let sc: Vec<f64> = y.iter().map(|v| atol + rtol * v.abs()).collect();
    let nrm = |v: &[f64]| v.iter().zip(&sc).fold(0.0f64, |m, (a, s)| m.max(a.abs() / s));
    let (d0, d1) = (nrm(y), nrm(f0));
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 }.min(hmax);
    let y1: Vec<f64> = y.iter().zip(f0).map(|(a, b)| a + h0 * b).collect();
    let f1 = f(&y1)?;
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = nrm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    Ok((100.0 * h0).min(h1).min(hmax))
}
