//! Flat (pseudo-)Euclidean linear algebra in dimensions 2, 3 and 4.
//!
//! Both Levi-Civita symbols, the covariant `ε_{α…}` and the contravariant
//! `e^{α…}`, take the numerical value `orientation * sign(permutation)`.
//! Lowering all indices of `e` through the metric therefore produces
//! `det(g) * ε`.

use std::ops::{Add, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variance {
    Upper,
    Lower,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricSpace {
    dim: usize,
    signature: [f64; MAX_DIM],
    orientation: f64,
}

impl MetricSpace {
    pub fn new(signature: &[f64], orientation: f64) -> Result<Self> {
        let dim = signature.len();
        if !(2..=MAX_DIM).contains(&dim) {
            return Err(Error::Dimension(format!("dimension {dim} not in 2..=4")));
        }
        if signature.iter().any(|&s| s != 1.0 && s != -1.0) {
            return Err(Error::Argument(format!("signature entries must be +-1: {signature:?}")));
        }
        if orientation != 1.0 && orientation != -1.0 {
            return Err(Error::Argument(format!("orientation must be +-1, got {orientation}")));
        }
        let mut sig = [0.0; MAX_DIM];
        sig[..dim].copy_from_slice(signature);
        Ok(MetricSpace { dim, signature: sig, orientation })
    }

    pub fn euclidean(dim: usize) -> Self {
        Self::new(&vec![1.0; dim], 1.0).expect("dimension in 2..=4")
    }

    /// `diag(1, -1, ..., -1)`.
    pub fn lorentz(dim: usize) -> Self {
        let mut sig = vec![-1.0; dim];
        sig[0] = 1.0;
        Self::new(&sig, 1.0).expect("dimension in 2..=4")
    }

    pub fn minkowski() -> Self {
        Self::lorentz(4)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn signature(&self) -> &[f64] {
        &self.signature[..self.dim]
    }

    pub fn orientation(&self) -> f64 {
        self.orientation
    }

    pub fn det(&self) -> f64 {
        self.signature().iter().product()
    }

    pub fn is_definite(&self) -> bool {
        self.signature().iter().all(|&s| s == self.signature[0])
    }

    pub fn is_lorentz(&self) -> bool {
        self.signature[0] == 1.0 && self.signature[1..self.dim].iter().all(|&s| s == -1.0)
    }

    /// Numerical value of either Levi-Civita symbol.
    pub fn levi_civita(&self, idx: &[usize]) -> f64 {
        self.orientation * permutation_sign(idx) as f64
    }

    /// Covariant symbol obtained by lowering every index of `e^{…}`.
    pub fn lowered_contravariant_symbol(&self, idx: &[usize]) -> f64 {
        let s: f64 = idx.iter().map(|&i| self.signature[i]).product();
        s * self.levi_civita(idx)
    }

    fn check(&self, v: &Vector) -> Result<()> {
        if v.dim() != self.dim {
            return Err(Error::Dimension(format!(
                "vector of dimension {} in a {}-dimensional space",
                v.dim(),
                self.dim
            )));
        }
        Ok(())
    }

    pub fn lower(&self, v: &Vector) -> Vector {
        match v.variance {
            Variance::Lower => *v,
            Variance::Upper => self.flip(v, Variance::Lower),
        }
    }

    pub fn raise(&self, v: &Vector) -> Vector {
        match v.variance {
            Variance::Upper => *v,
            Variance::Lower => self.flip(v, Variance::Upper),
        }
    }

    fn flip(&self, v: &Vector, variance: Variance) -> Vector {
        let mut c = v.c;
        for (ci, s) in c.iter_mut().zip(self.signature()) {
            *ci *= s;
        }
        Vector { c, dim: v.dim, variance }
    }

    /// Metric pairing; mixed variances contract without the metric.
    pub fn inner(&self, a: &Vector, b: &Vector) -> Result<f64> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.dot(a, b))
    }

    /// Unchecked [`inner`](Self::inner) for hot paths with known dimensions.
    #[inline]
    pub fn dot(&self, a: &Vector, b: &Vector) -> f64 {
        let n = self.dim;
        if a.variance == b.variance {
            (0..n).map(|i| self.signature[i] * a.c[i] * b.c[i]).sum()
        } else {
            (0..n).map(|i| a.c[i] * b.c[i]).sum()
        }
    }

    /// Determinant of the matrix of pairwise inner products.
    pub fn gram(&self, vs: &[Vector]) -> Result<f64> {
        if vs.is_empty() || vs.len() > self.dim {
            return Err(Error::Dimension(format!(
                "gram of {} vectors in dimension {}",
                vs.len(),
                self.dim
            )));
        }
        for v in vs {
            self.check(v)?;
        }
        if vs.len() == self.dim {
            // exact-rank path: gram = det(V)^2 det(g)
            let d = self.component_det(vs);
            return Ok(d * d * self.det());
        }
        let k = vs.len();
        let mut m = [[0.0; MAX_DIM]; MAX_DIM];
        for i in 0..k {
            for j in i..k {
                let g = self.dot(&vs[i], &vs[j]);
                m[i][j] = g;
                m[j][i] = g;
            }
        }
        Ok(det_small(&m, k))
    }

    /// Determinant of the component matrix of `dim` vectors (all raised).
    pub fn component_det(&self, vs: &[Vector]) -> f64 {
        let n = self.dim;
        let mut m = [[0.0; MAX_DIM]; MAX_DIM];
        for (i, v) in vs.iter().enumerate().take(n) {
            let v = self.raise(v);
            m[i][..n].copy_from_slice(&v.c[..n]);
        }
        det_small(&m, n)
    }

    /// Magnitude `sqrt(|gram|)` and the sign of the gram determinant.
    pub fn wedge_norm(&self, vs: &[Vector]) -> Result<WedgeNorm> {
        let g = self.gram(vs)?;
        let magnitude = if vs.len() == self.dim {
            self.component_det(vs).abs()
        } else {
            g.abs().sqrt()
        };
        let sign = if g > 0.0 {
            1
        } else if g < 0.0 {
            -1
        } else {
            0
        };
        Ok(WedgeNorm { magnitude, sign })
    }

    /// Contraction of `dim - 1` vectors into the Levi-Civita symbol.
    ///
    /// Upper-index (or mixed) inputs are raised and contracted with `ε_{α…}`,
    /// giving a lower-index result `c_α = ε_{α β …} v1^β …`. All-lower inputs
    /// are contracted with `e^{α…}` and give an upper-index result.
    pub fn epsilon_contract(&self, vs: &[Vector]) -> Result<Vector> {
        let n = self.dim;
        if vs.len() + 1 != n {
            return Err(Error::Dimension(format!(
                "epsilon contraction needs {} vectors, got {}",
                n - 1,
                vs.len()
            )));
        }
        for v in vs {
            self.check(v)?;
        }
        let all_lower = vs.iter().all(|v| v.variance == Variance::Lower);
        let (inputs, out_variance) = if all_lower {
            (vs.to_vec(), Variance::Upper)
        } else {
            (vs.iter().map(|v| self.raise(v)).collect(), Variance::Lower)
        };
        let mut c = [0.0; MAX_DIM];
        for (perm, sign) in permutations(n) {
            let mut prod = sign as f64;
            for (slot, v) in inputs.iter().enumerate() {
                prod *= v.c[perm[slot + 1]];
            }
            c[perm[0]] += prod;
        }
        for ci in c.iter_mut() {
            *ci *= self.orientation;
        }
        Ok(Vector { c, dim: n, variance: out_variance })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WedgeNorm {
    pub magnitude: f64,
    pub sign: i8,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vector {
    c: [f64; MAX_DIM],
    dim: usize,
    pub variance: Variance,
}

impl Vector {
    pub fn new(components: &[f64], variance: Variance) -> Self {
        assert!(
            (1..=MAX_DIM).contains(&components.len()),
            "vectors have 1..=4 components"
        );
        let mut c = [0.0; MAX_DIM];
        c[..components.len()].copy_from_slice(components);
        Vector { c, dim: components.len(), variance }
    }

    pub fn upper(components: &[f64]) -> Self {
        Self::new(components, Variance::Upper)
    }

    pub fn lower(components: &[f64]) -> Self {
        Self::new(components, Variance::Lower)
    }

    pub fn zeros(dim: usize) -> Self {
        Self::upper(&vec![0.0; dim])
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.c[i] = 1.0;
        v
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[f64] {
        &self.c[..self.dim]
    }

    pub fn components_mut(&mut self) -> &mut [f64] {
        &mut self.c[..self.dim]
    }

    /// Plain (signature-free) squared component norm.
    pub fn component_norm_sq(&self) -> f64 {
        self.components().iter().map(|x| x * x).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.components().iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    pub fn axpy(&self, k: f64, other: &Vector) -> Vector {
        *self + *other * k
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.components()[i]
    }
}

impl Add for Vector {
    type Output = Vector;
    fn add(mut self, o: Vector) -> Vector {
        debug_assert_eq!(self.dim, o.dim);
        for i in 0..self.dim {
            self.c[i] += o.c[i];
        }
        self
    }
}

impl Sub for Vector {
    type Output = Vector;
    fn sub(mut self, o: Vector) -> Vector {
        debug_assert_eq!(self.dim, o.dim);
        for i in 0..self.dim {
            self.c[i] -= o.c[i];
        }
        self
    }
}

impl Mul<f64> for Vector {
    type Output = Vector;
    fn mul(mut self, k: f64) -> Vector {
        for x in self.c.iter_mut() {
            *x *= k;
        }
        self
    }
}

impl Neg for Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        self * -1.0
    }
}

/// Generalized Kronecker symbol `δ^{upper}_{lower}`: determinant of the
/// matrix of ordinary Kronecker deltas.
pub fn gkron(upper: &[usize], lower: &[usize]) -> Result<i32> {
    let k = upper.len();
    if k != lower.len() || k > MAX_DIM {
        return Err(Error::Dimension(format!(
            "generalized delta with {} upper and {} lower indices",
            k,
            lower.len()
        )));
    }
    let mut m = [[0.0; MAX_DIM]; MAX_DIM];
    for i in 0..k {
        for j in 0..k {
            m[i][j] = if upper[i] == lower[j] { 1.0 } else { 0.0 };
        }
    }
    Ok(det_small(&m, k).round() as i32)
}

/// Sign of the permutation `idx` of `0..n`, zero when an index repeats.
pub fn permutation_sign(idx: &[usize]) -> i32 {
    let n = idx.len();
    let mut sign = 1;
    for i in 0..n {
        for j in i + 1..n {
            if idx[i] == idx[j] {
                return 0;
            }
            if idx[i] > idx[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// All permutations of `0..n` paired with their signs.
pub fn permutations(n: usize) -> Vec<([usize; MAX_DIM], i32)> {
    fn rec(n: usize, cur: &mut Vec<usize>, used: &mut [bool; MAX_DIM], out: &mut Vec<([usize; MAX_DIM], i32)>) {
        if cur.len() == n {
            let mut p = [0; MAX_DIM];
            p[..n].copy_from_slice(cur);
            out.push((p, permutation_sign(cur)));
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(n, cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(n, &mut Vec::with_capacity(n), &mut [false; MAX_DIM], &mut out);
    out
}

/// Determinant of the leading `k x k` block, Gaussian elimination with
/// partial pivoting.
pub fn det_small(m: &[[f64; MAX_DIM]; MAX_DIM], k: usize) -> f64 {
    let mut a = *m;
    let mut det = 1.0;
    for col in 0..k {
        let mut piv = col;
        for r in col + 1..k {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        if a[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det *= a[col][col];
        for r in col + 1..k {
            let f = a[r][col] / a[col][col];
            for c in col..k {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    det
}
