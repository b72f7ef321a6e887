//! Curve jets and their Frénet invariants.
//!
//! Squared Frénet quantities are taken as magnitudes of the corresponding
//! Gram determinants, which makes `k`, `τ` and `k₃` real and non-negative in
//! magnitude for timelike, spacelike and Euclidean curves alike. The causal
//! class is recorded alongside.

use serde::{Deserialize, Serialize};

use crate::autodiff::{Scalar, Taylor};
use crate::error::{Error, Result};
use crate::geometry::{MetricSpace, Vector, MAX_DIM};

/// `|u·u|` must exceed this multiple of the squared component norm.
pub const NULL_THRESHOLD: f64 = 1e-10;
/// Curvatures at or below this are treated as zero.
pub const ZERO_CURVATURE: f64 = 1e-12;
/// Tolerance for the unit-speed chain on jets declared natural.
pub const NATURAL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamKind {
    Generic,
    Natural,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CausalClass {
    Timelike,
    Spacelike,
    Euclidean,
}

/// Base point plus parameter derivatives `d[0] = u`, `d[1] = u̇`, ...
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Jet {
    pub x: Vector,
    d: [Vector; MAX_DIM],
    order: usize,
    pub param_kind: ParamKind,
}

impl Jet {
    pub fn new(x: Vector, derivs: &[Vector], param_kind: ParamKind) -> Result<Self> {
        let order = derivs.len();
        if !(1..=MAX_DIM).contains(&order) {
            return Err(Error::Order(format!("jet order {order} not in 1..=4")));
        }
        if derivs.iter().any(|v| v.dim() != x.dim()) {
            return Err(Error::Dimension("jet slots must share the base point dimension".into()));
        }
        let mut d = [Vector::zeros(x.dim()); MAX_DIM];
        d[..order].copy_from_slice(derivs);
        Ok(Jet { x, d, order, param_kind })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    pub fn derivs(&self) -> &[Vector] {
        &self.d[..self.order]
    }

    /// `k`-th parameter derivative of `x`, `k >= 1`.
    pub fn deriv(&self, k: usize) -> Result<Vector> {
        if k == 0 {
            return Ok(self.x);
        }
        if k > self.order {
            return Err(Error::Order(format!("derivative {k} requested from a jet of order {}", self.order)));
        }
        Ok(self.d[k - 1])
    }

    pub fn u(&self) -> Vector {
        self.d[0]
    }

    /// Copy truncated or zero-extended to `order`.
    pub fn with_order(&self, order: usize) -> Jet {
        let mut j = *self;
        for k in self.order..order.min(MAX_DIM) {
            j.d[k] = Vector::zeros(self.dim());
        }
        j.order = order.clamp(1, MAX_DIM);
        j
    }

    /// Replace (or append) the derivative slot `k`.
    pub fn with_deriv(&self, k: usize, v: Vector) -> Jet {
        let mut j = *self;
        if k > j.order {
            j = j.with_order(k);
        }
        j.d[k - 1] = v;
        j
    }

    pub fn with_kind(mut self, kind: ParamKind) -> Jet {
        self.param_kind = kind;
        self
    }

    /// Builds a natural jet from arbitrary raw vectors by normalizing `u` and
    /// projecting the higher slots onto the unit-speed chain
    /// `u·u̇ = 0`, `u·ü = −u̇·u̇`, `u·u⃛ = −3 u̇·ü`.
    pub fn natural_from_raw(x: Vector, raw: &[Vector], m: &MetricSpace) -> Result<Jet> {
        if raw.is_empty() {
            return Err(Error::Order("at least a velocity is required".into()));
        }
        let u0 = raw[0];
        let n = m.dot(&u0, &u0);
        if n.abs() <= NULL_THRESHOLD * u0.component_norm_sq() || u0.component_norm_sq() == 0.0 {
            return Err(Error::DegenerateVelocity("cannot normalize a null velocity".into()));
        }
        let u = u0 * (1.0 / n.abs().sqrt());
        let uu = m.dot(&u, &u);
        let mut out = vec![u];
        // target values of u·d_k for k = 2, 3, 4
        for (k, r) in raw.iter().enumerate().skip(1) {
            let target = match k {
                1 => 0.0,
                2 => -m.dot(&out[1], &out[1]),
                3 => -3.0 * m.dot(&out[1], &out[2]),
                _ => unreachable!("jets stop at order 4"),
            };
            let c = (target - m.dot(&u, r)) / uu;
            out.push(r.axpy(c, &u));
        }
        Jet::new(x, &out, ParamKind::Natural)
    }

    /// Residuals of the unit-speed chain, one per available order.
    pub fn natural_residuals(&self, m: &MetricSpace) -> Vec<f64> {
        let u = self.u();
        let uu = m.dot(&u, &u);
        let mut r = vec![(uu.abs() - 1.0).abs()];
        if self.order >= 2 {
            r.push(m.dot(&u, &self.d[1]).abs());
        }
        if self.order >= 3 {
            r.push((m.dot(&u, &self.d[2]) + m.dot(&self.d[1], &self.d[1])).abs());
        }
        if self.order >= 4 {
            r.push((m.dot(&u, &self.d[3]) + 3.0 * m.dot(&self.d[1], &self.d[2])).abs());
        }
        r
    }

    pub fn max_natural_residual(&self, m: &MetricSpace) -> f64 {
        self.natural_residuals(m).into_iter().fold(0.0, f64::max)
    }
}

/// Scalar Frénet invariants of a jet.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrenetReport {
    pub k: f64,
    pub dk_ds: Option<f64>,
    pub tau: Option<f64>,
    pub k3: Option<f64>,
    pub causal_class: CausalClass,
}

pub fn causal_class(j: &Jet, m: &MetricSpace) -> CausalClass {
    if m.is_definite() {
        CausalClass::Euclidean
    } else if m.dot(&j.u(), &j.u()) > 0.0 {
        CausalClass::Timelike
    } else {
        CausalClass::Spacelike
    }
}

fn require_order(j: &Jet, order: usize, what: &str) -> Result<()> {
    if j.order() < order {
        return Err(Error::Order(format!("{what} needs a jet of order {order}, got {}", j.order())));
    }
    Ok(())
}

fn velocity_norm_sq(j: &Jet, m: &MetricSpace) -> Result<f64> {
    let u = j.u();
    let n = m.dot(&u, &u);
    let scale = u.component_norm_sq();
    if scale == 0.0 || n.abs() <= NULL_THRESHOLD * scale {
        return Err(Error::DegenerateVelocity(format!("u·u = {n:e} for |u|² = {scale:e}")));
    }
    Ok(n)
}

/// `‖u∧u̇‖ / ‖u‖³`, parametrization independent.
pub fn curvature(j: &Jet, m: &MetricSpace) -> Result<f64> {
    require_order(j, 2, "curvature")?;
    let n = velocity_norm_sq(j, m)?;
    let g = m.gram(&[j.u(), j.d[1]])?;
    Ok(g.abs().sqrt() / n.abs().powf(1.5))
}

/// Derivative of the curvature with respect to the jet's own parameter.
pub fn curvature_rate(j: &Jet, m: &MetricSpace) -> Result<f64> {
    require_order(j, 3, "curvature rate")?;
    let n = velocity_norm_sq(j, m)?;
    let (u, ud, udd) = (j.u(), j.d[1], j.d[2]);
    let g = m.gram(&[u, ud])?;
    let k = g.abs().sqrt() / n.abs().powf(1.5);
    if k <= ZERO_CURVATURE {
        return Err(Error::ZeroCurvature("curvature rate is undefined at k = 0".into()));
    }
    // (u∧u̇)·(u∧ü) = (u·u)(u̇·ü) − (u·u̇)(u·ü)
    let cross = n * m.dot(&ud, &udd) - m.dot(&u, &ud) * m.dot(&u, &udd);
    let sg = g.signum();
    let sn = n.signum();
    let na = n.abs();
    Ok(sg * cross / (na.powf(1.5) * g.abs().sqrt()) - 3.0 * g.abs().sqrt() * sn * m.dot(&u, &ud) / na.powf(2.5))
}

fn natural_of(j: &Jet, m: &MetricSpace) -> Result<Jet> {
    match j.param_kind {
        ParamKind::Natural => Ok(*j),
        ParamKind::Generic => to_natural(j, m),
    }
}

/// Second Frénet curvature, signed.
///
/// 3D: `ε(u, u̇, ü) / k²`. 4D: magnitude `sqrt|gram(u, u̇, ü)| / k²` with the
/// sign of `det[u, u̇, ü, e₃]`, so a curve confined to the first three
/// coordinates gets the 3D value. 2D curves have zero torsion.
pub fn torsion(j: &Jet, m: &MetricSpace) -> Result<f64> {
    require_order(j, 3, "torsion")?;
    let j = natural_of(j, m)?;
    let k = curvature(&j, m)?;
    if k <= ZERO_CURVATURE {
        return Err(Error::ZeroCurvature("torsion is undefined at k = 0".into()));
    }
    let (u, ud, udd) = (j.u(), j.d[1], j.d[2]);
    match m.dim() {
        2 => Ok(0.0),
        3 => Ok(m.orientation() * m.component_det(&[u, ud, udd]) / (k * k)),
        _ => {
            let mag = m.gram(&[u, ud, udd])?.abs().sqrt() / (k * k);
            let s = m.orientation() * m.component_det(&[u, ud, udd, Vector::basis(4, 3)]);
            let scale = (u.component_norm_sq() * ud.component_norm_sq() * udd.component_norm_sq()).sqrt();
            let sign = if s.abs() > 1e-12 * scale && s < 0.0 { -1.0 } else { 1.0 };
            Ok(sign * mag)
        }
    }
}

/// Third Frénet curvature `‖u∧u̇∧ü∧u⃛‖ / (k³τ²)` in four dimensions.
pub fn third_curvature(j: &Jet, m: &MetricSpace) -> Result<f64> {
    if m.dim() != 4 {
        return Err(Error::Dimension("third curvature needs dimension 4".into()));
    }
    require_order(j, 4, "third curvature")?;
    let j = natural_of(j, m)?;
    let k = curvature(&j, m)?;
    let tau = if k > ZERO_CURVATURE { torsion(&j, m)? } else { 0.0 };
    if k * tau.abs() <= 1e-10 {
        return Err(Error::UndefinedInvariant(format!("k τ = {:e} too small", k * tau.abs())));
    }
    let w = m.component_det(j.derivs()).abs();
    Ok(w / (k.powi(3) * tau * tau))
}

pub fn report(j: &Jet, m: &MetricSpace) -> Result<FrenetReport> {
    let nat = if j.order() >= 2 { natural_of(j, m)? } else { *j };
    let k = curvature(&nat, m)?;
    let positive = k > ZERO_CURVATURE;
    let dk_ds = if positive && j.order() >= 3 { Some(curvature_rate(&nat, m)?) } else { None };
    let tau = if positive && j.order() >= 3 { Some(torsion(&nat, m)?) } else { None };
    let k3 = if m.dim() == 4 && j.order() >= 4 { third_curvature(&nat, m).ok() } else { None };
    Ok(FrenetReport { k, dk_ds, tau, k3, causal_class: causal_class(j, m) })
}

/// Chain rule for `x(ξ(ζ))`: maps a jet in `ξ` to the jet in `ζ`, given
/// `ξ'`, `ξ''`, `ξ'''`, `ξ''''` (missing entries are zero).
pub fn reparametrize_jet(j: &Jet, xi: &[f64]) -> Result<Jet> {
    let g = |i: usize| xi.get(i).copied().unwrap_or(0.0);
    let (g1, g2, g3, g4) = (g(0), g(1), g(2), g(3));
    if g1 == 0.0 || !g1.is_finite() {
        return Err(Error::SingularReparam(g1));
    }
    let d = &j.d;
    let n = j.dim();
    let z = Vector::zeros(n);
    let at = |k: usize| if k < j.order { d[k] } else { z };
    let mut out = Vec::with_capacity(j.order);
    out.push(at(0) * g1);
    if j.order >= 2 {
        out.push(at(0) * g2 + at(1) * (g1 * g1));
    }
    if j.order >= 3 {
        out.push(at(0) * g3 + at(1) * (3.0 * g2 * g1) + at(2) * g1.powi(3));
    }
    if j.order >= 4 {
        out.push(
            at(0) * g4
                + at(1) * (4.0 * g1 * g3 + 3.0 * g2 * g2)
                + at(2) * (6.0 * g1 * g1 * g2)
                + at(3) * g1.powi(4),
        );
    }
    Jet::new(j.x, &out, ParamKind::Generic)
}

/// Derivatives of the inverse function: given `s'(ζ)..s''''(ζ)`, returns
/// `ζ'(s)..ζ''''(s)`.
pub fn inverse_derivatives(s: [f64; 4]) -> [f64; 4] {
    let [s1, s2, s3, s4] = s;
    [
        1.0 / s1,
        -s2 / s1.powi(3),
        (3.0 * s2 * s2 - s1 * s3) / s1.powi(5),
        (-15.0 * s2.powi(3) + 10.0 * s1 * s2 * s3 - s1 * s1 * s4) / s1.powi(7),
    ]
}

/// Taylor series of the velocity along the jet, `u(ζ) = u + u̇ ζ + ü ζ²/2 + …`.
pub(crate) fn velocity_series<const N: usize>(j: &Jet) -> Vec<Taylor<f64, N>> {
    let mut fact = [1.0; MAX_DIM + 1];
    for i in 1..=MAX_DIM {
        fact[i] = fact[i - 1] * i as f64;
    }
    (0..j.dim())
        .map(|a| {
            Taylor::new(std::array::from_fn(|k| if k < j.order { j.d[k][a] / fact[k] } else { 0.0 }))
        })
        .collect()
}

/// Reparametrizes by arc length so that `|u·u| = 1` and the differentiated
/// chain holds up to the jet's order.
pub fn to_natural(j: &Jet, m: &MetricSpace) -> Result<Jet> {
    velocity_norm_sq(j, m)?;
    let u = velocity_series::<4>(j);
    let mut nn = Taylor::<f64, 4>::constant(0.0);
    for (a, ua) in u.iter().enumerate() {
        nn += (*ua * *ua).scale(m.signature()[a]);
    }
    let speed = nn.abs().sqrt();
    let s = [speed.derivative(0), speed.derivative(1), speed.derivative(2), speed.derivative(3)];
    let zeta = inverse_derivatives(s);
    Ok(reparametrize_jet(j, &zeta)?.with_kind(ParamKind::Natural))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Variance;
    use proptest::prelude::*;

    fn up(c: &[f64]) -> Vector {
        Vector::upper(c)
    }

    /// Frénet oracle: jet of a parametric curve by high-order central
    /// differences of its point map.
    fn fd_jet(f: impl Fn(f64) -> Vec<f64>, t: f64, h: f64) -> Jet {
        let n = f(t).len();
        let pts: Vec<Vec<f64>> = (-3..=3).map(|i| f(t + i as f64 * h)).collect();
        let p = |i: i32, a: usize| pts[(i + 3) as usize][a];
        let mut d1 = vec![0.0; n];
        let mut d2 = vec![0.0; n];
        let mut d3 = vec![0.0; n];
        for a in 0..n {
            d1[a] = (-p(-3, a) + 9.0 * p(-2, a) - 45.0 * p(-1, a) + 45.0 * p(1, a) - 9.0 * p(2, a) + p(3, a))
                / (60.0 * h);
            d2[a] = (2.0 * p(-3, a) - 27.0 * p(-2, a) + 270.0 * p(-1, a) - 490.0 * p(0, a) + 270.0 * p(1, a)
                - 27.0 * p(2, a)
                + 2.0 * p(3, a))
                / (180.0 * h * h);
            d3[a] = (p(-3, a) - 8.0 * p(-2, a) + 13.0 * p(-1, a) - 13.0 * p(1, a) + 8.0 * p(2, a) - p(3, a))
                / (8.0 * h.powi(3));
        }
        Jet::new(up(&f(t)), &[up(&d1), up(&d2), up(&d3)], ParamKind::Generic).unwrap()
    }

    #[test]
    fn circle_curvature_any_parametrization() {
        let e2 = MetricSpace::euclidean(2);
        for speed in [1.0, 2.0, 0.3] {
            let j = fd_jet(|t| vec![2.0 * (speed * t * t + t).cos(), 2.0 * (speed * t * t + t).sin()], 0.4, 1e-2);
            assert!((curvature(&j, &e2).unwrap() - 0.5).abs() < 1e-8);
        }
    }

    #[test]
    fn straight_line_and_degenerate_velocity() {
        let e3 = MetricSpace::euclidean(3);
        let j = Jet::new(up(&[0.0; 3]), &[up(&[1.0, 2.0, 0.0]), up(&[2.0, 4.0, 0.0])], ParamKind::Generic).unwrap();
        assert!(curvature(&j, &e3).unwrap() < 1e-15);
        let m = MetricSpace::minkowski();
        let null = Jet::new(up(&[0.0; 4]), &[up(&[1.0, 1.0, 0.0, 0.0]), up(&[0.0, 1.0, 0.0, 0.0])], ParamKind::Generic)
            .unwrap();
        assert!(matches!(curvature(&null, &m), Err(Error::DegenerateVelocity(_))));
    }

    #[test]
    fn helix_curvature_torsion_against_finite_differences() {
        let e3 = MetricSpace::euclidean(3);
        let helix = |t: f64| vec![3.0 * t.cos(), 3.0 * t.sin(), 4.0 * t];
        let j = fd_jet(helix, 0.7, 1e-2);
        assert!((curvature(&j, &e3).unwrap() - 0.12).abs() < 1e-8);
        assert!((torsion(&j, &e3).unwrap() - 0.16).abs() < 1e-6);
        // helix has constant curvature
        assert!(curvature_rate(&j, &e3).unwrap().abs() < 1e-6);
    }

    #[test]
    fn hyperbola_worldline_curvature() {
        let m = MetricSpace::lorentz(2);
        let j = fd_jet(|s| vec![(3.0 * s).sinh() / 3.0, (3.0 * s).cosh() / 3.0], 0.2, 1e-3);
        assert!((curvature(&j, &m).unwrap() - 3.0).abs() < 1e-6);
        assert_eq!(causal_class(&j, &m), CausalClass::Timelike);
    }

    #[test]
    fn planar_curve_has_zero_torsion() {
        let e3 = MetricSpace::euclidean(3);
        let j = fd_jet(|t| vec![t.cos(), 2.0 * t.sin(), 0.0], 0.3, 1e-2);
        assert!(torsion(&j, &e3).unwrap().abs() < 1e-12);
    }

    #[test]
    fn zero_curvature_errors() {
        let e3 = MetricSpace::euclidean(3);
        let j = Jet::new(up(&[0.0; 3]), &[up(&[1.0, 0.0, 0.0]), up(&[0.0; 3]), up(&[0.0; 3])], ParamKind::Natural)
            .unwrap();
        assert!(matches!(torsion(&j, &e3), Err(Error::ZeroCurvature(_))));
        assert!(matches!(curvature_rate(&j, &e3), Err(Error::ZeroCurvature(_))));
    }

    #[test]
    fn reparametrize_examples() {
        let j = Jet::new(
            up(&[1.0, 1.0]),
            &[up(&[1.0, 2.0]), up(&[3.0, 4.0]), up(&[5.0, 6.0])],
            ParamKind::Generic,
        )
        .unwrap();
        let same = reparametrize_jet(&j, &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(same.derivs(), j.derivs());
        let scaled = reparametrize_jet(&j, &[2.0, 0.0, 0.0]).unwrap();
        assert_eq!(scaled.derivs(), &[up(&[2.0, 4.0]), up(&[12.0, 16.0]), up(&[40.0, 48.0])]);
        assert!(matches!(reparametrize_jet(&j, &[0.0, 1.0]), Err(Error::SingularReparam(_))));
    }

    #[test]
    fn to_natural_circle_at_speed_two() {
        let e2 = MetricSpace::euclidean(2);
        let r = 1.5;
        // x = R(cos 2t/R ... ) traversed at speed 2
        let w = 2.0 / r;
        let j = Jet::new(
            up(&[r, 0.0]),
            &[up(&[0.0, r * w]), up(&[-r * w * w, 0.0]), up(&[0.0, -r * w.powi(3)])],
            ParamKind::Generic,
        )
        .unwrap();
        let n = to_natural(&j, &e2).unwrap();
        assert!((e2.dot(&n.u(), &n.u()) - 1.0).abs() < 1e-14);
        assert!((curvature(&n, &e2).unwrap() - 1.0 / r).abs() < 1e-14);
        assert!(n.max_natural_residual(&e2) < 1e-12);
    }

    #[test]
    fn order_errors() {
        let e2 = MetricSpace::euclidean(2);
        let j = Jet::new(up(&[0.0, 0.0]), &[up(&[1.0, 0.0])], ParamKind::Generic).unwrap();
        assert!(matches!(curvature(&j, &e2), Err(Error::Order(_))));
        assert!(j.deriv(3).is_err());
        let lower = Vector::new(&[1.0, 0.0], Variance::Lower);
        assert_eq!(lower.variance, Variance::Lower);
    }

    fn random_generic_jet(dim: usize, seed: [f64; 16], m: &MetricSpace) -> Option<Jet> {
        let mut u = up(&seed[0..dim]);
        if m.is_lorentz() {
            // keep u timelike
            u.components_mut()[0] = 2.0 + seed[0].abs() + u.component_norm_sq().sqrt();
        } else if u.component_norm_sq() < 0.1 {
            return None;
        }
        let j = Jet::new(
            up(&seed[4..4 + dim]),
            &[u, up(&seed[8..8 + dim]), up(&seed[12..12 + dim]), up(&seed[0..dim])],
            ParamKind::Generic,
        )
        .ok()?;
        if curvature(&j, m).ok()? < 1e-2 {
            return None;
        }
        Some(j)
    }

    fn seeds() -> impl Strategy<Value = [f64; 16]> {
        prop::array::uniform16(-1.5f64..1.5)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn curvature_torsion_reparametrization_invariant(
            s in seeds(), g1 in 0.3f64..3.0, g2 in -2.0f64..2.0, g3 in -2.0f64..2.0, lor in any::<bool>()
        ) {
            let m = if lor { MetricSpace::minkowski() } else { MetricSpace::euclidean(4) };
            if let Some(j) = random_generic_jet(4, s, &m) {
                let r = reparametrize_jet(&j, &[g1, g2, g3, 0.5]).unwrap();
                let k0 = curvature(&j, &m).unwrap();
                let k1 = curvature(&r, &m).unwrap();
                prop_assert!((k0 - k1).abs() <= 1e-9 * k0.max(1e-3));
                let t0 = torsion(&j, &m).unwrap();
                let t1 = torsion(&r, &m).unwrap();
                prop_assert!((t0 - t1).abs() <= 1e-9 * t0.abs().max(1.0), "{} vs {}", t0, t1);
            }
        }

        #[test]
        fn natural_chain_and_idempotence(s in seeds(), lor in any::<bool>()) {
            let m = if lor { MetricSpace::minkowski() } else { MetricSpace::euclidean(4) };
            if let Some(j) = random_generic_jet(4, s, &m) {
                let n = to_natural(&j, &m).unwrap();
                let scale = n.derivs().iter().map(|v| v.max_abs()).fold(1.0, f64::max).powi(2);
                prop_assert!(n.max_natural_residual(&m) <= 1e-10 * scale);
                let nn = to_natural(&n, &m).unwrap();
                for (a, b) in n.derivs().iter().zip(nn.derivs()) {
                    for i in 0..4 {
                        prop_assert!((a[i] - b[i]).abs() <= 1e-12 * a.max_abs().max(1.0));
                    }
                }
            }
        }

        // Generalized determinant identity behind τ²k⁴ on natural jets:
        // gram3 = η0η1 k²(ü·ü) − η0 k² k'² − η1 k⁶ with frame signs η.
        #[test]
        fn torsion_gram_identity(s in seeds(), lor in any::<bool>()) {
            let m = if lor { MetricSpace::minkowski() } else { MetricSpace::euclidean(4) };
            if let Some(j) = random_generic_jet(4, s, &m) {
                let n = to_natural(&j, &m).unwrap();
                let k = curvature(&n, &m).unwrap();
                let dk = curvature_rate(&n, &m).unwrap();
                let tau = torsion(&n, &m).unwrap();
                let (u, ud, udd) = (n.u(), n.deriv(2).unwrap(), n.deriv(3).unwrap());
                let eta0 = m.dot(&u, &u).signum();
                let eta1 = m.dot(&ud, &ud).signum() ;
                let g3 = m.gram(&[u, ud, udd]).unwrap();
                let eta2 = g3.signum() * eta0 * eta1;
                let rhs = eta0 * eta1 * k * k * m.dot(&udd, &udd) - eta0 * k * k * dk * dk - eta1 * k.powi(6);
                prop_assert!((g3 - rhs).abs() <= 1e-8 * g3.abs().max(rhs.abs()).max(1e-6));
                let t2k4 = eta0 * eta1 * eta2 * g3;
                prop_assert!((tau * tau * k.powi(4) - t2k4).abs() <= 1e-8 * t2k4.abs().max(1e-6));
                if !lor {
                    // literal Euclidean form
                    let lit = m.dot(&udd, &udd) * k * k - k.powi(6) - k * k * dk * dk;
                    prop_assert!((tau * tau * k.powi(4) - lit).abs() <= 1e-8 * lit.abs().max(1e-6));
                }
            }
        }

        #[test]
        fn curvature_rate_matches_finite_difference(s in seeds()) {
            // oracle: advance the jet by a Taylor step and difference k
            let m = MetricSpace::euclidean(2);
            let j = Jet::new(
                up(&s[0..2]),
                &[up(&[1.0 + s[2].abs(), s[3]]), up(&s[4..6]), up(&s[6..8]), up(&s[8..10])],
                ParamKind::Generic,
            ).unwrap();
            let h = 1e-4;
            let shift = |t: f64| {
                let d: Vec<Vector> = (0..3).map(|k| {
                    let mut v = j.derivs()[k];
                    let mut f = t;
                    for (i, w) in j.derivs().iter().enumerate().skip(k + 1) {
                        v = v + *w * (f / fact(i - k));
                        f *= t;
                    }
                    v
                }).collect();
                Jet::new(j.x, &d, ParamKind::Generic).unwrap()
            };
            let k0 = curvature(&j, &m).unwrap();
            if k0 > 1e-2 {
                // u⃛ is the only slot beyond ü; the shifted |ü| is exact to O(h²)
                let fd = (curvature(&shift(h), &m).unwrap() - curvature(&shift(-h), &m).unwrap()) / (2.0 * h);
                let an = curvature_rate(&j, &m).unwrap();
                prop_assert!((fd - an).abs() <= 1e-5 * an.abs().max(1.0), "{} vs {}", fd, an);
            }
        }
    }

    fn fact(n: usize) -> f64 {
        (1..=n).map(|i| i as f64).product()
    }
}
