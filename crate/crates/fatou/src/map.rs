//! The unperturbed map z^n (z - a) / Q(z), its perturbation by λ / z^d,
//! and the polynomials whose roots are the critical points and zeros.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{self, Poly};

/// A point of the Riemann sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl SpherePoint {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            SpherePoint::Finite(z) => Some(z),
            SpherePoint::Infinity => None,
        }
    }

    pub fn is_infinity(self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    pub fn modulus(self) -> f64 {
        match self {
            SpherePoint::Finite(z) => z.norm(),
            SpherePoint::Infinity => f64::INFINITY,
        }
    }
}

impl From<Complex64> for SpherePoint {
    fn from(z: Complex64) -> Self {
        if z.re.is_finite() && z.im.is_finite() {
            SpherePoint::Finite(z)
        } else {
            SpherePoint::Infinity
        }
    }
}

/// Which of the standing conditions a parameter tuple satisfies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conditions {
    /// Q(0) != 0, so the origin is a superattracting fixed point of the unperturbed map.
    pub a: bool,
    /// |b_n| < 1, so infinity stays attracting.
    pub b: bool,
    /// 1/n + 1/d < 1.
    pub d: bool,
}

/// One member of the family. `q[k]` is the coefficient of z^k in Q, degree at most n.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapParams {
    pub n: u32,
    pub d: u32,
    pub a: Complex64,
    pub q: Vec<Complex64>,
    pub lambda: Complex64,
}

fn finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

impl MapParams {
    pub fn new(n: u32, d: u32, a: Complex64, q: Vec<Complex64>, lambda: Complex64) -> Result<Self> {
        let p = MapParams { n, d, a, q, lambda };
        p.validate()?;
        Ok(p)
    }

    /// Q ≡ 1, the cubic-like family z^n (z - a) + λ / z^d.
    pub fn milnor(n: u32, d: u32, a: Complex64, lambda: Complex64) -> Result<Self> {
        Self::new(n, d, a, vec![Complex64::new(1.0, 0.0)], lambda)
    }

    /// Q(z) = 1 - conj(a) z, the Blaschke-type family.
    pub fn blaschke(n: u32, d: u32, a: Complex64, lambda: Complex64) -> Result<Self> {
        Self::new(n, d, a, vec![Complex64::new(1.0, 0.0), -a.conj()], lambda)
    }

    pub fn with_lambda(&self, lambda: Complex64) -> Self {
        MapParams { lambda, ..self.clone() }
    }

    pub fn q0(&self) -> Complex64 {
        self.q.first().copied().unwrap_or_default()
    }

    /// Coefficient of z^n in Q (zero when deg Q < n).
    pub fn b_n(&self) -> Complex64 {
        self.q.get(self.n as usize).copied().unwrap_or_default()
    }

    pub fn degree(&self) -> u32 {
        self.n + self.d + 1
    }

    pub fn conditions(&self) -> Conditions {
        Conditions {
            a: self.q0() != Complex64::default(),
            b: self.b_n().norm() < 1.0,
            d: self.n * self.d > self.n + self.d,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.d < 2 {
            return Err(Error::InvalidParams(format!(
                "need n, d >= 2 (got n={}, d={})",
                self.n, self.d
            )));
        }
        if !finite(self.a) || self.a == Complex64::default() {
            return Err(Error::InvalidParams("a must be finite and nonzero".into()));
        }
        if !finite(self.lambda) {
            return Err(Error::InvalidParams("lambda must be finite".into()));
        }
        if self.q.is_empty() || self.q.len() > self.n as usize + 1 {
            return Err(Error::InvalidParams(format!(
                "Q needs between 1 and n+1 = {} coefficients (got {})",
                self.n + 1,
                self.q.len()
            )));
        }
        if !self.q.iter().all(|&c| finite(c)) {
            return Err(Error::InvalidParams("Q coefficients must be finite".into()));
        }
        let c = self.conditions();
        if !c.a {
            return Err(Error::InvalidParams("condition (a): Q(0) must be nonzero".into()));
        }
        if !c.b {
            return Err(Error::InvalidParams(format!(
                "condition (b): |b_n| = {} must be < 1",
                self.b_n().norm()
            )));
        }
        if !c.d {
            return Err(Error::InvalidParams(format!(
                "condition (d): 1/n + 1/d < 1 fails for n={}, d={}",
                self.n, self.d
            )));
        }
        Ok(())
    }

    pub fn q_eval(&self, z: Complex64) -> Complex64 {
        poly::eval(&self.q, z)
    }

    /// Numerator z^n (z - a) of the unperturbed map.
    pub fn base_numerator(&self) -> Poly {
        let mut p = poly::monomial(-self.a, self.n as usize);
        p.push(Complex64::new(1.0, 0.0));
        p
    }
}

/// Machine epsilon scaled for the near-cancellation tests below.
const TINY: f64 = 64.0 * f64::EPSILON;

/// The unperturbed map z^n (z - a) / Q(z).
pub fn eval_unperturbed(p: &MapParams, z: SpherePoint) -> Result<SpherePoint> {
    eval_perturbed(&p.with_lambda(Complex64::default()), z)
}

/// S(z) = z^n (z - a) / Q(z) + λ / z^d on the Riemann sphere.
///
/// For |z| < 1 the two terms are combined over the common denominator
/// z^d Q(z) and divided last; for |z| >= 1 the perturbation is small and
/// the terms are summed directly.
pub fn eval_perturbed(p: &MapParams, z: SpherePoint) -> Result<SpherePoint> {
    p.validate()?;
    let z = match z {
        SpherePoint::Infinity => return Ok(SpherePoint::Infinity),
        SpherePoint::Finite(z) => z,
    };
    let zero = Complex64::default();
    if z == zero {
        return Ok(if p.lambda == zero {
            SpherePoint::Finite(zero)
        } else {
            SpherePoint::Infinity
        });
    }
    let r = z.norm();
    let qz = p.q_eval(z);
    let zn = poly::powu(z, p.n);
    let num = zn * (z - p.a);
    if qz.norm() <= TINY * poly::abs_eval(&p.q, r) {
        let num_scale = r.powi(p.n as i32) * (r + p.a.norm());
        if num.norm() <= TINY * num_scale {
            return Err(Error::Indeterminate(z));
        }
        return Ok(SpherePoint::Infinity);
    }
    let w = if r >= 1.0 {
        num / qz + p.lambda * poly::powu(z.inv(), p.d)
    } else {
        let zd = poly::powu(z, p.d);
        let den = qz * zd;
        if den == zero {
            return Ok(SpherePoint::Infinity);
        }
        (num * zd + p.lambda * qz) / den
    };
    Ok(SpherePoint::from(w))
}

/// Sum of the moduli of the terms of S(z); divides residuals in root checks.
pub fn eval_scale(p: &MapParams, z: Complex64) -> f64 {
    let r = z.norm();
    let qz = p.q_eval(z).norm();
    r.powi(p.n as i32) * (r + p.a.norm()) / qz + p.lambda.norm() / r.powi(p.d as i32)
}

/// Derivative of S at a finite nonzero point that is not a pole.
pub fn derivative(p: &MapParams, z: Complex64) -> Complex64 {
    MapEval::new(p).step(z).1
}

/// z^{d+1} [(n+1) z^n Q - z^{n+1} Q' - a n z^{n-1} Q + a z^n Q'] - λ d Q².
///
/// Its nonzero roots are the finite free critical points of S.
pub fn critical_numerator_poly(p: &MapParams) -> Result<Poly> {
    p.validate()?;
    let n = p.n as usize;
    let d = p.d as usize;
    let one = Complex64::new(1.0, 0.0);
    let q = &p.q;
    let dq = poly::derivative(q);
    let mut bracket = poly::mul(&poly::monomial(one * (n as f64 + 1.0), n), q);
    bracket = poly::add(&bracket, &poly::mul(&poly::monomial(-one, n + 1), &dq));
    bracket = poly::add(
        &bracket,
        &poly::mul(&poly::monomial(-p.a * n as f64, n - 1), q),
    );
    bracket = poly::add(&bracket, &poly::mul(&poly::monomial(p.a, n), &dq));
    let lhs = poly::shift(&bracket, d + 1);
    let rhs = poly::scale(&poly::mul(q, q), -p.lambda * d as f64);
    Ok(poly::trim(poly::add(&lhs, &rhs)))
}

/// z^{n+d} (z - a) + λ Q(z), whose n+d+1 roots are the zeros of S.
pub fn zeros_poly(p: &MapParams) -> Result<Poly> {
    p.validate()?;
    if p.lambda == Complex64::default() {
        return Err(Error::InvalidParams("zeros_poly needs lambda != 0".into()));
    }
    let lhs = poly::shift(&p.base_numerator(), p.d as usize);
    Ok(poly::trim(poly::add(&lhs, &poly::scale(&p.q, p.lambda))))
}

/// Precomputed coefficients for the inner loops: value and derivative at
/// finite points, no sphere bookkeeping.
#[derive(Clone, Debug)]
pub struct MapEval {
    n: u32,
    d: u32,
    a: Complex64,
    lambda: Complex64,
    q: Poly,
}

impl MapEval {
    pub fn new(p: &MapParams) -> Self {
        MapEval {
            n: p.n,
            d: p.d,
            a: p.a,
            lambda: p.lambda,
            q: p.q.clone(),
        }
    }

    #[inline]
    pub fn value(&self, z: Complex64) -> Complex64 {
        let num = poly::powu(z, self.n) * (z - self.a);
        let base = num / poly::eval(&self.q, z);
        if self.lambda == Complex64::default() {
            return base;
        }
        base + self.lambda / poly::powu(z, self.d)
    }

    /// (S(z), S'(z)). Non-finite output signals a pole.
    #[inline]
    pub fn step(&self, z: Complex64) -> (Complex64, Complex64) {
        let zn1 = poly::powu(z, self.n - 1);
        let zn = zn1 * z;
        let u = z - self.a;
        let (qz, dqz) = poly::eval_with_derivative(&self.q, z);
        let num = zn * u;
        let dnum = zn1 * u * self.n as f64 + zn;
        let inv_q = qz.inv();
        let w = num * inv_q;
        let dw = (dnum * qz - num * dqz) * inv_q * inv_q;
        if self.lambda == Complex64::default() {
            return (w, dw);
        }
        let pert = self.lambda / poly::powu(z, self.d);
        (w + pert, dw - pert * self.d as f64 / z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit(lambda: f64) -> MapParams {
        MapParams::milnor(2, 3, c(1.0, 0.0), c(lambda, 0.0)).unwrap()
    }

    #[test]
    fn unperturbed_value() {
        let w = eval_perturbed(&unit(0.0), SpherePoint::Finite(c(2.0, 0.0))).unwrap();
        assert_eq!(w, SpherePoint::Finite(c(4.0, 0.0)));
    }

    #[test]
    fn pole_at_origin() {
        let w = eval_perturbed(&unit(1e-6), SpherePoint::Finite(c(0.0, 0.0))).unwrap();
        assert!(w.is_infinity());
        let w = eval_perturbed(&unit(1e-6), SpherePoint::Infinity).unwrap();
        assert!(w.is_infinity());
    }

    #[test]
    fn small_argument() {
        let w = eval_perturbed(&unit(1e-6), SpherePoint::Finite(c(0.01, 0.0)))
            .unwrap()
            .finite()
            .unwrap();
        assert!((w.re - 0.999901).abs() < 1e-12 && w.im.abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        let bad_q0 = MapParams::new(2, 3, c(1.0, 0.0), vec![c(0.0, 0.0), c(1.0, 0.0)], c(0.0, 0.0));
        assert!(matches!(bad_q0, Err(Error::InvalidParams(_))));
        let bad_bn = MapParams::new(
            2,
            3,
            c(1.0, 0.0),
            vec![c(1.0, 0.0), c(0.0, 0.0), c(1.5, 0.0)],
            c(0.0, 0.0),
        );
        assert!(matches!(bad_bn, Err(Error::InvalidParams(_))));
        assert!(MapParams::milnor(2, 2, c(1.0, 0.0), c(0.0, 0.0)).is_err());
        assert!(MapParams::milnor(3, 2, c(1.0, 0.0), c(0.0, 0.0)).is_ok());
    }

    #[test]
    fn indeterminate_when_q_shares_a_root_with_numerator() {
        // Q(z) = 1 - z vanishes at a = 1; the parameters are otherwise admissible.
        let p = MapParams::new(2, 3, c(1.0, 0.0), vec![c(1.0, 0.0), c(-1.0, 0.0)], c(0.0, 0.0))
            .unwrap();
        assert_eq!(
            eval_perturbed(&p, SpherePoint::Finite(c(1.0, 0.0))),
            Err(Error::Indeterminate(c(1.0, 0.0)))
        );
    }

    #[test]
    fn critical_poly_unit_family() {
        let lam = 1e-10;
        let cp = critical_numerator_poly(&unit(lam)).unwrap();
        let mut expect = vec![c(0.0, 0.0); 7];
        expect[0] = c(-3.0 * lam, 0.0);
        expect[5] = c(-2.0, 0.0);
        expect[6] = c(3.0, 0.0);
        assert_eq!(cp.len(), 7);
        for (x, y) in cp.iter().zip(&expect) {
            assert!((x - y).norm() < 1e-24);
        }
    }

    #[test]
    fn zeros_poly_unit_family() {
        let zp = zeros_poly(&unit(1e-10)).unwrap();
        assert_eq!(zp.len(), 7);
        assert_eq!(zp[0], c(1e-10, 0.0));
        assert_eq!(zp[5], c(-1.0, 0.0));
        assert_eq!(zp[6], c(1.0, 0.0));
        assert!(zeros_poly(&unit(0.0)).is_err());
    }

    #[test]
    fn step_derivative_matches_finite_difference() {
        let p = MapParams::blaschke(3, 2, c(0.5, 0.1), c(-3e-6, 1e-6)).unwrap();
        let m = MapEval::new(&p);
        let z = c(0.31, -0.44);
        let h = 1e-7;
        let (w, dw) = m.step(z);
        let fd = (m.value(z + h) - m.value(z - h)) / (2.0 * h);
        assert!((dw - fd).norm() < 1e-6 * dw.norm());
        let exact = eval_perturbed(&p, SpherePoint::Finite(z)).unwrap().finite().unwrap();
        assert!((w - exact).norm() < 1e-14 * w.norm());
    }
}
