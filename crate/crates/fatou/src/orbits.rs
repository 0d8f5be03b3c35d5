//! Escape radius, the scale radii of the trap door and the critical annulus,
//! and single-orbit classification.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{self, MapEval, MapParams, SpherePoint};

pub const CIRCLE_SAMPLES: usize = 64;
pub const DEFAULT_K1: f64 = 1.0;
pub const POINT_MAX_ITER: u32 = 10_000;
const PREFIX_CAP: usize = 64;

fn circle(r: f64, samples: usize) -> impl Iterator<Item = Complex64> {
    (0..samples).map(move |k| Complex64::from_polar(r, 2.0 * PI * k as f64 / samples as f64))
}

fn circle_expands(m: &MapEval, r: f64) -> bool {
    circle(r, CIRCLE_SAMPLES).all(|z| {
        let w = m.value(z).norm();
        w.is_nan() || w >= 2.0 * r
    })
}

/// Smallest radius K in the doubling sequence 1, 2, 4, ... such that circles
/// of radius K, 2K and 4K are all mapped to at least twice their radius.
pub fn estimate_k(p: &MapParams) -> Result<f64> {
    p.validate()?;
    if !p.conditions().b {
        return Err(Error::NoEscapeRadius);
    }
    let m = MapEval::new(p);
    let mut r = 1.0;
    for _ in 0..60 {
        if (0..3).all(|l| circle_expands(&m, r * f64::powi(2.0, l))) {
            return Ok(r);
        }
        r *= 2.0;
    }
    Err(Error::NoEscapeRadius)
}

/// Scalar radii at one λ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiiModel {
    pub k_esc: f64,
    pub k1: f64,
    pub c1: f64,
    pub c2: f64,
    /// K₁ |λ|^{n/(n+d)}.
    pub r_trap: f64,
    /// c₁ |λ|^{1/(n+d)}.
    pub r_inner: f64,
    /// c₂ |λ|^{1/(n+d)}.
    pub r_outer: f64,
    /// Largest radius found whose circle maps outside the escape radius; the
    /// disk it bounds lies in the trap door. Zero when λ = 0.
    pub r_core: f64,
}

impl RadiiModel {
    /// Only the escape radius, for the unperturbed map.
    pub fn escape_only(k_esc: f64) -> Self {
        RadiiModel {
            k_esc,
            k1: 0.0,
            c1: 0.0,
            c2: 0.0,
            r_trap: 0.0,
            r_inner: 0.0,
            r_outer: 0.0,
            r_core: 0.0,
        }
    }

    /// Radius of the circle through the middle of the critical annulus.
    pub fn omega_radius(&self) -> f64 {
        (self.r_inner * self.r_outer).sqrt()
    }
}

/// Radii of the unperturbed map: the escape radius and, as `r_core`, a disk
/// mapped into half its radius, which lies in the basin of the origin.
pub fn unperturbed_radii(p: &MapParams) -> Result<RadiiModel> {
    let k_esc = estimate_k(p)?;
    let m = MapEval::new(&p.with_lambda(Complex64::default()));
    let mut r = 1.0f64;
    for _ in 0..60 {
        if circle(r, CIRCLE_SAMPLES).all(|z| m.value(z).norm() < 0.5 * r) {
            return Ok(RadiiModel { r_core: r, ..RadiiModel::escape_only(k_esc) });
        }
        r *= 0.5;
    }
    Err(Error::InvalidParams("no attracting disk around the origin".into()))
}

/// c₁ and c₂ from the moduli of d Q(0) / (n a) and Q(0) / a.
pub fn ring_constants(p: &MapParams) -> (f64, f64) {
    let m = 1.0 / (p.n + p.d) as f64;
    let u = (p.q0() * p.d as f64 / (p.a * p.n as f64)).norm().powf(m);
    let v = (p.q0() / p.a).norm().powf(m);
    (0.5 * u.min(v), 2.0 * u.max(v))
}

fn trap_core(m: &MapEval, k_esc: f64, start: f64) -> f64 {
    let mut r = start;
    for _ in 0..2000 {
        if circle(r, CIRCLE_SAMPLES).all(|z| {
            let w = m.value(z).norm();
            w.is_nan() || w > k_esc
        }) {
            return r;
        }
        r *= 0.9;
    }
    0.0
}

/// Radii without any regime validation.
pub fn radii_unchecked(p: &MapParams, k1: f64) -> Result<RadiiModel> {
    p.validate()?;
    if p.lambda == Complex64::default() {
        return Err(Error::InvalidParams("radii need lambda != 0".into()));
    }
    if !(k1 > 0.0 && k1.is_finite()) {
        return Err(Error::InvalidParams("K1 must be positive".into()));
    }
    let k_esc = estimate_k(p)?;
    let (c1, c2) = ring_constants(p);
    let t = p.lambda.norm();
    let unit = t.powf(1.0 / (p.n + p.d) as f64);
    let r_inner = c1 * unit;
    let r_core = trap_core(&MapEval::new(p), k_esc, r_inner);
    Ok(RadiiModel {
        k_esc,
        k1,
        c1,
        c2,
        r_trap: k1 * t.powf(p.n as f64 / (p.n + p.d) as f64),
        r_inner,
        r_outer: c2 * unit,
        r_core,
    })
}

/// Radii, validated against the asymptotic regime.
///
/// Fails with `RegimeViolation` unless r_trap < r_inner < r_outer < K and
/// every sample of the middle circle of the annulus lands in the trap door:
/// inside |w| < r_inner, with S(w) escaping past K without ever re-entering
/// the disk of radius r_outer.
pub fn radii_model(p: &MapParams, k1: f64) -> Result<RadiiModel> {
    let r = radii_unchecked(p, k1)?;
    if !(r.r_trap < r.r_inner && r.r_inner < r.r_outer && r.r_outer < r.k_esc) {
        return Err(Error::RegimeViolation(format!(
            "radii out of order: r_trap={:.3e}, r_inner={:.3e}, r_outer={:.3e}, K={}",
            r.r_trap, r.r_inner, r.r_outer, r.k_esc
        )));
    }
    if !(r.r_core > 0.0) {
        return Err(Error::RegimeViolation("no trap-door core found".into()));
    }
    let m = MapEval::new(p);
    for z in circle(r.omega_radius(), CIRCLE_SAMPLES) {
        let w = m.value(z);
        if !(w.norm() < r.r_inner) || !reaches_infinity_directly(&m, w, &r) {
            return Err(Error::RegimeViolation(format!(
                "annulus sample {z} does not map into the trap door (S(z) = {w})"
            )));
        }
    }
    Ok(r)
}

/// True when the orbit of S(w) exceeds K without visiting |z| < r_outer.
fn reaches_infinity_directly(m: &MapEval, w: Complex64, r: &RadiiModel) -> bool {
    let mut z = m.value(w);
    for _ in 0..200 {
        let a = z.norm();
        if a.is_nan() || a > r.k_esc {
            return true;
        }
        if a < r.r_outer {
            return false;
        }
        z = m.value(z);
    }
    false
}

/// Image moduli of samples on the middle circle of the annulus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnulusReport {
    pub samples: usize,
    pub radius: f64,
    /// max |S(z)| / r_trap; the strict inclusion needs this below 1.
    pub max_first_over_trap: f64,
    /// min |S²(z)| / K; the strict escape needs this above 1.
    pub min_second_over_k: f64,
    pub first_failures: usize,
    pub second_failures: usize,
}

/// The annulus mapping taken literally: every sample maps below r_trap and
/// its second iterate lands beyond K.
pub fn annulus_mapping(p: &MapParams, radii: &RadiiModel, samples: usize) -> AnnulusReport {
    let m = MapEval::new(p);
    let radius = radii.omega_radius();
    let mut rep = AnnulusReport {
        samples,
        radius,
        max_first_over_trap: 0.0,
        min_second_over_k: f64::INFINITY,
        first_failures: 0,
        second_failures: 0,
    };
    for z in circle(radius, samples) {
        let w = m.value(z);
        let w2 = m.value(w).norm();
        let f = w.norm() / radii.r_trap;
        let s = w2 / radii.k_esc;
        rep.max_first_over_trap = rep.max_first_over_trap.max(f);
        rep.min_second_over_k = rep.min_second_over_k.min(s);
        rep.first_failures += usize::from(!(f < 1.0));
        rep.second_failures += usize::from(!(s > 1.0));
    }
    rep
}

/// Escape-time classification of one orbit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EscapeRecord {
    /// First t with |z_t| > K, or None if the cap was reached first.
    pub escape_time: Option<u32>,
    pub orbit_prefix: Vec<SpherePoint>,
    pub final_modulus: f64,
}

/// Iterates until |z_t| > K or t = max_iter.
pub fn classify_point(p: &MapParams, z: Complex64, radii: &RadiiModel, max_iter: u32) -> EscapeRecord {
    let mut w = SpherePoint::from(z);
    let mut prefix = vec![w];
    for t in 0..=max_iter {
        if w.modulus() > radii.k_esc {
            return EscapeRecord {
                escape_time: Some(t),
                orbit_prefix: prefix,
                final_modulus: w.modulus(),
            };
        }
        if t == max_iter {
            break;
        }
        w = match map::eval_perturbed(p, w) {
            Ok(v) => v,
            Err(_) => break,
        };
        if prefix.len() < PREFIX_CAP {
            prefix.push(w);
        }
    }
    EscapeRecord {
        escape_time: None,
        orbit_prefix: prefix,
        final_modulus: w.modulus(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn escape_radius_unit_family() {
        let p = MapParams::milnor(2, 3, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let k = estimate_k(&p).unwrap();
        assert!(k <= 4.0);
        // Hand inequality: |z|^2 (|z| - 1) >= 2|z| once |z| >= 2.
        for z in circle(k, 512) {
            assert!(p.q.len() == 1 && z.norm() * (z.norm() - 1.0) >= 2.0 - 1e-12);
        }
        let small = p.with_lambda(c(1e-9, 0.0));
        let smaller = p.with_lambda(c(1e-10, 0.0));
        assert_eq!(estimate_k(&small).unwrap(), estimate_k(&smaller).unwrap());
    }

    #[test]
    fn escape_radius_blaschke() {
        let p = MapParams::blaschke(2, 3, c(0.5, 0.0), c(2e-8, 0.0)).unwrap();
        assert!(estimate_k(&p).unwrap().is_finite());
    }

    #[test]
    fn unit_family_constants() {
        let p = MapParams::milnor(2, 3, c(1.0, 0.0), c(1e-10, 0.0)).unwrap();
        let (c1, c2) = ring_constants(&p);
        assert!((c1 - 0.5).abs() < 1e-15);
        assert!((c2 - 2.0 * 1.5f64.powf(0.2)).abs() < 1e-14);
        let r = radii_unchecked(&p, 1.0).unwrap();
        assert!((r.r_trap - 1e-4).abs() < 1e-18);
        assert!((r.r_inner - 0.5e-2).abs() < 1e-16);
        assert!((r.r_outer - 2.1689e-2).abs() < 1e-5);
    }

    #[test]
    fn large_lambda_is_a_regime_violation() {
        let p = MapParams::milnor(2, 3, c(1.0, 0.0), c(0.5, 0.0)).unwrap();
        assert!(matches!(radii_model(&p, 1.0), Err(Error::RegimeViolation(_))));
    }

    #[test]
    fn simple_escapes() {
        let p = MapParams::milnor(2, 3, c(1.0, 0.0), c(1e-6, 0.0)).unwrap();
        let r = radii_unchecked(&p, 1.0).unwrap();
        assert_eq!(classify_point(&p, c(10.0, 0.0), &r, 100).escape_time, Some(0));
        let origin = classify_point(&p, c(0.0, 0.0), &r, 100);
        assert_eq!(origin.escape_time, Some(1));
        assert!(origin.orbit_prefix[1].is_infinity());
    }
}
