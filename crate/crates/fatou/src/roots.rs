//! Roots of the critical and zero polynomials, their first-order
//! asymptotics as λ → 0, and the distinguished points ν_λ and w_λ.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{self, MapParams, SpherePoint};
use crate::poly;

pub const DEFAULT_MAX_ITER: usize = 1000;

/// All complex roots with multiplicity, by Aberth–Ehrlich iteration.
///
/// Exactly vanishing low-order coefficients are split off as roots at the
/// origin. The remaining roots start on a circle of the Cauchy-bound radius
/// with a fixed angular offset, so the output is a deterministic function of
/// the input.
pub fn poly_roots(coeffs: &[Complex64], tol: f64) -> Result<Vec<Complex64>> {
    poly_roots_with(coeffs, tol, DEFAULT_MAX_ITER)
}

pub fn poly_roots_with(coeffs: &[Complex64], tol: f64, max_iter: usize) -> Result<Vec<Complex64>> {
    let zero = Complex64::default();
    let deg = match coeffs.last() {
        Some(&c) if c != zero => coeffs.len() - 1,
        _ => {
            return Err(Error::InvalidParams(
                "leading coefficient must be nonzero".into(),
            ))
        }
    };
    if deg == 0 {
        return Err(Error::InvalidParams("degree must be at least 1".into()));
    }
    let low = coeffs.iter().take_while(|&&c| c == zero).count();
    let reduced = &coeffs[low..];
    let mut roots = vec![zero; low];
    let m = reduced.len() - 1;
    if m == 0 {
        return Ok(roots);
    }
    if m == 1 {
        roots.push(-reduced[0] / reduced[1]);
        return Ok(roots);
    }

    let lead = reduced[m];
    let radius = 1.0
        + reduced[..m]
            .iter()
            .map(|c| (c / lead).norm())
            .fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..m)
        .map(|k| Complex64::from_polar(radius, 2.0 * PI * k as f64 / m as f64 + 0.4))
        .collect();
    let mut done = vec![false; m];
    let mut iter = 0;
    while done.iter().any(|&d| !d) {
        if iter == max_iter {
            return Err(Error::NoConvergence(max_iter));
        }
        iter += 1;
        for k in 0..m {
            if done[k] {
                continue;
            }
            let (pv, dpv) = poly::eval_with_derivative(reduced, z[k]);
            if pv == zero {
                done[k] = true;
                continue;
            }
            let ratio = pv / dpv;
            let repulsion: Complex64 = (0..m)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let corr = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !(corr.re.is_finite() && corr.im.is_finite()) {
                // Coincident iterates; nudge and retry next sweep.
                z[k] += Complex64::from_polar(radius * 1e-8, iter as f64);
                continue;
            }
            z[k] -= corr;
            if corr.norm() <= 4.0 * f64::EPSILON * z[k].norm() {
                done[k] = true;
            }
        }
    }

    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    for &r in &z {
        let res = poly::eval(coeffs, r).norm();
        if res >= tol * scale {
            return Err(Error::NoConvergence(max_iter));
        }
    }
    roots.extend(z);
    Ok(roots)
}

/// Principal (n+d)-th root of w times each (n+d)-th root of unity.
fn ring_of(p: &MapParams, base: Complex64) -> Vec<Complex64> {
    let m = (p.n + p.d) as f64;
    let r = base.powf(1.0 / m) * p.lambda.powf(1.0 / m);
    (0..p.n + p.d)
        .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / m) * r)
        .collect()
}

/// ξ (d Q(0) / (-n a))^{1/(n+d)} λ^{1/(n+d)} over all roots of unity ξ.
pub fn asymptotic_critical(p: &MapParams) -> Result<Vec<Complex64>> {
    nonzero_lambda(p)?;
    Ok(ring_of(p, p.q0() * p.d as f64 / (-p.a * p.n as f64)))
}

/// ξ (Q(0) / a)^{1/(n+d)} λ^{1/(n+d)} over all roots of unity ξ.
pub fn asymptotic_zeros(p: &MapParams) -> Result<Vec<Complex64>> {
    nonzero_lambda(p)?;
    Ok(ring_of(p, p.q0() / p.a))
}

fn nonzero_lambda(p: &MapParams) -> Result<()> {
    p.validate()?;
    if p.lambda == Complex64::default() {
        return Err(Error::InvalidParams("asymptotics need lambda != 0".into()));
    }
    Ok(())
}

/// For each target, the index of the nearest candidate. Errors unless the
/// assignment is injective.
pub fn match_nearest(targets: &[Complex64], candidates: &[Complex64]) -> Result<Vec<usize>> {
    let mut picks = Vec::with_capacity(targets.len());
    for t in targets {
        let best = candidates
            .iter()
            .enumerate()
            .min_by(|x, y| (x.1 - t).norm().total_cmp(&(y.1 - t).norm()))
            .map(|(i, _)| i)
            .ok_or_else(|| Error::AmbiguousPartition("no candidates".into()))?;
        if picks.contains(&best) {
            return Err(Error::AmbiguousPartition(format!(
                "two predictions share the nearest root {}",
                candidates[best]
            )));
        }
        picks.push(best);
    }
    Ok(picks)
}

/// max over ξ of |root - prediction| / |λ|^{1/(n+d)}, after one-to-one matching.
pub fn pairing_residual(p: &MapParams, roots: &[Complex64], predictions: &[Complex64]) -> Result<f64> {
    let picks = match_nearest(predictions, roots)?;
    let unit = p.lambda.norm().powf(1.0 / (p.n + p.d) as f64);
    Ok(predictions
        .iter()
        .zip(&picks)
        .map(|(c, &i)| (roots[i] - c).norm() / unit)
        .fold(0.0, f64::max))
}

/// Critical points and zeros of one map, sorted into their roles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalSet {
    /// The n+d critical points born near the origin, ordered like `asymptotic_ring`.
    pub free_ring: Vec<Complex64>,
    pub nu_lambda: Complex64,
    pub nu_zero: Complex64,
    pub w_lambda: Complex64,
    /// The n+d zeros near the origin, ordered like `asymptotic_zeros`.
    pub ring_zeros: Vec<Complex64>,
    /// Continuations of the critical points in the basin of infinity.
    pub infinity_side: Vec<Complex64>,
    pub asymptotic_ring: Vec<Complex64>,
    pub asymptotic_zeros: Vec<Complex64>,
}

impl CriticalSet {
    /// Every finite critical point other than the origin.
    pub fn all_free(&self) -> Vec<Complex64> {
        let mut v = self.free_ring.clone();
        v.push(self.nu_lambda);
        v.extend(&self.infinity_side);
        v
    }
}

/// Tolerance for root residuals, relative to the largest coefficient.
pub const ROOT_TOL: f64 = 1e-10;

/// Iterates the unperturbed map from z; true when the orbit falls into the
/// superattracting basin of the origin.
fn attracted_to_origin(p: &MapParams, z: Complex64) -> bool {
    let p0 = p.with_lambda(Complex64::default());
    let mut w = SpherePoint::Finite(z);
    for _ in 0..10_000 {
        w = match map::eval_perturbed(&p0, w) {
            Ok(v) => v,
            Err(_) => return false,
        };
        let r = w.modulus();
        if r < 1e-12 {
            return true;
        }
        if !r.is_finite() || r > 1e12 {
            return false;
        }
    }
    false
}

/// The free critical point of the unperturbed map lying in the basin of 0.
pub fn unperturbed_free_critical(p: &MapParams) -> Result<Complex64> {
    let p0 = p.with_lambda(Complex64::default());
    let cp = map::critical_numerator_poly(&p0)?;
    let roots = poly_roots(&cp, ROOT_TOL)?;
    let inside: Vec<Complex64> = roots
        .into_iter()
        .filter(|&r| r != Complex64::default() && attracted_to_origin(p, r))
        .collect();
    match inside.as_slice() {
        [nu] => Ok(*nu),
        [] => Err(Error::AmbiguousPartition(
            "no unperturbed critical point is attracted to the origin".into(),
        )),
        _ => Err(Error::AmbiguousPartition(format!(
            "{} unperturbed critical points are attracted to the origin",
            inside.len()
        ))),
    }
}

/// Splits the critical points into the perturbation ring, ν_λ and the
/// infinity side, and the zeros into the ring and w_λ.
pub fn identify_distinguished(
    p: &MapParams,
    all_critical: &[Complex64],
    all_zeros: &[Complex64],
) -> Result<CriticalSet> {
    let nu_zero = unperturbed_free_critical(p)?;
    let zero = Complex64::default();
    let mut crit: Vec<Complex64> = all_critical.iter().copied().filter(|&c| c != zero).collect();

    if p.lambda == zero {
        let i = nearest(&crit, nu_zero)?;
        let nu = crit.remove(i);
        return Ok(CriticalSet {
            free_ring: Vec::new(),
            nu_lambda: nu,
            nu_zero,
            w_lambda: p.a,
            ring_zeros: Vec::new(),
            infinity_side: crit,
            asymptotic_ring: Vec::new(),
            asymptotic_zeros: Vec::new(),
        });
    }

    let asymptotic_ring = asymptotic_critical(p)?;
    let picks = match_nearest(&asymptotic_ring, &crit)?;
    let free_ring: Vec<Complex64> = picks.iter().map(|&i| crit[i]).collect();
    let mut rest: Vec<Complex64> = crit
        .iter()
        .enumerate()
        .filter(|(i, _)| !picks.contains(i))
        .map(|(_, &c)| c)
        .collect();
    let i = nearest(&rest, nu_zero)?;
    let nu = rest.remove(i);
    let limit = p.lambda.norm().powf(1.0 / (2.0 * (p.n + p.d) as f64));
    if (nu - nu_zero).norm() > limit {
        return Err(Error::AmbiguousPartition(format!(
            "|nu_lambda - nu_0| = {:.3e} exceeds |lambda|^(1/(2(n+d))) = {:.3e}",
            (nu - nu_zero).norm(),
            limit
        )));
    }

    let asymptotic_zeros = asymptotic_zeros(p)?;
    let zpicks = match_nearest(&asymptotic_zeros, all_zeros)?;
    let ring_zeros: Vec<Complex64> = zpicks.iter().map(|&i| all_zeros[i]).collect();
    let others: Vec<Complex64> = all_zeros
        .iter()
        .enumerate()
        .filter(|(i, _)| !zpicks.contains(i))
        .map(|(_, &z)| z)
        .collect();
    let w = others[nearest(&others, p.a)?];

    Ok(CriticalSet {
        free_ring,
        nu_lambda: nu,
        nu_zero,
        w_lambda: w,
        ring_zeros,
        infinity_side: rest,
        asymptotic_ring,
        asymptotic_zeros,
    })
}

fn nearest(v: &[Complex64], target: Complex64) -> Result<usize> {
    v.iter()
        .enumerate()
        .min_by(|x, y| (x.1 - target).norm().total_cmp(&(y.1 - target).norm()))
        .map(|(i, _)| i)
        .ok_or_else(|| Error::AmbiguousPartition("empty root list".into()))
}

/// Root-find both polynomials and identify the distinguished points.
pub fn critical_set(p: &MapParams) -> Result<CriticalSet> {
    let crit = poly_roots(&map::critical_numerator_poly(p)?, ROOT_TOL)?;
    let zeros = if p.lambda == Complex64::default() {
        let mut z = vec![Complex64::default(); (p.n + p.d) as usize];
        z.push(p.a);
        z
    } else {
        poly_roots(&map::zeros_poly(p)?, ROOT_TOL)?
    };
    identify_distinguished(p, &crit, &zeros)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn quadratic() {
        let mut r = poly_roots(&[c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], 1e-12).unwrap();
        r.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((r[0] - c(-1.0, 0.0)).norm() < 1e-14);
        assert!((r[1] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn fifth_roots_of_tiny_constant() {
        let mut coeffs = vec![c(0.0, 0.0); 6];
        coeffs[0] = c(-1e-10, 0.0);
        coeffs[5] = c(1.0, 0.0);
        let r = poly_roots(&coeffs, 1e-12).unwrap();
        for z in &r {
            assert!((z.norm() - 1e-2).abs() < 1e-15);
            let k = z.arg() / (2.0 * PI / 5.0);
            assert!((k - k.round()).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_zero_leading_coefficient() {
        assert!(poly_roots(&[c(1.0, 0.0), c(0.0, 0.0)], 1e-12).is_err());
        assert!(poly_roots(&[c(1.0, 0.0)], 1e-12).is_err());
    }

    #[test]
    fn exact_zero_roots_split_off() {
        // z^5 (3z - 2)
        let mut coeffs = vec![c(0.0, 0.0); 7];
        coeffs[5] = c(-2.0, 0.0);
        coeffs[6] = c(3.0, 0.0);
        let r = poly_roots(&coeffs, 1e-12).unwrap();
        assert_eq!(r.iter().filter(|z| **z == c(0.0, 0.0)).count(), 5);
        assert!(r.iter().any(|z| (z - c(2.0 / 3.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn unit_family_ring_modulus() {
        let p = MapParams::milnor(2, 3, c(1.0, 0.0), c(1e-10, 0.0)).unwrap();
        let a = asymptotic_critical(&p).unwrap();
        for z in &a {
            assert!((z.norm() - 1.5f64.powf(0.2) * 1e-2).abs() < 1e-15);
        }
        for w in a.windows(2) {
            let step = (w[1] / w[0]).arg();
            assert!((step - 2.0 * PI / 5.0).abs() < 1e-12);
        }
        let z = asymptotic_zeros(&p).unwrap();
        assert!((z[0] - c(1e-2, 0.0)).norm() < 1e-16);
    }

    #[test]
    fn distinguished_points_unit_family() {
        let p = MapParams::milnor(2, 3, c(1.0, 0.0), c(1e-10, 0.0)).unwrap();
        let cs = critical_set(&p).unwrap();
        assert_eq!(cs.free_ring.len(), 5);
        assert_eq!(cs.ring_zeros.len(), 5);
        assert!(cs.infinity_side.is_empty());
        assert!((cs.nu_zero - c(2.0 / 3.0, 0.0)).norm() < 1e-14);
        assert!((cs.nu_lambda - c(2.0 / 3.0, 0.0)).norm() < 1e-6);
        assert!((cs.w_lambda - c(1.0, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn unperturbed_partition() {
        let p = MapParams::milnor(2, 3, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let cs = critical_set(&p).unwrap();
        assert!(cs.free_ring.is_empty());
        assert_eq!(cs.nu_lambda, cs.nu_zero);
        assert_eq!(cs.w_lambda, c(1.0, 0.0));
    }
}
