//! Dense complex polynomials, coefficients in ascending order (`c[0] + c[1] z + ...`).

use num_complex::Complex64;

pub type Poly = Vec<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub fn eval(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(ZERO, |acc, &ci| acc * z + ci)
}

/// Value and first derivative by a single Horner pass.
#[inline]
pub fn eval_with_derivative(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = ZERO;
    let mut dp = ZERO;
    for &ci in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + ci;
    }
    (p, dp)
}

/// Sum of |c_i| |z|^i, the natural scale of rounding error in `eval`.
pub fn abs_eval(c: &[Complex64], r: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, ci| acc * r + ci.norm())
}

pub fn derivative(c: &[Complex64]) -> Poly {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &ci)| ci * k as f64)
        .collect()
}

pub fn mul(a: &[Complex64], b: &[Complex64]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

pub fn add(a: &[Complex64], b: &[Complex64]) -> Poly {
    let mut out = vec![ZERO; a.len().max(b.len())];
    for (i, &ai) in a.iter().enumerate() {
        out[i] += ai;
    }
    for (i, &bi) in b.iter().enumerate() {
        out[i] += bi;
    }
    out
}

pub fn scale(a: &[Complex64], s: Complex64) -> Poly {
    a.iter().map(|&ai| ai * s).collect()
}

/// Multiply by z^k.
pub fn shift(a: &[Complex64], k: usize) -> Poly {
    let mut out = vec![ZERO; k];
    out.extend_from_slice(a);
    out
}

/// The monomial c z^k.
pub fn monomial(c: Complex64, k: usize) -> Poly {
    let mut out = vec![ZERO; k + 1];
    out[k] = c;
    out
}

/// Drop exactly-zero leading coefficients.
pub fn trim(mut a: Poly) -> Poly {
    while a.len() > 1 && a[a.len() - 1] == ZERO {
        a.pop();
    }
    a
}

pub fn degree(a: &[Complex64]) -> Option<usize> {
    a.iter().rposition(|&c| c != ZERO)
}

/// Integer power by repeated squaring.
#[inline]
pub fn powu(z: Complex64, k: u32) -> Complex64 {
    let mut base = z;
    let mut e = k;
    let mut acc = Complex64::new(1.0, 0.0);
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn horner_matches_expansion() {
        // (z - 1)(z + 2) = z^2 + z - 2
        let p = mul(&[c(-1.0), c(1.0)], &[c(2.0), c(1.0)]);
        assert_eq!(p, vec![c(-2.0), c(1.0), c(1.0)]);
        let z = Complex64::new(0.3, -1.2);
        let (v, dv) = eval_with_derivative(&p, z);
        assert!((v - (z * z + z - 2.0)).norm() < 1e-14);
        assert!((dv - (z * 2.0 + 1.0)).norm() < 1e-14);
    }

    #[test]
    fn powu_small_exponents() {
        let z = Complex64::new(0.7, 0.2);
        assert_eq!(powu(z, 0), c(1.0));
        assert!((powu(z, 5) - z * z * z * z * z).norm() < 1e-15);
    }

    #[test]
    fn trim_and_degree() {
        let p = trim(vec![c(1.0), c(0.0), c(2.0), c(0.0)]);
        assert_eq!(p.len(), 3);
        assert_eq!(degree(&p), Some(2));
        assert_eq!(degree(&[c(0.0)]), None);
    }
}
