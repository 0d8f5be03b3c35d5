//! Fixtures shared by the benchmarks.

use fatou::orbits::{radii_model, RadiiModel, DEFAULT_K1};
use fatou::{Complex64, MapParams, Window};

/// z^2 (z - a) + λ / z^3 with a = 0.9 + 0.6i, λ = -1e-7.
pub fn tilted() -> MapParams {
    MapParams::milnor(2, 3, Complex64::new(0.9, 0.6), Complex64::new(-1e-7, 0.0))
        .expect("valid parameters")
}

/// The unit family z^2 (z - 1) + λ / z^3.
pub fn unit_family(lambda: f64) -> MapParams {
    MapParams::milnor(2, 3, Complex64::new(1.0, 0.0), Complex64::new(lambda, 0.0))
        .expect("valid parameters")
}

pub fn radii(p: &MapParams) -> RadiiModel {
    radii_model(p, DEFAULT_K1).expect("parameters in the perturbative regime")
}

/// Square window five outer radii across, centred at the origin.
pub fn ring_window(r: &RadiiModel) -> Window {
    Window::square(Complex64::default(), 5.0 * r.r_outer)
}

/// Deterministic pseudo-random separator mask with roughly `density` set.
pub fn mask(px: usize, py: usize, density: f64) -> Vec<bool> {
    let mut x = 0x2545_f491_4f6c_dd1du64;
    (0..px * py)
        .map(|_| {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            ((x >> 11) as f64 / (1u64 << 53) as f64) < density
        })
        .collect()
}
