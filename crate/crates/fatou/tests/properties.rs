use std::collections::VecDeque;

use fatou::connectivity::{
    factorizations, kappa_u64, propagate_rh, status_of, witness, Status,
};
use fatou::map::{eval_perturbed, eval_unperturbed, zeros_poly};
use fatou::orbits::{classify_point, radii_model};
use fatou::raster::{grid_from_mask, measure_components, NONE};
use fatou::roots::{poly_roots, ROOT_TOL};
use fatou::{Complex64, MapParams, Region, SpherePoint, Window};
use proptest::prelude::*;

fn unit(lambda: f64) -> MapParams {
    MapParams::milnor(2, 3, Complex64::new(1.0, 0.0), Complex64::new(lambda, 0.0)).unwrap()
}

fn tilted() -> MapParams {
    MapParams::milnor(2, 3, Complex64::new(0.9, 0.6), Complex64::new(-1e-7, 0.0)).unwrap()
}

/// Holes of label `id` by flood fill: 8-connected regions of everything else
/// that do not reach the frame.
fn holes_by_flood_fill(labels: &[u32], px: usize, py: usize, id: u32) -> u32 {
    let mut seen = vec![false; px * py];
    let mut holes = 0;
    for start in 0..px * py {
        if seen[start] || labels[start] == id {
            continue;
        }
        let mut bounded = true;
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(i) = queue.pop_front() {
            let (x, y) = ((i % px) as i64, (i / px) as i64);
            if x == 0 || y == 0 || x == px as i64 - 1 || y == py as i64 - 1 {
                bounded = false;
            }
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let (u, v) = (x + dx, y + dy);
                    if u < 0 || v < 0 || u >= px as i64 || v >= py as i64 {
                        continue;
                    }
                    let j = v as usize * px + u as usize;
                    if !seen[j] && labels[j] != id {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
        }
        holes += u32::from(bounded);
    }
    holes
}

fn status_rank(s: Status) -> u8 {
    match s {
        Status::Guaranteed => 0,
        Status::Possible => 1,
        Status::Excluded => 2,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn escape_time_drops_by_one(r in 0.0f64..1.0, theta in 0.0f64..std::f64::consts::TAU) {
        let p = tilted();
        let radii = radii_model(&p, 1.0).unwrap();
        let z = Complex64::from_polar(r * radii.k_esc, theta);
        let e = classify_point(&p, z, &radii, 200).escape_time;
        if let Some(t) = e.filter(|&t| t >= 1) {
            let w = eval_perturbed(&p, z.into()).unwrap().finite().unwrap();
            prop_assert_eq!(classify_point(&p, w, &radii, 200).escape_time, Some(t - 1));
        }
    }

    #[test]
    fn euler_count_matches_flood_fill(
        bits in prop::collection::vec(prop::bool::weighted(0.45), 14 * 11)
    ) {
        let (px, py) = (14, 11);
        let grid = grid_from_mask(Window::new(Complex64::default(), 1.4, 1.1), px, py, &bits);
        for s in measure_components(&grid) {
            let holes = holes_by_flood_fill(&grid.filled_id, px, py, s.id);
            prop_assert_eq!(s.connectivity, holes + 1, "component {}", s.id);
        }
    }

    #[test]
    fn conjugate_points_escape_together(
        x in -2.0f64..2.0,
        y in -2.0f64..2.0,
        e in 6.0f64..12.0,
    ) {
        let p = unit(10f64.powf(-e));
        let radii = radii_model(&p, 1.0).unwrap();
        let z = Complex64::new(x, y);
        prop_assert_eq!(
            classify_point(&p, z, &radii, 300).escape_time,
            classify_point(&p, z.conj(), &radii, 300).escape_time
        );
    }

    #[test]
    fn zeros_map_to_zero_and_origin_to_infinity(
        e in 6.0f64..12.0,
        theta in 0.0f64..std::f64::consts::TAU,
    ) {
        let p = tilted().with_lambda(Complex64::from_polar(10f64.powf(-e), theta));
        prop_assert_eq!(eval_perturbed(&p, SpherePoint::Finite(Complex64::default())).unwrap(), SpherePoint::Infinity);
        prop_assert_eq!(eval_perturbed(&p, SpherePoint::Infinity).unwrap(), SpherePoint::Infinity);
        let zeros = poly_roots(&zeros_poly(&p).unwrap(), ROOT_TOL).unwrap();
        prop_assert_eq!(zeros.len(), (p.n + p.d + 1) as usize);
        for z in zeros {
            let w = eval_perturbed(&p, z.into()).unwrap().modulus();
            prop_assert!(w <= 1e-7 * fatou::map::eval_scale(&p, z), "S({z}) = {w}");
        }
    }

    #[test]
    fn zero_lambda_is_the_base_map(x in -3.0f64..3.0, y in -3.0f64..3.0) {
        let p0 = tilted().with_lambda(Complex64::default());
        let z = SpherePoint::Finite(Complex64::new(x, y));
        prop_assert_eq!(eval_perturbed(&p0, z).unwrap(), eval_unperturbed(&tilted(), z).unwrap());
    }

    #[test]
    fn status_improves_with_depth(j in 0u32..6, l in 0u32..20, k in 1u32..10) {
        prop_assert!(status_rank(status_of(j, l, k + 1)) <= status_rank(status_of(j, l, k)));
        prop_assert!(status_rank(status_of(j, l + 1, k)) >= status_rank(status_of(j, l, k)));
    }

    #[test]
    fn preimage_chain_matches_kappa(
        n in 2u32..5,
        d in 2u32..5,
        i in 0u32..4,
        j in 0u32..4,
        l in 0u32..4,
    ) {
        let mut kappa = 3u64;
        for (step, times) in [(Region::UNp1, i), (Region::UD, j), (Region::UN, l)] {
            for _ in 0..times {
                kappa = propagate_rh(n, d, kappa, step).unwrap();
            }
        }
        prop_assert_eq!(kappa, kappa_u64(n, d, i, j, l).unwrap());
        prop_assert!(factorizations(n, d, kappa - 2).unwrap().contains(&(i, j, l)));
    }

    #[test]
    fn witnesses_are_consistent(n in 2u32..5, d in 2u32..5, k in 1u32..5, i in 0u32..3, j in 0u32..3, l in 0u32..8) {
        let w = witness(n, d, k, i, j, l);
        prop_assert_eq!(w.status, status_of(j, l, k));
        prop_assert_eq!(u64::try_from(&w.kappa).unwrap(), kappa_u64(n, d, i, j, l).unwrap());
    }
}

#[test]
fn flood_fill_oracle_sees_an_annulus() {
    let (px, py) = (7, 7);
    let mut sep = vec![true; px * py];
    for y in 1..6 {
        for x in 1..6 {
            if x == 1 || x == 5 || y == 1 || y == 5 {
                sep[y * px + x] = false;
            }
        }
    }
    // An inner disk keeps the hole from being filled as separator-only.
    sep[3 * px + 3] = false;
    let grid = grid_from_mask(Window::new(Complex64::default(), 1.0, 1.0), px, py, &sep);
    let ring = grid.component_id[px + 1];
    assert_ne!(ring, NONE);
    assert_eq!(holes_by_flood_fill(&grid.filled_id, px, py, ring), 1);
    let s = measure_components(&grid).into_iter().find(|s| s.id == ring).unwrap();
    assert_eq!(s.connectivity, 2);
}
