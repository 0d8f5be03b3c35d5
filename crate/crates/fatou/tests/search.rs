use fatou::analysis::{itinerary_only, AnalysisConfig};
use fatou::search::{find_lambda_for_m, Probe, SearchOptions};
use fatou::{Complex64, Error, MapParams};

fn milnor() -> MapParams {
    MapParams::milnor(2, 3, Complex64::new(0.5, 0.0), Complex64::default()).unwrap()
}

fn options(t_hi: f64, t_lo: f64) -> SearchOptions {
    let scan = AnalysisConfig { resolution: 384, disk_window: false, ..AnalysisConfig::default() };
    let verify = AnalysisConfig { resolution: 768, ..AnalysisConfig::default() };
    SearchOptions { t_hi, t_lo, ratio: 1.1, scan, verify, ..SearchOptions::default() }
}

#[test]
fn found_lambda_has_the_requested_ring_index() {
    let p0 = milnor();
    let opts = options(1e-8, 1e-12);
    let res = find_lambda_for_m(&p0, 1, &opts).unwrap();
    let t = res.lambda_found.norm();
    assert!(t <= opts.t_hi && t >= opts.t_lo, "{t:e}");
    assert!((res.lambda_found.arg().abs() - opts.ray_angle).abs() < 1e-9);
    assert_eq!(res.verification.ring_index(), Some(1));
    assert_eq!((res.requested.i, res.requested.j, res.requested.l), (0, 1, 0));

    // Independent re-check of the certificate.
    let rec = itinerary_only(&p0.with_lambda(res.lambda_found), &opts.verify).unwrap();
    assert_eq!(rec.ring_index(), Some(1));

    // Deeper capture as |λ| shrinks along the ray.
    let mut rings: Vec<(f64, u32)> = res
        .scan
        .iter()
        .filter_map(|s| match s.probe {
            Probe::Ring { r } => Some((s.t, r)),
            _ => None,
        })
        .collect();
    rings.sort_by(|a, b| b.0.total_cmp(&a.0));
    assert!(rings.windows(2).all(|w| w[1].1 >= w[0].1), "{rings:?}");
}

#[test]
fn band_outside_the_range_is_not_found() {
    let opts = options(1e-18, 5e-19);
    match find_lambda_for_m(&milnor(), 1, &opts) {
        Err(Error::NotFound(_)) => {}
        other => panic!("expected NotFound, got {other:?}"),
    }
}
