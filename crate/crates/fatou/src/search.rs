//! Hunting for λ on a ray so that ν_λ lies in the m-th nested preimage of
//! the critical annulus.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::{analyze, itinerary_only, Analysis, AnalysisConfig};
use crate::connectivity::{
    kappa_u64, measured_components, witness, ConnectivityWitness, ItineraryRecord,
    MeasuredComponent, Region, Status, Terminal,
};
use crate::error::{Error, Result};
use crate::map::MapParams;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub ray_angle: f64,
    pub t_hi: f64,
    pub t_lo: f64,
    /// Geometric step of the scan, below 1.
    pub factor: f64,
    /// Bisection stops once the bracketing t values are this close in ratio.
    pub ratio: f64,
    pub max_bisections: u32,
    /// Angle offsets tried in turn after a non-surrounding capture.
    pub angle_offsets: Vec<f64>,
    /// Used for every scan point.
    pub scan: AnalysisConfig,
    /// Used to re-verify the returned λ.
    pub verify: AnalysisConfig,
}

impl Default for SearchOptions {
    fn default() -> Self {
        let scan = AnalysisConfig {
            resolution: 512,
            disk_window: false,
            ..AnalysisConfig::default()
        };
        SearchOptions {
            ray_angle: PI,
            t_hi: 1e-6,
            t_lo: 1e-12,
            factor: 0.8,
            ratio: 1.02,
            max_bisections: 60,
            angle_offsets: vec![0.05, -0.05, 0.1, -0.1],
            scan,
            verify: AnalysisConfig::default(),
        }
    }
}

/// What one scan point showed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Probe {
    /// ν_λ lies in the r-th nested preimage of A.
    Ring { r: u32 },
    /// ν_λ reaches Bdd(A) off A itself.
    Inner { k: u32 },
    NonSurrounding { k: u32 },
    Regime { reason: String },
    Unresolved { reason: String },
}

impl Probe {
    fn ring(&self) -> Option<u32> {
        match self {
            Probe::Ring { r } => Some(*r),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSample {
    pub t: f64,
    pub probe: Probe,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub lambda_found: Complex64,
    pub m: u32,
    pub verification: ItineraryRecord,
    pub requested: ConnectivityWitness,
    pub ray_angle: f64,
    /// Scan points in the order visited, bisection points included.
    pub scan: Vec<ScanSample>,
}

fn probe(p0: &MapParams, lambda: Complex64, cfg: &AnalysisConfig) -> Probe {
    match itinerary_only(&p0.with_lambda(lambda), cfg) {
        Ok(rec) if !rec.u_nu_surrounds => Probe::NonSurrounding { k: rec.k },
        Ok(rec) if rec.terminal == Terminal::LandsInA => Probe::Ring { r: rec.k },
        Ok(rec) => Probe::Inner { k: rec.k },
        Err(Error::RegimeViolation(s)) => Probe::Regime { reason: s },
        Err(e) => Probe::Unresolved { reason: e.to_string() },
    }
}

struct Scanner<'a> {
    p0: &'a MapParams,
    angle: f64,
    cfg: &'a AnalysisConfig,
    samples: Vec<ScanSample>,
}

impl Scanner<'_> {
    fn at(&mut self, t: f64) -> Probe {
        let pr = probe(self.p0, Complex64::from_polar(t, self.angle), self.cfg);
        self.samples.push(ScanSample { t, probe: pr.clone() });
        pr
    }

    /// Moves `inside` toward `outside` until they are within `ratio`.
    fn edge(&mut self, m: u32, mut inside: f64, mut outside: f64, opts: &SearchOptions) -> f64 {
        for _ in 0..opts.max_bisections {
            if (inside / outside).max(outside / inside) <= opts.ratio {
                break;
            }
            let mid = (inside * outside).sqrt();
            if self.at(mid).ring() == Some(m) {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        inside
    }
}

/// Scans t from t_hi down to t_lo with λ = t·e^{iθ}, refines the first band
/// where the ring index equals m and returns its log-midpoint, re-verified
/// with `opts.verify`.
pub fn find_lambda_for_m(p0: &MapParams, m: u32, opts: &SearchOptions) -> Result<SearchResult> {
    find_on_ray(p0, m, opts.ray_angle, opts)
}

fn find_on_ray(p0: &MapParams, m: u32, angle: f64, opts: &SearchOptions) -> Result<SearchResult> {
    if m == 0 {
        return Err(Error::InvalidParams("m must be at least 1".into()));
    }
    if !(opts.t_hi > opts.t_lo && opts.t_lo > 0.0) {
        return Err(Error::InvalidParams("need t_hi > t_lo > 0".into()));
    }
    if !(opts.factor > 0.0 && opts.factor < 1.0 && opts.ratio > 1.0) {
        return Err(Error::InvalidParams("need 0 < factor < 1 < ratio".into()));
    }
    let mut sc = Scanner { p0, angle, cfg: &opts.scan, samples: Vec::new() };
    let mut prev: Option<(f64, Option<u32>)> = None;
    let mut band: Option<(f64, f64)> = None;
    let mut non_surrounding = false;
    let mut t = opts.t_hi;
    while t >= opts.t_lo {
        let pr = sc.at(t);
        non_surrounding |= matches!(pr, Probe::NonSurrounding { .. });
        let r = pr.ring();
        if r == Some(m) {
            let top = match prev {
                Some((tp, _)) => sc.edge(m, t, tp, opts),
                None => t,
            };
            band = Some((top, t));
            break;
        }
        if let (Some(r), Some((tp, Some(rp)))) = (r, prev) {
            if rp < m && r > m {
                // The band fell between two scan points.
                let (mut above, mut below) = (tp, t);
                for _ in 0..opts.max_bisections {
                    let mid = (above * below).sqrt();
                    match sc.at(mid).ring() {
                        Some(x) if x == m => {
                            band = Some((mid, mid));
                            break;
                        }
                        Some(x) if x > m => below = mid,
                        _ => above = mid,
                    }
                    if above / below <= opts.ratio {
                        break;
                    }
                }
                break;
            }
        }
        if r.is_some_and(|r| r > m) {
            break;
        }
        if r.is_some() {
            prev = Some((t, r));
        } else if prev.is_some() {
            prev = Some((t, None));
        }
        t *= opts.factor;
    }
    let Some((top, first)) = band else {
        return Err(if non_surrounding {
            Error::NonSurroundingCapture
        } else {
            Error::NotFound(format!(
                "no ring index {m} for t in [{:e}, {:e}] at angle {angle}",
                opts.t_lo, opts.t_hi
            ))
        });
    };
    // Follow the band down to its lower edge.
    let mut last = first;
    let mut below = None;
    let mut t = first * opts.factor;
    while t >= opts.t_lo * opts.factor {
        if sc.at(t).ring() == Some(m) {
            last = t;
            t *= opts.factor;
        } else {
            below = Some(t);
            break;
        }
    }
    let bottom = match below {
        Some(b) => sc.edge(m, last, b, opts),
        None => last,
    };
    let mut candidates = vec![(top * bottom).sqrt()];
    let mut inside: Vec<f64> = sc
        .samples
        .iter()
        .filter(|s| s.probe.ring() == Some(m))
        .map(|s| s.t)
        .collect();
    let mid = candidates[0];
    inside.sort_by(|a, b| (a / mid).ln().abs().total_cmp(&(b / mid).ln().abs()));
    candidates.extend(inside);
    let mut last_err = None;
    for t in candidates {
        let lambda = Complex64::from_polar(t, angle);
        match itinerary_only(&p0.with_lambda(lambda), &opts.verify) {
            Ok(rec) if rec.ring_index() == Some(m) => {
                return Ok(SearchResult {
                    lambda_found: lambda,
                    m,
                    verification: rec,
                    requested: witness(p0.n, p0.d, m, 0, 1, m - 1),
                    ray_angle: angle,
                    scan: sc.samples,
                });
            }
            Ok(rec) => last_err = Some(format!("verification found k = {}", rec.k)),
            Err(e) => last_err = Some(e.to_string()),
        }
    }
    Err(Error::Unresolved(format!(
        "ring index {m} seen at scan resolution but not confirmed: {}",
        last_err.unwrap_or_default()
    )))
}

/// The smallest capture depth that makes (i, j, l) guaranteed.
pub fn required_m(j: u32, l: u32) -> Result<u32> {
    if j == 0 {
        if l > 0 {
            return Err(Error::Unrealizable(format!(
                "l = {l} > 0 needs j > 0, since l <= j(k - 1)"
            )));
        }
        return Ok(1);
    }
    Ok(l.div_ceil(j) + 1)
}

/// A realized connectivity: the search result plus the full analysis at λ.
#[derive(Clone, Debug)]
pub struct Realization {
    pub result: SearchResult,
    pub analysis: Analysis,
    /// Resolved component with the requested connectivity, if the raster shows one.
    pub component: Option<MeasuredComponent>,
    pub predicted_zone: Option<Region>,
}

impl Realization {
    pub fn resolution_insufficient(&self) -> bool {
        self.component.is_none()
    }
}

/// Zone where the first preimage carrying (i, j, l) sits, when it is one
/// step from U_ν.
pub fn predicted_zone(i: u32, j: u32, l: u32) -> Option<Region> {
    match (i, j, l) {
        (0, 0, 0) => Some(Region::UNu),
        (1, 0, 0) => Some(Region::UNp1),
        (0, 1, 0) => Some(Region::UD),
        _ => None,
    }
}

/// Finds λ making κ = (n+1)^i d^j n^l + 2 guaranteed, then rasterizes it with
/// `opts.verify` and looks for the component. Rays where ν_λ is captured by a
/// non-surrounding component are abandoned for the offsets in
/// `opts.angle_offsets`.
pub fn realize_connectivity(
    p0: &MapParams,
    i: u32,
    j: u32,
    l: u32,
    opts: &SearchOptions,
) -> Result<Realization> {
    let m = required_m(j, l)?;
    let mut angles = vec![opts.ray_angle];
    angles.extend(opts.angle_offsets.iter().map(|o| opts.ray_angle + o));
    let mut err = Error::NonSurroundingCapture;
    for angle in angles {
        match find_on_ray(p0, m, angle, opts) {
            Ok(mut result) => {
                result.requested = witness(p0.n, p0.d, m, i, j, l);
                debug_assert_eq!(result.requested.status, Status::Guaranteed);
                return finish(p0, result, i, j, l, opts);
            }
            Err(Error::NonSurroundingCapture) => continue,
            Err(e) => {
                err = e;
                break;
            }
        }
    }
    Err(err)
}

fn finish(
    p0: &MapParams,
    result: SearchResult,
    i: u32,
    j: u32,
    l: u32,
    opts: &SearchOptions,
) -> Result<Realization> {
    let analysis = analyze(&p0.with_lambda(result.lambda_found), &opts.verify)?;
    let target = kappa_u64(p0.n, p0.d, i, j, l)?;
    let zone = predicted_zone(i, j, l);
    let measured = measured_components(
        &analysis.atlas,
        analysis.regions.as_deref(),
        opts.verify.min_pixels,
    );
    let mut hits: Vec<MeasuredComponent> = measured
        .into_iter()
        .filter(|c| c.connectivity as u64 == target && c.surrounds_origin)
        .collect();
    hits.sort_by_key(|c| (zone.is_some() && c.zone != zone, std::cmp::Reverse(c.pixel_count)));
    Ok(Realization {
        result,
        analysis,
        component: hits.into_iter().next(),
        predicted_zone: zone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn required_depths() {
        assert_eq!(required_m(1, 0), Ok(1));
        assert_eq!(required_m(0, 0), Ok(1));
        assert_eq!(required_m(1, 3), Ok(4));
        assert_eq!(required_m(2, 3), Ok(3));
        assert!(matches!(required_m(0, 1), Err(Error::Unrealizable(_))));
    }

    #[test]
    fn required_depth_is_minimal_and_guaranteed() {
        for j in 1..5 {
            for l in 0..12 {
                let m = required_m(j, l).unwrap();
                assert_eq!(status_of_m(j, l, m), Status::Guaranteed);
                assert_ne!(status_of_m(j, l, m - 1), Status::Guaranteed);
            }
        }
    }

    fn status_of_m(j: u32, l: u32, m: u32) -> Status {
        if m == 0 {
            return Status::Excluded;
        }
        crate::connectivity::status_of(j, l, m)
    }

    #[test]
    fn bad_ranges_are_rejected() {
        let p = MapParams::milnor(2, 3, Complex64::new(0.5, 0.0), Complex64::default()).unwrap();
        let opts = SearchOptions { t_hi: 1e-9, t_lo: 1e-8, ..SearchOptions::default() };
        assert!(matches!(find_lambda_for_m(&p, 1, &opts), Err(Error::InvalidParams(_))));
        assert!(matches!(
            find_lambda_for_m(&p, 0, &SearchOptions::default()),
            Err(Error::InvalidParams(_))
        ));
    }
}
