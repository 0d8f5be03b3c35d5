//! End-to-end analysis of one map: radii, critical points, a multi-window
//! raster, zones, the critical itinerary and the connectivity checks.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::connectivity::{
    check_digraph, critical_itinerary, depth_one_expectations, measured_components,
    verify_measured, DigraphReport, FormReport, ItineraryRecord, Region, Zones,
    MIN_RESOLVED_PIXELS,
};
use crate::error::{Error, Result};
use crate::map::{self, MapEval, MapParams};
use crate::orbits::{radii_model, RadiiModel, DEFAULT_K1};
use crate::raster::{
    Atlas, ComponentRef, RasterSettings, Target, Window, WindowKind, WindowSpec,
};
use crate::roots::{critical_set, CriticalSet};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    /// Columns of every window.
    pub resolution: usize,
    pub settings: RasterSettings,
    pub k1: f64,
    /// Whole-Julia-set window; chosen from the map when absent.
    pub global_window: Option<Window>,
    /// Trap-door and annulus window; 5 r_outer around 0 when absent.
    pub ring_window: Option<Window>,
    pub disk_window: bool,
    pub inner_window: bool,
    pub min_pixels: u64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            resolution: 1024,
            settings: RasterSettings::default(),
            k1: DEFAULT_K1,
            global_window: None,
            ring_window: None,
            disk_window: true,
            inner_window: true,
            min_pixels: MIN_RESOLVED_PIXELS,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Analysis {
    pub params: MapParams,
    pub radii: RadiiModel,
    pub crit: CriticalSet,
    pub atlas: Atlas,
    pub zones: Option<Zones>,
    /// Zone of each record's representative, indexed like `atlas.records`.
    pub regions: Option<Vec<Vec<Option<Region>>>>,
    pub itinerary: std::result::Result<ItineraryRecord, String>,
    pub digraph: DigraphReport,
    pub forms: FormReport,
}

impl Analysis {
    pub fn k(&self) -> Option<u32> {
        self.itinerary.as_ref().ok().map(|i| i.k)
    }

    pub fn region(&self, w: usize, id: u32) -> Option<Region> {
        self.regions.as_ref().and_then(|r| r[w][id as usize])
    }
}

/// Connectivities of the structural components and how they map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Skeleton {
    pub trap_door: Option<u32>,
    pub annulus: Option<u32>,
    pub annulus_surrounds: bool,
    pub free_ring_on_annulus: usize,
    pub free_ring: usize,
    pub disk: Option<u32>,
    pub disk_maps_to_trap_door: bool,
}

impl Skeleton {
    pub fn of(atlas: &Atlas, n: u32, d: u32) -> Skeleton {
        let roles = &atlas.roles;
        let kappa = |r: Option<ComponentRef>| r.map(|r| atlas.record(r).connectivity);
        let trap = roles.trap_door.map(|t| atlas.canonical(t));
        Skeleton {
            trap_door: kappa(roles.trap_door),
            annulus: kappa(roles.annulus_a),
            annulus_surrounds: roles
                .annulus_a
                .is_some_and(|a| atlas.record(a).surrounds_origin),
            free_ring_on_annulus: roles.free_ring_on_annulus,
            free_ring: (n + d) as usize,
            disk: kappa(roles.disk_d),
            disk_maps_to_trap_door: match (roles.disk_d, trap) {
                (Some(dk), Some(t)) => match atlas.record(dk).forward_target {
                    Target::Component(v) => atlas.canonical(v) == t,
                    _ => false,
                },
                _ => false,
            },
        }
    }

    pub fn passed(&self) -> bool {
        self.trap_door == Some(1)
            && self.annulus == Some(2)
            && self.annulus_surrounds
            && self.free_ring_on_annulus == self.free_ring
            && self.disk == Some(1)
            && self.disk_maps_to_trap_door
    }
}

/// True when the orbit of z exceeds K before it ever enters |z| < r_outer.
fn escapes_directly(m: &MapEval, z: Complex64, radii: &RadiiModel, max_iter: u32) -> bool {
    let mut w = z;
    for _ in 0..max_iter {
        let a = w.norm();
        if a.is_nan() || a > radii.k_esc {
            return true;
        }
        if a < radii.r_outer {
            return false;
        }
        w = m.value(w);
    }
    false
}

/// Square window around 0 holding everything outside the immediate basin of
/// infinity, found by marching inward along 256 rays.
pub fn auto_global_window(p: &MapParams, radii: &RadiiModel, max_iter: u32) -> Window {
    let m = MapEval::new(p);
    let mut reach = 0.0f64;
    for k in 0..256 {
        let dir = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / 256.0);
        let mut r = radii.k_esc;
        while r > radii.r_outer {
            if !escapes_directly(&m, dir * r, radii, max_iter) {
                reach = reach.max(r);
                break;
            }
            r *= 0.99;
        }
    }
    Window::square(Complex64::default(), 1.2 * reach.max(radii.r_outer))
}

/// The windows an analysis rasterizes, in atlas order.
pub fn window_specs(
    p: &MapParams,
    radii: &RadiiModel,
    crit: &CriticalSet,
    cfg: &AnalysisConfig,
) -> Vec<WindowSpec> {
    let px = cfg.resolution;
    let global = cfg
        .global_window
        .unwrap_or_else(|| auto_global_window(p, radii, cfg.settings.max_iter));
    let ring = cfg
        .ring_window
        .unwrap_or_else(|| Window::square(Complex64::default(), 5.0 * radii.r_outer));
    let mut specs = vec![
        WindowSpec { kind: WindowKind::Global, window: global, px },
        WindowSpec { kind: WindowKind::Ring, window: ring, px },
    ];
    if cfg.disk_window {
        let dw = map::derivative(p, crit.w_lambda).norm();
        if dw.is_finite() && dw > 0.0 {
            specs.push(WindowSpec {
                kind: WindowKind::Disk,
                window: Window::square(crit.w_lambda, radii.r_inner / dw),
                px,
            });
        }
    }
    if cfg.inner_window {
        let nu = crit.nu_lambda.norm();
        if nu > 0.0 {
            let h = 2.5 * (p.lambda.norm() / nu).powf(1.0 / p.d as f64);
            specs.push(WindowSpec {
                kind: WindowKind::Inner,
                window: Window::square(Complex64::default(), h),
                px,
            });
        }
    }
    specs
}

/// Radii and critical set, with partition failures reported as regime
/// violations.
pub fn prepare(p: &MapParams, k1: f64) -> Result<(RadiiModel, CriticalSet)> {
    let radii = radii_model(p, k1)?;
    let crit = critical_set(p).map_err(|e| match e {
        Error::AmbiguousPartition(s) => Error::RegimeViolation(s),
        e => e,
    })?;
    Ok((radii, crit))
}

/// Only the critical itinerary; skips the digraph and form checks.
pub fn itinerary_only(p: &MapParams, cfg: &AnalysisConfig) -> Result<ItineraryRecord> {
    let (radii, crit) = prepare(p, cfg.k1)?;
    let specs = window_specs(p, &radii, &crit, cfg);
    let atlas = Atlas::build(p, &radii, &crit, specs, &cfg.settings)?;
    let zones = Zones::new(&atlas, radii.k_esc)?;
    critical_itinerary(p, &atlas, &zones, &crit)
}

pub fn analyze(p: &MapParams, cfg: &AnalysisConfig) -> Result<Analysis> {
    let (radii, crit) = prepare(p, cfg.k1)?;
    let specs = window_specs(p, &radii, &crit, cfg);
    let atlas = Atlas::build(p, &radii, &crit, specs, &cfg.settings)?;
    let zones = Zones::new(&atlas, radii.k_esc).ok();
    let regions = zones.as_ref().map(|z| z.record_regions(&atlas));
    let itinerary = match &zones {
        Some(z) => critical_itinerary(p, &atlas, z, &crit).map_err(|e| e.to_string()),
        None => Err("critical annulus not found".to_string()),
    };
    let k = itinerary.as_ref().ok().map(|i| i.k);
    let u_nu_surrounds = itinerary.as_ref().is_ok_and(|i| i.u_nu_surrounds);
    let digraph = check_digraph(p, &atlas, regions.as_deref(), k, cfg.min_pixels / 10);
    let measured = measured_components(&atlas, regions.as_deref(), cfg.min_pixels);
    let expected = if u_nu_surrounds {
        depth_one_expectations(p.n, p.d)
    } else {
        Vec::new()
    };
    let forms = verify_measured(p.n, p.d, k, &measured, &expected);
    Ok(Analysis {
        params: p.clone(),
        radii,
        crit,
        atlas,
        zones,
        regions,
        itinerary,
        digraph,
        forms,
    })
}
