use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use fatou::analysis::{analyze, auto_global_window, itinerary_only, prepare, window_specs, Skeleton};
use fatou::connectivity::enumerate_attainable;
use fatou::map::{critical_numerator_poly, zeros_poly, MapEval};
use fatou::orbits::{annulus_mapping, unperturbed_radii};
use fatou::raster::{write_png, Palette};
use fatou::roots::{critical_set, pairing_residual, poly_roots, ROOT_TOL};
use fatou::search::realize_connectivity;
use fatou::{
    rasterize, Analysis, Atlas, Complex64, ConnectivityWitness, ItineraryRecord, MapParams,
    Role, Target, WindowKind,
};
use serde_json::json;

use crate::config::RunConfig;
use crate::report::*;
use crate::{json, CliError};

/// Largest accepted distance between a root and its asymptotic prediction,
/// in units of |λ|^{1/(n+d)}.
pub const PAIRING_TOL: f64 = 0.1;
/// Samples of the middle circle of the critical annulus in `verify`.
pub const ANNULUS_SAMPLES: usize = 256;

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Render,
    Roots,
    Verify,
    Itinerary,
    Enumerate { k: u32, i_max: u32, j_max: u32, l_max: u32 },
    Search { i: u32, j: u32, l: u32 },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Render => "render",
            Command::Roots => "roots",
            Command::Verify => "verify",
            Command::Itinerary => "itinerary",
            Command::Enumerate { .. } => "enumerate",
            Command::Search { .. } => "search",
        }
    }
}

/// What a command wrote and whether its checks passed.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    pub report: PathBuf,
    pub images: Vec<PathBuf>,
}

fn log(cmd: &str, msg: impl std::fmt::Display) {
    eprintln!("[{cmd}] {msg}");
}

struct Out<'a> {
    dir: &'a Path,
    images: Vec<PathBuf>,
}

impl<'a> Out<'a> {
    fn new(dir: &'a Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        Ok(Out { dir, images: Vec::new() })
    }

    fn png(&mut self, name: String, grid: &fatou::LabelGrid, palette: Palette) -> Result<String, CliError> {
        let path = self.dir.join(&name);
        write_png(grid, palette, &path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.images.push(path);
        Ok(name)
    }

    fn finish<T: serde::Serialize>(self, name: &str, report: &T, passed: bool) -> Result<Outcome, CliError> {
        let path = self.dir.join(name);
        let bytes = json::to_vec(report).map_err(|e| CliError::Io(e.to_string()))?;
        std::fs::write(&path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Ok(Outcome { passed, report: path, images: self.images })
    }
}

fn kind_name(k: WindowKind) -> &'static str {
    match k {
        WindowKind::Global => "global",
        WindowKind::Ring => "ring",
        WindowKind::Disk => "disk",
        WindowKind::Inner => "inner",
        WindowKind::Custom => "custom",
    }
}

fn summaries(atlas: &Atlas, cmd: &str, palette: Palette, out: &mut Out) -> Result<Vec<WindowSummary>, CliError> {
    let mut v = Vec::new();
    for (w, (s, g)) in atlas.specs.iter().zip(&atlas.grids).enumerate() {
        let name = format!("{cmd}_{w}_{}.png", kind_name(s.kind));
        v.push(WindowSummary {
            kind: s.kind,
            window: s.window,
            px: g.px,
            py: g.py,
            components: g.n_components,
            png: Some(out.png(name, g, palette)?),
        });
    }
    Ok(v)
}

fn require_lambda(p: &MapParams) -> Result<(), CliError> {
    if p.lambda == Complex64::default() {
        return Err(CliError::Config("this command needs lambda != 0".into()));
    }
    Ok(())
}

fn witnesses_for(p: &MapParams, it: Option<&ItineraryRecord>) -> Vec<ConnectivityWitness> {
    match it {
        Some(r) if r.u_nu_surrounds => enumerate_attainable(p.n, p.d, r.k, 2, 2, 2 * r.k),
        _ => Vec::new(),
    }
}

pub fn run(cmd: &Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = cfg.params()?;
    let out = Out::new(&cfg.out_dir)?;
    match cmd {
        Command::Render => render(cfg, &p, out),
        Command::Roots => roots(cfg, &p, out),
        Command::Verify => verify(cfg, &p, out),
        Command::Itinerary => itinerary(cfg, &p, out),
        Command::Enumerate { k, i_max, j_max, l_max } => {
            if *k == 0 {
                return Err(CliError::Config("k must be at least 1".into()));
            }
            let report = EnumerateReport {
                schema_version: SCHEMA_VERSION,
                command: cmd.name().into(),
                n: p.n,
                d: p.d,
                k: *k,
                witnesses: enumerate_attainable(p.n, p.d, *k, *i_max, *j_max, *l_max),
            };
            out.finish("enumerate.json", &report, true)
        }
        Command::Search { i, j, l } => search(cfg, &p, *i, *j, *l, out),
    }
}

fn render(cfg: &RunConfig, p: &MapParams, mut out: Out) -> Result<Outcome, CliError> {
    let settings = cfg.settings();
    if p.lambda == Complex64::default() {
        let radii = unperturbed_radii(p)?;
        let window = cfg
            .window
            .unwrap_or_else(|| auto_global_window(p, &radii, settings.max_iter));
        log("render", format!("unperturbed map, {} px", cfg.resolution));
        let grid = rasterize(p, window, (cfg.resolution, window.rows_for(cfg.resolution)), &radii, &settings);
        let png = out.png("render_0_global.png".into(), &grid, Palette::EscapeTime)?;
        let report = RenderReport {
            schema_version: SCHEMA_VERSION,
            command: "render".into(),
            config: cfg.clone(),
            params: p.clone(),
            radii,
            critical: None,
            windows: vec![WindowSummary {
                kind: WindowKind::Global,
                window,
                px: grid.px,
                py: grid.py,
                components: grid.n_components,
                png: Some(png),
            }],
            records: Vec::new(),
            roles: None,
        };
        return out.finish("render.json", &report, true);
    }
    let (radii, crit) = prepare(p, cfg.k1)?;
    let mut acfg = cfg.analysis();
    acfg.disk_window = false;
    acfg.inner_window = false;
    let specs = window_specs(p, &radii, &crit, &acfg);
    log("render", format!("rasterizing {} windows at {} px", specs.len(), cfg.resolution));
    let atlas = Atlas::build(p, &radii, &crit, specs, &settings)?;
    let windows = summaries(&atlas, "render", Palette::EscapeTime, &mut out)?;
    let records = atlas
        .records
        .iter()
        .flatten()
        .filter(|r| r.role != Role::Generic || r.pixel_count >= cfg.min_pixels / 10)
        .cloned()
        .collect();
    let report = RenderReport {
        schema_version: SCHEMA_VERSION,
        command: "render".into(),
        config: cfg.clone(),
        params: p.clone(),
        radii,
        critical: Some(crit),
        windows,
        records,
        roles: Some(atlas.roles.clone()),
    };
    out.finish("render.json", &report, true)
}

fn roots(cfg: &RunConfig, p: &MapParams, out: Out) -> Result<Outcome, CliError> {
    require_lambda(p)?;
    let crit = critical_set(p)?;
    let mut critical_points = poly_roots(&critical_numerator_poly(p)?, ROOT_TOL)?;
    critical_points.retain(|z| z.norm() > 0.0);
    let zeros = poly_roots(&zeros_poly(p)?, ROOT_TOL)?;
    let report = RootsReport {
        schema_version: SCHEMA_VERSION,
        command: "roots".into(),
        config: cfg.clone(),
        params: p.clone(),
        critical_residual: pairing_residual(p, &crit.free_ring, &crit.asymptotic_ring)?,
        zeros_residual: pairing_residual(p, &crit.ring_zeros, &crit.asymptotic_zeros)?,
        critical_points,
        zeros,
        critical: crit,
    };
    out.finish("roots.json", &report, true)
}

fn check(name: &str, passed: bool, evidence: serde_json::Value) -> Check {
    Check { name: name.into(), passed, evidence }
}

/// Samples of the middle circle of the annulus whose image lies in the
/// trap door of the raster.
fn annulus_hits(p: &MapParams, an: &Analysis) -> (usize, usize) {
    let Some(t) = an.atlas.roles.trap_door else {
        return (0, ANNULUS_SAMPLES);
    };
    let t = an.atlas.canonical(t);
    let m = MapEval::new(p);
    let r = an.radii.omega_radius();
    let hits = (0..ANNULUS_SAMPLES)
        .filter(|&k| {
            let z = Complex64::from_polar(r, 2.0 * PI * k as f64 / ANNULUS_SAMPLES as f64);
            matches!(an.atlas.locate(m.value(z)), Target::Component(c) if an.atlas.canonical(c) == t)
        })
        .count();
    (hits, ANNULUS_SAMPLES)
}

pub fn verify_report(cfg: &RunConfig, p: &MapParams) -> Result<(VerifyReport, Analysis), CliError> {
    require_lambda(p)?;
    log("verify", format!("analysing at {} px", cfg.resolution));
    let an = analyze(p, &cfg.analysis())?;
    let crit_res = pairing_residual(p, &an.crit.free_ring, &an.crit.asymptotic_ring)?;
    let zero_res = pairing_residual(p, &an.crit.ring_zeros, &an.crit.asymptotic_zeros)?;
    let strict = annulus_mapping(p, &an.radii, ANNULUS_SAMPLES);
    let (hits, samples) = annulus_hits(p, &an);
    let skeleton = Skeleton::of(&an.atlas, p.n, p.d);
    let dg = &an.digraph;
    let it = an.itinerary.as_ref().ok();
    let checks = vec![
        check(
            "root_pairing",
            crit_res <= PAIRING_TOL && zero_res <= PAIRING_TOL,
            json!({"critical_residual": crit_res, "zeros_residual": zero_res, "tolerance": PAIRING_TOL}),
        ),
        check(
            "annulus_maps_into_trap_door",
            hits == samples,
            json!({"samples": samples, "in_trap_door": hits,
                   "max_first_over_r_trap": strict.max_first_over_trap,
                   "min_second_over_k": strict.min_second_over_k}),
        ),
        check("roles", skeleton.passed(), serde_json::to_value(&skeleton).unwrap_or_default()),
        check(
            "rh_admissibility",
            dg.rh_violations.is_empty(),
            json!({"checked": dg.rh_checked, "violations": dg.rh_violations.len()}),
        ),
        check(
            "rigidity",
            dg.rigidity_violations.is_empty(),
            json!({"checked": dg.rigidity_checked, "violations": dg.rigidity_violations.len()}),
        ),
        check(
            "no_promotion",
            dg.promotion_violations.is_empty(),
            json!({"checked": dg.promotion_checked, "violations": dg.promotion_violations.len()}),
        ),
        check(
            "itinerary_bound",
            dg.itinerary_violations.is_empty(),
            json!({"checked": dg.itinerary_checked, "violations": dg.itinerary_violations.len()}),
        ),
        check(
            "critical_itinerary",
            it.is_some(),
            match &an.itinerary {
                Ok(r) => json!({"k": r.k, "u_nu_surrounds": r.u_nu_surrounds}),
                Err(e) => json!({"error": e}),
            },
        ),
        check(
            "forms",
            an.forms.violations.is_empty(),
            json!({"checked": an.forms.checked, "violations": an.forms.violations.len()}),
        ),
        check(
            "expected_components",
            an.forms.missing.is_empty(),
            json!({"matched": an.forms.matched.len(), "missing": an.forms.missing}),
        ),
    ];
    let passed = checks.iter().all(|c| c.passed);
    let report = VerifyReport {
        schema_version: SCHEMA_VERSION,
        command: "verify".into(),
        config: cfg.clone(),
        params: p.clone(),
        radii: an.radii,
        passed,
        checks,
        itinerary: it.cloned(),
        itinerary_error: an.itinerary.as_ref().err().cloned(),
        witnesses: witnesses_for(p, it),
        skeleton,
        roles: an.atlas.roles.clone(),
        annulus: strict,
        windows: Vec::new(),
        digraph: an.digraph.clone(),
        forms: an.forms.clone(),
    };
    Ok((report, an))
}

fn verify(cfg: &RunConfig, p: &MapParams, mut out: Out) -> Result<Outcome, CliError> {
    let (mut report, an) = verify_report(cfg, p)?;
    report.windows = summaries(&an.atlas, "verify", Palette::Components, &mut out)?;
    for c in &report.checks {
        log("verify", format!("{:<28} {}", c.name, if c.passed { "pass" } else { "FAIL" }));
    }
    let passed = report.passed;
    out.finish("verify.json", &report, passed)
}

fn itinerary(cfg: &RunConfig, p: &MapParams, out: Out) -> Result<Outcome, CliError> {
    require_lambda(p)?;
    let crit = critical_set(p).map_err(|e| match e {
        fatou::Error::AmbiguousPartition(s) => CliError::Regime(s),
        e => e.into(),
    })?;
    let mut acfg = cfg.analysis();
    acfg.disk_window = false;
    let res = match itinerary_only(p, &acfg) {
        Err(fatou::Error::RegimeViolation(s)) => return Err(CliError::Regime(s)),
        r => r,
    };
    let it = res.as_ref().ok();
    let report = ItineraryReport {
        schema_version: SCHEMA_VERSION,
        command: "itinerary".into(),
        config: cfg.clone(),
        params: p.clone(),
        nu_lambda: crit.nu_lambda,
        ring_index: it.and_then(|r| r.ring_index()),
        witnesses: witnesses_for(p, it),
        itinerary: it.cloned(),
        error: res.as_ref().err().map(|e| e.to_string()),
    };
    let passed = it.is_some();
    out.finish("itinerary.json", &report, passed)
}

fn search(cfg: &RunConfig, p: &MapParams, i: u32, j: u32, l: u32, mut out: Out) -> Result<Outcome, CliError> {
    log("search", format!("(i, j, l) = ({i}, {j}, {l}) on angle {}", cfg.ray_angle));
    let r = realize_connectivity(p, i, j, l, &cfg.search())?;
    log("search", format!("lambda = {} with k = {}", r.result.lambda_found, r.result.m));
    let windows = summaries(&r.analysis.atlas, "search", Palette::EscapeTime, &mut out)?;
    let report = SearchReport {
        schema_version: SCHEMA_VERSION,
        command: "search".into(),
        config: cfg.clone(),
        resolution_insufficient: r.resolution_insufficient(),
        component: r.component.clone(),
        predicted_zone: r.predicted_zone,
        forms: r.analysis.forms.clone(),
        result: r.result,
        windows,
    };
    out.finish("search.json", &report, true)
}
