//! JSON report types. Every report starts with `schema_version`, the command
//! and the configuration it ran with.

use fatou::analysis::Skeleton;
use fatou::connectivity::{DigraphReport, FormReport, MeasuredComponent};
use fatou::orbits::{AnnulusReport, RadiiModel};
use fatou::raster::Roles;
use fatou::roots::CriticalSet;
use fatou::{
    Complex64, ComponentRecord, ConnectivityWitness, ItineraryRecord, MapParams, Region,
    SearchResult, Window, WindowKind,
};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowSummary {
    pub kind: WindowKind,
    pub window: Window,
    pub px: usize,
    pub py: usize,
    pub components: usize,
    /// File name of the image, relative to the report.
    pub png: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenderReport {
    pub schema_version: u32,
    pub command: String,
    pub config: RunConfig,
    pub params: MapParams,
    pub radii: RadiiModel,
    /// Absent when λ = 0.
    pub critical: Option<CriticalSet>,
    pub windows: Vec<WindowSummary>,
    /// Tagged components and those of at least a tenth of `min_pixels`.
    pub records: Vec<ComponentRecord>,
    pub roles: Option<Roles>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootsReport {
    pub schema_version: u32,
    pub command: String,
    pub config: RunConfig,
    pub params: MapParams,
    /// Every finite critical point other than the origin.
    pub critical_points: Vec<Complex64>,
    pub zeros: Vec<Complex64>,
    pub critical: CriticalSet,
    /// Largest distance to the asymptotic prediction over |λ|^{1/(n+d)}.
    pub critical_residual: f64,
    pub zeros_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub evidence: serde_json::Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub command: String,
    pub config: RunConfig,
    pub params: MapParams,
    pub radii: RadiiModel,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub itinerary: Option<ItineraryRecord>,
    pub itinerary_error: Option<String>,
    /// Present when ν_λ is captured by a component surrounding the origin.
    pub witnesses: Vec<ConnectivityWitness>,
    pub skeleton: Skeleton,
    pub roles: Roles,
    pub annulus: AnnulusReport,
    pub windows: Vec<WindowSummary>,
    pub digraph: DigraphReport,
    pub forms: FormReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ItineraryReport {
    pub schema_version: u32,
    pub command: String,
    pub config: RunConfig,
    pub params: MapParams,
    pub nu_lambda: Complex64,
    pub itinerary: Option<ItineraryRecord>,
    pub error: Option<String>,
    pub ring_index: Option<u32>,
    pub witnesses: Vec<ConnectivityWitness>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumerateReport {
    pub schema_version: u32,
    pub command: String,
    pub n: u32,
    pub d: u32,
    pub k: u32,
    pub witnesses: Vec<ConnectivityWitness>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub schema_version: u32,
    pub command: String,
    pub config: RunConfig,
    pub result: SearchResult,
    pub component: Option<MeasuredComponent>,
    pub predicted_zone: Option<Region>,
    pub resolution_insufficient: bool,
    pub forms: FormReport,
    pub windows: Vec<WindowSummary>,
}
