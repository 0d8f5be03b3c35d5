//! Fatou components of singular perturbations z^n(z-a)/Q(z) + λ/z^d.

// `!(x < y)` is used on purpose so that NaN falls on the failing side.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod connectivity;
pub mod error;
pub mod map;
pub mod orbits;
pub mod poly;
pub mod raster;
pub mod roots;
pub mod search;

pub use analysis::{analyze, Analysis, AnalysisConfig};
pub use connectivity::{
    enumerate_attainable, propagate_rh, ConnectivityWitness, ItineraryRecord, Region, Status,
    Terminal,
};
pub use error::{Error, Result};
pub use map::{MapParams, SpherePoint};
pub use num_complex::Complex64;
pub use raster::{
    rasterize, Atlas, ComponentRecord, ComponentRef, LabelGrid, RasterSettings, Role, Target,
    Window, WindowKind,
};
pub use search::{
    find_lambda_for_m, realize_connectivity, Realization, SearchOptions, SearchResult,
};
