//! Escape-time rasterization of the dynamical plane and pixel topology of
//! the resulting Fatou components.

mod atlas;
mod image;
pub mod topology;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::map::{MapEval, MapParams};
use crate::orbits::RadiiModel;

pub use atlas::{
    measure_components, tag_roles, Atlas, ComponentRecord, ComponentRef, ComponentStats, Roles,
    Role, Target, WindowKind, WindowSpec,
};
pub use image::{encode_png, render_rgb, write_png, Palette};

/// Escape time of a pixel whose orbit never left the disk of radius K.
pub const SATURATED: u32 = u32::MAX;
/// Label of a separator pixel.
pub const NONE: u32 = u32::MAX;

/// Orbits are followed past K up to this modulus for the distance estimate.
pub const BAILOUT: f64 = 1e10;
const EXTRA_ITER: u32 = 256;

/// Axis-aligned rectangle of the plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub center: Complex64,
    pub width: f64,
    pub height: f64,
}

impl Window {
    pub fn new(center: Complex64, width: f64, height: f64) -> Self {
        Window { center, width, height }
    }

    pub fn square(center: Complex64, half_width: f64) -> Self {
        Window::new(center, 2.0 * half_width, 2.0 * half_width)
    }

    /// Rows for `px` columns with square pixels.
    pub fn rows_for(&self, px: usize) -> usize {
        ((px as f64 * self.height / self.width).round() as usize).max(1)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z.re - self.center.re).abs() < 0.5 * self.width
            && (z.im - self.center.im).abs() < 0.5 * self.height
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RasterSettings {
    pub max_iter: u32,
    /// A pixel is a separator when its distance estimate to the Julia set is
    /// below this many pixel widths.
    pub separator_width: f64,
}

impl Default for RasterSettings {
    fn default() -> Self {
        RasterSettings {
            max_iter: 500,
            separator_width: 1.0,
        }
    }
}

/// A rasterized window: escape times and 4-connected component labels.
#[derive(Clone, Debug)]
pub struct LabelGrid {
    pub window: Window,
    pub px: usize,
    pub py: usize,
    /// First t with |z_t| > K, or SATURATED.
    pub escape_time: Vec<u32>,
    /// Component label in row-major first-appearance order, or NONE.
    pub component_id: Vec<u32>,
    /// `component_id` with every separator blob enclosed by a single
    /// component absorbed into it. Used for all hole and enclosure queries.
    pub filled_id: Vec<u32>,
    pub n_components: usize,
}

impl LabelGrid {
    pub fn pixel_width(&self) -> f64 {
        self.window.width / self.px as f64
    }

    pub fn pixel_height(&self) -> f64 {
        self.window.height / self.py as f64
    }

    pub fn pixel_center(&self, col: usize, row: usize) -> Complex64 {
        pixel_center(&self.window, self.px, self.py, col, row)
    }

    /// Index of the pixel containing z, if z lies in the window.
    pub fn index_of(&self, z: Complex64) -> Option<usize> {
        let w = &self.window;
        let x = (z.re - (w.center.re - 0.5 * w.width)) / self.pixel_width();
        let y = ((w.center.im + 0.5 * w.height) - z.im) / self.pixel_height();
        if !(x >= 0.0 && y >= 0.0) {
            return None;
        }
        let (col, row) = (x.floor() as usize, y.floor() as usize);
        (col < self.px && row < self.py).then_some(row * self.px + col)
    }

    pub fn label_at(&self, z: Complex64) -> Option<u32> {
        self.index_of(z).map(|i| self.component_id[i])
    }

    pub fn origin_index(&self) -> Option<usize> {
        self.index_of(Complex64::default())
    }
}

fn pixel_center(w: &Window, px: usize, py: usize, col: usize, row: usize) -> Complex64 {
    let hx = w.width / px as f64;
    let hy = w.height / py as f64;
    Complex64::new(
        w.center.re - 0.5 * w.width + (col as f64 + 0.5) * hx,
        w.center.im + 0.5 * w.height - (row as f64 + 0.5) * hy,
    )
}

/// Escape time and separator flag of one pixel.
///
/// The distance to the Julia set is estimated from the Green's function of
/// the basin of infinity, |z_N| ln|z_N| / |z_N'| at the first |z_N| past the
/// bailout, and from the first entry into the half-radius core disk,
/// (r_core - |z_j|) / |z_j'|. The larger of the two is used.
#[inline]
fn classify_pixel(
    m: &MapEval,
    c: Complex64,
    k_esc: f64,
    r_core: f64,
    max_iter: u32,
    min_distance: f64,
) -> (u32, bool) {
    let mut z = c;
    let mut dz = Complex64::new(1.0, 0.0);
    let mut esc = SATURATED;
    let mut core_de = 0.0f64;
    let mut in_core = false;
    let mut de = 0.0f64;
    let mut t = 0u32;
    loop {
        let r = z.norm();
        if !r.is_finite() {
            if esc == SATURATED {
                esc = t;
            }
            de = f64::INFINITY;
            break;
        }
        if !in_core && r < 0.5 * r_core {
            in_core = true;
            core_de = (r_core - r) / dz.norm();
        }
        if esc == SATURATED && r > k_esc {
            esc = t;
        }
        if r > BAILOUT {
            de = r * r.ln() / dz.norm();
            break;
        }
        if (esc == SATURATED && t >= max_iter) || t >= max_iter + EXTRA_ITER {
            break;
        }
        if r == 0.0 {
            if esc == SATURATED {
                esc = t + 1;
            }
            // Reaching the origin after entering the core says nothing new.
            de = if in_core { 0.0 } else { f64::INFINITY };
            break;
        }
        let (w, dw) = m.step(z);
        dz *= dw;
        z = w;
        t += 1;
    }
    let separator = esc == SATURATED || !(de.max(core_de) >= min_distance);
    (esc, separator)
}

/// Rasterizes `window` at `px` × `py` pixels and labels the components.
///
/// Rows are classified in parallel; each row is a pure function of its
/// inputs, so the grid does not depend on the thread schedule. Labelling and
/// hole bookkeeping run on the finished grid on one thread.
pub fn rasterize(
    p: &MapParams,
    window: Window,
    resolution: (usize, usize),
    radii: &RadiiModel,
    settings: &RasterSettings,
) -> LabelGrid {
    let (px, py) = resolution;
    assert!(px > 0 && py > 0, "resolution must be positive");
    let m = MapEval::new(p);
    let h = (window.width / px as f64).max(window.height / py as f64);
    let min_distance = settings.separator_width * h;
    let mut escape_time = vec![0u32; px * py];
    let mut separator = vec![false; px * py];
    escape_time
        .par_chunks_mut(px)
        .zip(separator.par_chunks_mut(px))
        .enumerate()
        .for_each(|(row, (esc_row, sep_row))| {
            for col in 0..px {
                let c = pixel_center(&window, px, py, col, row);
                let (e, s) = classify_pixel(
                    &m,
                    c,
                    radii.k_esc,
                    radii.r_core,
                    settings.max_iter,
                    min_distance,
                );
                esc_row[col] = e;
                sep_row[col] = s;
            }
        });
    let (component_id, n_components) = topology::label_components(&separator, px, py);
    drop(separator);
    let filled_id = topology::fill_separator_holes(&component_id, px, py);
    LabelGrid {
        window,
        px,
        py,
        escape_time,
        component_id,
        filled_id,
        n_components,
    }
}

/// Builds a grid directly from a separator mask; used for synthetic fixtures.
pub fn grid_from_mask(window: Window, px: usize, py: usize, separator: &[bool]) -> LabelGrid {
    assert_eq!(separator.len(), px * py);
    let (component_id, n_components) = topology::label_components(separator, px, py);
    let filled_id = topology::fill_separator_holes(&component_id, px, py);
    let escape_time = separator
        .iter()
        .map(|&s| if s { SATURATED } else { 0 })
        .collect();
    LabelGrid {
        window,
        px,
        py,
        escape_time,
        component_id,
        filled_id,
        n_components,
    }
}

/// Connectivity of one component: holes + 1. The flag is true when the
/// component touches the frame, in which case the value is a lower bound.
pub fn measure_connectivity(grid: &LabelGrid, id: u32) -> (u32, bool) {
    let cm = topology::complement_map(&grid.filled_id, grid.px, grid.py, id);
    let holes = cm.bounded.iter().filter(|&&b| b).count() as u32;
    let touches = topology::touches_frame(&grid.component_id, grid.px, grid.py, id);
    (holes + 1, touches)
}

/// Whether the component separates the origin from the frame. Errors when
/// the component itself contains the origin or the origin is off-window.
pub fn surrounds_origin(grid: &LabelGrid, id: u32) -> crate::Result<bool> {
    let o = grid
        .origin_index()
        .ok_or_else(|| crate::Error::Unresolved("origin is outside the window".into()))?;
    if grid.component_id[o] == id {
        return Err(crate::Error::Unresolved(
            "origin lies inside the component".into(),
        ));
    }
    let cm = topology::complement_map(&grid.filled_id, grid.px, grid.py, id);
    Ok(cm.bounded[cm.region[o] as usize])
}
