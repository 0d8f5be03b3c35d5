use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::topology::{
    bounding_boxes, distance_to_boundary, enclosure_candidates, encloses, euler_numbers,
    frame_flags, holes_of,
};
use super::{rasterize, LabelGrid, RasterSettings, Window, NONE};
use crate::error::{Error, Result};
use crate::map::{MapEval, MapParams};
use crate::orbits::RadiiModel;
use crate::roots::CriticalSet;

/// What a window is for; decides which structural roles are tagged in it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WindowKind {
    /// The whole Julia set: basin of infinity and the free critical component.
    Global,
    /// Centered at 0 at the scale |λ|^{1/(n+d)}: trap door and critical annulus.
    Ring,
    /// Centered at the zero w_λ.
    Disk,
    /// Centered at 0, inside the critical annulus.
    Inner,
    /// User-supplied window; every role is tagged.
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub kind: WindowKind,
    pub window: Window,
    pub px: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ComponentRef {
    pub window: u32,
    pub id: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Target {
    Component(ComponentRef),
    /// The image left every window (or is the point at infinity).
    Exterior,
    /// The image fell on a separator pixel.
    Unresolved,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    AInf,
    TrapDoor,
    AnnulusA,
    DiskD,
    UNu,
    Generic,
}

/// Holes smaller than MIN_HOLE_AREA holding fewer component pixels than
/// MIN_HOLE_CONTENT (but some) are too close to the pixel scale to be counted
/// reliably.
pub const MIN_HOLE_CONTENT: u64 = 16;
pub const MIN_HOLE_AREA: u64 = 128;
/// Components below this size are not searched for marginal holes.
const HOLE_SCAN_MIN_PIXELS: u64 = 256;

/// Pixel measurements of one component.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentStats {
    pub id: u32,
    pub pixel_count: u64,
    /// Holes + 1, separator-only holes excluded.
    pub connectivity: u32,
    /// When set, `connectivity` is only a lower bound.
    pub touches_frame: bool,
    /// Pixel-scale holes with a few component pixels inside; when nonzero
    /// the connectivity is uncertain.
    pub marginal_holes: u32,
    pub surrounds_origin: bool,
    pub contains_origin: bool,
    /// Pixel of maximal city-block distance to the component boundary.
    pub representative: Complex64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentRecord {
    pub window: u32,
    pub id: u32,
    pub pixel_count: u64,
    pub connectivity: u32,
    pub touches_frame: bool,
    pub marginal_holes: u32,
    pub surrounds_origin: bool,
    pub contains_origin: bool,
    pub role: Role,
    pub forward_target: Target,
    pub representative: Complex64,
    /// Finite critical points (the pole at 0 included) on this component's pixels.
    pub critical_points: u32,
}

impl ComponentRecord {
    pub fn reference(&self) -> ComponentRef {
        ComponentRef {
            window: self.window,
            id: self.id,
        }
    }

    /// Both the connectivity and the enclosure flags are trusted.
    pub fn is_resolved(&self, min_pixels: u64) -> bool {
        self.pixel_count >= min_pixels && !self.touches_frame && self.marginal_holes == 0
    }
}

/// Connectivity, enclosure and representative for every component of a grid.
pub fn measure_components(grid: &LabelGrid) -> Vec<ComponentStats> {
    let (px, py, n) = (grid.px, grid.py, grid.n_components);
    let mut count = vec![0u64; n];
    for &l in &grid.component_id {
        if l != NONE {
            count[l as usize] += 1;
        }
    }
    let chi = euler_numbers(&grid.filled_id, px, py, n);
    let frame = frame_flags(&grid.component_id, px, py, n);

    let mut surrounds = vec![false; n];
    let mut contains = vec![false; n];
    if let Some(o) = grid.origin_index() {
        let here = grid.filled_id[o];
        if here != NONE {
            contains[here as usize] = true;
        }
        let mut stamp = vec![0u32; px * py];
        for (k, c) in enclosure_candidates(&grid.filled_id, px, py, o)
            .into_iter()
            .enumerate()
        {
            surrounds[c as usize] = encloses(&grid.filled_id, px, py, c, o, &mut stamp, k as u32 + 1);
        }
    }

    let boxes = bounding_boxes(&grid.filled_id, px, n);
    let marginal: Vec<u32> = (0..n)
        .map(|k| {
            if chi[k] >= 1 || count[k] < HOLE_SCAN_MIN_PIXELS {
                return 0;
            }
            holes_of(&grid.filled_id, &grid.component_id, px, boxes[k], k as u32)
                .iter()
                .filter(|h| {
                    h.area < MIN_HOLE_AREA
                        && h.fatou_pixels > 0
                        && h.fatou_pixels < MIN_HOLE_CONTENT
                })
                .count() as u32
        })
        .collect();

    let dist = distance_to_boundary(&grid.component_id, px, py);
    let mut best = vec![(0u32, usize::MAX); n];
    for (i, &l) in grid.component_id.iter().enumerate() {
        if l == NONE {
            continue;
        }
        let b = &mut best[l as usize];
        if b.1 == usize::MAX || dist[i] > b.0 {
            *b = (dist[i], i);
        }
    }

    (0..n)
        .map(|k| ComponentStats {
            id: k as u32,
            pixel_count: count[k],
            connectivity: (2 - chi[k]).max(1) as u32,
            touches_frame: frame[k],
            marginal_holes: marginal[k],
            surrounds_origin: surrounds[k],
            contains_origin: contains[k],
            representative: {
                let i = best[k].1;
                grid.pixel_center(i % px, i / px)
            },
        })
        .collect()
}

fn roles_for(kind: WindowKind) -> &'static [Role] {
    match kind {
        WindowKind::Global => &[Role::AInf, Role::UNu],
        WindowKind::Ring => &[Role::TrapDoor, Role::AnnulusA],
        WindowKind::Disk => &[Role::DiskD],
        WindowKind::Inner => &[Role::TrapDoor],
        WindowKind::Custom => &[
            Role::AInf,
            Role::TrapDoor,
            Role::AnnulusA,
            Role::DiskD,
            Role::UNu,
        ],
    }
}

/// Label carrying the most free-ring critical points, and how many it carries.
fn annulus_label(grid: &LabelGrid, crit: &CriticalSet) -> Option<(u32, usize)> {
    let mut hits: Vec<u32> = crit
        .free_ring
        .iter()
        .filter_map(|&c| grid.label_at(c))
        .filter(|&l| l != NONE)
        .collect();
    hits.sort_unstable();
    let mut best: Option<(u32, usize)> = None;
    for chunk in hits.chunk_by(|a, b| a == b) {
        if best.is_none_or(|(_, c)| chunk.len() > c) {
            best = Some((chunk[0], chunk.len()));
        }
    }
    best
}

fn role_labels(grid: &LabelGrid, crit: &CriticalSet, kind: WindowKind) -> Vec<(Role, u32)> {
    let mut out = Vec::new();
    let labelled = |z: Complex64| grid.label_at(z).filter(|&l| l != NONE);
    for &role in roles_for(kind) {
        let label = match role {
            Role::AInf => {
                let (px, py) = (grid.px, grid.py);
                let frame = (0..px)
                    .chain((py - 1) * px..py * px)
                    .chain((0..py).map(|r| r * px))
                    .chain((0..py).map(|r| r * px + px - 1));
                frame
                    .filter(|&i| grid.component_id[i] != NONE)
                    .min_by_key(|&i| (grid.escape_time[i], i))
                    .map(|i| grid.component_id[i])
            }
            Role::TrapDoor => labelled(Complex64::default()),
            Role::AnnulusA => annulus_label(grid, crit).map(|(l, _)| l),
            Role::DiskD => labelled(crit.w_lambda),
            Role::UNu => labelled(crit.nu_lambda),
            Role::Generic => None,
        };
        if let Some(l) = label {
            out.push((role, l));
        }
    }
    out
}

fn critical_counts(grid: &LabelGrid, p: &MapParams, crit: &CriticalSet) -> Vec<u32> {
    let mut counts = vec![0u32; grid.n_components];
    let mut pts = crit.all_free();
    if p.lambda != Complex64::default() {
        pts.push(Complex64::default());
    }
    for z in pts {
        if let Some(l) = grid.label_at(z).filter(|&l| l != NONE) {
            counts[l as usize] += 1;
        }
    }
    counts
}

fn records_for(
    grid: &LabelGrid,
    window: u32,
    p: &MapParams,
    crit: &CriticalSet,
    kind: WindowKind,
) -> Result<Vec<ComponentRecord>> {
    let stats = measure_components(grid);
    let mut roles = vec![Role::Generic; stats.len()];
    for (role, l) in role_labels(grid, crit, kind) {
        let slot = &mut roles[l as usize];
        if *slot != Role::Generic && *slot != role {
            return Err(Error::RoleConflict(format!(
                "component {l} of window {window} is both {:?} and {role:?}",
                *slot
            )));
        }
        *slot = role;
    }
    let counts = critical_counts(grid, p, crit);
    let m = MapEval::new(p);
    Ok(stats
        .iter()
        .map(|s| {
            let w = m.value(s.representative);
            let forward_target = if !(w.re.is_finite() && w.im.is_finite()) {
                Target::Exterior
            } else {
                match grid.label_at(w) {
                    None => Target::Exterior,
                    Some(NONE) => Target::Unresolved,
                    Some(l) => Target::Component(ComponentRef { window, id: l }),
                }
            };
            ComponentRecord {
                window,
                id: s.id,
                pixel_count: s.pixel_count,
                connectivity: s.connectivity,
                touches_frame: s.touches_frame,
                marginal_holes: s.marginal_holes,
                surrounds_origin: s.surrounds_origin,
                contains_origin: s.contains_origin,
                role: roles[s.id as usize],
                forward_target,
                representative: s.representative,
                critical_points: counts[s.id as usize],
            }
        })
        .collect())
}

/// Measures and tags every component of a single grid. Forward targets are
/// located in the same grid.
pub fn tag_roles(grid: &LabelGrid, p: &MapParams, crit: &CriticalSet) -> Result<Vec<ComponentRecord>> {
    records_for(grid, 0, p, crit, WindowKind::Custom)
}

/// The structural components, each taken from the window best suited to it.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Roles {
    pub a_inf: Option<ComponentRef>,
    pub trap_door: Option<ComponentRef>,
    pub annulus_a: Option<ComponentRef>,
    pub disk_d: Option<ComponentRef>,
    pub u_nu: Option<ComponentRef>,
    /// Free-ring critical points lying on the tagged annulus.
    pub free_ring_on_annulus: usize,
}

/// Several rasterized windows of one map, analysed together.
#[derive(Clone, Debug)]
pub struct Atlas {
    pub specs: Vec<WindowSpec>,
    pub grids: Vec<LabelGrid>,
    pub records: Vec<Vec<ComponentRecord>>,
    pub roles: Roles,
}

impl Atlas {
    pub fn build(
        p: &MapParams,
        radii: &RadiiModel,
        crit: &CriticalSet,
        specs: Vec<WindowSpec>,
        settings: &RasterSettings,
    ) -> Result<Atlas> {
        let mut grids = Vec::with_capacity(specs.len());
        let mut records = Vec::with_capacity(specs.len());
        for (w, s) in specs.iter().enumerate() {
            let grid = rasterize(p, s.window, (s.px, s.window.rows_for(s.px)), radii, settings);
            records.push(records_for(&grid, w as u32, p, crit, s.kind)?);
            grids.push(grid);
        }
        let mut atlas = Atlas {
            specs,
            grids,
            records,
            roles: Roles::default(),
        };
        atlas.resolve_targets(p);
        atlas.roles = atlas.primary_roles(crit);
        Ok(atlas)
    }

    pub fn record(&self, r: ComponentRef) -> &ComponentRecord {
        &self.records[r.window as usize][r.id as usize]
    }

    pub fn window_of(&self, kind: WindowKind) -> Option<usize> {
        self.specs.iter().position(|s| s.kind == kind)
    }

    /// Windows containing z, finest pixel first.
    fn windows_at(&self, z: Complex64) -> Vec<usize> {
        let mut v: Vec<usize> = (0..self.grids.len())
            .filter(|&w| self.grids[w].index_of(z).is_some())
            .collect();
        v.sort_by(|&a, &b| {
            self.grids[a]
                .pixel_width()
                .total_cmp(&self.grids[b].pixel_width())
                .then(a.cmp(&b))
        });
        v
    }

    /// The component holding z in the finest window where it is labelled and
    /// clear of the frame; falls back to the finest labelled window.
    pub fn locate(&self, z: Complex64) -> Target {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Target::Exterior;
        }
        let ws = self.windows_at(z);
        if ws.is_empty() {
            return Target::Exterior;
        }
        let mut fallback = None;
        for w in ws {
            let l = self.grids[w].label_at(z).unwrap();
            if l == NONE {
                continue;
            }
            let r = ComponentRef { window: w as u32, id: l };
            if !self.record(r).touches_frame {
                return Target::Component(r);
            }
            fallback.get_or_insert(r);
        }
        fallback.map_or(Target::Unresolved, Target::Component)
    }

    /// The record that stands for the same physical component as `r`.
    pub fn canonical(&self, r: ComponentRef) -> ComponentRef {
        match self.locate(self.record(r).representative) {
            Target::Component(c) => c,
            _ => r,
        }
    }

    pub fn is_canonical(&self, r: ComponentRef) -> bool {
        self.canonical(r) == r
    }

    fn resolve_targets(&mut self, p: &MapParams) {
        let m = MapEval::new(p);
        let targets: Vec<Vec<Target>> = self
            .records
            .iter()
            .map(|rs| rs.iter().map(|r| self.locate(m.value(r.representative))).collect())
            .collect();
        for (rs, ts) in self.records.iter_mut().zip(targets) {
            for (r, t) in rs.iter_mut().zip(ts) {
                r.forward_target = t;
            }
        }
    }

    fn tagged(&self, role: Role, kinds: &[WindowKind]) -> Option<ComponentRef> {
        for &k in kinds {
            for (w, s) in self.specs.iter().enumerate() {
                if s.kind != k {
                    continue;
                }
                if let Some(r) = self.records[w].iter().find(|r| r.role == role) {
                    return Some(r.reference());
                }
            }
        }
        None
    }

    fn primary_roles(&self, crit: &CriticalSet) -> Roles {
        use WindowKind::*;
        let annulus_a = self.tagged(Role::AnnulusA, &[Ring, Custom]);
        let free_ring_on_annulus = annulus_a.map_or(0, |r| {
            let g = &self.grids[r.window as usize];
            crit.free_ring
                .iter()
                .filter(|&&c| g.label_at(c) == Some(r.id))
                .count()
        });
        Roles {
            a_inf: self.tagged(Role::AInf, &[Global, Custom]),
            trap_door: self.tagged(Role::TrapDoor, &[Ring, Inner, Custom]),
            annulus_a,
            disk_d: self.tagged(Role::DiskD, &[Disk, Custom]),
            u_nu: self.tagged(Role::UNu, &[Global, Custom]),
            free_ring_on_annulus,
        }
    }
}
