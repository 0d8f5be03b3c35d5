//! Connectivity calculus: the itinerary of the free critical orbit,
//! attainable connectivities, Riemann-Hurwitz propagation and checks of
//! measured components against both.

use num_bigint::BigUint;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{MapEval, MapParams};
use crate::raster::topology::{complement_map, ComplementMap};
use crate::raster::{Atlas, ComponentRecord, ComponentRef, LabelGrid, Target, NONE};
use crate::roots::CriticalSet;

/// Longest critical itinerary followed before giving up.
pub const ITINERARY_CAP: u32 = 64;
/// Pixel count from which a component is considered resolved.
pub const MIN_RESOLVED_PIXELS: u64 = 10_000;

/// Coarse position in the dynamical plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Region {
    /// Unbounded complementary region of U_ν (outside U_ν, away from A_∞).
    UNp1,
    /// Complementary region of U_ν containing the origin, outside Bdd(A).
    UN,
    /// Bdd(A) minus A and the trap door.
    UD,
    /// Bounded complementary regions of U_ν other than the origin's.
    U1,
    /// Anywhere in Bdd(A); used for the last itinerary step.
    BddA,
    A,
    T,
    UNu,
    AInf,
    Other,
}

/// Partition of the plane read off the ring and global grids.
#[derive(Clone, Debug)]
pub struct Zones {
    ring: usize,
    annulus: u32,
    trap: Option<u32>,
    a_map: ComplementMap,
    nu: Option<NuZone>,
    a_inf: Option<ComponentRef>,
    k_esc: f64,
}

#[derive(Clone, Debug)]
struct NuZone {
    window: usize,
    id: u32,
    map: ComplementMap,
    origin_region: u32,
}

impl Zones {
    /// Needs a tagged annulus; the U_ν split is only available when U_ν
    /// surrounds the origin.
    pub fn new(atlas: &Atlas, k_esc: f64) -> Result<Zones> {
        let a = atlas
            .roles
            .annulus_a
            .ok_or_else(|| Error::Unresolved("critical annulus not found".into()))?;
        let ring = a.window as usize;
        let g = &atlas.grids[ring];
        let a_map = complement_map(&g.filled_id, g.px, g.py, a.id);
        let trap = g
            .origin_index()
            .map(|o| g.filled_id[o])
            .filter(|&l| l != NONE && l != a.id);
        let nu = match atlas.roles.u_nu {
            Some(u) if atlas.record(u).surrounds_origin => {
                let g = &atlas.grids[u.window as usize];
                let map = complement_map(&g.filled_id, g.px, g.py, u.id);
                g.origin_index().map(|o| NuZone {
                    window: u.window as usize,
                    id: u.id,
                    origin_region: map.region[o],
                    map,
                })
            }
            _ => None,
        };
        Ok(Zones {
            ring,
            annulus: a.id,
            trap,
            a_map,
            nu,
            a_inf: atlas.roles.a_inf,
            k_esc,
        })
    }

    pub fn u_nu_split(&self) -> bool {
        self.nu.is_some()
    }

    /// Region of a point, or None when no grid needed to decide it covers z.
    pub fn region_of(&self, atlas: &Atlas, z: Complex64) -> Option<Region> {
        if !(z.re.is_finite() && z.im.is_finite()) || z.norm() > self.k_esc {
            return Some(Region::AInf);
        }
        let rg: &LabelGrid = &atlas.grids[self.ring];
        if let Some(i) = rg.index_of(z) {
            let f = rg.filled_id[i];
            if f == self.annulus {
                return Some(Region::A);
            }
            let r = self.a_map.region[i];
            if self.a_map.bounded[r as usize] {
                return Some(if f != NONE && Some(f) == self.trap {
                    Region::T
                } else {
                    Region::UD
                });
            }
        }
        if let Some(nu) = &self.nu {
            let g = &atlas.grids[nu.window];
            let i = g.index_of(z)?;
            let f = g.filled_id[i];
            if f == nu.id {
                return Some(Region::UNu);
            }
            if let Some(ai) = self.a_inf {
                let ag = &atlas.grids[ai.window as usize];
                if ag.index_of(z).map(|j| ag.component_id[j]) == Some(ai.id) {
                    return Some(Region::AInf);
                }
            }
            let r = nu.map.region[i];
            return Some(if r == nu.origin_region {
                Region::UN
            } else if nu.map.bounded[r as usize] {
                Region::U1
            } else {
                Region::UNp1
            });
        }
        if let Some(ai) = self.a_inf {
            let ag = &atlas.grids[ai.window as usize];
            if ag.index_of(z).map(|j| ag.component_id[j]) == Some(ai.id) {
                return Some(Region::AInf);
            }
        }
        rg.index_of(z).map(|_| Region::Other)
    }

    /// Region of every record's representative.
    pub fn record_regions(&self, atlas: &Atlas) -> Vec<Vec<Option<Region>>> {
        atlas
            .records
            .iter()
            .map(|rs| {
                rs.iter()
                    .map(|r| self.region_of(atlas, r.representative))
                    .collect()
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Terminal {
    LandsInA,
    LandsInUd,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItineraryRecord {
    pub k: u32,
    /// Regions of the iterates 1..=k; the last is BDD_A.
    pub steps: Vec<Region>,
    pub u_nu_surrounds: bool,
    pub terminal: Terminal,
}

impl ItineraryRecord {
    /// m with ν_λ in the m-th nested preimage of the critical annulus, when
    /// that is what the itinerary shows.
    pub fn ring_index(&self) -> Option<u32> {
        (self.terminal == Terminal::LandsInA && self.u_nu_surrounds).then_some(self.k)
    }
}

/// Follows ν_λ until it enters Bdd(A).
pub fn critical_itinerary(
    p: &MapParams,
    atlas: &Atlas,
    zones: &Zones,
    crit: &CriticalSet,
) -> Result<ItineraryRecord> {
    let u_nu = atlas
        .roles
        .u_nu
        .ok_or_else(|| Error::Unresolved("nu_lambda lies on a separator pixel".into()))?;
    let u_nu_surrounds = atlas.record(u_nu).surrounds_origin;
    match zones.region_of(atlas, crit.nu_lambda) {
        Some(Region::A | Region::T | Region::UD) => {
            return Err(Error::Degenerate("nu_lambda already lies in Bdd(A)".into()))
        }
        None => return Err(Error::OffGrid(0)),
        _ => {}
    }
    let m = MapEval::new(p);
    let mut z = crit.nu_lambda;
    let mut steps = Vec::new();
    for t in 1..=ITINERARY_CAP {
        z = m.value(z);
        let tag = match zones.region_of(atlas, z) {
            None => return Err(Error::OffGrid(t as usize)),
            Some(Region::AInf) => {
                return Err(Error::Unresolved(format!(
                    "iterate {t} of nu_lambda escapes without entering Bdd(A)"
                )))
            }
            Some(r @ (Region::A | Region::T | Region::UD)) => {
                steps.push(Region::BddA);
                return Ok(ItineraryRecord {
                    k: t,
                    steps,
                    u_nu_surrounds,
                    terminal: if r == Region::A {
                        Terminal::LandsInA
                    } else {
                        Terminal::LandsInUd
                    },
                });
            }
            Some(r @ (Region::UN | Region::UNp1)) => r,
            Some(_) => Region::Other,
        };
        steps.push(tag);
    }
    Err(Error::NotFound(format!(
        "nu_lambda did not reach Bdd(A) within {ITINERARY_CAP} iterates"
    )))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Guaranteed,
    Possible,
    Excluded,
}

/// Status of κ = (n+1)^i d^j n^l + 2 given the itinerary length k.
pub fn status_of(j: u32, l: u32, k: u32) -> Status {
    let (j, l, k) = (j as u64, l as u64, k as u64);
    if l <= j * k.saturating_sub(1) {
        Status::Guaranteed
    } else if l <= j * k {
        Status::Possible
    } else {
        Status::Excluded
    }
}

mod decimal {
    use num_bigint::BigUint;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        BigUint::parse_bytes(s.as_bytes(), 10).ok_or_else(|| D::Error::custom("bad integer"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectivityWitness {
    pub i: u32,
    pub j: u32,
    pub l: u32,
    /// Decimal string in JSON.
    #[serde(with = "decimal")]
    pub kappa: BigUint,
    pub status: Status,
}

pub fn kappa(n: u32, d: u32, i: u32, j: u32, l: u32) -> BigUint {
    BigUint::from(n + 1).pow(i) * BigUint::from(d).pow(j) * BigUint::from(n).pow(l) + 2u32
}

/// κ as a machine integer; fails past 2^63 - 1.
pub fn kappa_u64(n: u32, d: u32, i: u32, j: u32, l: u32) -> Result<u64> {
    let v = kappa(n, d, i, j, l);
    u64::try_from(&v)
        .ok()
        .filter(|&x| x <= i64::MAX as u64)
        .ok_or_else(|| Error::Overflow(format!("kappa({i},{j},{l}) = {v}")))
}

pub fn witness(n: u32, d: u32, k: u32, i: u32, j: u32, l: u32) -> ConnectivityWitness {
    ConnectivityWitness {
        i,
        j,
        l,
        kappa: kappa(n, d, i, j, l),
        status: status_of(j, l, k),
    }
}

/// Every (i, j, l) in the box [0, i_max] × [0, j_max] × [0, l_max].
pub fn enumerate_attainable(
    n: u32,
    d: u32,
    k: u32,
    i_max: u32,
    j_max: u32,
    l_max: u32,
) -> Vec<ConnectivityWitness> {
    let mut out = Vec::new();
    for i in 0..=i_max {
        for j in 0..=j_max {
            for l in 0..=l_max {
                out.push(witness(n, d, k, i, j, l));
            }
        }
    }
    out
}

/// All (i, j, l) with (n+1)^i d^j n^l = m.
pub fn factorizations(n: u32, d: u32, m: u64) -> Result<Vec<(u32, u32, u32)>> {
    if n < 2 || d < 2 {
        return Err(Error::InvalidParams("factorization needs n, d >= 2".into()));
    }
    if m == 0 || m > i64::MAX as u64 {
        return Err(Error::Overflow(format!("kappa - 2 = {m} is out of range")));
    }
    let (b1, b2, b3) = (n as u64 + 1, d as u64, n as u64);
    let mut out = Vec::new();
    let mut x = 1u64;
    let mut i = 0;
    while m.is_multiple_of(x) {
        let mut y = x;
        let mut j = 0;
        while m.is_multiple_of(y) {
            let mut w = y;
            let mut l = 0;
            while m.is_multiple_of(w) {
                if w == m {
                    out.push((i, j, l));
                }
                match w.checked_mul(b3) {
                    Some(v) => w = v,
                    None => break,
                }
                l += 1;
            }
            match y.checked_mul(b2) {
                Some(v) => y = v,
                None => break,
            }
            j += 1;
        }
        match x.checked_mul(b1) {
            Some(v) => x = v,
            None => break,
        }
        i += 1;
    }
    Ok(out)
}

/// Degree of S on a component lying in the given region.
pub fn step_degree(n: u32, d: u32, step: Region) -> Result<u32> {
    match step {
        Region::UNp1 => Ok(n + 1),
        Region::UN => Ok(n),
        Region::UD => Ok(d),
        Region::U1 => Ok(1),
        other => Err(Error::InvalidParams(format!(
            "no covering degree for region {other:?}"
        ))),
    }
}

/// Connectivity of the unramified preimage, in the given region, of a
/// component of connectivity `kappa_image`.
pub fn propagate_rh(n: u32, d: u32, kappa_image: u64, step: Region) -> Result<u64> {
    let s = step_degree(n, d, step)? as u64;
    kappa_image
        .checked_sub(2)
        .and_then(|x| x.checked_mul(s))
        .and_then(|x| x.checked_add(2))
        .filter(|&x| x <= i64::MAX as u64)
        .ok_or_else(|| Error::Overflow(format!("{s} * ({kappa_image} - 2) + 2")))
}

/// A measured component in the form the checks consume.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasuredComponent {
    pub component: ComponentRef,
    pub connectivity: u32,
    pub pixel_count: u64,
    pub surrounds_origin: bool,
    pub zone: Option<Region>,
    pub representative: Complex64,
}

/// A connectivity that must be present among the resolved components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expectation {
    pub kappa: u64,
    pub zone: Region,
    pub i: u32,
    pub j: u32,
    pub l: u32,
}

/// The guaranteed connectivities one preimage away from U_ν.
pub fn depth_one_expectations(n: u32, d: u32) -> Vec<Expectation> {
    vec![
        Expectation { kappa: 3, zone: Region::UNu, i: 0, j: 0, l: 0 },
        Expectation { kappa: n as u64 + 3, zone: Region::UNp1, i: 1, j: 0, l: 0 },
        Expectation { kappa: d as u64 + 2, zone: Region::UD, i: 0, j: 1, l: 0 },
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormMatch {
    pub component: ComponentRef,
    pub connectivity: u32,
    pub witness: (u32, u32, u32),
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormViolation {
    pub component: ComponentRef,
    pub connectivity: u32,
    pub pixel_count: u64,
    pub representative: Complex64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormReport {
    pub k: Option<u32>,
    pub checked: usize,
    pub matched: Vec<FormMatch>,
    pub violations: Vec<FormViolation>,
    pub missing: Vec<Expectation>,
}

impl FormReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.missing.is_empty()
    }
}

/// Checks every κ >= 3 against the admissible forms and looks up each
/// expectation. With k unknown, any factorization is accepted.
pub fn verify_measured(
    n: u32,
    d: u32,
    k: Option<u32>,
    measured: &[MeasuredComponent],
    expected: &[Expectation],
) -> FormReport {
    let mut rep = FormReport {
        k,
        checked: 0,
        matched: Vec::new(),
        violations: Vec::new(),
        missing: Vec::new(),
    };
    for c in measured.iter().filter(|c| c.connectivity >= 3) {
        rep.checked += 1;
        let violation = |reason: String| FormViolation {
            component: c.component,
            connectivity: c.connectivity,
            pixel_count: c.pixel_count,
            representative: c.representative,
            reason,
        };
        let facs = match factorizations(n, d, c.connectivity as u64 - 2) {
            Ok(f) => f,
            Err(e) => {
                rep.violations.push(violation(e.to_string()));
                continue;
            }
        };
        let best = facs
            .iter()
            .map(|&(i, j, l)| (k.map_or(Status::Possible, |k| status_of(j, l, k)), (i, j, l)))
            .min();
        match best {
            None => rep.violations.push(violation(format!(
                "{} - 2 is not of the form {}^i {}^j {}^l",
                c.connectivity,
                n + 1,
                d,
                n
            ))),
            Some((Status::Excluded, _)) => rep.violations.push(violation(format!(
                "every factorization of {} - 2 has l > j k",
                c.connectivity
            ))),
            Some((status, witness)) => rep.matched.push(FormMatch {
                component: c.component,
                connectivity: c.connectivity,
                witness,
                status,
            }),
        }
    }
    for e in expected {
        let found = measured
            .iter()
            .any(|c| c.connectivity as u64 == e.kappa && c.zone == Some(e.zone));
        if !found {
            rep.missing.push(*e);
        }
    }
    rep
}

/// One offending edge U -> V of the component digraph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeViolation {
    pub source: ComponentRef,
    pub target: ComponentRef,
    pub source_connectivity: u32,
    pub target_connectivity: u32,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DigraphReport {
    pub rh_checked: usize,
    pub rh_violations: Vec<EdgeViolation>,
    pub rigidity_checked: usize,
    pub rigidity_violations: Vec<EdgeViolation>,
    pub promotion_checked: usize,
    pub promotion_violations: Vec<EdgeViolation>,
    pub itinerary_checked: usize,
    pub itinerary_violations: Vec<EdgeViolation>,
}

impl DigraphReport {
    pub fn passed(&self) -> bool {
        self.rh_violations.is_empty()
            && self.rigidity_violations.is_empty()
            && self.promotion_violations.is_empty()
            && self.itinerary_violations.is_empty()
    }
}

fn edge(u: &ComponentRecord, v: &ComponentRecord, detail: String) -> EdgeViolation {
    EdgeViolation {
        source: u.reference(),
        target: v.reference(),
        source_connectivity: u.connectivity,
        target_connectivity: v.connectivity,
        detail,
    }
}

const COHERENCE_SAMPLES: usize = 64;
const SIBLING_MIN_PIXELS: u64 = 64;

/// Pixels of each listed label, thinned to about COHERENCE_SAMPLES each.
fn sample_pixels(grid: &LabelGrid, want: &[(u32, u64)]) -> Vec<(u32, Vec<usize>)> {
    let mut out: Vec<(u32, Vec<usize>)> = want.iter().map(|&(id, _)| (id, Vec::new())).collect();
    let slot: std::collections::HashMap<u32, usize> =
        want.iter().enumerate().map(|(k, &(id, _))| (id, k)).collect();
    let mut seen = vec![0u64; want.len()];
    for (i, &l) in grid.component_id.iter().enumerate() {
        if let Some(&k) = slot.get(&l) {
            let stride = (want[k].1 / COHERENCE_SAMPLES as u64).max(1);
            if seen[k] % stride == stride / 2 {
                out[k].1.push(i);
            }
            seen[k] += 1;
        }
    }
    out
}

/// Edges U -> S(U) between resolved components, each U taken from the
/// window that represents it best.
///
/// An edge is kept when V is simply connected or U is sampled at least as
/// finely as V once pushed forward, so every hole V shows can show up in U,
/// and when sampled pixels of U all land on V or on separators. A V broken
/// up by the raster fails the second test.
fn resolved_edges(
    p: &MapParams,
    atlas: &Atlas,
    regions: Option<&[Vec<Option<Region>>]>,
    min_pixels: u64,
) -> Vec<(ComponentRef, ComponentRef)> {
    let m = MapEval::new(p);
    // A component surrounding the origin has one preimage per zone; several
    // pieces in one window mean that preimage was broken up by the raster.
    let mut pieces: std::collections::HashMap<(u32, ComponentRef, Option<Region>), u32> =
        std::collections::HashMap::new();
    if let Some(regions) = regions {
        for rs in &atlas.records {
            for u in rs {
                if let Target::Component(v) = u.forward_target {
                    if u.pixel_count >= SIBLING_MIN_PIXELS && atlas.record(v).surrounds_origin {
                        let zone = regions[u.window as usize][u.id as usize];
                        *pieces.entry((u.window, v, zone)).or_default() += 1;
                    }
                }
            }
        }
    }
    let fragmented = |u: &ComponentRecord, v: ComponentRef| {
        regions.is_some_and(|r| {
            let zone = r[u.window as usize][u.id as usize];
            pieces.get(&(u.window, v, zone)).copied().unwrap_or(0) > 1
        })
    };
    let mut out = Vec::new();
    for (w, rs) in atlas.records.iter().enumerate() {
        let mut cand = Vec::new();
        for u in rs {
            if !u.is_resolved(min_pixels) || !atlas.is_canonical(u.reference()) {
                continue;
            }
            let Target::Component(v) = u.forward_target else { continue };
            let pu = atlas.grids[w].pixel_width();
            let pv = atlas.grids[v.window as usize].pixel_width();
            let stretch = crate::map::derivative(p, u.representative).norm();
            let vr = atlas.record(v);
            if vr.is_resolved(min_pixels)
                && (vr.connectivity == 1 || pu * stretch <= pv)
                && !fragmented(u, v)
            {
                cand.push((u.id, u.pixel_count, v));
            }
        }
        let want: Vec<(u32, u64)> = cand.iter().map(|&(id, c, _)| (id, c)).collect();
        let grid = &atlas.grids[w];
        for ((id, pixels), &(_, _, v)) in sample_pixels(grid, &want).into_iter().zip(&cand) {
            let vg = &atlas.grids[v.window as usize];
            let coherent = pixels.iter().all(|&i| {
                let z = m.value(grid.pixel_center(i % grid.px, i / grid.px));
                matches!(vg.label_at(z), Some(l) if l == v.id || l == NONE)
            });
            if coherent {
                out.push((ComponentRef { window: w as u32, id }, v));
            }
        }
    }
    out
}

/// Riemann-Hurwitz, rigidity, no-promotion and itinerary-bound checks.
pub fn check_digraph(
    p: &MapParams,
    atlas: &Atlas,
    regions: Option<&[Vec<Option<Region>>]>,
    k: Option<u32>,
    min_pixels: u64,
) -> DigraphReport {
    let (n, d) = (p.n, p.d);
    let mut rep = DigraphReport::default();
    let degrees = [1, n, d, n + 1, n + d];
    for (ur, vr) in resolved_edges(p, atlas, regions, min_pixels) {
        let (u, v) = (atlas.record(ur), atlas.record(vr));
        if u.critical_points == 0 {
            rep.rh_checked += 1;
            let (ku, kv) = (u.connectivity as i64, v.connectivity as i64);
            if !degrees.iter().any(|&s| ku - 2 == s as i64 * (kv - 2)) {
                rep.rh_violations.push(edge(
                    u,
                    v,
                    format!("{ku} - 2 is not s ({kv} - 2) for s in {degrees:?}"),
                ));
            }
        }
        let v_free = !v.surrounds_origin && !v.contains_origin;
        let u_free = !u.surrounds_origin && !u.contains_origin;
        if !v.surrounds_origin && u_free && u.critical_points == 0 {
            rep.rigidity_checked += 1;
            if u.connectivity != v.connectivity {
                rep.rigidity_violations
                    .push(edge(u, v, "non-surrounding chain changes connectivity".into()));
            }
        }
        if v_free {
            rep.promotion_checked += 1;
            if u.surrounds_origin {
                rep.promotion_violations
                    .push(edge(u, v, "surrounding preimage of a non-surrounding component".into()));
            }
        }
    }
    if let (Some(regions), Some(k)) = (regions, k) {
        let zone = |r: ComponentRef| regions[r.window as usize][r.id as usize];
        for rs in &atlas.records {
            for u in rs {
                let ur = u.reference();
                if !u.is_resolved(min_pixels)
                    || !u.surrounds_origin
                    || zone(ur) != Some(Region::UN)
                    || !atlas.is_canonical(ur)
                {
                    continue;
                }
                let mut run = 1;
                let mut cur = u.forward_target;
                for _ in 0..ITINERARY_CAP {
                    let Target::Component(c) = cur else { break };
                    match zone(c) {
                        Some(Region::UN) => run += 1,
                        Some(Region::UD) => {
                            rep.itinerary_checked += 1;
                            if run > k {
                                rep.itinerary_violations.push(edge(
                                    u,
                                    atlas.record(c),
                                    format!("{run} steps in U_n before U_d exceeds k = {k}"),
                                ));
                            }
                            break;
                        }
                        _ => break,
                    }
                    cur = atlas.record(c).forward_target;
                }
            }
        }
    }
    rep
}

/// Resolved, canonical records with their zones, ready for `verify_measured`.
pub fn measured_components(
    atlas: &Atlas,
    regions: Option<&[Vec<Option<Region>>]>,
    min_pixels: u64,
) -> Vec<MeasuredComponent> {
    let mut out = Vec::new();
    for (w, rs) in atlas.records.iter().enumerate() {
        for r in rs {
            if !r.is_resolved(min_pixels) || !atlas.is_canonical(r.reference()) {
                continue;
            }
            out.push(MeasuredComponent {
                component: r.reference(),
                connectivity: r.connectivity,
                pixel_count: r.pixel_count,
                surrounds_origin: r.surrounds_origin,
                zone: regions.and_then(|z| z[w][r.id as usize]),
                representative: r.representative,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statuses_for_n3_d2_k2() {
        let w = |i, j, l| witness(3, 2, 2, i, j, l);
        assert_eq!((w(0, 0, 0).kappa, w(0, 0, 0).status), (3u32.into(), Status::Guaranteed));
        assert_eq!((w(0, 1, 1).kappa, w(0, 1, 1).status), (8u32.into(), Status::Guaranteed));
        assert_eq!((w(0, 1, 2).kappa, w(0, 1, 2).status), (20u32.into(), Status::Possible));
        assert_eq!((w(0, 1, 3).kappa, w(0, 1, 3).status), (56u32.into(), Status::Excluded));
    }

    #[test]
    fn pure_n_plus_one_powers_are_guaranteed() {
        for k in 1..4 {
            for i in 0..6 {
                let w = witness(2, 3, k, i, 0, 0);
                assert_eq!(w.status, Status::Guaranteed);
                assert_eq!(w.kappa, BigUint::from(3u32.pow(i) + 2));
            }
        }
    }

    #[test]
    fn enumeration_covers_the_box() {
        let all = enumerate_attainable(2, 3, 1, 2, 3, 4);
        assert_eq!(all.len(), 3 * 4 * 5);
        assert!(all.iter().all(|w| w.status == status_of(w.j, w.l, 1)));
    }

    #[test]
    fn shared_factors_give_several_witnesses() {
        let mut f = factorizations(2, 4, 16).unwrap();
        f.sort();
        assert_eq!(f, vec![(0, 0, 4), (0, 1, 2), (0, 2, 0)]);
        assert!(factorizations(3, 3, 2).unwrap().is_empty());
    }

    #[test]
    fn exact_kappa_and_overflow() {
        let big = kappa(2, 3, 40, 40, 40);
        assert_eq!(big, BigUint::from(3u32).pow(80) * BigUint::from(2u32).pow(40) + 2u32);
        assert!(matches!(kappa_u64(2, 3, 40, 40, 40), Err(Error::Overflow(_))));
        assert_eq!(kappa_u64(2, 3, 1, 1, 1).unwrap(), 20);
    }

    #[test]
    fn riemann_hurwitz_steps() {
        assert_eq!(propagate_rh(2, 3, 3, Region::UD).unwrap(), 5);
        let mut k = 3;
        for _ in 0..4 {
            k = propagate_rh(2, 3, k, Region::UNp1).unwrap();
        }
        assert_eq!(k, 81 + 2);
        assert_eq!(propagate_rh(3, 2, 8, Region::UN).unwrap(), 20);
        assert!(propagate_rh(2, 3, 3, Region::A).is_err());
    }

    fn measured(kappa: u32, zone: Region) -> MeasuredComponent {
        MeasuredComponent {
            component: ComponentRef { window: 0, id: kappa },
            connectivity: kappa,
            pixel_count: 20_000,
            surrounds_origin: true,
            zone: Some(zone),
            representative: Complex64::default(),
        }
    }

    #[test]
    fn measured_forms() {
        let ok = [1, 2, 3].map(|k| measured(k, Region::UNu));
        let rep = verify_measured(2, 3, Some(1), &ok, &[]);
        assert!(rep.passed());
        assert_eq!(rep.checked, 1);
        let bad = [measured(4, Region::UN)];
        let rep = verify_measured(3, 3, Some(1), &bad, &[]);
        assert_eq!(rep.violations.len(), 1);
        // 6 - 2 = n^2 only: l = 2 > j k = 0.
        let excluded = [measured(6, Region::UN)];
        assert_eq!(verify_measured(2, 3, Some(3), &excluded, &[]).violations.len(), 1);
        // 2 * 3 + 2 = 8 (n=2, d=3): i=0, j=1, l=1 needs k >= 1 for POSSIBLE.
        let eight = [measured(8, Region::UN)];
        let rep = verify_measured(2, 3, Some(1), &eight, &[]);
        assert!(rep.passed());
        assert_eq!(rep.matched[0].status, Status::Possible);
    }

    #[test]
    fn missing_expectations_are_reported() {
        let have = [measured(3, Region::UNu), measured(5, Region::UNp1)];
        let rep = verify_measured(2, 3, Some(1), &have, &depth_one_expectations(2, 3));
        assert_eq!(rep.missing.len(), 1);
        assert_eq!(rep.missing[0].zone, Region::UD);
    }

    #[test]
    fn ring_index_requires_surrounding_capture() {
        let mut it = ItineraryRecord {
            k: 2,
            steps: vec![Region::UN, Region::BddA],
            u_nu_surrounds: true,
            terminal: Terminal::LandsInA,
        };
        assert_eq!(it.ring_index(), Some(2));
        it.u_nu_surrounds = false;
        assert_eq!(it.ring_index(), None);
        it.u_nu_surrounds = true;
        it.terminal = Terminal::LandsInUd;
        assert_eq!(it.ring_index(), None);
    }
}
