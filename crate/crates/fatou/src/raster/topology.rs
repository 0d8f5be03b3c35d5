//! Pixel topology: 4-connected labelling, 8-connected complements, Euler
//! numbers and enclosure tests.

use super::NONE;

const N8: [(isize, isize); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let up = parent[parent[x as usize] as usize];
        parent[x as usize] = up;
        x = up;
    }
    x
}

fn union(parent: &mut [u32], a: u32, b: u32) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[hi as usize] = lo;
    }
}

/// Union-find over 4-adjacent non-separator pixels. Labels are numbered in
/// row-major order of each component's first pixel.
pub fn label_components(separator: &[bool], px: usize, py: usize) -> (Vec<u32>, usize) {
    let n = px * py;
    let mut parent: Vec<u32> = (0..n as u32).collect();
    for row in 0..py {
        for col in 0..px {
            let i = row * px + col;
            if separator[i] {
                continue;
            }
            if col > 0 && !separator[i - 1] {
                union(&mut parent, i as u32, (i - 1) as u32);
            }
            if row > 0 && !separator[i - px] {
                union(&mut parent, i as u32, (i - px) as u32);
            }
        }
    }
    let mut labels = vec![NONE; n];
    let mut next = 0u32;
    for i in 0..n {
        if separator[i] {
            continue;
        }
        let r = find(&mut parent, i as u32) as usize;
        if labels[r] == NONE {
            labels[r] = next;
            next += 1;
        }
        labels[i] = labels[r];
    }
    (labels, next as usize)
}

/// Absorbs each 8-connected blob of separator pixels that avoids the frame
/// and borders exactly one component into that component.
///
/// Such a blob is a hole containing no resolved Fatou pixel. Holes of this
/// kind come from the separator band closing around unresolved detail, not
/// from a boundary component of the Fatou component.
pub fn fill_separator_holes(labels: &[u32], px: usize, py: usize) -> Vec<u32> {
    let mut out = labels.to_vec();
    let mut seen = vec![false; labels.len()];
    let mut stack = Vec::new();
    let mut blob = Vec::new();
    for start in 0..labels.len() {
        if labels[start] != NONE || seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        blob.clear();
        let mut frame = false;
        let mut neighbour = NONE;
        let mut mixed = false;
        while let Some(i) = stack.pop() {
            blob.push(i);
            let (col, row) = ((i % px) as isize, (i / px) as isize);
            if col == 0 || row == 0 || col as usize == px - 1 || row as usize == py - 1 {
                frame = true;
            }
            for (dx, dy) in N8 {
                let (c, r) = (col + dx, row + dy);
                if c < 0 || r < 0 || c as usize >= px || r as usize >= py {
                    continue;
                }
                let j = r as usize * px + c as usize;
                let l = labels[j];
                if l == NONE {
                    if !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                } else if neighbour == NONE {
                    neighbour = l;
                } else if neighbour != l {
                    mixed = true;
                }
            }
        }
        if !frame && !mixed && neighbour != NONE {
            for &i in &blob {
                out[i] = neighbour;
            }
        }
    }
    out
}

/// Euler number V - E + F of every label's cubical complex (pixels as
/// vertices, 4-adjacent pairs as edges, full 2×2 blocks as faces).
///
/// For a 4-connected component, with the complement taken 8-connected and
/// the outside of the frame counted as one unbounded region, this equals
/// 1 - (number of holes).
pub fn euler_numbers(labels: &[u32], px: usize, py: usize, n: usize) -> Vec<i64> {
    let mut chi = vec![0i64; n];
    for row in 0..py {
        for col in 0..px {
            let i = row * px + col;
            let l = labels[i];
            if l == NONE {
                continue;
            }
            let k = l as usize;
            chi[k] += 1;
            let right = col + 1 < px && labels[i + 1] == l;
            let down = row + 1 < py && labels[i + px] == l;
            if right {
                chi[k] -= 1;
            }
            if down {
                chi[k] -= 1;
            }
            if right && down && labels[i + px + 1] == l {
                chi[k] += 1;
            }
        }
    }
    chi
}

pub fn touches_frame(labels: &[u32], px: usize, py: usize, id: u32) -> bool {
    (0..px).any(|c| labels[c] == id || labels[(py - 1) * px + c] == id)
        || (0..py).any(|r| labels[r * px] == id || labels[r * px + px - 1] == id)
}

/// Per-label flag: some pixel lies on the frame.
pub fn frame_flags(labels: &[u32], px: usize, py: usize, n: usize) -> Vec<bool> {
    let mut f = vec![false; n];
    let mut mark = |i: usize| {
        if labels[i] != NONE {
            f[labels[i] as usize] = true;
        }
    };
    for c in 0..px {
        mark(c);
        mark((py - 1) * px + c);
    }
    for r in 0..py {
        mark(r * px);
        mark(r * px + px - 1);
    }
    f
}

/// 8-connected regions of the complement of one label.
#[derive(Clone, Debug)]
pub struct ComplementMap {
    pub px: usize,
    pub py: usize,
    /// Region index per pixel, NONE on the label itself.
    pub region: Vec<u32>,
    /// Whether each region stays off the frame.
    pub bounded: Vec<bool>,
}

impl ComplementMap {
    pub fn holes(&self) -> usize {
        self.bounded.iter().filter(|&&b| b).count()
    }

    /// Pixel count of each region.
    pub fn region_sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.bounded.len()];
        for &r in &self.region {
            if r != NONE {
                s[r as usize] += 1;
            }
        }
        s
    }
}

pub fn complement_map(labels: &[u32], px: usize, py: usize, id: u32) -> ComplementMap {
    let mut region = vec![NONE; labels.len()];
    let mut bounded = Vec::new();
    let mut stack = Vec::new();
    for start in 0..labels.len() {
        if labels[start] == id || region[start] != NONE {
            continue;
        }
        let r = bounded.len() as u32;
        let mut inside = true;
        region[start] = r;
        stack.push(start);
        while let Some(i) = stack.pop() {
            let (col, row) = ((i % px) as isize, (i / px) as isize);
            if col == 0 || row == 0 || col as usize == px - 1 || row as usize == py - 1 {
                inside = false;
            }
            for (dx, dy) in N8 {
                let (c, rr) = (col + dx, row + dy);
                if c < 0 || rr < 0 || c as usize >= px || rr as usize >= py {
                    continue;
                }
                let j = rr as usize * px + c as usize;
                if labels[j] != id && region[j] == NONE {
                    region[j] = r;
                    stack.push(j);
                }
            }
        }
        bounded.push(inside);
    }
    ComplementMap {
        px,
        py,
        region,
        bounded,
    }
}

/// Inclusive pixel bounding box (col0, row0, col1, row1) of every label.
pub fn bounding_boxes(labels: &[u32], px: usize, n: usize) -> Vec<(usize, usize, usize, usize)> {
    let mut b = vec![(usize::MAX, usize::MAX, 0, 0); n];
    for (i, &l) in labels.iter().enumerate() {
        if l == NONE {
            continue;
        }
        let (c, r) = (i % px, i / px);
        let e = &mut b[l as usize];
        e.0 = e.0.min(c);
        e.1 = e.1.min(r);
        e.2 = e.2.max(c);
        e.3 = e.3.max(r);
    }
    b
}

/// One hole of a component: its area and how many of its pixels belong to
/// some component (as opposed to the separator).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Hole {
    pub area: u64,
    pub fatou_pixels: u64,
}

/// Holes of `id` in `filled`, searched inside the label's bounding box.
/// `strict` is the labelling before separator blobs were absorbed.
pub fn holes_of(
    filled: &[u32],
    strict: &[u32],
    px: usize,
    bbox: (usize, usize, usize, usize),
    id: u32,
) -> Vec<Hole> {
    let (c0, r0, c1, r1) = bbox;
    if c0 > c1 {
        return Vec::new();
    }
    let (w, h) = (c1 - c0 + 1, r1 - r0 + 1);
    let mut seen = vec![false; w * h];
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for start in 0..w * h {
        let g = (r0 + start / w) * px + c0 + start % w;
        if seen[start] || filled[g] == id {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let (mut area, mut fatou, mut inside) = (0u64, 0u64, true);
        while let Some(k) = stack.pop() {
            let (x, y) = ((k % w) as isize, (k / w) as isize);
            let gi = (r0 + y as usize) * px + c0 + x as usize;
            area += 1;
            fatou += u64::from(strict[gi] != NONE);
            if x == 0 || y == 0 || x as usize == w - 1 || y as usize == h - 1 {
                inside = false;
            }
            for (dx, dy) in N8 {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx as usize >= w || ny as usize >= h {
                    continue;
                }
                let nk = ny as usize * w + nx as usize;
                let ng = (r0 + ny as usize) * px + c0 + nx as usize;
                if !seen[nk] && filled[ng] != id {
                    seen[nk] = true;
                    stack.push(nk);
                }
            }
        }
        if inside {
            out.push(Hole { area, fatou_pixels: fatou });
        }
    }
    out
}

/// Labels that any closed curve around `origin` must meet: those present on
/// all four axis rays from the origin pixel to the frame.
pub fn enclosure_candidates(labels: &[u32], px: usize, py: usize, origin: usize) -> Vec<u32> {
    let (oc, or) = (origin % px, origin / px);
    let ray = |it: &mut dyn Iterator<Item = usize>| {
        let mut v: Vec<u32> = it.map(|i| labels[i]).filter(|&l| l != NONE).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let right = ray(&mut (oc..px).map(|c| or * px + c));
    let left = ray(&mut (0..=oc).map(|c| or * px + c));
    let up = ray(&mut (0..=or).map(|r| r * px + oc));
    let down = ray(&mut (or..py).map(|r| r * px + oc));
    right
        .into_iter()
        .filter(|l| {
            left.binary_search(l).is_ok()
                && up.binary_search(l).is_ok()
                && down.binary_search(l).is_ok()
        })
        .filter(|&l| l != labels[origin])
        .collect()
}

/// Flood fill from `origin` through pixels not labelled `id`; true when the
/// fill never reaches the frame. `stamp` is scratch space the size of the
/// grid, reused across calls with distinct `mark` values.
pub fn encloses(
    labels: &[u32],
    px: usize,
    py: usize,
    id: u32,
    origin: usize,
    stamp: &mut [u32],
    mark: u32,
) -> bool {
    if labels[origin] == id {
        return false;
    }
    let mut stack = vec![origin];
    stamp[origin] = mark;
    while let Some(i) = stack.pop() {
        let (col, row) = ((i % px) as isize, (i / px) as isize);
        if col == 0 || row == 0 || col as usize == px - 1 || row as usize == py - 1 {
            return false;
        }
        for (dx, dy) in N8 {
            let j = (row + dy) as usize * px + (col + dx) as usize;
            if labels[j] != id && stamp[j] != mark {
                stamp[j] = mark;
                stack.push(j);
            }
        }
    }
    true
}

/// City-block distance of every pixel to the nearest pixel outside its own
/// component (separators and the outside of the frame count as outside).
pub fn distance_to_boundary(labels: &[u32], px: usize, py: usize) -> Vec<u32> {
    let inf = u32::MAX / 2;
    let mut d = vec![inf; labels.len()];
    for row in 0..py {
        for col in 0..px {
            let i = row * px + col;
            let l = labels[i];
            let edge = col == 0 || row == 0 || col == px - 1 || row == py - 1;
            if l == NONE
                || edge
                || labels[i - 1] != l
                || labels[i + 1] != l
                || labels[i - px] != l
                || labels[i + px] != l
            {
                d[i] = 0;
            }
        }
    }
    for row in 0..py {
        for col in 0..px {
            let i = row * px + col;
            if col > 0 {
                d[i] = d[i].min(d[i - 1] + 1);
            }
            if row > 0 {
                d[i] = d[i].min(d[i - px] + 1);
            }
        }
    }
    for row in (0..py).rev() {
        for col in (0..px).rev() {
            let i = row * px + col;
            if col + 1 < px {
                d[i] = d[i].min(d[i + 1] + 1);
            }
            if row + 1 < py {
                d[i] = d[i].min(d[i + px] + 1);
            }
        }
    }
    d
}
