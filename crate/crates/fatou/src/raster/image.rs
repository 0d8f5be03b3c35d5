use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::{LabelGrid, NONE, SATURATED};

/// How pixels are coloured. Separator pixels are always black.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Palette {
    /// Cyclic colour by escape time.
    EscapeTime,
    /// One colour per component label.
    Components,
}

const CYCLE: [[u8; 3]; 12] = [
    [255, 247, 188],
    [254, 227, 145],
    [254, 196, 79],
    [254, 153, 41],
    [236, 112, 20],
    [204, 76, 2],
    [153, 52, 4],
    [102, 37, 6],
    [66, 146, 198],
    [33, 113, 181],
    [8, 81, 156],
    [8, 48, 107],
];

fn hashed(id: u32) -> [u8; 3] {
    let mut x = id.wrapping_mul(0x9E37_79B9) ^ 0x5bd1_e995;
    x ^= x >> 15;
    x = x.wrapping_mul(0x2c1b_3c6d);
    x ^= x >> 12;
    [
        64 + (x & 0xBF) as u8,
        64 + ((x >> 8) & 0xBF) as u8,
        64 + ((x >> 16) & 0xBF) as u8,
    ]
}

/// Row-major 8-bit RGB.
pub fn render_rgb(grid: &LabelGrid, palette: Palette) -> Vec<u8> {
    let mut out = Vec::with_capacity(grid.px * grid.py * 3);
    for (i, &l) in grid.component_id.iter().enumerate() {
        let e = grid.escape_time[i];
        let rgb = if l == NONE || e == SATURATED {
            [0, 0, 0]
        } else {
            match palette {
                Palette::EscapeTime => CYCLE[e as usize % CYCLE.len()],
                Palette::Components => hashed(l),
            }
        };
        out.extend_from_slice(&rgb);
    }
    out
}

pub fn encode_png<W: Write>(grid: &LabelGrid, palette: Palette, w: W) -> std::io::Result<()> {
    let mut enc = png::Encoder::new(w, grid.px as u32, grid.py as u32);
    enc.set_color(png::ColorType::Rgb);
    enc.set_depth(png::BitDepth::Eight);
    let mut writer = enc.write_header().map_err(std::io::Error::other)?;
    writer
        .write_image_data(&render_rgb(grid, palette))
        .map_err(std::io::Error::other)?;
    writer.finish().map_err(std::io::Error::other)
}

pub fn write_png(grid: &LabelGrid, palette: Palette, path: &Path) -> std::io::Result<()> {
    encode_png(grid, palette, BufWriter::new(File::create(path)?))
}
