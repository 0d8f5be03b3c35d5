//! Run configuration: a flat `key = value` text file.
//!
//! Grammar, one entry per line:
//!
//! ```text
//! # comment
//! key = value
//! ```
//!
//! Blank lines and lines starting with `#` are skipped. Keys may appear once.
//! Lists are comma separated; windows are `cx,cy,w,h`.
//!
//! | key | value | default |
//! |-----|-------|---------|
//! | `n`, `d` | positive integers | required |
//! | `a_re`, `a_im` | reals | `a_im = 0`; `a_re` required |
//! | `q_re`, `q_im` | coefficient lists of Q, constant term first | `1`, zeros |
//! | `lambda_re`, `lambda_im` | reals | `0` |
//! | `window` | global window | chosen from the map |
//! | `ring_window` | window or `auto` | `auto` |
//! | `resolution` | columns per window | `1024` |
//! | `max_iter` | escape iterations | `500` |
//! | `k1` | trap radius constant | `1` |
//! | `separator_width` | pixels | `1` |
//! | `min_pixels` | smallest resolved component | `10000` |
//! | `out_dir` | directory | `out` |
//! | `ray_angle` | search ray, radians | `pi` |
//! | `t_hi`, `t_lo` | search range of abs(lambda) | `1e-6`, `1e-12` |
//! | `scan_resolution` | search scan columns | `512` |

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use fatou::analysis::AnalysisConfig;
use fatou::orbits::DEFAULT_K1;
use fatou::search::SearchOptions;
use fatou::{Complex64, MapParams, RasterSettings, Window};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const KEYS: &[&str] = &[
    "n",
    "d",
    "a_re",
    "a_im",
    "q_re",
    "q_im",
    "lambda_re",
    "lambda_im",
    "window",
    "ring_window",
    "resolution",
    "max_iter",
    "k1",
    "separator_width",
    "min_pixels",
    "out_dir",
    "ray_angle",
    "t_hi",
    "t_lo",
    "scan_resolution",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub n: u32,
    pub d: u32,
    pub a: Complex64,
    pub q: Vec<Complex64>,
    pub lambda: Complex64,
    pub window: Option<Window>,
    pub ring_window: Option<Window>,
    pub resolution: usize,
    pub max_iter: u32,
    pub k1: f64,
    pub separator_width: f64,
    pub min_pixels: u64,
    pub out_dir: PathBuf,
    pub ray_angle: f64,
    pub t_hi: f64,
    pub t_lo: f64,
    pub scan_resolution: usize,
}

fn err(line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("line {line}: {msg}"))
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = match s.trim() {
        "pi" => std::f64::consts::PI,
        "-pi" => -std::f64::consts::PI,
        t => t.parse().map_err(|_| format!("not a number: {t:?}"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("not finite: {s:?}"))
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(parse_f64).collect()
}

pub fn parse_window(s: &str) -> Result<Window, String> {
    let v = parse_list(s)?;
    if v.len() != 4 {
        return Err(format!("window needs cx,cy,w,h, got {s:?}"));
    }
    if !(v[2] > 0.0 && v[3] > 0.0) {
        return Err("window width and height must be positive".into());
    }
    Ok(Window::new(Complex64::new(v[0], v[1]), v[2], v[3]))
}

fn parse_int<T: std::str::FromStr>(s: &str) -> Result<T, String> {
    s.trim().parse().map_err(|_| format!("not an integer: {s:?}"))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, CliError> {
        let mut kv: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| err(i + 1, "expected key = value"))?;
            let k = k.trim();
            if !KEYS.contains(&k) {
                return Err(err(i + 1, format!("unknown key {k:?}")));
            }
            if kv.insert(k, (i + 1, v.trim())).is_some() {
                return Err(err(i + 1, format!("duplicate key {k:?}")));
            }
        }
        let get = |k: &str| kv.get(k).copied();
        macro_rules! field {
            ($k:literal, $parse:expr, $default:expr) => {
                match get($k) {
                    Some((l, v)) => $parse(v).map_err(|e| err(l, format!("{}: {e}", $k)))?,
                    None => $default,
                }
            };
        }
        let required = |k: &str| {
            get(k).ok_or_else(|| CliError::Config(format!("missing required key {k:?}")))
        };
        required("n")?;
        required("d")?;
        required("a_re")?;
        let n: u32 = field!("n", parse_int, 0);
        let d: u32 = field!("d", parse_int, 0);
        let a = Complex64::new(field!("a_re", parse_f64, 0.0), field!("a_im", parse_f64, 0.0));
        let q_re = field!("q_re", parse_list, vec![1.0]);
        let q_im = field!("q_im", parse_list, vec![0.0; q_re.len()]);
        if q_re.len() != q_im.len() {
            return Err(CliError::Config(format!(
                "q_re has {} coefficients but q_im has {}",
                q_re.len(),
                q_im.len()
            )));
        }
        let q = q_re.iter().zip(&q_im).map(|(&r, &i)| Complex64::new(r, i)).collect();
        let lambda = Complex64::new(
            field!("lambda_re", parse_f64, 0.0),
            field!("lambda_im", parse_f64, 0.0),
        );
        let ring_window = match get("ring_window") {
            Some((_, "auto")) | None => None,
            Some((l, v)) => Some(parse_window(v).map_err(|e| err(l, e))?),
        };
        let cfg = RunConfig {
            n,
            d,
            a,
            q,
            lambda,
            window: field!("window", |v| parse_window(v).map(Some), None),
            ring_window,
            resolution: field!("resolution", parse_int, 1024),
            max_iter: field!("max_iter", parse_int, 500),
            k1: field!("k1", parse_f64, DEFAULT_K1),
            separator_width: field!("separator_width", parse_f64, 1.0),
            min_pixels: field!("min_pixels", parse_int, fatou::connectivity::MIN_RESOLVED_PIXELS),
            out_dir: field!("out_dir", |v: &str| Ok::<_, String>(PathBuf::from(v)), "out".into()),
            ray_angle: field!("ray_angle", parse_f64, std::f64::consts::PI),
            t_hi: field!("t_hi", parse_f64, 1e-6),
            t_lo: field!("t_lo", parse_f64, 1e-12),
            scan_resolution: field!("scan_resolution", parse_int, 512),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        RunConfig::parse(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.params()?;
        if self.resolution < 16 || self.scan_resolution < 16 {
            return Err(CliError::Config("resolution must be at least 16".into()));
        }
        if self.max_iter == 0 {
            return Err(CliError::Config("max_iter must be positive".into()));
        }
        if !(self.k1 > 0.0 && self.separator_width > 0.0) {
            return Err(CliError::Config("k1 and separator_width must be positive".into()));
        }
        if !(self.t_hi > self.t_lo && self.t_lo > 0.0) {
            return Err(CliError::Config("need t_hi > t_lo > 0".into()));
        }
        Ok(())
    }

    pub fn params(&self) -> Result<MapParams, CliError> {
        MapParams::new(self.n, self.d, self.a, self.q.clone(), self.lambda)
            .map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn settings(&self) -> RasterSettings {
        RasterSettings {
            max_iter: self.max_iter,
            separator_width: self.separator_width,
        }
    }

    pub fn analysis(&self) -> AnalysisConfig {
        AnalysisConfig {
            resolution: self.resolution,
            settings: self.settings(),
            k1: self.k1,
            global_window: self.window,
            ring_window: self.ring_window,
            disk_window: true,
            inner_window: true,
            min_pixels: self.min_pixels,
        }
    }

    pub fn search(&self) -> SearchOptions {
        let base = SearchOptions::default();
        let verify = self.analysis();
        SearchOptions {
            ray_angle: self.ray_angle,
            t_hi: self.t_hi,
            t_lo: self.t_lo,
            scan: AnalysisConfig {
                resolution: self.scan_resolution,
                disk_window: false,
                ..verify.clone()
            },
            verify,
            ..base
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TILTED: &str = "
# comment
n = 2
d = 3
a_re = 0.9
a_im = 0.6
lambda_re = -1e-7
resolution = 256
ring_window = auto
";

    #[test]
    fn parses_defaults() {
        let c = RunConfig::parse(TILTED).unwrap();
        assert_eq!((c.n, c.d, c.resolution, c.max_iter), (2, 3, 256, 500));
        assert_eq!(c.q, vec![Complex64::new(1.0, 0.0)]);
        assert_eq!(c.lambda, Complex64::new(-1e-7, 0.0));
        assert_eq!(c.ring_window, None);
        assert_eq!(c.ray_angle, std::f64::consts::PI);
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        let e = RunConfig::parse(&format!("{TILTED}\ncolour = red\n")).unwrap_err();
        assert!(matches!(e, CliError::Config(ref m) if m.contains("unknown key")), "{e}");
        let e = RunConfig::parse(&format!("{TILTED}\nn = 3\n")).unwrap_err();
        assert!(matches!(e, CliError::Config(ref m) if m.contains("duplicate")), "{e}");
    }

    #[test]
    fn rejects_vanishing_q0() {
        let e = RunConfig::parse(&format!("{TILTED}\nq_re = 0, 1\n")).unwrap_err();
        assert!(matches!(e, CliError::Config(_)), "{e}");
    }

    #[test]
    fn reads_windows_and_lists() {
        let c = RunConfig::parse(&format!(
            "{TILTED}\nwindow = 0, 0, 2.2, 2.2\nq_re = 1, -0.5\nq_im = 0, 0\n"
        ))
        .unwrap();
        assert_eq!(c.window, Some(Window::new(Complex64::default(), 2.2, 2.2)));
        assert_eq!(c.q.len(), 2);
        assert!(RunConfig::parse(&format!("{TILTED}\nwindow = 0, 0, 2.2\n")).is_err());
        assert!(RunConfig::parse(&format!("{TILTED}\nq_re = 1, -0.5\nq_im = 0\n")).is_err());
    }

    #[test]
    fn missing_keys_are_reported() {
        let e = RunConfig::parse("n = 2\nd = 3\n").unwrap_err();
        assert!(matches!(e, CliError::Config(ref m) if m.contains("a_re")), "{e}");
    }
}
