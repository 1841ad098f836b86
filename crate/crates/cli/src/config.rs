//! Flat `key = value` run configuration.
//!
//! The format is deliberately primitive: UTF-8 text, one assignment per line,
//! `#` starts a comment, complex numbers are written `re,im`, lists of reals
//! are comma-separated. Parsing is strict — an unknown key, a malformed
//! value, or a key assigned twice in the same file is an error naming the
//! key. Command-line flags use the same key names (`--width 512`) and win
//! over file values.

use num_complex::Complex64;
use std::collections::HashSet;
use std::path::PathBuf;

/// One configuration for one command invocation. Every field has the
/// documented default; commands read the subset they need and ignore the
/// rest, so a single file can drive several commands.
#[derive(Clone, Debug)]
pub struct RunConfig {
    /// Path to a map description file (`factor a=<re>,<im> p=<re>,<im>,...`
    /// per line, lowest coefficient first). Empty: build the quadratic map
    /// from `c1` and `a` instead. Default: empty.
    pub map_file: String,
    /// Quadratic-family parameter c in p(z) = z^2 + c. Default `-1.1,0`.
    pub c1: Complex64,
    /// Hénon factor coefficient a (also the scanned family's fixed second
    /// parameter). Default `0.4,0`.
    pub a: Complex64,
    /// Directory all output files are written into; created when missing.
    /// Default `out`.
    pub out_dir: PathBuf,
    /// Image/grid columns. Default 512.
    pub width: usize,
    /// Image/grid rows. Default 512.
    pub height: usize,
    /// Window bounds for renders, slices and parameter scans.
    /// Defaults -3, 3, -3, 3.
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    /// Green-function error tolerance. Default 1e-8.
    pub tol: f64,
    /// Orbit iteration budget. Default 2048.
    pub budget: u32,
    /// Worker threads; 0 means all available cores. Results are identical
    /// for every setting. Default 0.
    pub threads: usize,
    /// Cells/samples per axis for `slice`, `equidist` and `nevanlinna`;
    /// 0 means the per-command default (slice 2048, equidist 32,
    /// nevanlinna 24). Default 0.
    pub resolution: usize,
    /// Fixed z2 of the rendering/slicing plane {z2 = const}. Default `0,0`.
    pub plane_z2: Complex64,
    /// The equidistribution target line {z1 = curve_c}. Default `0,0`.
    pub curve_c: Complex64,
    /// First pullback depth for `equidist`. Default 1.
    pub n_min: u32,
    /// Last pullback depth for `equidist`. Default 10.
    pub n_max: u32,
    /// Highest period solved by `periodic`. Default 2.
    pub period: u32,
    /// Newton seed-grid samples per axis for periodic-point searches.
    /// Default 6.
    pub seeds_per_axis: usize,
    /// Radius ladder for `nevanlinna`, strictly increasing.
    /// Default `0.4,1.0,2.2`.
    pub radii: Vec<f64>,
    /// Bump radii for the `nevanlinna` test forms, centered at the saddle.
    /// Default `0.6,0.9,1.2`.
    pub bump_rho: Vec<f64>,
    /// Phase-space seed tracked by `param-scan`. Defaults `0,0` and `0,0`.
    pub seed_z1: Complex64,
    pub seed_z2: Complex64,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            map_file: String::new(),
            c1: Complex64::new(-1.1, 0.0),
            a: Complex64::new(0.4, 0.0),
            out_dir: PathBuf::from("out"),
            width: 512,
            height: 512,
            x_min: -3.0,
            x_max: 3.0,
            y_min: -3.0,
            y_max: 3.0,
            tol: 1e-8,
            budget: 2048,
            threads: 0,
            resolution: 0,
            plane_z2: Complex64::new(0.0, 0.0),
            curve_c: Complex64::new(0.0, 0.0),
            n_min: 1,
            n_max: 10,
            period: 2,
            seeds_per_axis: 6,
            radii: vec![0.4, 1.0, 2.2],
            bump_rho: vec![0.6, 0.9, 1.2],
            seed_z1: Complex64::new(0.0, 0.0),
            seed_z2: Complex64::new(0.0, 0.0),
        }
    }
}

pub const KEY_LIST: &[&str] = &[
    "map_file",
    "c1",
    "a",
    "out_dir",
    "width",
    "height",
    "x_min",
    "x_max",
    "y_min",
    "y_max",
    "tol",
    "budget",
    "threads",
    "resolution",
    "plane_z2",
    "curve_c",
    "n_min",
    "n_max",
    "period",
    "seeds_per_axis",
    "radii",
    "bump_rho",
    "seed_z1",
    "seed_z2",
];

fn parse_complex(key: &str, value: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = value.split(',').collect();
    if parts.len() != 2 {
        return Err(format!(
            "config key `{key}`: complex values are written `re,im`, got `{value}`"
        ));
    }
    let re = parse_f64(key, parts[0])?;
    let im = parse_f64(key, parts[1])?;
    Ok(Complex64::new(re, im))
}

fn parse_f64(key: &str, value: &str) -> Result<f64, String> {
    let v: f64 = value
        .trim()
        .parse()
        .map_err(|_| format!("config key `{key}`: `{value}` is not a real number"))?;
    if !v.is_finite() {
        return Err(format!("config key `{key}`: `{value}` is not finite"));
    }
    Ok(v)
}

fn parse_f64_list(key: &str, value: &str) -> Result<Vec<f64>, String> {
    value.split(',').map(|p| parse_f64(key, p)).collect()
}

fn parse_usize(key: &str, value: &str) -> Result<usize, String> {
    value
        .trim()
        .parse()
        .map_err(|_| format!("config key `{key}`: `{value}` is not a non-negative integer"))
}

fn parse_u32(key: &str, value: &str) -> Result<u32, String> {
    value
        .trim()
        .parse()
        .map_err(|_| format!("config key `{key}`: `{value}` is not a non-negative integer"))
}

impl RunConfig {
    /// Assign one key. The value string is already trimmed of surrounding
    /// whitespace; errors carry the key name.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "map_file" => self.map_file = value.to_string(),
            "c1" => self.c1 = parse_complex(key, value)?,
            "a" => self.a = parse_complex(key, value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            "width" => self.width = parse_usize(key, value)?,
            "height" => self.height = parse_usize(key, value)?,
            "x_min" => self.x_min = parse_f64(key, value)?,
            "x_max" => self.x_max = parse_f64(key, value)?,
            "y_min" => self.y_min = parse_f64(key, value)?,
            "y_max" => self.y_max = parse_f64(key, value)?,
            "tol" => self.tol = parse_f64(key, value)?,
            "budget" => self.budget = parse_u32(key, value)?,
            "threads" => self.threads = parse_usize(key, value)?,
            "resolution" => self.resolution = parse_usize(key, value)?,
            "plane_z2" => self.plane_z2 = parse_complex(key, value)?,
            "curve_c" => self.curve_c = parse_complex(key, value)?,
            "n_min" => self.n_min = parse_u32(key, value)?,
            "n_max" => self.n_max = parse_u32(key, value)?,
            "period" => self.period = parse_u32(key, value)?,
            "seeds_per_axis" => self.seeds_per_axis = parse_usize(key, value)?,
            "radii" => self.radii = parse_f64_list(key, value)?,
            "bump_rho" => self.bump_rho = parse_f64_list(key, value)?,
            "seed_z1" => self.seed_z1 = parse_complex(key, value)?,
            "seed_z2" => self.seed_z2 = parse_complex(key, value)?,
            _ => {
                return Err(format!(
                    "unknown config key `{key}`; known keys: {}",
                    KEY_LIST.join(", ")
                ))
            }
        }
        Ok(())
    }

    /// Strict parse of a config file body. Duplicated keys are errors so a
    /// file cannot silently shadow itself; overriding belongs to flags.
    pub fn apply_file(&mut self, body: &str) -> Result<(), String> {
        let mut seen: HashSet<String> = HashSet::new();
        for (idx, raw) in body.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(format!(
                    "config line {}: expected `key = value`, got `{line}`",
                    idx + 1
                ));
            };
            let key = key.trim();
            if !seen.insert(key.to_string()) {
                return Err(format!("config key `{key}` assigned twice (line {})", idx + 1));
            }
            self.set(key, value.trim())?;
        }
        Ok(())
    }
}
