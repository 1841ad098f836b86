//! Command implementations. Each command reads its slice of the config,
//! runs the corresponding computation and emits files into `out_dir`; all
//! file bytes are deterministic functions of the config.

use crate::config::RunConfig;
use crate::output::{self, fmt};
use henon_core::currents::{pair_form, slice, ComplexLine, PotentialField, TestForm};
use henon_core::equidist::{default_test_forms, equidist_experiment, Curve};
use henon_core::error::Error as CoreError;
use henon_core::family::{param_scan, Family};
use henon_core::green::{render_green, Box4, GreenValue};
use henon_core::grid::{Grid, SlicePlane, Window};
use henon_core::henon::HenonType;
use henon_core::nevanlinna::{rigidity_experiment, Saddle};
use henon_core::periodic::{fixed_points_exact, periodic_points, StabilityKind};
use num_complex::Complex64;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

/// Failures split by exit code: configuration problems exit 1, numerical
/// precondition failures exit 2.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numeric(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Numeric(m) => m,
        }
    }
}

/// Classify a core error: validation of caller-supplied values is a config
/// problem; everything the computation itself discovers is numerical.
fn lift(op: &str, e: CoreError) -> CliError {
    let msg = format!("operation `{op}`: {e}");
    match e {
        CoreError::EigenFailure(_)
        | CoreError::CurveThroughIMinus
        | CoreError::NoBoundedSeed
        | CoreError::NoEscapingSeed
        | CoreError::IncompleteSearch { .. }
        | CoreError::NotASaddle(..)
        | CoreError::BadEigenvector(_)
        | CoreError::ManifoldResidual { .. }
        | CoreError::NotInKPlus { .. }
        | CoreError::NonPositiveCharacteristic(..)
        | CoreError::NoBoundedSamples(_) => CliError::Numeric(msg),
        _ => CliError::Config(msg),
    }
}

pub const COMMANDS: &[&str] = &[
    "render-julia",
    "render-green",
    "slice",
    "equidist",
    "periodic",
    "nevanlinna",
    "param-scan",
    "selftest",
];

pub fn run(command: &str, cfg: &RunConfig) -> Result<(), CliError> {
    match command {
        "render-julia" => render_julia(cfg),
        "render-green" => render_green_cmd(cfg),
        "slice" => slice_cmd(cfg),
        "equidist" => equidist_cmd(cfg),
        "periodic" => periodic_cmd(cfg),
        "nevanlinna" => nevanlinna_cmd(cfg),
        "param-scan" => param_scan_cmd(cfg),
        "selftest" => selftest(cfg),
        _ => Err(CliError::Config(format!(
            "unknown command `{command}`; available: {}",
            COMMANDS.join(", ")
        ))),
    }
}

fn build_map(cfg: &RunConfig) -> Result<HenonType, CliError> {
    if cfg.map_file.is_empty() {
        HenonType::quadratic(cfg.c1, cfg.a).map_err(|e| lift("map construction", e))
    } else {
        let body = fs::read_to_string(&cfg.map_file).map_err(|e| {
            CliError::Config(format!(
                "config key `map_file`: cannot read `{}`: {e}",
                cfg.map_file
            ))
        })?;
        HenonType::parse(&body).map_err(|e| {
            CliError::Config(format!("config key `map_file` (`{}`): {e}", cfg.map_file))
        })
    }
}

fn window(cfg: &RunConfig) -> Result<Window, CliError> {
    Window::new(cfg.x_min, cfg.x_max, cfg.y_min, cfg.y_max).map_err(|e| {
        CliError::Config(format!("config keys `x_min`/`x_max`/`y_min`/`y_max`: {e}"))
    })
}

/// Seed box for 4-dimensional searches: the window bounds in both complex
/// coordinates.
fn seed_box(cfg: &RunConfig) -> Result<Box4, CliError> {
    Box4::new(
        (cfg.x_min, cfg.x_max),
        (cfg.y_min, cfg.y_max),
        (cfg.x_min, cfg.x_max),
        (cfg.y_min, cfg.y_max),
    )
    .map_err(|e| CliError::Config(format!("config keys `x_min`/`x_max`/`y_min`/`y_max`: {e}")))
}

fn out_dir(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    fs::create_dir_all(&cfg.out_dir).map_err(|e| {
        CliError::Config(format!(
            "config key `out_dir`: cannot create `{}`: {e}",
            cfg.out_dir.display()
        ))
    })?;
    Ok(cfg.out_dir.clone())
}

fn write_pgm(path: &Path, w: usize, h: usize, payload: &[u8]) -> Result<(), CliError> {
    output::write_pgm(path, w, h, payload)
        .map_err(|e| CliError::Config(format!("cannot write `{}`: {e}", path.display())))
}

fn write_text(path: &Path, body: &str) -> Result<(), CliError> {
    output::write_text(path, body)
        .map_err(|e| CliError::Config(format!("cannot write `{}`: {e}", path.display())))
}

fn resolution_or(cfg: &RunConfig, default: usize) -> usize {
    if cfg.resolution == 0 {
        default
    } else {
        cfg.resolution
    }
}

fn render_grid(cfg: &RunConfig, op: &str) -> Result<(Grid<GreenValue>, Window), CliError> {
    let f = build_map(cfg)?;
    let w = window(cfg)?;
    let plane = SlicePlane::z1_plane(cfg.plane_z2);
    let grid = render_green(&f, &plane, &w, cfg.width, cfg.height, cfg.tol, cfg.budget)
        .map_err(|e| lift(op, e))?;
    Ok((grid, w))
}

/// Green grid as a log-scaled picture: `julia.pgm` plus the same bytes as
/// a `col,row,x,y,byte` table.
fn render_julia(cfg: &RunConfig) -> Result<(), CliError> {
    let (grid, w) = render_grid(cfg, "render-julia")?;
    let dir = out_dir(cfg)?;
    let payload = output::green_bytes(&grid);
    write_pgm(&dir.join("julia.pgm"), grid.width(), grid.height(), &payload)?;

    let g_max = grid.data().iter().map(|g| g.value).fold(0.0f64, f64::max);
    let mut csv = String::from("col,row,x,y,byte\n");
    for row in 0..grid.height() {
        for col in 0..grid.width() {
            let _ = writeln!(
                csv,
                "{col},{row},{},{},{}",
                fmt(w.x_coord(col, grid.width())),
                fmt(w.y_coord(row, grid.height())),
                output::green_byte(grid.get(col, row).value, g_max)
            );
        }
    }
    write_text(&dir.join("julia.csv"), &csv)
}

/// Same picture, but the table carries the raw escape-rate data.
fn render_green_cmd(cfg: &RunConfig) -> Result<(), CliError> {
    let (grid, w) = render_grid(cfg, "render-green")?;
    let dir = out_dir(cfg)?;
    let payload = output::green_bytes(&grid);
    write_pgm(&dir.join("green.pgm"), grid.width(), grid.height(), &payload)?;

    let mut csv = String::from("col,row,x,y,green,error_bound,iterations,escaped_at\n");
    for row in 0..grid.height() {
        for col in 0..grid.width() {
            let g = grid.get(col, row);
            let escaped = g.escaped_at.map(|n| n.to_string()).unwrap_or_default();
            let _ = writeln!(
                csv,
                "{col},{row},{},{},{},{},{},{escaped}",
                fmt(w.x_coord(col, grid.width())),
                fmt(w.y_coord(row, grid.height())),
                fmt(g.value),
                fmt(g.error_bound),
                g.iterations
            );
        }
    }
    write_text(&dir.join("green.csv"), &csv)
}

fn slice_cmd(cfg: &RunConfig) -> Result<(), CliError> {
    let f = build_map(cfg)?;
    let w = window(cfg)?;
    let res = resolution_or(cfg, 2048);
    let s = PotentialField::green_plus(&f, cfg.tol, cfg.budget);
    let line = ComplexLine::z2_const(cfg.plane_z2);
    let m = slice(&s, &line, &w, res).map_err(|e| lift("slice", e))?;

    let dir = out_dir(cfg)?;
    let mut csv = String::from("col,row,t_re,t_im,mass\n");
    for row in 0..res {
        for col in 0..res {
            let t = m.cell_center(col, row);
            let _ = writeln!(
                csv,
                "{col},{row},{},{},{}",
                fmt(t.re),
                fmt(t.im),
                fmt(*m.cell_mass.get(col, row))
            );
        }
    }
    let _ = writeln!(csv, "flagged_cells,{}", m.flagged.len());
    let _ = writeln!(csv, "mass_error_estimate,{}", fmt(m.mass_error_estimate));
    let _ = writeln!(csv, "total_mass,{}", fmt(m.total_mass));
    write_text(&dir.join("slice.csv"), &csv)
}

fn equidist_cmd(cfg: &RunConfig) -> Result<(), CliError> {
    let f = build_map(cfg)?;
    let res = resolution_or(cfg, 32);
    if cfg.n_min > cfg.n_max {
        return Err(CliError::Config(format!(
            "config keys `n_min`/`n_max`: empty range {}..={}",
            cfg.n_min, cfg.n_max
        )));
    }
    let v = Curve::vertical_line(cfg.curve_c);
    let psi = default_test_forms(&f).map_err(|e| lift("equidist", e))?;
    let report = equidist_experiment(&f, &v, &psi, cfg.n_min..=cfg.n_max, res)
        .map_err(|e| lift("equidist", e))?;
    let dir = out_dir(cfg)?;
    write_text(&dir.join("equidist.csv"), &report.to_csv())
}

fn periodic_cmd(cfg: &RunConfig) -> Result<(), CliError> {
    let f = build_map(cfg)?;
    let fourbox = seed_box(cfg)?;
    if cfg.period == 0 {
        return Err(CliError::Config(
            "config key `period`: must be at least 1".into(),
        ));
    }
    let mut csv = String::from(
        "period,index,z1_re,z1_im,z2_re,z2_im,residual,mult1_re,mult1_im,mult2_re,mult2_im,kind\n",
    );
    let mut footer = String::new();
    for n in 1..=cfg.period {
        let search = periodic_points(&f, n, &fourbox, cfg.seeds_per_axis)
            .map_err(|e| lift("periodic", e))?;
        for (idx, p) in search.points.iter().enumerate() {
            let _ = writeln!(
                csv,
                "{n},{idx},{},{},{},{},{},{},{},{},{},{}",
                fmt(p.point[0].re),
                fmt(p.point[0].im),
                fmt(p.point[1].re),
                fmt(p.point[1].im),
                fmt(p.residual),
                fmt(p.multipliers[0].re),
                fmt(p.multipliers[0].im),
                fmt(p.multipliers[1].re),
                fmt(p.multipliers[1].im),
                p.kind.label()
            );
        }
        let _ = writeln!(
            footer,
            "# period,{n},expected,{},found,{},complete,{}",
            search.expected,
            search.points.len(),
            search.complete
        );
    }
    csv.push_str(&footer);
    let dir = out_dir(cfg)?;
    write_text(&dir.join("periodic.csv"), &csv)
}

fn nevanlinna_cmd(cfg: &RunConfig) -> Result<(), CliError> {
    let f = build_map(cfg)?;
    let fourbox = seed_box(cfg)?;
    let res = resolution_or(cfg, 24);
    let search =
        periodic_points(&f, 1, &fourbox, cfg.seeds_per_axis).map_err(|e| lift("nevanlinna", e))?;
    let saddle_pt = search
        .points
        .iter()
        .find(|p| p.kind == StabilityKind::Saddle)
        .ok_or_else(|| {
            CliError::Numeric(
                "operation `nevanlinna`: no saddle fixed point inside the seed window".into(),
            )
        })?;
    let s = Saddle::from_periodic(&f, saddle_pt).map_err(|e| lift("nevanlinna", e))?;
    let forms: Vec<TestForm> = cfg
        .bump_rho
        .iter()
        .map(|&rho| {
            TestForm::new([s.point[0], s.point[1]], rho)
                .map_err(|e| CliError::Config(format!("config key `bump_rho`: {e}")))
        })
        .collect::<Result<_, _>>()?;
    let table = rigidity_experiment(&f, &s, &cfg.radii, &forms, res).map_err(|e| match e {
        CoreError::BadRadiusList => CliError::Config(format!("config key `radii`: {e}")),
        other => lift("nevanlinna", other),
    })?;
    let dir = out_dir(cfg)?;
    write_text(&dir.join("rigidity.csv"), &table.to_csv())
}

fn param_scan_cmd(cfg: &RunConfig) -> Result<(), CliError> {
    let fam = Family::quadratic_default();
    let w = window(cfg)?;
    let scan = param_scan(
        &fam,
        [cfg.seed_z1, cfg.seed_z2],
        &w,
        cfg.a,
        cfg.width,
        cfg.height,
        cfg.tol,
        cfg.budget,
    )
    .map_err(|e| lift("param-scan", e))?;

    let dir = out_dir(cfg)?;
    let payload = output::green_bytes(&scan.green);
    write_pgm(&dir.join("scan.pgm"), cfg.width, cfg.height, &payload)?;

    let mut csv = String::from("col,row,c1_re,c1_im,green,escaping\n");
    for row in 0..cfg.height {
        for col in 0..cfg.width {
            let _ = writeln!(
                csv,
                "{col},{row},{},{},{},{}",
                fmt(w.x_coord(col, cfg.width)),
                fmt(w.y_coord(row, cfg.height)),
                fmt(scan.green.get(col, row).value),
                u8::from(scan.forward.get(col, row).is_escaping())
            );
        }
    }
    write_text(&dir.join("scan.csv"), &csv)
}

/// Deterministic desk-scale verification battery. Every check uses fixed
/// parameters (only `out_dir` and `threads` are read from the config), so
/// two runs produce byte-identical output trees. Failures exit with the
/// numerical status after writing the summary.
fn selftest(cfg: &RunConfig) -> Result<(), CliError> {
    let dir = out_dir(cfg)?;
    let mut checks: Vec<(&'static str, String, bool)> = Vec::new();
    let c = Complex64::new;
    let f = HenonType::quadratic(c(-1.1, 0.0), c(0.4, 0.0)).map_err(|e| lift("selftest", e))?;

    // map text round trip: composite degree and Jacobian come out right
    let text = "factor a=0.5,0 p=-1,0,0,0,1,0\nfactor a=0,-0.25 p=0.1,0,0,0,0,0,1,0\n";
    let parsed = HenonType::parse(text).map_err(|e| lift("selftest", e))?;
    let det_err = (parsed.jacobian_det() - c(0.0, -0.125)).norm();
    checks.push((
        "map_roundtrip",
        format!("{}", parsed.degree()),
        parsed.degree() == 6 && det_err < 1e-15,
    ));

    // functional equation on a fixed low-discrepancy point set
    let alpha = [
        0.754_877_666_246_692_7,
        0.569_840_290_998_053_2,
        0.366_025_403_784_438_6,
        0.218_033_988_749_894_85,
    ];
    let mut max_defect: f64 = 0.0;
    for k in 1..=160u32 {
        let u = |i: usize| -3.0 + 6.0 * (k as f64 * alpha[i]).fract();
        let z = [c(u(0), u(1)), c(u(2), u(3))];
        let g = henon_core::green::green_plus(&f, z, 1e-8).map_err(|e| lift("selftest", e))?;
        let gf = henon_core::green::green_plus(&f, f.apply_c(z), 1e-8)
            .map_err(|e| lift("selftest", e))?;
        max_defect = max_defect.max((gf.value - 2.0 * g.value).abs());
    }
    checks.push((
        "green_invariance",
        fmt(max_defect),
        max_defect <= 5e-8,
    ));

    // exact fixed points against the constant Jacobian
    let fixed = fixed_points_exact(&f).map_err(|e| lift("selftest", e))?;
    let worst_res = fixed.iter().map(|p| p.residual).fold(0.0f64, f64::max);
    let worst_det = fixed
        .iter()
        .map(|p| (p.multipliers[0] * p.multipliers[1] - f.jacobian_det()).norm())
        .fold(0.0f64, f64::max);
    checks.push((
        "fixed_points",
        fmt(worst_res.max(worst_det)),
        fixed.len() == 2 && worst_res <= 1e-10 && worst_det <= 1e-8,
    ));

    // small render: header/payload shape plus a non-trivial byte range
    let w2 = Window::square(2.0).map_err(|e| lift("selftest", e))?;
    let grid = render_green(&f, &SlicePlane::z1_plane(c(0.0, 0.0)), &w2, 64, 64, 1e-8, 512)
        .map_err(|e| lift("selftest", e))?;
    let payload = output::green_bytes(&grid);
    write_pgm(&dir.join("julia.pgm"), 64, 64, &payload)?;
    let distinct = {
        let mut seen = [false; 256];
        payload.iter().for_each(|&b| seen[b as usize] = true);
        seen.iter().filter(|&&s| s).count()
    };
    checks.push((
        "render_julia_64",
        format!("{distinct}"),
        payload.len() == 4096 && distinct >= 2,
    ));

    // slice mass of the forward Green current across the default window
    let s = PotentialField::green_plus(&f, 1e-8, 2048);
    let line = ComplexLine::z2_const(c(0.0, 0.0));
    let w3 = Window::square(3.0).map_err(|e| lift("selftest", e))?;
    let m = slice(&s, &line, &w3, 256).map_err(|e| lift("selftest", e))?;
    let mut slice_csv = String::from("col,row,t_re,t_im,mass\n");
    for row in 0..256 {
        for col in 0..256 {
            let t = m.cell_center(col, row);
            let _ = writeln!(
                slice_csv,
                "{col},{row},{},{},{}",
                fmt(t.re),
                fmt(t.im),
                fmt(*m.cell_mass.get(col, row))
            );
        }
    }
    let _ = writeln!(slice_csv, "total_mass,{}", fmt(m.total_mass));
    write_text(&dir.join("slice.csv"), &slice_csv)?;
    checks.push((
        "slice_mass_256",
        fmt(m.total_mass),
        (m.total_mass - 1.0).abs() <= 0.03,
    ));

    // periodic census at periods 1 and 2
    let fourbox = Box4::symmetric(3.0).map_err(|e| lift("selftest", e))?;
    let mut census_ok = true;
    let mut census = String::new();
    for n in 1..=2u32 {
        let search = periodic_points(&f, n, &fourbox, 6).map_err(|e| lift("selftest", e))?;
        census_ok &= search.complete && search.points.len() as u64 == search.expected;
        census_ok &= search.points.iter().all(|p| p.residual <= 1e-10);
        let _ = write!(census, "{}:{} ", n, search.points.len());
    }
    checks.push(("periodic_census", census.trim().to_string(), census_ok));

    // pairing quadrature against the closed-form line-current value; 64
    // midpoints per axis keep the tensor-product grid desk-sized
    let psi = TestForm::new([c(0.3, 0.1), c(-0.2, 0.4)], 1.3).map_err(|e| lift("selftest", e))?;
    let pair = pair_form(&PotentialField::log_abs_z1(), &psi, 64)
        .map_err(|e| lift("selftest", e))?;
    let s1 = (psi.center[0].norm_sqr()) / (psi.rho * psi.rho);
    let oracle = 0.5 * std::f64::consts::PI * psi.rho * psi.rho * (1.0 - s1).powi(3);
    let rel = (pair - oracle).abs() / oracle;
    checks.push(("pair_calibration", fmt(rel), rel <= 0.01));

    // parameter scan plumbing on a small grid around the default map
    let fam = Family::quadratic_default();
    let wc = Window::new(-1.35, -0.85, -0.25, 0.25).map_err(|e| lift("selftest", e))?;
    let scan = param_scan(&fam, [c(0.0, 0.0), c(0.0, 0.0)], &wc, c(0.4, 0.0), 17, 13, 1e-6, 256)
        .map_err(|e| lift("selftest", e))?;
    write_pgm(&dir.join("scan.pgm"), 17, 13, &output::green_bytes(&scan.green))?;
    let bounded = scan.forward.data().iter().filter(|t| !t.is_escaping()).count();
    checks.push((
        "param_scan_17x13",
        format!("{bounded}"),
        scan.green.data().len() == 17 * 13,
    ));

    let mut csv = String::from("check,value,status\n");
    for (name, value, ok) in &checks {
        let _ = writeln!(csv, "{name},{value},{}", if *ok { "pass" } else { "fail" });
    }
    let failed: Vec<&str> = checks
        .iter()
        .filter(|(_, _, ok)| !ok)
        .map(|(name, _, _)| *name)
        .collect();
    let _ = writeln!(csv, "all,{}/{},{}", checks.len() - failed.len(), checks.len(),
        if failed.is_empty() { "pass" } else { "fail" });
    write_text(&dir.join("selftest.csv"), &csv)?;

    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numeric(format!(
            "operation `selftest`: failing checks: {}",
            failed.join(", ")
        )))
    }
}
