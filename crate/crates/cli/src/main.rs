//! `henon-lab <command> [--config <file>] [--<key> <value>]...`
//!
//! Flags mirror config keys and win over file values. Exit codes: 0 success,
//! 1 configuration error, 2 numerical-precondition failure.

mod commands;
mod config;
mod output;

use commands::{CliError, COMMANDS};
use config::RunConfig;
use std::process::ExitCode;

fn usage() -> String {
    let d = RunConfig::default();
    format!(
        "usage: henon-lab <command> [--config <file>] [--<key> <value>]...\n\
         \n\
         commands: {}\n\
         \n\
         config keys (flat `key = value` file syntax, `#` comments; flags\n\
         use the same names and override the file):\n\
         \x20 map_file        path to a map description; empty builds z^2+c1, a  [{}]\n\
         \x20 c1              quadratic parameter, complex re,im  [{},{}]\n\
         \x20 a               Hénon coefficient / scanned family's fixed parameter  [{},{}]\n\
         \x20 out_dir         output directory  [{}]\n\
         \x20 width height    grid columns and rows  [{} {}]\n\
         \x20 x_min x_max y_min y_max   window bounds  [{} {} {} {}]\n\
         \x20 tol             Green tolerance  [{:e}]\n\
         \x20 budget          orbit iteration budget  [{}]\n\
         \x20 threads         worker threads, 0 = all cores  [{}]\n\
         \x20 resolution      cells per axis, 0 = per-command default  [{}]\n\
         \x20 plane_z2        fixed z2 of the render/slice plane  [{},{}]\n\
         \x20 curve_c         equidist target line z1 = curve_c  [{},{}]\n\
         \x20 n_min n_max     equidist pullback depth range  [{} {}]\n\
         \x20 period          highest period solved by `periodic`  [{}]\n\
         \x20 seeds_per_axis  Newton seed grid per axis  [{}]\n\
         \x20 radii           nevanlinna radius ladder  [0.4,1.0,2.2]\n\
         \x20 bump_rho        nevanlinna bump radii at the saddle  [0.6,0.9,1.2]\n\
         \x20 seed_z1 seed_z2 param-scan phase seed  [0,0 0,0]\n",
        COMMANDS.join(", "),
        if d.map_file.is_empty() { "empty" } else { &d.map_file },
        d.c1.re, d.c1.im,
        d.a.re, d.a.im,
        d.out_dir.display(),
        d.width, d.height,
        d.x_min, d.x_max, d.y_min, d.y_max,
        d.tol,
        d.budget,
        d.threads,
        d.resolution,
        d.plane_z2.re, d.plane_z2.im,
        d.curve_c.re, d.curve_c.im,
        d.n_min, d.n_max,
        d.period,
        d.seeds_per_axis,
    )
}

fn parse_args(args: &[String]) -> Result<(String, RunConfig), String> {
    let Some(command) = args.first() else {
        return Err(format!("missing command\n\n{}", usage()));
    };
    let mut cfg = RunConfig::default();
    // first pass: config files load in order, before any direct flag
    let mut flags: Vec<(String, String)> = Vec::new();
    let mut it = args[1..].iter();
    while let Some(tok) = it.next() {
        let Some(key) = tok.strip_prefix("--") else {
            return Err(format!("expected a `--key value` flag, got `{tok}`"));
        };
        let Some(value) = it.next() else {
            return Err(format!("flag `--{key}` is missing its value"));
        };
        if key == "config" {
            let body = std::fs::read_to_string(value)
                .map_err(|e| format!("cannot read config file `{value}`: {e}"))?;
            cfg.apply_file(&body)?;
        } else {
            flags.push((key.to_string(), value.clone()));
        }
    }
    for (key, value) in &flags {
        cfg.set(key, value)?;
    }
    Ok((command.clone(), cfg))
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--help" || a == "-h") || args.first().map(String::as_str) == Some("help") {
        print!("{}", usage());
        return ExitCode::SUCCESS;
    }
    let (command, cfg) = match parse_args(&args) {
        Ok(parsed) => parsed,
        Err(msg) => {
            eprintln!("{msg}");
            return ExitCode::from(1);
        }
    };

    let outcome = if cfg.threads > 0 {
        let pool = match rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
        {
            Ok(pool) => pool,
            Err(e) => {
                eprintln!("config key `threads`: cannot build a {}-thread pool: {e}", cfg.threads);
                return ExitCode::from(1);
            }
        };
        pool.install(|| commands::run(&command, &cfg))
    } else {
        commands::run(&command, &cfg)
    };

    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ (CliError::Config(_) | CliError::Numeric(_))) => {
            eprintln!("{}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
