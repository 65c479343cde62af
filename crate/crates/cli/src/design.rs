//! `design`: one run, four artifact files.

use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use sidelobe::io::{write_sequence_json, write_trace_csv, write_two_column_csv};
use sidelobe::{correlation_level, forward_grid, run_design, DesignOutcome, DesignRun, Mode};

use crate::{default_mode, effective_seed, initial_sequence, load_mask_for, DesignArgs};

pub const SEQUENCE_FILE: &str = "sequence.json";
pub const TRACE_FILE: &str = "trace.csv";
pub const CORRELATION_FILE: &str = "correlation.csv";
pub const SPECTRUM_FILE: &str = "spectrum.csv";

#[derive(Debug, Clone)]
pub struct DesignSummary {
    pub run: DesignRun,
    pub iterations: usize,
    pub converged: bool,
    pub isl: f64,
    pub merit_factor: f64,
    pub files: Vec<PathBuf>,
}

impl fmt::Display for DesignSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "variant={} mode={} N={} seed={} iterations={} converged={}",
            self.run.variant, self.run.mode, self.run.n, self.run.seed, self.iterations, self.converged
        )?;
        write!(f, "ISL={:.6e} MF={:.6}", self.isl, self.merit_factor)
    }
}

/// Builds the run configuration and initial point without touching the filesystem
/// beyond reading inputs.
pub fn prepare(args: &DesignArgs, seed_env: Option<&str>) -> anyhow::Result<(DesignRun, sidelobe::UnimodularSequence)> {
    let seed = effective_seed(args.solver.seed, seed_env)?;
    let x0 = initial_sequence(&args.init, args.n, seed)?;
    let n = x0.len();
    let mut run = DesignRun::new(args.variant, default_mode(args.variant, args.solver.mode), n)
        .with_seed(seed)
        .with_tolerance(args.solver.tol)
        .with_max_iters(args.solver.max_iters)
        .accelerated(args.solver.accelerate);
    if let Some(path) = &args.solver.mask {
        run = run.with_mask(load_mask_for(path, n)?);
    }
    run.validate()?;
    Ok((run, x0))
}

pub fn execute(args: &DesignArgs, seed_env: Option<&str>) -> anyhow::Result<DesignSummary> {
    let (run, x0) = prepare(args, seed_env)?;
    let outcome = run_design(&run, &x0)?;
    let files = write_artifacts(&args.solver.out_dir, &run, &outcome)?;
    Ok(DesignSummary {
        iterations: outcome.iterations(),
        converged: outcome.converged,
        isl: outcome.final_isl(),
        merit_factor: outcome.merit_factor(),
        run,
        files,
    })
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating '{}'", path.display()))?,
    ))
}

/// Writes `sequence.json`, `trace.csv`, `correlation.csv` and, for aperiodic runs,
/// `spectrum.csv` (power `|a_p^H x|^2` on the 2N grid).
pub fn write_artifacts(dir: &Path, run: &DesignRun, outcome: &DesignOutcome) -> anyhow::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("creating '{}'", dir.display()))?;
    let x = &outcome.sequence;
    let mut files = Vec::new();

    let path = dir.join(SEQUENCE_FILE);
    write_sequence_json(&path, x)?;
    files.push(path);

    let path = dir.join(TRACE_FILE);
    let mut w = create(&path)?;
    write_trace_csv(&mut w, &outcome.trace)?;
    w.flush()?;
    files.push(path);

    let path = dir.join(CORRELATION_FILE);
    let mut w = create(&path)?;
    write_two_column_csv(&mut w, ("lag", "level_db"), &correlation_level(x, run.mode))?;
    w.flush()?;
    files.push(path);

    if run.mode == Mode::Aperiodic {
        let path = dir.join(SPECTRUM_FILE);
        let mut w = create(&path)?;
        let power = forward_grid(x, Mode::Aperiodic).power();
        let g = power.len() as f64;
        writeln!(w, "bin,omega,power")?;
        for (k, p) in power.iter().enumerate() {
            writeln!(w, "{k},{:?},{p:?}", 2.0 * std::f64::consts::PI * k as f64 / g)?;
        }
        w.flush()?;
        files.push(path);
    }
    Ok(files)
}
