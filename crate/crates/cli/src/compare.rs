//! `compare`: paired trials over variants and lengths on a bounded worker pool.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context};
use rayon::prelude::*;
use sidelobe::io::MaskFile;
use sidelobe::{random_unimodular, run_design, DesignOutcome, DesignRun, Mode, UnimodularSequence, Variant};

use crate::report::{aggregate, CrossInitTrace, ExperimentReport, TrialRecord};
use crate::{effective_seed, load_mask, CompareArgs};

pub const REPORT_FILE: &str = "report.json";
pub const RECORDS_FILE: &str = "records.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const CROSS_INIT_FILE: &str = "cross_init.csv";

/// Everything needed to run the trials, resolved and validated up front.
#[derive(Debug, Clone)]
pub struct Plan {
    pub variants: Vec<Variant>,
    pub lengths: Vec<usize>,
    pub trials: usize,
    pub mode: Mode,
    pub base_seed: u64,
    pub tolerance: f64,
    pub max_iters: usize,
    pub accelerate: bool,
    pub mask: Option<MaskFile>,
    pub jobs: usize,
    pub cross_init: bool,
}

impl Plan {
    pub fn from_args(args: &CompareArgs, seed_env: Option<&str>) -> anyhow::Result<Self> {
        if args.trials == 0 {
            bail!("--trials must be at least 1");
        }
        if args.cross_init && args.variants.len() != 2 {
            bail!("--cross-init needs exactly two variants, got {}", args.variants.len());
        }
        let jobs = match args.jobs {
            Some(0) => bail!("--jobs must be at least 1"),
            Some(j) => j,
            None => std::thread::available_parallelism().map_or(1, |j| j.get()),
        };
        let mode = args.solver.mode.unwrap_or(if args.variants.contains(&Variant::Pecan) {
            Mode::Periodic
        } else {
            Mode::Aperiodic
        });
        let plan = Plan {
            variants: args.variants.clone(),
            lengths: args.lengths.clone(),
            trials: args.trials,
            mode,
            base_seed: effective_seed(args.solver.seed, seed_env)?,
            tolerance: args.solver.tol,
            max_iters: args.solver.max_iters,
            accelerate: args.solver.accelerate,
            mask: args.solver.mask.as_deref().map(load_mask).transpose()?,
            jobs,
            cross_init: args.cross_init,
        };
        for &n in &plan.lengths {
            for &v in &plan.variants {
                plan.design_run(v, n)?;
            }
        }
        Ok(plan)
    }

    /// Paired seed for trial `t`.
    pub fn seed(&self, trial: usize) -> u64 {
        self.base_seed.wrapping_add(trial as u64)
    }

    pub fn design_run(&self, variant: Variant, n: usize) -> anyhow::Result<DesignRun> {
        let mut run = DesignRun::new(variant, self.mode, n)
            .with_tolerance(self.tolerance)
            .with_max_iters(self.max_iters)
            .accelerated(self.accelerate && variant == Variant::SpectralMisl);
        if variant == Variant::SpectralMisl {
            let mask = self.mask.clone().context("spectral-misl needs --mask")?;
            run = run.with_mask(mask.into_mask(n)?);
        }
        run.validate().with_context(|| format!("{variant} at N = {n}"))?;
        Ok(run)
    }
}

fn timed(run: &DesignRun, x0: &UnimodularSequence) -> anyhow::Result<(DesignOutcome, f64)> {
    let start = Instant::now();
    let out = run_design(run, x0)?;
    Ok((out, start.elapsed().as_secs_f64()))
}

fn isl_trace(out: &DesignOutcome) -> Vec<f64> {
    out.trace.iter().map(|t| t.isl).collect()
}

/// Runs every (N, trial, variant) combination; all variants of a trial share one start.
pub fn run_plan(plan: &Plan) -> anyhow::Result<ExperimentReport> {
    let mut cells = Vec::new();
    for &n in &plan.lengths {
        for trial in 0..plan.trials {
            for &variant in &plan.variants {
                cells.push((n, trial, variant));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(plan.jobs).build()?;
    let records = pool.install(|| {
        cells
            .par_iter()
            .map(|&(n, trial, variant)| {
                let seed = plan.seed(trial);
                let run = plan.design_run(variant, n)?.with_seed(seed);
                let (out, secs) = timed(&run, &random_unimodular(n, seed)?)?;
                Ok(TrialRecord {
                    variant,
                    mode: plan.mode,
                    n,
                    trial,
                    seed,
                    final_isl: out.final_isl(),
                    merit_factor: out.merit_factor(),
                    iterations: out.iterations(),
                    converged: out.converged,
                    wall_time_s: secs,
                })
            })
            .collect::<anyhow::Result<Vec<_>>>()
    })?;

    let cross_init = if plan.cross_init {
        let pairs: Vec<(usize, usize)> = plan
            .lengths
            .iter()
            .flat_map(|&n| (0..plan.trials).map(move |t| (n, t)))
            .collect();
        let nested = pool.install(|| {
            pairs
                .par_iter()
                .map(|&(n, trial)| cross_init_pair(plan, n, trial))
                .collect::<anyhow::Result<Vec<_>>>()
        })?;
        nested.into_iter().flatten().collect()
    } else {
        Vec::new()
    };

    Ok(ExperimentReport {
        mode: plan.mode,
        base_seed: plan.base_seed,
        tolerance: plan.tolerance,
        max_iters: plan.max_iters,
        aggregates: aggregate(&records),
        records,
        cross_init,
    })
}

/// A to convergence then B from its output, and B then A.
fn cross_init_pair(plan: &Plan, n: usize, trial: usize) -> anyhow::Result<Vec<CrossInitTrace>> {
    let seed = plan.seed(trial);
    let x0 = random_unimodular(n, seed)?;
    let (a, b) = (plan.variants[0], plan.variants[1]);
    let mut out = Vec::with_capacity(2);
    for (first, second) in [(a, b), (b, a)] {
        let head = run_design(&plan.design_run(first, n)?.with_seed(seed), &x0)?;
        let tail = run_design(&plan.design_run(second, n)?.with_seed(seed), &head.sequence)?;
        out.push(CrossInitTrace {
            n,
            trial,
            first,
            second,
            first_isl: isl_trace(&head),
            second_isl: isl_trace(&tail),
        });
    }
    Ok(out)
}

pub fn write_report(dir: &Path, report: &ExperimentReport) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating '{}'", dir.display()))?;
    fs::write(dir.join(REPORT_FILE), report.to_json() + "\n")?;
    let csv = |name: &str, write: &dyn Fn(&mut BufWriter<File>) -> std::io::Result<()>| -> anyhow::Result<()> {
        let path = dir.join(name);
        let mut w = BufWriter::new(File::create(&path).with_context(|| format!("creating '{}'", path.display()))?);
        write(&mut w)?;
        w.flush()?;
        Ok(())
    };
    csv(RECORDS_FILE, &|w| report.write_records_csv(w))?;
    csv(SUMMARY_FILE, &|w| report.write_summary_csv(w))?;
    if !report.cross_init.is_empty() {
        csv(CROSS_INIT_FILE, &|w| report.write_cross_init_csv(w))?;
    }
    Ok(())
}

pub fn execute(args: &CompareArgs, seed_env: Option<&str>) -> anyhow::Result<ExperimentReport> {
    let plan = Plan::from_args(args, seed_env)?;
    let report = run_plan(&plan)?;
    write_report(&args.solver.out_dir, &report)?;
    Ok(report)
}
