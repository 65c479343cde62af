//! Comparison reports: per-trial records, per-(variant, N) aggregates, CSV/JSON output.

use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};
use sidelobe::{Mode, Variant};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub variant: Variant,
    pub mode: Mode,
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub final_isl: f64,
    /// `N^2 / (2 ISL)`; null in JSON when ISL is zero.
    pub merit_factor: f64,
    pub iterations: usize,
    pub converged: bool,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub variant: Variant,
    pub n: usize,
    pub trials: usize,
    pub mean_mf: f64,
    pub median_mf: f64,
    pub mean_iterations: f64,
    pub mean_time_s: f64,
    pub median_time_s: f64,
}

/// ISL trace of a run started from another variant's output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossInitTrace {
    pub n: usize,
    pub trial: usize,
    /// Variant that produced the starting point.
    pub first: Variant,
    /// Variant run from that point.
    pub second: Variant,
    pub first_isl: Vec<f64>,
    pub second_isl: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub mode: Mode,
    pub base_seed: u64,
    pub tolerance: f64,
    pub max_iters: usize,
    pub records: Vec<TrialRecord>,
    pub aggregates: Vec<Aggregate>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cross_init: Vec<CrossInitTrace>,
}

/// Mean after sorting, so the result does not depend on trial completion order.
fn sorted_mean(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v.iter().sum::<f64>() / v.len() as f64
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// One aggregate per (variant, N) present in `records`, ordered by N then variant order of
/// first appearance.
pub fn aggregate(records: &[TrialRecord]) -> Vec<Aggregate> {
    let mut keys: Vec<(usize, Variant)> = Vec::new();
    for r in records {
        if !keys.contains(&(r.n, r.variant)) {
            keys.push((r.n, r.variant));
        }
    }
    keys.sort_by_key(|k| k.0);
    keys.into_iter()
        .map(|(n, variant)| {
            let group: Vec<&TrialRecord> =
                records.iter().filter(|r| r.n == n && r.variant == variant).collect();
            let pick = |f: fn(&TrialRecord) -> f64| group.iter().map(|r| f(r)).collect::<Vec<_>>();
            Aggregate {
                variant,
                n,
                trials: group.len(),
                mean_mf: sorted_mean(pick(|r| r.merit_factor)),
                median_mf: median(pick(|r| r.merit_factor)),
                mean_iterations: sorted_mean(pick(|r| r.iterations as f64)),
                mean_time_s: sorted_mean(pick(|r| r.wall_time_s)),
                median_time_s: median(pick(|r| r.wall_time_s)),
            }
        })
        .collect()
}

impl ExperimentReport {
    /// Largest `|MF * 2 * ISL - N^2| / N^2` over records with finite MF.
    pub fn merit_identity_error(&self) -> f64 {
        self.records
            .iter()
            .filter(|r| r.merit_factor.is_finite())
            .map(|r| {
                let n2 = (r.n * r.n) as f64;
                (r.merit_factor * 2.0 * r.final_isl - n2).abs() / n2
            })
            .fold(0.0, f64::max)
    }

    pub fn aggregate_for(&self, variant: Variant, n: usize) -> Option<&Aggregate> {
        self.aggregates.iter().find(|a| a.variant == variant && a.n == n)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn write_records_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "variant,mode,n,trial,seed,final_isl,merit_factor,iterations,converged,wall_time_s")?;
        for r in &self.records {
            writeln!(
                w,
                "{},{},{},{},{},{:?},{:?},{},{},{:?}",
                r.variant, r.mode, r.n, r.trial, r.seed, r.final_isl, r.merit_factor, r.iterations,
                r.converged, r.wall_time_s
            )?;
        }
        Ok(())
    }

    /// MF and runtime against N, one row per (variant, N).
    pub fn write_summary_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "variant,n,trials,mean_mf,median_mf,mean_iterations,mean_time_s,median_time_s")?;
        for a in &self.aggregates {
            writeln!(
                w,
                "{},{},{},{:?},{:?},{:?},{:?},{:?}",
                a.variant, a.n, a.trials, a.mean_mf, a.median_mf, a.mean_iterations, a.mean_time_s,
                a.median_time_s
            )?;
        }
        Ok(())
    }

    /// Long format: `n,trial,first,second,stage,iteration,isl` with stage `first` or `second`.
    pub fn write_cross_init_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "n,trial,first,second,stage,iteration,isl")?;
        for c in &self.cross_init {
            for (stage, trace) in [("first", &c.first_isl), ("second", &c.second_isl)] {
                for (k, isl) in trace.iter().enumerate() {
                    writeln!(w, "{},{},{},{},{stage},{k},{isl:?}", c.n, c.trial, c.first, c.second)?;
                }
            }
        }
        Ok(())
    }

    pub fn summary_table(&self) -> String {
        let mut out = format!(
            "{:<16} {:>6} {:>7} {:>10} {:>10} {:>12}\n",
            "variant", "N", "trials", "mean MF", "median MF", "mean time s"
        );
        for a in &self.aggregates {
            let _ = writeln!(
                out,
                "{:<16} {:>6} {:>7} {:>10.4} {:>10.4} {:>12.4e}",
                a.variant.name(),
                a.n,
                a.trials,
                a.mean_mf,
                a.median_mf,
                a.mean_time_s
            );
        }
        out
    }
}
