use std::fmt::Write as _;

use rand::Rng;

use super::{message_grid, Estimate, TailBoundParams};
use crate::bitcore::{bsc_apply, NoiseModel, RandomSource};
use crate::codes::Codec;
use crate::error::{invalid, Result};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Settings of a tail-concentration run.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TailConfig {
    pub p: f64,
    /// Channel uses with a uniformly random message.
    pub trials: u64,
    /// Channel uses per message of the adversarial grid.
    pub grid_trials: u64,
    pub t_values: Vec<u64>,
    pub seed: u64,
    /// Spacing of the adversarial grid; the Gray step `g` for Gray codes.
    pub grid_step: u64,
    /// Largest number of grid messages.
    pub grid_points: usize,
    /// Allowed excess over the bound, in standard errors.
    pub sigmas: f64,
}

impl TailConfig {
    pub fn new(p: f64, trials: u64, seed: u64) -> Self {
        TailConfig {
            p,
            trials,
            grid_trials: (trials / 10).max(1),
            t_values: vec![1, 2, 4, 8],
            seed,
            grid_step: 1,
            grid_points: 16,
            sigmas: 3.0,
        }
    }
}

/// One `t` of the report.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct TailRow {
    pub t: u64,
    /// `Pr[|v - v'| >= t]` for uniform `v`.
    pub empirical: f64,
    pub stderr: f64,
    pub bound: f64,
    /// The largest per-message tail over the grid.
    pub adversarial: f64,
    pub adversarial_stderr: f64,
    pub adversarial_message: u64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub codec: String,
    pub config: TailConfig,
    pub bound_params: Option<TailBoundParams>,
    pub grid: Vec<u64>,
    pub rows: Vec<TailRow>,
    pub pass: bool,
}

pub const CSV_HEADER: &str = "t,empirical,stderr,bound,adversarial,adversarial_stderr,pass";

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Columns: `t,empirical,stderr,bound,adversarial,adversarial_stderr,pass`;
    /// `bound` is empty when no bound was supplied.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let bound = if self.bound_params.is_some() {
                r.bound.to_string()
            } else {
                String::new()
            };
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.t, r.empirical, r.stderr, bound, r.adversarial, r.adversarial_stderr, r.pass
            )
            .expect("write to string");
        }
        out
    }
}

fn distance_counts(
    code: &dyn Codec,
    noise: NoiseModel,
    trials: u64,
    rng: &RandomSource,
    label: &str,
    message: Option<u64>,
    t_values: &[u64],
) -> Result<Vec<u64>> {
    let m = code.params().messages;
    let mut hits = vec![0u64; t_values.len()];
    let fixed = match message {
        Some(v) => Some((v, code.encode(v)?)),
        None => None,
    };
    for i in 0..trials {
        let mut r = rng.split_indexed(label, i);
        let (v, c) = match &fixed {
            Some((v, c)) => (*v, bsc_apply(c, noise, &mut r)),
            None => {
                let v = r.random_range(0..m);
                (v, bsc_apply(&code.encode(v)?, noise, &mut r))
            }
        };
        let err = code.decode(&c)?.abs_diff(v);
        for (h, &t) in hits.iter_mut().zip(t_values) {
            if err >= t {
                *h += 1;
            }
        }
    }
    Ok(hits)
}

/// Sends messages through the binary symmetric channel and tabulates
/// `Pr[|v - decode(noisy encode(v))| >= t]`, both for uniform `v` and as the
/// worst message of a fixed grid. Every trial draws from its own stream split
/// off the seed by trial index, so the report depends only on the inputs.
pub fn tail_experiment(
    code: &dyn Codec,
    cfg: &TailConfig,
    bound: Option<TailBoundParams>,
) -> Result<ExperimentReport> {
    if cfg.trials == 0 || cfg.grid_trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    let noise = NoiseModel::new(cfg.p)?;
    let root = RandomSource::new(cfg.seed);
    let uniform = distance_counts(
        code,
        noise,
        cfg.trials,
        &root.split("uniform"),
        "trial",
        None,
        &cfg.t_values,
    )?;
    let grid = message_grid(code.params().messages, cfg.grid_step, cfg.grid_points);
    let mut worst: Vec<(Estimate, u64)> =
        vec![(Estimate::from_counts(0, 1), 0); cfg.t_values.len()];
    for &v in &grid {
        let counts = distance_counts(
            code,
            noise,
            cfg.grid_trials,
            &root.split_indexed("grid", v),
            "trial",
            Some(v),
            &cfg.t_values,
        )?;
        for (w, &n) in worst.iter_mut().zip(&counts) {
            let est = Estimate::from_counts(n, cfg.grid_trials);
            if est.value > w.0.value {
                *w = (est, v);
            }
        }
    }
    let rows: Vec<TailRow> = cfg
        .t_values
        .iter()
        .zip(uniform)
        .zip(worst)
        .map(|((&t, n), (adv, adv_v))| {
            let est = Estimate::from_counts(n, cfg.trials);
            let b = bound.map(|b| b.bound(t)).unwrap_or(f64::INFINITY);
            TailRow {
                t,
                empirical: est.value,
                stderr: est.stderr,
                bound: b,
                adversarial: adv.value,
                adversarial_stderr: adv.stderr,
                adversarial_message: adv_v,
                pass: est.within(b, cfg.sigmas) && adv.within(b, cfg.sigmas),
            }
        })
        .collect();
    Ok(ExperimentReport {
        schema_version: REPORT_SCHEMA_VERSION,
        codec: code.descriptor(),
        config: cfg.clone(),
        bound_params: bound,
        grid,
        pass: rows.iter().all(|r| r.pass),
        rows,
    })
}
