//! Monte Carlo sweeps around the threshold `p0(n) = log2(n) / n`, and
//! long-leaf statistics of random trees.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{certified_lower_bound, long_leaves_unchecked};
use crate::cutoff::ParamSet;
use crate::embed::{witness_pipeline_on, Outcome};
use crate::error::{Error, Result};
use crate::greedy::greedy_at_with;
use crate::random::{mix_seed, RandomSource};
use crate::sample::{sample_gnp, sample_random_tree, Probability};

pub const SWEEP_HEADER: &str =
    "n,p,multiplier,trials,witness_rate,certified_ge2_rate,mean_residual_bound,mean_runtime_ms";

/// `log2(n) / n`.
pub fn threshold_p(n: usize) -> f64 {
    (n as f64).log2() / n as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub n_list: Vec<usize>,
    pub multipliers: Vec<f64>,
    pub trials: usize,
    pub base_seed: u64,
    pub eps: f64,
    pub sigma: u64,
    pub alpha: f64,
    pub beta: f64,
    /// Record wall-clock time per trial. Off by default because timings
    /// break byte-identical output.
    pub timing: bool,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if let Some(m) = self.multipliers.iter().find(|&&m| !(m > 0.0 && m.is_finite())) {
            return Err(Error::InvalidArgument(format!("multiplier {m} must be positive")));
        }
        for &n in &self.n_list {
            self.params(n)?;
        }
        Ok(())
    }

    pub fn params(&self, n: usize) -> Result<ParamSet> {
        ParamSet::new(n as u64, self.eps, self.sigma, self.alpha, self.beta)
            .map_err(|e| Error::InvalidArgument(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub p: f64,
    pub multiplier: f64,
    pub trials: usize,
    pub witness_rate: f64,
    pub certified_ge2_rate: f64,
    pub mean_residual_bound: f64,
    pub mean_runtime_ms: f64,
}

/// Per-trial outcome, kept for callers that need more than the row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub witness: bool,
    pub certified_lower_bound: usize,
    /// Best upper bound found: 1 with a witness, otherwise the smaller of
    /// the pipeline's replayed residual and a greedy run.
    pub residual_bound: usize,
    pub runtime_ms: f64,
    /// Witness protocol replays to its claimed residual.
    pub witness_sound: bool,
    pub exposure_violations: usize,
}

pub fn trial_seed(base: u64, n: usize, multiplier: f64, trial: usize) -> u64 {
    mix_seed(base, &[n as u64, multiplier.to_bits(), trial as u64])
}

/// One sweep trial: sample, run the pipeline, bound from below and above.
pub fn run_trial(n: usize, multiplier: f64, params: &ParamSet, seed: u64, timing: bool) -> TrialRecord {
    let start = Instant::now();
    let p = Probability::saturating(multiplier * threshold_p(n));
    let mut rng = RandomSource::new(seed);
    let g = sample_gnp(n, p, &mut rng);
    let report = witness_pipeline_on(&g, p.get(), params, seed);
    let witness = report.outcome == Outcome::Witness;
    let witness_sound = match (&report.protocol, report.residual_size) {
        (Some(proto), Some(claimed)) => crate::acquisition::verify_protocol(&g, proto)
            .map(|r| r.residual_size == claimed)
            .unwrap_or(false),
        _ => !witness,
    };
    let certified = certified_lower_bound(&g);
    let residual_bound = if witness {
        1
    } else {
        let greedy = greedy_at_with(&g, &mut rng.derive(&[1]), 0).upper_bound;
        report.residual_size.map_or(greedy, |r| r.min(greedy))
    };
    TrialRecord {
        seed,
        witness,
        certified_lower_bound: certified,
        residual_bound,
        runtime_ms: if timing {
            start.elapsed().as_secs_f64() * 1e3
        } else {
            0.0
        },
        witness_sound,
        exposure_violations: report.exposure_violations,
    }
}

/// Runs every `(n, multiplier)` cell; rows come out in `n`-major order.
/// Trials run in parallel but each has its own seed, so the result does not
/// depend on scheduling.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    Ok(run_sweep_detailed(cfg)?.into_iter().map(|(row, _)| row).collect())
}

pub fn run_sweep_detailed(cfg: &SweepConfig) -> Result<Vec<(SweepRow, Vec<TrialRecord>)>> {
    cfg.validate()?;
    let mut out = Vec::new();
    for &n in &cfg.n_list {
        let params = cfg.params(n)?;
        for &mult in &cfg.multipliers {
            let records: Vec<TrialRecord> = (0..cfg.trials)
                .into_par_iter()
                .map(|t| run_trial(n, mult, &params, trial_seed(cfg.base_seed, n, mult, t), cfg.timing))
                .collect();
            let k = records.len() as f64;
            let row = SweepRow {
                n,
                p: mult * threshold_p(n),
                multiplier: mult,
                trials: cfg.trials,
                witness_rate: records.iter().filter(|r| r.witness).count() as f64 / k,
                certified_ge2_rate: records.iter().filter(|r| r.certified_lower_bound >= 2).count()
                    as f64
                    / k,
                mean_residual_bound: records.iter().map(|r| r.residual_bound as f64).sum::<f64>() / k,
                mean_runtime_ms: records.iter().map(|r| r.runtime_ms).sum::<f64>() / k,
            };
            out.push((row, records));
        }
    }
    Ok(out)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = format!("{SWEEP_HEADER}\n");
    for r in rows {
        writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            r.n,
            r.p,
            r.multiplier,
            r.trials,
            r.witness_rate,
            r.certified_ge2_rate,
            r.mean_residual_bound,
            r.mean_runtime_ms
        )
        .unwrap();
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeStats {
    pub n: usize,
    pub trials: usize,
    pub mean_fraction: f64,
    pub variance: f64,
    /// `e^-3`, the limiting long-leaf density.
    pub expected_fraction: f64,
    /// Share of trees with at least `n / (3 e^3)` long leaves.
    pub share_above_bound: f64,
    pub min_count: usize,
    pub max_count: usize,
    pub counts: Vec<usize>,
}

pub const TREE_STATS_HEADER: &str =
    "n,trials,mean_fraction,variance,expected_fraction,share_above_bound,min_count,max_count";

impl TreeStats {
    pub fn csv(&self) -> String {
        format!(
            "{TREE_STATS_HEADER}\n{},{},{},{},{},{},{},{}\n",
            self.n,
            self.trials,
            self.mean_fraction,
            self.variance,
            self.expected_fraction,
            self.share_above_bound,
            self.min_count,
            self.max_count
        )
    }
}

/// Long-leaf counts over `trials` uniform labelled trees on `n` vertices.
pub fn run_tree_stats(n: usize, trials: usize, base_seed: u64) -> Result<TreeStats> {
    if n < 6 {
        return Err(Error::InvalidArgument(format!("tree stats need n >= 6, got {n}")));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let counts: Vec<usize> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = RandomSource::new(mix_seed(base_seed, &[n as u64, t as u64]));
            let tree = sample_random_tree(n, &mut rng).expect("n >= 6");
            long_leaves_unchecked(&tree).len()
        })
        .collect();
    let fractions: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
    let k = trials as f64;
    let mean = fractions.iter().sum::<f64>() / k;
    let variance = if trials > 1 {
        fractions.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (k - 1.0)
    } else {
        0.0
    };
    let e3 = (-3.0f64).exp();
    let bound = n as f64 * e3 / 3.0;
    Ok(TreeStats {
        n,
        trials,
        mean_fraction: mean,
        variance,
        expected_fraction: e3,
        share_above_bound: counts.iter().filter(|&&c| c as f64 >= bound).count() as f64 / k,
        min_count: *counts.iter().min().unwrap(),
        max_count: *counts.iter().max().unwrap(),
        counts,
    })
}
