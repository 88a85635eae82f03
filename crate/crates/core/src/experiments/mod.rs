//! Monte Carlo sweeps with deterministic per-trial seeding.
//!
//! Every trial draws its randomness from a seed derived from the base seed
//! and the trial's grid coordinates, and results are collected in grid
//! order, so output bytes do not depend on the number of worker threads.

pub mod csv;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::index::sample as sample_indices;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::er_model::{bound_prediction, er_parameters, predicted_level_fractions, sample_gnp};
use crate::error::{Error, Result};
use crate::game::{minimax_value, play_game, AdversaryPolicy, Player1Policy, MAX_EXACT_TARGETS};
use crate::graph::{bfs_distances, distance_matrix, level_sizes, Graph, UNREACHABLE};
use crate::localization::greedy_resolving_set;
use crate::matrix::{columns_pairwise_distinct, sample_bernoulli};

use self::csv::{format_float, opt_float, opt_int, to_csv_string, CsvRecord};

/// Label written next to large-N SMD estimates: one MAX-GAIN game against
/// the greedy largest-cell adversary, not the worst case over adversaries.
pub const SMD_ESTIMATOR: &str = "maxgain_vs_greedy_max_cell";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ExperimentKind {
    MdSmdSweep,
    ThresholdSweep,
    LevelFractions,
}

/// Either an explicit list of probabilities or the rule `p = c / N^a`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProbabilityGrid {
    List(Vec<f64>),
    Parametric { c: f64, a: f64 },
}

impl ProbabilityGrid {
    pub fn values_for(&self, n: usize) -> Vec<f64> {
        match self {
            ProbabilityGrid::List(ps) => ps.clone(),
            ProbabilityGrid::Parametric { c, a } => vec![c / (n as f64).powf(*a)],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Caps {
    /// Step cap for estimator games; defaults to `N`.
    #[serde(default)]
    pub step_cap: Option<usize>,
    /// Exact SMD is also computed for graphs with at most this many nodes.
    #[serde(default)]
    pub exact_smd_max_n: usize,
    /// Disconnected samples are redrawn at most this many times.
    #[serde(default = "default_max_resamples")]
    pub max_resamples: usize,
}

fn default_max_resamples() -> usize {
    10
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            step_cap: None,
            exact_smd_max_n: 0,
            max_resamples: default_max_resamples(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub n_values: Vec<usize>,
    pub p_or_q: ProbabilityGrid,
    pub trials: usize,
    pub base_seed: u64,
    #[serde(default)]
    pub caps: Caps,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    /// Row counts for threshold sweeps.
    #[serde(default)]
    pub m_values: Vec<usize>,
    /// Random sources per graph for level-fraction runs.
    #[serde(default = "default_sources")]
    pub sources_per_graph: usize,
    /// Fill the `wall_time_ms` column. Off by default because timings make
    /// the output nondeterministic.
    #[serde(default)]
    pub record_timing: bool,
}

fn default_sources() -> usize {
    50
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.n_values.is_empty() {
            return bad("n_values is empty".into());
        }
        if let Some(&n) = self.n_values.iter().find(|&&n| n < 3) {
            return bad(format!("n = {n} is below 3"));
        }
        for &n in &self.n_values {
            let ps = self.p_or_q.values_for(n);
            if ps.is_empty() {
                return bad("p_or_q is empty".into());
            }
            let open = self.kind != ExperimentKind::ThresholdSweep;
            for p in ps {
                let ok = if open { p > 0.0 && p < 1.0 } else { (0.0..=1.0).contains(&p) };
                if !ok {
                    return bad(format!("probability {p} out of range for n = {n}"));
                }
            }
        }
        match self.kind {
            ExperimentKind::ThresholdSweep if self.m_values.is_empty() => {
                bad("threshold sweep needs m_values".into())
            }
            ExperimentKind::LevelFractions if self.sources_per_graph == 0 => {
                bad("sources_per_graph must be at least 1".into())
            }
            ExperimentKind::MdSmdSweep if self.caps.exact_smd_max_n > MAX_EXACT_TARGETS => bad(format!(
                "exact_smd_max_n may not exceed {MAX_EXACT_TARGETS}"
            )),
            _ => Ok(()),
        }
    }

    fn cells(&self) -> Vec<(usize, f64)> {
        self.n_values
            .iter()
            .flat_map(|&n| self.p_or_q.values_for(n).into_iter().map(move |p| (n, p)))
            .collect()
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Stable hash of a grid coordinate tuple.
pub fn stable_hash(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(0x5EED_1A7E_u64, |h, &x| splitmix64(h ^ splitmix64(x)))
}

/// `base ⊕ hash(n, p, trial)`.
pub fn trial_seed(base: u64, n: usize, p: f64, trial: usize) -> u64 {
    base ^ stable_hash(&[n as u64, p.to_bits(), trial as u64])
}

/// Seed for the `attempt`-th redraw after a disconnected sample.
fn attempt_seed(seed: u64, attempt: usize) -> u64 {
    if attempt == 0 {
        seed
    } else {
        seed ^ stable_hash(&[u64::MAX, attempt as u64])
    }
}

/// Samples `G(n, p)` until connected, returning the graph and the number of
/// discarded samples.
fn connected_sample(n: usize, p: f64, seed: u64, max_resamples: usize) -> Result<(Graph, usize)> {
    for attempt in 0..=max_resamples {
        let g = sample_gnp(n, p, attempt_seed(seed, attempt))?;
        if bfs_distances(&g, 0)?.iter().all(|&d| d != UNREACHABLE) {
            return Ok((g, attempt));
        }
    }
    Err(Error::Disconnected)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub n: usize,
    pub p: f64,
    pub trial_index: usize,
    pub seed: u64,
    pub resamples: usize,
    pub md_greedy_size: usize,
    pub smd_estimate_steps: usize,
    pub smd_exact: Option<usize>,
    pub bound_lower: Option<f64>,
    pub bound_upper: Option<f64>,
    pub md_predicted: Option<f64>,
    pub wall_time_ms: Option<f64>,
}

impl CsvRecord for TrialRecord {
    fn header() -> &'static [&'static str] {
        &[
            "n",
            "p",
            "trial_index",
            "seed",
            "resamples",
            "md_greedy_size",
            "smd_estimate_steps",
            "smd_exact",
            "bound_lower",
            "bound_upper",
            "md_predicted",
            "wall_time_ms",
        ]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            format_float(self.p),
            self.trial_index.to_string(),
            self.seed.to_string(),
            self.resamples.to_string(),
            self.md_greedy_size.to_string(),
            self.smd_estimate_steps.to_string(),
            opt_int(self.smd_exact),
            opt_float(self.bound_lower),
            opt_float(self.bound_upper),
            opt_float(self.md_predicted),
            opt_float(self.wall_time_ms),
        ]
    }
}

/// Per-cell mean and standard error of the trial statistics.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellSummary {
    pub n: usize,
    pub p: f64,
    pub trials: usize,
    pub failures: usize,
    pub md_greedy_mean: f64,
    pub md_greedy_stderr: f64,
    pub smd_estimate_mean: f64,
    pub smd_estimate_stderr: f64,
    pub smd_upper: Option<f64>,
    pub smd_lower: Option<f64>,
    pub md_predicted: Option<f64>,
    pub f_gamma: Option<f64>,
    pub estimator: &'static str,
}

impl CsvRecord for CellSummary {
    fn header() -> &'static [&'static str] {
        &[
            "n",
            "p",
            "trials",
            "failures",
            "md_greedy_mean",
            "md_greedy_stderr",
            "smd_estimate_mean",
            "smd_estimate_stderr",
            "smd_upper",
            "smd_lower",
            "md_predicted",
            "f_gamma",
            "estimator",
        ]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            format_float(self.p),
            self.trials.to_string(),
            self.failures.to_string(),
            format_float(self.md_greedy_mean),
            format_float(self.md_greedy_stderr),
            format_float(self.smd_estimate_mean),
            format_float(self.smd_estimate_stderr),
            opt_float(self.smd_upper),
            opt_float(self.smd_lower),
            opt_float(self.md_predicted),
            opt_float(self.f_gamma),
            self.estimator.to_string(),
        ]
    }
}

/// A trial that produced no record.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialFailure {
    pub n: usize,
    pub p: f64,
    pub trial_index: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MdSmdSweep {
    pub records: Vec<TrialRecord>,
    /// `traces[k]` holds `|T_0|, …, |T_r|` of the estimator game behind
    /// `records[k]`.
    pub traces: Vec<Vec<usize>>,
    pub summaries: Vec<CellSummary>,
    pub failures: Vec<TrialFailure>,
}

/// Mean and standard error (sample standard deviation over `sqrt(k)`; zero
/// for a single value).
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let k = xs.len();
    if k == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / k as f64;
    if k == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
    (mean, (var / k as f64).sqrt())
}

fn md_smd_trial(cfg: &ExperimentConfig, n: usize, p: f64, trial: usize) -> Result<(TrialRecord, Vec<usize>)> {
    let started = Instant::now();
    let seed = trial_seed(cfg.base_seed, n, p, trial);
    let (g, resamples) = connected_sample(n, p, seed, cfg.caps.max_resamples)?;
    let dm = distance_matrix(&g);

    let md_greedy_size = greedy_resolving_set(&dm)?.len();
    let cap = cfg.caps.step_cap.unwrap_or(n);
    let game = play_game(&dm, &Player1Policy::MaxGain, &AdversaryPolicy::GreedyMaxCell, cap)?
        .require_resolved(cap)?;
    let smd_exact = if n <= cfg.caps.exact_smd_max_n {
        Some(minimax_value(&dm, n)?)
    } else {
        None
    };
    let bounds = er_parameters(n, p).and_then(|e| bound_prediction(&e)).ok();

    let record = TrialRecord {
        n,
        p,
        trial_index: trial,
        seed,
        resamples,
        md_greedy_size,
        smd_estimate_steps: game.step_count(),
        smd_exact,
        bound_lower: bounds.as_ref().map(|b| b.smd_lower),
        bound_upper: bounds.as_ref().map(|b| b.smd_upper),
        md_predicted: bounds.as_ref().map(|b| b.md_value),
        wall_time_ms: cfg
            .record_timing
            .then(|| started.elapsed().as_secs_f64() * 1e3),
    };
    Ok((record, game.candidate_sizes()))
}

/// MD/SMD sweep over `G(N, p)`: greedy resolving set size and one MAX-GAIN
/// game per trial, with the closed-form predictions attached.
pub fn run_md_smd_sweep(cfg: &ExperimentConfig) -> Result<MdSmdSweep> {
    expect_kind(cfg, ExperimentKind::MdSmdSweep)?;
    let cells = cfg.cells();
    let jobs: Vec<(usize, f64, usize)> = cells
        .iter()
        .flat_map(|&(n, p)| (0..cfg.trials).map(move |t| (n, p, t)))
        .collect();
    let outcomes: Vec<_> = jobs
        .par_iter()
        .map(|&(n, p, t)| md_smd_trial(cfg, n, p, t))
        .collect();

    let mut records = Vec::new();
    let mut traces = Vec::new();
    let mut failures = Vec::new();
    for (&(n, p, trial_index), outcome) in jobs.iter().zip(outcomes) {
        match outcome {
            Ok((record, trace)) => {
                records.push(record);
                traces.push(trace);
            }
            Err(e) => failures.push(TrialFailure {
                n,
                p,
                trial_index,
                reason: e.to_string(),
            }),
        }
    }

    let summaries = cells
        .iter()
        .map(|&(n, p)| {
            let in_cell: Vec<&TrialRecord> =
                records.iter().filter(|r| r.n == n && r.p == p).collect();
            let md: Vec<f64> = in_cell.iter().map(|r| r.md_greedy_size as f64).collect();
            let smd: Vec<f64> = in_cell.iter().map(|r| r.smd_estimate_steps as f64).collect();
            let (md_greedy_mean, md_greedy_stderr) = mean_stderr(&md);
            let (smd_estimate_mean, smd_estimate_stderr) = mean_stderr(&smd);
            let bounds = er_parameters(n, p).and_then(|e| bound_prediction(&e)).ok();
            CellSummary {
                n,
                p,
                trials: in_cell.len(),
                failures: failures.iter().filter(|f| f.n == n && f.p == p).count(),
                md_greedy_mean,
                md_greedy_stderr,
                smd_estimate_mean,
                smd_estimate_stderr,
                smd_upper: bounds.as_ref().map(|b| b.smd_upper),
                smd_lower: bounds.as_ref().map(|b| b.smd_lower),
                md_predicted: bounds.as_ref().map(|b| b.md_value),
                f_gamma: bounds.as_ref().map(|b| b.f_gamma),
                estimator: SMD_ESTIMATOR,
            }
        })
        .collect();

    Ok(MdSmdSweep {
        records,
        traces,
        summaries,
        failures,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdRow {
    pub n: usize,
    pub q: f64,
    pub m: usize,
    pub trials: usize,
    pub p_distinct: f64,
}

impl CsvRecord for ThresholdRow {
    fn header() -> &'static [&'static str] {
        &["n", "q", "m", "trials", "p_distinct"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            format_float(self.q),
            self.m.to_string(),
            self.trials.to_string(),
            format_float(self.p_distinct),
        ]
    }
}

/// Empirical probability that an `m × N` Bernoulli(`q`) matrix has pairwise
/// distinct columns, for every `(N, q, m)` in the grid.
pub fn run_threshold_sweep(cfg: &ExperimentConfig) -> Result<Vec<ThresholdRow>> {
    expect_kind(cfg, ExperimentKind::ThresholdSweep)?;
    let cells: Vec<(usize, f64, usize)> = cfg
        .cells()
        .into_iter()
        .flat_map(|(n, q)| cfg.m_values.iter().map(move |&m| (n, q, m)))
        .collect();
    cells
        .iter()
        .map(|&(n, q, m)| {
            let hits: Result<Vec<bool>> = (0..cfg.trials)
                .into_par_iter()
                .map(|t| {
                    if m == 0 {
                        // Every column is the empty word.
                        return Ok(n < 2);
                    }
                    let seed = cfg.base_seed ^ stable_hash(&[n as u64, q.to_bits(), m as u64, t as u64]);
                    Ok(columns_pairwise_distinct(&sample_bernoulli(m, n, q, seed)?))
                })
                .collect();
            let distinct = hits?.into_iter().filter(|&d| d).count();
            Ok(ThresholdRow {
                n,
                q,
                m,
                trials: cfg.trials,
                p_distinct: distinct as f64 / cfg.trials as f64,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelRow {
    pub n: usize,
    pub p: f64,
    pub level: u32,
    /// Mean of `|S(v, l)| / N` over all sampled sources.
    pub empirical_fraction: f64,
    pub predicted_fraction: Option<f64>,
    /// For `1 ≤ l ≤ i`: largest `| |S(v, l)| / δ^l - 1 |` over sources.
    pub max_rel_dev: Option<f64>,
}

impl CsvRecord for LevelRow {
    fn header() -> &'static [&'static str] {
        &[
            "n",
            "p",
            "level",
            "empirical_fraction",
            "predicted_fraction",
            "max_rel_dev",
        ]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            format_float(self.p),
            self.level.to_string(),
            format_float(self.empirical_fraction),
            opt_float(self.predicted_fraction),
            opt_float(self.max_rel_dev),
        ]
    }
}

/// Level-set sizes around random sources in `G(N, p)` next to their
/// predicted fractions.
pub fn run_level_fractions(cfg: &ExperimentConfig) -> Result<Vec<LevelRow>> {
    expect_kind(cfg, ExperimentKind::LevelFractions)?;
    let mut rows = Vec::new();
    for (n, p) in cfg.cells() {
        let sources = cfg.sources_per_graph.min(n);
        let per_graph: Vec<Vec<Vec<usize>>> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let seed = trial_seed(cfg.base_seed, n, p, t);
                let (g, _) = connected_sample(n, p, seed, cfg.caps.max_resamples)?;
                let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed));
                sample_indices(&mut rng, n, sources)
                    .into_iter()
                    .map(|v| bfs_distances(&g, v).map(|d| level_sizes(&d)))
                    .collect()
            })
            .collect::<Result<_>>()?;
        let histograms: Vec<&Vec<usize>> = per_graph.iter().flatten().collect();

        let params = er_parameters(n, p).ok();
        let predicted: BTreeMap<u32, f64> = params
            .as_ref()
            .and_then(|e| predicted_level_fractions(e).ok())
            .unwrap_or_default();
        let top = histograms.iter().map(|h| h.len()).max().unwrap_or(0);
        let count = histograms.len() as f64;
        for level in 0..top {
            let mean = histograms
                .iter()
                .map(|h| h.get(level).copied().unwrap_or(0) as f64 / n as f64)
                .sum::<f64>()
                / count;
            let max_rel_dev = params
                .as_ref()
                .filter(|e| level >= 1 && level as u32 <= e.i.max(1))
                .map(|e| {
                    let expected = e.delta.powi(level as i32);
                    histograms
                        .iter()
                        .map(|h| (h.get(level).copied().unwrap_or(0) as f64 / expected - 1.0).abs())
                        .fold(0.0, f64::max)
                });
            rows.push(LevelRow {
                n,
                p,
                level: level as u32,
                empirical_fraction: mean,
                predicted_fraction: predicted.get(&(level as u32)).copied(),
                max_rel_dev,
            });
        }
    }
    Ok(rows)
}

fn expect_kind(cfg: &ExperimentConfig, kind: ExperimentKind) -> Result<()> {
    cfg.validate()?;
    if cfg.kind == kind {
        Ok(())
    } else {
        Err(Error::Config(format!("expected a {kind:?} config, got {:?}", cfg.kind)))
    }
}

/// Output of any sweep, rendered to CSV.
#[derive(Clone, Debug, PartialEq)]
pub enum ExperimentOutput {
    MdSmd(MdSmdSweep),
    Threshold(Vec<ThresholdRow>),
    Levels(Vec<LevelRow>),
}

impl ExperimentOutput {
    /// Main CSV: one row per trial, threshold cell or level.
    pub fn csv(&self) -> String {
        match self {
            ExperimentOutput::MdSmd(s) => to_csv_string(&s.records),
            ExperimentOutput::Threshold(rows) => to_csv_string(rows),
            ExperimentOutput::Levels(rows) => to_csv_string(rows),
        }
    }

    /// Per-cell summary CSV, for MD/SMD sweeps only.
    pub fn summary_csv(&self) -> Option<String> {
        match self {
            ExperimentOutput::MdSmd(s) => Some(to_csv_string(&s.summaries)),
            _ => None,
        }
    }
}

/// Runs the sweep `cfg` describes on a pool of `threads` workers (the
/// global pool when `None`).
pub fn run_experiment(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let run = || match cfg.kind {
        ExperimentKind::MdSmdSweep => run_md_smd_sweep(cfg).map(ExperimentOutput::MdSmd),
        ExperimentKind::ThresholdSweep => run_threshold_sweep(cfg).map(ExperimentOutput::Threshold),
        ExperimentKind::LevelFractions => run_level_fractions(cfg).map(ExperimentOutput::Levels),
    };
    match threads {
        None => run(),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(run),
    }
}

/// `out.csv` → `out.summary.csv`.
pub fn summary_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.summary.csv"))
}

/// Writes the main CSV to `path` and, for MD/SMD sweeps, the summary next to
/// it.
pub fn write_output(output: &ExperimentOutput, path: &Path) -> Result<()> {
    std::fs::write(path, output.csv())?;
    if let Some(summary) = output.summary_csv() {
        std::fs::write(summary_path(path), summary)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn md_config(n_values: Vec<usize>, p: f64, trials: usize) -> ExperimentConfig {
        ExperimentConfig {
            kind: ExperimentKind::MdSmdSweep,
            n_values,
            p_or_q: ProbabilityGrid::List(vec![p]),
            trials,
            base_seed: 42,
            caps: Caps::default(),
            output_path: None,
            m_values: Vec::new(),
            sources_per_graph: 50,
            record_timing: false,
        }
    }

    #[test]
    fn config_parsing_and_validation() {
        let cfg = ExperimentConfig::from_json(
            r#"{"kind":"THRESHOLD_SWEEP","n_values":[64],"p_or_q":[0.5],"trials":3,
                "base_seed":1,"m_values":[0,8]}"#,
        )
        .unwrap();
        assert_eq!(cfg.kind, ExperimentKind::ThresholdSweep);
        assert_eq!(cfg.caps, Caps::default());

        let parametric = ExperimentConfig::from_json(
            r#"{"kind":"MD_SMD_SWEEP","n_values":[100,400],"p_or_q":{"c":2.0,"a":0.5},
                "trials":1,"base_seed":1}"#,
        )
        .unwrap();
        assert_eq!(parametric.cells(), vec![(100, 0.2), (400, 0.1)]);

        for bad in [
            r#"{"kind":"MD_SMD_SWEEP","n_values":[100],"p_or_q":[0.3],"trials":0,"base_seed":1}"#,
            r#"{"kind":"MD_SMD_SWEEP","n_values":[2],"p_or_q":[0.3],"trials":1,"base_seed":1}"#,
            r#"{"kind":"MD_SMD_SWEEP","n_values":[100],"p_or_q":[1.3],"trials":1,"base_seed":1}"#,
            r#"{"kind":"MD_SMD_SWEEP","n_values":[100],"p_or_q":{"c":500.0,"a":1.0},"trials":1,"base_seed":1}"#,
            r#"{"kind":"THRESHOLD_SWEEP","n_values":[100],"p_or_q":[0.3],"trials":1,"base_seed":1}"#,
            r#"{"kind":"MD_SMD_SWEEP","n_values":[100],"p_or_q":[0.3],"trials":1,"base_seed":1,"bogus":1}"#,
            r#"{"kind":"NOPE","n_values":[100],"p_or_q":[0.3],"trials":1,"base_seed":1}"#,
        ] {
            assert!(matches!(ExperimentConfig::from_json(bad), Err(Error::Config(_))), "{bad}");
        }
    }

    #[test]
    fn seeds_are_stable_and_distinct() {
        assert_eq!(trial_seed(7, 100, 0.3, 2), trial_seed(7, 100, 0.3, 2));
        let mut seen = std::collections::HashSet::new();
        for n in [100usize, 200, 400] {
            for p in [0.1, 0.2, 0.3] {
                for t in 0..100 {
                    assert!(seen.insert(trial_seed(7, n, p, t)));
                }
            }
        }
    }

    #[test]
    fn mean_and_stderr() {
        assert_eq!(mean_stderr(&[3.0]), (3.0, 0.0));
        let (m, s) = mean_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn single_trial_sweep_is_reproducible() {
        let cfg = md_config(vec![60], 0.3, 1);
        let a = run_md_smd_sweep(&cfg).unwrap();
        assert_eq!(a.records.len(), 1);
        assert_eq!(a.summaries.len(), 1);
        assert_eq!(a.records[0].seed, trial_seed(42, 60, 0.3, 0));
        assert!(a.records[0].smd_estimate_steps >= 1);
        assert_eq!(a, run_md_smd_sweep(&cfg).unwrap());
        let trace = &a.traces[0];
        assert_eq!(trace[0], 60);
        assert_eq!(*trace.last().unwrap(), 1);
    }

    #[test]
    fn exact_smd_attached_for_small_graphs() {
        let mut cfg = md_config(vec![10], 0.5, 4);
        cfg.caps.exact_smd_max_n = 12;
        let sweep = run_md_smd_sweep(&cfg).unwrap();
        for r in &sweep.records {
            let exact = r.smd_exact.unwrap();
            assert!(exact <= r.smd_estimate_steps.max(exact));
            assert!(exact <= r.md_greedy_size);
        }
    }

    #[test]
    fn persistent_disconnection_is_a_cell_failure() {
        let mut cfg = md_config(vec![50], 0.01, 2);
        cfg.caps.max_resamples = 2;
        let sweep = run_md_smd_sweep(&cfg).unwrap();
        assert!(sweep.records.is_empty());
        assert_eq!(sweep.failures.len(), 2);
        assert_eq!(sweep.summaries[0].failures, 2);
        assert_eq!(sweep.summaries[0].trials, 0);
    }

    #[test]
    fn threshold_edge_cases() {
        let cfg = ExperimentConfig {
            kind: ExperimentKind::ThresholdSweep,
            m_values: vec![0, 40],
            p_or_q: ProbabilityGrid::List(vec![0.5]),
            ..md_config(vec![64], 0.5, 20)
        };
        let rows = run_threshold_sweep(&cfg).unwrap();
        assert_eq!(rows[0].p_distinct, 0.0);
        assert_eq!(rows[1].p_distinct, 1.0);
        assert_eq!(
            ExperimentOutput::Threshold(rows).csv().lines().next(),
            Some("n,q,m,trials,p_distinct")
        );
    }

    #[test]
    fn csv_shapes() {
        let sweep = run_md_smd_sweep(&md_config(vec![40], 0.4, 2)).unwrap();
        let out = ExperimentOutput::MdSmd(sweep);
        let csv = out.csv();
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.starts_with("n,p,trial_index,seed,resamples,md_greedy_size,smd_estimate_steps,"));
        let summary = out.summary_csv().unwrap();
        assert!(summary.lines().nth(1).unwrap().ends_with(SMD_ESTIMATOR));
        assert_eq!(summary_path(Path::new("/tmp/x/out.csv")), Path::new("/tmp/x/out.summary.csv"));
    }

    #[test]
    fn wrong_kind_rejected() {
        let cfg = md_config(vec![40], 0.4, 1);
        assert!(matches!(run_threshold_sweep(&cfg), Err(Error::Config(_))));
        assert!(matches!(run_level_fractions(&cfg), Err(Error::Config(_))));
    }
}
