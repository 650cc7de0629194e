//! Seeded Monte-Carlo experiment runners.
//!
//! Every (grid point, replicate) pair is an independent task with a seed
//! derived from the master seed, so runs are reproducible under any thread
//! count; rows are emitted in deterministic (grid, replicate, centering)
//! order regardless of completion order.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use ndarray::{array, Array2};
use rayon::prelude::*;

use crate::assignment::Permutation;
use crate::corr_er::{sbm_spec, CorrSpec, ProbMatrix};
use crate::error::{Error, Result};
use crate::faq::{faq_match, Init, MatchOptions, MatchResult};
use crate::harness::config::{Centering, ExperimentConfig, ExperimentKind, RateRule};
use crate::harness::csv::{fmt_f64, fmt_opt_f64, fmt_opt_usize};
use crate::harness::io::load_graph;
use crate::harness::noise::inject_block_noise;
use crate::matchability::accuracy;
use crate::rng::{derive, SplitMix64};
use crate::usvt::{center, scaled_threshold, usvt_estimate, ThresholdRule, UsvtOptions};

const STREAM_TASK: u64 = 0x7461_736b; // "task"
const STREAM_MATCH: u64 = 0x6d61_7463; // "matc"
const STREAM_SUBSET: u64 = 0x7375_6273; // "subs"

/// Marginals of the heterogeneous two-block benchmark: dense/sparse blocks
/// that swap roles across the pair, weak cross-block edges.
pub const SWAP_WITHIN_DENSE: f64 = 0.8;
pub const SWAP_WITHIN_SPARSE: f64 = 0.2;
pub const SWAP_CROSS: f64 = 0.1;
pub const SWAP_RHO_WITHIN: f64 = 0.25;
pub const SWAP_RHO_CROSS: f64 = 0.3;

/// The two-block benchmark model at correlation scale `alpha`: block 1 is
/// dense in the first graph and sparse in the second, block 2 the reverse,
/// so an uninformed matcher is drawn to interchanging the blocks.
pub fn two_block_swap_spec(n_per_block: usize, alpha: f64) -> Result<CorrSpec> {
    let q1 = array![
        [SWAP_WITHIN_DENSE, SWAP_CROSS],
        [SWAP_CROSS, SWAP_WITHIN_SPARSE]
    ];
    let q2 = array![
        [SWAP_WITHIN_SPARSE, SWAP_CROSS],
        [SWAP_CROSS, SWAP_WITHIN_DENSE]
    ];
    let r = array![
        [alpha * SWAP_RHO_WITHIN, alpha * SWAP_RHO_CROSS],
        [alpha * SWAP_RHO_CROSS, alpha * SWAP_RHO_WITHIN]
    ];
    sbm_spec(&[n_per_block, n_per_block], &q1, &q2, &r, None)
}

/// Core-junk benchmark: the two-block swap structure lives on the core
/// (split into two halves) and extends to the junk vertices with zero
/// correlation, giving `R = R_c (+) 0`.
pub fn core_junk_spec(n_core: usize, n_junk: usize) -> Result<CorrSpec> {
    let c1 = n_core / 2 + n_core % 2;
    let c2 = n_core / 2;
    let j1 = n_junk / 2 + n_junk % 2;
    let j2 = n_junk / 2;
    // Roles: blocks 0 and 2 are "dense in A", blocks 1 and 3 are "dense in B".
    let role = [0usize, 1, 0, 1];
    let mut q1 = Array2::<f64>::zeros((4, 4));
    let mut q2 = Array2::<f64>::zeros((4, 4));
    let mut r = Array2::<f64>::zeros((4, 4));
    for i in 0..4 {
        for j in 0..4 {
            if role[i] == role[j] {
                let dense = role[i] == 0;
                q1[[i, j]] = if dense { SWAP_WITHIN_DENSE } else { SWAP_WITHIN_SPARSE };
                q2[[i, j]] = if dense { SWAP_WITHIN_SPARSE } else { SWAP_WITHIN_DENSE };
            } else {
                q1[[i, j]] = SWAP_CROSS;
                q2[[i, j]] = SWAP_CROSS;
            }
            let core_block = i < 2 && j < 2;
            if core_block {
                r[[i, j]] = if role[i] == role[j] {
                    SWAP_RHO_WITHIN
                } else {
                    SWAP_RHO_CROSS
                };
            }
        }
    }
    sbm_spec(&[c1, c2, j1, j2], &q1, &q2, &r, Some(n_core))
}

/// Homogeneous model with equal marginals.
pub fn homogeneous_spec(n: usize, p: f64, rho: f64) -> CorrSpec {
    CorrSpec::homogeneous(n, p, p, rho)
}

/// One emitted measurement. `runtime_ms` is kept for reporting but is not
/// written to the CSV so that fixed-seed runs are byte-identical.
#[derive(Debug, Clone)]
pub struct ExperimentRow {
    pub experiment: ExperimentKind,
    pub n: usize,
    pub alpha: Option<f64>,
    pub p: Option<f64>,
    pub rho: Option<f64>,
    pub q_noise: Option<f64>,
    pub n_core: Option<usize>,
    pub n_junk: Option<usize>,
    pub graph_i: Option<usize>,
    pub graph_j: Option<usize>,
    pub replicate: usize,
    pub centering: Centering,
    pub init_label: String,
    pub accuracy: f64,
    pub objective: f64,
    pub runtime_ms: f64,
    pub seed: u64,
}

pub const ROWS_HEADER: &str = "experiment,n,alpha,p,rho,q_noise,n_core,n_junk,graph_i,graph_j,replicate,centering,init,accuracy,objective,seed";

impl ExperimentRow {
    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.experiment.name(),
            self.n,
            fmt_opt_f64(self.alpha),
            fmt_opt_f64(self.p),
            fmt_opt_f64(self.rho),
            fmt_opt_f64(self.q_noise),
            fmt_opt_usize(self.n_core),
            fmt_opt_usize(self.n_junk),
            fmt_opt_usize(self.graph_i),
            fmt_opt_usize(self.graph_j),
            self.replicate,
            self.centering.name(),
            self.init_label,
            fmt_f64(self.accuracy),
            fmt_f64(self.objective),
            self.seed
        )
    }

    /// The grouping key: every parameter column plus the centering arm.
    fn group_key(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.experiment.name(),
            self.n,
            fmt_opt_f64(self.alpha),
            fmt_opt_f64(self.p),
            fmt_opt_f64(self.rho),
            fmt_opt_f64(self.q_noise),
            fmt_opt_usize(self.n_core),
            fmt_opt_usize(self.n_junk),
            fmt_opt_usize(self.graph_i),
            fmt_opt_usize(self.graph_j),
            self.centering.name()
        )
    }
}

pub fn write_rows_csv(path: &Path, rows: &[ExperimentRow]) -> Result<()> {
    let mut out = String::with_capacity(rows.len() * 96 + 128);
    out.push_str(ROWS_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.csv_line());
        out.push('\n');
    }
    let mut file = fs::File::create(path)?;
    file.write_all(out.as_bytes())?;
    Ok(())
}

/// Per-group accuracy and objective statistics (sample standard deviation,
/// n - 1 denominator; a single row reports sd = 0 with count 1).
#[derive(Debug, Clone)]
pub struct SummaryRow {
    pub key: String,
    pub count: usize,
    pub mean_accuracy: f64,
    pub sd_accuracy: f64,
    pub mean_objective: f64,
    pub sd_objective: f64,
}

pub const SUMMARY_HEADER: &str = "experiment,n,alpha,p,rho,q_noise,n_core,n_junk,graph_i,graph_j,centering,count,mean_accuracy,sd_accuracy,mean_objective,sd_objective";

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let count = values.len();
    let mean = values.iter().sum::<f64>() / count as f64;
    if count < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (count as f64 - 1.0)).sqrt())
}

/// Groups rows by (experiment, parameters, centering) in first-appearance
/// order and reduces each group to mean/sd/count.
pub fn summarize(rows: &[ExperimentRow]) -> Result<Vec<SummaryRow>> {
    if rows.is_empty() {
        return Err(Error::EmptyInput("no rows to summarize"));
    }
    let mut order: Vec<String> = Vec::new();
    let mut groups: std::collections::HashMap<String, (Vec<f64>, Vec<f64>)> =
        std::collections::HashMap::new();
    for row in rows {
        let key = row.group_key();
        let entry = groups.entry(key.clone()).or_insert_with(|| {
            order.push(key);
            (Vec::new(), Vec::new())
        });
        entry.0.push(row.accuracy);
        entry.1.push(row.objective);
    }
    Ok(order
        .into_iter()
        .map(|key| {
            let (acc, obj) = &groups[&key];
            let (mean_accuracy, sd_accuracy) = mean_sd(acc);
            let (mean_objective, sd_objective) = mean_sd(obj);
            SummaryRow {
                key,
                count: acc.len(),
                mean_accuracy,
                sd_accuracy,
                mean_objective,
                sd_objective,
            }
        })
        .collect())
}

pub fn write_summary_csv(path: &Path, summary: &[SummaryRow]) -> Result<()> {
    let mut out = String::new();
    out.push_str(SUMMARY_HEADER);
    out.push('\n');
    for row in summary {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.key,
            row.count,
            fmt_f64(row.mean_accuracy),
            fmt_f64(row.sd_accuracy),
            fmt_f64(row.mean_objective),
            fmt_f64(row.sd_objective),
        ));
    }
    let mut file = fs::File::create(path)?;
    file.write_all(out.as_bytes())?;
    Ok(())
}

/// One concrete grid point with everything a task needs to run.
#[derive(Debug, Clone)]
struct GridPoint {
    index: usize,
    alpha: Option<f64>,
    p: Option<f64>,
    rho: Option<f64>,
    q_noise: Option<f64>,
    n_core: Option<usize>,
    n_junk: Option<usize>,
    graph_i: Option<usize>,
    graph_j: Option<usize>,
    spec: Option<CorrSpec>,
    /// Preloaded matrices for the data-driven experiments.
    data: Option<(Array2<f64>, Array2<f64>)>,
    /// Which starts the matcher tries; the better objective wins.
    inits: Vec<(String, Permutation)>,
    /// Accuracy restriction (core experiments).
    accuracy_core: Option<usize>,
}

fn swap_inits(n_per_block: usize) -> Vec<(String, Permutation)> {
    vec![
        (
            "identity".to_string(),
            Permutation::identity(2 * n_per_block),
        ),
        ("block_swap".to_string(), Permutation::block_swap(n_per_block)),
    ]
}

fn identity_init(n: usize) -> Vec<(String, Permutation)> {
    vec![("identity".to_string(), Permutation::identity(n))]
}

fn build_grid(config: &ExperimentConfig) -> Result<Vec<GridPoint>> {
    let mut grid = Vec::new();
    match config.experiment {
        ExperimentKind::Figure1AlphaSweep => {
            let npb = config.n_per_block[0];
            for (index, &alpha) in config.alpha.iter().enumerate() {
                grid.push(GridPoint {
                    index,
                    alpha: Some(alpha),
                    p: None,
                    rho: None,
                    q_noise: None,
                    n_core: None,
                    n_junk: None,
                    graph_i: None,
                    graph_j: None,
                    spec: Some(two_block_swap_spec(npb, alpha)?),
                    data: None,
                    inits: swap_inits(npb),
                    accuracy_core: None,
                });
            }
        }
        ExperimentKind::Figure2NSweep => {
            let alpha = config.alpha[0];
            for (index, &npb) in config.n_per_block.iter().enumerate() {
                grid.push(GridPoint {
                    index,
                    alpha: Some(alpha),
                    p: None,
                    rho: None,
                    q_noise: None,
                    n_core: None,
                    n_junk: None,
                    graph_i: None,
                    graph_j: None,
                    spec: Some(two_block_swap_spec(npb, alpha)?),
                    data: None,
                    inits: swap_inits(npb),
                    accuracy_core: None,
                });
            }
        }
        ExperimentKind::CenterCost => {
            let mut index = 0;
            for &p in &config.p {
                for &rho in &config.rho {
                    grid.push(GridPoint {
                        index,
                        alpha: None,
                        p: Some(p),
                        rho: Some(rho),
                        q_noise: None,
                        n_core: None,
                        n_junk: None,
                        graph_i: None,
                        graph_j: None,
                        spec: Some(homogeneous_spec(config.n, p, rho)),
                        data: None,
                        inits: identity_init(config.n),
                        accuracy_core: None,
                    });
                    index += 1;
                }
            }
        }
        ExperimentKind::CoreJunk => {
            for (index, &n_junk) in config.n_junk.iter().enumerate() {
                let spec = core_junk_spec(config.n_core, n_junk)?;
                let n = spec.n();
                grid.push(GridPoint {
                    index,
                    alpha: None,
                    p: None,
                    rho: None,
                    q_noise: None,
                    n_core: Some(config.n_core),
                    n_junk: Some(n_junk),
                    graph_i: None,
                    graph_j: None,
                    spec: Some(spec),
                    data: None,
                    inits: identity_init(n),
                    accuracy_core: Some(config.n_core),
                });
            }
        }
        ExperimentKind::NoiseInjection => {
            let data = if config.graphs.is_empty() {
                None
            } else {
                let a = load_graph(&config.graphs[0], config.weighted, None)?;
                let b = if config.graphs.len() > 1 {
                    load_graph(&config.graphs[1], config.weighted, Some(a.nrows()))?
                } else {
                    a.clone()
                };
                Some((a, b))
            };
            let n = data.as_ref().map(|(a, _)| a.nrows()).unwrap_or(config.n);
            for (index, &q_noise) in config.q_noise.iter().enumerate() {
                grid.push(GridPoint {
                    index,
                    alpha: None,
                    p: Some(config.p[0]),
                    rho: Some(config.rho[0]),
                    q_noise: Some(q_noise),
                    n_core: None,
                    n_junk: None,
                    graph_i: None,
                    graph_j: None,
                    spec: if data.is_none() {
                        Some(homogeneous_spec(config.n, config.p[0], config.rho[0]))
                    } else {
                        None
                    },
                    data: data.clone(),
                    inits: identity_init(n),
                    accuracy_core: None,
                });
            }
        }
        ExperimentKind::PairwiseMatrix => {
            let mut loaded = Vec::new();
            let mut n0 = None;
            for path in &config.graphs {
                let g = load_graph(path, config.weighted, n0)?;
                n0 = Some(g.nrows());
                loaded.push(g);
            }
            let mut index = 0;
            for i in 0..loaded.len() {
                for j in (i + 1)..loaded.len() {
                    grid.push(GridPoint {
                        index,
                        alpha: None,
                        p: None,
                        rho: None,
                        q_noise: None,
                        n_core: None,
                        n_junk: None,
                        graph_i: Some(i),
                        graph_j: Some(j),
                        spec: None,
                        data: Some((loaded[i].clone(), loaded[j].clone())),
                        inits: identity_init(loaded[i].nrows()),
                        accuracy_core: None,
                    });
                    index += 1;
                }
            }
        }
    }
    Ok(grid)
}

/// USVT options for one graph of a task: threshold scale from the model
/// marginals when available, otherwise from the empirical density.
fn usvt_options_for(
    config: &ExperimentConfig,
    marginal: Option<&ProbMatrix>,
    graph: &Array2<f64>,
) -> UsvtOptions {
    let n = graph.nrows();
    let sampled = marginal.is_some();
    let clip = config.usvt_clip.unwrap_or(sampled || !config.weighted);
    let hollow = config.usvt_hollow.unwrap_or(sampled);
    let rule = if let Some(k) = config.usvt_elbows {
        ThresholdRule::Elbow { n_elbows: k }
    } else {
        let max_entry = match marginal {
            Some(q) => q.max_off_diagonal(),
            None => {
                // Empirical density as the probability scale for 0/1 data.
                let total: f64 = graph.iter().sum();
                (total / (n.max(2) as f64 * (n.max(2) as f64 - 1.0))).clamp(0.0, 1.0)
            }
        };
        let r_hat = match config.usvt_rate {
            RateRule::VarianceProxy => (max_entry * (1.0 - max_entry)).max(1e-6),
            RateRule::MaxEntry => max_entry.max(1e-6),
            RateRule::One => 1.0,
            RateRule::Fixed(v) => v,
        };
        ThresholdRule::Explicit(scaled_threshold(n, r_hat, config.usvt_a))
    };
    UsvtOptions {
        threshold_rule: rule,
        clip_to_unit: clip,
        hollow_output: hollow,
    }
}

fn match_with_best_init(
    xa: &Array2<f64>,
    xb: &Array2<f64>,
    inits: &[(String, Permutation)],
    config: &ExperimentConfig,
    task_seed: u64,
    arm_index: usize,
) -> Result<(MatchResult, String)> {
    let mut best: Option<(MatchResult, String)> = None;
    for (k, (label, p0)) in inits.iter().enumerate() {
        let opts = MatchOptions {
            max_iters: config.max_iters,
            rel_tol: config.rel_tol,
            init: Init::Permutation(p0.clone()),
            restarts: config.restarts,
            seed: derive(task_seed, &[STREAM_MATCH, arm_index as u64, k as u64]),
        };
        let result = faq_match(&xa.view(), &xb.view(), &opts)?;
        best = Some(match best {
            None => (result, label.clone()),
            Some(current) => {
                if result.objective < current.0.objective {
                    (result, label.clone())
                } else {
                    current
                }
            }
        });
    }
    Ok(best.expect("at least one init"))
}

fn run_task(
    config: &ExperimentConfig,
    point: &GridPoint,
    replicate: usize,
) -> Result<Vec<ExperimentRow>> {
    let task_seed = derive(config.seed, &[STREAM_TASK, point.index as u64, replicate as u64]);
    let started = Instant::now();

    // Obtain the pair to match.
    let (a, b) = match (&point.spec, &point.data) {
        (Some(spec), None) => {
            let pair = spec.sample_pair(task_seed)?;
            (pair.a, pair.b)
        }
        (None, Some((a, b))) | (Some(_), Some((a, b))) => (a.clone(), b.clone()),
        (None, None) => unreachable!("grid point without spec or data"),
    };

    // Noise injection perturbs the second graph on a random subset.
    let b = if let Some(q_noise) = point.q_noise {
        let n = b.nrows();
        let mut rng = SplitMix64::substream(task_seed, &[STREAM_SUBSET]);
        let subset: Vec<usize> = rng
            .random_permutation(n)
            .into_iter()
            .take(config.noise_subset.min(n))
            .collect();
        inject_block_noise(&b.view(), &subset, q_noise, derive(task_seed, &[STREAM_SUBSET, 1]))?
    } else {
        b
    };

    let truth = Permutation::identity(a.nrows());
    let mut rows = Vec::with_capacity(config.centering.len());

    for (arm_index, &centering) in config.centering.iter().enumerate() {
        let (xa, xb) = match centering {
            Centering::None => (a.clone(), b.clone()),
            Centering::Oracle => {
                let spec = point.spec.as_ref().ok_or_else(|| {
                    Error::Config("oracle centering needs a sampled model".into())
                })?;
                (
                    center(&a.view(), &spec.q1.hollow_expectation().view())?,
                    center(&b.view(), &spec.q2.hollow_expectation().view())?,
                )
            }
            Centering::Usvt => {
                let (qa, qb) = match &point.spec {
                    Some(spec) => (Some(&spec.q1), Some(&spec.q2)),
                    None => (None, None),
                };
                let opts_a = usvt_options_for(config, qa, &a);
                let opts_b = usvt_options_for(config, qb, &b);
                let est_a = usvt_estimate(&a.view(), &opts_a)?;
                let est_b = usvt_estimate(&b.view(), &opts_b)?;
                (
                    center(&a.view(), &est_a.q_hat.view())?,
                    center(&b.view(), &est_b.q_hat.view())?,
                )
            }
        };
        let (result, init_label) =
            match_with_best_init(&xa, &xb, &point.inits, config, task_seed, arm_index)?;
        let acc = accuracy(&result.permutation, &truth, point.accuracy_core);
        rows.push(ExperimentRow {
            experiment: config.experiment,
            n: a.nrows(),
            alpha: point.alpha,
            p: point.p,
            rho: point.rho,
            q_noise: point.q_noise,
            n_core: point.n_core,
            n_junk: point.n_junk,
            graph_i: point.graph_i,
            graph_j: point.graph_j,
            replicate,
            centering,
            init_label,
            accuracy: acc,
            objective: result.objective,
            runtime_ms: started.elapsed().as_secs_f64() * 1e3,
            seed: task_seed,
        });
    }
    Ok(rows)
}

/// Runs the configured experiment and writes the row CSV (plus a sibling
/// `<out>.summary.csv`). Rows computed before an error are flushed first.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    config.validate()?;
    let grid = build_grid(config)?;
    let tasks: Vec<(usize, usize)> = grid
        .iter()
        .flat_map(|point| (0..config.replicates).map(move |r| (point.index, r)))
        .collect();

    let results: Vec<Result<Vec<ExperimentRow>>> = tasks
        .par_iter()
        .map(|&(grid_index, replicate)| run_task(config, &grid[grid_index], replicate))
        .collect();

    let mut rows = Vec::with_capacity(results.len() * config.centering.len());
    let mut failure = None;
    for result in results {
        match result {
            Ok(mut task_rows) => rows.append(&mut task_rows),
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }

    write_rows_csv(&config.out, &rows)?;
    if let Some(e) = failure {
        return Err(e);
    }
    let summary = summarize(&rows)?;
    write_summary_csv(&summary_path(&config.out), &summary)?;
    Ok(rows)
}

/// `results.csv -> results.summary.csv`.
pub fn summary_path(out: &Path) -> std::path::PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "experiment".to_string());
    out.with_file_name(format!("{stem}.summary.csv"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::ExperimentKind;

    #[test]
    fn two_block_spec_matches_parameters() {
        let spec = two_block_swap_spec(3, 1.0).unwrap();
        assert_eq!(spec.n(), 6);
        assert_eq!(spec.q1.entries[[0, 1]], 0.8);
        assert_eq!(spec.q2.entries[[0, 1]], 0.2);
        assert_eq!(spec.q1.entries[[4, 5]], 0.2);
        assert_eq!(spec.q2.entries[[4, 5]], 0.8);
        assert_eq!(spec.q1.entries[[0, 4]], 0.1);
        assert_eq!(spec.r[[0, 1]], 0.25);
        assert_eq!(spec.r[[0, 4]], 0.3);
        assert!(spec.validate().is_empty());

        let damped = two_block_swap_spec(3, 0.75).unwrap();
        assert!((damped.r[[0, 1]] - 0.1875).abs() < 1e-12);
    }

    #[test]
    fn core_junk_spec_shape() {
        let spec = core_junk_spec(6, 4).unwrap();
        assert_eq!(spec.n(), 10);
        assert_eq!(spec.n_core, 6);
        assert!(spec.validate().is_empty());
        // Core blocks carry correlation, junk rows do not.
        assert_eq!(spec.r[[0, 1]], 0.25);
        assert!(spec.r[[0, 3]] > 0.0);
        for v in 0..10 {
            if v != 7 {
                assert_eq!(spec.r[[7, v]], 0.0);
            }
        }
        // Junk marginals keep the swap heterogeneity.
        assert_eq!(spec.q1.entries[[6, 7]], 0.8);
        assert_eq!(spec.q2.entries[[6, 7]], 0.2);
        assert_eq!(spec.q1.entries[[8, 9]], 0.2);
        assert_eq!(spec.q2.entries[[8, 9]], 0.8);
    }

    #[test]
    fn summarize_examples() {
        let mk = |accuracy: f64, centering: Centering, replicate: usize| ExperimentRow {
            experiment: ExperimentKind::CenterCost,
            n: 10,
            alpha: None,
            p: Some(0.5),
            rho: Some(0.5),
            q_noise: None,
            n_core: None,
            n_junk: None,
            graph_i: None,
            graph_j: None,
            replicate,
            centering,
            init_label: "identity".into(),
            accuracy,
            objective: 1.0,
            runtime_ms: 0.0,
            seed: 0,
        };
        let single = summarize(&[mk(0.7, Centering::None, 0)]).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].count, 1);
        assert_eq!(single[0].sd_accuracy, 0.0);

        let two = summarize(&[mk(0.4, Centering::None, 0), mk(0.6, Centering::None, 1)]).unwrap();
        assert_eq!(two.len(), 1);
        assert!((two[0].mean_accuracy - 0.5).abs() < 1e-12);
        assert!((two[0].sd_accuracy - 0.1414).abs() < 1e-3);

        // Different centering arms never pool.
        let split = summarize(&[mk(0.4, Centering::None, 0), mk(0.6, Centering::Usvt, 0)]).unwrap();
        assert_eq!(split.len(), 2);

        assert!(summarize(&[]).is_err());
    }

    #[test]
    fn small_center_cost_run_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = ExperimentConfig::defaults(ExperimentKind::CenterCost);
        config.p = vec![0.5];
        config.rho = vec![0.8];
        config.n = 24;
        config.replicates = 3;
        config.seed = 11;
        config.out = dir.path().join("cc.csv");
        let rows1 = run_experiment(&config).unwrap();
        let bytes1 = std::fs::read(&config.out).unwrap();
        let rows2 = run_experiment(&config).unwrap();
        let bytes2 = std::fs::read(&config.out).unwrap();
        assert_eq!(bytes1, bytes2);
        assert_eq!(rows1.len(), rows2.len());
        assert_eq!(rows1.len(), 3 * 2); // replicates x centering arms
        for row in &rows1 {
            assert!((0.0..=1.0).contains(&row.accuracy));
        }
        assert!(summary_path(&config.out).exists());
    }

    #[test]
    fn noise_injection_grid_runs_and_labels_rows() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = ExperimentConfig::defaults(ExperimentKind::NoiseInjection);
        config.n = 30;
        config.noise_subset = 10;
        config.p = vec![0.3];
        config.rho = vec![0.9];
        config.q_noise = vec![0.0, 0.8];
        config.replicates = 2;
        config.seed = 77;
        config.out = dir.path().join("noise.csv");
        let rows = run_experiment(&config).unwrap();
        assert_eq!(rows.len(), 2 * 2 * 2); // grid x replicates x arms
        assert!(rows.iter().all(|r| r.q_noise.is_some()));
        // With no injected noise and strong correlation, the uncentered arm
        // recovers the truth; heavy noise on a third of the vertices hurts.
        let clean = rows
            .iter()
            .filter(|r| r.q_noise == Some(0.0) && r.centering == Centering::None)
            .map(|r| r.accuracy)
            .sum::<f64>()
            / 2.0;
        assert!(clean > 0.9, "clean accuracy {clean}");
    }

    #[test]
    fn replicate_prefix_is_stable() {
        // Same single grid point: the first rows of a longer run equal the
        // rows of a shorter run (per-replicate seeds do not depend on the
        // replicate count).
        let dir = tempfile::tempdir().unwrap();
        let mut config = ExperimentConfig::defaults(ExperimentKind::CenterCost);
        config.p = vec![0.5];
        config.rho = vec![0.9];
        config.n = 20;
        config.replicates = 2;
        config.seed = 5;
        config.out = dir.path().join("short.csv");
        run_experiment(&config).unwrap();
        let short = std::fs::read_to_string(&config.out).unwrap();

        config.replicates = 4;
        config.out = dir.path().join("long.csv");
        run_experiment(&config).unwrap();
        let long = std::fs::read_to_string(&config.out).unwrap();

        let short_lines: Vec<&str> = short.lines().collect();
        let long_lines: Vec<&str> = long.lines().collect();
        assert_eq!(&long_lines[..short_lines.len()], &short_lines[..]);
    }
}
