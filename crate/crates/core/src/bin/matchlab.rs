//! Command-line front end: sample correlated graph pairs, run USVT
//! estimates, match graph pairs, query the exact small-n oracle, and run the
//! seeded Monte-Carlo experiments.

use std::path::PathBuf;
use std::process::ExitCode;

use matchlab::assignment::Permutation;
use matchlab::corr_er::CorrSpec;
use matchlab::error::Error;
use matchlab::faq::{faq_match, Init, MatchOptions};
use matchlab::harness::{
    self, load_graph, run_experiment, summary_path, two_block_swap_spec, ExperimentConfig,
    ExperimentKind,
};
use matchlab::matchability::{brute_force_gmp, Flavor};
use matchlab::usvt::{usvt_estimate, ThresholdRule, UsvtOptions};

const USAGE: &str = "\
matchlab — correlated graph pairs, USVT centering, Frank-Wolfe matching

USAGE:
  matchlab <SUBCOMMAND> [FLAGS]

SUBCOMMANDS:
  sample      Sample a correlated graph pair and write edge lists
  usvt        Estimate an edge-probability matrix by singular value thresholding
  match       Match two graphs with the Frank-Wolfe relaxation
  oracle      Exact small-n matchability (exhaustive enumeration, n <= 8)
  experiment  Run a seeded Monte-Carlo experiment and write CSV

Global flags: --help

sample:
  --n <int>              vertices (homogeneous model), or
  --n-per-block <int>    two-block benchmark size (with --two-block)
  --two-block            use the heterogeneous two-block benchmark
  --alpha <f>            correlation scale for --two-block (default 1.0)
  --p <f> --q <f>        marginal densities (default 0.5, 0.5)
  --rho <f>              edge correlation (default 0.6)
  --seed <u64>           sample seed (default 1)
  --out-a <path> --out-b <path>   output edge lists (required)

usvt:
  --in <path>            input edge list (required)
  --weighted             read weights; duplicates sum
  --n <int>              vertex-count hint
  --threshold <f>        explicit cutoff, or
  --scaled-a <f> --rate <varprox|maxent|one|f>   scaled rule, or
  --elbows <int>         profile-likelihood elbow rule
  --no-clip --no-hollow  disable [0,1] clipping / diagonal zeroing
  --out <path>           write the dense estimate as CSV

match:
  --in-a <path> --in-b <path>   input edge lists (required)
  --weighted             read weights
  --n <int>              vertex-count hint
  --centering <none|usvt>       (default none)
  --threshold <f> | --scaled-a <f> --rate <...> | --elbows <int>
  --init <identity|barycenter|random>   (default barycenter)
  --restarts <int>       total starts (default 1)
  --seed <u64>           restart stream seed (default 0)
  --max-iters <int> --rel-tol <f>
  --out <path>           write the permutation (line i = image of i)

oracle:
  --in-a <path> --in-b <path>   input edge lists (required), n <= 8
  --weighted --n <int>
  --budget <int>         label budget for the moves-at-most verdict (default n/2)
  --core <int>           core size for the core verdict (default n)

experiment:
  --config <path>        key = value config file ('experiment = <kind>' first)
  --experiment <kind>    start from built-in defaults instead of a file
  --threads <int>        worker threads (default: all cores)
  --<key> <value>        override any config key (seed, out, replicates,
                         alpha, n_per_block, p, rho, n, n_core, n_junk,
                         q_noise, noise_subset, graphs, weighted, centering,
                         usvt_a, usvt_rate, usvt_elbows, usvt_clip,
                         usvt_hollow, max_iters, rel_tol, restarts)
  Kinds: center_cost, figure1_alpha_sweep, figure2_n_sweep, core_junk,
         noise_injection, pairwise_matrix
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() || args[0] == "--help" || args[0] == "-h" {
        print!("{USAGE}");
        return ExitCode::SUCCESS;
    }
    let result = match args[0].as_str() {
        "sample" => cmd_sample(&args[1..]),
        "usvt" => cmd_usvt(&args[1..]),
        "match" => cmd_match(&args[1..]),
        "oracle" => cmd_oracle(&args[1..]),
        "experiment" => cmd_experiment(&args[1..]),
        other => Err(Error::InvalidArgument(format!(
            "unknown subcommand '{other}' (try --help)"
        ))),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Tiny flag cursor over the raw argument list.
struct Flags<'a> {
    args: &'a [String],
    pos: usize,
}

impl<'a> Flags<'a> {
    fn new(args: &'a [String]) -> Self {
        Self { args, pos: 0 }
    }

    fn next_flag(&mut self) -> Option<&'a str> {
        if self.pos >= self.args.len() {
            return None;
        }
        let flag = self.args[self.pos].as_str();
        self.pos += 1;
        Some(flag)
    }

    fn value(&mut self, flag: &str) -> Result<&'a str, Error> {
        if self.pos >= self.args.len() {
            return Err(Error::InvalidArgument(format!("missing value for {flag}")));
        }
        let v = self.args[self.pos].as_str();
        self.pos += 1;
        Ok(v)
    }

    fn parse<T: std::str::FromStr>(&mut self, flag: &str) -> Result<T, Error> {
        let raw = self.value(flag)?;
        raw.parse::<T>()
            .map_err(|_| Error::InvalidArgument(format!("invalid value '{raw}' for {flag}")))
    }
}

fn require<T>(opt: Option<T>, flag: &str) -> Result<T, Error> {
    opt.ok_or_else(|| Error::InvalidArgument(format!("{flag} is required")))
}

fn cmd_sample(args: &[String]) -> Result<(), Error> {
    let mut n: usize = 100;
    let mut n_per_block: usize = 150;
    let mut two_block = false;
    let mut alpha = 1.0;
    let mut p = 0.5;
    let mut q = 0.5;
    let mut rho = 0.6;
    let mut seed: u64 = 1;
    let mut out_a: Option<PathBuf> = None;
    let mut out_b: Option<PathBuf> = None;

    let mut flags = Flags::new(args);
    while let Some(flag) = flags.next_flag() {
        match flag {
            "--n" => n = flags.parse(flag)?,
            "--n-per-block" => n_per_block = flags.parse(flag)?,
            "--two-block" => two_block = true,
            "--alpha" => alpha = flags.parse(flag)?,
            "--p" => p = flags.parse(flag)?,
            "--q" => q = flags.parse(flag)?,
            "--rho" => rho = flags.parse(flag)?,
            "--seed" => seed = flags.parse(flag)?,
            "--out-a" => out_a = Some(PathBuf::from(flags.value(flag)?)),
            "--out-b" => out_b = Some(PathBuf::from(flags.value(flag)?)),
            other => return Err(Error::InvalidArgument(format!("unknown flag {other}"))),
        }
    }
    let out_a = require(out_a, "--out-a")?;
    let out_b = require(out_b, "--out-b")?;

    let spec = if two_block {
        two_block_swap_spec(n_per_block, alpha)?
    } else {
        CorrSpec::homogeneous(n, p, q, rho)
    };
    let violations = spec.validate();
    if !violations.is_empty() {
        return Err(Error::InvalidSpec(violations));
    }
    let pair = spec.sample_pair(seed)?;
    harness::write_edge_list(&out_a, &pair.a.view(), false)?;
    harness::write_edge_list(&out_b, &pair.b.view(), false)?;
    println!(
        "sampled pair: n = {}, edges_a = {}, edges_b = {}, seed = {}",
        pair.n(),
        pair.a.sum() / 2.0,
        pair.b.sum() / 2.0,
        seed
    );
    Ok(())
}

struct UsvtFlags {
    threshold: Option<f64>,
    scaled_a: Option<f64>,
    rate: harness::RateRule,
    elbows: Option<usize>,
    clip: bool,
    hollow: bool,
}

impl UsvtFlags {
    fn new() -> Self {
        Self {
            threshold: None,
            scaled_a: None,
            rate: harness::RateRule::One,
            elbows: None,
            clip: true,
            hollow: true,
        }
    }

    /// Returns true when the flag was consumed.
    fn consume(&mut self, flag: &str, flags: &mut Flags) -> Result<bool, Error> {
        match flag {
            "--threshold" => self.threshold = Some(flags.parse(flag)?),
            "--scaled-a" => self.scaled_a = Some(flags.parse(flag)?),
            "--rate" => self.rate = harness::RateRule::parse(flags.value(flag)?)?,
            "--elbows" => self.elbows = Some(flags.parse(flag)?),
            "--no-clip" => self.clip = false,
            "--no-hollow" => self.hollow = false,
            _ => return Ok(false),
        }
        Ok(true)
    }

    fn options(&self, graph: &ndarray::Array2<f64>) -> Result<UsvtOptions, Error> {
        let rule = if let Some(k) = self.elbows {
            ThresholdRule::Elbow { n_elbows: k }
        } else if let Some(t) = self.threshold {
            ThresholdRule::Explicit(t)
        } else {
            let a = self.scaled_a.unwrap_or(2.0);
            let n = graph.nrows();
            let r_hat = match self.rate {
                harness::RateRule::One => 1.0,
                harness::RateRule::Fixed(v) => v,
                harness::RateRule::MaxEntry | harness::RateRule::VarianceProxy => {
                    let density = graph.iter().sum::<f64>()
                        / (n.max(2) as f64 * (n.max(2) as f64 - 1.0));
                    let m = density.clamp(0.0, 1.0);
                    if self.rate == harness::RateRule::MaxEntry {
                        m.max(1e-6)
                    } else {
                        (m * (1.0 - m)).max(1e-6)
                    }
                }
            };
            ThresholdRule::Explicit(matchlab::usvt::scaled_threshold(n, r_hat, a))
        };
        Ok(UsvtOptions {
            threshold_rule: rule,
            clip_to_unit: self.clip,
            hollow_output: self.hollow,
        })
    }
}

fn cmd_usvt(args: &[String]) -> Result<(), Error> {
    let mut input: Option<PathBuf> = None;
    let mut weighted = false;
    let mut n_hint: Option<usize> = None;
    let mut out: Option<PathBuf> = None;
    let mut usvt = UsvtFlags::new();

    let mut flags = Flags::new(args);
    while let Some(flag) = flags.next_flag() {
        if usvt.consume(flag, &mut flags)? {
            continue;
        }
        match flag {
            "--in" => input = Some(PathBuf::from(flags.value(flag)?)),
            "--weighted" => weighted = true,
            "--n" => n_hint = Some(flags.parse(flag)?),
            "--out" => out = Some(PathBuf::from(flags.value(flag)?)),
            other => return Err(Error::InvalidArgument(format!("unknown flag {other}"))),
        }
    }
    let input = require(input, "--in")?;
    if weighted {
        usvt.clip = false;
        usvt.hollow = false;
    }

    let graph = load_graph(&input, weighted, n_hint)?;
    let opts = usvt.options(&graph)?;
    let est = usvt_estimate(&graph.view(), &opts)?;
    println!(
        "usvt: n = {}, retained_rank = {}, threshold = {:.6}",
        graph.nrows(),
        est.retained_rank,
        est.threshold_used
    );
    let top: Vec<String> = est
        .singular_values
        .iter()
        .take(8)
        .map(|s| format!("{s:.4}"))
        .collect();
    println!("top singular values: {}", top.join(", "));
    if let Some(out) = out {
        harness::write_dense_csv(&out, &est.q_hat.view())?;
        println!("wrote estimate to {}", out.display());
    }
    Ok(())
}

fn cmd_match(args: &[String]) -> Result<(), Error> {
    let mut in_a: Option<PathBuf> = None;
    let mut in_b: Option<PathBuf> = None;
    let mut weighted = false;
    let mut n_hint: Option<usize> = None;
    let mut centering = "none".to_string();
    let mut init = "barycenter".to_string();
    let mut restarts: usize = 1;
    let mut seed: u64 = 0;
    let mut max_iters: usize = 30;
    let mut rel_tol: f64 = 1e-6;
    let mut out: Option<PathBuf> = None;
    let mut usvt = UsvtFlags::new();

    let mut flags = Flags::new(args);
    while let Some(flag) = flags.next_flag() {
        if usvt.consume(flag, &mut flags)? {
            continue;
        }
        match flag {
            "--in-a" => in_a = Some(PathBuf::from(flags.value(flag)?)),
            "--in-b" => in_b = Some(PathBuf::from(flags.value(flag)?)),
            "--weighted" => weighted = true,
            "--n" => n_hint = Some(flags.parse(flag)?),
            "--centering" => centering = flags.value(flag)?.to_string(),
            "--init" => init = flags.value(flag)?.to_string(),
            "--restarts" => restarts = flags.parse(flag)?,
            "--seed" => seed = flags.parse(flag)?,
            "--max-iters" => max_iters = flags.parse(flag)?,
            "--rel-tol" => rel_tol = flags.parse(flag)?,
            "--out" => out = Some(PathBuf::from(flags.value(flag)?)),
            other => return Err(Error::InvalidArgument(format!("unknown flag {other}"))),
        }
    }
    let in_a = require(in_a, "--in-a")?;
    let in_b = require(in_b, "--in-b")?;
    if weighted {
        usvt.clip = false;
        usvt.hollow = false;
    }

    let a = load_graph(&in_a, weighted, n_hint)?;
    let b = load_graph(&in_b, weighted, Some(a.nrows()))?;

    let (xa, xb) = match centering.as_str() {
        "none" => (a.clone(), b.clone()),
        "usvt" => {
            let est_a = usvt_estimate(&a.view(), &usvt.options(&a)?)?;
            let est_b = usvt_estimate(&b.view(), &usvt.options(&b)?)?;
            (
                matchlab::usvt::center(&a.view(), &est_a.q_hat.view())?,
                matchlab::usvt::center(&b.view(), &est_b.q_hat.view())?,
            )
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown centering '{other}' (none | usvt)"
            )))
        }
    };

    let init = match init.as_str() {
        "identity" => Init::Permutation(Permutation::identity(a.nrows())),
        "barycenter" => Init::Barycenter,
        "random" => Init::RandomDs(seed),
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown init '{other}' (identity | barycenter | random)"
            )))
        }
    };
    let opts = MatchOptions {
        max_iters,
        rel_tol,
        init,
        restarts,
        seed,
    };
    let result = faq_match(&xa.view(), &xb.view(), &opts)?;
    let correct = result
        .permutation
        .image()
        .iter()
        .enumerate()
        .filter(|(i, &v)| *i == v)
        .count();
    println!(
        "match: n = {}, objective = {:.6}, trace_objective = {:.6}",
        a.nrows(),
        result.objective,
        result.trace_objective
    );
    println!(
        "iterations = {}, converged = {}, init = {}, fixed_points = {}/{}",
        result.iterations,
        result.converged,
        result.init_label,
        correct,
        a.nrows()
    );
    if let Some(out) = out {
        let body: String = result
            .permutation
            .image()
            .iter()
            .map(|v| format!("{v}\n"))
            .collect();
        std::fs::write(&out, body)?;
        println!("wrote permutation to {}", out.display());
    }
    Ok(())
}

fn cmd_oracle(args: &[String]) -> Result<(), Error> {
    let mut in_a: Option<PathBuf> = None;
    let mut in_b: Option<PathBuf> = None;
    let mut weighted = false;
    let mut n_hint: Option<usize> = None;
    let mut budget: Option<usize> = None;
    let mut core: Option<usize> = None;

    let mut flags = Flags::new(args);
    while let Some(flag) = flags.next_flag() {
        match flag {
            "--in-a" => in_a = Some(PathBuf::from(flags.value(flag)?)),
            "--in-b" => in_b = Some(PathBuf::from(flags.value(flag)?)),
            "--weighted" => weighted = true,
            "--n" => n_hint = Some(flags.parse(flag)?),
            "--budget" => budget = Some(flags.parse(flag)?),
            "--core" => core = Some(flags.parse(flag)?),
            other => return Err(Error::InvalidArgument(format!("unknown flag {other}"))),
        }
    }
    let in_a = require(in_a, "--in-a")?;
    let in_b = require(in_b, "--in-b")?;

    let a = load_graph(&in_a, weighted, n_hint)?;
    let b = load_graph(&in_b, weighted, Some(a.nrows()))?;
    let n = a.nrows();
    let budget = budget.unwrap_or(n / 2);
    let core = core.unwrap_or(n);

    let gmp = brute_force_gmp(&a.view(), &b.view())?;
    println!(
        "oracle: n = {n}, optimum = {:.6}, argmin size = {}",
        gmp.objective,
        gmp.argmin.len()
    );
    for (k, p) in gmp.argmin.iter().enumerate().take(20) {
        println!("  argmin[{k}] = {:?} (moves {})", p.image(), p.moved_count());
    }
    if gmp.argmin.len() > 20 {
        println!("  ... {} total", gmp.argmin.len());
    }
    for (label, flavor) in [
        ("exact", Flavor::Exact),
        ("moves_at_most", Flavor::MovesAtMost(budget)),
        ("core", Flavor::Core(core)),
    ] {
        let verdict = matchlab::matchability::is_matchable(&a.view(), &b.view(), flavor)?;
        match flavor {
            Flavor::MovesAtMost(k) => println!("{label}({k}): {}", verdict.matchable),
            Flavor::Core(c) => println!("{label}({c}): {}", verdict.matchable),
            Flavor::Exact => println!("{label}: {}", verdict.matchable),
        }
    }
    Ok(())
}

fn cmd_experiment(args: &[String]) -> Result<(), Error> {
    let mut config: Option<ExperimentConfig> = None;
    let mut threads: Option<usize> = None;
    let mut overrides: Vec<(String, String)> = Vec::new();

    let mut flags = Flags::new(args);
    while let Some(flag) = flags.next_flag() {
        match flag {
            "--config" => {
                let path = PathBuf::from(flags.value(flag)?);
                let text = std::fs::read_to_string(&path)?;
                config = Some(ExperimentConfig::from_config_text(&text)?);
            }
            "--experiment" => {
                config = Some(ExperimentConfig::defaults(ExperimentKind::parse(
                    flags.value(flag)?,
                )?));
            }
            "--threads" => threads = Some(flags.parse(flag)?),
            other if other.starts_with("--") => {
                let key = other.trim_start_matches("--").replace('-', "_");
                overrides.push((key, flags.value(other)?.to_string()));
            }
            other => return Err(Error::InvalidArgument(format!("unknown flag {other}"))),
        }
    }
    let mut config = config.ok_or_else(|| {
        Error::InvalidArgument("--config <path> or --experiment <kind> is required".into())
    })?;
    for (key, value) in &overrides {
        config.apply_kv(key, value)?;
    }
    config.validate()?;

    let run = || -> Result<(), Error> {
        let started = std::time::Instant::now();
        let rows = run_experiment(&config)?;
        let total_ms: f64 = rows.iter().map(|r| r.runtime_ms).sum();
        eprintln!(
            "experiment '{}': {} rows in {:.1}s (task time {:.1}s)",
            config.experiment.name(),
            rows.len(),
            started.elapsed().as_secs_f64(),
            total_ms / 1e3
        );
        println!("wrote {}", config.out.display());
        println!("wrote {}", summary_path(&config.out).display());
        Ok(())
    };

    match threads {
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k.max(1))
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            pool.install(run)
        }
        None => run(),
    }
}
