//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured quantities. Run with `cargo test --test acceptance` (add
//! `-- --nocapture` to see the lines for passing criteria).

use matchlab::assignment::Permutation;
use matchlab::corr_er::CorrSpec;
use matchlab::faq::{faq_match, Init, MatchOptions};
use matchlab::harness::{
    run_experiment, two_block_swap_spec, Centering, ExperimentConfig, ExperimentKind,
    ExperimentRow,
};
use matchlab::linalg::frobenius_norm;
use matchlab::matchability::{
    brute_force_gmp, count_pi_n_k, frobenius_concentration_check, moved_pair_count, tau_id,
};
use matchlab::rng::derive;
use matchlab::usvt::{scaled_threshold, usvt_estimate, UsvtOptions};

fn pass(id: u32, name: &str, details: &str) {
    println!("ACCEPTANCE {id:2} {name}: PASS ({details})");
}

fn mean<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let v: Vec<f64> = values.into_iter().collect();
    v.iter().sum::<f64>() / v.len() as f64
}

fn mean_accuracy(rows: &[ExperimentRow], select: impl Fn(&ExperimentRow) -> bool) -> f64 {
    let selected: Vec<f64> = rows
        .iter()
        .filter(|r| select(r))
        .map(|r| r.accuracy)
        .collect();
    assert!(!selected.is_empty(), "no rows matched the selection");
    mean(selected)
}

/// Criterion 1: the two-block benchmark's expected-objective gap for the
/// block interchange has leading coefficient 0.113 in the block size,
/// exactly, and the exact gap at 50 per block clears 0.113 n^2 - 5 n.
#[test]
fn c01_expected_trace_gap_constant() {
    let gap = |n_per_block: usize| -> f64 {
        let spec = two_block_swap_spec(n_per_block, 1.0).unwrap();
        let swap = Permutation::block_swap(n_per_block);
        let identity = Permutation::identity(2 * n_per_block);
        spec.expected_trace(&swap) - spec.expected_trace(&identity)
    };
    // gap(n) is a quadratic c n^2 + b n, so c = (gap(2n) - 2 gap(n)) / (2 n^2).
    let n = 50usize;
    let coefficient = (gap(2 * n) - 2.0 * gap(n)) / (2.0 * (n * n) as f64);
    assert!(
        (coefficient - 0.113).abs() < 1e-9,
        "leading coefficient {coefficient} is not 0.113"
    );
    let g = gap(n);
    let floor = 0.113 * (n * n) as f64 - 5.0 * n as f64;
    assert!(g >= floor, "gap {g} below {floor}");
    pass(
        1,
        "expected-trace gap constant",
        &format!("coefficient = {coefficient:.12}, gap(50) = {g:.3} >= {floor}"),
    );
}

/// Criterion 2: one seeded sample at n = 200, p = q = 0.5, rho = 0.6 has
/// empirical pair correlation within 0.6 +/- 0.02 and densities within
/// 0.5 +/- 0.015.
#[test]
fn c02_sampler_fidelity() {
    let spec = CorrSpec::homogeneous(200, 0.5, 0.5, 0.6);
    let pair = spec.sample_pair(2).unwrap();
    let n = 200usize;
    let mut xs = Vec::with_capacity(n * (n - 1) / 2);
    let mut ys = Vec::with_capacity(n * (n - 1) / 2);
    for u in 0..n {
        for v in (u + 1)..n {
            xs.push(pair.a[[u, v]]);
            ys.push(pair.b[[u, v]]);
        }
    }
    let count = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / count;
    let mean_y = ys.iter().sum::<f64>() / count;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (x, y) in xs.iter().zip(ys.iter()) {
        cov += (x - mean_x) * (y - mean_y);
        var_x += (x - mean_x) * (x - mean_x);
        var_y += (y - mean_y) * (y - mean_y);
    }
    let corr = cov / (var_x.sqrt() * var_y.sqrt());
    assert!(
        (corr - 0.6).abs() <= 0.02,
        "empirical correlation {corr} outside 0.6 +/- 0.02"
    );
    assert!(
        (mean_x - 0.5).abs() <= 0.015,
        "density of A {mean_x} outside 0.5 +/- 0.015"
    );
    assert!(
        (mean_y - 0.5).abs() <= 0.015,
        "density of B {mean_y} outside 0.5 +/- 0.015"
    );
    pass(
        2,
        "sampler fidelity",
        &format!("corr = {corr:.4}, densities = ({mean_x:.4}, {mean_y:.4})"),
    );
}

/// Criterion 3: USVT relative error on the two-block benchmark at n = 300
/// (threshold 2.01 sqrt(48), 20 seeds) is at most 0.2 and strictly below the
/// n = 100 value.
#[test]
fn c03_usvt_accuracy() {
    let relative_error = |n_per_block: usize| -> f64 {
        let spec = two_block_swap_spec(n_per_block, 1.0).unwrap();
        let n = 2 * n_per_block;
        let t = scaled_threshold(n, 0.8 * 0.2, 2.01);
        let expectation = spec.q1.hollow_expectation();
        let denom = frobenius_norm(&expectation.view());
        mean((0..20u64).map(|seed| {
            let pair = spec.sample_pair(derive(0xC3, &[seed])).unwrap();
            let est = usvt_estimate(&pair.a.view(), &UsvtOptions::explicit(t)).unwrap();
            frobenius_norm(&(&est.q_hat - &expectation).view()) / denom
        }))
    };
    let err_300 = relative_error(150);
    let err_100 = relative_error(50);
    assert!(err_300 <= 0.2, "relative error at n = 300 is {err_300}");
    assert!(
        err_300 < err_100,
        "no decay: {err_300} at n = 300 vs {err_100} at n = 100"
    );
    pass(
        3,
        "usvt accuracy",
        &format!("mean rel err: {err_300:.4} (n = 300) < {err_100:.4} (n = 100)"),
    );
}

/// Criterion 4: on 50 seeded instances at n = 6 (p = 0.5, rho = 0.8), the
/// matcher with 20 restarts attains the exhaustive optimum in at least 80%
/// of instances and is never below it.
#[test]
fn c04_oracle_equivalence() {
    let spec = CorrSpec::homogeneous(6, 0.5, 0.5, 0.8);
    let mut attained = 0usize;
    for instance in 0..50u64 {
        let pair = spec.sample_pair(derive(0xC4, &[instance])).unwrap();
        let exact = brute_force_gmp(&pair.a.view(), &pair.b.view()).unwrap();
        let opts = MatchOptions {
            max_iters: 30,
            rel_tol: 1e-6,
            init: Init::Barycenter,
            restarts: 20,
            seed: derive(0xC4, &[instance, 1]),
        };
        let result = faq_match(&pair.a.view(), &pair.b.view(), &opts).unwrap();
        assert!(
            result.objective >= exact.objective - 1e-9,
            "instance {instance}: heuristic {} below exact optimum {}",
            result.objective,
            exact.objective
        );
        if result.objective <= exact.objective + 1e-9 {
            attained += 1;
        }
    }
    assert!(
        attained >= 40,
        "optimum attained in only {attained}/50 instances"
    );
    pass(
        4,
        "oracle equivalence",
        &format!("optimum attained in {attained}/50 instances, never below"),
    );
}

/// Criterion 5: two-block benchmark at n = 150 per block, 20 replicates —
/// uncentered accuracy collapses (< 0.05) while oracle- and USVT-centered
/// means exceed 0.8 at full correlation, and centered accuracy drops as the
/// correlation scale drops to 0.75.
#[test]
fn c05_centering_contrast() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = ExperimentConfig::defaults(ExperimentKind::Figure1AlphaSweep);
    config.alpha = vec![0.75, 1.0];
    config.n_per_block = vec![150];
    config.replicates = 20;
    config.seed = 0xC5;
    config.out = dir.path().join("contrast.csv");
    let rows = run_experiment(&config).unwrap();

    let at = |alpha: f64, centering: Centering| {
        mean_accuracy(&rows, |r| r.alpha == Some(alpha) && r.centering == centering)
    };
    let uncentered = at(1.0, Centering::None);
    let oracle = at(1.0, Centering::Oracle);
    let usvt = at(1.0, Centering::Usvt);
    let oracle_low = at(0.75, Centering::Oracle);
    assert!(uncentered < 0.05, "uncentered mean accuracy {uncentered}");
    assert!(oracle > 0.8, "oracle-centered mean accuracy {oracle}");
    assert!(usvt > 0.8, "usvt-centered mean accuracy {usvt}");
    assert!(
        oracle > oracle_low,
        "no drop-off: {oracle} at alpha 1 vs {oracle_low} at alpha 0.75"
    );
    pass(
        5,
        "centering contrast",
        &format!(
            "uncentered {uncentered:.3}, oracle {oracle:.3}, usvt {usvt:.3}, oracle@0.75 {oracle_low:.3}"
        ),
    );
}

/// Criterion 6: with full correlation, oracle-centered accuracy is strictly
/// increasing across per-block sizes (25, 50, 100, 150) — Spearman
/// correlation of the means with n equal to 1 — and exceeds 0.8 at 150.
#[test]
fn c06_size_trend() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = ExperimentConfig::defaults(ExperimentKind::Figure2NSweep);
    config.alpha = vec![1.0];
    config.n_per_block = vec![25, 50, 100, 150];
    config.centering = vec![Centering::Oracle];
    config.replicates = 20;
    config.seed = 0xC6;
    config.out = dir.path().join("trend.csv");
    let rows = run_experiment(&config).unwrap();

    let means: Vec<f64> = [25usize, 50, 100, 150]
        .iter()
        .map(|&npb| mean_accuracy(&rows, |r| r.n == 2 * npb && r.centering == Centering::Oracle))
        .collect();

    // Spearman rank correlation against the (already sorted) sizes.
    let mut rank_of = vec![0usize; means.len()];
    let mut order: Vec<usize> = (0..means.len()).collect();
    order.sort_by(|&i, &j| means[i].partial_cmp(&means[j]).unwrap());
    for (rank, &idx) in order.iter().enumerate() {
        rank_of[idx] = rank;
    }
    let k = means.len() as f64;
    let d_sq: f64 = rank_of
        .iter()
        .enumerate()
        .map(|(i, &r)| ((i as f64) - (r as f64)).powi(2))
        .sum();
    let spearman = 1.0 - 6.0 * d_sq / (k * (k * k - 1.0));

    assert!(
        (spearman - 1.0).abs() < 1e-12,
        "means {means:?} are not increasing in n (spearman = {spearman})"
    );
    assert!(
        means[3] > 0.8,
        "accuracy at n = 150 per block is {}",
        means[3]
    );
    pass(
        6,
        "size trend",
        &format!("means = {means:?}, spearman = {spearman}"),
    );
}

/// Criterion 7: on the homogeneous model (n = 100), centering by USVT costs
/// at most 0.1 mean accuracy in every cell with rho >= 0.7.
#[test]
fn c07_centering_cost() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = ExperimentConfig::defaults(ExperimentKind::CenterCost);
    config.p = vec![0.1, 0.3, 0.5];
    config.rho = vec![0.5, 0.7, 0.9];
    config.n = 100;
    config.replicates = 20;
    config.seed = 0xC7;
    config.out = dir.path().join("cost.csv");
    let rows = run_experiment(&config).unwrap();

    let mut details = Vec::new();
    for &p in &[0.1, 0.3, 0.5] {
        for &rho in &[0.7, 0.9] {
            let uncentered = mean_accuracy(&rows, |r| {
                r.p == Some(p) && r.rho == Some(rho) && r.centering == Centering::None
            });
            let usvt = mean_accuracy(&rows, |r| {
                r.p == Some(p) && r.rho == Some(rho) && r.centering == Centering::Usvt
            });
            let diff = uncentered - usvt;
            assert!(
                diff.abs() <= 0.1,
                "cell (p = {p}, rho = {rho}): |{uncentered} - {usvt}| > 0.1"
            );
            details.push(format!("({p},{rho}): {diff:+.3}"));
        }
    }
    pass(7, "centering cost", &details.join(" "));
}

/// Criterion 8: in the core-junk benchmark (60 core vertices), USVT-centered
/// core accuracy beats uncentered core accuracy for every junk size.
#[test]
fn c08_core_junk_recovery() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = ExperimentConfig::defaults(ExperimentKind::CoreJunk);
    config.n_core = 60;
    config.n_junk = vec![15, 30, 60];
    config.replicates = 20;
    config.seed = 0xC8;
    config.out = dir.path().join("corejunk.csv");
    let rows = run_experiment(&config).unwrap();

    let mut details = Vec::new();
    for &n_junk in &[15usize, 30, 60] {
        let uncentered = mean_accuracy(&rows, |r| {
            r.n_junk == Some(n_junk) && r.centering == Centering::None
        });
        let usvt = mean_accuracy(&rows, |r| {
            r.n_junk == Some(n_junk) && r.centering == Centering::Usvt
        });
        assert!(
            usvt > uncentered,
            "n_junk = {n_junk}: usvt {usvt} not above uncentered {uncentered}"
        );
        details.push(format!("junk {n_junk}: {usvt:.3} > {uncentered:.3}"));
    }
    pass(8, "core-junk recovery", &details.join(", "));
}

/// Criterion 9: combinatorial exactness — the core-reduction worked example,
/// the displaced-pair formula on all permutations up to n = 7, the
/// permutation-class counts summing to n!, and the centered Frobenius bound
/// on 100/100 seeded samples.
#[test]
fn c09_combinatorial_exactness() {
    // Core-reduction example (core 0..3, junk 4..7).
    let tau = Permutation::new(vec![2, 5, 6, 0, 7, 4, 3, 1]).unwrap();
    assert_eq!(tau_id(&tau, 4).image(), &[0, 1, 2, 3, 7, 4, 6, 5]);

    // moved_pair_count asserts the closed formula and the lower bound
    // internally for every permutation it sees.
    for n in 1..=7usize {
        for image in matchlab::assignment::all_permutations(n) {
            let _ = moved_pair_count(&Permutation::new(image).unwrap());
        }
    }

    for n in 0..=10usize {
        let total: u128 = (0..=n).map(|k| count_pi_n_k(n, k)).sum();
        let factorial: u128 = (1..=n as u128).product();
        assert_eq!(total, factorial, "class counts at n = {n}");
    }

    let spec = two_block_swap_spec(150, 1.0).unwrap();
    let seeds: Vec<u64> = (0..100).map(|i| derive(0xC9, &[i])).collect();
    let report = frobenius_concentration_check(&spec, &seeds).unwrap();
    assert_eq!(
        report.passes(),
        100,
        "Frobenius bound held only {}/100 times",
        report.passes()
    );
    pass(
        9,
        "combinatorial exactness",
        "tau_id example, pair formula n<=7, class counts n<=10, bound 100/100",
    );
}

/// Criterion 10: byte-identical CSV across repeated runs of a fixed-seed
/// experiment, serial and with 8 worker threads.
#[test]
fn c10_deterministic_output() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = ExperimentConfig::defaults(ExperimentKind::Figure1AlphaSweep);
    config.alpha = vec![1.0];
    config.n_per_block = vec![20];
    config.replicates = 4;
    config.seed = 0xD0;

    let run_with_threads = |threads: usize, out: std::path::PathBuf| -> Vec<u8> {
        let mut cfg = config.clone();
        cfg.out = out;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| run_experiment(&cfg).unwrap());
        std::fs::read(&cfg.out).unwrap()
    };

    let serial_1 = run_with_threads(1, dir.path().join("serial1.csv"));
    let serial_2 = run_with_threads(1, dir.path().join("serial2.csv"));
    let wide_1 = run_with_threads(8, dir.path().join("wide1.csv"));
    let wide_2 = run_with_threads(8, dir.path().join("wide2.csv"));
    assert_eq!(serial_1, serial_2, "serial reruns differ");
    assert_eq!(wide_1, wide_2, "8-thread reruns differ");
    assert_eq!(serial_1, wide_1, "thread count changed the bytes");

    // Same through the CLI with --threads 8.
    let exe = env!("CARGO_BIN_EXE_matchlab");
    let cli_out_1 = dir.path().join("cli1.csv");
    let cli_out_2 = dir.path().join("cli2.csv");
    for out in [&cli_out_1, &cli_out_2] {
        let status = std::process::Command::new(exe)
            .args([
                "experiment",
                "--experiment",
                "figure1_alpha_sweep",
                "--alpha",
                "1.0",
                "--n-per-block",
                "20",
                "--replicates",
                "4",
                "--seed",
                "208",
                "--threads",
                "8",
                "--out",
                out.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success(), "CLI run failed");
    }
    let cli_bytes_1 = std::fs::read(&cli_out_1).unwrap();
    let cli_bytes_2 = std::fs::read(&cli_out_2).unwrap();
    assert_eq!(cli_bytes_1, cli_bytes_2, "CLI reruns differ");

    pass(
        10,
        "deterministic output",
        &format!(
            "library 1 vs 8 threads and CLI --threads 8 byte-identical ({} bytes)",
            serial_1.len()
        ),
    );
}
