//! Exact small-n matching oracles, matchability predicates, and the
//! combinatorial and covariance diagnostics behind them.
//!
//! The central quantity is the expected centered-objective gap of a
//! permutation: the sum of edge covariances over the vertex pairs the
//! permutation displaces. Everything here is exact or exhaustively
//! enumerable at desk scale and doubles as the oracle layer for the
//! heuristic matcher.

use ndarray::ArrayView2;

use crate::assignment::{all_permutations, Permutation};
use crate::corr_er::CorrSpec;
use crate::error::{Error, Result};
use crate::linalg::frobenius_norm;
use crate::usvt::center;

/// Largest n for which the exact graph matching oracle enumerates.
pub const BRUTE_FORCE_GMP_MAX: usize = 8;

/// Objective tie tolerance when collecting the argmin set (exact for the
/// integer-valued objectives of unweighted graphs).
pub const GMP_TIE_EPS: f64 = 1e-9;

/// The exact argmin set of the graph matching objective.
#[derive(Debug, Clone)]
pub struct GmpArgmin {
    pub argmin: Vec<Permutation>,
    pub objective: f64,
}

fn objective_for_image(a: &ArrayView2<f64>, b: &ArrayView2<f64>, image: &[usize]) -> f64 {
    let n = image.len();
    let mut total = 0.0;
    for u in 0..n {
        for v in 0..n {
            let d = a[[u, v]] - b[[image[u], image[v]]];
            total += d * d;
        }
    }
    total
}

/// Enumerates all `n!` permutations and returns every one attaining the
/// minimum of `||a - P b P^T||_F^2` (ties within [`GMP_TIE_EPS`]).
pub fn brute_force_gmp(a: &ArrayView2<f64>, b: &ArrayView2<f64>) -> Result<GmpArgmin> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n || b.ncols() != n {
        return Err(Error::dimension("brute_force_gmp", n, b.nrows()));
    }
    if n > BRUTE_FORCE_GMP_MAX {
        return Err(Error::SizeLimit {
            n,
            max: BRUTE_FORCE_GMP_MAX,
        });
    }
    let images = all_permutations(n);
    let mut best = f64::INFINITY;
    let objectives: Vec<f64> = images
        .iter()
        .map(|image| {
            let obj = objective_for_image(a, b, image);
            if obj < best {
                best = obj;
            }
            obj
        })
        .collect();
    let argmin = images
        .into_iter()
        .zip(objectives)
        .filter(|(_, obj)| *obj <= best + GMP_TIE_EPS)
        .map(|(image, _)| Permutation::new(image).expect("enumerated bijection"))
        .collect();
    Ok(GmpArgmin {
        argmin,
        objective: best,
    })
}

/// Which recovery notion to test against the exact argmin set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    /// The argmin set is exactly the identity.
    Exact,
    /// Every optimal permutation moves at most this many labels.
    MovesAtMost(usize),
    /// Every optimal permutation fixes all of the first `n_core` labels.
    Core(usize),
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub argmin: Vec<Permutation>,
    pub objective: f64,
    pub matchable: bool,
    pub flavor: Flavor,
}

fn flavor_holds(argmin: &[Permutation], flavor: Flavor) -> bool {
    match flavor {
        Flavor::Exact => argmin.len() == 1 && argmin[0].is_identity(),
        Flavor::MovesAtMost(k) => argmin.iter().all(|p| p.moved_count() <= k),
        Flavor::Core(n_core) => argmin.iter().all(|p| p.fixes_prefix(n_core)),
    }
}

/// Exact matchability of a small pair under the requested flavor.
pub fn is_matchable(a: &ArrayView2<f64>, b: &ArrayView2<f64>, flavor: Flavor) -> Result<Verdict> {
    let gmp = brute_force_gmp(a, b)?;
    let matchable = flavor_holds(&gmp.argmin, flavor);
    Ok(Verdict {
        argmin: gmp.argmin,
        objective: gmp.objective,
        matchable,
        flavor,
    })
}

/// One dissimilarity's exact argmin set with all three flavor predicates.
#[derive(Debug, Clone)]
pub struct DissimilarityVerdict {
    pub dissimilarity: &'static str,
    pub argmin: Vec<Permutation>,
    pub objective: f64,
    pub exact: bool,
    pub within_budget: bool,
    pub core: bool,
}

/// Matchability of a sampled pair under the raw, oracle-centered, and
/// USVT-centered objectives at once (small n only).
#[derive(Debug, Clone)]
pub struct MatchabilityVerdict {
    pub f_budget: usize,
    pub n_core: usize,
    pub verdicts: Vec<DissimilarityVerdict>,
}

/// Evaluates all three dissimilarities for one sampled pair: raw adjacency,
/// centered by the model's hollow expectations, and centered by USVT
/// estimates with the given options.
pub fn matchability_verdict(
    pair: &crate::corr_er::GraphPair,
    spec: &CorrSpec,
    usvt_opts: &crate::usvt::UsvtOptions,
    f_budget: usize,
) -> Result<MatchabilityVerdict> {
    let n_core = pair.n_core;
    let ea = spec.q1.hollow_expectation();
    let eb = spec.q2.hollow_expectation();
    let oracle_a = center(&pair.a.view(), &ea.view())?;
    let oracle_b = center(&pair.b.view(), &eb.view())?;
    let qa = crate::usvt::usvt_estimate(&pair.a.view(), usvt_opts)?;
    let qb = crate::usvt::usvt_estimate(&pair.b.view(), usvt_opts)?;
    let usvt_a = center(&pair.a.view(), &qa.q_hat.view())?;
    let usvt_b = center(&pair.b.view(), &qb.q_hat.view())?;

    let mut verdicts = Vec::with_capacity(3);
    for (label, ma, mb) in [
        ("gmp", pair.a.view(), pair.b.view()),
        ("oracle_centered", oracle_a.view(), oracle_b.view()),
        ("usvt_centered", usvt_a.view(), usvt_b.view()),
    ] {
        let gmp = brute_force_gmp(&ma, &mb)?;
        verdicts.push(DissimilarityVerdict {
            dissimilarity: label,
            exact: flavor_holds(&gmp.argmin, Flavor::Exact),
            within_budget: flavor_holds(&gmp.argmin, Flavor::MovesAtMost(f_budget)),
            core: flavor_holds(&gmp.argmin, Flavor::Core(n_core)),
            argmin: gmp.argmin,
            objective: gmp.objective,
        });
    }
    Ok(MatchabilityVerdict {
        f_budget,
        n_core,
        verdicts,
    })
}

/// The class of permutations of `0..n` with exactly `k` non-fixed points.
/// Nonempty only for `k = 0` or `k >= 2` (no permutation moves one point).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PermClass {
    pub n: usize,
    pub k: usize,
}

impl PermClass {
    pub fn new(n: usize, k: usize) -> Self {
        assert!(k <= n, "k must be at most n");
        Self { n, k }
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        p.n() == self.n && p.moved_count() == self.k
    }

    /// Exact class size `C(n,k) * D_k`.
    pub fn count(&self) -> u128 {
        count_pi_n_k(self.n, self.k)
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }
}

/// Expected centered-objective gap of a permutation: the sum of edge
/// covariances over the unordered pairs the permutation displaces.
pub fn x_p(spec: &CorrSpec, p: &Permutation) -> f64 {
    let n = spec.n();
    assert_eq!(p.n(), n, "permutation size must match the model");
    let tau = p.image();
    let mut total = 0.0;
    for u in 0..n {
        for v in (u + 1)..n {
            let (tu, tv) = (tau[u], tau[v]);
            let fixed_as_set = (tu == u && tv == v) || (tu == v && tv == u);
            if !fixed_as_set {
                total += spec.covariance(u, v);
            }
        }
    }
    total
}

/// Number of unordered pairs displaced by a permutation, by direct
/// enumeration. Also checks the closed formula `C(k,2) - T_P + (n-k)k` and
/// the lower bound `k(n - 1 - k/2)`.
pub fn moved_pair_count(p: &Permutation) -> usize {
    let n = p.n();
    let tau = p.image();
    let mut count = 0usize;
    for u in 0..n {
        for v in (u + 1)..n {
            let (tu, tv) = (tau[u], tau[v]);
            let fixed_as_set = (tu == u && tv == v) || (tu == v && tv == u);
            if !fixed_as_set {
                count += 1;
            }
        }
    }
    let formula = moved_pair_count_formula(p);
    assert_eq!(count, formula, "closed formula disagrees with enumeration");
    let k = p.moved_count() as f64;
    let lower = k * (n as f64 - 1.0 - k / 2.0);
    assert!(
        count as f64 >= lower - 1e-9,
        "lower bound violated: {count} < {lower}"
    );
    count
}

/// Closed form `C(k,2) - T_P + (n-k)k` for the displaced-pair count.
pub fn moved_pair_count_formula(p: &Permutation) -> usize {
    let n = p.n();
    let k = p.moved_count();
    let t = p.transposition_count();
    k * (k.saturating_sub(1)) / 2 - t + (n - k) * k
}

/// Global lower bound on the expected gap over the class of permutations
/// moving exactly `k` labels: `(1/2) eps k (n - 1 - k/2)` with `eps` the
/// smallest off-diagonal edge covariance.
pub fn epsilon_bound(spec: &CorrSpec, k: usize) -> f64 {
    let n = spec.n();
    assert!((2..=n).contains(&k), "k must be in 2..=n");
    let eps = spec.min_covariance();
    0.5 * eps * k as f64 * (n as f64 - 1.0 - k as f64 / 2.0)
}

/// Number of permutations of `0..n` moving exactly `k` labels:
/// `C(n,k) * D_k` with derangement numbers `D_k`.
pub fn count_pi_n_k(n: usize, k: usize) -> u128 {
    assert!(k <= n);
    binomial(n, k) * derangements(k)
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut result: u128 = 1;
    for i in 0..k {
        result = result * (n - i) as u128 / (i + 1) as u128;
    }
    result
}

fn derangements(k: usize) -> u128 {
    match k {
        0 => 1,
        1 => 0,
        _ => {
            let mut prev2: u128 = 1; // D_0
            let mut prev1: u128 = 0; // D_1
            for i in 2..=k {
                let current = (i as u128 - 1) * (prev1 + prev2);
                prev2 = prev1;
                prev1 = current;
            }
            prev1
        }
    }
}

/// Core-fixing reduction of a permutation: core labels become fixed points
/// and each junk label is routed along its orbit to the first junk landing.
/// Junk is the suffix `n_core..n`.
pub fn tau_id(tau: &Permutation, n_core: usize) -> Permutation {
    let n = tau.n();
    assert!(n_core <= n);
    let image: Vec<usize> = (0..n)
        .map(|i| {
            if i < n_core {
                i
            } else {
                let mut j = tau.apply(i);
                while j < n_core {
                    j = tau.apply(j);
                }
                j
            }
        })
        .collect();
    Permutation::new(image).expect("first-return map of a bijection is a bijection")
}

/// Fraction of labels on which two permutations agree, optionally restricted
/// to the first `core` labels.
pub fn accuracy(p: &Permutation, truth: &Permutation, core: Option<usize>) -> f64 {
    assert_eq!(p.n(), truth.n());
    let limit = core.unwrap_or(p.n()).min(p.n());
    if limit == 0 {
        return 1.0; // vacuous
    }
    let agree = (0..limit).filter(|&i| p.apply(i) == truth.apply(i)).count();
    agree as f64 / limit as f64
}

/// One seed's centered Frobenius norms against the `2 sqrt(r) n` bound.
#[derive(Debug, Clone)]
pub struct ConcentrationRow {
    pub seed: u64,
    pub norm_a: f64,
    pub bound_a: f64,
    pub norm_b: f64,
    pub bound_b: f64,
}

impl ConcentrationRow {
    /// Non-strict so the degenerate all-zero model (norm 0, bound 0) counts
    /// as holding; equality has probability zero everywhere else.
    pub fn holds(&self) -> bool {
        self.norm_a <= self.bound_a && self.norm_b <= self.bound_b
    }
}

#[derive(Debug, Clone)]
pub struct ConcentrationReport {
    pub rows: Vec<ConcentrationRow>,
}

impl ConcentrationReport {
    pub fn passes(&self) -> usize {
        self.rows.iter().filter(|r| r.holds()).count()
    }

    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| r.holds())
    }
}

/// Samples the model once per seed, centers by the hollow expectations, and
/// reports whether `||A - E(A)||_F < 2 sqrt(r1) n` holds for each graph
/// (`r1`, `r2` are the largest off-diagonal entries of the marginals).
pub fn frobenius_concentration_check(spec: &CorrSpec, seeds: &[u64]) -> Result<ConcentrationReport> {
    let n = spec.n() as f64;
    let r1 = spec.q1.max_off_diagonal();
    let r2 = spec.q2.max_off_diagonal();
    let ea = spec.q1.hollow_expectation();
    let eb = spec.q2.hollow_expectation();
    let mut rows = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let pair = spec.sample_pair(seed)?;
        let centered_a = center(&pair.a.view(), &ea.view())?;
        let centered_b = center(&pair.b.view(), &eb.view())?;
        rows.push(ConcentrationRow {
            seed,
            norm_a: frobenius_norm(&centered_a.view()),
            bound_a: 2.0 * r1.sqrt() * n,
            norm_b: frobenius_norm(&centered_b.view()),
            bound_b: 2.0 * r2.sqrt() * n,
        });
    }
    Ok(ConcentrationReport { rows })
}
