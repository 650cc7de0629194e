//! Frank-Wolfe relaxation of the graph matching problem.
//!
//! The matcher minimizes `g(D) = -tr(A D B D^T)` over the doubly stochastic
//! polytope: at each step an exact linear assignment on the negated gradient
//! gives the descent vertex, an exact quadratic line search gives the step,
//! and the final iterate is projected back to a permutation by one more
//! assignment solve. Restarts are deterministic from their derived seeds and
//! reduced with a fixed tie-break, so parallel and serial runs agree.

use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;

use crate::assignment::{solve_lap_max, Permutation};
use crate::error::{Error, Result};
use crate::linalg::frobenius_inner;
use crate::rng::{derive, SplitMix64};

const STREAM_RESTART: u64 = 0x7265_7374; // "rest"

/// An n x n nonnegative matrix with unit row and column sums (within 1e-8).
#[derive(Debug, Clone)]
pub struct DoublyStochastic {
    entries: Array2<f64>,
}

impl DoublyStochastic {
    pub const SUM_TOL: f64 = 1e-8;

    /// Validates marginals and clamps negative round-off (>= -1e-12) to zero.
    pub fn new(mut entries: Array2<f64>) -> Result<Self> {
        let n = entries.nrows();
        if entries.ncols() != n {
            return Err(Error::dimension("DoublyStochastic", n, entries.ncols()));
        }
        for x in entries.iter_mut() {
            if !x.is_finite() {
                return Err(Error::NonFinite);
            }
            if *x < 0.0 {
                if *x < -1e-12 {
                    return Err(Error::InvalidArgument(format!(
                        "negative entry {x} in doubly stochastic matrix"
                    )));
                }
                *x = 0.0;
            }
        }
        for i in 0..n {
            let row: f64 = (0..n).map(|j| entries[[i, j]]).sum();
            let col: f64 = (0..n).map(|j| entries[[j, i]]).sum();
            if (row - 1.0).abs() > Self::SUM_TOL || (col - 1.0).abs() > Self::SUM_TOL {
                return Err(Error::InvalidArgument(format!(
                    "row/column sums ({row}, {col}) at index {i} are not 1"
                )));
            }
        }
        Ok(Self { entries })
    }

    /// The flat matrix J/n, the barycenter of the polytope.
    pub fn barycenter(n: usize) -> Self {
        Self {
            entries: Array2::from_elem((n, n), 1.0 / n as f64),
        }
    }

    pub fn from_permutation(p: &Permutation) -> Self {
        Self {
            entries: p.to_matrix(),
        }
    }

    /// Interior random start: half barycenter, half a random permutation.
    pub fn random_interior(n: usize, seed: u64) -> Self {
        let mut rng = SplitMix64::new(seed);
        let image = rng.random_permutation(n);
        let mut entries = Array2::from_elem((n, n), 0.5 / n as f64);
        for (i, &j) in image.iter().enumerate() {
            entries[[i, j]] += 0.5;
        }
        Self { entries }
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    pub fn max_marginal_error(&self) -> f64 {
        let n = self.n();
        let mut worst = 0.0f64;
        for i in 0..n {
            let row: f64 = (0..n).map(|j| self.entries[[i, j]]).sum();
            let col: f64 = (0..n).map(|j| self.entries[[j, i]]).sum();
            worst = worst.max((row - 1.0).abs()).max((col - 1.0).abs());
        }
        worst
    }
}

/// Starting point of a Frank-Wolfe run.
#[derive(Debug, Clone)]
pub enum Init {
    Permutation(Permutation),
    Barycenter,
    RandomDs(u64),
}

impl Init {
    fn label(&self) -> String {
        match self {
            Init::Permutation(p) if p.is_identity() => "identity".to_string(),
            Init::Permutation(_) => "permutation".to_string(),
            Init::Barycenter => "barycenter".to_string(),
            Init::RandomDs(_) => "random_ds".to_string(),
        }
    }

    fn to_ds(&self, n: usize) -> Result<DoublyStochastic> {
        match self {
            Init::Permutation(p) => {
                if p.n() != n {
                    return Err(Error::dimension("faq_match init", n, p.n()));
                }
                Ok(DoublyStochastic::from_permutation(p))
            }
            Init::Barycenter => Ok(DoublyStochastic::barycenter(n)),
            Init::RandomDs(seed) => Ok(DoublyStochastic::random_interior(n, *seed)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MatchOptions {
    pub max_iters: usize,
    pub rel_tol: f64,
    pub init: Init,
    /// Total number of starts: the configured `init` plus `restarts - 1`
    /// random interior restarts derived from `seed`.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for MatchOptions {
    fn default() -> Self {
        Self {
            max_iters: 30,
            rel_tol: 1e-6,
            init: Init::Barycenter,
            restarts: 1,
            seed: 0,
        }
    }
}

impl MatchOptions {
    pub fn from_init(init: Init) -> Self {
        Self {
            init,
            ..Self::default()
        }
    }

    pub fn with_restarts(mut self, restarts: usize, seed: u64) -> Self {
        self.restarts = restarts;
        self.seed = seed;
        self
    }
}

/// Result of a match: the projected permutation with both objective forms.
#[derive(Debug, Clone)]
pub struct MatchResult {
    pub permutation: Permutation,
    /// `||A - P B P^T||_F^2`.
    pub objective: f64,
    /// `-tr(A P B P^T)`.
    pub trace_objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub init_label: String,
}

/// Both graph matching objective forms for a fixed permutation:
/// `(||a - P b P^T||_F^2, -tr(a P b P^T))`.
pub fn gm_objective(
    a: &ArrayView2<f64>,
    b: &ArrayView2<f64>,
    p: &Permutation,
) -> Result<(f64, f64)> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n || b.ncols() != n || p.n() != n {
        return Err(Error::dimension("gm_objective", n, b.nrows()));
    }
    let tau = p.image();
    let mut frob_sq = 0.0;
    let mut trace = 0.0;
    for u in 0..n {
        for v in 0..n {
            let x = a[[u, v]];
            let y = b[[tau[u], tau[v]]];
            let d = x - y;
            frob_sq += d * d;
            trace += x * y;
        }
    }
    Ok((frob_sq, -trace))
}

/// Gradient of `g(D) = -tr(A D B D^T)` for symmetric `a`, `b`: `-2 A D B`.
pub fn relaxed_gradient(
    a: &ArrayView2<f64>,
    b: &ArrayView2<f64>,
    d: &DoublyStochastic,
) -> Result<Array2<f64>> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n || b.ncols() != n || d.n() != n {
        return Err(Error::dimension("relaxed_gradient", n, d.n()));
    }
    let adb = a.dot(&d.entries().dot(b));
    Ok(adb.mapv(|x| -2.0 * x))
}

/// Exact minimizer over [0, 1] of `alpha -> g((1 - alpha) D + alpha Q)`.
///
/// With `R = Q - D` the objective is `g(D) + c1 alpha + c2 alpha^2`; the
/// closed-form minimizer is clamped to the unit interval, a linear profile
/// goes to the downhill endpoint, and a concave profile takes the better
/// endpoint (ties favor 0).
pub fn exact_line_search(
    a: &ArrayView2<f64>,
    b: &ArrayView2<f64>,
    d: &DoublyStochastic,
    q: &Permutation,
) -> Result<f64> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n || b.ncols() != n || d.n() != n || q.n() != n {
        return Err(Error::dimension("exact_line_search", n, q.n()));
    }
    let m_d = a.dot(&d.entries().dot(b));
    let (c1, c2) = line_search_coefficients(a, b, d.entries(), &m_d, q);
    Ok(minimize_unit_quadratic(c1, c2))
}

/// `c1`, `c2` of the line-search quadratic, reusing `m_d = A D B`.
fn line_search_coefficients(
    a: &ArrayView2<f64>,
    b: &ArrayView2<f64>,
    d: &Array2<f64>,
    m_d: &Array2<f64>,
    q: &Permutation,
) -> (f64, f64) {
    let n = a.nrows();
    let tau = q.image();

    // (Q B)(k, j) = B(tau(k), j): a row shuffle, no matmul needed.
    let mut qb = Array2::<f64>::zeros((n, n));
    for (k, &target) in tau.iter().enumerate() {
        qb.row_mut(k).assign(&b.row(target));
    }
    let m_q = a.dot(&qb); // A Q B
    let m_r = &m_q - m_d; // A R B with R = Q - D

    // <M, Q> = sum_i M(i, tau(i)); <M, D> is a dense inner product.
    let inner_q = |m: &Array2<f64>| -> f64 { (0..n).map(|i| m[[i, tau[i]]]).sum() };
    let c1 = -(frobenius_inner(&m_r.view(), &d.view()) + (inner_q(m_d) - frobenius_inner(&m_d.view(), &d.view())));
    let c2 = -(inner_q(&m_r) - frobenius_inner(&m_r.view(), &d.view()));
    (c1, c2)
}

fn minimize_unit_quadratic(c1: f64, c2: f64) -> f64 {
    if c2 > 0.0 {
        (-c1 / (2.0 * c2)).clamp(0.0, 1.0)
    } else if c2 == 0.0 {
        if c1 < 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        // Concave: best endpoint; g(1) - g(0) = c1 + c2.
        if c1 + c2 < 0.0 {
            1.0
        } else {
            0.0
        }
    }
}

/// One Frank-Wolfe run from a fixed start. Returns the projected result and
/// the relaxed-objective trace `g(D_0), g(D_1), ...` (monotone nonincreasing).
pub fn frank_wolfe_run(
    a: &ArrayView2<f64>,
    b: &ArrayView2<f64>,
    start: DoublyStochastic,
    max_iters: usize,
    rel_tol: f64,
    init_label: String,
) -> Result<(MatchResult, Vec<f64>)> {
    let n = a.nrows();
    let mut d = start.entries().clone();
    let mut converged = false;
    let mut iterations = 0usize;

    let g_of = |m_d: &Array2<f64>, d: &Array2<f64>| -frobenius_inner(&m_d.view(), &d.view());

    let mut m_d = a.dot(&d.dot(b));
    let mut g_trace = vec![g_of(&m_d, &d)];

    for _ in 0..max_iters {
        iterations += 1;

        // Descent vertex: maximize <-grad, Q> = <2 A D B, Q>.
        let neg_gradient = m_d.mapv(|x| 2.0 * x);
        let (q, _) = solve_lap_max(&neg_gradient.view())?;

        let (c1, c2) = line_search_coefficients(a, b, &d, &m_d, &q);
        let alpha = minimize_unit_quadratic(c1, c2);
        if alpha <= 0.0 {
            converged = true;
            break;
        }

        let g_prev = *g_trace.last().expect("nonempty");
        d.mapv_inplace(|x| (1.0 - alpha) * x);
        for (i, &j) in q.image().iter().enumerate() {
            d[[i, j]] += alpha;
        }
        m_d = a.dot(&d.dot(b));
        let g_new = g_of(&m_d, &d);
        debug_assert!(
            g_new <= g_prev + 1e-7 * (1.0 + g_prev.abs()),
            "objective increased: {g_prev} -> {g_new}"
        );
        debug_assert!(
            DoublyStochastic::new(d.clone()).is_ok(),
            "iterate left the polytope"
        );
        g_trace.push(g_new);

        if g_prev - g_new < rel_tol * g_prev.abs().max(1.0) {
            converged = true;
            break;
        }
    }

    // Projection: the permutation with the largest overlap with the iterate.
    let (permutation, _) = solve_lap_max(&d.view())?;
    let (objective, trace_objective) = gm_objective(a, b, &permutation)?;
    let _ = n;
    Ok((
        MatchResult {
            permutation,
            objective,
            trace_objective,
            iterations,
            converged,
            init_label,
        },
        g_trace,
    ))
}

/// Frank-Wolfe graph matching with restarts.
///
/// Start 0 uses `opts.init`; starts `1..opts.restarts` are random interior
/// points on substreams of `opts.seed`. The returned result has the smallest
/// Frobenius objective, with ties broken by fewest iterations then lowest
/// start index.
pub fn faq_match(
    a: &ArrayView2<f64>,
    b: &ArrayView2<f64>,
    opts: &MatchOptions,
) -> Result<MatchResult> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n || b.ncols() != n {
        return Err(Error::dimension("faq_match", n, b.nrows()));
    }
    if a.iter().any(|x| !x.is_finite()) || b.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let rel_tol_valid = opts.rel_tol > 0.0;
    if opts.max_iters == 0 || !rel_tol_valid {
        return Err(Error::InvalidArgument(
            "max_iters >= 1 and rel_tol > 0 required".into(),
        ));
    }
    let restarts = opts.restarts.max(1);

    let starts: Vec<(String, DoublyStochastic)> = (0..restarts)
        .map(|k| {
            if k == 0 {
                Ok((opts.init.label(), opts.init.to_ds(n)?))
            } else {
                let seed = derive(opts.seed, &[STREAM_RESTART, k as u64]);
                Ok((
                    format!("random_ds[{k}]"),
                    DoublyStochastic::random_interior(n, seed),
                ))
            }
        })
        .collect::<Result<_>>()?;

    let runs: Vec<Result<(MatchResult, Vec<f64>)>> = if starts.len() > 1 {
        starts
            .into_par_iter()
            .map(|(label, d0)| frank_wolfe_run(a, b, d0, opts.max_iters, opts.rel_tol, label))
            .collect()
    } else {
        starts
            .into_iter()
            .map(|(label, d0)| frank_wolfe_run(a, b, d0, opts.max_iters, opts.rel_tol, label))
            .collect()
    };

    let mut best: Option<MatchResult> = None;
    for run in runs {
        let (result, _) = run?;
        best = Some(match best {
            None => result,
            Some(current) => {
                if result.objective < current.objective
                    || (result.objective == current.objective
                        && result.iterations < current.iterations)
                {
                    result
                } else {
                    current
                }
            }
        });
    }
    Ok(best.expect("restarts >= 1"))
}
