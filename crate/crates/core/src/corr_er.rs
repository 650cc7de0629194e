//! Correlated heterogeneous edge-independent random graph pairs.
//!
//! A model is a triple `(Q1, Q2, R)`: marginal edge probabilities for each
//! graph plus an entrywise edge correlation. Each unordered pair `{u, v}`
//! gets a bivariate Bernoulli draw realized from three independent Bernoulli
//! variables, `(X, Y) = (Z0, Z0*Z2 + (1 - Z0)*Z1)`, which is what makes both
//! the sampler and the analytic expected-objective computations exact.

use ndarray::Array2;
use thiserror::Error;

use crate::assignment::Permutation;
use crate::error::{Error, Result};
use crate::linalg::make_hollow;
use crate::rng::SplitMix64;

/// Absolute slack when checking the correlation feasibility bound; the
/// interesting examples sit exactly on the boundary.
pub const FEASIBILITY_SLACK: f64 = 1e-12;

/// Substream tag for per-pair draws in [`CorrSpec::sample_pair`].
const STREAM_PAIR: u64 = 0x7061_6972; // "pair"

/// Symmetric matrix of edge probabilities. The diagonal may be arbitrary:
/// graphs are loop-free, so the sampler and all expectations ignore it.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbMatrix {
    pub entries: Array2<f64>,
}

impl ProbMatrix {
    pub fn new(entries: Array2<f64>) -> Self {
        Self { entries }
    }

    pub fn constant(n: usize, p: f64) -> Self {
        Self {
            entries: Array2::from_elem((n, n), p),
        }
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    /// Largest off-diagonal entry (the sparsity level `r` of the
    /// concentration bounds). Zero for n < 2.
    pub fn max_off_diagonal(&self) -> f64 {
        let n = self.n();
        let mut m = 0.0f64;
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    m = m.max(self.entries[[u, v]]);
                }
            }
        }
        m
    }

    /// The expectation of a sampled adjacency matrix: this matrix with a
    /// zeroed diagonal (graphs have no self-loops).
    pub fn hollow_expectation(&self) -> Array2<f64> {
        let mut e = self.entries.clone();
        make_hollow(&mut e);
        e
    }
}

/// One invariant violation found by [`CorrSpec::validate`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Violation {
    #[error("{matrix} has dimension {got}, expected {expected}")]
    DimensionMismatch {
        matrix: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("{matrix}({u},{v}) = {value} is outside [0, 1]")]
    EntryOutOfRange {
        matrix: &'static str,
        u: usize,
        v: usize,
        value: f64,
    },
    #[error("{matrix} is not symmetric at ({u},{v})")]
    NotSymmetric {
        matrix: &'static str,
        u: usize,
        v: usize,
    },
    #[error(
        "correlation R({u},{v}) = {rho} exceeds the feasible bound {bound} \
         for marginals ({p_marginal}, {q_marginal})"
    )]
    CorrelationAboveFeasible {
        u: usize,
        v: usize,
        rho: f64,
        bound: f64,
        p_marginal: f64,
        q_marginal: f64,
    },
    #[error("R({u},{v}) = {rho} but a degenerate marginal (0 or 1) forces zero correlation")]
    DegenerateMarginalCorrelated { u: usize, v: usize, rho: f64 },
    #[error("R({u},{v}) = {rho} involves a junk vertex (core size {n_core}); junk rows of R must be zero")]
    JunkCorrelated {
        u: usize,
        v: usize,
        rho: f64,
        n_core: usize,
    },
}

/// The model triple (Q1, Q2, R) plus the declared core size.
///
/// Vertices `0..n_core` are core (eligible for positive correlation);
/// vertices `n_core..n` are junk and must have zero correlation to
/// everything, the `R = R_c (+) 0` form.
#[derive(Debug, Clone)]
pub struct CorrSpec {
    pub q1: ProbMatrix,
    pub q2: ProbMatrix,
    pub r: Array2<f64>,
    pub n_core: usize,
}

/// Largest correlation `rho >= 0` for which a bivariate Bernoulli with
/// marginals `(p, q)` exists. Symmetric in its arguments; zero when either
/// marginal is degenerate.
pub fn max_feasible_correlation(p: f64, q: f64) -> f64 {
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) {
        return 0.0;
    }
    let vp = p * (1.0 - p);
    let vq = q * (1.0 - q);
    if vp <= 0.0 || vq <= 0.0 {
        return 0.0;
    }
    let cov_max = (q * (1.0 - p)).min(p * (1.0 - q));
    cov_max / (vp * vq).sqrt()
}

/// Parameters `(z0, z1, z2)` of the independent Bernoulli triple realizing a
/// bivariate Bernoulli with marginals `(p, q)` and correlation `rho`:
/// `(X, Y) = (Z0, Z0*Z2 + (1 - Z0)*Z1)`.
///
/// When `p` is degenerate the undefined quotient collapses to `q` and the
/// covariance is forced to zero (independent sampling).
pub fn bibern_params(p: f64, q: f64, rho: f64) -> Result<(f64, f64, f64)> {
    let bound = max_feasible_correlation(p, q);
    if rho < 0.0 || rho > bound + FEASIBILITY_SLACK {
        return Err(Error::InfeasibleCorrelation {
            p_marginal: p,
            q_marginal: q,
            rho,
            bound,
            context: String::new(),
        });
    }
    let degenerate = p <= 0.0 || p >= 1.0 || q <= 0.0 || q >= 1.0;
    let cov = if degenerate {
        0.0
    } else {
        rho * (p * (1.0 - p) * q * (1.0 - q)).sqrt()
    };
    let z1 = if p >= 1.0 {
        q
    } else {
        ((q * (1.0 - p) - cov) / (1.0 - p)).clamp(0.0, 1.0)
    };
    let z2 = if p <= 0.0 {
        q
    } else {
        ((q * p + cov) / p).clamp(0.0, 1.0)
    };
    Ok((p, z1, z2))
}

/// A sampled graph pair. The latent alignment is the identity by
/// construction; `n_core` records how many leading vertices are core.
#[derive(Debug, Clone)]
pub struct GraphPair {
    pub a: Array2<f64>,
    pub b: Array2<f64>,
    pub n_core: usize,
    pub weighted: bool,
}

impl GraphPair {
    pub fn n(&self) -> usize {
        self.a.nrows()
    }
}

impl CorrSpec {
    pub fn new(q1: ProbMatrix, q2: ProbMatrix, r: Array2<f64>, n_core: usize) -> Self {
        Self { q1, q2, r, n_core }
    }

    /// Homogeneous model: all marginals `p`/`q`, all correlations `rho`.
    pub fn homogeneous(n: usize, p: f64, q: f64, rho: f64) -> Self {
        Self::new(
            ProbMatrix::constant(n, p),
            ProbMatrix::constant(n, q),
            Array2::from_elem((n, n), rho),
            n,
        )
    }

    pub fn n(&self) -> usize {
        self.q1.n()
    }

    /// Covariance of the edge indicator pair at `{u, v}`.
    pub fn covariance(&self, u: usize, v: usize) -> f64 {
        let p = self.q1.entries[[u, v]];
        let q = self.q2.entries[[u, v]];
        let vp = p * (1.0 - p);
        let vq = q * (1.0 - q);
        if vp <= 0.0 || vq <= 0.0 {
            return 0.0;
        }
        self.r[[u, v]] * (vp * vq).sqrt()
    }

    /// Smallest off-diagonal edge covariance (the `epsilon` of the global
    /// expected-gap lower bound).
    pub fn min_covariance(&self) -> f64 {
        let n = self.n();
        let mut eps = f64::INFINITY;
        for u in 0..n {
            for v in (u + 1)..n {
                eps = eps.min(self.covariance(u, v));
            }
        }
        if eps.is_finite() {
            eps
        } else {
            0.0
        }
    }

    /// Checks every model invariant and reports all violations. An empty
    /// report means the model is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.n();
        for (matrix, m) in [
            ("Q2", &self.q2.entries),
            ("R", &self.r),
        ] {
            if m.nrows() != n || m.ncols() != n {
                out.push(Violation::DimensionMismatch {
                    matrix,
                    expected: n,
                    got: m.nrows().max(m.ncols()),
                });
            }
        }
        if !out.is_empty() {
            return out;
        }
        if self.q1.entries.ncols() != n {
            out.push(Violation::DimensionMismatch {
                matrix: "Q1",
                expected: n,
                got: self.q1.entries.ncols(),
            });
            return out;
        }

        for (matrix, m) in [
            ("Q1", &self.q1.entries),
            ("Q2", &self.q2.entries),
            ("R", &self.r),
        ] {
            for u in 0..n {
                for v in u..n {
                    let x = m[[u, v]];
                    if !(0.0..=1.0).contains(&x) || !x.is_finite() {
                        out.push(Violation::EntryOutOfRange {
                            matrix,
                            u,
                            v,
                            value: x,
                        });
                    }
                    if v > u && (m[[u, v]] - m[[v, u]]).abs() > 0.0 {
                        out.push(Violation::NotSymmetric { matrix, u, v });
                    }
                }
            }
        }

        // Feasibility and core-junk form, off-diagonal pairs only.
        for u in 0..n {
            for v in (u + 1)..n {
                let p = self.q1.entries[[u, v]];
                let q = self.q2.entries[[u, v]];
                let rho = self.r[[u, v]];
                if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) || !(0.0..=1.0).contains(&rho)
                {
                    continue; // already reported above
                }
                let degenerate = p <= 0.0 || p >= 1.0 || q <= 0.0 || q >= 1.0;
                if degenerate {
                    if rho > 0.0 {
                        out.push(Violation::DegenerateMarginalCorrelated { u, v, rho });
                    }
                } else {
                    let bound = max_feasible_correlation(p, q);
                    if rho > bound + FEASIBILITY_SLACK {
                        out.push(Violation::CorrelationAboveFeasible {
                            u,
                            v,
                            rho,
                            bound,
                            p_marginal: p,
                            q_marginal: q,
                        });
                    }
                }
                if self.n_core < n && (u >= self.n_core || v >= self.n_core) && rho > 0.0 {
                    out.push(Violation::JunkCorrelated {
                        u,
                        v,
                        rho,
                        n_core: self.n_core,
                    });
                }
            }
        }
        out
    }

    fn ensure_valid(&self) -> Result<()> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidSpec(violations))
        }
    }

    /// Samples one correlated pair. Deterministic for a fixed seed: pair
    /// `{u, v}` (row-major over `u < v`) uses its own derived substream and
    /// always draws `(Z0, Z1, Z2)` in that order, so samples are reproducible
    /// under any evaluation order.
    pub fn sample_pair(&self, seed: u64) -> Result<GraphPair> {
        self.ensure_valid()?;
        let n = self.n();
        let mut a = Array2::<f64>::zeros((n, n));
        let mut b = Array2::<f64>::zeros((n, n));
        let mut pair_index = 0u64;
        for u in 0..n {
            for v in (u + 1)..n {
                let (p0, p1, p2) = bibern_params(
                    self.q1.entries[[u, v]],
                    self.q2.entries[[u, v]],
                    self.r[[u, v]],
                )?;
                let mut rng = SplitMix64::substream(seed, &[STREAM_PAIR, pair_index]);
                let z0 = rng.bernoulli(p0);
                let z1 = rng.bernoulli(p1);
                let z2 = rng.bernoulli(p2);
                let x = z0;
                let y = if z0 { z2 } else { z1 };
                if x {
                    a[[u, v]] = 1.0;
                    a[[v, u]] = 1.0;
                }
                if y {
                    b[[u, v]] = 1.0;
                    b[[v, u]] = 1.0;
                }
                pair_index += 1;
            }
        }
        Ok(GraphPair {
            a,
            b,
            n_core: self.n_core,
            weighted: false,
        })
    }

    /// Analytic `(1/2) E tr(A P B P^T)`: pairs fixed as a set by the
    /// permutation contribute covariance plus the product of marginals,
    /// displaced pairs contribute the product of the two (independent)
    /// marginals.
    pub fn expected_trace(&self, perm: &Permutation) -> f64 {
        let n = self.n();
        assert_eq!(perm.n(), n, "permutation size must match the model");
        let tau = perm.image();
        let mut total = 0.0;
        for u in 0..n {
            for v in (u + 1)..n {
                let (tu, tv) = (tau[u], tau[v]);
                let fixed_as_set = (tu == u && tv == v) || (tu == v && tv == u);
                if fixed_as_set {
                    total += self.covariance(u, v)
                        + self.q1.entries[[u, v]] * self.q2.entries[[u, v]];
                } else {
                    total += self.q1.entries[[u, v]] * self.q2.entries[[tu, tv]];
                }
            }
        }
        total
    }
}

/// Checks every model invariant; an empty report means the model is valid.
/// (Free-function form of [`CorrSpec::validate`].)
pub fn validate_spec(spec: &CorrSpec) -> Vec<Violation> {
    spec.validate()
}

/// Expands block-constant parameter matrices into a full model.
///
/// `n_core`: when the correlation blocks have the `R_c (+) 0` core-junk
/// shape (trailing vertices with all-zero correlation), the core size must
/// be declared explicitly; passing `None` for such a spec is an error.
pub fn sbm_spec(
    block_sizes: &[usize],
    q1_blocks: &Array2<f64>,
    q2_blocks: &Array2<f64>,
    r_blocks: &Array2<f64>,
    n_core: Option<usize>,
) -> Result<CorrSpec> {
    let b = block_sizes.len();
    if b == 0 {
        return Err(Error::InvalidArgument("no blocks given".into()));
    }
    for (name, m) in [("q1", q1_blocks), ("q2", q2_blocks), ("r", r_blocks)] {
        if m.nrows() != b || m.ncols() != b {
            return Err(Error::InvalidArgument(format!(
                "{name} block matrix is {}x{}, expected {b}x{b}",
                m.nrows(),
                m.ncols()
            )));
        }
        for i in 0..b {
            for j in i..b {
                if (m[[i, j]] - m[[j, i]]).abs() > 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "{name} block matrix is not symmetric at ({i},{j})"
                    )));
                }
            }
        }
    }

    // Block-level feasibility first, so the error can name block indices.
    for i in 0..b {
        for j in i..b {
            let (p, q, rho) = (q1_blocks[[i, j]], q2_blocks[[i, j]], r_blocks[[i, j]]);
            if rho > 0.0 {
                let bound = max_feasible_correlation(p, q);
                if rho > bound + FEASIBILITY_SLACK {
                    return Err(Error::InfeasibleCorrelation {
                        p_marginal: p,
                        q_marginal: q,
                        rho,
                        bound,
                        context: format!(" in block pair ({i},{j})"),
                    });
                }
            }
        }
    }

    let n: usize = block_sizes.iter().sum();
    let mut block_of = Vec::with_capacity(n);
    for (idx, &size) in block_sizes.iter().enumerate() {
        block_of.extend(std::iter::repeat_n(idx, size));
    }

    let mut q1 = Array2::<f64>::zeros((n, n));
    let mut q2 = Array2::<f64>::zeros((n, n));
    let mut r = Array2::<f64>::zeros((n, n));
    for u in 0..n {
        for v in 0..n {
            let (bu, bv) = (block_of[u], block_of[v]);
            q1[[u, v]] = q1_blocks[[bu, bv]];
            q2[[u, v]] = q2_blocks[[bu, bv]];
            r[[u, v]] = r_blocks[[bu, bv]];
        }
    }

    // The largest vertex touched by a positive off-diagonal correlation;
    // anything past it is junk-shaped.
    let mut implied_core = 0usize;
    for u in 0..n {
        for v in (u + 1)..n {
            if r[[u, v]] > 0.0 {
                implied_core = implied_core.max(v + 1);
            }
        }
    }

    let n_core = match n_core {
        Some(c) => {
            if c > n {
                return Err(Error::InvalidArgument(format!(
                    "n_core = {c} exceeds the vertex count {n}"
                )));
            }
            c
        }
        None => {
            if implied_core > 0 && implied_core < n {
                return Err(Error::InvalidArgument(format!(
                    "correlation blocks have the core-junk form (vertices {implied_core}..{n} \
                     are uncorrelated); pass n_core explicitly"
                )));
            }
            n
        }
    };

    let spec = CorrSpec::new(ProbMatrix::new(q1), ProbMatrix::new(q2), r, n_core);
    spec.ensure_valid()?;
    Ok(spec)
}
