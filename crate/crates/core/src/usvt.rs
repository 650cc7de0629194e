//! Edge-probability estimation by singular value thresholding, and the
//! centering step built on it.
//!
//! For a symmetric input the SVD is the symmetric eigendecomposition with
//! singular values `|lambda|`; the estimate keeps exactly the triples whose
//! singular value clears the threshold (strict inequality), optionally clips
//! entries to `[0, 1]`, and optionally zeroes the diagonal. A profile
//! likelihood elbow rule is available for weighted graphs where a `[0, 1]`
//! scale threshold makes no sense.

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::linalg::{is_symmetric, sym_eigen};

/// How the singular value cutoff is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdRule {
    /// Keep singular values strictly above `t`.
    Explicit(f64),
    /// Keep singular values strictly above `a * sqrt(n * r_hat)`.
    Scaled { a: f64, r_hat: f64 },
    /// Keep the top `k` singular values where `k` is chosen by applying the
    /// two-Gaussian profile-likelihood elbow `n_elbows` times.
    Elbow { n_elbows: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UsvtOptions {
    pub threshold_rule: ThresholdRule,
    pub clip_to_unit: bool,
    pub hollow_output: bool,
}

impl UsvtOptions {
    /// Explicit threshold with the 0/1-graph defaults: clip and hollow on.
    pub fn explicit(t: f64) -> Self {
        Self {
            threshold_rule: ThresholdRule::Explicit(t),
            clip_to_unit: true,
            hollow_output: true,
        }
    }

    pub fn scaled(a: f64, r_hat: f64) -> Self {
        Self {
            threshold_rule: ThresholdRule::Scaled { a, r_hat },
            clip_to_unit: true,
            hollow_output: true,
        }
    }

    /// Elbow rule with weighted-graph defaults: no clipping, no hollowing.
    pub fn elbow(n_elbows: usize) -> Self {
        Self {
            threshold_rule: ThresholdRule::Elbow { n_elbows },
            clip_to_unit: false,
            hollow_output: false,
        }
    }

    pub fn with_clip(mut self, clip: bool) -> Self {
        self.clip_to_unit = clip;
        self
    }

    pub fn with_hollow(mut self, hollow: bool) -> Self {
        self.hollow_output = hollow;
        self
    }

    fn validate(&self) -> Result<()> {
        match self.threshold_rule {
            ThresholdRule::Explicit(t) => {
                if t > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidArgument(format!(
                        "explicit threshold must be positive, got {t}"
                    )))
                }
            }
            ThresholdRule::Scaled { a, r_hat } => {
                if a > 0.0 && r_hat > 0.0 && r_hat <= 1.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidArgument(format!(
                        "scaled threshold needs a > 0 and r_hat in (0, 1], got a = {a}, r_hat = {r_hat}"
                    )))
                }
            }
            ThresholdRule::Elbow { n_elbows } => {
                if n_elbows >= 1 {
                    Ok(())
                } else {
                    Err(Error::InvalidArgument(
                        "elbow rule needs n_elbows >= 1".into(),
                    ))
                }
            }
        }
    }
}

/// Output of [`usvt_estimate`].
#[derive(Debug, Clone)]
pub struct UsvtEstimate {
    pub q_hat: Array2<f64>,
    pub retained_rank: usize,
    /// Full singular value list, descending.
    pub singular_values: Vec<f64>,
    /// The cutoff actually applied. For the elbow rule this records the
    /// largest excluded singular value (0 when everything was kept); the
    /// retained rank is the authoritative quantity there.
    pub threshold_used: f64,
}

/// The scale-aware threshold `a * sqrt(n * r_hat)`.
pub fn scaled_threshold(n: usize, r_hat: f64, a: f64) -> f64 {
    a * (n as f64 * r_hat).sqrt()
}

/// Singular value thresholding estimate of the expectation of a symmetric
/// matrix.
pub fn usvt_estimate(a: &ArrayView2<f64>, opts: &UsvtOptions) -> Result<UsvtEstimate> {
    opts.validate()?;
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::dimension("usvt_estimate", n, a.ncols()));
    }
    if !is_symmetric(a, 1e-8) {
        return Err(Error::InvalidArgument(
            "usvt_estimate expects a symmetric matrix".into(),
        ));
    }

    let eig = sym_eigen(a)?;

    // Eigenpair indices sorted by |lambda| descending; stable on ties.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.values[j]
            .abs()
            .partial_cmp(&eig.values[i].abs())
            .expect("finite eigenvalues")
    });
    let singular_values: Vec<f64> = order.iter().map(|&i| eig.values[i].abs()).collect();

    let (retained_rank, threshold_used) = match opts.threshold_rule {
        ThresholdRule::Explicit(t) => {
            (singular_values.iter().filter(|&&s| s > t).count(), t)
        }
        ThresholdRule::Scaled { a: factor, r_hat } => {
            let t = scaled_threshold(n, r_hat, factor);
            (singular_values.iter().filter(|&&s| s > t).count(), t)
        }
        ThresholdRule::Elbow { n_elbows } => {
            let rank = elbow_rank(&singular_values, n_elbows)?;
            let excluded = singular_values.get(rank).copied().unwrap_or(0.0);
            (rank, excluded)
        }
    };

    // Truncated reconstruction sum_{kept} lambda_i v_i v_i^T.
    let mut q_hat = Array2::<f64>::zeros((n, n));
    if retained_rank > 0 {
        let mut v_r = Array2::<f64>::zeros((n, retained_rank));
        let mut w = Array2::<f64>::zeros((n, retained_rank));
        for (col, &idx) in order.iter().take(retained_rank).enumerate() {
            let lambda = eig.values[idx];
            for row in 0..n {
                let x = eig.vectors[[row, idx]];
                v_r[[row, col]] = x;
                w[[row, col]] = lambda * x;
            }
        }
        q_hat = w.dot(&v_r.t());
    }

    // Floating-point SVD of a symmetric matrix can break symmetry at the
    // 1e-15 scale; downstream invariants require exact symmetry.
    for u in 0..n {
        for v in (u + 1)..n {
            let avg = 0.5 * (q_hat[[u, v]] + q_hat[[v, u]]);
            q_hat[[u, v]] = avg;
            q_hat[[v, u]] = avg;
        }
    }

    if opts.clip_to_unit {
        q_hat.mapv_inplace(clip_unit);
    }
    if opts.hollow_output {
        crate::linalg::make_hollow(&mut q_hat);
    }

    Ok(UsvtEstimate {
        q_hat,
        retained_rank,
        singular_values,
        threshold_used,
    })
}

#[inline]
pub(crate) fn clip_unit(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// Profile-likelihood elbow of a descending scree list: the split index
/// maximizing the two-segment Gaussian log likelihood with one pooled
/// variance, applied `n_elbows` times successively on the tail. Returns a
/// rank in `1..=len`.
pub fn elbow_rank(singular_values: &[f64], n_elbows: usize) -> Result<usize> {
    if singular_values.is_empty() {
        return Err(Error::EmptyInput("elbow_rank needs a nonempty list"));
    }
    if n_elbows == 0 {
        return Err(Error::InvalidArgument("n_elbows must be >= 1".into()));
    }
    if singular_values.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InvalidArgument(
            "elbow_rank expects a descending list".into(),
        ));
    }

    let mut cut = 0usize;
    for _ in 0..n_elbows {
        let tail = &singular_values[cut..];
        if tail.is_empty() {
            break;
        }
        cut += profile_likelihood_split(tail);
    }
    Ok(cut)
}

/// Best split position q in 1..=d: values[..q] and values[q..] as two
/// Gaussians with a shared variance (pooled maximum-likelihood estimate).
/// Ties go to the smaller q.
fn profile_likelihood_split(values: &[f64]) -> usize {
    let d = values.len();
    if d == 1 {
        return 1;
    }
    let mut best_q = 1usize;
    let mut best_ll = f64::NEG_INFINITY;
    for q in 1..=d {
        let (head, tail) = values.split_at(q);
        let ss = segment_ss(head) + segment_ss(tail);
        let var = ss / d as f64;
        let ll = if var <= 0.0 {
            f64::INFINITY
        } else {
            -0.5 * d as f64 * ((2.0 * std::f64::consts::PI * var).ln() + 1.0)
        };
        if ll > best_ll {
            best_ll = ll;
            best_q = q;
        }
    }
    best_q
}

fn segment_ss(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    xs.iter().map(|x| (x - mean) * (x - mean)).sum()
}

/// Centers a matrix by an estimate of its expectation. Entries may go
/// negative; the matcher accepts weighted matrices.
pub fn center(a: &ArrayView2<f64>, q_hat: &ArrayView2<f64>) -> Result<Array2<f64>> {
    if a.dim() != q_hat.dim() {
        return Err(Error::dimension("center", a.nrows(), q_hat.nrows()));
    }
    Ok(a - q_hat)
}
