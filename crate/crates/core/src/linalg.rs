//! Dense symmetric eigendecomposition and small matrix helpers.
//!
//! Every matrix this crate decomposes is symmetric (adjacency matrices,
//! centered adjacency matrices, probability matrices), so a full SVD
//! reduces to the symmetric eigenproblem: if `A = V diag(d) V^T` then the
//! singular values of `A` are `|d|` with the same vectors. The solver below
//! is the classic Householder tridiagonalization followed by implicit-shift
//! QL iteration (EISPACK `tred2`/`tql2`), which is deterministic for a fixed
//! input — a requirement for the seeded experiment pipeline.

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};

/// Eigendecomposition of a symmetric matrix: `a = vectors * diag(values) * vectors^T`,
/// eigenvalues ascending, eigenvector `i` in column `i`.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Array2<f64>,
}

const MAX_QL_ITERS: usize = 100;

/// Symmetric eigendecomposition. The input is read as symmetric (only one
/// triangle is trusted after an explicit symmetry check by the callers);
/// non-finite entries are rejected.
pub fn sym_eigen(a: &ArrayView2<f64>) -> Result<SymEigen> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::dimension("sym_eigen", n, a.ncols()));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    if n == 0 {
        return Ok(SymEigen {
            values: Vec::new(),
            vectors: Array2::zeros((0, 0)),
        });
    }

    // Work on a flat row-major copy; v holds A on input and the accumulated
    // orthogonal transform on output.
    let mut v: Vec<f64> = a.iter().copied().collect();
    let mut d = vec![0.0f64; n];
    let mut e = vec![0.0f64; n];

    tred2(&mut v, &mut d, &mut e, n);
    tql2(&mut v, &mut d, &mut e, n)?;
    sort_pairs_ascending(&mut v, &mut d, n);

    let vectors = Array2::from_shape_vec((n, n), v).expect("shape");
    Ok(SymEigen { values: d, vectors })
}

/// Householder reduction to tridiagonal form (EISPACK tred2).
/// On exit: d = diagonal, e = subdiagonal (e[0] = 0), v = transform Q with
/// Q^T A Q tridiagonal.
fn tred2(v: &mut [f64], d: &mut [f64], e: &mut [f64], n: usize) {
    let ix = |i: usize, j: usize| i * n + j;

    for j in 0..n {
        d[j] = v[ix(n - 1, j)];
    }

    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for item in d.iter().take(i) {
            scale += item.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[ix(i - 1, j)];
                v[ix(i, j)] = 0.0;
                v[ix(j, i)] = 0.0;
            }
        } else {
            for item in d.iter_mut().take(i) {
                *item /= scale;
                h += *item * *item;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for item in e.iter_mut().take(i) {
                *item = 0.0;
            }

            for j in 0..i {
                f = d[j];
                v[ix(j, i)] = f;
                g = e[j] + v[ix(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[ix(k, j)] * d[k];
                    e[k] += v[ix(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[ix(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[ix(i - 1, j)];
                v[ix(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    // Accumulate transformations.
    for i in 0..(n - 1) {
        v[ix(n - 1, i)] = v[ix(i, i)];
        v[ix(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[ix(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[ix(k, i + 1)] * v[ix(k, j)];
                }
                for k in 0..=i {
                    v[ix(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[ix(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[ix(n - 1, j)];
        v[ix(n - 1, j)] = 0.0;
    }
    v[ix(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit-shift QL iteration on the tridiagonal form (EISPACK tql2),
/// accumulating rotations into the eigenvector matrix.
///
/// The rotation loop touches two columns of v per step; we run it on the
/// transposed buffer so those become contiguous rows.
fn tql2(v: &mut [f64], d: &mut [f64], e: &mut [f64], n: usize) -> Result<()> {
    transpose_in_place(v, n);
    let result = tql2_rows(v, d, e, n);
    transpose_in_place(v, n);
    result
}

fn tql2_rows(vt: &mut [f64], d: &mut [f64], e: &mut [f64], n: usize) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0f64;
    let mut tst1 = 0.0f64;
    let eps = 2.0f64.powi(-52);

    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        // e[n-1] is zero, so m < n always holds when the loop exits.
        if m > l {
            let mut iter = 0usize;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERS {
                    return Err(Error::NoConvergence("QL eigenvalue iteration"));
                }

                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for item in d.iter_mut().take(n).skip(l + 2) {
                    *item -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0f64;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0f64;
                let mut s2 = 0.0f64;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let gg = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * gg;
                    d[i + 1] = h + s * (c * gg + s * d[i]);

                    // Plane rotation applied to eigenvectors i and i+1
                    // (rows of the transposed buffer).
                    let (row_i, row_i1) = vt[i * n..].split_at_mut(n);
                    for (vi, vi1) in row_i.iter_mut().zip(row_i1[..n].iter_mut()) {
                        let hh = *vi1;
                        *vi1 = s * *vi + c * hh;
                        *vi = c * *vi - s * hh;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

fn transpose_in_place(v: &mut [f64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            v.swap(i * n + j, j * n + i);
        }
    }
}

/// Stable selection sort of eigenpairs by ascending eigenvalue (matches the
/// classic implementations; n is never large enough for O(n^2) to matter).
fn sort_pairs_ascending(v: &mut [f64], d: &mut [f64], n: usize) {
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for (j, &dj) in d.iter().enumerate().take(n).skip(i + 1) {
            if dj < p {
                k = j;
                p = dj;
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            for row in 0..n {
                v.swap(row * n + i, row * n + k);
            }
        }
    }
}

/// Singular values of a symmetric matrix from its eigenvalues: |lambda|,
/// descending. Ties keep the more-negative eigenvalue later for determinism.
pub fn singular_values_desc(eigenvalues: &[f64]) -> Vec<f64> {
    let mut sv: Vec<f64> = eigenvalues.iter().map(|x| x.abs()).collect();
    sv.sort_by(|a, b| b.partial_cmp(a).expect("finite singular values"));
    sv
}

pub fn frobenius_norm(a: &ArrayView2<f64>) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Frobenius inner product <a, b>.
pub fn frobenius_inner(a: &ArrayView2<f64>, b: &ArrayView2<f64>) -> f64 {
    debug_assert_eq!(a.dim(), b.dim());
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

pub fn is_symmetric(a: &ArrayView2<f64>, tol: f64) -> bool {
    let n = a.nrows();
    if a.ncols() != n {
        return false;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (a[[i, j]] - a[[j, i]]).abs() > tol {
                return false;
            }
        }
    }
    true
}

/// Zeroes the diagonal in place.
pub fn make_hollow(a: &mut Array2<f64>) {
    let n = a.nrows().min(a.ncols());
    for i in 0..n {
        a[[i, i]] = 0.0;
    }
}
