//! Permutations and exact linear assignment.
//!
//! The assignment solver is the direction-finding and projection subroutine
//! of the Frank-Wolfe matcher: given a dense score matrix it returns a
//! permutation maximizing the total score, exactly, via the
//! shortest-augmenting-path (Jonker-Volgenant) method on negated scores.

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};

/// Largest n for which exhaustive enumeration oracles are allowed.
pub const BRUTE_FORCE_LAP_MAX: usize = 9;

/// Tolerance for objective ties; exact for the integer-valued scores the
/// small-n tests use.
const TIE_EPS: f64 = 1e-9;

/// A bijection on `0..n`, stored as its image: vertex `i` maps to `image[i]`.
///
/// As a matrix, `P(i, j) = 1` iff `j = image[i]`, so relabeling a symmetric
/// matrix is `(P B P^T)(u, v) = B(image[u], image[v])`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &v in &image {
            if v >= n || seen[v] {
                return Err(Error::InvalidArgument(format!(
                    "image {image:?} is not a bijection on 0..{n}"
                )));
            }
            seen[v] = true;
        }
        Ok(Self { image })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            image: (0..n).collect(),
        }
    }

    /// The block interchange on `2 * half` vertices: `i <-> i + half`.
    pub fn block_swap(half: usize) -> Self {
        let n = 2 * half;
        Self {
            image: (0..n).map(|i| (i + half) % n).collect(),
        }
    }

    /// Transposition of `u` and `v` on `0..n`.
    pub fn transposition(n: usize, u: usize, v: usize) -> Self {
        let mut image: Vec<usize> = (0..n).collect();
        image.swap(u, v);
        Self { image }
    }

    pub fn n(&self) -> usize {
        self.image.len()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0usize; self.n()];
        for (i, &v) in self.image.iter().enumerate() {
            inv[v] = i;
        }
        Self { image: inv }
    }

    /// Composition `self` after `other`: `i -> self(other(i))`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.n(), other.n());
        Self {
            image: other.image.iter().map(|&i| self.image[i]).collect(),
        }
    }

    pub fn fixed_point_count(&self) -> usize {
        self.image.iter().enumerate().filter(|(i, &v)| *i == v).count()
    }

    /// Number of non-fixed points (the `k` of the permutation classes).
    pub fn moved_count(&self) -> usize {
        self.n() - self.fixed_point_count()
    }

    /// Number of 2-cycles: pairs `u < v` with `u -> v` and `v -> u`.
    pub fn transposition_count(&self) -> usize {
        let mut count = 0;
        for (u, &v) in self.image.iter().enumerate() {
            if v > u && self.image[v] == u {
                count += 1;
            }
        }
        count
    }

    /// Whether all of `0..n_core` are fixed points.
    pub fn fixes_prefix(&self, n_core: usize) -> bool {
        self.image.iter().take(n_core).enumerate().all(|(i, &v)| i == v)
    }

    /// Relabels a square matrix: `out(u, v) = m(image[u], image[v])`.
    pub fn conjugate(&self, m: &ArrayView2<f64>) -> Array2<f64> {
        let n = self.n();
        assert_eq!(m.nrows(), n);
        assert_eq!(m.ncols(), n);
        let mut out = Array2::<f64>::zeros((n, n));
        for u in 0..n {
            for v in 0..n {
                out[[u, v]] = m[[self.image[u], self.image[v]]];
            }
        }
        out
    }

    /// Dense permutation matrix with `P(i, j) = 1` iff `j = image[i]`.
    pub fn to_matrix(&self) -> Array2<f64> {
        let n = self.n();
        let mut p = Array2::<f64>::zeros((n, n));
        for (i, &j) in self.image.iter().enumerate() {
            p[[i, j]] = 1.0;
        }
        p
    }
}

/// All images of permutations of `0..n` in lexicographic order. Intended for
/// the exhaustive small-n oracles.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn rec(n: usize, current: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                current.push(v);
                rec(n, current, used, out);
                current.pop();
                used[v] = false;
            }
        }
    }
    rec(n, &mut current, &mut used, &mut out);
    out
}

/// Exact maximum-score assignment on a dense square matrix.
///
/// Returns the permutation maximizing `sum_i score(i, image[i])` together
/// with that value. Among multiple optima the lexicographically smallest
/// image is returned for `n <= 9` (a deterministic fixed processing order
/// applies at larger n).
pub fn solve_lap_max(score: &ArrayView2<f64>) -> Result<(Permutation, f64)> {
    let n = score.nrows();
    if score.ncols() != n {
        return Err(Error::dimension("solve_lap_max", n, score.ncols()));
    }
    if score.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    if n == 0 {
        return Ok((Permutation::identity(0), 0.0));
    }

    // Minimize negated scores.
    let cost: Vec<f64> = score.iter().map(|&x| -x).collect();
    let (mut assignment, u, v) = jv_dense_min(&cost, n);

    if n <= BRUTE_FORCE_LAP_MAX {
        lexicographic_refine(&cost, n, &u, &v, &mut assignment);
    }

    let value: f64 = assignment
        .iter()
        .enumerate()
        .map(|(i, &j)| score[[i, j]])
        .sum();
    Ok((Permutation { image: assignment }, value))
}

/// Dense Jonker-Volgenant shortest augmenting path, minimization.
/// Returns (assignment row -> column, row duals, column duals).
fn jv_dense_min(cost: &[f64], n: usize) -> (Vec<usize>, Vec<f64>, Vec<f64>) {
    // 1-based internally; p[j] = row matched to column j (0 = free).
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];

        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;

            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }

            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }

            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }

        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        if p[j] > 0 {
            assignment[p[j] - 1] = j - 1;
        }
    }
    (assignment, u[1..].to_vec(), v[1..].to_vec())
}

/// Replaces the assignment with the lexicographically smallest image among
/// all optima, using complementary slackness: with optimal duals, every
/// optimal assignment uses only tight (zero reduced cost) edges.
fn lexicographic_refine(cost: &[f64], n: usize, u: &[f64], v: &[f64], assignment: &mut Vec<usize>) {
    let scale = cost.iter().fold(1.0f64, |m, &c| m.max(c.abs()));
    let tol = TIE_EPS * scale;
    let tight = |i: usize, j: usize| (cost[i * n + j] - u[i] - v[j]).abs() <= tol;

    let mut chosen = vec![usize::MAX; n];
    let mut col_used = vec![false; n];
    for (i, slot) in chosen.iter_mut().enumerate() {
        let mut placed = false;
        for j in 0..n {
            if col_used[j] || !tight(i, j) {
                continue;
            }
            // Does a perfect matching on tight edges survive fixing i -> j?
            col_used[j] = true;
            if tight_matching_exists(n, i + 1, &col_used, &tight) {
                *slot = j;
                placed = true;
                break;
            }
            col_used[j] = false;
        }
        if !placed {
            // Numerical tolerance failed to certify a matching; keep the
            // solver's (already optimal) assignment.
            return;
        }
    }
    *assignment = chosen;
}

/// Kuhn's algorithm: can rows `from..n` be perfectly matched into the unused
/// columns using tight edges only?
fn tight_matching_exists<F: Fn(usize, usize) -> bool>(
    n: usize,
    from: usize,
    col_used: &[bool],
    tight: &F,
) -> bool {
    let mut match_col = vec![usize::MAX; n];
    fn try_row<F: Fn(usize, usize) -> bool>(
        i: usize,
        n: usize,
        col_used: &[bool],
        tight: &F,
        seen: &mut [bool],
        match_col: &mut [usize],
    ) -> bool {
        for j in 0..n {
            if col_used[j] || seen[j] || !tight(i, j) {
                continue;
            }
            seen[j] = true;
            if match_col[j] == usize::MAX
                || try_row(match_col[j], n, col_used, tight, seen, match_col)
            {
                match_col[j] = i;
                return true;
            }
        }
        false
    }
    for i in from..n {
        let mut seen = vec![false; n];
        if !try_row(i, n, col_used, tight, &mut seen, &mut match_col) {
            return false;
        }
    }
    true
}

/// Exhaustive assignment oracle: maximizes over all `n!` permutations with
/// the same lexicographic tie-break as [`solve_lap_max`]. Rejects `n > 9`.
pub fn brute_force_lap(score: &ArrayView2<f64>) -> Result<(Permutation, f64)> {
    let n = score.nrows();
    if score.ncols() != n {
        return Err(Error::dimension("brute_force_lap", n, score.ncols()));
    }
    if n > BRUTE_FORCE_LAP_MAX {
        return Err(Error::SizeLimit {
            n,
            max: BRUTE_FORCE_LAP_MAX,
        });
    }
    if n == 0 {
        return Ok((Permutation::identity(0), 0.0));
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    for image in all_permutations(n) {
        let value: f64 = image.iter().enumerate().map(|(i, &j)| score[[i, j]]).sum();
        match &best {
            Some((_, bv)) if value <= bv + TIE_EPS => {}
            _ => best = Some((image, value)),
        }
    }
    let (image, value) = best.expect("n >= 1");
    Ok((Permutation { image }, value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use ndarray::array;

    #[test]
    fn permutation_validation() {
        assert!(Permutation::new(vec![0, 1, 2]).is_ok());
        assert!(Permutation::new(vec![0, 0, 2]).is_err());
        assert!(Permutation::new(vec![0, 3, 1]).is_err());
    }

    #[test]
    fn transposition_count_examples() {
        let swap = Permutation::transposition(4, 0, 1);
        assert_eq!(swap.moved_count(), 2);
        assert_eq!(swap.transposition_count(), 1);

        let three_cycle = Permutation::new(vec![1, 2, 0]).unwrap();
        assert_eq!(three_cycle.moved_count(), 3);
        assert_eq!(three_cycle.transposition_count(), 0);

        let double = Permutation::new(vec![1, 0, 3, 2]).unwrap();
        assert_eq!(double.transposition_count(), 2);
    }

    #[test]
    fn conjugate_relabels() {
        let b = array![[0.0, 1.0, 0.0], [1.0, 0.0, 2.0], [0.0, 2.0, 0.0]];
        let p = Permutation::new(vec![2, 0, 1]).unwrap();
        let pbp = p.conjugate(&b.view());
        // out(u, v) = b(p(u), p(v))
        assert_eq!(pbp[[0, 1]], b[[2, 0]]);
        assert_eq!(pbp[[1, 2]], b[[0, 1]]);
        // matrix route agrees
        let pm = p.to_matrix();
        let via_matrix = pm.dot(&b).dot(&pm.t());
        assert_eq!(pbp, via_matrix);
    }

    #[test]
    fn block_swap_shape() {
        let p = Permutation::block_swap(2);
        assert_eq!(p.image(), &[2, 3, 0, 1]);
        assert_eq!(p.moved_count(), 4);
        assert_eq!(p.transposition_count(), 2);
    }

    #[test]
    fn identity_dominant_score() {
        let mut score = Array2::<f64>::zeros((5, 5));
        for i in 0..5 {
            score[[i, i]] = 1.0;
        }
        let (p, value) = solve_lap_max(&score.view()).unwrap();
        assert!(p.is_identity());
        assert_eq!(value, 5.0);
    }

    #[test]
    fn forced_swap() {
        let score = array![[0.0, 1.0], [1.0, 0.0]];
        let (p, value) = solve_lap_max(&score.view()).unwrap();
        assert_eq!(p.image(), &[1, 0]);
        assert_eq!(value, 2.0);
    }

    #[test]
    fn constant_sum_matrix_breaks_ties_lexicographically() {
        // Every permutation scores 15; the smallest image must come back.
        let score = array![[1.0, 2.0, 3.0], [4.0, 5.0, 6.0], [7.0, 8.0, 9.0]];
        let (p, value) = solve_lap_max(&score.view()).unwrap();
        assert_eq!(value, 15.0);
        assert_eq!(p.image(), &[0, 1, 2]);
        let (bp, bv) = brute_force_lap(&score.view()).unwrap();
        assert_eq!(bv, 15.0);
        assert_eq!(bp.image(), &[0, 1, 2]);
    }

    #[test]
    fn brute_force_size_limit() {
        let score = Array2::<f64>::zeros((10, 10));
        assert!(matches!(
            brute_force_lap(&score.view()),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn brute_force_singleton() {
        let score = array![[5.0]];
        let (p, value) = brute_force_lap(&score.view()).unwrap();
        assert!(p.is_identity());
        assert_eq!(value, 5.0);
    }

    #[test]
    fn rejects_non_finite() {
        let score = array![[f64::NAN, 0.0], [0.0, 1.0]];
        assert!(matches!(
            solve_lap_max(&score.view()),
            Err(Error::NonFinite)
        ));
    }

    #[test]
    fn agrees_with_brute_force_on_random_integer_instances() {
        let mut rng = SplitMix64::new(2024);
        for trial in 0..100 {
            let n = 6;
            let mut score = Array2::<f64>::zeros((n, n));
            for i in 0..n {
                for j in 0..n {
                    score[[i, j]] = rng.next_below(13) as f64 - 6.0;
                }
            }
            let (fast, fv) = solve_lap_max(&score.view()).unwrap();
            let (slow, sv) = brute_force_lap(&score.view()).unwrap();
            assert_eq!(fv, sv, "trial {trial}: value mismatch");
            assert_eq!(fast.image(), slow.image(), "trial {trial}: tie-break mismatch");
        }
    }

    #[test]
    fn agrees_with_brute_force_on_random_float_instances() {
        let mut rng = SplitMix64::new(77);
        for n in 2..=7usize {
            for _ in 0..25 {
                let mut score = Array2::<f64>::zeros((n, n));
                for i in 0..n {
                    for j in 0..n {
                        score[[i, j]] = rng.next_f64() * 10.0 - 5.0;
                    }
                }
                let (_, fv) = solve_lap_max(&score.view()).unwrap();
                let (_, sv) = brute_force_lap(&score.view()).unwrap();
                assert!((fv - sv).abs() < 1e-9, "n={n}: {fv} vs {sv}");
            }
        }
    }

    #[test]
    fn row_shift_invariance() {
        let mut rng = SplitMix64::new(31);
        for _ in 0..40 {
            let n = 6;
            let mut score = Array2::<f64>::zeros((n, n));
            for i in 0..n {
                for j in 0..n {
                    score[[i, j]] = rng.next_below(9) as f64;
                }
            }
            let (base_p, base_v) = solve_lap_max(&score.view()).unwrap();
            let shift = 3.5;
            let row = rng.next_below(n);
            let mut shifted = score.clone();
            for j in 0..n {
                shifted[[row, j]] += shift;
            }
            let (p, v) = solve_lap_max(&shifted.view()).unwrap();
            assert!((v - (base_v + shift)).abs() < 1e-9);
            assert_eq!(p.image(), base_p.image());
        }
    }
}
