//! Additive edge noise on an induced subgraph, with binarization.

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

const STREAM_NOISE: u64 = 0x6e6f_6973; // "nois"

/// Samples `C ~ ER(|subset|, q)` and sets `b[S] <- min(1, b[S] + C)` on the
/// induced subgraph; everything else is untouched. Deterministic for a fixed
/// seed: subset pair `(i, j)` (row-major over i < j in subset order) draws
/// from its own substream.
pub fn inject_block_noise(
    b: &ArrayView2<f64>,
    vertex_subset: &[usize],
    q: f64,
    seed: u64,
) -> Result<Array2<f64>> {
    let n = b.nrows();
    if b.ncols() != n {
        return Err(Error::dimension("inject_block_noise", n, b.ncols()));
    }
    if b.iter().any(|&x| x != 0.0 && x != 1.0) {
        return Err(Error::InvalidArgument(
            "inject_block_noise expects a 0/1 matrix".into(),
        ));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidArgument(format!(
            "noise density {q} outside [0, 1]"
        )));
    }
    let mut seen = vec![false; n];
    for &v in vertex_subset {
        if v >= n {
            return Err(Error::InvalidArgument(format!(
                "subset vertex {v} out of range for n = {n}"
            )));
        }
        if seen[v] {
            return Err(Error::InvalidArgument(format!(
                "subset vertex {v} repeated"
            )));
        }
        seen[v] = true;
    }

    let mut out = b.to_owned();
    let k = vertex_subset.len();
    let mut pair_index = 0u64;
    for i in 0..k {
        for j in (i + 1)..k {
            let mut rng = SplitMix64::substream(seed, &[STREAM_NOISE, pair_index]);
            if rng.bernoulli(q) {
                let (u, v) = (vertex_subset[i], vertex_subset[j]);
                out[[u, v]] = 1.0;
                out[[v, u]] = 1.0;
            }
            pair_index += 1;
        }
    }
    Ok(out)
}
