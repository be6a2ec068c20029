//! Fixed-order pairwise summation.
//!
//! The reduction tree depends only on the slice length, so a sum over blocks
//! is bit-identical however the terms were produced.

const LEAF: usize = 8;

pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= LEAF {
        let mut acc = 0.0;
        for &v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Pairwise sum of `weights[i] * values[i]`.
pub fn pairwise_dot(weights: &[f64], values: &[f64]) -> f64 {
    assert_eq!(weights.len(), values.len());
    if values.len() <= LEAF {
        let mut acc = 0.0;
        for (w, v) in weights.iter().zip(values) {
            acc += w * v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_dot(&weights[..mid], &values[..mid]) + pairwise_dot(&weights[mid..], &values[mid..])
}

/// Order-preserving map, run on the rayon pool when the `parallel` feature is on.
pub(crate) fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}
