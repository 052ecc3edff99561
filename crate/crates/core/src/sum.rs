//! Deterministic pairwise summation.
//!
//! Parallel reductions split the input into fixed-size blocks whose
//! boundaries depend only on the input length, so the rounding pattern is
//! identical for every thread count.

use num_complex::Complex64;
use rayon::prelude::*;
use std::ops::Add;

const BLOCK: usize = 64;
const PAR_BLOCK: usize = 4096;

fn pairwise<T: Copy + Add<Output = T>>(xs: &[T], zero: T) -> T {
    if xs.len() <= BLOCK {
        return xs.iter().fold(zero, |acc, &x| acc + x);
    }
    let mid = xs.len() / 2;
    pairwise(&xs[..mid], zero) + pairwise(&xs[mid..], zero)
}

pub fn sum_f64(xs: &[f64]) -> f64 {
    pairwise(xs, 0.0)
}

pub fn sum_c64(xs: &[Complex64]) -> Complex64 {
    pairwise(xs, Complex64::new(0.0, 0.0))
}

/// Sum of `f(i)` for `i` in `0..n`, evaluated in parallel with a
/// thread-count independent reduction order.
pub fn par_sum_map<F>(n: usize, f: F) -> Complex64
where
    F: Fn(usize) -> Complex64 + Sync,
{
    let partials: Vec<Complex64> = (0..n.div_ceil(PAR_BLOCK))
        .into_par_iter()
        .map(|b| {
            let lo = b * PAR_BLOCK;
            let hi = (lo + PAR_BLOCK).min(n);
            let vals: Vec<Complex64> = (lo..hi).map(&f).collect();
            sum_c64(&vals)
        })
        .collect();
    sum_c64(&partials)
}

/// Real counterpart of [`par_sum_map`].
pub fn par_sum_map_f64<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let partials: Vec<f64> = (0..n.div_ceil(PAR_BLOCK))
        .into_par_iter()
        .map(|b| {
            let lo = b * PAR_BLOCK;
            let hi = (lo + PAR_BLOCK).min(n);
            let vals: Vec<f64> = (lo..hi).map(&f).collect();
            sum_f64(&vals)
        })
        .collect();
    sum_f64(&partials)
}
