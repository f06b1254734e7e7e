//! Partial sums of coefficient series at a list of truncation sizes.

use rayon::prelude::*;

/// `2^lo, 2^{lo+1}, …, 2^hi`.
pub fn dyadic_sizes(lo: u32, hi: u32) -> Vec<usize> {
    (lo..=hi).map(|e| 1usize << e).collect()
}

/// Dyadic sizes ending at `max` (rounded down to a power of two), at least
/// four of them; the lowest exponent is 8 when `max` allows it.
pub fn dyadic_sizes_up_to(max: usize) -> Vec<usize> {
    let hi = usize::BITS - 1 - max.max(16).leading_zeros();
    let lo = 8.min(hi - 3);
    dyadic_sizes(lo, hi)
}

/// `(N, Σ_{k≤N} t(k))` for each `N` in `sizes` (ascending).
pub fn partial_sums_1d(sizes: &[usize], term: impl Fn(usize) -> f64) -> Vec<(usize, f64)> {
    let mut out = Vec::with_capacity(sizes.len());
    let mut acc = 0.0;
    let mut k = 0;
    for &n in sizes {
        while k <= n {
            acc += term(k);
            k += 1;
        }
        out.push((n, acc));
    }
    out
}

/// `(N, Σ_{k≤N, l≤N} t(k,l))` over the square box for each `N` in `sizes`.
///
/// Rows are summed in parallel; every cutoff is reduced in row order, so the
/// result does not depend on the thread count.
pub fn box_partial_sums(sizes: &[usize], term: impl Fn(usize, usize) -> f64 + Sync) -> Vec<(usize, f64)> {
    let nmax = *sizes.last().expect("at least one size");
    let rows: Vec<Vec<f64>> = (0..=nmax)
        .into_par_iter()
        .map(|k| {
            // per-row prefix sums at every cutoff
            let mut cuts = Vec::with_capacity(sizes.len());
            let mut acc = 0.0;
            let mut l = 0;
            for &n in sizes {
                while l <= n {
                    acc += term(k, l);
                    l += 1;
                }
                cuts.push(acc);
            }
            cuts
        })
        .collect();
    sizes
        .iter()
        .enumerate()
        .map(|(j, &n)| (n, rows[..=n].iter().map(|r| r[j]).sum()))
        .collect()
}

/// Per-diagonal values `(0..=nmax).map(d)` computed in parallel.
pub fn diagonal_values(nmax: usize, d: impl Fn(usize) -> f64 + Sync + Send) -> Vec<f64> {
    (0..=nmax).into_par_iter().map(d).collect()
}
