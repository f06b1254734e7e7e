//! Gamma-function helpers used by the radial Beta weights.
//!
//! `ln_gamma` itself comes from `statrs`; what lives here is the ratio
//! `ln Γ(x + a) − ln Γ(x)`, which loses all its digits to cancellation when
//! formed as a plain difference at large `x`.

use statrs::function::gamma::ln_gamma;

/// Below this argument the plain difference of log-gammas is accurate enough.
const STIRLING_MIN: f64 = 20.0;

/// Stirling correction series `ln Γ(x) − [(x − ½) ln x − x + ½ ln 2π]`.
fn stirling_correction(x: f64) -> f64 {
    const C: [f64; 5] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
    ];
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut p = inv;
    let mut s = 0.0;
    for c in C {
        s += c * p;
        p *= inv2;
    }
    s
}

/// `ln Γ(x + a) − ln Γ(x)` for `x > 0`, `x + a > 0`.
pub fn ln_gamma_ratio(x: f64, a: f64) -> f64 {
    if x >= STIRLING_MIN && x + a >= STIRLING_MIN {
        (x - 0.5) * (a / x).ln_1p() + a * (x + a).ln() - a + stirling_correction(x + a)
            - stirling_correction(x)
    } else {
        ln_gamma(x + a) - ln_gamma(x)
    }
}

/// `ln B(k + 1, s)` for integer `k ≥ 0` and real `s > 0`.
pub fn ln_beta_index(k: usize, s: f64) -> f64 {
    ln_gamma(s) - ln_gamma_ratio(k as f64 + 1.0, s)
}

/// Returns `Some(n)` when `s` is (numerically exactly) a small positive integer.
pub(crate) fn small_positive_integer(s: f64) -> Option<u32> {
    if (1.0..=64.0).contains(&s) && s.fract() == 0.0 {
        Some(s as u32)
    } else {
        None
    }
}

/// `ln(n!)` table for `0..=n`.
pub fn ln_factorial_table(n: usize) -> Vec<f64> {
    let mut t = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    t.push(0.0);
    for j in 1..=n {
        acc += (j as f64).ln();
        t.push(acc);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_matches_direct_difference_for_small_arguments() {
        for &(x, a) in &[(1.0, 0.5), (5.0, 2.0), (19.0, 0.3), (25.0, 1.5), (30.0, 0.01)] {
            let direct = ln_gamma(x + a) - ln_gamma(x);
            assert!((ln_gamma_ratio(x, a) - direct).abs() < 1e-12, "x={x} a={a}");
        }
    }

    #[test]
    fn ratio_for_integer_shift_is_log_of_rising_product() {
        // Γ(x+3)/Γ(x) = x(x+1)(x+2)
        for x in [20.0f64, 100.0, 1e4, 1e6] {
            let exact = (x * (x + 1.0) * (x + 2.0)).ln();
            let got = ln_gamma_ratio(x, 3.0);
            assert!((got - exact).abs() < 1e-13 * exact.abs().max(1.0), "x={x}");
        }
    }

    #[test]
    fn ln_beta_index_integer_case() {
        // B(k+1, 1) = 1/(k+1)
        for k in [0usize, 3, 40, 999, 100_000] {
            let v = ln_beta_index(k, 1.0).exp();
            assert!((v * (k as f64 + 1.0) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn factorial_table() {
        let t = ln_factorial_table(10);
        assert!((t[5] - 120f64.ln()).abs() < 1e-14);
        assert_eq!(t.len(), 11);
    }
}
