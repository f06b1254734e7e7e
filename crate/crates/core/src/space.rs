//! Weighted ℓ² structure of the Dirichlet-type spaces `D_α`.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{check_disc, TruncatedSeries, UnivariateSeries, C64, ZERO};

/// Exponent pair `α = (α₁, α₂)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    pub alpha1: f64,
    pub alpha2: f64,
}

impl WeightVector {
    pub const ZERO: WeightVector = WeightVector {
        alpha1: 0.0,
        alpha2: 0.0,
    };

    pub const fn new(alpha1: f64, alpha2: f64) -> Self {
        Self { alpha1, alpha2 }
    }

    pub fn is_finite(&self) -> bool {
        self.alpha1.is_finite() && self.alpha2.is_finite()
    }

    /// Componentwise strict order `self ≻ other`.
    pub fn succ(&self, other: &WeightVector) -> bool {
        self.alpha1 > other.alpha1 && self.alpha2 > other.alpha2
    }

    /// Componentwise order `self ⪰ other`.
    pub fn succeq(&self, other: &WeightVector) -> bool {
        self.alpha1 >= other.alpha1 && self.alpha2 >= other.alpha2
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::new(f(self.alpha1), f(self.alpha2))
    }

    pub fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        Self::new(f(self.alpha1, other.alpha1), f(self.alpha2, other.alpha2))
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.alpha1, self.alpha2)
    }
}

/// Outcome of comparing two weight vectors componentwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartialOrderResult {
    StrictlyGreater,
    GreaterEqual,
    StrictlyLess,
    LessEqual,
    Equal,
    Incomparable,
}

pub fn compare(alpha: &WeightVector, beta: &WeightVector) -> PartialOrderResult {
    use PartialOrderResult::*;
    if alpha == beta {
        Equal
    } else if alpha.succ(beta) {
        StrictlyGreater
    } else if alpha.succeq(beta) {
        GreaterEqual
    } else if beta.succ(alpha) {
        StrictlyLess
    } else if beta.succeq(alpha) {
        LessEqual
    } else {
        Incomparable
    }
}

/// `(k+1)^{α₁} (l+1)^{α₂}`, evaluated in log space.
#[inline]
pub fn weight_at(k: usize, l: usize, alpha: &WeightVector) -> f64 {
    ln_weight(k, l, alpha).exp()
}

#[inline]
pub fn ln_weight(k: usize, l: usize, alpha: &WeightVector) -> f64 {
    alpha.alpha1 * (k as f64 + 1.0).ln() + alpha.alpha2 * (l as f64 + 1.0).ln()
}

/// `(k+1)^a`.
#[inline]
pub fn weight_1d(k: usize, a: f64) -> f64 {
    (a * (k as f64 + 1.0).ln()).exp()
}

/// Sums `row(k)` for `k = 0..rows` in parallel, reducing in index order.
pub(crate) fn ordered_row_sum(rows: usize, row: impl Fn(usize) -> f64 + Sync + Send) -> f64 {
    let parts: Vec<f64> = (0..rows).into_par_iter().map(row).collect();
    parts.iter().sum()
}

pub fn norm_sq(f: &TruncatedSeries, alpha: &WeightVector) -> f64 {
    let cols = f.deg_w() + 1;
    let c = f.coeffs();
    ordered_row_sum(f.deg_z() + 1, |k| {
        let lk = alpha.alpha1 * (k as f64 + 1.0).ln();
        c[k * cols..(k + 1) * cols]
            .iter()
            .enumerate()
            .map(|(l, a)| a.norm_sqr() * (lk + alpha.alpha2 * (l as f64 + 1.0).ln()).exp())
            .sum::<f64>()
    })
}

/// `‖f‖_α = sqrt(Σ |a_{k,l}|² (k+1)^{α₁}(l+1)^{α₂})`.
pub fn norm(f: &TruncatedSeries, alpha: &WeightVector) -> f64 {
    norm_sq(f, alpha).sqrt()
}

/// `(f, g)_α` over the common grid.
pub fn inner_product(f: &TruncatedSeries, g: &TruncatedSeries, alpha: &WeightVector) -> C64 {
    let kmax = f.deg_z().min(g.deg_z());
    let lmax = f.deg_w().min(g.deg_w());
    let mut acc = ZERO;
    for k in 0..=kmax {
        for l in 0..=lmax {
            acc += f.coeff(k, l) * g.coeff(k, l).conj() * weight_at(k, l, alpha);
        }
    }
    acc
}

pub fn norm_sq_1d(g: &UnivariateSeries, a: f64) -> f64 {
    g.coeffs()
        .iter()
        .enumerate()
        .map(|(k, b)| b.norm_sqr() * weight_1d(k, a))
        .sum()
}

/// Norm in the one-variable space `D_a`.
pub fn norm_1d(g: &UnivariateSeries, a: f64) -> f64 {
    norm_sq_1d(g, a).sqrt()
}

/// A truncated value with a rigorous bound on what the truncation dropped.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalNormResult {
    pub value: f64,
    /// Upper bound on `true value − value`.
    pub tail_bound: f64,
    pub truncation: (usize, usize),
}

impl FunctionalNormResult {
    pub fn upper(&self) -> f64 {
        self.value + self.tail_bound
    }
}

/// Terms `(k+1)^{−a} ρ^k` for `k ≤ deg`, `ρ = |z|²`.
fn functional_terms(a: f64, rho: f64, deg: usize) -> Vec<f64> {
    let lr = rho.ln();
    (0..=deg)
        .map(|k| {
            if k == 0 {
                1.0
            } else if rho == 0.0 {
                0.0
            } else {
                (-a * (k as f64 + 1.0).ln() + k as f64 * lr).exp()
            }
        })
        .collect()
}

const TAIL_SCAN_LIMIT: usize = 50_000_000;

/// Rigorous bound on `Σ_{k>deg} (k+1)^{−a} ρ^k` for `0 ≤ ρ < 1`.
///
/// Terms are summed forward until the ratio of successive terms is below a
/// fixed `q < 1` for all later indices; the rest is majorised geometrically.
fn functional_tail(a: f64, rho: f64, deg: usize) -> f64 {
    if rho == 0.0 {
        return 0.0;
    }
    let lr = rho.ln();
    let term = |k: usize| (-a * (k as f64 + 1.0).ln() + k as f64 * lr).exp();
    // ratio t_{k+1}/t_k = ((k+2)/(k+1))^{−a} ρ, nonincreasing in k when a < 0
    let ratio_bound = |k: usize| {
        if a >= 0.0 {
            rho
        } else {
            (-a * ((k as f64 + 2.0) / (k as f64 + 1.0)).ln() + lr).exp()
        }
    };
    let mut scanned = 0.0;
    let mut k = deg + 1;
    loop {
        let q = ratio_bound(k);
        if q < 1.0 - 1e-3 || (q < 1.0 && k > deg + 1_000) {
            return scanned + term(k) / (1.0 - q);
        }
        if k - deg > TAIL_SCAN_LIMIT {
            return f64::INFINITY;
        }
        scanned += term(k);
        k += 1;
    }
}

fn combine(s_terms: (f64, f64), t_terms: (f64, f64), truncation: (usize, usize), s: f64) -> FunctionalNormResult {
    let (a_k, a_t) = s_terms;
    let (b_l, b_t) = t_terms;
    let tail = a_t * b_l + a_k * b_t + a_t * b_t;
    let value = s.sqrt();
    FunctionalNormResult {
        value,
        tail_bound: ((s + tail).sqrt() - value).max(0.0),
        truncation,
    }
}

/// Norm of the point evaluation `f ↦ f(z, w)` on `D_α`, truncated to `deg`.
pub fn eval_functional_norm(
    alpha: &WeightVector,
    z: C64,
    w: C64,
    deg: (usize, usize),
) -> Result<FunctionalNormResult> {
    check_disc(z)?;
    check_disc(w)?;
    let t = functional_terms(alpha.alpha1, z.norm_sqr(), deg.0);
    let u = functional_terms(alpha.alpha2, w.norm_sqr(), deg.1);
    let s = ordered_row_sum(t.len(), |k| {
        let tk = t[k];
        u.iter().map(|&ul| tk * ul).sum::<f64>()
    });
    let a_t = functional_tail(alpha.alpha1, z.norm_sqr(), deg.0);
    let b_t = functional_tail(alpha.alpha2, w.norm_sqr(), deg.1);
    Ok(combine(
        (t.iter().sum(), a_t),
        (u.iter().sum(), b_t),
        deg,
        s,
    ))
}

/// One-variable analogue of [`eval_functional_norm`] on `D_a`.
pub fn eval_functional_norm_1d(a: f64, z: C64, deg: usize) -> Result<FunctionalNormResult> {
    check_disc(z)?;
    let t = functional_terms(a, z.norm_sqr(), deg);
    let s: f64 = t.iter().sum();
    let tail = functional_tail(a, z.norm_sqr(), deg);
    let value = s.sqrt();
    Ok(FunctionalNormResult {
        value,
        tail_bound: ((s + tail).sqrt() - value).max(0.0),
        truncation: (deg, 0),
    })
}

/// Truncated reproducing kernel `K^α_{(z0,w0)}`.
pub fn kernel_series(alpha: &WeightVector, z0: C64, w0: C64, deg: (usize, usize)) -> Result<TruncatedSeries> {
    check_disc(z0)?;
    check_disc(w0)?;
    let pz = kernel_factor(z0, alpha.alpha1, deg.0);
    let pw = kernel_factor(w0, alpha.alpha2, deg.1);
    Ok(TruncatedSeries::from_fn(deg.0, deg.1, |k, l| pz[k] * pw[l]))
}

fn kernel_factor(p: C64, a: f64, deg: usize) -> Vec<C64> {
    let pc = p.conj();
    let mut pow = C64::new(1.0, 0.0);
    (0..=deg)
        .map(|k| {
            let v = pow * weight_1d(k, -a);
            pow *= pc;
            v
        })
        .collect()
}

/// Uniform constant `B` with `|f(z,w)| ≤ B ‖f‖_α` on the bidisc, for `α ≻ (1,1)`.
///
/// `value` is the truncated `sqrt(Σ (k+1)^{−α₁}(l+1)^{−α₂})`; `tail_bound`
/// covers the omitted indices by integral comparison.
pub fn hinf_sup_bound(alpha: &WeightVector, deg: (usize, usize)) -> Result<FunctionalNormResult> {
    if !alpha.succ(&WeightVector::new(1.0, 1.0)) {
        return Err(Error::Precondition(format!(
            "sup bound needs alpha > (1,1) componentwise, got ({alpha})"
        )));
    }
    let t: Vec<f64> = (0..=deg.0).map(|k| weight_1d(k, -alpha.alpha1)).collect();
    let u: Vec<f64> = (0..=deg.1).map(|l| weight_1d(l, -alpha.alpha2)).collect();
    let s = ordered_row_sum(t.len(), |k| u.iter().map(|&ul| t[k] * ul).sum::<f64>());
    let integral_tail = |a: f64, n: usize| weight_1d(n, 1.0 - a) / (a - 1.0);
    Ok(combine(
        (t.iter().sum(), integral_tail(alpha.alpha1, deg.0)),
        (u.iter().sum(), integral_tail(alpha.alpha2, deg.1)),
        deg,
        s,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn weight_examples() {
        assert_eq!(weight_at(0, 0, &WeightVector::new(3.7, -2.2)), 1.0);
        assert_relative_eq!(weight_at(3, 1, &WeightVector::new(1.0, 2.0)), 16.0, max_relative = 1e-14);
        assert_relative_eq!(weight_at(999, 0, &WeightVector::new(-2.0, 0.0)), 1e-6, max_relative = 1e-12);
    }

    #[test]
    fn norm_examples() {
        let one = TruncatedSeries::constant(c(1.0));
        assert_eq!(norm(&one, &WeightVector::new(-3.0, 5.0)), 1.0);
        let f = TruncatedSeries::monomial(3, 1, c(1.0));
        assert_relative_eq!(norm(&f, &WeightVector::new(1.0, 2.0)), 4.0, max_relative = 1e-14);
        let a = TruncatedSeries::monomial(1, 0, c(1.0));
        let b = TruncatedSeries::monomial(0, 1, c(1.0));
        assert_eq!(inner_product(&a, &b, &WeightVector::new(1.0, 1.0)), ZERO);
    }

    #[test]
    fn compare_examples() {
        use PartialOrderResult::*;
        let w = WeightVector::new;
        assert_eq!(compare(&w(1.0, 1.0), &w(0.0, 0.0)), StrictlyGreater);
        assert_eq!(compare(&w(1.0, 0.0), &w(0.0, 1.0)), Incomparable);
        assert_eq!(compare(&w(1.0, 0.0), &w(0.0, 0.0)), GreaterEqual);
        assert_eq!(compare(&w(0.0, 0.0), &w(1.0, 1.0)), StrictlyLess);
        assert_eq!(compare(&w(0.0, 0.0), &w(0.0, 1.0)), LessEqual);
        assert_eq!(compare(&w(2.0, 1.0), &w(2.0, 1.0)), Equal);
    }

    #[test]
    fn functional_norm_examples() {
        let r = eval_functional_norm(&WeightVector::ZERO, c(0.5), c(0.0), (200, 200)).unwrap();
        assert_relative_eq!(r.value, (4.0f64 / 3.0).sqrt(), max_relative = 1e-14);
        let r = eval_functional_norm(&WeightVector::new(-1.0, -1.0), c(0.5), c(0.0), (200, 10)).unwrap();
        assert_relative_eq!(r.value, 4.0 / 3.0, max_relative = 1e-14);
        let r = eval_functional_norm(&WeightVector::new(7.0, -3.0), c(0.0), c(0.0), (5, 5)).unwrap();
        assert_eq!((r.value, r.tail_bound), (1.0, 0.0));
        assert!(eval_functional_norm(&WeightVector::ZERO, c(1.0), c(0.0), (5, 5)).is_err());
        let r = eval_functional_norm_1d(0.0, c(0.5), 200).unwrap();
        assert_relative_eq!(r.value, (4.0f64 / 3.0).sqrt(), max_relative = 1e-14);
        assert_eq!(eval_functional_norm_1d(-4.0, c(0.0), 3).unwrap().value, 1.0);
    }

    #[test]
    fn functional_norm_factorises() {
        let a = WeightVector::new(-1.0, 0.5);
        let (z, w) = (c(0.4), c(0.3));
        let two = eval_functional_norm(&a, z, w, (300, 300)).unwrap();
        let one = eval_functional_norm_1d(a.alpha1, z, 300).unwrap().value
            * eval_functional_norm_1d(a.alpha2, w, 300).unwrap().value;
        assert!((two.value - one).abs() < 1e-10);
    }

    #[test]
    fn tail_bound_brackets_longer_truncations() {
        let a = WeightVector::new(-3.0, 1.5);
        let (z, w) = (C64::new(0.6, 0.3), c(0.9));
        let short = eval_functional_norm(&a, z, w, (10, 20)).unwrap();
        let long = eval_functional_norm(&a, z, w, (2000, 2000)).unwrap();
        assert!(short.value <= long.value);
        assert!(long.value <= short.upper() * (1.0 + 1e-14));
        assert!(long.tail_bound < 1e-12 * long.value);
    }

    #[test]
    fn kernel_examples() {
        let k = kernel_series(&WeightVector::new(1.0, 2.0), ZERO, ZERO, (4, 4)).unwrap();
        assert_eq!(k.coeff(0, 0), c(1.0));
        assert!(k.iter().skip(1).all(|(_, _, v)| v == ZERO));
        let (z0, w0) = (C64::new(0.3, 0.2), C64::new(-0.1, 0.4));
        let k = kernel_series(&WeightVector::ZERO, z0, w0, (80, 80)).unwrap();
        let (z, w) = (C64::new(0.1, -0.5), c(0.35));
        let want = 1.0 / ((1.0 - z0.conj() * z) * (1.0 - w0.conj() * w));
        assert!((k.evaluate(z, w).unwrap() - want).norm() < 1e-12);
        let a = WeightVector::new(-1.0, 0.5);
        let k = kernel_series(&a, z0, w0, (120, 120)).unwrap();
        let fnorm = eval_functional_norm(&a, z0, w0, (120, 120)).unwrap();
        assert!((norm_sq(&k, &a) - fnorm.value.powi(2)).abs() < 1e-10);
    }

    #[test]
    fn sup_bound_examples() {
        let b = hinf_sup_bound(&WeightVector::new(2.0, 2.0), (4000, 4000)).unwrap();
        let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!(b.value <= zeta2 && zeta2 <= b.upper());
        assert!(b.tail_bound < 1e-3);
        assert!(hinf_sup_bound(&WeightVector::new(1.0, 2.0), (4, 4)).is_err());
        let mut prev = f64::INFINITY;
        for a in [2.0, 4.0, 8.0, 16.0, 32.0] {
            let v = hinf_sup_bound(&WeightVector::new(a, a), (64, 64)).unwrap().value;
            assert!(v < prev && v >= 1.0);
            prev = v;
        }
        assert!(prev < 1.0 + 1e-9);
    }

    fn series(deg: (usize, usize), v: &[(f64, f64)]) -> TruncatedSeries {
        let mut it = v.iter().cycle();
        TruncatedSeries::from_fn(deg.0, deg.1, |_, _| {
            let &(a, b) = it.next().unwrap();
            C64::new(a, b)
        })
    }

    proptest! {
        #[test]
        fn reproducing_property(
            deg in (0usize..12, 0usize..12),
            v in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..40),
            a in (-2.0f64..2.0, -2.0f64..2.0),
            z in (-0.6f64..0.6, -0.6f64..0.6), w in (-0.6f64..0.6, -0.6f64..0.6),
        ) {
            let f = series(deg, &v);
            let alpha = WeightVector::new(a.0, a.1);
            let (z, w) = (C64::new(z.0, z.1), C64::new(w.0, w.1));
            let k = kernel_series(&alpha, z, w, deg).unwrap();
            let lhs = inner_product(&f, &k, &alpha);
            let rhs = f.evaluate(z, w).unwrap();
            let scale: f64 = f.coeffs().iter().map(|a| a.norm()).sum();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * scale.max(1.0));
        }

        #[test]
        fn norms_monotone_in_weight(
            deg in (0usize..10, 0usize..10),
            v in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..40),
            b in (-3.0f64..3.0, -3.0f64..3.0),
            d in (0.0f64..2.0, 0.0f64..2.0),
        ) {
            let f = series(deg, &v);
            let beta = WeightVector::new(b.0, b.1);
            let alpha = WeightVector::new(b.0 + d.0, b.1 + d.1);
            prop_assert!(norm(&f, &alpha) >= norm(&f, &beta) * (1.0 - 1e-14));
        }

        #[test]
        fn functional_norm_nested_brackets(
            a in (-3.0f64..3.0, -3.0f64..3.0),
            r in (0.0f64..0.95, 0.0f64..0.95),
            n in 0usize..60, extra in 1usize..400,
        ) {
            let alpha = WeightVector::new(a.0, a.1);
            let (z, w) = (c(r.0), C64::new(0.0, r.1));
            let short = eval_functional_norm(&alpha, z, w, (n, n)).unwrap();
            let long = eval_functional_norm(&alpha, z, w, (n + extra, n + extra / 2)).unwrap();
            prop_assert!(short.value <= long.value * (1.0 + 1e-14));
            prop_assert!(long.value <= short.upper() * (1.0 + 1e-12));
        }
    }
}
