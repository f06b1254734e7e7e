//! Integral realisation of `‖·‖_α` for `α ⪯ (0,0)`.
//!
//! For `α₁ < 0` the radial weight is `w_k = ∫₀¹ (1−r²)^{−1−α₁} r^{2k+1} dr =
//! B(k+1, −α₁)/2`. Constants are normalised so that `α = (−1,−1)` reproduces
//! the coefficient norm exactly; a zero component falls back to the Hardy
//! (Parseval) factor `1`.

use std::sync::Arc;

use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::GaussJacobi;
use crate::series::{TruncatedSeries, C64, ZERO};
use crate::space::WeightVector;
use crate::special::{ln_beta_index, ln_gamma_ratio, small_positive_integer};

fn negative(alpha1: f64) -> Result<f64> {
    if alpha1 < 0.0 && alpha1.is_finite() {
        Ok(-alpha1)
    } else {
        Err(Error::Precondition(format!("radial weight needs alpha1 < 0, got {alpha1}")))
    }
}

/// `w_k = B(k+1, −α₁)/2`.
pub fn beta_radial_weight(k: usize, alpha1: f64) -> Result<f64> {
    let s = negative(alpha1)?;
    if let Some(n) = small_positive_integer(s) {
        // B(k+1, n) = (n−1)! / ((k+1)(k+2)…(k+n))
        let mut v = 0.5;
        for j in 1..=n {
            v *= if j < n { j as f64 } else { 1.0 } / (k as f64 + j as f64);
        }
        return Ok(v);
    }
    Ok(0.5 * ln_beta_index(k, s).exp())
}

/// `w_k / (k+1)^{α₁}`, which tends to `Γ(−α₁)/2`.
pub fn hardy_asymptotic_ratio(k: usize, alpha1: f64) -> Result<f64> {
    let s = negative(alpha1)?;
    let k1 = k as f64 + 1.0;
    if let Some(n) = small_positive_integer(s) {
        let mut v = 0.5;
        for j in 1..n {
            v *= j as f64 * k1 / (k1 + j as f64);
        }
        return Ok(v);
    }
    let ln_gamma_s = ln_beta_index(0, s) + ln_gamma_ratio(1.0, s);
    Ok(0.5 * (ln_gamma_s - ln_gamma_ratio(k1, s) + s * k1.ln()).exp())
}

/// Radial weights `w_0 … w_K` for one axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaWeightTable {
    pub alpha1: f64,
    pub values: Vec<f64>,
}

impl BetaWeightTable {
    pub fn new(alpha1: f64, deg: usize) -> Result<Self> {
        let values = (0..=deg)
            .map(|k| beta_radial_weight(k, alpha1))
            .collect::<Result<_>>()?;
        Ok(Self { alpha1, values })
    }
}

/// Per-axis factor `c(k)` of the squared integral norm: `2 w_k` or `1`.
fn axis_factors(a: f64, deg: usize) -> Result<Vec<f64>> {
    if a == 0.0 {
        return Ok(vec![1.0; deg + 1]);
    }
    if a > 0.0 || !a.is_finite() {
        return Err(Error::Precondition(format!(
            "integral norm needs nonpositive weights, got component {a}"
        )));
    }
    Ok(BetaWeightTable::new(a, deg)?.values.into_iter().map(|w| 2.0 * w).collect())
}

/// Squared integral norm evaluated termwise from the Beta weights.
pub fn integral_norm_exact_sq(f: &TruncatedSeries, alpha: &WeightVector) -> Result<f64> {
    let c1 = axis_factors(alpha.alpha1, f.deg_z())?;
    let c2 = axis_factors(alpha.alpha2, f.deg_w())?;
    Ok(f.iter().map(|(k, l, a)| a.norm_sqr() * c1[k] * c2[l]).sum())
}

pub fn integral_norm_exact(f: &TruncatedSeries, alpha: &WeightVector) -> Result<f64> {
    integral_norm_exact_sq(f, alpha).map(f64::sqrt)
}

/// Tensor rule for the fourfold integral: Gauss–Jacobi in `t = r²` per axis
/// and equispaced angles.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub alpha: WeightVector,
    pub radial: [GaussJacobi; 2],
    pub angular: [usize; 2],
}

impl QuadratureRule {
    pub fn new(alpha: WeightVector, radial_nodes: (usize, usize), angular: (usize, usize)) -> Result<Self> {
        if !(alpha.alpha1 < 0.0 && alpha.alpha2 < 0.0) {
            return Err(Error::Precondition(format!(
                "quadrature needs negative weights, got ({alpha})"
            )));
        }
        if angular.0 == 0 || angular.1 == 0 {
            return Err(Error::Config("angular counts must be positive".into()));
        }
        Ok(Self {
            alpha,
            radial: [
                GaussJacobi::new(radial_nodes.0, -1.0 - alpha.alpha1)?,
                GaussJacobi::new(radial_nodes.1, -1.0 - alpha.alpha2)?,
            ],
            angular: [angular.0, angular.1],
        })
    }

    /// Smallest rule that is exact for degree `(K, L)`.
    pub fn for_degree(alpha: WeightVector, deg: (usize, usize)) -> Result<Self> {
        Self::new(
            alpha,
            (deg.0 / 2 + 2, deg.1 / 2 + 2),
            (2 * deg.0 + 1, 2 * deg.1 + 1),
        )
    }
}

/// Mean of `|f|²` over the `n1 × n2` torus grid at radii `(ρ1, ρ2)`, via FFTs.
struct TorusMean {
    n: [usize; 2],
    fft: [Arc<dyn Fft<f64>>; 2],
}

impl TorusMean {
    fn new(n1: usize, n2: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n: [n1, n2],
            fft: [planner.plan_fft_inverse(n1), planner.plan_fft_inverse(n2)],
        }
    }

    /// `inner[k][j] = Σ_l a_{k,l} ρ2^l e^{i l θ2_j}` for one `ρ2`.
    fn inner(&self, f: &TruncatedSeries, rho2: f64) -> Vec<Vec<C64>> {
        (0..=f.deg_z())
            .map(|k| {
                let mut buf = vec![ZERO; self.n[1]];
                let mut p = 1.0;
                for l in 0..=f.deg_w() {
                    buf[l % self.n[1]] += f.coeff(k, l) * p;
                    p *= rho2;
                }
                self.fft[1].process(&mut buf);
                buf
            })
            .collect()
    }

    fn mean_sq(&self, inner: &[Vec<C64>], rho1: f64) -> f64 {
        let mut total = 0.0;
        let mut buf = vec![ZERO; self.n[0]];
        for j in 0..self.n[1] {
            buf.iter_mut().for_each(|b| *b = ZERO);
            let mut p = 1.0;
            for (k, row) in inner.iter().enumerate() {
                buf[k % self.n[0]] += row[j] * p;
                p *= rho1;
            }
            self.fft[0].process(&mut buf);
            total += buf.iter().map(|v| v.norm_sqr()).sum::<f64>();
        }
        total / (self.n[0] * self.n[1]) as f64
    }
}

/// Squared integral norm by direct discretisation of the fourfold integral.
pub fn integral_norm_quadrature_sq(f: &TruncatedSeries, rule: &QuadratureRule) -> Result<f64> {
    let (k, l) = f.degrees();
    if rule.angular[0] < 2 * k + 1 || rule.angular[1] < 2 * l + 1 {
        return Err(Error::Config(format!(
            "angular counts {:?} too small for degree ({k},{l}); need ({},{})",
            rule.angular,
            2 * k + 1,
            2 * l + 1
        )));
    }
    let torus = TorusMean::new(rule.angular[0], rule.angular[1]);
    let [g1, g2] = &rule.radial;
    let cols: Vec<f64> = g2
        .nodes
        .par_iter()
        .zip(&g2.weights)
        .map(|(&t2, &w2)| {
            let inner = torus.inner(f, t2.sqrt());
            let s: f64 = g1
                .nodes
                .iter()
                .zip(&g1.weights)
                .map(|(&t1, &w1)| w1 * torus.mean_sq(&inner, t1.sqrt()))
                .sum();
            w2 * s
        })
        .collect();
    Ok(cols.iter().sum())
}

pub fn integral_norm_quadrature(f: &TruncatedSeries, alpha: &WeightVector, rule: &QuadratureRule) -> Result<f64> {
    if *alpha != rule.alpha {
        return Err(Error::Config(format!(
            "rule built for ({}) used with ({alpha})",
            rule.alpha
        )));
    }
    integral_norm_quadrature_sq(f, rule).map(f64::sqrt)
}

/// Hardy-space profile `r ↦ mean |f(r e^{iθ₁}, r e^{iθ₂})|²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardySup {
    /// `(r, Σ |a_{k,l}|² r^{2(k+l)})` per grid radius.
    pub profile: Vec<(f64, f64)>,
    pub grid_max_sq: f64,
    /// `sup_{r<1}` of the profile, i.e. `Σ |a_{k,l}|²`.
    pub limit_sq: f64,
    /// `sqrt(limit_sq)`, which equals the `(0,0)`-norm.
    pub norm_limit: f64,
}

pub fn hardy_norm_sup(f: &TruncatedSeries, r_grid: &[f64]) -> Result<HardySup> {
    if let Some(r) = r_grid.iter().find(|r| !(0.0..1.0).contains(*r)) {
        return Err(Error::Domain(format!("radius {r} outside [0,1)")));
    }
    let profile: Vec<(f64, f64)> = r_grid
        .iter()
        .map(|&r| {
            let r2 = r * r;
            let v = f
                .iter()
                .map(|(k, l, a)| a.norm_sqr() * r2.powi((k + l) as i32))
                .sum();
            (r, v)
        })
        .collect();
    let limit_sq: f64 = f.coeffs().iter().map(|a| a.norm_sqr()).sum();
    Ok(HardySup {
        grid_max_sq: profile.iter().map(|p| p.1).fold(0.0, f64::max),
        profile,
        limit_sq,
        norm_limit: limit_sq.sqrt(),
    })
}

/// Per-axis ratios `c(k)/(k+1)^{α}`.
fn axis_ratios(a: f64, deg: usize) -> Result<Vec<f64>> {
    if a == 0.0 {
        return Ok(vec![1.0; deg + 1]);
    }
    (0..=deg).map(|k| hardy_asymptotic_ratio(k, a).map(|r| 2.0 * r)).collect()
}

/// `(c_low, c_high)` bracketing `integral² / ‖·‖²_α` for series on the grid.
pub fn equivalence_constants(alpha: &WeightVector, deg: (usize, usize)) -> Result<(f64, f64)> {
    if alpha.alpha1 > 0.0 || alpha.alpha2 > 0.0 {
        return Err(Error::Precondition(format!(
            "equivalence constants need nonpositive weights, got ({alpha})"
        )));
    }
    let r1 = axis_ratios(alpha.alpha1, deg.0)?;
    let r2 = axis_ratios(alpha.alpha2, deg.1)?;
    let lo = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    Ok((lo(&r1) * lo(&r2), hi(&r1) * hi(&r2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::norm_sq;
    use approx::assert_relative_eq;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn beta_weight_examples() {
        assert_eq!(beta_radial_weight(0, -1.0).unwrap(), 0.5);
        assert_eq!(beta_radial_weight(1, -1.0).unwrap(), 0.25);
        assert_relative_eq!(beta_radial_weight(2, -2.0).unwrap(), 1.0 / 24.0, max_relative = 1e-15);
        assert!(beta_radial_weight(0, 0.0).is_err());
        assert!(beta_radial_weight(0, 0.5).is_err());
    }

    #[test]
    fn beta_weight_matches_radial_integral() {
        // midpoint rule on ∫₀¹ (1−r²)^{−1−α} r^{2k+1} dr for a smooth case
        let (alpha, k) = (-2.5, 3);
        let n = 200_000;
        let h = 1.0 / n as f64;
        let brute: f64 = (0..n)
            .map(|i| {
                let r = (i as f64 + 0.5) * h;
                (1.0 - r * r).powf(-1.0 - alpha) * r.powi(2 * k + 1) * h
            })
            .sum();
        assert_relative_eq!(beta_radial_weight(k as usize, alpha).unwrap(), brute, max_relative = 1e-8);
    }

    #[test]
    fn integer_and_general_paths_agree() {
        for &a in &[-1.0, -2.0, -3.0] {
            for k in [0usize, 1, 7, 100, 5000] {
                let fast = beta_radial_weight(k, a).unwrap();
                let general = 0.5 * ln_beta_index(k, -a).exp();
                assert_relative_eq!(fast, general, max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn hardy_ratio_examples() {
        for k in [0usize, 1, 10, 1000, 100_000] {
            assert_eq!(hardy_asymptotic_ratio(k, -1.0).unwrap(), 0.5);
            let want = (k as f64 + 1.0) / (2.0 * (k as f64 + 2.0));
            assert_relative_eq!(hardy_asymptotic_ratio(k, -2.0).unwrap(), want, max_relative = 1e-15);
        }
        let limit = std::f64::consts::PI.sqrt() / 2.0;
        let r = hardy_asymptotic_ratio(1000, -0.5).unwrap();
        assert!((r - limit).abs() < 1e-3 * limit);
        let r = hardy_asymptotic_ratio(1 << 20, -0.5).unwrap();
        assert!((r - limit).abs() < 1e-6 * limit);
    }

    #[test]
    fn exact_integral_norm_examples() {
        let a = WeightVector::new(-1.0, -1.0);
        assert_eq!(integral_norm_exact(&TruncatedSeries::constant(c(1.0)), &a).unwrap(), 1.0);
        let z = TruncatedSeries::monomial(1, 0, c(1.0));
        assert_relative_eq!(integral_norm_exact(&z, &a).unwrap(), 0.5f64.sqrt(), max_relative = 1e-15);
        assert!(integral_norm_exact(&z, &WeightVector::new(0.5, -1.0)).is_err());
        // zero component reduces to the Parseval factor
        let f = TruncatedSeries::from_fn(3, 2, |k, l| c((k + 2 * l) as f64));
        let mixed = integral_norm_exact_sq(&f, &WeightVector::new(0.0, -1.0)).unwrap();
        assert_relative_eq!(mixed, norm_sq(&f, &WeightVector::new(0.0, -1.0)), max_relative = 1e-14);
    }

    #[test]
    fn quadrature_examples() {
        let a = WeightVector::new(-1.0, -1.0);
        let one = TruncatedSeries::constant(c(1.0));
        let rule = QuadratureRule::for_degree(a, (0, 0)).unwrap();
        assert!((integral_norm_quadrature(&one, &a, &rule).unwrap() - 1.0).abs() < 1e-12);
        let zw = TruncatedSeries::from_fn(1, 1, |k, l| if k + l == 1 { c(1.0) } else { ZERO });
        let rule = QuadratureRule::for_degree(a, (1, 1)).unwrap();
        assert!((integral_norm_quadrature(&zw, &a, &rule).unwrap() - 1.0).abs() < 1e-10);
        let coarse = QuadratureRule::for_degree(a, (0, 0)).unwrap();
        assert!(matches!(integral_norm_quadrature(&zw, &a, &coarse), Err(Error::Config(_))));
        assert!(integral_norm_quadrature(&zw, &WeightVector::new(-2.0, -1.0), &rule).is_err());
    }

    #[test]
    fn quadrature_agrees_with_termwise_weights() {
        for &(a1, a2) in &[(-0.1, -3.0), (-0.5, -0.5), (-2.7, -1.3)] {
            let a = WeightVector::new(a1, a2);
            let f = TruncatedSeries::from_fn(20, 13, |k, l| {
                C64::new(1.0 / (k + l + 1) as f64, ((k * 7 + l * 3) % 5) as f64 / 10.0 - 0.2)
            });
            let rule = QuadratureRule::for_degree(a, f.degrees()).unwrap();
            let q = integral_norm_quadrature(&f, &a, &rule).unwrap();
            let e = integral_norm_exact(&f, &a).unwrap();
            assert_relative_eq!(q, e, max_relative = 1e-10);
        }
    }

    #[test]
    fn hardy_sup_examples() {
        let one = hardy_norm_sup(&TruncatedSeries::constant(c(1.0)), &[0.0, 0.5, 0.99]).unwrap();
        assert!(one.profile.iter().all(|p| p.1 == 1.0));
        let z = hardy_norm_sup(&TruncatedSeries::monomial(1, 0, c(1.0)), &[0.5, 0.9, 0.99]).unwrap();
        assert_relative_eq!(z.grid_max_sq, 0.9801, max_relative = 1e-15);
        assert_eq!(z.norm_limit, 1.0);
        assert!(hardy_norm_sup(&TruncatedSeries::constant(c(1.0)), &[1.0]).is_err());
    }

    #[test]
    fn equivalence_constant_examples() {
        let (lo, hi) = equivalence_constants(&WeightVector::new(-1.0, -1.0), (50, 50)).unwrap();
        assert_eq!((lo, hi), (1.0, 1.0));
        let (lo, hi) = equivalence_constants(&WeightVector::new(-2.0, -2.0), (2048, 2048)).unwrap();
        assert!((0.2..=1.1).contains(&lo) && (0.2..=1.1).contains(&hi));
        assert!(hi / lo < 5.0);
        assert!(equivalence_constants(&WeightVector::new(1.0, -1.0), (3, 3)).is_err());
    }
}
