//! Multiplication operators `T_h : D_α → D_β` on truncated spaces.
//!
//! The finite section on degree box `(K, L)` is `P ∘ (f ↦ h f)` restricted to
//! polynomials in the box, written in the orthonormal bases
//! `z^m w^n / sqrt(w_α(m,n))` and `z^k w^l / sqrt(w_β(k,l))`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{check_disc, torus_samples, TruncatedSeries, C64, ZERO};
use crate::space::{eval_functional_norm, ln_weight, weight_1d, WeightVector};

/// Sections with at most this many basis monomials are stored densely.
pub const DENSE_LIMIT: usize = 1024;

/// Dense sections up to this size get their norm from a full SVD.
pub const SVD_LIMIT: usize = 256;

#[derive(Clone, Debug)]
pub struct FiniteSectionOperator {
    pub alpha: WeightVector,
    pub beta: WeightVector,
    pub deg: (usize, usize),
    /// Nonzero coefficients `(p, q, h_{p,q})` of `h` inside the box.
    taps: Vec<(usize, usize, C64)>,
    src_scale: Vec<f64>,
    dst_scale: Vec<f64>,
    matrix: Option<DMatrix<C64>>,
}

pub fn finite_section(
    h: &TruncatedSeries,
    alpha: &WeightVector,
    beta: &WeightVector,
    deg: (usize, usize),
) -> FiniteSectionOperator {
    let taps: Vec<_> = h
        .iter()
        .filter(|&(p, q, c)| p <= deg.0 && q <= deg.1 && c != ZERO)
        .collect();
    let cells = |wv: &WeightVector, sign: f64| -> Vec<f64> {
        (0..=deg.0)
            .flat_map(|k| (0..=deg.1).map(move |l| (k, l)))
            .map(|(k, l)| (sign * 0.5 * ln_weight(k, l, wv)).exp())
            .collect()
    };
    let mut op = FiniteSectionOperator {
        alpha: *alpha,
        beta: *beta,
        deg,
        taps,
        src_scale: cells(alpha, -1.0),
        dst_scale: cells(beta, 1.0),
        matrix: None,
    };
    if op.dim() <= DENSE_LIMIT {
        op.matrix = Some(op.build_matrix());
    }
    op
}

impl FiniteSectionOperator {
    /// Number of basis monomials `(K+1)(L+1)`.
    pub fn dim(&self) -> usize {
        (self.deg.0 + 1) * (self.deg.1 + 1)
    }

    pub fn is_dense(&self) -> bool {
        self.matrix.is_some()
    }

    fn cols(&self) -> usize {
        self.deg.1 + 1
    }

    /// Matrix entry from basis monomial `z^m w^n` to `z^k w^l`.
    pub fn entry(&self, (k, l): (usize, usize), (m, n): (usize, usize)) -> C64 {
        if k < m || l < n {
            return ZERO;
        }
        let h = self
            .taps
            .iter()
            .find(|t| t.0 == k - m && t.1 == l - n)
            .map_or(ZERO, |t| t.2);
        let c = self.cols();
        h * self.dst_scale[k * c + l] * self.src_scale[m * c + n]
    }

    fn build_matrix(&self) -> DMatrix<C64> {
        let c = self.cols();
        let n = self.dim();
        let mut m = DMatrix::<C64>::zeros(n, n);
        for col in 0..n {
            let (cm, cn) = (col / c, col % c);
            for &(p, q, h) in &self.taps {
                let (k, l) = (cm + p, cn + q);
                if k <= self.deg.0 && l <= self.deg.1 {
                    let row = k * c + l;
                    m[(row, col)] = h * self.dst_scale[row] * self.src_scale[col];
                }
            }
        }
        m
    }

    /// Dense matrix (built on demand for matrix-free operators).
    pub fn matrix(&self) -> DMatrix<C64> {
        self.matrix.clone().unwrap_or_else(|| self.build_matrix())
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        if let Some(m) = &self.matrix {
            return (m * DVector::from_column_slice(x)).data.into();
        }
        let c = self.cols();
        let u: Vec<C64> = x.iter().zip(&self.src_scale).map(|(v, s)| v * s).collect();
        let rows: Vec<Vec<C64>> = (0..=self.deg.0)
            .into_par_iter()
            .map(|k| {
                let mut row = vec![ZERO; c];
                for &(p, q, h) in &self.taps {
                    if p > k {
                        continue;
                    }
                    let src = &u[(k - p) * c..(k - p + 1) * c];
                    for l in q..c {
                        row[l] += h * src[l - q];
                    }
                }
                for (l, v) in row.iter_mut().enumerate() {
                    *v *= self.dst_scale[k * c + l];
                }
                row
            })
            .collect();
        rows.concat()
    }

    pub fn apply_adjoint(&self, y: &[C64]) -> Vec<C64> {
        if let Some(m) = &self.matrix {
            return (m.adjoint() * DVector::from_column_slice(y)).data.into();
        }
        let c = self.cols();
        let v: Vec<C64> = y.iter().zip(&self.dst_scale).map(|(a, s)| a * s).collect();
        let rows: Vec<Vec<C64>> = (0..=self.deg.0)
            .into_par_iter()
            .map(|m| {
                let mut row = vec![ZERO; c];
                for &(p, q, h) in &self.taps {
                    if m + p > self.deg.0 {
                        continue;
                    }
                    let h = h.conj();
                    let src = &v[(m + p) * c..(m + p + 1) * c];
                    for n in 0..c.saturating_sub(q) {
                        row[n] += h * src[n + q];
                    }
                }
                for (n, x) in row.iter_mut().enumerate() {
                    *x *= self.src_scale[m * c + n];
                }
                row
            })
            .collect();
        rows.concat()
    }
}

/// Largest singular value estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub iterations: usize,
    /// Relative change of the estimate in the final step.
    pub residual: f64,
}

fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest singular value of the section.
///
/// Small dense sections use an SVD (reported with zero iterations). Larger
/// ones run power iteration on `T*T` from the normalised all-ones vector,
/// stopping once the relative change drops below `tol` and either the
/// geometric extrapolation of the remaining increase is below `tol` or the
/// estimate decreased, which only rounding can cause.
pub fn operator_norm(op: &FiniteSectionOperator, tol: f64, max_iter: usize) -> Result<NormEstimate> {
    if !(tol > 0.0) {
        return Err(Error::Precondition(format!("tolerance must be positive, got {tol}")));
    }
    let n = op.dim();
    if let Some(m) = op.matrix.as_ref().filter(|_| n <= SVD_LIMIT) {
        let value = m.singular_values().iter().copied().fold(0.0, f64::max);
        return Ok(NormEstimate {
            value,
            iterations: 0,
            residual: 0.0,
        });
    }
    let mut x = vec![C64::new(1.0 / (n as f64).sqrt(), 0.0); n];
    let mut y = op.apply(&x);
    if vec_norm(&y) == 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        x = (0..n).map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
        let s = vec_norm(&x);
        x.iter_mut().for_each(|v| *v /= s);
        y = op.apply(&x);
    }
    let mut sigma = vec_norm(&y);
    let mut last_step: Option<f64> = None;
    let mut rel = f64::INFINITY;
    for it in 1..=max_iter {
        if sigma == 0.0 {
            return Ok(NormEstimate {
                value: 0.0,
                iterations: it - 1,
                residual: 0.0,
            });
        }
        let g = op.apply_adjoint(&y);
        let gn = vec_norm(&g);
        if gn == 0.0 {
            return Ok(NormEstimate {
                value: sigma,
                iterations: it,
                residual: 0.0,
            });
        }
        x = g.into_iter().map(|v| v / gn).collect();
        y = op.apply(&x);
        let next = vec_norm(&y);
        let step = next - sigma;
        rel = step.abs() / next;
        let stalled = step < 0.0;
        sigma = sigma.max(next);
        let tail = match last_step {
            Some(prev) if prev > 0.0 && step >= 0.0 && step < prev => {
                let rho = step / prev;
                step * rho / (1.0 - rho)
            }
            _ => f64::INFINITY,
        };
        if rel <= 16.0 * f64::EPSILON || (rel < tol && (stalled || tail < tol * sigma)) {
            return Ok(NormEstimate {
                value: sigma,
                iterations: it,
                residual: rel,
            });
        }
        last_step = Some(step);
    }
    Err(Error::NotConverged {
        value: sigma,
        iterations: max_iter,
        residual: rel,
    })
}

/// Componentwise `(1−λ) a1 + λ a2`.
pub fn interpolate_weights(a1: &WeightVector, a2: &WeightVector, lambda: f64) -> Result<WeightVector> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Precondition(format!("lambda must lie in [0,1], got {lambda}")));
    }
    Ok(a1.zip(a2, |x, y| (1.0 - lambda) * x + lambda * y))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterpolationCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`.
    pub slack: f64,
    pub passed: bool,
}

/// Compares `‖T_h‖_{α,β}` with `‖T_h‖^{1−λ}_{α¹,β¹} ‖T_h‖^λ_{α²,β²}` on one section.
pub fn interpolation_inequality_check(
    h: &TruncatedSeries,
    pair1: (WeightVector, WeightVector),
    pair2: (WeightVector, WeightVector),
    lambda: f64,
    deg: (usize, usize),
    tol: f64,
) -> Result<InterpolationCheck> {
    let alpha = interpolate_weights(&pair1.0, &pair2.0, lambda)?;
    let beta = interpolate_weights(&pair1.1, &pair2.1, lambda)?;
    let est = |a: &WeightVector, b: &WeightVector| {
        operator_norm(&finite_section(h, a, b, deg), 1e-13, 100_000).map(|e| e.value)
    };
    let n1 = est(&pair1.0, &pair1.1)?;
    let n2 = est(&pair2.0, &pair2.1)?;
    let lhs = if lambda == 0.0 {
        n1
    } else if lambda == 1.0 {
        n2
    } else {
        est(&alpha, &beta)?
    };
    let rhs = n1.powf(1.0 - lambda) * n2.powf(lambda);
    let slack = rhs - lhs;
    Ok(InterpolationCheck {
        lhs,
        rhs,
        slack,
        passed: slack >= -tol,
    })
}

/// Degree at which `(k+1)^{−a} ρ^k` has dropped below `1e-18` relative,
/// so truncated functional norms are accurate to double precision.
pub fn functional_degree(a: f64, r: f64) -> usize {
    let rho = r * r;
    if rho == 0.0 {
        return 0;
    }
    let lr = rho.ln();
    let mut k = 16usize;
    while (-a * (k as f64 + 1.0).ln() + k as f64 * lr) > -41.5 || (a < 0.0 && -a / (k as f64 + 1.0) + lr > -1e-3) {
        k = k + k / 8 + 1;
        if k > 1 << 28 {
            break;
        }
    }
    k
}

fn functional_norm_auto(alpha: &WeightVector, z: C64, w: C64) -> Result<f64> {
    let deg = (
        functional_degree(alpha.alpha1, z.norm()),
        functional_degree(alpha.alpha2, w.norm()),
    );
    eval_functional_norm(alpha, z, w, deg).map(|r| r.value)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointwiseReport {
    /// Largest `|h| ‖λ^α‖ / ‖λ^β‖` over the sample.
    pub max_ratio: f64,
    /// Largest `ratio − norm_est`, clipped at zero.
    pub max_violation: f64,
    pub violations: usize,
    pub points: usize,
    pub passed: bool,
}

/// Checks `|h(z,w)| ‖λ^α_{(z,w)}‖ / ‖λ^β_{(z,w)}‖ ≤ norm_est (1 + tol)` on a sample.
pub fn pointwise_bound_check(
    h: &TruncatedSeries,
    alpha: &WeightVector,
    beta: &WeightVector,
    norm_est: f64,
    points: &[(C64, C64)],
    tol: f64,
) -> Result<PointwiseReport> {
    let ratios: Vec<f64> = points
        .par_iter()
        .map(|&(z, w)| {
            let hv = h.evaluate(z, w)?.norm();
            let la = functional_norm_auto(alpha, z, w)?;
            let lb = functional_norm_auto(beta, z, w)?;
            Ok(hv * la / lb)
        })
        .collect::<Result<_>>()?;
    let limit = norm_est * (1.0 + tol);
    let violations = ratios.iter().filter(|&&r| r > limit).count();
    Ok(PointwiseReport {
        max_ratio: ratios.iter().copied().fold(0.0, f64::max),
        max_violation: ratios.iter().map(|r| (r - norm_est).max(0.0)).fold(0.0, f64::max),
        violations,
        points: points.len(),
        passed: violations == 0,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeRow {
    pub r1: f64,
    pub r2: f64,
    pub sup: f64,
    pub inf: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub sup_ratio: f64,
    pub inf_ratio: f64,
    pub profile: Vec<EnvelopeRow>,
}

/// `|h(z,w)| (1−|z|²)^{(α₁−β₁)/2} (1−|w|²)^{(α₂−β₂)/2}` over radius pairs
/// `radii × radii` and angle pairs `angles × angles`.
pub fn boundary_envelope(
    h: &TruncatedSeries,
    alpha: &WeightVector,
    beta: &WeightVector,
    radii: &[f64],
    angles: &[f64],
) -> Result<EnvelopeReport> {
    if let Some(r) = radii.iter().find(|r| !(0.0..1.0).contains(*r)) {
        return Err(Error::Domain(format!("radius {r} outside [0,1)")));
    }
    if radii.is_empty() || angles.is_empty() {
        return Err(Error::Precondition("envelope needs radii and angles".into()));
    }
    let e = alpha.zip(beta, |a, b| 0.5 * (a - b));
    let mut profile = Vec::with_capacity(radii.len() * radii.len());
    for &r1 in radii {
        for &r2 in radii {
            let scale = (1.0 - r1 * r1).powf(e.alpha1) * (1.0 - r2 * r2).powf(e.alpha2);
            let (mut sup, mut inf) = (0.0f64, f64::INFINITY);
            for &t1 in angles {
                for &t2 in angles {
                    let v = h.eval_unchecked(C64::from_polar(r1, t1), C64::from_polar(r2, t2)).norm() * scale;
                    sup = sup.max(v);
                    inf = inf.min(v);
                }
            }
            profile.push(EnvelopeRow { r1, r2, sup, inf });
        }
    }
    Ok(EnvelopeReport {
        sup_ratio: profile.iter().map(|p| p.sup).fold(0.0, f64::max),
        inf_ratio: profile.iter().map(|p| p.inf).fold(f64::INFINITY, f64::min),
        profile,
    })
}

fn convolution_preconditions(alpha: &WeightVector, beta: &WeightVector) -> Result<()> {
    if !alpha.succ(&WeightVector::new(1.0, 1.0)) || !alpha.succeq(beta) {
        return Err(Error::Precondition(format!(
            "convolution bound needs alpha > (1,1) and beta <= alpha, got ({alpha}), ({beta})"
        )));
    }
    Ok(())
}

/// `(k+1)^b Σ_{m≤k} [(m+1)^a (k−m+1)^b]^{−1}`.
pub fn convolution_weight_bound_1d(k: usize, a: f64, b: f64) -> f64 {
    let s: f64 = (0..=k)
        .map(|m| weight_1d(m, -a) * weight_1d(k - m, -b))
        .sum();
    weight_1d(k, b) * s
}

/// Two-variable convolution weight sum, evaluated as a double sum.
pub fn convolution_weight_bound(k: usize, l: usize, alpha: &WeightVector, beta: &WeightVector) -> Result<f64> {
    convolution_preconditions(alpha, beta)?;
    let mut s = 0.0;
    for m in 0..=k {
        for n in 0..=l {
            s += 1.0
                / (weight_1d(m, alpha.alpha1)
                    * weight_1d(n, alpha.alpha2)
                    * weight_1d(k - m, beta.alpha1)
                    * weight_1d(l - n, beta.alpha2));
        }
    }
    Ok(weight_1d(k, beta.alpha1) * weight_1d(l, beta.alpha2) * s)
}

/// `max_{k ≤ kmax}` of the one-variable convolution weight and its argmax.
pub fn convolution_weight_scan_1d(kmax: usize, a: f64, b: f64) -> (f64, usize) {
    (0..=kmax)
        .into_par_iter()
        .map(|k| (convolution_weight_bound_1d(k, a, b), k))
        .collect::<Vec<_>>()
        .into_iter()
        .fold((0.0, 0), |acc, v| if v.0 > acc.0 { v } else { acc })
}

/// `max |h|` over an `n × n` torus grid at the given radius.
pub fn hinf_norm_estimate(h: &TruncatedSeries, radius: f64, angular_count: usize) -> Result<f64> {
    check_disc(C64::new(radius, 0.0))?;
    if !(radius > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {radius}")));
    }
    if angular_count == 0 {
        return Err(Error::Config("angular count must be positive".into()));
    }
    Ok(torus_samples(h, radius, radius, angular_count, angular_count)
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max))
}
