//! Truncated bivariate and univariate power series.
//!
//! A [`TruncatedSeries`] stores the dense `(K+1) × (L+1)` Taylor coefficient
//! grid of `f(z, w) = Σ a_{k,l} z^k w^l` in row-major order (`k` outer).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::WeightVector;
use crate::special::{ln_factorial_table, ln_gamma_ratio};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);

pub(crate) fn check_disc(z: C64) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() && z.norm_sqr() < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{z}")))
    }
}

/// Dense truncated bivariate power series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncatedSeries {
    deg_z: usize,
    deg_w: usize,
    coeffs: Vec<C64>,
}

impl TruncatedSeries {
    pub fn zeros(deg_z: usize, deg_w: usize) -> Self {
        Self {
            deg_z,
            deg_w,
            coeffs: vec![ZERO; (deg_z + 1) * (deg_w + 1)],
        }
    }

    pub fn from_fn(deg_z: usize, deg_w: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut coeffs = Vec::with_capacity((deg_z + 1) * (deg_w + 1));
        for k in 0..=deg_z {
            for l in 0..=deg_w {
                coeffs.push(f(k, l));
            }
        }
        Self {
            deg_z,
            deg_w,
            coeffs,
        }
    }

    /// Builds a series from a row-major grid, rejecting wrong lengths and non-finite entries.
    pub fn from_coeffs(deg_z: usize, deg_w: usize, coeffs: Vec<C64>) -> Result<Self> {
        let expected = (deg_z + 1)
            .checked_mul(deg_w + 1)
            .ok_or_else(|| Error::Precondition("grid size overflows".into()))?;
        if coeffs.len() != expected {
            return Err(Error::Precondition(format!(
                "grid of degree ({deg_z},{deg_w}) needs {expected} coefficients, got {}",
                coeffs.len()
            )));
        }
        if let Some(i) = coeffs.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::Precondition(format!(
                "non-finite coefficient at ({},{})",
                i / (deg_w + 1),
                i % (deg_w + 1)
            )));
        }
        Ok(Self {
            deg_z,
            deg_w,
            coeffs,
        })
    }

    pub fn constant(c: C64) -> Self {
        Self {
            deg_z: 0,
            deg_w: 0,
            coeffs: vec![c],
        }
    }

    /// `c · z^k w^l` on the smallest grid that holds it.
    pub fn monomial(k: usize, l: usize, c: C64) -> Self {
        Self::from_fn(k, l, |i, j| if i == k && j == l { c } else { ZERO })
    }

    pub fn deg_z(&self) -> usize {
        self.deg_z
    }

    pub fn deg_w(&self) -> usize {
        self.deg_w
    }

    pub fn degrees(&self) -> (usize, usize) {
        (self.deg_z, self.deg_w)
    }

    /// Number of stored coefficients, `(K+1)(L+1)`.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    #[inline]
    pub(crate) fn index(&self, k: usize, l: usize) -> usize {
        k * (self.deg_w + 1) + l
    }

    /// Coefficient of `z^k w^l`; zero outside the stored grid.
    #[inline]
    pub fn coeff(&self, k: usize, l: usize) -> C64 {
        if k <= self.deg_z && l <= self.deg_w {
            self.coeffs[self.index(k, l)]
        } else {
            ZERO
        }
    }

    /// Iterates `(k, l, a_{k,l})` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        let cols = self.deg_w + 1;
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (i / cols, i % cols, c))
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            deg_z: self.deg_z,
            deg_w: self.deg_w,
            coeffs: self.coeffs.iter().map(|&a| a * c).collect(),
        }
    }

    /// Re-grids to degree `(deg_z, deg_w)`, dropping or zero-padding coefficients.
    pub fn resized(&self, deg_z: usize, deg_w: usize) -> Self {
        Self::from_fn(deg_z, deg_w, |k, l| self.coeff(k, l))
    }

    /// Evaluates `f(z, w)` inside the open bidisc.
    pub fn evaluate(&self, z: C64, w: C64) -> Result<C64> {
        check_disc(z)?;
        check_disc(w)?;
        Ok(self.eval_unchecked(z, w))
    }

    /// Polynomial evaluation without the domain check (closed bidisc sampling).
    pub(crate) fn eval_unchecked(&self, z: C64, w: C64) -> C64 {
        let mut acc = ZERO;
        let mut zk = C64::new(1.0, 0.0);
        for k in 0..=self.deg_z {
            let row = &self.coeffs[k * (self.deg_w + 1)..(k + 1) * (self.deg_w + 1)];
            let mut wl = zk;
            for &a in row {
                acc += a * wl;
                wl *= w;
            }
            zk *= z;
        }
        acc
    }

    /// Full Cauchy product on the grid of degree `(K_f + K_g, L_f + L_g)`.
    ///
    /// Terms of each output coefficient are accumulated in a canonical order
    /// keyed on the unordered index pair `{(m,n), (k−m,l−n)}`, so swapping the
    /// arguments reproduces the result bit for bit.
    pub fn cauchy_product(&self, other: &Self) -> Self {
        let (kf, lf) = self.degrees();
        let (kg, lg) = other.degrees();
        let valid = |m: usize, n: usize, kmax: usize, lmax: usize| m <= kmax && n <= lmax;
        Self::from_fn(kf + kg, lf + lg, |k, l| {
            let mut acc = ZERO;
            for m in 0..=k {
                for n in 0..=l {
                    let (pm, pn) = (k - m, l - n);
                    if (m, n) > (pm, pn) {
                        continue;
                    }
                    let t1 = if valid(m, n, kf, lf) && valid(pm, pn, kg, lg) {
                        self.coeffs[self.index(m, n)] * other.coeffs[other.index(pm, pn)]
                    } else {
                        ZERO
                    };
                    if (m, n) == (pm, pn) {
                        acc += t1;
                        continue;
                    }
                    let t2 = if valid(pm, pn, kf, lf) && valid(m, n, kg, lg) {
                        self.coeffs[self.index(pm, pn)] * other.coeffs[other.index(m, n)]
                    } else {
                        ZERO
                    };
                    acc += t1 + t2;
                }
            }
            acc
        })
    }

    /// `f_{w0}(z) = f(z, w0)`: `b_k = Σ_l a_{k,l} w0^l`.
    pub fn slice_w(&self, w0: C64) -> Result<UnivariateSeries> {
        check_disc(w0)?;
        Ok(self.slice_w_unchecked(w0))
    }

    pub(crate) fn slice_w_unchecked(&self, w0: C64) -> UnivariateSeries {
        let coeffs = (0..=self.deg_z)
            .map(|k| {
                let mut acc = ZERO;
                let mut p = C64::new(1.0, 0.0);
                for l in 0..=self.deg_w {
                    acc += self.coeffs[self.index(k, l)] * p;
                    p *= w0;
                }
                acc
            })
            .collect();
        UnivariateSeries { coeffs }
    }

    /// `f_{z0}(w) = f(z0, w)`: `c_l = Σ_k a_{k,l} z0^k`.
    pub fn slice_z(&self, z0: C64) -> Result<UnivariateSeries> {
        check_disc(z0)?;
        let coeffs = (0..=self.deg_w)
            .map(|l| {
                let mut acc = ZERO;
                let mut p = C64::new(1.0, 0.0);
                for k in 0..=self.deg_z {
                    acc += self.coeffs[self.index(k, l)] * p;
                    p *= z0;
                }
                acc
            })
            .collect();
        Ok(UnivariateSeries { coeffs })
    }
}

/// Values of `f` on the torus `|z| = ρ1, |w| = ρ2` at angles `2πi/n1`,
/// `2πj/n2`, row-major in `i`. Exponents are folded modulo the grid size, so
/// any positive counts give exact samples.
pub fn torus_samples(f: &TruncatedSeries, rho1: f64, rho2: f64, n1: usize, n2: usize) -> Vec<C64> {
    use rustfft::FftPlanner;
    let mut planner = FftPlanner::new();
    let (f1, f2) = (planner.plan_fft_inverse(n1), planner.plan_fft_inverse(n2));
    let mut grid = vec![ZERO; n1 * n2];
    let mut pk = 1.0;
    for k in 0..=f.deg_z() {
        let row = &mut grid[(k % n1) * n2..(k % n1 + 1) * n2];
        let mut pl = pk;
        for l in 0..=f.deg_w() {
            row[l % n2] += f.coeffs[f.index(k, l)] * pl;
            pl *= rho2;
        }
        pk *= rho1;
    }
    for row in grid.chunks_mut(n2) {
        f2.process(row);
    }
    let mut col = vec![ZERO; n1];
    for j in 0..n2 {
        for i in 0..n1 {
            col[i] = grid[i * n2 + j];
        }
        f1.process(&mut col);
        for i in 0..n1 {
            grid[i * n2 + j] = col[i];
        }
    }
    grid
}

/// Degree-`K` univariate series `Σ b_k ζ^k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnivariateSeries {
    coeffs: Vec<C64>,
}

impl UnivariateSeries {
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Precondition("univariate series needs at least one coefficient".into()));
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::Precondition("non-finite coefficient".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn from_fn(deg: usize, f: impl FnMut(usize) -> C64) -> Self {
        Self {
            coeffs: (0..=deg).map(f).collect(),
        }
    }

    pub fn deg(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    pub fn evaluate(&self, z: C64) -> Result<C64> {
        check_disc(z)?;
        Ok(self.eval_unchecked(z))
    }

    pub(crate) fn eval_unchecked(&self, z: C64) -> C64 {
        let mut acc = ZERO;
        let mut p = C64::new(1.0, 0.0);
        for &b in &self.coeffs {
            acc += b * p;
            p *= z;
        }
        acc
    }

    /// The bivariate series `f(z, w) = g(z)` on a `(K, 0)` grid.
    pub fn as_z_series(&self) -> TruncatedSeries {
        TruncatedSeries {
            deg_z: self.deg(),
            deg_w: 0,
            coeffs: self.coeffs.clone(),
        }
    }

    /// The bivariate series `f(z, w) = g(w)` on a `(0, K)` grid.
    pub fn as_w_series(&self) -> TruncatedSeries {
        TruncatedSeries {
            deg_z: 0,
            deg_w: self.deg(),
            coeffs: self.coeffs.clone(),
        }
    }
}

/// `f(z, w) = f1(z) · f2(w)`, coefficient `(k, l) = b¹_k b²_l`.
pub fn tensor_product(f1: &UnivariateSeries, f2: &UnivariateSeries) -> TruncatedSeries {
    TruncatedSeries::from_fn(f1.deg(), f2.deg(), |k, l| f1.coeffs[k] * f2.coeffs[l])
}

/// Identifier of a closed-form test family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyId {
    ProperContainment,
    UnivariateRemark,
    NonFactoring,
    AllOnes,
    Rational,
    LacunaryBounded,
    Tensor,
}

impl FamilyId {
    pub const ALL: [FamilyId; 7] = [
        FamilyId::ProperContainment,
        FamilyId::UnivariateRemark,
        FamilyId::NonFactoring,
        FamilyId::AllOnes,
        FamilyId::Rational,
        FamilyId::LacunaryBounded,
        FamilyId::Tensor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyId::ProperContainment => "proper_containment",
            FamilyId::UnivariateRemark => "univariate_remark",
            FamilyId::NonFactoring => "non_factoring",
            FamilyId::AllOnes => "all_ones",
            FamilyId::Rational => "rational",
            FamilyId::LacunaryBounded => "lacunary_bounded",
            FamilyId::Tensor => "tensor",
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown family `{s}`")))
    }
}

/// A named function family with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum NamedFamily {
    /// `a_{k,l} = (k+1)^{(−α₁−1)/2} (l+1)^{(−α₂−1)/2}`: in `D_β` for `β ≺ α` but not in `D_α`.
    ProperContainment { alpha: WeightVector },
    /// `a_{k,0} = (k+1)^{(−α₁−1)/2}`, zero for `l > 0`.
    UnivariateRemark { alpha1: f64 },
    /// `a_{k,l} = sqrt((k+1)^{1−α₁}(l+1)^{1−α₂} / ((k+1)³ + (l+1)³))`.
    NonFactoring { alpha: WeightVector },
    /// `a_{k,l} = 1`, i.e. `1 / ((1−z)(1−w))`.
    AllOnes,
    /// Taylor coefficients of `1 / (z + w − 2)`: `a_{k,l} = −C(k+l, k) / 2^{k+l+1}`.
    Rational,
    /// `a_{k,l} = g_l / (G (k+1)^{(α₁+2)/2})` with the lacunary
    /// `g(w) = Σ_j 2^{−jα₂/2} w^{2^j}` and `G = Σ_j 2^{−jα₂/2} ≥ ‖g‖_∞`.
    LacunaryBounded { alpha: WeightVector },
    /// `a_{k,l} = q₁^k q₂^l`, i.e. `1 / ((1 − q₁z)(1 − q₂w))`.
    Tensor { q1: f64, q2: f64 },
}

impl NamedFamily {
    pub fn id(&self) -> FamilyId {
        match self {
            NamedFamily::ProperContainment { .. } => FamilyId::ProperContainment,
            NamedFamily::UnivariateRemark { .. } => FamilyId::UnivariateRemark,
            NamedFamily::NonFactoring { .. } => FamilyId::NonFactoring,
            NamedFamily::AllOnes => FamilyId::AllOnes,
            NamedFamily::Rational => FamilyId::Rational,
            NamedFamily::LacunaryBounded { .. } => FamilyId::LacunaryBounded,
            NamedFamily::Tensor { .. } => FamilyId::Tensor,
        }
    }

    /// Builds a family from its id, an optional weight vector and extra scalar
    /// parameters (`q1`, `q2` for `tensor`).
    pub fn from_params(
        id: FamilyId,
        alpha: Option<WeightVector>,
        extra: &BTreeMap<String, f64>,
    ) -> Result<Self> {
        let need_alpha = || {
            alpha.ok_or_else(|| Error::Config(format!("family `{id}` requires a weight vector")))
        };
        let family = match id {
            FamilyId::ProperContainment => NamedFamily::ProperContainment { alpha: need_alpha()? },
            FamilyId::UnivariateRemark => NamedFamily::UnivariateRemark {
                alpha1: need_alpha()?.alpha1,
            },
            FamilyId::NonFactoring => NamedFamily::NonFactoring { alpha: need_alpha()? },
            FamilyId::AllOnes => NamedFamily::AllOnes,
            FamilyId::Rational => NamedFamily::Rational,
            FamilyId::LacunaryBounded => NamedFamily::LacunaryBounded { alpha: need_alpha()? },
            FamilyId::Tensor => NamedFamily::Tensor {
                q1: extra.get("q1").copied().unwrap_or(0.5),
                q2: extra.get("q2").copied().unwrap_or(0.5),
            },
        };
        family.validate()?;
        Ok(family)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |a: &WeightVector| {
            if a.is_finite() {
                Ok(())
            } else {
                Err(Error::Config("weight vector must be finite".into()))
            }
        };
        match self {
            NamedFamily::ProperContainment { alpha } | NamedFamily::NonFactoring { alpha } => finite(alpha),
            NamedFamily::UnivariateRemark { alpha1 } if !alpha1.is_finite() => {
                Err(Error::Config("alpha1 must be finite".into()))
            }
            NamedFamily::LacunaryBounded { alpha } => {
                finite(alpha)?;
                if alpha.alpha2 <= 0.0 {
                    return Err(Error::Config(
                        "lacunary_bounded needs alpha2 > 0 for a bounded witness".into(),
                    ));
                }
                Ok(())
            }
            NamedFamily::Tensor { q1, q2 } => {
                if q1.abs() < 1.0 && q2.abs() < 1.0 {
                    Ok(())
                } else {
                    Err(Error::Config("tensor ratios must satisfy |q| < 1".into()))
                }
            }
            _ => Ok(()),
        }
    }

    /// `ln |a_{k,l}|`; `−∞` for a zero coefficient.
    pub fn ln_modulus(&self, k: usize, l: usize) -> f64 {
        let lk = (k as f64 + 1.0).ln();
        let ll = (l as f64 + 1.0).ln();
        match self {
            NamedFamily::ProperContainment { alpha } => {
                0.5 * ((-alpha.alpha1 - 1.0) * lk + (-alpha.alpha2 - 1.0) * ll)
            }
            NamedFamily::UnivariateRemark { alpha1 } => {
                if l == 0 {
                    0.5 * (-alpha1 - 1.0) * lk
                } else {
                    f64::NEG_INFINITY
                }
            }
            NamedFamily::NonFactoring { alpha } => {
                let denom = (3.0 * lk).exp() + (3.0 * ll).exp();
                0.5 * ((1.0 - alpha.alpha1) * lk + (1.0 - alpha.alpha2) * ll - denom.ln())
            }
            NamedFamily::AllOnes => 0.0,
            NamedFamily::Rational => {
                let n = (k + l) as f64;
                ln_gamma_ratio(l as f64 + 1.0, k as f64) - ln_gamma_ratio(1.0, k as f64)
                    - (n + 1.0) * std::f64::consts::LN_2
            }
            NamedFamily::LacunaryBounded { alpha } => match lacunary_exponent(l) {
                Some(j) => {
                    -0.5 * j as f64 * alpha.alpha2 * std::f64::consts::LN_2
                        - lacunary_ln_norm(alpha.alpha2)
                        - 0.5 * (alpha.alpha1 + 2.0) * lk
                }
                None => f64::NEG_INFINITY,
            },
            NamedFamily::Tensor { q1, q2 } => k as f64 * q1.abs().ln() + l as f64 * q2.abs().ln(),
        }
    }

    /// Closed-form coefficient `a_{k,l}`.
    pub fn coefficient(&self, k: usize, l: usize) -> C64 {
        let m = self.ln_modulus(k, l);
        if m == f64::NEG_INFINITY {
            return ZERO;
        }
        let sign = match self {
            NamedFamily::Rational => -1.0,
            NamedFamily::Tensor { q1, q2 } => q1.powi(k as i32).signum() * q2.powi(l as i32).signum(),
            _ => 1.0,
        };
        C64::new(sign * m.exp(), 0.0)
    }

    /// Populates the `(deg_z, deg_w)` grid from the closed form.
    pub fn generate(&self, deg_z: usize, deg_w: usize) -> TruncatedSeries {
        match self {
            NamedFamily::Rational => {
                let lf = ln_factorial_table(deg_z + deg_w);
                TruncatedSeries::from_fn(deg_z, deg_w, |k, l| {
                    let n = k + l;
                    let m = lf[n] - lf[k] - lf[l] - (n as f64 + 1.0) * std::f64::consts::LN_2;
                    C64::new(-m.exp(), 0.0)
                })
            }
            NamedFamily::Tensor { q1, q2 } => {
                let pz: Vec<f64> = powers(*q1, deg_z);
                let pw: Vec<f64> = powers(*q2, deg_w);
                TruncatedSeries::from_fn(deg_z, deg_w, |k, l| C64::new(pz[k] * pw[l], 0.0))
            }
            NamedFamily::AllOnes => {
                TruncatedSeries::from_fn(deg_z, deg_w, |_, _| C64::new(1.0, 0.0))
            }
            _ => TruncatedSeries::from_fn(deg_z, deg_w, |k, l| self.coefficient(k, l)),
        }
    }
}

/// Populates a grid from a named family.
pub fn generate(family: &NamedFamily, deg_z: usize, deg_w: usize) -> TruncatedSeries {
    family.generate(deg_z, deg_w)
}

fn powers(q: f64, n: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(n + 1);
    let mut p = 1.0;
    for _ in 0..=n {
        v.push(p);
        p *= q;
    }
    v
}

/// `j` with `l = 2^j`, if any.
pub(crate) fn lacunary_exponent(l: usize) -> Option<u32> {
    if l.is_power_of_two() {
        Some(l.trailing_zeros())
    } else {
        None
    }
}

/// `ln G` with `G = Σ_{j≥0} 2^{−jα₂/2} = 1 / (1 − 2^{−α₂/2})`.
pub(crate) fn lacunary_ln_norm(alpha2: f64) -> f64 {
    -(-(-0.5 * alpha2 * std::f64::consts::LN_2).exp()).ln_1p()
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
    fn evaluate_constant_and_monomial() {
        let one = TruncatedSeries::constant(c(1.0));
        assert_eq!(one.evaluate(c(0.3), C64::new(0.1, -0.4)).unwrap(), c(1.0));
        let m = TruncatedSeries::monomial(2, 1, c(1.0));
        assert_relative_eq!(m.evaluate(c(0.5), c(0.5)).unwrap().re, 0.125, epsilon = 1e-16);
    }

    #[test]
    fn evaluate_all_ones_matches_geometric_closed_form() {
        let f = NamedFamily::AllOnes.generate(50, 50);
        let v = f.evaluate(c(0.5), c(0.5)).unwrap();
        assert!((v - c(4.0)).norm() < 1e-12);
    }

    #[test]
    fn evaluate_rejects_points_outside_bidisc() {
        let f = TruncatedSeries::constant(c(1.0));
        assert!(matches!(f.evaluate(c(1.0), c(0.0)), Err(Error::Domain(_))));
        assert!(matches!(f.evaluate(c(0.0), C64::new(0.8, 0.8)), Err(Error::Domain(_))));
        assert!(matches!(f.evaluate(c(f64::NAN), c(0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn cauchy_product_examples() {
        let a = TruncatedSeries::from_fn(1, 0, |_, _| c(1.0)); // 1 + z
        let b = TruncatedSeries::from_fn(0, 1, |_, _| c(1.0)); // 1 + w
        let p = a.cauchy_product(&b);
        assert_eq!(p.degrees(), (1, 1));
        for (_, _, v) in p.iter() {
            assert_eq!(v, c(1.0));
        }
        let m = TruncatedSeries::monomial(2, 3, c(1.0)).cauchy_product(&TruncatedSeries::monomial(1, 4, c(1.0)));
        assert_eq!(m.degrees(), (3, 7));
        for (k, l, v) in m.iter() {
            let want = if (k, l) == (3, 7) { 1.0 } else { 0.0 };
            assert_eq!(v, c(want));
        }
    }

    #[test]
    fn cauchy_product_matches_pointwise_product() {
        let f = TruncatedSeries::from_fn(4, 3, |k, l| C64::new(1.0 / (k + l + 1) as f64, (k as f64) * 0.1 - 0.2));
        let g = TruncatedSeries::from_fn(2, 5, |k, l| C64::new((l as f64) * 0.3 - 0.5, 1.0 / (k + 2) as f64));
        let p = (c(0.3), c(0.2));
        let lhs = f.cauchy_product(&g).evaluate(p.0, p.1).unwrap();
        let rhs = f.evaluate(p.0, p.1).unwrap() * g.evaluate(p.0, p.1).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn slice_examples() {
        let zw = TruncatedSeries::monomial(1, 1, c(1.0));
        let s = zw.slice_w(c(0.5)).unwrap();
        assert_eq!(s.coeffs(), &[c(0.0), c(0.5)]);
        let ones = NamedFamily::AllOnes.generate(6, 9);
        let s = ones.slice_w(c(0.5)).unwrap();
        for b in s.coeffs() {
            assert_relative_eq!(b.re, 2.0 * (1.0 - 0.5f64.powi(10)), max_relative = 1e-15);
        }
        assert!(ones.slice_w(c(1.0)).is_err());
        let sz = zw.slice_z(c(0.25)).unwrap();
        assert_eq!(sz.coeffs(), &[c(0.0), c(0.25)]);
    }

    #[test]
    fn rational_slice_matches_closed_form() {
        let deg = 120;
        let f = NamedFamily::Rational.generate(deg, deg);
        for &w0 in &[0.0, 0.5, -0.7, 0.9] {
            let s = f.slice_w(c(w0)).unwrap();
            for k in 0..=deg / 2 {
                let want = -(1.0 / (2.0 - w0)).powi(k as i32 + 1);
                assert!((s.coeff(k).re - want).abs() < 1e-10, "w0={w0} k={k}");
            }
        }
    }

    #[test]
    fn torus_samples_match_direct_evaluation() {
        let f = TruncatedSeries::from_fn(9, 4, |k, l| C64::new(1.0 / (k + 1) as f64, l as f64 * 0.25));
        let (r1, r2, n1, n2) = (0.8, 0.6, 5, 7);
        let s = torus_samples(&f, r1, r2, n1, n2);
        for i in 0..n1 {
            for j in 0..n2 {
                let z = C64::from_polar(r1, 2.0 * std::f64::consts::PI * i as f64 / n1 as f64);
                let w = C64::from_polar(r2, 2.0 * std::f64::consts::PI * j as f64 / n2 as f64);
                assert!((s[i * n2 + j] - f.evaluate(z, w).unwrap()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn tensor_examples() {
        let one = UnivariateSeries::new(vec![c(1.0)]).unwrap();
        assert_eq!(tensor_product(&one, &one), TruncatedSeries::constant(c(1.0)));
        let z = UnivariateSeries::new(vec![c(0.0), c(1.0)]).unwrap();
        let one_plus_w = UnivariateSeries::new(vec![c(1.0), c(1.0)]).unwrap();
        let t = tensor_product(&z, &one_plus_w);
        for (k, l, v) in t.iter() {
            assert_eq!(v, c(if k == 1 { 1.0 } else { 0.0 }), "({k},{l})");
        }
    }

    #[test]
    fn generator_examples() {
        let nf = NamedFamily::NonFactoring { alpha: WeightVector::new(0.0, 0.0) }.generate(3, 3);
        assert_relative_eq!(nf.coeff(0, 0).re, 0.5f64.sqrt(), max_relative = 1e-15);
        let r = NamedFamily::Rational.generate(60, 60);
        assert_eq!(r.coeff(0, 0), c(-0.5));
        assert!((r.evaluate(c(0.5), c(0.0)).unwrap() - c(-2.0 / 3.0)).norm() < 1e-9);
        let pc = NamedFamily::ProperContainment { alpha: WeightVector::new(1.0, 1.0) }.generate(7, 7);
        for (k, l, v) in pc.iter() {
            assert_relative_eq!(v.re, 1.0 / ((k + 1) * (l + 1)) as f64, max_relative = 1e-14);
        }
    }

    #[test]
    fn rational_closed_form_agrees_with_table_generator() {
        let g = NamedFamily::Rational.generate(40, 40);
        for (k, l, v) in g.iter() {
            let direct = NamedFamily::Rational.coefficient(k, l);
            assert!((v - direct).norm() <= 1e-12 * v.norm(), "({k},{l})");
        }
    }

    #[test]
    fn lacunary_is_supported_on_powers_of_two() {
        let a = WeightVector::new(0.0, 2.0);
        let f = NamedFamily::LacunaryBounded { alpha: a }.generate(2, 17);
        let g_norm = 1.0 / (1.0 - 0.5);
        for (k, l, v) in f.iter() {
            if l.is_power_of_two() {
                let j = l.trailing_zeros() as i32;
                let want = 2f64.powi(-j) / g_norm / (k as f64 + 1.0);
                assert_relative_eq!(v.re, want, max_relative = 1e-14);
            } else {
                assert_eq!(v, ZERO);
            }
        }
        assert!(NamedFamily::from_params(FamilyId::LacunaryBounded, Some(WeightVector::new(0.0, -1.0)), &BTreeMap::new()).is_err());
    }

    #[test]
    fn family_params() {
        assert!(NamedFamily::from_params(FamilyId::NonFactoring, None, &BTreeMap::new()).is_err());
        assert_eq!(
            NamedFamily::from_params(FamilyId::Rational, None, &BTreeMap::new()).unwrap(),
            NamedFamily::Rational
        );
        let mut extra = BTreeMap::new();
        extra.insert("q1".to_string(), 1.5);
        assert!(NamedFamily::from_params(FamilyId::Tensor, None, &extra).is_err());
        for id in FamilyId::ALL {
            assert_eq!(id.name().parse::<FamilyId>().unwrap(), id);
        }
        assert!("nope".parse::<FamilyId>().is_err());
    }

    fn grid(deg: (usize, usize), vals: &[(f64, f64)]) -> TruncatedSeries {
        let mut it = vals.iter().cycle();
        TruncatedSeries::from_fn(deg.0, deg.1, |_, _| {
            let &(re, im) = it.next().unwrap();
            C64::new(re, im)
        })
    }

    proptest! {
        #[test]
        fn cauchy_product_commutes_bitwise(
            d1 in (0usize..5, 0usize..5), d2 in (0usize..5, 0usize..5),
            v1 in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..30),
            v2 in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..30),
        ) {
            let f = grid(d1, &v1);
            let g = grid(d2, &v2);
            prop_assert_eq!(f.cauchy_product(&g), g.cauchy_product(&f));
        }

        #[test]
        fn cauchy_product_associates(
            d in (0usize..4, 0usize..4),
            v1 in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..20),
            v2 in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..20),
            v3 in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..20),
        ) {
            let (f, g, h) = (grid(d, &v1), grid((d.1, d.0), &v2), grid(d, &v3));
            let a = f.cauchy_product(&g).cauchy_product(&h);
            let b = f.cauchy_product(&g.cauchy_product(&h));
            for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
                prop_assert!((x - y).norm() < 1e-12);
            }
        }

        #[test]
        fn tensor_evaluates_as_product(
            v1 in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..12),
            v2 in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..12),
            z in (-0.6f64..0.6, -0.6f64..0.6), w in (-0.6f64..0.6, -0.6f64..0.6),
        ) {
            let f1 = UnivariateSeries::new(v1.iter().map(|&(a, b)| C64::new(a, b)).collect()).unwrap();
            let f2 = UnivariateSeries::new(v2.iter().map(|&(a, b)| C64::new(a, b)).collect()).unwrap();
            let (z, w) = (C64::new(z.0, z.1), C64::new(w.0, w.1));
            let t = tensor_product(&f1, &f2);
            let lhs = t.evaluate(z, w).unwrap();
            let rhs = f1.evaluate(z).unwrap() * f2.evaluate(w).unwrap();
            // relative to the absolute term sum, which bounds the rounding
            let scale: f64 = t.iter().map(|(k, l, a)| a.norm() * z.norm().powi(k as i32) * w.norm().powi(l as i32)).sum();
            prop_assert!((lhs - rhs).norm() <= 1e-13 * scale.max(1e-300));

            let w0 = w;
            let s = t.slice_w(w0).unwrap();
            let scale_w = f2.evaluate(w0).unwrap();
            for k in 0..=f1.deg() {
                let want = f1.coeff(k) * scale_w;
                let bound: f64 = (0..=f2.deg()).map(|l| (f1.coeff(k) * f2.coeff(l)).norm() * w0.norm().powi(l as i32)).sum();
                prop_assert!((s.coeff(k) - want).norm() <= 1e-13 * bound.max(1e-300));
            }
        }
    }
}
