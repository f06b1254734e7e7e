//! Gauss–Jacobi rules on `(0, 1)` for the radial weight `(1 − t)^a`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Nodes `t_i ∈ (0,1)` and positive weights `ω_i` with
/// `Σ ω_i p(t_i) = ∫₀¹ (1−t)^a p(t) dt` for polynomials of degree `< 2n`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussJacobi {
    pub a: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussJacobi {
    /// Golub–Welsch on the Jacobi matrix for `(1−x)^a (1+x)^0` on `[−1, 1]`,
    /// mapped by `t = (1+x)/2`.
    pub fn new(n: usize, a: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("quadrature needs at least one node".into()));
        }
        if !(a > -1.0) || !a.is_finite() {
            return Err(Error::Precondition(format!("Jacobi exponent must exceed -1, got {a}")));
        }
        let b = 0.0;
        let mut j = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            let m = i as f64;
            let s = 2.0 * m + a + b;
            j[(i, i)] = if i == 0 {
                (b - a) / (a + b + 2.0)
            } else {
                (b * b - a * a) / (s * (s + 2.0))
            };
            if i + 1 < n {
                let m = m + 1.0;
                let s = 2.0 * m + a + b;
                let beta = 4.0 * m * (m + a) * (m + b) * (m + a + b) / (s * s * (s + 1.0) * (s - 1.0));
                j[(i, i + 1)] = beta.sqrt();
                j[(i + 1, i)] = beta.sqrt();
            }
        }
        let eig = SymmetricEigen::new(j);
        // ∫₀¹ (1−t)^a dt = 1/(a+1)
        let mu0 = 1.0 / (a + 1.0);
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let v0 = eig.eigenvectors[(0, i)];
                ((1.0 + eig.eigenvalues[i]) / 2.0, v0 * v0 * mu0)
            })
            .collect();
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        Ok(Self {
            a,
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * f(t)).sum()
    }
}
