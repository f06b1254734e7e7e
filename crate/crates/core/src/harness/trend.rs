//! Classification of partial-sum sequences as convergent or divergent.
//!
//! Given samples `(N_j, S_N_j)` on a geometric grid of sizes, the local
//! log-slopes `d_j = ΔS / Δ ln N` behave like `c N^p`: `p > 0` for power
//! growth, `p ≈ 0` for `c ln N` growth and `p < 0` for a convergent series.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Convergent,
    LogDivergent,
    PowerDivergent,
    Inconclusive,
}

impl Classification {
    pub fn name(self) -> &'static str {
        match self {
            Classification::Convergent => "convergent",
            Classification::LogDivergent => "log_divergent",
            Classification::PowerDivergent => "power_divergent",
            Classification::Inconclusive => "inconclusive",
        }
    }

    pub fn is_divergent(self) -> bool {
        matches!(self, Classification::LogDivergent | Classification::PowerDivergent)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceVerdict {
    pub classification: Classification,
    /// `c` in `c ln N + b` or `c N^p`; the extrapolated limit when convergent.
    pub fit_constant: f64,
    /// Max deviation of the chosen fit relative to the sample span, or the
    /// last relative Cauchy increment when convergent.
    pub fit_residual: f64,
    /// Fitted growth exponent of the log-slopes.
    pub slope_exponent: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrendConfig {
    /// Largest sample size must reach this for a definite verdict.
    pub min_resolution: usize,
    /// `|p|` below this counts as logarithmic growth.
    pub power_threshold: f64,
    /// Relative last increment below this is a Cauchy tail.
    pub cauchy_tol: f64,
    /// Relative residual bound for the `c ln N + b` fit.
    pub log_residual: f64,
}

impl Default for TrendConfig {
    fn default() -> Self {
        Self {
            min_resolution: 256,
            power_threshold: 0.15,
            cauchy_tol: 1e-3,
            log_residual: 0.02,
        }
    }
}

/// Least-squares line `y = m x + q`; returns `(m, q)`.
fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let m = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (m, my - m * mx)
}

pub fn divergence_trend(samples: &[(usize, f64)]) -> Result<DivergenceVerdict> {
    divergence_trend_with(samples, &TrendConfig::default())
}

pub fn divergence_trend_with(samples: &[(usize, f64)], cfg: &TrendConfig) -> Result<DivergenceVerdict> {
    if samples.len() < 4 {
        return Err(Error::Precondition(format!(
            "trend fit needs at least 4 samples, got {}",
            samples.len()
        )));
    }
    if samples.windows(2).any(|w| w[1].0 <= w[0].0) || samples[0].0 == 0 {
        return Err(Error::Precondition("sample sizes must be positive and increasing".into()));
    }
    if samples.iter().any(|s| !s.1.is_finite()) {
        return Err(Error::Precondition("partial sums must be finite".into()));
    }
    let inconclusive = |p: f64| DivergenceVerdict {
        classification: Classification::Inconclusive,
        fit_constant: f64::NAN,
        fit_residual: f64::NAN,
        slope_exponent: p,
    };
    if samples.last().unwrap().0 < cfg.min_resolution {
        return Ok(inconclusive(f64::NAN));
    }
    let ln_n: Vec<f64> = samples.iter().map(|s| (s.0 as f64).ln()).collect();
    let s: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let steps: Vec<f64> = s.windows(2).map(|w| w[1] - w[0]).collect();
    let last = *s.last().unwrap();
    let last_step = *steps.last().unwrap();
    let cauchy = last_step.abs() / last.abs().max(f64::MIN_POSITIVE);

    if steps.iter().any(|&d| d <= 0.0) {
        // a non-increasing sample only fits a settled series
        return Ok(if cauchy <= cfg.cauchy_tol {
            DivergenceVerdict {
                classification: Classification::Convergent,
                fit_constant: last,
                fit_residual: cauchy,
                slope_exponent: f64::NEG_INFINITY,
            }
        } else {
            inconclusive(f64::NAN)
        });
    }

    let mid: Vec<f64> = ln_n.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let ln_d: Vec<f64> = steps
        .iter()
        .zip(ln_n.windows(2))
        .map(|(d, w)| (d / (w[1] - w[0])).ln())
        .collect();
    let (p, q) = line_fit(&mid, &ln_d);

    if p > cfg.power_threshold {
        // S = c N^p sampled with log-step h gives d = c e^{p·mid} 2 sinh(ph/2) / h
        let h = (ln_n[ln_n.len() - 1] - ln_n[0]) / (ln_n.len() - 1) as f64;
        return Ok(DivergenceVerdict {
            classification: Classification::PowerDivergent,
            fit_constant: q.exp() * h / (2.0 * (0.5 * p * h).sinh()),
            fit_residual: fit_spread(&mid, &ln_d, p, q),
            slope_exponent: p,
        });
    }
    if p < -cfg.power_threshold {
        if cauchy > cfg.cauchy_tol {
            return Ok(inconclusive(p));
        }
        let prev = steps[steps.len() - 2];
        let ratio = last_step / prev;
        let limit = if ratio < 1.0 { last + last_step * ratio / (1.0 - ratio) } else { last };
        return Ok(DivergenceVerdict {
            classification: Classification::Convergent,
            fit_constant: limit,
            fit_residual: cauchy,
            slope_exponent: p,
        });
    }
    let (c, b) = line_fit(&ln_n, &s);
    let span = s.iter().copied().fold(f64::NEG_INFINITY, f64::max) - s.iter().copied().fold(f64::INFINITY, f64::min);
    let rel = if span > 0.0 {
        fit_spread(&ln_n, &s, c, b) / span
    } else {
        f64::INFINITY
    };
    if c > 0.0 && rel < cfg.log_residual {
        Ok(DivergenceVerdict {
            classification: Classification::LogDivergent,
            fit_constant: c,
            fit_residual: rel,
            slope_exponent: p,
        })
    } else {
        Ok(inconclusive(p))
    }
}

fn fit_spread(x: &[f64], y: &[f64], m: f64, q: f64) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (b - (m * a + q)).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::sums::{dyadic_sizes, partial_sums_1d};
    use proptest::prelude::*;

    fn sizes() -> Vec<usize> {
        dyadic_sizes(8, 13)
    }

    #[test]
    fn harmonic_half_is_log_divergent() {
        let s = partial_sums_1d(&sizes(), |k| 1.0 / (2.0 * (k as f64 + 1.0)));
        let v = divergence_trend(&s).unwrap();
        assert_eq!(v.classification, Classification::LogDivergent);
        assert!((v.fit_constant - 0.5).abs() < 0.01, "{v:?}");
        let at_1000: f64 = (0..=1000).map(|k| 1.0 / (2.0 * (k as f64 + 1.0))).sum();
        assert!((at_1000 - 3.7425).abs() < 1e-3);
    }

    #[test]
    fn basel_sums_converge() {
        let s = partial_sums_1d(&sizes(), |k| (k as f64 + 1.0).powi(-2));
        let v = divergence_trend(&s).unwrap();
        assert_eq!(v.classification, Classification::Convergent);
        assert!((v.fit_constant - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-6, "{v:?}");
    }

    #[test]
    fn linear_growth_is_power_divergent() {
        let s: Vec<(usize, f64)> = sizes().into_iter().map(|n| (n, n as f64)).collect();
        let v = divergence_trend(&s).unwrap();
        assert_eq!(v.classification, Classification::PowerDivergent);
        assert!((v.slope_exponent - 1.0).abs() < 1e-9);
        assert!((v.fit_constant - 1.0).abs() < 1e-9);
        let s: Vec<(usize, f64)> = sizes().into_iter().map(|n| (n, 3.0 * (n as f64).sqrt())).collect();
        let v = divergence_trend(&s).unwrap();
        assert!((v.slope_exponent - 0.5).abs() < 1e-9 && (v.fit_constant - 3.0).abs() < 1e-9);
    }

    #[test]
    fn resolution_gate_and_preconditions() {
        let s = partial_sums_1d(&dyadic_sizes(2, 6), |k| 1.0 / (k as f64 + 1.0));
        assert_eq!(divergence_trend(&s).unwrap().classification, Classification::Inconclusive);
        assert!(divergence_trend(&s[..3]).is_err());
        assert!(divergence_trend(&[(4, 1.0), (2, 1.0), (8, 1.0), (16, 1.0)]).is_err());
        assert!(divergence_trend(&[(0, 1.0), (2, 1.0), (8, 1.0), (16, 1.0)]).is_err());
    }

    #[test]
    fn constant_sequence_is_convergent() {
        let s: Vec<(usize, f64)> = sizes().into_iter().map(|n| (n, 2.0)).collect();
        let v = divergence_trend(&s).unwrap();
        assert_eq!(v.classification, Classification::Convergent);
        assert_eq!(v.fit_constant, 2.0);
    }

    proptest! {
        #[test]
        fn log_fit_recovers_constant(c in 0.05f64..5.0, b in -10.0f64..10.0) {
            let s: Vec<(usize, f64)> = sizes().into_iter().map(|n| (n, c * (n as f64).ln() + b)).collect();
            let v = divergence_trend(&s).unwrap();
            prop_assert_eq!(v.classification, Classification::LogDivergent);
            prop_assert!((v.fit_constant - c).abs() < 1e-9 * c.max(1.0));
        }

        #[test]
        fn convergent_p_series_classified(a in 1.8f64..4.0) {
            let s = partial_sums_1d(&sizes(), |k| (k as f64 + 1.0).powf(-a));
            prop_assert_eq!(divergence_trend(&s).unwrap().classification, Classification::Convergent);
        }

        #[test]
        fn power_growth_classified(p in 0.3f64..2.0) {
            let s: Vec<(usize, f64)> = sizes().into_iter().map(|n| (n, (n as f64).powf(p))).collect();
            let v = divergence_trend(&s).unwrap();
            prop_assert_eq!(v.classification, Classification::PowerDivergent);
            prop_assert!((v.slope_exponent - p).abs() < 1e-9);
        }
    }
}
