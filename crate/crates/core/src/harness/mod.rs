//! Executable checks of the structural results about `D_α`, each producing a
//! [`CheckReport`] with named metrics and a verdict.
//!
//! Claims that an infinite series lies outside a space are reported through
//! [`trend::divergence_trend`] over dyadic truncations; everything else is an
//! inequality or identity checked on sampled truncated series.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{parse_degree, parse_weight};
use crate::series::{TruncatedSeries, UnivariateSeries, C64};
use crate::space::WeightVector;

mod checks;
pub mod suite;
pub mod sums;
pub mod trend;

pub use suite::{full_suite, SuiteConfig, SuiteReport, SuiteSummary};
pub use trend::{divergence_trend, Classification, DivergenceVerdict, TrendConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CheckId {
    ProperContainment,
    RemarkContainment,
    DInHinf,
    IntegralEquivalence,
    MultipliersBelowZeroIff,
    MEqualsHinf,
    MEqualsDbeta,
    MMonotone,
    ZeroMultiplier,
    SlicesMembership,
    NonFactoring,
    UnboundedSliceNorms,
    BoundedSlicesInsufficient,
    BoundedSlicesSufficient,
    ProductMembership,
    MultiplierSlices,
    MultiplierSlicesConverseFails,
    RationalExample,
}

impl CheckId {
    pub const ALL: [CheckId; 18] = [
        CheckId::ProperContainment,
        CheckId::RemarkContainment,
        CheckId::DInHinf,
        CheckId::IntegralEquivalence,
        CheckId::MultipliersBelowZeroIff,
        CheckId::MEqualsHinf,
        CheckId::MEqualsDbeta,
        CheckId::MMonotone,
        CheckId::ZeroMultiplier,
        CheckId::SlicesMembership,
        CheckId::NonFactoring,
        CheckId::UnboundedSliceNorms,
        CheckId::BoundedSlicesInsufficient,
        CheckId::BoundedSlicesSufficient,
        CheckId::ProductMembership,
        CheckId::MultiplierSlices,
        CheckId::MultiplierSlicesConverseFails,
        CheckId::RationalExample,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckId::ProperContainment => "proper_containment",
            CheckId::RemarkContainment => "remark_containment",
            CheckId::DInHinf => "d_in_hinf",
            CheckId::IntegralEquivalence => "integral_equivalence",
            CheckId::MultipliersBelowZeroIff => "multipliers_below_zero_iff",
            CheckId::MEqualsHinf => "M_equals_Hinf",
            CheckId::MEqualsDbeta => "M_equals_Dbeta",
            CheckId::MMonotone => "M_monotone",
            CheckId::ZeroMultiplier => "zero_multiplier",
            CheckId::SlicesMembership => "slices_membership",
            CheckId::NonFactoring => "non_factoring",
            CheckId::UnboundedSliceNorms => "unbounded_slice_norms",
            CheckId::BoundedSlicesInsufficient => "bounded_slices_insufficient",
            CheckId::BoundedSlicesSufficient => "bounded_slices_sufficient",
            CheckId::ProductMembership => "product_membership",
            CheckId::MultiplierSlices => "multiplier_slices",
            CheckId::MultiplierSlicesConverseFails => "multiplier_slices_converse_fails",
            CheckId::RationalExample => "rational_example",
        }
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckId::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown check `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_id: String,
    pub params: BTreeMap<String, String>,
    pub verdict: Verdict,
    pub metrics: BTreeMap<String, f64>,
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub trends: BTreeMap<String, DivergenceVerdict>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
    /// Set when a trend sample stayed below the classifier's resolution gate.
    #[serde(default)]
    pub low_resolution: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

/// Suite-wide defaults that individual checks read unless overridden.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckContext {
    /// Largest truncation for divergence trends.
    pub max_degree: usize,
    /// Truncation for dense coefficient grids.
    pub grid_degree: usize,
    pub seed: u64,
}

impl Default for CheckContext {
    fn default() -> Self {
        Self {
            max_degree: 8192,
            grid_degree: 512,
            seed: 20_240_917,
        }
    }
}

/// Typed access to string parameters; records effective values and rejects
/// keys that a check does not read.
pub(crate) struct Params<'a> {
    raw: &'a BTreeMap<String, String>,
    effective: BTreeMap<String, String>,
}

impl<'a> Params<'a> {
    fn new(raw: &'a BTreeMap<String, String>) -> Self {
        Self {
            raw,
            effective: BTreeMap::new(),
        }
    }

    fn get<T>(&mut self, key: &str, default: T, parse: impl Fn(&str) -> Result<T>, show: impl Fn(&T) -> String) -> Result<T> {
        let v = match self.raw.get(key) {
            Some(s) => parse(s).map_err(|e| Error::Config(format!("parameter `{key}`: {e}")))?,
            None => default,
        };
        self.effective.insert(key.to_string(), show(&v));
        Ok(v)
    }

    pub fn weight(&mut self, key: &str, default: WeightVector) -> Result<WeightVector> {
        self.get(key, default, parse_weight, |w| w.to_string())
    }

    pub fn usize(&mut self, key: &str, default: usize) -> Result<usize> {
        self.get(
            key,
            default,
            |s| s.trim().parse().map_err(|_| Error::Config(format!("invalid integer `{s}`"))),
            |v| v.to_string(),
        )
    }

    pub fn degree(&mut self, key: &str, default: (usize, usize)) -> Result<(usize, usize)> {
        self.get(key, default, parse_degree, |d| format!("{},{}", d.0, d.1))
    }

    pub fn f64(&mut self, key: &str, default: f64) -> Result<f64> {
        self.get(
            key,
            default,
            |s| match s.trim().parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(Error::Config(format!("invalid number `{s}`"))),
            },
            |v| v.to_string(),
        )
    }

    fn finish(self) -> Result<BTreeMap<String, String>> {
        if let Some(k) = self.raw.keys().find(|k| !self.effective.contains_key(*k)) {
            return Err(Error::Config(format!("unknown parameter `{k}`")));
        }
        Ok(self.effective)
    }
}

/// Accumulates metrics and requirement outcomes for one check.
#[derive(Default)]
pub(crate) struct Outcome {
    metrics: BTreeMap<String, f64>,
    tolerances: BTreeMap<String, f64>,
    trends: BTreeMap<String, DivergenceVerdict>,
    failures: Vec<String>,
    low_resolution: bool,
}

impl Outcome {
    pub fn metric(&mut self, name: impl Into<String>, v: f64) {
        self.metrics.insert(name.into(), v);
    }

    pub fn tolerance(&mut self, name: &str, v: f64) {
        self.tolerances.insert(name.to_string(), v);
    }

    pub fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    /// Records a trend; a verdict below the resolution gate marks the check
    /// low-resolution instead of testing `expect`.
    pub fn trend(
        &mut self,
        name: &str,
        samples: &[(usize, f64)],
        expect: impl FnOnce(&DivergenceVerdict) -> bool,
        what: &str,
    ) -> Result<DivergenceVerdict> {
        let cfg = TrendConfig::default();
        let v = trend::divergence_trend_with(samples, &cfg)?;
        self.trends.insert(name.to_string(), v);
        self.metric(format!("{name}_max_n"), samples.last().map_or(0.0, |s| s.0 as f64));
        self.metric(format!("{name}_last_sum"), samples.last().map_or(0.0, |s| s.1));
        if samples.last().map_or(0, |s| s.0) < cfg.min_resolution {
            self.low_resolution = true;
        } else if !expect(&v) {
            self.failures.push(format!(
                "{name}: expected {what}, got {} (constant {}, exponent {})",
                v.classification.name(),
                v.fit_constant,
                v.slope_exponent
            ));
        }
        Ok(v)
    }
}

/// Runs one catalog check by name.
pub fn run_check(check_id: &str, params: &BTreeMap<String, String>, ctx: &CheckContext) -> Result<CheckReport> {
    let id: CheckId = check_id.parse()?;
    run_check_id(id, params, ctx)
}

pub fn run_check_id(id: CheckId, params: &BTreeMap<String, String>, ctx: &CheckContext) -> Result<CheckReport> {
    let start = Instant::now();
    let mut p = Params::new(params);
    let ctx = CheckContext {
        max_degree: p.usize("max_degree", ctx.max_degree)?,
        grid_degree: p.usize("grid_degree", ctx.grid_degree)?,
        seed: p.get("seed", ctx.seed, |s| s.trim().parse().map_err(|_| Error::Config(format!("invalid seed `{s}`"))), |v| v.to_string())?,
    };
    let mut out = Outcome::default();
    checks::dispatch(id, &mut p, &ctx, &mut out)?;
    let params = p.finish()?;
    let verdict = if !out.failures.is_empty() && !out.low_resolution {
        Verdict::Fail
    } else if out.low_resolution {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    Ok(CheckReport {
        check_id: id.name().to_string(),
        params,
        verdict,
        metrics: out.metrics,
        tolerances: out.tolerances,
        trends: out.trends,
        failures: out.failures,
        low_resolution: out.low_resolution,
        runtime_ms: Some(start.elapsed().as_millis() as u64),
    })
}

/// Uniform point of the open unit disc.
pub fn unit_disc_sample(rng: &mut ChaCha8Rng) -> C64 {
    let r = rng.gen::<f64>().sqrt();
    let t = rng.gen::<f64>() * std::f64::consts::TAU;
    C64::from_polar(r, t)
}

/// Coefficients uniform in the unit disc, scaled by `1/((k+1)(l+1))`.
pub fn random_series(rng: &mut ChaCha8Rng, deg: (usize, usize)) -> TruncatedSeries {
    TruncatedSeries::from_fn(deg.0, deg.1, |k, l| unit_disc_sample(rng) / ((k + 1) * (l + 1)) as f64)
}

pub fn random_univariate(rng: &mut ChaCha8Rng, deg: usize) -> UnivariateSeries {
    UnivariateSeries::from_fn(deg, |k| unit_disc_sample(rng) / (k + 1) as f64)
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Low-discrepancy (Halton) points `(z, w)` with `|z|, |w| ≤ radius`.
pub fn halton_points(n: usize, radius: f64) -> Vec<(C64, C64)> {
    (1..=n as u64)
        .map(|i| {
            let u = [2, 3, 5, 7].map(|b| radical_inverse(i, b));
            (
                C64::from_polar(radius * u[0].sqrt(), std::f64::consts::TAU * u[1]),
                C64::from_polar(radius * u[2].sqrt(), std::f64::consts::TAU * u[3]),
            )
        })
        .collect()
}
