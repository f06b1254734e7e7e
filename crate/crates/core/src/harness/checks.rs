//! The check catalog. Each function reads its parameters, computes metrics
//! and records requirements on an [`Outcome`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::sums::{box_partial_sums, dyadic_sizes_up_to, partial_sums_1d};
use super::{halton_points, random_series, random_univariate, CheckContext, CheckId, Outcome, Params};
use crate::error::{Error, Result};
use crate::integral::{
    equivalence_constants, integral_norm_exact, integral_norm_exact_sq, integral_norm_quadrature,
    BetaWeightTable, QuadratureRule,
};
use crate::multiplier::{
    boundary_envelope, convolution_weight_scan_1d, finite_section, functional_degree, hinf_norm_estimate,
    interpolation_inequality_check, operator_norm,
};
use crate::quadrature::GaussJacobi;
use crate::series::{lacunary_exponent, tensor_product, NamedFamily, TruncatedSeries, C64};
use crate::space::{
    eval_functional_norm, eval_functional_norm_1d, hinf_sup_bound, norm_sq, norm_sq_1d, weight_1d, WeightVector,
};
use crate::special::ln_factorial_table;

type CheckFn = fn(&mut Params, &CheckContext, &mut Outcome) -> Result<()>;

pub(super) fn dispatch(id: CheckId, p: &mut Params, ctx: &CheckContext, out: &mut Outcome) -> Result<()> {
    let f: CheckFn = match id {
        CheckId::ProperContainment => proper_containment,
        CheckId::RemarkContainment => remark_containment,
        CheckId::DInHinf => d_in_hinf,
        CheckId::IntegralEquivalence => integral_equivalence,
        CheckId::MultipliersBelowZeroIff => multipliers_below_zero_iff,
        CheckId::MEqualsHinf => m_equals_hinf,
        CheckId::MEqualsDbeta => m_equals_dbeta,
        CheckId::MMonotone => m_monotone,
        CheckId::ZeroMultiplier => zero_multiplier,
        CheckId::SlicesMembership => slices_membership,
        CheckId::NonFactoring => non_factoring,
        CheckId::UnboundedSliceNorms => unbounded_slice_norms,
        CheckId::BoundedSlicesInsufficient => bounded_slices_insufficient,
        CheckId::BoundedSlicesSufficient => bounded_slices_sufficient,
        CheckId::ProductMembership => product_membership,
        CheckId::MultiplierSlices => multiplier_slices,
        CheckId::MultiplierSlicesConverseFails => multiplier_slices_converse_fails,
        CheckId::RationalExample => rational_example,
    };
    f(p, ctx, out)
}

const ZETA2: f64 = std::f64::consts::PI * std::f64::consts::PI / 6.0;

fn w(a: f64, b: f64) -> WeightVector {
    WeightVector::new(a, b)
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn rng(ctx: &CheckContext) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(ctx.seed)
}

fn ln_table(n: usize) -> Vec<f64> {
    (0..=n).map(|k| (k as f64 + 1.0).ln()).collect()
}

fn within(v: f64, target: f64, rel: f64) -> bool {
    (v - target).abs() <= rel * target.abs()
}

fn is_log(target: f64, rel: f64) -> impl Fn(&super::DivergenceVerdict) -> bool {
    move |v| v.classification == super::Classification::LogDivergent && within(v.fit_constant, target, rel)
}

fn is_convergent(v: &super::DivergenceVerdict) -> bool {
    v.classification == super::Classification::Convergent
}

fn is_divergent(v: &super::DivergenceVerdict) -> bool {
    v.classification.is_divergent()
}

/// Largest relative deviation between `closed(k,l)` and the family's own
/// `|a_{k,l}|²` on a small index sample.
fn family_consistency(family: &NamedFamily, closed: impl Fn(usize, usize) -> f64) -> f64 {
    let idx = [0usize, 1, 2, 7, 31, 100, 1023];
    let mut worst = 0.0f64;
    for &k in &idx {
        for &l in &idx {
            let want = family.coefficient(k, l).norm_sqr();
            let got = closed(k, l);
            let dev = if want == 0.0 { got.abs() } else { (got - want).abs() / want };
            worst = worst.max(dev);
        }
    }
    worst
}

fn proper_containment(p: &mut Params, ctx: &CheckContext, out: &mut Outcome) -> Result<()> {
    let alpha = p.weight("alpha", w(1.0, 1.0))?;
    let beta = p.weight("beta", w(0.0, 0.0))?;
    let family = NamedFamily::ProperContainment { alpha };
    let sizes = dyadic_sizes_up_to(ctx.max_degree);
    let lk = ln_table(*sizes.last().unwrap());
    // |a_{k,l}|² = (k+1)^{−α₁−1} (l+1)^{−α₂−1}
    let sq = |k: usize, l: usize| ((-alpha.alpha1 - 1.0) * lk[k] + (-alpha.alpha2 - 1.0) * lk[l]).exp();
    out.metric("family_consistency", family_consistency(&family, |k, l| {
        ((-alpha.alpha1 - 1.0) * ((k + 1) as f64).ln() + (-alpha.alpha2 - 1.0) * ((l + 1) as f64).ln()).exp()
    }));
    let weighted = |g: WeightVector| {
        box_partial_sums(&sizes, |k, l| sq(k, l) * (g.alpha1 * lk[k] + g.alpha2 * lk[l]).exp())
    };
    let alpha_sq = weighted(alpha);
    let alpha_norm: Vec<(usize, f64)> = alpha_sq.iter().map(|&(n, s)| (n, s.sqrt())).collect();
    // ‖f_N‖_α = H_{N+1}, which grows like ln N with constant 1
    out.trend("alpha_norm", &alpha_norm, is_log(1.0, 0.1), "log_divergent with constant 1")?;
    let beta_sq = weighted(beta);
    out.trend("beta_norm_sq", &beta_sq, is_convergent, "convergent")?;
    let (n, s) = *alpha_sq.last().unwrap();
    let ratio = s / (n as f64).ln().powi(2);
    out.metric("alpha_sq_over_ln_sq", ratio);
    out.require(ratio >= 0.9 / 4.0, || format!("alpha norm² grows slower than 0.9 (ln N)²/4: {ratio}"));
    out.tolerance("fit_constant_rel", 0.1);
    out.metric("alpha_strictly_above_beta", alpha.succ(&beta) as u8 as f64);
    Ok(())
}

fn remark_containment(p: &mut Params, ctx: &CheckContext, out: &mut Outcome) -> Result<()> {
    let alpha = p.weight("alpha", w(1.0, 0.0))?;
    let beta = p.weight("beta", w(0.0, alpha.alpha2))?;
    if beta.alpha2 != alpha.alpha2 {
        return Err(Error::Config("remark_containment needs beta2 = alpha2".into()));
    }
    let family = NamedFamily::UnivariateRemark { alpha1: alpha.alpha1 };
    let sizes = dyadic_sizes_up_to(ctx.max_degree);
    let sq = |k: usize| family.coefficient(k, 0).norm_sqr();
    let alpha_sq = partial_sums_1d(&sizes, |k| sq(k) * weight_1d(k, alpha.alpha1));
    out.trend("alpha_norm_sq", &alpha_sq, is_log(1.0, 0.1), "log_divergent with constant 1")?;
    let beta_sq = partial_sums_1d(&sizes, |k| sq(k) * weight_1d(k, beta.alpha1));
    out.trend("beta_norm_sq", &beta_sq, is_convergent, "convergent")?;
    out.metric("off_axis_coefficient", family.coefficient(3, 1).norm());
    out.tolerance("fit_constant_rel", 0.1);
    Ok(())
}

fn d_in_hinf(p: &mut Params, ctx: &CheckContext, out: &mut Outcome) -> Result<()> {
    let alpha = p.weight("alpha", w(2.0, 2.0))?;
    let deg = p.degree("deg", (32, 32))?;
    let samples = p.usize("samples", 100)?;
    let npoints = p.usize("points", 20)?;
    let bound = hinf_sup_bound(&alpha, (4096, 4096))?;
    let b = bound.upper();
    out.metric("sup_bound", bound.value);
    out.metric("sup_bound_tail", bound.tail_bound);
    let points = halton_points(npoints, 0.95);
    let mut rng = rng(ctx);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let f = random_series(&mut rng, deg);
        let nf = norm_sq(&f, &alpha).sqrt();
        for &(z, wv) in &points {
            worst = worst.max(f.evaluate(z, wv)?.norm() / (b * nf));
        }
    }
    out.metric("max_ratio", worst);
    out.tolerance("ratio_slack", 1e-9);
    out.require(worst <= 1.0 + 1e-9, || format!("|f| exceeded bound·‖f‖: ratio {worst}"));
    Ok(())
}

fn integral_equivalence(p: &mut Params, ctx: &CheckContext, out: &mut Outcome) -> Result<()> {
    let alpha = p.weight("alpha", w(-1.5, -0.5))?;
    let deg = p.degree("deg", (16, 16))?;
    let samples = p.usize("samples", 50)?;
    let (lo, hi) = equivalence_constants(&alpha, deg)?;
    out.metric("c_low", lo);
    out.metric("c_high", hi);
    let mut rng = rng(ctx);
    let series: Vec<TruncatedSeries> = (0..samples).map(|_| random_series(&mut rng, deg)).collect();
    let (mut rmin, mut rmax) = (f64::INFINITY, 0.0f64);
    for f in &series {
        let r = integral_norm_exact_sq(f, &alpha)? / norm_sq(f, &alpha);
        rmin = rmin.min(r);
        rmax = rmax.max(r);
    }
    out.metric("ratio_min", rmin);
    out.metric("ratio_max", rmax);
    out.require(rmin >= lo * (1.0 - 1e-12) && rmax <= hi * (1.0 + 1e-12), || {
        format!("ratio range [{rmin}, {rmax}] escapes [{lo}, {hi}]")
    });
    // α = (−1,−1) reproduces the coefficient norm exactly
    let anchor = w(-1.0, -1.0);
    let dev = series
        .iter()
        .map(|f| (integral_norm_exact(f, &anchor).unwrap() / norm_sq(f, &anchor).sqrt() - 1.0).abs())
        .fold(0.0, f64::max);
    out.metric("anchor_max_dev", dev);
    out.require(dev < 1e-12, || format!("(-1,-1) anchor deviates by {dev}"));
    // quadrature against termwise weights over the parameter box
    let mut qerr = 0.0f64;
    for a in [alpha, w(-3.0, -3.0), w(-0.1, -0.1), w(-3.0, -0.1), w(-0.5, -0.5)] {
        for f in series.iter().take(5) {
            let rule = QuadratureRule::for_degree(a, f.degrees())?;
            let q = integral_norm_quadrature(f, &a, &rule)?;
            let e = integral_norm_exact(f, &a)?;
            qerr = qerr.max((q - e).abs() / e);
        }
    }
    out.metric("quadrature_max_rel_err", qerr);
    out.tolerance("quadrature_rel", 1e-8);
    out.require(qerr < 1e-8, || format!("quadrature disagrees by {qerr}"));
    // zero first component: the Hardy factor replaces the radial integral
    let mixed = w(0.0, alpha.alpha2.min(-0.5));
    let (mlo, mhi) = equivalence_constants(&mixed, deg)?;
    let mut mdev = 0.0f64;
    for f in &series {
        let r = integral_norm_exact_sq(f, &mixed)? / norm_sq(f, &mixed);
        if r < mlo * (1.0 - 1e-12) || r > mhi * (1.0 + 1e-12) {
            mdev = mdev.max((r - mlo.max(r.min(mhi))).abs());
        }
    }
    out.metric("mixed_bracket_violation", mdev);
    out.require(mdev == 0.0, || format!("zero-component bracket violated by {mdev}"));
    Ok(())
}

/// Fixed bounded test multiplier `1 + z/2 + w/3 + zw/4`; its sup over the
/// closed bidisc is attained at `(1, 1)`.
fn bounded_poly() -> TruncatedSeries {
    let v = [[1.0, 1.0 / 3.0], [0.5, 0.25]];
    TruncatedSeries::from_fn(1, 1, |k, l| c(v[k][l]))
}

fn section_norms(h_at: impl Fn(usize) -> TruncatedSeries, alpha: &WeightVector, beta: &WeightVector, degs: &[usize]) -> Result<Vec<f64>> {
    degs.iter()
        .map(|&d| {
            let op = finite_section(&h_at(d), alpha, beta, (d, d));
            operator_norm(&op, 1e-10, 200_000).map(|e| e.value)
        })
        .collect()
}

fn parse_degs(p: &mut Params, default: &str) -> Result<Vec<usize>> {
    let raw = p.get(
        "section_degrees",
        default.to_string(),
        |s| Ok(s.to_string()),
        |s| s.clone(),
    )?;
    let degs: Vec<usize> = raw
        .split(',')
        .map(|t| t.trim().parse().map_err(|_| Error::Config(format!("invalid degree list `{raw}`"))))
        .collect::<Result<_>>()?;
    if degs.len() < 2 || degs.windows(2).any(|x| x[1] <= x[0]) {
        return Err(Error::Config("section_degrees must be increasing with at least two entries".into()));
    }
    Ok(degs)
}

fn multipliers_below_zero_iff(p: &mut Params, ctx: &CheckContext, out: &mut Outcome) -> Result<()> {
    let alpha = p.weight("alpha", w(-1.0, -1.0))?;
    let beta = p.weight("beta", w(-2.0, -2.0))?;
    let degs = parse_degs(p, "4,8,16,32")?;
    if !(w(0.0, 0.0).succ(&alpha) && alpha.succeq(&beta)) {
        return Err(Error::Config("multipliers_below_zero_iff needs (0,0) > alpha >= beta".into()));
    }
    let poly = bounded_poly();
    let pn = section_norms(|_| poly.clone(), &alpha, &beta, &degs)?;
    let on = section_norms(|d| NamedFamily::AllOnes.generate(d, d), &alpha, &beta, &degs)?;
    for (i, d) in degs.iter().enumerate() {
        out.metric(format!("poly_section_norm_{d}"), pn[i]);
        out.metric(format!("ones_section_norm_{d}"), on[i]);
    }
    let n = degs.len();
    let poly_growth = pn[n - 1] / pn[n - 2];
    let ones_growth = on[n - 1] / on[0];
    out.metric("poly_growth", poly_growth);
    out.metric("ones_growth", ones_growth);
    out.tolerance("poly_growth_max", 1.02);
    out.tolerance("ones_growth_min", 2.0);
    out.require(poly_growth <= 1.02, || format!("bounded multiplier sections still growing: {poly_growth}"));
    out.require(on.windows(2).all(|x| x[1] > x[0]) && ones_growth >= 2.0, || {
        format!("all-ones sections not growing: {on:?}")
    });
    // envelope |h| (1−|z|²)^{(α₁−β₁)/2} (1−|w|²)^{(α₂−β₂)/2}
    let radii = [0.5, 0.9, 0.99, 0.999];
    let angles = [0.0, std::f64::consts::FRAC_PI_2, std::f64::consts::PI];
    let env_poly = boundary_envelope(&poly, &alpha, &beta, &radii, &angles)?;
    let g = ctx.grid_degree.max(64);
    let ones = NamedFamily::AllOnes.generate(g, g);
    let env_ones = boundary_envelope(&ones, &alpha, &beta, &radii, &angles)?;
    let diag = |e: &crate::multiplier::EnvelopeReport, r: f64| {
        e.profile.iter().find(|row| row.r1 == r && row.r2 == r).map_or(0.0, |row| row.sup)
    };
    let blowup = diag(&env_ones, 0.999) / diag(&env_ones, 0.9);
    out.metric("poly_envelope_sup", env_poly.sup_ratio);
    out.metric("poly_envelope_inf", env_poly.inf_ratio);
    out.metric("ones_envelope_blowup", blowup);
    out.require(env_poly.sup_ratio <= 25.0 / 12.0 * (1.0 + 1e-12), || {
        format!("polynomial envelope exceeds its sup: {}", env_poly.sup_ratio)
    });
    out.require(blowup > 3.0, || format!("all-ones envelope does not blow up: {blowup}"));
    Ok(())
}

fn m_equals_hinf(p: &mut Params, _ctx: &CheckContext, out: &mut Outcome) -> Result<()> {
    let alpha = p.weight("alpha", w(-1.0, -1.0))?;
    let degs = parse_degs(p, "4,8,16,32")?;
    let poly = bounded_poly();
    let sup = hinf_norm_estimate(&poly, 1.0 - 1e-12, 64)?;
    out.metric("poly_sup", sup);
    let pn = section_norms(|_| poly.clone(), &alpha, &alpha, &degs)?;
    let rn = section_norms(|d| NamedFamily::Rational.generate(d, d), &alpha, &alpha, &degs)?;
    for (i, d) in degs.iter().enumerate() {
        out.metric(format!("poly_section_norm_{d}"), pn[i]);
        out.metric(format!("rational_section_norm_{d}"), rn[i]);
    }
    let worst = pn.iter().copied().fold(0.0, f64::max) / sup;
    out.metric("poly_section_over_sup", worst);
    out.tolerance("section_over_sup", 1.0 + 1e-9);
    if alpha == w(-1.0, -1.0) {
        // the integral norm is the coefficient norm, so ‖T_h‖ ≤ sup |h| exactly
        out.require(worst <= 1.0 + 1e-9, || format!("section norm above sup|h|: {worst}"));
    }
    let n = degs.len();
    let rational_growth = rn[n - 1] / rn[0];
    out.metric("rational_growth", rational_growth);
    out.tolerance("rational_growth_min", 1.5);
    out.require(rn.windows(2).all(|x| x[1] > x[0]) && rational_growth >= 1.5, || {
        format!("rational sections not growing: {rn:?}")
    });
    // Toeplitz sections creep up to sup |h| from below
    let gap = 1.0 - pn[n - 1] / sup;
    out.metric("poly_sup_gap", gap);
    out.tolerance("poly_sup_gap", 0.05);
    out.require(pn.windows(2).all(|x| x[1] >= x[0] * (1.0 - 1e-9)) && gap < 0.05, || {
        format!("polynomial sections do not approach sup|h| = {sup}: {pn:?}")
    });
    Ok(())
}

fn m_equals_dbeta(p: &mut Params, ctx: &CheckContext, out: &mut Outcome) -> Result<()> {
    let alpha = p.weight("alpha", w(2.0, 2.0))?;
    let beta = p.weight("beta", w(1.5, 1.5))?;
    let deg = p.degree("deg", (16, 16))?;
    let samples = p.usize("samples", 20)?;
    if !(alpha.succ(&w(1.0, 1.0)) && alpha.succeq(&beta)) {
        return Err(Error::Config("M_equals_Dbeta needs alpha > (1,1) and beta <= alpha".into()));
    }
    let (c1, k1) = convolution_weight_scan_1d(2 * deg.0, alpha.alpha1, beta.alpha1);
    let (c2, k2) = convolution_weight_scan_1d(2 * deg.1, alpha.alpha2, beta.alpha2);
    let (c1_wide, k1_wide) = convolution_weight_scan_1d(2048, alpha.alpha1, beta.alpha1);
    out.metric("c_alpha1", c1);
    out.metric("c_alpha2", c2);
    out.metric("c_alpha1_argmax", k1 as f64);
    out.metric("c_alpha2_argmax", k2 as f64);
    out.metric("c_alpha1_scan_2048", c1_wide);
    out.metric("c_alpha1_scan_2048_argmax", k1_wide as f64);
    let mut rng = rng(ctx);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let f = random_series(&mut rng, deg);
        let g = random_series(&mut rng, deg);
        let lhs = norm_sq(&f.cauchy_product(&g), &beta);
        let rhs = c1 * c2 * norm_sq(&f, &alpha) * norm_sq(&g, &beta);
        worst = worst.max(lhs / rhs);
    }
    out.metric("max_ratio", worst);
    out.tolerance("ratio_slack", 1e-12);
    out.require(worst <= 1.0 + 1e-12, || format!("‖fg‖²_β exceeded C‖f‖²_α‖g‖²_β: {worst}"));
    out.require(c1_wide.is_finite() && (c1_wide - c1).abs() <= 1e-12 * c1 || k1_wide > 2 * deg.0, || {
        "convolution constant still increasing past the sampled range".to_string()
    });
    Ok(())
}

fn m_monotone(p: &mut Params, ctx: &CheckContext, out: &mut Outcome) -> Result<()> {
    let alpha = p.weight("alpha", w(2.0, 2.0))?;
    let beta = p.weight("beta", w(1.0, 1.0))?;
    if !alpha.succ(&beta) {
        return Err(Error::Config("M_monotone needs alpha > beta".into()));
    }
    // λ with β − λα ≺ 0 and λ < 1
    let need = |a: f64, b: f64| if a > 0.0 { b / a } else if b < 0.0 { 0.0 } else { f64::INFINITY };
    let lo = need(alpha.alpha1, beta.alpha1).max(need(alpha.alpha2, beta.alpha2)).max(0.0);
    if !(lo < 1.0) {
        return Err(Error::Config("no interpolation parameter with beta - lambda alpha < 0".into()));
    }
    let lambda = p.f64("lambda", 0.5 * (lo + 1.0))?;
    if !(lambda > lo && lambda < 1.0) {
        return Err(Error::Config(format!("lambda must lie in ({lo}, 1)")));
    }
    let gamma = beta.zip(&alpha, |b, a| (b - lambda * a) / (1.0 - lambda));
    out.metric("lambda", lambda);
    out.metric("gamma1", gamma.alpha1);
    out.metric("gamma2", gamma.alpha2);
    let deg = p.degree("deg", (6, 6))?;
    let samples = p.usize("samples", 5)?;
    let mut rng = rng(ctx);
    let mut min_slack = f64::INFINITY;
    for _ in 0..samples {
        let h = random_series(&mut rng, (3, 3));
        let r = interpolation_inequality_check(&h, (gamma, gamma), (alpha, alpha), lambda, deg, 1e-9)?;
        min_slack = min_slack.min(r.slack / r.rhs.max(1e-300));
    }
    out.metric("min_relative_slack", min_slack);
    out.tolerance("slack", -1e-9);
    out.require(gamma.alpha1 < 0.0 && gamma.alpha2 < 0.0, || "gamma is not below (0,0)".into());
    out.require(min_slack >= -1e-9, || format!("interpolation chain violated: slack {min_slack}"));
    Ok(())
}

/// `‖λ^β‖/‖λ^α‖` at `(z, w)` with truncations accurate to double precision.
fn lambda_ratio(alpha: &WeightVector, beta: &WeightVector, z: C64, wv: C64) -> Result<f64> {
    let deg = (
        functional_degree(alpha.alpha1.min(beta.alpha1), z.norm()),
        functional_degree(alpha.alpha2.min(beta.alpha2), wv.norm()),
    );
    Ok(eval_functional_norm(beta, z, wv, deg)?.value / eval_functional_norm(alpha, z, wv, deg)?.value)
}

fn lambda_ratio_1d(a: f64, b: f64, z: C64) -> Result<f64> {
    let deg = functional_degree(a.min(b), z.norm());
    Ok(eval_functional_norm_1d(b, z, deg)?.value / eval_functional_norm_1d(a, z, deg)?.value)
}

fn zero_multiplier(p: &mut Params, _ctx: &CheckContext, out: &mut Outcome) -> Result<()> {
    let alpha = p.weight("alpha", w(0.0, 0.0))?;
    let beta = p.weight("beta", w(1.0, 1.0))?;
    if !(beta.alpha1 > alpha.alpha1) {
        return Err(Error::Config("zero_multiplier needs beta1 > alpha1".into()));
    }
    let radii = [0.9, 0.99, 0.999];
    let mut ratios = Vec::new();
    let mut resid = 0.0f64;
    for &r in &radii {
        let z = c(r);
        let two = lambda_ratio(&alpha, &beta, z, z)?;
        let one = lambda_ratio_1d(alpha.alpha1, beta.alpha1, z)? * lambda_ratio_1d(alpha.alpha2, beta.alpha2, z)?;
        resid = resid.max((two - one).abs());
        out.metric(format!("lambda_ratio_{r}"), two);
        ratios.push(two);
    }
    out.metric("factorization_residual", resid);
    out.tolerance("factorization_residual", 1e-9);
    out.tolerance("ratio_at_0.999", 0.05);
    out.require(resid < 1e-9, || format!("1-D factorization residual {resid}"));
    if beta.alpha2 > alpha.alpha2 {
        out.require(ratios.windows(2).all(|x| x[1] < x[0]), || format!("ratio not decreasing: {ratios:?}"));
        out.require(ratios[2] < 0.05, || format!("ratio at 0.999 is {}", ratios[2]));
    }
    // |h(z,w)| ≤ ‖T_h‖·ratio: a unit section norm forces this envelope
    out.metric("implied_sup_unit_norm_0.999", ratios[2]);
    // second coordinate reversed: decay along z with w fixed
    let alt_beta = w(beta.alpha1, alpha.alpha2 - 1.0);
    let w0 = c(0.5);
    let mut alt = Vec::new();
    for &r in &radii {
        let v = lambda_ratio(&alpha, &alt_beta, c(r), w0)?;
        out.metric(format!("variant_lambda_ratio_{r}"), v);
        alt.push(v);
    }
    out.require(alt.windows(2).all(|x| x[1] < x[0]), || format!("variant ratio not decreasing: {alt:?}"));
    Ok(())
}

/// `w_0` samples on rings of the given radii.
fn ring_points(radii: &[f64], angles: usize) -> Vec<C64> {
    radii
        .iter()
        .flat_map(|&r| {
            (0..if r == 0.0 { 1 } else { angles })
                .map(move |j| C64::from_polar(r, std::f64::consts::TAU * j as f64 / angles as f64))
        })
        .collect()
}

fn slices_membership(p: &mut Params, ctx: &CheckContext, out: &mut Outcome) -> Result<()> {
    let alpha = p.weight("alpha", w(0.5, -1.0))?;
    let deg = p.degree("deg", (32, 32))?;
    let samples = p.usize("samples", 50)?;
    let pts = ring_points(&[0.0, 0.25, 0.5, 0.75, 0.9, 0.95], 8);
    let mut rng = rng(ctx);
    let (mut worst, mut cmax) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let f = random_series(&mut rng, deg);
        let full = norm_sq(&f, &alpha);
        for &w0 in &pts {
            let r = w0.norm();
            let lhs = norm_sq_1d(&f.slice_w(w0)?, alpha.alpha1);
            // C_{w0} collects the indices where |w0|^l exceeds (l+1)^{α₂}
            let cw: f64 = f
                .iter()
                .map(|(k, l, a)| {
                    let excess = (r.powi(l as i32) - weight_1d(l, alpha.alpha2)).max(0.0);
                    a.norm_sqr() * weight_1d(k, alpha.alpha1) * excess
                })
                .sum();
            cmax = cmax.max(cw);
            worst = worst.max(lhs * (1.0 - r) / (cw + full));
        }
    }
    out.metric("max_ratio", worst);
    out.metric("max_c_w0", cmax);
    out.tolerance("ratio_slack", 1e-12);
    out.require(worst <= 1.0 + 1e-12, || format!("slice inequality violated: ratio {worst}"));
    Ok(())
}

/// Slice-norm bound for the non-factoring family over `|w0| ≤ r`:
/// `|a_{k,l}|² (k+1)^{α₁}` summed through `b_k ≤ (k+1)^{−1−α₁/2} G_r`.
fn non_factoring_slice_bound(alpha: &WeightVector, r: f64) -> f64 {
    let mut g = 0.0;
    let mut l = 0usize;
    loop {
        let t = weight_1d(l, 0.5 * (1.0 - alpha.alpha2)) * r.powi(l as i32);
        g += t;
        if t < 1e-18 * g || l > 1_000_000 {
            break;
        }
        l += 1;
    }
    g * g * ZETA2
}

/// Diagonal witness, full box sum and a convergent companion for the
/// non-factoring family; shared with the multiplier converse check.
fn non_factoring_trends(alpha: &WeightVector, ctx: &CheckContext, out: &mut Outcome) -> Result<()> {
    let family = NamedFamily::NonFactoring { alpha: *alpha };
    let sizes = dyadic_sizes_up_to(ctx.max_degree);
    // |a_{k,l}|² (k+1)^{α₁}(l+1)^{α₂} = (k+1)(l+1)/((k+1)³+(l+1)³)
    let term = |k: usize, l: usize| {
        let (x, y) = ((k + 1) as f64, (l + 1) as f64);
        x * y / (x * x * x + y * y * y)
    };
    out.metric("family_consistency", family_consistency(&family, |k, l| {
        term(k, l) * weight_1d(k, -alpha.alpha1) * weight_1d(l, -alpha.alpha2)
    }));
    let diag = partial_sums_1d(&sizes, |k| family.coefficient(k, k).norm_sqr() * weight_1d(k, alpha.alpha1) * weight_1d(k, alpha.alpha2));
    out.trend("diagonal_witness", &diag, is_log(0.5, 0.1), "log_divergent with constant 1/2")?;
    let full = box_partial_sums(&sizes, term);
    out.trend("full_norm_sq", &full, is_divergent, "divergent")?;
    let dominated = full.iter().zip(&diag).all(|(f, d)| f.1 >= d.1);
    out.require(dominated, || "full partial sums fall below the diagonal witness".into());
    // weights lowered by (1,1): Σ 1/((k+1)³+(l+1)³) converges
    let companion = box_partial_sums(&sizes, |k, l| term(k, l) / ((k + 1) * (l + 1)) as f64);
    out.trend("companion_norm_sq", &companion, is_convergent, "convergent")?;
    out.tolerance("fit_constant_rel", 0.1);
    Ok(())
}

/// Max over `w0 ∈ [0, r_max]` of the slice norm at two truncations.
fn non_factoring_slices(alpha: &WeightVector, g: usize, r_max: f64, out: &mut Outcome) -> Result<TruncatedSeries> {
    let family = NamedFamily::NonFactoring { alpha: *alpha };
    let grid = family.generate(g, g);
    let half = grid.resized(g / 2, g / 2);
    let (mut max_full, mut max_change) = (0.0f64, 0.0f64);
    for i in 0..=10 {
        let w0 = c(r_max * i as f64 / 10.0);
        let s = norm_sq_1d(&grid.slice_w(w0)?, alpha.alpha1);
        let s_half = norm_sq_1d(&half.slice_w(w0)?, alpha.alpha1);
        max_full = max_full.max(s);
        max_change = max_change.max((s - s_half) / s);
    }
    let bound = non_factoring_slice_bound(alpha, r_max);
    out.metric("max_slice_norm_sq", max_full);
    out.metric("slice_bound", bound);
    out.metric("slice_truncation_change", max_change);
    out.tolerance("slice_truncation_change", 0.05);
    out.require(max_full <= bound, || format!("slice norm {max_full} above bound {bound}"));
    out.require(max_change < 0.05, || format!("slice norms not settled: change {max_change}"));
    Ok(grid)
}

fn non_factoring(p: &mut Params, ctx: &CheckContext, out: &mut Outcome) -> Result<()> {
    let alpha = p.weight("alpha", w(0.0, 0.0))?;
    non_factoring_trends(&alpha, ctx, out)?;
    non_factoring_slices(&alpha, ctx.grid_degree, 0.9, out)?;
    Ok(())
}

fn unbounded_slice_norms(p: &mut Params, ctx: &CheckContext, out: &mut Outcome) -> Result<()> {
    let alpha = p.weight("alpha", w(-2.0, -2.0))?;
    let jmax = p.usize("j_max", 10)?;
    let family = NamedFamily::AllOnes;
    let kdeg = ctx.grid_degree;
    let mut scaled = Vec::new();
    let mut norms = Vec::new();
    for j in 1..=jmax.max(2) {
        let w0 = 1.0 - 0.5f64.powi(j as i32);
        let ldeg = 40usize << j;
        let b: Vec<C64> = (0..=kdeg)
            .into_par_iter()
            .map(|k| {
                let mut acc = C64::new(0.0, 0.0);
                let mut pw = 1.0;
                for l in 0..=ldeg {
                    acc += family.coefficient(k, l) * pw;
                    pw *= w0;
                }
                acc
            })
            .collect();
        let s: f64 = b.iter().enumerate().map(|(k, v)| v.norm_sqr() * weight_1d(k, alpha.alpha1)).sum();
        norms.push(s);
        scaled.push(s * (1.0 - w0).powi(2));
        out.metric(format!("slice_norm_sq_j{j}"), s);
    }
    let mean = scaled.iter().sum::<f64>() / scaled.len() as f64;
    let spread = (scaled.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - scaled.iter().copied().fold(f64::INFINITY, f64::min))
        / mean;
    let expected: f64 = (0..=kdeg).map(|k| weight_1d(k, alpha.alpha1)).sum();
    out.metric("scaled_constant", mean);
    out.metric("scaled_spread", spread);
    out.metric("expected_constant", expected);
    out.metric("growth", norms.last().unwrap() / norms[0]);
    out.tolerance("scaled_spread", 1e-6);
    out.require(spread < 1e-6, || format!("‖f_w‖²|1−w|² not constant: spread {spread}"));
    out.require(within(mean, expected, 1e-9), || format!("constant {mean} vs {expected}"));
    out.require(norms.windows(2).all(|x| x[1] > x[0]), || "slice norms not increasing".into());
    Ok(())
}

fn bounded_slices_insufficient(p: &mut Params, ctx: &CheckContext, out: &mut Outcome) -> Result<()> {
    let alpha = p.weight("alpha", w(0.0, 2.0))?;
    if !(alpha.alpha2 > 1.0) {
        return Err(Error::Config("bounded_slices_insufficient needs alpha2 > 1".into()));
    }
    let family = NamedFamily::LacunaryBounded { alpha };
    family.validate()?;
    let kdeg = ctx.grid_degree;
    let jmax = 20u32;
    // coefficient columns live on l = 2^j only
    let cols: Vec<usize> = (0..=jmax).map(|j| 1usize << j).collect();
    let pts = ring_points(&[0.5, 0.9, 0.99, 0.999], 16);
    let mut max_slice = 0.0f64;
    for &w0 in &pts {
        let pows: Vec<C64> = cols.iter().map(|&l| w0.powu(l as u32)).collect();
        let s: f64 = (0..=kdeg)
            .map(|k| {
                let b: C64 = cols.iter().zip(&pows).map(|(&l, pw)| family.coefficient(k, l) * pw).sum();
                b.norm_sqr() * weight_1d(k, alpha.alpha1)
            })
            .sum();
        max_slice = max_slice.max(s);
    }
    out.metric("max_slice_norm_sq", max_slice);
    out.metric("slice_bound", ZETA2);
    out.require(max_slice <= ZETA2, || format!("slice norm {max_slice} above ζ(2)"));
    let sizes = dyadic_sizes_up_to(ctx.max_degree);
    let nmax = *sizes.last().unwrap();
    let u: Vec<f64> = (0..=nmax).map(|k| weight_1d(k, alpha.alpha1)).collect();
    let v = |shift: f64| -> Vec<f64> {
        (0..=nmax)
            .map(|l| match lacunary_exponent(l) {
                Some(_) => family.coefficient(0, l).norm_sqr() * weight_1d(l, alpha.alpha2 - shift),
                None => 0.0,
            })
            .collect()
    };
    let (v0, v1) = (v(0.0), v(1.0));
    // |a_{k,l}|² = |a_{0,l}|² (k+1)^{−α₁−2}
    let full = box_partial_sums(&sizes, |k, l| if v0[l] == 0.0 { 0.0 } else { v0[l] * u[k] * weight_1d(k, -alpha.alpha1 - 2.0) });
    out.trend("full_norm_sq", &full, is_divergent, "divergent")?;
    let companion = box_partial_sums(&sizes, |k, l| if v1[l] == 0.0 { 0.0 } else { v1[l] * u[k] * weight_1d(k, -alpha.alpha1 - 2.0) });
    out.trend("companion_norm_sq", &companion, is_convergent, "convergent")?;
    Ok(())
}

fn bounded_slices_sufficient(p: &mut Params, ctx: &CheckContext, out: &mut Outcome) -> Result<()> {
    let alpha = p.weight("alpha", w(-1.0, -1.0))?;
    let deg = p.degree("deg", (16, 16))?;
    let samples = p.usize("samples", 20)?;
    if !(alpha.alpha1 <= 0.0 && alpha.alpha2 < 0.0) {
        return Err(Error::Config("bounded_slices_sufficient needs alpha1 <= 0 and alpha2 < 0".into()));
    }
    let c1: Vec<f64> = if alpha.alpha1 == 0.0 {
        vec![1.0; deg.0 + 1]
    } else {
        BetaWeightTable::new(alpha.alpha1, deg.0)?.values.iter().map(|v| 2.0 * v).collect()
    };
    // μ(U) = ∫₀¹ (1−t)^{−1−α₂} dt
    let mu = 1.0 / -alpha.alpha2;
    let slice_int = |f: &TruncatedSeries, w0: C64| -> f64 {
        let s = f.slice_w_unchecked(w0);
        s.coeffs().iter().zip(&c1).map(|(b, ck)| b.norm_sqr() * ck).sum()
    };
    let gj = GaussJacobi::new(deg.1 / 2 + 2, -1.0 - alpha.alpha2)?;
    let nang = 2 * deg.1 + 1;
    let edge = 4 * (deg.1 + 1);
    let mut rng = rng(ctx);
    let (mut worst, mut fubini) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let f = random_series(&mut rng, deg);
        let full = integral_norm_exact_sq(&f, &alpha)?;
        // slice integral norms are subharmonic in w0, so the sup sits on |w0| = 1
        let m = (0..edge)
            .map(|j| slice_int(&f, C64::from_polar(1.0, std::f64::consts::TAU * j as f64 / edge as f64)))
            .fold(0.0, f64::max);
        worst = worst.max(full / (m * mu));
        let iterated: f64 = gj
            .nodes
            .iter()
            .zip(&gj.weights)
            .map(|(&t, &wt)| {
                let mean = (0..nang)
                    .map(|j| slice_int(&f, C64::from_polar(t.sqrt(), std::f64::consts::TAU * j as f64 / nang as f64)))
                    .sum::<f64>()
                    / nang as f64;
                wt * mean
            })
            .sum();
        fubini = fubini.max((iterated - full).abs() / full);
    }
    out.metric("max_ratio", worst);
    out.metric("fubini_residual", fubini);
    out.metric("mu_U", mu);
    out.tolerance("ratio_slack", 1e-12);
    out.tolerance("fubini_residual", 1e-10);
    out.require(worst <= 1.0 + 1e-12, || format!("full norm exceeds sup slice norm · μ(U): {worst}"));
    out.require(fubini < 1e-10, || format!("iterated integral mismatch {fubini}"));
    Ok(())
}

fn product_membership(p: &mut Params, ctx: &CheckContext, out: &mut Outcome) -> Result<()> {
    let alpha = p.weight("alpha", w(1.0, -1.0))?;
    let deg = p.usize("deg", 64)?;
    let samples = p.usize("samples", 20)?;
    let mut rng = rng(ctx);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let f1 = random_univariate(&mut rng, deg);
        let f2 = random_univariate(&mut rng, deg / 2 + 1);
        let t = tensor_product(&f1, &f2);
        let lhs = norm_sq(&t, &alpha);
        let rhs = norm_sq_1d(&f1, alpha.alpha1) * norm_sq_1d(&f2, alpha.alpha2);
        worst = worst.max((lhs - rhs).abs() / rhs);
    }
    out.metric("factorization_residual", worst);
    out.tolerance("factorization_residual", 1e-12);
    out.require(worst < 1e-12, || format!("norm factorization residual {worst}"));
    Ok(())
}

fn multiplier_slices(p: &mut Params, ctx: &CheckContext, out: &mut Outcome) -> Result<()> {
    let alpha = p.weight("alpha", w(1.0, 0.0))?;
    let beta = p.weight("beta", w(0.0, -1.0))?;
    let deg = p.degree("deg", (12, 40))?;
    let samples = p.usize("samples", 3)?;
    let pts = ring_points(&[0.0, 0.25, 0.5], 4);
    let mut rng = rng(ctx);
    let mut worst = 0.0f64;
    let a1 = w(alpha.alpha1, 0.0);
    let b1 = w(beta.alpha1, 0.0);
    for _ in 0..samples {
        let h = random_series(&mut rng, (3, 3));
        let t2 = operator_norm(&finite_section(&h, &alpha, &beta, deg), 1e-12, 200_000)?.value;
        for &w0 in &pts {
            let slice = h.slice_w(w0)?.as_z_series();
            let t1 = operator_norm(&finite_section(&slice, &a1, &b1, (deg.0, 0)), 1e-12, 200_000)?.value;
            let ratio = lambda_ratio_1d(alpha.alpha2, beta.alpha2, w0)?;
            worst = worst.max(t1 / (t2 * ratio));
        }
    }
    out.metric("max_ratio", worst);
    out.tolerance("ratio_slack", 1e-9);
    out.require(worst <= 1.0 + 1e-9, || format!("slice multiplier norm above 2-D bound: {worst}"));
    Ok(())
}

fn multiplier_slices_converse_fails(p: &mut Params, ctx: &CheckContext, out: &mut Outcome) -> Result<()> {
    let gamma = p.weight("gamma", w(2.0, 2.0))?;
    let alpha = p.weight("alpha", w(0.0, 0.0))?;
    let samples = p.usize("samples", 10)?;
    if !(gamma.succ(&w(1.0, 1.0)) && gamma.succeq(&alpha)) {
        return Err(Error::Config("converse check needs gamma > (1,1) and alpha <= gamma".into()));
    }
    non_factoring_trends(&alpha, ctx, out)?;
    let g = ctx.grid_degree;
    let grid = non_factoring_slices(&alpha, g, 0.9, out)?;
    let gdeg = 32;
    let (cconv, _) = convolution_weight_scan_1d(g + gdeg, gamma.alpha1, alpha.alpha1);
    out.metric("conv_constant", cconv);
    let mut rng = rng(ctx);
    let mut worst = 0.0f64;
    for w0 in [0.0, 0.5, 0.9] {
        let h = grid.slice_w(c(w0))?;
        let hz = h.as_z_series();
        let hn = norm_sq_1d(&h, alpha.alpha1);
        for _ in 0..samples {
            let gs = random_univariate(&mut rng, gdeg);
            let prod = hz.cauchy_product(&gs.as_z_series());
            let lhs = norm_sq(&prod, &w(alpha.alpha1, 0.0));
            let rhs = cconv * hn * norm_sq_1d(&gs, gamma.alpha1);
            worst = worst.max(lhs / rhs);
        }
    }
    out.metric("slice_multiplier_ratio", worst);
    out.tolerance("ratio_slack", 1e-12);
    out.require(worst <= 1.0 + 1e-12, || format!("slice multiplier bound violated: {worst}"));
    Ok(())
}

fn rational_example(_p: &mut Params, ctx: &CheckContext, out: &mut Outcome) -> Result<()> {
    let family = NamedFamily::Rational;
    let g = ctx.grid_degree;
    let grid = family.generate(g, g);
    // slices against −(2−w0)^{−(k+1)} on the first half of the grid
    let (mut coef_err, mut slice_change) = (0.0f64, 0.0f64);
    for w0 in [c(0.0), c(0.5), c(-0.5), C64::new(0.0, 0.5), c(0.9)] {
        let s = grid.slice_w(w0)?;
        for k in 0..=g / 2 {
            let want = -(C64::new(2.0, 0.0) - w0).powi(-(k as i32 + 1));
            coef_err = coef_err.max((s.coeff(k) - want).norm());
        }
        let half = grid.resized(g / 2, g).slice_w(w0)?;
        for a1 in [-2.0, 0.0, 2.0, 5.0] {
            let full = norm_sq_1d(&s, a1);
            let part = norm_sq_1d(&half, a1);
            out.metric(format!("slice_norm_sq_w{w0}_a{a1}"), full);
            slice_change = slice_change.max((full - part).abs() / full);
        }
    }
    out.metric("slice_norm_change", slice_change);
    out.tolerance("slice_norm_change", 1e-10);
    out.require(slice_change < 1e-10, || format!("slice norms not settled: change {slice_change}"));
    out.metric("slice_coefficient_error", coef_err);
    out.tolerance("slice_coefficient_error", 1e-10);
    out.require(coef_err < 1e-10, || format!("slice coefficients off by {coef_err}"));

    let sizes = dyadic_sizes_up_to(ctx.max_degree);
    let nmax = *sizes.last().unwrap();
    let lf = ln_factorial_table(nmax);
    let ln2 = std::f64::consts::LN_2;
    // per total degree n: Σ|a|², (Σ|a|)²/(n+1), and Σ|a|²/((k+1)(n−k+1))
    let per_n: Vec<[f64; 3]> = (0..=nmax)
        .into_par_iter()
        .map(|n| {
            let (mut sq, mut abs, mut low) = (0.0, 0.0, 0.0);
            for k in 0..=n {
                let m = (lf[n] - lf[k] - lf[n - k] - (n as f64 + 1.0) * ln2).exp();
                sq += m * m;
                abs += m;
                low += m * m / ((k + 1) * (n - k + 1)) as f64;
            }
            [sq, abs * abs / (n as f64 + 1.0), low]
        })
        .collect();
    let full = partial_sums_1d(&sizes, |n| per_n[n][0]);
    let witness = partial_sums_1d(&sizes, |n| per_n[n][1]);
    let companion = partial_sums_1d(&sizes, |n| per_n[n][2]);
    out.trend("witness", &witness, is_log(0.25, 0.1), "log_divergent with constant 1/4")?;
    out.trend("full_norm_sq", &full, is_divergent, "divergent")?;
    out.trend("companion_norm_sq", &companion, is_convergent, "convergent")?;
    out.require(full.iter().zip(&witness).all(|(f, w)| f.1 >= w.1 * (1.0 - 1e-12)), || {
        "full partial sums fall below the witness".into()
    });
    out.tolerance("fit_constant_rel", 0.1);

    let hd = g.min(512);
    let h = family.generate(hd, hd);
    let lo = hinf_norm_estimate(&h, 0.9, 256)?;
    let hi = hinf_norm_estimate(&h, 0.99, 256)?;
    out.metric("hinf_0.9", lo);
    out.metric("hinf_0.99", hi);
    out.metric("hinf_growth", hi / lo);
    out.tolerance("hinf_growth_min", 5.0);
    out.require(hi / lo > 5.0 || hd < 512, || format!("sup growth only {}", hi / lo));
    Ok(())
}
