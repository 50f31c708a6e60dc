//! Bayesian logistic regression for the XCI, no-XCI and null models.
//!
//! Posteriors are sampled with Polya-Gamma data augmentation. Ratios of
//! normalizing constants come from the iterative bridge-sampling estimator:
//! `BF12` bridges the two model posteriors directly, and each marginal
//! likelihood is obtained by bridging a posterior to an independent-component
//! Gaussian fitted to its draws, whose constant is known.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear::{log_bf_an, DesignMatrix, SymMat};
use crate::numeric::{log1p_exp, log_add_exp, log_sum_exp, norm_cdf};
use crate::rng::{Purpose, StreamId};

const TRUNC: f64 = 0.64;

/// Bridge iteration stops when successive log estimates differ by less than this.
pub const BRIDGE_TOL: f64 = 1e-8;
pub const BRIDGE_MAX_ITER: usize = 1000;

fn ln_norm_cdf(x: f64) -> f64 {
    if x > -30.0 {
        norm_cdf(x).ln()
    } else {
        let x2 = x * x;
        -0.5 * x2 - (-x).ln() - 0.5 * (2.0 * PI).ln() + (1.0 - 1.0 / x2 + 3.0 / (x2 * x2)).ln()
    }
}

/// Coefficient of the alternating series for the Jacobi density.
fn series_coef(n: u32, x: f64) -> f64 {
    let k = (f64::from(n) + 0.5) * PI;
    if x > TRUNC {
        k * (-0.5 * k * k * x).exp()
    } else if x > 0.0 {
        let h = f64::from(n) + 0.5;
        (-1.5 * ((0.5 * PI).ln() + x.ln()) + k.ln() - 2.0 * h * h / x).exp()
    } else {
        0.0
    }
}

/// Probability of proposing from the exponential tail piece.
fn mass_texpon(z: f64) -> f64 {
    let fz = 0.125 * PI * PI + 0.5 * z * z;
    let rt = (1.0 / TRUNC).sqrt();
    let b = rt * (TRUNC * z - 1.0);
    let a = -rt * (TRUNC * z + 1.0);
    let x0 = fz.ln() + fz * TRUNC;
    let xb = x0 - z + ln_norm_cdf(b);
    let xa = x0 + z + ln_norm_cdf(a);
    let q_over_p = 4.0 / PI * (xb.exp() + xa.exp());
    1.0 / (1.0 + q_over_p)
}

/// Inverse-Gaussian(1/z, 1) truncated to `(0, TRUNC)`.
fn truncated_inverse_gaussian<R: Rng + ?Sized>(z: f64, rng: &mut R) -> f64 {
    if z < 1.0 / TRUNC {
        loop {
            let (mut e1, mut e2): (f64, f64) = (Exp1.sample(rng), Exp1.sample(rng));
            while e1 * e1 > 2.0 * e2 / TRUNC {
                e1 = Exp1.sample(rng);
                e2 = Exp1.sample(rng);
            }
            let d = 1.0 + e1 * TRUNC;
            let x = TRUNC / (d * d);
            let alpha = (-0.5 * z * z * x).exp();
            if rng.random::<f64>() <= alpha {
                return x;
            }
        }
    } else {
        let mu = 1.0 / z;
        loop {
            let n: f64 = StandardNormal.sample(rng);
            let mu_y = mu * n * n;
            let half_mu = 0.5 * mu;
            let mut x = mu + half_mu * mu_y - half_mu * (4.0 * mu_y + mu_y * mu_y).sqrt();
            if rng.random::<f64>() > mu / (mu + x) {
                x = mu * mu / x;
            }
            if x < TRUNC {
                return x;
            }
        }
    }
}

/// One exact draw from PG(1, c) by Devroye's alternating-series
/// accept/reject method.
pub fn sample_polya_gamma<R: Rng + ?Sized>(c: f64, rng: &mut R) -> f64 {
    let z = 0.5 * c.abs();
    let fz = 0.125 * PI * PI + 0.5 * z * z;
    loop {
        let x = if rng.random::<f64>() < mass_texpon(z) {
            let e: f64 = Exp1.sample(rng);
            TRUNC + e / fz
        } else {
            truncated_inverse_gaussian(z, rng)
        };
        let mut s = series_coef(0, x);
        let y = rng.random::<f64>() * s;
        let mut n = 0u32;
        loop {
            n += 1;
            if n % 2 == 1 {
                s -= series_coef(n, x);
                if y <= s {
                    return 0.25 * x;
                }
            } else {
                s += series_coef(n, x);
                if y > s {
                    break;
                }
            }
        }
    }
}

/// `E[PG(1, c)] = tanh(c/2) / (2c)`, `1/4` at zero.
pub fn polya_gamma_mean(c: f64) -> f64 {
    if c.abs() < 1e-8 {
        0.25
    } else {
        (0.5 * c).tanh() / (2.0 * c)
    }
}

/// Unnormalized log density on a parameter space of dimension 1 or 2.
pub trait LogDensity {
    fn dim(&self) -> usize;
    fn ln_density(&self, theta: &[f64]) -> f64;
}

/// Row-major matrix of parameter draws.
#[derive(Debug, Clone, PartialEq)]
pub struct Draws {
    dim: usize,
    values: Vec<f64>,
}

impl Draws {
    pub fn new(dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 || values.len() % dim != 0 {
            return Err(Error::InvalidParameter(format!(
                "{} values do not form rows of width {dim}",
                values.len()
            )));
        }
        Ok(Draws { dim, values })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.values[j * self.dim..(j + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.dim)
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        self.rows().map(|r| r[k]).collect()
    }

    /// Per-coordinate sample means and unbiased variances.
    pub fn mean_var(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.len() as f64;
        let mut mean = vec![0.0; self.dim];
        for r in self.rows() {
            for (m, v) in mean.iter_mut().zip(r) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; self.dim];
        for r in self.rows() {
            for ((s, v), m) in var.iter_mut().zip(r).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        var.iter_mut().for_each(|s| *s /= n - 1.0);
        (mean, var)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelTag {
    M1,
    M2,
    Null,
}

/// Post-burn-in Gibbs draws of `(α, β)` (or `α` alone for the null model).
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSamples {
    pub draws: Draws,
    pub burn_in: usize,
    pub stream: StreamId,
    pub model: ModelTag,
}

impl PosteriorSamples {
    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    /// Slope draws; empty for the null model.
    pub fn beta(&self) -> Vec<f64> {
        if self.draws.dim() < 2 {
            Vec::new()
        } else {
            self.draws.column(1)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McmcConfig {
    pub samples: usize,
    pub burn_in: usize,
}

impl Default for McmcConfig {
    fn default() -> Self {
        McmcConfig {
            samples: 1000,
            burn_in: 500,
        }
    }
}

/// Gaussian prior `N(mean, precision⁻¹)` on the regression coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticPrior {
    pub mean: [f64; 2],
    pub precision: SymMat,
}

impl LogisticPrior {
    /// g-prior precision `(λ/n) X'X`; for the intercept-only design this is `λ`.
    pub fn g_prior(x: &DesignMatrix, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        let precision = x.gram().scale(lambda / x.n_rows() as f64);
        if !precision.is_positive_definite() {
            return Err(Error::SingularDesign);
        }
        Ok(LogisticPrior {
            mean: [0.0, 0.0],
            precision,
        })
    }

    pub fn ln_density(&self, theta: &[f64]) -> f64 {
        let d = self.precision.dim();
        let diff = match d {
            1 => [theta[0] - self.mean[0], 0.0],
            _ => [theta[0] - self.mean[0], theta[1] - self.mean[1]],
        };
        -0.5 * d as f64 * (2.0 * PI).ln() + 0.5 * self.precision.det().ln()
            - 0.5 * self.precision.quad_form(&diff)
    }
}

/// Individuals grouped by `(genotype code, outcome)`. Codes take at most five
/// values, so likelihood evaluations cost O(#groups) instead of O(n).
#[derive(Debug, Clone, PartialEq)]
struct Groups {
    /// `(g, cases, controls)`
    rows: Vec<(f64, u32, u32)>,
}

impl Groups {
    fn new(x: &DesignMatrix, y: &[f64]) -> Self {
        let mut rows: Vec<(f64, u32, u32)> = Vec::new();
        for (i, &yi) in y.iter().enumerate() {
            let g = x.genotype().map_or(0.0, |g| g[i]);
            let pos = match rows.iter().position(|r| r.0.to_bits() == g.to_bits()) {
                Some(p) => p,
                None => {
                    rows.push((g, 0, 0));
                    rows.len() - 1
                }
            };
            if yi == 1.0 {
                rows[pos].1 += 1;
            } else {
                rows[pos].2 += 1;
            }
        }
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        Groups { rows }
    }
}

fn validate_binary(y: &[f64]) -> Result<()> {
    let mut cases = 0usize;
    for &v in y {
        if v == 1.0 {
            cases += 1;
        } else if v != 0.0 {
            return Err(Error::NonBinaryOutcome(v));
        }
    }
    if cases == 0 || cases == y.len() {
        return Err(Error::DegenerateOutcome);
    }
    Ok(())
}

/// Unnormalized logistic posterior `q(θ) = π(θ) Π p_i^y_i (1 - p_i)^(1 - y_i)`.
#[derive(Debug, Clone)]
pub struct LogisticPosterior {
    dim: usize,
    groups: Groups,
    prior: LogisticPrior,
}

impl LogisticPosterior {
    pub fn new(x: &DesignMatrix, y: &[f64], prior: LogisticPrior) -> Result<Self> {
        if y.len() != x.n_rows() {
            return Err(Error::LengthMismatch {
                what: "outcome",
                got: y.len(),
                expected: x.n_rows(),
            });
        }
        validate_binary(y)?;
        if !x.gram().is_positive_definite() {
            return Err(Error::SingularDesign);
        }
        if prior.precision.dim() != x.dim() {
            return Err(Error::InvalidParameter("prior dimension mismatch".into()));
        }
        Ok(LogisticPosterior {
            dim: x.dim(),
            groups: Groups::new(x, y),
            prior,
        })
    }

    pub fn prior(&self) -> &LogisticPrior {
        &self.prior
    }

    pub fn log_likelihood(&self, theta: &[f64]) -> f64 {
        let slope = if self.dim == 2 { theta[1] } else { 0.0 };
        self.groups
            .rows
            .iter()
            .map(|&(g, cases, controls)| {
                let eta = theta[0] + slope * g;
                -f64::from(cases) * log1p_exp(-eta) - f64::from(controls) * log1p_exp(eta)
            })
            .sum()
    }
}

impl LogDensity for LogisticPosterior {
    fn dim(&self) -> usize {
        self.dim
    }

    fn ln_density(&self, theta: &[f64]) -> f64 {
        self.prior.ln_density(theta) + self.log_likelihood(theta)
    }
}

/// Polya-Gamma Gibbs sampler. Returns `config.samples` draws after
/// `config.burn_in` discarded iterations; deterministic given `stream`.
pub fn pg_gibbs(
    x: &DesignMatrix,
    y: &[f64],
    prior: &LogisticPrior,
    config: McmcConfig,
    stream: StreamId,
    model: ModelTag,
) -> Result<PosteriorSamples> {
    if config.samples < 100 {
        return Err(Error::InvalidParameter(format!(
            "need at least 100 posterior draws, got {}",
            config.samples
        )));
    }
    let target = LogisticPosterior::new(x, y, *prior)?;
    let dim = target.dim;
    let groups = &target.groups.rows;
    // X'(y - 1/2)
    let kappa = groups.iter().fold([0.0, 0.0], |acc, &(g, cases, controls)| {
        let k = 0.5 * (f64::from(cases) - f64::from(controls));
        [acc[0] + k, acc[1] + k * g]
    });
    let prior_pull = prior.precision.mul_vec(&prior.mean);
    let rhs = [kappa[0] + prior_pull[0], kappa[1] + prior_pull[1]];

    let mut rng = stream.rng();
    let mut theta = [0.0f64; 2];
    let mut values = Vec::with_capacity(config.samples * dim);
    for iter in 0..config.burn_in + config.samples {
        let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
        for &(g, cases, controls) in groups {
            let eta = if dim == 2 { theta[0] + theta[1] * g } else { theta[0] };
            let mut total = 0.0;
            for _ in 0..cases + controls {
                total += sample_polya_gamma(eta, &mut rng);
            }
            s0 += total;
            s1 += total * g;
            s2 += total * g * g;
        }
        let post_prec = match dim {
            1 => SymMat::scalar(s0),
            _ => SymMat::two(s0, s1, s2),
        }
        .add(&prior.precision);
        let cov = post_prec.inverse()?;
        let mean = cov.mul_vec(&rhs);
        let z0: f64 = StandardNormal.sample(&mut rng);
        if dim == 1 {
            theta[0] = mean[0] + cov.get(0, 0).sqrt() * z0;
        } else {
            let z1: f64 = StandardNormal.sample(&mut rng);
            let l11 = cov.get(0, 0).sqrt();
            let l21 = cov.get(1, 0) / l11;
            let l22 = (cov.get(1, 1) - l21 * l21).max(0.0).sqrt();
            theta[0] = mean[0] + l11 * z0;
            theta[1] = mean[1] + l21 * z0 + l22 * z1;
        }
        if iter >= config.burn_in {
            values.extend_from_slice(&theta[..dim]);
        }
    }
    Ok(PosteriorSamples {
        draws: Draws::new(dim, values)?,
        burn_in: config.burn_in,
        stream,
        model,
    })
}

/// Result of the iterative bridge estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BridgeEstimate {
    /// `ln(Z_a / Z_b)`.
    pub log_value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub rel_change_final: f64,
}

fn log_ratios<A: LogDensity + ?Sized, B: LogDensity + ?Sized>(
    draws: &Draws,
    q_a: &A,
    q_b: &B,
) -> Result<Vec<f64>> {
    draws
        .rows()
        .enumerate()
        .map(|(index, theta)| {
            let la = q_a.ln_density(theta);
            let lb = q_b.ln_density(theta);
            let v = la - lb;
            if !(la.is_finite() && lb.is_finite()) {
                Err(Error::NonFiniteDensity {
                    index,
                    value: if la.is_finite() { lb } else { la },
                })
            } else {
                Ok(v)
            }
        })
        .collect()
}

/// Estimates `ln(Z_a / Z_b)` for unnormalized densities `q_a`, `q_b` from
/// draws of their normalized versions.
///
/// Iterates `r ← [Σ_b l/(s_a l + s_b r) / N_b] / [Σ_a 1/(s_a l + s_b r) / N_a]`
/// from `r = 1`, where `l = q_a/q_b` and `s_· = N_·/(N_a + N_b)`. With equal
/// sample sizes the weights cancel.
pub fn bridge_ratio<A: LogDensity + ?Sized, B: LogDensity + ?Sized>(
    draws_a: &Draws,
    draws_b: &Draws,
    q_a: &A,
    q_b: &B,
) -> Result<BridgeEstimate> {
    if draws_a.is_empty() || draws_b.is_empty() {
        return Err(Error::TooFewDraws { need: 1, got: 0 });
    }
    let la = log_ratios(draws_a, q_a, q_b)?;
    let lb = log_ratios(draws_b, q_a, q_b)?;
    let (na, nb) = (la.len() as f64, lb.len() as f64);
    let ln_sa = (na / (na + nb)).ln();
    let ln_sb = (nb / (na + nb)).ln();
    let mut log_r = 0.0;
    let mut num = vec![0.0; lb.len()];
    let mut den = vec![0.0; la.len()];
    let mut change = f64::INFINITY;
    for iter in 1..=BRIDGE_MAX_ITER {
        for (t, &l) in num.iter_mut().zip(&lb) {
            *t = -log_add_exp(ln_sa, ln_sb + log_r - l);
        }
        for (t, &l) in den.iter_mut().zip(&la) {
            *t = -log_add_exp(ln_sa + l, ln_sb + log_r);
        }
        let next = (log_sum_exp(&num) - nb.ln()) - (log_sum_exp(&den) - na.ln());
        if !next.is_finite() {
            return Err(Error::NonFiniteDensity {
                index: iter,
                value: next,
            });
        }
        change = (next - log_r).exp_m1().abs();
        log_r = next;
        if change < BRIDGE_TOL {
            return Ok(BridgeEstimate {
                log_value: log_r,
                iterations: iter,
                converged: true,
                rel_change_final: change,
            });
        }
    }
    Ok(BridgeEstimate {
        log_value: log_r,
        iterations: BRIDGE_MAX_ITER,
        converged: false,
        rel_change_final: change,
    })
}

/// Independent-component Gaussian `exp(-½ Σ ((θ_d - m_d)/s_d)²)` whose
/// normalizing constant is `(2π)^(d/2) Π s_d`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianAnchor {
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
}

impl GaussianAnchor {
    pub fn fit(draws: &Draws) -> Result<Self> {
        let (mean, var) = draws.mean_var();
        let degenerate = |(v, m): (&f64, &f64)| !(*v > 1e-24 * m.abs().max(1.0).powi(2));
        if let Some(k) = var.iter().zip(&mean).position(degenerate) {
            return Err(Error::AnchorDegenerate(k));
        }
        Ok(GaussianAnchor {
            mean,
            sd: var.into_iter().map(f64::sqrt).collect(),
        })
    }

    pub fn log_constant(&self) -> f64 {
        0.5 * self.mean.len() as f64 * (2.0 * PI).ln() + self.sd.iter().map(|s| s.ln()).sum::<f64>()
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Draws {
        let mut values = Vec::with_capacity(n * self.mean.len());
        for _ in 0..n {
            for (m, s) in self.mean.iter().zip(&self.sd) {
                let z: f64 = StandardNormal.sample(rng);
                values.push(m + s * z);
            }
        }
        Draws {
            dim: self.mean.len(),
            values,
        }
    }
}

impl LogDensity for GaussianAnchor {
    fn dim(&self) -> usize {
        self.mean.len()
    }

    fn ln_density(&self, theta: &[f64]) -> f64 {
        -0.5 * theta
            .iter()
            .zip(self.mean.iter().zip(&self.sd))
            .map(|(t, (m, s))| ((t - m) / s).powi(2))
            .sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnchorEstimate {
    /// `ln P(Y | M)`.
    pub log_marginal: f64,
    pub anchor: GaussianAnchor,
    pub bridge: BridgeEstimate,
}

/// Log normalizing constant of `q` by bridging its posterior draws to a
/// diagonal Gaussian anchor fitted to them. Anchor draws come from `stream`.
pub fn marginal_via_anchor<Q: LogDensity + ?Sized>(
    draws: &Draws,
    q: &Q,
    stream: StreamId,
) -> Result<AnchorEstimate> {
    let anchor = GaussianAnchor::fit(draws)?;
    let anchor_draws = anchor.sample(draws.len(), &mut stream.rng());
    let bridge = bridge_ratio(draws, &anchor_draws, q, &anchor)?;
    Ok(AnchorEstimate {
        log_marginal: bridge.log_value + anchor.log_constant(),
        anchor,
        bridge,
    })
}

/// Intercept-only model fit; reusable across SNPs that share a called sample.
#[derive(Debug, Clone, PartialEq)]
pub struct NullFit {
    pub samples: PosteriorSamples,
    pub estimate: AnchorEstimate,
}

pub fn fit_null_logistic(y: &[f64], lambda: f64, mcmc: McmcConfig, task: StreamId) -> Result<NullFit> {
    let x = DesignMatrix::intercept_only(y.len());
    let prior = LogisticPrior::g_prior(&x, lambda)?;
    let samples = pg_gibbs(
        &x,
        y,
        &prior,
        mcmc,
        task.with_purpose(Purpose::GibbsNull),
        ModelTag::Null,
    )?;
    let target = LogisticPosterior::new(&x, y, prior)?;
    let estimate = marginal_via_anchor(
        &samples.draws,
        &target,
        task.with_purpose(Purpose::AnchorNull),
    )?;
    Ok(NullFit { samples, estimate })
}

/// Model-averaged logistic analysis of one SNP.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticBma {
    pub log_bf12: f64,
    pub log_bf1n: f64,
    pub log_bf2n: f64,
    pub log_bfan: f64,
    pub log_marginal1: f64,
    pub log_marginal2: f64,
    pub log_marginal_null: f64,
    pub samples1: PosteriorSamples,
    pub samples2: PosteriorSamples,
    pub bridge12: BridgeEstimate,
    /// Every bridge (M1 vs M2 and the three anchors) converged.
    pub converged: bool,
}

impl LogisticBma {
    pub fn bf12(&self) -> f64 {
        self.log_bf12.exp()
    }
    pub fn bf1n(&self) -> f64 {
        self.log_bf1n.exp()
    }
    pub fn bf2n(&self) -> f64 {
        self.log_bf2n.exp()
    }
    pub fn bf_an(&self) -> f64 {
        self.log_bfan.exp()
    }
}

/// Full logistic pipeline: Gibbs draws for M1 and M2, bridge `BF12`, and
/// anchor-based marginals for `BF_1N`, `BF_2N`, `BF_AN`.
pub fn bf_logistic(
    x1: &DesignMatrix,
    x2: &DesignMatrix,
    y: &[f64],
    lambda: f64,
    mcmc: McmcConfig,
    task: StreamId,
) -> Result<LogisticBma> {
    let null = fit_null_logistic(y, lambda, mcmc, task)?;
    bf_logistic_with_null(x1, x2, y, lambda, mcmc, task, &null)
}

/// As [`bf_logistic`] with a precomputed null-model fit on the same `y`.
pub fn bf_logistic_with_null(
    x1: &DesignMatrix,
    x2: &DesignMatrix,
    y: &[f64],
    lambda: f64,
    mcmc: McmcConfig,
    task: StreamId,
    null: &NullFit,
) -> Result<LogisticBma> {
    let prior1 = LogisticPrior::g_prior(x1, lambda)?;
    let prior2 = LogisticPrior::g_prior(x2, lambda)?;
    let q1 = LogisticPosterior::new(x1, y, prior1)?;
    let q2 = LogisticPosterior::new(x2, y, prior2)?;
    let samples1 = pg_gibbs(x1, y, &prior1, mcmc, task.with_purpose(Purpose::GibbsM1), ModelTag::M1)?;
    let samples2 = pg_gibbs(x2, y, &prior2, mcmc, task.with_purpose(Purpose::GibbsM2), ModelTag::M2)?;
    let bridge12 = bridge_ratio(&samples1.draws, &samples2.draws, &q1, &q2)?;
    let m1 = marginal_via_anchor(&samples1.draws, &q1, task.with_purpose(Purpose::AnchorM1))?;
    let m2 = marginal_via_anchor(&samples2.draws, &q2, task.with_purpose(Purpose::AnchorM2))?;
    let mn = &null.estimate;
    let log_bf1n = m1.log_marginal - mn.log_marginal;
    let log_bf2n = m2.log_marginal - mn.log_marginal;
    Ok(LogisticBma {
        log_bf12: bridge12.log_value,
        log_bf1n,
        log_bf2n,
        log_bfan: log_bf_an(log_bf1n, log_bf2n),
        log_marginal1: m1.log_marginal,
        log_marginal2: m2.log_marginal,
        log_marginal_null: mn.log_marginal,
        converged: bridge12.converged
            && m1.bridge.converged
            && m2.bridge.converged
            && mn.bridge.converged,
        samples1,
        samples2,
        bridge12,
    })
}
