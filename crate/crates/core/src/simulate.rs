//! Simulation studies: genotype and outcome generation, effect sizes from a
//! target explained variance, replicate execution and summaries.
//!
//! For binary traits the explained variance is defined on the observed scale,
//! `EV = Var(E[Y|G]) / Var(Y)`, in a population whose case fraction is ½.

use std::fmt::Write as _;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bma::{bma_pool_samples, hpd_exact, hpd_from_samples, MixtureT};
use crate::error::{Error, Result};
use crate::geno::{code_genotypes, genotype_states, var_g, AlleleOrientation, Coding, GenotypeRecord, Sex};
use crate::linear::{analyze_linear, beta_posterior, DesignMatrix, NigPrior, PriorPrecision};
use crate::logistic::{bf_logistic, McmcConfig};
use crate::numeric::{brent_root, sigmoid};
use crate::rng::{Purpose, StreamId};
use crate::TraitType;

/// Upper end of the effect-size search for binary traits.
const MAX_LOGISTIC_BETA: f64 = 20.0;
/// Total individuals drawn before the case/control rejection scheme gives up.
pub const REJECTION_CAP: usize = 10_000_000;
/// Residual standard deviation of simulated linear traits.
pub const SIGMA: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TrueModel {
    #[serde(alias = "m1")]
    M1,
    #[serde(alias = "m2")]
    M2,
    #[serde(alias = "null")]
    Null,
}

impl TrueModel {
    pub fn coding(self) -> Option<Coding> {
        match self {
            TrueModel::M1 => Some(Coding::Xci),
            TrueModel::M2 => Some(Coding::NoXci),
            TrueModel::Null => None,
        }
    }
}

fn default_male_fraction() -> f64 {
    0.5
}
fn default_replicates() -> usize {
    1000
}
fn default_mcmc_j() -> usize {
    1000
}
fn default_burn_in() -> usize {
    500
}
fn default_alpha() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub n: usize,
    #[serde(default = "default_male_fraction")]
    pub male_fraction: f64,
    pub pm: f64,
    pub pf: f64,
    pub ev: f64,
    pub true_model: TrueModel,
    #[serde(rename = "trait")]
    pub trait_type: TraitType,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_mcmc_j")]
    pub mcmc_j: usize,
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
    /// HPD regions have probability `1 - alpha`.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub prior: NigPrior,
}

impl SimConfig {
    pub fn new(n: usize, pm: f64, pf: f64, ev: f64, true_model: TrueModel, trait_type: TraitType) -> Self {
        SimConfig {
            n,
            male_fraction: default_male_fraction(),
            pm,
            pf,
            ev,
            true_model,
            trait_type,
            replicates: default_replicates(),
            seed: 0,
            mcmc_j: default_mcmc_j(),
            burn_in: default_burn_in(),
            alpha: default_alpha(),
            prior: NigPrior::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.n < 4 {
            return bad(format!("n must be at least 4, got {}", self.n));
        }
        if self.replicates == 0 {
            return bad("replicates must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.male_fraction) {
            return bad(format!("male_fraction {} outside [0, 1]", self.male_fraction));
        }
        for (name, p) in [("pm", self.pm), ("pf", self.pf)] {
            if !(p > 0.0 && p < 1.0) {
                return bad(format!("{name} = {p} must lie in (0, 1)"));
            }
        }
        if (self.pm - 0.5) * (self.pf - 0.5) < 0.0 {
            return bad(format!(
                "pm = {} and pf = {} must lie on the same side of 0.5",
                self.pm, self.pf
            ));
        }
        if !(0.0..1.0).contains(&self.ev) {
            return bad(format!("ev = {} must lie in [0, 1)", self.ev));
        }
        if (self.ev == 0.0) != (self.true_model == TrueModel::Null) {
            return bad("ev must be 0 exactly when the true model is Null".into());
        }
        if self.trait_type == TraitType::Binary {
            if self.ev > 0.2 {
                return bad(format!("binary ev = {} exceeds 0.2", self.ev));
            }
            if self.n % 2 != 0 {
                return bad("binary studies need an even n".into());
            }
        }
        if !(self.alpha > 0.0 && self.alpha <= 0.5) {
            return bad(format!("alpha = {} must lie in (0, 0.5]", self.alpha));
        }
        self.prior.validate()
    }

    pub fn n_males(&self) -> usize {
        (self.n as f64 * self.male_fraction).floor() as usize
    }

    fn mcmc(&self) -> McmcConfig {
        McmcConfig {
            samples: self.mcmc_j,
            burn_in: self.burn_in,
        }
    }
}

fn draw_count<R: Rng + ?Sized>(sex: Sex, pm: f64, pf: f64, rng: &mut R) -> u8 {
    match sex {
        Sex::Male => u8::from(rng.random::<f64>() < pm),
        Sex::Female => u8::from(rng.random::<f64>() < pf) + u8::from(rng.random::<f64>() < pf),
    }
}

/// `⌊n · male_fraction⌋` males then females, genotypes under HWE.
pub fn gen_genotypes<R: Rng + ?Sized>(config: &SimConfig, rng: &mut R) -> Vec<GenotypeRecord> {
    let males = config.n_males();
    (0..config.n)
        .map(|i| {
            let sex = if i < males { Sex::Male } else { Sex::Female };
            GenotypeRecord::called(sex, draw_count(sex, config.pm, config.pf, rng))
        })
        .collect()
}

/// `β = (σ / σ_G) √(EV / (1 - EV))`.
pub fn beta_from_ev_linear(ev: f64, sigma: f64, sigma_g: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&ev) {
        return Err(Error::InvalidParameter(format!("ev = {ev} must lie in [0, 1)")));
    }
    if !(sigma_g > 0.0) {
        return Err(Error::InvalidParameter(format!("genotype sd {sigma_g} must be positive")));
    }
    Ok(sigma / sigma_g * (ev / (1.0 - ev)).sqrt())
}

/// Intercept giving a population case fraction of ½ for slope `beta`.
pub fn balanced_intercept(beta: f64, coding: Coding, pm: f64, pf: f64, male_fraction: f64) -> Result<f64> {
    let states = genotype_states(pm, pf, male_fraction);
    let code = |s: &(f64, f64, f64)| match coding {
        Coding::Xci => s.1,
        Coding::NoXci => s.2,
    };
    let prevalence = |a: f64| states.iter().map(|s| s.0 * sigmoid(a + beta * code(s))).sum::<f64>() - 0.5;
    let reach = 1.0 + beta.abs() * 2.0;
    Ok(brent_root(prevalence, -reach - 10.0, reach + 10.0, 1e-15, 300)?)
}

/// Observed-scale explained variance `Σ p_s (π_s - ½)² / ¼` at the balanced intercept.
pub fn ev_logistic(beta: f64, coding: Coding, pm: f64, pf: f64, male_fraction: f64) -> Result<f64> {
    let alpha = balanced_intercept(beta, coding, pm, pf, male_fraction)?;
    let states = genotype_states(pm, pf, male_fraction);
    Ok(states
        .iter()
        .map(|s| {
            let g = match coding {
                Coding::Xci => s.1,
                Coding::NoXci => s.2,
            };
            s.0 * (sigmoid(alpha + beta * g) - 0.5).powi(2)
        })
        .sum::<f64>()
        / 0.25)
}

/// `(β, α)` with population case fraction ½ and observed-scale EV equal to `ev`.
pub fn beta_from_ev_logistic(
    ev: f64,
    coding: Coding,
    pm: f64,
    pf: f64,
    male_fraction: f64,
) -> Result<(f64, f64)> {
    if !(0.0..=0.2).contains(&ev) {
        return Err(Error::InvalidParameter(format!("binary ev = {ev} must lie in [0, 0.2]")));
    }
    var_g(coding, pm, pf, male_fraction)?;
    if ev == 0.0 {
        return Ok((0.0, 0.0));
    }
    let gap = |b: f64| ev_logistic(b, coding, pm, pf, male_fraction).map_or(f64::NAN, |e| e - ev);
    if !(gap(MAX_LOGISTIC_BETA) >= 0.0) {
        return Err(Error::InfeasibleEv(ev));
    }
    let beta = brent_root(gap, 0.0, MAX_LOGISTIC_BETA, 1e-14, 500)?;
    let alpha = balanced_intercept(beta, coding, pm, pf, male_fraction)?;
    Ok((beta, alpha))
}

/// `Y = α + β G + ε`, `ε ~ N(0, σ²)`.
pub fn gen_linear_outcome<R: Rng + ?Sized>(g: &[f64], beta: f64, alpha: f64, rng: &mut R) -> Vec<f64> {
    g.iter()
        .map(|gi| {
            let e: f64 = StandardNormal.sample(rng);
            alpha + beta * gi + SIGMA * e
        })
        .collect()
}

/// Draws individuals (sex, genotype, then outcome) until `n/2` cases and
/// `n/2` controls are collected; surplus members of a full class are dropped.
pub fn gen_case_control<R: Rng + ?Sized>(
    config: &SimConfig,
    coding: Coding,
    beta: f64,
    alpha: f64,
    rng: &mut R,
) -> Result<(Vec<GenotypeRecord>, Vec<f64>)> {
    let half = config.n / 2;
    let (mut cases, mut controls) = (0usize, 0usize);
    let mut records = Vec::with_capacity(config.n);
    let mut y = Vec::with_capacity(config.n);
    for _ in 0..REJECTION_CAP {
        if cases == half && controls == half {
            return Ok((records, y));
        }
        let sex = if rng.random::<f64>() < config.male_fraction { Sex::Male } else { Sex::Female };
        let count = draw_count(sex, config.pm, config.pf, rng);
        let g = match (coding, sex) {
            (Coding::Xci, Sex::Female) => 0.5 * f64::from(count),
            _ => f64::from(count),
        };
        let case = rng.random::<f64>() < sigmoid(alpha + beta * g);
        if case && cases < half {
            cases += 1;
        } else if !case && controls < half {
            controls += 1;
        } else {
            continue;
        }
        records.push(GenotypeRecord::called(sex, count));
        y.push(if case { 1.0 } else { 0.0 });
    }
    Err(Error::RejectionCap(REJECTION_CAP))
}

/// Effect size and intercept used to generate data under `config`.
pub fn true_effect(config: &SimConfig) -> Result<(f64, f64)> {
    let Some(coding) = config.true_model.coding() else {
        return Ok((0.0, 0.0));
    };
    match config.trait_type {
        TraitType::Linear => {
            let mf = config.n_males() as f64 / config.n as f64;
            let sd = var_g(coding, config.pm, config.pf, mf)?.sqrt();
            Ok((beta_from_ev_linear(config.ev, SIGMA, sd)?, 0.0))
        }
        TraitType::Binary => beta_from_ev_logistic(config.ev, coding, config.pm, config.pf, config.male_fraction),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateResult {
    pub index: usize,
    pub ln_bf12: f64,
    pub ln_bf1n: f64,
    pub ln_bf2n: f64,
    pub ln_bfan: f64,
    /// Hull of the HPD region.
    pub hpd: (f64, f64),
    pub disconnected: bool,
    pub covers_truth: bool,
    pub contains_zero: bool,
}

impl ReplicateResult {
    pub fn log10_bf12(&self) -> f64 {
        self.ln_bf12 / std::f64::consts::LN_10
    }
    pub fn log10_bf1n(&self) -> f64 {
        self.ln_bf1n / std::f64::consts::LN_10
    }
    pub fn log10_bf2n(&self) -> f64 {
        self.ln_bf2n / std::f64::consts::LN_10
    }
    pub fn log10_bfan(&self) -> f64 {
        self.ln_bfan / std::f64::consts::LN_10
    }
}

/// Simulates and analyzes replicate `index`.
pub fn run_replicate(config: &SimConfig, beta: f64, alpha: f64, index: usize) -> Result<ReplicateResult> {
    let task = StreamId::new(config.seed, index as u64, Purpose::Data);
    let mut rng = task.rng();
    let coding = config.true_model.coding().unwrap_or(Coding::Xci);
    match config.trait_type {
        TraitType::Linear => {
            let records = gen_genotypes(config, &mut rng);
            let design = code_genotypes(&records, AlleleOrientation::RefD)?;
            let y = gen_linear_outcome(design.genotype(coding), beta, alpha, &mut rng);
            let fit = analyze_linear(&design.g1, &design.g2, &y, &config.prior)?;
            let mix = MixtureT::from_log_bf12(
                beta_posterior(&fit.post1)?,
                beta_posterior(&fit.post2)?,
                fit.log_bf12,
            );
            let region = hpd_exact(&mix, config.alpha)?;
            Ok(ReplicateResult {
                index,
                ln_bf12: fit.log_bf12,
                ln_bf1n: fit.log_bf1n,
                ln_bf2n: fit.log_bf2n,
                ln_bfan: fit.log_bfan,
                hpd: region.hull(),
                disconnected: region.is_disconnected(),
                covers_truth: region.contains(beta),
                contains_zero: region.contains(0.0),
            })
        }
        TraitType::Binary => {
            let (records, y) = gen_case_control(config, coding, beta, alpha, &mut rng)?;
            let design = code_genotypes(&records, AlleleOrientation::RefD)?;
            let fit = bf_logistic(
                &DesignMatrix::with_genotype(design.g1.clone()),
                &DesignMatrix::with_genotype(design.g2.clone()),
                &y,
                config.prior.lambda,
                config.mcmc(),
                task,
            )?;
            let pooled = bma_pool_samples(&fit.samples1, &fit.samples2, fit.log_bf12, task.with_purpose(Purpose::Pool))?;
            let (lo, hi) = hpd_from_samples(&pooled, config.alpha)?;
            Ok(ReplicateResult {
                index,
                ln_bf12: fit.log_bf12,
                ln_bf1n: fit.log_bf1n,
                ln_bf2n: fit.log_bf2n,
                ln_bfan: fit.log_bfan,
                hpd: (lo, hi),
                disconnected: false,
                covers_truth: lo <= beta && beta <= hi,
                contains_zero: lo <= 0.0 && 0.0 <= hi,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudySummary {
    pub config: SimConfig,
    pub beta: f64,
    pub intercept: f64,
    pub replicates: Vec<ReplicateResult>,
    /// `(replicate index, error message)`.
    pub failures: Vec<(usize, String)>,
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    s / n as f64
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

impl StudySummary {
    pub fn completed(&self) -> usize {
        self.replicates.len()
    }

    fn fraction(&self, pred: impl Fn(&ReplicateResult) -> bool) -> f64 {
        self.replicates.iter().filter(|r| pred(r)).count() as f64 / self.completed() as f64
    }

    /// Means of `(ln BF_1N, ln BF_2N, ln BF_AN)`.
    pub fn mean_ln(&self) -> (f64, f64, f64) {
        let r = &self.replicates;
        (
            mean(r.iter().map(|x| x.ln_bf1n)),
            mean(r.iter().map(|x| x.ln_bf2n)),
            mean(r.iter().map(|x| x.ln_bfan)),
        )
    }

    /// Means of `(log10 BF_1N, log10 BF_2N, log10 BF_AN)`.
    pub fn mean_log10(&self) -> (f64, f64, f64) {
        let (a, b, c) = self.mean_ln();
        let k = std::f64::consts::LN_10;
        (a / k, b / k, c / k)
    }

    pub fn median_ln_bfan(&self) -> f64 {
        median(self.replicates.iter().map(|r| r.ln_bfan).collect())
    }

    pub fn median_log10_bfan(&self) -> f64 {
        self.median_ln_bfan() / std::f64::consts::LN_10
    }

    pub fn coverage(&self) -> f64 {
        self.fraction(|r| r.covers_truth)
    }

    pub fn frac_contains_zero(&self) -> f64 {
        self.fraction(|r| r.contains_zero)
    }

    pub fn frac_bf12_above_one(&self) -> f64 {
        self.fraction(|r| r.ln_bf12 > 0.0)
    }

    pub fn frac_bfan_negative(&self) -> f64 {
        self.fraction(|r| r.ln_bfan < 0.0)
    }

    /// One `key<TAB>value` line per statistic.
    pub fn summary_tsv(&self) -> String {
        let (l1, l2, la) = self.mean_ln();
        let (d1, d2, da) = self.mean_log10();
        let mut out = String::from("statistic\tvalue\n");
        let rows: [(&str, String); 17] = [
            ("replicates_completed", self.completed().to_string()),
            ("replicates_failed", self.failures.len().to_string()),
            ("true_beta", format!("{:.10}", self.beta)),
            ("true_intercept", format!("{:.10}", self.intercept)),
            ("mean_ln_bf1n", format!("{l1:.6}")),
            ("mean_ln_bf2n", format!("{l2:.6}")),
            ("mean_ln_bfan", format!("{la:.6}")),
            ("mean_log10_bf1n", format!("{d1:.6}")),
            ("mean_log10_bf2n", format!("{d2:.6}")),
            ("mean_log10_bfan", format!("{da:.6}")),
            ("median_ln_bfan", format!("{:.6}", self.median_ln_bfan())),
            ("median_log10_bfan", format!("{:.6}", self.median_log10_bfan())),
            ("hpd_coverage", format!("{:.6}", self.coverage())),
            ("hpd_contains_zero", format!("{:.6}", self.frac_contains_zero())),
            ("frac_bf12_gt_1", format!("{:.6}", self.frac_bf12_above_one())),
            ("frac_bfan_lt_1", format!("{:.6}", self.frac_bfan_negative())),
            ("hpd_disconnected", format!("{:.6}", self.fraction(|r| r.disconnected))),
        ];
        for (k, v) in rows {
            let _ = writeln!(out, "{k}\t{v}");
        }
        out
    }

    pub fn replicates_tsv(&self) -> String {
        let mut out = String::from(
            "replicate\tlog10_bf12\tlog10_bf1n\tlog10_bf2n\tlog10_bfan\thpd_lower\thpd_upper\tdisconnected\tcovers_truth\tcontains_zero\n",
        );
        for r in &self.replicates {
            let _ = writeln!(
                out,
                "{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{}\t{}\t{}",
                r.index,
                r.log10_bf12(),
                r.log10_bf1n(),
                r.log10_bf2n(),
                r.log10_bfan(),
                r.hpd.0,
                r.hpd.1,
                u8::from(r.disconnected),
                u8::from(r.covers_truth),
                u8::from(r.contains_zero),
            );
        }
        for (i, msg) in &self.failures {
            let _ = writeln!(out, "{i}\tfailed: {msg}");
        }
        out
    }
}

/// Runs all replicates in parallel on the current rayon pool. Fails when more
/// than 5% of replicates fail.
pub fn run_study(config: &SimConfig) -> Result<StudySummary> {
    config.validate()?;
    let (beta, intercept) = true_effect(config)?;
    let outcomes: Vec<Result<ReplicateResult>> = (0..config.replicates)
        .into_par_iter()
        .map(|i| run_replicate(config, beta, intercept, i))
        .collect();
    let mut replicates = Vec::with_capacity(outcomes.len());
    let mut failures = Vec::new();
    for (i, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok(r) => replicates.push(r),
            Err(e) => failures.push((i, e.to_string())),
        }
    }
    if failures.len() * 20 > config.replicates {
        return Err(Error::TooManyFailures {
            failed: failures.len(),
            total: config.replicates,
        });
    }
    Ok(StudySummary {
        config: config.clone(),
        beta,
        intercept,
        replicates,
        failures,
    })
}

/// The same study with the naive `λ I` prior precision.
pub fn with_identity_prior(config: &SimConfig) -> SimConfig {
    let mut c = config.clone();
    c.prior.precision = PriorPrecision::Identity;
    c
}
