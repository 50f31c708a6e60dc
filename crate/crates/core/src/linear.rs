//! Exact conjugate Bayesian linear regression under the normal–inverse-gamma
//! g-prior, for the XCI model, the no-XCI model and the intercept-only null.
//!
//! All marginal-likelihood arithmetic is done on the log scale: with
//! `a = a0 + n/2` in the hundreds, `(b2/b1)^a` overflows long before the
//! Bayes factor itself is extreme.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::numeric::log_add_exp;

const PD_TOL: f64 = 1e-12;

/// Symmetric matrix of order 1 or 2 stored as `[m00, m01, m11]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymMat {
    dim: usize,
    m: [f64; 3],
}

impl SymMat {
    pub fn scalar(v: f64) -> Self {
        SymMat {
            dim: 1,
            m: [v, 0.0, 0.0],
        }
    }

    pub fn two(m00: f64, m01: f64, m11: f64) -> Self {
        SymMat {
            dim: 2,
            m: [m00, m01, m11],
        }
    }

    pub fn identity(dim: usize) -> Self {
        match dim {
            1 => SymMat::scalar(1.0),
            _ => SymMat::two(1.0, 0.0, 1.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match (i, j) {
            (0, 0) => self.m[0],
            (1, 1) => self.m[2],
            _ => self.m[1],
        }
    }

    pub fn det(&self) -> f64 {
        match self.dim {
            1 => self.m[0],
            _ => self.m[0] * self.m[2] - self.m[1] * self.m[1],
        }
    }

    pub fn trace(&self) -> f64 {
        match self.dim {
            1 => self.m[0],
            _ => self.m[0] + self.m[2],
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        SymMat {
            dim: self.dim,
            m: self.m.map(|v| v * c),
        }
    }

    pub fn add(&self, other: &SymMat) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        SymMat {
            dim: self.dim,
            m: [
                self.m[0] + other.m[0],
                self.m[1] + other.m[1],
                self.m[2] + other.m[2],
            ],
        }
    }

    /// Positive definite by determinant and trace, relative to the matrix scale.
    pub fn is_positive_definite(&self) -> bool {
        let scale = self.trace().abs().max(f64::MIN_POSITIVE);
        let det = self.det();
        let rel_det = match self.dim {
            1 => det / scale,
            _ => det / (scale * scale),
        };
        self.trace() > 0.0 && rel_det > PD_TOL
    }

    pub fn inverse(&self) -> Result<SymMat> {
        if !self.is_positive_definite() {
            return Err(Error::SingularDesign);
        }
        let d = self.det();
        Ok(match self.dim {
            1 => SymMat::scalar(1.0 / self.m[0]),
            _ => SymMat::two(self.m[2] / d, -self.m[1] / d, self.m[0] / d),
        })
    }

    pub fn mul_vec(&self, v: &[f64; 2]) -> [f64; 2] {
        match self.dim {
            1 => [self.m[0] * v[0], 0.0],
            _ => [
                self.m[0] * v[0] + self.m[1] * v[1],
                self.m[1] * v[0] + self.m[2] * v[1],
            ],
        }
    }

    pub fn quad_form(&self, v: &[f64; 2]) -> f64 {
        let mv = self.mul_vec(v);
        mv[0] * v[0] + mv[1] * v[1]
    }

    /// Solves `self · x = rhs`.
    pub fn solve(&self, rhs: &[f64; 2]) -> Result<[f64; 2]> {
        Ok(self.inverse()?.mul_vec(rhs))
    }
}

/// Regression design `(1, G)`, or the intercept column alone for the null model.
#[derive(Debug, Clone, PartialEq)]
pub enum DesignMatrix {
    InterceptOnly { n: usize },
    Genotype(Vec<f64>),
}

impl DesignMatrix {
    pub fn intercept_only(n: usize) -> Self {
        DesignMatrix::InterceptOnly { n }
    }

    pub fn with_genotype(g: Vec<f64>) -> Self {
        DesignMatrix::Genotype(g)
    }

    pub fn n_rows(&self) -> usize {
        match self {
            DesignMatrix::InterceptOnly { n } => *n,
            DesignMatrix::Genotype(g) => g.len(),
        }
    }

    /// Number of regression parameters (1 or 2).
    pub fn dim(&self) -> usize {
        match self {
            DesignMatrix::InterceptOnly { .. } => 1,
            DesignMatrix::Genotype(_) => 2,
        }
    }

    pub fn genotype(&self) -> Option<&[f64]> {
        match self {
            DesignMatrix::InterceptOnly { .. } => None,
            DesignMatrix::Genotype(g) => Some(g),
        }
    }

    /// `x_i' θ` for row `i`.
    #[inline]
    pub fn linear_predictor(&self, i: usize, theta: &[f64]) -> f64 {
        match self {
            DesignMatrix::InterceptOnly { .. } => theta[0],
            DesignMatrix::Genotype(g) => theta[0] + theta[1] * g[i],
        }
    }

    /// `X'X`.
    pub fn gram(&self) -> SymMat {
        match self {
            DesignMatrix::InterceptOnly { n } => SymMat::scalar(*n as f64),
            DesignMatrix::Genotype(g) => {
                let (s1, s2) = g.iter().fold((0.0, 0.0), |(a, b), &x| (a + x, b + x * x));
                SymMat::two(g.len() as f64, s1, s2)
            }
        }
    }

    /// `X'v`.
    pub fn cross(&self, v: &[f64]) -> [f64; 2] {
        match self {
            DesignMatrix::InterceptOnly { .. } => [v.iter().sum(), 0.0],
            DesignMatrix::Genotype(g) => g
                .iter()
                .zip(v)
                .fold([0.0, 0.0], |acc, (&x, &y)| [acc[0] + y, acc[1] + x * y]),
        }
    }

    /// Multiplies the genotype column by `c`.
    pub fn rescaled(&self, c: f64) -> Self {
        match self {
            DesignMatrix::InterceptOnly { n } => DesignMatrix::InterceptOnly { n: *n },
            DesignMatrix::Genotype(g) => DesignMatrix::Genotype(g.iter().map(|x| x * c).collect()),
        }
    }
}

/// Form of the prior precision on the regression coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PriorPrecision {
    /// Zellner g-prior, `Λ0 = (λ/n) X'X`.
    #[default]
    GPrior,
    /// Naive `Λ0 = λ I`; kept only to show its miscalibration between codings.
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NigPrior {
    pub mu0: [f64; 2],
    pub lambda: f64,
    pub a0: f64,
    pub b0: f64,
    pub precision: PriorPrecision,
}

impl Default for NigPrior {
    fn default() -> Self {
        NigPrior {
            mu0: [0.0, 0.0],
            lambda: 1.0,
            a0: 0.1,
            b0: 0.1,
            precision: PriorPrecision::GPrior,
        }
    }
}

impl NigPrior {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("lambda", self.lambda), ("a0", self.a0), ("b0", self.b0)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Prior precision `Λ0` for a design.
    pub fn precision_for(&self, x: &DesignMatrix) -> SymMat {
        match self.precision {
            PriorPrecision::GPrior => x.gram().scale(self.lambda / x.n_rows() as f64),
            PriorPrecision::Identity => SymMat::identity(x.dim()).scale(self.lambda),
        }
    }

    fn mean_for(&self, dim: usize) -> [f64; 2] {
        match dim {
            1 => [self.mu0[0], 0.0],
            _ => self.mu0,
        }
    }
}

/// Normal–inverse-gamma posterior for one model.
#[derive(Debug, Clone, PartialEq)]
pub struct NigPosterior {
    pub dim: usize,
    pub n: usize,
    pub mean: [f64; 2],
    pub precision: SymMat,
    pub prior_precision: SymMat,
    pub a: f64,
    pub b: f64,
    /// `ln P(Y | M)`.
    pub log_marginal: f64,
}

/// Univariate location–scale Student t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TComponent {
    pub df: f64,
    pub loc: f64,
    pub scale: f64,
    log_norm: f64,
}

impl TComponent {
    pub fn new(df: f64, loc: f64, scale: f64) -> Result<Self> {
        if !(df > 0.0 && scale > 0.0 && loc.is_finite() && scale.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "t component needs df > 0 and scale > 0 (df = {df}, scale = {scale})"
            )));
        }
        let log_norm = ln_gamma(0.5 * (df + 1.0))
            - ln_gamma(0.5 * df)
            - 0.5 * (df * PI).ln()
            - scale.ln();
        Ok(TComponent {
            df,
            loc,
            scale,
            log_norm,
        })
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        let z = (x - self.loc) / self.scale;
        self.log_norm - 0.5 * (self.df + 1.0) * (z * z / self.df).ln_1p()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }

    /// d/dx of the density.
    pub fn pdf_derivative(&self, x: f64) -> f64 {
        let z = (x - self.loc) / self.scale;
        -self.pdf(x) * (self.df + 1.0) * z / (self.scale * (self.df + z * z))
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let z = (x - self.loc) / self.scale;
        let tail = 0.5
            * statrs::function::beta::beta_reg(0.5 * self.df, 0.5, self.df / (self.df + z * z));
        if z > 0.0 {
            1.0 - tail
        } else {
            tail
        }
    }
}

/// Fits the conjugate model `Y = Xθ + ε` under `prior`.
pub fn fit_nig(x: &DesignMatrix, y: &[f64], prior: &NigPrior) -> Result<NigPosterior> {
    prior.validate()?;
    let n = x.n_rows();
    if y.len() != n {
        return Err(Error::LengthMismatch {
            what: "phenotype",
            got: y.len(),
            expected: n,
        });
    }
    if n < 3 {
        return Err(Error::TooFewObservations { need: 3, got: n });
    }
    let gram = x.gram();
    if !gram.is_positive_definite() {
        return Err(Error::SingularDesign);
    }
    let lambda0 = prior.precision_for(x);
    let precision = gram.add(&lambda0);
    let mu0 = prior.mean_for(x.dim());
    let xty = x.cross(y);
    let prior_pull = lambda0.mul_vec(&mu0);
    let mean = precision.solve(&[prior_pull[0] + xty[0], prior_pull[1] + xty[1]])?;
    let yty: f64 = y.iter().map(|v| v * v).sum();
    let a = prior.a0 + 0.5 * n as f64;
    let b = prior.b0 + 0.5 * (yty + lambda0.quad_form(&mu0) - precision.quad_form(&mean));
    if !(b > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "posterior scale b must be positive, got {b}"
        )));
    }
    let log_marginal = -0.5 * n as f64 * (2.0 * PI).ln()
        + 0.5 * (lambda0.det().ln() - precision.det().ln())
        + prior.a0 * prior.b0.ln()
        - a * b.ln()
        + ln_gamma(a)
        - ln_gamma(prior.a0);
    Ok(NigPosterior {
        dim: x.dim(),
        n,
        mean,
        precision,
        prior_precision: lambda0,
        a,
        b,
        log_marginal,
    })
}

/// Marginal posterior of the slope: t with `2a` df.
pub fn beta_posterior(post: &NigPosterior) -> Result<TComponent> {
    if post.dim != 2 {
        return Err(Error::InvalidParameter(
            "the null model has no slope".into(),
        ));
    }
    let v22 = post.precision.inverse()?.get(1, 1);
    TComponent::new(2.0 * post.a, post.mean[1], (post.b / post.a * v22).sqrt())
}

/// `ln BF12` from the closed form in determinants and scale parameters.
pub fn log_bf12_linear(post1: &NigPosterior, post2: &NigPosterior) -> Result<f64> {
    if post1.n != post2.n || post1.a != post2.a {
        return Err(Error::InvalidParameter(
            "Bayes factor needs both models fitted to the same data and prior".into(),
        ));
    }
    Ok(0.5
        * (post2.precision.det().ln() - post1.precision.det().ln()
            + post1.prior_precision.det().ln()
            - post2.prior_precision.det().ln())
        + post1.a * (post2.b.ln() - post1.b.ln()))
}

/// `BF12` on the linear scale (may overflow to `inf` for extreme evidence).
pub fn bf12_linear(post1: &NigPosterior, post2: &NigPosterior) -> Result<f64> {
    Ok(log_bf12_linear(post1, post2)?.exp())
}

/// `ln BF_kN = ln P(Y|M_k) - ln P(Y|M_N)`.
pub fn log_bf_vs_null(post_k: &NigPosterior, post_null: &NigPosterior) -> Result<f64> {
    if post_null.dim != 1 || post_k.n != post_null.n {
        return Err(Error::InvalidParameter(
            "null posterior must be an intercept-only fit on the same data".into(),
        ));
    }
    Ok(post_k.log_marginal - post_null.log_marginal)
}

pub fn bf_vs_null_linear(post_k: &NigPosterior, post_null: &NigPosterior) -> Result<f64> {
    Ok(log_bf_vs_null(post_k, post_null)?.exp())
}

/// `ln BF_AN = ln(½(BF_1N + BF_2N))` from the two log Bayes factors.
pub fn log_bf_an(log_bf1n: f64, log_bf2n: f64) -> f64 {
    log_add_exp(log_bf1n, log_bf2n) - std::f64::consts::LN_2
}

/// `BF_AN = ½(BF_1N + BF_2N)` on the linear scale.
pub fn bf_an(bf1n: f64, bf2n: f64) -> f64 {
    log_bf_an(bf1n.ln(), bf2n.ln()).exp()
}

/// Log marginals and Bayes factors of the three linear models for one SNP.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearBma {
    pub post1: NigPosterior,
    pub post2: NigPosterior,
    pub post_null: NigPosterior,
    pub log_bf12: f64,
    pub log_bf1n: f64,
    pub log_bf2n: f64,
    pub log_bfan: f64,
}

/// Fits M1, M2 and the null to the same phenotype.
pub fn analyze_linear(g1: &[f64], g2: &[f64], y: &[f64], prior: &NigPrior) -> Result<LinearBma> {
    let post1 = fit_nig(&DesignMatrix::with_genotype(g1.to_vec()), y, prior)?;
    let post2 = fit_nig(&DesignMatrix::with_genotype(g2.to_vec()), y, prior)?;
    let post_null = fit_nig(&DesignMatrix::intercept_only(y.len()), y, prior)?;
    let log_bf12 = log_bf12_linear(&post1, &post2)?;
    let log_bf1n = log_bf_vs_null(&post1, &post_null)?;
    let log_bf2n = log_bf_vs_null(&post2, &post_null)?;
    Ok(LinearBma {
        log_bfan: log_bf_an(log_bf1n, log_bf2n),
        post1,
        post2,
        post_null,
        log_bf12,
        log_bf1n,
        log_bf2n,
    })
}
