//! Frequentist comparator: Wald tests under each coding and the analytic
//! p-value of `Zmax = max(|Z1|, |Z2|)`.

use crate::error::{Error, Result};
use crate::geno::pearson;
use crate::numeric::{integrate, norm_cdf, norm_pdf, norm_sf, sigmoid, QuadTol};
use crate::TraitType;

pub const IRLS_TOL: f64 = 1e-10;
pub const IRLS_MAX_ITER: usize = 50;

/// Correlations this close to ±1 are treated as identical statistics.
const DEGENERATE_R: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaldPair {
    pub z1: f64,
    pub z2: f64,
    /// Sample correlation of the two genotype codings.
    pub r: f64,
    pub p1: f64,
    pub p2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZmaxResult {
    pub zmax: f64,
    pub pvalue: f64,
}

/// Two-sided normal p-value `2Φ(-|z|)`.
pub fn two_sided_p(z: f64) -> f64 {
    2.0 * norm_sf(z.abs())
}

/// `(β̂, se(β̂))` of the slope in `y = α + β g + ε` by least squares.
pub fn ols_slope(g: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let n = g.len();
    if y.len() != n {
        return Err(Error::LengthMismatch {
            what: "outcome",
            got: y.len(),
            expected: n,
        });
    }
    if n < 3 {
        return Err(Error::TooFewObservations { need: 3, got: n });
    }
    let nf = n as f64;
    let gm = g.iter().sum::<f64>() / nf;
    let ym = y.iter().sum::<f64>() / nf;
    let (mut sgg, mut sgy, mut syy) = (0.0, 0.0, 0.0);
    for (gi, yi) in g.iter().zip(y) {
        let (dg, dy) = (gi - gm, yi - ym);
        sgg += dg * dg;
        sgy += dg * dy;
        syy += dy * dy;
    }
    if !(sgg > 0.0) {
        return Err(Error::SingularDesign);
    }
    let beta = sgy / sgg;
    let rss = (syy - beta * sgy).max(0.0);
    let sigma2 = rss / (nf - 2.0);
    Ok((beta, (sigma2 / sgg).sqrt()))
}

/// `(β̂, se(β̂))` of the slope in a logistic regression, by Newton–Raphson
/// (IRLS) from the intercept-only fit.
pub fn logistic_slope(g: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if y.len() != g.len() {
        return Err(Error::LengthMismatch {
            what: "outcome",
            got: y.len(),
            expected: g.len(),
        });
    }
    let n = y.len() as f64;
    let cases: f64 = y.iter().sum();
    if !(cases > 0.0 && cases < n) {
        return Err(Error::DegenerateOutcome);
    }
    let mut alpha = (cases / (n - cases)).ln();
    let mut beta = 0.0;
    for _ in 0..IRLS_MAX_ITER {
        // Score and Fisher information.
        let (mut u0, mut u1, mut i00, mut i01, mut i11) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (gi, yi) in g.iter().zip(y) {
            let p = sigmoid(alpha + beta * gi);
            let w = p * (1.0 - p);
            u0 += yi - p;
            u1 += (yi - p) * gi;
            i00 += w;
            i01 += w * gi;
            i11 += w * gi * gi;
        }
        let det = i00 * i11 - i01 * i01;
        if !(det > 1e-300) || !det.is_finite() {
            return Err(Error::IrlsFailure("information matrix is singular".into()));
        }
        let d0 = (i11 * u0 - i01 * u1) / det;
        let d1 = (i00 * u1 - i01 * u0) / det;
        alpha += d0;
        beta += d1;
        if !(alpha.is_finite() && beta.is_finite()) || beta.abs() > 1e6 {
            return Err(Error::IrlsFailure("estimates diverged (separation?)".into()));
        }
        if d0.abs().max(d1.abs()) < IRLS_TOL {
            let (mut j00, mut j01, mut j11) = (0.0, 0.0, 0.0);
            for gi in g {
                let p = sigmoid(alpha + beta * gi);
                let w = p * (1.0 - p);
                j00 += w;
                j01 += w * gi;
                j11 += w * gi * gi;
            }
            let det = j00 * j11 - j01 * j01;
            return Ok((beta, (j00 / det).sqrt()));
        }
    }
    Err(Error::IrlsFailure(format!(
        "no convergence within {IRLS_MAX_ITER} iterations"
    )))
}

/// Wald statistics for the slope under both codings.
pub fn wald_stats(g1: &[f64], g2: &[f64], y: &[f64], trait_type: TraitType) -> Result<WaldPair> {
    if g2.len() != g1.len() {
        return Err(Error::LengthMismatch {
            what: "G2",
            got: g2.len(),
            expected: g1.len(),
        });
    }
    let fit = |g: &[f64]| match trait_type {
        TraitType::Linear => ols_slope(g, y),
        TraitType::Binary => logistic_slope(g, y),
    };
    let (b1, se1) = fit(g1)?;
    let (z1, z2) = if g1 == g2 {
        (b1 / se1, b1 / se1)
    } else {
        let (b2, se2) = fit(g2)?;
        (b1 / se1, b2 / se2)
    };
    let r = if g1 == g2 { 1.0 } else { pearson(g1, g2)? };
    Ok(WaldPair {
        z1,
        z2,
        r,
        p1: two_sided_p(z1),
        p2: two_sided_p(z2),
    })
}

/// `P(max(|Z1|, |Z2|) > zmax)` for standard bivariate normal `(Z1, Z2)` with
/// correlation `r`, by integrating the conditional tail of `Z2` over `Z1`:
/// `2Φ(-z) + ∫_{-z}^{z} φ(x) [Φ((-z - r x)/s) + Φ((-z + r x)/s)] dx`, `s² = 1 - r²`.
pub fn zmax_pvalue(z1: f64, z2: f64, r: f64) -> Result<ZmaxResult> {
    if !(-1.0..=1.0).contains(&r) {
        return Err(Error::InvalidParameter(format!("correlation {r} outside [-1, 1]")));
    }
    let z = z1.abs().max(z2.abs());
    if !z.is_finite() {
        return Err(Error::InvalidParameter(format!("non-finite statistic {z}")));
    }
    let outer = 2.0 * norm_sf(z);
    if r.abs() >= 1.0 - DEGENERATE_R {
        return Ok(ZmaxResult { zmax: z, pvalue: outer });
    }
    let s = (1.0 - r * r).sqrt();
    let inner = integrate(
        |x| norm_pdf(x) * (norm_cdf((-z - r * x) / s) + norm_cdf((-z + r * x) / s)),
        -z,
        z,
        QuadTol {
            abs: 1e-13,
            rel: 1e-11,
            max_intervals: 2000,
        },
    )?;
    Ok(ZmaxResult {
        zmax: z,
        pvalue: (outer + inner.value).clamp(0.0, 1.0),
    })
}
