//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls the closed forms under test: marginal likelihoods are
//! brute-force quadratures of prior × likelihood, HPD regions come from dense
//! grids and rectangle probabilities from plain Monte Carlo.

#![allow(dead_code)]

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::function::gamma::ln_gamma;

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite Gauss–Legendre nodes over `[a, b]` with `panels` equal pieces.
pub fn composite_nodes(a: f64, b: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let gl = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for &(x, w) in &gl {
            out.push((mid + 0.5 * h * x, 0.5 * h * w));
        }
    }
    out
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Solves a 2×2 system.
fn solve2(m: [[f64; 2]; 2], r: [f64; 2]) -> [f64; 2] {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [
        (m[1][1] * r[0] - m[0][1] * r[1]) / det,
        (m[0][0] * r[1] - m[1][0] * r[0]) / det,
    ]
}

fn inv2(m: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]]
}

fn gram(g: &[f64]) -> [[f64; 2]; 2] {
    let n = g.len() as f64;
    let s1: f64 = g.iter().sum();
    let s2: f64 = g.iter().map(|x| x * x).sum();
    [[n, s1], [s1, s2]]
}

/// `ln P(Y|M)` for `Y = α + βg + ε` under the normal–inverse-gamma g-prior,
/// by 3-D quadrature over `(α, β, ln σ²)`.
pub fn linear_log_marginal_quadrature(g: &[f64], y: &[f64], lambda: f64, a0: f64, b0: f64) -> f64 {
    let n = y.len() as f64;
    let xtx = gram(g);
    let l0 = [[lambda / n * xtx[0][0], lambda / n * xtx[0][1]], [lambda / n * xtx[1][0], lambda / n * xtx[1][1]]];
    let ln_det_l0 = (l0[0][0] * l0[1][1] - l0[0][1] * l0[1][0]).ln();
    let xty = [y.iter().sum::<f64>(), g.iter().zip(y).map(|(a, b)| a * b).sum::<f64>()];
    let lam = [[xtx[0][0] + l0[0][0], xtx[0][1] + l0[0][1]], [xtx[1][0] + l0[1][0], xtx[1][1] + l0[1][1]]];
    let centre = solve2(lam, xty);
    let cov = inv2(lam);
    // Whitened coordinates: β = centre + σ·L·z with L the Cholesky factor of Λ⁻¹,
    // so strongly correlated (intercept, slope) pairs stay well resolved.
    let l11 = cov[0][0].sqrt();
    let l21 = cov[1][0] / l11;
    let l22 = (cov[1][1] - l21 * l21).sqrt();

    let inner = gauss_legendre(48);
    let outer = composite_nodes(-25.0, 12.0, 300, 8);
    let mut logs = Vec::with_capacity(outer.len());
    for &(t, wt) in &outer {
        let s2 = t.exp();
        let s = s2.sqrt();
        let half = 12.0;
        let ln_jac = (s * s * l11 * l22 * half * half).ln();
        let ln_ig = a0 * b0.ln() - ln_gamma(a0) - (a0 + 1.0) * t - b0 / s2;
        let mut cell = Vec::with_capacity(inner.len() * inner.len());
        for &(u, wu) in &inner {
            let zu = half * u;
            for &(v, wv) in &inner {
                let zv = half * v;
                let a = centre[0] + s * l11 * zu;
                let b = centre[1] + s * (l21 * zu + l22 * zv);
                let rss: f64 = g.iter().zip(y).map(|(gi, yi)| (yi - a - b * gi).powi(2)).sum();
                let ll = -0.5 * n * (2.0 * PI * s2).ln() - 0.5 * rss / s2;
                let q = l0[0][0] * a * a + 2.0 * l0[0][1] * a * b + l0[1][1] * b * b;
                let lp = -(2.0 * PI * s2).ln() + 0.5 * ln_det_l0 - 0.5 * q / s2;
                cell.push(ll + lp + (wu * wv).ln() + ln_jac);
            }
        }
        logs.push(log_sum_exp(&cell) + ln_ig + t + wt.ln());
    }
    log_sum_exp(&logs)
}

/// Intercept-only version of [`linear_log_marginal_quadrature`], 2-D.
pub fn linear_null_log_marginal_quadrature(y: &[f64], lambda: f64, a0: f64, b0: f64) -> f64 {
    let n = y.len() as f64;
    let ybar = y.iter().sum::<f64>() / n;
    let centre = n * ybar / (n + lambda);
    let sd = (1.0 / (n + lambda)).sqrt();
    let inner = gauss_legendre(64);
    let outer = composite_nodes(-25.0, 12.0, 300, 8);
    let mut logs = Vec::new();
    for &(t, wt) in &outer {
        let s2 = t.exp();
        let half = 12.0 * s2.sqrt() * sd;
        let ln_ig = a0 * b0.ln() - ln_gamma(a0) - (a0 + 1.0) * t - b0 / s2;
        let cell: Vec<f64> = inner
            .iter()
            .map(|&(u, wu)| {
                let a = centre + half * u;
                let rss: f64 = y.iter().map(|yi| (yi - a).powi(2)).sum();
                let ll = -0.5 * n * (2.0 * PI * s2).ln() - 0.5 * rss / s2;
                let lp = -0.5 * (2.0 * PI * s2 / lambda).ln() - 0.5 * lambda * a * a / s2;
                ll + lp + (wu * half).ln()
            })
            .collect();
        logs.push(log_sum_exp(&cell) + ln_ig + t + wt.ln());
    }
    log_sum_exp(&logs)
}

fn log1pexp(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn logistic_loglik(g: Option<&[f64]>, y: &[f64], a: f64, b: f64) -> f64 {
    y.iter()
        .enumerate()
        .map(|(i, &yi)| {
            let eta = a + b * g.map_or(0.0, |g| g[i]);
            yi * eta - log1pexp(eta)
        })
        .sum()
}

/// Posterior mode and inverse Hessian of `ℓ(θ) - ½ θ'Λ0θ` by Newton's method.
fn logistic_laplace(g: &[f64], y: &[f64], l0: [[f64; 2]; 2]) -> ([f64; 2], [[f64; 2]; 2]) {
    let mut th = [0.0, 0.0];
    let mut h = l0;
    for _ in 0..200 {
        let mut grad = [-(l0[0][0] * th[0] + l0[0][1] * th[1]), -(l0[1][0] * th[0] + l0[1][1] * th[1])];
        h = l0;
        for (gi, yi) in g.iter().zip(y) {
            let p = 1.0 / (1.0 + (-(th[0] + th[1] * gi)).exp());
            grad[0] += yi - p;
            grad[1] += (yi - p) * gi;
            let w = p * (1.0 - p);
            h[0][0] += w;
            h[0][1] += w * gi;
            h[1][0] += w * gi;
            h[1][1] += w * gi * gi;
        }
        let step = solve2(h, grad);
        th[0] += step[0];
        th[1] += step[1];
        if step[0].abs().max(step[1].abs()) < 1e-12 {
            break;
        }
    }
    (th, inv2(h))
}

/// Quadrature nodes `(α, β, ln weight·integrand)` for the logistic posterior
/// under the Gaussian g-prior `N(0, ((λ/n) X'X)⁻¹)`, in whitened coordinates
/// around the Laplace mode.
fn logistic_posterior_grid(g: &[f64], y: &[f64], lambda: f64) -> Vec<(f64, f64, f64)> {
    let n = y.len() as f64;
    let xtx = gram(g);
    let l0 = [[lambda / n * xtx[0][0], lambda / n * xtx[0][1]], [lambda / n * xtx[1][0], lambda / n * xtx[1][1]]];
    let det0 = l0[0][0] * l0[1][1] - l0[0][1] * l0[1][0];
    let (mode, cov) = logistic_laplace(g, y, l0);
    let l11 = cov[0][0].sqrt();
    let l21 = cov[1][0] / l11;
    let l22 = (cov[1][1] - l21 * l21).sqrt();
    let ln_jac = (l11 * l22).ln();
    let nodes = composite_nodes(-14.0, 14.0, 60, 10);
    let mut out = Vec::with_capacity(nodes.len() * nodes.len());
    for &(u, wu) in &nodes {
        for &(v, wv) in &nodes {
            let a = mode[0] + l11 * u;
            let b = mode[1] + l21 * u + l22 * v;
            let q = l0[0][0] * a * a + 2.0 * l0[0][1] * a * b + l0[1][1] * b * b;
            let lp = -(2.0 * PI).ln() + 0.5 * det0.ln() - 0.5 * q;
            out.push((a, b, logistic_loglik(Some(g), y, a, b) + lp + (wu * wv).ln() + ln_jac));
        }
    }
    out
}

/// `ln P(Y|M)` for logistic regression with the Gaussian g-prior, by 2-D quadrature.
pub fn logistic_log_marginal_quadrature(g: &[f64], y: &[f64], lambda: f64) -> f64 {
    let logs: Vec<f64> = logistic_posterior_grid(g, y, lambda).iter().map(|t| t.2).collect();
    log_sum_exp(&logs)
}

/// Posterior mean of `(α, β)` by the same quadrature.
pub fn logistic_posterior_mean_quadrature(g: &[f64], y: &[f64], lambda: f64) -> [f64; 2] {
    let grid = logistic_posterior_grid(g, y, lambda);
    let logs: Vec<f64> = grid.iter().map(|t| t.2).collect();
    let z = log_sum_exp(&logs);
    grid.iter().fold([0.0, 0.0], |m, &(a, b, l)| {
        let w = (l - z).exp();
        [m[0] + w * a, m[1] + w * b]
    })
}

/// Intercept-only logistic marginal with prior `N(0, 1/λ)`, by 1-D quadrature.
pub fn logistic_null_log_marginal_quadrature(y: &[f64], lambda: f64) -> f64 {
    let nodes = composite_nodes(-15.0, 15.0, 400, 10);
    let logs: Vec<f64> = nodes
        .iter()
        .map(|&(a, w)| {
            let lp = 0.5 * (lambda / (2.0 * PI)).ln() - 0.5 * lambda * a * a;
            logistic_loglik(None, y, a, 0.0) + lp + w.ln()
        })
        .collect();
    log_sum_exp(&logs)
}

/// Super-level-set HPD on a uniform grid: intervals, threshold, mass.
pub fn grid_hpd(density: impl Fn(f64) -> f64, lo: f64, hi: f64, step: f64, level: f64) -> (Vec<(f64, f64)>, f64, f64) {
    let n = ((hi - lo) / step).round() as usize;
    let xs: Vec<f64> = (0..=n).map(|i| lo + i as f64 * step).collect();
    let fs: Vec<f64> = xs.iter().map(|&x| density(x)).collect();
    let mut order: Vec<usize> = (0..fs.len()).collect();
    order.sort_by(|&a, &b| fs[b].total_cmp(&fs[a]));
    let mut mass = 0.0;
    let mut keep = vec![false; fs.len()];
    let mut threshold = 0.0;
    for &i in &order {
        if mass >= level {
            break;
        }
        keep[i] = true;
        mass += fs[i] * step;
        threshold = fs[i];
    }
    let mut intervals = Vec::new();
    let mut start = None;
    for i in 0..xs.len() {
        match (keep[i], start) {
            (true, None) => start = Some(xs[i]),
            (false, Some(s)) => {
                intervals.push((s, xs[i - 1]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        intervals.push((s, *xs.last().unwrap()));
    }
    (intervals, threshold, mass)
}

/// Monte Carlo estimate of `P(max(|Z1|, |Z2|) > z)` and its standard error.
pub fn mc_zmax_tail(z: f64, r: f64, draws: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = (1.0 - r * r).sqrt();
    let mut hits = 0u64;
    for _ in 0..draws {
        let a: f64 = StandardNormal.sample(&mut rng);
        let e: f64 = StandardNormal.sample(&mut rng);
        let b = r * a + s * e;
        if a.abs() > z || b.abs() > z {
            hits += 1;
        }
    }
    let p = hits as f64 / draws as f64;
    (p, (p * (1.0 - p) / draws as f64).sqrt())
}

/// One-sample Kolmogorov–Smirnov statistic against `cdf`.
pub fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic Kolmogorov p-value for statistic `d` at sample size `n`.
pub fn ks_pvalue(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let t = (sn + 0.12 + 0.11 / sn) * d;
    let mut p = 0.0;
    for k in 1..=200 {
        let kf = k as f64;
        let term = 2.0 * (-1f64).powi(k - 1) * (-2.0 * kf * kf * t * t).exp();
        p += term;
        if term.abs() < 1e-16 {
            break;
        }
    }
    p.clamp(0.0, 1.0)
}

/// Random X-chromosome data set: `n` individuals, half male, HWE genotypes.
/// Returns `(sexes as is_male, allele counts)`.
pub fn random_genotypes(n: usize, pm: f64, pf: f64, rng: &mut impl Rng) -> (Vec<bool>, Vec<u8>) {
    let mut male = Vec::with_capacity(n);
    let mut count = Vec::with_capacity(n);
    for i in 0..n {
        let m = i % 2 == 0;
        male.push(m);
        let c = if m {
            u8::from(rng.random::<f64>() < pm)
        } else {
            u8::from(rng.random::<f64>() < pf) + u8::from(rng.random::<f64>() < pf)
        };
        count.push(c);
    }
    (male, count)
}

/// G1 and G2 codes for counts produced by [`random_genotypes`].
pub fn codes(male: &[bool], count: &[u8]) -> (Vec<f64>, Vec<f64>) {
    male.iter()
        .zip(count)
        .map(|(&m, &c)| {
            let c = f64::from(c);
            if m {
                (c, c)
            } else {
                (0.5 * c, c)
            }
        })
        .unzip()
}

/// Writes a phenotype and genotype TSV pair for a synthetic panel.
pub fn write_panel(
    dir: &std::path::Path,
    male: &[bool],
    y: &[f64],
    snps: &[(String, Vec<u8>)],
) -> (std::path::PathBuf, std::path::PathBuf) {
    use std::fmt::Write as _;
    let mut pheno = String::from("iid\tsex\ty\n");
    for (i, (&m, v)) in male.iter().zip(y).enumerate() {
        let _ = writeln!(pheno, "id{i}\t{}\t{v}", if m { "M" } else { "F" });
    }
    let mut geno = String::from("iid");
    for (id, _) in snps {
        geno.push('\t');
        geno.push_str(id);
    }
    geno.push('\n');
    for i in 0..male.len() {
        let _ = write!(geno, "id{i}");
        for (_, c) in snps {
            let _ = write!(geno, "\t{}", c[i]);
        }
        geno.push('\n');
    }
    let p = dir.join("pheno.tsv");
    let g = dir.join("geno.tsv");
    std::fs::write(&p, pheno).unwrap();
    std::fs::write(&g, geno).unwrap();
    (p, g)
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_two_sample(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Mean and batch-means standard error of an autocorrelated chain.
pub fn batch_mean_se(xs: &[f64], batches: usize) -> (f64, f64) {
    let size = xs.len() / batches;
    let means: Vec<f64> = xs.chunks_exact(size).take(batches).map(|c| c.iter().sum::<f64>() / size as f64).collect();
    let m = means.iter().sum::<f64>() / batches as f64;
    let v = means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (batches - 1) as f64;
    (m, (v / batches as f64).sqrt())
}
