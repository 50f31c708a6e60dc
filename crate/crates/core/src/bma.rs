//! Model-averaged posterior of the genetic effect and its HPD region.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linear::TComponent;
use crate::logistic::PosteriorSamples;
use crate::numeric::{brent_root, sigmoid};
use crate::rng::StreamId;

const GRID: usize = 512;

/// `(w1, w2) = (BF12/(1+BF12), 1/(1+BF12))` from `ln BF12`, without overflow.
pub fn bma_weights(log_bf12: f64) -> (f64, f64) {
    (sigmoid(log_bf12), sigmoid(-log_bf12))
}

/// `w1 · t₁ + w2 · t₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureT {
    pub comp1: TComponent,
    pub comp2: TComponent,
    pub w1: f64,
    pub w2: f64,
}

impl MixtureT {
    pub fn from_log_bf12(comp1: TComponent, comp2: TComponent, log_bf12: f64) -> Self {
        let (w1, w2) = bma_weights(log_bf12);
        MixtureT { comp1, comp2, w1, w2 }
    }

    pub fn with_weight(comp1: TComponent, comp2: TComponent, w1: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&w1) {
            return Err(Error::InvalidParameter(format!("mixture weight {w1} outside [0, 1]")));
        }
        Ok(MixtureT {
            comp1,
            comp2,
            w1,
            w2: 1.0 - w1,
        })
    }

    fn active(&self) -> impl Iterator<Item = (&TComponent, f64)> {
        [(&self.comp1, self.w1), (&self.comp2, self.w2)]
            .into_iter()
            .filter(|(_, w)| *w > 0.0)
    }

    pub fn density(&self, x: f64) -> f64 {
        self.active().map(|(c, w)| w * c.pdf(x)).sum()
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.active().map(|(c, w)| w * c.pdf_derivative(x)).sum()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.active().map(|(c, w)| w * c.cdf(x)).sum()
    }

    pub fn mean(&self) -> f64 {
        self.active().map(|(c, w)| w * c.loc).sum()
    }

    /// Distribution of `-β`.
    pub fn mirrored(&self) -> Self {
        let flip = |c: &TComponent| TComponent::new(c.df, -c.loc, c.scale).expect("valid component");
        MixtureT {
            comp1: flip(&self.comp1),
            comp2: flip(&self.comp2),
            w1: self.w1,
            w2: self.w2,
        }
    }

    fn max_scale(&self) -> f64 {
        self.active().map(|(c, _)| c.scale).fold(0.0, f64::max)
    }

    fn min_scale(&self) -> f64 {
        self.active().map(|(c, _)| c.scale).fold(f64::INFINITY, f64::min)
    }

    /// Every zero of the derivative, ascending. They all lie between the
    /// smallest and largest component location, where the density is
    /// monotone outside.
    pub fn stationary_points(&self) -> Vec<f64> {
        let locs: Vec<f64> = self.active().map(|(c, _)| c.loc).collect();
        let lo = locs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = locs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if hi - lo <= 1e-12 * self.min_scale() {
            return vec![lo];
        }
        let mut grid: Vec<f64> = (0..=GRID)
            .map(|i| lo + (hi - lo) * i as f64 / GRID as f64)
            .collect();
        // Probes on both sides of every location, including the outermost,
        // so a peak sitting exactly at `lo` or `hi` is still bracketed.
        for (c, _) in self.active() {
            for k in [0.125, 0.25, 0.5, 1.0, 2.0, 4.0] {
                grid.push(c.loc - k * c.scale);
                grid.push(c.loc + k * c.scale);
            }
        }
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        let d: Vec<f64> = grid.iter().map(|&x| self.derivative(x)).collect();
        let xtol = 1e-14 * self.min_scale();
        let mut points = Vec::new();
        for i in 0..grid.len() {
            if d[i] == 0.0 {
                points.push(grid[i]);
            } else if i + 1 < grid.len() && d[i + 1] != 0.0 && d[i].signum() != d[i + 1].signum() {
                if let Ok(r) = brent_root(|x| self.derivative(x), grid[i], grid[i + 1], xtol, 200) {
                    points.push(r);
                }
            }
        }
        points
    }

    /// `{β : density(β) ≥ c}` as disjoint sorted intervals.
    pub fn superlevel_set(&self, c: f64) -> Result<Vec<(f64, f64)>> {
        self.superlevel_set_with(c, &self.stationary_points())
    }

    /// As [`MixtureT::superlevel_set`] with precomputed stationary points.
    fn superlevel_set_with(&self, c: f64, stationary: &[f64]) -> Result<Vec<(f64, f64)>> {
        if !(c > 0.0) {
            return Err(Error::InvalidParameter(format!("threshold {c} must be positive")));
        }
        let step0 = self.max_scale();
        let expand = |from: f64, dir: f64| {
            let mut step = step0;
            let mut x = from + dir * step;
            while self.density(x) >= c {
                step *= 2.0;
                x = from + dir * step;
            }
            x
        };
        let mut points = Vec::with_capacity(stationary.len() + 2);
        points.push(expand(stationary[0], -1.0));
        points.extend_from_slice(stationary);
        points.push(expand(*stationary.last().unwrap(), 1.0));

        let xtol = 1e-15 * self.min_scale();
        let h = |x: f64| self.density(x) - c;
        let mut intervals = Vec::new();
        let mut start = None;
        let mut inside = false;
        for pair in points.windows(2) {
            let next_inside = h(pair[1]) >= 0.0;
            if next_inside != inside {
                let root = brent_root(h, pair[0], pair[1], xtol, 300)?;
                if next_inside {
                    start = Some(root);
                } else if let Some(s) = start.take() {
                    intervals.push((s, root));
                }
                inside = next_inside;
            }
        }
        Ok(intervals)
    }

    pub fn mass(&self, intervals: &[(f64, f64)]) -> f64 {
        intervals.iter().map(|&(a, b)| self.cdf(b) - self.cdf(a)).sum()
    }
}

/// Highest-posterior-density region `{β : π(β|Y) ≥ c}` of mass `level`.
#[derive(Debug, Clone, PartialEq)]
pub struct HpdRegion {
    pub intervals: Vec<(f64, f64)>,
    pub level: f64,
    pub threshold: f64,
    pub total_mass: f64,
}

impl HpdRegion {
    pub fn is_disconnected(&self) -> bool {
        self.intervals.len() > 1
    }

    /// Smallest single interval containing the region.
    pub fn hull(&self) -> (f64, f64) {
        (
            self.intervals.first().map_or(f64::NAN, |i| i.0),
            self.intervals.last().map_or(f64::NAN, |i| i.1),
        )
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| a <= x && x <= b)
    }

    pub fn length(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }
}

fn validate_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 0.5) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, 0.5], got {alpha}")));
    }
    Ok(())
}

/// Exact `1 - alpha` HPD region of a t mixture.
///
/// Solves `mass(c) = 1 - alpha` for the density threshold `c` with a
/// bracketed root finder; `mass` is monotone decreasing in `c`. For each trial
/// `c` the super-level set is found by root finding on the monotone pieces
/// between stationary points and its mass comes from the component CDFs.
pub fn hpd_exact(mix: &MixtureT, alpha: f64) -> Result<HpdRegion> {
    validate_alpha(alpha)?;
    let level = 1.0 - alpha;
    let stationary = mix.stationary_points();
    let peak = mode_among(mix, &stationary);
    let f_max = mix.density(peak);
    if !(f_max > 0.0 && f_max.is_finite()) {
        return Err(Error::InvalidParameter("mixture density has no finite peak".into()));
    }
    let gap = |c: f64| {
        mix.superlevel_set_with(c, &stationary)
            .map_or(f64::NAN, |set| mix.mass(&set) - level)
    };
    let threshold = brent_root(gap, 1e-12 * f_max, f_max * (1.0 - 1e-15), 1e-15 * f_max, 300)?;
    let intervals = mix.superlevel_set_with(threshold, &stationary)?;
    Ok(HpdRegion {
        total_mass: mix.mass(&intervals),
        intervals,
        level,
        threshold,
    })
}

fn shortest_window(sorted: &[f64], k: usize) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for i in 0..=sorted.len() - k {
        let w = sorted[i + k - 1] - sorted[i];
        if w < best.1 {
            best = (i, w);
        }
    }
    best
}

/// Shortest interval containing `⌈(1 - alpha) J⌉` of the draws.
pub fn hpd_from_samples(draws: &[f64], alpha: f64) -> Result<(f64, f64)> {
    validate_alpha(alpha)?;
    if draws.len() < 100 {
        return Err(Error::TooFewDraws {
            need: 100,
            got: draws.len(),
        });
    }
    let mut sorted = draws.to_vec();
    sorted.sort_by(f64::total_cmp);
    let k = (((1.0 - alpha) * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    let (i, _) = shortest_window(&sorted, k);
    Ok((sorted[i], sorted[i + k - 1]))
}

/// Mode estimate from draws: midpoint of the shortest window holding 10% of them.
pub fn mode_from_samples(draws: &[f64]) -> Result<f64> {
    if draws.len() < 100 {
        return Err(Error::TooFewDraws {
            need: 100,
            got: draws.len(),
        });
    }
    let mut sorted = draws.to_vec();
    sorted.sort_by(f64::total_cmp);
    let k = (sorted.len() / 10).max(2);
    let (i, _) = shortest_window(&sorted, k);
    Ok(0.5 * (sorted[i] + sorted[i + k - 1]))
}

/// Model-averaged slope draws: draw `j` is taken from `samples1` with
/// probability `w1`, otherwise from `samples2`.
pub fn bma_pool_samples(
    samples1: &PosteriorSamples,
    samples2: &PosteriorSamples,
    log_bf12: f64,
    stream: StreamId,
) -> Result<Vec<f64>> {
    if samples1.len() != samples2.len() {
        return Err(Error::LengthMismatch {
            what: "second posterior sample",
            got: samples2.len(),
            expected: samples1.len(),
        });
    }
    let (b1, b2) = (samples1.beta(), samples2.beta());
    if b1.is_empty() || b2.is_empty() {
        return Err(Error::InvalidParameter("pooling needs slope draws from both models".into()));
    }
    let (w1, _) = bma_weights(log_bf12);
    let mut rng = stream.rng();
    Ok(b1
        .iter()
        .zip(&b2)
        .map(|(&x1, &x2)| if rng.random::<f64>() < w1 { x1 } else { x2 })
        .collect())
}

/// Global maximizer of the mixture density. Near-ties (relative 1e-12) go to
/// the peak closest to the heavier component.
pub fn posterior_mode(mix: &MixtureT) -> f64 {
    mode_among(mix, &mix.stationary_points())
}

fn mode_among(mix: &MixtureT, stationary: &[f64]) -> f64 {
    let mut candidates = stationary.to_vec();
    candidates.extend(mix.active().map(|(c, _)| c.loc));
    let heavy = if mix.w1 >= mix.w2 { mix.comp1.loc } else { mix.comp2.loc };
    let top = candidates
        .iter()
        .map(|&x| mix.density(x))
        .fold(f64::NEG_INFINITY, f64::max);
    candidates
        .into_iter()
        .filter(|&x| mix.density(x) >= top * (1.0 - 1e-12))
        .min_by(|a, b| (a - heavy).abs().total_cmp(&(b - heavy).abs()))
        .expect("at least one candidate")
}
