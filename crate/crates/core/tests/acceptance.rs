//! End-to-end acceptance checks. Runs as a plain binary (no libtest harness)
//! so each criterion reports exactly one PASS/FAIL line.

mod common;

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use xbma::bma::{hpd_exact, MixtureT};
use xbma::geno::{code_genotypes, AlleleOrientation, GenotypeRecord, Sex};
use xbma::linear::{analyze_linear, beta_posterior, fit_nig, DesignMatrix, NigPrior, TComponent};
use xbma::logistic::{
    bf_logistic, bridge_ratio, pg_gibbs, sample_polya_gamma, LogisticPosterior, LogisticPrior, McmcConfig, ModelTag,
};
use xbma::rng::{Purpose, StreamId};
use xbma::scan::{emit_outputs, load_dataset, scan, ScanConfig};
use xbma::simulate::{gen_genotypes, gen_linear_outcome, run_study, with_identity_prior, SimConfig, TrueModel};
use xbma::zmax::{wald_stats, zmax_pvalue};
use xbma::TraitType;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn linear_study(pm: f64, ev: f64, truth: TrueModel, n: usize, seed: u64) -> SimConfig {
    let mut c = SimConfig::new(n, pm, pm, ev, truth, TraitType::Linear);
    c.seed = seed;
    c
}

/// Mean natural-log Bayes factors against the published table at n = 1000,
/// EV = 0.01. The published averages are on the natural-log scale.
fn criterion_1() -> Outcome {
    let rows = [
        (0.95, TrueModel::M1, [2.066, -1.850, 1.541]),
        (0.95, TrueModel::M2, [-1.969, 1.854, 1.309]),
        (0.30, TrueModel::M1, [1.942, 1.062, 1.755]),
        (0.30, TrueModel::M2, [1.073, 1.983, 1.796]),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, (p, truth, want)) in rows.into_iter().enumerate() {
        let s = run_study(&linear_study(p, 0.01, truth, 1000, 100 + i as u64)).map_err(|e| e.to_string())?;
        let (a, b, c) = s.mean_ln();
        let (la, lb, lc) = s.mean_log10();
        let good = [a, b, c].iter().zip(want).all(|(g, w)| (g - w).abs() <= 0.15);
        ok &= good;
        parts.push(format!(
            "({p},{truth:?}) ln=({a:.3},{b:.3},{c:.3}) log10=({la:.3},{lb:.3},{lc:.3}) want ({:.3},{:.3},{:.3})",
            want[0], want[1], want[2]
        ));
    }
    check(ok, parts.join("; "))
}

fn criterion_2() -> Outcome {
    let s = run_study(&linear_study(0.95, 0.05, TrueModel::M1, 1000, 200)).map_err(|e| e.to_string())?;
    let (a, b, c) = s.mean_ln();
    let want = [22.35, 2.29, 21.65];
    let ok = [a, b, c].iter().zip(want).all(|(g, w)| (g - w).abs() <= 1.0);
    check(ok, format!("ln=({a:.2},{b:.2},{c:.2}) want ({:.2},{:.2},{:.2}) ± 1.0", want[0], want[1], want[2]))
}

fn criterion_3() -> Outcome {
    let s1 = run_study(&linear_study(0.3, 0.0, TrueModel::Null, 1000, 300)).map_err(|e| e.to_string())?;
    let s2 = run_study(&linear_study(0.3, 0.0, TrueModel::Null, 2000, 301)).map_err(|e| e.to_string())?;
    let cover = s1.frac_contains_zero();
    let (m1, m2) = (s1.median_log10_bfan(), s2.median_log10_bfan());
    check(
        (0.93..=0.97).contains(&cover) && m1 < 0.0 && m2 < m1,
        format!("HPD contains 0 in {cover:.3}; median log10 BF_AN {m1:.3} (n=1000), {m2:.3} (n=2000)"),
    )
}

fn criterion_4() -> Outcome {
    let base = linear_study(0.3, 0.0, TrueModel::Null, 1000, 400);
    let g = run_study(&base).map_err(|e| e.to_string())?.frac_bf12_above_one();
    let naive = run_study(&with_identity_prior(&base)).map_err(|e| e.to_string())?.frac_bf12_above_one();
    check(
        (g - 0.5).abs() <= 0.04 && (0.70..=0.90).contains(&naive) && naive - g > 0.25,
        format!("BF12 > 1 in {g:.3} (g-prior), {naive:.3} (identity prior)"),
    )
}

fn criterion_5() -> Outcome {
    let prior = NigPrior::default();
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    let (mut worst_rel, mut worst_bf) = (0.0f64, 0.0f64);
    let mut done = 0;
    while done < 20 {
        let n = rng.random_range(6..=20);
        let (male, count) = common::random_genotypes(n, 0.4, 0.4, &mut rng);
        let (g1, g2) = common::codes(&male, &count);
        if g1.iter().all(|&x| x == g1[0]) {
            continue;
        }
        let beta = rng.random_range(-1.0..1.0);
        let y: Vec<f64> = g1
            .iter()
            .map(|g| {
                let e: f64 = StandardNormal.sample(&mut rng);
                beta * g + e
            })
            .collect();
        let fit = analyze_linear(&g1, &g2, &y, &prior).map_err(|e| e.to_string())?;
        for (g, post) in [(&g1, &fit.post1), (&g2, &fit.post2)] {
            let oracle = common::linear_log_marginal_quadrature(g, &y, 1.0, 0.1, 0.1);
            worst_rel = worst_rel.max(((post.log_marginal - oracle) / oracle).abs());
        }
        let direct = fit_nig(&DesignMatrix::with_genotype(g1.clone()), &y, &prior).map_err(|e| e.to_string())?;
        let other = fit_nig(&DesignMatrix::with_genotype(g2.clone()), &y, &prior).map_err(|e| e.to_string())?;
        worst_bf = worst_bf.max((fit.log_bf12 - (direct.log_marginal - other.log_marginal)).abs());
        done += 1;
    }
    check(
        worst_rel < 1e-4 && worst_bf < 1e-10,
        format!("max relative marginal error {worst_rel:.2e}; max BF12 identity error {worst_bf:.2e}"),
    )
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(600);
    let (mut worst_m, mut worst_an) = (0.0f64, 0.0f64);
    let mut done = 0;
    while done < 10 {
        let n = rng.random_range(20..=30);
        let beta = rng.random_range(-1.5..1.5);
        let (male, count) = common::random_genotypes(n, 0.35, 0.35, &mut rng);
        let (g1, g2) = common::codes(&male, &count);
        let y: Vec<f64> = g1
            .iter()
            .map(|g| f64::from(u8::from(rng.random::<f64>() < sigmoid(-0.2 + beta * g))))
            .collect();
        let cases = y.iter().sum::<f64>();
        if g1.iter().all(|&x| x == g1[0]) || cases == 0.0 || cases == n as f64 {
            continue;
        }
        let fit = bf_logistic(
            &DesignMatrix::with_genotype(g1.clone()),
            &DesignMatrix::with_genotype(g2.clone()),
            &y,
            1.0,
            McmcConfig::default(),
            StreamId::new(600, done, Purpose::Other),
        )
        .map_err(|e| e.to_string())?;
        let m1 = common::logistic_log_marginal_quadrature(&g1, &y, 1.0);
        let m2 = common::logistic_log_marginal_quadrature(&g2, &y, 1.0);
        let mn = common::logistic_null_log_marginal_quadrature(&y, 1.0);
        for (got, want) in [(fit.log_marginal1, m1), (fit.log_marginal2, m2), (fit.log_marginal_null, mn)] {
            worst_m = worst_m.max((got - want).abs());
        }
        let an = 0.5 * ((m1 - mn).exp() + (m2 - mn).exp());
        worst_an = worst_an.max((fit.bf_an() / an - 1.0).abs());
        done += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst_m < 0.05 && worst_an < 0.10 && secs < 300.0,
        format!("max |Δ ln P(Y|M)| {worst_m:.4}; max BF_AN relative error {worst_an:.4}; {secs:.1} s"),
    )
}

/// Median BF_AN is compared on the natural-log scale, like the tabulated means.
fn criterion_7() -> Outcome {
    let mut null = SimConfig::new(1000, 0.1, 0.3, 0.0, TrueModel::Null, TraitType::Binary);
    null.replicates = 50;
    null.seed = 700;
    let mut alt = SimConfig::new(1000, 0.1, 0.3, 0.01, TrueModel::M1, TraitType::Binary);
    alt.replicates = 50;
    alt.seed = 701;
    let s0 = run_study(&null).map_err(|e| e.to_string())?;
    let s1 = run_study(&alt).map_err(|e| e.to_string())?;
    let (zero, negative) = (s0.frac_contains_zero(), s0.frac_bfan_negative());
    let (median, cover) = (s1.median_ln_bfan(), s1.coverage());
    check(
        zero >= 0.90 && negative > 0.5 && median > 1.0 && cover >= 0.85,
        format!(
            "null: HPD contains 0 in {zero:.2}, BF_AN < 1 in {negative:.2}; M1: median ln BF_AN {median:.2} \
             (log10 {:.2}), HPD covers β in {cover:.2}",
            s1.median_log10_bfan()
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut worst = 0.0f64;
    let mut i = 0;
    for z in [1.96, 3.0, 5.0] {
        for r in [0.0, 0.5, 0.9, 0.99] {
            let (mc, se) = common::mc_zmax_tail(z, r, 10_000_000, 800 + i);
            let p = zmax_pvalue(z, 0.0, r).map_err(|e| e.to_string())?.pvalue;
            // At z = 5 the tail is ~1e-6 and may see no hits; floor the SE at one hit.
            let se = se.max(1.0 / 10_000_000.0);
            worst = worst.max((p - mc).abs() / se);
            i += 1;
        }
    }
    let config = linear_study(0.3, 0.0, TrueModel::Null, 1000, 0);
    let mut rng = ChaCha8Rng::seed_from_u64(801);
    let mut ps = Vec::with_capacity(2000);
    for _ in 0..2000 {
        let records = gen_genotypes(&config, &mut rng);
        let d = code_genotypes(&records, AlleleOrientation::RefD).map_err(|e| e.to_string())?;
        let y = gen_linear_outcome(&d.g1, 0.0, 0.0, &mut rng);
        let w = wald_stats(&d.g1, &d.g2, &y, TraitType::Linear).map_err(|e| e.to_string())?;
        ps.push(zmax_pvalue(w.z1, w.z2, w.r).map_err(|e| e.to_string())?.pvalue);
    }
    let d = common::ks_statistic(ps, |x| x.clamp(0.0, 1.0));
    let ks_p = common::ks_pvalue(d, 2000);
    check(
        worst < 3.0 && ks_p > 0.01,
        format!("max |analytic - MC| = {worst:.2} SE; null KS D = {d:.4}, p = {ks_p:.3}"),
    )
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn linear_dataset(n: usize, seed: u64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (male, count) = common::random_genotypes(n, 0.4, 0.4, &mut rng);
    let (g1, g2) = common::codes(&male, &count);
    let beta = rng.random_range(-1.0..1.0);
    let y = g1
        .iter()
        .map(|g| {
            let e: f64 = StandardNormal.sample(&mut rng);
            0.3 + beta * g + e
        })
        .collect();
    (g1, g2, y)
}

fn polymorphic(g: &[f64]) -> bool {
    g.iter().any(|&x| x != g[0])
}

fn rescale_invariance() -> Result<(), String> {
    runner(64)
        .run(&(0u64..10_000, 0.05f64..20.0), |(seed, c)| {
            let (g1, g2, y) = linear_dataset(60, seed);
            prop_assume!(polymorphic(&g1));
            let prior = NigPrior::default();
            let base = analyze_linear(&g1, &g2, &y, &prior).unwrap();
            let s1: Vec<f64> = g1.iter().map(|g| c * g).collect();
            let s2: Vec<f64> = g2.iter().map(|g| c * g).collect();
            let scaled = analyze_linear(&s1, &s2, &y, &prior).unwrap();
            prop_assert!((base.log_bf12 - scaled.log_bf12).abs() < 1e-10);
            prop_assert!((base.log_bfan - scaled.log_bfan).abs() < 1e-10);
            Ok(())
        })
        .map_err(|e| format!("g-prior rescaling: {e}"))
}

fn flip_invariance() -> Result<(), String> {
    runner(64)
        .run(&(0u64..10_000), |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (male, count) = common::random_genotypes(80, 0.3, 0.3, &mut rng);
            let records: Vec<GenotypeRecord> = male
                .iter()
                .zip(&count)
                .map(|(&m, &c)| GenotypeRecord::called(if m { Sex::Male } else { Sex::Female }, c))
                .collect();
            let y: Vec<f64> = (0..80).map(|_| StandardNormal.sample(&mut rng)).collect();
            let d = code_genotypes(&records, AlleleOrientation::RefD).unwrap();
            let f = code_genotypes(&records, AlleleOrientation::RefLittleD).unwrap();
            prop_assume!(polymorphic(&d.g1));
            let prior = NigPrior::default();
            let a = fit_nig(&DesignMatrix::with_genotype(d.g1.clone()), &y, &prior).unwrap();
            let b = fit_nig(&DesignMatrix::with_genotype(f.g1.clone()), &y, &prior).unwrap();
            prop_assert!((a.log_marginal - b.log_marginal).abs() < 1e-10);
            let (ta, tb) = (beta_posterior(&a).unwrap(), beta_posterior(&b).unwrap());
            prop_assert!((ta.loc + tb.loc).abs() < 1e-10);
            Ok(())
        })
        .map_err(|e| format!("M1 allele flip: {e}"))
}

fn hpd_mass() -> Result<(), String> {
    let comp = (2.5f64..2000.0, -5.0f64..5.0, 0.01f64..3.0);
    runner(100)
        .run(&(comp.clone(), comp, 0.0f64..=1.0, 0.01f64..=0.5), |((d1, l1, s1), (d2, l2, s2), w, alpha)| {
            let mix = MixtureT::with_weight(
                TComponent::new(d1, l1, s1).unwrap(),
                TComponent::new(d2, l2, s2).unwrap(),
                w,
            )
            .unwrap();
            let hpd = hpd_exact(&mix, alpha).unwrap();
            let mass: f64 = hpd
                .intervals
                .iter()
                .map(|&(a, b)| {
                    common::composite_nodes(a, b, 200, 10)
                        .iter()
                        .map(|&(x, wx)| wx * mix.density(x))
                        .sum::<f64>()
                })
                .sum();
            prop_assert!((hpd.total_mass - (1.0 - alpha)).abs() < 1e-6);
            prop_assert!((mass - (1.0 - alpha)).abs() < 1e-6);
            Ok(())
        })
        .map_err(|e| format!("HPD mass: {e}"))
}

fn bridge_self_consistency() -> Result<(), String> {
    runner(12)
        .run(&(0u64..1000), |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (g1, g2, y) = loop {
                let (male, count) = common::random_genotypes(150, 0.35, 0.35, &mut rng);
                let (g1, g2) = common::codes(&male, &count);
                let y: Vec<f64> =
                    g1.iter().map(|g| f64::from(u8::from(rng.random::<f64>() < sigmoid(-0.3 + 0.6 * g)))).collect();
                let cases = y.iter().sum::<f64>();
                if polymorphic(&g1) && cases > 0.0 && cases < 150.0 {
                    break (g1, g2, y);
                }
            };
            let x1 = DesignMatrix::with_genotype(g1);
            let x2 = DesignMatrix::with_genotype(g2);
            let p1 = LogisticPrior::g_prior(&x1, 1.0).unwrap();
            let p2 = LogisticPrior::g_prior(&x2, 1.0).unwrap();
            let q1 = LogisticPosterior::new(&x1, &y, p1.clone()).unwrap();
            let q2 = LogisticPosterior::new(&x2, &y, p2.clone()).unwrap();
            let cfg = McmcConfig::default();
            let s1 = pg_gibbs(&x1, &y, &p1, cfg, StreamId::new(seed, 0, Purpose::GibbsM1), ModelTag::M1).unwrap();
            let s2 = pg_gibbs(&x2, &y, &p2, cfg, StreamId::new(seed, 0, Purpose::GibbsM2), ModelTag::M2).unwrap();
            let ab = bridge_ratio(&s1.draws, &s2.draws, &q1, &q2).unwrap();
            let ba = bridge_ratio(&s2.draws, &s1.draws, &q2, &q1).unwrap();
            prop_assert!((ab.log_value + ba.log_value).abs() < 0.03);
            Ok(())
        })
        .map_err(|e| format!("bridge antisymmetry: {e}"))
}

/// PG(1, c) mean and variance from the series `(1/2π²) Σ E_k / ((k-½)² + c²/4π²)`.
fn pg_series_moments(c: f64) -> (f64, f64) {
    let c2 = c * c / (4.0 * PI * PI);
    let (mut m, mut v) = (0.0, 0.0);
    for k in 1..=1_000_000 {
        let d = (k as f64 - 0.5).powi(2) + c2;
        m += 1.0 / d;
        v += 1.0 / (d * d);
    }
    (m / (2.0 * PI * PI), v / (4.0 * PI.powi(4)))
}

fn pg_moments() -> Result<(), String> {
    runner(6)
        .run(&(0.0f64..6.0), |c| {
            let mut rng = ChaCha8Rng::seed_from_u64(c.to_bits());
            let draws: Vec<f64> = (0..100_000).map(|_| sample_polya_gamma(c, &mut rng)).collect();
            let n = draws.len() as f64;
            let m = draws.iter().sum::<f64>() / n;
            let v = draws.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
            let (tm, tv) = pg_series_moments(c);
            let m4 = draws.iter().map(|x| (x - m).powi(4)).sum::<f64>() / n;
            prop_assert!((m - tm).abs() < 4.0 * (tv / n).sqrt(), "mean {} vs {}", m, tm);
            prop_assert!((v - tv).abs() < 4.0 * ((m4 - v * v) / n).sqrt(), "var {} vs {}", v, tv);
            Ok(())
        })
        .map_err(|e| format!("Polya-Gamma moments: {e}"))
}

fn criterion_9() -> Outcome {
    let checks: [(&str, fn() -> Result<(), String>); 5] = [
        ("rescale", rescale_invariance),
        ("flip", flip_invariance),
        ("hpd-mass", hpd_mass),
        ("bridge", bridge_self_consistency),
        ("pg-moments", pg_moments),
    ];
    let mut failed = Vec::new();
    for (name, f) in checks {
        if let Err(e) = f() {
            failed.push(format!("{name}: {e}"));
        }
    }
    if failed.is_empty() {
        Ok("rescale, flip, hpd-mass, bridge and pg-moments properties hold".into())
    } else {
        Err(failed.join("; "))
    }
}

fn write_large_panel(dir: &Path, n: usize, k: usize) -> (std::path::PathBuf, std::path::PathBuf) {
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let male: Vec<bool> = (0..n).map(|i| i % 2 == 0).collect();
    let snps: Vec<(String, Vec<u8>)> = (0..k)
        .map(|j| {
            let p = rng.random_range(0.02..0.98);
            (format!("rs{j}"), common::random_genotypes(n, p, p, &mut rng).1)
        })
        .collect();
    let y: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    common::write_panel(dir, &male, &y, &snps)
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (pheno, geno) = write_large_panel(dir.path(), 3199, 14_000);
    let mut outputs = Vec::new();
    let mut timings = Vec::new();
    for threads in [8, 1] {
        let start = Instant::now();
        let data = load_dataset(&pheno, &geno).map_err(|e| e.to_string())?;
        let config = ScanConfig {
            pheno_path: pheno.clone(),
            geno_path: geno.clone(),
            out_prefix: dir.path().join("out"),
            trait_type: TraitType::Linear,
            seed: 10,
            threads,
            ..ScanConfig::default()
        };
        let rows = scan(&data, &config).map_err(|e| e.to_string())?;
        let files = emit_outputs(&rows, &config, data.n_individuals()).map_err(|e| e.to_string())?;
        timings.push((threads, start.elapsed().as_secs_f64()));
        let bytes: Vec<Vec<u8>> = files.iter().map(|f| std::fs::read(f).unwrap()).collect();
        outputs.push(bytes);
    }
    let same = outputs[0] == outputs[1];
    let fast = timings[0].1 < 60.0;
    check(
        same && fast,
        format!(
            "14000 SNPs, n=3199: {:.1} s on 8 threads, {:.1} s on 1 thread ({} cores available); outputs identical: {same}",
            timings[0].1,
            timings[1].1,
            std::thread::available_parallelism().map_or(1, |n| n.get())
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("linear Bayes factor table", criterion_1),
        ("EV = 0.05 Bayes factors", criterion_2),
        ("linear null calibration", criterion_3),
        ("g-prior BF12 calibration", criterion_4),
        ("linear oracle equivalence", criterion_5),
        ("logistic oracle equivalence", criterion_6),
        ("logistic simulation", criterion_7),
        ("Zmax correctness", criterion_8),
        ("invariance properties", criterion_9),
        ("scan speed and determinism", criterion_10),
    ];
    let only: Option<usize> = std::env::var("XBMA_ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failures = 0;
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(d) => println!("criterion {:>2} PASS [{name}] ({secs:.1} s) {d}", i + 1),
            Err(d) => {
                failures += 1;
                println!("criterion {:>2} FAIL [{name}] ({secs:.1} s) {d}", i + 1);
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
