//! Genome-scan driver: input parsing, the per-SNP pipeline, ranking and
//! output files.
//!
//! Phenotypes are a tab-separated file with header `iid sex y` (`sex` is `F`
//! or `M`). Genotypes are a tab-separated file with header
//! `iid <snp_1> ... <snp_K>` and entries `0`, `1`, `2` or `NA` counting the
//! reference allele; males carry at most one copy.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::bma::{bma_pool_samples, hpd_exact, hpd_from_samples, mode_from_samples, posterior_mode, MixtureT};
use crate::error::{Error, Result};
use crate::geno::{code_genotypes, GenotypeRecord, Sex, SnpMeta};
use crate::linear::{analyze_linear, beta_posterior, DesignMatrix, NigPrior};
use crate::logistic::{bf_logistic_with_null, fit_null_logistic, McmcConfig, NullFit};
use crate::rng::{Purpose, StreamId};
use crate::zmax::{wald_stats, zmax_pvalue};
use crate::TraitType;

const MISSING: u8 = u8::MAX;
/// Task index reserved for the shared null-model fit of binary scans.
const SHARED_NULL_TASK: u64 = (1 << 56) - 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub iids: Vec<String>,
    pub sexes: Vec<Sex>,
    pub y: Vec<f64>,
    pub snp_ids: Vec<String>,
    /// Per SNP, reference-allele counts aligned with `iids`; `u8::MAX` is missing.
    pub genotypes: Vec<Vec<u8>>,
}

impl Dataset {
    pub fn n_individuals(&self) -> usize {
        self.iids.len()
    }

    pub fn n_snps(&self) -> usize {
        self.snp_ids.len()
    }

    pub fn records(&self, snp: usize) -> Vec<GenotypeRecord> {
        self.genotypes[snp]
            .iter()
            .zip(&self.sexes)
            .map(|(&c, &sex)| GenotypeRecord {
                sex,
                count: (c != MISSING).then_some(c),
            })
            .collect()
    }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn fields(line: &str) -> Vec<&str> {
    line.split('\t').map(str::trim).collect()
}

/// Non-blank lines with 1-based line numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty())
}

fn parse_pheno(path: &Path, text: &str) -> Result<(Vec<String>, Vec<Sex>, Vec<f64>)> {
    let mut it = lines(text);
    let Some((hline, header)) = it.next() else {
        return Err(parse_err(path, 1, "empty phenotype file"));
    };
    if fields(header) != ["iid", "sex", "y"] {
        return Err(parse_err(path, hline, "header must be `iid<TAB>sex<TAB>y`"));
    }
    let (mut iids, mut sexes, mut y) = (Vec::new(), Vec::new(), Vec::new());
    let mut seen = HashSet::new();
    for (ln, line) in it {
        let f = fields(line);
        if f.len() != 3 {
            return Err(parse_err(path, ln, format!("expected 3 columns, found {}", f.len())));
        }
        if !seen.insert(f[0].to_string()) {
            return Err(parse_err(path, ln, format!("duplicate individual `{}`", f[0])));
        }
        let sex = match f[1] {
            "F" => Sex::Female,
            "M" => Sex::Male,
            s => return Err(parse_err(path, ln, format!("sex must be F or M, found `{s}`"))),
        };
        let v: f64 = f[2]
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| parse_err(path, ln, format!("phenotype `{}` is not a finite number", f[2])))?;
        iids.push(f[0].to_string());
        sexes.push(sex);
        y.push(v);
    }
    if iids.is_empty() {
        return Err(parse_err(path, hline, "no individuals"));
    }
    Ok((iids, sexes, y))
}

/// Reads and cross-validates the phenotype and genotype files. Genotype rows
/// are reordered to the phenotype order.
pub fn load_dataset(pheno_path: &Path, geno_path: &Path) -> Result<Dataset> {
    let (iids, sexes, y) = parse_pheno(pheno_path, &read(pheno_path)?)?;
    let index: HashMap<&str, usize> = iids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();

    let text = read(geno_path)?;
    let mut it = lines(&text);
    let Some((hline, header)) = it.next() else {
        return Err(parse_err(geno_path, 1, "empty genotype file"));
    };
    let head = fields(header);
    if head.first() != Some(&"iid") || head.len() < 2 {
        return Err(parse_err(geno_path, hline, "header must be `iid` followed by SNP identifiers"));
    }
    let snp_ids: Vec<String> = head[1..].iter().map(|s| s.to_string()).collect();
    let mut seen = HashSet::new();
    for id in &snp_ids {
        if id.is_empty() {
            return Err(parse_err(geno_path, hline, "empty SNP identifier"));
        }
        if !seen.insert(id.as_str()) {
            return Err(parse_err(geno_path, hline, format!("duplicate SNP `{id}`")));
        }
    }
    let n = iids.len();
    let mut genotypes = vec![vec![MISSING; n]; snp_ids.len()];
    let mut present = vec![false; n];
    for (ln, line) in it {
        let f = fields(line);
        if f.len() != head.len() {
            return Err(parse_err(
                geno_path,
                ln,
                format!("expected {} columns, found {}", head.len(), f.len()),
            ));
        }
        let Some(&row) = index.get(f[0]) else {
            return Err(parse_err(geno_path, ln, format!("individual `{}` is not in the phenotype file", f[0])));
        };
        if std::mem::replace(&mut present[row], true) {
            return Err(parse_err(geno_path, ln, format!("duplicate individual `{}`", f[0])));
        }
        for (k, code) in f[1..].iter().enumerate() {
            let c = match *code {
                "0" => 0,
                "1" => 1,
                "2" => 2,
                "NA" => MISSING,
                other => {
                    return Err(parse_err(
                        geno_path,
                        ln,
                        format!("SNP `{}`: genotype must be 0, 1, 2 or NA, found `{other}`", snp_ids[k]),
                    ))
                }
            };
            if c == 2 && sexes[row] == Sex::Male {
                return Err(parse_err(
                    geno_path,
                    ln,
                    format!("SNP `{}`: male `{}` cannot carry two copies", snp_ids[k], f[0]),
                ));
            }
            genotypes[k][row] = c;
        }
    }
    if let Some(i) = present.iter().position(|p| !p) {
        return Err(parse_err(
            geno_path,
            hline,
            format!("individual `{}` has phenotypes but no genotypes", iids[i]),
        ));
    }
    Ok(Dataset {
        iids,
        sexes,
        y,
        snp_ids,
        genotypes,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub pheno_path: PathBuf,
    pub geno_path: PathBuf,
    pub out_prefix: PathBuf,
    pub trait_type: TraitType,
    /// HPD regions have probability `1 - alpha`.
    pub alpha: f64,
    pub prior: NigPrior,
    pub mcmc: McmcConfig,
    pub seed: u64,
    pub threads: usize,
    pub min_maf: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            pheno_path: PathBuf::new(),
            geno_path: PathBuf::new(),
            out_prefix: PathBuf::from("xbma"),
            trait_type: TraitType::Linear,
            alpha: 0.05,
            prior: NigPrior::default(),
            mcmc: McmcConfig::default(),
            seed: 0,
            threads: 1,
            min_maf: 0.01,
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 0.5) {
            return Err(Error::InvalidParameter(format!("alpha must lie in (0, 0.5], got {}", self.alpha)));
        }
        if !(0.0..0.5).contains(&self.min_maf) {
            return Err(Error::InvalidParameter(format!("min MAF must lie in [0, 0.5), got {}", self.min_maf)));
        }
        if self.threads == 0 {
            return Err(Error::InvalidParameter("threads must be positive".into()));
        }
        if self.trait_type == TraitType::Binary && self.mcmc.samples < 100 {
            return Err(Error::InvalidParameter(format!(
                "need at least 100 MCMC samples, got {}",
                self.mcmc.samples
            )));
        }
        self.prior.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SnpStatus {
    Ok,
    /// Analyzed and ranked, with a caveat.
    Flagged(String),
    Monomorphic,
    LowMaf,
    NoCalls,
    Failed(String),
}

impl SnpStatus {
    pub fn is_analyzed(&self) -> bool {
        matches!(self, SnpStatus::Ok | SnpStatus::Flagged(_))
    }

    pub fn is_filtered(&self) -> bool {
        matches!(self, SnpStatus::Monomorphic | SnpStatus::LowMaf | SnpStatus::NoCalls)
    }

    pub fn label(&self) -> String {
        match self {
            SnpStatus::Ok => "ok".into(),
            SnpStatus::Flagged(r) => format!("flagged:{r}"),
            SnpStatus::Monomorphic => "monomorphic".into(),
            SnpStatus::LowMaf => "low_maf".into(),
            SnpStatus::NoCalls => "no_calls".into(),
            SnpStatus::Failed(r) => format!("failed:{r}"),
        }
    }
}

/// One SNP's results. Intervals and mode are mirrored to the positive side
/// when the posterior mode is negative.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    /// Position in the genotype file.
    pub index: usize,
    pub snp_id: String,
    pub maf: Option<f64>,
    pub log10_bf12: Option<f64>,
    pub log10_bfan: Option<f64>,
    pub hpd_lower: Option<f64>,
    pub hpd_upper: Option<f64>,
    pub disconnected: bool,
    pub mirrored: bool,
    pub mode: Option<f64>,
    pub pval_m1: Option<f64>,
    pub pval_m2: Option<f64>,
    pub pval_zmax: Option<f64>,
    pub rank_hpd: Option<usize>,
    pub rank_bfan: Option<usize>,
    pub status: SnpStatus,
}

impl ScanRow {
    fn empty(index: usize, snp_id: &str, status: SnpStatus) -> Self {
        ScanRow {
            index,
            snp_id: snp_id.to_string(),
            maf: None,
            log10_bf12: None,
            log10_bfan: None,
            hpd_lower: None,
            hpd_upper: None,
            disconnected: false,
            mirrored: false,
            mode: None,
            pval_m1: None,
            pval_m2: None,
            pval_zmax: None,
            rank_hpd: None,
            rank_bfan: None,
            status,
        }
    }
}

struct Bayes {
    log_bf12: f64,
    log_bfan: f64,
    hull: (f64, f64),
    disconnected: bool,
    mode: f64,
    caveat: Option<&'static str>,
}

fn linear_bayes(g1: &[f64], g2: &[f64], y: &[f64], config: &ScanConfig) -> Result<Bayes> {
    let fit = analyze_linear(g1, g2, y, &config.prior)?;
    let mix = MixtureT::from_log_bf12(beta_posterior(&fit.post1)?, beta_posterior(&fit.post2)?, fit.log_bf12);
    let region = hpd_exact(&mix, config.alpha)?;
    Ok(Bayes {
        log_bf12: fit.log_bf12,
        log_bfan: fit.log_bfan,
        hull: region.hull(),
        disconnected: region.is_disconnected(),
        mode: posterior_mode(&mix),
        caveat: None,
    })
}

fn binary_bayes(
    g1: &[f64],
    g2: &[f64],
    y: &[f64],
    config: &ScanConfig,
    task: StreamId,
    shared_null: Option<&NullFit>,
) -> Result<Bayes> {
    let own_null;
    let null = match shared_null {
        Some(n) => n,
        None => {
            own_null = fit_null_logistic(y, config.prior.lambda, config.mcmc, task)?;
            &own_null
        }
    };
    let fit = bf_logistic_with_null(
        &DesignMatrix::with_genotype(g1.to_vec()),
        &DesignMatrix::with_genotype(g2.to_vec()),
        y,
        config.prior.lambda,
        config.mcmc,
        task,
        null,
    )?;
    let pooled = bma_pool_samples(&fit.samples1, &fit.samples2, fit.log_bf12, task.with_purpose(Purpose::Pool))?;
    Ok(Bayes {
        log_bf12: fit.log_bf12,
        log_bfan: fit.log_bfan,
        hull: hpd_from_samples(&pooled, config.alpha)?,
        disconnected: false,
        mode: mode_from_samples(&pooled)?,
        caveat: (!fit.converged).then_some("bridge_not_converged"),
    })
}

fn failure_label(e: &Error) -> &'static str {
    match e {
        Error::SingularDesign => "singular_design",
        Error::DegenerateOutcome => "single_outcome_class",
        Error::AnchorDegenerate(_) => "anchor_degenerate",
        Error::NonFiniteDensity { .. } => "non_finite_density",
        Error::Numeric(_) => "numeric",
        Error::TooFewObservations { .. } => "too_few_observations",
        _ => "error",
    }
}

fn analyze_snp(
    data: &Dataset,
    snp: usize,
    config: &ScanConfig,
    shared_null: Option<&NullFit>,
) -> ScanRow {
    let id = &data.snp_ids[snp];
    let records = data.records(snp);
    let meta = match SnpMeta::from_records(id.as_str(), &records) {
        Ok(m) => m,
        Err(Error::EmptyDesign) => return ScanRow::empty(snp, id, SnpStatus::NoCalls),
        Err(e) => return ScanRow::empty(snp, id, SnpStatus::Failed(failure_label(&e).into())),
    };
    let design = match code_genotypes(&records, meta.minor_orientation()) {
        Ok(d) => d,
        Err(e) => return ScanRow::empty(snp, id, SnpStatus::Failed(failure_label(&e).into())),
    };
    let constant = design.g1.iter().all(|&g| g == design.g1[0]);
    if meta.monomorphic || constant {
        let mut row = ScanRow::empty(snp, id, SnpStatus::Monomorphic);
        row.maf = Some(meta.maf);
        return row;
    }
    if meta.maf < config.min_maf {
        let mut row = ScanRow::empty(snp, id, SnpStatus::LowMaf);
        row.maf = Some(meta.maf);
        return row;
    }
    let y = design.subset(&data.y);
    let (g1, g2) = (&design.g1, &design.g2);
    let task = StreamId::new(config.seed, snp as u64, Purpose::Data);
    let bayes = match config.trait_type {
        TraitType::Linear => linear_bayes(g1, g2, &y, config),
        TraitType::Binary => {
            let null = shared_null.filter(|_| design.n_used() == data.n_individuals());
            binary_bayes(g1, g2, &y, config, task, null)
        }
    };
    let bayes = match bayes {
        Ok(b) => b,
        Err(e) => {
            let mut row = ScanRow::empty(snp, id, SnpStatus::Failed(failure_label(&e).into()));
            row.maf = Some(meta.maf);
            return row;
        }
    };
    let mut caveats: Vec<&str> = bayes.caveat.into_iter().collect();
    let freq = wald_stats(g1, g2, &y, config.trait_type)
        .and_then(|w| Ok((w, zmax_pvalue(w.z1, w.z2, w.r)?)));
    let (p1, p2, pz) = match freq {
        Ok((w, z)) => (Some(w.p1), Some(w.p2), Some(z.pvalue)),
        Err(_) => {
            caveats.push("wald_failed");
            (None, None, None)
        }
    };
    let mirrored = bayes.mode < 0.0;
    let (lo, hi, mode) = if mirrored {
        (-bayes.hull.1, -bayes.hull.0, -bayes.mode)
    } else {
        (bayes.hull.0, bayes.hull.1, bayes.mode)
    };
    let ln10 = std::f64::consts::LN_10;
    ScanRow {
        index: snp,
        snp_id: id.clone(),
        maf: Some(meta.maf),
        log10_bf12: Some(bayes.log_bf12 / ln10),
        log10_bfan: Some(bayes.log_bfan / ln10),
        hpd_lower: Some(lo),
        hpd_upper: Some(hi),
        disconnected: bayes.disconnected,
        mirrored,
        mode: Some(mode),
        pval_m1: p1,
        pval_m2: p2,
        pval_zmax: pz,
        rank_hpd: None,
        rank_bfan: None,
        status: if caveats.is_empty() {
            SnpStatus::Ok
        } else {
            SnpStatus::Flagged(caveats.join(","))
        },
    }
}

fn validate_outcome(data: &Dataset, trait_type: TraitType) -> Result<()> {
    if trait_type == TraitType::Binary {
        if let Some(&v) = data.y.iter().find(|&&v| v != 0.0 && v != 1.0) {
            return Err(Error::NonBinaryOutcome(v));
        }
        let cases = data.y.iter().filter(|&&v| v == 1.0).count();
        if cases == 0 || cases == data.y.len() {
            return Err(Error::DegenerateOutcome);
        }
    } else if data.y.len() < 3 {
        return Err(Error::TooFewObservations { need: 3, got: data.y.len() });
    }
    Ok(())
}

/// Assigns 1-based ranks to analyzed rows, best first; ties keep input order.
fn assign_ranks(rows: &mut [ScanRow]) {
    let analyzed: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].status.is_analyzed()).collect();
    let mut by_hpd = analyzed.clone();
    by_hpd.sort_by(|&a, &b| {
        rows[b].hpd_lower.unwrap().total_cmp(&rows[a].hpd_lower.unwrap()).then(a.cmp(&b))
    });
    for (r, &i) in by_hpd.iter().enumerate() {
        rows[i].rank_hpd = Some(r + 1);
    }
    let mut by_bf = analyzed;
    by_bf.sort_by(|&a, &b| {
        rows[b].log10_bfan.unwrap().total_cmp(&rows[a].log10_bfan.unwrap()).then(a.cmp(&b))
    });
    for (r, &i) in by_bf.iter().enumerate() {
        rows[i].rank_bfan = Some(r + 1);
    }
}

/// Analyzes every SNP on a pool of `config.threads` workers. Rows come back
/// sorted by `rank_hpd`, followed by unranked SNPs in input order; the
/// result does not depend on the thread count.
pub fn scan(data: &Dataset, config: &ScanConfig) -> Result<Vec<ScanRow>> {
    config.validate()?;
    validate_outcome(data, config.trait_type)?;
    let pool = crate::thread_pool(config.threads)?;
    let shared_null = match config.trait_type {
        TraitType::Binary => Some(fit_null_logistic(
            &data.y,
            config.prior.lambda,
            config.mcmc,
            StreamId::new(config.seed, SHARED_NULL_TASK, Purpose::Data),
        )?),
        TraitType::Linear => None,
    };
    let mut rows: Vec<ScanRow> = pool.install(|| {
        (0..data.n_snps())
            .into_par_iter()
            .map(|k| analyze_snp(data, k, config, shared_null.as_ref()))
            .collect()
    });
    if !rows.iter().any(|r| r.status.is_analyzed()) {
        return Err(Error::NothingToAnalyze);
    }
    assign_ranks(&mut rows);
    rows.sort_by_key(|r| (r.rank_hpd.unwrap_or(usize::MAX), r.index));
    Ok(rows)
}

fn fmt_opt(v: Option<f64>, sci: bool) -> String {
    match v {
        None => "NA".into(),
        Some(x) if sci => format!("{x:.6e}"),
        Some(x) => format!("{x:.6}"),
    }
}

fn fmt_rank(v: Option<usize>) -> String {
    v.map_or_else(|| "NA".into(), |r| r.to_string())
}

pub const SCAN_HEADER: &str = "snp_id\tmaf\tlog10_bf12\tlog10_bfan\thpd_lower\thpd_upper\tdisconnected_flag\tmode\tpval_m1\tpval_m2\tpval_zmax\trank_hpd\trank_bfan\tstatus";

pub fn scan_tsv(rows: &[ScanRow]) -> String {
    let mut out = String::with_capacity(128 * (rows.len() + 1));
    out.push_str(SCAN_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.snp_id,
            fmt_opt(r.maf, false),
            fmt_opt(r.log10_bf12, false),
            fmt_opt(r.log10_bfan, false),
            fmt_opt(r.hpd_lower, false),
            fmt_opt(r.hpd_upper, false),
            if r.status.is_analyzed() { u8::from(r.disconnected).to_string() } else { "NA".into() },
            fmt_opt(r.mode, false),
            fmt_opt(r.pval_m1, true),
            fmt_opt(r.pval_m2, true),
            fmt_opt(r.pval_zmax, true),
            fmt_rank(r.rank_hpd),
            fmt_rank(r.rank_bfan),
            r.status.label(),
        );
    }
    out
}

/// Observed against expected `-log10 p` for each test, one block per test
/// with `m` rows each (`m` = analyzed SNPs). Missing p-values sort last.
pub fn qq_tsv(rows: &[ScanRow]) -> String {
    let analyzed: Vec<&ScanRow> = rows.iter().filter(|r| r.status.is_analyzed()).collect();
    let m = analyzed.len();
    let mut out = String::from("test\trank\texpected\tobserved\n");
    let tests: [(&str, fn(&ScanRow) -> Option<f64>); 3] = [
        ("m1", |r| r.pval_m1),
        ("m2", |r| r.pval_m2),
        ("zmax", |r| r.pval_zmax),
    ];
    for (name, get) in tests {
        let mut obs: Vec<Option<f64>> = analyzed.iter().map(|r| get(r).map(|p| -p.log10())).collect();
        obs.sort_by(|a, b| match (a, b) {
            (Some(x), Some(y)) => y.total_cmp(x),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => std::cmp::Ordering::Equal,
        });
        for (i, o) in obs.into_iter().enumerate() {
            let expected = -((i + 1) as f64 / (m + 1) as f64).log10();
            let _ = writeln!(out, "{name}\t{}\t{expected:.6}\t{}", i + 1, fmt_opt(o, false));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ScanCounts {
    pub total: usize,
    pub analyzed: usize,
    pub flagged: usize,
    pub monomorphic: usize,
    pub low_maf: usize,
    pub no_calls: usize,
    pub failed: usize,
}

impl ScanCounts {
    pub fn from_rows(rows: &[ScanRow]) -> Self {
        let mut c = ScanCounts {
            total: rows.len(),
            ..ScanCounts::default()
        };
        for r in rows {
            match r.status {
                SnpStatus::Ok => c.analyzed += 1,
                SnpStatus::Flagged(_) => {
                    c.analyzed += 1;
                    c.flagged += 1;
                }
                SnpStatus::Monomorphic => c.monomorphic += 1,
                SnpStatus::LowMaf => c.low_maf += 1,
                SnpStatus::NoCalls => c.no_calls += 1,
                SnpStatus::Failed(_) => c.failed += 1,
            }
        }
        c
    }

    pub fn filtered(&self) -> usize {
        self.monomorphic + self.low_maf + self.no_calls
    }
}

/// Run log: SNP accounting and the analysis settings. Contains nothing that
/// varies between runs (no timestamps, no thread count).
pub fn log_text(rows: &[ScanRow], config: &ScanConfig, n_individuals: usize) -> String {
    let c = ScanCounts::from_rows(rows);
    let trait_name = match config.trait_type {
        TraitType::Linear => "linear",
        TraitType::Binary => "binary",
    };
    let mut out = String::new();
    let entries: Vec<(&str, String)> = vec![
        ("pheno", config.pheno_path.display().to_string()),
        ("geno", config.geno_path.display().to_string()),
        ("out", config.out_prefix.display().to_string()),
        ("trait", trait_name.into()),
        ("alpha", config.alpha.to_string()),
        ("lambda", config.prior.lambda.to_string()),
        ("a0", config.prior.a0.to_string()),
        ("b0", config.prior.b0.to_string()),
        ("mcmc_samples", config.mcmc.samples.to_string()),
        ("burn_in", config.mcmc.burn_in.to_string()),
        ("seed", config.seed.to_string()),
        ("min_maf", config.min_maf.to_string()),
        ("individuals", n_individuals.to_string()),
        ("snps_total", c.total.to_string()),
        ("snps_analyzed", c.analyzed.to_string()),
        ("snps_flagged", c.flagged.to_string()),
        ("snps_filtered", c.filtered().to_string()),
        ("snps_filtered_monomorphic", c.monomorphic.to_string()),
        ("snps_filtered_low_maf", c.low_maf.to_string()),
        ("snps_filtered_no_calls", c.no_calls.to_string()),
        ("snps_failed", c.failed.to_string()),
    ];
    for (k, v) in entries {
        let _ = writeln!(out, "{k}\t{v}");
    }
    out
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

/// Writes `<prefix>.scan.tsv`, `<prefix>.qq.tsv` and `<prefix>.log`.
pub fn emit_outputs(rows: &[ScanRow], config: &ScanConfig, n_individuals: usize) -> Result<Vec<PathBuf>> {
    let files = [
        (".scan.tsv", scan_tsv(rows)),
        (".qq.tsv", qq_tsv(rows)),
        (".log", log_text(rows, config, n_individuals)),
    ];
    let mut written = Vec::new();
    for (suffix, body) in files {
        let path = with_suffix(&config.out_prefix, suffix);
        fs::write(&path, body).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        written.push(path);
    }
    Ok(written)
}
