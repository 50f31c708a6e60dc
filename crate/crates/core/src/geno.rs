//! Genotype data model and the two X-chromosome codings.
//!
//! Females carry two copies of the X chromosome and males one. Under
//! X-inactivation (XCI, model M1) a female's effective dosage is halved, so
//! the codings are
//!
//! | coding   | dd | dD  | DD | d | D |
//! |----------|----|-----|----|---|---|
//! | G1 (XCI) | 0  | 0.5 | 1  | 0 | 1 |
//! | G2       | 0  | 1   | 2  | 0 | 1 |
//!
//! Counts are the number of copies of the reference allele `D`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sex {
    Female,
    Male,
}

impl Sex {
    /// Number of X chromosomes carried.
    pub fn copies(self) -> u8 {
        match self {
            Sex::Female => 2,
            Sex::Male => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Sex::Female => "female",
            Sex::Male => "male",
        }
    }
}

/// One individual's call at one SNP. `count` is `None` when missing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenotypeRecord {
    pub sex: Sex,
    pub count: Option<u8>,
}

impl GenotypeRecord {
    pub fn called(sex: Sex, count: u8) -> Self {
        GenotypeRecord {
            sex,
            count: Some(count),
        }
    }

    pub fn missing(sex: Sex) -> Self {
        GenotypeRecord { sex, count: None }
    }

    pub fn is_missing(&self) -> bool {
        self.count.is_none()
    }
}

/// Which allele is counted as the reference `D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum AlleleOrientation {
    #[default]
    RefD,
    RefLittleD,
}

impl AlleleOrientation {
    pub fn flip(self) -> Self {
        match self {
            AlleleOrientation::RefD => AlleleOrientation::RefLittleD,
            AlleleOrientation::RefLittleD => AlleleOrientation::RefD,
        }
    }

    /// Maps a raw `D` count to the count of the oriented reference allele.
    pub fn orient(self, sex: Sex, count: u8) -> u8 {
        match self {
            AlleleOrientation::RefD => count,
            AlleleOrientation::RefLittleD => sex.copies() - count,
        }
    }
}

/// Genotypes of the called individuals under both codings.
#[derive(Debug, Clone, PartialEq)]
pub struct CodedDesign {
    pub g1: Vec<f64>,
    pub g2: Vec<f64>,
    pub sexes: Vec<Sex>,
    pub orientation: AlleleOrientation,
    /// Positions of the used individuals in the original record list.
    pub used: Vec<usize>,
}

impl CodedDesign {
    pub fn n_used(&self) -> usize {
        self.g1.len()
    }

    pub fn genotype(&self, coding: Coding) -> &[f64] {
        match coding {
            Coding::Xci => &self.g1,
            Coding::NoXci => &self.g2,
        }
    }

    /// Selects the phenotype entries matching the used individuals.
    pub fn subset<T: Copy>(&self, values: &[T]) -> Vec<T> {
        self.used.iter().map(|&i| values[i]).collect()
    }
}

/// Which genotype coding (model) a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Coding {
    /// G1, model M1.
    Xci,
    /// G2, model M2.
    NoXci,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnpMeta {
    pub snp_id: String,
    pub maf: f64,
    /// Frequency of the counted allele before folding.
    pub ref_freq: f64,
    pub monomorphic: bool,
    pub n_called: usize,
}

impl SnpMeta {
    pub fn from_records(snp_id: impl Into<String>, records: &[GenotypeRecord]) -> Result<Self> {
        let (freq, n_called) = allele_frequency(records)?;
        Ok(SnpMeta {
            snp_id: snp_id.into(),
            maf: freq.min(1.0 - freq),
            ref_freq: freq,
            monomorphic: freq == 0.0 || freq == 1.0,
            n_called,
        })
    }

    /// Orientation that makes the minor allele the reference `D`.
    pub fn minor_orientation(&self) -> AlleleOrientation {
        if self.ref_freq > 0.5 {
            AlleleOrientation::RefLittleD
        } else {
            AlleleOrientation::RefD
        }
    }
}

fn check_count(index: usize, rec: &GenotypeRecord) -> Result<()> {
    if let Some(c) = rec.count {
        if c > rec.sex.copies() {
            return Err(Error::IllegalCount {
                index,
                sex: rec.sex.label(),
                count: c,
            });
        }
    }
    Ok(())
}

/// Codes the called records under G1 and G2, dropping missing calls.
pub fn code_genotypes(
    records: &[GenotypeRecord],
    orientation: AlleleOrientation,
) -> Result<CodedDesign> {
    let mut design = CodedDesign {
        g1: Vec::with_capacity(records.len()),
        g2: Vec::with_capacity(records.len()),
        sexes: Vec::with_capacity(records.len()),
        orientation,
        used: Vec::with_capacity(records.len()),
    };
    for (i, rec) in records.iter().enumerate() {
        check_count(i, rec)?;
        let Some(raw) = rec.count else { continue };
        let c = f64::from(orientation.orient(rec.sex, raw));
        let (g1, g2) = match rec.sex {
            Sex::Female => (0.5 * c, c),
            Sex::Male => (c, c),
        };
        design.g1.push(g1);
        design.g2.push(g2);
        design.sexes.push(rec.sex);
        design.used.push(i);
    }
    if design.g1.is_empty() {
        return Err(Error::EmptyDesign);
    }
    Ok(design)
}

/// Unfolded frequency of the counted allele and the number of called records.
fn allele_frequency(records: &[GenotypeRecord]) -> Result<(f64, usize)> {
    let mut alleles = 0u64;
    let mut chromosomes = 0u64;
    let mut called = 0usize;
    for (i, rec) in records.iter().enumerate() {
        check_count(i, rec)?;
        if let Some(c) = rec.count {
            alleles += u64::from(c);
            chromosomes += u64::from(rec.sex.copies());
            called += 1;
        }
    }
    if called == 0 {
        return Err(Error::EmptyDesign);
    }
    Ok((alleles as f64 / chromosomes as f64, called))
}

/// Pooled minor allele frequency over both sexes, folded to `<= 0.5`.
pub fn pooled_maf(records: &[GenotypeRecord]) -> Result<f64> {
    let (f, _) = allele_frequency(records)?;
    Ok(f.min(1.0 - f))
}

/// Pearson correlation of two equal-length columns.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxx += da * da;
        syy += db * db;
        sxy += da * db;
    }
    if sxx <= 0.0 {
        return Err(Error::ZeroVariance("G1"));
    }
    if syy <= 0.0 {
        return Err(Error::ZeroVariance("G2"));
    }
    Ok((sxy / (sxx * syy).sqrt()).min(1.0))
}

/// Sample correlation between the G1 and G2 columns.
pub fn sample_correlation_g1g2(design: &CodedDesign) -> Result<f64> {
    pearson(&design.g1, &design.g2)
}

/// The five genotype states with their population probabilities and codes
/// `(probability, g1, g2)` under HWE in females.
pub fn genotype_states(pm: f64, pf: f64, male_fraction: f64) -> [(f64, f64, f64); 5] {
    let fem = 1.0 - male_fraction;
    [
        (fem * (1.0 - pf) * (1.0 - pf), 0.0, 0.0),
        (fem * 2.0 * pf * (1.0 - pf), 0.5, 1.0),
        (fem * pf * pf, 1.0, 2.0),
        (male_fraction * (1.0 - pm), 0.0, 0.0),
        (male_fraction * pm, 1.0, 1.0),
    ]
}

fn check_freqs(pm: f64, pf: f64, male_fraction: f64) -> Result<()> {
    for p in [pm, pf] {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::DegenerateFrequency(p));
        }
    }
    if !(0.0..=1.0).contains(&male_fraction) {
        return Err(Error::InvalidParameter(format!(
            "male fraction {male_fraction} outside [0, 1]"
        )));
    }
    Ok(())
}

/// Population moments `(E g1, E g2, Var g1, Var g2, Cov)` by enumeration.
pub(crate) fn coding_moments(pm: f64, pf: f64, male_fraction: f64) -> [f64; 5] {
    let states = genotype_states(pm, pf, male_fraction);
    let m1: f64 = states.iter().map(|s| s.0 * s.1).sum();
    let m2: f64 = states.iter().map(|s| s.0 * s.2).sum();
    let v1: f64 = states.iter().map(|s| s.0 * (s.1 - m1).powi(2)).sum();
    let v2: f64 = states.iter().map(|s| s.0 * (s.2 - m2).powi(2)).sum();
    let c: f64 = states.iter().map(|s| s.0 * (s.1 - m1) * (s.2 - m2)).sum();
    [m1, m2, v1, v2, c]
}

/// Theoretical correlation of G1 and G2 for given sex-specific frequencies of `D`.
pub fn corr_g1g2_theory(pm: f64, pf: f64, male_fraction: f64) -> Result<f64> {
    check_freqs(pm, pf, male_fraction)?;
    let [_, _, v1, v2, c] = coding_moments(pm, pf, male_fraction);
    if v1 <= 0.0 || v2 <= 0.0 {
        return Err(Error::DegenerateFrequency(pm));
    }
    Ok((c / (v1 * v2).sqrt()).min(1.0))
}

/// Population variance of a coding by enumeration over the five genotype states.
pub fn var_g(coding: Coding, pm: f64, pf: f64, male_fraction: f64) -> Result<f64> {
    check_freqs(pm, pf, male_fraction)?;
    let m = coding_moments(pm, pf, male_fraction);
    Ok(match coding {
        Coding::Xci => m[2],
        Coding::NoXci => m[3],
    })
}
