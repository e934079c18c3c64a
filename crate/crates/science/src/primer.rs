//! Primer melting/annealing temperature estimates.
//!
//! Three estimates are reported per primer: the Wallace rule, the Wallace
//! value shifted for monovalent salt relative to 50 mM, and a nearest-neighbor
//! thermodynamic melting temperature using the unified stack parameters in
//! `data/nn_unified.tsv`.

use serde::{Deserialize, Serialize};

use crate::data::NN_PARAMS;
use crate::{fmt, Error, Result};

/// Gas constant in cal/(mol·K).
pub const GAS_CONSTANT: f64 = 1.987;
/// Monovalent concentration at which the salt-corrected Wallace Tm equals the plain one.
pub const REFERENCE_MONOVALENT_MM: f64 = 50.0;
/// Coefficient of the log10 monovalent salt shift.
pub const SALT_SHIFT_PER_DECADE: f64 = 16.6;
/// Entropic salt correction coefficient per phosphate.
pub const SALT_ENTROPY_COEFF: f64 = 0.368;
/// Weight of sqrt(divalent) when folding divalent ions into a sodium equivalent.
pub const DIVALENT_WEIGHT: f64 = 120.0;
const KELVIN: f64 = 273.15;

/// Ion and strand conditions of a PCR mix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IonConditions {
    pub monovalent_mm: f64,
    pub divalent_mm: f64,
    /// Total primer strand concentration, molar.
    pub primer_concentration_m: f64,
}

impl IonConditions {
    pub fn new(monovalent_mm: f64, divalent_mm: f64, primer_concentration_m: f64) -> Result<Self> {
        let c = IonConditions {
            monovalent_mm,
            divalent_mm,
            primer_concentration_m,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let finite_non_neg = |v: f64| v.is_finite() && v >= 0.0;
        if !finite_non_neg(self.monovalent_mm) {
            return Err(Error::validation("monovalent_mm", "must be finite and non-negative"));
        }
        if !finite_non_neg(self.divalent_mm) {
            return Err(Error::validation("divalent_mm", "must be finite and non-negative"));
        }
        if !(self.primer_concentration_m.is_finite() && self.primer_concentration_m > 0.0) {
            return Err(Error::validation("primer_concentration_m", "must be finite and positive"));
        }
        Ok(())
    }

    /// Sodium-equivalent concentration, molar.
    pub fn sodium_equivalent_m(&self) -> f64 {
        (self.monovalent_mm + DIVALENT_WEIGHT * self.divalent_mm.sqrt()) / 1000.0
    }
}

/// Validated primer, uppercase over ACGT.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Primer(Vec<u8>);

impl Primer {
    pub fn parse(text: &str) -> Result<Self> {
        let seq: Vec<u8> = text.trim().bytes().map(|b| b.to_ascii_uppercase()).collect();
        if seq.is_empty() {
            return Err(Error::validation("primer", "sequence is empty"));
        }
        if let Some(bad) = seq.iter().find(|b| !matches!(b, b'A' | b'C' | b'G' | b'T')) {
            return Err(Error::validation(
                "primer",
                format!("unexpected base {:?}", *bad as char),
            ));
        }
        Ok(Primer(seq))
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn as_str(&self) -> &str {
        std::str::from_utf8(&self.0).expect("ascii")
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn gc_count(&self) -> usize {
        self.0.iter().filter(|&&b| b == b'G' || b == b'C').count()
    }
}

pub fn gc_content(sequence: &str) -> Result<f64> {
    Ok(Primer::parse(sequence)?.gc_percent())
}

pub fn tm_wallace(sequence: &str) -> Result<u32> {
    Ok(Primer::parse(sequence)?.wallace())
}

pub fn tm_salt_corrected(sequence: &str, ions: &IonConditions) -> Result<f64> {
    Primer::parse(sequence)?.salt_corrected(ions)
}

pub fn tm_nearest_neighbor(sequence: &str, ions: &IonConditions) -> Result<f64> {
    Primer::parse(sequence)?.nearest_neighbor(ions)
}

impl Primer {
    pub fn gc_percent(&self) -> f64 {
        100.0 * self.gc_count() as f64 / self.len() as f64
    }

    /// 2·(A+T) + 4·(G+C).
    pub fn wallace(&self) -> u32 {
        let gc = self.gc_count() as u32;
        let at = self.len() as u32 - gc;
        2 * at + 4 * gc
    }

    pub fn salt_corrected(&self, ions: &IonConditions) -> Result<f64> {
        ions.validate()?;
        if ions.monovalent_mm <= 0.0 {
            return Err(Error::domain("monovalent concentration must be positive"));
        }
        let shift = SALT_SHIFT_PER_DECADE * (ions.monovalent_mm / REFERENCE_MONOVALENT_MM).log10();
        Ok(f64::from(self.wallace()) + shift)
    }

    /// Summed (dH kcal/mol, dS cal/(mol·K)) at 1 M NaCl: terminal initiation
    /// for the 5' and 3' ends, then each stack left to right.
    pub fn nn_sums(&self) -> Result<(f64, f64)> {
        let s = &self.0;
        if s.len() < 2 {
            return Err(Error::domain("nearest-neighbor Tm needs at least two bases"));
        }
        let p = &*NN_PARAMS;
        let init = |b: u8| if b == b'G' || b == b'C' { p.init_gc } else { p.init_at };
        let (mut dh, mut ds) = (0.0, 0.0);
        for end in [s[0], s[s.len() - 1]] {
            let (h, e) = init(end);
            dh += h;
            ds += e;
        }
        for pair in s.windows(2) {
            let (h, e) = stack(pair[0], pair[1]);
            dh += h;
            ds += e;
        }
        Ok((dh, ds))
    }

    /// dH / (dS + R ln(C/4)) − 273.15, with dS salt-corrected by
    /// 0.368·(N−1)·ln([Na+]eq).
    pub fn nearest_neighbor(&self, ions: &IonConditions) -> Result<f64> {
        ions.validate()?;
        let na = ions.sodium_equivalent_m();
        if na <= 0.0 {
            return Err(Error::domain("no cations present"));
        }
        let (dh, mut ds) = self.nn_sums()?;
        ds += SALT_ENTROPY_COEFF * (self.len() - 1) as f64 * na.ln();
        let denom = ds + GAS_CONSTANT * (ions.primer_concentration_m / 4.0).ln();
        Ok(dh * 1000.0 / denom - KELVIN)
    }
}

fn complement(b: u8) -> u8 {
    match b {
        b'A' => b'T',
        b'T' => b'A',
        b'G' => b'C',
        _ => b'G',
    }
}

fn stack(x: u8, y: u8) -> (f64, f64) {
    let stacks = &NN_PARAMS.stacks;
    stacks
        .get(&[x, y])
        .or_else(|| stacks.get(&[complement(y), complement(x)]))
        .copied()
        .expect("all 16 stacks covered by symmetry")
}

/// Key/value block for a primer pair, in a fixed order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimerPairReport {
    pub entries: Vec<(String, String)>,
}

impl PrimerPairReport {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(k, _)| k.as_str())
    }
}

/// Keys of the report block, in emission order.
pub const REPORT_KEYS: [&str; 15] = [
    "Left primer",
    "Left primer length",
    "Left primer %GC",
    "Left primer Tm (C)",
    "Left primer Tm salt corrected (C)",
    "Left primer Tm kinetics (C)",
    "Right primer",
    "Right primer length",
    "Right primer %GC",
    "Right primer Tm (C)",
    "Right primer Tm salt corrected (C)",
    "Right primer Tm kinetics (C)",
    "Monovalent ion concentration (mM)",
    "Divalent ion concentration (mM)",
    "Primer concentration (uM)",
];

pub fn analyze_primer_pair(left: &str, right: &str, ions: &IonConditions) -> Result<PrimerPairReport> {
    ions.validate()?;
    let mut entries = Vec::with_capacity(REPORT_KEYS.len());
    for (side, text) in [("Left", left), ("Right", right)] {
        let primer = Primer::parse(text).map_err(|e| match e {
            Error::Validation { message, .. } => {
                Error::validation(format!("{} primer", side.to_lowercase()), message)
            }
            other => other,
        })?;
        let gc = fmt::real(primer.gc_percent());
        let wallace = primer.wallace().to_string();
        let salt = fmt::real(primer.salt_corrected(ions)?);
        let kinetics = fmt::real(primer.nearest_neighbor(ions)?);
        entries.push((format!("{side} primer"), primer.as_str().to_owned()));
        entries.push((format!("{side} primer length"), primer.len().to_string()));
        entries.push((format!("{side} primer %GC"), fmt::range(&gc, &gc)));
        entries.push((format!("{side} primer Tm (C)"), fmt::range(&wallace, &wallace)));
        entries.push((format!("{side} primer Tm salt corrected (C)"), fmt::range(&salt, &salt)));
        entries.push((format!("{side} primer Tm kinetics (C)"), kinetics));
    }
    entries.push((REPORT_KEYS[12].into(), fmt::real(ions.monovalent_mm)));
    entries.push((REPORT_KEYS[13].into(), fmt::real(ions.divalent_mm)));
    // Label kept as displayed; the value is molar.
    entries.push((REPORT_KEYS[14].into(), fmt::real(ions.primer_concentration_m)));
    Ok(PrimerPairReport { entries })
}
