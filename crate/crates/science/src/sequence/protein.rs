use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::data::{self, ChargeSign, PKA_SET, STANDARD_RESIDUES, STRUCTURE};
use crate::{Error, Result};

pub const FLEXIBILITY_WINDOW: usize = 9;
/// Centre-weighted coefficients for window offsets 4,3,2,1 from the centre.
const FLEXIBILITY_WEIGHTS: [f64; 4] = [0.25, 0.4375, 0.625, 0.8125];
pub const PI_CHARGE_TOLERANCE: f64 = 1e-4;
pub const PI_MAX_ITERATIONS: usize = 100;
const PH_RANGE: (f64, f64) = (0.0, 14.0);

/// Standard one-letter residues with an optional terminal stop.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProteinSequence {
    residues: Vec<u8>,
    stop: bool,
}

impl ProteinSequence {
    pub fn parse(text: &str) -> Result<Self> {
        let mut residues: Vec<u8> = text.trim().bytes().map(|b| b.to_ascii_uppercase()).collect();
        let stop = residues.last() == Some(&b'*');
        if stop {
            residues.pop();
        }
        if residues.is_empty() {
            return Err(Error::validation("protein", "sequence is empty"));
        }
        if let Some((i, bad)) = residues
            .iter()
            .enumerate()
            .find(|(_, b)| !STANDARD_RESIDUES.contains(b))
        {
            return Err(Error::validation(
                "protein",
                format!("{:?} at position {} is not a standard residue", *bad as char, i + 1),
            ));
        }
        Ok(ProteinSequence { residues, stop })
    }

    /// Residues without the terminal stop.
    pub fn residues(&self) -> &[u8] {
        &self.residues
    }

    pub fn has_stop(&self) -> bool {
        self.stop
    }

    pub(crate) fn as_bytes_with_stop(&self) -> Vec<u8> {
        let mut v = self.residues.clone();
        if self.stop {
            v.push(b'*');
        }
        v
    }

    pub fn as_string(&self) -> String {
        String::from_utf8(self.as_bytes_with_stop()).expect("ascii")
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    fn count(&self, set: &[u8]) -> usize {
        self.residues.iter().filter(|r| set.contains(r)).count()
    }

    fn fraction(&self, set: &[u8]) -> f64 {
        self.count(set) as f64 / self.len() as f64
    }
}

impl fmt::Display for ProteinSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.as_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidueShare {
    pub count: usize,
    pub proportion: f64,
}

/// Per-residue counts and proportions, residues with zero count omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Composition(pub BTreeMap<char, ResidueShare>);

impl Composition {
    pub fn count(&self, residue: char) -> usize {
        self.0.get(&residue).map_or(0, |s| s.count)
    }

    pub fn proportion(&self, residue: char) -> f64 {
        self.0.get(&residue).map_or(0.0, |s| s.proportion)
    }
}

pub fn aa_composition(protein: &ProteinSequence) -> Composition {
    let mut counts = BTreeMap::<char, usize>::new();
    for &r in protein.residues() {
        *counts.entry(r as char).or_default() += 1;
    }
    let n = protein.len() as f64;
    Composition(
        counts
            .into_iter()
            .map(|(r, count)| {
                let proportion = count as f64 / n;
                (r, ResidueShare { count, proportion })
            })
            .collect(),
    )
}

/// Average residue masses plus one water, daltons.
pub fn molecular_weight(protein: &ProteinSequence) -> f64 {
    protein
        .residues()
        .iter()
        .map(|&r| data::residue_mass(r))
        .sum::<f64>()
        + data::MASSES.water
}

/// Fraction of F, W and Y.
pub fn aromaticity(protein: &ProteinSequence) -> f64 {
    protein.fraction(b"FWY")
}

/// (10/L)·Σ DIWV(x_i, x_{i+1}).
pub fn instability_index(protein: &ProteinSequence) -> Result<f64> {
    let r = protein.residues();
    if r.len() < 2 {
        return Err(Error::domain("instability index needs at least two residues"));
    }
    let sum: f64 = r.windows(2).map(|w| data::diwv(w[0], w[1])).sum();
    Ok(10.0 / r.len() as f64 * sum)
}

/// Normalised flexibility over a sliding nine-residue window; one value per
/// window, `L - 8` values in all.
pub fn flexibility_profile(protein: &ProteinSequence) -> Result<Vec<f64>> {
    let r = protein.residues();
    if r.len() < FLEXIBILITY_WINDOW {
        return Err(Error::domain(format!(
            "flexibility needs at least {FLEXIBILITY_WINDOW} residues"
        )));
    }
    let norm = 1.0 + 2.0 * FLEXIBILITY_WEIGHTS.iter().sum::<f64>();
    let centre = FLEXIBILITY_WINDOW / 2;
    Ok(r.windows(FLEXIBILITY_WINDOW)
        .map(|w| {
            let mut score = data::flexibility(w[centre]);
            for (j, weight) in FLEXIBILITY_WEIGHTS.iter().enumerate() {
                let front = data::flexibility(w[j]);
                let back = data::flexibility(w[FLEXIBILITY_WINDOW - 1 - j]);
                score += (front + back) * weight;
            }
            score / norm
        })
        .collect())
}

/// Henderson-Hasselbalch net charge at `ph`.
pub fn net_charge(protein: &ProteinSequence, ph: f64) -> f64 {
    let pka = &*PKA_SET;
    let positive = |pk: f64| 1.0 / (1.0 + 10f64.powf(ph - pk));
    let negative = |pk: f64| 1.0 / (1.0 + 10f64.powf(pk - ph));
    let mut charge = positive(pka.n_term) - negative(pka.c_term);
    for &(residue, sign, pk) in &pka.side_chains {
        let n = protein.count(&[residue]) as f64;
        if n == 0.0 {
            continue;
        }
        charge += n * match sign {
            ChargeSign::Positive => positive(pk),
            ChargeSign::Negative => -negative(pk),
        };
    }
    charge
}

/// pH of zero net charge by bisection over [0, 14].
pub fn isoelectric_point(protein: &ProteinSequence) -> Result<f64> {
    let (mut lo, mut hi) = PH_RANGE;
    if net_charge(protein, lo) < 0.0 || net_charge(protein, hi) > 0.0 {
        return Err(Error::domain("isoelectric point lies outside pH 0-14"));
    }
    let mut mid = (lo + hi) / 2.0;
    for _ in 0..PI_MAX_ITERATIONS {
        mid = (lo + hi) / 2.0;
        let charge = net_charge(protein, mid);
        if charge.abs() < PI_CHARGE_TOLERANCE {
            break;
        }
        if charge > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructureFractions {
    pub helix: f64,
    pub turn: f64,
    pub sheet: f64,
}

pub fn secondary_structure_fractions(protein: &ProteinSequence) -> StructureFractions {
    let sets = &*STRUCTURE;
    StructureFractions {
        helix: protein.fraction(&sets.helix),
        turn: protein.fraction(&sets.turn),
        sheet: protein.fraction(&sets.sheet),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProteinReport {
    pub sequence: String,
    pub length: usize,
    pub composition: Composition,
    pub molecular_weight: f64,
    pub aromaticity: f64,
    /// Absent for single residues.
    pub instability_index: Option<f64>,
    /// Absent below the window length.
    pub flexibility_profile: Option<Vec<f64>>,
    pub isoelectric_point: f64,
    pub secondary_structure_fractions: StructureFractions,
}

impl ProteinReport {
    pub fn analyze(protein: &ProteinSequence) -> Result<Self> {
        Ok(ProteinReport {
            sequence: protein.as_string(),
            length: protein.len(),
            composition: aa_composition(protein),
            molecular_weight: molecular_weight(protein),
            aromaticity: aromaticity(protein),
            instability_index: instability_index(protein).ok(),
            flexibility_profile: flexibility_profile(protein).ok(),
            isoelectric_point: isoelectric_point(protein)?,
            secondary_structure_fractions: secondary_structure_fractions(protein),
        })
    }
}
