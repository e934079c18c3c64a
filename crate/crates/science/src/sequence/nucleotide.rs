use std::collections::BTreeMap;
use std::fmt;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use crate::data::CODON_TABLE;
use crate::sequence::ProteinSequence;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Alphabet {
    Dna,
    Rna,
}

/// Uppercase DNA (ACGT) or RNA (ACGU) residues.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NucleotideSequence {
    residues: Vec<u8>,
    alphabet: Alphabet,
}

impl NucleotideSequence {
    /// Validates against an explicit alphabet.
    pub fn new(text: &str, alphabet: Alphabet) -> Result<Self> {
        let residues: Vec<u8> = text.trim().bytes().map(|b| b.to_ascii_uppercase()).collect();
        let ok = |b: &u8| match alphabet {
            Alphabet::Dna => matches!(b, b'A' | b'C' | b'G' | b'T'),
            Alphabet::Rna => matches!(b, b'A' | b'C' | b'G' | b'U'),
        };
        if let Some(bad) = residues.iter().find(|b| !ok(b)) {
            return Err(Error::validation(
                "sequence",
                format!("{:?} is not a {alphabet:?} base", *bad as char),
            ));
        }
        Ok(NucleotideSequence { residues, alphabet })
    }

    pub fn dna(text: &str) -> Result<Self> {
        Self::new(text, Alphabet::Dna)
    }

    pub fn rna(text: &str) -> Result<Self> {
        Self::new(text, Alphabet::Rna)
    }

    /// RNA if the text contains U, DNA otherwise.
    pub fn detect(text: &str) -> Result<Self> {
        if text.bytes().any(|b| b.eq_ignore_ascii_case(&b'U')) {
            Self::rna(text)
        } else {
            Self::dna(text)
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.residues
    }

    pub fn as_str(&self) -> &str {
        std::str::from_utf8(&self.residues).expect("ascii")
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    fn with(&self, residues: Vec<u8>, alphabet: Alphabet) -> Self {
        NucleotideSequence { residues, alphabet }
    }
}

impl fmt::Display for NucleotideSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn complement_base(b: u8, alphabet: Alphabet) -> u8 {
    match (b, alphabet) {
        (b'A', Alphabet::Dna) => b'T',
        (b'A', Alphabet::Rna) => b'U',
        (b'T' | b'U', _) => b'A',
        (b'G', _) => b'C',
        (b'C', _) => b'G',
        _ => unreachable!("validated alphabet"),
    }
}

pub fn complement(seq: &NucleotideSequence) -> NucleotideSequence {
    let a = seq.alphabet;
    seq.with(seq.residues.iter().map(|&b| complement_base(b, a)).collect(), a)
}

pub fn reverse_complement(seq: &NucleotideSequence) -> NucleotideSequence {
    let a = seq.alphabet;
    seq.with(seq.residues.iter().rev().map(|&b| complement_base(b, a)).collect(), a)
}

/// Coding-strand transcription: T becomes U.
pub fn transcribe(dna: &NucleotideSequence) -> Result<NucleotideSequence> {
    if dna.alphabet != Alphabet::Dna {
        return Err(Error::validation("sequence", "transcription needs DNA"));
    }
    let r = dna.residues.iter().map(|&b| if b == b'T' { b'U' } else { b }).collect();
    Ok(dna.with(r, Alphabet::Rna))
}

pub fn back_transcribe(rna: &NucleotideSequence) -> Result<NucleotideSequence> {
    if rna.alphabet != Alphabet::Rna {
        return Err(Error::validation("sequence", "back transcription needs RNA"));
    }
    let r = rna.residues.iter().map(|&b| if b == b'U' { b'T' } else { b }).collect();
    Ok(rna.with(r, Alphabet::Dna))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Translation {
    /// One-letter residues; may carry `*` at any position when stops are emitted.
    pub protein: String,
    /// Set when the input length was not a multiple of three; the trailing
    /// partial codon was dropped.
    pub partial_codon: bool,
}

/// Standard-code translation. With `stop_symbol` stops are emitted as `*`
/// and translation continues; without it translation ends at the first stop.
pub fn translate(seq: &NucleotideSequence, stop_symbol: bool) -> Translation {
    let mut out = Vec::with_capacity(seq.len() / 3);
    for codon in seq.residues.chunks_exact(3) {
        let key = [dna_base(codon[0]), dna_base(codon[1]), dna_base(codon[2])];
        let aa = CODON_TABLE[&key];
        if aa == b'*' && !stop_symbol {
            break;
        }
        out.push(aa);
    }
    Translation {
        protein: String::from_utf8(out).expect("ascii"),
        partial_codon: seq.len() % 3 != 0,
    }
}

fn dna_base(b: u8) -> u8 {
    if b == b'U' {
        b'T'
    } else {
        b
    }
}

/// Lexicographically smallest codon for every amino acid and for `*`.
static PREFERRED_CODON: LazyLock<BTreeMap<u8, [u8; 3]>> = LazyLock::new(|| {
    let mut m = BTreeMap::new();
    // CODON_TABLE iterates in ascending codon order, so the first hit wins.
    for (codon, aa) in CODON_TABLE.iter() {
        m.entry(*aa).or_insert(*codon);
    }
    m
});

/// Deterministic back translation to DNA.
pub fn back_translate(protein: &ProteinSequence) -> NucleotideSequence {
    let residues = protein
        .as_bytes_with_stop()
        .iter()
        .flat_map(|aa| PREFERRED_CODON[aa])
        .collect();
    NucleotideSequence {
        residues,
        alphabet: Alphabet::Dna,
    }
}
