//! Reference tables shipped with the crate.
//!
//! Each table lives as a small tab-separated file under `data/` carrying its
//! citation and a `version:` line. Files are compiled in and parsed once on
//! first use; a malformed table is a build defect, so parsing panics.

use std::collections::BTreeMap;
use std::sync::LazyLock;

const RESIDUE_MASSES: &str = include_str!("../data/residue_masses.tsv");
const DIWV: &str = include_str!("../data/diwv.tsv");
const FLEXIBILITY: &str = include_str!("../data/flexibility.tsv");
const PKA: &str = include_str!("../data/pka.tsv");
const STRUCTURE_SETS: &str = include_str!("../data/structure_sets.tsv");
const ENZYMES: &str = include_str!("../data/enzymes.tsv");
const GENETIC_CODE: &str = include_str!("../data/genetic_code.tsv");
const NN_UNIFIED: &str = include_str!("../data/nn_unified.tsv");

/// Twenty standard residues in alphabetical one-letter order.
pub const STANDARD_RESIDUES: &[u8; 20] = b"ACDEFGHIKLMNPQRSTVWY";

fn rows(text: &'static str) -> impl Iterator<Item = Vec<&'static str>> {
    text.lines()
        .map(str::trim_end)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split('\t').collect())
}

/// `version:` value declared in a table's header comments.
pub fn table_version(text: &str) -> Option<&str> {
    text.lines()
        .filter_map(|l| l.strip_prefix('#'))
        .find_map(|l| l.trim().strip_prefix("version:"))
        .map(str::trim)
}

/// Every embedded table by file name, for inventory and version checks.
pub fn tables() -> [(&'static str, &'static str); 8] {
    [
        ("residue_masses.tsv", RESIDUE_MASSES),
        ("diwv.tsv", DIWV),
        ("flexibility.tsv", FLEXIBILITY),
        ("pka.tsv", PKA),
        ("structure_sets.tsv", STRUCTURE_SETS),
        ("enzymes.tsv", ENZYMES),
        ("genetic_code.tsv", GENETIC_CODE),
        ("nn_unified.tsv", NN_UNIFIED),
    ]
}

fn num(s: &str) -> f64 {
    s.parse()
        .unwrap_or_else(|_| panic!("bad number {s:?} in data table"))
}

fn residue(s: &str) -> u8 {
    match s.as_bytes() {
        [b] if STANDARD_RESIDUES.contains(b) => *b,
        _ => panic!("bad residue {s:?} in data table"),
    }
}

fn residue_index(b: u8) -> usize {
    STANDARD_RESIDUES
        .iter()
        .position(|&r| r == b)
        .expect("standard residue")
}

/// Residue masses indexed by `STANDARD_RESIDUES` position, plus water.
pub struct Masses {
    pub residue: [f64; 20],
    pub water: f64,
}

pub static MASSES: LazyLock<Masses> = LazyLock::new(|| {
    let mut masses = [f64::NAN; 20];
    let mut water = f64::NAN;
    for row in rows(RESIDUE_MASSES) {
        if row[0] == "water" {
            water = num(row[1]);
        } else {
            masses[residue_index(residue(row[0]))] = num(row[1]);
        }
    }
    assert!(masses.iter().all(|m| m.is_finite()) && water.is_finite());
    Masses { residue: masses, water }
});

pub fn residue_mass(b: u8) -> f64 {
    MASSES.residue[residue_index(b)]
}

pub static DIWV_TABLE: LazyLock<[[f64; 20]; 20]> = LazyLock::new(|| {
    let mut it = rows(DIWV);
    let header = it.next().expect("diwv header");
    let cols: Vec<usize> = header[1..].iter().map(|c| residue_index(residue(c))).collect();
    let mut table = [[f64::NAN; 20]; 20];
    for row in it {
        let r = residue_index(residue(row[0]));
        for (c, v) in cols.iter().zip(&row[1..]) {
            table[r][*c] = num(v);
        }
    }
    assert!(table.iter().flatten().all(|v| v.is_finite()));
    table
});

/// Instability weight of the dipeptide `first`,`second`.
pub fn diwv(first: u8, second: u8) -> f64 {
    DIWV_TABLE[residue_index(first)][residue_index(second)]
}

pub static FLEXIBILITY_TABLE: LazyLock<[f64; 20]> = LazyLock::new(|| {
    let mut t = [f64::NAN; 20];
    for row in rows(FLEXIBILITY) {
        t[residue_index(residue(row[0]))] = num(row[1]);
    }
    assert!(t.iter().all(|v| v.is_finite()));
    t
});

pub fn flexibility(b: u8) -> f64 {
    FLEXIBILITY_TABLE[residue_index(b)]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChargeSign {
    Positive,
    Negative,
}

#[derive(Debug, Clone)]
pub struct PkaSet {
    pub n_term: f64,
    pub c_term: f64,
    /// Side-chain groups: residue, sign, pKa.
    pub side_chains: Vec<(u8, ChargeSign, f64)>,
}

pub static PKA_SET: LazyLock<PkaSet> = LazyLock::new(|| {
    let mut set = PkaSet {
        n_term: f64::NAN,
        c_term: f64::NAN,
        side_chains: Vec::new(),
    };
    for row in rows(PKA) {
        let sign = match row[1] {
            "+" => ChargeSign::Positive,
            "-" => ChargeSign::Negative,
            other => panic!("bad charge sign {other:?}"),
        };
        let pka = num(row[2]);
        match row[0] {
            "Nterm" => set.n_term = pka,
            "Cterm" => set.c_term = pka,
            r => set.side_chains.push((residue(r), sign, pka)),
        }
    }
    assert!(set.n_term.is_finite() && set.c_term.is_finite());
    set
});

pub struct StructureSets {
    pub helix: Vec<u8>,
    pub turn: Vec<u8>,
    pub sheet: Vec<u8>,
}

pub static STRUCTURE: LazyLock<StructureSets> = LazyLock::new(|| {
    let mut sets = BTreeMap::new();
    for row in rows(STRUCTURE_SETS) {
        sets.insert(row[0], row[1].bytes().map(|b| residue(&(b as char).to_string())).collect());
    }
    let mut take = |k: &str| sets.remove(k).unwrap_or_else(|| panic!("missing set {k}"));
    StructureSets {
        helix: take("helix"),
        turn: take("turn"),
        sheet: take("sheet"),
    }
});

/// (name, recognition site, cut offset) rows of the enzyme catalogue.
pub static ENZYME_ROWS: LazyLock<Vec<(String, String, usize)>> = LazyLock::new(|| {
    rows(ENZYMES)
        .map(|r| (r[0].to_owned(), r[1].to_owned(), r[2].parse().expect("cut offset")))
        .collect()
});

/// Standard code: codon (DNA alphabet) to one-letter amino acid, `*` for stop.
pub static CODON_TABLE: LazyLock<BTreeMap<[u8; 3], u8>> = LazyLock::new(|| {
    let table: BTreeMap<[u8; 3], u8> = rows(GENETIC_CODE)
        .map(|r| {
            let c = r[0].as_bytes();
            ([c[0], c[1], c[2]], r[1].as_bytes()[0])
        })
        .collect();
    assert_eq!(table.len(), 64);
    table
});

/// Nearest-neighbor stacks keyed by the 5'->3' top-strand dinucleotide, plus
/// initiation terms for terminal G·C and A·T pairs. Values are (dH, dS).
pub struct NnParams {
    pub stacks: BTreeMap<[u8; 2], (f64, f64)>,
    pub init_gc: (f64, f64),
    pub init_at: (f64, f64),
}

pub static NN_PARAMS: LazyLock<NnParams> = LazyLock::new(|| {
    let mut stacks = BTreeMap::new();
    let mut init_gc = None;
    let mut init_at = None;
    for row in rows(NN_UNIFIED) {
        let v = (num(row[1]), num(row[2]));
        match row[0] {
            "init_GC" => init_gc = Some(v),
            "init_AT" => init_at = Some(v),
            key => {
                let k = key.as_bytes();
                stacks.insert([k[0], k[1]], v);
            }
        }
    }
    NnParams {
        stacks,
        init_gc: init_gc.expect("init_GC"),
        init_at: init_at.expect("init_AT"),
    }
});
