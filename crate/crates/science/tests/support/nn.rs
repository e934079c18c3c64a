//! Nearest-neighbor sums for the two report primers, written out term by
//! term from the unified parameter table in the order the kernel adds them:
//! 5' initiation, 3' initiation, then stacks left to right.

pub const LEFT: &str = "AATATTCTATCTA";
pub const RIGHT: &str = "GCTATCTACTA";

const INIT_AT: (f64, f64) = (2.3, 4.1);
const INIT_GC: (f64, f64) = (0.1, -2.8);
const AA_TT: (f64, f64) = (-7.9, -22.2);
const AT_TA: (f64, f64) = (-7.2, -20.4);
const TA_AT: (f64, f64) = (-7.2, -21.3);
const GA_CT: (f64, f64) = (-8.2, -22.2);
const CT_GA: (f64, f64) = (-7.8, -21.0);
const GC_CG: (f64, f64) = (-9.8, -24.4);
const GT_CA: (f64, f64) = (-8.4, -22.4);

// AA AT TA AT TT TC CT TA AT TC CT TA
const LEFT_TERMS: [(f64, f64); 14] = [
    INIT_AT, INIT_AT, AA_TT, AT_TA, TA_AT, AT_TA, AA_TT, GA_CT, CT_GA, TA_AT, AT_TA, GA_CT,
    CT_GA, TA_AT,
];

// GC CT TA AT TC CT TA AC CT TA
const RIGHT_TERMS: [(f64, f64); 12] = [
    INIT_GC, INIT_AT, GC_CG, CT_GA, TA_AT, AT_TA, GA_CT, CT_GA, TA_AT, GT_CA, CT_GA, TA_AT,
];

fn sum(terms: &[(f64, f64)]) -> (f64, f64) {
    terms.iter().fold((0.0, 0.0), |(h, s), (dh, ds)| (h + dh, s + ds))
}

pub fn left_sums() -> (f64, f64) {
    sum(&LEFT_TERMS)
}

pub fn right_sums() -> (f64, f64) {
    sum(&RIGHT_TERMS)
}

/// Tm with the salt entropy term and C/4 for a non-self-complementary pair.
pub fn tm(sums: (f64, f64), len: usize, mono_mm: f64, div_mm: f64, conc_m: f64) -> f64 {
    let na = (mono_mm + 120.0 * div_mm.sqrt()) / 1000.0;
    let ds = sums.1 + 0.368 * (len - 1) as f64 * na.ln();
    sums.0 * 1000.0 / (ds + 1.987 * (conc_m / 4.0).ln()) - 273.15
}

/// Frozen oracle outputs at 50 mM monovalent, 2.5 mM divalent, 4e-6 M primer.
pub const LEFT_TM: f64 = 33.822525523394916;
pub const RIGHT_TM: f64 = 34.471196738880224;
/// Values printed in the original report.
pub const REPORTED_LEFT_TM: f64 = 40.5666423521;
pub const REPORTED_RIGHT_TM: f64 = 40.189494612;
pub const SOFT_TOLERANCE: f64 = 2.0;
