//! Nucleotide transforms, protein properties, restriction mapping and the
//! remote similarity-search client.

pub mod blast;
mod nucleotide;
mod protein;
mod restriction;

pub use nucleotide::{
    back_transcribe, back_translate, complement, reverse_complement, transcribe, translate,
    Alphabet, NucleotideSequence, Translation,
};
pub use protein::{
    aa_composition, aromaticity, flexibility_profile, instability_index, isoelectric_point,
    molecular_weight, net_charge, secondary_structure_fractions, Composition, ProteinReport,
    ProteinSequence, StructureFractions, FLEXIBILITY_WINDOW, PI_CHARGE_TOLERANCE, PI_MAX_ITERATIONS,
};
pub use restriction::{catalogue, enzyme, restriction_map, RestrictionEnzyme, RestrictionSite};
