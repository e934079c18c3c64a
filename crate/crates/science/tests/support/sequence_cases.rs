use cynote_science::data::STANDARD_RESIDUES;
use cynote_science::sequence::{
    back_transcribe, back_translate, catalogue, complement, net_charge, restriction_map,
    reverse_complement, transcribe, translate, NucleotideSequence, ProteinReport, ProteinSequence,
    RestrictionSite, PI_CHARGE_TOLERANCE,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn random_dna(rng: &mut StdRng, len: usize) -> String {
    (0..len).map(|_| b"ACGT"[rng.gen_range(0..4)] as char).collect()
}

pub fn random_protein(rng: &mut StdRng, len: usize) -> String {
    let mut s: String = (0..len)
        .map(|_| STANDARD_RESIDUES[rng.gen_range(0..STANDARD_RESIDUES.len())] as char)
        .collect();
    if rng.gen_bool(0.3) {
        s.push('*');
    }
    s
}

/// Substring scan at every offset for every catalogue enzyme.
pub fn naive_sites(dna: &str) -> Vec<RestrictionSite> {
    let mut out = Vec::new();
    for e in catalogue() {
        let site = e.site();
        for i in 0..dna.len() {
            if dna[i..].starts_with(site) {
                out.push(RestrictionSite {
                    enzyme: e.name().to_owned(),
                    position: i + 1,
                    cut_position: i + e.cut_offset(),
                });
            }
        }
    }
    out.sort_by(|a, b| (a.position, &a.enzyme).cmp(&(b.position, &b.enzyme)));
    out
}

pub fn check_nucleotide_laws(dna: &str) -> Result<(), String> {
    let s = NucleotideSequence::dna(dna).map_err(|e| e.to_string())?;
    if complement(&complement(&s)) != s {
        return Err(format!("complement is not an involution on {dna}"));
    }
    if reverse_complement(&reverse_complement(&s)) != s {
        return Err(format!("reverse complement is not an involution on {dna}"));
    }
    let rna = transcribe(&s).map_err(|e| e.to_string())?;
    if back_transcribe(&rna).map_err(|e| e.to_string())? != s {
        return Err(format!("transcription does not round-trip on {dna}"));
    }
    if complement(&rna) != transcribe(&complement(&s)).unwrap() {
        return Err(format!("RNA complement disagrees with DNA on {dna}"));
    }
    if restriction_map(&s, &catalogue()).map_err(|e| e.to_string())? != naive_sites(dna) {
        return Err(format!("restriction map disagrees with substring scan on {dna}"));
    }
    Ok(())
}

pub fn check_protein_laws(text: &str) -> Result<(), String> {
    let p = ProteinSequence::parse(text).map_err(|e| e.to_string())?;
    let dna = back_translate(&p);
    let t = translate(&dna, true);
    if t.protein != p.as_string() || t.partial_codon {
        return Err(format!("back translation does not round-trip on {text}"));
    }
    let report = match ProteinReport::analyze(&p) {
        Ok(r) => r,
        Err(e) => return Err(format!("{text}: {e}")),
    };
    let total: f64 = report.composition.0.values().map(|s| s.proportion).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(format!("composition proportions sum to {total} on {text}"));
    }
    let f = report.secondary_structure_fractions;
    let unit = 0.0..=1.0;
    if !(unit.contains(&f.helix) && unit.contains(&f.turn) && unit.contains(&f.sheet))
        || !unit.contains(&report.aromaticity)
    {
        return Err(format!("fraction outside [0, 1] on {text}"));
    }
    let residual = net_charge(&p, report.isoelectric_point).abs();
    if residual >= PI_CHARGE_TOLERANCE {
        return Err(format!("pI residual {residual} on {text}"));
    }
    Ok(())
}

/// Runs every law over `count` random DNA and protein sequences.
pub fn run_random(count: usize, seed: u64) -> Result<usize, String> {
    let mut rng = StdRng::seed_from_u64(seed);
    for _ in 0..count {
        let len = rng.gen_range(1..=300);
        check_nucleotide_laws(&random_dna(&mut rng, len))?;
        let len = rng.gen_range(1..=150);
        check_protein_laws(&random_protein(&mut rng, len))?;
    }
    Ok(count)
}
