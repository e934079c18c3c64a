use serde::{Deserialize, Serialize};

use crate::data::ENZYME_ROWS;
use crate::sequence::{reverse_complement, Alphabet, NucleotideSequence};
use crate::{Error, Result};

pub const MIN_SITE_LENGTH: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestrictionEnzyme {
    name: String,
    site: String,
    cut_offset: usize,
}

impl RestrictionEnzyme {
    /// Palindromic site of at least four bases with the top-strand cut inside it.
    pub fn new(name: &str, site: &str, cut_offset: usize) -> Result<Self> {
        let seq = NucleotideSequence::dna(site)
            .map_err(|_| Error::validation("recognition_site", "must be DNA"))?;
        if seq.len() < MIN_SITE_LENGTH {
            return Err(Error::validation(
                "recognition_site",
                format!("shorter than {MIN_SITE_LENGTH} bases"),
            ));
        }
        if reverse_complement(&seq) != seq {
            return Err(Error::validation("recognition_site", "must be palindromic"));
        }
        if cut_offset > seq.len() {
            return Err(Error::validation("cut_offset", "lies outside the site"));
        }
        Ok(RestrictionEnzyme {
            name: name.to_owned(),
            site: seq.as_str().to_owned(),
            cut_offset,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn site(&self) -> &str {
        &self.site
    }

    pub fn cut_offset(&self) -> usize {
        self.cut_offset
    }
}

/// Built-in enzyme set.
pub fn catalogue() -> Vec<RestrictionEnzyme> {
    ENZYME_ROWS
        .iter()
        .map(|(n, s, c)| RestrictionEnzyme::new(n, s, *c).expect("catalogue enzyme"))
        .collect()
}

/// Looks up a catalogue enzyme by name, ignoring case.
pub fn enzyme(name: &str) -> Option<RestrictionEnzyme> {
    catalogue()
        .into_iter()
        .find(|e| e.name.eq_ignore_ascii_case(name))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestrictionSite {
    pub enzyme: String,
    /// 1-based position of the first base of the recognition site.
    pub position: usize,
    /// Number of bases left of the top-strand cut.
    pub cut_position: usize,
}

/// Every occurrence of every site, overlaps included, ordered by position
/// then enzyme name.
pub fn restriction_map(
    dna: &NucleotideSequence,
    enzymes: &[RestrictionEnzyme],
) -> Result<Vec<RestrictionSite>> {
    if dna.alphabet() != Alphabet::Dna {
        return Err(Error::validation("sequence", "restriction mapping needs DNA"));
    }
    let hay = dna.as_bytes();
    let mut sites = Vec::new();
    for e in enzymes {
        let needle = e.site.as_bytes();
        if needle.len() > hay.len() {
            continue;
        }
        for (i, w) in hay.windows(needle.len()).enumerate() {
            if w == needle {
                sites.push(RestrictionSite {
                    enzyme: e.name.clone(),
                    position: i + 1,
                    cut_position: i + e.cut_offset,
                });
            }
        }
    }
    sites.sort_by(|a, b| a.position.cmp(&b.position).then_with(|| a.enzyme.cmp(&b.enzyme)));
    Ok(sites)
}
