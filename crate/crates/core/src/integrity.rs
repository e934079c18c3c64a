//! Canonical record text, multi-hash signature batches, tamper checks and
//! gap detection.

use std::collections::{BTreeMap, BTreeSet};

use md5::Md5;
use rusqlite::{params, Connection, Row};
use serde::{Deserialize, Serialize};
use sha1::Sha1;
use sha2::{Digest, Sha224, Sha256, Sha384, Sha512};

use crate::db::{self, Tx};
use crate::model::{AuditKind, Comment, Entry, RecordKind, SignatureRecord, Table};
use crate::store::{collect, map_comment, map_entry, Store};
use crate::time::Timestamp;
use crate::{Error, Result};

pub const CANONICAL_VERSION: &str = "v1";
pub const ALGORITHMS: [&str; 6] = ["md5", "sha1", "sha224", "sha256", "sha384", "sha512"];

fn escape(v: &str) -> String {
    let mut out = String::with_capacity(v.len());
    for ch in v.chars() {
        match ch {
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

fn render(kind: RecordKind, fields: &[(&str, String)]) -> String {
    let mut lines = vec![format!("{} {CANONICAL_VERSION}", kind.as_str())];
    lines.extend(fields.iter().map(|(k, v)| format!("{k}={}", escape(v))));
    lines.join("\n")
}

fn entry_text(e: &Entry, keywords: &str) -> String {
    render(
        RecordKind::Entry,
        &[
            ("id", e.id.to_string()),
            ("notebook_id", e.notebook_id.to_string()),
            ("title", e.title.clone()),
            ("description", e.description.clone()),
            ("keywords", keywords.to_owned()),
            ("file", e.file.as_ref().map(|f| f.content_digest.clone()).unwrap_or_default()),
            ("author", e.author.clone()),
            ("created_utc", e.created_utc.to_string()),
        ],
    )
}

pub fn canonical_entry(e: &Entry) -> String {
    entry_text(e, &serde_json::to_string(&e.keywords).expect("strings serialize"))
}

pub fn canonical_comment(c: &Comment) -> String {
    render(
        RecordKind::Comment,
        &[
            ("id", c.id.to_string()),
            ("entry_id", c.entry_id.to_string()),
            ("text", c.text.clone()),
            ("file", c.file.as_ref().map(|f| f.content_digest.clone()).unwrap_or_default()),
            ("author", c.author.clone()),
            ("created_utc", c.created_utc.to_string()),
        ],
    )
}

/// Lowercase hex digests in `ALGORITHMS` order.
pub fn digests(bytes: &[u8]) -> [String; 6] {
    [
        hex::encode(Md5::digest(bytes)),
        hex::encode(Sha1::digest(bytes)),
        hex::encode(Sha224::digest(bytes)),
        hex::encode(Sha256::digest(bytes)),
        hex::encode(Sha384::digest(bytes)),
        hex::encode(Sha512::digest(bytes)),
    ]
}

/// Keyword text is taken as stored so any change to it is visible.
fn entry_canonical_row(r: &Row) -> rusqlite::Result<(i64, String)> {
    let e = map_entry(r)?;
    let raw: String = r.get("keywords")?;
    Ok((e.id, entry_text(&e, &raw)))
}

fn comment_canonical_row(r: &Row) -> rusqlite::Result<(i64, String)> {
    let c = map_comment(r)?;
    Ok((c.id, canonical_comment(&c)))
}

type CanonicalRow = fn(&Row) -> rusqlite::Result<(i64, String)>;

fn canonical_rows(c: &Connection, kind: RecordKind, id: Option<i64>) -> Result<Vec<(i64, String)>> {
    let (table, f): (&str, CanonicalRow) = match kind {
        RecordKind::Entry => ("entries", entry_canonical_row),
        RecordKind::Comment => ("comments", comment_canonical_row),
    };
    match id {
        Some(id) => collect(c, &format!("SELECT * FROM {table} WHERE id = ?1"), [id], f),
        None => collect(c, &format!("SELECT * FROM {table} ORDER BY id"), [], f),
    }
}

/// Current canonical text of a stored record.
pub(crate) fn stored_canonical(c: &Connection, kind: RecordKind, id: i64) -> Result<String> {
    canonical_rows(c, kind, Some(id))?
        .pop()
        .map(|(_, t)| t)
        .ok_or_else(|| Error::not_found(kind.as_str(), id))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureBatch {
    pub batch_id: i64,
    pub generated_utc: Timestamp,
    pub entries: usize,
    pub comments: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerificationStatus {
    Consistent,
    Tampered,
    Unsigned,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub record_kind: RecordKind,
    pub record_id: i64,
    pub status: VerificationStatus,
    pub first_divergent_batch: Option<i64>,
    pub batches_checked: usize,
    /// Match per algorithm against the first divergent batch, or against
    /// the latest batch when none diverges.
    pub details: BTreeMap<String, bool>,
}

pub(crate) fn map_signature(r: &Row) -> rusqlite::Result<SignatureRecord> {
    let kind: String = r.get("record_kind")?;
    Ok(SignatureRecord {
        id: r.get("id")?,
        record_kind: if kind == "entry" { RecordKind::Entry } else { RecordKind::Comment },
        record_id: r.get("record_id")?,
        md5: r.get("md5")?,
        sha1: r.get("sha1")?,
        sha224: r.get("sha224")?,
        sha256: r.get("sha256")?,
        sha384: r.get("sha384")?,
        sha512: r.get("sha512")?,
        batch_id: r.get("batch_id")?,
        generated_utc: Timestamp::from_micros(r.get("generated_utc")?),
        actor: r.get("actor")?,
    })
}

fn stored_digests(s: &SignatureRecord) -> [&str; 6] {
    [&s.md5, &s.sha1, &s.sha224, &s.sha256, &s.sha384, &s.sha512]
}

/// Compares fresh digests against history, oldest batch first.
pub fn compare(kind: RecordKind, id: i64, current: &[String; 6], history: &[SignatureRecord]) -> VerificationReport {
    let matches = |s: &SignatureRecord| -> [bool; 6] {
        let d = stored_digests(s);
        std::array::from_fn(|i| d[i] == current[i])
    };
    let divergent = history.iter().find(|s| matches(s).iter().any(|m| !m));
    let shown = divergent.or(history.last());
    let details = shown
        .map(|s| ALGORITHMS.iter().map(|a| a.to_string()).zip(matches(s)).collect())
        .unwrap_or_default();
    VerificationReport {
        record_kind: kind,
        record_id: id,
        status: match (history.is_empty(), divergent) {
            (true, _) => VerificationStatus::Unsigned,
            (false, Some(_)) => VerificationStatus::Tampered,
            (false, None) => VerificationStatus::Consistent,
        },
        first_divergent_batch: divergent.map(|s| s.batch_id),
        batches_checked: history.len(),
        details,
    }
}

fn history(c: &Connection, kind: RecordKind, id: i64) -> Result<Vec<SignatureRecord>> {
    collect(
        c,
        "SELECT * FROM signatures WHERE record_kind = ?1 AND record_id = ?2 ORDER BY batch_id, id",
        params![kind.as_str(), id],
        map_signature,
    )
}

/// `{1..high_water}` minus the present ids, ascending.
pub fn missing_ids(present: &[i64], high_water: i64) -> Vec<i64> {
    let present: BTreeSet<i64> = present.iter().copied().collect();
    (1..=high_water).filter(|i| !present.contains(i)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapReport {
    pub table: String,
    pub high_water: i64,
    pub present: usize,
    pub missing: Vec<i64>,
}

impl Store {
    pub fn generate_signature_batch(&self, actor: &str) -> Result<SignatureBatch> {
        self.write_logged(|tx| {
            if let Err(e) = Store::require_authorized(tx, actor) {
                tx.audit(
                    AuditKind::SignatureGeneration,
                    actor,
                    None,
                    "outcome=failure; reason=actor not authorized",
                )?;
                return Ok(Err(e));
            }
            let batch_id = tx.next_id("signature_batches")?;
            let entries = sign_all(tx, RecordKind::Entry, batch_id, actor)?;
            let comments = sign_all(tx, RecordKind::Comment, batch_id, actor)?;
            tx.audit(
                AuditKind::SignatureGeneration,
                actor,
                Some(&format!("batch:{batch_id}")),
                &format!("outcome=success; entries={entries}; comments={comments}"),
            )?;
            Ok(Ok(SignatureBatch {
                batch_id,
                generated_utc: tx.now,
                entries,
                comments,
            }))
        })
    }

    pub fn verify_record(&self, kind: RecordKind, id: i64) -> Result<VerificationReport> {
        self.read(|c| {
            let text = stored_canonical(c, kind, id)?;
            Ok(compare(kind, id, &digests(text.as_bytes()), &history(c, kind, id)?))
        })
    }

    /// Reports for every entry and comment, entries first.
    pub fn verify_all(&self) -> Result<Vec<VerificationReport>> {
        self.read(|c| {
            let mut out = Vec::new();
            for kind in [RecordKind::Entry, RecordKind::Comment] {
                for (id, text) in canonical_rows(c, kind, None)? {
                    out.push(compare(kind, id, &digests(text.as_bytes()), &history(c, kind, id)?));
                }
            }
            Ok(out)
        })
    }

    pub fn signatures(&self, kind: RecordKind, id: i64) -> Result<Vec<SignatureRecord>> {
        self.read(|c| history(c, kind, id))
    }

    pub fn canonical(&self, kind: RecordKind, id: i64) -> Result<String> {
        self.read(|c| stored_canonical(c, kind, id))
    }

    pub fn detect_sequence_gaps(&self, table: Table) -> Result<GapReport> {
        self.read(|c| gap_report(c, table))
    }
}

pub(crate) fn gap_report(c: &Connection, table: Table) -> Result<GapReport> {
    let ids: Vec<i64> = collect(c, &format!("SELECT id FROM {} ORDER BY id", table.name()), [], |r| r.get(0))?;
    let max = ids.last().copied().unwrap_or(0);
    let high_water = db::high_water(c, table)?.unwrap_or(max).max(max);
    Ok(GapReport {
        table: table.name().to_owned(),
        high_water,
        present: ids.len(),
        missing: missing_ids(&ids, high_water),
    })
}

fn sign_all(tx: &Tx, kind: RecordKind, batch_id: i64, actor: &str) -> Result<usize> {
    let rows = canonical_rows(&tx.tx, kind, None)?;
    for (id, text) in &rows {
        let [md5, sha1, sha224, sha256, sha384, sha512] = digests(text.as_bytes());
        let sig_id = tx.next_id(Table::Signatures.name())?;
        tx.tx.execute(
            "INSERT INTO signatures(id, record_kind, record_id, md5, sha1, sha224, sha256, sha384, sha512,
                batch_id, generated_utc, actor)
             VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8, ?9, ?10, ?11, ?12)",
            params![sig_id, kind.as_str(), id, md5, sha1, sha224, sha256, sha384, sha512, batch_id, tx.now.micros(), actor],
        )?;
    }
    Ok(rows.len())
}
