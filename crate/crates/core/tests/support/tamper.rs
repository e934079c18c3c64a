use std::path::Path;

use cynote_core::integrity::VerificationStatus;
use cynote_core::model::{RecordKind, Table};
use cynote_core::Store;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rusqlite::types::Value;

use super::raw_unguarded;

/// Serialized columns of each signed record kind.
const ENTRY_FIELDS: [&str; 7] = ["notebook_id", "title", "description", "keywords", "file_digest", "author", "created_utc"];
const COMMENT_FIELDS: [&str; 5] = ["entry_id", "text", "file_digest", "author", "created_utc"];

fn mutate_text(rng: &mut StdRng, s: &str) -> String {
    let chars: Vec<char> = s.chars().collect();
    let i = rng.gen_range(0..chars.len());
    let mut out = chars.clone();
    loop {
        let c = rng.gen_range(0x20u8..0x7f) as char;
        if c != chars[i] {
            out[i] = c;
            break;
        }
    }
    out.into_iter().collect()
}

/// Runs `trials` random single-character or single-step edits of signed
/// records behind the store's back. Every edit must verify as tampered with
/// all six digests mismatching, and as consistent again once undone.
/// Returns the number of detected edits.
pub fn tamper_trials(store: &Store, db: &Path, trials: usize, seed: u64) -> Result<usize, String> {
    let mut rng = StdRng::seed_from_u64(seed);
    let conn = raw_unguarded(db);
    let ids = |t: &str| -> Vec<i64> {
        conn.prepare(&format!("SELECT id FROM {t}"))
            .unwrap()
            .query_map([], |r| r.get(0))
            .unwrap()
            .collect::<Result<_, _>>()
            .unwrap()
    };
    let entries = ids(Table::Entries.name());
    let comments = ids(Table::Comments.name());
    if entries.is_empty() || comments.is_empty() {
        return Err("need signed entries and comments".into());
    }
    let mut detected = 0;
    let mut done = 0;
    while done < trials {
        let (kind, table, fields, pool) = if rng.gen_bool(0.5) {
            (RecordKind::Entry, "entries", &ENTRY_FIELDS[..], &entries)
        } else {
            (RecordKind::Comment, "comments", &COMMENT_FIELDS[..], &comments)
        };
        let id = pool[rng.gen_range(0..pool.len())];
        let field = fields[rng.gen_range(0..fields.len())];
        let original: Value = conn
            .query_row(&format!("SELECT {field} FROM {table} WHERE id = ?1"), [id], |r| r.get(0))
            .unwrap();
        let changed = match &original {
            Value::Null => continue,
            Value::Text(s) if s.is_empty() => continue,
            Value::Text(s) => Value::Text(mutate_text(&mut rng, s)),
            Value::Integer(n) => Value::Integer(n + if rng.gen_bool(0.5) { 1 } else { -1 }),
            other => return Err(format!("unexpected column value {other:?}")),
        };
        let set = |v: &Value| {
            conn.execute(&format!("UPDATE {table} SET {field} = ?1 WHERE id = ?2"), rusqlite::params![v, id])
                .unwrap()
        };
        set(&changed);
        let report = store.verify_record(kind, id).map_err(|e| e.to_string())?;
        set(&original);
        done += 1;
        if report.status == VerificationStatus::Tampered && report.details.values().all(|m| !m) {
            detected += 1;
        } else {
            return Err(format!("{table}.{field} of {id} edited to {changed:?} gave {report:?}"));
        }
        let back = store.verify_record(kind, id).map_err(|e| e.to_string())?;
        if back.status != VerificationStatus::Consistent {
            return Err(format!("{table} {id} not consistent after undo: {back:?}"));
        }
    }
    Ok(detected)
}

/// Deletes one middle row and the newest row of `table` out of band and
/// returns their ids.
pub fn delete_rows(db: &Path, table: Table) -> Vec<i64> {
    let conn = raw_unguarded(db);
    let ids: Vec<i64> = conn
        .prepare(&format!("SELECT id FROM {} ORDER BY id", table.name()))
        .unwrap()
        .query_map([], |r| r.get(0))
        .unwrap()
        .collect::<Result<_, _>>()
        .unwrap();
    assert!(ids.len() >= 3, "need three rows to delete from");
    let victims = vec![ids[ids.len() / 2], *ids.last().unwrap()];
    for v in &victims {
        conn.execute(&format!("DELETE FROM {} WHERE id = ?1", table.name()), [v]).unwrap();
    }
    victims
}
