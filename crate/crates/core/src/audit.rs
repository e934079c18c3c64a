//! Audit log queries.

use std::collections::BTreeMap;

use rusqlite::types::Value;
use rusqlite::Row;
use serde::{Deserialize, Serialize};

use crate::model::{AuditEvent, AuditKind};
use crate::store::{collect, Store};
use crate::time::Timestamp;
use crate::Result;

/// Every field narrows the result; `from` is inclusive and `to` exclusive.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditFilter {
    pub kind: Option<AuditKind>,
    pub actor: Option<String>,
    pub from: Option<Timestamp>,
    pub to: Option<Timestamp>,
}

pub(crate) fn map_event(r: &Row) -> rusqlite::Result<AuditEvent> {
    let kind: String = r.get("kind")?;
    Ok(AuditEvent {
        id: r.get("id")?,
        kind: kind.parse().map_err(|e: crate::Error| {
            rusqlite::Error::FromSqlConversionFailure(1, rusqlite::types::Type::Text, Box::new(e))
        })?,
        actor: r.get("actor")?,
        target: r.get("target")?,
        detail: r.get("detail")?,
        utc: Timestamp::from_micros(r.get("utc")?),
    })
}

impl Store {
    /// Matching events in id order.
    pub fn query_audit(&self, filter: &AuditFilter) -> Result<Vec<AuditEvent>> {
        let mut sql = String::from("SELECT * FROM audit_events WHERE 1 = 1");
        let mut args: Vec<Value> = Vec::new();
        if let Some(k) = filter.kind {
            args.push(Value::Text(k.as_str().to_owned()));
            sql.push_str(&format!(" AND kind = ?{}", args.len()));
        }
        if let Some(a) = &filter.actor {
            args.push(Value::Text(a.clone()));
            sql.push_str(&format!(" AND actor = ?{}", args.len()));
        }
        if let Some(t) = filter.from {
            args.push(Value::Integer(t.micros()));
            sql.push_str(&format!(" AND utc >= ?{}", args.len()));
        }
        if let Some(t) = filter.to {
            args.push(Value::Integer(t.micros()));
            sql.push_str(&format!(" AND utc < ?{}", args.len()));
        }
        sql.push_str(" ORDER BY id");
        self.read(|c| collect(c, &sql, rusqlite::params_from_iter(args), map_event))
    }

    /// Event count for every kind, zero counts included.
    pub fn audit_counts(&self) -> Result<BTreeMap<AuditKind, usize>> {
        let rows: Vec<(String, i64)> = self.read(|c| {
            collect(c, "SELECT kind, COUNT(*) FROM audit_events GROUP BY kind", [], |r| {
                Ok((r.get(0)?, r.get(1)?))
            })
        })?;
        let mut counts: BTreeMap<AuditKind, usize> = AuditKind::ALL.iter().map(|k| (*k, 0)).collect();
        for (kind, n) in rows {
            counts.insert(kind.parse()?, n as usize);
        }
        Ok(counts)
    }
}
