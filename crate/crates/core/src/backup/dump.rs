//! Human-readable text dump: one CSV section per table.

use rusqlite::types::ValueRef;
use rusqlite::Connection;
use serde::{Deserialize, Serialize};

use crate::integrity::missing_ids;
use crate::model::{AuditKind, Table};
use crate::time::Timestamp;
use crate::{Error, Result};

pub const FORMAT_LINE: &str = "FORMAT cynote-dump/1";
pub const END_LINE: &str = "END";
const CRLF: &str = "\r\n";

#[derive(Clone, Copy, PartialEq, Eq)]
enum Col {
    Int,
    Text,
    Time,
    Bool,
}

fn columns(t: Table) -> &'static [(&'static str, Col)] {
    use Col::*;
    match t {
        Table::Notebooks => &[("id", Int), ("title", Text), ("creator", Text), ("created_utc", Time), ("archived", Bool)],
        Table::Entries => &[
            ("id", Int),
            ("notebook_id", Int),
            ("title", Text),
            ("description", Text),
            ("keywords", Text),
            ("file_name", Text),
            ("file_digest", Text),
            ("file_size", Int),
            ("file_path", Text),
            ("author", Text),
            ("created_utc", Time),
        ],
        Table::Comments => &[
            ("id", Int),
            ("entry_id", Int),
            ("text", Text),
            ("file_name", Text),
            ("file_digest", Text),
            ("file_size", Int),
            ("file_path", Text),
            ("author", Text),
            ("created_utc", Time),
        ],
        Table::Notarizations => &[("id", Int), ("entry_id", Int), ("notary", Text), ("created_utc", Time)],
        Table::Results => &[("id", Int), ("owner", Text), ("kind", Text), ("payload", Text), ("created_utc", Time)],
        Table::Users => &[
            ("id", Int),
            ("username", Text),
            ("password_digest", Text),
            ("salt", Text),
            ("iterations", Int),
            ("password_changed_utc", Time),
            ("authorized", Bool),
            ("created_utc", Time),
        ],
        Table::AuditEvents => &[
            ("id", Int),
            ("kind", Text),
            ("actor", Text),
            ("target", Text),
            ("detail", Text),
            ("utc", Time),
        ],
        Table::Signatures => &[
            ("id", Int),
            ("record_kind", Text),
            ("record_id", Int),
            ("md5", Text),
            ("sha1", Text),
            ("sha224", Text),
            ("sha256", Text),
            ("sha384", Text),
            ("sha512", Text),
            ("batch_id", Int),
            ("generated_utc", Time),
            ("actor", Text),
        ],
    }
}

/// One table as text cells. NULL is written as an empty cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableDump {
    pub table: Table,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl TableDump {
    pub fn ids(&self) -> Vec<i64> {
        self.rows.iter().filter_map(|r| r.first()?.parse().ok()).collect()
    }

    fn cell(&self, row: &[String], column: &str) -> Option<String> {
        let i = self.columns.iter().position(|c| c == column)?;
        row.get(i).cloned()
    }
}

/// Logical content of a dump, tables in `Table::ALL` order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Database {
    pub tables: Vec<TableDump>,
}

impl Database {
    pub fn table(&self, t: Table) -> &TableDump {
        self.tables.iter().find(|d| d.table == t).expect("every table is present")
    }

    pub fn record_count(&self) -> usize {
        self.tables.iter().map(|t| t.rows.len()).sum()
    }

    /// Gapless ids in every table, and every record named by a creation
    /// event in the audit log still present.
    pub fn check(&self) -> Result<()> {
        for t in &self.tables {
            let ids = t.ids();
            if ids.len() != t.rows.len() {
                return Err(Error::Parse(format!("{}: non-integer id", t.table.name())));
            }
            let max = ids.iter().copied().max().unwrap_or(0);
            let missing = missing_ids(&ids, max);
            if !missing.is_empty() || ids.len() as i64 != max {
                return Err(Error::Parse(format!("{}: id gap, missing {missing:?}", t.table.name())));
            }
        }
        let audit = self.table(Table::AuditEvents);
        for row in &audit.rows {
            let kind = audit.cell(row, "kind").unwrap_or_default();
            let target = audit.cell(row, "target").unwrap_or_default();
            let detail = audit.cell(row, "detail").unwrap_or_default();
            let table = match kind.parse::<AuditKind>() {
                Ok(AuditKind::NewNotebook) => Table::Notebooks,
                Ok(AuditKind::NewEntry) => Table::Entries,
                Ok(AuditKind::NewComment) => Table::Comments,
                Ok(AuditKind::Notarize) => Table::Notarizations,
                Ok(AuditKind::ResultStored) => Table::Results,
                Ok(AuditKind::NewAccount) if detail.starts_with("outcome=success") => {
                    let users = self.table(Table::Users);
                    if !users.rows.iter().any(|r| users.cell(r, "username").as_deref() == Some(&target)) {
                        return Err(Error::Parse(format!("users: account {target:?} is logged but absent")));
                    }
                    continue;
                }
                Ok(_) => continue,
                Err(_) => return Err(Error::Parse(format!("audit_events: unknown kind {kind:?}"))),
            };
            let id: Option<i64> = target.split_once(':').and_then(|(_, n)| n.parse().ok());
            let Some(id) = id else { continue };
            if !self.table(table).ids().contains(&id) {
                return Err(Error::Parse(format!(
                    "{}: id {id} is logged as created but absent",
                    table.name()
                )));
            }
        }
        Ok(())
    }
}

fn cell(v: ValueRef, col: Col) -> Result<String> {
    Ok(match (v, col) {
        (ValueRef::Null, _) => String::new(),
        (ValueRef::Integer(i), Col::Time) => Timestamp::from_micros(i).to_string(),
        (ValueRef::Integer(i), Col::Bool) => (i != 0).to_string(),
        (ValueRef::Integer(i), _) => i.to_string(),
        (ValueRef::Text(t), _) => String::from_utf8_lossy(t).into_owned(),
        (other, _) => return Err(Error::Storage(format!("unexpected column value {other:?}"))),
    })
}

/// Read-only copy of every table; run inside one read transaction.
pub(crate) fn snapshot(c: &Connection) -> Result<Database> {
    let mut tables = Vec::new();
    for t in Table::ALL {
        let cols = columns(t);
        let names: Vec<&str> = cols.iter().map(|(n, _)| *n).collect();
        let sql = format!("SELECT {} FROM {} ORDER BY id", names.join(", "), t.name());
        let mut stmt = c.prepare(&sql)?;
        let mut rows = stmt.query([])?;
        let mut out = Vec::new();
        while let Some(r) = rows.next()? {
            let mut row = Vec::with_capacity(cols.len());
            for (i, (_, kind)) in cols.iter().enumerate() {
                row.push(cell(r.get_ref(i)?, *kind)?);
            }
            out.push(row);
        }
        tables.push(TableDump {
            table: t,
            columns: names.iter().map(|s| s.to_string()).collect(),
            rows: out,
        });
    }
    Ok(Database { tables })
}

fn csv_section(t: &TableDump) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    w.write_record(&t.columns).expect("in-memory write");
    for r in &t.rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
}

pub fn render(db: &Database) -> String {
    let mut out = String::new();
    out.push_str(FORMAT_LINE);
    out.push_str(CRLF);
    for t in &db.tables {
        out.push_str(&format!("TABLE {}{CRLF}", t.table.name()));
        out.push_str(&csv_section(t));
        out.push_str(CRLF);
    }
    out.push_str(END_LINE);
    out.push_str(CRLF);
    out
}

/// Parses and checks a dump. The result is for verification only.
pub fn import(text: &str) -> Result<Database> {
    let db = parse(text)?;
    db.check()?;
    Ok(db)
}

/// Parses a dump without the gap and audit cross-checks.
pub fn parse(text: &str) -> Result<Database> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let mut next = || -> Result<Option<(u64, csv::StringRecord)>> {
        match records.next() {
            None => Ok(None),
            Some(Err(e)) => Err(Error::Parse(format!("malformed CSV: {e}"))),
            Some(Ok(r)) => Ok(Some((r.position().map(|p| p.line()).unwrap_or(0), r))),
        }
    };
    let marker = |r: &csv::StringRecord| if r.len() == 1 { Some(r[0].to_owned()) } else { None };

    match next()? {
        Some((_, r)) if marker(&r).as_deref() == Some(FORMAT_LINE) => {}
        Some((line, _)) => return Err(Error::Parse(format!("line {line}: expected {FORMAT_LINE:?}"))),
        None => return Err(Error::Parse("empty dump".into())),
    }

    let mut tables: Vec<TableDump> = Vec::new();
    let mut pending = next()?;
    loop {
        let Some((line, rec)) = pending.take() else {
            return Err(Error::Parse("truncated dump: missing END".into()));
        };
        let m = marker(&rec).ok_or_else(|| Error::Parse(format!("line {line}: expected TABLE or END")))?;
        if m == END_LINE {
            if let Some((line, _)) = next()? {
                return Err(Error::Parse(format!("line {line}: content after END")));
            }
            break;
        }
        let name = m
            .strip_prefix("TABLE ")
            .ok_or_else(|| Error::Parse(format!("line {line}: expected TABLE or END, found {m:?}")))?;
        let table: Table = name
            .parse()
            .map_err(|_| Error::Parse(format!("line {line}: unknown table {name:?}")))?;
        let expected = Table::ALL.get(tables.len()).copied();
        if expected != Some(table) {
            return Err(Error::Parse(format!(
                "line {line}: table {name:?} out of order, expected {:?}",
                expected.map(|t| t.name())
            )));
        }
        let want: Vec<&str> = columns(table).iter().map(|(n, _)| *n).collect();
        let header = match next()? {
            Some((_, h)) => h,
            None => return Err(Error::Parse(format!("truncated dump: {name} has no header"))),
        };
        if header.iter().collect::<Vec<_>>() != want {
            return Err(Error::Parse(format!("{name}: header does not match {want:?}")));
        }
        let mut rows = Vec::new();
        loop {
            pending = next()?;
            match &pending {
                Some((_, r)) if marker(r).is_some() => break,
                None => break,
                Some((line, r)) => {
                    if r.len() != want.len() {
                        return Err(Error::Parse(format!(
                            "line {line}: {name} row has {} fields, expected {}",
                            r.len(),
                            want.len()
                        )));
                    }
                    rows.push(r.iter().map(str::to_owned).collect());
                }
            }
        }
        tables.push(TableDump {
            table,
            columns: want.iter().map(|s| s.to_string()).collect(),
            rows,
        });
    }
    if tables.len() != Table::ALL.len() {
        return Err(Error::Parse(format!("dump has {} of {} tables", tables.len(), Table::ALL.len())));
    }
    Ok(Database { tables })
}
