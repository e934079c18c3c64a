use rusqlite::{params, Connection, OptionalExtension, Transaction};

use crate::model::{AuditKind, Table};
use crate::time::Timestamp;
use crate::Result;

pub(crate) const SCHEMA_VERSION: &str = "1";

const SCHEMA: &str = "
CREATE TABLE IF NOT EXISTS meta (
    key TEXT PRIMARY KEY,
    value TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS counters (
    name TEXT PRIMARY KEY,
    high_water INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS notebooks (
    id INTEGER PRIMARY KEY,
    title TEXT NOT NULL,
    creator TEXT NOT NULL,
    created_utc INTEGER NOT NULL,
    archived INTEGER NOT NULL DEFAULT 0
);
CREATE TABLE IF NOT EXISTS entries (
    id INTEGER PRIMARY KEY,
    notebook_id INTEGER NOT NULL REFERENCES notebooks(id),
    title TEXT NOT NULL,
    description TEXT NOT NULL,
    keywords TEXT NOT NULL,
    file_name TEXT,
    file_digest TEXT,
    file_size INTEGER,
    file_path TEXT,
    author TEXT NOT NULL,
    created_utc INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS comments (
    id INTEGER PRIMARY KEY,
    entry_id INTEGER NOT NULL REFERENCES entries(id),
    text TEXT NOT NULL,
    file_name TEXT,
    file_digest TEXT,
    file_size INTEGER,
    file_path TEXT,
    author TEXT NOT NULL,
    created_utc INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS notarizations (
    id INTEGER PRIMARY KEY,
    entry_id INTEGER NOT NULL REFERENCES entries(id),
    notary TEXT NOT NULL,
    created_utc INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS results (
    id INTEGER PRIMARY KEY,
    owner TEXT NOT NULL,
    kind TEXT NOT NULL CHECK (kind IN ('primer', 'sequence')),
    payload TEXT NOT NULL,
    created_utc INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS users (
    id INTEGER PRIMARY KEY,
    username TEXT NOT NULL UNIQUE,
    password_digest TEXT NOT NULL,
    salt TEXT NOT NULL,
    iterations INTEGER NOT NULL,
    password_changed_utc INTEGER NOT NULL,
    authorized INTEGER NOT NULL,
    created_utc INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS login_counters (
    username TEXT PRIMARY KEY,
    consecutive_failures INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS sessions (
    token_digest TEXT PRIMARY KEY,
    username TEXT NOT NULL,
    issued_utc INTEGER NOT NULL,
    expires_utc INTEGER NOT NULL,
    revoked INTEGER NOT NULL DEFAULT 0
);
CREATE TABLE IF NOT EXISTS audit_events (
    id INTEGER PRIMARY KEY,
    kind TEXT NOT NULL,
    actor TEXT NOT NULL,
    target TEXT,
    detail TEXT NOT NULL,
    utc INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS signatures (
    id INTEGER PRIMARY KEY,
    record_kind TEXT NOT NULL,
    record_id INTEGER NOT NULL,
    md5 TEXT NOT NULL,
    sha1 TEXT NOT NULL,
    sha224 TEXT NOT NULL,
    sha256 TEXT NOT NULL,
    sha384 TEXT NOT NULL,
    sha512 TEXT NOT NULL,
    batch_id INTEGER NOT NULL,
    generated_utc INTEGER NOT NULL,
    actor TEXT NOT NULL
);
CREATE INDEX IF NOT EXISTS signatures_by_record ON signatures(record_kind, record_id, batch_id);
CREATE INDEX IF NOT EXISTS entries_by_notebook ON entries(notebook_id);
CREATE INDEX IF NOT EXISTS comments_by_entry ON comments(entry_id);
";

/// Tables whose rows may never change or disappear.
const FROZEN: [&str; 6] = ["entries", "comments", "notarizations", "results", "audit_events", "signatures"];

fn guards() -> String {
    let mut sql = String::new();
    for t in FROZEN {
        sql.push_str(&format!(
            "CREATE TRIGGER IF NOT EXISTS {t}_no_update BEFORE UPDATE ON {t} \
             BEGIN SELECT RAISE(ABORT, '{t} are append-only'); END;\n\
             CREATE TRIGGER IF NOT EXISTS {t}_no_delete BEFORE DELETE ON {t} \
             BEGIN SELECT RAISE(ABORT, '{t} are append-only'); END;\n"
        ));
    }
    sql.push_str(
        "CREATE TRIGGER IF NOT EXISTS notebooks_no_update BEFORE UPDATE OF id, title, creator, created_utc ON notebooks \
         BEGIN SELECT RAISE(ABORT, 'only the archived flag of a notebook may change'); END;\n\
         CREATE TRIGGER IF NOT EXISTS notebooks_no_delete BEFORE DELETE ON notebooks \
         BEGIN SELECT RAISE(ABORT, 'notebooks are never deleted'); END;\n\
         CREATE TRIGGER IF NOT EXISTS users_no_delete BEFORE DELETE ON users \
         BEGIN SELECT RAISE(ABORT, 'users are never deleted'); END;\n\
         CREATE TRIGGER IF NOT EXISTS users_no_rename BEFORE UPDATE OF id, username, created_utc ON users \
         BEGIN SELECT RAISE(ABORT, 'user identity is immutable'); END;\n",
    );
    sql
}

pub(crate) fn open_connection(path: &std::path::Path) -> Result<Connection> {
    let conn = Connection::open(path)?;
    conn.busy_timeout(std::time::Duration::from_secs(30))?;
    conn.pragma_update(None, "journal_mode", "WAL")?;
    conn.pragma_update(None, "synchronous", "FULL")?;
    conn.pragma_update(None, "foreign_keys", "ON")?;
    Ok(conn)
}

pub(crate) fn init_schema(conn: &mut Connection) -> Result<()> {
    let tx = conn.transaction()?;
    tx.execute_batch(SCHEMA)?;
    tx.execute_batch(&guards())?;
    tx.execute(
        "INSERT OR IGNORE INTO meta(key, value) VALUES ('schema_version', ?1)",
        [SCHEMA_VERSION],
    )?;
    for t in Table::ALL {
        tx.execute(
            "INSERT OR IGNORE INTO counters(name, high_water) VALUES (?1, 0)",
            [t.name()],
        )?;
    }
    tx.execute(
        "INSERT OR IGNORE INTO counters(name, high_water) VALUES ('signature_batches', 0)",
        [],
    )?;
    tx.commit()?;
    Ok(())
}

/// Open write transaction whose clock reading is already fixed.
pub(crate) struct Tx<'c> {
    pub tx: Transaction<'c>,
    pub now: Timestamp,
}

impl<'c> Tx<'c> {
    pub fn next_id(&self, counter: &str) -> Result<i64> {
        Ok(self.tx.query_row(
            "UPDATE counters SET high_water = high_water + 1 WHERE name = ?1 RETURNING high_water",
            [counter],
            |r| r.get(0),
        )?)
    }

    pub fn audit(&self, kind: AuditKind, actor: &str, target: Option<&str>, detail: &str) -> Result<i64> {
        let id = self.next_id(Table::AuditEvents.name())?;
        self.tx.execute(
            "INSERT INTO audit_events(id, kind, actor, target, detail, utc) VALUES (?1, ?2, ?3, ?4, ?5, ?6)",
            params![id, kind.as_str(), actor, target, detail, self.now.micros()],
        )?;
        Ok(id)
    }

    pub fn meta(&self, key: &str) -> Result<Option<String>> {
        Ok(self
            .tx
            .query_row("SELECT value FROM meta WHERE key = ?1", [key], |r| r.get(0))
            .optional()?)
    }

    pub fn set_meta(&self, key: &str, value: &str) -> Result<()> {
        self.tx.execute(
            "INSERT INTO meta(key, value) VALUES (?1, ?2) ON CONFLICT(key) DO UPDATE SET value = excluded.value",
            [key, value],
        )?;
        Ok(())
    }
}

pub(crate) fn high_water(conn: &Connection, table: Table) -> Result<Option<i64>> {
    Ok(conn
        .query_row(
            "SELECT high_water FROM counters WHERE name = ?1",
            [table.name()],
            |r| r.get(0),
        )
        .optional()?)
}
