use std::path::Path;
use std::sync::{Arc, Mutex, MutexGuard};

use rusqlite::{params, Connection, OptionalExtension, Row};

use crate::attachments::{AttachmentStore, NewFile};
use crate::config::{Config, PasswordPolicy, MIN_KDF_ITERATIONS};
use crate::db::{self, Tx};
use crate::error::Checks;
use crate::model::{
    AnalysisResult, AuditKind, Comment, Entry, FileAttachment, Notarization, Notebook, ResultKind,
    Table,
};
use crate::time::{Clock, SystemClock, Timestamp};
use crate::{Error, Result};

pub const MAX_TITLE_LEN: usize = 500;

#[derive(Clone)]
pub struct StoreOptions {
    pub policy: PasswordPolicy,
    pub session_ttl_minutes: i64,
    pub kdf_iterations: u32,
    pub clock: Arc<dyn Clock>,
}

impl Default for StoreOptions {
    fn default() -> Self {
        StoreOptions {
            policy: PasswordPolicy::default(),
            session_ttl_minutes: 480,
            kdf_iterations: MIN_KDF_ITERATIONS,
            clock: Arc::new(SystemClock),
        }
    }
}

impl StoreOptions {
    pub fn from_config(c: &Config) -> Self {
        StoreOptions {
            policy: c.policy,
            session_ttl_minutes: c.session.ttl_minutes,
            kdf_iterations: c.store.kdf_iterations,
            clock: Arc::new(SystemClock),
        }
    }

    pub fn with_clock(mut self, clock: Arc<dyn Clock>) -> Self {
        self.clock = clock;
        self
    }
}

struct Writer {
    conn: Connection,
    last: Timestamp,
}

/// The notebook database. Writes go through one connection behind a lock so
/// ids and timestamps are assigned in a single order; reads use a small pool.
pub struct Store {
    writer: Mutex<Writer>,
    readers: Mutex<Vec<Connection>>,
    path: std::path::PathBuf,
    files: AttachmentStore,
    pub(crate) options: StoreOptions,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewEntry {
    pub notebook_id: i64,
    pub title: String,
    pub description: String,
    pub keywords: Vec<String>,
    pub file: Option<NewFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct TocRow {
    pub id: i64,
    pub title: String,
    pub created_utc: Timestamp,
}

fn lock<T>(m: &Mutex<T>) -> Result<MutexGuard<'_, T>> {
    m.lock().map_err(|_| Error::Storage("store lock poisoned".into()))
}

impl Store {
    pub fn open(path: &Path, files_dir: &Path, options: StoreOptions) -> Result<Self> {
        if options.kdf_iterations < MIN_KDF_ITERATIONS {
            return Err(Error::Config(format!("kdf_iterations below {MIN_KDF_ITERATIONS}")));
        }
        let mut conn = db::open_connection(path)?;
        db::init_schema(&mut conn)?;
        let last: i64 = conn.query_row(
            "SELECT MAX(m) FROM (
                SELECT COALESCE(MAX(utc), 0) AS m FROM audit_events
                UNION ALL SELECT COALESCE(MAX(created_utc), 0) FROM entries
                UNION ALL SELECT COALESCE(MAX(created_utc), 0) FROM comments
                UNION ALL SELECT COALESCE(MAX(created_utc), 0) FROM notebooks)",
            [],
            |r| r.get(0),
        )?;
        Ok(Store {
            writer: Mutex::new(Writer {
                conn,
                last: Timestamp::from_micros(last),
            }),
            readers: Mutex::new(Vec::new()),
            path: path.to_owned(),
            files: AttachmentStore::new(files_dir)?,
            options,
        })
    }

    pub fn open_with_config(config: &Config) -> Result<Self> {
        Self::open(&config.store.path, &config.store.files_dir, StoreOptions::from_config(config))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn files(&self) -> &AttachmentStore {
        &self.files
    }

    pub fn policy(&self) -> PasswordPolicy {
        self.options.policy
    }

    pub fn now(&self) -> Timestamp {
        self.options.clock.now()
    }

    /// Runs `f` in a write transaction. The outer result decides commit;
    /// an inner error is committed (so its audit event persists) and then
    /// returned.
    pub(crate) fn write_logged<T>(&self, f: impl FnOnce(&Tx) -> Result<Result<T>>) -> Result<T> {
        let mut w = lock(&self.writer)?;
        let now = self.options.clock.now().max(w.last);
        let outcome = {
            let tx = Tx {
                tx: w.conn.transaction()?,
                now,
            };
            let outcome = f(&tx)?;
            tx.tx.commit()?;
            outcome
        };
        w.last = now;
        outcome
    }

    pub(crate) fn write<T>(&self, f: impl FnOnce(&Tx) -> Result<T>) -> Result<T> {
        self.write_logged(|tx| f(tx).map(Ok))
    }

    /// Runs `f` inside one read transaction, giving it a consistent snapshot.
    pub(crate) fn read<T>(&self, f: impl FnOnce(&Connection) -> Result<T>) -> Result<T> {
        let conn = match lock(&self.readers)?.pop() {
            Some(c) => c,
            None => db::open_connection(&self.path)?,
        };
        conn.execute_batch("BEGIN DEFERRED")?;
        let out = f(&conn);
        conn.execute_batch("COMMIT")?;
        lock(&self.readers)?.push(conn);
        out
    }

    pub(crate) fn require_authorized(tx: &Tx, actor: &str) -> Result<()> {
        let authorized: Option<bool> = tx
            .tx
            .query_row("SELECT authorized FROM users WHERE username = ?1", [actor], |r| r.get(0))
            .optional()?;
        match authorized {
            Some(true) => Ok(()),
            Some(false) => Err(Error::Unauthorized(format!("{actor} is not an authorized user"))),
            None => Err(Error::Unauthorized(format!("{actor} is not a known user"))),
        }
    }

    pub fn create_notebook(&self, title: &str, creator: &str) -> Result<Notebook> {
        let title = title.trim();
        let mut c = Checks::default();
        c.require(!title.is_empty(), "title", "is required");
        c.require(title.len() <= MAX_TITLE_LEN, "title", "is too long");
        c.finish()?;
        self.write(|tx| {
            Self::require_authorized(tx, creator)?;
            let id = tx.next_id(Table::Notebooks.name())?;
            tx.tx.execute(
                "INSERT INTO notebooks(id, title, creator, created_utc, archived) VALUES (?1, ?2, ?3, ?4, 0)",
                params![id, title, creator, tx.now.micros()],
            )?;
            tx.audit(AuditKind::NewNotebook, creator, Some(&format!("notebook:{id}")), &format!("title={title}"))?;
            Ok(Notebook {
                id,
                title: title.to_owned(),
                creator: creator.to_owned(),
                created_utc: tx.now,
                archived: false,
            })
        })
    }

    /// Setting the flag to its current value changes nothing but is still logged.
    pub fn set_archive_state(&self, notebook_id: i64, archived: bool, actor: &str) -> Result<Notebook> {
        self.write(|tx| {
            Self::require_authorized(tx, actor)?;
            let mut nb = notebook_row(&tx.tx, notebook_id)?;
            let changed = nb.archived != archived;
            if changed {
                tx.tx.execute(
                    "UPDATE notebooks SET archived = ?1 WHERE id = ?2",
                    params![archived, notebook_id],
                )?;
            }
            nb.archived = archived;
            let kind = if archived { AuditKind::Archive } else { AuditKind::Unarchive };
            tx.audit(
                kind,
                actor,
                Some(&format!("notebook:{notebook_id}")),
                &format!("archived={archived}; changed={changed}"),
            )?;
            Ok(nb)
        })
    }

    pub fn create_entry(&self, entry: NewEntry, author: &str) -> Result<Entry> {
        let title = entry.title.trim().to_owned();
        let description = entry.description.trim().to_owned();
        let keywords: Vec<String> = entry
            .keywords
            .iter()
            .map(|k| k.trim().to_owned())
            .filter(|k| !k.is_empty())
            .collect();
        let mut c = Checks::default();
        c.require(!title.is_empty(), "title", "is required");
        c.require(title.len() <= MAX_TITLE_LEN, "title", "is too long");
        c.require(!description.is_empty(), "description", "is required");
        c.finish()?;
        let file = entry.file.as_ref().map(|f| self.files.put(f)).transpose()?;
        self.write(|tx| {
            Self::require_authorized(tx, author)?;
            let nb = notebook_row(&tx.tx, entry.notebook_id)?;
            if nb.archived {
                return Err(Error::Archived(nb.id));
            }
            let id = tx.next_id(Table::Entries.name())?;
            let kw = serde_json::to_string(&keywords).expect("strings serialize");
            let (fname, fdigest, fsize, fpath) = file_columns(file.as_ref());
            tx.tx.execute(
                "INSERT INTO entries(id, notebook_id, title, description, keywords, file_name, file_digest,
                    file_size, file_path, author, created_utc)
                 VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8, ?9, ?10, ?11)",
                params![id, nb.id, title, description, kw, fname, fdigest, fsize, fpath, author, tx.now.micros()],
            )?;
            tx.audit(
                AuditKind::NewEntry,
                author,
                Some(&format!("entry:{id}")),
                &format!("notebook={}; title={title}", nb.id),
            )?;
            Ok(Entry {
                id,
                notebook_id: nb.id,
                title,
                description,
                keywords,
                file,
                author: author.to_owned(),
                created_utc: tx.now,
            })
        })
    }

    pub fn create_comment(&self, entry_id: i64, text: &str, file: Option<NewFile>, author: &str) -> Result<Comment> {
        let text = text.trim();
        let mut c = Checks::default();
        c.require(!text.is_empty(), "text", "is required");
        c.finish()?;
        let file = file.as_ref().map(|f| self.files.put(f)).transpose()?;
        self.write(|tx| {
            Self::require_authorized(tx, author)?;
            let entry = entry_row(&tx.tx, entry_id)?;
            if notebook_row(&tx.tx, entry.notebook_id)?.archived {
                return Err(Error::Archived(entry.notebook_id));
            }
            let id = tx.next_id(Table::Comments.name())?;
            let (fname, fdigest, fsize, fpath) = file_columns(file.as_ref());
            tx.tx.execute(
                "INSERT INTO comments(id, entry_id, text, file_name, file_digest, file_size, file_path,
                    author, created_utc)
                 VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8, ?9)",
                params![id, entry_id, text, fname, fdigest, fsize, fpath, author, tx.now.micros()],
            )?;
            tx.audit(
                AuditKind::NewComment,
                author,
                Some(&format!("comment:{id}")),
                &format!("entry={entry_id}"),
            )?;
            Ok(Comment {
                id,
                entry_id,
                text: text.to_owned(),
                file,
                author: author.to_owned(),
                created_utc: tx.now,
            })
        })
    }

    pub fn notarize_entry(&self, entry_id: i64, notary: &str) -> Result<Notarization> {
        self.write(|tx| {
            Self::require_authorized(tx, notary)?;
            entry_row(&tx.tx, entry_id)?;
            let id = tx.next_id(Table::Notarizations.name())?;
            tx.tx.execute(
                "INSERT INTO notarizations(id, entry_id, notary, created_utc) VALUES (?1, ?2, ?3, ?4)",
                params![id, entry_id, notary, tx.now.micros()],
            )?;
            tx.audit(
                AuditKind::Notarize,
                notary,
                Some(&format!("notarization:{id}")),
                &format!("entry={entry_id}"),
            )?;
            Ok(Notarization {
                id,
                entry_id,
                notary: notary.to_owned(),
                created_utc: tx.now,
            })
        })
    }

    pub fn store_result(&self, owner: &str, kind: &str, payload: Vec<(String, String)>) -> Result<AnalysisResult> {
        let kind: ResultKind = kind.parse()?;
        let mut c = Checks::default();
        c.require(!payload.is_empty(), "payload", "is empty");
        c.require(payload.iter().all(|(k, _)| !k.trim().is_empty()), "payload", "has an empty key");
        c.finish()?;
        self.write(|tx| {
            Self::require_authorized(tx, owner)?;
            let id = tx.next_id(Table::Results.name())?;
            let json = serde_json::to_string(&payload).expect("pairs serialize");
            tx.tx.execute(
                "INSERT INTO results(id, owner, kind, payload, created_utc) VALUES (?1, ?2, ?3, ?4, ?5)",
                params![id, owner, kind.as_str(), json, tx.now.micros()],
            )?;
            tx.audit(
                AuditKind::ResultStored,
                owner,
                Some(&format!("result:{id}")),
                &format!("kind={}", kind.as_str()),
            )?;
            Ok(AnalysisResult {
                id,
                owner: owner.to_owned(),
                kind,
                payload,
                created_utc: tx.now,
            })
        })
    }

    pub fn notebook(&self, id: i64) -> Result<Notebook> {
        self.read(|c| notebook_row(c, id))
    }

    pub fn list_notebooks(&self) -> Result<Vec<Notebook>> {
        self.read(|c| collect(c, "SELECT * FROM notebooks ORDER BY id", [], map_notebook))
    }

    pub fn entry(&self, id: i64) -> Result<Entry> {
        self.read(|c| entry_row(c, id))
    }

    pub fn comment(&self, id: i64) -> Result<Comment> {
        self.read(|c| {
            c.query_row("SELECT * FROM comments WHERE id = ?1", [id], map_comment)
                .optional()?
                .ok_or_else(|| Error::not_found("comment", id))
        })
    }

    /// Newest first; equal timestamps put the higher id first.
    pub fn list_entries(&self, notebook_id: Option<i64>) -> Result<Vec<Entry>> {
        self.read(|c| match notebook_id {
            Some(nb) => {
                notebook_row(c, nb)?;
                collect(
                    c,
                    "SELECT * FROM entries WHERE notebook_id = ?1 ORDER BY created_utc DESC, id DESC",
                    [nb],
                    map_entry,
                )
            }
            None => collect(c, "SELECT * FROM entries ORDER BY created_utc DESC, id DESC", [], map_entry),
        })
    }

    pub fn list_comments(&self, entry_id: i64) -> Result<Vec<Comment>> {
        self.read(|c| {
            entry_row(c, entry_id)?;
            collect(c, "SELECT * FROM comments WHERE entry_id = ?1 ORDER BY id", [entry_id], map_comment)
        })
    }

    pub fn list_notarizations(&self, entry_id: i64) -> Result<Vec<Notarization>> {
        self.read(|c| {
            entry_row(c, entry_id)?;
            collect(
                c,
                "SELECT * FROM notarizations WHERE entry_id = ?1 ORDER BY id",
                [entry_id],
                map_notarization,
            )
        })
    }

    pub fn table_of_contents(&self, notebook_id: i64) -> Result<Vec<TocRow>> {
        self.read(|c| {
            notebook_row(c, notebook_id)?;
            collect(
                c,
                "SELECT id, title, created_utc FROM entries WHERE notebook_id = ?1 ORDER BY id",
                [notebook_id],
                |r| {
                    Ok(TocRow {
                        id: r.get(0)?,
                        title: r.get(1)?,
                        created_utc: Timestamp::from_micros(r.get(2)?),
                    })
                },
            )
        })
    }

    pub fn list_results(&self, owner: &str) -> Result<Vec<AnalysisResult>> {
        self.read(|c| collect(c, "SELECT * FROM results WHERE owner = ?1 ORDER BY id", [owner], map_result))
    }
}

pub(crate) fn collect<T, P: rusqlite::Params>(
    c: &Connection,
    sql: &str,
    params: P,
    f: impl FnMut(&Row) -> rusqlite::Result<T>,
) -> Result<Vec<T>> {
    let mut stmt = c.prepare(sql)?;
    let rows = stmt.query_map(params, f)?;
    Ok(rows.collect::<rusqlite::Result<Vec<_>>>()?)
}

fn file_columns(f: Option<&FileAttachment>) -> (Option<&str>, Option<&str>, Option<i64>, Option<&str>) {
    match f {
        Some(f) => (
            Some(&f.filename),
            Some(&f.content_digest),
            Some(f.size_bytes as i64),
            Some(&f.stored_path),
        ),
        None => (None, None, None, None),
    }
}

fn file_from(r: &Row) -> rusqlite::Result<Option<FileAttachment>> {
    let digest: Option<String> = r.get("file_digest")?;
    Ok(match digest {
        Some(content_digest) => Some(FileAttachment {
            filename: r.get("file_name")?,
            content_digest,
            size_bytes: r.get::<_, i64>("file_size")? as u64,
            stored_path: r.get("file_path")?,
        }),
        None => None,
    })
}

fn ts(r: &Row, col: &str) -> rusqlite::Result<Timestamp> {
    Ok(Timestamp::from_micros(r.get(col)?))
}

pub(crate) fn map_notebook(r: &Row) -> rusqlite::Result<Notebook> {
    Ok(Notebook {
        id: r.get("id")?,
        title: r.get("title")?,
        creator: r.get("creator")?,
        created_utc: ts(r, "created_utc")?,
        archived: r.get("archived")?,
    })
}

pub(crate) fn map_entry(r: &Row) -> rusqlite::Result<Entry> {
    let kw: String = r.get("keywords")?;
    Ok(Entry {
        id: r.get("id")?,
        notebook_id: r.get("notebook_id")?,
        title: r.get("title")?,
        description: r.get("description")?,
        // Non-JSON keyword text is kept as one raw keyword.
        keywords: serde_json::from_str(&kw).unwrap_or_else(|_| vec![kw]),
        file: file_from(r)?,
        author: r.get("author")?,
        created_utc: ts(r, "created_utc")?,
    })
}

pub(crate) fn map_comment(r: &Row) -> rusqlite::Result<Comment> {
    Ok(Comment {
        id: r.get("id")?,
        entry_id: r.get("entry_id")?,
        text: r.get("text")?,
        file: file_from(r)?,
        author: r.get("author")?,
        created_utc: ts(r, "created_utc")?,
    })
}

pub(crate) fn map_notarization(r: &Row) -> rusqlite::Result<Notarization> {
    Ok(Notarization {
        id: r.get("id")?,
        entry_id: r.get("entry_id")?,
        notary: r.get("notary")?,
        created_utc: ts(r, "created_utc")?,
    })
}

pub(crate) fn map_result(r: &Row) -> rusqlite::Result<AnalysisResult> {
    let kind: String = r.get("kind")?;
    let payload: String = r.get("payload")?;
    Ok(AnalysisResult {
        id: r.get("id")?,
        owner: r.get("owner")?,
        kind: if kind == "primer" { ResultKind::Primer } else { ResultKind::Sequence },
        payload: serde_json::from_str(&payload).unwrap_or_else(|_| vec![("payload".into(), payload)]),
        created_utc: ts(r, "created_utc")?,
    })
}

pub(crate) fn notebook_row(c: &Connection, id: i64) -> Result<Notebook> {
    c.query_row("SELECT * FROM notebooks WHERE id = ?1", [id], map_notebook)
        .optional()?
        .ok_or_else(|| Error::not_found("notebook", id))
}

pub(crate) fn entry_row(c: &Connection, id: i64) -> Result<Entry> {
    c.query_row("SELECT * FROM entries WHERE id = ?1", [id], map_entry)
        .optional()?
        .ok_or_else(|| Error::not_found("entry", id))
}
