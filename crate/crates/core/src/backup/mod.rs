//! Text export and remote backup.

pub mod dump;
pub mod transport;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use dump::{import, parse, render, Database, TableDump};
pub use transport::{FtpTransport, LocalDirTransport, Transport};

use crate::attachments::clean_filename;
use crate::model::{AuditKind, FileAttachment};
use crate::store::{collect, Store};
use crate::time::{Timestamp, MICROS_PER_SECOND};
use crate::{Error, Result};

pub const REMOTE_DIR: &str = "cynote_database";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BackupManifest {
    pub remote_dir: String,
    pub dump_name: String,
    pub attachment_names: Vec<String>,
    pub created_utc: Timestamp,
}

pub fn dump_name(ts: Timestamp) -> String {
    format!("cynote_{}.txt", ts.compact_seconds())
}

pub fn files_dir_name(ts: Timestamp) -> String {
    format!("cynote_{}_files", ts.compact_seconds())
}

fn attachment_name(f: &FileAttachment) -> String {
    let name = clean_filename(&f.filename).unwrap_or_else(|_| "file".into());
    format!("{}-{name}", f.content_digest)
}

impl Store {
    pub fn export_text_dump(&self) -> Result<Database> {
        self.read(dump::snapshot)
    }

    pub fn export_text(&self) -> Result<String> {
        Ok(render(&self.export_text_dump()?))
    }

    fn attachments(&self) -> Result<Vec<FileAttachment>> {
        let sql = "SELECT file_name, file_digest, file_size, file_path FROM entries WHERE file_digest IS NOT NULL
                   UNION ALL
                   SELECT file_name, file_digest, file_size, file_path FROM comments WHERE file_digest IS NOT NULL";
        self.read(|c| {
            collect(c, sql, [], |r| {
                Ok(FileAttachment {
                    filename: r.get(0)?,
                    content_digest: r.get(1)?,
                    size_bytes: r.get::<_, i64>(2)? as u64,
                    stored_path: r.get(3)?,
                })
            })
        })
    }

    /// Backup names use whole UTC seconds and strictly increase; a backup
    /// within the same second as the previous one is stamped one second later.
    fn reserve_backup_time(&self) -> Result<Timestamp> {
        self.write(|tx| {
            let now = tx.now.micros() - tx.now.micros().rem_euclid(MICROS_PER_SECOND);
            let last: Option<i64> = tx.meta("last_backup_ts")?.and_then(|v| v.parse().ok());
            let ts = match last {
                Some(l) if now <= l => l + MICROS_PER_SECOND,
                _ => now,
            };
            tx.set_meta("last_backup_ts", &ts.to_string())?;
            Ok(Timestamp::from_micros(ts))
        })
    }

    /// Uploads the dump and every attachment. A failure is logged and
    /// reports what was already uploaded; nothing local changes.
    pub fn backup(&self, transport: &mut dyn Transport, actor: &str) -> Result<BackupManifest> {
        self.write_logged(|tx| match Store::require_authorized(tx, actor) {
            Ok(()) => Ok(Ok(())),
            Err(e) => {
                tx.audit(AuditKind::Backup, actor, None, "outcome=failure; reason=actor not authorized")?;
                Ok(Err(e))
            }
        })?;
        let ts = self.reserve_backup_time()?;
        let text = self.export_text()?;
        let mut files: BTreeMap<String, FileAttachment> = BTreeMap::new();
        for f in self.attachments()? {
            files.entry(attachment_name(&f)).or_insert(f);
        }

        let manifest = BackupManifest {
            remote_dir: REMOTE_DIR.to_owned(),
            dump_name: dump_name(ts),
            attachment_names: files.keys().cloned().collect(),
            created_utc: ts,
        };
        let mut uploaded = Vec::new();
        let result = (|| -> Result<()> {
            transport.ensure_dir(REMOTE_DIR)?;
            let dump_path = format!("{REMOTE_DIR}/{}", manifest.dump_name);
            transport.put(&dump_path, text.as_bytes())?;
            uploaded.push(dump_path);
            if !files.is_empty() {
                let dir = format!("{REMOTE_DIR}/{}", files_dir_name(ts));
                transport.ensure_dir(&dir)?;
                for (name, f) in &files {
                    let bytes = self.files().read(f)?;
                    let path = format!("{dir}/{name}");
                    transport.put(&path, &bytes)?;
                    uploaded.push(path);
                }
            }
            transport.close()
        })();

        let target = format!("backup:{}", manifest.dump_name);
        let dest = transport.describe();
        match result {
            Ok(()) => {
                self.write(|tx| {
                    tx.audit(
                        AuditKind::Backup,
                        actor,
                        Some(&target),
                        &format!(
                            "outcome=success; destination={dest}; attachments={}",
                            manifest.attachment_names.len()
                        ),
                    )
                })?;
                Ok(manifest)
            }
            Err(e) => {
                let _ = transport.close();
                let message = e.to_string();
                self.write(|tx| {
                    tx.audit(
                        AuditKind::Backup,
                        actor,
                        Some(&target),
                        &format!(
                            "outcome=failure; destination={dest}; reason={message}; uploaded={}",
                            uploaded.len()
                        ),
                    )
                })?;
                Err(Error::Backup { message, uploaded })
            }
        }
    }
}
