use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::time::Timestamp;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Notebook {
    pub id: i64,
    pub title: String,
    pub creator: String,
    pub created_utc: Timestamp,
    pub archived: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileAttachment {
    pub filename: String,
    pub content_digest: String,
    pub size_bytes: u64,
    pub stored_path: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub id: i64,
    pub notebook_id: i64,
    pub title: String,
    pub description: String,
    pub keywords: Vec<String>,
    pub file: Option<FileAttachment>,
    pub author: String,
    pub created_utc: Timestamp,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comment {
    pub id: i64,
    pub entry_id: i64,
    pub text: String,
    pub file: Option<FileAttachment>,
    pub author: String,
    pub created_utc: Timestamp,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Notarization {
    pub id: i64,
    pub entry_id: i64,
    pub notary: String,
    pub created_utc: Timestamp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResultKind {
    Primer,
    Sequence,
}

impl ResultKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ResultKind::Primer => "primer",
            ResultKind::Sequence => "sequence",
        }
    }
}

impl FromStr for ResultKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "primer" => Ok(ResultKind::Primer),
            "sequence" => Ok(ResultKind::Sequence),
            "statistics" => Err(Error::Unsupported(
                "statistics results are returned to the caller and never stored".into(),
            )),
            other => Err(Error::invalid("kind", format!("unknown result kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisResult {
    pub id: i64,
    pub owner: String,
    pub kind: ResultKind,
    pub payload: Vec<(String, String)>,
    pub created_utc: Timestamp,
}

/// Account as shown to callers; the digest and salt never leave the store
/// except in the database dump.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct User {
    pub id: i64,
    pub username: String,
    pub authorized: bool,
    pub password_changed_utc: Timestamp,
    pub created_utc: Timestamp,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Session {
    pub token: String,
    pub username: String,
    pub issued_utc: Timestamp,
    pub expires_utc: Timestamp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditKind {
    NewAccount,
    LoginSuccess,
    LoginFailure,
    Logout,
    Authorize,
    Deauthorize,
    NewNotebook,
    NewEntry,
    NewComment,
    Notarize,
    Archive,
    Unarchive,
    SignatureGeneration,
    PasswordChangeSuccess,
    PasswordChangeFailure,
    Backup,
    ResultStored,
}

impl AuditKind {
    pub const ALL: [AuditKind; 17] = [
        AuditKind::NewAccount,
        AuditKind::LoginSuccess,
        AuditKind::LoginFailure,
        AuditKind::Logout,
        AuditKind::Authorize,
        AuditKind::Deauthorize,
        AuditKind::NewNotebook,
        AuditKind::NewEntry,
        AuditKind::NewComment,
        AuditKind::Notarize,
        AuditKind::Archive,
        AuditKind::Unarchive,
        AuditKind::SignatureGeneration,
        AuditKind::PasswordChangeSuccess,
        AuditKind::PasswordChangeFailure,
        AuditKind::Backup,
        AuditKind::ResultStored,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AuditKind::NewAccount => "new_account",
            AuditKind::LoginSuccess => "login_success",
            AuditKind::LoginFailure => "login_failure",
            AuditKind::Logout => "logout",
            AuditKind::Authorize => "authorize",
            AuditKind::Deauthorize => "deauthorize",
            AuditKind::NewNotebook => "new_notebook",
            AuditKind::NewEntry => "new_entry",
            AuditKind::NewComment => "new_comment",
            AuditKind::Notarize => "notarize",
            AuditKind::Archive => "archive",
            AuditKind::Unarchive => "unarchive",
            AuditKind::SignatureGeneration => "signature_generation",
            AuditKind::PasswordChangeSuccess => "password_change_success",
            AuditKind::PasswordChangeFailure => "password_change_failure",
            AuditKind::Backup => "backup",
            AuditKind::ResultStored => "result_stored",
        }
    }
}

impl fmt::Display for AuditKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AuditKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AuditKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::invalid("kind", format!("unknown audit kind {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditEvent {
    pub id: i64,
    pub kind: AuditKind,
    pub actor: String,
    pub target: Option<String>,
    pub detail: String,
    pub utc: Timestamp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordKind {
    Entry,
    Comment,
}

impl RecordKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RecordKind::Entry => "entry",
            RecordKind::Comment => "comment",
        }
    }
}

impl FromStr for RecordKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "entry" => Ok(RecordKind::Entry),
            "comment" => Ok(RecordKind::Comment),
            other => Err(Error::invalid("record_kind", format!("{other:?} is not entry or comment"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureRecord {
    pub id: i64,
    pub record_kind: RecordKind,
    pub record_id: i64,
    pub md5: String,
    pub sha1: String,
    pub sha224: String,
    pub sha256: String,
    pub sha384: String,
    pub sha512: String,
    pub batch_id: i64,
    pub generated_utc: Timestamp,
    pub actor: String,
}

/// Append-only tables with gapless ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Table {
    Notebooks,
    Entries,
    Comments,
    Notarizations,
    Results,
    Users,
    AuditEvents,
    Signatures,
}

impl Table {
    pub const ALL: [Table; 8] = [
        Table::Notebooks,
        Table::Entries,
        Table::Comments,
        Table::Notarizations,
        Table::Results,
        Table::Users,
        Table::AuditEvents,
        Table::Signatures,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Table::Notebooks => "notebooks",
            Table::Entries => "entries",
            Table::Comments => "comments",
            Table::Notarizations => "notarizations",
            Table::Results => "results",
            Table::Users => "users",
            Table::AuditEvents => "audit_events",
            Table::Signatures => "signatures",
        }
    }
}

impl FromStr for Table {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = match s {
            "entry" => "entries",
            "comment" => "comments",
            "notebook" => "notebooks",
            "notarization" => "notarizations",
            other => other,
        };
        Table::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::invalid("record_kind", format!("unknown table {s:?}")))
    }
}
