//! Content-addressed attachment files. A file is written once under its
//! SHA-256 and never rewritten.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::model::FileAttachment;
use crate::{Error, Result};

pub const MAX_FILENAME_LEN: usize = 255;

/// Upload as received from a client.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewFile {
    pub filename: String,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone)]
pub struct AttachmentStore {
    root: PathBuf,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Strips any directory part and rejects names that are empty afterwards.
pub fn clean_filename(name: &str) -> Result<String> {
    let base = name.rsplit(['/', '\\']).next().unwrap_or("").trim();
    if base.is_empty() || base == "." || base == ".." {
        return Err(Error::invalid("file", "file name is empty"));
    }
    if base.len() > MAX_FILENAME_LEN || base.chars().any(char::is_control) {
        return Err(Error::invalid("file", "file name is too long or has control characters"));
    }
    Ok(base.to_owned())
}

impl AttachmentStore {
    pub fn new(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(AttachmentStore { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn key(digest: &str) -> String {
        format!("sha256/{}/{digest}", &digest[..2])
    }

    pub fn path_of(&self, stored_path: &str) -> Result<PathBuf> {
        let ok = stored_path
            .split('/')
            .all(|p| !p.is_empty() && p.bytes().all(|b| b.is_ascii_alphanumeric()));
        if !ok {
            return Err(Error::invalid("stored_path", "not a storage key"));
        }
        Ok(self.root.join(stored_path))
    }

    pub fn put(&self, file: &NewFile) -> Result<FileAttachment> {
        let filename = clean_filename(&file.filename)?;
        let digest = sha256_hex(&file.bytes);
        let stored_path = Self::key(&digest);
        let path = self.root.join(&stored_path);
        if !path.exists() {
            let dir = path.parent().expect("key has a parent");
            fs::create_dir_all(dir)?;
            let mut tmp = tempfile_in(dir)?;
            tmp.1.write_all(&file.bytes)?;
            tmp.1.sync_all()?;
            drop(tmp.1);
            fs::rename(&tmp.0, &path)?;
        }
        Ok(FileAttachment {
            filename,
            content_digest: digest,
            size_bytes: file.bytes.len() as u64,
            stored_path,
        })
    }

    pub fn read(&self, attachment: &FileAttachment) -> Result<Vec<u8>> {
        Ok(fs::read(self.path_of(&attachment.stored_path)?)?)
    }

    /// True when the stored bytes still hash to the recorded digest.
    pub fn verify(&self, attachment: &FileAttachment) -> Result<bool> {
        Ok(sha256_hex(&self.read(attachment)?) == attachment.content_digest)
    }
}

fn tempfile_in(dir: &Path) -> Result<(PathBuf, fs::File)> {
    use std::sync::atomic::{AtomicU64, Ordering};
    static N: AtomicU64 = AtomicU64::new(0);
    loop {
        let n = N.fetch_add(1, Ordering::Relaxed);
        let p = dir.join(format!(".upload-{}-{n}", std::process::id()));
        match fs::OpenOptions::new().write(true).create_new(true).open(&p) {
            Ok(f) => return Ok((p, f)),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(e.into()),
        }
    }
}
