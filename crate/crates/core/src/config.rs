use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const MIN_KDF_ITERATIONS: u32 = 100_000;
pub const DEFAULT_UPLOAD_CAP: usize = 32 * 1024 * 1024;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub store: StoreConfig,
    pub policy: PasswordPolicy,
    pub session: SessionConfig,
    pub blast: BlastConfig,
    pub backup: BackupConfig,
    pub server: ServerConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StoreConfig {
    pub path: PathBuf,
    pub files_dir: PathBuf,
    pub kdf_iterations: u32,
}

impl Default for StoreConfig {
    fn default() -> Self {
        StoreConfig {
            path: "cynote.sqlite3".into(),
            files_dir: "cynote_files".into(),
            kdf_iterations: MIN_KDF_ITERATIONS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PasswordPolicy {
    pub max_age_days: i64,
    pub min_length: usize,
}

impl Default for PasswordPolicy {
    fn default() -> Self {
        PasswordPolicy {
            max_age_days: 90,
            min_length: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SessionConfig {
    pub ttl_minutes: i64,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig { ttl_minutes: 480 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlastMode {
    Live,
    Replay,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlastConfig {
    pub mode: BlastMode,
    pub cache_dir: PathBuf,
    pub endpoint: String,
    pub poll_seconds: u64,
    pub max_wait_seconds: u64,
}

impl Default for BlastConfig {
    fn default() -> Self {
        BlastConfig {
            mode: BlastMode::Replay,
            cache_dir: "cynote_blast_cache".into(),
            endpoint: "https://blast.ncbi.nlm.nih.gov/Blast.cgi".into(),
            poll_seconds: 10,
            max_wait_seconds: 600,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackupMode {
    Ftp,
    Localdir,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BackupConfig {
    pub mode: BackupMode,
    pub host: String,
    pub port: u16,
    pub user: String,
    pub password: String,
    pub local_path: PathBuf,
}

impl Default for BackupConfig {
    fn default() -> Self {
        BackupConfig {
            mode: BackupMode::Localdir,
            host: "localhost".into(),
            port: 21,
            user: "anonymous".into(),
            password: String::new(),
            local_path: "cynote_backups".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServerConfig {
    pub bind: String,
    pub port: u16,
    pub max_upload_bytes: usize,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig {
            bind: "127.0.0.1".into(),
            port: 8000,
            max_upload_bytes: DEFAULT_UPLOAD_CAP,
        }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        let c: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.policy.max_age_days <= 0 {
            return Err(Error::Config("policy.max_age_days must be positive".into()));
        }
        if self.policy.min_length == 0 {
            return Err(Error::Config("policy.min_length must be positive".into()));
        }
        if self.session.ttl_minutes <= 0 {
            return Err(Error::Config("session.ttl_minutes must be positive".into()));
        }
        if self.store.kdf_iterations < MIN_KDF_ITERATIONS {
            return Err(Error::Config(format!(
                "store.kdf_iterations must be at least {MIN_KDF_ITERATIONS}"
            )));
        }
        Ok(())
    }
}
