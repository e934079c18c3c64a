//! Destinations for backups.

use std::fs;
use std::path::{Component, Path, PathBuf};
use std::time::Duration;

use suppaftp::types::FileType;
use suppaftp::{FtpStream, Mode};

use crate::config::{BackupConfig, BackupMode};
use crate::{Error, Result};

/// Remote paths are `/`-separated and relative to the transport root.
pub trait Transport {
    /// Creates the directory if absent.
    fn ensure_dir(&mut self, path: &str) -> Result<()>;
    fn put(&mut self, path: &str, bytes: &[u8]) -> Result<()>;
    fn close(&mut self) -> Result<()> {
        Ok(())
    }
    fn describe(&self) -> String;
}

fn check_relative(path: &str) -> Result<()> {
    let p = Path::new(path);
    if path.is_empty() || !p.components().all(|c| matches!(c, Component::Normal(_))) {
        return Err(Error::Io(format!("remote path {path:?} must be relative and plain")));
    }
    Ok(())
}

/// Writes into a local directory; used for tests and offline installs.
pub struct LocalDirTransport {
    root: PathBuf,
}

impl LocalDirTransport {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        LocalDirTransport { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }
}

impl Transport for LocalDirTransport {
    fn ensure_dir(&mut self, path: &str) -> Result<()> {
        check_relative(path)?;
        fs::create_dir_all(self.root.join(path))?;
        Ok(())
    }

    fn put(&mut self, path: &str, bytes: &[u8]) -> Result<()> {
        check_relative(path)?;
        let target = self.root.join(path);
        let parent = target.parent().expect("relative path has a parent");
        if !parent.is_dir() {
            return Err(Error::Io(format!("{} does not exist", parent.display())));
        }
        let tmp = target.with_extension("partial");
        fs::write(&tmp, bytes)?;
        fs::rename(&tmp, &target)?;
        Ok(())
    }

    fn describe(&self) -> String {
        format!("localdir:{}", self.root.display())
    }
}

/// Plain FTP in passive mode, binary transfers.
pub struct FtpTransport {
    host: String,
    port: u16,
    user: String,
    password: String,
    timeout: Duration,
    stream: Option<FtpStream>,
}

impl FtpTransport {
    pub fn new(host: &str, port: u16, user: &str, password: &str) -> Self {
        FtpTransport {
            host: host.to_owned(),
            port,
            user: user.to_owned(),
            password: password.to_owned(),
            timeout: Duration::from_secs(30),
            stream: None,
        }
    }

    fn stream(&mut self) -> Result<&mut FtpStream> {
        if self.stream.is_none() {
            let ftp = |e: suppaftp::FtpError| Error::Io(format!("ftp {}:{}: {e}", self.host, self.port));
            let addr = std::net::ToSocketAddrs::to_socket_addrs(&(self.host.as_str(), self.port))?
                .next()
                .ok_or_else(|| Error::Io(format!("cannot resolve {}", self.host)))?;
            let mut s = FtpStream::connect_timeout(addr, self.timeout).map_err(ftp)?;
            s.set_mode(Mode::Passive);
            s.login(self.user.as_str(), self.password.as_str()).map_err(ftp)?;
            s.transfer_type(FileType::Binary).map_err(ftp)?;
            self.stream = Some(s);
        }
        Ok(self.stream.as_mut().expect("connected above"))
    }
}

impl Transport for FtpTransport {
    fn ensure_dir(&mut self, path: &str) -> Result<()> {
        check_relative(path)?;
        let s = self.stream()?;
        let mut prefix = String::new();
        for part in path.split('/') {
            if !prefix.is_empty() {
                prefix.push('/');
            }
            prefix.push_str(part);
            // Existing directories answer 550.
            let _ = s.mkdir(&prefix);
        }
        Ok(())
    }

    fn put(&mut self, path: &str, bytes: &[u8]) -> Result<()> {
        check_relative(path)?;
        let s = self.stream()?;
        s.put_file(path, &mut std::io::Cursor::new(bytes))
            .map_err(|e| Error::Io(format!("ftp upload {path}: {e}")))?;
        Ok(())
    }

    fn close(&mut self) -> Result<()> {
        if let Some(mut s) = self.stream.take() {
            s.quit().map_err(|e| Error::Io(format!("ftp quit: {e}")))?;
        }
        Ok(())
    }

    fn describe(&self) -> String {
        format!("ftp://{}@{}:{}", self.user, self.host, self.port)
    }
}

pub fn from_config(c: &BackupConfig) -> Box<dyn Transport + Send> {
    match c.mode {
        BackupMode::Localdir => Box::new(LocalDirTransport::new(&c.local_path)),
        BackupMode::Ftp => Box::new(FtpTransport::new(&c.host, c.port, &c.user, &c.password)),
    }
}
