use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};

/// What the fake server saw: directories created and files stored.
#[derive(Debug, Default)]
pub struct Received {
    pub dirs: BTreeSet<String>,
    pub files: BTreeMap<String, Vec<u8>>,
    pub passive: bool,
}

/// Single-session FTP server on loopback that speaks just enough of the
/// protocol for uploads in passive mode.
pub struct FakeFtp {
    pub port: u16,
    pub received: Arc<Mutex<Received>>,
    handle: Option<JoinHandle<()>>,
}

impl FakeFtp {
    pub fn start(user: &'static str, password: &'static str) -> FakeFtp {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let port = listener.local_addr().unwrap().port();
        let received = Arc::new(Mutex::new(Received::default()));
        let r = received.clone();
        let handle = thread::spawn(move || {
            if let Ok((conn, _)) = listener.accept() {
                let _ = serve(conn, user, password, &r);
            }
        });
        FakeFtp {
            port,
            received,
            handle: Some(handle),
        }
    }

    pub fn finish(mut self) -> Arc<Mutex<Received>> {
        if let Some(h) = self.handle.take() {
            h.join().unwrap();
        }
        self.received.clone()
    }
}

fn serve(conn: TcpStream, user: &str, password: &str, rec: &Mutex<Received>) -> std::io::Result<()> {
    let mut out = conn.try_clone()?;
    let mut lines = BufReader::new(conn);
    let mut reply = |s: &str| out.write_all(format!("{s}\r\n").as_bytes());
    reply("220 fake ftp ready")?;
    let mut data: Option<TcpListener> = None;
    let mut logged_user = String::new();
    let mut authed = false;
    loop {
        let mut line = String::new();
        if lines.read_line(&mut line)? == 0 {
            return Ok(());
        }
        let line = line.trim_end();
        let (cmd, arg) = line.split_once(' ').unwrap_or((line, ""));
        match cmd.to_ascii_uppercase().as_str() {
            "USER" => {
                logged_user = arg.to_owned();
                reply("331 password please")?;
            }
            "PASS" => {
                authed = logged_user == user && arg == password;
                reply(if authed { "230 logged in" } else { "530 login incorrect" })?;
            }
            "QUIT" => {
                reply("221 bye")?;
                return Ok(());
            }
            _ if !authed => reply("530 not logged in")?,
            "TYPE" => reply("200 type set")?,
            "PASV" => {
                let l = TcpListener::bind("127.0.0.1:0")?;
                let p = l.local_addr()?.port();
                data = Some(l);
                rec.lock().unwrap().passive = true;
                reply(&format!("227 Entering Passive Mode (127,0,0,1,{},{})", p >> 8, p & 0xff))?;
            }
            "MKD" => {
                let mut r = rec.lock().unwrap();
                let parent_ok = match arg.rsplit_once('/') {
                    Some((parent, _)) => r.dirs.contains(parent),
                    None => true,
                };
                if !parent_ok || r.dirs.contains(arg) {
                    reply("550 cannot create")?;
                } else {
                    r.dirs.insert(arg.to_owned());
                    reply(&format!("257 \"{arg}\" created"))?;
                }
            }
            "STOR" => {
                let Some(l) = data.take() else {
                    reply("425 use PASV first")?;
                    continue;
                };
                let dir_ok = match arg.rsplit_once('/') {
                    Some((parent, _)) => rec.lock().unwrap().dirs.contains(parent),
                    None => true,
                };
                if !dir_ok {
                    reply("553 no such directory")?;
                    continue;
                }
                reply("150 ok to send")?;
                let (mut d, _) = l.accept()?;
                let mut bytes = Vec::new();
                d.read_to_end(&mut bytes)?;
                rec.lock().unwrap().files.insert(arg.to_owned(), bytes);
                reply("226 transfer complete")?;
            }
            _ => reply("502 not implemented")?,
        }
    }
}
