#![allow(dead_code)]

pub mod fake_ftp;
pub mod scenario;
pub mod tamper;

use std::path::Path;
use std::sync::Arc;

use cynote_core::attachments::NewFile;
use cynote_core::time::{ManualClock, Timestamp};
use cynote_core::{NewEntry, Store, StoreOptions};
use rusqlite::Connection;
use tempfile::TempDir;

pub const ADMIN: &str = "admin";
pub const ADMIN_PW: &str = "admin-passphrase-1";
pub const BOB: &str = "bob";
pub const BOB_PW: &str = "bob-passphrase-22";

/// 2024-01-01T00:00:00Z
pub const START: Timestamp = Timestamp::from_micros(1_704_067_200_000_000);

pub struct Fixture {
    pub dir: TempDir,
    pub store: Store,
    pub clock: Arc<ManualClock>,
}

pub fn fixture() -> Fixture {
    let dir = tempfile::tempdir().expect("tempdir");
    let clock = Arc::new(ManualClock::new(START));
    let options = StoreOptions::default().with_clock(clock.clone());
    let store = Store::open(&dir.path().join("cynote.db"), &dir.path().join("files"), options).expect("open store");
    Fixture { dir, store, clock }
}

/// Fixture with an authorized `admin` account.
pub fn with_admin() -> Fixture {
    let f = fixture();
    f.store.create_account(ADMIN, ADMIN_PW).expect("bootstrap admin");
    f
}

pub fn entry(notebook_id: i64, title: &str, description: &str) -> NewEntry {
    NewEntry {
        notebook_id,
        title: title.into(),
        description: description.into(),
        keywords: vec!["pcr".into(), "primer design".into()],
        file: None,
    }
}

pub fn file(name: &str, bytes: &[u8]) -> NewFile {
    NewFile {
        filename: name.into(),
        bytes: bytes.to_vec(),
    }
}

/// Adds notebooks, entries (some with files), comments, notarizations and
/// results until at least `records` content rows exist. Needs `admin`.
pub fn populate(store: &Store, records: usize) -> usize {
    let mut made = 0;
    let mut nb = 0;
    let mut i = 0;
    while made < records {
        if i % 10 == 0 {
            nb = store.create_notebook(&format!("Notebook {}", i / 10 + 1), ADMIN).unwrap().id;
            made += 1;
        }
        let mut e = entry(nb, &format!("Run {i}"), &format!("Gel, lane {i}\nband at \"{}\" bp, ok", 100 + i));
        if i % 4 == 0 {
            e.file = Some(file(&format!("gel {i}.txt"), format!("lane data {i}\r\n").as_bytes()));
        }
        let id = store.create_entry(e, ADMIN).unwrap().id;
        made += 1;
        if i % 2 == 0 {
            let f = (i % 6 == 0).then(|| file("note.csv", format!("a,b\r\n{i},2\r\n").as_bytes()));
            store.create_comment(id, &format!("check, lane {i}"), f, ADMIN).unwrap();
            made += 1;
        }
        if i % 3 == 0 {
            store.notarize_entry(id, ADMIN).unwrap();
            made += 1;
        }
        if i % 5 == 0 {
            store
                .store_result(ADMIN, "primer", vec![("tm".into(), format!("{}.5", 50 + i)), ("gc".into(), "0.5".into())])
                .unwrap();
            made += 1;
        }
        i += 1;
    }
    made
}

/// Direct connection to the database file with the append-only triggers
/// removed, standing in for an out-of-band edit.
pub fn raw_unguarded(db: &Path) -> Connection {
    let c = Connection::open(db).expect("raw open");
    c.execute_batch("PRAGMA foreign_keys = OFF").unwrap();
    let names: Vec<String> = c
        .prepare("SELECT name FROM sqlite_master WHERE type = 'trigger'")
        .unwrap()
        .query_map([], |r| r.get(0))
        .unwrap()
        .collect::<Result<_, _>>()
        .unwrap();
    for n in names {
        c.execute_batch(&format!("DROP TRIGGER {n}")).unwrap();
    }
    c
}
