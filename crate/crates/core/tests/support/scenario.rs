use std::collections::BTreeMap;
use std::path::Path;

use cynote_core::accounts::LoginOutcome;
use cynote_core::backup::LocalDirTransport;
use cynote_core::model::AuditKind;
use cynote_core::{Error, Store};

use super::{entry, file, ADMIN, ADMIN_PW, BOB, BOB_PW};

/// Events the scripted scenario must leave behind, successes and failures together.
pub const EXPECTED_COUNTS: [(AuditKind, usize); 17] = [
    (AuditKind::NewAccount, 5),
    (AuditKind::LoginSuccess, 2),
    (AuditKind::LoginFailure, 3),
    (AuditKind::Logout, 2),
    (AuditKind::Authorize, 3),
    (AuditKind::Deauthorize, 1),
    (AuditKind::NewNotebook, 2),
    (AuditKind::NewEntry, 3),
    (AuditKind::NewComment, 2),
    (AuditKind::Notarize, 1),
    (AuditKind::Archive, 1),
    (AuditKind::Unarchive, 1),
    (AuditKind::SignatureGeneration, 2),
    (AuditKind::PasswordChangeSuccess, 1),
    (AuditKind::PasswordChangeFailure, 2),
    (AuditKind::Backup, 1),
    (AuditKind::ResultStored, 2),
];

pub fn expected() -> BTreeMap<AuditKind, usize> {
    EXPECTED_COUNTS.into_iter().collect()
}

fn expect_err<T: std::fmt::Debug>(step: &str, r: Result<T, Error>) -> Result<Error, String> {
    match r {
        Ok(v) => Err(format!("{step}: expected an error, got {v:?}")),
        Err(e) => Ok(e),
    }
}

fn ok<T>(step: &str, r: Result<T, Error>) -> Result<T, String> {
    r.map_err(|e| format!("{step}: {e}"))
}

fn session(step: &str, r: Result<LoginOutcome, Error>) -> Result<String, String> {
    match ok(step, r)? {
        LoginOutcome::Session(s) => Ok(s.token),
        other => Err(format!("{step}: expected a session, got {other:?}")),
    }
}

/// End-to-end script over an empty store that touches every audit kind.
pub fn run(store: &Store, backup_dir: &Path) -> Result<(), String> {
    let now = || store.now();
    ok("bootstrap", store.create_account(ADMIN, ADMIN_PW))?;
    ok("second account", store.create_account(BOB, BOB_PW))?;
    expect_err("duplicate", store.create_account(ADMIN, "another-passphrase"))?;
    expect_err("weak password", store.create_account("carol", "short"))?;

    expect_err("unauthorized login", store.login(BOB, BOB_PW, now()))?;
    expect_err("wrong password", store.login(ADMIN, "not-the-password", now()))?;
    expect_err("unknown user", store.login("mallory", "whatever-pass", now()))?;

    expect_err("self authorization", store.authorize_user(BOB, BOB))?;
    ok("authorize", store.authorize_user(ADMIN, BOB))?;
    let admin_token = session("admin login", store.login(ADMIN, ADMIN_PW, now()))?;
    session("bob login", store.login(BOB, BOB_PW, now()))?;

    let nb1 = ok("notebook 1", store.create_notebook("Cloning", ADMIN))?.id;
    let nb2 = ok("notebook 2", store.create_notebook("Assays", BOB))?.id;
    let e1 = ok("entry 1", store.create_entry(entry(nb1, "Digest", "EcoRI digest of pUC19"), ADMIN))?.id;
    ok("entry 2", store.create_entry(entry(nb1, "Ligation", "Insert ligated"), BOB))?;
    ok("entry 3", store.create_entry(entry(nb2, "ELISA", "Plate 1"), BOB))?;
    ok("comment 1", store.create_comment(e1, "Bands as expected", None, BOB))?;
    ok("comment 2", store.create_comment(e1, "Gel photo", Some(file("gel.png", b"\x89PNG fake")), ADMIN))?;
    ok("notarize", store.notarize_entry(e1, BOB))?;

    ok("archive", store.set_archive_state(nb2, true, ADMIN))?;
    expect_err("entry in archived notebook", store.create_entry(entry(nb2, "Late", "Too late"), BOB))?;
    ok("unarchive", store.set_archive_state(nb2, false, ADMIN))?;

    ok("signatures", store.generate_signature_batch(ADMIN))?;
    expect_err("signatures by stranger", store.generate_signature_batch("mallory"))?;

    expect_err("old password mismatch", store.change_password(BOB, "wrong-old-pass", "bob-passphrase-33", now()))?;
    expect_err("new equals old", store.change_password(BOB, BOB_PW, BOB_PW, now()))?;
    ok("password change", store.change_password(BOB, BOB_PW, "bob-passphrase-33", now()))?;

    ok("primer result", store.store_result(BOB, "primer", vec![("tm".into(), "56.1".into())]))?;
    ok("sequence result", store.store_result(BOB, "sequence", vec![("gc".into(), "0.52".into())]))?;
    expect_err("statistics result", store.store_result(BOB, "statistics", vec![("p".into(), "0.1".into())]))?;

    ok("backup", store.backup(&mut LocalDirTransport::new(backup_dir), ADMIN))?;

    ok("carol", store.create_account("carol", "carol-passphrase"))?;
    ok("authorize carol", store.authorize_user(ADMIN, "carol"))?;
    ok("deauthorize carol", store.deauthorize_user(ADMIN, "carol"))?;
    ok("logout", store.logout(&admin_token, now()))?;
    expect_err("double logout", store.logout(&admin_token, now()))?;
    Ok(())
}
