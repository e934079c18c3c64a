//! Accounts, sessions and password policy.

use pbkdf2::pbkdf2_hmac;
use rand::RngCore;
use rusqlite::{params, Connection, OptionalExtension};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use subtle::ConstantTimeEq;

use crate::db::Tx;
use crate::model::{AuditKind, Session, Table, User};
use crate::store::Store;
use crate::time::{Timestamp, MICROS_PER_DAY};
use crate::{Error, Result};

pub const SALT_BYTES: usize = 16;
pub const DIGEST_BYTES: usize = 32;
pub const TOKEN_BYTES: usize = 32;
pub const MAX_USERNAME_LEN: usize = 64;

fn derive(password: &str, salt: &[u8], iterations: u32) -> [u8; DIGEST_BYTES] {
    let mut out = [0u8; DIGEST_BYTES];
    pbkdf2_hmac::<Sha256>(password.as_bytes(), salt, iterations, &mut out);
    out
}

/// Constant-time comparison of a candidate password against a stored digest.
pub fn verify_password(password: &str, salt: &[u8], iterations: u32, digest: &[u8]) -> bool {
    derive(password, salt, iterations).ct_eq(digest).into()
}

fn token_digest(token: &str) -> String {
    hex::encode(Sha256::digest(token.as_bytes()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LoginOutcome {
    Session(Session),
    MustChangePassword { username: String, age_days: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PasswordAge {
    pub age_days: i64,
    pub must_change: bool,
}

/// Identity behind a live session token.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Principal {
    pub username: String,
    pub authorized: bool,
    pub password_expired: bool,
}

struct Credentials {
    user: User,
    digest: Vec<u8>,
    salt: Vec<u8>,
    iterations: u32,
}

fn map_user(r: &rusqlite::Row) -> rusqlite::Result<User> {
    Ok(User {
        id: r.get("id")?,
        username: r.get("username")?,
        authorized: r.get("authorized")?,
        password_changed_utc: Timestamp::from_micros(r.get("password_changed_utc")?),
        created_utc: Timestamp::from_micros(r.get("created_utc")?),
    })
}

fn credentials(c: &Connection, username: &str) -> Result<Option<Credentials>> {
    let row = c
        .query_row("SELECT * FROM users WHERE username = ?1", [username], |r| {
            Ok((
                map_user(r)?,
                r.get::<_, String>("password_digest")?,
                r.get::<_, String>("salt")?,
                r.get::<_, u32>("iterations")?,
            ))
        })
        .optional()?;
    row.map(|(user, d, s, iterations)| {
        let bad = |_| Error::Storage(format!("corrupt credential hex for {username}"));
        Ok(Credentials {
            user,
            digest: hex::decode(d).map_err(bad)?,
            salt: hex::decode(s).map_err(bad)?,
            iterations,
        })
    })
    .transpose()
}

fn age(changed: Timestamp, now: Timestamp, max_age_days: i64) -> PasswordAge {
    let age_days = (now.micros() - changed.micros()).div_euclid(MICROS_PER_DAY);
    PasswordAge {
        age_days,
        must_change: age_days > max_age_days,
    }
}

fn failures(tx: &Tx, username: &str) -> Result<i64> {
    Ok(tx
        .tx
        .query_row(
            "SELECT consecutive_failures FROM login_counters WHERE username = ?1",
            [username],
            |r| r.get(0),
        )
        .optional()?
        .unwrap_or(0))
}

fn bump_failures(tx: &Tx, username: &str) -> Result<i64> {
    Ok(tx.tx.query_row(
        "INSERT INTO login_counters(username, consecutive_failures) VALUES (?1, 1)
         ON CONFLICT(username) DO UPDATE SET consecutive_failures = consecutive_failures + 1
         RETURNING consecutive_failures",
        [username],
        |r| r.get(0),
    )?)
}

impl Store {
    fn check_policy(&self, password: &str) -> Option<String> {
        let min = self.options.policy.min_length;
        if password.chars().count() < min {
            return Some(format!("password shorter than {min} characters"));
        }
        None
    }

    fn new_salt() -> [u8; SALT_BYTES] {
        let mut salt = [0u8; SALT_BYTES];
        rand::rngs::OsRng.fill_bytes(&mut salt);
        salt
    }

    /// The first account ever created is authorized at once; later accounts
    /// wait for an authorized user.
    pub fn create_account(&self, username: &str, password: &str) -> Result<User> {
        let username = username.trim();
        if username.is_empty()
            || username.len() > MAX_USERNAME_LEN
            || username.chars().any(|c| c.is_whitespace() || c.is_control())
        {
            return Err(Error::invalid(
                "username",
                format!("must be 1 to {MAX_USERNAME_LEN} characters without spaces"),
            ));
        }
        let salt = Self::new_salt();
        let iterations = self.options.kdf_iterations;
        let digest = derive(password, &salt, iterations);
        let policy = self.check_policy(password);
        self.write_logged(|tx| {
            let target = Some(username);
            if credentials(&tx.tx, username)?.is_some() {
                tx.audit(AuditKind::NewAccount, username, target, "outcome=failure; reason=duplicate username")?;
                return Ok(Err(Error::Duplicate(username.to_owned())));
            }
            if let Some(reason) = &policy {
                tx.audit(AuditKind::NewAccount, username, target, &format!("outcome=failure; reason={reason}"))?;
                return Ok(Err(Error::Policy(reason.clone())));
            }
            let first: i64 = tx.tx.query_row("SELECT COUNT(*) FROM users", [], |r| r.get(0))?;
            let authorized = first == 0;
            let id = tx.next_id(Table::Users.name())?;
            tx.tx.execute(
                "INSERT INTO users(id, username, password_digest, salt, iterations, password_changed_utc,
                    authorized, created_utc)
                 VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?6)",
                params![id, username, hex::encode(digest), hex::encode(salt), iterations, tx.now.micros(), authorized],
            )?;
            let detail = if authorized {
                "outcome=success; authorized=true; reason=first account"
            } else {
                "outcome=success; authorized=false"
            };
            tx.audit(AuditKind::NewAccount, username, target, detail)?;
            Ok(Ok(User {
                id,
                username: username.to_owned(),
                authorized,
                password_changed_utc: tx.now,
                created_utc: tx.now,
            }))
        })
    }

    pub fn user(&self, username: &str) -> Result<User> {
        self.read(|c| {
            credentials(c, username)?
                .map(|c| c.user)
                .ok_or_else(|| Error::not_found("user", username))
        })
    }

    pub fn list_users(&self) -> Result<Vec<User>> {
        self.read(|c| crate::store::collect(c, "SELECT * FROM users ORDER BY id", [], map_user))
    }

    pub fn authorize_user(&self, actor: &str, target: &str) -> Result<User> {
        self.set_authorized(actor, target, true)
    }

    /// Also revokes every live session of the target.
    pub fn deauthorize_user(&self, actor: &str, target: &str) -> Result<User> {
        self.set_authorized(actor, target, false)
    }

    fn set_authorized(&self, actor: &str, target: &str, authorized: bool) -> Result<User> {
        let kind = if authorized { AuditKind::Authorize } else { AuditKind::Deauthorize };
        self.write_logged(|tx| {
            if let Err(e) = Store::require_authorized(tx, actor) {
                tx.audit(kind, actor, Some(target), "outcome=failure; reason=actor not authorized")?;
                return Ok(Err(e));
            }
            let Some(cred) = credentials(&tx.tx, target)? else {
                tx.audit(kind, actor, Some(target), "outcome=failure; reason=unknown user")?;
                return Ok(Err(Error::not_found("user", target)));
            };
            tx.tx.execute(
                "UPDATE users SET authorized = ?1 WHERE username = ?2",
                params![authorized, target],
            )?;
            let mut revoked = 0;
            if !authorized {
                revoked = tx.tx.execute(
                    "UPDATE sessions SET revoked = 1 WHERE username = ?1 AND revoked = 0",
                    [target],
                )?;
            }
            tx.audit(
                kind,
                actor,
                Some(target),
                &format!("outcome=success; authorized={authorized}; sessions_revoked={revoked}"),
            )?;
            Ok(Ok(User { authorized, ..cred.user }))
        })
    }

    /// Unknown users and wrong passwords give the same error. Failures are
    /// counted per attempted username and reset by a successful login.
    pub fn login(&self, username: &str, password: &str, now: Timestamp) -> Result<LoginOutcome> {
        let ttl = self.options.session_ttl_minutes * 60 * 1_000_000;
        let max_age = self.options.policy.max_age_days;
        self.write_logged(|tx| {
            let fail = |reason: &str, count: i64| {
                tx.audit(
                    AuditKind::LoginFailure,
                    username,
                    Some(username),
                    &format!("outcome=failure; reason={reason}; failures={count}"),
                )
            };
            let Some(cred) = credentials(&tx.tx, username)? else {
                derive(password, &[0u8; SALT_BYTES], self.options.kdf_iterations);
                let n = bump_failures(tx, username)?;
                fail("unknown username", n)?;
                return Ok(Err(Error::InvalidCredentials));
            };
            if !verify_password(password, &cred.salt, cred.iterations, &cred.digest) {
                let n = bump_failures(tx, username)?;
                fail("wrong password", n)?;
                return Ok(Err(Error::InvalidCredentials));
            }
            if !cred.user.authorized {
                fail("not authorized", failures(tx, username)?)?;
                return Ok(Err(Error::Unauthorized(format!("{username} is not an authorized user"))));
            }
            let a = age(cred.user.password_changed_utc, now, max_age);
            if a.must_change {
                fail(&format!("password expired ({} days old)", a.age_days), failures(tx, username)?)?;
                return Ok(Ok(LoginOutcome::MustChangePassword {
                    username: username.to_owned(),
                    age_days: a.age_days,
                }));
            }
            let mut raw = [0u8; TOKEN_BYTES];
            rand::rngs::OsRng.fill_bytes(&mut raw);
            let token = hex::encode(raw);
            let expires = now.plus_micros(ttl);
            tx.tx.execute(
                "INSERT INTO sessions(token_digest, username, issued_utc, expires_utc) VALUES (?1, ?2, ?3, ?4)",
                params![token_digest(&token), username, now.micros(), expires.micros()],
            )?;
            tx.tx.execute("DELETE FROM login_counters WHERE username = ?1", [username])?;
            tx.audit(AuditKind::LoginSuccess, username, Some(username), "outcome=success; failures=0")?;
            Ok(Ok(LoginOutcome::Session(Session {
                token,
                username: username.to_owned(),
                issued_utc: now,
                expires_utc: expires,
            })))
        })
    }

    /// Resolves a bearer token. Revoked, expired and unknown tokens all fail.
    pub fn authenticate(&self, token: &str, now: Timestamp) -> Result<Principal> {
        let max_age = self.options.policy.max_age_days;
        self.read(|c| {
            let username: Option<String> = c
                .query_row(
                    "SELECT username FROM sessions WHERE token_digest = ?1 AND revoked = 0 AND expires_utc > ?2",
                    params![token_digest(token), now.micros()],
                    |r| r.get(0),
                )
                .optional()?;
            let username = username.ok_or(Error::Unauthenticated)?;
            let cred = credentials(c, &username)?.ok_or(Error::Unauthenticated)?;
            Ok(Principal {
                username,
                authorized: cred.user.authorized,
                password_expired: age(cred.user.password_changed_utc, now, max_age).must_change,
            })
        })
    }

    pub fn logout(&self, token: &str, now: Timestamp) -> Result<()> {
        self.write_logged(|tx| {
            let username: Option<String> = tx
                .tx
                .query_row(
                    "SELECT username FROM sessions WHERE token_digest = ?1 AND revoked = 0 AND expires_utc > ?2",
                    params![token_digest(token), now.micros()],
                    |r| r.get(0),
                )
                .optional()?;
            let Some(username) = username else {
                tx.audit(AuditKind::Logout, "-", None, "outcome=failure; reason=unknown or expired session")?;
                return Ok(Err(Error::Unauthenticated));
            };
            tx.tx.execute("UPDATE sessions SET revoked = 1 WHERE token_digest = ?1", [token_digest(token)])?;
            tx.audit(AuditKind::Logout, &username, Some(&username), "outcome=success")?;
            Ok(Ok(()))
        })
    }

    pub fn change_password(&self, username: &str, old: &str, new: &str, now: Timestamp) -> Result<()> {
        let salt = Self::new_salt();
        let iterations = self.options.kdf_iterations;
        let digest = derive(new, &salt, iterations);
        let policy = self.check_policy(new);
        self.write_logged(|tx| {
            let fail = |reason: &str| {
                tx.audit(
                    AuditKind::PasswordChangeFailure,
                    username,
                    Some(username),
                    &format!("outcome=failure; reason={reason}"),
                )
            };
            let Some(cred) = credentials(&tx.tx, username)? else {
                derive(old, &[0u8; SALT_BYTES], iterations);
                fail("unknown username")?;
                return Ok(Err(Error::InvalidCredentials));
            };
            if !verify_password(old, &cred.salt, cred.iterations, &cred.digest) {
                fail("old password mismatch")?;
                return Ok(Err(Error::PasswordChange("old password mismatch".into())));
            }
            if old == new {
                fail("new password equals old")?;
                return Ok(Err(Error::PasswordChange("new password equals old".into())));
            }
            if let Some(reason) = policy {
                fail(&format!("policy violation: {reason}"))?;
                return Ok(Err(Error::PasswordChange(format!("policy violation: {reason}"))));
            }
            tx.tx.execute(
                "UPDATE users SET password_digest = ?1, salt = ?2, iterations = ?3, password_changed_utc = ?4
                 WHERE username = ?5",
                params![hex::encode(digest), hex::encode(salt), iterations, now.micros(), username],
            )?;
            tx.audit(AuditKind::PasswordChangeSuccess, username, Some(username), "outcome=success")?;
            Ok(Ok(()))
        })
    }

    pub fn password_age_check(&self, username: &str, now: Timestamp) -> Result<PasswordAge> {
        let user = self.user(username)?;
        Ok(age(user.password_changed_utc, now, self.options.policy.max_age_days))
    }

    pub fn consecutive_failures(&self, username: &str) -> Result<i64> {
        self.read(|c| {
            Ok(c.query_row(
                "SELECT consecutive_failures FROM login_counters WHERE username = ?1",
                [username],
                |r| r.get(0),
            )
            .optional()?
            .unwrap_or(0))
        })
    }
}
