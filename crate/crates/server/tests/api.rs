mod support;

use axum::http::StatusCode;
use serde_json::json;
use support::*;

#[tokio::test]
async fn logged_out_requests_get_401() {
    let app = test_app();
    let r = app.get("/cynote/cynote/list_entries", None).await;
    assert_eq!(r.status, StatusCode::UNAUTHORIZED);
    assert_eq!(r.code(), "unauthenticated");
    let r = app.get("/cynote/cynote/list_entries", Some("not-a-token")).await;
    assert_eq!(r.status, StatusCode::UNAUTHORIZED);
    let r = app.post("/cynote/cynote/new_notebook", None, json!({ "title": "x" })).await;
    assert_eq!(r.status, StatusCode::UNAUTHORIZED);
}

#[tokio::test]
async fn login_returns_an_unguessable_token() {
    let app = test_app();
    let token = app.admin().await;
    assert!(token.len() >= 32, "{token}");
    assert!(token.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_'));
    let other = app.login(ADMIN, ADMIN_PW).await;
    assert_ne!(token, other);
    let r = app.post("/cynote/account/login", None, json!({ "username": ADMIN, "password": "wrong" })).await;
    assert_eq!(r.status, StatusCode::UNAUTHORIZED);
}

#[tokio::test]
async fn sessions_expire_per_config() {
    let app = test_app_with_ttl(30);
    let token = app.admin().await;
    assert_eq!(app.get("/cynote/cynote/notebooks", Some(&token)).await.status, StatusCode::OK);
    app.clock.advance_micros(31 * 60 * 1_000_000);
    assert_eq!(app.get("/cynote/cynote/notebooks", Some(&token)).await.status, StatusCode::UNAUTHORIZED);
}

#[tokio::test]
async fn entry_without_title_names_the_field() {
    let app = test_app();
    let token = app.admin().await;
    let nb = app.notebook(&token, "Cloning").await;
    let before = app.audit_len();
    let r = app
        .post("/cynote/cynote/new_entry", Some(&token), json!({ "notebook_id": nb, "description": "d" }))
        .await;
    assert_eq!(r.status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(r.error_fields(), ["title"]);
    assert!(r.body["error"]["message"].as_str().unwrap().contains("following fields are required"));
    let r = app.post("/cynote/cynote/new_entry", Some(&token), json!({})).await;
    assert_eq!(r.error_fields(), ["notebook_id", "title", "description"]);
    assert_eq!(app.audit_len(), before);
    assert!(app.store().list_entries(None).unwrap().is_empty());
}

#[tokio::test]
async fn non_integer_notebook_id_is_422() {
    let app = test_app();
    let token = app.admin().await;
    for bad in [json!("seven"), json!(1.5), json!([1])] {
        let r = app
            .post(
                "/cynote/cynote/new_entry",
                Some(&token),
                json!({ "notebook_id": bad, "title": "t", "description": "d" }),
            )
            .await;
        assert_eq!(r.status, StatusCode::UNPROCESSABLE_ENTITY, "{bad}");
        assert_eq!(r.error_fields(), ["notebook_id"]);
    }
    let r = app.get("/cynote/cynote/toc?notebook_id=abc", Some(&token)).await;
    assert_eq!(r.status, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn archived_notebook_refuses_entries_with_409() {
    let app = test_app();
    let token = app.admin().await;
    let nb = app.notebook(&token, "Old work").await;
    let id = app.entry(&token, nb, "Before").await.body["id"].as_i64().unwrap();
    let r = app.post("/cynote/cynote/archive", Some(&token), json!({ "notebook_id": nb })).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.body["archived"], true);
    let r = app.entry(&token, nb, "After").await;
    assert_eq!(r.status, StatusCode::CONFLICT);
    assert_eq!(r.code(), "archived");
    let r = app.post("/cynote/cynote/new_comment", Some(&token), json!({ "entry_id": id, "text": "t" })).await;
    assert_eq!(r.status, StatusCode::CONFLICT);
    app.post("/cynote/cynote/unarchive", Some(&token), json!({ "notebook_id": nb })).await;
    assert_eq!(app.entry(&token, nb, "After").await.status, StatusCode::CREATED);
}

#[tokio::test]
async fn oversized_attachment_is_413() {
    let app = test_app();
    let token = app.admin().await;
    let nb = app.notebook(&token, "Gels").await.to_string();
    let fields = [("notebook_id", nb.as_str()), ("title", "Gel"), ("description", "lane 3")];
    let big = vec![b'x'; UPLOAD_CAP + 1];
    let before = app.audit_len();
    let r = app.multipart("/cynote/cynote/new_entry", &token, &fields, Some(("gel.png", &big))).await;
    assert_eq!(r.status, StatusCode::PAYLOAD_TOO_LARGE);
    assert_eq!(r.code(), "payload_too_large");
    assert_eq!(app.audit_len(), before);
    let huge = vec![b'x'; UPLOAD_CAP + 128 * 1024];
    let r = app.multipart("/cynote/cynote/new_entry", &token, &fields, Some(("gel.png", &huge))).await;
    assert_eq!(r.status, StatusCode::PAYLOAD_TOO_LARGE);
    let ok = vec![b'y'; UPLOAD_CAP];
    let r = app.multipart("/cynote/cynote/new_entry", &token, &fields, Some(("gel.png", &ok))).await;
    assert_eq!(r.status, StatusCode::CREATED, "{}", r.body);
    assert_eq!(r.body["file"]["size_bytes"], UPLOAD_CAP);
    assert_eq!(r.body["file"]["filename"], "gel.png");
}

#[tokio::test]
async fn multipart_comment_with_attachment() {
    let app = test_app();
    let token = app.admin().await;
    let nb = app.notebook(&token, "Gels").await;
    let id = app.entry(&token, nb, "Run").await.body["id"].as_i64().unwrap().to_string();
    let r = app
        .multipart(
            "/cynote/cynote/new_comment",
            &token,
            &[("entry_id", &id), ("text", "see trace")],
            Some(("trace.ab1", b"ACGT")),
        )
        .await;
    assert_eq!(r.status, StatusCode::CREATED, "{}", r.body);
    assert_eq!(r.body["file"]["content_digest"].as_str().unwrap().len(), 64);
    let r = app.get(&format!("/cynote/cynote/entry?entry_id={id}"), Some(&token)).await;
    assert_eq!(r.body["comments"][0]["text"], "see trace");
}

#[tokio::test]
async fn stale_password_gets_403_with_change_route() {
    let app = test_app_with_ttl(200 * 24 * 60);
    let token = app.admin().await;
    app.clock.advance_days(91);
    let r = app.get("/cynote/cynote/list_entries", Some(&token)).await;
    assert_eq!(r.status, StatusCode::FORBIDDEN);
    assert_eq!(r.code(), "password_expired");
    assert_eq!(r.body["error"]["change_password_route"], "/cynote/account/changepassword");
    let r = app.post("/cynote/account/login", None, json!({ "username": ADMIN, "password": ADMIN_PW })).await;
    assert_eq!(r.status, StatusCode::FORBIDDEN);
    assert_eq!(r.code(), "password_expired");
    assert_eq!(r.body["error"]["age_days"], 91);
    let r = app
        .post(
            "/cynote/account/changepassword",
            None,
            json!({ "username": ADMIN, "old_password": ADMIN_PW, "new_password": "fresh-passphrase-9" }),
        )
        .await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.body);
    let fresh = app.login(ADMIN, "fresh-passphrase-9").await;
    assert_eq!(app.get("/cynote/cynote/list_entries", Some(&fresh)).await.status, StatusCode::OK);
}

#[tokio::test]
async fn ninety_days_is_still_allowed() {
    let app = test_app_with_ttl(200 * 24 * 60);
    let token = app.admin().await;
    app.clock.advance_days(90);
    assert_eq!(app.get("/cynote/cynote/notebooks", Some(&token)).await.status, StatusCode::OK);
}

#[tokio::test]
async fn authorization_flow() {
    let app = test_app();
    let admin = app.admin().await;
    assert_eq!(app.create_account(BOB, BOB_PW).await.status, StatusCode::CREATED);
    let r = app.post("/cynote/account/login", None, json!({ "username": BOB, "password": BOB_PW })).await;
    assert_eq!(r.status, StatusCode::FORBIDDEN);
    let r = app.post("/cynote/account/authorize", Some(&admin), json!({ "username": BOB })).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.body["authorized"], true);
    let bob = app.login(BOB, BOB_PW).await;
    assert_eq!(app.get("/cynote/cynote/notebooks", Some(&bob)).await.status, StatusCode::OK);
    app.post("/cynote/account/deauthorize", Some(&admin), json!({ "username": BOB })).await;
    assert_eq!(app.get("/cynote/cynote/notebooks", Some(&bob)).await.status, StatusCode::UNAUTHORIZED);
    let r = app.create_account(BOB, BOB_PW).await;
    assert_eq!(r.status, StatusCode::CONFLICT);
    let r = app.create_account("carol", "short").await;
    assert_eq!(r.status, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn logout_ends_the_session() {
    let app = test_app();
    let token = app.admin().await;
    let r = app.post("/cynote/account/logout", Some(&token), json!({})).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(app.get("/cynote/cynote/notebooks", Some(&token)).await.status, StatusCode::UNAUTHORIZED);
}

#[tokio::test]
async fn notebook_flow_and_verification() {
    let app = test_app();
    let token = app.admin().await;
    let nb = app.notebook(&token, "Cloning").await;
    let first = app.entry(&token, nb, "Digest").await.body["id"].as_i64().unwrap();
    app.entry(&token, nb, "Ligation").await;
    let r = app.get(&format!("/cynote/cynote/list_entries?notebook_id={nb}"), Some(&token)).await;
    let titles: Vec<_> = r.body.as_array().unwrap().iter().map(|e| e["title"].as_str().unwrap()).collect();
    assert_eq!(titles, ["Ligation", "Digest"]);
    let r = app.get(&format!("/cynote/cynote/toc?notebook_id={nb}"), Some(&token)).await;
    assert_eq!(r.body.as_array().unwrap().len(), 2);
    let r = app.post("/cynote/cynote/notarize", Some(&token), json!({ "entry_id": first })).await;
    assert_eq!(r.status, StatusCode::CREATED);
    let r = app.post("/cynote/cynote/generate_signatures", Some(&token), json!({})).await;
    assert_eq!(r.status, StatusCode::CREATED, "{}", r.body);
    let r = app.get(&format!("/cynote/cynote/verify?record_kind=entry&record_id={first}"), Some(&token)).await;
    assert_eq!(r.body["status"], "consistent");
    let r = app.get("/cynote/cynote/verify", Some(&token)).await;
    assert_eq!(r.body.as_array().unwrap().len(), 2);
    let r = app.get("/cynote/cynote/verify?record_kind=page&record_id=1", Some(&token)).await;
    assert_eq!(r.status, StatusCode::UNPROCESSABLE_ENTITY);
    let r = app.get("/cynote/cynote/gaps", Some(&token)).await;
    assert!(r.body.as_array().unwrap().iter().all(|g| g["missing"].as_array().unwrap().is_empty()));
    let r = app.get("/cynote/cynote/audit?kind=new_entry", Some(&token)).await;
    assert_eq!(r.body.as_array().unwrap().len(), 2);
    let r = app.get("/cynote/cynote/entry?entry_id=99", Some(&token)).await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn primer_and_sequence_results_are_stored() {
    let app = test_app();
    let token = app.admin().await;
    let r = app
        .post(
            "/cynote/primer/analyze",
            Some(&token),
            json!({ "left_primer": "AATATTCTATCTA", "right_primer": "GCTATCTACTA" }),
        )
        .await;
    assert_eq!(r.status, StatusCode::CREATED, "{}", r.body);
    assert_eq!(r.body["report"][3], json!(["Left primer Tm (C)", "30 to 30"]));
    let r = app
        .post("/cynote/sequence/transform", Some(&token), json!({ "operation": "reverse_complement", "sequence": "ATGC" }))
        .await;
    assert_eq!(r.body["report"]["output"], "GCAT");
    let r = app
        .post("/cynote/sequence/transform", Some(&token), json!({ "operation": "translate", "sequence": "ATGTAAAAA", "stop_symbol": false }))
        .await;
    assert_eq!(r.body["report"]["output"], "M");
    let r = app.post("/cynote/sequence/protein", Some(&token), json!({ "sequence": "GG" })).await;
    assert_eq!(r.status, StatusCode::CREATED, "{}", r.body);
    assert!((r.body["report"]["isoelectric_point"].as_f64().unwrap() - 5.525).abs() < 0.01);
    let r = app
        .post("/cynote/sequence/restriction", Some(&token), json!({ "sequence": "GAATTCGAATTC", "enzymes": ["EcoRI"] }))
        .await;
    assert_eq!(r.body["report"]["sites"].as_array().unwrap().len(), 2);
    let r = app.get("/cynote/cynote/results", Some(&token)).await;
    let kinds: Vec<_> = r.body.as_array().unwrap().iter().map(|x| x["kind"].as_str().unwrap()).collect();
    assert_eq!(kinds.len(), 5);
    assert_eq!(kinds.iter().filter(|k| **k == "primer").count(), 1);
}

#[tokio::test]
async fn analysis_input_errors() {
    let app = test_app();
    let token = app.admin().await;
    let r = app.post("/cynote/primer/analyze", Some(&token), json!({ "left_primer": "AAXT", "right_primer": "ACGT" })).await;
    assert_eq!(r.status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(r.error_fields(), ["left primer"]);
    let r = app.post("/cynote/sequence/transform", Some(&token), json!({ "operation": "fold", "sequence": "ATGC" })).await;
    assert_eq!(r.error_fields(), ["operation"]);
    let r = app.post("/cynote/sequence/restriction", Some(&token), json!({ "sequence": "ACGT", "enzymes": "NoSuchI" })).await;
    assert_eq!(r.error_fields(), ["enzymes"]);
    let r = app.post("/cynote/statistics/regression", Some(&token), json!({ "xs": [1, 2], "ys": "a b" })).await;
    assert_eq!(r.error_fields(), ["ys"]);
    let r = app.post("/cynote/statistics/table2x2", Some(&token), json!({ "a": 1, "b": -1, "c": 1 })).await;
    assert_eq!(r.error_fields(), ["b", "d"]);
}

#[tokio::test]
async fn blast_replays_from_cache_and_reports_unrecorded_queries() {
    let app = test_app();
    let token = app.admin().await;
    let fixture = include_str!("../../science/tests/fixtures/blast_tabular.txt");
    let query = "GAATTCGAGCTCGGTACCCGGGGATCCTCTAGAGTCGACCTGCAGGCATGCAAGCTT";
    let req = cynote_science::sequence::blast::BlastRequest::new("blastn", "core_nt", query).unwrap();
    cynote_science::sequence::blast::ResponseCache::new(app.dir.path().join("blast_cache")).put(&req, fixture).unwrap();
    let body = json!({ "program": "blastn", "database": "core_nt", "sequence": query });
    let r = app.post("/cynote/sequence/blast", Some(&token), body).await;
    assert_eq!(r.status, StatusCode::CREATED, "{}", r.body);
    assert_eq!(r.body["report"]["hits"][0]["id"], "L09137.2");
    assert_eq!(r.body["report"]["from_cache"], true);
    let body = json!({ "program": "blastn", "database": "core_nt", "sequence": "ACGTACGT" });
    let r = app.post("/cynote/sequence/blast", Some(&token), body).await;
    assert_eq!(r.status, StatusCode::SERVICE_UNAVAILABLE);
}

#[tokio::test]
async fn statistics_are_returned_not_stored() {
    let app = test_app();
    let token = app.admin().await;
    let before = app.audit_len();
    let r = app.post("/cynote/statistics/descriptive", Some(&token), json!({ "values": "1 2 3 4" })).await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.body);
    assert_eq!(r.body["mean"], 2.5);
    assert_eq!(r.body["median"], 2.5);
    let r = app
        .post("/cynote/statistics/descriptive", Some(&token), json!({ "values": [10, 10], "expected": [0.5, 0.5] }))
        .await;
    assert_eq!(r.body["goodness_of_fit"]["statistic"], 0.0);
    let r = app.post("/cynote/statistics/regression", Some(&token), json!({ "xs": [1, 2, 3], "ys": [2, 4, 6] })).await;
    assert_eq!(r.body["slope"], 2.0);
    assert_eq!(r.body["r"], 1.0);
    let r = app.post("/cynote/statistics/table2x2", Some(&token), json!({ "a": 10, "b": 20, "c": 30, "d": 40 })).await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.body);
    assert!(r.body["measures"]["odds_ratio"].as_f64().unwrap() > 0.0);
    let r = app.post("/cynote/statistics/tablerxc", Some(&token), json!({ "table": [[5, 1], [1, 5]] })).await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.body);
    assert!(r.body["measures"]["gamma"].as_f64().unwrap() > 0.9);
    assert_eq!(r.body["chi_square"]["df"], 1);
    assert_eq!(app.audit_len(), before);
    assert!(app.store().list_results(ADMIN).unwrap().is_empty());
}

#[tokio::test]
async fn backup_to_local_directory() {
    let app = test_app();
    let token = app.admin().await;
    let nb = app.notebook(&token, "Gels").await.to_string();
    let fields = [("notebook_id", nb.as_str()), ("title", "Gel"), ("description", "lane 3")];
    app.multipart("/cynote/cynote/new_entry", &token, &fields, Some(("gel.txt", b"data"))).await;
    let r = app.post("/cynote/savedatabase/backup", Some(&token), json!({})).await;
    assert_eq!(r.status, StatusCode::CREATED, "{}", r.body);
    let name = r.body["dump_name"].as_str().unwrap();
    let dump = app.dir.path().join("backups/cynote_database").join(name);
    let text = std::fs::read_to_string(dump).unwrap();
    assert!(text.starts_with("FORMAT cynote-dump/1"));
    assert_eq!(r.body["attachment_names"].as_array().unwrap().len(), 1);
}
