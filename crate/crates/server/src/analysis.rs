//! Primer, sequence and statistics endpoints. Primer and sequence results
//! are stored for the caller; statistics are only returned.

use std::collections::BTreeMap;

use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use cynote_core::model::AnalysisResult;
use cynote_science::primer::{analyze_primer_pair, IonConditions};
use cynote_science::sequence::blast::BlastRequest;
use cynote_science::sequence::{
    back_transcribe, back_translate, catalogue, complement, enzyme, restriction_map,
    reverse_complement, transcribe, translate, NucleotideSequence, ProteinReport, ProteinSequence,
};
use cynote_science::stats::{
    chi_square_gof, chi_square_rxc, descriptive as describe, gk_gamma, kendall_tau_a, kendall_tau_c,
    linear_regression_pearson, Sample, Table2x2, Table2x2Summary, TableRxC,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::auth::User;
use crate::error::ApiError;
use crate::input::{Fields, Input};
use crate::{blocking, AppState};

type Reply = Result<Response, ApiError>;

pub const DEFAULT_MONOVALENT_MM: f64 = 50.0;
pub const DEFAULT_DIVALENT_MM: f64 = 2.5;
pub const DEFAULT_PRIMER_CONCENTRATION_M: f64 = 4e-6;

pub const OPERATIONS: [&str; 6] = [
    "complement",
    "reverse_complement",
    "transcribe",
    "back_transcribe",
    "translate",
    "back_translate",
];

fn pairs(entries: &[(String, String)]) -> Value {
    Value::Array(entries.iter().map(|(k, v)| json!([k, v])).collect())
}

/// Stores the payload as the caller's result and answers 201 with both.
async fn store(state: &AppState, owner: String, kind: &'static str, payload: Vec<(String, String)>, body: Value) -> Reply {
    let result: AnalysisResult = blocking(state, move |s| Ok(s.store_result(&owner, kind, payload)?)).await?;
    let body = json!({ "result_id": result.id, "kind": kind, "payload": pairs(&result.payload), "report": body });
    Ok((StatusCode::CREATED, Json(body)).into_response())
}

fn text<T: Serialize>(value: &T) -> String {
    match serde_json::to_value(value).expect("report serializes") {
        Value::String(s) => s,
        v => v.to_string(),
    }
}

pub async fn primer(State(state): State<AppState>, User(p): User, Input(mut f): Input) -> Reply {
    let left = f.str("left_primer");
    let right = f.str("right_primer");
    let mono = f.opt_f64("monovalent_mm").unwrap_or(DEFAULT_MONOVALENT_MM);
    let div = f.opt_f64("divalent_mm").unwrap_or(DEFAULT_DIVALENT_MM);
    let conc = f.opt_f64("primer_concentration_m").unwrap_or(DEFAULT_PRIMER_CONCENTRATION_M);
    f.finish()?;
    let ions = IonConditions::new(mono, div, conc)?;
    let report = analyze_primer_pair(&left, &right, &ions)?;
    let body = pairs(&report.entries);
    store(&state, p.username, "primer", report.entries, body).await
}

fn nucleotide(f: &mut Fields) -> Result<NucleotideSequence, ApiError> {
    let raw = f.str("sequence");
    let alphabet = f.opt_str("alphabet");
    f.finish()?;
    let cleaned: String = raw.split_whitespace().collect();
    Ok(match alphabet.as_deref() {
        None | Some("auto") => NucleotideSequence::detect(&cleaned)?,
        Some("dna") => NucleotideSequence::dna(&cleaned)?,
        Some("rna") => NucleotideSequence::rna(&cleaned)?,
        Some(_) => return Err(ApiError::field("alphabet", "must be dna, rna or auto")),
    })
}

pub async fn transform(State(state): State<AppState>, User(p): User, Input(mut f): Input) -> Reply {
    let operation = f.str("operation");
    let stop_symbol = f.opt_bool("stop_symbol").unwrap_or(true);
    if !operation.is_empty() && !OPERATIONS.contains(&operation.as_str()) {
        return Err(ApiError::field("operation", format!("must be one of {}", OPERATIONS.join(", "))));
    }
    let mut payload = vec![("operation".to_owned(), operation.clone())];
    let output = if operation == "back_translate" {
        let raw = f.str("sequence");
        f.finish()?;
        let protein = ProteinSequence::parse(&raw.split_whitespace().collect::<String>())?;
        payload.push(("input".into(), protein.as_string()));
        back_translate(&protein).to_string()
    } else {
        let seq = nucleotide(&mut f)?;
        payload.push(("input".into(), seq.to_string()));
        match operation.as_str() {
            "complement" => complement(&seq).to_string(),
            "reverse_complement" => reverse_complement(&seq).to_string(),
            "transcribe" => transcribe(&seq)?.to_string(),
            "back_transcribe" => back_transcribe(&seq)?.to_string(),
            _ => {
                let t = translate(&seq, stop_symbol);
                payload.push(("stop_symbol".into(), stop_symbol.to_string()));
                payload.push(("partial_codon".into(), t.partial_codon.to_string()));
                t.protein
            }
        }
    };
    payload.push(("output".into(), output.clone()));
    let body = json!({ "operation": operation, "output": output });
    store(&state, p.username, "sequence", payload, body).await
}

pub async fn protein(State(state): State<AppState>, User(p): User, Input(mut f): Input) -> Reply {
    let raw = f.str("sequence");
    f.finish()?;
    let protein = ProteinSequence::parse(&raw.split_whitespace().collect::<String>())?;
    let report = ProteinReport::analyze(&protein)?;
    let body = serde_json::to_value(&report).expect("report serializes");
    let mut payload = vec![("analysis".to_owned(), "protein".to_owned())];
    if let Value::Object(map) = &body {
        payload.extend(map.iter().map(|(k, v)| (k.clone(), text(v))));
    }
    store(&state, p.username, "sequence", payload, body).await
}

pub async fn restriction(State(state): State<AppState>, User(p): User, Input(mut f): Input) -> Reply {
    let names = f.str_list("enzymes");
    let seq = nucleotide(&mut f)?;
    let enzymes = if names.is_empty() {
        catalogue()
    } else {
        let mut found = Vec::new();
        let mut unknown = Vec::new();
        for n in &names {
            match enzyme(n) {
                Some(e) => found.push(e),
                None => unknown.push(n.as_str()),
            }
        }
        if !unknown.is_empty() {
            return Err(ApiError::field("enzymes", format!("unknown enzymes: {}", unknown.join(", "))));
        }
        found
    };
    let sites = restriction_map(&seq, &enzymes)?;
    let mut payload = vec![
        ("analysis".to_owned(), "restriction".to_owned()),
        ("sequence".into(), seq.to_string()),
        ("enzymes".into(), enzymes.iter().map(|e| e.name()).collect::<Vec<_>>().join(",")),
        ("sites".into(), sites.len().to_string()),
    ];
    for s in &sites {
        payload.push((
            format!("{} at {}", s.enzyme, s.position),
            format!("cut after base {}", s.cut_position),
        ));
    }
    store(&state, p.username, "sequence", payload, json!({ "sites": sites })).await
}

pub async fn blast(State(state): State<AppState>, User(p): User, Input(mut f): Input) -> Reply {
    let program = f.str("program");
    let database = f.str("database");
    let sequence = f.str("sequence");
    f.finish()?;
    let request = BlastRequest::new(&program, &database, &sequence)?;
    let client = state.blast.clone();
    let result = tokio::task::spawn_blocking(move || client.query(&request))
        .await
        .map_err(|e| ApiError::internal(format!("worker failed: {e}")))??;
    let mut payload = vec![
        ("analysis".to_owned(), "blast".to_owned()),
        ("program".into(), result.request.program.clone()),
        ("database".into(), result.request.database.clone()),
        ("sequence".into(), result.request.sequence.clone()),
        ("hits".into(), result.hits.len().to_string()),
    ];
    for h in &result.hits {
        payload.push((h.id.clone(), format!("score={} e_value={}", h.score, h.e_value)));
    }
    let body = json!({ "hits": result.hits, "from_cache": result.from_cache, "raw": result.raw });
    store(&state, p.username, "sequence", payload, body).await
}

pub async fn descriptive(User(_): User, Input(mut f): Input) -> Reply {
    let values = f.num_list("values");
    let expected = if f.has("expected") { Some(f.num_list("expected")) } else { None };
    f.finish()?;
    let summary = describe(&Sample::new(values.clone())?)?;
    let mut body = serde_json::to_value(&summary).expect("summary serializes");
    if let Some(expected) = expected {
        body["goodness_of_fit"] = serde_json::to_value(chi_square_gof(&values, &expected)?).expect("test serializes");
    }
    Ok(Json(body).into_response())
}

pub async fn regression(User(_): User, Input(mut f): Input) -> Reply {
    let xs = f.num_list("xs");
    let ys = f.num_list("ys");
    f.finish()?;
    Ok(Json(linear_regression_pearson(&xs, &ys)?).into_response())
}

pub async fn table2x2(User(_): User, Input(mut f): Input) -> Reply {
    let a = f.count("a");
    let b = f.count("b");
    let c = f.count("c");
    let d = f.count("d");
    f.finish()?;
    Ok(Json(Table2x2Summary::compute(&Table2x2::new(a, b, c, d)?)?).into_response())
}

pub async fn tablerxc(User(_): User, Input(mut f): Input) -> Reply {
    let grid = f.grid("table");
    f.finish()?;
    let t = TableRxC::new(grid)?;
    let mut measures = BTreeMap::new();
    let mut undefined = BTreeMap::new();
    for (name, r) in [("gamma", gk_gamma(&t)), ("tau_a", kendall_tau_a(&t)), ("tau_c", kendall_tau_c(&t))] {
        match r {
            Ok(v) => {
                measures.insert(name, v);
            }
            Err(e) => {
                undefined.insert(name, e.to_string());
            }
        }
    }
    let chi_square = match chi_square_rxc(&t) {
        Ok(r) => Some(r),
        Err(e) => {
            undefined.insert("chi_square", e.to_string());
            None
        }
    };
    Ok(Json(json!({ "measures": measures, "chi_square": chi_square, "undefined": undefined })).into_response())
}
