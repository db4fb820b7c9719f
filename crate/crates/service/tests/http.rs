mod common;

use axum::http::StatusCode;
use common::{call, post_json, runtime};
use indic_dbcs::codec::{encode_internal, internal_to_interchange, transliterate_parallel, Fallback};
use indic_dbcs::ime::ImeSession;
use indic_dbcs::shipped::Resources;
use indic_dbcs::Script;
use indic_dbcs_cli::http::router;
use indic_dbcs_cli::ops::ime_state;
use proptest::prelude::*;
use serde_json::json;

#[tokio::test]
async fn new_session_is_empty() {
    let app = common::app();
    let created = call(&app, "POST", "/ime/session", "").await;
    assert_eq!(created.status, StatusCode::CREATED);
    let id = created.json()["id"].as_str().unwrap().to_string();
    let state = call(&app, "GET", &format!("/ime/{id}"), "").await;
    assert_eq!(state.status, StatusCode::OK);
    let v = state.json();
    assert_eq!(v["buffer"], "");
    assert_eq!(v["candidates"], json!([]));
    assert_eq!(v["committed"], "");
    assert_eq!(v["id"], id.as_str());
}

#[tokio::test]
async fn k_a_select_commits_top_candidate() {
    let app = common::app();
    let id = call(&app, "POST", "/ime/session", "").await.json()["id"].as_str().unwrap().to_string();
    post_json(&app, &format!("/ime/{id}/key"), json!({"key": "k"})).await;
    let after_a = post_json(&app, &format!("/ime/{id}/key"), json!({"key": "a"})).await.json();
    let res = Resources::builtin();
    let top = &res.ime.lookup("ka")[0];
    assert_eq!(after_a["candidates"][0]["key"], "ka");
    assert_eq!(after_a["candidates"][0]["output"], json!(top.output.iter().map(|c| c.to_string()).collect::<Vec<_>>()));
    let selected = post_json(&app, &format!("/ime/{id}/select"), json!({"index": 0})).await;
    assert_eq!(selected.status, StatusCode::OK);
    let v = selected.json();
    assert_eq!(v["committed"], "\u{0915}");
    assert_eq!(v["buffer"], "");
}

#[tokio::test]
async fn backspace_and_commit() {
    let app = common::app();
    let id = call(&app, "POST", "/ime/session", "").await.json()["id"].as_str().unwrap().to_string();
    for k in ["q", "z"] {
        post_json(&app, &format!("/ime/{id}/key"), json!({ "key": k })).await;
    }
    let v = call(&app, "POST", &format!("/ime/{id}/backspace"), "").await.json();
    assert_eq!(v["buffer"], "q");
    let v = call(&app, "POST", &format!("/ime/{id}/commit"), "").await.json();
    assert_eq!((v["buffer"].as_str(), v["committed"].as_str()), (Some(""), Some("q")));
}

#[tokio::test]
async fn gloss_endpoint_goldens() {
    let app = common::app();
    let r = post_json(&app, "/gloss", json!({"pair": "te-hi", "sentence": common::TELUGU})).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.json()["gloss"], common::TELUGU_GLOSS);
    let r = post_json(&app, "/gloss", json!({"pair": "hi-en", "sentence": common::HINDI})).await;
    assert_eq!(r.json()["gloss"], common::HINDI_GLOSS);
}

#[tokio::test]
async fn render_endpoint_matches_goldens() {
    let app = common::app();
    for (name, text, size) in common::RENDER_FIXTURES {
        let r = post_json(&app, "/render", json!({"text": text, "size": size})).await;
        assert_eq!(r.status, StatusCode::OK, "{name}");
        assert_eq!(r.content_type.as_deref(), Some("image/x-portable-bitmap"));
        assert_eq!(r.body, common::golden(name), "{name}");
    }
}

#[tokio::test]
async fn error_statuses() {
    let app = common::app();
    let missing = uuid::Uuid::new_v4();
    assert_eq!(call(&app, "GET", &format!("/ime/{missing}"), "").await.status, StatusCode::NOT_FOUND);
    let r = post_json(&app, "/ime/not-a-session/key", json!({"key": "k"})).await;
    assert_eq!((r.status, r.json()["error"].as_str()), (StatusCode::NOT_FOUND, Some("UnknownSession")));

    let id = call(&app, "POST", "/ime/session", "").await.json()["id"].as_str().unwrap().to_string();
    for body in ["{", "{}", r#"{"key": "ab"}"#, r#"{"key": 3}"#] {
        let r = call(&app, "POST", &format!("/ime/{id}/key"), body).await;
        assert_eq!(r.status, StatusCode::BAD_REQUEST, "{body}");
        assert_eq!(r.json()["error"], "BadRequest");
    }
    let r = post_json(&app, &format!("/ime/{id}/select"), json!({"index": 0})).await;
    assert_eq!((r.status, r.json()["error"].as_str()), (StatusCode::UNPROCESSABLE_ENTITY, Some("IndexOutOfRange")));
    let r = post_json(&app, &format!("/ime/{id}/key"), json!({"key": "\n"})).await;
    assert_eq!(r.json()["error"], "NonPrintableKey");

    let cases = [
        ("/gloss", json!({"pair": "ta-hi", "sentence": "x"}), StatusCode::UNPROCESSABLE_ENTITY, "MissingResources"),
        ("/gloss", json!({"pair": "te-hi"}), StatusCode::BAD_REQUEST, "BadRequest"),
        ("/render", json!({"text": "abc"}), StatusCode::UNPROCESSABLE_ENTITY, "UnknownChar"),
        ("/render", json!({"text": "", "size": 20}), StatusCode::BAD_REQUEST, "BadRequest"),
        ("/translit", json!({"text": "x", "from": "Klingon", "to": "Bengali"}), StatusCode::BAD_REQUEST, "BadRequest"),
        ("/translit", json!({"text": "x", "from": "Latin", "to": "Bengali"}), StatusCode::UNPROCESSABLE_ENTITY, "UnregisteredPair"),
        ("/translit", json!({"text": "\u{0929}", "from": "Devanagari", "to": "Bengali"}), StatusCode::UNPROCESSABLE_ENTITY, "NoCounterpart"),
    ];
    for (uri, body, status, name) in cases {
        let r = post_json(&app, uri, body.clone()).await;
        assert_eq!((r.status, r.json()["error"].as_str()), (status, Some(name)), "{uri} {body}");
    }
    let r = call(&app, "POST", "/decode", vec![0x41, 0xB0]).await;
    assert_eq!((r.status, r.json()["error"].as_str()), (StatusCode::UNPROCESSABLE_ENTITY, Some("TruncatedPair")));
    assert!(r.json()["message"].as_str().unwrap().contains("offset 1"));
    let r = call(&app, "POST", "/decode?lossy=true", vec![0x41, 0xB0]).await;
    assert_eq!(r.body, "A\u{FFFD}".as_bytes());
    assert_eq!(call(&app, "POST", "/encode", vec![0xFF]).await.status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn resources_listing_carries_groups() {
    let app = common::app();
    let v = call(&app, "GET", "/resources", "").await.json();
    let list = v["resources"].as_array().unwrap();
    let te_hi = list.iter().find(|e| e["name"] == "te-hi").unwrap();
    assert_eq!(te_hi["kind"], "anusaaraka");
    assert_eq!(te_hi["languages"], json!([{"language": "te", "group": "SouthIndian"}, {"language": "hi", "group": "Northern"}]));
    let table = list.iter().find(|e| e["kind"] == "code_table").unwrap();
    assert_eq!(table["languages"][1], json!({"language": "bn", "group": "Eastern"}));
    assert!(list.iter().all(|e| !e["languages"].as_array().unwrap().is_empty()));
}

#[derive(Debug, Clone)]
enum Op {
    Key(char),
    Select(usize),
    Backspace,
    Commit,
}

fn op() -> impl Strategy<Value = Op> {
    prop_oneof![
        6 => prop::sample::select("kaiAtrnmhsSD\n ".chars().collect::<Vec<_>>()).prop_map(Op::Key),
        2 => (0usize..12).prop_map(Op::Select),
        1 => Just(Op::Backspace),
        1 => Just(Op::Commit),
    ]
}

async fn apply_http(app: &axum::Router, id: &str, op: &Op) -> common::Reply {
    match op {
        Op::Key(k) => post_json(app, &format!("/ime/{id}/key"), json!({ "key": k.to_string() })).await,
        Op::Select(i) => post_json(app, &format!("/ime/{id}/select"), json!({ "index": i })).await,
        Op::Backspace => call(app, "POST", &format!("/ime/{id}/backspace"), "").await,
        Op::Commit => call(app, "POST", &format!("/ime/{id}/commit"), "").await,
    }
}

/// Applies `op` directly; returns the error name on failure.
fn apply_direct(s: &mut ImeSession, op: &Op) -> Option<&'static str> {
    let result = match op {
        Op::Key(k) => s.feed_key(*k).map(|_| ()),
        Op::Select(i) => s.select(*i).map(|_| ()),
        Op::Backspace => {
            s.backspace();
            Ok(())
        }
        Op::Commit => {
            s.commit_raw();
            Ok(())
        }
    };
    result.err().map(|e| e.name())
}

fn sentence() -> impl Strategy<Value = (String, String)> {
    let words = prop_oneof![
        prop::sample::select(vec!["mIru", "pustakaM", "caduvutunnArA", "rAma", "ne", "roTI", "khAI", "Garase", "annaM"])
            .prop_map(String::from),
        "[a-zA-Z]{1,6}[?!.]?",
    ];
    (prop::sample::select(vec!["te-hi", "hi-en", "xx-yy"]).prop_map(String::from), prop::collection::vec(words, 0..8))
        .prop_map(|(p, w)| (p, w.join(" ")))
}

fn table_text() -> impl Strategy<Value = String> {
    let res = Resources::builtin();
    let mut chars: Vec<char> = res.table.iter().filter_map(|(c, _)| c.as_char()).collect();
    chars.extend([' ', 'A', 'z']);
    prop::collection::vec(prop::sample::select(chars), 0..12).prop_map(|c| c.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ime_endpoints_equal_direct_calls(ops in prop::collection::vec(op(), 0..24)) {
        let rt = runtime();
        let res = Resources::builtin();
        let app = common::app();
        rt.block_on(async {
            let id = call(&app, "POST", "/ime/session", "").await.json()["id"].as_str().unwrap().to_string();
            let mut direct = ImeSession::new(res.ime.clone());
            for op in &ops {
                let reply = apply_http(&app, &id, op).await;
                match apply_direct(&mut direct, op) {
                    None => {
                        prop_assert_eq!(reply.status, StatusCode::OK);
                        let expected = serde_json::to_value(ime_state(&id, &direct, &res.table)).unwrap();
                        prop_assert_eq!(reply.json(), expected);
                    }
                    Some(name) => {
                        prop_assert_eq!(reply.status, StatusCode::UNPROCESSABLE_ENTITY);
                        prop_assert_eq!(reply.error(), Some(name.to_string()));
                    }
                }
            }
            Ok(())
        })?;
    }

    #[test]
    fn gloss_endpoint_equals_direct_call((pair, text) in sentence()) {
        let res = Resources::builtin();
        let reply = runtime().block_on(post_json(&common::app(), "/gloss", json!({"pair": pair, "sentence": text})));
        match res.gloss.gloss_sentence(&pair, &text) {
            Ok(g) => prop_assert_eq!(reply.json(), json!({"pair": pair, "gloss": g})),
            Err(e) => prop_assert_eq!(reply.error(), Some(e.name().to_string())),
        }
    }

    #[test]
    fn codec_and_render_endpoints_equal_direct_calls(text in table_text(), size in prop::sample::select(vec![16u16, 24, 48])) {
        let res = Resources::builtin();
        let app = common::app();
        let rt = runtime();
        let encoded = rt.block_on(call(&app, "POST", "/encode", text.clone()));
        let expected = encode_internal(&text, &res.table).unwrap();
        prop_assert_eq!(&encoded.body, &expected);
        let decoded = rt.block_on(call(&app, "POST", "/decode", expected.clone()));
        prop_assert_eq!(&decoded.body, text.as_bytes());
        let ic = rt.block_on(call(&app, "POST", "/interchange", expected.clone()));
        prop_assert_eq!(&ic.body, &internal_to_interchange(&expected).unwrap());
        let back = rt.block_on(call(&app, "POST", "/interchange?reverse=true", ic.body));
        prop_assert_eq!(&back.body, &expected);

        let tr = rt.block_on(post_json(&app, "/translit", json!({"text": text, "from": "Devanagari", "to": "Bengali", "fallback": "mark"})));
        let direct = transliterate_parallel(&text, Script::Devanagari, Script::Bengali, &res.table, Fallback::Mark).unwrap();
        prop_assert_eq!(tr.json(), json!({ "text": direct }));

        let rendered = rt.block_on(post_json(&app, "/render", json!({"text": text, "size": size})));
        match res.render(&text, indic_dbcs::fontlib::FontSize::from_px(size).unwrap()) {
            Ok(r) => prop_assert_eq!(rendered.body, r.to_pbm()),
            Err(e) => prop_assert_eq!(rendered.error(), Some(e.name().to_string())),
        }
    }
}

#[test]
fn interleaved_sessions_do_not_interfere() {
    let rt = runtime();
    let res = Resources::builtin();
    let state = common::state();
    let app = router(state.clone());
    let scripts: Vec<Vec<Op>> = (0..16)
        .map(|i| {
            let keys = ["ka", "kI", "namaste", "ghara", "tra", "hindI", "bhArata", "pustaka"][i % 8];
            let mut ops: Vec<Op> = keys.chars().map(Op::Key).collect();
            ops.push(Op::Select(i % 3));
            ops.extend("ma".chars().map(Op::Key));
            if i % 2 == 0 {
                ops.push(Op::Backspace);
            }
            ops.push(Op::Commit);
            ops
        })
        .collect();
    let ids: Vec<String> = rt.block_on(async {
        let mut ids = Vec::new();
        for _ in &scripts {
            ids.push(call(&app, "POST", "/ime/session", "").await.json()["id"].as_str().unwrap().to_string());
        }
        ids
    });
    // One task per step, all in flight together; each session's steps
    // keep their order through a per-session chain of tasks.
    rt.block_on(async {
        let mut chains = Vec::new();
        for (id, script) in ids.iter().cloned().zip(scripts.clone()) {
            let app = app.clone();
            chains.push(tokio::spawn(async move {
                for op in &script {
                    apply_http(&app, &id, op).await;
                    tokio::task::yield_now().await;
                }
            }));
        }
        for c in chains {
            c.await.unwrap();
        }
    });
    for (id, script) in ids.iter().zip(&scripts) {
        let mut direct = ImeSession::new(res.ime.clone());
        for op in script {
            apply_direct(&mut direct, op);
        }
        let got = rt.block_on(call(&app, "GET", &format!("/ime/{id}"), "")).json();
        assert_eq!(got, serde_json::to_value(ime_state(id, &direct, &res.table)).unwrap());
        assert!(!direct.committed().is_empty());
    }
    assert_eq!(state.sessions.len(), scripts.len());
}
