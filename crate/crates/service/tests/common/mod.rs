#![allow(dead_code)]

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};
use std::sync::Arc;

use axum::body::{to_bytes, Body};
use axum::http::{Request, StatusCode};
use axum::Router;
use indic_dbcs::shipped::Resources;
use indic_dbcs_cli::http::{router, AppState};
use indic_dbcs_cli::registry::ResourceRegistry;
use indic_dbcs_cli::session::DEFAULT_IDLE;
use tower::ServiceExt;

pub const TELUGU: &str = "mIru pustakaM caduvutunnArA?";
pub const TELUGU_GLOSS: &str = "Apa pustaka paDha_raHA_[HE|thA]_kyA{23_ba.}?";
pub const HINDI: &str = "rAma ne roTI khAI";
pub const HINDI_GLOSS: &str = "Ram erg. bread ate";

/// `(golden file, text, px)` for the frozen render fixtures.
pub const RENDER_FIXTURES: [(&str, &str, u16); 3] = [
    ("prebase_16", "\u{0915}\u{093F}\u{0937}", 16),
    ("conjunct_24", "\u{0915}\u{094D}\u{0937}\u{0941} \u{0939}\u{093F}\u{0902}", 24),
    ("bengali_48", "\u{0995}\u{09BF}\u{0995}", 48),
];

pub fn golden(name: &str) -> Vec<u8> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/golden").join(format!("{name}.pbm"));
    std::fs::read(path).unwrap()
}

pub fn core_resources_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/resources")
}

pub fn state() -> Arc<AppState> {
    Arc::new(AppState::new(ResourceRegistry::new(Resources::builtin()), DEFAULT_IDLE))
}

pub fn app() -> Router {
    router(state())
}

pub struct Reply {
    pub status: StatusCode,
    pub content_type: Option<String>,
    pub body: Vec<u8>,
}

impl Reply {
    /// The `error` name of an error body.
    pub fn error(&self) -> Option<String> {
        self.json()["error"].as_str().map(String::from)
    }

    pub fn json(&self) -> serde_json::Value {
        serde_json::from_slice(&self.body).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&self.body)))
    }
}

pub async fn call(app: &Router, method: &str, uri: &str, body: impl Into<Vec<u8>>) -> Reply {
    let req = Request::builder().method(method).uri(uri).body(Body::from(body.into())).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let content_type = resp.headers().get("content-type").map(|v| v.to_str().unwrap().to_string());
    let body = to_bytes(resp.into_body(), usize::MAX).await.unwrap().to_vec();
    Reply { status, content_type, body }
}

pub async fn post_json(app: &Router, uri: &str, value: serde_json::Value) -> Reply {
    call(app, "POST", uri, serde_json::to_vec(&value).unwrap()).await
}

pub fn runtime() -> tokio::runtime::Runtime {
    tokio::runtime::Builder::new_multi_thread().worker_threads(4).enable_all().build().unwrap()
}

/// Runs the built binary with `stdin` piped in.
pub fn bin(args: &[&str], stdin: &[u8]) -> Output {
    bin_env(args, stdin, &[])
}

pub fn bin_env(args: &[&str], stdin: &[u8], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_indic-dbcs"));
    cmd.args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped());
    cmd.env_remove("INDIC_DBCS_RESOURCES");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let mut child = cmd.spawn().unwrap();
    child.stdin.take().unwrap().write_all(stdin).unwrap();
    child.wait_with_output().unwrap()
}

pub fn temp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("indic-dbcs-{}-{name}", std::process::id()))
}
