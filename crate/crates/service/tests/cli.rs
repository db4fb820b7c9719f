mod common;

use common::{bin, bin_env, call, post_json, runtime, temp_path};
use indic_dbcs::codec::encode_internal;
use indic_dbcs::shipped::Resources;
use indic_dbcs_cli::cli::run;
use proptest::prelude::*;
use serde_json::json;

fn stderr(o: &std::process::Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn truncated_pair_is_a_data_error() {
    let o = bin(&["decode"], &[0x41, 0x42, 0xB0]);
    assert_eq!(o.status.code(), Some(1));
    let msg = stderr(&o);
    assert!(msg.contains("TruncatedPair") && msg.contains("offset 2"), "{msg}");
    assert!(o.stdout.is_empty());

    let o = bin(&["decode", "--lossy"], &[0x41, 0x42, 0xB0]);
    assert_eq!((o.status.code(), o.stdout.as_slice()), (Some(0), "AB\u{FFFD}".as_bytes()));

    let o = bin(&["interchange", "--reverse"], &[0x0E, 0x30, 0x21]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("UnterminatedShift"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["bogus"][..],
        &["gloss"],
        &["render", "--size", "20"],
        &["translit", "--from", "Klingon", "--to", "Bengali"],
        &["translit", "--from", "Devanagari", "--to", "Bengali", "--fallback", "guess"],
        &["resources"],
        &[],
    ] {
        let o = bin(args, b"");
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
    assert_eq!(bin(&["--help"], b"").status.code(), Some(0));
}

#[test]
fn other_data_errors_exit_1() {
    let o = bin(&["gloss", "--pair", "ta-hi"], b"x\n");
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("MissingResources"));
    let o = bin(&["encode"], "a\u{4E00}".as_bytes());
    assert!(stderr(&o).contains("NotAssigned"));
    let o = bin(&["render"], b"abc");
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("UnknownChar"));
    let o = bin(&["decode", "/no/such/file"], b"");
    assert_eq!(o.status.code(), Some(1));
    let o = bin(&["--resources", "/no/such/dir", "gloss", "--pair", "te-hi"], b"x");
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn gloss_prints_golden_lines() {
    let o = bin(&["gloss", "--pair", "te-hi"], common::TELUGU.as_bytes());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8(o.stdout).unwrap(), format!("{}\n", common::TELUGU_GLOSS));
    let input = format!("{}\n{}\n", common::HINDI, common::HINDI);
    let o = bin(&["gloss", "--pair", "hi-en"], input.as_bytes());
    assert_eq!(String::from_utf8(o.stdout).unwrap(), format!("{0}\n{0}\n", common::HINDI_GLOSS));
}

#[test]
fn render_writes_golden_files() {
    for (name, text, size) in common::RENDER_FIXTURES {
        let out = temp_path(&format!("{name}.pbm"));
        let size = size.to_string();
        let o = bin(&["render", "--size", &size, "--out", out.to_str().unwrap()], format!("{text}\n").as_bytes());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert_eq!(std::fs::read(&out).unwrap(), common::golden(name), "{name}");
        std::fs::remove_file(out).unwrap();
    }
}

#[test]
fn codec_commands() {
    let res = Resources::builtin();
    let text = "ab \u{0915}\u{093F}\u{0995}";
    let input = temp_path("codec.txt");
    std::fs::write(&input, text).unwrap();
    let o = bin(&["encode", input.to_str().unwrap()], b"");
    let internal = encode_internal(text, &res.table).unwrap();
    assert_eq!(o.stdout, internal);
    let ic = bin(&["interchange"], &internal).stdout;
    assert!(ic.iter().all(|&b| b < 0x80));
    assert_eq!(bin(&["interchange", "--reverse"], &ic).stdout, internal);
    assert_eq!(bin(&["decode", "-"], &internal).stdout, text.as_bytes());
    std::fs::remove_file(input).unwrap();

    let o = bin(&["translit", "--from", "Devanagari", "--to", "Bengali"], "\u{0915}\u{093F}".as_bytes());
    assert_eq!(o.stdout, "\u{0995}\u{09BF}".as_bytes());
    let o = bin(&["translit", "--from", "devanagari", "--to", "bengali", "--fallback", "mark"], "\u{0929}".as_bytes());
    assert_eq!(o.stdout, "*\u{0929}".as_bytes());
}

#[test]
fn coverage_command() {
    let o = bin(&["coverage", "--ids"], b"KA KA KA BN_KA NOPE");
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "tokens\t5\nl1\t3\t0.6000\nl2\t1\t0.2000\nunassigned\t1\t0.2000\n");
    let o = bin(&["coverage"], "\u{0915} \u{0995}".as_bytes());
    assert!(String::from_utf8(o.stdout).unwrap().starts_with("tokens\t2\nl1\t1\t0.5000\nl2\t1\t0.5000\n"));
}

#[test]
fn ime_line_mode() {
    let o = bin(&["ime"], b"ka\n:select 0\nqq\n:commit\n");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.starts_with("buffer: ka\n  0 \u{0915} ka\n"), "{out}");
    assert!(out.ends_with("committed: \u{0915}qq\n"), "{out}");

    let o = bin(&["ime"], b"k\n:page 2\n:select 99\n");
    assert_eq!(o.status.code(), Some(1));
    let out = String::from_utf8(o.stdout.clone()).unwrap();
    assert!(out.contains("  9 ") && out.contains("page 2/"), "{out}");
    assert!(stderr(&o).contains("IndexOutOfRange"));
}

#[test]
fn resources_list_and_override() {
    let o = bin(&["resources", "list"], b"");
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.contains("code_table\tindic\thi:Northern,bn:Eastern\n"), "{out}");
    assert!(out.contains("anusaaraka\tte-hi\tte:SouthIndian,hi:Northern\n"), "{out}");
    assert!(out.contains("conversion_table\thindi\thi:Northern\n"), "{out}");

    // A copy of the shipped data with one lexicon entry changed.
    let dir = temp_path("resources");
    copy_dir(&common::core_resources_dir(), &dir);
    let lexicon = dir.join("anusaaraka/te-hi/lexicon.tsv");
    let text = std::fs::read_to_string(&lexicon).unwrap().replace("pustakaM\tnoun\tpustaka", "pustakaM\tnoun\tkitAba");
    std::fs::write(&lexicon, text).unwrap();
    let dir_str = dir.to_str().unwrap();
    let o = bin(&["--resources", dir_str, "gloss", "--pair", "te-hi"], b"pustakaM");
    assert_eq!(o.stdout, b"kitAba\n");
    let o = bin_env(&["gloss", "--pair", "te-hi"], b"pustakaM", &[("INDIC_DBCS_RESOURCES", dir_str)]);
    assert_eq!(o.stdout, b"kitAba\n");
    std::fs::remove_dir_all(dir).unwrap();
}

fn copy_dir(from: &std::path::Path, to: &std::path::Path) {
    std::fs::create_dir_all(to).unwrap();
    for entry in std::fs::read_dir(from).unwrap() {
        let entry = entry.unwrap();
        let target = to.join(entry.file_name());
        if entry.path().is_dir() {
            copy_dir(&entry.path(), &target);
        } else {
            std::fs::copy(entry.path(), target).unwrap();
        }
    }
}

#[test]
fn in_process_run_matches_binary() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(["indic-dbcs", "gloss", "--pair", "te-hi"], &mut common::TELUGU.as_bytes(), &mut out, &mut err);
    assert_eq!(code, 0);
    assert_eq!(out, bin(&["gloss", "--pair", "te-hi"], common::TELUGU.as_bytes()).stdout);
}

/// Runs a command in-process, returning its exit code and stdout.
fn run_cli(args: &[&str], stdin: &[u8]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("indic-dbcs").chain(args.iter().copied());
    let code = run(argv, &mut &stdin[..], &mut out, &mut err);
    (code, out)
}

fn table_text() -> impl Strategy<Value = String> {
    let res = Resources::builtin();
    let mut chars: Vec<char> = res.table.iter().filter_map(|(c, _)| c.as_char()).collect();
    chars.extend([' ', 'k', '?']);
    prop::collection::vec(prop::sample::select(chars), 0..10).prop_map(|c| c.into_iter().collect())
}

fn roman_sentence() -> impl Strategy<Value = String> {
    let word = prop_oneof![
        prop::sample::select(vec!["mIru", "pustakaM", "caduvutunnArA", "rAma", "ne", "roTI", "khAI", "annaM"])
            .prop_map(String::from),
        "[a-zA-Z]{1,6}[?!]?",
    ];
    prop::collection::vec(word, 0..8).prop_map(|w| w.join(" "))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn cli_and_http_bytes_agree(text in table_text(), sentence in roman_sentence(), size in prop::sample::select(vec![16u16, 24, 48])) {
        let app = common::app();
        let rt = runtime();

        let (code, cli) = run_cli(&["render", "--size", &size.to_string()], text.as_bytes());
        let http = rt.block_on(post_json(&app, "/render", json!({"text": text, "size": size})));
        if code == 0 {
            prop_assert_eq!(cli, http.body);
        } else {
            prop_assert_eq!(http.status.as_u16(), 422);
        }

        for pair in ["te-hi", "hi-en"] {
            let (code, cli) = run_cli(&["gloss", "--pair", pair], sentence.as_bytes());
            prop_assert_eq!(code, 0);
            let http = rt.block_on(post_json(&app, "/gloss", json!({"pair": pair, "sentence": sentence})));
            let gloss = http.json()["gloss"].as_str().unwrap().to_string();
            let expected = if sentence.is_empty() { String::new() } else { format!("{gloss}\n") };
            prop_assert_eq!(String::from_utf8(cli).unwrap(), expected);
        }

        let (_, internal) = run_cli(&["encode"], text.as_bytes());
        prop_assert_eq!(&internal, &rt.block_on(call(&app, "POST", "/encode", text.clone())).body);
        let (_, decoded) = run_cli(&["decode"], &internal);
        prop_assert_eq!(&decoded, &rt.block_on(call(&app, "POST", "/decode", internal.clone())).body);
        let (_, ic) = run_cli(&["interchange"], &internal);
        prop_assert_eq!(&ic, &rt.block_on(call(&app, "POST", "/interchange", internal.clone())).body);

        let (_, tr) = run_cli(&["translit", "--from", "Devanagari", "--to", "Bengali", "--fallback", "passthrough"], text.as_bytes());
        let http = rt.block_on(post_json(&app, "/translit", json!({"text": text, "from": "Devanagari", "to": "Bengali", "fallback": "passthrough"})));
        let expected = http.json()["text"].as_str().unwrap().to_string();
        prop_assert_eq!(String::from_utf8(tr).unwrap(), expected);
    }
}
