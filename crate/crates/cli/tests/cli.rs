use std::path::PathBuf;
use std::process::Output;

use serde_json::Value;

fn emalg(args: &[&str]) -> Output {
    std::process::Command::new(env!("CARGO_BIN_EXE_emalg")).args(args).output().unwrap()
}

fn data(rel: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "data", rel].iter().collect();
    p.to_str().unwrap().to_owned()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn first_order_language_is_accepted() {
    let out = emalg(&["decide", "fo", "(a|b)*aa(a|b)*"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["command"], serde_json::json!(["decide", "fo", "(a|b)*aa(a|b)*"]));
    assert_eq!(r["evidence"]["syntactic_size"], 5);
    assert_eq!(r["evidence"]["rank_sweep"]["least_rank"], 2);
}

#[test]
fn parity_is_rejected_with_a_witness() {
    let out = emalg(&["decide", "fo", "(aa)+"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    let ap = &r["evidence"]["aperiodicity"];
    assert_eq!(ap["holds"], false);
    assert!(ap["assignment"].to_string().contains("\"x\""), "{ap}");
    assert!(r["evidence"]["rank_sweep"]["least_rank"].is_null());
}

#[test]
fn check_against_inequalities_and_library() {
    let trivial = data("algebras/trivial.alg");
    assert_eq!(emalg(&["check", &trivial, "x^w x = x^w"]).status.code(), Some(0));
    let z2 = data("algebras/z2.alg");
    assert_eq!(emalg(&["check", &z2, "aperiodic"]).status.code(), Some(1));
    assert_eq!(emalg(&["check", &z2, "commutative"]).status.code(), Some(0));
}

#[test]
fn dfa_files_are_accepted() {
    let out = emalg(&["syn", &data("dfa/contains_aa.dfa")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["evidence"]["size"], 5);
    assert_eq!(emalg(&["decide", "fo", &data("dfa/even_a.dfa")]).status.code(), Some(1));
}

#[test]
fn errors_and_bounds_have_their_own_exit_codes() {
    assert_eq!(emalg(&["syn", "(a|"]).status.code(), Some(2));
    assert_eq!(emalg(&["check", "/nonexistent.alg", "aperiodic"]).status.code(), Some(2));
    assert_eq!(emalg(&["theory", "2", "ab"]).status.code(), Some(3));
    let out = emalg(&["theory", "1", "ab"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn empty_word_is_reported() {
    let out = emalg(&["syn", "a*"]);
    assert_eq!(out.status.code(), Some(0));
    let w = report(&out)["warnings"].to_string();
    assert!(w.contains("empty word"), "{w}");
    assert!(report(&emalg(&["syn", "a+"])).get("warnings").is_none());
}

#[test]
fn decompose_verifies_on_words() {
    let out = emalg(&["decompose", "(a|b)*aa(a|b)*", "--target", "aa"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn laws_reports_are_byte_stable() {
    let args = ["laws", "--seed", "3", "--only", "syntactic-constants,division,wilke-invariance"];
    let (a, b) = (emalg(&args), emalg(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(report(&a)["timing"].is_null());
    let timed = report(&emalg(&["--timing", "laws", "--only", "division"]));
    assert!(timed["timing"].is_object() || timed["timing"].is_number(), "{}", timed["timing"]);
}
