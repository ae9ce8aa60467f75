use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use std::path::PathBuf;
use std::process::Command;
use stokes_core::descent::{gstructure_to_json, GStructure};
use stokes_core::numfield::automorphisms;
use stokes_core::random::{self, Shape};
use stokes_core::stokesdata::{extend_scalars_to, from_json, to_json, validate};
use stokes_core::*;

const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/fixtures/exp_one_over_z.json");

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn stokes(args: &[&str]) -> Run {
    stokes_env(args, &[])
}

fn stokes_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut c = Command::new(env!("CARGO_BIN_EXE_stokes"));
    c.args(args);
    for (k, v) in env {
        c.env(k, v);
    }
    let out = c.output().expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn scratch(name: &str, text: &str) -> String {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap_or_else(|e| panic!("{e}: {s}"))
}

/// A datum over Q(i) with entries moved off Q by an isomorphism, and its
/// transported G-structure.
fn descent_input(tag: &str, break_it: bool) -> (String, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let q = FieldSpec::rationals();
    let l = FieldSpec::gaussian();
    let dk = random::datum(&q, &mut rng, &Shape { max_rank: 3, ..Shape::default() }).unwrap();
    let dl = extend_scalars_to(&dk, &l).unwrap();
    let x = random::isomorphism(&dl, &mut rng, &Shape { height: 2, ..Shape::default() }).unwrap();
    let d = x.apply(&dl).unwrap();
    let mut gs = GStructure::natural(&dl, automorphisms(&l).unwrap()).transport(&x).unwrap();
    if break_it {
        let two = FieldElement::from_int(&l, 2);
        let c = &mut gs.maps[1];
        c.base_change = c.base_change.scale(&two);
        for hs in c.trivialization_changes.values_mut() {
            for h in hs.iter_mut() {
                *h = h.scale(&two);
            }
        }
    }
    (
        scratch(&format!("{tag}-datum.json"), &to_json(&d)),
        scratch(&format!("{tag}-gs.json"), &gstructure_to_json(&gs)),
    )
}

#[test]
fn validate_fixture() {
    let r = stokes(&["validate", "--input", FIXTURE]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout, "pass\n");
}

#[test]
fn invalid_datum_exits_one() {
    let text = std::fs::read_to_string(FIXTURE).unwrap();
    let mut doc = json(&text);
    doc["irregular"]["0"]["stokes"][0] = json(r#"[[["2"]]]"#);
    let path = scratch("broken-stokes.json", &doc.to_string());
    let r = stokes(&["--format", "structured", "validate", "--input", &path]);
    assert_eq!(r.code, 1);
    let out = json(&r.stdout);
    assert_eq!(out["report"]["pass"], false);
    assert!(!out["report"]["violations"].as_array().unwrap().is_empty());
}

#[test]
fn structured_output_round_trips() {
    let r = stokes(&["--format", "structured", "validate", "--input", FIXTURE]);
    assert_eq!(r.code, 0);
    let back = from_json(&r.stdout).unwrap();
    let orig = from_json(&std::fs::read_to_string(FIXTURE).unwrap()).unwrap();
    assert_eq!(back, orig);
    assert_eq!(json(&r.stdout)["report"]["command"], "validate");
    // the emitted document is itself valid input
    let again = stokes(&["validate", "--input", &scratch("round.json", &r.stdout)]);
    assert_eq!(again.code, 0);
}

#[test]
fn compare_and_directions() {
    let r = stokes(&["compare", "--phi", "-1@1", "--psi", "1@1", "--arc", "-1/8,1/8"]);
    assert_eq!((r.code, r.stdout.as_str()), (0, "LESS\n"));
    let r = stokes(&["compare", "--phi", "-1@1", "--psi", "1@1", "--arc", "0,1/2"]);
    assert_eq!(r.stdout, "INCOMPARABLE\n");
    let r = stokes(&["stokes-directions", "--phi", "1@1", "--psi", "0"]);
    assert_eq!(r.stdout, "1/4\n3/4\n");
    let r = stokes(&["compare", "--phi", "1@1", "--psi", "1@1", "--arc", "0,1/8"]);
    assert_eq!(r.stdout, "EQUIVALENT\n");
}

#[test]
fn hom_mask_on_an_arc() {
    let r = stokes(&["--format", "structured", "hom", "--source", "1@1", "--target", "-1@1|0", "--arc", "-1/8,1/8"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let m = &json(&r.stdout)["report"]["mask"];
    // an entry dies when the source is strictly below the target somewhere;
    // near theta = 0, z^-1 is below neither -z^-1 nor 0
    assert_eq!(m, &json("[[1],[1]]"));
    let r = stokes(&["--format", "structured", "hom", "--source", "-1@1", "--target", "1@1|0", "--arc", "-1/8,1/8"]);
    assert_eq!(&json(&r.stdout)["report"]["mask"], &json("[[0],[0]]"));
}

#[test]
fn descent_and_determinism() {
    let (d, gs) = descent_input("good", false);
    let args = ["--format", "structured", "descend", "--input", &d, "--gstructure", &gs, "--subfield", "q", "--seed", "5"];
    let a = stokes(&args);
    assert_eq!(a.code, 0, "{}", a.stderr);
    let b = stokes(&args);
    assert_eq!(a.stdout, b.stdout);
    let out = from_json(&a.stdout).unwrap();
    assert_eq!(out.field.degree(), 1);
    assert!(validate(&out).pass);
    assert_eq!(json(&a.stdout)["report"]["config"]["seed"], 5);
}

#[test]
fn broken_cocycle_is_a_domain_error() {
    let (d, gs) = descent_input("broken", true);
    let r = stokes(&["--format", "structured", "descend", "--input", &d, "--gstructure", &gs, "--subfield", "q"]);
    assert_eq!(r.code, 2);
    assert_eq!(json(&r.stdout)["error"]["kind"], "CocycleViolation");
    let r = stokes(&["descend", "--input", &d, "--gstructure", &gs, "--subfield", "q"]);
    assert!(r.stderr.starts_with("error[CocycleViolation]"), "{}", r.stderr);
}

#[test]
fn conjugation_twice_is_the_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let d = random::datum(&FieldSpec::gaussian(), &mut rng, &Shape { max_rank: 3, ..Shape::default() }).unwrap();
    let p = scratch("conj-in.json", &to_json(&d));
    let once = stokes(&["conjugate", "--input", &p]);
    assert_eq!(once.code, 0, "{}", once.stderr);
    let q = scratch("conj-once.json", &once.stdout);
    let twice = stokes(&["conjugate", "--input", &q]);
    assert_eq!(from_json(&twice.stdout).unwrap(), d);
}

#[test]
fn galois_conjugate_and_extend() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let d = random::datum(&FieldSpec::gaussian(), &mut rng, &Shape { max_rank: 2, ..Shape::default() }).unwrap();
    let p = scratch("gal-in.json", &to_json(&d));
    let r = stokes(&["galois-conjugate", "--input", &p, "--image", "0,-1"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(validate(&from_json(&r.stdout).unwrap()).pass);
    let r = stokes(&["galois-conjugate", "--input", &p, "--image", "0,2"]);
    assert_eq!(r.code, 2);
    let r = stokes(&["extend", "--input", FIXTURE, "--field", "sqrt2"]);
    assert_eq!(from_json(&r.stdout).unwrap().field.degree(), 2);
}

#[test]
fn oracle_agrees_on_random_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let shape = Shape { max_rank: 3, ..Shape::default() };
    let d = loop {
        let d = random::datum(&FieldSpec::rationals(), &mut rng, &shape).unwrap();
        if d.irregular.values().any(|x| x.exponents.len() > 1) {
            break d;
        }
    };
    let p = scratch("oracle-in.json", &to_json(&d));
    let r = stokes(&["--format", "structured", "oracle-check", "--input", &p, "--sections"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    let rep = &json(&r.stdout)["report"];
    assert_eq!(rep["contradictions"], 0);
    assert!(!rep["comparisons"].as_array().unwrap().is_empty());
    let r = stokes(&["oracle-check", "--phi", "-1@1", "--psi", "1@1", "--arc", "-1/8,1/8"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.starts_with("exact LESS oracle LESS"), "{}", r.stdout);
}

#[test]
fn environment_sets_grid_defaults() {
    let args = ["oracle-check", "--phi", "-1@1", "--psi", "1@1", "--arc", "-1/8,1/8"];
    let r = stokes_env(&args, &[("STOKES_ORACLE_DECADES", "0")]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("Malformed"), "{}", r.stderr);
    // an explicit flag wins over the environment
    let mut with_flag = vec!["--grid-decades", "4"];
    with_flag.extend(args);
    let r = stokes_env(&with_flag, &[("STOKES_ORACLE_DECADES", "0")]);
    assert_eq!(r.code, 0, "{}", r.stderr);
}

#[test]
fn normalize_lattice_document() {
    // chain -z^-1 < z^-1 over Q(i)/Q, vectors (1, 0) and (i, 1)
    let doc = r#"{
        "field": {"minpoly": [1, 0, 1], "embedding": ["-1/2", "1/2", "1/2", "3/2"]},
        "subfield": {"minpoly": [0, 1], "embedding": ["-1", "1", "-1", "1"]},
        "exponents": [
            {"n": 1, "terms": [{"a": "1", "c": ["-1", "0"]}]},
            {"n": 1, "terms": [{"a": "1", "c": ["1", "0"]}]}
        ],
        "chains": [[0, 1]],
        "vectors": [[["1", "0"], ["0", "0"]], [["0", "1"], ["1", "0"]]]
    }"#;
    let r = stokes(&["--format", "structured", "normalize-lattice", "--input", &scratch("lattice.json", doc)]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    let out = json(&r.stdout);
    assert_eq!(out["report"]["mask"], json("[[1,1],[0,1]]"));
    assert_eq!(out["report"]["matrix"], json(r#"[[["1","0"],["0","-1"]],[["0","0"],["1","0"]]]"#));
    // (1, 1) and (0, i): the bottom components span Q^2 against L-dimension 1
    let bad = doc.replace(
        r#"[[["1", "0"], ["0", "0"]], [["0", "1"], ["1", "0"]]]"#,
        r#"[[["1", "0"], ["1", "0"]], [["0", "0"], ["0", "1"]]]"#,
    );
    let r = stokes(&["normalize-lattice", "--input", &scratch("lattice-bad.json", &bad)]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("RankConditionViolated"), "{}", r.stderr);
}

#[test]
fn usage_errors() {
    let r = stokes(&["validate", "--input", "/does/not/exist.json"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.starts_with("error[Io]"));
    let r = stokes(&["compare", "--phi", "1", "--psi", "0", "--arc", "0,1/8"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("Malformed"));
}
