//! Golden-file and behaviour tests for the command line.
//!
//! Set `NOETHKIT_UPDATE_GOLDEN=1` to rewrite the golden files.

use std::path::PathBuf;
use std::process::Command;

use noethkit_cli::run;
use serde_json::Value;

fn argv(args: &str) -> Vec<String> {
    std::iter::once("noethkit".to_string()).chain(shell_split(args)).collect()
}

/// Splits on spaces; single quotes group.
fn shell_split(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    for ch in s.chars() {
        match ch {
            '\'' => quoted = !quoted,
            ' ' if !quoted => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn json_of(args: &str) -> (i32, Value) {
    let o = run(argv(args));
    let v: Value = serde_json::from_str(&o.stdout).unwrap_or_else(|e| panic!("{args}: not json ({e}): {}", o.stdout));
    (o.code, v)
}

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.json"))
}

const GOLDEN: &[(&str, &str, i32)] = &[
    ("bounds_1122", "bounds --m 1 --n 1 --delta 2 --d 2", 0),
    ("derive_exp", "derive --chain tests/data/exp.json --poly x1*f1 --word 1,1", 0),
    ("jet_exp", "jet --chain tests/data/exp.json --poly f1 --point origin --order 4", 0),
    ("il_bracket", "il --chain tests/data/bracket.json --depth 1", 0),
    ("il_bracket_point", "il --chain tests/data/bracket.json --point 0,0,0", 3),
    ("mult_exp", "mult --chain tests/data/exp.json --system f1-1-x1-x1^2/2 --point 0,1", 0),
    ("mult_cusp", "mult --dim 2 --system 'x1^2-x2^3; x2^2' --point 0,0", 0),
    ("mult_marker", "mult --dim 2 --system 'x1*x2; x1' --point 0,0 --order 8", 4),
    ("mult_trig_marker", "mult --chain tests/data/trig.json --system f1^2+f2^2-1 --point base --order 12", 4),
    (
        "deflicity_curve",
        "deflicity --chain tests/data/trivial2.json --system x2*(x2-x1^2) --rho x1 --point 0,0 --numeric",
        0,
    ),
    ("deflicity_bad", "deflicity --dim 2 --system x2^2 --rho x2 --point 0,0", 0),
    ("deflicity_family", "deflicity --family 'x1^2-eps; x2^2-eps' --point 0,0 --numeric", 0),
    ("deflicity_degenerate", "deflicity --family 'eps*x1; x2' --point 0,0 --numeric", 0),
    ("ni_exp", "ni --chain tests/data/exp.json --rho f1 --k-hat 3 --point origin", 0),
    ("ni_plane", "ni --dim 2 --system x1*x2 --rho x1 --k-hat 2 --point 0,1", 0),
    (
        "perturb_verify",
        "perturb-verify --dim 2 --system x2*(x2-x1^2) --rho x1 --point 0,0 --e-prime x1^4 --k-hat 1 --seed 7",
        0,
    ),
    ("sard", "sard --dim 2 --system x2 --rho x1 --point 0,0 --e x1 --k-hat 2 --seed 3", 0),
    ("loja", "loja --m 1 --n 1 --delta 2 --d 2 --f x1^2 --g x1", 0),
    ("grid_small", "verify-bounds-grid --max-mn 1 --max-d 2", 0),
    ("parse_error", "mult --dim 2 --system x1^ --point 0,0", 2),
    ("ledger_free_precondition", "mult --dim 2 --system 'x1+1; x2' --point 0,0", 2),
];

#[test]
fn golden_outputs() {
    let update = std::env::var_os("NOETHKIT_UPDATE_GOLDEN").is_some();
    for (name, args, code) in GOLDEN {
        let o = run(argv(args));
        assert_eq!(o.code, *code, "{name}: exit code; stderr {}", o.stderr);
        let path = golden_path(name);
        if update {
            std::fs::write(&path, &o.stdout).unwrap();
            continue;
        }
        let want = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
        assert_eq!(o.stdout, want, "{name}: output differs from golden file");
    }
}

#[test]
fn schema_shape() {
    for (name, args, code) in GOLDEN {
        let (c, v) = json_of(args);
        assert_eq!(c, *code);
        let obj = v.as_object().unwrap();
        assert!(obj["command"].is_string(), "{name}");
        assert!(obj["inputs"].is_object(), "{name}");
        let has_result = obj.contains_key("result");
        let has_error = obj.contains_key("error");
        assert!(has_result ^ has_error, "{name}");
        assert_eq!(obj.len(), 3, "{name}");
        assert!(!has_error || c != 0, "{name}");
        if has_error {
            assert!(obj["error"]["kind"].is_string() && obj["error"]["message"].is_string());
        }
    }
}

#[test]
fn spec_values() {
    let (_, v) = json_of("bounds --m 1 --n 1 --delta 2 --d 2");
    let r = &v["result"];
    assert_eq!(r["d_il"]["value"], "20741");
    assert_eq!(r["mult_rough"]["power"], "2^128");
    assert_eq!(r["main_bound"]["power"], "2^268435456");
    assert_eq!(r["loja_exponent"]["power"], "12^134217728");
    let lo = r["main_bound"]["log10"][0].as_f64().unwrap();
    let hi = r["main_bound"]["log10"][1].as_f64().unwrap();
    let exact = 268435456.0 * 2f64.log10();
    assert!(lo <= exact && exact <= hi && hi - lo < 1e-3);

    let (_, v) = json_of("deflicity --chain tests/data/trivial2.json --system x2*(x2-x1^2) --rho x1 --point 0,0");
    assert_eq!(v["result"]["value"], 2);
    let (_, v) = json_of("deflicity --family x1^2-eps --point 0 --numeric");
    assert_eq!((v["result"]["value"].clone(), v["result"]["agree"].clone()), (2.into(), true.into()));
    let (_, v) = json_of("il --chain tests/data/bracket.json --depth 1");
    assert_eq!(v["result"]["generators"], serde_json::json!(["-x1 + 1"]));
}

#[test]
fn exit_codes() {
    assert_eq!(run(argv("bounds --m 1")).code, 2);
    assert_eq!(run(argv("no-such-command")).code, 2);
    assert_eq!(run(argv("bounds --m 1 --n 0 --delta 1 --d 1")).code, 2);
    assert_eq!(run(argv("jet --chain tests/data/bracket.json --poly f1 --point 0,0,0")).code, 3);
    assert_eq!(run(argv("jet --chain tests/data/missing.json --poly f1 --point 0")).code, 2);
    assert_eq!(run(argv("deflicity --family 'x1*x2; x1*x2' --point 0,0")).code, 2);
    assert_eq!(run(argv("--help")).code, 0);
}

#[test]
fn deterministic_given_seed() {
    for args in [
        "perturb-verify --dim 2 --system x2*(x2-x1^2) --rho x1 --point 0,0 --e-prime x1^4 --k-hat 1 --seed 99",
        "sard --dim 2 --system x2 --rho x1 --point 0,0 --e x1 --k-hat 2 --trials 5 --seed 12",
        "deflicity --family 'x1^2-eps; x2^2-eps' --point 0,0 --numeric --seed 5",
    ] {
        assert_eq!(run(argv(args)).stdout, run(argv(args)).stdout, "{args}");
    }
}

#[test]
fn binary_matches_library() {
    let args = "--json deflicity --dim 2 --system x2*(x2-x1^2) --rho x1 --point 0,0";
    let out = Command::new(env!("CARGO_BIN_EXE_noethkit"))
        .args(shell_split(args))
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), run(argv(args)).stdout);
    let bad = Command::new(env!("CARGO_BIN_EXE_noethkit")).args(["il", "--chain", "/nonexistent"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
