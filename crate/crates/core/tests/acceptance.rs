//! Acceptance criteria AC1 to AC8, one line each.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use serde_json::Value;
use twobridge::cli::validate_classification_document;
use twobridge::selftest::{ac1, ac2, ac3, ac4, ac5, ac6, ac7};

fn twobridge(args: &[&str]) -> (Option<i32>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_twobridge"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code(), out.stdout)
}

fn ac8() -> Result<String, String> {
    let examples: [(&[&str], i32); 3] = [
        (
            &[
                "classify", "--link", "[2,3,-2]", "--slope", "0", "--format", "json",
            ],
            0,
        ),
        (&["convert", "--cf", "[6,3,6]"], 0),
        (&["classify", "--link", "1/2", "--slope", "3"], 3),
    ];
    let mut docs = Vec::new();
    for (args, code) in examples {
        let (c1, first) = twobridge(args);
        let (c2, second) = twobridge(args);
        let line = args.join(" ");
        if first != second || c1 != c2 {
            return Err(format!("`{line}` is not deterministic"));
        }
        if c1 != Some(code) {
            return Err(format!("`{line}` exited with {c1:?}, expected {code}"));
        }
        docs.push(serde_json::from_slice::<Value>(&first).map_err(|e| format!("`{line}`: {e}"))?);
    }
    let classify = &docs[0]["result"];
    validate_classification_document(classify).map_err(|e| format!("schema: {e}"))?;
    let c = &classify["classification"];
    if c["kind"] != "toroidal" || c["graph_manifold"] != true || c["family"] != "T2a" {
        return Err(format!("classify example gave {c}"));
    }
    if docs[1]["result"]["slope"] != "19/120" {
        return Err(format!("convert example gave {}", docs[1]));
    }
    if docs[2]["status"] != "not_applicable" || docs[2]["error"]["reason"] != "not_hyperbolic" {
        return Err(format!("non-hyperbolic example gave {}", docs[2]));
    }
    let start = Instant::now();
    let (code, out) = twobridge(&["selftest", "--level", "full"]);
    let elapsed = start.elapsed();
    if code != Some(0) {
        return Err(format!(
            "selftest full failed: {}",
            String::from_utf8_lossy(&out)
        ));
    }
    if elapsed > Duration::from_secs(60) {
        return Err(format!("selftest full took {elapsed:?}"));
    }
    Ok(format!(
        "3 examples; selftest full in {:.1}s",
        elapsed.as_secs_f64()
    ))
}

type Criterion = (
    &'static str,
    &'static str,
    Box<dyn Fn() -> Result<String, String>>,
);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("AC1", "round trip", Box::new(|| ac1(200, false))),
        ("AC2", "convention validator", Box::new(|| ac2(50))),
        ("AC3", "golden classifications", Box::new(|| ac3(false))),
        ("AC4", "family consistency", Box::new(|| ac4(10, false))),
        ("AC5", "note identity", Box::new(|| ac5(20))),
        ("AC6", "oracle equivalence", Box::new(|| ac6(60, 30, false))),
        ("AC7", "symmetry suite", Box::new(|| ac7(40))),
        ("AC8", "cli contract", Box::new(ac8)),
    ];
    let mut failures = 0;
    for (id, name, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("{id} PASS {name} ({detail}; {secs:.2}s)"),
            Err(detail) => {
                failures += 1;
                println!("{id} FAIL {name}: {detail} ({secs:.2}s)");
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
