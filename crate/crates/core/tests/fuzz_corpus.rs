//! Replays the fuzz seeds through the same checks the fuzz targets make.

use std::fs;
use std::path::PathBuf;

use bwpinch::dsl::{parse_expr, parse_model};
use bwpinch::report::{decode_json, to_csv, to_json, to_markdown};

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn model_dsl_seeds() {
    let mut valid = 0;
    for (name, data) in seeds("fuzz_model_dsl") {
        let Ok(s) = std::str::from_utf8(&data) else { continue };
        let Ok(expr) = parse_expr(s) else { continue };
        if let Ok(model) = expr.build() {
            assert_eq!(parse_model(&model.to_string()).unwrap(), model, "{name}");
            valid += 1;
        }
    }
    assert!(valid >= 5);
}

#[test]
fn report_json_seeds() {
    let mut valid = 0;
    for (name, data) in seeds("fuzz_report_json") {
        let Ok(s) = std::str::from_utf8(&data) else { continue };
        let Ok(report) = decode_json(s) else { continue };
        let json = to_json(&report).unwrap();
        assert_eq!(decode_json(&json).unwrap(), report, "{name}");
        let _ = to_markdown(&report);
        to_csv(&report).unwrap();
        valid += 1;
    }
    assert!(valid >= 7);
}
