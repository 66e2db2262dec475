#![no_main]
use bwpinch::report::{decode_json, to_csv, to_json, to_markdown};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(report) = decode_json(s) else { return };
    let json = to_json(&report).expect("decoded reports re-encode");
    assert_eq!(decode_json(&json).expect("encoded reports decode"), report);
    let _ = to_markdown(&report);
    let _ = to_csv(&report);
});
