#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(expr) = bwpinch::dsl::parse_expr(s) else { return };
    if let Ok(model) = expr.build() {
        // printed models parse back to themselves
        let again = bwpinch::dsl::parse_model(&model.to_string()).expect("display output must parse");
        assert_eq!(again, model);
    }
});
