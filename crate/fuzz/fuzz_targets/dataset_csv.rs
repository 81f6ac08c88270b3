#![no_main]

use libfuzzer_sys::fuzz_target;
use minkward::io::{format_dataset_csv, parse_dataset_csv, LabelColumn};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    // a successful parse must survive a format/reparse round trip
    if let Ok(d) = parse_dataset_csv(text, None) {
        let again = parse_dataset_csv(&format_dataset_csv(&d.matrix), None)
            .expect("formatted output must reparse");
        assert_eq!(again.matrix.values(), d.matrix.values());
    }
    let _ = parse_dataset_csv(text, Some(&LabelColumn::Index(0)));
    let first_field = text
        .split([',', '\n'])
        .next()
        .unwrap_or("")
        .trim()
        .to_string();
    let _ = parse_dataset_csv(text, Some(&LabelColumn::Name(first_field)));
});
