#![no_main]

use libfuzzer_sys::fuzz_target;
use minkward::io::{format_linkage_csv, parse_linkage_csv};

fuzz_target!(|data: &[u8]| {
    if data.is_empty() {
        return;
    }
    let n_leaves = data[0] as usize + 1;
    let Ok(text) = std::str::from_utf8(&data[1..]) else {
        return;
    };
    if let Ok(d) = parse_linkage_csv(text, n_leaves) {
        let again = parse_linkage_csv(&format_linkage_csv(&d), n_leaves)
            .expect("formatted output must reparse");
        assert_eq!(again, d);
        // cutting at any level must stay within the validated invariants
        for k in 1..=d.n_leaves().min(4) {
            if d.n_leaves() - k <= d.merges().len() {
                let _ = d.cut(k);
            }
        }
    }
});
