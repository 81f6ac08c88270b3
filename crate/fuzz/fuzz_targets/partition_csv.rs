#![no_main]

use libfuzzer_sys::fuzz_target;
use minkward::io::{format_partition_csv, parse_partition_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(p) = parse_partition_csv(text) {
        let again = parse_partition_csv(&format_partition_csv(&p))
            .expect("formatted output must reparse");
        assert_eq!(again.labels(), p.labels());
    }
});
