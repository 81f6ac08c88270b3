#![no_main]

use libfuzzer_sys::fuzz_target;
use minkward::io::parse_sidecar_json;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(sidecar) = parse_sidecar_json(text) {
        let rendered = serde_json::to_string(&sidecar).expect("sidecars serialize");
        let again = parse_sidecar_json(&rendered).expect("rendered sidecar must reparse");
        assert_eq!(again, sidecar);
    }
});
