#![no_main]

use libfuzzer_sys::fuzz_target;
use noncoh_cap_cli::McReport;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(r) = McReport::from_json(s) {
        assert_eq!(McReport::from_json(&r.to_json().unwrap()).unwrap(), r);
    }
});
