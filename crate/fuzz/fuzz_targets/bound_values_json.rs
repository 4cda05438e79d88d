#![no_main]

use libfuzzer_sys::fuzz_target;
use noncoh_cap::bounds::BoundValue;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(v) = BoundValue::parse_json_array(s) {
        let again = serde_json::to_string(&v).unwrap();
        assert_eq!(BoundValue::parse_json_array(&again).unwrap(), v);
    }
});
