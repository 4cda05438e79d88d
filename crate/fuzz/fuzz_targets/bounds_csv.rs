#![no_main]

use libfuzzer_sys::fuzz_target;
use noncoh_cap_cli::table::{parse_bounds_csv, parse_sweep_csv, to_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(rows) = parse_bounds_csv(s) {
        let once = to_csv(&rows).unwrap();
        let twice = to_csv(&parse_bounds_csv(&once).unwrap()).unwrap();
        assert_eq!(once, twice);
    }
    if let Ok(rows) = parse_sweep_csv(s) {
        let once = to_csv(&rows).unwrap();
        assert_eq!(to_csv(&parse_sweep_csv(&once).unwrap()).unwrap(), once);
    }
});
