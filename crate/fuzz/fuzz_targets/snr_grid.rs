#![no_main]

use libfuzzer_sys::fuzz_target;
use noncoh_cap::snr::{SnrGrid, MAX_GRID_POINTS};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(g) = s.parse::<SnrGrid>() {
        assert!(!g.is_empty() && g.len() <= MAX_GRID_POINTS);
        assert!(g.points_db().iter().all(|p| p.is_finite()));
    }
});
