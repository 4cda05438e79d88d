#![no_main]

use libfuzzer_sys::fuzz_target;
use noncoh_cap::channel::CorrelationSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(spec) = CorrelationSpec::from_json(s) else { return };
    // Re-encoding must decode to the same spec.
    assert_eq!(CorrelationSpec::from_json(&spec.to_json()).unwrap(), spec);
    if let Ok(r) = spec.build() {
        assert_eq!(r.n(), spec.n);
        assert!(r.rank_q() >= 1 && r.rank_q() <= r.n());
        assert!(r.eigvals().iter().all(|l| *l >= 0.0 && l.is_finite()));
        for i in 0..r.n() {
            assert!((r.entries()[(i, i)].re - 1.0).abs() < 1e-9);
        }
    }
});
