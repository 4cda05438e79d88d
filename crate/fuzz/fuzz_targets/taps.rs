#![no_main]

use libfuzzer_sys::fuzz_target;
use noncoh_cap::channel::make_circulant_corr;
use noncoh_cap::snr::parse_taps;

fuzz_target!(|data: &[u8]| {
    let Some((&n, rest)) = data.split_first() else { return };
    let Ok(s) = std::str::from_utf8(rest) else { return };
    let Ok(taps) = parse_taps(s) else { return };
    assert!(taps.iter().all(|t| *t > 0.0 && t.is_finite()));
    if let Ok(r) = make_circulant_corr(n as usize, &taps) {
        assert_eq!(r.rank_q(), taps.len());
        let trace: f64 = r.eigvals().iter().sum();
        assert!((trace - r.n() as f64).abs() < 1e-6 * r.n() as f64);
    }
});
