#![no_main]

use beamfrac_core::io::output::{convergence_csv, history_csv, parse_convergence, parse_history};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rows) = parse_history(text) {
        let written = history_csv(&rows).expect("parsed history has increasing steps");
        assert_eq!(parse_history(&written).unwrap(), rows);
    }
    if let Ok(rows) = parse_convergence(text) {
        let written = convergence_csv(&rows).unwrap();
        assert_eq!(parse_convergence(&written).unwrap(), rows);
    }
});
