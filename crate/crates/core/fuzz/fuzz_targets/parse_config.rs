#![no_main]

use beamfrac_core::io::config::{parse_config_str, serialize_config};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(config) = parse_config_str(text) {
        // anything accepted must survive a round trip
        let again = parse_config_str(&serialize_config(&config)).expect("serialized config parses");
        assert_eq!(again, config);
    }
});
