#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        // The parser must never panic, and anything it accepts must survive
        // an emit/parse round trip unchanged.
        if let Ok(observations) = chanrank::io::parse_observations(text) {
            let emitted = chanrank::io::emit_observations(&observations);
            let reparsed = chanrank::io::parse_observations(&emitted)
                .expect("emitted observations must parse");
            assert_eq!(reparsed, observations);
        }
    }
});
