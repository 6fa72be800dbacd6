#![no_main]

use bagminhash::signatures::codec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(sig) = codec::from_json(text) {
        let json = codec::to_json(&sig);
        assert_eq!(codec::from_json(&json).expect("serialized signature parses"), sig);
    }
});
