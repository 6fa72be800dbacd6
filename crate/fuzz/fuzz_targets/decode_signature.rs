#![no_main]

use bagminhash::signatures::codec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(sig) = codec::decode(data) {
        let bytes = codec::encode(&sig);
        assert_eq!(codec::decode(&bytes).expect("encoded signature decodes"), sig);
    }
    let _ = codec::decode_any(data);
});
