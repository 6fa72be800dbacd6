#![no_main]

use bagminhash::harness::TestCase;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(case) = TestCase::parse("fuzz", text) {
        let j = case.expected_jaccard();
        assert!((0.0..=1.0).contains(&j));
        assert_eq!(TestCase::parse("fuzz", &case.to_text()).expect("serialized case parses"), case);
    }
});
