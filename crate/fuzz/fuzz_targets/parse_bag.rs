#![no_main]

use bagminhash::WeightedBag;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(bag) = WeightedBag::parse(text) {
        let again = WeightedBag::parse(&bag.to_text()).expect("serialized bag parses");
        assert_eq!(bag, again);
    }
});
