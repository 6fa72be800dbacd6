#![no_main]

use bagminhash::{GridDescriptor, WeightDiscretization};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(descriptor) = text.parse::<GridDescriptor>() else { return };
    let Ok(grid) = WeightDiscretization::from_descriptor(&descriptor) else { return };
    let top = grid.max_value();
    for w in [0.0, top / 3.0, top / 2.0, top] {
        let k = grid.index_of(w).expect("weight within the grid");
        assert!(grid.value_at(k) <= w);
        if k < grid.max_index() {
            assert!(grid.value_at(k + 1) > w);
        }
    }
    assert!(grid.index_of(f64::NAN).is_err());
});
