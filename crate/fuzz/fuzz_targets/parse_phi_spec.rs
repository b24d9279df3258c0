#![no_main]

use libfuzzer_sys::fuzz_target;
use sparse_omp::PhiFunction;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(phi) = text.parse::<PhiFunction>() {
        let again: PhiFunction = phi.to_string().parse().expect("display reparses");
        assert_eq!(again, phi);
        if let Ok(v) = phi.eval(1.0) {
            assert!(v > 0.0 && v <= 1.0);
        }
    }
});
