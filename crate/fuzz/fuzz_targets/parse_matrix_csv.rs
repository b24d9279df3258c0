#![no_main]

use libfuzzer_sys::fuzz_target;
use sparse_omp::io::{format_matrix_csv, parse_matrix_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(a) = parse_matrix_csv(text) {
        assert!(a.is_finite());
        let again = parse_matrix_csv(&format_matrix_csv(&a)).expect("formatted matrix reparses");
        assert_eq!(again, a);
    }
});
