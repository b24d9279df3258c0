#![no_main]

use libfuzzer_sys::fuzz_target;
use sparse_omp::signals::generate_signal;
use sparse_omp::SignalCase;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(case) = text.parse::<SignalCase>() {
        let again: SignalCase = case.to_string().parse().expect("display reparses");
        assert_eq!(again, case);
        if let Ok(x) = generate_signal(case, 3, 8, 0) {
            assert!(x.values.iter().all(|v| v.is_finite()));
            assert!(!x.support.is_empty() && x.support.len() <= 3);
        }
    }
});
