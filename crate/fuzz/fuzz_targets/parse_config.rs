#![no_main]

use libfuzzer_sys::fuzz_target;
use sparse_omp::experiments::{ConfigFile, ExperimentConfig, Preset};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(file) = ConfigFile::from_toml_str(text) {
        let mut cfg = ExperimentConfig::preset(Preset::Custom).expect("custom preset");
        if file.apply(&mut cfg).is_ok() {
            let _ = cfg.validate();
        }
    }
});
