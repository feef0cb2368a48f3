#![no_main]

use floquet_core::runner::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(config) = ExperimentConfig::from_toml_str(text) {
        // validation and resource checks must not panic on any parsed value
        let _ = config.validate();
        let _ = config.check_resources(4);
        let _ = config.hash();
        if let Ok(again) = config.to_toml_string() {
            let back = ExperimentConfig::from_toml_str(&again).expect("serialized config parses");
            assert_eq!(back.hash(), config.hash());
        }
    }
});
