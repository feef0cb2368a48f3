#![no_main]

use floquet_core::runner::SweepConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(sweep) = SweepConfig::from_toml_str(text) {
        let axes = &sweep.axes;
        let combos = [axes.kind.len(), axes.boundary.len(), axes.family.len(), axes.n.len(), axes.a_z.len(), axes.master_seed.len()]
            .iter()
            .map(|&k| k.max(1))
            .try_fold(1usize, |acc, k| acc.checked_mul(k));
        if combos.is_some_and(|c| c <= 4096) {
            for config in sweep.expand() {
                let _ = config.validate();
            }
        }
    }
});
