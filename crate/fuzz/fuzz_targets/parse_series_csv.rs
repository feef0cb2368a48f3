#![no_main]

use floquet_core::runner::parse_series_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(table) = parse_series_csv(text) {
        assert!(table.rows.iter().all(|r| r.len() == table.columns.len()));
        for n in [4, 16, 24] {
            let _ = table.purity_series(n, 1);
        }
    }
});
