#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(ds) = sembed::dataset::parse_manifest_str(text, "") {
            let again = sembed::dataset::parse_manifest_str(&ds.to_manifest(), "").unwrap();
            assert_eq!(again.segments(), ds.segments());
        }
    }
});
