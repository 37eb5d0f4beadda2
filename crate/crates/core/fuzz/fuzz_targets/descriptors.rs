#![no_main]

use libfuzzer_sys::fuzz_target;
use sembed::dataset::DescriptorSet;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(set) = DescriptorSet::parse_str(text) {
            assert_eq!(DescriptorSet::parse_str(&set.to_text()).unwrap(), set);
        }
    }
});
