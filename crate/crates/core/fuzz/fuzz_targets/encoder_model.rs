#![no_main]

use libfuzzer_sys::fuzz_target;
use sembed::encoding::Encoder;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(enc) = Encoder::parse_str(text) {
            assert_eq!(Encoder::parse_str(&enc.to_text()).unwrap(), enc);
        }
    }
});
