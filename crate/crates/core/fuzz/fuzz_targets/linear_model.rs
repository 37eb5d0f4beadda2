#![no_main]

use libfuzzer_sys::fuzz_target;
use sembed::baselines::LinearModel;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(model) = LinearModel::parse_str(text) {
            assert_eq!(LinearModel::parse_str(&model.to_text()).unwrap(), model);
        }
    }
});
