#![no_main]

use libfuzzer_sys::fuzz_target;
use sembed::semantics::{RelationMode, Taxonomy};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(tax) = Taxonomy::parse_str(text) else { return };
    assert_eq!(Taxonomy::parse_str(&tax.to_text()).unwrap(), tax);
    // ancestor walks must terminate on anything that parsed
    let ids: Vec<String> = tax.meanings().map(|m| m.meaning_id.clone()).collect();
    for a in ids.iter().take(8) {
        for b in ids.iter().take(8) {
            let _ = tax.related_meanings(RelationMode::Ah, a, b);
        }
    }
});
