#![no_main]

use libfuzzer_sys::fuzz_target;
use sembed::svg::{normalize_transitions, SvgGraph};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(graph) = SvgGraph::parse_str(text) else { return };
    assert_eq!(SvgGraph::parse_str(&graph.to_text()).unwrap(), graph);
    if let Ok(a) = normalize_transitions(&graph) {
        for i in 0..a.len() {
            let sum: f64 = a.row(i).map(|(_, p)| p).sum();
            assert!((sum - 1.0).abs() < 1e-9 || a.row(i).count() == 0);
        }
    }
});
