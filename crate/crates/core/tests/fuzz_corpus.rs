//! Replays the checked-in fuzz seeds through the same checks as the fuzz targets.

use std::fs;
use std::path::PathBuf;

use sembed::baselines::LinearModel;
use sembed::config::parse_config_str;
use sembed::dataset::{parse_manifest_str, DescriptorSet};
use sembed::encoding::Encoder;
use sembed::semantics::Taxonomy;
use sembed::svg::SvgGraph;

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fuzz/corpus").join(target);
    let mut out: Vec<(String, String)> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| {
            let path = e.unwrap().path();
            (path.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&path).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

/// Parses every seed; valid ones must round-trip. Returns the names that parsed.
fn replay<T: PartialEq + std::fmt::Debug, E>(
    target: &str,
    parse: impl Fn(&str) -> Result<T, E>,
    print: impl Fn(&T) -> String,
) -> Vec<String> {
    let mut ok = Vec::new();
    for (name, text) in seeds(target) {
        if let Ok(v) = parse(&text) {
            let again = parse(&print(&v)).unwrap_or_else(|_| panic!("{target}/{name} does not round-trip"));
            assert_eq!(again, v, "{target}/{name}");
            ok.push(name);
        }
    }
    ok
}

#[test]
fn manifest_seeds() {
    let ok = replay("manifest", |t| parse_manifest_str(t, "").map(|d| d.segments().to_vec()), |segs| {
        sembed::dataset::Dataset::new(segs.clone(), "").unwrap().to_manifest()
    });
    assert_eq!(ok, ["synthetic.tsv", "verbs.tsv"]);
}

#[test]
fn descriptor_seeds() {
    assert_eq!(replay("descriptors", DescriptorSet::parse_str, DescriptorSet::to_text).len(), 2);
}

#[test]
fn taxonomy_seeds() {
    let ok = replay("taxonomy", Taxonomy::parse_str, Taxonomy::to_text);
    assert_eq!(ok, ["hierarchy.tsv", "synthetic.tsv"]);
}

#[test]
fn encoder_seeds() {
    assert_eq!(replay("encoder_model", Encoder::parse_str, Encoder::to_text).len(), 2);
}

#[test]
fn linear_seeds() {
    assert_eq!(replay("linear_model", LinearModel::parse_str, LinearModel::to_text).len(), 2);
}

#[test]
fn graph_seeds() {
    let ok = replay("graph_dump", SvgGraph::parse_str, SvgGraph::to_text);
    assert_eq!(ok, ["as.txt"]);
}

#[test]
fn config_seeds() {
    for (name, text) in seeds("config") {
        let map = parse_config_str(&text).unwrap();
        assert_eq!(map.get("max_iters").map(String::as_str), Some("50"), "{name}");
    }
}
