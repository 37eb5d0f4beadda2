use proptest::prelude::*;

use sembed::dataset::{Dataset, VideoSegment};
use sembed::encoding::{EncodedVector, EncodingKind};
use sembed::inference::embed_query;
use sembed::semantics::{semantic_classes, Annotation, Meaning, Relation, RelationMode, Taxonomy};
use sembed::svg::{build_svg, normalize_transitions, SvgNode};

const MODES: [RelationMode; 4] = [RelationMode::Verb, RelationMode::Am, RelationMode::As, RelationMode::Ah];

/// Meanings `v{verb}.v.{i+1}` with synset index and optional parent index below `i`.
fn taxonomy_strategy() -> impl Strategy<Value = Taxonomy> {
    prop::collection::vec((0..3usize, 0..4usize, prop::option::of(any::<prop::sample::Index>())), 1..10).prop_map(
        |spec| {
            let ids: Vec<String> = spec.iter().enumerate().map(|(i, (v, _, _))| format!("v{v}.v.{}", i + 1)).collect();
            let meanings = spec.iter().enumerate().map(|(i, (_, syn, parent))| Meaning {
                meaning_id: ids[i].clone(),
                synset_id: format!("s{syn}"),
                parent: match parent {
                    Some(p) if i > 0 => Some(ids[p.index(i)].clone()),
                    _ => None,
                },
            });
            Taxonomy::from_meanings(meanings).unwrap()
        },
    )
}

fn annotations(tax: &Taxonomy, picks: &[prop::sample::Index]) -> Vec<Annotation> {
    let ids: Vec<&str> = tax.meanings().map(|m| m.meaning_id.as_str()).collect();
    picks.iter().map(|p| Annotation::meaning(ids[p.index(ids.len())])).collect()
}

proptest! {
    #[test]
    fn relations_are_reflexive_symmetric_and_nested(
        tax in taxonomy_strategy(),
        picks in prop::collection::vec(any::<prop::sample::Index>(), 2..8),
    ) {
        let anns = annotations(&tax, &picks);
        for a in &anns {
            for mode in MODES {
                prop_assert!(Relation::new(mode, &tax).related(a, a).unwrap());
            }
            for b in &anns {
                let r: Vec<bool> = MODES.iter().map(|&m| Relation::new(m, &tax).related(a, b).unwrap()).collect();
                let rev: Vec<bool> = MODES.iter().map(|&m| Relation::new(m, &tax).related(b, a).unwrap()).collect();
                prop_assert_eq!(&r, &rev);
                // AM implies AS implies AH
                prop_assert!(!r[1] || r[2]);
                prop_assert!(!r[2] || r[3]);
            }
        }
    }

    #[test]
    fn classes_partition_the_keys(
        tax in taxonomy_strategy(),
        picks in prop::collection::vec(any::<prop::sample::Index>(), 1..12),
        mode in prop::sample::select(MODES.to_vec()),
    ) {
        let anns = annotations(&tax, &picks);
        let classes = semantic_classes(&tax, anns.iter(), mode).unwrap();
        let relation = Relation::new(mode, &tax);
        let mut seen = std::collections::BTreeSet::new();
        for members in classes.classes() {
            prop_assert!(!members.is_empty());
            for m in members {
                prop_assert!(seen.insert(m.clone()), "{} in two classes", m);
            }
        }
        for a in &anns {
            let ka = relation.key(a).unwrap();
            prop_assert!(seen.contains(ka));
            for b in &anns {
                let kb = relation.key(b).unwrap();
                if relation.related_keys(ka, kb).unwrap() {
                    prop_assert_eq!(classes.class_of(ka).unwrap(), classes.class_of(kb).unwrap());
                }
            }
        }
        let am = semantic_classes(&tax, anns.iter(), RelationMode::Am).unwrap().len();
        let as_ = semantic_classes(&tax, anns.iter(), RelationMode::As).unwrap().len();
        let ah = semantic_classes(&tax, anns.iter(), RelationMode::Ah).unwrap().len();
        prop_assert!(am >= as_ && as_ >= ah);
    }

    #[test]
    fn lopo_split_partitions_segments(persons in prop::collection::vec(0..4usize, 2..30)) {
        let segments: Vec<VideoSegment> = persons
            .iter()
            .enumerate()
            .map(|(i, p)| VideoSegment {
                segment_id: format!("s{i}"),
                person_id: format!("p{p}"),
                annotation: Annotation::verb("take"),
                descriptor_path: format!("{i}.txt").into(),
            })
            .collect();
        let ds = Dataset::new(segments, "").unwrap();
        let names = ds.persons();
        for person in &names {
            match ds.split_lopo(person) {
                Ok((train, test)) => {
                    prop_assert_eq!(train.len() + test.len(), ds.len());
                    prop_assert!(test.segments().iter().all(|s| &s.person_id == person));
                    prop_assert!(train.segments().iter().all(|s| &s.person_id != person));
                }
                Err(_) => prop_assert_eq!(names.len(), 1),
            }
        }
    }

    #[test]
    fn transition_rows_are_stochastic(
        points in prop::collection::vec((prop::collection::vec(-5.0..5.0f64, 2), 0..3usize), 2..25),
        m in 0..40usize,
    ) {
        let tax = Taxonomy::default();
        let relation = Relation::new(RelationMode::Verb, &tax);
        let nodes = points
            .iter()
            .enumerate()
            .map(|(i, (v, label))| SvgNode {
                segment_id: format!("s{i}"),
                key: format!("verb{label}"),
                vector: EncodedVector::new(EncodingKind::Bow, v.clone()),
            })
            .collect();
        let g = build_svg(nodes, &relation, m).unwrap();
        let a = normalize_transitions(&g).unwrap();
        for i in 0..g.len() {
            let sum: f64 = a.row(i).map(|(_, p)| p).sum();
            prop_assert!((sum - 1.0).abs() < 1e-9);
            prop_assert!(a.row(i).all(|(j, p)| p > 0.0 && g.edge(i, j).is_some()));
            prop_assert_eq!(a.row(i).count(), g.out_edges(i).len());
        }
    }

    #[test]
    fn query_embedding_is_scale_invariant(
        d in prop::collection::vec(0.01..100.0f64, 1..20),
        z in 1..25usize,
        scale in 0.1..10.0f64,
    ) {
        let a = embed_query(&d, z).unwrap();
        let scaled: Vec<f64> = d.iter().map(|x| x * scale).collect();
        let b = embed_query(&scaled, z).unwrap();
        prop_assert_eq!(&a.neighbors, &b.neighbors);
        prop_assert_eq!(a.neighbors.len(), z.min(d.len()));
        prop_assert!((a.q.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for (x, y) in a.q.iter().zip(&b.q) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }
}
