use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sembed::baselines::{class_priors, class_weights, knn_classify, train_weighted_linear, ClassWeights, Labelled, LinearModel, LinearParams};
use sembed::encoding::{EncodedVector, EncodingKind};

fn sample(rng: &mut ChaCha8Rng, class: &str, center: [f64; 2], spread: f64) -> Labelled {
    Labelled {
        class: class.into(),
        vector: EncodedVector::new(
            EncodingKind::Fv,
            center.iter().map(|c| c + rng.gen_range(-spread..spread)).collect(),
        ),
    }
}

fn blobs(counts: &[(&str, [f64; 2], usize)], seed: u64) -> Vec<Labelled> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    counts
        .iter()
        .flat_map(|&(c, center, n)| (0..n).map(|_| sample(&mut rng, c, center, 0.8)).collect::<Vec<_>>())
        .collect()
}

#[test]
fn separable_classes_are_learned() {
    let train = blobs(&[("a", [3.0, 0.0], 30), ("b", [-3.0, 0.0], 30), ("c", [0.0, 3.0], 30)], 1);
    let w = ClassWeights::uniform(["a", "b", "c"]);
    let model = train_weighted_linear(&train, &w, LinearParams::default()).unwrap();
    for t in &train {
        assert_eq!(model.predict(&t.vector).unwrap(), t.class);
    }
}

#[test]
fn lambda_zero_matches_unweighted() {
    let train = blobs(&[("a", [1.0, 0.0], 40), ("b", [-1.0, 0.2], 10)], 2);
    let priors = class_priors(train.iter().map(|t| t.class.as_str())).unwrap();
    let zero = class_weights(&priors, 0.0).unwrap();
    let uniform = ClassWeights::uniform(["a", "b"]);
    let p = LinearParams { seed: 9, ..LinearParams::default() };
    assert_eq!(
        train_weighted_linear(&train, &zero, p).unwrap(),
        train_weighted_linear(&train, &uniform, p).unwrap()
    );
}

#[test]
fn weighting_recovers_the_minority_class() {
    // 95/5 split with overlapping edges
    let train = blobs(&[("major", [0.0, 0.0], 190), ("minor", [1.6, 1.6], 10)], 3);
    let priors = class_priors(train.iter().map(|t| t.class.as_str())).unwrap();
    let weighted = train_weighted_linear(&train, &class_weights(&priors, 1.0).unwrap(), LinearParams::default()).unwrap();
    let minority: Vec<_> = train.iter().filter(|t| t.class == "minor").collect();
    let recall = |m: &LinearModel| {
        minority.iter().filter(|t| m.predict(&t.vector).unwrap() == "minor").count() as f64 / minority.len() as f64
    };
    assert_eq!(recall(&weighted), 1.0);
}

#[test]
fn linear_model_text_round_trip() {
    let train = blobs(&[("a", [1.0, 0.0], 5), ("b", [-1.0, 0.0], 5)], 4);
    let model = train_weighted_linear(&train, &ClassWeights::uniform(["a", "b"]), LinearParams::default()).unwrap();
    assert_eq!(LinearModel::parse_str(&model.to_text()).unwrap(), model);
}

#[test]
fn knn_ties_prefer_closer_class_then_name() {
    let v = |x: f64| EncodedVector::new(EncodingKind::Bow, vec![x]);
    let train = vec![
        Labelled { class: "b".into(), vector: v(1.0) },
        Labelled { class: "a".into(), vector: v(-2.0) },
        Labelled { class: "c".into(), vector: v(3.0) },
    ];
    // one vote each for a and b, b is nearer
    assert_eq!(knn_classify(&train, &v(0.0), 2).unwrap().0, "b");
    // equal mean distances fall back to the name
    let sym = vec![
        Labelled { class: "y".into(), vector: v(1.0) },
        Labelled { class: "x".into(), vector: v(-1.0) },
    ];
    let (label, dist) = knn_classify(&sym, &v(0.0), 2).unwrap();
    assert_eq!(label, "x");
    assert_eq!(dist.get("x"), 0.5);
}
