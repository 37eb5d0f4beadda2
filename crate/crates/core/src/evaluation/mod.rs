//! Leave-one-person-out experiments, parameter sweeps and synthetic data.
//!
//! Every fold refits its encoder on descriptors of training persons only,
//! and correctness is judged on the semantic classes of the active mode.

mod report;
mod sweep;
mod synthetic;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

pub use report::{accuracy, confusion, Confusion, EvalRecord, EvalReport, FoldAudit};
pub use sweep::{sweep, sweep_to_text, SweepGrid, SweepRow};
pub use synthetic::{gen_synthetic, generate, SyntheticData, SyntheticPaths, SyntheticSpec};

use crate::baselines::{
    class_priors, class_weights, knn_classify, train_weighted_linear, Labelled, LinearModel, LinearParams,
};
use crate::dataset::{Dataset, DescriptorCache};
use crate::encoding::{subsample, EncodedVector, Encoder, EncodingKind, FitParams};
use crate::inference::{ClassDistribution, SembedModel, WalkConfig};
use crate::semantics::{semantic_classes, Relation, RelationMode, SemanticClasses, Taxonomy};
use crate::svg::{build_svg, SvgNode};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Sembed,
    Knn,
    Linear,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Sembed => "sembed",
            Method::Knn => "knn",
            Method::Linear => "linear",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sembed" => Ok(Method::Sembed),
            "knn" => Ok(Method::Knn),
            "linear" | "svm" => Ok(Method::Linear),
            _ => Err(Error::invalid(format!("unknown method `{s}`"))),
        }
    }
}

pub const DEFAULT_GAMMA_FV: usize = 10;
pub const DEFAULT_GAMMA_BOW: usize = 256;

pub fn default_gamma(kind: EncodingKind) -> usize {
    match kind {
        EncodingKind::Fv => DEFAULT_GAMMA_FV,
        EncodingKind::Bow => DEFAULT_GAMMA_BOW,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub method: Method,
    pub mode: RelationMode,
    pub encoding: EncodingKind,
    pub gamma: usize,
    /// Fraction of each training video's descriptors used to fit the encoder.
    pub fraction: f64,
    pub fit: FitParams,
    pub walk: WalkConfig,
    pub m: usize,
    pub k: usize,
    pub lambda: f64,
    pub linear: LinearParams,
    pub seed: u64,
    /// Evaluate a seeded random subset of this many segments.
    pub sample: Option<usize>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            method: Method::Sembed,
            mode: RelationMode::Verb,
            encoding: EncodingKind::Fv,
            gamma: DEFAULT_GAMMA_FV,
            fraction: 0.25,
            fit: FitParams::default(),
            walk: WalkConfig::default(),
            m: 240,
            k: 5,
            lambda: 0.5,
            linear: LinearParams::default(),
            seed: 0,
            sample: None,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if self.gamma == 0 {
            return Err(Error::invalid("gamma must be at least 1"));
        }
        if !(self.fraction > 0.0 && self.fraction <= 1.0) {
            return Err(Error::invalid(format!("fraction {} outside (0, 1]", self.fraction)));
        }
        if self.walk.z == 0 || self.k == 0 {
            return Err(Error::invalid("z and k must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::invalid(format!("lambda {} outside [0, 1]", self.lambda)));
        }
        Ok(())
    }

    /// Every knob that influences the result, in a fixed order.
    pub fn snapshot(&self) -> Vec<(String, String)> {
        let mut v: Vec<(&str, String)> = vec![
            ("method", self.method.to_string()),
            ("mode", self.mode.to_string()),
            ("encoding", self.encoding.to_string()),
            ("gamma", self.gamma.to_string()),
            ("fraction", self.fraction.to_string()),
            ("max_iters", self.fit.max_iters.to_string()),
            ("tol", self.fit.tol.to_string()),
            ("z", self.walk.z.to_string()),
            ("t", self.walk.t.to_string()),
            ("m", self.m.to_string()),
            ("k", self.k.to_string()),
            ("lambda", self.lambda.to_string()),
            ("epochs", self.linear.epochs.to_string()),
            ("step", self.linear.step.to_string()),
            ("regularization", self.linear.regularization.to_string()),
            ("seed", self.seed.to_string()),
        ];
        if let Some(n) = self.sample {
            v.push(("sample", n.to_string()));
        }
        v.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    fn fold_seed(&self, fold: usize) -> u64 {
        self.seed ^ (fold as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
    }
}

/// One encoded segment inside a fold.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldItem {
    pub segment_id: String,
    pub person_id: String,
    pub key: String,
    pub class: String,
    pub vector: EncodedVector,
}

#[derive(Debug, Clone)]
pub struct PreparedFold {
    pub train: Vec<FoldItem>,
    pub test: Vec<FoldItem>,
    pub audit: FoldAudit,
    seed: u64,
}

/// Encoded folds for one encoder setting, shared across method parameters.
#[derive(Debug, Clone)]
pub struct PreparedFolds {
    pub classes: SemanticClasses,
    pub folds: Vec<PreparedFold>,
}

fn items(
    dataset: &Dataset,
    relation: &Relation<'_>,
    classes: &SemanticClasses,
    vectors: Vec<EncodedVector>,
) -> Result<Vec<FoldItem>> {
    dataset
        .segments()
        .iter()
        .zip(vectors)
        .map(|(s, vector)| {
            let key = relation.key(&s.annotation)?.to_string();
            Ok(FoldItem {
                segment_id: s.segment_id.clone(),
                person_id: s.person_id.clone(),
                class: classes.class_name_of(&key)?.to_string(),
                key,
                vector,
            })
        })
        .collect()
}

fn encode_all(dataset: &Dataset, cache: &DescriptorCache, encoder: &Encoder) -> Result<Vec<EncodedVector>> {
    dataset
        .segments()
        .par_iter()
        .map(|s| encoder.encode(cache.get(dataset, s)?.as_ref()))
        .collect()
}

/// Splits by person and encodes every fold with an encoder fitted on its training side.
pub fn prepare_folds(
    dataset: &Dataset,
    taxonomy: &Taxonomy,
    cache: &DescriptorCache,
    config: &EvalConfig,
) -> Result<PreparedFolds> {
    config.validate()?;
    let persons = dataset.persons();
    if persons.len() < 2 {
        return Err(Error::invalid(format!(
            "leave-one-person-out needs at least 2 persons, found {}",
            persons.len()
        )));
    }
    let relation = Relation::new(config.mode, taxonomy);
    let classes = semantic_classes(taxonomy, dataset.segments().iter().map(|s| &s.annotation), config.mode)?;
    let folds = persons
        .par_iter()
        .enumerate()
        .map(|(f, person)| {
            let (train, test) = dataset.split_lopo(person)?;
            let seed = config.fold_seed(f);
            let descriptors = train
                .segments()
                .iter()
                .map(|s| cache.get(dataset, s))
                .collect::<Result<Vec<_>>>()?;
            let refs: Vec<_> = descriptors.iter().map(|d| d.as_ref()).collect();
            let pool = subsample(&refs, config.fraction, seed)?;
            let pool_persons: BTreeSet<String> = pool
                .sources()
                .iter()
                .map(|&v| train.segments()[v].person_id.clone())
                .collect();
            log::debug!("fold {f} ({person}): {} train, {} test, pool {}", train.len(), test.len(), pool.rows());
            let encoder = Encoder::train(config.encoding, &pool, config.gamma, seed, config.fit)?;
            let train_vecs = encode_all(&train, cache, &encoder)?;
            let test_vecs = encode_all(&test, cache, &encoder)?;
            let audit = FoldAudit {
                held_out: person.clone(),
                train_persons: train.persons().into_iter().collect(),
                pool_persons,
                test_segments: test.segments().iter().map(|s| s.segment_id.clone()).collect(),
            };
            Ok(PreparedFold {
                train: items(&train, &relation, &classes, train_vecs)?,
                test: items(&test, &relation, &classes, test_vecs)?,
                audit,
                seed,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PreparedFolds { classes, folds })
}

/// A classifier trained on one fold.
#[derive(Debug, Clone)]
pub enum FoldModel {
    Sembed(SembedModel),
    Knn(Vec<Labelled>),
    Linear(LinearModel),
}

impl FoldModel {
    pub fn train(
        fold: &PreparedFold,
        classes: &SemanticClasses,
        taxonomy: &Taxonomy,
        config: &EvalConfig,
    ) -> Result<Self> {
        let labelled = || -> Vec<Labelled> {
            fold.train
                .iter()
                .map(|t| Labelled { class: t.class.clone(), vector: t.vector.clone() })
                .collect()
        };
        Ok(match config.method {
            Method::Sembed => {
                let nodes = fold
                    .train
                    .iter()
                    .map(|t| SvgNode {
                        segment_id: t.segment_id.clone(),
                        key: t.key.clone(),
                        vector: t.vector.clone(),
                    })
                    .collect();
                let relation = Relation::new(config.mode, taxonomy);
                let graph = build_svg(nodes, &relation, config.m)?;
                FoldModel::Sembed(SembedModel::new(graph, classes.clone())?)
            }
            Method::Knn => FoldModel::Knn(labelled()),
            Method::Linear => {
                let priors = class_priors(fold.train.iter().map(|t| t.class.as_str()))?;
                let weights = class_weights(&priors, config.lambda)?;
                let params = LinearParams { seed: fold.seed, ..config.linear };
                FoldModel::Linear(train_weighted_linear(&labelled(), &weights, params)?)
            }
        })
    }

    pub fn predict(&self, query: &EncodedVector, config: &EvalConfig) -> Result<(String, f64, ClassDistribution)> {
        match self {
            FoldModel::Sembed(model) => {
                let c = model.classify(query, config.walk)?;
                Ok((c.label, c.probability, c.distribution))
            }
            FoldModel::Knn(train) => {
                let (label, dist) = knn_classify(train, query, config.k)?;
                let p = dist.get(&label);
                Ok((label, p, dist))
            }
            FoldModel::Linear(model) => {
                let label = model.predict(query)?;
                let dist = ClassDistribution::from_pairs([(label.clone(), 1.0)]);
                Ok((label, 1.0, dist))
            }
        }
    }
}

fn evaluate_fold(fold: &PreparedFold, model: &FoldModel, config: &EvalConfig) -> Result<Vec<EvalRecord>> {
    fold.test
        .par_iter()
        .map(|q| {
            let (predicted, probability, distribution) = model.predict(&q.vector, config)?;
            Ok(EvalRecord {
                segment_id: q.segment_id.clone(),
                person_id: q.person_id.clone(),
                true_class: q.class.clone(),
                predicted,
                probability,
                distribution,
            })
        })
        .collect()
}

/// Runs `config.method` on already-encoded folds.
pub fn evaluate_prepared(
    prepared: &PreparedFolds,
    taxonomy: &Taxonomy,
    config: &EvalConfig,
) -> Result<EvalReport> {
    let per_fold = prepared
        .folds
        .par_iter()
        .map(|fold| {
            let model = FoldModel::train(fold, &prepared.classes, taxonomy, config)?;
            evaluate_fold(fold, &model, config)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EvalReport {
        config: config.snapshot(),
        records: per_fold.into_iter().flatten().collect(),
        folds: prepared.folds.iter().map(|f| f.audit.clone()).collect(),
    })
}

/// Leave-one-person-out evaluation of one method.
pub fn run_lopo(
    dataset: &Dataset,
    taxonomy: &Taxonomy,
    cache: &DescriptorCache,
    config: &EvalConfig,
) -> Result<EvalReport> {
    let sampled;
    let dataset = match config.sample {
        Some(n) => {
            sampled = dataset.sample(n, config.seed);
            &sampled
        }
        None => dataset,
    };
    let prepared = prepare_folds(dataset, taxonomy, cache, config)?;
    evaluate_prepared(&prepared, taxonomy, config)
}
