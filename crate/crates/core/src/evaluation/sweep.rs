use rayon::prelude::*;

use super::{evaluate_fold, prepare_folds, EvalConfig, EvalReport, FoldModel, Method, PreparedFolds};
use crate::dataset::{Dataset, DescriptorCache};
use crate::semantics::Taxonomy;
use crate::{Error, Result};

/// Parameter lists; an empty list keeps the base configuration's value.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SweepGrid {
    pub gamma: Vec<usize>,
    pub m: Vec<usize>,
    pub z: Vec<usize>,
    pub t: Vec<usize>,
    pub k: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub gamma: usize,
    pub m: usize,
    pub z: usize,
    pub t: usize,
    pub k: usize,
    pub accuracy: f64,
}

fn or_base(list: &[usize], base: usize) -> Vec<usize> {
    if list.is_empty() {
        vec![base]
    } else {
        list.to_vec()
    }
}

fn train_all(prepared: &PreparedFolds, taxonomy: &Taxonomy, cfg: &EvalConfig) -> Result<Vec<FoldModel>> {
    prepared
        .folds
        .par_iter()
        .map(|f| FoldModel::train(f, &prepared.classes, taxonomy, cfg))
        .collect()
}

fn score(prepared: &PreparedFolds, models: &[FoldModel], cfg: &EvalConfig) -> Result<f64> {
    let records = prepared
        .folds
        .par_iter()
        .zip(models)
        .map(|(f, m)| evaluate_fold(f, m, cfg))
        .collect::<Result<Vec<_>>>()?;
    EvalReport {
        config: Vec::new(),
        records: records.into_iter().flatten().collect(),
        folds: Vec::new(),
    }
    .accuracy()
}

/// One leave-one-person-out run per grid point, ordered gamma, m, z, t, k.
///
/// Folds are encoded once per gamma and graphs built once per (gamma, m).
pub fn sweep(
    dataset: &Dataset,
    taxonomy: &Taxonomy,
    cache: &DescriptorCache,
    base: &EvalConfig,
    grid: &SweepGrid,
) -> Result<Vec<SweepRow>> {
    if grid == &SweepGrid::default() {
        return Err(Error::invalid("sweep grid is empty"));
    }
    let sampled;
    let dataset = match base.sample {
        Some(n) => {
            sampled = dataset.sample(n, base.seed);
            &sampled
        }
        None => dataset,
    };
    let mut rows = Vec::new();
    for gamma in or_base(&grid.gamma, base.gamma) {
        let enc_cfg = EvalConfig { gamma, ..base.clone() };
        let prepared = prepare_folds(dataset, taxonomy, cache, &enc_cfg)?;
        let shared = match base.method {
            Method::Sembed => None,
            _ => Some(train_all(&prepared, taxonomy, &enc_cfg)?),
        };
        for m in or_base(&grid.m, base.m) {
            let graph_cfg = EvalConfig { m, ..enc_cfg.clone() };
            let per_m;
            let models = match &shared {
                Some(models) => models,
                None => {
                    per_m = train_all(&prepared, taxonomy, &graph_cfg)?;
                    &per_m
                }
            };
            for z in or_base(&grid.z, base.walk.z) {
                for t in or_base(&grid.t, base.walk.t) {
                    for k in or_base(&grid.k, base.k) {
                        let mut cfg = graph_cfg.clone();
                        cfg.walk.z = z;
                        cfg.walk.t = t;
                        cfg.k = k;
                        cfg.validate()?;
                        let accuracy = score(&prepared, models, &cfg)?;
                        rows.push(SweepRow { gamma, m, z, t, k, accuracy });
                    }
                }
            }
        }
    }
    Ok(rows)
}

pub fn sweep_to_text(rows: &[SweepRow]) -> String {
    let mut out = String::from("gamma\tm\tz\tt\tk\taccuracy\n");
    for r in rows {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            r.gamma, r.m, r.z, r.t, r.k, r.accuracy
        ));
    }
    out
}
