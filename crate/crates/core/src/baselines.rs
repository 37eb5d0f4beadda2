//! Comparison classifiers: K-NN and a class-weighted linear one-vs-all model.

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::encoding::{self, EncodedVector, EncodingKind};
use crate::inference::ClassDistribution;
use crate::textio::{self, content_lines, parse_f64, parse_usize};
use crate::{Error, Result};

/// Relative class frequencies.
pub fn class_priors<'a>(labels: impl IntoIterator<Item = &'a str>) -> Result<BTreeMap<String, f64>> {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for l in labels {
        *counts.entry(l.to_string()).or_default() += 1;
    }
    let total: usize = counts.values().sum();
    if total == 0 {
        return Err(Error::invalid("cannot compute priors of an empty training set"));
    }
    Ok(counts
        .into_iter()
        .map(|(c, n)| (c, n as f64 / total as f64))
        .collect())
}

/// Per-class loss weights `1 / prior^lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassWeights {
    pub lambda: f64,
    weights: BTreeMap<String, f64>,
}

impl ClassWeights {
    pub fn uniform<'a>(classes: impl IntoIterator<Item = &'a str>) -> Self {
        ClassWeights {
            lambda: 0.0,
            weights: classes.into_iter().map(|c| (c.to_string(), 1.0)).collect(),
        }
    }

    pub fn get(&self, class: &str) -> Option<f64> {
        self.weights.get(class).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.weights.iter().map(|(c, w)| (c.as_str(), *w))
    }
}

pub fn class_weights(priors: &BTreeMap<String, f64>, lambda: f64) -> Result<ClassWeights> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::invalid(format!("lambda {lambda} outside [0, 1]")));
    }
    let weights = priors
        .iter()
        .map(|(c, p)| {
            if !(p.is_finite() && *p > 0.0) {
                return Err(Error::invalid(format!("prior of `{c}` must be positive, got {p}")));
            }
            Ok((c.clone(), 1.0 / p.powf(lambda)))
        })
        .collect::<Result<_>>()?;
    Ok(ClassWeights { lambda, weights })
}

/// A training example: semantic class name plus encoding.
#[derive(Debug, Clone, PartialEq)]
pub struct Labelled {
    pub class: String,
    pub vector: EncodedVector,
}

/// Majority vote among the `k` nearest training vectors.
///
/// Neighbors are taken by distance, lowest index first on ties. Vote ties
/// go to the class with the smaller mean neighbor distance, then to the
/// smaller name. The returned distribution holds vote fractions.
pub fn knn_classify(train: &[Labelled], query: &EncodedVector, k: usize) -> Result<(String, ClassDistribution)> {
    if train.is_empty() {
        return Err(Error::invalid("K-NN needs a non-empty training set"));
    }
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let dists = train
        .iter()
        .map(|t| encoding::distance(&t.vector, query))
        .collect::<Result<Vec<f64>>>()?;
    let mut order: Vec<usize> = (0..train.len()).collect();
    order.sort_by(|&a, &b| dists[a].total_cmp(&dists[b]).then(a.cmp(&b)));
    order.truncate(k.min(train.len()));

    let mut tally: BTreeMap<&str, (usize, f64)> = BTreeMap::new();
    for &i in &order {
        let e = tally.entry(train[i].class.as_str()).or_default();
        e.0 += 1;
        e.1 += dists[i];
    }
    let (label, _) = tally
        .iter()
        .min_by(|(ca, (na, sa)), (cb, (nb, sb))| {
            nb.cmp(na)
                .then((sa / *na as f64).total_cmp(&(sb / *nb as f64)))
                .then(ca.cmp(cb))
        })
        .expect("at least one neighbor");
    let kk = order.len() as f64;
    let dist = ClassDistribution::from_pairs(tally.iter().map(|(c, (n, _))| (c.to_string(), *n as f64 / kk)));
    Ok((label.to_string(), dist))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearParams {
    pub epochs: usize,
    pub step: f64,
    /// L2 shrinkage applied per update.
    pub regularization: f64,
    pub seed: u64,
}

impl Default for LinearParams {
    fn default() -> Self {
        LinearParams { epochs: 50, step: 0.1, regularization: 1e-4, seed: 0 }
    }
}

/// One linear scorer per class.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    classes: Vec<String>,
    dim: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl LinearModel {
    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn scores(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(Error::DimMismatch { expected: self.dim, found: x.len() });
        }
        Ok((0..self.classes.len())
            .map(|c| dot(&self.weights[c * self.dim..(c + 1) * self.dim], x) + self.bias[c])
            .collect())
    }

    /// Highest-scoring class; ties go to the smaller name.
    pub fn predict(&self, x: &EncodedVector) -> Result<String> {
        let scores = self.scores(&x.values)?;
        let mut best = 0;
        for c in 1..scores.len() {
            if scores[c] > scores[best] {
                best = c;
            }
        }
        Ok(self.classes[best].clone())
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("linear {} {}\n", self.classes.len(), self.dim);
        for (c, name) in self.classes.iter().enumerate() {
            out.push_str(&format!("{name}\t{}\t", self.bias[c]));
            textio::push_row(&mut out, &self.weights[c * self.dim..(c + 1) * self.dim]);
        }
        out
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (hline, header) = lines.next().ok_or_else(|| Error::parse(1, "missing model header"))?;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 3 || head[0] != "linear" {
            return Err(Error::parse(hline, "header must be `linear <classes> <dim>`"));
        }
        let count = parse_usize(head[1], hline, "class count")?;
        let dim = parse_usize(head[2], hline, "dimension")?;
        if count == 0 || dim == 0 || count.saturating_mul(dim) > 1 << 26 {
            return Err(Error::parse(hline, "class count and dim out of range"));
        }
        let mut classes: Vec<String> = Vec::with_capacity(count);
        let mut weights = Vec::with_capacity(count * dim);
        let mut bias = Vec::with_capacity(count);
        for (line, text) in lines {
            if classes.len() == count {
                return Err(Error::parse(line, "unexpected trailing data"));
            }
            let f: Vec<&str> = text.split('\t').collect();
            if f.len() != 3 || f[0].trim().is_empty() {
                return Err(Error::parse(line, "row must be `class bias weights`"));
            }
            let name = f[0].trim().to_string();
            if classes.last().is_some_and(|prev| prev >= &name) {
                return Err(Error::parse(line, "classes must be sorted and distinct"));
            }
            bias.push(parse_f64(f[1].trim(), line)?);
            weights.extend(textio::parse_row(f[2], line, dim)?);
            classes.push(name);
        }
        if classes.len() != count {
            return Err(Error::parse(hline, format!("expected {count} class rows")));
        }
        Ok(LinearModel { classes, dim, weights, bias })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = textio::read_to_string(path)?;
        Self::parse_str(&text).map_err(|e| e.in_file(path))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// One-vs-all hinge-loss SGD with per-sample loss scaled by its class weight.
///
/// Class weights are divided by their maximum, so any set of equal weights
/// trains exactly like the unweighted model.
pub fn train_weighted_linear(
    train: &[Labelled],
    weights: &ClassWeights,
    params: LinearParams,
) -> Result<LinearModel> {
    let first = train.first().ok_or_else(|| Error::invalid("empty training set"))?;
    let dim = first.vector.len();
    let kind: EncodingKind = first.vector.kind;
    if train.iter().any(|t| t.vector.len() != dim || t.vector.kind != kind) {
        return Err(Error::VectorMismatch("training vectors differ in kind or length".into()));
    }
    let mut classes: Vec<String> = train.iter().map(|t| t.class.clone()).collect();
    classes.sort();
    classes.dedup();
    let k = classes.len();
    let mut model = LinearModel {
        dim,
        weights: vec![0.0; k * dim],
        bias: vec![0.0; k],
        classes,
    };
    if k == 1 {
        return Ok(model);
    }
    let class_idx: Vec<usize> = train
        .iter()
        .map(|t| model.classes.binary_search(&t.class).expect("class listed"))
        .collect();
    let raw = model
        .classes
        .iter()
        .map(|c| {
            weights
                .get(c)
                .ok_or_else(|| Error::invalid(format!("no weight for class `{c}`")))
        })
        .collect::<Result<Vec<f64>>>()?;
    let max_w = raw.iter().copied().fold(0.0, f64::max);
    let sample_w: Vec<f64> = raw.iter().map(|w| w / max_w).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut order: Vec<usize> = (0..train.len()).collect();
    let shrink = 1.0 - params.step * params.regularization;
    for _ in 0..params.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let x = &train[i].vector.values;
            let sw = sample_w[class_idx[i]];
            for c in 0..k {
                let w = &mut model.weights[c * dim..(c + 1) * dim];
                let sign = if c == class_idx[i] { 1.0 } else { -1.0 };
                let margin = sign * (dot(w, x) + model.bias[c]);
                if params.regularization > 0.0 {
                    w.iter_mut().for_each(|v| *v *= shrink);
                }
                if margin < 1.0 {
                    let g = params.step * sw * sign;
                    for (v, xi) in w.iter_mut().zip(x) {
                        *v += g * xi;
                    }
                    model.bias[c] += g;
                }
            }
        }
    }
    Ok(model)
}
