//! Query embedding and Markov-walk label inference.
//!
//! A query is attached to its `z` visually closest training nodes with
//! reciprocal-distance probabilities, giving a start distribution `q`. The
//! distribution after `t` steps is `q^T A^t`; the mass on each node is
//! credited to the node's semantic class and the heaviest class wins.

use std::collections::BTreeMap;

use crate::encoding::{self, EncodedVector};
use crate::semantics::SemanticClasses;
use crate::svg::{normalize_transitions, SvgGraph, TransitionMatrix, WEIGHT_EPSILON};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkConfig {
    /// Number of nearest training nodes the query attaches to.
    pub z: usize,
    /// Number of walk steps.
    pub t: usize,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig { z: 4, t: 8 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryEmbedding {
    pub q: Vec<f64>,
    /// Indices of the chosen nodes, nearest first.
    pub neighbors: Vec<usize>,
}

/// Attaches a query to the `z` nearest nodes (ties to the lowest index).
pub fn embed_query(distances_to_nodes: &[f64], z: usize) -> Result<QueryEmbedding> {
    let n = distances_to_nodes.len();
    if n == 0 {
        return Err(Error::invalid("cannot embed a query into an empty graph"));
    }
    if z == 0 {
        return Err(Error::invalid("z must be at least 1"));
    }
    if let Some(d) = distances_to_nodes.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
        return Err(Error::invalid(format!("invalid query distance {d}")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        distances_to_nodes[a]
            .total_cmp(&distances_to_nodes[b])
            .then(a.cmp(&b))
    });
    order.truncate(z.min(n));
    let recip: Vec<f64> = order
        .iter()
        .map(|&i| 1.0 / (distances_to_nodes[i] + WEIGHT_EPSILON))
        .collect();
    let total: f64 = recip.iter().sum();
    let mut q = vec![0.0; n];
    for (&i, r) in order.iter().zip(&recip) {
        q[i] = r / total;
    }
    Ok(QueryEmbedding { q, neighbors: order })
}

/// Visual distance from `query` to every node of `graph`.
pub fn query_distances(graph: &SvgGraph, query: &EncodedVector) -> Result<Vec<f64>> {
    graph
        .nodes()
        .iter()
        .map(|n| encoding::distance(&n.vector, query))
        .collect()
}

/// `q^T A^t`.
pub fn markov_walk(a: &TransitionMatrix, q: &[f64], t: usize) -> Result<Vec<f64>> {
    let mut v = q.to_vec();
    if v.len() != a.len() {
        return Err(Error::invalid(format!(
            "start vector of length {} against {}-node matrix",
            v.len(),
            a.len()
        )));
    }
    for _ in 0..t {
        v = a.left_multiply(&v)?;
    }
    Ok(v)
}

/// Probability per semantic class, ordered by class name.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassDistribution {
    probs: Vec<(String, f64)>,
}

impl ClassDistribution {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (String, f64)>) -> Self {
        let mut map: BTreeMap<String, f64> = BTreeMap::new();
        for (c, p) in pairs {
            *map.entry(c).or_default() += p;
        }
        ClassDistribution { probs: map.into_iter().collect() }
    }

    pub fn get(&self, class: &str) -> f64 {
        self.probs
            .binary_search_by(|(c, _)| c.as_str().cmp(class))
            .map_or(0.0, |i| self.probs[i].1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.probs.iter().map(|(c, p)| (c.as_str(), *p))
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().map(|(_, p)| p).sum()
    }

    /// Most probable class; ties go to the lexicographically smallest name.
    pub fn argmax(&self) -> Option<(&str, f64)> {
        let mut best: Option<(&str, f64)> = None;
        for (c, p) in self.iter() {
            if best.is_none_or(|(_, bp)| p > bp) {
                best = Some((c, p));
            }
        }
        best
    }

    /// Classes by descending probability, ties by name.
    pub fn sorted_desc(&self) -> Vec<(&str, f64)> {
        let mut v: Vec<_> = self.iter().collect();
        v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(b.0)));
        v
    }

    /// `class:prob` pairs by descending probability, comma separated.
    pub fn to_dump(&self) -> String {
        self.sorted_desc()
            .iter()
            .map(|(c, p)| format!("{c}:{p}"))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Credits each node's mass to its semantic class.
pub fn class_distribution(
    node_dist: &[f64],
    graph: &SvgGraph,
    classes: &SemanticClasses,
) -> Result<ClassDistribution> {
    if node_dist.len() != graph.len() {
        return Err(Error::invalid("node distribution does not match graph size"));
    }
    let pairs = graph
        .nodes()
        .iter()
        .zip(node_dist)
        .map(|(n, p)| Ok((classes.class_name_of(&n.key)?.to_string(), *p)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ClassDistribution::from_pairs(pairs))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub label: String,
    pub probability: f64,
    pub distribution: ClassDistribution,
    pub embedding: QueryEmbedding,
}

/// A built graph with its transition matrix and class assignment, ready for queries.
#[derive(Debug, Clone)]
pub struct SembedModel {
    graph: SvgGraph,
    transitions: TransitionMatrix,
    classes: SemanticClasses,
}

impl SembedModel {
    pub fn new(graph: SvgGraph, classes: SemanticClasses) -> Result<Self> {
        if classes.mode() != graph.mode() {
            return Err(Error::invalid("class partition and graph use different modes"));
        }
        for n in graph.nodes() {
            classes.class_of(&n.key)?;
        }
        let transitions = normalize_transitions(&graph)?;
        Ok(SembedModel { graph, transitions, classes })
    }

    pub fn graph(&self) -> &SvgGraph {
        &self.graph
    }

    pub fn transitions(&self) -> &TransitionMatrix {
        &self.transitions
    }

    pub fn classes(&self) -> &SemanticClasses {
        &self.classes
    }

    pub fn classify(&self, query: &EncodedVector, config: WalkConfig) -> Result<Classification> {
        classify(&self.graph, &self.transitions, &self.classes, query, config)
    }
}

/// Embed, walk, accumulate per class, and take the argmax.
pub fn classify(
    graph: &SvgGraph,
    transitions: &TransitionMatrix,
    classes: &SemanticClasses,
    query: &EncodedVector,
    config: WalkConfig,
) -> Result<Classification> {
    let distances = query_distances(graph, query)?;
    let embedding = embed_query(&distances, config.z)?;
    let node_dist = markov_walk(transitions, &embedding.q, config.t)?;
    let distribution = class_distribution(&node_dist, graph, classes)?;
    let (label, probability) = distribution
        .argmax()
        .map(|(c, p)| (c.to_string(), p))
        .ok_or_else(|| Error::invalid("empty class distribution"))?;
    Ok(Classification { label, probability, distribution, embedding })
}
