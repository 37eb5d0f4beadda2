//! The semantic-visual graph over training videos.
//!
//! Undirected edges come from three rules:
//!
//! 1. every semantically related pair;
//! 2. the `m` closest semantically unrelated pairs over the whole graph;
//! 3. for every node, its closest semantically unrelated node.
//!
//! Each undirected edge, weighted by visual distance, becomes two directed
//! edges. Rows of the transition matrix are reciprocal weights normalised
//! to sum to one.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::encoding::{self, EncodedVector, EncodingKind};
use crate::semantics::{Relation, RelationMode};
use crate::textio::{self, content_lines, parse_f64, parse_usize};
use crate::{Error, Result};

/// Added to every distance before it is used as a reciprocal weight.
pub const WEIGHT_EPSILON: f64 = 1e-12;

/// Dense symmetric matrix of pairwise visual distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    values: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let d = f(i, j);
                values[i * n + j] = d;
                values[j * n + i] = d;
            }
        }
        DistanceMatrix { n, values }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }
}

pub fn distance_matrix(vectors: &[EncodedVector]) -> Result<DistanceMatrix> {
    if let Some(first) = vectors.first() {
        if let Some(v) = vectors.iter().find(|v| v.kind != first.kind || v.len() != first.len()) {
            return Err(Error::VectorMismatch(format!(
                "mixed encodings {}/{} and {}/{}",
                first.kind,
                first.len(),
                v.kind,
                v.len()
            )));
        }
    }
    let n = vectors.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| encoding::sq_dist(&vectors[i].values, &vectors[j].values).sqrt())
                .collect()
        })
        .collect();
    // take the upper triangle so the result is exactly symmetric
    Ok(DistanceMatrix::from_fn(n, |i, j| rows[i][j]))
}

/// Symmetric boolean matrix of semantic relatedness between nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelatedMatrix {
    n: usize,
    bits: Vec<bool>,
}

impl RelatedMatrix {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut bits = vec![false; n * n];
        for i in 0..n {
            bits[i * n + i] = true;
            for j in i + 1..n {
                let r = f(i, j);
                bits[i * n + j] = r;
                bits[j * n + i] = r;
            }
        }
        RelatedMatrix { n, bits }
    }

    /// Evaluates the relation once per distinct key pair.
    pub fn from_keys(relation: &Relation<'_>, keys: &[&str]) -> Result<Self> {
        let mut distinct: Vec<&str> = keys.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        let idx: Vec<usize> = keys
            .iter()
            .map(|k| distinct.binary_search(k).expect("key present"))
            .collect();
        let u = distinct.len();
        let mut table = vec![false; u * u];
        for a in 0..u {
            for b in a..u {
                let r = relation.related_keys(distinct[a], distinct[b])?;
                table[a * u + b] = r;
                table[b * u + a] = r;
            }
        }
        Ok(Self::from_fn(keys.len(), |i, j| table[idx[i] * u + idx[j]]))
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.n + j]
    }
}

fn by_distance(d: &DistanceMatrix) -> impl Fn(&(usize, usize), &(usize, usize)) -> Ordering + '_ {
    move |a, b| d.get(a.0, a.1).total_cmp(&d.get(b.0, b.1)).then(a.cmp(b))
}

/// Semantically unrelated pairs `(i, j)`, `i < j`, by ascending distance;
/// ties ordered by `i` then `j`.
pub fn rank_global(distances: &DistanceMatrix, related: &RelatedMatrix) -> Vec<(usize, usize)> {
    let n = distances.len();
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| !related.get(i, j))
        .collect();
    pairs.sort_by(by_distance(distances));
    pairs
}

/// Closest node unrelated to `i` (lowest index on ties), if any.
pub fn rank_local(distances: &DistanceMatrix, related: &RelatedMatrix, i: usize) -> Option<usize> {
    (0..distances.len())
        .filter(|&j| j != i && !related.get(i, j))
        .min_by(|&a, &b| distances.get(i, a).total_cmp(&distances.get(i, b)).then(a.cmp(&b)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeTag {
    Semantic,
    Visual,
}

impl fmt::Display for EdgeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeTag::Semantic => "semantic",
            EdgeTag::Visual => "visual",
        })
    }
}

impl FromStr for EdgeTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "semantic" => Ok(EdgeTag::Semantic),
            "visual" => Ok(EdgeTag::Visual),
            _ => Err(Error::invalid(format!("unknown edge tag `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub to: usize,
    pub weight: f64,
    pub tag: EdgeTag,
}

/// A training video as a graph node. `key` is its annotation under the graph's mode.
#[derive(Debug, Clone, PartialEq)]
pub struct SvgNode {
    pub segment_id: String,
    pub key: String,
    pub vector: EncodedVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvgGraph {
    nodes: Vec<SvgNode>,
    adjacency: Vec<Vec<Edge>>,
    mode: RelationMode,
    m: usize,
}

impl SvgGraph {
    pub fn nodes(&self) -> &[SvgNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn mode(&self) -> RelationMode {
        self.mode
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Outgoing edges of `i`, sorted by target.
    pub fn out_edges(&self, i: usize) -> &[Edge] {
        &self.adjacency[i]
    }

    pub fn edge(&self, i: usize, j: usize) -> Option<&Edge> {
        self.adjacency[i]
            .binary_search_by_key(&j, |e| e.to)
            .ok()
            .map(|p| &self.adjacency[i][p])
    }

    /// Undirected edges as `(i, j, tag)` with `i < j`, sorted.
    pub fn undirected_edges(&self) -> Vec<(usize, usize, EdgeTag)> {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, es)| es.iter().filter(move |e| e.to > i).map(move |e| (i, e.to, e.tag)))
            .collect()
    }

    pub fn directed_edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }

    /// Builds the graph from precomputed distance and relatedness matrices.
    pub fn from_matrices(
        nodes: Vec<SvgNode>,
        distances: &DistanceMatrix,
        related: &RelatedMatrix,
        mode: RelationMode,
        m: usize,
    ) -> Result<Self> {
        let n = nodes.len();
        if n < 2 {
            return Err(Error::invalid(format!("graph needs at least 2 nodes, got {n}")));
        }
        if distances.len() != n || related.n != n {
            return Err(Error::invalid("matrix size does not match node count"));
        }
        let mut undirected: BTreeMap<(usize, usize), EdgeTag> = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                if related.get(i, j) {
                    undirected.insert((i, j), EdgeTag::Semantic);
                }
            }
        }
        for pair in rank_global(distances, related).into_iter().take(m) {
            undirected.insert(pair, EdgeTag::Visual);
        }
        for i in 0..n {
            if let Some(j) = rank_local(distances, related, i) {
                undirected.insert((i.min(j), i.max(j)), EdgeTag::Visual);
            }
        }
        let mut adjacency = vec![Vec::new(); n];
        for (&(i, j), &tag) in &undirected {
            let weight = distances.get(i, j) + WEIGHT_EPSILON;
            adjacency[i].push(Edge { to: j, weight, tag });
            adjacency[j].push(Edge { to: i, weight, tag });
        }
        adjacency.iter_mut().for_each(|es| es.sort_by_key(|e| e.to));
        Ok(SvgGraph { nodes, adjacency, mode, m })
    }

    pub fn to_text(&self) -> String {
        let kind = self.nodes[0].vector.kind;
        let len = self.nodes[0].vector.len();
        let mut out = format!("svg\t{}\t{}\n", self.mode, self.m);
        out.push_str(&format!("nodes\t{}\n", self.len()));
        for (i, node) in self.nodes.iter().enumerate() {
            out.push_str(&format!("{i}\t{}\t{}\n", node.segment_id, node.key));
        }
        out.push_str(&format!("edges\t{}\n", self.directed_edge_count()));
        for (i, es) in self.adjacency.iter().enumerate() {
            for e in es {
                out.push_str(&format!("{i}\t{}\t{}\t{}\n", e.to, e.weight, e.tag));
            }
        }
        out.push_str(&format!("vectors\t{kind}\t{len}\n"));
        for (i, node) in self.nodes.iter().enumerate() {
            out.push_str(&format!("{i}\t"));
            textio::push_row(&mut out, &node.vector.values);
        }
        out
    }

    /// Parses a graph dump and checks its structural invariants.
    pub fn parse_str(text: &str) -> Result<Self> {
        let lines: Vec<(usize, &str)> = content_lines(text).collect();
        let mut pos = 0;
        let mut next = |what: &str| -> Result<(usize, Vec<&str>)> {
            let (line, l) = *lines
                .get(pos)
                .ok_or_else(|| Error::parse(lines.last().map_or(1, |x| x.0), format!("missing {what}")))?;
            pos += 1;
            Ok((line, l.split('\t').map(str::trim).collect()))
        };
        let section = |(line, f): &(usize, Vec<&str>), name: &str, width: usize| -> Result<()> {
            if f.len() != width || f[0] != name {
                return Err(Error::parse(*line, format!("expected `{name}` header")));
            }
            Ok(())
        };

        let head = next("graph header")?;
        section(&head, "svg", 3)?;
        let mode: RelationMode = head.1[1].parse().map_err(|e: Error| Error::parse(head.0, e.to_string()))?;
        let m = parse_usize(head.1[2], head.0, "m")?;

        let nh = next("nodes header")?;
        section(&nh, "nodes", 2)?;
        let n = parse_usize(nh.1[1], nh.0, "node count")?;
        if n < 2 || n > lines.len() {
            return Err(Error::parse(nh.0, "node count out of range"));
        }
        let mut ids = Vec::with_capacity(n);
        for i in 0..n {
            let (line, f) = next("node row")?;
            if f.len() != 3 || parse_usize(f[0], line, "node index")? != i {
                return Err(Error::parse(line, format!("expected node row {i}")));
            }
            if f[1].is_empty() || f[2].is_empty() {
                return Err(Error::parse(line, "empty node field"));
            }
            ids.push((f[1].to_string(), f[2].to_string()));
        }

        let eh = next("edges header")?;
        section(&eh, "edges", 2)?;
        let count = parse_usize(eh.1[1], eh.0, "edge count")?;
        if count > lines.len() {
            return Err(Error::parse(eh.0, "edge count out of range"));
        }
        let mut adjacency: Vec<Vec<Edge>> = vec![Vec::new(); n];
        for _ in 0..count {
            let (line, f) = next("edge row")?;
            if f.len() != 4 {
                return Err(Error::parse(line, "edge row needs `i j weight tag`"));
            }
            let i = parse_usize(f[0], line, "edge source")?;
            let to = parse_usize(f[1], line, "edge target")?;
            let weight = parse_f64(f[2], line)?;
            let tag: EdgeTag = f[3].parse().map_err(|e: Error| Error::parse(line, e.to_string()))?;
            if i >= n || to >= n || i == to {
                return Err(Error::parse(line, "edge endpoint out of range or self-loop"));
            }
            if weight <= 0.0 {
                return Err(Error::parse(line, "edge weight must be positive"));
            }
            adjacency[i].push(Edge { to, weight, tag });
        }

        let vh = next("vectors header")?;
        section(&vh, "vectors", 3)?;
        let kind: EncodingKind = vh.1[1].parse().map_err(|e: Error| Error::parse(vh.0, e.to_string()))?;
        let len = parse_usize(vh.1[2], vh.0, "vector length")?;
        let mut nodes = Vec::with_capacity(n);
        for (i, (segment_id, key)) in ids.into_iter().enumerate() {
            let (line, f) = next("vector row")?;
            if f.len() != 2 || parse_usize(f[0], line, "vector index")? != i {
                return Err(Error::parse(line, format!("expected vector row {i}")));
            }
            let values = textio::parse_row(f[1], line, len)?;
            nodes.push(SvgNode { segment_id, key, vector: EncodedVector::new(kind, values) });
        }
        if let Some((line, _)) = lines.get(pos) {
            return Err(Error::parse(*line, "unexpected trailing data"));
        }

        for es in adjacency.iter_mut() {
            es.sort_by_key(|e| e.to);
            if es.windows(2).any(|w| w[0].to == w[1].to) {
                return Err(Error::invalid("graph dump repeats an edge"));
            }
        }
        let graph = SvgGraph { nodes, adjacency, mode, m };
        for i in 0..n {
            if graph.adjacency[i].is_empty() {
                return Err(Error::invalid(format!("node {i} has no outgoing edge")));
            }
            for e in &graph.adjacency[i] {
                match graph.edge(e.to, i) {
                    Some(back) if back.weight == e.weight && back.tag == e.tag => {}
                    _ => return Err(Error::invalid(format!("edge {i}->{} has no matching reverse", e.to))),
                }
            }
        }
        Ok(graph)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = textio::read_to_string(path)?;
        Self::parse_str(&text).map_err(|e| e.in_file(path))
    }

    /// Checks that edge tags agree with `relation` on the stored keys.
    pub fn check_semantics(&self, relation: &Relation<'_>) -> Result<()> {
        if relation.mode != self.mode {
            return Err(Error::invalid(format!(
                "graph was built under mode {} but {} was requested",
                self.mode, relation.mode
            )));
        }
        for (i, j, tag) in self.undirected_edges() {
            let rel = relation.related_keys(&self.nodes[i].key, &self.nodes[j].key)?;
            if rel != (tag == EdgeTag::Semantic) {
                return Err(Error::invalid(format!("edge {i}-{j} tagged {tag} disagrees with the taxonomy")));
            }
        }
        Ok(())
    }
}

/// Builds the graph over `nodes`, whose keys are annotations under `relation`.
pub fn build_svg(nodes: Vec<SvgNode>, relation: &Relation<'_>, m: usize) -> Result<SvgGraph> {
    if nodes.len() < 2 {
        return Err(Error::invalid(format!("graph needs at least 2 nodes, got {}", nodes.len())));
    }
    let vectors: Vec<EncodedVector> = nodes.iter().map(|n| n.vector.clone()).collect();
    let distances = distance_matrix(&vectors)?;
    let keys: Vec<&str> = nodes.iter().map(|n| n.key.as_str()).collect();
    let related = RelatedMatrix::from_keys(relation, &keys)?;
    SvgGraph::from_matrices(nodes, &distances, &related, relation.mode, m)
}

/// Row-stochastic transition matrix in compressed sparse row form.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    probs: Vec<f64>,
}

impl TransitionMatrix {
    /// Normalises reciprocal weights row by row. Columns must be sorted and distinct.
    pub fn from_weights(rows: &[Vec<(usize, f64)>]) -> Result<Self> {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut probs = Vec::new();
        row_ptr.push(0);
        for (i, row) in rows.iter().enumerate() {
            if row.is_empty() {
                return Err(Error::invalid(format!("node {i} has no outgoing edge")));
            }
            if let Some((j, w)) = row.iter().find(|(j, w)| *j >= n || !(w.is_finite() && *w > 0.0)) {
                return Err(Error::invalid(format!("bad edge {i}->{j} with weight {w}")));
            }
            if row.windows(2).any(|p| p[0].0 >= p[1].0) {
                return Err(Error::invalid(format!("row {i} columns not strictly increasing")));
            }
            let total: f64 = row.iter().map(|(_, w)| 1.0 / w).sum();
            for &(j, w) in row {
                cols.push(j);
                probs.push((1.0 / w) / total);
            }
            row_ptr.push(cols.len());
        }
        Ok(TransitionMatrix { row_ptr, cols, probs })
    }

    pub fn len(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(column, probability)` pairs of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[span.clone()].iter().copied().zip(self.probs[span].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[span.clone()].binary_search(&j) {
            Ok(p) => self.probs[span.start + p],
            Err(_) => 0.0,
        }
    }

    /// Returns `v^T A`.
    pub fn left_multiply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.len() {
            return Err(Error::invalid(format!(
                "vector of length {} against {}-node matrix",
                v.len(),
                self.len()
            )));
        }
        let mut out = vec![0.0; v.len()];
        for (i, &vi) in v.iter().enumerate() {
            if vi != 0.0 {
                for (j, p) in self.row(i) {
                    out[j] += vi * p;
                }
            }
        }
        Ok(out)
    }
}

pub fn normalize_transitions(graph: &SvgGraph) -> Result<TransitionMatrix> {
    let rows: Vec<Vec<(usize, f64)>> = (0..graph.len())
        .map(|i| graph.out_edges(i).iter().map(|e| (e.to, e.weight)).collect())
        .collect();
    TransitionMatrix::from_weights(&rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::Taxonomy;

    fn nodes(points: &[f64], keys: &[&str]) -> Vec<SvgNode> {
        points
            .iter()
            .zip(keys)
            .enumerate()
            .map(|(i, (p, k))| SvgNode {
                segment_id: format!("s{i}"),
                key: k.to_string(),
                vector: EncodedVector::new(EncodingKind::Bow, vec![*p]),
            })
            .collect()
    }

    fn verb_graph(points: &[f64], keys: &[&str], m: usize) -> SvgGraph {
        let tax = Taxonomy::default();
        build_svg(nodes(points, keys), &Relation::new(RelationMode::Verb, &tax), m).unwrap()
    }

    #[test]
    fn distance_matrix_examples() {
        let v = |x: f64, y: f64| EncodedVector::new(EncodingKind::Fv, vec![x, y]);
        let d = distance_matrix(&[v(0.0, 0.0), v(3.0, 4.0), v(3.0, 0.0)]).unwrap();
        assert_eq!((d.get(0, 1), d.get(1, 0)), (5.0, 5.0));
        assert_eq!((d.get(0, 2), d.get(1, 2), d.get(2, 2)), (3.0, 4.0, 0.0));
        let same = distance_matrix(&[v(1.0, 1.0), v(1.0, 1.0)]).unwrap();
        assert_eq!(same.get(0, 1), 0.0);
        let mixed = [v(0.0, 0.0), EncodedVector::new(EncodingKind::Bow, vec![0.0, 0.0])];
        assert!(distance_matrix(&mixed).is_err());
    }

    #[test]
    fn ranking_examples() {
        // nodes 0,1 labelled a; node 2 labelled b; d(0,2)=1, d(1,2)=2
        let d = DistanceMatrix::from_fn(3, |i, j| match (i, j) {
            (0, 1) => 0.5,
            (0, 2) => 1.0,
            _ => 2.0,
        });
        let labels = ["a", "a", "b"];
        let rel = RelatedMatrix::from_fn(3, |i, j| labels[i] == labels[j]);
        assert_eq!(rank_global(&d, &rel), [(0, 2), (1, 2)]);
        assert_eq!(rank_local(&d, &rel, 2), Some(0));
        assert_eq!(rank_local(&d, &rel, 1), Some(2));

        let all = RelatedMatrix::from_fn(3, |_, _| true);
        assert!(rank_global(&d, &all).is_empty());
        assert_eq!(rank_local(&d, &all, 0), None);

        let flat = DistanceMatrix::from_fn(3, |_, _| 1.0);
        let none = RelatedMatrix::from_fn(3, |_, _| false);
        assert_eq!(rank_global(&flat, &none), [(0, 1), (0, 2), (1, 2)]);
        assert_eq!(rank_local(&flat, &none, 2), Some(0));
    }

    #[test]
    fn four_nodes_two_labels_no_global_budget() {
        // a a b b at 0, 1, 10, 12: local edges 1-2 (from both 1 and 2), 0-2, 1-3
        let g = verb_graph(&[0.0, 1.0, 10.0, 12.0], &["a", "a", "b", "b"], 0);
        let edges = g.undirected_edges();
        use EdgeTag::*;
        assert_eq!(
            edges,
            [(0, 1, Semantic), (0, 2, Visual), (1, 2, Visual), (1, 3, Visual), (2, 3, Semantic)]
        );
        assert_eq!(g.directed_edge_count(), 10);
        assert_eq!(g.edge(2, 1).unwrap().weight, 9.0 + WEIGHT_EPSILON);
    }

    #[test]
    fn single_label_has_only_semantic_edges() {
        let g = verb_graph(&[0.0, 1.0, 2.0, 7.0], &["a"; 4], 100);
        let edges = g.undirected_edges();
        assert_eq!(edges.len(), 6);
        assert!(edges.iter().all(|e| e.2 == EdgeTag::Semantic));
    }

    #[test]
    fn budget_beyond_supply_links_every_unrelated_pair() {
        let g = verb_graph(&[0.0, 1.0, 5.0, 6.0, 9.0], &["a", "b", "c", "d", "e"], 1000);
        assert_eq!(g.undirected_edges().len(), 10);
    }

    #[test]
    fn duplicate_vectors_get_positive_weight() {
        let g = verb_graph(&[3.0, 3.0], &["a", "b"], 0);
        let a = normalize_transitions(&g).unwrap();
        assert_eq!(a.get(0, 1), 1.0);
        assert!(g.edge(0, 1).unwrap().weight > 0.0);
    }

    #[test]
    fn rejects_single_node() {
        let tax = Taxonomy::default();
        assert!(build_svg(nodes(&[0.0], &["a"]), &Relation::new(RelationMode::Verb, &tax), 3).is_err());
    }

    #[test]
    fn transition_examples() {
        let a = TransitionMatrix::from_weights(&[
            vec![(1, 1.0), (2, 1.0)],
            vec![(0, 1.0), (2, 3.0)],
            vec![(0, 2.0)],
        ])
        .unwrap();
        assert_eq!((a.get(0, 1), a.get(0, 2)), (0.5, 0.5));
        assert_eq!((a.get(1, 0), a.get(1, 2)), (0.75, 0.25));
        assert_eq!(a.get(2, 0), 1.0);
        assert_eq!(a.get(2, 1), 0.0);
        assert!(TransitionMatrix::from_weights(&[vec![(0, 0.0)]]).is_err());
        assert!(TransitionMatrix::from_weights(&[vec![]]).is_err());
    }

    #[test]
    fn dump_round_trip() {
        let g = verb_graph(&[0.0, 1.0, 10.0, 12.5], &["a", "a", "b", "b"], 2);
        let back = SvgGraph::parse_str(&g.to_text()).unwrap();
        assert_eq!(back, g);
        let tax = Taxonomy::default();
        back.check_semantics(&Relation::new(RelationMode::Verb, &tax)).unwrap();
    }

    #[test]
    fn dump_rejects_asymmetric_edges() {
        let g = verb_graph(&[0.0, 1.0], &["a", "b"], 0);
        let text = g.to_text().replace("1\t0\t1.000000000001\tvisual", "1\t0\t2\tvisual");
        assert!(SvgGraph::parse_str(&text).is_err());
    }
}
