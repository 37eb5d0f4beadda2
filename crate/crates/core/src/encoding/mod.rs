//! Fixed-length video encodings and the visual distance between them.
//!
//! Encoders are fitted on a descriptor pool drawn from training videos
//! only ([`subsample`]); encoding itself always uses every descriptor of a
//! video.

mod fisher;
mod gmm;
mod kmeans;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use fisher::{encode_fisher, fisher_gradients};
pub use gmm::{train_gmm, GmmFit, GmmModel};
pub use kmeans::{encode_bow, train_kmeans, Codebook, KMeansFit};

use crate::dataset::DescriptorSet;
use crate::textio::{self, content_lines, parse_usize};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EncodingKind {
    Bow,
    Fv,
}

impl fmt::Display for EncodingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EncodingKind::Bow => "bow",
            EncodingKind::Fv => "fv",
        })
    }
}

impl FromStr for EncodingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bow" => Ok(EncodingKind::Bow),
            "fv" => Ok(EncodingKind::Fv),
            _ => Err(Error::invalid(format!("unknown encoding `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodedVector {
    pub kind: EncodingKind,
    pub values: Vec<f64>,
}

impl EncodedVector {
    pub fn new(kind: EncodingKind, values: Vec<f64>) -> Self {
        EncodedVector { kind, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Euclidean distance between two encodings of the same kind and length.
pub fn distance(a: &EncodedVector, b: &EncodedVector) -> Result<f64> {
    if a.kind != b.kind {
        return Err(Error::VectorMismatch(format!("kinds {} and {}", a.kind, b.kind)));
    }
    if a.len() != b.len() {
        return Err(Error::VectorMismatch(format!("lengths {} and {}", a.len(), b.len())));
    }
    Ok(sq_dist(&a.values, &b.values).sqrt())
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Descriptors gathered for encoder fitting, with the input video each row came from.
#[derive(Debug, Clone, PartialEq)]
pub struct DescriptorPool {
    dim: usize,
    values: Vec<f64>,
    sources: Vec<usize>,
}

impl DescriptorPool {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let set = DescriptorSet::from_rows(rows)?;
        Ok(DescriptorPool {
            dim: set.dim(),
            sources: vec![0; set.rows()],
            values: set.values().to_vec(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> usize {
        self.sources.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.dim)
    }

    /// Index into the `subsample` input of the video row `i` was drawn from.
    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    /// Per-dimension population variance.
    pub(crate) fn variance(&self) -> Vec<f64> {
        let n = self.rows() as f64;
        let mut mean = vec![0.0; self.dim];
        for r in self.iter_rows() {
            for (m, x) in mean.iter_mut().zip(r) {
                *m += x;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; self.dim];
        for r in self.iter_rows() {
            for ((v, x), m) in var.iter_mut().zip(r).zip(&mean) {
                *v += (x - m) * (x - m);
            }
        }
        var.iter_mut().for_each(|v| *v /= n);
        var
    }
}

/// Draws `ceil(fraction * rows)` descriptors without replacement from each video.
pub fn subsample(videos: &[&DescriptorSet], fraction: f64, seed: u64) -> Result<DescriptorPool> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::invalid(format!("fraction {fraction} outside (0, 1]")));
    }
    let first = videos.first().ok_or_else(|| Error::invalid("no videos to subsample"))?;
    let dim = first.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::new();
    let mut sources = Vec::new();
    for (v, video) in videos.iter().enumerate() {
        if video.dim() != dim {
            return Err(Error::DimMismatch { expected: dim, found: video.dim() });
        }
        let take = ((fraction * video.rows() as f64).ceil() as usize).clamp(1, video.rows());
        let rows: Vec<usize> = if take == video.rows() {
            (0..take).collect()
        } else {
            let mut picked = index::sample(&mut rng, video.rows(), take).into_vec();
            picked.sort_unstable();
            picked
        };
        for r in rows {
            values.extend_from_slice(video.row(r));
            sources.push(v);
        }
    }
    Ok(DescriptorPool { dim, values, sources })
}

/// A fitted encoder: a BoW codebook or a GMM for Fisher vectors.
#[derive(Debug, Clone, PartialEq)]
pub enum Encoder {
    Bow(Codebook),
    Fv(GmmModel),
}

/// Iteration limits and tolerances for encoder fitting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitParams {
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for FitParams {
    fn default() -> Self {
        FitParams { max_iters: 100, tol: 1e-6 }
    }
}

impl Encoder {
    pub fn train(
        kind: EncodingKind,
        pool: &DescriptorPool,
        gamma: usize,
        seed: u64,
        params: FitParams,
    ) -> Result<Self> {
        Ok(match kind {
            EncodingKind::Bow => Encoder::Bow(train_kmeans(pool, gamma, seed, params.max_iters)?.codebook),
            EncodingKind::Fv => {
                Encoder::Fv(train_gmm(pool, gamma, seed, params.max_iters, params.tol)?.model)
            }
        })
    }

    pub fn kind(&self) -> EncodingKind {
        match self {
            Encoder::Bow(_) => EncodingKind::Bow,
            Encoder::Fv(_) => EncodingKind::Fv,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Encoder::Bow(c) => c.dim(),
            Encoder::Fv(g) => g.dim(),
        }
    }

    pub fn encode(&self, video: &DescriptorSet) -> Result<EncodedVector> {
        match self {
            Encoder::Bow(c) => encode_bow(c, video),
            Encoder::Fv(g) => encode_fisher(g, video),
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            Encoder::Bow(c) => c.to_text(),
            Encoder::Fv(g) => g.to_text(),
        }
    }

    /// Parses a `codebook` or `gmm` model file.
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (hline, header) = lines.next().ok_or_else(|| Error::parse(1, "missing model header"))?;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 3 {
            return Err(Error::parse(hline, "header must be `<kind> <gamma> <dim>`"));
        }
        let gamma = parse_usize(head[1], hline, "component count")?;
        let dim = parse_usize(head[2], hline, "dimension")?;
        if gamma == 0 || dim == 0 {
            return Err(Error::parse(hline, "gamma and dim must be positive"));
        }
        if gamma.saturating_mul(dim) > 1 << 26 {
            return Err(Error::parse(hline, "model too large"));
        }
        let body: Vec<(usize, &str)> = lines.collect();
        match head[0] {
            "codebook" => Codebook::parse_body(gamma, dim, &body).map(Encoder::Bow),
            "gmm" => GmmModel::parse_body(gamma, dim, &body).map(Encoder::Fv),
            other => Err(Error::parse(hline, format!("unknown model kind `{other}`"))),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = textio::read_to_string(path)?;
        Self::parse_str(&text).map_err(|e| e.in_file(path))
    }
}

pub(crate) type Body<'a> = &'a [(usize, &'a str)];

pub(crate) fn expect_rows<'a>(
    body: Body<'a>,
    count: usize,
    width: usize,
    what: &str,
) -> Result<(Vec<f64>, Body<'a>)> {
    if body.len() < count {
        let line = body.last().map_or(1, |(l, _)| *l);
        return Err(Error::parse(line, format!("missing {what} rows")));
    }
    let mut out = Vec::with_capacity(count * width);
    for (line, text) in &body[..count] {
        out.extend(textio::parse_row(text, *line, width)?);
    }
    Ok((out, &body[count..]))
}

pub(crate) fn expect_end(body: &[(usize, &str)]) -> Result<()> {
    match body.first() {
        Some((line, _)) => Err(Error::parse(*line, "unexpected trailing data")),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_examples() {
        let a = EncodedVector::new(EncodingKind::Bow, vec![0.0, 0.0]);
        let b = EncodedVector::new(EncodingKind::Bow, vec![3.0, 4.0]);
        assert_eq!(distance(&a, &b).unwrap(), 5.0);
        assert_eq!(distance(&b, &a).unwrap(), 5.0);
        assert_eq!(distance(&a, &a).unwrap(), 0.0);
        let c = EncodedVector::new(EncodingKind::Fv, vec![3.0, 4.0]);
        assert!(distance(&a, &c).is_err());
        let d = EncodedVector::new(EncodingKind::Bow, vec![3.0]);
        assert!(distance(&a, &d).is_err());
    }

    fn video(rows: usize, offset: f64) -> DescriptorSet {
        let r: Vec<Vec<f64>> = (0..rows).map(|i| vec![offset + i as f64, -(i as f64)]).collect();
        DescriptorSet::from_rows(&r).unwrap()
    }

    #[test]
    fn subsample_full_fraction_is_concatenation() {
        let (a, b) = (video(3, 0.0), video(2, 10.0));
        let pool = subsample(&[&a, &b], 1.0, 1).unwrap();
        assert_eq!(pool.rows(), 5);
        assert_eq!(pool.row(3), b.row(0));
        assert_eq!(pool.sources(), [0, 0, 0, 1, 1]);
    }

    #[test]
    fn subsample_quarter_of_eight_is_two() {
        let v = video(8, 0.0);
        let pool = subsample(&[&v], 0.25, 9).unwrap();
        assert_eq!(pool.rows(), 2);
        assert_eq!(pool, subsample(&[&v], 0.25, 9).unwrap());
        // rows are drawn without replacement
        assert_ne!(pool.row(0), pool.row(1));
    }

    #[test]
    fn subsample_rejects_bad_input() {
        let v = video(4, 0.0);
        assert!(subsample(&[], 0.5, 0).is_err());
        assert!(subsample(&[&v], 0.0, 0).is_err());
        assert!(subsample(&[&v], 1.5, 0).is_err());
    }

    #[test]
    fn model_parse_errors() {
        assert!(Encoder::parse_str("").is_err());
        assert!(Encoder::parse_str("codebook 2 2\n1 2\n").is_err());
        assert!(Encoder::parse_str("codebook 1 2\n1 2\n3 4\n").is_err());
        assert!(Encoder::parse_str("tree 1 2\n1 2\n").is_err());
        assert!(Encoder::parse_str("gmm 1 1\n0.5\n0\n1\n").is_err());
        assert!(Encoder::parse_str("gmm 1 1\n1\n0\n0\n").is_err());
        assert!(Encoder::parse_str("gmm 1 1\n1\n0\n2\n").is_ok());
    }
}
