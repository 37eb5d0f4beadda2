use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{expect_end, expect_rows, sq_dist, DescriptorPool, EncodedVector, EncodingKind};
use crate::dataset::DescriptorSet;
use crate::{textio, Error, Result};

/// Visual-word centers, row-major `size x dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    dim: usize,
    centers: Vec<f64>,
}

impl Codebook {
    pub fn new(dim: usize, centers: Vec<f64>) -> Result<Self> {
        if dim == 0 || centers.is_empty() || !centers.len().is_multiple_of(dim) {
            return Err(Error::invalid("codebook needs at least one center of positive dimension"));
        }
        if centers.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("codebook centers must be finite"));
        }
        Ok(Codebook { dim, centers })
    }

    pub fn size(&self) -> usize {
        self.centers.len() / self.dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn center(&self, k: usize) -> &[f64] {
        &self.centers[k * self.dim..(k + 1) * self.dim]
    }

    /// Index of the closest center; ties go to the lowest index.
    pub fn nearest(&self, x: &[f64]) -> (usize, f64) {
        nearest(&self.centers, self.dim, x)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("codebook {} {}\n", self.size(), self.dim);
        for k in 0..self.size() {
            textio::push_row(&mut out, self.center(k));
        }
        out
    }

    pub(crate) fn parse_body(size: usize, dim: usize, body: &[(usize, &str)]) -> Result<Self> {
        let (centers, rest) = expect_rows(body, size, dim, "center")?;
        expect_end(rest)?;
        Codebook::new(dim, centers)
    }
}

fn nearest(centers: &[f64], dim: usize, x: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (k, c) in centers.chunks_exact(dim).enumerate() {
        let d = sq_dist(c, x);
        if d < best.1 {
            best = (k, d);
        }
    }
    best
}

#[derive(Debug, Clone)]
pub struct KMeansFit {
    pub codebook: Codebook,
    /// Sum of squared distances to the assigned center, one entry per assignment pass.
    pub inertia: Vec<f64>,
}

fn plus_plus_init(pool: &DescriptorPool, k: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let dim = pool.dim();
    let n = pool.rows();
    let mut centers = Vec::with_capacity(k * dim);
    centers.extend_from_slice(pool.row(rng.gen_range(0..n)));
    let mut d2: Vec<f64> = pool.iter_rows().map(|r| sq_dist(r, &centers[..dim])).collect();
    for c in 1..k {
        let total: f64 = d2.iter().sum();
        if total <= 0.0 {
            return Err(Error::Degenerate(format!(
                "pool holds only {c} distinct points but {k} centers were requested"
            )));
        }
        let mut target = rng.gen::<f64>() * total;
        let mut pick = n - 1;
        for (i, w) in d2.iter().enumerate() {
            if *w > 0.0 {
                if target < *w {
                    pick = i;
                    break;
                }
                target -= w;
            }
        }
        // rounding can run past the end; fall back to the last positive weight
        if d2[pick] <= 0.0 {
            pick = d2.iter().rposition(|w| *w > 0.0).expect("positive total");
        }
        let start = centers.len();
        centers.extend_from_slice(pool.row(pick));
        for (w, r) in d2.iter_mut().zip(pool.iter_rows()) {
            *w = w.min(sq_dist(r, &centers[start..]));
        }
    }
    Ok(centers)
}

/// Lloyd's algorithm from a seeded k-means++ start.
pub fn train_kmeans(pool: &DescriptorPool, k: usize, seed: u64, max_iters: usize) -> Result<KMeansFit> {
    if k == 0 {
        return Err(Error::invalid("codebook size must be at least 1"));
    }
    if k > pool.rows() {
        return Err(Error::invalid(format!(
            "codebook size {k} exceeds pool size {}",
            pool.rows()
        )));
    }
    let dim = pool.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers = plus_plus_init(pool, k, &mut rng)?;
    let mut assign: Vec<usize> = vec![usize::MAX; pool.rows()];
    let mut inertia = Vec::new();
    for _ in 0..max_iters.max(1) {
        let mut changed = false;
        let mut total = 0.0;
        for (a, r) in assign.iter_mut().zip(pool.iter_rows()) {
            let (c, d) = nearest(&centers, dim, r);
            total += d;
            if *a != c {
                *a = c;
                changed = true;
            }
        }
        inertia.push(total);
        if !changed {
            break;
        }
        let mut sums = vec![0.0; k * dim];
        let mut counts = vec![0usize; k];
        for (a, r) in assign.iter().zip(pool.iter_rows()) {
            counts[*a] += 1;
            for (s, x) in sums[a * dim..(a + 1) * dim].iter_mut().zip(r) {
                *s += x;
            }
        }
        for c in 0..k {
            // an emptied cluster keeps its previous center
            if counts[c] > 0 {
                let n = counts[c] as f64;
                for (dst, s) in centers[c * dim..(c + 1) * dim]
                    .iter_mut()
                    .zip(&sums[c * dim..(c + 1) * dim])
                {
                    *dst = s / n;
                }
            }
        }
    }
    Ok(KMeansFit {
        codebook: Codebook::new(dim, centers)?,
        inertia,
    })
}

/// L1-normalised histogram of hard assignments to the nearest center.
pub fn encode_bow(codebook: &Codebook, video: &DescriptorSet) -> Result<EncodedVector> {
    if video.dim() != codebook.dim() {
        return Err(Error::DimMismatch {
            expected: codebook.dim(),
            found: video.dim(),
        });
    }
    let mut hist = vec![0.0; codebook.size()];
    for r in video.iter_rows() {
        hist[codebook.nearest(r).0] += 1.0;
    }
    let n = video.rows() as f64;
    hist.iter_mut().for_each(|h| *h /= n);
    Ok(EncodedVector::new(EncodingKind::Bow, hist))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn distinct_points_are_their_own_centers() {
        let rows = vec![vec![0.0, 0.0], vec![5.0, 1.0], vec![-3.0, 2.0]];
        let pool = DescriptorPool::from_rows(&rows).unwrap();
        let fit = train_kmeans(&pool, 3, 4, 50).unwrap();
        assert_eq!(*fit.inertia.last().unwrap(), 0.0);
        let mut centers: Vec<Vec<f64>> = (0..3).map(|k| fit.codebook.center(k).to_vec()).collect();
        centers.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut expected = rows.clone();
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(centers, expected);
    }

    #[test]
    fn recovers_separated_cluster_means() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let noise = Normal::new(0.0, 0.5).unwrap();
        let mut rows = Vec::new();
        for &(cx, cy) in &[(-20.0, 0.0), (20.0, 5.0)] {
            for _ in 0..50 {
                rows.push(vec![cx + noise.sample(&mut rng), cy + noise.sample(&mut rng)]);
            }
        }
        let mean = |s: &[Vec<f64>]| {
            let n = s.len() as f64;
            vec![s.iter().map(|r| r[0]).sum::<f64>() / n, s.iter().map(|r| r[1]).sum::<f64>() / n]
        };
        let expected = [mean(&rows[..50]), mean(&rows[50..])];
        let pool = DescriptorPool::from_rows(&rows).unwrap();
        let fit = train_kmeans(&pool, 2, 3, 100).unwrap();
        let mut got: Vec<Vec<f64>> = (0..2).map(|k| fit.codebook.center(k).to_vec()).collect();
        got.sort_by(|a, b| a[0].partial_cmp(&b[0]).unwrap());
        for (g, e) in got.iter().zip(&expected) {
            for (a, b) in g.iter().zip(e) {
                assert!((a - b).abs() < 1e-6, "{g:?} vs {e:?}");
            }
        }
    }

    #[test]
    fn degenerate_and_oversized_pools_fail() {
        let pool = DescriptorPool::from_rows(&[vec![1.0], vec![1.0], vec![1.0]]).unwrap();
        assert!(matches!(train_kmeans(&pool, 2, 0, 10), Err(Error::Degenerate(_))));
        assert!(train_kmeans(&pool, 1, 0, 10).is_ok());
        assert!(train_kmeans(&pool, 4, 0, 10).is_err());
    }

    #[test]
    fn bow_examples() {
        let cb = Codebook::new(1, vec![0.0, 10.0]).unwrap();
        let at_zero = DescriptorSet::from_rows(&[vec![0.0], vec![0.0]]).unwrap();
        assert_eq!(encode_bow(&cb, &at_zero).unwrap().values, [1.0, 0.0]);
        let split = DescriptorSet::from_rows(&[vec![1.0], vec![-2.0], vec![3.0], vec![9.0]]).unwrap();
        assert_eq!(encode_bow(&cb, &split).unwrap().values, [0.75, 0.25]);
        // equidistant descriptor goes to the lower index
        let tie = DescriptorSet::from_rows(&[vec![5.0]]).unwrap();
        assert_eq!(encode_bow(&cb, &tie).unwrap().values, [1.0, 0.0]);
        let wrong = DescriptorSet::from_rows(&[vec![5.0, 1.0]]).unwrap();
        assert!(encode_bow(&cb, &wrong).is_err());
    }

    #[test]
    fn codebook_text_round_trip() {
        let cb = Codebook::new(2, vec![0.1, -3.25, 1e-17, 7.0]).unwrap();
        let back = super::super::Encoder::parse_str(&cb.to_text()).unwrap();
        assert_eq!(back, super::super::Encoder::Bow(cb));
    }
}
