use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dataset::{Dataset, DescriptorCache, DescriptorSet, VideoSegment};
use crate::semantics::{Annotation, Meaning, Taxonomy};
use crate::{write_atomic, Error, Result};

/// Meanings always present in generated taxonomies: two synonym pairs and
/// one hyponym under each.
const BASE_TAXONOMY: [(&str, &str, Option<&str>); 6] = [
    ("put.v.1", "put.v.01", None),
    ("place.v.1", "put.v.01", None),
    ("put_down.v.1", "put_down.v.01", Some("put.v.1")),
    ("wash.v.3", "wash.v.03", None),
    ("wash_up.v.3", "wash.v.03", None),
    ("rinse.v.1", "rinse.v.01", Some("wash.v.3")),
];

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub clusters: usize,
    pub points_per_cluster: usize,
    pub dim: usize,
    /// Distance between any two cluster means (exact when `clusters <= dim`).
    pub separation: f64,
    /// Standard deviation of every descriptor around its cluster mean.
    pub sigma: f64,
    pub descriptors_per_segment: usize,
    /// Candidate meanings per cluster; missing entries default to `actN.v.1`.
    pub labels: Vec<Vec<String>>,
    pub persons: usize,
    pub seed: u64,
}

impl SyntheticSpec {
    /// Four well-separated clusters, two of them labelled with synonym pairs.
    pub fn planted(seed: u64) -> Self {
        SyntheticSpec {
            clusters: 4,
            points_per_cluster: 40,
            dim: 16,
            separation: 10.0,
            sigma: 1.0,
            descriptors_per_segment: 8,
            labels: vec![
                vec!["put.v.1".into(), "place.v.1".into()],
                vec!["wash.v.3".into(), "wash_up.v.3".into()],
                vec!["open.v.1".into()],
                vec!["take.v.1".into()],
            ],
            persons: 3,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.clusters == 0 || self.points_per_cluster == 0 {
            return Err(Error::invalid("synthetic data needs at least one cluster and point"));
        }
        if self.dim == 0 || self.descriptors_per_segment == 0 {
            return Err(Error::invalid("dim and descriptors per segment must be positive"));
        }
        if !(self.separation > 0.0 && self.separation.is_finite()) {
            return Err(Error::invalid("separation must be positive"));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::invalid("sigma must be non-negative"));
        }
        if self.persons < 2 {
            return Err(Error::invalid("synthetic data needs at least 2 persons"));
        }
        if self.labels.iter().any(Vec::is_empty) {
            return Err(Error::invalid("a cluster has an empty label list"));
        }
        Ok(())
    }

    fn cluster_labels(&self, c: usize) -> Vec<String> {
        self.labels
            .get(c)
            .cloned()
            .unwrap_or_else(|| vec![format!("act{c}.v.1")])
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticData {
    pub dataset: Dataset,
    pub taxonomy: Taxonomy,
    pub descriptors: Vec<DescriptorSet>,
    pub cluster_of: Vec<usize>,
}

impl SyntheticData {
    /// A cache preloaded with every segment's descriptors.
    pub fn cache(&self) -> Result<DescriptorCache> {
        let cache = DescriptorCache::new();
        for (s, d) in self.dataset.segments().iter().zip(&self.descriptors) {
            cache.insert(&s.segment_id, d.clone())?;
        }
        Ok(cache)
    }
}

fn cluster_means(spec: &SyntheticSpec, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let scale = spec.separation / 2f64.sqrt();
    (0..spec.clusters)
        .map(|c| {
            if spec.clusters <= spec.dim {
                let mut m = vec![0.0; spec.dim];
                m[c] = scale;
                m
            } else {
                let v: Vec<f64> = (0..spec.dim).map(|_| rng.sample(StandardNormal)).collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
                v.into_iter().map(|x| x / norm * scale).collect()
            }
        })
        .collect()
}

fn taxonomy_for(labels: &[String]) -> Result<Taxonomy> {
    let mut meanings: Vec<Meaning> = BASE_TAXONOMY
        .iter()
        .map(|(id, syn, parent)| Meaning {
            meaning_id: id.to_string(),
            synset_id: syn.to_string(),
            parent: parent.map(str::to_string),
        })
        .collect();
    for l in labels {
        if !meanings.iter().any(|m| &m.meaning_id == l) {
            crate::semantics::check_meaning_id(l).map_err(Error::InvalidArgument)?;
            meanings.push(Meaning {
                meaning_id: l.clone(),
                synset_id: format!("{l}.syn"),
                parent: None,
            });
        }
    }
    Taxonomy::from_meanings(meanings)
}

/// Generates the dataset in memory. Descriptor paths are `descriptors/<id>.txt`.
pub fn generate(spec: &SyntheticSpec) -> Result<SyntheticData> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let means = cluster_means(spec, &mut rng);
    let mut all_labels: Vec<String> = (0..spec.clusters).flat_map(|c| spec.cluster_labels(c)).collect();
    all_labels.dedup();
    let taxonomy = taxonomy_for(&all_labels)?;

    let mut segments = Vec::new();
    let mut descriptors = Vec::new();
    let mut cluster_of = Vec::new();
    for (c, mean) in means.iter().enumerate() {
        let labels = spec.cluster_labels(c);
        for _ in 0..spec.points_per_cluster {
            let g = segments.len();
            let label = &labels[rng.gen_range(0..labels.len())];
            let mut values = Vec::with_capacity(spec.descriptors_per_segment * spec.dim);
            for _ in 0..spec.descriptors_per_segment {
                for m in mean {
                    let noise: f64 = rng.sample(StandardNormal);
                    values.push(m + spec.sigma * noise);
                }
            }
            let id = format!("seg{g:05}");
            segments.push(VideoSegment {
                descriptor_path: PathBuf::from(format!("descriptors/{id}.txt")),
                segment_id: id,
                person_id: format!("p{}", g % spec.persons + 1),
                annotation: Annotation::meaning(label),
            });
            descriptors.push(DescriptorSet::new(spec.descriptors_per_segment, spec.dim, values)?);
            cluster_of.push(c);
        }
    }
    Ok(SyntheticData {
        dataset: Dataset::new(segments, PathBuf::new())?,
        taxonomy,
        descriptors,
        cluster_of,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntheticPaths {
    pub manifest: PathBuf,
    pub taxonomy: PathBuf,
}

/// Writes `manifest.tsv`, `taxonomy.tsv` and `descriptors/` under `out_dir`.
pub fn gen_synthetic(spec: &SyntheticSpec, out_dir: &Path) -> Result<SyntheticPaths> {
    let data = generate(spec)?;
    for (s, d) in data.dataset.segments().iter().zip(&data.descriptors) {
        write_atomic(&out_dir.join(&s.descriptor_path), d.to_text().as_bytes())?;
    }
    let paths = SyntheticPaths {
        manifest: out_dir.join("manifest.tsv"),
        taxonomy: out_dir.join("taxonomy.tsv"),
    };
    write_atomic(&paths.taxonomy, data.taxonomy.to_text().as_bytes())?;
    write_atomic(&paths.manifest, data.dataset.to_manifest().as_bytes())?;
    Ok(paths)
}
