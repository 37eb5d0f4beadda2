//! Dataset manifests, descriptor files and person-aware splits.
//!
//! A manifest is a tab-separated list of segments (tabs shown as spaces):
//!
//! ```text
//! # segment_id  person_id  verb  meaning_or_dash  descriptor_path
//! s001  p1  put  put.v.1  desc/s001.txt
//! ```
//!
//! Descriptor paths are resolved relative to the manifest's directory and
//! loaded lazily through a [`DescriptorCache`].

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::semantics::Annotation;
use crate::textio::{self, content_lines, parse_row, parse_usize};
use crate::{Error, Result};

/// One annotated object-interaction clip.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VideoSegment {
    pub segment_id: String,
    pub person_id: String,
    pub annotation: Annotation,
    pub descriptor_path: PathBuf,
}

/// Row-major `rows x dim` descriptor matrix for one segment.
#[derive(Debug, Clone, PartialEq)]
pub struct DescriptorSet {
    rows: usize,
    dim: usize,
    values: Vec<f64>,
}

impl DescriptorSet {
    pub fn new(rows: usize, dim: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || dim == 0 {
            return Err(Error::invalid("descriptor set must have at least one row and column"));
        }
        if values.len() != rows * dim {
            return Err(Error::invalid(format!(
                "descriptor set declares {rows}x{dim} but holds {} values",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("descriptor set contains a non-finite value"));
        }
        Ok(DescriptorSet { rows, dim, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::invalid("ragged descriptor rows"));
        }
        Self::new(rows.len(), dim, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.dim)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Parses the descriptor text format: a `rows dim` header followed by
    /// `rows` lines of `dim` reals.
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines.next().ok_or_else(|| Error::parse(1, "missing header"))?;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 2 {
            return Err(Error::parse(hline, "header must be `rows dim`"));
        }
        let rows = parse_usize(head[0], hline, "row count")?;
        let dim = parse_usize(head[1], hline, "dimension")?;
        if rows == 0 || dim == 0 {
            return Err(Error::parse(hline, "rows and dim must be positive"));
        }
        let mut values = Vec::with_capacity(rows.saturating_mul(dim).min(1 << 20));
        let mut seen = 0usize;
        for (line, text) in lines {
            if seen == rows {
                return Err(Error::parse(
                    line,
                    format!("header declares {rows} rows but more follow"),
                ));
            }
            values.extend(parse_row(text, line, dim)?);
            seen += 1;
        }
        if seen != rows {
            return Err(Error::parse(
                hline,
                format!("header declares {rows} rows but {seen} present"),
            ));
        }
        Ok(DescriptorSet { rows, dim, values })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.rows, self.dim);
        for r in self.iter_rows() {
            textio::push_row(&mut out, r);
        }
        out
    }
}

/// Ordered segment list with the directory descriptor paths are relative to.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    segments: Vec<VideoSegment>,
    base_dir: PathBuf,
}

impl Dataset {
    pub fn new(segments: Vec<VideoSegment>, base_dir: impl Into<PathBuf>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::EmptyManifest);
        }
        let mut seen: HashMap<&str, usize> = HashMap::new();
        for (i, s) in segments.iter().enumerate() {
            if let Some(first) = seen.insert(&s.segment_id, i + 1) {
                return Err(Error::DuplicateSegment {
                    id: s.segment_id.clone(),
                    first,
                    second: i + 1,
                });
            }
        }
        Ok(Dataset {
            segments,
            base_dir: base_dir.into(),
        })
    }

    pub fn segments(&self) -> &[VideoSegment] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn base_dir(&self) -> &Path {
        &self.base_dir
    }

    /// Distinct person ids in first-appearance order.
    pub fn persons(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        self.segments
            .iter()
            .filter(|s| seen.insert(s.person_id.as_str()))
            .map(|s| s.person_id.clone())
            .collect()
    }

    pub fn descriptor_path(&self, segment: &VideoSegment) -> PathBuf {
        self.base_dir.join(&segment.descriptor_path)
    }

    /// Leave-one-person-out split: `person`'s segments form the test set.
    pub fn split_lopo(&self, person: &str) -> Result<(Dataset, Dataset)> {
        let (test, train): (Vec<_>, Vec<_>) = self
            .segments
            .iter()
            .cloned()
            .partition(|s| s.person_id == person);
        if test.is_empty() {
            return Err(Error::UnknownPerson(person.to_string()));
        }
        if train.is_empty() {
            return Err(Error::invalid(format!(
                "person `{person}` owns every segment; nothing left to train on"
            )));
        }
        let base = self.base_dir.clone();
        Ok((
            Dataset { segments: train, base_dir: base.clone() },
            Dataset { segments: test, base_dir: base },
        ))
    }

    /// Keeps `n` segments chosen uniformly with a seeded generator, in file order.
    pub fn sample(&self, n: usize, seed: u64) -> Dataset {
        if n >= self.len() {
            return self.clone();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picked = index::sample(&mut rng, self.len(), n).into_vec();
        picked.sort_unstable();
        Dataset {
            segments: picked.into_iter().map(|i| self.segments[i].clone()).collect(),
            base_dir: self.base_dir.clone(),
        }
    }

    pub fn to_manifest(&self) -> String {
        let mut out = String::from("# segment_id\tperson_id\tverb\tmeaning\tdescriptor_path\n");
        for s in &self.segments {
            out.push_str(&s.to_string());
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for VideoSegment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\t{}\t{}\t{}",
            self.segment_id,
            self.person_id,
            self.annotation.verb,
            self.annotation.meaning.as_deref().unwrap_or("-"),
            self.descriptor_path.display()
        )
    }
}

fn check_token(tok: &str, line: usize, what: &str) -> Result<()> {
    if tok.is_empty() || tok.chars().any(char::is_whitespace) {
        return Err(Error::parse(line, format!("empty or blank {what}")));
    }
    Ok(())
}

/// Parses manifest text; descriptor paths are kept as written.
pub fn parse_manifest_str(text: &str, base_dir: impl Into<PathBuf>) -> Result<Dataset> {
    let mut segments = Vec::new();
    let mut lines_of: HashMap<String, usize> = HashMap::new();
    for (line, raw) in content_lines(text) {
        let fields: Vec<&str> = raw.split('\t').map(str::trim).collect();
        if fields.len() != 5 {
            return Err(Error::parse(
                line,
                format!("expected 5 tab-separated fields, found {}", fields.len()),
            ));
        }
        let [id, person, verb, meaning, path] = [fields[0], fields[1], fields[2], fields[3], fields[4]];
        check_token(id, line, "segment id")?;
        check_token(person, line, "person id")?;
        check_token(verb, line, "verb")?;
        if verb.to_lowercase() != verb {
            return Err(Error::parse(line, format!("verb `{verb}` must be lowercase")));
        }
        if path.is_empty() {
            return Err(Error::parse(line, "empty descriptor path"));
        }
        let meaning = match meaning {
            "-" => None,
            m => {
                crate::semantics::check_meaning_id(m).map_err(|msg| Error::parse(line, msg))?;
                Some(m.to_string())
            }
        };
        if let Some(first) = lines_of.insert(id.to_string(), line) {
            return Err(Error::DuplicateSegment {
                id: id.to_string(),
                first,
                second: line,
            });
        }
        segments.push(VideoSegment {
            segment_id: id.to_string(),
            person_id: person.to_string(),
            annotation: Annotation {
                verb: verb.to_string(),
                meaning,
            },
            descriptor_path: PathBuf::from(path),
        });
    }
    if segments.is_empty() {
        return Err(Error::EmptyManifest);
    }
    Ok(Dataset {
        segments,
        base_dir: base_dir.into(),
    })
}

pub fn parse_manifest(path: &Path) -> Result<Dataset> {
    let text = textio::read_to_string(path)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_manifest_str(&text, base).map_err(|e| e.in_file(path))
}

pub fn load_descriptors(path: &Path) -> Result<DescriptorSet> {
    let text = textio::read_to_string(path)?;
    DescriptorSet::parse_str(&text).map_err(|e| e.in_file(path))
}

/// Process-wide descriptor cache keyed by segment id.
///
/// Concurrent loads of the same segment may race; both parse the same file
/// and the first inserted value wins, so loading is idempotent.
#[derive(Debug, Default)]
pub struct DescriptorCache {
    entries: Mutex<HashMap<String, Arc<DescriptorSet>>>,
    dim: OnceLock<usize>,
}

impl DescriptorCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> Option<usize> {
        self.dim.get().copied()
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        let expected = *self.dim.get_or_init(|| found);
        if expected != found {
            return Err(Error::DimMismatch { expected, found });
        }
        Ok(())
    }

    /// Registers descriptors without touching the filesystem.
    pub fn insert(&self, segment_id: &str, set: DescriptorSet) -> Result<Arc<DescriptorSet>> {
        self.check_dim(set.dim())?;
        let mut map = self.entries.lock().expect("descriptor cache poisoned");
        Ok(map
            .entry(segment_id.to_string())
            .or_insert_with(|| Arc::new(set))
            .clone())
    }

    pub fn get(&self, dataset: &Dataset, segment: &VideoSegment) -> Result<Arc<DescriptorSet>> {
        if let Some(set) = self
            .entries
            .lock()
            .expect("descriptor cache poisoned")
            .get(&segment.segment_id)
        {
            return Ok(set.clone());
        }
        let path = dataset.descriptor_path(segment);
        let set = load_descriptors(&path)?;
        self.check_dim(set.dim()).map_err(|e| e.in_file(&path))?;
        self.insert(&segment.segment_id, set)
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("descriptor cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
