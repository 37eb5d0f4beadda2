//! Verb-meaning taxonomy and the semantic relations between annotations.
//!
//! Meanings use the `verb.v.sense` notation. Each meaning belongs to a
//! synset and may name one hypernym parent. Four relation modes are
//! supported:
//!
//! * `Verb`: the raw verb tokens are equal.
//! * `Am`: the meanings are identical.
//! * `As`: identical meaning or same synset.
//! * `Ah`: `As`, or one meaning is an ancestor of the other.
//!
//! The taxonomy file holds one meaning per line with three tab-separated
//! fields `meaning_id  synset_id  parent_or_dash`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::textio::{self, content_lines};
use crate::{Error, Result};

/// A segment's label: the free verb plus an optional meaning id.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Annotation {
    pub verb: String,
    pub meaning: Option<String>,
}

impl Annotation {
    pub fn verb(verb: &str) -> Self {
        Annotation { verb: verb.to_string(), meaning: None }
    }

    /// Builds an annotation from a meaning id, taking the verb from its prefix.
    pub fn meaning(meaning: &str) -> Self {
        let verb = meaning.split(".v.").next().unwrap_or(meaning);
        Annotation {
            verb: verb.to_string(),
            meaning: Some(meaning.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelationMode {
    Verb,
    Am,
    As,
    Ah,
}

impl RelationMode {
    pub const ALL: [RelationMode; 4] = [
        RelationMode::Verb,
        RelationMode::Am,
        RelationMode::As,
        RelationMode::Ah,
    ];

    pub fn needs_meanings(self) -> bool {
        self != RelationMode::Verb
    }
}

impl fmt::Display for RelationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RelationMode::Verb => "verb",
            RelationMode::Am => "am",
            RelationMode::As => "as",
            RelationMode::Ah => "ah",
        })
    }
}

impl FromStr for RelationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "verb" => Ok(RelationMode::Verb),
            "am" => Ok(RelationMode::Am),
            "as" => Ok(RelationMode::As),
            "ah" => Ok(RelationMode::Ah),
            _ => Err(Error::invalid(format!("unknown relation mode `{s}`"))),
        }
    }
}

/// Validates the `verb.v.sense` form with a positive sense index.
pub fn check_meaning_id(id: &str) -> std::result::Result<(), String> {
    let (word, sense) = id
        .rsplit_once(".v.")
        .ok_or_else(|| format!("meaning `{id}` is not of the form verb.v.N"))?;
    if word.is_empty() || word.chars().any(char::is_whitespace) {
        return Err(format!("meaning `{id}` has an empty or blank verb"));
    }
    if sense.is_empty() || !sense.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("meaning `{id}` has a non-numeric sense index"));
    }
    match sense.parse::<u32>() {
        Ok(s) if s >= 1 => Ok(()),
        _ => Err(format!("meaning `{id}` needs a sense index >= 1")),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Meaning {
    pub meaning_id: String,
    pub synset_id: String,
    pub parent: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Taxonomy {
    meanings: BTreeMap<String, Meaning>,
}

impl Taxonomy {
    /// Validates parent links and rejects cycles.
    pub fn from_meanings(meanings: impl IntoIterator<Item = Meaning>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, m) in meanings.into_iter().enumerate() {
            if map.contains_key(&m.meaning_id) {
                return Err(Error::DuplicateMeaning {
                    id: m.meaning_id,
                    first: 0,
                    second: i + 1,
                });
            }
            map.insert(m.meaning_id.clone(), m);
        }
        let tax = Taxonomy { meanings: map };
        tax.validate()?;
        Ok(tax)
    }

    fn validate(&self) -> Result<()> {
        for m in self.meanings.values() {
            if let Some(p) = &m.parent {
                if !self.meanings.contains_key(p) {
                    return Err(Error::DanglingParent {
                        meaning: m.meaning_id.clone(),
                        parent: p.clone(),
                    });
                }
            }
        }
        // A chain longer than the number of meanings must revisit a node.
        let limit = self.meanings.len();
        for m in self.meanings.values() {
            let mut steps = 0;
            let mut cur = m;
            while let Some(p) = &cur.parent {
                steps += 1;
                if steps > limit || p == &m.meaning_id {
                    return Err(Error::Cycle(m.meaning_id.clone()));
                }
                cur = &self.meanings[p];
            }
        }
        Ok(())
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        let mut meanings = BTreeMap::new();
        let mut line_of: HashMap<String, usize> = HashMap::new();
        for (line, raw) in content_lines(text) {
            let fields: Vec<&str> = raw.split('\t').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(Error::parse(
                    line,
                    format!("expected 3 tab-separated fields, found {}", fields.len()),
                ));
            }
            check_meaning_id(fields[0]).map_err(|msg| Error::parse(line, msg))?;
            if fields[1].is_empty() || fields[1].chars().any(char::is_whitespace) {
                return Err(Error::parse(line, "empty or blank synset id"));
            }
            let parent = match fields[2] {
                "-" => None,
                p => {
                    check_meaning_id(p).map_err(|msg| Error::parse(line, msg))?;
                    Some(p.to_string())
                }
            };
            if let Some(first) = line_of.insert(fields[0].to_string(), line) {
                return Err(Error::DuplicateMeaning {
                    id: fields[0].to_string(),
                    first,
                    second: line,
                });
            }
            meanings.insert(
                fields[0].to_string(),
                Meaning {
                    meaning_id: fields[0].to_string(),
                    synset_id: fields[1].to_string(),
                    parent,
                },
            );
        }
        let tax = Taxonomy { meanings };
        tax.validate()?;
        Ok(tax)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# meaning_id\tsynset_id\tparent\n");
        for m in self.meanings.values() {
            out.push_str(&format!(
                "{}\t{}\t{}\n",
                m.meaning_id,
                m.synset_id,
                m.parent.as_deref().unwrap_or("-")
            ));
        }
        out
    }

    pub fn len(&self) -> usize {
        self.meanings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.meanings.is_empty()
    }

    pub fn get(&self, id: &str) -> Result<&Meaning> {
        self.meanings
            .get(id)
            .ok_or_else(|| Error::UnknownMeaning(id.to_string()))
    }

    pub fn meanings(&self) -> impl Iterator<Item = &Meaning> {
        self.meanings.values()
    }

    /// True when `ancestor` lies strictly above `id` on its hypernym chain.
    pub fn is_ancestor(&self, ancestor: &str, id: &str) -> Result<bool> {
        let mut cur = self.get(id)?;
        self.get(ancestor)?;
        while let Some(p) = &cur.parent {
            if p == ancestor {
                return Ok(true);
            }
            cur = &self.meanings[p];
        }
        Ok(false)
    }

    /// Compares two meaning ids under a meaning-based mode.
    pub fn related_meanings(&self, mode: RelationMode, a: &str, b: &str) -> Result<bool> {
        let ma = self.get(a)?;
        let mb = self.get(b)?;
        let same = a == b;
        Ok(match mode {
            RelationMode::Verb | RelationMode::Am => same,
            RelationMode::As => same || ma.synset_id == mb.synset_id,
            RelationMode::Ah => {
                same || ma.synset_id == mb.synset_id
                    || self.is_ancestor(a, b)?
                    || self.is_ancestor(b, a)?
            }
        })
    }
}

pub fn parse_taxonomy(path: &Path) -> Result<Taxonomy> {
    let text = textio::read_to_string(path)?;
    Taxonomy::parse_str(&text).map_err(|e| e.in_file(path))
}

/// A relation mode bound to the taxonomy it consults.
#[derive(Debug, Clone, Copy)]
pub struct Relation<'a> {
    pub mode: RelationMode,
    pub taxonomy: &'a Taxonomy,
}

impl<'a> Relation<'a> {
    pub fn new(mode: RelationMode, taxonomy: &'a Taxonomy) -> Self {
        Relation { mode, taxonomy }
    }

    /// The string this mode compares: the verb, or the meaning id.
    pub fn key<'b>(&self, ann: &'b Annotation) -> Result<&'b str> {
        if !self.mode.needs_meanings() {
            return Ok(&ann.verb);
        }
        let m = ann.meaning.as_deref().ok_or_else(|| Error::MissingMeaning {
            verb: ann.verb.clone(),
            mode: self.mode.to_string(),
        })?;
        self.taxonomy.get(m)?;
        Ok(m)
    }

    pub fn related_keys(&self, a: &str, b: &str) -> Result<bool> {
        match self.mode {
            RelationMode::Verb => Ok(a == b),
            mode => self.taxonomy.related_meanings(mode, a, b),
        }
    }

    pub fn related(&self, a: &Annotation, b: &Annotation) -> Result<bool> {
        self.related_keys(self.key(a)?, self.key(b)?)
    }
}

pub fn related(taxonomy: &Taxonomy, mode: RelationMode, a: &Annotation, b: &Annotation) -> Result<bool> {
    Relation::new(mode, taxonomy).related(a, b)
}

/// Partition of annotation keys into connected components of the relation graph.
///
/// Each class is named after its lexicographically smallest member and
/// classes are ordered by name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticClasses {
    mode: RelationMode,
    classes: Vec<Vec<String>>,
    class_of: BTreeMap<String, usize>,
}

impl SemanticClasses {
    pub fn from_keys<'k>(
        relation: &Relation<'_>,
        keys: impl IntoIterator<Item = &'k str>,
    ) -> Result<Self> {
        let keys: Vec<&str> = keys.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let mut parent: Vec<usize> = (0..keys.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for i in 0..keys.len() {
            for j in i + 1..keys.len() {
                if relation.related_keys(keys[i], keys[j])? {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    if ri != rj {
                        parent[ri.max(rj)] = ri.min(rj);
                    }
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<String>> = BTreeMap::new();
        for (i, k) in keys.iter().enumerate() {
            let root = find(&mut parent, i);
            groups.entry(root).or_default().push(k.to_string());
        }
        // keys are sorted, so each group is sorted and roots are group minima
        let classes: Vec<Vec<String>> = groups.into_values().collect();
        let class_of = classes
            .iter()
            .enumerate()
            .flat_map(|(c, members)| members.iter().map(move |m| (m.clone(), c)))
            .collect();
        Ok(SemanticClasses {
            mode: relation.mode,
            classes,
            class_of,
        })
    }

    pub fn mode(&self) -> RelationMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn classes(&self) -> &[Vec<String>] {
        &self.classes
    }

    pub fn name(&self, class: usize) -> &str {
        &self.classes[class][0]
    }

    pub fn class_of(&self, key: &str) -> Result<usize> {
        self.class_of
            .get(key)
            .copied()
            .ok_or_else(|| Error::UnknownClass(key.to_string()))
    }

    pub fn class_name_of(&self, key: &str) -> Result<&str> {
        Ok(self.name(self.class_of(key)?))
    }
}

/// Groups annotations into semantic classes under `mode`.
pub fn semantic_classes<'a>(
    taxonomy: &Taxonomy,
    annotations: impl IntoIterator<Item = &'a Annotation>,
    mode: RelationMode,
) -> Result<SemanticClasses> {
    let relation = Relation::new(mode, taxonomy);
    let keys = annotations
        .into_iter()
        .map(|a| relation.key(a))
        .collect::<Result<Vec<_>>>()?;
    SemanticClasses::from_keys(&relation, keys)
}
