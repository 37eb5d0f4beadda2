use std::collections::{BTreeMap, BTreeSet};

use crate::inference::ClassDistribution;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    pub segment_id: String,
    pub person_id: String,
    pub true_class: String,
    pub predicted: String,
    pub probability: f64,
    pub distribution: ClassDistribution,
}

impl EvalRecord {
    pub fn correct(&self) -> bool {
        self.true_class == self.predicted
    }

    /// `segment_id  predicted  true  p(predicted)  class:prob,...`
    pub fn to_line(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}",
            self.segment_id,
            self.predicted,
            self.true_class,
            self.probability,
            self.distribution.to_dump()
        )
    }
}

/// Which persons fed each part of one fold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAudit {
    pub held_out: String,
    pub train_persons: BTreeSet<String>,
    /// Persons whose descriptors entered the encoder fitting pool.
    pub pool_persons: BTreeSet<String>,
    pub test_segments: Vec<String>,
}

impl FoldAudit {
    pub fn is_clean(&self) -> bool {
        !self.train_persons.contains(&self.held_out) && !self.pool_persons.contains(&self.held_out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub config: Vec<(String, String)>,
    pub records: Vec<EvalRecord>,
    pub folds: Vec<FoldAudit>,
}

/// Rows are true classes, columns predicted classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Confusion {
    pub labels: Vec<String>,
    pub counts: Vec<Vec<usize>>,
}

impl Confusion {
    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }
}

pub fn accuracy(report: &EvalReport) -> Result<f64> {
    if report.records.is_empty() {
        return Err(Error::invalid("accuracy of an empty report is undefined"));
    }
    let correct = report.records.iter().filter(|r| r.correct()).count();
    Ok(correct as f64 / report.records.len() as f64)
}

pub fn confusion(report: &EvalReport) -> Confusion {
    let labels: Vec<String> = report
        .records
        .iter()
        .flat_map(|r| [r.true_class.clone(), r.predicted.clone()])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let idx: BTreeMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let mut counts = vec![vec![0; labels.len()]; labels.len()];
    for r in &report.records {
        counts[idx[r.true_class.as_str()]][idx[r.predicted.as_str()]] += 1;
    }
    Confusion { labels, counts }
}

impl EvalReport {
    pub fn accuracy(&self) -> Result<f64> {
        accuracy(self)
    }

    pub fn confusion(&self) -> Confusion {
        confusion(self)
    }

    pub fn to_text(&self) -> Result<String> {
        let mut out = String::from("# evaluation report\n");
        for (k, v) in &self.config {
            out.push_str(&format!("{k}={v}\n"));
        }
        out.push_str(&format!("records={}\n", self.records.len()));
        out.push_str("# segment_id\tpredicted\ttrue\tp_predicted\tdistribution\n");
        for r in &self.records {
            out.push_str(&r.to_line());
            out.push('\n');
        }
        out.push_str(&format!("accuracy={}\n", self.accuracy()?));
        let c = self.confusion();
        out.push_str("confusion");
        for l in &c.labels {
            out.push('\t');
            out.push_str(l);
        }
        out.push('\n');
        for (l, row) in c.labels.iter().zip(&c.counts) {
            out.push_str(l);
            for n in row {
                out.push_str(&format!("\t{n}"));
            }
            out.push('\n');
        }
        Ok(out)
    }
}
