//! Per-split dataset statistics: instance count, candidate counts, and
//! abstract/title lengths in whitespace tokens.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pseudonym::ClozeInstance;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StatsError {
    #[error("cannot compute statistics of an empty split")]
    EmptySplit,
}

/// Exact integer running sum with extrema.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Extent {
    sum: u64,
    min: u64,
    max: u64,
}

impl Extent {
    fn add(&mut self, v: u64, first: bool) {
        self.sum += v;
        if first {
            self.min = v;
            self.max = v;
        } else {
            self.min = self.min.min(v);
            self.max = self.max.max(v);
        }
    }

    fn merge(self, other: Extent, self_empty: bool, other_empty: bool) -> Extent {
        match (self_empty, other_empty) {
            (true, _) => other,
            (_, true) => self,
            _ => Extent {
                sum: self.sum + other.sum,
                min: self.min.min(other.min),
                max: self.max.max(other.max),
            },
        }
    }
}

/// Mergeable accumulator; folding in any order gives the same result.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StatsAccumulator {
    instances: u64,
    candidates: Extent,
    abstract_len: Extent,
    title_len: Extent,
}

impl StatsAccumulator {
    pub fn add(&mut self, inst: &ClozeInstance) {
        let first = self.instances == 0;
        self.instances += 1;
        self.candidates.add(inst.candidates.len() as u64, first);
        self.abstract_len.add(inst.passage.split_whitespace().count() as u64, first);
        self.title_len.add(inst.question.split_whitespace().count() as u64, first);
    }

    pub fn merge(self, other: StatsAccumulator) -> StatsAccumulator {
        let (a, b) = (self.instances == 0, other.instances == 0);
        StatsAccumulator {
            instances: self.instances + other.instances,
            candidates: self.candidates.merge(other.candidates, a, b),
            abstract_len: self.abstract_len.merge(other.abstract_len, a, b),
            title_len: self.title_len.merge(other.title_len, a, b),
        }
    }

    pub fn finish(&self) -> Result<SplitStats, StatsError> {
        if self.instances == 0 {
            return Err(StatsError::EmptySplit);
        }
        let summary = |e: Extent| Summary {
            sum: e.sum,
            avg: e.sum as f64 / self.instances as f64,
            max: e.max,
            min: e.min,
        };
        Ok(SplitStats {
            instances: self.instances,
            candidates: summary(self.candidates),
            abstract_len: summary(self.abstract_len),
            title_len: summary(self.title_len),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub sum: u64,
    pub avg: f64,
    pub max: u64,
    pub min: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitStats {
    pub instances: u64,
    pub candidates: Summary,
    pub abstract_len: Summary,
    pub title_len: Summary,
}

pub fn compute_stats<'a>(split: impl IntoIterator<Item = &'a ClozeInstance>) -> Result<SplitStats, StatsError> {
    let mut acc = StatsAccumulator::default();
    for inst in split {
        acc.add(inst);
    }
    acc.finish()
}

fn thousands(n: u64) -> String {
    let digits = n.to_string();
    let mut out = String::new();
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(c);
    }
    out
}

/// Renders one column per named split, one row per statistic.
pub fn render_table(columns: &[(&str, SplitStats)]) -> String {
    type Cell = Box<dyn Fn(&SplitStats) -> String>;
    let rows: Vec<(&str, Cell)> = vec![
        ("Instances", Box::new(|s| thousands(s.instances))),
        ("Avg candidates", Box::new(|s| format!("{:.2}", s.candidates.avg))),
        ("Max candidates", Box::new(|s| s.candidates.max.to_string())),
        ("Min candidates", Box::new(|s| s.candidates.min.to_string())),
        ("Avg abstract len.", Box::new(|s| format!("{:.2}", s.abstract_len.avg))),
        ("Max abstract len.", Box::new(|s| s.abstract_len.max.to_string())),
        ("Min abstract len.", Box::new(|s| s.abstract_len.min.to_string())),
        ("Avg title len.", Box::new(|s| format!("{:.2}", s.title_len.avg))),
        ("Max title len.", Box::new(|s| s.title_len.max.to_string())),
        ("Min title len.", Box::new(|s| s.title_len.min.to_string())),
    ];
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|(_, f)| columns.iter().map(|(_, s)| f(s)).collect())
        .collect();
    let label_w = rows.iter().map(|(l, _)| l.len()).max().unwrap_or(0);
    let col_w: Vec<usize> = columns
        .iter()
        .enumerate()
        .map(|(j, (name, _))| cells.iter().map(|r| r[j].len()).max().unwrap_or(0).max(name.len()))
        .collect();

    let mut out = format!("{:label_w$}", "");
    for ((name, _), w) in columns.iter().zip(&col_w) {
        out.push_str(&format!("  {name:>w$}"));
    }
    out.push('\n');
    for ((label, _), row) in rows.iter().zip(&cells) {
        out.push_str(&format!("{label:label_w$}"));
        for (cell, w) in row.iter().zip(&col_w) {
            out.push_str(&format!("  {cell:>w$}"));
        }
        out.push('\n');
    }
    out
}
