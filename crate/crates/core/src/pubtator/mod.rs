//! PubTator bulk-format ingestion.
//!
//! A PubTator record is a blank-line-separated block:
//!
//! ```text
//! 123|t|Title text .
//! 123|a|Abstract text ...
//! 123<TAB>36<TAB>58<TAB>breast and lung cancer<TAB>Disease<TAB>MESH:D001943
//! ```
//!
//! Annotation offsets are character offsets into the combined document text
//! `title + separator + abstract`, where the separator is a single character
//! (a space by default).

mod fetch;
mod parse;
mod write;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use fetch::{fetch_corpus, parse_manifest, sha256_file, FetchOptions, FetchOutcome, FetchStatus};
pub use parse::{open_corpus, parse_str, PubtatorReader};
pub use write::{to_pubtator_string, write_article};

/// Character placed between title and abstract when computing offsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Separator {
    #[default]
    Space,
    Newline,
}

impl Separator {
    pub fn as_char(self) -> char {
        match self {
            Separator::Space => ' ',
            Separator::Newline => '\n',
        }
    }
}

impl std::str::FromStr for Separator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "space" | " " => Ok(Separator::Space),
            "newline" | "\\n" | "\n" => Ok(Separator::Newline),
            other => Err(format!("unknown separator `{other}` (expected space|newline)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityAnnotation {
    /// Character offset into the combined text.
    pub start: usize,
    /// Exclusive end offset.
    pub end: usize,
    pub mention: String,
    pub semantic_type: String,
    /// Ontology identifier as it appears in the file. May be empty or
    /// hold several delimiter-separated identifiers.
    pub identifier: String,
}

impl EntityAnnotation {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }

    pub fn overlaps(&self, other: &EntityAnnotation) -> bool {
        self.start < other.end && other.start < self.end
    }
}

/// One PubTator record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawArticle {
    pub pmid: String,
    pub title: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    /// Sorted by start offset.
    pub annotations: Vec<EntityAnnotation>,
}

impl RawArticle {
    pub fn title_chars(&self) -> usize {
        self.title.chars().count()
    }

    /// Offset at which the abstract starts in the combined text.
    pub fn abstract_offset(&self) -> usize {
        self.title_chars() + 1
    }

    pub fn combined_text(&self, sep: Separator) -> String {
        let mut s = String::with_capacity(self.title.len() + 1 + self.abstract_text.len());
        s.push_str(&self.title);
        s.push(sep.as_char());
        s.push_str(&self.abstract_text);
        s
    }

    pub fn title_annotations(&self) -> impl Iterator<Item = &EntityAnnotation> {
        let limit = self.title_chars();
        self.annotations.iter().filter(move |a| a.end <= limit)
    }

    pub fn abstract_annotations(&self) -> impl Iterator<Item = &EntityAnnotation> {
        let offset = self.abstract_offset();
        self.annotations.iter().filter(move |a| a.start >= offset)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IssueKind {
    SpanOutOfBounds,
    MentionMismatch,
    MalformedLine,
    DuplicateSpan,
}

impl fmt::Display for IssueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A problem found while parsing a record. The record itself is still
/// emitted (minus the offending line) whenever it has a title line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationIssue {
    pub pmid: String,
    pub kind: IssueKind,
    pub detail: String,
}

/// Item produced by [`PubtatorReader`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Record {
    Article(RawArticle),
    Issue(AnnotationIssue),
}

impl Record {
    pub fn into_article(self) -> Option<RawArticle> {
        match self {
            Record::Article(a) => Some(a),
            Record::Issue(_) => None,
        }
    }
}
