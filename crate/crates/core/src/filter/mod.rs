//! Article filtering: turns parsed PubTator records into accepted
//! pre-anonymization instances, or a single rejection reason each.

mod sentences;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pubtator::{EntityAnnotation, RawArticle};

pub use sentences::count_sentences;

/// Characters that separate several identifiers on one annotation.
const MULTI_ID_DELIMITERS: [char; 3] = [';', ',', '|'];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("`{0}` must be positive")]
    NotPositive(&'static str),
    #[error("min_distinct_ids ({min}) exceeds max_distinct_ids ({max})")]
    DistinctRange { min: usize, max: usize },
}

/// Thresholds of the filter cascade. Field names double as the keys of
/// `filters.toml`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    pub min_title_chars: usize,
    pub max_title_tokens: usize,
    pub min_abstract_chars: usize,
    pub min_abstract_sentences: usize,
    pub min_abstract_annotations: usize,
    pub min_distinct_ids: usize,
    pub max_distinct_ids: usize,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            min_title_chars: 15,
            max_title_tokens: 60,
            min_abstract_chars: 100,
            min_abstract_sentences: 10,
            min_abstract_annotations: 5,
            min_distinct_ids: 2,
            max_distinct_ids: 20,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let fields = [
            ("min_title_chars", self.min_title_chars),
            ("max_title_tokens", self.max_title_tokens),
            ("min_abstract_chars", self.min_abstract_chars),
            ("min_abstract_sentences", self.min_abstract_sentences),
            ("min_abstract_annotations", self.min_abstract_annotations),
            ("min_distinct_ids", self.min_distinct_ids),
            ("max_distinct_ids", self.max_distinct_ids),
        ];
        if let Some((name, _)) = fields.iter().find(|(_, v)| *v == 0) {
            return Err(ConfigError::NotPositive(name));
        }
        if self.min_distinct_ids > self.max_distinct_ids {
            return Err(ConfigError::DistinctRange {
                min: self.min_distinct_ids,
                max: self.max_distinct_ids,
            });
        }
        Ok(())
    }
}

/// Why an article was rejected. Rules are checked in declaration order and
/// the first failing one is reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RejectReason {
    TitleTooShort,
    TitleTooLong,
    NoAbstract,
    AbstractTooShort,
    TooFewSentences,
    TooFewAnnotations,
    TooFewDistinctIds,
    TooManyDistinctIds,
    UnlinkedEntity,
    MultiOntologyEntity,
    OverlappingSpans,
    NoTitleEntity,
    NoSharedEntity,
    AnswerIsUniqueMostFrequent,
}

impl RejectReason {
    pub const ALL: [RejectReason; 14] = [
        RejectReason::TitleTooShort,
        RejectReason::TitleTooLong,
        RejectReason::NoAbstract,
        RejectReason::AbstractTooShort,
        RejectReason::TooFewSentences,
        RejectReason::TooFewAnnotations,
        RejectReason::TooFewDistinctIds,
        RejectReason::TooManyDistinctIds,
        RejectReason::UnlinkedEntity,
        RejectReason::MultiOntologyEntity,
        RejectReason::OverlappingSpans,
        RejectReason::NoTitleEntity,
        RejectReason::NoSharedEntity,
        RejectReason::AnswerIsUniqueMostFrequent,
    ];
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(&format!("{self:?}"))
    }
}

/// An accepted article, before pseudo-identifiers are assigned.
///
/// Entity offsets are those of the source record (combined-text offsets);
/// the abstract starts at `title.chars().count() + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreInstance {
    pub pmid: String,
    pub title: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    pub abstract_entities: Vec<EntityAnnotation>,
    pub title_entities: Vec<EntityAnnotation>,
    pub masked_entity_id: String,
    /// Mention count per identifier over the abstract.
    pub id_frequencies: BTreeMap<String, usize>,
}

impl PreInstance {
    pub fn abstract_offset(&self) -> usize {
        self.title.chars().count() + 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Accept(PreInstance),
    Reject { pmid: String, reason: RejectReason },
}

impl Verdict {
    pub fn reason(&self) -> Option<RejectReason> {
        match self {
            Verdict::Accept(_) => None,
            Verdict::Reject { reason, .. } => Some(*reason),
        }
    }
}

pub fn whitespace_tokens(text: &str) -> usize {
    text.split_whitespace().count()
}

fn is_unlinked(id: &str) -> bool {
    let id = id.trim();
    id.is_empty() || id == "-"
}

fn is_multi_id(id: &str) -> bool {
    id.contains(MULTI_ID_DELIMITERS)
}

/// Runs the whole filter cascade on one article.
pub fn apply_filters(article: &RawArticle, cfg: &FilterConfig) -> Verdict {
    match check(article, cfg) {
        Ok(pre) => Verdict::Accept(pre),
        Err(reason) => Verdict::Reject {
            pmid: article.pmid.clone(),
            reason,
        },
    }
}

fn check(article: &RawArticle, cfg: &FilterConfig) -> Result<PreInstance, RejectReason> {
    use RejectReason::*;

    if article.title.chars().count() < cfg.min_title_chars {
        return Err(TitleTooShort);
    }
    if whitespace_tokens(&article.title) > cfg.max_title_tokens {
        return Err(TitleTooLong);
    }
    if article.abstract_text.trim().is_empty() {
        return Err(NoAbstract);
    }
    if article.abstract_text.chars().count() < cfg.min_abstract_chars {
        return Err(AbstractTooShort);
    }
    if count_sentences(&article.abstract_text) < cfg.min_abstract_sentences {
        return Err(TooFewSentences);
    }

    let abstract_entities: Vec<EntityAnnotation> = article.abstract_annotations().cloned().collect();
    if abstract_entities.len() < cfg.min_abstract_annotations {
        return Err(TooFewAnnotations);
    }
    let distinct: BTreeSet<&str> = abstract_entities
        .iter()
        .map(|a| a.identifier.as_str())
        .filter(|id| !is_unlinked(id))
        .collect();
    if distinct.len() < cfg.min_distinct_ids {
        return Err(TooFewDistinctIds);
    }
    if distinct.len() > cfg.max_distinct_ids {
        return Err(TooManyDistinctIds);
    }
    if article.annotations.iter().any(|a| is_unlinked(&a.identifier)) {
        return Err(UnlinkedEntity);
    }
    if article.annotations.iter().any(|a| is_multi_id(&a.identifier)) {
        return Err(MultiOntologyEntity);
    }
    if has_overlap(&article.annotations) {
        return Err(OverlappingSpans);
    }

    let title_entities: Vec<EntityAnnotation> = article.title_annotations().cloned().collect();
    if title_entities.is_empty() {
        return Err(NoTitleEntity);
    }
    let Some(masked) = select_masked_entity(&title_entities, &abstract_entities) else {
        return Err(NoSharedEntity);
    };
    let masked_entity_id = masked.to_owned();

    let id_frequencies = mention_frequencies(&abstract_entities);
    if !frequency_filter(&id_frequencies, &masked_entity_id) {
        return Err(AnswerIsUniqueMostFrequent);
    }

    Ok(PreInstance {
        pmid: article.pmid.clone(),
        title: article.title.clone(),
        abstract_text: article.abstract_text.clone(),
        abstract_entities,
        title_entities,
        masked_entity_id,
        id_frequencies,
    })
}

/// Annotations are sorted by start, so a running maximum of end offsets
/// finds every overlap.
fn has_overlap(sorted: &[EntityAnnotation]) -> bool {
    let mut max_end = 0;
    for (i, a) in sorted.iter().enumerate() {
        if i > 0 && a.start < max_end {
            return true;
        }
        max_end = max_end.max(a.end);
    }
    false
}

pub fn mention_frequencies(entities: &[EntityAnnotation]) -> BTreeMap<String, usize> {
    let mut freq = BTreeMap::new();
    for e in entities {
        *freq.entry(e.identifier.clone()).or_insert(0) += 1;
    }
    freq
}

/// Picks the title entity to mask: among title entities whose identifier
/// also occurs in the abstract, the one with the earliest title offset.
/// `None` when no title entity is shared with the abstract.
pub fn select_masked_entity<'a>(
    title_entities: &'a [EntityAnnotation],
    abstract_entities: &[EntityAnnotation],
) -> Option<&'a str> {
    let in_abstract: BTreeSet<&str> = abstract_entities.iter().map(|a| a.identifier.as_str()).collect();
    title_entities
        .iter()
        .filter(|t| in_abstract.contains(t.identifier.as_str()))
        .min_by_key(|t| t.start)
        .map(|t| t.identifier.as_str())
}

/// `false` iff the answer is strictly more frequent than every other
/// identifier. Ties at the top are retained.
pub fn frequency_filter(id_frequencies: &BTreeMap<String, usize>, answer_id: &str) -> bool {
    let answer = id_frequencies.get(answer_id).copied().unwrap_or(0);
    id_frequencies
        .iter()
        .any(|(id, &n)| id != answer_id && n >= answer)
}

/// Accept count plus per-reason reject counts. Merging is associative and
/// order-independent.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectionLedger {
    pub accepted: usize,
    pub rejected: BTreeMap<RejectReason, usize>,
}

impl RejectionLedger {
    pub fn record(&mut self, verdict: &Verdict) {
        match verdict.reason() {
            None => self.accepted += 1,
            Some(r) => *self.rejected.entry(r).or_insert(0) += 1,
        }
    }

    pub fn merge(mut self, other: RejectionLedger) -> RejectionLedger {
        self.accepted += other.accepted;
        for (r, n) in other.rejected {
            *self.rejected.entry(r).or_insert(0) += n;
        }
        self
    }

    pub fn total_rejected(&self) -> usize {
        self.rejected.values().sum()
    }

    pub fn total(&self) -> usize {
        self.accepted + self.total_rejected()
    }
}

/// Writes `pmid,reason` rows with a header line.
pub struct LedgerCsvWriter<W: Write> {
    out: W,
}

impl<W: Write> LedgerCsvWriter<W> {
    pub fn new(mut out: W) -> io::Result<Self> {
        writeln!(out, "pmid,reason")?;
        Ok(Self { out })
    }

    pub fn write(&mut self, pmid: &str, reason: RejectReason) -> io::Result<()> {
        writeln!(self.out, "{pmid},{reason}")
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}
