//! Construction and evaluation of cloze-style biomedical reading
//! comprehension datasets from PubTator-annotated abstracts.
//!
//! An article's title becomes the question: one of its entities that also
//! appears in the abstract is replaced by `XXXX`, every entity in the
//! abstract is anonymized to an `@entityN` token, and the answerer must pick
//! the masked one among the abstract's entities.
//!
//! ```
//! use cloze_mrc::filter::FilterConfig;
//! use cloze_mrc::pipeline::build_dataset;
//! use cloze_mrc::pseudonym::Setting;
//! use cloze_mrc::synthetic::metastases_article;
//!
//! let (built, _) = build_dataset(&[metastases_article()], &FilterConfig::default(), Setting::B);
//! assert_eq!(built.instances[0].question, "Attributes of brain metastases from XXXX .");
//! ```
//!
//! Modules, in pipeline order:
//!
//! - [`pubtator`]: corpus download, parsing and writing
//! - [`filter`]: the rejection cascade and masked-entity choice
//! - [`pseudonym`]: `@entityN` anonymization and train/dev/test splits
//! - [`pipeline`]: the above chained together
//! - [`stats`]: per-split dataset statistics
//! - [`baselines`]: heuristic answerers
//! - [`eval`]: accuracy, significance and agreement

pub mod baselines;
pub mod eval;
pub mod filter;
pub mod jsonl;
pub mod pipeline;
pub mod pseudonym;
pub mod published;
pub mod pubtator;
pub mod stats;
pub mod synthetic;
