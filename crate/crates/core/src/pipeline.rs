//! End-to-end dataset construction: parse, filter, anonymize, split.

use std::io::{self, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::filter::{apply_filters, FilterConfig, LedgerCsvWriter, PreInstance, RejectionLedger, Verdict};
use crate::pseudonym::{assign_pseudo_ids, ClozeInstance, GlobalVocab, Setting};
use crate::pubtator::{open_corpus, AnnotationIssue, PubtatorReader, RawArticle, Record, Separator};

#[derive(Debug, Default)]
pub struct Filtered {
    pub accepted: Vec<PreInstance>,
    /// `(pmid, reason)` in input order.
    pub rejected: Vec<(String, crate::filter::RejectReason)>,
    pub ledger: RejectionLedger,
}

impl Filtered {
    pub fn write_ledger_csv(&self, out: impl Write) -> io::Result<()> {
        let mut w = LedgerCsvWriter::new(out)?;
        for (pmid, reason) in &self.rejected {
            w.write(pmid, *reason)?;
        }
        w.into_inner().flush()
    }
}

/// Runs the filter cascade over `articles`. Order of the rejection list
/// follows the input.
pub fn filter_articles(articles: &[RawArticle], cfg: &FilterConfig) -> Filtered {
    let verdicts: Vec<Verdict> = articles.par_iter().map(|a| apply_filters(a, cfg)).collect();
    let mut out = Filtered::default();
    for v in verdicts {
        out.ledger.record(&v);
        match v {
            Verdict::Accept(p) => out.accepted.push(p),
            Verdict::Reject { pmid, reason } => out.rejected.push((pmid, reason)),
        }
    }
    out
}

#[derive(Debug)]
pub struct Built {
    /// Sorted by ascending pmid.
    pub instances: Vec<ClozeInstance>,
    pub vocab: Option<GlobalVocab>,
    pub ledger: RejectionLedger,
}

pub fn build_dataset(articles: &[RawArticle], cfg: &FilterConfig, setting: Setting) -> (Built, Filtered) {
    let mut filtered = filter_articles(articles, cfg);
    let accepted = std::mem::take(&mut filtered.accepted);
    let (instances, vocab) = assign_pseudo_ids(accepted, setting);
    let built = Built { instances, vocab, ledger: filtered.ledger.clone() };
    (built, filtered)
}

/// Articles and annotation issues read from one or more corpus files.
#[derive(Debug, Default)]
pub struct Corpus {
    pub articles: Vec<RawArticle>,
    pub issues: Vec<AnnotationIssue>,
}

pub fn read_corpus<P: AsRef<Path>>(paths: &[P], sep: Separator) -> io::Result<Corpus> {
    let mut corpus = Corpus::default();
    for p in paths {
        for rec in PubtatorReader::new(open_corpus(p)?, sep) {
            match rec? {
                Record::Article(a) => corpus.articles.push(a),
                Record::Issue(i) => corpus.issues.push(i),
            }
        }
    }
    Ok(corpus)
}
