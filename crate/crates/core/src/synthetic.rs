//! Hand-built and randomly generated PubTator articles.
//!
//! [`ArticleBuilder`] assembles a record from text and entity pieces and
//! computes the character offsets. [`generate_corpus`] produces a seeded
//! corpus whose articles exercise every rule of the filter cascade.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::pubtator::{EntityAnnotation, RawArticle};

#[derive(Debug, Clone)]
pub struct ArticleBuilder {
    pmid: String,
    title: String,
    title_chars: usize,
    abstract_text: String,
    abstract_chars: usize,
    title_anns: Vec<EntityAnnotation>,
    /// Offsets relative to the abstract start.
    abstract_anns: Vec<EntityAnnotation>,
}

impl ArticleBuilder {
    pub fn new(pmid: impl Into<String>) -> Self {
        Self {
            pmid: pmid.into(),
            title: String::new(),
            title_chars: 0,
            abstract_text: String::new(),
            abstract_chars: 0,
            title_anns: Vec::new(),
            abstract_anns: Vec::new(),
        }
    }

    pub fn title_text(&mut self, text: &str) -> &mut Self {
        self.title.push_str(text);
        self.title_chars += text.chars().count();
        self
    }

    pub fn title_entity(&mut self, mention: &str, semantic_type: &str, id: &str) -> &mut Self {
        let start = self.title_chars;
        self.title_text(mention);
        self.title_anns.push(annotation(start, mention, semantic_type, id));
        self
    }

    pub fn abstract_text(&mut self, text: &str) -> &mut Self {
        self.abstract_text.push_str(text);
        self.abstract_chars += text.chars().count();
        self
    }

    pub fn abstract_entity(&mut self, mention: &str, semantic_type: &str, id: &str) -> &mut Self {
        let start = self.abstract_chars;
        self.abstract_text(mention);
        self.abstract_anns.push(annotation(start, mention, semantic_type, id));
        self
    }

    /// Adds an annotation over an already written abstract span.
    pub fn abstract_annotation(&mut self, start: usize, end: usize, semantic_type: &str, id: &str) -> &mut Self {
        let mention: String = self.abstract_text.chars().skip(start).take(end - start).collect();
        self.abstract_anns.push(annotation(start, &mention, semantic_type, id));
        self
    }

    pub fn abstract_len(&self) -> usize {
        self.abstract_chars
    }

    pub fn build(&self) -> RawArticle {
        let offset = self.title_chars + 1;
        let mut annotations = self.title_anns.clone();
        annotations.extend(self.abstract_anns.iter().map(|a| EntityAnnotation {
            start: a.start + offset,
            end: a.end + offset,
            ..a.clone()
        }));
        annotations.sort_by_key(|a| (a.start, a.end));
        RawArticle {
            pmid: self.pmid.clone(),
            title: self.title.clone(),
            abstract_text: self.abstract_text.clone(),
            annotations,
        }
    }
}

fn annotation(start: usize, mention: &str, semantic_type: &str, id: &str) -> EntityAnnotation {
    EntityAnnotation {
        start,
        end: start + mention.chars().count(),
        mention: mention.to_owned(),
        semantic_type: semantic_type.to_owned(),
        identifier: id.to_owned(),
    }
}

pub const CANCER: &str = "MESH:D001943";
pub const PATIENTS: &str = "9606";
pub const LUNG_CANCER: &str = "MESH:D008175";
pub const METASTASIS: &str = "MESH:D009362";
pub const EDEMA: &str = "MESH:D004487";
pub const PRIMARY_TUMOR: &str = "MESH:D009369";

/// A worked example: an oncology abstract with six linked entities where
/// the title entity is not the most frequent one in the abstract.
pub fn metastases_article() -> RawArticle {
    const D: &str = "Disease";
    const S: &str = "Species";
    let mut b = ArticleBuilder::new("10000001");
    b.title_text("Attributes of brain metastases from ")
        .title_entity("breast and lung cancer", D, CANCER)
        .title_text(" .");
    b.abstract_text("BACKGROUND: Most brain metastases arise from ")
        .abstract_entity("breast and lung cancer", D, CANCER)
        .abstract_text(" . Few studies compare the brain regions they involve, their numbers and intrinsic attributes. METHODS: Records of all ")
        .abstract_entity("patients", S, PATIENTS)
        .abstract_text(" referred to Radiation Oncology for treatment of symptomatic brain metastases were obtained. Computed tomography (n = 56) or magnetic resonance imaging (n = 72) brain scans were reviewed. RESULTS: Data from 68 breast and 62 ")
        .abstract_entity("lung cancer", D, LUNG_CANCER)
        .abstract_text(" ")
        .abstract_entity("patients", S, PATIENTS)
        .abstract_text(" were compared. Brain metastases presented earlier in the course of the lung than of the ")
        .abstract_entity("breast and lung cancer", D, CANCER)
        .abstract_text(" ")
        .abstract_entity("patients", S, PATIENTS)
        .abstract_text(" (p = 0.001). There were more metastases in the cerebral hemispheres of the breast than of the ")
        .abstract_entity("lung cancer", D, LUNG_CANCER)
        .abstract_text(" ")
        .abstract_entity("patients", S, PATIENTS)
        .abstract_text(" (p = 0.014). More ")
        .abstract_entity("breast and lung cancer", D, CANCER)
        .abstract_text(" ")
        .abstract_entity("patients", S, PATIENTS)
        .abstract_text(" had cerebellar metastases (p = 0.001). The number of cerebral hemisphere metastases and presence of cerebellar metastases were positively correlated (p = 0.001). The prevalence of at least one ")
        .abstract_entity("metastasis", D, METASTASIS)
        .abstract_text(" surrounded with >2 cm of ")
        .abstract_entity("edema", D, EDEMA)
        .abstract_text(" was greater for the lung than for the breast ")
        .abstract_entity("patients", S, PATIENTS)
        .abstract_text(" (p = 0.019). The ")
        .abstract_entity("primary tumor", D, PRIMARY_TUMOR)
        .abstract_text(" type, rather than the scanning method, correlated with differences between these variables. CONCLUSIONS: Brain metastases from lung occur earlier, are more ")
        .abstract_entity("edematous", D, EDEMA)
        .abstract_text(" , but fewer in number than those from ")
        .abstract_entity("breast and lung cancer", D, CANCER)
        .abstract_text(" . Cerebellar brain metastases are more frequent in ")
        .abstract_entity("breast and lung cancer", D, CANCER)
        .abstract_text(" .");
    b.build()
}

/// The same abstract after anonymization with per-instance numbering.
pub const METASTASES_PASSAGE: &str = "BACKGROUND: Most brain metastases arise from @entity0 . Few studies compare the brain regions they involve, their numbers and intrinsic attributes. METHODS: Records of all @entity1 referred to Radiation Oncology for treatment of symptomatic brain metastases were obtained. Computed tomography (n = 56) or magnetic resonance imaging (n = 72) brain scans were reviewed. RESULTS: Data from 68 breast and 62 @entity2 @entity1 were compared. Brain metastases presented earlier in the course of the lung than of the @entity0 @entity1 (p = 0.001). There were more metastases in the cerebral hemispheres of the breast than of the @entity2 @entity1 (p = 0.014). More @entity0 @entity1 had cerebellar metastases (p = 0.001). The number of cerebral hemisphere metastases and presence of cerebellar metastases were positively correlated (p = 0.001). The prevalence of at least one @entity3 surrounded with >2 cm of @entity4 was greater for the lung than for the breast @entity1 (p = 0.019). The @entity5 type, rather than the scanning method, correlated with differences between these variables. CONCLUSIONS: Brain metastases from lung occur earlier, are more @entity4 , but fewer in number than those from @entity0 . Cerebellar brain metastases are more frequent in @entity0 .";

pub const METASTASES_QUESTION: &str = "Attributes of brain metastases from XXXX .";

/// Knobs of the random corpus generator. Rates are per-article
/// probabilities of injecting a specific defect.
#[derive(Debug, Clone)]
pub struct SyntheticConfig {
    pub articles: usize,
    pub seed: u64,
    pub lexicon_size: usize,
    pub first_pmid: u64,
    pub short_title_rate: f64,
    pub long_title_rate: f64,
    pub no_abstract_rate: f64,
    pub unlinked_rate: f64,
    pub multi_id_rate: f64,
    pub overlap_rate: f64,
    /// Probability that a title entity is drawn from the abstract's entities.
    pub shared_title_rate: f64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            articles: 1000,
            seed: 0,
            lexicon_size: 600,
            first_pmid: 20_000_000,
            short_title_rate: 0.03,
            long_title_rate: 0.02,
            no_abstract_rate: 0.02,
            unlinked_rate: 0.03,
            multi_id_rate: 0.03,
            overlap_rate: 0.03,
            shared_title_rate: 0.85,
        }
    }
}

const FILLER: &[&str] = &[
    "the", "of", "and", "in", "with", "was", "were", "to", "for", "on", "by", "a", "these", "that",
    "levels", "expression", "cells", "treatment", "response", "increased", "reduced", "study",
    "analysis", "cohort", "risk", "associated", "significantly", "observed", "clinical", "outcome",
    "therapy", "dose", "effect", "mice", "tissue", "protein", "induced", "receptor", "serum",
    "activity", "group", "control", "compared", "after", "before", "during", "model", "function",
    "samples", "were", "measured", "using", "high", "low", "patterns", "mechanism", "pathway",
    "evidence", "suggest", "may", "role", "novel", "acute", "chronic", "severe", "mild", "early",
    "late", "follow-up", "years", "months", "(n", "=", "48)", "(p", "<", "0.05)", "95%", ",",
];

const OPENERS: &[&str] = &[
    "We", "The", "These", "In", "Our", "Results", "Patients", "Overall", "Here", "Further", "Methods",
    "Conclusions", "Background", "Treatment", "Analysis", "Both", "Median", "All", "Data", "Serum",
];

const SYLLABLES: &[&str] = &[
    "car", "dio", "neu", "ro", "pa", "thy", "hep", "ato", "ma", "lin", "ox", "cil", "zo", "mab",
    "gen", "tin", "fib", "ros", "is", "ade", "no", "leu", "ke", "mia", "sar", "co", "vir", "al",
    "tri", "pam", "ine", "sul", "fa", "col", "itis", "derm", "nephr", "opathy", "glyc", "emia",
];

const TYPES: &[&str] = &["Disease", "Chemical", "Gene", "Species"];

#[derive(Debug, Clone)]
struct LexEntry {
    id: String,
    semantic_type: &'static str,
    names: Vec<String>,
}

fn make_lexicon(size: usize, rng: &mut ChaCha8Rng) -> Vec<LexEntry> {
    (0..size)
        .map(|i| {
            let semantic_type = TYPES[i % TYPES.len()];
            let id = match semantic_type {
                "Gene" => format!("{}", 1000 + i),
                "Species" => format!("{}", 9000 + i),
                "Chemical" => format!("MESH:C{i:06}"),
                _ => format!("MESH:D{i:06}"),
            };
            let n_names = rng.gen_range(1..=3);
            let names = (0..n_names)
                .map(|_| {
                    let words = rng.gen_range(1..=3);
                    (0..words)
                        .map(|_| {
                            let syl = rng.gen_range(2..=4);
                            (0..syl).map(|_| *SYLLABLES.choose(rng).unwrap()).collect::<String>()
                        })
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .collect();
            LexEntry { id, semantic_type, names }
        })
        .collect()
}

/// Generates `cfg.articles` articles with consecutive pmids. Each article
/// is drawn from its own RNG stream, so article `i` does not depend on how
/// many articles are generated.
pub fn generate_corpus(cfg: &SyntheticConfig) -> Vec<RawArticle> {
    let mut lex_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let lexicon = make_lexicon(cfg.lexicon_size, &mut lex_rng);
    (0..cfg.articles)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(i as u64 + 1);
            generate_article(cfg, &lexicon, cfg.first_pmid + i as u64, &mut rng)
        })
        .collect()
}

fn filler_sentence(rng: &mut ChaCha8Rng, words: usize) -> Vec<String> {
    let mut out = vec![OPENERS.choose(rng).unwrap().to_string()];
    out.extend((1..words).map(|_| FILLER.choose(rng).unwrap().to_string()));
    out
}

fn generate_article(cfg: &SyntheticConfig, lexicon: &[LexEntry], pmid: u64, rng: &mut ChaCha8Rng) -> RawArticle {
    let mut b = ArticleBuilder::new(pmid.to_string());
    let k = rng.gen_range(1..=23usize).min(lexicon.len());
    let chosen: Vec<&LexEntry> = lexicon.choose_multiple(rng, k).collect();

    let pick_id = |e: &LexEntry, rng: &mut ChaCha8Rng| -> String {
        if rng.gen_bool(cfg.unlinked_rate / 3.0) {
            "-".to_owned()
        } else if rng.gen_bool(cfg.multi_id_rate / 3.0) {
            format!("{};{}", e.id, lexicon.choose(rng).unwrap().id)
        } else {
            e.id.clone()
        }
    };

    // title
    let title_words = if rng.gen_bool(cfg.short_title_rate) {
        1
    } else if rng.gen_bool(cfg.long_title_rate) {
        rng.gen_range(61..=75)
    } else {
        rng.gen_range(3..=14)
    };
    let title_entities = if title_words == 1 || rng.gen_bool(0.08) { 0 } else { rng.gen_range(1..=2) };
    let slots: Vec<usize> = (0..title_entities).map(|_| rng.gen_range(0..title_words)).collect();
    let words = filler_sentence(rng, title_words);
    for (pos, w) in words.iter().enumerate() {
        if pos > 0 {
            b.title_text(" ");
        }
        b.title_text(w);
        for _ in slots.iter().filter(|&&s| s == pos) {
            let e = if rng.gen_bool(cfg.shared_title_rate) {
                *chosen.choose(rng).unwrap()
            } else {
                lexicon.choose(rng).unwrap()
            };
            let id = pick_id(e, rng);
            b.title_text(" ").title_entity(e.names.choose(rng).unwrap(), e.semantic_type, &id);
        }
    }
    b.title_text(" .");

    if rng.gen_bool(cfg.no_abstract_rate) {
        return b.build();
    }

    // abstract: skewed entity choice so that frequencies vary
    let sentences = rng.gen_range(6..=16);
    let mut overlap_done = !rng.gen_bool(cfg.overlap_rate);
    for s in 0..sentences {
        if s > 0 {
            b.abstract_text(" ");
        }
        let n_words = rng.gen_range(5..=16);
        let words = filler_sentence(rng, n_words);
        let n_mentions = rng.gen_range(0..=3);
        let at: Vec<usize> = (0..n_mentions).map(|_| rng.gen_range(1..=n_words)).collect();
        for (pos, w) in words.iter().enumerate() {
            if pos > 0 {
                b.abstract_text(" ");
            }
            b.abstract_text(w);
            for _ in at.iter().filter(|&&p| p == pos + 1) {
                let idx = rng.gen_range(0..k).min(rng.gen_range(0..k));
                let e = chosen[idx];
                let name = e.names.choose(rng).unwrap();
                let id = pick_id(e, rng);
                b.abstract_text(" ");
                let start = b.abstract_len();
                b.abstract_entity(name, e.semantic_type, &id);
                if !overlap_done {
                    let other = lexicon.choose(rng).unwrap();
                    // a strict prefix of the mention, so never a duplicate span
                    let len = name.chars().count();
                    let first_word = name.split(' ').next().unwrap().chars().count();
                    let sub = if first_word < len { first_word } else { len - 1 };
                    b.abstract_annotation(start, start + sub, other.semantic_type, &other.id);
                    overlap_done = true;
                }
            }
        }
        b.abstract_text(" .");
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pubtator::{parse_str, to_pubtator_string, Record, Separator};

    #[test]
    fn builder_offsets_match_text() {
        let art = metastases_article();
        let combined = art.combined_text(Separator::Space);
        let chars: Vec<char> = combined.chars().collect();
        for a in &art.annotations {
            let slice: String = chars[a.start..a.end].iter().collect();
            assert_eq!(slice, a.mention);
        }
        assert_eq!(art.title_annotations().count(), 1);
        assert_eq!(art.abstract_annotations().count(), 17);
    }

    #[test]
    fn generated_corpus_parses_cleanly() {
        let cfg = SyntheticConfig { articles: 200, seed: 3, ..Default::default() };
        let arts = generate_corpus(&cfg);
        let text: String = arts.iter().map(to_pubtator_string).collect();
        let recs = parse_str(&text, Separator::Space);
        assert!(recs.iter().all(|r| matches!(r, Record::Article(_))));
        let parsed: Vec<_> = recs.into_iter().filter_map(Record::into_article).collect();
        assert_eq!(parsed, arts);
    }

    #[test]
    fn generation_is_seeded_and_prefix_stable() {
        let small = generate_corpus(&SyntheticConfig { articles: 10, seed: 9, ..Default::default() });
        let large = generate_corpus(&SyntheticConfig { articles: 30, seed: 9, ..Default::default() });
        assert_eq!(small[..], large[..10]);
        let other = generate_corpus(&SyntheticConfig { articles: 10, seed: 10, ..Default::default() });
        assert_ne!(small, other);
    }
}
