//! Entity anonymization: replaces ontology identifiers with `@entityN`
//! pseudo-identifiers and renders cloze instances.
//!
//! Two numbering scopes are supported. In [`Setting::A`] an identifier keeps
//! the same number across the whole dataset; numbers are handed out by first
//! appearance while walking instances in ascending pmid order. In
//! [`Setting::B`] numbering restarts at `@entity0` for every instance, in
//! order of first occurrence in the passage.

mod split;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::filter::PreInstance;

pub use split::{split_dataset, tiny_draws, SplitError, SplitSpec, Splits};

pub const PLACEHOLDER: &str = "XXXX";
pub const MIN_CANDIDATES: usize = 2;
pub const MAX_CANDIDATES: usize = 20;
const PREFIX: &str = "@entity";

/// An `@entityN` token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PseudoId(pub u32);

impl fmt::Display for PseudoId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{PREFIX}{}", self.0)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("`{0}` is not a pseudo-identifier")]
pub struct ParsePseudoIdError(String);

impl FromStr for PseudoId {
    type Err = ParsePseudoIdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.strip_prefix(PREFIX)
            .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
            .and_then(|d| d.parse().ok())
            .map(PseudoId)
            .ok_or_else(|| ParsePseudoIdError(s.to_owned()))
    }
}

impl Serialize for PseudoId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PseudoId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Scope of the pseudo-identifier numbering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Setting {
    /// Global scope.
    A,
    /// Per-instance scope.
    B,
}

impl FromStr for Setting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" | "a" => Ok(Setting::A),
            "B" | "b" => Ok(Setting::B),
            other => Err(format!("unknown setting `{other}` (expected A or B)")),
        }
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub pseudo_id: PseudoId,
    /// Distinct surface forms in order of first occurrence in the abstract.
    pub names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClozeInstance {
    pub instance_id: String,
    pub pmid: String,
    pub setting: Setting,
    pub passage: String,
    pub question: String,
    /// Sorted by pseudo-id number.
    pub candidates: Vec<Candidate>,
    pub answer_pseudo_id: PseudoId,
    pub answer_identifier: String,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InvariantViolation {
    #[error("answer {0} is not a candidate")]
    AnswerNotCandidate(PseudoId),
    #[error("{0} candidates, expected between {MIN_CANDIDATES} and {MAX_CANDIDATES}")]
    CandidateCount(usize),
    #[error("token {0} is not a candidate")]
    UnknownToken(PseudoId),
    #[error("question has {0} placeholders, expected exactly one")]
    PlaceholderCount(usize),
    #[error("answer {0} is the unique most frequent passage entity")]
    AnswerUniqueMostFrequent(PseudoId),
}

/// Whitespace-delimited `@entityN` tokens of `text`, in order.
pub fn pseudo_tokens(text: &str) -> impl Iterator<Item = PseudoId> + '_ {
    text.split_whitespace().filter_map(|t| t.parse().ok())
}

/// Rewrites every whitespace-delimited `@entityN` token through `f`,
/// leaving all other characters untouched.
pub fn rewrite_pseudo_tokens(text: &str, mut f: impl FnMut(PseudoId) -> String) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while !rest.is_empty() {
        let ws_end = rest.find(|c: char| !c.is_whitespace()).unwrap_or(rest.len());
        out.push_str(&rest[..ws_end]);
        rest = &rest[ws_end..];
        let tok_end = rest.find(char::is_whitespace).unwrap_or(rest.len());
        let tok = &rest[..tok_end];
        match tok.parse::<PseudoId>() {
            Ok(id) => out.push_str(&f(id)),
            Err(_) => out.push_str(tok),
        }
        rest = &rest[tok_end..];
    }
    out
}

impl ClozeInstance {
    pub fn candidate(&self, id: PseudoId) -> Option<&Candidate> {
        self.candidates.iter().find(|c| c.pseudo_id == id)
    }

    pub fn passage_tokens(&self) -> Vec<&str> {
        self.passage.split_whitespace().collect()
    }

    pub fn question_tokens(&self) -> Vec<&str> {
        self.question.split_whitespace().collect()
    }

    /// Occurrence count of each pseudo-id token in the passage.
    pub fn passage_frequencies(&self) -> BTreeMap<PseudoId, usize> {
        let mut freq = BTreeMap::new();
        for id in pseudo_tokens(&self.passage) {
            *freq.entry(id).or_insert(0) += 1;
        }
        freq
    }

    pub fn check_invariants(&self) -> Result<(), InvariantViolation> {
        use InvariantViolation::*;
        if self.candidate(self.answer_pseudo_id).is_none() {
            return Err(AnswerNotCandidate(self.answer_pseudo_id));
        }
        let n = self.candidates.len();
        if !(MIN_CANDIDATES..=MAX_CANDIDATES).contains(&n) {
            return Err(CandidateCount(n));
        }
        for id in pseudo_tokens(&self.passage).chain(pseudo_tokens(&self.question)) {
            if self.candidate(id).is_none() {
                return Err(UnknownToken(id));
            }
        }
        let placeholders = self.question_tokens().iter().filter(|t| **t == PLACEHOLDER).count();
        if placeholders != 1 {
            return Err(PlaceholderCount(placeholders));
        }
        let freq = self.passage_frequencies();
        let answer = freq.get(&self.answer_pseudo_id).copied().unwrap_or(0);
        if freq.iter().all(|(id, &c)| *id == self.answer_pseudo_id || c < answer) {
            return Err(AnswerUniqueMostFrequent(self.answer_pseudo_id));
        }
        Ok(())
    }

    /// Renumbers pseudo-ids by first occurrence in the passage, then the
    /// question, and reports the result as a per-instance ([`Setting::B`])
    /// instance. Two renderings of the same article under different scopes
    /// have equal canonical forms.
    pub fn canonicalized(&self) -> ClozeInstance {
        let mut map: HashMap<PseudoId, PseudoId> = HashMap::new();
        for id in pseudo_tokens(&self.passage).chain(pseudo_tokens(&self.question)) {
            let next = PseudoId(map.len() as u32);
            map.entry(id).or_insert(next);
        }
        for c in &self.candidates {
            let next = PseudoId(map.len() as u32);
            map.entry(c.pseudo_id).or_insert(next);
        }
        let rename = |id: PseudoId| map[&id].to_string();
        let mut candidates: Vec<Candidate> = self
            .candidates
            .iter()
            .map(|c| Candidate { pseudo_id: map[&c.pseudo_id], names: c.names.clone() })
            .collect();
        candidates.sort_by_key(|c| c.pseudo_id);
        ClozeInstance {
            instance_id: self.instance_id.clone(),
            pmid: self.pmid.clone(),
            setting: Setting::B,
            passage: rewrite_pseudo_tokens(&self.passage, rename),
            question: rewrite_pseudo_tokens(&self.question, rename),
            candidates,
            answer_pseudo_id: map[&self.answer_pseudo_id],
            answer_identifier: self.answer_identifier.clone(),
        }
    }

    /// Replaces each pseudo-id token with one of its recorded names, as
    /// shown to human readers who are allowed to see entity names.
    pub fn restore_names<'a>(&'a self, mut pick: impl FnMut(&'a Candidate) -> &'a str) -> (String, String) {
        let mut resolve = |id: PseudoId| match self.candidate(id) {
            Some(c) => pick(c).to_owned(),
            None => id.to_string(),
        };
        let passage = rewrite_pseudo_tokens(&self.passage, &mut resolve);
        let question = rewrite_pseudo_tokens(&self.question, &mut resolve);
        (passage, question)
    }
}

/// Identifier → pseudo number table of a globally scoped dataset.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GlobalVocab(pub BTreeMap<String, u32>);

impl GlobalVocab {
    pub fn get(&self, id: &str) -> Option<PseudoId> {
        self.0.get(id).copied().map(PseudoId)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn assign(&mut self, id: &str) {
        let next = self.0.len() as u32;
        self.0.entry(id.to_owned()).or_insert(next);
    }
}

/// The identifier → number mapping in force for one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PseudoIdScope {
    GlobalA(GlobalVocab),
    LocalB(HashMap<String, u32>),
}

impl PseudoIdScope {
    pub fn lookup(&self, id: &str) -> Option<PseudoId> {
        match self {
            PseudoIdScope::GlobalA(v) => v.get(id),
            PseudoIdScope::LocalB(m) => m.get(id).copied().map(PseudoId),
        }
    }

    /// Per-instance numbering by first occurrence in the abstract.
    pub fn local(instance: &PreInstance) -> Self {
        let mut map = HashMap::new();
        for e in &instance.abstract_entities {
            let next = map.len() as u32;
            map.entry(e.identifier.clone()).or_insert(next);
        }
        PseudoIdScope::LocalB(map)
    }
}

/// Key for ascending pmid order: numeric pmids compare numerically and sort
/// before non-numeric ones, which compare as strings.
pub fn pmid_key(pmid: &str) -> (u8, u64, &str) {
    match pmid.parse::<u64>() {
        Ok(n) => (0, n, pmid),
        Err(_) => (1, 0, pmid),
    }
}

/// Builds the dataset-wide table over instances in ascending pmid order.
pub fn build_global_vocab(instances: &[PreInstance]) -> GlobalVocab {
    let mut order: Vec<&PreInstance> = instances.iter().collect();
    order.sort_by(|a, b| pmid_key(&a.pmid).cmp(&pmid_key(&b.pmid)));
    let mut vocab = GlobalVocab::default();
    for inst in order {
        for e in &inst.abstract_entities {
            vocab.assign(&e.identifier);
        }
    }
    vocab
}

/// Renders every instance under `setting`. The output is sorted by
/// ascending pmid; for [`Setting::A`] the global table is returned too.
pub fn assign_pseudo_ids(mut instances: Vec<PreInstance>, setting: Setting) -> (Vec<ClozeInstance>, Option<GlobalVocab>) {
    instances.sort_by(|a, b| pmid_key(&a.pmid).cmp(&pmid_key(&b.pmid)));
    match setting {
        Setting::A => {
            let vocab = build_global_vocab(&instances);
            let scope = PseudoIdScope::GlobalA(vocab);
            let out = instances.par_iter().map(|p| render(p, &scope, Setting::A)).collect();
            let PseudoIdScope::GlobalA(vocab) = scope else { unreachable!() };
            (out, Some(vocab))
        }
        Setting::B => {
            let out = instances
                .par_iter()
                .map(|p| render(p, &PseudoIdScope::local(p), Setting::B))
                .collect();
            (out, None)
        }
    }
}

/// Renders one instance under an explicit scope. Every abstract identifier
/// must be resolvable through `scope`.
pub fn render(pre: &PreInstance, scope: &PseudoIdScope, setting: Setting) -> ClozeInstance {
    let offset = pre.abstract_offset();
    let resolve = |id: &str| {
        scope
            .lookup(id)
            .unwrap_or_else(|| panic!("identifier {id} of pmid {} missing from scope", pre.pmid))
    };

    let passage_spans: Vec<(usize, usize, String)> = pre
        .abstract_entities
        .iter()
        .map(|e| (e.start - offset, e.end - offset, resolve(&e.identifier).to_string()))
        .collect();
    let passage = replace_spans(&pre.abstract_text, &passage_spans);

    let masked = pre
        .title_entities
        .iter()
        .filter(|e| e.identifier == pre.masked_entity_id)
        .min_by_key(|e| e.start)
        .expect("masked identifier occurs in the title");
    let title_spans: Vec<(usize, usize, String)> = pre
        .title_entities
        .iter()
        .filter_map(|e| {
            let token = if std::ptr::eq(e, masked) {
                PLACEHOLDER.to_owned()
            } else {
                // title-only entities keep their surface text
                scope
                    .lookup(&e.identifier)
                    .filter(|_| pre.id_frequencies.contains_key(&e.identifier))?
                    .to_string()
            };
            Some((e.start, e.end, token))
        })
        .collect();
    let question = replace_spans(&pre.title, &title_spans);

    let mut by_id: BTreeMap<PseudoId, (String, Vec<String>)> = BTreeMap::new();
    for e in &pre.abstract_entities {
        let entry = by_id
            .entry(resolve(&e.identifier))
            .or_insert_with(|| (e.identifier.clone(), Vec::new()));
        if !entry.1.contains(&e.mention) {
            entry.1.push(e.mention.clone());
        }
    }
    let candidates = by_id
        .into_iter()
        .map(|(pseudo_id, (_, names))| Candidate { pseudo_id, names })
        .collect();

    ClozeInstance {
        instance_id: pre.pmid.clone(),
        pmid: pre.pmid.clone(),
        setting,
        passage,
        question,
        candidates,
        answer_pseudo_id: resolve(&pre.masked_entity_id),
        answer_identifier: pre.masked_entity_id.clone(),
    }
}

/// Replaces character spans `[start, end)` (sorted, non-overlapping) with
/// tokens, inserting a space wherever a token would otherwise touch a
/// non-whitespace neighbour.
fn replace_spans(text: &str, spans: &[(usize, usize, String)]) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len() + spans.len() * 4);
    let mut pos = 0;
    for (start, end, token) in spans {
        out.extend(&chars[pos..*start]);
        if out.chars().next_back().is_some_and(|c| !c.is_whitespace()) {
            out.push(' ');
        }
        out.push_str(token);
        if chars.get(*end).is_some_and(|c| !c.is_whitespace()) {
            out.push(' ');
        }
        pos = *end;
    }
    out.extend(&chars[pos..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::{apply_filters, FilterConfig, Verdict};
    use crate::synthetic::{self, metastases_article, ArticleBuilder, METASTASES_PASSAGE, METASTASES_QUESTION};

    fn accept(article: &crate::pubtator::RawArticle) -> PreInstance {
        match apply_filters(article, &FilterConfig::default()) {
            Verdict::Accept(p) => p,
            Verdict::Reject { reason, .. } => panic!("rejected: {reason}"),
        }
    }

    /// Minimal accepted instance: abstract mentions in `order`, title mentions `title_id`.
    fn pre(pmid: &str, title_id: &str, order: &[(&str, &str)]) -> PreInstance {
        let mut b = ArticleBuilder::new(pmid);
        b.title_text("Role of ").title_entity("thing", "Disease", title_id).title_text(" in disease .");
        for (i, (name, id)) in order.iter().enumerate() {
            b.abstract_text(&format!("Sentence {i} mentions ")).abstract_entity(name, "Disease", id);
            b.abstract_text(" . ");
        }
        let art = b.build();
        let abstract_entities = art.abstract_annotations().cloned().collect::<Vec<_>>();
        PreInstance {
            pmid: art.pmid.clone(),
            title: art.title.clone(),
            abstract_text: art.abstract_text.clone(),
            id_frequencies: crate::filter::mention_frequencies(&abstract_entities),
            abstract_entities,
            title_entities: art.title_annotations().cloned().collect(),
            masked_entity_id: title_id.to_owned(),
        }
    }

    #[test]
    fn pseudo_id_text_form() {
        assert_eq!(PseudoId(12).to_string(), "@entity12");
        assert_eq!("@entity7".parse(), Ok(PseudoId(7)));
        assert!("@entity".parse::<PseudoId>().is_err());
        assert!("@entity1x".parse::<PseudoId>().is_err());
        assert!("@entity+1".parse::<PseudoId>().is_err());
        assert_eq!(serde_json::to_string(&PseudoId(3)).unwrap(), "\"@entity3\"");
    }

    #[test]
    fn metastases_rendering_setting_b() {
        let p = accept(&metastases_article());
        let (out, vocab) = assign_pseudo_ids(vec![p], Setting::B);
        assert!(vocab.is_none());
        let inst = &out[0];
        assert_eq!(inst.passage, METASTASES_PASSAGE);
        assert_eq!(inst.question, METASTASES_QUESTION);
        assert_eq!(inst.answer_pseudo_id, PseudoId(0));
        assert_eq!(inst.answer_identifier, synthetic::CANCER);
        let names: Vec<Vec<&str>> = inst
            .candidates
            .iter()
            .map(|c| c.names.iter().map(String::as_str).collect())
            .collect();
        assert_eq!(
            names,
            vec![
                vec!["breast and lung cancer"],
                vec!["patients"],
                vec!["lung cancer"],
                vec!["metastasis"],
                vec!["edema", "edematous"],
                vec!["primary tumor"],
            ]
        );
        inst.check_invariants().unwrap();
    }

    #[test]
    fn local_numbering_follows_first_occurrence() {
        let p = pre("5", "X", &[("x", "X"), ("y", "Y"), ("x", "X"), ("z", "Z")]);
        let (out, _) = assign_pseudo_ids(vec![p], Setting::B);
        let toks: Vec<String> = pseudo_tokens(&out[0].passage).map(|t| t.to_string()).collect();
        assert_eq!(toks, ["@entity0", "@entity1", "@entity0", "@entity2"]);
    }

    #[test]
    fn global_numbering_is_shared() {
        let a = pre("20", "X", &[("y", "Y"), ("x", "X"), ("w", "W")]);
        let b = pre("3", "Q", &[("q", "Q"), ("x", "X")]);
        let (out, vocab) = assign_pseudo_ids(vec![a, b], Setting::A);
        let vocab = vocab.unwrap();
        // pmid 3 sorts before pmid 20
        assert_eq!(out[0].pmid, "3");
        assert_eq!(vocab.get("Q"), Some(PseudoId(0)));
        assert_eq!(vocab.get("X"), Some(PseudoId(1)));
        assert_eq!(vocab.get("Y"), Some(PseudoId(2)));
        assert!(out[0].passage.contains("@entity1"));
        assert!(out[1].passage.contains("@entity1"));
        assert_eq!(out[1].answer_pseudo_id, PseudoId(1));
        for inst in &out {
            assert!(inst.candidates.windows(2).all(|w| w[0].pseudo_id < w[1].pseudo_id));
        }
    }

    #[test]
    fn synonyms_share_one_pseudo_id() {
        let p = pre("9", "E", &[("edematous", "E"), ("edema", "E"), ("other", "O"), ("other", "O")]);
        let (out, _) = assign_pseudo_ids(vec![p], Setting::B);
        let c = out[0].candidate(PseudoId(0)).unwrap();
        assert_eq!(c.names, vec!["edematous", "edema"]);
        assert_eq!(out[0].candidates.len(), 2);
    }

    #[test]
    fn settings_agree_after_canonical_renaming() {
        let a = pre("1", "X", &[("y", "Y"), ("x", "X"), ("w", "W")]);
        let b = pre("2", "W", &[("w", "W"), ("y", "Y"), ("v", "V")]);
        let (ga, _) = assign_pseudo_ids(vec![a.clone(), b.clone()], Setting::A);
        let (lb, _) = assign_pseudo_ids(vec![a, b], Setting::B);
        for (x, y) in ga.iter().zip(&lb) {
            assert_eq!(x.canonicalized(), y.canonicalized());
            assert_eq!(y.canonicalized(), *y);
        }
    }

    #[test]
    fn padding_around_glued_mentions() {
        assert_eq!(replace_spans("(IHD) was", &[(1, 4, "@entity3".into())]), "( @entity3 ) was");
        assert_eq!(replace_spans("a IHD b", &[(2, 5, "@entity3".into())]), "a @entity3 b");
    }

    #[test]
    fn title_only_entities_keep_their_text() {
        let mut p = pre("4", "X", &[("x", "X"), ("y", "Y")]);
        let mut b = ArticleBuilder::new("4");
        b.title_text("Role of ")
            .title_entity("thing", "Disease", "X")
            .title_text(" and ")
            .title_entity("rats", "Species", "R")
            .title_text(" and ")
            .title_entity("why", "Disease", "Y")
            .title_text(" .");
        let art = b.build();
        let shift = art.title.chars().count() as isize - p.title.chars().count() as isize;
        p.title = art.title.clone();
        p.title_entities = art.title_annotations().cloned().collect();
        for e in &mut p.abstract_entities {
            e.start = (e.start as isize + shift) as usize;
            e.end = (e.end as isize + shift) as usize;
        }
        let (out, _) = assign_pseudo_ids(vec![p], Setting::B);
        assert_eq!(out[0].question, "Role of XXXX and rats and @entity1 .");
        out[0].check_invariants().unwrap();
    }

    #[test]
    fn name_restoration_leaves_no_tokens() {
        let p = accept(&metastases_article());
        let (out, _) = assign_pseudo_ids(vec![p], Setting::B);
        let (passage, question) = out[0].restore_names(|c| c.names.last().unwrap());
        assert_eq!(pseudo_tokens(&passage).count(), 0);
        assert_eq!(question, METASTASES_QUESTION);
        assert!(passage.starts_with("BACKGROUND: Most brain metastases arise from breast and lung cancer ."));
    }

    #[test]
    fn invariant_violations_detected() {
        let p = accept(&metastases_article());
        let (out, _) = assign_pseudo_ids(vec![p], Setting::B);
        let good = out[0].clone();

        let mut bad = good.clone();
        bad.answer_pseudo_id = PseudoId(40);
        assert_eq!(bad.check_invariants(), Err(InvariantViolation::AnswerNotCandidate(PseudoId(40))));

        let mut bad = good.clone();
        bad.question = "XXXX and XXXX".into();
        assert_eq!(bad.check_invariants(), Err(InvariantViolation::PlaceholderCount(2)));

        let mut bad = good.clone();
        bad.passage.push_str(" @entity9");
        assert_eq!(bad.check_invariants(), Err(InvariantViolation::UnknownToken(PseudoId(9))));

        let mut bad = good.clone();
        bad.answer_pseudo_id = PseudoId(1);
        assert_eq!(
            bad.check_invariants(),
            Err(InvariantViolation::AnswerUniqueMostFrequent(PseudoId(1)))
        );

        let mut bad = good;
        bad.candidates.truncate(1);
        bad.passage = "@entity0 .".into();
        assert_eq!(bad.check_invariants(), Err(InvariantViolation::CandidateCount(1)));
    }

    #[test]
    fn rewrite_keeps_whitespace() {
        let s = rewrite_pseudo_tokens("  @entity1\tx @entity10\n", |id| format!("<{}>", id.0));
        assert_eq!(s, "  <1>\tx <10>\n");
    }
}
