//! Heuristic answerers that use only passage order, entity frequency, or
//! n-gram overlap with the question.
//!
//! | method      | answer                                                        |
//! |-------------|---------------------------------------------------------------|
//! | `base1`     | first entity occurrence in the passage                        |
//! | `base2`     | last entity occurrence in the passage                         |
//! | `base3`     | most frequent passage entity, ties broken at random            |
//! | `base3plus` | random among tied top entities, else among second-most frequent|
//! | `base4`     | candidate whose n-gram contexts share most tokens with the question's placeholder contexts |

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::pseudonym::{ClozeInstance, PseudoId, PLACEHOLDER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaselineConfig {
    pub ngram_n: usize,
    pub seed: u64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self { ngram_n: 3, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Base1,
    Base2,
    Base3,
    Base3Plus,
    Base4,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Base1, Method::Base2, Method::Base3, Method::Base3Plus, Method::Base4];

    pub fn label(self) -> &'static str {
        match self {
            Method::Base1 => "base1",
            Method::Base2 => "base2",
            Method::Base3 => "base3",
            Method::Base3Plus => "base3plus",
            Method::Base4 => "base4",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.label() == s.to_ascii_lowercase().replace('+', "plus"))
            .ok_or_else(|| format!("unknown method `{s}` (expected base1|base2|base3|base3plus|base4)"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub instance_id: String,
    pub predicted_pseudo_id: PseudoId,
    pub method: String,
}

fn passage_ids(inst: &ClozeInstance) -> impl DoubleEndedIterator<Item = PseudoId> + '_ {
    inst.passage
        .split_whitespace()
        .filter_map(|t| t.parse::<PseudoId>().ok())
        .filter(|id| inst.candidate(*id).is_some())
}

fn fallback(inst: &ClozeInstance) -> PseudoId {
    inst.candidates.iter().map(|c| c.pseudo_id).min().expect("instance has candidates")
}

pub fn base1(inst: &ClozeInstance) -> PseudoId {
    passage_ids(inst).next().unwrap_or_else(|| fallback(inst))
}

pub fn base2(inst: &ClozeInstance) -> PseudoId {
    passage_ids(inst).next_back().unwrap_or_else(|| fallback(inst))
}

/// Candidates grouped by passage frequency, most frequent group first.
/// Each group is sorted by pseudo-id.
fn frequency_tiers(inst: &ClozeInstance) -> Vec<Vec<PseudoId>> {
    let mut freq: BTreeMap<PseudoId, usize> = BTreeMap::new();
    for id in passage_ids(inst) {
        *freq.entry(id).or_insert(0) += 1;
    }
    let mut tiers: BTreeMap<std::cmp::Reverse<usize>, Vec<PseudoId>> = BTreeMap::new();
    for (id, n) in freq {
        tiers.entry(std::cmp::Reverse(n)).or_default().push(id);
    }
    tiers.into_values().collect()
}

pub fn base3(inst: &ClozeInstance, rng: &mut impl Rng) -> PseudoId {
    match frequency_tiers(inst).first() {
        Some(top) => *top.choose(rng).unwrap(),
        None => fallback(inst),
    }
}

pub fn base3_plus(inst: &ClozeInstance, rng: &mut impl Rng) -> PseudoId {
    let tiers = frequency_tiers(inst);
    match tiers.as_slice() {
        [] => fallback(inst),
        [top, ..] if top.len() >= 2 => *top.choose(rng).unwrap(),
        [_, second, ..] => *second.choose(rng).unwrap(),
        [only] => only[0],
    }
}

/// Union of the tokens of every length-`n` window of `tokens` that covers
/// position `i`. Empty when the sequence is shorter than `n`.
fn window_span(len: usize, i: usize, n: usize) -> Option<std::ops::Range<usize>> {
    if n == 0 || len < n {
        return None;
    }
    let first_start = (i + 1).saturating_sub(n);
    let last_start = i.min(len - n);
    Some(first_start..last_start + n)
}

/// n-gram overlap scores per candidate, in candidate order.
pub fn base4_scores(inst: &ClozeInstance, n: usize) -> Vec<(PseudoId, usize)> {
    let passage = inst.passage_tokens();
    let question = inst.question_tokens();

    let mut q_types: HashSet<&str> = HashSet::new();
    for (i, t) in question.iter().enumerate() {
        if *t == PLACEHOLDER {
            if let Some(r) = window_span(question.len(), i, n) {
                q_types.extend(question[r].iter().filter(|t| **t != PLACEHOLDER));
            }
        }
    }

    let mut contexts: BTreeMap<PseudoId, HashSet<&str>> =
        inst.candidates.iter().map(|c| (c.pseudo_id, HashSet::new())).collect();
    for (i, t) in passage.iter().enumerate() {
        let Ok(id) = t.parse::<PseudoId>() else { continue };
        let Some(ctx) = contexts.get_mut(&id) else { continue };
        if let Some(r) = window_span(passage.len(), i, n) {
            ctx.extend(passage[r].iter().filter(|t| t.parse::<PseudoId>().is_err()));
        }
    }

    contexts
        .into_iter()
        .map(|(id, ctx)| (id, ctx.intersection(&q_types).count()))
        .collect()
}

/// Highest overlap score; ties go to the lowest pseudo-id.
pub fn base4(inst: &ClozeInstance, n: usize) -> PseudoId {
    let mut best: Option<(PseudoId, usize)> = None;
    for (id, score) in base4_scores(inst, n) {
        if best.is_none_or(|(_, s)| score > s) {
            best = Some((id, score));
        }
    }
    best.map(|(id, _)| id).unwrap_or_else(|| fallback(inst))
}

/// RNG for the instance at `index`: one ChaCha stream per instance, so the
/// outcome does not depend on evaluation order or thread count.
pub fn instance_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

pub fn answer(inst: &ClozeInstance, index: usize, method: Method, cfg: &BaselineConfig) -> PseudoId {
    match method {
        Method::Base1 => base1(inst),
        Method::Base2 => base2(inst),
        Method::Base3 => base3(inst, &mut instance_rng(cfg.seed, index)),
        Method::Base3Plus => base3_plus(inst, &mut instance_rng(cfg.seed, index)),
        Method::Base4 => base4(inst, cfg.ngram_n),
    }
}

/// Answers every instance, in input order.
pub fn run_baseline(instances: &[ClozeInstance], method: Method, cfg: &BaselineConfig) -> Vec<Prediction> {
    instances
        .par_iter()
        .enumerate()
        .map(|(i, inst)| Prediction {
            instance_id: inst.instance_id.clone(),
            predicted_pseudo_id: answer(inst, i, method, cfg),
            method: method.label().to_owned(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;

    use super::*;
    use crate::pseudonym::{Candidate, Setting};
    use crate::synthetic::{METASTASES_PASSAGE, METASTASES_QUESTION};

    fn inst(passage: &str, question: &str) -> ClozeInstance {
        let mut ids: Vec<PseudoId> = passage.split_whitespace().filter_map(|t| t.parse().ok()).collect();
        ids.sort();
        ids.dedup();
        ClozeInstance {
            instance_id: "x".into(),
            pmid: "x".into(),
            setting: Setting::B,
            passage: passage.into(),
            question: question.into(),
            answer_pseudo_id: ids[0],
            candidates: ids.into_iter().map(|pseudo_id| Candidate { pseudo_id, names: vec![] }).collect(),
            answer_identifier: String::new(),
        }
    }

    fn e(n: u32) -> PseudoId {
        PseudoId(n)
    }

    fn draws(i: &ClozeInstance, f: fn(&ClozeInstance, &mut ChaCha8Rng) -> PseudoId) -> HashMap<PseudoId, usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut seen = HashMap::new();
        for _ in 0..2000 {
            *seen.entry(f(i, &mut rng)).or_insert(0) += 1;
        }
        seen
    }

    #[test]
    fn first_and_last() {
        let i = inst("@entity0 a @entity1 b @entity0 c @entity2 .", "XXXX .");
        assert_eq!((base1(&i), base2(&i)), (e(0), e(2)));
        let i = inst("@entity1 x @entity1 y @entity2", "XXXX");
        assert_eq!((base1(&i), base2(&i)), (e(1), e(2)));
        let i = inst(METASTASES_PASSAGE, METASTASES_QUESTION);
        assert_eq!((base1(&i), base2(&i)), (e(0), e(0)));
    }

    #[test]
    fn frequency_baselines_unique_top() {
        // a:2, b:1, c:1
        let i = inst("@entity0 @entity0 @entity1 @entity2", "XXXX");
        let top = draws(&i, base3);
        assert_eq!(top.keys().copied().collect::<Vec<_>>(), vec![e(0)]);
        let second = draws(&i, base3_plus);
        assert_eq!(second.len(), 2);
        assert!(second[&e(1)] > 800 && second[&e(2)] > 800, "{second:?}");
    }

    #[test]
    fn frequency_baselines_tied_top() {
        // a:2, b:2, c:1
        let i = inst("@entity0 @entity0 @entity1 @entity1 @entity2", "XXXX");
        let fs: [fn(&ClozeInstance, &mut ChaCha8Rng) -> PseudoId; 2] = [|i, r| base3(i, r), |i, r| base3_plus(i, r)];
        for f in fs {
            let d = draws(&i, f);
            assert_eq!(d.len(), 2);
            assert!(!d.contains_key(&e(2)));
            assert!(d[&e(0)] > 800 && d[&e(1)] > 800);
        }
        // a:1, b:1
        let i = inst("@entity0 @entity1", "XXXX");
        assert_eq!(draws(&i, base3_plus).len(), 2);
    }

    #[test]
    fn ngram_overlap_example() {
        let i = inst("@entity0 inhibits @entity1 in mice . @entity1 causes disease .", "XXXX causes disease .");
        let scores: Vec<_> = base4_scores(&i, 3);
        assert_eq!(scores, vec![(e(0), 0), (e(1), 2)]);
        assert_eq!(base4(&i, 3), e(1));
    }

    #[test]
    fn ngram_ties_and_degenerate_n() {
        let i = inst("@entity3 alpha @entity1 beta", "XXXX gamma delta");
        assert_eq!(base4(&i, 3), e(1));
        let i = inst("@entity0 inhibits @entity1 in mice . @entity1 causes disease .", "XXXX causes disease .");
        assert!(base4_scores(&i, 1).iter().all(|(_, s)| *s == 0));
        assert_eq!(base4(&i, 1), e(0));
        // sequence shorter than n has no n-grams
        let i = inst("@entity0 a @entity1", "XXXX a");
        assert!(base4_scores(&i, 5).iter().all(|(_, s)| *s == 0));
    }

    #[test]
    fn window_spans() {
        assert_eq!(window_span(10, 0, 3), Some(0..3));
        assert_eq!(window_span(10, 5, 3), Some(3..8));
        assert_eq!(window_span(10, 9, 3), Some(7..10));
        assert_eq!(window_span(2, 0, 3), None);
        assert_eq!(window_span(3, 1, 3), Some(0..3));
    }

    #[test]
    fn method_names() {
        for m in Method::ALL {
            assert_eq!(m.label().parse::<Method>(), Ok(m));
        }
        assert_eq!("BASE3+".parse::<Method>(), Ok(Method::Base3Plus));
        assert!("base5".parse::<Method>().is_err());
    }

    #[test]
    fn seeded_runs_are_reproducible() {
        let xs = vec![
            inst("@entity0 @entity1 @entity2 @entity1 @entity0", "XXXX"),
            inst("@entity0 @entity1", "XXXX"),
        ];
        let cfg = BaselineConfig { ngram_n: 3, seed: 7 };
        let a = run_baseline(&xs, Method::Base3Plus, &cfg);
        let b = run_baseline(&xs, Method::Base3Plus, &cfg);
        assert_eq!(a, b);
        assert_eq!(a[0].method, "base3plus");
    }
}
