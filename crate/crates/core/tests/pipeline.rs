use std::fs::File;
use std::io::Write;

use flate2::write::GzEncoder;
use flate2::Compression;

use cloze_mrc::filter::{FilterConfig, RejectReason};
use cloze_mrc::jsonl::{read_jsonl, write_jsonl};
use cloze_mrc::pipeline::{build_dataset, read_corpus};
use cloze_mrc::pseudonym::{pseudo_tokens, split_dataset, ClozeInstance, GlobalVocab, Setting, SplitSpec};
use cloze_mrc::pubtator::{to_pubtator_string, Separator};
use cloze_mrc::stats::compute_stats;
use cloze_mrc::synthetic::{generate_corpus, metastases_article, SyntheticConfig, METASTASES_PASSAGE};

fn synthetic(n: usize, seed: u64) -> Vec<cloze_mrc::pubtator::RawArticle> {
    generate_corpus(&SyntheticConfig { articles: n, seed, ..Default::default() })
}

#[test]
fn gzip_and_plain_files_give_the_same_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let arts = synthetic(400, 5);
    let text: String = arts.iter().map(to_pubtator_string).collect();

    let plain = dir.path().join("part1.txt");
    std::fs::write(&plain, &text).unwrap();
    let gz = dir.path().join("part2.gz");
    let mut enc = GzEncoder::new(File::create(&gz).unwrap(), Compression::fast());
    enc.write_all(text.as_bytes()).unwrap();
    enc.finish().unwrap();

    let a = read_corpus(&[&plain], Separator::Space).unwrap();
    let b = read_corpus(&[&gz], Separator::Space).unwrap();
    assert_eq!(a.articles, arts);
    assert_eq!(a.articles, b.articles);

    let (x, _) = build_dataset(&a.articles, &FilterConfig::default(), Setting::A);
    let (y, _) = build_dataset(&b.articles, &FilterConfig::default(), Setting::A);
    assert_eq!(x.instances, y.instances);
}

#[test]
fn instances_survive_jsonl() {
    let dir = tempfile::tempdir().unwrap();
    let (built, _) = build_dataset(&synthetic(500, 6), &FilterConfig::default(), Setting::A);
    let p = dir.path().join("all.jsonl");
    write_jsonl(&p, &built.instances).unwrap();
    let back: Vec<ClozeInstance> = read_jsonl(&p).unwrap();
    assert_eq!(back, built.instances);

    let vocab = built.vocab.unwrap();
    let json = serde_json::to_string(&vocab).unwrap();
    let again: GlobalVocab = serde_json::from_str(&json).unwrap();
    assert_eq!(again, vocab);
}

#[test]
fn global_numbering_is_consistent_across_instances() {
    let (built, _) = build_dataset(&synthetic(800, 7), &FilterConfig::default(), Setting::A);
    let vocab = built.vocab.unwrap();
    for inst in &built.instances {
        assert_eq!(vocab.get(&inst.answer_identifier), Some(inst.answer_pseudo_id));
    }
    // a pseudo-id never stands for two identifiers
    let mut seen = std::collections::HashMap::new();
    for inst in &built.instances {
        if let Some(prev) = seen.insert(inst.answer_pseudo_id, inst.answer_identifier.clone()) {
            assert_eq!(prev, inst.answer_identifier);
        }
    }
}

#[test]
fn filtering_is_deterministic_and_ledger_counts_every_article() {
    let arts = synthetic(1000, 8);
    let cfg = FilterConfig::default();
    let (a, fa) = build_dataset(&arts, &cfg, Setting::B);
    let (b, fb) = build_dataset(&arts, &cfg, Setting::B);
    assert_eq!(a.instances, b.instances);
    assert_eq!(fa.rejected, fb.rejected);
    assert_eq!(a.ledger.total(), arts.len());
    assert!(fa.rejected.iter().all(|(_, r)| RejectReason::ALL.contains(r)));
}

#[test]
fn stricter_config_never_accepts_more() {
    let arts = synthetic(600, 9);
    let loose = FilterConfig::default();
    let strict = FilterConfig { min_abstract_sentences: 14, max_distinct_ids: 10, ..FilterConfig::default() };
    let (a, _) = build_dataset(&arts, &loose, Setting::B);
    let (b, _) = build_dataset(&arts, &strict, Setting::B);
    let accepted: std::collections::HashSet<_> = a.instances.iter().map(|i| &i.pmid).collect();
    assert!(b.instances.iter().all(|i| accepted.contains(&i.pmid)));
    assert!(b.instances.len() < a.instances.len());
}

#[test]
fn worked_example_end_to_end() {
    let (built, _) = build_dataset(&[metastases_article()], &FilterConfig::default(), Setting::B);
    let inst = &built.instances[0];
    assert_eq!(inst.passage, METASTASES_PASSAGE);
    assert_eq!(pseudo_tokens(&inst.passage).filter(|t| *t == inst.answer_pseudo_id).count(), 5);
    let stats = compute_stats(&built.instances).unwrap();
    assert_eq!(stats.candidates.max as usize, inst.candidates.len());
}

#[test]
fn split_of_built_dataset() {
    let (built, _) = build_dataset(&synthetic(1000, 10), &FilterConfig::default(), Setting::B);
    let n = built.instances.len();
    let spec = SplitSpec { train: n / 2, dev: n / 5, test: n / 5, seed: 42 };
    let s1 = split_dataset(built.instances.clone(), &spec).unwrap();
    let s2 = split_dataset(built.instances, &spec).unwrap();
    assert_eq!(s1, s2);
    let total = s1.train.len() + s1.dev.len() + s1.test.len() + s1.holdout.len();
    assert_eq!(total, n);
}
