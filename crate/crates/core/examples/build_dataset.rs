//! Builds a dataset from a seeded synthetic PubTator corpus in both
//! numbering settings, prints the rejection ledger and draws a split.
//!
//! ```bash
//! cargo run --release --example build_dataset -- 10000
//! ```

use std::error::Error;

use cloze_mrc::filter::FilterConfig;
use cloze_mrc::pipeline::build_dataset;
use cloze_mrc::pseudonym::{split_dataset, Setting, SplitSpec};
use cloze_mrc::synthetic::{generate_corpus, SyntheticConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let articles = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(2000);
    run(articles)
}

fn run(articles: usize) -> Result<(), Box<dyn Error>> {
    let corpus = generate_corpus(&SyntheticConfig { articles, seed: 1, ..Default::default() });
    let cfg = FilterConfig::default();

    let (a, filtered) = build_dataset(&corpus, &cfg, Setting::A);
    let (b, _) = build_dataset(&corpus, &cfg, Setting::B);
    println!("{} articles, {} accepted", a.ledger.total(), a.ledger.accepted);
    for (reason, n) in &a.ledger.rejected {
        println!("  {reason:<28} {n}");
    }
    println!("global vocabulary: {} identifiers", a.vocab.as_ref().map_or(0, |v| v.len()));

    let (x, y) = (&a.instances[0], &b.instances[0]);
    println!("\nsetting A: {}\nsetting B: {}", x.question, y.question);
    assert_eq!(x.canonicalized(), y.canonicalized());

    let n = b.instances.len();
    let spec = SplitSpec { train: n * 8 / 10, dev: n / 10, test: n / 10, seed: 7 };
    let splits = split_dataset(b.instances, &spec)?;
    println!(
        "\nsplit {}/{}/{} with {} held out",
        splits.train.len(),
        splits.dev.len(),
        splits.test.len(),
        splits.holdout.len()
    );

    let mut csv = Vec::new();
    filtered.write_ledger_csv(&mut csv)?;
    println!("\nledger head:\n{}", String::from_utf8(csv)?.lines().take(4).collect::<Vec<_>>().join("\n"));
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
