//! Computes per-split statistics and prints them as a table.
//!
//! ```bash
//! cargo run --example dataset_stats
//! ```

use std::error::Error;

use cloze_mrc::filter::FilterConfig;
use cloze_mrc::pipeline::build_dataset;
use cloze_mrc::pseudonym::{split_dataset, Setting, SplitSpec};
use cloze_mrc::stats::{compute_stats, render_table};
use cloze_mrc::synthetic::{generate_corpus, SyntheticConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let corpus = generate_corpus(&SyntheticConfig { articles: 3000, seed: 2, ..Default::default() });
    let (built, _) = build_dataset(&corpus, &FilterConfig::default(), Setting::A);
    let n = built.instances.len();
    let all = compute_stats(&built.instances)?;
    let splits = split_dataset(built.instances, &SplitSpec { train: n / 2, dev: n / 4, test: n / 4, seed: 0 })?;

    let table = render_table(&[
        ("Train", compute_stats(&splits.train)?),
        ("Dev", compute_stats(&splits.dev)?),
        ("Test", compute_stats(&splits.test)?),
        ("All", all),
    ]);
    print!("{table}");
    println!("\n{}", serde_json::to_string_pretty(&all)?);
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
