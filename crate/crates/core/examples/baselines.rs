//! Runs every heuristic baseline on a synthetic test split and reports
//! accuracy, overall and by number of candidates.
//!
//! ```bash
//! cargo run --release --example baselines
//! ```

use std::error::Error;

use cloze_mrc::baselines::{base4_scores, run_baseline, BaselineConfig, Method};
use cloze_mrc::eval::{format_percent, score, PredictionSet};
use cloze_mrc::filter::FilterConfig;
use cloze_mrc::pipeline::build_dataset;
use cloze_mrc::pseudonym::Setting;
use cloze_mrc::synthetic::{generate_corpus, SyntheticConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let corpus = generate_corpus(&SyntheticConfig { articles: 2000, seed: 3, ..Default::default() });
    let (built, _) = build_dataset(&corpus, &FilterConfig::default(), Setting::B);
    let test = &built.instances;

    let cfg = BaselineConfig { ngram_n: 3, seed: 7 };
    for method in Method::ALL {
        let preds = run_baseline(test, method, &cfg);
        let report = score(test, &PredictionSet::from(preds.as_slice()))?;
        println!("{:<10} {:>6}%", method.label(), format_percent(report.accuracy));
    }

    let first = &test[0];
    println!("\nquestion: {}", first.question);
    for (id, overlap) in base4_scores(first, 3) {
        println!("  {id:<10} shares {overlap} token types");
    }

    let preds = run_baseline(test, Method::Base4, &cfg);
    let report = score(test, &PredictionSet::from(preds.as_slice()))?;
    print!("\n{}", report.render(true));
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
