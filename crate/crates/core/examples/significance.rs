//! Paired approximate randomization test between two baselines.
//!
//! ```bash
//! cargo run --release --example significance
//! ```

use std::error::Error;

use cloze_mrc::baselines::{run_baseline, BaselineConfig, Method};
use cloze_mrc::eval::{approx_randomization, paired_significance, PredictionSet};
use cloze_mrc::filter::FilterConfig;
use cloze_mrc::pipeline::build_dataset;
use cloze_mrc::pseudonym::Setting;
use cloze_mrc::synthetic::{generate_corpus, SyntheticConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let corpus = generate_corpus(&SyntheticConfig { articles: 2000, seed: 4, ..Default::default() });
    let (built, _) = build_dataset(&corpus, &FilterConfig::default(), Setting::B);
    let cfg = BaselineConfig::default();
    let preds = |m| PredictionSet::from(run_baseline(&built.instances, m, &cfg).as_slice());

    let r = paired_significance(&built.instances, &preds(Method::Base4), &preds(Method::Base1), 2000, 13)?;
    println!("base4 vs base1: diff {} correct, p = {:.4}", r.observed_diff, r.p_value);

    let same = paired_significance(&built.instances, &preds(Method::Base2), &preds(Method::Base2), 2000, 13)?;
    println!("base2 vs base2: p = {}", same.p_value);
    assert_eq!(same.p_value, 1.0);

    // 90 of 100 right versus 10 of 100, never right on the same item
    let a: Vec<bool> = (0..100).map(|i| i < 90).collect();
    let b: Vec<bool> = a.iter().map(|x| !x).collect();
    let r = approx_randomization(&a, &b, 10_000, 13);
    println!("disjoint 90/10: p = {:.5}", r.p_value);
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
