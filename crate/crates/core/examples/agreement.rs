//! Inter-annotator agreement with Cohen's kappa.
//!
//! ```bash
//! cargo run --example agreement
//! ```

use std::error::Error;

use cloze_mrc::eval::{aligned_labels, cohens_kappa, format_percent, mean_pairwise_kappa, PredictionSet};
use cloze_mrc::pseudonym::PseudoId;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let k = cohens_kappa(&["A", "A", "B", "B"], &["A", "B", "B", "B"])?;
    println!("two annotators, four items: kappa = {k}");

    // annotators answering cloze questions; `None` is an abstention
    let ann = |picks: &[Option<u32>]| -> PredictionSet {
        picks
            .iter()
            .enumerate()
            .map(|(i, p)| (format!("q{i}"), p.map(PseudoId)))
            .collect()
    };
    let a = ann(&[Some(0), Some(2), None, Some(1), Some(3), Some(0)]);
    let b = ann(&[Some(0), Some(2), Some(1), Some(1), Some(0), Some(0)]);
    let c = ann(&[Some(0), Some(1), None, Some(1), Some(3), Some(2)]);

    let (la, lb) = aligned_labels(&a, &b)?;
    let (_, lc) = aligned_labels(&a, &c)?;
    println!("a vs b: {}%", format_percent(cohens_kappa(&la, &lb)?));
    println!("mean pairwise over three: {:.4}", mean_pairwise_kappa(&[la, lb, lc])?);
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
