//! Parses a small PubTator corpus, printing articles and annotation issues,
//! then writes the articles back out.
//!
//! ```bash
//! cargo run --example parse_pubtator
//! ```

use std::error::Error;

use cloze_mrc::pubtator::{parse_str, to_pubtator_string, Record, Separator};

const CORPUS: &str = "\
123|t|Aspirin reduces fever in children
123|a|Aspirin was given to febrile children. Fever resolved within hours.
123\t0\t7\tAspirin\tChemical\tMESH:D001241
123\t16\t21\tfever\tDisease\tMESH:D005334
123\t25\t33\tchildren\tSpecies\t9606
123\t34\t41\tAspirin\tChemical\tMESH:D001241
123\t200\t207\tAspirin\tChemical\tMESH:D001241

124|t|Short
124|a|
";

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut articles = Vec::new();
    for rec in parse_str(CORPUS, Separator::Space) {
        match rec {
            Record::Article(a) => {
                println!(
                    "pmid {}: {} title / {} abstract annotations",
                    a.pmid,
                    a.title_annotations().count(),
                    a.abstract_annotations().count()
                );
                articles.push(a);
            }
            Record::Issue(i) => println!("issue in {}: {:?} ({})", i.pmid, i.kind, i.detail),
        }
    }
    assert_eq!(articles.len(), 2);

    let text: String = articles.iter().map(to_pubtator_string).collect();
    let again: Vec<_> = parse_str(&text, Separator::Space).into_iter().filter_map(Record::into_article).collect();
    assert_eq!(again, articles);
    print!("{text}");
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
