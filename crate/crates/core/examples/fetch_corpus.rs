//! Downloads corpus files listed in a manifest, verifying SHA-256 digests.
//! A `file://` URL stands in for the remote archive here.
//!
//! ```bash
//! cargo run --example fetch_corpus
//! ```

use std::error::Error;

use cloze_mrc::pubtator::{fetch_corpus, parse_manifest, sha256_file, FetchOptions, FetchStatus};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let remote = tempfile::tempdir()?;
    let src = remote.path().join("bioconcepts2pubtatorcentral.sample");
    std::fs::write(&src, "1|t|A title long enough\n1|a|Body.\n\n")?;
    let digest = sha256_file(&src)?;

    let manifest = format!("# url sha256\nfile://{} {digest}\n", src.display());
    let (urls, sums) = parse_manifest(&manifest);

    let dest = tempfile::tempdir()?;
    for round in 0..2 {
        for o in fetch_corpus(&urls, dest.path(), &sums, &FetchOptions::default())? {
            println!("round {round}: {} -> {}", o.path.display(), serde_json::to_string(&o.status)?);
            let expected = if round == 0 { FetchStatus::Downloaded } else { FetchStatus::Skipped };
            assert_eq!(o.status, expected);
        }
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
