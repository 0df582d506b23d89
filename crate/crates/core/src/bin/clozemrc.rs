use std::fs::{self, File};
use std::io::{self, BufWriter};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use cloze_mrc::baselines::{run_baseline, BaselineConfig, Method};
use cloze_mrc::eval::{self, aligned_labels, cohens_kappa, mean_pairwise_kappa, paired_significance, score, PredictionSet};
use cloze_mrc::filter::FilterConfig;
use cloze_mrc::jsonl::{read_jsonl, write_jsonl, write_jsonl_to};
use cloze_mrc::pipeline::{build_dataset, read_corpus};
use cloze_mrc::pseudonym::{split_dataset, ClozeInstance, Setting, SplitSpec};
use cloze_mrc::published;
use cloze_mrc::pubtator::{fetch_corpus, parse_manifest, FetchOptions, FetchStatus, Separator};
use cloze_mrc::stats::{compute_stats, render_table};

#[derive(Parser)]
#[command(name = "clozemrc", version, about = "Build and evaluate cloze reading-comprehension datasets")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate PubTator files and report annotation issues.
    Ingest {
        #[arg(long = "in")]
        input: String,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value = "space")]
        separator: Separator,
    },
    /// Download corpus files listed in a manifest (`url [sha256]` per line).
    Fetch {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        dest: PathBuf,
    },
    /// Build a dataset from PubTator files.
    Build {
        #[arg(long = "in")]
        input: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        ledger: Option<PathBuf>,
        #[arg(long, default_value = "A")]
        setting: Setting,
        /// `train,dev,test` sizes, or `large` / `lite`.
        #[arg(long)]
        split: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        keep_holdout: bool,
        #[arg(long, default_value = "space")]
        separator: Separator,
    },
    /// Dataset statistics.
    Stats {
        #[arg(long = "in", required = true, num_args = 1..)]
        input: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        /// Inputs use the external published record layout.
        #[arg(long)]
        published: bool,
    },
    /// Run a heuristic baseline.
    Baseline {
        #[arg(long)]
        method: Method,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        published: bool,
    },
    /// Score predictions against gold instances.
    Eval {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        preds: PathBuf,
        #[arg(long)]
        by_candidates: bool,
        /// Also write the per-candidate-count breakdown as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        #[arg(long)]
        published: bool,
    },
    /// Approximate randomization test between two prediction files.
    Significance {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        published: bool,
    },
    /// Cohen's kappa between annotators' prediction files.
    Kappa {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Further annotators; reports the mean pairwise kappa.
        #[arg(long)]
        extra: Vec<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Json,
}

fn expand_glob(pattern: &str) -> Result<Vec<PathBuf>> {
    let mut paths: Vec<PathBuf> = glob::glob(pattern)
        .with_context(|| format!("bad glob `{pattern}`"))?
        .collect::<Result<_, _>>()?;
    paths.sort();
    if paths.is_empty() {
        bail!("no files match `{pattern}`");
    }
    Ok(paths)
}

fn load_instances(path: &Path, published: bool) -> Result<Vec<ClozeInstance>> {
    if published {
        return Ok(published::load_instances(path, Setting::A)?);
    }
    Ok(read_jsonl(path)?)
}

fn print_json(v: &impl serde::Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().cmd {
        Cmd::Ingest { input, report, separator } => {
            let corpus = read_corpus(&expand_glob(&input)?, separator)?;
            match report {
                Some(p) => write_jsonl(&p, &corpus.issues)?,
                None => write_jsonl_to(io::stdout().lock(), &corpus.issues)?,
            }
            eprintln!("{} articles, {} issues", corpus.articles.len(), corpus.issues.len());
        }
        Cmd::Fetch { manifest, dest } => {
            let text = fs::read_to_string(&manifest).with_context(|| format!("reading {}", manifest.display()))?;
            let (urls, sums) = parse_manifest(&text);
            let outcomes = fetch_corpus(&urls, &dest, &sums, &FetchOptions::default())?;
            write_jsonl_to(io::stdout().lock(), &outcomes)?;
            let failed = outcomes
                .iter()
                .filter(|o| matches!(o.status, FetchStatus::Failed { .. } | FetchStatus::DigestMismatch { .. }))
                .count();
            if failed > 0 {
                bail!("{failed} of {} downloads failed", outcomes.len());
            }
        }
        Cmd::Build { input, config, ledger, setting, split, seed, out, keep_holdout, separator } => {
            let cfg: FilterConfig = match config {
                Some(p) => toml::from_str(&fs::read_to_string(&p)?).with_context(|| format!("parsing {}", p.display()))?,
                None => FilterConfig::default(),
            };
            cfg.validate()?;
            let corpus = read_corpus(&expand_glob(&input)?, separator)?;
            let (built, filtered) = build_dataset(&corpus.articles, &cfg, setting);
            fs::create_dir_all(&out)?;
            if let Some(p) = ledger {
                filtered.write_ledger_csv(BufWriter::new(File::create(p)?))?;
            }
            if let Some(vocab) = &built.vocab {
                serde_json::to_writer_pretty(BufWriter::new(File::create(out.join("global_vocab.json"))?), vocab)?;
            }
            match split.as_deref() {
                None => write_jsonl(out.join("all.jsonl"), &built.instances)?,
                Some(s) => {
                    let spec = match s {
                        "large" => SplitSpec::large(seed),
                        "lite" => SplitSpec::lite(seed),
                        sizes => SplitSpec::parse_sizes(sizes, seed).map_err(anyhow::Error::msg)?,
                    };
                    let splits = split_dataset(built.instances, &spec)?;
                    write_jsonl(out.join("train.jsonl"), &splits.train)?;
                    write_jsonl(out.join("dev.jsonl"), &splits.dev)?;
                    write_jsonl(out.join("test.jsonl"), &splits.test)?;
                    if keep_holdout {
                        write_jsonl(out.join("holdout.jsonl"), &splits.holdout)?;
                    }
                }
            }
            let l = &built.ledger;
            eprintln!("{} articles: {} accepted, {} rejected", l.total(), l.accepted, l.total_rejected());
            for (reason, n) in &l.rejected {
                eprintln!("  {reason}: {n}");
            }
        }
        Cmd::Stats { input, format, published } => {
            let mut columns = Vec::new();
            for p in &input {
                let name = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                let stats = compute_stats(&load_instances(p, published)?).with_context(|| p.display().to_string())?;
                columns.push((name, stats));
            }
            match format {
                Format::Json => print_json(&columns.iter().map(|(n, s)| (n.as_str(), s)).collect::<std::collections::BTreeMap<_, _>>())?,
                Format::Table => {
                    let cols: Vec<(&str, _)> = columns.iter().map(|(n, s)| (n.as_str(), *s)).collect();
                    print!("{}", render_table(&cols));
                }
            }
        }
        Cmd::Baseline { method, n, seed, input, out, published } => {
            let instances = load_instances(&input, published)?;
            let preds = run_baseline(&instances, method, &BaselineConfig { ngram_n: n, seed });
            let set = PredictionSet::from(preds.as_slice());
            write_jsonl(&out, preds.iter().map(|p| eval::PredictionRecord {
                instance_id: p.instance_id.clone(),
                predicted_pseudo_id: Some(p.predicted_pseudo_id),
            }))?;
            let report = score(&instances, &set)?;
            eprintln!("{method}: {}%", eval::format_percent(report.accuracy));
        }
        Cmd::Eval { gold, preds, by_candidates, csv, format, published } => {
            let gold = load_instances(&gold, published)?;
            let report = score(&gold, &PredictionSet::load(&preds)?)?;
            if let Some(p) = csv {
                fs::write(p, report.to_csv())?;
            }
            match format {
                Format::Json => print_json(&report)?,
                Format::Table => print!("{}", report.render(by_candidates)),
            }
        }
        Cmd::Significance { gold, a, b, iters, seed, published } => {
            let gold = load_instances(&gold, published)?;
            let r = paired_significance(&gold, &PredictionSet::load(&a)?, &PredictionSet::load(&b)?, iters, seed)?;
            print_json(&r)?;
        }
        Cmd::Kappa { a, b, extra } => {
            let a = PredictionSet::load(&a)?;
            let b = PredictionSet::load(&b)?;
            let (la, lb) = aligned_labels(&a, &b)?;
            if extra.is_empty() {
                println!("kappa {:.4} over {} items", cohens_kappa(&la, &lb)?, la.len());
            } else {
                let mut all = vec![la, lb];
                for p in extra {
                    all.push(aligned_labels(&a, &PredictionSet::load(&p)?)?.1);
                }
                println!("mean pairwise kappa {:.4} over {} annotators", mean_pairwise_kappa(&all)?, all.len());
            }
        }
    }
    Ok(())
}
