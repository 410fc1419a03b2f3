//! `prodrec` command line.
//!
//! Exit status: 0 on success, 1 on usage errors (unknown subcommand or flag,
//! bad flag value), 2 on data errors (unreadable or invalid input files).

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::corpus::{generate_synthetic, write_ratings, write_transactions, Dataset, SyntheticConfig};
use crate::error::{Error, Result};
use crate::eval::{run_experiment, ExperimentConfig};
use crate::recommender::{recommend_new_user, Recommendation, Recommender, RecommenderConfig};
use crate::rules::{fp_growth, generate_rules};
use crate::sequence::PrecedenceIndex;
use crate::similarity::Mode;
use crate::{ItemId, UserId, RELEVANCE_THRESHOLD};

#[derive(Debug, Parser)]
#[command(name = "prodrec", version, about = "Hybrid product recommender")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Load the data files and print record counts.
    IngestCheck(DataArgs),
    /// Recommend items for a known user.
    Recommend(RecommendArgs),
    /// Recommend the most widely purchased items to a brand-new user.
    RecommendNew(RecommendNewArgs),
    /// Mine frequent itemsets with FP-growth and print association rules.
    MineRules(MineArgs),
    /// Print the purchase precedence index as `earlier,later,count`.
    DumpIndex(DumpArgs),
    /// Write a synthetic planted-class dataset.
    GenData(GenArgs),
    /// Run the top-N precision/recall comparison over all similarity modes.
    Evaluate(EvalArgs),
}

#[derive(Debug, Args)]
struct DataArgs {
    #[arg(long, value_name = "CSV")]
    transactions: Option<PathBuf>,
    #[arg(long, value_name = "CSV")]
    ratings: Option<PathBuf>,
}

impl DataArgs {
    fn load(&self) -> Result<Dataset> {
        Dataset::load(self.transactions.as_deref(), self.ratings.as_deref())
    }
}

#[derive(Debug, Args)]
struct RecommendArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    user: String,
    #[arg(long, default_value = "simple", value_parser = parse_mode)]
    mode: Mode,
    #[arg(long = "k", default_value_t = 5)]
    k_neighbors: usize,
    #[arg(long, default_value_t = 10)]
    top_n: usize,
    #[arg(long, default_value_t = 40.0)]
    minsup: f64,
    #[arg(long, default_value_t = 60.0)]
    minconf: f64,
    #[arg(long, default_value_t = RELEVANCE_THRESHOLD)]
    threshold: f64,
    /// Skip association-rule expansion.
    #[arg(long)]
    no_rules: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct RecommendNewArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = 10)]
    top_n: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct MineArgs {
    #[arg(long, value_name = "CSV")]
    transactions: PathBuf,
    #[arg(long, default_value_t = 40.0)]
    minsup: f64,
    #[arg(long, default_value_t = 60.0)]
    minconf: f64,
    /// Only rules whose antecedent contains this item.
    #[arg(long)]
    item: Option<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct DumpArgs {
    #[arg(long, value_name = "CSV")]
    transactions: PathBuf,
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Directory receiving transactions.csv and ratings.csv.
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 4)]
    classes: usize,
    #[arg(long, default_value_t = 60)]
    items: usize,
    #[arg(long, default_value_t = 25)]
    users_per_class: usize,
    #[arg(long, default_value_t = 12)]
    ratings_min: usize,
    #[arg(long, default_value_t = 20)]
    ratings_max: usize,
    #[arg(long, default_value_t = 8)]
    transactions_min: usize,
    #[arg(long, default_value_t = 14)]
    transactions_max: usize,
    #[arg(long, default_value_t = 1)]
    basket_min: usize,
    #[arg(long, default_value_t = 4)]
    basket_max: usize,
    #[arg(long, default_value_t = 0.9)]
    affinity: f64,
    #[arg(long, default_value_t = 2.5)]
    spread: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RulesSetting {
    Off,
    On,
    Both,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = 0.8)]
    split: f64,
    #[arg(long, default_value_t = 5)]
    top_n: usize,
    #[arg(long = "k", default_value_t = 5)]
    k_neighbors: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Independent splits to pool (seeds seed, seed+1, ...).
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    #[arg(long, value_delimiter = ',', default_value = "implicit,simple,method1,method2", value_parser = parse_mode)]
    modes: Vec<Mode>,
    #[arg(long, value_enum, default_value_t = RulesSetting::Both)]
    rules: RulesSetting,
    #[arg(long, default_value_t = 0.5)]
    minsup: f64,
    #[arg(long, default_value_t = 20.0)]
    minconf: f64,
    #[arg(long, default_value_t = RELEVANCE_THRESHOLD)]
    threshold: f64,
    #[arg(long)]
    json: bool,
}

fn parse_mode(s: &str) -> std::result::Result<Mode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    1
                }
            };
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Config(_) => 1,
                _ => 2,
            }
        }
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::Io {
        path: "<stdout>".into(),
        source: e,
    }
}

fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

fn print_recommendations(out: &mut dyn Write, recs: &[Recommendation], as_json: bool) -> Result<()> {
    for (k, r) in recs.iter().enumerate() {
        let score = round4(r.score);
        if as_json {
            let line = json!({
                "rank": k + 1,
                "item": r.item,
                "score": score,
                "source": r.source.name(),
                "explain": r.explain,
            });
            writeln!(out, "{line}").map_err(io_err)?;
        } else {
            writeln!(out, "{}. {} {:.4} {} {}", k + 1, r.item, score, r.source.name(), r.explain)
                .map_err(io_err)?;
        }
    }
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

fn execute(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::IngestCheck(args) => {
            let ds = args.load()?;
            writeln!(
                out,
                "users: {}\nitems: {}\ntransactions: {}\nratings: {}",
                ds.num_users(),
                ds.items().len(),
                ds.transactions().len(),
                ds.ratings().len()
            )
            .map_err(io_err)
        }
        Command::Recommend(args) => {
            let config = RecommenderConfig {
                k_neighbors: args.k_neighbors,
                top_n: args.top_n,
                mode: args.mode,
                minsup_pct: args.minsup,
                minconf_pct: args.minconf,
                exclusion_threshold: args.threshold,
                use_rules: !args.no_rules,
            };
            config.validate()?;
            let ds = args.data.load()?;
            let recs = Recommender::new(&ds, config)?.recommend(&UserId::from(args.user))?;
            print_recommendations(out, &recs, args.json)
        }
        Command::RecommendNew(args) => {
            let config = RecommenderConfig {
                top_n: args.top_n,
                ..Default::default()
            };
            config.validate()?;
            let ds = args.data.load()?;
            let recs = recommend_new_user(&ds, &config)?;
            print_recommendations(out, &recs, args.json)
        }
        Command::MineRules(args) => {
            for (name, v) in [("minsup", args.minsup), ("minconf", args.minconf)] {
                if !(v > 0.0 && v <= 100.0) {
                    return Err(Error::Config(format!("{name} {v} must lie in (0, 100]")));
                }
            }
            let ds = Dataset::load(Some(&args.transactions), None)?;
            let frequents = fp_growth(ds.transactions(), args.minsup)?;
            let filter = args.item.map(ItemId::from);
            let rules = generate_rules(&frequents, args.minconf, filter.as_ref())?;
            for r in &rules {
                if args.json {
                    let line = json!({
                        "antecedent": r.antecedent,
                        "consequent": r.consequent,
                        "support": round2(r.support_pct),
                        "confidence": round2(r.confidence_pct),
                    });
                    writeln!(out, "{line}").map_err(io_err)?;
                } else {
                    writeln!(out, "{r}").map_err(io_err)?;
                }
            }
            Ok(())
        }
        Command::DumpIndex(args) => {
            let ds = Dataset::load(Some(&args.transactions), None)?;
            PrecedenceIndex::build(&ds).dump(out).map_err(io_err)
        }
        Command::GenData(args) => {
            let config = SyntheticConfig {
                num_classes: args.classes,
                num_items: args.items,
                users_per_class: args.users_per_class,
                ratings_per_user: (args.ratings_min, args.ratings_max),
                transactions_per_user: (args.transactions_min, args.transactions_max),
                basket_size: (args.basket_min, args.basket_max),
                class_affinity: args.affinity,
                noise_rating_spread: args.spread,
                rng_seed: args.seed,
            };
            let ds = generate_synthetic(&config)?;
            std::fs::create_dir_all(&args.out_dir).map_err(|source| Error::Io {
                path: args.out_dir.clone(),
                source,
            })?;
            let tx_path = args.out_dir.join("transactions.csv");
            let rt_path = args.out_dir.join("ratings.csv");
            write_transactions(create(&tx_path)?, ds.transactions())?;
            write_ratings(create(&rt_path)?, ds.ratings())?;
            writeln!(
                out,
                "users: {}\nitems: {}\ntransactions: {}\nratings: {}",
                ds.num_users(),
                ds.items().len(),
                ds.transactions().len(),
                ds.ratings().len()
            )
            .map_err(io_err)
        }
        Command::Evaluate(args) => {
            let config = ExperimentConfig {
                train_fraction: args.split,
                top_n: args.top_n,
                k_neighbors: args.k_neighbors,
                seed: args.seed,
                repeats: args.repeats,
                modes: args.modes,
                rules: match args.rules {
                    RulesSetting::Off => vec![false],
                    RulesSetting::On => vec![true],
                    RulesSetting::Both => vec![false, true],
                },
                minsup_pct: args.minsup,
                minconf_pct: args.minconf,
                relevance_threshold: args.threshold,
            };
            if !(config.train_fraction > 0.0 && config.train_fraction < 1.0) {
                return Err(Error::Config(format!("split {} must lie in (0, 1)", config.train_fraction)));
            }
            let ds = args.data.load()?;
            let report = run_experiment(&ds, &config)?;
            if args.json {
                let mut report = report;
                for r in &mut report.rows {
                    r.precision = round2(r.precision);
                    r.recall = round2(r.recall);
                }
                let line = serde_json::to_string(&report).expect("report serializes");
                writeln!(out, "{line}").map_err(io_err)
            } else {
                write!(out, "{report}").map_err(io_err)
            }
        }
    }
}
