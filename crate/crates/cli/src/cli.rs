//! Command-line interface.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use langtree_core::cluster::to_ascii;
use langtree_core::{
    agglomerate, matrix_delta, temporal_consistency, DriftSpec, Linkage, SelectionRule,
    TokenizerConfig, TrainConfig,
};
use serde_json::{json, Value};

use crate::cache::EmbeddingCache;
use crate::error::{CliError, Stage};
use crate::fixtures::{self, DESCRIBED_SPLIT};
use crate::formats::{read_matrix_csv, write_file, write_model, Precision};
use crate::manifest::Manifest;
use crate::pipeline::{analyze, load_corpora, shared_vocab, train_all, AnalysisConfig, Corpus};
use crate::report::{
    merges_json, run_metadata, to_json, two_cut_labels, write_tree_artifacts, Format,
    RunConfigRecord, ALL_FORMATS,
};
use crate::suite;

/// Overrides the default output directory when `--out` is not given.
pub const OUT_ENV: &str = "LANGTREE_OUT";

#[derive(Debug, Parser)]
#[command(
    name = "langtree",
    version,
    about = "Language evolution trees from time-labelled corpora"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full pipeline: matrix CSV, Newick, ASCII tree, consistency report, metadata.
    Run {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 100)]
        k: usize,
        #[arg(long, default_value_t = 100)]
        dim: usize,
        #[command(flatten)]
        train: TrainArgs,
        #[command(flatten)]
        tree: TreeArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Runs the pipeline once per dimension and compares the trees.
    SweepDim {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 100)]
        k: usize,
        /// Dimensions to compare, e.g. `--dim 80,100,120`.
        #[arg(long = "dim", value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[command(flatten)]
        train: TrainArgs,
        #[command(flatten)]
        tree: TreeArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Runs the pipeline once per shared-vocabulary size and compares the matrices.
    SweepK {
        #[command(flatten)]
        input: InputArgs,
        /// Vocabulary sizes to compare, e.g. `--k 100,10`.
        #[arg(long = "k", value_delimiter = ',', required = true)]
        ks: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        dim: usize,
        #[command(flatten)]
        train: TrainArgs,
        #[command(flatten)]
        tree: TreeArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Clusters a bundled published table (`5-5` or `5-6`).
    Fixture {
        id: String,
        #[command(flatten)]
        tree: TreeArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Writes seeded synthetic drifting corpora and their manifest.
    Synth {
        #[arg(long, default_value_t = suite::VOCAB)]
        vocab: usize,
        #[arg(long, default_value_t = suite::TOKENS)]
        tokens: usize,
        #[arg(long, value_delimiter = ',', default_values_t = suite::TIMELINE)]
        timeline: Vec<i64>,
        #[arg(long, default_value_t = 1.0)]
        drift: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Prints word counts per corpus as tab-separated `corpus word count`.
    Freq {
        #[command(flatten)]
        input: InputArgs,
        /// Only the most frequent N words of each corpus.
        #[arg(long)]
        top: Option<usize>,
    },
    /// Prints the shared vocabulary, one word per line.
    Vocab {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 100)]
        k: usize,
        #[arg(long, default_value_t = 5)]
        min_count: u64,
        #[arg(long, value_parser = parse_rule, default_value = "sum-rank")]
        rule: SelectionRule,
    },
    /// Trains one model per corpus and writes them under `<out>/models`.
    Embed {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 100)]
        dim: usize,
        #[command(flatten)]
        train: TrainArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Clusters a distance matrix CSV.
    Tree {
        /// Square CSV with a label header row and label column.
        #[arg(long)]
        matrix: PathBuf,
        #[command(flatten)]
        tree: TreeArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// File with one stopword per line; stopwords are dropped at tokenization.
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// Split words at apostrophes instead of keeping contractions whole.
    #[arg(long)]
    pub split_apostrophes: bool,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[arg(long, default_value_t = 5)]
    pub window: usize,
    #[arg(long, default_value_t = 5)]
    pub epochs: usize,
    #[arg(long, default_value_t = 5)]
    pub negative: usize,
    #[arg(long, default_value_t = 5)]
    pub min_count: u64,
    #[arg(long, default_value_t = 0.025)]
    pub learning_rate: f64,
    /// Frequent-word down-sampling threshold; 0 disables it.
    #[arg(long, default_value_t = 1e-3)]
    pub subsample: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_parser = parse_rule, default_value = "sum-rank")]
    pub rule: SelectionRule,
}

impl TrainArgs {
    fn config(&self, dim: usize) -> TrainConfig {
        TrainConfig {
            dim,
            window: self.window,
            epochs: self.epochs,
            negative_samples: self.negative,
            initial_learning_rate: self.learning_rate,
            min_count: self.min_count,
            subsample_threshold: self.subsample,
            seed: self.seed,
            deterministic: true,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct TreeArgs {
    #[arg(long, value_parser = parse_linkage, default_value = "complete")]
    pub linkage: Linkage,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output directory; defaults to $LANGTREE_OUT, then `out`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Artifacts to write (comma-separated); default all.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub format: Vec<Format>,
    /// Write matrix cells with full precision instead of three decimals.
    #[arg(long)]
    pub full_precision: bool,
}

impl OutputArgs {
    fn formats(&self) -> BTreeSet<Format> {
        if self.format.is_empty() {
            ALL_FORMATS.into_iter().collect()
        } else {
            self.format.iter().copied().collect()
        }
    }

    fn precision(&self) -> Precision {
        if self.full_precision {
            Precision::Full
        } else {
            Precision::Table
        }
    }
}

fn parse_linkage(s: &str) -> Result<Linkage, String> {
    Linkage::from_name(s)
        .ok_or_else(|| format!("unknown linkage {s:?} (single, complete, average)"))
}

fn parse_rule(s: &str) -> Result<SelectionRule, String> {
    match s {
        "sum-rank" => Ok(SelectionRule::SumRank),
        "min-rank" => Ok(SelectionRule::MinRank),
        _ => Err(format!("unknown rule {s:?} (sum-rank, min-rank)")),
    }
}

pub fn resolve_out(flag: Option<&Path>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| {
            std::env::var_os(OUT_ENV)
                .filter(|v| !v.is_empty())
                .map(PathBuf::from)
        })
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn tokenizer(input: &InputArgs) -> Result<TokenizerConfig, CliError> {
    let mut cfg = TokenizerConfig {
        keep_apostrophes: !input.split_apostrophes,
        ..TokenizerConfig::default()
    };
    if let Some(path) = &input.stopwords {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(Stage::Read, path, e))?;
        cfg.stopwords = text
            .lines()
            .map(|l| l.trim().to_lowercase())
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect();
    }
    Ok(cfg)
}

fn load(input: &InputArgs) -> Result<(TokenizerConfig, Vec<Corpus>), CliError> {
    let tok = tokenizer(input)?;
    let manifest = Manifest::load(&input.manifest)?;
    eprintln!(
        "[manifest] {}: {} corpora",
        input.manifest.display(),
        manifest.corpora.len()
    );
    let corpora = load_corpora(&manifest, &tok)?;
    Ok((tok, corpora))
}

fn record(
    input: &InputArgs,
    tok: &TokenizerConfig,
    k: usize,
    train: &TrainConfig,
    rule: SelectionRule,
    tree: &TreeArgs,
    output: &OutputArgs,
) -> RunConfigRecord {
    RunConfigRecord {
        manifest: input.manifest.display().to_string(),
        k,
        vocab_rule: rule,
        linkage: tree.linkage,
        formats: output.formats(),
        full_precision: output.full_precision,
        keep_apostrophes: tok.keep_apostrophes,
        stopwords: tok.stopwords.iter().cloned().collect(),
        train: train.clone(),
    }
}

fn cache_for(out: &Path) -> EmbeddingCache {
    EmbeddingCache::on_disk(out.join(".cache"))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run {
            input,
            k,
            dim,
            train,
            tree,
            output,
        } => cmd_run(&input, k, dim, &train, &tree, &output),
        Command::SweepDim {
            input,
            k,
            dims,
            train,
            tree,
            output,
        } => cmd_sweep_dim(&input, k, &dims, &train, &tree, &output),
        Command::SweepK {
            input,
            ks,
            dim,
            train,
            tree,
            output,
        } => cmd_sweep_k(&input, &ks, dim, &train, &tree, &output),
        Command::Fixture { id, tree, output } => cmd_fixture(&id, &tree, &output),
        Command::Synth {
            vocab,
            tokens,
            timeline,
            drift,
            seed,
            out,
        } => {
            let spec = DriftSpec {
                vocab_size: vocab,
                timeline,
                tokens_per_corpus: tokens,
                drift_rate: drift,
                seed,
            };
            let dir = resolve_out(out.as_deref());
            let manifest = suite::write(&spec, &dir)?;
            eprintln!("[synth] {} corpora", spec.timeline.len());
            println!("{}", manifest.display());
            Ok(())
        }
        Command::Freq { input, top } => {
            let (_, corpora) = load(&input)?;
            let mut out = String::new();
            for c in &corpora {
                for (w, n) in c.table.ranked().into_iter().take(top.unwrap_or(usize::MAX)) {
                    out.push_str(&format!("{}\t{w}\t{n}\n", c.id));
                }
            }
            print!("{out}");
            Ok(())
        }
        Command::Vocab {
            input,
            k,
            min_count,
            rule,
        } => {
            let (_, corpora) = load(&input)?;
            let vocab = shared_vocab(&corpora, k, min_count, rule)?;
            for w in vocab.words() {
                println!("{w}");
            }
            Ok(())
        }
        Command::Embed {
            input,
            dim,
            train,
            out,
        } => {
            let (_, corpora) = load(&input)?;
            let out = resolve_out(out.as_deref());
            let cfg = train.config(dim);
            cfg.validate().map_err(CliError::from)?;
            let models = train_all(&corpora, &cfg, &cache_for(&out))?;
            for (i, m) in models.iter().enumerate() {
                let path = out
                    .join("models")
                    .join(format!("{i:02}-{}.model", file_safe(&m.corpus_id)));
                write_file(&path, &write_model(m))?;
                println!("{}", path.display());
            }
            Ok(())
        }
        Command::Tree {
            matrix,
            tree,
            output,
        } => {
            let text =
                fs::read_to_string(&matrix).map_err(|e| CliError::io(Stage::Read, &matrix, e))?;
            let (m, _) = read_matrix_csv(&text, 0.0).map_err(|e| {
                CliError::data(Stage::Geometry, format!("{}: {e}", matrix.display()))
            })?;
            let t = agglomerate(&m, tree.linkage)?;
            let consistency = m.years().map(|_| temporal_consistency(&t)).transpose()?;
            let out = resolve_out(output.out.as_deref());
            write_tree_artifacts(
                &out,
                &m,
                &t,
                consistency.as_ref(),
                &output.formats(),
                output.precision(),
            )?;
            print!("{}", to_ascii(&t));
            Ok(())
        }
    }
}

fn file_safe(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn cmd_run(
    input: &InputArgs,
    k: usize,
    dim: usize,
    train: &TrainArgs,
    tree: &TreeArgs,
    output: &OutputArgs,
) -> Result<(), CliError> {
    let cfg = train.config(dim);
    cfg.validate().map_err(CliError::from)?;
    let (tok, corpora) = load(input)?;
    let out = resolve_out(output.out.as_deref());
    let analysis = analyze(
        &corpora,
        &AnalysisConfig {
            k,
            rule: train.rule,
            train: cfg.clone(),
            linkage: tree.linkage,
        },
        &cache_for(&out),
    )?;
    let formats = output.formats();
    write_tree_artifacts(
        &out,
        &analysis.matrix,
        &analysis.tree,
        Some(&analysis.consistency),
        &formats,
        output.precision(),
    )?;
    let config = record(input, &tok, k, &cfg, train.rule, tree, output);
    write_file(
        &out.join("run.json"),
        &to_json(&run_metadata(&config, &corpora, &analysis)),
    )?;
    eprintln!("[write] artifacts in {}", out.display());
    print!("{}", to_ascii(&analysis.tree));
    Ok(())
}

/// A sweep entry: run name and, if it succeeded, its matrix and 2-cut.
type SweepRun = (
    String,
    Option<(langtree_core::DistanceMatrix, Vec<Vec<String>>)>,
);

fn sweep_comparisons(runs: &[SweepRun]) -> Result<Vec<Value>, CliError> {
    let mut out = Vec::new();
    for (a, (na, ra)) in runs.iter().enumerate() {
        for (nb, rb) in &runs[a + 1..] {
            let (Some((ma, ca)), Some((mb, cb))) = (ra, rb) else {
                out.push(json!({ "a": na, "b": nb, "error": "one side failed" }));
                continue;
            };
            let d = matrix_delta(ma, mb)?;
            out.push(json!({
                "a": na,
                "b": nb,
                "two_cut_agree": ca == cb,
                "max_abs": d.max_abs,
                "mean_abs": d.mean_abs,
            }));
        }
    }
    Ok(out)
}

fn cmd_sweep_dim(
    input: &InputArgs,
    k: usize,
    dims: &[usize],
    train: &TrainArgs,
    tree: &TreeArgs,
    output: &OutputArgs,
) -> Result<(), CliError> {
    if dims.len() < 2 {
        return Err(CliError::Usage("sweep-dim needs at least 2 dims".into()));
    }
    let (_, corpora) = load(input)?;
    let out = resolve_out(output.out.as_deref());
    let cache = cache_for(&out);
    let mut entries = Vec::new();
    let mut runs = Vec::new();
    for &dim in dims {
        let name = format!("dim-{dim}");
        let cfg = AnalysisConfig {
            k,
            rule: train.rule,
            train: train.config(dim),
            linkage: tree.linkage,
        };
        let result = cfg
            .train
            .validate()
            .map_err(CliError::from)
            .and_then(|_| analyze(&corpora, &cfg, &cache));
        match result {
            Ok(a) => {
                write_tree_artifacts(
                    &out.join(&name),
                    &a.matrix,
                    &a.tree,
                    Some(&a.consistency),
                    &output.formats(),
                    output.precision(),
                )?;
                let two_cut = two_cut_labels(&a.tree);
                entries.push(json!({
                    "dim": dim,
                    "combined_length": a.combined_length,
                    "two_cut": two_cut,
                    "merges": merges_json(&a.tree),
                    "spearman_rho": a.consistency.spearman_rho,
                }));
                println!("{name}\n{}", to_ascii(&a.tree));
                runs.push((name, Some((a.matrix, two_cut))));
            }
            Err(e) => {
                eprintln!("error: {name}: {e}");
                entries.push(json!({ "dim": dim, "error": e.to_string() }));
                runs.push((name, None));
            }
        }
    }
    let report = json!({ "k": k, "runs": entries, "comparisons": sweep_comparisons(&runs)? });
    write_file(&out.join("sweep-dim.json"), &to_json(&report))?;
    Ok(())
}

fn cmd_sweep_k(
    input: &InputArgs,
    ks: &[usize],
    dim: usize,
    train: &TrainArgs,
    tree: &TreeArgs,
    output: &OutputArgs,
) -> Result<(), CliError> {
    if ks.len() < 2 {
        return Err(CliError::Usage(
            "sweep-k needs at least 2 values of k".into(),
        ));
    }
    let cfg = train.config(dim);
    cfg.validate().map_err(CliError::from)?;
    let (_, corpora) = load(input)?;
    let out = resolve_out(output.out.as_deref());
    let cache = cache_for(&out);
    let mut entries = Vec::new();
    let mut runs = Vec::new();
    for &k in ks {
        let name = format!("k-{k}");
        let ac = AnalysisConfig {
            k,
            rule: train.rule,
            train: cfg.clone(),
            linkage: tree.linkage,
        };
        match analyze(&corpora, &ac, &cache) {
            Ok(a) => {
                write_tree_artifacts(
                    &out.join(&name),
                    &a.matrix,
                    &a.tree,
                    Some(&a.consistency),
                    &output.formats(),
                    output.precision(),
                )?;
                let two_cut = two_cut_labels(&a.tree);
                entries
                    .push(json!({ "k": k, "shared_words": a.vocab.words(), "two_cut": two_cut }));
                runs.push((name, Some((a.matrix, two_cut))));
            }
            Err(e) => {
                eprintln!("error: {name}: {e}");
                entries.push(json!({ "k": k, "error": e.to_string() }));
                runs.push((name, None));
            }
        }
    }
    eprintln!(
        "[embed] {} model(s) trained, the rest reused",
        cache.trained()
    );
    let report = json!({ "dim": dim, "runs": entries, "comparisons": sweep_comparisons(&runs)? });
    let text = to_json(&report);
    write_file(&out.join("sweep-k.json"), &text)?;
    print!("{text}");
    Ok(())
}

fn cmd_fixture(id: &str, tree: &TreeArgs, output: &OutputArgs) -> Result<(), CliError> {
    let fixture = fixtures::load(id)?;
    let other = fixtures::load(fixtures::counterpart(id))?;
    let m = &fixture.matrix;
    let t = agglomerate(m, tree.linkage)?;
    let consistency = temporal_consistency(&t)?;
    let out = resolve_out(output.out.as_deref());
    write_tree_artifacts(
        &out,
        m,
        &t,
        Some(&consistency),
        &output.formats(),
        output.precision(),
    )?;

    let two_cut = two_cut_labels(&t);
    let described: Vec<Vec<String>> = DESCRIBED_SPLIT
        .iter()
        .map(|g| g.iter().map(|s| s.to_string()).collect())
        .collect();
    let delta = matrix_delta(m, &other.matrix)?;
    let report = json!({
        "fixture": fixture.id,
        "linkage": tree.linkage,
        "symmetrized": fixture.symmetrized.iter().map(|s| json!({
            "row": s.row, "col": s.col, "upper": s.upper, "lower": s.lower,
        })).collect::<Vec<_>>(),
        "merges": merges_json(&t),
        "two_cut": two_cut,
        "described_split": described,
        "matches_described_split": two_cut == described,
        "spearman_rho": consistency.spearman_rho,
        "delta_vs": { "fixture": other.id, "max_abs": delta.max_abs, "mean_abs": delta.mean_abs },
    });
    let text = to_json(&report);
    write_file(&out.join("fixture.json"), &text)?;
    print!("{}", to_ascii(&t));
    print!("{text}");
    Ok(())
}
