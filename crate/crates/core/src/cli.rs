//! Command-line front end: `align`, `trace`, `eval` and `synth`.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::kg::{load_dataset, SplitSpec, SUP_ENT_IDS};
use crate::pipeline::{evaluate_files, run, write_outputs, AlignConfig, CandidatePool, Mode};
use crate::synth::{synthesize_dataset, SynthParams};
use crate::trace::{trace_alignment, TraceOptions};

const DEFAULT_SPLIT_RATIO: f64 = 0.3;

#[derive(Parser, Debug)]
#[command(name = "lightalign", version, about = "Label-propagation entity alignment between two knowledge graphs")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "LIGHTALIGN_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Align the two graphs of a dataset directory.
    Align(AlignArgs),
    /// Explain one alignment decision on a small subgraph.
    Trace(TraceArgs),
    /// Score a predicted-pairs file against a reference file.
    Eval(EvalArgs),
    /// Generate an isomorphic-copy benchmark dataset.
    Synth(SynthArgs),
}

#[derive(Args, Debug)]
struct SplitArgs {
    /// Training-pair file; defaults to <dir>/sup_ent_ids when present.
    #[arg(long, conflicts_with = "split_ratio")]
    train_file: Option<PathBuf>,
    /// Fraction of reference pairs used as seeds (when no training file is used) [default: 0.3].
    #[arg(long)]
    split_ratio: Option<f64>,
    /// Shuffle seed for the ratio split [default: --seed].
    #[arg(long)]
    split_seed: Option<u64>,
}

impl SplitArgs {
    fn resolve(&self, dir: &Path, seed: u64) -> SplitSpec {
        if let Some(f) = &self.train_file {
            return SplitSpec::TrainFile(f.clone());
        }
        let sup = dir.join(SUP_ENT_IDS);
        if self.split_ratio.is_none() && sup.is_file() {
            return SplitSpec::TrainFile(sup);
        }
        SplitSpec::Ratio {
            ratio: self.split_ratio.unwrap_or(DEFAULT_SPLIT_RATIO),
            seed: self.split_seed.unwrap_or(seed),
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModeArg {
    Basic,
    Iterative,
    Literal,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum PoolArg {
    Unaligned,
    Test,
}

#[derive(Args, Debug)]
struct AlignArgs {
    /// Dataset directory (ent_ids_1/2, triples_1/2, ref_ent_ids[, sup_ent_ids]).
    #[arg(long)]
    dir: PathBuf,
    /// JSON config file; explicit flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Alignment mode [default: basic].
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Label dimension [default: 1024].
    #[arg(long)]
    dim: Option<usize>,
    /// Propagation rounds [default: 2].
    #[arg(long)]
    rounds: Option<usize>,
    /// Candidates kept per source entity [default: 500].
    #[arg(long)]
    topk: Option<usize>,
    /// Sinkhorn temperature [default: 0.05].
    #[arg(long)]
    tau: Option<f64>,
    /// Sinkhorn iterations [default: 10].
    #[arg(long)]
    sinkhorn_q: Option<usize>,
    /// Self-training epochs for iterative and literal modes [default: 5].
    #[arg(long)]
    epochs: Option<usize>,
    /// Label seed [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Do not add reverse triples.
    #[arg(long)]
    no_reverse: bool,
    /// Skip per-round L2 normalization.
    #[arg(long)]
    no_l2: bool,
    /// Entities decoded [default: unaligned].
    #[arg(long, value_enum)]
    candidates: Option<PoolArg>,
    #[command(flatten)]
    split: SplitArgs,
    /// Source name embeddings (literal mode).
    #[arg(long, requires = "emb_tgt")]
    emb_src: Option<PathBuf>,
    /// Target name embeddings (literal mode).
    #[arg(long, requires = "emb_src")]
    emb_tgt: Option<PathBuf>,
    /// Output directory for pairs.tsv and metrics.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl AlignArgs {
    fn config(&self) -> Result<AlignConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                serde_json::from_str(&text)
                    .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?
            }
            None => AlignConfig::default(),
        };
        if let Some(m) = self.mode {
            cfg.mode = match m {
                ModeArg::Basic => Mode::Basic,
                ModeArg::Iterative => Mode::Iterative,
                ModeArg::Literal => Mode::Literal,
            };
        }
        if let Some(p) = self.candidates {
            cfg.candidates = match p {
                PoolArg::Unaligned => CandidatePool::Unaligned,
                PoolArg::Test => CandidatePool::Test,
            };
        }
        macro_rules! set {
            ($($field:ident <- $arg:ident),*) => {$(
                if let Some(v) = self.$arg { cfg.$field = v; }
            )*};
        }
        set!(dim <- dim, rounds <- rounds, topk <- topk, tau <- tau, sinkhorn_q <- sinkhorn_q,
             iterative_epochs <- epochs, seed <- seed);
        if self.no_reverse {
            cfg.reverse_triples = false;
        }
        if self.no_l2 {
            cfg.per_round_l2 = false;
        }
        cfg.validate()?;
        if cfg.mode == Mode::Literal && self.emb_src.is_none() {
            return Err(Error::InvalidConfig("literal mode needs --emb-src and --emb-tgt".into()));
        }
        Ok(cfg)
    }
}

#[derive(Args, Debug)]
struct TraceArgs {
    #[arg(long)]
    dir: PathBuf,
    /// Source entity (file ID).
    #[arg(long)]
    src: u64,
    /// Target the aligner chose (file ID).
    #[arg(long)]
    predicted: u64,
    /// Correct target (file ID).
    #[arg(long)]
    gold: u64,
    /// Subgraph radius [default: --rounds].
    #[arg(long)]
    hops: Option<usize>,
    #[arg(long, default_value_t = 2)]
    rounds: usize,
    /// Anchors listed per entity and round.
    #[arg(long, default_value_t = 5)]
    m: usize,
    #[arg(long)]
    no_reverse: bool,
    #[arg(long)]
    no_l2: bool,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    split: SplitArgs,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Predictions: `src TAB tgt [TAB score]`, several lines per source form a ranking.
    #[arg(long)]
    pairs: PathBuf,
    /// Gold pairs: `src TAB tgt`.
    #[arg(long)]
    reference: PathBuf,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long)]
    entities: usize,
    #[arg(long)]
    triples: usize,
    #[arg(long, default_value_t = 20)]
    relations: usize,
    /// Probability of rewiring each target triple's tail.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output dataset directory.
    #[arg(long)]
    out: PathBuf,
}

fn align(args: &AlignArgs) -> Result<()> {
    let cfg = args.config()?;
    let dataset = load_dataset(&args.dir, &args.split.resolve(&args.dir, cfg.seed))?;
    let emb = match (&args.emb_src, &args.emb_tgt) {
        (Some(a), Some(b)) => Some((a.as_path(), b.as_path())),
        _ => None,
    };
    let result = run(&dataset, &cfg, emb)?;
    if let Some(out) = &args.out {
        write_outputs(&result, &dataset, out)?;
    }
    println!(
        "hits@1 {:.4} hits@10 {:.4} mrr {:.4} seconds {:.3}",
        result.metrics.hits1,
        result.metrics.hits10,
        result.metrics.mrr,
        result.seconds_total()
    );
    Ok(())
}

fn trace(args: &TraceArgs) -> Result<()> {
    let dataset = load_dataset(&args.dir, &args.split.resolve(&args.dir, args.seed))?;
    let src = dataset
        .source_entities
        .index_of(args.src)
        .ok_or_else(|| Error::Trace(format!("unknown source entity {}", args.src)))?;
    let target = |id: u64| {
        dataset
            .target_entities
            .index_of(id)
            .ok_or_else(|| Error::Trace(format!("unknown target entity {id}")))
    };
    let opts = TraceOptions {
        hops: args.hops.unwrap_or(args.rounds),
        rounds: args.rounds,
        top_m: args.m,
        reverse_triples: !args.no_reverse,
        per_round_l2: !args.no_l2,
    };
    let report = trace_alignment(&dataset.pair, src, target(args.predicted)?, target(args.gold)?, &opts)?;
    if args.json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
    }
    Ok(())
}

fn eval(args: &EvalArgs) -> Result<()> {
    let m = evaluate_files(&args.pairs, &args.reference)?;
    println!("hits@1 {:.4} hits@10 {:.4} mrr {:.4}", m.hits1, m.hits10, m.mrr);
    Ok(())
}

fn synth(args: &SynthArgs) -> Result<()> {
    let params = SynthParams {
        entities: args.entities,
        triples: args.triples,
        relations: args.relations,
        noise: args.noise,
        seed: args.seed,
    };
    synthesize_dataset(&params)?.write(&args.out)?;
    println!("wrote {}", args.out.display());
    Ok(())
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code: 0 on success, 1 on usage errors, 2 on
/// data errors.
pub fn run_cli<I, T>(args: I) -> i32
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
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let outcome = pool.install(|| match &cli.command {
        Command::Align(a) => align(a),
        Command::Trace(a) => trace(a),
        Command::Eval(a) => eval(a),
        Command::Synth(a) => synth(a),
    });
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                1
            } else {
                2
            }
        }
    }
}
