//! `topicgrid` command-line tool.
//!
//! Exit codes: 0 success, 1 generation failure, 2 usage or configuration
//! error, 3 I/O or data error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use topicgrid::artifact::{self, AssembleOptions};
use topicgrid::grid::{self, GridPattern, PatternPolicy};
use topicgrid::harness::{self, PatternSource, SweepConfig};
use topicgrid::lexicon::{self, LexiconFile, NormalizationTable, Source};
use topicgrid::pipeline::{self, ClueOptions, Gazetteer, KeywordExtractor, PreTagged};
use topicgrid::solver::{self, SolverConfig};

#[derive(Debug)]
enum Failure {
    /// The solver did not produce a fill.
    Generation(String),
    Usage(String),
    Data(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Generation(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Data(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Generation(m) | Failure::Usage(m) | Failure::Data(m) => m,
        }
    }
}

fn data(e: impl std::fmt::Display) -> Failure {
    Failure::Data(e.to_string())
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

type CliResult = Result<(), Failure>;

#[derive(Parser)]
#[command(name = "topicgrid", version, about = "Crossword generation with a guaranteed share of topic words")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a topic lexicon (JSON Lines) with fill-in-the-blank clues from a corpus.
    Ingest(IngestArgs),
    /// Generate random valid black-cell patterns.
    Patterns(PatternsArgs),
    /// Fill one pattern and write the puzzle.
    Generate(GenerateArgs),
    /// Run a success-rate and timing sweep and write CSV records.
    Sweep(SweepArgs),
    /// Re-check a puzzle file against a lexicon.
    Verify(VerifyArgs),
    /// Render a puzzle file as text.
    Render(RenderArgs),
}

#[derive(Args)]
struct LexiconArgs {
    /// Lexicon files: JSON Lines (.jsonl) carry their own source tags; plain word lists count as Filler.
    #[arg(long = "lexicon", num_args = 1.., required = true)]
    lexicon: Vec<PathBuf>,
    /// Plain word lists whose words are Topic words.
    #[arg(long = "topic", num_args = 1..)]
    topic: Vec<PathBuf>,
    /// Normalization table (JSON object of surface -> replacement).
    #[arg(long)]
    normalization: Option<PathBuf>,
}

#[derive(Args)]
struct SolverArgs {
    /// Target rate T: minimum percentage of Topic answers.
    #[arg(long = "target-rate", short = 'T', default_value_t = 0)]
    target_rate: u8,
    /// Global time limit in seconds.
    #[arg(long = "time-limit", default_value_t = 300.0)]
    time_limit: f64,
    #[arg(long = "restart-interval", default_value_t = 10.0)]
    restart_interval: f64,
    /// Node expansions per restart episode; makes runs reproducible.
    #[arg(long = "node-budget")]
    node_budget: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "allow-duplicates")]
    allow_duplicates: bool,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig, Failure> {
        let secs = |v: f64, name: &str| {
            Duration::try_from_secs_f64(v).map_err(|_| usage(format!("invalid {name}: {v}")))
        };
        let config = SolverConfig {
            target_rate: self.target_rate,
            time_limit: secs(self.time_limit, "time limit")?,
            restart_interval: secs(self.restart_interval, "restart interval")?,
            node_budget: self.node_budget,
            seed: self.seed,
            forbid_duplicate_answers: !self.allow_duplicates,
            ..Default::default()
        };
        config.validate().map_err(usage)?;
        Ok(config)
    }
}

#[derive(Args)]
struct IngestArgs {
    /// Corpus in JSON Lines: {"doc_id", "text", optional "keywords"}.
    #[arg(long)]
    corpus: PathBuf,
    /// Term list for gazetteer matching; without it the corpus must carry pre-tagged keywords.
    #[arg(long)]
    gazetteer: Option<PathBuf>,
    #[arg(long = "word-boundaries")]
    word_boundaries: bool,
    #[arg(long)]
    normalization: Option<PathBuf>,
    #[arg(long, default_value = pipeline::DEFAULT_MASK)]
    mask: String,
    #[arg(long = "min-context", default_value_t = pipeline::DEFAULT_MIN_CONTEXT)]
    min_context: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PatternsArgs {
    /// Grid size as VxH, e.g. 7x7.
    #[arg(long, value_parser = parse_size)]
    size: (usize, usize),
    #[arg(long)]
    black: usize,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "min-slot-length", default_value_t = 2)]
    min_slot_length: usize,
    #[arg(long = "require-connected")]
    require_connected: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct GenerateArgs {
    /// Pattern file (first pattern is used unless --pattern-index is given).
    #[arg(long, conflicts_with_all = ["size", "black"])]
    pattern: Option<PathBuf>,
    #[arg(long = "pattern-index", default_value_t = 0, requires = "pattern")]
    pattern_index: usize,
    /// Random pattern of size VxH, with --black black cells, drawn with --seed.
    #[arg(long, value_parser = parse_size, requires = "black")]
    size: Option<(usize, usize)>,
    #[arg(long, requires = "size")]
    black: Option<usize>,
    #[command(flatten)]
    lexicon: LexiconArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Keep raising T after each success and return the best fill.
    #[arg(long = "max-topic")]
    max_topic: bool,
    #[arg(long = "rate-step", default_value_t = solver::DEFAULT_RATE_STEP)]
    rate_step: u8,
    /// Seed for clue selection; defaults to --seed.
    #[arg(long = "clue-seed")]
    clue_seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Leave answers out of the output.
    #[arg(long = "no-solution")]
    no_solution: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    lexicon: LexiconArgs,
    /// Patterns to sweep; generated from --size/--black-counts otherwise.
    #[arg(long)]
    patterns: Option<PathBuf>,
    #[arg(long, value_parser = parse_size, default_value = "7x7")]
    size: (usize, usize),
    #[arg(long = "black-counts", value_delimiter = ',', default_values_t = [9, 10, 11, 12])]
    black_counts: Vec<usize>,
    #[arg(long = "patterns-per-count", default_value_t = 10)]
    patterns_per_count: usize,
    #[arg(long = "t-values", value_delimiter = ',', default_values_t = [10, 20, 30, 40, 50, 60, 70, 80, 90, 100])]
    t_values: Vec<u8>,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "time-limit", default_value_t = 300.0)]
    time_limit: f64,
    #[arg(long = "restart-interval", default_value_t = 10.0)]
    restart_interval: f64,
    #[arg(long = "node-budget")]
    node_budget: Option<u64>,
    #[arg(long = "early-stop")]
    early_stop: bool,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// CSV output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write summary tables as JSON.
    #[arg(long)]
    summary: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    puzzle: PathBuf,
    #[command(flatten)]
    lexicon: LexiconArgs,
    /// Target rate to check; defaults to the one recorded in the puzzle.
    #[arg(long = "target-rate", short = 'T')]
    target_rate: Option<u8>,
    #[arg(long = "allow-duplicates")]
    allow_duplicates: bool,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    puzzle: PathBuf,
    #[arg(long)]
    solution: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (v, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected VxH, got {s:?}"))?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{s:?}: {e}"));
    let size = (parse(v)?, parse(h)?);
    if size.0 == 0 || size.1 == 0 {
        return Err("grid dimensions must be positive".into());
    }
    Ok(size)
}

/// Writes `contents` to `out` through a temporary file in the same directory,
/// or to stdout when no path is given.
fn emit(out: Option<&Path>, contents: &str) -> CliResult {
    let Some(path) = out else {
        let mut stdout = std::io::stdout().lock();
        return stdout.write_all(contents.as_bytes()).map_err(data);
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| data(format!("{}: {e}", dir.display())))?;
    tmp.write_all(contents.as_bytes()).map_err(data)?;
    tmp.persist(path).map_err(|e| data(format!("{}: {e}", path.display())))?;
    Ok(())
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| data(format!("{}: {e}", path.display())))
}

fn load_table(path: Option<&PathBuf>) -> Result<NormalizationTable, Failure> {
    match path {
        Some(p) => NormalizationTable::load(p).map_err(data),
        None => Ok(NormalizationTable::default()),
    }
}

fn load_lexicon(args: &LexiconArgs) -> Result<lexicon::Lexicon, Failure> {
    let table = load_table(args.normalization.as_ref())?;
    let files: Vec<LexiconFile> = args
        .lexicon
        .iter()
        .map(|p| LexiconFile::detect(p, Source::Filler))
        .chain(args.topic.iter().map(|p| LexiconFile::detect(p, Source::Topic)))
        .collect();
    let lexicon = lexicon::ingest_lexicon(&files, &table).map_err(data)?;
    log::info!("lexicon: {:?}", lexicon.counts());
    Ok(lexicon)
}

fn cmd_ingest(args: IngestArgs) -> CliResult {
    let corpus = pipeline::read_corpus(&args.corpus).map_err(data)?;
    let table = load_table(args.normalization.as_ref())?;
    let options = ClueOptions {
        mask_token: args.mask,
        min_context_chars: args.min_context,
        ..Default::default()
    };
    let extractor: Box<dyn KeywordExtractor> = match &args.gazetteer {
        Some(path) => {
            let mut g = Gazetteer::from_term_list(&read(path)?).map_err(data)?;
            g.word_boundaries = args.word_boundaries;
            Box::new(g)
        }
        None => Box::new(PreTagged),
    };
    let topic = pipeline::build_topic_lexicon(&corpus, extractor.as_ref(), &table, &options).map_err(data)?;
    let s = topic.stats;
    eprintln!(
        "documents {} occurrences {} records {} (unnormalizable {}, unusable clues {}, keywords without clues {})",
        s.documents, s.occurrences, s.records, s.normalization_skipped, s.unusable_clues, s.keywords_without_clues
    );
    emit(args.out.as_deref(), &topic.to_json_lines())
}

fn cmd_patterns(args: PatternsArgs) -> CliResult {
    let policy = PatternPolicy {
        min_slot_length: args.min_slot_length,
        require_connected: args.require_connected,
        ..Default::default()
    };
    policy.check().map_err(usage)?;
    let (v, h) = args.size;
    if args.black >= v * h {
        return Err(usage(format!("{} black cells do not fit a {v}x{h} grid", args.black)));
    }
    let patterns = grid::generate_random_patterns(v, h, args.black, args.count, &policy, args.seed).map_err(data)?;
    emit(args.out.as_deref(), &grid::render_pattern_file(&patterns))
}

fn select_pattern(args: &GenerateArgs) -> Result<GridPattern, Failure> {
    if let Some(path) = &args.pattern {
        let mut patterns = grid::parse_pattern_file(&read(path)?).map_err(data)?;
        if args.pattern_index >= patterns.len() {
            return Err(usage(format!(
                "pattern index {} out of range ({} patterns)",
                args.pattern_index,
                patterns.len()
            )));
        }
        return Ok(patterns.swap_remove(args.pattern_index));
    }
    let (Some((v, h)), Some(black)) = (args.size, args.black) else {
        return Err(usage("either --pattern or --size with --black is required"));
    };
    if black >= v * h {
        return Err(usage(format!("{black} black cells do not fit a {v}x{h} grid")));
    }
    let mut patterns =
        grid::generate_random_patterns(v, h, black, 1, &PatternPolicy::default(), args.solver.seed).map_err(data)?;
    Ok(patterns.remove(0))
}

fn cmd_generate(args: GenerateArgs) -> CliResult {
    let config = args.solver.config()?;
    let pattern = select_pattern(&args)?;
    let report = grid::validate_pattern(&pattern, &PatternPolicy::default());
    if !report.is_valid() {
        return Err(data(format!("invalid pattern: {:?}", report.violations)));
    }
    let lexicon = load_lexicon(&args.lexicon)?;
    let index = lexicon::build_index(&lexicon);
    let slots = grid::extract_slots(&pattern, &PatternPolicy::default());
    let result = if args.max_topic {
        solver::maximize_topic_rate(&slots, &index, &config, args.rate_step)
    } else {
        solver::solve(&slots, &index, &config)
    }
    .map_err(usage)?;
    if !result.is_success() {
        return Err(Failure::Generation(format!(
            "status {} (best achieved ratio {:.3}, {} restarts, {} nodes)",
            result.status.as_str(),
            result.achieved_topic_ratio(),
            result.restarts,
            result.nodes_expanded
        )));
    }
    let options = AssembleOptions {
        target_rate: config.target_rate,
        seed: config.seed,
        clue_seed: args.clue_seed.unwrap_or(config.seed),
    };
    let puzzle = artifact::assemble(&pattern, &slots, &result, &lexicon, options).map_err(data)?;
    let text = match args.format {
        Format::Json => artifact::to_json(&puzzle, !args.no_solution),
        Format::Text => artifact::render_text(&puzzle, !args.no_solution),
    };
    emit(args.out.as_deref(), &text)
}

fn cmd_sweep(args: SweepArgs) -> CliResult {
    let secs = |v: f64| Duration::try_from_secs_f64(v).map_err(|_| usage(format!("invalid duration: {v}")));
    let config = SweepConfig {
        height: args.size.0,
        width: args.size.1,
        t_values: args.t_values,
        black_counts: args.black_counts,
        patterns_per_count: args.patterns_per_count,
        trials_per_cell: args.trials,
        seed: args.seed,
        solver: SolverConfig {
            time_limit: secs(args.time_limit)?,
            restart_interval: secs(args.restart_interval)?,
            node_budget: args.node_budget,
            ..Default::default()
        },
        early_stop: args.early_stop,
        jobs: args.jobs,
        ..Default::default()
    };
    config.validate().map_err(usage)?;
    let source = match &args.patterns {
        Some(p) => PatternSource::Provided(grid::parse_pattern_file(&read(p)?).map_err(data)?),
        None => PatternSource::Generate,
    };
    let lexicon = load_lexicon(&args.lexicon)?;
    let index = lexicon::build_index(&lexicon);
    let records = harness::run_sweep(&config, &index, &source).map_err(data)?;
    if args.summary.is_some() || args.svg.is_some() {
        let summary = harness::summarize(&records).map_err(data)?;
        if let Some(path) = &args.summary {
            let json = serde_json::to_string_pretty(&summary).map_err(data)? + "\n";
            emit(Some(path), &json)?;
        }
        if let Some(path) = &args.svg {
            emit(Some(path), &harness::render_svg(&summary))?;
        }
    }
    emit(args.out.as_deref(), &harness::records_to_csv(&records))
}

fn cmd_verify(args: VerifyArgs) -> CliResult {
    let puzzle = artifact::parse_puzzle(&read(&args.puzzle)?).map_err(data)?;
    let lexicon = load_lexicon(&args.lexicon)?;
    let target_rate = args.target_rate.unwrap_or(puzzle.metadata.target_rate);
    if target_rate > 100 {
        return Err(usage(format!("target rate must be within 0..=100, got {target_rate}")));
    }
    let report = artifact::verify_puzzle_with(&puzzle, &lexicon, target_rate, !args.allow_duplicates);
    if report.is_valid() {
        println!("ok: {} entries, T={target_rate}", puzzle.entries.len());
        return Ok(());
    }
    for v in &report.violations {
        println!("{v}");
    }
    Err(Failure::Data(format!("{} violation(s)", report.violations.len())))
}

fn cmd_render(args: RenderArgs) -> CliResult {
    let puzzle = artifact::parse_puzzle(&read(&args.puzzle)?).map_err(data)?;
    emit(args.out.as_deref(), &artifact::render_text(&puzzle, args.solution))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Ingest(a) => cmd_ingest(a),
        Command::Patterns(a) => cmd_patterns(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Render(a) => cmd_render(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("topicgrid: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_parsing() {
        assert_eq!(parse_size("7x7"), Ok((7, 7)));
        assert_eq!(parse_size("5X9"), Ok((5, 9)));
        assert!(parse_size("7").is_err());
        assert!(parse_size("0x3").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
