mod exit;

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use structural_entropy::harness::{
    compare_sources, pearson_matrix, read_dataset, read_report, run_dataset, write_report_csv,
    write_report_json, HarnessConfig, HarnessError, Metric, DEFAULT_SAMPLES_PER_TASK,
};
use structural_entropy::{
    extract_symbols, node_count, DepthBound, EncodingScheme, FrontendError, GrammarRegistry, NodeId,
    ParseTree, DEFAULT_EPSILON,
};

/// Structural stability scores for sets of code samples.
#[derive(Parser)]
#[command(name = "structent", version, about)]
struct Cli {
    /// Increase log verbosity (-v info, -vv debug). STRUCTENT_LOG overrides.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List registered languages and grammar versions.
    Languages,
    /// Parse a file and report diagnostics.
    Parse {
        #[arg(short, long, env = "STRUCTENT_LANGUAGE")]
        language: String,
        /// Reject trees that needed error recovery.
        #[arg(long, env = "STRUCTENT_STRICT")]
        strict: bool,
        /// Print the node outline instead of the summary.
        #[arg(long)]
        tree: bool,
        /// Source file, or `-` for standard input.
        file: PathBuf,
    },
    /// Score one pair of files; SCE treats FILE_A as the sample and FILE_B as the reference.
    Compare {
        #[arg(short, long, env = "STRUCTENT_LANGUAGE")]
        language: String,
        #[command(flatten)]
        scoring: ScoringArgs,
        file_a: PathBuf,
        file_b: PathBuf,
    },
    /// Score every task of a JSON-Lines dataset.
    Run {
        #[command(flatten)]
        scoring: ScoringArgs,
        /// Worker threads for task scoring.
        #[arg(long, env = "STRUCTENT_WORKERS", default_value_t = 1)]
        workers: usize,
        /// Samples used per task (leading ones).
        #[arg(long, env = "STRUCTENT_SAMPLES", default_value_t = DEFAULT_SAMPLES_PER_TASK)]
        samples: usize,
        /// Report JSON path; standard output if omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Also write per-task rows as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        dataset: PathBuf,
    },
    /// Pearson correlation matrix over a report's score columns.
    Correlate {
        /// CSV path; standard output if omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Leave out external metric columns.
        #[arg(long)]
        no_external: bool,
        report: PathBuf,
    },
    /// Print a file's subtree multiset as `count<TAB>symbol` lines.
    DumpSymbols {
        #[arg(short, long, env = "STRUCTENT_LANGUAGE")]
        language: String,
        #[arg(short, long, env = "STRUCTENT_DEPTH", default_value_t = 1)]
        depth: u32,
        #[arg(short, long, value_enum, default_value_t = Encoding::Value)]
        encoding: Encoding,
        #[arg(long, env = "STRUCTENT_STRICT")]
        strict: bool,
        /// Source file, or `-` for standard input.
        file: PathBuf,
    },
}

#[derive(Args)]
struct ScoringArgs {
    /// Subtree depth bound.
    #[arg(short, long, env = "STRUCTENT_DEPTH", default_value_t = 1)]
    depth: u32,
    /// Smoothing floor for the SCE reference.
    #[arg(long, env = "STRUCTENT_EPSILON", default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    #[arg(short, long, env = "STRUCTENT_ENCODING", value_enum, default_value_t = Encoding::Both)]
    encoding: Encoding,
    #[arg(short, long, env = "STRUCTENT_METRIC", value_enum, default_value_t = MetricChoice::Both)]
    metric: MetricChoice,
    /// Report the raw SCE ratio without clipping to [0, 1].
    #[arg(long, env = "STRUCTENT_NO_CLAMP")]
    no_clamp: bool,
    /// Rescale the smoothed reference to sum to one.
    #[arg(long, env = "STRUCTENT_RENORMALIZE")]
    renormalize: bool,
    /// Treat trees that needed error recovery as parse failures.
    #[arg(long, env = "STRUCTENT_STRICT")]
    strict: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Encoding {
    Structural,
    Value,
    Both,
}

impl Encoding {
    fn schemes(self) -> BTreeSet<EncodingScheme> {
        match self {
            Encoding::Structural => [EncodingScheme::StructOnly].into(),
            Encoding::Value => [EncodingScheme::StructValue].into(),
            Encoding::Both => EncodingScheme::ALL.into(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricChoice {
    Sce,
    Jsd,
    Both,
}

impl MetricChoice {
    fn metrics(self) -> BTreeSet<Metric> {
        match self {
            MetricChoice::Sce => [Metric::Sce].into(),
            MetricChoice::Jsd => [Metric::Jsd].into(),
            MetricChoice::Both => Metric::ALL.into(),
        }
    }
}

fn depth_bound(d: u32) -> Result<DepthBound> {
    DepthBound::new(d).map_err(|e| HarnessError::InvalidConfig(e.to_string()).into())
}

impl ScoringArgs {
    fn config(&self) -> Result<HarnessConfig> {
        let config = HarnessConfig {
            depth: depth_bound(self.depth)?,
            epsilon: self.epsilon,
            clamp_sce: !self.no_clamp,
            renormalize: self.renormalize,
            encodings: self.encoding.schemes(),
            metrics: self.metric.metrics(),
            strict_parse: self.strict,
            ..HarnessConfig::default()
        };
        config.validate()?;
        Ok(config)
    }
}

fn read_source(path: &Path) -> Result<String> {
    let mut text = String::new();
    if path == Path::new("-") {
        io::stdin().read_to_string(&mut text).context("reading standard input")?;
    } else {
        text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    }
    Ok(text)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn parse_file(registry: &GrammarRegistry, language: &str, path: &Path, strict: bool) -> Result<ParseTree> {
    registry.language(language)?;
    let source = read_source(path)?;
    registry.parse_with(language, &source, strict).with_context(|| format!("parsing {}", path.display()))
}

#[derive(Serialize)]
struct ParseSummary<'a> {
    language: &'a str,
    grammar_version: &'a str,
    nodes: usize,
    error_nodes: usize,
    status: &'a str,
}

fn write_outline(out: &mut impl Write, tree: &ParseTree) -> io::Result<()> {
    let mut stack: Vec<(NodeId, usize)> = vec![(tree.root(), 0)];
    while let Some((id, depth)) = stack.pop() {
        let node = tree.node(id).expect("reachable node");
        let span = node.span();
        let mark = if node.is_error() { " !" } else { "" };
        writeln!(
            out,
            "{:indent$}{} {}..{}{mark}",
            "",
            node.node_type(),
            span.start,
            span.end,
            indent = depth * 2
        )?;
        stack.extend(node.children().iter().rev().map(|&c| (c, depth + 1)));
    }
    Ok(())
}

fn cmd_parse(
    registry: &GrammarRegistry,
    language: &str,
    strict: bool,
    tree: bool,
    file: &Path,
) -> Result<()> {
    let parsed = parse_file(registry, language, file, strict)?;
    let mut out = io::stdout().lock();
    if tree {
        write_outline(&mut out, &parsed)?;
    } else {
        let id = parsed.language();
        let summary = ParseSummary {
            language: &id.name,
            grammar_version: &id.grammar_version,
            nodes: node_count(&parsed),
            error_nodes: parsed.error_node_count(),
            status: if parsed.has_errors() { "recovered" } else { "ok" },
        };
        serde_json::to_writer_pretty(&mut out, &summary)?;
        writeln!(out)?;
    }
    Ok(())
}

fn cmd_compare(
    registry: &GrammarRegistry,
    language: &str,
    scoring: &ScoringArgs,
    a: &Path,
    b: &Path,
) -> Result<()> {
    let config = scoring.config()?;
    registry.language(language)?;
    let (source_a, source_b) = (read_source(a)?, read_source(b)?);
    let result = compare_sources(registry, language, &source_a, &source_b, &config)
        .with_context(|| format!("comparing {} and {}", a.display(), b.display()))?;
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, &result)?;
    writeln!(out)?;
    Ok(())
}

fn cmd_run(
    registry: &GrammarRegistry,
    config: HarnessConfig,
    out: Option<&Path>,
    csv: Option<&Path>,
    dataset: &Path,
) -> Result<()> {
    let file = File::open(dataset).with_context(|| format!("opening {}", dataset.display()))?;
    let tasks =
        read_dataset(BufReader::new(file)).with_context(|| format!("reading {}", dataset.display()))?;
    log::info!("{} tasks loaded from {}", tasks.len(), dataset.display());
    let report = run_dataset(registry, tasks, &config, Some(dataset.display().to_string()))?;

    if let Some(path) = csv {
        let mut w = create(path)?;
        write_report_csv(&mut w, &report)?;
        w.flush()?;
    }
    let mut summary: Box<dyn Write> = match out {
        Some(path) => {
            let mut w = create(path)?;
            write_report_json(&mut w, &report)?;
            w.flush()?;
            Box::new(io::stdout().lock())
        }
        None => {
            write_report_json(io::stdout().lock(), &report)?;
            Box::new(io::stderr().lock())
        }
    };
    let failures: usize = report.per_task.iter().map(|t| t.parse_failures).sum::<usize>()
        + report.skipped.iter().map(|t| t.parse_failures).sum::<usize>();
    writeln!(
        summary,
        "tasks scored: {}, skipped: {}, parse failures: {failures}",
        report.per_task.len(),
        report.skipped.len()
    )?;
    for (key, value) in &report.aggregate {
        writeln!(summary, "{key}\t{value}")?;
    }
    Ok(())
}

fn cmd_correlate(out: Option<&Path>, no_external: bool, report: &Path) -> Result<()> {
    let file = File::open(report).with_context(|| format!("opening {}", report.display()))?;
    let report =
        read_report(BufReader::new(file)).with_context(|| format!("reading {}", report.display()))?;
    let matrix = pearson_matrix(&report, !no_external)?;
    match out {
        Some(path) => {
            let mut w = create(path)?;
            matrix.write_csv(&mut w)?;
            w.flush()?;
        }
        None => matrix.write_csv(io::stdout().lock())?,
    }
    Ok(())
}

fn cmd_dump(
    registry: &GrammarRegistry,
    language: &str,
    depth: u32,
    encoding: Encoding,
    strict: bool,
    file: &Path,
) -> Result<()> {
    let scheme = match encoding {
        Encoding::Structural => EncodingScheme::StructOnly,
        Encoding::Value => EncodingScheme::StructValue,
        Encoding::Both => {
            return Err(HarnessError::InvalidConfig("dump-symbols takes a single encoding".into()).into())
        }
    };
    let depth = depth_bound(depth)?;
    let tree = parse_file(registry, language, file, strict)?;
    io::stdout().lock().write_all(extract_symbols(&tree, depth, scheme).listing().as_bytes())?;
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    let registry =
        GrammarRegistry::with_default_grammars().map_err(|e: FrontendError| anyhow::Error::new(e))?;
    match cli.command {
        Command::Languages => {
            let mut out = io::stdout().lock();
            for id in registry.languages() {
                writeln!(out, "{}\t{}", id.name, id.grammar_version)?;
            }
            Ok(())
        }
        Command::Parse { language, strict, tree, file } => {
            cmd_parse(&registry, &language, strict, tree, &file)
        }
        Command::Compare { language, scoring, file_a, file_b } => {
            cmd_compare(&registry, &language, &scoring, &file_a, &file_b)
        }
        Command::Run { scoring, workers, samples, out, csv, dataset } => {
            let config = HarnessConfig { workers, samples_per_task: samples, ..scoring.config()? };
            config.validate()?;
            cmd_run(&registry, config, out.as_deref(), csv.as_deref(), &dataset)
        }
        Command::Correlate { out, no_external, report } => {
            cmd_correlate(out.as_deref(), no_external, &report)
        }
        Command::DumpSymbols { language, depth, encoding, strict, file } => {
            cmd_dump(&registry, &language, depth, encoding, strict, &file)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let default_level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("STRUCTENT_LOG", default_level)).init();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            exit::code_for(&err)
        }
    }
}
