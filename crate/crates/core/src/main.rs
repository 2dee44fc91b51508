use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use scirank::analysis::similarity_scatter;
use scirank::corpus::{load_corpus, write_corpus_tsv, CorpusPaths};
use scirank::export;
use scirank::institutions::{compare_rankings, RankBasis};
use scirank::metrics::{ConnectionsMode, SelfCitationPolicy, SelfLoops};
use scirank::pipeline::{self, load_institutions, load_ranking, Manifest, RunConfig};
use scirank::synth::{generate, SynthConfig, YearProfile};
use scirank::{Error, GradingScheme, MetricConfig, MetricKind};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(name = "scirank", version, about = "Rank authors, venues and institutions from a publication corpus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute metrics, rankings, grades and institution tables.
    Compute(ComputeArgs),
    /// Show rank, percentile, cumulative value and letters for authors.
    Query(QueryArgs),
    /// Cumulative-value scatter of two metrics over the same view.
    Compare(CompareArgs),
    /// Paired institution ranks under two metrics or granularities.
    Institutions(InstitutionArgs),
    /// Load a corpus and print the validation report.
    Validate(ValidateArgs),
    /// Generate a synthetic corpus in the TSV layout.
    Synth(SynthArgs),
}

#[derive(Args)]
struct ComputeArgs {
    /// Directory holding the six corpus TSV files.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, env = "SCIRANK_OUT", default_value = "scirank-out")]
    out: PathBuf,
    /// Comma-separated metric names; default all seven.
    #[arg(long, value_delimiter = ',')]
    metrics: Vec<String>,
    /// `all`, `overall`, `full` or a comma-separated list of domain ids.
    #[arg(long, default_value = "all")]
    views: String,
    /// `percentile`, `percentile:<alpha>` or `contribution`.
    #[arg(long, default_value = "percentile:0.25")]
    scheme: String,
    #[arg(long, default_value_t = 0.85)]
    damping: f64,
    #[arg(long, default_value_t = 1e-10)]
    tolerance: f64,
    #[arg(long, default_value_t = 200)]
    max_iterations: usize,
    #[arg(long, value_enum, default_value_t = ConnMode::Weighted)]
    connections: ConnMode,
    /// Keep the co-authorship diagonal in Connections.
    #[arg(long)]
    connections_self_loops: bool,
    #[arg(long, default_value_t = 0.5)]
    exposure_mix: f64,
    /// Drop citations between papers that share an author.
    #[arg(long)]
    exclude_self_citations: bool,
    /// Count an author's own score in their cumulative value.
    #[arg(long)]
    inclusive_cumulative: bool,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConnMode {
    Weighted,
    Binary,
}

#[derive(Args)]
struct QueryArgs {
    /// Output directory of a previous `compute`.
    #[arg(long, env = "SCIRANK_OUT", default_value = "scirank-out")]
    run: PathBuf,
    /// Treat ids as institution ids.
    #[arg(long)]
    institution: bool,
    #[arg(required = true)]
    ids: Vec<String>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long, env = "SCIRANK_OUT", default_value = "scirank-out")]
    run: PathBuf,
    /// View scope, e.g. `overall` or `domain:D0`.
    #[arg(long, default_value = "overall")]
    view: String,
    #[arg(long)]
    x: String,
    #[arg(long)]
    y: String,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Basis {
    ByA,
    ByTotal,
}

impl From<Basis> for RankBasis {
    fn from(b: Basis) -> Self {
        match b {
            Basis::ByA => RankBasis::ByA,
            Basis::ByTotal => RankBasis::ByTotal,
        }
    }
}

#[derive(Args)]
struct InstitutionArgs {
    #[arg(long, env = "SCIRANK_OUT", default_value = "scirank-out")]
    run: PathBuf,
    #[arg(long, default_value = "overall")]
    view: String,
    #[arg(long)]
    left: String,
    #[arg(long, value_enum, default_value_t = Basis::ByTotal)]
    left_basis: Basis,
    #[arg(long)]
    right: String,
    #[arg(long, value_enum, default_value_t = Basis::ByTotal)]
    right_basis: Basis,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    papers: usize,
    #[arg(long, default_value_t = 40)]
    authors: usize,
    #[arg(long, default_value_t = 5)]
    venues: usize,
    #[arg(long, default_value_t = 8)]
    institutions: usize,
    #[arg(long, default_value_t = 3)]
    domains: usize,
    #[arg(long, default_value_t = 4.0)]
    refs_per_paper: f64,
    #[arg(long, default_value_t = 1.0)]
    attachment_bias: f64,
    #[arg(long, default_value_t = 2.5)]
    coauthors_per_paper: f64,
    #[arg(long, default_value_t = 1990)]
    first_year: i32,
    #[arg(long, default_value_t = 2010)]
    last_year: i32,
    /// Papers per year grow across the span instead of staying flat.
    #[arg(long)]
    ramp: bool,
    #[arg(long, default_value_t = 0.2)]
    cross_domain_rate: f64,
}

fn run_config(a: &ComputeArgs) -> Result<RunConfig, Error> {
    let metrics = if a.metrics.is_empty() {
        MetricKind::ALL.to_vec()
    } else {
        a.metrics.iter().map(|m| m.parse()).collect::<Result<_, _>>()?
    };
    Ok(RunConfig {
        metrics,
        views: a.views.parse()?,
        scheme: a.scheme.parse::<GradingScheme>()?,
        cumulative_mode: if a.inclusive_cumulative {
            scirank::grading::CumulativeMode::Inclusive
        } else {
            scirank::grading::CumulativeMode::Exclusive
        },
        metric: MetricConfig {
            damping: a.damping,
            tolerance: a.tolerance,
            max_iterations: a.max_iterations,
            connections_mode: match a.connections {
                ConnMode::Weighted => ConnectionsMode::Weighted,
                ConnMode::Binary => ConnectionsMode::Binary,
            },
            connections_self_loops: if a.connections_self_loops {
                SelfLoops::Include
            } else {
                SelfLoops::Exclude
            },
            exposure_mix: a.exposure_mix,
            self_citation_policy: if a.exclude_self_citations {
                SelfCitationPolicy::Exclude
            } else {
                SelfCitationPolicy::Keep
            },
        },
        threads: a.threads,
    })
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Compute(a) => {
            let cfg = run_config(&a)?;
            let manifest = pipeline::compute(&a.input, &a.out, &cfg)?;
            for w in &manifest.warnings {
                eprintln!("warning: {w}");
            }
            eprintln!(
                "wrote {} view(s) to {} (config {})",
                manifest.views.len(),
                a.out.display(),
                &manifest.config_fingerprint[..12]
            );
        }
        Command::Query(a) => {
            let text = if a.institution {
                pipeline::query_institutions(&a.run, &a.ids)?
            } else {
                pipeline::query_authors(&a.run, &a.ids)?
            };
            print!("{text}");
        }
        Command::Compare(a) => {
            let manifest = Manifest::read(&a.run)?;
            let x = load_ranking(&a.run, &manifest, &a.view, a.x.parse()?)?;
            let y = load_ranking(&a.run, &manifest, &a.view, a.y.parse()?)?;
            let ds = similarity_scatter(&x, &y)?;
            pipeline::emit(a.output.as_ref(), |w| export::write_scatter(w, &ds))?;
        }
        Command::Institutions(a) => {
            let manifest = Manifest::read(&a.run)?;
            let lk: MetricKind = a.left.parse()?;
            let rk: MetricKind = a.right.parse()?;
            let left = load_institutions(&a.run, &manifest, &a.view, lk)?;
            let right = load_institutions(&a.run, &manifest, &a.view, rk)?;
            let cmp = compare_rankings(&left, a.left_basis.into(), &right, a.right_basis.into())?;
            let label = |k: MetricKind, b: Basis| match b {
                Basis::ByA => format!("{k} rank by A"),
                Basis::ByTotal => format!("{k} rank by total"),
            };
            let (ll, rl) = (label(lk, a.left_basis), label(rk, a.right_basis));
            pipeline::emit(a.output.as_ref(), |w| export::write_paired_ranks(w, &ll, &rl, &cmp.rows))?;
            match cmp.spearman {
                Some(r) => eprintln!("spearman {r}"),
                None => eprintln!("spearman undefined (constant ranks)"),
            }
        }
        Command::Validate(a) => {
            let (corpus, report) = load_corpus(&CorpusPaths::in_dir(&a.input))?;
            eprintln!(
                "{} papers, {} authors, {} venues, {} institutions, {} domains",
                corpus.n_papers(),
                corpus.n_authors(),
                corpus.n_venues(),
                corpus.n_institutions(),
                corpus.domain_ids().len()
            );
            println!("{}", serde_json::to_string_pretty(&report).map_err(Error::from)?);
        }
        Command::Synth(a) => {
            let cfg = SynthConfig {
                seed: a.seed,
                n_papers: a.papers,
                n_authors: a.authors,
                n_venues: a.venues,
                n_institutions: a.institutions,
                n_domains: a.domains,
                refs_per_paper: a.refs_per_paper,
                attachment_bias: a.attachment_bias,
                coauthors_per_paper: a.coauthors_per_paper,
                year_span: (a.first_year, a.last_year),
                year_profile: if a.ramp { YearProfile::LinearRamp } else { YearProfile::Uniform },
                cross_domain_rate: a.cross_domain_rate,
            };
            let corpus = generate(&cfg)?;
            write_corpus_tsv(&corpus, &a.out)?;
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidConfig(_) => EXIT_USAGE,
        Error::EmptyOperator | Error::Singular => EXIT_INTERNAL,
        _ => EXIT_DATA,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
