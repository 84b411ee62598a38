//! Command-line front end. Exit codes: 0 success, 1 domain error, 2 usage error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use circumplex_eval::ingest::{demographics_summary, filter_ccr, load_respondents, load_responses};
use circumplex_eval::pipeline::{run_study, AnalysisOptions, StudyResult};
use circumplex_eval::radar::{emit_radar, parse_selection, RadarFormat};
use circumplex_eval::report::{write_tables, TableFormat};
use circumplex_eval::synth::{generate, GeneratorSpec};
use circumplex_eval::StudyConfig;

const THREADS_ENV: &str = "CIRCUMPLEX_EVAL_THREADS";

#[derive(Parser)]
#[command(name = "circumplex-eval", version, about = "Score and test translations of soundscape PAQ attributes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the inputs and print the residence-filter summary.
    IngestCheck(Inputs),
    /// Print the respondent demographics table.
    Demographics {
        #[arg(long)]
        respondents: PathBuf,
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the full analysis and write the result tables.
    Analyze {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Significance level; defaults to the config's `alpha`.
        #[arg(long)]
        alpha: Option<f64>,
        /// Also test candidates on the pooled population.
        #[arg(long)]
        combined: bool,
    },
    /// Write radar-chart data for a candidate choice per attribute.
    Radar {
        #[command(flatten)]
        inputs: Inputs,
        /// `attribute=candidate[,attribute=candidate...]`
        #[arg(long)]
        select: String,
        /// Output file; the extension (.svg or .csv) picks the format.
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic survey.
    Synth {
        /// Overrides the spec's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Generator spec (TOML); defaults to the bundled study design.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Inputs {
    #[arg(long)]
    responses: PathBuf,
    #[arg(long)]
    respondents: PathBuf,
    #[arg(long)]
    config: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Md,
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .with_context(|| format!("{THREADS_ENV} must be a positive integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the thread pool")?;
    Ok(())
}

fn study(inputs: &Inputs, options: Option<AnalysisOptions>) -> Result<(StudyConfig, StudyResult)> {
    let config = StudyConfig::load(&inputs.config)?;
    let records = load_responses(&inputs.responses, &config)?;
    let respondents = load_respondents(&inputs.respondents)?;
    let options = options.unwrap_or_else(|| AnalysisOptions::from_config(&config));
    let result = run_study(&records, &respondents, &config, &options)?;
    Ok((config, result))
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    match cli.command {
        Command::IngestCheck(inputs) => {
            let config = StudyConfig::load(&inputs.config)?;
            let records = load_responses(&inputs.responses, &config)?;
            let respondents = load_respondents(&inputs.respondents)?;
            let (kept, _, report) = filter_ccr(&records, &respondents, &config)?;
            println!("{report}");
            println!("{} response records retained", kept.len());
        }
        Command::Demographics { respondents, config } => {
            let config = StudyConfig::load(&config)?;
            let respondents = load_respondents(&respondents)?;
            print!("{}", demographics_summary(&respondents, &config.country_whitelist)?.render_text());
        }
        Command::Analyze {
            inputs,
            out,
            format,
            alpha,
            combined,
        } => {
            let config = StudyConfig::load(&inputs.config)?;
            let options = AnalysisOptions {
                alpha: alpha.unwrap_or(config.alpha),
                combined,
            };
            let (_, result) = study(&inputs, Some(options))?;
            let format = match format {
                Format::Csv => TableFormat::Csv,
                Format::Md => TableFormat::Markdown,
            };
            let written = write_tables(&result, &out, format)?;
            println!("{}", result.exclusion);
            println!("{} attributes analyzed at alpha = {}", result.analyses.len(), result.alpha);
            for path in written {
                println!("wrote {}", path.display());
            }
        }
        Command::Radar { inputs, select, out } => {
            let format = radar_format(&out)?;
            let selection = parse_selection(&select)?;
            let (_, result) = study(&inputs, None)?;
            let doc = emit_radar(&result, &selection, format)?;
            write_file(&out, &doc)?;
            println!("wrote {}", out.display());
        }
        Command::Synth { seed, spec, out } => {
            let mut spec = match spec {
                Some(path) => GeneratorSpec::load(&path)?,
                None => GeneratorSpec::study_design(),
            };
            if let Some(seed) = seed {
                spec.seed = seed;
            }
            generate(&spec)?.write_to(&out)?;
            println!("wrote synthetic survey (seed {}) to {}", spec.seed, out.display());
        }
    }
    Ok(())
}

fn radar_format(path: &Path) -> Result<RadarFormat> {
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("svg") => Ok(RadarFormat::Svg),
        Some("csv") => Ok(RadarFormat::Csv),
        _ => bail!("radar output must end in .svg or .csv: {}", path.display()),
    }
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, body).with_context(|| format!("writing {}", path.display()))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            for cause in e.chain().skip(1) {
                eprintln!("  caused by: {cause}");
            }
            ExitCode::from(1)
        }
    }
}
