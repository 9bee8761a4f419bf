mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::SystemTime;

use clap::{Args, Parser, Subcommand, ValueEnum};
use isosho_core::figures::{self, FigureOptions, FigureTag};
use isosho_core::sweep::{self, LambdaGrid, MeasureReport, Spacing, CSV_COLUMNS};
use isosho_core::{verify, Error, Profile, SweepConfig};

use config::ConfigFile;

const EXIT_USAGE: u8 = 1;
const EXIT_NONCONVERGENCE: u8 = 2;
const EXIT_VERIFY: u8 = 3;

/// Isospectral oscillator states: parameter sweeps, figure data and self-verification.
///
/// The ISOSHO_PROFILE environment variable (strict, default, fast) selects the numerical
/// resolution profile.
#[derive(Debug, Parser)]
#[command(name = "isosho", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate measures on a (temperature, lambda) grid.
    Sweep,
    /// Emit the data behind one figure (isoSHO, GNONG, SqzFig, GNONC, TNONG, Squee, TQFI).
    Figure { tag: String },
    /// Run the acceptance checks.
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

#[derive(Debug, Default, Args)]
struct CommonArgs {
    /// key = value file; command-line flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true)]
    lambda_min: Option<f64>,
    #[arg(long, global = true)]
    lambda_max: Option<f64>,
    #[arg(long, global = true)]
    lambda_count: Option<usize>,
    /// Log spacing of the lambda grid (`--lambda-log false` for linear).
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    lambda_log: Option<bool>,
    /// Comma-separated temperatures; `ground` (or 0) is the ground state.
    #[arg(long, global = true)]
    temps: Option<String>,
    /// Comma-separated measures (moments, nong, fano, wigner, qcs, qfi, cfi) or `all`.
    #[arg(long, global = true)]
    measures: Option<String>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Omit the generation timestamp from CSV headers.
    #[arg(long, global = true)]
    no_timestamp: bool,
}

/// Command-line flags merged over the config file.
#[derive(Debug)]
struct Settings {
    out: Option<PathBuf>,
    format: Format,
    lambda_min: Option<f64>,
    lambda_max: Option<f64>,
    lambda_count: Option<usize>,
    lambda_log: Option<bool>,
    temps: Option<String>,
    measures: Option<String>,
    threads: Option<usize>,
    timestamp: bool,
    profile: Profile,
}

impl Settings {
    fn resolve(args: CommonArgs) -> isosho_core::Result<Self> {
        let file = match &args.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let format = match args.format {
            Some(f) => f,
            None => match file.get("format") {
                None => Format::Csv,
                Some(v) => Format::from_str(v, true).map_err(|_| Error::Config(format!("unknown format '{v}'")))?,
            },
        };
        let no_timestamp = args.no_timestamp || file.parsed::<bool>("no-timestamp")?.unwrap_or(false);
        Ok(Settings {
            out: args.out.or_else(|| file.get("out").map(PathBuf::from)),
            format,
            lambda_min: args.lambda_min.or(file.parsed("lambda-min")?),
            lambda_max: args.lambda_max.or(file.parsed("lambda-max")?),
            lambda_count: args.lambda_count.or(file.parsed("lambda-count")?),
            lambda_log: args.lambda_log.or(file.parsed("lambda-log")?),
            temps: args.temps.or_else(|| file.get("temps").map(str::to_string)),
            measures: args.measures.or_else(|| file.get("measures").map(str::to_string)),
            threads: args.threads.or(file.parsed("threads")?),
            timestamp: !no_timestamp,
            profile: Profile::from_env()?,
        })
    }

    /// The lambda grid with any overrides applied to `base`; `None` when nothing was given.
    fn lambda_grid(&self, base: LambdaGrid) -> Option<LambdaGrid> {
        if self.lambda_min.is_none()
            && self.lambda_max.is_none()
            && self.lambda_count.is_none()
            && self.lambda_log.is_none()
        {
            return None;
        }
        Some(LambdaGrid {
            min: self.lambda_min.unwrap_or(base.min),
            max: self.lambda_max.unwrap_or(base.max),
            count: self.lambda_count.unwrap_or(base.count),
            spacing: match self.lambda_log {
                Some(true) => Spacing::Log,
                Some(false) => Spacing::Linear,
                None => base.spacing,
            },
        })
    }

    fn header(&self) -> Vec<String> {
        let mut lines = vec![format!("profile: {}", self.profile.name)];
        if self.timestamp {
            lines.push(format!("generated: {}", humantime::format_rfc3339_seconds(SystemTime::now())));
        }
        lines
    }
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

fn write_output(settings: &Settings, text: &str) -> Result<(), Failure> {
    match &settings.out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout().lock().write_all(text.as_bytes()).map_err(|e| Failure::Usage(e.to_string())),
    }
}

fn jsonl<T: serde::Serialize>(rows: &[T]) -> Result<String, Failure> {
    let mut out = String::new();
    for r in rows {
        out.push_str(&serde_json::to_string(r).map_err(|e| Failure::Usage(e.to_string()))?);
        out.push('\n');
    }
    Ok(out)
}

fn sweep_text(settings: &Settings, config: &SweepConfig, rows: &[MeasureReport]) -> Result<String, Failure> {
    match settings.format {
        Format::Jsonl => jsonl(rows),
        Format::Csv => {
            let mut out = String::new();
            let grid = config.lambda;
            let mut header = vec!["isosho sweep".to_string()];
            header.extend(settings.header());
            header.push(format!(
                "lambda: {} to {}, {} points, {} spacing",
                grid.min,
                grid.max,
                grid.count,
                format!("{:?}", grid.spacing).to_lowercase()
            ));
            let measures: Vec<_> = config.measures.iter().map(|m| m.name()).collect();
            header.push(format!("measures: {}", measures.join(",")));
            for line in header {
                out.push_str(&format!("# {line}\n"));
            }
            out.push_str(&format!("# {}\n", CSV_COLUMNS.join(",")));
            for r in rows {
                out.push_str(&r.csv_row());
                out.push('\n');
            }
            Ok(out)
        }
    }
}

fn run_sweep_command(settings: &Settings) -> Result<u8, Failure> {
    let mut config = SweepConfig { profile: settings.profile, threads: settings.threads, ..SweepConfig::default() };
    if let Some(grid) = settings.lambda_grid(config.lambda) {
        config.lambda = grid;
    }
    if let Some(t) = &settings.temps {
        config.temperatures = sweep::parse_temperatures(t)?;
    }
    if let Some(m) = &settings.measures {
        config.measures = sweep::parse_measures(m)?;
    }
    config.validate()?;
    let rows = sweep::run_sweep(&config)?;
    write_output(settings, &sweep_text(settings, &config, &rows)?)?;
    let failed = rows.iter().filter(|r| r.has_failure()).count();
    if failed > 0 {
        log::warn!("{failed} cell(s) withheld values for non-convergence");
        return Ok(EXIT_NONCONVERGENCE);
    }
    Ok(0)
}

fn run_figure_command(settings: &Settings, tag: &str) -> Result<u8, Failure> {
    let tag: FigureTag = tag.parse()?;
    let opts = FigureOptions {
        lambda: settings.lambda_grid(tag.default_grid()),
        profile: settings.profile,
        threads: settings.threads,
    };
    if settings.temps.is_some() || settings.measures.is_some() {
        log::warn!("--temps and --measures are fixed by the figure and ignored");
    }
    let data = figures::figure(tag, &opts)?;
    let text = match settings.format {
        Format::Csv => data.to_csv(&settings.header()),
        Format::Jsonl => jsonl(&data.points)?,
    };
    write_output(settings, &text)?;
    if data.failed_cells > 0 {
        log::warn!("{} cell(s) withheld values for non-convergence", data.failed_cells);
        return Ok(EXIT_NONCONVERGENCE);
    }
    Ok(0)
}

fn run_verify_command(settings: &Settings) -> Result<u8, Failure> {
    let outcomes = verify::run_all();
    let text = match settings.format {
        Format::Csv => verify::render_report(&outcomes),
        Format::Jsonl => jsonl(&outcomes)?,
    };
    write_output(settings, &text)?;
    Ok(if outcomes.iter().all(|o| o.passed) { 0 } else { EXIT_VERIFY })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = Settings::resolve(cli.common).map_err(Failure::from).and_then(|settings| {
        if let Some(n) = settings.threads {
            if n == 0 {
                return Err(Failure::Usage("threads must be at least 1".into()));
            }
        }
        match &cli.command {
            Command::Sweep => run_sweep_command(&settings),
            Command::Figure { tag } => run_figure_command(&settings, tag),
            Command::Verify => run_verify_command(&settings),
        }
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_NONCONVERGENCE)
        }
    }
}
