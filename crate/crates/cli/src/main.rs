//! `ado`: command-line front end for the ADO solvers.

mod config;
mod error;
mod output;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use toml::Value;

use config::{
    BenchmarkConfig, ConvergeConfig, Mode, PhaseConfig, PhaseTableConfig, PlotKind, QuadConfig,
    RunConfig, Verbosity,
};
use error::CliError;

/// Overrides the configured output directory (but not `--out`).
const OUTPUT_DIR_ENV: &str = "ADO_OUTPUT_DIR";

#[derive(Parser)]
#[command(name = "ado", version, about = "Analytical discrete ordinates transport solvers")]
struct Cli {
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Extra plot-data tables to emit.
    #[arg(long = "plot", value_enum, global = true)]
    plots: Vec<PlotKind>,
    /// Log level, overriding the configuration.
    #[arg(long, value_enum, global = true)]
    verbosity: Option<Verbosity>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configuration file as written.
    Run { config: PathBuf },
    /// Slab solve.
    Solve1d { config: PathBuf },
    /// Nodal 2D solve.
    Solve2d { config: PathBuf },
    /// Reference solve for a solve1d or solve2d configuration.
    Oracle {
        config: PathBuf,
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Direction table and moment audit of a sphere quadrature.
    Quad {
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        order: usize,
    },
    /// Observed orders and extrapolated values from an `h,value` CSV.
    Converge {
        #[arg(long)]
        input: PathBuf,
    },
    /// Built-in benchmark problem.
    Benchmark {
        name: String,
        #[arg(long)]
        sigma_s: f64,
        /// `scheme:order`.
        #[arg(long, default_value = "lqn:4")]
        quad: String,
        /// `HxK` regions.
        #[arg(long, default_value = "2x2", value_parser = parse_mesh)]
        mesh: [usize; 2],
    },
    /// Phase function samples over the scattering angle.
    Phase {
        #[arg(long, conflicts_with = "coefficients", requires = "order")]
        g: Option<f64>,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        coefficients: Option<Vec<f64>>,
        #[arg(long, default_value_t = 181)]
        points: usize,
    },
}

fn parse_mesh(s: &str) -> Result<[usize; 2], String> {
    let bad = || format!("mesh `{s}` is not of the form HxK");
    let (h, k) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok([h.trim().parse().map_err(|_| bad())?, k.trim().parse().map_err(|_| bad())?])
}

fn blank(mode: Mode) -> RunConfig {
    RunConfig {
        mode: Some(mode),
        output: Default::default(),
        slab: None,
        nodal: None,
        oracle: None,
        quad: None,
        converge: None,
        benchmark: None,
        phase: None,
        run: None,
    }
}

/// Reads `h,value` rows; a non-numeric first row is taken as a header.
fn read_series(path: &Path) -> Result<ConvergeConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let (mut h, mut values) = (Vec::new(), Vec::new());
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| CliError::schema(format!("{}: {e}", path.display())))?;
        let field = |j: usize| rec.get(j).and_then(|s| s.parse::<f64>().ok());
        match (field(0), field(1), rec.len()) {
            (Some(a), Some(b), 2) => {
                h.push(a);
                values.push(b);
            }
            _ if i == 0 => {}
            _ => {
                return Err(CliError::schema(format!(
                    "{}: row {} is not an `h,value` pair",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    Ok(ConvergeConfig { h, values })
}

fn build_config(cmd: Command) -> Result<RunConfig, CliError> {
    let with_mode = |path: &Path, mode: Mode| -> Result<RunConfig, CliError> {
        let mut c = RunConfig::load(path)?;
        c.mode = Some(mode);
        Ok(c)
    };
    Ok(match cmd {
        Command::Run { config } => RunConfig::load(&config)?,
        Command::Solve1d { config } => with_mode(&config, Mode::Solve1d)?,
        Command::Solve2d { config } => with_mode(&config, Mode::Solve2d)?,
        Command::Oracle { config, resolution } => {
            let mut c = RunConfig::load(&config)?;
            c.mode = Some(match (c.mode, &c.slab, &c.nodal) {
                (Some(Mode::Solve1d | Mode::Oracle1d), ..) | (None, Some(_), None) => Mode::Oracle1d,
                (Some(Mode::Solve2d | Mode::Oracle2d), ..) | (None, None, Some(_)) => Mode::Oracle2d,
                _ => {
                    return Err(CliError::schema(
                        "oracle needs a solve1d or solve2d configuration",
                    ))
                }
            });
            if let Some(n) = resolution {
                c.oracle.get_or_insert_with(Default::default).resolution = n;
            }
            c
        }
        Command::Quad { scheme, order } => RunConfig {
            quad: Some(QuadConfig { scheme, order }),
            ..blank(Mode::Quad)
        },
        Command::Converge { input } => RunConfig {
            converge: Some(read_series(&input)?),
            ..blank(Mode::Converge)
        },
        Command::Benchmark {
            name,
            sigma_s,
            quad,
            mesh,
        } => RunConfig {
            benchmark: Some(BenchmarkConfig {
                name,
                sigma_s,
                quadrature: quad,
                mesh,
            }),
            ..blank(Mode::Benchmark)
        },
        Command::Phase {
            g,
            order,
            coefficients,
            points,
        } => RunConfig {
            phase: Some(PhaseTableConfig {
                law: PhaseConfig { g, order, coefficients },
                points,
            }),
            ..blank(Mode::Phase)
        },
    })
}

fn output_dir(cli_out: Option<PathBuf>, configured: &str) -> PathBuf {
    cli_out
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(configured))
}

fn main_inner(cli: Cli) -> Result<Vec<PathBuf>, CliError> {
    let mut cfg = build_config(cli.command)?;
    cfg.run = None;
    for kind in cli.plots {
        if !cfg.output.plots.contains(&kind) {
            cfg.output.plots.push(kind);
        }
    }
    let dir = output_dir(cli.out, &cfg.output.dir);
    cfg.output.dir = dir.to_string_lossy().into_owned();

    let level = cli.verbosity.unwrap_or(cfg.output.verbosity).level();
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();

    let start = Instant::now();
    let outcome = run::execute(&cfg)?;
    let elapsed = start.elapsed().as_secs_f64();

    let mut files: Vec<(String, Vec<u8>)> =
        outcome.tables.iter().map(|t| (t.name.clone(), t.to_csv())).collect();
    let mut record = toml::Table::new();
    record.insert("tool".into(), Value::from("ado"));
    record.insert("version".into(), Value::from(env!("CARGO_PKG_VERSION")));
    record.insert("core_version".into(), Value::from(ado_core::VERSION));
    record.insert("wall_time_s".into(), Value::from(elapsed));
    record.insert(
        "files".into(),
        Value::from(files.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>()),
    );
    record.insert("diagnostics".into(), Value::Table(outcome.diagnostics));
    let mut manifest = cfg.clone();
    manifest.run = Some(record);
    files.push(("manifest.toml".into(), manifest.to_toml().into_bytes()));

    output::write_all(&dir, &files)?;
    Ok(files.iter().map(|(n, _)| dir.join(n)).collect())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::from(e.exit_code())
        }
    }
}
