use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nearfield::sim::{cmd_beam_sweep, cmd_fraunhofer, cmd_schedule, OutputFormat, Scenario, SweepAxis, SweepSpec};
use nearfield::{Error, Model};

const EXIT_CONFIG: u8 = 2;
const EXIT_DOMAIN: u8 = 3;
const EXIT_IO: u8 = 1;

#[derive(Parser, Debug)]
#[command(name = "nearfield", version, about = "Near/far-field LOS channel experiments")]
struct Cli {
    /// Scenario file (flat TOML with Scenario field names).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(flatten)]
    overrides: ScenarioOverrides,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct ScenarioOverrides {
    #[arg(long, global = true, value_enum)]
    model: Option<ModelArg>,
    #[arg(long, global = true)]
    frequency_hz: Option<f64>,
    #[arg(long, global = true)]
    nx: Option<usize>,
    #[arg(long, global = true)]
    ny: Option<usize>,
    #[arg(long, global = true)]
    element_side_over_lambda: Option<f64>,
    #[arg(long, global = true)]
    spacing_over_lambda: Option<f64>,
    #[arg(long, global = true)]
    quadrature_order: Option<usize>,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ModelArg {
    Exact,
    Near,
    Far,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum AxisArg {
    Z,
    Angle,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Normalized MF beam power of near and far models along a sweep.
    BeamSweep {
        #[arg(long, value_enum, default_value = "z")]
        axis: AxisArg,
        /// Sweep start: meters for `z`, degrees for `angle`.
        #[arg(long, allow_hyphen_values = true)]
        start: f64,
        #[arg(long, allow_hyphen_values = true)]
        stop: f64,
        #[arg(long, default_value_t = 200)]
        count: usize,
        /// Beam focus as `x,y,z` in meters.
        #[arg(long, value_parser = parse_point, default_value = "0,0,0.1")]
        focus: [f64; 3],
        /// Arc radius for `angle` sweeps; defaults to the focus distance.
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Greedy SIR-constrained selection of users on the Z axis.
    Schedule {
        #[arg(long, default_value_t = 100)]
        k: usize,
        #[arg(long, default_value_t = 0.1)]
        d_min: f64,
        #[arg(long, default_value_t = 10.0)]
        d_max: f64,
        #[arg(long, default_value_t = 18.0)]
        gamma_db: f64,
    },
    /// Fraunhofer distance and near/far gaps around it.
    Fraunhofer,
}

fn parse_point(text: &str) -> Result<[f64; 3], String> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    <[f64; 3]>::try_from(parts).map_err(|p| format!("expected x,y,z, got {} values", p.len()))
}

fn resolve_scenario(cli: &Cli) -> Result<Scenario, Error> {
    let mut s = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config {
                    field: "config".into(),
                    reason: format!("{}: {e}", path.display()),
                })?;
            Scenario::from_toml_str(&text)?
        }
        None => Scenario::default(),
    };
    let o = &cli.overrides;
    if let Some(m) = o.model {
        s.model = match m {
            ModelArg::Exact => Model::Exact,
            ModelArg::Near => Model::Near,
            ModelArg::Far => Model::Far,
        };
    }
    if let Some(v) = o.frequency_hz {
        s.frequency_hz = v;
    }
    if let Some(v) = o.nx {
        s.nx = v;
    }
    if let Some(v) = o.ny {
        s.ny = v;
    }
    if let Some(v) = o.element_side_over_lambda {
        s.element_side_over_lambda = v;
    }
    if let Some(v) = o.spacing_over_lambda {
        s.spacing_over_lambda = v;
    }
    if let Some(v) = o.quadrature_order {
        s.quadrature_order = v;
    }
    s.validate()?;
    Ok(s)
}

enum Failure {
    Model(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Model(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let scenario = resolve_scenario(cli)?;
    let mut out: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let format = |default: OutputFormat| match cli.format {
        Some(Format::Csv) => OutputFormat::Csv,
        Some(Format::Json) => OutputFormat::Json,
        None => default,
    };
    match &cli.command {
        Command::BeamSweep {
            axis,
            start,
            stop,
            count,
            focus,
            radius,
        } => {
            let sweep = SweepSpec {
                axis: match axis {
                    AxisArg::Z => SweepAxis::Z,
                    AxisArg::Angle => SweepAxis::Angle,
                },
                start: *start,
                stop: *stop,
                count: *count,
                focus: *focus,
                radius: *radius,
            };
            cmd_beam_sweep(&scenario, &sweep)?.write(&mut out, format(OutputFormat::Csv))?;
        }
        Command::Schedule { k, d_min, d_max, gamma_db } => {
            cmd_schedule(&scenario, *k, *d_min, *d_max, *gamma_db)?.write(&mut out, format(OutputFormat::Json))?;
        }
        Command::Fraunhofer => {
            cmd_fraunhofer(&scenario)?.write(&mut out, format(OutputFormat::Json))?;
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Model(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_domain() { EXIT_DOMAIN } else { EXIT_CONFIG })
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_IO)
        }
    }
}
