use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use stabkit::cli::{
    render_table, run, CliError, CommandKind, ExampleKind, OutputFormat, RunConfig,
};

/// Spectral and energy-decay diagnostics for dynamically damped evolution
/// systems.
#[derive(Parser)]
#[command(name = "stabkit", version, about)]
struct Cli {
    /// Flat JSON file with default parameters; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output path for the report (JSON) or trace (CSV).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    #[command(subcommand)]
    example: ExampleCli,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum ExampleCli {
    /// Beam with a scalar dynamic boundary channel.
    Beam {
        #[command(subcommand)]
        cmd: CommandCli,
    },
    /// Coupled fourth-order system with distributed damping.
    Thermo {
        #[command(subcommand)]
        cmd: CommandCli,
    },
    /// String with a boundary mass and damper (grid realization).
    Hybrid1d {
        #[command(subcommand)]
        cmd: CommandCli,
    },
    /// Wave/Schrodinger pair with interior point damping.
    Schrodinger {
        #[command(subcommand)]
        cmd: CommandCli,
    },
}

#[derive(Subcommand)]
enum CommandCli {
    /// Eigenvalue tables and asymptotic residuals.
    Spectrum(ParamFlags),
    /// Damped run with the energy-identity certificate and a trace.
    Simulate(ParamFlags),
    /// Weighted observability constant of the undamped flow.
    Observability(ParamFlags),
    /// Laplace-domain response scan along a vertical line.
    Transfer(ParamFlags),
    /// Decay-law fit of a damped run.
    Decay(ParamFlags),
    /// Correction ratio against its a-priori bound.
    Split(ParamFlags),
}

#[derive(Args)]
struct ParamFlags {
    /// Number of modal components.
    #[arg(long)]
    modes: Option<usize>,
    /// Number of grid cells (grid examples).
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    kmin: Option<usize>,
    #[arg(long)]
    kmax: Option<usize>,
    /// Sample spacing of trajectories.
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    tmax: Option<f64>,
    /// Observation horizon T.
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Boundary mass (grid example).
    #[arg(long)]
    a: Option<f64>,
    /// Boundary damping constant (grid example).
    #[arg(long)]
    b: Option<f64>,
    /// Observation point in (0, 1).
    #[arg(long)]
    xi: Option<f64>,
    /// Spectral weight order s of the comparison norm.
    #[arg(long = "weight-order")]
    weight_order: Option<f64>,
    /// h1 | h2 | full.
    #[arg(long)]
    subspace: Option<String>,
    /// Named initial data (mixed | zero-mode).
    #[arg(long)]
    init: Option<String>,
    /// Grid points of the transfer scan.
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    ylo: Option<f64>,
    #[arg(long)]
    yhi: Option<f64>,
}

impl ParamFlags {
    fn to_map(&self) -> BTreeMap<String, Value> {
        let floats: [(&str, Option<f64>); 11] = [
            ("dt", self.dt),
            ("tmax", self.tmax),
            ("horizon", self.horizon),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("a", self.a),
            ("b", self.b),
            ("xi", self.xi),
            ("weight_order", self.weight_order),
            ("ylo", self.ylo),
            ("yhi", self.yhi),
        ];
        let integers: [(&str, Option<usize>); 5] = [
            ("modes", self.modes),
            ("grid", self.grid),
            ("kmin", self.kmin),
            ("kmax", self.kmax),
            ("points", self.points),
        ];
        let mut map = BTreeMap::new();
        for (k, v) in floats {
            if let Some(v) = v {
                map.insert(k.to_string(), json!(v));
            }
        }
        for (k, v) in integers {
            if let Some(v) = v {
                map.insert(k.to_string(), json!(v));
            }
        }
        if let Some(s) = &self.subspace {
            map.insert("subspace".to_string(), json!(s));
        }
        if let Some(s) = &self.init {
            map.insert("init".to_string(), json!(s));
        }
        map
    }
}

fn split_example(example: ExampleCli) -> (ExampleKind, CommandCli) {
    match example {
        ExampleCli::Beam { cmd } => (ExampleKind::Beam, cmd),
        ExampleCli::Thermo { cmd } => (ExampleKind::Thermo, cmd),
        ExampleCli::Hybrid1d { cmd } => (ExampleKind::Hybrid1d, cmd),
        ExampleCli::Schrodinger { cmd } => (ExampleKind::Schrodinger, cmd),
    }
}

fn split_command(cmd: CommandCli) -> (CommandKind, ParamFlags) {
    match cmd {
        CommandCli::Spectrum(p) => (CommandKind::Spectrum, p),
        CommandCli::Simulate(p) => (CommandKind::Simulate, p),
        CommandCli::Observability(p) => (CommandKind::Observability, p),
        CommandCli::Transfer(p) => (CommandKind::Transfer, p),
        CommandCli::Decay(p) => (CommandKind::Decay, p),
        CommandCli::Split(p) => (CommandKind::Split, p),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (example, cmd) = split_example(cli.example);
    let (command, flags) = split_command(cmd);

    let mut config = RunConfig::new(example, command);
    config.out = cli.out.clone();
    config.format = match cli.format {
        FormatArg::Csv => OutputFormat::Csv,
        FormatArg::Json => OutputFormat::Json,
    };

    let file_params: BTreeMap<String, Value> = match &cli.config {
        None => BTreeMap::new(),
        Some(path) => match std::fs::read_to_string(path)
            .map_err(|e| e.to_string())
            .and_then(|s| serde_json::from_str(&s).map_err(|e| e.to_string()))
        {
            Ok(map) => map,
            Err(e) => {
                eprintln!("error: cannot read config {}: {e}", path.display());
                return ExitCode::from(1);
            }
        },
    };
    config.merge_params(&[&file_params, &flags.to_map()]);

    let outcome = match run(&config) {
        Ok(o) => o,
        Err(CliError::ConfigInvalid { field, message }) => {
            eprintln!("error: invalid configuration: `{field}`: {message}");
            return ExitCode::from(1);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };

    let payload = match config.format {
        OutputFormat::Csv => outcome
            .trace_csv
            .clone()
            .unwrap_or_else(|| String::from("t,E,dissipation\n")),
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&outcome.report).unwrap();
            s.push('\n');
            s
        }
    };
    match &config.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, payload) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
            println!("{}", render_table(&outcome.report));
        }
        None => match config.format {
            OutputFormat::Csv => print!("{payload}"),
            OutputFormat::Json => {
                println!("{}", render_table(&outcome.report));
                print!("{payload}");
            }
        },
    }
    ExitCode::from(outcome.exit_code as u8)
}
