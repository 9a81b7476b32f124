//! Run-configuration front end: parameter maps in, deterministic JSON
//! reports and trace CSVs out. The `stabkit` binary is a thin argument
//! parser over [`run`].

use std::collections::BTreeMap;
use std::path::PathBuf;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::beam;
use crate::core::{
    correction_split, dissipation_residual, evolve, EvolveMode, Trajectory,
};
use crate::hybrid1d;
use crate::schrodinger;
use crate::thermo;

pub const SCHEMA: &str = "stabkit-report/1";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: field `{field}`: {message}")]
    ConfigInvalid { field: String, message: String },
    #[error("{context}: {source}")]
    Module {
        context: String,
        #[source]
        source: Box<dyn std::error::Error + Send + Sync>,
    },
}

fn module_err<E: std::error::Error + Send + Sync + 'static>(
    context: &str,
) -> impl FnOnce(E) -> CliError + '_ {
    move |e| CliError::Module {
        context: context.to_string(),
        source: Box::new(e),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExampleKind {
    Beam,
    Thermo,
    Hybrid1d,
    Schrodinger,
}

impl ExampleKind {
    pub fn name(self) -> &'static str {
        match self {
            ExampleKind::Beam => "beam",
            ExampleKind::Thermo => "thermo",
            ExampleKind::Hybrid1d => "hybrid1d",
            ExampleKind::Schrodinger => "schrodinger",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Spectrum,
    Simulate,
    Observability,
    Transfer,
    Decay,
    Split,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Spectrum => "spectrum",
            CommandKind::Simulate => "simulate",
            CommandKind::Observability => "observability",
            CommandKind::Transfer => "transfer",
            CommandKind::Decay => "decay",
            CommandKind::Split => "split",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// One run: example, command, parameter map, output target.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub example: ExampleKind,
    pub command: CommandKind,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default = "default_format")]
    pub format: OutputFormat,
}

fn default_format() -> OutputFormat {
    OutputFormat::Json
}

impl RunConfig {
    pub fn new(example: ExampleKind, command: CommandKind) -> Self {
        RunConfig {
            example,
            command,
            params: BTreeMap::new(),
            out: None,
            format: OutputFormat::Json,
        }
    }

    pub fn with_param(mut self, key: &str, value: Value) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    /// Later maps win: file values first, flag values second.
    pub fn merge_params(&mut self, layers: &[&BTreeMap<String, Value>]) {
        for layer in layers {
            for (k, v) in layer.iter() {
                self.params.insert(k.clone(), v.clone());
            }
        }
    }
}

/// Outcome of one run: the machine report, an optional trace and the exit
/// status contract (0 pass, 1 error, 2 failed assertion).
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub report: Value,
    pub trace_csv: Option<String>,
}

struct Params<'a>(&'a BTreeMap<String, Value>);

impl<'a> Params<'a> {
    fn f64_opt(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v.as_f64().map(Some).ok_or_else(|| CliError::ConfigInvalid {
                field: key.to_string(),
                message: format!("expected a number, got {v}"),
            }),
        }
    }

    fn f64(&self, key: &str, default: f64) -> Result<f64, CliError> {
        Ok(self.f64_opt(key)?.unwrap_or(default))
    }

    fn f64_required(&self, key: &str) -> Result<f64, CliError> {
        self.f64_opt(key)?.ok_or_else(|| CliError::ConfigInvalid {
            field: key.to_string(),
            message: "required parameter is missing".to_string(),
        })
    }

    fn usize(&self, key: &str, default: usize) -> Result<usize, CliError> {
        match self.f64_opt(key)? {
            None => Ok(default),
            Some(v) if v >= 0.0 && v.fract() == 0.0 => Ok(v as usize),
            Some(v) => Err(CliError::ConfigInvalid {
                field: key.to_string(),
                message: format!("expected a nonnegative integer, got {v}"),
            }),
        }
    }

    fn positive(&self, key: &str, value: f64) -> Result<f64, CliError> {
        if value > 0.0 {
            Ok(value)
        } else {
            Err(CliError::ConfigInvalid {
                field: key.to_string(),
                message: format!("must be positive, got {value}"),
            })
        }
    }

    fn string(&self, key: &str, default: &str) -> Result<String, CliError> {
        match self.0.get(key) {
            None => Ok(default.to_string()),
            Some(Value::String(s)) => Ok(s.clone()),
            Some(v) => Err(CliError::ConfigInvalid {
                field: key.to_string(),
                message: format!("expected a string, got {v}"),
            }),
        }
    }
}

fn configure_threads() {
    static ONCE: std::sync::Once = std::sync::Once::new();
    ONCE.call_once(|| {
        if let Ok(s) = std::env::var("STABKIT_THREADS") {
            if let Ok(n) = s.parse::<usize>() {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n.max(1))
                    .build_global();
            }
        }
    });
}

/// Execute a run configuration and assemble its report.
pub fn run(config: &RunConfig) -> Result<RunOutcome, CliError> {
    configure_threads();
    let p = Params(&config.params);
    let (results, tags, pass, trace, provenance) = match (config.example, config.command) {
        (ExampleKind::Beam, CommandKind::Spectrum) => beam_spectrum(&p)?,
        (ExampleKind::Beam, CommandKind::Simulate) => beam_simulate(&p)?,
        (ExampleKind::Beam, CommandKind::Observability) => beam_observability(&p)?,
        (ExampleKind::Beam, CommandKind::Decay) => beam_decay(&p)?,
        (ExampleKind::Beam, CommandKind::Split) => beam_split(&p)?,
        (ExampleKind::Thermo, CommandKind::Spectrum) => thermo_spectrum(&p)?,
        (ExampleKind::Thermo, CommandKind::Simulate) => thermo_simulate(&p)?,
        (ExampleKind::Thermo, CommandKind::Observability) => thermo_observability_cmd(&p)?,
        (ExampleKind::Thermo, CommandKind::Decay) => thermo_decay(&p)?,
        (ExampleKind::Thermo, CommandKind::Split) => thermo_split(&p)?,
        (ExampleKind::Hybrid1d, CommandKind::Spectrum) => hybrid_spectrum(&p)?,
        (ExampleKind::Hybrid1d, CommandKind::Simulate) => hybrid_simulate(&p)?,
        (ExampleKind::Hybrid1d, CommandKind::Observability) => hybrid_observability_cmd(&p)?,
        (ExampleKind::Hybrid1d, CommandKind::Decay) => hybrid_decay(&p)?,
        (ExampleKind::Hybrid1d, CommandKind::Split) => hybrid_split(&p)?,
        (ExampleKind::Schrodinger, CommandKind::Spectrum) => schro_spectrum_cmd(&p)?,
        (ExampleKind::Schrodinger, CommandKind::Simulate) => schro_simulate(&p)?,
        (ExampleKind::Schrodinger, CommandKind::Observability) => schro_observability_cmd(&p)?,
        (ExampleKind::Schrodinger, CommandKind::Transfer) => schro_transfer(&p)?,
        (ExampleKind::Schrodinger, CommandKind::Decay) => schro_decay(&p)?,
        (ExampleKind::Schrodinger, CommandKind::Split) => {
            return Err(CliError::ConfigInvalid {
                field: "command".to_string(),
                message: "split requires a bounded damping channel; the point-damped \
                          system is out of its scope"
                    .to_string(),
            })
        }
        (e, CommandKind::Transfer) => {
            return Err(CliError::ConfigInvalid {
                field: "command".to_string(),
                message: format!("transfer is not defined for example `{}`", e.name()),
            })
        }
    };

    let report = json!({
        "schema": SCHEMA,
        "example": config.example.name(),
        "command": config.command.name(),
        "params": Value::Object(config.params.clone().into_iter().collect()),
        "results": results,
        "pass": pass,
        "tags": tags,
        "provenance": provenance,
    });
    let exit_code = match pass {
        Some(false) => 2,
        _ => 0,
    };
    Ok(RunOutcome {
        exit_code,
        report,
        trace_csv: trace,
    })
}

type CommandOutput = (Value, Vec<&'static str>, Option<bool>, Option<String>, Value);

fn provenance(dt: Option<f64>, n: usize) -> Value {
    json!({
        "dt": dt,
        "n": n,
        "tool_version": env!("CARGO_PKG_VERSION"),
    })
}

/// Trace CSV with the fixed `(t, E, dissipation)` column contract.
pub fn trace_to_csv(traj: &Trajectory) -> String {
    let mut out = String::from("t,E,dissipation\n");
    for i in 0..traj.times.len() {
        out.push_str(&format!(
            "{:.12e},{:.12e},{:.12e}\n",
            traj.times[i], traj.energies[i], traj.dissipation[i]
        ));
    }
    out
}

fn energy_law_results(traj: &Trajectory, identity_tol: f64) -> (Value, bool) {
    let e0 = traj.energies[0];
    let residual = dissipation_residual(traj);
    let mut nonincreasing = true;
    for w in traj.energies.windows(2) {
        if w[1] > w[0] + 1e-9 * e0 {
            nonincreasing = false;
        }
    }
    let pass = nonincreasing && residual <= identity_tol * e0;
    (
        json!({
            "initial_energy": e0,
            "final_energy": traj.energies.last(),
            "identity_residual": residual,
            "identity_residual_relative": residual / e0,
            "identity_tolerance": identity_tol,
            "nonincreasing": nonincreasing,
        }),
        pass,
    )
}

// ---- beam ----------------------------------------------------------------

fn beam_spectrum(p: &Params) -> Result<CommandOutput, CliError> {
    let kmin = p.usize("kmin", 3)?;
    let kmax = p.usize("kmax", 40)?;
    let ctx = "beam spectrum";
    let spectrum = beam::beam_eigenvalues(kmin, kmax).map_err(module_err(ctx))?;
    let rows: Vec<Value> = spectrum
        .modes
        .iter()
        .map(|m| {
            let pi = std::f64::consts::PI;
            // the asymptotic model only speaks above the bracket regime
            let asymptote = if m.k >= 1 {
                json!(pi / 2.0 + m.k as f64 * pi + 1.0 / (m.k as f64 * pi).powi(3))
            } else {
                Value::Null
            };
            json!({
                "k": m.k,
                "sqrt_mu": m.z,
                "mu": m.mu,
                "asymptote": asymptote,
                "residual": m.asymptotic_residual,
                "char_residual": m.char_residual,
                "eta": m.eta,
                "k4_eta2": (m.k as f64).powi(4) * m.eta * m.eta,
                "z4_eta2": m.z.powi(4) * m.eta * m.eta,
            })
        })
        .collect();
    let results = json!({
        "modes": rows,
        "gap": spectrum.gap,
        "zero_mode_eta": spectrum.zero_eta,
    });
    Ok((
        results,
        vec!["cheqb", "tylb", "etab"],
        None,
        None,
        provenance(None, kmax),
    ))
}

fn beam_trajectory(p: &Params) -> Result<(Trajectory, usize, f64), CliError> {
    let modes = p.usize("modes", 16)?;
    let beta = p.f64("beta", 1.0)?;
    let tmax = p.positive("tmax", p.f64("tmax", 30.0)?)?;
    let dt = p.positive("dt", p.f64("dt", tmax / 3000.0)?)?;
    let ctx = "beam simulate";
    let gen = beam::beam_generator(modes, beta).map_err(module_err(ctx))?;
    let dim = gen.dim();
    let mut z0 = ndarray::Array1::<C64>::zeros(dim);
    for j in 0..dim {
        let mu = gen.skew()[[j, j]].im.abs();
        z0[j] = C64::new(1.0 / (1.0 + mu.powf(1.5)), 0.0);
    }
    let norm = gen.norm(&z0);
    z0.mapv_inplace(|x| x / norm);
    let traj = evolve(&gen, &z0, dt, tmax, EvolveMode::Damped).map_err(module_err(ctx))?;
    Ok((traj, modes, dt))
}

fn beam_simulate(p: &Params) -> Result<CommandOutput, CliError> {
    let (traj, modes, dt) = beam_trajectory(p)?;
    let (results, pass) = energy_law_results(&traj, 1e-6);
    Ok((
        results,
        vec!["en", "est1", "Eprime"],
        Some(pass),
        Some(trace_to_csv(&traj)),
        provenance(Some(dt), modes),
    ))
}

fn beam_observability(p: &Params) -> Result<CommandOutput, CliError> {
    let modes = p.usize("modes", 16)?;
    let horizon = p.f64("horizon", 4.0)?;
    let order = p.f64("weight_order", -1.0)?;
    let ctx = "beam observability";
    let rep = beam::beam_observability_weighted(modes, horizon, order).map_err(module_err(ctx))?;
    let pass = rep.constant > 0.0;
    Ok((
        serde_json::to_value(&rep).unwrap(),
        vec!["obsbeam", "obs", "ob1be"],
        Some(pass),
        None,
        provenance(None, modes),
    ))
}

fn beam_decay(p: &Params) -> Result<CommandOutput, CliError> {
    let modes = p.usize("modes", 32)?;
    let beta = p.f64("beta", 1.0)?;
    let tmax = p.f64("tmax", 200.0)?;
    let init = match p.string("init", "mixed")?.as_str() {
        "mixed" => beam::BeamInit::Mixed { power: 1.5 },
        "zero-mode" => beam::BeamInit::ZeroModeOnly,
        other => {
            return Err(CliError::ConfigInvalid {
                field: "init".to_string(),
                message: format!("unknown initial data `{other}`"),
            })
        }
    };
    let ctx = "beam decay";
    let out = beam::beam_decay_experiment(modes, beta, init, tmax).map_err(module_err(ctx))?;
    let pass = out.report.pass;
    Ok((
        serde_json::to_value(&out).unwrap(),
        vec!["dpex", "dp2"],
        Some(pass),
        None,
        provenance(Some(tmax / 4000.0), modes),
    ))
}

fn beam_split(p: &Params) -> Result<CommandOutput, CliError> {
    let modes = p.usize("modes", 16)?;
    let beta = p.f64("beta", 1.0)?;
    let horizon = p.f64("horizon", 4.0)?;
    let ctx = "beam split";
    let gen = beam::beam_generator(modes, beta).map_err(module_err(ctx))?;
    let dim = gen.dim();
    let mut z0 = ndarray::Array1::<C64>::zeros(dim);
    for j in 0..dim {
        let mu = gen.skew()[[j, j]].im.abs();
        z0[j] = C64::new(1.0 / (1.0 + mu), 0.0);
    }
    let rep = correction_split(&gen, &z0, horizon).map_err(module_err(ctx))?;
    let pass = rep.ratio <= rep.bound * (1.0 + 1e-12);
    Ok((
        serde_json::to_value(&rep).unwrap(),
        vec!["est2"],
        Some(pass),
        None,
        provenance(None, modes),
    ))
}

// ---- thermo ---------------------------------------------------------------

fn thermo_spectrum(p: &Params) -> Result<CommandOutput, CliError> {
    let modes = p.usize("modes", 16)?;
    let alpha = p.positive("alpha", p.f64("alpha", 1.0)?)?;
    let beta = p.f64("beta", 1.0)?;
    let ctx = "thermo spectrum";
    let mut rows = Vec::new();
    let mut slowest = f64::NEG_INFINITY;
    for k in 1..=modes {
        let vals = thermo::thermo_block_eigenvalues(k, alpha, beta).map_err(module_err(ctx))?;
        let re_max = vals.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
        slowest = slowest.max(re_max);
        rows.push(json!({
            "k": k,
            "eigenvalues": vals.iter().map(|l| json!([l.re, l.im])).collect::<Vec<_>>(),
            "slowest_re": re_max,
        }));
    }
    let results = json!({"blocks": rows, "decay_rate_oracle": -2.0 * slowest});
    Ok((results, vec![], None, None, provenance(None, modes)))
}

fn thermo_simulate(p: &Params) -> Result<CommandOutput, CliError> {
    let modes = p.usize("modes", 16)?;
    let alpha = p.positive("alpha", p.f64("alpha", 1.0)?)?;
    let beta = p.f64("beta", 1.0)?;
    let tmax = p.positive("tmax", p.f64("tmax", 20.0)?)?;
    let dt = p.positive("dt", p.f64("dt", tmax / 3000.0)?)?;
    let ctx = "thermo simulate";
    let gen = thermo::thermo_generator(modes, alpha, beta).map_err(module_err(ctx))?;
    let mut z0 = thermo::thermo_state(modes, |k| {
        let s = (k * k) as f64 * std::f64::consts::PI * std::f64::consts::PI;
        let w = 1.0 / (1.0 + s.powf(0.75));
        (w / s, w, w)
    });
    let norm = gen.norm(&z0);
    z0.mapv_inplace(|x| x / norm);
    let traj = evolve(&gen, &z0, dt, tmax, EvolveMode::Damped).map_err(module_err(ctx))?;
    let (results, pass) = energy_law_results(&traj, 1e-6);
    Ok((
        results,
        vec!["en", "est1", "Eprime"],
        Some(pass),
        Some(trace_to_csv(&traj)),
        provenance(Some(dt), modes),
    ))
}

fn thermo_observability_cmd(p: &Params) -> Result<CommandOutput, CliError> {
    let modes = p.usize("modes", 16)?;
    let alpha = p.positive("alpha", p.f64("alpha", 1.0)?)?;
    let ctx = "thermo observability";
    let rep = thermo::thermo_observability(modes, alpha).map_err(module_err(ctx))?;
    let pass = rep.route_a > 0.0
        && rep.route_b.constant > 0.0
        && rep.route_a <= rep.route_b.constant * 1.1;
    Ok((
        serde_json::to_value(&rep).unwrap(),
        vec!["obsexp", "ObsUni"],
        Some(pass),
        None,
        provenance(None, modes),
    ))
}

fn thermo_decay(p: &Params) -> Result<CommandOutput, CliError> {
    let modes = p.usize("modes", 32)?;
    let alpha = p.positive("alpha", p.f64("alpha", 1.0)?)?;
    let beta = p.f64("beta", 1.0)?;
    let tmax = p.f64("tmax", 100.0)?;
    let ctx = "thermo decay";
    let out = thermo::thermo_decay_experiment(
        modes,
        alpha,
        beta,
        thermo::ThermoInit::Mixed { power: 0.75 },
        tmax,
    )
    .map_err(module_err(ctx))?;
    let rel = if out.oracle_rate > 0.0 {
        (out.report.rate_or_exponent - out.oracle_rate).abs() / out.oracle_rate
    } else {
        f64::INFINITY
    };
    let pass = out.report.pass && rel <= 0.10;
    let mut results = serde_json::to_value(&out).unwrap();
    results["oracle_relative_error"] = json!(rel);
    Ok((
        results,
        vec!["expexp", "exp1"],
        Some(pass),
        None,
        provenance(None, modes),
    ))
}

fn thermo_split(p: &Params) -> Result<CommandOutput, CliError> {
    let modes = p.usize("modes", 16)?;
    let alpha = p.positive("alpha", p.f64("alpha", 1.0)?)?;
    let beta = p.f64("beta", 1.0)?;
    let horizon = p.f64("horizon", thermo::thermo_horizon(alpha))?;
    let ctx = "thermo split";
    let gen = thermo::thermo_generator(modes, alpha, beta).map_err(module_err(ctx))?;
    let z0 = thermo::thermo_state(modes, |k| {
        let s = (k * k) as f64 * std::f64::consts::PI * std::f64::consts::PI;
        let w = 1.0 / (1.0 + k as f64 * k as f64);
        (w / s, w, w)
    });
    let rep = correction_split(&gen, &z0, horizon).map_err(module_err(ctx))?;
    let pass = rep.ratio <= rep.bound * (1.0 + 1e-12);
    Ok((
        serde_json::to_value(&rep).unwrap(),
        vec!["est2"],
        Some(pass),
        None,
        provenance(None, modes),
    ))
}

// ---- hybrid1d ---------------------------------------------------------

fn hybrid_grid_params(p: &Params) -> Result<(usize, f64, f64), CliError> {
    let n = p.usize("grid", 128)?;
    let a = p.positive("a", p.f64("a", 1.0)?)?;
    let b = p.f64("b", 1.0)?;
    Ok((n, a, b))
}

fn hybrid_spectrum(p: &Params) -> Result<CommandOutput, CliError> {
    let (n, a, b) = hybrid_grid_params(p)?;
    let ctx = "hybrid1d spectrum";
    let (_, gen) = hybrid1d::hybrid_assemble(n, a, b).map_err(module_err(ctx))?;
    let modes =
        crate::core::linalg::general_modes(&gen.damped()).map_err(module_err(ctx))?;
    let max_re = modes
        .eigenvalues
        .iter()
        .map(|l| l.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let eigs: Vec<Value> = modes
        .eigenvalues
        .iter()
        .map(|l| json!([l.re, l.im]))
        .collect();
    let results = json!({"eigenvalues": eigs, "max_real_part": max_re});
    Ok((
        results,
        vec![],
        Some(max_re <= 1e-9),
        None,
        provenance(None, n),
    ))
}

fn hybrid_simulate(p: &Params) -> Result<CommandOutput, CliError> {
    let (n, a, b) = hybrid_grid_params(p)?;
    let tmax = p.positive("tmax", p.f64("tmax", 30.0)?)?;
    let dt = p.positive("dt", p.f64("dt", tmax / 3000.0)?)?;
    let ctx = "hybrid1d simulate";
    let (grid, gen) = hybrid1d::hybrid_assemble(n, a, b).map_err(module_err(ctx))?;
    let z0 = hybrid1d::hybrid_state(
        &grid,
        |x| (0.5 * std::f64::consts::PI * x).sin(),
        |_| 0.0,
        0.0,
    );
    let traj = evolve(&gen, &z0, dt, tmax, EvolveMode::Damped).map_err(module_err(ctx))?;
    // grid-level identity tolerance
    let (results, pass) = energy_law_results(&traj, 1e-5);
    Ok((
        results,
        vec!["en", "est1", "Eprime"],
        Some(pass),
        Some(trace_to_csv(&traj)),
        provenance(Some(dt), n),
    ))
}

fn hybrid_observability_cmd(p: &Params) -> Result<CommandOutput, CliError> {
    let n = p.usize("grid", 64)?;
    let horizon = p.f64("horizon", 8.0)?;
    let order = p.f64("weight_order", -2.0)?;
    let ctx = "hybrid1d observability";
    let rep =
        hybrid1d::hybrid_observability_weighted(n, horizon, order).map_err(module_err(ctx))?;
    let pass = rep.constant > 0.0;
    Ok((
        serde_json::to_value(&rep).unwrap(),
        vec!["obser"],
        Some(pass),
        None,
        provenance(None, n),
    ))
}

fn hybrid_decay(p: &Params) -> Result<CommandOutput, CliError> {
    let (n, a, b) = hybrid_grid_params(p)?;
    let tmax = p.f64("tmax", 400.0)?;
    let init = match p.string("init", "smooth")?.as_str() {
        "smooth" => hybrid1d::HybridInit::SmoothSine,
        "struck" => hybrid1d::HybridInit::Struck,
        other => {
            return Err(CliError::ConfigInvalid {
                field: "init".to_string(),
                message: format!("unknown initial data `{other}`"),
            })
        }
    };
    let ctx = "hybrid1d decay";
    let out = hybrid1d::hybrid_decay_experiment(n, a, b, init, tmax).map_err(module_err(ctx))?;
    let pass = out.report.pass && out.energy_identity_residual <= 1e-5 * out.initial_energy;
    Ok((
        serde_json::to_value(&out).unwrap(),
        vec!["dpexb2"],
        Some(pass),
        None,
        provenance(Some(tmax / 4000.0), n),
    ))
}

fn hybrid_split(p: &Params) -> Result<CommandOutput, CliError> {
    let (n, a, b) = hybrid_grid_params(p)?;
    let horizon = p.f64("horizon", 4.0)?;
    let ctx = "hybrid1d split";
    let (grid, gen) = hybrid1d::hybrid_assemble(n, a, b).map_err(module_err(ctx))?;
    let z0 = hybrid1d::hybrid_state(
        &grid,
        |x| (0.5 * std::f64::consts::PI * x).sin(),
        |x| 0.3 * x * x,
        0.1,
    );
    let rep = correction_split(&gen, &z0, horizon).map_err(module_err(ctx))?;
    let pass = rep.ratio <= rep.bound * (1.0 + 1e-12);
    Ok((
        serde_json::to_value(&rep).unwrap(),
        vec!["est2"],
        Some(pass),
        None,
        provenance(None, n),
    ))
}

// ---- schrodinger -----------------------------------------------------

fn xi_param(p: &Params) -> Result<f64, CliError> {
    let xi = p.f64_required("xi")?;
    if !(xi > 0.0 && xi < 1.0) {
        return Err(CliError::ConfigInvalid {
            field: "xi".to_string(),
            message: format!("must lie strictly inside (0, 1), got {xi}"),
        });
    }
    Ok(xi)
}

fn subspace_param(p: &Params, default: &str) -> Result<schrodinger::Subspace, CliError> {
    match p.string("subspace", default)?.as_str() {
        "h1" => Ok(schrodinger::Subspace::H1),
        "h2" => Ok(schrodinger::Subspace::H2),
        "full" => Ok(schrodinger::Subspace::Full),
        other => Err(CliError::ConfigInvalid {
            field: "subspace".to_string(),
            message: format!("expected h1|h2|full, got `{other}`"),
        }),
    }
}

fn schro_spectrum_cmd(p: &Params) -> Result<CommandOutput, CliError> {
    let modes = p.usize("modes", 32)?;
    let xi = xi_param(p)?;
    let ctx = "schrodinger spectrum";
    let spectrum = schrodinger::schro_eigenvalues(modes, xi).map_err(module_err(ctx))?;
    let numeric_defect =
        schrodinger::verify_numeric_spectrum(modes, xi).map_err(module_err(ctx))?;
    let rows: Vec<Value> = spectrum
        .modes
        .iter()
        .map(|m| {
            json!({
                "k": m.k,
                "branch": m.branch,
                "mu": m.mu,
                "asymptotic_residual": m.asymptotic_residual,
                "cubic_residual": m.cubic_residual,
                "trace_at_xi": m.w_at_xi,
                "norm": m.norm,
            })
        })
        .collect();
    let results = json!({
        "modes": rows,
        "cross_branch_gap": schrodinger::cross_branch_gap(&spectrum),
        "numeric_match_defect": numeric_defect,
    });
    Ok((
        results,
        vec!["estm1", "estm2", "wkxi1", "wkxi2"],
        Some(numeric_defect <= 1e-6),
        None,
        provenance(None, modes),
    ))
}

fn schro_simulate(p: &Params) -> Result<CommandOutput, CliError> {
    let modes = p.usize("modes", 16)?;
    let xi = xi_param(p)?;
    let tmax = p.positive("tmax", p.f64("tmax", 25.0)?)?;
    let dt = p.positive("dt", p.f64("dt", tmax / 2500.0)?)?;
    let ctx = "schrodinger simulate";
    let gen = schrodinger::schro_generator(modes, xi).map_err(module_err(ctx))?;
    let spectrum = schrodinger::schro_eigenvalues(modes, xi).map_err(module_err(ctx))?;
    let basis = schrodinger::analytic_basis(modes, &spectrum, xi);
    let mut z0 = ndarray::Array1::<C64>::zeros(gen.dim());
    for j in 0..spectrum.modes.len() {
        let w = 1.0 / (1.0 + spectrum.modes[j].mu.abs().powf(1.5));
        for i in 0..gen.dim() {
            z0[i] += basis[[i, j]] * w;
        }
    }
    let norm = gen.norm(&z0);
    z0.mapv_inplace(|x| x / norm);
    let traj = evolve(&gen, &z0, dt, tmax, EvolveMode::Damped).map_err(module_err(ctx))?;
    let (results, pass) = energy_law_results(&traj, 1e-6);
    Ok((
        results,
        vec!["en", "est1", "Eprime"],
        Some(pass),
        Some(trace_to_csv(&traj)),
        provenance(Some(dt), modes),
    ))
}

fn schro_observability_cmd(p: &Params) -> Result<CommandOutput, CliError> {
    let modes = p.usize("modes", 32)?;
    let xi = xi_param(p)?;
    let subspace = subspace_param(p, "h1")?;
    let default_horizon = match subspace {
        schrodinger::Subspace::H1 => 12.0,
        schrodinger::Subspace::H2 => 3.0,
        schrodinger::Subspace::Full => 4.0,
    };
    let horizon = p.f64("horizon", default_horizon)?;
    let ctx = "schrodinger observability";
    let rep = schrodinger::schro_observability(modes, xi, subspace, horizon)
        .map_err(module_err(ctx))?;
    let pass = match subspace {
        schrodinger::Subspace::Full => None,
        _ => Some(rep.report.constant > 0.0),
    };
    Ok((
        serde_json::to_value(&rep).unwrap(),
        vec!["obd1", "obd2", "obd1bis"],
        pass,
        None,
        provenance(None, modes),
    ))
}

fn schro_transfer(p: &Params) -> Result<CommandOutput, CliError> {
    let xi = xi_param(p)?;
    let modes = p.usize("modes", 400)?;
    let beta = p.f64("beta", 1.0)?;
    let y_lo = p.f64("ylo", -100.0)?;
    let y_hi = p.f64("yhi", 100.0)?;
    let points = p.usize("points", 2001)?;
    let ctx = "schrodinger transfer";
    let scan = schrodinger::transfer_scan(xi, beta, y_lo, y_hi, points, modes)
        .map_err(module_err(ctx))?;
    // refinement check at a fixed probe frequency
    let probe = C64::new(beta, 1.0);
    let coarse = schrodinger::transfer_value(xi, probe, modes / 2).map_err(module_err(ctx))?;
    let fine = schrodinger::transfer_value(xi, probe, modes).map_err(module_err(ctx))?;
    let refinement = (coarse.w2 - fine.w2).norm();
    let w3 = schrodinger::w3_series(xi, C64::new(1.0, std::f64::consts::PI.powi(2) * 25.0), 4000)
        .map_err(module_err(ctx))?;
    let w3_bound_ok = w3.value.norm() <= 1.0 / 3.0 + w3.tail_bound;
    let pass = scan.max_modulus.is_finite() && refinement <= 1e-3 && w3_bound_ok;
    let results = json!({
        "scan": serde_json::to_value(&scan).unwrap(),
        "refinement_change": refinement,
        "w4_identity_residual": fine.w4_identity_residual,
        "w3_modulus_at_comparison_point": w3.value.norm(),
        "w3_bound": 1.0/3.0 + w3.tail_bound,
    });
    Ok((
        results,
        vec!["Transunbd", "estsin"],
        Some(pass),
        None,
        provenance(None, modes),
    ))
}

fn schro_decay(p: &Params) -> Result<CommandOutput, CliError> {
    let modes = p.usize("modes", 32)?;
    let xi = xi_param(p)?;
    let subspace = subspace_param(p, "h2")?;
    let tmax = p.f64("tmax", 500.0)?;
    let ctx = "schrodinger decay";
    let out = schrodinger::schro_decay_experiment(modes, xi, subspace, tmax)
        .map_err(module_err(ctx))?;
    let pass = match subspace {
        schrodinger::Subspace::Full => None,
        _ => Some(out.report.sup_ratio.is_finite() && out.leakage_max_fraction < 0.10),
    };
    Ok((
        serde_json::to_value(&out).unwrap(),
        vec!["dstab", "dstab2"],
        pass,
        None,
        provenance(Some(tmax / 2500.0), modes),
    ))
}

// ---- rendering --------------------------------------------------------

/// Deterministic human-readable rendering of a report: scalar leaves of the
/// `results` object in a two-column table, arrays summarized by length.
pub fn render_table(report: &Value) -> String {
    let mut out = String::new();
    let example = report["example"].as_str().unwrap_or("?");
    let command = report["command"].as_str().unwrap_or("?");
    out.push_str(&format!("stabkit {example} {command}\n"));
    out.push_str(&format!("{:<44} {}\n", "field", "value"));
    out.push_str(&format!("{:-<44} {:-<24}\n", "", ""));
    if let Some(results) = report.get("results") {
        flatten_into(&mut out, results, "");
    }
    if let Some(pass) = report.get("pass").and_then(Value::as_bool) {
        out.push_str(&format!("{:<44} {}\n", "pass", pass));
    }
    out
}

fn flatten_into(out: &mut String, value: &Value, prefix: &str) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let path = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten_into(out, v, &path);
            }
        }
        Value::Array(items) => {
            out.push_str(&format!("{:<44} [{} entries]\n", prefix, items.len()));
        }
        other => {
            out.push_str(&format!("{:<44} {}\n", prefix, other));
        }
    }
}
