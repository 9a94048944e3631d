//! Command-line front end: configuration loading, the five subcommands, CSV
//! and JSON artifacts, and gnuplot-script emission.
//!
//! Precedence: built-in defaults < `--config` file < command-line flags.
//! All numeric output uses 17 significant digits so CSV round-trips
//! double-precision values exactly; files are written to a temporary path
//! and renamed into place.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::convergence::{defocusing_reduce, k_sweep, stagger};
use crate::dynamics::evolve;
use crate::error::Error;
use crate::field::RingField;
use crate::green::{fixed_point_residual, green_periodic};
use crate::lattice::{el_residual, functional_j};
use crate::nehari::{ground_state, power_lower_bound, GroundState, SolverOptions};
use crate::params::{ModelParams, Regime};

/// Exit codes of the binary.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NO_CONVERGENCE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelConfig {
    pub alpha: f64,
    pub beta: f64,
    pub sigma: f64,
    pub omega: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self { alpha: 1.0, beta: 1.0, sigma: 1.0, omega: -1.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct EvolveConfig {
    pub dt: f64,
    pub t_end: f64,
    pub sample_every: usize,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self { dt: 1e-3, t_end: 10.0, sample_every: 100 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub format: OutputFormat,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), format: OutputFormat::Csv }
    }
}

/// Full run configuration; every field has a default, a config file supplies
/// any subset, and flags override the file.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub k: Option<usize>,
    pub ks: Option<Vec<usize>>,
    pub solver: SolverOptions,
    pub evolve: EvolveConfig,
    pub output: OutputConfig,
}

const DEFAULT_K: usize = 16;
const DEFAULT_KS: [usize; 4] = [16, 32, 64, 128];

#[derive(Debug, Parser)]
#[command(name = "dnls", about = "Ground states and breathers of the DNLS lattice with nonlinear hopping", version)]
pub struct Cli {
    /// JSON configuration file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Artifact format for summaries and reports.
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,

    /// RNG seed for the multi-start solver.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Also emit a gnuplot script next to each CSV artifact.
    #[arg(long, global = true)]
    pub plot: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct ModelFlags {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub omega: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SolverFlags {
    /// Euler-Lagrange residual tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a single k-periodic ground state.
    Solve {
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        model: ModelFlags,
        #[command(flatten)]
        solver: SolverFlags,
    },
    /// Ground states across a list of periods, with convergence diagnostics.
    Sweep {
        /// Comma-separated periods, e.g. 16,32,64,128.
        #[arg(long, value_delimiter = ',')]
        ks: Option<Vec<usize>>,
        #[command(flatten)]
        model: ModelFlags,
        #[command(flatten)]
        solver: SolverFlags,
    },
    /// Solve a ground state and integrate the flow from it.
    Evolve {
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        sample_every: Option<usize>,
        #[command(flatten)]
        model: ModelFlags,
        #[command(flatten)]
        solver: SolverFlags,
    },
    /// Emit the periodic Green function of -Delta - omega.
    Green {
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, allow_negative_numbers = true)]
        omega: Option<f64>,
    },
    /// Print the power lower bound for the configured parameters.
    Bound {
        #[command(flatten)]
        model: ModelFlags,
    },
}

/// A failure with its process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn config(msg: impl Into<String>) -> Self {
        Self { code: EXIT_CONFIG, message: msg.into() }
    }

    fn io(msg: impl std::fmt::Display) -> Self {
        Self { code: EXIT_IO, message: msg.to_string() }
    }
}

fn classify(e: Error) -> Failure {
    let code = match e {
        Error::NoConvergence { .. } | Error::SingularJacobian | Error::NonFinite(_) => {
            EXIT_NO_CONVERGENCE
        }
        _ => EXIT_CONFIG,
    };
    Failure { code, message: e.to_string() }
}

/// 17 significant digits; round-trips every finite f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir).map_err(Failure::io)?;
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents).map_err(Failure::io)?;
    fs::rename(&tmp, path).map_err(Failure::io)?;
    Ok(())
}

fn load_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::config(format!("cannot read config {path:?}: {e}")))?;
            serde_json::from_str::<RunConfig>(&text)
                .map_err(|e| Failure::config(format!("invalid config {path:?}: {e}")))?
        }
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        cfg.output.dir = out.clone();
    }
    if let Some(fmt) = cli.format {
        cfg.output.format = fmt;
    }
    if let Some(seed) = cli.seed {
        cfg.solver.seed = seed;
    }
    Ok(cfg)
}

fn apply_model_flags(cfg: &mut RunConfig, flags: &ModelFlags) {
    if let Some(v) = flags.alpha {
        cfg.model.alpha = v;
    }
    if let Some(v) = flags.beta {
        cfg.model.beta = v;
    }
    if let Some(v) = flags.sigma {
        cfg.model.sigma = v;
    }
    if let Some(v) = flags.omega {
        cfg.model.omega = v;
    }
}

fn apply_solver_flags(cfg: &mut RunConfig, flags: &SolverFlags) {
    if let Some(v) = flags.tol {
        cfg.solver.tol = v;
    }
    if let Some(v) = flags.max_iter {
        cfg.solver.max_iter = v;
    }
    if let Some(v) = flags.restarts {
        cfg.solver.restarts = v;
    }
}

fn model_params(cfg: &RunConfig) -> Result<ModelParams, Failure> {
    ModelParams::new(cfg.model.alpha, cfg.model.beta, cfg.model.sigma, cfg.model.omega)
        .map_err(classify)
}

/// Solves the ground state in the frame of `p`, routing defocusing parameters
/// through the staggering reduction. Returns the state in the original frame
/// together with the focusing parameter set used for the power bound.
fn solve_ground_state(
    p: &ModelParams,
    k: usize,
    opts: &SolverOptions,
) -> Result<(GroundState, ModelParams), Failure> {
    match p.regime {
        Regime::Focusing => Ok((ground_state(p, k, opts).map_err(classify)?, *p)),
        Regime::Defocusing => {
            if k % 2 != 0 {
                return Err(classify(Error::OddPeriod(k)));
            }
            let reduced = defocusing_reduce(p).map_err(classify)?;
            let gs = ground_state(&reduced, k, opts).map_err(classify)?;
            let field = stagger(&gs.field).map_err(classify)?;
            let gs = GroundState {
                objective: functional_j(&field, p),
                power: field.power(),
                el_resid: el_residual(&field, p),
                field,
                iterations: gs.iterations,
                restarts: gs.restarts,
            };
            Ok((gs, reduced))
        }
    }
}

fn field_csv(u: &RingField) -> String {
    let mut s = String::from("l,u_l\n");
    for l in u.indices() {
        let _ = writeln!(s, "{l},{}", fmt_f64(u.get(l)));
    }
    s
}

#[derive(Serialize)]
struct SolveSummary {
    k: usize,
    m_k: f64,
    power: f64,
    el_resid: f64,
    fixed_point_resid: f64,
    p_min: f64,
    power_margin: f64,
    iterations: usize,
}

fn gnuplot_script(csv: &str, title: &str, lines: &[(&str, &str)]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set key autotitle columnhead");
    let _ = writeln!(s, "set title '{title}'");
    let mut plot = String::from("plot ");
    for (i, (using, label)) in lines.iter().enumerate() {
        if i > 0 {
            plot.push_str(", ");
        }
        let _ = write!(plot, "'{csv}' using {using} with lines title '{label}'");
        let _ = i;
    }
    let _ = writeln!(s, "{plot}");
    s
}

pub fn run(cli: &Cli) -> Result<(), Failure> {
    let mut cfg = load_config(cli)?;
    match &cli.command {
        Command::Solve { k, model, solver } => {
            apply_model_flags(&mut cfg, model);
            apply_solver_flags(&mut cfg, solver);
            if let Some(k) = k {
                cfg.k = Some(*k);
            }
            cmd_solve(&cfg, cli.plot)
        }
        Command::Sweep { ks, model, solver } => {
            apply_model_flags(&mut cfg, model);
            apply_solver_flags(&mut cfg, solver);
            if let Some(ks) = ks {
                cfg.ks = Some(ks.clone());
            }
            cmd_sweep(&cfg, cli.plot)
        }
        Command::Evolve { k, dt, t_end, sample_every, model, solver } => {
            apply_model_flags(&mut cfg, model);
            apply_solver_flags(&mut cfg, solver);
            if let Some(k) = k {
                cfg.k = Some(*k);
            }
            if let Some(v) = dt {
                cfg.evolve.dt = *v;
            }
            if let Some(v) = t_end {
                cfg.evolve.t_end = *v;
            }
            if let Some(v) = sample_every {
                cfg.evolve.sample_every = *v;
            }
            cmd_evolve(&cfg, cli.plot)
        }
        Command::Green { k, omega } => {
            if let Some(k) = k {
                cfg.k = Some(*k);
            }
            if let Some(v) = omega {
                cfg.model.omega = *v;
            }
            cmd_green(&cfg, cli.plot)
        }
        Command::Bound { model } => {
            apply_model_flags(&mut cfg, model);
            cmd_bound(&cfg)
        }
    }
}

fn cmd_solve(cfg: &RunConfig, plot: bool) -> Result<(), Failure> {
    let p = model_params(cfg)?;
    let k = cfg.k.unwrap_or(DEFAULT_K);
    let (gs, bound_params) = solve_ground_state(&p, k, &cfg.solver)?;

    let p_min = power_lower_bound(&bound_params).map_err(classify)?;
    let fp_resid = if p.is_focusing() {
        fixed_point_residual(&gs.field, &p).map_err(classify)?
    } else {
        f64::NAN
    };
    let summary = SolveSummary {
        k,
        m_k: gs.objective,
        power: gs.power,
        el_resid: gs.el_resid,
        fixed_point_resid: fp_resid,
        p_min,
        power_margin: gs.power - p_min,
        iterations: gs.iterations,
    };

    let dir = &cfg.output.dir;
    write_atomic(&dir.join("ground_state.csv"), &field_csv(&gs.field))?;
    match cfg.output.format {
        OutputFormat::Json => {
            let text = serde_json::to_string_pretty(&summary).map_err(Failure::io)?;
            write_atomic(&dir.join("summary.json"), &text)?;
        }
        OutputFormat::Csv => {
            let text = format!(
                "k,m_k,power,el_resid,fixed_point_resid,p_min,power_margin,iterations\n{},{},{},{},{},{},{},{}\n",
                summary.k,
                fmt_f64(summary.m_k),
                fmt_f64(summary.power),
                fmt_f64(summary.el_resid),
                fmt_f64(summary.fixed_point_resid),
                fmt_f64(summary.p_min),
                fmt_f64(summary.power_margin),
                summary.iterations
            );
            write_atomic(&dir.join("summary.csv"), &text)?;
        }
    }
    if plot {
        let script = gnuplot_script("ground_state.csv", "ground state", &[("1:2", "u_l")]);
        write_atomic(&dir.join("solve.gp"), &script)?;
    }
    println!(
        "k = {k}: m_k = {}, power = {} (P_min = {}, margin = {:.3e}), el_resid = {:.3e}",
        fmt_f64(summary.m_k),
        fmt_f64(summary.power),
        fmt_f64(summary.p_min),
        summary.power_margin,
        summary.el_resid
    );
    Ok(())
}

fn cmd_sweep(cfg: &RunConfig, plot: bool) -> Result<(), Failure> {
    let p = model_params(cfg)?;
    let solve_params = match p.regime {
        Regime::Focusing => p,
        Regime::Defocusing => defocusing_reduce(&p).map_err(classify)?,
    };
    let ks = cfg.ks.clone().unwrap_or_else(|| DEFAULT_KS.to_vec());
    let report = k_sweep(&solve_params, &ks, &cfg.solver).map_err(classify)?;

    let dir = &cfg.output.dir;
    let mut csv = String::from("k,m_k,power,el_resid,distance_to_ref\n");
    for r in &report.records {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            r.k,
            fmt_f64(r.m_k),
            fmt_f64(r.power),
            fmt_f64(r.el_resid),
            fmt_f64(r.distance_to_ref)
        );
    }
    write_atomic(&dir.join("sweep.csv"), &csv)?;
    if cfg.output.format == OutputFormat::Json {
        let text = serde_json::to_string_pretty(&report.records).map_err(Failure::io)?;
        write_atomic(&dir.join("sweep.json"), &text)?;
    }
    if plot {
        let script = gnuplot_script(
            "sweep.csv",
            "k-sweep",
            &[("1:2", "m_k"), ("1:5", "distance to ref")],
        );
        write_atomic(&dir.join("sweep.gp"), &script)?;
    }
    for r in &report.records {
        println!(
            "k = {:4}: m_k = {}, power = {}, dist = {:.3e}",
            r.k,
            fmt_f64(r.m_k),
            fmt_f64(r.power),
            r.distance_to_ref
        );
    }
    for (k, e) in &report.failures {
        eprintln!("k = {k}: FAILED ({e})");
    }
    if !report.failures.is_empty() {
        return Err(Failure {
            code: EXIT_NO_CONVERGENCE,
            message: format!("{} sweep entries failed", report.failures.len()),
        });
    }
    Ok(())
}

fn cmd_evolve(cfg: &RunConfig, plot: bool) -> Result<(), Failure> {
    let p = model_params(cfg)?;
    let k = cfg.k.unwrap_or(DEFAULT_K);
    let (gs, _) = solve_ground_state(&p, k, &cfg.solver)?;

    // explicit stepping needs dt * ||linearization|| small
    let amp = gs.field.linf_norm();
    let nonlinear_scale = 2.0 * p.alpha.abs() * amp * amp
        + p.beta.abs() * crate::lattice::abs_pow_2sigma(amp, p.sigma);
    let guard = 0.1 / (4.0 + p.omega.abs() + nonlinear_scale);
    let dt = if cfg.evolve.dt > guard {
        eprintln!("dt = {} exceeds the stability guard; using {}", cfg.evolve.dt, guard);
        guard
    } else {
        cfg.evolve.dt
    };

    let trace = evolve(&gs.field.to_wave(), &p, dt, cfg.evolve.t_end, cfg.evolve.sample_every)
        .map_err(classify)?;

    let dir = &cfg.output.dir;
    let mut csv = String::from("t,power,energy,modulus_dev\n");
    for i in 0..trace.times.len() {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            fmt_f64(trace.times[i]),
            fmt_f64(trace.power[i]),
            fmt_f64(trace.energy[i]),
            fmt_f64(trace.modulus_dev[i])
        );
    }
    write_atomic(&dir.join("trace.csv"), &csv)?;
    if plot {
        let script = gnuplot_script(
            "trace.csv",
            "breather evolution",
            &[("1:2", "power"), ("1:3", "energy"), ("1:4", "modulus dev")],
        );
        write_atomic(&dir.join("evolve.gp"), &script)?;
    }
    let last = trace.times.len() - 1;
    println!(
        "t = {}: power drift = {:.3e}, energy drift = {:.3e}, modulus dev = {:.3e}",
        fmt_f64(trace.times[last]),
        (trace.power[last] - trace.power[0]).abs() / trace.power[0],
        (trace.energy[last] - trace.energy[0]).abs() / trace.energy[0].abs().max(1.0),
        trace.modulus_dev[last]
    );
    Ok(())
}

fn cmd_green(cfg: &RunConfig, plot: bool) -> Result<(), Failure> {
    let k = cfg.k.unwrap_or(DEFAULT_K);
    let g = green_periodic(k, cfg.model.omega).map_err(classify)?;
    let start = -((k / 2) as i64);

    let dir = &cfg.output.dir;
    let mut csv = String::from("n,m,value\n");
    for n in start..start + k as i64 {
        for m in start..start + k as i64 {
            let _ = writeln!(csv, "{n},{m},{}", fmt_f64(g.entry(n, m)));
        }
    }
    write_atomic(&dir.join("green.csv"), &csv)?;
    if plot {
        let mut script = String::new();
        let _ = writeln!(script, "set datafile separator ','");
        let _ = writeln!(script, "set title 'Green function, k = {k}'");
        let _ = writeln!(script, "plot 'green.csv' using 1:3 every ::1 with points title 'G(n, m)'");
        write_atomic(&dir.join("green.gp"), &script)?;
    }
    println!("wrote {}x{} Green kernel, G(0,0) = {}", k, k, fmt_f64(g.entry(0, 0)));
    Ok(())
}

fn cmd_bound(cfg: &RunConfig) -> Result<(), Failure> {
    let p = model_params(cfg)?;
    let bound_params = match p.regime {
        Regime::Focusing => p,
        Regime::Defocusing => defocusing_reduce(&p).map_err(classify)?,
    };
    let p_min = power_lower_bound(&bound_params).map_err(classify)?;
    let residual = bound_params.beta * p_min.powf(bound_params.sigma)
        + 2.0 * bound_params.alpha * p_min
        - bound_params.omega.abs();

    let dir = &cfg.output.dir;
    match cfg.output.format {
        OutputFormat::Json => {
            let text = serde_json::to_string_pretty(&serde_json::json!({
                "p_min": p_min,
                "residual": residual,
            }))
            .map_err(Failure::io)?;
            write_atomic(&dir.join("bound.json"), &text)?;
        }
        OutputFormat::Csv => {
            let text =
                format!("p_min,residual\n{},{}\n", fmt_f64(p_min), fmt_f64(residual));
            write_atomic(&dir.join("bound.csv"), &text)?;
        }
    }
    println!("P_min = {} (defining residual {:.3e})", fmt_f64(p_min), residual);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f64_formatting_round_trips() {
        for v in [1.0 / 3.0, 0.1, 123456.789e-12, -2.5e300, f64::MIN_POSITIVE] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "failed for {s}");
        }
    }

    #[test]
    fn config_defaults() {
        let cfg: RunConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(cfg.model.omega, -1.0);
        assert_eq!(cfg.solver.tol, 1e-8);
        assert_eq!(cfg.evolve.dt, 1e-3);
        assert_eq!(cfg.output.format, OutputFormat::Csv);
    }

    #[test]
    fn partial_config_overrides() {
        let cfg: RunConfig =
            serde_json::from_str(r#"{"model": {"omega": -2.0}, "k": 8}"#).unwrap();
        assert_eq!(cfg.model.omega, -2.0);
        assert_eq!(cfg.model.alpha, 1.0);
        assert_eq!(cfg.k, Some(8));
    }
}
