//! `pdmforge` — construct exactly solvable position-dependent-mass systems,
//! generate perturbative extensions, and verify every construction with an
//! independent finite-difference eigensolve.
//!
//! Exit codes: 0 success (and, for `verify`, all checks passed);
//! 1 verification ran but did not pass; 2 configuration error;
//! 3 solvable-split inconsistency; 4 node proximity; 5 boundary leak;
//! 6 solver failure; 7 I/O error.

mod config;
mod output;

use clap::{Args, Parser, Subcommand};
use config::{PerturbationConfig, RunConfig, SolverConfig};
use output::{
    write_csv, write_json, DeltaJson, GridEcho, LevelsJson, SpectrumJson, VerifyJson,
    VerifyLevelJson, VonRoosEcho,
};
use pdmforge_core::field::FieldError;
use pdmforge_core::pct::{
    apply_delta_q, construct_laguerre_exponential, delta_q_two_over_g, ConstructedSystem, Grid1D,
    PctError, PerturbationResult,
};
use pdmforge_core::specfam::SpecFamError;
use pdmforge_core::vonroos::{
    discretize, eigs_lowest, veff_from_von_roos, verify_system, SolverOptions, VerifyOptions,
    VonRoosError, VonRoosParams,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "pdmforge",
    version,
    about = "Exactly solvable position-dependent-mass systems: construct, perturb, verify, solve"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Build a solvable system and write system.csv + levels.json.
    Construct(CommonArgs),
    /// Apply a ΔQ generator and write perturbation.csv + delta.json.
    Perturb {
        #[command(flatten)]
        common: CommonArgs,
        /// Evaluate excited levels on node-free subintervals instead of
        /// refusing them.
        #[arg(long)]
        override_node_guard: bool,
    },
    /// Cross-check a construction against the eigensolver; write verify.json.
    Verify(CommonArgs),
    /// Solve the ordering-parameterized Hamiltonian for a registry mass and
    /// potential; write spectrum.json (+ vectors.csv on request).
    Solve(CommonArgs),
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    fn io(err: std::io::Error, what: &str) -> Self {
        CliError {
            code: 7,
            message: format!("i/o failure on {what}: {err}"),
        }
    }
}

fn pct_exit_code(err: &PctError) -> u8 {
    match err {
        PctError::Field(f) => match f {
            FieldError::QuadratureFailure { .. } => 6,
            _ => 2,
        },
        PctError::SpecFam(s) => match s {
            SpecFamError::NodeProximity { .. } => 4,
            _ => 2,
        },
        PctError::InvalidGrid { .. }
        | PctError::Parameter { .. }
        | PctError::GridOutsideDomain { .. }
        | PctError::LevelOutOfRange { .. }
        | PctError::WrongProvenance { .. } => 2,
        PctError::InconsistentPair { .. }
        | PctError::SplitInconsistency { .. }
        | PctError::NonPositiveModerating { .. }
        | PctError::ReductionMismatch { .. } => 3,
        PctError::DegenerateSupport { .. } => 5,
        PctError::ExcitedLevelNeedsOverride { .. } => 4,
        PctError::NonFinite { .. } => 6,
    }
}

fn von_roos_exit_code(err: &VonRoosError) -> u8 {
    match err {
        VonRoosError::ParameterSum { .. }
        | VonRoosError::KTooLarge { .. }
        | VonRoosError::KExceedsConstructed { .. }
        | VonRoosError::LengthMismatch { .. }
        | VonRoosError::NonPositiveMass { .. } => 2,
        VonRoosError::BoundaryLeak { .. } => 5,
        VonRoosError::InverseIterationFailure { .. }
        | VonRoosError::SpectrumOrdering { .. }
        | VonRoosError::NonFinite { .. } => 6,
    }
}

fn from_pct(err: PctError) -> CliError {
    CliError {
        code: pct_exit_code(&err),
        message: err.to_string(),
    }
}

fn from_von_roos(err: VonRoosError) -> CliError {
    CliError {
        code: von_roos_exit_code(&err),
        message: err.to_string(),
    }
}

fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(e, "config file"))?;
    serde_json::from_str(&text).map_err(|e| CliError::config(format!("config error: {e}")))
}

fn prepare_out_dir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path).map_err(|e| CliError::io(e, "output directory"))
}

fn build_system(cfg: &RunConfig) -> Result<ConstructedSystem, CliError> {
    let system = cfg
        .system
        .as_ref()
        .ok_or_else(|| CliError::config("this command requires a \"system\" block"))?;
    let grid = cfg.grid.build().map_err(CliError::config)?;
    construct_laguerre_exponential(system.beta, system.nu, system.n_max, grid).map_err(from_pct)
}

fn grid_echo(grid: Grid1D) -> GridEcho {
    GridEcho {
        x_lo: grid.x_lo(),
        x_hi: grid.x_hi(),
        n_points: grid.len(),
    }
}

fn cmd_construct(cfg: RunConfig, out: &Path) -> Result<u8, CliError> {
    let sys = build_system(&cfg)?;
    let system = cfg.system.as_ref().expect("validated above");
    let grid = sys.grid();

    let xs: Vec<f64> = grid.points().collect();
    let mut header = vec!["x".to_string(), "V".to_string()];
    let mut columns: Vec<&[f64]> = vec![&xs, sys.potential()];
    for n in 0..=sys.n_max() {
        header.push(format!("psi_{n}"));
        columns.push(sys.psi(n));
    }
    write_csv(&out.join("system.csv"), &header, &columns)
        .map_err(|e| CliError::io(e, "system.csv"))?;

    write_json(
        &out.join("levels.json"),
        &LevelsJson {
            energies: sys.energies().to_vec(),
            gauge_note: sys.gauge_note().to_string(),
            beta: system.beta,
            nu: system.nu,
            n_max: system.n_max,
            grid: grid_echo(grid),
        },
    )
    .map_err(|e| CliError::io(e, "levels.json"))?;
    Ok(0)
}

fn run_perturbation(
    sys: &ConstructedSystem,
    pert: &PerturbationConfig,
    override_node_guard: bool,
) -> Result<PerturbationResult, CliError> {
    let level = pert.level();
    match pert.kind.as_str() {
        "two_over_g" => delta_q_two_over_g(sys, level, override_node_guard).map_err(from_pct),
        "custom" => {
            let generator = pert.build_custom().map_err(CliError::config)?;
            apply_delta_q(sys, level, &generator, override_node_guard).map_err(from_pct)
        }
        other => Err(CliError::config(format!(
            "unknown perturbation kind \"{other}\"; expected \"two_over_g\" or \"custom\""
        ))),
    }
}

fn cmd_perturb(cfg: RunConfig, out: &Path, override_node_guard: bool) -> Result<u8, CliError> {
    let sys = build_system(&cfg)?;
    let pert = cfg
        .perturbation
        .as_ref()
        .ok_or_else(|| CliError::config("perturb requires a \"perturbation\" block"))?;
    let result = run_perturbation(&sys, pert, override_node_guard)?;

    let grid = sys.grid();
    let xs: Vec<f64> = grid.points().collect();
    let header: Vec<String> = ["x", "h", "deltaV", "psi_ext"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    write_csv(
        &out.join("perturbation.csv"),
        &header,
        &[&xs, &result.h, &result.delta_v, &result.psi_ext],
    )
    .map_err(|e| CliError::io(e, "perturbation.csv"))?;

    write_json(
        &out.join("delta.json"),
        &DeltaJson {
            delta_e: result.delta_e,
            delta_e_is_gauge: result.delta_e_is_gauge,
            label: result.delta_q_label.clone(),
            level: pert.level(),
            guarded_points: result.guarded_points.len(),
        },
    )
    .map_err(|e| CliError::io(e, "delta.json"))?;
    Ok(0)
}

fn verify_options(solver: &SolverConfig) -> VerifyOptions {
    let mut opts = VerifyOptions::default();
    if let Some(tol) = solver.solver_tol {
        opts.solver.solver_tol = tol;
    }
    if let Some(tol) = solver.boundary_tol {
        opts.boundary_tol = tol;
    }
    opts
}

fn cmd_verify(cfg: RunConfig, out: &Path) -> Result<u8, CliError> {
    let sys = build_system(&cfg)?;
    let solver = cfg
        .solver
        .as_ref()
        .ok_or_else(|| CliError::config("verify requires a \"solver\" block"))?;
    if solver.k == 0 {
        return Err(CliError::config("solver.k must be at least 1"));
    }
    let report = verify_system(&sys, solver.k, &verify_options(solver)).map_err(from_von_roos)?;

    write_json(
        &out.join("verify.json"),
        &VerifyJson {
            all_pass: report.all_pass,
            levels: report
                .levels
                .iter()
                .map(|l| VerifyLevelJson {
                    n: l.n,
                    analytic_energy: l.analytic_energy,
                    numeric_energy: l.numeric_energy,
                    rel_gap: l.rel_gap,
                    overlap: l.overlap,
                    analytic_residual: l.analytic_residual,
                    pass: l.pass,
                })
                .collect(),
            operator_inf_norm: report.operator_inf_norm,
            solver_residuals: report.solver_residuals.clone(),
        },
    )
    .map_err(|e| CliError::io(e, "verify.json"))?;

    Ok(if report.all_pass { 0 } else { 1 })
}

fn cmd_solve(cfg: RunConfig, out: &Path) -> Result<u8, CliError> {
    let problem = cfg
        .problem
        .as_ref()
        .ok_or_else(|| CliError::config("solve requires a \"problem\" block"))?;
    let solver = cfg
        .solver
        .as_ref()
        .ok_or_else(|| CliError::config("solve requires a \"solver\" block"))?;
    if solver.k == 0 {
        return Err(CliError::config("solver.k must be at least 1"));
    }
    let grid = cfg.grid.build().map_err(CliError::config)?;
    let window = grid.interval();

    let mass = problem.mass.build(window).map_err(CliError::config)?;
    let potential = problem.potential.build();
    let params = VonRoosParams::new(
        problem.von_roos.alpha,
        problem.von_roos.beta,
        problem.von_roos.gamma,
    )
    .map_err(from_von_roos)?;

    let xs: Vec<f64> = grid.points().collect();
    let v: Vec<f64> = xs.iter().map(|&x| potential.eval(x)).collect();
    let veff: Vec<f64> = xs
        .iter()
        .map(|&x| veff_from_von_roos(&potential, &mass, &params, x))
        .collect();

    let operator = discretize(&mass, &veff, grid).map_err(from_von_roos)?;
    let mut solver_opts = SolverOptions::default();
    if let Some(tol) = solver.solver_tol {
        solver_opts.solver_tol = tol;
    }
    let eig = eigs_lowest(&operator, solver.k, &solver_opts).map_err(from_von_roos)?;

    write_json(
        &out.join("spectrum.json"),
        &SpectrumJson {
            values: eig.values.clone(),
            residuals: eig.residuals.clone(),
            k: solver.k,
            mass: problem.mass.label(),
            potential: problem.potential.label(),
            von_roos: VonRoosEcho {
                alpha: params.alpha,
                beta: params.beta,
                gamma: params.gamma,
            },
            grid: grid_echo(grid),
        },
    )
    .map_err(|e| CliError::io(e, "spectrum.json"))?;

    let write_vectors = cfg.output.as_ref().is_some_and(|o| o.write_vectors);
    if write_vectors {
        let mut header = vec!["x".to_string(), "V".to_string(), "V_eff".to_string()];
        let padded: Vec<Vec<f64>> = (0..solver.k).map(|j| eig.padded(j)).collect();
        let mut columns: Vec<&[f64]> = vec![&xs, &v, &veff];
        for (j, vec) in padded.iter().enumerate() {
            header.push(format!("vec_{j}"));
            columns.push(vec);
        }
        write_csv(&out.join("vectors.csv"), &header, &columns)
            .map_err(|e| CliError::io(e, "vectors.csv"))?;
    }
    Ok(0)
}

fn dispatch(cli: Cli) -> Result<u8, CliError> {
    let common = match &cli.command {
        Command::Construct(common) | Command::Verify(common) | Command::Solve(common) => common,
        Command::Perturb { common, .. } => common,
    };
    let cfg = load_config(&common.config)?;
    prepare_out_dir(&common.out)?;
    match &cli.command {
        Command::Construct(c) => cmd_construct(cfg, &c.out),
        Command::Perturb {
            common,
            override_node_guard,
        } => cmd_perturb(cfg, &common.out, *override_node_guard),
        Command::Verify(c) => cmd_verify(cfg, &c.out),
        Command::Solve(c) => cmd_solve(cfg, &c.out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("pdmforge: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}
