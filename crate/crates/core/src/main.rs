use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use oqw::circuit::Circuit;
use oqw::lindblad::DEFAULT_DT;
use oqw::report::{
    basis_state, default_input, default_tol, load_circuit, parse_omega_grid, run_lindblad,
    run_walk, sweep, validate_circuit, write_lindblad_csv, write_run_csv, write_sweep_csv,
    LindbladConfig, WalkConfig,
};
use oqw::{Complex64, OqwError};

const EXIT_NOT_CONVERGED: u8 = 1;
const EXIT_INPUT: u8 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "oqw",
    version,
    about = "Open quantum walk simulator for dissipative quantum computing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check slice unitarity and walk normalization.
    Validate(CommonArgs),
    /// Iterate one walk to its steady state and emit the node distribution per step.
    Run(CommonArgs),
    /// Run one walk per omega on a grid and emit steps and detection probability.
    Sweep(CommonArgs),
    /// Integrate the continuous-time master equation and emit node marginals.
    Lindblad(LindbladArgs),
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// Built-in circuit (toffoli, qft3, qft4) or path to a circuit file.
    #[arg(long)]
    circuit: String,
    /// Forward weight, or a grid `start:stop:step` for `sweep`.
    #[arg(long)]
    omega: Option<String>,
    /// Convergence tolerance on the summed trace distance between steps.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    max_steps: usize,
    /// Input bitstring, qubit 1 first.
    #[arg(long)]
    input: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct LindbladArgs {
    #[arg(long)]
    circuit: String,
    #[arg(long)]
    input: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_DT)]
    dt: f64,
    /// Stop once the Frobenius norm of the generator output falls below this.
    #[arg(long, default_value_t = 1e-8)]
    stop_tol: f64,
    #[arg(long, default_value_t = 2000.0)]
    max_time: f64,
    /// Record marginals every this many integration steps.
    #[arg(long, default_value_t = 100)]
    record_every: usize,
    /// Add the per-qubit reset jumps at register 0.
    #[arg(long)]
    reset: bool,
}

enum Failure {
    Input(String),
    NotConverged(String),
}

impl From<OqwError> for Failure {
    fn from(e: OqwError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(format!("i/o error: {e}"))
    }
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn input_state(circuit: &Circuit, input: &Option<String>) -> Result<Vec<Complex64>, Failure> {
    let bits = input.clone().unwrap_or_else(|| default_input(circuit));
    Ok(basis_state(&bits, circuit.num_qubits())?)
}

fn single_omega(args: &CommonArgs) -> Result<f64, Failure> {
    let grid = args.omega.as_deref().unwrap_or("0.5");
    match parse_omega_grid(grid)?.as_slice() {
        [x] => Ok(*x),
        _ => Err(Failure::Input(format!(
            "expected a single omega, got `{grid}`"
        ))),
    }
}

fn check_tol(tol: f64) -> Result<f64, Failure> {
    if tol > 0.0 {
        Ok(tol)
    } else {
        Err(Failure::Input(format!("tolerance {tol} must be positive")))
    }
}

fn cmd_validate(args: &CommonArgs) -> Result<(), Failure> {
    let circuit = load_circuit(&args.circuit)?;
    let report = validate_circuit(&circuit, single_omega(args)?)?;
    let mut out = open_output(&args.out)?;
    writeln!(out, "{report}")?;
    out.flush()?;
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Input("validation failed".into()))
    }
}

fn cmd_run(args: &CommonArgs) -> Result<(), Failure> {
    let circuit = load_circuit(&args.circuit)?;
    let config = WalkConfig {
        omega: single_omega(args)?,
        tol: check_tol(args.tol.unwrap_or_else(|| default_tol(&circuit)))?,
        max_steps: args.max_steps,
        input: input_state(&circuit, &args.input)?,
    };
    let report = run_walk(&circuit, &config)?;
    let mut out = open_output(&args.out)?;
    write_run_csv(&mut out, &report)?;
    out.flush()?;
    if report.converged {
        Ok(())
    } else {
        Err(Failure::NotConverged(format!(
            "not converged after {} steps",
            report.steps
        )))
    }
}

fn sweep_threads() -> Result<Option<usize>, Failure> {
    match std::env::var("OQW_THREADS") {
        Ok(v) => v
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| Failure::Input(format!("OQW_THREADS=`{v}` is not a positive integer"))),
        Err(_) => Ok(None),
    }
}

fn cmd_sweep(args: &CommonArgs) -> Result<(), Failure> {
    let circuit = load_circuit(&args.circuit)?;
    let omegas = parse_omega_grid(args.omega.as_deref().unwrap_or("0.5:0.95:0.05"))?;
    let tol = check_tol(args.tol.unwrap_or_else(|| default_tol(&circuit)))?;
    let input = input_state(&circuit, &args.input)?;
    let rows = sweep(
        &circuit,
        &omegas,
        tol,
        args.max_steps,
        &input,
        sweep_threads()?,
    )?;
    let mut out = open_output(&args.out)?;
    write_sweep_csv(&mut out, &rows)?;
    out.flush()?;
    let stuck: Vec<String> = rows
        .iter()
        .filter(|r| !r.converged)
        .map(|r| r.omega.to_string())
        .collect();
    if stuck.is_empty() {
        Ok(())
    } else {
        Err(Failure::NotConverged(format!(
            "not converged for omega = {}",
            stuck.join(", ")
        )))
    }
}

fn cmd_lindblad(args: &LindbladArgs) -> Result<(), Failure> {
    let circuit = load_circuit(&args.circuit)?;
    let config = LindbladConfig {
        dt: args.dt,
        stop_tol: args.stop_tol,
        max_time: args.max_time,
        record_every: args.record_every,
        include_reset: args.reset,
        input: input_state(&circuit, &args.input)?,
    };
    let outcome = run_lindblad(&circuit, &config)?;
    let mut out = open_output(&args.out)?;
    write_lindblad_csv(&mut out, &outcome)?;
    out.flush()?;
    eprintln!(
        "t = {:.2}: max deviation from uniform 1/{} = {:e}; history-state residual = {:e}",
        outcome.time,
        outcome.final_marginals.len(),
        outcome.max_deviation,
        outcome.history_state_residual
    );
    if outcome.stationary {
        Ok(())
    } else {
        Err(Failure::NotConverged(format!(
            "not stationary by t = {}",
            outcome.time
        )))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate(args) => cmd_validate(args),
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Lindblad(args) => cmd_lindblad(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::NotConverged(msg)) => {
            eprintln!("oqw: {msg}");
            ExitCode::from(EXIT_NOT_CONVERGED)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("oqw: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
