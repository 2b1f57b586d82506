//! Drivers behind the `oqw` command line: circuit loading, single runs,
//! ω sweeps, the master-equation cross-check, and their CSV output.
//!
//! CSV is written with LF line endings, a header row first, and floats
//! formatted like C's `%.17g`, so repeated runs are byte-identical.

use std::fmt;
use std::io::{self, Write};
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::circuit::{parse_circuit_named, qft, toffoli13, Circuit};
use crate::error::{OqwError, Result};
use crate::lindblad::{build_dqc_lindblad, integrate_observed, uniform_history_state};
use crate::matrix::kron_vec;
use crate::walk::{
    analytic_chain_steady, build_dqc_chain, normalization_residuals, run_until_converged,
    BlockState, ChainParams, ConvergenceReport,
};

/// Names accepted by [`load_circuit`] besides file paths.
pub const BUILTIN_CIRCUITS: [&str; 3] = ["toffoli", "qft3", "qft4"];

/// Pass threshold for `validate`.
pub const VALIDATION_TOL: f64 = 1e-10;

/// Formats `x` the way C's `printf("%.17g", x)` does.
pub fn format_g17(x: f64) -> String {
    const PRECISION: i32 = 17;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.into();
    }
    let sci = format!("{:.*e}", (PRECISION - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..PRECISION).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip_zeros(mantissa), exp.abs())
    } else {
        let decimals = (PRECISION - 1 - exp) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Resolves a built-in circuit name, otherwise reads a circuit file.
pub fn load_circuit(name_or_path: &str) -> Result<Circuit> {
    match name_or_path {
        "toffoli" => Ok(toffoli13()),
        "qft3" => qft(3),
        "qft4" => qft(4),
        path => {
            let text =
                std::fs::read_to_string(path).map_err(|e| OqwError::Io(format!("{path}: {e}")))?;
            let name = Path::new(path)
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("custom");
            parse_circuit_named(&text, name)
        }
    }
}

/// Default input bitstring: `110` for the Toffoli circuit, all zeros otherwise.
pub fn default_input(circuit: &Circuit) -> String {
    if circuit.name() == "toffoli" {
        "110".into()
    } else {
        "0".repeat(circuit.num_qubits())
    }
}

/// Default convergence tolerance: `1e-5` for the 4-qubit QFT, `1e-7` otherwise.
pub fn default_tol(circuit: &Circuit) -> f64 {
    if circuit.name() == "qft4" {
        1e-5
    } else {
        1e-7
    }
}

/// Computational basis state for a bitstring, qubit 1 first.
pub fn basis_state(bits: &str, num_qubits: usize) -> Result<Vec<Complex64>> {
    if bits.len() != num_qubits {
        return Err(OqwError::Domain(format!(
            "input `{bits}` has {} bits, circuit has {num_qubits} qubits",
            bits.len()
        )));
    }
    let mut state = vec![Complex64::new(1.0, 0.0)];
    for ch in bits.chars() {
        let qubit = match ch {
            '0' => [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            '1' => [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            other => {
                return Err(OqwError::Domain(format!(
                    "input bit `{other}` is not 0 or 1"
                )))
            }
        };
        state = kron_vec(&state, &qubit);
    }
    Ok(state)
}

/// Parses `x` or an inclusive grid `start:stop:step`, ascending.
pub fn parse_omega_grid(grid: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| OqwError::Domain(format!("omega `{grid}`: {why}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let parts: Vec<&str> = grid.split(':').collect();
    let values = match parts.as_slice() {
        [x] => vec![num(x)?],
        [a, b, s] => {
            let (start, stop, step) = (num(a)?, num(b)?, num(s)?);
            if !(step > 0.0) || !(stop >= start) {
                return Err(bad("grid needs step > 0 and stop >= start"));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            (0..count)
                .map(|i| {
                    // Snap to 12 decimals so 0.5 + 2*0.05 prints as 0.6.
                    let v = start + i as f64 * step;
                    (v * 1e12).round() / 1e12
                })
                .collect()
        }
        _ => return Err(bad("expected `x` or `start:stop:step`")),
    };
    if let Some(v) = values.iter().find(|v| !(**v > 0.0 && **v <= 1.0)) {
        return Err(bad(&format!("value {v} outside (0, 1]")));
    }
    Ok(values)
}

/// Settings for one walk run.
#[derive(Debug, Clone)]
pub struct WalkConfig {
    pub omega: f64,
    pub tol: f64,
    pub max_steps: usize,
    pub input: Vec<Complex64>,
}

/// Runs the chain walk of `circuit` from `input` at node 0, watching the
/// last node for `U_T⋯U_1 |input⟩`.
pub fn run_walk(circuit: &Circuit, config: &WalkConfig) -> Result<ConvergenceReport> {
    if !(config.tol > 0.0) {
        return Err(OqwError::Domain(format!(
            "tolerance {} must be positive",
            config.tol
        )));
    }
    let params = ChainParams::new(config.omega)?;
    let walk = build_dqc_chain(circuit, params)?;
    let init = BlockState::concentrated(walk.num_nodes(), 0, &config.input)?;
    let target = circuit.product()?.apply(&config.input)?;
    run_until_converged(
        &walk,
        &init,
        config.tol,
        config.max_steps,
        circuit.depth(),
        &target,
    )
}

/// `step,node,probability` rows followed by a summary block.
pub fn write_run_csv<W: Write>(out: &mut W, report: &ConvergenceReport) -> io::Result<()> {
    writeln!(out, "step,node,probability")?;
    for (step, row) in report.history.iter().enumerate() {
        for (node, p) in row.iter().enumerate() {
            writeln!(out, "{step},{node},{}", format_g17(*p))?;
        }
    }
    writeln!(
        out,
        "steps_to_converge,final_detection,final_fidelity,converged"
    )?;
    writeln!(
        out,
        "{},{},{},{}",
        report.steps,
        format_g17(report.final_detection),
        format_g17(report.final_fidelity),
        report.converged
    )
}

/// One cell of an ω sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub omega: f64,
    pub steps_to_converge: usize,
    pub final_detection: f64,
    pub converged: bool,
}

/// Runs one walk per ω on a pool of `threads` workers (all cores when
/// `None`). Rows come back in the order of `omegas`.
pub fn sweep(
    circuit: &Circuit,
    omegas: &[f64],
    tol: f64,
    max_steps: usize,
    input: &[Complex64],
    threads: Option<usize>,
) -> Result<Vec<SweepRow>> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| OqwError::Io(format!("thread pool: {e}")))?;
    pool.install(|| {
        omegas
            .par_iter()
            .map(|&omega| {
                let config = WalkConfig {
                    omega,
                    tol,
                    max_steps,
                    input: input.to_vec(),
                };
                let report = run_walk(circuit, &config)?;
                Ok(SweepRow {
                    omega,
                    steps_to_converge: report.steps,
                    final_detection: report.final_detection,
                    converged: report.converged,
                })
            })
            .collect()
    })
}

pub fn write_sweep_csv<W: Write>(out: &mut W, rows: &[SweepRow]) -> io::Result<()> {
    writeln!(out, "omega,steps_to_converge,final_detection,converged")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{}",
            format_g17(row.omega),
            row.steps_to_converge,
            format_g17(row.final_detection),
            row.converged
        )?;
    }
    Ok(())
}

/// Settings for the master-equation cross-check.
#[derive(Debug, Clone)]
pub struct LindbladConfig {
    pub dt: f64,
    pub stop_tol: f64,
    pub max_time: f64,
    /// Record marginals every this many integration steps.
    pub record_every: usize,
    pub include_reset: bool,
    pub input: Vec<Complex64>,
}

/// Outcome of the master-equation cross-check.
#[derive(Debug, Clone)]
pub struct LindbladOutcome {
    /// `(time, node marginals)` samples.
    pub trajectory: Vec<(f64, Vec<f64>)>,
    pub final_marginals: Vec<f64>,
    /// `max_t |p_t − 1/(T+1)|` at the final state.
    pub max_deviation: f64,
    /// `‖rhs‖_F` of the uniform history state.
    pub history_state_residual: f64,
    pub stationary: bool,
    pub time: f64,
}

pub fn run_lindblad(circuit: &Circuit, config: &LindbladConfig) -> Result<LindbladOutcome> {
    let model = build_dqc_lindblad(circuit, config.include_reset)?;
    let rho0 = model.register_state(&config.input, 0)?;
    let mut trajectory = Vec::new();
    let mut marginal_error = None;
    let result = integrate_observed(
        &model,
        &rho0,
        config.dt,
        config.stop_tol,
        config.max_time,
        config.record_every,
        |time, rho| match model.node_marginals(rho) {
            Ok(p) => trajectory.push((time, p)),
            Err(e) => marginal_error = Some(e),
        },
    )?;
    if let Some(e) = marginal_error {
        return Err(e);
    }
    let final_marginals = model.node_marginals(&result.state)?;
    let uniform = 1.0 / model.num_nodes() as f64;
    let max_deviation = final_marginals
        .iter()
        .map(|p| (p - uniform).abs())
        .fold(0.0, f64::max);
    let star = uniform_history_state(circuit, &config.input)?;
    let history_state_residual = crate::lindblad::lindblad_rhs(&model, &star)?.frobenius_norm();
    Ok(LindbladOutcome {
        trajectory,
        final_marginals,
        max_deviation,
        history_state_residual,
        stationary: result.stationary,
        time: result.time,
    })
}

pub fn write_lindblad_csv<W: Write>(out: &mut W, outcome: &LindbladOutcome) -> io::Result<()> {
    writeln!(out, "time,node,probability")?;
    for (time, marginals) in &outcome.trajectory {
        for (node, p) in marginals.iter().enumerate() {
            writeln!(out, "{},{node},{}", format_g17(*time), format_g17(*p))?;
        }
    }
    Ok(())
}

/// Structural checks of a circuit and its compiled chain walk.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub name: String,
    pub slices: usize,
    pub nodes: usize,
    pub max_unitarity_residual: f64,
    pub max_normalization_residual: f64,
    /// Analytic detection probability at the last node, when `ω < 1`.
    pub steady_detection: Option<f64>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.max_unitarity_residual <= VALIDATION_TOL
            && self.max_normalization_residual <= VALIDATION_TOL
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "circuit: {}", self.name)?;
        writeln!(f, "slices: {}", self.slices)?;
        writeln!(f, "walk nodes: {}", self.nodes)?;
        writeln!(
            f,
            "max unitarity residual: {:e}",
            self.max_unitarity_residual
        )?;
        writeln!(
            f,
            "max normalization residual: {:e}",
            self.max_normalization_residual
        )?;
        if let Some(p) = self.steady_detection {
            writeln!(f, "steady-state detection probability: {}", format_g17(p))?;
        }
        write!(f, "status: {}", if self.passed() { "ok" } else { "FAILED" })
    }
}

pub fn validate_circuit(circuit: &Circuit, omega: f64) -> Result<ValidationReport> {
    let params = ChainParams::new(omega)?;
    let unitaries = circuit.unitaries()?;
    let max_unitarity_residual = unitaries
        .iter()
        .map(|u| u.unitarity_residual().unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    let walk = build_dqc_chain(circuit, params)?;
    let max_normalization_residual = normalization_residuals(&walk)
        .into_iter()
        .fold(0.0, f64::max);
    let steady_detection = analytic_chain_steady(params, circuit.depth())
        .ok()
        .and_then(|p| p.last().copied());
    Ok(ValidationReport {
        name: circuit.name().to_string(),
        slices: circuit.depth(),
        nodes: walk.num_nodes(),
        max_unitarity_residual,
        max_normalization_residual,
        steady_detection,
    })
}
