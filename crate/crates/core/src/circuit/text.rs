//! Line-oriented circuit text format.
//!
//! ```text
//! # comment to end of line
//! qubits 3
//! H 3
//! CNOT 2 3
//! T 2 ; T 3          # one slice, two gates
//! CP 2 1 pi/2
//! P 1 0.125
//! ```
//!
//! The first non-comment line declares the register size. Every further
//! non-empty line is one time slice; gates inside a slice are separated by
//! `;`. Qubits are 1-based. Phases are `pi/2`, `pi/4`, `pi/8`, `-pi/4`
//! (more generally `[-]pi[/k]`) or a decimal radian literal.

use std::f64::consts::PI;

use super::gate::Gate;
use super::{first_overlap, Circuit, GateKind, Slice};
use crate::error::{OqwError, ParseErrorKind, Result};

fn err(line: usize, kind: ParseErrorKind) -> OqwError {
    OqwError::Parse { line, kind }
}

fn syntax(line: usize, msg: impl Into<String>) -> OqwError {
    err(line, ParseErrorKind::Syntax(msg.into()))
}

/// Parses circuit text; the resulting circuit is named `"custom"`.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    parse_circuit_named(text, "custom")
}

pub fn parse_circuit_named(text: &str, name: &str) -> Result<Circuit> {
    let mut num_qubits: Option<usize> = None;
    let mut slices = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some(n) = num_qubits else {
            num_qubits = Some(parse_header(content, line_no)?);
            continue;
        };
        let gates = content
            .split(';')
            .map(|g| parse_gate(g.trim(), n, line_no))
            .collect::<Result<Vec<_>>>()?;
        if let Some(q) = first_overlap(&gates) {
            return Err(err(line_no, ParseErrorKind::OverlappingQubits(q)));
        }
        slices.push(Slice::new(gates).map_err(|e| syntax(line_no, e.to_string()))?);
    }

    let n = num_qubits.ok_or_else(|| syntax(1, "missing `qubits <n>` declaration"))?;
    Circuit::new(name, n, slices).map_err(|e| syntax(1, e.to_string()))
}

fn parse_header(content: &str, line: usize) -> Result<usize> {
    let mut words = content.split_whitespace();
    match (words.next(), words.next(), words.next()) {
        (Some("qubits"), Some(n), None) => {
            let n: usize = n
                .parse()
                .map_err(|_| syntax(line, format!("invalid qubit count `{n}`")))?;
            if n == 0 || n > Circuit::MAX_QUBITS {
                return Err(syntax(
                    line,
                    format!("qubit count must be in 1..={}", Circuit::MAX_QUBITS),
                ));
            }
            Ok(n)
        }
        _ => Err(syntax(line, "expected `qubits <n>` as the first line")),
    }
}

fn parse_gate(text: &str, num_qubits: usize, line: usize) -> Result<Gate> {
    let words: Vec<&str> = text.split_whitespace().collect();
    let Some((&name, args)) = words.split_first() else {
        return Err(syntax(line, "empty gate between `;` separators"));
    };

    let (arity, has_phase) = match name.to_ascii_uppercase().as_str() {
        "H" | "X" | "S" | "SDG" | "T" | "TDG" | "R" => (1, false),
        "P" => (1, true),
        "CNOT" | "CX" => (2, false),
        "CP" => (2, true),
        _ => return Err(err(line, ParseErrorKind::UnknownGate(name.to_string()))),
    };
    let expected = arity + usize::from(has_phase);
    if args.len() != expected {
        return Err(syntax(
            line,
            format!(
                "`{name}` expects {expected} argument(s), got {}",
                args.len()
            ),
        ));
    }

    let mut qubits = Vec::with_capacity(arity);
    for arg in &args[..arity] {
        let q: usize = arg
            .parse()
            .map_err(|_| syntax(line, format!("invalid qubit index `{arg}`")))?;
        if q == 0 || q > num_qubits {
            return Err(err(
                line,
                ParseErrorKind::QubitOutOfRange {
                    qubit: q,
                    num_qubits,
                },
            ));
        }
        if qubits.contains(&q) {
            return Err(err(line, ParseErrorKind::OverlappingQubits(q)));
        }
        qubits.push(q);
    }
    let theta = if has_phase {
        Some(parse_phase(args[arity], line)?)
    } else {
        None
    };

    let kind = match (name.to_ascii_uppercase().as_str(), theta) {
        ("H", _) => GateKind::H,
        ("X", _) => GateKind::X,
        ("S", _) => GateKind::S,
        ("SDG", _) => GateKind::Sdg,
        ("T", _) => GateKind::T,
        ("TDG", _) => GateKind::Tdg,
        ("R", _) => GateKind::R,
        ("P", Some(t)) => GateKind::Phase(t),
        ("CP", Some(t)) => GateKind::CPhase(t),
        _ => GateKind::Cnot,
    };
    Gate::new(kind, &qubits).map_err(|e| syntax(line, e.to_string()))
}

fn parse_phase(text: &str, line: usize) -> Result<f64> {
    let bad = || syntax(line, format!("invalid phase `{text}`"));
    let (sign, body) = match text.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, text),
    };
    let lower = body.to_ascii_lowercase();
    let value = if let Some(rest) = lower.strip_prefix("pi") {
        if rest.is_empty() {
            PI
        } else {
            let k: u32 = rest
                .strip_prefix('/')
                .and_then(|d| d.parse().ok())
                .filter(|&d| d > 0)
                .ok_or_else(bad)?;
            PI / f64::from(k)
        }
    } else {
        body.parse::<f64>().map_err(|_| bad())?
    };
    let theta = sign * value;
    if theta.is_finite() {
        Ok(theta)
    } else {
        Err(bad())
    }
}

/// Renders a circuit in the text format; `parse_circuit_named` inverts it.
pub fn render(circuit: &Circuit) -> String {
    let mut out = format!("# {}\nqubits {}\n", circuit.name(), circuit.num_qubits());
    for slice in circuit.slices() {
        let gates: Vec<String> = slice.gates().iter().map(Gate::to_string).collect();
        out.push_str(&gates.join(" ; "));
        out.push('\n');
    }
    out
}
