//! Named gates used by the CLI shorthand and the test corpora.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::tensor::{embed, omega, Operator, C64};

fn local(d: usize, n: usize, f: impl Fn(usize, usize) -> C64) -> Operator {
    let dim = d.pow(n as u32);
    Operator::from_parts(d, n, DMatrix::from_fn(dim, dim, f))
}

fn qubits_only(d: usize, what: &'static str) -> Result<()> {
    if d != 2 {
        return Err(Error::QubitsOnly { d, what });
    }
    Ok(())
}

/// Shift `X|j> = |j+1>`.
pub fn shift(d: usize) -> Operator {
    local(d, 1, |i, j| if i == (j + 1) % d { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
}

/// Clock `Z|j> = ω^j |j>`.
pub fn clock(d: usize) -> Operator {
    local(d, 1, |i, j| if i == j { omega(d, j) } else { C64::new(0.0, 0.0) })
}

/// Qudit Fourier gate; the Hadamard gate for `d = 2`.
pub fn fourier(d: usize) -> Operator {
    let s = 1.0 / (d as f64).sqrt();
    local(d, 1, |i, j| omega(d, i * j) * s)
}

pub fn phase_s() -> Operator {
    local(2, 1, |i, j| match (i, j) {
        (0, 0) => C64::new(1.0, 0.0),
        (1, 1) => C64::new(0.0, 1.0),
        _ => C64::new(0.0, 0.0),
    })
}

pub fn phase_t() -> Operator {
    local(2, 1, |i, j| match (i, j) {
        (0, 0) => C64::new(1.0, 0.0),
        (1, 1) => C64::from_polar(1.0, PI / 4.0),
        _ => C64::new(0.0, 0.0),
    })
}

/// Single-qubit Pauli Y.
pub fn pauli_y() -> Operator {
    local(2, 1, |i, j| match (i, j) {
        (0, 1) => C64::new(0.0, -1.0),
        (1, 0) => C64::new(0.0, 1.0),
        _ => C64::new(0.0, 0.0),
    })
}

/// `|a, b> -> |a, a + b>`.
pub fn cnot(d: usize) -> Operator {
    local(d, 2, |row, col| {
        let (a, b) = (col / d, col % d);
        if row == a * d + (a + b) % d {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// `|a, b> -> ω^{ab} |a, b>`.
pub fn cz(d: usize) -> Operator {
    local(d, 2, |row, col| {
        if row == col {
            omega(d, (col / d) * (col % d))
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

pub fn swap(d: usize) -> Operator {
    local(d, 2, |row, col| {
        let (a, b) = (col / d, col % d);
        if row == b * d + a {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Fermionic swap: SWAP followed by a sign on `|11>`.
pub fn gzx() -> Operator {
    let mut g = swap(2).into_matrix();
    g[(3, 3)] = C64::new(-1.0, 0.0);
    Operator::from_parts(2, 2, g)
}

/// Builds a named gate acting on `targets` inside an `n`-qudit register.
pub fn named_gate(name: &str, targets: &[usize], d: usize, n: usize) -> Result<Operator> {
    let (gate, arity) = match name.to_ascii_uppercase().as_str() {
        "I" | "ID" => (Operator::identity(d, 1)?, 1),
        "X" => (shift(d), 1),
        "Z" => (clock(d), 1),
        "Y" => {
            qubits_only(d, "Y gate")?;
            (pauli_y(), 1)
        }
        "H" | "F" => (fourier(d), 1),
        "S" => {
            qubits_only(d, "S gate")?;
            (phase_s(), 1)
        }
        "T" => {
            qubits_only(d, "T gate")?;
            (phase_t(), 1)
        }
        "CNOT" | "CX" => (cnot(d), 2),
        "CZ" => (cz(d), 2),
        "SWAP" => (swap(d), 2),
        "GZX" => {
            qubits_only(d, "G(Z,X) gate")?;
            (gzx(), 2)
        }
        other => return Err(Error::Argument(format!("unknown gate name {other:?}"))),
    };
    if targets.len() != arity {
        return Err(Error::Argument(format!(
            "gate {name} acts on {arity} qudit(s) but {} target(s) were given",
            targets.len()
        )));
    }
    embed(&gate, targets, n)
}
