//! Gate-list intermediate representation of logical circuits.

mod dag;
mod parse;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dag::Dag;
pub use parse::{parse_circuit, parse_named, serialize_circuit};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    Rx,
    Ry,
    Rz,
    /// Native two-qubit gate.
    Tqg,
    /// Move of one qubit to an adjacent empty dot. Only produced by the
    /// compiler.
    Shuttle,
    Swap,
}

/// Key into the duration and fidelity tables of the noise configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DurationClass {
    Single,
    Two,
    Shuttle,
    Swap,
}

/// Gate classes used by the parallelization constraints.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateClass {
    Xy,
    Z,
    Tqg,
    Shuttle,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Tqg | GateKind::Swap => 2,
            _ => 1,
        }
    }

    pub fn is_rotation(self) -> bool {
        matches!(self, GateKind::Rx | GateKind::Ry | GateKind::Rz)
    }

    pub fn duration_class(self) -> DurationClass {
        match self {
            GateKind::Rx | GateKind::Ry | GateKind::Rz => DurationClass::Single,
            GateKind::Tqg => DurationClass::Two,
            GateKind::Shuttle => DurationClass::Shuttle,
            GateKind::Swap => DurationClass::Swap,
        }
    }

    pub fn class(self) -> GateClass {
        match self {
            GateKind::Rx | GateKind::Ry => GateClass::Xy,
            GateKind::Rz => GateClass::Z,
            GateKind::Tqg | GateKind::Swap => GateClass::Tqg,
            GateKind::Shuttle => GateClass::Shuttle,
        }
    }

    pub fn mnemonic(self) -> &'static str {
        match self {
            GateKind::Rx => "rx",
            GateKind::Ry => "ry",
            GateKind::Rz => "rz",
            GateKind::Tqg => "cz",
            GateKind::Shuttle => "shuttle",
            GateKind::Swap => "swap",
        }
    }
}

/// Source spelling of a two-qubit gate. `cx` may be charged a native
/// decomposition multiplier by the noise configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TqgFlavor {
    Cz,
    Cx,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    /// Rotation angle in radians.
    pub angle: Option<f64>,
    pub flavor: Option<TqgFlavor>,
}

impl Gate {
    pub fn rotation(kind: GateKind, qubit: usize, angle: f64) -> Gate {
        debug_assert!(kind.is_rotation());
        Gate {
            kind,
            qubits: vec![qubit],
            angle: Some(angle),
            flavor: None,
        }
    }

    pub fn rx(q: usize, angle: f64) -> Gate {
        Gate::rotation(GateKind::Rx, q, angle)
    }

    pub fn ry(q: usize, angle: f64) -> Gate {
        Gate::rotation(GateKind::Ry, q, angle)
    }

    pub fn rz(q: usize, angle: f64) -> Gate {
        Gate::rotation(GateKind::Rz, q, angle)
    }

    pub fn cz(a: usize, b: usize) -> Gate {
        Gate {
            kind: GateKind::Tqg,
            qubits: vec![a, b],
            angle: None,
            flavor: Some(TqgFlavor::Cz),
        }
    }

    pub fn cx(a: usize, b: usize) -> Gate {
        Gate {
            flavor: Some(TqgFlavor::Cx),
            ..Gate::cz(a, b)
        }
    }

    pub fn swap(a: usize, b: usize) -> Gate {
        Gate {
            kind: GateKind::Swap,
            qubits: vec![a, b],
            angle: None,
            flavor: None,
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match (self.kind, self.flavor) {
            (GateKind::Tqg, Some(TqgFlavor::Cx)) => "cx",
            (k, _) => k.mnemonic(),
        };
        f.write_str(name)?;
        if let Some(a) = self.angle {
            write!(f, "({a})")?;
        }
        let ops: Vec<String> = self.qubits.iter().map(|q| format!("q[{q}]")).collect();
        write!(f, " {}", ops.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircuitError {
    #[error("line {line}: syntax error: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: operand q[{index}] out of range for {n_qubits} qubits")]
    OperandOutOfRange {
        line: usize,
        index: usize,
        n_qubits: usize,
    },
    #[error("line {line}: unsupported statement `{name}`")]
    Unsupported { line: usize, name: String },
    #[error("gate {index}: {message}")]
    InvalidGate { index: usize, message: String },
}

/// A logical circuit: qubit count plus gates in program order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub name: String,
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    /// Builds a circuit after checking operand counts and ranges.
    pub fn new(
        name: impl Into<String>,
        n_qubits: usize,
        gates: Vec<Gate>,
    ) -> Result<Circuit, CircuitError> {
        for (index, g) in gates.iter().enumerate() {
            let bad = |message: String| CircuitError::InvalidGate { index, message };
            if g.kind == GateKind::Shuttle {
                return Err(bad("shuttles are compiler-internal".into()));
            }
            if g.qubits.len() != g.kind.arity() {
                return Err(bad(format!("expected {} operands", g.kind.arity())));
            }
            if g.kind.arity() == 2 && g.qubits[0] == g.qubits[1] {
                return Err(bad("two-qubit gate operands must differ".into()));
            }
            if let Some(&q) = g.qubits.iter().find(|&&q| q >= n_qubits) {
                return Err(bad(format!("operand {q} out of range")));
            }
            if g.kind.is_rotation() != g.angle.is_some() {
                return Err(bad("rotations carry an angle, other gates do not".into()));
            }
        }
        Ok(Circuit {
            name: name.into(),
            n_qubits,
            gates,
        })
    }

    pub fn dag(&self) -> Dag {
        Dag::from_operands(self.gates.iter().map(|g| g.qubits.as_slice()))
    }

    pub fn count(&self, kind: GateKind) -> usize {
        self.gates.iter().filter(|g| g.kind == kind).count()
    }
}
