//! Reader and writer for the supported quantum-assembly subset.
//!
//! Accepted statements: the `OPENQASM` header, `include`, `qreg`,
//! `rx/ry/rz(<expr>) q[i]`, `cz/cx/swap q[i],q[j]` and `//` comments.
//! Angle expressions support numbers, `pi`, unary minus, `+ - * /` and
//! parentheses. Everything else (measurement, classical registers,
//! conditionals, custom gates) is rejected.

use std::f64::consts::PI;

use super::{Circuit, CircuitError, Gate, GateKind};

const NAME_PREFIX: &str = "// circuit:";

/// Parses a circuit. A leading `// circuit: <name>` comment names it.
pub fn parse_circuit(text: &str) -> Result<Circuit, CircuitError> {
    let name = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty())
        .and_then(|l| l.strip_prefix(NAME_PREFIX))
        .map(|n| n.trim().to_string())
        .unwrap_or_else(|| "circuit".to_string());
    parse_named(&name, text)
}

pub fn parse_named(name: &str, text: &str) -> Result<Circuit, CircuitError> {
    let mut registers: Vec<(String, usize, usize)> = Vec::new();
    let mut n_qubits = 0usize;
    let mut gates = Vec::new();

    for (line, stmt) in statements(text)? {
        let syntax = |message: &str| CircuitError::Syntax {
            line,
            message: message.to_string(),
        };
        let (head, rest) = split_head(&stmt);
        match head.as_str() {
            "OPENQASM" | "include" => {}
            "qreg" => {
                let (reg, size) =
                    parse_indexed(rest).ok_or_else(|| syntax("expected `qreg name[size]`"))?;
                if registers.iter().any(|(r, _, _)| *r == reg) {
                    return Err(syntax("register declared twice"));
                }
                registers.push((reg, n_qubits, size));
                n_qubits += size;
            }
            "rx" | "ry" | "rz" => {
                let kind = match head.as_str() {
                    "rx" => GateKind::Rx,
                    "ry" => GateKind::Ry,
                    _ => GateKind::Rz,
                };
                let rest = rest.trim_start();
                let inner_end = matching_paren(rest).ok_or_else(|| syntax("expected `(angle)`"))?;
                let angle = eval_expr(&rest[1..inner_end]).map_err(|m| syntax(&m))?;
                let ops = parse_operands(&rest[inner_end + 1..], &registers, n_qubits, line)?;
                if ops.len() != 1 {
                    return Err(syntax("rotation takes one operand"));
                }
                gates.push(Gate::rotation(kind, ops[0], angle));
            }
            "cz" | "cx" | "swap" => {
                let ops = parse_operands(rest, &registers, n_qubits, line)?;
                if ops.len() != 2 {
                    return Err(syntax("two-qubit gate takes two operands"));
                }
                if ops[0] == ops[1] {
                    return Err(syntax("two-qubit gate operands must differ"));
                }
                gates.push(match head.as_str() {
                    "cz" => Gate::cz(ops[0], ops[1]),
                    "cx" => Gate::cx(ops[0], ops[1]),
                    _ => Gate::swap(ops[0], ops[1]),
                });
            }
            "" => return Err(syntax("empty statement")),
            other => {
                return Err(CircuitError::Unsupported {
                    line,
                    name: other.to_string(),
                })
            }
        }
    }
    Circuit::new(name, n_qubits, gates)
}

/// Writes a circuit in the accepted subset with a single register `q`.
pub fn serialize_circuit(circuit: &Circuit) -> String {
    let mut out = format!(
        "{NAME_PREFIX} {}\nOPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[{}];\n",
        circuit.name, circuit.n_qubits
    );
    for g in &circuit.gates {
        out.push_str(&g.to_string());
        out.push_str(";\n");
    }
    out
}

/// Splits into `;`-terminated statements, tagging each with the line on
/// which it starts.
fn statements(text: &str) -> Result<Vec<(usize, String)>, CircuitError> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut start_line = 1;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let code = match raw.find("//") {
            Some(i) => &raw[..i],
            None => raw,
        };
        for piece in code.split_inclusive(';') {
            if current.trim().is_empty() {
                start_line = line_no;
            }
            if let Some(body) = piece.strip_suffix(';') {
                current.push_str(body);
                out.push((start_line, current.trim().to_string()));
                current.clear();
            } else {
                current.push_str(piece);
                current.push(' ');
            }
        }
    }
    if !current.trim().is_empty() {
        return Err(CircuitError::Syntax {
            line: start_line,
            message: "missing `;`".into(),
        });
    }
    Ok(out)
}

fn split_head(stmt: &str) -> (String, &str) {
    let end = stmt
        .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
        .unwrap_or(stmt.len());
    (stmt[..end].to_string(), &stmt[end..])
}

fn parse_indexed(text: &str) -> Option<(String, usize)> {
    let text = text.trim();
    let open = text.find('[')?;
    let close = text.rfind(']')?;
    if close != text.len() - 1 || close < open {
        return None;
    }
    let name = text[..open].trim();
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return None;
    }
    let index = text[open + 1..close].trim().parse().ok()?;
    Some((name.to_string(), index))
}

fn parse_operands(
    text: &str,
    registers: &[(String, usize, usize)],
    n_qubits: usize,
    line: usize,
) -> Result<Vec<usize>, CircuitError> {
    text.split(',')
        .map(|op| {
            let (reg, idx) = parse_indexed(op).ok_or_else(|| CircuitError::Syntax {
                line,
                message: format!("bad operand `{}`", op.trim()),
            })?;
            let (_, offset, size) =
                registers
                    .iter()
                    .find(|(r, _, _)| *r == reg)
                    .ok_or_else(|| CircuitError::Syntax {
                        line,
                        message: format!("unknown register `{reg}`"),
                    })?;
            if idx >= *size {
                return Err(CircuitError::OperandOutOfRange {
                    line,
                    index: idx,
                    n_qubits: if registers.len() == 1 {
                        n_qubits
                    } else {
                        *size
                    },
                });
            }
            Ok(offset + idx)
        })
        .collect()
}

fn matching_paren(text: &str) -> Option<usize> {
    if !text.starts_with('(') {
        return None;
    }
    let mut depth = 0i32;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
    }
    None
}

/// Recursive-descent evaluator for angle expressions.
fn eval_expr(text: &str) -> Result<f64, String> {
    let tokens = tokenize(text)?;
    let mut p = ExprParser { tokens, pos: 0 };
    let v = p.sum()?;
    if p.pos != p.tokens.len() {
        return Err(format!("unexpected token in angle `{}`", text.trim()));
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<Tok>, String> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if "+-*/()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len()
                && (chars[i].is_ascii_digit()
                    || chars[i] == '.'
                    || chars[i] == 'e'
                    || chars[i] == 'E'
                    || ((chars[i] == '-' || chars[i] == '+') && matches!(chars[i - 1], 'e' | 'E')))
            {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Tok::Num(
                s.parse().map_err(|_| format!("bad number `{s}`"))?,
            ));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            match s.as_str() {
                "pi" => out.push(Tok::Num(PI)),
                _ => return Err(format!("unknown identifier `{s}`")),
            }
        } else {
            return Err(format!("unexpected character `{c}`"));
        }
    }
    Ok(out)
}

struct ExprParser {
    tokens: Vec<Tok>,
    pos: usize,
}

impl ExprParser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn sum(&mut self) -> Result<f64, String> {
        let mut v = self.product()?;
        while let Some(Tok::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.product()?;
            v = if op == '+' { v + rhs } else { v - rhs };
        }
        Ok(v)
    }

    fn product(&mut self) -> Result<f64, String> {
        let mut v = self.unary()?;
        while let Some(Tok::Op(op @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.unary()?;
            v = if op == '*' { v * rhs } else { v / rhs };
        }
        Ok(v)
    }

    fn unary(&mut self) -> Result<f64, String> {
        match self.peek().cloned() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<f64, String> {
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(v)
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let v = self.sum()?;
                if self.peek() != Some(&Tok::Op(')')) {
                    return Err("missing `)`".into());
                }
                self.pos += 1;
                Ok(v)
            }
            _ => Err("expected a number, `pi` or `(`".into()),
        }
    }
}
