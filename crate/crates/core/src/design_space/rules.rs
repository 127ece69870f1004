//! Declarative interdependency rules and their text format.
//!
//! A rule is an implication `premise => consequence` over field literals.
//! An architecture violates a rule when every premise literal holds and at
//! least one consequence literal does not. The file format is line based:
//!
//! ```text
//! format = spindse-rules/1
//! # comment
//! rule global-forces-xyD-NA: single_qubit_impl=Global => xyD=-1
//! rule sequential-serializes: single_qubit_impl=Sequential => xy_z=0 & xyD=-1
//! ```
//!
//! Literals are `var=value` or `var!=value`, joined by `&`.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::arch::{Architecture, Variable, NUM_VARIABLES};
use super::{DesignSpaceError, DomainError};

pub const RULES_FORMAT_TAG: &str = "spindse-rules/1";

const SHIPPED_RULES: &str = include_str!("../../data/default.rules");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    Eq,
    Ne,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub var: Variable,
    pub rel: Relation,
    pub value: i32,
}

impl Literal {
    pub fn eq(var: Variable, value: i32) -> Self {
        Literal {
            var,
            rel: Relation::Eq,
            value,
        }
    }

    pub fn ne(var: Variable, value: i32) -> Self {
        Literal {
            var,
            rel: Relation::Ne,
            value,
        }
    }

    pub fn holds(&self, codes: &[i32; NUM_VARIABLES]) -> bool {
        let v = codes[self.var.index()];
        match self.rel {
            Relation::Eq => v == self.value,
            Relation::Ne => v != self.value,
        }
    }

    fn parse(text: &str) -> Result<Literal, String> {
        let (name, rel, value) = if let Some((n, v)) = text.split_once("!=") {
            (n, Relation::Ne, v)
        } else if let Some((n, v)) = text.split_once('=') {
            (n, Relation::Eq, v)
        } else {
            return Err(format!(
                "expected `var=value` or `var!=value`, got `{}`",
                text.trim()
            ));
        };
        let var = Variable::from_name(name)
            .ok_or_else(|| format!("unknown variable `{}`", name.trim()))?;
        let value = var.parse_value(value).map_err(|e| format!("{e}"))?;
        Ok(Literal { var, rel, value })
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.rel {
            Relation::Eq => "=",
            Relation::Ne => "!=",
        };
        write!(
            f,
            "{}{}{}",
            self.var.name(),
            op,
            self.var.format_value(self.value)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rule {
    pub id: String,
    pub premise: Vec<Literal>,
    pub consequence: Vec<Literal>,
}

impl Rule {
    pub fn violated_by(&self, codes: &[i32; NUM_VARIABLES]) -> bool {
        self.premise.iter().all(|l| l.holds(codes))
            && !self.consequence.iter().all(|l| l.holds(codes))
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule {}: ", self.id)?;
        write_literals(f, &self.premise)?;
        f.write_str(" => ")?;
        write_literals(f, &self.consequence)
    }
}

fn write_literals(f: &mut fmt::Formatter<'_>, lits: &[Literal]) -> fmt::Result {
    if lits.is_empty() {
        return f.write_str("true");
    }
    for (i, l) in lits.iter().enumerate() {
        if i > 0 {
            f.write_str(" & ")?;
        }
        write!(f, "{l}")?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationResult {
    pub valid: bool,
    pub violated: Vec<String>,
}

/// Ordered list of rules.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RuleSet {
    pub rules: Vec<Rule>,
}

impl RuleSet {
    pub fn empty() -> Self {
        RuleSet::default()
    }

    /// The rule set shipped with the crate (`data/default.rules`).
    pub fn shipped() -> Self {
        RuleSet::parse(SHIPPED_RULES).expect("shipped rule file parses")
    }

    pub fn shipped_text() -> &'static str {
        SHIPPED_RULES
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn push(&mut self, rule: Rule) {
        self.rules.push(rule);
    }

    pub fn validate(&self, arch: &Architecture) -> ValidationResult {
        let codes = arch.codes();
        let violated: Vec<String> = self
            .rules
            .iter()
            .filter(|r| r.violated_by(&codes))
            .map(|r| r.id.clone())
            .collect();
        ValidationResult {
            valid: violated.is_empty(),
            violated,
        }
    }

    /// Validates raw codes, rejecting values outside their domain first.
    pub fn validate_codes(
        &self,
        codes: &[i32; NUM_VARIABLES],
    ) -> Result<ValidationResult, DomainError> {
        let arch = Architecture::from_codes(codes)?;
        Ok(self.validate(&arch))
    }

    pub fn is_valid_codes(&self, codes: &[i32; NUM_VARIABLES]) -> bool {
        !self.rules.iter().any(|r| r.violated_by(codes))
    }

    pub fn parse(text: &str) -> Result<RuleSet, DesignSpaceError> {
        let mut rules = Vec::new();
        let mut saw_format = false;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| DesignSpaceError::Parse {
                line: line_no,
                message,
            };
            if let Some(rest) = line.strip_prefix("format") {
                let tag = rest.trim_start().strip_prefix('=').map(str::trim);
                if tag != Some(RULES_FORMAT_TAG) {
                    return Err(err(format!(
                        "unsupported format tag, expected `{RULES_FORMAT_TAG}`"
                    )));
                }
                saw_format = true;
                continue;
            }
            let body = line
                .strip_prefix("rule ")
                .ok_or_else(|| err("expected `rule <id>: <premise> => <consequence>`".into()))?;
            let (id, clause) = body
                .split_once(':')
                .ok_or_else(|| err("missing `:` after rule id".into()))?;
            let id = id.trim();
            if id.is_empty() || id.contains(char::is_whitespace) {
                return Err(err(format!("invalid rule id `{id}`")));
            }
            if rules.iter().any(|r: &Rule| r.id == id) {
                return Err(err(format!("duplicate rule id `{id}`")));
            }
            let (premise, consequence) = clause
                .split_once("=>")
                .ok_or_else(|| err("missing `=>`".into()))?;
            let premise = parse_literals(premise).map_err(&err)?;
            let consequence = parse_literals(consequence).map_err(&err)?;
            if consequence.is_empty() {
                return Err(err("empty consequence".into()));
            }
            rules.push(Rule {
                id: id.to_string(),
                premise,
                consequence,
            });
        }
        if !saw_format {
            return Err(DesignSpaceError::Parse {
                line: 0,
                message: format!("missing `format = {RULES_FORMAT_TAG}` line"),
            });
        }
        Ok(RuleSet { rules })
    }

    pub fn serialize(&self) -> String {
        let mut out = format!("format = {RULES_FORMAT_TAG}\n");
        for rule in &self.rules {
            out.push_str(&rule.to_string());
            out.push('\n');
        }
        out
    }

    /// Applies consequences of violated rules until the architecture is
    /// valid or no progress is possible.
    ///
    /// `Eq` consequences are assigned; a failing `Ne` literal moves the field
    /// to the first canonical value the literal admits. When consequences
    /// conflict (Sequential drive with pulse-based Z, say), the first premise
    /// literal of a rule that still fails is falsified and the consequences
    /// are applied again.
    pub fn repair(&self, arch: &Architecture) -> Architecture {
        let budget = 4 * self.rules.len().max(1);
        let mut codes = arch.codes();
        for _ in 0..budget {
            self.apply_consequences(&mut codes, budget);
            let Some(rule) = self.rules.iter().find(|r| r.violated_by(&codes)) else {
                break;
            };
            match rule.premise.first() {
                Some(lit) => codes[lit.var.index()] = lit.negated_value(),
                None => break,
            }
        }
        Architecture::from_codes(&codes).expect("repair keeps codes in domain")
    }

    fn apply_consequences(&self, codes: &mut [i32; NUM_VARIABLES], budget: usize) {
        for _ in 0..budget {
            let Some(rule) = self.rules.iter().find(|r| r.violated_by(codes)) else {
                return;
            };
            for lit in &rule.consequence {
                if !lit.holds(codes) {
                    codes[lit.var.index()] = lit.satisfying_value();
                }
            }
        }
    }
}

impl Literal {
    /// A value that makes the literal hold.
    fn satisfying_value(&self) -> i32 {
        match self.rel {
            Relation::Eq => self.value,
            Relation::Ne => self.other_value(),
        }
    }

    /// A value that makes the literal fail.
    fn negated_value(&self) -> i32 {
        match self.rel {
            Relation::Eq => self.other_value(),
            Relation::Ne => self.value,
        }
    }

    fn other_value(&self) -> i32 {
        *self
            .var
            .canonical_domain()
            .iter()
            .find(|&&c| c != self.value)
            .unwrap_or(&self.value)
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn parse_literals(text: &str) -> Result<Vec<Literal>, String> {
    let text = text.trim();
    if text.is_empty() || text == "true" {
        return Ok(Vec::new());
    }
    text.split('&').map(Literal::parse).collect()
}
