//! The architecture design space: variables, interdependency rules,
//! enumeration of valid architectures and the inter-architecture distance.

mod arch;
mod rules;
mod space;

use thiserror::Error;

pub use arch::{
    canonical_cardinality, ArchId, Architecture, Cap, Degree, Router, SingleQubitImpl, Variable,
    ZRotImpl, NUM_VARIABLES,
};
pub use rules::{Literal, Relation, Rule, RuleSet, ValidationResult, RULES_FORMAT_TAG};
pub use space::{distance, DesignSpace, Enumerate, DOMAINS_FORMAT_TAG};

/// A field value outside its declared domain.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("value `{value}` is outside the domain of `{variable}`")]
pub struct DomainError {
    pub variable: String,
    pub value: String,
}

#[derive(Debug, Error)]
pub enum DesignSpaceError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("duplicate value in the domain of `{0}`")]
    DuplicateValue(String),
    #[error("bad restriction `{0}`, expected `var=v1,v2,...`")]
    BadRestriction(String),
}
