//! Exact verification of the algebraic chain leading to the lower bounds on `S`.

pub mod axioms;
pub mod boxcert;
pub mod certificate;
pub mod ledger;
pub mod ratfn;
pub mod table;

use thiserror::Error;

pub use boxcert::{certify_nonnegative, BoxDomain, BoxOutcome, Range};
pub use certificate::{check, Certificate, Env, Hypothesis, Outcome, Relation, Term};
pub use ledger::{Ledger, LedgerConfig, Step, StepKind, StepReport, Verdict};
pub use ratfn::{Atom, AtomPower, RatFn, RatFnError};
pub use table::{expand_quadratic_form, BilinearTable, Entry};

#[derive(Debug, Error)]
pub enum ChainError {
    #[error("residual is not zero: {0}")]
    ResidualNonzero(String),
    #[error("unknown step {0}")]
    UnknownStep(String),
    #[error(transparent)]
    RatFn(#[from] RatFnError),
    #[error(transparent)]
    Bootstrap(#[from] crate::bootstrap::BootstrapError),
    #[error(transparent)]
    Constants(#[from] crate::constants::ConstantsError),
}
