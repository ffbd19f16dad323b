use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("enumeration budget exceeded: {what} needs {needed} elements, budget is {budget}")]
    BudgetExceeded {
        what: String,
        needed: u128,
        budget: u64,
    },
    #[error("check failed: {0}")]
    CheckFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}

pub(crate) fn precondition<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(msg.into()))
}

pub(crate) fn check_failed<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::CheckFailed(msg.into()))
}

pub(crate) fn budget_check(what: &str, needed: u128, budget: u64) -> Result<()> {
    if needed > budget as u128 {
        Err(Error::BudgetExceeded {
            what: what.to_string(),
            needed,
            budget,
        })
    } else {
        Ok(())
    }
}
