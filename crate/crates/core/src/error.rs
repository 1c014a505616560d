use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Raised when |G_{Y\Z}| <= |G_{Z\Y}|: the construction only covers the
    /// positive secrecy capacity case.
    #[error("non-positive secrecy: |G_bob| = {g_bob} <= |G_eve| = {g_eve}")]
    NonPositiveSecrecy { g_bob: usize, g_eve: usize },

    #[error("enumeration budget exceeded: need {required} table entries, budget {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("mismatched inputs: {0}")]
    Mismatch(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
