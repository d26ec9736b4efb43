use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A caller-supplied value is malformed or violates a precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A numeric input lies outside the region where the formula is defined.
    #[error("{name} = {value} outside domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    /// Every rate denominator vanished for the given attack.
    #[error("degenerate attack: {0}")]
    DegenerateAttack(&'static str),

    #[error("rejection sampling gave up after {0} draws")]
    SamplingBudget(u64),

    #[error("insufficient sift: {basis} basis kept {got} rounds, need {need}")]
    InsufficientSift {
        basis: &'static str,
        got: u64,
        need: u64,
    },

    #[error("no secure distance: key rate is not positive at L = 0")]
    NoSecureDistance,

    #[error("parse error: {0}")]
    Parse(String),
}

pub(crate) fn check_unit_half(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && (0.0..=0.5).contains(&value) {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            domain: "[0, 1/2]",
        })
    }
}
