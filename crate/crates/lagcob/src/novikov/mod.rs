//! Novikov ring arithmetic, curved filtered complexes, leading-order Maurer-Cartan analysis
//! and the worked Floer examples.

mod complex;
mod element;
mod examples;

use thiserror::Error;

use crate::cochains::CochainError;

pub use complex::{
    bareiss_rank, chain_add, chain_scale, chain_val, mc_leading_order, Arrow, Certificate, Chain, FilteredComplex,
    MCResult, MCStatus,
};
pub use element::{
    format_rational, int, nov_add, nov_mul, nov_truncate, nov_val, rational, to_f64, NovikovElement, Q,
    DEFAULT_CUTOFF, EXPONENT_TOL,
};
pub use examples::{
    bounding_cochain_pushforward, build_complex, homotopy_data_check, solve_leading_deformation, ExampleSpec,
    HomotopyCheck, HomotopyReport, LeadingDeformation, PushforwardReport, KAB,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NovikovError {
    #[error("unregistered example {0}")]
    Unregistered(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("no active generator labelled {0}")]
    UnknownGenerator(String),
    #[error("arrow {src} -> {dst} goes from degree {from} to {to}")]
    Degree { src: String, dst: String, from: i64, to: i64 },
    #[error("arrow {src} -> {dst} has weight of negative valuation {val}")]
    NegativeWeight { src: String, dst: String, val: f64 },
    #[error("curvature on {0} has non-positive valuation")]
    CurvedAtZero(String),
    #[error("homology of the curved complex {0} is undefined")]
    Curved(String),
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("leading exponent {exponent} is not positive")]
    NonPositive { exponent: f64 },
    #[error("identity violated: {0}")]
    Identity(String),
    #[error(transparent)]
    Cochain(#[from] CochainError),
}
