//! Crate-wide error type.

use core::fmt;

/// Errors produced by constructions and evaluations in this crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Theta series reached `max_terms` before the tail bound was met.
    NonConvergent { terms: usize },
    /// The nome must satisfy |q| < 1.
    InvalidNome { abs: f64 },
    /// Modular parameter must have Im(tau) > 0.
    InvalidTau { im: f64 },
    /// Evaluation point is too close to a zero of the denominator.
    NearPole { abs_denominator: f64 },
    /// Spin must satisfy 2s >= 1.
    InvalidSpin { twice_s: u32 },
    /// Lattice dimensions are invalid for the requested boundary.
    InvalidDims { axis: usize, len: usize },
    /// k-th neighbor range wraps ambiguously: 2k >= L along some axis.
    RangeTooLarge { range: usize, axis_len: usize },
    /// State length does not match dim^V.
    DimensionMismatch { expected: usize, got: usize },
    /// No integer (p, q) solves the commensurability condition within
    /// tolerance. Carries the per-axis residuals.
    NotCommensurate { residuals: alloc::vec::Vec<f64> },
    /// XY-sector states need every L_alpha divisible by 4 (2 for the
    /// alternative spin-1 family).
    WrongLength { axis: usize, len: usize, required_multiple: usize },
    /// Magnon number outside 0..=2sV, or invalid subsystem volume.
    OutOfRange { value: usize, max: usize },
    /// Instance exceeds the desk-scale budget for the requested path.
    TooLarge { size: usize, budget: usize },
    /// Both coefficient channels of a local vector vanished.
    DegenerateArgument,
    /// The requested quantity has no closed form for this variant.
    NoClosedForm,
    /// Operation is not defined for this model variant.
    WrongVariant,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonConvergent { terms } => {
                write!(f, "theta series not converged after {terms} terms")
            }
            Error::InvalidNome { abs } => write!(f, "nome must satisfy |q| < 1, got |q| = {abs}"),
            Error::InvalidTau { im } => write!(f, "tau must have Im(tau) > 0, got Im = {im}"),
            Error::NearPole { abs_denominator } => {
                write!(f, "evaluation too close to a pole (|denom| = {abs_denominator:.3e})")
            }
            Error::InvalidSpin { twice_s } => write!(f, "invalid spin: 2s = {twice_s}"),
            Error::InvalidDims { axis, len } => {
                write!(f, "invalid lattice extent {len} along axis {axis}")
            }
            Error::RangeTooLarge { range, axis_len } => {
                write!(f, "neighbor range {range} wraps ambiguously for L = {axis_len}")
            }
            Error::DimensionMismatch { expected, got } => {
                write!(f, "state length {got} does not match dim^V = {expected}")
            }
            Error::NotCommensurate { residuals } => {
                write!(f, "eta not commensurate, residuals {residuals:?}")
            }
            Error::WrongLength { axis, len, required_multiple } => write!(
                f,
                "L = {len} along axis {axis} must be a multiple of {required_multiple}"
            ),
            Error::OutOfRange { value, max } => write!(f, "value {value} out of range 0..={max}"),
            Error::TooLarge { size, budget } => {
                write!(f, "instance size {size} exceeds budget {budget}")
            }
            Error::DegenerateArgument => write!(f, "both local coefficient channels vanished"),
            Error::NoClosedForm => write!(f, "no closed-form expression for this variant"),
            Error::WrongVariant => write!(f, "operation not defined for this model variant"),
        }
    }
}

impl core::error::Error for Error {}
