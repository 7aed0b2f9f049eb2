//! Crate-wide error type.

use std::fmt;

/// Errors produced by the arithmetic and verification layers.
///
/// Variants are deliberately coarse: callers either report the message or
/// branch on the handful of cases that are part of an operation's contract.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoreError {
    /// An operand that must be a unit has positive valuation.
    NonUnit(String),
    /// Input to the p-adic logarithm is not a principal unit.
    NotPrincipalUnit(String),
    /// A quadratic has no unit root at this precision (both roots non-units).
    NonOrdinary(String),
    /// Both roots of the quadratic are units; the unit root is not selectable.
    AmbiguousRoots(String),
    /// An exact division failed; signals an upstream inconsistency.
    NotDivisible(String),
    /// A value with negative valuation cannot be represented in `Z/p^k`.
    NegativeValuation(String),
    /// Supplied shell data contradicts the character tails.
    TailMismatch(String),
    /// The requested product leaves the finite shell-plus-tail data model.
    TailNotRepresentable(String),
    /// A lattice is not `U_p`-stable at the given truncation and precision.
    NotStable(String),
    /// A basis has a hidden dependency modulo `p^k`.
    RankDeficient(String),
    /// The truncation window is too short for the requested verification.
    WindowTooSmall(String),
    /// The computation needs more p-adic precision to separate eigenvalues.
    RaisePrecision(String),
    /// The representation kind has no Kirillov model.
    NoKirillovModel,
    /// A case the finite data model deliberately does not cover.
    Unsupported(String),
    /// Catch-all for malformed parameters.
    InvalidParams(String),
}

impl fmt::Display for CoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreError::NonUnit(m) => write!(f, "non-unit operand: {m}"),
            CoreError::NotPrincipalUnit(m) => write!(f, "not a principal unit: {m}"),
            CoreError::NonOrdinary(m) => write!(f, "non-ordinary input: {m}"),
            CoreError::AmbiguousRoots(m) => write!(f, "ambiguous unit roots: {m}"),
            CoreError::NotDivisible(m) => write!(f, "exact division failed: {m}"),
            CoreError::NegativeValuation(m) => {
                write!(f, "insufficient precision for negative valuation: {m}")
            }
            CoreError::TailMismatch(m) => write!(f, "shell data contradicts tails: {m}"),
            CoreError::TailNotRepresentable(m) => write!(f, "tail not representable: {m}"),
            CoreError::NotStable(m) => {
                write!(f, "not U_p-stable at this truncation/precision: {m}")
            }
            CoreError::RankDeficient(m) => write!(f, "rank deficient mod p^k: {m}"),
            CoreError::WindowTooSmall(m) => write!(f, "increase truncation: {m}"),
            CoreError::RaisePrecision(m) => write!(f, "raise precision: {m}"),
            CoreError::NoKirillovModel => write!(f, "no Kirillov model for this kind"),
            CoreError::Unsupported(m) => write!(f, "unsupported: {m}"),
            CoreError::InvalidParams(m) => write!(f, "invalid parameters: {m}"),
        }
    }
}

impl std::error::Error for CoreError {}
