//! Numerical tolerances shared by construction and verification.

/// Verification tolerance for representation identities (orthogonality,
/// multiplicativity).
pub const VERIFY: f64 = 1e-8;

/// Residual bound for composite constructions: round trips, action axioms,
/// equivariance of assembled automorphisms.
pub const ACCEPT: f64 = 1e-7;

/// A multiplicity is rejected as non-integral beyond `10 * VERIFY`.
pub const MULTIPLICITY: f64 = 10.0 * VERIFY;

/// Smallest singular value for a matrix to count as invertible.
pub const INVERTIBLE: f64 = 1e-6;

/// Random combinations tried when looking for an invertible intertwiner.
pub const LIFT_ATTEMPTS: usize = 32;
