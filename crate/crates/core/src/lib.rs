//! Fock-basis representations of single-mode Gaussian unitaries and noisy
//! Gaussian states built on two-variable Hermite (Hermite–Kampé de Fériet)
//! polynomials.
//!
//! * [`hlpoly`]: one- and two-index heat polynomials, incomplete Hermite
//!   polynomials, the Mehler kernel, generalized Laguerre polynomials.
//! * [`unitary`]: closed-form `⟨m|S(z) D(α) R(φ)|n⟩`.
//! * [`state`]: closed-form `⟨m|ρ|n⟩` for `ρ = U ρ_th U†`, its series
//!   representation and the displaced, squeezed and pure special cases.
//! * [`oracle`]: brute-force reference built from truncated ladder operators
//!   and matrix exponentials.
//! * [`verify`]: path-pair comparisons between all of the above.

pub mod cli;
pub mod error;
pub mod hlpoly;
pub mod matrix;
pub mod numeric;
pub mod oracle;
mod scale;
pub mod state;
pub mod unitary;
pub mod verify;

pub use num_complex::Complex64;

/// Complex scalar used throughout the crate.
pub type ComplexScalar = Complex64;

pub use error::{FockError, Result};
pub use matrix::ComplexMatrix;
pub use state::{StateDerived, StateParams};
pub use unitary::{BosonicParams, OrderingParams};
