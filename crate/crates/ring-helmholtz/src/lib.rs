//! Azimuthal Fourier coefficients of the three-dimensional Helmholtz Green
//! function in circular-cylindrical coordinates, with field assembly for thin
//! circular ring sources.
//!
//! For a ring of radius `R` at height `Z` and a field point `(r, z)`, the
//! free-space Helmholtz kernel factorizes into azimuthal modes; the modal
//! coefficient `G^m(beta; r, z, R, Z)` is what everything here computes. The
//! crate evaluates it by seven independent routes so that any value can be
//! cross-validated without external reference data:
//!
//! - three integral representations ([`quadrature`]): the defining angular
//!   integral, a spectral Bessel integral, and an evanescent-regime Laplace
//!   integral for purely imaginary wavenumber;
//! - four series families ([`series`]): Hankel, Bessel J/Y, toroidal
//!   Legendre (Q-form plus a unified P-form), and a `1F2`-kernel series;
//! - two closed double-hypergeometric forms ([`hyper2d`]): a Horn `H3` series
//!   for the standing part and a Kampe de Feriet series for the radiating
//!   part.
//!
//! Derivative-level correctness is checked against two fourth-order ordinary
//! differential equations satisfied by the coefficients ([`odecheck`]), and
//! [`ringfield`] assembles fields of arbitrary ring sources from the modal
//! coefficients. [`coeffs`] provides method dispatch with an automatic
//! regime selector.
//!
//! The crate is `no_std`-compatible (requires `alloc`); the `std` feature
//! (default) only forwards to `num-complex`.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod coeffs;
pub mod efl;
pub mod hyper2d;
mod math;
pub mod odecheck;
pub mod params;
pub mod quadrature;
pub mod ringfield;
pub mod series;
pub mod specfun;
pub mod xf;

pub use coeffs::{compute, CoeffReport, Method};
pub use hyper2d::{MethodReport, Partials, SeriesPolicy};
pub use params::{derive, Dimensionless, RingConfig};
pub use series::CoeffValue;

use core::fmt;

/// Errors shared by every evaluation route in the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Error {
    /// The field point coincides with the ring (omega = 1): every
    /// representation is singular there.
    OnRing,
    /// A radius was zero, negative, or non-finite.
    InvalidRadius,
    /// The wavenumber has negative imaginary part, which makes the outgoing
    /// kernel grow at infinity.
    BetaLowerHalfPlane,
    /// A coordinate or wavenumber component was NaN or infinite.
    NonFinite,
    /// An input lay outside the domain an operation is defined on
    /// (for example omega <= 1 for the toroidal harmonics).
    Domain(&'static str),
    /// The requested method does not apply to the given configuration
    /// (for example the spectral integral with complex wavenumber).
    Unsupported(&'static str),
    /// A series or adaptive quadrature hit its budget before reaching the
    /// requested tolerance.
    NonConvergence(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::OnRing => write!(f, "field point lies on the ring (omega = 1)"),
            Error::InvalidRadius => write!(f, "radii must be positive and finite"),
            Error::BetaLowerHalfPlane => {
                write!(f, "wavenumber must satisfy Im(beta) >= 0")
            }
            Error::NonFinite => write!(f, "non-finite input"),
            Error::Domain(what) => write!(f, "domain error: {what}"),
            Error::Unsupported(what) => write!(f, "method not applicable: {what}"),
            Error::NonConvergence(what) => write!(f, "failed to converge: {what}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
