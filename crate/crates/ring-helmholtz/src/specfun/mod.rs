//! Special functions backing the series and integral evaluators.
//!
//! Everything the coefficient formulas consume lives here: gamma machinery,
//! half-integer-order Bessel ladders (in extended-exponent arithmetic, since
//! orders reach the hundreds), integer-order Bessel functions for the
//! integrand routes, associated Legendre functions of the first kind above
//! the cut, toroidal harmonics of the second kind, and the Gauss
//! hypergeometric series.
//!
//! The toroidal machinery works throughout with the scaled combination
//! `S_nu^m(w) = (w^2-1)^(nu/2) P_nu^m(w / sqrt(w^2-1))`, which satisfies
//! pure three-term recurrences in both degree and order and absorbs the
//! algebraic prefactors that would otherwise overflow; see
//! [`legendre`](self) internals.

mod bessel;
mod gamma;
mod hyp;
mod legendre;

pub use bessel::{bessel_half, BesselKind};
pub(crate) use bessel::{
    bessel_i_scaled_integer, bessel_j_integer, i_half_scaled_ladder, j_half_ladder,
    k_half_ladder, y_half_ladder,
};
pub use gamma::{gamma, pochhammer};
pub(crate) use gamma::{factorial_xf, gamma_half_xf, ln_gamma};
pub use hyp::gauss_2f1;
pub(crate) use hyp::gauss_2f1_xf;
pub use legendre::{legendre_p, legendre_q_toroidal};
pub(crate) use legendre::{
    q_toroidal_om, s_half_degrees, s_half_degrees_efl, s_int_degrees, s_int_degrees_efl, OmegaXf,
};

/// An index that is exactly an integer or half-odd-integer, stored as twice
/// its value so no floating rounding can creep into order/degree bookkeeping.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HalfInt {
    twice: i32,
}

impl HalfInt {
    /// The integer `n`.
    pub fn int(n: i32) -> HalfInt {
        HalfInt { twice: 2 * n }
    }

    /// The half-odd-integer `n + 1/2`.
    pub fn half(n: i32) -> HalfInt {
        HalfInt { twice: 2 * n + 1 }
    }

    /// Construct from twice the value.
    pub fn from_twice(twice: i32) -> HalfInt {
        HalfInt { twice }
    }

    /// Twice the value.
    pub fn twice(&self) -> i32 {
        self.twice
    }

    /// The value as binary64 (exact: halves are representable).
    pub fn value(&self) -> f64 {
        self.twice as f64 * 0.5
    }

    /// `Some(n)` when the index is the integer `n`.
    pub fn as_int(&self) -> Option<i32> {
        if self.twice % 2 == 0 {
            Some(self.twice / 2)
        } else {
            None
        }
    }

    /// `Some(n)` when the index is `n + 1/2`.
    pub fn as_half(&self) -> Option<i32> {
        if self.twice.rem_euclid(2) == 1 {
            Some((self.twice - 1) / 2)
        } else {
            None
        }
    }
}
