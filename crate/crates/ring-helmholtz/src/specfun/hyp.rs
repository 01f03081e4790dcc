//! Gauss hypergeometric series inside the unit disc.
//!
//! Both evaluators sum the defining power series
//!
//! ```text
//! 2F1(a, b; c; z) = sum_j (a)_j (b)_j / ((c)_j j!) z^j
//! ```
//!
//! by the term-ratio recurrence, which avoids forming Pochhammer symbols or
//! factorials explicitly and therefore never overflows for the argument
//! ranges accepted here.  No analytic continuation is attempted: callers are
//! expected to have mapped their argument into |z| < 1 already, which is
//! always possible for the hypergeometric forms this crate needs.

use crate::xf::Xf;
use crate::{Error, Result};

/// Upper bound on series terms before giving up.
const MAX_TERMS: usize = 1_000_000;

/// Gauss hypergeometric function `2F1(a, b; c; z)` for real parameters and
/// real `|z| < 1`.
///
/// # Arguments
///
/// * `a`, `b` - numerator parameters, any reals.
/// * `c` - denominator parameter; non-positive integers are rejected because
///   the series hits a pole term.
/// * `z` - argument, must satisfy `|z| < 1` (the series is used verbatim).
///
/// # Commentary
///
/// Terms are accumulated with Kahan compensation.  Convergence is declared
/// once eight consecutive terms fail to move the sum at relative level
/// `1e-17`; a term that is exactly zero (terminating polynomial case) stops
/// the sum immediately.
pub fn gauss_2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if c <= 0.0 && c == crate::math::floor(c) {
        return Err(Error::Domain("2F1: c is a non-positive integer"));
    }
    if !(z.abs() < 1.0) {
        return Err(Error::Domain("2F1: series needs |z| < 1"));
    }
    let mut sum = 1.0f64;
    let mut comp = 0.0f64;
    let mut term = 1.0f64;
    let mut stagnant = 0u32;
    for j in 0..MAX_TERMS {
        let jf = j as f64;
        term *= (a + jf) * (b + jf) / ((c + jf) * (jf + 1.0)) * z;
        if term == 0.0 {
            return Ok(sum + comp);
        }
        let y = term - comp;
        let t = sum + y;
        comp = (sum - t) + y;
        sum = t;
        if term.abs() <= 1e-17 * sum.abs() {
            stagnant += 1;
            if stagnant >= 8 {
                return Ok(sum + comp);
            }
        } else {
            stagnant = 0;
        }
    }
    Err(Error::NonConvergence("2F1 series"))
}

/// Gauss hypergeometric series with an extended-precision argument and
/// accumulator.
///
/// Parameters stay in `f64` (they are small half-integers or integers for
/// every caller in this crate, so the per-term scale factors are exact);
/// only the argument, the running term and the sum carry expansion
/// precision.  Panics are avoided by construction: callers guarantee
/// `|z| < 1` and a valid `c`.
pub(crate) fn gauss_2f1_xf(a: f64, b: f64, c: f64, z: &Xf) -> Xf {
    let mut sum = Xf::from_f64(1.0);
    let mut term = sum;
    let mut stagnant = 0u32;
    for j in 0..5000usize {
        let jf = j as f64;
        term = term
            .mul(z)
            .scale(a + jf)
            .scale(b + jf)
            .div_f64((c + jf) * (jf + 1.0));
        if term.is_zero() {
            break;
        }
        sum = sum.add(&term);
        let t = term.to_f64().abs();
        let s = sum.to_f64().abs();
        if t <= 1e-200 * s {
            stagnant += 1;
            if stagnant >= 4 {
                break;
            }
        } else {
            stagnant = 0;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::legendre::legendre_q_toroidal;
    use crate::specfun::HalfInt;
    use crate::xf::Xf;
    use approx::assert_relative_eq;

    #[test]
    fn matches_reference_values() {
        // 2F1(1, 1; 2; z) = -ln(1 - z)/z, here at z = 1/2.
        let v = gauss_2f1(1.0, 1.0, 2.0, 0.5).unwrap();
        assert_relative_eq!(v, 2.0 * crate::math::ln(2.0), max_relative = 1e-14);

        let v = gauss_2f1(2.25, 1.75, 4.0, 1.0 / 9.0).unwrap();
        assert_relative_eq!(v, 1.121422581290259916964, max_relative = 1e-14);

        // Larger argument, slower convergence.
        let v = gauss_2f1(5.25, 4.75, 5.0, 0.64).unwrap();
        assert_relative_eq!(v, 163.9827073714930757439, max_relative = 1e-12);

        assert_eq!(gauss_2f1(1.5, 2.5, 3.0, 0.0).unwrap(), 1.0);

        // Terminating polynomial: a = -2 stops after the quadratic term,
        // 1 + (-2)(3)/4 z + (-2)(-1)(3)(4)/((4)(5) 2!) z^2 at z = 0.9.
        let v = gauss_2f1(-2.0, 3.0, 4.0, 0.9).unwrap();
        assert_relative_eq!(
            v,
            1.0 - 2.0 * 3.0 / 4.0 * 0.9 + (2.0 * 12.0) / (20.0 * 2.0) * 0.81,
            max_relative = 1e-15
        );
    }

    #[test]
    fn rejects_bad_domain() {
        assert!(gauss_2f1(1.0, 1.0, 0.0, 0.5).is_err());
        assert!(gauss_2f1(1.0, 1.0, -3.0, 0.5).is_err());
        assert!(gauss_2f1(1.0, 1.0, 2.0, 1.0).is_err());
        assert!(gauss_2f1(1.0, 1.0, 2.0, -1.5).is_err());
        // Negative non-integer c is fine.
        assert!(gauss_2f1(1.0, 1.0, -2.5, 0.5).is_ok());
    }

    #[test]
    fn extended_matches_f64_path() {
        for &(a, b, c, z) in &[
            (2.25, 1.75, 4.0, 1.0 / 9.0),
            (5.25, 4.75, 5.0, 0.64),
            (0.75, 1.25, 6.0, -0.55),
        ] {
            let wide = gauss_2f1_xf(a, b, c, &Xf::from_f64(z)).to_f64();
            let narrow = gauss_2f1(a, b, c, z).unwrap();
            assert_relative_eq!(wide, narrow, max_relative = 1e-13);
        }
    }

    /// Quadratic transformation linking the series to a half-integer-degree
    /// Legendre function of the second kind (DLMF 15.8 family):
    ///
    /// ```text
    /// 2F1(a, b; 2b; z) = 4^b / sqrt(pi) * Gamma(b + 1/2) / Gamma(2b - a)
    ///                    * z^-b (1 - z)^((b-a)/2) e^{i pi (a-b)}
    ///                    * Q_{b-1}^{b-a}(2/z - 1)
    /// ```
    ///
    /// At `a = 1/2, b = 3/2, z = 4/5` the right side reduces to
    /// `-20/(3 pi) * Q_{1/2}^1(1.5)`, which exercises the toroidal ladder.
    #[test]
    fn quadratic_transformation_consistency() {
        let lhs = gauss_2f1(0.5, 1.5, 3.0, 0.8).unwrap();
        assert_relative_eq!(lhs, 1.356280701236077107358, max_relative = 1e-13);

        let q = legendre_q_toroidal(1, HalfInt::int(1), 1.5).unwrap();
        assert_relative_eq!(q.re, -0.639132223081330956909, max_relative = 1e-12);
        assert_relative_eq!(q.im, 0.0, epsilon = 1e-300);

        let ratio = lhs / q.re;
        assert_relative_eq!(
            ratio,
            -20.0 / (3.0 * core::f64::consts::PI),
            max_relative = 1e-11
        );
    }
}
