//! Bessel-function ladders for half-integer and integer orders.
//!
//! Every evaluator here returns a whole ladder of orders at once, because the
//! series in this crate always consume consecutive orders `m + 1/2, m + 3/2,
//! ...` at a fixed argument.  Recurrences run in the direction in which the
//! target solution is the growing one:
//!
//! * `J` and scaled `I` ladders run downward (Miller's algorithm) from a
//!   trial seed well above the largest requested order, then normalise
//!   against a closed-form low-order value.
//! * `Y` and `K` ladders run upward from their closed-form seeds.
//!
//! All ladder arithmetic uses the extended-exponent floats from [`crate::efl`]
//! so that intermediate values may pass far beyond the binary64 range; only
//! the final conversion can saturate, which callers treat as an overflow
//! signal.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::efl::Efl;
use crate::math;

const PI: f64 = core::f64::consts::PI;

/// Extra orders above the turning point for downward Miller recursion.
///
/// Each spare step shrinks the contamination from the unwanted growing
/// solution by at least a factor of two, so sixty steps leave it below
/// `2^-120` relative.
const MILLER_GUARD: usize = 60;

/// Which Bessel function [`bessel_half`] evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BesselKind {
    /// First kind, `J_{n+1/2}`.
    J,
    /// Second kind, `Y_{n+1/2}`.
    Y,
    /// Hankel function of the first kind, `J + iY`.
    H1,
    /// Modified first kind, `I_{n+1/2}` (unscaled).
    I,
}

/// Bessel function of half-integer order `n + 1/2` at real `x > 0`.
///
/// # Arguments
///
/// * `kind` - which of the four standard functions to evaluate.
/// * `n` - the order is `n + 1/2`.
/// * `x` - argument, strictly positive.
///
/// # Commentary
///
/// The return type is complex so that `H1` fits the same signature; `J`, `Y`
/// and `I` come back with a zero imaginary part.  A `Y` value (or an
/// unscaled `I`) whose magnitude exceeds the binary64 range saturates to an
/// infinity, which callers use as an overflow signal rather than an error.
pub fn bessel_half(kind: BesselKind, n: u32, x: f64) -> Complex64 {
    debug_assert!(x > 0.0);
    let i = n as usize;
    match kind {
        BesselKind::J => Complex64::new(j_half_ladder(n, x)[i].to_f64(), 0.0),
        BesselKind::Y => Complex64::new(y_half_ladder(n, x)[i].to_f64(), 0.0),
        BesselKind::H1 => {
            let j = j_half_ladder(n, x)[i].to_f64();
            let y = y_half_ladder(n, x)[i].to_f64();
            Complex64::new(j, y)
        }
        BesselKind::I => {
            let v = i_half_scaled_ladder(n, x)[i].mul(&Efl::exp(x));
            Complex64::new(v.to_f64(), 0.0)
        }
    }
}

/// Ladder of `J_{k+1/2}(x)` for `k = 0..=n_max`, downward Miller recursion.
///
/// When every requested order sits far below the turning point (`k + 1/2`
/// well under `x`), both solutions of the recurrence oscillate with
/// comparable magnitude, so the plain upward recurrence from the sine and
/// cosine seeds is stable there; that path avoids the O(x)-step downward
/// start, which matters for wavenumber-distance arguments in the millions.
pub(crate) fn j_half_ladder(n_max: u32, x: f64) -> Vec<Efl> {
    debug_assert!(x > 0.0);
    let n = n_max as usize;
    if ((n + MILLER_GUARD) as f64) * 2.0 < x {
        let amp = math::sqrt(2.0 / (PI * x));
        let (s, c) = math::sin_cos(x);
        let mut out = Vec::with_capacity(n + 1);
        out.push(Efl::from_f64(amp * s));
        if n >= 1 {
            out.push(Efl::from_f64(amp * (s / x - c)));
            for k in 1..n {
                let next = out[k].scale((2.0 * k as f64 + 1.0) / x).sub(&out[k - 1]);
                out.push(next);
            }
        }
        return out;
    }
    let start = n + x as usize + MILLER_GUARD;
    let mut out = vec![Efl::ZERO; n + 1];
    let mut above = Efl::ZERO;
    let mut cur = Efl::new(1.0, -1000);
    for k in (1..=start).rev() {
        // J_{k-1/2} = (2k+1)/x * J_{k+1/2} - J_{k+3/2}
        let below = cur.scale((2.0 * k as f64 + 1.0) / x).sub(&above);
        above = cur;
        cur = below;
        if k - 1 <= n {
            out[k - 1] = cur;
        }
    }
    // Normalise against whichever closed-form seed is larger in magnitude.
    let amp = math::sqrt(2.0 / (PI * x));
    let (s, c) = math::sin_cos(x);
    let seed0 = amp * s; // J_{1/2}
    let seed1 = amp * (s / x - c); // J_{3/2}
    let scale = if seed0.abs() >= seed1.abs() {
        Efl::from_f64(seed0).div(&cur)
    } else {
        Efl::from_f64(seed1).div(&above)
    };
    for v in &mut out {
        *v = v.mul(&scale);
    }
    out
}

/// Ladder of `Y_{k+1/2}(x)` for `k = 0..=n_max`, upward recursion.
pub(crate) fn y_half_ladder(n_max: u32, x: f64) -> Vec<Efl> {
    debug_assert!(x > 0.0);
    let n = n_max as usize;
    let amp = math::sqrt(2.0 / (PI * x));
    let (s, c) = math::sin_cos(x);
    let mut out = Vec::with_capacity(n + 1);
    out.push(Efl::from_f64(-amp * c)); // Y_{1/2}
    if n >= 1 {
        out.push(Efl::from_f64(-amp * (c / x + s))); // Y_{3/2}
        for k in 1..n {
            // Y_{k+3/2} = (2k+1)/x * Y_{k+1/2} - Y_{k-1/2}
            let next = out[k].scale((2.0 * k as f64 + 1.0) / x).sub(&out[k - 1]);
            out.push(next);
        }
    }
    out
}

/// Ladder of `e^-x I_{k+1/2}(x)` for `k = 0..=n_max`, downward Miller
/// recursion with the scaled low-order seed
/// `e^-x I_{1/2}(x) = (1 - e^-2x) / sqrt(2 pi x)`.
pub(crate) fn i_half_scaled_ladder(n_max: u32, x: f64) -> Vec<Efl> {
    debug_assert!(x > 0.0);
    let n = n_max as usize;
    let start = n + x as usize + MILLER_GUARD;
    let mut out = vec![Efl::ZERO; n + 1];
    let mut above = Efl::ZERO;
    let mut cur = Efl::new(1.0, -1000);
    for k in (1..=start).rev() {
        // I_{k-1/2} = I_{k+3/2} + (2k+1)/x * I_{k+1/2}
        let below = above.add(&cur.scale((2.0 * k as f64 + 1.0) / x));
        above = cur;
        cur = below;
        if k - 1 <= n {
            out[k - 1] = cur;
        }
    }
    let seed0 = -math::expm1(-2.0 * x) / math::sqrt(2.0 * PI * x);
    let scale = Efl::from_f64(seed0).div(&cur);
    for v in &mut out {
        *v = v.mul(&scale);
    }
    out
}

/// Ladder of `K_{k+1/2}(x)` for `k = 0..=n_max`, upward recursion from the
/// closed-form seeds `K_{1/2} = sqrt(pi/2x) e^-x` and `K_{3/2} = K_{1/2}(1 + 1/x)`.
pub(crate) fn k_half_ladder(n_max: u32, x: f64) -> Vec<Efl> {
    debug_assert!(x > 0.0);
    let n = n_max as usize;
    let k0 = Efl::exp(-x).scale(math::sqrt(PI / (2.0 * x)));
    let mut out = Vec::with_capacity(n + 1);
    out.push(k0);
    if n >= 1 {
        out.push(k0.scale(1.0 + 1.0 / x));
        for k in 1..n {
            // K_{k+3/2} = K_{k-1/2} + (2k+1)/x * K_{k+1/2}
            let next = out[k].scale((2.0 * k as f64 + 1.0) / x).add(&out[k - 1]);
            out.push(next);
        }
    }
    out
}

/// Ladder of integer-order `J_k(x)` for `k = 0..=m_max`.
///
/// Downward Miller recursion normalised by the Neumann sum
/// `J_0 + 2 J_2 + 2 J_4 + ... = 1`.
pub(crate) fn bessel_j_integer(m_max: u32, x: f64) -> Vec<f64> {
    let n = m_max as usize;
    if x == 0.0 {
        let mut out = vec![0.0; n + 1];
        out[0] = 1.0;
        return out;
    }
    debug_assert!(x > 0.0);
    let start = n + x as usize + MILLER_GUARD;
    let mut out_e = vec![Efl::ZERO; n + 1];
    let mut above = Efl::ZERO;
    let mut cur = Efl::new(1.0, -1000);
    let mut norm = Efl::ZERO;
    for k in (1..=start).rev() {
        if k % 2 == 0 {
            norm = norm.add(&cur.scale(2.0));
        }
        // J_{k-1} = 2k/x * J_k - J_{k+1}
        let below = cur.scale(2.0 * k as f64 / x).sub(&above);
        above = cur;
        cur = below;
        if k - 1 <= n {
            out_e[k - 1] = cur;
        }
    }
    norm = norm.add(&cur);
    out_e.iter().map(|v| v.ratio(&norm)).collect()
}

/// Ladder of scaled integer-order `e^-x I_k(x)` for `k = 0..=m_max`.
///
/// Downward Miller recursion normalised by `I_0 + 2 I_1 + 2 I_2 + ... = e^x`,
/// which in scaled form says the trial ladder's weighted sum equals one.
pub(crate) fn bessel_i_scaled_integer(m_max: u32, x: f64) -> Vec<f64> {
    let n = m_max as usize;
    if x == 0.0 {
        let mut out = vec![0.0; n + 1];
        out[0] = 1.0;
        return out;
    }
    debug_assert!(x > 0.0);
    let start = n + x as usize + MILLER_GUARD;
    let mut out_e = vec![Efl::ZERO; n + 1];
    let mut above = Efl::ZERO;
    let mut cur = Efl::new(1.0, -1000);
    let mut norm = Efl::ZERO;
    for k in (1..=start).rev() {
        norm = norm.add(&cur.scale(2.0));
        // I_{k-1} = I_{k+1} + 2k/x * I_k
        let below = above.add(&cur.scale(2.0 * k as f64 / x));
        above = cur;
        cur = below;
        if k - 1 <= n {
            out_e[k - 1] = cur;
        }
    }
    norm = norm.add(&cur);
    out_e.iter().map(|v| v.ratio(&norm)).collect()
}
