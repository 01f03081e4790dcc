//! Scale-free residuals of the differential equations the modal
//! coefficients satisfy.
//!
//! Both dimensionless parts `g_+^m(x, y)` and `g_-^m(x, y)` solve the same
//! fourth-order equation in `x` at fixed `chi = x y / 2`
//! ([`ode_residual_x`]), obtained from the Horn-`H3` partial differential
//! system by operator elimination:
//!
//! ```text
//! (1-x) x^4 g'''' + (6-9x) x^3 g'''
//!   + [6 - a(a-1) - 18x + (2-x) y] x^2 g''
//!   - 2 [a(a-1) + x(y+3)] x g' + y^2 g = 0,        a = m + 1/2.
//! ```
//!
//! The rescaled full coefficient `yhat = pi sqrt(2 r R) G^m`, viewed as a
//! function of `omega` at fixed `lambda`, solves a second fourth-order
//! equation ([`ode_residual_omega`]):
//!
//! ```text
//! (1-omega^2) yhat'''' - 6 omega yhat'''
//!   + (m^2 - lambda^2 omega / 2 - 25/4) yhat''
//!   - lambda^2 yhat' - (lambda^2/4)^2 yhat = 0.
//! ```
//!
//! The two are images of each other under `omega = (2-x)/x`:
//! [`omega_derivs_from_x`] maps derivative stacks across the variable
//! change and [`ode_equivalence_gap`] measures how exactly the transformed
//! `omega`-form coefficient row matches the `x`-form row (it vanishes to
//! rounding). At `lambda = 0` the `omega`-form collapses to the twice
//! differentiated Legendre operator of degree `m - 1/2`, whose first
//! integral is checked by [`legendre_residual`]. Upstream of both ordinary
//! equations sit the second-order partial systems for the two double
//! series ([`pde_residual_h3`], [`pde_residual_kdf`]).
//!
//! Every check returns the modulus of the evaluated operator divided by
//! the sum of the moduli of its terms, with the empty case `0/0` defined
//! as `0`, so thresholds are scale-free. Derivative stacks are expected
//! from term-wise differentiated series ([`crate::hyper2d`]); binary64
//! finite differences cannot reach fourth order at the tolerances these
//! residuals are tested at.

use num_complex::Complex64;

use crate::hyper2d::Partials;

/// `|sum of terms| / sum of |term|`, with `0/0` defined as `0`.
fn scaled_residual(terms: &[Complex64]) -> f64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for t in terms {
        sum += t;
        scale += t.norm();
    }
    if scale == 0.0 {
        0.0
    } else {
        sum.norm() / scale
    }
}

/// Coefficient row `[A0, .., A4]` of the fourth-order equation in `x`,
/// `A_k` multiplying the `k`-th derivative.
fn x_coefficients(m: u32, y: Complex64, x: f64) -> [Complex64; 5] {
    let alpha = m as f64 + 0.5;
    let aa = alpha * (alpha - 1.0);
    let x2 = x * x;
    [
        y * y,
        Complex64::new(-2.0 * x * (aa + 3.0 * x), 0.0) - (2.0 * x2) * y,
        (Complex64::new(6.0 - aa - 18.0 * x, 0.0) + (2.0 - x) * y) * x2,
        Complex64::new((6.0 - 9.0 * x) * x2 * x, 0.0),
        Complex64::new((1.0 - x) * x2 * x2, 0.0),
    ]
}

/// Coefficient row `[B0, .., B4]` of the fourth-order equation in `omega`,
/// parametrized by `lambda^2` so callers never need a complex square root.
fn omega_coefficients_sq(m: u32, lambda_sq: Complex64, omega: f64) -> [Complex64; 5] {
    let mf = m as f64;
    let chi = 0.25 * lambda_sq;
    [
        -(chi * chi),
        -lambda_sq,
        Complex64::new(mf * mf - 6.25, 0.0) - (0.5 * omega) * lambda_sq,
        Complex64::new(-6.0 * omega, 0.0),
        Complex64::new(1.0 - omega * omega, 0.0),
    ]
}

fn row_residual(coeffs: &[Complex64; 5], derivs: &[Complex64; 5]) -> f64 {
    let mut terms = [Complex64::new(0.0, 0.0); 5];
    for (t, (c, d)) in terms.iter_mut().zip(coeffs.iter().zip(derivs.iter())) {
        *t = c * d;
    }
    scaled_residual(&terms)
}

/// Residual of the fourth-order equation in `x` on a derivative stack
/// `derivs = [g, g', g'', g''', g'''']` taken at fixed `chi = x y / 2`.
///
/// `y_param` is the value of `y` at the evaluation point. Pure arithmetic:
/// no domain restrictions are enforced beyond what the caller used to
/// produce the stack.
pub fn ode_residual_x(m: u32, y_param: Complex64, x: f64, derivs: &[Complex64; 5]) -> f64 {
    row_residual(&x_coefficients(m, y_param, x), derivs)
}

/// Residual of the fourth-order equation in `omega` on a derivative stack
/// `derivs = [yhat, yhat', yhat'', yhat''', yhat'''']` taken at fixed
/// `lambda`.
///
/// Any constant rescaling of `yhat` drops out, so stacks built from
/// `g_+ + g_-` serve directly.
pub fn ode_residual_omega(m: u32, lambda: Complex64, omega: f64, derivs: &[Complex64; 5]) -> f64 {
    row_residual(&omega_coefficients_sq(m, lambda * lambda, omega), derivs)
}

/// Residual of the Legendre equation of degree `m - 1/2`,
/// `(1-omega^2) q'' - 2 omega q' + (m^2 - 1/4) q = 0`, the static
/// (`lambda = 0`) first integral of the `omega`-form equation.
pub fn legendre_residual(m: u32, omega: f64, q: f64, dq: f64, ddq: f64) -> f64 {
    let mf = m as f64;
    let terms = [
        (1.0 - omega * omega) * ddq,
        -2.0 * omega * dq,
        (mf * mf - 0.25) * q,
    ];
    let sum = terms[0] + terms[1] + terms[2];
    let scale = terms[0].abs() + terms[1].abs() + terms[2].abs();
    if scale == 0.0 {
        0.0
    } else {
        sum.abs() / scale
    }
}

/// Map a derivative stack in `x` at fixed `chi` to the stack in `omega` at
/// fixed `lambda` through `omega = (2-x)/x`, i.e. `x = 2/(1+omega)` and
/// `d/d omega = -(x^2/2) d/dx`.
pub fn omega_derivs_from_x(x: f64, derivs: &[Complex64; 5]) -> [Complex64; 5] {
    let x2 = x * x;
    let x3 = x2 * x;
    let x4 = x2 * x2;
    let x5 = x4 * x;
    let x6 = x3 * x3;
    let x7 = x6 * x;
    let x8 = x4 * x4;
    [
        derivs[0],
        -0.5 * x2 * derivs[1],
        0.5 * x3 * derivs[1] + 0.25 * x4 * derivs[2],
        -0.75 * x4 * derivs[1] - 0.75 * x5 * derivs[2] - 0.125 * x6 * derivs[3],
        1.5 * x5 * derivs[1] + 2.25 * x6 * derivs[2] + 0.75 * x7 * derivs[3]
            + 0.0625 * x8 * derivs[4],
    ]
}

/// Transform the `omega`-form coefficient row to `x` variables and compare
/// it with the `x`-form row at the same point.
///
/// With `omega = (2-x)/x` and `lambda^2 = 2 x y` the transformed row is
/// proportional to the `x`-form row (factor `-x^2/4`); the returned value
/// is the largest entry-wise deviation after matching the leading
/// coefficients, relative to the largest entry. It vanishes to rounding
/// when both rows implement the same operator.
pub fn ode_equivalence_gap(m: u32, x: f64, y_param: Complex64) -> f64 {
    let a = x_coefficients(m, y_param, x);
    let omega = (2.0 - x) / x;
    let b = omega_coefficients_sq(m, 2.0 * x * y_param, omega);
    let x2 = x * x;
    let x3 = x2 * x;
    let x4 = x2 * x2;
    let x5 = x4 * x;
    let x6 = x3 * x3;
    let x7 = x6 * x;
    let x8 = x4 * x4;
    let t = [
        b[0],
        1.5 * x5 * b[4] - 0.75 * x4 * b[3] + 0.5 * x3 * b[2] - 0.5 * x2 * b[1],
        2.25 * x6 * b[4] - 0.75 * x5 * b[3] + 0.25 * x4 * b[2],
        0.75 * x7 * b[4] - 0.125 * x6 * b[3],
        0.0625 * x8 * b[4],
    ];
    let c = t[4] / a[4];
    let mut gap = 0.0f64;
    let mut scale = 0.0f64;
    for k in 0..5 {
        let ca = c * a[k];
        gap = gap.max((t[k] - ca).norm());
        scale = scale.max(t[k].norm().max(ca.norm()));
    }
    if scale == 0.0 {
        0.0
    } else {
        gap / scale
    }
}

/// Residuals of the two partial differential equations the Horn-`H3`
/// series `z(s, t)` satisfies, on partials from
/// [`crate::hyper2d::h3_partials`]:
///
/// ```text
/// s(1-s) z_ss + s t z_st + [2a - (2a+1) s] z_s + a t z_t - a^2 z = 0
/// t z_tt - s z_st + (1-a) z_t + z = 0
/// ```
///
/// Returned in that order (the equation second order in the first
/// argument first). `x` and `y` are the evaluation point `(s, t)`.
pub fn pde_residual_h3(alpha: f64, x: f64, y: Complex64, partials: &Partials) -> (f64, f64) {
    let first = [
        (x * (1.0 - x)) * partials.zss,
        x * y * partials.zst,
        (2.0 * alpha - (2.0 * alpha + 1.0) * x) * partials.zs,
        alpha * y * partials.zt,
        -(alpha * alpha) * partials.z,
    ];
    let second = [
        y * partials.ztt,
        -x * partials.zst,
        (1.0 - alpha) * partials.zt,
        partials.z,
    ];
    (scaled_residual(&first), scaled_residual(&second))
}

/// Residuals of the two partial differential equations the Kampe de Feriet
/// series `zbar(u, v)` satisfies, on partials from
/// [`crate::hyper2d::kdf_partials`]:
///
/// ```text
/// v zbar_vv + u zbar_uv + (a+1) zbar_v - zbar = 0
/// 2a zbar_u + u zbar_uu + zbar_v + v zbar_vv - zbar = 0
/// ```
///
/// Returned in that order.
pub fn pde_residual_kdf(alpha: f64, u: Complex64, v: Complex64, partials: &Partials) -> (f64, f64) {
    let first = [
        v * partials.ztt,
        u * partials.zst,
        (alpha + 1.0) * partials.zt,
        -partials.z,
    ];
    let second = [
        (2.0 * alpha) * partials.zs,
        u * partials.zss,
        partials.zt,
        v * partials.ztt,
        -partials.z,
    ];
    (scaled_residual(&first), scaled_residual(&second))
}
