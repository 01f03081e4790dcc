//! Closed-form evaluation of the modal coefficients through two-dimensional
//! hypergeometric double series.
//!
//! The coefficient splits into an even part (half advanced plus half
//! retarded) and an odd part. In the dimensionless variables `x = k^2` and
//! `y = gamma^2/4` the even part is a Horn `H3` double series
//!
//! ```text
//! H3(a, a, 2a; x, y) = sum_{n,p} (a)_{n-p} (a)_n / ((2a)_n n! p!) x^n y^p
//! ```
//!
//! and the odd part is a Kampe de Feriet double series
//!
//! ```text
//! F(a; u, v) = sum_{n,p} (a)_n / ((a+1)_{n+p} (2a)_n n! p!) u^n v^p
//! ```
//!
//! at `u = xy`, `v = -y`, both with `a = m + 1/2`. The `H3` series converges
//! for `x < 1`, which holds everywhere off the ring; the Kampe de Feriet
//! series is entire in both arguments.
//!
//! Both series are summed along anti-diagonals `n + p = d` with compensated
//! accumulation, stopping once a run of consecutive diagonals falls below
//! the relative tolerance. The same driver accumulates weighted sums, which
//! yields the `x`-derivatives at fixed `chi = xy/2` and the raw partial
//! derivatives consumed by the differential-equation checks.

use crate::coeffs::Method;
use crate::math;
use crate::params::Dimensionless;
use crate::specfun;
use crate::{Error, Result};
use alloc::vec::Vec;
use num_complex::Complex64;

/// Truncation policy for the double series.
#[derive(Clone, Copy, Debug)]
pub struct SeriesPolicy {
    /// Relative tolerance on a diagonal's contribution, measured against the
    /// largest partial sum reached so far.
    pub rel_tol: f64,
    /// Cap on each summation index (equivalently on the anti-diagonal
    /// count); exceeding it is a non-convergence error.
    pub max_terms: u32,
    /// Number of consecutive sub-tolerance diagonals required to stop.
    pub stagnation_window: u32,
}

impl Default for SeriesPolicy {
    fn default() -> Self {
        SeriesPolicy {
            rel_tol: 1e-13,
            max_terms: 5000,
            stagnation_window: 8,
        }
    }
}

impl SeriesPolicy {
    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || self.max_terms < 1 || self.stagnation_window < 2 {
            return Err(Error::Domain(
                "series policy needs rel_tol > 0, max_terms >= 1, stagnation_window >= 2",
            ));
        }
        Ok(())
    }
}

/// Value of one evaluation route together with its convergence diagnostics.
///
/// `converged` reports that the truncation criterion was met (a stagnation
/// window of sub-tolerance contributions). `est_error` is an absolute error
/// estimate: the larger of the geometric tail estimate at the stopping point
/// and the binary64 roundoff floor of the accumulated terms. For strongly
/// cancelling sums the floor can exceed `rel_tol * |value|` even though the
/// truncation itself converged, so the two fields are deliberately
/// independent.
#[derive(Clone, Copy, Debug)]
pub struct MethodReport {
    /// The computed coefficient (or series) value.
    pub value: Complex64,
    /// Which route produced it.
    pub method: Method,
    /// Number of series terms actually summed (for quadrature routes, the
    /// number of integrand evaluations).
    pub terms_used: u32,
    /// Absolute error estimate; see the type-level commentary.
    pub est_error: f64,
    /// Whether the truncation criterion was met.
    pub converged: bool,
}

/// Compensated complex accumulator.
#[derive(Clone, Copy)]
pub(crate) struct KahanC {
    sum: Complex64,
    c: Complex64,
}

impl KahanC {
    pub(crate) const ZERO: KahanC = KahanC {
        sum: Complex64::new(0.0, 0.0),
        c: Complex64::new(0.0, 0.0),
    };

    pub(crate) fn add(&mut self, t: Complex64) {
        let y = t - self.c;
        let s = self.sum + y;
        self.c = (s - self.sum) - y;
        self.sum = s;
    }

    pub(crate) fn value(&self) -> Complex64 {
        self.sum
    }
}

/// Result of the anti-diagonal driver: `K` weighted sums plus diagnostics
/// keyed to the first (plain-value) component.
struct DoubleSum<const K: usize> {
    sums: [Complex64; K],
    terms_used: u32,
    est_error: f64,
    converged: bool,
}

/// Sum a hypergeometric-type double series along anti-diagonals `n + p = d`.
///
/// `corner_ratio(d)` is the term ratio from `(n, p) = (d, 0)` to `(d+1, 0)`;
/// `p_ratio(n, d)` the ratio from `(n, d-n)` to `(n, d-n+1)`. `weights`
/// returns the `K` per-term weights at `(n, p)`; the first weight must be
/// the constant 1, since the error floor and `est_error` key off component 0.
///
/// The stop rule extrapolates the remaining tail geometrically: with `r` the
/// ratio of consecutive diagonal magnitudes, a decaying component's tail is
/// about `|diag| r / (1 - r)`, and a diagonal is quiet only when every
/// component's tail estimate is below `rel_tol` times its current partial
/// sum. Measuring against the current sum (not the largest transient) is
/// what makes strongly cancelling series run deep enough: their partial sums
/// can overshoot the final value by orders of magnitude.
fn sum_diagonals<const K: usize>(
    policy: &SeriesPolicy,
    mut corner_ratio: impl FnMut(u32) -> Complex64,
    mut p_ratio: impl FnMut(u32, u32) -> Complex64,
    weights: impl Fn(u32, u32) -> [f64; K],
) -> Result<DoubleSum<K>> {
    policy.validate()?;
    let mut terms: Vec<Complex64> = Vec::with_capacity(64);
    terms.push(Complex64::new(1.0, 0.0));
    let mut totals = [KahanC::ZERO; K];
    let mut prev = [0.0f64; K];
    let mut abs_accum = 0.0f64;
    let mut quiet_streak = 0u32;
    let mut terms_used = 0u32;
    let mut last_tail = 0.0f64;
    for d in 0..=policy.max_terms {
        let mut diag = [KahanC::ZERO; K];
        for n in 0..=d {
            let t = terms[n as usize];
            let w = weights(n, d - n);
            for k in 0..K {
                diag[k].add(w[k] * t);
            }
            abs_accum += t.re.abs() + t.im.abs();
        }
        terms_used += d + 1;
        if !abs_accum.is_finite() {
            return Err(Error::NonFinite);
        }
        let mut quiet = true;
        for k in 0..K {
            totals[k].add(diag[k].sum);
            let dmag = diag[k].sum.norm();
            let tail = if dmag == 0.0 {
                0.0
            } else if prev[k] > 0.0 && dmag < prev[k] {
                let r = dmag / prev[k];
                dmag * r / (1.0 - r)
            } else {
                // On the first diagonal or while still growing there is no
                // usable tail bound yet.
                f64::INFINITY
            };
            if tail > policy.rel_tol * totals[k].sum.norm() {
                quiet = false;
            }
            prev[k] = dmag;
            if k == 0 {
                last_tail = tail;
            }
        }
        if quiet {
            quiet_streak += 1;
            if quiet_streak >= policy.stagnation_window {
                let floor = f64::EPSILON * abs_accum;
                let mut sums = [Complex64::new(0.0, 0.0); K];
                for k in 0..K {
                    sums[k] = totals[k].sum;
                }
                return Ok(DoubleSum {
                    sums,
                    terms_used,
                    est_error: if last_tail > floor { last_tail } else { floor },
                    converged: true,
                });
            }
        } else {
            quiet_streak = 0;
        }
        if d == policy.max_terms {
            break;
        }
        let corner = terms[d as usize] * corner_ratio(d);
        for n in 0..=d {
            terms[n as usize] = terms[n as usize] * p_ratio(n, d);
        }
        terms.push(corner);
    }
    Err(Error::NonConvergence(
        "hypergeometric double series hit the term cap",
    ))
}

fn require_unit_interval(x: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain("first series argument must lie in (0, 1)"));
    }
    Ok(())
}

pub(crate) fn require_finite(z: Complex64) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// Multiplication by the imaginary unit, exact on both components.
pub(crate) fn mul_i(z: Complex64) -> Complex64 {
    Complex64::new(-z.im, z.re)
}

/// `z^q * exp(ln_scale)` for integer `q >= 1`, through logarithms so that
/// magnitude extremes cancel against the scale factor before exponentiation.
/// Exact phases on both axes: real `z` gives an exactly real result and
/// imaginary `z` an exactly axis-aligned one, so the even/odd splits of the
/// coefficient stay exactly real or imaginary where they should.
fn int_pow_scaled(z: Complex64, q: u32, ln_scale: f64) -> Complex64 {
    if z.re == 0.0 && z.im == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let mag = math::exp(q as f64 * math::ln(z.norm()) + ln_scale);
    if z.im == 0.0 {
        let neg = z.re < 0.0 && q % 2 == 1;
        return Complex64::new(if neg { -mag } else { mag }, 0.0);
    }
    if z.re == 0.0 {
        // (i b)^q = i^q |b|^q sign(b)^q
        let s = if z.im < 0.0 && q % 2 == 1 { -mag } else { mag };
        return match q % 4 {
            0 => Complex64::new(s, 0.0),
            1 => Complex64::new(0.0, s),
            2 => Complex64::new(-s, 0.0),
            _ => Complex64::new(0.0, -s),
        };
    }
    Complex64::from_polar(mag, q as f64 * z.arg())
}

/// `w^(m + 1/2) * exp(ln_scale)`, principal branch, with the same exact-axis
/// handling as [`int_pow_scaled`]. On the negative real axis the principal
/// branch gives `|w|^(m+1/2) i (-1)^m`.
fn half_pow_scaled(w: Complex64, m: u32, ln_scale: f64) -> Complex64 {
    let alpha = m as f64 + 0.5;
    let mag = math::exp(alpha * math::ln(w.norm()) + ln_scale);
    if w.im == 0.0 {
        if w.re > 0.0 {
            return Complex64::new(mag, 0.0);
        }
        if w.re < 0.0 {
            let s = if m % 2 == 0 { mag } else { -mag };
            return Complex64::new(0.0, s);
        }
        return Complex64::new(0.0, 0.0);
    }
    Complex64::from_polar(mag, alpha * w.arg())
}

/// Horn `H3(alpha, alpha, 2 alpha; x, y)` double series.
///
/// # Arguments
///
/// * `alpha` - series parameter, positive and non-integer (the coefficient
///   family uses `alpha = m + 1/2`; integer `alpha` makes the
///   negative-subscript Pochhammer factors singular).
/// * `x` - first argument, in `(0, 1)`.
/// * `y` - second argument, any finite complex value.
/// * `policy` - truncation policy.
///
/// # Errors
///
/// * [`Error::Domain`] on arguments outside the above.
/// * [`Error::NonConvergence`] when the diagonal cap is reached.
/// * [`Error::NonFinite`] when terms overflow binary64.
pub fn horn_h3(alpha: f64, x: f64, y: Complex64, policy: &SeriesPolicy) -> Result<MethodReport> {
    if !(alpha > 0.0) || alpha == math::floor(alpha) {
        return Err(Error::Domain("series parameter must be positive and non-integer"));
    }
    require_unit_interval(x)?;
    require_finite(y)?;
    let s = sum_diagonals(
        policy,
        |d| {
            let df = d as f64;
            Complex64::new(
                x * (alpha + df) * (alpha + df) / ((2.0 * alpha + df) * (df + 1.0)),
                0.0,
            )
        },
        |n, d| {
            let nf = n as f64;
            let df = d as f64;
            y / ((alpha + 2.0 * nf - df - 1.0) * (df - nf + 1.0))
        },
        |_, _| [1.0],
    )?;
    Ok(MethodReport {
        value: s.sums[0],
        method: Method::ClosedForm,
        terms_used: s.terms_used,
        est_error: s.est_error,
        converged: s.converged,
    })
}

/// Kampe de Feriet `F(alpha; u, v)` double series (numerator parameter
/// `alpha` over denominators `alpha + 1` coupled and `2 alpha` on the first
/// index). Entire in both arguments.
///
/// # Arguments
///
/// * `alpha` - series parameter, positive.
/// * `u`, `v` - the two arguments, any finite complex values.
/// * `policy` - truncation policy.
///
/// # Errors
///
/// Same classes as [`horn_h3`], without the unit-interval restriction.
pub fn kdf(alpha: f64, u: Complex64, v: Complex64, policy: &SeriesPolicy) -> Result<MethodReport> {
    if !(alpha > 0.0) {
        return Err(Error::Domain("series parameter must be positive"));
    }
    require_finite(u)?;
    require_finite(v)?;
    let s = sum_diagonals(
        policy,
        |d| {
            let df = d as f64;
            u * ((alpha + df) / ((alpha + 1.0 + df) * (2.0 * alpha + df) * (df + 1.0)))
        },
        |n, d| {
            let nf = n as f64;
            let df = d as f64;
            v / ((alpha + 1.0 + df) * (df - nf + 1.0))
        },
        |_, _| [1.0],
    )?;
    Ok(MethodReport {
        value: s.sums[0],
        method: Method::ClosedForm,
        terms_used: s.terms_used,
        est_error: s.est_error,
        converged: s.converged,
    })
}

/// Natural log of the even-split prefactor
/// `Gamma(m+1/2) / (2^(2m+1) m! sqrt(pi)) x^(m+1/2)`.
fn ln_plus_prefactor(m: u32, x: f64) -> f64 {
    let alpha = m as f64 + 0.5;
    specfun::ln_gamma(alpha) - specfun::ln_gamma(m as f64 + 1.0)
        - 0.5 * math::ln(core::f64::consts::PI)
        + alpha * (math::ln(x) - 2.0 * core::f64::consts::LN_2)
}

/// Dimensionless even-split coefficient `g_+^m(x, y)`: prefactor
/// `Gamma(m+1/2)/(2^(2m+1) m! sqrt(pi)) x^(m+1/2)` times the Horn series.
/// For real `y` the result is exactly real.
///
/// # Errors
///
/// Propagated from [`horn_h3`].
pub fn g_plus(m: u32, x: f64, y: Complex64, policy: &SeriesPolicy) -> Result<MethodReport> {
    let h3 = horn_h3(m as f64 + 0.5, x, y, policy)?;
    let pref = math::exp(ln_plus_prefactor(m, x));
    Ok(MethodReport {
        value: pref * h3.value,
        est_error: pref * h3.est_error,
        ..h3
    })
}

/// Dimensionless odd-split coefficient `g_-^m(x, y)`: prefactor
/// `i (xy)^(m+1/2) / (2m+1)!` times the Kampe de Feriet series at
/// `(u, v) = (xy, -y)`. The half-odd power takes the principal branch, which
/// matches the odd power of `gamma k / 2` whenever `gamma` lies in the
/// closed right half plane (all wavenumbers with `Re beta >= 0`). For real
/// `y` of either sign the result is exactly axis-aligned: imaginary for
/// propagating (`y > 0`), real for evanescent (`y < 0`).
///
/// # Errors
///
/// Propagated from [`kdf`]; the first argument must lie in `(0, 1)`.
pub fn g_minus(m: u32, x: f64, y: Complex64, policy: &SeriesPolicy) -> Result<MethodReport> {
    require_unit_interval(x)?;
    require_finite(y)?;
    if y.re == 0.0 && y.im == 0.0 {
        return Ok(MethodReport {
            value: Complex64::new(0.0, 0.0),
            method: Method::ClosedForm,
            terms_used: 0,
            est_error: 0.0,
            converged: true,
        });
    }
    let alpha = m as f64 + 0.5;
    let u = x * y;
    let f = kdf(alpha, u, -y, policy)?;
    let ln_fact = specfun::ln_gamma(2.0 * m as f64 + 2.0);
    let pref = mul_i(half_pow_scaled(u, m, -ln_fact));
    Ok(MethodReport {
        value: pref * f.value,
        est_error: pref.norm() * f.est_error,
        ..f
    })
}

/// Even-split coefficient by the closed Horn-series form,
/// `g_+^m(x, y) / sqrt(rR)`. At `beta = 0` this is the static coefficient
/// `Q_(m-1/2)(omega) / (pi sqrt(rR))`.
///
/// # Errors
///
/// Propagated from [`horn_h3`].
pub fn lambda_plus_closed(d: &Dimensionless, policy: &SeriesPolicy) -> Result<MethodReport> {
    let g = g_plus(d.m, d.x, d.y, policy)?;
    Ok(MethodReport {
        value: g.value / d.sqrt_rr,
        est_error: g.est_error / d.sqrt_rr,
        ..g
    })
}

/// Odd-split coefficient by the closed Kampe de Feriet form:
/// `i (gamma k / 2)^(2m+1) / ((2m+1)! sqrt(rR))` times the series. The
/// prefactor uses the odd integer power of `gamma k / 2` directly, so it is
/// branch-correct for every `gamma`, and exactly zero at `gamma = 0`.
///
/// # Errors
///
/// Propagated from [`kdf`].
pub fn lambda_minus_closed(d: &Dimensionless, policy: &SeriesPolicy) -> Result<MethodReport> {
    if d.gamma.re == 0.0 && d.gamma.im == 0.0 {
        return Ok(MethodReport {
            value: Complex64::new(0.0, 0.0),
            method: Method::ClosedForm,
            terms_used: 0,
            est_error: 0.0,
            converged: true,
        });
    }
    let m = d.m;
    let alpha = m as f64 + 0.5;
    let f = kdf(alpha, d.x * d.y, -d.y, policy)?;
    let zbase = d.gamma * (0.5 * math::sqrt(d.x));
    let ln_scale = -specfun::ln_gamma(2.0 * m as f64 + 2.0) - math::ln(d.sqrt_rr);
    let pref = mul_i(int_pow_scaled(zbase, 2 * m + 1, ln_scale));
    Ok(MethodReport {
        value: pref * f.value,
        est_error: pref.norm() * f.est_error,
        ..f
    })
}

/// Falling factorial `e (e-1) ... (e-j+1)` for the five derivative orders.
fn falling_weights(e: f64) -> [f64; 5] {
    let f1 = e;
    let f2 = f1 * (e - 1.0);
    let f3 = f2 * (e - 2.0);
    let f4 = f3 * (e - 3.0);
    [1.0, f1, f2, f3, f4]
}

/// `g_+^m` and its first four `x`-derivatives along fixed `chi = xy/2`
/// (the physical path: `y = 2 chi / x` as the geometry varies at constant
/// wavenumber scale). Term-wise differentiation: the `(n, p)` term carries
/// `x^(alpha + n - p)`, so the `j`-th derivative weights it by the falling
/// factorial of that exponent over `x^j`.
///
/// # Errors
///
/// Propagated from the series driver; `x` must lie in `(0, 1)`.
pub fn g_plus_x_derivs(
    m: u32,
    x: f64,
    chi: Complex64,
    policy: &SeriesPolicy,
) -> Result<[Complex64; 5]> {
    require_unit_interval(x)?;
    require_finite(chi)?;
    let alpha = m as f64 + 0.5;
    let y = 2.0 * chi / x;
    let s = sum_diagonals(
        policy,
        |d| {
            let df = d as f64;
            Complex64::new(
                x * (alpha + df) * (alpha + df) / ((2.0 * alpha + df) * (df + 1.0)),
                0.0,
            )
        },
        |n, d| {
            let nf = n as f64;
            let df = d as f64;
            y / ((alpha + 2.0 * nf - df - 1.0) * (df - nf + 1.0))
        },
        |n, p| falling_weights(alpha + n as f64 - p as f64),
    )?;
    let base = math::exp(ln_plus_prefactor(m, x));
    let mut out = [Complex64::new(0.0, 0.0); 5];
    let mut xj = 1.0;
    for j in 0..5 {
        out[j] = (base / xj) * s.sums[j];
        xj *= x;
    }
    Ok(out)
}

/// `g_-^m` and its first four `x`-derivatives along fixed `chi = xy/2`.
/// At fixed `chi` the prefactor `(xy)^(m+1/2) = (2 chi)^(m+1/2)` is
/// constant and only `v = -2 chi / x` varies, so the `(n, p)` term carries
/// `x^(-p)`.
///
/// # Errors
///
/// Propagated from the series driver; `x` must lie in `(0, 1)`; `chi` must
/// be nonzero (the static case differentiates to zero trivially).
pub fn g_minus_x_derivs(
    m: u32,
    x: f64,
    chi: Complex64,
    policy: &SeriesPolicy,
) -> Result<[Complex64; 5]> {
    require_unit_interval(x)?;
    require_finite(chi)?;
    if chi.re == 0.0 && chi.im == 0.0 {
        return Ok([Complex64::new(0.0, 0.0); 5]);
    }
    let alpha = m as f64 + 0.5;
    let u = 2.0 * chi;
    let v = -2.0 * chi / x;
    let s = sum_diagonals(
        policy,
        |d| {
            let df = d as f64;
            u * ((alpha + df) / ((alpha + 1.0 + df) * (2.0 * alpha + df) * (df + 1.0)))
        },
        |n, d| {
            let nf = n as f64;
            let df = d as f64;
            v / ((alpha + 1.0 + df) * (df - nf + 1.0))
        },
        |_, p| falling_weights(-(p as f64)),
    )?;
    let ln_fact = specfun::ln_gamma(2.0 * m as f64 + 2.0);
    let pref = mul_i(half_pow_scaled(u, m, -ln_fact));
    let mut out = [Complex64::new(0.0, 0.0); 5];
    let mut xj = 1.0;
    for j in 0..5 {
        out[j] = pref * s.sums[j] / xj;
        xj *= x;
    }
    Ok(out)
}

/// Raw partial derivatives of a double series `z(s, t)` through second
/// order, for the partial-differential-equation residual checks.
#[derive(Clone, Copy, Debug)]
pub struct Partials {
    pub z: Complex64,
    pub zs: Complex64,
    pub zt: Complex64,
    pub zss: Complex64,
    pub zst: Complex64,
    pub ztt: Complex64,
}

fn partial_weights(n: u32, p: u32) -> [f64; 6] {
    let nf = n as f64;
    let pf = p as f64;
    [1.0, nf, pf, nf * (nf - 1.0), nf * pf, pf * (pf - 1.0)]
}

fn partials_from_sums(s: &DoubleSum<6>, a: Complex64, b: Complex64) -> Partials {
    Partials {
        z: s.sums[0],
        zs: s.sums[1] / a,
        zt: s.sums[2] / b,
        zss: s.sums[3] / (a * a),
        zst: s.sums[4] / (a * b),
        ztt: s.sums[5] / (b * b),
    }
}

/// Partials of the Horn `H3` series with respect to its two arguments.
/// Term-wise: a monomial `x^n y^p` differentiates to weights `n/x`, `p/y`
/// and so on, so both arguments must be nonzero.
pub fn h3_partials(
    alpha: f64,
    x: f64,
    y: Complex64,
    policy: &SeriesPolicy,
) -> Result<Partials> {
    if !(alpha > 0.0) || alpha == math::floor(alpha) {
        return Err(Error::Domain("series parameter must be positive and non-integer"));
    }
    require_unit_interval(x)?;
    require_finite(y)?;
    if y.re == 0.0 && y.im == 0.0 {
        return Err(Error::Domain("partial derivatives need nonzero arguments"));
    }
    let s = sum_diagonals(
        policy,
        |d| {
            let df = d as f64;
            Complex64::new(
                x * (alpha + df) * (alpha + df) / ((2.0 * alpha + df) * (df + 1.0)),
                0.0,
            )
        },
        |n, d| {
            let nf = n as f64;
            let df = d as f64;
            y / ((alpha + 2.0 * nf - df - 1.0) * (df - nf + 1.0))
        },
        partial_weights,
    )?;
    Ok(partials_from_sums(&s, Complex64::new(x, 0.0), y))
}

/// Partials of the Kampe de Feriet series with respect to its two
/// arguments; both must be nonzero.
pub fn kdf_partials(
    alpha: f64,
    u: Complex64,
    v: Complex64,
    policy: &SeriesPolicy,
) -> Result<Partials> {
    if !(alpha > 0.0) {
        return Err(Error::Domain("series parameter must be positive"));
    }
    require_finite(u)?;
    require_finite(v)?;
    if (u.re == 0.0 && u.im == 0.0) || (v.re == 0.0 && v.im == 0.0) {
        return Err(Error::Domain("partial derivatives need nonzero arguments"));
    }
    let s = sum_diagonals(
        policy,
        |d| {
            let df = d as f64;
            u * ((alpha + df) / ((alpha + 1.0 + df) * (2.0 * alpha + df) * (df + 1.0)))
        },
        |n, d| {
            let nf = n as f64;
            let df = d as f64;
            v / ((alpha + 1.0 + df) * (df - nf + 1.0))
        },
        partial_weights,
    )?;
    Ok(partials_from_sums(&s, u, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::RingConfig;
    use crate::specfun::{gauss_2f1, legendre_q_toroidal, pochhammer, HalfInt};
    use approx::assert_relative_eq;

    fn policy() -> SeriesPolicy {
        SeriesPolicy::default()
    }

    fn table2_row1() -> Dimensionless {
        // m = 0, beta = 2, r = 1/2, R = 1, z - Z = 1/2: x = 0.8, y = 2.5.
        crate::params::derive(&RingConfig {
            m: 0,
            beta: Complex64::new(2.0, 0.0),
            r: 0.5,
            z: 0.5,
            ring_r: 1.0,
            ring_z: 0.0,
        })
        .unwrap()
    }

    #[test]
    fn horn_h3_reduces_to_gauss_series_at_zero_second_argument() {
        for &(alpha, x) in &[(0.5, 0.3), (3.5, 0.9230769230769231), (1.5, 0.75)] {
            let h = horn_h3(alpha, x, Complex64::new(0.0, 0.0), &policy()).unwrap();
            let f = gauss_2f1(alpha, alpha, 2.0 * alpha, x).unwrap();
            assert_relative_eq!(h.value.re, f, max_relative = 5e-13);
            assert_eq!(h.value.im, 0.0);
            assert!(h.converged);
        }
    }

    /// Rectangular brute-force sum of the Horn series from the raw term
    /// formula, in both nesting orders.
    fn h3_rectangular(alpha: f64, x: f64, y: Complex64, nmax: i32, p_outer: bool) -> Complex64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for outer in 0..=nmax {
            for inner in 0..=nmax {
                let (n, p) = if p_outer { (inner, outer) } else { (outer, inner) };
                let poch = match pochhammer(alpha, n - p) {
                    Some(v) => v,
                    None => continue,
                };
                let mut fact = 1.0;
                for j in 1..=n {
                    fact *= j as f64;
                }
                for j in 1..=p {
                    fact *= j as f64;
                }
                let num = poch * pochhammer(alpha, n).unwrap();
                let den = pochhammer(2.0 * alpha, n).unwrap() * fact;
                let xy = math::powi(x, n) * y.powi(p);
                sum += (num / den) * xy;
            }
        }
        sum
    }

    #[test]
    fn horn_h3_matches_rectangular_double_sum_in_either_order() {
        let y = Complex64::new(0.5, 0.0);
        let h = horn_h3(0.5, 0.3, y, &policy()).unwrap();
        let by_n = h3_rectangular(0.5, 0.3, y, 60, false);
        let by_p = h3_rectangular(0.5, 0.3, y, 60, true);
        assert_relative_eq!(h.value.re, by_n.re, max_relative = 1e-12);
        assert_relative_eq!(h.value.re, by_p.re, max_relative = 1e-12);
        let yc = Complex64::new(0.4, 0.7);
        let hc = horn_h3(1.5, 0.6, yc, &policy()).unwrap();
        let bc = h3_rectangular(1.5, 0.6, yc, 60, false);
        let bp = h3_rectangular(1.5, 0.6, yc, 60, true);
        assert_relative_eq!(hc.value.re, bc.re, max_relative = 1e-12);
        assert_relative_eq!(hc.value.im, bc.im, max_relative = 1e-12);
        assert_relative_eq!(bc.re, bp.re, max_relative = 1e-12);
        assert_relative_eq!(bc.im, bp.im, max_relative = 1e-12);
    }

    #[test]
    fn horn_h3_large_argument_reference_value() {
        // alpha = 7/2, x = 12/13, y = 40.625 (the m = 3, beta = 5, r = 3/2,
        // R = 1, z - Z = 1/2 configuration).
        let h = horn_h3(
            3.5,
            0.9230769230769231,
            Complex64::new(40.625, 0.0),
            &policy(),
        )
        .unwrap();
        assert_relative_eq!(h.value.re, -142.9157537312602, max_relative = 1e-10);
        assert_eq!(h.value.im, 0.0);
        assert!(h.converged);
        assert!(h.terms_used > 100);
    }

    #[test]
    fn kdf_is_one_at_the_origin() {
        let f = kdf(
            2.5,
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            &policy(),
        )
        .unwrap();
        assert_eq!(f.value, Complex64::new(1.0, 0.0));
        assert!(f.converged);
    }

    #[test]
    fn kdf_single_series_matches_direct_row_sum() {
        let alpha = 1.5;
        let u = Complex64::new(0.7, 0.3);
        let f = kdf(alpha, u, Complex64::new(0.0, 0.0), &policy()).unwrap();
        let mut sum = Complex64::new(0.0, 0.0);
        let mut term = Complex64::new(1.0, 0.0);
        for n in 0..60 {
            sum += term;
            let nf = n as f64;
            term = term * u * (alpha + nf)
                / ((alpha + 1.0 + nf) * (2.0 * alpha + nf) * (nf + 1.0));
        }
        assert_relative_eq!(f.value.re, sum.re, max_relative = 1e-12);
        assert_relative_eq!(f.value.im, sum.im, max_relative = 1e-12);
    }

    #[test]
    fn kdf_cancelling_reference_value() {
        // Same configuration as the Horn anchor: u = x y = 37.5, v = -40.625.
        // The terms grow to ~1e5 before the factorial wins, so roughly seven
        // digits cancel; the tolerance reflects that binary64 floor and the
        // report's est_error must own up to it.
        let f = kdf(
            3.5,
            Complex64::new(37.5, 0.0),
            Complex64::new(-40.625, 0.0),
            &policy(),
        )
        .unwrap();
        assert_relative_eq!(f.value.re, -0.003987032663432094, max_relative = 1e-8);
        assert_eq!(f.value.im, 0.0);
        assert!(f.converged);
        assert!(f.est_error > 1e-13 * f.value.norm());
    }

    #[test]
    fn dimensionless_coefficient_reference_values() {
        let p = policy();
        let gp0 = g_plus(0, 0.8, Complex64::new(2.5, 0.0), &p).unwrap();
        assert_relative_eq!(gp0.value.re, -0.30633342167620846, max_relative = 1e-12);
        assert_eq!(gp0.value.im, 0.0);
        let gm0 = g_minus(0, 0.8, Complex64::new(2.5, 0.0), &p).unwrap();
        assert_relative_eq!(gm0.value.im, 0.42875472375996131, max_relative = 1e-12);
        assert_eq!(gm0.value.re, 0.0);
        let gp3 = g_plus(3, 0.45, Complex64::new(1.2, 0.0), &p).unwrap();
        assert_relative_eq!(gp3.value.re, 5.972603117198880e-4, max_relative = 1e-12);
        let gm3 = g_minus(3, 0.45, Complex64::new(1.2, 0.0), &p).unwrap();
        assert_relative_eq!(gm3.value.im, 1.860017379620065e-5, max_relative = 1e-12);
    }

    #[test]
    fn closed_forms_reproduce_published_split_values() {
        let d = table2_row1();
        let p = policy();
        let plus = lambda_plus_closed(&d, &p).unwrap();
        let minus = lambda_minus_closed(&d, &p).unwrap();
        assert_relative_eq!(plus.value.re, -0.4332208795426503, max_relative = 1e-12);
        assert_eq!(plus.value.im, 0.0);
        assert_relative_eq!(minus.value.im, 0.6063507452728672, max_relative = 1e-12);
        assert_eq!(minus.value.re, 0.0);
        assert!(plus.converged && minus.converged);
    }

    #[test]
    fn static_limit_matches_toroidal_q() {
        let p = policy();
        for m in 0..=5u32 {
            for &omega in &[1.1, 1.5, 3.0, 10.0] {
                let dz = math::sqrt(2.0 * (omega - 1.0));
                let d = crate::params::derive(&RingConfig {
                    m,
                    beta: Complex64::new(0.0, 0.0),
                    r: 1.0,
                    z: dz,
                    ring_r: 1.0,
                    ring_z: 0.0,
                })
                .unwrap();
                let plus = lambda_plus_closed(&d, &p).unwrap();
                let q = legendre_q_toroidal(m, HalfInt::int(0), d.omega).unwrap();
                let expected = q.re / (core::f64::consts::PI * d.sqrt_rr);
                assert_relative_eq!(plus.value.re, expected, max_relative = 1e-11);
                let minus = lambda_minus_closed(&d, &p).unwrap();
                assert_eq!(minus.value, Complex64::new(0.0, 0.0));
                assert_eq!(minus.terms_used, 0);
            }
        }
    }

    #[test]
    fn swapping_the_radii_changes_nothing() {
        let p = policy();
        let a = crate::params::derive(&RingConfig {
            m: 2,
            beta: Complex64::new(1.7, 0.0),
            r: 0.6,
            z: 0.4,
            ring_r: 1.3,
            ring_z: -0.1,
        })
        .unwrap();
        let b = crate::params::derive(&RingConfig {
            m: 2,
            beta: Complex64::new(1.7, 0.0),
            r: 1.3,
            z: 0.4,
            ring_r: 0.6,
            ring_z: -0.1,
        })
        .unwrap();
        let pa = lambda_plus_closed(&a, &p).unwrap();
        let pb = lambda_plus_closed(&b, &p).unwrap();
        assert_eq!(pa.value, pb.value);
        let ma = lambda_minus_closed(&a, &p).unwrap();
        let mb = lambda_minus_closed(&b, &p).unwrap();
        assert_eq!(ma.value, mb.value);
    }

    #[test]
    fn dimensionless_scaling_identity() {
        let p = policy();
        for beta in [Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.5)] {
            let d = crate::params::derive(&RingConfig {
                m: 1,
                beta,
                r: 0.8,
                z: 0.3,
                ring_r: 1.1,
                ring_z: 0.0,
            })
            .unwrap();
            let gp = g_plus(d.m, d.x, d.y, &p).unwrap();
            let gm = g_minus(d.m, d.x, d.y, &p).unwrap();
            let lp = lambda_plus_closed(&d, &p).unwrap();
            let lm = lambda_minus_closed(&d, &p).unwrap();
            assert_relative_eq!(
                d.sqrt_rr * lp.value.re,
                gp.value.re,
                max_relative = 1e-13
            );
            assert_relative_eq!(
                (d.sqrt_rr * lm.value - gm.value).norm(),
                0.0,
                epsilon = 1e-13 * gm.value.norm()
            );
        }
    }

    #[test]
    fn evanescent_wavenumber_keeps_both_splits_real() {
        // beta = i sigma makes y real negative; both splits are then real.
        let d = crate::params::derive(&RingConfig {
            m: 1,
            beta: Complex64::new(0.0, 1.5),
            r: 0.8,
            z: 0.3,
            ring_r: 1.1,
            ring_z: 0.0,
        })
        .unwrap();
        assert!(d.y.re < 0.0);
        assert_eq!(d.y.im, 0.0);
        let p = policy();
        let plus = lambda_plus_closed(&d, &p).unwrap();
        let minus = lambda_minus_closed(&d, &p).unwrap();
        assert_eq!(plus.value.im, 0.0);
        assert_eq!(minus.value.im, 0.0);
        assert!(plus.value.re != 0.0 && minus.value.re != 0.0);
    }

    #[test]
    fn x_derivative_builders_match_finite_differences() {
        let p = policy();
        let m = 1u32;
        let chi = Complex64::new(0.4, 0.0);
        let x0 = 0.55;
        let dp = g_plus_x_derivs(m, x0, chi, &p).unwrap();
        let dm = g_minus_x_derivs(m, x0, chi, &p).unwrap();
        let gp = |x: f64| g_plus(m, x, 2.0 * chi / x, &p).unwrap().value;
        let gm = |x: f64| g_minus(m, x, 2.0 * chi / x, &p).unwrap().value;
        // The builder and the plain evaluation stop at different diagonals,
        // so they agree to tolerance rather than bitwise.
        assert_relative_eq!(dp[0].re, gp(x0).re, max_relative = 1e-13);
        assert_relative_eq!(dm[0].im, gm(x0).im, max_relative = 1e-13);
        let h = 1e-5;
        let fd1p = (gp(x0 + h) - gp(x0 - h)) / (2.0 * h);
        let fd1m = (gm(x0 + h) - gm(x0 - h)) / (2.0 * h);
        assert_relative_eq!(dp[1].re, fd1p.re, max_relative = 1e-8);
        assert_relative_eq!(dm[1].im, fd1m.im, max_relative = 1e-8);
        let fd2p = (gp(x0 + h) - 2.0 * gp(x0) + gp(x0 - h)) / (h * h);
        assert_relative_eq!(dp[2].re, fd2p.re, max_relative = 1e-5);
        // Higher orders through a wider stencil on the analytic first
        // derivative would just repeat the pattern; instead check orders
        // 3 and 4 by differencing the builder's own lower orders at
        // shifted points.
        let d3 = (g_plus_x_derivs(m, x0 + h, chi, &p).unwrap()[2]
            - g_plus_x_derivs(m, x0 - h, chi, &p).unwrap()[2])
            / (2.0 * h);
        assert_relative_eq!(dp[3].re, d3.re, max_relative = 1e-7);
        let d4 = (g_plus_x_derivs(m, x0 + h, chi, &p).unwrap()[3]
            - g_plus_x_derivs(m, x0 - h, chi, &p).unwrap()[3])
            / (2.0 * h);
        assert_relative_eq!(dp[4].re, d4.re, max_relative = 1e-7);
    }

    #[test]
    fn partial_derivative_sums_match_finite_differences() {
        let p = policy();
        let alpha = 1.5;
        let x = 0.6;
        let y = Complex64::new(0.8, 0.4);
        let pt = h3_partials(alpha, x, y, &p).unwrap();
        let f = |x: f64, y: Complex64| horn_h3(alpha, x, y, &p).unwrap().value;
        assert_relative_eq!(pt.z.re, f(x, y).re, max_relative = 1e-13);
        assert_relative_eq!(pt.z.im, f(x, y).im, max_relative = 1e-13);
        let h = 1e-5;
        let hy = Complex64::new(h, 0.0);
        let fdx = (f(x + h, y) - f(x - h, y)) / (2.0 * h);
        let fdy = (f(x, y + hy) - f(x, y - hy)) / (2.0 * h);
        assert_relative_eq!(pt.zs.re, fdx.re, max_relative = 1e-8);
        assert_relative_eq!(pt.zt.re, fdy.re, max_relative = 1e-8);
        assert_relative_eq!(pt.zt.im, fdy.im, max_relative = 1e-8);
        let fdxx = (f(x + h, y) - 2.0 * f(x, y) + f(x - h, y)) / (h * h);
        let fdyy = (f(x, y + hy) - 2.0 * f(x, y) + f(x, y - hy)) / (h * h);
        let fdxy = (f(x + h, y + hy) - f(x + h, y - hy) - f(x - h, y + hy)
            + f(x - h, y - hy))
            / (4.0 * h * h);
        assert_relative_eq!(pt.zss.re, fdxx.re, max_relative = 1e-5);
        assert_relative_eq!(pt.ztt.re, fdyy.re, max_relative = 1e-5);
        assert_relative_eq!(pt.zst.re, fdxy.re, max_relative = 1e-5);

        let u = Complex64::new(0.9, 0.2);
        let v = Complex64::new(-1.1, 0.5);
        let kt = kdf_partials(alpha, u, v, &p).unwrap();
        let g = |u: Complex64, v: Complex64| kdf(alpha, u, v, &p).unwrap().value;
        let hu = Complex64::new(h, 0.0);
        let gdu = (g(u + hu, v) - g(u - hu, v)) / (2.0 * h);
        let gdv = (g(u, v + hu) - g(u, v - hu)) / (2.0 * h);
        assert_relative_eq!(kt.zs.re, gdu.re, max_relative = 1e-8);
        assert_relative_eq!(kt.zt.re, gdv.re, max_relative = 1e-8);
        let gduv = (g(u + hu, v + hu) - g(u + hu, v - hu) - g(u - hu, v + hu)
            + g(u - hu, v - hu))
            / (4.0 * h * h);
        assert_relative_eq!(kt.zst.re, gduv.re, max_relative = 1e-5);
        assert_relative_eq!(kt.zst.im, gduv.im, max_relative = 1e-5);
    }

    #[test]
    fn domain_and_convergence_errors() {
        let p = policy();
        let y = Complex64::new(0.5, 0.0);
        assert!(matches!(
            horn_h3(2.0, 0.5, y, &p),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            horn_h3(0.5, 1.0, y, &p),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            horn_h3(0.5, 0.0, y, &p),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            kdf(-1.0, y, y, &p),
            Err(Error::Domain(_))
        ));
        let bad = SeriesPolicy {
            rel_tol: 0.0,
            ..SeriesPolicy::default()
        };
        assert!(matches!(
            horn_h3(0.5, 0.5, y, &bad),
            Err(Error::Domain(_))
        ));
        let tiny = SeriesPolicy {
            max_terms: 3,
            ..SeriesPolicy::default()
        };
        assert!(matches!(
            horn_h3(3.5, 0.9230769230769231, Complex64::new(40.625, 0.0), &tiny),
            Err(Error::NonConvergence(_))
        ));
    }

    #[test]
    fn zero_wavenumber_collapses_the_odd_split_exactly() {
        let p = policy();
        let gm = g_minus(2, 0.5, Complex64::new(0.0, 0.0), &p).unwrap();
        assert_eq!(gm.value, Complex64::new(0.0, 0.0));
        assert_eq!(gm.terms_used, 0);
        assert!(gm.converged);
    }
}
