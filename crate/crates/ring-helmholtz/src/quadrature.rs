//! Adaptive quadrature of the three integral representations.
//!
//! These are the ground-truth routes: each evaluates the modal coefficient
//! as a one-dimensional integral with no special-function series in the
//! answer path, so they cross-validate every series family independently.
//!
//! * [`quad_angular`]: the defining integral over the azimuthal angle,
//!   `G = (1/pi) int_0^pi exp(i beta D(psi)) / D(psi) cos(m psi) dpsi`
//!   with `D^2 = 2 r R (omega - cos psi)`. Valid for any wavenumber in the
//!   closed upper half-plane and any off-ring geometry; the integrand has
//!   a logarithmic peak at `psi = 0` as the ring is approached, handled by
//!   a geometrically graded mesh.
//! * [`quad_spectral`]: the Fourier-Bessel (Sommerfeld) integral
//!   `G = i int_0^inf exp(i |dz| sqrt(beta^2 - s^2)) J_m(s r) J_m(s R) s
//!   ds / sqrt(beta^2 - s^2)`, real wavenumber only, requiring `|dz| > 0`
//!   for its exponential tail. The inverse-square-root singularity at
//!   `s = |beta|` is removed by `s = |beta| sin t` below and
//!   `s = |beta| cosh t` above.
//! * [`quad_evanescent`]: the Laplace-type integral for purely imaginary
//!   `lambda = i sigma`, `yhat_m = sqrt(pi) int_0^inf exp(-(omega s +
//!   sigma^2/(4s))) I_m(s) s^{-1/2} ds`, computed with the scaled
//!   `e^{-s} I_m(s)` so nothing overflows; the substitution `s = t^2`
//!   absorbs the endpoint singularity.
//!
//! All three use the same adaptive Gauss-Kronrod 7/15 engine with
//! compensated panel summation, a per-panel roundoff floor, and an honest
//! [`Error::NonConvergence`] when the panel budget runs out.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::coeffs::Method;
use crate::hyper2d::{mul_i, KahanC, MethodReport};
use crate::math;
use crate::params::{derive, RingConfig};
use crate::specfun::{bessel_i_scaled_integer, bessel_j_integer};
use crate::{Error, Result};
use core::f64::consts::PI;

/// Kronrod abscissae (positive half, descending; last entry is the center).
const XGK: [f64; 8] = [
    0.9914553711208126,
    0.9491079123427585,
    0.8648644233597691,
    0.7415311855993944,
    0.5860872354676911,
    0.4058451513773972,
    0.2077849550078985,
    0.0,
];

/// 15-point Kronrod weights matching [`XGK`].
const WGK: [f64; 8] = [
    0.0229353220105292,
    0.0630920926299786,
    0.1047900103222502,
    0.1406532597155259,
    0.1690047266392679,
    0.1903505780647854,
    0.2044329400752989,
    0.2094821410847278,
];

/// 7-point Gauss weights for the odd-index abscissae of [`XGK`].
const WG: [f64; 4] = [
    0.1294849661688697,
    0.2797053914892767,
    0.3818300505051189,
    0.4179591836734694,
];

/// Default panel budget per integral.
const MAX_PANELS: u32 = 30_000;

/// One Gauss-Kronrod 7/15 application on `[a, b]`: returns the Kronrod
/// value, the |K15 - G7| error gauge, and the Kronrod integral of |f|.
fn gk15(f: &impl Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    let mut resabs = fc.norm() * WGK[7];
    for i in 0..7 {
        let dx = h * XGK[i];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        let s = f1 + f2;
        k += s * WGK[i];
        resabs += (f1.norm() + f2.norm()) * WGK[i];
        if i % 2 == 1 {
            g += s * WG[i / 2];
        }
    }
    ((k * h), (k - g).norm() * h.abs(), resabs * h.abs())
}

/// Adaptive driver over an initial mesh. Splits panels until each meets
/// its share of `abs_tol` (proportional to width) or its own roundoff
/// floor; errors out when the panel budget is exhausted.
fn integrate(
    f: &impl Fn(f64) -> Complex64,
    mesh: &[f64],
    abs_tol: f64,
) -> Result<(Complex64, f64, u32)> {
    struct Panel {
        a: f64,
        b: f64,
        depth: u32,
    }
    let total_len = mesh[mesh.len() - 1] - mesh[0];
    let density = abs_tol / total_len;
    let mut stack: Vec<Panel> = Vec::with_capacity(mesh.len() + 64);
    for w in mesh.windows(2) {
        if w[1] > w[0] {
            stack.push(Panel {
                a: w[0],
                b: w[1],
                depth: 0,
            });
        }
    }
    let mut sum = KahanC::ZERO;
    let mut est = 0.0f64;
    let mut panels = 0u32;
    while let Some(p) = stack.pop() {
        panels += 1;
        if panels > MAX_PANELS {
            return Err(Error::NonConvergence(
                "adaptive quadrature exceeded its panel budget",
            ));
        }
        let (val, err, resabs) = gk15(f, p.a, p.b);
        let width = p.b - p.a;
        let floor = 50.0 * f64::EPSILON * resabs;
        if err <= density * width
            || err <= floor
            || p.depth >= 52
            || width <= f64::EPSILON * (math::hypot(p.a, p.b))
        {
            sum.add(val);
            est += err;
        } else {
            let mid = 0.5 * (p.a + p.b);
            stack.push(Panel {
                a: p.a,
                b: mid,
                depth: p.depth + 1,
            });
            stack.push(Panel {
                a: mid,
                b: p.b,
                depth: p.depth + 1,
            });
        }
    }
    Ok((sum.value(), est, panels))
}

fn report(method: Method, value: Complex64, est: f64, panels: u32) -> Result<MethodReport> {
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(MethodReport {
        value,
        method,
        terms_used: panels,
        est_error: est,
        converged: true,
    })
}

/// Geometric refinement of the leftmost mesh interval `[0, h]` down to the
/// scale `core`, appended in ascending order starting from 0.
fn grade_toward_zero(mesh: &mut Vec<f64>, h: f64, core: f64) {
    let mut levels = 0u32;
    let mut w = h;
    while w > core && levels < 700 {
        w *= 0.5;
        levels += 1;
    }
    mesh.push(0.0);
    for j in (1..=levels).rev() {
        mesh.push(h * math::ldexp(1.0, -(j as i32)));
    }
    mesh.push(h);
}

/// The defining angular integral of the modal coefficient.
///
/// `G = (1/pi) int_0^pi exp(i beta D)/D cos(m psi) dpsi` with
/// `D = sqrt(2 r R) sqrt((omega - 1) + 2 sin^2(psi/2))`; the excess form
/// keeps full precision arbitrarily close to the ring. Accepts any
/// wavenumber with `Im(beta) >= 0`. The initial mesh resolves both the
/// `cos(m psi)` oscillation and the phase `|gamma|`, with geometric
/// grading into the near-ring peak at `psi = 0`.
///
/// # Arguments
///
/// * `cfg` - geometry and wavenumber.
/// * `abs_tol` - absolute tolerance the adaptive refinement aims for.
///
/// # Errors
///
/// * [`Error::Unsupported`] for `m > 64` (use the series families there;
///   the integrand oscillates `m` times and quadrature stops paying).
/// * [`Error::NonConvergence`] when the panel budget is exhausted, which
///   happens once `|gamma|` reaches the thousands.
pub fn quad_angular(cfg: &RingConfig, abs_tol: f64) -> Result<MethodReport> {
    if cfg.m > 64 {
        return Err(Error::Unsupported(
            "angular quadrature is limited to m <= 64",
        ));
    }
    if !(abs_tol > 0.0) {
        return Err(Error::Domain("quadrature tolerance must be positive"));
    }
    let d = derive(cfg)?;
    let srr2 = math::sqrt(2.0) * d.sqrt_rr;
    let x0 = d.omega_m1;
    let beta = d.beta;
    let mf = d.m as f64;
    let ib = Complex64::new(-beta.im, beta.re);
    let f = |psi: f64| {
        let s = math::sin(0.5 * psi);
        let dd = srr2 * math::sqrt(x0 + 2.0 * s * s);
        (ib * dd).exp() * (math::cos(mf * psi) / (PI * dd))
    };

    let gmag = d.gamma.norm();
    let n_osc = {
        let n = (mf).max(gmag / 3.0) as usize + 1;
        n.min(2000)
    };
    let h = PI / n_osc as f64;
    let mut mesh = Vec::with_capacity(n_osc + 80);
    grade_toward_zero(&mut mesh, h, 0.5 * math::sqrt(x0));
    for k in 2..=n_osc {
        mesh.push(h * k as f64);
    }
    let (value, est, panels) = integrate(&f, &mesh, abs_tol)?;
    report(Method::Angular, value, est, panels)
}

/// The Fourier-Bessel (Sommerfeld) integral of the modal coefficient.
///
/// `G = i int_0^inf exp(i |dz| sqrt(beta^2 - s^2)) J_m(s r) J_m(s R) s ds
/// / sqrt(beta^2 - s^2)` with the root taken positive below `s = |beta|`
/// and `+i sqrt(s^2 - beta^2)` above, so the tail decays like
/// `exp(-|dz| sqrt(s^2 - beta^2))`. The traveling band uses
/// `s = |beta| sin t`, the evanescent tail `s = |beta| cosh t`, both of
/// which absorb the inverse-square-root endpoint. A zero wavenumber
/// reduces to the Lipschitz-Hankel form `int J_m J_m e^{-s |dz|} ds`; a
/// negative real wavenumber folds by conjugation.
///
/// # Errors
///
/// * [`Error::Unsupported`] for a complex wavenumber (the representation
///   is only established on the real axis; the evanescent route covers
///   the imaginary axis).
/// * [`Error::Domain`] when `z = Z`: the tail never decays.
pub fn quad_spectral(cfg: &RingConfig, abs_tol: f64) -> Result<MethodReport> {
    if cfg.beta.im != 0.0 {
        return Err(Error::Unsupported(
            "spectral integral requires a real wavenumber",
        ));
    }
    if !(abs_tol > 0.0) {
        return Err(Error::Domain("quadrature tolerance must be positive"));
    }
    derive(cfg)?;
    let dz = {
        let v = cfg.z - cfg.ring_z;
        if v < 0.0 {
            -v
        } else {
            v
        }
    };
    if dz == 0.0 {
        return Err(Error::Domain(
            "spectral integral requires distinct heights z != Z",
        ));
    }
    let r = cfg.r;
    let rr = cfg.ring_r;
    let m = cfg.m;
    let b = if cfg.beta.re < 0.0 {
        -cfg.beta.re
    } else {
        cfg.beta.re
    };
    let jj = |s: f64| {
        let j1 = bessel_j_integer(m, s * r);
        let j2 = bessel_j_integer(m, s * rr);
        j1[m as usize] * j2[m as usize]
    };

    if b == 0.0 {
        let smax = 46.0 / dz;
        let f = |s: f64| Complex64::new(jj(s) * math::exp(-s * dz), 0.0);
        let n = (((smax * (r + rr)) / 4.0) as usize + 4).min(4000);
        let mut mesh = Vec::with_capacity(n + 1);
        for k in 0..=n {
            mesh.push(smax * k as f64 / n as f64);
        }
        let (value, est, panels) = integrate(&f, &mesh, abs_tol)?;
        return report(Method::Spectral, value, est, panels);
    }

    // Traveling band: s = b sin t, root = b cos t.
    let f1 = |t: f64| {
        let (st, ct) = math::sin_cos(t);
        let s = b * st;
        let phase = Complex64::new(0.0, dz * b * ct).exp();
        phase * (b * st * jj(s))
    };
    let n1 = (((dz * b + b * (r + rr)) / 4.0) as usize + 4).min(4000);
    let mut mesh1 = Vec::with_capacity(n1 + 1);
    for k in 0..=n1 {
        mesh1.push(0.5 * PI * k as f64 / n1 as f64);
    }
    let (v1, e1, p1) = integrate(&f1, &mesh1, 0.5 * abs_tol)?;

    // Evanescent tail: s = b cosh t, root = i b sinh t.
    let tmax = math::asinh(46.0 / (dz * b));
    let smax = math::hypot(b, 46.0 / dz);
    let f2 = |t: f64| {
        let sh = math::sinh(t);
        let ch = math::cosh(t);
        let s = b * ch;
        Complex64::new(b * ch * jj(s) * math::exp(-dz * b * sh), 0.0)
    };
    let n2 = (((smax * (r + rr) + dz * b) * tmax / 4.0) as usize + 4).min(4000);
    let mut mesh2 = Vec::with_capacity(n2 + 1);
    for k in 0..=n2 {
        mesh2.push(tmax * k as f64 / n2 as f64);
    }
    let (v2, e2, p2) = integrate(&f2, &mesh2, 0.5 * abs_tol)?;

    // The representation carries a global factor i; it cancels against
    // the root's own i on the evanescent branch but not on the
    // traveling one.
    let total = mul_i(v1) + v2;
    let folded = if cfg.beta.re < 0.0 {
        total.conj()
    } else {
        total
    };
    report(Method::Spectral, folded, e1 + e2, p1 + p2)
}

/// The Laplace-type integral for a purely imaginary `lambda = i sigma`.
///
/// Returns `yhat_m(i sigma, omega) = sqrt(pi) int_0^inf exp(-(omega s +
/// sigma^2/(4 s))) I_m(s) s^{-1/2} ds`, a real positive quantity; the
/// modal coefficient follows as `yhat / (pi sqrt(2 r R))` with
/// `beta = i sigma / sqrt(2 r R)`. Computed as `exp(-(omega - 1) s -
/// sigma^2/(4 s)) * (e^{-s} I_m(s))` on the substitution `s = t^2`, so
/// neither the Bessel growth nor the endpoint `s^{-1/2}` ever appears.
/// At `sigma = 0` it degenerates to `sqrt(2) Q_{m-1/2}(omega)`.
///
/// # Errors
///
/// * [`Error::Domain`] for `omega <= 1` (the integrand stops decaying) or
///   `sigma < 0`.
pub fn quad_evanescent(sigma: f64, omega: f64, m: u32, abs_tol: f64) -> Result<MethodReport> {
    if !(omega > 1.0) || !omega.is_finite() {
        return Err(Error::Domain("evanescent integral requires omega > 1"));
    }
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::Domain(
            "evanescent integral requires sigma >= 0",
        ));
    }
    if !(abs_tol > 0.0) {
        return Err(Error::Domain("quadrature tolerance must be positive"));
    }
    let w1 = omega - 1.0;
    let sp = math::sqrt(PI);
    let f = |t: f64| {
        let s = t * t;
        let pinch = if sigma > 0.0 {
            sigma * sigma / (4.0 * s)
        } else {
            0.0
        };
        let e = math::exp(-w1 * s - pinch);
        if e == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let isc = bessel_i_scaled_integer(m, s);
        Complex64::new(2.0 * sp * e * isc[m as usize], 0.0)
    };
    let tmax = math::sqrt(46.0 / w1);
    let core = (0.25 * sigma).max(tmax * 1e-9);
    let mut mesh = Vec::with_capacity(80);
    grade_toward_zero(&mut mesh, tmax, core);
    let (value, est, panels) = integrate(&f, &mesh, abs_tol)?;
    report(Method::Evanescent, value, est, panels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{legendre_q_toroidal, HalfInt};
    use approx::assert_relative_eq;

    fn cfg(m: u32, beta: Complex64, r: f64, z: f64) -> RingConfig {
        RingConfig {
            m,
            beta,
            r,
            z,
            ring_r: 1.0,
            ring_z: 0.0,
        }
    }

    #[test]
    fn angular_matches_published_total() {
        let rep = quad_angular(&cfg(0, Complex64::new(2.0, 0.0), 0.5, 0.5), 1e-11).unwrap();
        assert_relative_eq!(rep.value.re, -0.4332208795426503, max_relative = 1e-10);
        assert_relative_eq!(rep.value.im, 0.6063507452728672, max_relative = 1e-10);

        let rep = quad_angular(&cfg(3, Complex64::new(5.0, 0.0), 1.5, 1.0), 1e-11).unwrap();
        assert_relative_eq!(rep.value.re, 0.1382226177, max_relative = 1e-8);
        assert_relative_eq!(rep.value.im, -0.2010980843, max_relative = 1e-8);
    }

    #[test]
    fn angular_static_limit_is_toroidal() {
        // beta = 0 at r = R = 1, z = 2 puts omega exactly at 3.
        for &m in &[0u32, 5] {
            let rep = quad_angular(&cfg(m, Complex64::new(0.0, 0.0), 1.0, 2.0), 1e-12).unwrap();
            let q = legendre_q_toroidal(m, HalfInt::int(0), 3.0).unwrap();
            assert_relative_eq!(rep.value.re, q.re / PI, max_relative = 1e-11);
            assert!(rep.value.im.abs() <= 1e-15);
        }
    }

    #[test]
    fn angular_handles_extreme_near_ring() {
        // omega - 1 = 5e-19: the graded mesh must still resolve the peak.
        let rep = quad_angular(&cfg(1, Complex64::new(1.0, 0.0), 1.0, 1e-9), 1e-10).unwrap();
        assert_relative_eq!(rep.value.re, 6.759120566578455, max_relative = 1e-8);
        assert_relative_eq!(rep.value.im, 0.1361603388416399, max_relative = 1e-8);
    }

    #[test]
    fn angular_rejects_large_mode() {
        assert!(matches!(
            quad_angular(&cfg(65, Complex64::new(1.0, 0.0), 0.5, 0.5), 1e-9),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn spectral_matches_published_totals() {
        let rep = quad_spectral(&cfg(0, Complex64::new(2.0, 0.0), 0.5, 1.5), 1e-10).unwrap();
        assert_relative_eq!(rep.value.re, -0.4324244083, max_relative = 1e-8);
        assert_relative_eq!(rep.value.im, -0.2593676946, max_relative = 1e-8);

        let rep = quad_spectral(&cfg(0, Complex64::new(2.0, 0.0), 0.5, 5.0), 1e-10).unwrap();
        assert_relative_eq!(rep.value.re, -0.1320141290, max_relative = 1e-8);
        assert_relative_eq!(rep.value.im, -0.1413052175, max_relative = 1e-8);
    }

    #[test]
    fn spectral_agrees_with_angular() {
        let c = cfg(3, Complex64::new(5.0, 0.0), 1.5, 1.0);
        let a = quad_angular(&c, 1e-11).unwrap();
        let s = quad_spectral(&c, 1e-10).unwrap();
        assert!((a.value - s.value).norm() <= 1e-8 * a.value.norm());
    }

    #[test]
    fn spectral_static_limit_is_toroidal() {
        let c = cfg(2, Complex64::new(0.0, 0.0), 0.8, 0.5);
        let rep = quad_spectral(&c, 1e-11).unwrap();
        let d = derive(&c).unwrap();
        let q = legendre_q_toroidal(2, HalfInt::int(0), d.omega).unwrap();
        assert_relative_eq!(
            rep.value.re,
            q.re / (PI * d.sqrt_rr),
            max_relative = 1e-9
        );
    }

    #[test]
    fn spectral_rejects_bad_inputs() {
        assert!(matches!(
            quad_spectral(&cfg(0, Complex64::new(1.0, 0.5), 0.5, 1.0), 1e-9),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(
            quad_spectral(&cfg(0, Complex64::new(1.0, 0.0), 0.5, 0.0), 1e-9),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn spectral_negative_wavenumber_is_conjugate() {
        let p = quad_spectral(&cfg(1, Complex64::new(2.0, 0.0), 0.8, 1.2), 1e-10).unwrap();
        let n = quad_spectral(&cfg(1, Complex64::new(-2.0, 0.0), 0.8, 1.2), 1e-10).unwrap();
        assert_eq!(n.value, p.value.conj());
    }

    #[test]
    fn evanescent_matches_frozen_anchor() {
        let rep = quad_evanescent(1.0, 2.0, 0, 1e-12).unwrap();
        assert_relative_eq!(rep.value.re, 0.6332369492813226, max_relative = 1e-11);
        assert!(rep.value.im == 0.0);
        assert!(rep.value.re > 0.0);
        let g = rep.value.re / (PI * math::sqrt(2.0));
        assert_relative_eq!(g, 0.142528389357881145, max_relative = 1e-11);
    }

    #[test]
    fn evanescent_agrees_with_angular() {
        // omega = 2 at r = R = 1 means dz = sqrt(2); beta = i sigma/sqrt(2).
        let y = quad_evanescent(1.0, 2.0, 0, 1e-12).unwrap();
        let g_evan = y.value.re / (PI * math::sqrt(2.0));
        let b = Complex64::new(0.0, 1.0 / math::sqrt(2.0));
        let a = quad_angular(&cfg(0, b, 1.0, math::sqrt(2.0)), 1e-12).unwrap();
        assert_relative_eq!(a.value.re, g_evan, max_relative = 1e-9);
        assert!(a.value.im.abs() <= 1e-14);
    }

    #[test]
    fn evanescent_static_limit_is_toroidal() {
        for &m in &[0u32, 2] {
            let rep = quad_evanescent(0.0, 1.7, m, 1e-12).unwrap();
            let q = legendre_q_toroidal(m, HalfInt::int(0), 1.7).unwrap();
            assert_relative_eq!(
                rep.value.re,
                math::sqrt(2.0) * q.re,
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn evanescent_rejects_bad_domain() {
        assert!(matches!(
            quad_evanescent(1.0, 1.0, 0, 1e-9),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            quad_evanescent(-1.0, 2.0, 0, 1e-9),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn ring_exchange_symmetry() {
        let a = quad_angular(
            &RingConfig {
                m: 2,
                beta: Complex64::new(1.5, 0.0),
                r: 0.6,
                z: 0.9,
                ring_r: 1.4,
                ring_z: 0.2,
            },
            1e-11,
        )
        .unwrap();
        let b = quad_angular(
            &RingConfig {
                m: 2,
                beta: Complex64::new(1.5, 0.0),
                r: 1.4,
                z: 0.2,
                ring_r: 0.6,
                ring_z: 0.9,
            },
            1e-11,
        )
        .unwrap();
        assert_eq!(a.value, b.value);

        let sa = quad_spectral(
            &RingConfig {
                m: 1,
                beta: Complex64::new(2.0, 0.0),
                r: 0.6,
                z: 0.9,
                ring_r: 1.4,
                ring_z: 0.2,
            },
            1e-10,
        )
        .unwrap();
        let sb = quad_spectral(
            &RingConfig {
                m: 1,
                beta: Complex64::new(2.0, 0.0),
                r: 1.4,
                z: 0.2,
                ring_r: 0.6,
                ring_z: 0.9,
            },
            1e-10,
        )
        .unwrap();
        assert!((sa.value - sb.value).norm() <= 1e-12 * sa.value.norm());
    }
}
