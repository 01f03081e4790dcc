//! Single-index special-function series for the modal coefficients.
//!
//! Four families evaluate the coefficient and its wave splits through
//! classical expansions in one summation index:
//!
//! * a series of half-integer-order Hankel functions in the combined
//!   distance variable `gamma`, whose J and Y components deliver the odd
//!   and even splits separately; the term ratio tends to `k^2`, so the
//!   family converges fastest far from the ring;
//! * one toroidal-harmonic series per split in the variable `omega`, with
//!   term ratio of order `|lambda|^2 omega / p^2`; these converge fastest
//!   near the ring and degenerate at `lambda = 0` to the exact static
//!   single term;
//! * a single interleaved Legendre series in powers of `i lambda` whose
//!   even and odd halves reproduce the two splits term by term, evaluated
//!   here as an independently accumulated whole;
//! * a series of `1F2` hypergeometric values in powers of `-gamma^2/4`
//!   for the odd split, a genuinely different rearrangement of the same
//!   double sum (its individual terms do not match the toroidal ones,
//!   only the limit does).
//!
//! Coefficient magnitudes are carried in extended-exponent arithmetic
//! ([`Efl`]) so order ladders and factorial ratios never overflow, while
//! sums accumulate in compensated binary64. Far from the ring the
//! toroidal series alternate with huge intermediate terms and cancel
//! catastrophically; when the binary64 roundoff floor of such a sum would
//! exceed the requested tolerance, the evaluator reruns it in software
//! arbitrary-precision arithmetic sized from the observed term growth.
//! The rearrangement `Gamma(n+1/2) = (2n-1)!! sqrt(pi) / 2^n` makes those
//! high-precision sums rational in `omega` and `zeta = -lambda^2/4`, so no
//! transcendental constants are needed beyond the ladder seeds.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::coeffs::Method;
use crate::efl::Efl;
use crate::hyper2d::{mul_i, require_finite, KahanC, MethodReport, SeriesPolicy};
use crate::math;
use crate::params::Dimensionless;
use crate::specfun::{
    i_half_scaled_ladder, j_half_ladder, k_half_ladder, ln_gamma, s_half_degrees_efl,
    s_int_degrees_efl, y_half_ladder, OmegaXf,
};
use crate::{Error, Result};
use core::f64::consts::{FRAC_2_PI, LN_2, PI, SQRT_2};
use dashu_float::round::mode::HalfAway;
use dashu_float::FBig;

/// The full coefficient together with its even/odd wave split.
///
/// `total` is the modal coefficient itself, `plus` the even part (half the
/// sum over both signs of the wavenumber) and `minus` the odd part, with
/// `total = plus + minus`. For a real wavenumber the split separates the
/// real and imaginary parts of the coefficient. For a purely imaginary
/// wavenumber all three are real; the split parts then grow like
/// `exp(|gamma|)` while the total decays like `exp(-|gamma|)`, so the sum
/// identity holds relative to the split magnitude, which is the best any
/// fixed-precision split can achieve.
#[derive(Clone, Copy, Debug)]
pub struct CoeffValue {
    /// The modal coefficient.
    pub total: Complex64,
    /// Even (standing) part.
    pub plus: Complex64,
    /// Odd (radiating) part.
    pub minus: Complex64,
}

/// Fraction of the final sum magnitude below which a term no longer moves
/// the tenth significant digit; `terms_used` reports how many terms stayed
/// at or above this floor.
const SIG_FRAC: f64 = 1e-9;

/// Terms whose magnitude would overflow binary64 are kept out of the fast
/// accumulator; anything beyond this natural-log bound escalates.
const LN_F64_MAX: f64 = 700.0;

/// Compensated accumulator with convergence and significance bookkeeping.
struct Track {
    sum: KahanC,
    abs: f64,
    mags: Vec<f64>,
    quiet: u32,
}

impl Track {
    fn new() -> Track {
        Track {
            sum: KahanC::ZERO,
            abs: 0.0,
            mags: Vec::new(),
            quiet: 0,
        }
    }

    fn push(&mut self, t: Complex64, rel_tol: f64) {
        let mag = t.norm();
        self.sum.add(t);
        self.abs += mag;
        self.mags.push(mag);
        if mag <= rel_tol * self.sum.value().norm() {
            self.quiet += 1;
        } else {
            self.quiet = 0;
        }
    }

    fn value(&self) -> Complex64 {
        self.sum.value()
    }

    fn significant(&self) -> u32 {
        let floor = SIG_FRAC * self.value().norm();
        let mut n = 0u32;
        for &mag in &self.mags {
            if mag > 0.0 && mag >= floor {
                n += 1;
            }
        }
        n
    }

    /// Absolute error estimate: the geometric tail extrapolated from the
    /// last two magnitudes, floored by the roundoff of everything summed.
    fn est_error(&self) -> f64 {
        let floor = f64::EPSILON * self.abs;
        let n = self.mags.len();
        if n == 0 {
            return 0.0;
        }
        let last = self.mags[n - 1];
        if last == 0.0 {
            return floor;
        }
        let mut tail = last;
        if n >= 2 && self.mags[n - 2] > 0.0 {
            let r = last / self.mags[n - 2];
            if r < 1.0 {
                tail = last * r / (1.0 - r);
            }
        }
        if tail > floor {
            tail
        } else {
            floor
        }
    }

    fn finish(&self, method: Method) -> MethodReport {
        MethodReport {
            value: self.value(),
            method,
            terms_used: self.significant(),
            est_error: self.est_error(),
            converged: true,
        }
    }
}

fn zero_report(method: Method) -> MethodReport {
    MethodReport {
        value: Complex64::new(0.0, 0.0),
        method,
        terms_used: 0,
        est_error: 0.0,
        converged: true,
    }
}

/// Initial term allowance for a series whose term ratio tends to `ratio`:
/// enough terms for the geometric tail to pass 1e-18, plus slack for the
/// pre-asymptotic stretch.
fn initial_cap(ratio: f64, max_terms: u32) -> usize {
    let cap = max_terms as usize;
    if !(ratio > 0.0) || ratio >= 1.0 {
        return cap;
    }
    let est = math::ln(1e-18) / math::ln(ratio) + 24.0;
    let est = if est < 48.0 { 48.0 } else { est };
    if est >= cap as f64 {
        cap
    } else {
        est as usize
    }
}

// ---------------------------------------------------------------------------
// Bessel family: Hankel total plus the J/Y split, one ladder pass.
// ---------------------------------------------------------------------------

/// All three Bessel-family sums from one pass over the order ladder.
pub(crate) struct BesselEval {
    pub(crate) total: Complex64,
    pub(crate) plus: Complex64,
    pub(crate) minus: Complex64,
    pub(crate) sig_total: u32,
    pub(crate) sig_plus: u32,
    pub(crate) sig_minus: u32,
    pub(crate) est_total: f64,
    pub(crate) est_plus: f64,
    pub(crate) est_minus: f64,
}

/// Evaluate the Bessel-family series for the coefficient and both splits.
///
/// The expansion is `sum_n c_n C_{n+m+1/2}(|gamma|)` with
/// `c_n = Gamma(n+m+1/2) / (Gamma(n+2m+1) n!) (|gamma| k^2/2)^{n+m+1/2}`,
/// where `C` is `-Y/(2 sqrt(rR))` for the even part and `i J/(2 sqrt(rR))`
/// for the odd part; their sum is the full coefficient. A negative real
/// wavenumber folds by conjugation. A purely imaginary `gamma = i s` turns
/// the ladder into `K` and `I` functions with all sums real; those are
/// accumulated descaled (total carried times `exp(s)`, splits times
/// `exp(-s)`) and rescaled once at the end, so the total survives far into
/// the evanescent regime even when the splits overflow binary64.
pub(crate) fn bessel_family(d: &Dimensionless, policy: &SeriesPolicy) -> Result<BesselEval> {
    policy.validate()?;
    let g = d.gamma;
    if g.re == 0.0 && g.im == 0.0 {
        return Err(Error::Domain(
            "Bessel-family series needs a nonzero wavenumber",
        ));
    }
    if g.re != 0.0 && g.im != 0.0 {
        return Err(Error::Unsupported(
            "Bessel-family series supports only real or purely imaginary wavenumbers",
        ));
    }
    if g.im != 0.0 {
        bessel_family_evanescent(d, policy)
    } else {
        bessel_family_traveling(d, policy)
    }
}

fn ln_c0_bessel(m: f64, rho: f64) -> f64 {
    0.5 * math::ln(PI) - 2.0 * m * LN_2 - ln_gamma(m + 1.0) + (m + 0.5) * math::ln(rho)
}

fn bessel_family_traveling(d: &Dimensionless, policy: &SeriesPolicy) -> Result<BesselEval> {
    let neg = d.gamma.re < 0.0;
    let arg = if neg { -d.gamma.re } else { d.gamma.re };
    let m = d.m as usize;
    let mf = d.m as f64;
    let rho = arg * d.k2 * 0.5;
    let inv2s = 0.5 / d.sqrt_rr;
    let ln_c0 = ln_c0_bessel(mf, rho);

    let mut n_cap = initial_cap(d.k2, policy.max_terms);
    loop {
        let jl = j_half_ladder((n_cap + m) as u32, arg);
        let yl = y_half_ladder((n_cap + m) as u32, arg);
        let mut tot = Track::new();
        let mut pl = Track::new();
        let mut mi = Track::new();
        let mut c = Efl::exp(ln_c0);
        let mut done = false;
        for n in 0..=n_cap {
            let idx = n + m;
            let ty = c.mul(&yl[idx]).to_f64();
            let tj = c.mul(&jl[idx]).to_f64();
            if !ty.is_finite() || !tj.is_finite() {
                return Err(Error::NonFinite);
            }
            let tp = Complex64::new(-ty * inv2s, 0.0);
            let tm = Complex64::new(0.0, tj * inv2s);
            pl.push(tp, policy.rel_tol);
            mi.push(tm, policy.rel_tol);
            tot.push(Complex64::new(tp.re, tm.im), policy.rel_tol);
            if tot.quiet >= policy.stagnation_window
                && pl.quiet >= policy.stagnation_window
                && mi.quiet >= policy.stagnation_window
            {
                done = true;
                break;
            }
            let nf = n as f64;
            c = c.scale(rho * (nf + mf + 0.5) / ((nf + 2.0 * mf + 1.0) * (nf + 1.0)));
        }
        if done {
            let plus = pl.value();
            let fold = if neg { -1.0 } else { 1.0 };
            let minus = Complex64::new(0.0, fold * mi.value().im);
            return Ok(BesselEval {
                total: plus + minus,
                plus,
                minus,
                sig_total: tot.significant(),
                sig_plus: pl.significant(),
                sig_minus: mi.significant(),
                est_total: tot.est_error(),
                est_plus: pl.est_error(),
                est_minus: mi.est_error(),
            });
        }
        if n_cap >= policy.max_terms as usize {
            return Err(Error::NonConvergence(
                "Bessel-function series hit the term cap",
            ));
        }
        n_cap = (n_cap * 2).min(policy.max_terms as usize);
    }
}

fn rescale(v: Complex64, s: &Efl) -> Complex64 {
    Complex64::new(s.scale(v.re).to_f64(), s.scale(v.im).to_f64())
}

fn bessel_family_evanescent(d: &Dimensionless, policy: &SeriesPolicy) -> Result<BesselEval> {
    let sigma = d.gamma.im;
    let m = d.m as usize;
    let mf = d.m as f64;
    let rho = sigma * d.k2 * 0.5;
    let inv2s = 0.5 / d.sqrt_rr;
    let inv_pi_s = 1.0 / (PI * d.sqrt_rr);
    let ln_c0 = ln_c0_bessel(mf, rho);
    let esig = Efl::exp(sigma);
    let emsig = Efl::exp(-sigma);

    let mut n_cap = initial_cap(d.k2, policy.max_terms);
    loop {
        let kl = k_half_ladder((n_cap + m) as u32, sigma);
        let il = i_half_scaled_ladder((n_cap + m) as u32, sigma);
        let mut tot = Track::new();
        let mut pl = Track::new();
        let mut mi = Track::new();
        let mut c = Efl::exp(ln_c0);
        let mut done = false;
        for n in 0..=n_cap {
            let idx = n + m;
            // Descaled pieces: kt = c K e^{+s} (total), kp = c K e^{-s}
            // (split), ii = c I e^{-s}; the I ladder is stored prescaled.
            let kt = c.mul(&kl[idx]).mul(&esig).to_f64();
            let kp = c.mul(&kl[idx]).mul(&emsig).to_f64();
            let ii = c.mul(&il[idx]).to_f64();
            if !kt.is_finite() || !kp.is_finite() || !ii.is_finite() {
                return Err(Error::NonFinite);
            }
            let sgn = if (n + m) % 2 == 0 { 1.0 } else { -1.0 };
            tot.push(Complex64::new(kt * inv_pi_s, 0.0), policy.rel_tol);
            pl.push(
                Complex64::new(inv2s * (FRAC_2_PI * kp + sgn * ii), 0.0),
                policy.rel_tol,
            );
            mi.push(Complex64::new(-inv2s * sgn * ii, 0.0), policy.rel_tol);
            if tot.quiet >= policy.stagnation_window
                && pl.quiet >= policy.stagnation_window
                && mi.quiet >= policy.stagnation_window
            {
                done = true;
                break;
            }
            let nf = n as f64;
            c = c.scale(rho * (nf + mf + 0.5) / ((nf + 2.0 * mf + 1.0) * (nf + 1.0)));
        }
        if done {
            return Ok(BesselEval {
                total: rescale(tot.value(), &emsig),
                plus: rescale(pl.value(), &esig),
                minus: rescale(mi.value(), &esig),
                sig_total: tot.significant(),
                sig_plus: pl.significant(),
                sig_minus: mi.significant(),
                est_total: emsig.scale(tot.est_error()).to_f64(),
                est_plus: esig.scale(pl.est_error()).to_f64(),
                est_minus: esig.scale(mi.est_error()).to_f64(),
            });
        }
        if n_cap >= policy.max_terms as usize {
            return Err(Error::NonConvergence(
                "Bessel-function series hit the term cap",
            ));
        }
        n_cap = (n_cap * 2).min(policy.max_terms as usize);
    }
}

/// Full coefficient by the series of half-integer-order Hankel functions.
///
/// Converges for any nonzero real or purely imaginary wavenumber off the
/// ring; the closer to the ring, the more terms it needs (the term ratio
/// tends to `k^2`). Errors with [`Error::NonConvergence`] when the cap is
/// reached, signalling the caller to switch families.
pub fn eval_hankel_series(d: &Dimensionless, policy: &SeriesPolicy) -> Result<MethodReport> {
    let fam = bessel_family(d, policy)?;
    require_finite(fam.total)?;
    Ok(MethodReport {
        value: fam.total,
        method: Method::Hankel,
        terms_used: fam.sig_total,
        est_error: fam.est_total,
        converged: true,
    })
}

/// Even split by the series of Bessel functions of the second kind.
///
/// For a purely imaginary wavenumber the split grows like `exp(|gamma|)`
/// and can overflow binary64 even though the total coefficient is fine;
/// that case reports [`Error::NonFinite`].
pub fn eval_bessely_series(d: &Dimensionless, policy: &SeriesPolicy) -> Result<MethodReport> {
    let fam = bessel_family(d, policy)?;
    require_finite(fam.plus)?;
    Ok(MethodReport {
        value: fam.plus,
        method: Method::BesselJY,
        terms_used: fam.sig_plus,
        est_error: fam.est_plus,
        converged: true,
    })
}

/// Odd split by the series of Bessel functions of the first kind.
///
/// The zero-wavenumber limit is exactly zero (every term carries a factor
/// `gamma^{n+m+1/2}`), reported without summing anything.
pub fn eval_besselj_series(d: &Dimensionless, policy: &SeriesPolicy) -> Result<MethodReport> {
    if d.gamma.re == 0.0 && d.gamma.im == 0.0 {
        return Ok(zero_report(Method::BesselJY));
    }
    let fam = bessel_family(d, policy)?;
    require_finite(fam.minus)?;
    Ok(MethodReport {
        value: fam.minus,
        method: Method::BesselJY,
        terms_used: fam.sig_minus,
        est_error: fam.est_minus,
        converged: true,
    })
}

/// One pass over the Bessel-function family, packaged for dispatch: the
/// value triple plus per-part significance counts and error estimates,
/// each ordered `[total, plus, minus]`.
pub(crate) fn bessel_family_sums(
    d: &Dimensionless,
    policy: &SeriesPolicy,
) -> Result<(CoeffValue, [u32; 3], [f64; 3])> {
    let fam = bessel_family(d, policy)?;
    Ok((
        CoeffValue {
            total: fam.total,
            plus: fam.plus,
            minus: fam.minus,
        },
        [fam.sig_total, fam.sig_plus, fam.sig_minus],
        [fam.est_total, fam.est_plus, fam.est_minus],
    ))
}

// ---------------------------------------------------------------------------
// Toroidal-harmonic (Legendre) series, fast pass.
// ---------------------------------------------------------------------------

/// One binary64/extended-exponent pass over a toroidal ladder series.
struct LadderPass {
    value: Complex64,
    sig: u32,
    est: f64,
    abs: f64,
    /// The stagnation rule fired (the sum is numerically converged).
    quiet_met: bool,
    /// Some term exceeded the binary64 range and was left out of the sum.
    overflowed: bool,
    /// In the overflow regime: the term magnitudes have decayed far below
    /// the first term, so the series itself is done rising and falling.
    settled: bool,
    /// Natural log of the largest term magnitude encountered.
    ln_max: f64,
    /// Natural log of the first nonzero term magnitude.
    ln_first: f64,
}

/// Shared driver for the two toroidal split series. `table[p]` holds the
/// ladder value for outer index `p`, `c` starts at the folded prefactor
/// magnitude and `ratio(p)` advances it, `phase(p)` spins the accumulated
/// unit phase.
fn ladder_pass(
    table: &[Efl],
    mut c: Efl,
    mut ph: Complex64,
    unit: Complex64,
    ratio: impl Fn(f64) -> f64,
    p_cap: usize,
    policy: &SeriesPolicy,
) -> LadderPass {
    let mut tr = Track::new();
    let mut ln_max = f64::NEG_INFINITY;
    let mut ln_first = f64::NEG_INFINITY;
    let mut overflowed = false;
    let mut quiet_met = false;
    let mut settled = false;
    for p in 0..=p_cap {
        let tln = if c.is_zero() || table[p].is_zero() {
            f64::NEG_INFINITY
        } else {
            c.ln_abs() + table[p].ln_abs()
        };
        if tln > ln_max {
            ln_max = tln;
        }
        if ln_first == f64::NEG_INFINITY && tln > f64::NEG_INFINITY {
            ln_first = tln;
        }
        if tln > LN_F64_MAX {
            overflowed = true;
        }
        if overflowed {
            if tln < ln_first - 46.0 && tln < ln_max - 46.0 {
                settled = true;
                break;
            }
        } else {
            let t = c.mul(&table[p]).to_f64();
            tr.push(ph * t, policy.rel_tol);
            if tr.quiet >= policy.stagnation_window {
                quiet_met = true;
                break;
            }
        }
        c = c.scale(ratio(p as f64));
        ph *= unit;
    }
    LadderPass {
        value: tr.value(),
        sig: tr.significant(),
        est: tr.est_error(),
        abs: tr.abs,
        quiet_met,
        overflowed,
        settled,
        ln_max,
        ln_first,
    }
}

/// Whether the binary64 roundoff floor of the pass is visible at the
/// requested tolerance, so the sum cancelled too heavily to trust.
fn floor_dirty(pass: &LadderPass, policy: &SeriesPolicy) -> bool {
    pass.overflowed || f64::EPSILON * pass.abs > 0.5 * policy.rel_tol * pass.value.norm()
}

/// Even split by the toroidal-harmonic series in `omega`.
///
/// `Lambda_+ = (-1)^m / sqrt(2 r R) * sum_p zeta^p 2^{p+m}
/// S^m_{p-1/2}(omega) / ((2p+2m-1)!! p!)` with `zeta = -lambda^2/4` and
/// `S^m_nu(w) = (w^2-1)^{nu/2} P^m_nu(w/sqrt(w^2-1))`. At `lambda = 0`
/// only the `p = 0` term survives and equals the static coefficient. Far
/// from the ring the alternating sum cancels catastrophically; a real
/// `zeta` then reruns in arbitrary precision, while a genuinely complex
/// one keeps the binary64 value with an honest error estimate.
pub fn eval_legendre_plus_series(
    d: &Dimensionless,
    policy: &SeriesPolicy,
) -> Result<MethodReport> {
    policy.validate()?;
    let om = OmegaXf::new(d.omega_m1);
    let zeta = -d.lambda * d.lambda * 0.25;
    let zmag = zeta.norm();
    let unit = if zmag > 0.0 {
        zeta / zmag
    } else {
        Complex64::new(1.0, 0.0)
    };
    let mf = d.m as f64;
    let sgn0 = if d.m % 2 == 0 { 1.0 } else { -1.0 };
    let ln_c0 = 0.5 * math::ln(PI) - math::ln(SQRT_2 * d.sqrt_rr) - ln_gamma(mf + 0.5);

    let mut p_cap = 32usize;
    let pass = loop {
        let table = s_half_degrees_efl(d.m, p_cap, &om)?;
        let pass = ladder_pass(
            &table,
            Efl::exp(ln_c0),
            Complex64::new(sgn0, 0.0),
            unit,
            |pf| zmag / ((pf + 1.0) * (pf + mf + 0.5)),
            p_cap,
            policy,
        );
        if pass.quiet_met || pass.settled {
            break pass;
        }
        if p_cap >= policy.max_terms as usize {
            return Err(Error::NonConvergence(
                "Legendre-function series hit the term cap",
            ));
        }
        p_cap = (p_cap * 2).min(policy.max_terms as usize);
    };

    if !floor_dirty(&pass, policy) {
        return Ok(MethodReport {
            value: pass.value,
            method: Method::LegendreQ,
            terms_used: pass.sig,
            est_error: pass.est,
            converged: true,
        });
    }
    if zeta.im != 0.0 {
        if pass.overflowed {
            return Err(Error::NonFinite);
        }
        return Ok(MethodReport {
            value: pass.value,
            method: Method::LegendreQ,
            terms_used: pass.sig,
            est_error: pass.est,
            converged: true,
        });
    }
    let sum = mp_run(&pass, policy, |bits| {
        mp_plus_sum(d.m, d.omega_m1, zeta.re, bits, policy)
    })?;
    let scale = sgn0 / (SQRT_2 * d.sqrt_rr);
    let value = Complex64::new(sum.value * scale, 0.0);
    require_finite(value)?;
    Ok(MethodReport {
        value,
        method: Method::LegendreQ,
        terms_used: sum.sig,
        est_error: (sum.roundoff_rel + sum.tail_rel) * value.norm(),
        converged: true,
    })
}

/// Odd split by the toroidal-harmonic series in `omega`.
///
/// `Lambda_- = i (lambda/2)^{2m+1} / sqrt(2 r R) * sum_p zeta^p 2^{p+m+1}
/// S^m_{p+m}(omega) / ((2p+2m+1)!! (p+2m)!)`. The prefactor power makes
/// the `lambda = 0` limit exactly zero. Cancellation far from the ring is
/// handled as in [`eval_legendre_plus_series`].
pub fn eval_legendre_minus_series(
    d: &Dimensionless,
    policy: &SeriesPolicy,
) -> Result<MethodReport> {
    policy.validate()?;
    let lmag = d.lambda.norm();
    if lmag == 0.0 {
        return Ok(zero_report(Method::LegendreQ));
    }
    let om = OmegaXf::new(d.omega_m1);
    let zeta = -d.lambda * d.lambda * 0.25;
    let zmag = zeta.norm();
    let unit = zeta / zmag;
    let mf = d.m as f64;
    let m = d.m as usize;
    let two_m1 = 2 * d.m + 1;
    let ln_c0 = 0.5 * math::ln(PI) - math::ln(SQRT_2 * d.sqrt_rr)
        + two_m1 as f64 * math::ln(lmag * 0.5)
        - ln_gamma(mf + 1.5)
        - ln_gamma(2.0 * mf + 1.0);
    let ul = d.lambda / lmag;
    let ph0 = mul_i(ul.powu(two_m1));

    let mut p_cap = 32usize;
    let pass = loop {
        let full = s_int_degrees_efl(d.m, p_cap + m, &om)?;
        let table = &full[m..];
        let pass = ladder_pass(
            table,
            Efl::exp(ln_c0),
            ph0,
            unit,
            |pf| zmag / ((pf + mf + 1.5) * (pf + 2.0 * mf + 1.0)),
            p_cap,
            policy,
        );
        if pass.quiet_met || pass.settled {
            break pass;
        }
        if p_cap >= policy.max_terms as usize {
            return Err(Error::NonConvergence(
                "Legendre-function series hit the term cap",
            ));
        }
        p_cap = (p_cap * 2).min(policy.max_terms as usize);
    };

    if !floor_dirty(&pass, policy) {
        return Ok(MethodReport {
            value: pass.value,
            method: Method::LegendreQ,
            terms_used: pass.sig,
            est_error: pass.est,
            converged: true,
        });
    }
    if zeta.im != 0.0 {
        if pass.overflowed {
            return Err(Error::NonFinite);
        }
        return Ok(MethodReport {
            value: pass.value,
            method: Method::LegendreQ,
            terms_used: pass.sig,
            est_error: pass.est,
            converged: true,
        });
    }
    let sum = mp_run(&pass, policy, |bits| {
        mp_minus_sum(d.m, d.omega_m1, zeta.re, bits, policy)
    })?;
    let ln_pref = two_m1 as f64 * math::ln(lmag * 0.5) - math::ln(SQRT_2 * d.sqrt_rr);
    let magnitude = Efl::exp(ln_pref).scale(sum.value).to_f64();
    let value = ph0 * magnitude;
    require_finite(value)?;
    Ok(MethodReport {
        value,
        method: Method::LegendreQ,
        terms_used: sum.sig,
        est_error: (sum.roundoff_rel + sum.tail_rel) * value.norm(),
        converged: true,
    })
}

/// Full coefficient by the interleaved Legendre series in `i lambda`.
///
/// Even-index terms use half-integer ladder degrees and reproduce the even
/// split; odd-index terms use integer degrees and reproduce the odd split.
/// Both halves are interleaved into a single compensated accumulation, so
/// the result is an independent arithmetic path to `plus + minus`. In the
/// heavy-cancellation regime this route reports its binary64 roundoff
/// floor honestly in `est_error` instead of escalating.
pub fn eval_p_series(d: &Dimensionless, policy: &SeriesPolicy) -> Result<MethodReport> {
    p_series_sums(d, policy).map(|(rep, _, _)| rep)
}

/// P-form ladder summation, also returning the even/odd partial sums
/// (the terms with integer and half-odd exponents respectively), which are
/// the two wave splits.
pub(crate) fn p_series_sums(
    d: &Dimensionless,
    policy: &SeriesPolicy,
) -> Result<(MethodReport, Complex64, Complex64)> {
    policy.validate()?;
    let om = OmegaXf::new(d.omega_m1);
    let lmag = d.lambda.norm();
    let l2 = lmag * lmag;
    let mf = d.m as f64;
    let pref_ln = -math::ln(SQRT_2 * d.sqrt_rr);
    let sgn0 = if d.m % 2 == 0 { 1.0 } else { -1.0 };
    let ln_ce0 = 0.5 * math::ln(PI) - ln_gamma(mf + 0.5) + pref_ln;
    let (iu, ph2) = if lmag > 0.0 {
        let v = mul_i(d.lambda / lmag);
        (v, v * v)
    } else {
        (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
    };

    let mut p_cap = 32usize;
    loop {
        let sh = s_half_degrees_efl(d.m, p_cap, &om)?;
        let si = s_int_degrees_efl(d.m, p_cap, &om)?;
        let mut tr = Track::new();
        let mut pk = KahanC::ZERO;
        let mut mk = KahanC::ZERO;
        let mut ce = Efl::exp(ln_ce0);
        let mut co = if lmag > 0.0 {
            Efl::exp(math::ln(lmag) - ln_gamma(mf + 1.0) + pref_ln)
        } else {
            Efl::ZERO
        };
        let mut phe = Complex64::new(sgn0, 0.0);
        let mut done = false;
        for p in 0..=p_cap {
            let te = ce.mul(&sh[p]).to_f64();
            let to = co.mul(&si[p]).to_f64();
            if !te.is_finite() || !to.is_finite() {
                return Err(Error::NonFinite);
            }
            let even = phe * te;
            let odd = (phe * iu) * to;
            tr.push(even, policy.rel_tol);
            tr.push(odd, policy.rel_tol);
            pk.add(even);
            mk.add(odd);
            if tr.quiet >= policy.stagnation_window {
                done = true;
                break;
            }
            let pf = p as f64;
            ce = ce.scale(
                l2 * (pf + 0.5) / ((2.0 * pf + 1.0) * (2.0 * pf + 2.0) * (mf + pf + 0.5)),
            );
            co = co.scale(
                l2 * (pf + 1.0) / ((2.0 * pf + 2.0) * (2.0 * pf + 3.0) * (mf + pf + 1.0)),
            );
            phe *= ph2;
        }
        if done {
            let rep = tr.finish(Method::PSeries);
            require_finite(rep.value)?;
            return Ok((rep, pk.value(), mk.value()));
        }
        if p_cap >= policy.max_terms as usize {
            return Err(Error::NonConvergence(
                "Legendre-function series hit the term cap",
            ));
        }
        p_cap = (p_cap * 2).min(policy.max_terms as usize);
    }
}

// ---------------------------------------------------------------------------
// 1F2 hypergeometric series for the odd split.
// ---------------------------------------------------------------------------

/// Ascending series for `1F2(a; b1, b2; u)`, returning the value and the
/// sum of term magnitudes (for roundoff accounting).
fn one_f2(a: f64, b1: f64, b2: f64, u: Complex64) -> Result<(Complex64, f64)> {
    let mut sum = KahanC::ZERO;
    let mut t = Complex64::new(1.0, 0.0);
    let mut abs = 0.0f64;
    let mut quiet = 0u32;
    for j in 0..800u32 {
        sum.add(t);
        abs += t.norm();
        let jf = j as f64;
        t *= u * ((a + jf) / ((b1 + jf) * (b2 + jf) * (jf + 1.0)));
        if t.norm() <= f64::EPSILON * sum.value().norm() {
            quiet += 1;
            if quiet >= 3 {
                return Ok((sum.value(), abs));
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NonConvergence(
        "inner hypergeometric series hit the iteration cap",
    ))
}

/// Odd split by the series of `1F2` hypergeometric values.
///
/// `Lambda_- = i sqrt(pi) / (m! sqrt(rR)) (gamma k / 4)^{2m+1} * sum_p
/// zeta^p 1F2(m+1/2; p+m+3/2, 2m+1; gamma^2 k^2 / 4) / (Gamma(p+m+3/2) p!)`
/// with `zeta = -gamma^2/4`. This is a different rearrangement of the
/// same double sum as the odd toroidal series: the limits agree while the
/// individual terms do not. The outer variable grows like `gamma^2`, so
/// the route suits small and moderate `|gamma|`; it accepts any complex
/// wavenumber in the closed upper half-plane. The zero-wavenumber limit
/// is exactly zero.
pub fn eval_1f2_series(d: &Dimensionless, policy: &SeriesPolicy) -> Result<MethodReport> {
    policy.validate()?;
    let gmag = d.gamma.norm();
    if gmag == 0.0 {
        return Ok(zero_report(Method::OneF2));
    }
    let mf = d.m as f64;
    let a = mf + 0.5;
    let b2 = 2.0 * mf + 1.0;
    let u = d.y * d.k2;
    let zeta = -d.y;
    let zmag = zeta.norm();
    let unit = if zmag > 0.0 {
        zeta / zmag
    } else {
        Complex64::new(1.0, 0.0)
    };
    let two_m1 = 2 * d.m + 1;
    let k = math::sqrt(d.k2);
    let ln_c0 = 0.5 * math::ln(PI) - ln_gamma(mf + 1.0) - math::ln(d.sqrt_rr)
        + two_m1 as f64 * math::ln(gmag * k * 0.25)
        - ln_gamma(mf + 1.5);
    let ph0 = mul_i((d.gamma / gmag).powu(two_m1));

    let mut tr = Track::new();
    let mut extra = 0.0f64;
    let mut c = Efl::exp(ln_c0);
    let mut ph = ph0;
    for p in 0..policy.max_terms {
        let pf = p as f64;
        let (f, fabs) = one_f2(a, pf + mf + 1.5, b2, u)?;
        let fmag = f.norm();
        let t = if fmag > 0.0 {
            (f / fmag) * ph * c.mul(&Efl::from_f64(fmag)).to_f64()
        } else {
            Complex64::new(0.0, 0.0)
        };
        if !t.re.is_finite() || !t.im.is_finite() {
            return Err(Error::NonFinite);
        }
        extra += c.mul(&Efl::from_f64(fabs)).to_f64() * f64::EPSILON;
        tr.push(t, policy.rel_tol);
        if tr.quiet >= policy.stagnation_window {
            let mut rep = tr.finish(Method::OneF2);
            if extra > rep.est_error {
                rep.est_error = extra;
            }
            return Ok(rep);
        }
        c = c.scale(zmag / ((pf + mf + 1.5) * (pf + 1.0)));
        ph *= unit;
    }
    Err(Error::NonConvergence(
        "hypergeometric-series route hit the term cap",
    ))
}

// ---------------------------------------------------------------------------
// Arbitrary-precision fallback for the cancelling toroidal sums.
// ---------------------------------------------------------------------------

type Mp = FBig<HalfAway, 2>;

/// An arbitrary-precision sum with its diagnostics. `value` is the sum
/// rounded to binary64; the error components are relative to it.
struct MpSum {
    value: f64,
    sig: u32,
    roundoff_rel: f64,
    tail_rel: f64,
}

fn mp_v(x: f64, bits: usize) -> Result<Mp> {
    match Mp::try_from(x) {
        Ok(v) => Ok(v.with_precision(bits).value()),
        Err(_) => Err(Error::NonFinite),
    }
}

fn mp_abs_ratio(t: &Mp, sum: &Mp) -> f64 {
    let q = (t / sum).to_f64().value();
    if q < 0.0 {
        -q
    } else {
        q
    }
}

/// Gauss hypergeometric series in arbitrary precision; the parameters stay
/// exactly representable (integers and half-integers), the terms are all
/// positive for the seed arguments used here, and the loop stops when the
/// sum no longer changes at the working precision.
fn mp_gauss_2f1(a: f64, b: f64, c: f64, z: &Mp, bits: usize) -> Result<Mp> {
    let mut term = mp_v(1.0, bits)?;
    let mut sum = term.clone();
    let mut j = 0.0f64;
    for _ in 0..400_000u32 {
        let num = mp_v((a + j) * (b + j), bits)?;
        let den = mp_v((c + j) * (1.0 + j), bits)?;
        term = &(&(&term * &num) * z) / &den;
        let next = &sum + &term;
        if next == sum {
            return Ok(sum);
        }
        sum = next;
        j += 1.0;
    }
    Err(Error::NonConvergence(
        "hypergeometric seed series hit the iteration cap",
    ))
}

/// Ladder seeds `S^m_{-1/2}` and `S^m_{+1/2}` through the large-argument
/// hypergeometric forms, which are free of transcendental prefactors:
/// products of half-integers times `omega^{-1/2}` times a `2F1` in
/// `1/omega^2`.
fn mp_seeds_half(m: u32, om: &Mp, om2m1: &Mp, bits: usize) -> Result<(Mp, Mp)> {
    let one = mp_v(1.0, bits)?;
    let inv_om = &one / om;
    let z = &inv_om * &inv_om;
    let mfv = m as f64;
    let f0 = mp_gauss_2f1((mfv + 1.5) / 2.0, (mfv + 0.5) / 2.0, mfv + 1.0, &z, bits)?;
    let f1 = mp_gauss_2f1((mfv + 2.5) / 2.0, (mfv + 1.5) / 2.0, mfv + 1.0, &z, bits)?;
    let mut prod_m = one.clone();
    let mut prod_p = one;
    for j in 1..=m {
        let jf = j as f64;
        prod_m = &(&(&prod_m * &mp_v((jf - 0.5) * (jf - 0.5), bits)?) * &inv_om)
            / &mp_v(2.0 * jf, bits)?;
        prod_p = &(&(&prod_p * &mp_v((jf + 0.5) * (jf - 1.5), bits)?) * &inv_om)
            / &mp_v(2.0 * jf, bits)?;
    }
    let sign = mp_v(if m % 2 == 0 { 1.0 } else { -1.0 }, bits)?;
    let inv_sqrt = inv_om.sqrt();
    let s_m = &(&(&prod_m * &inv_sqrt) * &f0) * &sign;
    let s_p = &(&(&(&(&prod_p * om2m1) * &inv_om) * &inv_sqrt) * &f1) * &sign;
    Ok((s_m, s_p))
}

fn mp_omega(omega_m1: f64, bits: usize) -> Result<(Mp, Mp)> {
    let w1 = mp_v(omega_m1, bits)?;
    let om = &w1 + &mp_v(1.0, bits)?;
    let om2m1 = &w1 * &(&w1 + &mp_v(2.0, bits)?);
    Ok((om, om2m1))
}

/// Accumulate a toroidal ladder series in arbitrary precision. The ladder
/// pair `(a, b)` holds consecutive ladder values, `advance` produces the
/// next one, and `coeff_div(p)` is the exact positive integer divisor of
/// the coefficient step `c *= 2 zeta / coeff_div(p)`.
#[allow(clippy::too_many_arguments)]
fn mp_ladder_sum(
    mut a: Mp,
    mut b: Mp,
    mut c: Mp,
    zeta: f64,
    coeff_div: impl Fn(usize) -> f64,
    advance: impl Fn(usize, &Mp, &Mp) -> Result<Mp>,
    bits: usize,
    policy: &SeriesPolicy,
) -> Result<MpSum> {
    let zeta2 = mp_v(2.0 * zeta, bits)?;
    let mut sum = Mp::ZERO;
    let mut terms: Vec<Mp> = Vec::new();
    let mut quiet = 0u32;
    let max_p = policy.max_terms as usize;
    let mut p = 0usize;
    loop {
        let t = &c * &a;
        sum = &sum + &t;
        terms.push(t);
        let ratio = mp_abs_ratio(&terms[terms.len() - 1], &sum);
        if ratio <= policy.rel_tol {
            quiet += 1;
            if quiet >= policy.stagnation_window {
                break;
            }
        } else {
            quiet = 0;
        }
        if p + 1 >= max_p {
            return Err(Error::NonConvergence(
                "Legendre-function series hit the term cap",
            ));
        }
        c = &(&c * &zeta2) / &mp_v(coeff_div(p), bits)?;
        let next = advance(p, &a, &b)?;
        a = b;
        b = next;
        p += 1;
    }
    let value = sum.to_f64().value();
    let mut abs_ratio = 0.0f64;
    let mut sig = 0u32;
    let n = terms.len();
    for t in &terms {
        let r = mp_abs_ratio(t, &sum);
        abs_ratio += r;
        if r >= SIG_FRAC {
            sig += 1;
        }
    }
    let tail_rel = if n >= 2 {
        let r1 = mp_abs_ratio(&terms[n - 1], &sum);
        let r0 = mp_abs_ratio(&terms[n - 2], &sum);
        if r0 > 0.0 && r1 / r0 < 1.0 {
            r1 * (r1 / r0) / (1.0 - r1 / r0)
        } else {
            r1
        }
    } else {
        0.0
    };
    let roundoff_rel = abs_ratio * math::ldexp(1.0, 1 - bits as i32);
    Ok(MpSum {
        value,
        sig,
        roundoff_rel,
        tail_rel,
    })
}

/// Even-split ladder sum `sum_p zeta^p 2^{p+m} S^m_{p-1/2}(omega) /
/// ((2p+2m-1)!! p!)` in arbitrary precision.
fn mp_plus_sum(
    m: u32,
    omega_m1: f64,
    zeta: f64,
    bits: usize,
    policy: &SeriesPolicy,
) -> Result<MpSum> {
    let (om, om2m1) = mp_omega(omega_m1, bits)?;
    let (a, b) = mp_seeds_half(m, &om, &om2m1, bits)?;
    let mut c = mp_v(math::powi(2.0, m as i32), bits)?;
    for j in 1..=m {
        c = &c / &mp_v(2.0 * j as f64 - 1.0, bits)?;
    }
    let mf = m as f64;
    let m_u = m as usize;
    mp_ladder_sum(
        a,
        b,
        c,
        zeta,
        |p| ((2 * p + 2 * m_u + 1) * (p + 1)) as f64,
        |p, lo, hi| {
            let pf = (p + 1) as f64;
            let grow = &(hi * &om) * &mp_v(2.0 * pf, bits)?;
            let pull = &(lo * &om2m1) * &mp_v(pf - 0.5 + mf, bits)?;
            Ok(&(&grow - &pull) / &mp_v(pf + 0.5 - mf, bits)?)
        },
        bits,
        policy,
    )
}

/// Odd-split ladder sum `sum_p zeta^p 2^{p+m+1} S^m_{p+m}(omega) /
/// ((2p+2m+1)!! (p+2m)!)` in arbitrary precision.
fn mp_minus_sum(
    m: u32,
    omega_m1: f64,
    zeta: f64,
    bits: usize,
    policy: &SeriesPolicy,
) -> Result<MpSum> {
    let (om, om2m1) = mp_omega(omega_m1, bits)?;
    let mut a = mp_v(1.0, bits)?;
    for j in 1..=m {
        a = &a * &mp_v(2.0 * j as f64 - 1.0, bits)?;
    }
    let b = &(&a * &om) * &mp_v(2.0 * m as f64 + 1.0, bits)?;
    let mut c = mp_v(math::powi(2.0, m as i32 + 1), bits)?;
    for j in 0..=m {
        c = &c / &mp_v(2.0 * j as f64 + 1.0, bits)?;
    }
    for j in 1..=(2 * m) {
        c = &c / &mp_v(j as f64, bits)?;
    }
    let mf = m as f64;
    let m_u = m as usize;
    mp_ladder_sum(
        a,
        b,
        c,
        zeta,
        |p| ((2 * p + 2 * m_u + 3) * (p + 2 * m_u + 1)) as f64,
        |p, lo, hi| {
            let nf = (p + m_u + 1) as f64;
            let grow = &(hi * &om) * &mp_v(2.0 * nf + 1.0, bits)?;
            let pull = &(lo * &om2m1) * &mp_v(nf + mf, bits)?;
            Ok(&(&grow - &pull) / &mp_v(nf - mf + 1.0, bits)?)
        },
        bits,
        policy,
    )
}

/// Size the working precision from the observed term growth and rerun the
/// sum until its roundoff component is negligible.
fn mp_run(
    pass: &LadderPass,
    policy: &SeriesPolicy,
    eval: impl Fn(usize) -> Result<MpSum>,
) -> Result<MpSum> {
    let vmag = pass.value.norm();
    let ln_ref = if pass.overflowed || !(vmag > 0.0) || !vmag.is_finite() {
        pass.ln_first
    } else {
        math::ln(vmag).min(pass.ln_first)
    };
    let deficit = pass.ln_max - ln_ref;
    let mut bits = if deficit > 0.0 {
        (deficit / LN_2) as usize + 160
    } else {
        192
    };
    if bits < 192 {
        bits = 192;
    }
    for _ in 0..6 {
        if bits > 200_000 {
            break;
        }
        let sum = eval(bits)?;
        if sum.roundoff_rel <= 1e-14 {
            return Ok(sum);
        }
        let grow = math::ln(sum.roundoff_rel / 1e-14) / LN_2;
        bits += grow as usize + 64;
        let _ = policy;
    }
    Err(Error::NonConvergence(
        "arbitrary-precision fallback failed to stabilize",
    ))
}
