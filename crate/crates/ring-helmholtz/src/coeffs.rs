//! Coefficient evaluation dispatch: one entry point over every route, plus
//! an automatic regime selector.

use core::f64::consts::{PI, SQRT_2};
use num_complex::Complex64;

use crate::hyper2d::{lambda_minus_closed, lambda_plus_closed, MethodReport, SeriesPolicy};
use crate::params::{derive, Dimensionless, RingConfig};
use crate::quadrature::{quad_angular, quad_evanescent, quad_spectral};
use crate::series::{
    bessel_family_sums, eval_1f2_series, eval_legendre_minus_series, eval_legendre_plus_series,
    p_series_sums, CoeffValue,
};
use crate::{Error, Result};

/// Identifies one evaluation route for the modal coefficient.
///
/// The routes are independent implementations of the same quantity, so any
/// two of them cross-validate each other; [`Method::Auto`] picks a sensible
/// route from the geometry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Closed-form pair: Horn `H3` double series for the even split plus a
    /// Kampe de Feriet double series for the odd split.
    ClosedForm,
    /// Series of half-integer Hankel functions of the first kind.
    Hankel,
    /// Bessel `Y` series for the even split plus Bessel `J` series for the
    /// odd split.
    BesselJY,
    /// Toroidal Legendre Q-form series (even split in integer-degree `Q`,
    /// odd split in half-odd-degree `Q`).
    LegendreQ,
    /// Unified associated-Legendre P-form series over both splits.
    PSeries,
    /// Series with `1F2` hypergeometric kernel terms.
    OneF2,
    /// Adaptive quadrature of the defining angular integral.
    Angular,
    /// Adaptive quadrature of the spectral (axial-wavenumber) integral.
    Spectral,
    /// Laplace-type integral for purely imaginary wavenumber.
    Evanescent,
    /// Regime-based automatic selection.
    Auto,
}

impl Method {
    /// Stable lowercase name, used by the command-line surface.
    pub fn name(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed-form",
            Method::Hankel => "hankel",
            Method::BesselJY => "bessel-jy",
            Method::LegendreQ => "legendre-q",
            Method::PSeries => "p-series",
            Method::OneF2 => "1f2",
            Method::Angular => "angular",
            Method::Spectral => "spectral",
            Method::Evanescent => "evanescent",
            Method::Auto => "auto",
        }
    }
}

impl core::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "closed-form" => Method::ClosedForm,
            "hankel" => Method::Hankel,
            "bessel-jy" => Method::BesselJY,
            "legendre-q" => Method::LegendreQ,
            "p-series" => Method::PSeries,
            "1f2" => Method::OneF2,
            "angular" => Method::Angular,
            "spectral" => Method::Spectral,
            "evanescent" => Method::Evanescent,
            "auto" => Method::Auto,
            _ => return Err(Error::Domain("unknown method name")),
        })
    }
}

/// A computed coefficient with its split and evaluation metadata.
///
/// `method` is always the concrete route that produced the value;
/// requesting [`Method::Auto`] resolves to one before evaluation.
#[derive(Clone, Copy, Debug)]
pub struct CoeffReport {
    /// Total coefficient and its even/odd wave split.
    pub value: CoeffValue,
    /// The route that produced the value.
    pub method: Method,
    /// Series terms (or integrand panels) that mattered at ten digits.
    pub terms_used: u32,
    /// Absolute error estimate for the total.
    pub est_error: f64,
    /// Whether the truncation criterion was met.
    pub converged: bool,
}

/// Tolerance handed to the quadrature routes, derived from the series
/// policy's relative tolerance: quadrature budgets are absolute, and two
/// orders looser than the series target keeps panel counts moderate while
/// staying far below every acceptance threshold.
fn quadrature_tolerance(policy: &SeriesPolicy) -> f64 {
    (policy.rel_tol * 100.0).clamp(1e-12, 1e-6)
}

/// For a real wavenumber the even split is the real part and the odd
/// split the imaginary part, exactly.
fn real_axis_split(total: Complex64) -> (Complex64, Complex64) {
    (
        Complex64::new(total.re, 0.0),
        Complex64::new(0.0, total.im),
    )
}

fn join_split(method: Method, plus: MethodReport, minus: MethodReport) -> CoeffReport {
    CoeffReport {
        value: CoeffValue {
            total: plus.value + minus.value,
            plus: plus.value,
            minus: minus.value,
        },
        method,
        terms_used: plus.terms_used.max(minus.terms_used),
        est_error: plus.est_error + minus.est_error,
        converged: plus.converged && minus.converged,
    }
}

/// Pick a concrete route from the geometry.
///
/// Static problems and near-ring points go to the toroidal Legendre
/// series (few terms, logarithmic blowup handled by its extended-precision
/// fallback), unless the wavenumber is large enough that its cancellation
/// becomes costly, in which case the angular integral takes over. Away
/// from the ring a real or purely imaginary wavenumber takes the Hankel
/// family (term ratio `k^2`); a fully complex one takes the closed double
/// series while its arguments are moderate, the angular integral beyond.
fn select(d: &Dimensionless) -> Method {
    let g = d.gamma.norm();
    if g == 0.0 {
        return Method::LegendreQ;
    }
    if d.omega < 2.0 {
        if g <= 30.0 {
            Method::LegendreQ
        } else {
            Method::Angular
        }
    } else if d.gamma.re == 0.0 || d.gamma.im == 0.0 {
        Method::Hankel
    } else if d.y.norm() <= 16.0 {
        Method::ClosedForm
    } else {
        Method::Angular
    }
}

/// Evaluate the modal coefficient for `cfg` by the requested route.
///
/// Split-part availability varies by route: the series and closed-form
/// routes produce genuine splits for any admissible wavenumber; the
/// integral routes fill them from the real-axis identity when the
/// wavenumber is real and report NaN splits otherwise (the evanescent
/// split parts are exponentially large cancelling quantities no integral
/// along the decaying contour can see). The `1F2` route evaluates only
/// the odd split and reports NaN for the rest. For a purely imaginary
/// wavenumber far from the ring, split parts of the Bessel-family routes
/// can overflow to infinity while the total stays finite.
///
/// # Errors
///
/// Geometry errors from [`derive`]; [`Error::Unsupported`] or
/// [`Error::Domain`] when the route does not admit the configuration;
/// [`Error::NonConvergence`] when a budget is exhausted.
pub fn compute(cfg: &RingConfig, method: Method, policy: &SeriesPolicy) -> Result<CoeffReport> {
    let d = derive(cfg)?;
    let method = match method {
        Method::Auto => select(&d),
        m => m,
    };
    let qtol = quadrature_tolerance(policy);
    match method {
        Method::ClosedForm => Ok(join_split(
            method,
            lambda_plus_closed(&d, policy)?,
            lambda_minus_closed(&d, policy)?,
        )),
        Method::Hankel => {
            if d.gamma.norm() == 0.0 {
                return Err(Error::Domain(
                    "the Hankel family needs a nonzero wavenumber",
                ));
            }
            let (value, sig, est) = bessel_family_sums(&d, policy)?;
            crate::hyper2d::require_finite(value.total)?;
            Ok(CoeffReport {
                value,
                method,
                terms_used: sig[0],
                est_error: est[0],
                converged: true,
            })
        }
        Method::BesselJY => {
            if d.gamma.norm() == 0.0 {
                return Err(Error::Domain(
                    "the Bessel J/Y split needs a nonzero wavenumber",
                ));
            }
            let (value, sig, est) = bessel_family_sums(&d, policy)?;
            crate::hyper2d::require_finite(value.plus)?;
            crate::hyper2d::require_finite(value.minus)?;
            Ok(CoeffReport {
                value: CoeffValue {
                    total: value.plus + value.minus,
                    ..value
                },
                method,
                terms_used: sig[1].max(sig[2]),
                est_error: est[1] + est[2],
                converged: true,
            })
        }
        Method::LegendreQ => Ok(join_split(
            method,
            eval_legendre_plus_series(&d, policy)?,
            eval_legendre_minus_series(&d, policy)?,
        )),
        Method::PSeries => {
            let (rep, plus, minus) = p_series_sums(&d, policy)?;
            Ok(CoeffReport {
                value: CoeffValue {
                    total: rep.value,
                    plus,
                    minus,
                },
                method,
                terms_used: rep.terms_used,
                est_error: rep.est_error,
                converged: rep.converged,
            })
        }
        Method::OneF2 => {
            let rep = eval_1f2_series(&d, policy)?;
            let nan = Complex64::new(f64::NAN, f64::NAN);
            Ok(CoeffReport {
                value: CoeffValue {
                    total: nan,
                    plus: nan,
                    minus: rep.value,
                },
                method,
                terms_used: rep.terms_used,
                est_error: rep.est_error,
                converged: rep.converged,
            })
        }
        Method::Angular => {
            let rep = quad_angular(cfg, qtol)?;
            Ok(integral_report(method, rep, cfg.beta))
        }
        Method::Spectral => {
            let rep = quad_spectral(cfg, qtol)?;
            Ok(integral_report(method, rep, cfg.beta))
        }
        Method::Evanescent => {
            if cfg.beta.re != 0.0 {
                return Err(Error::Unsupported(
                    "the Laplace integral requires a purely imaginary wavenumber",
                ));
            }
            let rep = quad_evanescent(d.lambda.im, d.omega, d.m, qtol)?;
            let scale = 1.0 / (PI * SQRT_2 * d.sqrt_rr);
            let total = scale * rep.value;
            let (plus, minus) = if cfg.beta.im == 0.0 {
                (total, Complex64::new(0.0, 0.0))
            } else {
                let nan = Complex64::new(f64::NAN, f64::NAN);
                (nan, nan)
            };
            Ok(CoeffReport {
                value: CoeffValue {
                    total,
                    plus,
                    minus,
                },
                method,
                terms_used: rep.terms_used,
                est_error: scale * rep.est_error,
                converged: rep.converged,
            })
        }
        Method::Auto => unreachable!("resolved above"),
    }
}

fn integral_report(method: Method, rep: MethodReport, beta: Complex64) -> CoeffReport {
    let (plus, minus) = if beta.im == 0.0 {
        real_axis_split(rep.value)
    } else {
        let nan = Complex64::new(f64::NAN, f64::NAN);
        (nan, nan)
    };
    CoeffReport {
        value: CoeffValue {
            total: rep.value,
            plus,
            minus,
        },
        method,
        terms_used: rep.terms_used,
        est_error: rep.est_error,
        converged: rep.converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn policy() -> SeriesPolicy {
        SeriesPolicy::default()
    }

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
    fn every_total_route_agrees_on_a_published_row() {
        let c = cfg(0, Complex64::new(2.0, 0.0), 0.5, 0.5);
        let want = Complex64::new(-0.4332208795426503, 0.6063507452728672);
        let routes = [
            Method::ClosedForm,
            Method::Hankel,
            Method::BesselJY,
            Method::LegendreQ,
            Method::PSeries,
            Method::Angular,
            Method::Spectral,
        ];
        for method in routes {
            let rep = compute(&c, method, &policy()).unwrap();
            assert_eq!(rep.method, method);
            assert!(rep.converged);
            assert!(
                (rep.value.total - want).norm() < 1e-9,
                "{}: {:?}",
                method.name(),
                rep.value.total
            );
            let resum = rep.value.plus + rep.value.minus;
            assert!(
                (resum - rep.value.total).norm() <= 1e-12,
                "{}: split does not resum",
                method.name()
            );
            assert!(rep.value.plus.im.abs() < 1e-10, "{}", method.name());
            assert!(rep.value.minus.re.abs() < 1e-10, "{}", method.name());
        }
    }

    #[test]
    fn odd_split_route_matches_the_legendre_odd_part() {
        let c = cfg(0, Complex64::new(2.0, 0.0), 0.5, 1.5);
        let f2 = compute(&c, Method::OneF2, &policy()).unwrap();
        let lq = compute(&c, Method::LegendreQ, &policy()).unwrap();
        assert!(f2.value.total.re.is_nan() && f2.value.plus.re.is_nan());
        assert_relative_eq!(
            f2.value.minus.im,
            lq.value.minus.im,
            max_relative = 1e-10
        );
    }

    #[test]
    fn evanescent_route_total_joins_the_series_total() {
        let c = cfg(1, Complex64::new(0.0, 2.0), 1.0, 0.7);
        let ev = compute(&c, Method::Evanescent, &policy()).unwrap();
        assert_relative_eq!(
            ev.value.total.re,
            0.06150209269884827,
            max_relative = 1e-11
        );
        assert_eq!(ev.value.total.im, 0.0);
        assert!(ev.value.plus.re.is_nan());
        let hk = compute(&c, Method::Hankel, &policy()).unwrap();
        assert_relative_eq!(hk.value.total.re, ev.value.total.re, max_relative = 1e-9);
        assert_relative_eq!(
            hk.value.plus.re,
            -3.299975038396997,
            max_relative = 1e-9
        );
        assert_relative_eq!(
            hk.value.minus.re,
            3.3614771310958457,
            max_relative = 1e-9
        );
    }

    #[test]
    fn automatic_selection_resolves_to_a_concrete_route() {
        let near = cfg(0, Complex64::new(2.0, 0.0), 0.99, 0.01);
        let rep = compute(&near, Method::Auto, &policy()).unwrap();
        assert_eq!(rep.method, Method::LegendreQ);

        let far = cfg(1, Complex64::new(6.0, 0.0), 1.5, 50.0);
        let rep = compute(&far, Method::Auto, &policy()).unwrap();
        assert_eq!(rep.method, Method::Hankel);
        let direct = compute(&far, Method::Hankel, &policy()).unwrap();
        assert_eq!(rep.value.total, direct.value.total);

        let complex = cfg(1, Complex64::new(1.0, 0.5), 0.6, 2.0);
        let rep = compute(&complex, Method::Auto, &policy()).unwrap();
        assert_eq!(rep.method, Method::ClosedForm);
        let lq = compute(&complex, Method::LegendreQ, &policy()).unwrap();
        assert!((rep.value.total - lq.value.total).norm() <= 1e-10 * lq.value.total.norm());
    }

    #[test]
    fn static_problems_use_the_toroidal_route() {
        let c = cfg(2, Complex64::new(0.0, 0.0), 0.8, 0.5);
        let rep = compute(&c, Method::Auto, &policy()).unwrap();
        assert_eq!(rep.method, Method::LegendreQ);
        assert_eq!(rep.value.minus, Complex64::new(0.0, 0.0));
        assert_eq!(rep.value.total.im, 0.0);
        let ang = compute(&c, Method::Angular, &policy()).unwrap();
        assert_relative_eq!(ang.value.total.re, rep.value.total.re, max_relative = 1e-11);
    }

    #[test]
    fn route_domain_errors_pass_through() {
        let bad = RingConfig {
            m: 0,
            beta: Complex64::new(1.0, 0.0),
            r: 0.0,
            z: 1.0,
            ring_r: 1.0,
            ring_z: 0.0,
        };
        assert_eq!(
            compute(&bad, Method::Auto, &policy()).unwrap_err(),
            Error::InvalidRadius
        );
        let c = cfg(0, Complex64::new(1.0, 0.5), 0.5, 1.0);
        assert!(matches!(
            compute(&c, Method::Spectral, &policy()).unwrap_err(),
            Error::Unsupported(_)
        ));
        assert!(matches!(
            compute(&c, Method::Evanescent, &policy()).unwrap_err(),
            Error::Unsupported(_)
        ));
        let st = cfg(0, Complex64::new(0.0, 0.0), 0.5, 1.0);
        assert!(matches!(
            compute(&st, Method::Hankel, &policy()).unwrap_err(),
            Error::Domain(_)
        ));
    }
}
