//! Physical inputs and the dimensionless parameter set.
//!
//! Every evaluation route works from the same handful of dimensionless
//! combinations of the ring geometry and the wavenumber. [`derive`] computes
//! them once, with attention to the near-ring regime where the naive
//! formulas cancel: the distance parameter `omega` tends to 1 as the field
//! point approaches the ring, so its excess `omega - 1` is computed from a
//! subtraction-free formula and carried separately.

use crate::math;
use crate::{Error, Result};
use num_complex::Complex64;

/// Physical description of one modal coefficient evaluation: mode index,
/// wavenumber, field point, and ring position, in a shared length unit.
///
/// The ring is the circle `{(ring_r cos t, ring_r sin t, ring_z)}`; the
/// field point sits at cylindrical radius `r` and height `z` (its azimuth is
/// irrelevant, the coefficient is azimuthally invariant).
#[derive(Clone, Copy, Debug)]
pub struct RingConfig {
    /// Azimuthal mode index `m >= 0`.
    pub m: u32,
    /// Wavenumber; `Im(beta) >= 0`. Purely imaginary values describe the
    /// evanescent (diffusive) regime, zero the static limit.
    pub beta: Complex64,
    /// Field-point cylindrical radius, `> 0`.
    pub r: f64,
    /// Field-point height.
    pub z: f64,
    /// Ring radius, `> 0`.
    pub ring_r: f64,
    /// Ring height.
    pub ring_z: f64,
}

/// The dimensionless parameter set shared by all evaluation routes.
///
/// Redundant combinations are precomputed because different routes are
/// natural in different variables; the mutual identities (`omega =
/// (2 - x)/x`, `gamma = sqrt(2) lambda / k`, `2 chi = x y`) hold to
/// rounding.
#[derive(Clone, Copy, Debug)]
pub struct Dimensionless {
    /// Mode index.
    pub m: u32,
    /// `alpha = m + 1/2`, the recurring series parameter.
    pub alpha: f64,
    /// Squared elliptic-type modulus `k^2 = 4 r R / ((r+R)^2 + (z-Z)^2)`,
    /// in `(0, 1)`.
    pub k2: f64,
    /// Alias of `k2` in its role as the first hypergeometric argument.
    pub x: f64,
    /// Toroidal distance variable
    /// `omega = (r^2 + R^2 + (z-Z)^2) / (2 r R)`, `> 1` off the ring.
    pub omega: f64,
    /// `omega - 1`, computed subtraction-free as
    /// `((r-R)^2 + (z-Z)^2) / (2 r R)`; exact even within `1e-14` of the
    /// ring where `omega` itself has no digits left.
    pub omega_m1: f64,
    /// `gamma = beta * Delta` with `Delta^2 = (r+R)^2 + (z-Z)^2`: the
    /// wavenumber scaled by the far ring distance.
    pub gamma: Complex64,
    /// `lambda = beta * sqrt(2 r R)`.
    pub lambda: Complex64,
    /// `chi = lambda^2 / 4`.
    pub chi: Complex64,
    /// `y = gamma^2 / 4`, the second hypergeometric argument.
    pub y: Complex64,
    /// `sqrt(r R)`, the prefactor scale of every coefficient formula.
    pub sqrt_rr: f64,
    /// The wavenumber itself, passed through for the integral routes.
    pub beta: Complex64,
}

/// Threshold on `omega - 1` at or below which the field point is treated as
/// lying on the ring, where every representation is singular. Because the
/// excess `omega - 1` is assembled subtraction-free from the squared
/// separations, any nonzero separation carries full relative precision (the
/// coefficient grows only logarithmically as the ring is approached), so
/// only exact coincidence is rejected.
pub const ON_RING_EPS: f64 = 0.0;

/// Derive the dimensionless parameter set from physical inputs.
///
/// # Arguments
///
/// * `cfg` - geometry and wavenumber; see [`RingConfig`] invariants.
///
/// # Errors
///
/// * [`Error::NonFinite`] for NaN or infinite inputs.
/// * [`Error::InvalidRadius`] when either radius is not strictly positive.
/// * [`Error::BetaLowerHalfPlane`] when `Im(beta) < 0` (the outgoing kernel
///   would grow at infinity).
/// * [`Error::OnRing`] when the field point coincides with the ring.
pub fn derive(cfg: &RingConfig) -> Result<Dimensionless> {
    let RingConfig {
        m,
        beta,
        r,
        z,
        ring_r,
        ring_z,
    } = *cfg;
    if !(r.is_finite() && z.is_finite() && ring_r.is_finite() && ring_z.is_finite())
        || !beta.re.is_finite()
        || !beta.im.is_finite()
    {
        return Err(Error::NonFinite);
    }
    if r <= 0.0 || ring_r <= 0.0 {
        return Err(Error::InvalidRadius);
    }
    if beta.im < 0.0 {
        return Err(Error::BetaLowerHalfPlane);
    }
    let dz = z - ring_z;
    let two_rr = 2.0 * r * ring_r;
    let omega_m1 = ((r - ring_r) * (r - ring_r) + dz * dz) / two_rr;
    if !(omega_m1 > ON_RING_EPS) {
        return Err(Error::OnRing);
    }
    if !omega_m1.is_finite() {
        return Err(Error::NonFinite);
    }
    let delta2 = (r + ring_r) * (r + ring_r) + dz * dz;
    let k2 = 2.0 * two_rr / delta2;
    let gamma = beta * math::sqrt(delta2);
    let lambda = beta * math::sqrt(two_rr);
    let chi = lambda * lambda * 0.25;
    let y = gamma * gamma * 0.25;
    Ok(Dimensionless {
        m,
        alpha: m as f64 + 0.5,
        k2,
        x: k2,
        omega: 1.0 + omega_m1,
        omega_m1,
        gamma,
        lambda,
        chi,
        y,
        sqrt_rr: math::sqrt(r * ring_r),
        beta,
    })
}

impl Dimensionless {
    /// `omega^2 - 1` without cancellation: `(omega-1) * (omega+1)` using the
    /// exact excess.
    pub fn omega2_m1(&self) -> f64 {
        self.omega_m1 * (self.omega_m1 + 2.0)
    }

    /// Elliptic parameter `2 / (omega + 1)` used by the toroidal seeds.
    pub fn elliptic_m(&self) -> f64 {
        2.0 / (self.omega_m1 + 2.0)
    }

    /// Complement `1 - elliptic_m`, again subtraction-free.
    pub fn elliptic_m_complement(&self) -> f64 {
        self.omega_m1 / (self.omega_m1 + 2.0)
    }
}
