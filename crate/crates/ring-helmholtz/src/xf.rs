//! Fixed-capacity floating-point expansions.
//!
//! An [`Xf`] represents a real number as an unevaluated sum of `f64`
//! components kept in increasing order of magnitude, mutually nonoverlapping
//! in the Shewchuk sense. Sums and products of expansions are computed with
//! error-free transformations (two-sum, split-based two-product), so results
//! stay exact until the component count would exceed [`XF_CAP`]; then the
//! smallest components are rounded away, leaving roughly `16 * XF_CAP`
//! significant decimal digits.
//!
//! # Commentary
//!
//! The Legendre-form coefficient series cancels catastrophically when the
//! reduced wavelength is short compared to the ring distance: individual
//! terms reach 1e40 while the sum stays of order one. Forty-plus digits of
//! cancellation is far beyond binary64 but comfortably inside a 12-component
//! expansion, and expansions need no heap, no division tables, and no global
//! context, which keeps this module `no_std`.
//!
//! Division and square root are performed by Newton iteration on exact
//! products, doubling correct digits per step from a binary64 seed.
//!
//! # References
//!
//! 1. J. R. Shewchuk, "Adaptive precision floating-point arithmetic and fast
//!    robust geometric predicates", Discrete Comput. Geom. 18 (1997).
//! 2. T. J. Dekker, "A floating-point technique for extending the available
//!    precision", Numer. Math. 18 (1971).

use crate::math;

/// Maximum number of components an [`Xf`] retains.
pub const XF_CAP: usize = 12;

/// Working buffer length for intermediate (uncompressed) expansions.
const WORK: usize = 4 * XF_CAP + 4;

/// Splitting constant 2^27 + 1 for Dekker's exact product.
const SPLITTER: f64 = 134_217_729.0;

/// Exact sum: returns `(s, e)` with `s = fl(a + b)` and `a + b = s + e`.
#[inline(always)]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bv = s - a;
    let av = s - bv;
    (s, (a - av) + (b - bv))
}

/// Exact sum assuming `|a| >= |b|` (or `a == 0`).
#[inline(always)]
fn fast_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

/// Dekker split of `a` into high and low halves with 26/27 significant bits.
#[inline(always)]
fn split(a: f64) -> (f64, f64) {
    let c = SPLITTER * a;
    let hi = c - (c - a);
    (hi, a - hi)
}

/// Exact product: returns `(p, e)` with `p = fl(a * b)` and `a * b = p + e`.
#[inline(always)]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    let err = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    (p, err)
}

/// Extended-precision real number: the exact sum of up to [`XF_CAP`]
/// binary64 components, stored in increasing order of magnitude.
#[derive(Clone, Copy, Debug)]
pub struct Xf {
    n: usize,
    c: [f64; XF_CAP],
}

impl Xf {
    /// The zero expansion.
    pub const ZERO: Xf = Xf {
        n: 0,
        c: [0.0; XF_CAP],
    };

    /// Expansion holding a single binary64 value.
    pub fn from_f64(x: f64) -> Xf {
        let mut e = Xf::ZERO;
        if x != 0.0 {
            e.n = 1;
            e.c[0] = x;
        }
        e
    }

    /// Expansion of a small integer (exact for |k| < 2^53).
    pub fn from_int(k: i64) -> Xf {
        Xf::from_f64(k as f64)
    }

    /// pi to full expansion precision.
    pub fn pi() -> Xf {
        // Binary64 components of pi, largest first; stored reversed so the
        // expansion is in increasing magnitude order.
        const PI_COMPONENTS: [f64; XF_CAP] = [
            3.141592653589793,
            1.2246467991473532e-16,
            -2.9947698097183397e-33,
            1.1124542208633653e-49,
            5.672231979640316e-66,
            1.7449862161352486e-83,
            6.02937273224954e-100,
            1.91012354687999e-116,
            3.0439781653442933e-133,
            -4.714300030947029e-150,
            1.0015491694355389e-166,
            6.210404478415895e-183,
        ];
        let mut e = Xf::ZERO;
        e.n = XF_CAP;
        for (i, &p) in PI_COMPONENTS.iter().enumerate() {
            e.c[XF_CAP - 1 - i] = p;
        }
        e
    }

    /// True when the expansion is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.n == 0
    }

    /// Nearest binary64 value (sums components smallest-first).
    pub fn to_f64(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            s += self.c[i];
        }
        s
    }

    /// Negation (component-wise, exact).
    pub fn neg(&self) -> Xf {
        let mut r = *self;
        for i in 0..r.n {
            r.c[i] = -r.c[i];
        }
        r
    }

    /// Sum of two expansions.
    pub fn add(&self, other: &Xf) -> Xf {
        let mut buf = [0.0f64; WORK];
        let mut n = 0;
        for i in 0..self.n {
            buf[n] = self.c[i];
            n += 1;
        }
        for i in 0..other.n {
            buf[n] = other.c[i];
            n += 1;
        }
        canonicalize(&mut buf, n)
    }

    /// Difference of two expansions.
    pub fn sub(&self, other: &Xf) -> Xf {
        self.add(&other.neg())
    }

    /// Exact product with a single binary64 factor.
    pub fn scale(&self, b: f64) -> Xf {
        if self.n == 0 || b == 0.0 {
            return Xf::ZERO;
        }
        let mut buf = [0.0f64; WORK];
        let n = scale_raw(self, b, &mut buf);
        canonicalize(&mut buf, n)
    }

    /// Product of two expansions.
    pub fn mul(&self, other: &Xf) -> Xf {
        if self.n == 0 || other.n == 0 {
            return Xf::ZERO;
        }
        let mut acc = Xf::ZERO;
        let mut buf = [0.0f64; WORK];
        // Largest components of `other` first, so anything lost to capacity
        // truncation is already far below the running total.
        for j in (0..other.n).rev() {
            let n = scale_raw(self, other.c[j], &mut buf);
            let part = canonicalize(&mut buf, n);
            acc = acc.add(&part);
        }
        acc
    }

    /// Quotient via Newton iteration on the reciprocal.
    pub fn div(&self, den: &Xf) -> Xf {
        self.mul(&den.recip())
    }

    /// Quotient by a binary64 scalar, by iterative refinement: each pass
    /// multiplies back exactly and corrects with the residual. The
    /// correction factor is the rounded scalar reciprocal, so every pass
    /// gains ~53 bits; twelve passes cover the full component capacity.
    /// Still much cheaper than a full expansion reciprocal.
    pub fn div_f64(&self, d: f64) -> Xf {
        let r = 1.0 / d;
        let mut q = self.scale(r);
        for _ in 0..12 {
            let resid = self.sub(&q.scale(d));
            if resid.is_zero() {
                break;
            }
            q = q.add(&resid.scale(r));
        }
        q
    }

    /// Reciprocal via Newton iteration: r <- r(2 - d r).
    pub fn recip(&self) -> Xf {
        let two = Xf::from_f64(2.0);
        let mut r = Xf::from_f64(1.0 / self.to_f64());
        // Digits double per step: 16 -> 32 -> 64 -> 128 -> 256 (capacity-bound).
        for _ in 0..4 {
            let dr = self.mul(&r);
            r = r.mul(&two.sub(&dr));
        }
        r
    }

    /// Square root via Newton iteration on the inverse square root,
    /// with one direct correction step at the end.
    pub fn sqrt(&self) -> Xf {
        if self.n == 0 {
            return Xf::ZERO;
        }
        let head = self.to_f64();
        debug_assert!(head > 0.0, "xf sqrt of non-positive value");
        let mut y = Xf::from_f64(1.0 / math::sqrt(head));
        let three = Xf::from_f64(3.0);
        // y <- y (3 - a y^2) / 2
        for _ in 0..4 {
            let ay2 = self.mul(&y).mul(&y);
            y = y.mul(&three.sub(&ay2)).scale(0.5);
        }
        let s = self.mul(&y);
        // One Newton step on s itself: s <- s + (a - s^2) * y / 2.
        let corr = self.sub(&s.mul(&s)).mul(&y).scale(0.5);
        s.add(&corr)
    }

    /// Integer power by repeated squaring (n >= 0).
    pub fn powi(&self, n: u32) -> Xf {
        let mut acc = Xf::from_f64(1.0);
        let mut base = *self;
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    /// Sign of the represented value: -1, 0, or 1.
    pub fn signum(&self) -> i32 {
        if self.n == 0 {
            0
        } else if self.c[self.n - 1] > 0.0 {
            1
        } else {
            -1
        }
    }
}

/// Raw scale-expansion (Shewchuk): writes up to `2 n` components into `buf`,
/// returning the count. Output is ordered but may contain zeros.
fn scale_raw(e: &Xf, b: f64, buf: &mut [f64; WORK]) -> usize {
    let mut n = 0;
    let (mut q, h) = two_prod(e.c[0], b);
    buf[n] = h;
    n += 1;
    for i in 1..e.n {
        let (ti, t_err) = two_prod(e.c[i], b);
        let (q2, h1) = two_sum(q, t_err);
        buf[n] = h1;
        n += 1;
        let (q3, h2) = fast_two_sum(ti, q2);
        buf[n] = h2;
        n += 1;
        q = q3;
    }
    buf[n] = q;
    n + 1
}

/// Sort components by magnitude, distill into a nonoverlapping expansion,
/// drop zeros, and truncate to capacity keeping the largest components.
fn canonicalize(buf: &mut [f64; WORK], n: usize) -> Xf {
    // Insertion sort by increasing magnitude (n is small).
    for i in 1..n {
        let v = buf[i];
        let mut j = i;
        while j > 0 && buf[j - 1].abs() > v.abs() {
            buf[j] = buf[j - 1];
            j -= 1;
        }
        buf[j] = v;
    }
    // Distillation: grow a fresh expansion with each component in turn.
    // Two-sum chains are exact regardless of input overlap; processing in
    // increasing magnitude keeps the output ordered and nonoverlapping.
    let mut out = [0.0f64; WORK];
    let mut m = 0;
    for i in 0..n {
        let mut q = buf[i];
        if q == 0.0 {
            continue;
        }
        for slot in out.iter_mut().take(m) {
            let (s, e) = two_sum(q, *slot);
            *slot = e;
            q = s;
        }
        out[m] = q;
        m += 1;
    }
    // Gather nonzero components (still increasing, nonoverlapping).
    let mut g = [0.0f64; WORK];
    let mut k = 0;
    for i in 0..m {
        if out[i] != 0.0 {
            g[k] = out[i];
            k += 1;
        }
    }
    if k == 0 {
        return Xf::ZERO;
    }
    // Compression (two fast-two-sum sweeps): distilled components can carry
    // only a few significant bits each, wasting capacity slots; compression
    // repacks them so every retained component is as full as possible.
    let mut comp = [0.0f64; WORK];
    let mut bot = k;
    let mut q = g[k - 1];
    for i in (0..k - 1).rev() {
        let (s, e) = fast_two_sum(q, g[i]);
        if e != 0.0 {
            bot -= 1;
            comp[bot] = s;
            q = e;
        } else {
            q = s;
        }
    }
    bot -= 1;
    comp[bot] = q;
    let mut h = [0.0f64; WORK];
    let mut top = 0;
    let mut q2 = comp[bot];
    for i in bot + 1..k {
        let (s, e) = fast_two_sum(comp[i], q2);
        if e != 0.0 {
            h[top] = e;
            top += 1;
        }
        q2 = s;
    }
    if q2 != 0.0 || top == 0 {
        h[top] = q2;
        top += 1;
    }
    // Truncate to capacity, keeping the largest components.
    let keep = top.min(XF_CAP);
    let start = top - keep;
    let mut packed = Xf::ZERO;
    packed.c[..keep].copy_from_slice(&h[start..top]);
    packed.n = keep;
    if keep == 1 && packed.c[0] == 0.0 {
        packed.n = 0;
    }
    packed
}

/// Complex number with expansion-valued parts.
#[derive(Clone, Copy, Debug)]
pub struct Cxf {
    pub re: Xf,
    pub im: Xf,
}

impl Cxf {
    /// The complex zero.
    pub const ZERO: Cxf = Cxf {
        re: Xf::ZERO,
        im: Xf::ZERO,
    };

    /// From binary64 parts.
    pub fn new(re: f64, im: f64) -> Cxf {
        Cxf {
            re: Xf::from_f64(re),
            im: Xf::from_f64(im),
        }
    }

    /// Complex sum.
    pub fn add(&self, o: &Cxf) -> Cxf {
        Cxf {
            re: self.re.add(&o.re),
            im: self.im.add(&o.im),
        }
    }

    /// Complex product.
    pub fn mul(&self, o: &Cxf) -> Cxf {
        Cxf {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    /// Product with a real expansion.
    pub fn mul_xf(&self, s: &Xf) -> Cxf {
        Cxf {
            re: self.re.mul(s),
            im: self.im.mul(s),
        }
    }

    /// Product with a binary64 scalar.
    pub fn scale(&self, s: f64) -> Cxf {
        Cxf {
            re: self.re.scale(s),
            im: self.im.scale(s),
        }
    }

    /// Division by a real expansion.
    pub fn div_xf(&self, s: &Xf) -> Cxf {
        let r = s.recip();
        self.mul_xf(&r)
    }

    /// Magnitude of the nearest complex binary64 value.
    pub fn abs_f64(&self) -> f64 {
        math::hypot(self.re.to_f64(), self.im.to_f64())
    }
}

/// Complete elliptic integrals K(m) and E(m) by the arithmetic-geometric
/// mean, in expansion arithmetic.
///
/// # Arguments
///
/// * `m` - elliptic parameter (squared modulus), 0 < m < 1.
/// * `one_minus_m` - the complement 1 - m, supplied separately so callers
///   can provide it exactly when m is close to 1 (the near-ring regime).
///
/// # Commentary
///
/// AGM iteration with c_0 = sqrt(m): K = pi / (2 a_N) and
/// E = K (1 - sum 2^(n-1) c_n^2). Convergence is quadratic; the component
/// cap, not the iteration count, limits the final accuracy.
pub fn agm_k_e(m: &Xf, one_minus_m: &Xf) -> (Xf, Xf) {
    let mut a = Xf::from_f64(1.0);
    let mut b = one_minus_m.sqrt();
    let mut c = m.sqrt();
    let mut csum = c.mul(&c).scale(0.5);
    let mut pw = 0.5_f64; // 2^(n-1)
    for _ in 1..64 {
        let an = a.add(&b).scale(0.5);
        let bn = a.mul(&b).sqrt();
        let cn = a.sub(&b).scale(0.5);
        a = an;
        b = bn;
        c = cn;
        pw *= 2.0;
        csum = csum.add(&c.mul(&c).scale(pw));
        if c.to_f64().abs() < 1e-99 * a.to_f64() {
            break;
        }
    }
    let k = Xf::pi().div(&a.scale(2.0));
    let e = k.mul(&Xf::from_f64(1.0).sub(&csum));
    (k, e)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Reference K and E values (AGM cross-checked against an independent
    /// multiprecision evaluation, 22 digits).
    const K_E_TABLE: [(f64, f64, f64); 4] = [
        (0.05, 1.591003453790792180109, 1.550973351780472327719),
        (0.30, 1.713889448178791062039, 1.445363064412665262012),
        (0.70, 2.075363135292469143853, 1.241670567945822750872),
        (0.95, 2.908337248444552100095, 1.060473727766278242715),
    ];

    #[test]
    fn exact_addition_of_separated_magnitudes() {
        let a = Xf::from_f64(1.0);
        let b = Xf::from_f64(1e-30);
        let s = a.add(&b);
        // Difference recovers the tiny part exactly.
        let d = s.sub(&a);
        assert_eq!(d.to_f64(), 1e-30);
    }

    #[test]
    fn multiplication_is_error_free_within_capacity() {
        // (1 + 2^-40)^2 = 1 + 2^-39 + 2^-80 exactly.
        let x = Xf::from_f64(1.0).add(&Xf::from_f64(2f64.powi(-40)));
        let sq = x.mul(&x);
        let expect = Xf::from_f64(1.0)
            .add(&Xf::from_f64(2f64.powi(-39)))
            .add(&Xf::from_f64(2f64.powi(-80)));
        assert_eq!(sq.sub(&expect).to_f64(), 0.0);
    }

    #[test]
    fn reciprocal_and_sqrt_reach_expansion_precision() {
        let three = Xf::from_f64(3.0);
        let r = three.recip();
        let resid = three.mul(&r).sub(&Xf::from_f64(1.0));
        assert!(resid.to_f64().abs() < 1e-180, "recip residual {:e}", resid.to_f64());

        let s = Xf::from_f64(2.0).sqrt();
        let resid = s.mul(&s).sub(&Xf::from_f64(2.0));
        assert!(resid.to_f64().abs() < 1e-180, "sqrt residual {:e}", resid.to_f64());
    }

    #[test]
    fn scalar_division_reaches_expansion_precision() {
        let x = Xf::pi();
        let q = x.div_f64(7.0);
        let resid = q.scale(7.0).sub(&x);
        assert!(
            resid.to_f64().abs() < 1e-190,
            "div_f64 residual {:e}",
            resid.to_f64()
        );
    }

    #[test]
    fn pi_expansion_matches_components() {
        let p = Xf::pi();
        assert_eq!(p.to_f64(), core::f64::consts::PI);
        // Head component removed, the remainder must match the classic tail.
        let tail = p.sub(&Xf::from_f64(core::f64::consts::PI));
        assert_eq!(tail.to_f64(), 1.2246467991473532e-16);
    }

    #[test]
    fn agm_elliptic_integrals_match_reference() {
        for &(m, k_ref, e_ref) in &K_E_TABLE {
            let mx = Xf::from_f64(m);
            let cmx = Xf::from_f64(1.0 - m); // m exact in binary64 here
            let (k, e) = agm_k_e(&mx, &cmx);
            assert!(
                (k.to_f64() - k_ref).abs() < 1e-15 * k_ref,
                "K({m}) = {}",
                k.to_f64()
            );
            assert!(
                (e.to_f64() - e_ref).abs() < 1e-15 * e_ref,
                "E({m}) = {}",
                e.to_f64()
            );
        }
    }

    #[test]
    fn legendre_relation_holds_to_expansion_precision() {
        // E(m) K(1-m) + E(1-m) K(m) - K(m) K(1-m) = pi/2, a precision
        // self-test exercising every AGM path at once.
        // The complement must be exact (fl(0.3) + fl(0.7) != 1), so form it
        // in expansion arithmetic.
        let m = Xf::from_f64(0.3);
        let cm = Xf::from_f64(1.0).sub(&m);
        let (km, em) = agm_k_e(&m, &cm);
        let (kc, ec) = agm_k_e(&cm, &m);
        let lhs = em.mul(&kc).add(&ec.mul(&km)).sub(&km.mul(&kc));
        let rhs = Xf::pi().scale(0.5);
        let rel = lhs.sub(&rhs).to_f64().abs() / rhs.to_f64();
        assert!(rel < 1e-150, "legendre relation residual {rel:e}");
    }

    #[test]
    fn capacity_truncation_keeps_leading_components() {
        // Sum sixteen scales of pi spanning 16*53 bits; the result must
        // agree with the exact head even though capacity was exceeded.
        let mut acc = Xf::ZERO;
        for j in 0..16 {
            acc = acc.add(&Xf::pi().scale(2f64.powi(-60 * j)));
        }
        assert_eq!(acc.to_f64(), core::f64::consts::PI);
    }

    #[test]
    fn complex_product_matches_f64_for_moderate_values() {
        let a = Cxf::new(1.5, -2.25);
        let b = Cxf::new(-0.5, 3.0);
        let p = a.mul(&b);
        assert_eq!(p.re.to_f64(), 1.5 * -0.5 - -2.25 * 3.0);
        assert_eq!(p.im.to_f64(), 1.5 * 3.0 + -2.25 * -0.5);
    }
}
