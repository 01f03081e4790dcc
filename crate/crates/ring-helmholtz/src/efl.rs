//! Extended-exponent floating point.
//!
//! An [`Efl`] is a binary64 significand paired with a separate power-of-two
//! exponent, giving the ordinary 53-bit precision but an exponent range of
//! roughly `2^(+-2e9)`. The Bessel-function ladders need this: an upward
//! Weber recurrence at order 240 can pass through magnitudes near `1e254`
//! while the matching downward Miller recurrence passes through `1e-258`,
//! yet the physically meaningful products and ratios of the two are of
//! order one. Keeping the exponent out of band makes both ladders exact
//! where binary64 alone would overflow or flush to zero.

use crate::math;

/// A binary64 significand with an out-of-band power-of-two exponent:
/// the value is `m * 2^e` with `0.5 <= |m| < 1` (or exactly zero).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Efl {
    m: f64,
    e: i32,
}

impl Efl {
    /// The zero value.
    pub const ZERO: Efl = Efl { m: 0.0, e: 0 };

    /// Build from a significand and exponent, normalizing.
    pub fn new(m: f64, e: i32) -> Efl {
        if m == 0.0 {
            return Efl::ZERO;
        }
        let (frac, k) = math::frexp(m);
        Efl { m: frac, e: e + k }
    }

    /// Lift a binary64 value.
    pub fn from_f64(x: f64) -> Efl {
        Efl::new(x, 0)
    }

    /// `e^x` without the binary64 range limit. The power-of-two part is
    /// peeled off with a split ln 2 so the residual exponent stays accurate
    /// even for `|x|` in the hundreds of thousands.
    pub fn exp(x: f64) -> Efl {
        // ln 2 split into a 32-bit-exact head and a tail (Cody-Waite).
        const LN2_HI: f64 = 6.931_471_803_691_238_164_9e-1;
        const LN2_LO: f64 = 1.908_214_929_270_587_700_02e-10;
        let k = math::floor(x / core::f64::consts::LN_2 + 0.5);
        let r = (x - k * LN2_HI) - k * LN2_LO;
        Efl::new(math::exp(r), k as i32)
    }

    /// Nearest binary64 value; saturates to `+-inf` / `0` outside range.
    pub fn to_f64(&self) -> f64 {
        if self.m == 0.0 {
            return 0.0;
        }
        if self.e > 1100 {
            return if self.m > 0.0 {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            };
        }
        if self.e < -1140 {
            return 0.0;
        }
        math::ldexp(self.m, self.e)
    }

    /// True when the value is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.m == 0.0
    }

    /// Product.
    pub fn mul(&self, o: &Efl) -> Efl {
        Efl::new(self.m * o.m, self.e + o.e)
    }

    /// Product with a binary64 factor.
    pub fn scale(&self, s: f64) -> Efl {
        Efl::new(self.m * s, self.e)
    }

    /// Sum. When the addends differ by more than 60 binary orders the
    /// smaller cannot affect the 53-bit significand and is dropped.
    pub fn add(&self, o: &Efl) -> Efl {
        if self.m == 0.0 {
            return *o;
        }
        if o.m == 0.0 {
            return *self;
        }
        let (big, small) = if self.e >= o.e { (self, o) } else { (o, self) };
        let d = big.e - small.e;
        if d > 60 {
            return *big;
        }
        Efl::new(big.m + math::ldexp(small.m, -d), big.e)
    }

    /// Difference.
    pub fn sub(&self, o: &Efl) -> Efl {
        self.add(&o.neg())
    }

    /// Negation.
    pub fn neg(&self) -> Efl {
        Efl {
            m: -self.m,
            e: self.e,
        }
    }

    /// Quotient as an `Efl`.
    pub fn div(&self, o: &Efl) -> Efl {
        Efl::new(self.m / o.m, self.e - o.e)
    }

    /// Quotient collapsed to binary64; exact exponent cancellation, so this
    /// is finite whenever the true ratio is within binary64 range even if
    /// neither operand is.
    pub fn ratio(&self, o: &Efl) -> f64 {
        if self.m == 0.0 {
            return 0.0;
        }
        let d = self.e - o.e;
        if d > 1100 {
            return if self.m / o.m > 0.0 {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            };
        }
        if d < -1140 {
            return 0.0;
        }
        math::ldexp(self.m / o.m, d)
    }

    /// Natural log of the absolute value.
    pub fn ln_abs(&self) -> f64 {
        debug_assert!(self.m != 0.0);
        math::ln(self.m.abs()) + self.e as f64 * core::f64::consts::LN_2
    }

    /// Magnitude comparison `|self| > |o|`.
    pub fn abs_gt(&self, o: &Efl) -> bool {
        if self.m == 0.0 {
            return false;
        }
        if o.m == 0.0 {
            return true;
        }
        if self.e != o.e {
            return self.e > o.e;
        }
        self.m.abs() > o.m.abs()
    }
}
