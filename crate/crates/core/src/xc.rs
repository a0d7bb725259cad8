//! Scaled complex numbers `m · 2^e`.
//!
//! Net values in this engine range over magnitudes like `ρ_ε^{-nQ-R}` or
//! `2^{N_ε}` with `N_ε` hypernatural — far beyond the exponent range of any
//! hardware float.  `Xc` keeps a `Complex64` mantissa (for ~1e-16 relative
//! accuracy) and a separate binary exponent stored as `f64` (so exponents up
//! to ~1e308 are representable).  Zero is `m = 0, e = -inf`.

use num_complex::Complex64;
use serde::Serialize;

/// A complex number `m * 2^e` with `|m| ∈ [1, 2)` (or `m = 0`).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Xc {
    /// Mantissa, normalized so that `max(|re|, |im|) ∈ [1, 2)` unless zero.
    pub m: Complex64,
    /// Binary exponent; `-inf` for zero, may be non-integral.
    pub e: f64,
}

fn exp2i(k: f64) -> f64 {
    // 2^k for integral k within f64 range; used only with |k| small enough
    // that the result is a normal number.
    k.exp2()
}

impl Xc {
    pub const ZERO: Xc = Xc {
        m: Complex64::new(0.0, 0.0),
        e: f64::NEG_INFINITY,
    };

    pub const ONE: Xc = Xc {
        m: Complex64::new(1.0, 0.0),
        e: 0.0,
    };

    /// Normalize an (m, e) pair.  `m`'s components must be finite.
    pub fn new(m: Complex64, e: f64) -> Xc {
        let a = m.re.abs().max(m.im.abs());
        if a == 0.0 {
            return Xc::ZERO;
        }
        if !a.is_finite() || !e.is_finite() {
            if e == f64::NEG_INFINITY {
                return Xc::ZERO;
            }
            return Xc {
                m: Complex64::new(f64::NAN, f64::NAN),
                e: f64::NAN,
            };
        }
        let k = a.log2().floor();
        // subnormal or near-overflow mantissas need the scale factor split
        // in two so that neither half overflows f64
        let m = if k.abs() > 900.0 {
            let k1 = (k / 2.0).floor();
            (m * exp2i(-k1)) * exp2i(-(k - k1))
        } else {
            m * exp2i(-k)
        };
        Xc { m, e: e + k }
    }

    pub fn from_c64(z: Complex64) -> Xc {
        Xc::new(z, 0.0)
    }

    pub fn from_f64(x: f64) -> Xc {
        Xc::new(Complex64::new(x, 0.0), 0.0)
    }

    /// Positive real number `2^log2`.
    pub fn two_pow(log2: f64) -> Xc {
        if log2 == f64::NEG_INFINITY {
            return Xc::ZERO;
        }
        Xc {
            m: Complex64::new(1.0, 0.0),
            e: log2,
        }
    }

    /// Real number `sign · 2^log2`.
    pub fn signed_two_pow(sign: f64, log2: f64) -> Xc {
        if sign == 0.0 || log2 == f64::NEG_INFINITY {
            return Xc::ZERO;
        }
        Xc {
            m: Complex64::new(sign.signum(), 0.0),
            e: log2,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.m.re == 0.0 && self.m.im == 0.0
    }

    pub fn is_nan(&self) -> bool {
        self.m.re.is_nan() || self.m.im.is_nan() || self.e.is_nan()
    }

    /// `log2 |self|`; `-inf` for zero.
    pub fn abs_log2(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        self.m.norm().log2() + self.e
    }

    /// Collapse to a `Complex64`; overflows to ±inf, underflows to 0.
    pub fn to_c64(&self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        if self.e > 1023.0 {
            return self.m * f64::INFINITY;
        }
        if self.e < -1070.0 {
            return Complex64::new(0.0, 0.0);
        }
        self.m * exp2i(self.e)
    }

    pub fn re(&self) -> Xc {
        Xc::new(Complex64::new(self.m.re, 0.0), self.e)
    }

    pub fn im(&self) -> Xc {
        Xc::new(Complex64::new(self.m.im, 0.0), self.e)
    }

    pub fn conj(&self) -> Xc {
        Xc {
            m: self.m.conj(),
            e: self.e,
        }
    }

    pub fn neg(&self) -> Xc {
        Xc {
            m: -self.m,
            e: self.e,
        }
    }

    pub fn abs(&self) -> Xc {
        if self.is_zero() {
            return Xc::ZERO;
        }
        Xc::new(Complex64::new(self.m.norm(), 0.0), self.e)
    }

    pub fn add(&self, other: &Xc) -> Xc {
        if self.is_zero() {
            return *other;
        }
        if other.is_zero() {
            return *self;
        }
        let (big, small) = if self.e >= other.e {
            (self, other)
        } else {
            (other, self)
        };
        let d = small.e - big.e;
        if d < -120.0 {
            return *big;
        }
        Xc::new(big.m + small.m * exp2i(d), big.e)
    }

    pub fn sub(&self, other: &Xc) -> Xc {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Xc) -> Xc {
        if self.is_zero() || other.is_zero() {
            return Xc::ZERO;
        }
        Xc::new(self.m * other.m, self.e + other.e)
    }

    pub fn mul_f64(&self, s: f64) -> Xc {
        if s == 0.0 || self.is_zero() {
            return Xc::ZERO;
        }
        Xc::new(self.m * s, self.e)
    }

    pub fn div(&self, other: &Xc) -> Xc {
        if self.is_zero() {
            return Xc::ZERO;
        }
        Xc::new(self.m / other.m, self.e - other.e)
    }

    /// Integer power with possibly huge exponent `n ≥ 0` (integral f64).
    /// Uses exact exponent arithmetic: `(m·2^e)^n = m^n · 2^{ne}` with
    /// `m^n` computed in log/arg space to avoid mantissa overflow.
    pub fn pow_nat(&self, n: f64) -> Xc {
        assert!(n >= 0.0 && n.fract() == 0.0, "pow_nat needs a natural exponent");
        if n == 0.0 {
            return Xc::ONE;
        }
        if self.is_zero() {
            return Xc::ZERO;
        }
        let log2m = self.m.norm().log2();
        let arg = self.m.arg();
        // arg·n mod 2π; for huge n this loses angular accuracy, which only
        // matters for non-real mantissas at hyperfinite exponents (not used
        // on that path — those go through real/log-space closed forms).
        let theta = (arg * n) % (2.0 * std::f64::consts::PI);
        let mant = Complex64::from_polar(1.0, theta);
        Xc::new(mant, 0.0)
            .mul(&Xc::two_pow(log2m * n))
            .mul(&Xc::two_pow(self.e * n))
    }

    /// Relative distance `|a-b| / max(|a|, |b|)`; 0 when both are zero.
    pub fn rel_dist(&self, other: &Xc) -> f64 {
        if self.is_zero() && other.is_zero() {
            return 0.0;
        }
        let d = self.sub(other).abs_log2();
        let s = self.abs_log2().max(other.abs_log2());
        (d - s).exp2()
    }
}

/// log2(2^a + 2^b), saturating sensibly at infinities.
pub fn log2_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (1.0 + (lo - hi).exp2()).log2()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_and_roundtrip() {
        let x = Xc::from_c64(Complex64::new(3.0, -4.0));
        assert!((x.to_c64() - Complex64::new(3.0, -4.0)).norm() < 1e-15);
        assert!((x.abs_log2() - 5f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn huge_exponents_survive() {
        let x = Xc::two_pow(1e9);
        let y = Xc::two_pow(-5e8);
        let p = x.mul(&y);
        assert!((p.abs_log2() - 5e8).abs() < 1.0);
        let q = p.div(&Xc::two_pow(5e8));
        assert!((q.abs_log2()).abs() < 1e-9);
    }

    #[test]
    fn add_alignment() {
        let a = Xc::from_f64(1.0);
        let tiny = Xc::two_pow(-200.0);
        let s = a.add(&tiny);
        assert!((s.abs_log2() - 0.0).abs() < 1e-12);
        let b = Xc::from_f64(1.5).add(&Xc::from_f64(2.5));
        assert!((b.to_c64().re - 4.0).abs() < 1e-15);
    }

    #[test]
    fn pow_nat_matches_direct() {
        let x = Xc::from_f64(0.5);
        let p = x.pow_nat(10.0);
        assert!((p.to_c64().re - 0.5f64.powi(10)).abs() < 1e-18);
        // hyperfinite exponent: 0.5^(2^60) has log2 = -2^60
        let h = x.pow_nat(2f64.powi(60));
        assert!((h.abs_log2() + 2f64.powi(60)).abs() < 1.0);
    }

    #[test]
    fn log2_add_basic() {
        assert!((log2_add(3.0, 3.0) - 4.0).abs() < 1e-12);
        assert_eq!(log2_add(f64::NEG_INFINITY, 2.0), 2.0);
    }
}
