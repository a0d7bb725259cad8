//! Hypernatural numbers: nets of naturals obtained by nearest-integer
//! rounding, with checked exponentiation.
//!
//! Net values are stored as integer-valued `f64`: exact for all indices the
//! engine ever materializes (ladder indices are powers of two, exactly
//! representable far beyond 2^53).

use crate::gauge::{valuation, Gauge, GenComplex, GridPoint, NetClass};
use crate::xc::Xc;
use std::sync::Arc;

/// Round to the nearest integer, ties toward +∞ (`rpi(x) = ⌊x + 1/2⌋`).
/// Requires `x ≥ −1/2` so the result is a natural.
pub fn rpi(x: f64) -> f64 {
    assert!(x >= -0.5, "rpi needs x >= -1/2, got {x}");
    (x + 0.5).floor()
}

/// Round to the nearest integer, ties toward −∞ (`rni(x) = ⌈x − 1/2⌉`).
pub fn rni(x: f64) -> f64 {
    assert!(x >= -0.5, "rni needs x >= -1/2, got {x}");
    (x - 0.5).ceil()
}

/// An ε-indexed net of natural numbers.
#[derive(Clone)]
pub struct HyperNatural {
    net: Arc<dyn Fn(&GridPoint) -> f64 + Send + Sync>,
    pub label: String,
}

impl std::fmt::Debug for HyperNatural {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "HyperNatural({})", self.label)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum HyperNatError {
    #[error("ni: input is not within rho^1 of a natural at grid point idx {idx} (eps={eps:.3e}, value {value})")]
    NotNearInteger { idx: usize, eps: f64, value: f64 },
    #[error("ni: input has non-negligible imaginary part")]
    NotReal,
    #[error("ni: input is not moderate")]
    NotModerate,
    #[error("checked_pow: m^n leaves the hypernaturals (non-moderate growth, slope {slope})")]
    PowLeavesRing { slope: f64 },
}

impl HyperNatural {
    pub fn from_fn(
        label: impl Into<String>,
        f: impl Fn(&GridPoint) -> f64 + Send + Sync + 'static,
    ) -> Self {
        HyperNatural {
            net: Arc::new(f),
            label: label.into(),
        }
    }

    pub fn constant(n: u64) -> Self {
        HyperNatural::from_fn(format!("{n}"), move |_| n as f64)
    }

    /// `rpi(ρ_ε^{-q})` — the standard gauge-power index.
    pub fn rho_inv_pow(q: f64) -> Self {
        HyperNatural::from_fn(format!("rpi(rho^-{q})"), move |p| rpi((-q * p.log2_rho).exp2()))
    }

    pub fn at(&self, p: &GridPoint) -> f64 {
        (self.net)(p)
    }

    /// Embed into the ring as a GenComplex.
    pub fn embed(&self) -> GenComplex {
        let net = self.net.clone();
        GenComplex::from_fn(format!("embed({})", self.label), move |p| {
            Xc::from_f64(net(p))
        })
    }

    /// Pointwise maximum — the directedness upper bound in (ρÑ, ≤).
    pub fn max(&self, other: &HyperNatural) -> HyperNatural {
        let (a, b) = (self.net.clone(), other.net.clone());
        HyperNatural::from_fn(format!("max({},{})", self.label, other.label), move |p| {
            a(p).max(b(p))
        })
    }

    pub fn add(&self, other: &HyperNatural) -> HyperNatural {
        let (a, b) = (self.net.clone(), other.net.clone());
        HyperNatural::from_fn(format!("({}+{})", self.label, other.label), move |p| {
            a(p) + b(p)
        })
    }
}

/// The nearest-integer function ρC̃ → ρÑ.  Requires the input to be real,
/// moderate, and within `ρ_ε^1` of a natural at every tail grid point.
pub fn ni(x: &GenComplex, g: &Gauge) -> Result<HyperNatural, HyperNatError> {
    let v = valuation(x, g);
    if matches!(v.class, NetClass::NonModerate | NetClass::Indeterminate) {
        return Err(HyperNatError::NotModerate);
    }
    if !matches!(valuation(&x.im(), g).class, NetClass::Negligible) {
        return Err(HyperNatError::NotReal);
    }
    for p in g.tail() {
        let val = x.eval(p).re().to_c64().re;
        // beyond 2^53 every f64 is an integer; the near-integer check is
        // only meaningful within exact-integer range
        if val.abs() < 2f64.powi(53) {
            let n = rpi(val.max(-0.49));
            if (val - n).abs() > p.rho {
                return Err(HyperNatError::NotNearInteger {
                    idx: p.idx,
                    eps: p.eps,
                    value: val,
                });
            }
        }
    }
    let x = x.clone();
    Ok(HyperNatural::from_fn(format!("ni({})", x.label), move |p| {
        rpi(x.eval(p).re().to_c64().re.max(-0.49))
    }))
}

/// `m^n` as a generalized number, with a moderateness check: errors when the
/// growth leaves the ring (Rem.: hypernatural powers can grow faster than any
/// gauge power).
pub fn checked_pow(
    m: &HyperNatural,
    n: &HyperNatural,
    g: &Gauge,
) -> Result<GenComplex, HyperNatError> {
    let (mn, nn) = (m.clone(), n.clone());
    let pow = GenComplex::from_fn(format!("{}^{}", m.label, n.label), move |p| {
        let base = mn.at(p);
        let expo = nn.at(p);
        if expo == 0.0 {
            return Xc::ONE;
        }
        if base == 0.0 {
            return Xc::ZERO;
        }
        Xc::two_pow(expo * base.log2())
    });
    let v = valuation(&pow, g);
    match v.class {
        NetClass::NonModerate | NetClass::Indeterminate => {
            Err(HyperNatError::PowLeavesRing { slope: v.slope })
        }
        _ => Ok(pow),
    }
}
