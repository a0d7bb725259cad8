//! Gauge, ε-grid, generalized-number nets, valuation, and sharp comparisons.
//!
//! A generalized number is represented by its net ε ↦ x_ε evaluated on a
//! finite decreasing grid of ε values.  All asymptotic classifications
//! (negligible / moderate / non-moderate) are *finite-evidence* verdicts at a
//! declared horizon: negligibility means `|x_ε| ≤ ρ_ε^q` holds at every tail
//! grid point for every q up to `q_max`, which (since ρ < 1) is equivalent to
//! the single check at `q_max`.

use crate::xc::{log2_add, Xc};
use num_complex::Complex64;
use serde::Serialize;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

/// One grid point: ε together with the gauge value ρ(ε) and its exact log2.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GridPoint {
    pub idx: usize,
    pub eps: f64,
    pub rho: f64,
    /// Exact `log2 ρ(ε)` (e.g. `-k` for the default grid ε_k = 2^{-k}).
    pub log2_rho: f64,
}

/// The gauge: grid, and classification horizons.
#[derive(Clone, Debug)]
pub struct Gauge {
    pub grid: Vec<GridPoint>,
    /// Negligibility horizon: class `negligible` certifies `|x| ≤ ρ^q` for
    /// all q ≤ q_max at every tail grid point.
    pub q_max: u32,
    /// Moderateness cutoff.
    pub big_q_max: u32,
}

impl Default for Gauge {
    fn default() -> Self {
        Gauge::dyadic(4, 40, 10, 20)
    }
}

impl Gauge {
    /// Dyadic grid ε_k = 2^{-k}, ρ = ε, k = k_min..=k_max.
    pub fn dyadic(k_min: u32, k_max: u32, q_max: u32, big_q_max: u32) -> Gauge {
        let grid = (k_min..=k_max)
            .enumerate()
            .map(|(idx, k)| GridPoint {
                idx,
                eps: (-(k as f64)).exp2(),
                rho: (-(k as f64)).exp2(),
                log2_rho: -(k as f64),
            })
            .collect();
        Gauge {
            grid,
            q_max,
            big_q_max,
        }
    }

    /// Dyadic grid with ρ(ε) = ε^p.
    pub fn dyadic_pow(k_min: u32, k_max: u32, p: f64, q_max: u32, big_q_max: u32) -> Gauge {
        let mut g = Gauge::dyadic(k_min, k_max, q_max, big_q_max);
        for pt in &mut g.grid {
            pt.log2_rho = pt.eps.log2() * p;
            pt.rho = pt.log2_rho.exp2();
        }
        g
    }

    /// The asymptotic tail: last ⌈m/2⌉ grid points (the early points are
    /// pre-asymptotic and only used for slope context).
    pub fn tail(&self) -> &[GridPoint] {
        let m = self.grid.len();
        &self.grid[m - m.div_ceil(2)..]
    }
}

type NetFn = Arc<dyn Fn(&GridPoint) -> Xc + Send + Sync>;
type BoundFn = Arc<dyn Fn(&GridPoint) -> f64 + Send + Sync>;

/// A generalized complex number: a lazily-evaluated, memoized net over the
/// grid, with an optional certified upper bound on `log2 |x_ε|`.
///
/// The bound channel carries analytic knowledge (e.g. closed-form tail
/// bounds) that the floating-point value itself cannot: a value that
/// evaluates to exactly `0.0` because the true magnitude is `2^{-5000}` still
/// classifies honestly through its bound.
#[derive(Clone)]
pub struct GenComplex {
    net: NetFn,
    bound_log2: Option<BoundFn>,
    cache: Arc<Mutex<HashMap<usize, Xc>>>,
    pub label: String,
}

impl std::fmt::Debug for GenComplex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GenComplex({})", self.label)
    }
}

impl GenComplex {
    pub fn from_fn(label: impl Into<String>, f: impl Fn(&GridPoint) -> Xc + Send + Sync + 'static) -> Self {
        GenComplex {
            net: Arc::new(f),
            bound_log2: None,
            cache: Arc::new(Mutex::new(HashMap::new())),
            label: label.into(),
        }
    }

    /// Attach a certified upper bound on `log2 |x_ε|`.
    pub fn with_bound(mut self, b: impl Fn(&GridPoint) -> f64 + Send + Sync + 'static) -> Self {
        self.bound_log2 = Some(Arc::new(b));
        self
    }

    pub fn constant(label: impl Into<String>, z: Complex64) -> Self {
        GenComplex::from_fn(label, move |_| Xc::from_c64(z))
    }

    pub fn zero() -> Self {
        GenComplex::constant("0", Complex64::new(0.0, 0.0))
    }

    /// The gauge itself as a generalized number: net ε ↦ ρ(ε).
    pub fn drho() -> Self {
        GenComplex::from_fn("drho", |p| Xc::two_pow(p.log2_rho))
    }

    /// `dρ^q` for a real exponent q (negative exponents give infinite numbers).
    pub fn drho_pow(q: f64) -> Self {
        GenComplex::from_fn(format!("drho^{q}"), move |p| Xc::two_pow(q * p.log2_rho))
    }

    pub fn eval(&self, p: &GridPoint) -> Xc {
        if let Some(v) = self.cache.lock().unwrap().get(&p.idx) {
            return *v;
        }
        let v = (self.net)(p);
        self.cache.lock().unwrap().insert(p.idx, v);
        v
    }

    /// Certified (or measured) upper bound on `log2 |x_ε|` at a grid point.
    pub fn mag_bound_log2(&self, p: &GridPoint) -> f64 {
        match &self.bound_log2 {
            Some(b) => b(p),
            None => self.eval(p).abs_log2(),
        }
    }

    /// Magnitude evidence used by classification: the certified bound when
    /// present (it may be *smaller* than the naive evaluation when the value
    /// is known analytically to cancel below float resolution), else the
    /// measured value.
    pub fn mag_log2(&self, p: &GridPoint) -> f64 {
        self.mag_bound_log2(p)
    }

    // ---- ring operations -------------------------------------------------

    pub fn add(&self, other: &GenComplex) -> GenComplex {
        let (a, b) = (self.clone(), other.clone());
        let mut out = GenComplex::from_fn(format!("({} + {})", self.label, other.label), move |p| {
            a.eval(p).add(&b.eval(p))
        });
        if self.bound_log2.is_some() || other.bound_log2.is_some() {
            let (a, b) = (self.clone(), other.clone());
            out = out.with_bound(move |p| log2_add(a.mag_bound_log2(p), b.mag_bound_log2(p)));
        }
        out
    }

    pub fn sub(&self, other: &GenComplex) -> GenComplex {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> GenComplex {
        let a = self.clone();
        let mut out =
            GenComplex::from_fn(format!("-({})", self.label), move |p| a.eval(p).neg());
        if self.bound_log2.is_some() {
            let a = self.clone();
            out = out.with_bound(move |p| a.mag_bound_log2(p));
        }
        out
    }

    pub fn mul(&self, other: &GenComplex) -> GenComplex {
        let (a, b) = (self.clone(), other.clone());
        let mut out = GenComplex::from_fn(format!("({})*({})", self.label, other.label), move |p| {
            a.eval(p).mul(&b.eval(p))
        });
        if self.bound_log2.is_some() || other.bound_log2.is_some() {
            let (a, b) = (self.clone(), other.clone());
            out = out.with_bound(move |p| a.mag_bound_log2(p) + b.mag_bound_log2(p));
        }
        out
    }

    /// Multiplicative inverse.  Fails unless `|x_ε| ≥ ρ_ε^Q` at every tail
    /// grid point for some `Q ≤ big_q_max` (the ring-theoretic "|x| > 0").
    pub fn inv(&self, g: &Gauge) -> Result<GenComplex, GaugeError> {
        let mut offending = Vec::new();
        for p in g.tail() {
            let mag = self.eval(p).abs_log2();
            // need mag ≥ Q · log2ρ for some Q ≤ big_q_max, i.e.
            // mag ≥ big_q_max · log2ρ (log2ρ < 0).
            if !(mag >= g.big_q_max as f64 * p.log2_rho) {
                offending.push(p.idx);
            }
        }
        if !offending.is_empty() {
            return Err(GaugeError::NotInvertible { offending });
        }
        let a = self.clone();
        Ok(GenComplex::from_fn(format!("inv({})", self.label), move |p| {
            Xc::ONE.div(&a.eval(p))
        }))
    }

    pub fn re(&self) -> GenComplex {
        let a = self.clone();
        GenComplex::from_fn(format!("Re({})", self.label), move |p| a.eval(p).re())
    }

    pub fn im(&self) -> GenComplex {
        let a = self.clone();
        GenComplex::from_fn(format!("Im({})", self.label), move |p| a.eval(p).im())
    }

    /// Ring equality: the difference is classified negligible.
    pub fn equals(&self, other: &GenComplex, g: &Gauge) -> bool {
        matches!(valuation(&self.sub(other), g).class, NetClass::Negligible)
    }

    /// Relative agreement at every tail point.  Ring equality (negligible
    /// difference) is unattainable for order-one values computed through
    /// different float routes, which disagree in the last ulp; this is the
    /// appropriate check for cross-validating independent computations.
    pub fn approx_equals(&self, other: &GenComplex, rel_tol: f64, g: &Gauge) -> bool {
        g.tail()
            .iter()
            .all(|p| self.eval(p).rel_dist(&other.eval(p)) <= rel_tol)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GaugeError {
    #[error("not invertible: |x| falls below rho^Q_max at tail grid indices {offending:?}")]
    NotInvertible { offending: Vec<usize> },
    #[error("not comparable: {0}")]
    NotComparable(String),
}

/// Per-grid-point classification (subpoint diagnostic).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PointClass {
    Negligible,
    Moderate,
    NonModerate,
    Unusable,
}

/// Asymptotic class of a net at the declared horizon.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum NetClass {
    Negligible,
    Moderate(u32),
    NonModerate,
    Indeterminate,
}

/// Valuation report: estimated exponent v̂ with `|x_ε| ≈ ρ_ε^v̂`, fit quality,
/// class at the (q_max, Q_max) horizon, and per-point subpoint flags.
#[derive(Clone, Debug, Serialize)]
pub struct ValuationReport {
    /// Least-squares slope of log|x_ε| against log ρ_ε over the grid tail.
    /// `+inf` when the net is identically zero on the tail.
    pub slope: f64,
    pub fit_residual: f64,
    pub class: NetClass,
    pub subpoint_flags: Vec<PointClass>,
    /// Evidence horizon the verdict is relative to.
    pub q_max: u32,
    pub big_q_max: u32,
    pub diagnostic: Option<String>,
}

/// Estimate the asymptotic valuation of a net and classify it.
pub fn valuation(x: &GenComplex, g: &Gauge) -> ValuationReport {
    let flags: Vec<PointClass> = g
        .grid
        .iter()
        .map(|p| {
            let m = x.mag_log2(p);
            if m.is_nan() {
                PointClass::Unusable
            } else if m <= g.q_max as f64 * p.log2_rho {
                PointClass::Negligible
            } else if m <= -(g.big_q_max as f64) * p.log2_rho {
                PointClass::Moderate
            } else {
                PointClass::NonModerate
            }
        })
        .collect();

    let tail = g.tail();
    let usable: Vec<(f64, f64)> = tail
        .iter()
        .filter_map(|p| {
            let m = x.mag_log2(p);
            if m.is_nan() || m == f64::NEG_INFINITY {
                None
            } else {
                Some((p.log2_rho, m))
            }
        })
        .collect();

    let nan_count = tail.iter().filter(|p| x.mag_log2(p).is_nan()).count();
    let zero_count = tail
        .iter()
        .filter(|p| x.mag_log2(p) == f64::NEG_INFINITY)
        .count();

    if nan_count > 0 {
        return ValuationReport {
            slope: f64::NAN,
            fit_residual: f64::NAN,
            class: NetClass::NonModerate,
            subpoint_flags: flags,
            q_max: g.q_max,
            big_q_max: g.big_q_max,
            diagnostic: Some(format!("{nan_count} tail grid points overflowed or were NaN")),
        };
    }

    // Slope fit over usable tail points.
    let (slope, fit_residual) = if usable.len() < 2 {
        (if zero_count == tail.len() { f64::INFINITY } else { f64::NAN }, 0.0)
    } else {
        least_squares_slope(&usable)
    };

    if usable.len() + zero_count < 4 {
        if zero_count >= 4 {
            // identically zero tail: negligible with infinite slope
        } else {
            return ValuationReport {
                slope,
                fit_residual,
                class: NetClass::Indeterminate,
                subpoint_flags: flags,
                q_max: g.q_max,
                big_q_max: g.big_q_max,
                diagnostic: Some("fewer than 4 usable grid points".into()),
            };
        }
    }

    // Classification: negligible needs every tail point below rho^q_max;
    // moderate(Q) is the smallest Q with every tail point above -Q.
    let negligible = tail
        .iter()
        .all(|p| x.mag_log2(p) <= g.q_max as f64 * p.log2_rho);
    let class = if negligible {
        NetClass::Negligible
    } else {
        let mut q_needed = 0u32;
        let mut ok = true;
        for p in tail {
            let m = x.mag_log2(p);
            // smallest Q with m ≤ -Q log2ρ  (log2ρ < 0)
            let q = (m / -p.log2_rho).ceil().max(0.0);
            if q > g.big_q_max as f64 {
                ok = false;
                break;
            }
            q_needed = q_needed.max(q as u32);
        }
        if ok {
            NetClass::Moderate(q_needed)
        } else {
            NetClass::NonModerate
        }
    };

    ValuationReport {
        slope,
        fit_residual,
        class,
        subpoint_flags: flags,
        q_max: g.q_max,
        big_q_max: g.big_q_max,
        diagnostic: None,
    }
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom == 0.0 {
        return (f64::NAN, f64::NAN);
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    // dimensionless residual: rms misfit per unit |log2 rho|
    let rms = (pts
        .iter()
        .map(|p| {
            let r = p.1 - (slope * p.0 + intercept);
            r * r
        })
        .sum::<f64>()
        / n)
        .sqrt();
    let scale = pts.iter().map(|p| p.0.abs()).fold(0.0, f64::max).max(1.0);
    (slope, rms / scale)
}

/// Sharp-topology comparison verdict at a given exponent q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CompareVerdict {
    Less,
    Greater,
    EqualUpToQ,
    Mixed,
}

/// Compare two real-valued nets in the sharp order at exponent `q`:
/// `Less` iff `x_ε + ρ_ε^q ≤ y_ε` at every tail grid point, symmetrically
/// for `Greater`; `EqualUpToQ` iff `|x_ε − y_ε| ≤ ρ_ε^q` throughout; `Mixed`
/// when the sign of the gap disagrees between grid subsets (subpoint
/// diagnostic, grid evidence only).
pub fn sharp_compare(
    x: &GenComplex,
    y: &GenComplex,
    q: u32,
    g: &Gauge,
) -> Result<CompareVerdict, GaugeError> {
    for (z, name) in [(x, "x"), (y, "y")] {
        let v = valuation(z, g);
        if matches!(v.class, NetClass::NonModerate | NetClass::Indeterminate) {
            return Err(GaugeError::NotComparable(format!(
                "{name} ({}) is {:?}",
                z.label, v.class
            )));
        }
        let im = valuation(&z.im(), g);
        if !matches!(im.class, NetClass::Negligible) {
            return Err(GaugeError::NotComparable(format!(
                "{name} ({}) has non-negligible imaginary part",
                z.label
            )));
        }
    }
    let tail = g.tail();
    let mut all_less = true;
    let mut all_greater = true;
    let mut all_equal = true;
    let mut sign_pos = false;
    let mut sign_neg = false;
    for p in tail {
        let gap = y.eval(p).re().sub(&x.eval(p).re());
        let gap_log2 = gap.abs_log2();
        let thresh = q as f64 * p.log2_rho;
        let within = gap_log2 <= thresh;
        if !within {
            all_equal = false;
            if gap.m.re > 0.0 {
                sign_pos = true;
            } else {
                sign_neg = true;
            }
        }
        // less requires x + rho^q <= y, i.e. gap >= rho^q, at every point
        if !(gap.m.re > 0.0 && gap_log2 >= thresh) {
            all_less = false;
        }
        if !(gap.m.re < 0.0 && gap_log2 >= thresh) {
            all_greater = false;
        }
    }
    if all_equal {
        return Ok(CompareVerdict::EqualUpToQ);
    }
    if sign_pos && sign_neg {
        return Ok(CompareVerdict::Mixed);
    }
    if all_less {
        return Ok(CompareVerdict::Less);
    }
    if all_greater {
        return Ok(CompareVerdict::Greater);
    }
    // Consistent sign but not uniformly beyond the threshold: report the
    // dominated verdict as equality at this q would be wrong and the order
    // is not certified — treat as Mixed evidence.
    Ok(CompareVerdict::Mixed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g() -> Gauge {
        Gauge::default()
    }

    #[test]
    fn valuation_gauge_power() {
        // x_ε = ρ³: slope 3, moderate(0)
        let x = GenComplex::drho_pow(3.0);
        let r = valuation(&x, &g());
        assert!((r.slope - 3.0).abs() < 1e-9, "slope {}", r.slope);
        assert_eq!(r.class, NetClass::Moderate(0));
    }

    #[test]
    fn valuation_zero_net() {
        let r = valuation(&GenComplex::zero(), &g());
        assert_eq!(r.class, NetClass::Negligible);
        assert_eq!(r.slope, f64::INFINITY);
    }

    #[test]
    fn valuation_super_gauge_negligible() {
        // x_ε = ρ^{1/ε}: beats every fixed power on the tail
        let x = GenComplex::from_fn("rho^(1/eps)", |p| Xc::two_pow(p.log2_rho / p.eps));
        let r = valuation(&x, &g());
        assert_eq!(r.class, NetClass::Negligible);
    }

    #[test]
    fn valuation_infinite_number() {
        let x = GenComplex::drho_pow(-2.0);
        let r = valuation(&x, &g());
        assert_eq!(r.class, NetClass::Moderate(2));
        assert!((r.slope + 2.0).abs() < 1e-9);
    }

    #[test]
    fn valuation_non_moderate() {
        let x = GenComplex::from_fn("2^(1/eps)", |p| Xc::two_pow(1.0 / p.eps));
        assert_eq!(valuation(&x, &g()).class, NetClass::NonModerate);
    }

    #[test]
    fn slope_additivity_on_products() {
        let x = GenComplex::drho_pow(2.0);
        let y = GenComplex::drho_pow(5.0);
        let xy = x.mul(&y);
        let (rx, ry, rxy) = (valuation(&x, &g()), valuation(&y, &g()), valuation(&xy, &g()));
        assert!((rxy.slope - rx.slope - ry.slope).abs() < 1e-7);
    }

    #[test]
    fn sharp_compare_basics() {
        let gauge = g();
        let drho = GenComplex::drho();
        let one = GenComplex::constant("1", Complex64::new(1.0, 0.0));
        assert_eq!(
            sharp_compare(&drho, &one, 1, &gauge).unwrap(),
            CompareVerdict::Less
        );
        assert_eq!(
            sharp_compare(&one, &one, 10, &gauge).unwrap(),
            CompareVerdict::EqualUpToQ
        );
        // alternating net: mixed subpoints
        let alt = GenComplex::from_fn("alt", |p| Xc::from_f64(if p.idx % 2 == 0 { 1.0 } else { -1.0 }));
        let zero = GenComplex::zero();
        assert_eq!(
            sharp_compare(&alt, &zero, 3, &gauge).unwrap(),
            CompareVerdict::Mixed
        );
    }

    #[test]
    fn inv_rejects_super_gauge_decay() {
        let gauge = g();
        let x = GenComplex::from_fn("rho^(1/eps)", |p| Xc::two_pow(p.log2_rho / p.eps));
        assert!(x.inv(&gauge).is_err());
        let y = GenComplex::from_fn("1-drho", |p| Xc::from_f64(1.0 - p.rho));
        let inv = y.inv(&gauge).unwrap();
        let p = &gauge.grid[5];
        assert!((inv.eval(p).to_c64().re - 1.0 / (1.0 - p.rho)).abs() < 1e-14);
    }

    #[test]
    fn mul_drho_by_inverse_is_one() {
        let gauge = g();
        let prod = GenComplex::drho().mul(&GenComplex::drho_pow(-1.0));
        let one = GenComplex::constant("1", Complex64::new(1.0, 0.0));
        assert!(prod.equals(&one, &gauge));
    }

    #[test]
    fn determinism_of_memoized_eval() {
        let x = GenComplex::from_fn("f", |p| Xc::from_f64(p.eps.sin()));
        let p = &g().grid[3];
        let a = x.eval(p);
        let b = x.eval(p);
        assert_eq!(a.m, b.m);
        assert_eq!(a.e, b.e);
    }

    #[test]
    fn bound_channel_drives_negligibility() {
        // value evaluates to literal zero, but a certified bound of
        // rho^{12} still classifies negligible (q_max = 10).
        let x = GenComplex::from_fn("tiny", |_| Xc::ZERO).with_bound(|p| 12.0 * p.log2_rho);
        assert_eq!(valuation(&x, &g()).class, NetClass::Negligible);
        // bound at rho^{2} only: not negligible at horizon 10
        let y = GenComplex::from_fn("estimate-zero", |_| Xc::ZERO).with_bound(|p| 2.0 * p.log2_rho);
        assert_eq!(valuation(&y, &g()).class, NetClass::Moderate(0));
    }
}
