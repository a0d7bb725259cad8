//! Hyper-power series: the coefficient ring with weak moderateness
//! certificates, radius of convergence, set-of-convergence membership,
//! eventual boundedness of summands, disk expansions, and the built-in
//! example families.
//!
//! A coefficient family carries a value channel (n, ε) → a_{nε}, an optional
//! certified log2 magnitude bound for indices beyond the value channel's
//! exact range, and optional closed-form channels (full sum, derivative sum,
//! exact partial sum, tail bound) used to resolve hyperfinite partial sums
//! where direct summation is impossible.  Certificates are honest: when a
//! property cannot be certified from the available channels, the verdict is
//! "not certified", never a fabricated pass.

use crate::gauge::{
    sharp_compare, valuation, CompareVerdict, Gauge, GaugeError, GenComplex, GridPoint, NetClass,
};
use crate::hypernat::rpi;
use crate::hyperseq::LimitStatus;
use crate::hyperseries::{sum_hyperseries, SeriesError, SeriesSequence, DEFAULT_BUDGET};
use crate::mollifier::Mollifier;
use crate::xc::Xc;
use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

/// Absolute + relative slack for log2-space inequality checks (float
/// rounding must not flip a true boundary case).
const LOG2_SLACK: f64 = 1e-6;

/// Largest n (per point) used in the numeric limsup window.
const RADIUS_N_BUDGET: f64 = 4096.0;

#[derive(Debug, thiserror::Error)]
pub enum HpsError {
    #[error("no weak moderateness certificate found with Q,R ≤ {0} (factorial-type growth)")]
    NoCertificate(u32),
    #[error("operation requires a weak moderateness certificate")]
    MissingCert,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Gauge(#[from] GaugeError),
}

/// Coefficient family a_{nε} for a hyper-power series.
#[derive(Clone)]
pub struct HpsCoefficients {
    coeff: Arc<dyn Fn(f64, &GridPoint) -> Xc + Send + Sync>,
    /// Certified log2 upper bound on |a_{nε}|, usable at any n (in
    /// particular beyond `exact_coeff_max_n`).
    log2_bound: Option<Arc<dyn Fn(f64, &GridPoint) -> f64 + Send + Sync>>,
    /// Indices below this have exact values from `coeff`; beyond it the
    /// value channel may return NaN and the bound channel is used instead.
    exact_coeff_max_n: f64,
    /// Declared (Q, R) with |a_{nε}| ≤ ρ_ε^{-nQ-R} for all n at small ε.
    declared_cert: Option<(u32, u32)>,
    /// Exact log2 of limsup_n |a_{nε}|^{1/n} when known in closed form
    /// (−inf encodes an infinite radius).
    exact_limsup_log2: Option<Arc<dyn Fn(&GridPoint) -> f64 + Send + Sync>>,
    /// w ↦ Σ_n a_n w^n (full classical sum).
    closed_sum: Option<Arc<dyn Fn(&Xc, &GridPoint) -> Xc + Send + Sync>>,
    /// w ↦ Σ_n n·a_n w^{n−1} (termwise-differentiated classical sum).
    closed_deriv: Option<Arc<dyn Fn(&Xc, &GridPoint) -> Xc + Send + Sync>>,
    /// (N, w) ↦ Σ_{n≤N} a_n w^n exactly.
    closed_partial: Option<Arc<dyn Fn(f64, &Xc, &GridPoint) -> Xc + Send + Sync>>,
    /// (N, w) ↦ certified log2 bound on |Σ_{n>N} a_n w^n|.
    log2_tail: Option<Arc<dyn Fn(f64, &Xc, &GridPoint) -> f64 + Send + Sync>>,
    pub label: String,
    radius_cache: Arc<Mutex<Option<Vec<(usize, f64)>>>>,
}

impl HpsCoefficients {
    pub fn from_fn(
        label: impl Into<String>,
        coeff: impl Fn(f64, &GridPoint) -> Xc + Send + Sync + 'static,
    ) -> Self {
        HpsCoefficients {
            coeff: Arc::new(coeff),
            log2_bound: None,
            exact_coeff_max_n: f64::INFINITY,
            declared_cert: None,
            exact_limsup_log2: None,
            closed_sum: None,
            closed_deriv: None,
            closed_partial: None,
            log2_tail: None,
            label: label.into(),
            radius_cache: Arc::new(Mutex::new(None)),
        }
    }

    pub fn with_log2_bound(
        mut self,
        b: impl Fn(f64, &GridPoint) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.log2_bound = Some(Arc::new(b));
        self
    }

    pub fn with_exact_range(mut self, n_max: f64) -> Self {
        self.exact_coeff_max_n = n_max;
        self
    }

    pub fn with_declared_cert(mut self, q: u32, r: u32) -> Self {
        self.declared_cert = Some((q, r));
        self
    }

    pub fn with_exact_limsup(
        mut self,
        f: impl Fn(&GridPoint) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.exact_limsup_log2 = Some(Arc::new(f));
        self
    }

    pub fn with_closed_sum(
        mut self,
        f: impl Fn(&Xc, &GridPoint) -> Xc + Send + Sync + 'static,
    ) -> Self {
        self.closed_sum = Some(Arc::new(f));
        self
    }

    pub fn with_closed_deriv(
        mut self,
        f: impl Fn(&Xc, &GridPoint) -> Xc + Send + Sync + 'static,
    ) -> Self {
        self.closed_deriv = Some(Arc::new(f));
        self
    }

    pub fn with_closed_partial(
        mut self,
        f: impl Fn(f64, &Xc, &GridPoint) -> Xc + Send + Sync + 'static,
    ) -> Self {
        self.closed_partial = Some(Arc::new(f));
        self
    }

    pub fn with_log2_tail(
        mut self,
        f: impl Fn(f64, &Xc, &GridPoint) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.log2_tail = Some(Arc::new(f));
        self
    }

    pub fn coeff(&self, n: f64, p: &GridPoint) -> Xc {
        (self.coeff)(n, p)
    }

    /// log2 |a_{nε}|: the value channel inside its exact range, the
    /// certified bound beyond it.
    pub fn log2_mag(&self, n: f64, p: &GridPoint) -> f64 {
        if n < self.exact_coeff_max_n {
            let v = self.coeff(n, p);
            if !v.is_nan() {
                return v.abs_log2();
            }
        }
        match &self.log2_bound {
            Some(b) => b(n, p),
            None => self.coeff(n, p).abs_log2(),
        }
    }

    /// The effective certificate: declared when present, else measured.
    pub fn cert(&self, g: &Gauge) -> Option<(u32, u32)> {
        self.declared_cert.or_else(|| check_weak_moderate(self, g).ok())
    }
}

/// log2 n! — exact accumulation for small n, Stirling beyond (relative
/// error below 1e-14, irrelevant against the log2-slack used in checks).
pub(crate) fn log2_factorial(n: f64) -> f64 {
    if n < 2.0 {
        return 0.0;
    }
    if n <= 256.0 {
        let mut s = 0.0;
        let mut k = 2.0;
        while k <= n {
            s += k.log2();
            k += 1.0;
        }
        return s;
    }
    let log2_e = std::f64::consts::LOG2_E;
    n * (n.log2() - log2_e) + 0.5 * (2.0 * std::f64::consts::PI * n).log2() + log2_e / (12.0 * n)
}

/// Index sample for certificate checks: every small n, then a geometric
/// sweep through the representable range, then the gauge rungs.
fn cert_sample_ns(p: &GridPoint, q_max: u32) -> Vec<f64> {
    let mut v: Vec<f64> = (0..=64).map(|n| n as f64).collect();
    let mut n = 128.0;
    while n <= 2f64.powi(52) {
        v.push(n);
        n *= 4.0;
    }
    for j in 1..=q_max {
        v.push(rpi((-(j as f64) * p.log2_rho).exp2()));
    }
    v
}

/// Smallest sampled (Q, R), lexicographic in Q then R, with
/// |a_{nε}| ≤ ρ_ε^{-nQ-R} at every tail point for every sampled n.  Each
/// candidate Q is additionally probed at the huge standard indices
/// n = 2^{(Q+1)k}, 2^{(Q+2)k} where super-geometric growth (n!, n^n) must
/// betray itself even though it passes every representable-range sample.
pub fn check_weak_moderate(a: &HpsCoefficients, g: &Gauge) -> Result<(u32, u32), HpsError> {
    let tail = g.tail();
    let base: Vec<(usize, Vec<(f64, f64)>)> = tail
        .iter()
        .map(|p| {
            let ns = cert_sample_ns(p, g.q_max);
            (p.idx, ns.iter().map(|&n| (n, a.log2_mag(n, p))).collect())
        })
        .collect();
    let passes = |lm: f64, rhs: f64| lm <= rhs + LOG2_SLACK + 1e-9 * rhs.abs();
    for q in 0..=g.big_q_max {
        'r: for r in 0..=g.big_q_max {
            for (pi, p) in tail.iter().enumerate() {
                let k = -p.log2_rho;
                for (n, lm) in &base[pi].1 {
                    // NaN magnitude = no evidence at this index (beyond the
                    // family's exact range): the certificate is scoped to
                    // the resolved indices
                    if lm.is_nan() {
                        continue;
                    }
                    if !passes(*lm, (n * q as f64 + r as f64) * k) {
                        continue 'r;
                    }
                }
                for extra in [
                    q as f64 + 1.0,
                    q as f64 + 2.0,
                    r as f64 + 1.0,
                    (q + r) as f64 + 2.0,
                ] {
                    let n = (extra * k).exp2();
                    if !n.is_finite() {
                        continue;
                    }
                    let lm = a.log2_mag(n, p);
                    if lm.is_nan() {
                        continue;
                    }
                    if !passes(lm, (n * q as f64 + r as f64) * k) {
                        continue 'r;
                    }
                }
            }
            return Ok((q, r));
        }
    }
    Err(HpsError::NoCertificate(g.big_q_max))
}

/// Strong ρ-equivalence of two coefficient families, sampled: for every
/// (q, r) up to the horizon, |a_n − ā_n| ≤ ρ^{nq+r} at every tail point
/// for every sampled index inside both exact value ranges.
pub fn check_strong_equiv(a: &HpsCoefficients, b: &HpsCoefficients, g: &Gauge) -> bool {
    let n_cap = a.exact_coeff_max_n.min(b.exact_coeff_max_n);
    for p in g.tail() {
        let ns: Vec<f64> = cert_sample_ns(p, g.q_max)
            .into_iter()
            .filter(|n| *n < n_cap)
            .collect();
        for &n in &ns {
            let d = a.coeff(n, p).sub(&b.coeff(n, p)).abs_log2();
            for q in 0..=g.q_max {
                for r in 0..=g.q_max {
                    if d > (n * q as f64 + r as f64) * p.log2_rho + LOG2_SLACK {
                        return false;
                    }
                }
            }
        }
    }
    true
}

#[derive(Debug)]
pub enum RadiusClass {
    Finite(GenComplex),
    Infinite,
    MixedSubpoints,
    NonModerate,
}

#[derive(Debug)]
pub struct RadiusReport {
    /// (grid index, log2 r_ε) over the tail; +inf per point encodes r_ε = ∞.
    pub r_log2: Vec<(usize, f64)>,
    pub class: RadiusClass,
    /// The (n_min, n_max) window used by the numeric limsup estimate.
    pub limsup_cutoff: (f64, f64),
    pub diagnostic: Option<String>,
}

/// Per-point log2 of limsup_n |a_{nε}|^{1/n}: registered closed form when
/// available, else the max of log2|a_n|/n over the top half of the window
/// [n_min, n_max(ε)] (a sliding-tail max, so oscillating coefficient
/// families are not underestimated by an early peak).
fn limsup_log2(a: &HpsCoefficients, p: &GridPoint) -> f64 {
    if let Some(f) = &a.exact_limsup_log2 {
        return f(p);
    }
    let n_max = rpi((-p.log2_rho).exp2()).min(RADIUS_N_BUDGET);
    let mut best = f64::NEG_INFINITY;
    let mut n = (n_max / 2.0).floor().max(8.0);
    while n <= n_max {
        best = best.max(a.log2_mag(n, p) / n);
        n += 1.0;
    }
    best
}

/// Radius of convergence report: r_ε = (limsup_n |a_{nε}|^{1/n})^{-1}
/// estimated per tail point and classified as a net.
pub fn radius(a: &HpsCoefficients, g: &Gauge) -> Result<RadiusReport, HpsError> {
    a.cert(g).ok_or(HpsError::MissingCert)?;
    let r_log2: Vec<(usize, f64)> = {
        let mut cache = a.radius_cache.lock().unwrap();
        match &*cache {
            Some(v) => v.clone(),
            None => {
                let v: Vec<(usize, f64)> =
                    g.tail().iter().map(|p| (p.idx, -limsup_log2(a, p))).collect();
                *cache = Some(v.clone());
                v
            }
        }
    };
    let inf_count = r_log2.iter().filter(|x| x.1 == f64::INFINITY).count();
    let class = if inf_count == r_log2.len() {
        RadiusClass::Infinite
    } else if inf_count > 0 {
        RadiusClass::MixedSubpoints
    } else {
        let table: HashMap<usize, f64> = r_log2.iter().cloned().collect();
        let net = GenComplex::from_fn(format!("rad {}", a.label), move |p| {
            Xc::two_pow(*table.get(&p.idx).unwrap_or(&f64::NAN))
        });
        match valuation(&net, g).class {
            NetClass::Moderate(_) | NetClass::Negligible => RadiusClass::Finite(net),
            _ => RadiusClass::NonModerate,
        }
    };
    Ok(RadiusReport {
        r_log2,
        class,
        limsup_cutoff: (8.0, RADIUS_N_BUDGET),
        diagnostic: a
            .exact_limsup_log2
            .is_none()
            .then(|| "limsup estimated from a finite window".to_string()),
    })
}

/// Smallest q₁ with rad ≥ dρ^{q₁} read off the per-point radius table.
fn q1_from_radius(rep: &RadiusReport, g: &Gauge) -> u32 {
    let mut q1 = 0.0f64;
    for (idx, rl) in &rep.r_log2 {
        if *rl == f64::INFINITY {
            continue;
        }
        let p = &g.grid[*idx];
        q1 = q1.max((rl / p.log2_rho).ceil());
    }
    q1.max(0.0) as u32
}

/// The series Σ_n a_n (z−c)^n as a summable sequence.  Attaches, besides
/// any registered closed channels, the certificate-derived geometric tail
/// bound ρ^{-R}·h^{N+1}/(1−h) with h = |w|ρ^{-Q}, which is valid whenever
/// h < 1 (this is exactly the majorant from the nonempty-ball argument).
pub fn series_at(
    a: &HpsCoefficients,
    c: &GenComplex,
    z: &GenComplex,
    g: &Gauge,
) -> SeriesSequence {
    let w = z.sub(c);
    let cert = a.cert(g);
    let label = format!("{} at {}", a.label, z.label);

    let (ac, wc) = (a.clone(), w.clone());
    let mut s = SeriesSequence::from_terms(label, move |n, p| {
        ac.coeff(n, p).mul(&wc.eval(p).pow_nat(n))
    })
    .with_budget(DEFAULT_BUDGET);

    let registered = a.log2_tail.clone();
    let wt = w.clone();
    s = s.with_tail_bound_log2(move |n, p| {
        let wv = wt.eval(p);
        let mut t = f64::INFINITY;
        if let Some(f) = &registered {
            t = t.min(f(n, &wv, p));
        }
        if let Some((q, r)) = cert {
            let h = wv.abs_log2() + (q as f64) * (-p.log2_rho);
            if h < -1e-12 {
                let geom = r as f64 * (-p.log2_rho) + (n + 1.0) * h - (1.0 - h.exp2()).log2();
                t = t.min(geom);
            }
        }
        t
    });

    if let Some(cp) = a.closed_partial.clone() {
        let wp = w.clone();
        s = s.with_closed_partial(move |n, p| cp(n, &wp.eval(p), p));
    }
    if let Some(cs) = a.closed_sum.clone() {
        let wp = w.clone();
        s = s.with_closed_limit(move |p| cs(&wp.eval(p), p));
    }
    s
}

/// Evaluate the hyper-power series at z (hyperlimit of partial sums).
pub fn eval_hps(
    a: &HpsCoefficients,
    c: &GenComplex,
    z: &GenComplex,
    g: &Gauge,
) -> Result<GenComplex, HpsError> {
    let rep = sum_hyperseries(&series_at(a, c, z, g), g);
    match rep.result.status {
        LimitStatus::Converges(l) => Ok(l),
        other => Err(HpsError::Precondition(format!(
            "series did not converge at {}: {}",
            z.label,
            other.name()
        ))),
    }
}

/// Index sample for sup-of-terms certificates: small n, representable
/// sweep, gauge rungs, and peak-targeted indices near |w| where entire-type
/// families attain their largest term.
fn formal_ns(p: &GridPoint, q_max: u32, w_log2: f64) -> Vec<f64> {
    let mut v = cert_sample_ns(p, q_max);
    if w_log2 > 2.0 && w_log2 < 1000.0 {
        for c in [0.5, 1.0, 2.0] {
            v.push(rpi(c * w_log2.exp2()));
        }
    }
    v
}

#[derive(Debug)]
pub struct SetConvMembership {
    pub cond_radius: bool,
    pub cond_formal: bool,
    pub cond_sum: bool,
    pub cond_deriv: bool,
    pub representative_independent: bool,
    pub member: bool,
    pub witness: Option<String>,
}

enum ClassicalChannel {
    BruteCertTail,
    BruteRegisteredTail,
    BrutePlateau,
    Closed,
}

/// Classical per-ε sum Σ_{n=0}^{∞} a_n w^n at one grid point, with a
/// stopping rule: certificate-derived or registered tail bound when one
/// certifies the truncation, a plateau heuristic otherwise, and the closed
/// channel as last resort (its honesty is cross-checked at coarse points
/// where brute summation is certifiable).
fn classical_sum(
    a: &HpsCoefficients,
    cert: Option<(u32, u32)>,
    w: &Xc,
    p: &GridPoint,
) -> Option<(Xc, f64, ClassicalChannel)> {
    let k = -p.log2_rho;
    let wl = w.abs_log2();
    let mut s = Xc::ZERO;
    let mut wpow = Xc::ONE;
    let mut mx = f64::NEG_INFINITY;
    let mut quiet = 0u32;
    let n_cap = a.exact_coeff_max_n.min(DEFAULT_BUDGET);
    let mut n = 0.0;
    while n < n_cap {
        let term = a.coeff(n, p).mul(&wpow);
        if term.is_nan() {
            break;
        }
        s = s.add(&term);
        mx = mx.max(s.abs_log2()).max(term.abs_log2());
        if n >= 8.0 {
            let floor = mx - 43.0;
            if let Some((q, r)) = cert {
                let h = wl + q as f64 * k;
                if h < -1e-12 {
                    let t = r as f64 * k + (n + 1.0) * h - (1.0 - h.exp2()).log2();
                    if t <= floor {
                        return Some((s, t, ClassicalChannel::BruteCertTail));
                    }
                }
            }
            if let Some(f) = &a.log2_tail {
                let t = f(n, w, p);
                if t <= floor {
                    return Some((s, t, ClassicalChannel::BruteRegisteredTail));
                }
            }
            if term.abs_log2() <= mx - 53.0 {
                quiet += 1;
                if quiet >= 48 {
                    return Some((s, term.abs_log2() + 8.0, ClassicalChannel::BrutePlateau));
                }
            } else {
                quiet = 0;
            }
        }
        wpow = wpow.mul(w);
        n += 1.0;
    }
    a.closed_sum
        .as_ref()
        .map(|cs| (cs(w, p), f64::NEG_INFINITY, ClassicalChannel::Closed))
}

/// Termwise-differentiated classical sum Σ_n n·a_n w^{n−1} at one point.
fn classical_deriv(a: &HpsCoefficients, w: &Xc, p: &GridPoint) -> Option<Xc> {
    let mut s = Xc::ZERO;
    let mut wpow = Xc::ONE;
    let mut mx = f64::NEG_INFINITY;
    let mut quiet = 0u32;
    let n_cap = a.exact_coeff_max_n.min(DEFAULT_BUDGET);
    let mut n = 1.0;
    while n < n_cap {
        let term = a.coeff(n, p).mul_f64(n).mul(&wpow);
        if term.is_nan() {
            break;
        }
        s = s.add(&term);
        mx = mx.max(s.abs_log2()).max(term.abs_log2());
        if n >= 8.0 && term.abs_log2() <= mx - 53.0 {
            quiet += 1;
            if quiet >= 48 {
                return Some(s);
            }
        } else if n >= 8.0 {
            quiet = 0;
        }
        wpow = wpow.mul(w);
        n += 1.0;
    }
    a.closed_deriv.as_ref().map(|cd| cd(w, p))
}

/// Four-condition membership test for z in the set of convergence of the
/// series with coefficients `a` centred at `c`.
pub fn setconv_membership(
    a: &HpsCoefficients,
    c: &GenComplex,
    z: &GenComplex,
    g: &Gauge,
) -> Result<SetConvMembership, HpsError> {
    let cert = a.cert(g).ok_or(HpsError::MissingCert)?;
    let w = z.sub(c);
    let mut witness = None;

    // 1. |z − c| < rad, pointwise on the tail
    let rad_rep = radius(a, g)?;
    let rtab: HashMap<usize, f64> = rad_rep.r_log2.iter().cloned().collect();
    let mut cond_radius = true;
    for p in g.tail() {
        let rl = *rtab.get(&p.idx).unwrap();
        if !(w.eval(p).abs_log2() < rl - 1e-9) {
            cond_radius = false;
            witness.get_or_insert(format!("|z-c| reaches the radius at eps={:.3e}", p.eps));
            break;
        }
    }

    // 2. formal HPS certificate: the sampled sup over n of |a_n (z−c)^n|
    // (single-index hyperfinite blocks) must be a moderate net; indices are
    // sampled on the ladder plus peak-targeted rungs near n ≈ |w|
    let (ac, wc, qm) = (a.clone(), w.clone(), g.q_max);
    let term_sup = GenComplex::from_fn(format!("formal sup {}", a.label), move |p| {
        let wl = wc.eval(p).abs_log2();
        let mut best = f64::NEG_INFINITY;
        for n in formal_ns(p, qm, wl) {
            best = best.max((ac.log2_mag(n, p) + n * wl).min(1e300));
        }
        Xc::two_pow(best)
    });
    let cond_formal = matches!(
        valuation(&term_sup, g).class,
        NetClass::Negligible | NetClass::Moderate(_)
    );
    if !cond_formal {
        witness.get_or_insert("hyperfinite term blocks are not moderate".to_string());
    }

    // 3. the hyperseries sum must exist and equal the per-ε classical sum
    let mut cond_sum = false;
    let mut representative_independent = false;
    if cond_formal {
        let series = series_at(a, c, z, g);
        let rep = sum_hyperseries(&series, g);
        if let LimitStatus::Converges(l) = rep.result.status {
            let mut ok = true;
            let mut used_closed = false;
            for p in g.tail() {
                match classical_sum(a, Some(cert), &w.eval(p), p) {
                    Some((v, _, ch)) => {
                        used_closed |= matches!(ch, ClassicalChannel::Closed);
                        let lv = l.eval(p);
                        let horizon = (g.q_max as f64) * p.log2_rho;
                        let both_sub = lv.abs_log2() <= horizon && v.abs_log2() <= horizon;
                        if !both_sub && lv.rel_dist(&v) > 1e-9 {
                            ok = false;
                            witness.get_or_insert(format!(
                                "hyperseries/classical mismatch at eps={:.3e}",
                                p.eps
                            ));
                            break;
                        }
                    }
                    None => {
                        ok = false;
                        witness.get_or_insert(format!(
                            "classical sum unresolvable at eps={:.3e}",
                            p.eps
                        ));
                        break;
                    }
                }
            }
            // honesty cross-check for the closed channel at coarse points
            // where brute summation is independently certifiable
            if ok && used_closed {
                for p in g.grid.iter().take(g.grid.len() - g.tail().len()) {
                    if let Some((v, _, ch)) = classical_sum(a, Some(cert), &w.eval(p), p) {
                        if !matches!(ch, ClassicalChannel::Closed) {
                            if let Some(cs) = &a.closed_sum {
                                if v.rel_dist(&cs(&w.eval(p), p)) > 1e-9 {
                                    ok = false;
                                    witness.get_or_insert(format!(
                                        "closed channel fails brute cross-check at eps={:.3e}",
                                        p.eps
                                    ));
                                    break;
                                }
                            }
                        }
                    }
                }
            }
            cond_sum = ok;
            // representative independence: re-run the engine sum with z
            // perturbed by a negligible net
            if ok {
                let zp = z.add(&GenComplex::drho_pow((g.q_max + 2) as f64).mul(
                    &GenComplex::constant("dir", Complex64::new(0.6, 0.8)),
                ));
                if let Ok(l2) = eval_hps(a, c, &zp, g) {
                    representative_independent = l.approx_equals(&l2, 1e-9, g);
                }
                if !representative_independent {
                    witness.get_or_insert("sum moved under a negligible z-perturbation".into());
                }
            }
        } else {
            witness.get_or_insert(format!(
                "hyperseries did not converge ({})",
                rep.result.status.name()
            ));
        }
    }

    // 4. the termwise-differentiated classical sum must be a moderate net
    let mut cond_deriv = true;
    {
        let mut vals: HashMap<usize, Xc> = HashMap::new();
        for p in g.tail() {
            match classical_deriv(a, &w.eval(p), p) {
                Some(v) => {
                    vals.insert(p.idx, v);
                }
                None => {
                    cond_deriv = false;
                    witness
                        .get_or_insert(format!("derivative sum unresolvable at eps={:.3e}", p.eps));
                    break;
                }
            }
        }
        if cond_deriv {
            let net = GenComplex::from_fn("deriv net", move |p| {
                vals.get(&p.idx).copied().unwrap_or(Xc::ZERO)
            });
            cond_deriv = matches!(
                valuation(&net, g).class,
                NetClass::Negligible | NetClass::Moderate(_)
            );
            if !cond_deriv {
                witness.get_or_insert("derivative net not moderate".into());
            }
        }
    }

    let member = cond_radius && cond_formal && cond_sum && cond_deriv;
    Ok(SetConvMembership {
        cond_radius,
        cond_formal,
        cond_sum,
        cond_deriv,
        representative_independent,
        member,
        witness,
    })
}

#[derive(Debug)]
pub struct NonemptyBallReport {
    /// B_{dρ^q}(c) is claimed inside the set of convergence.
    pub q: u32,
    pub q1: u32,
    pub cert: (u32, u32),
    /// Membership verdicts for the sampled points of the ball.
    pub verified: Vec<bool>,
}

/// The set of convergence always contains a ball B_{dρ^q}(c) with
/// q = max(1 + Q, q₁); membership is verified on `samples` points of the
/// ball at radius 0.9·dρ^q.
pub fn nonempty_ball(
    a: &HpsCoefficients,
    c: &GenComplex,
    samples: usize,
    g: &Gauge,
) -> Result<NonemptyBallReport, HpsError> {
    let cert = a.cert(g).ok_or(HpsError::MissingCert)?;
    let rep = radius(a, g)?;
    let q1 = q1_from_radius(&rep, g);
    let q = (1 + cert.0).max(q1);
    let mut verified = Vec::new();
    for j in 0..samples {
        let theta = 2.0 * std::f64::consts::PI * (j as f64 + 0.3) / samples as f64;
        let dir = GenComplex::constant(
            format!("dir{j}"),
            Complex64::from_polar(0.9, theta),
        );
        let zj = c.add(&GenComplex::drho_pow(q as f64).mul(&dir));
        verified.push(setconv_membership(a, c, &zj, g)?.member);
    }
    Ok(NonemptyBallReport {
        q,
        q1,
        cert,
        verified,
    })
}

/// Eventual boundedness of the summands |a_n (z−c)^n| ≤ K_ε: the lemma
/// route (|z−c| ≤ dρ^Q gives K = dρ^{-R} straight from the certificate),
/// else a sampled sup classified as a net; absent when no moderate K is
/// found.
pub fn eventually_bounded(
    a: &HpsCoefficients,
    c: &GenComplex,
    z: &GenComplex,
    g: &Gauge,
) -> Result<Option<GenComplex>, HpsError> {
    let (q, r) = a.cert(g).ok_or(HpsError::MissingCert)?;
    let w = z.sub(c);
    let lemma = g
        .tail()
        .iter()
        .all(|p| w.eval(p).abs_log2() <= q as f64 * p.log2_rho + LOG2_SLACK);
    if lemma {
        return Ok(Some(GenComplex::drho_pow(-(r as f64))));
    }
    let (ac, wc, qm) = (a.clone(), w.clone(), g.q_max);
    let sup = GenComplex::from_fn(format!("summand sup {}", a.label), move |p| {
        let wl = wc.eval(p).abs_log2();
        let mut best = f64::NEG_INFINITY;
        for n in formal_ns(p, qm, wl) {
            best = best.max((ac.log2_mag(n, p) + n * wl).min(1e300));
        }
        Xc::two_pow(best)
    });
    match valuation(&sup, g).class {
        NetClass::Negligible | NetClass::Moderate(_) => Ok(Some(sup)),
        _ => Ok(None),
    }
}

#[derive(Debug)]
pub struct DiskExpansionReport {
    pub converges_absolutely: bool,
    /// Per q: the majorant index N_q with K·h^{N_q+1}/(1−h) ≤ ρ^q at every
    /// tail point (worst case over points).
    pub uniform_witnesses: Vec<(u32, f64)>,
    /// Sampled uniform check on the circle |w| = |z−c| passed.
    pub sampled_sup_ok: bool,
    /// z is a sharply interior point of the set of convergence.
    pub interior: bool,
}

/// Absolute/uniform convergence at z from eventual boundedness at ẑ via
/// the geometric majorant K·h^n, h = |z−c|/|ẑ−c| < 1.
pub fn disk_expansion(
    a: &HpsCoefficients,
    c: &GenComplex,
    z_hat: &GenComplex,
    z: &GenComplex,
    g: &Gauge,
) -> Result<DiskExpansionReport, HpsError> {
    let k_net = eventually_bounded(a, c, z_hat, g)?
        .ok_or_else(|| HpsError::Precondition("summands not eventually bounded at ẑ".into()))?;
    let w = z.sub(c);
    let w_hat = z_hat.sub(c);
    let (wc, whc) = (w.clone(), w_hat.clone());
    let h_net = GenComplex::from_fn("h", move |p| {
        Xc::two_pow(wc.eval(p).abs_log2() - whc.eval(p).abs_log2())
    });
    let one = GenComplex::constant("1", Complex64::new(1.0, 0.0));
    if sharp_compare(&h_net, &one, 1, g)? != CompareVerdict::Less {
        return Err(HpsError::Precondition("|z−c|/|ẑ−c| not sharply below 1".into()));
    }

    let mut uniform_witnesses = Vec::new();
    let mut converges_absolutely = true;
    for q in 1..=g.q_max {
        let mut n_q = 0.0f64;
        for p in g.tail() {
            let kl = k_net.eval(p).abs_log2();
            let hl = h_net.eval(p).abs_log2();
            if hl >= 0.0 {
                converges_absolutely = false;
                break;
            }
            let need = (q as f64 * p.log2_rho - kl + (1.0 - hl.exp2()).log2()) / hl - 1.0;
            n_q = n_q.max(need.ceil().max(0.0));
        }
        uniform_witnesses.push((q, n_q));
    }

    // sampled uniform check on the boundary circle of the compact disk:
    // partial sums at the q=3 witness index vs a much later index
    let n3 = uniform_witnesses
        .iter()
        .find(|x| x.0 == 3.min(g.q_max))
        .map(|x| x.1)
        .unwrap_or(64.0);
    let mut sampled_sup_ok = true;
    'outer: for j in 0..8 {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / 8.0;
        let dir = GenComplex::constant(format!("bdry{j}"), Complex64::from_polar(1.0, theta));
        let zj = c.add(&w.mul(&dir));
        let s = series_at(a, c, &zj, g);
        for p in g.tail().iter().step_by(6) {
            let (v1, _) = s.partial_sum(n3, p)?;
            let (v2, _) = s.partial_sum(4.0 * n3 + 64.0, p)?;
            let gap = v1.sub(&v2).abs_log2();
            if gap > 3.0f64.min(g.q_max as f64) * p.log2_rho + 2.0 {
                sampled_sup_ok = false;
                break 'outer;
            }
        }
    }

    Ok(DiskExpansionReport {
        converges_absolutely,
        uniform_witnesses,
        sampled_sup_ok,
        interior: converges_absolutely,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BuiltinFamily {
    Geometric,
    Exponential,
    DiracDelta,
}

/// The built-in example families with their closed channels and
/// certificates precomputed.
pub fn builtin(which: BuiltinFamily) -> HpsCoefficients {
    match which {
        BuiltinFamily::Geometric => HpsCoefficients::from_fn("geometric", |_, _| Xc::ONE)
            .with_declared_cert(0, 0)
            .with_exact_limsup(|_| 0.0)
            .with_closed_partial(|n, w, _| {
                // (1 − w^{N+1})/(1 − w); the mantissa phase of w^{N+1} is
                // meaningless at hyperfinite N for non-real w, but there the
                // magnitude alone decides (|w|<1 → negligible, |w|>1 → huge)
                let denom = Xc::ONE.sub(w);
                if denom.abs_log2() < -100.0 {
                    return Xc::from_f64(n + 1.0);
                }
                Xc::ONE.sub(&w.pow_nat(n + 1.0)).div(&denom)
            })
            .with_closed_sum(|w, _| {
                if w.abs_log2() >= 0.0 {
                    return Xc::new(Complex64::new(f64::NAN, f64::NAN), 0.0);
                }
                Xc::ONE.div(&Xc::ONE.sub(w))
            })
            .with_closed_deriv(|w, _| {
                if w.abs_log2() >= 0.0 {
                    return Xc::new(Complex64::new(f64::NAN, f64::NAN), 0.0);
                }
                let d = Xc::ONE.sub(w);
                Xc::ONE.div(&d.mul(&d))
            })
            .with_log2_tail(|n, w, _| {
                let wl = w.abs_log2();
                if wl >= 0.0 {
                    return f64::INFINITY;
                }
                (n + 1.0) * wl - (1.0 - wl.exp2()).log2()
            }),
        BuiltinFamily::Exponential => {
            HpsCoefficients::from_fn("exponential", |n, _| Xc::two_pow(-log2_factorial(n)))
                .with_declared_cert(0, 0)
                .with_exact_limsup(|_| f64::NEG_INFINITY)
                .with_closed_sum(|w, _| xc_exp(w))
                .with_closed_deriv(|w, _| xc_exp(w))
                .with_log2_tail(|n, w, _| exp_tail_log2(n, w))
        }
        BuiltinFamily::DiracDelta => {
            let m = Mollifier::standard();
            let nmax = crate::mollifier::TAYLOR_LEN as f64;
            HpsCoefficients::from_fn("dirac-delta", move |n, p| {
                if n as u64 % 2 == 1 {
                    return Xc::ZERO;
                }
                if n < nmax {
                    return Xc::from_f64(m.taylor(n as usize))
                        .mul(&Xc::two_pow(-(n + 2.0) * p.log2_rho));
                }
                Xc::new(Complex64::new(f64::NAN, f64::NAN), 0.0)
            })
            .with_exact_range(nmax)
            .with_log2_bound(move |n, p| {
                let base = if n < nmax {
                    Xc::from_f64(m.taylor(n as usize)).abs_log2()
                } else if n as u64 % 2 == 1 {
                    f64::NEG_INFINITY
                } else {
                    Mollifier::log2_taylor_bound(n)
                };
                base - (n + 2.0) * p.log2_rho
            })
            .with_declared_cert(2, 2)
            .with_exact_limsup(|_| f64::NEG_INFINITY)
            .with_closed_sum(move |w, p| delta_closed_sum(m, w, p))
            .with_closed_deriv(move |w, p| {
                let u = w.mul(&Xc::two_pow(-p.log2_rho));
                if u.abs_log2() > 52.0 {
                    return Xc::new(Complex64::new(f64::NAN, f64::NAN), 0.0);
                }
                m.mu_prime_xc(u.to_c64())
                    .mul(&Xc::two_pow(-3.0 * p.log2_rho))
            })
            .with_log2_tail(|n, w, p| delta_tail_log2(n, w, p))
        }
    }
}

/// e^w in extended-exponent arithmetic (|w| must fit in f64 for the phase
/// and the real part; the closed channel is unusable beyond that, which is
/// exactly the regime where the formal certificate fails anyway).
/// e^w in extended-exponent arithmetic (NaN beyond the f64 argument
/// accuracy horizon |w| > 2^45).
pub fn xc_exp(w: &Xc) -> Xc {
    if w.abs_log2() > 45.0 {
        return Xc::new(Complex64::new(f64::NAN, f64::NAN), 0.0);
    }
    let wc = w.to_c64();
    Xc::new(
        Complex64::from_polar(1.0, wc.im),
        wc.re * std::f64::consts::LOG2_E,
    )
}

/// Certified log2 bound on the exponential-series tail Σ_{n>N} |w|^n/n!
/// via the Lagrange form with |w|^{N+1}/(N+1)! ≤ (e|w|/(N+1))^{N+1}.
fn exp_tail_log2(n: f64, w: &Xc) -> f64 {
    let wl = w.abs_log2();
    if wl > 1000.0 {
        return f64::INFINITY;
    }
    let wabs = wl.exp2();
    let e_w = std::f64::consts::E * wabs;
    if n + 2.0 <= e_w {
        return f64::INFINITY;
    }
    let log2_e = std::f64::consts::LOG2_E;
    (n + 1.0) * (log2_e + wl - (n + 1.0).log2()) - (1.0 - e_w / (n + 2.0)).log2()
}

/// δ(z) = ρ^{-2} μ(ρ^{-1} z) as the closed sum of the delta series.
fn delta_closed_sum(m: &'static Mollifier, w: &Xc, p: &GridPoint) -> Xc {
    let u = w.mul(&Xc::two_pow(-p.log2_rho));
    if u.abs_log2() > 52.0 {
        // sin/cos argument accuracy is exhausted past integer spacing
        return Xc::new(Complex64::new(f64::NAN, f64::NAN), 0.0);
    }
    m.mu_xc(u.to_c64()).mul(&Xc::two_pow(-2.0 * p.log2_rho))
}

/// Certified log2 bound on the delta-series tail after N at w = z − 0:
/// ρ^{-2}·sup|μ^{(N+1)}|·|u|^{N+1}/(N+1)! with u = ρ^{-1}w, using the
/// uniform real-axis derivative bound 1/(π(N+2)) times e^{|Im u|} for the
/// off-axis extension.
/// Lagrange-form log2 bound on the delta-family series remainder after n
/// terms at offset w (+inf when n is below the validity threshold e|w|/ρ).
pub fn delta_tail_log2(n: f64, w: &Xc, p: &GridPoint) -> f64 {
    let k = -p.log2_rho;
    let ul = w.abs_log2() + k;
    let im_log2 = w.im().abs_log2() + k;
    let im_term = if im_log2 == f64::NEG_INFINITY {
        0.0
    } else if im_log2 > 60.0 {
        return f64::INFINITY;
    } else {
        im_log2.exp2() * std::f64::consts::LOG2_E
    };
    let log2_e = std::f64::consts::LOG2_E;
    2.0 * k - (std::f64::consts::PI * (n + 2.0)).log2()
        + (n + 1.0) * (log2_e + ul - (n + 1.0).log2())
        + im_term
}
