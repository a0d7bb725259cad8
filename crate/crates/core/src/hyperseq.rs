//! Hypersequences ρÑ → ρC̃, hyperlimit search, and the Cauchy criterion.
//!
//! Index sampling uses a geometric ladder per ε: powers of two (with odd
//! neighbours while exactly representable, to catch parity oscillation) plus
//! the gauge rungs `rpi(ρ_ε^{-j})`, j = 1..q_max+2.  The candidate limit is
//! the net value at the ceiling rung `rpi(ρ^{-q_max})`; no extrapolation is
//! performed.  Uniqueness is asserted by cross-checking a second ceiling.
//!
//! Indices are passed as exact integer-valued f64.  Above 2^53 only even
//! integers are representable, so parity-driven oscillation is invisible
//! there; an oscillation screen (neighbour-gap decay over the accessible
//! scales) gates threshold rungs that have no neighbour pair above them.

use crate::gauge::{least_squares_slope, valuation, Gauge, GenComplex, GridPoint, NetClass};
use crate::hypernat::{rpi, HyperNatural};
use crate::xc::Xc;
use serde::Serialize;
use std::sync::Arc;

/// Log2-space slack admitting representation rounding in strict comparisons.
const LOG2_SLACK: f64 = 1e-6;

/// A hypersequence: term(n, ε) with `n` an integer-valued f64 (hypernatural
/// representative value at the given grid point).
#[derive(Clone)]
pub struct HyperSequence {
    term: Arc<dyn Fn(f64, &GridPoint) -> Xc + Send + Sync>,
    /// Defined for n ≥ domain_min.
    pub domain_min: f64,
    pub label: String,
}

impl HyperSequence {
    pub fn from_fn(
        label: impl Into<String>,
        f: impl Fn(f64, &GridPoint) -> Xc + Send + Sync + 'static,
    ) -> Self {
        HyperSequence {
            term: Arc::new(f),
            domain_min: 0.0,
            label: label.into(),
        }
    }

    pub fn with_domain_min(mut self, m: f64) -> Self {
        self.domain_min = m;
        self
    }

    pub fn at(&self, n: f64, p: &GridPoint) -> Xc {
        (self.term)(n, p)
    }

    /// Net value at a hypernatural index, as a generalized number.
    pub fn value_at(&self, n: &HyperNatural) -> GenComplex {
        let s = self.clone();
        let n = n.clone();
        GenComplex::from_fn(format!("{}[{}]", self.label, n.label), move |p| {
            s.at(n.at(p), p)
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct QWitness {
    pub q: u32,
    /// Human-readable description of the threshold rung M(q).
    pub rung: String,
}

#[derive(Clone, Debug)]
pub enum LimitStatus {
    Converges(GenComplex),
    NoLimit,
    DivergesPos,
    DivergesNeg,
    Indeterminate,
}

impl LimitStatus {
    pub fn name(&self) -> &'static str {
        match self {
            LimitStatus::Converges(_) => "converges",
            LimitStatus::NoLimit => "no_limit",
            LimitStatus::DivergesPos => "diverges_pos",
            LimitStatus::DivergesNeg => "diverges_neg",
            LimitStatus::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Clone, Debug)]
pub struct HyperLimitResult {
    pub status: LimitStatus,
    pub witnesses: Vec<QWitness>,
    pub diagnostic: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Rung {
    Pow2(u32),
    Pow2Neighbor(u32),
    Gauge(u32),
    GaugeNeighbor(u32),
}

impl Rung {
    fn describe(&self) -> String {
        match self {
            Rung::Pow2(i) => format!("2^{i}"),
            Rung::Pow2Neighbor(i) => format!("2^{i}+1"),
            Rung::Gauge(j) => format!("rpi(rho^-{j})"),
            Rung::GaugeNeighbor(j) => format!("rpi(rho^-{j})+1"),
        }
    }
}

/// The sampling ladder at one grid point, ascending.
fn ladder(p: &GridPoint, q_max: u32, domain_min: f64) -> Vec<(f64, Rung)> {
    let mut out: Vec<(f64, Rung)> = Vec::new();
    for i in 0..53u32 {
        let n = 2f64.powi(i as i32);
        out.push((n, Rung::Pow2(i)));
        if i >= 1 {
            out.push((n + 1.0, Rung::Pow2Neighbor(i)));
        }
    }
    for j in 1..=(q_max + 2) {
        let n = rpi((-(j as f64) * p.log2_rho).exp2());
        out.push((n, Rung::Gauge(j)));
        if n + 1.0 > n {
            out.push((n + 1.0, Rung::GaugeNeighbor(j)));
        }
    }
    out.retain(|(n, _)| *n >= domain_min.max(1.0));
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out.dedup_by(|a, b| a.0 == b.0);
    out
}

/// Oscillation evidence at one grid point from neighbour pairs (n, n+1)
/// that are both exactly representable.
struct OscProfile {
    points: Vec<(f64, f64)>,
    top_gap_log2: f64,
    slope: f64,
    sign_flip_top: bool,
}

fn osc_profile(s: &HyperSequence, p: &GridPoint, lad: &[(f64, Rung)]) -> OscProfile {
    let mut points = Vec::new();
    let mut sign_flip_top = false;
    let mut top_n = f64::NEG_INFINITY;
    for w in lad.windows(2) {
        let (n0, n1) = (w[0].0, w[1].0);
        if n1 == n0 + 1.0 && n0 >= 4.0 {
            let a0 = s.at(n0, p);
            let a1 = s.at(n1, p);
            let gap = a1.sub(&a0).abs_log2();
            if gap.is_finite() {
                points.push((n0.log2(), gap));
            }
            if n0 > top_n {
                top_n = n0;
                sign_flip_top = a0.m.re * a1.m.re < 0.0;
            }
        }
    }
    let top_gap_log2 = points
        .iter()
        .rev()
        .take(3)
        .map(|x| x.1)
        .fold(f64::NEG_INFINITY, f64::max);
    let slope = if points.len() >= 4 {
        let half = &points[points.len() / 2..];
        least_squares_slope(half).0
    } else {
        f64::NEG_INFINITY
    };
    OscProfile {
        points,
        top_gap_log2,
        slope,
        sign_flip_top,
    }
}

impl OscProfile {
    /// Whether the observable oscillation is compatible with contraction
    /// below ρ^q beyond the representable range.
    fn quiet_for(&self, q: u32, p: &GridPoint) -> bool {
        self.points.is_empty()
            || self.top_gap_log2 < q as f64 * p.log2_rho + LOG2_SLACK
            || self.slope < -0.5
    }
}

/// The ceiling hypernatural used for candidate-limit extraction.  Two rungs
/// above q_max, so the candidate's own distance from the limit (~C·ρ^ceiling)
/// sits safely below the finest tested tolerance ρ^{q_max}.
pub fn default_ceiling(g: &Gauge) -> HyperNatural {
    HyperNatural::rho_inv_pow((g.q_max + 2) as f64)
}

/// Searches for the smallest rung M such that `check(sample value, point)`
/// holds for every ladder sample ≥ M at every tail point.  Where
/// `need_pairs` is true the rung must leave a neighbour pair above it
/// (parity behaviour is otherwise unverifiable there).
fn find_threshold_rung(
    s: &HyperSequence,
    g: &Gauge,
    need_pairs: &dyn Fn(&GridPoint) -> bool,
    check: &dyn Fn(f64, &GridPoint) -> bool,
) -> Option<String> {
    let rung_ids: Vec<Rung> = ladder(g.tail().first().unwrap(), g.q_max, s.domain_min)
        .iter()
        .map(|x| x.1)
        .collect();
    'rungs: for rid in &rung_ids {
        for p in g.tail() {
            let lad = ladder(p, g.q_max, s.domain_min);
            let m_val = match lad.iter().find(|x| x.1 == *rid) {
                Some(x) => x.0,
                None => continue 'rungs,
            };
            if need_pairs(p) {
                let has_pair = lad
                    .windows(2)
                    .any(|w| w[0].0 >= m_val && w[1].0 == w[0].0 + 1.0);
                if !has_pair {
                    continue 'rungs;
                }
            }
            for (n, _) in lad.iter().filter(|x| x.0 >= m_val) {
                if !check(*n, p) {
                    continue 'rungs;
                }
            }
        }
        return Some(rid.describe());
    }
    None
}

/// Hyperlimit search per the definitional quantifiers, sampled on the ladder.
pub fn hyperlimit(s: &HyperSequence, g: &Gauge) -> HyperLimitResult {
    let ceiling_q = (g.q_max + 2) as f64;
    // NaN scan (unresolvable samples fail every check they take part in,
    // so they can only push threshold rungs upward, never fake a pass) and
    // oscillation profiles
    let mut has_nan = false;
    let mut oscs = Vec::new();
    for p in g.tail() {
        let lad = ladder(p, g.q_max, s.domain_min);
        has_nan |= lad.iter().any(|(n, _)| s.at(*n, p).is_nan());
        oscs.push((p.idx, osc_profile(s, p, &lad)));
    }
    let osc_for = |p: &GridPoint| &oscs.iter().find(|x| x.0 == p.idx).unwrap().1;

    // Candidate limit at the ceiling.
    let sc = s.clone();
    let candidate = GenComplex::from_fn(format!("lim {}", s.label), move |p| {
        sc.at(rpi((-ceiling_q * p.log2_rho).exp2()), p)
    });

    // Per-q threshold search: smallest rung M such that every sampled
    // n ≥ M satisfies |a_n − l| < ρ^q at every tail grid point.
    let mut witnesses = Vec::new();
    let mut converged = true;
    for q in 1..=g.q_max {
        let cand = candidate.clone();
        let found = find_threshold_rung(
            s,
            g,
            &|p| !osc_for(p).quiet_for(q, p),
            &|n, p| {
                let gap = s.at(n, p).sub(&cand.eval(p)).abs_log2();
                gap < q as f64 * p.log2_rho + LOG2_SLACK
            },
        );
        match found {
            Some(rung) => witnesses.push(QWitness { q, rung }),
            None => {
                converged = false;
                break;
            }
        }
    }

    if converged {
        // Uniqueness cross-check: a second ceiling must agree within
        // 2ρ^{q_max−1} at every tail point (Hausdorffness surrogate).
        let alt_q = ceiling_q - 1.0;
        let sc = s.clone();
        let alt = GenComplex::from_fn("alt-ceiling", move |p| {
            sc.at(rpi((-alt_q * p.log2_rho).exp2()), p)
        });
        let ok = g.tail().iter().all(|p| {
            let d = candidate.eval(p).sub(&alt.eval(p)).abs_log2();
            d <= (g.q_max as f64 - 1.0) * p.log2_rho + 1.0
        });
        if ok {
            return HyperLimitResult {
                status: LimitStatus::Converges(candidate),
                witnesses,
                diagnostic: None,
            };
        }
        return HyperLimitResult {
            status: LimitStatus::NoLimit,
            witnesses,
            diagnostic: Some("ceiling cross-check disagreement (limit not stabilised)".into()),
        };
    }

    // Divergence: beyond some rung, the real part exceeds ρ^{-q} for every q
    // with consistent sign at all tail points.  Parity screen: if the top
    // accessible neighbour pair flips sign, distrust pair-free rungs.
    for (sign, status) in [(1.0, LimitStatus::DivergesPos), (-1.0, LimitStatus::DivergesNeg)] {
        let mut all_q = true;
        for q in 1..=g.q_max {
            let found = find_threshold_rung(
                s,
                g,
                &|p| osc_for(p).sign_flip_top,
                &|n, p| {
                    let v = s.at(n, p);
                    v.m.re * sign > 0.0
                        && v.re().abs_log2() > -(q as f64) * p.log2_rho - LOG2_SLACK
                },
            );
            if found.is_none() {
                all_q = false;
                break;
            }
        }
        if all_q {
            return HyperLimitResult {
                status,
                witnesses,
                diagnostic: None,
            };
        }
    }

    if has_nan {
        return HyperLimitResult {
            status: LimitStatus::Indeterminate,
            witnesses,
            diagnostic: Some("unresolvable (NaN) samples and no threshold rung found".into()),
        };
    }
    HyperLimitResult {
        status: LimitStatus::NoLimit,
        witnesses,
        diagnostic: Some("no threshold rung found (oscillation or sub-gauge decay)".into()),
    }
}

/// Cauchy criterion on the sampled ladder: for every q ≤ q_max there must be
/// a rung M with at least two samples ≥ M and all pairs within ρ^q at every
/// tail point.  Returns the witnesses found.
pub fn is_cauchy(s: &HyperSequence, g: &Gauge) -> (bool, Vec<QWitness>) {
    let mut oscs = Vec::new();
    for p in g.tail() {
        let lad = ladder(p, g.q_max, s.domain_min);
        oscs.push((p.idx, osc_profile(s, p, &lad)));
    }
    let osc_for = |p: &GridPoint| &oscs.iter().find(|x| x.0 == p.idx).unwrap().1;

    let mut witnesses = Vec::new();
    for q in 1..=g.q_max {
        let rung_ids: Vec<Rung> = ladder(g.tail().first().unwrap(), g.q_max, s.domain_min)
            .iter()
            .map(|x| x.1)
            .collect();
        let mut found = None;
        'rungs: for rid in &rung_ids {
            for p in g.tail() {
                let lad = ladder(p, g.q_max, s.domain_min);
                let m_val = match lad.iter().find(|x| x.1 == *rid) {
                    Some(x) => x.0,
                    None => continue 'rungs,
                };
                if !osc_for(p).quiet_for(q, p) {
                    let has_pair = lad
                        .windows(2)
                        .any(|w| w[0].0 >= m_val && w[1].0 == w[0].0 + 1.0);
                    if !has_pair {
                        continue 'rungs;
                    }
                }
                let above: Vec<f64> = lad.iter().filter(|x| x.0 >= m_val).map(|x| x.0).collect();
                if above.len() < 2 {
                    continue 'rungs;
                }
                for (i, &n) in above.iter().enumerate() {
                    for &m in &above[i + 1..] {
                        let gap = s.at(n, p).sub(&s.at(m, p)).abs_log2();
                        if !(gap < q as f64 * p.log2_rho + LOG2_SLACK) {
                            continue 'rungs;
                        }
                    }
                }
            }
            found = Some(rid.describe());
            break;
        }
        match found {
            Some(rung) => witnesses.push(QWitness { q, rung }),
            None => return (false, witnesses),
        }
    }
    (true, witnesses)
}

#[derive(Debug, thiserror::Error)]
pub enum HyperSeqError {
    #[error("extension fails: term not moderate at tested hypernatural {rung} (class {class:?})")]
    NotModerate { rung: String, class: NetClass },
}

/// Extend an ordinary sequence ℕ → ρC̃ to a hypersequence, checking the
/// sufficient moderateness condition at the tested gauge-rung hypernaturals.
pub fn extend_ordinary(
    label: impl Into<String>,
    a: impl Fn(f64, &GridPoint) -> Xc + Send + Sync + 'static,
    g: &Gauge,
) -> Result<HyperSequence, HyperSeqError> {
    let s = HyperSequence::from_fn(label, a);
    for j in 1..=g.q_max {
        let n = HyperNatural::rho_inv_pow(j as f64);
        let v = valuation(&s.value_at(&n), g);
        if matches!(v.class, NetClass::NonModerate | NetClass::Indeterminate) {
            return Err(HyperSeqError::NotModerate {
                rung: n.label.clone(),
                class: v.class,
            });
        }
    }
    Ok(s)
}
