//! Generalized complex analytic function nets: coefficient extraction by
//! contour quadrature, a Liouville constancy check, zero isolation on grid
//! subsets, and continuation of nullity along finite chains of disks.
//!
//! A `GhfNet` is a family of per-point holomorphic functions; holomorphy is
//! the caller's contract and is spot-checked numerically through a
//! Cauchy–Riemann residual probe.  All heavy values flow through
//! extended-exponent arithmetic, since the interesting nets reach
//! magnitudes far beyond f64 range.

use crate::gauge::{valuation, Gauge, GenComplex, GridPoint, NetClass};
use crate::hps::HpsCoefficients;
use crate::hyperseq::HyperSequence;
use crate::mollifier::Mollifier;
use crate::xc::Xc;
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::HashMap;
use std::sync::Arc;

/// Starting node count for contour quadrature.
const QUAD_NODES_MIN: usize = 64;
/// Node-count cap; doubling stops here.
const QUAD_NODES_MAX: usize = 4096;
/// Relative agreement required between successive node doublings.
const QUAD_RTOL: f64 = 1e-11;
/// Derivative probe order for zero isolation.
const N_PROBE: usize = 8;

#[derive(Debug, thiserror::Error)]
pub enum GhfError {
    #[error("contour quadrature did not converge at eps={eps:.3e} (coefficient {n})")]
    Quadrature { eps: f64, n: usize },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Gauge(#[from] crate::gauge::GaugeError),
    #[error(transparent)]
    Hps(#[from] crate::hps::HpsError),
}

/// A net of per-point holomorphic functions w ↦ f_ε(w).
#[derive(Clone)]
pub struct GhfNet {
    f: Arc<dyn Fn(&GridPoint, &Xc) -> Xc + Send + Sync>,
    pub label: String,
}

impl GhfNet {
    pub fn from_fn(
        label: impl Into<String>,
        f: impl Fn(&GridPoint, &Xc) -> Xc + Send + Sync + 'static,
    ) -> Self {
        GhfNet {
            f: Arc::new(f),
            label: label.into(),
        }
    }

    pub fn eval(&self, p: &GridPoint, z: &Xc) -> Xc {
        (self.f)(p, z)
    }

    /// Net of values z ↦ [f_ε(z_ε)].
    pub fn at(&self, z: &GenComplex) -> GenComplex {
        let s = self.clone();
        let z = z.clone();
        GenComplex::from_fn(format!("{}({})", self.label, z.label), move |p| {
            s.eval(p, &z.eval(p))
        })
    }

    /// Constant net.
    pub fn constant(c: Complex64) -> Self {
        GhfNet::from_fn(format!("{c}"), move |_, _| Xc::from_c64(c))
    }

    /// The geometric kernel w ↦ 1/(1−w).
    pub fn geometric_kernel() -> Self {
        GhfNet::from_fn("1/(1-w)", |_, w| Xc::ONE.div(&Xc::ONE.sub(w)))
    }

    /// w ↦ e^w (usable for |w| within f64 range; the nets exercised here
    /// stay inside it).
    pub fn exponential() -> Self {
        GhfNet::from_fn("exp", |_, w| {
            let wc = w.to_c64();
            Xc::new(
                Complex64::from_polar(1.0, wc.im),
                wc.re * std::f64::consts::LOG2_E,
            )
        })
    }

    /// The delta net w ↦ ρ^{-2} μ(ρ^{-1} w), entire per point.
    pub fn dirac_delta() -> Self {
        let m = Mollifier::standard();
        GhfNet::from_fn("delta", move |p, w| {
            let u = w.mul(&Xc::two_pow(-p.log2_rho));
            if u.abs_log2() > 52.0 {
                return Xc::new(Complex64::new(f64::NAN, f64::NAN), 0.0);
            }
            m.mu_xc(u.to_c64()).mul(&Xc::two_pow(-2.0 * p.log2_rho))
        })
    }
}

/// Max relative Cauchy–Riemann residual of f over the sampled points:
/// |∂f/∂x + i ∂f/∂y| / (|∂f/∂x| + |∂f/∂y| + floor), central differences
/// with step scaled to the sample point.  Holomorphic nets sit at float
/// noise (≲ 1e-5 with the h used); non-holomorphic ones sit near 1.
pub fn cr_residual(f: &GhfNet, z: &GenComplex, g: &Gauge) -> f64 {
    let mut worst = 0.0f64;
    for p in g.tail().iter().step_by(6) {
        let zv = z.eval(p);
        // the per-point variation scale of the net is unknown: probe at a
        // standard step and at a ρ-scaled step, and keep the better one
        // (a holomorphic net passes at whichever step resolves it; a
        // non-holomorphic one fails at every step)
        let mut best = f64::INFINITY;
        for step_log2 in [
            zv.abs_log2().max(0.0) - 17.0,
            zv.abs_log2().max(0.0) - 17.0 + p.log2_rho,
        ] {
            let h = Xc::two_pow(step_log2);
            let ih = h.mul(&Xc::from_c64(Complex64::new(0.0, 1.0)));
            let dx = f
                .eval(p, &zv.add(&h))
                .sub(&f.eval(p, &zv.sub(&h)))
                .div(&h.mul_f64(2.0));
            let dy = f
                .eval(p, &zv.add(&ih))
                .sub(&f.eval(p, &zv.sub(&ih)))
                .div(&ih.mul_f64(2.0));
            let num = dx.sub(&dy);
            let den = dx.abs_log2().max(dy.abs_log2());
            if den == f64::NEG_INFINITY {
                best = 0.0;
                continue;
            }
            best = best.min((num.abs_log2() - den).exp2());
        }
        worst = worst.max(best);
    }
    worst
}

fn contour_coeffs_fixed(
    f: &GhfNet,
    p: &GridPoint,
    z0: &Xc,
    r: &Xc,
    n_max: usize,
    nodes: usize,
) -> (Vec<Xc>, f64) {
    let vals: Vec<(Xc, f64)> = (0..nodes)
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / nodes as f64;
            let w = z0.add(&r.mul(&Xc::from_c64(Complex64::from_polar(1.0, theta))));
            (f.eval(p, &w), theta)
        })
        .collect();
    let fmax = vals
        .iter()
        .map(|(v, _)| v.abs_log2())
        .fold(f64::NEG_INFINITY, f64::max);
    let coeffs = (0..=n_max)
        .map(|n| {
            // pairwise reduction keeps the rounding error near eps·log M
            // instead of eps·sqrt(M); the agreement floor depends on it
            let mut layer: Vec<Xc> = vals
                .iter()
                .map(|(v, theta)| {
                    v.mul(&Xc::from_c64(Complex64::from_polar(1.0, -(n as f64) * theta)))
                })
                .collect();
            while layer.len() > 1 {
                layer = layer
                    .chunks(2)
                    .map(|c| if c.len() == 2 { c[0].add(&c[1]) } else { c[0] })
                    .collect();
            }
            layer[0]
                .mul_f64(1.0 / nodes as f64)
                .div(&r.pow_nat(n as f64))
        })
        .collect();
    (coeffs, fmax)
}

/// One grid point's coefficients with node-doubling until agreement.  Two
/// doublings agree on a_n when they match relatively, or when their
/// difference sits below the cancellation noise floor sup|f|·2^{-45}/R^n
/// (coefficients much smaller than the contour values cannot be resolved
/// beyond that floor by any node count).
fn contour_coeffs(
    f: &GhfNet,
    p: &GridPoint,
    z0: &Xc,
    r: &Xc,
    n_max: usize,
) -> Result<Vec<Xc>, GhfError> {
    let rl = r.abs_log2();
    // rounding of the sample points z0 + R e^{iθ} costs |z0|·2^{-52}
    // absolutely, i.e. |z0|/R in units of the contour scale: coefficients
    // closer to the cancellation floor than that cannot be resolved
    let arg_bits = (z0.abs_log2() - rl).max(0.0);
    let mut nodes = QUAD_NODES_MIN;
    let (mut prev, _) = contour_coeffs_fixed(f, p, z0, r, n_max, nodes);
    while nodes < QUAD_NODES_MAX {
        nodes *= 2;
        let (next, fmax) = contour_coeffs_fixed(f, p, z0, r, n_max, nodes);
        let agree = prev.iter().zip(&next).enumerate().all(|(n, (a, b))| {
            let floor = fmax - n as f64 * rl - 45.0 + arg_bits;
            a.rel_dist(b) <= QUAD_RTOL || a.sub(b).abs_log2() <= floor
        });
        if agree {
            // coefficients below the cancellation floor are unresolved:
            // report them as exact zeros rather than as noise of magnitude
            // sup|f|·2^{-45}/R^n (which would read as spurious non-null
            // derivatives downstream)
            let clamped = next
                .into_iter()
                .enumerate()
                .map(|(n, a)| {
                    if a.abs_log2() <= fmax - n as f64 * rl - 44.0 + arg_bits {
                        Xc::ZERO
                    } else {
                        a
                    }
                })
                .collect();
            return Ok(clamped);
        }
        prev = next;
    }
    let n_bad = (0..=n_max)
        .find(|&n| prev[n].abs_log2() > f64::NEG_INFINITY)
        .unwrap_or(0);
    Err(GhfError::Quadrature {
        eps: p.eps,
        n: n_bad,
    })
}

/// Coefficients a_n = (1/2πi)∮ f(w)/(w−z0)^{n+1} dw extracted on the circle
/// of radius R around z0, at every grid point.  Returns the coefficient
/// family together with its weak moderateness certificate when one is found
/// (None means the family is returned uncertified).
pub fn goursat_coefficients(
    f: &GhfNet,
    z0: &GenComplex,
    r: &GenComplex,
    n_max: usize,
    g: &Gauge,
) -> Result<(HpsCoefficients, Option<(u32, u32)>), GhfError> {
    let tables: Result<Vec<(usize, Vec<Xc>)>, GhfError> = g
        .grid
        .par_iter()
        .map(|p| {
            let t = contour_coeffs(f, p, &z0.eval(p), &r.eval(p), n_max)?;
            Ok((p.idx, t))
        })
        .collect();
    let table: HashMap<usize, Vec<Xc>> = tables?.into_iter().collect();
    let label = format!("goursat {} at {}", f.label, z0.label);
    let mut coeffs = HpsCoefficients::from_fn(label, move |n, p| {
        table
            .get(&p.idx)
            .and_then(|t| t.get(n as usize))
            .copied()
            .unwrap_or(Xc::new(Complex64::new(f64::NAN, f64::NAN), 0.0))
    })
    .with_exact_range(n_max as f64 + 1.0);
    let cert = crate::hps::check_weak_moderate(&coeffs, g).ok();
    if let Some((q, rr)) = cert {
        coeffs = coeffs.with_declared_cert(q, rr);
    }
    Ok((coeffs, cert))
}

#[derive(Debug)]
pub enum LiouvilleVerdict {
    Constant(GenComplex),
    NotConstant,
    Violated(String),
}

#[derive(Debug)]
pub struct LiouvilleReport {
    pub verdict: LiouvilleVerdict,
    /// |a_n| ≤ M/r^n held at every sampled radius for n = 1..=3.
    pub decay_ok: bool,
}

/// Liouville check: verify |f| ≤ M on the sampled circles, extract
/// coefficients at each radius, test the decay bound |a_n| ≤ M/r^n, and
/// declare constancy when a_1..a_4 at the largest radius are negligible.
pub fn liouville_check(
    f: &GhfNet,
    m_bound: &GenComplex,
    radii: &[GenComplex],
    g: &Gauge,
) -> Result<LiouvilleReport, GhfError> {
    let z0 = GenComplex::zero();
    // boundedness sample
    for r in radii {
        for j in 0..8 {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / 8.0;
            for p in g.tail().iter().step_by(9) {
                let w = r
                    .eval(p)
                    .mul(&Xc::from_c64(Complex64::from_polar(1.0, theta)));
                let v = f.eval(p, &w);
                if v.abs_log2() > m_bound.eval(p).abs_log2() + 1e-6 {
                    return Ok(LiouvilleReport {
                        verdict: LiouvilleVerdict::Violated(format!(
                            "|f| exceeds M at |w|=2^{:.2}, eps={:.3e}",
                            w.abs_log2(),
                            p.eps
                        )),
                        decay_ok: false,
                    });
                }
            }
        }
    }
    // coefficient decay across radii
    let mut decay_ok = true;
    let mut largest: Option<(HpsCoefficients, &GenComplex)> = None;
    for r in radii {
        let (coeffs, _) = goursat_coefficients(f, &z0, r, 4, g)?;
        for p in g.tail().iter().step_by(9) {
            let ml = m_bound.eval(p).abs_log2();
            let rl = r.eval(p).abs_log2();
            for n in 1..=3 {
                if coeffs.coeff(n as f64, p).abs_log2() > ml - n as f64 * rl + 1e-6 {
                    decay_ok = false;
                }
            }
        }
        let replace = match &largest {
            None => true,
            Some((_, rp)) => {
                let p = &g.tail()[0];
                r.eval(p).abs_log2() > rp.eval(p).abs_log2()
            }
        };
        if replace {
            largest = Some((coeffs, r));
        }
    }
    let (coeffs, _) = largest.ok_or_else(|| GhfError::Precondition("empty radii list".into()))?;
    let all_negligible = (1..=4).all(|n| {
        let c = coeffs.clone();
        let net = GenComplex::from_fn(format!("a{n}"), move |p| c.coeff(n as f64, p));
        matches!(valuation(&net, g).class, NetClass::Negligible)
    });
    let verdict = if all_negligible {
        let c = coeffs.clone();
        LiouvilleVerdict::Constant(GenComplex::from_fn("a0", move |p| c.coeff(0.0, p)))
    } else {
        LiouvilleVerdict::NotConstant
    };
    Ok(LiouvilleReport { verdict, decay_ok })
}

#[derive(Debug)]
pub enum ZeroIsolation {
    /// f = (z−z0)^m · g with g invertible on B_r(z0) restricted to the grid
    /// subset; per-point isolation radii are reported as (grid idx, log2 r).
    IsolatedOnSubpoint {
        m: usize,
        points: Vec<(usize, f64)>,
    },
    /// All probed derivatives negligible: f locally null to the horizon.
    NotApplicable,
}

/// Zero isolation at z0: f(z0) must be negligible; the least derivative
/// order m ≤ N_PROBE with a non-negligible coefficient gives the
/// factorisation f = (z−z0)^m g, and per point an isolation radius below
/// which |g| ≥ |a_m|/2 (so g is invertible there).
pub fn zero_isolation(
    f: &GhfNet,
    z0: &GenComplex,
    r_quad: &GenComplex,
    g: &Gauge,
) -> Result<ZeroIsolation, GhfError> {
    let v0 = valuation(&f.at(z0), g);
    if !matches!(v0.class, NetClass::Negligible) {
        return Err(GhfError::Precondition(format!(
            "f(z0) is not negligible ({:?})",
            v0.class
        )));
    }
    let n_max = 16usize;
    let (coeffs, _) = goursat_coefficients(f, z0, r_quad, n_max, g)?;
    let mut m = None;
    for n in 1..=N_PROBE {
        let c = coeffs.clone();
        let net = GenComplex::from_fn(format!("a{n}"), move |p| c.coeff(n as f64, p));
        if !matches!(valuation(&net, g).class, NetClass::Negligible) {
            m = Some(n);
            break;
        }
    }
    let m = match m {
        Some(m) => m,
        None => return Ok(ZeroIsolation::NotApplicable),
    };
    // per-point isolation radius: largest sampled r with
    // Σ_{n>m} |a_n| r^{n−m} + (quadrature tail) ≤ |a_m|/2
    let mut points = Vec::new();
    for p in g.tail() {
        let am = coeffs.coeff(m as f64, p).abs_log2();
        if am <= (g.q_max as f64) * p.log2_rho {
            continue;
        }
        let rq = r_quad.eval(p).abs_log2();
        // crude bound on sup |f| over the contour, for the truncation tail
        let fsup = (0..=n_max)
            .map(|n| coeffs.coeff(n as f64, p).abs_log2() + n as f64 * rq)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut found = None;
        let mut rl = rq - 1.0;
        for _ in 0..600 {
            let sum = {
                let mut s = f64::NEG_INFINITY;
                for n in (m + 1)..=n_max {
                    s = crate::xc::log2_add(
                        s,
                        coeffs.coeff(n as f64, p).abs_log2() + (n - m) as f64 * rl,
                    );
                }
                // geometric tail of |a_n| ≤ sup|f|/R^n beyond the table
                let h = rl - rq;
                s = crate::xc::log2_add(
                    s,
                    fsup - (m as f64) * rq + (n_max + 1 - m) as f64 * h - (1.0 - h.exp2()).log2(),
                );
                s
            };
            if sum <= am - 1.0 {
                found = Some(rl);
                break;
            }
            rl -= 1.0;
        }
        if let Some(rl) = found {
            points.push((p.idx, rl));
        }
    }
    if points.is_empty() {
        return Ok(ZeroIsolation::NotApplicable);
    }
    Ok(ZeroIsolation::IsolatedOnSubpoint { m, points })
}

/// A finite chain of disks B_{r_k}(c_k) with each next centre inside the
/// previous disk.
pub struct ContinuationChain {
    pub centers: Vec<GenComplex>,
    pub radii: Vec<GenComplex>,
}

impl ContinuationChain {
    pub fn validate(&self, g: &Gauge) -> Result<(), GhfError> {
        if self.centers.is_empty() || self.centers.len() != self.radii.len() {
            return Err(GhfError::Precondition(
                "chain needs equally many centres and radii".into(),
            ));
        }
        for k in 0..self.centers.len() - 1 {
            let gap = self.centers[k + 1].sub(&self.centers[k]);
            for p in g.tail() {
                if gap.eval(p).abs_log2() >= self.radii[k].eval(p).abs_log2() {
                    return Err(GhfError::Precondition(format!(
                        "centre {} escapes disk {} at eps={:.3e}",
                        k + 1,
                        k,
                        p.eps
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug)]
pub enum ContinuationOutcome {
    NullAlongChain,
    /// Disk k is not inside the set where the expansion converges (sampled
    /// values of f there are not a moderate net).
    Obstructed { k: usize, diagnostic: String },
    /// The first disk already carries a non-negligible derivative of order
    /// m: the zero set cannot accumulate, nullity fails at the start.
    CaseIConflict { m: usize },
}

fn disk_samples(c: &GenComplex, r: &GenComplex, j: usize) -> GenComplex {
    let theta = 2.0 * std::f64::consts::PI * (j % 8) as f64 / 8.0;
    let scale = if j < 8 { 0.9 } else { 0.45 };
    c.add(&r.mul(&GenComplex::constant(
        format!("s{j}"),
        Complex64::from_polar(scale, theta),
    )))
}

/// Continuation of nullity along a chain: the zero sequence accumulates at
/// c_1 with f negligible on it, f must then vanish on the first disk
/// (Case I) and the nullity propagates disk by disk as long as each disk
/// stays where the expansion of f converges (Case II).
pub fn identity_continuation(
    f: &GhfNet,
    chain: &ContinuationChain,
    zeros_seq: &HyperSequence,
    g: &Gauge,
) -> Result<ContinuationOutcome, GhfError> {
    chain.validate(g)?;
    // precondition: z_j → c_1, z_j ≠ c_1, f(z_j) negligible (sampled j)
    let c1 = &chain.centers[0];
    for j in [1.0, 2.0, 4.0, 8.0, 16.0] {
        let s = zeros_seq.clone();
        let zj = GenComplex::from_fn(format!("z{j}"), move |p| s.at(j, p));
        let gap = valuation(&zj.sub(c1), g);
        if matches!(gap.class, NetClass::NonModerate | NetClass::Indeterminate) {
            return Err(GhfError::Precondition(
                "zero sequence does not approach the first centre".into(),
            ));
        }
        let fz = valuation(&f.at(&zj), g);
        if !matches!(fz.class, NetClass::Negligible) {
            return Err(GhfError::Precondition(format!(
                "f is not negligible on the zero sequence (j={j}, {:?})",
                fz.class
            )));
        }
    }
    for k in 0..chain.centers.len() {
        let (c, r) = (&chain.centers[k], &chain.radii[k]);
        let mut all_null = true;
        for j in 0..16 {
            let z = disk_samples(c, r, j);
            match valuation(&f.at(&z), g).class {
                NetClass::Negligible => {}
                NetClass::Moderate(_) => all_null = false,
                _ => {
                    return Ok(ContinuationOutcome::Obstructed {
                        k,
                        diagnostic: format!(
                            "f is not moderate on disk {k} (sample {j}): the disk escapes \
                             the set where the expansion converges"
                        ),
                    });
                }
            }
        }
        if !all_null {
            if k == 0 {
                // Case I contradiction: locate the offending derivative order
                let (coeffs, _) = goursat_coefficients(f, c, r, N_PROBE, g)?;
                for n in 0..=N_PROBE {
                    let cc = coeffs.clone();
                    let net = GenComplex::from_fn(format!("a{n}"), move |p| cc.coeff(n as f64, p));
                    if !matches!(valuation(&net, g).class, NetClass::Negligible) {
                        return Ok(ContinuationOutcome::CaseIConflict { m: n });
                    }
                }
                return Ok(ContinuationOutcome::CaseIConflict { m: 0 });
            }
            return Ok(ContinuationOutcome::Obstructed {
                k,
                diagnostic: format!("nullity broke on disk {k} despite moderate samples"),
            });
        }
    }
    Ok(ContinuationOutcome::NullAlongChain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hps::{builtin, eval_hps, BuiltinFamily};

    fn g() -> Gauge {
        Gauge::default()
    }

    #[test]
    fn cr_residual_flags_non_holomorphic() {
        let gauge = g();
        let z = GenComplex::constant("0.3+0.2i", Complex64::new(0.3, 0.2));
        for f in [GhfNet::geometric_kernel(), GhfNet::exponential()] {
            let res = cr_residual(&f, &z, &gauge);
            assert!(res < 1e-4, "{}: residual {res}", f.label);
        }
        // the delta net varies on the rho scale; at standard points its
        // argument z/rho is so large that f64 cannot represent the probe
        // step, so holomorphy is probed at an infinitesimal point
        let zi = GenComplex::drho().mul(&z);
        let res = cr_residual(&GhfNet::dirac_delta(), &zi, &gauge);
        assert!(res < 1e-4, "delta: residual {res}");
        let conj = GhfNet::from_fn("conj", |_, w| w.conj());
        assert!(cr_residual(&conj, &z, &gauge) > 0.5);
    }

    #[test]
    fn goursat_geometric_and_exp() {
        let gauge = g();
        let half = GenComplex::constant("1/2", Complex64::new(0.5, 0.0));
        let (coeffs, cert) =
            goursat_coefficients(&GhfNet::geometric_kernel(), &GenComplex::zero(), &half, 12, &gauge)
                .unwrap();
        assert_eq!(cert, Some((0, 0)));
        for p in gauge.tail().iter().step_by(9) {
            for n in 0..=12 {
                assert!(
                    coeffs.coeff(n as f64, p).rel_dist(&Xc::ONE) < 1e-10,
                    "n={n}"
                );
            }
        }
        // radius 4 keeps a_n·R^n comparable to sup|f|, so the high orders
        // stay above the cancellation noise floor
        let four = GenComplex::constant("4", Complex64::new(4.0, 0.0));
        let (coeffs, _) =
            goursat_coefficients(&GhfNet::exponential(), &GenComplex::zero(), &four, 12, &gauge)
                .unwrap();
        for p in gauge.tail().iter().step_by(9) {
            for n in 0..=12 {
                let want = Xc::two_pow(-crate::hps::log2_factorial(n as f64));
                assert!(coeffs.coeff(n as f64, p).rel_dist(&want) < 1e-9, "n={n}");
            }
        }
    }

    #[test]
    fn goursat_delta_matches_builtin() {
        let gauge = g();
        let (coeffs, _) = goursat_coefficients(
            &GhfNet::dirac_delta(),
            &GenComplex::zero(),
            &GenComplex::drho(),
            10,
            &gauge,
        )
        .unwrap();
        let reference = builtin(BuiltinFamily::DiracDelta);
        for p in gauge.tail().iter().step_by(9) {
            for n in 0..=10 {
                let got = coeffs.coeff(n as f64, p);
                let want = reference.coeff(n as f64, p);
                if want.is_zero() {
                    // odd orders: quadrature noise sits far below a_{n±1}
                    assert!(
                        got.abs_log2()
                            < reference.coeff((n + 1) as f64, p).abs_log2() - 20.0,
                        "n={n}"
                    );
                } else {
                    // the relative noise floor grows with n (the mollifier
                    // coefficients decay like 1/n! against O(1) contour values)
                    assert!(got.rel_dist(&want) < 1e-4, "n={n} eps={:.3e}", p.eps);
                }
            }
        }
    }

    #[test]
    fn goursat_round_trip_and_radius_independence() {
        let gauge = g();
        let f = GhfNet::geometric_kernel();
        let half = GenComplex::constant("1/2", Complex64::new(0.5, 0.0));
        let quarter = GenComplex::constant("1/4", Complex64::new(0.25, 0.0));
        let (c1, cert) = goursat_coefficients(&f, &GenComplex::zero(), &half, 256, &gauge).unwrap();
        let (c2, _) = goursat_coefficients(&f, &GenComplex::zero(), &quarter, 10, &gauge).unwrap();
        // Q = 0 is recovered; R may absorb quadrature noise near the
        // cancellation floor
        assert_eq!(cert.unwrap().0, 0);
        assert!(cert.unwrap().1 <= 1);
        // radius independence at float accuracy
        for p in gauge.tail().iter().step_by(9) {
            for n in 0..=10 {
                assert!(c1.coeff(n as f64, p).rel_dist(&c2.coeff(n as f64, p)) < 1e-9);
            }
        }
        // round trip: evaluating the extracted series reproduces f inside
        // the disk (|z| small enough that the certificate-derived tail
        // bound certifies a truncation within the resolved table)
        let z = GenComplex::constant("0.05+0.05i", Complex64::new(0.05, 0.05));
        let l = eval_hps(&c1, &GenComplex::zero(), &z, &gauge).unwrap();
        assert!(l.approx_equals(&f.at(&z), 1e-9, &gauge));
    }

    #[test]
    fn liouville_verdicts() {
        let gauge = g();
        // constant net: constant verdict with the right value
        let c = Complex64::new(3.0, 4.0);
        let m6 = GenComplex::constant("6", Complex64::new(6.0, 0.0));
        let radii = [GenComplex::drho_pow(-12.0), GenComplex::drho_pow(-6.0)];
        let rep = liouville_check(&GhfNet::constant(c), &m6, &radii, &gauge).unwrap();
        assert!(rep.decay_ok);
        match rep.verdict {
            LiouvilleVerdict::Constant(v) => {
                assert!(v.approx_equals(&GenComplex::constant("c", c), 1e-12, &gauge))
            }
            other => panic!("expected constant, got {other:?}"),
        }
        // cos(rho w): bounded on |w| ≤ rho^{-1/2}, decay bound holds, but
        // it is not constant (a_2 = -rho^2/2 is not negligible)
        let cosr = GhfNet::from_fn("cos(rho w)", |p, w| {
            let u = w.mul(&Xc::two_pow(p.log2_rho)).to_c64();
            Xc::from_c64(u.cos())
        });
        let m2 = GenComplex::constant("2", Complex64::new(2.0, 0.0));
        let radii = [GenComplex::drho_pow(-0.25), GenComplex::drho_pow(-0.5)];
        let rep = liouville_check(&cosr, &m2, &radii, &gauge).unwrap();
        assert!(rep.decay_ok);
        assert!(matches!(rep.verdict, LiouvilleVerdict::NotConstant));
        // f(w) = w is unbounded: violated
        let idw = GhfNet::from_fn("w", |_, w| *w);
        let rep = liouville_check(&idw, &m6, &radii, &gauge).unwrap();
        assert!(matches!(rep.verdict, LiouvilleVerdict::Violated(_)));
    }

    #[test]
    fn zero_isolation_examples() {
        let gauge = g();
        let one = GenComplex::constant("1", Complex64::new(1.0, 0.0));
        // w^2: double zero, isolated on the whole grid
        let sq = GhfNet::from_fn("w^2", |_, w| w.mul(w));
        match zero_isolation(&sq, &GenComplex::zero(), &one, &gauge).unwrap() {
            ZeroIsolation::IsolatedOnSubpoint { m, points } => {
                assert_eq!(m, 2);
                assert_eq!(points.len(), gauge.tail().len());
                assert!(points.iter().all(|(_, rl)| *rl >= -6.0));
            }
            other => panic!("expected isolation, got {other:?}"),
        }
        // w(w - drho): simple zero at 0, isolated below the drho scale
        let f = GhfNet::from_fn("w(w-drho)", |p, w| {
            w.mul(&w.sub(&Xc::two_pow(p.log2_rho)))
        });
        match zero_isolation(&f, &GenComplex::zero(), &one, &gauge).unwrap() {
            ZeroIsolation::IsolatedOnSubpoint { m, points } => {
                assert_eq!(m, 1);
                for (idx, rl) in &points {
                    let p = &gauge.grid[*idx];
                    assert!(*rl <= p.log2_rho, "r must sit below the drho scale");
                    assert!(*rl >= p.log2_rho - 8.0);
                }
            }
            other => panic!("expected isolation, got {other:?}"),
        }
        // delta at a finite point: everything negligible to the probe horizon
        let z3 = GenComplex::constant("3", Complex64::new(3.0, 0.0));
        let out =
            zero_isolation(&GhfNet::dirac_delta(), &z3, &GenComplex::drho(), &gauge).unwrap();
        assert!(matches!(out, ZeroIsolation::NotApplicable));
    }

    #[test]
    fn identity_continuation_examples() {
        let gauge = g();
        let one = GenComplex::constant("1", Complex64::new(1.0, 0.0));
        // the zero net is null along any admissible chain
        let zero_net = GhfNet::from_fn("0", |_, _| Xc::ZERO);
        let chain = ContinuationChain {
            centers: vec![GenComplex::zero(), GenComplex::constant("0.5", Complex64::new(0.5, 0.0))],
            radii: vec![one.clone(), one.clone()],
        };
        let zs = HyperSequence::from_fn("z_j", |j, p| {
            Xc::two_pow(11.0 * p.log2_rho).mul_f64(1.0 / (j + 1.0))
        });
        let out = identity_continuation(&zero_net, &chain, &zs, &gauge).unwrap();
        assert!(matches!(out, ContinuationOutcome::NullAlongChain));
        // delta, chain 1 → 0 with standard radii: disk 1 already escapes
        // the set where the expansion converges (complex samples blow up)
        let delta = GhfNet::dirac_delta();
        let chain = ContinuationChain {
            centers: vec![one.clone(), GenComplex::zero()],
            radii: vec![
                GenComplex::constant("1.25", Complex64::new(1.25, 0.0)),
                one.clone(),
            ],
        };
        let zs = HyperSequence::from_fn("1+rho^11/j", |j, p| {
            Xc::ONE.add(&Xc::two_pow(11.0 * p.log2_rho).mul_f64(1.0 / (j + 1.0)))
        });
        match identity_continuation(&delta, &chain, &zs, &gauge).unwrap() {
            ContinuationOutcome::Obstructed { k, .. } => assert_eq!(k, 0),
            other => panic!("expected obstruction, got {other:?}"),
        }
        // delta stays null along an infinitesimal chain near 1
        let chain = ContinuationChain {
            centers: vec![one.clone()],
            radii: vec![GenComplex::drho_pow(3.0)],
        };
        let out = identity_continuation(&delta, &chain, &zs, &gauge).unwrap();
        assert!(matches!(out, ContinuationOutcome::NullAlongChain));
        // f(w) = w with a negligible zero sequence: Case I contradiction
        // at derivative order 1
        let idw = GhfNet::from_fn("w", |_, w| *w);
        let chain = ContinuationChain {
            centers: vec![GenComplex::zero()],
            radii: vec![one.clone()],
        };
        let zs = HyperSequence::from_fn("rho^11/j", |j, p| {
            Xc::two_pow(11.0 * p.log2_rho).mul_f64(1.0 / (j + 1.0))
        });
        match identity_continuation(&idw, &chain, &zs, &gauge).unwrap() {
            ContinuationOutcome::CaseIConflict { m } => assert_eq!(m, 1),
            other => panic!("expected case-I conflict, got {other:?}"),
        }
        // chain invariant violation is an error before any evaluation
        let bad = ContinuationChain {
            centers: vec![GenComplex::zero(), GenComplex::constant("5", Complex64::new(5.0, 0.0))],
            radii: vec![one.clone(), one.clone()],
        };
        assert!(matches!(
            identity_continuation(&idw, &bad, &zs, &gauge),
            Err(GhfError::Precondition(_))
        ));
    }
}

