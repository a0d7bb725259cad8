//! Independent brute-force reference computations: adaptive Gauss–Kronrod
//! quadrature, Richardson-extrapolated finite differences, and partial-sum
//! scans.  These back every derived expected value and the acceptance
//! cross-validation suite; they favour robustness over speed.

use num_complex::Complex64;

/// Gauss 7 / Kronrod 15 nodes and weights on [-1, 1] (symmetric half listed).
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// One G7/K15 panel: returns (kronrod value, |kronrod − gauss| error estimate).
fn gk15(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut resk = Complex64::new(0.0, 0.0);
    let mut resg = Complex64::new(0.0, 0.0);
    for j in 0..8 {
        let x = XGK[j] * h;
        let (fl, fr) = if j == 7 {
            let v = f(c);
            (v, Complex64::new(0.0, 0.0))
        } else {
            (f(c - x), f(c + x))
        };
        let s = if j == 7 { fl } else { fl + fr };
        resk += WGK[j] * s;
        // G7 nodes are the odd-indexed Kronrod nodes plus the centre (j = 7)
        if j % 2 == 1 {
            resg += WG[j / 2] * s;
        }
    }
    let val = resk * h;
    let err = (resk - resg).norm() * h;
    (val, err)
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub panels: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("quadrature budget exhausted: achieved error {achieved:.3e} > requested {requested:.3e} (value {value})")]
    QuadBudget {
        value: Complex64,
        achieved: f64,
        requested: f64,
    },
    #[error("finite-difference ladder did not converge: best error {0:.3e}")]
    FdDiverged(f64),
}

/// Adaptive Gauss–Kronrod quadrature of `f` over `[a, b]` to absolute
/// tolerance `tol_abs` or relative tolerance `tol_rel` (whichever is looser
/// against the running estimate), with a panel budget.
pub fn quad_reference(
    f: &dyn Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    tol_abs: f64,
    tol_rel: f64,
    max_panels: usize,
) -> Result<QuadResult, OracleError> {
    if a == b {
        return Ok(QuadResult {
            value: Complex64::new(0.0, 0.0),
            error_estimate: 0.0,
            panels: 0,
        });
    }
    // worklist of (a, b, value, err), refine worst panel first
    let (v0, e0) = gk15(f, a, b);
    let mut panels: Vec<(f64, f64, Complex64, f64)> = vec![(a, b, v0, e0)];
    loop {
        let total: Complex64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        // relative tolerance is measured against the L1 panel mass so that
        // integrals cancelling to ~0 terminate once the cancellation itself
        // is resolved to tol_rel
        let l1: f64 = panels.iter().map(|p| p.2.norm()).sum();
        let goal = tol_abs.max(tol_rel * total.norm().max(l1));
        if err <= goal {
            return Ok(QuadResult {
                value: total,
                error_estimate: err,
                panels: panels.len(),
            });
        }
        if panels.len() >= max_panels {
            return Err(OracleError::QuadBudget {
                value: total,
                achieved: err,
                requested: goal,
            });
        }
        // split the worst panel
        let (wi, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .unwrap();
        let (pa, pb, _, _) = panels.swap_remove(wi);
        let mid = 0.5 * (pa + pb);
        let (vl, el) = gk15(f, pa, mid);
        let (vr, er) = gk15(f, mid, pb);
        panels.push((pa, mid, vl, el));
        panels.push((mid, pb, vr, er));
    }
}

/// Convenience wrapper with the default oracle tolerances.
pub fn quad(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64) -> Result<QuadResult, OracleError> {
    quad_reference(f, a, b, 1e-300, 1e-13, 4000)
}

/// Richardson-extrapolated central finite difference of order `order` at `x`.
/// Returns (value, error estimate from the extrapolation tableau).
pub fn fd_derivative(
    f: &dyn Fn(f64) -> Complex64,
    x: f64,
    order: u32,
    h0: f64,
) -> Result<(Complex64, f64), OracleError> {
    assert!(order >= 1 && order <= 6);
    // central difference stencil coefficients for the first derivative are
    // applied recursively via the divided scheme: we use the standard
    // central-difference of f^{(order)} with step h, then Richardson in h².
    let central = |h: f64| -> Complex64 {
        match order {
            1 => (f(x + h) - f(x - h)) / (2.0 * h),
            2 => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
            3 => (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h.powi(3)),
            4 => {
                (f(x + 2.0 * h) - 4.0 * f(x + h) + 6.0 * f(x) - 4.0 * f(x - h) + f(x - 2.0 * h))
                    / h.powi(4)
            }
            5 => {
                (f(x + 3.0 * h) - 4.0 * f(x + 2.0 * h) + 5.0 * f(x + h) - 5.0 * f(x - h)
                    + 4.0 * f(x - 2.0 * h)
                    - f(x - 3.0 * h))
                    / (2.0 * h.powi(5))
            }
            _ => {
                (f(x + 3.0 * h) - 6.0 * f(x + 2.0 * h) + 15.0 * f(x + h) - 20.0 * f(x)
                    + 15.0 * f(x - h)
                    - 6.0 * f(x - 2.0 * h)
                    + f(x - 3.0 * h))
                    / h.powi(6)
            }
        }
    };
    let levels = 8usize;
    let mut tableau: Vec<Vec<Complex64>> = Vec::with_capacity(levels);
    let mut best = Complex64::new(0.0, 0.0);
    let mut best_err = f64::INFINITY;
    for i in 0..levels {
        let h = h0 / 2f64.powi(i as i32);
        let mut row = vec![central(h)];
        for j in 1..=i {
            let prev = tableau[i - 1][j - 1];
            let cur = row[j - 1];
            let fac = 4f64.powi(j as i32);
            row.push((fac * cur - prev) / (fac - 1.0));
        }
        if i > 0 {
            let err = (row[row.len() - 1] - tableau[i - 1][tableau[i - 1].len() - 1]).norm();
            if err < best_err {
                best_err = err;
                best = row[row.len() - 1];
            }
        }
        tableau.push(row);
    }
    if !best_err.is_finite() {
        return Err(OracleError::FdDiverged(best_err));
    }
    Ok((best, best_err))
}

/// Tail profile of a per-ε partial-sum scan.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TailProfile {
    pub last_partial: Complex64,
    /// index after which successive partial sums moved by < plateau_tol·|sum|
    pub plateau_at: Option<usize>,
    pub max_abs_partial: f64,
    pub monotone_growth: bool,
    pub terms_used: usize,
}

/// Scan partial sums of `term(n)` up to `budget` terms, detecting a plateau
/// (relative movement below `plateau_tol` sustained for 32 consecutive terms)
/// or monotone growth.
pub fn partial_sum_scan(
    term: &dyn Fn(usize) -> Complex64,
    budget: usize,
    plateau_tol: f64,
) -> TailProfile {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut comp = Complex64::new(0.0, 0.0); // Kahan compensation
    let mut plateau_at = None;
    let mut quiet = 0usize;
    let mut max_abs = 0.0f64;
    let mut prev_abs = 0.0f64;
    let mut monotone = true;
    for n in 0..budget {
        let t = term(n);
        let y = t - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
        let a = sum.norm();
        max_abs = max_abs.max(a);
        if n > 0 && a + 1e-300 < prev_abs {
            monotone = false;
        }
        prev_abs = a;
        if t.norm() <= plateau_tol * (a + 1e-300) {
            quiet += 1;
            if quiet >= 32 && plateau_at.is_none() {
                plateau_at = Some(n + 1 - quiet);
                break;
            }
        } else {
            quiet = 0;
        }
    }
    TailProfile {
        last_partial: sum,
        plateau_at,
        max_abs_partial: max_abs,
        monotone_growth: monotone && plateau_at.is_none(),
        terms_used: budget,
    }
}
