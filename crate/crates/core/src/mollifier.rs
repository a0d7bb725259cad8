//! The engine's standard mollifier pair (μ, β).
//!
//! β is a C^23 plateau bump: the indicator of [−3/4, 3/4] convolved with the
//! density of a sum of 24 iid U[−1/96, 1/96] variables (an order-24 cardinal
//! B-spline rescaled).  It satisfies β ≡ 1 on [−1/2, 1/2], supp β ⊆ [−1, 1],
//! 0 ≤ β ≤ 1, and is even.  Its inverse Fourier transform has the closed
//! form μ(u) = (c/π)·sinc(cu)·sinc(au)^24 with c = 3/4, a = 1/96, giving
//! ∫μ = β(0) = 1, entire extension with |μ(z)| ≤ (c/π)e^{|z|}, Taylor
//! coefficients |μ^{(n)}(0)/n!| ≤ (c/π)(e/n)^n, and the real-axis decay
//! |μ(u)| ≤ (1/π)|u|^{-1}(a|u|)^{-24}, so ∫_{|u|>T}|μ| ≤ (96^24/(24π))T^{-24}.
//!
//! β is evaluated through B-spline CDFs (positive Cox–de Boor recursion, no
//! cancellation); the Taylor coefficients of μ come from convolving the sinc
//! Maclaurin series, cross-checkable against moments of β.

use crate::xc::Xc;
use num_complex::Complex64;
use once_cell::sync::Lazy;
use std::f64::consts::PI;

/// Indicator half-width.
pub const C: f64 = 0.75;
/// Uniform smoothing half-width.
pub const A: f64 = 1.0 / 96.0;
/// Number of uniform smoothing factors.
pub const M_SMOOTH: u32 = 24;
/// Number of stored Taylor coefficients of μ (even orders only are nonzero).
pub const TAYLOR_LEN: usize = 171;

/// Cardinal B-spline B_m (density of a sum of m iid U[0,1]; support [0, m]),
/// evaluated by the Cox–de Boor recursion, which is positive and stable.
pub fn bspline(m: u32, x: f64) -> f64 {
    if !(x > 0.0 && x < m as f64) {
        return 0.0;
    }
    let m = m as usize;
    let mut vals = vec![0.0f64; m];
    let idx = (x.floor() as usize).min(m - 1);
    vals[idx] = 1.0;
    for k in 2..=m {
        for i in 0..=(m - k) {
            let t = x - i as f64;
            vals[i] = (t * vals[i] + (k as f64 - t) * vals[i + 1]) / (k as f64 - 1.0);
        }
    }
    vals[0]
}

/// CDF of the cardinal B-spline: ∫_{-∞}^x B_m = Σ_{j≥0} B_{m+1}(x − j).
pub fn bspline_cdf(m: u32, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= m as f64 {
        return 1.0;
    }
    let mut s = 0.0;
    let mut j = 0.0;
    while x - j > 0.0 {
        s += bspline(m + 1, x - j);
        j += 1.0;
    }
    s
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0 + x * x * x * x / 120.0
    } else {
        x.sin() / x
    }
}

fn sinc_c(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        Complex64::new(1.0, 0.0) - z * z / 6.0
    } else {
        z.sin() / z
    }
}

/// Maclaurin coefficients of sinc in powers of x²: (−1)^m h^{2m}/(2m+1)!.
fn sinc_series(h: f64, len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    let mut term = 1.0f64;
    for (m, o) in out.iter_mut().enumerate() {
        *o = term;
        let k = 2.0 * m as f64;
        term *= -h * h / ((k + 2.0) * (k + 3.0));
    }
    out
}

fn convolve_trunc(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for (i, &x) in a.iter().enumerate().take(len) {
        for (j, &y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

pub struct Mollifier {
    /// μ^{(2m)}(0)/(2m)! for 2m < TAYLOR_LEN (odd orders vanish).
    even_taylor: Vec<f64>,
}

static STANDARD: Lazy<Mollifier> = Lazy::new(|| {
    let len = TAYLOR_LEN / 2 + 1;
    let mut acc = sinc_series(C, len);
    let sa = sinc_series(A, len);
    for _ in 0..M_SMOOTH {
        acc = convolve_trunc(&acc, &sa, len);
    }
    for v in acc.iter_mut() {
        *v *= C / PI;
    }
    Mollifier { even_taylor: acc }
});

impl Mollifier {
    pub fn standard() -> &'static Mollifier {
        &STANDARD
    }

    /// The transform-side plateau profile.
    pub fn beta(&self, v: f64) -> f64 {
        // β(v) = G(v+c) − G(v−c), G(y) = CDF of the smoothing density
        let g = |y: f64| bspline_cdf(M_SMOOTH, y / (2.0 * A) + M_SMOOTH as f64 / 2.0);
        (g(v + C) - g(v - C)).clamp(0.0, 1.0)
    }

    /// The kernel on the real line.
    pub fn mu(&self, u: f64) -> f64 {
        (C / PI) * sinc(C * u) * sinc(A * u).powi(M_SMOOTH as i32)
    }

    /// Entire extension of the kernel.
    pub fn mu_complex(&self, z: Complex64) -> Complex64 {
        sinc_c(C * z) * sinc_c(A * z).powu(M_SMOOTH) * (C / PI)
    }

    /// μ^{(n)}(0)/n! — exact-series value (0 for odd n; panics beyond the
    /// stored range).
    pub fn taylor(&self, n: usize) -> f64 {
        assert!(n < TAYLOR_LEN, "taylor order {n} beyond stored range");
        if n % 2 == 1 {
            0.0
        } else {
            self.even_taylor[n / 2]
        }
    }

    /// Certified log2 bound on |μ^{(n)}(0)/n!| from |μ(z)| ≤ (c/π)e^{|z|}
    /// on the circle |z| = n (Cauchy estimate).
    pub fn log2_taylor_bound(n: f64) -> f64 {
        let n = n.max(1.0);
        (C / PI).log2() + n * (1.0 / std::f64::consts::LN_2 - n.log2())
    }

    /// Certified log2 bound on ∫_{|u|>T} |μ(u)| du, valid for T ≥ 1/a.
    pub fn log2_tail_integral(log2_t: f64) -> f64 {
        // 2 · (1/π) a^{-24} T^{-24}/24
        1.0 - PI.log2() - (24f64).log2() - 24.0 * A.log2() - 24.0 * log2_t
    }

    /// ∫ μ(u) du over the whole line is exactly β(0) = 1; this returns a
    /// quadrature value for cross-checks.
    pub fn l1_norm(&self) -> f64 {
        L1_NORM_CACHE.0
    }

    /// ∫ |μ(u)| du (finite; needed by transform-decay estimates).
    pub fn l1_abs_norm(&self) -> f64 {
        L1_NORM_CACHE.1
    }

    /// ∫ μ(u)² du, computed on the transform side as (1/2π)∫β² (no
    /// oscillatory integrand).
    pub fn l2_norm_sq(&self) -> f64 {
        L2_NORM_SQ_CACHE.0
    }

    /// μ^{(n)}(x) for the entire extension via a trapezoid contour of radius
    /// 1 around x (exponentially convergent for analytic integrands).
    pub fn derivative(&self, x: f64, order: u32) -> Complex64 {
        contour_derivative(|z| self.mu_complex(z), Complex64::new(x, 0.0), order, 1.0)
    }

    /// Kernel value in extended-exponent arithmetic: usable at arguments
    /// where e^{|Im z|} overflows f64 (the kernel grows exponentially off
    /// the real axis).
    pub fn mu_xc(&self, z: Complex64) -> Xc {
        xc_sinc(C * z)
            .mul(&xc_sinc(A * z).pow_nat(M_SMOOTH as f64))
            .mul_f64(C / PI)
    }

    /// First derivative of the kernel in extended-exponent arithmetic
    /// (product rule over the sinc factors).
    pub fn mu_prime_xc(&self, z: Complex64) -> Xc {
        let sc = xc_sinc(C * z);
        let sa = xc_sinc(A * z);
        let t1 = xc_sinc_prime(C * z).mul_f64(C).mul(&sa.pow_nat(M_SMOOTH as f64));
        let t2 = xc_sinc_prime(A * z)
            .mul_f64(M_SMOOTH as f64 * A)
            .mul(&sa.pow_nat(M_SMOOTH as f64 - 1.0))
            .mul(&sc);
        t1.add(&t2).mul_f64(C / PI)
    }
}

/// sin in extended-exponent arithmetic: exact for huge |Im z| where the
/// f64 result would overflow.
pub fn xc_sin(z: Complex64) -> Xc {
    if z.im.abs() <= 20.0 {
        return Xc::from_c64(z.sin());
    }
    // sin z = (e^{iz} − e^{−iz}) / 2i, each factor kept in log2 scale
    let log2_e = std::f64::consts::LOG2_E;
    let up = Xc::new(Complex64::from_polar(1.0, z.re), -z.im * log2_e);
    let dn = Xc::new(Complex64::from_polar(1.0, -z.re), z.im * log2_e);
    up.sub(&dn).div(&Xc::from_c64(Complex64::new(0.0, 2.0)))
}

/// cos in extended-exponent arithmetic.
pub fn xc_cos(z: Complex64) -> Xc {
    if z.im.abs() <= 20.0 {
        return Xc::from_c64(z.cos());
    }
    let log2_e = std::f64::consts::LOG2_E;
    let up = Xc::new(Complex64::from_polar(1.0, z.re), -z.im * log2_e);
    let dn = Xc::new(Complex64::from_polar(1.0, -z.re), z.im * log2_e);
    up.add(&dn).mul_f64(0.5)
}

/// sinc in extended-exponent arithmetic.
pub fn xc_sinc(z: Complex64) -> Xc {
    if z.norm() < 1e-4 {
        return Xc::from_c64(sinc_c(z));
    }
    xc_sin(z).div(&Xc::from_c64(z))
}

/// sinc′(z) = (cos z − sinc z)/z in extended-exponent arithmetic.
pub fn xc_sinc_prime(z: Complex64) -> Xc {
    if z.norm() < 1e-4 {
        // −z/3 + z³/30 + O(z⁵)
        return Xc::from_c64(-z / 3.0 + z * z * z / 30.0);
    }
    xc_cos(z).sub(&xc_sinc(z)).div(&Xc::from_c64(z))
}

/// n-th derivative by the trapezoid rule on a circle of the given radius;
/// node count doubles until two successive levels agree to 1e-12 relative.
pub fn contour_derivative(
    f: impl Fn(Complex64) -> Complex64,
    z0: Complex64,
    order: u32,
    radius: f64,
) -> Complex64 {
    let coeff = contour_taylor_coeff(&f, z0, order, radius);
    let mut fact = 1.0f64;
    for k in 2..=order as u64 {
        fact *= k as f64;
    }
    coeff * fact
}

/// Taylor coefficient a_n = f^{(n)}(z0)/n! by the trapezoid contour rule.
pub fn contour_taylor_coeff(
    f: &dyn Fn(Complex64) -> Complex64,
    z0: Complex64,
    order: u32,
    radius: f64,
) -> Complex64 {
    let mut nodes = 64usize.max(4 * order as usize);
    let mut prev: Option<Complex64> = None;
    loop {
        let mut s = Complex64::new(0.0, 0.0);
        for k in 0..nodes {
            let th = 2.0 * PI * k as f64 / nodes as f64;
            let w = Complex64::from_polar(radius, th);
            // f(z0 + w)·w^{-n}: evaluate w^{-n} in polar form to avoid
            // overflow for large n and small radius
            let wn = Complex64::from_polar(radius.powi(-(order as i32)), -(order as f64) * th);
            s += f(z0 + w) * wn;
        }
        s /= nodes as f64;
        if let Some(p) = prev {
            if (s - p).norm() <= 1e-12 * s.norm().max(1e-300) || nodes >= 4096 {
                return s;
            }
        }
        prev = Some(s);
        nodes *= 2;
    }
}

static L1_NORM_CACHE: Lazy<(f64, f64)> = Lazy::new(|| {
    let m = Mollifier::standard();
    // integrate over [−T, T] with T = 4/a (tail beyond is ≤ (1/π)a^-24 T^-24/24·2 ≈ 1e-15)
    let t = 4.0 / A;
    let f = |u: f64| Complex64::new(m.mu(u), 0.0);
    let g = |u: f64| Complex64::new(m.mu(u).abs(), 0.0);
    let v = crate::oracle::quad(&f, -t, t).expect("mu quadrature").value;
    let va = crate::oracle::quad(&g, -t, t).expect("abs mu quadrature").value;
    (v.re, va.re + 2.0 * Mollifier::log2_tail_integral(t.log2()).exp2())
});

static L2_NORM_SQ_CACHE: Lazy<(f64,)> = Lazy::new(|| {
    let m = Mollifier::standard();
    let f = |w: f64| Complex64::new(m.beta(w) * m.beta(w), 0.0);
    let v = crate::oracle::quad(&f, -1.0, 1.0).expect("beta^2 quadrature").value;
    (v.re / (2.0 * PI),)
});
