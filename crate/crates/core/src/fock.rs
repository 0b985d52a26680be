//! Inner product, norms and reproducing kernels of the quaternionic Fock
//! space, plus the regular exponential `e_*^{pq}`.

mod quadrature;

pub use quadrature::{quadrature_inner, QuadratureSpec};

use crate::error::{Error, Result};
use crate::quaternion::{Quaternion, UnitImaginary};
use crate::slice_series::QSeries;

/// Term cap for [`exp_star_series`].
pub const EXP_TERM_CAP: usize = 4096;

/// `<f, g> = sum n! conj(b_n) a_n`; right linear in `f`.
pub fn inner(f: &QSeries, g: &QSeries) -> Quaternion {
    let n = f.degree().min(g.degree());
    let mut acc = Quaternion::ZERO;
    // scale both sides by sqrt(n!) so large factorials never appear alone
    let mut s = 1.0;
    for k in 0..=n {
        if k > 0 {
            s *= (k as f64).sqrt();
        }
        acc += (g.coeff(k) * s).conj() * (f.coeff(k) * s);
    }
    acc
}

pub fn norm_sqr(f: &QSeries) -> f64 {
    let mut s = 1.0;
    let mut acc = 0.0;
    for (k, c) in f.coeffs().iter().enumerate() {
        if k > 0 {
            s *= (k as f64).sqrt();
        }
        acc += (*c * s).norm_sqr();
    }
    acc
}

pub fn norm(f: &QSeries) -> f64 {
    norm_sqr(f).sqrt()
}

/// Kernel center and truncation degree.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelParams {
    pub q: Quaternion,
    pub degree: usize,
}

impl KernelParams {
    pub fn new(q: Quaternion, degree: usize) -> Self {
        Self { q, degree }
    }

    /// Size of the first dropped coefficient, `|q|^(N+1) / (N+1)!`.
    pub fn tail_bound(&self) -> f64 {
        let x = self.q.norm();
        (1..=self.degree + 1).fold(1.0, |t, n| t * x / n as f64)
    }
}

/// `K_q(p) = sum p^n conj(q)^n / n!`, so that `<f, K_q> = f(q)`.
pub fn kernel(params: KernelParams) -> QSeries {
    QSeries::exponential(params.q.conj(), params.degree)
}

/// `k_q = K_q e^{-|q|^2/2}`, a unit vector up to truncation.
pub fn normalized_kernel(q: Quaternion, degree: usize) -> QSeries {
    let k = kernel(KernelParams::new(q, degree));
    k.mul_right(Quaternion::real((-0.5 * q.norm_sqr()).exp()))
}

/// `p^m K_u(p)`: evaluates the `m`-th derivative at `u` through the inner
/// product. The kernel is cut at `degree`, so the result has degree `degree + m`.
pub fn derivative_kernel(u: Quaternion, m: usize, degree: usize) -> QSeries {
    let k = kernel(KernelParams::new(u, degree));
    let mut c = vec![Quaternion::ZERO; m];
    c.extend_from_slice(k.coeffs());
    QSeries::new(c)
}

/// `d^m/dp^m f` at `q`, via coefficient differentiation.
pub fn derivative_at(f: &QSeries, m: usize, q: Quaternion) -> Quaternion {
    let n = f.degree();
    if m > n {
        return Quaternion::ZERO;
    }
    let c: Vec<Quaternion> = (m..=n)
        .map(|k| {
            let falling = ((k - m + 1)..=k).fold(1.0, |a, t| a * t as f64);
            f.coeff(k) * falling
        })
        .collect();
    crate::slice_series::eval_quaternion(&QSeries::new(c), q)
}

/// `sum p^n q^n / n!`, stopped once the remainder bound
/// `x^M/M! / (1 - x/(M+1))` with `x = |p||q|` drops below `tol`.
pub fn exp_star_series(p: Quaternion, q: Quaternion, tol: f64) -> Result<Quaternion> {
    let x = p.norm() * q.norm();
    let mut pn = Quaternion::ONE;
    let mut qn = Quaternion::ONE;
    let mut sum = Quaternion::ONE;
    // t = x^n / n! tracks the size of the next term
    let mut t = 1.0;
    for n in 1..EXP_TERM_CAP {
        let r = (n as f64).sqrt();
        pn = pn * p / r;
        qn = qn * q / r;
        sum += pn * qn;
        t *= x / n as f64;
        let m = (n + 1) as f64;
        let next = t * x / m;
        if x < m && next / (1.0 - x / (m + 1.0)) < tol {
            return Ok(sum);
        }
    }
    Err(Error::NoConvergenceBudget {
        tol,
        terms: EXP_TERM_CAP,
    })
}

/// `p = a + w b` with `b >= 0`; a real `p` takes the supplied unit.
fn polar(p: Quaternion, fallback: UnitImaginary) -> (f64, f64, Quaternion) {
    match UnitImaginary::new(p) {
        Ok(w) => (p.re(), p.im().norm(), w.quaternion()),
        Err(_) => (p.re(), 0.0, fallback.quaternion()),
    }
}

/// Closed form of `e_*^{pq}`. With `p = a + wb`, `q = c + hd` (`b, d >= 0`):
///
/// `e^{ac+bd}(cos(bc-ad) + w sin(bc-ad))(1 + wh)/2
///  + e^{ac-bd}(cos(bc+ad) + w sin(bc+ad))(1 - wh)/2`.
pub fn exp_star_closed(p: Quaternion, q: Quaternion) -> Quaternion {
    let (a, b, w, c, d, h) = match (UnitImaginary::new(p), UnitImaginary::new(q)) {
        (Ok(wp), Ok(hq)) => {
            let (a, b, w) = polar(p, wp);
            let (c, d, h) = polar(q, hq);
            (a, b, w, c, d, h)
        }
        (Ok(wp), Err(_)) => {
            let (a, b, w) = polar(p, wp);
            (a, b, w, q.re(), 0.0, w)
        }
        (Err(_), Ok(hq)) => {
            let (c, d, h) = polar(q, hq);
            (p.re(), 0.0, h, c, d, h)
        }
        (Err(_), Err(_)) => {
            let i = Quaternion::I;
            (p.re(), 0.0, i, q.re(), 0.0, i)
        }
    };
    let one = Quaternion::ONE;
    let wh = w * h;
    let t1 = b * c - a * d;
    let t2 = b * c + a * d;
    let e1 = (one * t1.cos() + w * t1.sin()) * (one + wh) * (0.5 * (a * c + b * d).exp());
    let e2 = (one * t2.cos() + w * t2.sin()) * (one - wh) * (0.5 * (a * c - b * d).exp());
    e1 + e2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slice_series::eval_quaternion;

    fn fact(n: usize) -> f64 {
        (1..=n).fold(1.0, |a, k| a * k as f64)
    }

    #[test]
    fn monomials_are_orthogonal() {
        for n in 0..12 {
            let p = QSeries::monomial(n, Quaternion::ONE);
            assert!(inner(&p, &p).max_abs_diff(Quaternion::real(fact(n))) <= 1e-14 * fact(n));
            assert!((norm(&p) - fact(n).sqrt()).abs() < 1e-12 * fact(n).sqrt());
        }
        let a = QSeries::monomial(2, Quaternion::ONE);
        let b = QSeries::monomial(3, Quaternion::ONE);
        assert_eq!(inner(&a, &b), Quaternion::ZERO);
        assert_eq!(norm(&QSeries::zero(4)), 0.0);
    }

    #[test]
    fn degree_one_pairing() {
        let a = Quaternion::new(0.2, 1.0, -0.5, 0.3);
        let b = Quaternion::new(-1.0, 0.4, 0.0, 2.0);
        let got = inner(&QSeries::monomial(1, a), &QSeries::monomial(1, b));
        assert!(got.max_abs_diff(b.conj() * a) < 1e-15);
    }

    #[test]
    fn kernel_basics() {
        assert_eq!(
            kernel(KernelParams::new(Quaternion::ZERO, 5)).coeff(0),
            Quaternion::ONE
        );
        assert!(kernel(KernelParams::new(Quaternion::ZERO, 5)).coeffs()[1..]
            .iter()
            .all(|c| *c == Quaternion::ZERO));
        let q = Quaternion::new(0.5, -1.0, 0.7, 0.2);
        let k = kernel(KernelParams::new(q, 60));
        let rel = (norm_sqr(&k) - q.norm_sqr().exp()).abs() / q.norm_sqr().exp();
        assert!(rel < 1e-12);
        assert!((norm(&normalized_kernel(q, 60)) - 1.0).abs() < 1e-12);
        assert!(KernelParams::new(q, 40).tail_bound() < 1e-40);
    }

    #[test]
    fn reproducing_property() {
        let f = QSeries::new(vec![
            Quaternion::new(0.1, 0.2, 0.3, 0.4),
            Quaternion::new(-0.5, 0.0, 0.6, 0.1),
            Quaternion::new(0.0, 0.9, -0.2, 0.0),
            Quaternion::new(0.3, 0.3, 0.3, -0.3),
        ]);
        let q = Quaternion::new(0.7, -1.2, 0.4, 0.9);
        let got = inner(&f, &kernel(KernelParams::new(q, 40)));
        assert!(got.max_abs_diff(eval_quaternion(&f, q)) < 1e-12);
    }

    #[test]
    fn derivative_kernels() {
        let m = 3;
        let p3 = derivative_kernel(Quaternion::ZERO, m, 10);
        assert_eq!(p3.logical_degree(), 3);
        assert_eq!(p3.coeff(3), Quaternion::ONE);
        let u = Quaternion::new(0.3, 0.1, -0.2, 0.5);
        assert_eq!(
            derivative_kernel(u, 0, 20),
            kernel(KernelParams::new(u, 20))
        );
        let f = QSeries::monomial(3, Quaternion::ONE);
        let got = inner(&f, &derivative_kernel(Quaternion::ONE, 1, 30));
        assert!(got.max_abs_diff(Quaternion::real(3.0)) < 1e-10);
        let g = QSeries::new(vec![
            Quaternion::I,
            Quaternion::J,
            Quaternion::K,
            Quaternion::ONE,
        ]);
        for m in 0..4 {
            let got = inner(&g, &derivative_kernel(u, m, 40));
            assert!(got.max_abs_diff(derivative_at(&g, m, u)) < 1e-12);
        }
    }

    #[test]
    fn exponential_examples() {
        let e = exp_star_series(Quaternion::I, Quaternion::J, 1e-16).unwrap();
        let want = Quaternion::new(1f64.cosh(), 0.0, 0.0, 1f64.sinh());
        assert!(e.max_abs_diff(want) < 1e-15);
        assert!(exp_star_closed(Quaternion::I, Quaternion::J).max_abs_diff(want) < 1e-15);
        assert_eq!(
            exp_star_series(Quaternion::ZERO, Quaternion::K, 1e-16).unwrap(),
            Quaternion::ONE
        );
        let p = Quaternion::real(0.7);
        let q = Quaternion::new(0.2, 0.0, 1.1, 0.0);
        let ordinary = exp_star_series(p * q, Quaternion::ONE, 1e-17).unwrap();
        assert!(exp_star_closed(p, q).max_abs_diff(ordinary) < 1e-14);
        assert!(matches!(
            exp_star_series(Quaternion::real(1e4), Quaternion::real(1e4), 1e-12),
            Err(Error::NoConvergenceBudget { .. })
        ));
    }

    #[test]
    fn closed_form_on_one_slice_is_ordinary_exponential() {
        // w = h gives e^{ac-bd}(cos(bc+ad) + w sin(bc+ad)) = e^{pq}
        let p = Quaternion::new(0.4, 0.0, -0.9, 0.0);
        let q = Quaternion::new(-1.1, 0.0, -0.3, 0.0);
        let (a, b, c, d): (f64, f64, f64, f64) = (0.4, 0.9, -1.1, 0.3);
        let w = Quaternion::new(0.0, 0.0, -1.0, 0.0);
        let t = b * c + a * d;
        let want = (Quaternion::ONE * t.cos() + w * t.sin()) * (a * c - b * d).exp();
        assert!(exp_star_closed(p, q).max_abs_diff(want) < 1e-14);
    }
}
