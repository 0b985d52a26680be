//! Truncated slice regular entire functions `f(p) = sum p^n a_n`.
//!
//! Two representations are kept: quaternion coefficients ([`QSeries`]) and the
//! split pair `f_I = F + G J` over a frame ([`SplitSeries`]).

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::AffineSymbol;
use crate::quaternion::{Frame, Quaternion, SlicePoint, UnitImaginary};

/// Degrees up to which composition uses cached binomial rows.
pub const PASCAL_MAX: usize = 128;

/// Power series with coefficients on the right. Always holds at least one
/// coefficient; `degree()` is the storage degree.
#[derive(Clone, Debug, PartialEq)]
pub struct QSeries {
    coeffs: Vec<Quaternion>,
}

impl QSeries {
    pub fn new(mut coeffs: Vec<Quaternion>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(Quaternion::ZERO);
        }
        Self { coeffs }
    }

    pub fn zero(degree: usize) -> Self {
        Self::new(vec![Quaternion::ZERO; degree + 1])
    }

    pub fn constant(c: Quaternion) -> Self {
        Self::new(vec![c])
    }

    /// `p^n a`.
    pub fn monomial(n: usize, a: Quaternion) -> Self {
        let mut c = vec![Quaternion::ZERO; n + 1];
        c[n] = a;
        Self::new(c)
    }

    /// `sum p^n x^n / n!` truncated at `degree`, for a real or slice scalar `x`.
    pub fn exponential(x: Quaternion, degree: usize) -> Self {
        let mut c = Vec::with_capacity(degree + 1);
        let mut t = Quaternion::ONE;
        for n in 0..=degree {
            if n > 0 {
                t = t * x / n as f64;
            }
            c.push(t);
        }
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[Quaternion] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Quaternion {
        self.coeffs.get(n).copied().unwrap_or(Quaternion::ZERO)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Largest `n` with a nonzero coefficient (0 for the zero series).
    pub fn logical_degree(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|c| *c != Quaternion::ZERO)
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == Quaternion::ZERO)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// Keeps coefficients up to `degree`, padding with zeros when shorter.
    pub fn truncated(&self, degree: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.resize(degree + 1, Quaternion::ZERO);
        Self::new(c)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    /// `f(p) a`.
    pub fn mul_right(&self, a: Quaternion) -> Self {
        Self::new(self.coeffs.iter().map(|c| *c * a).collect())
    }

    /// Multiplies every coefficient by `a` on the left.
    pub fn mul_left(&self, a: Quaternion) -> Self {
        Self::new(self.coeffs.iter().map(|c| a * *c).collect())
    }

    /// Largest coefficient difference, zero-padding the shorter series.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n).fold(0.0, |m, k| m.max((self.coeff(k) - other.coeff(k)).norm()))
    }

    pub fn to_record(&self) -> SeriesRecord {
        SeriesRecord {
            degree: self.degree(),
            coefficients: self.coeffs.iter().map(|c| c.to_array()).collect(),
        }
    }

    pub fn from_record(r: &SeriesRecord) -> Result<Self> {
        if r.coefficients.len() != r.degree + 1 {
            return Err(Error::Config(format!(
                "series record declares degree {} but has {} coefficients",
                r.degree,
                r.coefficients.len()
            )));
        }
        Ok(Self::new(
            r.coefficients
                .iter()
                .map(|a| Quaternion::from_array(*a))
                .collect(),
        ))
    }
}

/// Serialized form of a series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesRecord {
    pub degree: usize,
    pub coefficients: Vec<[f64; 4]>,
}

/// `f_I(z) = F(z) + G(z) J` with complex coefficient sequences of equal length.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitSeries {
    frame: Frame,
    f: Vec<Complex64>,
    g: Vec<Complex64>,
}

impl SplitSeries {
    pub fn new(frame: Frame, mut f: Vec<Complex64>, mut g: Vec<Complex64>) -> Self {
        let n = f.len().max(g.len()).max(1);
        f.resize(n, Complex64::new(0.0, 0.0));
        g.resize(n, Complex64::new(0.0, 0.0));
        Self { frame, f, g }
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn f(&self) -> &[Complex64] {
        &self.f
    }

    pub fn g(&self) -> &[Complex64] {
        &self.g
    }

    pub fn degree(&self) -> usize {
        self.f.len() - 1
    }

    pub fn truncated(&self, degree: usize) -> Self {
        let mut f = self.f.clone();
        let mut g = self.g.clone();
        f.resize(degree + 1, Complex64::new(0.0, 0.0));
        g.resize(degree + 1, Complex64::new(0.0, 0.0));
        Self::new(self.frame, f, g)
    }

    pub fn is_zero(&self) -> bool {
        self.f.iter().chain(&self.g).all(|c| c.norm_sqr() == 0.0)
    }
}

pub fn to_split(f: &QSeries, frame: Frame) -> SplitSeries {
    let (a, b): (Vec<_>, Vec<_>) = f.coeffs().iter().map(|c| frame.split(*c)).unzip();
    SplitSeries::new(frame, a, b)
}

pub fn to_qseries(s: &SplitSeries) -> QSeries {
    QSeries::new(
        s.f.iter()
            .zip(&s.g)
            .map(|(a, b)| s.frame.join(*a, *b))
            .collect(),
    )
}

/// Cauchy product of two complex sequences, full length.
pub fn convolve(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn conj_all(a: &[Complex64]) -> Vec<Complex64> {
    a.iter().map(|c| c.conj()).collect()
}

/// Regular product: `sum p^n sum_r a_r b_{n-r}`, degree `deg f + deg g`.
pub fn star(f: &QSeries, g: &QSeries) -> QSeries {
    let a = f.coeffs();
    let b = g.coeffs();
    let mut out = vec![Quaternion::ZERO; a.len() + b.len() - 1];
    for (r, x) in a.iter().enumerate() {
        for (s, y) in b.iter().enumerate() {
            out[r + s] += *x * *y;
        }
    }
    QSeries::new(out)
}

/// Regular product in split form: with `f = F + GJ`, `g = H + KJ`, returns
/// `(FH - G conj(K)) + (FK + G conj(H)) J`, conjugation acting on coefficients.
pub fn star_split(f: &SplitSeries, g: &SplitSeries) -> Result<SplitSeries> {
    if !f.frame.same_slice(&g.frame) {
        return Err(Error::SliceMismatch);
    }
    let hk = conj_all(&g.g);
    let hc = conj_all(&g.f);
    let ff: Vec<_> = convolve(&f.f, &g.f)
        .into_iter()
        .zip(convolve(&f.g, &hk))
        .map(|(x, y)| x - y)
        .collect();
    let gg: Vec<_> = convolve(&f.f, &g.g)
        .into_iter()
        .zip(convolve(&f.g, &hc))
        .map(|(x, y)| x + y)
        .collect();
    Ok(SplitSeries::new(f.frame, ff, gg))
}

/// Complex Horner evaluation of `sum z^n c_n`.
pub fn horner(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a)
}

/// `F(z) + G(z) J` for `z` on the frame's slice.
pub fn eval_slice(s: &SplitSeries, z: SlicePoint) -> Result<Quaternion> {
    let zi = z.unit;
    let si = s.frame.i();
    let w = if zi.approx_eq(si, 1e-12) {
        z.complex()
    } else if zi.approx_eq(-si, 1e-12) {
        z.complex().conj()
    } else {
        return Err(Error::SliceMismatch);
    };
    Ok(s.frame.join(horner(&s.f, w), horner(&s.g, w)))
}

/// Direct evaluation `a_0 + q(a_1 + q(a_2 + ...))`.
pub fn eval_quaternion(f: &QSeries, q: Quaternion) -> Quaternion {
    f.coeffs()
        .iter()
        .rev()
        .fold(Quaternion::ZERO, |acc, a| q * acc + *a)
}

/// Evaluation at `q = x + yI_q` from values on the slice of `s` only:
/// `((1 + I_q S) f(x - yS) + (1 - I_q S) f(x + yS)) / 2`.
pub fn eval_representation(f: &QSeries, q: Quaternion, s: UnitImaginary) -> Quaternion {
    let frame = Frame::from_unit(s);
    let split = to_split(f, frame);
    let x = q.re();
    let y = q.im().norm();
    let iq = UnitImaginary::new(q).unwrap_or(s).quaternion();
    let ss = s.quaternion();
    let lo = eval_slice(&split, SlicePoint::new(x, -y, s)).expect("same slice");
    let hi = eval_slice(&split, SlicePoint::new(x, y, s)).expect("same slice");
    let one = Quaternion::ONE;
    ((one + iq * ss) * lo + (one - iq * ss) * hi) * 0.5
}

/// Difference between direct and representation-formula evaluation, the
/// latter read from the slice of `i`, relative to `max(1, sum |a_n| |q|^n)`.
pub fn representation_residual(f: &QSeries, q: Quaternion) -> f64 {
    let direct = eval_quaternion(f, q);
    let r = q.norm();
    let scale = f
        .coeffs()
        .iter()
        .rev()
        .fold(0.0, |acc, a| acc * r + a.norm())
        .max(1.0);
    (direct - eval_representation(f, q, UnitImaginary::I)).norm() / scale
}

fn pascal() -> &'static Vec<Vec<f64>> {
    static ROWS: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    ROWS.get_or_init(|| {
        let mut rows: Vec<Vec<f64>> = vec![vec![1.0]];
        for n in 1..=PASCAL_MAX {
            let prev = &rows[n - 1];
            let mut row = vec![1.0; n + 1];
            for k in 1..n {
                row[k] = prev[k - 1] + prev[k];
            }
            rows.push(row);
        }
        rows
    })
}

/// Binomial coefficient as a float.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    if n <= PASCAL_MAX {
        return pascal()[n][k];
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Coefficients of `sum (Az + B)^k c_k` for complex `c`.
pub fn compose_complex(c: &[Complex64], a: Complex64, b: Complex64) -> Vec<Complex64> {
    let n = c.len() - 1;
    if n > PASCAL_MAX {
        let mut acc = vec![Complex64::new(0.0, 0.0); n + 1];
        acc[0] = c[n];
        for k in (0..n).rev() {
            let deg = n - k;
            for j in (0..=deg).rev() {
                let lower = if j > 0 {
                    acc[j - 1]
                } else {
                    Complex64::new(0.0, 0.0)
                };
                acc[j] = a * lower + b * acc[j];
            }
            acc[0] += c[k];
        }
        return acc;
    }
    let rows = pascal();
    let ap = powers(a, n);
    let bp = powers(b, n);
    (0..=n)
        .map(|j| {
            let mut s = Complex64::new(0.0, 0.0);
            for k in j..=n {
                s += c[k] * bp[k - j] * rows[k][j];
            }
            s * ap[j]
        })
        .collect()
}

fn powers(x: Complex64, n: usize) -> Vec<Complex64> {
    let mut p = Vec::with_capacity(n + 1);
    let mut t = Complex64::new(1.0, 0.0);
    for _ in 0..=n {
        p.push(t);
        t *= x;
    }
    p
}

/// `h(pA + B)` as a series of the same degree.
pub fn compose_affine(h: &QSeries, phi: &AffineSymbol) -> QSeries {
    let frame = phi.frame();
    let s = to_split(h, frame);
    let f = compose_complex(&s.f, phi.a(), phi.b());
    let g = compose_complex(&s.g, phi.a(), phi.b());
    to_qseries(&SplitSeries::new(frame, f, g))
}

/// Split-form composition; the series must live on the symbol's slice.
pub fn compose_affine_split(s: &SplitSeries, phi: &AffineSymbol) -> Result<SplitSeries> {
    let (a, b) = phi.coefficients_on(s.frame.i())?;
    Ok(SplitSeries::new(
        s.frame,
        compose_complex(&s.f, a, b),
        compose_complex(&s.g, a, b),
    ))
}

/// Residual of `(f * g)(p) = f(p) g(f(p)^-1 p f(p))`.
pub fn star_pointwise_check(f: &QSeries, g: &QSeries, p: Quaternion) -> f64 {
    let lhs = eval_quaternion(&star(f, g), p);
    let fp = eval_quaternion(f, p);
    if fp.norm() == 0.0 {
        return lhs.norm();
    }
    let moved = fp.inv() * p * fp;
    (lhs - fp * eval_quaternion(g, moved)).norm()
}
