//! Weighted composition operators `h -> f * (h o phi)` with affine symbols,
//! their finite sections and adjoints, and the boundedness, compactness,
//! isometry and unitarity checks.

use num_complex::Complex64;
use serde::Serialize;

use crate::certificate::{Certificate, SamplingSpec};
use crate::error::{Error, Result};
use crate::fock::{self, derivative_kernel, normalized_kernel};
use crate::quaternion::{Frame, Quaternion, SlicePoint, UnitImaginary};
use crate::random;
use crate::slice_series::{
    binomial, compose_affine, eval_slice, horner, star, to_split, QSeries, SplitSeries,
};

/// Tolerance for `|A| = 1` and similar exact-modulus tests.
pub const MODULUS_TOL: f64 = 1e-12;

/// Coefficient tolerance for matching a weight against a closed form.
pub const FORM_TOL: f64 = 1e-10;

/// Default tolerance of the numerical isometry check.
pub const ISOMETRY_TOL: f64 = 1e-8;

/// Tail tolerance for truncating entire weights.
pub const WEIGHT_TAIL_TOL: f64 = 1e-20;

/// `phi(p) = pA + B` with `A, B` on the slice of `unit`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineSymbol {
    a: Complex64,
    b: Complex64,
    unit: UnitImaginary,
}

impl AffineSymbol {
    pub fn new(a: Complex64, b: Complex64, unit: UnitImaginary) -> Result<Self> {
        let finite = |z: Complex64| z.re.is_finite() && z.im.is_finite();
        if !finite(a) || !finite(b) {
            return Err(Error::NotAffine(format!("A = {a}, B = {b}")));
        }
        Ok(Self { a, b, unit })
    }

    pub fn identity(unit: UnitImaginary) -> Self {
        Self {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
            unit,
        }
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    pub fn unit(&self) -> UnitImaginary {
        self.unit
    }

    /// Frame completed from the symbol's unit.
    pub fn frame(&self) -> Frame {
        Frame::from_unit(self.unit)
    }

    pub fn a_quaternion(&self) -> Quaternion {
        self.unit.embed(self.a)
    }

    pub fn b_quaternion(&self) -> Quaternion {
        self.unit.embed(self.b)
    }

    pub fn eval(&self, q: Quaternion) -> Quaternion {
        q * self.a_quaternion() + self.b_quaternion()
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.a * z + self.b
    }

    /// `(A, B)` in the coordinates of another unit: conjugated for `-unit`,
    /// unchanged when both are real.
    pub fn coefficients_on(&self, unit: UnitImaginary) -> Result<(Complex64, Complex64)> {
        if unit.approx_eq(self.unit, 1e-12) {
            Ok((self.a, self.b))
        } else if unit.approx_eq(-self.unit, 1e-12) {
            Ok((self.a.conj(), self.b.conj()))
        } else if self.a.im == 0.0 && self.b.im == 0.0 {
            Ok((self.a, self.b))
        } else {
            Err(Error::SliceMismatch)
        }
    }

    pub fn is_constant(&self) -> bool {
        self.a.norm() == 0.0
    }
}

/// `W h = f * (h o phi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedCompOp {
    weight: QSeries,
    symbol: AffineSymbol,
}

impl WeightedCompOp {
    pub fn new(weight: QSeries, symbol: AffineSymbol) -> Self {
        Self { weight, symbol }
    }

    pub fn weight(&self) -> &QSeries {
        &self.weight
    }

    pub fn symbol(&self) -> &AffineSymbol {
        &self.symbol
    }

    /// Weight split over the symbol's frame.
    pub fn split_weight(&self) -> SplitSeries {
        to_split(&self.weight, self.symbol.frame())
    }

    pub fn apply(&self, h: &QSeries) -> QSeries {
        apply(self, h)
    }
}

pub fn apply(w: &WeightedCompOp, h: &QSeries) -> QSeries {
    star(&w.weight, &compose_affine(h, &w.symbol))
}

/// `sqrt(n!)` for `n = 0..=n_max`.
pub fn sqrt_factorials(n_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut s = 1.0;
    for n in 0..=n_max {
        if n > 0 {
            s *= (n as f64).sqrt();
        }
        out.push(s);
    }
    out
}

/// Coefficients of `f` in the orthonormal basis `e_n = p^n / sqrt(n!)`.
pub fn orthonormal_coeffs(f: &QSeries) -> Vec<Quaternion> {
    let sf = sqrt_factorials(f.degree());
    f.coeffs().iter().zip(sf).map(|(c, s)| *c * s).collect()
}

/// Inverse of [`orthonormal_coeffs`].
pub fn from_orthonormal_coeffs(c: &[Quaternion]) -> QSeries {
    let sf = sqrt_factorials(c.len().saturating_sub(1));
    QSeries::new(c.iter().zip(sf).map(|(x, s)| *x / s).collect())
}

/// Dense row-major quaternion matrix in the orthonormal monomial basis.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Quaternion>,
}

impl OperatorMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Quaternion::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m.set(k, k, Quaternion::ONE);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Quaternion {
        self.data[r * self.cols + c]
    }

    /// Entry or zero outside the stored block.
    pub fn get_padded(&self, r: usize, c: usize) -> Quaternion {
        if r < self.rows && c < self.cols {
            self.get(r, c)
        } else {
            Quaternion::ZERO
        }
    }

    pub fn set(&mut self, r: usize, c: usize, v: Quaternion) {
        self.data[r * self.cols + c] = v;
    }

    pub fn column(&self, c: usize) -> Vec<Quaternion> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    /// Product `self * other`; `other.rows()` may not exceed `self.cols()`.
    pub fn mul(&self, other: &Self) -> Self {
        assert!(
            other.rows <= self.cols,
            "inner dimensions {} and {} do not fit",
            self.cols,
            other.rows
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.rows {
                let a = self.get(i, j);
                if a == Quaternion::ZERO {
                    continue;
                }
                for k in 0..other.cols {
                    let idx = i * other.cols + k;
                    out.data[idx] += a * other.get(j, k);
                }
            }
        }
        out
    }

    /// Matrix times a coefficient vector in the orthonormal basis.
    pub fn apply_vec(&self, x: &[Quaternion]) -> Vec<Quaternion> {
        (0..self.rows)
            .map(|r| {
                x.iter()
                    .enumerate()
                    .take(self.cols)
                    .map(|(c, v)| self.get(r, c) * *v)
                    .sum()
            })
            .collect()
    }

    /// Multiplies every entry on the left by `s`.
    pub fn scale_left(&self, s: Quaternion) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| s * *v).collect(),
        }
    }

    /// Frobenius distance with both matrices zero-padded to a common shape.
    pub fn distance(&self, other: &Self) -> f64 {
        let rows = self.rows.max(other.rows);
        let cols = self.cols.max(other.cols);
        let mut acc = 0.0;
        for r in 0..rows {
            for c in 0..cols {
                acc += (self.get_padded(r, c) - other.get_padded(r, c)).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Leading `rows x cols` block.
    pub fn block(&self, rows: usize, cols: usize) -> Self {
        let mut out = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                out.set(r, c, self.get_padded(r, c));
            }
        }
        out
    }
}

/// Finite section on inputs of degree `<= n_in`; rows run up to
/// `n_in + deg f`, so nothing is cut off.
pub fn matrix(w: &WeightedCompOp, n_in: usize) -> OperatorMatrix {
    let rows = n_in + w.weight.degree() + 1;
    let sf = sqrt_factorials(rows);
    let mut m = OperatorMatrix::zeros(rows, n_in + 1);
    for n in 0..=n_in {
        let out = apply(w, &QSeries::monomial(n, Quaternion::ONE));
        for (r, c) in out.coeffs().iter().enumerate() {
            m.set(r, n, *c * (sf[r] / sf[n]));
        }
    }
    m
}

/// Quaternionic conjugate transpose.
pub fn adjoint_matrix(m: &OperatorMatrix) -> OperatorMatrix {
    let mut out = OperatorMatrix::zeros(m.cols, m.rows);
    for r in 0..m.rows {
        for c in 0..m.cols {
            out.set(c, r, m.get(r, c).conj());
        }
    }
    out
}

/// `W* p^m = sum_j C(m,j) K_B^[j] conj(A^j) conj(f^(m-j)(0))`, kernels cut at
/// `degree`.
pub fn adjoint_on_monomial(w: &WeightedCompOp, m: usize, degree: usize) -> QSeries {
    let b = w.symbol.b_quaternion();
    let a = w.symbol.a_quaternion();
    let mut acc = QSeries::zero(degree + m);
    let mut a_pow = Quaternion::ONE;
    for j in 0..=m {
        let k = m - j;
        // f^(k)(0) = k! w_k
        let fact: f64 = (1..=k).map(|t| t as f64).product();
        let dk = w.weight.coeff(k) * fact;
        if dk != Quaternion::ZERO {
            let s = a_pow.conj() * dk.conj() * binomial(m, j);
            acc = acc.add(&derivative_kernel(b, j, degree).mul_right(s));
        }
        a_pow *= a;
    }
    acc
}

/// `W* h = sum_m (W* p^m) h_m` for a polynomial `h`.
pub fn adjoint_apply(w: &WeightedCompOp, h: &QSeries, degree: usize) -> QSeries {
    let mut acc = QSeries::zero(degree);
    for (m, c) in h.coeffs().iter().enumerate() {
        if *c != Quaternion::ZERO {
            acc = acc.add(&adjoint_on_monomial(w, m, degree).mul_right(*c));
        }
    }
    acc
}

/// `log(|F(w)|^2 e^{|phi(w)|^2-|w|^2} + |G(w)|^2 e^{|phi(conj w)|^2-|w|^2})`.
fn log_growth(s: &SplitSeries, a: Complex64, b: Complex64, w: Complex64) -> f64 {
    let fw = horner(s.f(), w).norm();
    let gw = horner(s.g(), w).norm();
    let r2 = w.norm_sqr();
    let t1 = 2.0 * fw.ln() + (a * w + b).norm_sqr() - r2;
    let t2 = 2.0 * gw.ln() + (a * w.conj() + b).norm_sqr() - r2;
    let m = t1.max(t2);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((t1 - m).exp() + (t2 - m).exp()).ln()
}

/// Per-circle maxima of the growth quantity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthProfile {
    pub radii: Vec<f64>,
    pub log_max: Vec<f64>,
}

impl GrowthProfile {
    pub fn sample(s: &SplitSeries, a: Complex64, b: Complex64, grid: SamplingSpec) -> Self {
        let radii = grid.radii();
        let log_max = radii
            .iter()
            .map(|&r| {
                let n = if r == 0.0 { 1 } else { grid.angles };
                (0..n)
                    .map(|k| {
                        let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                        log_growth(s, a, b, Complex64::from_polar(r, th))
                    })
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
        Self { radii, log_max }
    }

    pub fn log_sup(&self) -> f64 {
        self.log_max
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Three successive circle maxima each more than 10% above the previous
    /// one at the outer end of the grid, or a non-finite value.
    pub fn divergent(&self) -> bool {
        if self
            .log_max
            .iter()
            .any(|v| v.is_nan() || *v == f64::INFINITY)
        {
            return true;
        }
        let n = self.log_max.len();
        if n < 4 {
            return false;
        }
        let step = 1.1f64.ln();
        (n - 3..n).all(|k| self.log_max[k] - self.log_max[k - 1] > step)
    }

    /// Outer values small against the peak, or a clear monotone decrease
    /// over the last four circles.
    pub fn decays(&self) -> bool {
        let n = self.log_max.len();
        let last = self.log_max[n - 1];
        if last == f64::NEG_INFINITY || last <= self.log_sup() + 1e-8f64.ln() {
            return true;
        }
        if n < 4 {
            return false;
        }
        let tail = &self.log_max[n - 4..];
        tail.windows(2).all(|p| p[1] < p[0]) && tail[3] < tail[0] - 2f64.ln()
    }
}

fn weight_on_symbol_slice(f: &SplitSeries, phi: &AffineSymbol) -> Result<(Complex64, Complex64)> {
    if f.is_zero() {
        return Err(Error::NotAffine("weight vanishes identically".into()));
    }
    phi.coefficients_on(f.frame().i())
}

/// Distance of the split weight from `F(0) e^{-A conj(B) z} + G(0) e^{-conj(A) B z} J`,
/// relative to its largest coefficient.
pub fn unimodular_form_residual(f: &SplitSeries, a: Complex64, b: Complex64) -> f64 {
    let rf = -a * b.conj();
    let rg = -a.conj() * b;
    let f0 = f.f()[0];
    let g0 = f.g()[0];
    let scale = f
        .f()
        .iter()
        .chain(f.g())
        .fold(0.0f64, |m, c| m.max(c.norm()))
        .max(f64::MIN_POSITIVE);
    let mut tf = f0;
    let mut tg = g0;
    let mut worst = 0.0f64;
    for n in 0..=f.degree() {
        if n > 0 {
            tf = tf * rf / n as f64;
            tg = tg * rg / n as f64;
        }
        worst = worst
            .max((f.f()[n] - tf).norm())
            .max((f.g()[n] - tg).norm());
    }
    worst / scale
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundednessCertificate {
    pub a_modulus: f64,
    pub m_hat: f64,
    pub m_hat_closed_form: Option<f64>,
    pub divergent: bool,
    pub form_residual: Option<f64>,
    pub bounded: bool,
    pub reason: String,
    pub profile: GrowthProfile,
    pub truncation: usize,
}

impl BoundednessCertificate {
    pub fn certificate(&self) -> Certificate {
        let mut c = Certificate::new(
            "boundedness",
            if self.bounded { "bounded" } else { "unbounded" },
            self.truncation,
        )
        .input("a_modulus", self.a_modulus)
        .input("reason", &self.reason)
        .input("divergent", self.divergent)
        .input("profile_log_max", &self.profile.log_max)
        .residual("m_hat", self.m_hat)
        .tolerance("modulus", MODULUS_TOL);
        if let Some(r) = self.form_residual {
            c = c
                .residual("unimodular_form", r)
                .tolerance("unimodular_form", FORM_TOL);
        }
        if let Some(m) = self.m_hat_closed_form {
            c = c.residual("m_hat_closed_form", m);
        }
        c
    }
}

/// Boundedness via the sup of the growth quantity over a circle grid. For
/// `|A| = 1` the verdict comes from matching the weight against the only
/// admissible exponential form; truncated exponentials are unreliable far out.
pub fn boundedness_certificate(
    f: &SplitSeries,
    phi: &AffineSymbol,
    grid: SamplingSpec,
) -> Result<BoundednessCertificate> {
    let (a, b) = weight_on_symbol_slice(f, phi)?;
    let profile = GrowthProfile::sample(f, a, b, grid);
    let a_modulus = a.norm();
    let divergent = profile.divergent();
    let m_hat = profile.log_sup().exp();
    let mut out = BoundednessCertificate {
        a_modulus,
        m_hat,
        m_hat_closed_form: None,
        divergent,
        form_residual: None,
        bounded: false,
        reason: String::new(),
        profile,
        truncation: f.degree(),
    };
    if a_modulus > 1.0 + MODULUS_TOL {
        out.reason = "|A| > 1".into();
    } else if a_modulus < 1.0 - MODULUS_TOL {
        out.bounded = !divergent;
        out.reason = if divergent {
            "growth quantity diverges on the grid".into()
        } else {
            "|A| < 1 and the growth quantity stays finite".into()
        };
    } else {
        let r = unimodular_form_residual(f, a, b);
        out.form_residual = Some(r);
        out.bounded = r <= FORM_TOL;
        if out.bounded {
            let f0 = f.f()[0].norm_sqr() + f.g()[0].norm_sqr();
            out.m_hat_closed_form = Some(f0 * b.norm_sqr().exp());
            out.reason = "|A| = 1 and the weight has the matching exponential form".into();
        } else {
            out.reason = "|A| = 1 but the weight is not of the matching exponential form".into();
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompactnessCertificate {
    pub a_modulus: f64,
    pub decays: bool,
    pub compact: bool,
    pub reason: String,
    pub profile: GrowthProfile,
    pub truncation: usize,
}

impl CompactnessCertificate {
    pub fn certificate(&self) -> Certificate {
        let n = self.profile.log_max.len();
        Certificate::new(
            "compactness",
            if self.compact {
                "compact"
            } else {
                "not compact"
            },
            self.truncation,
        )
        .input("a_modulus", self.a_modulus)
        .input("reason", &self.reason)
        .input("profile_log_max", &self.profile.log_max)
        .residual("outer_value", self.profile.log_max[n - 1].exp())
        .tolerance("relative_decay", 1e-8)
    }
}

/// Compactness: `|A| < 1` and the growth quantity tends to zero along the
/// circles. A constant symbol gives a rank-one operator.
pub fn compactness_certificate(
    f: &SplitSeries,
    phi: &AffineSymbol,
    grid: SamplingSpec,
) -> Result<CompactnessCertificate> {
    let (a, b) = weight_on_symbol_slice(f, phi)?;
    let profile = GrowthProfile::sample(f, a, b, grid);
    let a_modulus = a.norm();
    let decays = profile.decays();
    let (compact, reason) = if a_modulus == 0.0 {
        (true, "constant symbol, finite rank")
    } else if a_modulus >= 1.0 - MODULUS_TOL {
        (false, "|A| >= 1")
    } else if profile.divergent() {
        (false, "growth quantity diverges on the grid")
    } else if decays {
        (true, "|A| < 1 and the growth quantity decays")
    } else {
        (false, "growth quantity does not decay on the grid")
    };
    Ok(CompactnessCertificate {
        a_modulus,
        decays,
        compact,
        reason: reason.into(),
        profile,
        truncation: f.degree(),
    })
}

/// `e^{-lambda conj(b) z - |b|^2/2} alpha + e^{-conj(lambda) b z - |b|^2/2} beta J`
/// truncated at `degree`: the weights that make `W_{f, p lambda + b}` isometric
/// when `|alpha|^2 + |beta|^2 = 1`.
pub fn isometric_weight(
    frame: Frame,
    lambda: Complex64,
    b: Complex64,
    alpha: Complex64,
    beta: Complex64,
    degree: usize,
) -> SplitSeries {
    let s = (-0.5 * b.norm_sqr()).exp();
    let rf = -lambda * b.conj();
    let rg = -lambda.conj() * b;
    let mut f = Vec::with_capacity(degree + 1);
    let mut g = Vec::with_capacity(degree + 1);
    let mut tf = alpha * s;
    let mut tg = beta * s;
    for n in 0..=degree {
        if n > 0 {
            tf = tf * rf / n as f64;
            tg = tg * rg / n as f64;
        }
        f.push(tf);
        g.push(tg);
    }
    SplitSeries::new(frame, f, g)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsometryCertificate {
    pub structural: bool,
    pub alpha: Option<[f64; 2]>,
    pub beta: Option<[f64; 2]>,
    pub form_residual: Option<f64>,
    pub unit_residual: Option<f64>,
    pub numeric_residual: f64,
    pub isometric: bool,
    pub n_test: usize,
    pub input_degree: usize,
    pub truncation: usize,
}

impl IsometryCertificate {
    pub fn certificate(&self) -> Certificate {
        let mut c = Certificate::new(
            "isometry",
            if self.isometric {
                "isometric"
            } else {
                "not isometric"
            },
            self.truncation,
        )
        .input("structural", self.structural)
        .input("alpha", self.alpha)
        .input("beta", self.beta)
        .input("n_test", self.n_test)
        .input("input_degree", self.input_degree)
        .residual("norm_defect", self.numeric_residual)
        .tolerance("norm_defect", ISOMETRY_TOL)
        .tolerance("form", FORM_TOL);
        if let Some(r) = self.form_residual {
            c = c.residual("form", r);
        }
        if let Some(r) = self.unit_residual {
            c = c.residual("unit_constants", r);
        }
        c
    }
}

/// Gram-Schmidt over the right module: `v - sum h_j <v, h_j>`, then normalize.
pub fn orthonormalize(vs: &[QSeries]) -> Vec<QSeries> {
    let mut out: Vec<QSeries> = Vec::with_capacity(vs.len());
    for v in vs {
        let mut r = v.clone();
        for h in &out {
            r = r.sub(&h.mul_right(fock::inner(&r, h)));
        }
        let n = fock::norm(&r);
        if n > 1e-12 {
            out.push(r.mul_right(Quaternion::real(1.0 / n)));
        }
    }
    out
}

/// Structural match against the isometric normal form plus the largest
/// norm defect `| ||W h|| - 1 |` over `n_test` orthonormalized random
/// polynomials of degree `max(input_degree, n_test - 1)`.
pub fn isometry_certificate(
    w: &WeightedCompOp,
    n_test: usize,
    input_degree: usize,
    seed: u64,
) -> IsometryCertificate {
    let lambda = w.symbol.a();
    let b = w.symbol.b();
    let s = w.split_weight();
    let mut cert = IsometryCertificate {
        structural: false,
        alpha: None,
        beta: None,
        form_residual: None,
        unit_residual: None,
        numeric_residual: 0.0,
        isometric: false,
        n_test,
        input_degree: input_degree.max(n_test.saturating_sub(1)),
        truncation: w.weight.degree(),
    };
    if (lambda.norm() - 1.0).abs() <= MODULUS_TOL {
        let e = (0.5 * b.norm_sqr()).exp();
        let alpha = s.f()[0] * e;
        let beta = s.g()[0] * e;
        let model = isometric_weight(s.frame(), lambda, b, alpha, beta, s.degree());
        let diff = crate::slice_series::to_qseries(&model).sub(&w.weight);
        let form = fock::norm(&diff) / fock::norm(&w.weight).max(f64::MIN_POSITIVE);
        let unit = (alpha.norm_sqr() + beta.norm_sqr() - 1.0).abs();
        cert.alpha = Some([alpha.re, alpha.im]);
        cert.beta = Some([beta.re, beta.im]);
        cert.form_residual = Some(form);
        cert.unit_residual = Some(unit);
        cert.structural = form <= FORM_TOL && unit <= FORM_TOL;
    }
    let mut rng = random::seeded(seed);
    let raw: Vec<QSeries> = (0..n_test)
        .map(|_| random::polynomial(&mut rng, cert.input_degree))
        .collect();
    cert.numeric_residual = orthonormalize(&raw)
        .iter()
        .map(|h| (fock::norm(&apply(w, h)) - 1.0).abs())
        .fold(0.0, f64::max);
    cert.isometric = cert.numeric_residual <= ISOMETRY_TOL;
    cert
}

/// Smallest `N` with `sum_{n > N} |rate|^{2n} / n! < tol`, the squared norm
/// tail of `e^{rate z}`.
pub fn exp_truncation_degree(rate: f64, tol: f64) -> usize {
    let x = rate * rate;
    let mut t = 1.0;
    for n in 0..100_000 {
        if n > 0 {
            t *= x / n as f64;
        }
        let next = t * x / (n + 1) as f64;
        let m = (n + 2) as f64;
        if x < m && next / (1.0 - x / m) < tol {
            return n;
        }
    }
    100_000
}

fn unimodular(lambda: Complex64) -> Result<()> {
    if (lambda.norm() - 1.0).abs() > MODULUS_TOL {
        return Err(Error::NotUnimodular(lambda.norm()));
    }
    Ok(())
}

/// `W_{k_{conj(lambda) b}, p lambda - b}`, unitary for `|lambda| = 1`.
pub fn make_unitary(
    lambda: Complex64,
    b: Complex64,
    degree: usize,
    unit: UnitImaginary,
) -> Result<WeightedCompOp> {
    unimodular(lambda)?;
    let weight = normalized_kernel(unit.embed(lambda.conj() * b), degree);
    Ok(WeightedCompOp::new(
        weight,
        AffineSymbol::new(lambda, -b, unit)?,
    ))
}

/// Inverse of [`make_unitary`]: `W_{k_{-b}, p conj(lambda) + b conj(lambda)}`.
pub fn unitary_inverse(
    lambda: Complex64,
    b: Complex64,
    degree: usize,
    unit: UnitImaginary,
) -> Result<WeightedCompOp> {
    unimodular(lambda)?;
    let weight = normalized_kernel(unit.embed(-b), degree);
    let symbol = AffineSymbol::new(lambda.conj(), b * lambda.conj(), unit)?;
    Ok(WeightedCompOp::new(weight, symbol))
}

/// Weyl operator `W_u = W_{k_u, p - u}`.
pub fn weyl(u: Complex64, degree: usize, unit: UnitImaginary) -> WeightedCompOp {
    let symbol = AffineSymbol::new(Complex64::new(1.0, 0.0), -u, unit).expect("finite shift");
    WeightedCompOp::new(normalized_kernel(unit.embed(u), degree), symbol)
}

/// Phase in `W_u W_v = e^{theta I} W_{u+v}`: `theta = -Im(u conj(v))`.
pub fn weyl_phase(u: Complex64, v: Complex64) -> f64 {
    -(u * v.conj()).im
}

/// Frobenius norm of `M(W_u) M(W_v) - e^{theta I} M(W_{u+v})` on inputs of
/// degree `<= degree / 2` and outputs of degree `<= degree`. Rows above
/// `degree` would need weight coefficients past the truncation.
pub fn weyl_commutation_residual_with_phase(
    u: Complex64,
    v: Complex64,
    theta: f64,
    degree: usize,
    unit: UnitImaginary,
) -> f64 {
    let n_in = degree / 2;
    let mv = matrix(&weyl(v, degree, unit), n_in);
    let mu = matrix(&weyl(u, degree, unit), mv.rows() - 1);
    let lhs = mu.mul(&mv);
    let phase = unit.embed(Complex64::from_polar(1.0, theta));
    let rhs = matrix(&weyl(u + v, degree, unit), n_in).scale_left(phase);
    lhs.block(degree + 1, n_in + 1)
        .distance(&rhs.block(degree + 1, n_in + 1))
}

pub fn weyl_commutation_residual(
    u: Complex64,
    v: Complex64,
    degree: usize,
    unit: UnitImaginary,
) -> f64 {
    weyl_commutation_residual_with_phase(u, v, weyl_phase(u, v), degree, unit)
}

/// `|| M* M - Id ||` on inputs of degree `<= degree / 2`.
pub fn unitarity_residual(w: &WeightedCompOp, degree: usize) -> f64 {
    let n_in = degree / 2;
    let m = matrix(w, n_in);
    adjoint_matrix(&m)
        .mul(&m)
        .distance(&OperatorMatrix::identity(n_in + 1))
}

/// `|| M(V) M(W) - Id ||` on inputs of degree `<= degree / 2`.
pub fn inverse_residual(w: &WeightedCompOp, v: &WeightedCompOp, degree: usize) -> f64 {
    let n_in = degree / 2;
    let mw = matrix(w, n_in);
    let mv = matrix(v, mw.rows() - 1);
    mv.mul(&mw).distance(&OperatorMatrix::identity(n_in + 1))
}

/// `sup | conj(W K_q(p)) - (W* K_p)(q) |` over the given point pairs.
pub fn kernel_covariance_residual(
    w: &WeightedCompOp,
    points: &[(Quaternion, Quaternion)],
    degree: usize,
) -> f64 {
    use crate::fock::{kernel, KernelParams};
    use crate::slice_series::eval_quaternion;
    points
        .iter()
        .map(|&(p, q)| {
            let wk = apply(w, &kernel(KernelParams::new(q, degree)));
            let lhs = eval_quaternion(&wk, p).conj();
            let adj = adjoint_apply(w, &kernel(KernelParams::new(p, degree)), degree);
            (lhs - eval_quaternion(&adj, q)).norm()
        })
        .fold(0.0, f64::max)
}

/// Evaluates a split weight on its slice; convenience for callers holding
/// complex coordinates.
pub fn eval_split_at(s: &SplitSeries, z: Complex64) -> Quaternion {
    eval_slice(s, SlicePoint::from_complex(z, s.frame().i())).expect("same slice")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::inner;
    use crate::slice_series::to_qseries;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sym(a: Complex64, b: Complex64) -> AffineSymbol {
        AffineSymbol::new(a, b, UnitImaginary::I).unwrap()
    }

    fn rand_op(seed: u64, deg: usize, amax: f64) -> WeightedCompOp {
        let mut r = random::seeded(seed);
        let f = random::polynomial(&mut r, deg);
        let a = random::complex_in_disk(&mut r, amax);
        let b = random::complex_in_disk(&mut r, 1.0);
        WeightedCompOp::new(f, sym(a, b))
    }

    #[test]
    fn identity_operator() {
        let w = WeightedCompOp::new(
            QSeries::constant(Quaternion::ONE),
            AffineSymbol::identity(UnitImaginary::I),
        );
        let h = random::polynomial(&mut random::seeded(1), 5);
        assert_eq!(apply(&w, &h), h);
        assert_eq!(matrix(&w, 6), OperatorMatrix::identity(7));
        let m = matrix(&w, 6);
        assert_eq!(adjoint_matrix(&m), m);
    }

    #[test]
    fn applying_to_one_gives_weight() {
        let w = rand_op(2, 4, 0.9);
        assert!(apply(&w, &QSeries::constant(Quaternion::ONE)).max_abs_diff(w.weight()) < 1e-15);
    }

    #[test]
    fn weight_times_rotation() {
        let lam = c(0.6, 0.8);
        let w = WeightedCompOp::new(QSeries::monomial(1, Quaternion::I), sym(lam, c(0.0, 0.0)));
        let out = apply(&w, &QSeries::monomial(1, Quaternion::ONE));
        let want = QSeries::monomial(2, Quaternion::I * UnitImaginary::I.embed(lam));
        assert!(out.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn rotation_matrix_is_diagonal() {
        let lam = c(0.6, 0.8);
        let w = WeightedCompOp::new(QSeries::constant(Quaternion::ONE), sym(lam, c(0.0, 0.0)));
        let m = matrix(&w, 5);
        let adj = adjoint_matrix(&m);
        for r in 0..6 {
            for k in 0..6 {
                let want = if r == k {
                    UnitImaginary::I.embed(lam.powu(r as u32))
                } else {
                    Quaternion::ZERO
                };
                assert!(m.get(r, k).max_abs_diff(want) < 1e-15);
                assert!(adj.get(r, k).max_abs_diff(want.conj()) < 1e-15);
            }
        }
    }

    #[test]
    fn matrix_reproduces_action() {
        let w = rand_op(3, 3, 0.9);
        let h = random::polynomial(&mut random::seeded(4), 6);
        let m = matrix(&w, 6);
        let got = from_orthonormal_coeffs(&m.apply_vec(&orthonormal_coeffs(&h)));
        assert!(got.max_abs_diff(&apply(&w, &h)) < 1e-12);
    }

    #[test]
    fn adjoint_examples() {
        let w = rand_op(5, 3, 0.8);
        let b = w.symbol().b_quaternion();
        let p0 = adjoint_on_monomial(&w, 0, 30);
        let want = crate::fock::kernel(crate::fock::KernelParams::new(b, 30))
            .mul_right(w.weight().coeff(0).conj());
        assert!(p0.max_abs_diff(&want) < 1e-15);
        let id = WeightedCompOp::new(
            QSeries::constant(Quaternion::ONE),
            AffineSymbol::identity(UnitImaginary::I),
        );
        let p4 = adjoint_on_monomial(&id, 4, 10);
        assert!(p4.max_abs_diff(&QSeries::monomial(4, Quaternion::ONE)) < 1e-15);
    }

    #[test]
    fn adjoint_duality() {
        for seed in 0..4 {
            let w = rand_op(seed, 4, 0.9);
            let g = random::polynomial(&mut random::seeded(seed + 50), 8);
            for m in 0..=10 {
                let lhs = inner(&apply(&w, &g), &QSeries::monomial(m, Quaternion::ONE));
                let rhs = inner(&g, &adjoint_on_monomial(&w, m, 30));
                assert!(lhs.max_abs_diff(rhs) < 1e-9, "seed {seed} m {m}");
            }
        }
    }

    #[test]
    fn adjoint_matrix_matches_monomial_adjoint() {
        let w = rand_op(8, 3, 0.7);
        let n_in = 8;
        let m = matrix(&w, n_in);
        let adj = adjoint_matrix(&m);
        let sf = sqrt_factorials(m.rows());
        for (k, s) in sf.iter().enumerate().take(m.rows()) {
            // column k of the adjoint is W* e_k restricted to degree <= n_in
            let series = adjoint_on_monomial(&w, k, 40).mul_right(Quaternion::real(1.0 / s));
            let coeffs = orthonormal_coeffs(&series);
            for (n, c) in coeffs.iter().enumerate().take(n_in + 1) {
                assert!(adj.get(n, k).max_abs_diff(*c) < 1e-9);
            }
        }
    }

    #[test]
    fn kernel_covariance() {
        let w = rand_op(12, 3, 0.8);
        let pts = [
            (
                Quaternion::new(0.2, 0.3, -0.4, 0.1),
                Quaternion::new(-0.5, 0.2, 0.1, 0.6),
            ),
            (
                Quaternion::new(0.7, 0.0, 0.0, 0.2),
                Quaternion::new(0.1, -0.3, 0.5, 0.0),
            ),
        ];
        assert!(kernel_covariance_residual(&w, &pts, 40) < 1e-9);
    }

    #[test]
    fn half_scaling_is_bounded_and_compact() {
        let f = to_split(&QSeries::constant(Quaternion::ONE), Frame::standard());
        let phi = sym(c(0.5, 0.0), c(0.0, 0.0));
        let cert = boundedness_certificate(&f, &phi, SamplingSpec::default()).unwrap();
        assert!(cert.bounded);
        assert!((cert.m_hat - 1.0).abs() < 1e-15);
        let comp = compactness_certificate(&f, &phi, SamplingSpec::default()).unwrap();
        assert!(comp.compact);
    }

    #[test]
    fn doubling_is_unbounded() {
        let f = to_split(&QSeries::constant(Quaternion::ONE), Frame::standard());
        let cert =
            boundedness_certificate(&f, &sym(c(2.0, 0.0), c(0.0, 0.0)), SamplingSpec::default())
                .unwrap();
        assert!(!cert.bounded);
        assert_eq!(cert.reason, "|A| > 1");
    }

    #[test]
    fn exponential_weight_with_identity_symbol_is_unbounded() {
        let f = to_split(
            &QSeries::exponential(Quaternion::ONE, 40),
            Frame::standard(),
        );
        let cert = boundedness_certificate(
            &f,
            &AffineSymbol::identity(UnitImaginary::I),
            SamplingSpec::default(),
        )
        .unwrap();
        assert!(!cert.bounded);
        assert!(cert.form_residual.unwrap() > 0.1);
    }

    #[test]
    fn unimodular_symbol_with_matching_form() {
        let a = c(0.0, 1.0);
        let b = c(0.3, -0.4);
        let w = isometric_weight(Frame::standard(), a, b, c(0.6, 0.0), c(0.0, 0.8), 40);
        let cert = boundedness_certificate(&w, &sym(a, b), SamplingSpec::default()).unwrap();
        assert!(cert.bounded);
        let m = cert.m_hat_closed_form.unwrap();
        assert!((m - 1.0).abs() < 1e-12);
        let comp = compactness_certificate(&w, &sym(a, b), SamplingSpec::default()).unwrap();
        assert!(!comp.compact);
    }

    #[test]
    fn constant_symbol_is_finite_rank() {
        let f = to_split(
            &QSeries::constant(Quaternion::new(0.3, 0.1, 0.0, 0.2)),
            Frame::standard(),
        );
        let comp =
            compactness_certificate(&f, &sym(c(0.0, 0.0), c(0.4, 0.2)), SamplingSpec::default())
                .unwrap();
        assert!(comp.compact);
    }

    #[test]
    fn zero_weight_is_rejected() {
        let f = to_split(&QSeries::zero(2), Frame::standard());
        assert!(boundedness_certificate(
            &f,
            &sym(c(0.5, 0.0), c(0.0, 0.0)),
            SamplingSpec::default()
        )
        .is_err());
    }

    #[test]
    fn isometries() {
        let lam = c(0.0, 1.0);
        let rot = WeightedCompOp::new(
            QSeries::constant(Quaternion::new(0.6, 0.0, 0.8, 0.0)),
            sym(lam, c(0.0, 0.0)),
        );
        let cert = isometry_certificate(&rot, 6, 8, 1);
        assert!(cert.structural && cert.isometric, "{cert:?}");
        let half = WeightedCompOp::new(
            QSeries::constant(Quaternion::ONE),
            sym(c(0.5, 0.0), c(0.0, 0.0)),
        );
        let cert = isometry_certificate(&half, 6, 8, 1);
        assert!(!cert.structural && !cert.isometric);
        let p = QSeries::monomial(1, Quaternion::ONE);
        assert!((crate::fock::norm(&apply(&half, &p)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn isometric_normal_form_with_shift() {
        let lam = c(0.8, -0.6);
        let b = c(0.5, 0.7);
        let s = isometric_weight(Frame::standard(), lam, b, c(0.0, 0.6), c(0.8, 0.0), 60);
        let w = WeightedCompOp::new(to_qseries(&s), sym(lam, b));
        let cert = isometry_certificate(&w, 8, 10, 3);
        assert!(cert.structural && cert.isometric, "{cert:?}");
    }

    #[test]
    fn squared_kernel_weight_is_not_isometric() {
        // e^{-2 lambda conj(b) z - |b|^2}: the pointwise square of the kernel
        let lam = c(1.0, 0.0);
        let b = c(0.6, 0.3);
        let q = UnitImaginary::I.embed(-(lam.conj() * b) * 2.0);
        let weight = crate::fock::kernel(crate::fock::KernelParams::new(q, 60))
            .mul_right(Quaternion::real((-b.norm_sqr()).exp()));
        let cert = isometry_certificate(&WeightedCompOp::new(weight, sym(lam, b)), 6, 8, 2);
        assert!(!cert.isometric && cert.numeric_residual > 1e-2, "{cert:?}");
    }

    #[test]
    fn unitary_construction() {
        let lam = c(0.6, 0.8);
        let b = c(-0.4, 0.5);
        let w = make_unitary(lam, b, 40, UnitImaginary::I).unwrap();
        assert!(unitarity_residual(&w, 40) < 1e-7);
        let inv = unitary_inverse(lam, b, 40, UnitImaginary::I).unwrap();
        assert!(inverse_residual(&w, &inv, 40) < 1e-7);
        let id = make_unitary(c(1.0, 0.0), c(0.0, 0.0), 10, UnitImaginary::I).unwrap();
        assert_eq!(matrix(&id, 4).block(5, 5), OperatorMatrix::identity(5));
        assert!(matches!(
            make_unitary(c(0.5, 0.0), b, 10, UnitImaginary::I),
            Err(Error::NotUnimodular(_))
        ));
        let k = normalized_kernel(Quaternion::new(0.3, 0.5, -0.2, 0.1), 40);
        assert!((crate::fock::norm(&apply(&w, &k)) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn weyl_relations() {
        let i = UnitImaginary::I;
        let v = c(0.3, -0.5);
        assert!(weyl_commutation_residual(c(0.0, 0.0), v, 40, i) < 1e-12);
        assert!(weyl_commutation_residual(c(1.0, 0.0), c(0.0, 1.0), 40, i) < 1e-7);
        assert!((weyl_phase(c(1.0, 0.0), c(0.0, 1.0)) - 1.0).abs() < 1e-15);
        let u = c(0.4, 0.7);
        assert!(weyl_commutation_residual_with_phase(u, -u, 0.0, 40, i) < 1e-7);
        let opposite = weyl_commutation_residual_with_phase(c(1.0, 0.0), c(0.0, 1.0), -1.0, 40, i);
        assert!(opposite > 1e-1);
    }

    #[test]
    fn exp_degree() {
        let n = exp_truncation_degree(1.0, WEIGHT_TAIL_TOL);
        let tail: f64 = ((n + 1)..200)
            .map(|k| 1.0 / (1..=k).map(|t| t as f64).product::<f64>())
            .sum();
        assert!(tail < WEIGHT_TAIL_TOL);
        assert!(n < 40);
    }
}
