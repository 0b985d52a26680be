//! Quaternion arithmetic, imaginary units and complex slices.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative threshold below which the imaginary part counts as zero.
pub const REAL_TOL: f64 = 1e-14;

/// Tolerance for orthogonality of two imaginary units.
pub const ORTHO_TOL: f64 = 1e-12;

/// `x0 + x1 i + x2 j + x3 k`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Quaternion {
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl Quaternion {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Self = Self::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Self = Self::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Self = Self::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Self = Self::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Self { x0, x1, x2, x3 }
    }

    pub const fn real(r: f64) -> Self {
        Self::new(r, 0.0, 0.0, 0.0)
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.x0, self.x1, self.x2, self.x3]
    }

    pub fn re(self) -> f64 {
        self.x0
    }

    /// Pure imaginary part.
    pub fn im(self) -> Self {
        Self::new(0.0, self.x1, self.x2, self.x3)
    }

    pub fn conj(self) -> Self {
        Self::new(self.x0, -self.x1, -self.x2, -self.x3)
    }

    pub fn norm_sqr(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        // hypot chain keeps tiny and huge components well scaled
        self.x0.hypot(self.x1).hypot(self.x2.hypot(self.x3))
    }

    /// Euclidean inner product of the component vectors.
    pub fn dot(self, other: Self) -> f64 {
        self.x0 * other.x0 + self.x1 * other.x1 + self.x2 * other.x2 + self.x3 * other.x3
    }

    pub fn inv(self) -> Self {
        self.conj() / self.norm_sqr()
    }

    pub fn is_real(self) -> bool {
        self.im().norm() <= REAL_TOL * (1.0 + self.norm())
    }

    pub fn is_finite(self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }

    pub fn powi(self, n: usize) -> Self {
        let mut acc = Self::ONE;
        let mut base = self;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Largest componentwise absolute difference.
    pub fn max_abs_diff(self, other: Self) -> f64 {
        let d = self - other;
        d.to_array().iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Hamilton product.
pub fn mul(q1: Quaternion, q2: Quaternion) -> Quaternion {
    q1 * q2
}

/// Conjugate and modulus.
pub fn conj_norm(q: Quaternion) -> (Quaternion, f64) {
    (q.conj(), q.norm())
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:+}i {:+}j {:+}k",
            self.x0, self.x1, self.x2, self.x3
        )
    }
}

impl Add for Quaternion {
    type Output = Self;
    fn add(self, r: Self) -> Self {
        Self::new(
            self.x0 + r.x0,
            self.x1 + r.x1,
            self.x2 + r.x2,
            self.x3 + r.x3,
        )
    }
}

impl Sub for Quaternion {
    type Output = Self;
    fn sub(self, r: Self) -> Self {
        Self::new(
            self.x0 - r.x0,
            self.x1 - r.x1,
            self.x2 - r.x2,
            self.x3 - r.x3,
        )
    }
}

impl Neg for Quaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x0, -self.x1, -self.x2, -self.x3)
    }
}

impl Mul for Quaternion {
    type Output = Self;
    fn mul(self, r: Self) -> Self {
        let (a, b, c, d) = (self.x0, self.x1, self.x2, self.x3);
        let (e, f, g, h) = (r.x0, r.x1, r.x2, r.x3);
        Self::new(
            a * e - b * f - c * g - d * h,
            a * f + b * e + c * h - d * g,
            a * g - b * h + c * e + d * f,
            a * h + b * g - c * f + d * e,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.x0 * s, self.x1 * s, self.x2 * s, self.x3 * s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    fn mul(self, q: Quaternion) -> Quaternion {
        q * self
    }
}

impl Div<f64> for Quaternion {
    type Output = Self;
    fn div(self, s: f64) -> Self {
        Self::new(self.x0 / s, self.x1 / s, self.x2 / s, self.x3 / s)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, r: Self) {
        *self = *self + r;
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, r: Self) {
        *self = *self - r;
    }
}

impl MulAssign for Quaternion {
    fn mul_assign(&mut self, r: Self) {
        *self = *self * r;
    }
}

impl std::iter::Sum for Quaternion {
    fn sum<It: Iterator<Item = Self>>(iter: It) -> Self {
        iter.fold(Self::ZERO, |a, b| a + b)
    }
}

/// Unit-norm pure imaginary quaternion; squares to -1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct UnitImaginary(Quaternion);

impl UnitImaginary {
    pub const I: Self = Self(Quaternion::I);
    pub const J: Self = Self(Quaternion::J);
    pub const K: Self = Self(Quaternion::K);

    /// Normalizes the imaginary part of `q`; the real part is ignored.
    pub fn new(q: Quaternion) -> Result<Self> {
        let v = q.im();
        let n = v.norm();
        if n <= REAL_TOL * (1.0 + q.norm()) || !n.is_finite() {
            return Err(Error::RealInput(q.to_string()));
        }
        Ok(Self(v / n))
    }

    pub fn quaternion(self) -> Quaternion {
        self.0
    }

    pub fn components(self) -> [f64; 3] {
        [self.0.x1, self.0.x2, self.0.x3]
    }

    /// Inner product of the imaginary parts.
    pub fn dot(self, other: Self) -> f64 {
        self.0.dot(other.0)
    }

    /// `x + yI` as a quaternion.
    pub fn embed(self, z: Complex64) -> Quaternion {
        Quaternion::real(z.re) + self.0 * z.im
    }

    /// Coordinates of the orthogonal projection of `q` onto the slice.
    pub fn project(self, q: Quaternion) -> Complex64 {
        Complex64::new(q.x0, q.dot(self.0))
    }

    pub fn approx_eq(self, other: Self, tol: f64) -> bool {
        self.0.max_abs_diff(other.0) <= tol
    }
}

impl TryFrom<[f64; 3]> for UnitImaginary {
    type Error = Error;
    fn try_from(v: [f64; 3]) -> Result<Self> {
        Self::new(Quaternion::new(0.0, v[0], v[1], v[2]))
    }
}

impl From<UnitImaginary> for [f64; 3] {
    fn from(u: UnitImaginary) -> Self {
        u.components()
    }
}

/// `Im(q)/|Im(q)|`; fails on real input.
pub fn imaginary_unit_of(q: Quaternion) -> Result<UnitImaginary> {
    UnitImaginary::new(q)
}

/// Deterministic unit orthogonal to `unit`: the coordinate axis least
/// aligned with it, Gram-Schmidt reduced and normalized.
pub fn orthogonal_unit(unit: UnitImaginary) -> UnitImaginary {
    let c = unit.components();
    let mut dom = 0;
    for a in 1..3 {
        if c[a].abs() > c[dom].abs() {
            dom = a;
        }
    }
    let first = (dom + 1) % 3;
    let second = (dom + 2) % 3;
    let axis = if c[second].abs() < c[first].abs() {
        second
    } else {
        first
    };
    let mut e = [0.0; 3];
    e[axis] = 1.0;
    let t = c[axis];
    let v = Quaternion::new(0.0, e[0] - t * c[0], e[1] - t * c[1], e[2] - t * c[2]);
    UnitImaginary(v / v.norm())
}

/// `x + yI` on the slice of `unit`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlicePoint {
    pub x: f64,
    pub y: f64,
    pub unit: UnitImaginary,
}

impl SlicePoint {
    pub fn new(x: f64, y: f64, unit: UnitImaginary) -> Self {
        Self { x, y, unit }
    }

    pub fn from_complex(z: Complex64, unit: UnitImaginary) -> Self {
        Self::new(z.re, z.im, unit)
    }

    pub fn complex(self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    pub fn conj(self) -> Self {
        Self::new(self.x, -self.y, self.unit)
    }

    pub fn quaternion(self) -> Quaternion {
        self.unit.embed(self.complex())
    }
}

/// A pair of orthogonal imaginary units `(I, J)`. Every quaternion splits
/// uniquely as `alpha + beta J` with `alpha, beta` on the slice of `I`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    i: UnitImaginary,
    j: UnitImaginary,
}

impl Frame {
    pub fn new(i: UnitImaginary, j: UnitImaginary) -> Result<Self> {
        let d = i.dot(j);
        if d.abs() > ORTHO_TOL {
            return Err(Error::NonOrthogonalUnits(d));
        }
        Ok(Self { i, j })
    }

    /// Frame completed with [`orthogonal_unit`].
    pub fn from_unit(i: UnitImaginary) -> Self {
        Self {
            i,
            j: orthogonal_unit(i),
        }
    }

    /// `(i, j)`.
    pub fn standard() -> Self {
        Self {
            i: UnitImaginary::I,
            j: UnitImaginary::J,
        }
    }

    pub fn i(&self) -> UnitImaginary {
        self.i
    }

    pub fn j(&self) -> UnitImaginary {
        self.j
    }

    /// `IJ`, the third axis of the frame.
    pub fn k(&self) -> Quaternion {
        self.i.quaternion() * self.j.quaternion()
    }

    pub fn embed(&self, z: Complex64) -> Quaternion {
        self.i.embed(z)
    }

    pub fn split(&self, q: Quaternion) -> (Complex64, Complex64) {
        let i = self.i.quaternion();
        let alpha = Complex64::new(q.x0, q.dot(i));
        let beta = Complex64::new(q.dot(self.j.quaternion()), q.dot(self.k()));
        (alpha, beta)
    }

    pub fn join(&self, alpha: Complex64, beta: Complex64) -> Quaternion {
        self.embed(alpha) + self.embed(beta) * self.j.quaternion()
    }

    pub fn same_slice(&self, other: &Frame) -> bool {
        self.i.approx_eq(other.i, ORTHO_TOL) && self.j.approx_eq(other.j, ORTHO_TOL)
    }
}

impl Neg for UnitImaginary {
    type Output = Self;

    fn neg(self) -> Self {
        Self(-self.0)
    }
}
