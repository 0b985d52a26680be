//! Anti-linear maps on split series: the coefficient conjugation `C`, the
//! parametrized family `C_{a,b,c,d}`, anti-linear weighted composition
//! operators, and checks for involution, isometry, commuting and complex
//! symmetry.

use num_complex::Complex64;
use serde::Serialize;

use crate::certificate::{Certificate, SamplingSpec};
use crate::error::{Error, Result};
use crate::fock;
use crate::operators::{
    adjoint_on_monomial, apply, boundedness_certificate, unimodular_form_residual, AffineSymbol,
    WeightedCompOp, MODULUS_TOL,
};
use crate::quaternion::Frame;
use crate::random;
use crate::slice_series::{
    compose_affine_split, compose_complex, convolve, star_split, to_qseries, to_split, QSeries,
    SplitSeries,
};

/// Tolerance on the parameter constraints.
pub const PARAM_TOL: f64 = 1e-12;

/// Tolerance for structural identities between truncated series.
pub const STRUCT_TOL: f64 = 1e-9;

/// Numerical tolerance paired with a passing structural check.
pub const NUMERIC_TOL: f64 = 1e-8;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// `(a, b, c, d)` on the slice of `frame.i()`, with `J = frame.j()`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConjugationParams {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
    pub frame: Frame,
}

impl ConjugationParams {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64, frame: Frame) -> Self {
        Self { a, b, c, d, frame }
    }

    /// `(1, 0, 1, 0)`: the plain coefficient conjugation.
    pub fn identity(frame: Frame) -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self::new(one, zero(), one, zero(), frame)
    }

    pub fn symbol(&self) -> AffineSymbol {
        AffineSymbol::new(self.a, self.b, self.frame.i()).expect("finite parameters")
    }

    /// `c e^{bz} + d e^{conj(b) z} J`, truncated at `degree`.
    pub fn weight(&self, degree: usize) -> SplitSeries {
        SplitSeries::new(
            self.frame,
            exp_coeffs(self.c, self.b, degree),
            exp_coeffs(self.d, self.b.conj(), degree),
        )
    }
}

/// `s e^{rz}` truncated at `degree`.
pub fn exp_coeffs(s: Complex64, r: Complex64, degree: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(degree + 1);
    let mut t = s;
    for n in 0..=degree {
        if n > 0 {
            t = t * r / n as f64;
        }
        out.push(t);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ParamValidity {
    /// `| |a| - 1 |`
    pub modulus: f64,
    /// `| (|c|^2 + |d|^2) e^{|b|^2} - 1 |`
    pub norm: f64,
    /// `| conj(a) b + conj(b) |`
    pub involution: f64,
    pub valid: bool,
}

pub fn validate_params(p: &ConjugationParams) -> ParamValidity {
    let modulus = (p.a.norm() - 1.0).abs();
    let norm = ((p.c.norm_sqr() + p.d.norm_sqr()) * p.b.norm_sqr().exp() - 1.0).abs();
    let involution = (p.a.conj() * p.b + p.b.conj()).norm();
    ParamValidity {
        modulus,
        norm,
        involution,
        valid: modulus <= PARAM_TOL && norm <= PARAM_TOL && involution <= PARAM_TOL,
    }
}

/// Conjugates every complex coefficient of `F` and `G`:
/// `(Cf)(z) = conj(F(conj z)) + conj(G(conj z)) J`.
pub fn conj_c(f: &SplitSeries) -> SplitSeries {
    SplitSeries::new(
        f.frame(),
        f.f().iter().map(|c| c.conj()).collect(),
        f.g().iter().map(|c| c.conj()).collect(),
    )
}

/// `f -> xi * (Cf)(eta(z))`.
#[derive(Clone, Debug, PartialEq)]
pub struct AntiWCO {
    pub weight: SplitSeries,
    pub symbol: AffineSymbol,
}

impl AntiWCO {
    pub fn new(weight: SplitSeries, symbol: AffineSymbol) -> Self {
        Self { weight, symbol }
    }

    /// The special isometry `xi = k_{-b}`, `eta(z) = z + b`.
    pub fn shift(b: Complex64, frame: Frame, degree: usize) -> Self {
        let s = (-0.5 * b.norm_sqr()).exp();
        let weight = SplitSeries::new(
            frame,
            exp_coeffs(Complex64::new(s, 0.0), -b.conj(), degree),
            vec![],
        );
        let symbol =
            AffineSymbol::new(Complex64::new(1.0, 0.0), b, frame.i()).expect("finite shift");
        Self::new(weight, symbol)
    }

    pub fn from_params(p: &ConjugationParams, degree: usize) -> Self {
        Self::new(p.weight(degree), p.symbol())
    }
}

pub fn anti_wco_apply(op: &AntiWCO, f: &SplitSeries) -> Result<SplitSeries> {
    let f = reframe(f, op.weight.frame())?;
    let composed = compose_affine_split(&conj_c(&f), &op.symbol)?;
    star_split(&op.weight, &composed)
}

/// Re-expresses `f` over `frame` when the slices agree.
fn reframe(f: &SplitSeries, frame: Frame) -> Result<SplitSeries> {
    if f.frame().same_slice(&frame) {
        return Ok(f.clone());
    }
    if !f.frame().i().approx_eq(frame.i(), 1e-12) {
        return Err(Error::SliceMismatch);
    }
    Ok(to_split(&to_qseries(f), frame))
}

/// `C_{a,b,c,d} f = [c e^{bz} + d e^{conj(b) z} J] * (Cf)(az + b)`, with the
/// exponential weight and the result cut at `degree`.
pub fn apply_c_abcd(p: &ConjugationParams, f: &SplitSeries, degree: usize) -> Result<SplitSeries> {
    let v = validate_params(p);
    if !v.valid {
        return Err(Error::InvalidParams(format!(
            "|a| defect {:.3e}, norm defect {:.3e}, involution defect {:.3e}",
            v.modulus, v.norm, v.involution
        )));
    }
    Ok(anti_wco_apply(&AntiWCO::from_params(p, degree), f)?.truncated(degree))
}

/// Fock norm of a split series.
pub fn split_norm(s: &SplitSeries) -> f64 {
    fock::norm(&to_qseries(s))
}

fn split_sub(a: &SplitSeries, b: &SplitSeries) -> SplitSeries {
    let n = a.degree().max(b.degree());
    let a = a.truncated(n);
    let b = b.truncated(n);
    SplitSeries::new(
        a.frame(),
        a.f().iter().zip(b.f()).map(|(x, y)| x - y).collect(),
        a.g().iter().zip(b.g()).map(|(x, y)| x - y).collect(),
    )
}

fn scale_right(s: &SplitSeries, alpha: Complex64) -> SplitSeries {
    // (F + GJ) alpha = F alpha + G conj(alpha) J
    SplitSeries::new(
        s.frame(),
        s.f().iter().map(|x| x * alpha).collect(),
        s.g().iter().map(|x| x * alpha.conj()).collect(),
    )
}

fn scale_left(s: &SplitSeries, alpha: Complex64) -> SplitSeries {
    SplitSeries::new(
        s.frame(),
        s.f().iter().map(|x| alpha * x).collect(),
        s.g().iter().map(|x| alpha * x).collect(),
    )
}

/// Numerical behaviour of an anti-linear operator on random polynomials.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AntiLinearDefects {
    /// max `| ||A f|| - ||f|| | / ||f||`
    pub isometry: f64,
    /// max `||A A f - f|| / ||f||`
    pub involution: f64,
    /// max `||A(f alpha) - A(f) conj(alpha)|| / ||f||`
    pub right_anti_linearity: f64,
    /// max `||A(alpha f) - conj(alpha) A(f)|| / ||f||`
    pub left_anti_linearity: f64,
}

/// Defects over `samples` random polynomials of degree `input_degree`, all
/// series cut at `degree`.
pub fn anti_linear_defects(
    op: &AntiWCO,
    degree: usize,
    input_degree: usize,
    samples: usize,
    seed: u64,
) -> Result<AntiLinearDefects> {
    let frame = op.weight.frame();
    let mut rng = random::seeded(seed);
    let mut out = AntiLinearDefects {
        isometry: 0.0,
        involution: 0.0,
        right_anti_linearity: 0.0,
        left_anti_linearity: 0.0,
    };
    for _ in 0..samples {
        let f = to_split(&random::polynomial(&mut rng, input_degree), frame);
        let alpha = random::complex_in_disk(&mut rng, 1.0);
        let nf = split_norm(&f);
        let af = anti_wco_apply(op, &f)?.truncated(degree);
        let aaf = anti_wco_apply(op, &af)?.truncated(degree);
        out.isometry = out.isometry.max((split_norm(&af) - nf).abs() / nf);
        out.involution = out.involution.max(split_norm(&split_sub(&aaf, &f)) / nf);
        let right = anti_wco_apply(op, &scale_right(&f, alpha))?.truncated(degree);
        let r = split_sub(&right, &scale_right(&af, alpha.conj()));
        out.right_anti_linearity = out.right_anti_linearity.max(split_norm(&r) / nf);
        let left = anti_wco_apply(op, &scale_left(&f, alpha))?.truncated(degree);
        let l = split_sub(&left, &scale_left(&af, alpha.conj()));
        out.left_anti_linearity = out.left_anti_linearity.max(split_norm(&l) / nf);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AntiClassification {
    pub bounded: bool,
    /// Weight is `c e^{-a conj(b) z} + d e^{-conj(a) b z} J` with `|a| = 1`
    /// and `(|c|^2 + |d|^2) e^{|b|^2} = 1`, where `eta(z) = za + b`.
    pub isometric: bool,
    /// Isometric and `conj(a) b + conj(b) = 0`.
    pub involutive: bool,
    pub conjugation: bool,
    pub fitted_c: [f64; 2],
    pub fitted_d: [f64; 2],
    pub form_residual: f64,
    pub defects: AntiLinearDefects,
    pub numeric_isometric: bool,
    pub numeric_involutive: bool,
    pub left_anti_linear: bool,
    /// Structural and numerical verdicts agree on isometry and involution.
    pub consistent: bool,
    pub truncation: usize,
}

impl AntiClassification {
    pub fn certificate(&self) -> Certificate {
        let verdict = if self.conjugation {
            "conjugation"
        } else if self.isometric {
            "isometric"
        } else {
            "not isometric"
        };
        Certificate::new("anti-linear classification", verdict, self.truncation)
            .input("bounded", self.bounded)
            .input("isometric", self.isometric)
            .input("involutive", self.involutive)
            .input("left_anti_linear", self.left_anti_linear)
            .input("consistent", self.consistent)
            .input("fitted_c", self.fitted_c)
            .input("fitted_d", self.fitted_d)
            .residual("form", self.form_residual)
            .residual("isometry", self.defects.isometry)
            .residual("involution", self.defects.involution)
            .residual("right_anti_linearity", self.defects.right_anti_linearity)
            .residual("left_anti_linearity", self.defects.left_anti_linearity)
            .tolerance("form", STRUCT_TOL)
            .tolerance("numeric", NUMERIC_TOL)
    }
}

/// Structural classification of `A_{xi, eta}` with numerical cross-checks.
pub fn anti_wco_classify(
    xi: &SplitSeries,
    eta: &AffineSymbol,
    degree: usize,
    seed: u64,
) -> Result<AntiClassification> {
    if eta.is_constant() {
        return Err(Error::ConstantSymbol);
    }
    let (a, b) = eta.coefficients_on(xi.frame().i())?;
    let bounded = boundedness_certificate(xi, eta, SamplingSpec::default())?.bounded;
    let c = xi.f()[0];
    let d = xi.g()[0];
    let form_residual = if (a.norm() - 1.0).abs() <= MODULUS_TOL {
        unimodular_form_residual(xi, a, b)
    } else {
        f64::INFINITY
    };
    let norm_ok = ((c.norm_sqr() + d.norm_sqr()) * b.norm_sqr().exp() - 1.0).abs() <= STRUCT_TOL;
    let isometric = form_residual <= STRUCT_TOL && norm_ok;
    let involutive = isometric && (a.conj() * b + b.conj()).norm() <= STRUCT_TOL;
    let op = AntiWCO::new(xi.clone(), *eta);
    let defects = anti_linear_defects(&op, degree, 6.min(degree / 2), 6, seed)?;
    let numeric_isometric = defects.isometry <= NUMERIC_TOL;
    let numeric_involutive = defects.involution <= NUMERIC_TOL;
    Ok(AntiClassification {
        bounded,
        isometric,
        involutive,
        conjugation: isometric && involutive,
        fitted_c: [c.re, c.im],
        fitted_d: [d.re, d.im],
        form_residual,
        defects,
        numeric_isometric,
        numeric_involutive,
        left_anti_linear: defects.left_anti_linearity <= NUMERIC_TOL,
        consistent: isometric == numeric_isometric && involutive == numeric_involutive,
        truncation: degree,
    })
}

fn require_d_zero(p: &ConjugationParams) -> Result<()> {
    if p.d.norm() != 0.0 {
        return Err(Error::UnsupportedParams(
            "only d = 0 is covered by the commuting and symmetry checks".into(),
        ));
    }
    Ok(())
}

fn series_gap(x: &[Complex64], y: &[Complex64], degree: usize) -> f64 {
    let scale = x
        .iter()
        .chain(y)
        .take(2 * (degree + 1))
        .fold(0.0f64, |m, c| m.max(c.norm()))
        .max(1.0);
    (0..=degree)
        .map(|n| {
            let a = x.get(n).copied().unwrap_or_default();
            let b = y.get(n).copied().unwrap_or_default();
            (a - b).norm()
        })
        .fold(0.0, f64::max)
        / scale
}

/// Residuals of the conditions under which `W_{f, zA + B}` commutes with
/// `C_{a,b,c}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CommutingConditions {
    /// `|aA - conj(A) a|`, `|aB + b - conj(A) b - conj(B)|`; only when `F` is nonzero.
    pub symbol_f: Option<[f64; 2]>,
    /// `|conj(a) conj(A) - A a|`, `|conj(a) conj(B) + conj(b) - A b - B|`; only when `G` is nonzero.
    pub symbol_g: Option<[f64; 2]>,
    /// `F(z) e^{b(Az+B)} = e^{bz} conj(F)(az+b)`
    pub weight_f: f64,
    /// `conj(c) G(z) e^{conj(b)(conj(A) z + conj(B))} = c e^{bz} conj(G)(az+b)`
    pub weight_g: f64,
}

impl CommutingConditions {
    pub fn worst(&self) -> f64 {
        let s = self.symbol_f.map_or(0.0, |v| v[0].max(v[1]));
        let t = self.symbol_g.map_or(0.0, |v| v[0].max(v[1]));
        s.max(t).max(self.weight_f).max(self.weight_g)
    }
}

pub fn commuting_conditions(
    w: &WeightedCompOp,
    p: &ConjugationParams,
    degree: usize,
) -> Result<CommutingConditions> {
    require_d_zero(p)?;
    let (big_a, big_b) = w.symbol().coefficients_on(p.frame.i())?;
    let s = to_split(w.weight(), p.frame).truncated(degree);
    let (a, b, c) = (p.a, p.b, p.c);
    let nonzero = |v: &[Complex64]| v.iter().any(|x| x.norm() > 0.0);
    let symbol_f = nonzero(s.f()).then(|| {
        [
            (a * big_a - big_a.conj() * a).norm(),
            (a * big_b + b - big_a.conj() * b - big_b.conj()).norm(),
        ]
    });
    let symbol_g = nonzero(s.g()).then(|| {
        [
            (a.conj() * big_a.conj() - big_a * a).norm(),
            (a.conj() * big_b.conj() + b.conj() - big_a * b - big_b).norm(),
        ]
    });
    let e_bz = exp_coeffs(Complex64::new(1.0, 0.0), b, degree);
    let lhs_f = convolve(s.f(), &exp_coeffs((b * big_b).exp(), b * big_a, degree));
    let fbar: Vec<_> = s.f().iter().map(|x| x.conj()).collect();
    let rhs_f = convolve(&e_bz, &compose_complex(&fbar, a, b));
    let lhs_g = convolve(
        s.g(),
        &exp_coeffs(
            c.conj() * (b.conj() * big_b.conj()).exp(),
            b.conj() * big_a.conj(),
            degree,
        ),
    );
    let gbar: Vec<_> = s.g().iter().map(|x| x.conj()).collect();
    let rhs_g = convolve(&exp_coeffs(c, b, degree), &compose_complex(&gbar, a, b));
    Ok(CommutingConditions {
        symbol_f,
        symbol_g,
        weight_f: series_gap(&lhs_f, &rhs_f, degree),
        weight_g: series_gap(&lhs_g, &rhs_g, degree),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CommutingCertificate {
    pub conditions: CommutingConditions,
    pub structural: bool,
    pub residual: f64,
    pub m_max: usize,
    pub truncation: usize,
}

impl CommutingCertificate {
    pub fn certificate(&self) -> Certificate {
        let verdict = if self.structural {
            "commuting"
        } else {
            "not commuting"
        };
        Certificate::new("conjugate commuting", verdict, self.truncation)
            .input("m_max", self.m_max)
            .input("conditions", &self.conditions)
            .residual("structural", self.conditions.worst())
            .residual("numeric", self.residual)
            .tolerance("structural", STRUCT_TOL)
            .tolerance("numeric", 1e-9)
    }
}

/// `max_{m <= m_max} ||W C p^m - C W p^m|| / ||p^m||`, everything cut at `degree`.
pub fn commuting_residual(
    w: &WeightedCompOp,
    p: &ConjugationParams,
    m_max: usize,
    degree: usize,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for m in 0..=m_max {
        let pm = QSeries::monomial(m, crate::quaternion::Quaternion::ONE);
        let cpm = apply_c_abcd(p, &to_split(&pm, p.frame), degree)?;
        let lhs = to_split(&apply(w, &to_qseries(&cpm)), p.frame).truncated(degree);
        let wpm = to_split(&apply(w, &pm), p.frame);
        let rhs = apply_c_abcd(p, &wpm, degree)?;
        worst = worst.max(split_norm(&split_sub(&lhs, &rhs)) / fock::norm(&pm));
    }
    Ok(worst)
}

pub fn commuting_certificate(
    w: &WeightedCompOp,
    p: &ConjugationParams,
    m_max: usize,
    degree: usize,
) -> Result<CommutingCertificate> {
    let conditions = commuting_conditions(w, p, degree)?;
    let residual = commuting_residual(w, p, m_max, degree)?;
    Ok(CommutingCertificate {
        structural: conditions.worst() <= STRUCT_TOL,
        conditions,
        residual,
        m_max,
        truncation: degree,
    })
}

/// `C1 e^{D1 z} + C2 e^{D2 z} J` together with the constants used.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricWeight {
    pub weight: QSeries,
    pub d1: Complex64,
    pub d2: Complex64,
    pub c2: Complex64,
    /// Phase change applied to the seed constant, in radians.
    pub phase_adjustment: f64,
}

/// Admissible phase of the second constant: `arg c + Im(bB) + pi/2` modulo `pi`.
pub fn admissible_phase(p: &ConjugationParams, big_b: Complex64) -> f64 {
    p.c.arg() + (p.b * big_b).im + std::f64::consts::FRAC_PI_2
}

/// Wrapped difference in `(-pi, pi]`.
fn wrap(x: f64) -> f64 {
    let t = std::f64::consts::TAU;
    let y = x.rem_euclid(t);
    if y > std::f64::consts::PI {
        y - t
    } else {
        y
    }
}

/// Weight making `W_{f, zA + B}` complex symmetric for `C_{a,b,c}`:
/// `D1 = aB - bA + b`, `D2 = aB - conj(bA) + b`, and a second constant whose
/// phase is moved to the nearest admissible value.
pub fn symmetric_weight(
    p: &ConjugationParams,
    big_a: Complex64,
    big_b: Complex64,
    c1: Complex64,
    c2_seed: Complex64,
    degree: usize,
) -> Result<SymmetricWeight> {
    require_d_zero(p)?;
    if (big_a * p.a).im.abs() > PARAM_TOL {
        return Err(Error::InvalidParams(format!(
            "Im(A a) = {:.3e} must vanish",
            (big_a * p.a).im
        )));
    }
    let d1 = p.a * big_b - p.b * big_a + p.b;
    let d2 = p.a * big_b - (p.b * big_a).conj() + p.b;
    let (c2, phase_adjustment) = if c2_seed.norm() == 0.0 {
        (c2_seed, 0.0)
    } else {
        if p.c.norm() == 0.0 {
            return Err(Error::PhaseConditionUnsatisfiable("c = 0".into()));
        }
        let psi = admissible_phase(p, big_b);
        let seed_arg = c2_seed.arg();
        let d0 = wrap(psi - seed_arg);
        let d1_ = wrap(psi + std::f64::consts::PI - seed_arg);
        let delta = if d0.abs() <= d1_.abs() { d0 } else { d1_ };
        (
            Complex64::from_polar(c2_seed.norm(), seed_arg + delta),
            delta,
        )
    };
    let s = SplitSeries::new(
        p.frame,
        exp_coeffs(c1, d1, degree),
        exp_coeffs(c2, d2, degree),
    );
    Ok(SymmetricWeight {
        weight: to_qseries(&s),
        d1,
        d2,
        c2,
        phase_adjustment,
    })
}

/// `max_{m <= m_max} ||W C p^m - C W* p^m|| / ||p^m||`, everything cut at `degree`.
pub fn symmetry_residual(
    w: &WeightedCompOp,
    p: &ConjugationParams,
    m_max: usize,
    degree: usize,
) -> Result<f64> {
    require_d_zero(p)?;
    let bc = boundedness_certificate(&w.split_weight(), w.symbol(), SamplingSpec::default())?;
    if !bc.bounded {
        return Err(Error::UnboundedOperator(bc.reason));
    }
    let mut worst = 0.0f64;
    for m in 0..=m_max {
        let pm = QSeries::monomial(m, crate::quaternion::Quaternion::ONE);
        let cpm = apply_c_abcd(p, &to_split(&pm, p.frame), degree)?;
        let lhs = to_split(&apply(w, &to_qseries(&cpm)), p.frame).truncated(degree);
        let adj = to_split(&adjoint_on_monomial(w, m, degree), p.frame);
        let rhs = apply_c_abcd(p, &adj, degree)?;
        worst = worst.max(split_norm(&split_sub(&lhs, &rhs)) / fock::norm(&pm));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quaternion::{Quaternion, UnitImaginary};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn fr() -> Frame {
        Frame::standard()
    }

    fn poly(seed: u64, deg: usize) -> SplitSeries {
        to_split(&random::polynomial(&mut random::seeded(seed), deg), fr())
    }

    fn gap(a: &SplitSeries, b: &SplitSeries) -> f64 {
        split_norm(&split_sub(a, b))
    }

    #[test]
    fn plain_conjugation() {
        let real = to_split(&QSeries::monomial(3, Quaternion::ONE), fr());
        assert_eq!(conj_c(&real), real);
        let iz = to_split(&QSeries::monomial(1, Quaternion::I), fr());
        let want = to_split(&QSeries::monomial(1, -Quaternion::I), fr());
        assert_eq!(conj_c(&iz), want);
    }

    #[test]
    fn conjugation_is_multiplicative() {
        let f = poly(1, 5);
        let g = poly(2, 4);
        let lhs = conj_c(&star_split(&f, &g).unwrap());
        let rhs = star_split(&conj_c(&f), &conj_c(&g)).unwrap();
        assert!(gap(&lhs, &rhs) < 1e-13);
    }

    #[test]
    fn parameter_validation() {
        assert!(validate_params(&ConjugationParams::identity(fr())).valid);
        let p = ConjugationParams::new(
            c(-1.0, 0.0),
            c(1.0, 0.0),
            c((-0.5f64).exp(), 0.0),
            zero(),
            fr(),
        );
        assert!(validate_params(&p).valid);
        let q = ConjugationParams::new(
            c(1.0, 0.0),
            c(1.0, 0.0),
            c((-0.5f64).exp(), 0.0),
            zero(),
            fr(),
        );
        let v = validate_params(&q);
        assert!(!v.valid);
        assert!((v.involution - 2.0).abs() < 1e-15);
        assert!(matches!(
            apply_c_abcd(&q, &poly(1, 2), 10),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn identity_parameters_reduce_to_plain_conjugation() {
        let f = poly(3, 6);
        let got = apply_c_abcd(&ConjugationParams::identity(fr()), &f, 20).unwrap();
        assert!(gap(&got, &conj_c(&f).truncated(20)) < 1e-15);
    }

    #[test]
    fn shift_operator_is_isometric() {
        let op = AntiWCO::shift(c(0.7, -0.9), fr(), 60);
        let d = anti_linear_defects(&op, 60, 10, 4, 5).unwrap();
        assert!(d.isometry < 1e-9, "{d:?}");
        assert!(d.right_anti_linearity < 1e-12);
    }

    #[test]
    fn anti_linearity_on_units() {
        let op = AntiWCO::new(
            SplitSeries::new(fr(), vec![c(1.0, 0.0)], vec![]),
            AffineSymbol::identity(UnitImaginary::I),
        );
        let f = poly(7, 4);
        let fi = to_qseries(&f).mul_right(Quaternion::I);
        let lhs = anti_wco_apply(&op, &to_split(&fi, fr())).unwrap();
        let rhs = to_qseries(&anti_wco_apply(&op, &f).unwrap()).mul_right(-Quaternion::I);
        assert_eq!(to_qseries(&lhs), rhs);
    }

    #[test]
    fn constant_symbol_is_rejected() {
        let xi = SplitSeries::new(fr(), vec![c(1.0, 0.0)], vec![]);
        let eta = AffineSymbol::new(zero(), c(1.0, 0.0), UnitImaginary::I).unwrap();
        assert!(matches!(
            anti_wco_classify(&xi, &eta, 20, 1),
            Err(Error::ConstantSymbol)
        ));
    }

    #[test]
    fn phase_projection() {
        let p = ConjugationParams::identity(fr());
        let sw =
            symmetric_weight(&p, c(0.5, 0.0), c(0.3, 0.0), c(1.0, 0.0), c(1.0, 0.1), 30).unwrap();
        assert!(sw.c2.re.abs() < 1e-15 && (sw.c2.norm() - c(1.0, 0.1).norm()).abs() < 1e-15);
        let zero_c = ConjugationParams::new(c(1.0, 0.0), zero(), zero(), zero(), fr());
        assert!(matches!(
            symmetric_weight(&zero_c, c(0.5, 0.0), zero(), c(1.0, 0.0), c(1.0, 0.0), 10),
            Err(Error::PhaseConditionUnsatisfiable(_))
        ));
        let sw = symmetric_weight(&p, c(0.5, 0.0), c(0.3, 0.0), c(1.0, 0.0), zero(), 30).unwrap();
        assert_eq!(sw.phase_adjustment, 0.0);
        assert!((sw.d1 - c(0.3, 0.0)).norm() < 1e-15);
    }
}
