//! The scenario suites. Each returns its checks in a fixed order.

use num_complex::Complex64;
use rand::Rng;

use super::config::{complex, ConjugationConfig, ScenarioConfig, SymbolConfig, SymmetricConfig};
use super::report::{Check, Report};
use crate::conjugations::{
    anti_linear_defects, commuting_certificate, symmetric_weight, symmetry_residual,
    validate_params, AntiWCO, ConjugationParams,
};
use crate::error::{Error, Result};
use crate::fock::{
    derivative_at, derivative_kernel, exp_star_closed, exp_star_series, inner, kernel, norm,
    norm_sqr, normalized_kernel, quadrature_inner, KernelParams,
};
use crate::operators::{
    adjoint_on_monomial, apply, boundedness_certificate, compactness_certificate, inverse_residual,
    isometry_certificate, kernel_covariance_residual, make_unitary, unitarity_residual,
    unitary_inverse, weyl, weyl_commutation_residual, weyl_commutation_residual_with_phase,
    AffineSymbol, WeightedCompOp,
};
use crate::quaternion::{Frame, Quaternion, SlicePoint, UnitImaginary};
use crate::random::{self, SeededRng};
use crate::slice_series::{
    compose_affine, eval_quaternion, eval_slice, representation_residual, star,
    star_pointwise_check, star_split, to_qseries, to_split, QSeries,
};

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Report> {
    let checks = match cfg.scenario.as_str() {
        "verify-kernel" => verify_kernel(cfg)?,
        "verify-star" => verify_star(cfg)?,
        "verify-exp-closed" => verify_exp_closed(cfg)?,
        "certify-operator" => certify_operator(cfg)?,
        "certify-conjugation" => certify_conjugation(cfg)?,
        "certify-symmetry" => certify_symmetry(cfg)?,
        "weyl-group" => weyl_group(cfg)?,
        other => return Err(Error::Config(format!("unknown scenario '{other}'"))),
    };
    Ok(Report::new(cfg.clone(), checks))
}

fn random_unit(rng: &mut SeededRng) -> UnitImaginary {
    loop {
        if let Ok(u) = UnitImaginary::new(random::quaternion_in_ball(rng)) {
            return u;
        }
    }
}

fn random_degree_poly(rng: &mut SeededRng, max_degree: usize) -> QSeries {
    let d = rng.gen_range(0..=max_degree);
    random::polynomial(rng, d)
}

/// `sum |a_n| r^n`, the natural size of `f` on the ball of radius `r`.
fn majorant(f: &QSeries, r: f64) -> f64 {
    f.coeffs()
        .iter()
        .rev()
        .fold(0.0, |acc, a| acc * r + a.norm())
}

fn verify_kernel(cfg: &ScenarioConfig) -> Result<Vec<Check>> {
    let n = cfg.truncation.unwrap_or(40);
    let samples = cfg.samples.unwrap_or(50);
    let points = cfg.points.unwrap_or(20);
    let radius = cfg.radius.unwrap_or(2.0);
    let mut rng = random::seeded(cfg.seed());
    let fs: Vec<QSeries> = (0..samples)
        .map(|_| random_degree_poly(&mut rng, 10))
        .collect();
    let qs: Vec<Quaternion> = (0..points)
        .map(|_| random::quaternion_with_radius(&mut rng, radius))
        .collect();

    let mut repro = 0.0f64;
    for q in &qs {
        let k = kernel(KernelParams::new(*q, n));
        for f in &fs {
            repro = repro.max((inner(f, &k) - eval_quaternion(f, *q)).norm());
        }
    }

    let mut knorm = 0.0f64;
    let mut unit = 0.0f64;
    for q in &qs {
        let q = *q * 1.5;
        let want = q.norm_sqr().exp();
        knorm = knorm.max((norm_sqr(&kernel(KernelParams::new(q, n))) - want).abs() / want);
        unit = unit.max((norm(&normalized_kernel(q, n)) - 1.0).abs());
    }

    let mut deriv = 0.0f64;
    for (f, u) in fs.iter().zip(qs.iter().cycle()) {
        for m in 0..=3 {
            let want = derivative_at(f, m, *u);
            let got = inner(f, &derivative_kernel(*u, m, n));
            deriv = deriv.max((got - want).norm() / want.norm().max(1.0));
        }
    }

    let rule = cfg.quadrature.unwrap_or_default();
    let frame = Frame::from_unit(random_unit(&mut rng));
    let mut quad = 0.0f64;
    for pair in fs.chunks(2).take(10) {
        let (f, g) = (&pair[0], pair.get(1).unwrap_or(&pair[0]));
        let got = quadrature_inner(&to_split(f, frame), &to_split(g, frame), rule)?;
        let scale = (norm(f) * norm(g)).max(f64::MIN_POSITIVE);
        quad = quad.max((got - inner(f, g)).norm() / scale);
    }

    Ok(vec![
        Check::bounded_by(
            "reproducing kernel evaluates",
            "fock.reproducing",
            repro,
            cfg.tol_or(1e-8),
        ),
        Check::bounded_by(
            "kernel norm equals exp(|q|^2)",
            "fock.kernel-norm",
            knorm,
            cfg.tol_or(1e-8),
        ),
        Check::bounded_by(
            "normalized kernel has unit norm",
            "fock.unit-kernel",
            unit,
            cfg.tol_or(1e-8),
        ),
        Check::bounded_by(
            "derivative kernels evaluate derivatives",
            "fock.derivative-kernel",
            deriv,
            cfg.tol_or(1e-8),
        ),
        Check::bounded_by(
            "quadrature matches coefficient inner product",
            "fock.quadrature",
            quad,
            cfg.tol_or(1e-8),
        ),
    ])
}

fn verify_star(cfg: &ScenarioConfig) -> Result<Vec<Check>> {
    let samples = cfg.samples.unwrap_or(100);
    let mut rng = random::seeded(cfg.seed());
    let mut conv = 0.0f64;
    let mut pointwise = 0.0f64;
    let mut real_point = 0.0f64;
    let mut assoc = 0.0f64;
    let mut two_path = 0.0f64;
    let mut compose = 0.0f64;
    for _ in 0..samples {
        let f = random_degree_poly(&mut rng, 10);
        let g = random_degree_poly(&mut rng, 10);
        let h = random_degree_poly(&mut rng, 10);
        let frame = Frame::from_unit(random_unit(&mut rng));
        let direct = star(&f, &g);
        let split = to_qseries(&star_split(&to_split(&f, frame), &to_split(&g, frame))?);
        conv = conv.max(direct.max_abs_diff(&split) / direct.max_abs().max(1.0));

        let p = random::quaternion_in_ball(&mut rng);
        pointwise = pointwise.max(star_pointwise_check(&f, &g, p));

        let x = Quaternion::real(rng.gen_range(-1.0..=1.0));
        let lhs = eval_quaternion(&direct, x);
        let rhs = eval_quaternion(&f, x) * eval_quaternion(&g, x);
        let scale = (majorant(&f, x.norm()) * majorant(&g, x.norm())).max(1.0);
        real_point = real_point.max((lhs - rhs).norm() / scale);

        let left = star(&direct, &h);
        let right = star(&f, &star(&g, &h));
        assoc = assoc.max(left.max_abs_diff(&right) / left.max_abs().max(1.0));

        let big = random_degree_poly(&mut rng, 30);
        let q = random::quaternion_with_radius(&mut rng, 3.0);
        two_path = two_path.max(representation_residual(&big, q));

        let unit = frame.i();
        let phi = AffineSymbol::new(
            random::complex_in_disk(&mut rng, 1.0),
            random::complex_in_disk(&mut rng, 1.0),
            unit,
        )?;
        let composed = to_split(&compose_affine(&h, &phi), frame);
        let hs = to_split(&h, frame);
        let z = random::complex_in_disk(&mut rng, 1.0);
        let got = eval_slice(&composed, SlicePoint::from_complex(z, unit))?;
        let want = eval_slice(&hs, SlicePoint::from_complex(phi.eval_complex(z), unit))?;
        let scale = majorant(&h, phi.eval_complex(z).norm()).max(1.0);
        compose = compose.max((got - want).norm() / scale);
    }
    Ok(vec![
        Check::bounded_by(
            "convolution matches split product",
            "slice_series.star-split",
            conv,
            cfg.tol_or(1e-13),
        ),
        Check::bounded_by(
            "pointwise product identity",
            "slice_series.star-pointwise",
            pointwise,
            cfg.tol_or(1e-10),
        ),
        Check::bounded_by(
            "real points multiply pointwise",
            "slice_series.star-real",
            real_point,
            cfg.tol_or(1e-13),
        ),
        Check::bounded_by(
            "product is associative",
            "slice_series.star-associative",
            assoc,
            cfg.tol_or(1e-13),
        ),
        Check::bounded_by(
            "direct and representation evaluation agree",
            "slice_series.representation",
            two_path,
            cfg.tol_or(1e-12),
        ),
        Check::bounded_by(
            "affine composition evaluates",
            "slice_series.compose",
            compose,
            cfg.tol_or(1e-12),
        ),
    ])
}

fn verify_exp_closed(cfg: &ScenarioConfig) -> Result<Vec<Check>> {
    let samples = cfg.samples.unwrap_or(100);
    let radius = cfg.radius.unwrap_or(2.0);
    let mut rng = random::seeded(cfg.seed());
    let mut closed = 0.0f64;
    let mut slice = 0.0f64;
    for _ in 0..samples {
        let p = random::quaternion_with_radius(&mut rng, radius);
        let q = random::quaternion_with_radius(&mut rng, radius);
        let series = exp_star_series(p, q, 1e-16)?;
        closed = closed.max((exp_star_closed(p, q) - series).norm());

        let unit = random_unit(&mut rng);
        let z = random::complex_in_disk(&mut rng, radius);
        let w = random::complex_in_disk(&mut rng, radius);
        let want = unit.embed((z * w).exp());
        let got = exp_star_closed(unit.embed(z), unit.embed(w));
        slice = slice.max((got - want).norm());
    }
    Ok(vec![
        Check::bounded_by(
            "closed form matches series",
            "fock.exp-closed",
            closed,
            cfg.tol_or(1e-10),
        ),
        Check::bounded_by(
            "one slice gives the ordinary exponential",
            "fock.exp-same-slice",
            slice,
            cfg.tol_or(1e-12),
        ),
    ])
}

fn default_symbol() -> SymbolConfig {
    SymbolConfig {
        a: [0.5, 0.0],
        b: [0.0, 0.0],
        unit: None,
    }
}

fn operator_from(cfg: &ScenarioConfig) -> Result<WeightedCompOp> {
    let symbol = cfg.symbol.clone().unwrap_or_else(default_symbol).build()?;
    let weight = match &cfg.weight {
        Some(w) => w.build(symbol.unit(), &cfg.base_dir)?,
        None => QSeries::constant(Quaternion::ONE),
    };
    if weight.is_zero() {
        return Err(Error::Config("weight vanishes identically".into()));
    }
    Ok(WeightedCompOp::new(weight, symbol))
}

fn expectation(name: &str, tag: &str, got: bool, expected: Option<bool>, what: &str) -> Check {
    let word = |b: bool| {
        if b {
            what.to_string()
        } else {
            format!("not {what}")
        }
    };
    match expected {
        Some(e) => Check::verdict(name, tag, if got == e { 0.0 } else { 1.0 }, 0.0, got == e)
            .with_detail(format!("{} (expected {})", word(got), word(e))),
        None => Check::verdict(name, tag, 0.0, 0.0, true)
            .with_detail(format!("{} (informational)", word(got))),
    }
}

fn certify_operator(cfg: &ScenarioConfig) -> Result<Vec<Check>> {
    let n = cfg.truncation.unwrap_or(40);
    let samples = cfg.samples.unwrap_or(20);
    let m_max = cfg.m_max.unwrap_or(10);
    let grid = cfg.grid.unwrap_or_default();
    let w = operator_from(cfg)?;
    let split = w.split_weight();
    let bc = boundedness_certificate(&split, w.symbol(), grid)?;
    let expected = cfg.expect.bounded.unwrap_or(true);
    let verdict = if bc.bounded { "bounded" } else { "unbounded" };
    let mut checks = vec![Check::verdict(
        "boundedness",
        "operators.boundedness",
        bc.m_hat,
        f64::INFINITY,
        bc.bounded == expected,
    )
    .with_detail(format!("{verdict}: {}", bc.reason))];
    let mut rng = random::seeded(cfg.seed());

    let g = random::polynomial(&mut rng, 6);
    let h = random::polynomial(&mut rng, 6);
    let (a, b) = (
        random::quaternion_in_ball(&mut rng),
        random::quaternion_in_ball(&mut rng),
    );
    let lhs = apply(&w, &g.mul_right(a).add(&h.mul_right(b)));
    let rhs = apply(&w, &g).mul_right(a).add(&apply(&w, &h).mul_right(b));
    let lin = lhs.max_abs_diff(&rhs) / lhs.max_abs().max(1.0);
    checks.push(Check::bounded_by(
        "right linearity",
        "operators.right-linear",
        lin,
        cfg.tol_or(1e-13),
    ));

    if bc.bounded {
        let mut dual = 0.0f64;
        for _ in 0..samples {
            let g = random_degree_poly(&mut rng, 10);
            let wg = apply(&w, &g);
            for m in 0..=m_max {
                let pm = QSeries::monomial(m, Quaternion::ONE);
                let lhs = inner(&wg, &pm);
                let rhs = inner(&g, &adjoint_on_monomial(&w, m, n));
                let scale = (norm(&wg) * norm(&pm)).max(f64::MIN_POSITIVE);
                dual = dual.max((lhs - rhs).norm() / scale);
            }
        }
        checks.push(Check::bounded_by(
            "adjoint duality on monomials",
            "operators.adjoint",
            dual,
            cfg.tol_or(1e-9),
        ));
        let pts: Vec<(Quaternion, Quaternion)> = (0..4)
            .map(|_| {
                (
                    random::quaternion_in_ball(&mut rng),
                    random::quaternion_in_ball(&mut rng),
                )
            })
            .collect();
        let cov = kernel_covariance_residual(&w, &pts, n);
        checks.push(Check::bounded_by(
            "kernel covariance",
            "operators.kernel-covariance",
            cov,
            cfg.tol_or(1e-9),
        ));
    }

    let cc = compactness_certificate(&split, w.symbol(), grid)?;
    checks.push(
        expectation(
            "compactness",
            "operators.compactness",
            cc.compact,
            cfg.expect.compact,
            "compact",
        )
        .with_detail(format!(
            "{}: {}",
            if cc.compact { "compact" } else { "not compact" },
            cc.reason
        )),
    );
    let ic = isometry_certificate(&w, 6, n / 2, cfg.seed());
    let mut iso = expectation(
        "isometry",
        "operators.isometry",
        ic.isometric,
        cfg.expect.isometric,
        "isometric",
    );
    iso.residual = ic.numeric_residual;
    checks.push(iso);
    Ok(checks)
}

fn conjugation_params(c: &ConjugationConfig, frame: Frame) -> ConjugationParams {
    ConjugationParams::new(
        complex(c.a),
        complex(c.b),
        complex(c.c),
        complex(c.d),
        frame,
    )
}

fn slice_frame(cfg: &ScenarioConfig) -> Result<Frame> {
    Ok(Frame::from_unit(match &cfg.symbol {
        Some(s) => s.unit()?,
        None => UnitImaginary::I,
    }))
}

fn certify_conjugation(cfg: &ScenarioConfig) -> Result<Vec<Check>> {
    let n = cfg.truncation.unwrap_or(50);
    let samples = cfg.samples.unwrap_or(10);
    let frame = slice_frame(cfg)?;
    let p = conjugation_params(&cfg.conjugation.clone().unwrap_or_default(), frame);
    let v = validate_params(&p);
    let worst = v.modulus.max(v.norm).max(v.involution);
    let mut checks =
        vec![
            Check::bounded_by("parameters are valid", "conjugations.params", worst, 1e-12)
                .with_detail(format!(
                    "modulus {:.3e}, norm {:.3e}, involution {:.3e}",
                    v.modulus, v.norm, v.involution
                )),
        ];
    if !v.valid {
        return Ok(checks);
    }
    let op = AntiWCO::from_params(&p, n);
    let d = anti_linear_defects(&op, n, 10.min(n / 2), samples, cfg.seed())?;
    checks.push(Check::bounded_by(
        "applying twice is the identity",
        "conjugations.involution",
        d.involution,
        cfg.tol_or(1e-10),
    ));
    checks.push(Check::bounded_by(
        "norm is preserved",
        "conjugations.isometry",
        d.isometry,
        cfg.tol_or(1e-10),
    ));
    checks.push(Check::bounded_by(
        "right anti-linearity",
        "conjugations.right-anti-linear",
        d.right_anti_linearity,
        cfg.tol_or(1e-12),
    ));
    checks.push(
        Check::verdict(
            "left anti-linearity",
            "conjugations.left-anti-linear",
            d.left_anti_linearity,
            1e-12,
            true,
        )
        .with_detail(format!(
            "{} (informational)",
            if d.left_anti_linearity <= 1e-12 {
                "holds"
            } else {
                "fails"
            }
        )),
    );
    if cfg.symbol.is_some() && cfg.weight.is_some() && p.d.norm() == 0.0 {
        let w = operator_from(cfg)?;
        let m_max = cfg.m_max.unwrap_or(15);
        let cert = commuting_certificate(&w, &p, m_max, n)?;
        checks.push(expectation(
            "conjugate commuting",
            "conjugations.commuting",
            cert.structural,
            cfg.expect.commuting,
            "commuting",
        ));
        let consistent = if cert.structural {
            cert.residual <= 1e-9
        } else {
            cert.residual > 1e-3
        };
        checks.push(
            Check::verdict(
                "structure matches numerics",
                "conjugations.commuting-numeric",
                cert.residual,
                1e-9,
                consistent,
            )
            .with_detail(format!("structural defect {:.3e}", cert.conditions.worst())),
        );
    }
    Ok(checks)
}

fn certify_symmetry(cfg: &ScenarioConfig) -> Result<Vec<Check>> {
    let n = cfg.truncation.unwrap_or(60);
    let m_max = cfg.m_max.unwrap_or(15);
    let frame = slice_frame(cfg)?;
    let p = conjugation_params(&cfg.conjugation.clone().unwrap_or_default(), frame);
    let s: SymmetricConfig = cfg.symmetric.clone().unwrap_or_default();
    let (big_a, big_b) = (complex(s.a), complex(s.b));
    let sw = symmetric_weight(&p, big_a, big_b, complex(s.c1), complex(s.c2), n)?;
    let symbol = AffineSymbol::new(big_a, big_b, frame.i())?;
    let w = WeightedCompOp::new(sw.weight.clone(), symbol);
    let bc = boundedness_certificate(&w.split_weight(), &symbol, cfg.grid.unwrap_or_default())?;
    let mut checks = vec![Check::verdict(
        "boundedness",
        "operators.boundedness",
        bc.m_hat,
        f64::INFINITY,
        bc.bounded,
    )
    .with_detail(bc.reason.clone())];
    if !bc.bounded {
        return Ok(checks);
    }
    let r = symmetry_residual(&w, &p, m_max, n)?;
    checks.push(
        Check::bounded_by(
            "complex symmetric",
            "conjugations.symmetric",
            r,
            cfg.tol_or(1e-8),
        )
        .with_detail(format!(
            "second constant phase moved by {:.6}",
            sw.phase_adjustment
        )),
    );
    if big_a.norm() < 1.0 - 1e-12 && big_a.norm() > 0.0 {
        let tilted = AffineSymbol::new(big_a * Complex64::from_polar(1.0, 0.2), big_b, frame.i())?;
        let wp = WeightedCompOp::new(sw.weight, tilted);
        let rp = symmetry_residual(&wp, &p, m_max, n)?;
        checks.push(Check::exceeds(
            "rotating A breaks symmetry",
            "conjugations.symmetric-perturbed",
            rp,
            1e-3,
        ));
    }
    Ok(checks)
}

fn weyl_group(cfg: &ScenarioConfig) -> Result<Vec<Check>> {
    let n = cfg.truncation.unwrap_or(40);
    let samples = cfg.samples.unwrap_or(10);
    let radius = cfg.radius.unwrap_or(1.0);
    let unit = match &cfg.symbol {
        Some(s) => s.unit()?,
        None => UnitImaginary::I,
    };
    let mut rng = random::seeded(cfg.seed());
    let mut comm = 0.0f64;
    let mut inv = 0.0f64;
    let mut unitary = 0.0f64;
    let mut built = 0.0f64;
    for _ in 0..samples {
        let u = random::complex_in_disk(&mut rng, radius);
        let v = random::complex_in_disk(&mut rng, radius);
        comm = comm.max(weyl_commutation_residual(u, v, n, unit));
        inv = inv.max(weyl_commutation_residual_with_phase(u, -u, 0.0, n, unit));
        unitary = unitary.max(unitarity_residual(&weyl(u, n, unit), n));
        let lambda = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
        let w = make_unitary(lambda, v, n, unit)?;
        let wi = unitary_inverse(lambda, v, n, unit)?;
        built = built
            .max(unitarity_residual(&w, n))
            .max(inverse_residual(&w, &wi, n));
    }
    Ok(vec![
        Check::bounded_by(
            "Weyl commutation relation",
            "operators.weyl",
            comm,
            cfg.tol_or(1e-7),
        ),
        Check::bounded_by(
            "opposite shift inverts",
            "operators.weyl-inverse",
            inv,
            cfg.tol_or(1e-7),
        ),
        Check::bounded_by(
            "Weyl operators are unitary",
            "operators.weyl-unitary",
            unitary,
            cfg.tol_or(1e-7),
        ),
        Check::bounded_by(
            "constructed unitaries and inverses",
            "operators.unitary",
            built,
            cfg.tol_or(1e-7),
        ),
    ])
}
