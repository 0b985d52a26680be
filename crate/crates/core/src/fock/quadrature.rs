//! Independent evaluation of the inner product as a Gaussian-weighted area
//! integral over one slice.
//!
//! With `t = r^2` the measure `e^{-|z|^2} dA / pi` becomes
//! `e^{-t} dt * dtheta / (2 pi)`: Gauss-Laguerre in `t`, trapezoid in `theta`.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLaguerre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quaternion::{Quaternion, SlicePoint};
use crate::slice_series::{eval_slice, SplitSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub radial: usize,
    pub angular: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            radial: 64,
            angular: 64,
        }
    }
}

impl QuadratureSpec {
    /// Fails unless both degrees are integrated exactly: the radial rule
    /// handles `t^s` for `s <= 2 radial - 1`, the angular rule separates
    /// frequencies below `angular`.
    pub fn check(&self, deg_f: usize, deg_g: usize) -> Result<()> {
        let ok = self.radial > 0
            && self.angular > 0
            && deg_f + deg_g <= 2 * (2 * self.radial - 1)
            && deg_f.max(deg_g) < self.angular;
        if ok {
            Ok(())
        } else {
            Err(Error::InsufficientRule {
                radial: self.radial,
                angular: self.angular,
                degree: deg_f.max(deg_g),
            })
        }
    }
}

/// `integral conj(g_I(z)) f_I(z) e^{-|z|^2} dA / pi` over the slice of `f`.
pub fn quadrature_inner(
    f: &SplitSeries,
    g: &SplitSeries,
    rule: QuadratureSpec,
) -> Result<Quaternion> {
    if !f.frame().same_slice(&g.frame()) {
        return Err(Error::SliceMismatch);
    }
    rule.check(f.degree(), g.degree())?;
    let radial = NonZeroUsize::new(rule.radial).expect("checked above");
    let lag = GaussLaguerre::new(radial, 0.0.try_into().expect("alpha is finite"));
    let unit = f.frame().i();
    let m = rule.angular;
    let mut acc = Quaternion::ZERO;
    for (t, w) in lag.iter() {
        let r = t.sqrt();
        let mut ring = Quaternion::ZERO;
        for k in 0..m {
            let z = Complex64::from_polar(r, 2.0 * PI * k as f64 / m as f64);
            let p = SlicePoint::from_complex(z, unit);
            let fv = eval_slice(f, p)?;
            let gv = eval_slice(g, p)?;
            ring += gv.conj() * fv;
        }
        acc += ring * (w / m as f64);
    }
    Ok(acc)
}
