//! Seeded sampling of quaternions, slice scalars and polynomials.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::quaternion::Quaternion;
use crate::slice_series::QSeries;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform in the closed unit ball of H, by rejection from the cube.
pub fn quaternion_in_ball<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    loop {
        let q = Quaternion::new(
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
        );
        if q.norm_sqr() <= 1.0 {
            return q;
        }
    }
}

/// Uniform in the ball of the given radius.
pub fn quaternion_with_radius<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Quaternion {
    quaternion_in_ball(rng) * radius
}

/// Uniform in the closed disk of the given radius.
pub fn complex_in_disk<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Complex64 {
    loop {
        let z = Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
        if z.norm_sqr() <= 1.0 {
            return z * radius;
        }
    }
}

/// Polynomial of the given degree with coefficients uniform in the unit ball.
pub fn polynomial<R: Rng + ?Sized>(rng: &mut R, degree: usize) -> QSeries {
    QSeries::new((0..=degree).map(|_| quaternion_in_ball(rng)).collect())
}
