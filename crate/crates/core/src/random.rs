//! Seeded generator for random trigonometric test data.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circle::{CircleFunction, Grid, Shape};

/// Deterministic source of trigonometric polynomials.
pub struct TrigRng {
    rng: ChaCha8Rng,
}

impl TrigRng {
    pub fn seeded(seed: u64) -> Self {
        TrigRng {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform in `[-1, 1]`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.gen_range(-1.0..=1.0)
    }

    pub fn complex(&mut self) -> Complex64 {
        Complex64::new(self.uniform(), self.uniform())
    }

    /// Real trigonometric polynomial: uniform coefficients, then symmetrized.
    pub fn real_trig(&mut self, degree: usize) -> CircleFunction {
        let raw: Vec<Complex64> = (0..2 * degree + 1).map(|_| self.complex()).collect();
        CircleFunction::from_coeffs(degree, raw).real_part()
    }

    /// Real trigonometric polynomial with `f(1) = 0`.
    pub fn real_trig_vanishing_at_one(&mut self, degree: usize) -> CircleFunction {
        let f = self.real_trig(degree);
        let at_one = f.at_one()[0];
        f.sub(&CircleFunction::constant(at_one))
    }

    /// Real trigonometric polynomial with zero mean.
    pub fn real_trig_mean_free(&mut self, degree: usize) -> CircleFunction {
        let f = self.real_trig(degree);
        let mean = f.mean()[0];
        f.sub(&CircleFunction::constant(mean))
    }

    /// Complex trigonometric polynomial with coefficients of size `amplitude`.
    pub fn complex_trig(&mut self, degree: usize, amplitude: f64) -> CircleFunction {
        let raw: Vec<Complex64> = (0..2 * degree + 1)
            .map(|_| self.complex() * amplitude)
            .collect();
        CircleFunction::from_coeffs(degree, raw)
    }

    /// Vector of `d` complex trigonometric polynomials vanishing at 1.
    pub fn complex_vector_vanishing_at_one(&mut self, d: usize, degree: usize) -> CircleFunction {
        let entries: Vec<CircleFunction> = (0..d)
            .map(|_| {
                let f = self.complex_trig(degree, 1.0);
                let v = f.at_one()[0];
                f.sub(&CircleFunction::constant(v))
            })
            .collect();
        CircleFunction::from_entries(Shape::Vector(d), &entries)
    }

    /// `sigma^s exp(p)` with `p` a random complex trigonometric polynomial of
    /// degree 3; nonvanishing with winding number `s`.
    pub fn nonvanishing_with_winding(&mut self, s: i64, amplitude: f64) -> CircleFunction {
        let p = self.complex_trig(3, amplitude);
        let degree = s.unsigned_abs() as usize + 40;
        CircleFunction::from_fn(Shape::Scalar, degree, Grid::for_degree(degree), |t| {
            vec![(Complex64::new(0.0, s as f64 * t) + p.eval_scalar(t)).exp()]
        })
        .function
        .trimmed(1e-16)
    }

    /// Point of the disc `|a| <= radius`, uniform in area.
    pub fn point_in_disc(&mut self, radius: f64) -> Complex64 {
        let r = radius * self.rng.gen_range(0.0f64..=1.0).sqrt();
        let t = self.rng.gen_range(0.0..std::f64::consts::TAU);
        Complex64::from_polar(r, t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::winding_number;

    #[test]
    fn same_seed_same_data() {
        let a = TrigRng::seeded(7).real_trig(5);
        let b = TrigRng::seeded(7).real_trig(5);
        assert_eq!(a, b);
        assert_ne!(a, TrigRng::seeded(8).real_trig(5));
    }

    #[test]
    fn real_trig_is_real() {
        let f = TrigRng::seeded(1).real_trig(9);
        assert!(f.reality_defect() < 1e-15);
    }

    #[test]
    fn prescribed_winding() {
        let mut rng = TrigRng::seeded(3);
        for s in -3..=3 {
            let f = rng.nonvanishing_with_winding(s, 0.1);
            assert_eq!(winding_number(&f).unwrap(), s);
        }
    }
}
