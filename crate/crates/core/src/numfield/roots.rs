//! Complex roots of integer polynomials: floating approximations, Newton
//! refinement over Gaussian rationals, and inclusion discs.

use super::interval::{ceil_dyadic, floor_dyadic, ratio_to_f64, sqrt_upper};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Zero};

#[derive(Clone, Debug, PartialEq)]
pub struct Gq {
    pub re: BigRational,
    pub im: BigRational,
}

impl Gq {
    pub fn zero() -> Self {
        Gq {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn from_f64(z: Complex64) -> Self {
        Gq {
            re: BigRational::from_f64(z.re).unwrap_or_else(BigRational::zero),
            im: BigRational::from_f64(z.im).unwrap_or_else(BigRational::zero),
        }
    }

    pub fn to_f64(&self) -> Complex64 {
        Complex64::new(ratio_to_f64(&self.re), ratio_to_f64(&self.im))
    }

    pub fn add(&self, o: &Gq) -> Gq {
        Gq {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }

    pub fn sub(&self, o: &Gq) -> Gq {
        Gq {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }

    pub fn mul(&self, o: &Gq) -> Gq {
        Gq {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    pub fn norm2(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn div(&self, o: &Gq) -> Gq {
        let n = o.norm2();
        Gq {
            re: (&self.re * &o.re + &self.im * &o.im) / &n,
            im: (&self.im * &o.re - &self.re * &o.im) / &n,
        }
    }

    pub fn round(&self, prec: u32) -> Gq {
        Gq {
            re: floor_dyadic(&self.re, prec),
            im: floor_dyadic(&self.im, prec),
        }
    }
}

fn eval_with_derivative(f: &[BigInt], z: &Gq) -> (Gq, Gq) {
    let mut v = Gq::zero();
    let mut dv = Gq::zero();
    for c in f.iter().rev() {
        dv = dv.mul(z).add(&v);
        v = v.mul(z);
        v.re += BigRational::from_integer(c.clone());
    }
    (v, dv)
}

pub fn eval_gq(f: &[BigInt], z: &Gq) -> Gq {
    eval_with_derivative(f, z).0
}

/// Floating approximations of all roots (Aberth iteration).
pub fn approx_roots(f: &[BigInt]) -> Vec<Complex64> {
    let d = f.len() - 1;
    let coeffs: Vec<Complex64> = f
        .iter()
        .map(|c| Complex64::new(ratio_to_f64(&BigRational::from_integer(c.clone())), 0.0))
        .collect();
    let lead = coeffs[d];
    let bound = 1.0
        + coeffs[..d]
            .iter()
            .map(|c| (c / lead).norm())
            .fold(0.0f64, f64::max);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / d as f64 + 0.4;
            Complex64::from_polar(0.5 * bound, ang)
        })
        .collect();
    let eval = |x: Complex64| -> (Complex64, Complex64) {
        let mut v = Complex64::new(0.0, 0.0);
        let mut dv = Complex64::new(0.0, 0.0);
        for c in coeffs.iter().rev() {
            dv = dv * x + v;
            v = v * x + c;
        }
        (v, dv)
    };
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let (v, dv) = eval(z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / dv;
            let s: Complex64 = (0..d)
                .filter(|&j| j != i)
                .map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j]))
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if step.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm());
            }
        }
        if moved < 1e-15 * bound {
            break;
        }
    }
    z
}

/// Newton refinement of a simple root approximation to about `prec` bits.
pub fn newton(f: &[BigInt], start: &Gq, prec: u32) -> Gq {
    let mut z = start.clone();
    let eps = BigRational::new(BigInt::one(), BigInt::one() << prec);
    let eps2 = &eps * &eps;
    for _ in 0..200 {
        let (v, dv) = eval_with_derivative(f, &z);
        if dv.norm2().is_zero() {
            break;
        }
        let step = v.div(&dv);
        z = z.sub(&step).round(prec + 8);
        if step.norm2() < eps2 {
            break;
        }
    }
    z
}

/// Upper bound for the Weierstrass inclusion radius of every approximation:
/// `deg * |f(z_i)| / prod_{j != i} |z_i - z_j|`.
pub fn weierstrass_radii(f: &[BigInt], zs: &[Gq]) -> Option<Vec<BigRational>> {
    let d = zs.len();
    let mut out = Vec::with_capacity(d);
    for i in 0..d {
        let v = eval_gq(f, &zs[i]);
        let mut den = BigRational::one();
        for j in 0..d {
            if j != i {
                den *= zs[i].sub(&zs[j]).norm2();
            }
        }
        if den.is_zero() {
            return None;
        }
        let r2 = v.norm2() / den * BigRational::from_integer(BigInt::from((d * d) as u64));
        out.push(ceil_dyadic(&sqrt_upper(&r2, 200), 200));
    }
    Some(out)
}

/// Certified isolating discs for all roots of a squarefree monic polynomial.
pub fn isolate_all(f: &[BigInt]) -> Vec<(Gq, BigRational)> {
    let starts: Vec<Gq> = approx_roots(f).into_iter().map(Gq::from_f64).collect();
    let mut prec = 64;
    loop {
        let zs: Vec<Gq> = starts.iter().map(|z| newton(f, z, prec)).collect();
        if let Some(rs) = weierstrass_radii(f, &zs) {
            let disjoint = (0..zs.len()).all(|i| {
                (i + 1..zs.len()).all(|j| {
                    let s = &rs[i] + &rs[j];
                    zs[i].sub(&zs[j]).norm2() > &s * &s
                })
            });
            if disjoint {
                return zs.into_iter().zip(rs).collect();
            }
        }
        prec *= 2;
        assert!(prec <= 1 << 14, "root isolation did not converge");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isolate_cube_root_of_two() {
        let f: Vec<BigInt> = [-2, 0, 0, 1].iter().map(|&c| BigInt::from(c)).collect();
        let discs = isolate_all(&f);
        assert_eq!(discs.len(), 3);
        let real: Vec<_> = discs
            .iter()
            .filter(|(z, _)| ratio_to_f64(&z.im).abs() < 1e-9)
            .collect();
        assert_eq!(real.len(), 1);
        assert!((ratio_to_f64(&real[0].0.re) - 2f64.cbrt()).abs() < 1e-12);
    }
}
