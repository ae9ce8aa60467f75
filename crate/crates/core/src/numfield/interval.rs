//! Rational interval arithmetic with dyadic outward rounding, complex
//! rectangles, and certified enclosures of pi, cos and sin.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::sync::OnceLock;

pub fn floor_dyadic(x: &BigRational, prec: u32) -> BigRational {
    let scale = BigInt::one() << prec;
    let n = (x.numer() * &scale).div_floor(x.denom());
    BigRational::new(n, scale)
}

pub fn ceil_dyadic(x: &BigRational, prec: u32) -> BigRational {
    let scale = BigInt::one() << prec;
    let n = -((-(x.numer() * &scale)).div_floor(x.denom()));
    BigRational::new(n, scale)
}

/// Upper bound for the square root of a nonnegative rational.
pub fn sqrt_upper(x: &BigRational, prec: u32) -> BigRational {
    if x.is_zero() {
        return BigRational::zero();
    }
    let scale2 = BigInt::one() << (2 * prec);
    let n = -((-(x.numer() * &scale2)).div_floor(x.denom()));
    let r = n.sqrt() + BigInt::one();
    BigRational::new(r, BigInt::one() << prec)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Interval {
    pub fn point(x: BigRational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn zero() -> Self {
        Self::point(BigRational::zero())
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval::new(&self.lo + &o.lo, &self.hi + &o.hi)
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        Interval::new(&self.lo - &o.hi, &self.hi - &o.lo)
    }

    pub fn neg(&self) -> Interval {
        Interval::new(-&self.hi, -&self.lo)
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let c = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let mut lo = c[0].clone();
        let mut hi = c[0].clone();
        for v in &c[1..] {
            if *v < lo {
                lo = v.clone();
            }
            if *v > hi {
                hi = v.clone();
            }
        }
        Interval::new(lo, hi)
    }

    pub fn scale(&self, k: &BigRational) -> Interval {
        let a = &self.lo * k;
        let b = &self.hi * k;
        if a <= b {
            Interval::new(a, b)
        } else {
            Interval::new(b, a)
        }
    }

    pub fn round_out(&self, prec: u32) -> Interval {
        Interval::new(floor_dyadic(&self.lo, prec), ceil_dyadic(&self.hi, prec))
    }

    /// Sign if the interval excludes zero.
    pub fn sign(&self) -> Option<i8> {
        if self.lo.is_positive() {
            Some(1)
        } else if self.hi.is_negative() {
            Some(-1)
        } else {
            None
        }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> BigRational {
        (&self.lo + &self.hi) / BigInt::from(2)
    }

    /// Hull with a symmetric error term of size `err`.
    pub fn widen(&self, err: &BigRational) -> Interval {
        Interval::new(&self.lo - err, &self.hi + err)
    }

    pub fn abs_upper(&self) -> BigRational {
        let a = self.lo.abs();
        let b = self.hi.abs();
        if a > b {
            a
        } else {
            b
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rect {
    pub re: Interval,
    pub im: Interval,
}

impl Rect {
    pub fn point(re: BigRational, im: BigRational) -> Self {
        Rect {
            re: Interval::point(re),
            im: Interval::point(im),
        }
    }

    pub fn real(x: BigRational) -> Self {
        Self::point(x, BigRational::zero())
    }

    pub fn add(&self, o: &Rect) -> Rect {
        Rect {
            re: self.re.add(&o.re),
            im: self.im.add(&o.im),
        }
    }

    pub fn mul(&self, o: &Rect) -> Rect {
        Rect {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    pub fn scale(&self, k: &BigRational) -> Rect {
        Rect {
            re: self.re.scale(k),
            im: self.im.scale(k),
        }
    }

    pub fn round_out(&self, prec: u32) -> Rect {
        Rect {
            re: self.re.round_out(prec),
            im: self.im.round_out(prec),
        }
    }

    pub fn conj(&self) -> Rect {
        Rect {
            re: self.re.clone(),
            im: self.im.neg(),
        }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (ratio_to_f64(&self.re.mid()), ratio_to_f64(&self.im.mid()))
    }
}

pub fn ratio_to_f64(x: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or_else(|| {
        // Fall back to a dyadic approximation for huge numerators.
        floor_dyadic(x, 60).to_f64().unwrap_or(f64::NAN)
    })
}

// ---- pi, cos, sin ----

fn atan_inv(m: u64, prec: u32) -> Interval {
    // atan(1/m) = sum (-1)^k / ((2k+1) m^(2k+1)); the tail is bounded by the
    // first omitted term since terms decrease in magnitude.
    let m = BigInt::from(m);
    let m2 = &m * &m;
    let mut pow = m.clone();
    let mut sum = BigRational::zero();
    let eps = BigRational::new(BigInt::one(), BigInt::one() << (prec + 4));
    let mut k: u64 = 0;
    loop {
        let term = BigRational::new(BigInt::one(), BigInt::from(2 * k + 1) * &pow);
        if term < eps {
            return Interval::new(&sum - &term, &sum + &term).round_out(prec + 2);
        }
        if k.is_multiple_of(2) {
            sum += &term;
        } else {
            sum -= &term;
        }
        sum = floor_dyadic(&sum, prec + 8);
        pow = &pow * &m2;
        k += 1;
    }
}

fn compute_pi(prec: u32) -> Interval {
    let a = atan_inv(5, prec + 8);
    let b = atan_inv(239, prec + 8);
    let slack = BigRational::new(BigInt::one(), BigInt::one() << (prec + 4));
    a.scale(&BigRational::from_integer(BigInt::from(16)))
        .sub(&b.scale(&BigRational::from_integer(BigInt::from(4))))
        .widen(&slack)
        .round_out(prec)
}

const PI_CACHE_PREC: u32 = 640;

pub fn pi_enclosure(prec: u32) -> Interval {
    static CACHE: OnceLock<Interval> = OnceLock::new();
    if prec <= PI_CACHE_PREC {
        CACHE.get_or_init(|| compute_pi(PI_CACHE_PREC)).clone()
    } else {
        compute_pi(prec)
    }
}

/// Enclosures of cos(x) and sin(x) for a rational point 0 <= x <= 2.
fn cos_sin_point(x: &BigRational, prec: u32) -> (Interval, Interval) {
    let eps = BigRational::new(BigInt::one(), BigInt::one() << (prec + 4));
    let mut cos_sum = Interval::zero();
    let mut sin_sum = Interval::zero();
    // term_k = x^k / k!
    let mut term = Interval::point(BigRational::one());
    let mut k: u64 = 0;
    loop {
        if term.hi < eps && k > 2 {
            let tail = term.hi.clone();
            return (
                cos_sum.widen(&tail).round_out(prec + 2),
                sin_sum.widen(&tail).round_out(prec + 2),
            );
        }
        let signed = if (k / 2).is_multiple_of(2) { term.clone() } else { term.neg() };
        if k.is_multiple_of(2) {
            cos_sum = cos_sum.add(&signed);
        } else {
            sin_sum = sin_sum.add(&signed);
        }
        k += 1;
        term = term
            .scale(&(x / BigRational::from_integer(BigInt::from(k))))
            .round_out(prec + 8);
    }
}

/// Enclosures of cos(2 pi t) and sin(2 pi t) for a rational number of turns.
pub fn cos_sin_turn(t: &BigRational, prec: u32) -> (Interval, Interval) {
    let frac = t - t.floor();
    let four = BigRational::from_integer(BigInt::from(4));
    let scaled = &frac * &four;
    let q = scaled.floor();
    let quadrant: i64 = num_traits::ToPrimitive::to_i64(&q.to_integer()).unwrap();
    let r = &frac - q / &four;
    let (c, s) = if r.is_zero() {
        (
            Interval::point(BigRational::one()),
            Interval::point(BigRational::zero()),
        )
    } else {
        let two_r = &r * BigRational::from_integer(BigInt::from(2));
        let pi = pi_enclosure(prec + 16);
        let xl = floor_dyadic(&(&pi.lo * &two_r), prec + 16);
        let xh = ceil_dyadic(&(&pi.hi * &two_r), prec + 16);
        // On [0, pi/2] cos decreases and sin increases.
        let (cl, sl) = cos_sin_point(&xl, prec + 8);
        let (ch, sh) = cos_sin_point(&xh, prec + 8);
        (
            Interval::new(ch.lo.clone(), cl.hi.clone()),
            Interval::new(sl.lo.clone(), sh.hi.clone()),
        )
    };
    match quadrant {
        0 => (c, s),
        1 => (s.neg(), c),
        2 => (c.neg(), s.neg()),
        _ => (s, c.neg()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn pi_digits() {
        let p = pi_enclosure(100);
        assert!(ratio_to_f64(&p.lo) <= std::f64::consts::PI + 1e-15);
        assert!(ratio_to_f64(&p.hi) >= std::f64::consts::PI - 1e-15);
        assert!(p.width() < q(1, 1 << 60));
    }

    #[test]
    fn trig_matches_f64() {
        for (n, d) in [(1, 8), (3, 7), (-5, 12), (11, 13), (1, 3), (7, 4)] {
            let t = q(n, d);
            let (c, s) = cos_sin_turn(&t, 60);
            let ang = 2.0 * std::f64::consts::PI * (n as f64) / (d as f64);
            assert!((ratio_to_f64(&c.mid()) - ang.cos()).abs() < 1e-12, "{n}/{d}");
            assert!((ratio_to_f64(&s.mid()) - ang.sin()).abs() < 1e-12, "{n}/{d}");
            assert!(c.lo <= c.hi && s.lo <= s.hi);
        }
    }

    #[test]
    fn sqrt_upper_bounds() {
        let x = q(2, 1);
        let r = sqrt_upper(&x, 40);
        assert!(&r * &r >= x);
        assert!(ratio_to_f64(&r) - 2f64.sqrt() < 1e-10);
    }
}
