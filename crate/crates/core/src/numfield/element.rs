use super::field::{FieldSpec, Q};
use super::interval::{ratio_to_f64, Rect};
use crate::error::{Error, Result};
use num_complex::Complex64;
use num_traits::{One, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(v: i8) -> Sign {
        match v.signum() {
            -1 => Sign::Negative,
            0 => Sign::Zero,
            _ => Sign::Positive,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn negate(self) -> Sign {
        Sign::of(-self.as_i8())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// An element of K in the power basis 1, alpha, ..., alpha^(d-1).
#[derive(Clone)]
pub struct FieldElement {
    field: Arc<FieldSpec>,
    coords: Vec<Q>,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords && same_field(&self.field, &other.field)
    }
}

impl Eq for FieldElement {}

impl std::hash::Hash for FieldElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coords.hash(state);
    }
}

pub(crate) fn same_field(a: &Arc<FieldSpec>, b: &Arc<FieldSpec>) -> bool {
    Arc::ptr_eq(a, b) || a.as_ref() == b.as_ref()
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.degree() == 1 {
            return write!(f, "{}", self.coords[0]);
        }
        let mut first = true;
        for (k, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})a")?,
                _ => write!(f, "({c})a^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl FieldElement {
    pub fn from_coords(field: &Arc<FieldSpec>, mut coords: Vec<Q>) -> Self {
        coords.resize(field.degree(), Q::zero());
        FieldElement {
            field: field.clone(),
            coords,
        }
    }

    pub fn from_rational(field: &Arc<FieldSpec>, x: Q) -> Self {
        let mut c = vec![Q::zero(); field.degree()];
        c[0] = x;
        FieldElement {
            field: field.clone(),
            coords: c,
        }
    }

    pub fn from_int(field: &Arc<FieldSpec>, n: i64) -> Self {
        Self::from_rational(field, super::field::q_int(n))
    }

    pub fn zero(field: &Arc<FieldSpec>) -> Self {
        Self::from_int(field, 0)
    }

    pub fn one(field: &Arc<FieldSpec>) -> Self {
        Self::from_int(field, 1)
    }

    pub fn generator(field: &Arc<FieldSpec>) -> Self {
        Self::from_coords(field, field.generator_coords())
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn coords(&self) -> &[Q] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coords[0].is_one() && self.coords[1..].iter().all(|c| c.is_zero())
    }

    /// The rational value if the element lies in Q.
    pub fn as_rational(&self) -> Option<Q> {
        if self.coords[1..].iter().all(|c| c.is_zero()) {
            Some(self.coords[0].clone())
        } else {
            None
        }
    }

    fn check(&self, o: &FieldElement) -> Result<()> {
        if same_field(&self.field, &o.field) {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn arith(&self, o: &FieldElement, op: ArithOp) -> Result<FieldElement> {
        self.check(o)?;
        Ok(match op {
            ArithOp::Add => self.raw_add(o),
            ArithOp::Sub => self.raw_sub(o),
            ArithOp::Mul => self.raw_mul(o),
            ArithOp::Div => return self.div(o),
        })
    }

    fn raw_add(&self, o: &FieldElement) -> FieldElement {
        let coords = self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect();
        FieldElement {
            field: self.field.clone(),
            coords,
        }
    }

    fn raw_sub(&self, o: &FieldElement) -> FieldElement {
        let coords = self.coords.iter().zip(&o.coords).map(|(a, b)| a - b).collect();
        FieldElement {
            field: self.field.clone(),
            coords,
        }
    }

    fn raw_mul(&self, o: &FieldElement) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            coords: self.field.mul_coords(&self.coords, &o.coords),
        }
    }

    pub fn inv(&self) -> Result<FieldElement> {
        let c = self.field.inv_coords(&self.coords).ok_or(Error::DivisionByZero)?;
        Ok(FieldElement {
            field: self.field.clone(),
            coords: c,
        })
    }

    pub fn div(&self, o: &FieldElement) -> Result<FieldElement> {
        self.check(o)?;
        Ok(self.raw_mul(&o.inv()?))
    }

    pub fn scale(&self, k: &Q) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            coords: self.coords.iter().map(|c| c * k).collect(),
        }
    }

    pub fn pow(&self, mut e: u64) -> FieldElement {
        let mut base = self.clone();
        let mut acc = FieldElement::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.raw_mul(&base);
            }
            base = base.raw_mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Complex conjugate, computed inside K.
    pub fn conj(&self) -> Result<FieldElement> {
        let im = self.field.conj_coords().ok_or(Error::NotConjugationClosed)?;
        Ok(FieldElement {
            field: self.field.clone(),
            coords: self.field.compose_coords(&self.coords, im),
        })
    }

    /// Certified rectangle containing the embedding of the element.
    pub fn enclosure(&self, prec: u32) -> Rect {
        let a = self.field.alpha_rect(prec + 8);
        let mut acc = Rect::real(Q::zero());
        for c in self.coords.iter().rev() {
            acc = acc.mul(&a).add(&Rect::real(c.clone())).round_out(prec + 8);
        }
        acc
    }

    pub fn to_complex(&self) -> Complex64 {
        let a = self.field.alpha_f64();
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coords.iter().rev() {
            acc = acc * a + ratio_to_f64(c);
        }
        acc
    }

    /// Exact signs of the real and imaginary parts of the embedding.
    pub fn sign_re_im(&self) -> Result<(Sign, Sign)> {
        let c = self.conj()?;
        let re_zero = self.raw_add(&c).is_zero();
        let im_zero = self.raw_sub(&c).is_zero();
        let mut prec = 48;
        loop {
            let r = self.enclosure(prec);
            let sr = if re_zero { Some(0) } else { r.re.sign() };
            let si = if im_zero { Some(0) } else { r.im.sign() };
            if let (Some(a), Some(b)) = (sr, si) {
                return Ok((Sign::of(a), Sign::of(b)));
            }
            prec *= 2;
        }
    }
}

impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, o: &FieldElement) -> FieldElement {
        self.arith(o, ArithOp::Add).expect("field mismatch")
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, o: &FieldElement) -> FieldElement {
        self.arith(o, ArithOp::Sub).expect("field mismatch")
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, o: &FieldElement) -> FieldElement {
        self.arith(o, ArithOp::Mul).expect("field mismatch")
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

/// Free-function form of the four field operations.
pub fn arith(a: &FieldElement, b: &FieldElement, op: ArithOp) -> Result<FieldElement> {
    a.arith(b, op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::field::q_frac;

    #[test]
    fn gaussian_arith() {
        let k = FieldSpec::gaussian();
        let i = FieldElement::generator(&k);
        let one = FieldElement::one(&k);
        assert_eq!(&(&i * &i) + &one, FieldElement::zero(&k));
        let x = &one + &i;
        let y = x.inv().unwrap();
        assert_eq!(&x * &y, one);
        assert_eq!(y.coords(), &[q_frac(1, 2), q_frac(-1, 2)]);
        assert_eq!(
            FieldElement::zero(&k).inv().unwrap_err(),
            Error::DivisionByZero
        );
    }

    #[test]
    fn signs() {
        let k = FieldSpec::gaussian();
        let i = FieldElement::generator(&k);
        assert_eq!(i.sign_re_im().unwrap(), (Sign::Zero, Sign::Positive));
        let s2 = FieldSpec::sqrt2();
        let r = FieldElement::generator(&s2);
        let x = &FieldElement::one(&s2) - &r;
        assert_eq!(x.sign_re_im().unwrap(), (Sign::Negative, Sign::Zero));
        assert_eq!(
            FieldElement::zero(&s2).sign_re_im().unwrap(),
            (Sign::Zero, Sign::Zero)
        );
    }

    #[test]
    fn mismatch() {
        let a = FieldElement::one(&FieldSpec::gaussian());
        let b = FieldElement::one(&FieldSpec::sqrt2());
        assert_eq!(a.arith(&b, ArithOp::Add).unwrap_err(), Error::FieldMismatch);
    }
}
