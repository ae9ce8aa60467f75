//! Puiseux polar parts: finite sums of c * z^(-a) with rational a > 0.

use crate::error::{Error, Result};
use crate::numfield::{self, FieldElement, FieldSpec, GaloisAction};
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Signed;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

pub type Exp = Rational64;

/// Polar part phi = sum_a c_a z^(-a). The zero polar part has no terms.
#[derive(Clone, PartialEq, Eq)]
pub struct PuiseuxExponent {
    field: Arc<FieldSpec>,
    n: u32,
    terms: BTreeMap<Exp, FieldElement>,
}

impl fmt::Debug for PuiseuxExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PuiseuxExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms()
            .map(|(a, c)| format!("[{c}] z^(-{a})"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl std::hash::Hash for PuiseuxExponent {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        for (a, c) in &self.terms {
            a.hash(state);
            c.hash(state);
        }
    }
}

fn lcm_denoms<'a>(it: impl Iterator<Item = &'a Exp>) -> i64 {
    it.fold(1i64, |acc, a| acc.lcm(a.denom()))
}

impl PuiseuxExponent {
    pub fn new(field: &Arc<FieldSpec>, terms: Vec<(Exp, FieldElement)>) -> Result<Self> {
        let mut map: BTreeMap<Exp, FieldElement> = BTreeMap::new();
        for (a, c) in terms {
            if !a.is_positive() {
                return Err(Error::Malformed(format!("exponent {a} is not positive")));
            }
            if c.field().as_ref() != field.as_ref() {
                return Err(Error::FieldMismatch);
            }
            let e = map.entry(a).or_insert_with(|| FieldElement::zero(field));
            *e = &*e + &c;
        }
        map.retain(|_, c| !c.is_zero());
        let n = lcm_denoms(map.keys()) as u32;
        Ok(PuiseuxExponent {
            field: field.clone(),
            n,
            terms: map,
        })
    }

    pub fn zero(field: &Arc<FieldSpec>) -> Self {
        PuiseuxExponent {
            field: field.clone(),
            n: 1,
            terms: BTreeMap::new(),
        }
    }

    /// c * z^(-a)
    pub fn monomial(c: FieldElement, a: Exp) -> Result<Self> {
        let f = c.field().clone();
        Self::new(&f, vec![(a, c)])
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    /// Minimal ramification index.
    pub fn ramification(&self) -> u32 {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms ordered from the most singular downwards.
    pub fn terms(&self) -> impl Iterator<Item = (&Exp, &FieldElement)> {
        self.terms.iter().rev()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, a: &Exp) -> Option<&FieldElement> {
        self.terms.get(a)
    }

    pub fn leading(&self) -> Option<(Exp, &FieldElement)> {
        self.terms.iter().next_back().map(|(a, c)| (*a, c))
    }

    /// The polar part with the leading term removed.
    pub fn tail(&self) -> PuiseuxExponent {
        let mut t = self.terms.clone();
        if let Some(k) = t.keys().next_back().cloned() {
            t.remove(&k);
        }
        Self::from_map(&self.field, t)
    }

    fn from_map(field: &Arc<FieldSpec>, terms: BTreeMap<Exp, FieldElement>) -> Self {
        let n = lcm_denoms(terms.keys()) as u32;
        PuiseuxExponent {
            field: field.clone(),
            n,
            terms,
        }
    }

    fn combine(&self, o: &PuiseuxExponent, sign: bool) -> Result<PuiseuxExponent> {
        if self.field.as_ref() != o.field.as_ref() {
            return Err(Error::FieldMismatch);
        }
        let mut t = self.terms.clone();
        for (a, c) in &o.terms {
            let e = t.entry(*a).or_insert_with(|| FieldElement::zero(&self.field));
            *e = if sign { &*e + c } else { &*e - c };
        }
        t.retain(|_, c| !c.is_zero());
        Ok(Self::from_map(&self.field, t))
    }

    pub fn add(&self, o: &PuiseuxExponent) -> Result<PuiseuxExponent> {
        self.combine(o, true)
    }

    /// phi - psi; the result may be the zero polar part.
    pub fn difference(&self, o: &PuiseuxExponent) -> Result<PuiseuxExponent> {
        self.combine(o, false)
    }

    pub fn neg(&self) -> PuiseuxExponent {
        self.map_coeffs(|c| -c)
    }

    fn map_coeffs(&self, f: impl Fn(&FieldElement) -> FieldElement) -> PuiseuxExponent {
        let t = self.terms.iter().map(|(a, c)| (*a, f(c))).collect();
        Self::from_map(&self.field, t)
    }

    /// Continuation of the polar part j times counterclockwise around the
    /// puncture: the coefficient of z^(-a) picks up exp(-2 pi i a j).
    pub fn monodromy_shift(&self, j: i64) -> Result<PuiseuxExponent> {
        let scaled: Vec<Exp> = self.terms.keys().map(|a| a * Exp::from_integer(j)).collect();
        let n = lcm_denoms(scaled.iter());
        if n == 1 {
            return Ok(self.clone());
        }
        let zeta = numfield::root_of_unity(&self.field, n as u64)?;
        let t = self
            .terms
            .iter()
            .zip(&scaled)
            .map(|((a, c), s)| {
                // exp(-2 pi i s) = zeta^(-s n mod n)
                let k = (-(s * Exp::from_integer(n))).to_integer().rem_euclid(n);
                (*a, c * &zeta.pow(k as u64))
            })
            .collect();
        Ok(Self::from_map(&self.field, t))
    }

    /// Coefficientwise c -> -conj(c).
    pub fn c_conjugate(&self) -> Result<PuiseuxExponent> {
        let mut t = BTreeMap::new();
        for (a, c) in &self.terms {
            t.insert(*a, -c.conj()?);
        }
        Ok(Self::from_map(&self.field, t))
    }

    /// Coefficientwise c -> conj(c).
    pub fn conjugate(&self) -> Result<PuiseuxExponent> {
        let mut t = BTreeMap::new();
        for (a, c) in &self.terms {
            t.insert(*a, c.conj()?);
        }
        Ok(Self::from_map(&self.field, t))
    }

    pub fn apply_automorphism(&self, s: &GaloisAction) -> PuiseuxExponent {
        self.map_coeffs(|c| s.apply(c))
    }

    /// Push the coefficients into another field.
    pub fn map_into(&self, field: &Arc<FieldSpec>, f: impl Fn(&FieldElement) -> FieldElement) -> PuiseuxExponent {
        let t = self.terms.iter().map(|(a, c)| (*a, f(c))).collect();
        Self::from_map(field, t)
    }

    /// Floating value of Re(phi) at the point with radius r and lifted
    /// argument theta (in turns) of the chosen determination.
    pub fn re_value(&self, r: f64, theta: f64) -> f64 {
        self.terms
            .iter()
            .map(|(a, c)| {
                let af = *a.numer() as f64 / *a.denom() as f64;
                let w = Complex64::from_polar(r.powf(-af), -2.0 * std::f64::consts::PI * af * theta);
                (c.to_complex() * w).re
            })
            .sum()
    }

    /// Sum of |c| r^(-a) over the terms, as a floating magnitude.
    pub fn magnitude(&self, r: f64) -> f64 {
        self.terms
            .iter()
            .map(|(a, c)| {
                let af = *a.numer() as f64 / *a.denom() as f64;
                c.to_complex().norm() * r.powf(-af)
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::q_int;

    fn e(n: i64, d: i64) -> Exp {
        Exp::new(n, d)
    }

    #[test]
    fn normalization() {
        let k = FieldSpec::gaussian();
        let one = FieldElement::one(&k);
        let p = PuiseuxExponent::new(&k, vec![(e(2, 4), one.clone()), (e(3, 2), one.clone())]).unwrap();
        assert_eq!(p.ramification(), 2);
        let z = p.difference(&p).unwrap();
        assert!(z.is_zero());
        assert_eq!(z.ramification(), 1);
        assert!(PuiseuxExponent::new(&k, vec![(e(0, 1), one)]).is_err());
    }

    #[test]
    fn shift_half_exponent() {
        let k = FieldSpec::rationals();
        let p = PuiseuxExponent::monomial(FieldElement::one(&k), e(1, 2)).unwrap();
        let s = p.monodromy_shift(1).unwrap();
        assert_eq!(s, p.neg());
        assert_eq!(p.monodromy_shift(2).unwrap(), p);
        let q = PuiseuxExponent::monomial(FieldElement::one(&k), e(1, 3)).unwrap();
        assert_eq!(q.monodromy_shift(1).unwrap_err(), Error::RootOfUnityUnavailable(3));
    }

    #[test]
    fn c_conjugate_matches() {
        let k = FieldSpec::gaussian();
        let c = &FieldElement::one(&k) + &FieldElement::generator(&k);
        let p = PuiseuxExponent::monomial(c, e(1, 1)).unwrap();
        let cc = p.c_conjugate().unwrap();
        let expect = &FieldElement::from_rational(&k, q_int(-1)) + &FieldElement::generator(&k);
        assert_eq!(cc.coefficient(&e(1, 1)).unwrap(), &expect);
        assert_eq!(cc.c_conjugate().unwrap(), p);
    }
}
