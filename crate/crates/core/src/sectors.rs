//! Directions, sectors and the dominance order on polar parts.
//!
//! Arguments are measured in turns. A sector is an open arc `(lo, hi)` of
//! lifted turns together with a radius; the lift fixes the determination of
//! the fractional powers z^(1/n) (argument of z^(1/n) is `theta / n`).

use crate::error::{Error, Result};
use crate::numfield::interval::cos_sin_turn;
use crate::numfield::{poly, FieldElement, Q};
use crate::puiseux::{Exp, PuiseuxExponent};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;

/// A direction, as a rational number of turns reduced to [0, 1).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Direction(Q);

impl Direction {
    pub fn new(t: Q) -> Self {
        Direction(&t - t.floor())
    }

    pub fn turns(&self) -> &Q {
        &self.0
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::json::format_rational(&self.0))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sector {
    pub lo: Q,
    pub hi: Q,
    pub radius: Q,
}

impl Sector {
    pub fn new(lo: Q, hi: Q, radius: Q) -> Result<Self> {
        if lo >= hi || hi > &lo + Q::one() {
            return Err(Error::Malformed(format!(
                "sector needs lo < hi <= lo + 1, got ({lo}, {hi})"
            )));
        }
        if !radius.is_positive() {
            return Err(Error::Malformed("sector radius must be positive".into()));
        }
        Ok(Sector { lo, hi, radius })
    }

    /// Unit-radius sector from machine fractions.
    pub fn turns(lo: (i64, i64), hi: (i64, i64)) -> Result<Self> {
        Self::new(
            Q::new(lo.0.into(), lo.1.into()),
            Q::new(hi.0.into(), hi.1.into()),
            Q::one(),
        )
    }

    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }

    pub fn shifted(&self, k: i64) -> Sector {
        let s = Q::from_integer(BigInt::from(k));
        Sector {
            lo: &self.lo + &s,
            hi: &self.hi + &s,
            radius: self.radius.clone(),
        }
    }

    /// Image under z -> conj(z): the arc (-hi, -lo).
    pub fn reflected(&self) -> Sector {
        Sector {
            lo: -&self.hi,
            hi: -&self.lo,
            radius: self.radius.clone(),
        }
    }

    pub fn contains_arc(&self, o: &Sector) -> bool {
        self.lo <= o.lo && o.hi <= self.hi
    }

    /// Intersection of the lifted arcs, if nonempty.
    pub fn intersect(&self, o: &Sector) -> Option<Sector> {
        let lo = if self.lo > o.lo { self.lo.clone() } else { o.lo.clone() };
        let hi = if self.hi < o.hi { self.hi.clone() } else { o.hi.clone() };
        let radius = if self.radius < o.radius { self.radius.clone() } else { o.radius.clone() };
        if lo < hi {
            Some(Sector { lo, hi, radius })
        } else {
            None
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Comparison {
    Equivalent,
    Less,
    Greater,
    Incomparable,
}

impl Comparison {
    pub fn name(self) -> &'static str {
        match self {
            Comparison::Equivalent => "EQUIVALENT",
            Comparison::Less => "LESS",
            Comparison::Greater => "GREATER",
            Comparison::Incomparable => "INCOMPARABLE",
        }
    }

    pub fn reversed(self) -> Comparison {
        match self {
            Comparison::Less => Comparison::Greater,
            Comparison::Greater => Comparison::Less,
            c => c,
        }
    }
}

/// A Stokes direction: exact, or an isolating interval of turns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StokesDirection {
    Exact(Direction),
    Isolated { lo: Q, hi: Q },
}

impl StokesDirection {
    pub fn approx(&self) -> f64 {
        use crate::numfield::interval::ratio_to_f64;
        match self {
            StokesDirection::Exact(d) => ratio_to_f64(d.turns()),
            StokesDirection::Isolated { lo, hi } => (ratio_to_f64(lo) + ratio_to_f64(hi)) / 2.0,
        }
    }
}

fn exp_q(a: &Exp) -> Q {
    Q::new(BigInt::from(*a.numer()), BigInt::from(*a.denom()))
}

/// The rotation behaviour of a nonzero coefficient c: Re(c e^(-2 pi i t))
/// vanishes exactly when -2t = kappa (mod 1), where -conj(c)/c = e^(2 pi i kappa)
/// if that ratio is a root of unity.
struct Rotation<'a> {
    c: &'a FieldElement,
    kappa: Option<Q>,
}

fn root_of_unity_exponent(d: usize) -> u64 {
    (1u64..=60)
        .filter(|&n| (d as u64).is_multiple_of(poly::euler_phi(n)))
        .fold(1u64, |acc, n| acc.lcm(&n))
}

impl<'a> Rotation<'a> {
    fn new(c: &'a FieldElement) -> Result<Self> {
        let w = (-c.conj()?).div(c)?;
        let m = root_of_unity_exponent(c.field().degree());
        let one = FieldElement::one(c.field());
        if w.pow(m) != one {
            return Ok(Rotation { c, kappa: None });
        }
        // order of w divides m
        let mut ord = m;
        for p in [2u64, 3, 5, 7] {
            while ord.is_multiple_of(p) && w.pow(ord / p) == one {
                ord /= p;
            }
        }
        let v = w.to_complex();
        let turns = v.im.atan2(v.re) / (2.0 * std::f64::consts::PI);
        let k = (turns * ord as f64).round() as i64;
        let k = k.rem_euclid(ord as i64);
        Ok(Rotation {
            c,
            kappa: Some(Q::new(BigInt::from(k), BigInt::from(ord))),
        })
    }

    /// Floating filter: the sign when the f64 value clears a margin far
    /// above its rounding error, else None.
    fn float_sign(&self, t: &Q) -> Option<i8> {
        use crate::numfield::interval::ratio_to_f64;
        let frac = t - t.floor();
        let x = 2.0 * std::f64::consts::PI * ratio_to_f64(&frac);
        let z = self.c.to_complex();
        let v = z.re * x.cos() + z.im * x.sin();
        let a = self.c.field().alpha_f64().norm().max(1.0);
        let scale: f64 = self
            .c
            .coords()
            .iter()
            .enumerate()
            .map(|(k, q)| ratio_to_f64(q).abs() * a.powi(k as i32))
            .sum();
        if scale.is_finite() && v.abs() > 1e-7 * scale {
            Some(if v > 0.0 { 1 } else { -1 })
        } else {
            None
        }
    }

    /// Exact sign of Re(c e^(-2 pi i t)).
    fn sign_at(&self, t: &Q) -> i8 {
        if let Some(k) = &self.kappa {
            let s = -(t * Q::from_integer(BigInt::from(2))) - k;
            if s.is_integer() {
                return 0;
            }
        }
        if let Some(s) = self.float_sign(t) {
            return s;
        }
        let mut prec = 40;
        loop {
            let r = self.c.enclosure(prec);
            let (cs, sn) = cos_sin_turn(t, prec);
            // Re(c e^(-i x)) = Re(c) cos x + Im(c) sin x
            let v = r.re.mul(&cs).add(&r.im.mul(&sn));
            if let Some(s) = v.sign() {
                return s;
            }
            prec *= 2;
        }
    }
}

/// Sign of the leading coefficient of Re(c z^(-a)) on the ray of lifted
/// argument theta.
fn term_sign(c: &FieldElement, a: &Exp, theta: &Q) -> Result<i8> {
    Ok(Rotation::new(c)?.sign_at(&(exp_q(a) * theta)))
}

#[derive(Debug)]
struct ArcPattern {
    /// Zeros of the leading cosine strictly inside the arc.
    zeros: Vec<StokesDirectionRaw>,
    /// Sign at the midpoint (meaningful when there are no interior zeros).
    mid_sign: i8,
    lo_zero: bool,
    hi_zero: bool,
}

#[derive(Debug, Clone)]
enum StokesDirectionRaw {
    Exact(Q),
    Bracket(Q, Q),
}

/// Zeros of theta -> Re(c e^(-2 pi i a theta)) on the closed arc [lo, hi].
fn leading_pattern(c: &FieldElement, a: &Exp, lo: &Q, hi: &Q) -> Result<ArcPattern> {
    let rot = Rotation::new(c)?;
    let aq = exp_q(a);
    let two = Q::from_integer(BigInt::from(2));
    let mid = (lo + hi) / &two;
    let mid_sign = rot.sign_at(&(&aq * &mid));
    let lo_zero = rot.sign_at(&(&aq * lo)) == 0;
    let hi_zero = rot.sign_at(&(&aq * hi)) == 0;
    let mut zeros = Vec::new();
    if let Some(k) = &rot.kappa {
        // theta = (m - kappa) / (2a)
        let step = Q::one() / (&two * &aq);
        let start = ((lo * &two * &aq) + k).floor();
        let mut m = start;
        loop {
            let th = (&m - k) * &step;
            if &th >= hi {
                break;
            }
            if &th > lo {
                zeros.push(StokesDirectionRaw::Exact(th));
            }
            m += Q::one();
        }
    } else {
        // Pieces shorter than the zero spacing 1/(2a) hold at most one zero.
        let spacing = Q::one() / (&two * &aq);
        let width = hi - lo;
        let pieces = (&width / &spacing).floor().to_integer().to_u64().unwrap_or(0) + 2;
        let pieces = Q::from_integer(BigInt::from(pieces));
        let h = &width / &pieces;
        let mut x0 = lo.clone();
        let mut s0 = rot.sign_at(&(&aq * &x0));
        while &x0 < hi {
            let x1 = &x0 + &h;
            let s1 = rot.sign_at(&(&aq * &x1));
            if s0 * s1 < 0 {
                zeros.push(StokesDirectionRaw::Bracket(x0.clone(), x1.clone()));
            }
            x0 = x1;
            s0 = s1;
        }
    }
    Ok(ArcPattern {
        zeros,
        mid_sign,
        lo_zero,
        hi_zero,
    })
}

/// Is Re(h) bounded above on the ray of lifted argument theta?
fn ray_bounded_above(h: &PuiseuxExponent, theta: &Q) -> Result<bool> {
    for (a, c) in h.terms() {
        match term_sign(c, a, theta)? {
            s if s < 0 => return Ok(true),
            s if s > 0 => return Ok(false),
            _ => {}
        }
    }
    Ok(true)
}

/// Is Re(h) bounded above on the sector (lo, hi) near the puncture?
fn bounded_above(h: &PuiseuxExponent, lo: &Q, hi: &Q) -> Result<bool> {
    let Some((a, c)) = h.leading() else {
        return Ok(true);
    };
    let pat = leading_pattern(c, &a, lo, hi)?;
    if !pat.zeros.is_empty() || pat.mid_sign > 0 {
        return Ok(false);
    }
    let tail = h.tail();
    if pat.lo_zero && !ray_bounded_above(&tail, lo)? {
        return Ok(false);
    }
    if pat.hi_zero && !ray_bounded_above(&tail, hi)? {
        return Ok(false);
    }
    Ok(true)
}

/// Dominance comparison of two polar parts on a sector.
pub fn compare_on_sector(phi: &PuiseuxExponent, psi: &PuiseuxExponent, s: &Sector) -> Result<Comparison> {
    let h = phi.difference(psi)?;
    if h.is_zero() {
        return Ok(Comparison::Equivalent);
    }
    if bounded_above(&h, &s.lo, &s.hi)? {
        return Ok(Comparison::Less);
    }
    if bounded_above(&h.neg(), &s.lo, &s.hi)? {
        return Ok(Comparison::Greater);
    }
    Ok(Comparison::Incomparable)
}

/// Is there an open subsector W of S with phi strictly dominated by psi on W?
pub fn exists_strict_subsector(phi: &PuiseuxExponent, psi: &PuiseuxExponent, s: &Sector) -> Result<bool> {
    let h = phi.difference(psi)?;
    let Some((a, c)) = h.leading() else {
        return Ok(false);
    };
    let pat = leading_pattern(c, &a, &s.lo, &s.hi)?;
    Ok(!pat.zeros.is_empty() || pat.mid_sign < 0)
}

fn refine_bracket(c: &FieldElement, a: &Exp, mut lo: Q, mut hi: Q, bits: u32) -> Result<(Q, Q)> {
    let rot = Rotation::new(c)?;
    let aq = exp_q(a);
    let target = Q::new(BigInt::one(), BigInt::one() << bits);
    let two = Q::from_integer(BigInt::from(2));
    let slo = rot.sign_at(&(&aq * &lo));
    while &hi - &lo > target {
        let mid = (&lo + &hi) / &two;
        let sm = rot.sign_at(&(&aq * &mid));
        if sm == slo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

/// Directions in [0, 1) where Re(phi - psi) changes its dominant sign.
pub fn stokes_directions(phi: &PuiseuxExponent, psi: &PuiseuxExponent) -> Result<Vec<StokesDirection>> {
    let h = phi.difference(psi)?;
    let Some((a, c)) = h.leading() else {
        return Err(Error::EqualExponents);
    };
    let lo = Q::zero();
    let hi = Q::one();
    let pat = leading_pattern(c, &a, &lo, &hi)?;
    let mut out = Vec::new();
    if pat.lo_zero {
        out.push(StokesDirection::Exact(Direction::new(Q::zero())));
    }
    for z in pat.zeros {
        out.push(match z {
            StokesDirectionRaw::Exact(t) => StokesDirection::Exact(Direction::new(t)),
            StokesDirectionRaw::Bracket(l, r) => {
                let (l, r) = refine_bracket(c, &a, l, r, 24)?;
                StokesDirection::Isolated { lo: l, hi: r }
            }
        });
    }
    Ok(out)
}

/// Stokes directions of every pair, as sorted lifted turns inside the open
/// arc (lo, hi); isolated directions are represented by their brackets'
/// endpoints so the resulting sub-arcs are certainly Stokes-free.
pub fn stokes_free_subarcs(exps: &[PuiseuxExponent], s: &Sector) -> Result<Vec<Sector>> {
    let mut cuts: Vec<Q> = Vec::new();
    for i in 0..exps.len() {
        for j in i + 1..exps.len() {
            let h = exps[i].difference(&exps[j])?;
            let Some((a, c)) = h.leading() else {
                continue;
            };
            for z in leading_pattern(c, &a, &s.lo, &s.hi)?.zeros {
                match z {
                    StokesDirectionRaw::Exact(t) => cuts.push(t),
                    StokesDirectionRaw::Bracket(l, r) => {
                        let (l, r) = refine_bracket(c, &a, l, r, 20)?;
                        cuts.push(l);
                        cuts.push(r);
                    }
                }
            }
        }
    }
    cuts.push(s.lo.clone());
    cuts.push(s.hi.clone());
    cuts.sort();
    cuts.dedup();
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let (l, r) = (&w[0], &w[1]);
        if l < r && l >= &s.lo && r <= &s.hi {
            let sub = Sector::new(l.clone(), r.clone(), s.radius.clone())?;
            // skip the gaps between the two ends of a bracket
            let mut ok = true;
            for i in 0..exps.len() {
                for j in i + 1..exps.len() {
                    if compare_on_sector(&exps[i], &exps[j], &sub)? == Comparison::Incomparable {
                        ok = false;
                    }
                }
            }
            if ok {
                out.push(sub);
            }
        }
    }
    Ok(out)
}

/// Indices of the exponents sorted increasingly for the dominance order on
/// a sector where the order is total; `None` if two are incomparable.
pub fn total_order(exps: &[PuiseuxExponent], s: &Sector) -> Result<Option<Vec<usize>>> {
    let n = exps.len();
    let mut cmp = vec![vec![Comparison::Equivalent; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                cmp[i][j] = compare_on_sector(&exps[i], &exps[j], s)?;
                if cmp[i][j] == Comparison::Incomparable {
                    return Ok(None);
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| match cmp[i][j] {
        Comparison::Less => Ordering::Less,
        Comparison::Greater => Ordering::Greater,
        _ => i.cmp(&j),
    });
    Ok(Some(idx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::FieldSpec;
    use std::sync::Arc;

    fn mono(k: &Arc<crate::numfield::FieldSpec>, c: i64, a: i64) -> PuiseuxExponent {
        PuiseuxExponent::monomial(FieldElement::from_int(k, c), Exp::from_integer(a)).unwrap()
    }

    #[test]
    fn basic_comparisons() {
        let k = FieldSpec::gaussian();
        let s = Sector::turns((-1, 8), (1, 8)).unwrap();
        assert_eq!(compare_on_sector(&mono(&k, -1, 1), &mono(&k, 1, 1), &s).unwrap(), Comparison::Less);
        let s2 = Sector::turns((0, 1), (1, 2)).unwrap();
        assert_eq!(
            compare_on_sector(&mono(&k, 1, 1), &mono(&k, -1, 1), &s2).unwrap(),
            Comparison::Incomparable
        );
        let z = PuiseuxExponent::zero(&k);
        assert_eq!(compare_on_sector(&z, &z, &s).unwrap(), Comparison::Equivalent);
    }

    #[test]
    fn endpoint_zero_uses_tail() {
        let k = FieldSpec::rationals();
        // h = -2/z on (-1/4, 1/4): leading cosine vanishes at both rays.
        let s = Sector::turns((-1, 4), (1, 4)).unwrap();
        let phi = mono(&k, -1, 1);
        let psi = mono(&k, 1, 1);
        assert_eq!(compare_on_sector(&phi, &psi, &s).unwrap(), Comparison::Less);
        // Adding a tail -z^(-1/2) to phi: Re(-z^(-1/2)) at theta = +-1/4 is
        // -r^(-1/2) cos(pi/4) < 0, still bounded above.
        let tail = PuiseuxExponent::monomial(FieldElement::from_int(&k, -1), Exp::new(1, 2)).unwrap();
        let phi2 = phi.add(&tail).unwrap();
        assert_eq!(compare_on_sector(&phi2, &psi, &s).unwrap(), Comparison::Less);
        // The opposite sign of the tail makes the boundary rays unbounded.
        let phi3 = phi.difference(&tail).unwrap();
        assert_eq!(compare_on_sector(&phi3, &psi, &s).unwrap(), Comparison::Incomparable);
    }

    #[test]
    fn stokes_examples() {
        let k = FieldSpec::gaussian();
        let d = stokes_directions(&mono(&k, 1, 1), &mono(&k, -1, 1)).unwrap();
        let got: Vec<String> = d
            .iter()
            .map(|x| match x {
                StokesDirection::Exact(t) => t.to_string(),
                _ => "?".into(),
            })
            .collect();
        assert_eq!(got, vec!["1/4", "3/4"]);
        let d2 = stokes_directions(&mono(&k, 1, 2), &PuiseuxExponent::zero(&k)).unwrap();
        let got: Vec<String> = d2
            .iter()
            .map(|x| match x {
                StokesDirection::Exact(t) => t.to_string(),
                _ => "?".into(),
            })
            .collect();
        assert_eq!(got, vec!["1/8", "3/8", "5/8", "7/8"]);
        assert_eq!(
            stokes_directions(&mono(&k, 1, 1), &mono(&k, 1, 1)).unwrap_err(),
            Error::EqualExponents
        );
    }

    #[test]
    fn irrational_direction() {
        // arg(1 + 2i) is not a rational number of turns
        let k = FieldSpec::gaussian();
        let c = &FieldElement::one(&k) + &FieldElement::generator(&k).scale(&Q::from_integer(2.into()));
        let phi = PuiseuxExponent::monomial(c, Exp::from_integer(1)).unwrap();
        let d = stokes_directions(&phi, &PuiseuxExponent::zero(&k)).unwrap();
        assert_eq!(d.len(), 2);
        for x in &d {
            let t = x.approx();
            let v = (phi.re_value(1e-3, t)).abs();
            assert!(v < 1e-2, "value {v} at {t}");
            assert!(matches!(x, StokesDirection::Isolated { .. }));
        }
    }
}
