use super::interval::{ceil_dyadic, sqrt_upper, Interval, Rect};
use super::poly;
use super::roots::{self, Gq};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt;
use std::sync::Arc;

pub type Q = BigRational;

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// A number field K = Q(alpha) with alpha a root of a monic irreducible
/// integer polynomial, together with the complex embedding that sends alpha
/// to the unique root inside a rational box.
pub struct FieldSpec {
    minpoly: Vec<BigInt>,
    bbox: [Q; 4],
    /// Reductions of x^d, ..., x^(2d-2) modulo the minimal polynomial.
    high_powers: Vec<Vec<Q>>,
    /// Floating approximations of all roots; index 0 is alpha.
    roots_f64: Vec<Complex64>,
    alpha_seed: Gq,
    conj_image: Option<Vec<Q>>,
    galois_images: Option<Vec<Vec<Q>>>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldSpec(minpoly={:?}, box=[", self.minpoly)?;
        for (i, b) in self.bbox.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, "])")
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.minpoly == other.minpoly && self.bbox == other.bbox
    }
}

impl Eq for FieldSpec {}

fn box_classify(z: &Gq, r: &Q, bbox: &[Q; 4]) -> Option<bool> {
    let inside = &z.re - r > bbox[0]
        && &z.re + r < bbox[1]
        && &z.im - r > bbox[2]
        && &z.im + r < bbox[3];
    if inside {
        return Some(true);
    }
    let outside = &z.re + r < bbox[0]
        || &z.re - r > bbox[1]
        || &z.im + r < bbox[2]
        || &z.im - r > bbox[3];
    if outside {
        Some(false)
    } else {
        None
    }
}

fn check_irreducible(f: &[BigInt]) -> Result<()> {
    let d = poly::degree(f);
    if d == 1 {
        return Ok(());
    }
    if poly::has_integer_root(f) {
        return Err(Error::Reducible("has a rational root".into()));
    }
    let cand = poly::possible_factor_degrees(f);
    if cand.is_empty() {
        return Ok(());
    }
    // Search factors among products of approximate roots; a true factor has
    // integer coefficients, so rounding and exact division settle it.
    let rs = roots::approx_roots(f);
    for &k in cand.iter().filter(|&&k| k <= d / 2) {
        for subset in subsets(d, k) {
            let mut coeffs = vec![Complex64::new(1.0, 0.0)];
            for &i in &subset {
                let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
                for (j, c) in coeffs.iter().enumerate() {
                    next[j + 1] += c;
                    next[j] -= c * rs[i];
                }
                coeffs = next;
            }
            let near_int = coeffs
                .iter()
                .all(|c| c.im.abs() < 1e-6 && (c.re - c.re.round()).abs() < 1e-6);
            if !near_int {
                continue;
            }
            let g: Vec<BigInt> = coeffs
                .iter()
                .map(|c| BigInt::from(c.re.round() as i64))
                .collect();
            if poly::div_exact_monic(f, &g).is_some() {
                return Err(Error::Reducible(format!("factor of degree {k}")));
            }
        }
    }
    Ok(())
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Polynomial remainder over Q (both operands lowest degree first).
fn qpoly_rem(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut r = a.to_vec();
    qtrim(&mut r);
    let db = b.len() - 1;
    let lead = b[db].clone();
    while r.len() > db && !(r.len() == 1 && r[0].is_zero()) {
        let k = r.len() - 1 - db;
        let c = r.last().unwrap() / &lead;
        for (i, bc) in b.iter().enumerate() {
            r[k + i] -= &c * bc;
        }
        r.pop();
        qtrim(&mut r);
    }
    r
}

fn qtrim(p: &mut Vec<Q>) {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn qpoly_mul(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut out = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn qpoly_sub(a: &[Q], b: &[Q]) -> Vec<Q> {
    let n = a.len().max(b.len());
    let mut out: Vec<Q> = (0..n)
        .map(|i| a.get(i).cloned().unwrap_or_else(Q::zero) - b.get(i).cloned().unwrap_or_else(Q::zero))
        .collect();
    qtrim(&mut out);
    out
}

fn qpoly_divrem(a: &[Q], b: &[Q]) -> (Vec<Q>, Vec<Q>) {
    let mut r = a.to_vec();
    qtrim(&mut r);
    let db = b.len() - 1;
    if r.len() <= db {
        return (vec![Q::zero()], r);
    }
    let mut q = vec![Q::zero(); r.len() - db];
    let lead = b[db].clone();
    for k in (0..q.len()).rev() {
        let c = &r[k + db] / &lead;
        if c.is_zero() {
            continue;
        }
        for (i, bc) in b.iter().enumerate() {
            r[k + i] -= &c * bc;
        }
        q[k] = c;
    }
    r.truncate(db.max(1));
    qtrim(&mut r);
    (q, r)
}

impl FieldSpec {
    /// Build a field from a monic integer minimal polynomial (lowest degree
    /// first) and an embedding box `[re_lo, re_hi, im_lo, im_hi]`.
    pub fn new(minpoly: Vec<BigInt>, bbox: [Q; 4]) -> Result<Arc<FieldSpec>> {
        let mut f = minpoly;
        poly::trim(&mut f);
        let d = poly::degree(&f);
        if d == 0 || d > 8 || !f.last().unwrap().is_one() {
            return Err(Error::BadMinpoly);
        }
        if bbox[0] >= bbox[1] || bbox[2] >= bbox[3] {
            return Err(Error::AmbiguousEmbedding("empty box".into()));
        }
        check_irreducible(&f)?;
        let alpha_seed = locate_root(&f, &bbox)?;
        let fq: Vec<Q> = f.iter().map(|c| Q::from_integer(c.clone())).collect();
        let mut high_powers = Vec::new();
        for k in d..(2 * d).max(d + 1) - 1 {
            let mut mono = vec![Q::zero(); k + 1];
            mono[k] = Q::one();
            let mut r = qpoly_rem(&mono, &fq);
            r.resize(d, Q::zero());
            high_powers.push(r);
        }
        let mut roots_f64 = roots::approx_roots(&f);
        let a0 = alpha_seed.to_f64();
        let idx = nearest(&roots_f64, a0);
        roots_f64.swap(0, idx);
        roots_f64[0] = a0;
        let mut spec = FieldSpec {
            minpoly: f,
            bbox,
            high_powers,
            roots_f64,
            alpha_seed,
            conj_image: None,
            galois_images: None,
        };
        let conj_target = spec.roots_f64[0].conj();
        spec.conj_image = spec.express_root_of(&spec.minpoly, conj_target, true);
        let mut images = vec![spec.generator_coords()];
        let mut galois = true;
        for j in 1..d {
            match spec.express_root_of(&spec.minpoly, spec.roots_f64[j], true) {
                Some(h) => images.push(h),
                None => {
                    galois = false;
                    break;
                }
            }
        }
        if galois {
            spec.galois_images = Some(images);
        }
        Ok(Arc::new(spec))
    }

    /// Convenience constructor from machine integers and rational strings.
    pub fn from_parts(minpoly: &[i64], bbox: [&str; 4]) -> Result<Arc<FieldSpec>> {
        let mp = minpoly.iter().map(|&c| BigInt::from(c)).collect();
        let mut b: Vec<Q> = Vec::new();
        for s in bbox {
            b.push(crate::json::parse_rational(s)?);
        }
        Self::new(mp, [b[0].clone(), b[1].clone(), b[2].clone(), b[3].clone()])
    }

    pub fn rationals() -> Arc<FieldSpec> {
        Self::from_parts(&[0, 1], ["-1", "1", "-1", "1"]).expect("Q")
    }

    pub fn gaussian() -> Arc<FieldSpec> {
        Self::from_parts(&[1, 0, 1], ["-1/2", "1/2", "1/2", "3/2"]).expect("Q(i)")
    }

    pub fn sqrt2() -> Arc<FieldSpec> {
        Self::from_parts(&[-2, 0, 1], ["1", "2", "-1/2", "1/2"]).expect("Q(sqrt2)")
    }

    /// Q(zeta_5) with zeta_5 = exp(2 pi i / 5).
    pub fn cyclotomic5() -> Arc<FieldSpec> {
        Self::from_parts(&[1, 1, 1, 1, 1], ["1/5", "2/5", "9/10", "1"]).expect("Q(zeta5)")
    }

    pub fn degree(&self) -> usize {
        self.minpoly.len() - 1
    }

    pub fn minpoly(&self) -> &[BigInt] {
        &self.minpoly
    }

    pub fn embedding_box(&self) -> &[Q; 4] {
        &self.bbox
    }

    pub fn is_galois(&self) -> bool {
        self.galois_images.is_some()
    }

    pub fn is_conjugation_closed(&self) -> bool {
        self.conj_image.is_some()
    }

    pub(crate) fn galois_images(&self) -> Option<&Vec<Vec<Q>>> {
        self.galois_images.as_ref()
    }

    pub(crate) fn conj_coords(&self) -> Option<&Vec<Q>> {
        self.conj_image.as_ref()
    }

    pub fn generator_coords(&self) -> Vec<Q> {
        let d = self.degree();
        let mut v = vec![Q::zero(); d];
        if d == 1 {
            // alpha is the rational root of x - a0
            v[0] = -Q::from_integer(self.minpoly[0].clone());
        } else {
            v[1] = Q::one();
        }
        v
    }

    pub(crate) fn mul_coords(&self, a: &[Q], b: &[Q]) -> Vec<Q> {
        let d = self.degree();
        let mut prod = vec![Q::zero(); 2 * d - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        let mut out: Vec<Q> = prod[..d].to_vec();
        for (c, high) in prod[d..].iter().zip(&self.high_powers) {
            if c.is_zero() {
                continue;
            }
            for (o, hp) in out.iter_mut().zip(high) {
                *o += c * hp;
            }
        }
        out
    }

    pub(crate) fn inv_coords(&self, a: &[Q]) -> Option<Vec<Q>> {
        let mut av = a.to_vec();
        qtrim(&mut av);
        if av.len() == 1 && av[0].is_zero() {
            return None;
        }
        // Extended Euclid on (f, a): track s with s*a = r (mod f).
        let fq: Vec<Q> = self.minpoly.iter().map(|c| Q::from_integer(c.clone())).collect();
        let (mut r0, mut r1) = (fq, av);
        let (mut s0, mut s1) = (vec![Q::zero()], vec![Q::one()]);
        while !(r1.len() == 1 && r1[0].is_zero()) {
            let (qq, r) = qpoly_divrem(&r0, &r1);
            let s = qpoly_sub(&s0, &qpoly_mul(&qq, &s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        // r0 is a nonzero constant since f is irreducible.
        let c = r0[0].clone();
        let mut out: Vec<Q> = s0.iter().map(|x| x / &c).collect();
        let fq: Vec<Q> = self.minpoly.iter().map(|c| Q::from_integer(c.clone())).collect();
        out = qpoly_rem(&out, &fq);
        out.resize(self.degree(), Q::zero());
        Some(out)
    }

    /// Evaluate a polynomial expression (power-basis coordinates) at another
    /// element given by its coordinates.
    pub(crate) fn compose_coords(&self, x: &[Q], at: &[Q]) -> Vec<Q> {
        let d = self.degree();
        let mut acc = vec![Q::zero(); d];
        for c in x.iter().rev() {
            acc = self.mul_coords(&acc, at);
            acc[0] += c;
        }
        acc
    }

    /// Certified enclosure of alpha: a disc centre and radius.
    pub(crate) fn alpha_disc(&self, prec: u32) -> (Gq, Q) {
        let d = self.degree();
        let mut p = prec;
        loop {
            let z = roots::newton(&self.minpoly, &self.alpha_seed, p);
            let fp: Vec<BigInt> = self
                .minpoly
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i as u64))
                .collect();
            let v = roots::eval_gq(&self.minpoly, &z);
            let dv = roots::eval_gq(&fp, &z);
            if !dv.norm2().is_zero() {
                let r2 = v.norm2() / dv.norm2() * q_int((d * d) as i64);
                let r = ceil_dyadic(&sqrt_upper(&r2, p + 8), p + 8);
                if box_classify(&z, &r, &self.bbox) == Some(true) {
                    return (z, r);
                }
            }
            p += 32;
        }
    }

    pub(crate) fn alpha_rect(&self, prec: u32) -> Rect {
        let (z, r) = self.alpha_disc(prec);
        Rect {
            re: Interval::new(&z.re - &r, &z.re + &r),
            im: Interval::new(&z.im - &r, &z.im + &r),
        }
    }

    pub(crate) fn alpha_f64(&self) -> Complex64 {
        self.roots_f64[0]
    }

    pub(crate) fn roots_f64(&self) -> &[Complex64] {
        &self.roots_f64
    }

    /// Find an element of K that is a root of the monic integer polynomial
    /// `g` and whose embedding is the root of `g` nearest to `target`.
    pub fn express_root_of(&self, g: &[BigInt], target: Complex64, distinct: bool) -> Option<Vec<Q>> {
        super::galois::express_root(self, g, target, distinct)
    }
}

fn nearest(zs: &[Complex64], t: Complex64) -> usize {
    let mut best = 0;
    for (i, z) in zs.iter().enumerate() {
        if (z - t).norm() < (zs[best] - t).norm() {
            best = i;
        }
    }
    best
}

fn locate_root(f: &[BigInt], bbox: &[Q; 4]) -> Result<Gq> {
    let discs = roots::isolate_all(f);
    let mut centres: Vec<Gq> = discs.iter().map(|(z, _)| z.clone()).collect();
    let mut prec = 64;
    loop {
        let radii = roots::weierstrass_radii(f, &centres);
        if let Some(rs) = radii {
            let cls: Vec<Option<bool>> = centres
                .iter()
                .zip(&rs)
                .map(|(z, r)| box_classify(z, r, bbox))
                .collect();
            if cls.iter().all(|c| c.is_some()) {
                let inside: Vec<usize> = (0..cls.len()).filter(|&i| cls[i] == Some(true)).collect();
                return match inside.len() {
                    1 => Ok(centres[inside[0]].clone()),
                    0 => Err(Error::AmbiguousEmbedding("no root in box".into())),
                    n => Err(Error::AmbiguousEmbedding(format!("{n} roots in box"))),
                };
            }
        }
        prec *= 2;
        if prec > 4096 {
            return Err(Error::AmbiguousEmbedding("a root lies on the box boundary".into()));
        }
        centres = centres.iter().map(|z| roots::newton(f, z, prec)).collect();
    }
}
