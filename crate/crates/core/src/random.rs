//! Seeded generators of random exponents, sectors, valid Stokes data and
//! admissible isomorphisms, for randomized tests and benchmarks.

use crate::error::Result;
use crate::homspaces::{is_allowed_automorphism, ExponentialSum, HomMask};
use crate::linalg::Matrix;
use crate::numfield::{q_frac, q_int, FieldElement, FieldSpec, Q};
use crate::puiseux::{Exp, PuiseuxExponent};
use crate::sectors::Sector;
use crate::stokesdata::{DataIsomorphism, LocalIrregularDatum, LocalSystemRep, StokesData, Surface};
use indexmap::IndexMap;
use rand::Rng;
use std::sync::Arc;

/// Size limits for generated data.
#[derive(Clone, Debug)]
pub struct Shape {
    pub max_rank: usize,
    pub max_exponents: usize,
    pub max_punctures: usize,
    pub max_ramification: u32,
    pub max_terms: usize,
    pub height: i64,
    /// Close exponent sets under coefficient conjugation as well.
    pub conjugation_stable: bool,
    /// Use only rational matrix entries.
    pub rational_entries: bool,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            max_rank: 4,
            max_exponents: 3,
            max_punctures: 3,
            max_ramification: 2,
            max_terms: 2,
            height: 3,
            conjugation_stable: false,
            rational_entries: false,
        }
    }
}

pub fn element<R: Rng>(k: &Arc<FieldSpec>, rng: &mut R, height: i64) -> FieldElement {
    let c = (0..k.degree()).map(|_| q_int(rng.gen_range(-height..=height))).collect();
    FieldElement::from_coords(k, c)
}

pub fn nonzero_element<R: Rng>(k: &Arc<FieldSpec>, rng: &mut R, height: i64) -> FieldElement {
    loop {
        let x = element(k, rng, height.max(1));
        if !x.is_zero() {
            return x;
        }
    }
}

fn entry<R: Rng>(k: &Arc<FieldSpec>, rng: &mut R, shape: &Shape) -> FieldElement {
    if shape.rational_entries {
        FieldElement::from_int(k, rng.gen_range(-shape.height..=shape.height))
    } else {
        element(k, rng, shape.height)
    }
}

/// Random polar part with up to `max_terms` terms, exponents m/n with
/// m <= 2n, coefficients of height at most `height`.
pub fn exponent<R: Rng>(k: &Arc<FieldSpec>, rng: &mut R, max_terms: usize, n: u32, height: i64) -> PuiseuxExponent {
    loop {
        let t = rng.gen_range(1..=max_terms.max(1));
        let terms = (0..t)
            .map(|_| {
                let m = rng.gen_range(1..=2 * n as i64);
                (Exp::new(m, n as i64), nonzero_element(k, rng, height))
            })
            .collect();
        let p = PuiseuxExponent::new(k, terms).expect("positive exponents");
        if !p.is_zero() {
            return p;
        }
    }
}

/// Random rational in (lo, hi) on a grid of the given resolution.
pub fn rational_between<R: Rng>(rng: &mut R, lo: &Q, hi: &Q, steps: i64) -> Q {
    let t = rng.gen_range(1..steps);
    lo + (hi - lo) * q_frac(t, steps)
}

/// Random lifted arc with endpoints on a grid of 1/den, width in (0, 1].
pub fn arc<R: Rng>(rng: &mut R, den: i64) -> Sector {
    let lo = rng.gen_range(-den..den);
    let w = rng.gen_range(1..=den);
    Sector::new(q_frac(lo, den), q_frac(lo + w, den), q_int(1)).expect("valid arc")
}

/// `count` lifted sectors covering the circle with small overlaps.
pub fn sectors<R: Rng>(rng: &mut R, count: usize) -> Vec<Sector> {
    let k = count.max(2) as i64;
    let o = q_frac(rng.gen_range(0..60), 60);
    (0..k)
        .map(|j| {
            let lo = &o + q_frac(j, k);
            let delta = q_frac(rng.gen_range(1..20), 40 * k);
            let hi = &lo + q_frac(1, k) + delta;
            Sector::new(lo, hi, q_int(1)).expect("valid sector")
        })
        .collect()
}

/// Exponents closed under continuation (and conjugation, if asked), with
/// random multiplicities; None if the limits are exceeded.
pub fn closed_sum<R: Rng>(k: &Arc<FieldSpec>, rng: &mut R, shape: &Shape) -> Option<ExponentialSum> {
    let mut set: Vec<PuiseuxExponent> = Vec::new();
    let seeds = rng.gen_range(1..=shape.max_exponents);
    for _ in 0..seeds {
        let n = rng.gen_range(1..=shape.max_ramification.max(1));
        let mut todo = vec![exponent(k, rng, shape.max_terms, n, shape.height)];
        while let Some(p) = todo.pop() {
            if set.contains(&p) {
                continue;
            }
            todo.push(p.monodromy_shift(1).ok()?);
            if shape.conjugation_stable {
                todo.push(p.conjugate().ok()?);
            }
            set.push(p);
            if set.len() > shape.max_exponents {
                return None;
            }
        }
    }
    // equal multiplicities along continuation orbits
    let mut mult = vec![0usize; set.len()];
    for i in 0..set.len() {
        if mult[i] != 0 {
            continue;
        }
        let m = rng.gen_range(1..=2);
        let mut orbit = vec![i];
        let mut j = 0;
        while j < orbit.len() {
            let p = &set[orbit[j]];
            let mut next = vec![p.monodromy_shift(1).ok()?];
            if shape.conjugation_stable {
                next.push(p.conjugate().ok()?);
            }
            for q in next {
                let qi = set.iter().position(|x| *x == q)?;
                if !orbit.contains(&qi) {
                    orbit.push(qi);
                }
            }
            j += 1;
        }
        for o in orbit {
            mult[o] = m;
        }
    }
    let entries: Vec<_> = set.into_iter().zip(mult).collect();
    let es = ExponentialSum::new(entries).ok()?;
    (es.rank() <= shape.max_rank).then_some(es)
}

/// Random matrix supported on the mask.
pub fn masked<R: Rng>(k: &Arc<FieldSpec>, mask: &HomMask, rng: &mut R, shape: &Shape) -> Matrix {
    let mut m = Matrix::zeros(k, mask.rows, mask.cols);
    for r in 0..mask.rows {
        for c in 0..mask.cols {
            if mask.get(r, c) {
                m[(r, c)] = entry(k, rng, shape);
            }
        }
    }
    m
}

/// Random allowed automorphism for an endo mask.
pub fn allowed_automorphism<R: Rng>(k: &Arc<FieldSpec>, mask: &HomMask, rng: &mut R, shape: &Shape) -> Result<Matrix> {
    loop {
        let m = masked(k, mask, rng, shape);
        if is_allowed_automorphism(&m, mask)? {
            return Ok(m);
        }
    }
}

pub fn invertible<R: Rng>(k: &Arc<FieldSpec>, r: usize, rng: &mut R, shape: &Shape) -> Matrix {
    let full = HomMask::all_allowed(r, r);
    loop {
        let m = masked(k, &full, rng, shape);
        if m.is_invertible() {
            return m;
        }
    }
}

fn irregular_point<R: Rng>(
    k: &Arc<FieldSpec>,
    p: &str,
    exps: ExponentialSum,
    rng: &mut R,
    shape: &Shape,
) -> Result<LocalIrregularDatum> {
    let count = rng.gen_range(2..=4);
    let n = exps
        .entries()
        .iter()
        .fold(1u32, |a, (phi, _)| num_integer::lcm(a, phi.ramification()));
    let r = exps.rank();
    let mut x = LocalIrregularDatum {
        point: p.to_string(),
        coordinate: "z".into(),
        n,
        exponents: exps,
        sectors: sectors(rng, count),
        stokes: Vec::new(),
        connection: invertible(k, r, rng, shape),
    };
    for j in 0..count {
        let mask = x.stokes_mask(j)?;
        x.stokes.push(allowed_automorphism(k, &mask, rng, shape)?);
    }
    Ok(x)
}

/// A random valid datum on the sphere: the last puncture is regular and
/// carries the inverse product of the others.
pub fn datum<R: Rng>(k: &Arc<FieldSpec>, rng: &mut R, shape: &Shape) -> Result<StokesData> {
    let exps = loop {
        if let Some(e) = closed_sum(k, rng, shape) {
            break e;
        }
    };
    let r = exps.rank();
    let m = rng.gen_range(2..=shape.max_punctures.max(2));
    let punctures: Vec<String> = (0..m).map(|i| format!("p{i}")).collect();
    let n_irr = rng.gen_range(1..m);
    let mut irregular = IndexMap::new();
    let mut monodromies = Vec::new();
    for (i, p) in punctures[..m - 1].iter().enumerate() {
        if i < n_irr {
            let e = if i == 0 {
                exps.clone()
            } else {
                // further irregular points share the rank but not the exponents
                loop {
                    if let Some(e) = closed_sum(k, rng, shape) {
                        if e.rank() == r {
                            break e;
                        }
                    }
                }
            };
            let x = irregular_point(k, p, e, rng, shape)?;
            let c = &x.connection;
            monodromies.push(c.mul(&x.glued(k)?)?.mul(&c.inverse()?)?);
            irregular.insert(p.clone(), x);
        } else {
            monodromies.push(invertible(k, r, rng, shape));
        }
    }
    let mut prod = Matrix::identity(k, r);
    for t in &monodromies {
        prod = prod.mul(t)?;
    }
    monodromies.push(prod.inverse()?);
    Ok(StokesData {
        field: k.clone(),
        local_system: LocalSystemRep {
            rank: r,
            surface: Surface::Sphere,
            punctures,
            monodromies,
            base_label: "x".into(),
            basis_convention: "standard".into(),
        },
        irregular,
    })
}

/// Random admissible isomorphism out of d.
pub fn isomorphism<R: Rng>(d: &StokesData, rng: &mut R, shape: &Shape) -> Result<DataIsomorphism> {
    let k = &d.field;
    let mut tc = IndexMap::new();
    for (p, x) in &d.irregular {
        let hs = (0..x.sectors.len())
            .map(|j| allowed_automorphism(k, &x.sector_mask(j)?, rng, shape))
            .collect::<Result<_>>()?;
        tc.insert(p.clone(), hs);
    }
    Ok(DataIsomorphism {
        base_change: invertible(k, d.rank(), rng, shape),
        trivialization_changes: tc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stokesdata::validate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_data_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in [FieldSpec::rationals(), FieldSpec::gaussian()] {
            for _ in 0..4 {
                let d = datum(&k, &mut rng, &Shape::default()).unwrap();
                let rep = validate(&d);
                assert!(rep.pass, "{:?}", rep.violations);
                let iso = isomorphism(&d, &mut rng, &Shape::default()).unwrap();
                let rep = validate(&iso.apply(&d).unwrap());
                assert!(rep.pass, "{:?}", rep.violations);
            }
        }
    }
}
