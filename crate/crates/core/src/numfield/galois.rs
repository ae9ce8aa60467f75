//! Roots of integer polynomials inside K, automorphisms, roots of unity.

use super::field::{FieldSpec, Q};
use super::element::FieldElement;
use super::poly;
use super::roots;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{FromPrimitive, Zero};
use std::sync::Arc;

/// Upper limit on the number of embedding assignments tried.
const ASSIGNMENT_CAP: usize = 1 << 22;

fn solve_complex(mut a: Vec<Vec<Complex64>>) -> Option<Vec<Vec<Complex64>>> {
    // Returns the inverse of a square complex matrix.
    let n = a.len();
    let mut inv: Vec<Vec<Complex64>> = (0..n)
        .map(|i| (0..n).map(|j| Complex64::new((i == j) as u8 as f64, 0.0)).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| a[x][col].norm().partial_cmp(&a[y][col].norm()).unwrap())?;
        if a[piv][col].norm() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col];
        for j in 0..n {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for r in 0..n {
            if r != col {
                let m = a[r][col];
                if m.norm() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let (ac, ic) = (a[col][j], inv[col][j]);
                    a[r][j] -= m * ac;
                    inv[r][j] -= m * ic;
                }
            }
        }
    }
    Some(inv)
}

pub(crate) fn express_root(k: &FieldSpec, g: &[BigInt], target: Complex64, distinct: bool) -> Option<Vec<Q>> {
    let d = k.degree();
    let gr = if g.len() == 2 {
        vec![Complex64::new(-super::interval::ratio_to_f64(&Q::from_integer(g[0].clone())), 0.0)]
    } else {
        roots::approx_roots(g)
    };
    let first = gr
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - target).norm().partial_cmp(&(b.1 - target).norm()).unwrap())
        .map(|(i, _)| i)?;
    let rs = k.roots_f64();
    let f = k.minpoly();
    let fp: Vec<BigInt> = f
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i as u64))
        .collect();
    let eval = |p: &[BigInt], z: Complex64| -> Complex64 {
        p.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| {
            acc * z + Complex64::new(super::interval::ratio_to_f64(&Q::from_integer(c.clone())), 0.0)
        })
    };
    let fprime: Vec<Complex64> = rs.iter().map(|&r| eval(&fp, r)).collect();
    let vand: Vec<Vec<Complex64>> = rs
        .iter()
        .map(|&r| (0..d).map(|j| r.powu(j as u32)).collect())
        .collect();
    let vinv = solve_complex(vand)?;
    let m = gr.len();
    if distinct && m < d {
        return None;
    }
    let total = (m as f64).powi(d as i32 - 1);
    if total > ASSIGNMENT_CAP as f64 {
        return None;
    }
    // Column contributions col_i(s) = Vinv[:, i] * f'(r_i) * s.
    let mut acc = vec![Complex64::new(0.0, 0.0); d];
    let mut used = vec![false; m];
    let mut found: Option<Vec<Q>> = None;
    let field_check = |coef: &[Complex64]| -> Option<Vec<Q>> {
        let ok = coef
            .iter()
            .all(|c| c.im.abs() < 1e-6 && (c.re - c.re.round()).abs() < 1e-6 && c.re.abs() < 1e15);
        if !ok {
            return None;
        }
        let gamma: Vec<Q> = coef
            .iter()
            .map(|c| Q::from_f64(c.re.round()).unwrap_or_else(Q::zero))
            .collect();
        let fpa = k.compose_coords(
            &fp.iter().map(|c| Q::from_integer(c.clone())).collect::<Vec<_>>(),
            &k.generator_coords(),
        );
        let inv = k.inv_coords(&fpa)?;
        let beta = k.mul_coords(&gamma, &inv);
        let gq: Vec<Q> = g.iter().map(|c| Q::from_integer(c.clone())).collect();
        let val = k.compose_coords(&gq, &beta);
        if val.iter().all(|x| x.is_zero()) {
            Some(beta)
        } else {
            None
        }
    };
    #[allow(clippy::too_many_arguments)]
    fn dfs(
        i: usize,
        d: usize,
        m: usize,
        distinct: bool,
        acc: &mut Vec<Complex64>,
        used: &mut Vec<bool>,
        vinv: &[Vec<Complex64>],
        fprime: &[Complex64],
        gr: &[Complex64],
        first: usize,
        found: &mut Option<Vec<Q>>,
        check: &dyn Fn(&[Complex64]) -> Option<Vec<Q>>,
    ) {
        if found.is_some() {
            return;
        }
        if i == d {
            if let Some(b) = check(acc) {
                *found = Some(b);
            }
            return;
        }
        let choices: Vec<usize> = if i == 0 { vec![first] } else { (0..m).collect() };
        for s in choices {
            if distinct && used[s] {
                continue;
            }
            let w = fprime[i] * gr[s];
            for (a, row) in acc.iter_mut().zip(vinv) {
                *a += row[i] * w;
            }
            used[s] = true;
            dfs(i + 1, d, m, distinct, acc, used, vinv, fprime, gr, first, found, check);
            used[s] = false;
            for (a, row) in acc.iter_mut().zip(vinv) {
                *a -= row[i] * w;
            }
            if found.is_some() {
                return;
            }
        }
    }
    dfs(
        0, d, m, distinct, &mut acc, &mut used, &vinv, &fprime, &gr, first, &mut found, &field_check,
    );
    found
}

/// A field automorphism, stored as the image of the generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisAction {
    field: Arc<FieldSpec>,
    image: Vec<Q>,
}

impl GaloisAction {
    pub fn identity(field: &Arc<FieldSpec>) -> Self {
        GaloisAction {
            field: field.clone(),
            image: field.generator_coords(),
        }
    }

    pub fn from_image(field: &Arc<FieldSpec>, image: FieldElement) -> Result<Self> {
        if image.field().as_ref() != field.as_ref() {
            return Err(Error::FieldMismatch);
        }
        let f: Vec<Q> = field.minpoly().iter().map(|c| Q::from_integer(c.clone())).collect();
        if !field.compose_coords(&f, image.coords()).iter().all(|x| x.is_zero()) {
            return Err(Error::AutomorphismOutsideGroup("image is not a root of the minimal polynomial".into()));
        }
        Ok(GaloisAction {
            field: field.clone(),
            image: image.coords().to_vec(),
        })
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn image(&self) -> FieldElement {
        FieldElement::from_coords(&self.field, self.image.clone())
    }

    pub fn apply(&self, x: &FieldElement) -> FieldElement {
        FieldElement::from_coords(&self.field, self.field.compose_coords(x.coords(), &self.image))
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &GaloisAction) -> GaloisAction {
        GaloisAction {
            field: self.field.clone(),
            image: self.field.compose_coords(&other.image, &self.image),
        }
    }

    pub fn inverse(&self) -> GaloisAction {
        let mut cur = self.clone();
        loop {
            let next = self.compose(&cur);
            if next.is_identity() {
                return cur;
            }
            cur = next;
        }
    }

    pub fn is_identity(&self) -> bool {
        self.image == self.field.generator_coords()
    }

    pub fn order(&self) -> usize {
        let mut cur = self.clone();
        let mut n = 1;
        while !cur.is_identity() {
            cur = self.compose(&cur);
            n += 1;
        }
        n
    }
}

/// All automorphisms of K; the identity comes first.
pub fn automorphisms(field: &Arc<FieldSpec>) -> Result<Vec<GaloisAction>> {
    let images = field.galois_images().ok_or(Error::NotGalois)?;
    Ok(images
        .iter()
        .map(|im| GaloisAction {
            field: field.clone(),
            image: im.clone(),
        })
        .collect())
}

/// Complex conjugation restricted to K.
pub fn conjugation(field: &Arc<FieldSpec>) -> Result<GaloisAction> {
    let im = field.conj_coords().ok_or(Error::NotConjugationClosed)?;
    Ok(GaloisAction {
        field: field.clone(),
        image: im.clone(),
    })
}

/// exp(2 pi i / n) as an element of K.
pub fn root_of_unity(field: &Arc<FieldSpec>, n: u64) -> Result<FieldElement> {
    match n {
        0 => Err(Error::RootOfUnityUnavailable(0)),
        1 => Ok(FieldElement::one(field)),
        2 => Ok(-FieldElement::one(field)),
        _ => {
            if poly::euler_phi(n) as usize > field.degree() {
                return Err(Error::RootOfUnityUnavailable(n));
            }
            let ang = 2.0 * std::f64::consts::PI / n as f64;
            let target = Complex64::from_polar(1.0, ang);
            let g = poly::cyclotomic(n);
            let coords = field
                .express_root_of(&g, target, false)
                .ok_or(Error::RootOfUnityUnavailable(n))?;
            let z = FieldElement::from_coords(field, coords);
            // The search returns the root nearest the target; confirm it.
            let v = z.to_complex();
            if (v - target).norm() > 1e-6 {
                return Err(Error::RootOfUnityUnavailable(n));
            }
            Ok(z)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_group() {
        let k = FieldSpec::gaussian();
        let g = automorphisms(&k).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g[1].order(), 2);
        let c = conjugation(&k).unwrap();
        assert_eq!(c, g[1]);
    }

    #[test]
    fn zeta5_group() {
        let k = FieldSpec::cyclotomic5();
        let g = automorphisms(&k).unwrap();
        assert_eq!(g.len(), 4);
        let z = FieldElement::generator(&k);
        // every automorphism is zeta -> zeta^j
        let mut exps: Vec<u32> = g
            .iter()
            .map(|s| {
                let im = s.apply(&z);
                (1..5).find(|&j| z.pow(j as u64) == im).unwrap()
            })
            .collect();
        exps.sort();
        assert_eq!(exps, vec![1, 2, 3, 4]);
    }

    #[test]
    fn cube_root_not_galois() {
        let k = FieldSpec::from_parts(&[-2, 0, 0, 1], ["1", "2", "-1/2", "1/2"]).unwrap();
        assert_eq!(automorphisms(&k).unwrap_err(), Error::NotGalois);
        assert!(k.is_conjugation_closed());
    }

    #[test]
    fn roots_of_unity() {
        let k = FieldSpec::gaussian();
        let i = root_of_unity(&k, 4).unwrap();
        assert_eq!(i, FieldElement::generator(&k));
        assert_eq!(root_of_unity(&k, 3).unwrap_err(), Error::RootOfUnityUnavailable(3));
        let z5 = FieldSpec::cyclotomic5();
        let w = root_of_unity(&z5, 10).unwrap();
        assert_eq!(w.pow(10), FieldElement::one(&z5));
        assert_ne!(w.pow(5), FieldElement::one(&z5));
    }
}
