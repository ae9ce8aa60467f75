//! Subfields given by a Q-basis inside L, and K-lattice normalization.

use crate::error::{Error, Result};
use crate::homspaces::{check_allowed, ExponentialSum, HomMask, MaskedMatrix};
use crate::linalg::Matrix;
use crate::numfield::{FieldElement, FieldEmbedding, FieldSpec, GaloisAction, Q};
use std::sync::Arc;

/// A subfield K of L, stored as a Q-basis of elements of L.
#[derive(Clone, Debug)]
pub struct Subfield {
    field: Arc<FieldSpec>,
    basis: Vec<FieldElement>,
    /// Columns: Q-coordinates of the basis elements.
    coords: Matrix,
}

fn qfield() -> Arc<FieldSpec> {
    FieldSpec::rationals()
}

fn to_q(x: &Q) -> FieldElement {
    FieldElement::from_rational(&qfield(), x.clone())
}

fn qcolumn(x: &FieldElement) -> Vec<FieldElement> {
    x.coords().iter().map(to_q).collect()
}

impl Subfield {
    fn from_basis(field: &Arc<FieldSpec>, basis: Vec<FieldElement>) -> Result<Subfield> {
        let cols: Vec<_> = basis.iter().map(qcolumn).collect();
        let coords = Matrix::from_columns(&qfield(), &cols)?;
        Ok(Subfield {
            field: field.clone(),
            basis,
            coords,
        })
    }

    /// The image of K under an embedding K -> L.
    pub fn from_embedding(emb: &FieldEmbedding) -> Result<Subfield> {
        let t = emb.generator_image();
        let d = emb.source().degree();
        let basis = (0..d).map(|s| t.pow(s as u64)).collect();
        Self::from_basis(emb.target(), basis)
    }

    /// The fixed field of a set of automorphisms.
    pub fn fixed_by(field: &Arc<FieldSpec>, group: &[GaloisAction]) -> Result<Subfield> {
        let d = field.degree();
        let q = qfield();
        let mut rows = Vec::new();
        for g in group {
            if g.field().as_ref() != field.as_ref() {
                return Err(Error::FieldMismatch);
            }
            // row block of g - id acting on power-basis coordinates
            let mut m = Matrix::zeros(&q, d, d);
            for s in 0..d {
                let mut e = vec![Q::from_integer(0.into()); d];
                e[s] = Q::from_integer(1.into());
                let x = FieldElement::from_coords(field, e);
                let y = &g.apply(&x) - &x;
                for (i, c) in y.coords().iter().enumerate() {
                    m[(i, s)] = to_q(c);
                }
            }
            rows.extend(m.to_rows());
        }
        let basis = if rows.is_empty() {
            (0..d).map(|s| FieldElement::generator(field).pow(s as u64)).collect()
        } else {
            Matrix::from_rows(&q, rows)?
                .nullspace()
                .into_iter()
                .map(|v| {
                    let c = v.iter().map(|x| x.as_rational().expect("rational")).collect();
                    FieldElement::from_coords(field, c)
                })
                .collect()
        };
        Self::from_basis(field, basis)
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn degree(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[FieldElement] {
        &self.basis
    }

    /// Coordinates over the stored Q-basis, if x lies in K.
    pub fn coordinates(&self, x: &FieldElement) -> Option<Vec<Q>> {
        let sol = self.coords.solve(&qcolumn(x))?;
        Some(sol.iter().map(|c| c.as_rational().expect("rational")).collect())
    }

    pub fn contains(&self, x: &FieldElement) -> bool {
        self.coordinates(x).is_some()
    }

    fn combine(&self, q: &[FieldElement]) -> FieldElement {
        let mut acc = FieldElement::zero(&self.field);
        for (c, b) in q.iter().zip(&self.basis) {
            acc = &acc + &b.scale(&c.as_rational().expect("rational"));
        }
        acc
    }

    /// Q-columns spanning the K-span of the given L-vectors.
    fn span_columns(&self, ws: &[Vec<FieldElement>]) -> Vec<Vec<FieldElement>> {
        let mut cols = Vec::new();
        for w in ws {
            for b in &self.basis {
                cols.push(w.iter().flat_map(|x| qcolumn(&(b * x))).collect());
            }
        }
        cols
    }

    /// Dimension over K of the K-span of the vectors.
    pub fn span_dimension(&self, ws: &[Vec<FieldElement>]) -> usize {
        if ws.is_empty() {
            return 0;
        }
        let cols = self.span_columns(ws);
        Matrix::from_columns(&qfield(), &cols).expect("rectangular").rank() / self.degree()
    }

    /// K-coefficients expressing w in terms of the given vectors.
    fn solve(&self, ws: &[Vec<FieldElement>], w: &[FieldElement]) -> Option<Vec<FieldElement>> {
        let target: Vec<FieldElement> = w.iter().flat_map(qcolumn).collect();
        if ws.is_empty() {
            return target.iter().all(FieldElement::is_zero).then(Vec::new);
        }
        let m = Matrix::from_columns(&qfield(), &self.span_columns(ws)).ok()?;
        let sol = m.solve(&target)?;
        let d = self.degree();
        Some((0..ws.len()).map(|i| self.combine(&sol[i * d..(i + 1) * d])).collect())
    }
}

fn check_chain(chain: &[usize], blocks: usize) -> Result<()> {
    let mut seen = vec![false; blocks];
    for &b in chain {
        if b >= blocks || seen[b] {
            return Err(Error::Malformed(format!("chain {chain:?} is not a total order on {blocks} blocks")));
        }
        seen[b] = true;
    }
    if chain.len() != blocks {
        return Err(Error::Malformed(format!("chain {chain:?} misses blocks")));
    }
    Ok(())
}

/// Block mask allowed by every chain: (j, k) allowed iff k sits at or above j
/// in each order. Chains list block indices from the smallest upwards.
pub fn chain_mask(exps: &ExponentialSum, chains: &[Vec<usize>]) -> Result<HomMask> {
    let m = exps.len();
    let mut block = vec![vec![true; m]; m];
    for c in chains {
        check_chain(c, m)?;
        let mut pos = vec![0; m];
        for (i, &b) in c.iter().enumerate() {
            pos[b] = i;
        }
        for (j, row) in block.iter_mut().enumerate() {
            for (k, a) in row.iter_mut().enumerate() {
                *a &= pos[k] >= pos[j];
            }
        }
    }
    Ok(HomMask::from_blocks(exps.block_sizes(), exps.block_sizes(), &block))
}

fn sub_block(m: &Matrix, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Matrix {
    let data: Vec<Vec<FieldElement>> = rows
        .map(|r| cols.clone().map(|c| m[(r, c)].clone()).collect())
        .collect();
    Matrix::from_rows(m.field(), data).expect("rectangular")
}

/// An allowed automorphism A (for every chain's triangular mask) carrying the
/// K-span of `vectors` onto the standard lattice K^n.
pub fn normalize_lattice(
    vectors: &[Vec<FieldElement>],
    exps: &ExponentialSum,
    chains: &[Vec<usize>],
    k: &Subfield,
) -> Result<MaskedMatrix> {
    let n = exps.rank();
    let l = k.field().clone();
    if vectors.len() != n || vectors.iter().any(|v| v.len() != n) {
        return Err(Error::ShapeMismatch(format!("need {n} vectors of length {n}")));
    }
    let v = Matrix::from_columns(&l, vectors)?;
    if !v.is_invertible() {
        return Err(Error::NotALattice("vectors are linearly dependent".into()));
    }
    let mask = chain_mask(exps, chains)?;
    let Some(first) = chains.first() else {
        return MaskedMatrix::new(v.inverse()?, mask);
    };
    let offsets = exps.offsets();
    let sizes = exps.block_sizes();
    let range = |b: usize| offsets[b]..offsets[b] + sizes[b];

    // top-down pivots along the first chain
    let mut remaining: Vec<Vec<FieldElement>> = vectors.to_vec();
    let mut pivots: Vec<Vec<Vec<FieldElement>>> = vec![Vec::new(); exps.len()];
    for &b in first.iter().rev() {
        let proj = |w: &Vec<FieldElement>| w[range(b)].to_vec();
        let mut chosen: Vec<usize> = Vec::new();
        let mut chosen_proj: Vec<Vec<FieldElement>> = Vec::new();
        for (i, w) in remaining.iter().enumerate() {
            if chosen.len() == sizes[b] {
                break;
            }
            let mut trial = chosen_proj.clone();
            trial.push(proj(w));
            if k.span_dimension(&trial) == trial.len() {
                chosen.push(i);
                chosen_proj = trial;
            }
        }
        if chosen.len() < sizes[b] {
            return Err(Error::RankConditionViolated(format!(
                "block {b}: projections span K-dimension {} < {}",
                chosen.len(),
                sizes[b]
            )));
        }
        let piv: Vec<Vec<FieldElement>> = chosen.iter().map(|&i| remaining[i].clone()).collect();
        let mut rest = Vec::new();
        for (i, w) in remaining.into_iter().enumerate() {
            if chosen.contains(&i) {
                continue;
            }
            let coef = k.solve(&chosen_proj, &proj(&w)).ok_or_else(|| {
                Error::RankConditionViolated(format!(
                    "block {b}: projections span a K-space larger than their L-span"
                ))
            })?;
            let mut w = w;
            for (c, p) in coef.iter().zip(&piv) {
                for (x, y) in w.iter_mut().zip(p) {
                    *x = &*x - &(c * y);
                }
            }
            rest.push(w);
        }
        remaining = rest;
        pivots[b] = piv;
    }
    let mut cols = vec![Vec::new(); n];
    for (b, piv) in pivots.into_iter().enumerate() {
        for (t, p) in piv.into_iter().enumerate() {
            cols[offsets[b] + t] = p;
        }
    }
    let mut w = Matrix::from_columns(&l, &cols)?;

    // clear entries forbidden by the other chains with K-multiples of pivots
    let bp = mask.block_pattern();
    let mut pos = vec![0; exps.len()];
    for (i, &b) in first.iter().enumerate() {
        pos[b] = i;
    }
    for big in 0..exps.len() {
        for &j in first[..pos[big]].iter().rev() {
            if bp[j][big] {
                continue;
            }
            let blk = sub_block(&w, range(j), range(big));
            if blk.is_zero() {
                continue;
            }
            let x = sub_block(&w, range(j), range(j)).inverse()?.mul(&blk)?;
            if !x.entries().iter().all(|e| k.contains(e)) {
                return Err(Error::RankConditionViolated(format!(
                    "blocks {j}, {big}: elimination needs coefficients outside K"
                )));
            }
            for r in 0..n {
                for (ci, c) in range(big).enumerate() {
                    let mut acc = w[(r, c)].clone();
                    for (ti, t) in range(j).enumerate() {
                        acc = &acc - &(&w[(r, t)] * &x[(ti, ci)]);
                    }
                    w[(r, c)] = acc;
                }
            }
        }
    }
    let a = w.inverse()?;
    if !check_allowed(&a, &mask)? {
        return Err(Error::RankConditionViolated("normalized automorphism leaves the mask".into()));
    }
    debug_assert!(a.dot(&v).entries().iter().all(|e| k.contains(e)));
    MaskedMatrix::new(a, mask)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::q_int;
    use crate::puiseux::{Exp, PuiseuxExponent};

    fn two_exps(k: &Arc<FieldSpec>) -> ExponentialSum {
        let one = Exp::from_integer(1);
        let m = |c| PuiseuxExponent::monomial(FieldElement::from_int(k, c), one).unwrap();
        ExponentialSum::simple(vec![m(-1), m(1)]).unwrap()
    }

    #[test]
    fn gaussian_example() {
        let l = FieldSpec::gaussian();
        let sub = Subfield::from_embedding(&FieldEmbedding::find(&FieldSpec::rationals(), &l).unwrap()).unwrap();
        let i = FieldElement::generator(&l);
        let one = FieldElement::one(&l);
        let zero = FieldElement::zero(&l);
        let exps = two_exps(&l);
        let chains = vec![vec![0, 1]];
        let a = normalize_lattice(&[vec![one.clone(), zero.clone()], vec![i.clone(), one.clone()]], &exps, &chains, &sub)
            .unwrap();
        assert_eq!(a.matrix(), &Matrix::from_rows(&l, vec![vec![one.clone(), -&i], vec![zero.clone(), one.clone()]]).unwrap());
        let id = normalize_lattice(&[vec![one.clone(), zero.clone()], vec![zero.clone(), one.clone()]], &exps, &chains, &sub)
            .unwrap();
        assert!(id.matrix().is_identity());
        let bad = normalize_lattice(&[vec![one.clone(), one.clone()], vec![zero.clone(), i.clone()]], &exps, &chains, &sub);
        assert!(matches!(bad, Err(Error::RankConditionViolated(_))));
        let dep = normalize_lattice(&[vec![one.clone(), i.clone()], vec![i.clone(), -&one]], &exps, &chains, &sub);
        assert!(matches!(dep, Err(Error::NotALattice(_))));
    }

    #[test]
    fn fixed_field() {
        let l = FieldSpec::cyclotomic5();
        let g = crate::numfield::automorphisms(&l).unwrap();
        let all = Subfield::fixed_by(&l, &g).unwrap();
        assert_eq!(all.degree(), 1);
        assert!(all.contains(&FieldElement::from_rational(&l, q_int(3))));
        // the subgroup {id, conj} fixes Q(sqrt 5)
        let c = crate::numfield::conjugation(&l).unwrap();
        let real = Subfield::fixed_by(&l, &[c]).unwrap();
        assert_eq!(real.degree(), 2);
        let z = FieldElement::generator(&l);
        let zc = z.conj().unwrap();
        assert!(real.contains(&(&z + &zc)));
        assert!(!real.contains(&z));
    }
}
