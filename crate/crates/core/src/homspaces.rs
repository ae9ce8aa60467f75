//! Exponential sums, masks of admissible morphisms, and masked matrices.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::puiseux::PuiseuxExponent;
use crate::sectors::{exists_strict_subsector, Sector};
use serde::{Deserialize, Serialize};

/// A formal sum of E^phi with multiplicities, in a fixed order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentialSum {
    entries: Vec<(PuiseuxExponent, usize)>,
}

impl ExponentialSum {
    pub fn new(entries: Vec<(PuiseuxExponent, usize)>) -> Result<Self> {
        for (i, (p, m)) in entries.iter().enumerate() {
            if *m == 0 {
                return Err(Error::Malformed("multiplicity must be positive".into()));
            }
            if entries[..i].iter().any(|(q, _)| q == p) {
                return Err(Error::Malformed(format!("repeated exponent {p}")));
            }
        }
        Ok(ExponentialSum { entries })
    }

    /// Each exponent with multiplicity one.
    pub fn simple(exps: Vec<PuiseuxExponent>) -> Result<Self> {
        Self::new(exps.into_iter().map(|p| (p, 1)).collect())
    }

    pub fn entries(&self) -> &[(PuiseuxExponent, usize)] {
        &self.entries
    }

    pub fn exponents(&self) -> Vec<PuiseuxExponent> {
        self.entries.iter().map(|(p, _)| p.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.entries.iter().map(|(_, m)| m).sum()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.entries.iter().map(|(_, m)| *m).collect()
    }

    /// Block index of every basis vector.
    pub fn labels(&self) -> Vec<usize> {
        self.entries
            .iter()
            .enumerate()
            .flat_map(|(i, (_, m))| std::iter::repeat_n(i, *m))
            .collect()
    }

    /// Offset of the first basis vector of each block.
    pub fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.entries.len());
        let mut acc = 0;
        for (_, m) in &self.entries {
            out.push(acc);
            acc += m;
        }
        out
    }
}

/// Block-constant 0/1 pattern of admissible matrix entries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomMask {
    pub rows: usize,
    pub cols: usize,
    pub row_blocks: Vec<usize>,
    pub col_blocks: Vec<usize>,
    #[serde(with = "bits")]
    pub allowed: Vec<bool>,
}

mod bits {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[bool], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|&b| b as u8))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<bool>, D::Error> {
        let v: Vec<u8> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|b| b != 0).collect())
    }
}

impl HomMask {
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.allowed[r * self.cols + c]
    }

    /// Mask with one entry per block pair.
    pub fn block_pattern(&self) -> Vec<Vec<bool>> {
        let mut ro = 0;
        let mut out = Vec::new();
        for &rb in &self.row_blocks {
            let mut co = 0;
            let mut row = Vec::new();
            for &cb in &self.col_blocks {
                row.push(self.get(ro, co));
                co += cb;
            }
            out.push(row);
            ro += rb;
        }
        out
    }

    /// Expand a block pattern to entry level.
    pub fn from_blocks(row_blocks: Vec<usize>, col_blocks: Vec<usize>, block: &[Vec<bool>]) -> HomMask {
        let rows = row_blocks.iter().sum();
        let cols = col_blocks.iter().sum();
        let mut allowed = Vec::with_capacity(rows * cols);
        for (j, rb) in row_blocks.iter().enumerate() {
            for _ in 0..*rb {
                for (k, cb) in col_blocks.iter().enumerate() {
                    allowed.extend(std::iter::repeat_n(block[j][k], *cb));
                }
            }
        }
        HomMask {
            rows,
            cols,
            row_blocks,
            col_blocks,
            allowed,
        }
    }

    pub fn all_allowed(rows: usize, cols: usize) -> HomMask {
        HomMask {
            rows,
            cols,
            row_blocks: vec![1; rows],
            col_blocks: vec![1; cols],
            allowed: vec![true; rows * cols],
        }
    }

    pub fn transpose(&self) -> HomMask {
        let mut allowed = Vec::with_capacity(self.allowed.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                allowed.push(self.get(r, c));
            }
        }
        HomMask {
            rows: self.cols,
            cols: self.rows,
            row_blocks: self.col_blocks.clone(),
            col_blocks: self.row_blocks.clone(),
            allowed,
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c) as u8).collect())
            .collect()
    }
}

/// Admissible entries for morphisms `source -> target` on a sector: entry
/// (j, k) may be nonzero unless f_k is strictly dominated by g_j on some
/// open subsector.
pub fn hom_mask(source: &ExponentialSum, target: &ExponentialSum, s: &Sector) -> Result<HomMask> {
    let mut block = vec![vec![true; source.len()]; target.len()];
    for (j, (g, _)) in target.entries().iter().enumerate() {
        for (k, (f, _)) in source.entries().iter().enumerate() {
            block[j][k] = !exists_strict_subsector(f, g, s)?;
        }
    }
    Ok(HomMask::from_blocks(target.block_sizes(), source.block_sizes(), &block))
}

pub fn check_allowed(m: &Matrix, mask: &HomMask) -> Result<bool> {
    if m.rows() != mask.rows || m.cols() != mask.cols {
        return Err(Error::ShapeMismatch(format!(
            "matrix {}x{} against mask {}x{}",
            m.rows(),
            m.cols(),
            mask.rows,
            mask.cols
        )));
    }
    Ok((0..m.rows()).all(|r| (0..m.cols()).all(|c| mask.get(r, c) || m[(r, c)].is_zero())))
}

/// Allowed, invertible, and with allowed inverse.
pub fn is_allowed_automorphism(m: &Matrix, mask: &HomMask) -> Result<bool> {
    if !check_allowed(m, mask)? {
        return Ok(false);
    }
    if !m.is_square() {
        return Ok(false);
    }
    match m.inverse() {
        Ok(inv) => check_allowed(&inv, mask),
        Err(_) => Ok(false),
    }
}

/// A matrix paired with the mask it satisfies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaskedMatrix {
    matrix: Matrix,
    mask: HomMask,
}

impl MaskedMatrix {
    pub fn new(matrix: Matrix, mask: HomMask) -> Result<Self> {
        if !check_allowed(&matrix, &mask)? {
            return Err(Error::ShapeMismatch("matrix has entries outside its mask".into()));
        }
        Ok(MaskedMatrix { matrix, mask })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn mask(&self) -> &HomMask {
        &self.mask
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::{FieldElement, FieldSpec};
    use crate::puiseux::Exp;

    fn sum2() -> ExponentialSum {
        let k = FieldSpec::rationals();
        let m = |c| PuiseuxExponent::monomial(FieldElement::from_int(&k, c), Exp::from_integer(1)).unwrap();
        ExponentialSum::simple(vec![m(-1), m(1)]).unwrap()
    }

    #[test]
    fn masks_examples() {
        let e = sum2();
        let m = hom_mask(&e, &e, &Sector::turns((-1, 8), (1, 8)).unwrap()).unwrap();
        assert_eq!(m.to_rows(), vec![vec![1, 1], vec![0, 1]]);
        let m2 = hom_mask(&e, &e, &Sector::turns((0, 1), (1, 1)).unwrap()).unwrap();
        assert_eq!(m2.to_rows(), vec![vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn automorphism_check() {
        let e = sum2();
        let k = FieldSpec::rationals();
        let mask = hom_mask(&e, &e, &Sector::turns((-1, 8), (1, 8)).unwrap()).unwrap();
        let good = Matrix::from_ints(&k, &[&[1, 5], &[0, 1]]);
        assert!(is_allowed_automorphism(&good, &mask).unwrap());
        let bad = Matrix::from_ints(&k, &[&[1, 0], &[5, 1]]);
        assert!(!check_allowed(&bad, &mask).unwrap());
        let wrong = Matrix::from_ints(&k, &[&[1]]);
        assert!(matches!(check_allowed(&wrong, &mask), Err(Error::ShapeMismatch(_))));
        let json = serde_json::to_string(&mask).unwrap();
        assert!(json.contains("\"allowed\":[1,1,0,1]"));
        let back: HomMask = serde_json::from_str(&json).unwrap();
        assert_eq!(back, mask);
    }
}
