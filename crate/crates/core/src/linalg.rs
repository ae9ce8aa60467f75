//! Dense matrices over a number field.

use crate::error::{Error, Result};
use crate::numfield::{FieldElement, FieldSpec};
use std::fmt;
use std::ops::{Index, IndexMut};
use std::sync::Arc;

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Arc<FieldSpec>,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self[(r, c)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = FieldElement;
    fn index(&self, (r, c): (usize, usize)) -> &FieldElement {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut FieldElement {
        &mut self.data[r * self.cols + c]
    }
}

impl Matrix {
    pub fn zeros(field: &Arc<FieldSpec>, rows: usize, cols: usize) -> Self {
        Matrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![FieldElement::zero(field); rows * cols],
        }
    }

    pub fn identity(field: &Arc<FieldSpec>, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m[(i, i)] = FieldElement::one(field);
        }
        m
    }

    pub fn from_rows(field: &Arc<FieldSpec>, rows: Vec<Vec<FieldElement>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        let data: Vec<FieldElement> = rows.into_iter().flatten().collect();
        if data.iter().any(|e| e.field().as_ref() != field.as_ref()) {
            return Err(Error::FieldMismatch);
        }
        Ok(Matrix {
            field: field.clone(),
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn from_ints(field: &Arc<FieldSpec>, rows: &[&[i64]]) -> Self {
        let v = rows
            .iter()
            .map(|r| r.iter().map(|&x| FieldElement::from_int(field, x)).collect())
            .collect();
        Self::from_rows(field, v).expect("integer matrix")
    }

    pub fn from_columns(field: &Arc<FieldSpec>, cols: &[Vec<FieldElement>]) -> Result<Self> {
        let n = cols.first().map_or(0, |c| c.len());
        let mut m = Self::zeros(field, n, cols.len());
        for (j, col) in cols.iter().enumerate() {
            if col.len() != n {
                return Err(Error::ShapeMismatch("ragged columns".into()));
            }
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        Ok(m)
    }

    /// Permutation matrix sending basis vector j to basis vector perm[j].
    pub fn permutation(field: &Arc<FieldSpec>, perm: &[usize]) -> Self {
        let n = perm.len();
        let mut m = Self::zeros(field, n, n);
        for (j, &p) in perm.iter().enumerate() {
            m[(p, j)] = FieldElement::one(field);
        }
        m
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.data
    }

    pub fn row(&self, r: usize) -> Vec<FieldElement> {
        self.data[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    pub fn column(&self, c: usize) -> Vec<FieldElement> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<FieldElement>> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    pub fn mul(&self, o: &Matrix) -> Result<Matrix> {
        if self.cols != o.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        if self.field.as_ref() != o.field.as_ref() {
            return Err(Error::FieldMismatch);
        }
        let mut out = Matrix::zeros(&self.field, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = &out[(i, j)] + &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Product that panics on shape mismatch; for internal use with known shapes.
    pub fn dot(&self, o: &Matrix) -> Matrix {
        self.mul(o).expect("matrix shapes")
    }

    pub fn add(&self, o: &Matrix) -> Result<Matrix> {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Matrix) -> Result<Matrix> {
        self.zip(o, |a, b| a - b)
    }

    fn zip(&self, o: &Matrix, f: impl Fn(&FieldElement, &FieldElement) -> FieldElement) -> Result<Matrix> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(Error::ShapeMismatch("entrywise operation".into()));
        }
        if self.field.as_ref() != o.field.as_ref() {
            return Err(Error::FieldMismatch);
        }
        Ok(Matrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn scale(&self, k: &FieldElement) -> Matrix {
        self.map(|x| x * k)
    }

    pub fn map(&self, f: impl Fn(&FieldElement) -> FieldElement) -> Matrix {
        let data: Vec<FieldElement> = self.data.iter().map(f).collect();
        let field = data.first().map_or(self.field.clone(), |e| e.field().clone());
        Matrix {
            field,
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// Entrywise map into another field.
    pub fn map_into(&self, field: &Arc<FieldSpec>, f: impl Fn(&FieldElement) -> FieldElement) -> Matrix {
        Matrix {
            field: field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = &self[(i, j)];
                    if i == j {
                        x.is_one()
                    } else {
                        x.is_zero()
                    }
                })
            })
    }

    /// Row echelon form; returns the pivot columns and the determinant sign
    /// bookkeeping (product of pivots times the permutation sign).
    fn echelon(&mut self, aug: Option<&mut Matrix>) -> (Vec<usize>, FieldElement) {
        let mut aug = aug;
        let mut det = FieldElement::one(&self.field);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            if p != r {
                self.swap_rows(p, r);
                if let Some(a) = aug.as_deref_mut() {
                    a.swap_rows(p, r);
                }
                det = -det;
            }
            let inv = self[(r, c)].inv().expect("nonzero pivot");
            det = &det * &self[(r, c)];
            self.scale_row(r, &inv);
            if let Some(a) = aug.as_deref_mut() {
                a.scale_row(r, &inv);
            }
            for i in 0..self.rows {
                if i != r && !self[(i, c)].is_zero() {
                    let f = self[(i, c)].clone();
                    self.add_row_multiple(i, r, &f);
                    if let Some(a) = aug.as_deref_mut() {
                        a.add_row_multiple(i, r, &f);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (pivots, det)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn scale_row(&mut self, r: usize, k: &FieldElement) {
        for c in 0..self.cols {
            self[(r, c)] = &self[(r, c)] * k;
        }
    }

    /// row_i -= f * row_r
    fn add_row_multiple(&mut self, i: usize, r: usize, f: &FieldElement) {
        for c in 0..self.cols {
            if !self[(r, c)].is_zero() {
                self[(i, c)] = &self[(i, c)] - &(f * &self[(r, c)]);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.clone().echelon(None).0.len()
    }

    pub fn det(&self) -> Result<FieldElement> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("determinant of non-square matrix".into()));
        }
        let (piv, det) = self.clone().echelon(None);
        if piv.len() < self.rows {
            Ok(FieldElement::zero(&self.field))
        } else {
            Ok(det)
        }
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("inverse of non-square matrix".into()));
        }
        let mut a = self.clone();
        let mut inv = Matrix::identity(&self.field, self.rows);
        let (piv, _) = a.echelon(Some(&mut inv));
        if piv.len() < self.rows {
            return Err(Error::Singular);
        }
        Ok(inv)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Basis of the right null space, as column vectors.
    pub fn nullspace(&self) -> Vec<Vec<FieldElement>> {
        let mut a = self.clone();
        let (piv, _) = a.echelon(None);
        let free: Vec<usize> = (0..self.cols).filter(|c| !piv.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![FieldElement::zero(&self.field); self.cols];
                v[f] = FieldElement::one(&self.field);
                for (r, &pc) in piv.iter().enumerate() {
                    v[pc] = -&a[(r, f)];
                }
                v
            })
            .collect()
    }

    /// Solve `self * x = b` for a column vector, if solvable.
    pub fn solve(&self, b: &[FieldElement]) -> Option<Vec<FieldElement>> {
        let mut aug = Matrix::zeros(&self.field, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let (piv, _) = aug.echelon(None);
        if piv.contains(&self.cols) {
            return None;
        }
        let mut x = vec![FieldElement::zero(&self.field); self.cols];
        for (r, &pc) in piv.iter().enumerate() {
            x[pc] = aug[(r, self.cols)].clone();
        }
        Some(x)
    }

    pub fn trace(&self) -> FieldElement {
        let mut acc = FieldElement::zero(&self.field);
        for i in 0..self.rows.min(self.cols) {
            acc = &acc + &self[(i, i)];
        }
        acc
    }

    /// Characteristic polynomial det(xI - A), ascending coefficients
    /// (Faddeev-LeVerrier).
    pub fn charpoly(&self) -> Result<Vec<FieldElement>> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("characteristic polynomial of non-square matrix".into()));
        }
        let n = self.rows;
        let k = &self.field;
        let mut c = vec![FieldElement::zero(k); n + 1];
        c[n] = FieldElement::one(k);
        let mut m = Matrix::zeros(k, n, n);
        for step in 1..=n {
            let mut next = self.dot(&m);
            for i in 0..n {
                next[(i, i)] = &next[(i, i)] + &c[n + 1 - step];
            }
            m = next;
            let t = self.dot(&m).trace();
            c[n - step] = -t.scale(&crate::numfield::q_frac(1, step as i64));
        }
        Ok(c)
    }

    pub fn apply(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        (0..self.rows)
            .map(|i| {
                let mut acc = FieldElement::zero(&self.field);
                for (j, x) in v.iter().enumerate() {
                    acc = &acc + &(&self[(i, j)] * x);
                }
                acc
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charpoly_2x2() {
        let k = FieldSpec::rationals();
        let a = Matrix::from_ints(&k, &[&[1, 2], &[3, 4]]);
        let c: Vec<_> = a.charpoly().unwrap().iter().map(|x| x.to_string()).collect();
        assert_eq!(c, vec!["-2", "-5", "1"]);
    }

    #[test]
    fn inverse_and_det() {
        let k = FieldSpec::gaussian();
        let i = FieldElement::generator(&k);
        let one = FieldElement::one(&k);
        let m = Matrix::from_rows(&k, vec![vec![one.clone(), i.clone()], vec![i.clone(), one.clone()]]).unwrap();
        let inv = m.inverse().unwrap();
        assert!(m.dot(&inv).is_identity());
        assert_eq!(m.det().unwrap(), FieldElement::from_int(&k, 2));
        let s = Matrix::from_ints(&k, &[&[1, 2], &[2, 4]]);
        assert_eq!(s.inverse().unwrap_err(), Error::Singular);
        assert_eq!(s.rank(), 1);
        let ns = s.nullspace();
        assert_eq!(ns.len(), 1);
        assert!(s.apply(&ns[0]).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn solve_system() {
        let k = FieldSpec::rationals();
        let m = Matrix::from_ints(&k, &[&[2, 1], &[1, 3]]);
        let b = vec![FieldElement::from_int(&k, 3), FieldElement::from_int(&k, 4)];
        let x = m.solve(&b).unwrap();
        assert_eq!(m.apply(&x), b);
    }
}
