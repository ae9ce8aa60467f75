use super::element::FieldElement;
use super::field::{FieldSpec, Q};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use num_traits::Zero;
use std::sync::Arc;

/// An embedding K -> L compatible with the chosen complex embeddings,
/// given by the image of the generator of K.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldEmbedding {
    source: Arc<FieldSpec>,
    target: Arc<FieldSpec>,
    image: FieldElement,
}

impl FieldEmbedding {
    /// Locate the image of the generator of `source` inside `target`.
    pub fn find(source: &Arc<FieldSpec>, target: &Arc<FieldSpec>) -> Result<Self> {
        if !target.degree().is_multiple_of(source.degree()) {
            return Err(Error::NoEmbedding);
        }
        let value = FieldElement::generator(source).to_complex();
        let coords = target
            .express_root_of(source.minpoly(), value, false)
            .ok_or(Error::NoEmbedding)?;
        let image = FieldElement::from_coords(target, coords);
        if (image.to_complex() - value).norm() > 1e-6 {
            return Err(Error::NoEmbedding);
        }
        Ok(FieldEmbedding {
            source: source.clone(),
            target: target.clone(),
            image,
        })
    }

    /// Embedding with an explicitly supplied generator image; checked to be
    /// a root of the source minimal polynomial.
    pub fn with_image(source: &Arc<FieldSpec>, image: FieldElement) -> Result<Self> {
        let target = image.field().clone();
        let f: Vec<Q> = source.minpoly().iter().map(|c| Q::from_integer(c.clone())).collect();
        if !target.compose_coords(&f, image.coords()).iter().all(|x| x.is_zero()) {
            return Err(Error::NoEmbedding);
        }
        Ok(FieldEmbedding {
            source: source.clone(),
            target,
            image,
        })
    }

    pub fn source(&self) -> &Arc<FieldSpec> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FieldSpec> {
        &self.target
    }

    pub fn generator_image(&self) -> &FieldElement {
        &self.image
    }

    pub fn map(&self, x: &FieldElement) -> FieldElement {
        FieldElement::from_coords(&self.target, self.target.compose_coords(x.coords(), self.image.coords()))
    }

    pub fn map_matrix(&self, m: &Matrix) -> Matrix {
        m.map_into(&self.target, |x| self.map(x))
    }

    /// The preimage of an element of L, if it lies in the image of K.
    pub fn preimage(&self, y: &FieldElement) -> Option<FieldElement> {
        let e = self.source.degree();
        // columns: coordinates of image^i in L
        let rat = FieldSpec::rationals();
        let mut cols = Vec::with_capacity(e);
        let mut p = FieldElement::one(&self.target);
        for _ in 0..e {
            cols.push(p.coords().iter().map(|c| FieldElement::from_rational(&rat, c.clone())).collect::<Vec<_>>());
            p = &p * &self.image;
        }
        let a = Matrix::from_columns(&rat, &cols).ok()?;
        let b: Vec<FieldElement> = y.coords().iter().map(|c| FieldElement::from_rational(&rat, c.clone())).collect();
        let x = a.solve(&b)?;
        let coords: Vec<Q> = x.iter().map(|v| v.as_rational().expect("rational")).collect();
        Some(FieldElement::from_coords(&self.source, coords))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_into_gaussian() {
        let q = FieldSpec::rationals();
        let k = FieldSpec::gaussian();
        let e = FieldEmbedding::find(&q, &k).unwrap();
        let x = FieldElement::from_rational(&q, super::super::field::q_frac(3, 7));
        let y = e.map(&x);
        assert_eq!(y.as_rational(), Some(super::super::field::q_frac(3, 7)));
        assert_eq!(e.preimage(&y).unwrap(), x);
        assert!(e.preimage(&FieldElement::generator(&k)).is_none());
    }

    #[test]
    fn sqrt2_not_in_gaussian() {
        assert_eq!(
            FieldEmbedding::find(&FieldSpec::sqrt2(), &FieldSpec::gaussian()).unwrap_err(),
            Error::NoEmbedding
        );
    }
}
