//! Small helpers shared by the JSON document formats.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::numfield::{FieldElement, FieldSpec, Q};
use crate::puiseux::{Exp, PuiseuxExponent};
use crate::sectors::Sector;
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Parse "n" or "n/d" into a reduced rational.
pub fn parse_rational(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Malformed(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        None => Ok(Q::from_integer(s.parse::<BigInt>().map_err(|_| bad())?)),
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
    }
}

/// Canonical string for a rational: "n" for integers, "n/d" otherwise.
pub fn format_rational(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}


#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDoc {
    pub minpoly: Vec<i64>,
    pub embedding: [String; 4],
}

pub type ElementDoc = Vec<String>;
pub type MatrixDoc = Vec<Vec<ElementDoc>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDoc {
    pub a: String,
    pub c: ElementDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PuiseuxDoc {
    pub n: u32,
    pub terms: Vec<TermDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectorDoc {
    pub arc: [String; 2],
    pub radius: String,
}

pub fn field_to_doc(k: &FieldSpec) -> FieldDoc {
    FieldDoc {
        minpoly: k.minpoly().iter().map(|c| c.to_i64().expect("small coefficient")).collect(),
        embedding: k.embedding_box().clone().map(|x| format_rational(&x)),
    }
}

pub fn field_from_doc(doc: &FieldDoc) -> Result<Arc<FieldSpec>> {
    let b: Vec<Q> = doc
        .embedding
        .iter()
        .map(|s| parse_rational(s))
        .collect::<Result<_>>()?;
    FieldSpec::new(
        doc.minpoly.iter().map(|&c| BigInt::from(c)).collect(),
        [b[0].clone(), b[1].clone(), b[2].clone(), b[3].clone()],
    )
}

pub fn element_to_doc(x: &FieldElement) -> ElementDoc {
    x.coords().iter().map(format_rational).collect()
}

pub fn element_from_doc(k: &Arc<FieldSpec>, doc: &ElementDoc) -> Result<FieldElement> {
    if doc.len() != k.degree() {
        return Err(Error::Malformed(format!(
            "element has {} coordinates, field degree is {}",
            doc.len(),
            k.degree()
        )));
    }
    let c = doc.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
    Ok(FieldElement::from_coords(k, c))
}

pub fn matrix_to_doc(m: &Matrix) -> MatrixDoc {
    m.to_rows()
        .iter()
        .map(|r| r.iter().map(element_to_doc).collect())
        .collect()
}

pub fn matrix_from_doc(k: &Arc<FieldSpec>, doc: &MatrixDoc) -> Result<Matrix> {
    let rows = doc
        .iter()
        .map(|r| r.iter().map(|e| element_from_doc(k, e)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(k, rows).map_err(|e| Error::Malformed(e.to_string()))
}

pub fn parse_exp(s: &str) -> Result<Exp> {
    let q = parse_rational(s)?;
    let n = q.numer().to_i64().ok_or_else(|| Error::Malformed(s.into()))?;
    let d = q.denom().to_i64().ok_or_else(|| Error::Malformed(s.into()))?;
    Ok(Exp::new(n, d))
}

pub fn format_exp(a: &Exp) -> String {
    if *a.denom() == 1 {
        a.numer().to_string()
    } else {
        format!("{}/{}", a.numer(), a.denom())
    }
}

pub fn puiseux_to_doc(p: &PuiseuxExponent) -> PuiseuxDoc {
    PuiseuxDoc {
        n: p.ramification(),
        terms: p
            .terms()
            .map(|(a, c)| TermDoc {
                a: format_exp(a),
                c: element_to_doc(c),
            })
            .collect(),
    }
}

pub fn puiseux_from_doc(k: &Arc<FieldSpec>, doc: &PuiseuxDoc) -> Result<PuiseuxExponent> {
    let terms = doc
        .terms
        .iter()
        .map(|t| Ok((parse_exp(&t.a)?, element_from_doc(k, &t.c)?)))
        .collect::<Result<Vec<_>>>()?;
    let p = PuiseuxExponent::new(k, terms)?;
    if p.ramification() != doc.n {
        return Err(Error::Malformed(format!(
            "ramification {} is not the minimal one ({})",
            doc.n,
            p.ramification()
        )));
    }
    Ok(p)
}

pub fn sector_to_doc(s: &Sector) -> SectorDoc {
    SectorDoc {
        arc: [format_rational(&s.lo), format_rational(&s.hi)],
        radius: format_rational(&s.radius),
    }
}

pub fn sector_from_doc(doc: &SectorDoc) -> Result<Sector> {
    Sector::new(
        parse_rational(&doc.arc[0])?,
        parse_rational(&doc.arc[1])?,
        parse_rational(&doc.radius)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_strings() {
        let x = parse_rational("-6/8").unwrap();
        assert_eq!(format_rational(&x), "-3/4");
        assert_eq!(format_rational(&parse_rational("5").unwrap()), "5");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn field_and_puiseux_docs() {
        let k = FieldSpec::gaussian();
        let d = field_to_doc(&k);
        assert_eq!(d.minpoly, vec![1, 0, 1]);
        let k2 = field_from_doc(&d).unwrap();
        assert_eq!(k2.as_ref(), k.as_ref());
        let p = PuiseuxExponent::new(
            &k,
            vec![
                (Exp::new(3, 2), FieldElement::generator(&k)),
                (Exp::new(1, 2), FieldElement::one(&k)),
            ],
        )
        .unwrap();
        let doc = puiseux_to_doc(&p);
        assert_eq!(doc.n, 2);
        assert_eq!(doc.terms[0].a, "3/2");
        assert_eq!(puiseux_from_doc(&k, &doc).unwrap(), p);
        let mut bad = doc.clone();
        bad.n = 4;
        assert!(puiseux_from_doc(&k, &bad).is_err());
    }
}
