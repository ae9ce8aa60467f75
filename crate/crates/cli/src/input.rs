//! Parsing of command-line values and auxiliary documents.
//!
//! Exponents use a compact syntax: terms `COEFF@A` joined by `;`, where COEFF
//! lists power-basis coordinates separated by commas and A is the pole order.
//! `-1@1` is -z^-1; over Q(i), `0,1@1/2` is i z^-1/2; `0` is the zero
//! exponent. Exponential sums join exponents with `|`, with an optional
//! `*m` multiplicity.

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use std::sync::Arc;
use stokes_core::json::{self, element_from_doc, field_from_doc, ElementDoc, FieldDoc, PuiseuxDoc};
use stokes_core::numfield::Q;
use stokes_core::*;

pub fn read(path: &str) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {path}"))
}

/// A named field, a path to a field document, or an inline document.
pub fn field(spec: &str) -> Result<Arc<FieldSpec>> {
    let named = match spec {
        "rationals" | "q" => Some(FieldSpec::rationals()),
        "gaussian" | "qi" => Some(FieldSpec::gaussian()),
        "sqrt2" => Some(FieldSpec::sqrt2()),
        "zeta5" | "cyclotomic5" => Some(FieldSpec::cyclotomic5()),
        _ => None,
    };
    if let Some(k) = named {
        return Ok(k);
    }
    let text = if spec.trim_start().starts_with('{') { spec.to_string() } else { read(spec)? };
    let doc: FieldDoc = serde_json::from_str(&text).map_err(|e| Error::Malformed(e.to_string()))?;
    Ok(field_from_doc(&doc)?)
}

pub fn element(k: &Arc<FieldSpec>, s: &str) -> Result<FieldElement> {
    let mut coords: Vec<String> = s.split(',').map(|c| c.trim().to_string()).collect();
    if coords.len() > k.degree() {
        bail!(Error::Malformed(format!("{s}: more coordinates than the field degree")));
    }
    coords.resize(k.degree(), "0".into());
    Ok(element_from_doc(k, &coords)?)
}

pub fn exponent(k: &Arc<FieldSpec>, s: &str) -> Result<PuiseuxExponent> {
    let s = s.trim();
    if s == "0" {
        return Ok(PuiseuxExponent::zero(k));
    }
    let mut terms = Vec::new();
    for t in s.split(';') {
        let Some((c, a)) = t.split_once('@') else {
            bail!(Error::Malformed(format!("term {t:?} lacks '@'")));
        };
        terms.push((json::parse_exp(a.trim())?, element(k, c)?));
    }
    Ok(PuiseuxExponent::new(k, terms)?)
}

pub fn sum(k: &Arc<FieldSpec>, s: &str) -> Result<ExponentialSum> {
    let mut entries = Vec::new();
    for part in s.split('|') {
        let (e, m) = match part.rsplit_once('*') {
            Some((e, m)) => (e, m.trim().parse::<usize>().context("multiplicity")?),
            None => (part, 1),
        };
        entries.push((exponent(k, e)?, m));
    }
    Ok(ExponentialSum::new(entries)?)
}

/// `lo,hi` in turns, unit radius.
pub fn arc(s: &str) -> Result<Sector> {
    let Some((lo, hi)) = s.split_once(',') else {
        bail!(Error::Malformed(format!("arc {s:?} must read lo,hi")));
    };
    let q = |x: &str| -> Result<Q> { Ok(json::parse_rational(x.trim())?) };
    Ok(Sector::new(q(lo)?, q(hi)?, Q::from_integer(1.into()))?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExpDoc {
    n: u32,
    terms: Vec<json::TermDoc>,
    #[serde(default = "one")]
    multiplicity: usize,
}

fn one() -> usize {
    1
}

/// Input of normalize-lattice.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LatticeDoc {
    field: FieldDoc,
    subfield: FieldDoc,
    exponents: Vec<ExpDoc>,
    chains: Vec<Vec<usize>>,
    vectors: Vec<Vec<ElementDoc>>,
}

pub struct LatticeInput {
    pub field: Arc<FieldSpec>,
    pub subfield: Arc<FieldSpec>,
    pub exponents: ExponentialSum,
    pub chains: Vec<Vec<usize>>,
    pub vectors: Vec<Vec<FieldElement>>,
}

pub fn lattice(text: &str) -> Result<LatticeInput> {
    let doc: LatticeDoc = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
    let l = field_from_doc(&doc.field)?;
    let k = field_from_doc(&doc.subfield)?;
    let mut entries = Vec::new();
    for e in doc.exponents {
        let p = json::puiseux_from_doc(&l, &PuiseuxDoc { n: e.n, terms: e.terms })?;
        entries.push((p, e.multiplicity));
    }
    let vectors = doc
        .vectors
        .iter()
        .map(|v| v.iter().map(|x| element_from_doc(&l, x)).collect::<stokes_core::Result<Vec<_>>>())
        .collect::<stokes_core::Result<Vec<_>>>()?;
    Ok(LatticeInput {
        field: l,
        subfield: k,
        exponents: ExponentialSum::new(entries)?,
        chains: doc.chains,
        vectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compact_exponents() {
        let k = FieldSpec::gaussian();
        let p = exponent(&k, "0,1@1/2; -3@1").unwrap();
        assert_eq!(p.num_terms(), 2);
        assert_eq!(p.ramification(), 2);
        assert!(exponent(&k, "0").unwrap().is_zero());
        assert!(exponent(&k, "1,2,3@1").is_err());
        assert!(exponent(&k, "1").is_err());
        let s = sum(&k, "-1@1 | 1@1*2").unwrap();
        assert_eq!(s.rank(), 3);
        assert!(arc("1/2,1/4").is_err());
    }
}
