//! Canonical JSON document. Serializing a parsed canonical document gives
//! back the same bytes.

use super::{LocalIrregularDatum, LocalSystemRep, StokesData, Surface};
use crate::error::{Error, Result};
use crate::homspaces::ExponentialSum;
use crate::json::{
    field_from_doc, field_to_doc, matrix_from_doc, matrix_to_doc, puiseux_from_doc, puiseux_to_doc, sector_from_doc,
    sector_to_doc, FieldDoc, MatrixDoc, PuiseuxDoc, SectorDoc, TermDoc,
};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: &str = "stokes-data/1";
/// Recorded in every document so that data written under another gluing
/// convention is not silently misread.
pub const CONVENTION: &str = "inv(C) T C = P S_k..S_1; lifted sectors; P e_a = e_pi(a)";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExponentDoc {
    n: u32,
    terms: Vec<TermDoc>,
    multiplicity: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointDoc {
    coordinate: String,
    n: u32,
    exponents: Vec<ExponentDoc>,
    sectors: Vec<SectorDoc>,
    stokes: Vec<MatrixDoc>,
    connection: MatrixDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    format: String,
    convention: String,
    field: FieldDoc,
    surface: String,
    punctures: Vec<String>,
    base: String,
    basis: String,
    rank: usize,
    monodromies: IndexMap<String, MatrixDoc>,
    irregular: IndexMap<String, PointDoc>,
    /// Tool output riding along with the datum; ignored when parsing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    report: Option<serde_json::Value>,
}

pub fn to_json(d: &StokesData) -> String {
    render(d, None)
}

/// The canonical document with an extra "report" block at the end.
pub fn to_json_with_report(d: &StokesData, report: serde_json::Value) -> String {
    render(d, Some(report))
}

fn render(d: &StokesData, report: Option<serde_json::Value>) -> String {
    let ls = &d.local_system;
    let doc = Document {
        format: FORMAT_VERSION.into(),
        convention: CONVENTION.into(),
        field: field_to_doc(&d.field),
        surface: ls.surface.name().into(),
        punctures: ls.punctures.clone(),
        base: ls.base_label.clone(),
        basis: ls.basis_convention.clone(),
        rank: ls.rank,
        monodromies: ls
            .punctures
            .iter()
            .zip(&ls.monodromies)
            .map(|(p, t)| (p.clone(), matrix_to_doc(t)))
            .collect(),
        irregular: d
            .irregular
            .iter()
            .map(|(p, x)| {
                let exponents = x
                    .exponents
                    .entries()
                    .iter()
                    .map(|(phi, m)| {
                        let pd = puiseux_to_doc(phi);
                        ExponentDoc {
                            n: pd.n,
                            terms: pd.terms,
                            multiplicity: *m,
                        }
                    })
                    .collect();
                let pd = PointDoc {
                    coordinate: x.coordinate.clone(),
                    n: x.n,
                    exponents,
                    sectors: x.sectors.iter().map(sector_to_doc).collect(),
                    stokes: x.stokes.iter().map(matrix_to_doc).collect(),
                    connection: matrix_to_doc(&x.connection),
                };
                (p.clone(), pd)
            })
            .collect(),
        report,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("documents serialize");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> Result<StokesData> {
    let doc: Document = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
    if doc.format != FORMAT_VERSION {
        return Err(Error::Malformed(format!("unsupported format {:?}", doc.format)));
    }
    if doc.convention != CONVENTION {
        return Err(Error::Malformed(format!("unsupported convention {:?}", doc.convention)));
    }
    let k = field_from_doc(&doc.field)?;
    let surface = Surface::parse(&doc.surface)?;
    if doc.monodromies.len() != doc.punctures.len() || doc.punctures.iter().any(|p| !doc.monodromies.contains_key(p)) {
        return Err(Error::Malformed("monodromies must be given for exactly the punctures".into()));
    }
    let monodromies = doc
        .punctures
        .iter()
        .map(|p| matrix_from_doc(&k, &doc.monodromies[p]))
        .collect::<Result<_>>()?;
    let mut irregular = IndexMap::new();
    for (p, x) in doc.irregular {
        let mut entries = Vec::with_capacity(x.exponents.len());
        for e in x.exponents {
            let phi = puiseux_from_doc(
                &k,
                &PuiseuxDoc {
                    n: e.n,
                    terms: e.terms,
                },
            )?;
            entries.push((phi, e.multiplicity));
        }
        let datum = LocalIrregularDatum {
            point: p.clone(),
            coordinate: x.coordinate,
            n: x.n,
            exponents: ExponentialSum::new(entries)?,
            sectors: x.sectors.iter().map(sector_from_doc).collect::<Result<_>>()?,
            stokes: x.stokes.iter().map(|m| matrix_from_doc(&k, m)).collect::<Result<_>>()?,
            connection: matrix_from_doc(&k, &x.connection)?,
        };
        irregular.insert(p, datum);
    }
    Ok(StokesData {
        field: k,
        local_system: LocalSystemRep {
            rank: doc.rank,
            surface,
            punctures: doc.punctures,
            monodromies,
            base_label: doc.base,
            basis_convention: doc.basis,
        },
        irregular,
    })
}
