//! JSON forms of isomorphisms and G-structures. Documents carry only matrix
//! entries; the field comes from the accompanying Stokes data.

use super::GStructure;
use crate::error::{Error, Result};
use crate::json::{element_from_doc, element_to_doc, matrix_from_doc, matrix_to_doc, ElementDoc, MatrixDoc};
use crate::numfield::{FieldSpec, GaloisAction};
use crate::stokesdata::DataIsomorphism;
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IsoDoc {
    base_change: MatrixDoc,
    trivializations: IndexMap<String, Vec<MatrixDoc>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GStructureDoc {
    /// Image of the field generator under each automorphism.
    group: Vec<ElementDoc>,
    maps: Vec<IsoDoc>,
}

fn iso_doc(iso: &DataIsomorphism) -> IsoDoc {
    IsoDoc {
        base_change: matrix_to_doc(&iso.base_change),
        trivializations: iso
            .trivialization_changes
            .iter()
            .map(|(p, hs)| (p.clone(), hs.iter().map(matrix_to_doc).collect()))
            .collect(),
    }
}

fn iso_from_doc(k: &Arc<FieldSpec>, doc: &IsoDoc) -> Result<DataIsomorphism> {
    let mut tc = IndexMap::new();
    for (p, hs) in &doc.trivializations {
        tc.insert(
            p.clone(),
            hs.iter().map(|h| matrix_from_doc(k, h)).collect::<Result<Vec<_>>>()?,
        );
    }
    Ok(DataIsomorphism {
        base_change: matrix_from_doc(k, &doc.base_change)?,
        trivialization_changes: tc,
    })
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("documents serialize");
    s.push('\n');
    s
}

pub fn iso_to_json(iso: &DataIsomorphism) -> String {
    pretty(&iso_doc(iso))
}

pub fn iso_from_json(k: &Arc<FieldSpec>, text: &str) -> Result<DataIsomorphism> {
    let doc: IsoDoc = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
    iso_from_doc(k, &doc)
}

pub fn gstructure_to_json(gs: &GStructure) -> String {
    pretty(&GStructureDoc {
        group: gs.group.iter().map(|g| element_to_doc(&g.image())).collect(),
        maps: gs.maps.iter().map(iso_doc).collect(),
    })
}

pub fn gstructure_from_json(k: &Arc<FieldSpec>, text: &str) -> Result<GStructure> {
    let doc: GStructureDoc = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
    let group = doc
        .group
        .iter()
        .map(|e| GaloisAction::from_image(k, element_from_doc(k, e)?))
        .collect::<Result<Vec<_>>>()?;
    let maps = doc.maps.iter().map(|m| iso_from_doc(k, m)).collect::<Result<_>>()?;
    Ok(GStructure { group, maps })
}
