//! Generalized monodromy data: a local system on a punctured sphere or disc
//! together with Stokes matrices and connection matrices at the irregular
//! punctures.
//!
//! Conventions used throughout:
//!
//! * Sectors at a point are lifted arcs `S_1..S_k` (in turns) with strictly
//!   increasing lower ends, `hi_j > lo_{j+1}` and `hi_k > lo_1 + 1`. Every
//!   exponent is read in the single determination continued along the lifted
//!   angle, so the same ordered basis serves every sector.
//! * `Sigma_j` maps the trivialization on `S_j` to the one on `S_{j+1}`; the
//!   last one lands on `S_1 + 1`, whose labels are related to those of `S_1`
//!   by the seam permutation `P e_a = e_{pi(a)}` where
//!   `monodromy_shift(phi_a, 1) = phi_{pi(a)}`.
//! * Gluing: `C^-1 T C = P Sigma_k ... Sigma_1`.

mod format;
mod iso;

pub use format::{from_json, to_json, to_json_with_report, CONVENTION, FORMAT_VERSION};
pub use iso::{isomorphism_probe, probe_with, DataIsomorphism, InvariantReport, ProbeOutcome};

use crate::error::{Error, Result};
use crate::homspaces::{check_allowed, hom_mask, ExponentialSum, HomMask};
use crate::linalg::Matrix;
use crate::numfield::{FieldEmbedding, FieldSpec};
use crate::sectors::Sector;
use indexmap::IndexMap;
use num_traits::One;
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Surface {
    Sphere,
    Disc,
}

impl Surface {
    pub fn name(self) -> &'static str {
        match self {
            Surface::Sphere => "sphere",
            Surface::Disc => "disc",
        }
    }

    pub fn parse(s: &str) -> Result<Surface> {
        match s {
            "sphere" => Ok(Surface::Sphere),
            "disc" => Ok(Surface::Disc),
            _ => Err(Error::Malformed(format!("unknown surface {s:?}"))),
        }
    }
}

/// Monodromy representation of the local system, one matrix per puncture in
/// the stored order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalSystemRep {
    pub rank: usize,
    pub surface: Surface,
    pub punctures: Vec<String>,
    pub monodromies: Vec<Matrix>,
    pub base_label: String,
    pub basis_convention: String,
}

impl LocalSystemRep {
    pub fn monodromy(&self, p: &str) -> Option<&Matrix> {
        self.punctures
            .iter()
            .position(|q| q == p)
            .map(|i| &self.monodromies[i])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalIrregularDatum {
    pub point: String,
    pub coordinate: String,
    pub n: u32,
    pub exponents: ExponentialSum,
    pub sectors: Vec<Sector>,
    pub stokes: Vec<Matrix>,
    pub connection: Matrix,
}

impl LocalIrregularDatum {
    /// Overlap of S_j with S_{j+1}; for the last sector, with S_1 + 1.
    pub fn overlap(&self, j: usize) -> Option<Sector> {
        let k = self.sectors.len();
        let next = if j + 1 < k {
            self.sectors[j + 1].clone()
        } else {
            self.sectors[0].shifted(1)
        };
        self.sectors[j].intersect(&next)
    }

    /// Basis-level seam permutation: entry `i` is the image index of `e_i`.
    pub fn seam_permutation(&self) -> Result<Vec<usize>> {
        let entries = self.exponents.entries();
        let offsets = self.exponents.offsets();
        let mut perm = vec![0; self.exponents.rank()];
        for (a, (phi, m)) in entries.iter().enumerate() {
            let s = phi.monodromy_shift(1)?;
            let b = entries
                .iter()
                .position(|(q, _)| *q == s)
                .ok_or_else(|| Error::Malformed(format!("continuation of {phi} is not in the exponent list")))?;
            if entries[b].1 != *m {
                return Err(Error::Malformed(format!(
                    "multiplicity of {phi} differs from that of its continuation"
                )));
            }
            for t in 0..*m {
                perm[offsets[a] + t] = offsets[b] + t;
            }
        }
        Ok(perm)
    }

    pub fn seam_matrix(&self, field: &Arc<FieldSpec>) -> Result<Matrix> {
        Ok(Matrix::permutation(field, &self.seam_permutation()?))
    }

    /// Mask constraining Sigma_j.
    pub fn stokes_mask(&self, j: usize) -> Result<HomMask> {
        let ov = self
            .overlap(j)
            .ok_or_else(|| Error::Malformed(format!("sectors {} and {} do not overlap", j + 1, j + 2)))?;
        hom_mask(&self.exponents, &self.exponents, &ov)
    }

    /// Endomorphism mask on S_j, constraining trivialization changes.
    pub fn sector_mask(&self, j: usize) -> Result<HomMask> {
        hom_mask(&self.exponents, &self.exponents, &self.sectors[j])
    }

    /// `P Sigma_k ... Sigma_1`.
    pub fn glued(&self, field: &Arc<FieldSpec>) -> Result<Matrix> {
        let r = self.exponents.rank();
        let mut acc = Matrix::identity(field, r);
        for s in &self.stokes {
            acc = s.mul(&acc)?;
        }
        self.seam_matrix(field)?.mul(&acc)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StokesData {
    pub field: Arc<FieldSpec>,
    pub local_system: LocalSystemRep,
    pub irregular: IndexMap<String, LocalIrregularDatum>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub location: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub pass: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn push(&mut self, loc: impl Into<String>, msg: impl Into<String>) {
        self.violations.push(Violation {
            location: loc.into(),
            message: msg.into(),
        });
    }
}

impl StokesData {
    pub fn rank(&self) -> usize {
        self.local_system.rank
    }

    pub fn point(&self, p: &str) -> Result<&LocalIrregularDatum> {
        self.irregular
            .get(p)
            .ok_or_else(|| Error::NotIrregularPoint(p.to_string()))
    }
}

/// `P_p Sigma_k ... Sigma_1` at an irregular point.
pub fn glued_local_monodromy(d: &StokesData, p: &str) -> Result<Matrix> {
    d.point(p)?.glued(&d.field)
}

fn square_ok(m: &Matrix, r: usize) -> bool {
    m.rows() == r && m.cols() == r
}

/// Check every invariant; violations are collected, never thrown.
pub fn validate(d: &StokesData) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let ls = &d.local_system;
    let r = ls.rank;
    if ls.punctures.len() != ls.monodromies.len() {
        rep.push("local system", "monodromy count differs from puncture count");
    }
    for (i, p) in ls.punctures.iter().enumerate() {
        if ls.punctures[..i].contains(p) {
            rep.push(format!("puncture {p}"), "repeated label");
        }
    }
    let mut all_square = true;
    for (p, t) in ls.punctures.iter().zip(&ls.monodromies) {
        let loc = format!("monodromy {p}");
        if !square_ok(t, r) {
            rep.push(loc, format!("expected {r}x{r}, got {}x{}", t.rows(), t.cols()));
            all_square = false;
        } else if !t.is_invertible() {
            rep.push(loc, "not invertible");
        }
    }
    if ls.surface == Surface::Sphere && all_square && !ls.monodromies.is_empty() {
        let mut prod = Matrix::identity(&d.field, r);
        for t in &ls.monodromies {
            prod = prod.dot(t);
        }
        if !prod.is_identity() {
            rep.push("local system", "product of monodromies is not the identity");
        }
    }
    for (p, loc) in &d.irregular {
        validate_point(d, p, loc, all_square, &mut rep);
    }
    rep.pass = rep.violations.is_empty();
    rep
}

fn validate_point(d: &StokesData, p: &str, x: &LocalIrregularDatum, monodromy_ok: bool, rep: &mut ValidationReport) {
    let r = d.rank();
    let at = |what: &str| format!("point {p}: {what}");
    let Some(t) = d.local_system.monodromy(p) else {
        rep.push(at("label"), "not a puncture of the surface");
        return;
    };
    if x.point != p {
        rep.push(at("label"), format!("datum names point {}", x.point));
    }
    let mut ok = true;
    if x.exponents.rank() != r {
        rep.push(at("exponents"), format!("multiplicities sum to {}, rank is {r}", x.exponents.rank()));
        ok = false;
    }
    for (phi, _) in x.exponents.entries() {
        if phi.field().as_ref() != d.field.as_ref() {
            rep.push(at("exponents"), format!("{phi} is over a different field"));
            ok = false;
        }
    }
    let n = x
        .exponents
        .entries()
        .iter()
        .fold(1u32, |acc, (phi, _)| num_integer::lcm(acc, phi.ramification()));
    if n != x.n {
        rep.push(at("ramification"), format!("stored {}, exponents need {n}", x.n));
    }
    if ok {
        if let Err(e) = x.seam_permutation() {
            rep.push(at("exponents"), format!("not closed under continuation: {e}"));
            ok = false;
        }
    }
    let exps_ok = ok;
    let k = x.sectors.len();
    if k < 2 {
        rep.push(at("sectors"), "at least two sectors are needed to cover the circle");
        return;
    }
    for j in 0..k {
        if j + 1 < k && x.sectors[j + 1].lo <= x.sectors[j].lo {
            rep.push(at(&format!("sector {}", j + 2)), "lower ends must increase");
            ok = false;
        }
        if x.overlap(j).is_none() {
            rep.push(at(&format!("sector {}", j + 1)), "does not overlap its successor");
            ok = false;
        }
    }
    if x.sectors[k - 1].hi <= &x.sectors[0].lo + num_rational::BigRational::one() {
        rep.push(at("sectors"), "arcs do not close up around the circle");
        ok = false;
    }
    if x.stokes.len() != k {
        rep.push(at("stokes"), format!("{} matrices for {k} sectors", x.stokes.len()));
        ok = false;
    }
    for (j, s) in x.stokes.iter().enumerate() {
        let loc = at(&format!("stokes {}", j + 1));
        if !square_ok(s, r) {
            rep.push(loc, "wrong shape");
            ok = false;
            continue;
        }
        if !s.is_invertible() {
            rep.push(loc.clone(), "not invertible");
            ok = false;
        }
        if exps_ok && x.overlap(j).is_some() {
            match x.stokes_mask(j).and_then(|m| check_allowed(s, &m)) {
                Ok(true) => {}
                Ok(false) => rep.push(loc, "nonzero entry outside the mask"),
                Err(e) => rep.push(loc, format!("mask unavailable: {e}")),
            }
        }
    }
    if !square_ok(&x.connection, r) {
        rep.push(at("connection"), "wrong shape");
        return;
    }
    if !x.connection.is_invertible() {
        rep.push(at("connection"), "not invertible");
        return;
    }
    if !ok || !monodromy_ok {
        return;
    }
    let glued = match x.glued(&d.field) {
        Ok(g) => g,
        Err(e) => {
            rep.push(at("gluing"), e.to_string());
            return;
        }
    };
    let c = &x.connection;
    let lhs = c.inverse().expect("checked").dot(t).dot(c);
    if lhs != glued {
        rep.push(at("gluing"), "C^-1 T C differs from the glued local monodromy");
    }
}

/// Read every coefficient through an embedding K -> L.
pub fn extend_scalars(d: &StokesData, emb: &FieldEmbedding) -> Result<StokesData> {
    if emb.source().as_ref() != d.field.as_ref() {
        return Err(Error::FieldMismatch);
    }
    let l = emb.target().clone();
    let mm = |m: &Matrix| emb.map_matrix(m);
    let ls = &d.local_system;
    let local_system = LocalSystemRep {
        monodromies: ls.monodromies.iter().map(mm).collect(),
        ..ls.clone()
    };
    let mut irregular = IndexMap::new();
    for (p, x) in &d.irregular {
        let exps = x
            .exponents
            .entries()
            .iter()
            .map(|(phi, m)| (phi.map_into(&l, |c| emb.map(c)), *m))
            .collect();
        irregular.insert(
            p.clone(),
            LocalIrregularDatum {
                point: x.point.clone(),
                coordinate: x.coordinate.clone(),
                n: x.n,
                exponents: ExponentialSum::new(exps)?,
                sectors: x.sectors.clone(),
                stokes: x.stokes.iter().map(mm).collect(),
                connection: mm(&x.connection),
            },
        );
    }
    Ok(StokesData {
        field: l,
        local_system,
        irregular,
    })
}

/// Find an embedding K -> L and extend along it.
pub fn extend_scalars_to(d: &StokesData, l: &Arc<FieldSpec>) -> Result<StokesData> {
    let emb = FieldEmbedding::find(&d.field, l)?;
    extend_scalars(d, &emb)
}
