//! Galois and complex conjugates of Stokes data, G-structures, descent to a
//! subfield and real forms.
//!
//! A G-structure assigns to each automorphism g an isomorphism
//! `phi_g: d -> g(d)`. Writing `h(phi)` for entrywise application of h, the
//! cocycle condition reads `h(phi_g) . phi_h = phi_{h o g}`.

mod format;
mod lattice;

pub use format::{gstructure_from_json, gstructure_to_json, iso_from_json, iso_to_json};
pub use lattice::{chain_mask, normalize_lattice, Subfield};

pub use crate::stokesdata::DataIsomorphism;

use crate::error::{Error, Result};
use crate::homspaces::{is_allowed_automorphism, ExponentialSum, HomMask};
use crate::linalg::Matrix;
use crate::numfield::{self, FieldElement, FieldEmbedding, FieldSpec, GaloisAction};
use crate::sectors::{stokes_free_subarcs, total_order, Sector};
use crate::stokesdata::{LocalIrregularDatum, LocalSystemRep, StokesData};
use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// Every matrix entry mapped by g. Exponents and sectors stay as they are.
pub fn galois_conjugate(d: &StokesData, g: &GaloisAction) -> Result<StokesData> {
    if g.field().as_ref() != d.field.as_ref() {
        return Err(Error::AutomorphismOutsideGroup("automorphism of another field".into()));
    }
    let f = |m: &Matrix| m.map(|x| g.apply(x));
    let mut out = d.clone();
    out.local_system.monodromies = d.local_system.monodromies.iter().map(f).collect();
    for x in out.irregular.values_mut() {
        x.stokes = x.stokes.iter().map(f).collect();
        x.connection = f(&x.connection);
    }
    Ok(out)
}

fn conj_matrix(m: &Matrix) -> Matrix {
    m.map(|x| x.conj().expect("field is conjugation closed"))
}

fn toggle_coordinate(c: &str) -> String {
    match c.strip_prefix("conj(").and_then(|s| s.strip_suffix(')')) {
        Some(inner) => inner.to_string(),
        None => format!("conj({c})"),
    }
}

/// Data of the conjugate object: exponents phi -> -conj(phi); arcs reflected
/// with S'_1 = refl(S_1) and S'_i = refl(S_{k+2-i}) + 1; the stalk is
/// replaced by its conjugate dual, so `T' = conj(T)^T`,
/// `C' = conj(C)^-T` and `Sigma'_i = P conj(Sigma_{k+1-i})^T P^-1`; the
/// puncture order is reversed so the sphere relation survives. Applying it
/// twice gives back the input exactly.
pub fn c_conjugate_data(d: &StokesData) -> Result<StokesData> {
    if !d.field.is_conjugation_closed() {
        return Err(Error::NotConjugationClosed);
    }
    let ls = &d.local_system;
    let local_system = LocalSystemRep {
        punctures: ls.punctures.iter().rev().cloned().collect(),
        monodromies: ls.monodromies.iter().rev().map(|t| conj_matrix(t).transpose()).collect(),
        ..ls.clone()
    };
    let mut irregular = IndexMap::new();
    for (p, x) in &d.irregular {
        let k = x.sectors.len();
        let pm = x.seam_matrix(&d.field)?;
        let pt = pm.transpose();
        let exps = x
            .exponents
            .entries()
            .iter()
            .map(|(phi, m)| Ok((phi.c_conjugate()?, *m)))
            .collect::<Result<Vec<_>>>()?;
        let mut sectors = vec![x.sectors[0].reflected()];
        for i in 2..=k {
            sectors.push(x.sectors[k + 1 - i].reflected().shifted(1));
        }
        let stokes = (1..=k)
            .map(|i| pm.mul(&conj_matrix(&x.stokes[k - i]).transpose())?.mul(&pt))
            .collect::<Result<_>>()?;
        let connection = conj_matrix(&x.connection).inverse()?.transpose();
        irregular.insert(
            p.clone(),
            LocalIrregularDatum {
                point: x.point.clone(),
                coordinate: toggle_coordinate(&x.coordinate),
                n: x.n,
                exponents: ExponentialSum::new(exps)?,
                sectors,
                stokes,
                connection,
            },
        );
    }
    Ok(StokesData {
        field: d.field.clone(),
        local_system,
        irregular,
    })
}

#[derive(Clone, Debug)]
pub struct GStructure {
    pub group: Vec<GaloisAction>,
    pub maps: Vec<DataIsomorphism>,
}

impl GStructure {
    /// Identity maps: the G-structure of data whose entries are fixed by G.
    pub fn natural(d: &StokesData, group: Vec<GaloisAction>) -> GStructure {
        let maps = vec![DataIsomorphism::identity(d); group.len()];
        GStructure { group, maps }
    }

    /// The structure transported along an isomorphism `x: d -> d2`, so that
    /// `phi'_g = g(x) . phi_g . x^-1`.
    pub fn transport(&self, x: &DataIsomorphism) -> Result<GStructure> {
        let xi = x.inverse()?;
        let maps = self
            .group
            .iter()
            .zip(&self.maps)
            .map(|(g, phi)| {
                let gx = x.map_entries(x.field(), |e| g.apply(e));
                gx.compose(phi)?.compose(&xi)
            })
            .collect::<Result<_>>()?;
        Ok(GStructure {
            group: self.group.clone(),
            maps,
        })
    }

    fn index_of(&self, g: &GaloisAction) -> Option<usize> {
        self.group.iter().position(|h| h == g)
    }
}

/// Exact check of the G-structure axioms on d.
pub fn check_cocycle(d: &StokesData, gs: &GStructure) -> Result<()> {
    if gs.group.len() != gs.maps.len() {
        return Err(Error::Malformed("one map per group element is required".into()));
    }
    for g in &gs.group {
        if g.field().as_ref() != d.field.as_ref() {
            return Err(Error::AutomorphismOutsideGroup(format!("{:?} acts on another field", g.image())));
        }
    }
    let Some(id) = gs.group.iter().position(GaloisAction::is_identity) else {
        return Err(Error::AutomorphismOutsideGroup("the group lacks the identity".into()));
    };
    if !gs.maps[id].is_identity() {
        return Err(Error::CocycleViolation("phi_id is not the identity".into()));
    }
    for (g, phi) in gs.group.iter().zip(&gs.maps) {
        if !phi.is_admissible_for(d)? || phi.apply(d)? != galois_conjugate(d, g)? {
            return Err(Error::CocycleViolation(format!(
                "phi for {} is not an isomorphism onto the conjugate",
                g.image()
            )));
        }
    }
    for (gi, g) in gs.group.iter().enumerate() {
        for (hi, h) in gs.group.iter().enumerate() {
            let hg = h.compose(g);
            let Some(k) = gs.index_of(&hg) else {
                return Err(Error::AutomorphismOutsideGroup("the group is not closed".into()));
            };
            let lhs = gs.maps[gi].map_entries(&d.field, |e| h.apply(e)).compose(&gs.maps[hi])?;
            if lhs != gs.maps[k] {
                return Err(Error::CocycleViolation(format!(
                    "h(phi_g) phi_h != phi_(h g) for g = {}, h = {}",
                    g.image(),
                    h.image()
                )));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug)]
pub struct DescentOptions {
    pub seed: u64,
    pub retries: u32,
}

impl Default for DescentOptions {
    fn default() -> Self {
        DescentOptions { seed: 0, retries: 32 }
    }
}

fn random_element(k: &Arc<FieldSpec>, rng: &mut ChaCha8Rng) -> FieldElement {
    let c = (0..k.degree())
        .map(|_| numfield::q_int(rng.gen_range(-3..=3)))
        .collect();
    FieldElement::from_coords(k, c)
}

fn random_masked(k: &Arc<FieldSpec>, mask: &HomMask, rng: &mut ChaCha8Rng) -> Matrix {
    let mut m = Matrix::zeros(k, mask.rows, mask.cols);
    for r in 0..mask.rows {
        for c in 0..mask.cols {
            if mask.get(r, c) {
                m[(r, c)] = random_element(k, rng);
            }
        }
    }
    m
}

/// `sum_h h(R) B_h` over the group.
fn average(group: &[GaloisAction], bs: &[&Matrix], r: &Matrix) -> Result<Matrix> {
    let mut acc = Matrix::zeros(r.field(), r.rows(), r.cols());
    for (h, b) in group.iter().zip(bs) {
        acc = acc.add(&r.map(|x| h.apply(x)).mul(b)?)?;
    }
    Ok(acc)
}

/// Total orders on the Stokes-free pieces of a sector, smallest first.
fn sector_chains(exps: &ExponentialSum, s: &Sector) -> Result<Vec<Vec<usize>>> {
    let list = exps.exponents();
    let mut out = Vec::new();
    for arc in stokes_free_subarcs(&list, s)? {
        if let Some(o) = total_order(&list, &arc)? {
            if !out.contains(&o) {
                out.push(o);
            }
        }
    }
    Ok(out)
}

/// Split the cocycle: find Y with `g(Y) phi_g = Y` for all g, each sector
/// component lattice-normalized, and return `Y` together with `Y(d)`, whose
/// entries all lie in `k`.
fn split(d: &StokesData, gs: &GStructure, k: &Subfield, opts: &DescentOptions) -> Result<(StokesData, DataIsomorphism)> {
    let l = &d.field;
    let r = d.rank();
    let mut chains = IndexMap::new();
    let mut masks = IndexMap::new();
    for (p, x) in &d.irregular {
        let mut cs = Vec::new();
        let mut ms = Vec::new();
        for (j, s) in x.sectors.iter().enumerate() {
            cs.push(sector_chains(&x.exponents, s)?);
            ms.push(x.sector_mask(j)?);
        }
        chains.insert(p.clone(), cs);
        masks.insert(p.clone(), ms);
    }
    let full = HomMask::all_allowed(r, r);
    'attempt: for attempt in 0..opts.retries.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(attempt as u64));
        let bases: Vec<&Matrix> = gs.maps.iter().map(|m| &m.base_change).collect();
        let y = average(&gs.group, &bases, &random_masked(l, &full, &mut rng))?;
        if !y.is_invertible() {
            continue;
        }
        let mut tc = IndexMap::new();
        for (p, x) in &d.irregular {
            let mut hs = Vec::new();
            for j in 0..x.sectors.len() {
                let mask = &masks[p][j];
                let bs: Vec<&Matrix> = gs.maps.iter().map(|m| &m.trivialization_changes[p][j]).collect();
                let yj = average(&gs.group, &bs, &random_masked(l, mask, &mut rng))?;
                if !is_allowed_automorphism(&yj, mask)? {
                    continue 'attempt;
                }
                let inv = yj.inverse()?;
                let cols: Vec<Vec<FieldElement>> = (0..r).map(|c| inv.column(c)).collect();
                let a = normalize_lattice(&cols, &x.exponents, &chains[p][j], k)?;
                hs.push(a.matrix().clone());
            }
            tc.insert(p.clone(), hs);
        }
        let iso = DataIsomorphism {
            base_change: y,
            trivialization_changes: tc,
        };
        let out = iso.apply(d)?;
        if !all_entries(&out).iter().all(|e| k.contains(e)) {
            return Err(Error::CocycleViolation("split data is not fixed by the group".into()));
        }
        return Ok((out, iso));
    }
    Err(Error::AveragingFailed {
        tries: opts.retries.max(1),
        first_seed: opts.seed,
    })
}

fn all_entries(d: &StokesData) -> Vec<FieldElement> {
    let mut out = Vec::new();
    for t in &d.local_system.monodromies {
        out.extend(t.entries().iter().cloned());
    }
    for x in d.irregular.values() {
        for s in &x.stokes {
            out.extend(s.entries().iter().cloned());
        }
        out.extend(x.connection.entries().iter().cloned());
    }
    out
}

/// Output of `descend`: data over K and an isomorphism
/// `extend_scalars(datum, L) -> d`.
#[derive(Clone, Debug)]
pub struct Descended {
    pub datum: StokesData,
    pub iso: DataIsomorphism,
}

/// Descend data over L with a G-structure to K, where G = Gal(L/K).
pub fn descend(d: &StokesData, gs: &GStructure, k: &Arc<FieldSpec>, opts: &DescentOptions) -> Result<Descended> {
    let emb = FieldEmbedding::find(k, &d.field)?;
    let sub = Subfield::from_embedding(&emb)?;
    for g in &gs.group {
        if !sub.basis().iter().all(|b| g.apply(b) == *b) {
            return Err(Error::AutomorphismOutsideGroup(format!("{} does not fix K", g.image())));
        }
    }
    if gs.group.len() * k.degree() != d.field.degree() {
        return Err(Error::NotGalois);
    }
    check_cocycle(d, gs)?;
    let (fixed, y) = split(d, gs, &sub, opts)?;
    let down = |m: &Matrix| -> Result<Matrix> {
        let rows = m
            .to_rows()
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| emb.preimage(e).ok_or_else(|| Error::CocycleViolation("entry outside K".into())))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Matrix::from_rows(k, rows)
    };
    let ls = &fixed.local_system;
    let local_system = LocalSystemRep {
        monodromies: ls.monodromies.iter().map(down).collect::<Result<_>>()?,
        ..ls.clone()
    };
    let mut irregular = IndexMap::new();
    for (p, x) in &fixed.irregular {
        let mut exps = Vec::new();
        for (phi, m) in x.exponents.entries() {
            let mut terms = Vec::new();
            for (a, c) in phi.terms() {
                let c = emb.preimage(c).ok_or_else(|| {
                    Error::StructureMismatch(format!("exponent {phi} has coefficients outside K"))
                })?;
                terms.push((*a, c));
            }
            exps.push((crate::puiseux::PuiseuxExponent::new(k, terms)?, *m));
        }
        irregular.insert(
            p.clone(),
            LocalIrregularDatum {
                exponents: ExponentialSum::new(exps)?,
                stokes: x.stokes.iter().map(down).collect::<Result<_>>()?,
                connection: down(&x.connection)?,
                ..x.clone()
            },
        );
    }
    Ok(Descended {
        datum: StokesData {
            field: k.clone(),
            local_system,
            irregular,
        },
        iso: y.inverse()?,
    })
}

/// Output of `real_form`: data over L with conjugation-fixed entries and an
/// isomorphism from it back to the input.
#[derive(Clone, Debug)]
pub struct RealForm {
    pub datum: StokesData,
    pub iso: DataIsomorphism,
}

/// Order-2 descent along complex conjugation. `psi` is an isomorphism from
/// d onto its entrywise conjugate with `conj(psi) . psi = id`. Each exponent
/// multiset must be stable under conjugating the coefficients.
pub fn real_form(d: &StokesData, psi: &DataIsomorphism, opts: &DescentOptions) -> Result<RealForm> {
    let sigma = numfield::conjugation(&d.field)?;
    for (p, x) in &d.irregular {
        for (phi, m) in x.exponents.entries() {
            let c = phi.conjugate()?;
            if !x.exponents.entries().iter().any(|(q, mq)| *q == c && mq == m) {
                return Err(Error::NotConjugationStable(format!("at {p}: {phi} maps to {c}")));
            }
        }
    }
    if !psi.is_admissible_for(d)? || psi.apply(d)? != galois_conjugate(d, &sigma)? {
        return Err(Error::InvolutionFails("psi does not map the data onto its conjugate".into()));
    }
    let back = psi.map_entries(&d.field, |e| sigma.apply(e)).compose(psi)?;
    if !back.is_identity() {
        return Err(Error::InvolutionFails("conj(psi) . psi is not the identity".into()));
    }
    if sigma.is_identity() {
        return Ok(RealForm {
            datum: d.clone(),
            iso: DataIsomorphism::identity(d),
        });
    }
    let gs = GStructure {
        group: vec![GaloisAction::identity(&d.field), sigma.clone()],
        maps: vec![DataIsomorphism::identity(d), psi.clone()],
    };
    let sub = Subfield::fixed_by(&d.field, &[sigma])?;
    let (fixed, y) = split(d, &gs, &sub, opts)?;
    Ok(RealForm {
        datum: fixed,
        iso: y.inverse()?,
    })
}

#[cfg(test)]
mod tests;
