use super::{glued_local_monodromy, LocalIrregularDatum, StokesData};
use crate::error::{Error, Result};
use crate::homspaces::is_allowed_automorphism;
use crate::linalg::Matrix;
use crate::numfield::{FieldElement, FieldSpec};
use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// A base change `g` of the stalk plus, at every irregular point, one
/// trivialization change `h_j` per sector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DataIsomorphism {
    pub base_change: Matrix,
    pub trivialization_changes: IndexMap<String, Vec<Matrix>>,
}

impl DataIsomorphism {
    pub fn identity(d: &StokesData) -> DataIsomorphism {
        let r = d.rank();
        let id = Matrix::identity(&d.field, r);
        DataIsomorphism {
            base_change: id.clone(),
            trivialization_changes: d
                .irregular
                .iter()
                .map(|(p, x)| (p.clone(), vec![id.clone(); x.sectors.len()]))
                .collect(),
        }
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        self.base_change.field()
    }

    /// Every h_j is an allowed automorphism of its sector and g is invertible.
    pub fn is_admissible_for(&self, d: &StokesData) -> Result<bool> {
        if !self.base_change.is_square() || self.base_change.rows() != d.rank() || !self.base_change.is_invertible() {
            return Ok(false);
        }
        if self.trivialization_changes.len() != d.irregular.len() {
            return Ok(false);
        }
        for (p, x) in &d.irregular {
            let Some(hs) = self.trivialization_changes.get(p) else {
                return Ok(false);
            };
            if hs.len() != x.sectors.len() {
                return Ok(false);
            }
            for (j, h) in hs.iter().enumerate() {
                if h.rows() != d.rank() || !is_allowed_automorphism(h, &x.sector_mask(j)?)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Transport `d` along the isomorphism.
    pub fn apply(&self, d: &StokesData) -> Result<StokesData> {
        let g = &self.base_change;
        let gi = g.inverse()?;
        let mut out = d.clone();
        out.local_system.monodromies = d
            .local_system
            .monodromies
            .iter()
            .map(|t| g.mul(t)?.mul(&gi))
            .collect::<Result<_>>()?;
        for (p, x) in out.irregular.iter_mut() {
            let hs = self
                .trivialization_changes
                .get(p)
                .ok_or_else(|| Error::StructureMismatch(format!("no trivialization changes at {p}")))?;
            *x = transport_point(x, g, hs, &d.field)?;
        }
        Ok(out)
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &DataIsomorphism) -> Result<DataIsomorphism> {
        let mut tc = IndexMap::new();
        for (p, hs) in &self.trivialization_changes {
            let os = other
                .trivialization_changes
                .get(p)
                .ok_or_else(|| Error::StructureMismatch(format!("point {p} missing")))?;
            if os.len() != hs.len() {
                return Err(Error::StructureMismatch(format!("sector counts differ at {p}")));
            }
            tc.insert(
                p.clone(),
                hs.iter().zip(os).map(|(a, b)| a.mul(b)).collect::<Result<_>>()?,
            );
        }
        Ok(DataIsomorphism {
            base_change: self.base_change.mul(&other.base_change)?,
            trivialization_changes: tc,
        })
    }

    pub fn inverse(&self) -> Result<DataIsomorphism> {
        let mut tc = IndexMap::new();
        for (p, hs) in &self.trivialization_changes {
            tc.insert(p.clone(), hs.iter().map(|h| h.inverse()).collect::<Result<_>>()?);
        }
        Ok(DataIsomorphism {
            base_change: self.base_change.inverse()?,
            trivialization_changes: tc,
        })
    }

    /// Apply a coefficient map to every matrix.
    pub fn map_entries(&self, field: &Arc<FieldSpec>, f: impl Fn(&FieldElement) -> FieldElement) -> DataIsomorphism {
        DataIsomorphism {
            base_change: self.base_change.map_into(field, &f),
            trivialization_changes: self
                .trivialization_changes
                .iter()
                .map(|(p, hs)| (p.clone(), hs.iter().map(|h| h.map_into(field, &f)).collect()))
                .collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.base_change.is_identity()
            && self
                .trivialization_changes
                .values()
                .all(|hs| hs.iter().all(Matrix::is_identity))
    }
}

fn transport_point(x: &LocalIrregularDatum, g: &Matrix, hs: &[Matrix], k: &Arc<FieldSpec>) -> Result<LocalIrregularDatum> {
    let n = x.sectors.len();
    if hs.len() != n || x.stokes.len() != n {
        return Err(Error::StructureMismatch(format!("sector counts differ at {}", x.point)));
    }
    let p = x.seam_matrix(k)?;
    let pi = p.transpose();
    let hinv = hs.iter().map(|h| h.inverse()).collect::<Result<Vec<_>>>()?;
    let mut stokes = Vec::with_capacity(n);
    for j in 0..n {
        let next = if j + 1 < n {
            hs[j + 1].clone()
        } else {
            pi.mul(&hs[0])?.mul(&p)?
        };
        stokes.push(next.mul(&x.stokes[j])?.mul(&hinv[j])?);
    }
    Ok(LocalIrregularDatum {
        stokes,
        connection: g.mul(&x.connection)?.mul(&hinv[0])?,
        ..x.clone()
    })
}

/// Necessary invariants compared by the probe.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct InvariantReport {
    pub exponent_multisets_equal: bool,
    pub sectors_equal: bool,
    pub monodromy_charpolys_equal: Vec<(String, bool)>,
    pub glued_charpolys_equal: Vec<(String, bool)>,
}

impl InvariantReport {
    /// Names of the invariants that already differ.
    pub fn differing(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.exponent_multisets_equal {
            out.push("exponent multisets".to_string());
        }
        if !self.sectors_equal {
            out.push("sectors or exponent order".to_string());
        }
        for (p, ok) in &self.monodromy_charpolys_equal {
            if !ok {
                out.push(format!("charpoly of T_{p}"));
            }
        }
        for (p, ok) in &self.glued_charpolys_equal {
            if !ok {
                out.push(format!("charpoly of glued monodromy at {p}"));
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct ProbeOutcome {
    pub witness: Option<DataIsomorphism>,
    pub report: InvariantReport,
}

fn check_structure(d1: &StokesData, d2: &StokesData) -> Result<()> {
    let (a, b) = (&d1.local_system, &d2.local_system);
    let why = if d1.field.as_ref() != d2.field.as_ref() {
        "fields differ"
    } else if a.surface != b.surface {
        "surfaces differ"
    } else if a.punctures != b.punctures {
        "punctures differ"
    } else if a.rank != b.rank {
        "ranks differ"
    } else if !same_keys(d1, d2) {
        "irregular points differ"
    } else {
        return Ok(());
    };
    Err(Error::StructureMismatch(why.into()))
}

fn same_keys(d1: &StokesData, d2: &StokesData) -> bool {
    d1.irregular.len() == d2.irregular.len() && d1.irregular.keys().all(|p| d2.irregular.contains_key(p))
}

fn multiset_equal(x: &LocalIrregularDatum, y: &LocalIrregularDatum) -> bool {
    let a = x.exponents.entries();
    let b = y.exponents.entries();
    a.len() == b.len() && a.iter().all(|e| b.contains(e))
}

fn invariants(d1: &StokesData, d2: &StokesData) -> Result<InvariantReport> {
    let mut rep = InvariantReport {
        exponent_multisets_equal: true,
        sectors_equal: true,
        ..Default::default()
    };
    for (p, x) in &d1.irregular {
        let y = &d2.irregular[p];
        if !multiset_equal(x, y) {
            rep.exponent_multisets_equal = false;
        }
        if x.sectors != y.sectors || x.exponents != y.exponents {
            rep.sectors_equal = false;
        }
    }
    let ls1 = &d1.local_system;
    for (i, p) in ls1.punctures.iter().enumerate() {
        let c1 = ls1.monodromies[i].charpoly()?;
        let c2 = d2.local_system.monodromies[i].charpoly()?;
        rep.monodromy_charpolys_equal.push((p.clone(), c1 == c2));
    }
    for p in d1.irregular.keys() {
        let eq = match (glued_local_monodromy(d1, p), glued_local_monodromy(d2, p)) {
            (Ok(a), Ok(b)) => a.charpoly()? == b.charpoly()?,
            _ => false,
        };
        rep.glued_charpolys_equal.push((p.clone(), eq));
    }
    Ok(rep)
}

/// Trivialization changes forced by a base change g.
fn induced_changes(g: &Matrix, x1: &LocalIrregularDatum, x2: &LocalIrregularDatum) -> Result<Vec<Matrix>> {
    let mut hs = vec![x2.connection.inverse()?.mul(g)?.mul(&x1.connection)?];
    for j in 0..x1.sectors.len() - 1 {
        let h = x2.stokes[j].mul(&hs[j])?.mul(&x1.stokes[j].inverse()?)?;
        hs.push(h);
    }
    Ok(hs)
}

fn push_entries(out: &mut Vec<FieldElement>, m: &Matrix) {
    out.extend(m.entries().iter().cloned());
}

/// Scalar constraints on g, evaluated at the unit matrix g = E.
fn constraints_at(e: &Matrix, d1: &StokesData, d2: &StokesData) -> Result<Vec<FieldElement>> {
    let mut out = Vec::new();
    for (t1, t2) in d1.local_system.monodromies.iter().zip(&d2.local_system.monodromies) {
        push_entries(&mut out, &e.mul(t1)?.sub(&t2.mul(e)?)?);
    }
    for (p, x1) in &d1.irregular {
        let x2 = &d2.irregular[p];
        let hs = induced_changes(e, x1, x2)?;
        for (j, h) in hs.iter().enumerate() {
            let mask = x1.sector_mask(j)?;
            for r in 0..h.rows() {
                for c in 0..h.cols() {
                    if !mask.get(r, c) {
                        out.push(h[(r, c)].clone());
                    }
                }
            }
        }
        let k = x1.sectors.len();
        let pm = x1.seam_matrix(&d1.field)?;
        let lhs = pm.transpose().mul(&hs[0])?.mul(&pm)?;
        let rhs = x2.stokes[k - 1].mul(&hs[k - 1])?.mul(&x1.stokes[k - 1].inverse()?)?;
        push_entries(&mut out, &lhs.sub(&rhs)?);
    }
    Ok(out)
}

/// Search for an isomorphism `d1 -> d2` with the default seed and restarts.
pub fn isomorphism_probe(d1: &StokesData, d2: &StokesData) -> Result<ProbeOutcome> {
    probe_with(d1, d2, 0x5eed, 16)
}

/// Sound but incomplete: a returned witness has been verified exactly; `None`
/// only means the randomized solver found nothing.
pub fn probe_with(d1: &StokesData, d2: &StokesData, seed: u64, restarts: u32) -> Result<ProbeOutcome> {
    check_structure(d1, d2)?;
    let report = invariants(d1, d2)?;
    let none = |report| Ok(ProbeOutcome { witness: None, report });
    if !report.differing().is_empty() {
        return none(report);
    }
    for (p, x) in &d1.irregular {
        let y = &d2.irregular[p];
        if x.stokes.len() != x.sectors.len() || y.stokes.len() != y.sectors.len() {
            return Err(Error::StructureMismatch(format!("stokes count at {p}")));
        }
    }
    let k = &d1.field;
    let r = d1.rank();
    let mut columns = Vec::with_capacity(r * r);
    for a in 0..r {
        for b in 0..r {
            let mut e = Matrix::zeros(k, r, r);
            e[(a, b)] = FieldElement::one(k);
            columns.push(constraints_at(&e, d1, d2)?);
        }
    }
    let basis = if columns[0].is_empty() {
        (0..r * r)
            .map(|i| {
                let mut v = vec![FieldElement::zero(k); r * r];
                v[i] = FieldElement::one(k);
                v
            })
            .collect()
    } else {
        Matrix::from_columns(k, &columns)?.nullspace()
    };
    if basis.is_empty() {
        return none(report);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let identity_ok = constraints_at(&Matrix::identity(k, r), d1, d2)?.iter().all(FieldElement::is_zero);
    for attempt in 0..=restarts {
        let g = if attempt == 0 {
            if !identity_ok {
                continue;
            }
            Matrix::identity(k, r)
        } else {
            let span = 1 + attempt as i64;
            let mut g = Matrix::zeros(k, r, r);
            for v in &basis {
                let c = FieldElement::from_int(k, rng.gen_range(-span..=span));
                for i in 0..r * r {
                    g[(i / r, i % r)] = &g[(i / r, i % r)] + &(&c * &v[i]);
                }
            }
            g
        };
        if !g.is_invertible() {
            continue;
        }
        let mut tc = IndexMap::new();
        for (p, x1) in &d1.irregular {
            tc.insert(p.clone(), induced_changes(&g, x1, &d2.irregular[p])?);
        }
        let w = DataIsomorphism {
            base_change: g,
            trivialization_changes: tc,
        };
        if w.is_admissible_for(d1)? && w.apply(d1)? == *d2 {
            return Ok(ProbeOutcome {
                witness: Some(w),
                report,
            });
        }
    }
    none(report)
}
