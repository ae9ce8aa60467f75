use crate::input;
use crate::{Command, GridArgs, Output};
use anyhow::Result;
use serde_json::{json, Value};
use std::fmt::Write;
use stokes_core::descent::{self, iso_from_json, iso_to_json, DescentOptions, Subfield};
use stokes_core::homspaces::hom_mask;
use stokes_core::json::{element_to_doc, format_rational, matrix_to_doc, puiseux_to_doc, sector_to_doc};
use stokes_core::oracle::{numeric_dominance, section_dimension, separating_region, GridSpec};
use stokes_core::sectors::{compare_on_sector, stokes_directions};
use stokes_core::stokesdata::{self, from_json, glued_local_monodromy, StokesData};
use stokes_core::*;

/// Verdicts at or above this confidence must agree with the exact answer.
const HIGH_CONFIDENCE: f64 = 0.99;

pub fn run(cmd: Command, grid: &GridArgs) -> Result<Output> {
    match cmd {
        Command::Validate { input } => validate(&datum(&input)?),
        Command::Hom { input: Some(path), .. } => masks(&datum(&path)?),
        Command::Hom { field, source, target, arc, .. } => {
            let usage = || anyhow::anyhow!("hom needs --input or --field, --source, --target and --arc");
            let k = input::field(field.as_deref().unwrap_or("rationals"))?;
            let src = input::sum(&k, &source.ok_or_else(usage)?)?;
            let tgt = input::sum(&k, &target.ok_or_else(usage)?)?;
            let s = input::arc(&arc.ok_or_else(usage)?)?;
            let m = hom_mask(&src, &tgt, &s)?;
            let mut human = String::new();
            for r in m.to_rows() {
                writeln!(human, "{}", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))?;
            }
            Ok(Output::report(human, json!({"arc": sector_to_doc(&s), "mask": m.to_rows()})))
        }
        Command::Compare { field, phi, psi, arc } => {
            let k = input::field(&field)?;
            let (phi, psi) = (input::exponent(&k, &phi)?, input::exponent(&k, &psi)?);
            let s = input::arc(&arc)?;
            let c = compare_on_sector(&phi, &psi, &s)?;
            let report = json!({
                "phi": puiseux_to_doc(&phi),
                "psi": puiseux_to_doc(&psi),
                "arc": sector_to_doc(&s),
                "verdict": c.name(),
            });
            Ok(Output::report(format!("{}\n", c.name()), report))
        }
        Command::StokesDirections { field, phi, psi } => {
            let k = input::field(&field)?;
            let (phi, psi) = (input::exponent(&k, &phi)?, input::exponent(&k, &psi)?);
            let mut human = String::new();
            let mut list = Vec::new();
            for d in stokes_directions(&phi, &psi)? {
                match &d {
                    StokesDirection::Exact(t) => {
                        writeln!(human, "{}", format_rational(t.turns()))?;
                        list.push(json!({"exact": format_rational(t.turns())}));
                    }
                    StokesDirection::Isolated { lo, hi } => {
                        writeln!(human, "({}, {}) ~ {:.12}", format_rational(lo), format_rational(hi), d.approx())?;
                        list.push(json!({"isolated": [format_rational(lo), format_rational(hi)]}));
                    }
                }
            }
            Ok(Output::report(human, json!({"directions": list})))
        }
        Command::Monodromy { input } => monodromy(&datum(&input)?),
        Command::Conjugate { input } => {
            let d = descent::c_conjugate_data(&datum(&input)?)?;
            Ok(Output::datum(stokesdata::to_json(&d) + "\n", d, json!({})))
        }
        Command::GaloisConjugate { input, image } => {
            let d = datum(&input)?;
            let g = GaloisAction::from_image(&d.field, input::element(&d.field, &image)?)?;
            let out = descent::galois_conjugate(&d, &g)?;
            let report = json!({"image": element_to_doc(&g.image())});
            Ok(Output::datum(stokesdata::to_json(&out) + "\n", out, report))
        }
        Command::Descend { input, gstructure, subfield, rand } => {
            let d = datum(&input)?;
            let gs = descent::gstructure_from_json(&d.field, &input::read(&gstructure)?)?;
            let k = input::field(&subfield)?;
            let opts = DescentOptions { seed: rand.seed, retries: rand.retries };
            let out = descent::descend(&d, &gs, &k, &opts)?;
            let report = json!({
                "config": {"seed": rand.seed, "retries": rand.retries},
                "iso": parse_value(&iso_to_json(&out.iso)),
            });
            Ok(Output::datum(stokesdata::to_json(&out.datum) + "\n", out.datum, report))
        }
        Command::NormalizeLattice { input } => {
            let l = input::lattice(&input::read(&input)?)?;
            let emb = numfield::FieldEmbedding::find(&l.subfield, &l.field)?;
            let sub = Subfield::from_embedding(&emb)?;
            let a = descent::normalize_lattice(&l.vectors, &l.exponents, &l.chains, &sub)?;
            let human = matrix_text(a.matrix());
            Ok(Output::report(human, json!({"matrix": matrix_to_doc(a.matrix()), "mask": a.mask().to_rows()})))
        }
        Command::RealForm { input, psi, rand } => {
            let d = datum(&input)?;
            let psi = iso_from_json(&d.field, &input::read(&psi)?)?;
            let opts = DescentOptions { seed: rand.seed, retries: rand.retries };
            let out = descent::real_form(&d, &psi, &opts)?;
            let report = json!({
                "config": {"seed": rand.seed, "retries": rand.retries},
                "iso": parse_value(&iso_to_json(&out.iso)),
            });
            Ok(Output::datum(stokesdata::to_json(&out.datum) + "\n", out.datum, report))
        }
        Command::OracleCheck { input, field, phi, psi, arc, sections } => {
            let g = grid.spec()?;
            match input {
                Some(path) => oracle_datum(&datum(&path)?, &g, sections),
                None => {
                    let usage = || anyhow::anyhow!("oracle-check needs --input or --phi, --psi and --arc");
                    let k = input::field(&field)?;
                    let phi = input::exponent(&k, &phi.ok_or_else(usage)?)?;
                    let psi = input::exponent(&k, &psi.ok_or_else(usage)?)?;
                    let s = input::arc(&arc.ok_or_else(usage)?)?;
                    let (entry, bad) = oracle_pair(&phi, &psi, &s, &g)?;
                    let human = format!(
                        "exact {} oracle {} confidence {:.4}\n",
                        entry["exact"].as_str().unwrap_or(""),
                        entry["oracle"]["verdict"].as_str().unwrap_or(""),
                        entry["oracle"]["confidence"].as_f64().unwrap_or(0.0)
                    );
                    let out = Output::report(human, json!({"grid": g, "comparisons": [entry], "contradictions": bad as usize}));
                    Ok(out.exit(bad as i32))
                }
            }
        }
        Command::Extend { input, field } => {
            let d = datum(&input)?;
            let l = input::field(&field)?;
            let out = stokesdata::extend_scalars_to(&d, &l)?;
            Ok(Output::datum(stokesdata::to_json(&out) + "\n", out, json!({})))
        }
    }
}

fn datum(path: &str) -> Result<StokesData> {
    Ok(from_json(&input::read(path)?)?)
}

fn parse_value(text: &str) -> Value {
    serde_json::from_str(text).expect("core emits valid json")
}

fn matrix_text(m: &Matrix) -> String {
    let mut s = String::new();
    for r in 0..m.rows() {
        let row: Vec<String> = m.row(r).iter().map(|x| x.to_string()).collect();
        s += &format!("  [{}]\n", row.join(", "));
    }
    s
}

fn validate(d: &StokesData) -> Result<Output> {
    let rep = stokesdata::validate(d);
    let mut human = String::new();
    if rep.pass {
        human += "pass\n";
    } else {
        for v in &rep.violations {
            writeln!(human, "{v}")?;
        }
        writeln!(human, "fail: {} violation(s)", rep.violations.len())?;
    }
    let violations: Vec<Value> = rep
        .violations
        .iter()
        .map(|v| json!({"location": v.location, "message": v.message}))
        .collect();
    let out = Output::datum(human, d.clone(), json!({"pass": rep.pass, "violations": violations}));
    Ok(out.exit(if rep.pass { 0 } else { 1 }))
}

fn masks(d: &StokesData) -> Result<Output> {
    let mut human = String::new();
    let mut points = serde_json::Map::new();
    for (p, x) in &d.irregular {
        let mut list = Vec::new();
        for j in 0..x.sectors.len() {
            let sm = x.sector_mask(j)?.to_rows();
            let st = x.stokes_mask(j)?.to_rows();
            writeln!(human, "{p} sector {}: {:?}; stokes {}: {:?}", j + 1, sm, j + 1, st)?;
            list.push(json!({"sector": sm, "stokes": st}));
        }
        points.insert(p.clone(), Value::Array(list));
    }
    Ok(Output::report(human, json!({"points": points})))
}

fn monodromy(d: &StokesData) -> Result<Output> {
    let mut human = String::new();
    let mut local = serde_json::Map::new();
    for (p, t) in d.local_system.punctures.iter().zip(&d.local_system.monodromies) {
        let cp = t.charpoly()?;
        writeln!(human, "T_{p}:\n{}  charpoly {}", matrix_text(t), poly_text(&cp))?;
        local.insert(p.clone(), json!({"matrix": matrix_to_doc(t), "charpoly": poly_doc(&cp)}));
    }
    let mut glued = serde_json::Map::new();
    for p in d.irregular.keys() {
        let g = glued_local_monodromy(d, p)?;
        let cp = g.charpoly()?;
        writeln!(human, "glued at {p}:\n{}  charpoly {}", matrix_text(&g), poly_text(&cp))?;
        glued.insert(p.clone(), json!({"matrix": matrix_to_doc(&g), "charpoly": poly_doc(&cp)}));
    }
    Ok(Output::report(human, json!({"local": local, "glued": glued})))
}

fn poly_doc(cp: &[FieldElement]) -> Vec<Vec<String>> {
    cp.iter().map(element_to_doc).collect()
}

/// Coefficients from the constant term up.
fn poly_text(cp: &[FieldElement]) -> String {
    let c: Vec<String> = cp.iter().map(|x| x.to_string()).collect();
    format!("[{}]", c.join(", "))
}

/// One exact/oracle comparison; the flag marks a high-confidence disagreement.
fn oracle_pair(phi: &PuiseuxExponent, psi: &PuiseuxExponent, s: &Sector, g: &GridSpec) -> Result<(Value, bool)> {
    let exact = compare_on_sector(phi, psi, s)?;
    let rep = numeric_dominance(phi, psi, s, g);
    let bad = rep.confidence >= HIGH_CONFIDENCE && rep.verdict != exact;
    let entry = json!({
        "phi": phi.to_string(),
        "psi": psi.to_string(),
        "arc": sector_to_doc(s),
        "exact": exact.name(),
        "oracle": rep,
        "contradiction": bad,
    });
    Ok((entry, bad))
}

fn oracle_datum(d: &StokesData, g: &GridSpec, sections: bool) -> Result<Output> {
    let mut entries = Vec::new();
    let mut checks = Vec::new();
    let mut bad = 0;
    let mut human = String::new();
    for (p, x) in &d.irregular {
        let exps = x.exponents.exponents();
        for (j, s) in x.sectors.iter().enumerate() {
            for a in 0..exps.len() {
                for b in a + 1..exps.len() {
                    let (mut e, flag) = oracle_pair(&exps[a], &exps[b], s, g)?;
                    e["point"] = json!(p);
                    e["sector"] = json!(j + 1);
                    bad += flag as usize;
                    entries.push(e);
                }
                if !sections {
                    continue;
                }
                // a forbidden entry (a, b) must have a region carrying sections of
                // E^{f_b} that fail to extend into E^{f_a}
                for b in 0..exps.len() {
                    if a == b || !sectors::exists_strict_subsector(&exps[b], &exps[a], s)? {
                        continue;
                    }
                    let Some(u) = separating_region(&exps[a], &exps[b], s, g) else {
                        bad += 1;
                        checks.push(json!({"point": p, "sector": j + 1, "entry": [a, b], "region": null, "separates": false}));
                        continue;
                    };
                    let dg = section_dimension(&ExponentialSum::simple(vec![exps[a].clone()])?, &u, s, g)?;
                    let df = section_dimension(&ExponentialSum::simple(vec![exps[b].clone()])?, &u, s, g)?;
                    let ok = dg > 0 && df == 0;
                    bad += !ok as usize;
                    checks.push(json!({
                        "point": p, "sector": j + 1, "entry": [a, b],
                        "region": u.to_json(), "target_sections": dg, "source_sections": df, "separates": ok,
                    }));
                }
            }
        }
    }
    writeln!(human, "{} comparisons, {} section checks, {} contradictions", entries.len(), checks.len(), bad)?;
    let report = json!({"grid": g, "comparisons": entries, "sections": checks, "contradictions": bad});
    Ok(Output::report(human, report).exit(if bad == 0 { 0 } else { 1 }))
}
