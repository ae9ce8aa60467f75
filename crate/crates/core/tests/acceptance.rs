//! Acceptance run: one line per criterion, nonzero exit if any fails.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use std::time::{Duration, Instant};
use stokes_core::descent::{
    c_conjugate_data, check_cocycle, descend, normalize_lattice, real_form, DescentOptions, GStructure, Subfield,
};
use stokes_core::homspaces::{check_allowed, hom_mask, is_allowed_automorphism};
use stokes_core::numfield::{automorphisms, conjugation, FieldEmbedding, Q};
use stokes_core::oracle::{numeric_dominance, section_dimension, GridSpec, RegionSample, TBound};
use stokes_core::random::{self, Shape};
use stokes_core::sectors::{compare_on_sector, stokes_free_subarcs, total_order};
use stokes_core::stokesdata::{extend_scalars_to, from_json, isomorphism_probe, validate};
use stokes_core::*;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn fields() -> [Arc<FieldSpec>; 3] {
    [FieldSpec::gaussian(), FieldSpec::sqrt2(), FieldSpec::cyclotomic5()]
}

fn dominance_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let grid = GridSpec::default();
    let ks = [FieldSpec::rationals(), FieldSpec::gaussian()];
    let (mut high, mut low, mut bad) = (0, 0, 0);
    for i in 0..1000 {
        let k = &ks[i % 2];
        let n1 = rng.gen_range(1..=3);
        let n2 = rng.gen_range(1..=3);
        let phi = random::exponent(k, &mut rng, 4, n1, 10);
        let psi = if rng.gen_bool(0.05) { phi.clone() } else { random::exponent(k, &mut rng, 4, n2, 10) };
        let s = random::arc(&mut rng, 24);
        let exact = compare_on_sector(&phi, &psi, &s).unwrap();
        let r = numeric_dominance(&phi, &psi, &s, &grid);
        if r.confidence >= 0.99 {
            high += 1;
            if r.verdict != exact {
                bad += 1;
                eprintln!("  contradiction: {phi} vs {psi} on {s:?}: exact {} oracle {:?}", exact.name(), r);
            }
        } else {
            low += 1;
        }
    }
    outcome(bad == 0, format!("1000 pairs, {high} high-confidence, {low} low, {bad} contradictions"))
}

fn triangular_masks() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let shape = Shape { rational_entries: false, ..Shape::default() };
    let mut done = 0;
    let mut fails = 0;
    while done < 200 {
        let k = &fields()[done % 2];
        let m = rng.gen_range(2..=4);
        let mut list: Vec<(PuiseuxExponent, usize)> = Vec::new();
        while list.len() < m {
            let n = rng.gen_range(1..=2);
            let p = random::exponent(k, &mut rng, 2, n, 3);
            if list.iter().all(|(q, _)| *q != p) {
                list.push((p, rng.gen_range(1..=2)));
            }
        }
        let es = ExponentialSum::new(list).unwrap();
        let s = random::arc(&mut rng, 12);
        let subs = stokes_free_subarcs(&es.exponents(), &s).unwrap();
        let Some(sub) = subs.first() else { continue };
        let Some(order) = total_order(&es.exponents(), sub).unwrap() else { continue };
        done += 1;
        let mask = hom_mask(&es, &es, sub).unwrap();
        let bp = mask.block_pattern();
        let mut ok = true;
        for (a, &i) in order.iter().enumerate() {
            for (b, &j) in order.iter().enumerate() {
                // entry (row i, column j) is allowed iff j sits at or above i
                if bp[i][j] != (b >= a) {
                    ok = false;
                }
            }
        }
        let x = random::allowed_automorphism(k, &mask, &mut rng, &shape).unwrap();
        let y = random::allowed_automorphism(k, &mask, &mut rng, &shape).unwrap();
        ok &= check_allowed(&x.mul(&y).unwrap(), &mask).unwrap();
        ok &= is_allowed_automorphism(&x.inverse().unwrap(), &mask).unwrap();
        if !ok {
            fails += 1;
        }
    }
    outcome(fails == 0, format!("200 ordered sums, {fails} failures"))
}

fn exponential_sections() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let grid = GridSpec::default();
    let ks = [FieldSpec::rationals(), FieldSpec::gaussian()];
    let mut fails = Vec::new();
    for i in 0..50 {
        let k = &ks[i % 2];
        let n = rng.gen_range(1..=3);
        let f = random::exponent(k, &mut rng, 3, n, 5);
        let w = random::arc(&mut rng, 12);
        let es = ExponentialSum::simple(vec![f.clone()]).unwrap();
        let full = RegionSample::over_sector(&w);
        let closed = full.clone().with_t(TBound::NegInfinity, TBound::PosInfinity { closed: true });
        let mut bounded = full.clone().with_t(TBound::Value(Q::from_integer(0.into())), TBound::Value(Q::from_integer(1.into())));
        bounded.log_r_lo = Some(Q::from_integer((-2).into()));
        let got = [&full, &closed, &bounded].map(|u| section_dimension(&es, u, &w, &grid));
        if !matches!(got, [Ok(1), Ok(0), Ok(0)]) {
            fails.push(format!("{f} on {w:?}: {got:?}"));
        }
    }
    for f in &fails {
        eprintln!("  {f}");
    }
    outcome(fails.is_empty(), format!("50 instances x 3 regions, {} failures", fails.len()))
}

fn chains_for(es: &ExponentialSum, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let s = random::arc(rng, 8);
    let mut chains = Vec::new();
    for sub in stokes_free_subarcs(&es.exponents(), &s).unwrap() {
        if let Some(o) = total_order(&es.exponents(), &sub).unwrap() {
            if !chains.contains(&o) && chains.len() < 2 {
                chains.push(o);
            }
        }
    }
    chains
}

fn lattice_normalization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let q = FieldSpec::rationals();
    let shape = Shape::default();
    let (mut good, mut rejected, mut tried_bad) = (0, 0, 0);
    let mut built = 0;
    while built < 100 {
        let l = &fields()[built % 3];
        let emb = FieldEmbedding::find(&q, l).unwrap();
        let sub = Subfield::from_embedding(&emb).unwrap();
        let m = rng.gen_range(2..=3);
        let mut list: Vec<(PuiseuxExponent, usize)> = Vec::new();
        while list.len() < m {
            let p = random::exponent(&q, &mut rng, 2, 1, 3).map_into(l, |c| emb.map(c));
            if list.iter().all(|(x, _)| *x != p) {
                list.push((p, 1));
            }
        }
        // raise multiplicities, keeping n <= 5
        while list.iter().map(|e| e.1).sum::<usize>() < 5 && rng.gen_bool(0.4) {
            let i = rng.gen_range(0..m);
            list[i].1 += 1;
        }
        let es = ExponentialSum::new(list).unwrap();
        let chains = chains_for(&es, &mut rng);
        if chains.is_empty() {
            continue;
        }
        built += 1;
        let mask = stokes_core::descent::chain_mask(&es, &chains).unwrap();
        let mm = random::allowed_automorphism(l, &mask, &mut rng, &shape).unwrap();
        let cols: Vec<Vec<FieldElement>> = (0..mm.cols()).map(|c| mm.column(c)).collect();
        if let Ok(a) = normalize_lattice(&cols, &es, &chains, &sub) {
            let av = a.matrix().mul(&mm).unwrap();
            if is_allowed_automorphism(a.matrix(), &mask).unwrap() && av.entries().iter().all(|e| sub.contains(e)) {
                good += 1;
            }
        }
        // adversarial: mix an L-multiple of a top-block column into a
        // column of another block
        if tried_bad < 20 {
            let top = *chains[0].last().unwrap();
            let bottom = chains[0][0];
            let off = es.offsets();
            let (ct, cb) = (off[top], off[bottom]);
            let alpha = FieldElement::generator(l);
            let mut bad = cols.clone();
            for r in 0..bad.len() {
                bad[cb][r] = &bad[cb][r] + &(&alpha * &cols[ct][r]);
            }
            tried_bad += 1;
            if matches!(normalize_lattice(&bad, &es, &chains, &sub), Err(Error::RankConditionViolated(_))) {
                rejected += 1;
            }
        }
    }
    outcome(good == 100 && rejected == 20, format!("{good}/100 normalized, {rejected}/20 adversarial rejected"))
}

fn descent_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let q = FieldSpec::rationals();
    let shape = Shape { max_rank: 4, max_exponents: 3, max_punctures: 3, ..Shape::default() };
    let mut ok = 0;
    for i in 0..100 {
        let l = &fields()[i % 3];
        let dk = random::datum(&q, &mut rng, &shape).unwrap();
        let dl = extend_scalars_to(&dk, l).unwrap();
        let gs = GStructure::natural(&dl, automorphisms(l).unwrap());
        let (d, gs) = if i % 2 == 0 {
            (dl, gs)
        } else {
            let x = random::isomorphism(&dl, &mut rng, &Shape { height: 2, ..Shape::default() }).unwrap();
            (x.apply(&dl).unwrap(), gs.transport(&x).unwrap())
        };
        match descend(&d, &gs, &q, &DescentOptions::default()) {
            Ok(out) => {
                let in_k = out.datum.field.as_ref() == q.as_ref();
                let valid = validate(&out.datum).pass;
                let witness = isomorphism_probe(&dk, &out.datum).map(|p| p.witness.is_some()).unwrap_or(false);
                let back = out.iso.apply(&extend_scalars_to(&out.datum, l).unwrap()).map(|x| x == d).unwrap_or(false);
                if in_k && valid && witness && back {
                    ok += 1;
                } else {
                    eprintln!("  instance {i}: in_k {in_k} valid {valid} witness {witness} back {back}");
                }
            }
            Err(e) => eprintln!("  instance {i}: {e}"),
        }
    }
    outcome(ok == 100, format!("{ok}/100 descended and probe-verified"))
}

fn cocycle_rejection() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let q = FieldSpec::rationals();
    let shape = Shape { max_rank: 3, ..Shape::default() };
    let mut ok = 0;
    for i in 0..50 {
        let l = &fields()[i % 3];
        let dk = random::datum(&q, &mut rng, &shape).unwrap();
        let dl = extend_scalars_to(&dk, l).unwrap();
        let x = random::isomorphism(&dl, &mut rng, &Shape { height: 2, ..Shape::default() }).unwrap();
        let d = x.apply(&dl).unwrap();
        let mut gs = GStructure::natural(&dl, automorphisms(l).unwrap()).transport(&x).unwrap();
        let g = 1 + rng.gen_range(0..gs.group.len() - 1);
        let two = FieldElement::from_int(l, 2);
        let c = &mut gs.maps[g];
        c.base_change = c.base_change.scale(&two);
        for hs in c.trivialization_changes.values_mut() {
            for h in hs.iter_mut() {
                *h = h.scale(&two);
            }
        }
        let a = matches!(check_cocycle(&d, &gs), Err(Error::CocycleViolation(_)));
        let b = matches!(descend(&d, &gs, &q, &DescentOptions::default()), Err(Error::CocycleViolation(_)));
        if a && b {
            ok += 1;
        }
    }
    outcome(ok == 50, format!("{ok}/50 broken structures rejected"))
}

fn conjugation_involution() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let ks = [FieldSpec::gaussian(), FieldSpec::rationals(), FieldSpec::cyclotomic5()];
    let mut ok = 0;
    for i in 0..50 {
        let k = &ks[i % 3];
        let d = random::datum(k, &mut rng, &Shape { max_rank: 3, ..Shape::default() }).unwrap();
        let c = c_conjugate_data(&d).unwrap();
        let cc = c_conjugate_data(&c).unwrap();
        let exps_ok = d.irregular.iter().all(|(p, x)| {
            let y = &c.irregular[p];
            x.exponents.entries().len() == y.exponents.entries().len()
                && x.exponents
                    .entries()
                    .iter()
                    .zip(y.exponents.entries())
                    .all(|((a, m), (b, n))| m == n && a.c_conjugate().unwrap() == *b)
        });
        let probe = isomorphism_probe(&d, &cc).map(|p| p.witness.is_some()).unwrap_or(false);
        if exps_ok && probe && validate(&c).pass {
            ok += 1;
        }
    }
    outcome(ok == 50, format!("{ok}/50 involutions probe-verified with exact exponent map"))
}

fn real_forms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let l = FieldSpec::gaussian();
    let sigma = conjugation(&l).unwrap();
    let shape = Shape { max_rank: 4, conjugation_stable: true, rational_entries: true, ..Shape::default() };
    let mut ok = 0;
    for i in 0..50 {
        let dr = random::datum(&l, &mut rng, &shape).unwrap();
        let qiso = random::isomorphism(&dr, &mut rng, &Shape { height: 2, ..Shape::default() }).unwrap();
        let d = qiso.apply(&dr).unwrap();
        let psi = qiso.map_entries(&l, |e| sigma.apply(e)).compose(&qiso.inverse().unwrap()).unwrap();
        match real_form(&d, &psi, &DescentOptions::default()) {
            Ok(out) => {
                let fixed = stokes_core::descent::galois_conjugate(&out.datum, &sigma).unwrap() == out.datum;
                let back = out.iso.apply(&out.datum).map(|x| x == d).unwrap_or(false);
                if fixed && back && validate(&out.datum).pass {
                    ok += 1;
                }
            }
            Err(e) => eprintln!("  instance {i}: {e}"),
        }
    }
    // unstable exponent sets
    let mut rejected = 0;
    let mut tried = 0;
    while tried < 20 {
        let d = random::datum(&l, &mut rng, &Shape { max_rank: 3, ..Shape::default() }).unwrap();
        let stable = d.irregular.values().all(|x| {
            x.exponents
                .entries()
                .iter()
                .all(|(p, m)| x.exponents.entries().iter().any(|(q, n)| *q == p.conjugate().unwrap() && m == n))
        });
        if stable {
            continue;
        }
        tried += 1;
        let id = stokes_core::stokesdata::DataIsomorphism::identity(&d);
        if matches!(real_form(&d, &id, &DescentOptions::default()), Err(Error::NotConjugationStable(_))) {
            rejected += 1;
        }
    }
    outcome(ok == 50 && rejected == 20, format!("{ok}/50 split with fixed entries, {rejected}/20 unstable rejected"))
}

fn gluing_consistency() -> Outcome {
    let text = include_str!("../fixtures/exp_one_over_z.json");
    let fixture_ok = from_json(text).map(|d| validate(&d).pass).unwrap_or(false);
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let ks = [FieldSpec::rationals(), FieldSpec::gaussian()];
    let mut failed = 0;
    for i in 0..200 {
        let k = &ks[i % 2];
        let mut d = random::datum(k, &mut rng, &Shape { max_rank: 3, ..Shape::default() }).unwrap();
        let p = d.irregular.keys().next().unwrap().clone();
        let x = &mut d.irregular[&p];
        let j = rng.gen_range(0..x.stokes.len());
        let mask = x.stokes_mask(j).unwrap();
        let cells: Vec<(usize, usize)> = (0..mask.rows)
            .flat_map(|r| (0..mask.cols).map(move |c| (r, c)))
            .filter(|&(r, c)| mask.get(r, c))
            .collect();
        let (r, c) = cells[rng.gen_range(0..cells.len())];
        let delta = random::nonzero_element(k, &mut rng, 3);
        x.stokes[j][(r, c)] = &x.stokes[j][(r, c)] + &delta;
        if !validate(&d).pass {
            failed += 1;
        }
    }
    let rate = failed as f64 / 200.0;
    outcome(
        fixture_ok && rate >= 0.95,
        format!("fixture valid: {fixture_ok}; perturbations rejected {failed}/200"),
    )
}

type Criterion = (&'static str, u64, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 dominance soundness", 60, dominance_soundness),
        ("2 triangular masks", 30, triangular_masks),
        ("3 exponential sections", 60, exponential_sections),
        ("4 lattice normalization", 60, lattice_normalization),
        ("5 descent round trip", 300, descent_round_trip),
        ("6 cocycle rejection", 10, cocycle_rejection),
        ("7 conjugation involution", 60, conjugation_involution),
        ("8 real forms", 60, real_forms),
        ("9 gluing consistency", 30, gluing_consistency),
    ];
    let mut failures = 0;
    for (name, limit, run) in criteria {
        let t = Instant::now();
        let o = run();
        let dt = t.elapsed();
        let in_time = dt <= Duration::from_secs(limit);
        let pass = o.ok && in_time;
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {name}: {} ({}; {:.2}s of {limit}s)",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            dt.as_secs_f64()
        );
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
