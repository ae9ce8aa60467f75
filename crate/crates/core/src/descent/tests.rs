use super::*;
use crate::numfield::{automorphisms, conjugation};
use crate::random::{self, Shape};
use crate::stokesdata::tests::{rank_one, rank_two};
use crate::stokesdata::{extend_scalars_to, isomorphism_probe, validate};
use rand::SeedableRng;

fn scalar_iso(d: &StokesData, c: FieldElement) -> DataIsomorphism {
    let m = Matrix::identity(&d.field, 1).scale(&c);
    DataIsomorphism {
        base_change: m.clone(),
        trivialization_changes: d
            .irregular
            .iter()
            .map(|(p, x)| (p.clone(), vec![m.clone(); x.sectors.len()]))
            .collect(),
    }
}

fn rank_one_gaussian() -> StokesData {
    extend_scalars_to(&rank_one(), &FieldSpec::gaussian()).unwrap()
}

#[test]
fn galois_conjugate_entrywise() {
    let l = FieldSpec::gaussian();
    let d = extend_scalars_to(&rank_two(0, 0), &l).unwrap();
    let mut d2 = d.clone();
    let i = FieldElement::generator(&l);
    let s = Matrix::from_rows(&l, vec![vec![FieldElement::one(&l), i.clone()], vec![FieldElement::zero(&l), FieldElement::one(&l)]])
        .unwrap();
    d2.irregular[0].stokes[0] = s.clone();
    let sigma = conjugation(&l).unwrap();
    let c = galois_conjugate(&d2, &sigma).unwrap();
    assert_eq!(c.irregular[0].stokes[0][(0, 1)], -&i);
    assert_eq!(c.irregular[0].exponents, d2.irregular[0].exponents);
    assert_eq!(galois_conjugate(&d2, &GaloisAction::identity(&l)).unwrap(), d2);
    let other = GaloisAction::identity(&FieldSpec::sqrt2());
    assert!(matches!(galois_conjugate(&d2, &other), Err(Error::AutomorphismOutsideGroup(_))));
}

#[test]
fn galois_conjugate_composes() {
    let l = FieldSpec::cyclotomic5();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let d = random::datum(&l, &mut rng, &Shape { max_rank: 2, ..Shape::default() }).unwrap();
    let g = automorphisms(&l).unwrap();
    let (a, b) = (&g[1], &g[2]);
    let lhs = galois_conjugate(&galois_conjugate(&d, a).unwrap(), b).unwrap();
    assert_eq!(lhs, galois_conjugate(&d, &b.compose(a)).unwrap());
    assert!(validate(&galois_conjugate(&d, a).unwrap()).pass);
}

#[test]
fn c_conjugate_rank_one() {
    let d = rank_one();
    let c = c_conjugate_data(&d).unwrap();
    let x = &c.irregular[0];
    let (a, coef) = x.exponents.entries()[0].0.leading().unwrap();
    assert_eq!(a, crate::puiseux::Exp::from_integer(1));
    assert_eq!(coef, &FieldElement::from_int(&d.field, -1));
    assert_eq!(x.sectors[0], d.irregular[0].sectors[0].reflected());
    assert!(x.stokes.iter().all(Matrix::is_identity));
    assert!(validate(&c).pass);
    assert_eq!(c_conjugate_data(&c).unwrap(), d);
    // a complex cube root of 2 generates a field without conjugation
    let cubic = FieldSpec::from_parts(&[-2, 0, 0, 1], ["-7/10", "-1/2", "1", "6/5"]).unwrap();
    assert_eq!(
        c_conjugate_data(&extend_scalars_to(&d, &cubic).unwrap()).unwrap_err(),
        Error::NotConjugationClosed
    );
}

#[test]
fn c_conjugate_random_is_valid_involution() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for k in [FieldSpec::gaussian(), FieldSpec::rationals()] {
        for _ in 0..3 {
            let d = random::datum(&k, &mut rng, &Shape { max_rank: 3, ..Shape::default() }).unwrap();
            let c = c_conjugate_data(&d).unwrap();
            let rep = validate(&c);
            assert!(rep.pass, "{:?}", rep.violations);
            assert_eq!(c_conjugate_data(&c).unwrap(), d);
        }
    }
}

#[test]
fn cocycle_examples() {
    let d = rank_one_gaussian();
    let l = d.field.clone();
    let sigma = conjugation(&l).unwrap();
    let group = vec![GaloisAction::identity(&l), sigma];
    let good = GStructure {
        group: group.clone(),
        maps: vec![DataIsomorphism::identity(&d), scalar_iso(&d, FieldElement::generator(&l))],
    };
    check_cocycle(&d, &good).unwrap();
    let bad = GStructure {
        group,
        maps: vec![DataIsomorphism::identity(&d), scalar_iso(&d, FieldElement::from_int(&l, 2))],
    };
    assert!(matches!(check_cocycle(&d, &bad), Err(Error::CocycleViolation(_))));
    let q = FieldSpec::rationals();
    let down = descend(&d, &bad, &q, &DescentOptions::default());
    assert!(matches!(down, Err(Error::CocycleViolation(_))));
    // twisted structure descends to rational data
    let out = descend(&d, &good, &q, &DescentOptions::default()).unwrap();
    assert_eq!(out.datum.field.as_ref(), q.as_ref());
    assert!(validate(&out.datum).pass);
    let up = extend_scalars_to(&out.datum, &l).unwrap();
    assert_eq!(out.iso.apply(&up).unwrap(), d);
}

#[test]
fn descend_round_trip() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let q = FieldSpec::rationals();
    for l in [FieldSpec::gaussian(), FieldSpec::sqrt2()] {
        let dk = random::datum(&q, &mut rng, &Shape { max_rank: 3, ..Shape::default() }).unwrap();
        let dl = extend_scalars_to(&dk, &l).unwrap();
        let gs = GStructure::natural(&dl, automorphisms(&l).unwrap());
        // twist by a random isomorphism over L
        let x = random::isomorphism(&dl, &mut rng, &Shape::default()).unwrap();
        let d2 = x.apply(&dl).unwrap();
        let gs2 = gs.transport(&x).unwrap();
        for (d, g) in [(&dl, &gs), (&d2, &gs2)] {
            let out = descend(d, g, &q, &DescentOptions::default()).unwrap();
            assert!(validate(&out.datum).pass);
            let w = isomorphism_probe(&dk, &out.datum).unwrap();
            assert!(w.witness.is_some(), "{:?}", w.report);
        }
    }
}

#[test]
fn real_form_examples() {
    let d = rank_one_gaussian();
    let l = d.field.clone();
    let id = DataIsomorphism::identity(&d);
    let out = real_form(&d, &id, &DescentOptions::default()).unwrap();
    assert!(validate(&out.datum).pass);
    let i = FieldElement::generator(&l);
    let out = real_form(&d, &scalar_iso(&d, i.clone()), &DescentOptions::default()).unwrap();
    let sigma = conjugation(&l).unwrap();
    assert_eq!(galois_conjugate(&out.datum, &sigma).unwrap(), out.datum);
    assert!(matches!(
        real_form(&d, &scalar_iso(&d, FieldElement::from_int(&l, 2)), &DescentOptions::default()),
        Err(Error::InvolutionFails(_))
    ));
    // (1+i)/z has conjugate (1-i)/z, which is not an exponent
    let mut bad = d.clone();
    let c = &FieldElement::one(&l) + &i;
    bad.irregular[0].exponents = ExponentialSum::simple(vec![crate::puiseux::PuiseuxExponent::monomial(
        c,
        crate::puiseux::Exp::from_integer(1),
    )
    .unwrap()])
    .unwrap();
    assert!(matches!(
        real_form(&bad, &DataIsomorphism::identity(&bad), &DescentOptions::default()),
        Err(Error::NotConjugationStable(_))
    ));
}

#[test]
fn json_forms() {
    let d = rank_one_gaussian();
    let l = d.field.clone();
    let gs = GStructure {
        group: vec![GaloisAction::identity(&l), conjugation(&l).unwrap()],
        maps: vec![DataIsomorphism::identity(&d), scalar_iso(&d, FieldElement::generator(&l))],
    };
    let s = gstructure_to_json(&gs);
    let back = gstructure_from_json(&l, &s).unwrap();
    assert_eq!(back.group, gs.group);
    assert_eq!(back.maps, gs.maps);
    assert_eq!(gstructure_to_json(&back), s);
    let t = iso_to_json(&gs.maps[1]);
    assert_eq!(iso_from_json(&l, &t).unwrap(), gs.maps[1]);
}
