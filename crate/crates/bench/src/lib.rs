//! Benchmark fixtures, all drawn from fixed seeds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use stokes_core::descent::GStructure;
use stokes_core::numfield::automorphisms;
use stokes_core::random::{self, Shape};
use stokes_core::stokesdata::extend_scalars_to;
use stokes_core::*;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn elements(k: &Arc<FieldSpec>, count: usize, seed: u64) -> Vec<FieldElement> {
    let mut r = rng(seed);
    (0..count).map(|_| random::nonzero_element(k, &mut r, 20)).collect()
}

/// Exponent pairs with arcs, for the comparison benches.
pub fn comparisons(k: &Arc<FieldSpec>, count: usize, seed: u64) -> Vec<(PuiseuxExponent, PuiseuxExponent, Sector)> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let (n1, n2) = (r.gen_range(1..=3), r.gen_range(1..=3));
            let phi = random::exponent(k, &mut r, 4, n1, 6);
            let psi = random::exponent(k, &mut r, 4, n2, 6);
            (phi, psi, random::arc(&mut r, 24))
        })
        .collect()
}

pub fn data(k: &Arc<FieldSpec>, count: usize, seed: u64) -> Vec<StokesData> {
    let mut r = rng(seed);
    (0..count).map(|_| random::datum(k, &mut r, &Shape::default()).expect("random datum")).collect()
}

/// Data over L whose entries are moved off K by an isomorphism, with the
/// transported G-structure.
pub fn descent_case(l: &Arc<FieldSpec>, seed: u64) -> (StokesData, GStructure) {
    let mut r = rng(seed);
    let q = FieldSpec::rationals();
    let dk = random::datum(&q, &mut r, &Shape { max_rank: 3, ..Shape::default() }).expect("random datum");
    let dl = extend_scalars_to(&dk, l).expect("extension");
    let x = random::isomorphism(&dl, &mut r, &Shape { height: 2, ..Shape::default() }).expect("isomorphism");
    let gs = GStructure::natural(&dl, automorphisms(l).expect("galois")).transport(&x).expect("transport");
    (x.apply(&dl).expect("apply"), gs)
}
