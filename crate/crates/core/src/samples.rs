//! Seeded random lattices for self-tests and property checks.

use std::sync::Arc;

use rand::Rng;

use crate::arith::{primes_up_to, rat};
use crate::emat::Vector;
use crate::field::{FieldElement, QuadField};
use crate::ideal::{prime_decomposition, FracIdeal};
use crate::lattice::{HermLattice, HermSpace};

fn small_element(rng: &mut impl Rng, field: QuadField, bound: i64) -> FieldElement {
    let u = rng.gen_range(-bound..=bound);
    let v = rng.gen_range(-bound..=bound);
    field.from_omega(rat(u, 1), rat(v, 1))
}

/// Random nonsingular hermitian space with small integral entries.
pub fn random_space(rng: &mut impl Rng, field: QuadField, rank: usize) -> Arc<HermSpace> {
    loop {
        let mut gram = vec![vec![field.zero(); rank]; rank];
        for i in 0..rank {
            gram[i][i] = field.from_ints(rng.gen_range(-6..=6), 0);
            for j in i + 1..rank {
                let x = if rng.gen_bool(0.4) { field.zero() } else { small_element(rng, field, 3) };
                gram[j][i] = x.conj();
                gram[i][j] = x;
            }
        }
        if let Ok(space) = HermSpace::new(field, gram) {
            return Arc::new(space);
        }
    }
}

/// Random fractional ideal supported on primes below 12.
pub fn random_ideal(rng: &mut impl Rng, field: QuadField) -> FracIdeal {
    let mut a = FracIdeal::unit(field);
    for p in primes_up_to(11) {
        for q in prime_decomposition(field, p) {
            if rng.gen_bool(0.25) {
                a = a.mul(&q.ideal.pow(rng.gen_range(-1..=1)));
            }
        }
    }
    a
}

/// Random lattice given by a random pseudo-basis in a random space.
pub fn random_lattice(rng: &mut impl Rng, field: QuadField, rank: usize) -> HermLattice {
    let space = random_space(rng, field, rank);
    let pb: Vec<(FracIdeal, Vector)> = (0..rank)
        .map(|i| {
            let v: Vector = (0..rank)
                .map(|j| match j.cmp(&i) {
                    std::cmp::Ordering::Less => small_element(rng, field, 2),
                    std::cmp::Ordering::Equal => field.one(),
                    std::cmp::Ordering::Greater => field.zero(),
                })
                .collect();
            (random_ideal(rng, field), v)
        })
        .collect();
    HermLattice::from_pseudo_basis(space, &pb).expect("unit-triangular pseudo-basis")
}
