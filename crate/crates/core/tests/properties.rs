use herm_genus::arith::rat;
use herm_genus::classgroup::ClassGroup;
use herm_genus::emat::{conj_transpose, det, matmul};
use herm_genus::field::QuadField;
use herm_genus::ideal::{different, prime_decomposition, FracIdeal};
use herm_genus::io::{parse_lattice, serialize_lattice};
use herm_genus::lattice::{index_ideal, quasi_reflection, HermLattice};
use herm_genus::local::{hilbert_symbol, jordan_decomposition, LocalData};
use herm_genus::samples::{random_ideal, random_lattice};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FIELDS: [i64; 6] = [-1, -2, -3, -5, -7, -17];

fn lattice(seed: u64, field_idx: usize, rank: usize) -> HermLattice {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_lattice(&mut rng, QuadField::new(FIELDS[field_idx]).unwrap(), rank)
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 24, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn serialization_round_trips(seed in any::<u64>(), fi in 0..FIELDS.len(), rank in 1usize..=3) {
        let l = lattice(seed, fi, rank);
        prop_assert_eq!(parse_lattice(&serialize_lattice(&l)).unwrap(), l);
    }

    #[test]
    fn jordan_blocks_partition_the_rank(seed in any::<u64>(), fi in 0..FIELDS.len(), rank in 1usize..=3) {
        let l = lattice(seed, fi, rank);
        for q in prime_decomposition(l.field(), 2).into_iter().chain(prime_decomposition(l.field(), 3)) {
            let jd = jordan_decomposition(&l, q.p).unwrap();
            prop_assert_eq!(jd.blocks.iter().map(|b| b.rank).sum::<usize>(), rank);
            prop_assert!(jd.blocks.windows(2).all(|w| w[0].scale_val < w[1].scale_val));
        }
    }

    #[test]
    fn jordan_invariants_survive_ideal_scaling(seed in any::<u64>(), fi in 0..FIELDS.len(), rank in 1usize..=3) {
        // Scaling by a rational integer n shifts every block scale by v_P(n conj(n)).
        let l = lattice(seed, fi, rank);
        let f = l.field();
        let scaled = l.scale_by_ideal(&FracIdeal::principal(&f.from_ints(3, 0)).unwrap());
        let ld = LocalData::new(f, 3).unwrap();
        let shift = 2 * ld.val(&f.from_ints(3, 0));
        let before = jordan_decomposition(&l, 3).unwrap();
        let after = jordan_decomposition(&scaled, 3).unwrap();
        prop_assert_eq!(before.blocks.len(), after.blocks.len());
        for (a, b) in before.blocks.iter().zip(&after.blocks) {
            prop_assert_eq!(a.rank, b.rank);
            prop_assert_eq!(a.scale_val + shift, b.scale_val);
            prop_assert_eq!(a.is_h_type, b.is_h_type);
        }
    }

    #[test]
    fn quasi_reflections_are_isometries(seed in any::<u64>(), fi in 0..FIELDS.len(), rank in 1usize..=3) {
        let l = lattice(seed, fi, rank);
        let f = l.field();
        let space = l.space();
        let x = l.zbasis().into_iter().find(|v| !space.phi(v, v).is_zero());
        prop_assume!(x.is_some());
        let x = x.unwrap();
        for u in f.torsion_units() {
            let t = quasi_reflection(space, &x, &u).unwrap();
            let image = matmul(&matmul(&t, space.gram()), &conj_transpose(&t));
            prop_assert_eq!(&image, space.gram());
            prop_assert_eq!(det(&t), u.clone());
            let moved = l.apply(&t).unwrap();
            prop_assert!(index_ideal(&l, &moved).unwrap().is_unit_ideal());
        }
    }

    #[test]
    fn scale_norm_chain(seed in any::<u64>(), fi in 0..FIELDS.len(), rank in 1usize..=4) {
        let l = lattice(seed, fi, rank);
        let dinv = different(l.field()).inv();
        let (s, n) = (l.scale(), l.norm_ideal());
        prop_assert!(dinv.mul(&n).contains(&s));
        prop_assert!(dinv.mul(&s).contains(&dinv.mul(&n)));
        prop_assert!(s.contains(&n));
    }

    #[test]
    fn ideal_arithmetic(seed in any::<u64>(), fi in 0..FIELDS.len()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = QuadField::new(FIELDS[fi]).unwrap();
        let (a, b) = (random_ideal(&mut rng, f), random_ideal(&mut rng, f));
        prop_assert_eq!(a.mul(&b).div(&b), a.clone());
        prop_assert_eq!(a.mul(&b).norm(), a.norm() * b.norm());
        prop_assert_eq!(a.mul(&a.conj()), FracIdeal::rational(f, &a.norm()).unwrap());
        let cg = ClassGroup::new(f);
        prop_assert_eq!(cg.class_of(&a.mul(&a.conj())), cg.identity());
        prop_assert_eq!(cg.class_of(&a.mul(&b)), cg.add(&cg.class_of(&a), &cg.class_of(&b)));
    }

    #[test]
    fn hilbert_symbol_is_bimultiplicative(a in 1i64..60, b in 1i64..60, c in 1i64..60, sa in any::<bool>(), sb in any::<bool>()) {
        let a = if sa { -a } else { a };
        let b = if sb { -b } else { b };
        for p in [2u64, 3, 5, 7, 17] {
            let ab = hilbert_symbol(&rat(a, 1), &rat(b, 1), p).unwrap();
            prop_assert_eq!(ab, hilbert_symbol(&rat(b, 1), &rat(a, 1), p).unwrap());
            let lhs = hilbert_symbol(&rat(a * c, 1), &rat(b, 1), p).unwrap();
            prop_assert_eq!(lhs, ab * hilbert_symbol(&rat(c, 1), &rat(b, 1), p).unwrap());
            prop_assert_eq!(hilbert_symbol(&rat(a, 1), &rat(-a, 1), p).unwrap(), 1);
        }
    }
}
