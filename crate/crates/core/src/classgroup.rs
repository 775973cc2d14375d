//! The ideal class group `C` of `O` and its subgroup `C0` generated by the
//! classes of ramified primes.
//!
//! Classes are identified with reduced positive definite binary quadratic
//! forms of discriminant `disc`. Prime ideals of small norm generate `C`; a
//! breadth-first walk over the classes yields a relation matrix whose Smith
//! form gives the invariant factors and the discrete logarithm of every class.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{int, is_prime, Int};
use crate::field::QuadField;
use crate::ideal::{prime_decomposition, FracIdeal, PrimeIdeal, PrimeKind};
use crate::zlinalg::{snf_with_transforms, IMat};

/// A binary quadratic form `a x^2 + b xy + c y^2`.
pub type Form = (Int, Int, Int);

/// Reduce a positive definite form: `|b| <= a <= c`, with `b >= 0` when
/// `|b| = a` or `a = c`.
pub fn reduce_form(form: &Form) -> Form {
    let (mut a, mut b, mut c) = form.clone();
    let disc = &b * &b - int(4) * &a * &c;
    loop {
        let two_a = int(2) * &a;
        let k = (&a - &b).div_floor(&two_a);
        b += &two_a * &k;
        c = (&b * &b - &disc) / (int(4) * &a);
        if a > c {
            std::mem::swap(&mut a, &mut c);
            b = -b;
            continue;
        }
        if a == c && b.is_negative() {
            b = -b;
        }
        return (a, b, c);
    }
}

/// The form attached to the class of `I`: for the primitive integral part
/// `Z a + Z beta` (with `beta = k + omega`) take `Nr(x a + y beta) / a`.
pub fn ideal_form(ideal: &FracIdeal) -> Form {
    let [[n, _], [r, s]] = ideal.hnf();
    let field = ideal.field();
    let a = &n / &s;
    let k = &r / &s;
    let beta = &field.from_int(&k) + &field.omega();
    let tr = beta.trace().to_integer();
    let nr = beta.norm().to_integer();
    let c = &nr / &a;
    reduce_form(&(a, tr, c))
}

/// The integral ideal `Z a + Z ((b - t)/2 + omega)` of a primitive form.
pub fn form_ideal(field: QuadField, form: &Form) -> FracIdeal {
    let (t, _) = field.omega_relation();
    let k = (&form.1 - int(t)) / int(2);
    let beta = &field.from_int(&k) + &field.omega();
    FracIdeal::from_generators(field, &[field.from_int(&form.0), beta]).expect("nonzero")
}

/// An element of `C` in coordinates modulo the invariant factors.
pub type ClassElem = Vec<u64>;

#[derive(Debug, Clone)]
pub struct ClassGroup {
    field: QuadField,
    factor_base: Vec<PrimeIdeal>,
    invariants: Vec<u64>,
    /// Reduced form per class, in discovery order; class 0 is trivial.
    forms: Vec<Form>,
    log_table: BTreeMap<Form, ClassElem>,
    coords: Vec<ClassElem>,
}

impl ClassGroup {
    pub fn new(field: QuadField) -> Self {
        let dabs = field.disc().unsigned_abs();
        // primes of norm at most (2/3) sqrt|disc|, which dominates the Minkowski bound
        let mut factor_base = Vec::new();
        let mut p = 2u64;
        while 9 * p * p <= 4 * dabs {
            if is_prime(p) {
                factor_base.extend(
                    prime_decomposition(field, p).into_iter().filter(|q| q.kind != PrimeKind::Inert),
                );
            }
            p += 1;
        }
        let g = factor_base.len();

        let start = reduce_form(&ideal_form(&FracIdeal::unit(field)));
        let mut index: BTreeMap<Form, usize> = BTreeMap::new();
        let mut forms = vec![start.clone()];
        let mut exps: Vec<Vec<i64>> = vec![vec![0; g]];
        index.insert(start, 0);
        let mut relations: IMat = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(ci) = queue.pop_front() {
            let rep = form_ideal(field, &forms[ci]);
            for (j, q) in factor_base.iter().enumerate() {
                let f = ideal_form(&rep.mul(&q.ideal));
                let mut e = exps[ci].clone();
                e[j] += 1;
                match index.get(&f) {
                    Some(&known) => {
                        let rel: Vec<Int> = e.iter().zip(&exps[known]).map(|(x, y)| int(x - y)).collect();
                        if rel.iter().any(|x| !x.is_zero()) {
                            relations.push(rel);
                        }
                    }
                    None => {
                        index.insert(f.clone(), forms.len());
                        forms.push(f);
                        exps.push(e);
                        queue.push_back(forms.len() - 1);
                    }
                }
            }
        }

        let (invariants, coords) = if g == 0 || relations.is_empty() {
            (Vec::new(), vec![Vec::new(); forms.len()])
        } else {
            let (dmat, _, v) = snf_with_transforms(&relations);
            let diag: Vec<Int> = (0..g).map(|i| dmat.get(i).map(|r| r[i].abs()).unwrap_or_else(Int::zero)).collect();
            assert!(diag.iter().all(|x| !x.is_zero()), "relation lattice must have full rank");
            let keep: Vec<usize> = (0..g).filter(|&i| !diag[i].is_one()).collect();
            let invariants: Vec<u64> = keep.iter().map(|&i| diag[i].to_u64().expect("small class group")).collect();
            let coords = exps
                .iter()
                .map(|x| {
                    keep.iter()
                        .zip(&invariants)
                        .map(|(&i, &m)| {
                            let y: Int = (0..g).map(|j| int(x[j]) * &v[j][i]).sum();
                            y.mod_floor(&Int::from(m)).to_u64().unwrap()
                        })
                        .collect()
                })
                .collect::<Vec<ClassElem>>();
            (invariants, coords)
        };
        let log_table = forms.iter().cloned().zip(coords.iter().cloned()).collect();
        ClassGroup { field, factor_base, invariants, forms, log_table, coords }
    }

    pub fn field(&self) -> QuadField {
        self.field
    }

    pub fn order(&self) -> u64 {
        self.forms.len() as u64
    }

    /// Invariant factors `d_1 | d_2 | ...`, all greater than one.
    pub fn invariant_factors(&self) -> &[u64] {
        &self.invariants
    }

    pub fn factor_base(&self) -> &[PrimeIdeal] {
        &self.factor_base
    }

    pub fn identity(&self) -> ClassElem {
        vec![0; self.invariants.len()]
    }

    pub fn add(&self, x: &ClassElem, y: &ClassElem) -> ClassElem {
        x.iter().zip(y).zip(&self.invariants).map(|((a, b), m)| (a + b) % m).collect()
    }

    pub fn neg(&self, x: &ClassElem) -> ClassElem {
        x.iter().zip(&self.invariants).map(|(a, m)| (m - a) % m).collect()
    }

    pub fn sub(&self, x: &ClassElem, y: &ClassElem) -> ClassElem {
        self.add(x, &self.neg(y))
    }

    pub fn class_of(&self, ideal: &FracIdeal) -> ClassElem {
        self.log_table[&ideal_form(ideal)].clone()
    }

    /// All classes with their reduced forms.
    pub fn classes(&self) -> impl Iterator<Item = (&Form, &ClassElem)> {
        self.forms.iter().zip(&self.coords)
    }

    /// Small integral ideal in the given class.
    pub fn representative(&self, c: &ClassElem) -> FracIdeal {
        let i = self.coords.iter().position(|x| x == c).expect("valid class coordinates");
        form_ideal(self.field, &self.forms[i])
    }

    /// Ideals generating the cyclic factors, in invariant-factor order.
    pub fn generators(&self) -> Vec<FracIdeal> {
        (0..self.invariants.len())
            .map(|i| {
                let mut e = self.identity();
                e[i] = 1;
                self.representative(&e)
            })
            .collect()
    }

    pub fn element_order(&self, x: &ClassElem) -> u64 {
        x.iter()
            .zip(&self.invariants)
            .map(|(&a, &m)| m / a.gcd(&m))
            .fold(1, |acc, o| acc.lcm(&o))
    }

    pub fn c0_subgroup(&self) -> C0Subgroup {
        let ramified: Vec<ClassElem> = crate::ideal::ramified_primes(self.field)
            .iter()
            .map(|q| self.class_of(&q.ideal))
            .collect();
        let mut members = BTreeSet::from([self.identity()]);
        let mut frontier = vec![self.identity()];
        while let Some(x) = frontier.pop() {
            for g in &ramified {
                let y = self.add(&x, g);
                if members.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        let index = self.order() / members.len() as u64;
        let mut reps = vec![(FracIdeal::unit(self.field), self.identity())];
        let mut p = 2u64;
        while (reps.len() as u64) < index {
            if is_prime(p) {
                for q in prime_decomposition(self.field, p) {
                    let c = self.class_of(&q.ideal);
                    let new = reps.iter().all(|(_, rc)| !members.contains(&self.sub(&c, rc)));
                    if new && (reps.len() as u64) < index {
                        reps.push((q.ideal.clone(), c));
                    }
                }
            }
            p += 1;
        }
        C0Subgroup { group: self.clone(), members, reps }
    }
}

/// `C0` together with a transversal `A_1 = O, A_2, ...` of `C / C0`.
#[derive(Debug, Clone)]
pub struct C0Subgroup {
    group: ClassGroup,
    members: BTreeSet<ClassElem>,
    reps: Vec<(FracIdeal, ClassElem)>,
}

impl C0Subgroup {
    pub fn order(&self) -> u64 {
        self.members.len() as u64
    }

    pub fn index(&self) -> usize {
        self.reps.len()
    }

    pub fn contains(&self, c: &ClassElem) -> bool {
        self.members.contains(c)
    }

    pub fn contains_ideal(&self, ideal: &FracIdeal) -> bool {
        self.contains(&self.group.class_of(ideal))
    }

    pub fn coset_reps(&self) -> Vec<FracIdeal> {
        self.reps.iter().map(|(i, _)| i.clone()).collect()
    }

    pub fn coset_rep(&self, i: usize) -> &FracIdeal {
        &self.reps[i].0
    }

    /// Index `i` with `[I] ∈ [A_i] C0`.
    pub fn coset_of(&self, ideal: &FracIdeal) -> usize {
        let c = self.group.class_of(ideal);
        self.reps
            .iter()
            .position(|(_, rc)| self.contains(&self.group.sub(&c, rc)))
            .expect("transversal covers all cosets")
    }

    pub fn class_group(&self) -> &ClassGroup {
        &self.group
    }
}

/// Independent count of reduced primitive forms of discriminant `disc < 0`.
pub fn count_reduced_forms(disc: i64) -> u64 {
    let dabs = disc.unsigned_abs() as i64;
    let mut count = 0;
    let mut a = 1i64;
    while 3 * a * a <= dabs {
        for b in -a + 1..=a {
            let num = b * b - disc;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            if a.gcd(&b).gcd(&c) == 1 {
                count += 1;
            }
        }
        a += 1;
    }
    count
}
