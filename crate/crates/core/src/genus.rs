//! Special genera inside the genus of a lattice.
//!
//! The group `G(L)` is realised as an explicit multiplication table on pairs
//! `(coset of C/C0, class in E(L)/R(L))`. Sign classes live in `(Z/2)^k`,
//! one bit per prime of `P(L)`, stored as a `u64` bitmask with bit `t`
//! belonging to the `t`-th prime. A set bit means "outside `E1`".

use std::collections::BTreeSet;
use std::fmt;

use crate::arith::{primes_up_to, Rat};
use crate::classgroup::{C0Subgroup, ClassGroup};
use crate::error::{Error, Result};
use crate::field::{FieldElement, QuadField};
use crate::ideal::{prime_decomposition, ramified_primes, FracIdeal, PrimeIdeal, PrimeKind};
use crate::lattice::{index_ideal, HermLattice};
use crate::local::{det_group, is_e1_element, is_isotropic, is_modular_at, jordan_decomposition, DetGroup, LocalData};
use crate::neighbour::neighbour;

/// Default bound on rational primes scanned by the generator search.
pub const DEFAULT_PRIME_BOUND: u64 = 1000;

/// The primes where the local determinant group is `E1`.
#[derive(Debug, Clone)]
pub struct DetProfile {
    pub primes: Vec<LocalData>,
}

impl DetProfile {
    pub fn new(lattice: &HermLattice) -> Result<Self> {
        let mut primes = Vec::new();
        for q in ramified_primes(lattice.field()) {
            if det_group(lattice, q.p)? == DetGroup::E1 {
                primes.push(LocalData::new(lattice.field(), q.p)?);
            }
        }
        Ok(DetProfile { primes })
    }

    pub fn rational_primes(&self) -> Vec<u64> {
        self.primes.iter().map(|ld| ld.p).collect()
    }

    /// `|E(L)| = 2^k`.
    pub fn component_order(&self) -> u64 {
        1 << self.primes.len()
    }

    /// Sign vector of a norm-one element that is a unit at every prime of `P(L)`.
    pub fn sign_vector(&self, delta: &FieldElement) -> Result<u64> {
        let mut bits = 0;
        for (t, ld) in self.primes.iter().enumerate() {
            if !is_e1_element(delta, ld)? {
                bits |= 1 << t;
            }
        }
        Ok(bits)
    }

    pub fn format_bits(&self, bits: u64) -> String {
        (0..self.primes.len()).map(|t| if bits >> t & 1 == 1 { '1' } else { '0' }).collect()
    }
}

/// `R(L)`: all sign vectors reachable from the torsion units of `O`.
pub fn r_subgroup(profile: &DetProfile, field: QuadField) -> Result<BTreeSet<u64>> {
    let gens: Vec<u64> = field.torsion_units().iter().map(|u| profile.sign_vector(u)).collect::<Result<_>>()?;
    let mut members = BTreeSet::from([0u64]);
    loop {
        let next: BTreeSet<u64> = members.iter().flat_map(|&m| gens.iter().map(move |&g| m ^ g)).collect();
        if next.is_subset(&members) {
            return Ok(members);
        }
        members.extend(next);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GenusElement {
    /// Index into the transversal `A_1 = O, A_2, ...` of `C / C0`.
    pub coset: usize,
    /// Canonical representative of the class in `E(L) / R(L)`.
    pub sign: u64,
}

/// `G(L)` with its multiplication table.
#[derive(Debug, Clone)]
pub struct GenusGroup {
    field: QuadField,
    profile: DetProfile,
    c0: C0Subgroup,
    reps: Vec<FracIdeal>,
    r: BTreeSet<u64>,
    k: Vec<Vec<usize>>,
    alpha: Vec<Vec<FieldElement>>,
    elements: Vec<GenusElement>,
    table: Vec<Vec<usize>>,
}

impl GenusGroup {
    pub fn new(lattice: &HermLattice) -> Result<Self> {
        let field = lattice.field();
        let profile = DetProfile::new(lattice)?;
        let c0 = ClassGroup::new(field).c0_subgroup();
        let reps = c0.coset_reps();
        let r = r_subgroup(&profile, field)?;
        let n = reps.len();
        let mut k = vec![vec![0; n]; n];
        let mut alpha = vec![vec![field.one(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let (kk, a) = cocycle(&c0, &reps, i, j)?;
                k[i][j] = kk;
                alpha[i][j] = a;
            }
        }
        let mut group = GenusGroup { field, profile, c0, reps, r, k, alpha, elements: Vec::new(), table: Vec::new() };
        let quotient: BTreeSet<u64> = (0..group.profile.component_order()).map(|x| group.reduce(x)).collect();
        group.elements =
            (0..n).flat_map(|coset| quotient.iter().map(move |&sign| GenusElement { coset, sign })).collect();
        let mut alpha_signs = vec![vec![0; n]; n];
        for i in 0..n {
            for j in 0..n {
                alpha_signs[i][j] = group.profile.sign_vector(&group.alpha[i][j])?;
            }
        }
        let size = group.elements.len();
        let mut table = vec![vec![0; size]; size];
        for a in 0..size {
            for b in 0..size {
                let (x, y) = (group.elements[a], group.elements[b]);
                let prod = GenusElement {
                    coset: group.k[x.coset][y.coset],
                    sign: group.reduce(alpha_signs[x.coset][y.coset] ^ x.sign ^ y.sign),
                };
                table[a][b] = group.index_of(&prod);
            }
        }
        group.table = table;
        Ok(group)
    }

    pub fn field(&self) -> QuadField {
        self.field
    }

    pub fn profile(&self) -> &DetProfile {
        &self.profile
    }

    pub fn c0(&self) -> &C0Subgroup {
        &self.c0
    }

    pub fn coset_reps(&self) -> &[FracIdeal] {
        &self.reps
    }

    pub fn r_group(&self) -> &BTreeSet<u64> {
        &self.r
    }

    /// `[E(L) : R(L)]`.
    pub fn sign_quotient_order(&self) -> u64 {
        self.profile.component_order() / self.r.len() as u64
    }

    pub fn k_index(&self, i: usize, j: usize) -> usize {
        self.k[i][j]
    }

    pub fn cocycle_alpha(&self, i: usize, j: usize) -> &FieldElement {
        &self.alpha[i][j]
    }

    /// Smallest element of `x + R(L)`.
    pub fn reduce(&self, x: u64) -> u64 {
        self.r.iter().map(|r| r ^ x).min().expect("R contains 0")
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[GenusElement] {
        &self.elements
    }

    pub fn element(&self, idx: usize) -> GenusElement {
        self.elements[idx]
    }

    pub fn index_of(&self, e: &GenusElement) -> usize {
        self.elements.binary_search(e).expect("element of G(L)")
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn pow(&self, a: usize, n: u64) -> usize {
        (0..n).fold(self.identity(), |acc, _| self.mul(acc, a))
    }

    pub fn element_order(&self, a: usize) -> u64 {
        let mut x = a;
        let mut n = 1;
        while x != self.identity() {
            x = self.mul(x, a);
            n += 1;
        }
        n
    }

    /// Subgroup generated by `gens`.
    pub fn subgroup(&self, gens: &[usize]) -> BTreeSet<usize> {
        let mut members = BTreeSet::from([self.identity()]);
        let mut frontier = vec![self.identity()];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if members.insert(y) {
                    frontier.push(y);
                }
            }
        }
        members
    }

    /// Invariant factors `d_1 | d_2 | ...` with every `d_i > 1`.
    pub fn invariant_factors(&self) -> Vec<u64> {
        let n = self.order() as u64;
        let mut per_prime: Vec<Vec<u64>> = Vec::new();
        for q in primes_up_to(n) {
            if !n.is_multiple_of(q) {
                continue;
            }
            // number of cyclic q-factors of order >= q^j is log_q(|G[q^j]| / |G[q^(j-1)]|)
            let mut exps = Vec::new();
            let mut prev = 1u64;
            let mut qj = q;
            loop {
                let count = (0..self.order()).filter(|&a| self.pow(a, qj) == self.identity()).count() as u64;
                if count == prev {
                    break;
                }
                let mut ratio = count / prev;
                let mut m = 0;
                while ratio > 1 {
                    ratio /= q;
                    m += 1;
                }
                exps.push(m);
                prev = count;
                qj *= q;
            }
            // exps[j] = number of factors with order >= q^(j+1)
            let factors = exps.first().copied().unwrap_or(0);
            let mut powers = vec![1u64; factors];
            for &m in &exps {
                for p in powers.iter_mut().rev().take(m) {
                    *p *= q;
                }
            }
            per_prime.push(powers);
        }
        let len = per_prime.iter().map(Vec::len).max().unwrap_or(0);
        let mut out = vec![1u64; len];
        for powers in per_prime {
            let offset = len - powers.len();
            for (t, p) in powers.into_iter().enumerate() {
                out[offset + t] *= p;
            }
        }
        out
    }

    /// Exhaustive group-axiom check on the multiplication table.
    pub fn check_axioms(&self) -> Result<()> {
        let n = self.order();
        let e = self.identity();
        for a in 0..n {
            if self.mul(a, e) != a || self.mul(e, a) != a {
                return Err(Error::verification("G(L): identity law fails"));
            }
            if !(0..n).any(|b| self.mul(a, b) == e) {
                return Err(Error::verification("G(L): missing inverse"));
            }
            for b in 0..n {
                if self.mul(a, b) != self.mul(b, a) {
                    return Err(Error::verification("G(L): multiplication is not commutative"));
                }
                for c in 0..n {
                    if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                        return Err(Error::verification("G(L): multiplication is not associative"));
                    }
                }
            }
        }
        let expected = self.c0.index() as u64 * self.sign_quotient_order();
        if n as u64 != expected {
            return Err(Error::verification("G(L): order differs from [C:C0]·[E(L):R(L)]"));
        }
        Ok(())
    }

    /// Sign vector of `c(P)`: the class of `-1` at `P ∩ Z`, trivial elsewhere.
    pub fn c_vector(&self, prime: &PrimeIdeal) -> Result<u64> {
        let minus_one = -self.field.one();
        match self.profile.primes.iter().position(|ld| ld.p == prime.p) {
            Some(t) => Ok(if is_e1_element(&minus_one, &self.profile.primes[t])? { 0 } else { 1 << t }),
            None => Ok(0),
        }
    }

    /// `psi((A conj(A)^{-1}, x) H(L))`, checked against every alternative
    /// generator `zeta * alpha` with `zeta` a torsion unit.
    pub fn psi(&self, a: &FracIdeal, sign: u64) -> Result<usize> {
        let i = self.c0.coset_of(a);
        let ai = &self.reps[i];
        let ideal = a.div(&a.conj()).mul(&ai.conj().div(ai));
        let alpha = ideal
            .is_principal()
            .ok_or_else(|| Error::verification(format!("{ideal} should be principal")))?;
        let image = |gen: &FieldElement| -> Result<usize> {
            let s = self.profile.sign_vector(&gen.inv()?)? ^ sign;
            Ok(self.index_of(&GenusElement { coset: i, sign: self.reduce(s) }))
        };
        let value = image(&alpha)?;
        for zeta in self.field.torsion_units() {
            if image(&(&zeta * &alpha))? != value {
                return Err(Error::verification("psi depends on the choice of generator"));
            }
        }
        Ok(value)
    }

    /// `psi(P conj(P)^{-1}, c(P))`, the image of any `P`-neighbour.
    pub fn psi_neighbour_generator(&self, prime: &PrimeIdeal) -> Result<usize> {
        self.psi(&prime.ideal, self.c_vector(prime)?)
    }

    pub fn label(&self, idx: usize) -> String {
        let e = self.elements[idx];
        format!("(A{}, {})", e.coset + 1, self.profile.format_bits(e.sign))
    }
}

/// `k(i, j)` and a generator of `A_k conj(A_k)^{-1} conj(A_i) A_i^{-1} conj(A_j) A_j^{-1}`.
fn cocycle(c0: &C0Subgroup, reps: &[FracIdeal], i: usize, j: usize) -> Result<(usize, FieldElement)> {
    let k = c0.coset_of(&reps[i].mul(&reps[j]));
    let twist = |a: &FracIdeal| a.div(&a.conj());
    let ideal = twist(&reps[k]).div(&twist(&reps[i])).div(&twist(&reps[j]));
    let alpha = ideal
        .is_principal()
        .ok_or_else(|| Error::verification(format!("cocycle ideal {ideal} is not principal")))?;
    if alpha.norm() != Rat::from_integer(1.into()) {
        return Err(Error::verification("cocycle generator does not have norm one"));
    }
    Ok((k, alpha))
}

/// One generator chosen by the prime search.
#[derive(Debug, Clone)]
pub struct GeneratorStep {
    pub prime: PrimeIdeal,
    pub element: usize,
    /// Order of the image in `G(L) / <earlier generators>`.
    pub order: u64,
}

/// Primes of `O` whose neighbour images generate `G(L)`, scanned in
/// increasing order of `p` and accepted greedily.
pub fn prime_search(lattice: &HermLattice, group: &GenusGroup, bound: u64) -> Result<Vec<GeneratorStep>> {
    if group.order() == 1 {
        return Ok(Vec::new());
    }
    if lattice.rank() < 2 {
        return Err(Error::precondition("special genera need rank at least 2"));
    }
    let mut steps: Vec<GeneratorStep> = Vec::new();
    let mut sub = BTreeSet::from([group.identity()]);
    for p in primes_up_to(bound) {
        let primes = prime_decomposition(lattice.field(), p);
        if primes[0].kind == PrimeKind::Ramified && p == 2 {
            continue;
        }
        if !is_modular_at(lattice, p)? || !is_isotropic(lattice.space(), p)? {
            continue;
        }
        for prime in primes {
            let g = group.psi_neighbour_generator(&prime)?;
            if sub.contains(&g) {
                continue;
            }
            let order = (1..).find(|&n| sub.contains(&group.pow(g, n))).expect("finite group");
            steps.push(GeneratorStep { prime, element: g, order });
            let gens: Vec<usize> = steps.iter().map(|s| s.element).collect();
            sub = group.subgroup(&gens);
            if sub.len() == group.order() {
                return Ok(steps);
            }
        }
    }
    Err(Error::precondition(format!(
        "prime search exhausted below {bound}: generated a subgroup of order {} in G(L) of order {}",
        sub.len(),
        group.order()
    )))
}

/// A lattice representing one special genus.
#[derive(Debug, Clone)]
pub struct Representative {
    pub lattice: HermLattice,
    pub label: usize,
    /// Exponents `e_i` with `0 <= e_i < o_i`.
    pub exponents: Vec<u64>,
    pub index: FracIdeal,
}

#[derive(Debug, Clone)]
pub struct SpecialGenera {
    pub group: GenusGroup,
    pub steps: Vec<GeneratorStep>,
    pub representatives: Vec<Representative>,
}

impl fmt::Display for SpecialGenera {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "G(L) of order {} with invariants {:?}", self.group.order(), self.group.invariant_factors())?;
        for r in &self.representatives {
            writeln!(f, "  {:?} label {} index {}", r.exponents, self.group.label(r.label), r.index)?;
        }
        Ok(())
    }
}

/// Representatives of the special genera in the genus of `L`.
pub fn special_genera(lattice: &HermLattice, prime_bound: u64) -> Result<SpecialGenera> {
    let group = GenusGroup::new(lattice)?;
    group.check_axioms()?;
    let field = lattice.field();
    if group.order() == 1 {
        let rep = Representative {
            lattice: lattice.clone(),
            label: group.identity(),
            exponents: Vec::new(),
            index: FracIdeal::unit(field),
        };
        return Ok(SpecialGenera { group, steps: Vec::new(), representatives: vec![rep] });
    }
    let steps = prime_search(lattice, &group, prime_bound)?;

    let mut chains: Vec<Vec<HermLattice>> = Vec::new();
    for step in &steps {
        let mut chain = vec![lattice.clone()];
        for j in 1..step.order as usize {
            let avoid = if j >= 2 { chain[j - 2].clone() } else { lattice.clone() };
            let next = neighbour(&chain[j - 1], &step.prime, Some(&avoid))?;
            chain.push(next);
        }
        chains.push(chain);
    }

    let big_a = steps
        .iter()
        .fold(FracIdeal::unit(field), |acc, s| acc.mul(&s.prime.ideal.pow(s.order as i64 - 1)));
    let a_l = lattice.scale_by_ideal(&big_a);
    let abar_inv_l = lattice.scale_by_ideal(&big_a.conj().inv());

    let total: u64 = steps.iter().map(|s| s.order).product();
    let mut representatives = Vec::new();
    for n in 0..total {
        // mixed radix, first generator most significant
        let mut rest = n;
        let mut exponents = vec![0u64; steps.len()];
        for (t, s) in steps.iter().enumerate().rev() {
            exponents[t] = rest % s.order;
            rest /= s.order;
        }
        let mut inter = abar_inv_l.clone();
        for (chain, &e) in chains.iter().zip(&exponents) {
            inter = inter.intersect(&chain[e as usize])?;
        }
        let m = a_l.sum(&inter)?;
        let label = steps
            .iter()
            .zip(&exponents)
            .fold(group.identity(), |acc, (s, &e)| group.mul(acc, group.pow(s.element, e)));
        let index = index_ideal(lattice, &m)?;
        representatives.push(Representative { lattice: m, label, exponents, index });
    }
    let result = SpecialGenera { group, steps, representatives };
    verify_special_genera(lattice, &result)?;
    Ok(result)
}

/// Independent checks on the output of [`special_genera`].
pub fn verify_special_genera(lattice: &HermLattice, sg: &SpecialGenera) -> Result<()> {
    let group = &sg.group;
    let field = lattice.field();
    if sg.representatives.len() != group.order() {
        return Err(Error::verification("number of representatives differs from |G(L)|"));
    }
    let labels: BTreeSet<usize> = sg.representatives.iter().map(|r| r.label).collect();
    if labels.len() != group.order() {
        return Err(Error::verification("representatives carry repeated G(L)-labels"));
    }
    let chosen: BTreeSet<u64> = sg.steps.iter().map(|s| s.prime.p).collect();
    for rep in &sg.representatives {
        let mut ideal = FracIdeal::unit(field);
        let mut sign = 0;
        for (s, &e) in sg.steps.iter().zip(&rep.exponents) {
            ideal = ideal.mul(&s.prime.ideal.pow(e as i64));
            if e % 2 == 1 {
                sign ^= group.c_vector(&s.prime)?;
            }
        }
        if rep.index != ideal.div(&ideal.conj()) {
            return Err(Error::verification("representative has an unexpected index ideal"));
        }
        if group.psi(&ideal, sign)? != rep.label {
            return Err(Error::verification("psi of the representative disagrees with its label"));
        }
        let inter = lattice.intersect(&rep.lattice)?;
        for idx in [lattice.z_index(&inter), rep.lattice.z_index(&inter)] {
            let idx = idx.to_integer();
            let stray = crate::arith::prime_divisors(&idx).into_iter().any(|q| !chosen.contains(&q));
            if stray {
                return Err(Error::verification("representative differs from L away from the chosen primes"));
            }
        }
        for &p in &chosen {
            let a = jordan_decomposition(lattice, p)?;
            let b = jordan_decomposition(&rep.lattice, p)?;
            let inv = |j: &crate::local::JordanDecomposition| j.blocks.iter().map(|b| b.invariants()).collect::<Vec<_>>();
            if inv(&a) != inv(&b) {
                return Err(Error::verification(format!("representative has different Jordan invariants at {p}")));
            }
        }
    }
    let product: u64 = sg.steps.iter().map(|s| s.order).product();
    if product != group.order() as u64 {
        return Err(Error::verification("orders of the generator steps do not multiply to |G(L)|"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::HermSpace;
    use std::sync::Arc;

    fn example() -> HermLattice {
        let f = QuadField::new(-17).unwrap();
        let gram = vec![vec![f.from_ints(102, 0), f.from_ints(0, 1)], vec![f.from_ints(0, -1), f.zero()]];
        HermLattice::free(Arc::new(HermSpace::new(f, gram).unwrap()))
    }

    #[test]
    fn example_group() {
        let l = example();
        let g = GenusGroup::new(&l).unwrap();
        assert_eq!(g.profile().rational_primes(), vec![2, 17]);
        assert_eq!(g.r_group().len(), 2);
        assert_eq!(g.order(), 4);
        assert_eq!(g.invariant_factors(), vec![4]);
        g.check_axioms().unwrap();
        let p3 = prime_decomposition(l.field(), 3).remove(0);
        let h = g.psi_neighbour_generator(&p3).unwrap();
        assert_eq!(g.element_order(h), 4);
        // alpha_{2,2} generates P3^-2 conj(P3)^2 with A_2 = P3
        assert_eq!(g.coset_reps()[1], p3.ideal);
        assert_eq!(g.k_index(1, 1), 0);
        let a22 = FracIdeal::principal(g.cocycle_alpha(1, 1)).unwrap();
        assert_eq!(a22, p3.conj().ideal.pow(2).div(&p3.ideal.pow(2)));
    }

    #[test]
    fn example_special_genera() {
        let l = example();
        let sg = special_genera(&l, DEFAULT_PRIME_BOUND).unwrap();
        assert_eq!(sg.representatives.len(), 4);
        assert_eq!(sg.steps.len(), 1);
        let p = &sg.steps[0].prime;
        let step = p.ideal.div(&p.conj().ideal);
        for (i, r) in sg.representatives.iter().enumerate() {
            assert_eq!(r.index, step.pow(i as i64));
        }
    }

    #[test]
    fn psi_is_multiplicative() {
        let l = example();
        let g = GenusGroup::new(&l).unwrap();
        let mut primes = Vec::new();
        for p in [3u64, 5, 7, 11, 13, 19, 23] {
            primes.extend(prime_decomposition(l.field(), p));
        }
        for a in &primes {
            for b in &primes {
                let lhs = g.mul(g.psi_neighbour_generator(a).unwrap(), g.psi_neighbour_generator(b).unwrap());
                let sign = g.c_vector(a).unwrap() ^ g.c_vector(b).unwrap();
                let rhs = g.psi(&a.ideal.mul(&b.ideal), sign).unwrap();
                assert_eq!(lhs, rhs, "{} {}", a.label(), b.label());
            }
        }
    }

    #[test]
    fn trivial_group_returns_input() {
        let f = QuadField::new(-1).unwrap();
        let space = crate::lattice::diagonal_space(f, &vec![Rat::from_integer(1.into()); 3]).unwrap();
        let l = HermLattice::free(space);
        let sg = special_genera(&l, DEFAULT_PRIME_BOUND).unwrap();
        assert_eq!(sg.representatives.len(), 1);
        assert_eq!(sg.representatives[0].lattice, l);
    }
}
