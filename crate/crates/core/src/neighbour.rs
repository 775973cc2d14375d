//! `P`-neighbours of a lattice that is modular at `p = P ∩ Z`.
//!
//! For an admissible `x ∈ L` the neighbour is
//! `L' = { y ∈ L : Phi(y, x) ∈ P·scale(L) } + conj(P)^{-1} x`.
//! Every result is checked against the defining quotient conditions before
//! it is returned.

use crate::arith::{int, rat_int, Rat};
use crate::emat::{self, Vector};
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::ideal::{prime_decomposition, FracIdeal, PrimeIdeal, PrimeKind};
use crate::lattice::{index_ideal, HermLattice};
use crate::local::{is_isotropic, is_modular_at};
use crate::zlinalg::{preimage_lattice, QMat};

/// Checks the standing assumptions for building `P`-neighbours of `L`.
pub fn check_neighbour_preconditions(lattice: &HermLattice, prime: &PrimeIdeal) -> Result<()> {
    let p = prime.p;
    if lattice.rank() < 2 {
        return Err(Error::precondition("neighbours need rank at least 2"));
    }
    if prime.kind == PrimeKind::Ramified && p == 2 {
        return Err(Error::precondition("neighbours at a ramified prime need p odd, got p = 2"));
    }
    if !is_modular_at(lattice, p)? {
        return Err(Error::precondition(format!("L not modular at {p}")));
    }
    if !is_isotropic(lattice.space(), p)? {
        return Err(Error::precondition(format!("space is anisotropic at {p}")));
    }
    Ok(())
}

/// Coordinates of `z` in the `Z`-basis of `ideal`.
fn ideal_coords(ideal: &FracIdeal, z: &FieldElement) -> [Rat; 2] {
    let f = ideal.field();
    let (zu, zv) = f.to_omega(z);
    let [[n, _], [r, s]] = ideal.hnf();
    let den = rat_int(ideal.den());
    let c1 = &zv * &den / rat_int(&s);
    let c0 = (&zu * &den - &c1 * rat_int(&r)) / rat_int(&n);
    [c0, c1]
}

struct Context<'a> {
    lattice: &'a HermLattice,
    prime: &'a PrimeIdeal,
    above: Vec<PrimeIdeal>,
    scale: FracIdeal,
    zbasis: Vec<Vector>,
}

impl<'a> Context<'a> {
    fn new(lattice: &'a HermLattice, prime: &'a PrimeIdeal) -> Self {
        Context {
            lattice,
            prime,
            above: prime_decomposition(lattice.field(), prime.p),
            scale: lattice.scale(),
            zbasis: lattice.zbasis(),
        }
    }

    /// `Phi(x, x) ∈ P conj(P) scale(L)_p` and `Phi(x, L)` generates `scale(L)_p`.
    /// `P conj(P)` is `pO` unless `p` is inert, where it is `p^2 O`; with
    /// `weak` set the first condition is relaxed to `pO` in all cases.
    fn admissible(&self, x: &[FieldElement], weak: bool) -> bool {
        let space = self.lattice.space();
        let target = if weak {
            FracIdeal::rational(self.lattice.field(), &Rat::from_integer(int(self.prime.p as i64))).expect("p > 0")
        } else {
            self.prime.ideal.mul(&self.prime.conj().ideal)
        };
        let q = space.phi(x, x);
        let inner: Vec<FieldElement> = self.zbasis.iter().map(|u| space.phi(x, u)).collect();
        self.above.iter().all(|big_q| {
            let s = big_q.valuation(&self.scale);
            let min_inner = inner.iter().map(|y| big_q.valuation_elem(y)).min().expect("nonempty basis");
            big_q.valuation_elem(&q) >= s + big_q.valuation(&target) && min_inner == s
        })
    }

    /// For inert `p`: corrects `x` with `Phi(x, x) ∈ p scale` to
    /// `x + p c z` with `Phi` in `p^2 scale`, where `z` is a basis vector
    /// pairing with `x` to a generator of the scale.
    fn lift(&self, x: &[FieldElement]) -> Option<Vector> {
        let space = self.lattice.space();
        let f = self.lattice.field();
        let s = self.prime.valuation(&self.scale);
        let z = self.zbasis.iter().find(|u| self.prime.valuation_elem(&space.phi(x, u)) == s)?;
        let p = self.prime.p as i64;
        let pz = emat::scale_vec(&f.from_ints(p, 0), z);
        for a in 0..p {
            for b in 0..p {
                let c = f.from_omega(Rat::from_integer(int(a)), Rat::from_integer(int(b)));
                let y = emat::add_vec(x, &emat::scale_vec(&c, &pz));
                if self.admissible(&y, false) {
                    return Some(y);
                }
            }
        }
        None
    }

    fn build(&self, x: &[FieldElement]) -> Result<HermLattice> {
        let space = self.lattice.space();
        let target = self.prime.ideal.mul(&self.scale);
        let coords: QMat = self
            .zbasis
            .iter()
            .map(|u| ideal_coords(&target, &space.phi(u, x)).to_vec())
            .collect();
        let f = self.lattice.field();
        let mut gens: Vec<Vector> = preimage_lattice(&coords)
            .iter()
            .map(|row| {
                row.iter().zip(&self.zbasis).fold(vec![f.zero(); space.rank()], |acc, (c, u)| {
                    emat::add_vec(&acc, &emat::scale_vec(&f.from_int(c), u))
                })
            })
            .collect();
        for b in self.prime.conj().ideal.inv().zbasis() {
            gens.push(emat::scale_vec(&b, x));
        }
        HermLattice::from_z_vectors(space.clone(), &gens)
    }
}

/// Confirms that `candidate` is a `P`-neighbour of `lattice`.
pub fn verify_neighbour(lattice: &HermLattice, candidate: &HermLattice, prime: &PrimeIdeal) -> Result<()> {
    let fail = |what: &str| Err(Error::verification(format!("{} neighbour check failed: {what}", prime.label())));
    let inter = lattice.intersect(candidate)?;
    let n = Rat::from_integer(int(prime.norm() as i64));
    let conj = prime.conj();
    if lattice.z_index(&inter) != n || !lattice.scale_by_ideal(&prime.ideal).is_sublattice_of(&inter) {
        return fail("L/(L ∩ L') is not O/P");
    }
    if candidate.z_index(&inter) != n || !candidate.scale_by_ideal(&conj.ideal).is_sublattice_of(&inter) {
        return fail("L'/(L ∩ L') is not O/conj(P)");
    }
    let (s, s2) = (lattice.scale(), candidate.scale());
    if prime_decomposition(lattice.field(), prime.p).iter().any(|q| q.valuation(&s) != q.valuation(&s2)) {
        return fail("local scales differ");
    }
    if !is_modular_at(candidate, prime.p)? {
        return fail("L' is not modular");
    }
    if index_ideal(lattice, candidate)? != prime.ideal.div(&conj.ideal) {
        return fail("[L : L'] is not P conj(P)^-1");
    }
    Ok(())
}

/// The neighbour defined by the admissible vector `x ∈ L`.
pub fn neighbour_from_vector(lattice: &HermLattice, prime: &PrimeIdeal, x: &[FieldElement]) -> Result<HermLattice> {
    check_neighbour_preconditions(lattice, prime)?;
    if x.len() != lattice.rank() || !lattice.contains_vector(x) {
        return Err(Error::input("vector does not lie in the lattice"));
    }
    let ctx = Context::new(lattice, prime);
    if !ctx.admissible(x, false) {
        return Err(Error::precondition("vector is not admissible for a neighbour step"));
    }
    let result = ctx.build(x)?;
    verify_neighbour(lattice, &result, prime)?;
    Ok(result)
}

/// Admissible vectors `sum c_k u_k` over the `Z`-basis `u` of `L`, with
/// `0 <= c_k < p`, in lexicographic order of `c`, skipping `P L`. At inert
/// primes a vector that is isotropic only modulo `p` is lifted first.
fn for_each_candidate(ctx: &Context, mut visit: impl FnMut(&Vector) -> Result<bool>) -> Result<()> {
    let p = ctx.prime.p;
    let f = ctx.lattice.field();
    let m = ctx.zbasis.len();
    let pl = ctx.lattice.scale_by_ideal(&ctx.prime.ideal);
    let mut c = vec![0u64; m];
    loop {
        // advance to the next coefficient tuple, last position fastest
        let mut k = m;
        loop {
            if k == 0 {
                return Ok(());
            }
            k -= 1;
            c[k] += 1;
            if c[k] < p {
                break;
            }
            c[k] = 0;
        }
        let x = c.iter().zip(&ctx.zbasis).fold(vec![f.zero(); ctx.lattice.rank()], |acc, (&ck, u)| {
            emat::add_vec(&acc, &emat::scale_vec(&f.from_int(&int(ck as i64)), u))
        });
        if pl.contains_vector(&x) {
            continue;
        }
        let x = if ctx.admissible(&x, false) {
            x
        } else if ctx.prime.kind == PrimeKind::Inert && ctx.admissible(&x, true) {
            match ctx.lift(&x) {
                Some(y) => y,
                None => continue,
            }
        } else {
            continue;
        };
        if visit(&x)? {
            return Ok(());
        }
    }
}

/// First `P`-neighbour in the canonical enumeration that differs from `avoid`.
pub fn neighbour(lattice: &HermLattice, prime: &PrimeIdeal, avoid: Option<&HermLattice>) -> Result<HermLattice> {
    check_neighbour_preconditions(lattice, prime)?;
    let ctx = Context::new(lattice, prime);
    let mut found = None;
    let mut saw_avoided = false;
    for_each_candidate(&ctx, |x| {
        let cand = ctx.build(x)?;
        verify_neighbour(lattice, &cand, prime)?;
        if avoid == Some(&cand) {
            saw_avoided = true;
            return Ok(false);
        }
        found = Some(cand);
        Ok(true)
    })?;
    match found {
        Some(l) => Ok(l),
        None if saw_avoided => Err(Error::precondition(format!(
            "the only {}-neighbour is the lattice to avoid",
            prime.label()
        ))),
        None => Err(Error::precondition(format!("no admissible vector for a {}-neighbour", prime.label()))),
    }
}

/// All distinct `P`-neighbours reachable from the canonical enumeration.
pub fn all_neighbours(lattice: &HermLattice, prime: &PrimeIdeal) -> Result<Vec<HermLattice>> {
    check_neighbour_preconditions(lattice, prime)?;
    let ctx = Context::new(lattice, prime);
    let mut out: Vec<HermLattice> = Vec::new();
    for_each_candidate(&ctx, |x| {
        let cand = ctx.build(x)?;
        verify_neighbour(lattice, &cand, prime)?;
        if !out.contains(&cand) {
            out.push(cand);
        }
        Ok(false)
    })?;
    Ok(out)
}
