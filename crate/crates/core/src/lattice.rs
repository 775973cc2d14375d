//! Hermitian spaces and `O`-lattices inside them.
//!
//! A lattice is stored through its `Z`-module of coordinates: a vector
//! `x = (x_1, ..., x_m)` with `x_k = u_k + v_k omega` has coordinates
//! `(u_1, v_1, ..., u_m, v_m)`, and the lattice keeps the Hermite normal form
//! of a `Z`-basis of these over a common denominator. Equality of lattices
//! is therefore equality of the stored data.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::arith::{gcd_all, rat_int, Int, Rat};
use crate::emat::{self, Matrix, Vector};
use crate::error::{Error, Result};
use crate::field::{FieldElement, QuadField};
use crate::ideal::{coprime_split, different, FracIdeal, PrimeIdeal, PrimeKind};
use crate::zlinalg::{clear_denominators, hnf, rat_det, rat_inverse, rat_matmul, transpose, IMat, QMat};

/// A nondegenerate hermitian space `(E^m, Phi)` with
/// `Phi(x, y) = sum_ij x_i G_ij conj(y_j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HermSpace {
    field: QuadField,
    gram: Matrix,
    det: Rat,
    /// `Tr Phi` on the standard `Z`-basis of `O^m`.
    trace_gram: QMat,
}

impl HermSpace {
    pub fn new(field: QuadField, gram: Matrix) -> Result<Self> {
        let m = gram.len();
        if m == 0 || gram.iter().any(|r| r.len() != m) {
            return Err(Error::input("Gram matrix must be square and nonempty"));
        }
        for i in 0..m {
            for j in 0..m {
                if gram[i][j].field() != field {
                    return Err(Error::input("Gram entries belong to a different field"));
                }
                if gram[i][j] != gram[j][i].conj() {
                    return Err(Error::input(format!("Gram matrix is not hermitian at ({}, {})", i + 1, j + 1)));
                }
            }
        }
        let det = emat::det(&gram);
        if det.is_zero() {
            return Err(Error::input("Gram matrix is singular"));
        }
        let det = det.a().clone();
        let basis: Vec<Vector> = (0..2 * m).map(|j| unit_coord_vector(field, m, j)).collect();
        let mut space = HermSpace { field, gram, det, trace_gram: Vec::new() };
        space.trace_gram = basis
            .iter()
            .map(|x| basis.iter().map(|y| space.phi(x, y).trace()).collect())
            .collect();
        Ok(space)
    }

    pub fn field(&self) -> QuadField {
        self.field
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    /// `det(G)`, a nonzero rational.
    pub fn det(&self) -> &Rat {
        &self.det
    }

    pub fn phi(&self, x: &[FieldElement], y: &[FieldElement]) -> FieldElement {
        let mut acc = self.field.zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if !yj.is_zero() && !self.gram[i][j].is_zero() {
                    acc = &acc + &(&(xi * &self.gram[i][j]) * &yj.conj());
                }
            }
        }
        acc
    }

    pub fn gram_of(&self, vectors: &[Vector]) -> Matrix {
        vectors.iter().map(|x| vectors.iter().map(|y| self.phi(x, y)).collect()).collect()
    }

    pub fn to_coords(&self, x: &[FieldElement]) -> Vec<Rat> {
        x.iter()
            .flat_map(|c| {
                let (u, v) = self.field.to_omega(c);
                [u, v]
            })
            .collect()
    }

    pub fn from_coords(&self, c: &[Rat]) -> Vector {
        c.chunks(2).map(|uv| self.field.from_omega(uv[0].clone(), uv[1].clone())).collect()
    }
}

fn unit_coord_vector(field: QuadField, m: usize, j: usize) -> Vector {
    (0..m)
        .map(|k| {
            if k != j / 2 {
                field.zero()
            } else if j.is_multiple_of(2) {
                field.one()
            } else {
                field.omega()
            }
        })
        .collect()
}

/// An `O`-lattice of full rank in a hermitian space.
#[derive(Clone)]
pub struct HermLattice {
    space: Arc<HermSpace>,
    den: Int,
    basis: IMat,
}

impl PartialEq for HermLattice {
    fn eq(&self, other: &Self) -> bool {
        self.den == other.den && self.basis == other.basis && self.space == other.space
    }
}

impl Eq for HermLattice {}

impl fmt::Debug for HermLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HermLattice(1/{} * {:?})", self.den, self.basis)
    }
}

impl HermLattice {
    /// Lattice with the given `Z`-spanning set of coordinate rows; the span
    /// must be an `O`-module of full rank.
    fn from_z_rows(space: Arc<HermSpace>, rows: &QMat) -> Result<Self> {
        let n = 2 * space.rank();
        let (den, m) = clear_denominators(rows);
        let h = hnf(&m);
        if h.len() != n {
            return Err(Error::input("vectors do not span a full-rank lattice"));
        }
        let g = gcd_all(std::iter::once(&den).chain(h.iter().flatten()));
        let basis = h.into_iter().map(|r| r.into_iter().map(|x| x / &g).collect()).collect();
        Ok(HermLattice { space, den: den / &g, basis })
    }

    pub(crate) fn from_z_vectors(space: Arc<HermSpace>, vecs: &[Vector]) -> Result<Self> {
        let rows: QMat = vecs.iter().map(|v| space.to_coords(v)).collect();
        Self::from_z_rows(space, &rows)
    }

    /// `O`-span of the given vectors.
    pub fn from_generators(space: Arc<HermSpace>, vecs: &[Vector]) -> Result<Self> {
        let omega = space.field.omega();
        let mut z = Vec::with_capacity(2 * vecs.len());
        for v in vecs {
            if v.len() != space.rank() {
                return Err(Error::input("vector length does not match the rank"));
            }
            z.push(v.clone());
            z.push(emat::scale_vec(&omega, v));
        }
        Self::from_z_vectors(space, &z)
    }

    /// `sum_i A_i v_i`.
    pub fn from_pseudo_basis(space: Arc<HermSpace>, pb: &[(FracIdeal, Vector)]) -> Result<Self> {
        if pb.len() != space.rank() {
            return Err(Error::input("pseudo-basis must have exactly rank many entries"));
        }
        let mut z = Vec::new();
        for (ideal, v) in pb {
            if v.len() != space.rank() {
                return Err(Error::input("vector length does not match the rank"));
            }
            for b in ideal.zbasis() {
                z.push(emat::scale_vec(&b, v));
            }
        }
        Self::from_z_vectors(space, &z)
    }

    /// `O^m` with the standard basis.
    pub fn free(space: Arc<HermSpace>) -> Self {
        let m = space.rank();
        let f = space.field;
        let vecs: Vec<Vector> = (0..m).map(|i| unit_coord_vector(f, m, 2 * i)).collect();
        Self::from_generators(space, &vecs).expect("standard basis")
    }

    pub fn space(&self) -> &Arc<HermSpace> {
        &self.space
    }

    pub fn field(&self) -> QuadField {
        self.space.field
    }

    pub fn rank(&self) -> usize {
        self.space.rank()
    }

    /// Canonical `(den, HNF)` data; two lattices in one space are equal iff these agree.
    pub fn canonical_data(&self) -> (&Int, &IMat) {
        (&self.den, &self.basis)
    }

    pub fn zbasis_coords(&self) -> QMat {
        let d = rat_int(&self.den);
        self.basis.iter().map(|r| r.iter().map(|x| rat_int(x) / &d).collect()).collect()
    }

    pub fn zbasis(&self) -> Vec<Vector> {
        self.zbasis_coords().iter().map(|c| self.space.from_coords(c)).collect()
    }

    fn same_space(&self, other: &HermLattice) -> Result<()> {
        if self.space != other.space {
            return Err(Error::input("lattices live in different spaces"));
        }
        Ok(())
    }

    pub fn contains_vector(&self, x: &[FieldElement]) -> bool {
        let c = self.space.to_coords(x);
        // solve c = y * B / den for y, with B in row HNF (upper triangular)
        let d = rat_int(&self.den);
        let mut rest: Vec<Rat> = c.iter().map(|x| x * &d).collect();
        let mut row = 0;
        for col in 0..rest.len() {
            if row < self.basis.len() && !self.basis[row][col].is_zero() {
                let y = &rest[col] / rat_int(&self.basis[row][col]);
                if !y.is_integer() {
                    return false;
                }
                for (k, b) in self.basis[row].iter().enumerate() {
                    rest[k] -= &y * rat_int(b);
                }
                row += 1;
            } else if !rest[col].is_zero() {
                return false;
            }
        }
        rest.iter().all(|x| x.is_zero())
    }

    /// Group index `[self : sub]` of the underlying `Z`-modules; a proper
    /// fraction when `sub` is larger.
    pub fn z_index(&self, sub: &HermLattice) -> Rat {
        let num: Rat = rat_det(&sub.zbasis_coords());
        let den: Rat = rat_det(&self.zbasis_coords());
        (num / den).abs()
    }

    /// `self ⊆ other`.
    pub fn is_sublattice_of(&self, other: &HermLattice) -> bool {
        self.zbasis().iter().all(|x| other.contains_vector(x))
    }

    pub fn sum(&self, other: &HermLattice) -> Result<HermLattice> {
        self.same_space(other)?;
        let mut rows = self.zbasis_coords();
        rows.extend(other.zbasis_coords());
        Self::from_z_rows(self.space.clone(), &rows)
    }

    pub fn intersect(&self, other: &HermLattice) -> Result<HermLattice> {
        self.same_space(other)?;
        let mut rows = dot_dual(&self.zbasis_coords());
        rows.extend(dot_dual(&other.zbasis_coords()));
        let (den, m) = clear_denominators(&rows);
        let h: QMat = hnf(&m).iter().map(|r| r.iter().map(|x| Rat::new(x.clone(), den.clone())).collect()).collect();
        Self::from_z_rows(self.space.clone(), &dot_dual(&h))
    }

    /// `I * L`.
    pub fn scale_by_ideal(&self, ideal: &FracIdeal) -> HermLattice {
        let mut z = Vec::new();
        for u in self.zbasis() {
            for b in ideal.zbasis() {
                z.push(emat::scale_vec(&b, &u));
            }
        }
        Self::from_z_vectors(self.space.clone(), &z).expect("nonzero ideal")
    }

    /// Image under the row-vector map `y -> y T`.
    pub fn apply(&self, t: &Matrix) -> Result<HermLattice> {
        let z: Vec<Vector> = self.zbasis().iter().map(|u| emat::vecmul(u, t)).collect();
        Self::from_z_vectors(self.space.clone(), &z)
    }

    pub fn scale(&self) -> FracIdeal {
        let b = self.zbasis();
        let gens: Vec<FieldElement> =
            b.iter().flat_map(|x| b.iter().map(move |y| (x, y))).map(|(x, y)| self.space.phi(x, y)).collect();
        FracIdeal::from_generators(self.field(), &gens).expect("nondegenerate space")
    }

    pub fn norm_ideal(&self) -> FracIdeal {
        let b = self.zbasis();
        let mut gens = Vec::new();
        for (k, x) in b.iter().enumerate() {
            gens.push(self.space.phi(x, x));
            for y in &b[k + 1..] {
                gens.push(self.field().from_rat(self.space.phi(x, y).trace()));
            }
        }
        FracIdeal::from_generators(self.field(), &gens).expect("nondegenerate space")
    }

    /// `L^# = { x : Phi(x, L) ⊆ O }`, the `Z`-dual of `D^{-1} L` under `Tr Phi`.
    pub fn dual(&self) -> HermLattice {
        let w = self.scale_by_ideal(&different(self.field()).inv()).zbasis_coords();
        let m = rat_matmul(&self.space.trace_gram, &transpose(&w));
        let rows = rat_inverse(&m).expect("nondegenerate trace form");
        Self::from_z_rows(self.space.clone(), &rows).expect("dual has full rank")
    }

    /// A pseudo-basis `(A_i, w_i)` with `w_i` unit-triangular:
    /// `w_i[i] = 1` and `w_i[j] = 0` for `j > i`.
    pub fn pseudo_basis(&self) -> Vec<(FracIdeal, Vector)> {
        let f = self.field();
        let m = self.rank();
        let mut active: Vec<(FracIdeal, Vector)> =
            self.zbasis().into_iter().map(|v| (FracIdeal::unit(f), v)).collect();
        let mut out: Vec<(FracIdeal, Vector)> = Vec::with_capacity(m);
        for i in (0..m).rev() {
            let pos = active.iter().position(|(_, v)| !v[i].is_zero()).expect("full rank");
            let (ideal, v) = active.swap_remove(pos);
            let lead = v[i].clone();
            let mut piv_ideal = ideal.scale(&lead);
            let mut piv = emat::scale_vec(&lead.inv().expect("nonzero"), &v);
            let mut rest = Vec::with_capacity(active.len());
            for (j_ideal, y) in active.drain(..) {
                let delta = y[i].clone();
                if delta.is_zero() {
                    rest.push((j_ideal, y));
                    continue;
                }
                let dj = j_ideal.scale(&delta);
                let d = piv_ideal.add(&dj);
                let dinv = d.inv();
                let (e, fe) = coprime_split(&piv_ideal.mul(&dinv), &dj.mul(&dinv)).expect("coprime ideals");
                let new_piv = emat::add_vec(
                    &emat::scale_vec(&e, &piv),
                    &emat::scale_vec(&fe.div(&delta).expect("nonzero"), &y),
                );
                let new_y: Vector = y.iter().zip(&piv).map(|(a, b)| a - &(&delta * b)).collect();
                let new_y_ideal = piv_ideal.mul(&j_ideal).mul(&dinv);
                piv = new_piv;
                piv_ideal = d;
                if new_y.iter().any(|x| !x.is_zero()) {
                    rest.push((new_y_ideal, new_y));
                }
            }
            active = rest;
            out.push((piv_ideal, piv));
        }
        out.reverse();
        out
    }

    /// `O`-ideal generated by all `det(x_1, ..., x_m)` with `x_i ∈ L`.
    pub fn volume(&self) -> FracIdeal {
        let pb = self.pseudo_basis();
        let mut vol = FracIdeal::unit(self.field());
        let vecs: Matrix = pb.iter().map(|(_, v)| v.clone()).collect();
        for (a, _) in &pb {
            vol = vol.mul(a);
        }
        vol.scale(&emat::det(&vecs))
    }

    /// The same ideal computed from all `m`-subsets of a `Z`-basis.
    pub fn volume_from_minors(&self) -> FracIdeal {
        let b = self.zbasis();
        let m = self.rank();
        let mut gens = Vec::new();
        let mut idx: Vec<usize> = (0..m).collect();
        loop {
            let rows: Matrix = idx.iter().map(|&k| b[k].clone()).collect();
            let d = emat::det(&rows);
            if !d.is_zero() {
                gens.push(d);
            }
            // next combination of m out of 2m
            let n = b.len();
            let Some(pos) = (0..m).rev().find(|&k| idx[k] < n - m + k) else { break };
            idx[pos] += 1;
            for k in pos + 1..m {
                idx[k] = idx[k - 1] + 1;
            }
        }
        FracIdeal::from_generators(self.field(), &gens).expect("full rank")
    }

    /// `rho(L) = L + (P^{-1} L ∩ P L^#)`.
    pub fn rho(&self, prime: &PrimeIdeal) -> HermLattice {
        let a = self.scale_by_ideal(&prime.ideal.inv());
        let b = self.dual().scale_by_ideal(&prime.ideal);
        self.sum(&a.intersect(&b).expect("same space")).expect("same space")
    }

    /// Pseudo-basis vectors rescaled by local generators of their ideals
    /// at `p`: an `O_p`-basis of `L_p`.
    pub fn local_basis(&self, p: u64) -> Vec<Vector> {
        self.pseudo_basis()
            .into_iter()
            .map(|(a, v)| emat::scale_vec(&crate::ideal::local_generator(&a, p), &v))
            .collect()
    }
}

/// Rows of `(W^T)^{-1}`: the dual basis under the standard dot product.
fn dot_dual(w: &QMat) -> QMat {
    rat_inverse(&transpose(w)).expect("full-rank module")
}

/// `[L : M]_O = vol(M) vol(L)^{-1}`.
pub fn index_ideal(l: &HermLattice, m: &HermLattice) -> Result<FracIdeal> {
    l.same_space(m)?;
    Ok(m.volume().div(&l.volume()))
}

/// Quasi-reflection `y -> y + (delta - 1) Phi(y, x) / Phi(x, x) * x` as a
/// matrix acting on row vectors.
pub fn quasi_reflection(space: &HermSpace, x: &[FieldElement], delta: &FieldElement) -> Result<Matrix> {
    let f = space.field();
    if !delta.norm().is_one() {
        return Err(Error::precondition("quasi-reflection needs a norm-one scalar"));
    }
    let q = space.phi(x, x);
    if q.is_zero() {
        return Err(Error::precondition("quasi-reflection needs an anisotropic vector"));
    }
    let c = (delta - &f.one()).div(&q)?;
    let m = space.rank();
    // column G conj(x)^T
    let col: Vector = (0..m)
        .map(|i| (0..m).fold(f.zero(), |acc, j| &acc + &(&space.gram[i][j] * &x[j].conj())))
        .collect();
    let mut t = emat::identity(f, m);
    for i in 0..m {
        for j in 0..m {
            t[i][j] = &t[i][j] + &(&c * &(&col[i] * &x[j]));
        }
    }
    Ok(t)
}

/// Global element with valuation one at the ramified prime `P` used for `H(i)`:
/// `sqrt(d)` except for `p = 2`, `d = 3 mod 4`, where it is `1 + sqrt(d)`.
pub fn ramified_uniformizer(prime: &PrimeIdeal) -> Result<FieldElement> {
    if prime.kind != PrimeKind::Ramified {
        return Err(Error::precondition(format!("{} is not ramified", prime.label())));
    }
    let f = prime.field();
    let pi = if prime.p == 2 && f.d().rem_euclid(4) == 3 { f.from_ints(1, 1) } else { f.sqrt_d() };
    debug_assert_eq!(prime.valuation_elem(&pi), 1);
    Ok(pi)
}

/// Free lattice of rank `2r` with Gram `diag([[0, pi^i], [conj(pi)^i, 0]], ...)`.
pub fn build_h_lattice(field: QuadField, prime: &PrimeIdeal, i: i64, copies: usize) -> Result<HermLattice> {
    if copies == 0 {
        return Err(Error::input("need at least one hyperbolic block"));
    }
    let pi = ramified_uniformizer(prime)?.pow(i)?;
    let m = 2 * copies;
    let mut gram = vec![vec![field.zero(); m]; m];
    for k in 0..copies {
        gram[2 * k][2 * k + 1] = pi.clone();
        gram[2 * k + 1][2 * k] = pi.conj();
    }
    let space = Arc::new(HermSpace::new(field, gram)?);
    Ok(HermLattice::free(space))
}

/// Diagonal Gram space with rational entries.
pub fn diagonal_space(field: QuadField, entries: &[Rat]) -> Result<Arc<HermSpace>> {
    let m = entries.len();
    let gram = (0..m)
        .map(|i| (0..m).map(|j| if i == j { field.from_rat(entries[i].clone()) } else { field.zero() }).collect())
        .collect();
    Ok(Arc::new(HermSpace::new(field, gram)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::ideal::prime_decomposition;

    fn example() -> HermLattice {
        let f = QuadField::new(-17).unwrap();
        let gram = vec![vec![f.from_ints(102, 0), f.from_ints(0, 1)], vec![f.from_ints(0, -1), f.zero()]];
        HermLattice::free(Arc::new(HermSpace::new(f, gram).unwrap()))
    }

    #[test]
    fn space_validation() {
        let f = QuadField::new(-17).unwrap();
        let bad = vec![vec![f.one(), f.from_ints(0, 1)], vec![f.from_ints(0, 1), f.one()]];
        assert!(HermSpace::new(f, bad).is_err());
        let sing = vec![vec![f.one(), f.one()], vec![f.one(), f.one()]];
        assert!(HermSpace::new(f, sing).is_err());
    }

    #[test]
    fn example_scale_norm_dual() {
        let l = example();
        let f = l.field();
        let p17 = prime_decomposition(f, 17).remove(0);
        assert_eq!(l.scale(), p17.ideal);
        assert_eq!(l.norm_ideal(), FracIdeal::rational(f, &rat(34, 1)).unwrap());
        let d = l.dual();
        assert_eq!(d.scale(), p17.ideal.inv());
        assert_eq!(d.dual(), l);
        assert_eq!(d.scale_by_ideal(&p17.ideal), l);
    }

    #[test]
    fn free_identity_is_self_dual() {
        let f = QuadField::new(-5).unwrap();
        let l = HermLattice::free(diagonal_space(f, &[rat(1, 1), rat(1, 1), rat(1, 1)]).unwrap());
        assert_eq!(l.dual(), l);
        assert!(l.scale().is_unit_ideal());
        assert!(l.norm_ideal().is_unit_ideal());
    }

    #[test]
    fn sums_intersections_and_containment() {
        let l = example();
        let f = l.field();
        let p3 = prime_decomposition(f, 3);
        let m = l.scale_by_ideal(&p3[0].ideal);
        assert_eq!(l.sum(&l).unwrap(), l);
        assert_eq!(l.intersect(&l).unwrap(), l);
        assert_eq!(l.sum(&m).unwrap(), l);
        assert_eq!(l.intersect(&m).unwrap(), m);
        assert!(m.is_sublattice_of(&l));
        assert!(!l.is_sublattice_of(&m));
        let one = p3[0].ideal.mul(&p3[0].ideal.inv());
        assert_eq!(l.scale_by_ideal(&one), l);
    }

    #[test]
    fn pseudo_basis_round_trip() {
        let l = example();
        let f = l.field();
        let p3 = prime_decomposition(f, 3);
        let pb = vec![
            (p3[0].ideal.clone(), vec![f.from_ints(1, 0), f.from_ints(2, 1)]),
            (p3[1].ideal.inv(), vec![f.zero(), f.from_ints(1, 0)]),
        ];
        let m = HermLattice::from_pseudo_basis(l.space().clone(), &pb).unwrap();
        let back = m.pseudo_basis();
        for (i, (_, v)) in back.iter().enumerate() {
            assert_eq!(v[i], f.one());
            for x in &v[i + 1..] {
                assert!(x.is_zero());
            }
        }
        assert_eq!(HermLattice::from_pseudo_basis(l.space().clone(), &back).unwrap(), m);
        assert_eq!(m.volume(), m.volume_from_minors());
        assert_eq!(index_ideal(&l, &m).unwrap(), p3[0].ideal.div(&p3[1].ideal));
    }

    #[test]
    fn quasi_reflection_properties() {
        let l = example();
        let f = l.field();
        let s = l.space();
        let x = vec![f.from_ints(1, 0), f.from_ints(3, 1)];
        let delta = f.from_ints(-1, 0);
        let t = quasi_reflection(s, &x, &delta).unwrap();
        assert_eq!(emat::det(&t), delta);
        assert_eq!(emat::vecmul(&x, &t), emat::scale_vec(&delta, &x));
        assert_eq!(quasi_reflection(s, &x, &f.one()).unwrap(), emat::identity(f, 2));
        // unitary: T G T^* = G
        let tg = emat::matmul(&emat::matmul(&t, s.gram()), &emat::conj_transpose(&t));
        assert_eq!(&tg, s.gram());
        assert!(quasi_reflection(s, &x, &f.from_ints(2, 0)).is_err());
        assert!(quasi_reflection(s, &[f.zero(), f.one()], &delta).is_err());
    }

    #[test]
    fn h_lattice_grams() {
        let f = QuadField::new(-17).unwrap();
        let p17 = prime_decomposition(f, 17).remove(0);
        let h = build_h_lattice(f, &p17, 1, 1).unwrap();
        assert_eq!(h.space().gram()[0][1], f.sqrt_d());
        assert_eq!(h.space().gram()[1][0], -f.sqrt_d());
        let p2 = prime_decomposition(f, 2).remove(0);
        let h = build_h_lattice(f, &p2, 0, 1).unwrap();
        assert_eq!(h.space().gram()[0][1], f.one());
        let f2 = QuadField::new(-2).unwrap();
        let q2 = prime_decomposition(f2, 2).remove(0);
        let h = build_h_lattice(f2, &q2, 1, 1).unwrap();
        assert_eq!(h.space().gram()[0][1], f2.sqrt_d());
        let p3 = prime_decomposition(f, 3).remove(0);
        assert!(build_h_lattice(f, &p3, 0, 1).is_err());
    }
}
