//! Local invariants of hermitian lattices at a rational prime `p`: Jordan
//! splittings, the determinant group `E(L_p)`, Hilbert symbols and isotropy.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{int, rat_mod, vp_rat, Int, Rat};
use crate::emat::{Matrix, Vector};
use crate::error::{Error, Result};
use crate::field::{FieldElement, QuadField};
use crate::ideal::{different, prime_decomposition, PrimeIdeal, PrimeKind, INFINITE_VALUATION};
use crate::lattice::{HermLattice, HermSpace};

/// Splitting data of `p` in `E` together with the different exponent.
#[derive(Debug, Clone)]
pub struct LocalData {
    pub p: u64,
    pub kind: PrimeKind,
    /// Primes above `p`; two entries iff `p` splits.
    pub primes: Vec<PrimeIdeal>,
    /// `v_P(D)`.
    pub e: i64,
    pub e_prime: i64,
}

impl LocalData {
    pub fn new(field: QuadField, p: u64) -> Result<Self> {
        if !crate::arith::is_prime(p) {
            return Err(Error::input(format!("{p} is not prime")));
        }
        let primes = prime_decomposition(field, p);
        let kind = primes[0].kind;
        let e = if kind == PrimeKind::Ramified { primes[0].valuation(&different(field)) } else { 0 };
        Ok(LocalData { p, kind, primes, e, e_prime: (e - 1).max(0) })
    }

    pub fn prime(&self) -> &PrimeIdeal {
        &self.primes[0]
    }

    pub fn is_ramified(&self) -> bool {
        self.kind == PrimeKind::Ramified
    }

    /// Valuation at the largest conjugation-stable ideal above `p`
    /// (`pO` when split, otherwise the prime itself).
    pub fn val(&self, x: &FieldElement) -> i64 {
        self.primes.iter().map(|q| q.valuation_elem(x)).min().expect("at least one prime")
    }
}

/// One modular constituent of a Jordan splitting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JordanBlock {
    pub scale_val: i64,
    pub rank: usize,
    pub norm_val: i64,
    pub gram: Matrix,
    pub is_h_type: bool,
}

impl JordanBlock {
    pub fn invariants(&self) -> (i64, usize, i64, bool) {
        (self.scale_val, self.rank, self.norm_val, self.is_h_type)
    }
}

/// Blocks in increasing scale order plus the local basis realizing them.
#[derive(Debug, Clone)]
pub struct JordanDecomposition {
    pub blocks: Vec<JordanBlock>,
    /// `O_p`-basis of `L_p`, grouped block by block.
    pub basis: Vec<Vector>,
}

struct Piece {
    vectors: Vec<Vector>,
    scale_val: i64,
    norm_val: i64,
}

/// Jordan splitting of `L_p` by greedy pivoting on minimal valuations.
pub fn jordan_decomposition(lattice: &HermLattice, p: u64) -> Result<JordanDecomposition> {
    let ld = LocalData::new(lattice.field(), p)?;
    let space = lattice.space();
    let field = lattice.field();
    let mut vecs = lattice.local_basis(p);
    let mut pieces: Vec<Piece> = Vec::new();
    let units = [field.one(), field.omega()];

    while !vecs.is_empty() {
        let g = space.gram_of(&vecs);
        let n = vecs.len();
        let s = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| ld.val(&g[i][j])).min().unwrap();
        let diag = (0..n).find(|&i| ld.val(&g[i][i]) == s);
        let pivot = match diag {
            Some(i) => Some(i),
            None => {
                // a unit multiple of an off-diagonal pair may produce a diagonal entry of valuation s
                let mut found = None;
                'search: for i in 0..n {
                    for j in 0..n {
                        if i == j || ld.val(&g[i][j]) != s {
                            continue;
                        }
                        for gamma in &units {
                            let tr = (&gamma.conj() * &g[i][j]).trace();
                            if !tr.is_zero() && ld.val(&field.from_rat(tr)) == s {
                                let shifted: Vector =
                                    vecs[i].iter().zip(&vecs[j]).map(|(a, b)| a + &(gamma * b)).collect();
                                vecs[i] = shifted;
                                found = Some(i);
                                break 'search;
                            }
                        }
                    }
                }
                found
            }
        };
        let g = space.gram_of(&vecs);
        match pivot {
            Some(i) => {
                let gii_inv = g[i][i].inv()?;
                let v = vecs[i].clone();
                let rest: Vec<Vector> = (0..n)
                    .filter(|&k| k != i)
                    .map(|k| {
                        let c = &g[k][i] * &gii_inv;
                        vecs[k].iter().zip(&v).map(|(a, b)| a - &(&c * b)).collect()
                    })
                    .collect();
                let sv = ld.val(&g[i][i]);
                pieces.push(Piece { vectors: vec![v], scale_val: sv, norm_val: sv });
                vecs = rest;
            }
            None => {
                let (i, j) = (0..n)
                    .flat_map(|i| (0..n).map(move |j| (i, j)))
                    .find(|&(i, j)| i != j && ld.val(&g[i][j]) == s)
                    .ok_or_else(|| Error::verification("Jordan splitting found no pivot"))?;
                let m = vec![vec![g[i][i].clone(), g[i][j].clone()], vec![g[j][i].clone(), g[j][j].clone()]];
                let minv = crate::emat::inverse(&m)?;
                let (vi, vj) = (vecs[i].clone(), vecs[j].clone());
                let rest: Vec<Vector> = (0..n)
                    .filter(|&k| k != i && k != j)
                    .map(|k| {
                        let row = vec![g[k][i].clone(), g[k][j].clone()];
                        let ab = crate::emat::vecmul(&row, &minv);
                        vecs[k]
                            .iter()
                            .zip(vi.iter().zip(&vj))
                            .map(|(x, (a, b))| &(x - &(&ab[0] * a)) - &(&ab[1] * b))
                            .collect()
                    })
                    .collect();
                let tr_val = units
                    .iter()
                    .map(|gamma| (gamma * &g[i][j]).trace())
                    .filter(|t| !t.is_zero())
                    .map(|t| ld.val(&field.from_rat(t)))
                    .min()
                    .unwrap_or(INFINITE_VALUATION);
                let norm_val = ld.val(&g[i][i]).min(ld.val(&g[j][j])).min(tr_val);
                pieces.push(Piece { vectors: vec![vi, vj], scale_val: s, norm_val });
                vecs = rest;
            }
        }
    }

    pieces.sort_by_key(|pc| pc.scale_val);
    let mut blocks: Vec<JordanBlock> = Vec::new();
    let mut basis: Vec<Vector> = Vec::new();
    let mut start = 0;
    while start < pieces.len() {
        let s = pieces[start].scale_val;
        let end = (start..pieces.len()).find(|&k| pieces[k].scale_val != s).unwrap_or(pieces.len());
        let vectors: Vec<Vector> = pieces[start..end].iter().flat_map(|pc| pc.vectors.clone()).collect();
        let norm_val = pieces[start..end].iter().map(|pc| pc.norm_val).min().unwrap();
        let rank = vectors.len();
        let is_h_type = ld.is_ramified()
            && rank.is_multiple_of(2)
            && norm_val == ld.e + s
            && (s - ld.e).rem_euclid(2) == 0;
        blocks.push(JordanBlock { scale_val: s, rank, norm_val, gram: space.gram_of(&vectors), is_h_type });
        basis.extend(vectors);
        start = end;
    }
    Ok(JordanDecomposition { blocks, basis })
}

pub fn is_modular_at(lattice: &HermLattice, p: u64) -> Result<bool> {
    Ok(jordan_decomposition(lattice, p)?.blocks.len() == 1)
}

/// The two possible local determinant groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DetGroup {
    E0,
    E1,
}

impl fmt::Display for DetGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DetGroup::E0 => "E0",
            DetGroup::E1 => "E1",
        })
    }
}

/// `delta ∈ E1`, i.e. `v_P(delta - 1) >= e`, for a norm-one `P`-unit `delta`.
///
/// `delta` need not be globally integral: only its image in the local ring
/// matters.
pub fn is_e1_element(delta: &FieldElement, ld: &LocalData) -> Result<bool> {
    if !ld.is_ramified() {
        return Err(Error::precondition(format!("{} is not ramified", ld.p)));
    }
    if !delta.norm().is_one() {
        return Err(Error::input("E1 test needs an element of norm one"));
    }
    let prime = ld.prime();
    if prime.valuation_elem(delta) != 0 {
        return Err(Error::input("E1 test needs a local unit"));
    }
    let one = delta.field().one();
    Ok(prime.valuation_elem(&(delta - &one)) >= ld.e)
}

/// Determinant group of `L_p`: `E1` exactly for ramified `p`, even rank, and
/// a splitting into `H`-type blocks.
pub fn det_group(lattice: &HermLattice, p: u64) -> Result<DetGroup> {
    let ld = LocalData::new(lattice.field(), p)?;
    if !ld.is_ramified() || !lattice.rank().is_multiple_of(2) {
        return Ok(DetGroup::E0);
    }
    let jd = jordan_decomposition(lattice, p)?;
    Ok(if jd.blocks.iter().all(|b| b.is_h_type) { DetGroup::E1 } else { DetGroup::E0 })
}

fn legendre(a: &Int, p: u64) -> i32 {
    let pp = int(p as i64);
    let a = a.mod_floor(&pp);
    if a.is_zero() {
        return 0;
    }
    let r = a.modpow(&int(((p - 1) / 2) as i64), &pp);
    if r.is_one() {
        1
    } else {
        -1
    }
}

/// Split `x = p^v * u` with `u` a `p`-adic unit, returned modulo `modulus`.
fn unit_part(x: &Rat, p: u64, modulus: &Int) -> (i64, Int) {
    let v = vp_rat(x, p);
    let pv = Rat::from_integer(int(p as i64).pow(v.unsigned_abs() as u32));
    let u = if v >= 0 { x / pv } else { x * pv };
    (v, rat_mod(&u, modulus).expect("unit part is a p-adic unit"))
}

/// Hilbert symbol `(a, b)_p` over `Q_p`.
pub fn hilbert_symbol(a: &Rat, b: &Rat, p: u64) -> Result<i32> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::input("Hilbert symbol of zero"));
    }
    if p == 2 {
        let eight = int(8);
        let (alpha, u) = unit_part(a, 2, &eight);
        let (beta, v) = unit_part(b, 2, &eight);
        let eps = |x: &Int| ((x - int(1)) / int(2)).mod_floor(&int(2)).to_i64().unwrap();
        let omg = |x: &Int| ((x * x - int(1)) / int(8)).mod_floor(&int(2)).to_i64().unwrap();
        let exp = eps(&u) * eps(&v) + alpha * omg(&v) + beta * omg(&u);
        return Ok(if exp.rem_euclid(2) == 0 { 1 } else { -1 });
    }
    let pp = int(p as i64);
    let (alpha, u) = unit_part(a, p, &pp);
    let (beta, v) = unit_part(b, p, &pp);
    let mut s = if (alpha * beta).rem_euclid(2) == 1 && (p % 4 == 3) { -1 } else { 1 };
    if beta.rem_euclid(2) == 1 {
        s *= legendre(&u, p);
    }
    if alpha.rem_euclid(2) == 1 {
        s *= legendre(&v, p);
    }
    Ok(s)
}

/// `(a, b)_infinity`.
pub fn hilbert_symbol_real(a: &Rat, b: &Rat) -> i32 {
    if a.is_negative() && b.is_negative() {
        -1
    } else {
        1
    }
}

/// `a ∈ Nr(E_p^*)`.
pub fn is_local_norm(field: QuadField, a: &Rat, p: u64) -> Result<bool> {
    Ok(hilbert_symbol(&Rat::from_integer(int(field.d())), a, p)? == 1)
}

pub fn is_isotropic(space: &HermSpace, p: u64) -> Result<bool> {
    let ld = LocalData::new(space.field(), p)?;
    match space.rank() {
        r if r >= 3 => Ok(true),
        _ if ld.kind == PrimeKind::Split => Ok(true),
        1 => Ok(false),
        _ => is_local_norm(space.field(), &-space.det().clone(), p),
    }
}

/// Determinant group predicted for a maximal lattice in `space`.
pub fn det_group_maximal_crosscheck(space: &HermSpace, p: u64) -> Result<DetGroup> {
    let ld = LocalData::new(space.field(), p)?;
    if !ld.is_ramified() {
        return Err(Error::precondition(format!("{p} is not ramified")));
    }
    let m = space.rank();
    if !m.is_multiple_of(2) {
        return Ok(DetGroup::E0);
    }
    let sign = if (m / 2).is_multiple_of(2) { Rat::one() } else { -Rat::one() };
    let target = space.det() * sign;
    Ok(if is_local_norm(space.field(), &target, p)? { DetGroup::E1 } else { DetGroup::E0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::lattice::{build_h_lattice, diagonal_space};
    use std::sync::Arc;

    fn example() -> HermLattice {
        let f = QuadField::new(-17).unwrap();
        let gram = vec![vec![f.from_ints(102, 0), f.from_ints(0, 1)], vec![f.from_ints(0, -1), f.zero()]];
        HermLattice::free(Arc::new(HermSpace::new(f, gram).unwrap()))
    }

    #[test]
    fn local_data_examples() {
        let f = QuadField::new(-17).unwrap();
        let l2 = LocalData::new(f, 2).unwrap();
        assert_eq!((l2.kind, l2.e, l2.e_prime), (PrimeKind::Ramified, 2, 1));
        let l17 = LocalData::new(f, 17).unwrap();
        assert_eq!((l17.kind, l17.e), (PrimeKind::Ramified, 1));
        let l3 = LocalData::new(f, 3).unwrap();
        assert_eq!((l3.kind, l3.e, l3.e_prime), (PrimeKind::Split, 0, 0));
        assert_eq!(LocalData::new(QuadField::new(-2).unwrap(), 2).unwrap().e, 3);
        assert!(LocalData::new(f, 4).is_err());
    }

    #[test]
    fn example_jordan() {
        let l = example();
        let b2 = jordan_decomposition(&l, 2).unwrap().blocks;
        assert_eq!(b2.iter().map(|b| b.invariants()).collect::<Vec<_>>(), vec![(0, 2, 2, true)]);
        let b17 = jordan_decomposition(&l, 17).unwrap().blocks;
        assert_eq!(b17.iter().map(|b| b.invariants()).collect::<Vec<_>>(), vec![(1, 2, 2, true)]);
        for p in [2, 3, 17] {
            assert!(is_modular_at(&l, p).unwrap());
        }
        assert_eq!(det_group(&l, 2).unwrap(), DetGroup::E1);
        assert_eq!(det_group(&l, 17).unwrap(), DetGroup::E1);
        assert_eq!(det_group(&l, 3).unwrap(), DetGroup::E0);
    }

    #[test]
    fn diagonal_lattices() {
        let f = QuadField::new(-17).unwrap();
        let l = HermLattice::free(diagonal_space(f, &[rat(1, 1), rat(1, 1), rat(1, 1)]).unwrap());
        let b = jordan_decomposition(&l, 5).unwrap().blocks;
        assert_eq!((b.len(), b[0].scale_val, b[0].rank), (1, 0, 3));
        assert_eq!(det_group(&l, 17).unwrap(), DetGroup::E0);
        let l = HermLattice::free(diagonal_space(f, &[rat(1, 1), rat(3, 1)]).unwrap());
        assert!(!is_modular_at(&l, 3).unwrap());
        let l = HermLattice::free(diagonal_space(f, &[rat(5, 1)]).unwrap());
        assert!(is_modular_at(&l, 5).unwrap());
    }

    #[test]
    fn dyadic_non_modular_binary() {
        let f = QuadField::new(-17).unwrap();
        let gram = vec![vec![f.from_ints(1, 0), f.from_ints(1, 0)], vec![f.from_ints(1, 0), f.from_ints(3, 0)]];
        let l = HermLattice::free(Arc::new(HermSpace::new(f, gram).unwrap()));
        let blocks = jordan_decomposition(&l, 2).unwrap().blocks;
        let det_val: i64 = blocks.iter().map(|b| b.scale_val * b.rank as i64).sum();
        // det = 2 has valuation 2 at the dyadic prime
        assert_eq!(det_val, 2);
        assert_eq!(blocks.len(), 2);
    }

    #[test]
    fn e1_examples() {
        let f = QuadField::new(-17).unwrap();
        let minus_one = f.from_ints(-1, 0);
        assert!(!is_e1_element(&minus_one, &LocalData::new(f, 17).unwrap()).unwrap());
        assert!(is_e1_element(&minus_one, &LocalData::new(f, 2).unwrap()).unwrap());
        assert!(is_e1_element(&f.one(), &LocalData::new(f, 17).unwrap()).unwrap());
        assert!(is_e1_element(&f.from_ints(2, 0), &LocalData::new(f, 17).unwrap()).is_err());
        assert!(is_e1_element(&f.one(), &LocalData::new(f, 3).unwrap()).is_err());
        // u / conj(u) for the 2-adic unit sqrt(-17)
        let u = f.sqrt_d();
        assert!(is_e1_element(&u.div(&u.conj()).unwrap(), &LocalData::new(f, 2).unwrap()).unwrap());
    }

    #[test]
    fn hilbert_examples() {
        assert_eq!(hilbert_symbol(&rat(-1, 1), &rat(-1, 1), 2).unwrap(), -1);
        assert_eq!(hilbert_symbol(&rat(2, 1), &rat(3, 1), 3).unwrap(), -1);
        assert_eq!(hilbert_symbol(&rat(4, 9), &rat(7, 1), 7).unwrap(), 1);
        assert!(hilbert_symbol(&rat(0, 1), &rat(1, 1), 5).is_err());
        let f = QuadField::new(-1).unwrap();
        assert!(is_local_norm(f, &rat(9, 4), 3).unwrap());
    }

    #[test]
    fn hilbert_product_formula() {
        let vals = [-30i64, -17, -12, -7, -3, -2, -1, 1, 2, 3, 5, 6, 10, 17, 34, 45];
        for &a in &vals {
            for &b in &vals {
                let (ra, rb) = (rat(a, 1), rat(b, 1));
                let mut primes: Vec<u64> = crate::arith::prime_divisors(&int(2 * a * b));
                primes.sort_unstable();
                let prod: i32 = primes.iter().map(|&p| hilbert_symbol(&ra, &rb, p).unwrap()).product::<i32>()
                    * hilbert_symbol_real(&ra, &rb);
                assert_eq!(prod, 1, "a={a} b={b}");
            }
        }
    }

    #[test]
    fn isotropy_examples() {
        let l = example();
        assert!(is_isotropic(l.space(), 3).unwrap());
        let f = QuadField::new(-1).unwrap();
        let s = diagonal_space(f, &[rat(1, 1), rat(1, 1)]).unwrap();
        assert!(!is_isotropic(&s, 2).unwrap());
        let s3 = diagonal_space(f, &[rat(1, 1), rat(1, 1), rat(1, 1)]).unwrap();
        assert!(is_isotropic(&s3, 2).unwrap());
        let s1 = diagonal_space(f, &[rat(1, 1)]).unwrap();
        assert!(!is_isotropic(&s1, 2).unwrap());
    }

    #[test]
    fn maximal_crosscheck_examples() {
        let l = example();
        assert_eq!(det_group_maximal_crosscheck(l.space(), 17).unwrap(), DetGroup::E1);
        let f = QuadField::new(-17).unwrap();
        let s = diagonal_space(f, &[rat(1, 1)]).unwrap();
        assert_eq!(det_group_maximal_crosscheck(&s, 17).unwrap(), DetGroup::E0);
        assert!(det_group_maximal_crosscheck(l.space(), 3).is_err());
        let p17 = prime_decomposition(f, 17).remove(0);
        let h = build_h_lattice(f, &p17, 1, 2).unwrap();
        assert_eq!(det_group(&h, 17).unwrap(), DetGroup::E1);
        assert_eq!(det_group_maximal_crosscheck(h.space(), 17).unwrap(), DetGroup::E1);
    }
}
