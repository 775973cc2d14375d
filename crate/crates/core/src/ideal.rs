//! Fractional ideals of the ring of integers `O`, prime decomposition,
//! valuations, the different, and principality testing.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{gcd_all, int, lcm_all, prime_divisors, rat_int, round_rat, vp_int, Int, Rat};
use crate::error::{Error, Result};
use crate::field::{FieldElement, QuadField};
use crate::zlinalg::{hnf, hnf_with_transform};

/// Valuation of zero.
pub const INFINITE_VALUATION: i64 = i64::MAX / 4;

/// A nonzero fractional ideal `I` stored as `den * I = Z n + Z (r + s omega)`.
///
/// The representation is canonical: `s | n`, `0 <= r < n` and
/// `gcd(den, n, r, s) = 1`, so equality of ideals is equality of values.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FracIdeal {
    field: QuadField,
    den: Int,
    n: Int,
    r: Int,
    s: Int,
}

impl FracIdeal {
    /// Smallest fractional ideal containing all `gens`.
    pub fn from_generators(field: QuadField, gens: &[FieldElement]) -> Result<Self> {
        let omega = field.omega();
        let mut zgens = Vec::with_capacity(2 * gens.len());
        for g in gens {
            zgens.push(g.clone());
            zgens.push(g * &omega);
        }
        Self::from_z_span(field, &zgens)
    }

    /// Fractional ideal with the given `Z`-span; the span must be an `O`-module.
    fn from_z_span(field: QuadField, zgens: &[FieldElement]) -> Result<Self> {
        let coords: Vec<(Rat, Rat)> = zgens.iter().map(|g| field.to_omega(g)).collect();
        let den = lcm_all(coords.iter().flat_map(|(u, v)| [u.denom(), v.denom()]));
        let scale = Rat::from_integer(den.clone());
        // omega coefficient first so that the pivot rows read (s, r), (0, n)
        let rows: Vec<Vec<Int>> = coords
            .iter()
            .map(|(u, v)| vec![(v * &scale).to_integer(), (u * &scale).to_integer()])
            .collect();
        let h = hnf(&rows);
        if h.len() != 2 || h[0][0].is_zero() {
            return Err(Error::input("ideal generators must not all be zero"));
        }
        let (s, r, n) = (h[0][0].clone(), h[0][1].clone(), h[1][1].clone());
        let g = gcd_all([&den, &n, &r, &s]);
        Ok(FracIdeal { field, den: den / &g, n: n / &g, r: r / &g, s: s / &g })
    }

    pub fn unit(field: QuadField) -> Self {
        FracIdeal { field, den: Int::one(), n: Int::one(), r: Int::zero(), s: Int::one() }
    }

    pub fn principal(x: &FieldElement) -> Result<Self> {
        Self::from_generators(x.field(), std::slice::from_ref(x))
    }

    pub fn rational(field: QuadField, q: &Rat) -> Result<Self> {
        Self::principal(&field.from_rat(q.clone()))
    }

    pub fn field(&self) -> QuadField {
        self.field
    }

    pub fn den(&self) -> &Int {
        &self.den
    }

    /// `[[n, 0], [r, s]]`.
    pub fn hnf(&self) -> [[Int; 2]; 2] {
        [[self.n.clone(), Int::zero()], [self.r.clone(), self.s.clone()]]
    }

    /// `Z`-basis `{ n / den, (r + s omega) / den }`.
    pub fn zbasis(&self) -> [FieldElement; 2] {
        let f = self.field;
        let dr = Rat::from_integer(self.den.clone());
        [
            f.from_omega(rat_int(&self.n) / &dr, Rat::zero()),
            f.from_omega(rat_int(&self.r) / &dr, rat_int(&self.s) / &dr),
        ]
    }

    pub fn norm(&self) -> Rat {
        Rat::new(&self.n * &self.s, &self.den * &self.den)
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.den.is_one() && self.n.is_one() && self.s.is_one()
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    pub fn mul(&self, other: &FracIdeal) -> FracIdeal {
        let mut gens = Vec::with_capacity(4);
        for x in self.zbasis() {
            for y in other.zbasis() {
                gens.push(&x * &y);
            }
        }
        Self::from_z_span(self.field, &gens).expect("product of nonzero ideals")
    }

    pub fn conj(&self) -> FracIdeal {
        let gens: Vec<_> = self.zbasis().iter().map(|x| x.conj()).collect();
        Self::from_z_span(self.field, &gens).expect("conjugate of a nonzero ideal")
    }

    pub fn inv(&self) -> FracIdeal {
        let c = self.conj();
        let nr = self.norm().recip();
        c.scale(&self.field.from_rat(nr))
    }

    pub fn div(&self, other: &FracIdeal) -> FracIdeal {
        self.mul(&other.inv())
    }

    pub fn pow(&self, k: i64) -> FracIdeal {
        let base = if k < 0 { self.inv() } else { self.clone() };
        let mut acc = FracIdeal::unit(self.field);
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// `x * I` for nonzero `x`.
    pub fn scale(&self, x: &FieldElement) -> FracIdeal {
        let gens: Vec<_> = self.zbasis().iter().map(|b| b * x).collect();
        Self::from_z_span(self.field, &gens).expect("nonzero scalar")
    }

    pub fn add(&self, other: &FracIdeal) -> FracIdeal {
        let mut gens = self.zbasis().to_vec();
        gens.extend(other.zbasis());
        Self::from_z_span(self.field, &gens).expect("sum of nonzero ideals")
    }

    pub fn contains_element(&self, x: &FieldElement) -> bool {
        let (u, v) = self.field.to_omega(x);
        let dr = Rat::from_integer(self.den.clone());
        let (u, v) = (u * &dr, v * &dr);
        // x*den = a * n + b * (r + s omega)
        let b = v / rat_int(&self.s);
        if !b.is_integer() {
            return false;
        }
        let a = (u - &b * rat_int(&self.r)) / rat_int(&self.n);
        a.is_integer()
    }

    /// `other ⊆ self`.
    pub fn contains(&self, other: &FracIdeal) -> bool {
        other.zbasis().iter().all(|x| self.contains_element(x))
    }

    /// Prime factorization, primes in canonical order.
    pub fn factor(&self) -> Vec<(PrimeIdeal, i64)> {
        let nr = self.norm();
        let mut ps = prime_divisors(nr.numer());
        ps.extend(prime_divisors(nr.denom()));
        ps.sort_unstable();
        ps.dedup();
        let mut out = Vec::new();
        for p in ps {
            for pr in prime_decomposition(self.field, p) {
                let v = pr.valuation(self);
                if v != 0 {
                    out.push((pr, v));
                }
            }
        }
        out
    }

    /// Generator if principal: Gauss-reduce `den * I` under the norm form and
    /// compare the shortest vector's norm with the ideal norm.
    pub fn is_principal(&self) -> Option<FieldElement> {
        let f = self.field;
        let mut b1 = f.from_int(&self.n);
        let mut b2 = f.from_omega(rat_int(&self.r), rat_int(&self.s));
        loop {
            if b1.norm() > b2.norm() {
                std::mem::swap(&mut b1, &mut b2);
            }
            let inner = (&b1 * &b2.conj()).a().clone();
            let mu = round_rat(&(inner / b1.norm()));
            b2 = &b2 - &(&f.from_int(&mu) * &b1);
            if b2.norm() >= b1.norm() {
                break;
            }
        }
        let target = Rat::from_integer(&self.n * &self.s);
        if b1.norm() == target {
            Some(b1.scale(&Rat::new(Int::one(), self.den.clone())))
        } else {
            None
        }
    }

    /// Sort key matching the canonical ordering of ideals.
    pub fn canonical_key(&self) -> (Int, Int, Int, Int) {
        (self.den.clone(), self.n.clone(), self.s.clone(), self.r.clone())
    }
}

impl fmt::Debug for FracIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FracIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body = format!("<{}, {} + {}*w>", self.n, self.r, self.s);
        if self.den.is_one() {
            write!(f, "{body}")
        } else {
            write!(f, "(1/{}){body}", self.den)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrimeKind {
    Split,
    Inert,
    Ramified,
}

impl PrimeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            PrimeKind::Split => "split",
            PrimeKind::Inert => "inert",
            PrimeKind::Ramified => "ramified",
        }
    }
}

/// A maximal ideal of `O` above the rational prime `p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrimeIdeal {
    pub p: u64,
    pub kind: PrimeKind,
    /// 0 or 1; distinguishes the two conjugate primes above a split `p`.
    pub index: u8,
    pub ideal: FracIdeal,
    pub residue_degree: u32,
    /// `omega mod P` for primes of degree one.
    omega_residue: Option<u64>,
}

impl PrimeIdeal {
    pub fn ramification_index(&self) -> i64 {
        if self.kind == PrimeKind::Ramified {
            2
        } else {
            1
        }
    }

    pub fn norm(&self) -> u64 {
        self.p.pow(self.residue_degree)
    }

    pub fn field(&self) -> QuadField {
        self.ideal.field()
    }

    /// The other prime above `p` (itself unless split).
    pub fn conj(&self) -> PrimeIdeal {
        if self.kind != PrimeKind::Split {
            return self.clone();
        }
        prime_decomposition(self.field(), self.p)
            .into_iter()
            .find(|q| q.index != self.index)
            .expect("split prime has a conjugate")
    }

    /// An element of `P` that is a unit at the conjugate prime (for split
    /// primes), or a uniformizer-candidate `omega - r` otherwise.
    pub fn local_separator(&self) -> FieldElement {
        let f = self.field();
        match self.omega_residue {
            Some(r) => &f.omega() - &f.from_ints(r as i64, 0),
            None => f.from_ints(self.p as i64, 0),
        }
    }

    /// `v_P(x)`; zero maps to [`INFINITE_VALUATION`].
    pub fn valuation_elem(&self, x: &FieldElement) -> i64 {
        if x.is_zero() {
            return INFINITE_VALUATION;
        }
        let f = self.field();
        let (u, v) = f.to_omega(x);
        let den = u.denom().lcm(v.denom());
        let ui = (&u * Rat::from_integer(den.clone())).to_integer();
        let vi = (&v * Rat::from_integer(den.clone())).to_integer();
        let c = ui.gcd(&vi);
        let (up, vp) = (&ui / &c, &vi / &c);
        let e = self.ramification_index();
        let base = e * (vp_int(&c, self.p) - vp_int(&den, self.p));
        let prim = match self.kind {
            PrimeKind::Inert => 0,
            PrimeKind::Ramified | PrimeKind::Split => {
                let r = int(self.omega_residue.expect("degree one prime") as i64);
                let pp = int(self.p as i64);
                if (&up + &vp * &r).is_multiple_of(&pp) {
                    let (t, n0) = f.omega_relation();
                    let nr = &up * &up + int(t) * &up * &vp - int(n0) * &vp * &vp;
                    vp_int(&nr, self.p)
                } else {
                    0
                }
            }
        };
        base + prim
    }

    /// `v_P(I)`.
    pub fn valuation(&self, ideal: &FracIdeal) -> i64 {
        ideal.zbasis().iter().map(|b| self.valuation_elem(b)).min().expect("two basis elements")
    }

    pub fn label(&self) -> String {
        match self.kind {
            PrimeKind::Split => format!("P{}_{}", self.p, self.index),
            _ => format!("P{}", self.p),
        }
    }
}

impl PartialOrd for PrimeIdeal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PrimeIdeal {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.p, self.index).cmp(&(other.p, other.index))
    }
}

/// Primes of `O` above `p` (Kummer–Dedekind on the minimal polynomial of
/// `omega`); split primes come ordered by their canonical HNF.
pub fn prime_decomposition(field: QuadField, p: u64) -> Vec<PrimeIdeal> {
    let (t, n0) = field.omega_relation();
    let pi = p as i64;
    let roots: Vec<u64> =
        (0..p).filter(|&x| { let x = x as i64; (x * x - t * x - n0).rem_euclid(pi) == 0 }).collect();
    let make = |r: u64| -> FracIdeal {
        let gens = [field.from_ints(pi, 0), &field.omega() - &field.from_ints(r as i64, 0)];
        FracIdeal::from_generators(field, &gens).expect("nonzero generators")
    };
    match roots.len() {
        0 => vec![PrimeIdeal {
            p,
            kind: PrimeKind::Inert,
            index: 0,
            ideal: FracIdeal::from_generators(field, &[field.from_ints(pi, 0)]).unwrap(),
            residue_degree: 2,
            omega_residue: None,
        }],
        1 => vec![PrimeIdeal {
            p,
            kind: PrimeKind::Ramified,
            index: 0,
            ideal: make(roots[0]),
            residue_degree: 1,
            omega_residue: Some(roots[0]),
        }],
        _ => {
            // (p, omega - r) has HNF row (r', 1) with r' = -r mod p
            let mut rs = roots.clone();
            rs.sort_by_key(|&r| (p - r) % p);
            let double = {
                // p = 2 with a double root shows up as one root; guard anyway
                let disc = field.disc();
                disc.rem_euclid(pi) == 0
            };
            let kind = if double { PrimeKind::Ramified } else { PrimeKind::Split };
            debug_assert_eq!(kind, PrimeKind::Split);
            rs.iter()
                .enumerate()
                .map(|(i, &r)| PrimeIdeal {
                    p,
                    kind,
                    index: i as u8,
                    ideal: make(r),
                    residue_degree: 1,
                    omega_residue: Some(r),
                })
                .collect()
        }
    }
}

/// The different `(sqrt(disc))`.
pub fn different(field: QuadField) -> FracIdeal {
    let root = match field.omega_kind() {
        crate::field::OmegaKind::HalfSqrt => field.sqrt_d(),
        crate::field::OmegaKind::Sqrt => field.from_ints(0, 2),
    };
    FracIdeal::principal(&root).expect("nonzero")
}

/// Ramified primes, ascending.
pub fn ramified_primes(field: QuadField) -> Vec<PrimeIdeal> {
    prime_divisors(&int(field.disc()))
        .into_iter()
        .map(|p| prime_decomposition(field, p).remove(0))
        .collect()
}

/// An element `g` of `I` with `v_Q(g) = v_Q(I)` for every prime `Q` above `p`.
pub fn local_generator(ideal: &FracIdeal, p: u64) -> FieldElement {
    let primes = prime_decomposition(ideal.field(), p);
    let basis = ideal.zbasis();
    let best = |q: &PrimeIdeal| -> FieldElement {
        basis.iter().min_by_key(|b| q.valuation_elem(b)).cloned().expect("basis")
    };
    if primes.len() == 1 {
        return best(&primes[0]);
    }
    let (pa, pb) = (&primes[0], &primes[1]);
    let (va, vb) = (pa.valuation(ideal), pb.valuation(ideal));
    let a = best(pa);
    if pb.valuation_elem(&a) == vb {
        return a;
    }
    let b = best(pb);
    if pa.valuation_elem(&b) == va {
        return b;
    }
    let g = &a + &(&pa.local_separator() * &b);
    debug_assert!(pa.valuation_elem(&g) == va && pb.valuation_elem(&g) == vb);
    g
}

/// For integral ideals with `X + Y = O`, elements `e ∈ X`, `f ∈ Y` with `e + f = 1`.
pub fn coprime_split(x: &FracIdeal, y: &FracIdeal) -> Option<(FieldElement, FieldElement)> {
    let field = x.field();
    let gens: Vec<FieldElement> = x.zbasis().into_iter().chain(y.zbasis()).collect();
    let rows: Vec<Vec<Int>> = gens
        .iter()
        .map(|g| {
            let (u, v) = field.to_omega(g);
            if !u.is_integer() || !v.is_integer() {
                return None;
            }
            Some(vec![u.to_integer(), v.to_integer()])
        })
        .collect::<Option<_>>()?;
    let (h, t) = hnf_with_transform(&rows);
    if !(h[0][0].is_one() && h[0][1].is_zero()) {
        return None;
    }
    let combo = |range: std::ops::Range<usize>| {
        range.fold(field.zero(), |acc, k| &acc + &gens[k].scale(&rat_int(&t[0][k])))
    };
    let (e, f) = (combo(0..2), combo(2..4));
    debug_assert!((&e + &f) == field.one());
    Some((e, f))
}

/// Convert small integers for reporting; panics beyond `i64`.
pub fn to_i64(x: &Int) -> i64 {
    x.to_i64().expect("value exceeds i64")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn f17() -> QuadField {
        QuadField::new(-17).unwrap()
    }

    #[test]
    fn generators_examples() {
        let f = f17();
        let p17 = FracIdeal::from_generators(f, &[f.sqrt_d()]).unwrap();
        assert_eq!(p17.norm(), rat(17, 1));
        let p2 = FracIdeal::from_generators(f, &[f.from_ints(2, 0), f.from_ints(1, 1)]).unwrap();
        assert_eq!(p2.norm(), rat(2, 1));
        assert!(FracIdeal::from_generators(f, &[f.one()]).unwrap().is_unit_ideal());
        assert!(FracIdeal::from_generators(f, &[f.zero()]).is_err());
        assert!(FracIdeal::from_generators(f, &[]).is_err());
    }

    #[test]
    fn canonical_form_conditions() {
        for d in [-1, -3, -5, -17, -23] {
            let f = QuadField::new(d).unwrap();
            let i = FracIdeal::from_generators(f, &[f.elem(rat(3, 2), rat(5, 7)), f.from_ints(6, 0)]).unwrap();
            let [[n, _], [r, s]] = i.hnf();
            assert!(n.is_multiple_of(&s));
            assert!(r >= Int::zero() && r < n);
            assert!(gcd_all([i.den(), &n, &r, &s]).is_one());
            // closed under omega
            for b in i.zbasis() {
                assert!(i.contains_element(&(&b * &f.omega())));
            }
        }
    }

    #[test]
    fn products_and_inverses() {
        let f = f17();
        let ps = prime_decomposition(f, 2);
        let p2 = &ps[0].ideal;
        assert_eq!(p2.mul(p2), FracIdeal::rational(f, &rat(2, 1)).unwrap());
        let p3 = prime_decomposition(f, 3)[0].ideal.clone();
        assert!(p3.mul(&p3.inv()).is_unit_ideal());
        let p17 = prime_decomposition(f, 17)[0].ideal.clone();
        assert_eq!(p17.conj(), p17);
    }

    #[test]
    fn decomposition_examples() {
        let f = f17();
        let p2 = prime_decomposition(f, 2);
        assert_eq!(p2.len(), 1);
        assert_eq!(p2[0].kind, PrimeKind::Ramified);
        assert_eq!(p2[0].ideal, FracIdeal::from_generators(f, &[f.from_ints(2, 0), f.from_ints(1, 1)]).unwrap());
        let p3 = prime_decomposition(f, 3);
        assert_eq!(p3.len(), 2);
        assert_eq!(p3[0].kind, PrimeKind::Split);
        assert_eq!(p3[0].ideal, FracIdeal::from_generators(f, &[f.from_ints(3, 0), f.from_ints(1, 1)]).unwrap());
        assert_eq!(p3[1].ideal, p3[0].ideal.conj());
        let p5 = prime_decomposition(f, 5);
        assert_eq!(p5.len(), 1);
        assert_eq!(p5[0].kind, PrimeKind::Inert);
        assert_eq!(p5[0].norm(), 25);
    }

    #[test]
    fn decomposition_products_recover_p() {
        for d in [-1, -2, -3, -5, -7, -15, -17, -23] {
            let f = QuadField::new(d).unwrap();
            for p in [2u64, 3, 5, 7, 11, 13] {
                let primes = prime_decomposition(f, p);
                let mut prod = FracIdeal::unit(f);
                for q in &primes {
                    let e = if q.kind == PrimeKind::Ramified { 2 } else { 1 };
                    prod = prod.mul(&q.ideal.pow(e));
                    assert_eq!(q.ideal.norm(), rat(q.norm() as i64, 1));
                }
                assert_eq!(prod, FracIdeal::rational(f, &rat(p as i64, 1)).unwrap(), "d={d} p={p}");
                let ram = int(f.disc()).is_multiple_of(&int(p as i64));
                assert_eq!(primes[0].kind == PrimeKind::Ramified, ram);
            }
        }
    }

    #[test]
    fn different_examples() {
        let f = f17();
        let p2 = prime_decomposition(f, 2).remove(0).ideal;
        let p17 = prime_decomposition(f, 17).remove(0).ideal;
        assert_eq!(different(f), p2.pow(2).mul(&p17));
        let f5 = QuadField::new(-5).unwrap();
        let q2 = prime_decomposition(f5, 2).remove(0).ideal;
        let q5 = prime_decomposition(f5, 5).remove(0).ideal;
        assert_eq!(different(f5), q2.pow(2).mul(&q5));
        let f1 = QuadField::new(-1).unwrap();
        let r2 = prime_decomposition(f1, 2).remove(0).ideal;
        assert_eq!(different(f1), r2.pow(2));
    }

    #[test]
    fn valuation_examples() {
        let f = f17();
        let p2 = prime_decomposition(f, 2).remove(0);
        let p17 = prime_decomposition(f, 17).remove(0);
        let two = FracIdeal::rational(f, &rat(2, 1)).unwrap();
        assert_eq!(p2.valuation(&two), 2);
        assert_eq!(p2.valuation(&FracIdeal::unit(f)), 0);
        assert_eq!(p17.valuation(&FracIdeal::principal(&f.sqrt_d()).unwrap()), 1);
        assert_eq!(p17.valuation_elem(&f.from_ints(-2, 0)), 0);
        assert_eq!(p2.valuation_elem(&f.from_ints(-2, 0)), 2);
        assert_eq!(p2.valuation_elem(&f.elem(rat(1, 2), rat(0, 1))), -2);
    }

    #[test]
    fn valuations_match_factorization() {
        for d in [-1, -2, -3, -5, -7, -17] {
            let f = QuadField::new(d).unwrap();
            let x = f.elem(rat(12, 7), rat(5, 3));
            let i = FracIdeal::principal(&x).unwrap();
            let mut prod = FracIdeal::unit(f);
            for (q, e) in i.factor() {
                prod = prod.mul(&q.ideal.pow(e));
                assert_eq!(q.valuation_elem(&x), e);
            }
            assert_eq!(prod, i);
        }
    }

    #[test]
    fn principality_examples() {
        let f = f17();
        let p17 = prime_decomposition(f, 17).remove(0).ideal;
        let g = p17.is_principal().unwrap();
        assert_eq!(g.norm(), rat(17, 1));
        assert_eq!(FracIdeal::principal(&g).unwrap(), p17);
        assert!(prime_decomposition(f, 2)[0].ideal.is_principal().is_none());
        let one = FracIdeal::unit(f).is_principal().unwrap();
        assert_eq!(one.norm(), rat(1, 1));
        // fractional principal ideal
        let x = f.elem(rat(3, 4), rat(1, 2));
        let g = FracIdeal::principal(&x).unwrap().is_principal().unwrap();
        assert_eq!(FracIdeal::principal(&g).unwrap(), FracIdeal::principal(&x).unwrap());
    }

    #[test]
    fn local_generators_have_exact_valuations() {
        for d in [-1, -2, -5, -17, -23] {
            let f = QuadField::new(d).unwrap();
            let i = FracIdeal::from_generators(f, &[f.from_ints(36, 0), f.from_ints(6, 6)]).unwrap();
            for p in [2u64, 3, 5, 7] {
                let g = local_generator(&i, p);
                assert!(i.contains_element(&g));
                for q in prime_decomposition(f, p) {
                    assert_eq!(q.valuation_elem(&g), q.valuation(&i));
                }
            }
        }
    }
}
