//! Brute-force determinant classes of binary lattices modulo `P^N`.
//!
//! At a ramified prime, `O_P / P^N` is modelled as `{a + b pi}` with
//! `a mod p^ceil(N/2)` and `b mod p^floor(N/2)`. Every `2 x 2` matrix over
//! this ring that preserves the (rescaled, integral) Gram matrix modulo `P^N`
//! is an automorphism candidate; its determinant is classified by whether
//! `v_P(det - 1) >= e`. Orbit–stabilizer keeps the search linear in the
//! number of admissible first rows: all determinants are
//! `det(Stab(e_1)) * det(g_v)` for one automorphism `g_v` per first row `v`,
//! and rows related by an automorphism already known to have determinant in
//! `E1` share a class, so only one row per such orbit is solved.

use std::collections::{BTreeSet, HashMap};

use num_traits::ToPrimitive;

use crate::arith::{int, rat_mod, Rat};
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::lattice::{ramified_uniformizer, HermLattice};
use crate::local::{DetGroup, LocalData};

/// Upper bound on `|O/P^N|^2`, the number of first rows scanned.
const MAX_FIRST_ROWS: u64 = 50_000_000;

/// How many stabilizer elements and unitary scalars seed the orbit sweep.
const KNOWN_AUTOMORPHISMS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DetClass {
    InE1,
    OutsideE1,
}

/// Verdict of the oracle: `E1` iff every determinant found lies in `E1`.
pub fn oracle_verdict(classes: &BTreeSet<DetClass>) -> DetGroup {
    if classes.contains(&DetClass::OutsideE1) {
        DetGroup::E0
    } else {
        DetGroup::E1
    }
}

type El = (u64, u64);

struct Ring {
    p: u64,
    n: i64,
    qa: u64,
    qb: u64,
    tr: u64,
    nr: u64,
}

fn vp_u64(mut x: u64, p: u64) -> i64 {
    let mut v = 0;
    while x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v
}

impl Ring {
    fn size(&self) -> u64 {
        self.qa * self.qb
    }

    fn elem(&self, i: u64) -> El {
        (i % self.qa, i / self.qa)
    }

    fn canon(&self, a: u64, b: u64) -> El {
        (a % self.qa, b % self.qb.max(1))
    }

    fn add(&self, x: El, y: El) -> El {
        self.canon(x.0 + y.0, x.1 + y.1)
    }

    fn sub(&self, x: El, y: El) -> El {
        self.canon(x.0 + self.qa - y.0, x.1 + self.qa - y.1)
    }

    fn mul(&self, x: El, y: El) -> El {
        let m = self.qa;
        let bd = x.1 * y.1 % m;
        let a = (x.0 * y.0 % m + m - bd * self.nr % m) % m;
        let b = (x.0 * y.1 + x.1 * y.0 + bd * self.tr) % m;
        self.canon(a, b)
    }

    fn conj(&self, x: El) -> El {
        let m = self.qa;
        self.canon((x.0 + x.1 * self.tr) % m, (m - x.1 % m) % m)
    }

    fn val(&self, x: El) -> i64 {
        let va = if x.0 == 0 { i64::MAX } else { 2 * vp_u64(x.0, self.p) };
        let vb = if x.1 == 0 { i64::MAX } else { 2 * vp_u64(x.1, self.p) + 1 };
        va.min(vb).min(self.n)
    }

    fn pow(&self, x: El, mut k: u64) -> El {
        let (mut acc, mut base) = ((1 % self.qa, 0), x);
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    fn unit_inverse(&self, x: El) -> El {
        let order = self.size() - self.size() / self.p;
        self.pow(x, order - 1)
    }
}

struct Search<'a> {
    ring: &'a Ring,
    gram: [[El; 2]; 2],
    /// `z -> z / pi` for `z` of positive valuation.
    div_pi: HashMap<El, El>,
    e: i64,
}

impl Search<'_> {
    fn phi(&self, x: [El; 2], y: [El; 2]) -> El {
        let r = self.ring;
        let mut acc = (0, 0);
        for i in 0..2 {
            for j in 0..2 {
                acc = r.add(acc, r.mul(r.mul(x[i], self.gram[i][j]), r.conj(y[j])));
            }
        }
        acc
    }

    fn div_pi_pow(&self, mut z: El, t: i64) -> El {
        for _ in 0..t {
            z = self.div_pi[&z];
        }
        z
    }

    fn classify(&self, det: El) -> DetClass {
        let r = self.ring;
        if r.val(r.sub(det, (1 % r.qa, 0))) >= self.e {
            DetClass::InE1
        } else {
            DetClass::OutsideE1
        }
    }

    /// Second rows `v2` completing `v1` to an automorphism; the callback
    /// receives `v2` and the determinant and returns `true` to stop.
    fn second_rows(&self, v1: [El; 2], mut visit: impl FnMut([El; 2], El) -> bool) {
        let r = self.ring;
        let n = r.n;
        let w: Vec<El> = (0..2)
            .map(|i| (0..2).fold((0, 0), |acc, j| r.add(acc, r.mul(self.gram[i][j], r.conj(v1[j])))))
            .collect();
        let target = self.gram[1][0];
        let k = if r.val(w[0]) <= r.val(w[1]) { 0 } else { 1 };
        let other = 1 - k;
        let t = r.val(w[k]);
        let lifts: Vec<El> =
            (0..r.size()).map(|i| r.elem(i)).filter(|&z| t >= n || r.val(z) >= n - t).collect();
        let unit_inv = if t < n { Some(r.unit_inverse(self.div_pi_pow(w[k], t))) } else { None };
        for i in 0..r.size() {
            let xo = r.elem(i);
            let rhs = r.sub(target, r.mul(xo, w[other]));
            let base = match unit_inv {
                Some(ui) => {
                    if r.val(rhs) < t {
                        continue;
                    }
                    r.mul(self.div_pi_pow(rhs, t), ui)
                }
                None => {
                    if r.val(rhs) < n {
                        continue;
                    }
                    (0, 0)
                }
            };
            for &z in &lifts {
                let xk = r.add(base, z);
                let mut v2 = [(0, 0); 2];
                v2[k] = xk;
                v2[other] = xo;
                if self.phi(v2, v2) != self.gram[1][1] {
                    continue;
                }
                let det = r.sub(r.mul(v1[0], v2[1]), r.mul(v1[1], v2[0]));
                if r.val(det) != 0 {
                    continue;
                }
                if visit(v2, det) {
                    return;
                }
            }
        }
    }
}

/// Determinant classes of automorphisms of `L_P` modulo `P^N` (rank two,
/// ramified `p`, `N >= e + 2`).
pub fn mod_pn_det_oracle(lattice: &HermLattice, p: u64, n: u32) -> Result<BTreeSet<DetClass>> {
    if lattice.rank() != 2 {
        return Err(Error::precondition("the determinant oracle handles rank two only"));
    }
    let field = lattice.field();
    let ld = LocalData::new(field, p)?;
    if !ld.is_ramified() {
        return Err(Error::precondition(format!("{p} is not ramified")));
    }
    let n = n as i64;
    if n < ld.e + 2 {
        return Err(Error::precondition(format!("oracle depth {n} is below e + 2 = {}", ld.e + 2)));
    }
    let prime = ld.prime().clone();
    let pi = ramified_uniformizer(&prime)?;
    let basis = lattice.local_basis(p);
    let mut gram = lattice.space().gram_of(&basis);
    let min_val = gram.iter().flatten().map(|x| prime.valuation_elem(x)).min().unwrap();
    if min_val < 0 {
        let c = (-min_val + 1) / 2;
        let s = field.from_int(&int(p as i64).pow(c as u32));
        gram = gram.iter().map(|r| r.iter().map(|x| x * &s).collect()).collect();
    }
    let det = &(&gram[0][0] * &gram[1][1]) - &(&gram[0][1] * &gram[1][0]);
    if prime.valuation_elem(&det) >= n {
        return Err(Error::precondition("Gram determinant vanishes modulo P^N; raise the oracle depth"));
    }

    let qa = p.checked_pow(((n + 1) / 2) as u32).ok_or_else(|| Error::precondition("oracle ring too large"))?;
    let qb = p.pow((n / 2) as u32);
    let size = qa * qb;
    if size.checked_mul(size).is_none_or(|s| s > MAX_FIRST_ROWS) {
        return Err(Error::precondition("oracle search space exceeds the desk-scale limit"));
    }
    let qa_int = int(qa as i64);
    let to_u = |x: &Rat| -> u64 { rat_mod(x, &qa_int).expect("p-integral").to_u64().unwrap() };
    let (tr, nr) = (to_u(&pi.trace()), to_u(&pi.norm()));
    let ring = Ring { p, n, qa, qb, tr, nr };
    let shift_one = pi != field.sqrt_d();
    let to_el = |x: &FieldElement| -> El {
        // x = u + v sqrt(d) = (u - v) + v (1 + sqrt(d)) when pi = 1 + sqrt(d)
        let (u, v) = (x.a().clone(), x.b().clone());
        let a = if shift_one { &u - &v } else { u };
        ring.canon(to_u(&a), to_u(&v))
    };
    let g = [[to_el(&gram[0][0]), to_el(&gram[0][1])], [to_el(&gram[1][0]), to_el(&gram[1][1])]];

    let pi_el = ring.canon(0, 1);
    let mut div_pi = HashMap::new();
    for i in 0..size {
        let z = ring.elem(i);
        div_pi.entry(ring.mul(pi_el, z)).or_insert(z);
    }
    let search = Search { ring: &ring, gram: g, div_pi, e: ld.e };

    // Known automorphisms: a few stabilizers of the first basis row and a few
    // unitary scalars. Once all of their determinants lie in E1, every first
    // row in the orbit of a row under them carries the same class.
    let mut classes = BTreeSet::new();
    let mut known: Vec<[[El; 2]; 2]> = Vec::new();
    let e1 = [(1 % qa, 0), (0, 0)];
    search.second_rows(e1, |v2, d| {
        classes.insert(search.classify(d));
        known.push([e1, v2]);
        known.len() >= KNOWN_AUTOMORPHISMS
    });
    let norm_one: Vec<El> = (0..size)
        .map(|i| ring.elem(i))
        .filter(|&l| ring.mul(l, ring.conj(l)) == (1 % qa, 0))
        .take(KNOWN_AUTOMORPHISMS)
        .collect();
    for &l in &norm_one {
        classes.insert(search.classify(ring.mul(l, l)));
        known.push([[l, (0, 0)], [(0, 0), l]]);
    }
    if classes.len() == 2 {
        return Ok(classes);
    }
    let flip = |c: DetClass, d: DetClass| if c == d { DetClass::InE1 } else { DetClass::OutsideE1 };
    let base = *classes.iter().next().expect("the identity completes the first row");

    let index = |v: [El; 2]| -> usize { ((v[0].0 + qa * v[0].1) * size + v[1].0 + qa * v[1].1) as usize };
    let act = |v: [El; 2], h: &[[El; 2]; 2]| -> [El; 2] {
        [
            ring.add(ring.mul(v[0], h[0][0]), ring.mul(v[1], h[1][0])),
            ring.add(ring.mul(v[0], h[0][1]), ring.mul(v[1], h[1][1])),
        ]
    };
    let mut seen = vec![false; (size * size) as usize];
    let mut queue = Vec::new();

    // precomputed pieces of Phi(v, v) = a G00 conj(a) + Tr(a G01 conj(b)) + b G11 conj(b)
    let elems: Vec<El> = (0..size).map(|i| ring.elem(i)).collect();
    let diag0: Vec<El> = elems.iter().map(|&a| ring.mul(ring.mul(a, g[0][0]), ring.conj(a))).collect();
    let diag1: Vec<El> = elems.iter().map(|&b| ring.mul(ring.mul(b, g[1][1]), ring.conj(b))).collect();
    let a_g01: Vec<El> = elems.iter().map(|&a| ring.mul(a, g[0][1])).collect();
    let conjs: Vec<El> = elems.iter().map(|&b| ring.conj(b)).collect();
    for ia in 0..size as usize {
        for ib in 0..size as usize {
            if seen[ia * size as usize + ib] {
                continue;
            }
            let c = ring.mul(a_g01[ia], conjs[ib]);
            let val = ring.add(ring.add(diag0[ia], diag1[ib]), ring.add(c, ring.conj(c)));
            if val != g[0][0] {
                continue;
            }
            let v1 = [elems[ia], elems[ib]];
            if ring.val(v1[0]) > 0 && ring.val(v1[1]) > 0 {
                continue;
            }
            let mut found = None;
            search.second_rows(v1, |_, d| {
                found = Some(d);
                true
            });
            let Some(d) = found else { continue };
            classes.insert(flip(base, search.classify(d)));
            if classes.len() == 2 {
                return Ok(classes);
            }
            seen[index(v1)] = true;
            queue.push(v1);
            while let Some(v) = queue.pop() {
                for h in &known {
                    let w = act(v, h);
                    if !seen[index(w)] {
                        seen[index(w)] = true;
                        queue.push(w);
                    }
                }
            }
        }
    }
    debug_assert!(!classes.is_empty());
    Ok(classes)
}
