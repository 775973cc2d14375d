//! Exact linear algebra over `Z` and `Q`: Hermite and Smith normal forms,
//! rational inversion, and preimages of `Z^k` under rational maps.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{lcm_all, Int, Rat};

pub type IMat = Vec<Vec<Int>>;
pub type QMat = Vec<Vec<Rat>>;

pub fn identity(n: usize) -> IMat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Int::one() } else { Int::zero() }).collect())
        .collect()
}

fn row_axpy(dst: &mut [Int], src: &[Int], q: &Int) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d -= q * s;
    }
}

/// Row Hermite normal form with the unimodular transform `U` (`U * A = H`).
///
/// `H` keeps the zero rows at the bottom. Pivots are positive and the
/// entries above each pivot lie in `[0, pivot)`.
pub fn hnf_with_transform(a: &IMat) -> (IMat, IMat) {
    let n = a.len();
    let ncols = a.first().map_or(0, |r| r.len());
    let mut h = a.clone();
    let mut u = identity(n);
    let mut row = 0;
    for col in 0..ncols {
        if row == n {
            break;
        }
        loop {
            let pivot = (row..n)
                .filter(|&i| !h[i][col].is_zero())
                .min_by(|&i, &j| h[i][col].abs().cmp(&h[j][col].abs()));
            let Some(p) = pivot else { break };
            h.swap(row, p);
            u.swap(row, p);
            let mut done = true;
            for i in row + 1..n {
                if h[i][col].is_zero() {
                    continue;
                }
                let q = h[i][col].div_floor(&h[row][col]);
                let (top, rest) = h.split_at_mut(i);
                row_axpy(&mut rest[0], &top[row], &q);
                let (ut, ur) = u.split_at_mut(i);
                row_axpy(&mut ur[0], &ut[row], &q);
                if !h[i][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[row][col].is_zero() {
            continue;
        }
        if h[row][col].is_negative() {
            for x in h[row].iter_mut() {
                *x = -x.clone();
            }
            for x in u[row].iter_mut() {
                *x = -x.clone();
            }
        }
        for i in 0..row {
            let q = h[i][col].div_floor(&h[row][col]);
            if q.is_zero() {
                continue;
            }
            let (top, rest) = h.split_at_mut(row);
            row_axpy(&mut top[i], &rest[0], &q);
            let (ut, ur) = u.split_at_mut(row);
            row_axpy(&mut ut[i], &ur[0], &q);
        }
        row += 1;
    }
    (h, u)
}

/// Nonzero rows of the Hermite normal form.
pub fn hnf(a: &IMat) -> IMat {
    let (h, _) = hnf_with_transform(a);
    h.into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect()
}

/// Smith normal form `D = U * A * V` with unimodular `U`, `V`.
pub fn snf_with_transforms(a: &IMat) -> (IMat, IMat, IMat) {
    let m = a.len();
    let n = a.first().map_or(0, |r| r.len());
    let mut d = a.clone();
    let mut u = identity(m);
    let mut v = identity(n);
    for t in 0..m.min(n) {
        loop {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if d[i][j].is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| d[i][j].abs() < d[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { return (d, u, v) };
            d.swap(t, bi);
            u.swap(t, bi);
            for row in d.iter_mut() {
                row.swap(t, bj);
            }
            for row in v.iter_mut() {
                row.swap(t, bj);
            }
            let mut clean = true;
            for i in t + 1..m {
                if d[i][t].is_zero() {
                    continue;
                }
                let q = d[i][t].div_floor(&d[t][t]);
                let (top, rest) = d.split_at_mut(i);
                row_axpy(&mut rest[0], &top[t], &q);
                let (ut, ur) = u.split_at_mut(i);
                row_axpy(&mut ur[0], &ut[t], &q);
                clean &= d[i][t].is_zero();
            }
            for j in t + 1..n {
                if d[t][j].is_zero() {
                    continue;
                }
                let q = d[t][j].div_floor(&d[t][t]);
                for row in d.iter_mut() {
                    let s = row[t].clone();
                    row[j] -= &q * s;
                }
                for row in v.iter_mut() {
                    let s = row[t].clone();
                    row[j] -= &q * s;
                }
                clean &= d[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            // divisibility of the trailing block by the pivot
            let piv = d[t][t].clone();
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d[i][j].is_multiple_of(&piv)));
            match bad {
                Some(i) => {
                    let (top, rest) = d.split_at_mut(i);
                    for (x, y) in top[t].iter_mut().zip(rest[0].iter()) {
                        *x += y;
                    }
                    let (ut, ur) = u.split_at_mut(i);
                    for (x, y) in ut[t].iter_mut().zip(ur[0].iter()) {
                        *x += y;
                    }
                }
                None => break,
            }
        }
        if d[t][t].is_negative() {
            for x in d[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
    }
    (d, u, v)
}

/// Elementary divisors (the nonzero diagonal of the Smith form), ascending.
pub fn elementary_divisors(a: &IMat) -> Vec<Int> {
    let (d, _, _) = snf_with_transforms(a);
    let k = d.len().min(d.first().map_or(0, |r| r.len()));
    (0..k).map(|i| d[i][i].abs()).filter(|x| !x.is_zero()).collect()
}

/// Inverse of a square rational matrix, `None` if singular.
pub fn rat_inverse(a: &QMat) -> Option<QMat> {
    let n = a.len();
    let mut m: QMat = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        let inv = m[c][c].recip();
        for x in m[c].iter_mut() {
            *x *= &inv;
        }
        for i in 0..n {
            if i == c || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            let (pivot_row, target) = if i < c {
                let (a, b) = m.split_at_mut(c);
                (&b[0], &mut a[i])
            } else {
                let (a, b) = m.split_at_mut(i);
                (&a[c], &mut b[0])
            };
            for (x, y) in target.iter_mut().zip(pivot_row.iter()) {
                *x -= &f * y;
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn rat_det(a: &QMat) -> Rat {
    let n = a.len();
    let mut m = a.clone();
    let mut det = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            m.swap(c, p);
            det = -det;
        }
        det *= &m[c][c];
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &m[c][c];
            let (a, b) = m.split_at_mut(i);
            for (x, y) in b[0].iter_mut().zip(a[c].iter()) {
                *x -= &f * y;
            }
        }
    }
    det
}

pub fn transpose<T: Clone>(a: &[Vec<T>]) -> Vec<Vec<T>> {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn rat_matmul(a: &QMat, b: &QMat) -> QMat {
    a.iter()
        .map(|r| {
            (0..b[0].len())
                .map(|j| r.iter().zip(b.iter()).fold(Rat::zero(), |acc, (x, brow)| acc + x * &brow[j]))
                .collect()
        })
        .collect()
}

/// Clear denominators: returns `(den, M)` with `rows = M / den`, `den > 0` minimal.
pub fn clear_denominators(rows: &QMat) -> (Int, IMat) {
    let den = lcm_all(rows.iter().flatten().map(|x| x.denom()));
    let m = rows
        .iter()
        .map(|r| r.iter().map(|x| (x * Rat::from_integer(den.clone())).to_integer()).collect())
        .collect();
    (den, m)
}

/// Basis of `{ c in Z^n : sum_k c_k * coords[k] in Z^w }` (a full-rank sublattice of `Z^n`).
pub fn preimage_lattice(coords: &QMat) -> IMat {
    let n = coords.len();
    let w = coords.first().map_or(0, |r| r.len());
    let (den, a) = clear_denominators(coords);
    let mut rows: IMat = Vec::with_capacity(n + w);
    for (k, r) in a.iter().enumerate() {
        let mut row = r.clone();
        row.extend((0..n).map(|j| if j == k { Int::one() } else { Int::zero() }));
        rows.push(row);
    }
    for j in 0..w {
        let mut row: Vec<Int> = (0..w).map(|i| if i == j { den.clone() } else { Int::zero() }).collect();
        row.extend((0..n).map(|_| Int::zero()));
        rows.push(row);
    }
    let h = hnf(&rows);
    h.into_iter()
        .filter(|r| r[..w].iter().all(|x| x.is_zero()))
        .map(|r| r[w..].to_vec())
        .collect()
}

/// `|det|` of a square integer matrix.
pub fn int_abs_det(a: &IMat) -> Int {
    let q: QMat = a.iter().map(|r| r.iter().map(|x| Rat::from_integer(x.clone())).collect()).collect();
    rat_det(&q).abs().to_integer()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    fn im(rows: &[&[i64]]) -> IMat {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    fn mul(a: &IMat, b: &IMat) -> IMat {
        a.iter()
            .map(|r| (0..b[0].len()).map(|j| r.iter().zip(b).fold(Int::zero(), |s, (x, br)| s + x * &br[j])).collect())
            .collect()
    }

    #[test]
    fn hnf_transform_is_consistent() {
        let a = im(&[&[4, 6, 2], &[2, 8, 4], &[6, 2, 10], &[1, 1, 1]]);
        let (h, u) = hnf_with_transform(&a);
        assert_eq!(mul(&u, &a), h);
        assert_eq!(int_abs_det(&u), int(1));
        for r in hnf(&a) {
            let piv = r.iter().position(|x| !x.is_zero()).unwrap();
            assert!(r[piv] > Int::zero());
        }
    }

    #[test]
    fn smith_form_of_known_matrix() {
        let a = im(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        assert_eq!(elementary_divisors(&a), vec![int(2), int(6), int(12)]);
        let (d, u, v) = snf_with_transforms(&a);
        assert_eq!(mul(&mul(&u, &a), &v), d);
    }

    #[test]
    fn preimage_of_half_condition() {
        // c1/2 + c2/2 in Z  <=>  c1 + c2 even
        let coords = vec![vec![rat(1, 2)], vec![rat(1, 2)]];
        let basis = preimage_lattice(&coords);
        assert_eq!(basis.len(), 2);
        assert_eq!(int_abs_det(&basis), int(2));
        for b in &basis {
            assert!((&b[0] + &b[1]).is_even());
        }
    }

    #[test]
    fn rational_inverse_roundtrip() {
        let a = vec![vec![rat(1, 2), rat(3, 1)], vec![rat(-1, 1), rat(2, 3)]];
        let inv = rat_inverse(&a).unwrap();
        let p = rat_matmul(&a, &inv);
        assert_eq!(p, vec![vec![rat(1, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 1)]]);
        assert!(rat_inverse(&vec![vec![rat(1, 1), rat(2, 1)], vec![rat(2, 1), rat(4, 1)]]).is_none());
    }
}
