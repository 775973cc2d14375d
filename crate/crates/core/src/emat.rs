//! Small dense matrices over the quadratic field.

use crate::error::{Error, Result};
use crate::field::{FieldElement, QuadField};

pub type Vector = Vec<FieldElement>;
pub type Matrix = Vec<Vec<FieldElement>>;

pub fn identity(field: QuadField, n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { field.one() } else { field.zero() }).collect())
        .collect()
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let f = a[0][0].field();
    a.iter()
        .map(|row| {
            (0..b[0].len())
                .map(|j| row.iter().zip(b).fold(f.zero(), |acc, (x, brow)| &acc + &(x * &brow[j])))
                .collect()
        })
        .collect()
}

/// Row vector times matrix.
pub fn vecmul(v: &[FieldElement], a: &Matrix) -> Vector {
    let f = v[0].field();
    (0..a[0].len())
        .map(|j| v.iter().zip(a).fold(f.zero(), |acc, (x, row)| &acc + &(x * &row[j])))
        .collect()
}

pub fn conj_transpose(a: &Matrix) -> Matrix {
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j].conj()).collect()).collect()
}

pub fn scale_vec(c: &FieldElement, v: &[FieldElement]) -> Vector {
    v.iter().map(|x| c * x).collect()
}

pub fn add_vec(a: &[FieldElement], b: &[FieldElement]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn det(a: &Matrix) -> FieldElement {
    let n = a.len();
    let f = a[0][0].field();
    let mut m = a.clone();
    let mut d = f.one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return f.zero();
        };
        if p != c {
            m.swap(c, p);
            d = -d;
        }
        d = &d * &m[c][c];
        let inv = m[c][c].inv().expect("nonzero pivot");
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let factor = &m[i][c] * &inv;
            for j in c..n {
                let t = &factor * &m[c][j];
                m[i][j] = &m[i][j] - &t;
            }
        }
    }
    d
}

pub fn inverse(a: &Matrix) -> Result<Matrix> {
    let n = a.len();
    let f = a[0][0].field();
    let mut m: Matrix = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { f.one() } else { f.zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero()).ok_or(Error::DivisionByZero)?;
        m.swap(c, p);
        let inv = m[c][c].inv()?;
        m[c] = m[c].iter().map(|x| x * &inv).collect();
        for i in 0..n {
            if i == c || m[i][c].is_zero() {
                continue;
            }
            let factor = m[i][c].clone();
            let pivot = m[c].clone();
            for (x, y) in m[i].iter_mut().zip(&pivot) {
                *x = &*x - &(&factor * y);
            }
        }
    }
    Ok(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_det() {
        let f = QuadField::new(-17).unwrap();
        let a = vec![vec![f.from_ints(102, 0), f.from_ints(0, 1)], vec![f.from_ints(0, -1), f.zero()]];
        assert_eq!(det(&a), f.from_ints(-17, 0));
        let ai = inverse(&a).unwrap();
        assert_eq!(matmul(&a, &ai), identity(f, 2));
        let z = vec![vec![f.one(), f.one()], vec![f.one(), f.one()]];
        assert!(inverse(&z).is_err());
        assert!(det(&z).is_zero());
    }
}
