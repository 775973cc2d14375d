//! Exact arithmetic in an imaginary quadratic field `E = Q(sqrt(d))`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::arith::{fmt_rational, int, is_squarefree, rat, Int, Rat};
use crate::error::{Error, Result};

/// Which integral basis `{1, omega}` the ring of integers uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OmegaKind {
    /// `omega = sqrt(d)`, for `d = 2, 3 mod 4`.
    Sqrt,
    /// `omega = (1 + sqrt(d)) / 2`, for `d = 1 mod 4`.
    HalfSqrt,
}

/// Descriptor of `E = Q(sqrt(d))` with `d < 0` squarefree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadField {
    d: i64,
}

impl QuadField {
    pub fn new(d: i64) -> Result<Self> {
        if d >= 0 {
            return Err(Error::input(format!("d = {d} must be negative")));
        }
        if !is_squarefree(d) {
            return Err(Error::input(format!("d = {d} is not squarefree")));
        }
        Ok(QuadField { d })
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn omega_kind(&self) -> OmegaKind {
        if self.d.rem_euclid(4) == 1 {
            OmegaKind::HalfSqrt
        } else {
            OmegaKind::Sqrt
        }
    }

    /// Discriminant of the ring of integers.
    pub fn disc(&self) -> i64 {
        match self.omega_kind() {
            OmegaKind::HalfSqrt => self.d,
            OmegaKind::Sqrt => 4 * self.d,
        }
    }

    /// `(t, n)` with `omega^2 = t * omega + n`.
    pub fn omega_relation(&self) -> (i64, i64) {
        match self.omega_kind() {
            OmegaKind::HalfSqrt => (1, (self.d - 1) / 4),
            OmegaKind::Sqrt => (0, self.d),
        }
    }

    pub fn elem(&self, a: Rat, b: Rat) -> FieldElement {
        FieldElement { d: self.d, a, b }
    }

    pub fn from_ints(&self, a: i64, b: i64) -> FieldElement {
        self.elem(rat(a, 1), rat(b, 1))
    }

    pub fn from_rat(&self, a: Rat) -> FieldElement {
        self.elem(a, Rat::zero())
    }

    pub fn from_int(&self, a: &Int) -> FieldElement {
        self.from_rat(Rat::from_integer(a.clone()))
    }

    pub fn zero(&self) -> FieldElement {
        self.from_ints(0, 0)
    }

    pub fn one(&self) -> FieldElement {
        self.from_ints(1, 0)
    }

    pub fn sqrt_d(&self) -> FieldElement {
        self.from_ints(0, 1)
    }

    pub fn omega(&self) -> FieldElement {
        self.from_omega(Rat::zero(), Rat::one())
    }

    /// The element `u + v * omega`.
    pub fn from_omega(&self, u: Rat, v: Rat) -> FieldElement {
        match self.omega_kind() {
            OmegaKind::Sqrt => self.elem(u, v),
            OmegaKind::HalfSqrt => {
                let half = &v / Rat::from_integer(int(2));
                self.elem(u + &half, half)
            }
        }
    }

    /// Coordinates `(u, v)` with `x = u + v * omega`.
    pub fn to_omega(&self, x: &FieldElement) -> (Rat, Rat) {
        match self.omega_kind() {
            OmegaKind::Sqrt => (x.a.clone(), x.b.clone()),
            OmegaKind::HalfSqrt => (&x.a - &x.b, &x.b * Rat::from_integer(int(2))),
        }
    }

    /// Roots of unity of `O`: all units, all of norm one.
    pub fn torsion_units(&self) -> Vec<FieldElement> {
        match self.d {
            -1 => vec![self.from_ints(1, 0), self.from_ints(-1, 0), self.from_ints(0, 1), self.from_ints(0, -1)],
            -3 => {
                let h = rat(1, 2);
                let mh = rat(-1, 2);
                vec![
                    self.from_ints(1, 0),
                    self.from_ints(-1, 0),
                    self.elem(h.clone(), h.clone()),
                    self.elem(h.clone(), mh.clone()),
                    self.elem(mh.clone(), h),
                    self.elem(mh.clone(), mh),
                ]
            }
            _ => vec![self.from_ints(1, 0), self.from_ints(-1, 0)],
        }
    }
}

/// `a + b * sqrt(d)` with rational `a`, `b`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    d: i64,
    a: Rat,
    b: Rat,
}

impl FieldElement {
    pub fn a(&self) -> &Rat {
        &self.a
    }

    pub fn b(&self) -> &Rat {
        &self.b
    }

    pub fn field(&self) -> QuadField {
        QuadField { d: self.d }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conj(&self) -> FieldElement {
        FieldElement { d: self.d, a: self.a.clone(), b: -self.b.clone() }
    }

    /// `x * conj(x) = a^2 - d b^2`.
    pub fn norm(&self) -> Rat {
        &self.a * &self.a - Rat::from_integer(int(self.d)) * &self.b * &self.b
    }

    pub fn trace(&self) -> Rat {
        &self.a * Rat::from_integer(int(2))
    }

    pub fn inv(&self) -> Result<FieldElement> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(FieldElement { d: self.d, a: &self.a / &n, b: -(&self.b / &n) })
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement> {
        Ok(self * &other.inv()?)
    }

    pub fn scale(&self, q: &Rat) -> FieldElement {
        FieldElement { d: self.d, a: &self.a * q, b: &self.b * q }
    }

    /// Membership in `O`: trace and norm are integers.
    pub fn is_integral(&self) -> bool {
        self.trace().is_integer() && self.norm().is_integer()
    }

    pub fn pow(&self, k: i64) -> Result<FieldElement> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut acc = self.field().one();
        for _ in 0..k.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    /// Serialized form `["a", "b"]`.
    pub fn to_pair(&self) -> [String; 2] {
        [fmt_rational(&self.a), fmt_rational(&self.b)]
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = fmt_rational(&self.a);
        if self.b.is_zero() {
            return write!(f, "{a}");
        }
        let (sign, mag) = if self.b.is_negative() { ("-", -self.b.clone()) } else { ("+", self.b.clone()) };
        let coeff = if mag.is_one() { String::new() } else { format!("{}*", fmt_rational(&mag)) };
        if self.a.is_zero() {
            let s = if sign == "-" { "-" } else { "" };
            write!(f, "{s}{coeff}sqrt({})", self.d)
        } else {
            write!(f, "{a} {sign} {coeff}sqrt({})", self.d)
        }
    }
}

impl<'a> Add<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn add(self, o: &FieldElement) -> FieldElement {
        debug_assert_eq!(self.d, o.d);
        FieldElement { d: self.d, a: &self.a + &o.a, b: &self.b + &o.b }
    }
}

impl<'a> Sub<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn sub(self, o: &FieldElement) -> FieldElement {
        debug_assert_eq!(self.d, o.d);
        FieldElement { d: self.d, a: &self.a - &o.a, b: &self.b - &o.b }
    }
}

impl<'a> Mul<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn mul(self, o: &FieldElement) -> FieldElement {
        debug_assert_eq!(self.d, o.d);
        let d = Rat::from_integer(int(self.d));
        FieldElement {
            d: self.d,
            a: &self.a * &o.a + d * &self.b * &o.b,
            b: &self.a * &o.b + &self.b * &o.a,
        }
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement { d: self.d, a: -self.a.clone(), b: -self.b.clone() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, o: FieldElement) -> FieldElement {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, o: &FieldElement) -> FieldElement {
                (&self).$m(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn make_field_examples() {
        let f = QuadField::new(-17).unwrap();
        assert_eq!(f.disc(), -68);
        assert_eq!(f.omega_kind(), OmegaKind::Sqrt);
        let g = QuadField::new(-3).unwrap();
        assert_eq!(g.disc(), -3);
        assert_eq!(g.omega_kind(), OmegaKind::HalfSqrt);
        assert!(QuadField::new(-4).is_err());
        assert!(QuadField::new(5).is_err());
        assert!(QuadField::new(0).is_err());
        assert!(QuadField::new(1).is_err());
    }

    #[test]
    fn conj_norm_trace_examples() {
        let f = QuadField::new(-17).unwrap();
        assert_eq!(f.from_ints(3, 2).conj(), f.from_ints(3, -2));
        assert_eq!(f.from_ints(5, 0).conj(), f.from_ints(5, 0));
        let x = f.elem(rat(1, 2), rat(1, 1));
        assert_eq!(x.conj().conj(), x);
        assert_eq!(f.sqrt_d().norm(), rat(17, 1));
        assert_eq!(f.from_ints(1, 1).norm(), rat(18, 1));
        assert_eq!(f.from_ints(7, 3).trace(), rat(14, 1));
        assert_eq!(f.zero().inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn integrality_examples() {
        let g = QuadField::new(-3).unwrap();
        assert!(g.elem(rat(1, 2), rat(1, 2)).is_integral());
        let f = QuadField::new(-17).unwrap();
        assert!(!f.elem(rat(1, 2), rat(1, 2)).is_integral());
        assert!(f.zero().is_integral());
        assert!(f.omega().is_integral() && g.omega().is_integral());
    }

    #[test]
    fn omega_coordinates_roundtrip() {
        for d in [-1, -2, -3, -7, -17] {
            let f = QuadField::new(d).unwrap();
            let x = f.elem(rat(3, 5), rat(-7, 4));
            let (u, v) = f.to_omega(&x);
            assert_eq!(f.from_omega(u, v), x);
            let (t, n) = f.omega_relation();
            let w = f.omega();
            assert_eq!(&w * &w, &f.from_ints(n, 0) + &f.from_ints(t, 0).mul(&w));
        }
    }

    fn small_rat() -> impl Strategy<Value = Rat> {
        (-30i64..30, 1i64..8).prop_map(|(n, d)| rat(n, d))
    }

    proptest! {
        #[test]
        fn norm_is_multiplicative(d in prop::sample::select(vec![-1i64, -2, -3, -5, -7, -17]),
                                  a in small_rat(), b in small_rat(), c in small_rat(), e in small_rat()) {
            let f = QuadField::new(d).unwrap();
            let x = f.elem(a, b);
            let y = f.elem(c, e);
            prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
            prop_assert_eq!((&x + &y).trace(), x.trace() + y.trace());
            prop_assert_eq!((&x * &y).conj(), &x.conj() * &y.conj());
            prop_assert_eq!(x.norm(), (&x * &x.conj()).a().clone());
            prop_assert!(x.norm() >= Rat::zero());
            prop_assert_eq!(x.norm().is_zero(), x.is_zero());
            if !y.is_zero() {
                prop_assert_eq!(x.div(&y).unwrap().mul(&y), x);
            }
        }
    }
}
