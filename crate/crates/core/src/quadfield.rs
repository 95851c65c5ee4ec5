//! Exact arithmetic in `Q(√d)` for a positive non-square `d`, and units of
//! `Z[√d]`.

use core::cmp::Ordering;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{One, Signed, Zero};

use crate::arith::{big, int, Rational};
use crate::error::{Error, Result};

/// `a + b√d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticNumber {
    pub a: Rational,
    pub b: Rational,
    pub d: i64,
}

impl QuadraticNumber {
    pub fn new(a: Rational, b: Rational, d: i64) -> Self {
        debug_assert!(d > 1);
        Self { a, b, d }
    }

    pub fn from_ints(a: impl Into<BigInt>, b: impl Into<BigInt>, d: i64) -> Self {
        Self::new(big(a), big(b), d)
    }

    pub fn rational(a: Rational, d: i64) -> Self {
        Self::new(a, int(0), d)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.a.clone(), -self.b.clone(), self.d)
    }

    pub fn norm(&self) -> Rational {
        &self.a * &self.a - int(self.d) * &self.b * &self.b
    }

    pub fn trace(&self) -> Rational {
        &self.a * int(2)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn inv(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::invariant("inverse of zero in a quadratic field"));
        }
        Ok(Self::new(&self.a / &n, -&self.b / &n, self.d))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::rational(int(1), self.d);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Sign of the real number `a + b√d` (with `√d > 0`).
    pub fn signum(&self) -> i32 {
        let sa = sign(&self.a);
        let sb = sign(&self.b);
        if sa == sb || sb == 0 {
            return sa;
        }
        if sa == 0 {
            return sb;
        }
        // opposite signs: compare a² with d b²
        match (&self.a * &self.a).cmp(&(int(self.d) * &self.b * &self.b)) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn to_f64(&self) -> f64 {
        crate::arith::to_f64(&self.a) + crate::arith::to_f64(&self.b) * libm::sqrt(self.d as f64)
    }
}

fn sign(x: &Rational) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

impl PartialOrd for QuadraticNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.d != other.d {
            return None;
        }
        Some((self - other).signum().cmp(&0))
    }
}

impl<'a> Add<&'a QuadraticNumber> for &'a QuadraticNumber {
    type Output = QuadraticNumber;
    fn add(self, o: &QuadraticNumber) -> QuadraticNumber {
        assert_eq!(self.d, o.d, "mixed quadratic fields");
        QuadraticNumber::new(&self.a + &o.a, &self.b + &o.b, self.d)
    }
}

impl<'a> Sub<&'a QuadraticNumber> for &'a QuadraticNumber {
    type Output = QuadraticNumber;
    fn sub(self, o: &QuadraticNumber) -> QuadraticNumber {
        assert_eq!(self.d, o.d, "mixed quadratic fields");
        QuadraticNumber::new(&self.a - &o.a, &self.b - &o.b, self.d)
    }
}

impl<'a> Mul<&'a QuadraticNumber> for &'a QuadraticNumber {
    type Output = QuadraticNumber;
    fn mul(self, o: &QuadraticNumber) -> QuadraticNumber {
        assert_eq!(self.d, o.d, "mixed quadratic fields");
        let a = &self.a * &o.a + int(self.d) * &self.b * &o.b;
        let b = &self.a * &o.b + &self.b * &o.a;
        QuadraticNumber::new(a, b, self.d)
    }
}

impl Neg for &QuadraticNumber {
    type Output = QuadraticNumber;
    fn neg(self) -> QuadraticNumber {
        QuadraticNumber::new(-self.a.clone(), -self.b.clone(), self.d)
    }
}

/// The smallest solution `x + y√d > 1` of `x² − d y² = ±1` (continued fraction of `√d`).
pub fn fundamental_unit(d: i64) -> Result<(BigInt, BigInt)> {
    if d < 2 || (d as i128).sqrt() * (d as i128).sqrt() == d as i128 {
        return Err(Error::UnsupportedModule(alloc::format!("{d} is not a positive non-square")));
    }
    let a0 = BigInt::from(d).sqrt();
    let dd = BigInt::from(d);
    let (mut m, mut q, mut a) = (BigInt::zero(), BigInt::one(), a0.clone());
    let (mut p_prev, mut p) = (BigInt::one(), a0.clone());
    let (mut q_prev, mut qq) = (BigInt::zero(), BigInt::one());
    loop {
        let n = &p * &p - &dd * &qq * &qq;
        if n.abs().is_one() {
            return Ok((p, qq));
        }
        m = &q * &a - m;
        q = (&dd - &m * &m) / q;
        a = (&a0 + &m) / &q;
        let p_next = &a * &p + &p_prev;
        let q_next = &a * &qq + &q_prev;
        p_prev = core::mem::replace(&mut p, p_next);
        q_prev = core::mem::replace(&mut qq, q_next);
    }
}

/// The smallest unit `η = x + y√d > 1` of `Z[√d]` with norm 1 and `x ≡ 1 mod n`.
/// Multiplication by `η` preserves `x mod n` for elements of `Z[√d]` with
/// `d ≡ 0 mod n`.
pub fn congruence_unit(d: i64, n: u64) -> Result<QuadraticNumber> {
    let (x, y) = fundamental_unit(d)?;
    let eps = QuadraticNumber::from_ints(x, y, d);
    let mut u = eps.clone();
    for _ in 0..4 * n.max(1) + 8 {
        let one_mod = {
            let xi = u.a.to_integer();
            let r = ((xi % BigInt::from(n)) + BigInt::from(n)) % BigInt::from(n);
            r == BigInt::from(1u64 % n)
        };
        if u.norm() == int(1) && one_mod {
            return Ok(u);
        }
        u = &u * &eps;
    }
    Err(Error::invariant("no congruence unit found"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fundamental_units() {
        assert_eq!(fundamental_unit(5).unwrap(), (BigInt::from(2), BigInt::from(1)));
        assert_eq!(fundamental_unit(2).unwrap(), (BigInt::from(1), BigInt::from(1)));
        assert_eq!(fundamental_unit(13).unwrap(), (BigInt::from(18), BigInt::from(5)));
        assert_eq!(fundamental_unit(61).unwrap(), (BigInt::from(29718), BigInt::from(3805)));
        assert!(fundamental_unit(9).is_err());
    }

    #[test]
    fn congruence_unit_for_five() {
        let eta = congruence_unit(5, 5).unwrap();
        assert_eq!(eta, QuadraticNumber::from_ints(161, 72, 5));
    }

    #[test]
    fn ordering_is_exact() {
        // 161 - 72√5 ≈ 0.0062 > 0
        let x = QuadraticNumber::from_ints(161, -72, 5);
        assert_eq!(x.signum(), 1);
        assert_eq!(QuadraticNumber::from_ints(-161, 72, 5).signum(), -1);
        assert!(QuadraticNumber::from_ints(2, 1, 5) > QuadraticNumber::from_ints(4, 0, 5));
    }

    proptest! {
        #[test]
        fn field_axioms(a in -50i64..50, b in -50i64..50, c in -50i64..50, e in -50i64..50, d in prop::sample::select(alloc::vec![2i64, 3, 5, 13, 17])) {
            let x = QuadraticNumber::from_ints(a, b, d);
            let y = QuadraticNumber::from_ints(c, e, d);
            prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
            if !y.is_zero() {
                prop_assert_eq!(&x.div(&y).unwrap() * &y, x.clone());
            }
            let f = x.to_f64();
            if f.abs() > 1e-6 {
                prop_assert_eq!(x.signum(), if f > 0.0 { 1 } else { -1 });
            }
        }
    }
}
