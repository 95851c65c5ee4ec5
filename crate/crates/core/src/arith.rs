//! Exact scalars: big rationals, half-integers and the small integer helpers
//! (factoring, Kronecker symbol, discriminants) the rest of the crate leans on.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn big(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// Parses `"p/q"`, `"p"` or `"-p/q"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidLattice(alloc::format!("cannot parse rational {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| bad())?;
    let d = BigInt::from_str(d).map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        alloc::format!("{}/{}", x.numer(), x.denom())
    }
}

/// Representative of `x mod 1` in `[0, 1)`.
pub fn frac(x: &Rational) -> Rational {
    x - x.floor()
}

pub fn is_integer(x: &Rational) -> bool {
    x.denom().is_one()
}

pub fn to_f64(x: &Rational) -> f64 {
    // numerators here stay far below the f64 exponent range
    match (x.numer().to_f64(), x.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            let shift = x.denom().bits().saturating_sub(900) as i64;
            let n = x.numer() >> shift as usize;
            let d = x.denom() >> shift as usize;
            n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
        }
    }
}

pub fn pow(x: &Rational, e: i64) -> Rational {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(x.recip(), (-e) as usize)
    }
}

/// Exact square root of a nonnegative rational that is a perfect square.
pub fn sqrt_exact(x: &Rational) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().magnitude();
    let d = x.denom().magnitude();
    let sn = n.sqrt();
    let sd = d.sqrt();
    if &sn * &sn == *n && &sd * &sd == *d {
        Some(Rational::new(BigInt::from(sn), BigInt::from(sd)))
    } else {
        None
    }
}

/// p-adic valuation of a nonzero integer.
pub fn val_int(x: &BigInt, p: u64) -> u32 {
    debug_assert!(!x.is_zero());
    let p = BigInt::from(p);
    let mut x = x.clone();
    let mut v = 0;
    loop {
        let (q, r) = x.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        x = q;
        v += 1;
    }
}

/// p-adic valuation of a rational; `None` for zero.
pub fn val(x: &Rational, p: u64) -> Option<i64> {
    if x.is_zero() {
        None
    } else {
        Some(val_int(x.numer(), p) as i64 - val_int(x.denom(), p) as i64)
    }
}

/// Reduction of a p-integral rational modulo `m` (a power of p).
pub fn residue(x: &Rational, m: u128) -> u128 {
    if m == 1 {
        return 0;
    }
    let mb = BigInt::from(m);
    let n = x.numer().mod_floor(&mb);
    let d = x.denom().mod_floor(&mb);
    let inv = mod_inverse(&d, &mb).expect("denominator must be a unit");
    let r = (n * inv).mod_floor(&mb);
    r.to_u128().unwrap()
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Weights and other elements of `(1/2)Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInteger {
    twice: i64,
}

impl HalfInteger {
    pub const fn from_twice(twice: i64) -> Self {
        Self { twice }
    }

    pub const fn from_int(k: i64) -> Self {
        Self { twice: 2 * k }
    }

    pub const fn twice(self) -> i64 {
        self.twice
    }

    pub fn is_integral(self) -> bool {
        self.twice % 2 == 0
    }

    pub fn to_rational(self) -> Rational {
        rat(self.twice, 2)
    }

    pub fn to_f64(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn from_rational(x: &Rational) -> Option<Self> {
        let t = x * int(2);
        if is_integer(&t) {
            t.numer().to_i64().map(Self::from_twice)
        } else {
            None
        }
    }

    pub fn sub(self, other: Self) -> Self {
        Self::from_twice(self.twice - other.twice)
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl FromStr for HalfInteger {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let x = parse_rational(s)?;
        Self::from_rational(&x).ok_or_else(|| Error::InvalidLattice(alloc::format!("{s} is not a half-integer")))
    }
}

// ---------------------------------------------------------------- integers

/// Trial-division factorization of `n > 0`.
pub fn factor(mut n: u128) -> Vec<(u128, u32)> {
    let mut out = Vec::new();
    if n <= 1 {
        return out;
    }
    let mut p = 2u128;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn prime_divisors_big(n: &BigInt) -> Vec<u64> {
    let m = n.magnitude();
    if m.is_zero() {
        return Vec::new();
    }
    let v = m.to_u128().expect("integer too large to factor");
    factor(v).into_iter().map(|(p, _)| p as u64).collect()
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

pub fn isqrt(n: u128) -> u128 {
    n.sqrt()
}

pub fn is_square(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let r = isqrt(n as u128) as i128;
    (r * r == n).then_some(r)
}

/// Kronecker symbol `(a/n)`.
pub fn kronecker(a: &BigInt, n: u128) -> i32 {
    if n == 0 {
        return if a.magnitude().is_one() { 1 } else { 0 };
    }
    let mut n = n;
    let mut res = 1;
    let a_is_even = a.is_even();
    while n % 2 == 0 {
        n /= 2;
        if a_is_even {
            return 0;
        }
        let r8 = a.mod_floor(&BigInt::from(8)).to_u32().unwrap();
        if r8 == 3 || r8 == 5 {
            res = -res;
        }
    }
    if n == 1 {
        return res;
    }
    let mut x = a.mod_floor(&BigInt::from(n)).to_u128().unwrap();
    let mut m = n;
    while x != 0 {
        while x % 2 == 0 {
            x /= 2;
            if m % 8 == 3 || m % 8 == 5 {
                res = -res;
            }
        }
        core::mem::swap(&mut x, &mut m);
        if x % 4 == 3 && m % 4 == 3 {
            res = -res;
        }
        x %= m;
    }
    if m == 1 { res } else { 0 }
}

pub fn kronecker_i(a: i128, n: u128) -> i32 {
    kronecker(&BigInt::from(a), n)
}

/// Legendre-type symbol of a p-integral rational unit modulo an odd prime.
pub fn legendre_rational(x: &Rational, p: u64) -> i32 {
    let n = x.numer() * x.denom();
    kronecker(&n, p as u128)
}

/// Discriminant of `Q(sqrt(x))` for a nonzero rational `x`.
pub fn fundamental_discriminant(x: &Rational) -> BigInt {
    let prod = x.numer() * x.denom();
    let sign = if prod.sign() == Sign::Minus { -1 } else { 1 };
    let m = prod.magnitude().to_u128().expect("discriminant too large");
    let mut core = 1u128;
    for (p, e) in factor(m) {
        if e % 2 == 1 {
            core *= p;
        }
    }
    let d: BigInt = BigInt::from(core) * sign;
    if d.mod_floor(&BigInt::from(4)) == BigInt::one() {
        d
    } else {
        d * 4
    }
}

pub fn biguint_to_rational(x: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from(x.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "3", "-7/4", "11/2"] {
            assert_eq!(format_rational(&parse_rational(s).unwrap()), s);
        }
        assert_eq!(parse_rational("6/4").unwrap(), rat(3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn frac_is_in_unit_interval() {
        assert_eq!(frac(&rat(-1, 4)), rat(3, 4));
        assert_eq!(frac(&rat(9, 4)), rat(1, 4));
        assert_eq!(frac(&int(-3)), int(0));
    }

    #[test]
    fn kronecker_matches_euler_criterion() {
        for p in [3u128, 5, 7, 11, 13] {
            for a in -20i128..20 {
                let e = (a.rem_euclid(p as i128) as u128).pow(1);
                let mut acc = 1u128;
                for _ in 0..(p - 1) / 2 {
                    acc = acc * e % p;
                }
                let expect = if e == 0 { 0 } else if acc == 1 { 1 } else { -1 };
                assert_eq!(kronecker_i(a, p), expect, "a={a} p={p}");
            }
        }
        assert_eq!(kronecker_i(5, 2), -1);
        assert_eq!(kronecker_i(1, 2), 1);
        assert_eq!(kronecker_i(-4, 3), -1);
    }

    #[test]
    fn fundamental_discriminants() {
        assert_eq!(fundamental_discriminant(&int(5)), BigInt::from(5));
        assert_eq!(fundamental_discriminant(&int(-1)), BigInt::from(-4));
        assert_eq!(fundamental_discriminant(&int(-12)), BigInt::from(-3));
        assert_eq!(fundamental_discriminant(&rat(1, 2)), BigInt::from(8));
        assert_eq!(fundamental_discriminant(&int(1)), BigInt::from(1));
    }

    #[test]
    fn half_integers() {
        let k: HalfInteger = "11/2".parse().unwrap();
        assert_eq!(k.twice(), 11);
        assert_eq!(k.to_string(), "11/2");
        assert_eq!(k.sub(HalfInteger::from_twice(3)), HalfInteger::from_int(4));
        assert!("1/3".parse::<HalfInteger>().is_err());
    }

    #[test]
    fn residues_and_valuations() {
        assert_eq!(residue(&rat(1, 3), 8), 3);
        assert_eq!(val(&rat(12, 5), 2), Some(2));
        assert_eq!(val(&rat(12, 5), 5), Some(-1));
        assert_eq!(sqrt_exact(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(sqrt_exact(&rat(2, 1)), None);
        assert_eq!(divisors(12), [1, 2, 3, 4, 6, 12]);
    }
}
