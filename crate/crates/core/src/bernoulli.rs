//! Bernoulli numbers, generalized Bernoulli numbers of quadratic characters,
//! and the sawtooth function.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{big, int, kronecker, Rational};

/// `B_0, …, B_n` with `B_1 = -1/2`.
pub fn bernoulli_numbers(n: usize) -> Vec<Rational> {
    let mut b = vec![int(1)];
    let binom = binomial_rows(n + 1);
    for m in 1..=n {
        // sum_{j<=m} C(m+1, j) B_j = 0
        let s = (0..m).fold(int(0), |acc, j| acc + big(binom[m + 1][j].clone()) * &b[j]);
        b.push(-s / int(m as i64 + 1));
    }
    b
}

pub fn bernoulli(n: usize) -> Rational {
    bernoulli_numbers(n).pop().unwrap()
}

pub(crate) fn binomial_rows(n: usize) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = vec![vec![BigInt::one()]];
    for i in 1..=n {
        let prev = &rows[i - 1];
        let mut row = vec![BigInt::one(); i + 1];
        for j in 1..i {
            row[j] = &prev[j - 1] + &prev[j];
        }
        rows.push(row);
    }
    rows
}

/// The Kronecker character `a ↦ (D/a)` of a fundamental discriminant `D`
/// (`D = 1` is the trivial character).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticCharacter {
    disc: BigInt,
}

impl QuadraticCharacter {
    pub fn new(disc: BigInt) -> Self {
        Self { disc }
    }

    pub fn disc(&self) -> &BigInt {
        &self.disc
    }

    pub fn conductor(&self) -> u128 {
        use num_traits::ToPrimitive;
        self.disc.magnitude().to_u128().expect("conductor too large")
    }

    pub fn value(&self, a: u128) -> i32 {
        kronecker(&self.disc, a)
    }

    /// 0 for even characters, 1 for odd ones.
    pub fn parity(&self) -> u32 {
        if self.disc.is_negative() { 1 } else { 0 }
    }
}

/// `B_{n,χ} = f^{n-1} Σ_{a=1}^{f} χ(a) B_n(a/f)`.
pub fn generalized_bernoulli(chi: &QuadraticCharacter, n: usize) -> Rational {
    let f = chi.conductor();
    let b = bernoulli_numbers(n);
    let binom = binomial_rows(n);
    // power sums S_i = Σ χ(a) a^i
    let mut sums = vec![BigInt::zero(); n + 1];
    for a in 1..=f {
        let c = chi.value(a);
        if c == 0 {
            continue;
        }
        let mut pw = BigInt::one();
        for s in sums.iter_mut() {
            if c > 0 {
                *s += &pw;
            } else {
                *s -= &pw;
            }
            pw *= BigInt::from(a);
        }
    }
    let fr = big(BigInt::from(f));
    let mut total = int(0);
    for j in 0..=n {
        if b[j].is_zero() {
            continue;
        }
        let fpow = crate::arith::pow(&fr, j as i64 - 1);
        total += big(binom[n][j].clone()) * &b[j] * fpow * big(sums[n - j].clone());
    }
    total
}

/// `B(x) = x - (⌊x⌋ - ⌊-x⌋)/2`: zero at integers, `x - ⌊x⌋ - 1/2` elsewhere.
pub fn sawtooth(x: &Rational) -> Rational {
    let fl = x.floor().to_integer();
    let fm = (-x).floor().to_integer();
    x - Rational::new(fl - fm, BigInt::from(2))
}
