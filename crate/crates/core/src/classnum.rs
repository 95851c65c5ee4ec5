//! Hurwitz class numbers, ideals of `Z[(1+√5)/2]` with their trace-minimal
//! generators, and the class number identities that come out of the
//! vanishing of weight-three cusp forms for `N = 5` and `N = 9`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::Signed;

use crate::arith::{divisors, int, kronecker_i, rat, Rational};
use crate::error::{Error, Result};
use crate::quadfield::QuadraticNumber;

/// `H(d)`: classes of positive definite binary quadratic forms of
/// discriminant `−d`, the classes of `a(x²+y²)` and `a(x²+xy+y²)` counted with
/// weight 1/2 and 1/3. `H(0) = −1/12`.
pub fn hurwitz(d: u64) -> Rational {
    if d == 0 {
        return rat(-1, 12);
    }
    if d % 4 == 1 || d % 4 == 2 {
        return int(0);
    }
    let d = d as i64;
    let mut halves = 0i64; // 2·(weight-1 and weight-1/2 part), then thirds separately
    let mut thirds = 0i64;
    let mut a = 1i64;
    while 3 * a * a <= d {
        for b in -a + 1..=a {
            let num = b * b + d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            if a == b && b == c {
                thirds += 1;
            } else if b == 0 && a == c {
                halves += 1;
            } else {
                halves += 2;
            }
        }
        a += 1;
    }
    rat(halves, 2) + rat(thirds, 3)
}

/// Memoized `H`. Not shared between threads; give each worker its own.
#[derive(Debug, Clone, Default)]
pub struct HurwitzTable {
    memo: BTreeMap<u64, Rational>,
}

impl HurwitzTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, d: u64) -> Rational {
        self.memo.entry(d).or_insert_with(|| hurwitz(d)).clone()
    }

    /// `H(d)` for an integer argument, zero when negative.
    pub fn get_signed(&mut self, d: i64) -> Rational {
        if d < 0 {
            int(0)
        } else {
            self.get(d as u64)
        }
    }
}

/// One ideal of norm `M` through two of its generators `a + b√5`, `c + d√5`,
/// each of minimal positive trace in a prescribed class of `2a`, `2c` mod 5.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdealWitness {
    pub norm: u64,
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
}

impl IdealWitness {
    /// `7(c² − a²) − 30(|cd| − |ab|) + 35(d² − b²)`.
    pub fn summand(&self) -> Rational {
        let (a, b, c, d) = (&self.a, &self.b, &self.c, &self.d);
        int(7) * (c * c - a * a) - int(30) * ((c * d).abs() - (a * b).abs()) + int(35) * (d * d - b * b)
    }
}

fn phi_squared() -> QuadraticNumber {
    QuadraticNumber::new(rat(3, 2), rat(1, 2), 5)
}

/// Totally positive generators of the ideals of norm `M`, one per ideal.
fn window_generators(m: u64) -> Vec<QuadraticNumber> {
    let phi4 = &phi_squared() * &phi_squared();
    let mut out = Vec::new();
    // α = (x + y√5)/2 < √M·φ² bounds y by about 1.17·√M
    let ymax = 2 * crate::arith::isqrt(m as u128) as i64 + 3;
    for y in 0..=ymax {
        let x2 = 4 * m as i128 + 5 * (y as i128) * (y as i128);
        let Some(x) = crate::arith::is_square(x2) else { continue };
        if (x - y as i128) % 2 != 0 {
            continue;
        }
        let alpha = QuadraticNumber::new(rat(x as i64, 2), rat(y, 2), 5);
        if (&(&phi4 * &alpha.conj()) - &alpha).signum() > 0 {
            out.push(alpha);
        }
    }
    out
}

/// Classes of the trace `2a` (first generator) and `2c` (second) modulo 5.
fn trace_classes(m: u64) -> Result<(i64, i64)> {
    match m % 5 {
        4 => Ok((1, 4)),
        1 => Ok((2, 3)),
        _ => Err(Error::UnsupportedNorm(m)),
    }
}

fn trace_minimal(alpha: &QuadraticNumber, class: i64) -> Result<QuadraticNumber> {
    let u = phi_squared();
    let ui = u.inv()?;
    let mut best: Option<QuadraticNumber> = None;
    for j in -3i32..=3 {
        let step = if j >= 0 { u.pow(j as u32) } else { ui.pow((-j) as u32) };
        let mu = alpha * &step;
        let tr = mu.trace().to_integer();
        let cls = ((tr % 5) + 5) % 5;
        if cls != num_bigint::BigInt::from(class) {
            continue;
        }
        let better = match &best {
            None => true,
            Some(b) => {
                let key = |x: &QuadraticNumber| (x.trace(), x.b.abs(), x.b.is_negative());
                key(&mu) < key(b)
            }
        };
        if better {
            best = Some(mu);
        }
    }
    best.ok_or_else(|| Error::invariant("no generator in the trace class"))
}

/// All ideals of `Z[(1+√5)/2]` of norm `M ≡ 1, 4 mod 5`.
pub fn ideals_of_norm_q5(m: u64) -> Result<Vec<IdealWitness>> {
    let (ca, cc) = trace_classes(m)?;
    window_generators(m)
        .into_iter()
        .map(|alpha| {
            let first = trace_minimal(&alpha, ca)?;
            let second = trace_minimal(&alpha, cc)?;
            Ok(IdealWitness { norm: m, a: first.a, b: first.b, c: second.a, d: second.b })
        })
        .collect()
}

/// `Σ_{N(𝔞) = M}` of [`IdealWitness::summand`].
pub fn ideal_sum_q5(m: u64) -> Result<Rational> {
    Ok(ideals_of_norm_q5(m)?.iter().map(IdealWitness::summand).sum())
}

/// The two identities tied to `N = 5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prop10Variant {
    /// `Σ_r (r + 4/5) H(4n − 5r² − 8r)` against ideals of norm `5n + 4`
    I,
    /// `Σ_r (r − 2/5) H(4n − 5r² + 4r)` against ideals of norm `5n + 1`
    II,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityCheck {
    pub n: u64,
    pub lhs: Rational,
    pub rhs: Rational,
    pub equal: bool,
}

pub fn prop10_check(variant: Prop10Variant, n: u64, table: &mut HurwitzTable) -> Result<IdentityCheck> {
    let (shift, lin, norm) = match variant {
        Prop10Variant::I => (rat(4, 5), -8i64, 5 * n + 4),
        Prop10Variant::II => (rat(-2, 5), 4i64, 5 * n + 1),
    };
    let n_i = n as i64;
    let bound = crate::arith::isqrt(n as u128) as i64 + 3;
    let mut lhs = int(0);
    for r in -bound..=bound {
        let arg = 4 * n_i - 5 * r * r + lin * r;
        if arg >= 0 {
            lhs += (int(r) + &shift) * table.get(arg as u64);
        }
    }
    let rhs = -ideal_sum_q5(norm)? / int(150);
    Ok(IdentityCheck { n, equal: lhs == rhs, lhs, rhs })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Remark12Check {
    pub n: u64,
    /// `Σ_{r ≡ 1 (3)} r H(4n − r²)`
    pub lhs1: Rational,
    /// `Σ_{r ≡ 2 (3)} r H(4n − r²)`
    pub lhs2: Rational,
    pub rhs: Rational,
    pub equal: bool,
}

pub fn remark12_check(n: u64, table: &mut HurwitzTable) -> Remark12Check {
    let n_i = n as i64;
    let bound = 2 * crate::arith::isqrt(n as u128) as i64 + 2;
    let (mut lhs1, mut lhs2) = (int(0), int(0));
    for r in -bound..=bound {
        let arg = 4 * n_i - r * r;
        if arg < 0 {
            continue;
        }
        let term = int(r) * table.get(arg as u64);
        match r.rem_euclid(3) {
            1 => lhs1 += term,
            2 => lhs2 += term,
            _ => {}
        }
    }
    let eps = if n % 3 == 0 { int(-1) } else { rat(1, 2) };
    let sum: i64 = divisors(n).into_iter().map(|d| kronecker_i(d as i128, 3) as i64 * d.min(n / d).pow(2) as i64).sum();
    let rhs = eps * int(sum);
    let equal = lhs1 == rhs && lhs2 == -rhs.clone();
    Remark12Check { n, lhs1, lhs2, rhs, equal }
}
