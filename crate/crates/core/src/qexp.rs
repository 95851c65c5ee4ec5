//! Truncated vector-valued q-series `Σ_γ Σ_n c(n,γ) qⁿ e_γ`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{int, is_integer, HalfInteger, Rational};
use crate::error::{Error, Result};
use crate::quadmod::{FiniteQuadraticModule, FqmElement};

/// Coefficients below `prec`; a missing key means zero.
#[derive(Debug, Clone, PartialEq)]
pub struct QExpansion {
    module: FiniteQuadraticModule,
    weight: HalfInteger,
    prec: Rational,
    coeffs: BTreeMap<(FqmElement, Rational), Rational>,
}

impl QExpansion {
    pub fn zero(module: FiniteQuadraticModule, weight: HalfInteger, prec: Rational) -> Self {
        Self { module, weight, prec, coeffs: BTreeMap::new() }
    }

    pub fn module(&self) -> &FiniteQuadraticModule {
        &self.module
    }

    pub fn weight(&self) -> HalfInteger {
        self.weight
    }

    pub fn prec(&self) -> &Rational {
        &self.prec
    }

    /// Checks that `qⁿ e_γ` is a legal term below the precision.
    pub fn check_index(&self, gamma: &FqmElement, n: &Rational) -> Result<()> {
        self.module.check(gamma)?;
        if n.is_negative() || *n >= self.prec {
            return Err(Error::IndexMismatch(format!("exponent {n} outside [0, {})", self.prec)));
        }
        if !is_integer(&(n + self.module.qvalue(gamma))) {
            return Err(Error::IndexMismatch(format!("exponent {n} is not in Z - Q({gamma})")));
        }
        Ok(())
    }

    pub fn set(&mut self, gamma: FqmElement, n: Rational, c: Rational) -> Result<()> {
        self.check_index(&gamma, &n)?;
        if c.is_zero() {
            self.coeffs.remove(&(gamma, n));
        } else {
            self.coeffs.insert((gamma, n), c);
        }
        Ok(())
    }

    pub fn get(&self, gamma: &FqmElement, n: &Rational) -> Rational {
        self.coeffs.get(&(gamma.clone(), n.clone())).cloned().unwrap_or_else(|| int(0))
    }

    /// Nonzero terms in `(γ, n)` order.
    pub fn iter(&self) -> impl Iterator<Item = (&FqmElement, &Rational, &Rational)> {
        self.coeffs.iter().map(|((g, n), c)| (g, n, c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Exponents `n ∈ [0, prec)` with `n + Q(γ) ∈ Z`, ascending.
    pub fn exponents(&self, gamma: &FqmElement) -> Vec<Rational> {
        exponents_below(&self.module, gamma, &self.prec)
    }

    /// Same expansion, fewer terms.
    pub fn truncate(&self, prec: &Rational) -> Self {
        let prec = prec.min(&self.prec).clone();
        let coeffs = self.coeffs.iter().filter(|((_, n), _)| *n < prec).map(|(k, v)| (k.clone(), v.clone())).collect();
        Self { module: self.module.clone(), weight: self.weight, prec, coeffs }
    }

    pub fn scale(&self, a: &Rational) -> Self {
        let mut out = Self::zero(self.module.clone(), self.weight, self.prec.clone());
        if !a.is_zero() {
            out.coeffs = self.coeffs.iter().map(|(k, v)| (k.clone(), v * a)).collect();
        }
        out
    }

    /// `self + other`, truncated to the smaller precision.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.module != other.module || self.weight != other.weight {
            return Err(Error::ModuleMismatch(format!("cannot add expansions of weights {} and {}", self.weight, other.weight)));
        }
        let mut out = self.truncate(&other.prec);
        for ((g, n), c) in &other.coeffs {
            if *n < out.prec {
                let s = out.get(g, n) + c;
                out.set(g.clone(), n.clone(), s)?;
            }
        }
        Ok(out)
    }

    /// Least common denominator of all coefficients.
    pub fn common_denominator(&self) -> BigInt {
        self.coeffs.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    pub fn has_constant_term(&self) -> bool {
        self.coeffs.keys().any(|(_, n)| n.is_zero())
    }

    /// `c(n, γ) = -c(n, -γ)` for every index below the precision.
    pub fn is_antisymmetric(&self) -> bool {
        self.coeffs.iter().all(|((g, n), c)| self.get(&self.module.neg(g), n) == -c)
    }

    pub fn is_symmetric(&self) -> bool {
        self.coeffs.iter().all(|((g, n), c)| self.get(&self.module.neg(g), n) == *c)
    }

    /// The coefficient vector over a fixed index list.
    pub fn vector(&self, index: &[(FqmElement, Rational)]) -> Vec<Rational> {
        index.iter().map(|(g, n)| self.get(g, n)).collect()
    }
}

pub fn exponents_below(module: &FiniteQuadraticModule, gamma: &FqmElement, prec: &Rational) -> Vec<Rational> {
    let q = module.qvalue(gamma);
    let mut n = if q.is_zero() { int(0) } else { int(1) - q };
    let mut out = Vec::new();
    while n < *prec {
        out.push(n.clone());
        n += int(1);
    }
    out
}

/// All `(γ, n)` with `0 < n < prec` (or `0 ≤ n` when `with_constant`).
pub fn index_set(module: &FiniteQuadraticModule, prec: &Rational, with_constant: bool) -> Vec<(FqmElement, Rational)> {
    let mut out = Vec::new();
    for g in module.elements() {
        for n in exponents_below(module, &g, prec) {
            if with_constant || !n.is_zero() {
                out.push((g.clone(), n));
            }
        }
    }
    out
}
