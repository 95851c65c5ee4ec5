//! Fourier coefficients of the vector-valued Eisenstein series `E_κ` for the
//! dual Weil representation of an even lattice.
//!
//! For `n > 0` the coefficient is
//!
//! ```text
//! c(n,γ) = e(-(2κ+sig)/8) (2π)^κ n^{κ-1} / (Γ(κ) √|A|) · ∏_{p∈S} L_p(κ - r/2) · (good-prime part)
//! ```
//!
//! where `L_p(s) = Σ_ν p^{-νs}(D(ν) - D(ν-1))` runs over the density sequence
//! of `Q(x+γ) ≡ -n`, and the good-prime part is an L-value ratio of a
//! quadratic character with its Euler factors at `S` removed. The
//! transcendental parts cancel against the L-values, which are evaluated
//! through generalized Bernoulli numbers, so the result is exact. The sign
//! convention was pinned by `E_4`, Cohen's `E_{7/2}` and the lifted cusp
//! forms downstream.

use alloc::collections::BTreeMap;
use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::{big, fundamental_discriminant, int, is_integer, pow, prime_divisors_big, sqrt_exact, HalfInteger, Rational};
use crate::bernoulli::{bernoulli, generalized_bernoulli, QuadraticCharacter};
use crate::density::{local_factor, start_level, PrimeCounter};
use crate::error::{Error, Result};
use crate::exec::{DensityKey, DensityStore, ParMap};
use crate::qexp::{exponents_below, QExpansion};
use crate::quadmod::{DiscriminantGroup, EvenLattice, FiniteQuadraticModule, FqmElement};

/// Lowest weight with an absolutely convergent series.
pub const MIN_TWICE_WEIGHT: i64 = 5;

/// Coefficient engine for one lattice and weight.
#[derive(Debug, Clone)]
pub struct EisensteinSeries {
    lattice: EvenLattice,
    group: DiscriminantGroup,
    kappa: HalfInteger,
    sig: u8,
    det: BigInt,
}

impl EisensteinSeries {
    pub fn new(lattice: &EvenLattice, kappa: HalfInteger) -> Result<Self> {
        if kappa.twice() < MIN_TWICE_WEIGHT {
            return Err(Error::UnsupportedWeight(kappa));
        }
        Ok(Self {
            group: DiscriminantGroup::new(lattice)?,
            lattice: lattice.clone(),
            kappa,
            sig: lattice.signature_mod8(),
            det: lattice.det(),
        })
    }

    pub fn lattice(&self) -> &EvenLattice {
        &self.lattice
    }

    /// `κ + sig/2` even; otherwise the series vanishes identically.
    pub fn is_symmetric(&self) -> bool {
        (self.kappa.twice() + self.sig as i64).rem_euclid(4) == 0
    }

    /// Coefficients `c(n, γ)` for one class `γ` (any dual representative)
    /// and several exponents. Density sequences are shared across the
    /// exponents.
    pub fn coefficients(&self, gamma: &[Rational], ns: &[Rational], store: &dyn DensityStore) -> Result<Vec<Rational>> {
        let coords = self.group.coords(&self.lattice, gamma)?;
        let integral = gamma.iter().all(is_integer);
        let mut counters: BTreeMap<u64, PrimeCounter> = BTreeMap::new();
        ns.iter()
            .map(|n| {
                if n.is_zero() {
                    return Ok(int(integral as i64));
                }
                if !self.is_symmetric() {
                    return Ok(int(0));
                }
                self.coefficient_with(gamma, &coords, n, &mut counters, store)
            })
            .collect()
    }

    fn coefficient_with(
        &self,
        gamma: &[Rational],
        coords: &[u64],
        n: &Rational,
        counters: &mut BTreeMap<u64, PrimeCounter>,
        store: &dyn DensityStore,
    ) -> Result<Rational> {
        if !n.is_positive() {
            return Err(Error::IndexMismatch(alloc::format!("exponent {n} must be positive")));
        }
        let q_gamma = self.lattice.q(gamma);
        let shifted = n + &q_gamma;
        if !is_integer(&shifted) {
            return Err(Error::IndexMismatch(alloc::format!("exponent {n} is not in Z - Q(gamma)")));
        }
        let target = -n.clone();
        let r = self.lattice.rank() as i64;
        let kappa = self.kappa.to_rational();
        let s = &kappa - Rational::new(BigInt::from(r), BigInt::from(2));
        if !is_integer(&s) {
            return Err(Error::WrongParity { weight: self.kappa, signature: self.sig });
        }
        let s = s.to_integer().to_i64().unwrap();

        let mut bad: BTreeSet<u64> = BTreeSet::new();
        bad.insert(2);
        bad.extend(prime_divisors_big(&self.det));
        bad.extend(prime_divisors_big(n.numer()));
        bad.extend(prime_divisors_big(n.denom()));
        bad.extend(prime_divisors_big(&shifted.to_integer()));

        let mut local = int(1);
        for &p in &bad {
            let key = DensityKey { gram: self.lattice.gram().clone(), prime: p, target: target.clone(), gamma: coords.to_vec() };
            let record = match store.load(&key) {
                Some(rec) => rec,
                None => {
                    if !counters.contains_key(&p) {
                        counters.insert(p, PrimeCounter::new(&self.lattice, gamma, p)?);
                    }
                    let pc = counters.get_mut(&p).unwrap();
                    let rec = pc.stabilized(&target, start_level(&self.lattice, p, &target))?;
                    store.save(&key, &rec);
                    rec
                }
            };
            local *= local_factor(&record, s);
        }

        // e(-(2κ + sig)/8) = ±1 on symmetric weights
        let phase_exp = (self.kappa.twice() + self.sig as i64) / 4;
        let phase = if phase_exp % 2 == 0 { int(1) } else { int(-1) };
        let abs_det = big(self.det.abs());

        let value = if r % 2 == 0 {
            let k = self.kappa.twice() / 2;
            let d = if (r / 2) % 2 == 0 { big(self.det.clone()) } else { -big(self.det.clone()) };
            let chi = QuadraticCharacter::new(fundamental_discriminant(&d));
            let f = big(BigInt::from(chi.conductor()));
            let delta = chi.parity() as i64;
            if (k - delta) % 2 != 0 {
                return Err(Error::invariant("character parity does not match the weight"));
            }
            let sign = if (1 + (k - delta) / 2) % 2 == 0 { int(1) } else { int(-1) };
            let b = generalized_bernoulli(&chi, k as usize);
            let root = sqrt_exact(&(&abs_det * &f)).ok_or_else(|| Error::invariant("|A|·f is not a square"))?;
            let mut euler = int(1);
            for &p in &bad {
                let chi_p = chi.value(p as u128) as i64;
                euler *= (int(1) - int(chi_p) * pow(&int(p as i64), -k)).recip();
            }
            phase * sign * int(2 * k) * pow(n, k - 1) * pow(&f, k) / (root * b) * local * euler
        } else {
            let k0 = (self.kappa.twice() - 1) / 2;
            let mut d = int(2) * &target * big(self.det.clone());
            if ((r - 1) / 2) % 2 == 1 {
                d = -d;
            }
            let chi = QuadraticCharacter::new(fundamental_discriminant(&d));
            let f = big(BigInt::from(chi.conductor()));
            let delta = chi.parity() as i64;
            if (k0 - delta) % 2 != 0 {
                return Err(Error::invariant("character parity does not match the weight"));
            }
            let e = 1 + (k0 - delta) / 2 + k0 + 1;
            let sign = if e % 2 == 0 { int(1) } else { int(-1) };
            let b_chi = generalized_bernoulli(&chi, k0 as usize);
            let b_2k = bernoulli(2 * k0 as usize);
            let root = sqrt_exact(&(int(2) * n * &f / &abs_det)).ok_or_else(|| Error::invariant("2nf/|A| is not a square"))?;
            let mut euler = int(1);
            for &p in &bad {
                let pp = int(p as i64);
                let chi_p = chi.value(p as u128) as i64;
                euler *= (int(1) - int(chi_p) * pow(&pp, -k0)) / (int(1) - pow(&pp, -2 * k0));
            }
            phase * sign * pow(&int(4), k0) * pow(n, k0 - 1) * pow(&f, -k0) * b_chi / b_2k * root * local * euler
        };
        Ok(value)
    }
}

/// The expansion of `E_κ` for the discriminant module of `lattice`, all
/// exponents below `prec`. Antisymmetric weights give the zero expansion.
pub fn eisenstein_qexp<P: ParMap>(
    lattice: &EvenLattice,
    kappa: HalfInteger,
    prec: &Rational,
    par: &P,
    store: &dyn DensityStore,
) -> Result<QExpansion> {
    let engine = EisensteinSeries::new(lattice, kappa)?;
    let module = FiniteQuadraticModule::new(lattice.clone())?;
    let mut out = QExpansion::zero(module.clone(), kappa, prec.clone());
    if !engine.is_symmetric() {
        return Ok(out);
    }
    let jobs: Vec<(FqmElement, Vec<Rational>)> =
        module.elements().into_iter().map(|g| {
            let ns = exponents_below(&module, &g, prec);
            (g, ns)
        }).collect();
    let results = par.par_map(jobs, |(g, ns)| {
        let v = module.dual_vector(&g);
        engine.coefficients(&v, &ns, store).map(|cs| (g, ns, cs))
    });
    for res in results {
        let (g, ns, cs) = res?;
        for (n, c) in ns.into_iter().zip(cs) {
            out.set(g.clone(), n, c)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::exec::{NoStore, Sequential};

    fn lat(g: &[&[i64]]) -> EvenLattice {
        EvenLattice::new(g.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    fn sigma(k: u32, n: u64) -> i64 {
        (1..=n).filter(|d| n % d == 0).map(|d| (d as i64).pow(k)).sum()
    }

    #[test]
    fn rank_zero_weight_four_is_e4() {
        let l = lat(&[]);
        let f = eisenstein_qexp(&l, HalfInteger::from_int(4), &int(8), &Sequential, &NoStore).unwrap();
        let z = FqmElement::new(alloc::vec![]);
        assert_eq!(f.get(&z, &int(0)), int(1));
        for n in 1..8u64 {
            assert_eq!(f.get(&z, &int(n as i64)), int(240 * sigma(3, n)), "n = {n}");
        }
    }

    #[test]
    fn rank_zero_weight_six_is_e6() {
        let l = lat(&[]);
        let f = eisenstein_qexp(&l, HalfInteger::from_int(6), &int(5), &Sequential, &NoStore).unwrap();
        let z = FqmElement::new(alloc::vec![]);
        for n in 1..5u64 {
            assert_eq!(f.get(&z, &int(n as i64)), int(-504 * sigma(5, n)), "n = {n}");
        }
    }

    #[test]
    fn cohen_weight_seven_halves() {
        // Cohen's weight 7/2 series 1 + 56q³ + 126q⁴ + 576q⁷ + 756q⁸ + 1512q¹¹ + 2072q¹² in q = e(τ/4)
        let l = lat(&[&[2]]);
        let f = eisenstein_qexp(&l, HalfInteger::from_twice(7), &int(4), &Sequential, &NoStore).unwrap();
        let (z, h) = (FqmElement::new(alloc::vec![0]), FqmElement::new(alloc::vec![1]));
        assert_eq!(f.get(&h, &rat(3, 4)), int(56));
        assert_eq!(f.get(&z, &int(1)), int(126));
        assert_eq!(f.get(&h, &rat(7, 4)), int(576));
        assert_eq!(f.get(&z, &int(2)), int(756));
        assert_eq!(f.get(&h, &rat(11, 4)), int(1512));
        assert_eq!(f.get(&z, &int(3)), int(2072));
    }

    #[test]
    fn constant_terms_and_parity() {
        let l = lat(&[&[2, 1], &[1, 2]]);
        // sig = 2: weight 4 is antisymmetric, weight 5 symmetric
        let f = eisenstein_qexp(&l, HalfInteger::from_int(4), &int(3), &Sequential, &NoStore).unwrap();
        assert!(f.is_empty());
        let f = eisenstein_qexp(&l, HalfInteger::from_int(5), &int(3), &Sequential, &NoStore).unwrap();
        let a = f.module().clone();
        for g in a.elements() {
            assert_eq!(f.get(&g, &int(0)), int((g == a.zero()) as i64));
        }
        assert!(f.is_symmetric());
        assert!(!f.is_empty());
        assert!(eisenstein_qexp(&l, HalfInteger::from_int(2), &int(3), &Sequential, &NoStore).is_err());
    }
}
