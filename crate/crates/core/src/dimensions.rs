//! Dimensions of `M_k(ρ*)` and `S_k(ρ*)` in antisymmetric weights, i.e. when
//! `k + sig/2` is odd. The formula is a Riemann–Roch count with Gauss-sum
//! corrections from the elliptic points, evaluated in floating point and
//! rounded.

use alloc::vec::Vec;

use num_traits::Zero;

use crate::arith::{int, HalfInteger, Rational};
use crate::bernoulli::sawtooth;
use crate::error::{Error, Result};
use crate::quadmod::{e, FiniteQuadraticModule};

/// Largest accepted distance of the raw formula from an integer.
pub const ROUNDING_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct DimensionReport {
    pub weight: HalfInteger,
    pub dim_m: u64,
    pub dim_s: u64,
    /// isotropic `±` pairs `{γ, −γ}` with `γ ≠ −γ`
    pub alpha4_tilde: u64,
    pub b1: Rational,
    pub b2: Rational,
    /// all `±` pairs with `γ ≠ −γ`
    pub d_pairs: u64,
    pub numeric_residual: f64,
}

/// `true` iff `k + sig/2` is an odd integer.
pub fn is_antisymmetric_weight(module: &FiniteQuadraticModule, k: HalfInteger) -> bool {
    (k.twice() + module.signature() as i64).rem_euclid(4) == 2
}

pub fn dim_antisymmetric(module: &FiniteQuadraticModule, k: HalfInteger) -> Result<DimensionReport> {
    if !is_antisymmetric_weight(module, k) {
        return Err(Error::WrongParity { weight: k, signature: module.signature() });
    }
    if k.twice() <= 4 {
        return Err(Error::UnsupportedWeight(k));
    }
    let els = module.elements();
    let mut d_pairs = 0u64;
    let mut alpha4 = 0u64;
    let mut b1 = int(0);
    let mut b2 = int(0);
    for g in &els {
        let q = module.qvalue(g);
        let s = sawtooth(&q);
        if module.is_self_inverse(g) {
            b2 += &s;
        } else {
            d_pairs += 1;
            if q.is_zero() {
                alpha4 += 1;
            }
        }
        b1 += s;
    }
    d_pairs /= 2;
    alpha4 /= 2;

    let kf = k.to_f64();
    let sig = module.signature() as f64;
    let order = els.len() as f64;
    let g2 = module.gauss_sum(2);
    let g1 = module.gauss_sum(1);
    let gm3 = module.gauss_sum(-3);
    let t1 = d_pairs as f64 * (kf - 1.0) / 12.0;
    let t2 = (e((2.0 * (kf + 1.0) + sig) / 8.0) * g2.im / (4.0 * libm::sqrt(order))).re;
    let t3 = (e((4.0 * kf + 3.0 * sig - 10.0) / 24.0) * (g1 - gm3)).re / (3.0 * libm::sqrt(3.0 * order));
    let t4 = crate::arith::to_f64(&(int(alpha4 as i64) + &b1 - &b2)) / 2.0;
    let raw = t1 + t2 - t3 + t4;
    let rounded = libm::round(raw);
    let residual = (raw - rounded).abs();
    if residual > ROUNDING_TOLERANCE {
        return Err(Error::NumericInconsistency { residual });
    }
    if rounded < alpha4 as f64 {
        return Err(Error::invariant("dim M_k is smaller than the number of isotropic pairs"));
    }
    let dim_m = rounded as u64;
    Ok(DimensionReport { weight: k, dim_m, dim_s: dim_m - alpha4, alpha4_tilde: alpha4, b1, b2, d_pairs, numeric_residual: residual })
}

/// Antisymmetric weights `k` with `from ≤ k ≤ to` (both in half-units).
pub fn antisymmetric_weights(module: &FiniteQuadraticModule, from: HalfInteger, to: HalfInteger) -> Vec<HalfInteger> {
    (from.twice()..=to.twice())
        .map(HalfInteger::from_twice)
        .filter(|&k| is_antisymmetric_weight(module, k))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadmod::EvenLattice;
    use proptest::prelude::*;

    fn module(g: &[&[i64]]) -> FiniteQuadraticModule {
        FiniteQuadraticModule::new(EvenLattice::new(g.iter().map(|r| r.to_vec()).collect()).unwrap()).unwrap()
    }

    fn dim_s(g: &[&[i64]], twice: i64) -> u64 {
        dim_antisymmetric(&module(g), HalfInteger::from_twice(twice)).unwrap().dim_s
    }

    #[test]
    fn anchors() {
        assert_eq!(dim_s(&[&[-2, -1], &[-1, 2]], 10), 1);
        assert_eq!(dim_s(&[&[-4]], 11), 1);
        assert_eq!(dim_s(&[&[-2, -1], &[-1, 2]], 6), 0);
        assert_eq!(dim_s(&[&[2, 1], &[1, -4]], 6), 0);
    }

    #[test]
    fn report_fields() {
        let r = dim_antisymmetric(&module(&[&[-4]]), HalfInteger::from_twice(11)).unwrap();
        // Z/4 with Q = -x²/8: one pair {1, 3}, no isotropic pair
        assert_eq!((r.d_pairs, r.alpha4_tilde, r.dim_m), (1, 0, 1));
        assert!(r.numeric_residual < 1e-9);
    }

    #[test]
    fn parity_and_small_weight() {
        let a = module(&[&[-4]]);
        assert!(matches!(dim_antisymmetric(&a, HalfInteger::from_twice(9)), Err(Error::WrongParity { .. })));
        // sig 7: k = 3/2 is antisymmetric but below the range
        assert!(matches!(dim_antisymmetric(&a, HalfInteger::from_twice(3)), Err(Error::UnsupportedWeight(_))));
    }

    #[test]
    fn trivial_module_has_no_antisymmetric_forms() {
        let a = FiniteQuadraticModule::trivial();
        for k in [3, 5, 7, 13, 25] {
            let r = dim_antisymmetric(&a, HalfInteger::from_int(k)).unwrap();
            assert_eq!((r.dim_m, r.dim_s), (0, 0), "k = {k}");
        }
    }

    fn small_gram() -> impl Strategy<Value = Vec<Vec<i64>>> {
        prop_oneof![
            (-12i64..=12).prop_filter("nonzero", |a| *a != 0).prop_map(|a| alloc::vec![alloc::vec![2 * a]]),
            (-4i64..=4, -4i64..=4, -4i64..=4).prop_map(|(a, b, c)| alloc::vec![alloc::vec![2 * a, b], alloc::vec![b, 2 * c]]),
        ]
        .prop_filter("nondegenerate", |g| crate::matrix::det(g) != num_bigint::BigInt::from(0))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn integral_and_monotone(g in small_gram(), base in 5i64..20) {
            let a = module(&g.iter().map(|r| r.as_slice()).collect::<Vec<_>>());
            for twice in [base, base + 1, base + 2, base + 3] {
                let k = HalfInteger::from_twice(twice);
                if !is_antisymmetric_weight(&a, k) {
                    continue;
                }
                let r = dim_antisymmetric(&a, k).unwrap();
                prop_assert!(r.numeric_residual < 1e-6);
                let r12 = dim_antisymmetric(&a, HalfInteger::from_twice(twice + 24)).unwrap();
                prop_assert!(r12.dim_s >= r.dim_s);
            }
        }
    }
}
