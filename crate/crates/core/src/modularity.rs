//! Floating-point checks of the transformation law under the dual Weil
//! representation `ρ*`:
//!
//! ```text
//! ρ*(T) e_γ = e(-Q(γ)) e_γ
//! ρ*(S) e_γ = e(sig/8)/√|A| Σ_β e((γ,β)) e_β
//! ```

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::arith::to_f64;
use crate::qexp::QExpansion;
use crate::quadmod::{e, FiniteQuadraticModule};

pub type CMatrix = Vec<Vec<Complex64>>;

/// `ρ*(S)` and the diagonal of `ρ*(T)`, indexed by [`FiniteQuadraticModule::elements`].
pub fn weil_matrices(module: &FiniteQuadraticModule) -> (CMatrix, Vec<Complex64>) {
    let els = module.elements();
    let scale = e(module.signature() as f64 / 8.0) / libm::sqrt(els.len() as f64);
    let s = els
        .iter()
        .map(|b| els.iter().map(|g| scale * e(to_f64(&module.bilinear(g, b)))).collect())
        .collect();
    let t = els.iter().map(|g| e(-to_f64(&module.qvalue(g)))).collect();
    (s, t)
}

pub fn mat_mul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    let mut out = vec![vec![Complex64::new(0.0, 0.0); m]; n];
    for i in 0..n {
        for (k, bk) in b.iter().enumerate() {
            let aik = a[i][k];
            for j in 0..m {
                out[i][j] += aik * bk[j];
            }
        }
    }
    out
}

pub fn mat_apply(a: &CMatrix, v: &[Complex64]) -> Vec<Complex64> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

/// `f(τ)` as a vector over the module elements.
pub fn evaluate(f: &QExpansion, tau: Complex64) -> Vec<Complex64> {
    let module = f.module();
    let mut out = vec![Complex64::new(0.0, 0.0); module.order() as usize];
    let i2pi = Complex64::new(0.0, crate::quadmod::TAU);
    for (g, n, c) in f.iter() {
        out[module.index_of(g)] += to_f64(c) * (i2pi * to_f64(n) * tau).exp();
    }
    out
}

fn sup_dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn sup_norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Test points for the `S` relation.
pub fn sample_points() -> Vec<Complex64> {
    let mut pts: Vec<Complex64> = [60.0f64, 75.0, 90.0, 105.0, 120.0]
        .iter()
        .map(|deg| Complex64::from_polar(1.0, deg.to_radians()))
        .collect();
    pts.push(Complex64::new(0.1, 1.1));
    pts
}

/// Largest defect of `f(-1/τ) = τ^k ρ*(S) f(τ)` and `f(τ+1) = ρ*(T) f(τ)` over
/// [`sample_points`], relative to the size of `f` there (at least 1).
pub fn modularity_residual(f: &QExpansion) -> f64 {
    let (s, t) = weil_matrices(f.module());
    let k = f.weight().to_f64();
    let mut worst: f64 = 0.0;
    for tau in sample_points() {
        let ft = evaluate(f, tau);
        let scale = sup_norm(&ft).max(1.0);
        let lhs = evaluate(f, -tau.inv());
        let tk = (k * tau.ln()).exp();
        let rhs: Vec<Complex64> = mat_apply(&s, &ft).into_iter().map(|x| x * tk).collect();
        worst = worst.max(sup_dist(&lhs, &rhs) / scale);
        let shifted = evaluate(f, tau + 1.0);
        let rhs: Vec<Complex64> = ft.iter().zip(&t).map(|(x, y)| x * y).collect();
        worst = worst.max(sup_dist(&shifted, &rhs) / scale);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, HalfInteger};
    use crate::eisenstein::eisenstein_qexp;
    use crate::exec::{NoStore, Sequential};
    use crate::quadmod::EvenLattice;

    fn module(g: &[&[i64]]) -> FiniteQuadraticModule {
        FiniteQuadraticModule::new(EvenLattice::new(g.iter().map(|r| r.to_vec()).collect()).unwrap()).unwrap()
    }

    fn dist(a: &CMatrix, b: &CMatrix) -> f64 {
        a.iter().zip(b).map(|(x, y)| sup_dist(x, y)).fold(0.0, f64::max)
    }

    fn diag(t: &[Complex64]) -> CMatrix {
        let n = t.len();
        (0..n).map(|i| (0..n).map(|j| if i == j { t[i] } else { Complex64::new(0.0, 0.0) }).collect()).collect()
    }

    #[test]
    fn braid_relations_and_unitarity() {
        for g in [&[&[2i64][..]][..], &[&[-4]], &[&[-2, -1], &[-1, 2]], &[&[2, 1], &[1, -2]], &[&[6, 3], &[3, 4]]] {
            let a = module(g);
            let (s, t) = weil_matrices(&a);
            let st = mat_mul(&s, &diag(&t));
            let st3 = mat_mul(&mat_mul(&st, &st), &st);
            let s2 = mat_mul(&s, &s);
            assert!(dist(&st3, &s2) < 1e-9, "gram {g:?}");
            // S² e_γ = e(sig/4) e_{-γ}
            let els = a.elements();
            let z = e(a.signature() as f64 / 4.0);
            for (i, g) in els.iter().enumerate() {
                let j = a.index_of(&a.neg(g));
                for (b, row) in s2.iter().enumerate() {
                    let want = if b == j { z } else { Complex64::new(0.0, 0.0) };
                    assert!((row[i] - want).norm() < 1e-9);
                }
            }
            let id = diag(&vec![Complex64::new(1.0, 0.0); t.len()]);
            let sh: CMatrix = (0..s.len()).map(|i| (0..s.len()).map(|j| s[j][i].conj()).collect()).collect();
            assert!(dist(&mat_mul(&s, &sh), &id) < 1e-9);
        }
    }

    #[test]
    fn eisenstein_series_are_modular() {
        let cases: [(&[&[i64]], i64); 3] = [(&[&[2]], 7), (&[&[-4]], 9), (&[&[-2, -1], &[-1, 2]], 12)];
        for (g, twice) in cases {
            let l = EvenLattice::new(g.iter().map(|r| r.to_vec()).collect()).unwrap();
            let f = eisenstein_qexp(&l, HalfInteger::from_twice(twice), &int(8), &Sequential, &NoStore).unwrap();
            assert!(!f.is_empty(), "gram {g:?}");
            let r = modularity_residual(&f);
            assert!(r < 1e-8, "gram {g:?}: residual {r}");
            let mut bad = f.clone();
            let z = bad.module().zero();
            bad.set(z.clone(), int(1), f.get(&z, &int(1)) + int(1)).unwrap();
            assert!(modularity_residual(&bad) > 1e-4);
        }
    }
}
