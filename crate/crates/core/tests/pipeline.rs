//! End-to-end paths through the public API: cusp forms into lifts, and the
//! weight-three forms against the class-number side.

use weilforms_core::arith::{int, rat};
use weilforms_core::classnum::{ideal_sum_q5, HurwitzTable};
use weilforms_core::cuspgen::{cusp_basis, r_series, CuspIndex};
use weilforms_core::dimensions::dim_antisymmetric;
use weilforms_core::eisenstein::eisenstein_qexp;
use weilforms_core::exec::{NoStore, Sequential};
use weilforms_core::modularity::modularity_residual;
use weilforms_core::thetalift::{doi_naganuma, swap_violations, theta_lift, LorentzianGram};
use weilforms_core::weight3::{cyclic_generator, cyclic_lattice, weight3_cyclic};
use weilforms_core::{EvenLattice, FiniteQuadraticModule, HalfInteger};

fn lattice(g: &[&[i64]]) -> EvenLattice {
    EvenLattice::new(g.iter().map(|r| r.to_vec()).collect()).unwrap()
}

#[test]
fn basis_of_the_level_two_module_lifts_to_level_two_forms() {
    let l = lattice(&[&[-4]]);
    let basis = cusp_basis(&l, HalfInteger::from_twice(11), Some(&int(4)), &Sequential, &NoStore).unwrap();
    assert_eq!(basis.len(), 1);
    let s = LorentzianGram::shimura(2).unwrap();
    let lift = theta_lift(&basis[0].1, &s, 5, &int(5), &Sequential).unwrap();
    let series = lift.scalar_series().unwrap();
    // proportional to q + 16q² − 156q³ + 256q⁴ + 870q⁵
    let c1 = series[0].1.clone();
    let want = [1, 16, -156, 256, 870];
    for ((_, c), w) in series.iter().zip(want) {
        assert_eq!(c / &c1, int(w));
    }
}

#[test]
fn hilbert_lift_of_the_weight_five_basis() {
    let l = lattice(&[&[-2, -1], &[-1, 2]]);
    let basis = cusp_basis(&l, HalfInteger::from_int(5), Some(&int(6)), &Sequential, &NoStore).unwrap();
    assert_eq!(basis.len(), 1);
    assert!(modularity_residual(&basis[0].1) < 1e-8);
    let lift = doi_naganuma(5, &basis[0].1, &int(4), &Sequential).unwrap();
    assert!(!lift.is_empty());
    assert!(swap_violations(&lift).is_empty());
}

#[test]
fn lift_input_must_match_the_lattice() {
    let l = lattice(&[&[-2, -1], &[-1, 2]]);
    let a = FiniteQuadraticModule::new(l.clone()).unwrap();
    let idx = CuspIndex::new(&a, rat(1, 5), a.dual_coset(&[rat(2, 5), rat(1, 5)]).unwrap()).unwrap();
    let f = r_series(&l, HalfInteger::from_int(5), &idx, &int(3), &Sequential, &NoStore).unwrap();
    assert!(doi_naganuma(13, &f, &int(2), &Sequential).is_err());
}

#[test]
fn eisenstein_series_are_modular_in_symmetric_weight() {
    for (g, twice) in [(vec![vec![2]], 7), (vec![vec![2, 1], vec![1, 2]], 10)] {
        let l = EvenLattice::new(g).unwrap();
        let e = eisenstein_qexp(&l, HalfInteger::from_twice(twice), &int(6), &Sequential, &NoStore).unwrap();
        assert!(e.is_symmetric());
        let r = modularity_residual(&e);
        assert!(r < 1e-6, "{twice}: {r}");
    }
}

#[test]
fn weight_three_for_level_thirteen() {
    let l = cyclic_lattice(13).unwrap();
    let a = FiniteQuadraticModule::new(l).unwrap();
    let e = cyclic_generator(&a, 13).unwrap();
    assert_eq!(a.qvalue(&e), int(1) - rat(1, 13));
    let f = weight3_cyclic(13, &int(4), &mut HurwitzTable::new()).unwrap();
    assert!(f.is_antisymmetric());
    let dim = dim_antisymmetric(&a, HalfInteger::from_int(3)).unwrap().dim_s;
    assert_eq!(f.is_empty(), dim == 0);
    if !f.is_empty() {
        assert!(modularity_residual(&f) < 1e-4);
    }
}

#[test]
fn ideal_sums_are_integral_multiples_of_a_fifth() {
    for m in [1, 4, 9, 11, 16, 19, 29, 31, 41, 44] {
        let s = ideal_sum_q5(m).unwrap();
        assert!((s * int(5)).is_integer(), "M = {m}");
    }
}
