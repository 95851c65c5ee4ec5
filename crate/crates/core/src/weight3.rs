//! Weight three for the cyclic modules `A = (1/N)Z/Z`, `Q(x) = −N x²`,
//! `N ≡ 1 mod 4`, at the index `(m, β) = (1/N, 1/N)`.
//!
//! Here the Jacobi Eisenstein series has weight 3/2 and is not holomorphic;
//! its holomorphic part has coefficients `−12·H(4n − N r²)` and the
//! correction collects the terms where `N r² − 4n` is a square. With
//! `t = N r` the coefficient of `qⁿ e_{g/N}` becomes
//!
//! ```text
//! −6 Σ_{t ≡ 2g (N)} t·H((4Nn − t²)/N)  +  correction
//! ```
//!
//! For square `N = M²` the correction is a finite sum over factorizations
//! of `4Nn`. Otherwise the solutions of `t² − N s² = 4Nn` fall into orbits
//! under a unit `η ≡ 1 mod N`, and each orbit sums to a geometric series in
//! `Q(√N)`.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::arith::{divisors, int, is_integer, is_square, rat, HalfInteger, Rational};
use crate::classnum::HurwitzTable;
use crate::error::{Error, Result};
use crate::qexp::{exponents_below, QExpansion};
use crate::quadfield::{congruence_unit, fundamental_unit, QuadraticNumber};
use crate::quadmod::{EvenLattice, FiniteQuadraticModule, FqmElement};

/// Largest number of norm-equation candidates scanned per orbit window.
pub const SEARCH_LIMIT: u64 = 5_000_000;

fn check_level(n: u64) -> Result<()> {
    if n < 5 || n % 4 != 1 {
        return Err(Error::UnsupportedModule(alloc::format!("N = {n} must be an odd integer ≡ 1 mod 4, at least 5")));
    }
    Ok(())
}

/// `[[2, 1], [1, (1−N)/2]]`: the dual vector `(−1/N, 2/N)` has `Q = −1/N`
/// and order `N`. Its negative only realizes `Q(x) = −Nx²` when −1 is a
/// square mod `N` (fine for 5 and 13, not for 9 or 21).
pub fn cyclic_lattice(n: u64) -> Result<EvenLattice> {
    check_level(n)?;
    let c = (1 - n as i64) / 2;
    EvenLattice::new(alloc::vec![alloc::vec![2, 1], alloc::vec![1, c]])
}

/// The element playing the role of `1/N`: the smallest with `Q = −1/N`.
pub fn cyclic_generator(module: &FiniteQuadraticModule, n: u64) -> Result<FqmElement> {
    let want = int(1) - rat(1, n as i64);
    module
        .elements()
        .into_iter()
        .find(|x| module.qvalue(x) == want && (1..n).all(|k| module.scale(x, k as i64) != module.zero()))
        .ok_or_else(|| Error::UnsupportedModule(alloc::format!("no element of order {n} with Q = -1/{n}")))
}

fn four_n_n(n_lvl: u64, g: u64, n: &Rational) -> Result<i128> {
    let x = int(4 * n_lvl as i64) * n;
    let shifted = n - rat((g * g) as i64, n_lvl as i64);
    if !is_integer(&x) || !is_integer(&shifted) {
        return Err(Error::IndexMismatch(alloc::format!("exponent {n} is not in Z + {g}²/{n_lvl}")));
    }
    x.to_integer().to_i128().ok_or_else(|| Error::Overflow(alloc::string::String::from("4Nn")))
}

/// `−6 Σ_{t ≡ 2g (N), t² ≤ 4Nn} t·H((4Nn − t²)/N)`.
pub fn holomorphic_part(n_lvl: u64, g: u64, n: &Rational, table: &mut HurwitzTable) -> Result<Rational> {
    check_level(n_lvl)?;
    let big_n = n_lvl as i128;
    let m4 = four_n_n(n_lvl, g, n)?;
    let c = (2 * g as i128).rem_euclid(big_n);
    let tmax = crate::arith::isqrt(m4.max(0) as u128) as i128;
    let mut total = int(0);
    // t ranges over c + N·Z inside [−tmax, tmax]
    let mut t = c - ((c + tmax) / big_n) * big_n;
    while t <= tmax {
        if t * t <= m4 {
            let arg = (m4 - t * t) / big_n;
            total += int(t as i64) * table.get(arg as u64);
        }
        t += big_n;
    }
    Ok(total * int(-6))
}

/// The non-holomorphic correction at `γ = g/N`, exponent `n`.
pub fn unit_orbit_correction(n_lvl: u64, g: u64, n: &Rational) -> Result<Rational> {
    check_level(n_lvl)?;
    let m4 = four_n_n(n_lvl, g, n)?;
    if m4 <= 0 {
        return Ok(int(0));
    }
    match is_square(n_lvl as i128) {
        Some(root) => square_correction(n_lvl, root, g, m4),
        None => {
            let c = (2 * g) % n_lvl;
            let plus = orbit_sum(n_lvl, c, m4)?;
            let minus = orbit_sum(n_lvl, (n_lvl - c) % n_lvl, m4)?;
            let diff = &plus - &minus;
            // N^{-1/2}(x + y√N) = y + (x/N)√N must be rational
            if !diff.a.is_zero() {
                return Err(Error::invariant("weight-three correction is not rational"));
            }
            Ok(rat(-3, 2) * diff.b)
        }
    }
}

/// `Σ sgn(t)·A·(|t| − M s)²/(32M)` over `t² − N s² = 4Nn`, `s ≥ 0`, `t ≡ 2g`,
/// with `A = −24` for `s = 0` and `−48` otherwise.
fn square_correction(n_lvl: u64, root: i128, g: u64, m4: i128) -> Result<Rational> {
    let big_n = n_lvl as i128;
    let c = (2 * g as i128).rem_euclid(big_n);
    let m4u = m4.to_u64().ok_or_else(|| Error::Overflow(alloc::string::String::from("4Nn")))?;
    let mut total = int(0);
    for u in divisors(m4u) {
        let v = m4u / u;
        if u > v || (u + v) % 2 != 0 {
            continue;
        }
        let t_abs = ((u + v) / 2) as i128;
        let diff = (v - u) as i128;
        if diff % (2 * root) != 0 {
            continue;
        }
        let s = diff / (2 * root);
        let a = if s == 0 { -24 } else { -48 };
        let sq = (t_abs - root * s) * (t_abs - root * s);
        for sign in [1i128, -1] {
            let t = sign * t_abs;
            if t.rem_euclid(big_n) == c {
                total += int((sign * a * sq) as i64);
            }
        }
    }
    Ok(total / int(32 * root as i64))
}

/// `S(c) = ½ Σ (α′² + α² η⁻²)/(1 − η⁻²)` over `α = t + s√N` of norm `4Nn`,
/// `t ≡ c mod N`, one `α` per orbit under `η`.
fn orbit_sum(n_lvl: u64, c: u64, m4: i128) -> Result<QuadraticNumber> {
    let d = n_lvl as i64;
    let eta = congruence_unit(d, n_lvl)?;
    // smallest norm-one unit > 1; η is a power of it
    let (fx, fy) = fundamental_unit(d)?;
    let eps = QuadraticNumber::from_ints(fx, fy, d);
    let eps1 = if eps.norm() == int(1) { eps } else { &eps * &eps };
    let mut steps = 1u32;
    let mut p = eps1.clone();
    while p != eta {
        p = &p * &eps1;
        steps += 1;
        if steps > 64 {
            return Err(Error::invariant("congruence unit is not a power of the norm-one unit"));
        }
    }
    let e1 = eps1.to_f64();
    let smax = libm::ceil(e1 * libm::sqrt(m4 as f64) / (2.0 * libm::sqrt(d as f64))) + 2.0;
    if smax > SEARCH_LIMIT as f64 {
        return Err(Error::Overflow(alloc::format!("orbit window for N = {n_lvl} needs {smax} candidates")));
    }
    let eta_inv2 = (&eta * &eta).inv()?;
    let one = QuadraticNumber::rational(int(1), d);
    let denom = (&one - &eta_inv2).inv()?;
    let eps1_sq = &eps1 * &eps1;
    let mut reps: Vec<QuadraticNumber> = Vec::new();
    for s in 0..=smax as i64 {
        let t2 = m4 + d as i128 * (s as i128) * (s as i128);
        let Some(t) = is_square(t2) else { continue };
        let alpha = QuadraticNumber::from_ints(BigInt::from(t), s, d);
        // window √(4Nn) ≤ α < ε₁√(4Nn), i.e. α < ε₁² α′
        if (&(&eps1_sq * &alpha.conj()) - &alpha).signum() > 0 {
            reps.push(alpha);
        }
    }
    let mut total = QuadraticNumber::rational(int(0), d);
    let nn = BigInt::from(n_lvl);
    for alpha in reps {
        let mut x = alpha;
        for _ in 0..steps {
            let t = x.a.to_integer();
            if ((t % &nn) + &nn) % &nn == BigInt::from(c) {
                let ac = x.conj();
                let num = &(&ac * &ac) + &(&(&x * &x) * &eta_inv2);
                total = &total + &(&num * &denom);
            }
            x = &x * &eps1;
        }
    }
    Ok(&total * &QuadraticNumber::rational(rat(1, 2), d))
}

/// The weight-three form at index `(1/N, 1/N)`, all exponents below `prec`.
pub fn weight3_cyclic(n_lvl: u64, prec: &Rational, table: &mut HurwitzTable) -> Result<QExpansion> {
    let lattice = cyclic_lattice(n_lvl)?;
    let module = FiniteQuadraticModule::new(lattice)?;
    let e = cyclic_generator(&module, n_lvl)?;
    let mut out = QExpansion::zero(module.clone(), HalfInteger::from_int(3), prec.clone());
    for g in 0..n_lvl {
        let gamma = module.scale(&e, g as i64);
        for n in exponents_below(&module, &gamma, prec) {
            if n.is_zero() {
                continue;
            }
            let value = holomorphic_part(n_lvl, g, &n, table)? + unit_orbit_correction(n_lvl, g, &n)?;
            out.set(gamma.clone(), n, value)?;
        }
    }
    Ok(out)
}
