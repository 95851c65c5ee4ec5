//! Local representation densities
//! `D(ν) = p^{-ν(r-1)} · #{x ∈ (Λ/p^νΛ) : Q(x + γ) ≡ t mod p^ν}`.
//!
//! The count goes through a p-adic Jordan splitting of the Gram matrix.
//! The unimodular part (diagonal units for odd p, even unimodular planes for
//! p = 2) is counted by closed Hensel formulas, scaled blocks with integral
//! shift likewise, and only the remaining small blocks are enumerated. Value
//! distributions are combined by cyclic convolution modulo `p^V`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::{big, int, is_integer, kronecker, residue, val, val_int, Rational};
use crate::error::{Error, Result};
use crate::exec::LocalDensityRecord;
use crate::matrix::{self, RatMatrix};
use crate::quadmod::EvenLattice;

/// Levels beyond `ν₀` tried before giving up.
pub const STABILIZATION_CAP: u32 = 8;

fn pw(p: u64, e: u32) -> u128 {
    (p as u128).pow(e)
}

fn overflow() -> Error {
    Error::Overflow(String::from("local density count exceeds 128 bits"))
}

// ------------------------------------------------------------------ split

#[derive(Debug, Clone)]
struct Jordan {
    gram: RatMatrix,
    /// `(start, size)` of each block.
    blocks: Vec<(usize, usize)>,
    /// new basis vectors as columns
    basis: RatMatrix,
}

fn v_or_inf(x: &Rational, p: u64) -> i64 {
    val(x, p).unwrap_or(i64::MAX)
}

/// Block diagonalization over `Z_(p)` by congruence with a matrix in
/// `GL_r(Z_(p))`.
fn jordan_split(gram: &RatMatrix, p: u64) -> Jordan {
    let r = gram.len();
    let mut g = gram.clone();
    let mut u: RatMatrix = (0..r).map(|i| (0..r).map(|j| int((i == j) as i64)).collect()).collect();
    // e_j <- e_j + c e_k
    let addcol = |g: &mut RatMatrix, u: &mut RatMatrix, j: usize, k: usize, c: &Rational| {
        for i in 0..r {
            let t = c * &u[i][k];
            u[i][j] += t;
        }
        for i in 0..r {
            let t = c * &g[i][k];
            g[i][j] += t;
        }
        for i in 0..r {
            let t = c * &g[k][i];
            g[j][i] += t;
        }
    };
    let swap = |g: &mut RatMatrix, u: &mut RatMatrix, a: usize, b: usize| {
        if a == b {
            return;
        }
        for row in u.iter_mut() {
            row.swap(a, b);
        }
        g.swap(a, b);
        for row in g.iter_mut() {
            row.swap(a, b);
        }
    };
    let mut blocks = Vec::new();
    let mut i = 0;
    while i < r {
        let mut vmin = i64::MAX;
        for j in i..r {
            for k in i..r {
                vmin = vmin.min(v_or_inf(&g[j][k], p));
            }
        }
        if let Some(j) = (i..r).find(|&j| v_or_inf(&g[j][j], p) == vmin) {
            swap(&mut g, &mut u, i, j);
            for l in i + 1..r {
                let c = -(&g[i][l] / &g[i][i]);
                addcol(&mut g, &mut u, l, i, &c);
            }
            blocks.push((i, 1));
            i += 1;
            continue;
        }
        let (j, k) = (i..r)
            .flat_map(|j| (j + 1..r).map(move |k| (j, k)))
            .find(|&(j, k)| v_or_inf(&g[j][k], p) == vmin)
            .expect("nondegenerate");
        if p != 2 {
            addcol(&mut g, &mut u, j, k, &int(1));
            continue;
        }
        swap(&mut g, &mut u, i, j);
        let k = if k == i { j } else { k };
        swap(&mut g, &mut u, i + 1, k);
        let (a, b, c) = (g[i][i].clone(), g[i][i + 1].clone(), g[i + 1][i + 1].clone());
        let d = &a * &c - &b * &b;
        for l in i + 2..r {
            let (x, y) = (g[i][l].clone(), g[i + 1][l].clone());
            let c1 = -(&c * &x - &b * &y) / &d;
            let c2 = -(&a * &y - &b * &x) / &d;
            addcol(&mut g, &mut u, l, i, &c1);
            addcol(&mut g, &mut u, l, i + 1, &c2);
        }
        blocks.push((i, 2));
        i += 2;
    }
    Jordan { gram: g, blocks, basis: u }
}

// ------------------------------------------------------------ closed forms

/// A nondegenerate quadratic form over `Z_p` with unit discriminant: a
/// diagonal of units for odd `p`, an orthogonal sum of even unimodular planes
/// for `p = 2`. Counts solutions of `Q(z) ≡ w mod p^ν` in closed form.
#[derive(Debug, Clone)]
struct UnitForm {
    p: u64,
    k: u32,
    /// Legendre symbol of `(-1)^{⌊k/2⌋}·Δ` (odd p) or the type `ε` (p = 2).
    chi: i32,
}

impl UnitForm {
    /// Solutions modulo p.
    fn n1(&self, u: u64) -> i128 {
        let p = self.p as i128;
        let k = self.k;
        if k == 0 {
            return (u == 0) as i128;
        }
        let top = p.pow(k - 1);
        if self.p == 2 {
            let t = 2i128.pow(k / 2 - 1) * self.chi as i128;
            return if u == 0 { top + t } else { top - t };
        }
        if k % 2 == 0 {
            let v = if u == 0 { p - 1 } else { -1 };
            top + v * p.pow((k - 2) / 2) * self.chi as i128
        } else if u == 0 {
            top
        } else {
            let eta = kronecker(&BigInt::from(u), self.p as u128) as i128;
            top + p.pow((k - 1) / 2) * eta * self.chi as i128
        }
    }

    /// `#{z mod p^ν : Q(z) ≡ w mod p^ν}`, `w` reduced mod `p^ν`.
    fn count(&self, nu: u32, w: u128) -> Result<u128> {
        if nu == 0 {
            return Ok(1);
        }
        let p = self.p as u128;
        let w0 = (w % p) as u64;
        let prim = self.n1(w0) - (w0 == 0) as i128;
        let mut total: u128 = if self.k == 0 {
            0
        } else {
            let lift = (p).checked_pow((nu - 1) * (self.k - 1)).ok_or_else(overflow)?;
            u128::try_from(prim).map_err(|_| Error::invariant("negative primitive count"))?.checked_mul(lift).ok_or_else(overflow)?
        };
        if nu == 1 {
            total += (w0 == 0) as u128;
        } else if w % (p * p) == 0 {
            let inner = self.count(nu - 2, (w / (p * p)) % pw(self.p, nu - 2))?;
            let f = p.checked_pow(self.k).ok_or_else(overflow)?;
            total = total.checked_add(inner.checked_mul(f).ok_or_else(overflow)?).ok_or_else(overflow)?;
        }
        Ok(total)
    }

    /// Counts for `p^e · Q` with `z` modulo `p^V`.
    fn count_scaled(&self, e: u32, level: u32, w: u128) -> Result<u128> {
        let m = pw(self.p, level);
        let w = w % m;
        if level <= e {
            return if w == 0 { p_pow_checked(self.p, level * self.k) } else { Ok(0) };
        }
        let pe = pw(self.p, e);
        if w % pe != 0 {
            return Ok(0);
        }
        let inner = self.count(level - e, w / pe)?;
        inner.checked_mul(p_pow_checked(self.p, e * self.k)?).ok_or_else(overflow)
    }
}

fn p_pow_checked(p: u64, e: u32) -> Result<u128> {
    (p as u128).checked_pow(e).ok_or_else(overflow)
}

fn unit_form_odd(p: u64, units: &[Rational]) -> UnitForm {
    let k = units.len() as u32;
    let mut delta = int(1);
    for u in units {
        delta *= u;
    }
    if (k / 2) % 2 == 1 {
        delta = -delta;
    }
    let chi = if k == 0 { 1 } else { kronecker(&(delta.numer() * delta.denom()), p as u128) };
    UnitForm { p, k, chi }
}

fn unit_form_two(k: u32, det: &Rational) -> UnitForm {
    let mut d = det.clone();
    if (k / 2) % 2 == 1 {
        d = -d;
    }
    let chi = if k == 0 { 1 } else { kronecker(&(d.numer() * d.denom()), 2) };
    UnitForm { p: 2, k, chi }
}

// ------------------------------------------------------------ per-prime data

/// A block whose value distribution is materialized.
#[derive(Debug, Clone)]
enum Piece {
    /// `p^e·U(z) - U(g)`-style block counted in closed form; `shift` is `Q_B(g)`.
    Scaled { form: UnitForm, e: u32, shift: Rational, dim: u32 },
    /// Enumerated: `a y² + l y`.
    One { a: Rational, l: Rational },
    /// Enumerated: `a y₁² + b y₁y₂ + c y₂² + l₁y₁ + l₂y₂`.
    Two { a: Rational, b: Rational, c: Rational, l1: Rational, l2: Rational },
}

impl Piece {
    fn dim(&self) -> u32 {
        match self {
            Piece::Scaled { dim, .. } => *dim,
            Piece::One { .. } => 1,
            Piece::Two { .. } => 2,
        }
    }

    /// Sparse distribution of values mod `p^V`.
    fn distribution(&self, p: u64, level: u32) -> Result<Vec<(u128, u128)>> {
        let m = pw(p, level);
        let mut out = Vec::new();
        match self {
            Piece::Scaled { form, e, shift, .. } => {
                let s = residue(shift, m);
                for w in 0..m {
                    let c = form.count_scaled(*e, level, (w + s) % m)?;
                    if c != 0 {
                        out.push((w, c));
                    }
                }
            }
            Piece::One { a, l } => {
                let (a, l) = (residue(a, m), residue(l, m));
                let dense = linearized_distribution(p, level, 1, |y| {
                    let v = (a * y[0] % m * y[0] + l * y[0]) % m;
                    (v, [(2 * a * y[0] + l) % m, 0])
                });
                out.extend(dense.into_iter().enumerate().filter(|(_, c)| *c != 0).map(|(w, c)| (w as u128, c)));
            }
            Piece::Two { a, b, c, l1, l2 } => {
                let (a, b, c, l1, l2) = (residue(a, m), residue(b, m), residue(c, m), residue(l1, m), residue(l2, m));
                let dense = linearized_distribution(p, level, 2, |y| {
                    let (y1, y2) = (y[0], y[1]);
                    let v = (a * y1 % m * y1 + b * y1 % m * y2 + c * y2 % m * y2 + l1 * y1 + l2 * y2) % m;
                    let g1 = (2 * a * y1 + b * y2 + l1) % m;
                    let g2 = (b * y1 + 2 * c * y2 + l2) % m;
                    (v, [g1, g2])
                });
                out.extend(dense.into_iter().enumerate().filter(|(_, c)| *c != 0).map(|(w, c)| (w as u128, c)));
            }
        }
        Ok(out)
    }
}

/// Value counts of a quadratic polynomial `f` on `(Z/p^V)^k`, `k ≤ 2`.
///
/// With `2j ≥ V`, `f(y + p^j z) ≡ f(y) + p^j ∇f(y)·z mod p^V`, so only
/// `y mod p^j` is enumerated; as `z` runs over `(Z/p^{V−j})^k` the linear
/// term hits every multiple of `p^t`, `t = min(v_p(∇f(y)), V−j)`, equally often.
/// `eval` returns `f(y) mod p^V` and `∇f(y)` reduced mod `p^V`.
fn linearized_distribution(p: u64, level: u32, k: u32, eval: impl Fn([u128; 2]) -> (u128, [u128; 2])) -> Vec<u128> {
    let m = pw(p, level);
    let j = level.div_ceil(2);
    let (pj, rest) = (pw(p, j), pw(p, level - j));
    let mut dense = vec![0u128; m as usize];
    let ys: u128 = pj.pow(k);
    for idx in 0..ys {
        let y = [idx % pj, if k == 2 { idx / pj } else { 0 }];
        let (v, g) = eval(y);
        let mut t = level - j;
        for &gi in &g[..k as usize] {
            let mut x = gi % rest;
            let mut e = 0;
            while e < t && x % p as u128 == 0 {
                x /= p as u128;
                e += 1;
            }
            t = t.min(if gi % rest == 0 { level - j } else { e });
        }
        let step = pj * pw(p, t);
        let hits = pw(p, level - j - t);
        let mult = rest.pow(k) / hits;
        for u in 0..hits {
            dense[((v + step * u) % m) as usize] += mult;
        }
    }
    dense
}

/// Everything needed to count `Q(x+γ) ≡ t` at one prime for one shift class,
/// independent of `t`. Reused across targets.
#[derive(Debug, Clone)]
pub struct PrimeCounter {
    p: u64,
    rank: u32,
    q_gamma: Rational,
    unit: UnitForm,
    unit_shift: Rational,
    pieces: Vec<Piece>,
    other_dim: u32,
    level: u32,
    /// sparse distribution of the pieces modulo `p^level`
    other: Vec<(u128, u128)>,
}

impl PrimeCounter {
    pub fn new(lattice: &EvenLattice, gamma: &[Rational], p: u64) -> Result<Self> {
        let gram = matrix::to_rational(lattice.gram());
        let r = lattice.rank();
        let jd = jordan_split(&gram, p);
        let inv = matrix::inverse(&jd.basis).ok_or_else(|| Error::invariant("singular Jordan basis"))?;
        let g2 = matrix::mat_vec(&inv, gamma);
        let lin = matrix::mat_vec(&jd.gram, &g2);
        let half = |x: &Rational| x / int(2);
        let p_integral = |x: &Rational| v_or_inf(x, p) >= 0;
        if !lin.iter().all(p_integral) {
            return Err(Error::invariant("shift is not in the dual lattice at p"));
        }
        let g = &jd.gram;
        let mut unit_units = Vec::new();
        let mut unit_det = int(1);
        let mut unit_dim = 0u32;
        let mut unit_shift = int(0);
        let mut pieces = Vec::new();
        for &(i, size) in &jd.blocks {
            if size == 1 {
                let a = half(&g[i][i]);
                let gi = &g2[i];
                let e = v_or_inf(&a, p);
                if p != 2 && p_integral(gi) {
                    let shift = &a * gi * gi;
                    if e == 0 {
                        unit_units.push(a);
                        unit_dim += 1;
                        unit_shift += shift;
                    } else {
                        let u = &a / pow_p(p, e);
                        pieces.push(Piece::Scaled { form: unit_form_odd(p, &[u]), e: e as u32, shift, dim: 1 });
                    }
                } else {
                    pieces.push(Piece::One { a, l: lin[i].clone() });
                }
            } else {
                let a = half(&g[i][i]);
                let b = g[i][i + 1].clone();
                let c = half(&g[i + 1][i + 1]);
                let (x, y) = (&g2[i], &g2[i + 1]);
                let e = v_or_inf(&b, p);
                if p_integral(x) && p_integral(y) {
                    let shift = &a * x * x + &b * x * y + &c * y * y;
                    let det = int(4) * &a * &c - &b * &b;
                    if e == 0 {
                        unit_dim += 2;
                        unit_det *= det;
                        unit_shift += shift;
                    } else {
                        let s = pow_p(p, e);
                        let det_u = det / (&s * &s);
                        pieces.push(Piece::Scaled { form: unit_form_two(2, &det_u), e: e as u32, shift, dim: 2 });
                    }
                } else {
                    pieces.push(Piece::Two { a, b, c, l1: lin[i].clone(), l2: lin[i + 1].clone() });
                }
            }
        }
        let unit = if p == 2 { unit_form_two(unit_dim, &unit_det) } else { unit_form_odd(p, &unit_units) };
        let other_dim = pieces.iter().map(Piece::dim).sum();
        let q_gamma = lattice.q(gamma);
        Ok(Self {
            p,
            rank: r as u32,
            q_gamma,
            unit,
            unit_shift,
            pieces,
            other_dim,
            level: 0,
            other: vec![(0, 1)],
        })
    }

    fn ensure_level(&mut self, level: u32) -> Result<()> {
        if level <= self.level {
            return Ok(());
        }
        let m = pw(self.p, level);
        let mut dist: Vec<(u128, u128)> = vec![(0, 1)];
        if !self.pieces.is_empty() {
            if m > (1 << 22) {
                return Err(Error::Overflow(format!("density modulus {}^{level} too large", self.p)));
            }
            let mut dense = vec![0u128; m as usize];
            dense[0] = 1;
            for piece in &self.pieces {
                let d = piece.distribution(self.p, level)?;
                let mut next = vec![0u128; m as usize];
                for (w, c) in d {
                    for (i, &x) in dense.iter().enumerate() {
                        if x != 0 {
                            let j = ((i as u128 + w) % m) as usize;
                            next[j] = next[j].checked_add(x.checked_mul(c).ok_or_else(overflow)?).ok_or_else(overflow)?;
                        }
                    }
                }
                dense = next;
            }
            dist = dense.into_iter().enumerate().filter(|(_, c)| *c != 0).map(|(w, c)| (w as u128, c)).collect();
        }
        self.level = level;
        self.other = dist;
        Ok(())
    }

    /// `#{x mod p^ν : Q(x+γ) ≡ target}` for `ν ≤ self.level`.
    fn count(&self, nu: u32, target: &Rational) -> Result<u128> {
        let m = pw(self.p, nu);
        let t = residue(&(target - &self.q_gamma), m);
        let c_u = residue(&self.unit_shift, m);
        // fold the materialized distribution down to level nu
        let mut folded: BTreeMap<u128, u128> = BTreeMap::new();
        for &(w, c) in &self.other {
            let slot = folded.entry(w % m).or_insert(0);
            *slot = slot.checked_add(c).ok_or_else(overflow)?;
        }
        let lift = p_pow_checked(self.p, (self.level - nu) * self.other_dim)?;
        let mut total: u128 = 0;
        for (&w, &c) in &folded {
            debug_assert_eq!(c % lift, 0);
            let s = (t + m - w + c_u) % m;
            let n_u = self.unit.count(nu, s)?;
            total = total.checked_add((c / lift).checked_mul(n_u).ok_or_else(overflow)?).ok_or_else(overflow)?;
        }
        Ok(total)
    }

    /// `D(0), …, D(level)` for the given target.
    pub fn levels(&mut self, target: &Rational, level: u32) -> Result<Vec<Rational>> {
        if v_or_inf(&(target - &self.q_gamma), self.p) < 0 {
            return Err(Error::invariant("target - Q(gamma) is not p-integral"));
        }
        self.ensure_level(level)?;
        let p = big(BigInt::from(self.p));
        let r1 = self.rank as i64 - 1;
        (0..=level)
            .map(|nu| {
                let c = self.count(nu, target)?;
                Ok(big(BigInt::from(c)) / crate::arith::pow(&p, nu as i64 * r1))
            })
            .collect()
    }

    /// First `ν ≥ ν₀` with `D(ν) = D(ν+1)`, searched up to `ν₀ + cap`.
    pub fn stabilized(&mut self, target: &Rational, nu0: u32) -> Result<LocalDensityRecord> {
        let mut level = nu0 + 1;
        loop {
            let ds = self.levels(target, level)?;
            if let Some(nu) = (nu0..level).find(|&nu| ds[nu as usize] == ds[nu as usize + 1]) {
                let mut levels = ds;
                levels.truncate(nu as usize + 2);
                return Ok(LocalDensityRecord { prime: self.p, stabilized_at: nu, value: levels[nu as usize].clone(), levels });
            }
            if level > nu0 + STABILIZATION_CAP {
                return Err(Error::StabilizationFailure { prime: self.p, level: nu0 + STABILIZATION_CAP });
            }
            level = (level + 2).min(nu0 + STABILIZATION_CAP + 1);
        }
    }
}

fn pow_p(p: u64, e: i64) -> Rational {
    crate::arith::pow(&big(BigInt::from(p)), e)
}

/// `ν₀ = v_p(4 · den(t) · num(4t·det) · det) + 3`.
pub fn start_level(lattice: &EvenLattice, p: u64, target: &Rational) -> u32 {
    let det = lattice.det();
    let mut v = 2 * (p == 2) as u32 + val_int(&det, p);
    v += val_int(target.denom(), p);
    let x = target * big(det.clone()) * int(4);
    if !x.is_zero() {
        v += val_int(x.numer(), p);
    }
    v + 3
}

/// The stabilized density at `p` for `Q(x+γ) ≡ target`.
pub fn local_density(lattice: &EvenLattice, p: u64, target: &Rational, gamma: &[Rational]) -> Result<LocalDensityRecord> {
    if !lattice.in_dual(gamma) {
        return Err(Error::NotInDual);
    }
    let mut pc = PrimeCounter::new(lattice, gamma, p)?;
    pc.stabilized(target, start_level(lattice, p, target))
}

/// `Σ_ν p^{-νs}(D(ν) - D(ν-1))` over a stabilized sequence.
pub fn local_factor(record: &LocalDensityRecord, s: i64) -> Rational {
    let p = big(BigInt::from(record.prime));
    let ps = crate::arith::pow(&p, -s);
    let mut acc = int(0);
    let mut scale = int(1);
    let mut prev = int(0);
    for d in &record.levels {
        acc += &scale * (d - &prev);
        prev = d.clone();
        scale *= &ps;
    }
    acc
}

/// `true` iff `x` is an integer vector.
pub fn is_lattice_vector(v: &[Rational]) -> bool {
    v.iter().all(is_integer)
}

/// The denominators of `x` (for bad-prime sets).
pub fn primes_of(x: &Rational) -> Vec<u64> {
    let mut out = crate::arith::prime_divisors_big(x.denom());
    if !x.is_zero() {
        out.extend(crate::arith::prime_divisors_big(x.numer()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use proptest::prelude::*;

    /// Direct count over `(Z/p^ν)^r`.
    fn brute(lattice: &EvenLattice, p: u64, nu: u32, target: &Rational, gamma: &[Rational]) -> u128 {
        let r = lattice.rank();
        let m = (p as i64).pow(nu);
        let mut x = vec![0i64; r];
        let mut count = 0;
        loop {
            let v: Vec<Rational> = x.iter().zip(gamma).map(|(a, g)| int(*a) + g).collect();
            let d = lattice.q(&v) - target;
            if is_integer(&(&d / int(m))) {
                count += 1;
            }
            let mut i = 0;
            loop {
                if i == r {
                    return count;
                }
                x[i] += 1;
                if x[i] < m {
                    break;
                }
                x[i] = 0;
                i += 1;
            }
        }
    }

    fn lat(g: &[&[i64]]) -> EvenLattice {
        EvenLattice::new(g.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn rank_one_counts_mod_powers_of_three() {
        // #{x mod 3^ν : x² ≡ 1} = 2 for every ν
        let l = lat(&[&[2]]);
        let mut pc = PrimeCounter::new(&l, &[int(0)], 3).unwrap();
        let ds = pc.levels(&int(1), 3).unwrap();
        assert_eq!(ds, [int(1), int(2), int(2), int(2)]);
        for nu in 1..=3 {
            assert_eq!(brute(&l, 3, nu, &int(1), &[int(0)]), 2);
        }
        let rec = local_density(&l, 3, &int(1), &[int(0)]).unwrap();
        assert_eq!(rec.value, int(2));
        assert_eq!(rec.levels[rec.stabilized_at as usize], rec.levels[rec.stabilized_at as usize + 1]);
    }

    #[test]
    fn unit_form_counts_match_brute_force() {
        for p in [3u64, 5, 7] {
            for units in [&[1i64][..], &[1, 2], &[1, 1, 2], &[2, 4, 1, 1]] {
                let k = units.len();
                let rats: Vec<Rational> = units.iter().map(|&u| int(u)).collect();
                let form = unit_form_odd(p, &rats);
                for nu in 0..=2u32 {
                    let m = p.pow(nu) as i64;
                    let mut hist = vec![0u128; m.max(1) as usize];
                    let total = (m.max(1) as usize).pow(k as u32);
                    for idx in 0..total {
                        let mut z = idx;
                        let mut s = 0i64;
                        for &u in units {
                            let zi = (z % m.max(1) as usize) as i64;
                            z /= m.max(1) as usize;
                            s += u * zi * zi;
                        }
                        hist[s.rem_euclid(m.max(1)) as usize] += 1;
                    }
                    for w in 0..m.max(1) {
                        let expect = if nu == 0 { 1 } else { hist[w as usize] };
                        assert_eq!(form.count(nu, w as u128).unwrap(), expect, "p={p} units={units:?} nu={nu} w={w}");
                    }
                }
            }
        }
        for (plane, det) in [([1i64, 1, 1], 3i64), ([0, 1, 0], -1)] {
            let form = unit_form_two(2, &int(det));
            for nu in 1..=4u32 {
                let m = 1i64 << nu;
                for w in 0..m {
                    let mut c = 0;
                    for y1 in 0..m {
                        for y2 in 0..m {
                            let v = plane[0] * y1 * y1 + plane[1] * y1 * y2 + plane[2] * y2 * y2;
                            if (v - w).rem_euclid(m) == 0 {
                                c += 1;
                            }
                        }
                    }
                    assert_eq!(form.count(nu, w as u128).unwrap(), c, "plane={plane:?} nu={nu} w={w}");
                }
            }
        }
    }

    #[test]
    fn classical_euler_factor_for_e8() {
        // E8: D(ν) at a good prime p for t = 1 is 1 - p^{-4}
        let e8 = lat(&[
            &[2, -1, 0, 0, 0, 0, 0, 0],
            &[-1, 2, -1, 0, 0, 0, 0, 0],
            &[0, -1, 2, -1, 0, 0, 0, -1],
            &[0, 0, -1, 2, -1, 0, 0, 0],
            &[0, 0, 0, -1, 2, -1, 0, 0],
            &[0, 0, 0, 0, -1, 2, -1, 0],
            &[0, 0, 0, 0, 0, -1, 2, 0],
            &[0, 0, -1, 0, 0, 0, 0, 2],
        ]);
        assert_eq!(e8.det(), BigInt::from(1));
        let zero = vec![int(0); 8];
        for p in [3u64, 5, 7] {
            let rec = local_density(&e8, p, &int(1), &zero).unwrap();
            let pp = big(BigInt::from(p));
            assert_eq!(rec.value, int(1) - crate::arith::pow(&pp, -4), "p={p}");
        }
        let rec = local_density(&e8, 2, &int(1), &zero).unwrap();
        assert_eq!(rec.value, int(1) - rat(1, 16));
    }

    fn small_case() -> impl Strategy<Value = (EvenLattice, Vec<Rational>, u64, Rational)> {
        let grams = vec![
            vec![vec![2]],
            vec![vec![-4]],
            vec![vec![6]],
            vec![vec![2, 1], vec![1, -2]],
            vec![vec![2, 1], vec![1, 2]],
            vec![vec![4, 1], vec![1, -2]],
            vec![vec![0, 1], vec![1, 0]],
            vec![vec![2, 0], vec![0, 4]],
            vec![vec![-2, 1], vec![1, 4]],
            vec![vec![2, 1, 0], vec![1, 2, 1], vec![0, 1, -4]],
        ];
        (prop::sample::select(grams), 0usize..100, prop::sample::select(vec![2u64, 3, 5]), -6i64..6).prop_map(
            |(g, pick, p, shift)| {
                let l = EvenLattice::new(g).unwrap();
                let a = crate::quadmod::FiniteQuadraticModule::new(l.clone()).unwrap();
                let els = a.elements();
                let gamma = a.dual_vector(&els[pick % els.len()]);
                let target = crate::arith::frac(&l.q(&gamma)) + int(shift);
                (l, gamma, p, target)
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn counts_agree_with_brute_force((l, gamma, p, target) in small_case()) {
            let mut pc = PrimeCounter::new(&l, &gamma, p).unwrap();
            let max_nu = match (p, l.rank()) { (2, 3) => 3, (2, _) => 4, (_, 3) => 2, _ => 3 };
            let ds = pc.levels(&target, max_nu).unwrap();
            for nu in 0..=max_nu {
                let c = brute(&l, p, nu, &target, &gamma);
                let expect = big(BigInt::from(c)) / crate::arith::pow(&big(BigInt::from(p)), nu as i64 * (l.rank() as i64 - 1));
                prop_assert_eq!(&ds[nu as usize], &expect, "nu = {}", nu);
            }
        }

        #[test]
        fn stabilization_is_witnessed((l, gamma, p, target) in small_case()) {
            prop_assume!(!target.is_zero());
            let rec = local_density(&l, p, &target, &gamma).unwrap();
            let s = rec.stabilized_at as usize;
            prop_assert_eq!(&rec.levels[s], &rec.levels[s + 1]);
            prop_assert_eq!(&rec.value, &rec.levels[s]);
        }
    }
}
