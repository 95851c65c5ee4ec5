//! Theta lifts of vector-valued cusp forms to orthogonal modular forms for a
//! Lorentzian lattice `S` of signature `(1, ℓ−1)`:
//!
//! ```text
//! Φ_F(z) = Σ_{λ ∈ S⁻¹Zˡ ∩ C} Σ_{n ≥ 1} c(Q(λ), λ) n^{k−1} q^{nλ}
//! ```
//!
//! where `F` has weight `k + 1 − ℓ/2` for the discriminant module of `−S`.
//! The expansion is truncated by the height `⟨r, seed⟩ = rᵀ S seed`, where
//! `seed` picks the component `C` of the positive cone.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{int, is_integer, pow, to_f64, HalfInteger, Rational};
use crate::error::{Error, Result};
use crate::exec::ParMap;
use crate::matrix::{self, IntMatrix, RatMatrix};
use crate::qexp::QExpansion;
use crate::quadfield::QuadraticNumber;
use crate::quadmod::EvenLattice;

/// Largest number of lattice points scanned in one enumeration.
pub const BOX_LIMIT: u128 = 50_000_000;

/// An even lattice of signature `(1, ℓ−1)` with a vector of positive norm
/// marking one component of the positive cone.
#[derive(Debug, Clone, PartialEq)]
pub struct LorentzianGram {
    lattice: EvenLattice,
    seed: Vec<Rational>,
    inverse: RatMatrix,
}

impl LorentzianGram {
    pub fn new(gram: IntMatrix, seed: Vec<Rational>) -> Result<Self> {
        let lattice = EvenLattice::new(gram)?;
        let (p, q) = lattice.inertia();
        if p != 1 {
            return Err(Error::NotLorentzian(format!("inertia ({p}, {q})")));
        }
        if seed.len() != lattice.rank() {
            return Err(Error::NotLorentzian(format!("cone seed has length {}, expected {}", seed.len(), lattice.rank())));
        }
        if !lattice.q(&seed).is_positive() {
            return Err(Error::NotLorentzian(format!("cone seed has norm {} ≤ 0", lattice.q(&seed))));
        }
        let inverse = matrix::inverse(&matrix::to_rational(lattice.gram())).ok_or(Error::DegenerateModule)?;
        Ok(Self { lattice, seed, inverse })
    }

    /// `S = (2N)` with cone `{y > 0}`.
    pub fn shimura(n: u64) -> Result<Self> {
        Self::new(alloc::vec![alloc::vec![2 * n as i64]], alloc::vec![int(1)])
    }

    /// `S = [[2, 1], [1, (1−D)/2]]`, so `Q(v) = N(v₁ + v₂ω)`, with cone seed `(1, 0)`.
    pub fn doi_naganuma(d: i64) -> Result<Self> {
        if !is_fundamental_1mod4(d) {
            return Err(Error::UnsupportedModule(format!("D = {d} is not a fundamental discriminant ≡ 1 mod 4")));
        }
        Self::new(alloc::vec![alloc::vec![2, 1], alloc::vec![1, (1 - d) / 2]], alloc::vec![int(1), int(0)])
    }

    pub fn lattice(&self) -> &EvenLattice {
        &self.lattice
    }

    pub fn gram(&self) -> &IntMatrix {
        self.lattice.gram()
    }

    pub fn seed(&self) -> &[Rational] {
        &self.seed
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn q(&self, r: &[Rational]) -> Rational {
        self.lattice.q(r)
    }

    /// `⟨r, seed⟩`.
    pub fn height(&self, r: &[Rational]) -> Rational {
        self.lattice.pairing(r, &self.seed)
    }

    /// `S r`, integral exactly when `r ∈ S⁻¹Zˡ`.
    pub fn integral_coords(&self, r: &[Rational]) -> Vec<Rational> {
        matrix::int_mat_vec(self.gram(), r)
    }

    pub fn from_integral(&self, w: &[Rational]) -> Vec<Rational> {
        matrix::mat_vec(&self.inverse, w)
    }

    /// The lattice whose discriminant module carries the input forms.
    pub fn input_lattice(&self) -> EvenLattice {
        self.lattice.negated()
    }

    /// Weight of the input forms for lift weight `k`.
    pub fn input_weight(&self, k: u32) -> HalfInteger {
        HalfInteger::from_twice(2 * (k as i64 + 1) - self.rank() as i64)
    }
}

fn is_fundamental_1mod4(d: i64) -> bool {
    if d <= 1 || d % 4 != 1 {
        return false;
    }
    crate::arith::factor(d as u128).iter().all(|&(_, e)| e == 1)
}

/// Fourier coefficients `a(r)` of an orthogonal form, for `0 < ⟨r, seed⟩ ≤ height_bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalExpansion {
    s: LorentzianGram,
    weight: u32,
    height_bound: Rational,
    /// keyed by `(height, r)` so iteration is by height, then lexicographic
    coeffs: BTreeMap<(Rational, Vec<Rational>), Rational>,
}

impl OrthogonalExpansion {
    pub fn zero(s: LorentzianGram, weight: u32, height_bound: Rational) -> Self {
        Self { s, weight, height_bound, coeffs: BTreeMap::new() }
    }

    pub fn lattice(&self) -> &LorentzianGram {
        &self.s
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn height_bound(&self) -> &Rational {
        &self.height_bound
    }

    fn key(&self, r: &[Rational]) -> Result<(Rational, Vec<Rational>)> {
        if r.len() != self.s.rank() || !self.s.lattice.in_dual(r) {
            return Err(Error::NotInDual);
        }
        let h = self.s.height(r);
        if !h.is_positive() || h > self.height_bound {
            return Err(Error::IndexMismatch(format!("height {h} outside (0, {}]", self.height_bound)));
        }
        Ok((h, r.to_vec()))
    }

    pub fn set(&mut self, r: &[Rational], c: Rational) -> Result<()> {
        let key = self.key(r)?;
        if c.is_zero() {
            self.coeffs.remove(&key);
        } else {
            self.coeffs.insert(key, c);
        }
        Ok(())
    }

    pub fn get(&self, r: &[Rational]) -> Rational {
        let h = self.s.height(r);
        self.coeffs.get(&(h, r.to_vec())).cloned().unwrap_or_else(|| int(0))
    }

    /// Nonzero terms ordered by height, then lexicographically.
    pub fn iter(&self) -> impl Iterator<Item = (&Vec<Rational>, &Rational)> {
        self.coeffs.iter().map(|((_, r), c)| (r, c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, a: &Rational) -> Self {
        let mut out = Self::zero(self.s.clone(), self.weight, self.height_bound.clone());
        if !a.is_zero() {
            out.coeffs = self.coeffs.iter().map(|(k, c)| (k.clone(), c * a)).collect();
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.s != other.s || self.weight != other.weight {
            return Err(Error::ModuleMismatch(String::from("adding lifts for different lattices or weights")));
        }
        let bound = core::cmp::min(&self.height_bound, &other.height_bound).clone();
        let mut out = Self::zero(self.s.clone(), self.weight, bound.clone());
        for src in [self, other] {
            for ((h, r), c) in &src.coeffs {
                if *h <= bound {
                    let slot = out.coeffs.entry((h.clone(), r.clone())).or_insert_with(|| int(0));
                    *slot += c;
                }
            }
        }
        out.coeffs.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    /// For `ℓ = 1`: `Σ a(r) q^{S r}` as `(S r, a(r))` pairs.
    pub fn scalar_series(&self) -> Result<Vec<(BigInt, Rational)>> {
        if self.s.rank() != 1 {
            return Err(Error::UnsupportedModule(format!("scalar form needs rank 1, not {}", self.s.rank())));
        }
        Ok(self
            .iter()
            .map(|(r, c)| (self.s.integral_coords(r)[0].to_integer(), c.clone()))
            .collect())
    }

    /// `(ν, a(r))` with `ν = r₁ + r₂ω` for the Doi–Naganuma lattice of `D`.
    pub fn hilbert_series(&self, d: i64) -> Result<Vec<(QuadraticNumber, Rational)>> {
        if self.s != LorentzianGram::doi_naganuma(d)? {
            return Err(Error::ModuleMismatch(format!("expansion is not over the Doi–Naganuma lattice for D = {d}")));
        }
        Ok(self.iter().map(|(r, c)| (hilbert_index(d, r), c.clone())).collect())
    }
}

/// `ν = r₁ + r₂ω`, `ω = (1 + √D)/2`.
pub fn hilbert_index(d: i64, r: &[Rational]) -> QuadraticNumber {
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    QuadraticNumber::new(&r[0] + &r[1] * &half, &r[1] * &half, d)
}

/// The vector whose Hilbert index is the Galois conjugate: `ν′ = (r₁ + r₂) − r₂ω`.
pub fn conjugate_index(r: &[Rational]) -> Vec<Rational> {
    alloc::vec![&r[0] + &r[1], -r[1].clone()]
}

/// Vectors `r` with `a(ν′) ≠ (−1)^k a(ν)`, plus self-conjugate `r` with `a(r) ≠ 0`
/// when `k` is odd.
pub fn swap_violations(f: &OrthogonalExpansion) -> Vec<Vec<Rational>> {
    let sign = if f.weight % 2 == 0 { int(1) } else { int(-1) };
    let mut out = Vec::new();
    for (r, c) in f.iter() {
        let rc = conjugate_index(r);
        if f.get(&rc) != &sign * c {
            out.push(r.clone());
        }
    }
    out
}

/// Vectors `λ = S⁻¹w` with `Q(λ) > 0` and `0 < ⟨λ, seed⟩ ≤ bound`, scanned in
/// a box around the majorant `⟨λ, u⟩²/⟨u, u⟩ − Q(λ)`, which is positive
/// definite and below `bound²/⟨u, u⟩` on the truncated cone.
pub fn cone_vectors<P: ParMap>(s: &LorentzianGram, bound: &Rational, par: &P) -> Result<Vec<Vec<i64>>> {
    let l = s.rank();
    if !bound.is_positive() {
        return Ok(Vec::new());
    }
    let u = &s.seed;
    let uu = s.lattice.pairing(u, u);
    // in w-coordinates: ⟨λ, u⟩ = wᵀu and Q(λ) = wᵀ S⁻¹ w / 2
    let a: RatMatrix = (0..l)
        .map(|i| (0..l).map(|j| &u[i] * &u[j] / &uu - &s.inverse[i][j] / int(2)).collect())
        .collect();
    let a_inv = matrix::inverse(&a).ok_or_else(|| Error::invariant("majorant is singular"))?;
    let b = to_f64(&(bound * bound / &uu));
    let radii: Vec<i64> = (0..l)
        .map(|i| {
            let x = b * to_f64(&a_inv[i][i]);
            if x.is_finite() && x >= 0.0 { libm::floor(libm::sqrt(x)) as i64 + 1 } else { i64::MAX }
        })
        .collect();
    let volume = radii.iter().try_fold(1u128, |acc, &r| acc.checked_mul(2 * r as u128 + 1));
    match volume {
        Some(v) if v <= BOX_LIMIT => {}
        _ => return Err(Error::Overflow(format!("cone enumeration box {radii:?} exceeds {BOX_LIMIT} points"))),
    }
    let first: Vec<i64> = (-radii[0]..=radii[0]).collect();
    let chunks = par.par_map(first, |w0| {
        let mut out = Vec::new();
        let mut w = alloc::vec![0i64; l];
        w[0] = w0;
        scan(s, bound, &radii, 1, &mut w, &mut out);
        out
    });
    Ok(chunks.into_iter().flatten().collect())
}

fn scan(s: &LorentzianGram, bound: &Rational, radii: &[i64], i: usize, w: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
    if i == w.len() {
        let wr: Vec<Rational> = w.iter().map(|&x| int(x)).collect();
        let h = wr.iter().zip(&s.seed).fold(int(0), |acc, (a, b)| acc + a * b);
        if !h.is_positive() || h > *bound {
            return;
        }
        let lambda = s.from_integral(&wr);
        if s.q(&lambda).is_positive() {
            out.push(w.clone());
        }
        return;
    }
    for x in -radii[i]..=radii[i] {
        w[i] = x;
        scan(s, bound, radii, i + 1, w, out);
    }
}

/// The lift of `f` in weight `k`, truncated at `⟨r, seed⟩ ≤ height_bound`.
pub fn theta_lift<P: ParMap>(f: &QExpansion, s: &LorentzianGram, k: u32, height_bound: &Rational, par: &P) -> Result<OrthogonalExpansion> {
    if k < 2 {
        return Err(Error::UnsupportedWeight(HalfInteger::from_int(k as i64)));
    }
    let input = s.input_lattice();
    if f.module().lattice() != &input {
        return Err(Error::ModuleMismatch(format!(
            "input form lives on gram {:?}, the lift needs {:?}",
            f.module().lattice().gram(),
            input.gram()
        )));
    }
    if f.weight() != s.input_weight(k) {
        return Err(Error::ModuleMismatch(format!("input weight {} but lift weight {k} needs {}", f.weight(), s.input_weight(k))));
    }
    let module = f.module();
    let mut out = OrthogonalExpansion::zero(s.clone(), k, height_bound.clone());
    let vectors = cone_vectors(s, height_bound, par)?;
    let mut missing: Option<Rational> = None;
    let mut terms: Vec<(Vec<Rational>, Rational, Rational)> = Vec::new();
    for w in &vectors {
        let wr: Vec<Rational> = w.iter().map(|&x| int(x)).collect();
        let lambda = s.from_integral(&wr);
        let qn = s.q(&lambda);
        if qn >= *f.prec() {
            if missing.as_ref().map_or(true, |m| qn > *m) {
                missing = Some(qn);
            }
            continue;
        }
        let gamma = module.dual_coset(&lambda)?;
        let c = f.get(&gamma, &qn);
        if !c.is_zero() {
            let h = s.height(&lambda);
            terms.push((lambda, h, c));
        }
    }
    if let Some(m) = missing {
        return Err(Error::Precision { prec: f.prec().clone(), missing: m });
    }
    // scatter every λ with c(Q(λ), λ) ≠ 0 to its multiples nλ
    for (lambda, h, c) in terms {
        let mut n = 1i64;
        while &h * int(n) <= *height_bound {
            let r: Vec<Rational> = lambda.iter().map(|x| x * int(n)).collect();
            let key = (&h * int(n), r);
            let slot = out.coeffs.entry(key).or_insert_with(|| int(0));
            *slot += &c * pow(&int(n), k as i64 - 1);
            n += 1;
        }
    }
    out.coeffs.retain(|_, c| !c.is_zero());
    Ok(out)
}

/// The lift for `S = [[2, 1], [1, (1−D)/2]]`; the weight is that of `f`.
pub fn doi_naganuma<P: ParMap>(d: i64, f: &QExpansion, height_bound: &Rational, par: &P) -> Result<OrthogonalExpansion> {
    let s = LorentzianGram::doi_naganuma(d)?;
    let w = f.weight();
    if !w.is_integral() || w.twice() < 4 {
        return Err(Error::ModuleMismatch(format!("Doi–Naganuma input weight {w} must be an integer ≥ 2")));
    }
    theta_lift(f, &s, (w.twice() / 2) as u32, height_bound, par)
}

/// Whether `r` is primitive in `S⁻¹Zˡ`.
pub fn is_primitive(s: &LorentzianGram, r: &[Rational]) -> bool {
    let w = s.integral_coords(r);
    if !w.iter().all(is_integer) {
        return false;
    }
    let g = w.iter().fold(BigInt::zero(), |g, x| g.gcd(&x.to_integer()));
    g.is_one()
}
