//! Even lattices and their discriminant groups `Λ'/Λ` as finite quadratic
//! modules.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::{big, int, is_integer, Rational};
use crate::error::{Error, Result};
use crate::matrix::{self, IntMatrix};

pub(crate) const TAU: f64 = 2.0 * core::f64::consts::PI;

/// `e(x) = exp(2πix)`.
pub fn e(x: f64) -> Complex64 {
    let t = TAU * x;
    Complex64::new(libm::cos(t), libm::sin(t))
}

/// An integral symmetric Gram matrix with even diagonal and nonzero
/// determinant. `Q(v) = vᵀGv/2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EvenLattice {
    gram: IntMatrix,
}

impl EvenLattice {
    pub fn new(gram: IntMatrix) -> Result<Self> {
        let n = gram.len();
        for (i, row) in gram.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidLattice(format!("row {i} has length {}, expected {n}", row.len())));
            }
            if row[i] % 2 != 0 {
                return Err(Error::InvalidLattice(format!("diagonal entry {i} is odd")));
            }
            for j in 0..i {
                if gram[j][i] != row[j] {
                    return Err(Error::InvalidLattice(format!("entries ({i},{j}) and ({j},{i}) differ")));
                }
            }
        }
        if matrix::det(&gram).is_zero() {
            return Err(Error::DegenerateModule);
        }
        Ok(Self { gram })
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn det(&self) -> BigInt {
        matrix::det(&self.gram)
    }

    pub fn negated(&self) -> Self {
        Self { gram: self.gram.iter().map(|r| r.iter().map(|x| -x).collect()).collect() }
    }

    pub fn q(&self, v: &[Rational]) -> Rational {
        matrix::bilinear(&self.gram, v, v) / int(2)
    }

    pub fn pairing(&self, u: &[Rational], v: &[Rational]) -> Rational {
        matrix::bilinear(&self.gram, u, v)
    }

    /// `(positive, negative)` squares over R.
    pub fn inertia(&self) -> (usize, usize) {
        matrix::inertia(&self.gram)
    }

    /// Signature mod 8 of the real form; by Milgram this equals the
    /// signature of the discriminant module.
    pub fn signature_mod8(&self) -> u8 {
        let (p, q) = self.inertia();
        ((p as i64 - q as i64).rem_euclid(8)) as u8
    }

    pub fn in_dual(&self, v: &[Rational]) -> bool {
        v.len() == self.rank() && matrix::int_mat_vec(&self.gram, v).iter().all(is_integer)
    }

    /// The lattice `Λ ⊕ Z` with form `Q(v + λβ) + mλ²`.
    pub fn enlarge(&self, m: &Rational, beta: &[Rational]) -> Result<EvenLattice> {
        if !m.is_positive() {
            return Err(Error::IndexMismatch(format!("index m = {m} must be positive")));
        }
        if !self.in_dual(beta) {
            return Err(Error::IndexMismatch(String::from("beta is not in the dual lattice")));
        }
        let last = (self.q(beta) + m) * int(2);
        if !is_integer(&(&last / int(2))) {
            return Err(Error::IndexMismatch(format!("m + Q(beta) = {} is not integral", &last / int(2))));
        }
        let gb = matrix::int_mat_vec(&self.gram, beta);
        let to_i64 = |x: &Rational| {
            x.to_integer().to_i64().ok_or_else(|| Error::Overflow(String::from("enlarged gram entry")))
        };
        let n = self.rank();
        let mut g = vec![vec![0i64; n + 1]; n + 1];
        for i in 0..n {
            for j in 0..n {
                g[i][j] = self.gram[i][j];
            }
            let c = to_i64(&gb[i])?;
            g[i][n] = c;
            g[n][i] = c;
        }
        g[n][n] = to_i64(&last)?;
        EvenLattice::new(g)
    }
}

/// Abstract structure of `Λ'/Λ` from a Smith normal form, with conversions
/// between dual vectors and generator coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscriminantGroup {
    orders: Vec<u64>,
    u_rows: Vec<Vec<i128>>,
    gens: Vec<Vec<Rational>>,
}

impl DiscriminantGroup {
    pub fn new(lattice: &EvenLattice) -> Result<Self> {
        let s = matrix::smith(lattice.gram());
        let n = lattice.rank();
        let mut orders = Vec::new();
        let mut u_rows = Vec::new();
        let mut gens = Vec::new();
        for i in 0..n {
            let d = s.diag[i];
            if d == 0 {
                return Err(Error::DegenerateModule);
            }
            if d == 1 {
                continue;
            }
            orders.push(u64::try_from(d).map_err(|_| Error::Overflow(String::from("group order")))?);
            u_rows.push(s.u[i].clone());
            gens.push((0..n).map(|r| Rational::new(BigInt::from(s.v[r][i]), BigInt::from(d))).collect());
        }
        Ok(Self { orders, u_rows, gens })
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    pub fn exponent(&self) -> u64 {
        self.orders.last().copied().unwrap_or(1)
    }

    /// Dual vectors representing the generators.
    pub fn generators(&self) -> &[Vec<Rational>] {
        &self.gens
    }

    /// Canonical coordinates of `v + Λ`; `gram_v` must be `G·v`.
    fn coords_from_gv(&self, gram_v: &[Rational]) -> Result<Vec<u64>> {
        if !gram_v.iter().all(is_integer) {
            return Err(Error::NotInDual);
        }
        let w: Vec<BigInt> = gram_v.iter().map(|x| x.to_integer()).collect();
        Ok(self
            .u_rows
            .iter()
            .zip(&self.orders)
            .map(|(row, &d)| {
                let s: BigInt = row.iter().zip(&w).map(|(&a, b)| BigInt::from(a) * b).sum();
                s.mod_floor(&BigInt::from(d)).to_u64().unwrap()
            })
            .collect())
    }

    pub fn coords(&self, lattice: &EvenLattice, v: &[Rational]) -> Result<Vec<u64>> {
        if v.len() != lattice.rank() {
            return Err(Error::NotInDual);
        }
        self.coords_from_gv(&matrix::int_mat_vec(lattice.gram(), v))
    }

    pub fn lift(&self, coords: &[u64], rank: usize) -> Vec<Rational> {
        let mut v = vec![big(0); rank];
        for (c, g) in coords.iter().zip(&self.gens) {
            if *c != 0 {
                let c = big(*c as i64);
                for (x, y) in v.iter_mut().zip(g) {
                    *x += &c * y;
                }
            }
        }
        v
    }
}

/// An element of a finite quadratic module in generator coordinates,
/// `coords[i] ∈ 0..dᵢ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FqmElement {
    pub coords: Vec<u64>,
}

impl FqmElement {
    pub fn new(coords: Vec<u64>) -> Self {
        Self { coords }
    }
}

impl fmt::Display for FqmElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// `A = Λ'/Λ` with `Q(γ) = Q(lift γ) mod 1`. Values are stored as integers
/// over `level = 2·exponent`, which clears every denominator of `Q` and of
/// the bilinear form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteQuadraticModule {
    lattice: EvenLattice,
    group: DiscriminantGroup,
    level: u64,
    qn: Vec<u64>,
    bn: Vec<Vec<u64>>,
    signature: u8,
}

const SIGNATURE_TOL: f64 = 1e-6;

impl FiniteQuadraticModule {
    pub fn new(lattice: EvenLattice) -> Result<Self> {
        let group = DiscriminantGroup::new(&lattice)?;
        let level = 2 * group.exponent();
        let lv = big(level as i64);
        let scaled = |x: &Rational| -> u64 {
            let y = x * &lv;
            debug_assert!(is_integer(&y));
            y.to_integer().mod_floor(&BigInt::from(level)).to_u64().unwrap()
        };
        let gens = group.generators();
        let qn = gens.iter().map(|g| scaled(&lattice.q(g))).collect();
        let bn = gens.iter().map(|g| gens.iter().map(|h| scaled(&lattice.pairing(g, h))).collect()).collect();
        let mut m = Self { lattice, group, level, qn, bn, signature: 0 };
        m.signature = m.signature_from_gauss_sum()?;
        Ok(m)
    }

    /// The trivial module (rank-0 lattice).
    pub fn trivial() -> Self {
        Self::new(EvenLattice::new(Vec::new()).unwrap()).unwrap()
    }

    pub fn lattice(&self) -> &EvenLattice {
        &self.lattice
    }

    pub fn group(&self) -> &DiscriminantGroup {
        &self.group
    }

    pub fn orders(&self) -> &[u64] {
        self.group.orders()
    }

    pub fn order(&self) -> u64 {
        self.group.order()
    }

    /// Common denominator of all values of `Q` and `⟨·,·⟩`.
    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn signature(&self) -> u8 {
        self.signature
    }

    pub fn zero(&self) -> FqmElement {
        FqmElement::new(vec![0; self.orders().len()])
    }

    pub fn contains(&self, x: &FqmElement) -> bool {
        x.coords.len() == self.orders().len() && x.coords.iter().zip(self.orders()).all(|(c, d)| c < d)
    }

    pub fn check(&self, x: &FqmElement) -> Result<()> {
        if self.contains(x) { Ok(()) } else { Err(Error::ForeignElement) }
    }

    /// Reduces arbitrary integer coordinates.
    pub fn element(&self, coords: &[i64]) -> Result<FqmElement> {
        if coords.len() != self.orders().len() {
            return Err(Error::ForeignElement);
        }
        Ok(FqmElement::new(coords.iter().zip(self.orders()).map(|(&c, &d)| c.rem_euclid(d as i64) as u64).collect()))
    }

    pub fn add(&self, x: &FqmElement, y: &FqmElement) -> FqmElement {
        FqmElement::new(
            x.coords.iter().zip(&y.coords).zip(self.orders()).map(|((a, b), d)| (a + b) % d).collect(),
        )
    }

    pub fn neg(&self, x: &FqmElement) -> FqmElement {
        FqmElement::new(x.coords.iter().zip(self.orders()).map(|(a, d)| (d - a) % d).collect())
    }

    pub fn scale(&self, x: &FqmElement, k: i64) -> FqmElement {
        FqmElement::new(
            x.coords
                .iter()
                .zip(self.orders())
                .map(|(&a, &d)| ((a as i128 * k as i128).rem_euclid(d as i128)) as u64)
                .collect(),
        )
    }

    pub fn is_self_inverse(&self, x: &FqmElement) -> bool {
        self.neg(x) == *x
    }

    /// `level · Q(x) mod level`.
    pub fn q_num(&self, x: &FqmElement) -> u64 {
        let l = self.level as u128;
        let c = &x.coords;
        let mut s: u128 = 0;
        for i in 0..c.len() {
            let ci = c[i] as u128 % l;
            s = (s + ci * ci % l * self.qn[i] as u128) % l;
            for j in i + 1..c.len() {
                s = (s + ci * (c[j] as u128 % l) % l * self.bn[i][j] as u128) % l;
            }
        }
        s as u64
    }

    /// `level · ⟨x, y⟩ mod level`.
    pub fn b_num(&self, x: &FqmElement, y: &FqmElement) -> u64 {
        let l = self.level as u128;
        let mut s: u128 = 0;
        for (i, a) in x.coords.iter().enumerate() {
            for (j, b) in y.coords.iter().enumerate() {
                s = (s + (*a as u128 * *b as u128) % l * self.bn[i][j] as u128) % l;
            }
        }
        s as u64
    }

    /// `Q(x)` in `[0, 1)`.
    pub fn qvalue(&self, x: &FqmElement) -> Rational {
        Rational::new(BigInt::from(self.q_num(x)), BigInt::from(self.level))
    }

    /// `⟨x, y⟩` in `[0, 1)`.
    pub fn bilinear(&self, x: &FqmElement, y: &FqmElement) -> Rational {
        Rational::new(BigInt::from(self.b_num(x, y)), BigInt::from(self.level))
    }

    /// All elements, lexicographic in the coordinates.
    pub fn elements(&self) -> Vec<FqmElement> {
        let orders = self.orders();
        let mut out = Vec::with_capacity(self.order() as usize);
        let mut cur = vec![0u64; orders.len()];
        loop {
            out.push(FqmElement::new(cur.clone()));
            let mut i = orders.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                cur[i] += 1;
                if cur[i] < orders[i] {
                    break;
                }
                cur[i] = 0;
            }
        }
    }

    /// Position of `x` in [`Self::elements`].
    pub fn index_of(&self, x: &FqmElement) -> usize {
        x.coords.iter().zip(self.orders()).fold(0usize, |acc, (&c, &d)| acc * d as usize + c as usize)
    }

    /// One element per `±` orbit, the lexicographically smaller of `γ, −γ`.
    pub fn orbit_representatives(&self) -> Vec<FqmElement> {
        self.elements().into_iter().filter(|x| *x <= self.neg(x)).collect()
    }

    pub fn dual_vector(&self, x: &FqmElement) -> Vec<Rational> {
        self.group.lift(&x.coords, self.lattice.rank())
    }

    /// The class of a dual vector.
    pub fn dual_coset(&self, v: &[Rational]) -> Result<FqmElement> {
        Ok(FqmElement::new(self.group.coords(&self.lattice, v)?))
    }

    /// `Σ_γ e(a·Q(γ))`, unnormalized.
    pub fn gauss_sum(&self, a: i64) -> Complex64 {
        let l = self.level as i64;
        let table: Vec<Complex64> = (0..l).map(|j| e(j as f64 / l as f64)).collect();
        let mut s = Complex64::new(0.0, 0.0);
        let mut comp = Complex64::new(0.0, 0.0);
        for x in self.elements() {
            let j = ((a as i128 * self.q_num(&x) as i128).rem_euclid(l as i128)) as usize;
            // Kahan summation keeps the result independent of |A|
            let y = table[j] - comp;
            let t = s + y;
            comp = (t - s) - y;
            s = t;
        }
        s
    }

    fn signature_from_gauss_sum(&self) -> Result<u8> {
        let g = self.gauss_sum(1);
        let n = self.order() as f64;
        let modulus = g.norm();
        let sqrt_n = libm::sqrt(n);
        if (modulus - sqrt_n).abs() > SIGNATURE_TOL * sqrt_n.max(1.0) {
            return Err(Error::InconsistentSignature { phase: f64::NAN });
        }
        let phase = libm::atan2(g.im, g.re) / TAU * 8.0;
        let k = libm::round(phase);
        if (phase - k).abs() > SIGNATURE_TOL {
            return Err(Error::InconsistentSignature { phase });
        }
        let s = (k as i64).rem_euclid(8) as u8;
        if s != self.lattice.signature_mod8() {
            return Err(Error::InconsistentSignature { phase });
        }
        Ok(s)
    }
}

/// Convenience wrapper: the discriminant module of a lattice.
pub fn discriminant_module(lattice: &EvenLattice) -> Result<FiniteQuadraticModule> {
    FiniteQuadraticModule::new(lattice.clone())
}
