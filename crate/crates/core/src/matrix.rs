//! Small dense matrices over Z and Q: determinants, inverses, Smith normal
//! form with transforms, and inertia of symmetric forms.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::arith::{big, Rational};

pub type IntMatrix = Vec<Vec<i64>>;
pub type RatMatrix = Vec<Vec<Rational>>;

pub fn to_rational(m: &IntMatrix) -> RatMatrix {
    m.iter().map(|row| row.iter().map(|&x| big(x)).collect()).collect()
}

/// Determinant by fraction-free elimination. The empty matrix has det 1.
pub fn det(m: &IntMatrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut sign = 1i32;
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign < 0 { -d } else { d }
}

/// Inverse over Q, `None` if singular.
pub fn inverse(m: &RatMatrix) -> Option<RatMatrix> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m.clone();
    let mut inv: RatMatrix = (0..n)
        .map(|i| (0..n).map(|j| if i == j { big(1) } else { big(0) }).collect())
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        inv.swap(c, p);
        let piv = a[c][c].clone();
        for j in 0..n {
            a[c][j] = &a[c][j] / &piv;
            inv[c][j] = &inv[c][j] / &piv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for j in 0..n {
                    let t = &f * &a[c][j];
                    a[r][j] -= t;
                    let t = &f * &inv[c][j];
                    inv[r][j] -= t;
                }
            }
        }
    }
    Some(inv)
}

pub fn mat_vec(m: &RatMatrix, v: &[Rational]) -> Vec<Rational> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(big(0), |acc, (a, b)| acc + a * b))
        .collect()
}

pub fn int_mat_vec(m: &IntMatrix, v: &[Rational]) -> Vec<Rational> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(big(0), |acc, (&a, b)| acc + b * big(a)))
        .collect()
}

/// `uᵀ G v` for an integer matrix `G`.
pub fn bilinear(g: &IntMatrix, u: &[Rational], v: &[Rational]) -> Rational {
    let gv = int_mat_vec(g, v);
    u.iter().zip(&gv).fold(big(0), |acc, (a, b)| acc + a * b)
}

/// Smith normal form `U·G·V = D` with unimodular `U`, `V`.
#[derive(Debug, Clone)]
pub struct Smith {
    pub diag: Vec<i128>,
    pub u: Vec<Vec<i128>>,
    pub v: Vec<Vec<i128>>,
}

/// Diagonal entries come out nonnegative and dividing each other. Signs are
/// fixed by negating columns of `V`, never rows of `U`.
pub fn smith(g: &IntMatrix) -> Smith {
    let n = g.len();
    let mut a: Vec<Vec<i128>> = g.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let ident = |n: usize| -> Vec<Vec<i128>> {
        (0..n).map(|i| (0..n).map(|j| (i == j) as i128).collect()).collect()
    };
    let mut u = ident(n);
    let mut v = ident(n);
    for t in 0..n {
        loop {
            // smallest nonzero entry of the trailing block goes to (t, t)
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            a.swap(t, bi);
            u.swap(t, bi);
            for row in a.iter_mut() {
                row.swap(t, bj);
            }
            for row in v.iter_mut() {
                row.swap(t, bj);
            }
            let mut clean = true;
            for i in t + 1..n {
                let q = a[i][t].div_euclid(a[t][t]);
                if q != 0 {
                    for j in 0..n {
                        a[i][j] -= q * a[t][j];
                        u[i][j] -= q * u[t][j];
                    }
                }
                if a[i][t] != 0 {
                    clean = false;
                }
            }
            for j in t + 1..n {
                let q = a[t][j].div_euclid(a[t][t]);
                if q != 0 {
                    for i in 0..n {
                        a[i][j] -= q * a[i][t];
                        v[i][j] -= q * v[i][t];
                    }
                }
                if a[t][j] != 0 {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility: fold an offending row into row t and retry
            let p = a[t][t];
            let bad = (t + 1..n).find(|&i| (t + 1..n).any(|j| a[i][j] % p != 0));
            match bad {
                Some(i) => {
                    for j in 0..n {
                        a[t][j] += a[i][j];
                        u[t][j] += u[i][j];
                    }
                }
                None => break,
            }
        }
        if a[t][t] < 0 {
            for row in a.iter_mut() {
                row[t] = -row[t];
            }
            for row in v.iter_mut() {
                row[t] = -row[t];
            }
        }
    }
    Smith { diag: (0..n).map(|i| a[i][i]).collect(), u, v }
}

/// Numbers of positive and negative squares of a symmetric rational form,
/// by congruence diagonalization.
pub fn inertia(g: &IntMatrix) -> (usize, usize) {
    let n = g.len();
    let mut a = to_rational(g);
    let (mut pos, mut neg) = (0, 0);
    let mut i = 0;
    while i < n {
        let piv = (i..n).find(|&j| !a[j][j].is_zero());
        match piv {
            Some(j) => {
                a.swap(i, j);
                for row in a.iter_mut() {
                    row.swap(i, j);
                }
                let d = a[i][i].clone();
                for k in i + 1..n {
                    let c = &a[k][i] / &d;
                    for l in i..n {
                        let t = &c * &a[i][l];
                        a[k][l] -= t;
                    }
                    for l in i..n {
                        let t = &c * &a[l][i];
                        a[l][k] -= t;
                    }
                }
                if d.is_positive() {
                    pos += 1;
                } else {
                    neg += 1;
                }
                i += 1;
            }
            None => {
                // all remaining diagonals vanish: e_j += e_k makes one nonzero
                let off = (i..n).flat_map(|j| (j + 1..n).map(move |k| (j, k))).find(|&(j, k)| !a[j][k].is_zero());
                let Some((j, k)) = off else { break };
                for l in 0..n {
                    let t = a[l][k].clone();
                    a[l][j] += t;
                }
                for l in 0..n {
                    let t = a[k][l].clone();
                    a[j][l] += t;
                }
            }
        }
    }
    (pos, neg)
}

pub fn zero_matrix(n: usize) -> RatMatrix {
    vec![vec![big(0); n]; n]
}

/// Incremental exact row reduction: rows are kept reduced against each
/// other's pivots, so independence of a new row is one pass.
#[derive(Debug, Clone, Default)]
pub struct RowEchelon {
    rows: Vec<(usize, Vec<Rational>)>,
}

impl RowEchelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds `row` if it is independent of the rows so far; reports whether it was.
    pub fn insert(&mut self, mut row: Vec<Rational>) -> bool {
        for (p, r) in &self.rows {
            if !row[*p].is_zero() {
                let c = row[*p].clone();
                for (x, y) in row.iter_mut().zip(r) {
                    *x -= &c * y;
                }
            }
        }
        let Some(p) = row.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = row[p].recip();
        for x in row.iter_mut() {
            *x *= &inv;
        }
        for (_, r) in self.rows.iter_mut() {
            if !r[p].is_zero() {
                let c = r[p].clone();
                for (x, y) in r.iter_mut().zip(&row) {
                    *x -= &c * y;
                }
            }
        }
        self.rows.push((p, row));
        true
    }
}
