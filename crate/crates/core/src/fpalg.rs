//! Exact linear and affine algebra over a prime field F_p.
//!
//! Vectors are row vectors and matrices act on the right: `x ↦ x·M`. An
//! affine map is the pair `(M, v)` acting as `x ↦ x·M + v`. Composition
//! `f.then(g)` applies `f` first, so the matrix of the composite is
//! `f.linear · g.linear`.
//!
//! Vectors of `F_p^n` are labelled by a big-endian positional index
//! `i = Σ v_j · p^(n-1-j)`, so the zero vector is always index 0.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

/// Largest supported characteristic.
pub const MAX_PRIME: u32 = 251;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FpError {
    #[error("{0} is not a prime in [2, {MAX_PRIME}]")]
    NotPrime(u32),
    #[error("index {index} out of range for F_{p}^{n}")]
    IndexOutOfRange { index: u64, p: u32, n: usize },
    #[error("characteristic/dimension mismatch: (p={p1}, n={n1}) vs (p={p2}, n={n2})")]
    Mismatch { p1: u32, n1: usize, p2: u32, n2: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("{what} requires an odd prime, got p={p}")]
    EvenPrime { what: &'static str, p: u32 },
    #[error("unsupported dimension n={0}")]
    UnsupportedDimension(usize),
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn check_prime(p: u32) -> Result<(), FpError> {
    if p <= MAX_PRIME && is_prime(p) {
        Ok(())
    } else {
        Err(FpError::NotPrime(p))
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

/// Inverse of `a` modulo `m`, when it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

pub fn pow_u64(base: u64, exp: u32) -> u64 {
    base.pow(exp)
}

/// `p^n`, the number of vectors in `F_p^n`.
pub fn space_size(p: u32, n: usize) -> usize {
    (p as usize).pow(n as u32)
}

/// Write `order = k · p^m` with `gcd(k, p) = 1`.
pub fn split_order(order: u64, p: u32) -> (u64, u32) {
    let p = p as u64;
    let mut k = order;
    let mut m = 0;
    while k > 0 && k.is_multiple_of(p) {
        k /= p;
        m += 1;
    }
    (k, m)
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpVector {
    p: u32,
    coords: Vec<u32>,
}

impl FpVector {
    /// Build a vector, reducing every coordinate mod `p`.
    pub fn new(p: u32, coords: Vec<u32>) -> Self {
        let coords = coords.into_iter().map(|c| c % p).collect();
        FpVector { p, coords }
    }

    pub fn from_i64(p: u32, coords: &[i64]) -> Self {
        let coords = coords.iter().map(|&c| c.rem_euclid(p as i64) as u32).collect();
        FpVector { p, coords }
    }

    pub fn zero(p: u32, n: usize) -> Self {
        FpVector { p, coords: vec![0; n] }
    }

    pub fn unit(p: u32, n: usize, i: usize) -> Self {
        let mut coords = vec![0; n];
        coords[i] = 1;
        FpVector { p, coords }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    fn check(&self, other: &FpVector) -> Result<(), FpError> {
        if self.p != other.p || self.dim() != other.dim() {
            return Err(FpError::Mismatch { p1: self.p, n1: self.dim(), p2: other.p, n2: other.dim() });
        }
        Ok(())
    }

    pub fn add(&self, other: &FpVector) -> Result<FpVector, FpError> {
        self.check(other)?;
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| (a + b) % self.p).collect();
        Ok(FpVector { p: self.p, coords })
    }

    pub fn neg(&self) -> FpVector {
        let coords = self.coords.iter().map(|&a| (self.p - a) % self.p).collect();
        FpVector { p: self.p, coords }
    }

    pub fn sub(&self, other: &FpVector) -> Result<FpVector, FpError> {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: u32) -> FpVector {
        let s = s % self.p;
        let coords = self.coords.iter().map(|&a| a * s % self.p).collect();
        FpVector { p: self.p, coords }
    }

    pub fn dot(&self, other: &FpVector) -> Result<u32, FpError> {
        self.check(other)?;
        Ok(self.coords.iter().zip(&other.coords).fold(0, |acc, (a, b)| (acc + a * b) % self.p))
    }
}

impl fmt::Debug for FpVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords)
    }
}

/// Big-endian positional index of a vector.
pub fn vec_index(v: &FpVector) -> u64 {
    v.coords.iter().fold(0u64, |acc, &c| acc * v.p as u64 + c as u64)
}

/// Inverse of [`vec_index`].
pub fn index_vec(i: u64, p: u32, n: usize) -> Result<FpVector, FpError> {
    let size = (p as u64).pow(n as u32);
    if i >= size {
        return Err(FpError::IndexOutOfRange { index: i, p, n });
    }
    let mut coords = vec![0u32; n];
    let mut rest = i;
    for slot in coords.iter_mut().rev() {
        *slot = (rest % p as u64) as u32;
        rest /= p as u64;
    }
    Ok(FpVector { p, coords })
}

/// Addition and negation tables for `F_p^n` under the index labelling.
///
/// This is the group `G ≅ Z_p^n` every skew-morphism acts on.
#[derive(Clone, Debug)]
pub struct VectorSpace {
    p: u32,
    n: usize,
    size: usize,
    add: Vec<u32>,
    neg: Vec<u32>,
}

impl VectorSpace {
    pub fn new(p: u32, n: usize) -> Result<Self, FpError> {
        check_prime(p)?;
        if n == 0 {
            return Err(FpError::UnsupportedDimension(n));
        }
        let size = space_size(p, n);
        let vecs: Vec<FpVector> = (0..size as u64).map(|i| index_vec(i, p, n).unwrap()).collect();
        let mut add = vec![0u32; size * size];
        for (i, a) in vecs.iter().enumerate() {
            for (j, b) in vecs.iter().enumerate() {
                add[i * size + j] = vec_index(&a.add(b).unwrap()) as u32;
            }
        }
        let neg = vecs.iter().map(|v| vec_index(&v.neg()) as u32).collect();
        Ok(VectorSpace { p, n, size, add, neg })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.add[a as usize * self.size + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn vector(&self, i: u32) -> FpVector {
        index_vec(i as u64, self.p, self.n).unwrap()
    }

    /// Dimension of the span of the given elements.
    pub fn span_rank(&self, elems: impl IntoIterator<Item = u32>) -> usize {
        let rows: Vec<Vec<u32>> = elems.into_iter().map(|e| self.vector(e).coords).collect();
        rank_of_rows(rows, self.p)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpMatrix {
    p: u32,
    n: usize,
    entries: Vec<u32>,
}

impl FpMatrix {
    pub fn new(p: u32, n: usize, entries: Vec<u32>) -> Self {
        assert_eq!(entries.len(), n * n, "matrix needs n*n entries");
        let entries = entries.into_iter().map(|e| e % p).collect();
        FpMatrix { p, n, entries }
    }

    pub fn from_rows(p: u32, rows: &[&[i64]]) -> Self {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "matrix must be square");
            entries.extend(row.iter().map(|&e| e.rem_euclid(p as i64) as u32));
        }
        FpMatrix { p, n, entries }
    }

    pub fn identity(p: u32, n: usize) -> Self {
        Self::scalar(p, n, 1)
    }

    pub fn scalar(p: u32, n: usize, s: u32) -> Self {
        let mut entries = vec![0; n * n];
        for i in 0..n {
            entries[i * n + i] = s % p;
        }
        FpMatrix { p, n, entries }
    }

    pub fn zero(p: u32, n: usize) -> Self {
        FpMatrix { p, n, entries: vec![0; n * n] }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.entries[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: u32) {
        self.entries[r * self.n + c] = value % self.p;
    }

    pub fn row(&self, r: usize) -> FpVector {
        FpVector { p: self.p, coords: self.entries[r * self.n..(r + 1) * self.n].to_vec() }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.p, self.n)
    }

    fn check(&self, other: &FpMatrix) -> Result<(), FpError> {
        if self.p != other.p || self.n != other.n {
            return Err(FpError::Mismatch { p1: self.p, n1: self.n, p2: other.p, n2: other.n });
        }
        Ok(())
    }

    pub fn checked_mul(&self, other: &FpMatrix) -> Result<FpMatrix, FpError> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &FpMatrix) -> FpMatrix {
        let n = self.n;
        let p = self.p;
        let mut entries = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0u32;
                for l in 0..n {
                    acc = (acc + self.entries[i * n + l] * other.entries[l * n + j]) % p;
                }
                entries[i * n + j] = acc;
            }
        }
        FpMatrix { p, n, entries }
    }

    pub fn checked_sub(&self, other: &FpMatrix) -> Result<FpMatrix, FpError> {
        self.check(other)?;
        let p = self.p;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| (a + p - b) % p).collect();
        Ok(FpMatrix { p, n: self.n, entries })
    }

    pub fn pow(&self, mut e: u64) -> FpMatrix {
        let mut base = self.clone();
        let mut acc = Self::identity(self.p, self.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            base = base.mul_unchecked(&base);
            e >>= 1;
        }
        acc
    }

    /// `x ↦ x·M` for a row vector `x`.
    pub fn apply(&self, x: &FpVector) -> Result<FpVector, FpError> {
        if x.p != self.p || x.dim() != self.n {
            return Err(FpError::Mismatch { p1: self.p, n1: self.n, p2: x.p, n2: x.dim() });
        }
        let n = self.n;
        let coords = (0..n)
            .map(|j| (0..n).fold(0u32, |acc, i| (acc + x.coords[i] * self.entries[i * n + j]) % self.p))
            .collect();
        Ok(FpVector { p: self.p, coords })
    }

    pub fn det(&self) -> u32 {
        let n = self.n;
        let p = self.p as u64;
        let mut a: Vec<u64> = self.entries.iter().map(|&e| e as u64).collect();
        let mut det = 1u64;
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| a[r * n + col] != 0) else {
                return 0;
            };
            if piv != col {
                for c in 0..n {
                    a.swap(piv * n + c, col * n + c);
                }
                det = (p - det) % p;
            }
            let pv = a[col * n + col];
            det = det * pv % p;
            let pinv = inv_mod(pv, p).unwrap();
            for r in col + 1..n {
                let f = a[r * n + col] * pinv % p;
                if f == 0 {
                    continue;
                }
                for c in col..n {
                    a[r * n + c] = (a[r * n + c] + p * p - f * a[col * n + c]) % p;
                }
            }
        }
        det as u32
    }

    pub fn is_invertible(&self) -> bool {
        self.det() != 0
    }

    pub fn inverse(&self) -> Result<FpMatrix, FpError> {
        let n = self.n;
        let p = self.p as u64;
        let mut a: Vec<u64> = self.entries.iter().map(|&e| e as u64).collect();
        let mut inv: Vec<u64> = Self::identity(self.p, n).entries.iter().map(|&e| e as u64).collect();
        for col in 0..n {
            let piv = (col..n).find(|&r| a[r * n + col] != 0).ok_or(FpError::Singular)?;
            for c in 0..n {
                a.swap(piv * n + c, col * n + c);
                inv.swap(piv * n + c, col * n + c);
            }
            let pinv = inv_mod(a[col * n + col], p).unwrap();
            for c in 0..n {
                a[col * n + c] = a[col * n + c] * pinv % p;
                inv[col * n + c] = inv[col * n + c] * pinv % p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[r * n + col];
                if f == 0 {
                    continue;
                }
                for c in 0..n {
                    a[r * n + c] = (a[r * n + c] + p * p - f * a[col * n + c]) % p;
                    inv[r * n + c] = (inv[r * n + c] + p * p - f * inv[col * n + c]) % p;
                }
            }
        }
        Ok(FpMatrix { p: self.p, n, entries: inv.into_iter().map(|e| e as u32).collect() })
    }

    pub fn rank(&self) -> usize {
        let rows = (0..self.n).map(|r| self.row(r).coords).collect();
        rank_of_rows(rows, self.p)
    }

    /// Multiplicative order in GL(n, p).
    pub fn order(&self) -> Result<u64, FpError> {
        if !self.is_invertible() {
            return Err(FpError::Singular);
        }
        let id = Self::identity(self.p, self.n);
        let mut acc = self.clone();
        let mut t = 1u64;
        while acc != id {
            acc = acc.mul_unchecked(self);
            t += 1;
        }
        Ok(t)
    }

    /// The permutation `x ↦ x·M` of `F_p^n` in the index labelling.
    pub fn as_permutation(&self) -> Vec<u32> {
        let size = space_size(self.p, self.n);
        (0..size as u64)
            .map(|i| {
                let x = index_vec(i, self.p, self.n).unwrap();
                vec_index(&self.apply(&x).unwrap()) as u32
            })
            .collect()
    }

    pub fn commutes_with(&self, other: &FpMatrix) -> bool {
        self.p == other.p && self.n == other.n && self.mul_unchecked(other) == other.mul_unchecked(self)
    }
}

impl std::ops::Mul for &FpMatrix {
    type Output = FpMatrix;

    /// Panics on a characteristic or dimension mismatch; use
    /// [`FpMatrix::checked_mul`] for a fallible product.
    fn mul(self, rhs: &FpMatrix) -> FpMatrix {
        self.checked_mul(rhs).expect("matrix product of mismatched shapes")
    }
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[u32]> = self.entries.chunks(self.n).collect();
        write!(f, "{rows:?}")
    }
}

/// Rank of a list of row vectors over F_p.
pub fn rank_of_rows(mut rows: Vec<Vec<u32>>, p: u32) -> usize {
    let p = p as u64;
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(piv, rank);
        let pinv = inv_mod(rows[rank][col] as u64, p).unwrap();
        for r in 0..rows.len() {
            if r == rank || rows[r][col] == 0 {
                continue;
            }
            let f = rows[r][col] as u64 * pinv % p;
            for c in 0..ncols {
                rows[r][c] = ((rows[r][c] as u64 + p * p - f * rows[rank][c] as u64) % p) as u32;
            }
        }
        rank += 1;
    }
    rank
}

/// Basis of the solution space `{x : A x = 0}` for `A` given by rows.
pub fn nullspace(rows: &[Vec<u32>], ncols: usize, p: u32) -> Vec<Vec<u32>> {
    let p64 = p as u64;
    let mut a: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|&e| e as u64 % p64).collect()).collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..a.len()).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(piv, rank);
        let pinv = inv_mod(a[rank][col], p64).unwrap();
        for c in 0..ncols {
            a[rank][c] = a[rank][c] * pinv % p64;
        }
        for r in 0..a.len() {
            if r == rank || a[r][col] == 0 {
                continue;
            }
            let f = a[r][col];
            for c in 0..ncols {
                a[r][c] = (a[r][c] + p64 * p64 - f * a[rank][c]) % p64;
            }
        }
        pivots.push(col);
        rank += 1;
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut x = vec![0u32; ncols];
            x[fc] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                x[pc] = ((p64 - a[r][fc]) % p64) as u32;
            }
            x
        })
        .collect()
}

/// Every n×n matrix over F_p, in lexicographic order of entries.
pub fn all_matrices(p: u32, n: usize) -> impl Iterator<Item = FpMatrix> {
    let total = (p as u64).pow((n * n) as u32);
    (0..total).map(move |mut code| {
        let mut entries = vec![0u32; n * n];
        for slot in entries.iter_mut().rev() {
            *slot = (code % p as u64) as u32;
            code /= p as u64;
        }
        FpMatrix { p, n, entries }
    })
}

/// All of GL(n, p), built row by row from linearly independent rows.
pub fn general_linear_group(p: u32, n: usize) -> Vec<FpMatrix> {
    let size = space_size(p, n);
    let vectors: Vec<Vec<u32>> = (0..size as u64).map(|i| index_vec(i, p, n).unwrap().coords).collect();
    let mut out = Vec::new();
    let mut rows: Vec<usize> = Vec::with_capacity(n);
    fn rec(p: u32, n: usize, vectors: &[Vec<u32>], rows: &mut Vec<usize>, out: &mut Vec<FpMatrix>) {
        if rows.len() == n {
            let entries = rows.iter().flat_map(|&r| vectors[r].iter().copied()).collect();
            out.push(FpMatrix { p, n, entries });
            return;
        }
        for v in 1..vectors.len() {
            rows.push(v);
            let sel: Vec<Vec<u32>> = rows.iter().map(|&r| vectors[r].clone()).collect();
            if rank_of_rows(sel, p) == rows.len() {
                rec(p, n, vectors, rows, out);
            }
            rows.pop();
        }
    }
    rec(p, n, &vectors, &mut rows, &mut out);
    out
}

/// `|GL(n, p)| = Π_{i<n} (p^n - p^i)`.
pub fn gl_order(p: u32, n: usize) -> u64 {
    let q = p as u64;
    (0..n as u32).map(|i| q.pow(n as u32) - q.pow(i)).product()
}

/// Smallest primitive root modulo `p`.
pub fn primitive_root(p: u32) -> u32 {
    if p == 2 {
        return 1;
    }
    (2..p).find(|&g| multiplicative_order(g, p) == (p - 1) as u64).expect("prime has a primitive root")
}

/// Order of `a` in `(Z/mZ)^*`; `a` must be a unit.
pub fn multiplicative_order(a: u32, m: u32) -> u64 {
    let a = a as u64 % m as u64;
    let mut acc = a;
    let mut t = 1;
    while acc != 1 % m as u64 {
        acc = acc * a % m as u64;
        t += 1;
        assert!(t <= m as u64, "{a} is not a unit mod {m}");
    }
    t
}

/// A generating set of GL(n, p): all elementary transvections `E + e_ij`
/// together with `diag(ω, 1, …, 1)` for a primitive root `ω`.
pub fn gl_generators(p: u32, n: usize) -> Vec<FpMatrix> {
    let mut gens = Vec::new();
    let mut d = FpMatrix::identity(p, n);
    d.set(0, 0, primitive_root(p));
    if !d.is_identity() {
        gens.push(d);
    }
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let mut t = FpMatrix::identity(p, n);
                t.set(i, j, 1);
                gens.push(t);
            }
        }
    }
    gens
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineMap {
    linear: FpMatrix,
    shift: FpVector,
}

impl AffineMap {
    pub fn new(linear: FpMatrix, shift: FpVector) -> Result<Self, FpError> {
        if linear.p != shift.p || linear.n != shift.dim() {
            return Err(FpError::Mismatch { p1: linear.p, n1: linear.n, p2: shift.p, n2: shift.dim() });
        }
        if !linear.is_invertible() {
            return Err(FpError::Singular);
        }
        Ok(AffineMap { linear, shift })
    }

    pub fn identity(p: u32, n: usize) -> Self {
        AffineMap { linear: FpMatrix::identity(p, n), shift: FpVector::zero(p, n) }
    }

    /// The translation `t_v : x ↦ x + v`.
    pub fn translation(v: FpVector) -> Self {
        AffineMap { linear: FpMatrix::identity(v.p, v.dim()), shift: v }
    }

    pub fn linear_map(m: FpMatrix) -> Result<Self, FpError> {
        let shift = FpVector::zero(m.p, m.n);
        Self::new(m, shift)
    }

    pub fn linear(&self) -> &FpMatrix {
        &self.linear
    }

    pub fn shift(&self) -> &FpVector {
        &self.shift
    }

    pub fn p(&self) -> u32 {
        self.linear.p
    }

    pub fn dim(&self) -> usize {
        self.linear.n
    }

    pub fn is_identity(&self) -> bool {
        self.linear.is_identity() && self.shift.is_zero()
    }

    pub fn apply(&self, x: &FpVector) -> Result<FpVector, FpError> {
        self.linear.apply(x)?.add(&self.shift)
    }

    /// The map "first `self`, then `next`".
    pub fn then(&self, next: &AffineMap) -> Result<AffineMap, FpError> {
        let linear = self.linear.checked_mul(&next.linear)?;
        let shift = next.linear.apply(&self.shift)?.add(&next.shift)?;
        Ok(AffineMap { linear, shift })
    }

    pub fn inverse(&self) -> AffineMap {
        let linear = self.linear.inverse().expect("affine maps have invertible linear part");
        let shift = linear.apply(&self.shift.neg()).unwrap();
        AffineMap { linear, shift }
    }

    pub fn pow(&self, e: u64) -> AffineMap {
        let mut acc = AffineMap::identity(self.p(), self.dim());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.then(&base).unwrap();
            }
            base = base.then(&base).unwrap();
            e >>= 1;
        }
        acc
    }
}

impl fmt::Debug for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x·{:?} + {:?}", self.linear, self.shift)
    }
}

/// `f` then `g`: `x ↦ g(f(x))`.
pub fn compose_affine(f: &AffineMap, g: &AffineMap) -> Result<AffineMap, FpError> {
    f.then(g)
}

pub fn apply_affine(f: &AffineMap, x: &FpVector) -> Result<FpVector, FpError> {
    f.apply(x)
}

/// Least `t ≥ 1` with `f^t = id`.
pub fn element_order(f: &AffineMap) -> u64 {
    let mut acc = f.clone();
    let mut t = 1;
    while !acc.is_identity() {
        acc = acc.then(f).unwrap();
        t += 1;
    }
    t
}

fn require_odd(p: u32, what: &'static str) -> Result<(), FpError> {
    check_prime(p)?;
    if p == 2 {
        return Err(FpError::EvenPrime { what, p });
    }
    Ok(())
}

/// The Jordan representatives of the two classes of elements of order `p`
/// in GL(3, p): `g1` fixes `W = ⟨e2, e3⟩` pointwise, `g2` only fixes the
/// line `⟨e3⟩` at the end of its Jordan chain.
pub fn unipotent_class_reps(p: u32) -> Result<(FpMatrix, FpMatrix), FpError> {
    require_odd(p, "unipotent class representatives")?;
    let g1 = FpMatrix::from_rows(p, &[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]);
    let g2 = FpMatrix::from_rows(p, &[&[1, 1, 0], &[0, 1, 1], &[0, 0, 1]]);
    Ok((g1, g2))
}

/// Elements of order `p` in GL(n, p) that fix a hyperplane pointwise.
///
/// These are the transvections `E + cᵀr` with `c, r ≠ 0` and `r·c = 0`.
/// For `n = 2` that is every element of order `p`; for `n = 3` it is the
/// conjugacy class of the representative `g1`.
pub fn g1_class_members(n: usize, p: u32) -> Result<Vec<FpMatrix>, FpError> {
    require_odd(p, "g1 class enumeration")?;
    if !(2..=3).contains(&n) {
        return Err(FpError::UnsupportedDimension(n));
    }
    let size = space_size(p, n) as u64;
    let vecs: Vec<FpVector> = (1..size).map(|i| index_vec(i, p, n).unwrap()).collect();
    let mut out = HashSet::new();
    for c in &vecs {
        for r in &vecs {
            if c.dot(r).unwrap() != 0 {
                continue;
            }
            let mut m = FpMatrix::identity(p, n);
            for i in 0..n {
                for j in 0..n {
                    let v = (m.get(i, j) + c.coords[i] * r.coords[j]) % p;
                    m.set(i, j, v);
                }
            }
            out.insert(m);
        }
    }
    let mut out: Vec<FpMatrix> = out.into_iter().collect();
    out.sort();
    Ok(out)
}

/// The invertible matrices commuting with `m`.
///
/// Solves the linear system `XM = MX`, then keeps the invertible points of
/// the solution space.
pub fn centralizer_in_gl(m: &FpMatrix) -> Result<Vec<FpMatrix>, FpError> {
    if !m.is_invertible() {
        return Err(FpError::Singular);
    }
    let n = m.n;
    let p = m.p;
    // Unknown X[a][b] lives at column a*n + b.
    let mut rows = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut row = vec![0u32; n * n];
            // (XM)_{ij} = Σ_l X_{il} M_{lj}
            for l in 0..n {
                row[i * n + l] = (row[i * n + l] + m.get(l, j)) % p;
            }
            // (MX)_{ij} = Σ_l M_{il} X_{lj}
            for l in 0..n {
                row[l * n + j] = (row[l * n + j] + p - m.get(i, l)) % p;
            }
            rows.push(row);
        }
    }
    let basis = nullspace(&rows, n * n, p);
    let d = basis.len();
    let total = (p as u64).pow(d as u32);
    let mut out = Vec::new();
    for mut code in 0..total {
        let mut entries = vec![0u32; n * n];
        for b in &basis {
            let coef = (code % p as u64) as u32;
            code /= p as u64;
            if coef == 0 {
                continue;
            }
            for (e, &x) in entries.iter_mut().zip(b) {
                *e = (*e + coef * x) % p;
            }
        }
        let x = FpMatrix { p, n, entries };
        if x.is_invertible() {
            out.push(x);
        }
    }
    out.sort();
    Ok(out)
}

/// True when `x` sends every affine line `v + W` with `v ∉ W` to a
/// different line, where `W = ⟨e2, …, en⟩`.
///
/// For `x` preserving `W` the line `v + W` goes to `v·x + W`, so the map
/// moves every such line exactly when the first column of `x - E` is
/// `(λ, 0, …, 0)` with `λ ≠ 0`.
pub fn moves_every_coset_of_w(x: &FpMatrix) -> bool {
    let p = x.p;
    let first = (x.get(0, 0) + p - 1) % p;
    first != 0 && (1..x.n).all(|r| x.get(r, 0) == 0)
}

/// Non-identity elements of `C_{GL(3,p)}(g1)` of order dividing `p - 1`
/// that move every affine line `v + W`, `v ∉ W`.
pub fn omega_set(p: u32) -> Result<Vec<FpMatrix>, FpError> {
    require_odd(p, "omega set")?;
    let (g1, _) = unipotent_class_reps(p)?;
    let cent = centralizer_in_gl(&g1)?;
    Ok(cent
        .into_iter()
        .filter(|x| !x.is_identity() && x.pow((p - 1) as u64).is_identity() && moves_every_coset_of_w(x))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OmegaFormulas {
    /// `(p−2) + p²(p−2)²`, the sum of the two branches of the case analysis.
    pub branch_sum: u64,
    /// `(p−2)(p−1)(p²−p+1)`, the closed form stated alongside it.
    pub stated_closed_form: u64,
    /// `(p−2)(p−1)(p²−p−1)`, the actual factorisation of `branch_sum`.
    pub factored_branch_sum: u64,
}

pub fn omega_formulas(p: u32) -> OmegaFormulas {
    let q = p as u64;
    OmegaFormulas {
        branch_sum: (q - 2) + q * q * (q - 2) * (q - 2),
        stated_closed_form: (q - 2) * (q - 1) * (q * q - q + 1),
        factored_branch_sum: (q - 2) * (q - 1) * (q * q - q - 1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_examples() {
        assert_eq!(vec_index(&FpVector::new(3, vec![0, 0])), 0);
        assert_eq!(vec_index(&FpVector::new(3, vec![1, 2])), 5);
        assert_eq!(vec_index(&FpVector::new(3, vec![2, 0])), 6);
        assert_eq!(index_vec(5, 3, 2).unwrap(), FpVector::new(3, vec![1, 2]));
        assert!(matches!(index_vec(9, 3, 2), Err(FpError::IndexOutOfRange { .. })));
    }

    #[test]
    fn orders() {
        assert_eq!(element_order(&AffineMap::identity(3, 2)), 1);
        let u = AffineMap::linear_map(FpMatrix::from_rows(3, &[&[1, 1], &[0, 1]])).unwrap();
        assert_eq!(element_order(&u), 3);
        // 2E over F_5: 2, 4, 3, 1.
        let mut acc = FpMatrix::identity(5, 2);
        let two = FpMatrix::scalar(5, 2, 2);
        let mut brute = 0;
        loop {
            acc = &acc * &two;
            brute += 1;
            if acc.is_identity() {
                break;
            }
        }
        assert_eq!(brute, 4);
        assert_eq!(element_order(&AffineMap::linear_map(two).unwrap()), 4);
    }

    #[test]
    fn mismatch_is_reported() {
        let a = AffineMap::identity(3, 2);
        let b = AffineMap::identity(5, 2);
        assert!(matches!(compose_affine(&a, &b), Err(FpError::Mismatch { .. })));
        assert!(apply_affine(&a, &FpVector::zero(3, 3)).is_err());
    }

    #[test]
    fn translation_then_linear() {
        let m = FpMatrix::from_rows(5, &[&[1, 0], &[1, 1]]);
        let f = AffineMap::translation(FpVector::new(5, vec![0, 1]));
        let g = AffineMap::linear_map(m.clone()).unwrap();
        let x = FpVector::new(5, vec![2, 3]);
        let fg = compose_affine(&f, &g).unwrap();
        assert_eq!(fg.apply(&x).unwrap(), m.apply(&x.add(&FpVector::new(5, vec![0, 1])).unwrap()).unwrap());
        assert!(fg.then(&fg.inverse()).unwrap().is_identity());
    }

    #[test]
    fn gl_sizes() {
        assert_eq!(general_linear_group(2, 2).len(), 6);
        assert_eq!(general_linear_group(3, 2).len(), 48);
        assert_eq!(general_linear_group(2, 3).len() as u64, gl_order(2, 3));
        assert_eq!(gl_order(3, 3), 11232);
        let brute = all_matrices(3, 2).filter(|m| m.is_invertible()).count();
        assert_eq!(brute, 48);
    }

    #[test]
    fn inverse_and_det() {
        for m in general_linear_group(3, 2) {
            let inv = m.inverse().unwrap();
            assert!((&m * &inv).is_identity());
        }
        assert_eq!(FpMatrix::from_rows(5, &[&[1, 2], &[2, 4]]).det(), 0);
        assert_eq!(FpMatrix::from_rows(5, &[&[1, 2], &[2, 4]]).inverse(), Err(FpError::Singular));
    }

    #[test]
    fn class_reps() {
        let (g1, g2) = unipotent_class_reps(3).unwrap();
        let nonzero_off_diag = g1.entries().iter().enumerate().filter(|(i, &e)| i % 4 != 0 && e != 0).count();
        assert_eq!(nonzero_off_diag, 1);
        assert_eq!(g1.apply(&FpVector::new(3, vec![0, 1, 0])).unwrap(), FpVector::new(3, vec![0, 1, 0]));
        // Fixed points of g2: solve x·(g2 − E) = 0 by enumeration.
        let fixed: Vec<FpVector> = (0..27)
            .map(|i| index_vec(i, 3, 3).unwrap())
            .filter(|x| g2.apply(x).unwrap() == *x)
            .collect();
        assert_eq!(fixed.len(), 3);
        assert!(fixed.iter().all(|v| v.coords()[0] == 0 && v.coords()[1] == 0));
        assert!(matches!(unipotent_class_reps(2), Err(FpError::EvenPrime { .. })));
    }

    #[test]
    fn g1_class_small() {
        let n2 = g1_class_members(2, 3).unwrap();
        assert_eq!(n2.len(), 8);
        let n3 = g1_class_members(3, 3).unwrap();
        assert_eq!(n3.len(), 104);
        assert!(n3.iter().all(|m| m.pow(3).is_identity() && !m.is_identity()));
        // Oracle: filter GL(3,3) for order 3 with a pointwise-fixed plane.
        let id = FpMatrix::identity(3, 3);
        let filtered: Vec<FpMatrix> = general_linear_group(3, 3)
            .into_iter()
            .filter(|m| !m.is_identity() && m.pow(3).is_identity() && m.checked_sub(&id).unwrap().rank() == 1)
            .collect();
        let mut filtered = filtered;
        filtered.sort();
        assert_eq!(filtered, n3);
        assert!(g1_class_members(4, 3).is_err());
    }

    #[test]
    fn centralizers() {
        let (g1, _) = unipotent_class_reps(3).unwrap();
        let c = centralizer_in_gl(&g1).unwrap();
        assert_eq!(c.len(), 108);
        let brute: Vec<FpMatrix> = general_linear_group(3, 3).into_iter().filter(|x| x.commutes_with(&g1)).collect();
        assert_eq!(brute.len(), 108);
        let set: HashSet<&FpMatrix> = c.iter().collect();
        for a in &c {
            assert!(set.contains(&a.inverse().unwrap()));
            for b in c.iter().step_by(7) {
                assert!(set.contains(&(a * b)));
            }
        }
        assert_eq!(centralizer_in_gl(&FpMatrix::identity(3, 3)).unwrap().len(), 11232);
    }

    #[test]
    fn omega_sizes() {
        let om3 = omega_set(3).unwrap();
        assert_eq!(om3.len(), 10);
        assert!(om3.contains(&FpMatrix::scalar(3, 3, 2)));
        assert_eq!(omega_set(5).unwrap().len(), 228);
        let f = omega_formulas(3);
        assert_eq!((f.branch_sum, f.stated_closed_form, f.factored_branch_sum), (10, 14, 10));
        assert!(omega_set(2).is_err());
    }

    #[test]
    fn split_and_mod() {
        assert_eq!(split_order(18, 3), (2, 2));
        assert_eq!(split_order(1, 3), (1, 0));
        assert_eq!(inv_mod(2, 3), Some(2));
        assert_eq!(inv_mod(3, 2), Some(1));
        assert_eq!(inv_mod(2, 4), None);
        assert_eq!(primitive_root(7), 3);
    }

    #[test]
    fn gl_generators_generate() {
        for (p, n) in [(2u32, 2usize), (3, 2), (2, 3)] {
            let gens = gl_generators(p, n);
            let mut seen: HashSet<FpMatrix> = HashSet::new();
            let mut stack = vec![FpMatrix::identity(p, n)];
            seen.insert(FpMatrix::identity(p, n));
            while let Some(m) = stack.pop() {
                for g in &gens {
                    let next = &m * g;
                    if seen.insert(next.clone()) {
                        stack.push(next);
                    }
                }
            }
            assert_eq!(seen.len() as u64, gl_order(p, n));
        }
    }
}
