//! Concrete carriers: permutations, cyclic groups, vector groups and the
//! affine group AGL(n, p).

use std::fmt;

use super::Group;
use crate::fpalg::{AffineMap, FpVector};

/// A permutation of `{0, …, d-1}` stored as its image array.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn from_images(images: Vec<u32>) -> Self {
        Perm(images)
    }

    pub fn identity(degree: usize) -> Self {
        Perm((0..degree as u32).collect())
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.0[x as usize]
    }

    pub fn is_bijection(&self) -> bool {
        let mut seen = vec![false; self.0.len()];
        for &y in &self.0 {
            match seen.get_mut(y as usize) {
                Some(s) if !*s => *s = true,
                _ => return false,
            }
        }
        true
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.0)
    }
}

/// Symmetric group on `degree` points; `mul(a, b)` applies `a` first.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
}

impl PermGroup {
    pub fn new(degree: usize) -> Self {
        PermGroup { degree }
    }
}

impl Group for PermGroup {
    type Elem = Perm;

    fn identity(&self) -> Perm {
        Perm::identity(self.degree)
    }

    fn mul(&self, a: &Perm, b: &Perm) -> Perm {
        Perm(a.0.iter().map(|&x| b.0[x as usize]).collect())
    }

    fn inv(&self, a: &Perm) -> Perm {
        let mut out = vec![0u32; a.0.len()];
        for (i, &y) in a.0.iter().enumerate() {
            out[y as usize] = i as u32;
        }
        Perm(out)
    }

    fn is_member(&self, a: &Perm) -> bool {
        a.degree() == self.degree && a.is_bijection()
    }
}

/// `Z_order` written additively.
#[derive(Clone, Debug)]
pub struct CyclicGroup {
    order: u64,
}

impl CyclicGroup {
    pub fn new(order: u64) -> Self {
        assert!(order > 0);
        CyclicGroup { order }
    }
}

impl Group for CyclicGroup {
    type Elem = u64;

    fn identity(&self) -> u64 {
        0
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.order
    }

    fn inv(&self, a: &u64) -> u64 {
        (self.order - a) % self.order
    }

    fn is_member(&self, a: &u64) -> bool {
        *a < self.order
    }
}

/// `F_p^n` under addition.
#[derive(Clone, Debug)]
pub struct VectorGroup {
    p: u32,
    n: usize,
}

impl VectorGroup {
    pub fn new(p: u32, n: usize) -> Self {
        VectorGroup { p, n }
    }
}

impl Group for VectorGroup {
    type Elem = FpVector;

    fn identity(&self) -> FpVector {
        FpVector::zero(self.p, self.n)
    }

    fn mul(&self, a: &FpVector, b: &FpVector) -> FpVector {
        a.add(b).expect("vectors of one space")
    }

    fn inv(&self, a: &FpVector) -> FpVector {
        a.neg()
    }

    fn is_member(&self, a: &FpVector) -> bool {
        a.p() == self.p && a.dim() == self.n
    }
}

/// AGL(n, p); `mul(f, g)` applies `f` first.
#[derive(Clone, Debug)]
pub struct AffineGroup {
    p: u32,
    n: usize,
}

impl AffineGroup {
    pub fn new(p: u32, n: usize) -> Self {
        AffineGroup { p, n }
    }
}

impl Group for AffineGroup {
    type Elem = AffineMap;

    fn identity(&self) -> AffineMap {
        AffineMap::identity(self.p, self.n)
    }

    fn mul(&self, a: &AffineMap, b: &AffineMap) -> AffineMap {
        a.then(b).expect("maps of one affine space")
    }

    fn inv(&self, a: &AffineMap) -> AffineMap {
        a.inverse()
    }

    fn is_member(&self, a: &AffineMap) -> bool {
        a.p() == self.p && a.dim() == self.n
    }
}
