//! Skew-morphisms of `G = Z_p^n`.
//!
//! A permutation `σ` of `G` fixing `0` is a skew-morphism when
//! `σ(x + y) = σ(x) + σ^{π(x)}(y)` for some power function `π`. Elements of
//! `G` are indices under the labelling of [`crate::fpalg::index_vec`], and `π`
//! is stored reduced modulo the order of `σ`.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fpalg::{index_vec, space_size, split_order, FpError, FpMatrix, VectorSpace};
use crate::group_engine::{check_group_law, closure, is_abelian, Group, GroupError, Subgroup};

/// Random triples used by the skew-product self-test when `|X| > 200`.
pub const SELF_TEST_SAMPLES: usize = 100_000;
const SELF_TEST_SEED: u64 = 0x5eed;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SkewError {
    #[error("expected {expected} images, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("images do not form a permutation")]
    NotPermutation,
    #[error("the identity is moved to {0}")]
    IdentityMoved(u32),
    #[error("f_x is not a power of σ at x = {witness}")]
    NotSkew { witness: u32 },
    #[error("order {0} is out of range")]
    OrderTooLarge(u128),
    #[error("power function disagrees at x = {0}")]
    PowerMismatch(u32),
    #[error("record inconsistent: {0}")]
    Record(String),
    #[error("labelling is not an isomorphism: {0}")]
    Labeling(String),
    #[error("factorization precondition fails: {0}")]
    Factorization(String),
    #[error(transparent)]
    Fp(#[from] FpError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SkewMorphism {
    p: u32,
    n: usize,
    images: Vec<u32>,
    pi: Vec<u32>,
    order: u32,
    k: u32,
    m: u32,
}

/// One JSONL line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkewRecord {
    pub p: u32,
    pub n: usize,
    pub order: u32,
    pub k: u32,
    pub m: u32,
    pub sigma: Vec<u32>,
    pub pi: Vec<u32>,
    pub automorphism: bool,
}

impl SkewMorphism {
    fn from_parts(p: u32, n: usize, images: Vec<u32>, pi: Vec<u32>, order: u32) -> Self {
        let (k, m) = split_order(order as u64, p);
        SkewMorphism { p, n, images, pi, order, k: k as u32, m }
    }

    pub fn identity(p: u32, n: usize) -> Self {
        let size = space_size(p, n);
        Self::from_parts(p, n, (0..size as u32).collect(), vec![0; size], 1)
    }

    /// The automorphism `x ↦ x·M`, with `π ≡ 1`.
    pub fn linear(m: &FpMatrix) -> Self {
        let images = m.as_permutation();
        let order = permutation_order(&images) as u32;
        let size = images.len();
        Self::from_parts(m.p(), m.dim(), images, vec![1 % order; size], order)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn into_images(self) -> Vec<u32> {
        self.images
    }

    pub fn pi(&self) -> &[u32] {
        &self.pi
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.images[x as usize]
    }

    pub fn is_automorphism(&self) -> bool {
        let one = 1 % self.order;
        self.pi.iter().all(|&e| e == one)
    }

    /// Images of `σ^j`.
    pub fn power_images(&self, j: u64) -> Vec<u32> {
        let j = (j % self.order as u64) as u32;
        let mut out: Vec<u32> = (0..self.size() as u32).collect();
        for _ in 0..j {
            for y in out.iter_mut() {
                *y = self.images[*y as usize];
            }
        }
        out
    }

    /// Cycles of `σ` on `G ∖ {0}`, each starting at its least element, sorted.
    pub fn orbits(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.size()];
        seen[0] = true;
        let mut out = Vec::new();
        for start in 1..self.size() as u32 {
            if seen[start as usize] {
                continue;
            }
            let mut cyc = vec![start];
            seen[start as usize] = true;
            let mut y = self.apply(start);
            while y != start {
                seen[y as usize] = true;
                cyc.push(y);
                y = self.apply(y);
            }
            out.push(cyc);
        }
        out
    }

    pub fn to_record(&self) -> SkewRecord {
        SkewRecord {
            p: self.p,
            n: self.n,
            order: self.order,
            k: self.k,
            m: self.m,
            sigma: self.images.clone(),
            pi: self.pi.clone(),
            automorphism: self.is_automorphism(),
        }
    }
}

/// Order of a permutation as the lcm of its cycle lengths.
pub fn permutation_order(images: &[u32]) -> u128 {
    let mut seen = vec![false; images.len()];
    let mut order: u128 = 1;
    for start in 0..images.len() {
        if seen[start] {
            continue;
        }
        let mut len: u128 = 0;
        let mut y = start;
        while !seen[y] {
            seen[y] = true;
            y = images[y] as usize;
            len += 1;
        }
        order = order / gcd128(order, len) * len;
    }
    order
}

fn gcd128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn check_permutation(images: &[u32], size: usize) -> Result<(), SkewError> {
    if images.len() != size {
        return Err(SkewError::WrongLength { expected: size, got: images.len() });
    }
    let mut seen = vec![false; size];
    for &y in images {
        match seen.get_mut(y as usize) {
            Some(s) if !*s => *s = true,
            _ => return Err(SkewError::NotPermutation),
        }
    }
    if images[0] != 0 {
        return Err(SkewError::IdentityMoved(images[0]));
    }
    Ok(())
}

/// Solves `e ≡ r1 (mod m1)`, `e ≡ r2 (mod m2)`; `None` when inconsistent.
fn crt(r1: u128, m1: u128, r2: u128, m2: u128) -> Option<(u128, u128)> {
    let g = gcd128(m1, m2);
    let diff = (r2 as i128 - r1 as i128).rem_euclid(m2 as i128) as u128;
    if !diff.is_multiple_of(g) {
        return None;
    }
    let m2g = m2 / g;
    let lcm = m1 * m2g;
    if m2g == 1 {
        return Some((r1 % lcm, lcm));
    }
    let inv = inv_mod128((m1 / g) % m2g, m2g)?;
    let t = (diff / g) % m2g * inv % m2g;
    Some(((r1 + m1 * t) % lcm, lcm))
}

fn inv_mod128(a: u128, m: u128) -> Option<u128> {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    (old_r == 1).then(|| old_s.rem_euclid(m as i128) as u128)
}

/// Cycle structure of a permutation, for matching maps against powers.
struct Cycles {
    id: Vec<u32>,
    pos: Vec<u32>,
    members: Vec<Vec<u32>>,
}

impl Cycles {
    fn new(images: &[u32]) -> Self {
        let size = images.len();
        let mut id = vec![u32::MAX; size];
        let mut pos = vec![0u32; size];
        let mut members = Vec::new();
        for start in 0..size {
            if id[start] != u32::MAX {
                continue;
            }
            let c = members.len() as u32;
            let mut cyc = Vec::new();
            let mut y = start;
            while id[y] == u32::MAX {
                id[y] = c;
                pos[y] = cyc.len() as u32;
                cyc.push(y as u32);
                y = images[y] as usize;
            }
            members.push(cyc);
        }
        Cycles { id, pos, members }
    }

    /// The exponent `e` (mod the order) with `f = σ^e`, if any.
    fn exponent_of(&self, f: impl Fn(u32) -> u32) -> Option<u128> {
        let (mut r, mut modulus) = (0u128, 1u128);
        for cyc in &self.members {
            let len = cyc.len() as u32;
            let first = f(cyc[0]);
            if self.id[first as usize] != self.id[cyc[0] as usize] {
                return None;
            }
            let d = self.pos[first as usize];
            for (t, &y) in cyc.iter().enumerate().skip(1) {
                if f(y) != cyc[((t as u32 + d) % len) as usize] {
                    return None;
                }
            }
            (r, modulus) = crt(r, modulus, d as u128, len as u128)?;
        }
        Some(r)
    }
}

/// Validates candidate permutations of a fixed `Z_p^n`.
#[derive(Clone, Debug)]
pub struct SkewValidator {
    space: Arc<VectorSpace>,
}

impl SkewValidator {
    pub fn new(p: u32, n: usize) -> Result<Self, SkewError> {
        Ok(SkewValidator { space: Arc::new(VectorSpace::new(p, n)?) })
    }

    pub fn space(&self) -> &Arc<VectorSpace> {
        &self.space
    }

    pub fn p(&self) -> u32 {
        self.space.p()
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    pub fn validate(&self, images: Vec<u32>) -> Result<SkewMorphism, SkewError> {
        let sp = &*self.space;
        check_permutation(&images, sp.size())?;
        let cycles = Cycles::new(&images);
        let mut pi = Vec::with_capacity(images.len());
        for x in 0..sp.size() as u32 {
            let sx = images[x as usize];
            let e = cycles
                .exponent_of(|y| sp.sub(images[sp.add(x, y) as usize], sx))
                .ok_or(SkewError::NotSkew { witness: x })?;
            pi.push(e);
        }
        let order = permutation_order(&images);
        if order > u32::MAX as u128 {
            return Err(SkewError::OrderTooLarge(order));
        }
        let pi = pi.into_iter().map(|e| e as u32).collect();
        Ok(SkewMorphism::from_parts(sp.p(), sp.n(), images, pi, order as u32))
    }

    /// Parses a record, revalidating the permutation and every stored field.
    pub fn from_record(&self, rec: &SkewRecord) -> Result<SkewMorphism, SkewError> {
        if rec.p != self.p() || rec.n != self.n() {
            return Err(SkewError::Record(format!("expected (p, n) = ({}, {})", self.p(), self.n())));
        }
        let sigma = self.validate(rec.sigma.clone())?;
        if rec.pi.len() != sigma.size() {
            return Err(SkewError::Record("pi has the wrong length".into()));
        }
        if let Some(x) = (0..sigma.size()).find(|&x| rec.pi[x] != sigma.pi[x]) {
            return Err(SkewError::PowerMismatch(x as u32));
        }
        if rec.order != sigma.order || rec.k != sigma.k || rec.m != sigma.m || rec.automorphism != sigma.is_automorphism() {
            return Err(SkewError::Record("order, k, m or automorphism flag disagrees".into()));
        }
        Ok(sigma)
    }

    /// `x ↦ α⁻¹(σ(α(x)))`, revalidated.
    pub fn aut_conjugate(&self, sigma: &SkewMorphism, alpha: &FpMatrix) -> Result<SkewMorphism, SkewError> {
        let a = alpha.as_permutation();
        let ainv = invert_permutation(&a);
        self.validate(conjugate_images(sigma.images(), &a, &ainv))
    }

    /// `σ^j`, revalidated.
    pub fn power(&self, sigma: &SkewMorphism, j: u64) -> Result<SkewMorphism, SkewError> {
        self.validate(sigma.power_images(j))
    }
}

pub fn validate(p: u32, n: usize, images: Vec<u32>) -> Result<SkewMorphism, SkewError> {
    SkewValidator::new(p, n)?.validate(images)
}

/// Recomputes `π` from the images alone.
pub fn derive_power(sigma: &SkewMorphism) -> Vec<u32> {
    validate(sigma.p, sigma.n, sigma.images.clone())
        .expect("σ was validated on construction")
        .pi
}

pub fn is_automorphism(sigma: &SkewMorphism) -> bool {
    sigma.is_automorphism()
}

pub fn aut_conjugate(sigma: &SkewMorphism, alpha: &FpMatrix) -> Result<SkewMorphism, SkewError> {
    SkewValidator::new(sigma.p, sigma.n)?.aut_conjugate(sigma, alpha)
}

pub fn invert_permutation(a: &[u32]) -> Vec<u32> {
    let mut out = vec![0u32; a.len()];
    for (i, &y) in a.iter().enumerate() {
        out[y as usize] = i as u32;
    }
    out
}

/// `x ↦ a⁻¹(σ(a(x)))` on raw image arrays.
pub fn conjugate_images(sigma: &[u32], a: &[u32], ainv: &[u32]) -> Vec<u32> {
    a.iter().map(|&ax| ainv[sigma[ax as usize] as usize]).collect()
}

/// `⟨σ⟩`-orbits on `G ∖ {0}` that generate `G` and are closed under negation.
pub fn inverse_closed_generating_orbits(sigma: &SkewMorphism) -> Vec<Vec<u32>> {
    let space = VectorSpace::new(sigma.p, sigma.n).expect("valid parameters");
    sigma
        .orbits()
        .into_iter()
        .filter(|o| {
            let mut sorted = o.clone();
            sorted.sort_unstable();
            o.iter().all(|&y| sorted.binary_search(&space.neg(y)).is_ok())
                && space.span_rank(o.iter().copied()) == sigma.n
        })
        .collect()
}

/// `g·σ^i` in a skew product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SkewElem {
    pub g: u32,
    pub i: u32,
}

/// `X = G⟨σ⟩` with `(aσ^i)(bσ^j) = (a + σ^i(b)) σ^{S_i(b) + j}`, where
/// `S_i(b) = Σ_{t<i} π(σ^t(b))`.
#[derive(Clone, Debug)]
pub struct SkewProductGroup {
    sigma: SkewMorphism,
    space: Arc<VectorSpace>,
    // powers[i * N + b] = σ^i(b), sums[i * N + b] = S_i(b) mod order
    powers: Vec<u32>,
    sums: Vec<u32>,
}

impl SkewProductGroup {
    /// The multiplication tables, without the group-law self-test.
    pub fn unchecked(sigma: SkewMorphism, space: Arc<VectorSpace>) -> Self {
        let size = sigma.size();
        let ord = sigma.order as usize;
        let mut powers = Vec::with_capacity(ord * size);
        let mut sums = Vec::with_capacity(ord * size);
        powers.extend(0..size as u32);
        sums.extend(std::iter::repeat_n(0u32, size));
        for i in 1..ord {
            for b in 0..size {
                let prev = powers[(i - 1) * size + b];
                powers.push(sigma.images[prev as usize]);
                let s = (sums[(i - 1) * size + b] + sigma.pi[prev as usize]) % sigma.order;
                sums.push(s);
            }
        }
        SkewProductGroup { sigma, space, powers, sums }
    }

    pub fn skew(&self) -> &SkewMorphism {
        &self.sigma
    }

    pub fn space(&self) -> &VectorSpace {
        &self.space
    }

    pub fn order(&self) -> usize {
        self.sigma.size() * self.sigma.order as usize
    }

    #[inline]
    fn pow_at(&self, i: u32, b: u32) -> u32 {
        self.powers[i as usize * self.sigma.size() + b as usize]
    }

    /// The action `y ↦ g + σ^i(y)` of `gσ^i` on `G`.
    #[inline]
    pub fn act(&self, e: &SkewElem, y: u32) -> u32 {
        self.space.add(e.g, self.pow_at(e.i, y))
    }

    pub fn elem(&self, g: u32) -> SkewElem {
        SkewElem { g, i: 0 }
    }

    pub fn sigma(&self) -> SkewElem {
        SkewElem { g: 0, i: 1 % self.sigma.order }
    }

    pub fn sigma_pow(&self, e: u64) -> SkewElem {
        SkewElem { g: 0, i: (e % self.sigma.order as u64) as u32 }
    }

    /// `σ₁ = σ^k`.
    pub fn sigma1(&self) -> SkewElem {
        self.sigma_pow(self.sigma.k as u64)
    }

    /// `σ₂ = σ^{p^m}`.
    pub fn sigma2(&self) -> SkewElem {
        self.sigma_pow((self.sigma.p as u64).pow(self.sigma.m))
    }

    /// `z = σ^{k p^{m−1}}` when `m ≥ 1`.
    pub fn z(&self) -> Option<SkewElem> {
        (self.sigma.m >= 1).then(|| self.sigma_pow(self.sigma.k as u64 * (self.sigma.p as u64).pow(self.sigma.m - 1)))
    }

    /// Unit vectors `e_1, …, e_n` of `G`, the canonical labelling basis.
    pub fn g_basis(&self) -> Vec<SkewElem> {
        let p = self.sigma.p;
        let n = self.sigma.n;
        (0..n).map(|i| self.elem(p.pow((n - 1 - i) as u32))).collect()
    }

    pub fn g_subgroup(&self) -> Subgroup<SkewElem> {
        closure(self, &self.g_basis()).expect("G is small")
    }

    pub fn rotation_subgroup(&self) -> Subgroup<SkewElem> {
        closure(self, &[self.sigma()]).expect("⟨σ⟩ is small")
    }

    /// `P = G⟨σ^k⟩`.
    pub fn sylow(&self) -> Result<Subgroup<SkewElem>, GroupError> {
        let mut gens = self.g_basis();
        gens.push(self.sigma1());
        closure(self, &gens)
    }

    pub fn whole(&self) -> Result<Subgroup<SkewElem>, GroupError> {
        let mut gens = self.g_basis();
        gens.push(self.sigma());
        closure(self, &gens)
    }

    /// Group-law self-test over the whole of `X`.
    pub fn self_test(&self, samples: usize) -> Result<Subgroup<SkewElem>, SkewError> {
        let x = self.whole()?;
        if x.order() != self.order() {
            return Err(GroupError::GroupLaw(format!("generated {} elements, expected {}", x.order(), self.order())).into());
        }
        check_group_law(self, &x, samples, SELF_TEST_SEED)?;
        Ok(x)
    }
}

impl Group for SkewProductGroup {
    type Elem = SkewElem;

    fn identity(&self) -> SkewElem {
        SkewElem { g: 0, i: 0 }
    }

    #[inline]
    fn mul(&self, a: &SkewElem, b: &SkewElem) -> SkewElem {
        let idx = a.i as usize * self.sigma.size() + b.g as usize;
        let g = self.space.add(a.g, self.powers[idx]);
        let i = (self.sums[idx] + b.i) % self.sigma.order;
        SkewElem { g, i }
    }

    fn inv(&self, a: &SkewElem) -> SkewElem {
        let neg = self.space.neg(a.g);
        if a.i == 0 {
            return SkewElem { g: neg, i: 0 };
        }
        let ord = self.sigma.order;
        let b = self.pow_at(ord - a.i, neg);
        let s = self.sums[a.i as usize * self.sigma.size() + b as usize];
        SkewElem { g: b, i: (ord - s) % ord }
    }

    fn is_member(&self, a: &SkewElem) -> bool {
        (a.g as usize) < self.sigma.size() && a.i < self.sigma.order
    }
}

/// Builds `X = G⟨σ⟩` and runs the group-law self-test.
pub fn build_skew_product(sigma: SkewMorphism) -> Result<SkewProductGroup, SkewError> {
    let space = Arc::new(VectorSpace::new(sigma.p, sigma.n)?);
    let x = SkewProductGroup::unchecked(sigma, space);
    x.self_test(SELF_TEST_SAMPLES)?;
    Ok(x)
}

/// Reads off the skew-morphism of `G` determined by `s`: `s·g = g'·s^i`
/// gives `σ(g) = g'`, transported to `F_p^n` along `basis`, where the
/// element labelled by coordinates `c` is `Π basis_i^{c_i}`. Requires
/// `⟨s⟩` core-free, so that `σ` has the order of `s`.
pub fn extract_skew<G: Group>(
    validator: &SkewValidator,
    group: &G,
    g: &Subgroup<G::Elem>,
    s: &G::Elem,
    basis: &[G::Elem],
) -> Result<SkewMorphism, SkewError> {
    let (sigma, ord) = extract_induced_skew(validator, group, g, s, basis)?;
    if sigma.order as u64 != ord {
        return Err(SkewError::Factorization(format!(
            "⟨s⟩ is not core-free: σ has order {} but s has order {ord}",
            sigma.order
        )));
    }
    Ok(sigma)
}

/// As [`extract_skew`] without the core-free requirement: the result is the
/// skew-morphism of `G` in `X / core(⟨s⟩)`, returned with the order of `s`.
pub fn extract_induced_skew<G: Group>(
    validator: &SkewValidator,
    group: &G,
    g: &Subgroup<G::Elem>,
    s: &G::Elem,
    basis: &[G::Elem],
) -> Result<(SkewMorphism, u64), SkewError> {
    let (p, n) = (validator.p(), validator.n());
    let size = space_size(p, n);
    if basis.len() != n {
        return Err(SkewError::Labeling(format!("{} basis elements for rank {n}", basis.len())));
    }
    if g.order() != size {
        return Err(SkewError::Labeling(format!("|G| = {} but p^n = {size}", g.order())));
    }
    let id = group.identity();
    for b in basis {
        if !g.contains(b) || *b == id || group.pow(b, p as u64) != id {
            return Err(SkewError::Labeling(format!("{b:?} is not an element of order p in G")));
        }
    }
    if !is_abelian(group, g) {
        return Err(SkewError::Labeling("G is not abelian".into()));
    }
    let mut label: HashMap<G::Elem, u32> = HashMap::with_capacity(size);
    let mut elems = Vec::with_capacity(size);
    for c in 0..size as u64 {
        let v = index_vec(c, p, n)?;
        let e = v
            .coords()
            .iter()
            .zip(basis)
            .fold(id.clone(), |acc, (&ci, b)| group.mul(&acc, &group.pow(b, ci as u64)));
        if label.insert(e.clone(), c as u32).is_some() {
            return Err(SkewError::Labeling("basis is not independent".into()));
        }
        elems.push(e);
    }

    let ord = group.element_order(s);
    if ord > u32::MAX as u64 {
        return Err(SkewError::OrderTooLarge(ord as u128));
    }
    let sinv = group.inv(s);
    let mut inv_pows = vec![id.clone()];
    for i in 1..ord {
        let next = group.mul(&inv_pows[i as usize - 1], &sinv);
        if g.contains(&next) {
            return Err(SkewError::Factorization(format!("s^{i} lies in G")));
        }
        inv_pows.push(next);
    }
    let mut images = Vec::with_capacity(size);
    let mut pis = Vec::with_capacity(size);
    for (c, e) in elems.iter().enumerate() {
        let y = group.mul(s, e);
        let hit = inv_pows
            .iter()
            .enumerate()
            .find_map(|(i, si)| label.get(&group.mul(&y, si)).map(|&img| (img, i as u32)));
        let Some((img, i)) = hit else {
            return Err(SkewError::Factorization(format!("s·g for label {c} is not in G⟨s⟩")));
        };
        images.push(img);
        pis.push(i);
    }
    let sigma = validator.validate(images)?;
    if ord % sigma.order as u64 != 0 {
        return Err(SkewError::Factorization(format!("σ has order {} not dividing {ord}", sigma.order)));
    }
    if let Some(x) = (0..size).find(|&x| pis[x] % sigma.order != sigma.pi[x]) {
        return Err(SkewError::PowerMismatch(x as u32));
    }
    Ok((sigma, ord))
}
