//! Complete sets of skew-morphisms of `Z_p^n`, `n ≤ 3`.
//!
//! Two independent routes: an exhaustive depth-first search for tiny groups,
//! and a structured construction. The structured route takes every
//! automorphism (every matrix of GL(n, p)) and, for odd `p` and `n ∈ {2, 3}`,
//! builds canonical non-normal instances inside `AGL(n, p)`, reads their
//! skew-morphisms off a regular elementary abelian subgroup, and closes the
//! result under conjugation by GL(n, p).

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::fpalg::{
    all_matrices, gcd, general_linear_group, gl_generators, inv_mod, omega_set, space_size,
    unipotent_class_reps, AffineMap, FpError, FpMatrix, FpVector, VectorSpace,
};
use crate::group_engine::{closure, AffineGroup};
use crate::skew_core::{conjugate_images, extract_skew, invert_permutation, SkewError, SkewMorphism, SkewValidator};

/// Largest `p^n` the exhaustive search accepts.
pub const BRUTE_FORCE_MAX: usize = 11;
/// Largest odd `p` the structured route handles at `n = 3`.
pub const STRUCTURED_N3_MAX_P: u32 = 5;

#[derive(Debug, Error)]
pub enum EnumError {
    #[error("unsupported parameters: {0}")]
    Unsupported(String),
    #[error("construction fault: {0}")]
    Construction(String),
    #[error(transparent)]
    Skew(#[from] SkewError),
    #[error(transparent)]
    Fp(#[from] FpError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Brute,
    Structured,
    Both,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Brute => "brute",
            Method::Structured => "structured",
            Method::Both => "both",
        })
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "brute" => Ok(Method::Brute),
            "structured" => Ok(Method::Structured),
            "both" => Ok(Method::Both),
            other => Err(format!("unknown method {other:?}")),
        }
    }
}

/// Closed-form number of skew-morphisms of `Z_p^n`.
pub fn formula_count(p: u32, n: usize) -> Result<u64, EnumError> {
    let q = p as u64;
    match (p, n) {
        (2, 1) => Ok(1),
        (2, 2) => Ok(6),
        (2, 3) => Ok(168),
        (_, 1) => Ok(q - 1),
        (_, 2) => Ok(2 * (q + 1) * (q - 1).pow(3)),
        (_, 3) => Ok((q.pow(3) - 1) * (q * q - 1) * (q - 1) * (2 * q.pow(3) - 3 * q * q + q + 2)),
        _ => Err(EnumError::Unsupported(format!("no closed form for n = {n}"))),
    }
}

/// Image arrays packed one byte per entry when `p^n ≤ 256`, two otherwise.
pub type Packed = Box<[u8]>;

pub fn pack(images: &[u32]) -> Packed {
    if images.len() <= 256 {
        images.iter().map(|&y| y as u8).collect()
    } else {
        images.iter().flat_map(|&y| (y as u16).to_le_bytes()).collect()
    }
}

pub fn unpack(packed: &[u8], size: usize) -> Vec<u32> {
    if size <= 256 {
        packed.iter().map(|&b| b as u32).collect()
    } else {
        packed.chunks_exact(2).map(|c| u16::from_le_bytes([c[0], c[1]]) as u32).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SummaryRow {
    pub p: u32,
    pub n: usize,
    pub method: String,
    pub count_total: u64,
    pub count_aut: u64,
    pub count_nonaut: u64,
    pub formula_value: u64,
    #[serde(rename = "match")]
    pub matches: bool,
}

/// Symmetric difference of two sets of skew-morphisms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SetComparison {
    pub common: usize,
    pub only_left: Vec<Vec<u32>>,
    pub only_right: Vec<Vec<u32>>,
}

impl SetComparison {
    pub fn identical(&self) -> bool {
        self.only_left.is_empty() && self.only_right.is_empty()
    }
}

pub fn compare_sets(a: &[SkewMorphism], b: &[SkewMorphism]) -> SetComparison {
    let left: HashSet<&[u32]> = a.iter().map(|s| s.images()).collect();
    let right: HashSet<&[u32]> = b.iter().map(|s| s.images()).collect();
    let mut only_left: Vec<Vec<u32>> = left.difference(&right).map(|s| s.to_vec()).collect();
    let mut only_right: Vec<Vec<u32>> = right.difference(&left).map(|s| s.to_vec()).collect();
    only_left.sort();
    only_right.sort();
    SetComparison { common: left.intersection(&right).count(), only_left, only_right }
}

#[derive(Clone, Debug)]
pub struct EnumerationResult {
    pub p: u32,
    pub n: usize,
    pub method: Method,
    /// Sorted by image array; empty for count-only runs.
    pub skews: Vec<SkewMorphism>,
    pub materialized: bool,
    pub count_total: u64,
    pub count_aut: u64,
    pub count_nonaut: u64,
    pub formula_value: u64,
    /// Members passed through full validation.
    pub validated: u64,
    /// Brute versus structured, for `Method::Both`.
    pub comparison: Option<SetComparison>,
}

impl EnumerationResult {
    fn from_set(p: u32, n: usize, method: Method, mut skews: Vec<SkewMorphism>, validated: u64) -> Result<Self, EnumError> {
        skews.sort_by(|a, b| a.images().cmp(b.images()));
        let count_aut = skews.iter().filter(|s| s.is_automorphism()).count() as u64;
        let total = skews.len() as u64;
        Ok(EnumerationResult {
            p,
            n,
            method,
            skews,
            materialized: true,
            count_total: total,
            count_aut,
            count_nonaut: total - count_aut,
            formula_value: formula_count(p, n)?,
            validated,
            comparison: None,
        })
    }

    pub fn matches_formula(&self) -> bool {
        self.count_total == self.formula_value && self.comparison.as_ref().is_none_or(|c| c.identical())
    }

    pub fn summary_row(&self) -> SummaryRow {
        SummaryRow {
            p: self.p,
            n: self.n,
            method: self.method.to_string(),
            count_total: self.count_total,
            count_aut: self.count_aut,
            count_nonaut: self.count_nonaut,
            formula_value: self.formula_value,
            matches: self.matches_formula(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct EnumOptions {
    /// Fraction of members validated when the full set is too large to check.
    pub sample_rate: f64,
    pub seed: u64,
    /// Build the full member list for `(5, 3)` instead of counting.
    pub materialize: bool,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions { sample_rate: 0.01, seed: 0, materialize: false }
    }
}

fn check_params(p: u32, n: usize) -> Result<(), EnumError> {
    crate::fpalg::check_prime(p)?;
    if !(1..=3).contains(&n) {
        return Err(EnumError::Unsupported(format!("n = {n}; only n ∈ {{1, 2, 3}} are supported")));
    }
    Ok(())
}

struct Search<'a> {
    sp: &'a VectorSpace,
    validator: &'a SkewValidator,
    img: Vec<u32>,
    used: Vec<bool>,
    cycle: Vec<u32>,
    out: Vec<SkewMorphism>,
}

impl Search<'_> {
    fn run(&mut self, v: usize) {
        let size = self.img.len();
        if v == size {
            if let Ok(s) = self.validator.validate(self.img.clone()) {
                self.out.push(s);
            }
            return;
        }
        for w in 1..size {
            if self.used[w] {
                continue;
            }
            self.img[v] = w as u32;
            self.used[w] = true;
            if self.consistent(v) {
                self.run(v + 1);
            }
            self.used[w] = false;
        }
    }

    /// Necessary conditions on the assignment of indices `0..=v`: each `f_x`
    /// commutes with `σ` where both sides are known, and maps a point on a
    /// closed cycle of `σ` into the same cycle.
    fn consistent(&mut self, v: usize) -> bool {
        let size = self.img.len();
        let known = |y: u32| (y as usize) <= v;
        self.cycle.iter_mut().for_each(|c| *c = u32::MAX);
        for y in 0..=v {
            if self.cycle[y] != u32::MAX {
                continue;
            }
            let mut t = self.img[y];
            let mut steps = 0;
            while known(t) && t as usize != y && steps < size {
                t = self.img[t as usize];
                steps += 1;
            }
            if t as usize == y {
                let mut u = y as u32;
                loop {
                    self.cycle[u as usize] = y as u32;
                    u = self.img[u as usize];
                    if u as usize == y {
                        break;
                    }
                }
            }
        }
        let sp = self.sp;
        for x in 0..=v as u32 {
            let sx = self.img[x as usize];
            for y in 0..size as u32 {
                let xy = sp.add(x, y);
                if !known(xy) {
                    continue;
                }
                let f = sp.sub(self.img[xy as usize], sx);
                let (cy, cf) = (self.cycle[y as usize], self.cycle[f as usize]);
                if (cy != u32::MAX || cf != u32::MAX) && cy != cf {
                    return false;
                }
                if known(y) && known(f) {
                    let sy = self.img[y as usize];
                    let xsy = sp.add(x, sy);
                    if known(xsy) && sp.sub(self.img[xsy as usize], sx) != self.img[f as usize] {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Every skew-morphism of `Z_p^n` by pruned depth-first search over image
/// assignments in index order. Refuses `p^n > BRUTE_FORCE_MAX`.
pub fn brute_force_enum(p: u32, n: usize) -> Result<EnumerationResult, EnumError> {
    check_params(p, n)?;
    let size = space_size(p, n);
    if size > BRUTE_FORCE_MAX {
        return Err(EnumError::Unsupported(format!("exhaustive search needs p^n ≤ {BRUTE_FORCE_MAX}, got {size}")));
    }
    let validator = SkewValidator::new(p, n)?;
    let mut search = Search {
        sp: validator.space(),
        validator: &validator,
        img: vec![0; size],
        used: vec![false; size],
        cycle: vec![u32::MAX; size],
        out: Vec::new(),
    };
    search.used[0] = true;
    search.run(1);
    let skews = std::mem::take(&mut search.out);
    let validated = skews.len() as u64;
    EnumerationResult::from_set(p, n, Method::Brute, skews, validated)
}

/// Every matrix of GL(n, p) as an automorphism with `π ≡ 1`.
pub fn enum_automorphisms(p: u32, n: usize) -> Result<Vec<SkewMorphism>, EnumError> {
    check_params(p, n)?;
    Ok(general_linear_group(p, n).iter().map(SkewMorphism::linear).collect())
}

/// Number of invertible matrices, counted by running through all of `M_n(F_p)`.
pub fn count_invertible(p: u32, n: usize) -> u64 {
    all_matrices(p, n).filter(|m| m.is_invertible()).count() as u64
}

/// Counts invertible matrices and validates a seeded sample of at least
/// `sample_rate` of them as skew-morphisms; returns both counts.
pub fn count_automorphisms_sampled(p: u32, n: usize, sample_rate: f64, seed: u64) -> Result<(u64, u64), EnumError> {
    let total = count_invertible(p, n);
    let amount = ((total as f64 * sample_rate).ceil() as usize).clamp(1, total as usize);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chosen: HashSet<usize> = sample(&mut rng, total as usize, amount).into_iter().collect();
    let validator = SkewValidator::new(p, n)?;
    for m in all_matrices(p, n).filter(|m| m.is_invertible()).enumerate().filter(|(i, _)| chosen.contains(i)).map(|(_, m)| m) {
        let s = SkewMorphism::linear(&m);
        if validator.validate(s.images().to_vec())? != s {
            return Err(EnumError::Construction(format!("linear map {m:?} failed validation")));
        }
    }
    Ok((total, chosen.len() as u64))
}

/// CRT exponents with `σ₁^u σ₂^v` having `k`-th power `σ₁` and `p`-th power `σ₂`.
fn recombination_exponents(p: u32, k: u64) -> Result<(u64, u64), EnumError> {
    if gcd(k, p as u64) != 1 {
        return Err(EnumError::Construction(format!("order {k} of σ₂ is not prime to {p}")));
    }
    let u = inv_mod(k % p as u64, p as u64).expect("k prime to p");
    let v = if k == 1 { 0 } else { inv_mod(p as u64 % k, k).expect("p prime to k") };
    Ok((u, v))
}

/// Seed skew-morphism from `X = T ⋊ ⟨σ⟩ ≤ AGL(n, p)` with `σ = σ₁^u σ₂^v`
/// linear, read off the regular subgroup generated by `gens` (in order).
fn affine_seed(
    validator: &SkewValidator,
    sigma1: &FpMatrix,
    sigma2: &FpMatrix,
    gens: &[AffineMap],
) -> Result<SkewMorphism, EnumError> {
    let p = validator.p();
    let k = sigma2.order()?;
    let (u, v) = recombination_exponents(p, k)?;
    let lin = sigma1.pow(u).checked_mul(&sigma2.pow(v))?;
    let sigma = AffineMap::linear_map(lin)?;
    let agl = AffineGroup::new(p, validator.n());
    let g = closure(&agl, gens).map_err(SkewError::from)?;
    let skew = extract_skew(validator, &agl, &g, &sigma, gens)?;
    if skew.is_automorphism() {
        return Err(EnumError::Construction(format!("seed {sigma:?} produced an automorphism")));
    }
    Ok(skew)
}

fn translation(p: u32, coords: &[i64]) -> AffineMap {
    AffineMap::translation(FpVector::from_i64(p, coords))
}

fn require_odd(p: u32, what: &str) -> Result<(), EnumError> {
    crate::fpalg::check_prime(p)?;
    if p == 2 {
        return Err(EnumError::Unsupported(format!("{what} requires an odd prime")));
    }
    Ok(())
}

/// Canonical non-normal seeds for `n = 2`: for each `i ∈ Z_p^*` and
/// `s ∈ F_p ∖ {0, 1}`, `σ₁ = [[1,0],[1,1]]`, `σ₂ = sE` and
/// `G = ⟨t_{(1,0)}, t_{(0,1)} σ₁^{-i}⟩`.
pub fn nonnormal_seeds_n2(p: u32) -> Result<Vec<SkewMorphism>, EnumError> {
    require_odd(p, "the non-normal construction")?;
    let validator = SkewValidator::new(p, 2)?;
    let sigma1 = FpMatrix::from_rows(p, &[&[1, 0], &[1, 1]]);
    let sigma1_inv = sigma1.inverse()?;
    let mut seeds = Vec::new();
    for i in 1..p as u64 {
        let gens = [
            translation(p, &[1, 0]),
            translation(p, &[0, 1]).then(&AffineMap::linear_map(sigma1_inv.pow(i))?)?,
        ];
        for s in 2..p {
            seeds.push(affine_seed(&validator, &sigma1, &FpMatrix::scalar(p, 2, s), &gens)?);
        }
    }
    Ok(seeds)
}

/// Canonical non-normal seeds for `n = 3`: `σ₁ = g1`, `σ₂` ranging over the
/// Ω-set, `i ∈ Z_p^*`, and `G = ⟨t_{(0,1,0)}, t_{(0,0,1)}, t_{(1,0,0)} σ₁^{-i}⟩`.
pub fn nonnormal_seeds_n3(p: u32) -> Result<Vec<SkewMorphism>, EnumError> {
    require_odd(p, "the non-normal construction")?;
    let validator = SkewValidator::new(p, 3)?;
    let (sigma1, _) = unipotent_class_reps(p)?;
    let sigma1_inv = sigma1.inverse()?;
    let omega = omega_set(p)?;
    let mut seeds = Vec::new();
    for i in 1..p as u64 {
        let gens = [
            translation(p, &[0, 1, 0]),
            translation(p, &[0, 0, 1]),
            translation(p, &[1, 0, 0]).then(&AffineMap::linear_map(sigma1_inv.pow(i))?)?,
        ];
        for sigma2 in &omega {
            seeds.push(affine_seed(&validator, &sigma1, sigma2, &gens)?);
        }
    }
    Ok(seeds)
}

/// Orbit union of `seeds` under `σ ↦ α⁻¹σα` for `α ∈ GL(n, p)`, as packed
/// image arrays, sorted.
pub fn gl_closure(p: u32, n: usize, seeds: &[SkewMorphism]) -> Vec<Packed> {
    let size = space_size(p, n);
    let gens: Vec<(Vec<u32>, Vec<u32>)> = gl_generators(p, n)
        .iter()
        .map(|a| {
            let perm = a.as_permutation();
            let inv = invert_permutation(&perm);
            (perm, inv)
        })
        .collect();
    let mut seen: HashSet<Packed> = HashSet::new();
    let mut queue: Vec<Packed> = Vec::new();
    for s in seeds {
        let key = pack(s.images());
        if !seen.insert(key.clone()) {
            continue;
        }
        queue.push(key);
        while let Some(cur) = queue.pop() {
            let images = unpack(&cur, size);
            for (a, ainv) in &gens {
                let key = pack(&conjugate_images(&images, a, ainv));
                if !seen.contains(&key) {
                    seen.insert(key.clone());
                    queue.push(key);
                }
            }
        }
    }
    let mut out: Vec<Packed> = seen.into_iter().collect();
    out.par_sort_unstable();
    out
}

/// Validates every packed member, in parallel.
fn validate_all(validator: &SkewValidator, packed: &[Packed]) -> Result<Vec<SkewMorphism>, EnumError> {
    let size = validator.space().size();
    packed
        .par_iter()
        .map(|k| validator.validate(unpack(k, size)).map_err(EnumError::from))
        .collect()
}

/// The non-normal skew-morphisms of `Z_p^2`, each validated.
pub fn enum_nonnormal_n2(p: u32) -> Result<Vec<SkewMorphism>, EnumError> {
    let seeds = nonnormal_seeds_n2(p)?;
    let packed = gl_closure(p, 2, &seeds);
    let validator = SkewValidator::new(p, 2)?;
    let all = validate_all(&validator, &packed)?;
    if let Some(s) = all.iter().find(|s| s.is_automorphism()) {
        return Err(EnumError::Construction(format!("closure reached the automorphism {:?}", s.images())));
    }
    Ok(all)
}

/// The non-normal skew-morphisms of `Z_p^3` as packed arrays plus the
/// number validated. Every member is validated when `sample_rate ≥ 1` or
/// `p = 3`; otherwise a seeded sample of at least `sample_rate` of them.
pub fn enum_nonnormal_n3_packed(p: u32, sample_rate: f64, seed: u64) -> Result<(Vec<Packed>, u64), EnumError> {
    if p > STRUCTURED_N3_MAX_P {
        return Err(EnumError::Unsupported(format!("n = 3 construction supports p ≤ {STRUCTURED_N3_MAX_P}")));
    }
    let seeds = nonnormal_seeds_n3(p)?;
    let packed = gl_closure(p, 3, &seeds);
    let validator = SkewValidator::new(p, 3)?;
    let size = validator.space().size();
    let chosen: Vec<usize> = if p == 3 || sample_rate >= 1.0 {
        (0..packed.len()).collect()
    } else {
        let amount = ((packed.len() as f64 * sample_rate).ceil() as usize).clamp(1, packed.len());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut idx = sample(&mut rng, packed.len(), amount).into_vec();
        idx.sort_unstable();
        idx
    };
    chosen.par_iter().try_for_each(|&i| -> Result<(), EnumError> {
        let s = validator.validate(unpack(&packed[i], size))?;
        if s.is_automorphism() {
            return Err(EnumError::Construction(format!("closure reached an automorphism at member {i}")));
        }
        Ok(())
    })?;
    Ok((packed, chosen.len() as u64))
}

/// The non-normal skew-morphisms of `Z_p^3`, each validated.
pub fn enum_nonnormal_n3(p: u32) -> Result<Vec<SkewMorphism>, EnumError> {
    let (packed, _) = enum_nonnormal_n3_packed(p, 1.0, 0)?;
    let validator = SkewValidator::new(p, 3)?;
    validate_all(&validator, &packed)
}

fn structured(p: u32, n: usize, opts: &EnumOptions) -> Result<EnumerationResult, EnumError> {
    check_params(p, n)?;
    let nonnormal_applies = p != 2 && n >= 2;
    if n == 3 && nonnormal_applies && p > STRUCTURED_N3_MAX_P {
        return Err(EnumError::Unsupported(format!("n = 3 construction supports p ≤ {STRUCTURED_N3_MAX_P}")));
    }
    if n == 3 && p == 5 && !opts.materialize {
        let (packed, checked) = enum_nonnormal_n3_packed(p, opts.sample_rate, opts.seed)?;
        let (aut, aut_checked) = count_automorphisms_sampled(p, n, opts.sample_rate, opts.seed)?;
        let validated = checked + aut_checked;
        let nonaut = packed.len() as u64;
        return Ok(EnumerationResult {
            p,
            n,
            method: Method::Structured,
            skews: Vec::new(),
            materialized: false,
            count_total: aut + nonaut,
            count_aut: aut,
            count_nonaut: nonaut,
            formula_value: formula_count(p, n)?,
            validated,
            comparison: None,
        });
    }
    let validator = SkewValidator::new(p, n)?;
    let auts: Vec<SkewMorphism> = general_linear_group(p, n).iter().map(SkewMorphism::linear).collect();
    let mut validated = 0u64;
    if p == 3 || auts.len() <= 20_000 {
        auts.par_iter().try_for_each(|s| -> Result<(), EnumError> {
            let checked = validator.validate(s.images().to_vec())?;
            if &checked != s {
                return Err(EnumError::Construction(format!("linear map {:?} failed validation", s.images())));
            }
            Ok(())
        })?;
        validated += auts.len() as u64;
    }
    let mut all = auts;
    if nonnormal_applies {
        let non = match n {
            2 => enum_nonnormal_n2(p)?,
            _ => {
                let (packed, checked) = enum_nonnormal_n3_packed(p, opts.sample_rate, opts.seed)?;
                validated += checked;
                let size = space_size(p, n);
                packed.par_iter().map(|k| validator.validate(unpack(k, size)).map_err(EnumError::from)).collect::<Result<Vec<_>, _>>()?
            }
        };
        if n == 2 {
            validated += non.len() as u64;
        }
        all.extend(non);
    }
    EnumerationResult::from_set(p, n, Method::Structured, all, validated)
}

/// Orchestrates the requested method; `Both` compares the two sets.
pub fn full_enum(p: u32, n: usize, method: Method, opts: &EnumOptions) -> Result<EnumerationResult, EnumError> {
    check_params(p, n)?;
    match method {
        Method::Brute => brute_force_enum(p, n),
        Method::Structured => structured(p, n, opts),
        Method::Both => {
            let brute = brute_force_enum(p, n)?;
            let mut st = structured(p, n, opts)?;
            st.comparison = Some(compare_sets(&brute.skews, &st.skews));
            st.method = Method::Both;
            st.validated = st.validated.max(brute.validated);
            Ok(st)
        }
    }
}
