//! Machinery for concrete small finite groups.
//!
//! A carrier implements [`Group`]: a multiplication oracle over some element
//! type. Subgroups are materialized as element sets ([`Subgroup`]) and every
//! subgroup algorithm here works by direct computation over those sets. All
//! groups in this crate have at most a few thousand elements.

mod carriers;
mod commutator;
mod extension;

pub use carriers::{AffineGroup, CyclicGroup, Perm, PermGroup, VectorGroup};
pub use commutator::{iterated_commutator, ij_commutator, MetabelianChecker};
pub use extension::{build_extension, ExtElem, ExtensionGroup, ExtensionSpec};

use std::collections::{HashMap, HashSet};
use std::fmt::Debug;
use std::hash::Hash;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Default cap on the size of any materialized subgroup.
pub const DEFAULT_CAP: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("element does not belong to the carrier: {0}")]
    CarrierMismatch(String),
    #[error("subgroup closure exceeded the cap of {cap} elements")]
    CapExceeded { cap: usize },
    #[error("{what} is not contained in the ambient group")]
    NotContained { what: &'static str },
    #[error("group of order {order} is not a p-group")]
    NotPGroup { order: usize },
    #[error("group is not metabelian: its derived subgroup is nonabelian")]
    NotMetabelian,
    #[error("action does not extend to an automorphism: {0}")]
    NotAutomorphism(String),
    #[error("power of the action does not match the designated element: {0}")]
    PowerMismatch(String),
    #[error("group law self-test failed: {0}")]
    GroupLaw(String),
}

pub trait Group {
    type Elem: Clone + Eq + Hash + Ord + Debug;

    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;

    /// Whether `a` is a well-formed element of this carrier.
    fn is_member(&self, _a: &Self::Elem) -> bool {
        true
    }

    fn pow(&self, a: &Self::Elem, e: u64) -> Self::Elem {
        let mut acc = self.identity();
        let mut base = a.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// `g⁻¹ a g`.
    fn conj(&self, a: &Self::Elem, g: &Self::Elem) -> Self::Elem {
        self.mul(&self.mul(&self.inv(g), a), g)
    }

    /// `[a, b] = a⁻¹ b⁻¹ a b`.
    fn commutator(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let ab = self.mul(a, b);
        let ba = self.mul(b, a);
        self.mul(&self.inv(&ba), &ab)
    }

    fn element_order(&self, a: &Self::Elem) -> u64 {
        let id = self.identity();
        let mut acc = a.clone();
        let mut t = 1;
        while acc != id {
            acc = self.mul(&acc, a);
            t += 1;
        }
        t
    }
}

/// A materialized subgroup: generators plus every element, in BFS order.
#[derive(Clone, Debug)]
pub struct Subgroup<E: Clone + Eq + Hash> {
    gens: Vec<E>,
    elements: Vec<E>,
    index: HashSet<E>,
}

impl<E: Clone + Eq + Hash + Ord + Debug> Subgroup<E> {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn gens(&self) -> &[E] {
        &self.gens
    }

    pub fn elements(&self) -> &[E] {
        &self.elements
    }

    pub fn contains(&self, e: &E) -> bool {
        self.index.contains(e)
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn is_subset_of(&self, other: &Subgroup<E>) -> bool {
        self.elements.len() <= other.elements.len() && self.gens.iter().all(|g| other.contains(g))
    }

    pub fn same_elements(&self, other: &Subgroup<E>) -> bool {
        self.order() == other.order() && self.is_subset_of(other)
    }

    /// Sorted element list, usable as a canonical key.
    pub fn sorted_elements(&self) -> Vec<E> {
        let mut v = self.elements.clone();
        v.sort();
        v
    }
}

/// Smallest subgroup containing `gens`.
pub fn closure<G: Group>(group: &G, gens: &[G::Elem]) -> Result<Subgroup<G::Elem>, GroupError> {
    closure_capped(group, gens, DEFAULT_CAP)
}

pub fn closure_capped<G: Group>(
    group: &G,
    gens: &[G::Elem],
    cap: usize,
) -> Result<Subgroup<G::Elem>, GroupError> {
    for g in gens {
        if !group.is_member(g) {
            return Err(GroupError::CarrierMismatch(format!("{g:?}")));
        }
    }
    let id = group.identity();
    let gens: Vec<G::Elem> = gens.iter().filter(|g| **g != id).cloned().collect();
    let mut elements = vec![id.clone()];
    let mut index = HashSet::from([id]);
    let mut head = 0;
    while head < elements.len() {
        let x = elements[head].clone();
        head += 1;
        for s in &gens {
            let y = group.mul(&x, s);
            if index.insert(y.clone()) {
                elements.push(y);
                if elements.len() > cap {
                    return Err(GroupError::CapExceeded { cap });
                }
            }
        }
    }
    Ok(Subgroup { gens, elements, index })
}

/// Subgroup from an element set already known to be closed; picks a small
/// generating set greedily.
pub fn subgroup_from_elements<G: Group>(group: &G, elems: &[G::Elem]) -> Subgroup<G::Elem> {
    let mut sorted: Vec<G::Elem> = elems.to_vec();
    sorted.sort();
    let mut gens: Vec<G::Elem> = Vec::new();
    let mut current = closure(group, &[]).expect("trivial closure");
    for e in &sorted {
        if current.order() == elems.len() {
            break;
        }
        if !current.contains(e) {
            gens.push(e.clone());
            current = closure(group, &gens).expect("closure of closed set stays inside it");
        }
    }
    debug_assert_eq!(current.order(), elems.len(), "element set was not a subgroup");
    current
}

fn require_subset<E: Clone + Eq + Hash + Ord + Debug>(
    h: &Subgroup<E>,
    x: &Subgroup<E>,
    what: &'static str,
) -> Result<(), GroupError> {
    if h.is_subset_of(x) {
        Ok(())
    } else {
        Err(GroupError::NotContained { what })
    }
}

/// `H ⊴ X`, checked on generators: `x⁻¹ h x ∈ H` for generators `x`, `h`.
pub fn is_normal<G: Group>(group: &G, h: &Subgroup<G::Elem>, x: &Subgroup<G::Elem>) -> Result<bool, GroupError> {
    require_subset(h, x, "H")?;
    Ok(normalized_by(group, h, x.gens()))
}

fn normalized_by<G: Group>(group: &G, h: &Subgroup<G::Elem>, by: &[G::Elem]) -> bool {
    by.iter().all(|g| h.gens().iter().all(|a| h.contains(&group.conj(a, g))))
}

pub fn intersection<G: Group>(group: &G, a: &Subgroup<G::Elem>, b: &Subgroup<G::Elem>) -> Subgroup<G::Elem> {
    let common: Vec<G::Elem> = a.elements().iter().filter(|e| b.contains(e)).cloned().collect();
    subgroup_from_elements(group, &common)
}

/// Largest normal subgroup of `X` contained in `H`.
pub fn core<G: Group>(group: &G, h: &Subgroup<G::Elem>, x: &Subgroup<G::Elem>) -> Result<Subgroup<G::Elem>, GroupError> {
    require_subset(h, x, "H")?;
    let mut current: Vec<G::Elem> = h.elements().to_vec();
    let inverses: Vec<G::Elem> = x.gens().iter().map(|g| group.inv(g)).collect();
    loop {
        let set: HashSet<&G::Elem> = current.iter().collect();
        let next: Vec<G::Elem> = current
            .iter()
            .filter(|a| {
                x.gens().iter().zip(&inverses).all(|(g, gi)| {
                    set.contains(&group.conj(a, g)) && set.contains(&group.conj(a, gi))
                })
            })
            .cloned()
            .collect();
        if next.len() == current.len() {
            break;
        }
        current = next;
    }
    Ok(subgroup_from_elements(group, &current))
}

/// Smallest normal subgroup of `X` containing `s`.
pub fn normal_closure<G: Group>(
    group: &G,
    s: &[G::Elem],
    x: &Subgroup<G::Elem>,
) -> Result<Subgroup<G::Elem>, GroupError> {
    let mut gens: Vec<G::Elem> = s.to_vec();
    loop {
        let n = closure(group, &gens)?;
        let mut extra = Vec::new();
        for g in x.gens() {
            for a in n.gens() {
                let c = group.conj(a, g);
                if !n.contains(&c) && !extra.contains(&c) {
                    extra.push(c);
                }
            }
        }
        if extra.is_empty() {
            return Ok(n);
        }
        gens = n.gens().to_vec();
        gens.extend(extra);
    }
}

pub fn center<G: Group>(group: &G, x: &Subgroup<G::Elem>) -> Subgroup<G::Elem> {
    centralizer_of_elems(group, x, x.gens())
}

fn centralizer_of_elems<G: Group>(group: &G, x: &Subgroup<G::Elem>, s: &[G::Elem]) -> Subgroup<G::Elem> {
    let elems: Vec<G::Elem> = x
        .elements()
        .iter()
        .filter(|a| s.iter().all(|b| group.mul(a, b) == group.mul(b, a)))
        .cloned()
        .collect();
    subgroup_from_elements(group, &elems)
}

/// `C_X(S)`: elements of `X` commuting with every element of `S`.
pub fn centralizer<G: Group>(
    group: &G,
    x: &Subgroup<G::Elem>,
    s: &Subgroup<G::Elem>,
) -> Subgroup<G::Elem> {
    centralizer_of_elems(group, x, s.gens())
}

/// `N_X(H)`.
pub fn normalizer<G: Group>(
    group: &G,
    x: &Subgroup<G::Elem>,
    h: &Subgroup<G::Elem>,
) -> Result<Subgroup<G::Elem>, GroupError> {
    require_subset(h, x, "H")?;
    let elems: Vec<G::Elem> = x
        .elements()
        .iter()
        .filter(|g| h.gens().iter().all(|a| h.contains(&group.conj(a, g))))
        .cloned()
        .collect();
    Ok(subgroup_from_elements(group, &elems))
}

/// `X'`, as the normal closure of commutators of generators.
pub fn derived_subgroup<G: Group>(group: &G, x: &Subgroup<G::Elem>) -> Result<Subgroup<G::Elem>, GroupError> {
    let mut comms = Vec::new();
    for (i, a) in x.gens().iter().enumerate() {
        for b in &x.gens()[i + 1..] {
            comms.push(group.commutator(a, b));
        }
    }
    normal_closure(group, &comms, x)
}

pub fn is_abelian<G: Group>(group: &G, h: &Subgroup<G::Elem>) -> bool {
    let g = h.gens();
    g.iter().enumerate().all(|(i, a)| g[i + 1..].iter().all(|b| group.mul(a, b) == group.mul(b, a)))
}

/// Exhaustive pairwise commutation check, independent of the generators.
pub fn is_abelian_pairwise<G: Group>(group: &G, h: &Subgroup<G::Elem>) -> bool {
    let e = h.elements();
    e.iter().enumerate().all(|(i, a)| e[i + 1..].iter().all(|b| group.mul(a, b) == group.mul(b, a)))
}

/// `Some((p, e))` when `n = p^e` with `e ≥ 1`.
pub fn prime_power(n: usize) -> Option<(u32, u32)> {
    if n < 2 {
        return None;
    }
    let p = (2..=n).find(|d| n.is_multiple_of(*d))?;
    let mut m = n;
    let mut e = 0;
    while m.is_multiple_of(p) {
        m /= p;
        e += 1;
    }
    (m == 1).then_some((p as u32, e))
}

/// Rank of `H` when it is elementary abelian of exponent `p`.
pub fn elementary_abelian_rank<G: Group>(group: &G, h: &Subgroup<G::Elem>, p: u32) -> Option<u32> {
    if h.is_trivial() {
        return Some(0);
    }
    let (q, e) = prime_power(h.order())?;
    if q != p || !is_abelian(group, h) {
        return None;
    }
    let id = group.identity();
    h.gens().iter().all(|g| group.pow(g, p as u64) == id).then_some(e)
}

fn pgroup_prime<E: Clone + Eq + Hash + Ord + Debug>(p: &Subgroup<E>) -> Result<Option<u32>, GroupError> {
    if p.is_trivial() {
        return Ok(None);
    }
    prime_power(p.order()).map(|(q, _)| Some(q)).ok_or(GroupError::NotPGroup { order: p.order() })
}

/// `Ω₁(P)`: generated by the elements of order dividing `p`.
pub fn omega1_pgroup<G: Group>(group: &G, pg: &Subgroup<G::Elem>) -> Result<Subgroup<G::Elem>, GroupError> {
    let Some(p) = pgroup_prime(pg)? else {
        return Ok(pg.clone());
    };
    let id = group.identity();
    let gens: Vec<G::Elem> = pg.elements().iter().filter(|g| group.pow(g, p as u64) == id).cloned().collect();
    let full = closure(group, &gens)?;
    Ok(subgroup_from_elements(group, full.elements()))
}

/// `Φ(P) = P'·P^p` for a p-group.
pub fn frattini_pgroup<G: Group>(group: &G, pg: &Subgroup<G::Elem>) -> Result<Subgroup<G::Elem>, GroupError> {
    let Some(p) = pgroup_prime(pg)? else {
        return Ok(pg.clone());
    };
    let derived = derived_subgroup(group, pg)?;
    let mut gens: Vec<G::Elem> = derived.gens().to_vec();
    let powers: HashSet<G::Elem> = pg.elements().iter().map(|g| group.pow(g, p as u64)).collect();
    gens.extend(powers);
    let full = closure(group, &gens)?;
    Ok(subgroup_from_elements(group, full.elements()))
}

/// Orbits of `X` acting by conjugation on the elements satisfying `keep`.
pub fn conjugacy_classes<G: Group>(
    group: &G,
    x: &Subgroup<G::Elem>,
    keep: impl Fn(&G::Elem) -> bool,
) -> Vec<Vec<G::Elem>> {
    let mut seen: HashSet<G::Elem> = HashSet::new();
    let mut classes = Vec::new();
    for e in x.elements() {
        if seen.contains(e) || !keep(e) {
            continue;
        }
        let mut class = vec![e.clone()];
        seen.insert(e.clone());
        let mut head = 0;
        while head < class.len() {
            let a = class[head].clone();
            head += 1;
            for g in x.gens() {
                let c = group.conj(&a, g);
                if seen.insert(c.clone()) {
                    class.push(c);
                }
            }
        }
        class.sort();
        classes.push(class);
    }
    classes
}

/// Every normal subgroup of `X` that is elementary abelian of rank `rank`.
///
/// Such a subgroup is a union of conjugacy classes of elements of order
/// `p`, so the search grows normal elementary abelian subgroups one class
/// at a time, starting from the trivial group.
pub fn normal_elem_abelian_subgroups<G: Group>(
    group: &G,
    x: &Subgroup<G::Elem>,
    p: u32,
    rank: u32,
) -> Result<Vec<Subgroup<G::Elem>>, GroupError> {
    let id = group.identity();
    let classes = conjugacy_classes(group, x, |e| *e != id && group.pow(e, p as u64) == id);
    let target = (p as usize).pow(rank);
    let trivial = closure(group, &[])?;
    let mut seen: HashSet<Vec<G::Elem>> = HashSet::from([trivial.sorted_elements()]);
    let mut frontier = vec![trivial];
    let mut found = Vec::new();
    if rank == 0 {
        return Ok(frontier);
    }
    while let Some(n) = frontier.pop() {
        for class in &classes {
            if n.contains(&class[0]) {
                continue;
            }
            // Everything must commute with N and within the class.
            let commutes = class.iter().all(|c| {
                n.gens().iter().all(|g| group.mul(c, g) == group.mul(g, c))
                    && class.iter().all(|d| group.mul(c, d) == group.mul(d, c))
            });
            if !commutes {
                continue;
            }
            let mut gens = n.gens().to_vec();
            gens.extend(class.iter().cloned());
            let bigger = match closure_capped(group, &gens, target) {
                Ok(b) => b,
                Err(GroupError::CapExceeded { .. }) => continue,
                Err(e) => return Err(e),
            };
            let bigger = subgroup_from_elements(group, bigger.elements());
            if !seen.insert(bigger.sorted_elements()) {
                continue;
            }
            if bigger.order() == target {
                found.push(bigger);
            } else {
                frontier.push(bigger);
            }
        }
    }
    found.sort_by_key(|s| s.sorted_elements());
    Ok(found)
}

/// A complement `K` of `N` in `X` (`K ∩ N = 1`, `|K||N| = |X|`), if one exists.
///
/// Picks lifts `x_1, …, x_d` of a generating set of `X/N`; any complement
/// contains unique elements `x_i n_i`, so searching all tuples in `N^d` is
/// exhaustive.
pub fn find_complement<G: Group>(
    group: &G,
    x: &Subgroup<G::Elem>,
    n: &Subgroup<G::Elem>,
) -> Result<Option<Subgroup<G::Elem>>, GroupError> {
    require_subset(n, x, "N")?;
    if x.order() % n.order() != 0 {
        return Err(GroupError::NotContained { what: "N" });
    }
    let quotient = x.order() / n.order();
    if quotient == 1 {
        return Ok(Some(closure(group, &[])?));
    }
    // Greedy lifts of generators of X/N.
    let mut lifts: Vec<G::Elem> = Vec::new();
    let mut span = n.clone();
    for cand in x.gens().iter().chain(x.elements()) {
        if span.order() == x.order() {
            break;
        }
        if !span.contains(cand) {
            lifts.push(cand.clone());
            let mut gens = n.gens().to_vec();
            gens.extend(lifts.iter().cloned());
            span = closure(group, &gens)?;
        }
    }
    let d = lifts.len();
    let ne = n.elements();
    let total = ne.len().checked_pow(d as u32).ok_or(GroupError::CapExceeded { cap: usize::MAX })?;
    if total > 50_000_000 {
        return Err(GroupError::CapExceeded { cap: 50_000_000 });
    }
    for mut code in 0..total {
        let mut gens = Vec::with_capacity(d);
        for l in &lifts {
            gens.push(group.mul(l, &ne[code % ne.len()]));
            code /= ne.len();
        }
        let k = match closure_capped(group, &gens, quotient) {
            Ok(k) => k,
            Err(GroupError::CapExceeded { .. }) => continue,
            Err(e) => return Err(e),
        };
        if k.order() == quotient && k.elements().iter().filter(|e| n.contains(e)).count() == 1 {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

pub fn has_complement<G: Group>(
    group: &G,
    x: &Subgroup<G::Elem>,
    n: &Subgroup<G::Elem>,
) -> Result<bool, GroupError> {
    Ok(find_complement(group, x, n)?.is_some())
}

/// Group-law self-test on the elements of `X`: every triple when
/// `|X| ≤ 200`, otherwise `samples` seeded random triples. Also checks the
/// identity and inverses on every element.
pub fn check_group_law<G: Group>(
    group: &G,
    x: &Subgroup<G::Elem>,
    samples: usize,
    seed: u64,
) -> Result<(), GroupError> {
    let id = group.identity();
    let e = x.elements();
    for a in e {
        if group.mul(a, &id) != *a || group.mul(&id, a) != *a {
            return Err(GroupError::GroupLaw(format!("identity not neutral on {a:?}")));
        }
        if group.mul(a, &group.inv(a)) != id {
            return Err(GroupError::GroupLaw(format!("bad inverse of {a:?}")));
        }
    }
    let assoc = |a: &G::Elem, b: &G::Elem, c: &G::Elem| -> Result<(), GroupError> {
        let l = group.mul(&group.mul(a, b), c);
        let r = group.mul(a, &group.mul(b, c));
        if l != r {
            return Err(GroupError::GroupLaw(format!("associativity fails on ({a:?}, {b:?}, {c:?})")));
        }
        if !x.contains(&l) {
            return Err(GroupError::GroupLaw(format!("product of {a:?}, {b:?}, {c:?} leaves the group")));
        }
        Ok(())
    };
    if e.len() <= 200 {
        // Cayley table on indices, which also checks closure.
        let index = index_map(x);
        let size = e.len();
        let mut table = vec![0usize; size * size];
        for (i, a) in e.iter().enumerate() {
            for (j, b) in e.iter().enumerate() {
                let ab = group.mul(a, b);
                table[i * size + j] = *index
                    .get(&ab)
                    .ok_or_else(|| GroupError::GroupLaw(format!("product of {a:?}, {b:?} leaves the group")))?;
            }
        }
        for i in 0..size {
            for j in 0..size {
                let ij = table[i * size + j];
                for k in 0..size {
                    if table[ij * size + k] != table[i * size + table[j * size + k]] {
                        return Err(GroupError::GroupLaw(format!(
                            "associativity fails on ({:?}, {:?}, {:?})",
                            e[i], e[j], e[k]
                        )));
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let a = &e[rng.gen_range(0..e.len())];
            let b = &e[rng.gen_range(0..e.len())];
            let c = &e[rng.gen_range(0..e.len())];
            assoc(a, b, c)?;
        }
    }
    Ok(())
}

/// `|A B| = |A||B| / |A ∩ B|`.
pub fn product_size<G: Group>(group: &G, a: &Subgroup<G::Elem>, b: &Subgroup<G::Elem>) -> usize {
    a.order() * b.order() / intersection(group, a, b).order()
}

/// Index of every element of `X`, for table-driven algorithms.
pub fn index_map<E: Clone + Eq + Hash + Ord + Debug>(x: &Subgroup<E>) -> HashMap<E, usize> {
    x.elements().iter().cloned().enumerate().map(|(i, e)| (e, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpalg::{AffineMap, FpVector};

    fn sym3() -> (PermGroup, Subgroup<Perm>) {
        let g = PermGroup::new(3);
        let x = closure(&g, &[Perm::from_images(vec![1, 2, 0]), Perm::from_images(vec![1, 0, 2])]).unwrap();
        (g, x)
    }

    #[test]
    fn closures() {
        let (g, x) = sym3();
        assert_eq!(x.order(), 6);
        let c3 = closure(&g, &[Perm::from_images(vec![1, 2, 0])]).unwrap();
        assert_eq!(c3.order(), 3);
        assert_eq!(closure(&g, &[]).unwrap().order(), 1);
        assert!(matches!(closure(&g, &[Perm::from_images(vec![1, 0])]), Err(GroupError::CarrierMismatch(_))));
        assert!(matches!(closure_capped(&g, x.gens(), 4), Err(GroupError::CapExceeded { cap: 4 })));
    }

    #[test]
    fn affine_closure_with_g1() {
        let (g1, _) = crate::fpalg::unipotent_class_reps(3).unwrap();
        let agl = AffineGroup::new(3, 3);
        let mut gens = vec![AffineMap::linear_map(g1).unwrap()];
        for i in 0..3 {
            gens.push(AffineMap::translation(FpVector::unit(3, 3, i)));
        }
        assert_eq!(closure(&agl, &gens).unwrap().order(), 81);
    }

    #[test]
    fn normality_and_core() {
        let (g, x) = sym3();
        let a3 = closure(&g, &[Perm::from_images(vec![1, 2, 0])]).unwrap();
        let c2 = closure(&g, &[Perm::from_images(vec![1, 0, 2])]).unwrap();
        assert!(is_normal(&g, &a3, &x).unwrap());
        assert!(!is_normal(&g, &c2, &x).unwrap());
        assert!(core(&g, &a3, &x).unwrap().same_elements(&a3));
        assert!(core(&g, &c2, &x).unwrap().is_trivial());
        assert!(matches!(is_normal(&g, &x, &c2), Err(GroupError::NotContained { .. })));
    }

    #[test]
    fn characteristic_subgroups() {
        let (g, x) = sym3();
        assert!(center(&g, &x).is_trivial());
        assert_eq!(derived_subgroup(&g, &x).unwrap().order(), 3);
        let c3 = closure(&g, &[Perm::from_images(vec![1, 2, 0])]).unwrap();
        assert_eq!(centralizer(&g, &x, &c3).order(), 3);
        let c2 = closure(&g, &[Perm::from_images(vec![1, 0, 2])]).unwrap();
        assert_eq!(normalizer(&g, &x, &c2).unwrap().order(), 2);
        let v = VectorGroup::new(3, 2);
        let gv = closure(&v, &[FpVector::unit(3, 2, 0), FpVector::unit(3, 2, 1)]).unwrap();
        assert_eq!(center(&v, &gv).order(), 9);
        assert_eq!(omega1_pgroup(&v, &gv).unwrap().order(), 9);
        assert!(frattini_pgroup(&v, &gv).unwrap().is_trivial());
        assert!(matches!(omega1_pgroup(&g, &x), Err(GroupError::NotPGroup { order: 6 })));
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(729), Some((3, 6)));
        assert_eq!(prime_power(54), None);
        assert_eq!(prime_power(2), Some((2, 1)));
        assert_eq!(prime_power(1), None);
    }

    #[test]
    fn complements_in_s3() {
        let (g, x) = sym3();
        let a3 = closure(&g, &[Perm::from_images(vec![1, 2, 0])]).unwrap();
        assert!(has_complement(&g, &x, &a3).unwrap());
        let normals = normal_elem_abelian_subgroups(&g, &x, 3, 1).unwrap();
        assert_eq!(normals.len(), 1);
        assert!(normals[0].same_elements(&a3));
        assert!(normal_elem_abelian_subgroups(&g, &x, 2, 1).unwrap().is_empty());
    }

    #[test]
    fn no_complement_in_cyclic() {
        let c = CyclicGroup::new(9);
        let x = closure(&c, &[1]).unwrap();
        let n = closure(&c, &[3]).unwrap();
        assert!(!has_complement(&c, &x, &n).unwrap());
    }

    #[test]
    fn group_law_small_and_sampled() {
        let (g, x) = sym3();
        check_group_law(&g, &x, 0, 1).unwrap();
        let agl = AffineGroup::new(3, 2);
        let gens: Vec<AffineMap> = crate::fpalg::gl_generators(3, 2)
            .into_iter()
            .map(|m| AffineMap::linear_map(m).unwrap())
            .chain([AffineMap::translation(FpVector::unit(3, 2, 0))])
            .collect();
        let x = closure(&agl, &gens).unwrap();
        assert_eq!(x.order(), 432);
        check_group_law(&agl, &x, 2000, 7).unwrap();
    }
}
