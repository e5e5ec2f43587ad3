//! Iterated commutators and the metabelian power identity
//!
//! ```text
//! (a b⁻¹)^n = a^n · Π_{i+j ≤ n} [ia, jb]^{C(n, i+j)} · b^{-n}
//! ```
//!
//! where `[ia, jb] = [a, b, a, …, a, b, …, b]` with `i − 1` trailing `a`s
//! and `j − 1` trailing `b`s, left-normed.

use super::{derived_subgroup, is_abelian, Group, GroupError, Subgroup};

/// `[x1, …, xk]`, left-normed; `[x1] = x1`.
pub fn iterated_commutator<G: Group>(group: &G, word: &[G::Elem]) -> G::Elem {
    let mut iter = word.iter();
    let Some(first) = iter.next() else {
        return group.identity();
    };
    iter.fold(first.clone(), |acc, x| group.commutator(&acc, x))
}

/// `[ia, jb]` for `i, j ≥ 1`.
pub fn ij_commutator<G: Group>(group: &G, a: &G::Elem, b: &G::Elem, i: u32, j: u32) -> G::Elem {
    assert!(i >= 1 && j >= 1, "[ia, jb] needs i, j ≥ 1");
    let mut word = vec![a.clone(), b.clone()];
    word.extend(std::iter::repeat_n(a.clone(), (i - 1) as usize));
    word.extend(std::iter::repeat_n(b.clone(), (j - 1) as usize));
    iterated_commutator(group, &word)
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Checks the power identity inside a group verified to be metabelian.
pub struct MetabelianChecker<'a, G: Group> {
    group: &'a G,
}

impl<'a, G: Group> MetabelianChecker<'a, G> {
    pub const MAX_N: u32 = 60;

    pub fn new(group: &'a G, x: &Subgroup<G::Elem>) -> Result<Self, GroupError> {
        let derived = derived_subgroup(group, x)?;
        if !is_abelian(group, &derived) {
            return Err(GroupError::NotMetabelian);
        }
        Ok(MetabelianChecker { group })
    }

    pub fn check(&self, a: &G::Elem, b: &G::Elem, n: u32) -> bool {
        assert!((1..=Self::MAX_N).contains(&n), "n out of range");
        let g = self.group;
        let binv = g.inv(b);
        let lhs = g.pow(&g.mul(a, &binv), n as u64);
        let mut rhs = g.pow(a, n as u64);
        for i in 1..n {
            for j in 1..=(n - i) {
                let c = ij_commutator(g, a, b, i, j);
                let e = binomial(n as u64, (i + j) as u64);
                rhs = g.mul(&rhs, &g.pow(&c, e));
            }
        }
        rhs = g.mul(&rhs, &g.pow(&binv, n as u64));
        lhs == rhs
    }
}
