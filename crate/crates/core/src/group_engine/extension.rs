//! Cyclic extensions given by an explicit action, in normal form.
//!
//! An element is written `t^i · x` with `0 ≤ i < t_ord` and `x` in the base.
//! The action is supplied in exponent notation, `β(y) = y^t = t⁻¹ y t`, and
//! `t^{t_ord} = c` for a designated base element `c` (the identity for a
//! split extension). Then
//!
//! ```text
//! (t^i x)(t^j y) = t^{i+j} · β^j(x) · y
//! ```
//!
//! with `t^{t_ord}` folded back into the base as `c`. The construction is
//! valid exactly when `β` is an automorphism of the base, `β(c) = c` and
//! `β^{t_ord}(y) = c⁻¹ y c`; all three are verified.

use std::collections::HashMap;
use std::fmt;

use super::{closure, Group, GroupError, Subgroup};

/// Largest base the normal-form multiplication table is built for.
const MAX_BASE: usize = 4096;

#[derive(Clone, Debug)]
pub struct ExtensionSpec<B: Group> {
    pub base: B,
    pub base_gens: Vec<B::Elem>,
    pub top_order: u32,
    /// `y^t` for each entry of `base_gens`, in the same order.
    pub action: Vec<B::Elem>,
    /// `t^{top_order}`; the identity for split extensions.
    pub top_power: B::Elem,
}

/// Normal form `t^top · base[base_index]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtElem {
    pub top: u32,
    pub base: u32,
}

impl fmt::Debug for ExtElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t^{}·b{}", self.top, self.base)
    }
}

#[derive(Clone, Debug)]
pub struct ExtensionGroup<B: Group> {
    base: B,
    base_gens: Vec<B::Elem>,
    elements: Vec<B::Elem>,
    index: HashMap<B::Elem, u32>,
    table: Vec<u32>,
    inverse: Vec<u32>,
    // action[j][x] = β^j(x) for 0 ≤ j < order
    action: Vec<Vec<u32>>,
    top_order: u32,
    top_power: u32,
    top_power_inv: u32,
}

pub fn build_extension<B: Group>(spec: ExtensionSpec<B>) -> Result<ExtensionGroup<B>, GroupError> {
    let ExtensionSpec { base, base_gens, top_order, action, top_power } = spec;
    if action.len() != base_gens.len() {
        return Err(GroupError::NotAutomorphism(format!(
            "{} generators but {} action images",
            base_gens.len(),
            action.len()
        )));
    }
    if top_order == 0 {
        return Err(GroupError::PowerMismatch("top order must be positive".into()));
    }
    let sub = closure(&base, &base_gens)?;
    if sub.order() > MAX_BASE {
        return Err(GroupError::CapExceeded { cap: MAX_BASE });
    }
    for (g, img) in base_gens.iter().zip(&action) {
        if !sub.contains(img) {
            return Err(GroupError::NotAutomorphism(format!("image {img:?} of {g:?} leaves the base")));
        }
    }
    if !sub.contains(&top_power) {
        return Err(GroupError::PowerMismatch(format!("{top_power:?} is not in the base")));
    }
    let elements: Vec<B::Elem> = sub.elements().to_vec();
    let size = elements.len();
    let index: HashMap<B::Elem, u32> = elements.iter().cloned().enumerate().map(|(i, e)| (e, i as u32)).collect();
    let mut table = vec![0u32; size * size];
    for (i, a) in elements.iter().enumerate() {
        for (j, b) in elements.iter().enumerate() {
            table[i * size + j] = index[&base.mul(a, b)];
        }
    }
    let id = index[&base.identity()];
    let inverse: Vec<u32> = elements.iter().map(|a| index[&base.inv(a)]).collect();
    let gen_idx: Vec<u32> = base_gens.iter().map(|g| index[g]).collect();
    let act_idx: Vec<u32> = action.iter().map(|g| index[g]).collect();

    // Extend β from the generators along the Cayley graph, checking every edge.
    let mut beta: Vec<Option<u32>> = vec![None; size];
    beta[id as usize] = Some(id);
    let mut queue = vec![id];
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head];
        head += 1;
        let bx = beta[x as usize].unwrap();
        for (&s, &bs) in gen_idx.iter().zip(&act_idx) {
            let y = table[x as usize * size + s as usize];
            let val = table[bx as usize * size + bs as usize];
            match beta[y as usize] {
                None => {
                    beta[y as usize] = Some(val);
                    queue.push(y);
                }
                Some(prev) if prev != val => {
                    return Err(GroupError::NotAutomorphism(format!(
                        "relations violated at {:?}",
                        elements[y as usize]
                    )));
                }
                Some(_) => {}
            }
        }
    }
    let beta: Vec<u32> = beta.into_iter().map(|b| b.expect("generators reach every element")).collect();
    let mut hit = vec![false; size];
    for &b in &beta {
        if std::mem::replace(&mut hit[b as usize], true) {
            return Err(GroupError::NotAutomorphism("action is not injective".into()));
        }
    }

    let c = index[&top_power];
    if beta[c as usize] != c {
        return Err(GroupError::PowerMismatch("the action moves t^order".into()));
    }
    let mut powers = vec![(0..size as u32).collect::<Vec<u32>>()];
    for j in 1..=top_order as usize {
        let prev = &powers[j - 1];
        let next: Vec<u32> = prev.iter().map(|&x| beta[x as usize]).collect();
        powers.push(next);
    }
    let last = powers.pop().unwrap();
    let c_inv = inverse[c as usize];
    for x in 0..size {
        let conj = table[table[c_inv as usize * size + x] as usize * size + c as usize];
        if last[x] != conj {
            return Err(GroupError::PowerMismatch(format!(
                "β^{top_order} differs from conjugation by {:?} at {:?}",
                elements[c as usize], elements[x]
            )));
        }
    }

    Ok(ExtensionGroup {
        base,
        base_gens,
        elements,
        index,
        table,
        inverse,
        action: powers,
        top_order,
        top_power: c,
        top_power_inv: c_inv,
    })
}

impl<B: Group> ExtensionGroup<B> {
    #[inline]
    fn bmul(&self, a: u32, b: u32) -> u32 {
        self.table[a as usize * self.elements.len() + b as usize]
    }

    pub fn order(&self) -> usize {
        self.elements.len() * self.top_order as usize
    }

    pub fn base_order(&self) -> usize {
        self.elements.len()
    }

    pub fn top_order(&self) -> u32 {
        self.top_order
    }

    pub fn base_group(&self) -> &B {
        &self.base
    }

    /// The generator `t`.
    pub fn top(&self) -> ExtElem {
        ExtElem { top: 1, base: self.index[&self.base.identity()] }
    }

    pub fn embed(&self, b: &B::Elem) -> Option<ExtElem> {
        self.index.get(b).map(|&i| ExtElem { top: 0, base: i })
    }

    pub fn base_element(&self, e: &ExtElem) -> &B::Elem {
        &self.elements[e.base as usize]
    }

    /// Base generators followed by `t`.
    pub fn generators(&self) -> Vec<ExtElem> {
        let mut gens: Vec<ExtElem> = self.base_gens.iter().map(|g| self.embed(g).unwrap()).collect();
        gens.push(self.top());
        gens
    }

    pub fn whole(&self) -> Result<Subgroup<ExtElem>, GroupError> {
        closure(self, &self.generators())
    }
}

impl<B: Group> Group for ExtensionGroup<B> {
    type Elem = ExtElem;

    fn identity(&self) -> ExtElem {
        ExtElem { top: 0, base: self.index[&self.base.identity()] }
    }

    fn mul(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        let moved = self.action[b.top as usize][a.base as usize];
        let mut base = self.bmul(moved, b.base);
        let mut top = a.top + b.top;
        if top >= self.top_order {
            top -= self.top_order;
            base = self.bmul(self.top_power, base);
        }
        ExtElem { top, base }
    }

    fn inv(&self, a: &ExtElem) -> ExtElem {
        let xinv = self.inverse[a.base as usize];
        if a.top == 0 {
            return ExtElem { top: 0, base: xinv };
        }
        let top = self.top_order - a.top;
        let moved = self.action[top as usize][xinv as usize];
        ExtElem { top, base: self.bmul(moved, self.top_power_inv) }
    }

    fn is_member(&self, a: &ExtElem) -> bool {
        a.top < self.top_order && (a.base as usize) < self.elements.len()
    }
}
