//! Reference computations written directly from the definitions, sharing no
//! code with the library beyond the index encoding of `F_p^n`.

#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

pub type Perm = Vec<u32>;

pub fn coords(i: u32, p: u32, n: usize) -> Vec<u32> {
    let mut c = vec![0; n];
    let mut r = i;
    for slot in c.iter_mut().rev() {
        *slot = r % p;
        r /= p;
    }
    c
}

pub fn index(c: &[u32], p: u32) -> u32 {
    c.iter().fold(0, |acc, &x| acc * p + x)
}

pub fn size(p: u32, n: usize) -> usize {
    (p as usize).pow(n as u32)
}

/// A matrix acting on row vectors, `v ↦ vM`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat {
    pub p: u32,
    pub n: usize,
    pub e: Vec<u32>,
}

impl Mat {
    pub fn row_mul(&self, v: &[u32]) -> Vec<u32> {
        (0..self.n).map(|j| (0..self.n).map(|i| v[i] * self.e[i * self.n + j]).sum::<u32>() % self.p).collect()
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        let n = self.n;
        let mut e = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                e[i * n + j] = (0..n).map(|k| self.e[i * n + k] * o.e[k * n + j]).sum::<u32>() % self.p;
            }
        }
        Mat { p: self.p, n, e }
    }

    pub fn is_identity(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.e[i * self.n + j] == (i == j) as u32))
    }

    pub fn pow(&self, k: u64) -> Mat {
        let mut r = Mat { p: self.p, n: self.n, e: (0..self.n * self.n).map(|i| (i % (self.n + 1) == 0) as u32).collect() };
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    /// Permutation of point indices.
    pub fn perm(&self) -> Perm {
        (0..size(self.p, self.n) as u32).map(|i| index(&self.row_mul(&coords(i, self.p, self.n)), self.p)).collect()
    }
}

/// All matrices with nonzero determinant, by Gaussian elimination.
pub fn gl(p: u32, n: usize) -> Vec<Mat> {
    let total = (p as u64).pow((n * n) as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut e = vec![0u32; n * n];
        let mut r = code;
        for slot in e.iter_mut() {
            *slot = (r % p as u64) as u32;
            r /= p as u64;
        }
        if rank(p, n, &e) == n {
            out.push(Mat { p, n, e });
        }
    }
    out
}

fn rank(p: u32, n: usize, e: &[u32]) -> usize {
    let mut a = e.to_vec();
    let mut rk = 0;
    for col in 0..n {
        let Some(piv) = (rk..n).find(|&r| a[r * n + col] != 0) else { continue };
        for j in 0..n {
            a.swap(rk * n + j, piv * n + j);
        }
        let inv = (1..p).find(|&x| x * a[rk * n + col] % p == 1).unwrap();
        for r in 0..n {
            if r != rk && a[r * n + col] != 0 {
                let f = a[r * n + col] * inv % p;
                for j in 0..n {
                    a[r * n + j] = (a[r * n + j] + p * p - f * a[rk * n + j] % p) % p;
                }
            }
        }
        rk += 1;
    }
    rk
}

pub fn compose(a: &[u32], b: &[u32]) -> Perm {
    // first b, then a
    b.iter().map(|&x| a[x as usize]).collect()
}

pub fn inverse(a: &[u32]) -> Perm {
    let mut inv = vec![0; a.len()];
    for (i, &x) in a.iter().enumerate() {
        inv[x as usize] = i as u32;
    }
    inv
}

pub fn is_id(a: &[u32]) -> bool {
    a.iter().enumerate().all(|(i, &x)| i as u32 == x)
}

pub fn powers(a: &[u32]) -> Vec<Perm> {
    let mut out = vec![(0..a.len() as u32).collect::<Perm>()];
    loop {
        let next = compose(a, out.last().unwrap());
        if is_id(&next) {
            return out;
        }
        out.push(next);
    }
}

/// Checks `σ(x + y) = σ(x) + σ^j(y)` for some `j` at every `x`; returns the
/// power function and the order.
pub fn naive_skew(p: u32, n: usize, sigma: &[u32]) -> Option<(Vec<u32>, u32)> {
    let nn = size(p, n);
    if sigma.len() != nn || sigma[0] != 0 {
        return None;
    }
    let mut seen = vec![false; nn];
    for &s in sigma {
        if s as usize >= nn || std::mem::replace(&mut seen[s as usize], true) {
            return None;
        }
    }
    let vec: Vec<Vec<u32>> = (0..nn as u32).map(|i| coords(i, p, n)).collect();
    let add = |a: u32, b: u32| index(&vec[a as usize].iter().zip(&vec[b as usize]).map(|(x, y)| (x + y) % p).collect::<Vec<_>>(), p);
    let sub = |a: u32, b: u32| index(&vec[a as usize].iter().zip(&vec[b as usize]).map(|(x, y)| (x + p - y) % p).collect::<Vec<_>>(), p);
    let pows = powers(sigma);
    let mut pi = Vec::with_capacity(nn);
    for x in 0..nn as u32 {
        let f: Perm = (0..nn as u32).map(|y| sub(sigma[add(x, y) as usize], sigma[x as usize])).collect();
        pi.push(pows.iter().position(|q| *q == f)? as u32);
    }
    Some((pi, pows.len() as u32))
}

/// `x ↦ xM + s` as a permutation of point indices.
fn affine_perm(m: &Mat, s: &[u32]) -> Perm {
    let (p, n) = (m.p, m.n);
    (0..size(p, n) as u32)
        .map(|i| {
            let v = m.row_mul(&coords(i, p, n));
            index(&v.iter().zip(s).map(|(a, b)| (a + b) % p).collect::<Vec<_>>(), p)
        })
        .collect()
}

fn span(gens: &[Perm], nn: usize) -> Vec<Perm> {
    let mut els: Vec<Perm> = vec![(0..nn as u32).collect()];
    let mut set: HashSet<Perm> = els.iter().cloned().collect();
    let mut i = 0;
    while i < els.len() {
        for g in gens {
            let h = compose(g, &els[i]);
            if set.insert(h.clone()) {
                els.push(h);
            }
        }
        i += 1;
    }
    els
}

/// Regular elementary abelian subgroups of `AGL(n, p)`, each as its table
/// `point ↦ the element sending 0 there`.
pub fn regular_elementary_abelian(p: u32, n: usize, glp: &[Mat]) -> Vec<Vec<Perm>> {
    let nn = size(p, n);
    let mut out = Vec::new();
    let mut gens: Vec<Perm> = Vec::new();
    search_regular(p, n, nn, glp, &mut gens, &mut out);
    out
}

fn search_regular(p: u32, n: usize, nn: usize, glp: &[Mat], gens: &mut Vec<Perm>, out: &mut Vec<Vec<Perm>>) {
    let group = span(gens, nn);
    let mut orbit = vec![false; nn];
    for g in &group {
        orbit[g[0] as usize] = true;
    }
    if group.len() != orbit.iter().filter(|&&b| b).count() {
        return;
    }
    let Some(v) = orbit.iter().position(|&b| !b) else {
        let mut table: Vec<Perm> = vec![Vec::new(); nn];
        for g in group {
            let at = g[0] as usize;
            table[at] = g;
        }
        out.push(table);
        return;
    };
    let shift = coords(v as u32, p, n);
    for m in glp {
        let r = affine_perm(m, &shift);
        let mut q = r.clone();
        for _ in 1..p {
            q = compose(&r, &q);
        }
        if !is_id(&q) || gens.iter().any(|g| compose(g, &r) != compose(&r, g)) {
            continue;
        }
        gens.push(r);
        search_regular(p, n, nn, glp, gens, out);
        gens.pop();
    }
}

/// Every skew-morphism of `Z_p^n`, read off from factorizations
/// `X = R⟨c⟩ ≤ AGL(n, p)` with `R` regular elementary abelian and `c`
/// linear, then closed under conjugation by `GL(n, p)`.
pub fn affine_skew_morphisms(p: u32, n: usize) -> HashSet<Perm> {
    let nn = size(p, n);
    let glp = gl(p, n);
    let gl_perms: Vec<(Perm, Perm)> = glp.iter().map(|m| {
        let a = m.perm();
        let ai = inverse(&a);
        (a, ai)
    }).collect();

    let all_r = regular_elementary_abelian(p, n, &glp);
    let mut seen: HashSet<Vec<Perm>> = HashSet::new();
    let mut reps = Vec::new();
    for r in all_r {
        if seen.contains(&r) {
            continue;
        }
        for (a, ai) in &gl_perms {
            let mut t: Vec<Perm> = vec![Vec::new(); nn];
            for g in &r {
                let h = compose(a, &compose(g, ai));
                let at = h[0] as usize;
                t[at] = h;
            }
            seen.insert(t);
        }
        reps.push(r);
    }

    let mut base: HashSet<Perm> = HashSet::new();
    for r in &reps {
        let rinv: Vec<Perm> = r.iter().map(|g| inverse(g)).collect();
        // λ(v) = (Π r_{e_i}^{v_i})(0) for a basis of R
        let basis = independent_basis(r, p, n);
        let lambda: Perm = (0..nn as u32)
            .map(|i| {
                let c = coords(i, p, n);
                let mut pt = 0u32;
                for (k, b) in basis.iter().enumerate() {
                    for _ in 0..c[k] {
                        pt = b[pt as usize];
                    }
                }
                pt
            })
            .collect();
        let linv = inverse(&lambda);
        for (c, _) in &gl_perms {
            let pows = powers(c);
            let closed = r.iter().all(|g| {
                let cg = compose(c, g);
                let u = cg[0] as usize;
                let fixed = compose(&rinv[u], &cg);
                pows.contains(&fixed)
            });
            if closed {
                base.insert(compose(&linv, &compose(c, &lambda)));
            }
        }
    }

    let mut all: HashSet<Perm> = HashSet::new();
    for s in base {
        if all.contains(&s) {
            continue;
        }
        for (a, ai) in &gl_perms {
            all.insert(compose(ai, &compose(&s, a)));
        }
    }
    all
}

fn independent_basis(r: &[Perm], p: u32, n: usize) -> Vec<Perm> {
    let nn = r.len();
    let mut basis: Vec<Perm> = Vec::new();
    let mut reached = vec![false; nn];
    reached[0] = true;
    while basis.len() < n {
        let v = reached.iter().position(|&b| !b).unwrap();
        basis.push(r[v].clone());
        let group = span(&basis, nn);
        for g in group {
            reached[g[0] as usize] = true;
        }
    }
    let _ = p;
    basis
}

/// `|Ω|`: centralizer elements of `g1` of order dividing `p − 1`, other
/// than the identity, sending every line `v + ⟨e2, e3⟩`, `v ∉ ⟨e2, e3⟩`,
/// to a different line.
pub fn omega_count(p: u32) -> usize {
    let n = 3;
    let g1 = Mat { p, n, e: vec![1, 1, 0, 0, 1, 0, 0, 0, 1] };
    let nn = size(p, n);
    let w: Vec<u32> = (0..nn as u32).filter(|&i| coords(i, p, n)[0] == 0).collect();
    let line = |v: u32| -> Vec<u32> {
        let cv = coords(v, p, n);
        let mut l: Vec<u32> = w
            .iter()
            .map(|&x| index(&coords(x, p, n).iter().zip(&cv).map(|(a, b)| (a + b) % p).collect::<Vec<_>>(), p))
            .collect();
        l.sort();
        l
    };
    let mut count = 0;
    for m in gl(p, n) {
        if m.mul(&g1) != g1.mul(&m) || m.is_identity() || !m.pow((p - 1) as u64).is_identity() {
            continue;
        }
        let perm = m.perm();
        let moves_all = (0..nn as u32).filter(|&v| coords(v, p, n)[0] != 0).all(|v| {
            let mut img: Vec<u32> = line(v).iter().map(|&x| perm[x as usize]).collect();
            img.sort();
            img != line(v)
        });
        count += moves_all as usize;
    }
    count
}

/// Histogram of a slice of counts.
pub fn tally<K: std::hash::Hash + Eq>(it: impl IntoIterator<Item = K>) -> HashMap<K, usize> {
    let mut m = HashMap::new();
    for k in it {
        *m.entry(k).or_insert(0) += 1;
    }
    m
}
