//! Structural checks on factorizations `X = G⟨σ⟩` with `G ≅ Z_p^n`
//! elementary abelian, `G ∩ ⟨σ⟩ = 1` and `⟨σ⟩` core-free.
//!
//! Everything here works on a [`Configuration`] over an arbitrary carrier,
//! so the skew product of an enumerated skew-morphism and the explicit
//! extension groups of the worked examples go through identical code.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::fpalg::{index_vec, split_order, FpMatrix, FpVector};
use crate::group_engine::{
    build_extension, centralizer, closure, core, derived_subgroup, elementary_abelian_rank, has_complement,
    intersection, is_abelian, is_normal, normal_elem_abelian_subgroups, omega1_pgroup, CyclicGroup, ExtElem,
    ExtensionGroup, ExtensionSpec, Group, GroupError, MetabelianChecker, Subgroup, VectorGroup,
};
use crate::skew_core::{
    build_skew_product, extract_induced_skew, extract_skew, SkewError, SkewMorphism, SkewProductGroup, SkewRecord, SkewValidator,
};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("precondition fails: {0}")]
    Precondition(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Skew(#[from] SkewError),
}

/// `X = G⟨σ⟩` inside a concrete carrier.
#[derive(Clone, Debug)]
pub struct Configuration<Gr: Group> {
    pub group: Gr,
    pub x: Subgroup<Gr::Elem>,
    pub g: Subgroup<Gr::Elem>,
    pub g_basis: Vec<Gr::Elem>,
    pub sigma: Gr::Elem,
    pub p: u32,
    pub n: u32,
    pub order: u64,
    pub k: u64,
    pub m: u32,
}

impl<Gr: Group> Configuration<Gr> {
    /// Checks `G` elementary abelian of rank `|g_basis|`, `|X| = |G||σ|`,
    /// `G ∩ ⟨σ⟩ = 1` and `G, σ ⊆ X`.
    pub fn new(group: Gr, x: Subgroup<Gr::Elem>, g_basis: Vec<Gr::Elem>, sigma: Gr::Elem, p: u32) -> Result<Self, VerifyError> {
        let g = closure(&group, &g_basis)?;
        let n = g_basis.len() as u32;
        if elementary_abelian_rank(&group, &g, p) != Some(n) {
            return Err(VerifyError::Precondition(format!("G is not elementary abelian of rank {n}")));
        }
        if !g.is_subset_of(&x) || !x.contains(&sigma) {
            return Err(VerifyError::Precondition("G or σ lies outside X".into()));
        }
        let order = group.element_order(&sigma);
        if g.order() as u64 * order != x.order() as u64 {
            return Err(VerifyError::Precondition(format!("|X| = {} but |G||σ| = {}", x.order(), g.order() as u64 * order)));
        }
        let rot = closure(&group, std::slice::from_ref(&sigma))?;
        if intersection(&group, &g, &rot).order() != 1 {
            return Err(VerifyError::Precondition("G ∩ ⟨σ⟩ is nontrivial".into()));
        }
        let (k, m) = split_order(order, p);
        Ok(Configuration { group, x, g, g_basis, sigma, p, n, order, k, m })
    }

    pub fn sigma_pow(&self, e: u64) -> Gr::Elem {
        self.group.pow(&self.sigma, e)
    }

    pub fn rotation(&self) -> Result<Subgroup<Gr::Elem>, GroupError> {
        closure(&self.group, std::slice::from_ref(&self.sigma))
    }

    /// `P = G⟨σ^k⟩`.
    pub fn sylow(&self) -> Result<Subgroup<Gr::Elem>, GroupError> {
        let mut gens = self.g_basis.clone();
        gens.push(self.sigma_pow(self.k));
        closure(&self.group, &gens)
    }

    /// `z = σ^{k p^{m−1}}` when `m ≥ 1`.
    pub fn z(&self) -> Option<Gr::Elem> {
        (self.m >= 1).then(|| self.sigma_pow(self.k * (self.p as u64).pow(self.m - 1)))
    }

    /// `⟨G, z⟩`.
    pub fn g_with_z(&self) -> Result<Option<Subgroup<Gr::Elem>>, GroupError> {
        let Some(z) = self.z() else { return Ok(None) };
        let mut gens = self.g_basis.clone();
        gens.push(z);
        closure(&self.group, &gens).map(Some)
    }

    pub fn rank_of(&self, h: &Subgroup<Gr::Elem>) -> Option<u32> {
        elementary_abelian_rank(&self.group, h, self.p)
    }

    /// Reads off the skew-morphism of `G` determined by `σ`, labelled by `g_basis`.
    pub fn extract(&self) -> Result<SkewMorphism, VerifyError> {
        let validator = SkewValidator::new(self.p, self.n as usize)?;
        Ok(extract_skew(&validator, &self.group, &self.g, &self.sigma, &self.g_basis)?)
    }
}

/// The skew product of `σ` with its canonical `G` and labelling.
pub fn skew_configuration(sigma: &SkewMorphism) -> Result<Configuration<SkewProductGroup>, VerifyError> {
    let x = build_skew_product(sigma.clone())?;
    product_configuration(x)
}

/// Configuration of an already built skew product.
pub fn product_configuration(x: SkewProductGroup) -> Result<Configuration<SkewProductGroup>, VerifyError> {
    let whole = x.whole()?;
    let basis = x.g_basis();
    let s = x.sigma();
    let p = x.skew().p();
    Configuration::new(x, whole, basis, s, p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CaseLabel {
    #[serde(rename = "thm1-1")]
    Split,
    #[serde(rename = "thm1-2-normal")]
    PGroupNormal,
    #[serde(rename = "thm1-2-split")]
    PGroupSplit,
    #[serde(rename = "thm1-3-normal")]
    MixedNormal,
    #[serde(rename = "thm1-3-GnormalP")]
    MixedGNormalP,
    #[serde(rename = "thm1-3-GnotnormalP")]
    MixedGNotNormalP,
}

impl CaseLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseLabel::Split => "thm1-1",
            CaseLabel::PGroupNormal => "thm1-2-normal",
            CaseLabel::PGroupSplit => "thm1-2-split",
            CaseLabel::MixedNormal => "thm1-3-normal",
            CaseLabel::MixedGNormalP => "thm1-3-GnormalP",
            CaseLabel::MixedGNotNormalP => "thm1-3-GnotnormalP",
        }
    }
}

/// A structural claim that failed on a concrete instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub claim: String,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub p: u32,
    pub n: u32,
    pub order: u64,
    pub k: u64,
    pub m: u32,
    pub p_normal_in_x: bool,
    pub g_normal_in_x: bool,
    pub g_normal_in_p: bool,
    pub core_rank: u32,
    pub case_label: CaseLabel,
    /// Generator of a complement `B ≅ Z_p` of `G_X` in `G`, when `G ⋬ X`.
    pub b_generator: Option<String>,
    /// Generators of an affine translation subgroup `T`, when searched and found.
    pub t_generators: Option<Vec<String>>,
    pub affine_searched: bool,
    pub findings: Vec<Finding>,
}

impl ClassificationReport {
    pub fn affine_found(&self) -> Option<bool> {
        self.affine_searched.then_some(self.t_generators.is_some())
    }
}

fn finding(claim: &str, detail: impl Into<String>) -> Finding {
    Finding { claim: claim.to_string(), detail: detail.into() }
}

pub fn verify_sylow_normal<Gr: Group>(cfg: &Configuration<Gr>) -> Result<bool, VerifyError> {
    let pg = cfg.sylow()?;
    Ok(is_normal(&cfg.group, &pg, &cfg.x)?)
}

/// A normal elementary abelian `T` of rank `n` with `T ∩ ⟨σ⟩ = 1` and
/// `X = T⟨σ⟩`, so that `X` embeds in `AGL(n, p)` with `T` the translations.
pub fn find_affine_embedding<Gr: Group>(cfg: &Configuration<Gr>) -> Result<Option<Subgroup<Gr::Elem>>, VerifyError> {
    let rot = cfg.rotation()?;
    let pg = cfg.sylow()?;
    for t in normal_elem_abelian_subgroups(&cfg.group, &cfg.x, cfg.p, cfg.n)? {
        if !t.is_subset_of(&pg) {
            continue;
        }
        if intersection(&cfg.group, &t, &rot).order() == 1 && t.order() as u64 * cfg.order == cfg.x.order() as u64 {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AffineSearch {
    Skip,
    /// Full search, except `T = G` is taken directly when `G ⊴ X`.
    ShortcutNormal,
    Full,
}

/// Computes the Sylow subgroup, normality flags, core and case label, and
/// records every structural claim that fails as a finding.
pub fn classify_configuration<Gr: Group>(
    cfg: &Configuration<Gr>,
    pi_trivial: Option<bool>,
    affine: AffineSearch,
) -> Result<ClassificationReport, VerifyError> {
    let mut findings = Vec::new();
    let pg = cfg.sylow()?;
    let p_normal = is_normal(&cfg.group, &pg, &cfg.x)?;
    if !p_normal {
        findings.push(finding("P ⊴ X", format!("P = G⟨σ^{}⟩ of order {} is not normal", cfg.k, pg.order())));
    }
    let g_normal_x = is_normal(&cfg.group, &cfg.g, &cfg.x)?;
    let g_normal_p = is_normal(&cfg.group, &cfg.g, &pg)?;
    let gx = core(&cfg.group, &cfg.g, &cfg.x)?;
    let core_rank = cfg.rank_of(&gx).expect("a subgroup of G is elementary abelian");
    if core_rank + 1 < cfg.n {
        findings.push(finding("core rank ∈ {n, n−1}", format!("G_X has rank {core_rank}, n = {}", cfg.n)));
    }
    let bound = (cfg.p as u64).pow(cfg.n) - 1;
    if cfg.order > bound.max(1) {
        findings.push(finding("|σ| ≤ p^n − 1", format!("|σ| = {}", cfg.order)));
    }
    let case_label = if cfg.m == 0 || cfg.p == 2 {
        CaseLabel::Split
    } else if cfg.k == 1 {
        if g_normal_x { CaseLabel::PGroupNormal } else { CaseLabel::PGroupSplit }
    } else if g_normal_x {
        CaseLabel::MixedNormal
    } else if g_normal_p {
        CaseLabel::MixedGNormalP
    } else {
        CaseLabel::MixedGNotNormalP
    };
    if case_label == CaseLabel::Split && !g_normal_x {
        findings.push(finding("m = 0 or p = 2 forces G ⊴ X", format!("|σ| = {} and G ⋬ X", cfg.order)));
    }
    if let Some(trivial) = pi_trivial {
        if trivial != g_normal_x {
            findings.push(finding("G ⊴ X ⇔ π ≡ 1", format!("π ≡ 1 is {trivial} but G ⊴ X is {g_normal_x}")));
        }
    }
    let b_generator = if g_normal_x {
        None
    } else {
        cfg.g.elements().iter().find(|e| !gx.contains(e)).map(|e| format!("{e:?}"))
    };
    let (affine_searched, t) = match affine {
        AffineSearch::Skip => (false, None),
        AffineSearch::ShortcutNormal if g_normal_x => (true, Some(cfg.g.clone())),
        _ => (true, find_affine_embedding(cfg)?),
    };
    if affine_searched && t.is_none() {
        findings.push(finding("X ≤ AGL(n, p)", "no normal elementary abelian complement of ⟨σ⟩ of rank n"));
    }
    Ok(ClassificationReport {
        p: cfg.p,
        n: cfg.n,
        order: cfg.order,
        k: cfg.k,
        m: cfg.m,
        p_normal_in_x: p_normal,
        g_normal_in_x: g_normal_x,
        g_normal_in_p: g_normal_p,
        core_rank,
        case_label,
        b_generator,
        t_generators: t.map(|t| t.gens().iter().map(|e| format!("{e:?}")).collect()),
        affine_searched,
        findings,
    })
}

/// Classification of the skew product of `σ`.
pub fn classify(sigma: &SkewMorphism) -> Result<ClassificationReport, VerifyError> {
    classify_with(sigma, AffineSearch::ShortcutNormal)
}

pub fn classify_with(sigma: &SkewMorphism, affine: AffineSearch) -> Result<ClassificationReport, VerifyError> {
    let cfg = skew_configuration(sigma)?;
    classify_configuration(&cfg, Some(sigma.is_automorphism()), affine)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Omega1Check {
    pub omega_order: usize,
    pub expected_order: usize,
    pub equal: bool,
}

/// `Ω₁(X) = ⟨G, z⟩` of order `p^{n+1}`, for `X` a `p`-group (`k = 1`) with `m ≥ 1`.
pub fn verify_omega1<Gr: Group>(cfg: &Configuration<Gr>) -> Result<Omega1Check, VerifyError> {
    if cfg.k != 1 || cfg.m == 0 {
        return Err(VerifyError::Precondition(format!("needs k = 1 and m ≥ 1, got k = {}, m = {}", cfg.k, cfg.m)));
    }
    let omega = omega1_pgroup(&cfg.group, &cfg.x)?;
    let gz = cfg.g_with_z()?.expect("m ≥ 1");
    let expected_order = (cfg.p as usize).pow(cfg.n + 1);
    Ok(Omega1Check {
        omega_order: omega.order(),
        expected_order,
        equal: omega.same_elements(&gz) && gz.order() == expected_order,
    })
}

/// Coordinates of every element of an elementary abelian group in a basis.
fn coordinates<Gr: Group>(group: &Gr, basis: &[Gr::Elem], p: u32) -> BTreeMap<Gr::Elem, Vec<u32>> {
    let r = basis.len();
    let mut out = BTreeMap::new();
    for c in 0..(p as u64).pow(r as u32) {
        let v = index_vec(c, p, r).expect("in range");
        let e = v
            .coords()
            .iter()
            .zip(basis)
            .fold(group.identity(), |acc, (&ci, b)| group.mul(&acc, &group.pow(b, ci as u64)));
        out.insert(e, v.coords().to_vec());
    }
    out
}

/// Matrix of `a ↦ a^g = g⁻¹ a g` on an elementary abelian `A` in the
/// given basis, acting on row vectors.
pub fn conjugation_matrix<Gr: Group>(group: &Gr, basis: &[Gr::Elem], g: &Gr::Elem, p: u32) -> Result<FpMatrix, VerifyError> {
    let coords = coordinates(group, basis, p);
    let r = basis.len();
    let mut entries = Vec::with_capacity(r * r);
    for b in basis {
        let img = group.conj(b, g);
        let row = coords
            .get(&img)
            .ok_or_else(|| VerifyError::Precondition(format!("{g:?} does not normalize A")))?;
        entries.extend_from_slice(row);
    }
    Ok(FpMatrix::new(p, r, entries))
}

/// Whether `(M − E)^e ≠ 0`.
pub fn defect_power_nonzero(m: &FpMatrix, e: u64) -> bool {
    let id = FpMatrix::identity(m.p(), m.dim());
    let d = m.checked_sub(&id).expect("same shape");
    let zero = FpMatrix::zero(m.p(), m.dim());
    d.pow(e) != zero
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NilpotencyCheck {
    pub a_rank: u32,
    pub exponent: u64,
    pub matrix: Vec<Vec<u32>>,
    pub nonzero: bool,
    /// `C_P(A) = ⟨G, z⟩`.
    pub centralizer_is_gz: bool,
}

/// With `A = G_X` and `M` the action of `σ` on `A`, checks
/// `(M − E)^{p^{m−1} − 1} ≠ 0`, and `C_P(A) = ⟨G, z⟩`. Needs `m ≥ 2`.
pub fn verify_nilpotency_condition<Gr: Group>(cfg: &Configuration<Gr>) -> Result<NilpotencyCheck, VerifyError> {
    if cfg.m < 2 {
        return Err(VerifyError::Precondition(format!("needs m ≥ 2, got m = {}", cfg.m)));
    }
    let a = core(&cfg.group, &cfg.g, &cfg.x)?;
    let rank = cfg.rank_of(&a).expect("subgroup of G");
    let basis = independent_basis(&cfg.group, &a, cfg.p);
    let mat = conjugation_matrix(&cfg.group, &basis, &cfg.sigma, cfg.p)?;
    let exponent = (cfg.p as u64).pow(cfg.m - 1) - 1;
    let pg = cfg.sylow()?;
    let cent = centralizer(&cfg.group, &pg, &a);
    let gz = cfg.g_with_z()?.expect("m ≥ 1");
    Ok(NilpotencyCheck {
        a_rank: rank,
        exponent,
        matrix: (0..mat.dim()).map(|r| mat.row(r).coords().to_vec()).collect(),
        nonzero: defect_power_nonzero(&mat, exponent),
        centralizer_is_gz: cent.same_elements(&gz),
    })
}

/// A basis of an elementary abelian subgroup, picked greedily in element order.
pub fn independent_basis<Gr: Group>(group: &Gr, h: &Subgroup<Gr::Elem>, p: u32) -> Vec<Gr::Elem> {
    let mut basis: Vec<Gr::Elem> = Vec::new();
    let mut span = closure(group, &[]).expect("trivial");
    for e in h.sorted_elements() {
        if span.order() == h.order() {
            break;
        }
        if !span.contains(&e) {
            basis.push(e);
            span = closure(group, &basis).expect("inside h");
        }
    }
    debug_assert_eq!(elementary_abelian_rank(group, &span, p), Some(basis.len() as u32));
    basis
}

/// `X'` abelian.
pub fn derived_is_abelian<Gr: Group>(cfg: &Configuration<Gr>) -> Result<bool, VerifyError> {
    let d = derived_subgroup(&cfg.group, &cfg.x)?;
    Ok(is_abelian(&cfg.group, &d))
}

/// Runs the metabelian power identity on `samples` seeded random triples
/// `(a, b, n)` with `1 ≤ n ≤ max_n`; returns the number that hold.
pub fn power_identity_trials<Gr: Group>(
    group: &Gr,
    x: &Subgroup<Gr::Elem>,
    samples: usize,
    max_n: u32,
    seed: u64,
) -> Result<usize, VerifyError> {
    let checker = MetabelianChecker::new(group, x)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e = x.elements();
    let mut ok = 0;
    for _ in 0..samples {
        let a = &e[rng.gen_range(0..e.len())];
        let b = &e[rng.gen_range(0..e.len())];
        let n = rng.gen_range(1..=max_n);
        if checker.check(a, b, n) {
            ok += 1;
        }
    }
    Ok(ok)
}

/// Aggregate of a parallel classification sweep.
#[derive(Clone, Debug, Default, Serialize)]
pub struct SweepSummary {
    pub instances: usize,
    pub histogram: BTreeMap<&'static str, usize>,
    pub affine_searched: usize,
    pub affine_found: usize,
    pub findings: Vec<(Vec<u32>, Finding)>,
}

/// Classifies every member; the affine search runs on every non-normal
/// instance and on every `normal_stride`-th normal one.
pub fn sweep(skews: &[SkewMorphism], normal_stride: usize) -> Result<(Vec<ClassificationReport>, SweepSummary), VerifyError> {
    let reports: Vec<ClassificationReport> = skews
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let mode = if s.is_automorphism() && (normal_stride == 0 || i % normal_stride != 0) {
                AffineSearch::ShortcutNormal
            } else {
                AffineSearch::Full
            };
            classify_with(s, mode)
        })
        .collect::<Result<_, _>>()?;
    let mut summary = SweepSummary { instances: reports.len(), ..Default::default() };
    for (s, r) in skews.iter().zip(&reports) {
        *summary.histogram.entry(r.case_label.as_str()).or_default() += 1;
        if r.affine_searched {
            summary.affine_searched += 1;
            summary.affine_found += r.t_generators.is_some() as usize;
        }
        for f in &r.findings {
            summary.findings.push((s.images().to_vec(), f.clone()));
        }
    }
    Ok((reports, summary))
}

// Worked examples.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExampleTag {
    E1,
    E2,
    E3,
}

impl std::str::FromStr for ExampleTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "e1" => Ok(ExampleTag::E1),
            "e2" => Ok(ExampleTag::E2),
            "e3" => Ok(ExampleTag::E3),
            other => Err(format!("unknown example {other:?}; expected e1, e2 or e3")),
        }
    }
}

impl ExampleTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExampleTag::E1 => "e1",
            ExampleTag::E2 => "e2",
            ExampleTag::E3 => "e3",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Claim {
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
}

fn claim(name: &str, expected: impl ToString, observed: impl ToString) -> Claim {
    let (expected, observed) = (expected.to_string(), observed.to_string());
    Claim { name: name.to_string(), pass: expected == observed, expected, observed }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExampleReport {
    pub tag: &'static str,
    pub claims: Vec<Claim>,
    pub notes: Vec<String>,
    /// Facts about the construction that conflict with its intended role.
    pub flags: Vec<String>,
    pub classification: ClassificationReport,
    pub skew: SkewRecord,
}

impl ExampleReport {
    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.pass)
    }
}

pub type Stage1 = ExtensionGroup<VectorGroup>;
pub type Stage2 = ExtensionGroup<Stage1>;

fn unit(p: u32, n: usize, i: usize) -> FpVector {
    FpVector::unit(p, n, i)
}

fn vsum(p: u32, n: usize, idx: &[usize]) -> FpVector {
    let mut coords = vec![0u32; n];
    for &i in idx {
        coords[i] = (coords[i] + 1) % p;
    }
    FpVector::new(p, coords)
}

/// `A ⋊ ⟨σ⟩` with `A = Z_3^r` and `σ` acting by the listed images of the unit vectors.
fn stage1(r: usize, order: u32, images: Vec<FpVector>) -> Result<Stage1, VerifyError> {
    let gens = (0..r).map(|i| unit(3, r, i)).collect();
    Ok(build_extension(ExtensionSpec {
        base: VectorGroup::new(3, r),
        base_gens: gens,
        top_order: order,
        action: images,
        top_power: FpVector::zero(3, r),
    })?)
}

/// `(A ⋊ ⟨σ⟩) ⋊ ⟨b⟩` with `b` of order 3 fixing `A` and sending `σ` to `σ^e·v`.
fn stage2(inner: Stage1, r: usize, e: u32, v: FpVector) -> Result<Stage2, VerifyError> {
    let mut gens: Vec<ExtElem> = (0..r).map(|i| inner.embed(&unit(3, r, i)).expect("in A")).collect();
    let mut action = gens.clone();
    gens.push(inner.top());
    let sigma_image = ExtElem { top: e, base: inner.embed(&v).expect("in A").base };
    action.push(sigma_image);
    let id = inner.identity();
    Ok(build_extension(ExtensionSpec { base: inner, base_gens: gens, top_order: 3, action, top_power: id })?)
}

pub fn e1_configuration() -> Result<Configuration<Stage2>, VerifyError> {
    let p = 3;
    let inner = stage1(3, 9, vec![unit(p, 3, 0), vsum(p, 3, &[0, 1]), vsum(p, 3, &[1, 2])])?;
    let x = stage2(inner, 3, 4, unit(p, 3, 2))?;
    let inner = x.base_group();
    let mut basis: Vec<ExtElem> = (0..3).map(|i| x.embed(&inner.embed(&unit(p, 3, i)).unwrap()).unwrap()).collect();
    basis.push(x.top());
    let sigma = x.embed(&inner.top()).unwrap();
    let whole = x.whole()?;
    Configuration::new(x, whole, basis, sigma, p)
}

pub fn e2_configuration() -> Result<Configuration<Stage1>, VerifyError> {
    let p = 3;
    let x = stage1(2, 6, vec![FpVector::new(p, vec![2, 1]), FpVector::new(p, vec![0, 2])])?;
    let a = x.embed(&unit(p, 2, 0)).unwrap();
    let b = x.embed(&unit(p, 2, 1)).unwrap();
    let sigma = x.top();
    let a_sigma2 = x.mul(&a, &x.pow(&sigma, 2));
    let whole = x.whole()?;
    Configuration::new(x, whole, vec![a_sigma2, b], sigma, p)
}

pub fn e3_configuration() -> Result<Configuration<Stage2>, VerifyError> {
    let p = 3;
    let inner = stage1(4, 18, vec![vsum(p, 4, &[0, 1]), vsum(p, 4, &[1, 2]), unit(p, 4, 2), unit(p, 4, 3)])?;
    let x = stage2(inner, 4, 13, vsum(p, 4, &[0, 1, 2]))?;
    let inner = x.base_group();
    let mut basis: Vec<ExtElem> = (0..4).map(|i| x.embed(&inner.embed(&unit(p, 4, i)).unwrap()).unwrap()).collect();
    basis.push(x.top());
    let sigma = x.embed(&inner.top()).unwrap();
    let whole = x.whole()?;
    Configuration::new(x, whole, basis, sigma, p)
}

/// Builds the example and checks each of its claims.
pub fn build_and_verify_example(tag: ExampleTag) -> Result<ExampleReport, VerifyError> {
    match tag {
        ExampleTag::E1 => verify_example(tag, &e1_configuration()?),
        ExampleTag::E2 => verify_example(tag, &e2_configuration()?),
        ExampleTag::E3 => verify_example(tag, &e3_configuration()?),
    }
}

fn verify_example<Gr: Group>(tag: ExampleTag, cfg: &Configuration<Gr>) -> Result<ExampleReport, VerifyError> {
    let grp = &cfg.group;
    let mut claims = Vec::new();
    let mut notes = Vec::new();
    let expected_order = match tag {
        ExampleTag::E1 => 729,
        ExampleTag::E2 => 54,
        ExampleTag::E3 => 4374,
    };
    let expected_rank = match tag {
        ExampleTag::E1 => 4,
        ExampleTag::E2 => 2,
        ExampleTag::E3 => 5,
    };
    claims.push(claim("|X|", expected_order, cfg.x.order()));
    claims.push(claim("G elementary abelian of rank", expected_rank, cfg.rank_of(&cfg.g).map_or(-1, |r| r as i64)));
    claims.push(claim("|X| = |G||σ|", cfg.x.order(), cfg.g.order() as u64 * cfg.order));
    let rot = cfg.rotation()?;
    claims.push(claim("|G ∩ ⟨σ⟩|", 1, intersection(grp, &cfg.g, &rot).order()));
    let rot_core = core(grp, &rot, &cfg.x)?;
    let mut flags = Vec::new();
    if tag == ExampleTag::E3 {
        if !rot_core.is_trivial() {
            flags.push(format!(
                "⟨σ⟩ is not core-free: its core has order {}, so σ^{} is central",
                rot_core.order(),
                cfg.order / rot_core.order() as u64
            ));
        }
    } else {
        claims.push(claim("|core(⟨σ⟩, X)|", 1, rot_core.order()));
    }
    let pg = cfg.sylow()?;
    claims.push(claim("P ⊴ X", true, is_normal(grp, &pg, &cfg.x)?));
    claims.push(claim("X' abelian", true, derived_is_abelian(cfg)?));

    let validator = SkewValidator::new(cfg.p, cfg.n as usize)?;
    let (skew, s_order) = extract_induced_skew(&validator, grp, &cfg.g, &cfg.sigma, &cfg.g_basis)?;
    match tag {
        ExampleTag::E1 => claims.push(claim("extracted skew-morphism order", 9, skew.order())),
        ExampleTag::E2 => claims.push(claim("extracted skew-morphism order", 6, skew.order())),
        ExampleTag::E3 => {
            if skew.order() as u64 != s_order {
                flags.push(format!(
                    "the skew-morphism induced on G has order {}, not the order {s_order} of σ",
                    skew.order()
                ));
            }
        }
    }
    claims.push(claim("extracted skew-morphism is an automorphism", false, skew.is_automorphism()));

    let report = classify_configuration(cfg, Some(skew.is_automorphism()), AffineSearch::Skip)?;
    claims.push(claim("G ⊴ X", false, report.g_normal_in_x));
    claims.push(claim("core rank of G_X", expected_rank - 1, report.core_rank));
    match tag {
        ExampleTag::E1 => {
            claims.push(claim("case", "thm1-2-split", report.case_label.as_str()));
            if report.core_rank != 4 {
                flags.push(format!(
                    "G_X has rank {}, not 4; a core of rank 4 would be all of G, contradicting G ⋬ X",
                    report.core_rank
                ));
            }
            let omega = verify_omega1(cfg)?;
            claims.push(claim("|Ω₁(X)|", 243, omega.omega_order));
            claims.push(claim("Ω₁(X) = ⟨G, z⟩", true, omega.equal));
            let nil = verify_nilpotency_condition(cfg)?;
            claims.push(claim("(M − E)^2 ≠ 0 for σ on G_X", true, nil.nonzero));
            claims.push(claim("C_P(G_X) = ⟨G, z⟩", true, nil.centralizer_is_gz));
            let normal4 = normal_elem_abelian_subgroups(grp, &cfg.x, 3, 4)?;
            let mut complemented = 0;
            for nsub in &normal4 {
                if has_complement(grp, &cfg.x, nsub)? {
                    complemented += 1;
                }
            }
            claims.push(claim("complemented normal elementary abelian subgroups of rank 4", 0, complemented));
            notes.push(format!("normal elementary abelian subgroups of rank 4: {}, none complemented", normal4.len()));
        }
        ExampleTag::E2 => {
            claims.push(claim("G ⊴ P", true, report.g_normal_in_p));
            claims.push(claim("case", "thm1-3-GnormalP", report.case_label.as_str()));
        }
        ExampleTag::E3 => {
            claims.push(claim("G ⊴ P", false, report.g_normal_in_p));
            let gp = core(grp, &cfg.g, &pg)?;
            claims.push(claim("rank of G_P", 4, cfg.rank_of(&gp).map_or(-1, |r| r as i64)));
            let a4 = closure(grp, &cfg.g_basis[..4])?;
            claims.push(claim("G_P = ⟨a1, a2, a3, a4⟩", true, gp.same_elements(&a4)));
            claims.push(claim("case", "thm1-3-GnotnormalP", report.case_label.as_str()));
        }
    }
    let trials = power_identity_trials(grp, &cfg.x, 100, 12, 7)?;
    claims.push(claim("power identity on 100 random triples", 100, trials));
    claims.push(claim("theorem findings", 0, report.findings.len()));
    Ok(ExampleReport { tag: tag.as_str(), claims, notes, flags, classification: report, skew: skew.to_record() })
}

/// `Z_9 ⋊ Z_3` with `a^b = a^4`: `Ω₁ = ⟨a^3⟩ × ⟨b⟩` of order 9.
pub fn metacyclic_control() -> Result<(ExtensionGroup<CyclicGroup>, Subgroup<ExtElem>, Vec<Claim>), VerifyError> {
    let x = build_extension(ExtensionSpec { base: CyclicGroup::new(9), base_gens: vec![1], top_order: 3, action: vec![4], top_power: 0 })?;
    let whole = x.whole()?;
    let omega = omega1_pgroup(&x, &whole)?;
    let a3 = x.embed(&3).unwrap();
    let shape = closure(&x, &[a3, x.top()])?;
    let claims = vec![
        claim("|X|", 27, whole.order()),
        claim("|Ω₁(X)|", 9, omega.order()),
        claim("Ω₁(X) = ⟨a^3⟩ × ⟨b⟩", true, omega.same_elements(&shape) && is_abelian(&x, &shape)),
    ];
    Ok((x, whole, claims))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpalg::FpMatrix;

    #[test]
    fn order_two_automorphism_is_case_one() {
        let m = FpMatrix::from_rows(3, &[&[2, 0], &[0, 2]]);
        let r = classify(&SkewMorphism::linear(&m)).unwrap();
        assert_eq!(r.case_label, CaseLabel::Split);
        assert!(r.g_normal_in_x && r.findings.is_empty());
        assert_eq!(r.core_rank, 2);
        assert_eq!(r.affine_found(), Some(true));
    }

    #[test]
    fn defect_negative_control() {
        let m = FpMatrix::from_rows(3, &[&[1, 0, 0], &[1, 1, 0], &[0, 1, 1]]);
        assert!(defect_power_nonzero(&m, 2));
        let mut zeroed = m.clone();
        zeroed.set(2, 1, 0);
        assert!(!defect_power_nonzero(&zeroed, 2));
    }

    #[test]
    fn metacyclic() {
        let (_, _, claims) = metacyclic_control().unwrap();
        assert!(claims.iter().all(|c| c.pass), "{claims:?}");
    }
}
