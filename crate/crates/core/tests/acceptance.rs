//! One line per acceptance criterion. Counts are exact (tolerance zero);
//! runtime limits are checked against wall-clock time on this machine.

mod common;

use std::time::{Duration, Instant};

use skewmorph::enumeration::{compare_sets, full_enum, EnumOptions, EnumerationResult, Method};
use skewmorph::fpalg::{gl_order, omega_formulas, omega_set, split_order};
use skewmorph::skew_core::{build_skew_product, SkewMorphism};
use skewmorph::structure_verify::{
    build_and_verify_example, classify_configuration, derived_is_abelian, metacyclic_control, power_identity_trials,
    product_configuration, AffineSearch, CaseLabel, ExampleReport, ExampleTag,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn line(id: u32, title: &str, o: &Outcome, elapsed: Duration) -> bool {
    println!("criterion {id} [{title}]: {} ({:.2?}) {}", if o.pass { "PASS" } else { "FAIL" }, elapsed, o.detail);
    o.pass
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn enumerate(p: u32, n: usize, method: Method) -> (EnumerationResult, Duration) {
    timed(|| full_enum(p, n, method, &EnumOptions::default()).expect("enumeration runs"))
}

const MINUTE: Duration = Duration::from_secs(60);

struct Runs {
    brute: Vec<(EnumerationResult, Duration)>,
    structured: Vec<(EnumerationResult, Duration)>,
}

fn criterion1(runs: &Runs) -> Outcome {
    let expected: [(u32, usize, u64); 7] = [(2, 1, 1), (2, 2, 6), (2, 3, 168), (3, 1, 2), (5, 1, 4), (7, 1, 6), (3, 2, 64)];
    let mut pass = true;
    let mut parts = Vec::new();
    for ((p, n, want), (r, t)) in expected.iter().zip(&runs.brute) {
        assert_eq!((r.p, r.n), (*p, *n));
        let ok = r.count_total == *want && *t < MINUTE;
        pass &= ok;
        parts.push(format!("({p},{n})={}/{want} in {t:.1?}", r.count_total));
    }
    Outcome { pass, detail: parts.join(", ") }
}

fn criterion2(runs: &Runs) -> Outcome {
    let brute = &runs.brute[6].0;
    let (st, t) = &runs.structured[0];
    let cmp = compare_sets(&brute.skews, &st.skews);
    let pass = cmp.identical() && cmp.common == 64 && *t < MINUTE;
    Outcome {
        pass,
        detail: format!(
            "(3,2): {} common, {} brute only, {} structured only; structured run {t:.1?} (limit 60 s)",
            cmp.common,
            cmp.only_left.len(),
            cmp.only_right.len()
        ),
    }
}

fn criterion3(runs: &Runs, five_three: &(EnumerationResult, Duration)) -> Outcome {
    let find = |p: u32, n: usize| runs.structured.iter().find(|(r, _)| r.p == p && r.n == n).unwrap();
    let (r52, _) = find(5, 2);
    let (r72, _) = find(7, 2);
    let (r33, t33) = find(3, 3);
    let (r53, t53) = five_three;
    let rate = r53.validated as f64 / r53.count_total as f64;
    let pass = r52.count_total == 768
        && r72.count_total == 3456
        && r33.count_total == 13312
        && r33.validated == 13312
        && *t33 < 5 * MINUTE
        && r53.count_total == 2_166_528
        && !r53.materialized
        && rate >= 0.01
        && *t53 < 30 * MINUTE;
    Outcome {
        pass,
        detail: format!(
            "(5,2)={}, (7,2)={}, (3,3)={} with {} validated in {t33:.1?}, (5,3)={} count-only with {} validated ({:.3}%) in {t53:.1?}",
            r52.count_total,
            r72.count_total,
            r33.count_total,
            r33.validated,
            r53.count_total,
            r53.validated,
            rate * 100.0
        ),
    }
}

fn criterion4(runs: &Runs, five_three: &(EnumerationResult, Duration)) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let all = runs.brute.iter().chain(&runs.structured).chain(std::iter::once(five_three));
    for (r, _) in all {
        pass &= r.count_aut == gl_order(r.p, r.n);
        parts.push(format!("{} ({},{})={}", r.method, r.p, r.n, r.count_aut));
    }
    let pinned = [(3, 2, 48), (3, 3, 11232), (5, 2, 480)];
    for (p, n, want) in pinned {
        let r = runs.structured.iter().find(|(r, _)| r.p == p && r.n == n).unwrap();
        pass &= r.0.count_aut == want;
    }
    Outcome { pass, detail: format!("automorphisms {}", parts.join(", ")) }
}

fn criterion5() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (p, want) in [(3u32, 10usize), (5, 228)] {
        let ours = omega_set(p).unwrap().len();
        let oracle = common::omega_count(p);
        let f = omega_formulas(p);
        let flagged = f.stated_closed_form != ours as u64;
        pass &= ours == want && oracle == want && f.branch_sum == want as u64 && flagged;
        parts.push(format!(
            "p={p}: |Ω|={ours} (reference filter {oracle}), branch sum {}, stated closed form {} flagged as mismatch",
            f.branch_sum, f.stated_closed_form
        ));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn claim_ok(r: &ExampleReport, name: &str, expected: &str) -> bool {
    r.claims.iter().any(|c| c.name == name && c.pass && c.expected == expected)
}

fn criterion6(reports: &[ExampleReport]) -> Outcome {
    let [e1, e2, e3] = reports else { unreachable!() };
    let e2_ok = e2.passed()
        && claim_ok(e2, "|X|", "54")
        && claim_ok(e2, "G elementary abelian of rank", "2")
        && claim_ok(e2, "G ⊴ P", "true")
        && claim_ok(e2, "G ⊴ X", "false")
        && claim_ok(e2, "core rank of G_X", "1");
    let e3_ok = e3.passed()
        && claim_ok(e3, "|X|", "4374")
        && claim_ok(e3, "G elementary abelian of rank", "5")
        && claim_ok(e3, "G ⊴ P", "false")
        && claim_ok(e3, "rank of G_P", "4")
        && claim_ok(e3, "G_P = ⟨a1, a2, a3, a4⟩", "true");
    let e1_ok = e1.passed()
        && claim_ok(e1, "|X|", "729")
        && claim_ok(e1, "G ⊴ X", "false")
        && claim_ok(e1, "|core(⟨σ⟩, X)|", "1")
        && claim_ok(e1, "complemented normal elementary abelian subgroups of rank 4", "0")
        && e1.flags.iter().any(|f| f.contains("G_X has rank 3"));
    let failed: Vec<String> = reports
        .iter()
        .flat_map(|r| r.claims.iter().filter(|c| !c.pass).map(move |c| format!("{}: {}", r.tag, c.name)))
        .collect();
    Outcome {
        pass: e1_ok && e2_ok && e3_ok,
        detail: format!(
            "e1 {} claims, e2 {}, e3 {}; e1 core rank {} reported; failed {:?}",
            e1.claims.len(),
            e2.claims.len(),
            e3.claims.len(),
            e1.classification.core_rank,
            failed
        ),
    }
}

#[derive(Default)]
struct SweepTally {
    instances: usize,
    violations: Vec<String>,
    round_trips: usize,
    derived_abelian: usize,
    order_bound: usize,
    p_squared_free: usize,
    p_squared_checked: usize,
}

fn sweep_member(s: &SkewMorphism, index: usize, t: &mut SweepTally) {
    let (p, n) = (s.p(), s.n());
    let tag = |what: &str| format!("({p},{n}) σ = {:?}: {what}", s.images());
    let x = match build_skew_product(s.clone()) {
        Ok(x) => x,
        Err(e) => return t.violations.push(tag(&format!("build failed: {e}"))),
    };
    let cfg = product_configuration(x).expect("configuration of a skew product");
    let affine = if !s.is_automorphism() || index.is_multiple_of(20) { AffineSearch::Full } else { AffineSearch::ShortcutNormal };
    let report = classify_configuration(&cfg, Some(s.is_automorphism()), affine).expect("classification runs");
    t.instances += 1;
    for f in &report.findings {
        t.violations.push(tag(&format!("{}: {}", f.claim, f.detail)));
    }
    let split = report.case_label == CaseLabel::Split;
    let (_, m) = split_order(s.order() as u64, p);
    if split != (m == 0 || p == 2) {
        t.violations.push(tag("case (1) label disagrees with m = 0 or p = 2"));
    }
    if !report.p_normal_in_x {
        t.violations.push(tag("P not normal"));
    }
    if !(report.core_rank == n as u32 || report.core_rank + 1 == n as u32) {
        t.violations.push(tag("core rank out of range"));
    }
    if report.g_normal_in_x != s.is_automorphism() {
        t.violations.push(tag("G ⊴ X disagrees with π ≡ 1"));
    }
    match cfg.extract() {
        Ok(back) if back.images() == s.images() && back.pi() == s.pi() => t.round_trips += 1,
        _ => t.violations.push(tag("round trip")),
    }
    if derived_is_abelian(&cfg).unwrap_or(false) {
        t.derived_abelian += 1;
    }
    if (s.order() as u64) < (p as u64).pow(n as u32).max(2) {
        t.order_bound += 1;
    }
    if p != 2 && n >= 2 {
        t.p_squared_checked += 1;
        if !s.order().is_multiple_of(p * p) {
            t.p_squared_free += 1;
        }
    }
}

fn full_sets(runs: &Runs) -> Vec<&EnumerationResult> {
    let mut sets: Vec<&EnumerationResult> = runs.brute[..6].iter().map(|(r, _)| r).collect();
    sets.extend(runs.structured.iter().map(|(r, _)| r));
    sets
}

fn criterion7(runs: &Runs, t: &SweepTally) -> Outcome {
    let sizes: Vec<String> = full_sets(runs).iter().map(|r| format!("({},{})", r.p, r.n)).collect();
    Outcome {
        pass: t.violations.is_empty() && t.instances == full_sets(runs).iter().map(|r| r.skews.len()).sum::<usize>(),
        detail: format!(
            "{} instances over {}; {} violations{}",
            t.instances,
            sizes.join(" "),
            t.violations.len(),
            t.violations.first().map(|v| format!(", first: {v}")).unwrap_or_default()
        ),
    }
}

fn criterion8(t: &SweepTally, reports: &[ExampleReport]) -> Outcome {
    let mut pass = t.round_trips == t.instances
        && t.derived_abelian == t.instances
        && t.order_bound == t.instances
        && t.p_squared_free == t.p_squared_checked;
    let mut identity = Vec::new();
    for r in reports {
        let ok = claim_ok(r, "power identity on 100 random triples", "100") && claim_ok(r, "X' abelian", "true");
        pass &= ok;
        identity.push(format!("{} {}", r.tag, if ok { "100/100" } else { "failed" }));
    }
    let (group, whole, control) = metacyclic_control().expect("metacyclic control builds");
    let control_trials = power_identity_trials(&group, &whole, 100, 12, 11).expect("control is metabelian");
    pass &= control_trials == 100 && control.iter().all(|c| c.pass);
    let e1 = &reports[0];
    let omega_e1 = claim_ok(e1, "Ω₁(X) = ⟨G, z⟩", "true") && claim_ok(e1, "|Ω₁(X)|", "243");
    pass &= omega_e1;
    Outcome {
        pass,
        detail: format!(
            "round trip {}/{}, X' abelian {}/{}, |σ| ≤ p^n − 1 {}/{}, p² ∤ |σ| {}/{}, power identity {} control {control_trials}/100, Ω₁ on e1 {}, control Ω₁ shape {}",
            t.round_trips,
            t.instances,
            t.derived_abelian,
            t.instances,
            t.order_bound,
            t.instances,
            t.p_squared_free,
            t.p_squared_checked,
            identity.join(" "),
            omega_e1,
            control.iter().all(|c| c.pass)
        ),
    }
}

fn main() {
    let total = Instant::now();
    let brute = [(2, 1), (2, 2), (2, 3), (3, 1), (5, 1), (7, 1), (3, 2)]
        .iter()
        .map(|&(p, n)| enumerate(p, n, Method::Brute))
        .collect();
    let structured = [(3, 2), (5, 2), (7, 2), (3, 3)].iter().map(|&(p, n)| enumerate(p, n, Method::Structured)).collect();
    let runs = Runs { brute, structured };
    let five_three = enumerate(5, 3, Method::Structured);

    let mut all = true;
    let (o, t) = timed(|| criterion1(&runs));
    all &= line(1, "brute-force counts", &o, t + runs.brute.iter().map(|r| r.1).sum::<Duration>());
    let (o, t) = timed(|| criterion2(&runs));
    all &= line(2, "structured equals brute force at (3,2)", &o, t + runs.structured[0].1);
    let (o, t) = timed(|| criterion3(&runs, &five_three));
    all &= line(3, "structured counts", &o, t + runs.structured[1..].iter().map(|r| r.1).sum::<Duration>() + five_three.1);
    let (o, t) = timed(|| criterion4(&runs, &five_three));
    all &= line(4, "automorphism sub-counts", &o, t);
    let (o, t) = timed(criterion5);
    all &= line(5, "Ω-set sizes", &o, t);

    let (reports, t_examples) = timed(|| {
        [ExampleTag::E1, ExampleTag::E2, ExampleTag::E3]
            .into_iter()
            .map(|tag| build_and_verify_example(tag).expect("example builds"))
            .collect::<Vec<_>>()
    });
    let o = criterion6(&reports);
    all &= line(6, "example claims", &o, t_examples);
    for r in &reports {
        for f in &r.flags {
            println!("    {} flag: {f}", r.tag);
        }
    }

    let (tally, t_sweep) = timed(|| {
        let mut tally = SweepTally::default();
        for r in full_sets(&runs) {
            for (i, s) in r.skews.iter().enumerate() {
                sweep_member(s, i, &mut tally);
            }
        }
        tally
    });
    let o = criterion7(&runs, &tally);
    all &= line(7, "structure sweep", &o, t_sweep);
    let (o, t) = timed(|| criterion8(&tally, &reports));
    all &= line(8, "property suites", &o, t + t_sweep);

    println!("acceptance: {} ({:.1?} total)", if all { "all criteria pass" } else { "FAILURES" }, total.elapsed());
    if !all {
        std::process::exit(1);
    }
}
