mod common;

use std::collections::HashSet;

use skewmorph::enumeration::{full_enum, EnumOptions, Method};
use skewmorph::fpalg::{gl_order, omega_set};

fn structured_set(p: u32, n: usize) -> HashSet<Vec<u32>> {
    let r = full_enum(p, n, Method::Structured, &EnumOptions::default()).unwrap();
    r.skews.iter().map(|s| s.images().to_vec()).collect()
}

#[test]
fn affine_factorizations_give_the_enumerated_set_3_2() {
    assert_eq!(common::affine_skew_morphisms(3, 2), structured_set(3, 2));
}

#[test]
fn affine_factorizations_give_the_enumerated_set_5_2() {
    let oracle = common::affine_skew_morphisms(5, 2);
    assert_eq!(oracle.len(), 768);
    assert_eq!(oracle, structured_set(5, 2));
}

#[test]
fn affine_factorizations_give_the_enumerated_set_3_3() {
    let oracle = common::affine_skew_morphisms(3, 3);
    let ours = structured_set(3, 3);
    assert_eq!(oracle.len(), ours.len());
    assert_eq!(oracle, ours);
}

#[test]
fn naive_validation_agrees_on_3_3() {
    let r = full_enum(3, 3, Method::Structured, &EnumOptions::default()).unwrap();
    let mut auts = 0;
    for s in &r.skews {
        let (pi, order) = common::naive_skew(3, 3, s.images()).expect("member fails the defining identity");
        assert_eq!(order, s.order());
        assert_eq!(pi, s.pi());
        auts += pi.iter().all(|&j| j == 1 % order) as usize;
    }
    assert_eq!(auts, 11232);
    assert_eq!(r.skews.len() - auts, 2080);
}

#[test]
fn gl_orders_by_counting() {
    for (p, n) in [(2, 2), (2, 3), (3, 2), (3, 3), (5, 2)] {
        assert_eq!(common::gl(p, n).len() as u64, gl_order(p, n), "GL({n}, {p})");
    }
}

#[test]
fn omega_sizes_by_direct_filter() {
    assert_eq!(common::omega_count(3), 10);
    assert_eq!(common::omega_count(5), 228);
    assert_eq!(omega_set(3).unwrap().len(), common::omega_count(3));
    assert_eq!(omega_set(5).unwrap().len(), common::omega_count(5));
}
