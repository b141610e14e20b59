use torsion_atlas::fintransfer::{
    aut_full_check, brute_force_record_count, choose_split_q, finite_classes, finite_local_structure, FrobeniusSpec,
};
use torsion_atlas::{build_root_datum, classify_toral_with, AtlasError, IsogenyKind, ToralOptions};

fn classes(s: &str, iso: IsogenyKind, p: u8) -> Vec<torsion_atlas::ToralClass> {
    let rd = build_root_datum(s.parse().unwrap(), iso).unwrap();
    classify_toral_with(&rd, p, ToralOptions { distributions: false, ..Default::default() }).unwrap().classes
}

fn poly_at(c: &[i64], q: i128) -> i128 {
    c.iter().rev().fold(0i128, |acc, &x| acc * q + x as i128)
}

#[test]
fn split_q() {
    assert_eq!(choose_split_q(2), 5);
    assert_eq!(choose_split_q(3), 7);
    assert_eq!(choose_split_q(5), 11);
}

#[test]
fn frobenius_validation() {
    assert!(FrobeniusSpec::new(5, 2).is_ok());
    assert!(FrobeniusSpec::new(9, 2).is_ok());
    assert!(FrobeniusSpec::new(25, 3).is_ok());
    assert!(matches!(FrobeniusSpec::new(7, 2), Err(AtlasError::IncompatibleFrobenius { .. })));
    assert!(matches!(FrobeniusSpec::new(6, 5), Err(AtlasError::IncompatibleFrobenius { .. })));
    assert!(matches!(FrobeniusSpec::new(7, 4), Err(AtlasError::NonPrime(4))));
}

#[test]
fn prime_mismatch_is_rejected() {
    let f = FrobeniusSpec::new(7, 3).unwrap();
    let cs = classes("G2", IsogenyKind::SimplyConnected, 2);
    assert!(finite_classes(&cs[1], &f).is_err());
}

#[test]
fn f4_p3_q7() {
    let f = FrobeniusSpec::new(7, 3).unwrap();
    for tc in classes("F4", IsogenyKind::SimplyConnected, 3) {
        let recs = finite_classes(&tc, &f).unwrap();
        let q = tc.centralizer.component_group_order;
        assert_eq!(recs.iter().map(|r| r.orbit_size as u128).sum::<u128>(), q);
        assert_eq!(recs.len(), brute_force_record_count(&tc).unwrap());
        if q == 1 {
            assert_eq!(recs.len(), 1);
        }
        for r in &recs {
            let l = finite_local_structure(&tc, r, &f);
            assert_eq!(poly_at(&l.torus_char_poly, 7).unsigned_abs(), l.torus_order);
            assert_eq!(l.torus_char_poly.len(), l.central_torus_rank + 1);
        }
        // The identity record: a split torus and the full normalizer quotient.
        let l = finite_local_structure(&tc, &recs[0], &f);
        assert_eq!(l.torus_order, 6u128.pow(tc.centralizer.central_torus_rank as u32));
        assert_eq!(l.component_part, q);
        if q == 1 {
            assert_eq!(l.normalizer_component_part, tc.normalizer_quotient_order);
        }
    }
}

#[test]
fn order_two_component_group_gives_two_records() {
    let f = FrobeniusSpec::new(5, 2).unwrap();
    let cs = classes("G2", IsogenyKind::SimplyConnected, 2);
    let tc = cs.iter().find(|t| t.centralizer.component_group_order == 2).expect("a disconnected class");
    let recs = finite_classes(tc, &f).unwrap();
    assert_eq!(recs.iter().map(|r| r.orbit_size).collect::<Vec<_>>(), vec![1, 1]);
}

#[test]
fn e7_adjoint_records_match_oracle() {
    let f = FrobeniusSpec::new(5, 2).unwrap();
    let cs = classes("E7", IsogenyKind::Adjoint, 2);
    let mut seen = 0;
    for tc in cs.iter().filter(|t| t.centralizer.component_group_order > 1) {
        seen += 1;
        let recs = finite_classes(tc, &f).unwrap();
        assert_eq!(recs.len(), brute_force_record_count(tc).unwrap(), "{}", tc.id);
    }
    assert!(seen > 0);
}

#[test]
fn aut_full_examples() {
    let cs = classes("A1", IsogenyKind::SimplyConnected, 3);
    assert!(aut_full_check(&cs[0]));
    assert!(aut_full_check(&cs[1]));
    for tc in classes("F4", IsogenyKind::SimplyConnected, 2) {
        let gl: u128 = (0..tc.rank as u32).map(|i| 2u128.pow(tc.rank as u32) - 2u128.pow(i)).product();
        assert_eq!(aut_full_check(&tc), tc.normalizer_quotient_order == gl);
    }
}
