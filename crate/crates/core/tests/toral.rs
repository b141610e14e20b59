use torsion_atlas::toralclass::{
    centralizer_subsystem, steinberg_classification, steinberg_flats, verify_steinberg, SteinbergMethod,
};
use torsion_atlas::{
    build_root_datum, classify_toral, classify_toral_with, torsion_primes, Family, IsogenyKind, LieType,
    SubspaceRep, ToralOptions,
};

const SC: IsogenyKind = IsogenyKind::SimplyConnected;
const AD: IsogenyKind = IsogenyKind::Adjoint;

fn ty(s: &str) -> LieType {
    s.parse().unwrap()
}

#[test]
fn a1_p3_classes() {
    let rd = build_root_datum(ty("A1"), SC).unwrap();
    let classes = classify_toral(&rd, 3).unwrap();
    assert_eq!(classes.len(), 2);
    let c = &classes[1];
    assert_eq!(c.rank, 1);
    assert!(c.centralizer.subsystem.roots.is_empty());
    assert_eq!(c.centralizer.component_group_order, 1);
    assert_eq!(c.normalizer_quotient_order, 2);
    assert!(c.aut_full);
    assert_eq!(c.centralizer.dimension, 1);
    let d = c.dimension_check.as_ref().unwrap();
    assert_eq!((d.from_roots, d.from_traces), (1, 1));
}

#[test]
fn a1_centralizer_subsystems() {
    let rd = build_root_datum(ty("A1"), SC).unwrap();
    let mut x = [0u8; 8];
    x[0] = 1;
    assert_eq!(centralizer_subsystem(&rd, &SubspaceRep::from_vectors(2, 1, &[x])).len(), 2);
    assert!(centralizer_subsystem(&rd, &SubspaceRep::from_vectors(3, 1, &[x])).is_empty());
    assert_eq!(centralizer_subsystem(&rd, &SubspaceRep::zero(3, 1)).len(), 2);
}

#[test]
fn a1_central_involution_trace() {
    let rd = build_root_datum(ty("A1"), SC).unwrap();
    let classes = classify_toral(&rd, 2).unwrap();
    let d = &classes[1].distribution;
    assert_eq!(d.len(), 1);
    assert_eq!(d[0].count, 1);
    assert_eq!(d[0].signature.adjoint_trace.as_integer(), Some(3));
}

#[test]
fn trivial_class_has_full_dimension() {
    for (s, dim) in [("G2", 14), ("F4", 52), ("E6", 78)] {
        let rd = build_root_datum(ty(s), AD).unwrap();
        let c = &classify_toral(&rd, 2).unwrap()[0];
        assert_eq!(c.rank, 0);
        assert_eq!(c.centralizer.dimension, dim);
        let d = c.dimension_check.as_ref().unwrap();
        assert_eq!((d.from_roots, d.from_traces), (dim as i64, dim as i64));
    }
}

#[test]
fn dimension_crosscheck_on_exceptional_types() {
    for s in ["G2", "F4", "E6", "E7"] {
        for p in [2u8, 3, 5] {
            let rd = build_root_datum(ty(s), SC).unwrap();
            let c = classify_toral_with(&rd, p, ToralOptions::default()).unwrap();
            for t in &c.classes {
                let d = t.dimension_check.as_ref().unwrap();
                assert_eq!(d.from_roots, d.from_traces, "{} p={} {}", s, p, t.id);
                let sum: u64 = t.distribution.iter().map(|e| e.count).sum();
                assert_eq!(sum, (p as u64).pow(t.rank as u32) - 1);
            }
        }
    }
}

#[test]
fn centralizer_subsystems_shrink_along_chains() {
    let rd = build_root_datum(ty("E6"), AD).unwrap();
    for t in classify_toral(&rd, 3).unwrap() {
        let rows = t.representative.rows();
        let full = centralizer_subsystem(&rd, &t.representative);
        for drop in 0..rows.len() {
            let sub: Vec<_> = rows.iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, r)| *r).collect();
            let smaller = centralizer_subsystem(&rd, &SubspaceRep::from_vectors(3, rd.rank, &sub));
            assert!(full.iter().all(|i| smaller.contains(i)), "{}", t.id);
        }
    }
}

#[test]
fn isogeny_forms_agree_on_counts() {
    for (s, p) in [("E6", 3u8), ("E7", 2)] {
        let sc = classify_toral_with(&build_root_datum(ty(s), SC).unwrap(), p, ToralOptions::default()).unwrap();
        let ad = classify_toral_with(&build_root_datum(ty(s), AD).unwrap(), p, ToralOptions::default()).unwrap();
        assert_eq!(sc.counts_by_rank(), ad.counts_by_rank());
    }
}

#[test]
fn steinberg_examples() {
    let g2 = build_root_datum(ty("G2"), SC).unwrap();
    assert!(!verify_steinberg(&g2, 2).unwrap().disconnected.is_empty());
    let a1 = build_root_datum(ty("A1"), SC).unwrap();
    for p in [2u8, 3, 5, 7, 11] {
        let r = verify_steinberg(&a1, p).unwrap();
        assert!(r.disconnected.is_empty() && r.consistent);
    }
    let e8 = build_root_datum(ty("E8"), SC).unwrap();
    let r = verify_steinberg(&e8, 7).unwrap();
    assert_eq!(r.method, SteinbergMethod::Flats);
    assert!(r.disconnected.is_empty() && r.consistent && !r.torsion_prime);
}

#[test]
fn steinberg_methods_agree() {
    let mut types = vec![ty("G2"), ty("F4"), ty("E6")];
    for r in 1..=4 {
        for f in [Family::A, Family::B, Family::C, Family::D] {
            let ok = match f {
                Family::B => r >= 2,
                Family::C => r >= 3,
                Family::D => r >= 4,
                _ => true,
            };
            if ok {
                types.push(LieType::new(f, r).unwrap());
            }
        }
    }
    for t in types {
        for iso in [SC, AD] {
            let rd = build_root_datum(t, iso).unwrap();
            let torsion = torsion_primes(t, iso).unwrap();
            for p in [2u8, 3, 5, 7] {
                let a = steinberg_classification(&rd, p).unwrap();
                let b = steinberg_flats(&rd, p).unwrap();
                let expect = torsion.contains(&(p as u64));
                assert_eq!(a.disconnected.is_empty(), !expect, "{} {} p={} classification", t, iso, p);
                assert_eq!(b.disconnected.is_empty(), !expect, "{} {} p={} flats", t, iso, p);
                assert!(a.orders_are_p_powers && b.orders_are_p_powers);
            }
        }
    }
}

#[test]
fn max_rank_truncates() {
    let rd = build_root_datum(ty("F4"), SC).unwrap();
    let c = classify_toral_with(&rd, 11, ToralOptions { max_rank: Some(2), distributions: false, ..Default::default() })
        .unwrap();
    let counts = c.counts_by_rank();
    assert_eq!(counts.len(), 3);
    assert_eq!(counts[0], 1);
    let orbits = |k| c.classes.iter().filter(|t| t.rank == k).map(|t| t.orbit_size).sum::<u128>();
    assert_eq!(orbits(1), (11u128.pow(4) - 1) / 10);
    assert_eq!(orbits(2), (11u128.pow(4) - 1) * (11u128.pow(3) - 1) / ((11 * 11 - 1) * 10));
}
