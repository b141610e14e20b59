use torsion_atlas::rootdata::weyl_generators;
use torsion_atlas::weylact::{
    brute_force_classify, classify_subspaces_incremental, group_order, pointwise_stabilizer, subspace_orbit,
    vector_orbits, ModMatrixGroup,
};
use torsion_atlas::{build_root_datum, torsion_primes, weight_system, IsogenyKind, ModuleName, SubspaceRep};

const SC: IsogenyKind = IsogenyKind::SimplyConnected;
const AD: IsogenyKind = IsogenyKind::Adjoint;

fn line(p: u8, r: usize, v: &[u8]) -> SubspaceRep {
    let mut x = [0u8; 8];
    x[..v.len()].copy_from_slice(v);
    SubspaceRep::from_vectors(p, r, &[x])
}

fn weyl(s: &str, iso: IsogenyKind, p: u8) -> ModMatrixGroup {
    ModMatrixGroup::weyl(&build_root_datum(s.parse().unwrap(), iso).unwrap(), p)
}

#[test]
fn a1_root_datum() {
    let rd = build_root_datum("A1".parse().unwrap(), SC).unwrap();
    assert_eq!(rd.rank, 1);
    assert_eq!(rd.num_roots(), 2);
    let pairing: i64 = rd.roots[0].iter().zip(&rd.coroots[0]).map(|(a, b)| a * b).sum();
    assert_eq!(pairing, 2);
    assert_eq!(rd.fundamental.x_mod_roots, vec![2]);
    let gens = weyl_generators(&rd);
    assert_eq!(gens.len(), 1);
    assert_eq!(gens[0].rows(), vec![vec![-1]]);
}

#[test]
fn e8_and_e6_root_data() {
    let e8 = build_root_datum("E8".parse().unwrap(), AD).unwrap();
    assert_eq!(e8.num_roots(), 240);
    assert_eq!(e8.num_roots() + e8.rank, 248);
    assert!(e8.fundamental.y_mod_coroots.iter().all(|&d| d == 1));
    let e6 = build_root_datum("E6".parse().unwrap(), SC).unwrap();
    assert_eq!(e6.fundamental.x_mod_roots.iter().product::<u64>(), 3);
}

#[test]
fn torsion_prime_lists() {
    let t = |s: &str, iso| torsion_primes(s.parse().unwrap(), iso).unwrap().into_iter().collect::<Vec<_>>();
    assert_eq!(t("E8", AD), vec![2, 3, 5]);
    assert_eq!(t("G2", AD), vec![2]);
    assert!(t("A1", SC).is_empty());
    assert_eq!(t("A2", AD), vec![3]);
}

#[test]
fn weight_systems() {
    let g2 = build_root_datum("G2".parse().unwrap(), AD).unwrap();
    assert_eq!(weight_system(&g2, ModuleName::Adjoint).unwrap().dim(), 14);
    let min = weight_system(&g2, ModuleName::Minimal).unwrap();
    assert_eq!(min.dim(), 7);
    assert_eq!(min.weights.iter().filter(|(w, _)| w.iter().all(|&x| x == 0)).map(|(_, m)| m).sum::<u32>(), 1);
    let e7 = build_root_datum("E7".parse().unwrap(), SC).unwrap();
    let min = weight_system(&e7, ModuleName::Minimal).unwrap();
    assert_eq!(min.weights.len(), 56);
    assert!(min.weights.iter().all(|(_, m)| *m == 1));
}

#[test]
fn weyl_group_orders() {
    assert_eq!(group_order(&weyl("A1", SC, 3)), 2);
    let g2 = weyl("G2", SC, 2);
    assert_eq!(g2.modulus, 4);
    assert_eq!(group_order(&g2), 12);
    assert_eq!(group_order(&weyl("E8", SC, 2)), 2 * 8 * 12 * 14 * 18 * 20 * 24 * 30);
}

#[test]
fn small_orbits() {
    assert_eq!(vector_orbits(&weyl("A1", SC, 2), 2), vec![(vec![1], 1)]);
    assert_eq!(vector_orbits(&weyl("A1", SC, 3), 3), vec![(vec![1], 2)]);
    let f4 = vector_orbits(&weyl("F4", SC, 2), 2);
    assert_eq!(f4.len(), 2);
    assert_eq!(f4.iter().map(|o| o.1).sum::<u64>(), 15);
}

#[test]
fn stabilizers() {
    let a1 = weyl("A1", SC, 2);
    let (orbit, stab) = subspace_orbit(&a1, &line(2, 1, &[1]));
    assert_eq!((orbit.len(), stab.order), (1, 2));
    assert_eq!(pointwise_stabilizer(&a1, &line(2, 1, &[1])).order, 2);
    assert_eq!(pointwise_stabilizer(&weyl("A1", SC, 3), &line(3, 1, &[1])).order, 1);
    assert_eq!(pointwise_stabilizer(&a1, &SubspaceRep::zero(2, 1)).order, 2);
}

#[test]
fn e8_rank4_orbits_partition() {
    let g = weyl("E8", SC, 2);
    let levels = classify_subspaces_incremental(&g, 2).unwrap();
    let total: u128 = levels[4].iter().map(|c| c.orbit_size).sum();
    assert_eq!(total, 200_787);
    for c in &levels[4] {
        assert_eq!(696_729_600 % c.orbit_size, 0);
    }
}

#[test]
fn brute_force_agrees_on_f4_p3() {
    let g = weyl("F4", SC, 3);
    let a = classify_subspaces_incremental(&g, 3).unwrap();
    let b = brute_force_classify(&g, 3, 1 << 20).unwrap();
    let key = |l: &Vec<Vec<torsion_atlas::weylact::SubspaceClass>>| -> Vec<Vec<(SubspaceRep, u128)>> {
        l.iter().map(|cs| cs.iter().map(|c| (c.rep.clone(), c.orbit_size)).collect()).collect()
    };
    assert_eq!(key(&a), key(&b));
}

#[test]
fn trivial_group_orbits_are_singletons() {
    let g = ModMatrixGroup::new(2, 3, &[]).unwrap();
    let levels = brute_force_classify(&g, 2, 1000).unwrap();
    assert_eq!(levels.iter().map(|l| l.len()).collect::<Vec<_>>(), vec![1, 7, 7, 1]);
}
