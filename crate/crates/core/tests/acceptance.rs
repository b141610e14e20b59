use std::collections::BTreeMap;
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};
use torsion_atlas::atlasdata::{load_tables, verify_dimension_formula, verify_totals, Atlas, DATA_VERSION};
use torsion_atlas::fintransfer::{brute_force_record_count, finite_classes, FrobeniusSpec};
use torsion_atlas::toralclass::verify_steinberg;
use torsion_atlas::weylact::{oracle_equivalence, ModMatrixGroup};
use torsion_atlas::{
    build_root_datum, classify_toral_with, Classification, Family, IsogenyKind, LieType, ToralOptions,
};

type Outcome = Result<String, String>;

fn ty(s: &str) -> LieType {
    s.parse().unwrap()
}

fn forms() -> Vec<(&'static str, IsogenyKind)> {
    let mut out = Vec::new();
    for s in ["G2", "F4", "E6", "E7", "E8"] {
        out.push((s, IsogenyKind::SimplyConnected));
        out.push((s, IsogenyKind::Adjoint));
    }
    out
}

fn weyl_order(s: &str) -> u128 {
    match s {
        "G2" => 12,
        "F4" => 1152,
        "E6" => 51_840,
        "E7" => 2_903_040,
        "E8" => 696_729_600,
        _ => unreachable!(),
    }
}

fn torsion(s: &str) -> &'static [u8] {
    match s {
        "G2" => &[2],
        "F4" | "E6" | "E7" => &[2, 3],
        "E8" => &[2, 3, 5],
        _ => unreachable!(),
    }
}

/// Number of `k`-dimensional subspaces of `F_q^n`, by the product formula.
fn gaussian(n: u32, k: u32, q: u128) -> u128 {
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..k {
        num *= q.pow(n - i) - 1;
        den *= q.pow(i + 1) - 1;
    }
    num / den
}

fn is_p_power(mut x: u128, p: u128) -> bool {
    if x == 0 {
        return false;
    }
    while x.is_multiple_of(p) {
        x /= p;
    }
    x == 1
}

fn classify(s: &str, iso: IsogenyKind, p: u8, atlas: &std::sync::Arc<Atlas>, distributions: bool) -> Classification {
    let rd = build_root_datum(ty(s), iso).unwrap();
    classify_toral_with(&rd, p, ToralOptions { max_rank: None, atlas: Some(atlas), distributions }).unwrap()
}

fn orbit_identities(s: &str, c: &Classification) -> Result<(), String> {
    let w = weyl_order(s);
    if c.weyl_order != w {
        return Err(format!("{}: |W| = {}", s, c.weyl_order));
    }
    let r = c.rd.rank as u32;
    for k in 0..=r {
        let total: u128 = c.classes.iter().filter(|t| t.rank == k as usize).map(|t| t.orbit_size).sum();
        let expected = gaussian(r, k, c.p as u128);
        if total != expected {
            return Err(format!("{} p={} rank {}: orbit sum {} != {}", s, c.p, k, total, expected));
        }
    }
    for t in &c.classes {
        if t.orbit_size * t.normalizer_order != w {
            return Err(format!("{} p={} class {}: {} * {} != |W|", s, c.p, t.id, t.orbit_size, t.normalizer_order));
        }
    }
    Ok(())
}

struct Runs {
    p2: Vec<(&'static str, IsogenyKind, Classification)>,
}

fn criterion1(runs: &Runs) -> Outcome {
    let expected: BTreeMap<&str, Vec<u64>> = [
        ("G2", vec![1, 1, 1]),
        ("F4", vec![1, 2, 3, 2, 1]),
        ("E6", vec![1, 2, 4, 4, 4, 2, 1]),
        ("E7", vec![1, 3, 5, 7, 7, 5, 3, 1]),
        ("E8", vec![1, 2, 4, 5, 7, 5, 4, 2, 1]),
    ]
    .into();
    let totals: BTreeMap<&str, u64> = [("G2", 3), ("F4", 9), ("E6", 18), ("E7", 32), ("E8", 31)].into();
    for (s, iso, c) in &runs.p2 {
        let counts = c.counts_by_rank();
        if counts != expected[s] || counts.iter().sum::<u64>() != totals[s] {
            return Err(format!("{} {}: {:?}", s, iso, counts));
        }
    }
    Ok(format!("{} forms match", runs.p2.len()))
}

fn criterion2(atlas: &Atlas, runs: &Runs) -> Outcome {
    let expected: BTreeMap<&str, u64> = [("G2", 4), ("F4", 12), ("E6", 21), ("E7", 78), ("E8", 66)].into();
    let checks = verify_totals(atlas).map_err(|e| e.to_string())?;
    let mut seen = 0;
    for c in &checks {
        let name = c.group_type.to_string();
        let Some(&want) = expected.get(name.as_str()) else { continue };
        seen += 1;
        let ours = runs
            .p2
            .iter()
            .find(|(s, iso, _)| *s == name && *iso == IsogenyKind::Adjoint)
            .map(|(_, _, c)| c.counts_by_rank())
            .unwrap();
        if !c.pass || c.toral + c.nontoral != want || c.toral_counts != ours {
            return Err(format!("{}: {} + {} (want {})", name, c.toral, c.nontoral, want));
        }
    }
    if seen != expected.len() {
        return Err(format!("only {} of {} groups in the totals table", seen, expected.len()));
    }
    Ok("4, 12, 21, 78, 66".into())
}

fn criterion3(atlas: &Atlas) -> Outcome {
    let t = Instant::now();
    let spots: BTreeMap<(u32, &str, &str), i64> = [
        ((5, "F4", "2^5"), 0),
        ((6, "E7ad", "2^8"), 0),
        ((3, "E8", "(3^5)_b"), 0),
        ((3, "E8", "(3^3)_b"), 14),
        ((5, "E7sc", "2^6"), 9),
        ((5, "E6", "2^5"), 2),
    ]
    .into();
    let mut rows = 0;
    let mut spot_hits = 0;
    for rec in atlas.nontoral.iter().filter(|r| [3, 5, 6, 7].contains(&r.table)) {
        let c = verify_dimension_formula(rec, atlas).map_err(|e| e.to_string())?;
        rows += 1;
        if !c.pass || c.numerator != c.expected * c.denominator {
            return Err(format!("table {} {} {}: {}/{} vs {}", c.table, c.group, c.name, c.numerator, c.denominator, c.expected));
        }
        if let Some(&v) = spots.get(&(rec.table, rec.group.as_str(), rec.name.as_str())) {
            spot_hits += 1;
            if c.expected != v {
                return Err(format!("{} {}: dimension {} != {}", rec.group, rec.name, c.expected, v));
            }
        }
    }
    if spot_hits != spots.len() {
        return Err(format!("found {} of {} reference rows", spot_hits, spots.len()));
    }
    let dt = t.elapsed();
    if dt > Duration::from_secs(1) {
        return Err(format!("took {:?}", dt));
    }
    Ok(format!("{} rows in {:?}", rows, dt))
}

fn criterion4(orders: &mut Vec<(u8, u128)>) -> Outcome {
    let t = Instant::now();
    let mut n = 0;
    for (s, iso) in forms() {
        // sc and ad coincide for G2, F4 and E8.
        if iso == IsogenyKind::Adjoint && !s.starts_with("E6") && !s.starts_with("E7") {
            continue;
        }
        let rd = build_root_datum(ty(s), iso).unwrap();
        for p in [2u8, 3, 5, 7] {
            let r = verify_steinberg(&rd, p).map_err(|e| e.to_string())?;
            let tors = torsion(s).contains(&p);
            if r.disconnected.is_empty() == tors {
                return Err(format!("{} {} p={}: {} disconnected, torsion {}", s, iso, p, r.disconnected.len(), tors));
            }
            for (_, q) in &r.disconnected {
                orders.push((p, q.parse().unwrap()));
            }
            n += 1;
        }
    }
    let dt = t.elapsed();
    if dt > Duration::from_secs(600) {
        return Err(format!("{} cases in {:?}", n, dt));
    }
    Ok(format!("{} cases in {:.1?}", n, dt))
}

fn criterion5(runs: &Runs, steinberg: &[(u8, u128)]) -> Outcome {
    let mut n = 0;
    for (s, iso, c) in &runs.p2 {
        for t in &c.classes {
            n += 1;
            if !is_p_power(t.centralizer.component_group_order, 2) {
                return Err(format!("{} {} {}: {}", s, iso, t.id, t.centralizer.component_group_order));
            }
        }
    }
    for &(p, q) in steinberg {
        n += 1;
        if !is_p_power(q, p as u128) {
            return Err(format!("p={}: component group order {}", p, q));
        }
    }
    Ok(format!("{} orders", n))
}

fn criterion6() -> Outcome {
    let t = Instant::now();
    let mut cases = Vec::new();
    for r in 1..=4usize {
        for f in [Family::A, Family::B, Family::C, Family::D, Family::G, Family::F] {
            if let Ok(lt) = LieType::new(f, r) {
                let ok = match f {
                    Family::B => r >= 2,
                    Family::C => r >= 3,
                    Family::D => r >= 4,
                    Family::G => r == 2,
                    Family::F => r == 4,
                    _ => true,
                };
                if ok {
                    cases.push(lt);
                }
            }
        }
    }
    let mut n = 0;
    for lt in &cases {
        for iso in [IsogenyKind::SimplyConnected, IsogenyKind::Adjoint] {
            let rd = build_root_datum(*lt, iso).unwrap();
            for p in [2u8, 3] {
                let g = ModMatrixGroup::weyl(&rd, p);
                if p == 2 && g.modulus != 4 {
                    return Err(format!("{} {}: p=2 action modulo {}", lt, iso, g.modulus));
                }
                let r = oracle_equivalence(&g, p, 1 << 22).map_err(|e| e.to_string())?;
                if !r.agrees() {
                    return Err(format!("{} {} p={}: {:?} vs {:?} {:?}", lt, iso, p, r.counts, r.oracle_counts, r.mismatches));
                }
                n += 1;
            }
        }
    }
    for name in ["F4", "B4", "C4", "D4"] {
        if !cases.contains(&ty(name)) {
            return Err(format!("{} missing", name));
        }
    }
    let dt = t.elapsed();
    if dt > Duration::from_secs(120) {
        return Err(format!("took {:?}", dt));
    }
    Ok(format!("{} groups in {:.1?}", n, dt))
}

fn criterion7(all: &[(&str, &Classification)]) -> Outcome {
    for (s, c) in all {
        orbit_identities(s, c)?;
    }
    Ok(format!("{} runs", all.len()))
}

fn criterion8(atlas: &std::sync::Arc<Atlas>, extra: &mut Vec<(&'static str, Classification)>) -> Outcome {
    for s in ["E6", "E7"] {
        for p in [2u8, 3] {
            let sc = classify(s, IsogenyKind::SimplyConnected, p, atlas, false);
            let ad = classify(s, IsogenyKind::Adjoint, p, atlas, false);
            if sc.counts_by_rank() != ad.counts_by_rank() {
                return Err(format!("{} p={}: {:?} vs {:?}", s, p, sc.counts_by_rank(), ad.counts_by_rank()));
            }
            extra.push((s, sc));
            extra.push((s, ad));
        }
    }
    Ok("E6, E7 at p = 2, 3".into())
}

fn criterion9(runs: &Runs) -> Outcome {
    let f = FrobeniusSpec::new(5, 2).map_err(|e| e.to_string())?;
    let (mut classes, mut oracles) = (0, 0);
    for (s, iso, c) in &runs.p2 {
        for t in &c.classes {
            classes += 1;
            let recs = finite_classes(t, &f).map_err(|e| e.to_string())?;
            let q = t.centralizer.component_group_order;
            let sum: u128 = recs.iter().map(|r| r.orbit_size as u128).sum();
            if sum != q {
                return Err(format!("{} {} {}: orbit sum {} != |Q| {}", s, iso, t.id, sum, q));
            }
            if q == 1 && recs.len() != 1 {
                return Err(format!("{} {} {}: {} records for trivial Q", s, iso, t.id, recs.len()));
            }
            if q <= 64 {
                oracles += 1;
                let b = brute_force_record_count(t).map_err(|e| e.to_string())?;
                if b != recs.len() {
                    return Err(format!("{} {} {}: {} records, oracle {}", s, iso, t.id, recs.len(), b));
                }
            }
        }
    }
    Ok(format!("{} classes, {} against the oracle", classes, oracles))
}

fn criterion10(runs: &Runs, atlas: &std::sync::Arc<Atlas>, extra: &mut Vec<(&'static str, Classification)>) -> Outcome {
    let f4 = runs.p2.iter().find(|(s, _, _)| *s == "F4").map(|(_, _, c)| c).unwrap();
    let top = f4.classes.iter().find(|t| t.rank == 4).ok_or("no F4 rank 4 class")?;
    let mut sigs: Vec<(i64, String)> = top
        .distribution
        .iter()
        .map(|d| (d.signature.adjoint_trace.as_integer().unwrap_or(i64::MIN), d.signature.label.clone()))
        .collect();
    sigs.sort();
    if sigs != vec![(-4, "2A".to_string()), (20, "2B".to_string())] {
        return Err(format!("F4 2^4 signatures {:?}", sigs));
    }
    let e8 = classify("E8", IsogenyKind::SimplyConnected, 5, atlas, true);
    let hit = e8.classes.iter().flat_map(|t| &t.distribution).find(|d| {
        d.signature.element_order == 5 && d.signature.adjoint_trace.as_integer() == Some(-2)
    });
    let label = hit.map(|d| d.signature.label.clone()).ok_or("no E8 signature with trace -2")?;
    extra.push(("E8", e8));
    if label != "5C" {
        return Err(format!("E8 trace -2 labelled {}", label));
    }
    Ok("F4 2A/2B, E8 5C".into())
}

fn report(n: u32, title: &str, lines: &mut Vec<(u32, bool, String)>, f: impl FnOnce() -> Outcome) {
    let t = Instant::now();
    let r = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        Err(e.downcast_ref::<String>().cloned().or(e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
    });
    let (pass, msg) = match r {
        Ok(m) => (true, m),
        Err(m) => (false, m),
    };
    lines.push((n, pass, format!("{} criterion {:>2} {}: {} [{:.1?}]", if pass { "PASS" } else { "FAIL" }, n, title, msg, t.elapsed())));
}

fn main() {
    let atlas = std::sync::Arc::new(load_tables(DATA_VERSION).expect("embedded tables"));
    let mut lines = Vec::new();
    let t = Instant::now();
    let runs = Runs {
        p2: forms().into_iter().map(|(s, iso)| (s, iso, classify(s, iso, 2, &atlas, true))).collect(),
    };
    println!("classified {} forms at p=2 in {:.1?}", runs.p2.len(), t.elapsed());
    let mut extra = Vec::new();
    let mut steinberg = Vec::new();

    report(1, "p=2 toral class counts", &mut lines, || criterion1(&runs));
    report(2, "global totals", &mut lines, || criterion2(&atlas, &runs));
    report(3, "dimension formula on tables 3, 5, 6, 7", &mut lines, || criterion3(&atlas));
    report(4, "torsion dichotomy", &mut lines, || criterion4(&mut steinberg));
    report(5, "component groups are p-groups", &mut lines, || criterion5(&runs, &steinberg));
    report(6, "oracle equivalence", &mut lines, criterion6);
    report(8, "isogeny invariance", &mut lines, || criterion8(&atlas, &mut extra));
    report(9, "finite transfer at q=5", &mut lines, || criterion9(&runs));
    report(10, "distribution labels", &mut lines, || criterion10(&runs, &atlas, &mut extra));
    report(7, "orbit partition identities", &mut lines, || {
        let mut all: Vec<(&str, &Classification)> = runs.p2.iter().map(|(s, _, c)| (*s, c)).collect();
        all.extend(extra.iter().map(|(s, c)| (*s, c)));
        criterion7(&all)
    });

    lines.sort_by_key(|l| l.0);
    for (_, _, l) in &lines {
        println!("{}", l);
    }
    let failures = lines.iter().filter(|l| !l.1).count();
    if failures > 0 {
        println!("{} criteria failed", failures);
        std::process::exit(1);
    }
}
