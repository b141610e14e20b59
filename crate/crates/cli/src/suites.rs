use crate::Failure;
use serde::Serialize;
use torsion_atlas::atlasdata::{
    verify_dimension_formula, verify_distribution_sums, verify_inclusion_labels, verify_totals, Atlas,
};
use torsion_atlas::toralclass::verify_steinberg;
use torsion_atlas::weylact::{oracle_equivalence, ModMatrixGroup};
use torsion_atlas::{build_root_datum, Family, IsogenyKind, LieType};

#[derive(Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

pub fn tables(atlas: &Atlas) -> Result<Vec<Check>, Failure> {
    let mut out = Vec::new();
    for rec in &atlas.nontoral {
        let c = verify_dimension_formula(rec, atlas)?;
        out.push(Check {
            suite: "tables",
            name: format!("dimension table {} {} {}", c.table, c.group, c.name),
            pass: c.pass,
            detail: format!("expected {}, formula {}/{}", c.expected, c.numerator, c.denominator),
        });
    }
    for s in verify_distribution_sums(atlas) {
        out.push(Check {
            suite: "tables",
            name: format!("distribution table {} {} {}", s.table, s.group, s.name),
            pass: s.pass,
            detail: format!("{} elements, expected {}", s.sum, s.expected),
        });
    }
    let inc = verify_inclusion_labels(atlas);
    out.push(Check {
        suite: "tables",
        name: "inclusion labels".into(),
        pass: inc.is_ok(),
        detail: inc.err().map(|e| e.to_string()).unwrap_or_default(),
    });
    for t in verify_totals(atlas)? {
        out.push(Check {
            suite: "tables",
            name: format!("totals {}", t.group_type),
            pass: t.pass,
            detail: format!(
                "toral {:?} (expected {:?}) + non-toral {} = {} (expected {})",
                t.toral_counts,
                t.expected_toral_counts,
                t.nontoral,
                t.toral + t.nontoral,
                t.expected_total
            ),
        });
    }
    Ok(out)
}

/// Exceptional types with each distinct isogeny form.
pub fn exceptional_forms() -> Vec<(LieType, IsogenyKind)> {
    let mut out = Vec::new();
    for ty in LieType::exceptional() {
        out.push((ty, IsogenyKind::SimplyConnected));
        if ty.family == Family::E && ty.rank < 8 {
            out.push((ty, IsogenyKind::Adjoint));
        }
    }
    out
}

pub fn torsion(primes: &[u8]) -> Result<Vec<Check>, Failure> {
    let mut out = Vec::new();
    for (ty, iso) in exceptional_forms() {
        let rd = build_root_datum(ty, iso)?;
        for &p in primes {
            let r = verify_steinberg(&rd, p)?;
            out.push(Check {
                suite: "torsion",
                name: format!("{} {} p={}", ty, iso, p),
                pass: r.consistent && r.orders_are_p_powers,
                detail: format!(
                    "torsion prime: {}, {:?}, {} cases, {} with disconnected centralizer",
                    r.torsion_prime,
                    r.method,
                    r.cases_checked,
                    r.disconnected.len()
                ),
            });
        }
    }
    Ok(out)
}

/// Every classical and exceptional type of rank at most `max_rank`.
pub fn small_types(max_rank: usize) -> Vec<LieType> {
    let mut out = Vec::new();
    for r in 1..=max_rank.min(8) {
        for f in [Family::A, Family::B, Family::C, Family::D, Family::G, Family::F] {
            let ok = match f {
                Family::A => true,
                Family::B => r >= 2,
                Family::C => r >= 3,
                Family::D => r >= 4,
                Family::G => r == 2,
                Family::F => r == 4,
                Family::E => false,
            };
            if ok {
                out.push(LieType::new(f, r).expect("valid type"));
            }
        }
    }
    out
}

pub fn oracle(max_rank: usize, budget: u128) -> Result<Vec<Check>, Failure> {
    let mut out = Vec::new();
    for ty in small_types(max_rank) {
        for iso in [IsogenyKind::SimplyConnected, IsogenyKind::Adjoint] {
            let rd = build_root_datum(ty, iso)?;
            for p in [2u8, 3] {
                let g = ModMatrixGroup::weyl(&rd, p);
                let r = oracle_equivalence(&g, p, budget)?;
                out.push(Check {
                    suite: "oracle",
                    name: format!("{} {} p={}", ty, iso, p),
                    pass: r.agrees(),
                    detail: format!("counts {:?}, oracle {:?} {}", r.counts, r.oracle_counts, r.mismatches.join("; ")),
                });
            }
        }
    }
    Ok(out)
}
