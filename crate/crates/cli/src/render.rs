use crate::suites::Check;
use crate::Format;
use serde::Serialize;
use std::fmt::Write;
use torsion_atlas::atlasdata::Atlas;
use torsion_atlas::fintransfer::{FiniteClassRecord, LocalStructure};
use torsion_atlas::toralclass::DistributionEntry;
use torsion_atlas::{Classification, IsogenyKind, LieType, SubspaceRep, ToralClass};

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Meta {
    #[serde(rename = "type")]
    pub ty: String,
    pub isogeny: String,
    pub p: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    pub tool_version: String,
    pub data_version: String,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ClassificationDoc<'a> {
    meta: &'a Meta,
    weyl_order: String,
    counts_by_rank: Vec<u64>,
    classes: &'a [ToralClass],
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn rep_string(rep: &SubspaceRep) -> String {
    let sep = if rep.p > 10 { "," } else { "" };
    rep.basis
        .iter()
        .map(|row| row.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep))
        .collect::<Vec<_>>()
        .join(" ")
}

fn distribution_string(d: &[DistributionEntry]) -> String {
    d.iter().map(|e| format!("{}:{}", e.signature.label, e.count)).collect::<Vec<_>>().join(" ")
}

fn csv_text<F: FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>>(f: F) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    f(&mut w).expect("in-memory csv");
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

pub fn classification(meta: &Meta, c: &Classification, format: Format) -> String {
    match format {
        Format::Json => json(&ClassificationDoc {
            meta,
            weyl_order: c.weyl_order.to_string(),
            counts_by_rank: c.counts_by_rank(),
            classes: &c.classes,
        }),
        Format::Csv => csv_text(|w| {
            w.write_record([
                "id",
                "rank",
                "representative",
                "orbitSize",
                "normalizerOrder",
                "centralizerType",
                "centralizerDimension",
                "centralTorusRank",
                "componentGroupOrder",
                "normalizerQuotientOrder",
                "autFull",
                "distribution",
            ])?;
            for t in &c.classes {
                w.write_record([
                    t.id.clone(),
                    t.rank.to_string(),
                    rep_string(&t.representative),
                    t.orbit_size.to_string(),
                    t.normalizer_order.to_string(),
                    t.centralizer.type_string.clone(),
                    t.centralizer.dimension.to_string(),
                    t.centralizer.central_torus_rank.to_string(),
                    t.centralizer.component_group_order.to_string(),
                    t.normalizer_quotient_order.to_string(),
                    t.aut_full.to_string(),
                    distribution_string(&t.distribution),
                ])?;
            }
            Ok(())
        }),
        Format::Markdown => {
            let mut s = String::new();
            writeln!(s, "# {} {}, p = {}\n", meta.ty, meta.isogeny, meta.p).unwrap();
            writeln!(s, "Weyl group order {}; classes per rank {:?}.\n", c.weyl_order, c.counts_by_rank()).unwrap();
            let top = c.classes.iter().map(|t| t.rank).max().unwrap_or(0);
            for k in 0..=top {
                writeln!(s, "## Rank {}\n", k).unwrap();
                writeln!(s, "| Class | Representative | Orbit | C° | dim C | C/C° | N/C | Distribution |").unwrap();
                writeln!(s, "|---|---|---|---|---|---|---|---|").unwrap();
                for t in c.classes.iter().filter(|t| t.rank == k) {
                    writeln!(
                        s,
                        "| {} | {} | {} | {} | {} | {} | {}{} | {} |",
                        t.id,
                        rep_string(&t.representative),
                        t.orbit_size,
                        t.centralizer.type_string,
                        t.centralizer.dimension,
                        t.centralizer.component_group_order,
                        t.normalizer_quotient_order,
                        if t.aut_full { " (all)" } else { "" },
                        distribution_string(&t.distribution)
                    )
                    .unwrap();
                }
                s.push('\n');
            }
            s
        }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TransferClass {
    class: String,
    rank: usize,
    representative: SubspaceRep,
    component_group_order: String,
    records: Vec<TransferRecord>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct TransferRecord {
    #[serde(flatten)]
    record: FiniteClassRecord,
    local_structure: LocalStructure,
}

impl TransferClass {
    pub fn new(tc: &ToralClass, records: Vec<FiniteClassRecord>, local: Vec<LocalStructure>) -> TransferClass {
        TransferClass {
            class: tc.id.clone(),
            rank: tc.rank,
            representative: tc.representative.clone(),
            component_group_order: tc.centralizer.component_group_order.to_string(),
            records: records.into_iter().zip(local).map(|(record, local_structure)| TransferRecord { record, local_structure }).collect(),
        }
    }
}

#[derive(Serialize)]
struct TransferDoc<'a> {
    meta: &'a Meta,
    classes: &'a [TransferClass],
}

fn poly_string(c: &[i64]) -> String {
    let mut terms = Vec::new();
    for (e, &x) in c.iter().enumerate().rev() {
        if x == 0 {
            continue;
        }
        let mono = match e {
            0 => String::new(),
            1 => "q".to_string(),
            _ => format!("q^{}", e),
        };
        let coef = match (x, e) {
            (1, 0) | (-1, 0) => x.abs().to_string(),
            (1, _) | (-1, _) => String::new(),
            _ => x.abs().to_string(),
        };
        let sign = if x < 0 { "-" } else { "+" };
        terms.push((sign, format!("{}{}", coef, mono)));
    }
    let mut s = String::new();
    for (i, (sign, t)) in terms.iter().enumerate() {
        if i == 0 {
            if *sign == "-" {
                s.push('-');
            }
        } else {
            write!(s, " {} ", sign).unwrap();
        }
        s.push_str(t);
    }
    if s.is_empty() {
        "1".into()
    } else {
        s
    }
}

pub fn transfer(meta: &Meta, rows: &[TransferClass], format: Format) -> String {
    match format {
        Format::Json => json(&TransferDoc { meta, classes: rows }),
        Format::Csv => csv_text(|w| {
            w.write_record([
                "class",
                "record",
                "orbitSize",
                "torusCharPoly",
                "torusOrder",
                "subsystem",
                "componentPart",
                "normalizerComponentPart",
            ])?;
            for c in rows {
                for r in &c.records {
                    w.write_record([
                        c.class.clone(),
                        r.record.index.to_string(),
                        r.record.orbit_size.to_string(),
                        poly_string(&r.local_structure.torus_char_poly),
                        r.local_structure.torus_order.to_string(),
                        r.local_structure.subsystem.clone(),
                        r.local_structure.component_part.to_string(),
                        r.local_structure.normalizer_component_part.to_string(),
                    ])?;
                }
            }
            Ok(())
        }),
        Format::Markdown => {
            let mut s = String::new();
            writeln!(s, "# {} {}, p = {}, q = {}\n", meta.ty, meta.isogeny, meta.p, meta.q.unwrap_or(0)).unwrap();
            writeln!(s, "| Class | C/C° | Record | Orbit | Torus | |T^wF| | C° | C_(C/C°)(w) | C_(N/C°)(w) |").unwrap();
            writeln!(s, "|---|---|---|---|---|---|---|---|---|").unwrap();
            for c in rows {
                for r in &c.records {
                    let l = &r.local_structure;
                    writeln!(
                        s,
                        "| {} | {} | {} | {} | {} | {} | {} | {} | {} |",
                        c.class,
                        c.component_group_order,
                        r.record.index,
                        r.record.orbit_size,
                        poly_string(&l.torus_char_poly),
                        l.torus_order,
                        l.subsystem,
                        l.component_part,
                        l.normalizer_component_part
                    )
                    .unwrap();
                }
            }
            s
        }
    }
}

pub fn checks_text(checks: &[Check]) -> String {
    let mut s = String::new();
    for c in checks {
        writeln!(s, "{} [{}] {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.suite, c.name, c.detail).unwrap();
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    writeln!(s, "{} checks, {} failed", checks.len(), failed).unwrap();
    s
}

pub fn checks_json(checks: &[Check]) -> String {
    #[derive(Serialize)]
    struct Doc<'a> {
        pass: bool,
        checks: &'a [Check],
    }
    json(&Doc { pass: checks.iter().all(|c| c.pass), checks })
}

pub fn nontoral_section(atlas: &Atlas, ty: &LieType, iso: IsogenyKind, p: u8) -> String {
    let names = [ty.to_string(), format!("{}{}", ty, iso)];
    let rows: Vec<_> =
        atlas.nontoral.iter().filter(|r| r.p == p as u32 && names.contains(&r.group)).collect();
    let mut s = String::new();
    writeln!(s, "## Tabulated non-toral classes\n").unwrap();
    if rows.is_empty() {
        writeln!(s, "None at this prime.").unwrap();
        return s;
    }
    writeln!(s, "| Table | Group | Name | Rank | Distribution | dim C | Centralizer |").unwrap();
    writeln!(s, "|---|---|---|---|---|---|---|").unwrap();
    for r in rows {
        writeln!(
            s,
            "| {} | {} | {} | {} | {} | {} | {} |",
            r.table,
            r.group,
            r.name,
            r.rank,
            r.distribution.iter().map(|(l, c)| format!("{}:{}", l, c)).collect::<Vec<_>>().join(" "),
            r.dim_centralizer,
            r.centralizer_text
        )
        .unwrap();
    }
    s
}
