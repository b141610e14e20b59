//! Embedded class tables: element classes, class inclusions, non-toral
//! elementary abelian subgroups and class totals, with consistency checks.
//!
//! Each table is tab-separated text, one record per line; lines starting
//! with `#` are comments.

use crate::cyclotomic::Cyclotomic;
use crate::error::{AtlasError, Result};
use crate::rootdata::{build_root_datum, Family, IsogenyKind, LieType};
use crate::weylact::{classify_with, ClassifyOptions, ModMatrixGroup};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::Path;

pub const DATA_VERSION: &str = "1";

const CHAR_CLASSES: &str = include_str!("../data/char_classes.tsv");
const INCLUSIONS: &str = include_str!("../data/inclusions.tsv");
const NONTORAL: &str = include_str!("../data/nontoral.tsv");
const TOTALS: &str = include_str!("../data/totals.tsv");

pub const TABLE_FILES: [&str; 4] = ["char_classes.tsv", "inclusions.tsv", "nontoral.tsv", "totals.tsv"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordKind {
    /// A row printed in the class table.
    Table,
    /// A label used in subgroup distributions, stored with its stated value.
    Alias,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CharClassRecord {
    pub group: String,
    #[serde(skip)]
    pub ty: LieType,
    pub label: String,
    pub element_order: u32,
    pub kind: RecordKind,
    pub centralizer_description: String,
    pub chi_l: Cyclotomic,
    pub chi_min: Option<Cyclotomic>,
}

impl CharClassRecord {
    /// Prime used for the cyclotomic values.
    pub fn prime(&self) -> u8 {
        smallest_prime_factor(self.element_order) as u8
    }

    /// Dimension of the centralizer of an element of prime order, from its adjoint trace.
    pub fn centralizer_dim(&self) -> Option<i64> {
        let p = self.element_order as i64;
        if !crate::arith::is_prime(p as u64) {
            return None;
        }
        let num = self.ty.dim() as i64 + self.chi_l.trace();
        (num % p == 0).then_some(num / p)
    }

    fn base_label(&self) -> &str {
        self.label.split('[').next().unwrap_or(&self.label)
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct InclusionRecord {
    pub chain: u32,
    pub source_group: String,
    pub source_label: String,
    pub target_group: String,
    pub target_label: String,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NontoralRecord {
    pub table: u32,
    pub group: String,
    #[serde(skip)]
    pub ty: LieType,
    pub name: String,
    pub p: u32,
    pub rank: u32,
    pub distribution: Vec<(String, u64)>,
    pub dim_centralizer: i64,
    /// `column` when the table prints the dimension, `centralizer` when read off the centralizer.
    pub dim_source: String,
    pub alternative_name: String,
    pub auxiliary: String,
    pub centralizer_text: String,
    pub normalizer_text: String,
}

impl NontoralRecord {
    /// Character table group that resolves this row's labels.
    pub fn label_group(&self) -> &str {
        match self.group.as_str() {
            "E6" => "E6sc",
            "E7" => "E7sc",
            g => g,
        }
    }

    pub fn distribution_string(&self) -> String {
        self.distribution.iter().map(|(l, c)| format!("{}_{}", l, c)).collect::<Vec<_>>().join(" ")
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TotalsRecord {
    #[serde(serialize_with = "crate::serde_str::display")]
    pub group_type: LieType,
    pub toral_counts: Vec<u64>,
    /// Classes in the full automorphism group of the Lie algebra.
    pub total_classes2: u64,
    /// Classes in the adjoint group itself.
    pub group_total2: u64,
    pub nontoral_count2: u64,
}

/// All embedded tables.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Atlas {
    pub version: String,
    pub char_classes: Vec<CharClassRecord>,
    pub inclusions: Vec<InclusionRecord>,
    pub nontoral: Vec<NontoralRecord>,
    pub totals: Vec<TotalsRecord>,
}

/// Loads the embedded tables.
pub fn load_tables(version: &str) -> Result<Atlas> {
    if version != DATA_VERSION {
        return Err(schema("tables", 0, format!("unknown data version {}", version)));
    }
    Atlas::parse(CHAR_CLASSES, INCLUSIONS, NONTORAL, TOTALS)
}

/// Loads tables from a directory holding the files in [`TABLE_FILES`].
pub fn load_tables_from_dir(dir: &Path) -> Result<Atlas> {
    let read = |name: &str| {
        std::fs::read_to_string(dir.join(name)).map_err(|e| schema(name, 0, e.to_string()))
    };
    Atlas::parse(&read(TABLE_FILES[0])?, &read(TABLE_FILES[1])?, &read(TABLE_FILES[2])?, &read(TABLE_FILES[3])?)
}

fn schema(table: &str, line: usize, message: impl Into<String>) -> AtlasError {
    AtlasError::SchemaViolation { table: table.into(), line, message: message.into() }
}

fn smallest_prime_factor(n: u32) -> u32 {
    (2..=n).find(|d| n.is_multiple_of(*d)).unwrap_or(n)
}

/// Rows of a tab-separated table with their 1-based line numbers.
fn rows(table: &str, text: &str, width: usize) -> Result<Vec<(usize, Vec<String>)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.starts_with('#') || raw.trim().is_empty() {
            continue;
        }
        let mut cells: Vec<String> = raw.split('\t').map(|s| s.trim().to_string()).collect();
        if cells.len() > width {
            return Err(schema(table, line, format!("expected {} fields, found {}", width, cells.len())));
        }
        cells.resize(width, String::new());
        out.push((line, cells));
    }
    Ok(out)
}

/// The Lie type named by a group key such as `E6sc` or `E8`.
pub fn group_type(group: &str) -> Option<LieType> {
    let base = group.trim_end_matches("sc").trim_end_matches("ad");
    base.parse().ok()
}

/// The character-table group holding labels for a given root datum.
pub fn char_group(ty: LieType, isogeny: IsogenyKind) -> Option<String> {
    match (ty.family, ty.rank) {
        (Family::G, _) | (Family::F, _) | (Family::E, 8) => Some(ty.to_string()),
        (Family::E, 6) | (Family::E, 7) => match isogeny {
            IsogenyKind::SimplyConnected => Some(format!("{}sc", ty)),
            IsogenyKind::Adjoint => Some(format!("{}ad", ty)),
            _ => None,
        },
        _ => None,
    }
}

fn parse_num<T: std::str::FromStr>(table: &str, line: usize, field: &str, s: &str) -> Result<T> {
    s.parse().map_err(|_| schema(table, line, format!("bad {} '{}'", field, s)))
}

fn parse_distribution(table: &str, line: usize, s: &str) -> Result<Vec<(String, u64)>> {
    s.split_whitespace()
        .map(|term| {
            let (label, count) =
                term.split_once(':').ok_or_else(|| schema(table, line, format!("bad distribution term '{}'", term)))?;
            Ok((label.to_string(), parse_num(table, line, "count", count)?))
        })
        .collect()
}

impl Atlas {
    pub fn parse(chars: &str, inclusions: &str, nontoral: &str, totals: &str) -> Result<Atlas> {
        let mut atlas = Atlas {
            version: DATA_VERSION.to_string(),
            char_classes: Vec::new(),
            inclusions: Vec::new(),
            nontoral: Vec::new(),
            totals: Vec::new(),
        };
        let t = "char_classes";
        for (line, c) in rows(t, chars, 7)? {
            let ty = group_type(&c[0]).ok_or_else(|| schema(t, line, format!("unknown group {}", c[0])))?;
            let order: u32 = parse_num(t, line, "order", &c[2])?;
            let kind = match c[3].as_str() {
                "table" => RecordKind::Table,
                "alias" => RecordKind::Alias,
                k => return Err(schema(t, line, format!("unknown kind {}", k))),
            };
            let p = smallest_prime_factor(order) as u8;
            let cyc = |s: &str| Cyclotomic::parse(p, s).ok_or_else(|| schema(t, line, format!("bad character value '{}'", s)));
            let chi_l = cyc(&c[5])?;
            let chi_min = if c[6].is_empty() { None } else { Some(cyc(&c[6])?) };
            if atlas.char_classes.iter().any(|r| r.group == c[0] && r.label == c[1]) {
                return Err(schema(t, line, format!("duplicate label {} in {}", c[1], c[0])));
            }
            atlas.char_classes.push(CharClassRecord {
                group: c[0].clone(),
                ty,
                label: c[1].clone(),
                element_order: order,
                kind,
                centralizer_description: c[4].clone(),
                chi_l,
                chi_min,
            });
        }
        let t = "inclusions";
        for (line, c) in rows(t, inclusions, 5)? {
            atlas.inclusions.push(InclusionRecord {
                chain: parse_num(t, line, "chain", &c[0])?,
                source_group: c[1].clone(),
                source_label: c[2].clone(),
                target_group: c[3].clone(),
                target_label: c[4].clone(),
            });
        }
        let t = "nontoral";
        for (line, c) in rows(t, nontoral, 12)? {
            let ty = group_type(&c[1]).ok_or_else(|| schema(t, line, format!("unknown group {}", c[1])))?;
            let dim_source = c[7].clone();
            if dim_source != "column" && dim_source != "centralizer" {
                return Err(schema(t, line, format!("unknown dimension source {}", dim_source)));
            }
            atlas.nontoral.push(NontoralRecord {
                table: parse_num(t, line, "table", &c[0])?,
                group: c[1].clone(),
                ty,
                name: c[2].clone(),
                p: parse_num(t, line, "p", &c[3])?,
                rank: parse_num(t, line, "rank", &c[4])?,
                distribution: parse_distribution(t, line, &c[5])?,
                dim_centralizer: parse_num(t, line, "dim", &c[6])?,
                dim_source,
                alternative_name: c[8].clone(),
                auxiliary: c[9].clone(),
                centralizer_text: c[10].clone(),
                normalizer_text: c[11].clone(),
            });
        }
        let t = "totals";
        for (line, c) in rows(t, totals, 5)? {
            let ty = group_type(&c[0]).ok_or_else(|| schema(t, line, format!("unknown group {}", c[0])))?;
            let toral_counts = c[1]
                .split(',')
                .map(|x| parse_num(t, line, "toral count", x))
                .collect::<Result<Vec<u64>>>()?;
            atlas.totals.push(TotalsRecord {
                group_type: ty,
                toral_counts,
                total_classes2: parse_num(t, line, "total", &c[2])?,
                group_total2: parse_num(t, line, "group total", &c[3])?,
                nontoral_count2: parse_num(t, line, "non-toral count", &c[4])?,
            });
        }
        Ok(atlas)
    }

    pub fn group_rows(&self, group: &str) -> impl Iterator<Item = &CharClassRecord> {
        let g = group.to_string();
        self.char_classes.iter().filter(move |r| r.group == g)
    }

    /// Finds a label in a group, accepting the bare form of bracketed labels (`3E` for `3E[2]`).
    pub fn resolve(&self, group: &str, label: &str) -> Option<&CharClassRecord> {
        self.group_rows(group)
            .find(|r| r.label == label)
            .or_else(|| self.group_rows(group).find(|r| r.base_label() == label))
    }

    /// Label for an element signature. An exact match of both traces wins;
    /// otherwise a match up to a common Galois conjugation is accepted. Either
    /// way the match must be unique.
    pub fn match_label(
        &self,
        group: &str,
        order: u32,
        dim: i64,
        chi_l: &Cyclotomic,
        chi_min: Option<&Cyclotomic>,
    ) -> Option<String> {
        let p = chi_l.p();
        let candidates: Vec<&CharClassRecord> = self
            .group_rows(group)
            .filter(|r| r.element_order == order && r.prime() == p && r.centralizer_dim() == Some(dim))
            .collect();
        let fits = |r: &CharClassRecord, a: u32| {
            r.chi_l.galois(a) == *chi_l
                && match (&r.chi_min, chi_min) {
                    (Some(x), Some(y)) => x.galois(a) == *y,
                    _ => true,
                }
        };
        let exact: Vec<_> = candidates.iter().filter(|r| fits(r, 1)).collect();
        match exact.len() {
            1 => return Some(exact[0].label.clone()),
            0 => {}
            _ => return None,
        }
        let conj: Vec<_> = candidates.iter().filter(|r| (2..p as u32).any(|a| fits(r, a))).collect();
        (conj.len() == 1).then(|| conj[0].label.clone())
    }

    pub fn totals_for(&self, ty: LieType) -> Option<&TotalsRecord> {
        self.totals.iter().find(|t| t.group_type == ty)
    }

    /// Non-toral 2-subgroup rows counted against the adjoint group totals.
    pub fn nontoral_count2(&self, ty: LieType) -> u64 {
        let group = match (ty.family, ty.rank) {
            (Family::E, 7) => "E7ad".to_string(),
            _ => ty.to_string(),
        };
        self.nontoral.iter().filter(|r| r.p == 2 && r.group == group).count() as u64
    }
}

/// Result of the dimension formula on one non-toral row.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DimCheck {
    pub table: u32,
    pub group: String,
    pub name: String,
    pub expected: i64,
    /// Numerator and denominator of `(dim G + sum count * chi_L) / p^rank`.
    pub numerator: i64,
    pub denominator: i64,
    pub pass: bool,
}

/// Checks `dim C(E) = (dim G + sum_x chi_L(x)) / |E|` for one row.
pub fn verify_dimension_formula(rec: &NontoralRecord, atlas: &Atlas) -> Result<DimCheck> {
    let group = rec.label_group();
    let mut num = rec.ty.dim() as i64;
    for (label, count) in &rec.distribution {
        let row = atlas
            .resolve(group, label)
            .ok_or_else(|| AtlasError::UnresolvedLabel { group: group.to_string(), label: label.clone() })?;
        let chi = row
            .chi_l
            .as_integer()
            .ok_or_else(|| AtlasError::Internal(format!("irrational adjoint trace for {} {}", group, label)))?;
        num += *count as i64 * chi;
    }
    let den = (rec.p as i64).pow(rec.rank);
    Ok(DimCheck {
        table: rec.table,
        group: rec.group.clone(),
        name: rec.name.clone(),
        expected: rec.dim_centralizer,
        numerator: num,
        denominator: den,
        pass: num % den == 0 && num / den == rec.dim_centralizer,
    })
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SumCheck {
    pub table: u32,
    pub group: String,
    pub name: String,
    pub sum: u64,
    pub expected: u64,
    pub pass: bool,
}

pub fn verify_distribution_sums(atlas: &Atlas) -> Vec<SumCheck> {
    atlas
        .nontoral
        .iter()
        .map(|r| {
            let sum = r.distribution.iter().map(|(_, c)| c).sum();
            let expected = (r.p as u64).pow(r.rank) - 1;
            SumCheck { table: r.table, group: r.group.clone(), name: r.name.clone(), sum, expected, pass: sum == expected }
        })
        .collect()
}

pub fn verify_inclusion_labels(atlas: &Atlas) -> Result<()> {
    for inc in &atlas.inclusions {
        for (g, l) in [(&inc.source_group, &inc.source_label), (&inc.target_group, &inc.target_label)] {
            if !atlas.group_rows(g).any(|r| &r.label == l) {
                return Err(AtlasError::DanglingLabel { group: g.clone(), label: l.clone() });
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TotalsCheck {
    #[serde(serialize_with = "crate::serde_str::display")]
    pub group_type: LieType,
    pub toral_counts: Vec<u64>,
    pub expected_toral_counts: Vec<u64>,
    pub toral: u64,
    pub nontoral: u64,
    pub expected_total: u64,
    pub pass: bool,
}

/// Per-rank toral class counts for the adjoint form at `p`.
pub fn toral_counts(ty: LieType, p: u8) -> Result<Vec<u64>> {
    let rd = build_root_datum(ty, IsogenyKind::Adjoint)?;
    let g = ModMatrixGroup::weyl(&rd, p);
    let classes = classify_with(&g, p, ClassifyOptions { lexmin_limit: 0, ..Default::default() })?;
    Ok(classes.iter().map(|c| c.len() as u64).collect())
}

/// Toral plus non-toral class counts at `p = 2` against the published totals.
pub fn verify_totals(atlas: &Atlas) -> Result<Vec<TotalsCheck>> {
    let mut out = Vec::new();
    for rec in &atlas.totals {
        let counts = toral_counts(rec.group_type, 2)?;
        let toral: u64 = counts.iter().sum();
        let nontoral = atlas.nontoral_count2(rec.group_type);
        out.push(TotalsCheck {
            group_type: rec.group_type,
            pass: counts == rec.toral_counts && nontoral == rec.nontoral_count2 && toral + nontoral == rec.group_total2,
            toral_counts: counts,
            expected_toral_counts: rec.toral_counts.clone(),
            toral,
            nontoral,
            expected_total: rec.group_total2,
        });
    }
    Ok(out)
}

/// Per-group summary used by reports.
pub fn nontoral_by_group(atlas: &Atlas) -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    for r in &atlas.nontoral {
        *m.entry(r.group.clone()).or_insert(0) += 1;
    }
    m
}
