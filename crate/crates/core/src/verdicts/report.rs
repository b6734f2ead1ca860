//! Report documents: one JSON object per group with every order report and
//! the derived verdicts. Keys appear in a fixed order.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{GroupReport, GroupVerdict, OrderReport, VerdictError};
use crate::chartab::CharacterTable;
use crate::helpcore::{PAVector, PowerChain};
use crate::intsolve::Completeness;

pub const REPORT_FORMAT_VERSION: u64 = 1;

/// Nonzero partial augmentations as `(class name, value)` in class order.
pub type PaDoc = Vec<(String, i64)>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelDoc {
    pub order: u64,
    pub partial_augmentations: PaDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurvivorDoc {
    pub trivial: bool,
    pub partial_augmentations: PaDoc,
    /// Proper powers `u^d`, by ascending order of `u^d`.
    pub powers: Vec<LevelDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderDoc {
    pub order: u64,
    pub chains_examined: u64,
    pub trivial_only: bool,
    pub completeness: Completeness,
    pub node_count: u64,
    pub survivors: Vec<SurvivorDoc>,
}

/// The options a report was produced with, for the record.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptionsDoc {
    pub congruences: bool,
    pub brauer: String,
    pub eigen_bounds: bool,
    pub node_cap: u64,
    pub fallback_bound: i64,
    pub fusion: Option<String>,
    pub p_part: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub format_version: u64,
    pub group_name: String,
    pub group_order: u64,
    pub options: OptionsDoc,
    pub complete: bool,
    pub orders: Vec<OrderDoc>,
    pub verdict: GroupVerdict,
}

pub fn pa_doc(table: &CharacterTable, v: &PAVector) -> PaDoc {
    v.entries.iter().map(|(&c, &e)| (table.classes[c].name.clone(), e)).collect()
}

fn pa_from(table: &CharacterTable, order: u64, doc: &PaDoc) -> Result<PAVector, VerdictError> {
    let mut entries = Vec::new();
    for (name, e) in doc {
        let c = table
            .class_index(name)
            .ok_or_else(|| VerdictError::Precondition(format!("report names unknown class {name}")))?;
        entries.push((c, *e));
    }
    let v = PAVector::new(order, entries);
    if !v.check_support(table) {
        return Err(VerdictError::Precondition(format!("report vector at order {order} has invalid support")));
    }
    Ok(v)
}

fn order_doc(table: &CharacterTable, r: &OrderReport) -> OrderDoc {
    OrderDoc {
        order: r.order,
        chains_examined: r.chains_examined,
        trivial_only: r.trivial_only,
        completeness: r.completeness,
        node_count: r.node_count,
        survivors: r
            .survivors
            .iter()
            .map(|c| SurvivorDoc {
                trivial: super::is_trivial_top(table, c),
                partial_augmentations: c.top().map(|v| pa_doc(table, v)).unwrap_or_default(),
                powers: c
                    .levels
                    .iter()
                    .filter(|(&e, _)| e < c.order)
                    .map(|(&e, v)| LevelDoc { order: e, partial_augmentations: pa_doc(table, v) })
                    .collect(),
            })
            .collect(),
    }
}

pub fn to_doc(table: &CharacterTable, report: &GroupReport, options: OptionsDoc) -> ReportDoc {
    ReportDoc {
        format_version: REPORT_FORMAT_VERSION,
        group_name: report.group_name.clone(),
        group_order: table.order,
        options,
        complete: report.complete(),
        orders: report.orders.values().map(|r| order_doc(table, r)).collect(),
        verdict: report.verdict.clone(),
    }
}

pub fn to_json(doc: &ReportDoc) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("report serializes");
    s.push('\n');
    s
}

/// Parses a report and rebuilds its order reports against `table`.
pub fn from_json(table: &CharacterTable, text: &str) -> Result<(ReportDoc, BTreeMap<u64, OrderReport>), VerdictError> {
    let doc: ReportDoc =
        serde_json::from_str(text).map_err(|e| VerdictError::Precondition(format!("report parse error: {e}")))?;
    if doc.format_version != REPORT_FORMAT_VERSION {
        return Err(VerdictError::Precondition(format!("unsupported report format_version {}", doc.format_version)));
    }
    if doc.group_name != table.group_name {
        return Err(VerdictError::Precondition(format!(
            "report is for {}, table is {}",
            doc.group_name, table.group_name
        )));
    }
    let mut out = BTreeMap::new();
    for o in &doc.orders {
        let mut survivors = Vec::new();
        for s in &o.survivors {
            let mut chain = PowerChain::new(o.order);
            for l in &s.powers {
                chain.levels.insert(l.order, pa_from(table, l.order, &l.partial_augmentations)?);
            }
            survivors.push(chain.with_top(pa_from(table, o.order, &s.partial_augmentations)?));
        }
        survivors.sort();
        out.insert(
            o.order,
            OrderReport {
                order: o.order,
                chains_examined: o.chains_examined,
                survivors,
                trivial_only: o.trivial_only,
                completeness: o.completeness,
                node_count: o.node_count,
            },
        );
    }
    Ok((doc, out))
}
