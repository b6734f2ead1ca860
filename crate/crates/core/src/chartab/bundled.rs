//! Tables shipped with the crate.

use std::sync::Arc;

use super::{load_table, CharacterTable, ClassFusion, TableError};

const TABLES: &[(&str, &str)] = &[
    ("C2", include_str!("../../tables/C2.json")),
    ("C3", include_str!("../../tables/C3.json")),
    ("C6", include_str!("../../tables/C6.json")),
    ("S3", include_str!("../../tables/S3.json")),
    ("D8", include_str!("../../tables/D8.json")),
    ("Q8", include_str!("../../tables/Q8.json")),
    ("A4", include_str!("../../tables/A4.json")),
    ("SL23", include_str!("../../tables/SL23.json")),
    ("S4", include_str!("../../tables/S4.json")),
    ("A5", include_str!("../../tables/A5.json")),
    ("S5", include_str!("../../tables/S5.json")),
    ("PSL27", include_str!("../../tables/PSL27.json")),
    ("S6", include_str!("../../tables/S6.json")),
    ("S7", include_str!("../../tables/S7.json")),
    ("PSL216", include_str!("../../tables/PSL216.json")),
    ("PSL33", include_str!("../../tables/PSL33.json")),
];

const FUSIONS: &[(&str, &str)] = &[
    ("SL23_to_A4", include_str!("../../tables/SL23_to_A4.fusion.json")),
    ("S4_to_S3", include_str!("../../tables/S4_to_S3.fusion.json")),
];

fn normalize(name: &str) -> String {
    name.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_uppercase()
}

/// Short names of the bundled tables, in ascending group order.
pub fn names() -> impl Iterator<Item = &'static str> {
    TABLES.iter().map(|(n, _)| *n)
}

/// Raw document of a bundled table. Accepts the short name or the group name
/// with punctuation ignored, so `"PSL(2,7)"` and `"psl27"` both resolve.
pub fn document(name: &str) -> Option<&'static str> {
    let key = normalize(name);
    TABLES.iter().find(|(n, _)| normalize(n) == key).map(|(_, d)| *d)
}

pub fn table(name: &str) -> Result<CharacterTable, TableError> {
    load_table(document(name).ok_or_else(|| TableError::UnknownBundled(name.to_string()))?)
}

/// Every bundled table, loaded and validated.
pub fn all() -> Vec<CharacterTable> {
    TABLES.iter().map(|(n, d)| load_table(d).unwrap_or_else(|e| panic!("bundled table {n}: {e}"))).collect()
}

pub fn fusion_names() -> impl Iterator<Item = &'static str> {
    FUSIONS.iter().map(|(n, _)| *n)
}

pub fn fusion_document(name: &str) -> Option<&'static str> {
    FUSIONS.iter().find(|(n, _)| *n == name).map(|(_, d)| *d)
}

/// A bundled fusion together with its bundled source and target tables.
pub fn fusion(name: &str) -> Result<ClassFusion, TableError> {
    let doc = fusion_document(name).ok_or_else(|| TableError::UnknownBundled(name.to_string()))?;
    let v: serde_json::Value = serde_json::from_str(doc)?;
    let side = |k: &str| -> Result<Arc<CharacterTable>, TableError> {
        let n = v[k].as_str().unwrap_or_default();
        Ok(Arc::new(table(n)?))
    };
    super::load_fusion(doc, side("source")?, side("target")?)
}
