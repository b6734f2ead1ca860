//! Character tables, Brauer sub-tables and class fusions.
//!
//! Tables are validated on load and immutable afterwards. Class and
//! character order is the order of the source document.

pub mod bundled;
mod load;

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::cyclotomic::CycError;
use crate::numtheory::{gcd, prime_divisors};
use crate::Cyc;

pub use load::{load_fusion, load_fusion_file, load_table, load_table_file, FUSION_FORMAT_VERSION, TABLE_FORMAT_VERSION};

#[derive(Debug, Error)]
pub enum TableError {
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("unsupported format_version {0}")]
    FormatVersion(u64),
    #[error("invalid value for {character} at class {class}: {source}")]
    Value { character: String, class: String, source: CycError },
    #[error("unknown class name '{0}'")]
    UnknownClass(String),
    #[error("duplicate class name '{0}'")]
    DuplicateClass(String),
    #[error("first class must be the identity (order 1, size 1)")]
    Identity,
    #[error("class sizes sum to {sum}, expected group order {order}")]
    ClassSizes { sum: u64, order: u64 },
    #[error("class {class}: size {size} does not divide the group order")]
    SizeDivides { class: String, size: u64 },
    #[error("stated exponent {stated} differs from lcm of element orders {computed}")]
    Exponent { stated: u64, computed: u64 },
    #[error("table is not square: {classes} classes, {characters} characters")]
    NotSquare { classes: usize, characters: usize },
    #[error("character {character} has {found} values, expected {expected}")]
    ValueCount { character: String, found: usize, expected: usize },
    #[error("degree mismatch for {character}: degree {degree}, value at identity {value}")]
    DegreeMismatch { character: String, degree: u64, value: String },
    #[error("power map of class {class} at prime {prime}: {reason}")]
    PowerMap { class: String, prime: u64, reason: String },
    #[error("value of {character} at class {class} has conductor {conductor} not dividing the element order")]
    Conductor { character: String, class: String, conductor: u64 },
    #[error("row orthogonality fails for characters {first} and {second}")]
    RowOrthogonality { first: String, second: String },
    #[error("column orthogonality fails for classes {first} and {second}")]
    ColumnOrthogonality { first: String, second: String },
    #[error("sum of squared degrees is {sum}, expected {order}")]
    DegreeSquares { sum: u64, order: u64 },
    #[error("galois inconsistency: class {class} raised to {k} matches no class")]
    Galois { class: String, k: u64 },
    #[error("galois inconsistency for {character}: value at {class}^{k} is not the conjugate")]
    GaloisValue { character: String, class: String, k: u64 },
    #[error("brauer table for p = {prime}: {reason}")]
    Brauer { prime: u64, reason: String },
    #[error("fusion: {0}")]
    Fusion(String),
    #[error("no bundled table named '{0}'")]
    UnknownBundled(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugacyClass {
    pub name: String,
    pub element_order: u64,
    pub size: u64,
    /// Class index of `x^p` for every prime `p` dividing the exponent.
    pub power_map: BTreeMap<u64, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Character {
    pub name: String,
    pub degree: u64,
    pub values: Vec<Cyc>,
}

/// Irreducible `p`-Brauer characters on the `p`-regular classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrauerTable {
    pub prime: u64,
    /// Indices into the ordinary class list, ascending.
    pub classes: Vec<usize>,
    pub characters: Vec<Character>,
}

impl BrauerTable {
    /// Value of `character` at ordinary class `class`, if that class is `p`-regular.
    pub fn value(&self, character: usize, class: usize) -> Option<&Cyc> {
        let pos = self.classes.binary_search(&class).ok()?;
        Some(&self.characters[character].values[pos])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterTable {
    pub group_name: String,
    pub order: u64,
    pub exponent: u64,
    pub classes: Vec<ConjugacyClass>,
    pub characters: Vec<Character>,
    pub brauer: BTreeMap<u64, BrauerTable>,
    /// `galois[c][k]` is the class of `x^k` for `x ∈ c` and `k` a unit mod
    /// the element order, `usize::MAX` otherwise.
    galois: Vec<Vec<usize>>,
}

impl CharacterTable {
    pub fn class_index(&self, name: &str) -> Option<usize> {
        self.classes.iter().position(|c| c.name == name)
    }

    pub fn character_index(&self, name: &str) -> Option<usize> {
        self.characters.iter().position(|c| c.name == name)
    }

    pub fn element_orders(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.classes.iter().map(|c| c.element_order).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn has_element_order(&self, n: u64) -> bool {
        self.classes.iter().any(|c| c.element_order == n)
    }

    /// Prime divisors of the group order.
    pub fn primes(&self) -> Vec<u64> {
        prime_divisors(self.order)
    }

    pub fn value(&self, character: usize, class: usize) -> &Cyc {
        &self.characters[character].values[class]
    }

    /// Class of `x^m` for `x` in class `class`.
    pub fn power_class(&self, class: usize, m: u64) -> usize {
        let o = self.classes[class].element_order;
        let r = m % o;
        if r == 0 {
            return 0;
        }
        let g = gcd(r, o);
        let mut c = class;
        let mut rest = g;
        for p in prime_divisors(g) {
            while rest.is_multiple_of(p) {
                c = self.classes[c].power_map[&p];
                rest /= p;
            }
        }
        let k = (r / g) % (o / g);
        if k <= 1 {
            return c;
        }
        self.galois[c][k as usize]
    }

    /// True iff every value of the character is rational.
    pub fn is_rational(&self, character: usize) -> bool {
        self.characters[character].values.iter().all(Cyc::is_rational)
    }

    /// True iff the character has trivial kernel, i.e. its value differs
    /// from the degree on every non-identity class.
    pub fn is_faithful(&self, character: usize) -> bool {
        let chi = &self.characters[character];
        chi.values.iter().skip(1).all(|v| v != &chi.values[0])
    }
}

/// Class map from a group `G` onto a quotient `G/N`.
#[derive(Debug, Clone)]
pub struct ClassFusion {
    pub source: Arc<CharacterTable>,
    pub target: Arc<CharacterTable>,
    pub map: Vec<usize>,
    /// Set when `N` is known to be a `p`-group.
    pub kernel_p_group: Option<u64>,
}

impl ClassFusion {
    pub fn kernel_order(&self) -> u64 {
        self.source.order / self.target.order
    }
}
