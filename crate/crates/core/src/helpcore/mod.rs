//! HeLP constraint systems for hypothetical torsion units.
//!
//! A unit `u` of order `n` is described by its partial augmentations
//! `ε_x(u)` on the classes of `G`. Once the partial augmentations of all
//! proper powers of `u` are fixed, every character value `χ(u^d)` and every
//! eigenvalue multiplicity is an affine function of the unknown `ε_x(u)`.

mod forms;
mod system;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::chartab::CharacterTable;
use crate::numtheory::divisors;

pub use forms::{AffineForm, Congruence, CycForm, LinearSystem};
pub use system::{
    build_system, candidate_classes, chi_of_power, eigen_bounds, multiplicity_form, BrauerSelection, CharRef,
    ChiValue, QuotientImage, SystemOptions,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HelpError {
    #[error("power chain for order {order} has no entry for level {level}")]
    MissingLevel { order: u64, level: u64 },
    #[error("brauer character for p = {prime} cannot be used for units of order {order}")]
    BrauerPrimeDivides { prime: u64, order: u64 },
    #[error("no {prime}-brauer table available")]
    NoBrauerTable { prime: u64 },
    #[error("character index {0} out of range")]
    NoCharacter(usize),
    #[error("{0}")]
    PPart(String),
    #[error("eigenvalue index {l} out of range for order {order}")]
    EigenIndex { l: u64, order: u64 },
}

/// Partial augmentations of a torsion unit of order `unit_order`; zero
/// entries are not stored.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PAVector {
    pub unit_order: u64,
    pub entries: BTreeMap<usize, i64>,
}

impl PAVector {
    pub fn new(unit_order: u64, entries: impl IntoIterator<Item = (usize, i64)>) -> Self {
        Self { unit_order, entries: entries.into_iter().filter(|&(_, v)| v != 0).collect() }
    }

    /// The partial augmentations of a group element of class `class`.
    pub fn indicator(unit_order: u64, class: usize) -> Self {
        Self::new(unit_order, [(class, 1)])
    }

    pub fn get(&self, class: usize) -> i64 {
        self.entries.get(&class).copied().unwrap_or(0)
    }

    pub fn augmentation(&self) -> i64 {
        self.entries.values().sum()
    }

    /// The class on which this vector is an indicator, if any.
    pub fn indicator_class(&self) -> Option<usize> {
        match self.entries.iter().next() {
            Some((&c, &1)) if self.entries.len() == 1 => Some(c),
            _ => None,
        }
    }

    pub fn is_indicator(&self) -> bool {
        self.indicator_class().is_some()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.values().all(|&v| v >= 0)
    }

    /// Dense values in the order of `classes`.
    pub fn values_on(&self, classes: &[usize]) -> Vec<i64> {
        classes.iter().map(|&c| self.get(c)).collect()
    }

    pub fn check_support(&self, table: &CharacterTable) -> bool {
        self.entries.keys().all(|&c| {
            c < table.classes.len()
                && self.unit_order.is_multiple_of(table.classes[c].element_order)
                && (c != 0 || self.unit_order == 1)
        })
    }
}

/// Partial augmentations of `u` and its powers for a unit of order `order`.
///
/// `levels[e]` describes `u^(order/e)`, a unit of order `e`. Level 1 is
/// implicit. An entry at level `order` is the unit itself.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PowerChain {
    pub order: u64,
    pub levels: BTreeMap<u64, PAVector>,
}

impl PowerChain {
    pub fn new(order: u64) -> Self {
        Self { order, levels: BTreeMap::new() }
    }

    /// The chain of an actual group element from class `class`.
    pub fn of_class(table: &CharacterTable, class: usize) -> Self {
        let n = table.classes[class].element_order;
        let mut chain = Self::new(n);
        for e in divisors(n).into_iter().filter(|&e| e > 1) {
            chain.levels.insert(e, PAVector::indicator(e, table.power_class(class, n / e)));
        }
        chain
    }

    pub fn level(&self, e: u64) -> Option<&PAVector> {
        self.levels.get(&e)
    }

    /// The vector of the unit itself, if solved.
    pub fn top(&self) -> Option<&PAVector> {
        self.levels.get(&self.order)
    }

    pub fn with_top(mut self, v: PAVector) -> Self {
        self.levels.insert(self.order, v);
        self
    }

    /// True when all proper levels `1 < e < order` are present.
    pub fn proper_levels_complete(&self) -> bool {
        divisors(self.order).into_iter().filter(|&e| e > 1 && e < self.order).all(|e| self.levels.contains_key(&e))
    }

    /// Every level is an indicator vector.
    pub fn is_trivial(&self) -> bool {
        self.levels.values().all(PAVector::is_indicator)
    }

    /// The chain of `u^(order/e)`, i.e. the levels dividing `e`.
    pub fn restrict(&self, e: u64) -> Self {
        Self { order: e, levels: self.levels.iter().filter(|(&k, _)| e.is_multiple_of(k)).map(|(&k, v)| (k, v.clone())).collect() }
    }
}
