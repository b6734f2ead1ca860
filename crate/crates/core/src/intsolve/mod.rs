//! Complete enumeration of the integer points of a [`LinearSystem`].
//!
//! Rational rows are scaled to integer rows over a [`SolverInt`] type.
//! Bounds come from interval propagation over the inequalities; the search
//! is a depth-first branch over a fixed variable order that re-propagates at
//! every node, including residue filtering for congruences with a single
//! unfixed variable.

mod oracle;

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::helpcore::LinearSystem;
use crate::scalar::SolverInt;

pub use oracle::oracle_enumerate;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("integer overflow in the solver scalar type")]
    Overflow,
    #[error("box of volume {volume} exceeds the oracle budget {budget}")]
    BoxTooLarge { volume: BigInt, budget: u64 },
    #[error("solution {0:?} fails re-verification against the source system")]
    Verification(Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Completeness {
    Complete,
    /// Some variable had no finite bound and the fallback box was used.
    BoundCapped,
    /// The node budget ran out; the solution list is partial.
    NodeCapped,
}

impl Completeness {
    pub fn is_complete(self) -> bool {
        self == Completeness::Complete
    }

    /// The weaker of two states.
    pub fn and(self, other: Self) -> Self {
        self.max(other)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    pub node_cap: u64,
    pub fallback_bound: i64,
    /// Propagation rounds at the root; nodes use a quarter of this.
    pub max_rounds: usize,
    pub parallel: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { node_cap: 100_000_000, fallback_bound: 128, max_rounds: 256, parallel: true }
    }
}

/// Inclusive per-variable bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntBox<T> {
    pub lower: Vec<T>,
    pub upper: Vec<T>,
}

impl<T: SolverInt> IntBox<T> {
    pub fn is_empty(&self) -> bool {
        self.lower.iter().zip(&self.upper).any(|(l, u)| l > u)
    }

    pub fn volume(&self) -> BigInt {
        if self.is_empty() {
            return BigInt::zero();
        }
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| u.to_bigint() - l.to_bigint() + BigInt::one())
            .product()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Propagated<T> {
    Infeasible,
    Finite { bounds: IntBox<T>, capped: bool },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionSet<T> {
    /// Sorted lexicographically, pairwise distinct.
    pub solutions: Vec<Vec<T>>,
    pub completeness: Completeness,
    pub node_count: u64,
}

#[derive(Debug, Clone)]
struct Row<T> {
    terms: Vec<(usize, T)>,
    constant: T,
}

#[derive(Debug, Clone)]
struct Cong<T> {
    terms: Vec<(usize, T)>,
    constant: T,
    modulus: T,
}

/// Integer form of a system: every equality contributes two rows.
struct Scaled<T> {
    n: usize,
    rows: Vec<Row<T>>,
    congs: Vec<Cong<T>>,
}

fn conv<T: SolverInt>(v: &BigInt) -> Result<T, SolveError> {
    T::from_bigint(v).ok_or(SolveError::Overflow)
}

fn add<T: SolverInt>(a: &T, b: &T) -> Result<T, SolveError> {
    a.checked_add(b).ok_or(SolveError::Overflow)
}

fn mul<T: SolverInt>(a: &T, b: &T) -> Result<T, SolveError> {
    a.checked_mul(b).ok_or(SolveError::Overflow)
}

impl<T: SolverInt> Scaled<T> {
    fn new(sys: &LinearSystem) -> Result<Self, SolveError> {
        let row = |f: &crate::helpcore::AffineForm, sign: i64| -> Result<Row<T>, SolveError> {
            let (c, coeffs, _) = f.to_integer();
            let s = BigInt::from(sign);
            Ok(Row {
                terms: coeffs.iter().map(|(&i, a)| Ok((i, conv(&(a * &s))?))).collect::<Result<_, _>>()?,
                constant: conv(&(c * &s))?,
            })
        };
        let mut rows = Vec::new();
        for f in &sys.eq {
            rows.push(row(f, 1)?);
            rows.push(row(f, -1)?);
        }
        for f in &sys.ge {
            rows.push(row(f, 1)?);
        }
        let mut congs = Vec::new();
        for c in &sys.cong {
            let (k, coeffs, l) = c.form.to_integer();
            congs.push(Cong {
                terms: coeffs.iter().map(|(&i, a)| Ok((i, conv(a)?))).collect::<Result<_, SolveError>>()?,
                constant: conv(&k)?,
                modulus: conv(&(&c.modulus * l))?,
            });
        }
        Ok(Self { n: sys.num_vars, rows, congs })
    }
}

type Dom<T> = (Vec<Option<T>>, Vec<Option<T>>);

/// Largest value of `a·x` over `[lo, hi]`, `None` if unbounded.
fn term_max<T: SolverInt>(a: &T, lo: &Option<T>, hi: &Option<T>) -> Result<Option<T>, SolveError> {
    let b = if a.is_positive() { hi } else { lo };
    b.as_ref().map(|b| mul(a, b)).transpose()
}

fn ceil_div<T: SolverInt>(a: &T, b: &T) -> T {
    -((-a.clone()).div_floor(b))
}

enum Step {
    Changed,
    Stable,
    Infeasible,
}

fn tighten_lo<T: SolverInt>(lo: &mut Option<T>, v: T) -> bool {
    match lo {
        Some(l) if *l >= v => false,
        _ => {
            *lo = Some(v);
            true
        }
    }
}

fn tighten_hi<T: SolverInt>(hi: &mut Option<T>, v: T) -> bool {
    match hi {
        Some(h) if *h <= v => false,
        _ => {
            *hi = Some(v);
            true
        }
    }
}

fn propagate_row<T: SolverInt>(row: &Row<T>, dom: &mut Dom<T>) -> Result<Step, SolveError> {
    let (lo, hi) = dom;
    let mut finite = row.constant.clone();
    let mut infinite = Vec::new();
    let mut maxes = Vec::with_capacity(row.terms.len());
    for (i, a) in &row.terms {
        let m = term_max(a, &lo[*i], &hi[*i])?;
        match &m {
            Some(v) => finite = add(&finite, v)?,
            None => infinite.push(*i),
        }
        maxes.push(m);
    }
    if infinite.len() > 1 {
        return Ok(Step::Stable);
    }
    if infinite.is_empty() && finite.is_negative() {
        return Ok(Step::Infeasible);
    }
    let mut changed = false;
    for ((i, a), m) in row.terms.iter().zip(&maxes) {
        // a·x_i ≥ -rest where rest is the max of everything else.
        let rest = match (m, infinite.first()) {
            (Some(v), None) => finite.clone() - v.clone(),
            (None, Some(_)) => finite.clone(),
            _ => continue,
        };
        if a.is_positive() {
            changed |= tighten_lo(&mut lo[*i], ceil_div(&-rest, a));
        } else {
            changed |= tighten_hi(&mut hi[*i], rest.div_floor(&-a.clone()));
        }
        if let (Some(l), Some(h)) = (&lo[*i], &hi[*i]) {
            if l > h {
                return Ok(Step::Infeasible);
            }
        }
    }
    Ok(if changed { Step::Changed } else { Step::Stable })
}

fn propagate_cong<T: SolverInt>(c: &Cong<T>, dom: &mut Dom<T>) -> Result<Step, SolveError> {
    let (lo, hi) = dom;
    let mut k = c.constant.clone();
    let mut free = None;
    for (i, a) in &c.terms {
        match (&lo[*i], &hi[*i]) {
            (Some(l), Some(h)) if l == h => k = add(&k, &mul(a, l)?)?,
            _ if free.is_none() => free = Some((*i, a.clone())),
            _ => return Ok(Step::Stable),
        }
    }
    let m = &c.modulus;
    let Some((i, a)) = free else {
        return Ok(if k.mod_floor(m).is_zero() { Step::Stable } else { Step::Infeasible });
    };
    // a·x ≡ -k (mod m)
    let g = a.gcd(m);
    let rhs = (-k).mod_floor(m);
    if !rhs.mod_floor(&g).is_zero() {
        return Ok(Step::Infeasible);
    }
    let mg = m.clone() / g.clone();
    if mg.is_one() {
        return Ok(Step::Stable);
    }
    let x0 = mul(&(rhs / g.clone()), &inverse(&(a / g).mod_floor(&mg), &mg))?.mod_floor(&mg);
    let mut changed = false;
    if let Some(l) = lo[i].clone() {
        let shift = (x0.clone() - l.clone()).mod_floor(&mg);
        changed |= tighten_lo(&mut lo[i], l + shift);
    }
    if let Some(h) = hi[i].clone() {
        let shift = (h.clone() - x0).mod_floor(&mg);
        changed |= tighten_hi(&mut hi[i], h - shift);
    }
    if let (Some(l), Some(h)) = (&lo[i], &hi[i]) {
        if l > h {
            return Ok(Step::Infeasible);
        }
    }
    Ok(if changed { Step::Changed } else { Step::Stable })
}

fn inverse<T: SolverInt>(a: &T, m: &T) -> T {
    let e = a.extended_gcd(m);
    e.x.mod_floor(m)
}

/// Runs all rows to a fixpoint or until `rounds` passes. `false` means
/// infeasible.
fn propagate<T: SolverInt>(s: &Scaled<T>, dom: &mut Dom<T>, rounds: usize) -> Result<bool, SolveError> {
    for _ in 0..rounds.max(1) {
        let mut changed = false;
        for r in &s.rows {
            match propagate_row(r, dom)? {
                Step::Infeasible => return Ok(false),
                Step::Changed => changed = true,
                Step::Stable => {}
            }
        }
        for c in &s.congs {
            match propagate_cong(c, dom)? {
                Step::Infeasible => return Ok(false),
                Step::Changed => changed = true,
                Step::Stable => {}
            }
        }
        if !changed {
            return Ok(true);
        }
    }
    Ok(true)
}

/// Finite bounds for every variable, or infeasibility.
pub fn bounds<T: SolverInt>(system: &LinearSystem, config: &SolverConfig) -> Result<Propagated<T>, SolveError> {
    let s = Scaled::<T>::new(system)?;
    root_bounds(&s, config)
}

fn root_bounds<T: SolverInt>(s: &Scaled<T>, config: &SolverConfig) -> Result<Propagated<T>, SolveError> {
    let mut dom: Dom<T> = (vec![None; s.n], vec![None; s.n]);
    if !propagate(s, &mut dom, config.max_rounds)? {
        return Ok(Propagated::Infeasible);
    }
    let b = T::from_i64(config.fallback_bound).ok_or(SolveError::Overflow)?;
    let mut capped = false;
    for i in 0..s.n {
        if dom.0[i].is_none() || dom.1[i].is_none() {
            capped = true;
            tighten_lo(&mut dom.0[i], -b.clone());
            tighten_hi(&mut dom.1[i], b.clone());
        }
    }
    if capped && !propagate(s, &mut dom, config.max_rounds)? {
        return Ok(Propagated::Infeasible);
    }
    let bounds = IntBox {
        lower: dom.0.into_iter().map(Option::unwrap).collect(),
        upper: dom.1.into_iter().map(Option::unwrap).collect(),
    };
    if bounds.is_empty() {
        return Ok(Propagated::Infeasible);
    }
    Ok(Propagated::Finite { bounds, capped })
}

struct Search<'a, T> {
    s: &'a Scaled<T>,
    order: &'a [usize],
    nodes: &'a AtomicU64,
    stop: &'a AtomicBool,
    cap: u64,
    rounds: usize,
}

impl<T: SolverInt> Search<'_, T> {
    fn run(&self, mut dom: Dom<T>, out: &mut Vec<Vec<T>>) -> Result<(), SolveError> {
        if self.stop.load(Ordering::Relaxed) {
            return Ok(());
        }
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.cap {
            self.stop.store(true, Ordering::Relaxed);
            return Ok(());
        }
        if !propagate(self.s, &mut dom, self.rounds)? {
            return Ok(());
        }
        let Some(&v) = self.order.iter().find(|&&i| dom.0[i] != dom.1[i]) else {
            // All fixed: propagation left every row and congruence intact.
            out.push(dom.0.into_iter().map(Option::unwrap).collect());
            return Ok(());
        };
        let (lo, hi) = (dom.0[v].clone().unwrap(), dom.1[v].clone().unwrap());
        let mut x = lo;
        while x <= hi {
            let mut child = dom.clone();
            child.0[v] = Some(x.clone());
            child.1[v] = Some(x.clone());
            self.run(child, out)?;
            x = x + T::one();
        }
        Ok(())
    }
}

/// The branching order: narrow domains first, then element order, then label.
fn branch_order<T: SolverInt>(sys: &LinearSystem, b: &IntBox<T>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..sys.num_vars).collect();
    let width = |i: usize| b.upper[i].to_bigint() - b.lower[i].to_bigint();
    order.sort_by(|&a, &c| {
        width(a)
            .cmp(&width(c))
            .then(sys.var_orders.get(a).cmp(&sys.var_orders.get(c)))
            .then(sys.var_labels.get(a).cmp(&sys.var_labels.get(c)))
    });
    order
}

/// All integer solutions of `system`, sorted, with a completeness flag.
pub fn enumerate<T: SolverInt>(system: &LinearSystem, config: &SolverConfig) -> Result<SolutionSet<T>, SolveError> {
    let s = Scaled::<T>::new(system)?;
    let (bounds, capped) = match root_bounds(&s, config)? {
        Propagated::Infeasible => {
            return Ok(SolutionSet { solutions: Vec::new(), completeness: Completeness::Complete, node_count: 1 })
        }
        Propagated::Finite { bounds, capped } => (bounds, capped),
    };
    let order = branch_order(system, &bounds);
    let nodes = AtomicU64::new(0);
    let stop = AtomicBool::new(false);
    let search = Search { s: &s, order: &order, nodes: &nodes, stop: &stop, cap: config.node_cap, rounds: (config.max_rounds / 4).max(4) };
    let dom: Dom<T> = (
        bounds.lower.iter().cloned().map(Some).collect(),
        bounds.upper.iter().cloned().map(Some).collect(),
    );

    let mut solutions = match order.iter().find(|&&i| bounds.lower[i] != bounds.upper[i]) {
        Some(&v) if config.parallel => {
            let mut values = Vec::new();
            let mut x = bounds.lower[v].clone();
            while x <= bounds.upper[v] {
                values.push(x.clone());
                x = x + T::one();
            }
            let parts: Vec<Result<Vec<Vec<T>>, SolveError>> = values
                .into_par_iter()
                .map(|x| {
                    let mut child = dom.clone();
                    child.0[v] = Some(x.clone());
                    child.1[v] = Some(x);
                    let mut out = Vec::new();
                    search.run(child, &mut out).map(|_| out)
                })
                .collect();
            let mut all = Vec::new();
            for p in parts {
                all.extend(p?);
            }
            all
        }
        _ => {
            let mut out = Vec::new();
            search.run(dom, &mut out)?;
            out
        }
    };
    solutions.sort();
    solutions.dedup();
    for x in &solutions {
        let big: Vec<BigInt> = x.iter().map(|v| v.to_bigint()).collect();
        if !system.satisfied_by(&big) {
            return Err(SolveError::Verification(big.iter().map(|v| v.to_string()).collect()));
        }
    }
    let completeness = if stop.load(Ordering::Relaxed) {
        Completeness::NodeCapped
    } else if capped {
        Completeness::BoundCapped
    } else {
        Completeness::Complete
    };
    Ok(SolutionSet { solutions, completeness, node_count: nodes.load(Ordering::Relaxed) })
}
