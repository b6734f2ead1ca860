//! Order-by-order enumeration of power chains and the verdicts derived from
//! the surviving partial augmentations.

mod kernel;
pub mod report;

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chartab::{CharacterTable, ClassFusion};
use crate::helpcore::{build_system, BrauerSelection, HelpError, PAVector, PowerChain, QuotientImage, SystemOptions};
use crate::intsolve::{enumerate, Completeness, SolveError, SolverConfig};
use crate::numtheory::{divisors, prime_divisors};

pub use kernel::{eigenvalue_profile, kernel_check, torsion_free_witness, EigenProfile, KernelCheck, Witness};

#[derive(Debug, Error)]
pub enum VerdictError {
    #[error(transparent)]
    Help(#[from] HelpError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("order {order} does not divide the exponent {exponent}")]
    NotDivisor { order: u64, exponent: u64 },
    #[error("no report for order {level}, needed for order {order}")]
    MissingLower { order: u64, level: u64 },
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("{0}")]
    Precondition(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

/// Knowledge about the image of `u` in a quotient `G/N`.
#[derive(Debug, Clone)]
pub struct QuotientData {
    pub fusion: ClassFusion,
    /// Surviving partial augmentations in `G/N` by unit order. Order 1 is
    /// implied.
    pub survivors: BTreeMap<u64, Vec<PAVector>>,
}

impl QuotientData {
    fn images(&self, n: u64) -> Vec<PAVector> {
        let mut out = vec![PAVector::indicator(1, 0)];
        for e in divisors(n).into_iter().filter(|&e| e > 1) {
            out.extend(self.survivors.get(&e).into_iter().flatten().cloned());
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct CheckOptions {
    pub congruences: bool,
    pub brauer: BrauerSelection,
    pub eigen_bounds: bool,
    pub solver: SolverConfig,
    pub quotient: Option<QuotientData>,
    pub p_part: Option<u64>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            congruences: true,
            brauer: BrauerSelection::All,
            eigen_bounds: true,
            solver: SolverConfig::default(),
            quotient: None,
            p_part: None,
        }
    }
}

/// Survivors at one unit order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderReport {
    pub order: u64,
    pub chains_examined: u64,
    /// Full chains, each with its top level set; sorted and distinct.
    pub survivors: Vec<PowerChain>,
    /// Every survivor is an indicator on a class of element order exactly `order`.
    pub trivial_only: bool,
    pub completeness: Completeness,
    pub node_count: u64,
}

impl OrderReport {
    pub fn complete(&self) -> bool {
        self.completeness.is_complete()
    }

    pub fn tops(&self) -> impl Iterator<Item = &PAVector> {
        self.survivors.iter().filter_map(PowerChain::top)
    }

    /// Survivors whose top vector is not the indicator of an element of this order.
    pub fn nontrivial<'a>(&'a self, table: &'a CharacterTable) -> impl Iterator<Item = &'a PowerChain> {
        self.survivors.iter().filter(move |c| !is_trivial_top(table, c))
    }
}

fn is_trivial_top(table: &CharacterTable, chain: &PowerChain) -> bool {
    chain
        .top()
        .and_then(PAVector::indicator_class)
        .is_some_and(|c| table.classes[c].element_order == chain.order)
}

/// Merges chains of the maximal proper powers; `None` if they disagree on a
/// shared level.
fn merge(n: u64, parts: &[&PowerChain]) -> Option<PowerChain> {
    let mut out = PowerChain::new(n);
    for part in parts {
        for (&e, v) in &part.levels {
            match out.levels.get(&e) {
                Some(w) if w != v => return None,
                Some(_) => {}
                None => {
                    out.levels.insert(e, v.clone());
                }
            }
        }
    }
    Some(out)
}

/// All compatible chains for units of order `n` built from the survivors at
/// the orders `n/p`.
fn candidate_chains(n: u64, lower: &BTreeMap<u64, OrderReport>) -> Result<Vec<PowerChain>, VerdictError> {
    let one = [PowerChain::new(1)];
    let mut pools: Vec<&[PowerChain]> = Vec::new();
    for p in prime_divisors(n) {
        let m = n / p;
        if m == 1 {
            pools.push(&one);
        } else {
            let r = lower.get(&m).ok_or(VerdictError::MissingLower { order: n, level: m })?;
            pools.push(&r.survivors);
        }
    }
    let mut partial: Vec<PowerChain> = vec![PowerChain::new(n)];
    for pool in pools {
        let mut next = Vec::new();
        for c in &partial {
            for s in pool {
                if let Some(m) = merge(n, &[c, s]) {
                    next.push(m);
                }
            }
        }
        partial = next;
    }
    partial.sort();
    partial.dedup();
    Ok(partial)
}

/// Survivors, completeness and node count of one solve.
type JobOutput = (Vec<PowerChain>, Completeness, u64);

/// Solves every chain at order `n` whose proper powers survived at lower orders.
pub fn enumerate_chains(
    table: &CharacterTable,
    n: u64,
    lower: &BTreeMap<u64, OrderReport>,
    opts: &CheckOptions,
) -> Result<OrderReport, VerdictError> {
    if n == 0 || !table.exponent.is_multiple_of(n) {
        return Err(VerdictError::NotDivisor { order: n, exponent: table.exponent });
    }
    let mut completeness = Completeness::Complete;
    for e in divisors(n).into_iter().filter(|&e| e > 1 && e < n) {
        let r = lower.get(&e).ok_or(VerdictError::MissingLower { order: n, level: e })?;
        completeness = completeness.and(r.completeness);
    }
    let chains = if n == 1 { vec![PowerChain::new(1)] } else { candidate_chains(n, lower)? };
    let images = match &opts.quotient {
        Some(q) => q.images(n).into_iter().map(Some).collect(),
        None => vec![None],
    };
    let jobs: Vec<(&PowerChain, &Option<PAVector>)> =
        chains.iter().flat_map(|c| images.iter().map(move |i| (c, i))).collect();

    let results: Vec<Result<JobOutput, VerdictError>> = jobs
        .par_iter()
        .map(|(chain, image)| {
            let p_part = match (opts.p_part, image) {
                (Some(p), Some(t)) if t.unit_order < n => Some(p),
                _ => None,
            };
            let sys_opts = SystemOptions {
                congruences: opts.congruences,
                brauer: opts.brauer.clone(),
                eigen_bounds: opts.eigen_bounds,
                quotient: match (&opts.quotient, image) {
                    (Some(q), Some(t)) => Some(QuotientImage { fusion: &q.fusion, image: t }),
                    _ => None,
                },
                p_part,
            };
            let sys = build_system(table, chain, &sys_opts)?;
            let sol = enumerate::<i64>(&sys, &opts.solver)?;
            let survivors = sol
                .solutions
                .iter()
                .map(|x| {
                    let top = PAVector::new(n, sys.var_classes.iter().copied().zip(x.iter().copied()));
                    (*chain).clone().with_top(top)
                })
                .collect();
            Ok((survivors, sol.completeness, sol.node_count))
        })
        .collect();

    let mut survivors = BTreeSet::new();
    let mut node_count = 0;
    for r in results {
        let (s, c, k) = r?;
        survivors.extend(s);
        completeness = completeness.and(c);
        node_count += k;
    }
    let survivors: Vec<PowerChain> = survivors.into_iter().collect();
    let trivial_only = survivors.iter().all(|c| is_trivial_top(table, c));

    if completeness.is_complete() && opts.quotient.is_none() && opts.p_part.is_none() {
        for (i, class) in table.classes.iter().enumerate() {
            if class.element_order == n && !survivors.contains(&PowerChain::of_class(table, i)) {
                return Err(VerdictError::Invariant(format!(
                    "the chain of a group element of class {} did not survive",
                    class.name
                )));
            }
        }
    }
    Ok(OrderReport { order: n, chains_examined: jobs.len() as u64, survivors, trivial_only, completeness, node_count })
}

/// Status of a conjecture after the enumeration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Status<K> {
    Proved,
    Open {
        /// Items with surviving counterexample candidates or incomplete runs.
        offending: Vec<K>,
        /// Items that were not examined at all.
        unexamined: Vec<K>,
    },
}

impl<K> Status<K> {
    pub fn is_proved(&self) -> bool {
        matches!(self, Status::Proved)
    }

    fn from_lists(offending: Vec<K>, unexamined: Vec<K>) -> Self {
        if offending.is_empty() && unexamined.is_empty() {
            Status::Proved
        } else {
            Status::Open { offending, unexamined }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeGraph {
    /// Edges `p-q` realized by group elements.
    pub group_edges: Vec<(u64, u64)>,
    /// Edges `p-q` that units may realize: group edges plus pairs with survivors.
    pub unit_edges: Vec<(u64, u64)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupVerdict {
    pub zc1_by_help: Status<u64>,
    pub sipc: Status<u64>,
    pub pq: Status<(u64, u64)>,
    pub prime_graph: PrimeGraph,
    pub kernel_findings: Vec<KernelCheck>,
}

impl GroupVerdict {
    /// zc1 ⇒ sipc ⇒ pq.
    pub fn implications_hold(&self) -> bool {
        (!self.zc1_by_help.is_proved() || self.sipc.is_proved()) && (!self.sipc.is_proved() || self.pq.is_proved())
    }
}

fn relevant_orders(table: &CharacterTable) -> Vec<u64> {
    divisors(table.exponent).into_iter().filter(|&n| n > 1).collect()
}

pub fn zc1_report(table: &CharacterTable, reports: &BTreeMap<u64, OrderReport>) -> Status<u64> {
    let (mut off, mut un) = (Vec::new(), Vec::new());
    for n in relevant_orders(table) {
        match reports.get(&n) {
            None => un.push(n),
            Some(r) if !r.trivial_only || !r.complete() => off.push(n),
            Some(_) => {}
        }
    }
    Status::from_lists(off, un)
}

pub fn sipc_report(table: &CharacterTable, reports: &BTreeMap<u64, OrderReport>) -> Status<u64> {
    let (mut off, mut un) = (Vec::new(), Vec::new());
    for n in relevant_orders(table).into_iter().filter(|&n| !table.has_element_order(n)) {
        match reports.get(&n) {
            None => un.push(n),
            Some(r) if !r.survivors.is_empty() || !r.complete() => off.push(n),
            Some(_) => {}
        }
    }
    Status::from_lists(off, un)
}

fn prime_pairs(table: &CharacterTable) -> Vec<(u64, u64)> {
    let ps = table.primes();
    let mut out = Vec::new();
    for (i, &p) in ps.iter().enumerate() {
        for &q in &ps[i + 1..] {
            out.push((p, q));
        }
    }
    out
}

pub fn pq_report(table: &CharacterTable, reports: &BTreeMap<u64, OrderReport>) -> (Status<(u64, u64)>, PrimeGraph) {
    let (mut off, mut un) = (Vec::new(), Vec::new());
    let mut graph = PrimeGraph { group_edges: Vec::new(), unit_edges: Vec::new() };
    for (p, q) in prime_pairs(table) {
        if table.has_element_order(p * q) {
            graph.group_edges.push((p, q));
            graph.unit_edges.push((p, q));
            continue;
        }
        match reports.get(&(p * q)) {
            None => {
                un.push((p, q));
                graph.unit_edges.push((p, q));
            }
            Some(r) if !r.survivors.is_empty() || !r.complete() => {
                off.push((p, q));
                graph.unit_edges.push((p, q));
            }
            Some(_) => {}
        }
    }
    (Status::from_lists(off, un), graph)
}

/// All reports for a table: the requested orders and every divisor they need.
#[derive(Debug, Clone)]
pub struct GroupReport {
    pub group_name: String,
    pub orders: BTreeMap<u64, OrderReport>,
    pub verdict: GroupVerdict,
}

impl GroupReport {
    pub fn complete(&self) -> bool {
        self.orders.values().all(OrderReport::complete)
    }
}

/// Runs the enumeration for `orders` (all divisors of the exponent when
/// `None`) and derives the verdicts.
pub fn run_check(
    table: &CharacterTable,
    orders: Option<&[u64]>,
    opts: &CheckOptions,
) -> Result<GroupReport, VerdictError> {
    let requested: Vec<u64> = match orders {
        Some(o) => o.to_vec(),
        None => relevant_orders(table),
    };
    let mut needed = BTreeSet::new();
    for &n in &requested {
        if n == 0 || !table.exponent.is_multiple_of(n) {
            return Err(VerdictError::NotDivisor { order: n, exponent: table.exponent });
        }
        needed.extend(divisors(n).into_iter().filter(|&e| e > 1));
    }
    let mut reports = BTreeMap::new();
    for n in needed {
        let r = enumerate_chains(table, n, &reports, opts)?;
        reports.insert(n, r);
    }
    let mut kernel_findings = Vec::new();
    for (&r, rep) in &reports {
        if !crate::numtheory::is_prime(r) {
            continue;
        }
        for chi in 1..table.characters.len() {
            kernel_findings.push(kernel_check(table, rep, chi)?);
        }
    }
    let (pq, prime_graph) = pq_report(table, &reports);
    let verdict = GroupVerdict {
        zc1_by_help: zc1_report(table, &reports),
        sipc: sipc_report(table, &reports),
        pq,
        prime_graph,
        kernel_findings,
    };
    if !verdict.implications_hold() {
        return Err(VerdictError::Invariant("zc1 => sipc => pq fails".into()));
    }
    Ok(GroupReport { group_name: table.group_name.clone(), orders: reports, verdict })
}
