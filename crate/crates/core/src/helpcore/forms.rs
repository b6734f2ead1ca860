use std::collections::{BTreeMap, HashSet};
use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::{Cyc, Rational};

/// `constant + Σ coefficients[i]·x_i` with rational coefficients.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AffineForm {
    pub constant: Rational,
    /// Never contains zero entries.
    pub coefficients: BTreeMap<usize, Rational>,
}

impl AffineForm {
    pub fn constant(c: Rational) -> Self {
        Self { constant: c, coefficients: BTreeMap::new() }
    }

    pub fn variable(i: usize) -> Self {
        let mut f = Self::default();
        f.add_term(i, Rational::one());
        f
    }

    pub fn add_term(&mut self, i: usize, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.coefficients.entry(i).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.coefficients.remove(&i);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut f = self.clone();
        f.constant += &other.constant;
        for (&i, c) in &other.coefficients {
            f.add_term(i, c.clone());
        }
        f
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::default();
        }
        Self {
            constant: &self.constant * q,
            coefficients: self.coefficients.iter().map(|(&i, c)| (i, c * q)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn is_constant(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn max_var(&self) -> Option<usize> {
        self.coefficients.keys().next_back().copied()
    }

    pub fn evaluate(&self, x: &[BigInt]) -> Rational {
        let mut acc = self.constant.clone();
        for (&i, c) in &self.coefficients {
            acc += c * Rational::from_integer(x[i].clone());
        }
        acc
    }

    /// Least common multiple of all denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.coefficients.values().chain(std::iter::once(&self.constant)).fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// The integer form `L·self` for `L` the denominator lcm, as
    /// `(constant, coefficients)`.
    pub fn to_integer(&self) -> (BigInt, BTreeMap<usize, BigInt>, BigInt) {
        let l = self.denominator_lcm();
        let lift = |c: &Rational| (c * Rational::from_integer(l.clone())).to_integer();
        (lift(&self.constant), self.coefficients.iter().map(|(&i, c)| (i, lift(c))).collect(), l)
    }

    /// Positive multiple with coprime integer coefficients; used to detect
    /// equivalent inequalities.
    fn primitive(&self) -> Self {
        let (c, coeffs, _) = self.to_integer();
        let g = coeffs.values().fold(c.abs(), |g, a| g.gcd(a));
        if g.is_zero() {
            return Self::default();
        }
        Self {
            constant: Rational::from_integer(c / &g),
            coefficients: coeffs.into_iter().map(|(i, a)| (i, Rational::from_integer(a / &g))).collect(),
        }
    }
}

impl fmt::Display for AffineForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (&i, c) in &self.coefficients {
            if c.is_negative() {
                write!(f, "{}{}*x{i}", if first { "-" } else { " - " }, -c)?;
            } else {
                write!(f, "{}{c}*x{i}", if first { "" } else { " + " })?;
            }
            first = false;
        }
        if first {
            write!(f, "{}", self.constant)
        } else if self.constant.is_negative() {
            write!(f, " - {}", -&self.constant)
        } else if !self.constant.is_zero() {
            write!(f, " + {}", self.constant)
        } else {
            Ok(())
        }
    }
}

/// `form ≡ 0 (mod modulus)`, normalized to integer coefficients reduced
/// into `[0, modulus)` with no common factor.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Congruence {
    pub form: AffineForm,
    pub modulus: BigInt,
}

impl Congruence {
    /// `None` when the congruence holds for every integer point.
    pub fn new(form: &AffineForm, modulus: BigInt) -> Option<Self> {
        let (c, coeffs, l) = form.to_integer();
        let m = modulus * l;
        let red = |a: &BigInt| a.mod_floor(&m);
        let c = red(&c);
        let coeffs: BTreeMap<usize, BigInt> =
            coeffs.iter().map(|(&i, a)| (i, red(a))).filter(|(_, a)| !a.is_zero()).collect();
        let g = coeffs.values().fold(c.gcd(&m), |g, a| g.gcd(a));
        let m = &m / &g;
        if m.is_one() {
            return None;
        }
        Some(Self {
            form: AffineForm {
                constant: Rational::from_integer(c / &g),
                coefficients: coeffs.into_iter().map(|(i, a)| (i, Rational::from_integer(a / &g))).collect(),
            },
            modulus: m,
        })
    }

    pub fn holds(&self, x: &[BigInt]) -> bool {
        let v = self.form.evaluate(x);
        v.is_integer() && v.to_integer().mod_floor(&self.modulus).is_zero()
    }
}

/// `constant + Σ coefficients[i]·x_i` with cyclotomic coefficients.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CycForm {
    pub constant: Cyc,
    pub coefficients: BTreeMap<usize, Cyc>,
}

impl CycForm {
    pub fn mul_cyc(&self, a: &Cyc) -> Self {
        Self {
            constant: &self.constant * a,
            coefficients: self
                .coefficients
                .iter()
                .map(|(&i, c)| (i, c * a))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    /// Coefficient-wise trace from `Q(ζ_m)` to `Q`.
    pub fn trace_over(&self, m: u64) -> AffineForm {
        let tr = |c: &Cyc| c.trace_over(m).expect("form lies in the field");
        let mut f = AffineForm::constant(tr(&self.constant));
        for (&i, c) in &self.coefficients {
            f.add_term(i, tr(c));
        }
        f
    }

    pub fn evaluate(&self, x: &[BigInt]) -> Cyc {
        let mut acc = self.constant.clone();
        for (&i, c) in &self.coefficients {
            acc = &acc + &c.scale(&Rational::from_integer(x[i].clone()));
        }
        acc
    }
}

/// An integer feasibility problem in the partial augmentations of the
/// candidate classes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinearSystem {
    pub unit_order: u64,
    pub num_vars: usize,
    /// Class names of the variables.
    pub var_labels: Vec<String>,
    /// Class index of each variable in the source table.
    pub var_classes: Vec<usize>,
    /// Element order of each variable's class; used as a branching tiebreak.
    pub var_orders: Vec<u64>,
    pub eq: Vec<AffineForm>,
    pub ge: Vec<AffineForm>,
    pub cong: Vec<Congruence>,
    seen: HashSet<(u8, AffineForm, BigInt)>,
}

impl LinearSystem {
    /// A system over `labels.len()` variables with no constraints.
    pub fn new(labels: Vec<String>) -> Self {
        let n = labels.len();
        Self {
            num_vars: n,
            var_classes: (0..n).collect(),
            var_orders: vec![1; n],
            var_labels: labels,
            ..Default::default()
        }
    }

    fn fresh(&mut self, kind: u8, f: &AffineForm, m: BigInt) -> bool {
        assert!(f.max_var().is_none_or(|v| v < self.num_vars), "form references an unknown variable");
        self.seen.insert((kind, f.clone(), m))
    }

    /// Adds `f = 0`. Constant constraints that hold are dropped.
    pub fn push_eq(&mut self, f: AffineForm) {
        if f.is_constant() && f.constant.is_zero() {
            return;
        }
        let p = f.primitive();
        let key = if p.coefficients.values().next().is_some_and(|c| c.is_negative()) { p.neg() } else { p };
        if self.fresh(0, &key, BigInt::zero()) {
            self.eq.push(f);
        }
    }

    /// Adds `f ≥ 0`. Constant constraints that hold are dropped.
    pub fn push_ge(&mut self, f: AffineForm) {
        if f.is_constant() && !f.constant.is_negative() {
            return;
        }
        if self.fresh(1, &f.primitive(), BigInt::zero()) {
            self.ge.push(f);
        }
    }

    /// Adds `f ≡ 0 (mod m)`.
    pub fn push_cong(&mut self, f: &AffineForm, m: BigInt) {
        if let Some(c) = Congruence::new(f, m) {
            if self.fresh(2, &c.form, c.modulus.clone()) {
                self.cong.push(c);
            }
        }
    }

    pub fn satisfied_by(&self, x: &[BigInt]) -> bool {
        x.len() == self.num_vars
            && self.eq.iter().all(|f| f.evaluate(x).is_zero())
            && self.ge.iter().all(|f| !f.evaluate(x).is_negative())
            && self.cong.iter().all(|c| c.holds(x))
    }

    pub fn satisfied_by_i64(&self, x: &[i64]) -> bool {
        self.satisfied_by(&x.iter().map(|&v| BigInt::from(v)).collect::<Vec<_>>())
    }

    /// One constraint per line with exact rationals.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# unit order {}, {} variables", self.unit_order, self.num_vars);
        for (i, l) in self.var_labels.iter().enumerate() {
            let _ = writeln!(s, "var x{i} = {l}");
        }
        for f in &self.eq {
            let _ = writeln!(s, "{f} = 0");
        }
        for f in &self.ge {
            let _ = writeln!(s, "{f} >= 0");
        }
        for c in &self.cong {
            let _ = writeln!(s, "{} == 0 mod {}", c.form, c.modulus);
        }
        s
    }
}
