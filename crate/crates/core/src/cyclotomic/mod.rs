//! Exact arithmetic in cyclotomic fields `Q(ζ_n)`.
//!
//! A [`Cyclotomic`] is stored in the Zumbroich normal form over its conductor:
//! the coefficient map is taken with respect to the Zumbroich basis of
//! `Q(ζ_n)` and `n` is the smallest integer such that the value lies in
//! `Q(ζ_n)`. Both properties are restored after every operation, so two values
//! are equal exactly when their stored forms are identical.

mod parse;
mod zumbroich;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Ratio;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::numtheory::{gcd, lcm, moebius, phi};
use crate::scalar::Scalar;

pub use parse::parse_cyclotomic;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("zero denominator at position {position}")]
    ZeroDenominator { position: usize },
    #[error("root of unity of order 0")]
    ZeroOrder,
    #[error("exponent {k} is not coprime to conductor {conductor}")]
    NotCoprime { k: i64, conductor: u64 },
    #[error("value of conductor {conductor} does not lie in Q(zeta_{field})")]
    NotInField { conductor: u64, field: u64 },
}

/// An element `Σ c_k ζ_n^k` of a cyclotomic field, in canonical form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cyclotomic<T: Scalar> {
    conductor: u64,
    coeffs: BTreeMap<u64, Ratio<T>>,
}

impl<T: Scalar> Cyclotomic<T> {
    pub fn zero() -> Self {
        Self { conductor: 1, coeffs: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::from_rational(Ratio::one())
    }

    pub fn from_rational(q: Ratio<T>) -> Self {
        let mut coeffs = BTreeMap::new();
        if !q.is_zero() {
            coeffs.insert(0, q);
        }
        Self { conductor: 1, coeffs }
    }

    pub fn from_integer(value: i64) -> Self {
        Self::from_rational(Ratio::from_integer(
            T::from_i64(value).expect("integer fits the scalar type"),
        ))
    }

    /// `ζ_n^k` in canonical form.
    pub fn root_of_unity(n: u64, k: i64) -> Result<Self, CycError> {
        if n == 0 {
            return Err(CycError::ZeroOrder);
        }
        let e = k.rem_euclid(n as i64) as u64;
        let mut dense = vec![Ratio::zero(); n as usize];
        dense[e as usize] = Ratio::one();
        Ok(Self::from_dense(n, dense))
    }

    /// Builds the canonical form of `Σ dense[k] ζ_n^k`.
    pub(crate) fn from_dense(n: u64, mut dense: Vec<Ratio<T>>) -> Self {
        debug_assert_eq!(dense.len() as u64, n);
        zumbroich::reduce(n, &mut dense);
        let (n, dense) = zumbroich::descend(n, dense);
        let coeffs = dense
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k as u64, c))
            .collect::<BTreeMap<_, _>>();
        let conductor = if coeffs.is_empty() { 1 } else { n };
        Self { conductor, coeffs }
    }

    /// Dense coefficient vector of this value over `Q(ζ_n)`; requires
    /// `conductor | n`. The vector is not reduced to the basis of `Q(ζ_n)`.
    fn embed(&self, n: u64, dense: &mut [Ratio<T>], scale: &Ratio<T>) {
        debug_assert_eq!(n % self.conductor, 0);
        let step = n / self.conductor;
        for (&k, c) in &self.coeffs {
            let idx = ((k * step) % n) as usize;
            dense[idx] = dense[idx].clone() + c.clone() * scale.clone();
        }
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// Nonzero coefficients with respect to the Zumbroich basis of the
    /// conductor, by ascending exponent.
    pub fn coefficients(&self) -> impl Iterator<Item = (u64, &Ratio<T>)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_rational(&self) -> bool {
        self.conductor == 1
    }

    pub fn to_rational(&self) -> Option<Ratio<T>> {
        if self.conductor != 1 {
            return None;
        }
        Some(self.coeffs.get(&0).cloned().unwrap_or_else(Ratio::zero))
    }

    pub fn scale(&self, q: &Ratio<T>) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        Self {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|(k, c)| (*k, c.clone() * q.clone())).collect(),
        }
    }

    fn combine(&self, other: &Self, sign: &Ratio<T>) -> Self {
        let n = lcm(self.conductor, other.conductor);
        let mut dense = vec![Ratio::zero(); n as usize];
        self.embed(n, &mut dense, &Ratio::one());
        other.embed(n, &mut dense, sign);
        Self::from_dense(n, dense)
    }

    pub fn add(&self, other: &Self) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        self.combine(other, &Ratio::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        self.combine(other, &-Ratio::<T>::one())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Ratio::<T>::one())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if let Some(q) = other.to_rational() {
            return self.scale(&q);
        }
        if let Some(q) = self.to_rational() {
            return other.scale(&q);
        }
        let n = lcm(self.conductor, other.conductor);
        let (sa, sb) = (n / self.conductor, n / other.conductor);
        let mut dense = vec![Ratio::zero(); n as usize];
        for (&ka, ca) in &self.coeffs {
            for (&kb, cb) in &other.coeffs {
                let idx = ((ka * sa + kb * sb) % n) as usize;
                dense[idx] = dense[idx].clone() + ca.clone() * cb.clone();
            }
        }
        Self::from_dense(n, dense)
    }

    /// Image under the field automorphism `ζ ↦ ζ^k`.
    pub fn galois(&self, k: i64) -> Result<Self, CycError> {
        let n = self.conductor;
        let kk = k.rem_euclid(n as i64) as u64;
        if gcd(kk, n) != 1 {
            return Err(CycError::NotCoprime { k, conductor: n });
        }
        if n == 1 {
            return Ok(self.clone());
        }
        let mut dense = vec![Ratio::zero(); n as usize];
        for (&e, c) in &self.coeffs {
            dense[((e * kk) % n) as usize] = c.clone();
        }
        Ok(Self::from_dense(n, dense))
    }

    /// Complex conjugate, i.e. the Galois image for `k = -1`.
    pub fn conj(&self) -> Self {
        self.galois(-1).expect("-1 is a unit modulo every conductor")
    }

    /// Trace from `Q(ζ_c)` to `Q`, `c` the conductor. Computed term-wise with
    /// Ramanujan sums, `Tr(ζ_c^e) = μ(c/g) φ(c) / φ(c/g)` for `g = gcd(e, c)`.
    pub fn trace_to_rational(&self) -> Ratio<T> {
        let n = self.conductor;
        let mut acc = Ratio::zero();
        for (&e, c) in &self.coeffs {
            let g = gcd(e, n);
            let r = moebius(n / g) * (phi(n) / phi(n / g)) as i64;
            if r != 0 {
                acc = acc + c.clone() * Ratio::from_integer(T::from_i64(r).unwrap());
            }
        }
        acc
    }

    /// Trace from `Q(ζ_m)` to `Q`; the value must lie in `Q(ζ_m)`.
    pub fn trace_over(&self, m: u64) -> Result<Ratio<T>, CycError> {
        if m == 0 || !m.is_multiple_of(self.conductor) {
            return Err(CycError::NotInField { conductor: self.conductor, field: m });
        }
        let degree = phi(m) / phi(self.conductor);
        Ok(self.trace_to_rational() * Ratio::from_integer(T::from_u64(degree).unwrap()))
    }

    /// Sum of all Galois conjugates over the conductor. Agrees with
    /// [`Self::trace_to_rational`]; kept as an independent route.
    pub fn galois_orbit_sum(&self) -> Self {
        let n = self.conductor;
        let mut acc = Self::zero();
        for k in 1..=n.max(1) {
            if gcd(k, n) == 1 {
                acc = &acc + &self.galois(k as i64).unwrap();
            }
        }
        acc
    }
}

impl<T: Scalar> Default for Cyclotomic<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Scalar> fmt::Debug for Cyclotomic<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyclotomic({self})")
    }
}

impl<T: Scalar> From<Ratio<T>> for Cyclotomic<T> {
    fn from(q: Ratio<T>) -> Self {
        Self::from_rational(q)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl<T: Scalar> $trait<&Cyclotomic<T>> for &Cyclotomic<T> {
            type Output = Cyclotomic<T>;
            fn $method(self, rhs: &Cyclotomic<T>) -> Cyclotomic<T> {
                Cyclotomic::$method(self, rhs)
            }
        }
        impl<T: Scalar> $trait for Cyclotomic<T> {
            type Output = Cyclotomic<T>;
            fn $method(self, rhs: Cyclotomic<T>) -> Cyclotomic<T> {
                Cyclotomic::$method(&self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl<T: Scalar> Neg for &Cyclotomic<T> {
    type Output = Cyclotomic<T>;
    fn neg(self) -> Cyclotomic<T> {
        Cyclotomic::neg(self)
    }
}

impl<T: Scalar> Neg for Cyclotomic<T> {
    type Output = Cyclotomic<T>;
    fn neg(self) -> Cyclotomic<T> {
        Cyclotomic::neg(&self)
    }
}
