//! Exact HeLP computations for torsion units in integral group rings.
//!
//! Given the ordinary (and optionally Brauer) character table of a finite
//! group `G`, this crate enumerates all partial-augmentation vectors of
//! hypothetical torsion units in `V(ZG)` that satisfy the HeLP restrictions,
//! and derives verdicts on the first Zassenhaus conjecture, the subgroup
//! isomorphism problem for cyclic subgroups, the prime graph question and
//! torsion-free kernels.
//!
//! All arithmetic is exact. The layers are:
//!
//! * [`cyclotomic`]: values of characters, `Q(ζ_n)` in Zumbroich normal form.
//! * [`chartab`]: character tables, Brauer tables and class fusions.
//! * [`helpcore`]: the constraint system for a unit of given order and powers.
//! * [`intsolve`]: complete integer enumeration of such systems.
//! * [`verdicts`]: order-by-order orchestration and derived verdicts.
//! * [`cli`]: the `help` command-line tool.

pub mod chartab;
pub mod cli;
pub mod cyclotomic;
pub mod helpcore;
pub mod intsolve;
pub mod numtheory;
pub mod scalar;
pub mod verdicts;

use num_bigint::BigInt;
use num_rational::BigRational;

pub use cyclotomic::{parse_cyclotomic, CycError, Cyclotomic};
pub use scalar::{Scalar, SolverInt};

/// Arbitrary-precision rational numbers.
pub type Rational = BigRational;

/// Cyclotomic numbers over arbitrary-precision rationals; the value type of
/// every character.
pub type Cyc = Cyclotomic<BigInt>;

/// Cyclotomic numbers over `i64` rationals, for callers that can rule out
/// overflow.
pub type Cyc64 = Cyclotomic<i64>;
