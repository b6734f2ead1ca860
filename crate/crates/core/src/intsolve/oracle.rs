use num_bigint::BigInt;
use num_traits::One;

use super::{Completeness, IntBox, SolutionSet, SolveError};
use crate::helpcore::LinearSystem;
use crate::scalar::SolverInt;

/// Checks every integer point of `bounds` against the exact rational system.
/// No pruning and no propagation; meant as a reference for tests.
pub fn oracle_enumerate<T: SolverInt>(
    system: &LinearSystem,
    bounds: &IntBox<T>,
    budget: u64,
) -> Result<SolutionSet<T>, SolveError> {
    let volume = bounds.volume();
    if volume > BigInt::from(budget) {
        return Err(SolveError::BoxTooLarge { volume, budget });
    }
    let mut solutions = Vec::new();
    let mut nodes = 0;
    if !bounds.is_empty() {
        let lo: Vec<BigInt> = bounds.lower.iter().map(|v| v.to_bigint()).collect();
        let hi: Vec<BigInt> = bounds.upper.iter().map(|v| v.to_bigint()).collect();
        let mut x = lo.clone();
        'scan: loop {
            nodes += 1;
            if system.satisfied_by(&x) {
                solutions.push(x.iter().map(|v| T::from_bigint(v).expect("inside the box")).collect());
            }
            for i in (0..x.len()).rev() {
                if x[i] < hi[i] {
                    x[i] += BigInt::one();
                    continue 'scan;
                }
                x[i] = lo[i].clone();
            }
            break;
        }
    }
    Ok(SolutionSet { solutions, completeness: Completeness::Complete, node_count: nodes })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::super::{bounds, enumerate, Propagated, SolverConfig};
    use super::*;
    use crate::helpcore::AffineForm;
    use crate::Rational;

    fn form(coeffs: &[i64], c: i64, den: i64) -> AffineForm {
        let mut f = AffineForm::constant(Rational::new(c.into(), den.into()));
        for (i, &a) in coeffs.iter().enumerate() {
            f.add_term(i, Rational::new(a.into(), den.into()));
        }
        f
    }

    #[test]
    fn fixed_examples() {
        let mut s = LinearSystem::new(vec!["x".into(), "y".into()]);
        s.push_eq(form(&[1, 1], -1, 1));
        let b = IntBox { lower: vec![0i64, 0], upper: vec![1, 1] };
        assert_eq!(oracle_enumerate(&s, &b, 100).unwrap().solutions, vec![vec![0, 1], vec![1, 0]]);
        let empty = IntBox { lower: vec![1i64, 0], upper: vec![0, 1] };
        assert!(oracle_enumerate(&s, &empty, 100).unwrap().solutions.is_empty());
        let big = IntBox { lower: vec![0i64, 0], upper: vec![1000, 1000] };
        assert!(matches!(oracle_enumerate(&s, &big, 1000), Err(SolveError::BoxTooLarge { .. })));
        let mut c = LinearSystem::new(vec!["x".into()]);
        c.push_cong(&form(&[2], 0, 1), 4.into());
        let b = IntBox { lower: vec![0i64], upper: vec![3] };
        assert_eq!(oracle_enumerate(&c, &b, 100).unwrap().solutions, vec![vec![0], vec![2]]);
    }

    /// A random system whose variables are boxed by explicit rows, plus a
    /// handful of random equalities, inequalities and congruences.
    fn arb_system() -> impl Strategy<Value = (LinearSystem, IntBox<i64>)> {
        (1usize..=6).prop_flat_map(|n| {
            let widths = prop::collection::vec((-4i64..=2, 0i64..=6), n);
            let rows = prop::collection::vec(
                (prop::collection::vec(-3i64..=3, n), -6i64..=6, 1i64..=3, 0u8..3, 2u32..=5),
                0..=12 - 2 * n,
            );
            (widths, rows).prop_map(move |(widths, rows)| {
                let mut s = LinearSystem::new((0..n).map(|i| format!("v{i}")).collect());
                let mut lower = Vec::new();
                let mut upper = Vec::new();
                for (i, (lo, w)) in widths.iter().enumerate() {
                    let mut e = vec![0; n];
                    e[i] = 1;
                    s.push_ge(form(&e, -lo, 1));
                    e[i] = -1;
                    s.push_ge(form(&e, lo + w, 1));
                    lower.push(*lo);
                    upper.push(lo + w);
                }
                for (coeffs, c, den, kind, m) in rows {
                    let f = form(&coeffs, c, den);
                    match kind {
                        0 => s.push_eq(f),
                        1 => s.push_ge(f),
                        _ => s.push_cong(&form(&coeffs, c, 1), m.into()),
                    }
                }
                (s, IntBox { lower, upper })
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn enumerate_matches_oracle((s, b) in arb_system()) {
            let fast = enumerate::<i64>(&s, &SolverConfig::default()).unwrap();
            let slow = oracle_enumerate(&s, &b, 1_000_000).unwrap();
            prop_assert_eq!(fast.completeness, Completeness::Complete);
            prop_assert_eq!(fast.solutions, slow.solutions);
        }

        #[test]
        fn enumeration_is_deterministic((s, _b) in arb_system()) {
            let a = enumerate::<i64>(&s, &SolverConfig::default()).unwrap();
            let b = enumerate::<i64>(&s, &SolverConfig { parallel: false, ..Default::default() }).unwrap();
            prop_assert_eq!(a.solutions, b.solutions);
        }

        #[test]
        fn extra_constraints_never_add_solutions((s, _b) in arb_system(), coeffs in prop::collection::vec(-2i64..=2, 6), c in -3i64..=3) {
            let before = enumerate::<i64>(&s, &SolverConfig::default()).unwrap().solutions;
            let mut t = s.clone();
            t.push_ge(form(&coeffs[..s.num_vars], c, 1));
            let after = enumerate::<i64>(&t, &SolverConfig::default()).unwrap().solutions;
            prop_assert!(after.iter().all(|x| before.contains(x)));
        }

        #[test]
        fn propagated_box_contains_every_solution((s, b) in arb_system()) {
            let slow = oracle_enumerate(&s, &b, 1_000_000).unwrap();
            match bounds::<i64>(&s, &SolverConfig::default()).unwrap() {
                Propagated::Infeasible => prop_assert!(slow.solutions.is_empty()),
                Propagated::Finite { bounds: p, .. } => {
                    for x in &slow.solutions {
                        for i in 0..x.len() {
                            prop_assert!(p.lower[i] <= x[i] && x[i] <= p.upper[i]);
                        }
                    }
                }
            }
        }
    }
}
