//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::collections::{BTreeMap, BTreeSet};
use std::process::Command;
use std::time::{Duration, Instant};

use help_core::chartab::{bundled, CharacterTable};
use help_core::helpcore::{
    build_system, candidate_classes, AffineForm, CharRef, LinearSystem, PAVector, PowerChain, SystemOptions,
};
use help_core::intsolve::{bounds, enumerate, oracle_enumerate, IntBox, Propagated, SolverConfig};
use help_core::verdicts::report::ReportDoc;
use help_core::verdicts::{eigenvalue_profile, kernel_check, run_check, torsion_free_witness, CheckOptions, GroupReport};
use help_core::{Cyc, Rational};
use num_bigint::BigInt;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

const S6_TIME_LIMIT: Duration = Duration::from_secs(10);
const S7_TIME_LIMIT: Duration = Duration::from_secs(600);
const ORACLE_CASES: u32 = 500;
const ORACLE_BUDGET: u64 = 1_000_000;
/// Box for the brute-force check of the abelian groups.
const ABELIAN_BOX: i64 = 6;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn table(name: &str) -> CharacterTable {
    bundled::table(name).unwrap_or_else(|e| panic!("bundled {name}: {e}"))
}

fn help(args: &[&str]) -> Result<(i32, String), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_help")).args(args).output().map_err(|e| e.to_string())?;
    Ok((out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned()))
}

fn tuple(t: &CharacterTable, v: &PAVector, names: &[&str]) -> Vec<i64> {
    names.iter().map(|n| v.get(t.class_index(n).unwrap())).collect()
}

/// Eigenvalue multiset as written in the literature, with `z` a primitive third root of unity.
fn profile(spec: &[(&str, u64)]) -> BTreeMap<String, u64> {
    let key = |s: &str| match s {
        "1" => "1",
        "-1" => "-1",
        "z" => "E(3)",
        "z2" => "E(3)^2",
        "-z" => "-E(3)",
        "-z2" => "-E(3)^2",
        _ => panic!("{s}"),
    };
    spec.iter().map(|&(s, m)| (key(s).to_string(), m)).collect()
}

fn by_value(t: &CharacterTable, chain: &PowerChain, chi: usize) -> Result<BTreeMap<String, u64>, String> {
    eigenvalue_profile(t, chain, CharRef::Ordinary(chi)).map(|p| p.by_value()).map_err(|e| e.to_string())
}

fn c1_s6_involutions() -> Outcome {
    let start = Instant::now();
    let (code, out) = help(&["check", "--table", "S6", "--orders", "2", "--format", "json"])?;
    let elapsed = start.elapsed();
    if code != 0 {
        return Err(format!("exit {code}"));
    }
    let doc: ReportDoc = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    let o = doc.orders.iter().find(|o| o.order == 2).ok_or("no order 2")?;
    let t = table("S6");
    let found: BTreeSet<Vec<i64>> = o
        .survivors
        .iter()
        .map(|s| {
            let v = PAVector::new(2, s.partial_augmentations.iter().map(|(c, e)| (t.class_index(c).unwrap(), *e)));
            tuple(&t, &v, &["2a", "2b", "2c"])
        })
        .collect();
    for want in [[-1, 1, 1], [1, 0, 0], [0, 1, 0], [0, 0, 1]] {
        if !found.contains(want.as_slice()) {
            return Err(format!("{want:?} missing from {found:?}"));
        }
    }
    if elapsed > S6_TIME_LIMIT {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("{} survivors {found:?} in {:.2} s", found.len(), elapsed.as_secs_f64()))
}

fn c2_s6_diagonals() -> Outcome {
    let (code, out) = help(&["eigenvalues", "--table", "S6", "--order", "2", "--tuple=-1,1,1"])?;
    if code != 0 {
        return Err(format!("exit {code}"));
    }
    // (multiplicity of 1, multiplicity of -1) for degrees 1,1,5,5,5,5,9,9,10,10,16.
    let want = [(1, 0), (1, 0), (5, 0), (1, 4), (1, 4), (5, 0), (5, 4), (5, 4), (6, 4), (2, 8), (8, 8)];
    let lines: Vec<&str> = out.lines().skip(1).collect();
    if lines.len() != want.len() {
        return Err(format!("{} profile lines", lines.len()));
    }
    for (line, (plus, minus)) in lines.iter().zip(want) {
        let mut d = vec!["1"; plus];
        d.extend(std::iter::repeat_n("-1", minus));
        let expected = format!("diag({})", d.join(","));
        if line.split_whitespace().nth(1) != Some(expected.as_str()) {
            return Err(format!("{line} != {expected}"));
        }
    }
    Ok("all eleven diagonals match".into())
}

fn c3_s7_order_six() -> Outcome {
    let t = table("S7");
    let start = Instant::now();
    let rep = run_check(&t, Some(&[6]), &CheckOptions::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let r = &rep.orders[&6];
    if !r.complete() {
        return Err("enumeration capped".into());
    }
    let two_a = PAVector::indicator(2, t.class_index("2a").unwrap());
    // Survivors with u^3 in 2a and no partial augmentation on a class of order 6.
    let critical: Vec<&PowerChain> = r
        .nontrivial(&t)
        .filter(|c| c.level(2) == Some(&two_a))
        .filter(|c| c.top().unwrap().entries.keys().all(|&k| t.classes[k].element_order != 6))
        .collect();
    let names = ["2a", "3a", "3b"];
    let tuples: BTreeSet<Vec<i64>> = critical.iter().map(|c| tuple(&t, c.top().unwrap(), &names)).collect();
    let want: BTreeSet<Vec<i64>> = [vec![-2, 2, 1], vec![-2, 1, 2]].into();
    if tuples != want || critical.len() != 2 {
        return Err(format!("critical tuples {tuples:?} ({} chains)", critical.len()));
    }
    let case_a = profile(&[("1", 2), ("z", 3), ("z2", 3), ("-1", 2), ("-z", 2), ("-z2", 2)]);
    let case_b = profile(&[("1", 2), ("z", 3), ("z2", 3), ("-1", 4), ("-z", 1), ("-z2", 1)]);
    for c in &critical {
        let top = c.top().unwrap();
        if top.entries.len() != 3 {
            return Err("other partial augmentations do not vanish".into());
        }
        let cls = if tuple(&t, top, &names)[1] == 1 { "3a" } else { "3b" };
        if c.level(3) != Some(&PAVector::indicator(3, t.class_index(cls).unwrap())) {
            return Err(format!("u^2 not in {cls}"));
        }
        let fourteen: Vec<BTreeMap<String, u64>> = (0..t.characters.len())
            .filter(|&i| t.characters[i].degree == 14)
            .map(|i| by_value(&t, c, i))
            .collect::<Result<_, _>>()?;
        if !fourteen.contains(&case_a) || !fourteen.contains(&case_b) || !fourteen.iter().all(|p| *p == case_a || *p == case_b) {
            return Err(format!("degree-14 profiles {fourteen:?}"));
        }
    }
    if elapsed > S7_TIME_LIMIT {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("{} survivors at order 6, critical {tuples:?}, {:.2} s", r.survivors.len(), elapsed.as_secs_f64()))
}

fn c4_psl216_order_six() -> Outcome {
    let t = table("PSL216");
    let rep = run_check(&t, Some(&[6]), &CheckOptions::default()).map_err(|e| e.to_string())?;
    let r = &rep.orders[&6];
    let two_a = PAVector::indicator(2, t.class_index("2a").unwrap());
    let chain = r
        .survivors
        .iter()
        .find(|c| {
            let top = c.top().unwrap();
            top.entries.len() == 2 && tuple(&t, top, &["2a", "3a"]) == [4, -3] && c.level(2) == Some(&two_a)
        })
        .ok_or("no survivor (4,-3) with u^3 in 2a")?;
    let chi = profile(&[("1", 2), ("z", 3), ("z2", 3), ("-1", 4), ("-z", 2), ("-z2", 2)]);
    let psi = profile(&[("1", 5), ("z", 2), ("z2", 2), ("-z", 4), ("-z2", 4)]);
    let of_degree = |d: u64| -> Result<Vec<BTreeMap<String, u64>>, String> {
        (0..t.characters.len()).filter(|&i| t.characters[i].degree == d).map(|i| by_value(&t, chain, i)).collect()
    };
    if !of_degree(16)?.contains(&chi) {
        return Err("degree-16 profile differs".into());
    }
    if !of_degree(17)?.contains(&psi) {
        return Err("no degree-17 profile matches".into());
    }
    Ok(format!("{} survivors at order 6 include (4,-3)", r.survivors.len()))
}

fn c5_psl33() -> Outcome {
    let t = table("PSL33");
    let rep: GroupReport = run_check(&t, Some(&[2, 3, 13]), &CheckOptions::default()).map_err(|e| e.to_string())?;
    for r in [2, 13] {
        let o = &rep.orders[&r];
        if !o.complete() || o.tops().any(|v| !v.is_indicator()) {
            return Err(format!("order {r} has non-indicator survivors"));
        }
    }
    let three = &rep.orders[&3];
    let nontrivial = three.nontrivial(&t).count();
    if nontrivial == 0 {
        return Err("order 3 has no nontrivial survivors".into());
    }
    for chi in 1..t.characters.len() {
        let k = kernel_check(&t, three, chi).map_err(|e| e.to_string())?;
        if k.flagged != 0 {
            return Err(format!("{} flags {} survivors", k.character, k.flagged));
        }
    }
    let mut witnessed = Vec::new();
    for chi in (1..t.characters.len()).filter(|&c| t.is_rational(c)) {
        let w = torsion_free_witness(&t, chi, 3, &rep.orders).map_err(|e| e.to_string())?;
        if !w.holds {
            return Err(format!("no witness for {}", w.character));
        }
        witnessed.push(w.character);
    }
    Ok(format!("order 3: {nontrivial} nontrivial survivors, no kernel flags; witnesses {}", witnessed.join(",")))
}

fn form(coeffs: &[i64], c: i64, den: i64) -> AffineForm {
    let mut f = AffineForm::constant(Rational::new(c.into(), den.into()));
    for (i, &a) in coeffs.iter().enumerate() {
        f.add_term(i, Rational::new(a.into(), den.into()));
    }
    f
}

/// Up to six boxed variables and at most twelve constraints in total.
fn arb_system() -> impl Strategy<Value = (LinearSystem, IntBox<i64>)> {
    (1usize..=6).prop_flat_map(|n| {
        let widths = prop::collection::vec((-4i64..=2, 0i64..=6), n);
        let rows = prop::collection::vec(
            (prop::collection::vec(-3i64..=3, n), -6i64..=6, 1i64..=3, 0u8..3, 2u32..=5),
            0..=12 - 2 * n,
        );
        (widths, rows).prop_map(move |(widths, rows)| {
            let mut s = LinearSystem::new((0..n).map(|i| format!("v{i}")).collect());
            let (mut lower, mut upper) = (Vec::new(), Vec::new());
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
                match kind {
                    0 => s.push_eq(form(&coeffs, c, den)),
                    1 => s.push_ge(form(&coeffs, c, den)),
                    _ => s.push_cong(&form(&coeffs, c, 1), m.into()),
                }
            }
            (s, IntBox { lower, upper })
        })
    })
}

fn c6_oracle() -> Outcome {
    let mut runner = TestRunner::new_with_rng(
        Config { cases: ORACLE_CASES, failure_persistence: None, ..Config::default() },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    );
    let solutions = std::cell::Cell::new(0usize);
    let result = runner.run(&arb_system(), |(s, b)| {
        let fast = enumerate::<i64>(&s, &SolverConfig::default()).unwrap();
        let slow = oracle_enumerate(&s, &b, ORACLE_BUDGET).unwrap();
        prop_assert!(fast.completeness.is_complete());
        prop_assert_eq!(&fast.solutions, &slow.solutions);
        solutions.set(solutions.get() + slow.solutions.len());
        Ok(())
    });
    result.map_err(|e| e.to_string())?;
    Ok(format!("{ORACLE_CASES} systems agree ({} solutions in total)", solutions.get()))
}

fn c7_tables() -> Outcome {
    let mut checked = Vec::new();
    for name in bundled::names() {
        let t = bundled::table(name).map_err(|e| format!("{name}: {e}"))?;
        let h = t.classes.len();
        let order = Cyc::from_integer(t.order as i64);
        for (i, a) in t.characters.iter().enumerate() {
            for (j, b) in t.characters.iter().enumerate() {
                let mut s = Cyc::zero();
                for c in 0..h {
                    let w = Rational::from_integer(BigInt::from(t.classes[c].size));
                    s = &s + &(&a.values[c] * &b.values[c].conj()).scale(&w);
                }
                let want = if i == j { order.clone() } else { Cyc::zero() };
                if s != want {
                    return Err(format!("{name}: rows {} {}", a.name, b.name));
                }
            }
        }
        for c in 0..h {
            for d in 0..h {
                let mut s = Cyc::zero();
                for ch in &t.characters {
                    s = &s + &(&ch.values[c] * &ch.values[d].conj());
                }
                let want = if c == d { Cyc::from_integer((t.order / t.classes[c].size) as i64) } else { Cyc::zero() };
                if s != want {
                    return Err(format!("{name}: columns {} {}", t.classes[c].name, t.classes[d].name));
                }
            }
        }
        let squares: u64 = t.characters.iter().map(|c| c.degree * c.degree).sum();
        if squares != t.order {
            return Err(format!("{name}: degree squares sum to {squares}"));
        }
        checked.push(name);
    }
    Ok(format!("{} tables: {}", checked.len(), checked.join(" ")))
}

fn c8_group_elements_survive() -> Outcome {
    let mut chains = 0;
    for name in bundled::names() {
        let t = table(name);
        for c in 1..t.classes.len() {
            let n = t.classes[c].element_order;
            let mut chain = PowerChain::of_class(&t, c);
            chain.levels.remove(&n);
            let sys = build_system(&t, &chain, &SystemOptions::default()).map_err(|e| format!("{name}: {e}"))?;
            let x: Vec<BigInt> =
                candidate_classes(&t, n).iter().map(|&k| BigInt::from(i64::from(k == c))).collect();
            if !sys.satisfied_by(&x) {
                return Err(format!("{name}: class {} violates its own system", t.classes[c].name));
            }
            chains += 1;
        }
    }
    Ok(format!("{chains} element chains satisfy their systems"))
}

fn c9_abelian() -> Outcome {
    for name in ["C2", "C3", "C6"] {
        let t = table(name);
        let rep = run_check(&t, None, &CheckOptions::default()).map_err(|e| e.to_string())?;
        if !rep.verdict.zc1_by_help.is_proved() {
            return Err(format!("{name}: zc1 not proved"));
        }
        for (&n, r) in &rep.orders {
            // Every consistent choice of survivors at the proper divisors, solved by brute force.
            let mut pool = vec![PowerChain::new(n)];
            for lower in rep.orders.range(2..n).filter(|(&e, _)| n % e == 0).map(|(_, r)| r) {
                let mut next = Vec::new();
                for c in &pool {
                    for s in &lower.survivors {
                        if s.levels.iter().all(|(k, v)| c.level(*k).is_none_or(|w| w == v)) {
                            let mut m = c.clone();
                            m.levels.extend(s.levels.clone());
                            next.push(m);
                        }
                    }
                }
                pool = next;
            }
            let mut brute = BTreeSet::new();
            for chain in &pool {
                let sys = build_system(&t, chain, &SystemOptions::default()).map_err(|e| e.to_string())?;
                let k = sys.num_vars;
                let b = IntBox { lower: vec![-ABELIAN_BOX; k], upper: vec![ABELIAN_BOX; k] };
                let slow = oracle_enumerate(&sys, &b, 10_000_000).map_err(|e| e.to_string())?;
                let fast = enumerate::<i64>(&sys, &SolverConfig::default()).map_err(|e| e.to_string())?;
                if fast.solutions != slow.solutions {
                    return Err(format!("{name} order {n}: solver and brute force differ"));
                }
                if let Propagated::Finite { bounds: p, .. } = bounds::<i64>(&sys, &SolverConfig::default()).unwrap() {
                    if p.lower.iter().chain(&p.upper).any(|v| v.abs() > ABELIAN_BOX) {
                        return Err(format!("{name} order {n}: brute-force box too small"));
                    }
                }
                for x in slow.solutions {
                    brute.insert(chain.clone().with_top(PAVector::new(n, sys.var_classes.iter().copied().zip(x))));
                }
            }
            let found: BTreeSet<PowerChain> = r.survivors.iter().cloned().collect();
            if brute != found || !r.trivial_only {
                return Err(format!("{name} order {n}: {} brute-force survivors, {} reported", brute.len(), found.len()));
            }
        }
    }
    Ok("C2 C3 C6: zc1 proved, survivors equal brute force".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("S6 order-2 survivors", c1_s6_involutions),
        ("S6 eigenvalue diagonals", c2_s6_diagonals),
        ("S7 order-6 critical units", c3_s7_order_six),
        ("PSL(2,16) order-6 unit", c4_psl216_order_six),
        ("PSL(3,3) prime orders and kernels", c5_psl33),
        ("solver equals oracle", c6_oracle),
        ("table validation", c7_tables),
        ("group elements survive", c8_group_elements_survive),
        ("abelian baseline", c9_abelian),
    ];
    let mut failed = 0;
    for (i, (label, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {} {label}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {label}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
