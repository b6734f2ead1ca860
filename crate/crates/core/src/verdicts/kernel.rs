use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::{OrderReport, VerdictError};
use crate::chartab::CharacterTable;
use crate::helpcore::{candidate_classes, multiplicity_form, CharRef, PAVector, PowerChain};
use crate::numtheory::is_prime;
use crate::{Cyc, Rational};

/// Whether survivors of prime order `prime` can lie in the kernel of a
/// representation affording `character`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelCheck {
    pub prime: u64,
    pub character: String,
    pub survivors_checked: usize,
    /// Survivors `v` with `χ(v) = χ(1)`.
    pub flagged: usize,
    /// The common value of `χ` on all classes of order `prime`, when it
    /// differs from the degree; no survivor can be flagged then.
    pub constant_value: Option<String>,
    pub complete: bool,
}

fn value_at(table: &CharacterTable, chi: usize, v: &PAVector) -> Cyc {
    v.entries.iter().fold(Cyc::zero(), |acc, (&c, &e)| {
        &acc + &table.value(chi, c).scale(&Rational::from_integer(BigInt::from(e)))
    })
}

pub fn kernel_check(table: &CharacterTable, report: &OrderReport, chi: usize) -> Result<KernelCheck, VerdictError> {
    let r = report.order;
    if !is_prime(r) {
        return Err(VerdictError::NotPrime(r));
    }
    let character = table.characters.get(chi).ok_or(VerdictError::Precondition(format!("no character {chi}")))?;
    let degree = Cyc::from_integer(character.degree as i64);
    let flagged = report.tops().filter(|v| value_at(table, chi, v) == degree).count();
    let mut values = (0..table.classes.len()).filter(|&c| table.classes[c].element_order == r).map(|c| table.value(chi, c));
    let constant_value = match values.next() {
        Some(t) if values.all(|v| v == t) && *t != degree => Some(t.to_string()),
        _ => None,
    };
    if constant_value.is_some() && flagged > 0 {
        return Err(VerdictError::Invariant(format!("{} is constant off the degree yet flags a survivor", character.name)));
    }
    Ok(KernelCheck {
        prime: r,
        character: character.name.clone(),
        survivors_checked: report.survivors.len(),
        flagged,
        constant_value,
        complete: report.complete(),
    })
}

/// Record that the torsion-free subgroup construction applies for a block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub character: String,
    pub modulus: u64,
    /// True when no survivor of any prime order lies in the kernel and every
    /// prime-order enumeration was complete.
    pub holds: bool,
    pub findings: Vec<KernelCheck>,
}

pub fn torsion_free_witness(
    table: &CharacterTable,
    chi: usize,
    p: u64,
    reports: &BTreeMap<u64, OrderReport>,
) -> Result<Witness, VerdictError> {
    let ok_modulus = (p > 2 && is_prime(p)) || p == 4 || (p == 2 && table.order % 2 == 1);
    if !ok_modulus {
        return Err(VerdictError::Precondition(format!(
            "modulus {p} must be an odd prime, 4, or 2 for a group of odd order"
        )));
    }
    let name = &table.characters.get(chi).ok_or(VerdictError::Precondition(format!("no character {chi}")))?.name;
    if !table.is_faithful(chi) {
        return Err(VerdictError::Precondition(format!("{name} is not faithful")));
    }
    if !table.is_rational(chi) {
        return Err(VerdictError::Precondition(format!("{name} is not rational")));
    }
    let mut findings = Vec::new();
    for r in table.primes() {
        let rep = reports.get(&r).ok_or(VerdictError::MissingLower { order: r, level: r })?;
        findings.push(kernel_check(table, rep, chi)?);
    }
    let holds = findings.iter().all(|f| f.flagged == 0 && f.complete);
    Ok(Witness { character: name.clone(), modulus: p, holds, findings })
}

/// Eigenvalue multiplicities of a unit under a representation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenProfile {
    pub order: u64,
    pub character: String,
    /// `multiplicities[l]` belongs to `ζ_order^l`.
    pub multiplicities: Vec<u64>,
}

impl EigenProfile {
    pub fn degree(&self) -> u64 {
        self.multiplicities.iter().sum()
    }

    /// Eigenvalues in canonical notation, ascending in `l`, with repetition.
    pub fn diagonal(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (l, &m) in self.multiplicities.iter().enumerate() {
            let z = Cyc::root_of_unity(self.order, l as i64).expect("order > 0").to_string();
            out.extend(std::iter::repeat_n(z, m as usize));
        }
        out
    }

    /// Multiplicity of each eigenvalue keyed by its canonical string.
    pub fn by_value(&self) -> BTreeMap<String, u64> {
        let mut out = BTreeMap::new();
        for (l, &m) in self.multiplicities.iter().enumerate() {
            if m > 0 {
                out.insert(Cyc::root_of_unity(self.order, l as i64).expect("order > 0").to_string(), m);
            }
        }
        out
    }
}

impl fmt::Display for EigenProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "diag({})", self.diagonal().join(","))
    }
}

/// Multiplicities for the solved chain; fails if any is not a nonnegative
/// integer, i.e. the chain is not a HeLP survivor for this character.
pub fn eigenvalue_profile(table: &CharacterTable, chain: &PowerChain, ch: CharRef) -> Result<EigenProfile, VerdictError> {
    let n = chain.order;
    let x: Vec<BigInt> = if n == 1 {
        vec![BigInt::from(1)]
    } else {
        let top = chain.top().ok_or(VerdictError::Precondition("chain has no top level".into()))?;
        top.values_on(&candidate_classes(table, n)).into_iter().map(BigInt::from).collect()
    };
    let character = match ch {
        CharRef::Ordinary(i) => table.characters.get(i).map(|c| c.name.clone()),
        CharRef::Brauer { prime, index } => table.brauer.get(&prime).and_then(|b| b.characters.get(index)).map(|c| c.name.clone()),
    }
    .ok_or(VerdictError::Precondition("unknown character".into()))?;
    let mut multiplicities = Vec::with_capacity(n as usize);
    for l in 0..n {
        let mu = multiplicity_form(table, ch, l, chain)?.evaluate(&x);
        if !mu.is_integer() || mu.is_negative() {
            return Err(VerdictError::Precondition(format!(
                "multiplicity {mu} of E({n})^{l} for {character}: partial augmentations are not a survivor"
            )));
        }
        multiplicities.push(mu.to_integer().to_u64().expect("bounded by the degree"));
    }
    Ok(EigenProfile { order: n, character, multiplicities })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chartab::bundled;
    use crate::verdicts::{enumerate_chains, run_check, CheckOptions};

    #[test]
    fn identity_profile() {
        let t = bundled::table("A5").unwrap();
        let p = eigenvalue_profile(&t, &PowerChain::new(1), CharRef::Ordinary(4)).unwrap();
        assert_eq!(p.multiplicities, [5]);
        assert_eq!(p.to_string(), "diag(1,1,1,1,1)");
    }

    #[test]
    fn element_profiles_match_direct_diagonalization() {
        // For a group element g of order 2 the multiplicity of -1 is (χ(1) - χ(g)) / 2.
        let t = bundled::table("S6").unwrap();
        let c = t.class_index("2a").unwrap();
        let chain = PowerChain::of_class(&t, c);
        for (i, chi) in t.characters.iter().enumerate() {
            let p = eigenvalue_profile(&t, &chain, CharRef::Ordinary(i)).unwrap();
            let v = chi.values[c].to_rational().unwrap().to_integer();
            let minus = (BigInt::from(chi.degree) - v) / 2;
            assert_eq!(BigInt::from(p.multiplicities[1]), minus);
        }
    }

    #[test]
    fn non_survivors_are_rejected() {
        let t = bundled::table("S6").unwrap();
        let chain = PowerChain::new(2).with_top(PAVector::new(2, [(1, 3), (2, -2)]));
        assert!(eigenvalue_profile(&t, &chain, CharRef::Ordinary(0)).is_ok());
        assert!((0..t.characters.len()).any(|i| eigenvalue_profile(&t, &chain, CharRef::Ordinary(i)).is_err()));
    }

    #[test]
    fn kernel_flags_match_profiles() {
        let t = bundled::table("S5").unwrap();
        let rep = run_check(&t, Some(&[2, 3, 5]), &CheckOptions::default()).unwrap();
        for r in [2, 3, 5] {
            let report = &rep.orders[&r];
            for chi in 0..t.characters.len() {
                let k = kernel_check(&t, report, chi).unwrap();
                let by_profile = report
                    .survivors
                    .iter()
                    .filter(|c| {
                        let p = eigenvalue_profile(&t, c, CharRef::Ordinary(chi)).unwrap();
                        p.multiplicities[0] == t.characters[chi].degree
                    })
                    .count();
                assert_eq!(k.flagged, by_profile);
            }
        }
        // The trivial character flags everything.
        assert_eq!(kernel_check(&t, &rep.orders[&2], 0).unwrap().flagged, rep.orders[&2].survivors.len());
    }

    #[test]
    fn steinberg_shortcut() {
        let t = bundled::table("PSL27").unwrap();
        let rep = enumerate_chains(&t, 2, &BTreeMap::new(), &CheckOptions::default()).unwrap();
        let st = t.character_index("X8a").unwrap();
        let k = kernel_check(&t, &rep, st).unwrap();
        assert_eq!(k.constant_value.as_deref(), Some("0"));
        assert_eq!(k.flagged, 0);
        let six = enumerate_chains(&t, 6, &BTreeMap::new(), &CheckOptions::default());
        assert!(six.is_err());
    }

    #[test]
    fn witness_preconditions() {
        let t = bundled::table("S3").unwrap();
        let rep = run_check(&t, Some(&[2, 3]), &CheckOptions::default()).unwrap();
        assert!(torsion_free_witness(&t, 2, 2, &rep.orders).unwrap_err().to_string().contains("modulus"));
        assert!(torsion_free_witness(&t, 1, 3, &rep.orders).unwrap_err().to_string().contains("not faithful"));
        let w = torsion_free_witness(&t, 2, 3, &rep.orders).unwrap();
        assert!(w.holds);
        let c3 = bundled::table("C3").unwrap();
        let rep = run_check(&c3, None, &CheckOptions::default()).unwrap();
        assert!(torsion_free_witness(&c3, 1, 3, &rep.orders).unwrap_err().to_string().contains("not rational"));
    }
}
