//! Zumbroich normal form and conductor reduction on dense coefficient vectors.
//!
//! For `n = Π p^k`, write an exponent `e` through the Chinese remainder
//! theorem as a tuple of components `e_p ∈ Z/p^k`, where
//! `e ≡ Σ (n/p^k)·e_p (mod n)`. Split each component as
//! `e_p = a + p^(k-1)·b` with `0 ≤ a < p^(k-1)` and `0 ≤ b < p`. The
//! exponent belongs to the basis iff for every `p` the top digit satisfies
//! `b ≠ 0` (odd `p`) or `b = 0` (`p = 2`).

use num_rational::Ratio;
use num_traits::Zero;

use crate::numtheory::{factorize, mod_inverse};
use crate::scalar::Scalar;

/// Rewrites `v` (coefficients of `ζ_n^k`) over the Zumbroich basis of `Q(ζ_n)`.
pub(super) fn reduce<T: Scalar>(n: u64, v: &mut [Ratio<T>]) {
    for (p, k) in factorize(n) {
        let pk = p.pow(k);
        let top = pk / p;
        let inv = mod_inverse((n / pk) % pk, pk).expect("cofactor is a unit");
        let step = n / p;
        for e in 0..n {
            if v[e as usize].is_zero() {
                continue;
            }
            let digit = ((e % pk) * inv % pk) / top;
            let bad = if p == 2 { digit == 1 } else { digit == 0 };
            if !bad {
                continue;
            }
            let c = std::mem::replace(&mut v[e as usize], Ratio::zero());
            if p == 2 {
                let t = ((e + step) % n) as usize;
                v[t] = v[t].clone() - c;
            } else {
                // Σ_{j<p} ζ^(e + j n/p) = 0
                for j in 1..p {
                    let t = ((e + j * step) % n) as usize;
                    v[t] = v[t].clone() - c.clone();
                }
            }
        }
    }
}

/// Moves a reduced vector down to its conductor.
pub(super) fn descend<T: Scalar>(mut n: u64, mut v: Vec<Ratio<T>>) -> (u64, Vec<Ratio<T>>) {
    'outer: while n > 1 {
        for (p, k) in factorize(n) {
            if let Some(mut w) = descend_once(n, &v, p, k) {
                n /= p;
                reduce(n, &mut w);
                v = w;
                continue 'outer;
            }
        }
        break;
    }
    (n, v)
}

/// Tries to express the value in `Q(ζ_{n/p})`.
fn descend_once<T: Scalar>(n: u64, v: &[Ratio<T>], p: u64, k: u32) -> Option<Vec<Ratio<T>>> {
    let m = n / p;
    let mut out = vec![Ratio::zero(); m as usize];
    let support = v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(e, c)| (e as u64, c));
    if k >= 2 || p == 2 {
        // Q(ζ_n) over Q(ζ_{n/p}) has basis ζ_n^i, i < p, in the low digit.
        for (e, c) in support {
            if e % p != 0 {
                return None;
            }
            out[(e / p) as usize] = c.clone();
        }
        return Some(out);
    }
    // p odd and p || n: ζ_n^e = ζ_p^β ζ_m^σ with e ≡ mβ + pσ. The value lies in
    // Q(ζ_m) iff for each σ all p-1 coefficients over β = 1..p-1 agree, and
    // then equals -c ζ_m^σ.
    let inv_m = mod_inverse(m % p, p)?;
    let inv_p = mod_inverse(p % m.max(1), m.max(1)).unwrap_or(0);
    let mut slots: std::collections::BTreeMap<u64, Vec<Option<Ratio<T>>>> = Default::default();
    for (e, c) in support {
        let beta = (e % p) * inv_m % p;
        let sigma = if m == 1 { 0 } else { (e % m) * inv_p % m };
        if beta == 0 {
            return None;
        }
        slots.entry(sigma).or_insert_with(|| vec![None; (p - 1) as usize])[(beta - 1) as usize] =
            Some(c.clone());
    }
    for (sigma, cs) in slots {
        let first = cs[0].clone()?;
        if cs.iter().any(|c| c.as_ref() != Some(&first)) {
            return None;
        }
        out[sigma as usize] = -first;
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use num_bigint::BigInt;

    use super::*;

    fn basis_size(n: u64) -> usize {
        // Reduce each ζ_n^e separately; the union of resulting supports is the basis.
        let mut set = std::collections::BTreeSet::new();
        for e in 0..n {
            let mut v = vec![Ratio::<BigInt>::zero(); n as usize];
            v[e as usize] = Ratio::from_integer(BigInt::from(1));
            reduce(n, &mut v);
            for (i, c) in v.iter().enumerate() {
                if !c.is_zero() {
                    set.insert(i);
                }
            }
        }
        set.len()
    }

    #[test]
    fn basis_has_euler_phi_elements() {
        for n in [1u64, 2, 3, 4, 5, 6, 8, 9, 12, 15, 20, 21, 24, 36, 45, 60] {
            assert_eq!(basis_size(n) as u64, crate::numtheory::phi(n), "n = {n}");
        }
    }
}
