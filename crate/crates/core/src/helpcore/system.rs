use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{AffineForm, CycForm, HelpError, LinearSystem, PAVector, PowerChain};
use crate::chartab::{CharacterTable, ClassFusion};
use crate::numtheory::{divisors, factorize, p_part, phi};
use crate::{Cyc, Rational};

/// An ordinary character, or a Brauer character for a prime with a bundled
/// Brauer table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CharRef {
    Ordinary(usize),
    Brauer { prime: u64, index: usize },
}

/// `χ(u^d)`: exact once the level is fixed, affine in the unknowns for `d = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChiValue {
    Exact(Cyc),
    Form(CycForm),
}

/// Which Brauer tables feed family (c).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum BrauerSelection {
    #[default]
    All,
    None,
    /// The listed primes; primes dividing the unit order are skipped.
    Primes(Vec<u64>),
}

/// The partial augmentations of the image of `u` in a quotient.
#[derive(Debug, Clone, Copy)]
pub struct QuotientImage<'a> {
    pub fusion: &'a ClassFusion,
    /// Vector on the target classes; its `unit_order` is the order of the image.
    pub image: &'a PAVector,
}

#[derive(Debug, Clone)]
pub struct SystemOptions<'a> {
    pub congruences: bool,
    pub brauer: BrauerSelection,
    /// Box bounds on each `ε_x` implied by nonnegative multiplicities.
    pub eigen_bounds: bool,
    pub quotient: Option<QuotientImage<'a>>,
    /// Vanishing on classes with smaller `p`-part; needs a quotient by a
    /// `p`-group in which the image has smaller order.
    pub p_part: Option<u64>,
}

impl Default for SystemOptions<'_> {
    fn default() -> Self {
        Self { congruences: true, brauer: BrauerSelection::All, eigen_bounds: true, quotient: None, p_part: None }
    }
}

/// Classes a unit of order `n` can have nonzero partial augmentation on.
pub fn candidate_classes(table: &CharacterTable, n: u64) -> Vec<usize> {
    if n == 1 {
        return vec![0];
    }
    (1..table.classes.len()).filter(|&i| n.is_multiple_of(table.classes[i].element_order)).collect()
}

fn character_value(table: &CharacterTable, ch: CharRef, class: usize) -> Result<&Cyc, HelpError> {
    match ch {
        CharRef::Ordinary(i) => {
            table.characters.get(i).map(|c| &c.values[class]).ok_or(HelpError::NoCharacter(i))
        }
        CharRef::Brauer { prime, index } => {
            let b = table.brauer.get(&prime).ok_or(HelpError::NoBrauerTable { prime })?;
            if index >= b.characters.len() {
                return Err(HelpError::NoCharacter(index));
            }
            b.value(index, class).ok_or(HelpError::BrauerPrimeDivides {
                prime,
                order: table.classes[class].element_order,
            })
        }
    }
}

fn degree(table: &CharacterTable, ch: CharRef) -> Result<Cyc, HelpError> {
    character_value(table, ch, 0).cloned()
}

fn check_usable(table: &CharacterTable, ch: CharRef, n: u64) -> Result<(), HelpError> {
    if let CharRef::Brauer { prime, .. } = ch {
        if n.is_multiple_of(prime) {
            return Err(HelpError::BrauerPrimeDivides { prime, order: n });
        }
    }
    degree(table, ch).map(|_| ())
}

/// `χ(u^d)` for a unit `u` of order `chain.order`. For `d = 1` the unknowns
/// are the partial augmentations on `candidate_classes(table, n)`, by position.
pub fn chi_of_power(table: &CharacterTable, chain: &PowerChain, ch: CharRef, d: u64) -> Result<ChiValue, HelpError> {
    let n = chain.order;
    let e = n / d;
    if e == 1 {
        return Ok(ChiValue::Exact(degree(table, ch)?));
    }
    if d == 1 {
        let mut f = CycForm::default();
        for (i, c) in candidate_classes(table, n).into_iter().enumerate() {
            let v = character_value(table, ch, c)?;
            if !v.is_zero() {
                f.coefficients.insert(i, v.clone());
            }
        }
        return Ok(ChiValue::Form(f));
    }
    let level = chain.level(e).ok_or(HelpError::MissingLevel { order: n, level: e })?;
    let mut acc = Cyc::zero();
    for (&c, &eps) in &level.entries {
        acc = &acc + &character_value(table, ch, c)?.scale(&Rational::from_integer(eps.into()));
    }
    Ok(ChiValue::Exact(acc))
}

/// Powers `χ(u^d)` for all `d | n`, ascending in `d`.
fn power_values(table: &CharacterTable, chain: &PowerChain, ch: CharRef) -> Result<Vec<(u64, ChiValue)>, HelpError> {
    divisors(chain.order).into_iter().map(|d| Ok((d, chi_of_power(table, chain, ch, d)?))).collect()
}

fn multiplicity_from(n: u64, l: u64, powers: &[(u64, ChiValue)]) -> AffineForm {
    let mut f = AffineForm::default();
    for (d, v) in powers {
        let m = n / d;
        let root = Cyc::root_of_unity(m, -(l as i64)).expect("m > 0");
        let term = match v {
            ChiValue::Exact(c) => AffineForm::constant((c * &root).trace_over(m).expect("value lies in Q(ζ_m)")),
            ChiValue::Form(c) => c.mul_cyc(&root).trace_over(m),
        };
        f = f.add(&term);
    }
    f.scale(&Rational::new(BigInt::one(), BigInt::from(n)))
}

/// Multiplicity of `ζ_n^l` as an eigenvalue of `D(u)` for a representation
/// `D` affording `ch`, as an affine form in the unknowns of `chain.order`.
pub fn multiplicity_form(
    table: &CharacterTable,
    ch: CharRef,
    l: u64,
    chain: &PowerChain,
) -> Result<AffineForm, HelpError> {
    let n = chain.order;
    if l >= n {
        return Err(HelpError::EigenIndex { l, order: n });
    }
    check_usable(table, ch, n)?;
    Ok(multiplicity_from(n, l, &power_values(table, chain, ch)?))
}

/// Rational bounds on each unknown `ε_x`, one pair per candidate class.
///
/// Inverting the eigenvalue decomposition through column orthogonality gives
/// `ε_x = Σ_{χ,l} r(x,χ,l)·μ_l(χ)` with
/// `r = |x^G| / (|G| φ(n)) · Tr(conj χ(x) ζ_n^l)`. Since `μ_l(χ) ≥ 0` and
/// `Σ_l μ_l(χ) = χ(1)`, each `ε_x` lies between `Σ_χ χ(1)·min_l r` and
/// `Σ_χ χ(1)·max_l r`.
pub fn eigen_bounds(table: &CharacterTable, n: u64) -> Vec<(Rational, Rational)> {
    let scale = Rational::new(BigInt::one(), BigInt::from(table.order * phi(n)));
    candidate_classes(table, n)
        .into_iter()
        .map(|x| {
            let size = Rational::from_integer(table.classes[x].size.into());
            let (mut lo, mut hi) = (Rational::zero(), Rational::zero());
            for chi in &table.characters {
                let c = chi.values[x].conj();
                let rs: Vec<Rational> = (0..n)
                    .map(|l| {
                        let t = (&c * &Cyc::root_of_unity(n, l as i64).unwrap()).trace_over(n).unwrap();
                        t * &size * &scale
                    })
                    .collect();
                let deg = Rational::from_integer(chi.degree.into());
                lo += rs.iter().min().unwrap() * &deg;
                hi += rs.iter().max().unwrap() * &deg;
            }
            (lo, hi)
        })
        .collect()
}

/// The HeLP system for a unit of order `chain.order` whose proper powers are
/// fixed by `chain`.
pub fn build_system(
    table: &CharacterTable,
    chain: &PowerChain,
    opts: &SystemOptions<'_>,
) -> Result<LinearSystem, HelpError> {
    let n = chain.order;
    let cands = candidate_classes(table, n);
    let mut sys = LinearSystem::new(cands.iter().map(|&c| table.classes[c].name.clone()).collect());
    sys.unit_order = n;
    sys.var_classes = cands.clone();
    sys.var_orders = cands.iter().map(|&c| table.classes[c].element_order).collect();
    if let Some(e) = divisors(n).into_iter().find(|&e| e > 1 && e < n && chain.level(e).is_none()) {
        return Err(HelpError::MissingLevel { order: n, level: e });
    }

    let mut aug = AffineForm::constant(-Rational::one());
    for i in 0..cands.len() {
        aug.add_term(i, Rational::one());
    }
    sys.push_eq(aug);
    if n == 1 {
        return Ok(sys);
    }

    let mut chars: Vec<CharRef> = (0..table.characters.len()).map(CharRef::Ordinary).collect();
    let primes: Vec<u64> = match &opts.brauer {
        BrauerSelection::All => table.brauer.keys().copied().collect(),
        BrauerSelection::None => Vec::new(),
        BrauerSelection::Primes(ps) => ps.clone(),
    };
    for p in primes {
        if n.is_multiple_of(p) {
            continue;
        }
        let b = table.brauer.get(&p).ok_or(HelpError::NoBrauerTable { prime: p })?;
        chars.extend((0..b.characters.len()).map(|index| CharRef::Brauer { prime: p, index }));
    }
    let nn = BigInt::from(n);
    for ch in chars {
        let powers = power_values(table, chain, ch)?;
        for l in 0..n {
            let mu = multiplicity_from(n, l, &powers);
            sys.push_cong(&mu.scale(&Rational::from_integer(nn.clone())), nn.clone());
            sys.push_ge(mu);
        }
    }

    if opts.congruences {
        for (p, j) in factorize(n) {
            let pj = p.pow(j);
            let m = n / pj;
            if m == 1 {
                continue;
            }
            let level = chain.level(m).ok_or(HelpError::MissingLevel { order: n, level: m })?;
            for s in 0..table.classes.len() {
                let mut f = AffineForm::constant(Rational::from_integer((-level.get(s)).into()));
                for (i, &x) in cands.iter().enumerate() {
                    if table.power_class(x, pj) == s {
                        f.add_term(i, Rational::one());
                    }
                }
                sys.push_cong(&f, BigInt::from(p));
            }
        }
    }

    if opts.eigen_bounds {
        for (i, (lo, hi)) in eigen_bounds(table, n).into_iter().enumerate() {
            sys.push_ge(AffineForm::variable(i).add(&AffineForm::constant(-lo)));
            sys.push_ge(AffineForm::variable(i).neg().add(&AffineForm::constant(hi)));
        }
    }

    if let Some(q) = &opts.quotient {
        let f = q.fusion;
        if f.source.group_name != table.group_name || f.map.len() != table.classes.len() {
            return Err(HelpError::PPart(format!("fusion source {} is not {}", f.source.group_name, table.group_name)));
        }
        for c in 0..f.target.classes.len() {
            let mut form = AffineForm::constant(Rational::from_integer((-q.image.get(c)).into()));
            for (i, &x) in cands.iter().enumerate() {
                if f.map[x] == c {
                    form.add_term(i, Rational::one());
                }
            }
            sys.push_eq(form);
        }
    }

    if let Some(p) = opts.p_part {
        let q = opts.quotient.as_ref().ok_or_else(|| HelpError::PPart("p-part constraints need a quotient".into()))?;
        if q.fusion.kernel_p_group != Some(p) {
            return Err(HelpError::PPart(format!("fusion kernel is not known to be a {p}-group")));
        }
        if q.image.unit_order >= n {
            return Err(HelpError::PPart(format!(
                "image of order {} is not smaller than {n}",
                q.image.unit_order
            )));
        }
        let pn = p_part(n, p);
        for (i, &x) in cands.iter().enumerate() {
            if p_part(table.classes[x].element_order, p) < pn {
                sys.push_eq(AffineForm::variable(i));
            }
        }
    }
    Ok(sys)
}
