use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Deserialize;

use super::{BrauerTable, Character, CharacterTable, ClassFusion, ConjugacyClass, TableError};
use crate::cyclotomic::parse_cyclotomic;
use crate::numtheory::{gcd, lcm, prime_divisors};
use crate::{Cyc, Rational};

pub const TABLE_FORMAT_VERSION: u64 = 1;
pub const FUSION_FORMAT_VERSION: u64 = 1;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TableDoc {
    #[serde(default = "default_version")]
    format_version: u64,
    group_name: String,
    order: u64,
    exponent: u64,
    classes: Vec<ClassDoc>,
    characters: Vec<CharacterDoc>,
    #[serde(default)]
    brauer: BTreeMap<u64, BrauerDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassDoc {
    name: String,
    order: u64,
    size: u64,
    power_map: BTreeMap<u64, String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CharacterDoc {
    name: String,
    degree: u64,
    values: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BrauerDoc {
    classes: Vec<String>,
    characters: Vec<CharacterDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FusionDoc {
    #[serde(default = "default_version")]
    format_version: u64,
    source: String,
    target: String,
    map: Vec<String>,
    #[serde(default)]
    kernel_p_group: Option<u64>,
}

fn default_version() -> u64 {
    1
}

fn read(path: &Path) -> Result<String, TableError> {
    std::fs::read_to_string(path).map_err(|source| TableError::Io { path: path.display().to_string(), source })
}

pub fn load_table_file(path: impl AsRef<Path>) -> Result<CharacterTable, TableError> {
    load_table(&read(path.as_ref())?)
}

/// Parses and fully validates a table document.
pub fn load_table(document: &str) -> Result<CharacterTable, TableError> {
    let doc: TableDoc = serde_json::from_str(document)?;
    if doc.format_version != TABLE_FORMAT_VERSION {
        return Err(TableError::FormatVersion(doc.format_version));
    }
    let mut names = BTreeMap::new();
    for (i, c) in doc.classes.iter().enumerate() {
        if names.insert(c.name.clone(), i).is_some() {
            return Err(TableError::DuplicateClass(c.name.clone()));
        }
    }
    let lookup = |n: &str| names.get(n).copied().ok_or_else(|| TableError::UnknownClass(n.to_string()));

    let mut classes = Vec::with_capacity(doc.classes.len());
    for c in &doc.classes {
        let mut power_map = BTreeMap::new();
        for (&p, img) in &c.power_map {
            power_map.insert(p, lookup(img)?);
        }
        classes.push(ConjugacyClass { name: c.name.clone(), element_order: c.order, size: c.size, power_map });
    }
    let characters = doc
        .characters
        .iter()
        .map(|c| parse_character(c, &classes.iter().map(|c| c.name.as_str()).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>, _>>()?;

    let mut table = CharacterTable {
        group_name: doc.group_name,
        order: doc.order,
        exponent: doc.exponent,
        classes,
        characters,
        brauer: BTreeMap::new(),
        galois: Vec::new(),
    };
    check_classes(&table)?;
    check_characters(&table)?;
    check_orthogonality(&table)?;
    table.galois = galois_classes(&table)?;
    check_galois_values(&table, &table.characters, &(0..table.classes.len()).collect::<Vec<_>>())?;

    for (p, b) in doc.brauer {
        let idx = b.classes.iter().map(|n| lookup(n)).collect::<Result<Vec<_>, _>>()?;
        let names: Vec<&str> = b.classes.iter().map(String::as_str).collect();
        let chars = b.characters.iter().map(|c| parse_character(c, &names)).collect::<Result<Vec<_>, _>>()?;
        let bt = BrauerTable { prime: p, classes: idx, characters: chars };
        check_brauer(&table, &bt)?;
        table.brauer.insert(p, bt);
    }
    Ok(table)
}

fn parse_character(doc: &CharacterDoc, class_names: &[&str]) -> Result<Character, TableError> {
    if doc.values.len() != class_names.len() {
        return Err(TableError::ValueCount {
            character: doc.name.clone(),
            found: doc.values.len(),
            expected: class_names.len(),
        });
    }
    let values = doc
        .values
        .iter()
        .zip(class_names)
        .map(|(v, class)| {
            parse_cyclotomic::<BigInt>(v).map_err(|source| TableError::Value {
                character: doc.name.clone(),
                class: class.to_string(),
                source,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    check_degree(&doc.name, doc.degree, &values[0])?;
    Ok(Character { name: doc.name.clone(), degree: doc.degree, values })
}

fn check_degree(name: &str, degree: u64, value: &Cyc) -> Result<(), TableError> {
    if degree == 0 || *value != Cyc::from_integer(degree as i64) {
        return Err(TableError::DegreeMismatch { character: name.to_string(), degree, value: value.to_string() });
    }
    Ok(())
}

fn check_classes(t: &CharacterTable) -> Result<(), TableError> {
    match t.classes.first() {
        Some(c) if c.element_order == 1 && c.size == 1 => {}
        _ => return Err(TableError::Identity),
    }
    if let Some(c) = t.classes.iter().find(|c| c.size == 0 || !t.order.is_multiple_of(c.size)) {
        return Err(TableError::SizeDivides { class: c.name.clone(), size: c.size });
    }
    let sum: u64 = t.classes.iter().map(|c| c.size).sum();
    if sum != t.order {
        return Err(TableError::ClassSizes { sum, order: t.order });
    }
    let mut exp = 1;
    for c in &t.classes {
        if c.element_order == 0 {
            return Err(TableError::Exponent { stated: t.exponent, computed: 0 });
        }
        exp = lcm(exp, c.element_order);
    }
    if exp != t.exponent {
        return Err(TableError::Exponent { stated: t.exponent, computed: exp });
    }
    if t.classes.iter().skip(1).any(|c| c.element_order == 1) {
        return Err(TableError::Identity);
    }
    let primes = prime_divisors(t.exponent);
    for c in &t.classes {
        let err = |p: u64, reason: &str| TableError::PowerMap { class: c.name.clone(), prime: p, reason: reason.into() };
        for &p in &primes {
            let Some(&img) = c.power_map.get(&p) else {
                return Err(err(p, "missing"));
            };
            let o = c.element_order;
            let want = if o % p == 0 { o / p } else { o };
            if t.classes[img].element_order != want {
                return Err(err(p, &format!("image has order {}, expected {want}", t.classes[img].element_order)));
            }
        }
        if let Some(&p) = c.power_map.keys().find(|p| !primes.contains(p)) {
            return Err(err(p, "prime does not divide the exponent"));
        }
    }
    Ok(())
}

fn check_characters(t: &CharacterTable) -> Result<(), TableError> {
    if t.characters.len() != t.classes.len() {
        return Err(TableError::NotSquare { classes: t.classes.len(), characters: t.characters.len() });
    }
    check_conductors(&t.characters, &t.classes.iter().collect::<Vec<_>>())?;
    let sum: u64 = t.characters.iter().map(|c| c.degree * c.degree).sum();
    if sum != t.order {
        return Err(TableError::DegreeSquares { sum, order: t.order });
    }
    Ok(())
}

fn check_conductors(chars: &[Character], classes: &[&ConjugacyClass]) -> Result<(), TableError> {
    for chi in chars {
        for (v, c) in chi.values.iter().zip(classes) {
            if c.element_order % v.conductor() != 0 {
                return Err(TableError::Conductor {
                    character: chi.name.clone(),
                    class: c.name.clone(),
                    conductor: v.conductor(),
                });
            }
        }
    }
    Ok(())
}

fn int(n: u64) -> Cyc {
    Cyc::from_rational(Rational::from_integer(BigInt::from(n)))
}

fn check_orthogonality(t: &CharacterTable) -> Result<(), TableError> {
    let h = t.classes.len();
    let conj: Vec<Vec<Cyc>> = t.characters.iter().map(|c| c.values.iter().map(Cyc::conj).collect()).collect();
    let sizes: Vec<Cyc> = t.classes.iter().map(|c| int(c.size)).collect();
    for a in 0..h {
        for b in a..h {
            let mut s = Cyc::zero();
            for i in 0..h {
                s = &s + &(&sizes[i] * &(&t.characters[a].values[i] * &conj[b][i]));
            }
            let want = if a == b { int(t.order) } else { Cyc::zero() };
            if s != want {
                return Err(TableError::RowOrthogonality {
                    first: t.characters[a].name.clone(),
                    second: t.characters[b].name.clone(),
                });
            }
        }
    }
    for i in 0..h {
        for j in i..h {
            let mut s = Cyc::zero();
            for (chi, cc) in t.characters.iter().zip(&conj) {
                s = &s + &(&chi.values[i] * &cc[j]);
            }
            let want = if i == j {
                Cyc::from_rational(Rational::new(BigInt::from(t.order), BigInt::from(t.classes[i].size)))
            } else {
                Cyc::zero()
            };
            if s != want {
                return Err(TableError::ColumnOrthogonality {
                    first: t.classes[i].name.clone(),
                    second: t.classes[j].name.clone(),
                });
            }
        }
    }
    Ok(())
}

/// For every class `c` and unit `k` modulo its order, the class whose column
/// is the `k`-th Galois image of column `c`. Columns are pairwise distinct, so
/// the match is unique when it exists.
fn galois_classes(t: &CharacterTable) -> Result<Vec<Vec<usize>>, TableError> {
    let mut out = Vec::with_capacity(t.classes.len());
    for (c, class) in t.classes.iter().enumerate() {
        let o = class.element_order;
        let mut row = vec![usize::MAX; o as usize];
        for k in 1..o.max(2) {
            if gcd(k, o) != 1 {
                continue;
            }
            if k == 1 {
                row[1 % o as usize] = c;
                continue;
            }
            let image: Vec<Cyc> = t
                .characters
                .iter()
                .map(|chi| chi.values[c].galois(k as i64).expect("conductor divides the element order"))
                .collect();
            let found = (0..t.classes.len()).find(|&d| {
                t.classes[d].element_order == o && t.characters.iter().zip(&image).all(|(chi, v)| &chi.values[d] == v)
            });
            match found {
                Some(d) => row[k as usize] = d,
                None => return Err(TableError::Galois { class: class.name.clone(), k }),
            }
        }
        out.push(row);
    }
    Ok(out)
}

/// Values on `x^p` for primes `p` coprime to the element order must be the
/// `p`-th Galois conjugates of the values on `x`.
fn check_galois_values(t: &CharacterTable, chars: &[Character], classes: &[usize]) -> Result<(), TableError> {
    for (pos, &c) in classes.iter().enumerate() {
        let class = &t.classes[c];
        for (&p, &img) in &class.power_map {
            if class.element_order.is_multiple_of(p) {
                continue;
            }
            let Ok(ipos) = classes.binary_search(&img) else { continue };
            let det = t.galois[c][(p % class.element_order) as usize];
            if class.element_order > 1 && det != img {
                return Err(TableError::GaloisValue { character: "(columns)".into(), class: class.name.clone(), k: p });
            }
            for chi in chars {
                if chi.values[ipos] != chi.values[pos].galois(p as i64).expect("coprime to the conductor") {
                    return Err(TableError::GaloisValue {
                        character: chi.name.clone(),
                        class: class.name.clone(),
                        k: p,
                    });
                }
            }
        }
    }
    Ok(())
}

fn check_brauer(t: &CharacterTable, b: &BrauerTable) -> Result<(), TableError> {
    let err = |reason: String| TableError::Brauer { prime: b.prime, reason };
    if !t.order.is_multiple_of(b.prime) || prime_divisors(b.prime) != vec![b.prime] {
        return Err(err("not a prime divisor of the group order".into()));
    }
    let regular: Vec<usize> = (0..t.classes.len()).filter(|&i| !t.classes[i].element_order.is_multiple_of(b.prime)).collect();
    if b.classes != regular {
        return Err(err("listed classes are not the p-regular classes in table order".into()));
    }
    if b.characters.len() != regular.len() {
        return Err(err(format!("{} characters on {} p-regular classes", b.characters.len(), regular.len())));
    }
    let classes: Vec<&ConjugacyClass> = regular.iter().map(|&i| &t.classes[i]).collect();
    check_conductors(&b.characters, &classes)?;
    check_galois_values(t, &b.characters, &regular)?;
    check_decomposition(t, b, &regular)
}

fn approx(c: &Cyc) -> (f64, f64) {
    let n = c.conductor().max(1) as f64;
    c.coefficients().fold((0.0, 0.0), |(re, im), (k, q)| {
        let q = q.to_f64().unwrap_or(f64::NAN);
        let a = std::f64::consts::TAU * k as f64 / n;
        (re + q * a.cos(), im + q * a.sin())
    })
}

/// Solves `a x = rhs` for square `a` by Gaussian elimination; `None` if singular.
fn solve_dense(mut a: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-9 {
            return None;
        }
        a.swap(col, piv);
        rhs.swap(col, piv);
        let pivot = a[col].clone();
        for row in (0..n).filter(|&r| r != col) {
            let f = a[row][col] / pivot[col];
            for (x, p) in a[row].iter_mut().zip(&pivot).skip(col) {
                *x -= f * p;
            }
            rhs[row] -= f * rhs[col];
        }
    }
    Some((0..n).map(|i| rhs[i] / a[i][i]).collect())
}

/// Every ordinary character restricted to the p-regular classes must be a
/// nonnegative integer combination of the Brauer characters. The combination
/// is found numerically and then verified exactly.
fn check_decomposition(t: &CharacterTable, b: &BrauerTable, regular: &[usize]) -> Result<(), TableError> {
    let err = |reason: String| TableError::Brauer { prime: b.prime, reason };
    let r = regular.len();
    // Real and imaginary parts stacked, then normal equations.
    let rows: Vec<Vec<f64>> = (0..r)
        .flat_map(|c| {
            let parts: Vec<(f64, f64)> = b.characters.iter().map(|phi| approx(&phi.values[c])).collect();
            [parts.iter().map(|p| p.0).collect::<Vec<_>>(), parts.iter().map(|p| p.1).collect()]
        })
        .collect();
    let gram: Vec<Vec<f64>> =
        (0..r).map(|i| (0..r).map(|j| rows.iter().map(|row| row[i] * row[j]).sum()).collect()).collect();
    for chi in &t.characters {
        let target: Vec<f64> = regular
            .iter()
            .flat_map(|&c| {
                let (re, im) = approx(&chi.values[c]);
                [re, im]
            })
            .collect();
        let rhs: Vec<f64> = (0..r).map(|i| rows.iter().zip(&target).map(|(row, y)| row[i] * y).sum()).collect();
        let x = solve_dense(gram.clone(), rhs).ok_or_else(|| err("characters are linearly dependent".into()))?;
        let d: Vec<i64> = x.iter().map(|v| v.round() as i64).collect();
        let exact = (0..r).all(|c| {
            let sum = b.characters.iter().zip(&d).fold(Cyc::zero(), |acc, (phi, &k)| {
                &acc + &phi.values[c].scale(&Rational::from_integer(BigInt::from(k)))
            });
            sum == chi.values[regular[c]]
        });
        if !exact || d.iter().any(|&k| k < 0) {
            return Err(err(format!("{} is not a nonnegative integer combination", chi.name)));
        }
    }
    Ok(())
}

pub fn load_fusion_file(
    path: impl AsRef<Path>,
    source: Arc<CharacterTable>,
    target: Arc<CharacterTable>,
) -> Result<ClassFusion, TableError> {
    load_fusion(&read(path.as_ref())?, source, target)
}

/// Parses a fusion document against already loaded tables and validates it.
pub fn load_fusion(
    document: &str,
    source: Arc<CharacterTable>,
    target: Arc<CharacterTable>,
) -> Result<ClassFusion, TableError> {
    let doc: FusionDoc = serde_json::from_str(document)?;
    if doc.format_version != FUSION_FORMAT_VERSION {
        return Err(TableError::FormatVersion(doc.format_version));
    }
    if doc.source != source.group_name || doc.target != target.group_name {
        return Err(TableError::Fusion(format!(
            "document maps {} -> {}, tables are {} -> {}",
            doc.source, doc.target, source.group_name, target.group_name
        )));
    }
    let map = doc
        .map
        .iter()
        .map(|n| target.class_index(n).ok_or_else(|| TableError::UnknownClass(n.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    let fusion = ClassFusion { source, target, map, kernel_p_group: doc.kernel_p_group };
    check_fusion(&fusion)?;
    Ok(fusion)
}

fn check_fusion(f: &ClassFusion) -> Result<(), TableError> {
    let (s, t) = (&f.source, &f.target);
    if f.map.len() != s.classes.len() {
        return Err(TableError::Fusion(format!("map has {} entries, source has {} classes", f.map.len(), s.classes.len())));
    }
    if t.order == 0 || s.order % t.order != 0 {
        return Err(TableError::Fusion("target order does not divide source order".into()));
    }
    if f.map[0] != 0 {
        return Err(TableError::Fusion("identity must map to identity".into()));
    }
    for (i, &img) in f.map.iter().enumerate() {
        if s.classes[i].element_order % t.classes[img].element_order != 0 {
            return Err(TableError::Fusion(format!(
                "order of image {} does not divide order of {}",
                t.classes[img].name, s.classes[i].name
            )));
        }
    }
    let n = f.kernel_order();
    for (c, class) in t.classes.iter().enumerate() {
        let sum: u64 = f.map.iter().zip(&s.classes).filter(|(&m, _)| m == c).map(|(_, x)| x.size).sum();
        if sum != class.size * n {
            return Err(TableError::Fusion(format!(
                "preimages of {} have total size {sum}, expected {}",
                class.name,
                class.size * n
            )));
        }
    }
    if let Some(p) = f.kernel_p_group {
        if prime_divisors(n).iter().any(|&q| q != p) {
            return Err(TableError::Fusion(format!("kernel of order {n} is not a {p}-group")));
        }
    }
    Ok(())
}
