//! Even lattices and their discriminant modules ℒ(n) = (1/n)L'/L.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalars::{fmt_fraction, int, mod_one, Cyclotomic, Fraction, PhaseSum};
use crate::snf::smith;

/// Maximum number of items any single enumeration may visit.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// Enumeration budget, overridable through `WEILHECKE_BUDGET`.
pub fn enumeration_budget() -> u128 {
    std::env::var("WEILHECKE_BUDGET")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

pub fn check_budget(needed: u128) -> Result<()> {
    let limit = enumeration_budget();
    if needed > limit {
        return Err(Error::BudgetExceeded { needed, limit });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvenLattice {
    gram: Vec<Vec<i64>>,
    #[serde(default)]
    name: Option<String>,
}

impl EvenLattice {
    pub fn new(gram: Vec<Vec<i64>>, name: Option<String>) -> Result<Self> {
        let d = gram.len();
        if d == 0 || gram.iter().any(|r| r.len() != d) {
            return Err(Error::schema("gram", "must be a nonempty square matrix"));
        }
        for i in 0..d {
            for j in 0..d {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::NotSymmetric);
                }
            }
            if gram[i][i] % 2 != 0 {
                return Err(Error::NotEven(gram[i][i]));
            }
        }
        let l = EvenLattice { gram, name };
        if l.det().is_zero() {
            return Err(Error::DegenerateLattice);
        }
        Ok(l)
    }

    /// Validates a deserialized value.
    pub fn validated(self) -> Result<Self> {
        EvenLattice::new(self.gram, self.name)
    }

    pub fn a1() -> Self {
        Self::new(vec![vec![2]], Some("A1".into())).unwrap()
    }

    pub fn a1a1() -> Self {
        Self::new(vec![vec![2, 0], vec![0, 2]], Some("A1+A1".into())).unwrap()
    }

    pub fn a2() -> Self {
        Self::new(vec![vec![2, 1], vec![1, 2]], Some("A2".into())).unwrap()
    }

    pub fn e8() -> Self {
        let g = vec![
            vec![2, -1, 0, 0, 0, 0, 0, 0],
            vec![-1, 2, -1, 0, 0, 0, 0, 0],
            vec![0, -1, 2, -1, 0, 0, 0, -1],
            vec![0, 0, -1, 2, -1, 0, 0, 0],
            vec![0, 0, 0, -1, 2, -1, 0, 0],
            vec![0, 0, 0, 0, -1, 2, -1, 0],
            vec![0, 0, 0, 0, 0, -1, 2, 0],
            vec![0, 0, -1, 0, 0, 0, 0, 2],
        ];
        Self::new(g, Some("E8".into())).unwrap()
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name.to_ascii_uppercase().replace(['⊕', ' '], "+").as_str() {
            "A1" => Some(Self::a1()),
            "A1+A1" | "A1A1" | "2A1" => Some(Self::a1a1()),
            "A2" => Some(Self::a2()),
            "E8" => Some(Self::e8()),
            _ => None,
        }
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn name(&self) -> String {
        self.name.clone().unwrap_or_else(|| format!("{:?}", self.gram))
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    fn minor_det(&self, k: usize) -> BigInt {
        // Bareiss on the leading k×k block
        let mut m: Vec<Vec<BigInt>> = (0..k)
            .map(|i| (0..k).map(|j| BigInt::from(self.gram[i][j])).collect())
            .collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for p in 0..k {
            if m[p][p].is_zero() {
                let Some(r) = (p + 1..k).find(|&r| !m[r][p].is_zero()) else {
                    return BigInt::zero();
                };
                m.swap(p, r);
                sign = -sign;
            }
            for i in p + 1..k {
                for j in p + 1..k {
                    m[i][j] = (&m[i][j] * &m[p][p] - &m[i][p] * &m[p][j]) / &prev;
                }
            }
            prev = m[p][p].clone();
        }
        if k == 0 {
            BigInt::one()
        } else {
            sign * &m[k - 1][k - 1]
        }
    }

    pub fn det(&self) -> BigInt {
        self.minor_det(self.rank())
    }

    pub fn is_positive_definite(&self) -> bool {
        (1..=self.rank()).all(|k| self.minor_det(k).is_positive())
    }

    /// xᵀ G y for rational vectors.
    pub fn bilinear(&self, x: &[Fraction], y: &[Fraction]) -> Fraction {
        let mut acc = Fraction::zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            let mut row = Fraction::zero();
            for (j, yj) in y.iter().enumerate() {
                if self.gram[i][j] != 0 && !yj.is_zero() {
                    row += yj * int(self.gram[i][j]);
                }
            }
            acc += xi * row;
        }
        acc
    }

    /// q(x) = xᵀ G x / 2.
    pub fn q(&self, x: &[Fraction]) -> Fraction {
        self.bilinear(x, x) / int(2)
    }

    /// yᵀ G y for an integer vector.
    pub fn norm_int(&self, y: &[i128]) -> i128 {
        let d = self.rank();
        let mut acc = 0i128;
        for i in 0..d {
            if y[i] == 0 {
                continue;
            }
            let mut row = 0i128;
            for j in 0..d {
                row += self.gram[i][j] as i128 * y[j];
            }
            acc += y[i] * row;
        }
        acc
    }

    pub fn bilinear_int(&self, x: &[i128], y: &[i128]) -> i128 {
        let d = self.rank();
        let mut acc = 0i128;
        for i in 0..d {
            if x[i] == 0 {
                continue;
            }
            for j in 0..d {
                acc += x[i] * self.gram[i][j] as i128 * y[j];
            }
        }
        acc
    }
}

impl fmt::Display for EvenLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// Common-denominator form x = num/den of a rational vector.
pub fn integral_form(x: &[Fraction]) -> (Vec<i128>, i128) {
    let den = x.iter().fold(BigInt::one(), |d, c| d.lcm(c.denom()));
    let num = x
        .iter()
        .map(|c| (c.numer() * (&den / c.denom())).to_i128().expect("coordinate overflow"))
        .collect();
    (num, den.to_i128().expect("denominator overflow"))
}

/// All v ∈ {0..a-1}^D, last coordinate fastest.
pub struct CosetIter {
    a: i64,
    cur: Vec<i64>,
    done: bool,
}

impl Iterator for CosetIter {
    type Item = Vec<i64>;
    fn next(&mut self) -> Option<Vec<i64>> {
        if self.done {
            return None;
        }
        let out = self.cur.clone();
        let mut i = self.cur.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.cur[i] += 1;
            if self.cur[i] < self.a {
                break;
            }
            self.cur[i] = 0;
        }
        Some(out)
    }
}

/// Representatives of L/aL.
pub fn enumerate_cosets(lattice: &EvenLattice, a: u64) -> Result<CosetIter> {
    let d = lattice.rank() as u32;
    let needed = (a as u128).checked_pow(d).unwrap_or(u128::MAX);
    check_budget(needed)?;
    Ok(CosetIter {
        a: a as i64,
        cur: vec![0; lattice.rank()],
        done: a == 0,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModuleElement {
    coords: Vec<Fraction>,
}

impl ModuleElement {
    /// Raw constructor; no membership check and no reduction.
    pub fn from_coords(coords: Vec<Fraction>) -> Self {
        ModuleElement { coords }
    }

    pub fn coords(&self) -> &[Fraction] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// Shift the representative by an integer vector.
    pub fn shifted(&self, w: &[i64]) -> ModuleElement {
        ModuleElement {
            coords: self
                .coords
                .iter()
                .zip(w)
                .map(|(c, w)| c + int(*w))
                .collect(),
        }
    }

    pub fn scaled(&self, k: &Fraction) -> ModuleElement {
        ModuleElement {
            coords: self.coords.iter().map(|c| c * k).collect(),
        }
    }

    pub fn reduced(&self) -> ModuleElement {
        ModuleElement {
            coords: self.coords.iter().map(mod_one).collect(),
        }
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coords.iter().map(fmt_fraction).collect()
    }
}

impl fmt::Display for ModuleElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_strings().join(", "))
    }
}

/// ℒ(n) for an even lattice L, with a fixed enumeration order.
#[derive(Clone, Debug)]
pub struct FqModule {
    lattice: Arc<EvenLattice>,
    scale: u64,
    divisors: Vec<u64>,
    gens: Vec<Vec<Fraction>>,
    // rows of V⁻¹ paired with their divisor, restricted to nontrivial divisors
    coords_to_tuple: Vec<(Vec<BigInt>, u64)>,
    order: u64,
}

impl PartialEq for FqModule {
    fn eq(&self, other: &Self) -> bool {
        self.scale == other.scale && self.lattice.gram == other.lattice.gram
    }
}

impl Eq for FqModule {}

impl FqModule {
    pub fn build(lattice: &EvenLattice, n: u64) -> Result<Arc<Self>> {
        Self::build_shared(Arc::new(lattice.clone()), n)
    }

    pub fn build_shared(lattice: Arc<EvenLattice>, n: u64) -> Result<Arc<Self>> {
        if n == 0 {
            return Err(Error::RangeError("scale must be positive".into()));
        }
        let d = lattice.rank();
        let a: Vec<Vec<BigInt>> = lattice
            .gram
            .iter()
            .map(|r| r.iter().map(|x| BigInt::from(*x) * n).collect())
            .collect();
        let s = smith(&a);
        let mut divisors = Vec::new();
        let mut gens = Vec::new();
        let mut c2t = Vec::new();
        for i in 0..d {
            let di = s.diagonal[i].to_u64().ok_or_else(|| Error::RangeError("module too large".into()))?;
            if di == 1 {
                continue;
            }
            divisors.push(di);
            let g: Vec<Fraction> = (0..d)
                .map(|r| mod_one(&Fraction::new(s.v[r][i].clone(), BigInt::from(di))))
                .collect();
            gens.push(g);
            c2t.push((s.v_inv[i].clone(), di));
        }
        let order = divisors
            .iter()
            .try_fold(1u64, |acc, d| acc.checked_mul(*d))
            .ok_or_else(|| Error::RangeError("module too large".into()))?;
        Ok(Arc::new(FqModule {
            lattice,
            scale: n,
            divisors,
            gens,
            coords_to_tuple: c2t,
            order,
        }))
    }

    pub fn lattice(&self) -> &EvenLattice {
        &self.lattice
    }

    pub fn lattice_arc(&self) -> Arc<EvenLattice> {
        self.lattice.clone()
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    /// Nontrivial elementary divisors d_1 | d_2 | …
    pub fn divisors(&self) -> &[u64] {
        &self.divisors
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// The module ℒ(n·k) over the same lattice.
    pub fn rescaled(&self, k: u64) -> Result<Arc<FqModule>> {
        FqModule::build_shared(self.lattice.clone(), self.scale * k)
    }

    /// True iff `scale·G·x` is integral.
    pub fn contains(&self, coords: &[Fraction]) -> bool {
        self.contains_at_scale(coords, self.scale)
    }

    /// True iff x lies in the submodule ℒ(l), i.e. l·G·x is integral.
    pub fn contains_at_scale(&self, coords: &[Fraction], l: u64) -> bool {
        let d = self.rank();
        if coords.len() != d {
            return false;
        }
        (0..d).all(|i| {
            let mut acc = Fraction::zero();
            for (j, c) in coords.iter().enumerate() {
                acc += c * int(self.lattice.gram[i][j]);
            }
            (acc * int(l as i64)).denom().is_one()
        })
    }

    pub fn element(&self, coords: Vec<Fraction>) -> Result<ModuleElement> {
        let e = ModuleElement::from_coords(coords);
        if !self.contains(&e.coords) {
            return Err(Error::MembershipViolation(e.to_string()));
        }
        Ok(e.reduced())
    }

    pub fn zero(&self) -> ModuleElement {
        ModuleElement::from_coords(vec![Fraction::zero(); self.rank()])
    }

    fn check(&self, x: &ModuleElement) -> Result<()> {
        if self.contains(&x.coords) {
            Ok(())
        } else {
            Err(Error::MembershipViolation(x.to_string()))
        }
    }

    pub fn tuple_of(&self, x: &ModuleElement) -> Result<Vec<u64>> {
        self.check(x)?;
        Ok(self.tuple_unchecked(&x.coords))
    }

    fn tuple_unchecked(&self, coords: &[Fraction]) -> Vec<u64> {
        self.coords_to_tuple
            .iter()
            .map(|(row, d)| {
                let mut acc = Fraction::zero();
                for (r, c) in row.iter().zip(coords) {
                    if !r.is_zero() {
                        acc += c * Fraction::from_integer(r.clone());
                    }
                }
                let y = acc * int(*d as i64);
                debug_assert!(y.denom().is_one());
                y.numer().mod_floor(&BigInt::from(*d)).to_u64().unwrap()
            })
            .collect()
    }

    pub fn element_of_tuple(&self, t: &[u64]) -> ModuleElement {
        let d = self.rank();
        let mut coords = vec![Fraction::zero(); d];
        for (a, g) in t.iter().zip(&self.gens) {
            if *a == 0 {
                continue;
            }
            for i in 0..d {
                coords[i] += &g[i] * int(*a as i64);
            }
        }
        ModuleElement::from_coords(coords).reduced()
    }

    pub fn index_of_tuple(&self, t: &[u64]) -> usize {
        let mut idx = 0u64;
        for (a, d) in t.iter().zip(&self.divisors) {
            idx = idx * d + a;
        }
        idx as usize
    }

    pub fn tuple_of_index(&self, mut idx: usize) -> Vec<u64> {
        let mut t = vec![0u64; self.divisors.len()];
        for i in (0..t.len()).rev() {
            let d = self.divisors[i] as usize;
            t[i] = (idx % d) as u64;
            idx /= d;
        }
        t
    }

    pub fn index_of(&self, x: &ModuleElement) -> Result<usize> {
        Ok(self.index_of_tuple(&self.tuple_of(x)?))
    }

    /// Index of any representative given by raw coordinates.
    pub fn index_of_coords(&self, coords: &[Fraction]) -> Result<usize> {
        if !self.contains(coords) {
            return Err(Error::MembershipViolation(
                ModuleElement::from_coords(coords.to_vec()).to_string(),
            ));
        }
        Ok(self.index_of_tuple(&self.tuple_unchecked(coords)))
    }

    pub fn element_at(&self, idx: usize) -> ModuleElement {
        self.element_of_tuple(&self.tuple_of_index(idx))
    }

    /// Every element once, in enumeration order.
    pub fn enumerate(&self) -> Result<Vec<ModuleElement>> {
        check_budget(self.order as u128)?;
        Ok((0..self.order as usize).map(|i| self.element_at(i)).collect())
    }

    /// q_n of the canonical representative (or of whatever representative is passed).
    pub fn q_lift(&self, x: &ModuleElement) -> Result<Fraction> {
        self.check(x)?;
        Ok(self.lattice.q(&x.coords) * int(self.scale as i64))
    }

    pub fn q_value(&self, x: &ModuleElement) -> Result<Fraction> {
        Ok(mod_one(&self.q_lift(x)?))
    }

    pub fn b_value(&self, x: &ModuleElement, y: &ModuleElement) -> Result<Fraction> {
        self.check(x)?;
        self.check(y)?;
        Ok(mod_one(
            &(self.lattice.bilinear(&x.coords, &y.coords) * int(self.scale as i64)),
        ))
    }

    pub fn add(&self, x: &ModuleElement, y: &ModuleElement) -> ModuleElement {
        ModuleElement::from_coords(x.coords.iter().zip(&y.coords).map(|(a, b)| a + b).collect())
            .reduced()
    }

    pub fn neg(&self, x: &ModuleElement) -> ModuleElement {
        x.scaled(&int(-1)).reduced()
    }

    pub fn mul(&self, x: &ModuleElement, k: i64) -> ModuleElement {
        x.scaled(&int(k)).reduced()
    }

    /// {kμ : μ ∈ ℒ}, in enumeration order.
    pub fn multiples_subgroup(&self, k: u64) -> Result<Vec<ModuleElement>> {
        check_budget(self.order as u128)?;
        let set: BTreeSet<usize> = (0..self.order as usize)
            .map(|i| {
                let t: Vec<u64> = self
                    .tuple_of_index(i)
                    .iter()
                    .zip(&self.divisors)
                    .map(|(a, d)| (a * (k % d)) % d)
                    .collect();
                self.index_of_tuple(&t)
            })
            .collect();
        Ok(set.into_iter().map(|i| self.element_at(i)).collect())
    }

    pub fn is_multiple(&self, x: &ModuleElement, k: u64) -> Result<bool> {
        let t = self.tuple_of(x)?;
        Ok(t.iter()
            .zip(&self.divisors)
            .all(|(a, d)| a % gcd(k % d, *d) == 0))
    }

    /// {μ : kμ = 0}.
    pub fn torsion_subgroup(&self, k: u64) -> Vec<ModuleElement> {
        self.preimage_tuples(&vec![0; self.divisors.len()], k)
            .into_iter()
            .map(|t| self.element_of_tuple(&t))
            .collect()
    }

    fn preimage_tuples(&self, target: &[u64], k: u64) -> Vec<Vec<u64>> {
        // per cyclic factor: solutions of k·a ≡ b mod d
        let per: Vec<Vec<u64>> = target
            .iter()
            .zip(&self.divisors)
            .map(|(b, d)| (0..*d).filter(|a| (a * (k % d)) % d == *b).collect())
            .collect();
        let mut out = vec![vec![]];
        for choices in per {
            let mut next = Vec::with_capacity(out.len() * choices.len());
            for prefix in &out {
                for c in &choices {
                    let mut t = prefix.clone();
                    t.push(*c);
                    next.push(t);
                }
            }
            out = next;
        }
        out
    }

    /// {μ : kμ = λ}, in enumeration order.
    pub fn preimages(&self, x: &ModuleElement, k: u64) -> Result<Vec<ModuleElement>> {
        let t = self.tuple_of(x)?;
        Ok(self
            .preimage_tuples(&t, k)
            .into_iter()
            .map(|t| self.element_of_tuple(&t))
            .collect())
    }

    /// The enumeration-first preimage of λ under multiplication by k.
    pub fn divide(&self, x: &ModuleElement, k: u64) -> Result<ModuleElement> {
        self.preimages(x, k)?
            .into_iter()
            .next()
            .ok_or_else(|| Error::NonDivisible {
                element: x.to_string(),
                n: k,
            })
    }

    /// Σ_ν e(b(ν, x)).
    pub fn char_sum(&self, x: &ModuleElement) -> Result<Cyclotomic> {
        let mut acc = PhaseSum::new();
        for nu in self.enumerate()? {
            acc.add(&self.b_value(&nu, x)?, 1);
        }
        Ok(acc.to_cyclotomic())
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Serializable element with its scale, `{"coords": [...], "scale": n}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementRecord {
    pub coords: Vec<String>,
    pub scale: u64,
}

impl ElementRecord {
    pub fn new(module: &FqModule, x: &ModuleElement) -> Self {
        ElementRecord {
            coords: x.to_strings(),
            scale: module.scale(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::frac;

    #[test]
    fn module_sizes() {
        let a1 = EvenLattice::a1();
        assert_eq!(FqModule::build(&a1, 1).unwrap().divisors(), &[2]);
        assert_eq!(FqModule::build(&EvenLattice::a2(), 1).unwrap().divisors(), &[3]);
        assert_eq!(FqModule::build(&a1, 3).unwrap().order(), 6);
        assert_eq!(FqModule::build(&a1, 9).unwrap().enumerate().unwrap().len(), 18);
        let m = FqModule::build(&EvenLattice::a1a1(), 1).unwrap();
        assert_eq!(m.divisors(), &[2, 2]);
        assert_eq!(FqModule::build(&EvenLattice::e8(), 1).unwrap().order(), 1);
        assert_eq!(FqModule::build(&EvenLattice::e8(), 2).unwrap().order(), 256);
        assert_eq!(EvenLattice::e8().det(), BigInt::one());
        assert!(EvenLattice::e8().is_positive_definite());
    }

    #[test]
    fn lattice_validation() {
        assert_eq!(EvenLattice::new(vec![vec![1]], None), Err(Error::NotEven(1)));
        assert_eq!(
            EvenLattice::new(vec![vec![2, 2], vec![2, 2]], None),
            Err(Error::DegenerateLattice)
        );
        assert!(!EvenLattice::new(vec![vec![2, 3], vec![3, 2]], None)
            .unwrap()
            .is_positive_definite());
    }

    #[test]
    fn forms() {
        let m = FqModule::build(&EvenLattice::a1(), 1).unwrap();
        let g = m.element(vec![frac(1, 2)]).unwrap();
        assert_eq!(m.q_value(&g).unwrap(), frac(1, 4));
        assert_eq!(m.b_value(&g, &g).unwrap(), frac(1, 2));
        assert_eq!(m.b_value(&g, &m.zero()).unwrap(), frac(0, 1));
        let m = FqModule::build(&EvenLattice::a2(), 1).unwrap();
        let g = m.element(vec![frac(2, 3), frac(-1, 3)]).unwrap();
        assert_eq!(m.q_value(&g).unwrap(), frac(1, 3));
        assert_eq!(m.b_value(&g, &g).unwrap(), frac(2, 3));
        assert!(m.element(vec![frac(1, 2), frac(0, 1)]).is_err());
    }

    #[test]
    fn enumeration_is_consistent() {
        for (l, n) in [(EvenLattice::a2(), 3), (EvenLattice::a1a1(), 6), (EvenLattice::a1(), 4)] {
            let m = FqModule::build(&l, n).unwrap();
            let els = m.enumerate().unwrap();
            assert_eq!(els.len() as u64, m.order());
            for (i, x) in els.iter().enumerate() {
                assert_eq!(m.index_of(x).unwrap(), i);
                assert!(x.coords().iter().all(|c| c >= &Fraction::zero() && c < &Fraction::one()));
            }
            let set: BTreeSet<_> = els.iter().collect();
            assert_eq!(set.len(), els.len());
        }
        assert_eq!(enumerate_cosets(&EvenLattice::a1(), 3).unwrap().count(), 3);
        assert_eq!(enumerate_cosets(&EvenLattice::a2(), 4).unwrap().count(), 16);
    }

    #[test]
    fn subgroups() {
        let m = FqModule::build(&EvenLattice::a1a1(), 1).unwrap();
        assert_eq!(m.torsion_subgroup(2).len(), 4);
        assert_eq!(m.multiples_subgroup(3).unwrap().len(), 4);
        assert_eq!(m.multiples_subgroup(2).unwrap().len(), 1);
        let m2 = FqModule::build(&EvenLattice::a1(), 2).unwrap();
        let pre = m2.preimages(&m2.zero(), 2).unwrap();
        assert_eq!(pre.len(), 2);
        assert_eq!(pre[1].coords(), &[frac(1, 2)]);
        let g = m2.element(vec![frac(1, 4)]).unwrap();
        assert!(matches!(m2.divide(&g, 2), Err(Error::NonDivisible { .. })));
        let h = m2.element(vec![frac(1, 2)]).unwrap();
        let q = m2.divide(&h, 2).unwrap();
        assert_eq!(m2.mul(&q, 2), h);
        let a2 = FqModule::build(&EvenLattice::a2(), 1).unwrap();
        assert_eq!(a2.multiples_subgroup(3).unwrap().len(), 1);
    }

    #[test]
    fn character_sums() {
        let m = FqModule::build(&EvenLattice::a2(), 1).unwrap();
        assert_eq!(m.char_sum(&m.zero()).unwrap(), Cyclotomic::from_int(3));
        for x in m.enumerate().unwrap().iter().skip(1) {
            assert!(m.char_sum(x).unwrap().is_zero());
        }
        let m = FqModule::build(&EvenLattice::a1(), 1).unwrap();
        assert!(m.char_sum(&m.element_at(1)).unwrap().is_zero());
    }

    #[test]
    fn budget_guard() {
        assert!(matches!(
            enumerate_cosets(&EvenLattice::e8(), 9),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
