//! Exact arithmetic in cyclotomic fields.
//!
//! A [`Cyclotomic`] lives in Q(ζ_M) and is stored in the power basis
//! 1, ζ, …, ζ^{φ(M)-1} after reduction modulo the M-th cyclotomic polynomial.
//! Coefficients share one positive denominator so that the hot paths stay in
//! integer arithmetic.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Fraction = BigRational;

pub fn frac(n: i64, d: i64) -> Fraction {
    Fraction::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Fraction {
    Fraction::from_integer(BigInt::from(n))
}

/// Representative of `x` modulo 1 in [0, 1).
pub fn mod_one(x: &Fraction) -> Fraction {
    x - x.floor()
}

pub fn is_integer(x: &Fraction) -> bool {
    x.denom().is_one()
}

pub fn fmt_fraction(x: &Fraction) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_fraction(s: &str) -> Result<Fraction> {
    let bad = || Error::schema("fraction", format!("cannot parse {s:?}"));
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Fraction::new(n, d))
}

/// Serde adapter for fractions written as "a/b" strings.
pub mod fraction_serde {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Fraction, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_fraction(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Fraction, D::Error> {
        let s = String::deserialize(d)?;
        parse_fraction(&s).map_err(D::Error::custom)
    }
}

pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == vec![(n, 1)]
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

// ---------------------------------------------------------------------------
// reduction tables

struct CycloTable {
    phi: usize,
    /// `rows[j]` is ζ^j expressed in the power basis.
    rows: Vec<Vec<(u32, i64)>>,
}

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    // both low-to-high, den monic
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut q = vec![0i64; num.len() - dd];
    for i in (0..q.len()).rev() {
        let c = rem[i + dd];
        q[i] = c;
        if c != 0 {
            for (j, &d) in den.iter().enumerate() {
                rem[i + j] -= c * d;
            }
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0));
    q
}

fn cyclotomic_poly(m: u64) -> Vec<i64> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<i64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.lock().unwrap().get(&m) {
        return p.as_ref().clone();
    }
    let mut num = vec![0i64; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in 1..m {
        if m % d == 0 {
            num = poly_div_exact(&num, &cyclotomic_poly(d));
        }
    }
    cache.lock().unwrap().insert(m, Arc::new(num.clone()));
    num
}

fn table(order: u64) -> Arc<CycloTable> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<CycloTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.lock().unwrap().get(&order) {
        return t.clone();
    }
    let poly = cyclotomic_poly(order);
    let phi = poly.len() - 1;
    let m = order as usize;
    let mut rows = Vec::with_capacity(m);
    let mut cur = vec![0i64; phi];
    for j in 0..m {
        if j < phi {
            cur = vec![0i64; phi];
            cur[j] = 1;
        } else {
            // multiply previous row by ζ
            let top = cur[phi - 1];
            let mut next = vec![0i64; phi];
            next[1..phi].copy_from_slice(&cur[..phi - 1]);
            if top != 0 {
                for i in 0..phi {
                    next[i] -= top * poly[i];
                }
            }
            cur = next;
        }
        rows.push(
            cur.iter()
                .enumerate()
                .filter(|(_, c)| **c != 0)
                .map(|(i, c)| (i as u32, *c))
                .collect(),
        );
    }
    let t = Arc::new(CycloTable { phi, rows });
    cache.lock().unwrap().insert(order, t.clone());
    t
}

// ---------------------------------------------------------------------------
// Cyclotomic

#[derive(Clone)]
pub struct Cyclotomic {
    order: u64,
    den: BigInt,
    num: BTreeMap<u32, BigInt>,
}

impl Cyclotomic {
    pub fn zero() -> Self {
        Cyclotomic {
            order: 1,
            den: BigInt::one(),
            num: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::from_fraction(&Fraction::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_fraction(&int(n))
    }

    pub fn from_fraction(x: &Fraction) -> Self {
        let mut num = BTreeMap::new();
        if !x.is_zero() {
            num.insert(0, x.numer().clone());
        }
        Cyclotomic {
            order: 1,
            den: x.denom().clone(),
            num,
        }
        .normalized()
    }

    /// e(x) = exp(2πi x) in its natural field Q(ζ_b), b the reduced denominator of x mod 1.
    pub fn root_of_unity(x: &Fraction) -> Self {
        let y = mod_one(x);
        let order = y.denom().to_u64().expect("root of unity order too large");
        let idx = y.numer().to_u64().unwrap();
        Self::from_root_counts(order, &[(idx, 1)])
    }

    /// Σ c_j ζ_order^j for integer counts.
    pub fn from_root_counts(order: u64, counts: &[(u64, i64)]) -> Self {
        let t = table(order);
        let mut acc = vec![0i128; t.phi];
        for &(j, c) in counts {
            if c == 0 {
                continue;
            }
            for &(i, v) in &t.rows[(j % order) as usize] {
                acc[i as usize] += c as i128 * v as i128;
            }
        }
        let num = acc
            .into_iter()
            .enumerate()
            .filter(|(_, c)| *c != 0)
            .map(|(i, c)| (i as u32, BigInt::from(c)))
            .collect();
        Cyclotomic {
            order,
            den: BigInt::one(),
            num,
        }
        .normalized()
    }

    fn from_dense(order: u64, den: BigInt, dense: Vec<BigInt>) -> Self {
        let t = table(order);
        let mut acc = vec![BigInt::zero(); t.phi];
        for (j, c) in dense.into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for &(i, v) in &t.rows[j % order as usize] {
                acc[i as usize] += &c * v;
            }
        }
        let num = acc
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i as u32, c))
            .collect();
        Cyclotomic { order, den, num }.normalized()
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    /// Coefficients in the power basis of the stored order.
    pub fn terms(&self) -> Vec<(u32, Fraction)> {
        self.num
            .iter()
            .map(|(i, c)| (*i, Fraction::new(c.clone(), self.den.clone())))
            .collect()
    }

    pub fn to_fraction(&self) -> Option<Fraction> {
        match self.num.len() {
            0 => Some(Fraction::zero()),
            1 if self.order == 1 => Some(Fraction::new(self.num[&0].clone(), self.den.clone())),
            _ => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        self.to_fraction().is_some()
    }

    fn normalized(mut self) -> Self {
        if self.num.is_empty() {
            return Cyclotomic::zero();
        }
        let mut g = self.den.clone();
        for c in self.num.values() {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        if !g.is_one() {
            self.den /= &g;
            for c in self.num.values_mut() {
                *c /= &g;
            }
        }
        self.shrink()
    }

    // Drop to a smaller order when the value visibly lies in a subfield.
    fn shrink(mut self) -> Self {
        loop {
            if self.order == 1 {
                return self;
            }
            if self.num.keys().all(|&k| k == 0) {
                self.order = 1;
                return self;
            }
            let mut changed = false;
            for (p, e) in factorize(self.order) {
                if e >= 2 && self.num.keys().all(|&k| k as u64 % p == 0) {
                    self.num = std::mem::take(&mut self.num)
                        .into_iter()
                        .map(|(k, c)| ((k as u64 / p) as u32, c))
                        .collect();
                    self.order /= p;
                    changed = true;
                    break;
                }
            }
            if !changed && self.order % 4 == 2 && self.order > 2 {
                // ζ_{2m} = -ζ_m^{(m+1)/2} for odd m
                let m = self.order / 2;
                let half = (m + 1) / 2;
                let mut dense = vec![BigInt::zero(); m as usize];
                for (k, c) in &self.num {
                    let k = *k as u64;
                    let idx = (k * half % m) as usize;
                    if k % 2 == 0 {
                        dense[idx] += c;
                    } else {
                        dense[idx] -= c;
                    }
                }
                return Cyclotomic::from_dense(m, self.den, dense);
            }
            if !changed {
                return self;
            }
        }
    }

    /// The same value written in Q(ζ_order), `self.order` must divide `order`.
    pub fn embed(&self, order: u64) -> Result<Self> {
        if order % self.order != 0 {
            return Err(Error::IncompatibleOrder {
                denominator: self.order.to_string(),
                order,
            });
        }
        Ok(self.embed_raw(order))
    }

    // Keeps the requested order (no shrinking); used for coefficient comparison.
    fn embed_raw(&self, order: u64) -> Self {
        if order == self.order {
            return self.clone();
        }
        let f = order / self.order;
        let t = table(order);
        let mut acc = vec![BigInt::zero(); t.phi];
        for (k, c) in &self.num {
            for &(i, v) in &t.rows[(*k as u64 * f) as usize] {
                acc[i as usize] += c * v;
            }
        }
        Cyclotomic {
            order,
            den: self.den.clone(),
            num: acc
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (i as u32, c))
                .collect(),
        }
    }

    /// Power-basis coefficients in Q(ζ_order).
    pub fn coefficients_at(&self, order: u64) -> Result<Vec<(u32, Fraction)>> {
        let e = self.embed(order)?;
        Ok(e.num
            .iter()
            .map(|(i, c)| (*i, Fraction::new(c.clone(), e.den.clone())))
            .collect())
    }

    fn galois(&self, j: u64) -> Self {
        let m = self.order;
        let mut dense = vec![BigInt::zero(); m as usize];
        for (k, c) in &self.num {
            dense[((*k as u64 * j) % m) as usize] += c;
        }
        Cyclotomic::from_dense(m, self.den.clone(), dense)
    }

    pub fn conj(&self) -> Self {
        self.galois(self.order - 1)
    }

    pub fn scale(&self, x: &Fraction) -> Self {
        if x.is_zero() {
            return Cyclotomic::zero();
        }
        Cyclotomic {
            order: self.order,
            den: &self.den * x.denom(),
            num: self
                .num
                .iter()
                .map(|(k, c)| (*k, c * x.numer()))
                .collect(),
        }
        .normalized()
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(&int(n))
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(x) = self.to_fraction() {
            return Ok(Cyclotomic::from_fraction(&x.recip()));
        }
        let m = self.order;
        let mut prod = Cyclotomic::one();
        for j in 2..m {
            if j.gcd(&m) == 1 {
                prod = &prod * &self.galois(j);
            }
        }
        let norm = (self * &prod)
            .to_fraction()
            .expect("norm of a cyclotomic number is rational");
        Ok(prod.scale(&norm.recip()))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Cyclotomic::one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        Ok(acc)
    }

    fn add_signed(&self, other: &Self, sign: i64) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if sign > 0 { other.clone() } else { -other };
        }
        let m = self.order.lcm(&other.order);
        let a = self.embed_raw(m);
        let b = other.embed_raw(m);
        let den = a.den.lcm(&b.den);
        let fa = &den / &a.den;
        let fb = &den / &b.den;
        let mut num = a.num;
        for c in num.values_mut() {
            *c *= &fa;
        }
        for (k, c) in b.num {
            let e = num.entry(k).or_insert_with(BigInt::zero);
            if sign > 0 {
                *e += c * &fb;
            } else {
                *e -= c * &fb;
            }
        }
        num.retain(|_, c| !c.is_zero());
        Cyclotomic { order: m, den, num }.normalized()
    }

    fn mul_ref(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Cyclotomic::zero();
        }
        if self.order == 1 {
            let x = Fraction::new(self.num[&0].clone(), self.den.clone());
            return other.scale(&x);
        }
        if other.order == 1 {
            let x = Fraction::new(other.num[&0].clone(), other.den.clone());
            return self.scale(&x);
        }
        let m = self.order.lcm(&other.order);
        let a = self.embed_raw(m);
        let b = other.embed_raw(m);
        let mut dense = vec![BigInt::zero(); m as usize];
        for (i, x) in &a.num {
            for (j, y) in &b.num {
                dense[((i + j) as u64 % m) as usize] += x * y;
            }
        }
        Cyclotomic::from_dense(m, a.den * b.den, dense)
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.den == other.den && self.num == other.num;
        }
        let m = self.order.lcm(&other.order);
        let a = self.embed_raw(m);
        let b = other.embed_raw(m);
        a.den == b.den && a.num == b.num
    }
}

impl Eq for Cyclotomic {}

impl Default for Cyclotomic {
    fn default() -> Self {
        Cyclotomic::zero()
    }
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(x) = self.to_fraction() {
            return write!(f, "{}", fmt_fraction(&x));
        }
        let parts: Vec<String> = self
            .terms()
            .into_iter()
            .map(|(i, c)| match i {
                0 => fmt_fraction(&c),
                _ => format!("({})*z{}^{}", fmt_fraction(&c), self.order, i),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<'a> Add<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: &Cyclotomic) -> Cyclotomic {
        self.add_signed(rhs, 1)
    }
}

impl<'a> Sub<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: &Cyclotomic) -> Cyclotomic {
        self.add_signed(rhs, -1)
    }
}

impl<'a> Mul<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: &Cyclotomic) -> Cyclotomic {
        self.mul_ref(rhs)
    }
}

impl Add for Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: Cyclotomic) -> Cyclotomic {
        &self + &rhs
    }
}

impl Sub for Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: Cyclotomic) -> Cyclotomic {
        &self - &rhs
    }
}

impl Mul for Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: Cyclotomic) -> Cyclotomic {
        &self * &rhs
    }
}

impl AddAssign<&Cyclotomic> for Cyclotomic {
    fn add_assign(&mut self, rhs: &Cyclotomic) {
        *self = &*self + rhs;
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic {
            order: self.order,
            den: self.den.clone(),
            num: self.num.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }
}

impl Neg for Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        -&self
    }
}

impl std::iter::Sum for Cyclotomic {
    fn sum<I: Iterator<Item = Cyclotomic>>(iter: I) -> Self {
        iter.fold(Cyclotomic::zero(), |a, b| &a + &b)
    }
}

#[derive(Serialize, Deserialize)]
struct CycloRepr {
    order: u64,
    terms: Vec<(u32, String)>,
}

impl Serialize for Cyclotomic {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CycloRepr {
            order: self.order,
            terms: self
                .terms()
                .into_iter()
                .map(|(i, c)| (i, fmt_fraction(&c)))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cyclotomic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = CycloRepr::deserialize(d)?;
        if r.order == 0 {
            return Err(D::Error::custom("cyclotomic order must be positive"));
        }
        let mut acc = Cyclotomic::zero();
        for (i, c) in r.terms {
            if i as u64 >= r.order {
                return Err(D::Error::custom(format!("term index {i} out of range")));
            }
            let c = parse_fraction(&c).map_err(D::Error::custom)?;
            let root = Cyclotomic::from_root_counts(r.order, &[(i as u64, 1)]);
            acc = &acc + &root.scale(&c);
        }
        Ok(acc)
    }
}

// ---------------------------------------------------------------------------
// accumulating sums of roots of unity

/// Integer multiset of angles mod 1, turned into a [`Cyclotomic`] once at the end.
#[derive(Default, Clone, Debug)]
pub struct PhaseSum {
    counts: HashMap<(u64, u64), i64>,
}

impl PhaseSum {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `count`·e(num/den).
    pub fn add_ratio(&mut self, num: i128, den: u64, count: i64) {
        let d = den as i128;
        let r = num.rem_euclid(d);
        let g = (r as u64).gcd(&den);
        let (n, d) = if r == 0 { (0, 1) } else { (r as u64 / g, den / g) };
        *self.counts.entry((d, n)).or_insert(0) += count;
    }

    pub fn add(&mut self, angle: &Fraction, count: i64) {
        let y = mod_one(angle);
        let d = y.denom().to_u64().expect("angle denominator too large");
        let n = y.numer().to_u64().unwrap();
        *self.counts.entry((d, n)).or_insert(0) += count;
    }

    pub fn is_empty(&self) -> bool {
        self.counts.values().all(|c| *c == 0)
    }

    pub fn to_cyclotomic(&self) -> Cyclotomic {
        let order = self
            .counts
            .iter()
            .filter(|(_, c)| **c != 0)
            .fold(1u64, |m, ((d, _), _)| m.lcm(d));
        let mut merged: BTreeMap<u64, i64> = BTreeMap::new();
        for ((d, n), c) in &self.counts {
            if *c != 0 {
                *merged.entry(n * (order / d)).or_insert(0) += c;
            }
        }
        let v: Vec<(u64, i64)> = merged.into_iter().collect();
        Cyclotomic::from_root_counts(order, &v)
    }
}

// ---------------------------------------------------------------------------
// square roots and half-integral powers

/// Positive real square root of a prime, from the quadratic Gauss sum.
pub fn sqrt_prime(p: u64) -> Result<Cyclotomic> {
    if p == 2 {
        return Ok(&Cyclotomic::root_of_unity(&frac(1, 8)) + &Cyclotomic::root_of_unity(&frac(-1, 8)));
    }
    if !is_prime(p) {
        return Err(Error::RangeError(format!("{p} is not prime")));
    }
    let counts: Vec<(u64, i64)> = (0..p).map(|a| (a * a % p, 1)).collect();
    let g = Cyclotomic::from_root_counts(p, &counts);
    if p % 4 == 1 {
        Ok(g)
    } else {
        // g = i√p
        Ok(&g * &Cyclotomic::root_of_unity(&frac(-1, 4)))
    }
}

/// `base^exponent` for exponents with denominator 1 or 2.
pub fn power_half(base: u64, exponent: &Fraction) -> Result<Cyclotomic> {
    if base == 0 {
        return Err(Error::RangeError("base must be positive".into()));
    }
    let two = BigInt::from(2);
    if !exponent.denom().is_one() && exponent.denom() != &two {
        return Err(Error::UnsupportedExponent(fmt_fraction(exponent)));
    }
    let mut rational = Fraction::one();
    let mut radicand = Cyclotomic::one();
    for (p, a) in factorize(base) {
        let e = exponent * int(a as i64);
        // p^e = p^{floor(e)} · p^{e - floor(e)}
        let fl = e.floor();
        let k = fl.to_integer().to_i64().ok_or_else(|| Error::RangeError("exponent too large".into()))?;
        let pk = Fraction::from_integer(BigInt::from(p)).pow(k.unsigned_abs() as i32);
        rational *= if k < 0 { pk.recip() } else { pk };
        if e != fl {
            radicand = &radicand * &sqrt_prime(p)?;
        }
    }
    Ok(radicand.scale(&rational))
}

/// Validating front end that pins a session order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycloContext {
    order: u64,
}

impl CycloContext {
    pub fn new(order: u64) -> Result<Self> {
        if order == 0 {
            return Err(Error::RangeError("context order must be positive".into()));
        }
        Ok(CycloContext { order })
    }

    /// The session order lcm(8, level, prime power denominators, 4p for square roots).
    pub fn for_session(level: u64, denominators: &[u64], primes: &[u64]) -> Result<Self> {
        let mut m = 8u64.lcm(&level.max(1));
        for d in denominators {
            m = m.lcm(d);
        }
        for p in primes {
            m = m.lcm(&(4 * p));
        }
        Self::new(m)
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn e_of(&self, x: &Fraction) -> Result<Cyclotomic> {
        let d = x.denom().to_u64().unwrap_or(0);
        if d == 0 || self.order % d != 0 {
            return Err(Error::IncompatibleOrder {
                denominator: x.denom().to_string(),
                order: self.order,
            });
        }
        Ok(Cyclotomic::root_of_unity(x))
    }

    pub fn sqrt_prime(&self, p: u64) -> Result<Cyclotomic> {
        let need = if p == 2 { 8 } else { 4 * p };
        if self.order % need != 0 {
            return Err(Error::IncompatibleOrder {
                denominator: need.to_string(),
                order: self.order,
            });
        }
        sqrt_prime(p)
    }

    /// Brings a value into the session field.
    pub fn embed(&self, x: &Cyclotomic) -> Result<Cyclotomic> {
        x.embed(self.order)
    }
}

/// Σ_{t=0}^{s-1} e(t·x), evaluated as a finite geometric series of roots of unity.
pub fn geometric_root_sum(x: &Fraction, s: u64) -> Cyclotomic {
    if is_integer(x) {
        return Cyclotomic::from_int(s as i64);
    }
    if is_integer(&(x * int(s as i64))) {
        return Cyclotomic::zero();
    }
    let mut acc = PhaseSum::new();
    for t in 0..s {
        acc.add(&(x * int(t as i64)), 1);
    }
    acc.to_cyclotomic()
}

pub fn abs_big(x: &BigInt) -> BigInt {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: i64, d: i64) -> Cyclotomic {
        Cyclotomic::root_of_unity(&frac(n, d))
    }

    #[test]
    fn roots_of_unity() {
        assert_eq!(e(1, 2), Cyclotomic::from_int(-1));
        assert_eq!(e(5, 4), e(1, 4));
        assert_eq!(&e(1, 3) + &e(2, 3), Cyclotomic::from_int(-1));
        assert_eq!(&e(1, 3) * &e(2, 3), Cyclotomic::one());
    }

    #[test]
    fn field_ops() {
        let a = &Cyclotomic::one() + &e(1, 3);
        let b = &Cyclotomic::one() + &e(2, 3);
        assert_eq!(&a * &b, Cyclotomic::one());
        assert_eq!(e(1, 5).conj(), e(4, 5));
        assert_eq!(e(1, 3).inv().unwrap(), e(2, 3));
        assert_eq!(Cyclotomic::zero().inv(), Err(Error::DivisionByZero));
        let x = &e(1, 7) + &e(3, 7).scale(&frac(2, 3));
        assert_eq!(&x * &x.inv().unwrap(), Cyclotomic::one());
        assert_eq!(e(1, 12).pow(12).unwrap(), Cyclotomic::one());
        assert_eq!(e(1, 12).pow(-1).unwrap(), e(11, 12));
    }

    #[test]
    fn square_roots() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            let r = sqrt_prime(p).unwrap();
            assert_eq!(&r * &r, Cyclotomic::from_int(p as i64), "p = {p}");
        }
        assert_eq!(sqrt_prime(2).unwrap(), &e(1, 8) + &e(-1, 8));
        assert_eq!(sqrt_prime(3).unwrap(), &e(1, 12) + &e(-1, 12));
    }

    #[test]
    fn half_powers() {
        assert_eq!(power_half(3, &int(2)).unwrap(), Cyclotomic::from_int(9));
        assert_eq!(power_half(9, &frac(1, 2)).unwrap(), Cyclotomic::from_int(3));
        let r = power_half(3, &frac(-1, 2)).unwrap();
        assert_eq!(r, sqrt_prime(3).unwrap().scale(&frac(1, 3)));
        assert_eq!(&r * &sqrt_prime(3).unwrap(), Cyclotomic::one());
        assert_eq!(power_half(12, &frac(3, 2)).unwrap(), (&sqrt_prime(3).unwrap()).scale(&int(24)));
        assert!(matches!(power_half(3, &frac(1, 3)), Err(Error::UnsupportedExponent(_))));
    }

    #[test]
    fn context_checks() {
        let ctx = CycloContext::new(24).unwrap();
        assert!(ctx.e_of(&frac(1, 8)).is_ok());
        assert!(matches!(ctx.e_of(&frac(1, 5)), Err(Error::IncompatibleOrder { .. })));
        assert!(ctx.sqrt_prime(3).is_ok());
        assert!(ctx.sqrt_prime(5).is_err());
        let v = ctx.embed(&e(1, 3)).unwrap();
        assert_eq!(v, e(1, 3));
    }

    #[test]
    fn embedding_roundtrip() {
        let x = &e(1, 9) + &e(2, 3).scale(&frac(-5, 7));
        let big = x.embed(36).unwrap();
        assert_eq!(big.order(), 36);
        assert_eq!(big.clone().normalized(), x);
    }

    #[test]
    fn phase_sums() {
        let mut s = PhaseSum::new();
        for a in 0..9 {
            s.add(&frac(a, 9), 1);
        }
        assert!(s.to_cyclotomic().is_zero());
        // c_9(3) = -3
        let mut s = PhaseSum::new();
        for h in [1, 2, 4, 5, 7, 8] {
            s.add_ratio(3 * h, 9, 1);
        }
        assert_eq!(s.to_cyclotomic(), Cyclotomic::from_int(-3));
        assert_eq!(geometric_root_sum(&frac(2, 3), 3), Cyclotomic::zero());
        assert_eq!(geometric_root_sum(&int(2), 5), Cyclotomic::from_int(5));
        let g = geometric_root_sum(&frac(1, 4), 2);
        assert_eq!(g, &Cyclotomic::one() + &e(1, 4));
    }

    #[test]
    fn serde_roundtrip() {
        let x = &e(1, 12) + &Cyclotomic::from_fraction(&frac(-3, 2));
        let s = serde_json::to_string(&x).unwrap();
        let y: Cyclotomic = serde_json::from_str(&s).unwrap();
        assert_eq!(x, y);
        assert_eq!(serde_json::to_string(&y).unwrap(), s);
        let h = serde_json::to_string(&e(1, 2)).unwrap();
        assert_eq!(h, r#"{"order":1,"terms":[[0,"-1"]]}"#);
    }
}
