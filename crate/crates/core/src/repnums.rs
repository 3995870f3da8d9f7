//! Representation numbers modulo prime powers, their Möbius sums, Ramanujan sums.

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::quadmodule::{enumerate_cosets, integral_form, EvenLattice};
use crate::scalars::{factorize, fmt_fraction, int, power_half, Cyclotomic, Fraction, PhaseSum};

/// A counting query: v ranges over L/gL with g = gcd(modulus, cap) (or the modulus when uncapped),
/// counting `scale_factor·q(v + shift) − target ≡ 0 mod modulus`.
#[derive(Clone, Debug)]
pub struct RepQuery<'a> {
    pub lattice: &'a EvenLattice,
    pub shift: Vec<Fraction>,
    pub target: Fraction,
    pub modulus: u64,
    pub scale_factor: u64,
    pub cap: Option<u64>,
}

impl<'a> RepQuery<'a> {
    /// Query for N_{ν,m}(a).
    pub fn plain(lattice: &'a EvenLattice, nu: &[Fraction], m: &Fraction, a: u64) -> Self {
        RepQuery {
            lattice,
            shift: nu.to_vec(),
            target: m.clone(),
            modulus: a,
            scale_factor: 1,
            cap: None,
        }
    }

    /// Query for Ñ_{ρ,r}(a) with factor p^{2(s−l)} and cap p^l.
    pub fn scaled(lattice: &'a EvenLattice, rho: &[Fraction], r: &Fraction, a: u64, p: u64, s: u32, l: u32) -> Self {
        RepQuery {
            lattice,
            shift: rho.to_vec(),
            target: r.clone(),
            modulus: a,
            scale_factor: p.pow(2 * s.saturating_sub(l)),
            cap: Some(p.pow(l)),
        }
    }

    fn coset_modulus(&self) -> u64 {
        match self.cap {
            Some(c) => self.modulus.gcd(&c),
            None => self.modulus,
        }
    }
}

// Integer data for testing `factor·q(v+ν) − target ≡ 0 mod a`:
// the numerator is factor·md·N(dv+c) − 2d²·mn over 2d²·md.
struct Kernel {
    c: Vec<i128>,
    d: i128,
    factor: i128,
    mn: i128,
    md: i128,
}

impl Kernel {
    fn new(q: &RepQuery) -> Result<Self> {
        let (c, d) = integral_form(&q.shift);
        let mn = q.target.numer().to_i128().ok_or_else(|| Error::RangeError("target too large".into()))?;
        let md = q.target.denom().to_i128().unwrap();
        let k = Kernel {
            c,
            d,
            factor: q.scale_factor as i128,
            mn,
            md,
        };
        let base = q.lattice.q(&q.shift) * int(q.scale_factor as i64) - &q.target;
        if !base.denom().is_one() {
            return Err(Error::PrecisionViolation(format!(
                "target {} is not congruent to the form value {} mod 1",
                fmt_fraction(&q.target),
                fmt_fraction(&(base + &q.target))
            )));
        }
        Ok(k)
    }

    // the integer factor·q(v+ν) − target
    fn value(&self, lattice: &EvenLattice, v: &[i64]) -> i128 {
        let y: Vec<i128> = v
            .iter()
            .zip(&self.c)
            .map(|(v, c)| self.d * *v as i128 + c)
            .collect();
        let num = self.factor * self.md * lattice.norm_int(&y) - 2 * self.d * self.d * self.mn;
        let den = 2 * self.d * self.d * self.md;
        debug_assert_eq!(num % den, 0);
        num / den
    }
}

/// N_{ν,m}(a).
pub fn rep_number(q: &RepQuery) -> Result<u64> {
    let k = Kernel::new(q)?;
    let a = q.modulus as i128;
    let mut count = 0u64;
    for v in enumerate_cosets(q.lattice, q.coset_modulus())? {
        if k.value(q.lattice, &v) % a == 0 {
            count += 1;
        }
    }
    Ok(count)
}

/// Ñ_{ρ,r}(a); every summand is checked to be independent of the coset representative.
pub fn rep_number_scaled(q: &RepQuery) -> Result<u64> {
    let k = Kernel::new(q)?;
    let a = q.modulus as i128;
    let g = q.coset_modulus() as i64;
    let dim = q.lattice.rank();
    let mut count = 0u64;
    for v in enumerate_cosets(q.lattice, g as u64)? {
        let hit = k.value(q.lattice, &v) % a == 0;
        for i in 0..dim {
            let mut w = v.clone();
            w[i] += g;
            if (k.value(q.lattice, &w) % a == 0) != hit {
                return Err(Error::NotWellDefined(format!(
                    "summand at v = {v:?} changes under a shift by {g} in direction {i}"
                )));
            }
        }
        if hit {
            count += 1;
        }
    }
    Ok(count)
}

/// Möbius function, supported on prime powers only.
pub fn moebius(n: u64) -> Result<i64> {
    let f = factorize(n);
    match f.as_slice() {
        [] => Ok(1),
        [(_, 1)] => Ok(-1),
        [(_, _)] => Ok(0),
        _ => Err(Error::RangeError(format!("moebius restricted to prime powers, got {n}"))),
    }
}

fn check_odd(p: u64) -> Result<()> {
    if p == 2 || !crate::scalars::is_prime(p) {
        return Err(Error::PNotOdd(p));
    }
    Ok(())
}

/// G_{ν,m}(s) = Σ_{a | p^s} μ(p^s/a) a^{1−D} N_{ν,m}(a).
pub fn moebius_sum(lattice: &EvenLattice, nu: &[Fraction], m: &Fraction, p: u64, s: u32) -> Result<Fraction> {
    let dim = lattice.rank() as i32;
    let mut acc = Fraction::zero();
    for e in 0..=s {
        let a = p.pow(e);
        let mu = moebius(p.pow(s - e))?;
        if mu == 0 {
            continue;
        }
        let n = rep_number(&RepQuery::plain(lattice, nu, m, a))?;
        acc += int(mu) * int(a as i64).pow(1 - dim) * int(n as i64);
    }
    Ok(acc)
}

/// G̃_{ρ,r}(s) = Σ_{a | p^s} μ(p^s/a) a (a,p^l)^{−D} Ñ_{ρ,r}(a).
pub fn moebius_sum_scaled(
    lattice: &EvenLattice,
    rho: &[Fraction],
    r: &Fraction,
    p: u64,
    s: u32,
    l: u32,
) -> Result<Fraction> {
    let dim = lattice.rank() as i32;
    let cap = p.pow(l);
    let mut acc = Fraction::zero();
    for e in 0..=s {
        let a = p.pow(e);
        let mu = moebius(p.pow(s - e))?;
        if mu == 0 {
            continue;
        }
        let n = rep_number_scaled(&RepQuery::scaled(lattice, rho, r, a, p, s, l))?;
        let g = a.gcd(&cap);
        acc += int(mu) * int(a as i64) * int(g as i64).pow(-dim) * int(n as i64);
    }
    Ok(acc)
}

/// Units of Z/mZ in increasing order.
pub fn units(m: u64) -> Vec<u64> {
    (1..=m).filter(|h| h.gcd(&m) == 1).map(|h| h % m).collect()
}

/// Σ_{h ∈ (Z/p^s)^×} e(h·x/p^s), summed term by term.
pub fn ramanujan_sum(x: &Fraction, p: u64, s: u32) -> Cyclotomic {
    let m = p.pow(s);
    let mut acc = PhaseSum::new();
    for h in units(m) {
        acc.add(&(x * int(h as i64) / int(m as i64)), 1);
    }
    acc.to_cyclotomic()
}

/// Σ_{v ∈ L/p^s} Σ_{h ∈ (Z/p^s)^×} e(h(q(v+λ) − n)/p^s), summed term by term.
pub fn double_sum(lattice: &EvenLattice, lambda: &[Fraction], n: &Fraction, p: u64, s: u32) -> Result<Cyclotomic> {
    let m = p.pow(s);
    let q = RepQuery::plain(lattice, lambda, n, m);
    let k = Kernel::new(&q)?;
    let hs = units(m);
    let mut acc = PhaseSum::new();
    for v in enumerate_cosets(lattice, m)? {
        let x = k.value(lattice, &v);
        for h in &hs {
            acc.add_ratio(x * *h as i128, m, 1);
        }
    }
    Ok(acc.to_cyclotomic())
}

/// Direct double sum against p^{sD}·G_{λ,n}(s).
pub fn ramanujan_check(
    lattice: &EvenLattice,
    lambda: &[Fraction],
    n: &Fraction,
    p: u64,
    s: u32,
) -> Result<(Cyclotomic, Cyclotomic)> {
    check_odd(p)?;
    let lhs = double_sum(lattice, lambda, n, p, s)?;
    let dim = lattice.rank() as i64;
    let rhs = power_half(p, &int(s as i64 * dim))?.scale(&moebius_sum(lattice, lambda, n, p, s)?);
    Ok((lhs, rhs))
}

/// Σ_{v ∈ L/p^l} Σ_h e(h(p^{2(s−l)}q(v+ρ) − n)/p^s) against p^{lD}·G̃_{ρ,n}(s).
pub fn ramanujan_check_scaled(
    lattice: &EvenLattice,
    rho: &[Fraction],
    n: &Fraction,
    p: u64,
    s: u32,
    l: u32,
) -> Result<(Cyclotomic, Cyclotomic)> {
    check_odd(p)?;
    let lhs = scaled_double_sum(lattice, rho, n, p, s, l)?;
    let dim = lattice.rank() as i64;
    let rhs = power_half(p, &int(l as i64 * dim))?.scale(&moebius_sum_scaled(lattice, rho, n, p, s, l)?);
    Ok((lhs, rhs))
}

/// Σ_{v ∈ L/p^l} Σ_h e(h(p^{2(s−l)}q(v+ρ) − n)/p^s), summed term by term.
pub fn scaled_double_sum(
    lattice: &EvenLattice,
    rho: &[Fraction],
    n: &Fraction,
    p: u64,
    s: u32,
    l: u32,
) -> Result<Cyclotomic> {
    let m = p.pow(s);
    let q = RepQuery::scaled(lattice, rho, n, m, p, s, l);
    let k = Kernel::new(&q)?;
    let hs = units(m);
    let mut acc = PhaseSum::new();
    for v in enumerate_cosets(lattice, p.pow(l))? {
        let x = k.value(lattice, &v);
        for h in &hs {
            acc.add_ratio(x * *h as i128, m, 1);
        }
    }
    Ok(acc.to_cyclotomic())
}

/// Whether p^{s−1} divides p^{2(s−l)}q(v+ρ) − n for some v ∈ L/p^lL.
pub fn support_sieve(lattice: &EvenLattice, p: u64, s: u32, l: u32, rho: &[Fraction], n: &Fraction) -> Result<bool> {
    if s <= l {
        return Err(Error::RangeError(format!("support sieve needs s > l, got s = {s}, l = {l}")));
    }
    let q = RepQuery::scaled(lattice, rho, n, p.pow(s - 1), p, s, l);
    let base = lattice.q(rho) * int(q.scale_factor as i64) - n;
    if !base.denom().is_one() {
        return Ok(false);
    }
    let k = Kernel::new(&q)?;
    let a = p.pow(s - 1) as i128;
    for v in enumerate_cosets(lattice, p.pow(l))? {
        if k.value(lattice, &v) % a == 0 {
            return Ok(true);
        }
    }
    Ok(false)
}
