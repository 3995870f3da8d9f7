//! The action of β_{h,s} through the extended Weil representation.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadmodule::{check_budget, enumerate_cosets, integral_form, ElementRecord, EvenLattice, FqModule, ModuleElement};
use crate::scalars::{int, is_prime, power_half, Cyclotomic, Fraction, PhaseSum};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BetaParams {
    pub p: u64,
    pub l: u32,
    pub s: u32,
    pub h: u64,
    pub r: i64,
    pub t: i64,
}

impl BetaParams {
    /// Validates the parameters and picks the Bezout pair with 0 ≤ t < p^s.
    pub fn new(p: u64, l: u32, s: u32, h: u64) -> Result<Self> {
        if p == 2 || !is_prime(p) {
            return Err(Error::PNotOdd(p));
        }
        if l == 0 || s == 0 || s >= 2 * l {
            return Err(Error::RangeError(format!("need 1 ≤ s < 2l, got s = {s}, l = {l}")));
        }
        let ps = p.pow(s) as i64;
        let h = h % ps as u64;
        if h % p == 0 {
            return Err(Error::RangeError(format!("h = {h} is not a unit mod {ps}")));
        }
        // −h·t ≡ 1 mod p^s
        let hinv = (h as i64).extended_gcd(&ps).x.rem_euclid(ps);
        let t = (-hinv).rem_euclid(ps);
        let r = (1 + h as i64 * t) / ps;
        let b = BetaParams { p, l, s, h, r, t };
        debug_assert!(b.bezout_holds());
        Ok(b)
    }

    /// Same β with a different Bezout pair.
    pub fn with_bezout(&self, r: i64, t: i64) -> Result<Self> {
        let b = BetaParams { r, t, ..self.clone() };
        if !b.bezout_holds() {
            return Err(Error::RangeError(format!("r·p^s − h·t ≠ 1 for r = {r}, t = {t}")));
        }
        Ok(b)
    }

    fn bezout_holds(&self) -> bool {
        self.r as i128 * self.ps() as i128 - self.h as i128 * self.t as i128 == 1
    }

    pub fn ps(&self) -> u64 {
        self.p.pow(self.s)
    }
}

/// Column-sparse matrix over ℒ: `columns[λ][μ]` is the coefficient of e_μ in e_λ | β.
#[derive(Clone, Debug, PartialEq)]
pub struct WeilMatrix {
    pub module: Arc<FqModule>,
    pub params: BetaParams,
    pub columns: BTreeMap<usize, BTreeMap<usize, Cyclotomic>>,
}

impl WeilMatrix {
    pub fn entry(&self, col: usize, row: usize) -> Cyclotomic {
        self.columns
            .get(&col)
            .and_then(|c| c.get(&row))
            .cloned()
            .unwrap_or_default()
    }

    /// Entries where the two matrices differ, as (column, row, self, other).
    pub fn diff(&self, other: &WeilMatrix) -> Vec<(usize, usize, Cyclotomic, Cyclotomic)> {
        let mut keys = std::collections::BTreeSet::new();
        for m in [self, other] {
            for (c, col) in &m.columns {
                for r in col.keys() {
                    keys.insert((*c, *r));
                }
            }
        }
        keys.into_iter()
            .filter_map(|(c, r)| {
                let a = self.entry(c, r);
                let b = other.entry(c, r);
                (a != b).then_some((c, r, a, b))
            })
            .collect()
    }

    pub fn to_record(&self) -> MatrixRecord {
        let m = &self.module;
        MatrixRecord {
            module: m.lattice().name(),
            params: ParamsRecord {
                p: self.params.p,
                l: self.params.l,
                s: self.params.s,
                h: self.params.h,
            },
            columns: self
                .columns
                .iter()
                .map(|(c, rows)| ColumnRecord {
                    lambda: ElementRecord::new(m, &m.element_at(*c)),
                    rows: rows
                        .iter()
                        .map(|(r, v)| RowRecord {
                            mu: ElementRecord::new(m, &m.element_at(*r)),
                            value: v.clone(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ParamsRecord {
    pub p: u64,
    pub l: u32,
    pub s: u32,
    pub h: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RowRecord {
    pub mu: ElementRecord,
    pub value: Cyclotomic,
}

#[derive(Clone, Debug, Serialize)]
pub struct ColumnRecord {
    pub lambda: ElementRecord,
    pub rows: Vec<RowRecord>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MatrixRecord {
    pub module: String,
    pub params: ParamsRecord,
    pub columns: Vec<ColumnRecord>,
}

fn representative(x: &ModuleElement, shift: Option<&[i64]>) -> Vec<Fraction> {
    match shift {
        Some(w) => x.shifted(w).coords().to_vec(),
        None => x.coords().to_vec(),
    }
}

/// Σ_{v ∈ L/aL} e(c·q(v + x)/a) for an integer c.
fn gauss_sum(lattice: &EvenLattice, x: &[Fraction], c: i128, a: u64) -> Result<Cyclotomic> {
    let (num, d) = integral_form(x);
    let den = 2 * d * d * a as i128;
    let mut acc = PhaseSum::new();
    for v in enumerate_cosets(lattice, a)? {
        let y: Vec<i128> = v.iter().zip(&num).map(|(v, c)| d * *v as i128 + c).collect();
        acc.add_ratio(c * lattice.norm_int(&y), den as u64, 1);
    }
    Ok(acc.to_cyclotomic())
}

fn collect_columns(
    cols: Vec<(usize, BTreeMap<usize, Cyclotomic>)>,
) -> BTreeMap<usize, BTreeMap<usize, Cyclotomic>> {
    cols.into_iter()
        .map(|(c, mut rows)| {
            rows.retain(|_, v| !v.is_zero());
            (c, rows)
        })
        .filter(|(_, rows)| !rows.is_empty())
        .collect()
}

/// The closed form of ρ_L(β_{h,s}).
pub fn rho_beta_closed(lattice: &EvenLattice, params: &BetaParams) -> Result<WeilMatrix> {
    rho_beta_closed_shifted(lattice, params, None)
}

/// Closed form evaluated on representatives shifted by the integer vector `shift`.
pub fn rho_beta_closed_shifted(
    lattice: &EvenLattice,
    params: &BetaParams,
    shift: Option<&[i64]>,
) -> Result<WeilMatrix> {
    let module = FqModule::build(lattice, 1)?;
    let (p, l, s) = (params.p, params.l, params.s);
    let dim = lattice.rank() as i64;
    let pref = power_half(p, &(int(-(s as i64) * dim) / int(2)))?;
    let h = params.h as i128;
    let elements = module.enumerate()?;
    let cols: Result<Vec<_>> = elements
        .par_iter()
        .enumerate()
        .map(|(ci, lambda)| {
            let mut rows = BTreeMap::new();
            if l >= s {
                let x = representative(lambda, shift);
                let g = gauss_sum(lattice, &x, -h, p.pow(s))?;
                let target = module.mul(lambda, p.pow(l - s) as i64);
                rows.insert(module.index_of(&target)?, &pref * &g);
            } else {
                let k = p.pow(s - l);
                for mu in module.preimages(lambda, k)? {
                    let x = representative(&mu, shift);
                    let g = gauss_sum(lattice, &x, -h * k as i128, p.pow(l))?;
                    rows.insert(module.index_of(&mu)?, &pref * &g);
                }
            }
            Ok((ci, rows))
        })
        .collect();
    Ok(WeilMatrix {
        module,
        params: params.clone(),
        columns: collect_columns(cols?),
    })
}

/// ρ_L(β_{h,s}) evaluated from the unsimplified triple sum over ρ, ν ∈ ℒ and δ ∈ ℒ(p^s).
pub fn rho_beta_oracle(lattice: &EvenLattice, params: &BetaParams) -> Result<WeilMatrix> {
    rho_beta_oracle_shifted(lattice, params, None)
}

pub fn rho_beta_oracle_shifted(
    lattice: &EvenLattice,
    params: &BetaParams,
    shift: Option<&[i64]>,
) -> Result<WeilMatrix> {
    let module = FqModule::build(lattice, 1)?;
    let (p, l, s) = (params.p, params.l, params.s);
    let ps = p.pow(s);
    let dim = lattice.rank();
    let size = module.order();
    check_budget(size as u128 * size as u128 * (ps as u128).pow(dim as u32))?;
    let (h, r, t) = (params.h as i128, params.r as i128, params.t as i128);
    let elements = module.enumerate()?;
    let reps: Vec<Vec<Fraction>> = elements.iter().map(|x| representative(x, shift)).collect();

    // 1/(√|ℒ|·√|ℒ(p^s)|) = p^{−sD/2}/|ℒ|
    let norm = power_half(p, &(int(-(s as i64) * dim as i64) / int(2)))?
        .scale(&Fraction::new(1.into(), (size as i64).into()));
    let p2ls = int(p.pow(2 * l - s) as i64);
    let tf = int(t as i64);

    let cols: Result<Vec<_>> = (0..elements.len())
        .into_par_iter()
        .map(|ci| {
            let x_lambda = &reps[ci];
            // inner δ-sums, one per ν
            let mut inner = Vec::with_capacity(reps.len());
            for x_nu in &reps {
                let target: Vec<Fraction> = x_lambda
                    .iter()
                    .zip(x_nu)
                    .map(|(a, b)| a * int(h as i64) - b * int(p.pow(l) as i64))
                    .collect();
                let mut both = target.clone();
                both.extend_from_slice(x_lambda);
                let (num, d) = integral_form(&both);
                let (c_target, c_lambda) = num.split_at(dim);
                let den = 2 * d * d * ps as i128;
                let mut acc = PhaseSum::new();
                for w in enumerate_cosets(lattice, ps)? {
                    // δ = (target + w)/p^s = y/(d p^s)
                    let y: Vec<i128> = w.iter().zip(c_target).map(|(w, c)| d * *w as i128 + c).collect();
                    let a = t * lattice.norm_int(&y) - 2 * r * ps as i128 * lattice.bilinear_int(&y, c_lambda);
                    acc.add_ratio(a, den as u64, 1);
                }
                inner.push(acc.to_cyclotomic());
            }
            let pre = &norm * &Cyclotomic::root_of_unity(&(lattice.q(x_lambda) * int((h * r) as i64)));
            let mut rows = BTreeMap::new();
            for (ri, x_rho) in reps.iter().enumerate() {
                let mut total = Cyclotomic::zero();
                for (x_nu, inn) in reps.iter().zip(&inner) {
                    if inn.is_zero() {
                        continue;
                    }
                    let angle = -(&p2ls * &tf * lattice.q(x_nu)) - lattice.bilinear(x_nu, x_rho);
                    total += &(&Cyclotomic::root_of_unity(&angle) * inn);
                }
                rows.insert(ri, &pre * &total);
            }
            Ok((ci, rows))
        })
        .collect();
    Ok(WeilMatrix {
        module,
        params: params.clone(),
        columns: collect_columns(cols?),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub lattice: String,
    pub p: u64,
    pub s: u32,
    pub lambda: Vec<String>,
    pub shift: Vec<i64>,
    pub q_lift: String,
    pub q_lift_shifted: String,
    pub lhs: Cyclotomic,
    pub lhs_shifted: Cyclotomic,
    pub phase: Cyclotomic,
    pub phase_shifted: Cyclotomic,
    pub rhs: Cyclotomic,
    pub rhs_shifted: Cyclotomic,
    pub verdict: String,
}

/// Tests Σ_v e(q(v+λ)/p^s) = e(q(λ)/p^s)·Σ_v e(q(v)/p^s) on two representatives of λ.
pub fn falsify_naive_identity(
    lattice: &EvenLattice,
    p: u64,
    s: u32,
    lambda: &ModuleElement,
    w: &[i64],
) -> Result<Witness> {
    let module = FqModule::build(lattice, 1)?;
    module.index_of(lambda)?;
    if w.len() != lattice.rank() {
        return Err(Error::RangeError("shift has the wrong dimension".into()));
    }
    let ps = p.pow(s);
    let x0 = lambda.coords().to_vec();
    let x1 = lambda.shifted(w).coords().to_vec();
    let lhs = gauss_sum(lattice, &x0, 1, ps)?;
    let lhs_shifted = gauss_sum(lattice, &x1, 1, ps)?;
    let zero = vec![Fraction::from_integer(0.into()); lattice.rank()];
    let g = gauss_sum(lattice, &zero, 1, ps)?;
    let q0 = lattice.q(&x0);
    let q1 = lattice.q(&x1);
    let ps_f = int(ps as i64);
    let phase = Cyclotomic::root_of_unity(&(&q0 / &ps_f));
    let phase_shifted = Cyclotomic::root_of_unity(&(&q1 / &ps_f));
    let rhs = &phase * &g;
    let rhs_shifted = &phase_shifted * &g;
    if rhs == rhs_shifted {
        return Err(Error::WitnessNotFound);
    }
    let verdict = if lhs == lhs_shifted {
        "identity falsified: the sum is representative-independent, the right-hand side is not"
    } else {
        "identity falsified: sums differ between representatives"
    };
    Ok(Witness {
        lattice: lattice.name(),
        p,
        s,
        lambda: lambda.to_strings(),
        shift: w.to_vec(),
        q_lift: crate::scalars::fmt_fraction(&q0),
        q_lift_shifted: crate::scalars::fmt_fraction(&q1),
        lhs,
        lhs_shifted,
        phase,
        phase_shifted,
        rhs,
        rhs_shifted,
        verdict: verdict.into(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupportReport {
    pub holds: bool,
    /// (column index, in p^sℒ) for every nonzero column
    pub columns: Vec<(usize, bool)>,
}

/// Compares the nonzero columns with the multiples subgroup p^sℒ.
pub fn support_check(matrix: &WeilMatrix) -> Result<SupportReport> {
    let m = &matrix.module;
    let k = matrix.params.ps();
    let mut columns = Vec::new();
    for c in matrix.columns.keys() {
        columns.push((*c, m.is_multiple(&m.element_at(*c), k)?));
    }
    Ok(SupportReport {
        holds: columns.iter().all(|(_, b)| *b),
        columns,
    })
}
