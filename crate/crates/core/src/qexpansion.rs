//! Truncated vector-valued q-expansions with rational exponents.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadmodule::{enumeration_budget, ElementRecord, EvenLattice, FqModule};
use crate::scalars::{fmt_fraction, int, mod_one, parse_fraction, Cyclotomic, Fraction};

#[derive(Clone, Debug)]
pub struct VVExpansion {
    module: Arc<FqModule>,
    weight: Fraction,
    precision: Fraction,
    coeffs: BTreeMap<(usize, Fraction), Cyclotomic>,
}

impl PartialEq for VVExpansion {
    fn eq(&self, other: &Self) -> bool {
        self.module == other.module
            && self.weight == other.weight
            && self.precision == other.precision
            && self.coeffs == other.coeffs
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Mismatch {
    pub component: Vec<String>,
    pub index: usize,
    #[serde(with = "crate::scalars::fraction_serde")]
    pub n: Fraction,
    pub lhs: Cyclotomic,
    pub rhs: Cyclotomic,
}

impl VVExpansion {
    pub fn new(module: Arc<FqModule>, weight: Fraction, precision: Fraction) -> Result<Self> {
        let two = BigInt::from(2);
        if !weight.denom().is_one() && weight.denom() != &two {
            return Err(Error::UnsupportedExponent(fmt_fraction(&weight)));
        }
        if precision.is_negative() {
            return Err(Error::RangeError("precision must be nonnegative".into()));
        }
        Ok(VVExpansion {
            module,
            weight,
            precision,
            coeffs: BTreeMap::new(),
        })
    }

    /// Empty expansion with the same module, weight and precision.
    pub fn empty_like(&self) -> Self {
        VVExpansion {
            coeffs: BTreeMap::new(),
            ..self.clone()
        }
    }

    pub fn module(&self) -> &Arc<FqModule> {
        &self.module
    }

    pub fn weight(&self) -> &Fraction {
        &self.weight
    }

    pub fn precision(&self) -> &Fraction {
        &self.precision
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, Fraction), &Cyclotomic)> {
        self.coeffs.iter()
    }

    fn validate(&self, idx: usize, n: &Fraction) -> Result<()> {
        if idx as u64 >= self.module.order() {
            return Err(Error::RangeError(format!("component index {idx} out of range")));
        }
        if n.is_negative() || n >= &self.precision {
            return Err(Error::RangeError(format!(
                "exponent {} outside [0, {})",
                fmt_fraction(n),
                fmt_fraction(&self.precision)
            )));
        }
        let x = self.module.element_at(idx);
        let qv = self.module.q_value(&x)?;
        if mod_one(n) != qv {
            return Err(Error::PrecisionViolation(format!(
                "exponent {} is not congruent to q({x}) = {} mod 1",
                fmt_fraction(n),
                fmt_fraction(&qv)
            )));
        }
        Ok(())
    }

    /// Adds `value` to the coefficient of q^n in component `idx`.
    pub fn add_term(&mut self, idx: usize, n: Fraction, value: &Cyclotomic) -> Result<()> {
        if value.is_zero() {
            return Ok(());
        }
        self.validate(idx, &n)?;
        let key = (idx, n);
        let updated = match self.coeffs.get(&key) {
            Some(old) => old + value,
            None => value.clone(),
        };
        if updated.is_zero() {
            self.coeffs.remove(&key);
        } else {
            self.coeffs.insert(key, updated);
        }
        Ok(())
    }

    pub fn get(&self, idx: usize, n: &Fraction) -> Cyclotomic {
        self.coeffs
            .get(&(idx, n.clone()))
            .cloned()
            .unwrap_or_default()
    }

    /// All terms of component `idx`, keyed by exponent.
    pub fn component(&self, idx: usize) -> BTreeMap<Fraction, Cyclotomic> {
        let lo = (idx, Fraction::zero());
        self.coeffs
            .range(lo..)
            .take_while(|((i, _), _)| *i == idx)
            .map(|((_, n), v)| (n.clone(), v.clone()))
            .collect()
    }

    pub fn component_series(&self, idx: usize) -> ComponentSeries {
        ComponentSeries::new(self.component(idx))
    }

    pub fn truncate(&self, precision: &Fraction) -> Self {
        let precision = precision.min(&self.precision).clone();
        VVExpansion {
            coeffs: self
                .coeffs
                .iter()
                .filter(|((_, n), _)| n < &precision)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
            precision,
            module: self.module.clone(),
            weight: self.weight.clone(),
        }
    }

    pub fn scale(&self, c: &Cyclotomic) -> Self {
        let mut out = self.empty_like();
        if c.is_zero() {
            return out;
        }
        out.coeffs = self.coeffs.iter().map(|(k, v)| (k.clone(), v * c)).collect();
        out
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.module != other.module {
            return Err(Error::ModuleMismatch(format!(
                "{} at scale {} vs {} at scale {}",
                self.module.lattice(),
                self.module.scale(),
                other.module.lattice(),
                other.module.scale()
            )));
        }
        if self.weight != other.weight {
            return Err(Error::WeightMismatch(fmt_fraction(&self.weight), fmt_fraction(&other.weight)));
        }
        Ok(())
    }

    /// Σ c_i·f_i, truncated to the smallest precision involved.
    pub fn combine(terms: &[(Cyclotomic, &VVExpansion)]) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::RangeError("empty linear combination".into()))?
            .1;
        let mut prec = first.precision.clone();
        for (_, f) in terms {
            first.compatible(f)?;
            prec = prec.min(f.precision.clone());
        }
        let mut acc: BTreeMap<(usize, Fraction), Cyclotomic> = BTreeMap::new();
        for (c, f) in terms {
            if c.is_zero() {
                continue;
            }
            for ((i, n), v) in &f.coeffs {
                if n >= &prec {
                    continue;
                }
                let e = acc.entry((*i, n.clone())).or_default();
                *e = &*e + &(v * c);
            }
        }
        acc.retain(|_, v| !v.is_zero());
        Ok(VVExpansion {
            module: first.module.clone(),
            weight: first.weight.clone(),
            precision: prec,
            coeffs: acc,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Self::combine(&[(Cyclotomic::one(), self), (Cyclotomic::one(), other)])
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Self::combine(&[(Cyclotomic::one(), self), (Cyclotomic::from_int(-1), other)])
    }

    /// Differing coefficients below the common precision.
    pub fn compare(&self, other: &Self) -> Result<Vec<Mismatch>> {
        self.compatible(other)?;
        let prec = self.precision.clone().min(other.precision.clone());
        let mut keys: Vec<&(usize, Fraction)> = self
            .coeffs
            .keys()
            .chain(other.coeffs.keys())
            .filter(|(_, n)| n < &prec)
            .collect();
        keys.sort();
        keys.dedup();
        Ok(keys
            .into_iter()
            .filter_map(|(i, n)| {
                let a = self.get(*i, n);
                let b = other.get(*i, n);
                (a != b).then(|| Mismatch {
                    component: self.module.element_at(*i).to_strings(),
                    index: *i,
                    n: n.clone(),
                    lhs: a,
                    rhs: b,
                })
            })
            .collect())
    }

    pub fn to_record(&self) -> ExpansionRecord {
        let m = &self.module;
        ExpansionRecord {
            lattice: m.lattice().clone(),
            scale: m.scale(),
            weight: fmt_fraction(&self.weight),
            precision: fmt_fraction(&self.precision),
            coefficients: self
                .coeffs
                .iter()
                .map(|((i, n), v)| CoefficientRecord {
                    component: m.element_at(*i).to_strings(),
                    n: fmt_fraction(n),
                    value: v.clone(),
                })
                .collect(),
        }
    }

    pub fn from_record(rec: ExpansionRecord) -> Result<Self> {
        let lattice = rec.lattice.validated()?;
        if rec.scale == 0 {
            return Err(Error::schema("scale", "must be positive"));
        }
        let module = FqModule::build(&lattice, rec.scale)?;
        let weight = parse_fraction(&rec.weight).map_err(|_| Error::schema("weight", "not a fraction"))?;
        let precision =
            parse_fraction(&rec.precision).map_err(|_| Error::schema("precision", "not a fraction"))?;
        let mut f = VVExpansion::new(module.clone(), weight, precision)
            .map_err(|e| Error::schema("weight", e.to_string()))?;
        for (k, c) in rec.coefficients.into_iter().enumerate() {
            let field = format!("coefficients[{k}]");
            let coords: Vec<Fraction> = c
                .component
                .iter()
                .map(|s| parse_fraction(s))
                .collect::<Result<_>>()
                .map_err(|_| Error::schema(format!("{field}.component"), "not a fraction vector"))?;
            let idx = module
                .index_of_coords(&coords)
                .map_err(|e| Error::schema(format!("{field}.component"), e.to_string()))?;
            let n = parse_fraction(&c.n).map_err(|_| Error::schema(format!("{field}.n"), "not a fraction"))?;
            f.add_term(idx, n, &c.value).map_err(|e| {
                let what = match e {
                    Error::PrecisionViolation(_) => "grading invariant n ≡ q(component) mod 1 violated".to_string(),
                    other => other.to_string(),
                };
                Error::schema(format!("{field}.n"), what)
            })?;
        }
        Ok(f)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_record()).expect("expansion serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let rec: ExpansionRecord = serde_json::from_str(s).map_err(|e| {
            Error::schema(format!("line {} column {}", e.line(), e.column()), e.to_string())
        })?;
        Self::from_record(rec)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientRecord {
    pub component: Vec<String>,
    pub n: String,
    pub value: Cyclotomic,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpansionRecord {
    pub lattice: EvenLattice,
    #[serde(default = "one")]
    pub scale: u64,
    pub weight: String,
    pub precision: String,
    pub coefficients: Vec<CoefficientRecord>,
}

fn one() -> u64 {
    1
}

/// Element record for a component index.
pub fn component_record(module: &FqModule, idx: usize) -> ElementRecord {
    ElementRecord::new(module, &module.element_at(idx))
}

/// The series of one component together with the accumulated substitution τ ↦ (rτ+t)/s.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentSeries {
    pub terms: BTreeMap<Fraction, Cyclotomic>,
    pub r: i64,
    pub t: i64,
    pub s: i64,
}

impl ComponentSeries {
    pub fn new(terms: BTreeMap<Fraction, Cyclotomic>) -> Self {
        ComponentSeries { terms, r: 1, t: 0, s: 1 }
    }

    pub fn monomial(n: Fraction, c: Cyclotomic) -> Self {
        Self::new([(n, c)].into_iter().collect())
    }

    /// c·q^n ↦ c·e(nt/s)·q^{nr/s}.
    pub fn substitute(&self, r: i64, t: i64, s: i64) -> Result<Self> {
        if s < 1 {
            return Err(Error::RangeError(format!("s must be positive, got {s}")));
        }
        let mut terms: BTreeMap<Fraction, Cyclotomic> = BTreeMap::new();
        for (n, c) in &self.terms {
            let phase = Cyclotomic::root_of_unity(&(n * int(t) / int(s)));
            let e = terms.entry(n * int(r) / int(s)).or_default();
            *e = &*e + &(c * &phase);
        }
        terms.retain(|_, v| !v.is_zero());
        // f((r₁(r₂τ+t₂)/s₂ + t₁)/s₁)
        Ok(ComponentSeries {
            terms,
            r: self.r * r,
            t: self.r * t + self.t * s,
            s: self.s * s,
        })
    }
}

/// Input precision needed for exact output below `output` under an index-n² operator.
pub fn required_input_precision(output: &Fraction, n2: u64) -> Fraction {
    output * int(n2 as i64)
}

// adjugate and determinant of the Gram matrix, exact
fn adjugate(g: &[Vec<i64>]) -> (Vec<Vec<i128>>, i128) {
    let d = g.len();
    let mut aug: Vec<Vec<Fraction>> = (0..d)
        .map(|i| {
            (0..2 * d)
                .map(|j| {
                    if j < d {
                        int(g[i][j])
                    } else {
                        int((j - d == i) as i64)
                    }
                })
                .collect()
        })
        .collect();
    for c in 0..d {
        let p = (c..d).find(|&r| !aug[r][c].is_zero()).expect("nonsingular");
        aug.swap(c, p);
        let piv = aug[c][c].clone();
        for j in 0..2 * d {
            aug[c][j] = &aug[c][j] / &piv;
        }
        for r in 0..d {
            if r != c && !aug[r][c].is_zero() {
                let f = aug[r][c].clone();
                for j in 0..2 * d {
                    let t = &f * &aug[c][j];
                    aug[r][j] -= t;
                }
            }
        }
    }
    let det = EvenLattice::new(g.to_vec(), None).unwrap().det();
    let det_i = det.to_i128().unwrap();
    let adj = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| (&aug[i][d + j] * Fraction::from_integer(det.clone())).to_integer().to_i128().unwrap())
                .collect()
        })
        .collect();
    (adj, det_i)
}

/// Θ_L with c(λ, n) = #{x ∈ λ + L : q(x) = n}.
pub fn theta_series(lattice: &EvenLattice, precision: &Fraction) -> Result<VVExpansion> {
    theta_series_scaled(lattice, 1, precision)
}

/// Theta series of L(M) on ℒ(M), counting x ∈ λ + L with M·q(x) = n.
pub fn theta_series_scaled(lattice: &EvenLattice, scale: u64, precision: &Fraction) -> Result<VVExpansion> {
    if !lattice.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    let module = FqModule::build(lattice, scale)?;
    let dim = lattice.rank();
    let weight = int(dim as i64) / int(2);
    let mut out = VVExpansion::new(module.clone(), weight, precision.clone())?;

    // x = adj·y/(det·M) runs over (1/M)L'; M q(x) = yᵀ adj y / (2 M det)
    let (adj, det) = adjugate(lattice.gram());
    let det = det.abs();
    let sign = if lattice.det().is_negative() { -1 } else { 1 };
    let adj: Vec<Vec<i128>> = adj.into_iter().map(|r| r.into_iter().map(|v| v * sign).collect()).collect();
    let m = scale as i128;
    // strict bound yᵀ adj y < 2 M det N
    let bound = precision * int((2 * m * det) as i64);
    let bound_i = bound.ceil().to_integer().to_i128().unwrap(); // yᵀadj y < bound ⇔ ≤ ceil−1
    let limit = bound_i - 1;
    if limit < 0 {
        return Ok(out);
    }

    // LDLᵀ of adj in floating point, for pruning only
    let af: Vec<Vec<f64>> = adj.iter().map(|r| r.iter().map(|v| *v as f64).collect()).collect();
    let mut qm = vec![vec![0f64; dim]; dim];
    let mut a = af.clone();
    for i in 0..dim {
        qm[i][i] = a[i][i];
        for j in i + 1..dim {
            qm[i][j] = a[i][j] / a[i][i];
        }
        for k in i + 1..dim {
            for l in i + 1..dim {
                a[k][l] -= qm[i][k] * a[i][l];
            }
        }
    }
    let slack = 1e-7 * (limit as f64 + 1.0) + 1e-7;
    let budget = enumeration_budget();
    let mut visited: u128 = 0;
    let mut counts: HashMap<(usize, (i128, i128)), u64> = HashMap::new();
    let mut class_cache: HashMap<Vec<i128>, usize> = HashMap::new();
    let modulus = det * m;
    let mut y = vec![0i128; dim];

    // depth-first over coordinates dim−1 … 0
    fn recurse(
        i: usize,
        remaining: f64,
        y: &mut Vec<i128>,
        ctx: &mut dyn FnMut(&[i128]) -> Result<()>,
        qm: &[Vec<f64>],
        slack: f64,
        visited: &mut u128,
        budget: u128,
    ) -> Result<()> {
        let dim = y.len();
        let mut center = 0f64;
        for j in i + 1..dim {
            center -= qm[i][j] * y[j] as f64;
        }
        let radius = ((remaining + slack).max(0.0) / qm[i][i]).sqrt();
        let lo = (center - radius).ceil() as i128;
        let hi = (center + radius).floor() as i128;
        for v in lo..=hi {
            *visited += 1;
            if *visited > budget {
                return Err(Error::BudgetExceeded {
                    needed: *visited,
                    limit: budget,
                });
            }
            y[i] = v;
            let diff = v as f64 - center;
            let rest = remaining - qm[i][i] * diff * diff;
            if rest < -slack {
                continue;
            }
            if i == 0 {
                ctx(y)?;
            } else {
                recurse(i - 1, rest, y, ctx, qm, slack, visited, budget)?;
            }
        }
        y[i] = 0;
        Ok(())
    }

    let mut visit = |y: &[i128]| -> Result<()> {
        let mut norm = 0i128;
        let mut ay = vec![0i128; dim];
        for i in 0..dim {
            for j in 0..dim {
                ay[i] += adj[i][j] * y[j];
            }
            norm += y[i] * ay[i];
        }
        if norm > limit {
            return Ok(());
        }
        let key: Vec<i128> = ay.iter().map(|v| v.rem_euclid(modulus)).collect();
        let idx = match class_cache.get(&key) {
            Some(i) => *i,
            None => {
                let coords: Vec<Fraction> = key
                    .iter()
                    .map(|v| Fraction::new(BigInt::from(*v), BigInt::from(modulus)))
                    .collect();
                let i = module.index_of_coords(&coords)?;
                class_cache.insert(key, i);
                i
            }
        };
        let n = Fraction::new(BigInt::from(norm), BigInt::from(2 * m * det));
        let nk = (n.numer().to_i128().unwrap(), n.denom().to_i128().unwrap());
        *counts.entry((idx, nk)).or_insert(0) += 1;
        Ok(())
    };
    recurse(dim - 1, limit as f64, &mut y, &mut visit, &qm, slack, &mut visited, budget)?;

    let mut keys: Vec<_> = counts.into_iter().collect();
    keys.sort();
    for ((idx, (nn, nd)), c) in keys {
        let n = Fraction::new(BigInt::from(nn), BigInt::from(nd));
        out.add_term(idx, n, &Cyclotomic::from_int(c as i64))?;
    }
    Ok(out)
}
