//! One runner per verification suite.

use std::time::Instant;

use serde_json::{json, Value};

use weilhecke::heckeops::{
    bs_closed, bs_oracle, bs_support_violations, check_multiplicative, check_pu, check_relation, check_up,
    classical_hecke, op_h, op_u, pu_constant, Convention, HeckeConfig, Projection, UpSelector,
};
use weilhecke::qexpansion::{theta_series, theta_series_scaled};
use weilhecke::quadmodule::enumeration_budget;
use weilhecke::repnums::{ramanujan_check, ramanujan_check_scaled, units};
use weilhecke::scalars::{fmt_fraction, int, parse_fraction};
use weilhecke::weilaction::{falsify_naive_identity, rho_beta_closed, rho_beta_oracle, BetaParams};
use weilhecke::{CaseReport, Error, EvenLattice, FqModule, Fraction, Status, VVExpansion};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::config::{CaseConfig, InputKind, PuMode, Suite};

/// Overrides applied to every case.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub precision: Option<Fraction>,
    pub timing: bool,
}

pub fn run_case(case: &CaseConfig, opts: &RunOptions) -> CaseReport {
    let start = Instant::now();
    let mut rep = match run_inner(case, opts) {
        Ok(r) => r,
        Err(e) => {
            let status = match e {
                Error::BudgetExceeded { .. } => Status::BudgetExceeded,
                _ => Status::Error,
            };
            let mut r = CaseReport::new(case.suite.to_string(), case_params(case)).note(e.to_string());
            r.status = status;
            r
        }
    };
    rep.case = case.suite.to_string();
    rep.params = case_params(case);
    if opts.timing {
        rep.timing_ms = Some(start.elapsed().as_millis() as u64);
    }
    rep
}

fn case_params(case: &CaseConfig) -> Value {
    serde_json::to_value(case).expect("case serializes")
}

fn lattice(case: &CaseConfig) -> EvenLattice {
    case.lattice().expect("validated")
}

fn precision(case: &CaseConfig, opts: &RunOptions) -> Fraction {
    opts.precision.clone().unwrap_or_else(|| case.precision().expect("validated"))
}

fn over_budget(case: &CaseConfig, needed: u128) -> Option<CaseReport> {
    let limit = case.budget.map(|b| b as u128).unwrap_or_else(enumeration_budget);
    (needed > limit).then(|| {
        let mut r = CaseReport::new(case.suite.to_string(), Value::Null)
            .note(format!("estimated work {needed} exceeds the budget {limit}"));
        r.status = Status::BudgetExceeded;
        r
    })
}

fn theta_weight(lat: &EvenLattice) -> Fraction {
    int(lat.rank() as i64) / int(2)
}

fn run_inner(case: &CaseConfig, opts: &RunOptions) -> weilhecke::Result<CaseReport> {
    match case.suite {
        Suite::Thm52 => weil(case),
        Suite::Falsifier => falsifier(case),
        Suite::Ramanujan => ramanujan(case),
        Suite::Thm54 => closed_coefficients(case, opts),
        Suite::Relation => relation(case, opts),
        Suite::Multiplicativity => multiplicativity(case, opts),
        Suite::PuIdentity => pu_identity(case, opts),
        Suite::Classical => classical(case, opts),
    }
}

fn weil(case: &CaseConfig) -> weilhecke::Result<CaseReport> {
    let lat = lattice(case);
    let p = case.p.expect("validated");
    let l = case.l.expect("validated");
    let svals = case.s_values(2 * l - 1).expect("validated");
    let size = FqModule::build(&lat, 1)?.order() as u128;
    let smax = *svals.iter().max().unwrap();
    if let Some(r) = over_budget(case, size * size * (p as u128).pow(smax * lat.rank() as u32)) {
        return Ok(r);
    }
    let mut rep = CaseReport::new("", Value::Null);
    let mut compared = 0usize;
    for s in svals {
        for h in units(p.pow(s)) {
            let b = BetaParams::new(p, l, s, h)?;
            let closed = rho_beta_closed(&lat, &b)?;
            let oracle = rho_beta_oracle(&lat, &b)?;
            compared += 1;
            for (c, r, a, o) in closed.diff(&oracle) {
                rep.add_mismatch(json!({"s": s, "h": h, "column": c, "row": r, "closed": a, "oracle": o}));
            }
        }
    }
    Ok(rep.constant("matrices_compared", compared.to_string()))
}

fn falsifier(case: &CaseConfig) -> weilhecke::Result<CaseReport> {
    let lat = lattice(case);
    let p = case.p.expect("validated");
    let s = case.s_values(u32::MAX).expect("validated")[0];
    let coords: Vec<Fraction> = case
        .lambda
        .as_ref()
        .expect("validated")
        .iter()
        .map(|x| parse_fraction(x))
        .collect::<weilhecke::Result<_>>()?;
    let m = FqModule::build(&lat, 1)?;
    let lambda = m.element(coords)?;
    let mut rep = CaseReport::new("", Value::Null);
    match falsify_naive_identity(&lat, p, s, &lambda, case.shift.as_ref().expect("validated")) {
        Ok(w) => {
            rep.status = Status::WitnessFound;
            rep.witness = Some(serde_json::to_value(&w).expect("witness serializes"));
        }
        Err(Error::WitnessNotFound) => {
            rep.status = Status::Fail;
            rep = rep.note("no witness: both representatives give the same right-hand side");
        }
        Err(e) => return Err(e),
    }
    Ok(rep)
}

fn ramanujan(case: &CaseConfig) -> weilhecke::Result<CaseReport> {
    let lat = lattice(case);
    let p = case.p.expect("validated");
    let l = case.l.expect("validated");
    let svals = case.s_values(2 * l - 1).expect("validated");
    let m = FqModule::build(&lat, 1)?;
    let smax = *svals.iter().max().unwrap();
    let work = m.order() as u128 * (p as u128).pow(smax * (1 + lat.rank() as u32));
    if let Some(r) = over_budget(case, work) {
        return Ok(r);
    }
    let mut rep = CaseReport::new("", Value::Null);
    let mut classes = 0usize;
    for s in svals {
        let ps = p.pow(s);
        let factor = int(p.pow(2 * s.saturating_sub(l)) as i64);
        for i in 0..m.order() as usize {
            let lambda = m.element_at(i);
            let q = m.q_value(&lambda)?;
            for j in 0..ps {
                classes += 1;
                let n = &q + int(j as i64);
                let (a, b) = ramanujan_check(&lat, lambda.coords(), &n, p, s)?;
                if a != b {
                    rep.add_mismatch(json!({"form": "plain", "s": s, "lambda": lambda.to_strings(), "n": fmt_fraction(&n), "lhs": a, "rhs": b}));
                }
                let r = &factor * &q + int(j as i64);
                let (a, b) = ramanujan_check_scaled(&lat, lambda.coords(), &r, p, s, l)?;
                if a != b {
                    rep.add_mismatch(json!({"form": "scaled", "s": s, "lambda": lambda.to_strings(), "n": fmt_fraction(&r), "lhs": a, "rhs": b}));
                }
            }
        }
    }
    Ok(rep.constant("classes", classes.to_string()))
}

fn closed_coefficients(case: &CaseConfig, opts: &RunOptions) -> weilhecke::Result<CaseReport> {
    let lat = lattice(case);
    let p = case.p.expect("validated");
    let l = case.l.expect("validated");
    let out = precision(case, opts);
    let svals = case.s_values(2 * l - 1).expect("validated");
    let size = FqModule::build(&lat, 1)?.order() as u128;
    let smax = *svals.iter().max().unwrap();
    let work = size * (p as u128).pow(smax * lat.rank() as u32) * (p as u128).pow(2 * smax.saturating_sub(l));
    if let Some(r) = over_budget(case, work) {
        return Ok(r);
    }
    let cfg = HeckeConfig::new(p, l, theta_weight(&lat), lat.rank())?;
    let mut rep = CaseReport::new("", Value::Null);
    let mut nonzero = 0usize;
    for s in svals {
        let need = if s <= l { out.clone() } else { &out * int(p.pow(2 * (s - l)) as i64) };
        let f = theta_series(&lat, &need)?;
        let closed = bs_closed(&f, p, l, s)?.truncate(&out);
        let oracle = bs_oracle(&f, p, l, s)?;
        nonzero += closed.len();
        for m in closed.compare(&oracle.expansion.truncate(&out))? {
            rep.add_mismatch(json!({"s": s, "component": m.component, "n": fmt_fraction(&m.n), "closed": m.lhs, "oracle": m.rhs}));
        }
        for a in &oracle.anomalies {
            rep.add_mismatch(json!({"s": s, "anomaly": a}));
        }
        for (i, n) in bs_support_violations(&closed, p, l, s)? {
            rep.add_mismatch(json!({"s": s, "support_violation": closed.module().element_at(i).to_strings(), "n": fmt_fraction(&n)}));
        }
        let k = if s <= l { cfg.k_p(s)? } else { cfg.k_tilde_p(s)? };
        rep = rep.constant(format!("K[s={s}]"), k.to_string());
    }
    Ok(rep.constant("nonzero_coefficients", nonzero.to_string()))
}

fn fiber_work(lat: &EvenLattice, n: u64, input_precision: &Fraction) -> weilhecke::Result<u128> {
    let size = FqModule::build(lat, 1)?.order() as u128;
    let len = input_precision.ceil().to_integer().try_into().unwrap_or(u128::MAX);
    Ok(size * (n as u128).pow(lat.rank() as u32) * len.max(1))
}

/// The theta series, or a seeded random expansion with the same module, weight and precision.
fn input_expansion(case: &CaseConfig, lat: &EvenLattice, precision: &Fraction) -> weilhecke::Result<VVExpansion> {
    match case.input.unwrap_or_default() {
        InputKind::Theta => theta_series(lat, precision),
        InputKind::Random => {
            let m = FqModule::build(lat, 1)?;
            let mut f = VVExpansion::new(m.clone(), theta_weight(lat), precision.clone())?;
            let mut rng = StdRng::seed_from_u64(case.seed.expect("validated"));
            for i in 0..m.order() as usize {
                let mut n = m.q_value(&m.element_at(i))?;
                while &n < precision {
                    f.add_term(i, n.clone(), &weilhecke::Cyclotomic::from_int(rng.gen_range(-9..=9)))?;
                    n += int(1);
                }
            }
            Ok(f)
        }
    }
}

fn relation(case: &CaseConfig, opts: &RunOptions) -> weilhecke::Result<CaseReport> {
    let lat = lattice(case);
    let p = case.p.expect("validated");
    let l = case.l.expect("validated");
    let out = precision(case, opts);
    let conv = case.convention().expect("validated");
    let input = &out * int(p.pow(2 * l) as i64);
    if let Some(r) = over_budget(case, fiber_work(&lat, p.pow(2 * l - 1), &input)?) {
        return Ok(r);
    }
    let f = input_expansion(case, &lat, &input)?;
    check_relation(&f, p, l, conv, &out)
}

fn multiplicativity(case: &CaseConfig, opts: &RunOptions) -> weilhecke::Result<CaseReport> {
    let lat = lattice(case);
    let (m, n) = (case.m.expect("validated"), case.n.expect("validated"));
    let out = precision(case, opts);
    let conv = case.convention().expect("validated");
    let input = &out * int((m * m * n * n) as i64);
    if let Some(r) = over_budget(case, fiber_work(&lat, m * n, &input)?) {
        return Ok(r);
    }
    let f = input_expansion(case, &lat, &input)?;
    check_multiplicative(&f, m, n, conv)
}

fn all_conventions() -> [Convention; 4] {
    let mut out = [Convention::LITERAL; 4];
    let mut k = 0;
    for up in [UpSelector::ScaledByN, UpSelector::Base] {
        for projection in [Projection::Sum, Projection::Average] {
            out[k] = Convention { up, projection };
            k += 1;
        }
    }
    out
}

fn pu_identity(case: &CaseConfig, opts: &RunOptions) -> weilhecke::Result<CaseReport> {
    let lat = lattice(case);
    let n = case.n.expect("validated");
    let out = precision(case, opts);
    let conv = case.convention().expect("validated");
    let size = FqModule::build(&lat, n * n)?.order() as u128;
    if let Some(r) = over_budget(case, size) {
        return Ok(r);
    }
    let f = theta_series(&lat, &out)?;
    match case.mode.expect("validated") {
        PuMode::Pu => {
            let mut rep = check_pu(&f, n, conv)?;
            for c in all_conventions() {
                let v = match pu_constant(&f, n, c)? {
                    Some(x) => x.to_string(),
                    None => "not proportional".into(),
                };
                rep = rep.constant(format!("c[{}]", c.label()), v);
            }
            Ok(rep)
        }
        PuMode::UpSupported => check_up(&op_u(&f, n, conv)?, n, conv),
        PuMode::UpUnsupported => {
            let g = theta_series_scaled(&lat, n * n, &out)?;
            let mut rep = check_up(&g, n, conv)?;
            if rep.mismatches.is_empty() {
                rep.status = Status::Fail;
                rep = rep.note("expected U∘P to differ from the identity on this input");
            } else {
                rep.witness = Some(rep.mismatches[0].clone());
                rep.status = Status::WitnessFound;
            }
            Ok(rep)
        }
    }
}

fn classical(case: &CaseConfig, opts: &RunOptions) -> weilhecke::Result<CaseReport> {
    let lat = lattice(case);
    let n = case.n.expect("validated");
    let out = precision(case, opts);
    let conv = case.convention().expect("validated");
    let input = &out * int((n * n) as i64);
    if let Some(r) = over_budget(case, fiber_work(&lat, n, &input)?) {
        return Ok(r);
    }
    let f: VVExpansion = theta_series(&lat, &input)?;
    let lhs = op_h(&f, n, conv)?.truncate(&out);
    let rhs = classical_hecke(&f, n * n)?.truncate(&out);
    let c0 = f.get(0, &int(0));
    let ratio = |g: &VVExpansion| -> weilhecke::Result<String> {
        Ok((&g.get(0, &int(0)) * &c0.inv()?).to_string())
    };
    let scalar_eigen = rhs.compare(&f.truncate(&out).scale(&(&rhs.get(0, &int(0)) * &c0.inv()?)))?.is_empty();
    let rep = CaseReport::new("", Value::Null)
        .with_mismatches(&lhs.compare(&rhs)?)
        .constant("scalar_eigenvalue", ratio(&rhs)?)
        .constant("scalar_is_eigenform", scalar_eigen.to_string())
        .constant("vector_constant_term_ratio", ratio(&lhs)?)
        .constant("convention", conv.label());
    Ok(rep)
}
