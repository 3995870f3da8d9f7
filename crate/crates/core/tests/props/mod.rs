//! Property suites shared by the core tests and the acceptance run.

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use weilhecke::heckeops::{PairData, TEvaluator};
use weilhecke::qexpansion::theta_series;
use weilhecke::scalars::{int, mod_one, sqrt_prime};
use weilhecke::weilaction::{rho_beta_oracle, rho_beta_oracle_shifted, BetaParams};
use weilhecke::{Cyclotomic, EvenLattice, FqModule, ModuleElement};

const SEED: [u8; 32] = *b"weilhecke property suite seed 01";
const CASES: u32 = 128;

fn runner() -> TestRunner {
    let config = Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &SEED))
}

fn lattices() -> Vec<EvenLattice> {
    vec![EvenLattice::a1(), EvenLattice::a1a1(), EvenLattice::a2(), EvenLattice::e8()]
}

fn cyclotomic() -> impl Strategy<Value = Cyclotomic> {
    prop::sample::select(vec![1u64, 3, 4, 5, 7, 8, 9, 12, 15]).prop_flat_map(|m| {
        prop::collection::vec(-3i64..=3, m as usize).prop_map(move |c| {
            let counts: Vec<(u64, i64)> = c.into_iter().enumerate().map(|(j, x)| (j as u64, x)).collect();
            Cyclotomic::from_root_counts(m, &counts)
        })
    })
}

pub fn field_axioms() -> Result<(), String> {
    runner()
        .run(&(cyclotomic(), cyclotomic(), cyclotomic()), |(a, b, c)| {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert!((&a - &a).is_zero());
            prop_assert_eq!(&a * &Cyclotomic::one(), a.clone());
            if !a.is_zero() {
                prop_assert_eq!(&a * &a.inv().unwrap(), Cyclotomic::one());
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn square_roots_of_primes() -> Result<(), String> {
    runner()
        .run(&prop::sample::select(vec![2u64, 3, 5, 7, 11, 13, 17, 19, 23]), |p| {
            let r = sqrt_prime(p).unwrap();
            prop_assert_eq!(&r * &r, Cyclotomic::from_int(p as i64));
            prop_assert_eq!(r.conj(), r);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn bilinear_form_from_quadratic_form() -> Result<(), String> {
    let strat = (0usize..4, 1u64..=4, any::<u64>(), any::<u64>());
    runner()
        .run(&strat, |(li, n, a, b)| {
            let m = FqModule::build(&lattices()[li], n).unwrap();
            let x = m.element_at((a % m.order()) as usize);
            let y = m.element_at((b % m.order()) as usize);
            let lhs = m.b_value(&x, &y).unwrap();
            let rhs = mod_one(&(m.q_value(&m.add(&x, &y)).unwrap() - m.q_value(&x).unwrap() - m.q_value(&y).unwrap()));
            prop_assert_eq!(lhs, rhs);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn character_orthogonality() -> Result<(), String> {
    let strat = (0usize..3, 1u64..=3, any::<u64>());
    runner()
        .run(&strat, |(li, n, a)| {
            let m = FqModule::build(&lattices()[li], n).unwrap();
            let x = m.element_at((a % m.order()) as usize);
            let expect = if x.is_zero() { m.order() as i64 } else { 0 };
            prop_assert_eq!(m.char_sum(&x).unwrap(), Cyclotomic::from_int(expect));
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn module_order_scales() -> Result<(), String> {
    let strat = (0usize..4, 1u64..=6);
    runner()
        .run(&strat, |(li, n)| {
            let lat = &lattices()[li];
            let base = FqModule::build(lat, 1).unwrap().order();
            let m = FqModule::build(lat, n).unwrap();
            prop_assert_eq!(m.order(), n.pow(lat.rank() as u32) * base);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn weil_oracle_representative_independent() -> Result<(), String> {
    let cases = [(1u32, 1u32), (2, 1), (2, 3)];
    let strat = (0usize..2, 0usize..3, 1u64..27, prop::collection::vec(-2i64..=2, 2));
    runner()
        .run(&strat, |(li, ci, h, w)| {
            let lat = [EvenLattice::a1(), EvenLattice::a1a1()][li].clone();
            let (l, s) = cases[ci];
            let h = if h % 3 == 0 { h + 1 } else { h };
            let b = BetaParams::new(3, l, s, h).unwrap();
            let shift = &w[..lat.rank()];
            let plain = rho_beta_oracle(&lat, &b).unwrap();
            let shifted = rho_beta_oracle_shifted(&lat, &b, Some(shift)).unwrap();
            prop_assert!(plain.diff(&shifted).is_empty());
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn t_phase_representative_independent() -> Result<(), String> {
    let thetas: Vec<_> = [EvenLattice::a1(), EvenLattice::a1a1(), EvenLattice::a2()]
        .iter()
        .map(|l| theta_series(l, &int(9)).unwrap())
        .collect();
    let strat = (0usize..3, 2u64..=3, any::<u64>(), prop::collection::vec(-3i64..=3, 2));
    runner()
        .run(&strat, |(li, n, a, w)| {
            let f = &thetas[li];
            let ev = TEvaluator::new(f, n).unwrap();
            let mu = ev.target().element_at((a % ev.target().order()) as usize);
            let moved = mu.shifted(&w[..f.module().rank()]);
            prop_assert_eq!(ev.component(&mu).unwrap(), ev.component(&moved).unwrap());
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn pair_exponent_is_simple_quotient() -> Result<(), String> {
    let strat = (0usize..2, 1u32..=2, 1u32..=2, any::<u64>(), any::<u64>(), 0i64..6);
    runner()
        .run(&strat, |(li, l, s, a, b, j)| {
            let s = s.min(l);
            let lat = [EvenLattice::a1a1(), EvenLattice::a2()][li].clone();
            let m = FqModule::build(&lat, 1).unwrap();
            let pp = 3u64.pow(l - s);
            let mult = m.multiples_subgroup(pp).unwrap();
            let tors = m.torsion_subgroup(pp);
            let lambda = &mult[(a % mult.len() as u64) as usize];
            let lp = &tors[(b % tors.len() as u64) as usize];
            let mu: ModuleElement = m.add(&m.divide(lambda, pp).unwrap(), lp);
            // an n that passes the divisibility filter
            let n = (m.q_lift(&mu).unwrap() + int(j)) * int((pp * pp) as i64);
            let pd = PairData::new(&m, lambda, lp, &n, 3, l, s).unwrap();
            prop_assert_eq!(pd.n_two_term, Some(pd.n_simple.clone()));
            prop_assert_eq!(m.mul(&pd.mu, pp as i64), lambda.clone());
            // and an arbitrary one on the grading of λ
            let n2 = m.q_value(lambda).unwrap() + int(j);
            let pd2 = PairData::new(&m, lambda, lp, &n2, 3, l, s).unwrap();
            if let Some(t) = pd2.n_two_term {
                prop_assert_eq!(t, pd2.n_simple);
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Every suite by name.
pub const ALL: &[(&str, fn() -> Result<(), String>)] = &[
    ("field_axioms", field_axioms),
    ("square_roots_of_primes", square_roots_of_primes),
    ("bilinear_form_from_quadratic_form", bilinear_form_from_quadratic_form),
    ("character_orthogonality", character_orthogonality),
    ("module_order_scales", module_order_scales),
    ("weil_oracle_representative_independent", weil_oracle_representative_independent),
    ("t_phase_representative_independent", t_phase_representative_independent),
    ("pair_exponent_is_simple_quotient", pair_exponent_is_simple_quotient),
];
