use weilhecke::heckeops::{bs_closed, bs_oracle, classical_hecke, op_h, Convention};
use weilhecke::qexpansion::theta_series;
use weilhecke::repnums::{moebius_sum, rep_number, RepQuery};
use weilhecke::scalars::{frac, int};
use weilhecke::{Cyclotomic, EvenLattice};

#[test]
fn theta_coefficients() {
    let e8 = theta_series(&EvenLattice::e8(), &int(4)).unwrap();
    let want = [1i64, 240, 2160, 6720];
    for (n, c) in want.iter().enumerate() {
        assert_eq!(e8.get(0, &int(n as i64)), Cyclotomic::from_int(*c));
    }
    let a1 = theta_series(&EvenLattice::a1(), &int(3)).unwrap();
    assert_eq!(a1.get(0, &int(1)), Cyclotomic::from_int(2));
    assert_eq!(a1.get(1, &frac(1, 4)), Cyclotomic::from_int(2));
    assert_eq!(a1.get(1, &frac(9, 4)), Cyclotomic::from_int(2));
    let a2 = theta_series(&EvenLattice::a2(), &int(2)).unwrap();
    assert_eq!(a2.get(0, &int(1)), Cyclotomic::from_int(6));
}

#[test]
fn representation_numbers() {
    let l = EvenLattice::a1a1();
    let z = vec![int(0), int(0)];
    assert_eq!(rep_number(&RepQuery::plain(&l, &z, &int(0), 3)).unwrap(), 1);
    // q = x² + y² ≡ 0 mod 3 only at the origin, so G = 1/3 − 1 = −2/3
    assert_eq!(moebius_sum(&l, &z, &int(0), 3, 1).unwrap(), frac(-2, 3));
}

#[test]
fn closed_coefficient_example() {
    let f = theta_series(&EvenLattice::a1a1(), &int(2)).unwrap();
    let b = bs_closed(&f, 3, 1, 1).unwrap();
    assert_eq!(b.get(0, &int(0)), Cyclotomic::from_fraction(&frac(-2, 3)));
    assert_eq!(bs_oracle(&f, 3, 1, 1).unwrap().expansion.get(0, &int(0)), b.get(0, &int(0)));
}

#[test]
fn closed_equals_oracle_at_higher_precision() {
    for lat in [EvenLattice::a1a1(), EvenLattice::a2()] {
        for (l, s) in [(1u32, 1u32), (2, 1), (2, 2), (2, 3)] {
            let out = int(5);
            let need = if s <= l { out.clone() } else { &out * int(9i64.pow(s - l)) };
            let f = theta_series(&lat, &need).unwrap();
            let c = bs_closed(&f, 3, l, s).unwrap().truncate(&out);
            let o = bs_oracle(&f, 3, l, s).unwrap();
            assert!(o.anomalies.is_empty());
            assert!(c.compare(&o.expansion.truncate(&out)).unwrap().is_empty(), "{} l={l} s={s}", lat.name());
        }
    }
}

#[test]
fn classical_eigenvalue() {
    let f = theta_series(&EvenLattice::e8(), &int(12)).unwrap();
    let t = classical_hecke(&f, 4).unwrap();
    assert_eq!(t, f.truncate(&int(3)).scale(&Cyclotomic::from_int(73)));
}

#[test]
fn vector_valued_operator_on_e8() {
    // the fiber sum over (1/2)E8/E8 does not reproduce the classical eigenvalue
    let f = theta_series(&EvenLattice::e8(), &int(12)).unwrap();
    let sum = op_h(&f, 2, Convention::LITERAL).unwrap();
    assert_eq!(sum.get(0, &int(0)), Cyclotomic::from_int(1408));
    assert_eq!(sum.get(0, &int(1)), Cyclotomic::from_int(4715520));
    let avg = op_h(&f, 2, Convention::SELECTED).unwrap();
    assert_eq!(avg.get(0, &int(0)), Cyclotomic::from_fraction(&frac(11, 2)));
    assert_eq!(avg.get(0, &int(1)), Cyclotomic::from_int(18420));
}
