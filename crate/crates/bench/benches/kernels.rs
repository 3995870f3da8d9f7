use criterion::{black_box, criterion_group, criterion_main, Criterion};

use weilhecke::heckeops::{op_h, Convention};
use weilhecke::qexpansion::theta_series;
use weilhecke::scalars::{frac, int};
use weilhecke::weilaction::{rho_beta_closed, BetaParams};
use weilhecke::{Cyclotomic, EvenLattice};

fn cyclotomic_mul(c: &mut Criterion) {
    let a = Cyclotomic::from_root_counts(45, &[(1, 2), (7, -1), (11, 3), (30, 1)]);
    let b = Cyclotomic::from_root_counts(36, &[(2, 1), (5, 4), (13, -2)]);
    c.bench_function("cyclotomic_mul_lcm180", |bch| bch.iter(|| black_box(&a) * black_box(&b)));
    c.bench_function("cyclotomic_inv_order45", |bch| bch.iter(|| black_box(&a).inv().unwrap()));
}

fn theta(c: &mut Criterion) {
    let e8 = EvenLattice::e8();
    c.bench_function("theta_e8_prec4", |b| b.iter(|| theta_series(black_box(&e8), &int(4)).unwrap()));
    let a2 = EvenLattice::a2();
    c.bench_function("theta_a2_prec100", |b| b.iter(|| theta_series(black_box(&a2), &int(100)).unwrap()));
}

fn operators(c: &mut Criterion) {
    let f = theta_series(&EvenLattice::a1a1(), &int(36)).unwrap();
    c.bench_function("op_h_a1a1_n6", |b| b.iter(|| op_h(black_box(&f), 6, Convention::SELECTED).unwrap()));
    let g = theta_series(&EvenLattice::a2(), &frac(81, 1)).unwrap();
    c.bench_function("op_h_a2_n9", |b| b.iter(|| op_h(black_box(&g), 9, Convention::SELECTED).unwrap()));
    let beta = BetaParams::new(3, 2, 3, 2).unwrap();
    let a2 = EvenLattice::a2();
    c.bench_function("rho_beta_closed_a2_s3", |b| b.iter(|| rho_beta_closed(black_box(&a2), &beta).unwrap()));
}

criterion_group!(benches, cyclotomic_mul, theta, operators);
criterion_main!(benches);
