//! Smith normal form over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Result of `U·A·V = diag(d)`; only the column transform is kept.
#[derive(Clone, Debug)]
pub struct Smith {
    pub diagonal: Vec<BigInt>,
    pub v: Vec<Vec<BigInt>>,
    pub v_inv: Vec<Vec<BigInt>>,
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect())
        .collect()
}

/// Square nonsingular input assumed; pivots on the smallest absolute value.
pub fn smith(a: &[Vec<BigInt>]) -> Smith {
    let n = a.len();
    let mut a: Vec<Vec<BigInt>> = a.to_vec();
    let mut v = identity(n);
    let mut vi = identity(n);

    for k in 0..n {
        loop {
            // smallest nonzero entry in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in k..n {
                for j in k..n {
                    if a[i][j].is_zero() {
                        continue;
                    }
                    match best {
                        Some((bi, bj)) if a[bi][bj].abs() <= a[i][j].abs() => {}
                        _ => best = Some((i, j)),
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            a.swap(k, pi);
            if pj != k {
                for row in a.iter_mut() {
                    row.swap(k, pj);
                }
                for row in v.iter_mut() {
                    row.swap(k, pj);
                }
                vi.swap(k, pj);
            }

            let mut dirty = false;
            for i in k + 1..n {
                if a[i][k].is_zero() {
                    continue;
                }
                let q = a[i][k].div_floor(&a[k][k]);
                for j in k..n {
                    let t = &q * &a[k][j];
                    a[i][j] -= t;
                }
                dirty |= !a[i][k].is_zero();
            }
            for j in k + 1..n {
                if a[k][j].is_zero() {
                    continue;
                }
                let q = a[k][j].div_floor(&a[k][k]);
                for i in 0..n {
                    let t = &q * &a[i][k];
                    a[i][j] -= t;
                    let t = &q * &v[i][k];
                    v[i][j] -= t;
                }
                for c in 0..n {
                    let t = &q * &vi[j][c];
                    vi[k][c] += t;
                }
                dirty |= !a[k][j].is_zero();
            }
            if dirty {
                continue;
            }
            // divisibility of the trailing block
            let mut fix = None;
            'outer: for i in k + 1..n {
                for j in k + 1..n {
                    if !(&a[i][j] % &a[k][k]).is_zero() {
                        fix = Some(i);
                        break 'outer;
                    }
                }
            }
            match fix {
                Some(i) => {
                    for j in k..n {
                        let t = a[i][j].clone();
                        a[k][j] += t;
                    }
                }
                None => break,
            }
        }
        if a[k][k].is_negative() {
            for j in k..n {
                a[k][j] = -a[k][j].clone();
            }
        }
    }
    Smith {
        diagonal: (0..n).map(|i| a[i][i].clone()).collect(),
        v,
        v_inv: vi,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|x| BigInt::from(*x)).collect())
            .collect()
    }

    fn check(a: &[Vec<BigInt>], s: &Smith) {
        let n = a.len();
        for i in 0..n {
            for j in 0..n {
                let p: BigInt = (0..n).map(|k| &s.v[i][k] * &s.v_inv[k][j]).sum();
                assert_eq!(p, BigInt::from((i == j) as i64));
            }
        }
        for w in s.diagonal.windows(2) {
            assert!((&w[1] % &w[0]).is_zero());
        }
        let det: BigInt = s.diagonal.iter().product();
        assert!(det.is_positive());
    }

    #[test]
    fn small_cases() {
        let a = m(&[&[2]]);
        let s = smith(&a);
        assert_eq!(s.diagonal, vec![BigInt::from(2)]);
        check(&a, &s);

        let a = m(&[&[2, 1], &[1, 2]]);
        let s = smith(&a);
        assert_eq!(s.diagonal, vec![BigInt::from(1), BigInt::from(3)]);
        check(&a, &s);

        let a = m(&[&[4, 0], &[0, 6]]);
        let s = smith(&a);
        assert_eq!(s.diagonal, vec![BigInt::from(2), BigInt::from(12)]);
        check(&a, &s);

        let a = m(&[&[6, 3, 0], &[3, 6, 3], &[0, 3, 6]]);
        let s = smith(&a);
        let det: BigInt = s.diagonal.iter().product();
        assert_eq!(det, BigInt::from(108));
        check(&a, &s);
    }
}
