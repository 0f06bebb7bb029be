//! Cyclotomic polynomials and the cyclotomic factorisation of binomials
//! `1 - q^j` and `1 + q^j`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;

use super::poly::Poly;
use super::zpoly;

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

fn mobius(mut n: u64) -> i8 {
    let mut result = 1i8;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

fn compute(n: u64) -> Vec<i64> {
    // Phi_n = prod_{d | n} (q^d - 1)^{mu(n/d)}: build the numerator from the
    // mu = +1 binomials, then divide out the mu = -1 binomials exactly.
    let mut acc: zpoly::ZPoly = vec![BigInt::from(1)];
    let divs = divisors(n);
    for &d in &divs {
        if mobius(n / d) == 1 {
            zpoly::mul_binomial(&mut acc, 1, d as usize);
        }
    }
    for &d in &divs {
        if mobius(n / d) == -1 {
            acc = zpoly::div_binomial(&acc, 1, d as usize)
                .expect("cyclotomic quotient is exact");
        }
    }
    let mut out: Vec<i64> = acc
        .iter()
        .map(|c| i64::try_from(c).expect("cyclotomic coefficients are small"))
        .collect();
    if out.last().is_some_and(|&c| c < 0) {
        for c in out.iter_mut() {
            *c = -*c;
        }
    }
    out
}

fn cache() -> &'static RwLock<HashMap<u64, Arc<[i64]>>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Arc<[i64]>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Integer coefficients of `Phi_n`, lowest degree first.
pub(crate) fn cyclotomic_coeffs(n: u64) -> Arc<[i64]> {
    assert!(n >= 1, "cyclotomic index must be positive");
    if let Some(c) = cache().read().unwrap().get(&n) {
        return c.clone();
    }
    let coeffs: Arc<[i64]> = compute(n).into();
    cache().write().unwrap().insert(n, coeffs.clone());
    coeffs
}

/// The `n`-th cyclotomic polynomial.
pub fn cyclotomic(n: u64) -> Poly {
    Poly::from_i64(&cyclotomic_coeffs(n))
}

/// Cyclotomic indices `d` with `1 - sign*q^j = unit * prod Phi_d(q)`, and the
/// unit (`-1` for `1 - q^j`, `+1` for `1 + q^j`).
pub(crate) fn binomial_factors(sign: i8, j: u64) -> (Vec<u64>, i8) {
    debug_assert!(j >= 1);
    if sign > 0 {
        (divisors(j), -1)
    } else {
        let ds = divisors(2 * j).into_iter().filter(|d| j % d != 0).collect();
        (ds, 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::int;

    #[test]
    fn table_values() {
        assert_eq!(cyclotomic(1), Poly::from_i64(&[-1, 1]));
        assert_eq!(cyclotomic(6), Poly::from_i64(&[1, -1, 1]));
        assert_eq!(
            cyclotomic(15),
            Poly::from_i64(&[1, -1, 0, 1, -1, 1, 0, -1, 1])
        );
        // first cyclotomic polynomial with a coefficient outside {-1, 0, 1}
        assert!(cyclotomic_coeffs(105).iter().any(|&c| c == -2));
    }

    #[test]
    fn fifteen_by_division() {
        // q^15 - 1 divided by Phi_1 Phi_3 Phi_5
        let mut rest = Poly::monomial(int(1), 15) - Poly::one();
        for d in [1, 3, 5] {
            rest = rest.div_exact(&cyclotomic(d)).unwrap();
        }
        assert_eq!(rest, cyclotomic(15));
    }

    #[test]
    fn product_over_divisors_is_q_n_minus_1() {
        for n in 1..=60u64 {
            let prod = divisors(n)
                .into_iter()
                .fold(Poly::one(), |acc, d| &acc * &cyclotomic(d));
            assert_eq!(prod, Poly::monomial(int(1), n as usize) - Poly::one(), "n = {n}");
        }
    }

    #[test]
    fn binomial_factorisations() {
        for j in 1..=30u64 {
            for sign in [1i8, -1] {
                let (ds, unit) = binomial_factors(sign, j);
                let prod = ds
                    .into_iter()
                    .fold(Poly::constant(int(unit as i64)), |acc, d| &acc * &cyclotomic(d));
                let expect = Poly::one() - Poly::monomial(int(sign as i64), j as usize);
                assert_eq!(prod, expect, "sign = {sign}, j = {j}");
            }
        }
    }

    #[test]
    fn mobius_values() {
        let mu: Vec<i8> = (1..=10).map(mobius).collect();
        assert_eq!(mu, vec![1, -1, -1, 0, -1, 1, -1, 0, 0, 1]);
    }
}
