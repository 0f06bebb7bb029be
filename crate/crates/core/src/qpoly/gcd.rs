//! Modular GCD for integer polynomials.
//!
//! Images modulo word-sized primes are combined by Chinese remaindering until
//! the symmetric lift stops changing; the lift is then confirmed by exact
//! division over `Z`. A constant image modulo any good prime proves the GCD is
//! trivial.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::zpoly::{self, invmod, mulmod, powmod, ZPoly};

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes just below 2^62, descending.
struct PrimeStream(u64);

impl Iterator for PrimeStream {
    type Item = u64;
    fn next(&mut self) -> Option<u64> {
        loop {
            self.0 -= 2;
            if is_prime_u64(self.0) {
                return Some(self.0);
            }
        }
    }
}

fn trim_mod(p: &mut Vec<u64>) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

/// Monic GCD over `F_p`.
fn gcd_mod(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r0: Vec<u64> = a.to_vec();
    let mut r1: Vec<u64> = b.to_vec();
    trim_mod(&mut r0);
    trim_mod(&mut r1);
    while !r1.is_empty() {
        // r0 <- r0 mod r1
        let d1 = r1.len() - 1;
        let inv = invmod(r1[d1], p);
        while r0.len() > d1 {
            let top = r0.len() - 1;
            let c = mulmod(r0[top], inv, p);
            if c != 0 {
                let base = top - d1;
                for (i, &v) in r1.iter().enumerate() {
                    let sub = mulmod(c, v, p);
                    r0[base + i] = (r0[base + i] + p - sub) % p;
                }
            }
            r0.pop();
            trim_mod(&mut r0);
        }
        std::mem::swap(&mut r0, &mut r1);
    }
    if let Some(&lc) = r0.last() {
        let inv = invmod(lc, p);
        for c in r0.iter_mut() {
            *c = mulmod(*c, inv, p);
        }
    }
    r0
}

fn symmetric(c: &BigInt, m: &BigInt) -> BigInt {
    let r = c.mod_floor(m);
    if &r * 2 > *m {
        r - m
    } else {
        r
    }
}

fn primitive_positive(mut p: ZPoly) -> ZPoly {
    let g = zpoly::content(&p);
    if !g.is_zero() && !g.is_one() {
        for c in p.iter_mut() {
            *c = &*c / &g;
        }
    }
    if p.last().is_some_and(|c| c.is_negative()) {
        for c in p.iter_mut() {
            *c = -&*c;
        }
    }
    p
}

/// GCD of two nonzero integer polynomials, primitive with positive leading
/// coefficient.
pub(crate) fn gcd_int(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    assert!(!zpoly::is_zero(a) && !zpoly::is_zero(b));
    let la = zpoly::low_degree(a).unwrap();
    let lb = zpoly::low_degree(b).unwrap();
    let shift = la.min(lb);
    let a = primitive_positive(a[la..].to_vec());
    let b = primitive_positive(b[lb..].to_vec());
    let with_shift = |g: ZPoly| -> ZPoly {
        let mut out = vec![BigInt::zero(); shift];
        out.extend(g);
        out
    };
    if a.len() == 1 || b.len() == 1 {
        return with_shift(vec![BigInt::one()]);
    }
    // Cheap exits when one side divides the other.
    let (small, large) = if a.len() <= b.len() { (&a, &b) } else { (&b, &a) };
    if zpoly::div_exact(large, small).is_some() {
        return with_shift(small.clone());
    }

    let lc_a = a.last().unwrap().clone();
    let lc_b = b.last().unwrap().clone();
    let lc_g = lc_a.gcd(&lc_b);

    let mut best_deg = usize::MAX;
    let mut modulus = BigInt::one();
    let mut acc: Vec<BigInt> = Vec::new();
    let mut last_lift: Option<ZPoly> = None;

    for p in PrimeStream((1u64 << 62) + 1) {
        let pb = BigInt::from(p);
        if (&lc_a % &pb).is_zero() || (&lc_b % &pb).is_zero() {
            continue;
        }
        let g = gcd_mod(&zpoly::reduce(&a, p), &zpoly::reduce(&b, p), p);
        let deg = g.len() - 1;
        if deg == 0 {
            return with_shift(vec![BigInt::one()]);
        }
        if deg > best_deg {
            continue;
        }
        let scale = zpoly::reduce_bigint(&lc_g, p);
        let image: Vec<u64> = g.iter().map(|&c| mulmod(c, scale, p)).collect();
        if deg < best_deg {
            best_deg = deg;
            modulus = pb;
            acc = image.iter().map(|&c| BigInt::from(c)).collect();
            last_lift = None;
            continue;
        }
        // CRT: x = acc (mod modulus), x = image (mod p)
        let minv = zpoly::reduce_bigint(&modulus, p);
        let minv = invmod(minv, p);
        for (x, &r) in acc.iter_mut().zip(image.iter()) {
            let xr = zpoly::reduce_bigint(x, p);
            let t = mulmod((r + p - xr) % p, minv, p);
            *x += &modulus * t;
        }
        modulus *= &pb;
        let lift: ZPoly = acc.iter().map(|c| symmetric(c, &modulus)).collect();
        if last_lift.as_ref() == Some(&lift) {
            let cand = primitive_positive(lift.clone());
            if zpoly::div_exact(&a, &cand).is_some() && zpoly::div_exact(&b, &cand).is_some() {
                return with_shift(cand);
            }
        }
        last_lift = Some(lift);
    }
    unreachable!("prime stream is infinite")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(v: &[i64]) -> ZPoly {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn primes_are_prime() {
        let ps: Vec<u64> = PrimeStream((1u64 << 62) + 1).take(3).collect();
        assert!(ps.iter().all(|&p| p < (1 << 62) && is_prime_u64(p)));
        assert!(is_prime_u64(FILTER));
        assert!(!is_prime_u64(561));
    }

    const FILTER: u64 = zpoly::FILTER_PRIME;

    #[test]
    fn small_gcds() {
        // (q+1)(q-2) and (q+1)(q+3)
        assert_eq!(gcd_int(&z(&[-2, -1, 1]), &z(&[3, 4, 1])), z(&[1, 1]));
        assert_eq!(gcd_int(&z(&[1, 1]), &z(&[1, 2])), z(&[1]));
        // q^2 (2q+2) and q (4q + 4)(q-1)
        assert_eq!(gcd_int(&z(&[0, 0, 2, 2]), &z(&[0, -4, 0, 4])), z(&[0, 1, 1]));
    }

    #[test]
    fn nontrivial_gcd_needs_several_primes() {
        // g has large coefficients so one prime cannot recover it.
        let big: BigInt = BigInt::from(10).pow(40u32) + 7;
        let g: ZPoly = vec![big.clone(), BigInt::from(3), big.clone() * 2 + 1];
        let u = z(&[1, 5, 0, 1]);
        let v = z(&[-7, 0, 2]);
        let a = zpoly::mul(&g, &u);
        let b = zpoly::mul(&g, &v);
        assert_eq!(gcd_int(&a, &b), primitive_positive(g));
    }
}
