//! Dense integer polynomials (`Vec<BigInt>`, lowest degree first) used on the
//! hot paths: products of binomials `1 - s q^j`, exact division by monic
//! cyclotomic factors, and word-sized modular images for fast filtering.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

pub(crate) type ZPoly = Vec<BigInt>;

pub(crate) fn trim(p: &mut ZPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

/// `p *= (1 - sign q^j)` for `j >= 1`.
pub(crate) fn mul_binomial(p: &mut ZPoly, sign: i8, j: usize) {
    debug_assert!(j >= 1);
    if p.is_empty() {
        return;
    }
    let len = p.len();
    p.resize(len + j, BigInt::zero());
    for i in (j..len + j).rev() {
        if p[i - j].is_zero() {
            continue;
        }
        let (lo, hi) = p.split_at_mut(i);
        if sign > 0 {
            hi[0] -= &lo[i - j];
        } else {
            hi[0] += &lo[i - j];
        }
    }
    trim(p);
}

/// Exact quotient `p / (1 - sign q^j)`; `None` if the division leaves a remainder.
pub(crate) fn div_binomial(p: &ZPoly, sign: i8, j: usize) -> Option<ZPoly> {
    let mut r = p.clone();
    let len = r.len();
    if len == 0 {
        return Some(r);
    }
    if len <= j {
        return None;
    }
    for i in j..len {
        if r[i - j].is_zero() {
            continue;
        }
        let (lo, hi) = r.split_at_mut(i);
        if sign > 0 {
            hi[0] += &lo[i - j];
        } else {
            hi[0] -= &lo[i - j];
        }
    }
    if r[len - j..].iter().any(|c| !c.is_zero()) {
        return None;
    }
    r.truncate(len - j);
    trim(&mut r);
    Some(r)
}

#[cfg(test)]
pub(crate) fn mul(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    trim(&mut out);
    out
}

/// Multiply by a polynomial with small coefficients (e.g. a cyclotomic polynomial).
#[cfg(test)]
pub(crate) fn mul_small(a: &[BigInt], b: &[i64]) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (j, &y) in b.iter().enumerate() {
        if y == 0 {
            continue;
        }
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            match y {
                1 => out[i + j] += x,
                -1 => out[i + j] -= x,
                _ => out[i + j] += x * y,
            }
        }
    }
    trim(&mut out);
    out
}

/// Exact division by a monic polynomial with small coefficients.
pub(crate) fn div_monic_small(p: &[BigInt], m: &[i64]) -> Option<ZPoly> {
    debug_assert_eq!(m.last(), Some(&1));
    if p.is_empty() {
        return Some(Vec::new());
    }
    let dm = m.len() - 1;
    if p.len() <= dm {
        return None;
    }
    let mut r: ZPoly = p.to_vec();
    let qlen = p.len() - dm;
    let mut quot = vec![BigInt::zero(); qlen];
    let support: Vec<(usize, i64)> = m[..dm]
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| (i, c))
        .collect();
    for qi in (0..qlen).rev() {
        let c = std::mem::take(&mut r[qi + dm]);
        if c.is_zero() {
            continue;
        }
        for &(i, mc) in &support {
            match mc {
                1 => r[qi + i] -= &c,
                -1 => r[qi + i] += &c,
                _ => r[qi + i] -= &c * mc,
            }
        }
        quot[qi] = c;
    }
    if r[..dm].iter().any(|c| !c.is_zero()) {
        return None;
    }
    trim(&mut quot);
    Some(quot)
}

/// Exact division over the integers; `None` unless `d` divides `p` in `Z[q]`.
pub(crate) fn div_exact(p: &[BigInt], d: &[BigInt]) -> Option<ZPoly> {
    assert!(!d.is_empty(), "division by the zero polynomial");
    if p.is_empty() {
        return Some(Vec::new());
    }
    let dd = d.len() - 1;
    if p.len() <= dd {
        return None;
    }
    let lead = &d[dd];
    let mut r: ZPoly = p.to_vec();
    let qlen = p.len() - dd;
    let mut quot = vec![BigInt::zero(); qlen];
    for qi in (0..qlen).rev() {
        let top = std::mem::take(&mut r[qi + dd]);
        if top.is_zero() {
            continue;
        }
        let (c, rem) = top.div_rem(lead);
        if !rem.is_zero() {
            return None;
        }
        for (i, di) in d[..dd].iter().enumerate() {
            if !di.is_zero() {
                r[qi + i] -= &c * di;
            }
        }
        quot[qi] = c;
    }
    if r[..dd].iter().any(|c| !c.is_zero()) {
        return None;
    }
    trim(&mut quot);
    Some(quot)
}

pub(crate) fn content(p: &[BigInt]) -> BigInt {
    let mut g = BigInt::zero();
    for c in p {
        if !c.is_zero() {
            g = g.gcd(c);
            if g == BigInt::from(1) {
                break;
            }
        }
    }
    g
}

/// Lowest degree carrying a nonzero coefficient.
pub(crate) fn low_degree(p: &[BigInt]) -> Option<usize> {
    p.iter().position(|c| !c.is_zero())
}

// ---------------------------------------------------------------------------
// Word-sized modular images

pub(crate) const FILTER_PRIME: u64 = 0x1fff_ffff_ffff_ffff; // 2^61 - 1

#[inline]
pub(crate) fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

pub(crate) fn invmod(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

pub(crate) fn reduce_bigint(c: &BigInt, p: u64) -> u64 {
    let m = BigInt::from(p);
    c.mod_floor(&m).to_u64().expect("residue fits in a word")
}

pub(crate) fn reduce(p: &[BigInt], prime: u64) -> Vec<u64> {
    p.iter().map(|c| reduce_bigint(c, prime)).collect()
}

/// Whether the monic small-coefficient polynomial `m` divides `a` modulo `prime`.
pub(crate) fn divides_mod(a: &[u64], m: &[i64], prime: u64) -> bool {
    let dm = m.len() - 1;
    if a.iter().all(|&c| c == 0) {
        return true;
    }
    if a.len() <= dm {
        return false;
    }
    let mm: Vec<(usize, u64)> = m[..dm]
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| (i, (c as i128).rem_euclid(prime as i128) as u64))
        .collect();
    let mut r = a.to_vec();
    for top in (dm..r.len()).rev() {
        let c = r[top];
        if c == 0 {
            continue;
        }
        r[top] = 0;
        let base = top - dm;
        for &(i, mc) in &mm {
            let sub = mulmod(c, mc, prime);
            r[base + i] = (r[base + i] + prime - sub) % prime;
        }
    }
    r[..dm].iter().all(|&c| c == 0)
}

pub(crate) fn is_zero(p: &[BigInt]) -> bool {
    p.iter().all(|c| c.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(v: &[i64]) -> ZPoly {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn binomial_round_trip() {
        let mut p = z(&[1]);
        mul_binomial(&mut p, 1, 1);
        mul_binomial(&mut p, 1, 3);
        assert_eq!(p, z(&[1, -1, 0, -1, 1]));
        let back = div_binomial(&p, 1, 3).unwrap();
        assert_eq!(back, z(&[1, -1]));
        assert!(div_binomial(&p, -1, 2).is_none());
        let mut s = z(&[1]);
        mul_binomial(&mut s, -1, 2);
        assert_eq!(s, z(&[1, 0, 1]));
    }

    #[test]
    fn monic_division() {
        // (q^2 - q + 1)(q + 1) = q^3 + 1
        let p = z(&[1, 0, 0, 1]);
        assert_eq!(div_monic_small(&p, &[1, -1, 1]).unwrap(), z(&[1, 1]));
        assert!(div_monic_small(&z(&[1, 0, 0, 2]), &[1, -1, 1]).is_none());
        assert!(divides_mod(&reduce(&p, FILTER_PRIME), &[1, -1, 1], FILTER_PRIME));
        assert!(!divides_mod(&reduce(&z(&[1, 1, 1]), FILTER_PRIME), &[1, -1, 1], FILTER_PRIME));
    }

    #[test]
    fn integer_exact_division() {
        let a = z(&[2, 3, 1]); // (q+1)(q+2)
        assert_eq!(div_exact(&a, &z(&[1, 1])).unwrap(), z(&[2, 1]));
        assert!(div_exact(&a, &z(&[1, 2])).is_none());
        assert_eq!(mul(&z(&[2, 1]), &z(&[1, 1])), a);
        assert_eq!(mul_small(&z(&[2, 1]), &[1, 1]), a);
    }
}
