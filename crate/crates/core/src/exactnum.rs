//! Exact rational arithmetic and the bits of elementary number theory the
//! rest of the crate leans on: rising factorials, the Kronecker symbol
//! `(-3/n)` and reduction of rationals modulo prime powers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Rising factorial `(a)_n = a (a+1) ... (a+n-1)`; the empty product is 1.
pub fn pochhammer_rational(a: &Rational, n: u32) -> Rational {
    let mut acc = Rational::one();
    let mut x = a.clone();
    for _ in 0..n {
        acc *= &x;
        x += Rational::one();
    }
    acc
}

/// Jacobi symbol `(a/n)` for odd positive `n`.
fn jacobi(a: i64, n: u64) -> i8 {
    debug_assert!(n % 2 == 1);
    let mut a = a.rem_euclid(n as i64) as u64;
    let mut n = n;
    let mut result = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// The Jacobi–Kronecker symbol `(-3/n)` for odd `n` coprime to 3.
pub fn kronecker_minus3(n: u64) -> Result<i8> {
    if n == 0 || n % 2 == 0 || n % 3 == 0 {
        return Err(Error::InvalidArgument(format!(
            "(-3/n) needs odd n coprime to 3, got {n}"
        )));
    }
    Ok(jacobi(-3, n))
}

/// Residue of `x` modulo `p^e`, in `[0, p^e)`.
pub fn mod_prime_power_reduce(x: &Rational, p: u64, e: u32) -> Result<BigInt> {
    let modulus = num_traits::pow(BigInt::from(p), e as usize);
    let den = x.denom();
    if (den % BigInt::from(p)).is_zero() {
        return Err(Error::NonPIntegral { p });
    }
    let inv = den
        .mod_floor(&modulus)
        .modinv(&modulus)
        .expect("denominator coprime to p is invertible mod p^e");
    Ok((x.numer() * inv).mod_floor(&modulus))
}

/// Deterministic trial-division primality test; inputs here stay small.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}
