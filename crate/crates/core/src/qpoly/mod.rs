//! Exact polynomials and rational functions in `q`: cyclotomic polynomials,
//! `q`-numbers and finite `q`-Pochhammer symbols.

mod cyclotomic;
mod gcd;
mod poly;
mod ratfunc;
pub(crate) mod zpoly;

pub use cyclotomic::{cyclotomic, divisors};
pub(crate) use cyclotomic::{binomial_factors, cyclotomic_coeffs};
pub use poly::Poly;
pub use ratfunc::{ratfunc_qinv_equal, RatFunc};

use crate::exactnum::Rational;
use num_traits::One;

/// Sign of a `q`-power base: `Plus` stands for `q^a`, `Minus` for `-q^a`, so a
/// factor reads `1 - q^a` or `1 + q^a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_value(v: i8) -> Self {
        if v >= 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_value(self.value() * rhs.value())
    }
}

/// `1 - sign*q^e` as a Laurent polynomial cleared into a rational function.
fn binomial(sign: Sign, e: i64) -> RatFunc {
    let s = Rational::from_integer(sign.value().into());
    let m = Poly::monomial(s, e.unsigned_abs() as usize);
    if e >= 0 {
        RatFunc::from_poly(&Poly::one() - &m)
    } else {
        // 1 - s q^{-m} = (q^m - s)/q^m
        let num = &Poly::monomial(Rational::one(), e.unsigned_abs() as usize)
            - &Poly::constant(Rational::from_integer(sign.value().into()));
        RatFunc::new(num, Poly::monomial(Rational::one(), e.unsigned_abs() as usize))
            .expect("monomial denominator is nonzero")
    }
}

/// `[m]_q = (1 - q^m)/(1 - q)` for any integer `m`.
pub fn q_number(m: i64) -> RatFunc {
    binomial(Sign::Plus, m)
        .checked_div(&binomial(Sign::Plus, 1))
        .expect("1 - q is nonzero")
}

/// Value of a finite `q`-Pochhammer symbol. A negative-length symbol whose
/// defining product has a vanishing factor is `Infinite`; only its reciprocal
/// (zero) is usable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PochValue {
    Finite(RatFunc),
    Infinite,
}

impl PochValue {
    pub fn recip(&self) -> RatFunc {
        match self {
            PochValue::Finite(f) => f.recip().expect("finite Pochhammer values here are nonzero"),
            PochValue::Infinite => RatFunc::zero(),
        }
    }
}

/// `(sign*q^a; q^b)_L`, with `(x; q)_{-m} = 1/(x q^{-m}; q)_m` for negative lengths.
pub fn q_pochhammer_poly(sign: Sign, a: i64, b: i64, len: i64) -> PochValue {
    assert!(b >= 1, "Pochhammer step must be positive");
    if len >= 0 {
        let mut acc = RatFunc::one();
        for j in 0..len {
            acc = &acc * &binomial(sign, a + j * b);
        }
        PochValue::Finite(acc)
    } else {
        let mut acc = RatFunc::one();
        for j in 1..=-len {
            let f = binomial(sign, a - j * b);
            if f.is_zero() {
                return PochValue::Infinite;
            }
            acc = &acc * &f;
        }
        PochValue::Finite(acc.recip().expect("product of nonzero factors"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::int;

    #[test]
    fn q_numbers() {
        assert_eq!(q_number(1), RatFunc::one());
        assert_eq!(q_number(3), RatFunc::from_poly(Poly::from_i64(&[1, 1, 1])));
        assert_eq!(q_number(0), RatFunc::zero());
        // [-2] = (1 - q^-2)/(1 - q) = -(1 + q)/q^2
        let expect = RatFunc::new(Poly::from_i64(&[-1, -1]), Poly::from_i64(&[0, 0, 1])).unwrap();
        assert_eq!(q_number(-2), expect);
    }

    #[test]
    fn cyclotomic_factorisation_of_q_numbers() {
        for n in 1..=60u64 {
            let prod = divisors(n)
                .into_iter()
                .filter(|&d| d > 1)
                .fold(Poly::one(), |acc, d| &acc * &cyclotomic(d));
            assert_eq!(RatFunc::from_poly(prod), q_number(n as i64), "n = {n}");
        }
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(
            q_pochhammer_poly(Sign::Plus, 1, 2, 2),
            PochValue::Finite(RatFunc::from_poly(Poly::from_i64(&[1, -1, 0, -1, 1])))
        );
        let inf = q_pochhammer_poly(Sign::Plus, 4, 4, -1);
        assert_eq!(inf, PochValue::Infinite);
        assert_eq!(inf.recip(), RatFunc::zero());
        assert_eq!(q_pochhammer_poly(Sign::Plus, 1, 2, 0), PochValue::Finite(RatFunc::one()));
        // (q; q^2)_{-1} = 1/(1 - q^{-1}) = -q/(1 - q)
        let expect = RatFunc::new(Poly::from_i64(&[0, -1]), Poly::from_i64(&[1, -1])).unwrap();
        assert_eq!(q_pochhammer_poly(Sign::Plus, 1, 2, -1), PochValue::Finite(expect));
        // (-q^0; q)_1 = 2
        assert_eq!(
            q_pochhammer_poly(Sign::Minus, 0, 1, 1),
            PochValue::Finite(RatFunc::constant(int(2)))
        );
    }

    #[test]
    fn pochhammer_recursion() {
        for (sign, a, b) in [(Sign::Plus, 1, 2), (Sign::Minus, 1, 2), (Sign::Plus, 0, 3), (Sign::Minus, 4, 4)] {
            for len in 1..=30i64 {
                let PochValue::Finite(prev) = q_pochhammer_poly(sign, a, b, len - 1) else { panic!() };
                let PochValue::Finite(cur) = q_pochhammer_poly(sign, a, b, len) else { panic!() };
                assert_eq!(cur, &prev * &binomial(sign, a + (len - 1) * b));
            }
        }
    }
}
