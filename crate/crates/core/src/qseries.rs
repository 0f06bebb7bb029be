//! Truncated formal power series in `q` with exact rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactnum::Rational;
use crate::qpoly::{Poly, RatFunc, Sign};

/// Power series known exactly through degree `order`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruncSeries {
    coeffs: Vec<Rational>,
}

impl TruncSeries {
    pub fn zero(order: usize) -> Self {
        TruncSeries {
            coeffs: vec![Rational::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = Rational::one();
        s
    }

    /// Take the given coefficients, padding with zeros or truncating to `order`.
    pub fn from_coeffs(mut coeffs: Vec<Rational>, order: usize) -> Self {
        coeffs.resize(order + 1, Rational::zero());
        TruncSeries { coeffs }
    }

    pub fn from_i64(coeffs: &[i64], order: usize) -> Self {
        Self::from_coeffs(
            coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect(),
            order,
        )
    }

    pub(crate) fn from_ints(coeffs: Vec<BigInt>, order: usize) -> Self {
        Self::from_coeffs(coeffs.into_iter().map(Rational::from_integer).collect(), order)
    }

    pub fn from_poly(p: &Poly, order: usize) -> Self {
        Self::from_coeffs(p.coeffs().iter().take(order + 1).cloned().collect(), order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &Rational {
        &self.coeffs[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Index of the first nonzero coefficient, if any within the known range.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Discard everything above degree `order`.
    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order(), "cannot extend a truncated series");
        TruncSeries {
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        TruncSeries {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Multiply by `q^e`.
    pub fn shift(&self, e: usize) -> Self {
        let n = self.order();
        let mut out = Self::zero(n);
        for i in e..=n {
            out.coeffs[i] = self.coeffs[i - e].clone();
        }
        out
    }

    /// In-place `self *= (1 - sign q^j)` for `j >= 1`.
    pub fn mul_binomial(&mut self, sign: Sign, j: usize) {
        let n = self.order();
        for i in (j..=n).rev() {
            if self.coeffs[i - j].is_zero() {
                continue;
            }
            let t = self.coeffs[i - j].clone();
            match sign {
                Sign::Plus => self.coeffs[i] -= t,
                Sign::Minus => self.coeffs[i] += t,
            }
        }
    }

    /// In-place `self /= (1 - sign q^j)` for `j >= 1`.
    pub fn div_binomial(&mut self, sign: Sign, j: usize) {
        let n = self.order();
        for i in j..=n {
            if self.coeffs[i - j].is_zero() {
                continue;
            }
            let t = self.coeffs[i - j].clone();
            match sign {
                Sign::Plus => self.coeffs[i] += t,
                Sign::Minus => self.coeffs[i] -= t,
            }
        }
    }

    /// Smallest degree where the two series differ, compared through the
    /// smaller of the two orders.
    pub fn first_mismatch(&self, other: &TruncSeries) -> Option<usize> {
        let n = self.order().min(other.order());
        (0..=n).find(|&i| self.coeffs[i] != other.coeffs[i])
    }
}

impl fmt::Debug for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncSeries({self})")
    }
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*q")?,
                _ => write!(f, "{c}*q^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.order() + 1)
    }
}

impl Add for &TruncSeries {
    type Output = TruncSeries;
    fn add(self, rhs: &TruncSeries) -> TruncSeries {
        let n = self.order().min(rhs.order());
        TruncSeries {
            coeffs: (0..=n).map(|i| &self.coeffs[i] + &rhs.coeffs[i]).collect(),
        }
    }
}

impl Sub for &TruncSeries {
    type Output = TruncSeries;
    fn sub(self, rhs: &TruncSeries) -> TruncSeries {
        let n = self.order().min(rhs.order());
        TruncSeries {
            coeffs: (0..=n).map(|i| &self.coeffs[i] - &rhs.coeffs[i]).collect(),
        }
    }
}

impl Mul for &TruncSeries {
    type Output = TruncSeries;
    fn mul(self, rhs: &TruncSeries) -> TruncSeries {
        let n = self.order().min(rhs.order());
        let mut out = TruncSeries::zero(n);
        for (i, a) in self.coeffs.iter().take(n + 1).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().take(n + 1 - i).enumerate() {
                if !b.is_zero() {
                    out.coeffs[i + j] += a * b;
                }
            }
        }
        out
    }
}

impl Neg for &TruncSeries {
    type Output = TruncSeries;
    fn neg(self) -> TruncSeries {
        TruncSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

/// Multiplicative inverse through the series' order.
pub fn series_invert(s: &TruncSeries) -> Result<TruncSeries> {
    let c0 = &s.coeffs[0];
    if c0.is_zero() {
        return Err(Error::NonUnitSeries);
    }
    let n = s.order();
    let inv0 = c0.recip();
    let mut t = TruncSeries::zero(n);
    t.coeffs[0] = inv0.clone();
    for i in 1..=n {
        let mut acc = Rational::zero();
        for j in 1..=i {
            if !s.coeffs[j].is_zero() {
                acc += &s.coeffs[j] * &t.coeffs[i - j];
            }
        }
        t.coeffs[i] = -acc * &inv0;
    }
    Ok(t)
}

/// Expansion of a rational function whose denominator has nonzero constant term.
pub fn ratfunc_series(f: &RatFunc, order: usize) -> Result<TruncSeries> {
    let num = TruncSeries::from_poly(f.num(), order);
    let den = TruncSeries::from_poly(f.den(), order);
    Ok(&num * &series_invert(&den)?)
}

/// Integer-coefficient product of binomials truncated at `order`.
fn binomial_product(factors: &[InfiniteFactor], order: usize) -> Vec<BigInt> {
    let mut acc = vec![BigInt::zero(); order + 1];
    acc[0] = BigInt::one();
    let s = |sign: Sign| sign.value();
    for f in factors {
        let mut j = f.a as usize;
        while j <= order {
            for _ in 0..f.exponent.unsigned_abs() {
                if f.exponent > 0 {
                    for i in (j..=order).rev() {
                        let t = acc[i - j].clone();
                        if s(f.sign) > 0 { acc[i] -= t } else { acc[i] += t }
                    }
                } else {
                    for i in j..=order {
                        let t = acc[i - j].clone();
                        if s(f.sign) > 0 { acc[i] += t } else { acc[i] -= t }
                    }
                }
            }
            j += f.b as usize;
        }
    }
    acc
}

/// `prod_{j >= 0} (1 - sign*q^{a + j b})` through degree `order`.
pub fn infinite_poch_series(sign: Sign, a: u64, b: u64, order: usize) -> TruncSeries {
    assert!(a >= 1 && b >= 1, "infinite product must be a unit series");
    let f = InfiniteFactor { sign, a, b, exponent: 1 };
    TruncSeries::from_ints(binomial_product(&[f], order), order)
}

/// `(sign*q^a; q^b)_inf^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct InfiniteFactor {
    pub sign: Sign,
    pub a: u64,
    pub b: u64,
    pub exponent: i64,
}

impl InfiniteFactor {
    pub fn new(sign: Sign, a: u64, b: u64, exponent: i64) -> Self {
        assert!(a >= 1 && b >= 1, "infinite factor must be a unit series");
        InfiniteFactor { sign, a, b, exponent }
    }
}

impl fmt::Display for InfiniteFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = match (self.sign, self.a) {
            (Sign::Plus, 1) => "q".to_string(),
            (Sign::Plus, a) => format!("q^{a}"),
            (Sign::Minus, 1) => "-q".to_string(),
            (Sign::Minus, a) => format!("-q^{a}"),
        };
        let step = if self.b == 1 { "q".to_string() } else { format!("q^{}", self.b) };
        write!(f, "({base};{step})_inf")?;
        if self.exponent != 1 {
            write!(f, "^{}", self.exponent)?;
        }
        Ok(())
    }
}

/// Right-hand side of a product identity:
/// `prefactor * q^qshift * prod (sign*q^a; q^b)_inf^e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductSpec {
    pub prefactor: RatFunc,
    pub qshift: u32,
    pub factors: Vec<InfiniteFactor>,
}

impl ProductSpec {
    pub fn new(factors: Vec<InfiniteFactor>) -> Self {
        ProductSpec {
            prefactor: RatFunc::one(),
            qshift: 0,
            factors,
        }
    }

    pub fn with_prefactor(mut self, prefactor: RatFunc) -> Self {
        assert!(
            !prefactor.den().coeff(0).is_zero() && !prefactor.num().coeff(0).is_zero(),
            "prefactor must be a unit power series"
        );
        self.prefactor = prefactor;
        self
    }
}

impl fmt::Display for ProductSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.prefactor != RatFunc::one() {
            parts.push(format!("[{}]", self.prefactor));
        }
        if self.qshift > 0 {
            parts.push(format!("q^{}", self.qshift));
        }
        parts.extend(self.factors.iter().map(|x| x.to_string()));
        if parts.is_empty() {
            parts.push("1".into());
        }
        write!(f, "{}", parts.join(" * "))
    }
}

/// Exact truncation of a product specification.
pub fn product_spec_series(ps: &ProductSpec, order: usize) -> Result<TruncSeries> {
    let prod = TruncSeries::from_ints(binomial_product(&ps.factors, order), order);
    let pre = ratfunc_series(&ps.prefactor, order)?;
    Ok((&pre * &prod).shift(ps.qshift as usize))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::int;
    use proptest::prelude::*;

    #[test]
    fn inversion_examples() {
        let s = TruncSeries::from_i64(&[1, -1], 3);
        assert_eq!(series_invert(&s).unwrap(), TruncSeries::from_i64(&[1, 1, 1, 1], 3));
        assert_eq!(series_invert(&TruncSeries::one(5)).unwrap(), TruncSeries::one(5));
        let s = TruncSeries::from_i64(&[1, -1, 0, -1, 1], 4);
        let t = series_invert(&s).unwrap();
        assert_eq!(t, TruncSeries::from_i64(&[1, 1, 1, 2, 2], 4));
        assert_eq!(&s * &t, TruncSeries::one(4));
        assert_eq!(series_invert(&TruncSeries::from_i64(&[0, 1], 3)), Err(Error::NonUnitSeries));
    }

    #[test]
    fn infinite_products() {
        assert_eq!(
            infinite_poch_series(Sign::Plus, 1, 1, 5),
            TruncSeries::from_i64(&[1, -1, -1, 0, 0, 1], 5)
        );
        assert_eq!(
            infinite_poch_series(Sign::Minus, 2, 4, 2),
            TruncSeries::from_i64(&[1, 0, 1], 2)
        );
        assert_eq!(infinite_poch_series(Sign::Plus, 6, 4, 5), TruncSeries::one(5));
        let ps = ProductSpec::new(vec![InfiniteFactor::new(Sign::Plus, 2, 4, 1)]);
        assert_eq!(
            product_spec_series(&ps, 6).unwrap(),
            TruncSeries::from_i64(&[1, 0, -1, 0, 0, 0, -1], 6)
        );
    }

    fn pentagonal_oracle(order: usize) -> Vec<i64> {
        let mut c = vec![0i64; order + 1];
        for k in -20i64..=20 {
            let g = k * (3 * k - 1) / 2;
            if (g as usize) <= order {
                c[g as usize] = if k % 2 == 0 { 1 } else { -1 };
            }
        }
        c
    }

    #[test]
    fn euler_pentagonal_theorem() {
        let s = infinite_poch_series(Sign::Plus, 1, 1, 60);
        assert_eq!(s, TruncSeries::from_i64(&pentagonal_oracle(60), 60));
    }

    #[test]
    fn prefactor_and_shift() {
        // (1+q)/(1-q) * q^2, truncated at 5
        let pre = RatFunc::new(Poly::from_i64(&[1, 1]), Poly::from_i64(&[1, -1])).unwrap();
        let ps = ProductSpec { prefactor: pre, qshift: 2, factors: vec![] };
        assert_eq!(
            product_spec_series(&ps, 5).unwrap(),
            TruncSeries::from_i64(&[0, 0, 1, 2, 2, 2], 5)
        );
    }

    fn arb_unit_series(order: usize) -> impl Strategy<Value = TruncSeries> {
        (proptest::collection::vec(-5i64..6, order), 1i64..4, prop::bool::ANY).prop_map(
            move |(rest, c0, neg)| {
                let mut v = vec![if neg { -c0 } else { c0 }];
                v.extend(rest);
                TruncSeries::from_i64(&v, order)
            },
        )
    }

    proptest! {
        #[test]
        fn double_inversion(s in arb_unit_series(12)) {
            let t = series_invert(&s).unwrap();
            prop_assert_eq!(&s * &t, TruncSeries::one(12));
            prop_assert_eq!(series_invert(&t).unwrap(), s);
        }

        #[test]
        fn truncation_consistency(sign in prop::bool::ANY, a in 1u64..6, b in 1u64..6, m in 0usize..20) {
            let sign = if sign { Sign::Plus } else { Sign::Minus };
            let ps = ProductSpec::new(vec![
                InfiniteFactor::new(sign, a, b, 2),
                InfiniteFactor::new(Sign::Plus, b, a, -1),
            ]);
            let big = product_spec_series(&ps, 30).unwrap();
            prop_assert_eq!(big.truncate(m), product_spec_series(&ps, m).unwrap());
        }

        #[test]
        fn binomial_mul_div_inverse(sign in prop::bool::ANY, j in 1usize..8, s in arb_unit_series(15)) {
            let sign = if sign { Sign::Plus } else { Sign::Minus };
            let mut t = s.clone();
            t.mul_binomial(sign, j);
            t.div_binomial(sign, j);
            prop_assert_eq!(t, s.clone());
            let mut u = s.clone();
            u.mul_binomial(sign, j);
            let mut b = TruncSeries::one(15);
            b.mul_binomial(sign, j);
            prop_assert_eq!(u, &s * &b);
            let _ = int(0);
        }
    }
}
