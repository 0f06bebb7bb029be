use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::gcd::gcd_int;
use super::poly::Poly;
use super::zpoly;
use crate::error::{Error, Result};
use crate::exactnum::Rational;

/// Rational function in `q` in canonical form: `gcd(num, den) = 1` and `den`
/// monic. Equality is therefore structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    /// Canonicalise `num / den`.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let (cn, pn) = num.to_primitive();
        let (cd, pd) = den.to_primitive();
        let g = gcd_int(&pn, &pd);
        let (pn, pd) = if g.len() == 1 {
            (pn, pd)
        } else {
            (
                zpoly::div_exact(&pn, &g).expect("gcd divides numerator"),
                zpoly::div_exact(&pd, &g).expect("gcd divides denominator"),
            )
        };
        let lc = Rational::from_integer(pd.last().unwrap().clone());
        let scale = cn / cd / &lc;
        Ok(RatFunc {
            num: Poly::from_zpoly_scaled(&pn, &scale),
            den: Poly::from_zpoly_scaled(&pd, &lc.recip()),
        })
    }

    /// Assemble from parts already known to be coprime with monic denominator.
    pub(crate) fn from_canonical_parts(num: Poly, den: Poly) -> Self {
        debug_assert!(den.leading_coeff().is_some_and(|c| c.is_one()));
        if num.is_zero() {
            return Self::zero();
        }
        RatFunc { num, den }
    }

    pub fn zero() -> Self {
        RatFunc {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc {
            num: p,
            den: Poly::one(),
        }
    }

    /// `q^e` for any integer `e`.
    pub fn q_power(e: i64) -> Self {
        let m = Poly::monomial(Rational::one(), e.unsigned_abs() as usize);
        if e >= 0 {
            Self::from_poly(m)
        } else {
            RatFunc {
                num: Poly::one(),
                den: m,
            }
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    pub fn recip(&self) -> Result<Self> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, rhs: &RatFunc) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Self::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let mut acc = RatFunc::one();
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(self.num.eval(x) / d)
    }

    /// `f(1/q)` in canonical form.
    pub fn subs_qinv(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        // With a = q^va a1, b = q^vb b1, f(1/q) = q^{db-da} rev(a1) / rev(b1),
        // and the reversals stay coprime with nonzero constant terms.
        let (da, db) = (self.num.degree().unwrap(), self.den.degree().unwrap());
        let (va, vb) = (self.num.low_degree().unwrap(), self.den.low_degree().unwrap());
        let num = self.num.unshift(va).reversed(da - va);
        let den = self.den.unshift(vb).reversed(db - vb);
        let (num, den) = if db >= da {
            (num.shift(db - da), den)
        } else {
            (num, den.shift(da - db))
        };
        let lc = den.leading_coeff().unwrap().recip();
        Self::from_canonical_parts(num.scale(&lc), den.scale(&lc))
    }
}

/// Decide `f(1/q) = g(q)`.
pub fn ratfunc_qinv_equal(f: &RatFunc, g: &RatFunc) -> bool {
    f.subs_qinv() == *g
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({self})")
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() && self.den.coeff(0).is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl From<Poly> for RatFunc {
    fn from(p: Poly) -> Self {
        Self::from_poly(p)
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        if self.den == rhs.den {
            return RatFunc::new(&self.num + &rhs.num, self.den.clone()).unwrap();
        }
        RatFunc::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
        .unwrap()
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero();
        }
        RatFunc::new(&self.num * &rhs.num, &self.den * &rhs.den).unwrap()
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Zero for RatFunc {
    fn zero() -> Self {
        RatFunc::zero()
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl Add for RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: RatFunc) -> RatFunc {
        &self + &rhs
    }
}
