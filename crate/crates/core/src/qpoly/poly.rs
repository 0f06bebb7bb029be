use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::gcd::gcd_int;
use super::zpoly::{self, ZPoly};
use crate::exactnum::Rational;

/// Polynomial in `q` with exact rational coefficients.
///
/// Coefficients are stored densely, lowest degree first, with no trailing
/// zeros; the zero polynomial has no coefficients and no degree.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn q() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn monomial(c: Rational, degree: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); degree + 1];
        coeffs[degree] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    pub(crate) fn from_zpoly(p: ZPoly) -> Self {
        Self::from_coeffs(p.into_iter().map(Rational::from_integer).collect())
    }

    pub(crate) fn from_zpoly_scaled(p: &[BigInt], scale: &Rational) -> Self {
        Self::from_coeffs(
            p.iter()
                .map(|c| Rational::from_integer(c.clone()) * scale)
                .collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading_coeff(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    /// Lowest degree with a nonzero coefficient (the `q`-adic valuation).
    pub fn low_degree(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Multiply by `q^e`.
    pub fn shift(&self, e: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::zero(); e];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    /// Divide by `q^e`; the low coefficients must vanish.
    pub(crate) fn unshift(&self, e: usize) -> Self {
        debug_assert!(self.coeffs.iter().take(e).all(|c| c.is_zero()));
        Poly {
            coeffs: self.coeffs.iter().skip(e).cloned().collect(),
        }
    }

    pub fn monic(&self) -> Self {
        match self.leading_coeff() {
            None => Self::zero(),
            Some(lc) => self.scale(&lc.recip()),
        }
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Coefficients reversed against degree `d`, i.e. `q^d p(1/q)`.
    pub fn reversed(&self, d: usize) -> Self {
        let deg = self.degree().unwrap_or(0);
        assert!(d >= deg, "reversal degree below polynomial degree");
        let mut coeffs = vec![Rational::zero(); d + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[d - i] = c.clone();
        }
        Self::from_coeffs(coeffs)
    }

    /// Split into a rational content and a primitive integer polynomial with
    /// positive leading coefficient.
    pub(crate) fn to_primitive(&self) -> (Rational, ZPoly) {
        if self.is_zero() {
            return (Rational::zero(), Vec::new());
        }
        let den_lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut ints: ZPoly = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den_lcm / c.denom()))
            .collect();
        let mut g = zpoly::content(&ints);
        if ints.last().unwrap().is_negative() {
            g = -g;
        }
        for c in ints.iter_mut() {
            *c = &*c / &g;
        }
        (Rational::new(g, den_lcm), ints)
    }

    /// Quotient and remainder over `Q`.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lc_inv = d.coeffs[dd].recip();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); r.len() - dd];
        for qi in (0..quot.len()).rev() {
            let c = &r[qi + dd] * &lc_inv;
            if c.is_zero() {
                continue;
            }
            for (i, di) in d.coeffs.iter().enumerate() {
                if !di.is_zero() {
                    r[qi + i] -= &c * di;
                }
            }
            quot[qi] = c;
        }
        r.truncate(dd);
        (Poly::from_coeffs(quot), Poly::from_coeffs(r))
    }

    /// Exact quotient, `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        match (a.is_zero(), b.is_zero()) {
            (true, true) => Poly::zero(),
            (true, false) => b.monic(),
            (false, true) => a.monic(),
            (false, false) => {
                let (_, pa) = a.to_primitive();
                let (_, pb) = b.to_primitive();
                Poly::from_zpoly(gcd_int(&pa, &pb)).monic()
            }
        }
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = i == 0 || !mag.is_one();
            if show_coeff {
                write!(f, "{mag}")?;
                if i > 0 {
                    write!(f, "*")?;
                }
            }
            match i {
                0 => {}
                1 => write!(f, "q")?,
                _ => write!(f, "q^{i}")?,
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Poly::from_coeffs(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};
    use proptest::prelude::*;

    pub(crate) fn arb_poly(max_deg: usize) -> impl Strategy<Value = Poly> {
        proptest::collection::vec((-9i64..10, 1i64..4), 0..=max_deg + 1).prop_map(|v| {
            Poly::from_coeffs(v.into_iter().map(|(n, d)| rat(n, d)).collect())
        })
    }

    #[test]
    fn display_and_degree() {
        let p = Poly::from_i64(&[1, -1, 0, -1, 1]);
        assert_eq!(p.to_string(), "q^4 - q^3 - q + 1");
        assert_eq!(p.degree(), Some(4));
        assert_eq!(Poly::zero().degree(), None);
        assert_eq!(Poly::from_i64(&[0, 0]), Poly::zero());
        assert_eq!(Poly::from_coeffs(vec![rat(1, 2), rat(-3, 4)]).to_string(), "-3/4*q + 1/2");
    }

    #[test]
    fn division() {
        let a = Poly::from_i64(&[-1, 0, 0, 1]);
        let b = Poly::from_i64(&[-1, 1]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q, Poly::from_i64(&[1, 1, 1]));
        assert!(r.is_zero());
        let (q, r) = Poly::from_i64(&[1, 0, 2]).div_rem(&Poly::from_i64(&[0, 2]));
        assert_eq!(q, Poly::q());
        assert_eq!(r, Poly::one());
    }

    #[test]
    fn gcd_basic() {
        let a = Poly::from_i64(&[-1, 0, 1]);
        let b = Poly::from_i64(&[1, 2, 1]);
        assert_eq!(Poly::gcd(&a, &b), Poly::from_i64(&[1, 1]));
        assert_eq!(Poly::gcd(&Poly::zero(), &b.scale(&int(3))), b);
        assert_eq!(Poly::gcd(&a, &Poly::from_i64(&[5])), Poly::one());
    }

    #[test]
    fn primitive_split() {
        let p = Poly::from_coeffs(vec![rat(1, 2), rat(-3, 4)]);
        let (c, z) = p.to_primitive();
        assert_eq!(c, rat(-1, 4));
        assert_eq!(z, vec![BigInt::from(-2), BigInt::from(3)]);
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_poly(5), b in arb_poly(5), c in arb_poly(4)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
            prop_assert_eq!(&a * &b, &b * &a);
        }

        #[test]
        fn division_identity(a in arb_poly(7), b in arb_poly(4)) {
            prop_assume!(!b.is_zero());
            let (q, r) = a.div_rem(&b);
            prop_assert_eq!(&(&q * &b) + &r, a);
            prop_assert!(r.degree().map_or(true, |d| d < b.degree().unwrap()));
        }

        #[test]
        fn gcd_divides_and_is_maximal(a in arb_poly(4), b in arb_poly(4), c in arb_poly(3)) {
            prop_assume!(!c.is_zero() && !(a.is_zero() && b.is_zero()));
            let ac = &a * &c;
            let bc = &b * &c;
            let g = Poly::gcd(&ac, &bc);
            prop_assert!(ac.div_exact(&g).is_some());
            prop_assert!(bc.div_exact(&g).is_some());
            prop_assert!(g.div_exact(&c.monic()).is_some());
        }
    }
}
