//! Symbolic q-hypergeometric summands.
//!
//! A [`TermExpr`] is a sum of [`TermAtom`]s. Each atom is a product of a
//! rational constant, a sign `(-1)^{aff}`, a power `q^{quad}`, finite
//! q-Pochhammer symbols with affine lengths, q-numbers `[aff]` and binomials
//! `1 - sign*q^{aff}`, each raised to an integer power. Terms are evaluated at
//! concrete `(n, k)` either to exact rational functions or to truncated series.

mod eval;
mod text;

use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

pub(crate) use eval::{Factored, FactoredSum};
pub use eval::{eval_ratfunc, eval_series, eval_series_shifted, valuation_bound};

use crate::error::{Error, Result};
use crate::exactnum::Rational;
use crate::qpoly::Sign;

/// `cn*n + ck*k + c0`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct AffExpr {
    pub cn: i64,
    pub ck: i64,
    pub c0: i64,
}

pub const fn aff(cn: i64, ck: i64, c0: i64) -> AffExpr {
    AffExpr { cn, ck, c0 }
}

impl AffExpr {
    pub const fn constant(c: i64) -> Self {
        aff(0, 0, c)
    }

    pub const N: AffExpr = aff(1, 0, 0);
    pub const K: AffExpr = aff(0, 1, 0);

    pub fn eval(&self, n: i64, k: i64) -> i64 {
        self.cn * n + self.ck * k + self.c0
    }

    pub fn is_zero(&self) -> bool {
        *self == AffExpr::default()
    }

    pub fn scale(&self, c: i64) -> Self {
        aff(self.cn * c, self.ck * c, self.c0 * c)
    }

    /// Substitute `n -> s.n`, `k -> s.k`.
    pub fn subst(&self, s: &Subst) -> Self {
        s.n.scale(self.cn) + s.k.scale(self.ck) + AffExpr::constant(self.c0)
    }

    /// Product of two affine forms as a quadratic form.
    pub fn times(&self, o: &AffExpr) -> QuadExpr {
        QuadExpr {
            nn: self.cn * o.cn,
            nk: self.cn * o.ck + self.ck * o.cn,
            kk: self.ck * o.ck,
            n: self.cn * o.c0 + self.c0 * o.cn,
            k: self.ck * o.c0 + self.c0 * o.ck,
            c: self.c0 * o.c0,
            den: 1,
        }
    }
}

impl Add for AffExpr {
    type Output = AffExpr;
    fn add(self, o: AffExpr) -> AffExpr {
        aff(self.cn + o.cn, self.ck + o.ck, self.c0 + o.c0)
    }
}

impl Sub for AffExpr {
    type Output = AffExpr;
    fn sub(self, o: AffExpr) -> AffExpr {
        self + o.scale(-1)
    }
}

impl Neg for AffExpr {
    type Output = AffExpr;
    fn neg(self) -> AffExpr {
        self.scale(-1)
    }
}

/// `(nn*n^2 + nk*n*k + kk*k^2 + n*n + k*k + c) / den` with `den >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadExpr {
    pub nn: i64,
    pub nk: i64,
    pub kk: i64,
    pub n: i64,
    pub k: i64,
    pub c: i64,
    pub den: i64,
}

impl Default for QuadExpr {
    fn default() -> Self {
        QuadExpr::from_aff(AffExpr::default())
    }
}

pub const fn quad(nn: i64, nk: i64, kk: i64, n: i64, k: i64, c: i64) -> QuadExpr {
    QuadExpr { nn, nk, kk, n, k, c, den: 1 }
}

impl QuadExpr {
    pub const fn from_aff(a: AffExpr) -> Self {
        quad(0, 0, 0, a.cn, a.ck, a.c0)
    }

    /// Same numerator over `den`.
    pub fn over(mut self, den: i64) -> Self {
        assert!(den >= 1, "denominator must be positive");
        self.den *= den;
        self
    }

    pub fn is_zero(&self) -> bool {
        [self.nn, self.nk, self.kk, self.n, self.k, self.c].iter().all(|&c| c == 0)
    }

    /// Value at `(n, k)`, or `None` when it is not an integer.
    pub fn eval(&self, n: i64, k: i64) -> Option<i64> {
        let v = self.nn * n * n + self.nk * n * k + self.kk * k * k + self.n * n + self.k * k + self.c;
        (v % self.den == 0).then(|| v / self.den)
    }

    fn scale_num(&self, c: i64) -> Self {
        QuadExpr {
            nn: self.nn * c,
            nk: self.nk * c,
            kk: self.kk * c,
            n: self.n * c,
            k: self.k * c,
            c: self.c * c,
            den: self.den,
        }
    }

    fn num_sum(&self, o: &QuadExpr) -> Self {
        debug_assert_eq!(self.den, o.den);
        QuadExpr {
            nn: self.nn + o.nn,
            nk: self.nk + o.nk,
            kk: self.kk + o.kk,
            n: self.n + o.n,
            k: self.k + o.k,
            c: self.c + o.c,
            den: self.den,
        }
    }

    /// Substitute `n -> s.n`, `k -> s.k`.
    pub fn subst(&self, s: &Subst) -> Self {
        let (a, b) = (&s.n, &s.k);
        let parts = [
            a.times(a).scale_num(self.nn),
            a.times(b).scale_num(self.nk),
            b.times(b).scale_num(self.kk),
            QuadExpr::from_aff(a.scale(self.n)),
            QuadExpr::from_aff(b.scale(self.k)),
            QuadExpr::from_aff(AffExpr::constant(self.c)),
        ];
        let mut acc = parts.iter().fold(quad(0, 0, 0, 0, 0, 0), |acc, p| acc.num_sum(p));
        acc.den = self.den;
        acc
    }
}

impl Add for QuadExpr {
    type Output = QuadExpr;
    fn add(self, o: QuadExpr) -> QuadExpr {
        let l = num_integer::lcm(self.den, o.den);
        let mut r = self.scale_num(l / self.den).num_sum(&QuadExpr { den: self.den, ..o.scale_num(l / o.den) });
        r.den = l;
        r
    }
}

impl Add<AffExpr> for QuadExpr {
    type Output = QuadExpr;
    fn add(self, o: AffExpr) -> QuadExpr {
        self + QuadExpr::from_aff(o)
    }
}

/// Affine change of summation indices: `(n, k) -> (n', k')`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Subst {
    pub n: AffExpr,
    pub k: AffExpr,
}

impl Subst {
    pub const IDENTITY: Subst = Subst { n: AffExpr::N, k: AffExpr::K };
    pub const NEGATE_K: Subst = Subst { n: AffExpr::N, k: aff(0, -1, 0) };
}

/// `(sign*q^a; q^b)_{len}^power`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PochFactor {
    pub sign: Sign,
    pub a: i64,
    pub b: i64,
    pub len: AffExpr,
    pub power: i64,
}

/// `[arg]_q^power`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BracketFactor {
    pub arg: AffExpr,
    pub power: i64,
}

/// `(1 - sign*q^{exp})^power`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UnitFactor {
    pub sign: Sign,
    pub exp: AffExpr,
    pub power: i64,
}

/// A single product term.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TermAtom {
    pub constant: Rational,
    pub sign_exp: AffExpr,
    pub q_exp: QuadExpr,
    pub pochs: Vec<PochFactor>,
    pub brackets: Vec<BracketFactor>,
    pub units: Vec<UnitFactor>,
}

impl Default for TermAtom {
    fn default() -> Self {
        TermAtom {
            constant: Rational::one(),
            sign_exp: AffExpr::default(),
            q_exp: QuadExpr::default(),
            pochs: Vec::new(),
            brackets: Vec::new(),
            units: Vec::new(),
        }
    }
}

impl TermAtom {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn coeff(mut self, c: Rational) -> Self {
        self.constant *= c;
        self
    }

    /// Multiply by `(-1)^{e}`.
    pub fn sign(mut self, e: AffExpr) -> Self {
        self.sign_exp = self.sign_exp + e;
        self
    }

    /// Multiply by `q^{e}`.
    pub fn qpow(mut self, e: QuadExpr) -> Self {
        self.q_exp = self.q_exp + e;
        self
    }

    /// Multiply by `(sign*q^a; q^b)_{len}^power`.
    pub fn poch(mut self, sign: Sign, a: i64, b: i64, len: AffExpr, power: i64) -> Self {
        assert!(b >= 1, "Pochhammer step must be positive");
        self.pochs.push(PochFactor { sign, a, b, len, power });
        self
    }

    /// Multiply by `[arg]^power`.
    pub fn bracket(mut self, arg: AffExpr, power: i64) -> Self {
        self.brackets.push(BracketFactor { arg, power });
        self
    }

    /// Multiply by `(1 - sign*q^{exp})^power`.
    pub fn unit(mut self, sign: Sign, exp: AffExpr, power: i64) -> Self {
        self.units.push(UnitFactor { sign, exp, power });
        self
    }

    pub fn subst(&self, s: &Subst) -> Self {
        TermAtom {
            constant: self.constant.clone(),
            sign_exp: self.sign_exp.subst(s),
            q_exp: self.q_exp.subst(s),
            pochs: self
                .pochs
                .iter()
                .map(|p| PochFactor { len: p.len.subst(s), ..p.clone() })
                .collect(),
            brackets: self
                .brackets
                .iter()
                .map(|b| BracketFactor { arg: b.arg.subst(s), power: b.power })
                .collect(),
            units: self
                .units
                .iter()
                .map(|u| UnitFactor { exp: u.exp.subst(s), ..u.clone() })
                .collect(),
        }
    }

    pub fn into_term(self) -> TermExpr {
        TermExpr::from_atoms(vec![self])
    }
}

/// Sum of atoms. The empty sum is the zero term.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct TermExpr {
    atoms: Vec<TermAtom>,
}

impl TermExpr {
    pub fn zero() -> Self {
        TermExpr { atoms: Vec::new() }
    }

    pub fn from_atoms(atoms: Vec<TermAtom>) -> Self {
        TermExpr {
            atoms: atoms.into_iter().filter(|a| !a.constant.is_zero()).collect(),
        }
    }

    pub fn atoms(&self) -> &[TermAtom] {
        &self.atoms
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Apply an affine change of indices to every atom.
    pub fn subst(&self, s: &Subst) -> Self {
        TermExpr {
            atoms: self.atoms.iter().map(|a| a.subst(s)).collect(),
        }
    }

    /// `t(n, -k)`.
    pub fn tilde(&self) -> Self {
        self.subst(&Subst::NEGATE_K)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        TermExpr::from_atoms(self.atoms.iter().map(|a| a.clone().coeff(c.clone())).collect())
    }

    /// Multiply every atom by `q^e`.
    pub fn times_qpow(&self, e: QuadExpr) -> Self {
        TermExpr {
            atoms: self.atoms.iter().map(|a| a.clone().qpow(e)).collect(),
        }
    }

    /// Multiply every atom by an extra factor built by `f`.
    pub fn map_atoms(&self, f: impl Fn(TermAtom) -> TermAtom) -> Self {
        TermExpr::from_atoms(self.atoms.iter().cloned().map(f).collect())
    }
}

impl Add for &TermExpr {
    type Output = TermExpr;
    fn add(self, o: &TermExpr) -> TermExpr {
        TermExpr {
            atoms: self.atoms.iter().chain(&o.atoms).cloned().collect(),
        }
    }
}

impl Neg for &TermExpr {
    type Output = TermExpr;
    fn neg(self) -> TermExpr {
        self.scale(&-Rational::one())
    }
}

impl Sub for &TermExpr {
    type Output = TermExpr;
    fn sub(self, o: &TermExpr) -> TermExpr {
        self + &-o
    }
}

impl Mul<&Rational> for &TermExpr {
    type Output = TermExpr;
    fn mul(self, c: &Rational) -> TermExpr {
        self.scale(c)
    }
}

impl std::str::FromStr for TermExpr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        text::parse_term(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_substitution() {
        let a = aff(6, -2, 1);
        let s = Subst { n: aff(1, 0, 1), k: aff(1, 1, 0) };
        // 6(n+1) - 2(n+k) + 1
        assert_eq!(a.subst(&s), aff(4, -2, 7));
        assert_eq!(a.subst(&Subst::NEGATE_K), aff(6, 2, 1));
    }

    #[test]
    fn quadratic_substitution() {
        // (n - k)^2 under k -> n + k is k^2
        let q = aff(1, -1, 0).times(&aff(1, -1, 0));
        let s = Subst { n: AffExpr::N, k: aff(1, 1, 0) };
        assert_eq!(q.subst(&s), quad(0, 0, 1, 0, 0, 0));
        let h = quad(1, 0, 0, 1, 0, 0).over(2);
        assert_eq!(h.eval(3, 0), Some(6));
        assert_eq!(quad(1, 0, 0, 0, 0, 0).over(2).eval(3, 0), None);
        for (n, k) in [(0, 0), (2, -3), (5, 7)] {
            let t = quad(2, -3, 1, 4, -1, 5).over(2);
            let s = Subst { n: aff(1, 2, -1), k: aff(-1, 1, 3) };
            assert_eq!(t.subst(&s).eval(n, k), t.eval(s.n.eval(n, k), s.k.eval(n, k)));
        }
    }

    #[test]
    fn quad_addition_mixed_denominators() {
        let a = quad(1, 0, 0, 1, 0, 0).over(2);
        let b = quad(0, 0, 0, 1, 0, 0);
        assert_eq!((a + b).eval(3, 0), Some(9));
    }
}
