//! Evaluation of atoms to factored form
//! `c * q^e * prod (1 - s q^j)^m` with `j >= 1`, and of sums of such values
//! over a common binomial denominator.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{TermAtom, TermExpr};
use crate::error::{Error, Result};
use crate::exactnum::Rational;
use crate::qpoly::{binomial_factors, cyclotomic_coeffs, zpoly, Poly, RatFunc, Sign};
use crate::qseries::TruncSeries;

/// Nonzero value `coeff * q^qpow * prod (1 - s q^j)^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Factored {
    pub coeff: Rational,
    pub qpow: i64,
    pub binoms: BTreeMap<(Sign, u64), i64>,
}

/// Accumulates factors of one atom; `zeros` counts net multiplicity of the
/// vanishing factor `1 - q^0`.
struct Builder {
    value: Factored,
    zeros: i64,
}

impl Builder {
    fn new(coeff: Rational) -> Self {
        Builder {
            value: Factored { coeff, qpow: 0, binoms: BTreeMap::new() },
            zeros: 0,
        }
    }

    /// Multiply by `(1 - s q^j)^m`.
    fn binomial(&mut self, s: Sign, j: i64, m: i64) {
        if m == 0 {
            return;
        }
        match j.cmp(&0) {
            std::cmp::Ordering::Greater => {
                let e = self.value.binoms.entry((s, j as u64)).or_insert(0);
                *e += m;
                if *e == 0 {
                    self.value.binoms.remove(&(s, j as u64));
                }
            }
            std::cmp::Ordering::Equal => match s {
                Sign::Minus => self.value.coeff *= pow_i(&Rational::from_integer(2.into()), m),
                Sign::Plus => self.zeros += m,
            },
            std::cmp::Ordering::Less => {
                // 1 - s q^j = -s q^j (1 - s q^{-j})
                if s == Sign::Plus && m % 2 != 0 {
                    self.value.coeff = -&self.value.coeff;
                }
                self.value.qpow += j * m;
                self.binomial(s, -j, m);
            }
        }
    }

    /// Multiply by `[m]^e`.
    fn bracket(&mut self, m: i64, e: i64) {
        match m.cmp(&0) {
            std::cmp::Ordering::Greater => {
                self.binomial(Sign::Plus, m, e);
                self.binomial(Sign::Plus, 1, -e);
            }
            std::cmp::Ordering::Equal => self.zeros += e,
            std::cmp::Ordering::Less => {
                // [-m] = -q^{-m} [m]
                if e % 2 != 0 {
                    self.value.coeff = -&self.value.coeff;
                }
                self.value.qpow += m * e;
                self.bracket(-m, e);
            }
        }
    }

    /// Multiply by `(s q^a; q^b)_len^e`.
    fn poch(&mut self, s: Sign, a: i64, b: i64, len: i64, e: i64) {
        if len >= 0 {
            for t in 0..len {
                self.binomial(s, a + t * b, e);
            }
        } else {
            for t in 1..=-len {
                self.binomial(s, a - t * b, -e);
            }
        }
    }
}

fn pow_i(x: &Rational, e: i64) -> Rational {
    let base = if e < 0 { x.recip() } else { x.clone() };
    num_traits::pow(base, e.unsigned_abs() as usize)
}

impl Factored {
    /// Value of one atom at `(n, k)`; `None` when the atom vanishes.
    pub fn of_atom(atom: &TermAtom, n: i64, k: i64) -> Result<Option<Factored>> {
        let mut b = Builder::new(atom.constant.clone());
        if atom.sign_exp.eval(n, k).rem_euclid(2) == 1 {
            b.value.coeff = -&b.value.coeff;
        }
        b.value.qpow = atom.q_exp.eval(n, k).ok_or(Error::FractionalExponent { n, k })?;
        for p in &atom.pochs {
            b.poch(p.sign, p.a, p.b, p.len.eval(n, k), p.power);
        }
        for br in &atom.brackets {
            b.bracket(br.arg.eval(n, k), br.power);
        }
        for u in &atom.units {
            b.binomial(u.sign, u.exp.eval(n, k), u.power);
        }
        match b.zeros.cmp(&0) {
            std::cmp::Ordering::Greater => Ok(None),
            std::cmp::Ordering::Less => Err(Error::DivisionByZero { n, k }),
            std::cmp::Ordering::Equal => Ok((!b.value.coeff.is_zero()).then_some(b.value)),
        }
    }

    pub fn of_term(t: &TermExpr, n: i64, k: i64) -> Result<Vec<Factored>> {
        let mut out = Vec::with_capacity(t.atoms().len());
        for a in t.atoms() {
            if let Some(f) = Self::of_atom(a, n, k)? {
                out.push(f);
            }
        }
        Ok(out)
    }

    pub fn neg(mut self) -> Self {
        self.coeff = -self.coeff;
        self
    }

    /// Truncated series of `q^shift * self` through `order`.
    pub fn series(&self, shift: i64, order: usize, n: i64, k: i64) -> Result<TruncSeries> {
        let v = self.qpow + shift;
        if v < 0 {
            return Err(Error::NegativeValuation { n, k, valuation: v });
        }
        let v = v as usize;
        if v > order {
            return Ok(TruncSeries::zero(order));
        }
        let len = order - v + 1;
        let mut acc = vec![BigInt::zero(); len];
        acc[0] = BigInt::one();
        for (&(s, j), &m) in &self.binoms {
            let j = j as usize;
            if j >= len {
                continue;
            }
            for _ in 0..m.unsigned_abs() {
                if m > 0 {
                    for i in (j..len).rev() {
                        let t = acc[i - j].clone();
                        if s == Sign::Plus { acc[i] -= t } else { acc[i] += t }
                    }
                } else {
                    for i in j..len {
                        let t = acc[i - j].clone();
                        if s == Sign::Plus { acc[i] += t } else { acc[i] -= t }
                    }
                }
            }
        }
        let mut coeffs = vec![Rational::zero(); v];
        coeffs.extend(acc.into_iter().map(|c| Rational::from_integer(c) * &self.coeff));
        Ok(TruncSeries::from_coeffs(coeffs, order))
    }
}

/// `scale * q^qshift * num / prod (1 - s q^j)^m` with integer `num`.
#[derive(Clone, Debug)]
pub(crate) struct FactoredSum {
    pub scale: Rational,
    pub qshift: i64,
    pub num: zpoly::ZPoly,
    pub den: BTreeMap<(Sign, u64), i64>,
}

impl FactoredSum {
    pub fn new(parts: &[Factored]) -> Self {
        if parts.is_empty() {
            return FactoredSum {
                scale: Rational::one(),
                qshift: 0,
                num: Vec::new(),
                den: BTreeMap::new(),
            };
        }
        let mut den: BTreeMap<(Sign, u64), i64> = BTreeMap::new();
        for p in parts {
            for (&key, &m) in &p.binoms {
                if m < 0 {
                    let e = den.entry(key).or_insert(0);
                    *e = (*e).max(-m);
                }
            }
        }
        let qshift = parts.iter().map(|p| p.qpow).min().unwrap();
        let lcm = parts
            .iter()
            .fold(BigInt::one(), |acc, p| acc.lcm(p.coeff.denom()));
        let mut num: zpoly::ZPoly = Vec::new();
        for p in parts {
            let c = (&p.coeff * Rational::from_integer(lcm.clone())).to_integer();
            let mut t = vec![BigInt::zero(); (p.qpow - qshift) as usize];
            t.push(c);
            let mut keys: BTreeMap<(Sign, u64), i64> = den.clone();
            for (&key, &m) in &p.binoms {
                *keys.entry(key).or_insert(0) += m;
            }
            for ((s, j), m) in keys {
                debug_assert!(m >= 0);
                for _ in 0..m {
                    zpoly::mul_binomial(&mut t, s.value(), j as usize);
                }
            }
            add_into(&mut num, &t);
        }
        zpoly::trim(&mut num);
        FactoredSum {
            scale: Rational::new(BigInt::one(), lcm),
            qshift,
            num,
            den,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    /// Cyclotomic exponents of the denominator.
    pub fn den_cyclotomic(&self) -> BTreeMap<u64, i64> {
        let mut out = BTreeMap::new();
        for (&(s, j), &m) in &self.den {
            for d in binomial_factors(s.value(), j).0 {
                *out.entry(d).or_insert(0) += m;
            }
        }
        out
    }

    /// Multiplicity of `Phi_d` in the numerator, counted up to `cap`.
    pub fn num_cyclotomic_order(&self, d: u64, cap: i64) -> i64 {
        let phi = cyclotomic_coeffs(d);
        let mut cur = self.num.clone();
        let mut ord = 0;
        while ord < cap {
            match divide_phi(&cur, &phi) {
                Some(q) => {
                    cur = q;
                    ord += 1;
                }
                None => break,
            }
        }
        ord
    }

    /// Canonical rational function.
    pub fn to_ratfunc(&self) -> RatFunc {
        if self.is_zero() {
            return RatFunc::zero();
        }
        let mut num = self.num.clone();
        let mut removed: Vec<u64> = Vec::new();
        for (d, mut count) in self.den_cyclotomic() {
            let phi = cyclotomic_coeffs(d);
            while count > 0 {
                match divide_phi(&num, &phi) {
                    Some(q) => {
                        num = q;
                        removed.push(d);
                        count -= 1;
                    }
                    None => break,
                }
            }
        }
        let mut den: zpoly::ZPoly = vec![BigInt::one()];
        for (&(s, j), &m) in &self.den {
            for _ in 0..m {
                zpoly::mul_binomial(&mut den, s.value(), j as usize);
            }
        }
        for d in removed {
            den = zpoly::div_monic_small(&den, &cyclotomic_coeffs(d)).expect("factor of the denominator");
        }
        let low = zpoly::low_degree(&num).unwrap();
        num.drain(..low);
        let shift = self.qshift + low as i64;
        if shift >= 0 {
            num.splice(0..0, std::iter::repeat(BigInt::zero()).take(shift as usize));
        } else {
            den.splice(0..0, std::iter::repeat(BigInt::zero()).take((-shift) as usize));
        }
        let lc = den.last().unwrap().clone();
        debug_assert!(lc.abs().is_one());
        let lc = Rational::from_integer(lc);
        RatFunc::from_canonical_parts(
            Poly::from_zpoly_scaled(&num, &(&self.scale / &lc)),
            Poly::from_zpoly_scaled(&den, &lc.recip()),
        )
    }
}

fn add_into(acc: &mut zpoly::ZPoly, t: &[BigInt]) {
    if acc.len() < t.len() {
        acc.resize(t.len(), BigInt::zero());
    }
    for (a, b) in acc.iter_mut().zip(t) {
        *a += b;
    }
}

fn divide_phi(p: &[BigInt], phi: &[i64]) -> Option<zpoly::ZPoly> {
    let img = zpoly::reduce(p, zpoly::FILTER_PRIME);
    if !zpoly::divides_mod(&img, phi, zpoly::FILTER_PRIME) {
        return None;
    }
    zpoly::div_monic_small(p, phi)
}

/// Exact value of `t` at `(n, k)`.
pub fn eval_ratfunc(t: &TermExpr, n: i64, k: i64) -> Result<RatFunc> {
    Ok(FactoredSum::new(&Factored::of_term(t, n, k)?).to_ratfunc())
}

/// Series expansion of `t` at `(n, k)` through `order`.
pub fn eval_series(t: &TermExpr, n: i64, k: i64, order: usize) -> Result<TruncSeries> {
    eval_series_shifted(t, n, k, 0, order)
}

/// Series expansion of `q^shift * t(n, k)` through `order`.
pub fn eval_series_shifted(t: &TermExpr, n: i64, k: i64, shift: i64, order: usize) -> Result<TruncSeries> {
    let mut acc = TruncSeries::zero(order);
    for f in Factored::of_term(t, n, k)? {
        acc = &acc + &f.series(shift, order, n, k)?;
    }
    Ok(acc)
}

/// Lower bound on `ord_q t(n, k)`: the least q-exponent over nonvanishing
/// atoms, exact for each atom. `None` when every atom vanishes.
pub fn valuation_bound(t: &TermExpr, n: i64, k: i64) -> Result<Option<i64>> {
    Ok(Factored::of_term(t, n, k)?.iter().map(|f| f.qpow).min())
}

#[cfg(test)]
mod tests {
    use super::super::{aff, quad, AffExpr, TermAtom};
    use super::*;
    use crate::exactnum::int;
    use crate::qpoly::{q_number, q_pochhammer_poly, PochValue};
    use crate::qseries::ratfunc_series;
    use proptest::prelude::*;

    #[test]
    fn bracket_atom() {
        let t = TermAtom::new().bracket(aff(6, 0, 1), 1).into_term();
        assert_eq!(eval_ratfunc(&t, 1, 0).unwrap(), q_number(7));
        assert_eq!(eval_ratfunc(&t, -1, 0).unwrap(), q_number(-5));
    }

    #[test]
    fn infinite_reciprocal_vanishes() {
        let t = TermAtom::new().poch(Sign::Plus, 4, 4, aff(1, -1, 0), -1).into_term();
        assert_eq!(eval_ratfunc(&t, 0, 1).unwrap(), RatFunc::zero());
        assert_eq!(valuation_bound(&t, 0, 1).unwrap(), None);
        let bad = TermAtom::new().poch(Sign::Plus, 0, 1, AffExpr::N, -1).into_term();
        assert_eq!(eval_ratfunc(&bad, 2, 0), Err(Error::DivisionByZero { n: 2, k: 0 }));
    }

    #[test]
    fn fractional_exponent_rejected() {
        let t = TermAtom::new().qpow(quad(1, 0, 0, 0, 0, 0).over(2)).into_term();
        assert_eq!(eval_ratfunc(&t, 1, 0), Err(Error::FractionalExponent { n: 1, k: 0 }));
        assert_eq!(eval_ratfunc(&t, 2, 0).unwrap(), RatFunc::q_power(2));
    }

    #[test]
    fn negative_valuation_in_series_mode() {
        let t = TermAtom::new().bracket(aff(0, 0, -2), 1).into_term();
        assert!(matches!(eval_series(&t, 0, 0, 5), Err(Error::NegativeValuation { .. })));
        assert_eq!(
            eval_series_shifted(&t, 0, 0, 2, 3).unwrap(),
            TruncSeries::from_i64(&[-1, -1], 3)
        );
    }

    fn arb_atom() -> impl Strategy<Value = TermAtom> {
        let sgn = prop::bool::ANY.prop_map(|b| if b { Sign::Plus } else { Sign::Minus });
        let poch = (sgn.clone(), -3i64..4, 1i64..4, -2i64..3, -2i64..3, -2i64..3);
        let br = (-2i64..3, -2i64..3, 1i64..4, -2i64..3);
        let un = (sgn, -2i64..3, -2i64..3, 1i64..4, -2i64..3);
        (
            -3i64..4,
            proptest::collection::vec(poch, 0..3),
            proptest::collection::vec(br, 0..3),
            proptest::collection::vec(un, 0..2),
            (0i64..3, -1i64..2, 0i64..2),
        )
            .prop_map(|(c, pochs, brs, uns, (qa, qb, qc))| {
                let mut a = TermAtom::new().coeff(int(c)).qpow(quad(qa, 0, qc, qb, 0, 0)).sign(aff(1, 1, 0));
                for (s, a0, b, ln, lk, e) in pochs {
                    a = a.poch(s, a0, b, aff(ln, lk, 1), e);
                }
                for (cn, ck, c0, e) in brs {
                    a = a.bracket(aff(cn, ck, c0), e);
                }
                for (s, cn, ck, c0, e) in uns {
                    a = a.unit(s, aff(cn, ck, c0), e);
                }
                a
            })
    }

    /// Independent evaluation through `RatFunc` arithmetic; `None` when some
    /// factor vanishes or is infinite.
    fn oracle(atom: &TermAtom, n: i64, k: i64) -> Option<RatFunc> {
        let mut acc = RatFunc::constant(atom.constant.clone());
        if atom.sign_exp.eval(n, k).rem_euclid(2) == 1 {
            acc = -&acc;
        }
        acc = &acc * &RatFunc::q_power(atom.q_exp.eval(n, k)?);
        let mut factors = Vec::new();
        for p in &atom.pochs {
            match q_pochhammer_poly(p.sign, p.a, p.b, p.len.eval(n, k)) {
                PochValue::Finite(f) => factors.push((f, p.power)),
                PochValue::Infinite => return None,
            }
        }
        for b in &atom.brackets {
            factors.push((q_number(b.arg.eval(n, k)), b.power));
        }
        for u in &atom.units {
            let x = &RatFunc::constant(int(u.sign.value() as i64)) * &RatFunc::q_power(u.exp.eval(n, k));
            factors.push((&RatFunc::one() - &x, u.power));
        }
        for (f, e) in factors {
            if f.is_zero() {
                return None;
            }
            acc = &acc * &f.pow(e).unwrap();
        }
        Some(acc)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn factored_matches_ratfunc_oracle(atom in arb_atom(), n in 0i64..4, k in -2i64..3) {
            let t = atom.clone().into_term();
            if let Some(expect) = oracle(&atom, n, k) {
                prop_assert_eq!(eval_ratfunc(&t, n, k).unwrap(), expect);
            }
        }

        #[test]
        fn sums_match_ratfunc_addition(a in arb_atom(), b in arb_atom(), n in 0i64..4, k in -2i64..3) {
            let (ta, tb) = (a.into_term(), b.into_term());
            if let (Ok(x), Ok(y)) = (eval_ratfunc(&ta, n, k), eval_ratfunc(&tb, n, k)) {
                prop_assert_eq!(eval_ratfunc(&(&ta + &tb), n, k).unwrap(), &x + &y);
                prop_assert!(eval_ratfunc(&(&ta - &ta), n, k).unwrap().is_zero());
            }
        }

        #[test]
        fn series_matches_ratfunc(a in arb_atom(), b in arb_atom(), n in 0i64..4, k in -2i64..3) {
            let t = &a.into_term() + &b.into_term();
            if let (Ok(f), Ok(Some(v))) = (eval_ratfunc(&t, n, k), valuation_bound(&t, n, k)) {
                let shift = (-v).max(0);
                let s = eval_series_shifted(&t, n, k, shift, 20).unwrap();
                let g = &f * &RatFunc::q_power(shift);
                prop_assert_eq!(&ratfunc_series(&g, 20).unwrap(), &s);
                if let Some(val) = s.valuation() {
                    prop_assert!(val as i64 >= v + shift);
                }
            }
        }
    }
}
