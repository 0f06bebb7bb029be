//! Multiprecision evaluation of the identities at rational `q` in `(-1, 1)`,
//! and of the classical series for `1/pi`.

use std::fmt;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exactnum::Rational;
use crate::hypterm::Factored;
use crate::identities::IdentitySpec;
use crate::qpoly::{Poly, RatFunc, Sign};
use crate::qseries::ProductSpec;

const RM: RoundingMode = RoundingMode::ToEven;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FloatCtx {
    /// Working precision in bits.
    pub precision: usize,
    /// Cap on summation terms and product factors.
    pub terms: usize,
}

impl Default for FloatCtx {
    fn default() -> Self {
        FloatCtx { precision: 256, terms: 100_000 }
    }
}

impl FloatCtx {
    pub fn new(precision: usize, terms: usize) -> Self {
        FloatCtx { precision, terms }
    }
}

struct Env {
    p: usize,
    cc: Consts,
}

impl Env {
    fn new(ctx: &FloatCtx) -> Result<Self> {
        if ctx.precision < 64 {
            return Err(Error::InvalidArgument(format!("precision {} below 64 bits", ctx.precision)));
        }
        let cc = Consts::new().map_err(|e| Error::InvalidArgument(format!("float constants: {e:?}")))?;
        Ok(Env { p: ctx.precision, cc })
    }

    fn int(&self, v: i64) -> BigFloat {
        BigFloat::from_i64(v, self.p)
    }

    fn bigint(&mut self, v: &BigInt) -> BigFloat {
        if v.bits() < 63 {
            return self.int(i64::try_from(v).expect("fits"));
        }
        BigFloat::parse(&v.to_string(), Radix::Dec, self.p + 64, RM, &mut self.cc)
    }

    fn rational(&mut self, r: &Rational) -> BigFloat {
        let n = self.bigint(r.numer());
        let d = self.bigint(r.denom());
        n.div(&d, self.p, RM)
    }

    /// `q^e` for any integer `e`.
    fn pow(&self, q: &BigFloat, e: i64) -> BigFloat {
        let x = q.powi(e.unsigned_abs() as usize, self.p, RM);
        if e < 0 {
            x.reciprocal(self.p, RM)
        } else {
            x
        }
    }

    fn poly(&mut self, p: &Poly, q: &BigFloat) -> BigFloat {
        let mut acc = self.int(0);
        for c in p.coeffs().iter().rev() {
            let c = self.rational(c);
            acc = acc.mul(q, self.p, RM).add(&c, self.p, RM);
        }
        acc
    }

    fn ratfunc(&mut self, f: &RatFunc, q: &BigFloat) -> BigFloat {
        let n = self.poly(f.num(), q);
        let d = self.poly(f.den(), q);
        n.div(&d, self.p, RM)
    }

    fn pi(&mut self) -> BigFloat {
        self.cc.pi(self.p, RM)
    }

    /// `2^{-(p-8)}`.
    fn threshold(&self) -> BigFloat {
        let half = self.int(1).div(&self.int(2), self.p, RM);
        half.powi(self.p - 8, self.p, RM)
    }

    fn factored(&mut self, f: &Factored, q: &BigFloat) -> BigFloat {
        let mut v = self.rational(&f.coeff).mul(&self.pow(q, f.qpow), self.p, RM);
        for (&(s, j), &m) in &f.binoms {
            let mut x = self.pow(q, j as i64);
            if s == Sign::Minus {
                x = x.neg();
            }
            let b = self.int(1).sub(&x, self.p, RM);
            v = v.mul(&self.pow(&b, m), self.p, RM);
        }
        v
    }

    fn product(&mut self, ps: &ProductSpec, q: &BigFloat, budget: usize) -> Result<BigFloat> {
        let eps = self.threshold();
        let mut v = self.ratfunc(&ps.prefactor, q).mul(&self.pow(q, ps.qshift as i64), self.p, RM);
        for f in &ps.factors {
            let step = self.pow(q, f.b as i64);
            let mut x = self.pow(q, f.a as i64);
            if f.sign == Sign::Minus {
                x = x.neg();
            }
            let mut prod = self.int(1);
            let mut used = 0;
            while x.abs().cmp(&eps).is_some_and(|c| c >= 0) {
                if used == budget {
                    return Err(Error::NoConvergence { budget });
                }
                prod = prod.mul(&self.int(1).sub(&x, self.p, RM), self.p, RM);
                x = x.mul(&step, self.p, RM);
                used += 1;
            }
            v = v.mul(&self.pow(&prod, f.exponent), self.p, RM);
        }
        Ok(v)
    }
}

/// Decimal rendering with `digits` significant digits.
pub fn to_decimal(x: &BigFloat, digits: usize) -> String {
    let mut cc = match Consts::new() {
        Ok(cc) => cc,
        Err(_) => return "nan".into(),
    };
    let s = match x.format(Radix::Dec, RM, &mut cc) {
        Ok(s) => s,
        Err(_) => return "nan".into(),
    };
    let (mant, exp) = match s.split_once('e') {
        Some((m, e)) => (m.to_string(), e.parse::<i64>().unwrap_or(0)),
        None => (s.clone(), 0),
    };
    let (sign, mant) = match mant.strip_prefix('-') {
        Some(m) => ("-", m.to_string()),
        None => ("", mant),
    };
    let digits_only: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    let point = mant.find('.').unwrap_or(mant.len()) as i64;
    let lead = digits_only.find(|c| c != '0');
    let Some(lead) = lead else {
        return "0".into();
    };
    let all: Vec<u8> = digits_only[lead..].bytes().map(|b| b - b'0').collect();
    let keep = digits.max(1).min(all.len());
    let mut sig = all[..keep].to_vec();
    let mut e10 = point - 1 - lead as i64 + exp;
    if all.get(keep).is_some_and(|&d| d >= 5) {
        let mut i = keep;
        loop {
            if i == 0 {
                sig.insert(0, 1);
                sig.pop();
                e10 += 1;
                break;
            }
            i -= 1;
            if sig[i] == 9 {
                sig[i] = 0;
            } else {
                sig[i] += 1;
                break;
            }
        }
    }
    while sig.len() > 1 && sig.last() == Some(&0) {
        sig.pop();
    }
    let sig: String = sig.iter().map(|d| char::from(b'0' + d)).collect();
    let (head, tail) = sig.split_at(1);
    if tail.is_empty() {
        format!("{sign}{head}e{e10}")
    } else {
        format!("{sign}{head}.{tail}e{e10}")
    }
}

/// `log10 |x|`, approximately; `-inf` for zero.
pub fn log10_abs(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let s = to_decimal(x, 17);
    let (m, e) = s.split_once('e').expect("scientific form");
    m.trim_start_matches('-').parse::<f64>().unwrap_or(1.0).log10() + e.parse::<f64>().unwrap_or(0.0)
}

/// `|x| < 10^e`.
pub fn below_pow10(x: &BigFloat, e: i64, precision: usize) -> bool {
    let mut cc = match Consts::new() {
        Ok(cc) => cc,
        Err(_) => return false,
    };
    let t = BigFloat::parse(&format!("1e{e}"), Radix::Dec, precision, RM, &mut cc);
    x.abs().cmp(&t).is_some_and(|c| c < 0)
}

#[derive(Clone, Debug)]
pub struct NumericCandidate {
    pub label: &'static str,
    pub rhs: BigFloat,
    pub gap: BigFloat,
}

#[derive(Clone, Debug)]
pub struct NumericReport {
    pub name: &'static str,
    pub q: Rational,
    pub precision: usize,
    pub lhs: BigFloat,
    /// Number of summands evaluated.
    pub terms: usize,
    pub candidates: Vec<NumericCandidate>,
}

impl NumericReport {
    /// The candidate with the smallest gap.
    pub fn best(&self) -> &NumericCandidate {
        self.candidates
            .iter()
            .min_by(|a, b| a.gap.cmp(&b.gap).unwrap_or(0).cmp(&0))
            .expect("at least one candidate")
    }
}

/// Evaluate both sides of `id` at `q`.
pub fn eval_identity_numeric(id: &IdentitySpec, q: &Rational, ctx: &FloatCtx) -> Result<NumericReport> {
    if q.is_zero() || q.abs() >= Rational::from_integer(1.into()) {
        return Err(Error::InvalidArgument(format!("q = {q} must satisfy 0 < |q| < 1")));
    }
    let mut env = Env::new(ctx)?;
    let qf = env.rational(q);
    let eps = env.threshold();
    let mut lhs = env.int(0);
    let mut terms = None;
    for n in 0..ctx.terms as i64 {
        let parts = Factored::of_term(&id.summand, n, 0)?;
        if parts.is_empty() {
            continue;
        }
        let mut t = env.int(0);
        for f in &parts {
            t = t.add(&env.factored(f, &qf), env.p, RM);
        }
        lhs = lhs.add(&t, env.p, RM);
        if t.abs().cmp(&eps).is_some_and(|c| c < 0) {
            terms = Some(n as usize + 1);
            break;
        }
    }
    let terms = terms.ok_or(Error::NoConvergence { budget: ctx.terms })?;
    let mut candidates = Vec::new();
    for c in &id.rhs {
        let rhs = env.product(&c.product, &qf, ctx.terms)?;
        let gap = lhs.sub(&rhs, env.p, RM).abs();
        candidates.push(NumericCandidate { label: c.label, rhs, gap });
    }
    Ok(NumericReport { name: id.name, q: q.clone(), precision: ctx.precision, lhs, terms, candidates })
}

pub const PI_SERIES_NAMES: [&str; 7] = [
    "ram_4pi",
    "ram_2sqrt2pi",
    "bauer_2pi",
    "gui_8pi",
    "ram_2sqrt3pi",
    "q2limit_16pi",
    "q3limit_8sqrt2pi",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Summation {
    /// Partial sums until the terms drop below the working threshold.
    Direct,
    /// Mean of the last two partial sums.
    Paired,
    /// Cohen–Rodriguez Villegas–Zagier acceleration of an alternating sum.
    Alternating,
}

impl fmt::Display for Summation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Summation::Direct => "direct",
            Summation::Paired => "paired",
            Summation::Alternating => "alternating",
        })
    }
}

/// `(num, den)` factor lists of `c_n / c_{n-1}`.
fn ratio(name: &str, n: i64) -> (Vec<i64>, Vec<i64>) {
    let c2 = |m: i64| (vec![2 * m, 2 * m - 1], vec![m, m]);
    let c4 = |m: i64| (vec![4 * m, 4 * m - 1, 4 * m - 2, 4 * m - 3], vec![2 * m, 2 * m, 2 * m - 1, 2 * m - 1]);
    let c6 = |m: i64| {
        (
            vec![6 * m, 6 * m - 1, 6 * m - 2, 6 * m - 3, 6 * m - 4, 6 * m - 5],
            vec![3 * m, 3 * m, 3 * m - 1, 3 * m - 1, 3 * m - 2, 3 * m - 2],
        )
    };
    let join = |parts: Vec<(Vec<i64>, Vec<i64>)>, den: Vec<i64>| {
        let mut a = Vec::new();
        let mut b = den;
        for (x, y) in parts {
            a.extend(x);
            b.extend(y);
        }
        (a, b)
    };
    let h = 2 * n - 1;
    match name {
        "ram_4pi" => (vec![h, h, h], vec![32 * n, n, n]),
        "ram_2sqrt2pi" => (vec![-h, h, h], vec![64 * n, n, n]),
        "bauer_2pi" => (vec![-h, h, h], vec![8 * n, n, n]),
        "gui_8pi" => (vec![-(4 * n - 3), h, 4 * n - 1], vec![128 * n, n, n]),
        "ram_2sqrt3pi" => (vec![4 * n - 3, h, 4 * n - 1], vec![288 * n, n, n]),
        "q2limit_16pi" => join(vec![c6(n), c4(n), c2(n)], vec![-4096]),
        "q3limit_8sqrt2pi" => join(vec![c4(n), c4(n), c2(n)], vec![4096]),
        _ => unreachable!("checked by caller"),
    }
}

/// `(num, den)` factor lists of the weight at `n`.
fn weight(name: &str, n: i64) -> (Vec<i64>, Vec<i64>) {
    match name {
        "ram_4pi" | "ram_2sqrt2pi" => (vec![6 * n + 1], vec![]),
        "bauer_2pi" => (vec![4 * n + 1], vec![]),
        "gui_8pi" => (vec![20 * n + 3], vec![]),
        "ram_2sqrt3pi" => (vec![8 * n + 1], vec![]),
        "q2limit_16pi" => (vec![576 * n * n * n + 624 * n * n + 190 * n + 15], vec![3 * n + 1, 3 * n + 2]),
        "q3limit_8sqrt2pi" => (vec![48 * n * n + 32 * n + 3], vec![2 * n + 1]),
        _ => unreachable!("checked by caller"),
    }
}

fn summation(name: &str) -> Summation {
    match name {
        "bauer_2pi" => Summation::Paired,
        "q2limit_16pi" => Summation::Alternating,
        _ => Summation::Direct,
    }
}

/// `(numerator, sqrt argument)` of the constant `numerator * sqrt(arg) / pi`.
fn reference(name: &str) -> (i64, i64) {
    match name {
        "ram_4pi" => (4, 1),
        "ram_2sqrt2pi" => (2, 2),
        "bauer_2pi" => (2, 1),
        "gui_8pi" => (8, 1),
        "ram_2sqrt3pi" => (2, 3),
        "q2limit_16pi" => (16, 1),
        "q3limit_8sqrt2pi" => (8, 2),
        _ => unreachable!("checked by caller"),
    }
}

/// Terms used when no cap is given.
pub fn default_terms(name: &str) -> usize {
    match summation(name) {
        Summation::Paired => 20_000,
        _ => 500,
    }
}

/// Decimal exponent `e` of the acceptance tolerance `10^e` for a series.
pub fn pi_tolerance_exp(name: &str) -> i64 {
    match summation(name) {
        Summation::Paired => -3,
        _ => -40,
    }
}

#[derive(Clone, Debug)]
pub struct PiReport {
    pub name: &'static str,
    pub method: Summation,
    pub terms: usize,
    pub value: BigFloat,
    pub reference: BigFloat,
    pub gap: BigFloat,
}

fn scaled(env: &Env, x: &BigFloat, (num, den): &(Vec<i64>, Vec<i64>)) -> BigFloat {
    let mut v = x.clone();
    for &a in num {
        v = v.mul(&env.int(a), env.p, RM);
    }
    for &b in den {
        v = v.div(&env.int(b), env.p, RM);
    }
    v
}

/// Sum a classical series and compare it with its constant.
pub fn classical_pi_series(name: &str, ctx: &FloatCtx) -> Result<PiReport> {
    let name = *PI_SERIES_NAMES
        .iter()
        .find(|&&x| x == name)
        .ok_or_else(|| Error::UnknownName(name.to_string()))?;
    let mut env = Env::new(ctx)?;
    let cap = ctx.terms.min(default_terms(name)).max(1);
    let method = summation(name);
    let eps = env.threshold();
    let mut c = env.int(1);
    let mut sum = env.int(0);
    let mut prev = env.int(0);
    let mut terms = 0;
    let mut unsigned = Vec::new();
    let alt_terms = match method {
        // error about (3 + sqrt 8)^{-n}
        Summation::Alternating => cap.min(ctx.precision * 2 / 5 + 16),
        _ => cap,
    };
    for n in 0..alt_terms as i64 {
        if n > 0 {
            c = scaled(&env, &c, &ratio(name, n));
        }
        let t = scaled(&env, &c, &weight(name, n));
        terms += 1;
        match method {
            Summation::Alternating => unsigned.push(t.abs()),
            _ => {
                prev = sum.clone();
                sum = sum.add(&t, env.p, RM);
                if method == Summation::Direct && n > 0 && t.abs().cmp(&eps).is_some_and(|x| x < 0) {
                    break;
                }
            }
        }
    }
    let value = match method {
        Summation::Direct => sum,
        Summation::Paired => sum.add(&prev, env.p, RM).div(&env.int(2), env.p, RM),
        Summation::Alternating => cvz(&env, &unsigned),
    };
    let (k, r) = reference(name);
    let mut reference = env.int(k).div(&env.pi(), env.p, RM);
    if r != 1 {
        reference = reference.mul(&env.int(r).sqrt(env.p, RM), env.p, RM);
    }
    let gap = value.sub(&reference, env.p, RM).abs();
    Ok(PiReport { name, method, terms, value, reference, gap })
}

/// `sum_k (-1)^k a_k` from `a_0 .. a_{n-1}`.
fn cvz(env: &Env, a: &[BigFloat]) -> BigFloat {
    let p = env.p;
    let n = a.len() as i64;
    let base = env.int(3).add(&env.int(8).sqrt(p, RM), p, RM);
    let mut d = base.powi(n as usize, p, RM);
    d = d.add(&d.reciprocal(p, RM), p, RM).div(&env.int(2), p, RM);
    let mut b = env.int(-1);
    let mut c = d.neg();
    let mut s = env.int(0);
    for (k, ak) in a.iter().enumerate() {
        let k = k as i64;
        c = b.sub(&c, p, RM);
        s = s.add(&c.mul(ak, p, RM), p, RM);
        // b *= (k+n)(k-n) / ((k+1/2)(k+1))
        b = b
            .mul(&env.int(2 * (k + n) * (k - n)), p, RM)
            .div(&env.int((2 * k + 1) * (k + 1)), p, RM);
    }
    s.div(&d, p, RM)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;
    use crate::identities::{all_identities, identity};

    #[test]
    fn decimal_rendering() {
        let x = BigFloat::from_i64(-1234, 128).div(&BigFloat::from_i64(1000, 128), 128, RM);
        assert_eq!(to_decimal(&x, 4), "-1.234e0");
        let y = BigFloat::from_i64(5, 128).div(&BigFloat::from_i64(100_000, 128), 128, RM);
        assert_eq!(to_decimal(&y, 3), "5e-5");
        let z = BigFloat::from_i64(2, 128).div(&BigFloat::from_i64(3, 128), 128, RM);
        assert_eq!(to_decimal(&z, 3), "6.67e-1");
        let w = BigFloat::from_i64(99996, 128).div(&BigFloat::from_i64(10, 128), 128, RM);
        assert_eq!(to_decimal(&w, 3), "1e4");
        assert!((log10_abs(&y) + 4.30103).abs() < 1e-4);
        assert!(below_pow10(&y, -4, 128));
        assert!(!below_pow10(&y, -5, 128));
    }

    #[test]
    fn rejects_bad_q() {
        let id = identity("a1").unwrap();
        let ctx = FloatCtx::default();
        assert!(eval_identity_numeric(&id, &rat(0, 1), &ctx).is_err());
        assert!(eval_identity_numeric(&id, &rat(1, 1), &ctx).is_err());
        assert!(eval_identity_numeric(&id, &rat(-3, 2), &ctx).is_err());
    }

    #[test]
    fn spec_examples() {
        let ctx = FloatCtx::default();
        let r = eval_identity_numeric(&identity("a1").unwrap(), &rat(1, 2), &ctx).unwrap();
        assert!(below_pow10(&r.best().gap, -50, 256));
        let r = eval_identity_numeric(&identity("a11").unwrap(), &rat(-1, 3), &ctx).unwrap();
        assert!(below_pow10(&r.best().gap, -50, 256));
    }

    #[test]
    fn lhs_matches_series_value() {
        // a11 at q = 1/4 against a direct f64 evaluation of the first terms
        let r = eval_identity_numeric(&identity("a11").unwrap(), &rat(1, 4), &FloatCtx::default()).unwrap();
        let q: f64 = 0.25;
        let mut s = 0.0;
        for n in 0..6i32 {
            let mut t = (-1f64).powi(n) * q.powi(3 * n * n) * (1.0 - q.powi(6 * n + 1)) / (1.0 - q);
            for j in 0..n {
                t *= ((1.0 - q.powi(2 * j + 1)) / (1.0 - q.powi(4 * j + 4))).powi(3);
            }
            s += t;
        }
        assert!((log10_abs(&r.lhs) - s.log10()).abs() < 1e-12);
    }

    #[test]
    fn registry_gaps() {
        let ctx = FloatCtx::default();
        for id in all_identities() {
            for q in [rat(1, 4), rat(-1, 4), rat(1, 2), rat(-1, 2), rat(7, 10)] {
                let r = eval_identity_numeric(&id, &q, &ctx).unwrap();
                assert!(below_pow10(&r.best().gap, -30, 256), "{} at {q}", id.name);
            }
        }
    }

    #[test]
    fn bauer_printed_rhs_differs_numerically() {
        let r = eval_identity_numeric(&identity("bauer_q").unwrap(), &rat(1, 2), &FloatCtx::default()).unwrap();
        let printed = r.candidates.iter().find(|c| c.label == "printed").unwrap();
        assert!(!below_pow10(&printed.gap, -5, 256));
        assert_eq!(r.best().label, "den_q2_q2");
    }

    #[test]
    fn doubling_precision_does_not_grow_gap() {
        for id in all_identities() {
            let q = rat(1, 2);
            let a = eval_identity_numeric(&id, &q, &FloatCtx::new(256, 100_000)).unwrap();
            let b = eval_identity_numeric(&id, &q, &FloatCtx::new(512, 100_000)).unwrap();
            let (ga, gb) = (&a.best().gap, &b.best().gap);
            assert!(gb.cmp(ga).is_some_and(|c| c <= 0), "{}", id.name);
        }
    }

    #[test]
    fn pi_series() {
        let ctx = FloatCtx::default();
        for name in PI_SERIES_NAMES {
            let r = classical_pi_series(name, &ctx).unwrap();
            if name == "bauer_2pi" {
                assert!(below_pow10(&r.gap, -3, 256));
                assert!(r.terms <= 100_000);
            } else {
                assert!(below_pow10(&r.gap, -40, 256), "{name}: {}", to_decimal(&r.gap, 3));
                assert!(r.terms <= 500);
            }
        }
        assert!(classical_pi_series("nosuch", &ctx).is_err());
    }

    #[test]
    fn ram_4pi_two_hundred_terms() {
        let r = classical_pi_series("ram_4pi", &FloatCtx::new(256, 200)).unwrap();
        assert!(below_pow10(&r.gap, -40, 256));
    }

    #[test]
    fn wrong_constant_detected() {
        // the q2 limit with the alternating sign dropped is not 16/pi
        let env = Env::new(&FloatCtx::default()).unwrap();
        let mut c = env.int(1);
        let mut s = env.int(0);
        for n in 0..40 {
            if n > 0 {
                c = scaled(&env, &c, &ratio("q3limit_8sqrt2pi", n));
            }
            s = s.add(&scaled(&env, &c, &weight("q3limit_8sqrt2pi", n)), env.p, RM);
        }
        let r = classical_pi_series("q3limit_8sqrt2pi", &FloatCtx::default()).unwrap();
        assert!(below_pow10(&s.sub(&r.reference, 256, RM), -20, 256));
        let r2 = classical_pi_series("q2limit_16pi", &FloatCtx::default()).unwrap();
        assert!(!below_pow10(&s.sub(&r2.reference, 256, RM), -3, 256));
    }
}
