//! The quadratic transformation
//!
//! ```text
//! sum_n (a;Q)_n (1-aQ^{3n}) (d;Q)_n (Q/d;Q)_n (b;Q^2)_n a^n Q^{n(n+1)/2}
//!       / ((Q^2;Q^2)_n (1-a) (aQ^2/d;Q^2)_n (adQ;Q^2)_n (aQ/b;Q)_n b^n)
//!   = (aQ;Q^2)(aQ^2;Q^2)(adQ/b;Q^2)(aQ^2/(bd);Q^2)
//!     / ((aQ/b;Q^2)(aQ^2/b;Q^2)(aQ^2/d;Q^2)(adQ;Q^2))
//! ```
//!
//! and the cubic transformation
//!
//! ```text
//! sum_n (1-acQ^{4n}) (a;Q)_n (Q/a;Q)_n (ac;Q)_{2n} Q^{n^2}
//!       / ((1-ac) (cQ^3;Q^3)_n (a^2cQ^2;Q^3)_n (Q;Q)_{2n})
//!   = (acQ^2;Q^3)(acQ^3;Q^3)(aQ;Q^3)(Q^2/a;Q^3)
//!     / ((Q;Q^3)(Q^2;Q^3)(a^2cQ^2;Q^3)(cQ^3;Q^3))
//! ```
//!
//! (all products infinite), verified at specializations `Q = q^s` and
//! parameters `±q^m`. When a specialization produces negative powers of `q`,
//! both sides are multiplied by the same `q^shift` before truncation.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hypterm::{aff, eval_series_shifted, quad, valuation_bound, AffExpr, Factored, TermAtom, TermExpr};
use crate::qpoly::Sign;
use crate::qseries::{product_spec_series, InfiniteFactor, ProductSpec, TruncSeries};

/// `sign * q^exp` with `exp >= 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub sign: Sign,
    pub exp: i64,
}

impl Monomial {
    pub fn new(sign: Sign, exp: i64) -> Self {
        Monomial { sign, exp }
    }

    fn times(self, o: Monomial) -> Monomial {
        Monomial::new(self.sign * o.sign, self.exp + o.exp)
    }

    fn inv(self) -> Monomial {
        Monomial::new(self.sign, -self.exp)
    }

    fn q(exp: i64) -> Monomial {
        Monomial::new(Sign::Plus, exp)
    }
}

/// A parameter value: a monomial or the limit `infinity`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Param {
    Finite(Monomial),
    Infinity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ParamSpec {
    Quadratic { s: i64, a: Monomial, d: Monomial, b: Param },
    Cubic { s: i64, a: Monomial, c: Monomial },
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.sign == Sign::Minus { "-" } else { "" };
        match self.exp {
            0 => write!(f, "{sign}1"),
            1 => write!(f, "{sign}q"),
            e => write!(f, "{sign}q^{e}"),
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Finite(m) => write!(f, "{m}"),
            Param::Infinity => write!(f, "inf"),
        }
    }
}

impl fmt::Display for ParamSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamSpec::Quadratic { s, a, d, b } => write!(f, "s={s},a={a},d={d},b={b}"),
            ParamSpec::Cubic { s, a, c } => write!(f, "s={s},a={a},c={c}"),
        }
    }
}

fn parse_monomial(v: &str) -> Result<Param> {
    let bad = || Error::InvalidArgument(format!("bad parameter value `{v}`"));
    if v == "inf" {
        return Ok(Param::Infinity);
    }
    let (sign, body) = match v.strip_prefix('-') {
        Some(r) => (Sign::Minus, r),
        None => (Sign::Plus, v),
    };
    let exp = match body {
        "1" => 0,
        "q" => 1,
        _ => body
            .strip_prefix("q^")
            .and_then(|e| e.parse::<i64>().ok())
            .filter(|&e| e >= 0)
            .ok_or_else(bad)?,
    };
    Ok(Param::Finite(Monomial::new(sign, exp)))
}

impl ParamSpec {
    /// Parse `s=2,a=q,d=-q,b=inf` (quadratic) or `s=2,a=q,c=1` (cubic).
    pub fn parse(kind: &str, text: &str) -> Result<Self> {
        let mut s = 1i64;
        let (mut a, mut b, mut c, mut d) = (None, None, None, None);
        for item in text.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("expected key=value, found `{item}`")))?;
            match k.trim() {
                "s" => {
                    s = v
                        .trim()
                        .parse()
                        .ok()
                        .filter(|&x| x >= 1)
                        .ok_or_else(|| Error::InvalidArgument(format!("bad base exponent `{v}`")))?
                }
                "a" => a = Some(parse_monomial(v.trim())?),
                "b" => b = Some(parse_monomial(v.trim())?),
                "c" => c = Some(parse_monomial(v.trim())?),
                "d" => d = Some(parse_monomial(v.trim())?),
                other => return Err(Error::InvalidArgument(format!("unknown parameter `{other}`"))),
            }
        }
        let finite = |p: Option<Param>, name: &str| match p {
            Some(Param::Finite(m)) => Ok(m),
            Some(Param::Infinity) => Err(Error::IllPosed(format!("{name} = inf is not supported"))),
            None => Err(Error::InvalidArgument(format!("missing parameter {name}"))),
        };
        let spec = match kind {
            "quadratic" => {
                if c.is_some() {
                    return Err(Error::InvalidArgument("c is a cubic parameter".into()));
                }
                ParamSpec::Quadratic {
                    s,
                    a: finite(a, "a")?,
                    d: finite(d, "d")?,
                    b: b.ok_or_else(|| Error::InvalidArgument("missing parameter b".into()))?,
                }
            }
            "cubic" => {
                if b.is_some() || d.is_some() {
                    return Err(Error::InvalidArgument("b and d are quadratic parameters".into()));
                }
                ParamSpec::Cubic { s, a: finite(a, "a")?, c: finite(c, "c")? }
            }
            other => return Err(Error::UnknownName(other.to_string())),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ParamSpec::Quadratic { .. } => "quadratic",
            ParamSpec::Cubic { .. } => "cubic",
        }
    }

    /// Reject specializations with a vanishing denominator.
    pub fn validate(&self) -> Result<()> {
        let sides = self.sides();
        let ill = |what: String| Err(Error::IllPosed(format!("{self}: {what}")));
        for p in sides.lhs.atoms()[0].pochs.iter().filter(|p| p.power < 0) {
            if p.sign == Sign::Plus && p.a <= 0 && p.a % p.b == 0 {
                return ill(format!("denominator (q^{};q^{})_n vanishes", p.a, p.b));
            }
        }
        for u in sides.lhs.atoms()[0].units.iter().filter(|u| u.power < 0 && u.exp.cn == 0 && u.exp.ck == 0) {
            if u.sign == Sign::Plus && u.exp.c0 == 0 {
                return ill("constant denominator factor vanishes".into());
            }
        }
        for f in &sides.rhs_den {
            if f.sign == Sign::Plus && f.exp <= 0 && f.exp % f.step == 0 {
                return ill("right-hand denominator vanishes".into());
            }
        }
        Ok(())
    }

    fn sides(&self) -> Sides {
        match *self {
            ParamSpec::Quadratic { s, a, d, b } => quadratic_sides(s, a, d, b),
            ParamSpec::Cubic { s, a, c } => cubic_sides(s, a, c),
        }
    }
}

/// `(sign*q^exp; q^step)_inf`.
#[derive(Clone, Copy, Debug)]
struct InfFactor {
    sign: Sign,
    exp: i64,
    step: i64,
}

impl InfFactor {
    fn of(m: Monomial, step: i64) -> Self {
        InfFactor { sign: m.sign, exp: m.exp, step }
    }
}

struct Sides {
    lhs: TermExpr,
    rhs_num: Vec<InfFactor>,
    rhs_den: Vec<InfFactor>,
}

const N: AffExpr = AffExpr::N;

fn sign_pow(m: Monomial) -> AffExpr {
    if m.sign == Sign::Minus {
        N
    } else {
        AffExpr::default()
    }
}

fn quadratic_sides(s: i64, a: Monomial, d: Monomial, b: Param) -> Sides {
    let qq = Monomial::q(s);
    let qq2 = Monomial::q(2 * s);
    let mut t = TermAtom::new()
        .poch(a.sign, a.exp, s, N, 1)
        .unit(a.sign, aff(3 * s, 0, a.exp), 1)
        .unit(a.sign, AffExpr::constant(a.exp), -1)
        .poch(d.sign, d.exp, s, N, 1);
    let qd = qq.times(d.inv());
    t = t
        .poch(qd.sign, qd.exp, s, N, 1)
        .poch(Sign::Plus, 2 * s, 2 * s, N, -1);
    let x = a.times(qq2).times(d.inv());
    t = t.poch(x.sign, x.exp, 2 * s, N, -1);
    let x = a.times(d).times(qq);
    t = t.poch(x.sign, x.exp, 2 * s, N, -1);
    // a^n Q^{n(n+1)/2}
    t = t
        .sign(sign_pow(a))
        .qpow(quad(0, 0, 0, a.exp, 0, 0))
        .qpow(quad(s, 0, 0, s, 0, 0).over(2));
    let mut num = vec![InfFactor::of(a.times(qq), 2 * s), InfFactor::of(a.times(qq2), 2 * s)];
    let mut den = vec![InfFactor::of(a.times(qq2).times(d.inv()), 2 * s), InfFactor::of(a.times(d).times(qq), 2 * s)];
    match b {
        Param::Finite(b) => {
            let x = a.times(qq).times(b.inv());
            t = t
                .poch(b.sign, b.exp, 2 * s, N, 1)
                .poch(x.sign, x.exp, s, N, -1)
                .sign(sign_pow(b))
                .qpow(quad(0, 0, 0, -b.exp, 0, 0));
            num.push(InfFactor::of(a.times(d).times(qq).times(b.inv()), 2 * s));
            num.push(InfFactor::of(a.times(qq2).times(b.inv()).times(d.inv()), 2 * s));
            den.push(InfFactor::of(a.times(qq).times(b.inv()), 2 * s));
            den.push(InfFactor::of(a.times(qq2).times(b.inv()), 2 * s));
        }
        Param::Infinity => {
            // (b;Q^2)_n / b^n -> (-1)^n Q^{n(n-1)}
            t = t.sign(N).qpow(quad(s, 0, 0, -s, 0, 0));
        }
    }
    Sides { lhs: t.into_term(), rhs_num: num, rhs_den: den }
}

fn cubic_sides(s: i64, a: Monomial, c: Monomial) -> Sides {
    let ac = a.times(c);
    let qa = Monomial::q(s).times(a.inv());
    let a2c = a.times(a).times(c).times(Monomial::q(2 * s));
    let n2 = aff(2, 0, 0);
    let t = TermAtom::new()
        .unit(ac.sign, aff(4 * s, 0, ac.exp), 1)
        .unit(ac.sign, AffExpr::constant(ac.exp), -1)
        .poch(a.sign, a.exp, s, N, 1)
        .poch(qa.sign, qa.exp, s, N, 1)
        .poch(ac.sign, ac.exp, s, n2, 1)
        .poch(c.sign, c.exp + 3 * s, 3 * s, N, -1)
        .poch(a2c.sign, a2c.exp, 3 * s, N, -1)
        .poch(Sign::Plus, s, s, n2, -1)
        .qpow(quad(s, 0, 0, 0, 0, 0));
    let b = 3 * s;
    Sides {
        lhs: t.into_term(),
        rhs_num: vec![
            InfFactor::of(ac.times(Monomial::q(2 * s)), b),
            InfFactor::of(ac.times(Monomial::q(3 * s)), b),
            InfFactor::of(a.times(Monomial::q(s)), b),
            InfFactor::of(Monomial::q(2 * s).times(a.inv()), b),
        ],
        rhs_den: vec![
            InfFactor::of(Monomial::q(s), b),
            InfFactor::of(Monomial::q(2 * s), b),
            InfFactor::of(a2c, b),
            InfFactor::of(c.times(Monomial::q(3 * s)), b),
        ],
    }
}

/// Split the right side into finitely many leading factors (which may carry
/// negative powers of `q`) and a unit infinite product.
fn rhs_parts(sides: &Sides) -> (TermAtom, ProductSpec) {
    let mut finite = TermAtom::new();
    let mut factors = Vec::new();
    for (list, e) in [(&sides.rhs_num, 1i64), (&sides.rhs_den, -1i64)] {
        for f in list {
            let mut exp = f.exp;
            while exp < 1 {
                finite = finite.unit(f.sign, AffExpr::constant(exp), e);
                exp += f.step;
            }
            factors.push(InfiniteFactor::new(f.sign, exp as u64, f.step as u64, e));
        }
    }
    (finite, ProductSpec::new(factors))
}

/// Both sides of a transformation, each multiplied by `q^shift`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformSides {
    pub lhs: TruncSeries,
    pub rhs: TruncSeries,
    pub shift: i64,
}

fn lhs_indices(term: &TermExpr, order: usize) -> Result<(Vec<(i64, i64)>, i64)> {
    // A numerator (q^{-tb};q^b)_{cn} vanishes once cn > t, so the sum is finite.
    let support = term.atoms()[0]
        .pochs
        .iter()
        .filter(|p| p.power > 0 && p.sign == Sign::Plus && p.a <= 0 && p.a % p.b == 0 && p.len.cn > 0)
        .map(|p| (-p.a / p.b - p.len.c0).div_euclid(p.len.cn) + 1)
        .min();
    if let Some(end) = support {
        let mut vals = Vec::new();
        let mut min_v = 0i64;
        for n in 0..end.max(0) {
            if let Some(v) = valuation_bound(term, n, 0)? {
                min_v = min_v.min(v);
                vals.push((n, v));
            }
        }
        return Ok((vals, min_v));
    }
    let budget = 4 * order as i64 + 64;
    let mut vals = Vec::new();
    let mut min_v = 0i64;
    let mut above = 0;
    let mut prev: Option<i64> = None;
    for n in 0..budget {
        let v = valuation_bound(term, n, 0)?;
        if let Some(v) = v {
            min_v = min_v.min(v);
            vals.push((n, v));
            let shift = -min_v;
            if v > order as i64 + shift && prev.is_some_and(|p| v > p) {
                above += 1;
                if above >= 2 {
                    return Ok((vals, min_v));
                }
            } else {
                above = 0;
            }
            prev = Some(v);
        }
    }
    Err(Error::NoConvergence { budget: budget as usize })
}

fn both_sides(spec: &ParamSpec, order: usize) -> Result<TransformSides> {
    spec.validate()?;
    let sides = spec.sides();
    let (finite, unit) = rhs_parts(&sides);
    let rhs_finite = Factored::of_atom(&finite, 0, 0)
        .map_err(|_| Error::IllPosed(format!("{spec}: right-hand denominator vanishes")))?;
    let (vals, lhs_min) = lhs_indices(&sides.lhs, order)?;
    let rhs_min = rhs_finite.as_ref().map_or(0, |f| f.qpow);
    let shift = -(lhs_min.min(rhs_min).min(0));
    let lhs_parts = vals
        .par_iter()
        .filter(|&&(_, v)| v + shift <= order as i64)
        .map(|&(n, _)| {
            eval_series_shifted(&sides.lhs, n, 0, shift, order).map_err(|e| match e {
                Error::DivisionByZero { .. } => Error::IllPosed(format!("{spec}: {e}")),
                e => e,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let lhs = lhs_parts.iter().fold(TruncSeries::zero(order), |acc, s| &acc + s);
    let rhs = match rhs_finite {
        Some(f) => &f.series(shift, order, 0, 0)? * &product_spec_series(&unit, order)?,
        None => TruncSeries::zero(order),
    };
    Ok(TransformSides { lhs, rhs, shift })
}

/// Both sides of the quadratic transformation under `spec`.
pub fn quadratic_both_sides(spec: &ParamSpec, order: usize) -> Result<TransformSides> {
    match spec {
        ParamSpec::Quadratic { .. } => both_sides(spec, order),
        _ => Err(Error::InvalidArgument("expected quadratic parameters".into())),
    }
}

/// Both sides of the cubic transformation under `spec`.
pub fn cubic_both_sides(spec: &ParamSpec, order: usize) -> Result<TransformSides> {
    match spec {
        ParamSpec::Cubic { .. } => both_sides(spec, order),
        _ => Err(Error::InvalidArgument("expected cubic parameters".into())),
    }
}

pub fn both_sides_for(spec: &ParamSpec, order: usize) -> Result<TransformSides> {
    both_sides(spec, order)
}

/// Summand of the left side, for comparison with registered identities.
pub fn lhs_summand(spec: &ParamSpec) -> TermExpr {
    spec.sides().lhs
}

pub const TRANSFORM_NAMES: [&str; 2] = ["quadratic", "cubic"];

/// Specializations named after the identities they produce.
pub fn known_specializations() -> Vec<(&'static str, ParamSpec)> {
    [
        ("a1", "quadratic", "s=2,a=q,d=q,b=q^2"),
        ("a11", "quadratic", "s=2,a=q,d=q,b=inf"),
        ("s4a", "quadratic", "s=2,a=q,d=-q,b=q^2"),
        ("s4b", "quadratic", "s=2,a=q,d=-q,b=inf"),
        ("q4", "cubic", "s=2,a=q,c=1"),
    ]
    .into_iter()
    .map(|(id, kind, p)| (id, ParamSpec::parse(kind, p).expect("well-formed")))
    .collect()
}

/// Additional specializations exercising signs, exponents, base changes,
/// `b = inf`, and negative powers of `q`.
pub fn battery(kind: &str) -> Result<Vec<ParamSpec>> {
    if !TRANSFORM_NAMES.contains(&kind) {
        return Err(Error::UnknownName(kind.to_string()));
    }
    battery_texts(kind).iter().map(|t| ParamSpec::parse(kind, t)).collect()
}

fn battery_texts(kind: &str) -> &'static [&'static str] {
    match kind {
        "quadratic" => &[
            "s=1,a=q,d=q,b=q",
            "s=1,a=q,d=q^2,b=inf",
            "s=1,a=q^2,d=q,b=q",
            "s=1,a=-q,d=q,b=inf",
            "s=2,a=q,d=q^3,b=q^2",
            "s=2,a=q^3,d=q,b=q",
            "s=1,a=q,d=-q,b=-q",
            "s=3,a=q,d=q^2,b=q^5",
            "s=2,a=-q,d=q,b=inf",
            "s=1,a=q^2,d=q^2,b=-1",
            "s=2,a=q,d=-q^3,b=-q^2",
            "s=3,a=q^2,d=-q,b=inf",
            "s=1,a=q^3,d=-1,b=q^2",
        ],
        "cubic" => &[
            "s=1,a=q,c=q",
            "s=1,a=q^2,c=1",
            "s=1,a=-q,c=q",
            "s=2,a=q,c=q",
            "s=2,a=q^3,c=-1",
            "s=1,a=q,c=-q^2",
            "s=3,a=q^2,c=q",
            "s=1,a=-q^2,c=-q",
            "s=2,a=-q,c=q^2",
            "s=1,a=q^3,c=1",
            "s=1,a=q^4,c=q",
            "s=3,a=q,c=1",
        ],
        _ => &[],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identities::{identity, truncated_lhs};
    use crate::wz::check_terms_equal;

    #[test]
    fn parse_and_display() {
        let p = ParamSpec::parse("quadratic", "s=2,a=q,d=-q,b=inf").unwrap();
        assert_eq!(p.to_string(), "s=2,a=q,d=-q,b=inf");
        assert_eq!(ParamSpec::parse("quadratic", &p.to_string()).unwrap(), p);
        let c = ParamSpec::parse("cubic", "a=q^3, c=1").unwrap();
        assert_eq!(c.to_string(), "s=1,a=q^3,c=1");
        assert!(ParamSpec::parse("cubic", "s=1,a=q").is_err());
        assert!(ParamSpec::parse("cubic", "s=0,a=q,c=1").is_err());
        assert!(ParamSpec::parse("quadratic", "a=q,d=q,b=q,c=q").is_err());
        assert!(ParamSpec::parse("quartic", "a=q").is_err());
    }

    #[test]
    fn ill_posed_rejected() {
        // 1 - a = 0
        assert!(matches!(ParamSpec::parse("quadratic", "s=1,a=1,d=q,b=q"), Err(Error::IllPosed(_))));
        // (aQ/b;Q)_n = (1;q)_n in the denominator
        assert!(matches!(ParamSpec::parse("quadratic", "s=1,a=q,d=q,b=q^2"), Err(Error::IllPosed(_))));
        // 1 - ac = 0
        assert!(matches!(ParamSpec::parse("cubic", "s=1,a=1,c=1"), Err(Error::IllPosed(_))));
    }

    #[test]
    fn known_specializations_give_registered_summands() {
        for (id, spec) in known_specializations() {
            let reg = identity(id).unwrap();
            let r = check_terms_equal(&lhs_summand(&spec), &reg.summand, 8, 0, 0).unwrap();
            assert!(r.pass, "{id}: {spec}");
        }
    }

    #[test]
    fn known_specializations_small_order() {
        for (id, spec) in known_specializations() {
            let sides = both_sides_for(&spec, 30).unwrap();
            assert_eq!(sides.shift, 0);
            assert_eq!(sides.lhs, sides.rhs, "{id}");
            assert_eq!(sides.lhs, truncated_lhs(&identity(id).unwrap(), 30).unwrap(), "{id}");
        }
    }

    #[test]
    fn batteries_small_order() {
        for kind in TRANSFORM_NAMES {
            let specs = battery(kind).unwrap();
            assert!(specs.len() >= 10);
            for spec in specs {
                let sides = both_sides_for(&spec, 20).unwrap();
                assert_eq!(sides.lhs, sides.rhs, "{spec}");
            }
        }
    }

    #[test]
    fn degenerate_cubic_has_finite_support() {
        let spec = ParamSpec::parse("cubic", "s=1,a=q^3,c=1").unwrap();
        let t = lhs_summand(&spec);
        for n in 3..8 {
            assert_eq!(valuation_bound(&t, n, 0).unwrap(), None);
        }
        let sides = cubic_both_sides(&spec, 20).unwrap();
        assert!(sides.shift > 0);
        assert_eq!(sides.lhs, sides.rhs);
    }

    #[test]
    fn perturbed_side_detected() {
        let spec = ParamSpec::parse("quadratic", "s=2,a=q,d=-q,b=inf").unwrap();
        let other = ParamSpec::parse("quadratic", "s=2,a=q,d=q,b=inf").unwrap();
        let x = both_sides_for(&spec, 30).unwrap();
        let y = both_sides_for(&other, 30).unwrap();
        assert_ne!(x.lhs, y.rhs);
    }

    #[test]
    fn kind_mismatch() {
        let c = ParamSpec::parse("cubic", "s=1,a=q,c=q").unwrap();
        assert!(quadratic_both_sides(&c, 5).is_err());
    }
}
