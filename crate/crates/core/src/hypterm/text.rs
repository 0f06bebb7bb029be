//! Canonical text form of terms.
//!
//! ```text
//! term    := "0" | atom (" + " atom)*
//! atom    := rational ("*" factor)*
//! factor  := "(-1)^(" aff ")"
//!          | "q^(" quad ")"
//!          | "(" ["-"] "q^" int ";q^" int ")_(" aff ")^" int
//!          | "[" aff "]^" int
//!          | "(1" ("-" | "+") "q^(" aff "))^" int
//! aff     := e.g. "6n-2k+1", "0"
//! quad    := e.g. "n^2-2nk+k^2", "(n^2+n)/2"
//! ```
//!
//! Factors appear in the order sign, q-power, Pochhammers, brackets, units;
//! trivial sign and q-power factors are omitted.

use std::fmt;

use num_traits::Zero;

use super::{AffExpr, BracketFactor, PochFactor, QuadExpr, TermAtom, TermExpr, UnitFactor};
use crate::error::{Error, Result};
use crate::exactnum::Rational;
use crate::qpoly::Sign;

fn write_linear(f: &mut fmt::Formatter<'_>, terms: &[(i64, &str)]) -> fmt::Result {
    let mut first = true;
    for &(c, var) in terms {
        if c == 0 {
            continue;
        }
        let sign = if c < 0 { "-" } else if first { "" } else { "+" };
        let mag = c.unsigned_abs();
        if var.is_empty() {
            write!(f, "{sign}{mag}")?;
        } else if mag == 1 {
            write!(f, "{sign}{var}")?;
        } else {
            write!(f, "{sign}{mag}{var}")?;
        }
        first = false;
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

impl fmt::Display for AffExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_linear(f, &[(self.cn, "n"), (self.ck, "k"), (self.c0, "")])
    }
}

impl fmt::Display for QuadExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = [
            (self.nn, "n^2"),
            (self.nk, "nk"),
            (self.kk, "k^2"),
            (self.n, "n"),
            (self.k, "k"),
            (self.c, ""),
        ];
        if self.den == 1 {
            write_linear(f, &terms)
        } else {
            write!(f, "(")?;
            write_linear(f, &terms)?;
            write!(f, ")/{}", self.den)
        }
    }
}

impl fmt::Display for PochFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.sign == Sign::Minus { "-" } else { "" };
        write!(f, "({s}q^{};q^{})_({})^{}", self.a, self.b, self.len, self.power)
    }
}

impl fmt::Display for BracketFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]^{}", self.arg, self.power)
    }
}

impl fmt::Display for UnitFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = if self.sign == Sign::Plus { '-' } else { '+' };
        write!(f, "(1{op}q^({}))^{}", self.exp, self.power)
    }
}

impl fmt::Display for TermAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.constant)?;
        if !self.sign_exp.is_zero() {
            write!(f, "*(-1)^({})", self.sign_exp)?;
        }
        if !self.q_exp.is_zero() {
            write!(f, "*q^({})", self.q_exp)?;
        }
        for p in &self.pochs {
            write!(f, "*{p}")?;
        }
        for b in &self.brackets {
            write!(f, "*{b}")?;
        }
        for u in &self.units {
            write!(f, "*{u}")?;
        }
        Ok(())
    }
}

impl fmt::Display for TermExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return write!(f, "0");
        }
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

fn err(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse { pos, msg: msg.into() }
}

/// Split at top-level occurrences of `sep` (outside any brackets).
fn split_top<'a>(s: &'a str, sep: &str, base: usize) -> Result<Vec<(usize, &'a str)>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < s.len() {
        match bytes[i] {
            b'(' | b'[' => depth += 1,
            b')' | b']' => {
                depth -= 1;
                if depth < 0 {
                    return Err(err(base + i, "unbalanced bracket"));
                }
            }
            _ => {}
        }
        if depth == 0 && s[i..].starts_with(sep) {
            out.push((base + start, &s[start..i]));
            i += sep.len();
            start = i;
            continue;
        }
        i += 1;
    }
    if depth != 0 {
        return Err(err(base + s.len(), "unbalanced bracket"));
    }
    out.push((base + start, &s[start..]));
    Ok(out)
}

fn parse_int(s: &str, pos: usize) -> Result<i64> {
    s.parse().map_err(|_| err(pos, format!("expected integer, found `{s}`")))
}

/// Signed linear combination over the given monomial names.
fn parse_linear(s: &str, pos: usize, vars: &[&str]) -> Result<Vec<i64>> {
    let mut coeffs = vec![0i64; vars.len() + 1];
    if s == "0" {
        return Ok(coeffs);
    }
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < s.len() {
        let start = i;
        let neg = match bytes[i] {
            b'-' => {
                i += 1;
                true
            }
            b'+' if i > 0 => {
                i += 1;
                false
            }
            _ if i == 0 => false,
            _ => return Err(err(pos + i, "expected `+` or `-`")),
        };
        let ds = i;
        while i < s.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let mag = if i > ds { Some(parse_int(&s[ds..i], pos + ds)?) } else { None };
        let rest = &s[i..];
        let var = vars
            .iter()
            .enumerate()
            .filter(|(_, v)| rest.starts_with(*v))
            .max_by_key(|(_, v)| v.len());
        let (slot, len) = match var {
            Some((idx, v)) => (idx, v.len()),
            None if mag.is_some() => (vars.len(), 0),
            None => return Err(err(pos + start, "expected a monomial")),
        };
        i += len;
        let c = mag.unwrap_or(1);
        coeffs[slot] += if neg { -c } else { c };
    }
    Ok(coeffs)
}

pub(crate) fn parse_aff(s: &str, pos: usize) -> Result<AffExpr> {
    let c = parse_linear(s, pos, &["n", "k"])?;
    Ok(AffExpr { cn: c[0], ck: c[1], c0: c[2] })
}

pub(crate) fn parse_quad(s: &str, pos: usize) -> Result<QuadExpr> {
    let (body, den, off) = match s.strip_prefix('(') {
        Some(rest) => {
            let close = rest.rfind(")/").ok_or_else(|| err(pos, "expected `(...)/den`"))?;
            let den = parse_int(&rest[close + 2..], pos + close + 3)?;
            if den < 1 {
                return Err(err(pos + close + 3, "denominator must be positive"));
            }
            (&rest[..close], den, 1)
        }
        None => (s, 1, 0),
    };
    let c = parse_linear(body, pos + off, &["n^2", "nk", "k^2", "n", "k"])?;
    Ok(QuadExpr { nn: c[0], nk: c[1], kk: c[2], n: c[3], k: c[4], c: c[5], den })
}

/// `inner` of `open inner close`, where `close` is followed by `rest`.
fn between<'a>(s: &'a str, open: &str, close: &str, pos: usize) -> Result<(&'a str, &'a str)> {
    let body = s.strip_prefix(open).ok_or_else(|| err(pos, format!("expected `{open}`")))?;
    let end = body.find(close).ok_or_else(|| err(pos, format!("expected `{close}`")))?;
    Ok((&body[..end], &body[end + close.len()..]))
}

fn parse_power(s: &str, pos: usize) -> Result<i64> {
    let e = s.strip_prefix('^').ok_or_else(|| err(pos, "expected `^power`"))?;
    parse_int(e, pos + 1)
}

fn parse_atom(s: &str, pos: usize) -> Result<TermAtom> {
    let pieces = split_top(s, "*", pos)?;
    let (cpos, ctext) = pieces[0];
    let constant: Rational = ctext
        .parse()
        .map_err(|_| err(cpos, format!("expected rational constant, found `{ctext}`")))?;
    if constant.is_zero() {
        return Err(err(cpos, "atom constant must be nonzero"));
    }
    let mut atom = TermAtom::new().coeff(constant);
    for &(p, piece) in &pieces[1..] {
        if let Some(rest) = piece.strip_prefix("(-1)^") {
            let (inner, tail) = between(rest, "(", ")", p + 5)?;
            if !tail.is_empty() {
                return Err(err(p, "trailing text after sign"));
            }
            atom = atom.sign(parse_aff(inner, p + 6)?);
        } else if let Some(rest) = piece.strip_prefix("q^") {
            let inner = rest
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| err(p + 2, "expected `q^(quad)`"))?;
            atom = atom.qpow(parse_quad(inner, p + 3)?);
        } else if let Some(rest) = piece.strip_prefix('[') {
            let end = rest.find(']').ok_or_else(|| err(p, "expected `]`"))?;
            let arg = parse_aff(&rest[..end], p + 1)?;
            atom = atom.bracket(arg, parse_power(&rest[end + 1..], p + end + 2)?);
        } else if let Some(rest) = piece.strip_prefix("(1") {
            let sign = match rest.as_bytes().first() {
                Some(b'-') => Sign::Plus,
                Some(b'+') => Sign::Minus,
                _ => return Err(err(p + 2, "expected `-` or `+`")),
            };
            let (inner, tail) = between(&rest[1..], "q^(", "))", p + 3)?;
            let exp = parse_aff(inner, p + 6)?;
            atom = atom.unit(sign, exp, parse_power(tail, p + piece.len() - tail.len())?);
        } else if piece.starts_with('(') {
            let (sign, rest) = match piece.strip_prefix("(-q^") {
                Some(r) => (Sign::Minus, r),
                None => (
                    Sign::Plus,
                    piece.strip_prefix("(q^").ok_or_else(|| err(p, "unrecognised factor"))?,
                ),
            };
            let semi = rest.find(";q^").ok_or_else(|| err(p, "expected `;q^`"))?;
            let a = parse_int(&rest[..semi], p)?;
            let rest = &rest[semi + 3..];
            let close = rest.find(")_(").ok_or_else(|| err(p, "expected `)_(`"))?;
            let b = parse_int(&rest[..close], p)?;
            if b < 1 {
                return Err(err(p, "Pochhammer step must be positive"));
            }
            let (len, tail) = between(&rest[close + 1..], "_(", ")", p)?;
            let len = parse_aff(len, p)?;
            atom = atom.poch(sign, a, b, len, parse_power(tail, p)?);
        } else {
            return Err(err(p, format!("unrecognised factor `{piece}`")));
        }
    }
    Ok(atom)
}

pub(crate) fn parse_term(s: &str) -> Result<TermExpr> {
    let s = s.trim();
    if s == "0" {
        return Ok(TermExpr::zero());
    }
    let atoms = split_top(s, " + ", 0)?
        .into_iter()
        .map(|(pos, a)| parse_atom(a, pos))
        .collect::<Result<Vec<_>>>()?;
    Ok(TermExpr { atoms })
}

#[cfg(test)]
mod tests {
    use super::super::{aff, quad};
    use super::*;
    use crate::exactnum::rat;
    use proptest::prelude::*;

    #[test]
    fn display_examples() {
        assert_eq!(aff(6, -2, 1).to_string(), "6n-2k+1");
        assert_eq!(aff(0, -1, 0).to_string(), "-k");
        assert_eq!(aff(0, 0, 0).to_string(), "0");
        assert_eq!(quad(1, -2, 1, 0, 0, 0).to_string(), "n^2-2nk+k^2");
        assert_eq!(quad(1, 0, 0, 1, 0, 0).over(2).to_string(), "(n^2+n)/2");
        let t = TermAtom::new()
            .coeff(rat(-1, 2))
            .sign(aff(1, 0, 0))
            .qpow(quad(1, 0, 0, 0, 0, 0))
            .poch(Sign::Minus, 1, 2, aff(1, 0, 0), 2)
            .bracket(aff(6, 0, 1), 1)
            .unit(Sign::Plus, aff(0, 0, 1), -1)
            .into_term();
        let text = "-1/2*(-1)^(n)*q^(n^2)*(-q^1;q^2)_(n)^2*[6n+1]^1*(1-q^(1))^-1";
        assert_eq!(t.to_string(), text);
        assert_eq!(text.parse::<TermExpr>().unwrap(), t);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!("1*[n".parse::<TermExpr>(), Err(Error::Parse { .. })));
        assert!(matches!("1*(q^1;q^0)_(n)^1".parse::<TermExpr>(), Err(Error::Parse { .. })));
        assert!(matches!("x".parse::<TermExpr>(), Err(Error::Parse { .. })));
        assert_eq!("0".parse::<TermExpr>().unwrap(), TermExpr::zero());
    }

    fn arb_aff() -> impl Strategy<Value = AffExpr> {
        (-12i64..13, -12i64..13, -12i64..13).prop_map(|(a, b, c)| aff(a, b, c))
    }

    fn arb_quad() -> impl Strategy<Value = QuadExpr> {
        (proptest::collection::vec(-9i64..10, 6), 1i64..4)
            .prop_map(|(v, d)| quad(v[0], v[1], v[2], v[3], v[4], v[5]).over(d))
    }

    fn arb_atom() -> impl Strategy<Value = TermAtom> {
        let sgn = prop::bool::ANY.prop_map(|b| if b { Sign::Plus } else { Sign::Minus });
        (
            (-20i64..21, 1i64..9).prop_filter("nonzero", |(c, _)| *c != 0),
            arb_aff(),
            arb_quad(),
            proptest::collection::vec((sgn.clone(), -4i64..5, 1i64..5, arb_aff(), -3i64..4), 0..3),
            proptest::collection::vec((arb_aff(), -3i64..4), 0..3),
            proptest::collection::vec((sgn, arb_aff(), -3i64..4), 0..3),
        )
            .prop_map(|((c, d), s, q, ps, bs, us)| {
                let mut a = TermAtom::new().coeff(rat(c, d)).sign(s).qpow(q);
                for (sg, a0, b, l, e) in ps {
                    a = a.poch(sg, a0, b, l, e);
                }
                for (arg, e) in bs {
                    a = a.bracket(arg, e);
                }
                for (sg, x, e) in us {
                    a = a.unit(sg, x, e);
                }
                a
            })
    }

    proptest! {
        #[test]
        fn round_trip(atoms in proptest::collection::vec(arb_atom(), 0..4)) {
            let t = TermExpr::from_atoms(atoms);
            let text = t.to_string();
            let back: TermExpr = text.parse().unwrap();
            prop_assert_eq!(back.to_string(), text);
            for (n, k) in [(0, 0), (1, 2), (3, -1)] {
                for (x, y) in t.atoms().iter().zip(back.atoms()) {
                    prop_assert_eq!(x.q_exp.eval(n, k), y.q_exp.eval(n, k));
                    prop_assert_eq!(x.sign_exp.eval(n, k) % 2, y.sign_exp.eval(n, k) % 2);
                }
            }
        }
    }
}
