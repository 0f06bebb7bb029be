//! Registry of q-series identities and their verification as truncated power
//! series.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactnum::{int, Rational};
use crate::hypterm::{aff, eval_series, quad, valuation_bound, AffExpr, QuadExpr, TermAtom, TermExpr};
use crate::qpoly::{Poly, RatFunc, Sign};
use crate::qseries::{product_spec_series, InfiniteFactor, ProductSpec, TruncSeries};

use Sign::{Minus as M, Plus as P};

const N: AffExpr = AffExpr::N;

/// One admissible right-hand side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RhsCandidate {
    pub label: &'static str,
    pub product: ProductSpec,
}

/// `sum_{n >= 0} summand(n) = rhs`, with possibly several candidate right-hand
/// sides when the printed form is in doubt.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentitySpec {
    pub name: &'static str,
    pub summand: TermExpr,
    pub rhs: Vec<RhsCandidate>,
}

impl IdentitySpec {
    fn single(name: &'static str, summand: TermExpr, rhs: ProductSpec) -> Self {
        IdentitySpec {
            name,
            summand,
            rhs: vec![RhsCandidate { label: "printed", product: rhs }],
        }
    }

    /// Exact lower bound on `ord_q summand(n)`; `None` when the term vanishes.
    pub fn valuation(&self, n: i64) -> Result<Option<i64>> {
        valuation_bound(&self.summand, n, 0)
    }
}

fn inf(sign: Sign, a: u64, b: u64, e: i64) -> InfiniteFactor {
    InfiniteFactor::new(sign, a, b, e)
}

fn one_plus_q() -> RatFunc {
    RatFunc::from_poly(Poly::from_i64(&[1, 1]))
}

/// `(1+q)(q^2;q^4)_inf(q^6;q^4)_inf/(q^4;q^4)_inf^2`.
pub fn rhs_a1() -> ProductSpec {
    ProductSpec::new(vec![inf(P, 2, 4, 1), inf(P, 6, 4, 1), inf(P, 4, 4, -2)]).with_prefactor(one_plus_q())
}

/// `(q^3;q^4)_inf(q^5;q^4)_inf/(q^4;q^4)_inf^2`.
pub fn rhs_a11() -> ProductSpec {
    ProductSpec::new(vec![inf(P, 3, 4, 1), inf(P, 5, 4, 1), inf(P, 4, 4, -2)])
}

pub fn summand_a1() -> TermExpr {
    TermAtom::new()
        .qpow(quad(1, 0, 0, 0, 0, 0))
        .bracket(aff(6, 0, 1), 1)
        .poch(P, 1, 2, N, 2)
        .poch(P, 2, 4, N, 1)
        .poch(P, 4, 4, N, -3)
        .into_term()
}

pub fn summand_a11() -> TermExpr {
    TermAtom::new()
        .sign(N)
        .qpow(quad(3, 0, 0, 0, 0, 0))
        .bracket(aff(6, 0, 1), 1)
        .poch(P, 1, 2, N, 3)
        .poch(P, 4, 4, N, -3)
        .into_term()
}

pub fn summand_bauer_q() -> TermExpr {
    TermAtom::new()
        .sign(N)
        .qpow(quad(1, 0, 0, 0, 0, 0))
        .bracket(aff(4, 0, 1), 1)
        .poch(P, 1, 2, N, 3)
        .poch(P, 2, 2, N, -3)
        .into_term()
}

pub fn summand_q1() -> TermExpr {
    let pre = TermAtom::new()
        .sign(N)
        .qpow(quad(2, 0, 0, 0, 0, 0))
        .poch(P, 2, 4, N, 2)
        .poch(P, 1, 2, aff(2, 0, 0), 1)
        .poch(P, 4, 4, N, -2)
        .poch(P, 4, 4, aff(2, 0, 0), -1);
    TermExpr::from_atoms(vec![
        pre.clone().bracket(aff(8, 0, 1), 1),
        pre.bracket(aff(4, 0, 1), 1)
            .qpow(lin(4, 1))
            .unit(M, aff(4, 0, 2), -1),
    ])
}

pub fn summand_q2() -> TermExpr {
    let pre = TermAtom::new()
        .sign(N)
        .qpow(quad(2, 0, 0, 0, 0, 0))
        .poch(P, 2, 4, N, 1)
        .poch(P, 2, 4, aff(2, 0, 0), 1)
        .poch(P, 1, 2, aff(3, 0, 0), 1)
        .poch(P, 4, 4, N, -2)
        .poch(P, 4, 4, aff(3, 0, 0), -1)
        .poch(P, 1, 2, N, -1);
    TermExpr::from_atoms(vec![
        pre.clone().bracket(aff(10, 0, 1), 1),
        pre.clone()
            .qpow(lin(6, 1))
            .bracket(aff(4, 0, 2), 1)
            .bracket(aff(6, 0, 1), 1)
            .bracket(aff(12, 0, 4), -1),
        pre.qpow(lin(6, 3))
            .bracket(aff(6, 0, 1), 1)
            .bracket(aff(6, 0, 3), 1)
            .bracket(aff(8, 0, 2), 1)
            .unit(M, aff(2, 0, 1), 1)
            .bracket(aff(12, 0, 4), -1)
            .bracket(aff(12, 0, 8), -1),
    ])
}

pub fn summand_q3() -> TermExpr {
    let pre = TermAtom::new()
        .qpow(quad(4, 0, 0, 0, 0, 0))
        .poch(P, 1, 2, aff(2, 0, 0), 2)
        .poch(P, 4, 4, N, -2)
        .poch(P, 4, 4, aff(2, 0, 0), -1);
    TermExpr::from_atoms(vec![
        pre.clone().bracket(aff(8, 0, 1), 1),
        pre.coeff(int(-1))
            .qpow(lin(8, 3))
            .bracket(aff(4, 0, 1), 2)
            .bracket(aff(8, 0, 4), -1),
    ])
}

pub fn summand_q4() -> TermExpr {
    TermAtom::new()
        .qpow(quad(2, 0, 0, 0, 0, 0))
        .poch(P, 1, 2, N, 2)
        .poch(P, 1, 2, aff(2, 0, 0), 1)
        .bracket(aff(8, 0, 1), 1)
        .poch(P, 2, 2, aff(2, 0, 0), -1)
        .poch(P, 6, 6, N, -2)
        .into_term()
}

/// `(q^3;q^2)_inf(q^3;q^6)_inf/((q^2;q^2)_inf(q^6;q^6)_inf)`.
pub fn rhs_q4() -> ProductSpec {
    ProductSpec::new(vec![inf(P, 3, 2, 1), inf(P, 3, 6, 1), inf(P, 2, 2, -1), inf(P, 6, 6, -1)])
}

pub fn summand_s4a() -> TermExpr {
    TermAtom::new()
        .qpow(quad(1, 0, 0, 0, 0, 0))
        .poch(P, 2, 4, N, 1)
        .poch(M, 1, 2, N, 2)
        .bracket(aff(6, 0, 1), 1)
        .poch(P, 4, 4, N, -1)
        .poch(M, 4, 4, N, -2)
        .into_term()
}

/// `(-q^2;q^4)_inf^2/((1-q)(-q^4;q^4)_inf^2)`.
pub fn rhs_s4a() -> ProductSpec {
    let pre = RatFunc::new(Poly::one(), Poly::from_i64(&[1, -1])).expect("nonzero");
    ProductSpec::new(vec![inf(M, 2, 4, 2), inf(M, 4, 4, -2)]).with_prefactor(pre)
}

pub fn summand_s4b() -> TermExpr {
    TermAtom::new()
        .sign(N)
        .qpow(quad(3, 0, 0, 0, 0, 0))
        .poch(P, 1, 2, N, 1)
        .poch(M, 1, 2, N, 2)
        .bracket(aff(6, 0, 1), 1)
        .poch(P, 4, 4, N, -1)
        .poch(M, 4, 4, N, -2)
        .into_term()
}

/// `(q^3;q^4)_inf(q^5;q^4)_inf/(-q^4;q^4)_inf^2`.
pub fn rhs_s4b() -> ProductSpec {
    ProductSpec::new(vec![inf(P, 3, 4, 1), inf(P, 5, 4, 1), inf(M, 4, 4, -2)])
}

pub fn summand_slater() -> TermExpr {
    TermAtom::new()
        .qpow(quad(1, 0, 0, 0, 0, 0))
        .poch(P, 1, 2, N, 1)
        .poch(P, 4, 4, N, -1)
        .into_term()
}

/// `cn*n + c0` as a q-exponent.
fn lin(cn: i64, c0: i64) -> QuadExpr {
    quad(0, 0, 0, cn, 0, c0)
}

/// Stable identity names, in registry order.
pub const IDENTITY_NAMES: [&str; 10] = ["a1", "a11", "bauer_q", "q1", "q2", "q3", "q4", "s4a", "s4b", "slater"];

/// Look up a registered identity.
pub fn identity(name: &str) -> Result<IdentitySpec> {
    let spec = match name {
        "a1" => IdentitySpec::single("a1", summand_a1(), rhs_a1()),
        "a11" => IdentitySpec::single("a11", summand_a11(), rhs_a11()),
        "bauer_q" => IdentitySpec {
            name: "bauer_q",
            summand: summand_bauer_q(),
            rhs: vec![
                RhsCandidate {
                    label: "printed",
                    product: ProductSpec::new(vec![inf(P, 1, 2, 1), inf(P, 3, 2, 1), inf(P, 1, 2, -2)]),
                },
                RhsCandidate {
                    label: "den_q2_q2",
                    product: ProductSpec::new(vec![inf(P, 1, 2, 1), inf(P, 3, 2, 1), inf(P, 2, 2, -2)]),
                },
            ],
        },
        "q1" => IdentitySpec::single("q1", summand_q1(), rhs_a1()),
        "q2" => IdentitySpec::single("q2", summand_q2(), rhs_a1()),
        "q3" => IdentitySpec::single("q3", summand_q3(), rhs_a11()),
        "q4" => IdentitySpec::single("q4", summand_q4(), rhs_q4()),
        "s4a" => IdentitySpec::single("s4a", summand_s4a(), rhs_s4a()),
        "s4b" => IdentitySpec::single("s4b", summand_s4b(), rhs_s4b()),
        "slater" => IdentitySpec::single(
            "slater",
            summand_slater(),
            ProductSpec::new(vec![inf(P, 2, 4, 2), inf(P, 1, 2, -1)]),
        ),
        _ => return Err(Error::UnknownName(name.to_string())),
    };
    Ok(spec)
}

pub fn all_identities() -> Vec<IdentitySpec> {
    IDENTITY_NAMES.iter().map(|n| identity(n).expect("registered")).collect()
}

/// Indices `n >= 0` whose summand at fixed `k` can contribute below degree
/// `order + 1`.
///
/// Stops at the first `n` whose bound exceeds `order` and exceeds the previous
/// bound; every registered summand has a quadratic q-exponent with positive
/// leading coefficient, so the bound is increasing from there on.
pub fn contributing_indices(summand: &TermExpr, k: i64, order: usize, budget: usize) -> Result<Vec<i64>> {
    let mut out = Vec::new();
    if summand.is_zero() {
        return Ok(out);
    }
    let mut prev: Option<i64> = None;
    for n in 0..budget as i64 {
        let v = valuation_bound(summand, n, k)?;
        match v {
            Some(v) if v <= order as i64 => out.push(n),
            Some(v) => {
                if prev.is_some_and(|p| v > p) {
                    return Ok(out);
                }
            }
            None => {}
        }
        if v.is_some() {
            prev = v;
        }
    }
    Err(Error::NoConvergence { budget })
}

fn default_budget(order: usize) -> usize {
    4 * order + 64
}

/// `sum_{n >= 0} summand(n, 0)` through series order `order`.
pub fn truncated_sum(summand: &TermExpr, order: usize) -> Result<TruncSeries> {
    truncated_sum_at(summand, 0, order)
}

/// `sum_{n >= 0} summand(n, k)` through series order `order`.
pub fn truncated_sum_at(summand: &TermExpr, k: i64, order: usize) -> Result<TruncSeries> {
    let ns = contributing_indices(summand, k, order, default_budget(order))?;
    let parts = ns
        .par_iter()
        .map(|&n| eval_series(summand, n, k, order))
        .collect::<Result<Vec<_>>>()?;
    Ok(parts.iter().fold(TruncSeries::zero(order), |acc, s| &acc + s))
}

pub fn truncated_lhs(id: &IdentitySpec, order: usize) -> Result<TruncSeries> {
    truncated_sum(&id.summand, order)
}

/// First coefficient where two sides differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub degree: usize,
    pub lhs: Rational,
    pub rhs: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateOutcome {
    pub label: &'static str,
    pub first_mismatch: Option<Mismatch>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    pub name: &'static str,
    pub order: usize,
    /// Some candidate right-hand side agrees through `order`.
    pub pass: bool,
    /// Label of the first agreeing candidate.
    pub matched: Option<&'static str>,
    pub candidates: Vec<CandidateOutcome>,
}

pub fn compare_series(lhs: &TruncSeries, rhs: &TruncSeries) -> Option<Mismatch> {
    lhs.first_mismatch(rhs).map(|d| Mismatch {
        degree: d,
        lhs: lhs.coeff(d).clone(),
        rhs: rhs.coeff(d).clone(),
    })
}

pub fn verify_identity(id: &IdentitySpec, order: usize) -> Result<IdentityReport> {
    if order < 1 {
        return Err(Error::InvalidArgument("order must be at least 1".into()));
    }
    let lhs = truncated_lhs(id, order)?;
    let mut candidates = Vec::new();
    for c in &id.rhs {
        let rhs = product_spec_series(&c.product, order)?;
        candidates.push(CandidateOutcome {
            label: c.label,
            first_mismatch: compare_series(&lhs, &rhs),
        });
    }
    let matched = candidates.iter().find(|c| c.first_mismatch.is_none()).map(|c| c.label);
    Ok(IdentityReport {
        name: id.name,
        order,
        pass: matched.is_some(),
        matched,
        candidates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypterm::eval_ratfunc;
    use crate::qpoly::q_number;
    use crate::qseries::ratfunc_series;

    #[test]
    fn registry_names() {
        for name in IDENTITY_NAMES {
            assert_eq!(identity(name).unwrap().name, name);
        }
        assert_eq!(identity("nosuch"), Err(Error::UnknownName("nosuch".into())));
    }

    #[test]
    fn summand_examples() {
        let a1 = summand_a1();
        assert_eq!(eval_series(&a1, 0, 0, 5).unwrap(), TruncSeries::one(5));
        assert_eq!(eval_series(&a1, 1, 0, 1).unwrap(), TruncSeries::from_i64(&[0, 1], 1));
        assert_eq!(valuation_bound(&a1, 3, 0).unwrap(), Some(9));
        let q3 = summand_q3();
        assert!(eval_series(&q3, 1, 0, 3).unwrap().is_zero());
        assert_eq!(valuation_bound(&q3, 2, 0).unwrap(), Some(16));
        let q2 = summand_q2();
        assert_eq!(valuation_bound(&q2, 2, 0).unwrap(), Some(8));
        assert_eq!(valuation_bound(&TermExpr::from_atoms(vec![q2.atoms()[0].clone()]), 2, 0).unwrap(), Some(8));
    }

    #[test]
    fn small_truncations() {
        assert_eq!(truncated_lhs(&identity("a1").unwrap(), 0).unwrap(), TruncSeries::one(0));
        assert_eq!(truncated_lhs(&identity("slater").unwrap(), 0).unwrap(), TruncSeries::one(0));
        // n = 0 of (q3): [1] - q^3 [1]^2/[4]
        let expect = &RatFunc::one() - &(&RatFunc::q_power(3) * &q_number(4).recip().unwrap());
        assert_eq!(
            truncated_lhs(&identity("q3").unwrap(), 3).unwrap(),
            ratfunc_series(&expect, 3).unwrap()
        );
        assert_eq!(product_spec_series(&rhs_a11(), 0).unwrap(), TruncSeries::one(0));
        assert_eq!(product_spec_series(&rhs_a1(), 1).unwrap(), TruncSeries::from_i64(&[1, 1], 1));
    }

    #[test]
    fn identities_hold_to_moderate_order() {
        for id in all_identities() {
            let r = verify_identity(&id, 40).unwrap();
            assert!(r.pass, "{} failed: {:?}", id.name, r.candidates);
        }
    }

    #[test]
    fn bauer_candidates() {
        let r = verify_identity(&identity("bauer_q").unwrap(), 30).unwrap();
        assert_eq!(r.matched, Some("den_q2_q2"));
        let printed = r.candidates[0].first_mismatch.as_ref().unwrap();
        assert_eq!(printed.degree, 1);
    }

    #[test]
    fn monotone_refinement() {
        let id = identity("q2").unwrap();
        let big = truncated_lhs(&id, 30).unwrap();
        for m in [0, 1, 5, 17, 29] {
            assert_eq!(truncated_lhs(&id, m).unwrap(), big.truncate(m));
            assert!(verify_identity(&id, m.max(1)).unwrap().pass);
        }
    }

    #[test]
    fn mode_agreement_on_registered_summands() {
        for id in all_identities() {
            for n in 0..=6 {
                let f = eval_ratfunc(&id.summand, n, 0).unwrap();
                let s = eval_series(&id.summand, n, 0, 30).unwrap();
                assert_eq!(ratfunc_series(&f, 30).unwrap(), s, "{} at n = {n}", id.name);
                if let (Some(v), Some(b)) = (s.valuation(), id.valuation(n).unwrap()) {
                    assert!(v as i64 >= b);
                }
            }
        }
    }

    #[test]
    fn mutated_summand_fails() {
        let mut id = identity("a1").unwrap();
        id.summand = id.summand.times_qpow(quad(0, 0, 0, 1, 0, 0));
        let r = verify_identity(&id, 10).unwrap();
        assert!(!r.pass);
        assert_eq!(r.candidates[0].first_mismatch.as_ref().unwrap().degree, 1);
    }
}
