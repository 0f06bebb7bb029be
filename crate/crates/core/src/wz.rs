//! WZ pairs: exact grid verification of the telescoping relation, Guillera's
//! iteration, and conformance of iterates to known closed forms.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactnum::int;
use crate::hypterm::{aff, eval_ratfunc, quad, AffExpr, Factored, FactoredSum, QuadExpr, Subst, TermAtom, TermExpr};
use crate::identities::{compare_series, rhs_a1, rhs_a11, truncated_sum_at, Mismatch};
use crate::qpoly::{ratfunc_qinv_equal, Sign};
use crate::qseries::{product_spec_series, ProductSpec, TruncSeries};

use Sign::Plus as P;

/// Which form of the telescoping relation a pair satisfies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Convention {
    /// `F(n,k-1) - F(n,k) = G(n+1,k) - G(n,k)`.
    Shifted,
    /// `F(n,k+1) - F(n,k) = G(n+1,k) - G(n,k)`.
    Standard,
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Shifted => "shifted",
            Convention::Standard => "standard",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WZPair {
    pub f: TermExpr,
    pub g: TermExpr,
    pub convention: Convention,
}

impl WZPair {
    pub fn new(f: TermExpr, g: TermExpr, convention: Convention) -> Self {
        WZPair { f, g, convention }
    }

    pub fn zero(convention: Convention) -> Self {
        Self::new(TermExpr::zero(), TermExpr::zero(), convention)
    }

    /// `(F(n,-k), G(n,-k))`, which swaps the two conventions.
    pub fn tilde(&self) -> Self {
        let convention = match self.convention {
            Convention::Shifted => Convention::Standard,
            Convention::Standard => Convention::Shifted,
        };
        Self::new(self.f.tilde(), self.g.tilde(), convention)
    }
}

/// A pair in both conventions together with the closed forms of its iterates
/// and the common value of `sum_n F(n, 0)`.
#[derive(Clone, Debug)]
pub struct WZFamily {
    pub name: &'static str,
    pub shifted: WZPair,
    /// Standard pair written out explicitly (not derived from `shifted`).
    pub standard: WZPair,
    /// Closed forms of the second, third, ... iterates of `standard`.
    pub iterates: Vec<WZPair>,
    /// `sum_n F_1(n, 0)`, at `q` for the first family and at `1/q` for the second.
    pub constant: ProductSpec,
}

pub const FAMILY_NAMES: [&str; 2] = ["wz_q1_family", "wz_q3_family"];

pub fn wz_family(name: &str) -> Result<WZFamily> {
    match name {
        "wz_q1_family" => Ok(wz_q1_family()),
        "wz_q3_family" => Ok(wz_q3_family()),
        _ => Err(Error::UnknownName(name.to_string())),
    }
}

const N: AffExpr = AffExpr::N;

fn lin(cn: i64, ck: i64, c0: i64) -> QuadExpr {
    QuadExpr::from_aff(aff(cn, ck, c0))
}

/// Family whose `sum_n F(n, 0)` is the `(1+q)(q^2;q^4)...` product.
pub fn wz_q1_family() -> WZFamily {
    let f = TermAtom::new()
        .qpow(quad(1, -2, 1, 0, 0, 0))
        .bracket(aff(6, -2, 1), 1)
        .poch(P, 2, 4, N, 1)
        .poch(P, 1, 2, aff(1, -1, 0), 1)
        .poch(P, 1, 2, aff(1, 1, 0), 1)
        .poch(P, 4, 4, N, -2)
        .poch(P, 4, 4, aff(1, -1, 0), -1)
        .poch(P, 2, 4, AffExpr::K, -1)
        .into_term();
    let g = TermAtom::new()
        .qpow(quad(1, -2, 1, 0, 0, 0))
        .poch(P, 2, 4, N, 1)
        .poch(P, 1, 2, aff(1, -1, 0), 1)
        .poch(P, 1, 2, aff(1, 1, -1), 1)
        .unit(P, aff(0, 0, 1), -1)
        .poch(P, 4, 4, aff(1, 0, -1), -2)
        .poch(P, 4, 4, aff(1, -1, 0), -1)
        .poch(P, 2, 4, AffExpr::K, -1)
        .into_term();

    let f1 = TermAtom::new()
        .sign(AffExpr::K)
        .qpow(quad(1, 2, -1, 0, 0, 0))
        .bracket(aff(6, 2, 1), 1)
        .poch(P, 2, 4, N, 1)
        .poch(P, 1, 2, aff(1, 1, 0), 1)
        .poch(P, 1, 2, aff(1, -1, 0), 1)
        .poch(P, 2, 4, AffExpr::K, 1)
        .poch(P, 4, 4, N, -2)
        .poch(P, 4, 4, aff(1, 1, 0), -1)
        .into_term();
    let g1 = TermAtom::new()
        .sign(AffExpr::K)
        .qpow(quad(1, 2, -1, 0, 0, 0))
        .poch(P, 2, 4, N, 1)
        .poch(P, 1, 2, aff(1, 1, 0), 1)
        .poch(P, 1, 2, aff(1, -1, -1), 1)
        .poch(P, 2, 4, AffExpr::K, 1)
        .unit(P, aff(0, 0, 1), -1)
        .poch(P, 4, 4, aff(1, 0, -1), -2)
        .poch(P, 4, 4, aff(1, 1, 0), -1)
        .into_term();

    let pre2 = TermAtom::new()
        .sign(N)
        .qpow(quad(2, 0, 0, 0, 0, 0))
        .poch(P, 2, 4, N, 1)
        .poch(P, 1, 2, aff(2, 1, 0), 1)
        .poch(P, 2, 4, aff(1, 1, 0), 1)
        .poch(P, 4, 4, N, -2)
        .poch(P, 4, 4, aff(2, 1, 0), -1)
        .poch(P, 1, 2, AffExpr::K, -1);
    let f2 = TermExpr::from_atoms(vec![
        pre2.clone().bracket(aff(8, 2, 1), 1),
        pre2.qpow(lin(4, 2, 1))
            .unit(P, aff(4, 0, 2), 1)
            .unit(P, aff(4, 2, 1), 1)
            .unit(P, aff(0, 0, 1), -1)
            .unit(P, aff(8, 4, 4), -1),
    ]);
    let g2 = TermAtom::new()
        .sign(aff(1, 0, -1))
        .qpow(quad(2, 0, 0, 0, 2, 1))
        .poch(P, 2, 4, N, 1)
        .poch(P, 1, 2, aff(2, 1, 0), 1)
        .poch(P, 2, 4, aff(1, 1, 0), 1)
        .unit(P, aff(0, 0, 1), -1)
        .poch(P, 4, 4, aff(1, 0, -1), -2)
        .poch(P, 4, 4, aff(2, 1, 0), -1)
        .poch(P, 1, 2, aff(0, 1, 1), -1)
        .into_term();

    let pre3 = TermAtom::new()
        .sign(N)
        .qpow(quad(2, 0, 0, 0, 0, 0))
        .poch(P, 2, 4, N, 1)
        .poch(P, 1, 2, aff(3, 1, 0), 1)
        .poch(P, 2, 4, aff(2, 1, 0), 1)
        .poch(P, 4, 4, N, -2)
        .poch(P, 4, 4, aff(3, 1, 0), -1)
        .poch(P, 1, 2, aff(1, 1, 0), -1);
    let f3 = TermExpr::from_atoms(vec![
        pre3.clone().bracket(aff(10, 2, 1), 1),
        pre3.clone()
            .qpow(lin(6, 2, 1))
            .unit(P, aff(4, 0, 2), 1)
            .unit(P, aff(6, 2, 1), 1)
            .unit(P, aff(0, 0, 1), -1)
            .unit(P, aff(12, 4, 4), -1),
        pre3.qpow(lin(6, 2, 3))
            .unit(P, aff(4, 0, 2), 1)
            .unit(P, aff(6, 2, 1), 1)
            .unit(P, aff(6, 2, 3), 1)
            .unit(P, aff(8, 4, 2), 1)
            .unit(P, aff(0, 0, 1), -1)
            .unit(P, aff(12, 4, 4), -1)
            .unit(P, aff(12, 4, 8), -1)
            .unit(P, aff(2, 2, 1), -1),
    ]);
    let g3 = TermAtom::new()
        .sign(aff(1, 0, -1))
        .qpow(quad(2, 0, 0, 2, 2, 1))
        .poch(P, 2, 4, N, 1)
        .poch(P, 1, 2, aff(3, 1, 0), 1)
        .poch(P, 2, 4, aff(2, 1, 0), 1)
        .unit(P, aff(0, 0, 1), -1)
        .poch(P, 4, 4, aff(1, 0, -1), -2)
        .poch(P, 4, 4, aff(3, 1, 0), -1)
        .poch(P, 1, 2, aff(1, 1, 1), -1)
        .into_term();

    WZFamily {
        name: "wz_q1_family",
        shifted: WZPair::new(f, g, Convention::Shifted),
        standard: WZPair::new(f1, g1, Convention::Standard),
        iterates: vec![
            WZPair::new(f2, g2, Convention::Standard),
            WZPair::new(f3, g3, Convention::Standard),
        ],
        constant: rhs_a1(),
    }
}

/// Family behind the alternating identity and its `q -> 1/q` companion.
pub fn wz_q3_family() -> WZFamily {
    let f1 = TermAtom::new()
        .sign(aff(1, 1, 0))
        .bracket(aff(6, 2, 1), 1)
        .poch(P, 1, 2, aff(1, -1, 0), 1)
        .poch(P, 1, 2, aff(1, 1, 0), 2)
        .poch(P, 4, 4, N, -2)
        .poch(P, 4, 4, aff(1, 1, 0), -1)
        .into_term();
    let g1 = TermAtom::new()
        .sign(aff(1, 1, 0))
        .poch(P, 1, 2, aff(1, -1, -1), 1)
        .poch(P, 1, 2, aff(1, 1, 0), 2)
        .unit(P, aff(0, 0, 1), -1)
        .poch(P, 4, 4, aff(1, 0, -1), -2)
        .poch(P, 4, 4, aff(1, 1, 0), -1)
        .into_term();

    let pre2 = TermAtom::new()
        .qpow(quad(0, 0, 1, 0, 0, 0))
        .poch(P, 1, 2, aff(2, 1, 0), 2)
        .poch(P, 4, 4, N, -2)
        .poch(P, 4, 4, aff(2, 1, 0), -1)
        .poch(P, 1, 2, AffExpr::K, -1);
    let f2 = TermExpr::from_atoms(vec![
        pre2.clone().bracket(aff(8, 2, 1), 1),
        pre2.coeff(int(-1)).bracket(aff(4, 2, 1), 2).bracket(aff(8, 4, 4), -1),
    ]);
    let g2 = TermAtom::new()
        .coeff(int(-1))
        .qpow(quad(0, 0, 1, 0, 2, 1))
        .poch(P, 1, 2, aff(2, 1, 0), 2)
        .unit(P, aff(0, 0, 1), -1)
        .poch(P, 4, 4, aff(1, 0, -1), -2)
        .poch(P, 4, 4, aff(2, 1, 0), -1)
        .poch(P, 1, 2, aff(0, 1, 1), -1)
        .into_term();

    let standard = WZPair::new(f1, g1, Convention::Standard);
    WZFamily {
        name: "wz_q3_family",
        shifted: standard.tilde(),
        standard,
        iterates: vec![WZPair::new(f2, g2, Convention::Standard)],
        constant: rhs_a11(),
    }
}

/// Outcome of a per-cell exact check over a grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridReport {
    pub pass: bool,
    pub cells: usize,
    /// Smallest failing cell in `(n, k)` order.
    pub first_failure: Option<(i64, i64)>,
}

/// Run `cell` over `[0, n_max] x [k_min, k_max]` in parallel.
fn grid_check<F>(n_max: i64, k_min: i64, k_max: i64, cell: F) -> Result<GridReport>
where
    F: Fn(i64, i64) -> Result<bool> + Sync,
{
    let cells: Vec<(i64, i64)> = (0..=n_max)
        .flat_map(|n| (k_min..=k_max).map(move |k| (n, k)))
        .collect();
    let results = cells
        .par_iter()
        .map(|&(n, k)| cell(n, k).map(|ok| (n, k, ok)))
        .collect::<Result<Vec<_>>>()?;
    let first_failure = results.iter().find(|r| !r.2).map(|r| (r.0, r.1));
    Ok(GridReport {
        pass: first_failure.is_none(),
        cells: cells.len(),
        first_failure,
    })
}

/// Whether `sum sign_i * t_i(n_i, k_i)` vanishes identically.
fn signed_sum_is_zero(parts: &[(i64, &TermExpr, i64, i64)]) -> Result<bool> {
    let mut all = Vec::new();
    for &(sign, t, n, k) in parts {
        for f in Factored::of_term(t, n, k)? {
            all.push(if sign < 0 { f.neg() } else { f });
        }
    }
    Ok(FactoredSum::new(&all).is_zero())
}

/// Check the pair's telescoping relation at every grid cell.
pub fn check_relation(p: &WZPair, n_max: i64, k_min: i64, k_max: i64) -> Result<GridReport> {
    let dk = match p.convention {
        Convention::Shifted => -1,
        Convention::Standard => 1,
    };
    grid_check(n_max, k_min, k_max, |n, k| {
        let (f, g) = (&p.f, &p.g);
        signed_sum_is_zero(&[(1, f, n, k + dk), (-1, f, n, k), (-1, g, n + 1, k), (1, g, n, k)])
    })
}

/// `F'(n,k) = F(n,n+k) + G(n+1,n+k)`, `G'(n,k) = G(n,n+k)`.
pub fn guillera_iterate(p: &WZPair) -> Result<WZPair> {
    if p.convention != Convention::Standard {
        return Err(Error::InvalidArgument("iteration needs a pair in standard form".into()));
    }
    let diag = Subst { n: N, k: aff(1, 1, 0) };
    let shifted = Subst { n: aff(1, 0, 1), k: aff(1, 1, 0) };
    Ok(WZPair::new(
        &p.f.subst(&diag) + &p.g.subst(&shifted),
        p.g.subst(&diag),
        Convention::Standard,
    ))
}

/// Extensional equality of two terms on a grid.
pub fn check_terms_equal(a: &TermExpr, b: &TermExpr, n_max: i64, k_min: i64, k_max: i64) -> Result<GridReport> {
    grid_check(n_max, k_min, k_max, |n, k| signed_sum_is_zero(&[(1, a, n, k), (-1, b, n, k)]))
}

/// Extensional equality of both components of two pairs.
pub fn check_pair_conformance(a: &WZPair, b: &WZPair, n_max: i64, k_max: i64) -> Result<GridReport> {
    let rf = check_terms_equal(&a.f, &b.f, n_max, 0, k_max)?;
    if !rf.pass {
        return Ok(rf);
    }
    let rg = check_terms_equal(&a.g, &b.g, n_max, 0, k_max)?;
    Ok(GridReport { cells: rf.cells + rg.cells, ..rg })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialSumReport {
    pub m: i64,
    /// `sum_{n<m} F(n,0) = sum_{k=1}^{m} G(m,k)`.
    pub direct: bool,
    /// The same with the right side re-indexed by `k -> m - k`.
    pub reindexed: bool,
}

impl PartialSumReport {
    pub fn pass(&self) -> bool {
        self.direct && self.reindexed
    }
}

/// Right side after `k -> m - k`, with `n` standing for `m`.
pub fn reindexed_partial_sum_term() -> TermExpr {
    TermAtom::new()
        .qpow(quad(0, 0, 1, 0, 0, 0))
        .poch(P, 2, 4, N, 1)
        .unit(P, aff(0, 0, 1), -1)
        .poch(P, 4, 4, aff(1, 0, -1), -2)
        .poch(P, 1, 2, AffExpr::K, 1)
        .poch(P, 1, 2, aff(2, -1, -1), 1)
        .poch(P, 4, 4, AffExpr::K, -1)
        .poch(P, 2, 4, aff(1, -1, 0), -1)
        .into_term()
}

/// Telescoped partial sums of a shifted pair: `sum_{n<m} F(n,0)` against
/// `sum_{k=1}^m G(m,k)`, and against the re-indexed form when provided.
pub fn check_partial_sum(p: &WZPair, reindexed: Option<&TermExpr>, m: i64) -> Result<PartialSumReport> {
    if m < 1 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    if p.convention != Convention::Shifted {
        return Err(Error::InvalidArgument("partial sums use the shifted form".into()));
    }
    let mut lhs = Vec::new();
    for n in 0..m {
        lhs.extend(Factored::of_term(&p.f, n, 0)?);
    }
    let mut direct = lhs.clone();
    for k in 1..=m {
        direct.extend(Factored::of_term(&p.g, m, k)?.into_iter().map(Factored::neg));
    }
    let reindexed_ok = match reindexed {
        Some(t) => {
            let mut parts = lhs;
            for k in 0..m {
                parts.extend(Factored::of_term(t, m, k)?.into_iter().map(Factored::neg));
            }
            FactoredSum::new(&parts).is_zero()
        }
        None => true,
    };
    Ok(PartialSumReport {
        m,
        direct: FactoredSum::new(&direct).is_zero(),
        reindexed: reindexed_ok,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KIndependence {
    pub k: i64,
    pub first_mismatch: Option<Mismatch>,
}

/// `sum_n F(n, k) = C` through `order` for each `k`.
pub fn check_k_independence(f: &TermExpr, c: &ProductSpec, ks: &[i64], order: usize) -> Result<Vec<KIndependence>> {
    let rhs = product_spec_series(c, order)?;
    ks.par_iter()
        .map(|&k| {
            let lhs = truncated_sum_at(f, k, order)?;
            Ok(KIndependence { k, first_mismatch: compare_series(&lhs, &rhs) })
        })
        .collect()
}

/// `sum_n F_i(n, 0)` for each term, with the first disagreement against the
/// first term's sum.
pub fn check_sum_invariance(terms: &[TermExpr], order: usize) -> Result<(Vec<TruncSeries>, Option<(usize, Mismatch)>)> {
    let sums = terms
        .par_iter()
        .map(|t| truncated_sum_at(t, 0, order))
        .collect::<Result<Vec<_>>>()?;
    let bad = sums
        .iter()
        .enumerate()
        .skip(1)
        .find_map(|(i, s)| compare_series(&sums[0], s).map(|m| (i, m)));
    Ok((sums, bad))
}

/// `a(n, 0; 1/q) = b(n, 0; q)` for `0 <= n <= n_max`.
pub fn check_qinv_chain(a: &TermExpr, b: &TermExpr, n_max: i64) -> Result<GridReport> {
    grid_check(n_max, 0, 0, |n, k| {
        Ok(ratfunc_qinv_equal(&eval_ratfunc(a, n, k)?, &eval_ratfunc(b, n, k)?))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypterm::{eval_ratfunc, TermAtom};
    use crate::identities::{summand_a1, summand_q1, summand_q2, summand_q3};
    use crate::qpoly::{q_number, RatFunc};

    #[test]
    fn corner_values() {
        let fam = wz_q1_family();
        assert_eq!(eval_ratfunc(&fam.shifted.f, 0, 0).unwrap(), RatFunc::one());
        assert_eq!(eval_ratfunc(&fam.shifted.f, 0, 1).unwrap(), RatFunc::zero());
        let br = TermAtom::new().bracket(aff(6, 0, 1), 1).into_term();
        assert_eq!(eval_ratfunc(&br, 1, 0).unwrap(), q_number(7));
    }

    #[test]
    fn relations_small_grid() {
        for fam in [wz_q1_family(), wz_q3_family()] {
            assert!(check_relation(&fam.shifted, 5, -5, 5).unwrap().pass, "{}", fam.name);
            assert!(check_relation(&fam.standard, 5, 0, 5).unwrap().pass, "{}", fam.name);
            for it in &fam.iterates {
                assert!(check_relation(it, 4, 0, 4).unwrap().pass, "{}", fam.name);
            }
        }
        assert!(check_relation(&WZPair::zero(Convention::Standard), 3, 0, 3).unwrap().pass);
    }

    #[test]
    fn tilde_matches_explicit_standard_form() {
        let fam = wz_q1_family();
        assert!(check_pair_conformance(&fam.shifted.tilde(), &fam.standard, 6, 6).unwrap().pass);
    }

    #[test]
    fn iteration_conformance() {
        for fam in [wz_q1_family(), wz_q3_family()] {
            let mut cur = fam.standard.clone();
            for explicit in &fam.iterates {
                cur = guillera_iterate(&cur).unwrap();
                assert!(check_pair_conformance(&cur, explicit, 4, 4).unwrap().pass, "{}", fam.name);
            }
        }
        let z = guillera_iterate(&WZPair::zero(Convention::Standard)).unwrap();
        assert!(z.f.is_zero() && z.g.is_zero());
        assert!(guillera_iterate(&wz_q1_family().shifted).is_err());
    }

    #[test]
    fn mutation_is_detected() {
        let fam = wz_q1_family();
        let mut bad = fam.shifted.clone();
        bad.g = bad.g.times_qpow(quad(0, 0, 0, 0, 0, 1));
        let r = check_relation(&bad, 3, -3, 3).unwrap();
        assert!(!r.pass);
        assert!(r.first_failure.is_some());
    }

    #[test]
    fn partial_sums() {
        let fam = wz_q1_family();
        let re = reindexed_partial_sum_term();
        for m in 1..=5 {
            assert!(check_partial_sum(&fam.shifted, Some(&re), m).unwrap().pass(), "m = {m}");
        }
        let mut bad = fam.shifted.clone();
        bad.f = bad.f.scale(&int(2));
        assert!(!check_partial_sum(&bad, Some(&re), 1).unwrap().pass());
    }

    #[test]
    fn summands_are_family_members() {
        let fam = wz_q1_family();
        assert!(check_terms_equal(&fam.standard.f, &summand_a1(), 8, 0, 0).unwrap().pass);
        assert!(check_terms_equal(&fam.iterates[0].f, &summand_q1(), 8, 0, 0).unwrap().pass);
        assert!(check_terms_equal(&fam.iterates[1].f, &summand_q2(), 8, 0, 0).unwrap().pass);
        let f2 = &wz_q3_family().iterates[0].f;
        assert!(check_qinv_chain(f2, &summand_q3(), 4).unwrap().pass);
        assert!(!check_qinv_chain(&summand_q3(), &summand_q3(), 2).unwrap().pass);
    }

    #[test]
    fn k_independence_small() {
        let fam = wz_q1_family();
        let r = check_k_independence(&fam.standard.f, &fam.constant, &[0, 1, 2], 20).unwrap();
        assert!(r.iter().all(|x| x.first_mismatch.is_none()), "{r:?}");
        for k in 0..3 {
            assert!(truncated_sum_at(&TermExpr::zero(), k, 5).unwrap().is_zero());
        }
    }
}
