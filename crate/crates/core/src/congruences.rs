//! Truncated sums modulo cyclotomic moduli, and the classical
//! supercongruence modulo `p^3`.
//!
//! Congruences between rational functions are understood by localization:
//! `D ≡ 0 (mod M)` when the reduced denominator of `D` is coprime to `M` and
//! `M` divides its numerator. A negative power `q^{-(n-1)/2}` on the right
//! is cleared by multiplying both sides by `q^{(n-1)/2}`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactnum::{int, is_prime, kronecker_minus3, mod_prime_power_reduce, pochhammer_rational, rat, Rational};
use crate::hypterm::{AffExpr, Factored, FactoredSum, Subst, TermAtom, TermExpr};
use crate::identities::{summand_q4, summand_s4a, summand_s4b};
use crate::qpoly::{cyclotomic, divisors, Poly, RatFunc};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// `k <= (n-1)/2`
    Half,
    /// `k <= n-1`
    Full,
}

impl Variant {
    pub fn upper_bound(self, n: u64) -> u64 {
        match self {
            Variant::Half => (n - 1) / 2,
            Variant::Full => n - 1,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Half => "half",
            Variant::Full => "full",
        })
    }
}

/// Right-hand side of a q-congruence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CongruenceRhs {
    /// `q^{-(n-1)/2} [n] (-3/n)`
    BracketChi,
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModulusKind {
    /// `[n] Phi_n(q)^2`, for `n` coprime to 6.
    BracketPhiSquared,
    /// `[n]`, for odd `n`.
    Bracket,
}

#[derive(Clone, Debug)]
pub struct CongruenceSpec {
    pub name: &'static str,
    /// Summand in `k`.
    pub summand: TermExpr,
    pub variant: Variant,
    pub rhs: CongruenceRhs,
    pub modulus: ModulusKind,
}

pub const CONGRUENCE_NAMES: [&str; 7] = [
    "cong_q4_half",
    "cong_q4_full",
    "cong_s4a_half",
    "cong_s4a_full",
    "cong_s4b_half",
    "cong_s4b_full",
    "cong_classical",
];

/// Either a q-congruence or the classical supercongruence.
#[derive(Clone, Debug)]
pub enum Congruence {
    Q(CongruenceSpec),
    Classical,
}

const IN_K: Subst = Subst { n: AffExpr::K, k: AffExpr::K };

pub fn congruence(name: &str) -> Result<Congruence> {
    let (base, variant) = match name {
        "cong_classical" => return Ok(Congruence::Classical),
        _ => match name.rsplit_once('_') {
            Some((b, "half")) => (b, Variant::Half),
            Some((b, "full")) => (b, Variant::Full),
            _ => return Err(Error::UnknownName(name.to_string())),
        },
    };
    let (summand, rhs, modulus) = match base {
        "cong_q4" => (summand_q4(), CongruenceRhs::BracketChi, ModulusKind::BracketPhiSquared),
        "cong_s4a" => (summand_s4a(), CongruenceRhs::Zero, ModulusKind::Bracket),
        "cong_s4b" => (summand_s4b(), CongruenceRhs::Zero, ModulusKind::Bracket),
        _ => return Err(Error::UnknownName(name.to_string())),
    };
    let name = CONGRUENCE_NAMES.iter().find(|&&x| x == name).expect("listed");
    Ok(Congruence::Q(CongruenceSpec { name, summand: summand.subst(&IN_K), variant, rhs, modulus }))
}

impl CongruenceSpec {
    pub fn admissible(&self, n: u64) -> bool {
        match self.modulus {
            ModulusKind::BracketPhiSquared => n >= 1 && n.gcd(&6) == 1,
            ModulusKind::Bracket => n % 2 == 1,
        }
    }

    /// Default sweep: admissible `n` in `lo..=hi`.
    pub fn sweep(&self, lo: u64, hi: u64) -> Vec<u64> {
        (lo..=hi).filter(|&n| self.admissible(n)).collect()
    }

    /// `(P(q), e)` with the congruence reading `S ≡ q^{-e} P(q)`.
    pub fn rhs_poly(&self, n: u64) -> Result<(Poly, u64)> {
        match self.rhs {
            CongruenceRhs::Zero => Ok((Poly::zero(), 0)),
            CongruenceRhs::BracketChi => {
                let chi = kronecker_minus3(n)?;
                let p = Poly::from_coeffs(vec![int(chi as i64); n as usize]);
                Ok((p, (n - 1) / 2))
            }
        }
    }

    /// Cyclotomic exponents of the modulus.
    pub fn modulus_factors(&self, n: u64) -> BTreeMap<u64, i64> {
        let mut out: BTreeMap<u64, i64> = divisors(n).into_iter().filter(|&d| d > 1).map(|d| (d, 1)).collect();
        if self.modulus == ModulusKind::BracketPhiSquared && n > 1 {
            *out.get_mut(&n).expect("n divides n") += 2;
        }
        out
    }

    pub fn modulus_poly(&self, n: u64) -> Poly {
        self.modulus_factors(n)
            .into_iter()
            .fold(Poly::one(), |acc, (d, e)| (0..e).fold(acc, |a, _| &a * &cyclotomic(d)))
    }

    fn check_admissible(&self, n: u64) -> Result<()> {
        if self.admissible(n) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("{}: n = {n} is not admissible", self.name)))
        }
    }

    fn terms(&self, n: u64, shift: i64) -> Result<Vec<Factored>> {
        let ks: Vec<i64> = (0..=self.variant.upper_bound(n) as i64).collect();
        let parts = ks
            .par_iter()
            .map(|&k| Factored::of_term(&self.summand, n as i64, k))
            .collect::<Result<Vec<_>>>()?;
        Ok(parts
            .into_iter()
            .flatten()
            .map(|mut f| {
                f.qpow += shift;
                f
            })
            .collect())
    }
}

/// Exact truncated sum `sum_{k <= bound(n)} summand(k)`.
pub fn truncated_sum_ratfunc(cs: &CongruenceSpec, n: u64) -> Result<RatFunc> {
    cs.check_admissible(n)?;
    Ok(FactoredSum::new(&cs.terms(n, 0)?).to_ratfunc())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CongruenceOutcome {
    Pass,
    /// The reduced difference has `Phi_d` in its denominator.
    DenominatorNotCoprime { d: u64 },
    /// `Phi_d^e` divides the modulus but not the numerator.
    ModulusDivisionFails { d: u64, required: i64, found: i64 },
}

impl fmt::Display for CongruenceOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CongruenceOutcome::Pass => write!(f, "pass"),
            CongruenceOutcome::DenominatorNotCoprime { d } => {
                write!(f, "denominator not coprime to modulus (Phi_{d})")
            }
            CongruenceOutcome::ModulusDivisionFails { d, required, found } => {
                write!(f, "modulus-division fails: Phi_{d}^{required} needed, Phi_{d}^{found} found")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongruenceReport {
    pub name: String,
    pub n: u64,
    pub outcome: CongruenceOutcome,
}

impl CongruenceReport {
    pub fn pass(&self) -> bool {
        self.outcome == CongruenceOutcome::Pass
    }
}

/// Check `q^e S(q) - P(q) ≡ 0` modulo the spec's modulus.
pub fn check_q_congruence(cs: &CongruenceSpec, n: u64) -> Result<CongruenceReport> {
    cs.check_admissible(n)?;
    let (_, e) = cs.rhs_poly(n)?;
    let mut parts = cs.terms(n, e as i64)?;
    if cs.rhs == CongruenceRhs::BracketChi {
        let chi = kronecker_minus3(n)?;
        let atom = TermAtom::new()
            .coeff(int(-(chi as i64)))
            .bracket(AffExpr::constant(n as i64), 1);
        parts.extend(Factored::of_atom(&atom, 0, 0)?);
    }
    let delta = FactoredSum::new(&parts);
    let mut outcome = CongruenceOutcome::Pass;
    if !delta.is_zero() {
        let den = delta.den_cyclotomic();
        for (d, req) in cs.modulus_factors(n) {
            let dd = den.get(&d).copied().unwrap_or(0);
            let ord = delta.num_cyclotomic_order(d, dd + req);
            if ord < dd {
                outcome = CongruenceOutcome::DenominatorNotCoprime { d };
                break;
            }
            if ord - dd < req {
                outcome = CongruenceOutcome::ModulusDivisionFails { d, required: req, found: ord - dd };
                break;
            }
        }
    }
    Ok(CongruenceReport { name: cs.name.to_string(), n, outcome })
}

/// The right side at `q = 1` after clearing the q-power: `n (-3/n)`, or 0.
pub fn rhs_at_one(cs: &CongruenceSpec, n: u64) -> Result<Rational> {
    let (p, _) = cs.rhs_poly(n)?;
    Ok(p.eval(&Rational::one()))
}

/// `(1/4)_k (1/2)_k (3/4)_k / (k!^3 9^k) (8k+1)`.
pub fn classical_term(k: u32) -> Rational {
    let num = pochhammer_rational(&rat(1, 4), k) * pochhammer_rational(&rat(1, 2), k) * pochhammer_rational(&rat(3, 4), k);
    let fact = pochhammer_rational(&Rational::one(), k);
    let den = &fact * &fact * &fact * Rational::from_integer(num_traits::pow(BigInt::from(9), k as usize));
    num / den * int(8 * k as i64 + 1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalReport {
    pub p: u64,
    pub variant: Variant,
    /// Sum modulo `p^3`, in `[0, p^3)`.
    pub residue: BigInt,
    /// `p (-3/p)` modulo `p^3`.
    pub expected: BigInt,
}

impl ClassicalReport {
    pub fn pass(&self) -> bool {
        self.residue == self.expected
    }
}

/// Residue of the truncated classical sum modulo `p^3`.
pub fn classical_residue(p: u64, variant: Variant) -> Result<BigInt> {
    if !is_prime(p) || p <= 3 {
        return Err(Error::InvalidArgument(format!("expected a prime p > 3, got {p}")));
    }
    let mut sum = Rational::zero();
    for k in 0..=variant.upper_bound(p) as u32 {
        let t = classical_term(k);
        if (t.denom() % BigInt::from(p)).is_zero() {
            return Err(Error::NonPIntegral { p });
        }
        sum += t;
    }
    mod_prime_power_reduce(&sum, p, 3)
}

pub fn check_classical_supercongruence(p: u64, variant: Variant) -> Result<ClassicalReport> {
    let residue = classical_residue(p, variant)?;
    let chi = kronecker_minus3(p)?;
    let expected = mod_prime_power_reduce(&int(p as i64 * chi as i64), p, 3)?;
    Ok(ClassicalReport { p, variant, residue, expected })
}
