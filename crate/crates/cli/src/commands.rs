//! Command execution. Unknown names are usage errors; everything else is
//! reported per record.

use rayon::prelude::*;
use serde_json::{json, Value};

use qpi_core::congruences::{self, check_classical_supercongruence, check_q_congruence, Congruence, Variant};
use qpi_core::exactnum::Rational;
use qpi_core::identities::{self, identity, truncated_lhs, verify_identity, IDENTITY_NAMES};
use qpi_core::numerics::{self, below_pow10, classical_pi_series, eval_identity_numeric, to_decimal, FloatCtx};
use qpi_core::qseries::TruncSeries;
use qpi_core::transforms::{self, both_sides_for, ParamSpec};
use qpi_core::wz::{self, check_pair_conformance, check_qinv_chain, check_relation, check_sum_invariance, guillera_iterate, GridReport};
use qpi_core::Error;
use num_traits::{One, Signed, Zero};

use crate::report::Record;
use crate::{Command, Eval, Limit, Verify};

type Usage = String;

fn expand(name: &str, all: &[&'static str]) -> Result<Vec<&'static str>, Usage> {
    if name == "all" {
        return Ok(all.to_vec());
    }
    all.iter()
        .find(|&&x| x == name)
        .map(|&x| vec![x])
        .ok_or_else(|| format!("unknown name `{name}`; expected one of: all, {}", all.join(", ")))
}

pub fn run(cmd: &Command) -> Result<Vec<Record>, Usage> {
    match cmd {
        Command::Verify(v) => match v {
            Verify::Identity { name, order } => verify_identities(&expand(name, &IDENTITY_NAMES)?, *order),
            Verify::Wz { family, nmax, kmin, kmax } => {
                verify_wz(&expand(family, &wz::FAMILY_NAMES)?, *nmax, *kmin, *kmax)
            }
            Verify::Iterate { family, depth, order } => verify_iterate(&expand(family, &wz::FAMILY_NAMES)?, *depth, *order),
            Verify::Transform(t) => verify_transform(&t.kind, t.battery, t.spec.as_deref(), t.order),
            Verify::Congruence { name, n_list, n_max } => {
                verify_congruence(&expand(name, &congruences::CONGRUENCE_NAMES)?, n_list.as_deref(), *n_max)
            }
        },
        Command::Eval(Eval::Numeric { name, q, prec_bits, terms, tol_exp }) => {
            eval_numeric(&expand(name, &IDENTITY_NAMES)?, q, *prec_bits, *terms, *tol_exp)
        }
        Command::Limit(Limit::Pi { name, prec_bits, terms }) => {
            limit_pi(&expand(name, &numerics::PI_SERIES_NAMES)?, *prec_bits, *terms)
        }
    }
}

fn mismatch_json(m: &identities::Mismatch) -> Value {
    json!({ "degree": m.degree, "lhs": m.lhs.to_string(), "rhs": m.rhs.to_string() })
}

fn series_mismatch(a: &TruncSeries, b: &TruncSeries) -> Option<Value> {
    identities::compare_series(a, b).map(|m| mismatch_json(&m))
}

fn grid_json(g: &GridReport) -> Value {
    json!({ "cells": g.cells, "first_failure": g.first_failure.map(|(n, k)| json!({"n": n, "k": k})) })
}

fn verify_identities(names: &[&'static str], order: usize) -> Result<Vec<Record>, Usage> {
    if order < 1 {
        return Err("--order must be at least 1".into());
    }
    Ok(names
        .par_iter()
        .map(|&name| {
            let rec = Record::new(name).param("order", order);
            match identity(name).and_then(|id| verify_identity(&id, order)) {
                Ok(r) => {
                    let cands: Vec<Value> = r
                        .candidates
                        .iter()
                        .map(|c| json!({ "label": c.label, "first_mismatch": c.first_mismatch.as_ref().map(mismatch_json) }))
                        .collect();
                    rec.verdict(r.pass).witness(json!({ "matched": r.matched, "candidates": cands }))
                }
                Err(e) => Record::error(name, e).param("order", order),
            }
        })
        .collect())
}

fn verify_wz(families: &[&'static str], nmax: i64, kmin: i64, kmax: i64) -> Result<Vec<Record>, Usage> {
    if nmax < 0 || kmin > kmax {
        return Err("empty grid".into());
    }
    let mut out = Vec::new();
    for &name in families {
        let fam = wz::wz_family(name).map_err(|e| e.to_string())?;
        for (label, pair, lo) in [("shifted", &fam.shifted, kmin), ("standard", &fam.standard, kmin.max(0))] {
            let rec = Record::new(format!("{name}/{label}"))
                .param("nmax", nmax)
                .param("kmin", lo)
                .param("kmax", kmax);
            out.push(match check_relation(pair, nmax, lo, kmax) {
                Ok(g) => rec.verdict(g.pass).witness(grid_json(&g)),
                Err(e) => rec.message(e.to_string()).verdict(false),
            });
        }
    }
    Ok(out)
}

fn verify_iterate(families: &[&'static str], depth: u8, order: usize) -> Result<Vec<Record>, Usage> {
    let mut out = Vec::new();
    for &name in families {
        let fam = wz::wz_family(name).map_err(|e| e.to_string())?;
        let Some(explicit) = fam.iterates.get(depth as usize - 1) else {
            return Err(format!("{name} has no closed form at depth {depth}"));
        };
        let mut cur = fam.standard.clone();
        let mut err = None;
        for _ in 0..depth {
            match guillera_iterate(&cur) {
                Ok(p) => cur = p,
                Err(e) => err = Some(e),
            }
        }
        let base = format!("{name}/depth{depth}");
        if let Some(e) = err {
            out.push(Record::error(base, e));
            continue;
        }
        let grid = |r: std::result::Result<GridReport, Error>, rec: Record| match r {
            Ok(g) => rec.verdict(g.pass).witness(grid_json(&g)),
            Err(e) => Record { status: crate::report::Status::Error, message: Some(e.to_string()), ..rec },
        };
        out.push(grid(
            check_pair_conformance(&cur, explicit, 6, 6),
            Record::new(format!("{base}/conformance")).param("nmax", 6).param("kmax", 6),
        ));
        out.push(grid(
            check_relation(&cur, 6, 0, 6),
            Record::new(format!("{base}/relation")).param("nmax", 6).param("kmax", 6),
        ));
        if name == "wz_q3_family" {
            // the constant of this family lives at 1/q
            let target = identity("q3").map_err(|e| e.to_string())?.summand;
            out.push(grid(
                check_qinv_chain(&cur.f, &target, 10),
                Record::new(format!("{base}/qinv_chain")).param("nmax", 10),
            ));
        } else {
            let rec = Record::new(format!("{base}/sum_invariance")).param("order", order);
            out.push(match check_sum_invariance(&[fam.standard.f.clone(), cur.f.clone()], order) {
                Ok((_, bad)) => match bad {
                    None => rec.verdict(true),
                    Some((_, m)) => rec.verdict(false).witness(mismatch_json(&m)),
                },
                Err(e) => Record::error(format!("{base}/sum_invariance"), e),
            });
        }
    }
    Ok(out)
}

fn transform_record(spec: &ParamSpec, reproduces: Option<&'static str>, order: usize) -> Record {
    let name = match reproduces {
        Some(id) => format!("{}/{id}", spec.kind()),
        None => format!("{}/{spec}", spec.kind()),
    };
    let mut rec = Record::new(name).param("spec", spec.to_string()).param("order", order);
    if let Some(id) = reproduces {
        rec = rec.param("reproduces", id);
    }
    let sides = match both_sides_for(spec, order) {
        Ok(s) => s,
        Err(e) => return Record { status: crate::report::Status::Error, message: Some(e.to_string()), ..rec },
    };
    let mut witness = json!({ "shift": sides.shift, "first_mismatch": series_mismatch(&sides.lhs, &sides.rhs) });
    let mut pass = witness["first_mismatch"].is_null();
    if let Some(id) = reproduces {
        let m = identity(id).and_then(|i| truncated_lhs(&i, order)).map(|l| series_mismatch(&sides.lhs, &l));
        match m {
            Ok(m) => {
                pass &= m.is_none() && sides.shift == 0;
                witness["identity_mismatch"] = m.unwrap_or(Value::Null);
            }
            Err(e) => return Record { status: crate::report::Status::Error, message: Some(e.to_string()), ..rec },
        }
    }
    rec.verdict(pass).witness(witness)
}

fn verify_transform(kind: &str, battery: bool, spec: Option<&str>, order: usize) -> Result<Vec<Record>, Usage> {
    if !transforms::TRANSFORM_NAMES.contains(&kind) {
        return Err(format!("unknown transformation `{kind}`; expected quadratic or cubic"));
    }
    let mut jobs: Vec<(ParamSpec, Option<&'static str>)> = Vec::new();
    if battery {
        jobs.extend(
            transforms::known_specializations()
                .into_iter()
                .filter(|(_, s)| s.kind() == kind)
                .map(|(id, s)| (s, Some(id))),
        );
        jobs.extend(transforms::battery(kind).map_err(|e| e.to_string())?.into_iter().map(|s| (s, None)));
    } else if let Some(text) = spec {
        match ParamSpec::parse(kind, text) {
            Ok(s) => jobs.push((s, None)),
            Err(e @ Error::IllPosed(_)) => return Ok(vec![Record::error(format!("{kind}/{text}"), e)]),
            Err(e) => return Err(e.to_string()),
        }
    }
    Ok(jobs.par_iter().map(|(s, id)| transform_record(s, *id, order)).collect())
}

fn verify_congruence(names: &[&'static str], n_list: Option<&[u64]>, n_max: u64) -> Result<Vec<Record>, Usage> {
    let mut jobs: Vec<(&'static str, Congruence, u64)> = Vec::new();
    for &name in names {
        let c = congruences::congruence(name).map_err(|e| e.to_string())?;
        let ns: Vec<u64> = match (&c, n_list) {
            (_, Some(l)) => l.to_vec(),
            (Congruence::Q(s), None) => s.sweep(1, n_max),
            (Congruence::Classical, None) => (5..=n_max).filter(|&p| qpi_core::exactnum::is_prime(p)).collect(),
        };
        jobs.extend(ns.into_iter().map(|n| (name, c.clone(), n)));
    }
    Ok(jobs
        .par_iter()
        .map(|(name, c, n)| match c {
            Congruence::Q(s) => {
                let rec = Record::new(format!("{name}/n={n}")).param("n", *n);
                match check_q_congruence(s, *n) {
                    Ok(r) => {
                        let w = json!({ "outcome": r.outcome.to_string() });
                        rec.verdict(r.pass()).witness(w)
                    }
                    Err(e) => Record::error(format!("{name}/n={n}"), e).param("n", *n),
                }
            }
            Congruence::Classical => {
                let rec = Record::new(format!("{name}/p={n}")).param("p", *n);
                let both = check_classical_supercongruence(*n, Variant::Half)
                    .and_then(|h| Ok((h, check_classical_supercongruence(*n, Variant::Full)?)));
                match both {
                    Ok((h, f)) => rec.verdict(h.pass() && f.pass()).witness(json!({
                        "modulus": format!("{n}^3"),
                        "expected": h.expected.to_string(),
                        "half": h.residue.to_string(),
                        "full": f.residue.to_string(),
                    })),
                    Err(e) => Record::error(format!("{name}/p={n}"), e).param("p", *n),
                }
            }
        })
        .collect())
}

fn parse_rational(s: &str) -> Result<Rational, Usage> {
    s.trim().parse::<Rational>().map_err(|_| format!("cannot parse `{s}` as a rational number"))
}

fn eval_numeric(names: &[&'static str], q: &str, prec: usize, terms: usize, tol_exp: i64) -> Result<Vec<Record>, Usage> {
    let q = parse_rational(q)?;
    if q.is_zero() || q.abs() >= Rational::one() {
        return Err(format!("--q {q} must satisfy 0 < |q| < 1"));
    }
    let ctx = FloatCtx::new(prec, terms);
    Ok(names
        .par_iter()
        .map(|&name| {
            let rec = Record::new(name)
                .param("q", q.to_string())
                .param("prec_bits", prec)
                .param("tolerance", format!("1e{tol_exp}"));
            match identity(name).and_then(|id| eval_identity_numeric(&id, &q, &ctx)) {
                Ok(r) => {
                    let cands: Vec<Value> = r
                        .candidates
                        .iter()
                        .map(|c| json!({ "label": c.label, "rhs": to_decimal(&c.rhs, 40), "gap": to_decimal(&c.gap, 3) }))
                        .collect();
                    let best = r.best();
                    rec.verdict(below_pow10(&best.gap, tol_exp, prec)).witness(json!({
                        "lhs": to_decimal(&r.lhs, 40),
                        "terms": r.terms,
                        "best": best.label,
                        "candidates": cands,
                    }))
                }
                Err(e) => Record { status: crate::report::Status::Error, message: Some(e.to_string()), ..rec },
            }
        })
        .collect())
}

fn limit_pi(names: &[&'static str], prec: usize, terms: Option<usize>) -> Result<Vec<Record>, Usage> {
    Ok(names
        .par_iter()
        .map(|&name| {
            let cap = terms.unwrap_or_else(|| numerics::default_terms(name));
            let tol = numerics::pi_tolerance_exp(name);
            let rec = Record::new(name)
                .param("prec_bits", prec)
                .param("terms", cap)
                .param("tolerance", format!("1e{tol}"));
            match classical_pi_series(name, &FloatCtx::new(prec, cap)) {
                Ok(r) => rec.verdict(below_pow10(&r.gap, tol, prec)).witness(json!({
                    "method": r.method.to_string(),
                    "terms_used": r.terms,
                    "value": to_decimal(&r.value, 50),
                    "reference": to_decimal(&r.reference, 50),
                    "gap": to_decimal(&r.gap, 3),
                })),
                Err(e) => Record { status: crate::report::Status::Error, message: Some(e.to_string()), ..rec },
            }
        })
        .collect())
}
