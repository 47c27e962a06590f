//! Oracle sets over numeral windows, and the witness-constant file.
//!
//! The decidable proxy for "the oracle answers true/false on n" is
//! membership of fixed witness elements: `t*` lies in the denotation of
//! `true` but not of `false`, and `f*` the other way around. The witness
//! file also records, per numeral `n`, a finite fingerprint `K_n` of
//! `⟦#n⟧` large enough that the recognizer `num_n` already maps `K_n` to
//! `true`; fingerprints are found by running the membership search with
//! demand tracing and are re-validated by replay.

use super::denote::{DenoteCtx, SemanticSet, ValEnv};
use super::{parse_eelem, EElem};
use crate::lambda::app;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("no fingerprint derivation found for numeral {0} at fuel {1}")]
    FingerprintSearchFailed(u64, u32),
    #[error("stored fingerprint for numeral {0} fails replay")]
    ReplayFailed(u64),
    #[error("witness element {0} fails its defining membership facts")]
    WitnessShape(String),
    #[error("malformed witness file: {0}")]
    MalformedFile(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fingerprint {
    pub fuel: u32,
    pub elements: BTreeSet<EElem>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessData {
    pub version: String,
    pub t_star: EElem,
    pub f_star: EElem,
    /// Fuel at which `t* ∈ ⟦num_n #n⟧` searches are calibrated to succeed.
    pub member_fuel: u32,
    pub fingerprints: BTreeMap<u64, Fingerprint>,
}

#[derive(Serialize, Deserialize)]
struct FingerprintJson {
    n: u64,
    fuel: u32,
    elements: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct WitnessFileJson {
    version: String,
    t_star: String,
    f_star: String,
    member_fuel: u32,
    fingerprints: Vec<FingerprintJson>,
}

const WITNESS_FILE: &str = include_str!("../../data/witness_constants.json");

impl WitnessData {
    pub fn to_json(&self) -> String {
        let file = WitnessFileJson {
            version: self.version.clone(),
            t_star: self.t_star.to_string(),
            f_star: self.f_star.to_string(),
            member_fuel: self.member_fuel,
            fingerprints: self
                .fingerprints
                .iter()
                .map(|(n, fp)| FingerprintJson {
                    n: *n,
                    fuel: fp.fuel,
                    elements: fp.elements.iter().map(|e| e.to_string()).collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("witness data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, OracleError> {
        let file: WitnessFileJson =
            serde_json::from_str(text).map_err(|e| OracleError::MalformedFile(e.to_string()))?;
        let parse =
            |s: &str| parse_eelem(s).map_err(|e| OracleError::MalformedFile(e.to_string()));
        let mut fingerprints = BTreeMap::new();
        for fp in file.fingerprints {
            let elements = fp
                .elements
                .iter()
                .map(|s| parse(s))
                .collect::<Result<BTreeSet<_>, _>>()?;
            fingerprints.insert(
                fp.n,
                Fingerprint {
                    fuel: fp.fuel,
                    elements,
                },
            );
        }
        Ok(WitnessData {
            version: file.version,
            t_star: parse(&file.t_star)?,
            f_star: parse(&file.f_star)?,
            member_fuel: file.member_fuel,
            fingerprints,
        })
    }
}

/// The versioned witness constants compiled into the crate.
pub fn witness_data() -> Option<&'static WitnessData> {
    static DATA: OnceLock<Option<WitnessData>> = OnceLock::new();
    DATA.get_or_init(|| WitnessData::from_json(WITNESS_FILE).ok())
        .as_ref()
}

/// The stored true-witness.
pub fn t_star() -> EElem {
    witness_data()
        .map(|w| w.t_star.clone())
        .unwrap_or_else(|| EElem::pair([EElem::base()], EElem::pair([], EElem::base())))
}

/// The stored false-witness.
pub fn f_star() -> EElem {
    witness_data()
        .map(|w| w.f_star.clone())
        .unwrap_or_else(|| EElem::pair([], EElem::pair([EElem::base()], EElem::base())))
}

/// Exact membership in `⟦λx.λy.x⟧`: the element is `(K,(L,q))` with
/// `q ∈ K`. Used to validate witnesses independently of the search.
pub fn in_true_exact(e: &EElem) -> bool {
    let Some((k, inner)) = e.as_pair() else {
        return false;
    };
    let Some((_, q)) = inner.as_pair() else {
        return false;
    };
    k.contains(q)
}

/// Exact membership in `⟦λx.λy.y⟧`: `(K,(L,q))` with `q ∈ L`.
pub fn in_false_exact(e: &EElem) -> bool {
    let Some((_, inner)) = e.as_pair() else {
        return false;
    };
    let Some((l, q)) = inner.as_pair() else {
        return false;
    };
    l.contains(q)
}

/// An oracle behaving like `χ` on its window.
pub fn oracle_set(window: BTreeMap<u64, bool>, fuel_inner: u32) -> SemanticSet {
    SemanticSet::Oracle { window, fuel_inner }
}

/// Finds the witness booleans by bounded search: the structurally least
/// elements separating the two boolean denotations.
pub fn search_witness_booleans(ctx: &DenoteCtx) -> Result<(EElem, EElem), OracleError> {
    let t_term = ctx.canonical_term("true", crate::lambda::church::ctrue);
    let f_term = ctx.canonical_term("false", crate::lambda::church::cfalse);
    let empty = ValEnv::new();
    let trues = ctx.denote_enumerate(&t_term, &empty, 6).unwrap();
    let falses = ctx.denote_enumerate(&f_term, &empty, 6).unwrap();
    let t = trues
        .iter()
        .find(|e| in_true_exact(e) && !in_false_exact(e))
        .cloned()
        .ok_or_else(|| OracleError::WitnessShape("t*".into()))?;
    let f = falses
        .iter()
        .find(|e| in_false_exact(e) && !in_true_exact(e))
        .cloned()
        .ok_or_else(|| OracleError::WitnessShape("f*".into()))?;
    Ok((t, f))
}

/// Computes the full witness table: booleans plus fingerprints for the
/// numerals `0..=max_n`, each validated by replay against the finite set.
pub fn compute_witness_data(
    ctx: &DenoteCtx,
    version: &str,
    member_fuel: u32,
    max_n: u64,
) -> Result<WitnessData, OracleError> {
    let (t, f) = search_witness_booleans(ctx)?;
    let mut fingerprints = BTreeMap::new();
    for n in 0..=max_n {
        let num = ctx.num_term(n);
        let numeral = ctx.numeral_term(n);
        let k = ctx
            .apply_member_demands(&num, &numeral, &t, member_fuel)
            .ok_or(OracleError::FingerprintSearchFailed(n, member_fuel))?;
        replay_fingerprint(ctx, n, &k, member_fuel, &t)?;
        fingerprints.insert(
            n,
            Fingerprint {
                fuel: member_fuel,
                elements: k,
            },
        );
    }
    Ok(WitnessData {
        version: version.to_string(),
        t_star: t,
        f_star: f,
        member_fuel,
        fingerprints,
    })
}

fn replay_fingerprint(
    ctx: &DenoteCtx,
    n: u64,
    k: &BTreeSet<EElem>,
    fuel: u32,
    t: &EElem,
) -> Result<(), OracleError> {
    // t* ∈ ⟦num_n⟧ · K for the explicit finite K ...
    let num = ctx.num_term(n);
    let fin = ctx.register_const(&format!("fp{n}"), SemanticSet::Finite(k.clone()));
    let applied = app(num, fin);
    if !ctx
        .denote_member(&applied, &ValEnv::new(), t, fuel)
        .unwrap()
        .is_yes()
    {
        return Err(OracleError::ReplayFailed(n));
    }
    // ... and K ⊆ ⟦#n⟧.
    let numeral = ctx.numeral_term(n);
    for e in k {
        if !ctx
            .denote_member(&numeral, &ValEnv::new(), e, fuel)
            .unwrap()
            .is_yes()
        {
            return Err(OracleError::ReplayFailed(n));
        }
    }
    Ok(())
}

/// Validates stored witness data against fresh computation.
pub fn verify_witnesses(ctx: &DenoteCtx, data: &WitnessData) -> Result<(), OracleError> {
    if !in_true_exact(&data.t_star) || in_false_exact(&data.t_star) {
        return Err(OracleError::WitnessShape(data.t_star.to_string()));
    }
    if !in_false_exact(&data.f_star) || in_true_exact(&data.f_star) {
        return Err(OracleError::WitnessShape(data.f_star.to_string()));
    }
    let (t, f) = search_witness_booleans(ctx)?;
    if t != data.t_star || f != data.f_star {
        return Err(OracleError::WitnessShape(
            "stored booleans differ from search".into(),
        ));
    }
    for (n, fp) in &data.fingerprints {
        replay_fingerprint(ctx, *n, &fp.elements, fp.fuel, &data.t_star)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engeler::DenoteAnswer;
    use std::sync::Arc;

    #[test]
    fn witness_booleans_by_search() {
        let ctx = DenoteCtx::new();
        let (t, f) = search_witness_booleans(&ctx).unwrap();
        assert_eq!(t, EElem::pair([EElem::base()], EElem::pair([], EElem::base())));
        assert_eq!(f, EElem::pair([], EElem::pair([EElem::base()], EElem::base())));
    }

    #[test]
    fn exact_boolean_membership_agrees_with_search() {
        let ctx = DenoteCtx::new();
        let t_term = ctx.canonical_term("true", crate::lambda::church::ctrue);
        let f_term = ctx.canonical_term("false", crate::lambda::church::cfalse);
        let empty = ValEnv::new();
        for e in ctx.denote_enumerate(&t_term, &empty, 5).unwrap() {
            assert!(in_true_exact(&e));
        }
        for e in ctx.denote_enumerate(&f_term, &empty, 5).unwrap() {
            assert!(in_false_exact(&e));
        }
    }

    #[test]
    fn oracle_empty_window_is_empty() {
        let ctx = DenoteCtx::new();
        let d = Arc::new(oracle_set(BTreeMap::new(), 30));
        assert!(ctx.set_enumerate(&d, 10).is_empty());
        let probe = EElem::pair([], EElem::base());
        assert_eq!(ctx.set_member(&d, &probe, 10), DenoteAnswer::Unknown);
    }
}
