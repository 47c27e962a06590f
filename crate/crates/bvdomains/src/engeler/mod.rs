//! The graph model carrier: a countable set `E` closed under pairing a
//! finite subset with an element. Elements are hash-consed trees; sets of
//! elements model points of the domain `𝒫(E)`, with application
//! `F·X = { q | ∃K ⊆ X. (K,q) ∈ F }`.

mod denote;
mod oracle;

pub use denote::{DenoteAnswer, DenoteCtx, DenoteError, SemanticSet, ValEnv};
pub use oracle::{
    compute_witness_data, f_star, in_false_exact, in_true_exact, oracle_set,
    search_witness_booleans, t_star, verify_witnesses, witness_data, Fingerprint,
    OracleError, WitnessData,
};

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};
use thiserror::Error;

/// Tree structure of a carrier element. `children` is sorted and
/// duplicate-free, so structurally equal elements have equal trees.
#[derive(Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ETree {
    Base,
    Pair {
        rank: u32,
        children: Vec<EElem>,
        result: EElem,
    },
}

/// A hash-consed element of `E`.
#[derive(Debug, Clone)]
pub struct EElem(Arc<ETree>);

impl PartialEq for EElem {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}
impl Eq for EElem {}

impl PartialOrd for EElem {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for EElem {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return std::cmp::Ordering::Equal;
        }
        self.0.cmp(&other.0)
    }
}
impl std::hash::Hash for EElem {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.hash(state);
    }
}

fn intern() -> &'static Mutex<HashSet<Arc<ETree>>> {
    static POOL: OnceLock<Mutex<HashSet<Arc<ETree>>>> = OnceLock::new();
    POOL.get_or_init(|| Mutex::new(HashSet::new()))
}

impl EElem {
    pub fn base() -> EElem {
        static BASE: OnceLock<EElem> = OnceLock::new();
        BASE.get_or_init(|| EElem::intern_tree(ETree::Base)).clone()
    }

    /// The pair of a finite set of elements with an element; the children
    /// list is canonicalized, making the pairing injective on (set, elem).
    pub fn pair<I: IntoIterator<Item = EElem>>(children: I, result: EElem) -> EElem {
        let set: BTreeSet<EElem> = children.into_iter().collect();
        let children: Vec<EElem> = set.into_iter().collect();
        let rank = 1 + children
            .iter()
            .map(|c| c.rank())
            .chain(std::iter::once(result.rank()))
            .max()
            .unwrap_or(0);
        EElem::intern_tree(ETree::Pair {
            rank,
            children,
            result,
        })
    }

    fn intern_tree(tree: ETree) -> EElem {
        let mut pool = intern().lock().unwrap();
        if let Some(existing) = pool.get(&tree) {
            return EElem(Arc::clone(existing));
        }
        let arc = Arc::new(tree);
        pool.insert(Arc::clone(&arc));
        EElem(arc)
    }

    pub fn rank(&self) -> u32 {
        match self.0.as_ref() {
            ETree::Base => 0,
            ETree::Pair { rank, .. } => *rank,
        }
    }

    pub fn is_base(&self) -> bool {
        matches!(self.0.as_ref(), ETree::Base)
    }

    pub fn as_pair(&self) -> Option<(&[EElem], &EElem)> {
        match self.0.as_ref() {
            ETree::Base => None,
            ETree::Pair {
                children, result, ..
            } => Some((children, result)),
        }
    }
}

impl fmt::Display for EElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.as_ref() {
            ETree::Base => write!(f, "*"),
            ETree::Pair {
                children, result, ..
            } => {
                write!(f, "([")?;
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, "],{result})")
            }
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("element syntax error at byte {pos}: {msg}")]
pub struct EElemParseError {
    pub pos: usize,
    pub msg: String,
}

/// Parses the printable element syntax: `*` or `([e1,e2],e)`.
pub fn parse_eelem(text: &str) -> Result<EElem, EElemParseError> {
    fn skip_ws(b: &[u8], i: &mut usize) {
        while *i < b.len() && (b[*i] as char).is_ascii_whitespace() {
            *i += 1;
        }
    }
    fn expect(b: &[u8], i: &mut usize, c: u8) -> Result<(), EElemParseError> {
        skip_ws(b, i);
        if b.get(*i) == Some(&c) {
            *i += 1;
            Ok(())
        } else {
            Err(EElemParseError {
                pos: *i,
                msg: format!("expected `{}`", c as char),
            })
        }
    }
    fn elem(b: &[u8], i: &mut usize) -> Result<EElem, EElemParseError> {
        skip_ws(b, i);
        match b.get(*i) {
            Some(b'*') => {
                *i += 1;
                Ok(EElem::base())
            }
            Some(b'(') => {
                *i += 1;
                expect(b, i, b'[')?;
                let mut children = Vec::new();
                skip_ws(b, i);
                if b.get(*i) != Some(&b']') {
                    loop {
                        children.push(elem(b, i)?);
                        skip_ws(b, i);
                        if b.get(*i) == Some(&b',') {
                            *i += 1;
                        } else {
                            break;
                        }
                    }
                }
                expect(b, i, b']')?;
                expect(b, i, b',')?;
                let result = elem(b, i)?;
                expect(b, i, b')')?;
                Ok(EElem::pair(children, result))
            }
            _ => Err(EElemParseError {
                pos: *i,
                msg: "expected `*` or `(`".into(),
            }),
        }
    }
    let b = text.as_bytes();
    let mut i = 0;
    let e = elem(b, &mut i)?;
    skip_ws(b, &mut i);
    if i != b.len() {
        return Err(EElemParseError {
            pos: i,
            msg: "trailing input".into(),
        });
    }
    Ok(e)
}

/// Exact application of finite sets: `{ q | ∃(K,q) ∈ F. K ⊆ X }`.
pub fn apply_fin(f: &BTreeSet<EElem>, x: &BTreeSet<EElem>) -> BTreeSet<EElem> {
    let mut out = BTreeSet::new();
    for e in f {
        if let Some((children, result)) = e.as_pair() {
            if children.iter().all(|c| x.contains(c)) {
                out.insert(result.clone());
            }
        }
    }
    out
}

/// The abstraction of a finitely generated step function
/// `f(X) = ⋃ { S_i | K_i ⊆ X }`: pairs `(K, q)` with `q ∈ f(K)`, for `K`
/// ranging over the closure of the `K_i` under union (including the empty
/// union).
pub fn lam_step(steps: &[(BTreeSet<EElem>, BTreeSet<EElem>)]) -> BTreeSet<EElem> {
    assert!(steps.len() <= 16, "step family too large");
    let mut out = BTreeSet::new();
    for mask in 0u32..(1 << steps.len()) {
        let mut k: BTreeSet<EElem> = BTreeSet::new();
        for (i, (ki, _)) in steps.iter().enumerate() {
            if mask & (1 << i) != 0 {
                k.extend(ki.iter().cloned());
            }
        }
        // f(K)
        let mut value: BTreeSet<EElem> = BTreeSet::new();
        for (ki, si) in steps {
            if ki.is_subset(&k) {
                value.extend(si.iter().cloned());
            }
        }
        for q in value {
            out.insert(EElem::pair(k.iter().cloned(), q));
        }
    }
    out
}

/// Evaluates the step function itself.
pub fn step_value(
    steps: &[(BTreeSet<EElem>, BTreeSet<EElem>)],
    x: &BTreeSet<EElem>,
) -> BTreeSet<EElem> {
    let mut out = BTreeSet::new();
    for (ki, si) in steps {
        if ki.is_subset(x) {
            out.extend(si.iter().cloned());
        }
    }
    out
}

/// In the powerset of a finite universe, way-below is plain inclusion.
pub fn way_below(s: &BTreeSet<EElem>, t: &BTreeSet<EElem>) -> bool {
    s.is_subset(t)
}

/// Every element of rank at most `max_rank`. Grows doubly exponentially;
/// only small ranks are usable.
pub fn universe_up_to_rank(max_rank: u32) -> Vec<EElem> {
    assert!(max_rank <= 2, "universe enumeration explodes past rank 2");
    let mut layer: Vec<EElem> = vec![EElem::base()];
    for _ in 0..max_rank {
        let mut next = layer.clone();
        let n = layer.len();
        for mask in 0u32..(1 << n) {
            let children: Vec<EElem> = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| layer[i].clone())
                .collect();
            for r in &layer {
                next.push(EElem::pair(children.iter().cloned(), r.clone()));
            }
        }
        next.sort();
        next.dedup();
        layer = next;
    }
    layer
}
