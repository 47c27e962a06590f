//! Boolean-valued sets at finite rank.
//!
//! A [`Universe`] holds hash-consed A-valued sets over one algebra: each set
//! is a finite map from previously built sets to algebra elements. The
//! mutually recursive truth values for membership, inclusion and equality
//! are computed here, together with the standard constructions (pairs,
//! products, power sets, separation) and the embedding of classical
//! hereditarily finite sets.

use crate::algebra::{big_join, big_meet, iter_subsets, Algebra, AlgebraElement};
use crate::delta0::Delta0;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum BvsetError {
    #[error("set belongs to a different universe")]
    ForeignSet,
    #[error("entry value belongs to algebra #{got}, universe uses #{expected}")]
    ForeignElement { got: u64, expected: u64 },
    #[error("rank {rank} exceeds the universe limit {max}")]
    RankExceeded { rank: u32, max: u32 },
    #[error("construction needs {required} entries, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u64 },
    #[error("argument is not the embedding of a classical set")]
    NonCheckInput,
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("separation formula has free variable `{0}` besides the designated one")]
    ExtraFreeVariable(String),
}

/// A hereditarily finite classical set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct HfSet(pub BTreeSet<HfSet>);

impl HfSet {
    pub fn empty() -> Self {
        HfSet(BTreeSet::new())
    }

    pub fn from_elems<I: IntoIterator<Item = HfSet>>(iter: I) -> Self {
        HfSet(iter.into_iter().collect())
    }

    /// The von Neumann numeral `n`.
    pub fn numeral(n: usize) -> Self {
        let mut cur = HfSet::empty();
        for _ in 0..n {
            let mut next = cur.0.clone();
            next.insert(cur.clone());
            cur = HfSet(next);
        }
        cur
    }

    pub fn rank(&self) -> u32 {
        self.0.iter().map(|x| x.rank() + 1).max().unwrap_or(0)
    }

    /// All subsets; the input is finite, so this is the full power set.
    pub fn power_set(&self) -> HfSet {
        let elems: Vec<&HfSet> = self.0.iter().collect();
        let mut out = BTreeSet::new();
        for mask in 0u64..(1 << elems.len()) {
            let sub = elems
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, x)| (*x).clone());
            out.insert(HfSet::from_elems(sub));
        }
        HfSet(out)
    }
}

/// Handle to an interned A-valued set inside one universe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetId {
    univ: u64,
    idx: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TruthKind {
    Membership,
    Subset,
    Equality,
}

struct StoredSet {
    entries: Vec<(SetId, AlgebraElement)>,
    rank: u32,
}

struct Inner {
    sets: Vec<StoredSet>,
    intern: HashMap<Vec<(u32, AlgebraElement)>, u32>,
    memo: HashMap<(TruthKind, u32, u32), AlgebraElement>,
}

static NEXT_UNIVERSE_ID: AtomicU64 = AtomicU64::new(0);

pub const DEFAULT_MAX_RANK: u32 = 8;

/// Arena of A-valued sets over a single algebra.
pub struct Universe {
    id: u64,
    algebra: Arc<Algebra>,
    max_rank: u32,
    inner: RwLock<Inner>,
}

impl Universe {
    pub fn new(algebra: Arc<Algebra>) -> Self {
        Universe::with_max_rank(algebra, DEFAULT_MAX_RANK)
    }

    pub fn with_max_rank(algebra: Arc<Algebra>, max_rank: u32) -> Self {
        Universe {
            id: NEXT_UNIVERSE_ID.fetch_add(1, Ordering::Relaxed),
            algebra,
            max_rank,
            inner: RwLock::new(Inner {
                sets: Vec::new(),
                intern: HashMap::new(),
                memo: HashMap::new(),
            }),
        }
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn top(&self) -> AlgebraElement {
        AlgebraElement::top(&self.algebra)
    }

    pub fn bot(&self) -> AlgebraElement {
        AlgebraElement::bot(&self.algebra)
    }

    fn check_owned(&self, s: SetId) -> Result<(), BvsetError> {
        if s.univ != self.id {
            return Err(BvsetError::ForeignSet);
        }
        Ok(())
    }

    /// Interns a set given by raw entries. Structurally identical keys are
    /// merged by joining their values; entries are kept even when the value
    /// is `bot`, since the domain of the partial function matters.
    pub fn mk_set(
        &self,
        entries: Vec<(SetId, AlgebraElement)>,
    ) -> Result<SetId, BvsetError> {
        let mut merged: BTreeMap<u32, AlgebraElement> = BTreeMap::new();
        for (child, value) in entries {
            self.check_owned(child)?;
            if value.algebra().id() != self.algebra.id() {
                return Err(BvsetError::ForeignElement {
                    got: value.algebra().id(),
                    expected: self.algebra.id(),
                });
            }
            merged
                .entry(child.idx)
                .and_modify(|v| *v = v.join(&value))
                .or_insert(value);
        }

        let mut inner = self.inner.write().unwrap();
        let rank = merged
            .keys()
            .map(|&i| inner.sets[i as usize].rank + 1)
            .max()
            .unwrap_or(0);
        if rank > self.max_rank {
            return Err(BvsetError::RankExceeded {
                rank,
                max: self.max_rank,
            });
        }
        let key: Vec<(u32, AlgebraElement)> =
            merged.iter().map(|(&i, v)| (i, v.clone())).collect();
        if let Some(&idx) = inner.intern.get(&key) {
            return Ok(SetId {
                univ: self.id,
                idx,
            });
        }
        let idx = inner.sets.len() as u32;
        inner.sets.push(StoredSet {
            entries: key
                .iter()
                .map(|(i, v)| {
                    (
                        SetId {
                            univ: self.id,
                            idx: *i,
                        },
                        v.clone(),
                    )
                })
                .collect(),
            rank,
        });
        inner.intern.insert(key, idx);
        Ok(SetId {
            univ: self.id,
            idx,
        })
    }

    pub fn empty_set(&self) -> SetId {
        self.mk_set(Vec::new()).expect("empty set always fits")
    }

    pub fn entries(&self, s: SetId) -> Vec<(SetId, AlgebraElement)> {
        assert_eq!(s.univ, self.id, "foreign set");
        self.inner.read().unwrap().sets[s.idx as usize]
            .entries
            .clone()
    }

    pub fn rank(&self, s: SetId) -> u32 {
        assert_eq!(s.univ, self.id, "foreign set");
        self.inner.read().unwrap().sets[s.idx as usize].rank
    }

    pub fn domain(&self, s: SetId) -> Vec<SetId> {
        self.entries(s).into_iter().map(|(c, _)| c).collect()
    }

    /// The truth value of `x ∈ X`, `X ⊆ Y` or `x = y`, memoized on the
    /// interned pair. Recursion terminates because keys have smaller rank.
    pub fn truth(&self, kind: TruthKind, a: SetId, b: SetId) -> AlgebraElement {
        assert_eq!(a.univ, self.id, "foreign set");
        assert_eq!(b.univ, self.id, "foreign set");
        if let Some(v) = self
            .inner
            .read()
            .unwrap()
            .memo
            .get(&(kind, a.idx, b.idx))
        {
            return v.clone();
        }
        let value = match kind {
            TruthKind::Membership => {
                let val = self
                    .entries(b)
                    .into_iter()
                    .map(|(t, bt)| self.truth(TruthKind::Equality, a, t).meet(&bt));
                val.fold(self.bot(), |acc, v| acc.join(&v))
            }
            TruthKind::Subset => {
                let val = self.entries(a).into_iter().map(|(t, at)| {
                    at.implies(&self.truth(TruthKind::Membership, t, b))
                });
                val.fold(self.top(), |acc, v| acc.meet(&v))
            }
            TruthKind::Equality => self
                .truth(TruthKind::Subset, a, b)
                .meet(&self.truth(TruthKind::Subset, b, a)),
        };
        self.inner
            .write()
            .unwrap()
            .memo
            .insert((kind, a.idx, b.idx), value.clone());
        value
    }

    pub fn membership(&self, x: SetId, big_x: SetId) -> AlgebraElement {
        self.truth(TruthKind::Membership, x, big_x)
    }

    pub fn subset(&self, x: SetId, y: SetId) -> AlgebraElement {
        self.truth(TruthKind::Subset, x, y)
    }

    pub fn equality(&self, x: SetId, y: SetId) -> AlgebraElement {
        self.truth(TruthKind::Equality, x, y)
    }

    /// `{x}^A`: the singleton, with value `top`.
    pub fn singleton(&self, x: SetId) -> Result<SetId, BvsetError> {
        self.mk_set(vec![(x, self.top())])
    }

    /// `{x,y}^A`: the unordered pair, with both values `top`.
    pub fn unordered_pair(&self, x: SetId, y: SetId) -> Result<SetId, BvsetError> {
        self.mk_set(vec![(x, self.top()), (y, self.top())])
    }

    /// `(x,y)^A = { {x}^A, {x,y}^A }`, both values `top`.
    pub fn ordered_pair(&self, x: SetId, y: SetId) -> Result<SetId, BvsetError> {
        let sx = self.singleton(x)?;
        let sxy = self.unordered_pair(x, y)?;
        self.mk_set(vec![(sx, self.top()), (sxy, self.top())])
    }

    /// `X ×_A Y`: domain `{(x,y)^A}`, value `‖x∈X‖ ∧ ‖y∈Y‖`.
    pub fn product(&self, x: SetId, y: SetId) -> Result<SetId, BvsetError> {
        let mut entries = Vec::new();
        for (xd, _) in self.entries(x) {
            for (yd, _) in self.entries(y) {
                let key = self.ordered_pair(xd, yd)?;
                let value = self.membership(xd, x).meet(&self.membership(yd, y));
                entries.push((key, value));
            }
        }
        self.mk_set(entries)
    }

    /// Number of entries `𝒫^A(X)` would have.
    pub fn power_set_size(&self, x: SetId) -> u128 {
        let mut total: u128 = 1;
        for (_, v) in self.entries(x) {
            total = total.saturating_mul(1u128 << v.atoms().count());
        }
        total
    }

    /// The A-valued power set: domain is every map `u` with `dom(u) = dom(X)`
    /// and `u(t) ≤ X(t)`, all values `top`. Exponentially large, hence the
    /// explicit entry budget.
    pub fn power_set(&self, x: SetId, budget: u64) -> Result<SetId, BvsetError> {
        let required = self.power_set_size(x);
        if required > budget as u128 {
            return Err(BvsetError::BudgetExceeded { required, budget });
        }
        let dom = self.entries(x);
        let mut members = vec![Vec::new()];
        for (t, bound) in &dom {
            let mut next = Vec::new();
            for sub in iter_subsets(bound.atoms()) {
                let v = AlgebraElement::from_atom_set(&self.algebra, sub);
                for partial in &members {
                    let mut extended: Vec<(SetId, AlgebraElement)> = partial.clone();
                    extended.push((*t, v.clone()));
                    next.push(extended);
                }
            }
            members = next;
        }
        let mut entries = Vec::new();
        for m in members {
            let u = self.mk_set(m)?;
            entries.push((u, self.top()));
        }
        self.mk_set(entries)
    }

    /// `{ x ∈ X | Φ(x) }^A`: same domain, each value meeted with `‖Φ(t)‖`.
    pub fn separation(
        &self,
        x: SetId,
        var: &str,
        phi: &Delta0,
    ) -> Result<SetId, BvsetError> {
        for v in phi.free_vars() {
            if v != var {
                return Err(BvsetError::ExtraFreeVariable(v.to_string()));
            }
        }
        let mut entries = Vec::new();
        for (t, xt) in self.entries(x) {
            let mut env = BTreeMap::new();
            env.insert(var.to_string(), t);
            let holds = phi.eval(self, &env)?;
            entries.push((t, xt.meet(&holds)));
        }
        self.mk_set(entries)
    }

    /// The canonical copy of a classical set: all values `top`.
    pub fn check_embed(&self, s: &HfSet) -> Result<SetId, BvsetError> {
        let mut entries = Vec::new();
        for x in &s.0 {
            entries.push((self.check_embed(x)?, self.top()));
        }
        self.mk_set(entries)
    }

    /// Recovers the classical set `S` when the argument is `Š`.
    pub fn to_hf(&self, s: SetId) -> Option<HfSet> {
        let mut out = BTreeSet::new();
        for (c, v) in self.entries(s) {
            if !v.is_top() {
                return None;
            }
            out.insert(self.to_hf(c)?);
        }
        Some(HfSet(out))
    }

    /// The internal finite power set of a check-embedded set, returned as
    /// the embedding of the classical finite power set.
    pub fn fin_power_set(&self, x: SetId, budget: u64) -> Result<SetId, BvsetError> {
        let hf = self.to_hf(x).ok_or(BvsetError::NonCheckInput)?;
        let required = 1u128 << hf.0.len();
        if required > budget as u128 {
            return Err(BvsetError::BudgetExceeded { required, budget });
        }
        self.check_embed(&hf.power_set())
    }

    /// `‖∀x∈X.Φ‖ = ⋀_t ‖t∈X‖ ⇒ ‖Φ(t)‖` over `dom(X)`.
    pub(crate) fn eval_forall(
        &self,
        bound: SetId,
        body: impl Fn(SetId) -> Result<AlgebraElement, BvsetError>,
    ) -> Result<AlgebraElement, BvsetError> {
        let mut parts = Vec::new();
        for (t, _) in self.entries(bound) {
            let guard = self.membership(t, bound);
            parts.push(guard.implies(&body(t)?));
        }
        Ok(big_meet(&self.algebra, parts.iter()))
    }

    /// `‖∃x∈X.Φ‖ = ⋁_t ‖t∈X‖ ∧ ‖Φ(t)‖` over `dom(X)`.
    pub(crate) fn eval_exists(
        &self,
        bound: SetId,
        body: impl Fn(SetId) -> Result<AlgebraElement, BvsetError>,
    ) -> Result<AlgebraElement, BvsetError> {
        let mut parts = Vec::new();
        for (t, _) in self.entries(bound) {
            let guard = self.membership(t, bound);
            parts.push(guard.meet(&body(t)?));
        }
        Ok(big_join(&self.algebra, parts.iter()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;

    fn two_atom() -> Universe {
        Universe::new(Algebra::weightless(2).unwrap())
    }

    #[test]
    fn empty_sets_are_equal() {
        let u = two_atom();
        let e1 = u.empty_set();
        let e2 = u.empty_set();
        assert_eq!(e1, e2);
        assert!(u.equality(e1, e2).is_top());
    }

    #[test]
    fn hand_unfolded_equality() {
        // x = {∅̌ ↦ {p}}, y = {∅̌ ↦ {q}}: ({p}⇒{q})∧({q}⇒{p}) = {q}∧{p} = bot
        let u = two_atom();
        let a = u.algebra().clone();
        let p = AlgebraElement::atom(&a, 0).unwrap();
        let q = AlgebraElement::atom(&a, 1).unwrap();
        let e = u.empty_set();
        let x = u.mk_set(vec![(e, p)]).unwrap();
        let y = u.mk_set(vec![(e, q)]).unwrap();
        assert!(u.equality(x, y).is_bot());
    }

    #[test]
    fn membership_of_check_in_singleton() {
        // membership(∅̌, {∅̌↦{p}}) = {p}
        let u = two_atom();
        let a = u.algebra().clone();
        let p = AlgebraElement::atom(&a, 0).unwrap();
        let e = u.empty_set();
        let x = u.mk_set(vec![(e, p.clone())]).unwrap();
        assert_eq!(u.membership(e, x), p);
    }

    #[test]
    fn self_equality_is_top() {
        // ‖x = x‖ = top even with partial entry values.
        let u = two_atom();
        let a = u.algebra().clone();
        let p = AlgebraElement::atom(&a, 0).unwrap();
        let e = u.empty_set();
        let x = u.mk_set(vec![(e, p)]).unwrap();
        assert!(u.equality(x, x).is_top());
        let nested = u.mk_set(vec![(x, AlgebraElement::atom(&a, 1).unwrap())]).unwrap();
        assert!(u.equality(nested, nested).is_top());
    }

    #[test]
    fn singleton_and_pair_merge() {
        let u = two_atom();
        let e = u.empty_set();
        let s = u.singleton(e).unwrap();
        assert_eq!(u.entries(s).len(), 1);
        assert!(u.entries(s)[0].1.is_top());
        // ordered_pair(x,x) has a one-element domain after merging.
        let p = u.ordered_pair(e, e).unwrap();
        assert_eq!(u.entries(p).len(), 1);
    }

    #[test]
    fn product_of_partial_singletons() {
        // product of {∅̌↦{p}} and {∅̌↦{q}}: value {p}∧{q} = bot
        let u = two_atom();
        let a = u.algebra().clone();
        let p = AlgebraElement::atom(&a, 0).unwrap();
        let q = AlgebraElement::atom(&a, 1).unwrap();
        let e = u.empty_set();
        let x = u.mk_set(vec![(e, p)]).unwrap();
        let y = u.mk_set(vec![(e, q)]).unwrap();
        let prod = u.product(x, y).unwrap();
        let entries = u.entries(prod);
        assert_eq!(entries.len(), 1);
        assert!(entries[0].1.is_bot());
        assert_eq!(entries[0].0, u.ordered_pair(e, e).unwrap());
    }

    #[test]
    fn power_set_of_empty_and_singleton() {
        let u = two_atom();
        let e = u.empty_set();
        let pe = u.power_set(e, 16).unwrap();
        assert_eq!(u.entries(pe).len(), 1);
        assert_eq!(u.entries(pe)[0].0, e);

        // Over the 2-element algebra, X = {∅̌↦top} has a 2-entry power set.
        let one = Universe::new(Algebra::weightless(1).unwrap());
        let e1 = one.empty_set();
        let x = one.singleton(e1).unwrap();
        let px = one.power_set(x, 16).unwrap();
        assert_eq!(one.entries(px).len(), 2);
    }

    #[test]
    fn power_set_membership_is_subsethood() {
        // ‖S ∈ 𝒫^A(X)‖ = ‖S ⊆ X‖ for S in dom(𝒫^A(X)).
        let u = two_atom();
        let e = u.empty_set();
        let x0 = u.singleton(e).unwrap();
        let x = u.unordered_pair(e, x0).unwrap();
        let px = u.power_set(x, 64).unwrap();
        for (s, _) in u.entries(px) {
            assert_eq!(u.membership(s, px), u.subset(s, x));
        }
    }

    #[test]
    fn power_set_budget() {
        let u = two_atom();
        let e = u.empty_set();
        let x = u.singleton(e).unwrap();
        let err = u.power_set(x, 3).unwrap_err();
        assert!(matches!(err, BvsetError::BudgetExceeded { required: 4, .. }));
    }

    #[test]
    fn check_embedding_basics() {
        let u = two_atom();
        let empty = u.check_embed(&HfSet::empty()).unwrap();
        assert_eq!(empty, u.empty_set());
        let one = u
            .check_embed(&HfSet::from_elems([HfSet::empty()]))
            .unwrap();
        assert_eq!(u.entries(one).len(), 1);
        assert!(u.entries(one)[0].1.is_top());
    }

    #[test]
    fn check_equality_reflects_classical_equality() {
        // For all hereditarily finite x, y of rank ≤ 3.
        let u = two_atom();
        let mut all: Vec<HfSet> = vec![HfSet::empty()];
        for _ in 0..3 {
            let mut next: Vec<HfSet> = Vec::new();
            let n = all.len();
            for mask in 0u32..(1 << n) {
                let set = HfSet::from_elems(
                    (0..n).filter(|i| mask & (1 << i) != 0).map(|i| all[i].clone()),
                );
                next.push(set);
            }
            all = next;
        }
        assert_eq!(all.len(), 16);
        for x in &all {
            for y in &all {
                let cx = u.check_embed(x).unwrap();
                let cy = u.check_embed(y).unwrap();
                let eq = u.equality(cx, cy);
                if x == y {
                    assert!(eq.is_top(), "{x:?} = {y:?}");
                } else {
                    assert!(!eq.is_top(), "{x:?} != {y:?}");
                }
            }
        }
    }

    #[test]
    fn check_embedding_preserves_pairs() {
        let u = two_atom();
        let x = HfSet::numeral(1);
        let y = HfSet::numeral(2);
        // (x,y) as a classical Kuratowski pair.
        let sx = HfSet::from_elems([x.clone()]);
        let sxy = HfSet::from_elems([x.clone(), y.clone()]);
        let pair = HfSet::from_elems([sx, sxy]);
        let lhs = u.check_embed(&pair).unwrap();
        let cx = u.check_embed(&x).unwrap();
        let cy = u.check_embed(&y).unwrap();
        let rhs = u.ordered_pair(cx, cy).unwrap();
        assert_eq!(lhs, rhs, "structural identity, not just equality");
    }

    #[test]
    fn fin_power_set_on_checks() {
        let u = two_atom();
        let e = u.check_embed(&HfSet::empty()).unwrap();
        let fpe = u.fin_power_set(e, 16).unwrap();
        assert_eq!(u.entries(fpe).len(), 1);

        let two = HfSet::from_elems([HfSet::numeral(0), HfSet::numeral(1)]);
        let c = u.check_embed(&two).unwrap();
        let fp = u.fin_power_set(c, 16).unwrap();
        assert_eq!(u.entries(fp).len(), 4);
        assert_eq!(
            fp,
            u.check_embed(&two.power_set()).unwrap(),
            "matches the classical power set embedding"
        );

        // Non-check input is rejected.
        let a = u.algebra().clone();
        let p = AlgebraElement::atom(&a, 0).unwrap();
        let partial = u.mk_set(vec![(e, p)]).unwrap();
        assert_eq!(
            u.fin_power_set(partial, 16).unwrap_err(),
            BvsetError::NonCheckInput
        );
    }

    #[test]
    fn substitutivity_inequality() {
        // ‖x=y‖ ∧ ‖x∈Z‖ ≤ ‖y∈Z‖ over a small pool of sets.
        let u = two_atom();
        let a = u.algebra().clone();
        let p = AlgebraElement::atom(&a, 0).unwrap();
        let q = AlgebraElement::atom(&a, 1).unwrap();
        let e = u.empty_set();
        let s1 = u.mk_set(vec![(e, p.clone())]).unwrap();
        let s2 = u.mk_set(vec![(e, q.clone())]).unwrap();
        let s3 = u.singleton(e).unwrap();
        let pool = [e, s1, s2, s3];
        let mut zs = vec![];
        for &k1 in &pool {
            zs.push(u.mk_set(vec![(k1, p.clone())]).unwrap());
            for &k2 in &pool {
                zs.push(
                    u.mk_set(vec![(k1, q.clone()), (k2, p.clone())]).unwrap(),
                );
            }
        }
        for &x in &pool {
            for &y in &pool {
                for &z in &zs {
                    let lhs = u.equality(x, y).meet(&u.membership(x, z));
                    assert!(lhs.leq(&u.membership(y, z)));
                }
            }
        }
    }

    #[test]
    fn equality_is_an_a_valued_equivalence() {
        // symmetry and transitivity, exhaustively at rank ≤ 2 over 2 atoms
        // with tiny domains.
        let u = two_atom();
        let a = u.algebra().clone();
        let elems: Vec<AlgebraElement> = (0..4u32)
            .map(|m| {
                AlgebraElement::from_atoms(&a, (0..2).filter(|i| m & (1 << i) != 0)).unwrap()
            })
            .collect();
        let e = u.empty_set();
        let mut rank1 = vec![e];
        for v in &elems {
            rank1.push(u.mk_set(vec![(e, v.clone())]).unwrap());
        }
        let mut all = rank1.clone();
        for &k in &rank1 {
            for v in &elems {
                all.push(u.mk_set(vec![(k, v.clone())]).unwrap());
            }
        }
        all.sort();
        all.dedup();
        for &x in &all {
            for &y in &all {
                assert_eq!(u.equality(x, y), u.equality(y, x));
                for &z in &all {
                    let chained = u.equality(x, y).meet(&u.equality(y, z));
                    assert!(chained.leq(&u.equality(x, z)));
                }
            }
        }
    }
}
