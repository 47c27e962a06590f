//! Finite complete Boolean algebras with exact rational measures.
//!
//! An [`Algebra`] is described by its atoms `{0, .., atom_count-1}`; every
//! element is a set of atoms, so all (finite) meets and joins exist and are
//! computed exactly. Optional atom weights turn the algebra into a measure
//! algebra with rational-valued `measure`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("an algebra needs at least one atom")]
    ZeroAtoms,
    #[error("weight list has length {got}, expected {expected}")]
    WeightCount { got: usize, expected: usize },
    #[error("atom weights must be positive")]
    NonPositiveWeight,
    #[error("atom weights must sum to 1, got {0}")]
    WeightSum(String),
    #[error("operands belong to different algebras (#{0} vs #{1})")]
    MixedAlgebras(u64, u64),
    #[error("algebra #{0} carries no measure weights")]
    Weightless(u64),
    #[error("atom index {index} out of range for {atom_count} atoms")]
    AtomOutOfRange { index: usize, atom_count: usize },
}

static NEXT_ALGEBRA_ID: AtomicU64 = AtomicU64::new(0);

#[derive(Debug, Clone)]
enum Weights {
    None,
    /// Every atom has weight `1/atom_count`.
    Uniform,
    List(Vec<BigRational>),
}

/// A finite Boolean algebra, identified by its atom set.
#[derive(Debug)]
pub struct Algebra {
    id: u64,
    atom_count: usize,
    weights: Weights,
}

impl Algebra {
    /// Builds a finite algebra on `atom_count` atoms, optionally weighted.
    ///
    /// Weights, when given, must be positive rationals summing to exactly 1.
    pub fn new(
        atom_count: usize,
        weights: Option<Vec<BigRational>>,
    ) -> Result<Arc<Self>, AlgebraError> {
        if atom_count == 0 {
            return Err(AlgebraError::ZeroAtoms);
        }
        let weights = match weights {
            None => Weights::None,
            Some(ws) => {
                if ws.len() != atom_count {
                    return Err(AlgebraError::WeightCount {
                        got: ws.len(),
                        expected: atom_count,
                    });
                }
                if ws.iter().any(|w| *w <= BigRational::zero()) {
                    return Err(AlgebraError::NonPositiveWeight);
                }
                let sum: BigRational = ws.iter().sum();
                if !sum.is_one() {
                    return Err(AlgebraError::WeightSum(sum.to_string()));
                }
                Weights::List(ws)
            }
        };
        Ok(Arc::new(Algebra {
            id: NEXT_ALGEBRA_ID.fetch_add(1, Ordering::Relaxed),
            atom_count,
            weights,
        }))
    }

    /// A uniformly weighted algebra: every atom has weight `1/atom_count`.
    pub fn uniform(atom_count: usize) -> Result<Arc<Self>, AlgebraError> {
        if atom_count == 0 {
            return Err(AlgebraError::ZeroAtoms);
        }
        Ok(Arc::new(Algebra {
            id: NEXT_ALGEBRA_ID.fetch_add(1, Ordering::Relaxed),
            atom_count,
            weights: Weights::Uniform,
        }))
    }

    /// A weightless algebra; measure operations are unavailable on it.
    pub fn weightless(atom_count: usize) -> Result<Arc<Self>, AlgebraError> {
        Algebra::new(atom_count, None)
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn atom_count(&self) -> usize {
        self.atom_count
    }

    pub fn has_weights(&self) -> bool {
        !matches!(self.weights, Weights::None)
    }

}

/// Fixed-width set of atoms, packed into 64-bit blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomSet {
    len: usize,
    blocks: Vec<u64>,
}

impl AtomSet {
    pub fn empty(len: usize) -> Self {
        AtomSet {
            len,
            blocks: vec![0; len.div_ceil(64)],
        }
    }

    pub fn full(len: usize) -> Self {
        let mut s = AtomSet::empty(len);
        for b in &mut s.blocks {
            *b = u64::MAX;
        }
        s.clear_tail();
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty_set(&self) -> bool {
        self.blocks.iter().all(|b| *b == 0)
    }

    // Bits past `len` in the last block must stay zero.
    fn clear_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.blocks.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len, "atom index out of range");
        self.blocks[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.blocks[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn count(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn union_with(&mut self, other: &AtomSet) {
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &AtomSet) {
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a &= b;
        }
    }

    pub fn complement(&mut self) {
        for b in &mut self.blocks {
            *b = !*b;
        }
        self.clear_tail();
    }

    pub fn is_subset(&self, other: &AtomSet) -> bool {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().enumerate().flat_map(|(bi, &block)| {
            let mut b = block;
            std::iter::from_fn(move || {
                if b == 0 {
                    None
                } else {
                    let t = b.trailing_zeros() as usize;
                    b &= b - 1;
                    Some(bi * 64 + t)
                }
            })
        })
    }

    /// Fills the set with all indices whose `bit_pos`-th binary digit equals
    /// `bit_value`, working block-wise so large sets are cheap to build.
    pub fn from_index_bit(len: usize, bit_pos: u32, bit_value: bool) -> Self {
        let mut s = AtomSet::empty(len);
        if bit_pos < 6 {
            // Pattern repeats within a single 64-bit block.
            let period = 1u64 << (bit_pos + 1);
            let mut pattern = 0u64;
            for j in 0..64 {
                if (j / (period / 2)) % 2 == 1 {
                    pattern |= 1 << j;
                }
            }
            if !bit_value {
                pattern = !pattern;
            }
            for b in &mut s.blocks {
                *b = pattern;
            }
        } else {
            // Whole blocks alternate in runs of 2^(bit_pos-6).
            let run = 1usize << (bit_pos - 6);
            for (bi, b) in s.blocks.iter_mut().enumerate() {
                let on = (bi / run) % 2 == 1;
                if on == bit_value {
                    *b = u64::MAX;
                }
            }
        }
        s.clear_tail();
        s
    }
}

/// An element of a finite Boolean algebra: a set of atoms.
#[derive(Debug, Clone)]
pub struct AlgebraElement {
    algebra: Arc<Algebra>,
    atoms: AtomSet,
}

impl PartialEq for AlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        self.algebra.id == other.algebra.id && self.atoms == other.atoms
    }
}

impl Eq for AlgebraElement {}

impl std::hash::Hash for AlgebraElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.algebra.id.hash(state);
        self.atoms.hash(state);
    }
}

impl AlgebraElement {
    pub fn bot(algebra: &Arc<Algebra>) -> Self {
        AlgebraElement {
            algebra: Arc::clone(algebra),
            atoms: AtomSet::empty(algebra.atom_count),
        }
    }

    pub fn top(algebra: &Arc<Algebra>) -> Self {
        AlgebraElement {
            algebra: Arc::clone(algebra),
            atoms: AtomSet::full(algebra.atom_count),
        }
    }

    pub fn atom(algebra: &Arc<Algebra>, i: usize) -> Result<Self, AlgebraError> {
        if i >= algebra.atom_count {
            return Err(AlgebraError::AtomOutOfRange {
                index: i,
                atom_count: algebra.atom_count,
            });
        }
        let mut atoms = AtomSet::empty(algebra.atom_count);
        atoms.insert(i);
        Ok(AlgebraElement {
            algebra: Arc::clone(algebra),
            atoms,
        })
    }

    pub fn from_atoms<I: IntoIterator<Item = usize>>(
        algebra: &Arc<Algebra>,
        iter: I,
    ) -> Result<Self, AlgebraError> {
        let mut atoms = AtomSet::empty(algebra.atom_count);
        for i in iter {
            if i >= algebra.atom_count {
                return Err(AlgebraError::AtomOutOfRange {
                    index: i,
                    atom_count: algebra.atom_count,
                });
            }
            atoms.insert(i);
        }
        Ok(AlgebraElement {
            algebra: Arc::clone(algebra),
            atoms,
        })
    }

    pub fn from_atom_set(algebra: &Arc<Algebra>, atoms: AtomSet) -> Self {
        assert_eq!(atoms.len(), algebra.atom_count);
        AlgebraElement {
            algebra: Arc::clone(algebra),
            atoms,
        }
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn atoms(&self) -> &AtomSet {
        &self.atoms
    }

    pub fn is_top(&self) -> bool {
        self.atoms.count() == self.algebra.atom_count
    }

    pub fn is_bot(&self) -> bool {
        self.atoms.is_empty_set()
    }

    fn check_same(&self, other: &Self) {
        assert_eq!(
            self.algebra.id, other.algebra.id,
            "mixed algebras: #{} vs #{}",
            self.algebra.id, other.algebra.id
        );
    }

    pub fn meet(&self, other: &Self) -> Self {
        self.check_same(other);
        let mut out = self.clone();
        out.atoms.intersect_with(&other.atoms);
        out
    }

    pub fn join(&self, other: &Self) -> Self {
        self.check_same(other);
        let mut out = self.clone();
        out.atoms.union_with(&other.atoms);
        out
    }

    pub fn not(&self) -> Self {
        let mut out = self.clone();
        out.atoms.complement();
        out
    }

    /// `a ⇒ b = ¬a ∨ b`
    pub fn implies(&self, other: &Self) -> Self {
        self.not().join(other)
    }

    /// `a ⇔ b = (a ⇒ b) ∧ (b ⇒ a)`
    pub fn iff(&self, other: &Self) -> Self {
        self.implies(other).meet(&other.implies(self))
    }

    /// `a ≤ b` in the lattice order.
    pub fn leq(&self, other: &Self) -> bool {
        self.check_same(other);
        self.atoms.is_subset(&other.atoms)
    }

    /// Sum of the weights of the atoms in this element.
    pub fn measure(&self) -> Result<BigRational, AlgebraError> {
        match &self.algebra.weights {
            Weights::None => Err(AlgebraError::Weightless(self.algebra.id)),
            Weights::Uniform => Ok(BigRational::new(
                BigInt::from(self.atoms.count()),
                BigInt::from(self.algebra.atom_count),
            )),
            Weights::List(ws) => {
                let mut sum = BigRational::zero();
                for i in self.atoms.iter_ones() {
                    sum += &ws[i];
                }
                Ok(sum)
            }
        }
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_top() {
            return write!(f, "top");
        }
        if self.is_bot() {
            return write!(f, "bot");
        }
        write!(f, "{{")?;
        for (n, i) in self.atoms.iter_ones().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// Connectives for the checked evaluation entry point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoolOp {
    Meet,
    Join,
    Not,
    Implies,
    Iff,
    BigMeet,
    BigJoin,
}

/// Checked evaluation over a family of elements of one algebra.
///
/// `Not` takes one argument, the binary connectives two; `BigMeet`/`BigJoin`
/// accept any finite family, including the empty one, for which the algebra
/// must be supplied to give `top`/`bot` a home.
pub fn alg_eval(
    algebra: &Arc<Algebra>,
    op: BoolOp,
    args: &[AlgebraElement],
) -> Result<AlgebraElement, AlgebraError> {
    for a in args {
        if a.algebra.id != algebra.id {
            return Err(AlgebraError::MixedAlgebras(algebra.id, a.algebra.id));
        }
    }
    let arity_err = || AlgebraError::WeightCount {
        got: args.len(),
        expected: 2,
    };
    match op {
        BoolOp::Not => {
            if args.len() != 1 {
                return Err(AlgebraError::WeightCount {
                    got: args.len(),
                    expected: 1,
                });
            }
            Ok(args[0].not())
        }
        BoolOp::Meet | BoolOp::Join | BoolOp::Implies | BoolOp::Iff => {
            if args.len() != 2 {
                return Err(arity_err());
            }
            Ok(match op {
                BoolOp::Meet => args[0].meet(&args[1]),
                BoolOp::Join => args[0].join(&args[1]),
                BoolOp::Implies => args[0].implies(&args[1]),
                BoolOp::Iff => args[0].iff(&args[1]),
                _ => unreachable!(),
            })
        }
        BoolOp::BigMeet => Ok(args
            .iter()
            .fold(AlgebraElement::top(algebra), |acc, a| acc.meet(a))),
        BoolOp::BigJoin => Ok(args
            .iter()
            .fold(AlgebraElement::bot(algebra), |acc, a| acc.join(a))),
    }
}

/// Convenience: meet of an iterator, `top` when empty.
pub fn big_meet<'a, I>(algebra: &Arc<Algebra>, iter: I) -> AlgebraElement
where
    I: IntoIterator<Item = &'a AlgebraElement>,
{
    iter.into_iter()
        .fold(AlgebraElement::top(algebra), |acc, a| acc.meet(a))
}

/// Convenience: join of an iterator, `bot` when empty.
pub fn big_join<'a, I>(algebra: &Arc<Algebra>, iter: I) -> AlgebraElement
where
    I: IntoIterator<Item = &'a AlgebraElement>,
{
    iter.into_iter()
        .fold(AlgebraElement::bot(algebra), |acc, a| acc.join(a))
}

/// All subsets of `base`, in increasing numeric order of their packed mask.
/// Only usable when `base` has at most 24 set bits.
pub fn iter_subsets(base: &AtomSet) -> impl Iterator<Item = AtomSet> + '_ {
    let ones: Vec<usize> = base.iter_ones().collect();
    assert!(ones.len() <= 24, "subset enumeration too large");
    let total = 1usize << ones.len();
    let len = base.len();
    (0..total).map(move |mask| {
        let mut s = AtomSet::empty(len);
        for (j, &atom) in ones.iter().enumerate() {
            if mask & (1 << j) != 0 {
                s.insert(atom);
            }
        }
        s
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn one_atom_algebra_is_two_element() {
        let a = Algebra::weightless(1).unwrap();
        let top = AlgebraElement::top(&a);
        let bot = AlgebraElement::bot(&a);
        assert_ne!(top, bot);
        assert_eq!(top.not(), bot);
    }

    #[test]
    fn constructor_rejects_bad_inputs() {
        assert_eq!(Algebra::weightless(0).unwrap_err(), AlgebraError::ZeroAtoms);
        let err = Algebra::new(2, Some(vec![rat(1, 3), rat(1, 3)])).unwrap_err();
        assert!(matches!(err, AlgebraError::WeightSum(_)));
        let err = Algebra::new(2, Some(vec![rat(3, 2), rat(-1, 2)])).unwrap_err();
        assert_eq!(err, AlgebraError::NonPositiveWeight);
    }

    #[test]
    fn implies_on_two_atoms() {
        // implies({p},{q}) over atoms {p,q} -> {q}
        let a = Algebra::weightless(2).unwrap();
        let p = AlgebraElement::atom(&a, 0).unwrap();
        let q = AlgebraElement::atom(&a, 1).unwrap();
        assert_eq!(p.implies(&q), q);
        // iff({p},{p,q}) -> {p}
        let pq = p.join(&q);
        assert_eq!(p.iff(&pq), p);
    }

    #[test]
    fn empty_family_conventions() {
        let a = Algebra::weightless(3).unwrap();
        assert_eq!(
            alg_eval(&a, BoolOp::BigMeet, &[]).unwrap(),
            AlgebraElement::top(&a)
        );
        assert_eq!(
            alg_eval(&a, BoolOp::BigJoin, &[]).unwrap(),
            AlgebraElement::bot(&a)
        );
    }

    #[test]
    fn mixed_algebras_rejected() {
        let a = Algebra::weightless(2).unwrap();
        let b = Algebra::weightless(2).unwrap();
        let x = AlgebraElement::top(&a);
        let y = AlgebraElement::top(&b);
        assert!(matches!(
            alg_eval(&a, BoolOp::Meet, &[x, y]),
            Err(AlgebraError::MixedAlgebras(_, _))
        ));
    }

    #[test]
    fn measures() {
        let a = Algebra::new(4, Some(vec![rat(1, 4); 4])).unwrap();
        assert!(AlgebraElement::top(&a).measure().unwrap().is_one());
        assert!(AlgebraElement::bot(&a).measure().unwrap().is_zero());
        let single = AlgebraElement::atom(&a, 2).unwrap();
        assert_eq!(single.measure().unwrap(), rat(1, 4));

        // Uniform 2^{2k}-atom space: a single atom weighs 2^{-2k}.
        let k = 3;
        let u = Algebra::uniform(1 << (2 * k)).unwrap();
        let one = AlgebraElement::atom(&u, 5).unwrap();
        assert_eq!(one.measure().unwrap(), rat(1, 64));

        let w = Algebra::weightless(2).unwrap();
        assert!(matches!(
            AlgebraElement::top(&w).measure(),
            Err(AlgebraError::Weightless(_))
        ));
    }

    #[test]
    fn measure_additivity_and_complement() {
        let a = Algebra::new(3, Some(vec![rat(1, 2), rat(1, 3), rat(1, 6)])).unwrap();
        let x = AlgebraElement::from_atoms(&a, [0]).unwrap();
        let y = AlgebraElement::from_atoms(&a, [1, 2]).unwrap();
        assert_eq!(
            x.measure().unwrap() + y.measure().unwrap(),
            x.join(&y).measure().unwrap()
        );
        let m = x.measure().unwrap() + x.not().measure().unwrap();
        assert!(m.is_one());
    }

    #[test]
    fn boolean_laws_exhaustive_small() {
        // De Morgan, distributivity, complementation over every triple of a
        // 4-atom algebra.
        let a = Algebra::weightless(4).unwrap();
        let elems: Vec<AlgebraElement> = (0..16u32)
            .map(|mask| {
                AlgebraElement::from_atoms(&a, (0..4).filter(|i| mask & (1 << i) != 0)).unwrap()
            })
            .collect();
        for x in &elems {
            assert_eq!(x.not().not(), *x);
            assert_eq!(x.meet(&x.not()), AlgebraElement::bot(&a));
            assert_eq!(x.join(&x.not()), AlgebraElement::top(&a));
            for y in &elems {
                assert_eq!(x.meet(y).not(), x.not().join(&y.not()));
                assert_eq!(x.join(y).not(), x.not().meet(&y.not()));
                for z in &elems {
                    assert_eq!(x.meet(&y.join(z)), x.meet(y).join(&x.meet(z)));
                    assert_eq!(x.join(&y.meet(z)), x.join(y).meet(&x.join(z)));
                }
            }
        }
    }

    #[test]
    fn atoms_partition_top() {
        let a = Algebra::weightless(5).unwrap();
        let mut join = AlgebraElement::bot(&a);
        for i in 0..5 {
            let atom = AlgebraElement::atom(&a, i).unwrap();
            assert!(join.meet(&atom).is_bot(), "atoms must be disjoint");
            join = join.join(&atom);
        }
        assert!(join.is_top());
    }

    #[test]
    fn index_bit_patterns() {
        for k in [1usize, 2, 3, 7] {
            let len = 1 << (2 * k);
            for pos in 0..(2 * k) as u32 {
                for val in [false, true] {
                    let s = AtomSet::from_index_bit(len, pos, val);
                    for i in 0..len {
                        let expect = ((i >> pos) & 1 == 1) == val;
                        assert_eq!(s.contains(i), expect, "k={k} pos={pos} val={val} i={i}");
                    }
                }
            }
        }
    }

    #[test]
    fn subset_enumeration() {
        let mut base = AtomSet::empty(6);
        base.insert(1);
        base.insert(3);
        base.insert(4);
        let subs: Vec<AtomSet> = iter_subsets(&base).collect();
        assert_eq!(subs.len(), 8);
        assert!(subs.iter().all(|s| s.is_subset(&base)));
        let distinct: std::collections::HashSet<_> = subs.iter().cloned().collect();
        assert_eq!(distinct.len(), 8);
    }
}
