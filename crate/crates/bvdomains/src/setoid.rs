//! A-valued setoids and posets: equality tables, predicates, gluing along
//! disjoint families, homs with their equivalence, and the bridge from
//! A-valued sets.

use crate::algebra::{Algebra, AlgebraElement};
use crate::bvset::{BvsetError, SetId, Universe};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SetoidError {
    #[error("equality table is not symmetric at ({0},{1})")]
    SymmetryViolation(usize, usize),
    #[error("equality table is not transitive at ({0},{1},{2})")]
    TransitivityViolation(usize, usize, usize),
    #[error("order table violates transitivity at ({0},{1},{2})")]
    OrderTransitivityViolation(usize, usize, usize),
    #[error("order table violates the reflexivity bound at ({0},{1})")]
    OrderExtentViolation(usize, usize),
    #[error("map is not a setoid hom: fails at carrier pair ({0},{1})")]
    HomConditionViolation(usize, usize),
    #[error("operands live over different setoids")]
    MixedSetoids,
    #[error("family elements {0} and {1} are not disjoint")]
    NonDisjointFamily(usize, usize),
    #[error("family value {0} exceeds the extent of its element")]
    FamilyExtentViolation(usize),
    #[error("family values {0} and {1} are not compatible")]
    IncompatibleFamily(usize, usize),
    #[error("setoid does not support gluing")]
    NotComplete,
    #[error("glued element is not in the carrier")]
    GlueOutsideCarrier,
    #[error("relation is not single-valued at x={x}: witnesses y1={y1}, y2={y2}")]
    NotSingleValued { x: usize, y1: usize, y2: usize },
    #[error("relation is not total at x={0}")]
    NotTotal(usize),
    #[error("predicate violates congruence at ({0},{1})")]
    PredicateCongruenceViolation(usize, usize),
    #[error("predicate exceeds the extent at {0}")]
    PredicateExtentViolation(usize),
    #[error("carrier index {0} out of range")]
    BadIndex(usize),
    #[error(transparent)]
    Bvset(#[from] BvsetError),
}

type Gluer<T> =
    Arc<dyn Fn(&[(AlgebraElement, &T)]) -> Result<T, SetoidError> + Send + Sync>;

/// A finite carrier together with an A-valued partial equivalence.
#[derive(Clone)]
pub struct Setoid<T> {
    algebra: Arc<Algebra>,
    carrier: Vec<T>,
    eq: Vec<Vec<AlgebraElement>>,
    gluer: Option<Gluer<T>>,
}

impl<T: Clone + PartialEq> Setoid<T> {
    /// Builds the equality table from `eq_fn` and verifies symmetry and
    /// transitivity.
    pub fn new(
        algebra: Arc<Algebra>,
        carrier: Vec<T>,
        eq_fn: impl Fn(&T, &T) -> AlgebraElement,
    ) -> Result<Self, SetoidError> {
        let eq: Vec<Vec<AlgebraElement>> = carrier
            .iter()
            .map(|x| carrier.iter().map(|y| eq_fn(x, y)).collect())
            .collect();
        let s = Setoid {
            algebra,
            carrier,
            eq,
            gluer: None,
        };
        s.validate()?;
        Ok(s)
    }

    /// Same, with a gluing procedure; the setoid is then flagged complete.
    pub fn with_gluer(
        algebra: Arc<Algebra>,
        carrier: Vec<T>,
        eq_fn: impl Fn(&T, &T) -> AlgebraElement,
        gluer: Gluer<T>,
    ) -> Result<Self, SetoidError> {
        let mut s = Setoid::new(algebra, carrier, eq_fn)?;
        s.gluer = Some(gluer);
        Ok(s)
    }

    fn validate(&self) -> Result<(), SetoidError> {
        let n = self.carrier.len();
        for i in 0..n {
            for j in 0..n {
                if self.eq[i][j] != self.eq[j][i] {
                    return Err(SetoidError::SymmetryViolation(i, j));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let chained = self.eq[i][j].meet(&self.eq[j][k]);
                    if !chained.leq(&self.eq[i][k]) {
                        return Err(SetoidError::TransitivityViolation(i, j, k));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn carrier(&self) -> &[T] {
        &self.carrier
    }

    pub fn index_of(&self, x: &T) -> Option<usize> {
        self.carrier.iter().position(|y| y == x)
    }

    pub fn eq(&self, i: usize, j: usize) -> &AlgebraElement {
        &self.eq[i][j]
    }

    /// The extent `ε(x) = ‖x = x‖`.
    pub fn eps(&self, i: usize) -> &AlgebraElement {
        &self.eq[i][i]
    }

    pub fn is_total(&self) -> bool {
        (0..self.len()).all(|i| self.eps(i).is_top())
    }

    pub fn is_strict(&self) -> bool {
        (0..self.len()).all(|i| {
            (0..self.len()).all(|j| i == j || !self.eq[i][j].is_top())
        })
    }

    pub fn is_complete(&self) -> bool {
        self.gluer.is_some()
    }

    /// Glues a pairwise disjoint family `(a_i, x_i)` with `a_i ≤ ε(x_i)`
    /// into an `x` with `a_i ≤ ‖x_i = x‖` for every `i`. The returned index
    /// points into the carrier; the contract inequality is re-checked on
    /// every call.
    pub fn glue(
        &self,
        family: &[(AlgebraElement, usize)],
    ) -> Result<usize, SetoidError> {
        let gluer = self.gluer.as_ref().ok_or(SetoidError::NotComplete)?;
        for (n, (a, i)) in family.iter().enumerate() {
            if *i >= self.len() {
                return Err(SetoidError::BadIndex(*i));
            }
            if !a.leq(self.eps(*i)) {
                return Err(SetoidError::FamilyExtentViolation(n));
            }
            for (m, (b, _)) in family.iter().enumerate().skip(n + 1) {
                if !a.meet(b).is_bot() {
                    return Err(SetoidError::NonDisjointFamily(n, m));
                }
            }
        }
        let args: Vec<(AlgebraElement, &T)> = family
            .iter()
            .map(|(a, i)| (a.clone(), &self.carrier[*i]))
            .collect();
        let glued = gluer(&args)?;
        let idx = self
            .index_of(&glued)
            .ok_or(SetoidError::GlueOutsideCarrier)?;
        for (a, i) in family {
            assert!(
                a.leq(&self.eq[*i][idx]),
                "glue contract violated: a_i must be below the equality with the glued element"
            );
        }
        Ok(idx)
    }

    /// Gluing for compatible (not necessarily disjoint) families, i.e.
    /// `a_i ∧ a_j ≤ ‖x_i = x_j‖`: disjointify, glue, and check the full
    /// contract.
    pub fn glue_compatible(
        &self,
        family: &[(AlgebraElement, usize)],
    ) -> Result<usize, SetoidError> {
        for (n, (a, i)) in family.iter().enumerate() {
            for (m, (b, j)) in family.iter().enumerate().skip(n + 1) {
                if !a.meet(b).leq(&self.eq[*i][*j]) {
                    return Err(SetoidError::IncompatibleFamily(n, m));
                }
            }
            if !a.leq(self.eps(*i)) {
                return Err(SetoidError::FamilyExtentViolation(n));
            }
        }
        let mut seen = AlgebraElement::bot(&self.algebra);
        let mut disjoint = Vec::new();
        for (a, i) in family {
            disjoint.push((a.meet(&seen.not()), *i));
            seen = seen.join(a);
        }
        let idx = self.glue(&disjoint)?;
        for (a, i) in family {
            assert!(
                a.leq(&self.eq[*i][idx]),
                "compatible-glue contract violated"
            );
        }
        Ok(idx)
    }

    /// Checks the two predicate conditions: congruence along equality and
    /// containment in the extent.
    pub fn validate_predicate(
        &self,
        values: &[AlgebraElement],
    ) -> Result<(), SetoidError> {
        let n = self.len();
        assert_eq!(values.len(), n);
        for i in 0..n {
            if !values[i].leq(self.eps(i)) {
                return Err(SetoidError::PredicateExtentViolation(i));
            }
            for j in 0..n {
                if !self.eq[i][j].leq(&values[i].iff(&values[j])) {
                    return Err(SetoidError::PredicateCongruenceViolation(i, j));
                }
            }
        }
        Ok(())
    }

    /// The product setoid, with componentwise meets as equality.
    pub fn product<U: Clone + PartialEq>(
        &self,
        other: &Setoid<U>,
    ) -> Result<Setoid<(T, U)>, SetoidError> {
        let mut carrier = Vec::new();
        for x in &self.carrier {
            for y in &other.carrier {
                carrier.push((x.clone(), y.clone()));
            }
        }
        let m = other.len();
        let eq = |a: &(T, U), b: &(T, U)| -> AlgebraElement {
            let i1 = self.index_of(&a.0).unwrap();
            let j1 = other.index_of(&a.1).unwrap();
            let i2 = self.index_of(&b.0).unwrap();
            let j2 = other.index_of(&b.1).unwrap();
            let _ = m;
            self.eq[i1][i2].meet(&other.eq[j1][j2])
        };
        Setoid::new(self.algebra.clone(), carrier, eq)
    }
}

/// A binary relation `X → Y`: a predicate on the product setoid.
#[derive(Clone)]
pub struct SetoidRel {
    values: Vec<Vec<AlgebraElement>>,
}

impl SetoidRel {
    /// Validates the predicate conditions on the product and wraps the
    /// table.
    pub fn new<T: Clone + PartialEq, U: Clone + PartialEq>(
        source: &Setoid<T>,
        target: &Setoid<U>,
        values: Vec<Vec<AlgebraElement>>,
    ) -> Result<Self, SetoidError> {
        assert_eq!(values.len(), source.len());
        let flat: Vec<AlgebraElement> = values.iter().flatten().cloned().collect();
        let product = source.product(target)?;
        product.validate_predicate(&flat)?;
        Ok(SetoidRel { values })
    }

    pub fn value(&self, x: usize, y: usize) -> &AlgebraElement {
        &self.values[x][y]
    }

    /// The identity relation `id(x1,x2) = ‖x1 = x2‖`.
    pub fn identity<T: Clone + PartialEq>(s: &Setoid<T>) -> Self {
        SetoidRel {
            values: s.eq.clone(),
        }
    }

    /// Pointwise equality of relation tables.
    pub fn same_as(&self, other: &SetoidRel) -> bool {
        self.values == other.values
    }
}

/// A hom of setoids: a carrier map respecting equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetoidHom {
    pub map: Vec<usize>,
}

impl SetoidHom {
    pub fn new<T: Clone + PartialEq, U: Clone + PartialEq>(
        source: &Setoid<T>,
        target: &Setoid<U>,
        map: Vec<usize>,
    ) -> Result<Self, SetoidError> {
        assert_eq!(map.len(), source.len());
        for &t in &map {
            if t >= target.len() {
                return Err(SetoidError::BadIndex(t));
            }
        }
        for i in 0..source.len() {
            for j in 0..source.len() {
                if !source.eq(i, j).leq(target.eq(map[i], map[j])) {
                    return Err(SetoidError::HomConditionViolation(i, j));
                }
            }
        }
        Ok(SetoidHom { map })
    }
}

/// `‖f = g‖ = ⋀_x ε(x) ⇒ ‖f(x) = g(x)‖`; the homs are equivalent exactly
/// when this is `top`.
pub fn hom_distance<T: Clone + PartialEq, U: Clone + PartialEq>(
    source: &Setoid<T>,
    target: &Setoid<U>,
    f: &SetoidHom,
    g: &SetoidHom,
) -> AlgebraElement {
    let mut out = AlgebraElement::top(source.algebra());
    for i in 0..source.len() {
        out = out.meet(&source.eps(i).implies(target.eq(f.map[i], g.map[i])));
    }
    out
}

/// The graph of a hom: `γ(f)(x,y) = ε(x) ∧ ‖f(x) = y‖`.
pub fn graph<T: Clone + PartialEq, U: Clone + PartialEq>(
    source: &Setoid<T>,
    target: &Setoid<U>,
    f: &SetoidHom,
) -> SetoidRel {
    let values = (0..source.len())
        .map(|i| {
            (0..target.len())
                .map(|j| source.eps(i).meet(target.eq(f.map[i], j)))
                .collect()
        })
        .collect();
    SetoidRel { values }
}

/// Turns a single-valued, total relation into a hom by gluing, per
/// functionality: the result satisfies `R(x,y) ≤ ‖F(R)(x) = y‖`, and its
/// graph coincides with `R` up to hom equivalence.
pub fn relation_to_function<T: Clone + PartialEq, U: Clone + PartialEq>(
    source: &Setoid<T>,
    target: &Setoid<U>,
    rel: &SetoidRel,
) -> Result<SetoidHom, SetoidError> {
    // Single-valuedness and totality at each extent.
    for x in 0..source.len() {
        for y1 in 0..target.len() {
            for y2 in 0..target.len() {
                let both = rel.value(x, y1).meet(rel.value(x, y2));
                if !both.leq(target.eq(y1, y2)) {
                    return Err(SetoidError::NotSingleValued { x, y1, y2 });
                }
            }
        }
        let mut reach = AlgebraElement::bot(source.algebra());
        for y in 0..target.len() {
            reach = reach.join(rel.value(x, y));
        }
        if !source.eps(x).leq(&reach) {
            return Err(SetoidError::NotTotal(x));
        }
    }
    let mut map = Vec::with_capacity(source.len());
    for x in 0..source.len() {
        let family: Vec<(AlgebraElement, usize)> = (0..target.len())
            .map(|y| (rel.value(x, y).clone(), y))
            .collect();
        let idx = target.glue_compatible(&family)?;
        for y in 0..target.len() {
            assert!(
                rel.value(x, y).leq(target.eq(idx, y)),
                "choice function must refine the relation"
            );
        }
        map.push(idx);
    }
    SetoidHom::new(source, target, map)
}

/// A carrier with an A-valued order.
#[derive(Clone)]
pub struct APoset<T> {
    algebra: Arc<Algebra>,
    carrier: Vec<T>,
    leq: Vec<Vec<AlgebraElement>>,
}

impl<T: Clone + PartialEq> APoset<T> {
    pub fn new(
        algebra: Arc<Algebra>,
        carrier: Vec<T>,
        leq_fn: impl Fn(&T, &T) -> AlgebraElement,
    ) -> Result<Self, SetoidError> {
        let leq: Vec<Vec<AlgebraElement>> = carrier
            .iter()
            .map(|x| carrier.iter().map(|y| leq_fn(x, y)).collect())
            .collect();
        let n = carrier.len();
        for i in 0..n {
            for j in 0..n {
                let bound = leq[i][i].meet(&leq[j][j]);
                if !leq[i][j].leq(&bound) {
                    return Err(SetoidError::OrderExtentViolation(i, j));
                }
                for k in 0..n {
                    if !leq[i][j].meet(&leq[j][k]).leq(&leq[i][k]) {
                        return Err(SetoidError::OrderTransitivityViolation(i, j, k));
                    }
                }
            }
        }
        Ok(APoset {
            algebra,
            carrier,
            leq,
        })
    }

    pub fn leq(&self, i: usize, j: usize) -> &AlgebraElement {
        &self.leq[i][j]
    }

    pub fn carrier(&self) -> &[T] {
        &self.carrier
    }

    /// The induced setoid: `‖x = y‖ = ‖x ≤ y‖ ∧ ‖y ≤ x‖`.
    pub fn to_setoid(&self) -> Result<Setoid<T>, SetoidError> {
        let leq = self.leq.clone();
        let carrier = self.carrier.clone();
        let idx = |x: &T| carrier.iter().position(|y| y == x).unwrap();
        Setoid::new(self.algebra.clone(), self.carrier.clone(), |x, y| {
            let i = idx(x);
            let j = idx(y);
            leq[i][j].meet(&leq[j][i])
        })
    }
}

/// The setoid of an A-valued set: carrier `dom(X)`, equality
/// `‖x∈X‖ ∧ ‖y∈X‖ ∧ ‖x=y‖`.
pub fn oid(universe: &Arc<Universe>, x: SetId) -> Result<Setoid<SetId>, SetoidError> {
    let dom = universe.domain(x);
    Setoid::new(universe.algebra().clone(), dom, |&a, &b| {
        universe
            .membership(a, x)
            .meet(&universe.membership(b, x))
            .meet(&universe.equality(a, b))
    })
}

/// `Oid(𝒫^A(X))` with its entrywise gluing procedure; returns the power
/// set object together with the complete setoid on its domain.
pub fn oid_power_set(
    universe: &Arc<Universe>,
    base: SetId,
    budget: u64,
) -> Result<(SetId, Setoid<SetId>), SetoidError> {
    let power = universe.power_set(base, budget)?;
    let u = Arc::clone(universe);
    let base_dom = universe.domain(base);
    let gluer: Gluer<SetId> = Arc::new(move |family| {
        let mut entries = Vec::new();
        for &t in &base_dom {
            let mut value = AlgebraElement::bot(u.algebra());
            for (a, s) in family {
                let s_entries = u.entries(**s);
                let s_val = s_entries
                    .iter()
                    .find(|(k, _)| *k == t)
                    .map(|(_, v)| v.clone())
                    .unwrap_or_else(|| AlgebraElement::bot(u.algebra()));
                value = value.join(&a.meet(&s_val));
            }
            entries.push((t, value));
        }
        Ok(u.mk_set(entries)?)
    });
    let dom = universe.domain(power);
    let setoid = Setoid::with_gluer(
        universe.algebra().clone(),
        dom,
        |&a, &b| {
            universe
                .membership(a, power)
                .meet(&universe.membership(b, power))
                .meet(&universe.equality(a, b))
        },
        gluer,
    )?;
    Ok((power, setoid))
}

/// The predicate induced on `Oid(X)` by an A-subset `S ⊆ X`:
/// `e(S)(x) = ‖x ∈ S‖`.
pub fn subset_predicate(
    universe: &Arc<Universe>,
    x: SetId,
    s: SetId,
) -> Vec<AlgebraElement> {
    universe
        .domain(x)
        .into_iter()
        .map(|t| universe.membership(t, s))
        .collect()
}
