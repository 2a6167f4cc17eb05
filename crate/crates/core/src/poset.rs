//! Finite partially ordered sets.
//!
//! A [`Poset`] stores its order as a fully closed `n × n` relation table, so
//! `leq` is a single lookup. Covering pairs are accepted as an input
//! convenience and closed reflexively and transitively on construction.
//!
//! Elements are identified by [`Element`], an index into the carrier in
//! declaration order. Set-valued results are [`Subset`]s, which iterate in
//! carrier order.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::ControlFlow;

use thiserror::Error;

/// An element of a poset's carrier, identified by its declaration index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element(usize);

impl Element {
    pub(crate) const fn new(index: usize) -> Self {
        Element(index)
    }

    pub const fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrderError {
    #[error("a poset needs at least one element")]
    EmptyCarrier,
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("order is not antisymmetric: `{0}` ⊑ `{1}` and `{1}` ⊑ `{0}`")]
    AntisymmetryViolation(String, String),
    #[error("relation is not reflexive: missing (`{0}`, `{0}`)")]
    NotReflexive(String),
    #[error("relation is not transitive: (`{0}`, `{1}`) and (`{1}`, `{2}`) present, (`{0}`, `{2}`) missing")]
    NotTransitive(String, String, String),
    #[error("element {0} is not in the carrier")]
    UnknownElement(Element),
    #[error("subset is empty")]
    EmptySubset,
}

/// How the pairs handed to [`Poset::build`] are interpreted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelationInput {
    /// Generating pairs; the order is their reflexive-transitive closure.
    Covers,
    /// The complete order relation, reflexive pairs included.
    Full,
}

/// A set of carrier elements. Iteration follows carrier order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset(BTreeSet<Element>);

impl Subset {
    pub fn new() -> Self {
        Subset(BTreeSet::new())
    }

    pub fn insert(&mut self, e: Element) -> bool {
        self.0.insert(e)
    }

    pub fn contains(&self, e: Element) -> bool {
        self.0.contains(&e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Element> + '_ {
        self.0.iter().copied()
    }

    pub fn first(&self) -> Option<Element> {
        self.0.first().copied()
    }

    pub fn is_subset(&self, other: &Subset) -> bool {
        self.0.is_subset(&other.0)
    }

    /// First element (in carrier order) of the symmetric difference.
    pub fn first_difference(&self, other: &Subset) -> Option<Element> {
        self.0.symmetric_difference(&other.0).min().copied()
    }
}

impl FromIterator<Element> for Subset {
    fn from_iter<I: IntoIterator<Item = Element>>(iter: I) -> Self {
        Subset(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a Subset {
    type Item = Element;
    type IntoIter = std::iter::Copied<std::collections::btree_set::Iter<'a, Element>>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter().copied()
    }
}

/// Why a finite poset fails to be a complete lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LatticeViolation {
    NoBottom,
    NoTop,
    NoJoin(Element, Element),
    NoMeet(Element, Element),
}

/// A finite poset with a closed relation table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    table: Vec<bool>,
    bottom: Option<Element>,
    top: Option<Element>,
}

impl Poset {
    /// Builds a poset from labels and label pairs.
    ///
    /// With [`RelationInput::Covers`] the pairs generate the order. With
    /// [`RelationInput::Full`] they must already be the whole relation; it is
    /// checked for reflexivity, antisymmetry and transitivity.
    pub fn build<L, P, A, B>(labels: L, pairs: P, input: RelationInput) -> Result<Self, OrderError>
    where
        L: IntoIterator,
        L::Item: Into<String>,
        P: IntoIterator<Item = (A, B)>,
        A: AsRef<str>,
        B: AsRef<str>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let index = index_labels(&labels)?;
        let n = labels.len();
        let mut table = vec![false; n * n];
        for (a, b) in pairs {
            let a = lookup(&index, a.as_ref())?;
            let b = lookup(&index, b.as_ref())?;
            table[a * n + b] = true;
        }
        match input {
            RelationInput::Covers => {
                for i in 0..n {
                    table[i * n + i] = true;
                }
                close_transitively(&mut table, n);
            }
            RelationInput::Full => {
                if let Some(i) = (0..n).find(|&i| !table[i * n + i]) {
                    return Err(OrderError::NotReflexive(labels[i].clone()));
                }
                for a in 0..n {
                    for b in 0..n {
                        if !table[a * n + b] {
                            continue;
                        }
                        for c in 0..n {
                            if table[b * n + c] && !table[a * n + c] {
                                return Err(OrderError::NotTransitive(
                                    labels[a].clone(),
                                    labels[b].clone(),
                                    labels[c].clone(),
                                ));
                            }
                        }
                    }
                }
            }
        }
        Self::from_closed_table(labels, index, table)
    }

    /// Builds a poset from covering pairs.
    pub fn from_covers<L, P, A, B>(labels: L, covers: P) -> Result<Self, OrderError>
    where
        L: IntoIterator,
        L::Item: Into<String>,
        P: IntoIterator<Item = (A, B)>,
        A: AsRef<str>,
        B: AsRef<str>,
    {
        Self::build(labels, covers, RelationInput::Covers)
    }

    /// Builds a poset from an order predicate over carrier indices. The
    /// predicate must describe a complete partial order; it is validated as
    /// with [`RelationInput::Full`].
    pub fn from_relation<L>(
        labels: L,
        leq: impl Fn(usize, usize) -> bool,
    ) -> Result<Self, OrderError>
    where
        L: IntoIterator,
        L::Item: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let n = labels.len();
        let mut pairs = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if leq(a, b) {
                    pairs.push((labels[a].clone(), labels[b].clone()));
                }
            }
        }
        Self::build(labels, pairs, RelationInput::Full)
    }

    fn from_closed_table(
        labels: Vec<String>,
        index: HashMap<String, usize>,
        table: Vec<bool>,
    ) -> Result<Self, OrderError> {
        let n = labels.len();
        for a in 0..n {
            for b in a + 1..n {
                if table[a * n + b] && table[b * n + a] {
                    return Err(OrderError::AntisymmetryViolation(
                        labels[a].clone(),
                        labels[b].clone(),
                    ));
                }
            }
        }
        let bottom = (0..n)
            .find(|&a| (0..n).all(|b| table[a * n + b]))
            .map(Element);
        let top = (0..n)
            .find(|&a| (0..n).all(|b| table[b * n + a]))
            .map(Element);
        Ok(Poset {
            labels,
            index,
            table,
            bottom,
            top,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    /// Always false: construction rejects empty carriers.
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Label of `e`. Panics if `e` is not in the carrier.
    pub fn label(&self, e: Element) -> &str {
        &self.labels[e.0]
    }

    pub fn element(&self, label: &str) -> Result<Element, OrderError> {
        lookup(&self.index, label).map(Element)
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.len()).map(Element)
    }

    pub fn carrier(&self) -> Subset {
        self.elements().collect()
    }

    pub fn contains(&self, e: Element) -> bool {
        e.0 < self.len()
    }

    pub fn check(&self, e: Element) -> Result<Element, OrderError> {
        if self.contains(e) {
            Ok(e)
        } else {
            Err(OrderError::UnknownElement(e))
        }
    }

    pub fn check_subset(&self, s: &Subset) -> Result<(), OrderError> {
        s.iter().try_for_each(|e| self.check(e).map(drop))
    }

    /// Builds a subset from labels.
    pub fn subset<'a>(
        &self,
        labels: impl IntoIterator<Item = &'a str>,
    ) -> Result<Subset, OrderError> {
        labels.into_iter().map(|l| self.element(l)).collect()
    }

    pub fn labels_of(&self, s: &Subset) -> Vec<String> {
        s.iter().map(|e| self.label(e).to_owned()).collect()
    }

    /// `a ⊑ b`. Panics if either element is outside the carrier.
    #[inline]
    pub fn leq(&self, a: Element, b: Element) -> bool {
        let n = self.len();
        assert!(a.0 < n && b.0 < n, "element outside carrier");
        self.table[a.0 * n + b.0]
    }

    pub fn try_leq(&self, a: Element, b: Element) -> Result<bool, OrderError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.leq(a, b))
    }

    pub fn lt(&self, a: Element, b: Element) -> bool {
        a != b && self.leq(a, b)
    }

    pub fn comparable(&self, a: Element, b: Element) -> bool {
        self.leq(a, b) || self.leq(b, a)
    }

    pub fn bottom(&self) -> Option<Element> {
        self.bottom
    }

    pub fn top(&self) -> Option<Element> {
        self.top
    }

    /// Principal filter `↑a`.
    pub fn up_set(&self, a: Element) -> Subset {
        self.elements().filter(|&x| self.leq(a, x)).collect()
    }

    pub fn down_set(&self, a: Element) -> Subset {
        self.elements().filter(|&x| self.leq(x, a)).collect()
    }

    /// The covering pairs (transitive reduction), sorted by carrier order.
    pub fn covers(&self) -> Vec<(Element, Element)> {
        let mut out = Vec::new();
        for a in self.elements() {
            for b in self.elements() {
                if self.lt(a, b) && !self.elements().any(|c| self.lt(a, c) && self.lt(c, b)) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// A fixed linear extension: elements sorted by down-set size, ties by
    /// carrier index.
    pub fn linear_extension(&self) -> Vec<Element> {
        let mut order: Vec<Element> = self.elements().collect();
        order.sort_by_key(|&e| (self.down_set(e).len(), e.0));
        order
    }

    pub fn is_chain(&self, s: &Subset) -> Result<bool, OrderError> {
        self.check_subset(s)?;
        let members: Vec<Element> = s.iter().collect();
        Ok(members
            .iter()
            .enumerate()
            .all(|(i, &a)| members[i + 1..].iter().all(|&b| self.comparable(a, b))))
    }

    /// Non-empty, and every pair of members has an upper bound inside the set.
    pub fn is_directed(&self, s: &Subset) -> Result<bool, OrderError> {
        self.check_subset(s)?;
        if s.is_empty() {
            return Ok(false);
        }
        Ok(s.iter().all(|a| {
            s.iter()
                .all(|b| s.iter().any(|z| self.leq(a, z) && self.leq(b, z)))
        }))
    }

    pub fn upper_bounds(&self, s: &Subset) -> Result<Subset, OrderError> {
        self.check_subset(s)?;
        Ok(self
            .elements()
            .filter(|&u| s.iter().all(|x| self.leq(x, u)))
            .collect())
    }

    pub fn lower_bounds(&self, s: &Subset) -> Result<Subset, OrderError> {
        self.check_subset(s)?;
        Ok(self
            .elements()
            .filter(|&l| s.iter().all(|x| self.leq(l, x)))
            .collect())
    }

    /// The element of `s` above every other member, if there is one.
    pub fn maximum(&self, s: &Subset) -> Option<Element> {
        s.iter().find(|&m| s.iter().all(|x| self.leq(x, m)))
    }

    pub fn minimum(&self, s: &Subset) -> Option<Element> {
        s.iter().find(|&m| s.iter().all(|x| self.leq(m, x)))
    }

    /// Least upper bound of `s` in the whole carrier. `sup ∅` is the bottom.
    pub fn sup_subset(&self, s: &Subset) -> Result<Option<Element>, OrderError> {
        Ok(self.minimum(&self.upper_bounds(s)?))
    }

    /// Greatest lower bound of `s` in the whole carrier. `inf ∅` is the top.
    pub fn inf_subset(&self, s: &Subset) -> Result<Option<Element>, OrderError> {
        Ok(self.maximum(&self.lower_bounds(s)?))
    }

    pub fn join(&self, a: Element, b: Element) -> Option<Element> {
        let ub: Subset = self
            .elements()
            .filter(|&u| self.leq(a, u) && self.leq(b, u))
            .collect();
        self.minimum(&ub)
    }

    pub fn meet(&self, a: Element, b: Element) -> Option<Element> {
        let lb: Subset = self
            .elements()
            .filter(|&l| self.leq(l, a) && self.leq(l, b))
            .collect();
        self.maximum(&lb)
    }

    /// On a finite poset every non-empty chain has a maximum, so chain
    /// completeness reduces to the existence of `sup ∅ = ⊥`.
    pub fn is_chain_complete(&self) -> bool {
        self.bottom.is_some()
    }

    /// Checks chain completeness from the definition: every chain, the empty
    /// one included, has a least upper bound. Exponential in the width.
    pub fn is_chain_complete_exhaustive(&self) -> bool {
        let mut ok = true;
        self.for_each_chain(|chain| {
            let s: Subset = chain.iter().copied().collect();
            if self
                .minimum(&self.upper_bounds(&s).expect("chain from carrier"))
                .is_none()
            {
                ok = false;
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        });
        ok
    }

    /// Visits every chain of the poset exactly once, starting with the empty
    /// chain. Each chain is passed in ascending order.
    pub fn for_each_chain(&self, mut visit: impl FnMut(&[Element]) -> ControlFlow<()>) {
        let order = self.linear_extension();
        let mut stack = Vec::new();
        let _ = self.extend_chains(&order, 0, &mut stack, &mut visit);
    }

    fn extend_chains(
        &self,
        order: &[Element],
        from: usize,
        chain: &mut Vec<Element>,
        visit: &mut impl FnMut(&[Element]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        visit(chain)?;
        for i in from..order.len() {
            let next = order[i];
            if chain.last().is_none_or(|&last| self.leq(last, next)) {
                chain.push(next);
                let flow = self.extend_chains(order, i + 1, chain, visit);
                chain.pop();
                flow?;
            }
        }
        ControlFlow::Continue(())
    }

    /// The first reason (in carrier order) the poset is not a complete
    /// lattice. A finite poset is a complete lattice iff it is bounded and
    /// every pair has a join and a meet.
    pub fn lattice_violation(&self) -> Option<LatticeViolation> {
        if self.bottom.is_none() {
            return Some(LatticeViolation::NoBottom);
        }
        if self.top.is_none() {
            return Some(LatticeViolation::NoTop);
        }
        for a in self.elements() {
            for b in self.elements().skip(a.0 + 1) {
                if self.join(a, b).is_none() {
                    return Some(LatticeViolation::NoJoin(a, b));
                }
                if self.meet(a, b).is_none() {
                    return Some(LatticeViolation::NoMeet(a, b));
                }
            }
        }
        None
    }

    pub fn is_complete_lattice(&self) -> bool {
        self.lattice_violation().is_none()
    }

    /// Checks every one of the `2^n` subsets for a sup and an inf.
    ///
    /// Panics when the carrier has more than 24 elements.
    pub fn is_complete_lattice_exhaustive(&self) -> bool {
        let n = self.len();
        assert!(n <= 24, "exhaustive lattice check limited to 24 elements");
        (0u32..1 << n).all(|mask| {
            let s: Subset = (0..n).filter(|i| mask >> i & 1 == 1).map(Element).collect();
            self.sup_subset(&s).expect("carrier subset").is_some()
                && self.inf_subset(&s).expect("carrier subset").is_some()
        })
    }

    /// The subposet carried by `s` with the restricted order. Elements of the
    /// result are re-indexed in carrier order of `s`.
    pub fn induced_subposet(&self, s: &Subset) -> Result<Poset, OrderError> {
        self.check_subset(s)?;
        if s.is_empty() {
            return Err(OrderError::EmptySubset);
        }
        let members: Vec<Element> = s.iter().collect();
        let labels: Vec<String> = members.iter().map(|&e| self.label(e).to_owned()).collect();
        let index = index_labels(&labels)?;
        let m = members.len();
        let mut table = vec![false; m * m];
        for (i, &a) in members.iter().enumerate() {
            for (j, &b) in members.iter().enumerate() {
                table[i * m + j] = self.leq(a, b);
            }
        }
        Self::from_closed_table(labels, index, table)
    }
}

fn index_labels(labels: &[String]) -> Result<HashMap<String, usize>, OrderError> {
    if labels.is_empty() {
        return Err(OrderError::EmptyCarrier);
    }
    let mut index = HashMap::with_capacity(labels.len());
    for (i, l) in labels.iter().enumerate() {
        if index.insert(l.clone(), i).is_some() {
            return Err(OrderError::DuplicateLabel(l.clone()));
        }
    }
    Ok(index)
}

fn lookup(index: &HashMap<String, usize>, label: &str) -> Result<usize, OrderError> {
    index
        .get(label)
        .copied()
        .ok_or_else(|| OrderError::UnknownLabel(label.to_owned()))
}

// Warshall.
fn close_transitively(table: &mut [bool], n: usize) {
    for k in 0..n {
        for i in 0..n {
            if !table[i * n + k] {
                continue;
            }
            for j in 0..n {
                if table[k * n + j] {
                    table[i * n + j] = true;
                }
            }
        }
    }
}
