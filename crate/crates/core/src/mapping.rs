//! Endomaps on a finite poset, map families, and their composition closure.

use std::collections::HashMap;
use std::ops::ControlFlow;
use std::sync::Arc;

use thiserror::Error;

use crate::poset::{Element, OrderError, Poset, Subset};

/// Above this carrier size `is_chain_continuous` uses the isotone
/// equivalence instead of enumerating chains.
pub const LITERAL_CHAIN_CHECK_LIMIT: usize = 12;

/// Default bound on the number of distinct maps in a composition closure.
pub const DEFAULT_CLOSURE_BUDGET: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error("map `{map}` has no image for `{element}`")]
    MissingAssignment { map: String, element: String },
    #[error("map `{map}` assigns `{element}` more than once")]
    DuplicateAssignment { map: String, element: String },
    #[error("maps `{0}` and `{1}` are defined over different posets")]
    PosetMismatch(String, String),
    #[error("a family needs at least one map")]
    EmptyFamily,
    #[error("duplicate map name `{0}`")]
    DuplicateMapName(String),
    #[error("no map named `{0}` in the family")]
    UnknownMap(String),
    #[error("composition closure exceeds {0} distinct maps")]
    ClosureBudgetExceeded(usize),
}

/// A total map from a poset's carrier into itself.
///
/// Equality is extensional: two tables over the same poset are equal iff
/// they agree on every element. The name is metadata.
#[derive(Clone, Debug)]
pub struct MapTable {
    poset: Arc<Poset>,
    name: String,
    table: Vec<Element>,
}

impl PartialEq for MapTable {
    fn eq(&self, other: &Self) -> bool {
        same_poset(&self.poset, &other.poset) && self.table == other.table
    }
}

impl Eq for MapTable {}

fn same_poset(a: &Arc<Poset>, b: &Arc<Poset>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl MapTable {
    /// Builds a map from `(argument, image)` label pairs, which must cover
    /// every carrier element exactly once.
    pub fn build<A, B>(
        poset: &Arc<Poset>,
        name: impl Into<String>,
        assignments: impl IntoIterator<Item = (A, B)>,
    ) -> Result<Self, MapError>
    where
        A: AsRef<str>,
        B: AsRef<str>,
    {
        let name = name.into();
        let mut table: Vec<Option<Element>> = vec![None; poset.len()];
        for (arg, image) in assignments {
            let x = poset.element(arg.as_ref())?;
            let y = poset.element(image.as_ref())?;
            if table[x.index()].replace(y).is_some() {
                return Err(MapError::DuplicateAssignment {
                    map: name,
                    element: arg.as_ref().to_owned(),
                });
            }
        }
        let table = table
            .into_iter()
            .enumerate()
            .map(|(i, y)| {
                y.ok_or_else(|| MapError::MissingAssignment {
                    map: name.clone(),
                    element: poset.labels()[i].clone(),
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(MapTable {
            poset: Arc::clone(poset),
            name,
            table,
        })
    }

    /// Tabulates `f` over the carrier.
    pub fn from_fn(
        poset: &Arc<Poset>,
        name: impl Into<String>,
        mut f: impl FnMut(Element) -> Element,
    ) -> Result<Self, MapError> {
        let table = poset
            .elements()
            .map(|x| poset.check(f(x)))
            .collect::<Result<_, _>>()?;
        Ok(MapTable {
            poset: Arc::clone(poset),
            name: name.into(),
            table,
        })
    }

    pub fn identity(poset: &Arc<Poset>) -> Self {
        MapTable {
            poset: Arc::clone(poset),
            name: "id".to_owned(),
            table: poset.elements().collect(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn poset(&self) -> &Arc<Poset> {
        &self.poset
    }

    pub fn table(&self) -> &[Element] {
        &self.table
    }

    /// `f(x)`. Panics if `x` is outside the carrier.
    #[inline]
    pub fn apply(&self, x: Element) -> Element {
        self.table[x.index()]
    }

    /// Image of a subset.
    pub fn image(&self, s: &Subset) -> Subset {
        s.iter().map(|x| self.apply(x)).collect()
    }

    pub fn is_extensive_at(&self, x: Element) -> bool {
        self.poset.leq(x, self.apply(x))
    }

    /// First pair `x ⊑ y` (in carrier order) with `f(x) ⋢ f(y)`.
    pub fn isotonicity_violation(&self) -> Option<(Element, Element)> {
        let p = &self.poset;
        p.elements()
            .flat_map(|x| p.elements().map(move |y| (x, y)))
            .find(|&(x, y)| p.leq(x, y) && !p.leq(self.apply(x), self.apply(y)))
    }

    pub fn is_isotone(&self) -> bool {
        self.isotonicity_violation().is_none()
    }

    /// On finite posets chain continuity coincides with isotonicity. Up to
    /// [`LITERAL_CHAIN_CHECK_LIMIT`] elements the definition is checked
    /// directly over all chains; above it the isotone test is used.
    pub fn is_chain_continuous(&self) -> bool {
        if self.poset.len() <= LITERAL_CHAIN_CHECK_LIMIT {
            self.chain_continuity_violation().is_none()
        } else {
            self.is_isotone()
        }
    }

    /// First non-empty chain `C` with `f(sup C) ≠ sup f[C]`, found by
    /// enumerating every chain. Exponential in the poset's width.
    pub fn chain_continuity_violation(&self) -> Option<Vec<Element>> {
        let mut witness = None;
        self.poset.for_each_chain(|chain| {
            if !chain.is_empty() && !self.continuous_on_chain(chain) {
                witness = Some(chain.to_vec());
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        });
        witness
    }

    /// Whether `f(sup C) = sup {f(w) : w ∈ C}` for one non-empty chain.
    pub fn continuous_on_chain(&self, chain: &[Element]) -> bool {
        let p = &self.poset;
        let c: Subset = chain.iter().copied().collect();
        let Some(top) = p.sup_subset(&c).expect("chain in carrier") else {
            return false;
        };
        p.sup_subset(&self.image(&c)).expect("image in carrier") == Some(self.apply(top))
    }

    /// `self ∘ inner`, i.e. `x ↦ self(inner(x))`, named `self·inner`.
    pub fn compose(&self, inner: &MapTable) -> Result<MapTable, MapError> {
        if !same_poset(&self.poset, &inner.poset) {
            return Err(MapError::PosetMismatch(
                self.name.clone(),
                inner.name.clone(),
            ));
        }
        Ok(MapTable {
            poset: Arc::clone(&self.poset),
            name: format!("{}·{}", self.name, inner.name),
            table: inner.table.iter().map(|&x| self.apply(x)).collect(),
        })
    }

    /// First element at which `self ∘ other` and `other ∘ self` disagree.
    pub fn commutation_violation(&self, other: &MapTable) -> Option<Element> {
        self.poset
            .elements()
            .find(|&x| self.apply(other.apply(x)) != other.apply(self.apply(x)))
    }

    pub fn fixed_points(&self) -> Subset {
        self.poset
            .elements()
            .filter(|&x| self.apply(x) == x)
            .collect()
    }
}

/// A witness that two family members do not commute.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutationViolation {
    pub first: String,
    pub second: String,
    pub at: Element,
}

/// A witness that a family member is not isotone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsotonicityViolation {
    pub map: String,
    pub x: Element,
    pub y: Element,
}

/// A non-empty, named collection of maps over one shared poset.
/// Declaration order is preserved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family {
    poset: Arc<Poset>,
    members: Vec<MapTable>,
}

impl Family {
    pub fn new(members: impl IntoIterator<Item = MapTable>) -> Result<Self, MapError> {
        let members: Vec<MapTable> = members.into_iter().collect();
        let first = members.first().ok_or(MapError::EmptyFamily)?;
        let poset = Arc::clone(&first.poset);
        for (i, m) in members.iter().enumerate() {
            if !same_poset(&poset, &m.poset) {
                return Err(MapError::PosetMismatch(first.name.clone(), m.name.clone()));
            }
            if members[..i].iter().any(|o| o.name == m.name) {
                return Err(MapError::DuplicateMapName(m.name.clone()));
            }
        }
        Ok(Family { poset, members })
    }

    pub fn singleton(map: MapTable) -> Self {
        Family {
            poset: Arc::clone(&map.poset),
            members: vec![map],
        }
    }

    pub fn poset(&self) -> &Arc<Poset> {
        &self.poset
    }

    pub fn members(&self) -> &[MapTable] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    /// Always false: families are non-empty.
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.members.iter().map(|m| m.name.clone()).collect()
    }

    pub fn get(&self, name: &str) -> Result<&MapTable, MapError> {
        self.members
            .iter()
            .find(|m| m.name == name)
            .ok_or_else(|| MapError::UnknownMap(name.to_owned()))
    }

    /// The sub-family with the given names, in the order given.
    pub fn select<S: AsRef<str>>(&self, names: &[S]) -> Result<Family, MapError> {
        let members = names
            .iter()
            .map(|n| self.get(n.as_ref()).cloned())
            .collect::<Result<Vec<_>, _>>()?;
        Family::new(members)
    }

    pub fn isotonicity_violation(&self) -> Option<IsotonicityViolation> {
        self.members.iter().find_map(|m| {
            m.isotonicity_violation()
                .map(|(x, y)| IsotonicityViolation {
                    map: m.name.clone(),
                    x,
                    y,
                })
        })
    }

    pub fn is_isotone(&self) -> bool {
        self.members.iter().all(MapTable::is_isotone)
    }

    /// First non-commuting pair in declaration order, with the first element
    /// where the two composites differ.
    pub fn commutation_violation(&self) -> Option<CommutationViolation> {
        self.members.iter().enumerate().find_map(|(i, f)| {
            self.members[i + 1..].iter().find_map(|g| {
                f.commutation_violation(g).map(|at| CommutationViolation {
                    first: f.name.clone(),
                    second: g.name.clone(),
                    at,
                })
            })
        })
    }

    pub fn is_commutative(&self) -> bool {
        self.commutation_violation().is_none()
    }

    /// `ext F = {x : x ⊑ f(x) for every f ∈ F}`.
    pub fn extensivity_domain(&self) -> Subset {
        self.poset
            .elements()
            .filter(|&x| self.members.iter().all(|f| f.is_extensive_at(x)))
            .collect()
    }

    /// Closes the family under composition.
    ///
    /// Breadth-first by word length; each new map is `g ∘ φ` for a generator
    /// `g` and a map `φ` found one level earlier. Maps are deduplicated by
    /// table and keep the shortest witness word, ties going to the
    /// lexicographically smallest sequence of generator names.
    pub fn iteration_closure(&self, max_size: usize) -> Result<ClosureSet, MapError> {
        let mut known: HashMap<Vec<Element>, usize> = HashMap::new();
        let mut entries: Vec<ClosureEntry> = Vec::new();

        let mut level: Vec<(Vec<String>, MapTable)> = Vec::new();
        let mut level_index: HashMap<Vec<Element>, usize> = HashMap::new();
        for g in &self.members {
            offer(
                &mut level,
                &mut level_index,
                vec![g.name.clone()],
                g.clone(),
            );
        }

        while !level.is_empty() {
            if entries.len() + level.len() > max_size {
                return Err(MapError::ClosureBudgetExceeded(max_size));
            }
            level.sort_by(|a, b| a.0.cmp(&b.0));
            let start = entries.len();
            for (word, map) in level.drain(..) {
                known.insert(map.table.clone(), entries.len());
                let map = map.renamed(word.join("·"));
                entries.push(ClosureEntry { map, word });
            }
            level_index.clear();
            for entry in &entries[start..] {
                for g in &self.members {
                    let next = g.compose(&entry.map)?;
                    if known.contains_key(&next.table) {
                        continue;
                    }
                    let mut word = Vec::with_capacity(entry.word.len() + 1);
                    word.push(g.name.clone());
                    word.extend(entry.word.iter().cloned());
                    offer(&mut level, &mut level_index, word, next);
                }
            }
        }

        Ok(ClosureSet {
            poset: Arc::clone(&self.poset),
            entries,
        })
    }
}

fn offer(
    level: &mut Vec<(Vec<String>, MapTable)>,
    index: &mut HashMap<Vec<Element>, usize>,
    word: Vec<String>,
    map: MapTable,
) {
    match index.get(&map.table) {
        Some(&i) => {
            if word < level[i].0 {
                level[i].0 = word;
            }
        }
        None => {
            index.insert(map.table.clone(), level.len());
            level.push((word, map));
        }
    }
}

/// One member of a composition closure with a witness word over the
/// generator names (outermost map first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureEntry {
    pub map: MapTable,
    pub word: Vec<String>,
}

/// The distinct maps obtained as finite (non-empty) compositions of a
/// family's members.
#[derive(Clone, Debug)]
pub struct ClosureSet {
    poset: Arc<Poset>,
    entries: Vec<ClosureEntry>,
}

impl ClosureSet {
    pub fn poset(&self) -> &Arc<Poset> {
        &self.poset
    }

    pub fn entries(&self) -> &[ClosureEntry] {
        &self.entries
    }

    pub fn maps(&self) -> impl Iterator<Item = &MapTable> {
        self.entries.iter().map(|e| &e.map)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, map: &MapTable) -> bool {
        self.maps().any(|m| m == map)
    }

    /// The closure viewed as a family; member names are the witness words.
    pub fn as_family(&self) -> Family {
        Family {
            poset: Arc::clone(&self.poset),
            members: self.maps().cloned().collect(),
        }
    }

    /// `{φ(x) : φ in the closure}`.
    pub fn images(&self, x: Element) -> Subset {
        self.maps().map(|m| m.apply(x)).collect()
    }

    /// Whether composing any two members yields a member.
    pub fn is_closed(&self) -> bool {
        let tables: std::collections::HashSet<&[Element]> =
            self.maps().map(|m| m.table()).collect();
        self.maps().all(|f| {
            self.maps().all(|g| {
                let composite: Vec<Element> = g.table().iter().map(|&x| f.apply(x)).collect();
                tables.contains(composite.as_slice())
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> Arc<Poset> {
        let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let covers: Vec<(String, String)> = (1..n)
            .map(|i| ((i - 1).to_string(), i.to_string()))
            .collect();
        Arc::new(Poset::from_covers(labels, covers).unwrap())
    }

    fn powerset2() -> Arc<Poset> {
        Arc::new(
            Poset::from_covers(
                ["{}", "{1}", "{2}", "{1,2}"],
                [
                    ("{}", "{1}"),
                    ("{}", "{2}"),
                    ("{1}", "{1,2}"),
                    ("{2}", "{1,2}"),
                ],
            )
            .unwrap(),
        )
    }

    fn map(p: &Arc<Poset>, name: &str, pairs: &[(&str, &str)]) -> MapTable {
        MapTable::build(p, name, pairs.iter().copied()).unwrap()
    }

    fn join_with(p: &Arc<Poset>, name: &str, a: &str) -> MapTable {
        let a = p.element(a).unwrap();
        MapTable::from_fn(p, name, |x| p.join(x, a).unwrap()).unwrap()
    }

    fn meet_with(p: &Arc<Poset>, name: &str, a: &str) -> MapTable {
        let a = p.element(a).unwrap();
        MapTable::from_fn(p, name, |x| p.meet(x, a).unwrap()).unwrap()
    }

    fn succ(p: &Arc<Poset>) -> MapTable {
        map(p, "f", &[("0", "1"), ("1", "2"), ("2", "2")])
    }

    #[test]
    fn build_map_cases() {
        let p = chain(3);
        let f = succ(&p);
        assert_eq!(f.apply(p.element("0").unwrap()), p.element("1").unwrap());
        assert_eq!(
            MapTable::build(&p, "g", [("0", "1"), ("1", "2")]).unwrap_err(),
            MapError::MissingAssignment {
                map: "g".into(),
                element: "2".into()
            }
        );
        assert_eq!(
            MapTable::build(&p, "g", [("0", "1"), ("1", "9"), ("2", "2")]).unwrap_err(),
            MapError::Order(OrderError::UnknownLabel("9".into()))
        );
        assert_eq!(
            MapTable::build(&p, "g", [("0", "1"), ("0", "2"), ("1", "2"), ("2", "2")]).unwrap_err(),
            MapError::DuplicateAssignment {
                map: "g".into(),
                element: "0".into()
            }
        );
        assert!(MapTable::identity(&p).is_isotone());
    }

    #[test]
    fn isotonicity() {
        let p = chain(3);
        assert!(succ(&p).is_isotone());
        let bad = map(&p, "g", &[("0", "2"), ("1", "0"), ("2", "2")]);
        assert!(!bad.is_isotone());
        assert_eq!(
            bad.isotonicity_violation(),
            Some((p.element("0").unwrap(), p.element("1").unwrap()))
        );
        assert!(MapTable::identity(&p).is_isotone());
    }

    #[test]
    fn chain_continuity() {
        let p = chain(3);
        assert!(succ(&p).is_chain_continuous());
        let bad = map(&p, "g", &[("0", "2"), ("1", "0"), ("2", "2")]);
        assert!(!bad.is_chain_continuous());
        let witness = bad.chain_continuity_violation().unwrap();
        assert_eq!(
            witness,
            vec![p.element("0").unwrap(), p.element("1").unwrap()]
        );
        assert!(MapTable::identity(&p).is_chain_continuous());
    }

    #[test]
    fn composition() {
        let p = chain(3);
        let f = succ(&p);
        let ff = f.compose(&f).unwrap();
        assert_eq!(ff, map(&p, "ff", &[("0", "2"), ("1", "2"), ("2", "2")]));
        assert_eq!(ff.name(), "f·f");
        assert_eq!(f.compose(&MapTable::identity(&p)).unwrap(), f);

        let q = powerset2();
        let j1 = join_with(&q, "j1", "{1}");
        let j2 = join_with(&q, "j2", "{2}");
        let j12 = join_with(&q, "j12", "{1,2}");
        assert_eq!(j1.compose(&j2).unwrap(), j12);

        assert_eq!(
            f.compose(&j1).unwrap_err(),
            MapError::PosetMismatch("f".into(), "j1".into())
        );
    }

    #[test]
    fn commutativity() {
        let q = powerset2();
        let fam = Family::new([join_with(&q, "j1", "{1}"), join_with(&q, "j2", "{2}")]).unwrap();
        assert!(fam.is_commutative());

        let p = chain(3);
        let f = succ(&p);
        let powers = Family::new([f.clone(), f.compose(&f).unwrap()]).unwrap();
        assert!(powers.is_commutative());

        let mixed = Family::new([join_with(&q, "j1", "{1}"), meet_with(&q, "m2", "{2}")]).unwrap();
        assert_eq!(
            mixed.commutation_violation(),
            Some(CommutationViolation {
                first: "j1".into(),
                second: "m2".into(),
                at: q.element("{}").unwrap(),
            })
        );
    }

    #[test]
    fn family_validation() {
        let p = chain(3);
        assert_eq!(Family::new(Vec::new()).unwrap_err(), MapError::EmptyFamily);
        assert_eq!(
            Family::new([succ(&p), succ(&p)]).unwrap_err(),
            MapError::DuplicateMapName("f".into())
        );
        let q = powerset2();
        assert!(matches!(
            Family::new([succ(&p), MapTable::identity(&q)]),
            Err(MapError::PosetMismatch(..))
        ));
        let fam = Family::new([succ(&p), MapTable::identity(&p)]).unwrap();
        assert_eq!(fam.select(&["id"]).unwrap().names(), ["id"]);
        assert_eq!(
            fam.select(&["nope"]).unwrap_err(),
            MapError::UnknownMap("nope".into())
        );
    }

    #[test]
    fn closure_of_successor() {
        let p = chain(3);
        let f = succ(&p);
        let c = Family::singleton(f.clone())
            .iteration_closure(DEFAULT_CLOSURE_BUDGET)
            .unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.entries()[0].map, f);
        assert_eq!(c.entries()[1].word, ["f", "f"]);
        assert_eq!(c.entries()[1].map, f.compose(&f).unwrap());
        assert!(c.is_closed());
    }

    #[test]
    fn closure_of_identity() {
        let p = chain(3);
        let c = Family::singleton(MapTable::identity(&p))
            .iteration_closure(10)
            .unwrap();
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn closure_of_join_translations() {
        let q = powerset2();
        let fam = Family::new([join_with(&q, "j1", "{1}"), join_with(&q, "j2", "{2}")]).unwrap();
        let c = fam.iteration_closure(DEFAULT_CLOSURE_BUDGET).unwrap();
        assert_eq!(c.len(), 3);
        assert!(c.contains(&join_with(&q, "j12", "{1,2}")));
        // both j1·j2 and j2·j1 reach the third map; the smaller word wins
        assert_eq!(c.entries()[2].word, ["j1", "j2"]);
        assert!(c.is_closed());
    }

    #[test]
    fn closure_budget() {
        let q = powerset2();
        let fam = Family::new([join_with(&q, "j1", "{1}"), join_with(&q, "j2", "{2}")]).unwrap();
        assert_eq!(
            fam.iteration_closure(2).unwrap_err(),
            MapError::ClosureBudgetExceeded(2)
        );
    }

    #[test]
    fn extensivity() {
        let q = powerset2();
        assert_eq!(
            Family::singleton(join_with(&q, "j1", "{1}")).extensivity_domain(),
            q.carrier()
        );
        let p = chain(3);
        let swap = map(&p, "s", &[("0", "1"), ("1", "0"), ("2", "2")]);
        assert_eq!(
            Family::singleton(swap).extensivity_domain(),
            p.subset(["0", "2"]).unwrap()
        );
        assert_eq!(
            Family::singleton(MapTable::identity(&p)).extensivity_domain(),
            p.carrier()
        );
    }
}
