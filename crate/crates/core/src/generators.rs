//! Standard posets, canonical commuting families and seeded random instances.
//!
//! All randomness comes from SplitMix64 (`state += 0x9E3779B97F4A7C15`,
//! then the standard xor-shift-multiply finaliser), seeded directly with the
//! 64-bit `rng_seed`. Bounded draws use `next_u64() % n`. Equal seeds give
//! byte-identical instances.

use std::fmt;
use std::sync::Arc;

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mapping::{Family, MapError, MapTable};
use crate::poset::{Element, OrderError, Poset, Subset};

/// Identifier of the random number generator recorded in emitted files.
pub const RNG_ALGORITHM: &str = "splitmix64";

/// Largest carrier the generators will build.
pub const MAX_GENERATED_CARRIER: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("bad generator spec: {0}")]
    BadSpec(String),
    #[error("join translations need pairwise joins: `{0}` and `{1}` have none")]
    NotALattice(String, String),
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error(transparent)]
    Map(#[from] MapError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    /// `0 < 1 < … < n−1`.
    Chain,
    /// `n` pairwise incomparable elements above a common bottom.
    AntichainPlusBottom,
    /// Subsets of `{1..n}` under inclusion.
    Powerset,
    /// Divisors of `n` under divisibility.
    Divisor,
    /// Product of an `n`-chain and an `m`-chain, ordered componentwise.
    Product,
    /// The five-element modular lattice M3.
    #[value(name = "diamond-m3")]
    DiamondM3,
    /// The five-element non-modular lattice N5.
    #[value(name = "pentagon-n5")]
    PentagonN5,
    /// A random DAG on `n` elements, closed transitively, with a bottom adjoined.
    Random,
}

impl fmt::Display for GenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GenKind::Chain => "chain",
            GenKind::AntichainPlusBottom => "antichain-plus-bottom",
            GenKind::Powerset => "powerset",
            GenKind::Divisor => "divisor",
            GenKind::Product => "product",
            GenKind::DiamondM3 => "diamond-m3",
            GenKind::PentagonN5 => "pentagon-n5",
            GenKind::Random => "random",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSpec {
    pub kind: GenKind,
    pub n: usize,
    /// Second factor for [`GenKind::Product`]; ignored elsewhere.
    pub m: usize,
    pub rng_seed: u64,
}

impl GenSpec {
    pub fn new(kind: GenKind, n: usize) -> Self {
        GenSpec {
            kind,
            n,
            m: n,
            rng_seed: 0,
        }
    }

    pub fn with_m(mut self, m: usize) -> Self {
        self.m = m;
        self
    }

    pub fn with_seed(mut self, rng_seed: u64) -> Self {
        self.rng_seed = rng_seed;
        self
    }
}

/// Builds the poset described by `spec`.
pub fn make_standard_poset(spec: &GenSpec) -> Result<Poset, GenError> {
    let n = spec.n;
    let too_big = |size: usize| {
        if size > MAX_GENERATED_CARRIER {
            Err(GenError::BadSpec(format!(
                "{} would have {size} elements (limit {MAX_GENERATED_CARRIER})",
                spec.kind
            )))
        } else {
            Ok(())
        }
    };
    let positive = || {
        if n == 0 {
            Err(GenError::BadSpec(format!("{} needs n ≥ 1", spec.kind)))
        } else {
            Ok(())
        }
    };
    let poset = match spec.kind {
        GenKind::Chain => {
            positive()?;
            too_big(n)?;
            Poset::from_relation((0..n).map(|i| i.to_string()), |a, b| a <= b)?
        }
        GenKind::AntichainPlusBottom => {
            positive()?;
            too_big(n + 1)?;
            let labels = std::iter::once("bot".to_owned()).chain((1..=n).map(|i| format!("a{i}")));
            Poset::from_relation(labels, |a, b| a == 0 || a == b)?
        }
        GenKind::Powerset => {
            if n > 6 {
                return Err(GenError::BadSpec(format!(
                    "powerset of {n} points exceeds the carrier limit"
                )));
            }
            let masks: Vec<u32> = {
                let mut m: Vec<u32> = (0..1u32 << n).collect();
                m.sort_by_key(|x| (x.count_ones(), *x));
                m
            };
            let labels = masks.iter().map(|&mask| {
                let items: Vec<String> = (0..n)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| (i + 1).to_string())
                    .collect();
                format!("{{{}}}", items.join(","))
            });
            Poset::from_relation(labels, |a, b| masks[a] & !masks[b] == 0)?
        }
        GenKind::Divisor => {
            positive()?;
            let divisors: Vec<usize> = (1..=n).filter(|&d| n.is_multiple_of(d)).collect();
            too_big(divisors.len())?;
            Poset::from_relation(divisors.iter().map(|d| d.to_string()), |a, b| {
                divisors[b].is_multiple_of(divisors[a])
            })?
        }
        GenKind::Product => {
            let m = spec.m;
            if n == 0 || m == 0 {
                return Err(GenError::BadSpec("product needs n, m ≥ 1".to_owned()));
            }
            too_big(n * m)?;
            let cells: Vec<(usize, usize)> =
                (0..n).flat_map(|i| (0..m).map(move |j| (i, j))).collect();
            Poset::from_relation(cells.iter().map(|(i, j)| format!("({i},{j})")), |a, b| {
                cells[a].0 <= cells[b].0 && cells[a].1 <= cells[b].1
            })?
        }
        GenKind::DiamondM3 => Poset::from_covers(
            ["0", "a", "b", "c", "1"],
            [
                ("0", "a"),
                ("0", "b"),
                ("0", "c"),
                ("a", "1"),
                ("b", "1"),
                ("c", "1"),
            ],
        )?,
        GenKind::PentagonN5 => Poset::from_covers(
            ["0", "a", "b", "c", "1"],
            [("0", "a"), ("a", "b"), ("b", "1"), ("0", "c"), ("c", "1")],
        )?,
        GenKind::Random => {
            positive()?;
            too_big(n + 1)?;
            let mut rng = SplitMix64::seed_from_u64(spec.rng_seed);
            let labels: Vec<String> = std::iter::once("bot".to_owned())
                .chain((0..n).map(|i| format!("x{i}")))
                .collect();
            let mut covers = Vec::new();
            for i in 1..=n {
                covers.push((labels[0].clone(), labels[i].clone()));
            }
            // edges only go from lower to higher index, so the graph is acyclic
            for i in 1..=n {
                for j in i + 1..=n {
                    if below(&mut rng, 100) < 30 {
                        covers.push((labels[i].clone(), labels[j].clone()));
                    }
                }
            }
            Poset::from_covers(labels, covers)?
        }
    };
    Ok(poset)
}

fn below(rng: &mut SplitMix64, n: usize) -> usize {
    (rng.next_u64() % n as u64) as usize
}

/// `{x ↦ x ∨ a : a ∈ A}`, named `join_<label>`.
pub fn join_translation_family(
    poset: &Arc<Poset>,
    generators: &Subset,
) -> Result<Family, GenError> {
    poset.check_subset(generators)?;
    if generators.is_empty() {
        return Err(GenError::BadSpec(
            "join translations need a non-empty generator set".to_owned(),
        ));
    }
    let mut maps = Vec::with_capacity(generators.len());
    for a in generators {
        let mut missing = None;
        let map = MapTable::from_fn(poset, format!("join_{}", poset.label(a)), |x| {
            poset.join(x, a).unwrap_or_else(|| {
                missing.get_or_insert((x, a));
                x
            })
        })?;
        if let Some((x, a)) = missing {
            return Err(GenError::NotALattice(
                poset.label(x).to_owned(),
                poset.label(a).to_owned(),
            ));
        }
        maps.push(map);
    }
    Ok(Family::new(maps)?)
}

/// Draws an isotone map: along a fixed linear extension, each image is
/// chosen uniformly among the common upper bounds of the images already
/// assigned to the elements below. Where that set is empty (possible only
/// off lattices) the draw restarts; after 64 failed draws a random constant
/// map is returned.
pub fn random_isotone_map(poset: &Arc<Poset>, name: &str, rng: &mut SplitMix64) -> MapTable {
    let order = poset.linear_extension();
    'attempt: for _ in 0..64 {
        let mut table: Vec<Option<Element>> = vec![None; poset.len()];
        for &x in &order {
            let floor: Vec<Element> = poset
                .elements()
                .filter(|&y| poset.lt(y, x))
                .map(|y| table[y.index()].expect("linear extension visits lower elements first"))
                .collect();
            let candidates: Vec<Element> = poset
                .elements()
                .filter(|&z| floor.iter().all(|&w| poset.leq(w, z)))
                .collect();
            if candidates.is_empty() {
                continue 'attempt;
            }
            table[x.index()] = Some(candidates[below(rng, candidates.len())]);
        }
        return MapTable::from_fn(poset, name, |x| {
            table[x.index()].expect("every element assigned")
        })
        .expect("images lie in the carrier");
    }
    let c = Element::new(below(rng, poset.len()));
    MapTable::from_fn(poset, name, |_| c).expect("constant lies in the carrier")
}

/// A uniformly random table, isotone or not.
pub fn random_map(poset: &Arc<Poset>, name: &str, rng: &mut SplitMix64) -> MapTable {
    let n = poset.len();
    MapTable::from_fn(poset, name, |_| Element::new(below(rng, n)))
        .expect("images lie in the carrier")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyStrategy {
    /// `{f, f², …, fⁿ}` for a random isotone `f`, deduplicated.
    Powers,
    /// Join translations by randomly chosen elements.
    JoinTranslations,
}

impl fmt::Display for FamilyStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyStrategy::Powers => "powers",
            FamilyStrategy::JoinTranslations => "join-translations",
        })
    }
}

/// A commutative family of isotone maps with at most `count` members.
pub fn random_commuting_family(
    poset: &Arc<Poset>,
    strategy: FamilyStrategy,
    count: usize,
    rng_seed: u64,
) -> Result<Family, GenError> {
    let mut rng = SplitMix64::seed_from_u64(rng_seed);
    family_from_rng(poset, strategy, count, &mut rng)
}

fn family_from_rng(
    poset: &Arc<Poset>,
    strategy: FamilyStrategy,
    count: usize,
    rng: &mut SplitMix64,
) -> Result<Family, GenError> {
    if count == 0 {
        return Err(GenError::BadSpec(
            "a family needs at least one map".to_owned(),
        ));
    }
    match strategy {
        FamilyStrategy::Powers => {
            let f = random_isotone_map(poset, "f", rng);
            let mut maps: Vec<MapTable> = vec![f.clone()];
            let mut power = f.clone();
            for k in 2..=count {
                power = f.compose(&power)?.renamed(format!("f^{k}"));
                if !maps.contains(&power) {
                    maps.push(power.clone());
                }
            }
            Ok(Family::new(maps)?)
        }
        FamilyStrategy::JoinTranslations => {
            let generators: Subset = (0..count)
                .map(|_| Element::new(below(rng, poset.len())))
                .collect();
            join_translation_family(poset, &generators)
        }
    }
}

/// Draws a spec of a random kind whose poset has at most `max_carrier`
/// elements, redrawing sizes until it fits. `max_carrier` must be at least 5.
pub fn sample_spec(rng: &mut SplitMix64, max_carrier: usize) -> Result<GenSpec, GenError> {
    if max_carrier < 5 {
        return Err(GenError::BadSpec(
            "sampled instances need room for 5 elements".to_owned(),
        ));
    }
    let kinds = [
        GenKind::Chain,
        GenKind::AntichainPlusBottom,
        GenKind::Powerset,
        GenKind::Divisor,
        GenKind::Product,
        GenKind::DiamondM3,
        GenKind::PentagonN5,
        GenKind::Random,
    ];
    let kind = kinds[below(rng, kinds.len())];
    loop {
        let spec = match kind {
            GenKind::Chain => GenSpec::new(kind, 1 + below(rng, max_carrier)),
            GenKind::AntichainPlusBottom | GenKind::Random => {
                GenSpec::new(kind, 1 + below(rng, max_carrier - 1))
            }
            GenKind::Powerset => {
                let max_n = (0..=6)
                    .take_while(|k| 1usize << k <= max_carrier)
                    .last()
                    .unwrap_or(0);
                GenSpec::new(kind, below(rng, max_n + 1))
            }
            GenKind::Divisor => GenSpec::new(kind, 1 + below(rng, 60)),
            GenKind::Product => GenSpec::new(kind, 1 + below(rng, 4)).with_m(1 + below(rng, 4)),
            GenKind::DiamondM3 | GenKind::PentagonN5 => GenSpec::new(kind, 5),
        }
        .with_seed(rng.next_u64());
        let poset = make_standard_poset(&spec)?;
        if poset.len() <= max_carrier {
            return Ok(spec);
        }
    }
}

/// A seeded instance for the verification suites: a generated poset with at
/// most `max_carrier` elements and a commuting family of one to three maps.
#[derive(Clone, Debug)]
pub struct SampledInstance {
    pub spec: GenSpec,
    pub strategy: FamilyStrategy,
    pub count: usize,
    pub family: Family,
}

/// Draws a [`SampledInstance`]. Lattices get join translations or powers;
/// other posets get powers. `max_carrier` must be at least 5.
pub fn sample_instance(rng_seed: u64, max_carrier: usize) -> Result<SampledInstance, GenError> {
    let mut rng = SplitMix64::seed_from_u64(rng_seed);
    let spec = sample_spec(&mut rng, max_carrier)?;
    let poset = Arc::new(make_standard_poset(&spec)?);
    let strategy = if poset.is_complete_lattice() && below(&mut rng, 2) == 0 {
        FamilyStrategy::JoinTranslations
    } else {
        FamilyStrategy::Powers
    };
    let count = 1 + below(&mut rng, 3);
    let family = family_from_rng(&poset, strategy, count, &mut rng)?;
    Ok(SampledInstance {
        spec,
        strategy,
        count,
        family,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(kind: GenKind, n: usize) -> Arc<Poset> {
        Arc::new(make_standard_poset(&GenSpec::new(kind, n)).unwrap())
    }

    #[test]
    fn powerset_two() {
        let p = build(GenKind::Powerset, 2);
        assert_eq!(p.labels(), ["{}", "{1}", "{2}", "{1,2}"]);
        assert_eq!(p.bottom(), p.element("{}").ok());
        assert_eq!(p.top(), p.element("{1,2}").ok());
    }

    #[test]
    fn divisors_of_twelve() {
        let p = build(GenKind::Divisor, 12);
        assert_eq!(p.labels(), ["1", "2", "3", "4", "6", "12"]);
        assert!(p.leq(p.element("2").unwrap(), p.element("6").unwrap()));
        assert!(!p.leq(p.element("4").unwrap(), p.element("6").unwrap()));
        assert_eq!(p.bottom(), p.element("1").ok());
    }

    #[test]
    fn singleton_chain() {
        let p = build(GenKind::Chain, 1);
        assert_eq!(p.len(), 1);
        assert!(p.bottom().is_some());
    }

    #[test]
    fn small_lattices() {
        for kind in [GenKind::DiamondM3, GenKind::PentagonN5] {
            let p = build(kind, 5);
            assert_eq!(p.len(), 5);
            assert!(p.is_complete_lattice());
        }
        let prod =
            Arc::new(make_standard_poset(&GenSpec::new(GenKind::Product, 2).with_m(3)).unwrap());
        assert_eq!(prod.len(), 6);
        assert!(prod.is_complete_lattice());
        let anti = build(GenKind::AntichainPlusBottom, 3);
        assert!(anti.is_chain_complete() && !anti.is_complete_lattice());
    }

    #[test]
    fn bad_specs() {
        assert!(matches!(
            make_standard_poset(&GenSpec::new(GenKind::Chain, 0)),
            Err(GenError::BadSpec(_))
        ));
        assert!(matches!(
            make_standard_poset(&GenSpec::new(GenKind::Chain, 65)),
            Err(GenError::BadSpec(_))
        ));
        assert!(matches!(
            make_standard_poset(&GenSpec::new(GenKind::Powerset, 7)),
            Err(GenError::BadSpec(_))
        ));
    }

    #[test]
    fn random_posets_have_bottom() {
        for seed in 0..20 {
            let p = make_standard_poset(&GenSpec::new(GenKind::Random, 8).with_seed(seed)).unwrap();
            assert_eq!(p.bottom(), p.element("bot").ok());
        }
    }

    #[test]
    fn join_translation_examples() {
        let p = build(GenKind::Powerset, 2);
        let fam = join_translation_family(&p, &p.subset(["{1}", "{2}"]).unwrap()).unwrap();
        assert_eq!(
            crate::oracle::brute_force_fixed_points(&fam),
            p.subset(["{1,2}"]).unwrap()
        );

        let fam = join_translation_family(&p, &p.subset(["{}"]).unwrap()).unwrap();
        assert_eq!(crate::oracle::brute_force_fixed_points(&fam), p.carrier());

        let d = build(GenKind::Divisor, 12);
        let fam = join_translation_family(&d, &d.subset(["2", "3"]).unwrap()).unwrap();
        assert_eq!(
            crate::oracle::brute_force_fixed_points(&fam),
            d.subset(["6", "12"]).unwrap()
        );
    }

    #[test]
    fn join_translations_need_joins() {
        let v = build(GenKind::AntichainPlusBottom, 2);
        let err = join_translation_family(&v, &v.subset(["a1"]).unwrap()).unwrap_err();
        assert_eq!(err, GenError::NotALattice("a2".into(), "a1".into()));
    }

    #[test]
    fn powers_of_successor() {
        let p = build(GenKind::Chain, 4);
        let f = MapTable::from_fn(&p, "f", |x| Element::new((x.index() + 1).min(3))).unwrap();
        let f2 = f.compose(&f).unwrap();
        assert_eq!(
            f2.table(),
            (0..4)
                .map(|i| Element::new((i + 2).min(3)))
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn seeded_families_reproduce() {
        let p = build(GenKind::Powerset, 3);
        let a = random_commuting_family(&p, FamilyStrategy::JoinTranslations, 2, 42).unwrap();
        let b = random_commuting_family(&p, FamilyStrategy::JoinTranslations, 2, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.names(), b.names());
        assert!(a.is_commutative() && a.is_isotone());
    }

    #[test]
    fn powers_commute() {
        let p =
            Arc::new(make_standard_poset(&GenSpec::new(GenKind::Random, 7).with_seed(3)).unwrap());
        for seed in 0..50 {
            let fam = random_commuting_family(&p, FamilyStrategy::Powers, 3, seed).unwrap();
            assert!(fam.len() <= 3);
            assert!(fam.is_commutative());
            assert!(fam.is_isotone());
        }
    }

    #[test]
    fn splitmix_matches_reference() {
        // independent SplitMix64 reference
        fn reference(state: &mut u64) -> u64 {
            *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut z = *state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^ (z >> 31)
        }
        for seed in [0u64, 1, 42, u64::MAX] {
            let mut state = seed;
            let mut rng = SplitMix64::seed_from_u64(seed);
            for _ in 0..8 {
                assert_eq!(rng.next_u64(), reference(&mut state));
            }
        }
    }

    #[test]
    fn sampled_instances_respect_bounds() {
        for seed in 0..200 {
            let inst = sample_instance(seed, 12).unwrap();
            assert!(inst.family.poset().len() <= 12);
            assert!(inst.family.len() <= 3);
            assert!(inst.family.is_commutative());
        }
    }
}
