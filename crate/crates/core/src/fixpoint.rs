//! Joint fixed points of commutative isotone families.
//!
//! On a chain-complete poset, for a commutative family `F` of isotone maps,
//! every joint fixed point is the supremum of the orbit
//! `{φ(x) : φ ∈ It F}` of some seed `x ∈ ext F`, and every such supremum is
//! a joint fixed point. The least one is the supremum of the orbit of `⊥`.
//! For a single map this reduces to Kleene iteration.
//!
//! Orbits are computed by reachability under the generators rather than by
//! materialising `It F`: the images of `x` under all finite compositions are
//! exactly the states reachable from `{f(x) : f ∈ F}` by applying members
//! of `F`.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::mapping::{ClosureSet, Family, MapError, MapTable};
use crate::poset::{Element, OrderError, Poset, Subset};

/// A violated hypothesis of the fixed-point characterisation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PreconditionViolation {
    NotChainComplete,
    NotIsotone {
        map: String,
        x: String,
        y: String,
    },
    NotCommutative {
        first: String,
        second: String,
        at: String,
    },
    StartNotExtensive {
        map: String,
        start: String,
    },
    SeedNotExtensive {
        seed: String,
    },
}

impl PreconditionViolation {
    pub fn kind(&self) -> &'static str {
        match self {
            PreconditionViolation::NotChainComplete => "not-chain-complete",
            PreconditionViolation::NotIsotone { .. } => "not-isotone",
            PreconditionViolation::NotCommutative { .. } => "not-commutative",
            PreconditionViolation::StartNotExtensive { .. } => "start-not-extensive",
            PreconditionViolation::SeedNotExtensive { .. } => "seed-not-extensive",
        }
    }
}

impl fmt::Display for PreconditionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PreconditionViolation::NotChainComplete => {
                write!(f, "not-chain-complete: the poset has no least element")
            }
            PreconditionViolation::NotIsotone { map, x, y } => write!(
                f,
                "not-isotone: `{x}` ⊑ `{y}` but `{map}({x})` ⋢ `{map}({y})`"
            ),
            PreconditionViolation::NotCommutative { first, second, at } => write!(
                f,
                "not-commutative: `{first}` and `{second}` disagree in either order at `{at}`"
            ),
            PreconditionViolation::StartNotExtensive { map, start } => {
                write!(f, "start-not-extensive: `{start}` ⋢ `{map}({start})`")
            }
            PreconditionViolation::SeedNotExtensive { seed } => {
                write!(
                    f,
                    "seed-not-extensive: `{seed}` is outside the extensivity domain"
                )
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FixError {
    #[error("precondition violated: {0}")]
    PreconditionViolated(PreconditionViolation),
    #[error("the orbit of `{seed}` has no supremum")]
    NoSupremum { seed: String },
    #[error("iteration entered a cycle: {}", .cycle.join(" → "))]
    CycleDetected { cycle: Vec<String> },
    #[error("round-robin iteration did not stabilise within {budget} sweeps")]
    SweepBudgetExceeded { budget: usize },
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Order(#[from] OrderError),
}

impl From<PreconditionViolation> for FixError {
    fn from(v: PreconditionViolation) -> Self {
        FixError::PreconditionViolated(v)
    }
}

/// How a fix set was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Suprema of orbits over the extensivity domain.
    OrbitSuprema,
    /// Supremum of the orbit of the bottom element.
    BottomOrbit,
    /// Kleene iteration from the bottom element.
    Kleene,
    /// Kleene iteration from every extensive seed of a single map.
    KleeneSeeds,
    /// Sweeping the family in declaration order until stable.
    RoundRobin,
    /// Scanning the carrier for common fixed points.
    BruteForce,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Orbit suprema.
    #[default]
    Closure,
    /// Chaotic iteration per seed.
    RoundRobin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    /// Check chain completeness, isotonicity and commutativity first.
    /// Turning this off leaves `NoSupremum`, `CycleDetected` and the sweep
    /// budget as the only guards.
    pub check_preconditions: bool,
    pub strategy: Strategy,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            check_preconditions: true,
            strategy: Strategy::Closure,
        }
    }
}

impl SolveOptions {
    pub fn unchecked() -> Self {
        SolveOptions {
            check_preconditions: false,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitResult {
    pub seed: Element,
    pub orbit: Subset,
    pub supremum: Element,
    /// Map applications spent computing the orbit.
    pub applications: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub seeds: usize,
    pub applications: usize,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixReport {
    pub fix_set: Subset,
    pub least: Option<Element>,
    pub per_seed: Vec<OrbitResult>,
    pub method: Method,
    pub stats: Stats,
}

/// Chain-complete poset, isotone members, pairwise commuting members.
pub fn check_preconditions(family: &Family) -> Result<(), PreconditionViolation> {
    let p = family.poset();
    if !p.is_chain_complete() {
        return Err(PreconditionViolation::NotChainComplete);
    }
    if let Some(v) = family.isotonicity_violation() {
        return Err(PreconditionViolation::NotIsotone {
            map: v.map,
            x: p.label(v.x).to_owned(),
            y: p.label(v.y).to_owned(),
        });
    }
    if let Some(v) = family.commutation_violation() {
        return Err(PreconditionViolation::NotCommutative {
            first: v.first,
            second: v.second,
            at: p.label(v.at).to_owned(),
        });
    }
    Ok(())
}

pub fn extensivity_domain(family: &Family) -> Subset {
    family.extensivity_domain()
}

/// All images of `x` under non-empty compositions of family members.
/// Returns the orbit and the number of map applications spent.
pub fn orbit_set(family: &Family, x: Element) -> (Subset, usize) {
    let mut seen = Subset::new();
    let mut queue = VecDeque::new();
    let mut applications = 0;
    for f in family.members() {
        applications += 1;
        let y = f.apply(x);
        if seen.insert(y) {
            queue.push_back(y);
        }
    }
    while let Some(y) = queue.pop_front() {
        for f in family.members() {
            applications += 1;
            let z = f.apply(y);
            if seen.insert(z) {
                queue.push_back(z);
            }
        }
    }
    (seen, applications)
}

/// The orbit of `x` and its supremum.
pub fn orbit(family: &Family, x: Element) -> Result<OrbitResult, FixError> {
    let p = family.poset();
    p.check(x)?;
    let (orbit, applications) = orbit_set(family, x);
    let supremum = p.sup_subset(&orbit)?.ok_or_else(|| FixError::NoSupremum {
        seed: p.label(x).to_owned(),
    })?;
    Ok(OrbitResult {
        seed: x,
        orbit,
        supremum,
        applications,
    })
}

/// The orbit of `x` read off a materialised closure.
pub fn orbit_in_closure(closure: &ClosureSet, x: Element) -> Result<OrbitResult, FixError> {
    let p = closure.poset();
    p.check(x)?;
    let orbit = closure.images(x);
    let supremum = p.sup_subset(&orbit)?.ok_or_else(|| FixError::NoSupremum {
        seed: p.label(x).to_owned(),
    })?;
    Ok(OrbitResult {
        seed: x,
        orbit,
        supremum,
        applications: closure.len(),
    })
}

/// `fix F` as the set of orbit suprema over `ext F`.
pub fn joint_fixed_points(family: &Family, options: &SolveOptions) -> Result<FixReport, FixError> {
    let started = Instant::now();
    if options.check_preconditions {
        check_preconditions(family)?;
    }
    let p = family.poset();
    let seeds = family.extensivity_domain();
    let mut per_seed = Vec::with_capacity(seeds.len());
    let mut fix_set = Subset::new();
    let mut applications = 0;
    for x in &seeds {
        let result = match options.strategy {
            Strategy::Closure => orbit(family, x)?,
            Strategy::RoundRobin => {
                let run = sweep(family, x)?;
                OrbitResult {
                    seed: x,
                    orbit: [run.value].into_iter().collect(),
                    supremum: run.value,
                    applications: run.applications,
                }
            }
        };
        applications += result.applications;
        fix_set.insert(result.supremum);
        per_seed.push(result);
    }
    let least = p.minimum(&fix_set);
    Ok(FixReport {
        fix_set,
        least,
        per_seed,
        method: match options.strategy {
            Strategy::Closure => Method::OrbitSuprema,
            Strategy::RoundRobin => Method::RoundRobin,
        },
        stats: Stats {
            seeds: seeds.len(),
            applications,
            elapsed: started.elapsed(),
        },
    })
}

/// The least joint fixed point, `sup {φ(⊥) : φ ∈ It F}`.
pub fn least_joint_fixed_point(
    family: &Family,
    options: &SolveOptions,
) -> Result<Element, FixError> {
    Ok(least_joint_fixed_point_orbit(family, options)?.supremum)
}

/// Same as [`least_joint_fixed_point`], keeping the orbit of `⊥`.
pub fn least_joint_fixed_point_orbit(
    family: &Family,
    options: &SolveOptions,
) -> Result<OrbitResult, FixError> {
    if options.check_preconditions {
        check_preconditions(family)?;
    }
    let bottom = family
        .poset()
        .bottom()
        .ok_or(PreconditionViolation::NotChainComplete)?;
    orbit(family, bottom)
}

/// The ascending sequence `x₀ = start, xₖ₊₁ = f(xₖ)` up to its limit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KleeneRun {
    pub start: Element,
    pub fixpoint: Element,
    /// `x₀, …, xₖ` with `xₖ = f(xₖ)`.
    pub trace: Vec<Element>,
}

impl KleeneRun {
    pub fn steps(&self) -> usize {
        self.trace.len() - 1
    }
}

/// Kleene iteration of `f` from `start` (default `⊥`).
///
/// With `check_preconditions`, `f` must be isotone and `start ⊑ f(start)`;
/// then the trace is a chain and stops within `|carrier|` steps. Without the
/// checks a revisited state is reported as [`FixError::CycleDetected`].
pub fn kleene_iterate(
    f: &MapTable,
    start: Option<Element>,
    check_preconditions: bool,
) -> Result<KleeneRun, FixError> {
    let p = f.poset();
    if check_preconditions {
        if let Some((x, y)) = f.isotonicity_violation() {
            return Err(PreconditionViolation::NotIsotone {
                map: f.name().to_owned(),
                x: p.label(x).to_owned(),
                y: p.label(y).to_owned(),
            }
            .into());
        }
    }
    let start = match start {
        Some(s) => p.check(s)?,
        None => p.bottom().ok_or(PreconditionViolation::NotChainComplete)?,
    };
    if check_preconditions && !f.is_extensive_at(start) {
        return Err(PreconditionViolation::StartNotExtensive {
            map: f.name().to_owned(),
            start: p.label(start).to_owned(),
        }
        .into());
    }
    let mut trace = vec![start];
    let mut seen = HashSet::from([start]);
    let mut x = start;
    loop {
        let y = f.apply(x);
        if y == x {
            return Ok(KleeneRun {
                start,
                fixpoint: x,
                trace,
            });
        }
        if !seen.insert(y) {
            let from = trace
                .iter()
                .position(|&t| t == y)
                .expect("seen state is traced");
            let cycle = trace[from..]
                .iter()
                .chain(std::iter::once(&y))
                .map(|&e| p.label(e).to_owned())
                .collect();
            return Err(FixError::CycleDetected { cycle });
        }
        trace.push(y);
        x = y;
    }
}

/// `fix f` as the Kleene limits from every `x ⊑ f(x)`.
pub fn fixed_points_single(f: &MapTable, options: &SolveOptions) -> Result<FixReport, FixError> {
    let started = Instant::now();
    let p = f.poset();
    if options.check_preconditions {
        if !p.is_chain_complete() {
            return Err(PreconditionViolation::NotChainComplete.into());
        }
        if let Some((x, y)) = f.isotonicity_violation() {
            return Err(PreconditionViolation::NotIsotone {
                map: f.name().to_owned(),
                x: p.label(x).to_owned(),
                y: p.label(y).to_owned(),
            }
            .into());
        }
    }
    let seeds: Subset = p.elements().filter(|&x| f.is_extensive_at(x)).collect();
    let mut fix_set = Subset::new();
    let mut per_seed = Vec::with_capacity(seeds.len());
    let mut applications = 0;
    for x in &seeds {
        let run = kleene_iterate(f, Some(x), false)?;
        let orbit: Subset = run.trace.iter().map(|&t| f.apply(t)).collect();
        applications += run.trace.len();
        fix_set.insert(run.fixpoint);
        per_seed.push(OrbitResult {
            seed: x,
            orbit,
            supremum: run.fixpoint,
            applications: run.trace.len(),
        });
    }
    Ok(FixReport {
        least: p.minimum(&fix_set),
        fix_set,
        per_seed,
        method: Method::KleeneSeeds,
        stats: Stats {
            seeds: seeds.len(),
            applications,
            elapsed: started.elapsed(),
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RoundRobinRun {
    pub value: Element,
    pub sweeps: usize,
    pub applications: usize,
}

/// Chaotic iteration from `x`: apply every member in declaration order,
/// sweep after sweep, until a full sweep changes nothing.
pub fn round_robin_solve(
    family: &Family,
    x: Element,
    check_preconditions: bool,
) -> Result<RoundRobinRun, FixError> {
    let p = family.poset();
    p.check(x)?;
    if check_preconditions {
        check_preconditions_for_seed(family, x)?;
    }
    sweep(family, x)
}

fn check_preconditions_for_seed(family: &Family, x: Element) -> Result<(), PreconditionViolation> {
    check_preconditions(family)?;
    if !family.members().iter().all(|f| f.is_extensive_at(x)) {
        return Err(PreconditionViolation::SeedNotExtensive {
            seed: family.poset().label(x).to_owned(),
        });
    }
    Ok(())
}

fn sweep(family: &Family, x: Element) -> Result<RoundRobinRun, FixError> {
    let budget = sweep_budget(family.poset(), family);
    let mut current = x;
    let mut applications = 0;
    for sweeps in 1..=budget {
        let mut changed = false;
        for f in family.members() {
            applications += 1;
            let next = f.apply(current);
            changed |= next != current;
            current = next;
        }
        if !changed {
            return Ok(RoundRobinRun {
                value: current,
                sweeps,
                applications,
            });
        }
    }
    Err(FixError::SweepBudgetExceeded { budget })
}

fn sweep_budget(p: &Poset, family: &Family) -> usize {
    p.len() * family.len() + 1
}
