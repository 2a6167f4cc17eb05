//! Brute-force joint fixed points and verdicts on the fixed-point theorems.
//!
//! [`brute_force_fixed_points`] only looks up table entries and compares
//! elements. Everything else in this module checks the order-theoretic
//! engine against it.

use std::sync::Arc;

use rand_core::SeedableRng;
use rand_xoshiro::SplitMix64;
use serde::Serialize;

use crate::fixpoint::{self, PreconditionViolation, SolveOptions};
use crate::generators::{self, GenError};
use crate::mapping::{Family, DEFAULT_CLOSURE_BUDGET};
use crate::poset::{LatticeViolation, Poset, Subset};

/// `{x : f(x) = x for every f ∈ F}` by scanning the carrier.
pub fn brute_force_fixed_points(family: &Family) -> Subset {
    family
        .poset()
        .elements()
        .filter(|&x| family.members().iter().all(|f| f.table()[x.index()] == x))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Claim {
    /// On a complete lattice the joint fixed points form a complete lattice.
    TarskiLattice,
    /// On a chain-complete poset the joint fixed points are chain-complete.
    MarkowskyChainComplete,
    /// The joint fixed points are exactly the orbit suprema over `ext F`.
    OrbitSuprema,
    /// The least joint fixed point is the supremum of the orbit of `⊥`.
    BottomOrbitLeast,
    /// Kleene iteration from `⊥` reaches the least fixed point.
    KleeneLeast,
    /// Kleene limits from extensive seeds are exactly the fixed points.
    KleeneSeeds,
    /// `ext F` equals the extensivity domain of the composition closure.
    ExtClosureEquality,
    /// Every orbit from `ext F` is directed.
    OrbitDirected,
}

/// Which hypotheses a verdict was checked under. The structure claims are
/// reported both with and without commutativity of the family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Hypotheses {
    AsStated,
    WithoutCommutativity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub claim: Claim,
    pub hypotheses: Hypotheses,
    /// Vacuously true when the hypotheses fail and the claim was not
    /// evaluated; otherwise the observed outcome.
    pub holds: bool,
    pub preconds_met: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Verdict {
    fn outcome(
        claim: Claim,
        hypotheses: Hypotheses,
        preconds_met: bool,
        result: Result<(), String>,
    ) -> Self {
        let (holds, witness) = match result {
            Ok(()) => (true, None),
            Err(w) => (false, Some(w)),
        };
        Verdict {
            claim,
            hypotheses,
            holds,
            preconds_met,
            witness,
            note: None,
        }
    }

    fn vacuous(claim: Claim, hypotheses: Hypotheses, note: String) -> Self {
        Verdict {
            claim,
            hypotheses,
            holds: true,
            preconds_met: false,
            witness: None,
            note: Some(note),
        }
    }

    fn with_note(mut self, note: Option<String>) -> Self {
        self.note = note;
        self
    }

    /// A claim whose stated hypotheses hold was found false.
    pub fn is_refutation(&self) -> bool {
        self.preconds_met && !self.holds && self.hypotheses == Hypotheses::AsStated
    }
}

fn describe_lattice_violation(p: &Poset, v: LatticeViolation) -> String {
    match v {
        LatticeViolation::NoBottom => "no least element".to_owned(),
        LatticeViolation::NoTop => "no greatest element".to_owned(),
        LatticeViolation::NoJoin(a, b) => {
            format!("`{}` and `{}` have no join", p.label(a), p.label(b))
        }
        LatticeViolation::NoMeet(a, b) => {
            format!("`{}` and `{}` have no meet", p.label(a), p.label(b))
        }
    }
}

fn unmet_hypotheses(family: &Family, need_lattice: bool, need_commutative: bool) -> Vec<String> {
    let p = family.poset();
    let mut reasons = Vec::new();
    if need_lattice {
        if let Some(v) = p.lattice_violation() {
            reasons.push(format!(
                "poset is not a complete lattice ({})",
                describe_lattice_violation(p, v)
            ));
        }
    } else if !p.is_chain_complete() {
        reasons.push("poset is not chain-complete (no least element)".to_owned());
    }
    if let Some(v) = family.isotonicity_violation() {
        reasons.push(format!("`{}` is not isotone", v.map));
    }
    if need_commutative {
        if let Some(v) = family.commutation_violation() {
            reasons.push(format!("`{}` and `{}` do not commute", v.first, v.second));
        }
    }
    reasons
}

/// The lattice and chain-completeness structure of the joint fixed points,
/// checked with and without the commutativity hypothesis.
pub fn verify_structure(family: &Family) -> Vec<Verdict> {
    let p = family.poset();
    let fix = brute_force_fixed_points(family);
    let induced = if fix.is_empty() {
        None
    } else {
        Some(
            p.induced_subposet(&fix)
                .expect("fixed points lie in the carrier"),
        )
    };

    let tarski = || -> Result<(), String> {
        let sub = induced.as_ref().ok_or("there are no joint fixed points")?;
        match sub.lattice_violation() {
            None => Ok(()),
            Some(v) => Err(format!(
                "joint fixed points: {}",
                describe_lattice_violation(sub, v)
            )),
        }
    };
    let markowsky = || -> Result<(), String> {
        let sub = induced.as_ref().ok_or("there are no joint fixed points")?;
        let complete = sub.is_chain_complete();
        if sub.len() <= 12 && sub.is_chain_complete_exhaustive() != complete {
            return Err("chain completeness disagrees with its definition".to_owned());
        }
        if complete {
            Ok(())
        } else {
            Err("joint fixed points have no least element".to_owned())
        }
    };

    let mut verdicts = Vec::with_capacity(4);
    for hypotheses in [Hypotheses::AsStated, Hypotheses::WithoutCommutativity] {
        let commutative = hypotheses == Hypotheses::AsStated;
        for (claim, need_lattice) in [
            (Claim::TarskiLattice, true),
            (Claim::MarkowskyChainComplete, false),
        ] {
            let unmet = unmet_hypotheses(family, need_lattice, commutative);
            let verdict = if unmet.is_empty() {
                let result = if need_lattice { tarski() } else { markowsky() };
                Verdict::outcome(claim, hypotheses, true, result)
            } else {
                Verdict::vacuous(
                    claim,
                    hypotheses,
                    format!("not asserted: {}", unmet.join("; ")),
                )
            };
            verdicts.push(verdict);
        }
    }
    verdicts
}

/// The orbit characterisation of the joint fixed points and the facts its
/// argument rests on, compared against the brute-force oracle.
///
/// When the hypotheses fail the engine is still run unchecked and the
/// verdicts report what was observed, with `preconds_met = false`.
pub fn verify_approximation(family: &Family) -> Vec<Verdict> {
    let p = family.poset();
    let hyp = Hypotheses::AsStated;
    let violation = fixpoint::check_preconditions(family).err();
    let met = violation.is_none();
    let note = violation
        .as_ref()
        .map(|v: &PreconditionViolation| format!("hypotheses fail: {v}"));
    let brute = brute_force_fixed_points(family);
    let ext = family.extensivity_domain();
    let mut verdicts = Vec::new();

    let orbits: Vec<_> = ext
        .iter()
        .map(|x| {
            let (orbit, _) = fixpoint::orbit_set(family, x);
            let sup = p.sup_subset(&orbit).expect("orbit lies in the carrier");
            (x, orbit, sup)
        })
        .collect();

    let eq1 = (|| {
        let mut rhs = Subset::new();
        for (x, _, sup) in &orbits {
            let sup = sup.ok_or_else(|| format!("orbit of `{}` has no supremum", p.label(*x)))?;
            rhs.insert(sup);
        }
        match rhs.first_difference(&brute) {
            None => Ok(()),
            Some(u) if rhs.contains(u) => Err(format!(
                "`{}` is an orbit supremum but not a joint fixed point",
                p.label(u)
            )),
            Some(u) => Err(format!(
                "`{}` is a joint fixed point but no orbit supremum",
                p.label(u)
            )),
        }
    })();
    verdicts.push(Verdict::outcome(Claim::OrbitSuprema, hyp, met, eq1).with_note(note.clone()));

    match p.bottom() {
        None => verdicts.push(Verdict::vacuous(
            Claim::BottomOrbitLeast,
            hyp,
            "not evaluated: the poset has no least element".to_owned(),
        )),
        Some(bottom) => {
            let result = (|| {
                let (orbit, _) = fixpoint::orbit_set(family, bottom);
                let sup = p
                    .sup_subset(&orbit)
                    .expect("orbit lies in the carrier")
                    .ok_or("the orbit of the least element has no supremum")?;
                let least = p
                    .minimum(&brute)
                    .ok_or("the joint fixed points have no least element")?;
                if sup == least {
                    Ok(())
                } else {
                    Err(format!(
                        "orbit supremum `{}` differs from least joint fixed point `{}`",
                        p.label(sup),
                        p.label(least)
                    ))
                }
            })();
            verdicts.push(
                Verdict::outcome(Claim::BottomOrbitLeast, hyp, met, result).with_note(note.clone()),
            );
        }
    }

    match family.iteration_closure(DEFAULT_CLOSURE_BUDGET) {
        Ok(closure) => {
            let closed_ext = closure.as_family().extensivity_domain();
            let result = match ext.first_difference(&closed_ext) {
                None => Ok(()),
                Some(x) if ext.contains(x) => Err(format!(
                    "`{}` is extensive for the family but not for its closure",
                    p.label(x)
                )),
                Some(x) => Err(format!(
                    "`{}` is extensive for the closure but not for the family",
                    p.label(x)
                )),
            };
            verdicts.push(
                Verdict::outcome(Claim::ExtClosureEquality, hyp, met, result)
                    .with_note(note.clone()),
            );
        }
        Err(e) => verdicts.push(Verdict::vacuous(
            Claim::ExtClosureEquality,
            hyp,
            format!("not evaluated: {e}"),
        )),
    }

    let directed = orbits
        .iter()
        .find(|(_, orbit, _)| !p.is_directed(orbit).expect("orbit lies in the carrier"))
        .map_or(Ok(()), |(x, _, _)| {
            Err(format!("orbit of `{}` is not directed", p.label(*x)))
        });
    verdicts
        .push(Verdict::outcome(Claim::OrbitDirected, hyp, met, directed).with_note(note.clone()));

    if let [f] = family.members() {
        match p.bottom() {
            None => verdicts.push(Verdict::vacuous(
                Claim::KleeneLeast,
                hyp,
                "not evaluated: the poset has no least element".to_owned(),
            )),
            Some(_) => {
                let result = fixpoint::kleene_iterate(f, None, false)
                    .map_err(|e| e.to_string())
                    .and_then(|run| match p.minimum(&brute) {
                        Some(least) if least == run.fixpoint => Ok(()),
                        Some(least) => Err(format!(
                            "Kleene limit `{}` differs from least fixed point `{}`",
                            p.label(run.fixpoint),
                            p.label(least)
                        )),
                        None => Err("the fixed points have no least element".to_owned()),
                    });
                verdicts.push(
                    Verdict::outcome(Claim::KleeneLeast, hyp, met, result).with_note(note.clone()),
                );
            }
        }
        let result = fixpoint::fixed_points_single(f, &SolveOptions::unchecked())
            .map_err(|e| e.to_string())
            .and_then(|report| match report.fix_set.first_difference(&brute) {
                None => Ok(()),
                Some(u) => Err(format!(
                    "Kleene limits and fixed points disagree at `{}`",
                    p.label(u)
                )),
            });
        verdicts.push(Verdict::outcome(Claim::KleeneSeeds, hyp, met, result).with_note(note));
    }

    verdicts
}

/// Structure verdicts followed by approximation verdicts.
pub fn verify_all(family: &Family) -> Vec<Verdict> {
    let mut v = verify_structure(family);
    v.extend(verify_approximation(family));
    v
}

/// An isotone but non-commuting pair of maps whose orbit suprema over
/// `ext F` differ from the joint fixed points.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub search_seed: u64,
    pub family: Family,
    pub verdict: Verdict,
}

/// Tries seeds `first_seed..first_seed + attempts`: each draws a poset of at
/// most `max_carrier` elements and two random isotone maps `f`, `g`, and
/// keeps the first non-commuting pair where every orbit from an extensive
/// point has a supremum and yet those suprema differ from the joint fixed
/// points.
pub fn search_noncommutative_counterexample(
    first_seed: u64,
    attempts: u64,
    max_carrier: usize,
) -> Result<Option<Counterexample>, GenError> {
    for search_seed in first_seed..first_seed.saturating_add(attempts) {
        let mut rng = SplitMix64::seed_from_u64(search_seed);
        let spec = generators::sample_spec(&mut rng, max_carrier)?;
        let poset = Arc::new(generators::make_standard_poset(&spec)?);
        let f = generators::random_isotone_map(&poset, "f", &mut rng);
        let g = generators::random_isotone_map(&poset, "g", &mut rng);
        if f == g {
            continue;
        }
        let family = Family::new([f, g])?;
        if family.is_commutative() || !family.is_isotone() {
            continue;
        }
        let every_orbit_has_sup = family.extensivity_domain().iter().all(|x| {
            let (orbit, _) = crate::fixpoint::orbit_set(&family, x);
            matches!(family.poset().sup_subset(&orbit), Ok(Some(_)))
        });
        if !every_orbit_has_sup {
            continue;
        }
        let verdict = verify_approximation(&family)
            .into_iter()
            .find(|v| v.claim == Claim::OrbitSuprema)
            .expect("orbit-suprema verdict is always reported");
        if !verdict.holds {
            return Ok(Some(Counterexample {
                search_seed,
                family,
                verdict,
            }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::mapping::MapTable;

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

    fn chain3() -> Arc<Poset> {
        Arc::new(Poset::from_covers(["0", "1", "2"], [("0", "1"), ("1", "2")]).unwrap())
    }

    fn join_with(p: &Arc<Poset>, name: &str, a: &str) -> MapTable {
        let a = p.element(a).unwrap();
        MapTable::from_fn(p, name, |x| p.join(x, a).unwrap()).unwrap()
    }

    fn joins(q: &Arc<Poset>) -> Family {
        Family::new([join_with(q, "j1", "{1}"), join_with(q, "j2", "{2}")]).unwrap()
    }

    fn find(vs: &[Verdict], claim: Claim, h: Hypotheses) -> &Verdict {
        vs.iter()
            .find(|v| v.claim == claim && v.hypotheses == h)
            .unwrap()
    }

    #[test]
    fn brute_force_examples() {
        let q = powerset2();
        assert_eq!(
            brute_force_fixed_points(&joins(&q)),
            q.subset(["{1,2}"]).unwrap()
        );
        assert_eq!(
            brute_force_fixed_points(&Family::singleton(MapTable::identity(&q))),
            q.carrier()
        );
        let p = chain3();
        let f = MapTable::build(&p, "f", [("0", "1"), ("1", "2"), ("2", "2")]).unwrap();
        let fam = Family::new([f, MapTable::identity(&p)]).unwrap();
        assert_eq!(brute_force_fixed_points(&fam), p.subset(["2"]).unwrap());
    }

    #[test]
    fn structure_on_join_translations() {
        let vs = verify_structure(&joins(&powerset2()));
        for v in &vs {
            assert!(v.holds && v.preconds_met, "{v:?}");
        }
        assert_eq!(vs.len(), 4);
    }

    #[test]
    fn structure_on_identity() {
        for v in verify_structure(&Family::singleton(MapTable::identity(&powerset2()))) {
            assert!(v.holds && v.preconds_met);
        }
    }

    #[test]
    fn structure_on_vee() {
        let v =
            Arc::new(Poset::from_covers(["bot", "a", "b"], [("bot", "a"), ("bot", "b")]).unwrap());
        let fam = Family::singleton(MapTable::identity(&v));
        let vs = verify_structure(&fam);
        let t = find(&vs, Claim::TarskiLattice, Hypotheses::AsStated);
        assert!(!t.preconds_met && t.holds && t.note.is_some());
        let m = find(&vs, Claim::MarkowskyChainComplete, Hypotheses::AsStated);
        assert!(m.preconds_met && m.holds);
    }

    #[test]
    fn structure_without_commutativity_can_fail() {
        // constant maps to 0 and to 1 on a 2-chain share no fixed point
        let p = Arc::new(Poset::from_covers(["0", "1"], [("0", "1")]).unwrap());
        let lo = MapTable::build(&p, "lo", [("0", "0"), ("1", "0")]).unwrap();
        let hi = MapTable::build(&p, "hi", [("0", "1"), ("1", "1")]).unwrap();
        let vs = verify_structure(&Family::new([lo, hi]).unwrap());
        let stated = find(&vs, Claim::TarskiLattice, Hypotheses::AsStated);
        assert!(!stated.preconds_met && stated.holds);
        let relaxed = find(&vs, Claim::TarskiLattice, Hypotheses::WithoutCommutativity);
        assert!(relaxed.preconds_met && !relaxed.holds);
        assert!(relaxed.witness.is_some());
        assert!(!relaxed.is_refutation());
    }

    #[test]
    fn approximation_on_join_translations() {
        let vs = verify_approximation(&joins(&powerset2()));
        assert_eq!(vs.len(), 4);
        for v in &vs {
            assert!(v.holds && v.preconds_met, "{v:?}");
        }
    }

    #[test]
    fn approximation_on_identity() {
        let vs = verify_approximation(&Family::singleton(MapTable::identity(&chain3())));
        assert_eq!(vs.len(), 6);
        for v in &vs {
            assert!(v.holds && v.preconds_met, "{v:?}");
        }
    }

    #[test]
    fn approximation_hunting_mode() {
        let p = Arc::new(Poset::from_covers(["0", "1"], [("0", "1")]).unwrap());
        let lo = MapTable::build(&p, "lo", [("0", "0"), ("1", "0")]).unwrap();
        let hi = MapTable::build(&p, "hi", [("0", "1"), ("1", "1")]).unwrap();
        let vs = verify_approximation(&Family::new([lo, hi]).unwrap());
        let eq1 = find(&vs, Claim::OrbitSuprema, Hypotheses::AsStated);
        assert!(!eq1.preconds_met);
        assert!(!eq1.holds);
        assert_eq!(
            eq1.witness.as_deref(),
            Some("`1` is an orbit supremum but not a joint fixed point")
        );
        assert!(!eq1.is_refutation());
    }

    #[test]
    fn failed_verdicts_carry_witnesses() {
        let p = chain3();
        let swap = MapTable::build(&p, "s", [("0", "1"), ("1", "0"), ("2", "2")]).unwrap();
        for v in verify_all(&Family::singleton(swap)) {
            assert!(v.holds || v.witness.is_some(), "{v:?}");
        }
    }
}
