//! Finite order theory and joint fixed points of commutative isotone maps.
//!
//! Given a finite poset with a least element and a commutative family `F`
//! of isotone self-maps, the joint fixed points of `F` are exactly the
//! suprema of the orbits `{φ(x) : φ ∈ It F}` taken over the seeds
//! `x ⊑ f(x) ∀f ∈ F`, and the least joint fixed point is the supremum of the
//! orbit of `⊥`. This crate computes those sets and checks them against a
//! brute-force scan.
//!
//! - [`poset`]: posets, chains, directed sets, suprema, lattice tests.
//! - [`mapping`]: map tables, families, commutativity, composition closure.
//! - [`fixpoint`]: orbits, joint fixed points, Kleene and round-robin solvers.
//! - [`oracle`]: brute-force fixed points and theorem verdicts.
//! - [`generators`]: standard posets and seeded random instances.
//! - [`cli`]: instance files, reports and the `jointfix` command.

pub mod cli;
pub mod fixpoint;
pub mod generators;
pub mod mapping;
pub mod oracle;
pub mod poset;

pub use fixpoint::{
    fixed_points_single, joint_fixed_points, kleene_iterate, least_joint_fixed_point, orbit,
    round_robin_solve, FixError, FixReport, KleeneRun, Method, OrbitResult, PreconditionViolation,
    SolveOptions, Strategy,
};
pub use mapping::{ClosureSet, Family, MapError, MapTable};
pub use oracle::{brute_force_fixed_points, Claim, Hypotheses, Verdict};
pub use poset::{Element, OrderError, Poset, RelationInput, Subset};
