// Computes the joint fixed points of a commuting family with both solver
// strategies and compares them against an exhaustive scan.

use std::sync::Arc;

use jointfix::generators::{
    make_standard_poset, random_commuting_family, FamilyStrategy, GenKind, GenSpec,
};
use jointfix::{
    brute_force_fixed_points, joint_fixed_points, least_joint_fixed_point, SolveOptions, Strategy,
};

fn main() {
    let p = Arc::new(make_standard_poset(&GenSpec::new(GenKind::Product, 3).with_m(3)).unwrap());
    let family = random_commuting_family(&p, FamilyStrategy::JoinTranslations, 2, 7).unwrap();
    println!("poset {}x{} product, family {:?}", 3, 3, family.names());

    let report = joint_fixed_points(&family, &SolveOptions::default()).unwrap();
    println!(
        "extensive seeds: {:?}",
        p.labels_of(&family.extensivity_domain())
    );
    for r in &report.per_seed {
        println!(
            "  orbit of {:<6} = {:?} -> sup {}",
            p.label(r.seed),
            p.labels_of(&r.orbit),
            p.label(r.supremum)
        );
    }
    println!("joint fixed points: {:?}", p.labels_of(&report.fix_set));
    println!(
        "least: {}",
        p.label(least_joint_fixed_point(&family, &SolveOptions::default()).unwrap())
    );

    let rr = SolveOptions {
        strategy: Strategy::RoundRobin,
        ..SolveOptions::default()
    };
    let report_rr = joint_fixed_points(&family, &rr).unwrap();
    let brute = brute_force_fixed_points(&family);
    println!(
        "round-robin agrees: {}, brute force agrees: {}",
        report_rr.fix_set == report.fix_set,
        brute == report.fix_set
    );
}
