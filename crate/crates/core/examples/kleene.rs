// Kleene iteration of a single isotone map, from bottom and from every
// point below its image.

use std::sync::Arc;

use jointfix::generators::{make_standard_poset, random_isotone_map, GenKind, GenSpec};
use jointfix::{fixed_points_single, kleene_iterate, MapTable, Poset, SolveOptions};
use rand_core::SeedableRng;
use rand_xoshiro::SplitMix64;

fn main() {
    let p = Arc::new(make_standard_poset(&GenSpec::new(GenKind::Divisor, 36)).unwrap());
    let mut rng = SplitMix64::seed_from_u64(8);
    let f = random_isotone_map(&p, "f", &mut rng);
    print_map(&p, &f);

    let run = kleene_iterate(&f, None, true).unwrap();
    let trace: Vec<&str> = run.trace.iter().map(|&e| p.label(e)).collect();
    println!(
        "from bottom: {} in {} steps",
        trace.join(" -> "),
        run.steps()
    );

    let all = fixed_points_single(&f, &SolveOptions::default()).unwrap();
    println!(
        "fixed points from seeded runs: {:?}",
        p.labels_of(&all.fix_set)
    );

    // A map that is not isotone can cycle.
    let two = Arc::new(Poset::from_covers(["0", "1"], [("0", "1")]).unwrap());
    let swap = MapTable::build(&two, "swap", [("0", "1"), ("1", "0")]).unwrap();
    match kleene_iterate(&swap, None, false) {
        Ok(run) => println!("swap settled at {}", two.label(run.fixpoint)),
        Err(e) => println!("swap: {e}"),
    }
}

fn print_map(p: &Poset, f: &MapTable) {
    let pairs: Vec<String> = p
        .elements()
        .map(|x| format!("{}->{}", p.label(x), p.label(f.apply(x))))
        .collect();
    println!("f = {{{}}}", pairs.join(", "));
}
