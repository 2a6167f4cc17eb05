// Enumerates the composition closure of a commuting family and lists each
// distinct map with the shortest word that produces it.

use std::sync::Arc;

use jointfix::generators::{join_translation_family, make_standard_poset, GenKind, GenSpec};
use jointfix::mapping::DEFAULT_CLOSURE_BUDGET;

fn main() {
    let p = Arc::new(make_standard_poset(&GenSpec::new(GenKind::Powerset, 3)).unwrap());
    let generators = p.subset(["{1}", "{2}"]).unwrap();
    let family = join_translation_family(&p, &generators).unwrap();
    println!(
        "family {:?}, commutative: {}",
        family.names(),
        family.is_commutative()
    );

    let closure = family.iteration_closure(DEFAULT_CLOSURE_BUDGET).unwrap();
    println!("closure has {} distinct maps", closure.len());
    for entry in closure.entries() {
        let images: Vec<&str> = entry.map.table().iter().map(|&y| p.label(y)).collect();
        println!("  {:<14} {:?}", entry.word.join("·"), images);
    }
    println!("closed under composition: {}", closure.is_closed());

    match family.iteration_closure(2) {
        Ok(_) => println!("budget of 2 was enough"),
        Err(e) => println!("budget of 2: {e}"),
    }
}
