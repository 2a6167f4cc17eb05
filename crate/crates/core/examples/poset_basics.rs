// Builds a few small posets and asks order-theoretic questions about them.

use jointfix::generators::{make_standard_poset, GenKind, GenSpec};
use jointfix::Poset;

fn main() {
    let bowtie = Poset::from_covers(
        ["a", "b", "c", "d"],
        [("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")],
    )
    .expect("bowtie is a partial order");
    let (a, b) = (bowtie.element("a").unwrap(), bowtie.element("b").unwrap());
    let ub = bowtie.upper_bounds(&[a, b].into_iter().collect()).unwrap();
    println!("bowtie: upper bounds of a,b = {:?}", bowtie.labels_of(&ub));
    println!(
        "bowtie: join(a,b) = {:?}",
        bowtie.join(a, b).map(|j| bowtie.label(j))
    );
    println!(
        "bowtie: first lattice violation = {:?}",
        bowtie.lattice_violation()
    );

    for spec in [
        GenSpec::new(GenKind::Chain, 4),
        GenSpec::new(GenKind::AntichainPlusBottom, 2),
        GenSpec::new(GenKind::Powerset, 3),
        GenSpec::new(GenKind::Divisor, 12),
        GenSpec::new(GenKind::PentagonN5, 5),
    ] {
        let p = make_standard_poset(&spec).expect("standard family");
        let mut chains = 0;
        p.for_each_chain(|_| {
            chains += 1;
            std::ops::ControlFlow::Continue(())
        });
        println!(
            "{:<26} |P|={:<2} covers={:<2} chains={:<3} chain-complete={:<5} complete-lattice={}",
            format!("{}({})", spec.kind, spec.n),
            p.len(),
            p.covers().len(),
            chains,
            p.is_chain_complete(),
            p.is_complete_lattice(),
        );
    }

    let d12 = make_standard_poset(&GenSpec::new(GenKind::Divisor, 12)).unwrap();
    let (four, six) = (d12.element("4").unwrap(), d12.element("6").unwrap());
    println!(
        "divisors of 12: 4 v 6 = {}, 4 ^ 6 = {}",
        d12.label(d12.join(four, six).unwrap()),
        d12.label(d12.meet(four, six).unwrap())
    );
}
