// Runs the verifier over a handful of generated instances and prints every
// verdict.

use jointfix::generators::sample_instance;
use jointfix::oracle::verify_all;

fn main() {
    for seed in [0, 1, 5, 9] {
        let inst = sample_instance(seed, 10).unwrap();
        println!(
            "seed {seed}: {}(n={}) with {} maps {:?}",
            inst.spec.kind,
            inst.spec.n,
            inst.strategy,
            inst.family.names()
        );
        for v in verify_all(&inst.family) {
            let status = match (v.preconds_met, v.holds) {
                (false, _) => "vacuous",
                (true, true) => "holds",
                (true, false) => "FAILS",
            };
            println!(
                "  {:<26} {:<22} {}",
                format!("{:?}", v.claim),
                format!("{:?}", v.hypotheses),
                status
            );
        }
    }
}
