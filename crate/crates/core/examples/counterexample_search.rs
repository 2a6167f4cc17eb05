// Searches random small posets for two isotone maps that do not commute and
// whose orbit suprema over the extensive points miss the joint fixed points.
//
// Prints the first hit as an instance file. Pass a path to write it instead.

use jointfix::cli::InstanceDoc;
use jointfix::oracle::search_noncommutative_counterexample;

fn fixture_text() -> String {
    let found = search_noncommutative_counterexample(0, 100_000, 6)
        .expect("generator parameters are valid")
        .expect("a counterexample exists among the first draws");
    let p = found.family.poset();
    eprintln!("search seed {} on {} elements", found.search_seed, p.len());
    if let Some(w) = &found.verdict.witness {
        eprintln!("witness: {w}");
    }
    let doc = InstanceDoc::from_family(
        &found.family,
        Some(serde_json::json!({ "search_seed": found.search_seed, "max_carrier": 6 })),
    );
    doc.to_canonical_json()
}

fn main() {
    let text = fixture_text();
    match std::env::args().nth(1) {
        Some(path) => std::fs::write(&path, text).expect("fixture is writable"),
        None => print!("{text}"),
    }
}
