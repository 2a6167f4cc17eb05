// Writes an instance file, reads it back and solves it.

use jointfix::cli::{load_instance, InstanceDoc};
use jointfix::{joint_fixed_points, SolveOptions};

const TEXT: &str = r#"{
  "elements": ["0", "1", "2", "3"],
  "order": { "covers": [["0", "1"], ["1", "2"], ["2", "3"]] },
  "maps": {
    "up": { "0": "1", "1": "2", "2": "2", "3": "3" },
    "hold": { "0": "2", "1": "2", "2": "2", "3": "3" }
  }
}"#;

fn main() {
    let dir = std::env::temp_dir().join(format!("jointfix-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("chain.json");
    std::fs::write(&path, TEXT).unwrap();

    let inst = load_instance(&path).unwrap();
    println!("digest {}", inst.digest);
    println!("canonical form:\n{}", inst.doc.to_canonical_json());

    let report = joint_fixed_points(&inst.family, &SolveOptions::default()).unwrap();
    println!(
        "fixed points: {:?}",
        inst.poset().labels_of(&report.fix_set)
    );

    match InstanceDoc::parse(r#"{"elements": ["a"], "order": {"covers": []}, "maps": {"f": {}}}"#)
        .and_then(|doc| doc.to_family())
    {
        Ok(_) => println!("unexpectedly valid"),
        Err(e) => println!("invalid instance: {e}"),
    }
    std::fs::remove_dir_all(&dir).ok();
}
