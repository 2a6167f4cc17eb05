//! Instance files, reports, and the `jointfix` command line.
//!
//! Instance files are UTF-8 JSON:
//!
//! ```json
//! {
//!   "elements": ["0", "1", "2"],
//!   "order": { "covers": [["0", "1"], ["1", "2"]] },
//!   "maps": { "f": { "0": "1", "1": "2", "2": "2" } },
//!   "meta": { "rng": "splitmix64", "rng_seed": 7 }
//! }
//! ```
//!
//! `order` is either `{"covers": [...]}` or `{"pairs": [...]}` (the full
//! relation). Canonical output keeps the key order above, writes the order
//! as sorted covering pairs and sorts maps and their entries bytewise by
//! label. A family's declaration order is the sorted order of map names.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::fixpoint::{
    self, FixError, Method, OrbitResult, PreconditionViolation, SolveOptions, Strategy,
};
use crate::generators::{self, FamilyStrategy, GenError, GenKind, GenSpec, RNG_ALGORITHM};
use crate::mapping::{Family, MapError, MapTable};
use crate::oracle::{self, Verdict};
use crate::poset::{Element, OrderError, Poset, RelationInput, Subset};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum OrderDoc {
    Covers(Vec<(String, String)>),
    Pairs(Vec<(String, String)>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub elements: Vec<String>,
    pub order: OrderDoc,
    pub maps: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Value>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValidationError {
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error(transparent)]
    Map(#[from] MapError),
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid instance at `{field}`: {source}")]
    Invalid {
        field: String,
        #[source]
        source: ValidationError,
    },
}

impl InstanceDoc {
    pub fn parse(text: &str) -> Result<Self, LoadError> {
        serde_json::from_str(text).map_err(|e| LoadError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    /// Canonical document for a family: covering pairs and map entries
    /// sorted bytewise by label.
    pub fn from_family(family: &Family, meta: Option<Value>) -> Self {
        let p = family.poset();
        let mut covers: Vec<(String, String)> = p
            .covers()
            .into_iter()
            .map(|(a, b)| (p.label(a).to_owned(), p.label(b).to_owned()))
            .collect();
        covers.sort();
        let maps = family
            .members()
            .iter()
            .map(|m| {
                let table = p
                    .elements()
                    .map(|x| (p.label(x).to_owned(), p.label(m.apply(x)).to_owned()))
                    .collect();
                (m.name().to_owned(), table)
            })
            .collect();
        InstanceDoc {
            elements: p.labels().to_vec(),
            order: OrderDoc::Covers(covers),
            maps,
            meta,
        }
    }

    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("instance documents serialize");
        s.push('\n');
        s
    }

    /// Validates the document into a poset and a family over it.
    pub fn to_family(&self) -> Result<Family, LoadError> {
        let (kind, pairs, input) = match &self.order {
            OrderDoc::Covers(p) => ("covers", p, RelationInput::Covers),
            OrderDoc::Pairs(p) => ("pairs", p, RelationInput::Full),
        };
        let poset = Poset::build(self.elements.iter().cloned(), pairs.iter().cloned(), input)
            .map_err(|e| {
                let field = match &e {
                    OrderError::DuplicateLabel(_) | OrderError::EmptyCarrier => {
                        "elements".to_owned()
                    }
                    OrderError::UnknownLabel(l) => {
                        match pairs.iter().position(|(a, b)| a == l || b == l) {
                            Some(i) => format!("order.{kind}[{i}]"),
                            None => format!("order.{kind}"),
                        }
                    }
                    _ => format!("order.{kind}"),
                };
                LoadError::Invalid {
                    field,
                    source: e.into(),
                }
            })?;
        let poset = Arc::new(poset);
        let maps = self
            .maps
            .iter()
            .map(|(name, table)| {
                MapTable::build(&poset, name.clone(), table.iter()).map_err(|e| {
                    LoadError::Invalid {
                        field: format!("maps.{name}"),
                        source: e.into(),
                    }
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Family::new(maps).map_err(|e| LoadError::Invalid {
            field: "maps".to_owned(),
            source: e.into(),
        })
    }
}

/// A loaded instance with the digest of its canonical form.
#[derive(Clone, Debug)]
pub struct Instance {
    pub family: Family,
    pub doc: InstanceDoc,
    pub digest: String,
}

impl Instance {
    pub fn from_doc(doc: InstanceDoc) -> Result<Self, LoadError> {
        let family = doc.to_family()?;
        let canonical = InstanceDoc::from_family(&family, doc.meta.clone()).to_canonical_json();
        let digest = format!(
            "sha256:{}",
            hex::encode(Sha256::digest(canonical.as_bytes()))
        );
        Ok(Instance {
            family,
            doc,
            digest,
        })
    }

    pub fn poset(&self) -> &Arc<Poset> {
        self.family.poset()
    }
}

pub fn load_instance(path: &Path) -> Result<Instance, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_owned(),
        source,
    })?;
    Instance::from_doc(InstanceDoc::parse(&text)?)
}

#[derive(Debug, Parser)]
#[command(
    name = "jointfix",
    version,
    about = "Joint fixed points of commutative isotone map families"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Report order and map properties of an instance.
    Check {
        file: PathBuf,
        /// Comma-separated map names (default: all maps).
        #[arg(long, value_delimiter = ',')]
        family: Option<Vec<String>>,
    },
    /// Compute the joint fixed points and the least one.
    Solve {
        file: PathBuf,
        #[arg(long, value_delimiter = ',')]
        family: Option<Vec<String>>,
        #[arg(long, value_enum, default_value_t = Strategy::Closure)]
        strategy: Strategy,
        #[arg(long)]
        unsafe_skip_preconditions: bool,
    },
    /// Kleene iteration of one map.
    Kleene {
        file: PathBuf,
        #[arg(long)]
        map: String,
        /// Start label (default: the least element).
        #[arg(long)]
        start: Option<String>,
        #[arg(long)]
        unsafe_skip_preconditions: bool,
    },
    /// Fixed points of one map as Kleene limits from its extensive seeds.
    Seeds {
        file: PathBuf,
        #[arg(long)]
        map: String,
        #[arg(long)]
        unsafe_skip_preconditions: bool,
    },
    /// Brute-force fixed points and every verdict.
    Oracle {
        file: PathBuf,
        #[arg(long, value_delimiter = ',')]
        family: Option<Vec<String>>,
    },
    /// Generate an instance file.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        #[arg(long)]
        n: usize,
        /// Second factor for `product` (default: n).
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 0)]
        rng_seed: u64,
        /// Default: join-translations on lattices, powers elsewhere.
        #[arg(long, value_enum)]
        strategy: Option<FamilyStrategy>,
        #[arg(long, default_value_t = 2)]
        count: usize,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
}

#[derive(Debug, Serialize)]
struct Preconditions {
    chain_complete: bool,
    isotone: bool,
    commutative: bool,
    complete_lattice: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    violations: Vec<String>,
}

#[derive(Debug, Serialize)]
struct MapProperties {
    name: String,
    isotone: bool,
    chain_continuous: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    isotonicity_witness: Option<(String, String)>,
    fixed_points: Vec<String>,
}

#[derive(Debug, Serialize)]
struct Properties {
    elements: usize,
    bottom: Option<String>,
    top: Option<String>,
    chain_complete: bool,
    complete_lattice: bool,
    commutative: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    commutation_witness: Option<Value>,
    maps: Vec<MapProperties>,
    extensivity_domain: Vec<String>,
}

#[derive(Debug, Serialize)]
struct ErrorDoc {
    kind: String,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Value>,
}

#[derive(Debug, Serialize)]
struct SeedDoc {
    seed: String,
    orbit: Vec<String>,
    supremum: String,
    applications: usize,
}

#[derive(Debug, Serialize)]
struct KleeneDoc {
    map: String,
    start: String,
    fixpoint: String,
    steps: usize,
    trace: Vec<String>,
}

#[derive(Debug, Serialize)]
struct Timing {
    elapsed_us: u128,
}

#[derive(Debug, Serialize)]
struct Report {
    command: &'static str,
    instance_digest: String,
    family: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    preconditions: Option<Preconditions>,
    #[serde(skip_serializing_if = "Option::is_none")]
    properties: Option<Properties>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<ErrorDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    method: Option<Method>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fix_set: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    least: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    per_seed: Vec<SeedDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kleene: Option<KleeneDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    brute_force: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    verdicts: Vec<Verdict>,
    timing: Timing,
}

impl Report {
    fn new(command: &'static str, instance: &Instance, family: &Family) -> Self {
        Report {
            command,
            instance_digest: instance.digest.clone(),
            family: family.names(),
            preconditions: None,
            properties: None,
            error: None,
            method: None,
            fix_set: None,
            least: None,
            per_seed: Vec::new(),
            kleene: None,
            brute_force: None,
            verdicts: Vec::new(),
            timing: Timing { elapsed_us: 0 },
        }
    }
}

fn labels(p: &Poset, s: &Subset) -> Vec<String> {
    p.labels_of(s)
}

fn label(p: &Poset, e: Element) -> String {
    p.label(e).to_owned()
}

fn seed_docs(p: &Poset, per_seed: &[OrbitResult]) -> Vec<SeedDoc> {
    per_seed
        .iter()
        .map(|r| SeedDoc {
            seed: label(p, r.seed),
            orbit: labels(p, &r.orbit),
            supremum: label(p, r.supremum),
            applications: r.applications,
        })
        .collect()
}

fn preconditions(family: &Family) -> Preconditions {
    let p = family.poset();
    let mut violations = Vec::new();
    if !p.is_chain_complete() {
        violations.push(PreconditionViolation::NotChainComplete.to_string());
    }
    let iso = family.isotonicity_violation();
    if let Some(v) = &iso {
        violations.push(
            PreconditionViolation::NotIsotone {
                map: v.map.clone(),
                x: label(p, v.x),
                y: label(p, v.y),
            }
            .to_string(),
        );
    }
    let com = family.commutation_violation();
    if let Some(v) = &com {
        violations.push(
            PreconditionViolation::NotCommutative {
                first: v.first.clone(),
                second: v.second.clone(),
                at: label(p, v.at),
            }
            .to_string(),
        );
    }
    Preconditions {
        chain_complete: p.is_chain_complete(),
        isotone: iso.is_none(),
        commutative: com.is_none(),
        complete_lattice: p.is_complete_lattice(),
        violations,
    }
}

fn error_doc(err: &FixError) -> ErrorDoc {
    let (kind, witness) = match err {
        FixError::PreconditionViolated(v) => {
            let witness = match v {
                PreconditionViolation::NotChainComplete => None,
                PreconditionViolation::NotIsotone { map, x, y } => {
                    Some(json!({"map": map, "x": x, "y": y}))
                }
                PreconditionViolation::NotCommutative { first, second, at } => {
                    Some(json!({"first": first, "second": second, "at": at}))
                }
                PreconditionViolation::StartNotExtensive { map, start } => {
                    Some(json!({"map": map, "start": start}))
                }
                PreconditionViolation::SeedNotExtensive { seed } => Some(json!({"seed": seed})),
            };
            (format!("precondition-violated:{}", v.kind()), witness)
        }
        FixError::NoSupremum { seed } => ("no-supremum".to_owned(), Some(json!({"seed": seed}))),
        FixError::CycleDetected { cycle } => {
            ("cycle-detected".to_owned(), Some(json!({"cycle": cycle})))
        }
        FixError::SweepBudgetExceeded { budget } => (
            "sweep-budget-exceeded".to_owned(),
            Some(json!({"budget": budget})),
        ),
        FixError::Map(MapError::ClosureBudgetExceeded(b)) => (
            "closure-budget-exceeded".to_owned(),
            Some(json!({"budget": b})),
        ),
        FixError::Map(_) | FixError::Order(_) => ("invalid-input".to_owned(), None),
    };
    ErrorDoc {
        kind,
        message: err.to_string(),
        witness,
    }
}

/// Parses `args` (program name first), runs the command, writes the report
/// to `out` and diagnostics to `err`, and returns the exit code: 0 on
/// success, 1 when a precondition or an asserted verdict fails, 2 on usage,
/// I/O or parse errors.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "jointfix: {e}");
            EXIT_USAGE
        }
    }
}

#[derive(Debug, Error)]
enum CommandError {
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write report: {0}")]
    Output(#[from] std::io::Error),
}

fn select(instance: &Instance, names: Option<&[String]>) -> Result<Family, MapError> {
    match names {
        Some(names) => instance.family.select(names),
        None => Ok(instance.family.clone()),
    }
}

fn emit(out: &mut dyn Write, mut report: Report, started: Instant) -> Result<(), CommandError> {
    report.timing.elapsed_us = started.elapsed().as_micros();
    let mut text = serde_json::to_string_pretty(&report).expect("reports serialize");
    text.push('\n');
    out.write_all(text.as_bytes())?;
    Ok(())
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32, CommandError> {
    let started = Instant::now();
    match command {
        Command::Check { file, family } => {
            let instance = load_instance(&file)?;
            let family = select(&instance, family.as_deref())?;
            let p = family.poset();
            let mut report = Report::new("check", &instance, &family);
            report.properties = Some(Properties {
                elements: p.len(),
                bottom: p.bottom().map(|b| label(p, b)),
                top: p.top().map(|t| label(p, t)),
                chain_complete: p.is_chain_complete(),
                complete_lattice: p.is_complete_lattice(),
                commutative: family.is_commutative(),
                commutation_witness: family
                    .commutation_violation()
                    .map(|v| json!({"first": v.first, "second": v.second, "at": label(p, v.at)})),
                maps: family
                    .members()
                    .iter()
                    .map(|m| MapProperties {
                        name: m.name().to_owned(),
                        isotone: m.is_isotone(),
                        chain_continuous: m.is_chain_continuous(),
                        isotonicity_witness: m
                            .isotonicity_violation()
                            .map(|(x, y)| (label(p, x), label(p, y))),
                        fixed_points: labels(p, &m.fixed_points()),
                    })
                    .collect(),
                extensivity_domain: labels(p, &family.extensivity_domain()),
            });
            emit(out, report, started)?;
            Ok(EXIT_OK)
        }
        Command::Solve {
            file,
            family,
            strategy,
            unsafe_skip_preconditions,
        } => {
            let instance = load_instance(&file)?;
            let family = select(&instance, family.as_deref())?;
            let p = Arc::clone(family.poset());
            let options = SolveOptions {
                check_preconditions: !unsafe_skip_preconditions,
                strategy,
            };
            let mut report = Report::new("solve", &instance, &family);
            report.preconditions = Some(preconditions(&family));
            let code = match fixpoint::joint_fixed_points(&family, &options) {
                Ok(fix) => {
                    report.method = Some(fix.method);
                    report.fix_set = Some(labels(&p, &fix.fix_set));
                    let least = match strategy {
                        Strategy::Closure => {
                            fixpoint::least_joint_fixed_point(&family, &options).ok()
                        }
                        Strategy::RoundRobin => fix.least,
                    };
                    report.least = least.map(|l| label(&p, l));
                    report.per_seed = seed_docs(&p, &fix.per_seed);
                    EXIT_OK
                }
                Err(e) => {
                    report.error = Some(error_doc(&e));
                    EXIT_FAILED
                }
            };
            emit(out, report, started)?;
            Ok(code)
        }
        Command::Kleene {
            file,
            map,
            start,
            unsafe_skip_preconditions,
        } => {
            let instance = load_instance(&file)?;
            let f = instance.family.get(&map)?.clone();
            let p = Arc::clone(f.poset());
            let start = start.as_deref().map(|s| p.element(s)).transpose()?;
            let mut report = Report::new("kleene", &instance, &Family::singleton(f.clone()));
            report.preconditions = Some(preconditions(&Family::singleton(f.clone())));
            let code = match fixpoint::kleene_iterate(&f, start, !unsafe_skip_preconditions) {
                Ok(run) => {
                    report.method = Some(Method::Kleene);
                    report.kleene = Some(KleeneDoc {
                        map: f.name().to_owned(),
                        start: label(&p, run.start),
                        fixpoint: label(&p, run.fixpoint),
                        steps: run.steps(),
                        trace: run.trace.iter().map(|&e| label(&p, e)).collect(),
                    });
                    EXIT_OK
                }
                Err(e) => {
                    report.error = Some(error_doc(&e));
                    EXIT_FAILED
                }
            };
            emit(out, report, started)?;
            Ok(code)
        }
        Command::Seeds {
            file,
            map,
            unsafe_skip_preconditions,
        } => {
            let instance = load_instance(&file)?;
            let f = instance.family.get(&map)?.clone();
            let p = Arc::clone(f.poset());
            let single = Family::singleton(f.clone());
            let mut report = Report::new("seeds", &instance, &single);
            report.preconditions = Some(preconditions(&single));
            let options = SolveOptions {
                check_preconditions: !unsafe_skip_preconditions,
                ..SolveOptions::default()
            };
            let code = match fixpoint::fixed_points_single(&f, &options) {
                Ok(fix) => {
                    report.method = Some(fix.method);
                    report.fix_set = Some(labels(&p, &fix.fix_set));
                    report.least = fix.least.map(|l| label(&p, l));
                    report.per_seed = seed_docs(&p, &fix.per_seed);
                    EXIT_OK
                }
                Err(e) => {
                    report.error = Some(error_doc(&e));
                    EXIT_FAILED
                }
            };
            emit(out, report, started)?;
            Ok(code)
        }
        Command::Oracle { file, family } => {
            let instance = load_instance(&file)?;
            let family = select(&instance, family.as_deref())?;
            let p = family.poset();
            let brute = oracle::brute_force_fixed_points(&family);
            let mut report = Report::new("oracle", &instance, &family);
            report.preconditions = Some(preconditions(&family));
            report.method = Some(Method::BruteForce);
            report.least = p.minimum(&brute).map(|l| label(p, l));
            report.brute_force = Some(labels(p, &brute));
            report.verdicts = oracle::verify_all(&family);
            let code = if report.verdicts.iter().any(Verdict::is_refutation) {
                EXIT_FAILED
            } else {
                EXIT_OK
            };
            emit(out, report, started)?;
            Ok(code)
        }
        Command::Gen {
            kind,
            n,
            m,
            rng_seed,
            strategy,
            count,
            output,
        } => {
            let spec = GenSpec {
                kind,
                n,
                m: m.unwrap_or(n),
                rng_seed,
            };
            let poset = Arc::new(generators::make_standard_poset(&spec)?);
            let strategy = strategy.unwrap_or(if poset.is_complete_lattice() {
                FamilyStrategy::JoinTranslations
            } else {
                FamilyStrategy::Powers
            });
            let family = generators::random_commuting_family(&poset, strategy, count, rng_seed)?;
            let doc =
                InstanceDoc::from_family(&family, Some(generator_meta(&spec, strategy, count)));
            std::fs::write(&output, doc.to_canonical_json()).map_err(|source| {
                CommandError::Write {
                    path: output.clone(),
                    source,
                }
            })?;
            Ok(EXIT_OK)
        }
    }
}

/// The `meta` block recorded in generated instance files.
pub fn generator_meta(spec: &GenSpec, strategy: FamilyStrategy, count: usize) -> Value {
    json!({
        "generator": {
            "kind": spec.kind.to_string(),
            "n": spec.n,
            "m": spec.m,
            "strategy": strategy.to_string(),
            "count": count,
        },
        "rng": RNG_ALGORITHM,
        "rng_seed": spec.rng_seed,
    })
}
