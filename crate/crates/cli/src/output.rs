//! Command implementations and JSON output assembly.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use ci_lattice::ci::{count_possible_ci, enumerate_ci, general_ci_query};
use ci_lattice::graphtools::faithful_gaussian;
use ci_lattice::lattice::{
    compute_lattice, compute_mb, full_decomposition, sparse_decomposition, Decomposition,
};
use ci_lattice::oracles::{
    matrix_to_csv, parse_matrix_csv, parse_samples_csv, CovarianceSpec, TableGraphoid,
    UndirectedGraph,
};
use ci_lattice::random::random_graph;
use ci_lattice::stats::{run_recovery_experiment, ExperimentConfig};
use ci_lattice::verify::{brute_boundary, brute_decomposition, check_axioms, check_axioms_sampled};
use ci_lattice::{
    CITriple, Error, GroundSet, IndependenceOracle, IntervalLattice, VarSet, DEFAULT_TOL_CI,
};

use crate::{Command, OracleArgs, OracleKind, UpTo};

pub enum CliError {
    /// Filesystem / usage level problems (exit 2).
    Io(String),
    /// Library errors, mapped to exit codes by kind.
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn read_file(path: &str) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {path}: {e}")))
}

fn resolve_tol(flag: Option<f64>) -> f64 {
    flag.or_else(|| {
        std::env::var("CI_LATTICE_TOL")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(DEFAULT_TOL_CI)
}

#[derive(serde::Deserialize)]
struct TableFile {
    ground: Vec<String>,
    relations: Vec<TableRelation>,
}

#[derive(serde::Deserialize)]
struct TableRelation {
    #[serde(rename = "A")]
    a: Vec<String>,
    #[serde(rename = "B")]
    b: Vec<String>,
    #[serde(rename = "C", default)]
    c: Vec<String>,
}

fn build_oracle(args: &OracleArgs) -> CliResult<Box<dyn IndependenceOracle>> {
    let text = read_file(&args.input)?;
    let tol = resolve_tol(args.tol);
    Ok(match args.oracle {
        OracleKind::Graph => Box::new(UndirectedGraph::parse(&text)?.separation_oracle()),
        OracleKind::Gaussian => Box::new(
            CovarianceSpec::from_covariance(parse_matrix_csv(&text)?)?.exact_oracle_with_tol(tol),
        ),
        OracleKind::Precision => Box::new(
            CovarianceSpec::from_precision(parse_matrix_csv(&text)?)?.exact_oracle_with_tol(tol),
        ),
        OracleKind::Samples => {
            let tau = args.tau.ok_or_else(|| {
                CliError::Core(Error::InvalidArgument(
                    "the samples oracle requires --tau".into(),
                ))
            })?;
            Box::new(parse_samples_csv(&text)?.oracle(tau)?)
        }
        OracleKind::Table => {
            let file: TableFile = serde_json::from_str(&text)
                .map_err(|e| CliError::Core(Error::Parse(format!("table JSON: {e}"))))?;
            let ground = GroundSet::with_labels(file.ground)?;
            let mut relations = Vec::new();
            for r in &file.relations {
                relations.push((
                    set_from_labels(&ground, &r.a)?,
                    set_from_labels(&ground, &r.b)?,
                    set_from_labels(&ground, &r.c)?,
                ));
            }
            Box::new(TableGraphoid::new(ground, &relations)?.oracle())
        }
    })
}

fn set_from_labels(ground: &GroundSet, labels: &[String]) -> Result<VarSet, Error> {
    ground.set_from_labels(labels.iter().map(|s| s.as_str()))
}

fn parse_label_list(ground: &GroundSet, list: &str) -> Result<VarSet, Error> {
    let mut out = VarSet::EMPTY;
    for part in list.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        out = out.with(ground.node_by_label(part)?);
    }
    Ok(out)
}

fn labels(ground: &GroundSet, s: VarSet) -> Vec<String> {
    ground.set_to_labels(s)
}

/// Reproducibility record embedded in every JSON output.
#[derive(Serialize)]
struct Manifest {
    command: &'static str,
    oracle: Option<&'static str>,
    inputs: Vec<String>,
    params: serde_json::Map<String, Value>,
    version: &'static str,
    #[serde(rename = "wallTimeMs")]
    wall_time_ms: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    queries: Option<u64>,
}

struct ManifestBuilder {
    command: &'static str,
    oracle: Option<&'static str>,
    inputs: Vec<String>,
    params: serde_json::Map<String, Value>,
    started: Instant,
}

impl ManifestBuilder {
    fn new(command: &'static str) -> Self {
        ManifestBuilder {
            command,
            oracle: None,
            inputs: Vec::new(),
            params: serde_json::Map::new(),
            started: Instant::now(),
        }
    }

    fn oracle(mut self, kind: OracleKind, input: &str) -> Self {
        self.oracle = Some(kind.name());
        self.inputs.push(input.to_string());
        self
    }

    fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    fn param_opt(self, key: &str, value: Option<impl Into<Value>>) -> Self {
        match value {
            Some(v) => self.param(key, v),
            None => self,
        }
    }

    fn finish(self, queries: Option<u64>) -> Manifest {
        Manifest {
            command: self.command,
            oracle: self.oracle,
            inputs: self.inputs,
            params: self.params,
            version: env!("CARGO_PKG_VERSION"),
            wall_time_ms: self.started.elapsed().as_millis() as u64,
            queries,
        }
    }
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable output"));
}

#[derive(Serialize)]
struct LatticeJson {
    m: Vec<String>,
    #[serde(rename = "M")]
    max: Vec<String>,
}

fn lattice_json(ground: &GroundSet, l: &IntervalLattice) -> LatticeJson {
    LatticeJson {
        m: labels(ground, l.minimum()),
        max: labels(ground, l.maximum()),
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct DecompositionJson {
    j: String,
    lattices: Vec<LatticeJson>,
    k: usize,
    complete: bool,
    covered_total: u64,
    /// lattice count per covered size 2^(|M|-|m|)
    histogram_covered_sizes: BTreeMap<u64, usize>,
    /// lattice count per |m|
    histogram_min_sizes: BTreeMap<usize, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<usize>,
    manifest: Manifest,
}

fn decomposition_json(ground: &GroundSet, dec: &Decomposition, manifest: Manifest) -> DecompositionJson {
    let mut covered_sizes = BTreeMap::new();
    let mut min_sizes = BTreeMap::new();
    for l in dec.lattices() {
        *covered_sizes.entry(l.cardinality() as u64).or_insert(0) += 1;
        *min_sizes.entry(l.minimum().len()).or_insert(0) += 1;
    }
    DecompositionJson {
        j: ground.label(dec.node()).to_string(),
        lattices: dec.lattices().iter().map(|l| lattice_json(ground, l)).collect(),
        k: dec.lattices().len(),
        complete: dec.complete(),
        covered_total: dec.covered_total() as u64,
        histogram_covered_sizes: covered_sizes,
        histogram_min_sizes: min_sizes,
        t: dec.sparse_order(),
        manifest,
    }
}

pub fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Mb { oracle, j, s } => {
            let manifest = ManifestBuilder::new("mb")
                .oracle(oracle.oracle, &oracle.input)
                .param("j", j.clone())
                .param_opt("s", s.clone())
                .param_opt("tau", oracle.tau)
                .param_opt("tol", oracle.tol);
            let ora = build_oracle(&oracle)?;
            let ground = ora.ground().clone();
            let node = ground.node_by_label(&j)?;
            let seed = match &s {
                Some(list) => parse_label_list(&ground, list)?,
                None => ground.all_but(node),
            };
            let m = compute_mb(&ora, node, seed)?;
            print_json(&json!({
                "j": j,
                "S": labels(&ground, seed),
                "m": labels(&ground, m),
                "manifest": manifest.finish(Some(ora.query_count())),
            }));
        }
        Command::Lattice { oracle, j, s } => {
            let manifest = ManifestBuilder::new("lattice")
                .oracle(oracle.oracle, &oracle.input)
                .param("j", j.clone())
                .param_opt("s", s.clone())
                .param_opt("tau", oracle.tau)
                .param_opt("tol", oracle.tol);
            let ora = build_oracle(&oracle)?;
            let ground = ora.ground().clone();
            let node = ground.node_by_label(&j)?;
            let seed = match &s {
                Some(list) => parse_label_list(&ground, list)?,
                None => ground.all_but(node),
            };
            let lat = compute_lattice(&ora, node, seed)?;
            print_json(&json!({
                "j": j,
                "S": labels(&ground, seed),
                "m": labels(&ground, lat.minimum()),
                "M": labels(&ground, lat.maximum()),
                "covered": lat.cardinality() as u64,
                "manifest": manifest.finish(Some(ora.query_count())),
            }));
        }
        Command::Decompose { oracle, j } => {
            let manifest = ManifestBuilder::new("decompose")
                .oracle(oracle.oracle, &oracle.input)
                .param("j", j.clone())
                .param_opt("tau", oracle.tau)
                .param_opt("tol", oracle.tol);
            let ora = build_oracle(&oracle)?;
            let ground = ora.ground().clone();
            if ground.size() > 30 {
                return Err(CliError::Core(Error::TooLarge(format!(
                    "decompose supports up to 30 nodes, got {}",
                    ground.size()
                ))));
            }
            let node = ground.node_by_label(&j)?;
            let dec = full_decomposition(&ora, node)?;
            print_json(&decomposition_json(&ground, &dec, manifest.finish(Some(ora.query_count()))));
        }
        Command::Sparse { oracle, j, t } => {
            let manifest = ManifestBuilder::new("sparse")
                .oracle(oracle.oracle, &oracle.input)
                .param("j", j.clone())
                .param("t", t as u64)
                .param_opt("tau", oracle.tau)
                .param_opt("tol", oracle.tol);
            let ora = build_oracle(&oracle)?;
            let ground = ora.ground().clone();
            let node = ground.node_by_label(&j)?;
            let dec = sparse_decomposition(&ora, node, t)?;
            print_json(&decomposition_json(&ground, &dec, manifest.finish(Some(ora.query_count()))));
        }
        Command::Ci { oracle, a, b, c } => {
            let manifest = ManifestBuilder::new("ci")
                .oracle(oracle.oracle, &oracle.input)
                .param("a", a.clone())
                .param("b", b.clone())
                .param("c", c.clone())
                .param_opt("tau", oracle.tau)
                .param_opt("tol", oracle.tol);
            let ora = build_oracle(&oracle)?;
            let ground = ora.ground().clone();
            let triple = CITriple::new(
                parse_label_list(&ground, &a)?,
                parse_label_list(&ground, &b)?,
                parse_label_list(&ground, &c)?,
            )?;
            let verdict = general_ci_query(&ora, &triple)?;
            let witnesses: Vec<Value> = verdict
                .witnesses
                .iter()
                .map(|w| {
                    json!({
                        "a": ground.label(w.a),
                        "b": ground.label(w.b),
                        "boundary": labels(&ground, w.boundary),
                    })
                })
                .collect();
            print_json(&json!({
                "independent": verdict.independent,
                "witnesses": witnesses,
                "queries": verdict.total_queries,
                "manifest": manifest.finish(Some(ora.query_count())),
            }));
        }
        Command::Enumerate { oracle, j, max } => {
            let manifest = ManifestBuilder::new("enumerate")
                .oracle(oracle.oracle, &oracle.input)
                .param("j", j.clone())
                .param_opt("max", max)
                .param_opt("tau", oracle.tau)
                .param_opt("tol", oracle.tol);
            let ora = build_oracle(&oracle)?;
            let ground = ora.ground().clone();
            if ground.size() > 30 {
                return Err(CliError::Core(Error::TooLarge(format!(
                    "enumerate supports up to 30 nodes, got {}",
                    ground.size()
                ))));
            }
            let node = ground.node_by_label(&j)?;
            let dec = full_decomposition(&ora, node)?;
            let stream = enumerate_ci(&dec);
            let limit = max.unwrap_or(u64::MAX);
            for (emitted, (i, c)) in stream.iter().enumerate() {
                if (emitted as u64) >= limit {
                    break;
                }
                println!(
                    "{}",
                    serde_json::to_string(&json!({
                        "i": ground.label(i),
                        "C": labels(&ground, c),
                    }))
                    .expect("serializable line")
                );
            }
            let trailer = json!({
                "count": stream.count() as u64,
                "possible": count_possible_ci(ground.size())? as u64,
                "partial": stream.is_partial(),
                "manifest": manifest.finish(Some(ora.query_count())),
            });
            println!("{}", serde_json::to_string(&trailer).expect("serializable trailer"));
        }
        Command::CheckAxioms {
            oracle,
            upto,
            budget,
            seed,
        } => {
            let manifest = ManifestBuilder::new("check-axioms")
                .oracle(oracle.oracle, &oracle.input)
                .param("upto", match upto {
                    UpTo::G7 => "g7",
                    UpTo::G8 => "g8",
                })
                .param("budget", budget)
                .param("seed", seed)
                .param_opt("tau", oracle.tau)
                .param_opt("tol", oracle.tol);
            let ora = build_oracle(&oracle)?;
            let ground = ora.ground().clone();
            let wt = upto == UpTo::G8;
            let (mode, report) = if ground.size() <= 5 {
                ("exhaustive", check_axioms(&ora, wt)?)
            } else {
                ("sampled", check_axioms_sampled(&ora, wt, budget, seed)?)
            };
            let results: Vec<Value> = report
                .results
                .iter()
                .map(|r| {
                    let counterexamples: Vec<Value> = r
                        .counterexamples
                        .iter()
                        .map(|ce| {
                            Value::Array(
                                ce.sets
                                    .iter()
                                    .map(|(role, s)| {
                                        json!({ "role": role, "set": labels(&ground, *s) })
                                    })
                                    .collect(),
                            )
                        })
                        .collect();
                    json!({
                        "axiom": r.axiom,
                        "status": r.status,
                        "instancesChecked": r.instances_checked,
                        "counterexamples": counterexamples,
                    })
                })
                .collect();
            print_json(&json!({
                "mode": mode,
                "allHold": report.all_hold(),
                "results": results,
                "manifest": manifest.finish(Some(ora.query_count())),
            }));
        }
        Command::VerifyEquivalence {
            oracle,
            input,
            tau,
            tol,
            random_d,
            seed,
        } => {
            let mut builder = ManifestBuilder::new("verify-equivalence")
                .param("seed", seed)
                .param_opt("randomD", random_d.map(|d| d as u64));
            let ora: Box<dyn IndependenceOracle> = match (oracle, random_d) {
                (Some(kind), None) => {
                    let input = input.expect("clap enforces --input with --oracle");
                    builder = builder.oracle(kind, &input);
                    build_oracle(&OracleArgs {
                        oracle: kind,
                        input,
                        tau,
                        tol,
                    })?
                }
                (None, Some(d)) => Box::new(random_graph(d, 0.5, seed)?.separation_oracle()),
                _ => {
                    return Err(CliError::Io(
                        "verify-equivalence needs either --oracle/--input or --random-d".into(),
                    ))
                }
            };
            let ground = ora.ground().clone();
            let mut entries = Vec::new();
            let mut decompositions = Vec::new();
            let mut pass = true;
            for j in 0..ground.size() {
                let brute = brute_decomposition(&ora, j)?;
                for s in ground.all_but(j).subsets() {
                    let mb_ok = compute_mb(&ora, j, s)? == brute_boundary(&ora, j, s)?;
                    let covering = brute.covering(s);
                    let lattice_ok = covering.len() == 1
                        && compute_lattice(&ora, j, s)? == brute.lattices()[covering[0]];
                    pass &= mb_ok && lattice_ok;
                    entries.push(json!({
                        "j": ground.label(j),
                        "S": labels(&ground, s),
                        "mbOk": mb_ok,
                        "latticeOk": lattice_ok,
                    }));
                }
                let full = full_decomposition(&ora, j)?;
                let mut a: Vec<_> = full.lattices().to_vec();
                let mut b: Vec<_> = brute.lattices().to_vec();
                a.sort();
                b.sort();
                let ok = a == b;
                pass &= ok;
                decompositions.push(json!({ "j": ground.label(j), "ok": ok }));
            }
            print_json(&json!({
                "pass": pass,
                "d": ground.size(),
                "entries": entries,
                "decompositions": decompositions,
                "manifest": builder.finish(Some(ora.query_count())),
            }));
        }
        Command::Experiment {
            oracle,
            input,
            j,
            t,
            n,
            tau,
            trials,
            seed,
        } => {
            let manifest = ManifestBuilder::new("experiment")
                .oracle(oracle, &input)
                .param("j", j.clone())
                .param("t", t as u64)
                .param("n", n as u64)
                .param_opt("tau", tau)
                .param("trials", trials as u64)
                .param("seed", seed);
            let text = read_file(&input)?;
            let spec = match oracle {
                OracleKind::Gaussian => CovarianceSpec::from_covariance(parse_matrix_csv(&text)?)?,
                OracleKind::Precision => CovarianceSpec::from_precision(parse_matrix_csv(&text)?)?,
                OracleKind::Graph => faithful_gaussian(&UndirectedGraph::parse(&text)?, seed)?,
                _ => {
                    return Err(CliError::Core(Error::InvalidArgument(
                        "experiment needs --oracle gaussian, precision, or graph".into(),
                    )))
                }
            };
            let node = spec.ground().node_by_label(&j)?;
            let report = run_recovery_experiment(&ExperimentConfig {
                spec,
                j: node,
                t,
                n,
                tau,
                trials,
                seed,
            })?;
            print_json(&json!({
                "report": report,
                "manifest": manifest.finish(None),
            }));
        }
        Command::GenGaussian { input, seed } => {
            let graph = UndirectedGraph::parse(&read_file(&input)?)?;
            let spec = faithful_gaussian(&graph, seed)?;
            print!("{}", matrix_to_csv(spec.covariance()));
        }
    }
    Ok(())
}
