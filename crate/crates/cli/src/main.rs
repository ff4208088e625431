use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use rigidview::camera::{tuple_from_json, tuple_to_json};
use rigidview::constraints::{
    rigid_membership_by_equations, rigid_membership_oracle_with, ConstraintSystem, Family,
    FamilyParams,
};
use rigidview::forms::scaled_distance_q;
use rigidview::harness::{
    numeric_dimension, random_rig, rigid_triangulate_refine, run_experiment, sub_seed, Backend,
    DimensionOptions, ExperimentConfig, ExperimentTag, Height, RefineOptions, Scenario,
};
use rigidview::polyspace::{
    conjecture_generator_count, span_facts, EXPECTED_OCTIC_SPAN, EXPECTED_QUOTIENT,
};
use rigidview::triangulate::triangulate;
use rigidview::{CameraRig, Error, ProjectivePoint, Rational, Scalar, Tolerances};

#[derive(Parser)]
#[command(
    name = "rigidview",
    version,
    about = "Rigid multiview constraints: cameras, triangulation, membership"
)]
struct Cli {
    /// Arithmetic for evaluation.
    #[arg(long, global = true, value_enum, default_value = "exact")]
    backend: BackendArg,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Also write the JSON result to this file.
    #[arg(long, global = true)]
    json_out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Exact,
    Float,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Full,
    Nine,
    Sixteen,
    Oracle,
}

/// JSON arguments accept inline JSON or a path to a JSON file.
#[derive(Subcommand)]
enum Command {
    /// Random rig with integer entries, in general position.
    GenRig {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        height: i64,
        /// Draw entries from [-height, height].
        #[arg(long)]
        signed: bool,
    },
    /// Image tuple of a world point (3 affine or 4 homogeneous coordinates).
    Project {
        #[arg(long)]
        rig: String,
        #[arg(long)]
        point: String,
    },
    /// Recover the world point of an image tuple.
    Triangulate {
        #[arg(long)]
        rig: String,
        #[arg(long)]
        tuple: String,
    },
    /// Membership of a tuple pair in the rigid variety.
    Check {
        #[arg(long)]
        rig: String,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
        #[arg(long, value_enum, default_value = "full")]
        family: FamilyArg,
        /// World distance of the pair.
        #[arg(long, default_value = "1")]
        distance: String,
    },
    /// Spans of the degree-(2,2,2,2) octics and ideal component for two cameras.
    SpanDim {
        /// Rig file or JSON; random rigs from the seed when absent.
        #[arg(long)]
        rig: Option<String>,
        #[arg(long, default_value_t = 1)]
        rigs: usize,
    },
    /// Predicted generator count; prints the total.
    Counts {
        #[arg(long)]
        n: u64,
    },
    /// Numeric dimension of a constrained image variety.
    Dimension {
        /// RIGID_PAIR, COPLANAR_4 or PAIRWISE_3:d12,d13,d23.
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        rig: Option<String>,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 5)]
        base_points: usize,
    },
    /// Least-squares unit-distance pair from noisy images.
    Refine {
        #[arg(long)]
        rig: String,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
        #[arg(long, default_value_t = 200)]
        max_iterations: usize,
    },
    /// Run a seeded randomized experiment.
    Verify {
        #[arg(long)]
        experiment: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 20)]
        height: i64,
    },
}

/// A result document and whether the requested check passed.
struct Outcome {
    doc: Value,
    pass: bool,
    /// Plain text for stdout in place of the document.
    text: Option<String>,
}

impl Outcome {
    fn ok(doc: Value) -> Self {
        Outcome {
            doc,
            pass: true,
            text: None,
        }
    }
}

fn read_json(arg: &str) -> Result<Value, Error> {
    let text = if Path::new(arg).is_file() {
        std::fs::read_to_string(arg).map_err(|e| Error::Parse(format!("{arg}: {e}")))?
    } else {
        arg.to_string()
    };
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("bad JSON in {arg:?}: {e}")))
}

fn read_rig<S: Scalar>(arg: &str) -> Result<CameraRig<S>, Error> {
    CameraRig::from_json(&read_json(arg)?)
}

fn read_tuple<S: Scalar>(arg: &str) -> Result<Vec<ProjectivePoint<S>>, Error> {
    tuple_from_json(&read_json(arg)?)
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    match cli.backend {
        BackendArg::Exact => dispatch::<Rational>(cli),
        BackendArg::Float => dispatch::<f64>(cli),
    }
}

fn dispatch<S: Scalar>(cli: &Cli) -> Result<Outcome, Error> {
    let tol = Tolerances::default();
    match &cli.command {
        Command::GenRig { n, height, signed } => {
            let rig = random_rig(cli.seed, *n, Height::new(*height, *signed)?)?;
            Ok(Outcome::ok(rig.to_json()))
        }
        Command::Project { rig, point } => {
            let rig: CameraRig<S> = read_rig(rig)?;
            let p = ProjectivePoint::<S>::from_json(&read_json(point)?)?;
            let p = match p.dim() {
                3 => ProjectivePoint::from_affine(p.coords()),
                4 => p,
                d => {
                    return Err(Error::Shape(format!(
                        "world point needs 3 or 4 coordinates, got {d}"
                    )))
                }
            };
            Ok(Outcome::ok(tuple_to_json(&rig.forward_map(&p)?)))
        }
        Command::Triangulate { rig, tuple } => {
            let rig: CameraRig<S> = read_rig(rig)?;
            let tuple = read_tuple::<S>(tuple)?;
            match triangulate(&rig, &tuple, &tol) {
                Ok(sol) => Ok(Outcome::ok(json!({
                    "triangulable": true,
                    "x": sol.x.to_json(),
                    "affine": sol.x.dehomogenize().map(|a| Value::Array(a.iter().map(Scalar::to_json).collect())),
                    "witness": { "pair": [sol.witness.pair.0, sol.witness.pair.1], "row": sol.witness.row },
                }))),
                Err(e @ (Error::NotTriangulable | Error::NotInVariety)) => Ok(Outcome {
                    doc: json!({ "triangulable": false, "reason": e.to_string() }),
                    pass: false,
                    text: None,
                }),
                Err(e) => Err(e),
            }
        }
        Command::Check {
            rig,
            u,
            v,
            family,
            distance,
        } => {
            let rig: CameraRig<S> = read_rig(rig)?;
            let (u, v) = (read_tuple::<S>(u)?, read_tuple::<S>(v)?);
            let d = S::from_json(&Value::String(distance.clone()))?;
            let q = scaled_distance_q(&d)?;
            let (name, member) = match family {
                FamilyArg::Oracle => (
                    "ORACLE",
                    rigid_membership_oracle_with(&rig, &q, &u, &v, &tol)?,
                ),
                f => {
                    let family = match f {
                        FamilyArg::Full => Family::OcticFull,
                        FamilyArg::Nine => Family::OcticNine,
                        _ => Family::OcticSixteen,
                    };
                    let params = FamilyParams {
                        form: Some(q),
                        distances: None,
                    };
                    let sys = ConstraintSystem::new(&rig, family, params)?;
                    (
                        family.name(),
                        rigid_membership_by_equations(&sys, &u, &v, &tol)?,
                    )
                }
            };
            Ok(Outcome {
                doc: json!({ "family": name, "backend": S::NAME, "member": member }),
                pass: member,
                text: None,
            })
        }
        Command::SpanDim { rig, rigs } => {
            let list: Vec<(Option<u64>, CameraRig<Rational>)> = match rig {
                Some(r) => vec![(None, read_rig(r)?)],
                None => (0..*rigs as u64)
                    .map(|i| {
                        let s = sub_seed(cli.seed, i);
                        random_rig(s, 2, Height::default()).map(|r| (Some(s), r))
                    })
                    .collect::<Result<_, _>>()?,
            };
            let mut pass = true;
            let mut out = Vec::new();
            for (seed, rig) in &list {
                let facts = span_facts(rig, cli.seed)?;
                let ok = facts.octic_span == EXPECTED_OCTIC_SPAN
                    && facts.quotient() == EXPECTED_QUOTIENT;
                pass &= ok;
                out.push(json!({
                    "rig_seed": seed,
                    "octic_span": facts.octic_span,
                    "ideal_span": facts.ideal_span,
                    "joint_span": facts.joint_span,
                    "quotient": facts.quotient(),
                    "primes": facts.primes,
                    "expected": ok,
                }));
            }
            Ok(Outcome {
                doc: json!({ "rigs": out, "pass": pass }),
                pass,
                text: None,
            })
        }
        Command::Counts { n } => {
            let c = conjecture_generator_count(*n)?;
            Ok(Outcome {
                doc: serde_json::to_value(&c).expect("serializable"),
                pass: c.consistent(),
                text: Some(c.total.to_string()),
            })
        }
        Command::Dimension {
            scenario,
            rig,
            n,
            base_points,
        } => {
            let rig = match rig {
                Some(r) => read_rig::<f64>(r)?,
                None => random_rig(cli.seed, *n, Height::default())?.to_f64(),
            };
            let opts = DimensionOptions {
                base_points: *base_points,
                seed: cli.seed,
                ..Default::default()
            };
            let rep = numeric_dimension(&rig, Scenario::parse(scenario)?, &opts)?;
            Ok(Outcome {
                pass: rep.stable,
                doc: serde_json::to_value(&rep).expect("serializable"),
                text: None,
            })
        }
        Command::Refine {
            rig,
            u,
            v,
            max_iterations,
        } => {
            let rig: CameraRig<f64> = read_rig(rig)?;
            let (u, v) = (read_tuple::<f64>(u)?, read_tuple::<f64>(v)?);
            let opts = RefineOptions {
                max_iterations: *max_iterations,
                ..Default::default()
            };
            let out = rigid_triangulate_refine(&rig, &u, &v, &opts)?;
            Ok(Outcome {
                pass: out.converged,
                doc: serde_json::to_value(&out).expect("serializable"),
                text: None,
            })
        }
        Command::Verify {
            experiment,
            n,
            samples,
            height,
        } => {
            let config = ExperimentConfig {
                n: *n,
                samples: *samples,
                seed: cli.seed,
                height: Height::new(*height, false)?,
                backend: if S::EXACT {
                    Backend::Exact
                } else {
                    Backend::Float
                },
            };
            let rep = run_experiment(ExperimentTag::parse(experiment)?, &config)?;
            Ok(Outcome {
                pass: rep.pass,
                doc: rep.to_json(),
                text: None,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let pretty = serde_json::to_string_pretty(&out.doc).expect("serializable");
    match &out.text {
        Some(t) => println!("{t}"),
        None => println!("{pretty}"),
    }
    if let Some(path) = &cli.json_out {
        if let Err(e) = std::fs::write(path, format!("{pretty}\n")) {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if out.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
