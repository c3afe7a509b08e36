use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use m0n_core::chow::{generic_orbit_class, orbit_class_of_type, tree_cycle_class};
use m0n_core::configurations::{cross_ratio, orbit_form, orbit_ideal_forms, type_of, SetPartition};
use m0n_core::exact_geometry::DEFAULT_PRIME;
use m0n_core::hilbert::{
    generic_orbit_hilbert, generic_orbit_hilbert_on, push_hilbert_along_partition, tree_hilbert,
};
use m0n_core::json::{self as mj, TreeInput};
use m0n_core::operads::{check_procyclic_axioms, signature_of, AxiomConfig};
use m0n_core::oracles::{
    boundary_membership_check, chow_agreement_check, degeneration_fiber_check,
    hilbert_agreement_check,
};
use m0n_core::polynomials::MultilinearPoly;
use m0n_core::sampling::{random_generic_configuration, rng};
use m0n_core::trees::enumerate_stable_trees;
use m0n_core::{Configuration, Error, Label, LabelSet, Result};

#[derive(Parser)]
#[command(
    name = "m0n",
    version,
    about = "Exact invariants of stable rational curves and PGL2 orbit closures"
)]
struct Cli {
    /// Emit JSON (the only output format).
    #[arg(long, global = true)]
    #[allow(dead_code)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Set partition of coordinates by coincidence, e.g. `0,0,1,inf`.
    TypeOf {
        #[arg(allow_hyphen_values = true)]
        config: String,
    },
    /// Cross-ratio of four distinct points, normalized so (0,1,inf,t) gives t.
    CrossRatio {
        #[arg(allow_hyphen_values = true)]
        config: String,
    },
    /// The (1,1,1,1) form of a 4-point configuration, or all 4-subset forms for more points.
    OrbitForm {
        #[arg(allow_hyphen_values = true)]
        config: String,
    },
    /// Forget markings outside `--keep` and contract unstable components.
    Stabilize {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        keep: String,
    },
    /// Glue two trees along the marking `--star` (default `*`).
    Glue {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long, default_value = "*")]
        star: String,
    },
    /// All combinatorial types of stable trees on 1..=n.
    EnumerateTrees {
        #[arg(long)]
        n: usize,
    },
    /// Hilbert polynomial of a tree's subscheme, of a degenerate type, or of a generic orbit closure.
    HilbertPoly {
        #[arg(long, conflicts_with_all = ["type_", "n"])]
        tree: Option<PathBuf>,
        #[arg(long = "type", conflicts_with = "n")]
        type_: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        /// Multidegree to evaluate at, e.g. `1,1,1,1,1`.
        #[arg(long)]
        eval: Option<String>,
    },
    /// Chow class of an orbit closure of a given type, or the cycle class of a tree.
    ChowClass {
        #[arg(long = "type", conflicts_with_all = ["tree", "n"])]
        type_: Option<String>,
        #[arg(long, conflicts_with = "n")]
        tree: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Values of every 4-subset stabilization of a decorated tree.
    Signature {
        #[arg(long)]
        tree: PathBuf,
    },
    /// Run a verification suite and print its report.
    Verify {
        #[command(subcommand)]
        suite: Suite,
    },
}

#[derive(Subcommand)]
enum Suite {
    /// Rank oracle against the generic Hilbert polynomial, multidegrees in {1,2}^n.
    Hilbert {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_PRIME)]
        prime: u64,
    },
    /// Transport counts against orbit classes for every type with at least three parts.
    Chow {
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sampled structure of the special fibres of the degeneration, for every i.
    Degeneration {
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Sampled boundary of a generic orbit closure.
    Boundary {
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Procyclic-operad axioms for the signature, tree and Chow operads.
    Operads {
        #[arg(long = "max-n", default_value_t = 6)]
        max_n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        samples: usize,
    },
}

/// Output and whether it represents success.
struct Outcome {
    value: Value,
    ok: bool,
}

impl From<Value> for Outcome {
    fn from(value: Value) -> Self {
        Outcome { value, ok: true }
    }
}

fn read_tree(path: &Path) -> Result<TreeInput> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    mj::tree_from_json(&v)
}

fn parse_labels(s: &str) -> Result<LabelSet> {
    s.split(',').map(|x| x.trim().parse()).collect()
}

fn parse_csv(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad integer {x:?}")))
        })
        .collect()
}

fn with_eval(p: &MultilinearPoly, eval: Option<&str>) -> Result<Value> {
    let mut out = mj::poly_to_json(p);
    if let Some(e) = eval {
        let t = parse_csv(e)?;
        let vars: Vec<Label> = p.vars().iter().copied().collect();
        if t.len() != vars.len() {
            return Err(Error::OutOfRange(format!(
                "{} values for {} variables",
                t.len(),
                vars.len()
            )));
        }
        let assignment = vars
            .into_iter()
            .zip(t.into_iter().map(Into::into))
            .collect();
        out["value"] = mj::bigint_to_json(&p.evaluate(&assignment)?);
    }
    Ok(out)
}

fn verify(suite: Suite) -> Result<Outcome> {
    match suite {
        Suite::Hilbert { n, seed, prime } => {
            let r = hilbert_agreement_check(n, prime, seed)?;
            let ok = r.mismatched == 0;
            Ok(Outcome {
                value: json!({ "passed": ok, "report": r }),
                ok,
            })
        }
        Suite::Chow { n, seed } => {
            let r = chow_agreement_check(n, seed)?;
            let ok = r.mismatched == 0;
            Ok(Outcome {
                value: json!({ "passed": ok, "report": r }),
                ok,
            })
        }
        Suite::Degeneration { n, seed, samples } => {
            let x = random_generic_configuration(&mut rng(seed), n);
            let reports = (1..n)
                .map(|i| degeneration_fiber_check(n, &x, i, samples, seed.wrapping_add(i as u64)))
                .collect::<Result<Vec<_>>>()?;
            let ok = reports.iter().all(|r| r.passed());
            Ok(Outcome {
                value: json!({ "passed": ok, "x": x.to_string(), "reports": reports }),
                ok,
            })
        }
        Suite::Boundary { n, seed, samples } => {
            let x = random_generic_configuration(&mut rng(seed), n);
            let r = boundary_membership_check(&x, samples, seed)?;
            let ok = r.passed();
            Ok(Outcome {
                value: json!({ "passed": ok, "x": x.to_string(), "report": r }),
                ok,
            })
        }
        Suite::Operads {
            max_n,
            seed,
            samples,
        } => {
            if !(4..=8).contains(&max_n) {
                return Err(Error::OutOfRange(format!("max-n = {max_n} (need 4..=8)")));
            }
            let r = check_procyclic_axioms(&AxiomConfig {
                max_labels: max_n,
                samples,
                seed,
            });
            let ok = r.passed();
            let mut v = serde_json::to_value(&r).expect("report serializes");
            v["passed"] = json!(ok);
            Ok(Outcome { value: v, ok })
        }
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    let out: Value = match cli.command {
        Command::TypeOf { config } => {
            let x: Configuration = config.parse()?;
            let p = type_of(&x);
            let parts: Vec<Value> = p.parts().iter().map(|s| json!(s)).collect();
            json!({ "type": p.to_string(), "parts": parts })
        }
        Command::CrossRatio { config } => {
            let x: Configuration = config.parse()?;
            json!({ "value": cross_ratio(&x)?.to_string() })
        }
        Command::OrbitForm { config } => {
            let x: Configuration = config.parse()?;
            if x.len() == 4 {
                let f = orbit_form(&x)?;
                let mut v = mj::form_to_json(&f);
                v["monomials"] = json!(f.to_monomial_string());
                v
            } else {
                let forms: serde_json::Map<String, Value> = orbit_ideal_forms(&x)?
                    .iter()
                    .map(|(s, f)| {
                        let key = s
                            .iter()
                            .map(|l| l.to_string())
                            .collect::<Vec<_>>()
                            .join(",");
                        (key, mj::form_to_json(f))
                    })
                    .collect();
                json!({ "forms": forms })
            }
        }
        Command::Stabilize { tree, keep } => {
            let keep = parse_labels(&keep)?;
            match read_tree(&tree)? {
                TreeInput::Bare(t) => mj::tree_to_json(&t.stabilize(&keep)?),
                TreeInput::Decorated(d) => mj::decorated_tree_to_json(&d.stabilize(&keep)?),
            }
        }
        Command::Glue { left, right, star } => {
            let star: Label = star.parse()?;
            match (read_tree(&left)?, read_tree(&right)?) {
                (TreeInput::Decorated(a), TreeInput::Decorated(b)) => {
                    mj::decorated_tree_to_json(&a.glue(&b, star)?)
                }
                (a, b) => mj::tree_to_json(&a.tree().glue(&b.tree(), star)?),
            }
        }
        Command::EnumerateTrees { n } => {
            let trees = enumerate_stable_trees(n)?;
            let list: Vec<Value> = trees.iter().map(mj::tree_to_json).collect();
            json!({ "n": n, "count": trees.len(), "trees": list })
        }
        Command::HilbertPoly {
            tree,
            type_,
            n,
            eval,
        } => {
            let p = match (tree, type_, n) {
                (Some(path), _, _) => tree_hilbert(&read_tree(&path)?.tree())?,
                (_, Some(ty), _) => {
                    let p: SetPartition = ty.parse()?;
                    let l = p.num_parts();
                    if l < 3 {
                        return Err(Error::TooDegenerateType);
                    }
                    let q = generic_orbit_hilbert_on(&(1..=l as u32).map(Label).collect())?;
                    push_hilbert_along_partition(&q, &p)?
                }
                (_, _, Some(n)) => generic_orbit_hilbert(n)?,
                _ => {
                    return Err(Error::Parse(
                        "one of --tree, --type, --n is required".into(),
                    ))
                }
            };
            with_eval(&p, eval.as_deref())?
        }
        Command::ChowClass { type_, tree, n } => {
            let c = match (type_, tree, n) {
                (Some(ty), _, _) => orbit_class_of_type(&ty.parse()?)?,
                (_, Some(path), _) => tree_cycle_class(&read_tree(&path)?.tree())?,
                (_, _, Some(n)) => generic_orbit_class(n)?,
                _ => {
                    return Err(Error::Parse(
                        "one of --type, --tree, --n is required".into(),
                    ))
                }
            };
            mj::chow_to_json(&c)
        }
        Command::Signature { tree } => match read_tree(&tree)? {
            TreeInput::Decorated(d) => mj::signature_to_json(&signature_of(&d)?),
            TreeInput::Bare(_) => {
                return Err(Error::Parse(
                    "signature needs positions for every special point".into(),
                ))
            }
        },
        Command::Verify { suite } => return verify(suite),
    };
    Ok(out.into())
}

fn emit(v: &Value) {
    use std::io::Write;
    // a closed pipe downstream is not an error worth reporting
    let _ = writeln!(std::io::stdout(), "{v}");
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome { value, ok }) => {
            emit(&value);
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            emit(&json!({ "error": e.name(), "message": e.to_string() }));
            ExitCode::from(1)
        }
    }
}
