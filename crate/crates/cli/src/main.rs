mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use approxhom::diff::Engine;
use approxhom::functor::{AbelianInclusion, Abelianization, FunctorName, Identity, Tensor};
use approxhom::suites::SUITES;
use approxhom::{
    Backend, CoefficientDomain, Error, Integers, Lie2Backend, ModBackend, Rationals, ResidueRing,
    Result, Ring,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use commands::{FunctorTask, MooreSource, Outcome, Params, Status, Task};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "approxhom",
    version,
    about = "Resolutions, approximate homotopies and derived functors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BackendName {
    Mod,
    Lie2,
}

#[derive(Args, Debug, Clone)]
struct Common {
    #[arg(long, value_enum, default_value = "mod")]
    backend: BackendName,
    /// q, z, fp:<p> or zm:<m>; defaults to zm:4 for modules and fp:3 for lie2.
    #[arg(long, alias = "field")]
    domain: Option<String>,
    #[arg(long, default_value_t = 3)]
    max_degree: usize,
    #[arg(long, default_value_t = 512)]
    dim_cap: usize,
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Write the JSON report here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct Target {
    /// `+`-separated summands, e.g. `z2+z4`, `free:2`, `heisenberg`, `a2`.
    #[arg(long)]
    object: Option<String>,
    /// JSON file holding an object, complex or sequence.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build and validate a projective resolution.
    Resolve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        target: Target,
    },
    /// Certified homology of a complex (from --input) or of a resolution.
    Homology {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        target: Target,
    },
    /// Left derived functors L_0 .. L_{max-degree - 1}.
    Derive {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value = "identity")]
        functor: String,
    },
    /// Long exact sequence of derived functors for a short exact sequence.
    Les {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value = "identity")]
        functor: String,
        /// syzygy:<X>, split:<Y>,<Z>, random or random-split.
        #[arg(long)]
        ses: Option<String>,
    },
    /// Horseshoe resolution of a short exact sequence.
    Horseshoe {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        ses: Option<String>,
    },
    /// Approximate homotopies between identity liftings of two resolutions.
    Homotopy {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        target: Target,
        /// Seed of the second resolution; defaults to --seed + 1.
        #[arg(long)]
        seed2: Option<u64>,
    },
    /// Moore complex of a simplicial resolution.
    Moore {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        target: Target,
        #[arg(long, value_enum, default_value = "cech")]
        source: MooreSource,
    },
    /// Compare derived values from simplicial resolutions against the chain route.
    SimplicialCompare {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value = "identity")]
        functor: String,
    },
    /// Sample the projectivity condition on split epis out of free objects.
    Condp {
        #[command(flatten)]
        common: Common,
    },
    /// Run a property suite, `functor-properties` or `resolution-independence`.
    Check {
        suite: String,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value = "identity")]
        functor: String,
        /// Size hint for sampled objects.
        #[arg(long, default_value_t = 2)]
        size: usize,
    },
    /// Rerun the configuration recorded in a report and compare.
    Replay {
        report: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

enum Job {
    Plain(Box<dyn PlainJob>),
    Functor(Box<dyn FunctorJob>, String),
}

trait PlainJob {
    fn dispatch(
        &self,
        ring: RingChoice,
        backend: BackendName,
        lim: (usize, u64),
    ) -> Result<Outcome>;
}

impl<T: Task> PlainJob for T {
    fn dispatch(
        &self,
        ring: RingChoice,
        backend: BackendName,
        lim: (usize, u64),
    ) -> Result<Outcome> {
        macro_rules! go {
            ($r:expr) => {
                match backend {
                    BackendName::Mod => {
                        self.run(&Engine::with_limits(ModBackend::new($r), lim.0, lim.1))
                    }
                    BackendName::Lie2 => {
                        self.run(&Engine::with_limits(Lie2Backend::new($r)?, lim.0, lim.1))
                    }
                }
            };
        }
        match ring {
            RingChoice::Q => go!(Rationals),
            RingChoice::Z => go!(Integers),
            RingChoice::Zm(r) => go!(r),
        }
    }
}

trait FunctorJob {
    fn dispatch(
        &self,
        ring: RingChoice,
        backend: BackendName,
        lim: (usize, u64),
        functor: &str,
    ) -> Result<Outcome>;
}

impl<T: FunctorTask> FunctorJob for T {
    fn dispatch(
        &self,
        ring: RingChoice,
        backend: BackendName,
        lim: (usize, u64),
        functor: &str,
    ) -> Result<Outcome> {
        let name = FunctorName::parse(functor)?;
        macro_rules! go {
            ($r:expr) => {{
                let r = $r;
                match (backend, name) {
                    (BackendName::Mod, FunctorName::Identity) => {
                        let e = Engine::with_limits(ModBackend::new(r), lim.0, lim.1);
                        self.run(&Identity(e.backend().clone()), &e)
                    }
                    (BackendName::Mod, FunctorName::Tensor(t)) => {
                        let e = Engine::with_limits(ModBackend::new(r), lim.0, lim.1);
                        let t = e.ring().from_i64(t);
                        self.run(&Tensor::new(e.backend().clone(), t), &e)
                    }
                    (BackendName::Mod, FunctorName::AbelianInclusion) => {
                        let f = AbelianInclusion::new(Lie2Backend::new(r.clone())?);
                        self.run(&f, &Engine::with_limits(ModBackend::new(r), lim.0, lim.1))
                    }
                    (BackendName::Lie2, FunctorName::Identity) => {
                        let e = Engine::with_limits(Lie2Backend::new(r)?, lim.0, lim.1);
                        self.run(&Identity(e.backend().clone()), &e)
                    }
                    (BackendName::Lie2, FunctorName::Abelianization) => {
                        let e = Engine::with_limits(Lie2Backend::new(r)?, lim.0, lim.1);
                        self.run(&Abelianization::new(e.backend().clone()), &e)
                    }
                    (b, n) => Err(Error::Unsupported(format!(
                        "functor {n:?} is not defined on the {b:?} backend"
                    ))),
                }
            }};
        }
        match ring {
            RingChoice::Q => go!(Rationals),
            RingChoice::Z => go!(Integers),
            RingChoice::Zm(r) => go!(r),
        }
    }
}

#[derive(Clone)]
enum RingChoice {
    Q,
    Z,
    Zm(ResidueRing),
}

fn ring_choice(domain: &CoefficientDomain) -> Result<RingChoice> {
    Ok(match *domain {
        CoefficientDomain::Rationals => RingChoice::Q,
        CoefficientDomain::Integers => RingChoice::Z,
        CoefficientDomain::PrimeField(p) => {
            RingChoice::Zm(ResidueRing::prime_field(p).map_err(Error::Parse)?)
        }
        CoefficientDomain::ResidueRing(m) => {
            RingChoice::Zm(ResidueRing::new(m).map_err(Error::Parse)?)
        }
    })
}

fn params(c: &Common, t: Option<&Target>, ses: Option<String>) -> Params {
    Params {
        max_degree: c.max_degree,
        seed: c.seed,
        samples: c.samples,
        budget: c.budget,
        object: t.and_then(|t| t.object.clone()),
        ses,
        input: t.and_then(|t| t.input.clone()),
    }
}

fn plan(cmd: Command) -> std::result::Result<(Common, Job), String> {
    Ok(match cmd {
        Command::Resolve { common, target } => {
            let p = params(&common, Some(&target), None);
            (common, Job::Plain(Box::new(commands::Resolve(p))))
        }
        Command::Homology { common, target } => {
            let p = params(&common, Some(&target), None);
            (common, Job::Plain(Box::new(commands::Homology(p))))
        }
        Command::Horseshoe {
            common,
            target,
            ses,
        } => {
            let p = params(&common, Some(&target), ses);
            (common, Job::Plain(Box::new(commands::Horseshoe(p))))
        }
        Command::Homotopy {
            common,
            target,
            seed2,
        } => {
            let p = params(&common, Some(&target), None);
            let seed2 = seed2.unwrap_or(common.seed.wrapping_add(1));
            (
                common,
                Job::Plain(Box::new(commands::Homotopy { params: p, seed2 })),
            )
        }
        Command::Moore {
            common,
            target,
            source,
        } => {
            let p = params(&common, Some(&target), None);
            (
                common,
                Job::Plain(Box::new(commands::Moore { params: p, source })),
            )
        }
        Command::Condp { common } => {
            let p = params(&common, None, None);
            (common, Job::Plain(Box::new(commands::Condp(p))))
        }
        Command::Derive {
            common,
            target,
            functor,
        } => {
            let p = params(&common, Some(&target), None);
            (common, Job::Functor(Box::new(commands::Derive(p)), functor))
        }
        Command::Les {
            common,
            target,
            functor,
            ses,
        } => {
            let p = params(&common, Some(&target), ses);
            (common, Job::Functor(Box::new(commands::Les(p)), functor))
        }
        Command::SimplicialCompare {
            common,
            target,
            functor,
        } => {
            let p = params(&common, Some(&target), None);
            (
                common,
                Job::Functor(Box::new(commands::SimplicialCompare(p)), functor),
            )
        }
        Command::Check {
            suite,
            common,
            target,
            functor,
            size,
        } => {
            let p = params(&common, Some(&target), None);
            match suite.as_str() {
                "functor-properties" => (
                    common,
                    Job::Functor(Box::new(commands::FunctorProperties(p)), functor),
                ),
                "resolution-independence" => (
                    common,
                    Job::Functor(Box::new(commands::Independent(p)), functor),
                ),
                s if SUITES.contains(&s) => (
                    common,
                    Job::Plain(Box::new(commands::Check {
                        params: p,
                        suite,
                        size,
                    })),
                ),
                s => return Err(format!(
                    "unknown suite `{s}`; known: {}, functor-properties, resolution-independence",
                    SUITES.join(", ")
                )),
            }
        }
        Command::Replay { .. } => unreachable!("replay is handled before planning"),
    })
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parse(_) | Error::UnknownFunctor(_) | Error::Unsupported(_) => 3,
        Error::InsufficientTruncation(_) => 2,
        e if e.is_obstruction() => 2,
        _ => 1,
    }
}

fn config(c: &Common, domain: &CoefficientDomain) -> Value {
    json!({
        "backend": match c.backend { BackendName::Mod => "mod", BackendName::Lie2 => "lie2" },
        "domain": domain.to_string(),
        "max_degree": c.max_degree,
        "dim_cap": c.dim_cap,
        "budget": c.budget,
        "seed": c.seed,
        "samples": c.samples,
    })
}

/// Drops `-o`/`--output` so the recorded argv replays to the same report.
fn recorded_argv(args: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        if a == "-o" || a == "--output" {
            it.next();
        } else if !a.starts_with("--output=") {
            out.push(a.clone());
        }
    }
    out
}

fn print_summary(command: &str, status: &str, rows: &[(String, String)]) {
    let w = rows
        .iter()
        .map(|(k, _)| k.chars().count())
        .max()
        .unwrap_or(0)
        .max(6);
    eprintln!("{command}");
    for (k, v) in rows {
        eprintln!("  {k:<w$}  {v}");
    }
    eprintln!("  {:<w$}  {status}", "status");
}

fn emit(doc: &Value, output: Option<&PathBuf>) -> std::result::Result<(), String> {
    let text = serde_json::to_string_pretty(doc).expect("serializable") + "\n";
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(3)
}

/// Runs one invocation and returns the report document with its exit code.
fn execute(args: &[String]) -> std::result::Result<(Value, u8, Option<PathBuf>), ExitCode> {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return Err(ExitCode::from(code));
        }
    };
    if let Command::Replay { report, output } = cli.command {
        return replay(&report, output);
    }
    let command = args.get(1).cloned().unwrap_or_default();
    let (common, job) = plan(cli.command).map_err(usage)?;
    let default_domain = match common.backend {
        BackendName::Mod => "zm:4",
        BackendName::Lie2 => "fp:3",
    };
    let domain = CoefficientDomain::parse(common.domain.as_deref().unwrap_or(default_domain))
        .map_err(usage)?;
    let ring = ring_choice(&domain).map_err(usage)?;
    let lim = (common.dim_cap, common.budget);
    let functor = match &job {
        Job::Functor(_, f) => Some(f.clone()),
        Job::Plain(_) => None,
    };
    let outcome = match job {
        Job::Plain(j) => j.dispatch(ring, common.backend, lim),
        Job::Functor(j, f) => j.dispatch(ring, common.backend, lim, &f),
    };
    let mut doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": config(&common, &domain),
        "argv": recorded_argv(args),
    });
    if let Some(f) = functor {
        doc["config"]["functor"] = json!(f);
    }
    let code = match outcome {
        Ok(o) => {
            print_summary(&command, o.status.label(), &o.summary);
            doc["status"] = json!(o.status.label());
            doc["result"] = o.result;
            o.status.code()
        }
        Err(err) => {
            let code = exit_code(&err);
            if code == 3 {
                return Err(usage(&err));
            }
            let status = if code == 2 {
                Status::Inconclusive
            } else {
                Status::Fail
            };
            print_summary(
                &command,
                status.label(),
                &[("error".into(), err.to_string())],
            );
            doc["status"] = json!(status.label());
            doc["error"] = json!(err.to_string());
            code
        }
    };
    Ok((doc, code, common.output))
}

fn replay(
    path: &PathBuf,
    output: Option<PathBuf>,
) -> std::result::Result<(Value, u8, Option<PathBuf>), ExitCode> {
    let text =
        std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let recorded: Value =
        serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let argv: Vec<String> = recorded["argv"]
        .as_array()
        .ok_or_else(|| usage("report has no recorded argv"))?
        .iter()
        .map(|a| {
            a.as_str()
                .map(String::from)
                .ok_or_else(|| usage("argv entries must be strings"))
        })
        .collect::<std::result::Result<_, _>>()?;
    if argv.first().is_some_and(|a| a == "replay") {
        return Err(usage("cannot replay a replay report"));
    }
    let mut args = vec!["approxhom".to_string()];
    args.extend(argv);
    let (doc, code, _) = execute(&args)?;
    let identical = doc == recorded;
    eprintln!(
        "  {:<6}  {}",
        "replay",
        if identical { "identical" } else { "DIFFERS" }
    );
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "replay",
        "identical": identical,
        "status": if identical { doc["status"].clone() } else { json!("fail") },
        "report": doc,
    });
    Ok((doc, if identical { code } else { 1 }, output))
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    match execute(&args) {
        Ok((doc, code, output)) => match emit(&doc, output.as_ref()) {
            Ok(()) => ExitCode::from(code),
            Err(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(1)
            }
        },
        Err(code) => code,
    }
}
