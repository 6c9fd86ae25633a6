//! Subcommand bodies, generic over the backend and functor.

use std::path::PathBuf;

use approxhom::category::{Backend, Category};
use approxhom::chains::{check_certificate, homology, ChainMap};
use approxhom::derived::{
    compare_simplicial, condition_p_probe, derive, long_exact_sequence,
    resolution_independence_check, ConditionP, Independence,
};
use approxhom::diff::Engine;
use approxhom::functor::{functor_property_report, Functor};
use approxhom::homotopy::{
    construct_homotopy, homology_agreement, reverse_homotopy, verify_homotopy,
};
use approxhom::resolution::{
    build_resolution, horseshoe, lift_morphism, validate_horseshoe, validate_resolution,
};
use approxhom::simplicial::{
    cech_nerve, comonadic, decalage_identity, moore, validate_simplicial_resolution,
    SimplicialObject,
};
use approxhom::suites::{run_suite, SuiteConfig};
use approxhom::{Error, Result};
use serde_json::{json, Value};

use crate::input::{self, CliBackend};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        }
    }

    pub fn code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Inconclusive => 2,
        }
    }

    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

pub struct Outcome {
    pub status: Status,
    pub result: Value,
    pub summary: Vec<(String, String)>,
}

impl Outcome {
    fn new(status: Status, result: Value) -> Self {
        Self {
            status,
            result,
            summary: Vec::new(),
        }
    }

    fn row(mut self, k: impl Into<String>, v: impl ToString) -> Self {
        self.summary.push((k.into(), v.to_string()));
        self
    }
}

/// Options shared by the engine-level commands.
#[derive(Clone, Debug)]
pub struct Params {
    pub max_degree: usize,
    pub seed: u64,
    pub samples: usize,
    pub budget: u64,
    pub object: Option<String>,
    pub ses: Option<String>,
    pub input: Option<PathBuf>,
}

impl Params {
    fn object<B: CliBackend>(&self, b: &B) -> Result<B::Obj> {
        input::object(b, self.object.as_deref(), self.input.as_deref())
    }
}

pub trait Task {
    fn run<B: CliBackend>(&self, e: &Engine<B>) -> Result<Outcome>;
}

pub trait FunctorTask {
    fn run<F: Functor>(&self, f: &F, e: &Engine<F::S>) -> Result<Outcome>
    where
        F::S: CliBackend;
}

fn dims<B: Backend>(b: &B, xs: &[B::Obj]) -> String {
    xs.iter()
        .map(|x| b.dim(x).to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn fp_short(v: &impl serde::Serialize) -> String {
    serde_json::to_string(v).unwrap_or_default()
}

pub struct Resolve(pub Params);

impl Task for Resolve {
    fn run<B: CliBackend>(&self, e: &Engine<B>) -> Result<Outcome> {
        let p = &self.0;
        let x = p.object(&**e)?;
        let r = build_resolution(e, &x, p.max_degree, p.seed)?;
        let d = validate_resolution(&**e, &r);
        Ok(Outcome::new(
            Status::from_bool(d.ok()),
            json!({
                "resolution": r.to_json(&**e),
                "fingerprints": r.complex.fingerprints(&**e),
                "diagnostics": d,
            }),
        )
        .row("object", fp_short(&e.fingerprint(&x)))
        .row("level dims", dims(&**e, r.complex.objects()))
        .row("valid", d.ok()))
    }
}

pub struct Homology(pub Params);

impl Task for Homology {
    fn run<B: CliBackend>(&self, e: &Engine<B>) -> Result<Outcome> {
        let p = &self.0;
        let (c, source) = match (&p.input, &p.object) {
            (Some(path), None) => (input::complex(&**e, path)?, "input"),
            _ => (
                build_resolution(e, &p.object(&**e)?, p.max_degree, p.seed)?.complex,
                "resolution",
            ),
        };
        if let Err(n) = c.validate(&**e) {
            return Ok(
                Outcome::new(Status::Fail, json!({ "source": source, "dd_failure": n }))
                    .row("d∘d", format!("nonzero at {n}")),
            );
        }
        let mut rows = Vec::new();
        let mut ok = true;
        let mut out = Outcome::new(Status::Pass, Value::Null);
        for n in 0..c.truncation() {
            let h = homology(&**e, &c, n)?;
            let valid = check_certificate(&**e, &c, &h);
            ok &= valid;
            let fp = e.fingerprint(&h.homology);
            out = out.row(format!("H{n}"), fp_short(&fp));
            rows.push(json!({
                "degree": n,
                "fingerprint": fp,
                "presentation": e.object_to_json(&h.homology),
                "cycles": e.object_to_json(&h.cycles.object),
                "certificate_valid": valid,
            }));
        }
        out.status = Status::from_bool(ok);
        out.result = json!({ "source": source, "complex": c.to_json(&**e), "homology": rows });
        Ok(out)
    }
}

pub struct Horseshoe(pub Params);

impl Task for Horseshoe {
    fn run<B: CliBackend>(&self, e: &Engine<B>) -> Result<Outcome> {
        let p = &self.0;
        let ses = input::ses(e, p.ses.as_deref(), p.input.as_deref(), p.seed)?;
        let eres = build_resolution(e, &ses.f.cod, p.max_degree, p.seed)?;
        let out = horseshoe(e, &ses, &eres, p.max_degree)?;
        let d = validate_horseshoe(&**e, &out);
        let split = ses.section.is_some();
        let ok = d.ok() && (!split || d.split_compatible);
        Ok(Outcome::new(
            Status::from_bool(ok),
            json!({
                "kernel_resolution": out.c.to_json(&**e),
                "middle_resolution": out.a.to_json(&**e),
                "quotient_resolution": out.e.to_json(&**e),
                "split_input": split,
                "diagnostics": d,
            }),
        )
        .row("kernel dims", dims(&**e, out.c.complex.objects()))
        .row("middle dims", dims(&**e, out.a.complex.objects()))
        .row("quotient dims", dims(&**e, out.e.complex.objects()))
        .row("valid", ok))
    }
}

pub struct Homotopy {
    pub params: Params,
    pub seed2: u64,
}

impl Task for Homotopy {
    fn run<B: CliBackend>(&self, e: &Engine<B>) -> Result<Outcome> {
        let p = &self.params;
        let x = p.object(&**e)?;
        let r0 = build_resolution(e, &x, p.max_degree, p.seed)?;
        let r1 = build_resolution(e, &x, p.max_degree, self.seed2)?;
        let id = e.identity(&x);
        let f = lift_morphism(e, &id, &r0, &r1)?;
        let g = lift_morphism(e, &id, &r1, &r0)?;
        let mut ok = true;
        let mut sides = Vec::new();
        let mut out = Outcome::new(Status::Pass, Value::Null);
        for (name, round, res) in [
            ("g∘f ≃ 1", g.compose(e, &f), &r0),
            ("f∘g ≃ 1", f.compose(e, &g), &r1),
        ] {
            let one = ChainMap::identity(&**e, &res.complex.truncate(round.degree()));
            let h = construct_homotopy(e, &round, &one, res)?;
            let forward = verify_homotopy(e, &h)?;
            let reverse = verify_homotopy(e, &reverse_homotopy(e, &h)?)?;
            let agreement = (0..h.components.len())
                .map(|n| homology_agreement(e, &h, n))
                .collect::<Result<Vec<_>>>()?;
            let side_ok = forward.iter().chain(&reverse).all(|&b| b)
                && agreement.iter().all(|a| a.identity_holds && a.maps_agree);
            ok &= side_ok;
            out = out.row(
                name,
                format!(
                    "{} components, {}",
                    h.components.len(),
                    if side_ok { "verified" } else { "FAILED" }
                ),
            );
            sides.push(json!({
                "relation": name,
                "components": h.components.iter().map(|c| e.morphism_to_json(c)).collect::<Vec<_>>(),
                "equations": forward,
                "reverse_equations": reverse,
                "homology": agreement,
            }));
        }
        out.status = Status::from_bool(ok);
        out.result = json!({ "seeds": [p.seed, self.seed2], "homotopies": sides });
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum MooreSource {
    /// Čech nerve of the canonical projective cover.
    Cech,
    /// Depth-one comonadic resolution.
    Comonadic,
    /// Dold–Kan realisation of the chain resolution (modules only).
    Gamma,
}

pub struct Moore {
    pub params: Params,
    pub source: MooreSource,
}

fn simplicial_source<B: CliBackend>(
    e: &Engine<B>,
    x: &B::Obj,
    src: MooreSource,
    depth: usize,
    seed: u64,
) -> Result<SimplicialObject<B>> {
    match src {
        MooreSource::Cech => Ok(cech_nerve(e, &e.projective_cover(x).epi, depth, None)?.0),
        MooreSource::Comonadic => comonadic(e, x, 1),
        MooreSource::Gamma => {
            let r = build_resolution(e, x, depth, seed)?;
            e.gamma(&r.complex, depth, &r.augmentation).ok_or_else(|| {
                Error::Unsupported("the Dold–Kan source is only available for modules".into())
            })
        }
    }
}

impl Task for Moore {
    fn run<B: CliBackend>(&self, e: &Engine<B>) -> Result<Outcome> {
        let p = &self.params;
        let x = p.object(&**e)?;
        let s = simplicial_source(e, &x, self.source, p.max_degree, p.seed)?;
        let m = moore(&**e, &s)?;
        let rep = validate_simplicial_resolution(e, &s, p.budget)?;
        let dec = decalage_identity(&**e, &s, s.truncation())?;
        let ok = rep.exact() && dec.iter().all(|c| c.ok());
        Ok(Outcome::new(
            Status::from_bool(ok),
            json!({
                "simplicial": s.to_json(&**e),
                "moore": m.complex.to_json(&**e),
                "fingerprints": m.complex.fingerprints(&**e),
                "identities": rep.identities,
                "diagnostics": rep.diagnostics,
                "levels_free": rep.levels_free,
                "moore_projective": rep.moore_projective,
                "promoted": rep.promoted.is_some(),
                "decalage": dec,
            }),
        )
        .row("level dims", dims(&**e, &s.levels))
        .row("moore dims", dims(&**e, m.complex.objects()))
        .row("exact resolution", rep.exact())
        .row("promoted", rep.promoted.is_some()))
    }
}

pub struct Condp(pub Params);

impl Task for Condp {
    fn run<B: CliBackend>(&self, e: &Engine<B>) -> Result<Outcome> {
        let p = &self.0;
        let r = condition_p_probe(e, p.samples, p.seed, p.budget);
        let (status, label) = match &r.verdict {
            ConditionP::HoldsOnSamples { .. } => (Status::Pass, "holds on samples".to_string()),
            ConditionP::Counterexample {
                sample, replayed, ..
            } => (
                Status::Inconclusive,
                format!("counterexample at sample {sample} (replayed: {replayed})"),
            ),
            ConditionP::Inconclusive { reason, .. } => {
                (Status::Inconclusive, format!("inconclusive: {reason}"))
            }
        };
        Ok(
            Outcome::new(status, serde_json::to_value(&r).expect("serializable"))
                .row("condition (P)", label),
        )
    }
}

pub struct Check {
    pub params: Params,
    pub suite: String,
    pub size: usize,
}

impl Task for Check {
    fn run<B: CliBackend>(&self, e: &Engine<B>) -> Result<Outcome> {
        let p = &self.params;
        let cfg = SuiteConfig {
            samples: p.samples,
            seed: p.seed,
            max_degree: p.max_degree,
            size: self.size,
        };
        let r = run_suite(&self.suite, e, &cfg)?;
        let status = if !r.ok() {
            Status::Fail
        } else if r.skipped > 0 {
            Status::Inconclusive
        } else {
            Status::Pass
        };
        Ok(
            Outcome::new(status, serde_json::to_value(&r).expect("serializable"))
                .row("suite", &r.suite)
                .row("checks", r.checks)
                .row("skipped", r.skipped)
                .row("failures", r.failures.len()),
        )
    }
}

pub struct Derive(pub Params);

impl FunctorTask for Derive {
    fn run<F: Functor>(&self, f: &F, e: &Engine<F::S>) -> Result<Outcome>
    where
        F::S: CliBackend,
    {
        let p = &self.0;
        let x = p.object(&**e)?;
        let props = functor_property_report(f, e, p.samples, p.seed);
        let r = derive(f, e, &x, p.max_degree, p.seed, Some(&props))?;
        let replayed = r.replay(f);
        let status = match (replayed, r.exploratory) {
            (false, _) => Status::Fail,
            (true, true) => Status::Inconclusive,
            (true, false) => Status::Pass,
        };
        let mut out = Outcome::new(status, json!({ "properties": props, "derived": r.to_json(&**e, f.target()), "replayed": replayed }))
            .row("functor", f.name())
            .row("exploratory", r.exploratory);
        for (n, v) in r.values.iter().enumerate() {
            out = out.row(format!("L{n}"), fp_short(v));
        }
        Ok(out)
    }
}

pub struct Les(pub Params);

impl FunctorTask for Les {
    fn run<F: Functor>(&self, f: &F, e: &Engine<F::S>) -> Result<Outcome>
    where
        F::S: CliBackend,
    {
        let p = &self.0;
        let ses = input::ses(e, p.ses.as_deref(), p.input.as_deref(), p.seed)?;
        let props = functor_property_report(f, e, p.samples, p.seed);
        let les = long_exact_sequence(f, e, &ses, p.max_degree, &props)?;
        let ok = les.exact()
            && les.tail_exact
            && les.l0_iso.iter().all(|&b| b)
            && les.split_pieces != Some(false);
        let mut out = Outcome::new(
            Status::from_bool(ok),
            json!({ "properties": props, "sequence": les }),
        );
        for n in &les.nodes {
            out = out.row(
                &n.label,
                format!(
                    "{} {}",
                    fp_short(&n.fingerprint),
                    if n.exact && n.composite_zero {
                        "exact"
                    } else {
                        "NOT EXACT"
                    }
                ),
            );
        }
        Ok(out.row("L0 ≅ F", les.l0_iso.iter().all(|&b| b)))
    }
}

pub struct SimplicialCompare(pub Params);

impl FunctorTask for SimplicialCompare {
    fn run<F: Functor>(&self, f: &F, e: &Engine<F::S>) -> Result<Outcome>
    where
        F::S: CliBackend,
    {
        let p = &self.0;
        let x = p.object(&**e)?;
        let props = functor_property_report(f, e, p.samples, p.seed);
        let mut comparisons = Vec::new();
        let mut scoped = Vec::new();
        let r = build_resolution(e, &x, p.max_degree, p.seed)?;
        if let Some(s) = e.gamma(&r.complex, p.max_degree, &r.augmentation) {
            comparisons.push(compare_simplicial(
                f,
                e,
                &x,
                &s,
                "dk-gamma",
                p.max_degree,
                Some(&props),
            )?);
        } else {
            scoped.push("dk-gamma: modules only".to_string());
        }
        match comonadic(e, &x, 1) {
            Ok(s) => comparisons.push(compare_simplicial(
                f,
                e,
                &x,
                &s,
                "comonadic",
                1,
                Some(&props),
            )?),
            Err(err @ (Error::DimensionBlowup { .. } | Error::Unsupported(_))) => {
                scoped.push(format!("comonadic: {err}"))
            }
            Err(err) => return Err(err),
        }
        let agree = comparisons.iter().all(|c| c.agree());
        let status = if !agree {
            Status::Fail
        } else if comparisons.is_empty() || comparisons.iter().any(|c| c.exploratory) {
            Status::Inconclusive
        } else {
            Status::Pass
        };
        let mut out = Outcome::new(
            status,
            json!({ "properties": props, "comparisons": comparisons, "scoped_out": scoped }),
        );
        for c in &comparisons {
            out = out.row(
                &c.source,
                format!(
                    "{} degrees, {}",
                    c.rows.len(),
                    if c.agree() { "agree" } else { "DISAGREE" }
                ),
            );
        }
        for s in &scoped {
            out = out.row("scoped out", s);
        }
        Ok(out)
    }
}

pub struct FunctorProperties(pub Params);

impl FunctorTask for FunctorProperties {
    fn run<F: Functor>(&self, f: &F, e: &Engine<F::S>) -> Result<Outcome>
    where
        F::S: CliBackend,
    {
        let p = &self.0;
        let r = functor_property_report(f, e, p.samples, p.seed);
        let refuted = r.refuted_claims();
        let mut out = Outcome::new(
            Status::from_bool(refuted.is_empty()),
            serde_json::to_value(&r).expect("serializable"),
        )
        .row("functor", f.name());
        for (prop, v) in &r.verdicts {
            let claim = if r.declared.contains(prop) {
                "declared"
            } else {
                ""
            };
            out = out.row(
                prop.to_string(),
                format!(
                    "{} {claim}",
                    serde_json::to_value(v).expect("serializable")["verdict"]
                        .as_str()
                        .unwrap_or("")
                ),
            );
        }
        Ok(out)
    }
}

pub struct Independent(pub Params);

impl FunctorTask for Independent {
    fn run<F: Functor>(&self, f: &F, e: &Engine<F::S>) -> Result<Outcome>
    where
        F::S: CliBackend,
    {
        let p = &self.0;
        let x = p.object(&**e)?;
        let props = functor_property_report(f, e, p.samples, p.seed);
        let seeds = [p.seed, p.seed + 1, p.seed + 2];
        let r = resolution_independence_check(f, e, &x, p.max_degree, &seeds, Some(&props))?;
        let status = match r.verdict {
            Independence::Certified { .. } => Status::Pass,
            Independence::FingerprintEqual { .. } => Status::Inconclusive,
            Independence::Mismatch { .. } => Status::Fail,
        };
        let label = serde_json::to_value(&r.verdict).expect("serializable")["verdict"]
            .as_str()
            .unwrap_or("")
            .to_string();
        Ok(
            Outcome::new(status, serde_json::to_value(&r).expect("serializable"))
                .row("functor", f.name())
                .row("verdict", label),
        )
    }
}
