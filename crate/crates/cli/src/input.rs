//! Object and sequence specifications on the command line.

use std::path::Path;

use approxhom::category::{Backend, Category, ShortExactSequence};
use approxhom::chains::{kernel_of, ChainComplex};
use approxhom::diff::Engine;
use approxhom::functor::{sample_quotient, sample_rng, sample_split_ses};
use approxhom::resolution::syzygy;
use approxhom::simplicial::{dk_gamma, SimplicialObject};
use approxhom::{Error, Lie2Backend, Matrix, ModBackend, Morphism, Result, Ring};
use serde_json::Value;

/// Backends the front end knows how to name objects in.
pub trait CliBackend: Backend {
    /// Backend-specific summand, e.g. `z4` or `heisenberg`.
    fn parse_term(&self, s: &str) -> Result<Self::Obj>;

    /// Dold–Kan realisation, where the backend supports it.
    fn gamma(
        &self,
        _c: &ChainComplex<Self>,
        _depth: usize,
        _aug: &Morphism<Self>,
    ) -> Option<SimplicialObject<Self>> {
        None
    }
}

impl<R: Ring> CliBackend for ModBackend<R> {
    /// `z` is a free summand, `z<d>` cyclic of order `d`, `free:<n>` free of rank `n`, `0` zero.
    fn parse_term(&self, s: &str) -> Result<Self::Obj> {
        if s == "0" {
            return Ok(self.zero_object());
        }
        if let Some(n) = s.strip_prefix("free:") {
            return Ok(self.free_module(count(n)?));
        }
        let Some(d) = s.strip_prefix('z') else {
            return Err(Error::Parse(format!(
                "module term `{s}`: expected z, z<d>, free:<n> or 0"
            )));
        };
        if d.is_empty() {
            return Ok(self.free_module(1));
        }
        let d: i64 = d
            .parse()
            .map_err(|_| Error::Parse(format!("module term `{s}`: bad order")))?;
        Ok(self.cyclic_sum(&[self.ring().from_i64(d)]))
    }

    fn gamma(
        &self,
        c: &ChainComplex<Self>,
        depth: usize,
        aug: &Morphism<Self>,
    ) -> Option<SimplicialObject<Self>> {
        Some(dk_gamma(self, c, depth, Some(aug)))
    }
}

impl<R: Ring> CliBackend for Lie2Backend<R> {
    /// `a<n>` or `v<n>` abelian, `heisenberg`, `free:<n>`, `0`.
    fn parse_term(&self, s: &str) -> Result<Self::Obj> {
        match s {
            "0" => return Ok(self.zero_object()),
            "heisenberg" | "h" => return Ok(self.heisenberg()),
            _ => {}
        }
        if let Some(n) = s.strip_prefix("free:") {
            return Ok(self.free_object(count(n)?));
        }
        if let Some(n) = s
            .strip_prefix("abelian:")
            .or_else(|| s.strip_prefix('a'))
            .or_else(|| s.strip_prefix('v'))
        {
            return Ok(self.abelian(count(n)?));
        }
        Err(Error::Parse(format!(
            "lie2 term `{s}`: expected a<n>, v<n>, abelian:<n>, heisenberg, free:<n> or 0"
        )))
    }
}

fn count(s: &str) -> Result<usize> {
    s.parse()
        .map_err(|_| Error::Parse(format!("`{s}` is not a count")))
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Coproduct of `+`-separated terms.
pub fn parse_object<B: CliBackend>(b: &B, spec: &str) -> Result<B::Obj> {
    let mut terms = spec.split('+').map(str::trim);
    let first = b.parse_term(terms.next().unwrap_or(""))?;
    terms.try_fold(first, |acc, t| {
        Ok(b.coproduct_of(&acc, &b.parse_term(t)?).object)
    })
}

/// `--object` or the presentation in `--input`.
pub fn object<B: CliBackend>(b: &B, spec: Option<&str>, input: Option<&Path>) -> Result<B::Obj> {
    match (spec, input) {
        (Some(s), _) => parse_object(b, s),
        (None, Some(p)) => {
            let v = read_json(p)?;
            b.object_from_json(v.get("object").unwrap_or(&v))
        }
        (None, None) => Err(Error::Parse(
            "an object is required: pass --object or --input".into(),
        )),
    }
}

pub fn complex<B: CliBackend>(b: &B, input: &Path) -> Result<ChainComplex<B>> {
    let v = read_json(input)?;
    ChainComplex::from_json(b, v.get("complex").unwrap_or(&v))
}

fn morphism_from_json<B: Backend>(b: &B, v: &Value) -> Result<Morphism<B>> {
    let field = |k: &str| {
        v.get(k)
            .ok_or_else(|| Error::Parse(format!("morphism needs `{k}`")))
    };
    let dom = b.object_from_json(field("dom")?)?;
    let cod = b.object_from_json(field("cod")?)?;
    let m = Matrix::from_json(b.ring(), field("matrix")?, b.dim(&cod), b.dim(&dom))
        .map_err(Error::Parse)?;
    b.morphism(&dom, &cod, m)
}

/// `syzygy:<X>` for `Ω X → P → X`, `split:<Y>,<Z>` for `Y + Z → Y`,
/// `random` for a seeded quotient, or `{"epi": …}` in `--input`.
pub fn ses<B: CliBackend>(
    e: &Engine<B>,
    spec: Option<&str>,
    input: Option<&Path>,
    seed: u64,
) -> Result<ShortExactSequence<B>> {
    let b = &**e;
    if let Some(s) = spec {
        if let Some(x) = s.strip_prefix("syzygy:") {
            return Ok(syzygy(b, &parse_object(b, x)?).1);
        }
        if let Some(rest) = s.strip_prefix("split:") {
            let (y, z) = rest
                .split_once(',')
                .ok_or_else(|| Error::Parse("split:<Y>,<Z>".into()))?;
            let (y, z) = (parse_object(b, y)?, parse_object(b, z)?);
            let cop = b.coproduct_of(&y, &z);
            let f = b.copair(&cop, &b.identity(&y), &b.zero_morphism(&z, &y));
            let k = kernel_of(b, &f);
            return Ok(ShortExactSequence {
                k: k.inclusion,
                f,
                section: Some(cop.iota1),
            });
        }
        if s == "random" || s == "random-split" {
            let mut rng = sample_rng(seed, 0x5e5, 0);
            return Ok(if s == "random" {
                sample_quotient(b, &mut rng, 2)
            } else {
                sample_split_ses(b, &mut rng, 2)
            });
        }
        return Err(Error::Parse(format!(
            "sequence `{s}`: expected syzygy:<X>, split:<Y>,<Z>, random or random-split"
        )));
    }
    let Some(p) = input else {
        return Err(Error::Parse(
            "a short exact sequence is required: pass --ses or --input".into(),
        ));
    };
    let v = read_json(p)?;
    let f = morphism_from_json(
        b,
        v.get("epi")
            .ok_or_else(|| Error::Parse("input needs an `epi` morphism".into()))?,
    )?;
    if !b.is_regular_epi(&f) {
        return Err(Error::Parse("`epi` is not surjective".into()));
    }
    let section = v
        .get("section")
        .map(|s| morphism_from_json(b, s))
        .transpose()?;
    let k = kernel_of(b, &f);
    Ok(ShortExactSequence {
        k: k.inclusion,
        f,
        section,
    })
}
