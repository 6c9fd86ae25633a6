//! Functors between backends, their action on complexes and simplicial
//! objects, and sample-based probes of their exactness properties.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::backends::lie2::Lie2Backend;
use crate::backends::module::ModBackend;
use crate::category::{Backend, Category, Morphism, Search, ShortExactSequence};
use crate::chains::{ChainComplex, ChainMap};
use crate::diff::Engine;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::resolution::validate_ses;
use crate::ring::Ring;
use crate::simplicial::SimplicialObject;

pub trait Functor: Send + Sync {
    type S: Backend;
    type T: Backend;

    fn name(&self) -> String;
    fn target(&self) -> &Self::T;
    fn object(&self, x: &<Self::S as Backend>::Obj) -> <Self::T as Backend>::Obj;
    fn morphism(&self, f: &Morphism<Self::S>) -> Morphism<Self::T>;

    /// Claimed properties; the report checks them rather than trusting them.
    fn declared(&self) -> Vec<Property> {
        Vec::new()
    }
}

#[derive(Clone, Debug)]
pub struct Identity<B: Backend>(pub B);

impl<B: Backend> Functor for Identity<B> {
    type S = B;
    type T = B;

    fn name(&self) -> String {
        "identity".into()
    }

    fn target(&self) -> &B {
        &self.0
    }

    fn object(&self, x: &B::Obj) -> B::Obj {
        x.clone()
    }

    fn morphism(&self, f: &Morphism<B>) -> Morphism<B> {
        f.clone()
    }

    fn declared(&self) -> Vec<Property> {
        Property::ALL.to_vec()
    }
}

/// `− ⊗ R/t` on modules.
#[derive(Clone, Debug)]
pub struct Tensor<R: Ring> {
    pub backend: ModBackend<R>,
    pub t: R::Elem,
}

impl<R: Ring> Tensor<R> {
    pub fn new(backend: ModBackend<R>, t: R::Elem) -> Self {
        Self { backend, t }
    }

    /// Surviving coordinates and their new torsion.
    fn kept(&self, x: &<ModBackend<R> as Backend>::Obj) -> (Vec<usize>, Vec<R::Elem>) {
        let r = self.backend.ring();
        let mut idx = Vec::new();
        let mut tors = Vec::new();
        for (i, d) in x.torsion().iter().enumerate() {
            let g = r.normalize(&r.gcdex(d, &self.t).g).0;
            if !r.is_unit(&g) {
                idx.push(i);
                tors.push(g);
            }
        }
        (idx, tors)
    }
}

impl<R: Ring> Functor for Tensor<R> {
    type S = ModBackend<R>;
    type T = ModBackend<R>;

    fn name(&self) -> String {
        format!("tensor:{}", self.backend.ring().render(&self.t))
    }

    fn target(&self) -> &ModBackend<R> {
        &self.backend
    }

    fn object(&self, x: &<ModBackend<R> as Backend>::Obj) -> <ModBackend<R> as Backend>::Obj {
        self.backend.cyclic_sum(&self.kept(x).1)
    }

    fn morphism(&self, f: &Morphism<ModBackend<R>>) -> Morphism<ModBackend<R>> {
        let (ci, _) = self.kept(&f.cod);
        let (di, _) = self.kept(&f.dom);
        let m = f.matrix.select_rows(&ci).select_columns(&di);
        self.backend
            .mor(&self.object(&f.dom), &self.object(&f.cod), m)
    }

    fn declared(&self) -> Vec<Property> {
        Property::ALL.to_vec()
    }
}

/// `X ↦ X/[X, X]`, landing in vector spaces.
#[derive(Clone, Debug)]
pub struct Abelianization<R: Ring> {
    pub lie: Lie2Backend<R>,
    pub modules: ModBackend<R>,
}

impl<R: Ring> Abelianization<R> {
    pub fn new(lie: Lie2Backend<R>) -> Self {
        let modules = ModBackend::new(lie.ring().clone());
        Self { lie, modules }
    }
}

impl<R: Ring> Functor for Abelianization<R> {
    type S = Lie2Backend<R>;
    type T = ModBackend<R>;

    fn name(&self) -> String {
        "abelianization".into()
    }

    fn target(&self) -> &ModBackend<R> {
        &self.modules
    }

    fn object(&self, x: &<Lie2Backend<R> as Backend>::Obj) -> <ModBackend<R> as Backend>::Obj {
        self.modules
            .free_module(self.lie.abelian_generators(x).len())
    }

    fn morphism(&self, f: &Morphism<Lie2Backend<R>>) -> Morphism<ModBackend<R>> {
        let cols: Vec<_> = self
            .lie
            .abelian_generators(&f.dom)
            .into_iter()
            .map(|g| self.lie.ab_coords(&f.cod, &f.matrix.column(g)))
            .collect();
        let (d, c) = (self.object(&f.dom), self.object(&f.cod));
        self.modules
            .mor(&d, &c, Matrix::from_columns(self.modules.dim(&c), &cols))
    }

    fn declared(&self) -> Vec<Property> {
        vec![
            Property::Functorial,
            Property::PreservesZero,
            Property::PreservesCoproducts,
            Property::SequentiallyRightExact,
        ]
    }
}

/// Vector spaces as abelian Lie algebras.
#[derive(Clone, Debug)]
pub struct AbelianInclusion<R: Ring> {
    pub modules: ModBackend<R>,
    pub lie: Lie2Backend<R>,
}

impl<R: Ring> AbelianInclusion<R> {
    pub fn new(lie: Lie2Backend<R>) -> Self {
        let modules = ModBackend::new(lie.ring().clone());
        Self { modules, lie }
    }
}

impl<R: Ring> Functor for AbelianInclusion<R> {
    type S = ModBackend<R>;
    type T = Lie2Backend<R>;

    fn name(&self) -> String {
        "abelian-inclusion".into()
    }

    fn target(&self) -> &Lie2Backend<R> {
        &self.lie
    }

    fn object(&self, x: &<ModBackend<R> as Backend>::Obj) -> <Lie2Backend<R> as Backend>::Obj {
        self.lie.abelian(self.modules.dim(x))
    }

    fn morphism(&self, f: &Morphism<ModBackend<R>>) -> Morphism<Lie2Backend<R>> {
        self.lie
            .mor(&self.object(&f.dom), &self.object(&f.cod), f.matrix.clone())
    }

    fn declared(&self) -> Vec<Property> {
        vec![
            Property::Functorial,
            Property::PreservesZero,
            Property::Protoadditive,
            Property::PreservesProper,
        ]
    }
}

pub fn apply_complex<F: Functor>(func: &F, c: &ChainComplex<F::S>) -> ChainComplex<F::T> {
    ChainComplex::new(
        c.objects().iter().map(|x| func.object(x)).collect(),
        c.diffs().iter().map(|d| func.morphism(d)).collect(),
    )
}

pub fn apply_chain_map<F: Functor>(func: &F, f: &ChainMap<F::S>) -> ChainMap<F::T> {
    ChainMap::new(
        apply_complex(func, &f.source),
        apply_complex(func, &f.target),
        f.components.iter().map(|m| func.morphism(m)).collect(),
    )
}

pub fn apply_simplicial<F: Functor>(
    func: &F,
    s: &SimplicialObject<F::S>,
) -> SimplicialObject<F::T> {
    let map_all = |v: &Vec<Vec<Morphism<F::S>>>| {
        v.iter()
            .map(|fs| fs.iter().map(|f| func.morphism(f)).collect())
            .collect()
    };
    SimplicialObject {
        levels: s.levels.iter().map(|x| func.object(x)).collect(),
        faces: map_all(&s.faces),
        degeneracies: map_all(&s.degeneracies),
        augmentation: s.augmentation.as_ref().map(|a| func.morphism(a)),
    }
}

pub fn apply_ses<F: Functor>(func: &F, s: &ShortExactSequence<F::S>) -> ShortExactSequence<F::T> {
    ShortExactSequence {
        k: func.morphism(&s.k),
        f: func.morphism(&s.f),
        section: s.section.as_ref().map(|m| func.morphism(m)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    Functorial,
    PreservesZero,
    PreservesCoproducts,
    Protoadditive,
    Subtractive,
    SequentiallyRightExact,
    PreservesProper,
    PreservesProtosplitMonos,
}

impl Property {
    pub const ALL: [Property; 8] = [
        Property::Functorial,
        Property::PreservesZero,
        Property::PreservesCoproducts,
        Property::Protoadditive,
        Property::Subtractive,
        Property::SequentiallyRightExact,
        Property::PreservesProper,
        Property::PreservesProtosplitMonos,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Property::Functorial => "functorial",
            Property::PreservesZero => "preserves-zero",
            Property::PreservesCoproducts => "preserves-coproducts",
            Property::Protoadditive => "protoadditive",
            Property::Subtractive => "subtractive",
            Property::SequentiallyRightExact => "sequentially-right-exact",
            Property::PreservesProper => "preserves-proper",
            Property::PreservesProtosplitMonos => "preserves-protosplit-monos",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    VerifiedOnSamples { samples: usize },
    Counterexample { witness: Value },
    Untestable { reason: String },
}

impl Verdict {
    pub fn verified(&self) -> bool {
        matches!(self, Verdict::VerifiedOnSamples { .. })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FunctorPropertyReport {
    pub functor: String,
    pub samples: usize,
    pub seed: u64,
    pub declared: Vec<Property>,
    pub verdicts: BTreeMap<Property, Verdict>,
}

impl FunctorPropertyReport {
    pub fn verified(&self, p: Property) -> bool {
        self.verdicts.get(&p).is_some_and(Verdict::verified)
    }

    /// Declared properties the samples refuted.
    pub fn refuted_claims(&self) -> Vec<Property> {
        self.declared
            .iter()
            .copied()
            .filter(|p| matches!(self.verdicts.get(p), Some(Verdict::Counterexample { .. })))
            .collect()
    }

    pub fn all_verified(&self, ps: &[Property]) -> bool {
        ps.iter().all(|&p| self.verified(p))
    }

    /// Either subtractive and proper-preserving, or the protoadditive bundle.
    pub fn derivable(&self) -> bool {
        self.all_verified(&[Property::Subtractive, Property::PreservesProper])
            || self.all_verified(&[
                Property::Protoadditive,
                Property::PreservesCoproducts,
                Property::PreservesProper,
            ])
    }

    pub fn les_ready(&self) -> bool {
        self.all_verified(&[
            Property::SequentiallyRightExact,
            Property::PreservesProtosplitMonos,
            Property::PreservesCoproducts,
        ])
    }
}

/// Per-sample deterministic generator.
pub fn sample_rng(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r.set_word_pos(u128::from(index) << 20);
    r
}

/// Random split short exact sequence `K → Y + Z → Y`, the epi being `⟨1, g⟩`.
pub fn sample_split_ses<B: Backend>(
    b: &B,
    rng: &mut ChaCha8Rng,
    size: usize,
) -> ShortExactSequence<B> {
    let y = b.sample_object(rng, size.max(1));
    let z = b.sample_object(rng, size.max(1));
    let cop = b.coproduct_of(&y, &z);
    let g = if rng.gen_bool(0.3) {
        b.zero_morphism(&z, &y)
    } else {
        b.sample_morphism(rng, &z, &y)
    };
    let f = b.copair(&cop, &b.identity(&y), &g);
    let k = b.kernel(&f);
    ShortExactSequence {
        k: k.inclusion,
        f,
        section: Some(cop.iota1),
    }
}

/// Random quotient `N → X → X/N` by a normal closure.
pub fn sample_quotient<B: Backend>(
    b: &B,
    rng: &mut ChaCha8Rng,
    size: usize,
) -> ShortExactSequence<B> {
    let x = b.sample_object(rng, size.max(1));
    let src = b.sample_object(rng, 2);
    let gens = b.image_vectors(&b.sample_morphism(rng, &src, &x));
    let normal = b.normal_closure(&x, &gens);
    let (q, m) = b.quotient(&x, &normal);
    let f = b.mor(&x, &q, m);
    let k = crate::chains::kernel_of(b, &f);
    ShortExactSequence {
        k: k.inclusion,
        f,
        section: None,
    }
}

fn ses_json<B: Backend>(b: &B, s: &ShortExactSequence<B>) -> Value {
    json!({
        "k": b.morphism_to_json(&s.k),
        "f": b.morphism_to_json(&s.f),
        "section": s.section.as_ref().map(|m| b.morphism_to_json(m)),
    })
}

type Probe<'a> = Box<dyn Fn(&mut ChaCha8Rng) -> std::result::Result<(), Value> + Send + Sync + 'a>;

fn run_probe(samples: usize, seed: u64, stream: u64, probe: &Probe<'_>) -> Verdict {
    let failures: Vec<Option<Value>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, stream, i as u64);
            probe(&mut rng).err()
        })
        .collect();
    match failures.into_iter().flatten().next() {
        Some(w) => Verdict::Counterexample { witness: w },
        None => Verdict::VerifiedOnSamples { samples },
    }
}

/// Object size used when sampling; kept small so `D`-objects stay cheap.
const SAMPLE_SIZE: usize = 3;

pub fn functor_property_report<F: Functor>(
    func: &F,
    source: &Engine<F::S>,
    samples: usize,
    seed: u64,
) -> FunctorPropertyReport {
    let s = &**source;
    let t = func.target();
    let mut verdicts = BTreeMap::new();
    if samples == 0 {
        for p in Property::ALL {
            verdicts.insert(
                p,
                Verdict::Untestable {
                    reason: "no samples requested".into(),
                },
            );
        }
        return FunctorPropertyReport {
            functor: func.name(),
            samples,
            seed,
            declared: func.declared(),
            verdicts,
        };
    }
    let functorial: Probe<'_> = Box::new(|rng| {
        let x = s.sample_object(rng, SAMPLE_SIZE);
        let y = s.sample_object(rng, SAMPLE_SIZE);
        let z = s.sample_object(rng, SAMPLE_SIZE);
        let f = s.sample_morphism(rng, &x, &y);
        let g = s.sample_morphism(rng, &y, &z);
        if func.morphism(&s.identity(&x)) != t.identity(&func.object(&x)) {
            return Err(json!({ "law": "F(1) = 1", "object": s.object_to_json(&x) }));
        }
        if func.morphism(&s.compose(&g, &f)) != t.compose(&func.morphism(&g), &func.morphism(&f)) {
            return Err(
                json!({ "law": "F(gf) = F(g)F(f)", "f": s.morphism_to_json(&f), "g": s.morphism_to_json(&g) }),
            );
        }
        Ok(())
    });
    let zero: Probe<'_> = Box::new(|rng| {
        let x = s.sample_object(rng, SAMPLE_SIZE);
        let y = s.sample_object(rng, SAMPLE_SIZE);
        if t.dim(&func.object(&s.zero_object())) != 0 {
            return Err(json!({ "law": "F(0) = 0" }));
        }
        if !t.is_zero_morphism(&func.morphism(&s.zero_morphism(&x, &y))) {
            return Err(
                json!({ "law": "F(0 map) = 0", "dom": s.object_to_json(&x), "cod": s.object_to_json(&y) }),
            );
        }
        Ok(())
    });
    let coproducts: Probe<'_> = Box::new(|rng| {
        let x = s.sample_object(rng, SAMPLE_SIZE);
        let y = s.sample_object(rng, SAMPLE_SIZE);
        let c = s.coproduct_of(&x, &y);
        let fc = t.coproduct_of(&func.object(&x), &func.object(&y));
        let cmp = t.copair(&fc, &func.morphism(&c.iota1), &func.morphism(&c.iota2));
        if t.is_iso(&cmp) {
            Ok(())
        } else {
            Err(json!({
                "law": "F(X) + F(Y) → F(X + Y) is an isomorphism",
                "x": s.object_to_json(&x),
                "y": s.object_to_json(&y),
                "dim_sum": t.dim(&fc.object),
                "dim_image": t.dim(&cmp.cod),
            }))
        }
    });
    let protoadditive: Probe<'_> = Box::new(|rng| {
        let ses = sample_split_ses(s, rng, SAMPLE_SIZE);
        let image = apply_ses(func, &ses);
        validate_ses(t, &image).map_err(|why| json!({ "law": "split sequences stay split exact", "failure": why, "ses": ses_json(s, &ses) }))
    });
    let subtractive: Probe<'_> = Box::new(|rng| {
        let x = s.sample_object(rng, 2);
        let bundle = match source.difference(&x) {
            Ok(b) => b,
            Err(_) => return Ok(()),
        };
        let ses = ShortExactSequence {
            k: bundle.delta.clone(),
            f: bundle.nabla.clone(),
            section: Some(bundle.iota1().clone()),
        };
        validate_ses(t, &apply_ses(func, &ses))
            .map_err(|why| json!({ "law": "D(X) → X + X → X stays split exact", "failure": why, "object": s.object_to_json(&x) }))
    });
    let right_exact: Probe<'_> = Box::new(|rng| {
        let ses = sample_quotient(s, rng, SAMPLE_SIZE);
        let (fk, ff) = (func.morphism(&ses.k), func.morphism(&ses.f));
        let closure = t.normal_closure(&ff.dom, &t.image_vectors(&fk));
        let holds = t.is_zero_morphism(&t.compose(&ff, &fk))
            && t.is_regular_epi(&ff)
            && t.same_span(&ff.dom, &closure, &t.kernel_vectors(&ff));
        if holds {
            Ok(())
        } else {
            Err(json!({ "law": "F(K) → F(X) → F(Y) → 0 is right exact", "ses": ses_json(s, &ses) }))
        }
    });
    let proper: Probe<'_> = Box::new(|rng| {
        let x = s.sample_object(rng, SAMPLE_SIZE);
        let y = s.sample_object(rng, SAMPLE_SIZE);
        let f = s.sample_morphism(rng, &x, &y);
        if !s.is_proper(&f) || t.is_proper(&func.morphism(&f)) {
            Ok(())
        } else {
            Err(json!({ "law": "proper maps stay proper", "f": s.morphism_to_json(&f) }))
        }
    });
    let protosplit: Probe<'_> = Box::new(|rng| {
        let ses = sample_split_ses(s, rng, SAMPLE_SIZE);
        let fk = func.morphism(&ses.k);
        let q = t.cokernel(&fk);
        let ok = t.is_mono(&fk)
            && t.is_normal_span(&fk.cod, &t.image_vectors(&fk))
            && matches!(t.find_section(&q, 4096), Search::Found(_));
        if ok {
            Ok(())
        } else {
            Err(json!({ "law": "protosplit monos stay protosplit", "ses": ses_json(s, &ses) }))
        }
    });
    let probes: Vec<(Property, Probe<'_>)> = vec![
        (Property::Functorial, functorial),
        (Property::PreservesZero, zero),
        (Property::PreservesCoproducts, coproducts),
        (Property::Protoadditive, protoadditive),
        (Property::Subtractive, subtractive),
        (Property::SequentiallyRightExact, right_exact),
        (Property::PreservesProper, proper),
        (Property::PreservesProtosplitMonos, protosplit),
    ];
    for (i, (p, probe)) in probes.iter().enumerate() {
        verdicts.insert(*p, run_probe(samples, seed, i as u64, probe));
    }
    FunctorPropertyReport {
        functor: func.name(),
        samples,
        seed,
        declared: func.declared(),
        verdicts,
    }
}

/// Parses `identity`, `tensor:<t>`, `abelianization` or `abelian-inclusion` and
/// reports which pairing of backends it needs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FunctorName {
    Identity,
    Tensor(i64),
    Abelianization,
    AbelianInclusion,
}

impl FunctorName {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "identity" | "id" => Ok(Self::Identity),
            "abelianization" | "ab" => Ok(Self::Abelianization),
            "abelian-inclusion" => Ok(Self::AbelianInclusion),
            _ => {
                let Some(t) = s.strip_prefix("tensor:") else {
                    return Err(Error::UnknownFunctor(s.into()));
                };
                let t = t.trim_start_matches(['z', 'Z']);
                t.parse()
                    .map(Self::Tensor)
                    .map_err(|_| Error::UnknownFunctor(s.into()))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::ResidueRing;

    #[test]
    fn tensor_drops_unit_summands() {
        let b = ModBackend::new(ResidueRing::new(6).unwrap());
        let t = Tensor::new(b.clone(), 2);
        let x = b.cyclic_sum_i64(&[0, 3, 2]);
        assert_eq!(t.object(&x).torsion(), &[2, 2]);
    }

    #[test]
    fn builtin_verdicts() {
        let e = Engine::new(ModBackend::new(ResidueRing::new(4).unwrap()));
        let id = functor_property_report(&Identity(e.backend().clone()), &e, 30, 1);
        assert!(id.verdicts.values().all(Verdict::verified), "{id:?}");
        let t = functor_property_report(&Tensor::new(e.backend().clone(), 2), &e, 30, 1);
        for p in [
            Property::Functorial,
            Property::Subtractive,
            Property::SequentiallyRightExact,
            Property::PreservesCoproducts,
        ] {
            assert!(t.verified(p), "{p}: {:?}", t.verdicts[&p]);
        }

        let lie = Engine::new(Lie2Backend::new(ResidueRing::prime_field(3).unwrap()).unwrap());
        let ab = functor_property_report(&Abelianization::new(lie.backend().clone()), &lie, 30, 1);
        assert!(ab.verified(Property::Functorial));
        assert!(matches!(
            ab.verdicts[&Property::Protoadditive],
            Verdict::Counterexample { .. }
        ));

        let vs = Engine::new(ModBackend::new(ResidueRing::prime_field(3).unwrap()));
        let inc =
            functor_property_report(&AbelianInclusion::new(lie.backend().clone()), &vs, 30, 1);
        assert!(inc.verified(Property::Protoadditive));
        assert!(inc.refuted_claims().is_empty());
        assert_eq!(ab.refuted_claims(), Vec::<Property>::new());
        assert!(matches!(
            inc.verdicts[&Property::PreservesCoproducts],
            Verdict::Counterexample { .. }
        ));
    }

    #[test]
    fn functor_names() {
        assert_eq!(
            FunctorName::parse("tensor:z2").unwrap(),
            FunctorName::Tensor(2)
        );
        assert_eq!(
            FunctorName::parse("tensor:3").unwrap(),
            FunctorName::Tensor(3)
        );
        assert!(FunctorName::parse("hom").is_err());
    }
}
