//! Left derived functors `L_n(F)(X) = H_n(F(C(X)))`, long exact sequences,
//! syzygy shifts, Condition (P) probes and the simplicial comparison.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::backends::module::ModBackend;
use crate::category::{Backend, Category, Fingerprint, Morphism, Search, ShortExactSequence};
use crate::chains::{
    homology, induced_homology_map, properness_and_exactness, ChainComplex, ChainMap,
    HomologyCertificate,
};
use crate::diff::Engine;
use crate::error::{Error, Result};
use crate::functor::{
    apply_chain_map, apply_complex, apply_simplicial, sample_rng, Functor, FunctorPropertyReport,
    Property,
};
use crate::homotopy::{construct_homotopy, verify_homotopy};
use crate::resolution::{
    build_resolution, horseshoe, lift_morphism, syzygy, validate_ses, ProjectiveResolution,
};
use crate::ring::Ring;
use crate::simplicial::{comonadic, dk_gamma, moore};

#[derive(Clone, Debug)]
pub struct DerivedResult<S: Backend, T: Backend> {
    pub functor: String,
    pub object: S::Obj,
    pub resolution: ProjectiveResolution<S>,
    /// `F` applied to the resolution.
    pub image: ChainComplex<T>,
    pub certificates: Vec<HomologyCertificate<T>>,
    pub values: Vec<Fingerprint>,
    /// Whether `F(d_{n+1})` is proper, per computed degree.
    pub proper: Vec<bool>,
    /// Set when the hypotheses behind `L_n(F)` were not verified.
    pub exploratory: bool,
}

impl<S: Backend, T: Backend> DerivedResult<S, T> {
    pub fn value(&self, n: usize) -> &T::Obj {
        &self.certificates[n].homology
    }

    /// Recomputes the values from the stored resolution.
    pub fn replay<F: Functor<S = S, T = T>>(&self, func: &F) -> bool {
        let t = func.target();
        let image = apply_complex(func, &self.resolution.complex);
        image == self.image
            && (0..self.values.len()).all(|n| {
                homology(t, &image, n).is_ok_and(|h| {
                    h.homology == self.certificates[n].homology
                        && t.fingerprint(&h.homology) == self.values[n]
                })
            })
    }

    pub fn to_json(&self, s: &S, t: &T) -> Value {
        json!({
            "functor": self.functor,
            "object": s.object_to_json(&self.object),
            "exploratory": self.exploratory,
            "values": self.values.iter().enumerate().map(|(n, fp)| json!({
                "degree": n,
                "fingerprint": fp,
                "presentation": t.object_to_json(&self.certificates[n].homology),
                "proper": self.proper[n],
            })).collect::<Vec<_>>(),
            "resolution": self.resolution.to_json(s),
            "image": self.image.to_json(t),
        })
    }
}

fn exploratory(report: Option<&FunctorPropertyReport>) -> bool {
    report.map_or(true, |r| !r.derivable())
}

/// `L_n(F)(X)` for `n < maxdeg`.
pub fn derive<F: Functor>(
    func: &F,
    e: &Engine<F::S>,
    x: &<F::S as Backend>::Obj,
    maxdeg: usize,
    seed: u64,
    report: Option<&FunctorPropertyReport>,
) -> Result<DerivedResult<F::S, F::T>> {
    let resolution = build_resolution(e, x, maxdeg, seed)?;
    derive_from(func, resolution, report)
}

/// Same as [`derive`] on a resolution built elsewhere.
pub fn derive_from<F: Functor>(
    func: &F,
    resolution: ProjectiveResolution<F::S>,
    report: Option<&FunctorPropertyReport>,
) -> Result<DerivedResult<F::S, F::T>> {
    let t = func.target();
    let image = apply_complex(func, &resolution.complex);
    let flags = properness_and_exactness(t, &image);
    let certificates = (0..image.truncation())
        .map(|n| homology(t, &image, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(DerivedResult {
        functor: func.name(),
        object: resolution.resolved.clone(),
        values: certificates
            .iter()
            .map(|c| t.fingerprint(&c.homology))
            .collect(),
        proper: flags.iter().map(|f| f.proper).collect(),
        image,
        certificates,
        resolution,
        exploratory: exploratory(report),
    })
}

/// `L_n(F)(f)` for `n < maxdeg`, through a lifting between canonical resolutions.
pub fn derive_morphism<F: Functor>(
    func: &F,
    e: &Engine<F::S>,
    f: &Morphism<F::S>,
    maxdeg: usize,
) -> Result<Vec<Morphism<F::T>>> {
    let rx = build_resolution(e, &f.dom, maxdeg, 0)?;
    let ry = build_resolution(e, &f.cod, maxdeg, 0)?;
    let lift = apply_chain_map(func, &lift_morphism(e, f, &rx, &ry)?);
    let t = func.target();
    (0..maxdeg.min(lift.degree()))
        .map(|n| {
            induced_homology_map(
                t,
                &lift,
                &homology(t, &lift.source, n)?,
                &homology(t, &lift.target, n)?,
            )
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Independence {
    /// Values agree and the comparison maps are mutually inverse, with the
    /// underlying liftings related by verified homotopies.
    Certified {
        degrees: usize,
    },
    FingerprintEqual {
        reason: String,
    },
    Mismatch {
        seed: u64,
        degree: usize,
        detail: String,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct IndependenceReport {
    pub functor: String,
    pub seeds: Vec<u64>,
    pub values: Vec<Vec<Fingerprint>>,
    pub exploratory: bool,
    pub verdict: Independence,
}

/// Comparison of `L_n(F)(X)` across seeded resolutions.
pub fn resolution_independence_check<F: Functor>(
    func: &F,
    e: &Engine<F::S>,
    x: &<F::S as Backend>::Obj,
    maxdeg: usize,
    seeds: &[u64],
    report: Option<&FunctorPropertyReport>,
) -> Result<IndependenceReport> {
    if seeds.len() < 2 {
        return Err(Error::Unsupported(
            "resolution independence needs at least two seeds".into(),
        ));
    }
    let results = seeds
        .iter()
        .map(|&s| derive(func, e, x, maxdeg, s, report))
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<Vec<Fingerprint>> = results.iter().map(|r| r.values.clone()).collect();
    let done = |verdict| IndependenceReport {
        functor: func.name(),
        seeds: seeds.to_vec(),
        values: values.clone(),
        exploratory: exploratory(report),
        verdict,
    };
    for (i, v) in values.iter().enumerate().skip(1) {
        if let Some(n) = (0..maxdeg).find(|&n| v[n] != values[0][n]) {
            return Ok(done(Independence::Mismatch {
                seed: seeds[i],
                degree: n,
                detail: "fingerprints differ".into(),
            }));
        }
    }
    let t = func.target();
    let base = &results[0];
    for (i, other) in results.iter().enumerate().skip(1) {
        let certified = (|| -> Result<Option<(usize, String)>> {
            let id = e.identity(x);
            let f = lift_morphism(e, &id, &base.resolution, &other.resolution)?;
            let g = lift_morphism(e, &id, &other.resolution, &base.resolution)?;
            for (round, res) in [
                (g.compose(e, &f), &base.resolution),
                (f.compose(e, &g), &other.resolution),
            ] {
                let one = ChainMap::identity(&**e, &res.complex.truncate(round.degree()));
                let h = construct_homotopy(e, &round, &one, res)?;
                if !verify_homotopy(e, &h)?.iter().all(|&ok| ok) {
                    return Err(Error::VanishingCheckFailed {
                        degree: 0,
                        detail: "homotopy fails verification".into(),
                    });
                }
            }
            let (ff, fg) = (apply_chain_map(func, &f), apply_chain_map(func, &g));
            for n in 0..maxdeg {
                let (hb, ho) = (&base.certificates[n], &other.certificates[n]);
                let there = induced_homology_map(t, &ff, hb, ho)?;
                let back = induced_homology_map(t, &fg, ho, hb)?;
                if t.compose(&back, &there) != t.identity(&hb.homology)
                    || t.compose(&there, &back) != t.identity(&ho.homology)
                {
                    return Ok(Some((n, "induced maps are not mutually inverse".into())));
                }
            }
            Ok(None)
        })();
        match certified {
            Ok(None) => {}
            Ok(Some((n, detail))) => {
                return Ok(done(Independence::Mismatch {
                    seed: seeds[i],
                    degree: n,
                    detail,
                }))
            }
            Err(err) => {
                return Ok(done(Independence::FingerprintEqual {
                    reason: err.to_string(),
                }))
            }
        }
    }
    Ok(done(Independence::Certified { degrees: maxdeg }))
}

#[derive(Clone, Debug, Serialize)]
pub struct LesNode {
    /// `L_n(K)`, `L_n(X)` or `L_n(Y)`.
    pub label: String,
    pub fingerprint: Fingerprint,
    pub composite_zero: bool,
    pub exact: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LongExactReport {
    pub functor: String,
    pub max_degree: usize,
    pub ses: Value,
    pub nodes: Vec<LesNode>,
    /// Matrix of the map leaving each node, in node order.
    pub maps: Vec<Value>,
    /// `L_0 ≅ F` on `K`, `X`, `Y`.
    pub l0_iso: [bool; 3],
    /// `F(K) → F(X) → F(Y) → 0` is exact.
    pub tail_exact: bool,
    /// Per `n ≥ 1`, whether `δ_n` vanishes.
    pub connecting_zero: Vec<bool>,
    /// For split input: `δ = 0` and every `L_n(K) → L_n(X) → L_n(Y)` is split short exact.
    pub split_pieces: Option<bool>,
}

impl LongExactReport {
    pub fn exact(&self) -> bool {
        self.nodes.iter().all(|n| n.composite_zero && n.exact)
    }
}

fn missing(report: &FunctorPropertyReport, ps: &[Property]) -> Vec<String> {
    ps.iter()
        .filter(|&&p| !report.verified(p))
        .map(|p| p.to_string())
        .collect()
}

/// The long exact sequence of `L_*(F)` on `ses`, from `L_maxdeg(K)` down to `L_0(Y) → 0`.
pub fn long_exact_sequence<F: Functor>(
    func: &F,
    e: &Engine<F::S>,
    ses: &ShortExactSequence<F::S>,
    maxdeg: usize,
    report: &FunctorPropertyReport,
) -> Result<LongExactReport> {
    let need = [
        Property::SequentiallyRightExact,
        Property::PreservesProtosplitMonos,
        Property::PreservesCoproducts,
    ];
    let gaps = missing(report, &need);
    if !gaps.is_empty() {
        return Err(Error::HypothesisUnverified(format!(
            "{} not verified for {}",
            gaps.join(", "),
            func.name()
        )));
    }
    let s = &**e;
    let t = func.target();
    let top = maxdeg + 1;
    let eres = build_resolution(e, &ses.f.cod, top + 1, 0)?;
    let hs = horseshoe(e, ses, &eres, top + 1)?;
    let (fc, fa, fe) = (
        apply_complex(func, &hs.c.complex),
        apply_complex(func, &hs.a.complex),
        apply_complex(func, &hs.e.complex),
    );
    let falpha = ChainMap::new(
        fc.clone(),
        fa.clone(),
        hs.alpha.iter().map(|m| func.morphism(m)).collect(),
    );
    let fbeta = ChainMap::new(
        fa.clone(),
        fe.clone(),
        hs.beta.iter().map(|m| func.morphism(m)).collect(),
    );
    let hom = |c: &ChainComplex<F::T>| {
        (0..=top)
            .map(|n| homology(t, c, n))
            .collect::<Result<Vec<_>>>()
    };
    let (hk, hx, hy) = (hom(&fc)?, hom(&fa)?, hom(&fe)?);
    let a: Vec<_> = (0..=maxdeg)
        .map(|n| induced_homology_map(t, &falpha, &hk[n], &hx[n]))
        .collect::<Result<_>>()?;
    let b: Vec<_> = (0..=maxdeg)
        .map(|n| induced_homology_map(t, &fbeta, &hx[n], &hy[n]))
        .collect::<Result<_>>()?;
    // δ_n by the snake: lift a cycle of F(E) along F(i_n), apply d^A, pull back along F(α).
    let delta = |n: usize| -> Result<Morphism<F::T>> {
        let m = t.compose_all(&[
            &fa.d(t, n),
            &func.morphism(&hs.sections[n]),
            &hy[n].cycles.inclusion,
        ]);
        let c = t.factor_through_mono(&m, &falpha.components[n - 1])?;
        let z = t.factor_through_mono(&c, &hk[n - 1].cycles.inclusion)?;
        t.factor_through_epi(&t.compose(&hk[n - 1].projection, &z), &hy[n].projection)
    };
    let deltas: Vec<_> = (1..=top).map(delta).collect::<Result<_>>()?;

    let mut objs = Vec::new();
    let mut labels = Vec::new();
    let mut maps = Vec::new();
    for n in (0..=maxdeg).rev() {
        objs.extend([
            hk[n].homology.clone(),
            hx[n].homology.clone(),
            hy[n].homology.clone(),
        ]);
        labels.extend([format!("L{n}(K)"), format!("L{n}(X)"), format!("L{n}(Y)")]);
        maps.extend([a[n].clone(), b[n].clone()]);
        maps.push(if n > 0 {
            deltas[n - 1].clone()
        } else {
            t.zero_morphism(&hy[0].homology, &t.zero_object())
        });
    }
    let mut nodes = Vec::new();
    for (j, obj) in objs.iter().enumerate() {
        let incoming = if j == 0 {
            &deltas[top - 1]
        } else {
            &maps[j - 1]
        };
        let outgoing = &maps[j];
        nodes.push(LesNode {
            label: labels[j].clone(),
            fingerprint: t.fingerprint(obj),
            composite_zero: t.is_zero_morphism(&t.compose(outgoing, incoming)),
            exact: t.same_span(obj, &t.image_vectors(incoming), &t.kernel_vectors(outgoing)),
        });
    }

    let l0 = |res: &ProjectiveResolution<F::S>, h: &HomologyCertificate<F::T>| -> bool {
        let faug = func.morphism(&res.augmentation);
        t.factor_through_epi(&t.compose(&faug, &h.cycles.inclusion), &h.projection)
            .is_ok_and(|m| t.is_iso(&m))
    };
    let l0_iso = [l0(&hs.c, &hk[0]), l0(&hs.a, &hx[0]), l0(&hs.e, &hy[0])];
    let (fk, ff) = (func.morphism(&ses.k), func.morphism(&ses.f));
    let tail_exact = t.is_zero_morphism(&t.compose(&ff, &fk))
        && t.is_regular_epi(&ff)
        && t.same_span(&ff.dom, &t.image_vectors(&fk), &t.kernel_vectors(&ff));
    let connecting_zero: Vec<bool> = deltas
        .iter()
        .take(maxdeg)
        .map(|d| t.is_zero_morphism(d))
        .collect();
    let split_pieces = ses.section.as_ref().map(|_| {
        connecting_zero.iter().all(|&z| z)
            && (0..=maxdeg).all(|n| {
                let piece = ShortExactSequence {
                    k: a[n].clone(),
                    f: b[n].clone(),
                    section: None,
                };
                validate_ses(t, &piece).is_ok()
                    && matches!(t.find_section(&b[n], e.budget), Search::Found(_))
            })
    });
    Ok(LongExactReport {
        functor: func.name(),
        max_degree: maxdeg,
        ses: json!({
            "k": s.morphism_to_json(&ses.k),
            "f": s.morphism_to_json(&ses.f),
        }),
        nodes,
        maps: maps.iter().map(|m| t.morphism_to_json(m)).collect(),
        l0_iso,
        tail_exact,
        connecting_zero,
        split_pieces,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SyzygyCheck {
    pub degree: usize,
    /// `L_{n+1}(F)(X)`.
    pub shifted: Fingerprint,
    /// `L_n(F)(Ω X)`.
    pub syzygy: Fingerprint,
    pub equal: bool,
}

/// `L_{n+1}(F)(X)` against `L_n(F)(Ω X)` for `1 ≤ n ≤ maxdeg − 2`.
pub fn syzygy_shift_check<F: Functor>(
    func: &F,
    e: &Engine<F::S>,
    x: &<F::S as Backend>::Obj,
    maxdeg: usize,
    report: &FunctorPropertyReport,
) -> Result<Vec<SyzygyCheck>> {
    let gaps = missing(
        report,
        &[
            Property::SequentiallyRightExact,
            Property::PreservesProtosplitMonos,
            Property::PreservesCoproducts,
        ],
    );
    if !gaps.is_empty() {
        return Err(Error::HypothesisUnverified(format!(
            "{} not verified for {}",
            gaps.join(", "),
            func.name()
        )));
    }
    let (omega, _) = syzygy(&**e, x);
    let lx = derive(func, e, x, maxdeg, 0, Some(report))?;
    let lo = derive(func, e, &omega, maxdeg, 0, Some(report))?;
    Ok((1..maxdeg.saturating_sub(1))
        .map(|n| SyzygyCheck {
            degree: n,
            shifted: lx.values[n + 1].clone(),
            syzygy: lo.values[n].clone(),
            equal: lx.values[n + 1] == lo.values[n],
        })
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct VanishingCheck {
    pub resolution_length: usize,
    /// Degrees `n ≥ 2` with `L_n(F)(X) ≠ 0`.
    pub nonzero: Vec<usize>,
}

impl VanishingCheck {
    pub fn holds(&self) -> bool {
        self.nonzero.is_empty()
    }
}

/// `L_n(F)(X) = 0` for `2 ≤ n < maxdeg`.
pub fn higher_vanishing<F: Functor>(
    func: &F,
    e: &Engine<F::S>,
    x: &<F::S as Backend>::Obj,
    maxdeg: usize,
) -> Result<VanishingCheck> {
    let r = derive(func, e, x, maxdeg, 0, None)?;
    let resolution_length = r
        .resolution
        .complex
        .objects()
        .iter()
        .rposition(|o| e.dim(o) > 0)
        .unwrap_or(0);
    let nonzero = (2..maxdeg).filter(|&n| !r.values[n].is_zero()).collect();
    Ok(VanishingCheck {
        resolution_length,
        nonzero,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ConditionP {
    HoldsOnSamples {
        samples: usize,
    },
    Counterexample {
        sample: usize,
        witness: Value,
        explored: u64,
        replayed: bool,
    },
    Inconclusive {
        reason: String,
        unknown: usize,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionPReport {
    pub samples: usize,
    pub seed: u64,
    pub budget: u64,
    pub verdict: ConditionP,
}

/// Free objects above this dimension are not used as the middle term.
const PROBE_DIM: usize = 4;

enum Outcome {
    Projective,
    Counterexample(Value, u64),
    Unknown,
}

/// Split epis `F(n) → F(m)` with random extra generator images; the kernel
/// must be projective for Condition (P) to hold.
pub fn condition_p_probe<B: Backend>(
    e: &Engine<B>,
    samples: usize,
    seed: u64,
    budget: u64,
) -> ConditionPReport {
    let b = &**e;
    let done = |verdict| ConditionPReport {
        samples,
        seed,
        budget,
        verdict,
    };
    if budget == 0 {
        return done(ConditionP::Inconclusive {
            reason: "search budget is zero".into(),
            unknown: samples,
        });
    }
    let build = |i: usize| {
        let mut rng = sample_rng(seed, 0xc0de, i as u64);
        let mut n = rng.gen_range(1..=3);
        while n > 1 && b.dim(&b.free_object(n)) > PROBE_DIM {
            n -= 1;
        }
        let m = rng.gen_range(1..=n);
        let (fnn, fm) = (b.free_object(n), b.free_object(m));
        let gm = b.generators(&fm);
        let mut images = gm.clone();
        let one = b.free_object(1);
        for _ in m..n {
            images.push(b.sample_morphism(&mut rng, &one, &fm).matrix.column(0));
        }
        let epi = b.free_extend(n, &fm, &images);
        let section = b.free_extend(m, &fnn, &b.generators(&fnn)[..m]);
        let k = crate::chains::kernel_of(b, &epi);
        (
            ShortExactSequence {
                k: k.inclusion,
                f: epi,
                section: Some(section),
            },
            k.object,
        )
    };
    let outcomes: Vec<Outcome> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let (ses, kernel) = build(i);
            match b.projectivity_witness(&kernel, budget).1 {
                Search::Found(()) => Outcome::Projective,
                Search::None { explored } => Outcome::Counterexample(
                    json!({
                        "split_epi": b.morphism_to_json(&ses.f),
                        "section": ses.section.as_ref().map(|m| b.morphism_to_json(m)),
                        "kernel": b.object_to_json(&kernel),
                        "kernel_inclusion": b.morphism_to_json(&ses.k),
                        "kernel_fingerprint": b.fingerprint(&kernel),
                    }),
                    explored,
                ),
                Search::Unknown { .. } => Outcome::Unknown,
            }
        })
        .collect();
    let unknown = outcomes
        .iter()
        .filter(|o| matches!(o, Outcome::Unknown))
        .count();
    if let Some((i, (witness, explored))) =
        outcomes.into_iter().enumerate().find_map(|(i, o)| match o {
            Outcome::Counterexample(w, x) => Some((i, (w, x))),
            _ => None,
        })
    {
        let (ses, kernel) = build(i);
        let replayed = validate_ses(b, &ses).is_ok()
            && b.free_rank(&ses.f.dom).is_some()
            && matches!(b.projectivity_witness(&kernel, budget).1, Search::None { explored: x } if x == explored);
        return done(ConditionP::Counterexample {
            sample: i,
            witness,
            explored,
            replayed,
        });
    }
    if unknown > 0 {
        return done(ConditionP::Inconclusive {
            reason: "section search hit the budget".into(),
            unknown,
        });
    }
    done(ConditionP::HoldsOnSamples { samples })
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonRow {
    pub degree: usize,
    /// `H_n(N(F(S)))`.
    pub moore_of_image: Fingerprint,
    /// `H_n(F(N(S)))`.
    pub image_of_moore: Fingerprint,
    /// `H_n(F(C(X)))`.
    pub chain: Fingerprint,
    pub agree: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SimplicialComparison {
    pub functor: String,
    pub source: String,
    pub rows: Vec<ComparisonRow>,
    /// Set when `F` was not verified protoadditive.
    pub exploratory: bool,
}

impl SimplicialComparison {
    pub fn agree(&self) -> bool {
        self.rows.iter().all(|r| r.agree)
    }
}

fn compare_rows<F: Functor>(
    func: &F,
    e: &Engine<F::S>,
    x: &<F::S as Backend>::Obj,
    s: &crate::simplicial::SimplicialObject<F::S>,
    degrees: usize,
) -> Result<Vec<ComparisonRow>> {
    let t = func.target();
    let nfs = moore(t, &apply_simplicial(func, s))?.complex;
    let fns = apply_complex(func, &moore(&**e, s)?.complex);
    let chain = derive(func, e, x, degrees.max(1), 0, None)?;
    (0..degrees)
        .map(|n| {
            let a = t.fingerprint(&homology(t, &nfs, n)?.homology);
            let b = t.fingerprint(&homology(t, &fns, n)?.homology);
            let c = chain.values[n].clone();
            Ok(ComparisonRow {
                degree: n,
                agree: a == b && b == c,
                moore_of_image: a,
                image_of_moore: b,
                chain: c,
            })
        })
        .collect()
}

/// The three homologies on a given simplicial resolution `s` of `x`, for `n < degrees`.
pub fn compare_simplicial<F: Functor>(
    func: &F,
    e: &Engine<F::S>,
    x: &<F::S as Backend>::Obj,
    s: &crate::simplicial::SimplicialObject<F::S>,
    source: &str,
    degrees: usize,
    report: Option<&FunctorPropertyReport>,
) -> Result<SimplicialComparison> {
    Ok(SimplicialComparison {
        functor: func.name(),
        source: source.into(),
        rows: compare_rows(func, e, x, s, degrees)?,
        exploratory: !report.is_some_and(|r| r.verified(Property::Protoadditive)),
    })
}

/// The three homologies on the Dold–Kan simplicial resolution `Γ(C(X))`, for `n < maxdeg`.
pub fn simplicial_vs_chain<R: Ring, F: Functor<S = ModBackend<R>>>(
    func: &F,
    e: &Engine<ModBackend<R>>,
    x: &<ModBackend<R> as Backend>::Obj,
    maxdeg: usize,
    report: Option<&FunctorPropertyReport>,
) -> Result<SimplicialComparison> {
    let res = build_resolution(e, x, maxdeg, 0)?;
    let s = dk_gamma(e, &res.complex, maxdeg, Some(&res.augmentation));
    compare_simplicial(func, e, x, &s, "dk-gamma", maxdeg, report)
}

/// `H_0` comparison on the depth-one comonadic resolution.
pub fn comonadic_h0<F: Functor>(
    func: &F,
    e: &Engine<F::S>,
    x: &<F::S as Backend>::Obj,
    report: Option<&FunctorPropertyReport>,
) -> Result<SimplicialComparison> {
    compare_simplicial(func, e, x, &comonadic(e, x, 1)?, "comonadic", 1, report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::lie2::Lie2Backend;
    use crate::functor::{functor_property_report, Abelianization, Identity, Tensor};
    use crate::ring::{Integers, ResidueRing};

    fn z4() -> Engine<ModBackend<ResidueRing>> {
        Engine::new(ModBackend::new(ResidueRing::new(4).unwrap()))
    }

    fn two() -> Fingerprint {
        Fingerprint::Module {
            invariant_factors: vec!["2".into()],
        }
    }

    #[test]
    fn tor_over_z4() {
        let e = z4();
        let f = Tensor::new(e.backend().clone(), 2);
        let r = derive(&f, &e, &e.cyclic_sum_i64(&[2]), 5, 0, None).unwrap();
        assert_eq!(r.values, vec![two(); 5]);
        assert!(r.replay(&f));
    }

    #[test]
    fn projectives_have_no_higher_values() {
        let e = z4();
        let f = Tensor::new(e.backend().clone(), 2);
        let r = derive(&f, &e, &e.free_module(2), 3, 0, None).unwrap();
        assert_eq!(r.values[0], e.fingerprint(&f.object(&e.free_module(2))));
        assert!(r.values[1..].iter().all(Fingerprint::is_zero));
    }

    #[test]
    fn lie_identity_on_v2() {
        let e = Engine::new(Lie2Backend::new(ResidueRing::prime_field(3).unwrap()).unwrap());
        let v2 = e.abelian(2);
        let r = derive(&Identity(e.backend().clone()), &e, &v2, 3, 0, None).unwrap();
        assert_eq!(r.values[0], e.fingerprint(&v2));
        assert!(r.values[1].is_zero() && r.values[2].is_zero());
        let ind = resolution_independence_check(
            &Identity(e.backend().clone()),
            &e,
            &v2,
            2,
            &[0, 1, 2],
            None,
        )
        .unwrap();
        assert!(
            !matches!(ind.verdict, Independence::Mismatch { .. }),
            "{:?}",
            ind.verdict
        );
    }

    #[test]
    fn tor_sequence() {
        let e = z4();
        let f = Tensor::new(e.backend().clone(), 2);
        let rep = functor_property_report(&f, &e, 20, 3);
        let z2 = e.cyclic_sum_i64(&[2]);
        let z4m = e.free_module(1);
        let k = e.mor(&z2, &z4m, crate::Matrix::from_rows(1, &[vec![2]]));
        let q = e.mor(&z4m, &z2, crate::Matrix::from_rows(1, &[vec![1]]));
        let ses = ShortExactSequence {
            k,
            f: q,
            section: None,
        };
        let les = long_exact_sequence(&f, &e, &ses, 3, &rep).unwrap();
        assert!(les.exact() && les.tail_exact && les.l0_iso.iter().all(|&b| b));
        let fps: Vec<bool> = les.nodes.iter().map(|n| n.fingerprint.is_zero()).collect();
        // L_n(Z/4) vanishes above degree zero.
        assert_eq!(
            fps,
            [false, true, false, false, true, false, false, true, false, false, false, false]
        );
        assert!(les.connecting_zero.iter().all(|&z| !z));
    }

    #[test]
    fn split_sequence_has_zero_connecting_maps() {
        let e = z4();
        let f = Tensor::new(e.backend().clone(), 2);
        let rep = functor_property_report(&f, &e, 20, 3);
        let mut rng = sample_rng(5, 0, 0);
        let ses = crate::functor::sample_split_ses(&*e, &mut rng, 2);
        let les = long_exact_sequence(&f, &e, &ses, 2, &rep).unwrap();
        assert!(les.exact());
        assert_eq!(les.split_pieces, Some(true));
    }

    #[test]
    fn gating_refuses_unverified_functors() {
        let e = Engine::new(Lie2Backend::new(ResidueRing::prime_field(3).unwrap()).unwrap());
        let ab = Abelianization::new(e.backend().clone());
        let mut rep = functor_property_report(&ab, &e, 10, 1);
        rep.verdicts.insert(
            Property::SequentiallyRightExact,
            crate::functor::Verdict::Untestable {
                reason: "forced".into(),
            },
        );
        let v2 = e.abelian(2);
        let (_, ses) = syzygy(&*e, &v2);
        assert!(matches!(
            long_exact_sequence(&ab, &e, &ses, 1, &rep),
            Err(Error::HypothesisUnverified(_))
        ));
    }

    #[test]
    fn syzygy_and_integers() {
        let e = z4();
        let f = Tensor::new(e.backend().clone(), 2);
        let rep = functor_property_report(&f, &e, 20, 3);
        let checks = syzygy_shift_check(&f, &e, &e.cyclic_sum_i64(&[2, 0]), 4, &rep).unwrap();
        assert_eq!(checks.len(), 2);
        assert!(checks.iter().all(|c| c.equal));

        let ez = Engine::new(ModBackend::new(Integers));
        let t = Tensor::new(ez.backend().clone(), 6.into());
        let v = higher_vanishing(&t, &ez, &ez.cyclic_sum_i64(&[4, 9]), 4).unwrap();
        assert!(v.holds() && v.resolution_length <= 1);
    }

    #[test]
    fn condition_p() {
        let r = condition_p_probe(&z4(), 40, 1, 10_000);
        assert_eq!(r.verdict, ConditionP::HoldsOnSamples { samples: 40 });
        let lie = Engine::new(Lie2Backend::new(ResidueRing::prime_field(3).unwrap()).unwrap());
        let r = condition_p_probe(&lie, 20, 7, 1_000_000);
        assert!(
            matches!(r.verdict, ConditionP::Counterexample { replayed: true, .. }),
            "{:?}",
            r.verdict
        );
        let r = condition_p_probe(&lie, 20, 7, 0);
        assert!(matches!(r.verdict, ConditionP::Inconclusive { .. }));
    }

    #[test]
    fn simplicial_comparisons() {
        let e = z4();
        let f = Tensor::new(e.backend().clone(), 2);
        let c = simplicial_vs_chain(&f, &e, &e.cyclic_sum_i64(&[2]), 3, None).unwrap();
        assert!(c.agree(), "{c:?}");
        let c = comonadic_h0(&f, &e, &e.cyclic_sum_i64(&[2]), None).unwrap();
        assert!(c.agree());
        assert_eq!(c.rows[0].chain, two());
    }

    #[test]
    fn derived_morphisms() {
        let e = z4();
        let f = Tensor::new(e.backend().clone(), 2);
        let z2 = e.cyclic_sum_i64(&[2]);
        let maps = derive_morphism(&f, &e, &e.identity(&z2), 3).unwrap();
        assert!(maps.iter().all(|m| f.target().is_iso(m)));
    }
}
