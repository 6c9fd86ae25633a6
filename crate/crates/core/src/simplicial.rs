//! Truncated simplicial objects, Moore normalization, décalage, and the
//! passage from simplicial homotopies to approximate chain homotopies.

use serde_json::{json, Value};

use crate::backends::module::{ModBackend, ModObject};
use crate::category::{Backend, Category, Elem, FreenessWitness, Morphism, Search, Subobject};
use crate::chains::{kernel_of, ChainComplex, ChainMap};
use crate::diff::Engine;
use crate::error::{Error, Result};
use crate::homotopy::ApproxHomotopy;
use crate::matrix::Matrix;
use crate::resolution::{validate_resolution, ProjectiveResolution, ResolutionDiagnostics};
use crate::ring::Ring;

/// Levels `A_0..A_N` with faces, degeneracies below the top, and an optional augmentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialObject<B: Backend> {
    pub levels: Vec<B::Obj>,
    /// `faces[n][i] = ∂_i : A_n → A_{n−1}`; `faces[0]` is empty.
    pub faces: Vec<Vec<Morphism<B>>>,
    /// `degeneracies[n][i] = σ_i : A_n → A_{n+1}` for `n < N`.
    pub degeneracies: Vec<Vec<Morphism<B>>>,
    /// `∂_0 : A_0 → A_{−1}`.
    pub augmentation: Option<Morphism<B>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialMap<B: Backend> {
    pub components: Vec<Morphism<B>>,
}

/// `maps[n][j] = 𝕙_j : A_n → B_{n+1}`, a homotopy from `f` to `g`.
#[derive(Clone, Debug)]
pub struct SimplicialHomotopy<B: Backend> {
    pub f: SimplicialMap<B>,
    pub g: SimplicialMap<B>,
    pub maps: Vec<Vec<Morphism<B>>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct IdentityReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl IdentityReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, holds: bool, label: impl FnOnce() -> String) {
        self.checked += 1;
        if !holds {
            self.failures.push(label());
        }
    }
}

impl<B: Backend> SimplicialObject<B> {
    pub fn truncation(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn face(&self, n: usize, i: usize) -> &Morphism<B> {
        &self.faces[n][i]
    }

    pub fn degeneracy(&self, n: usize, i: usize) -> &Morphism<B> {
        &self.degeneracies[n][i]
    }

    /// Constant object on `x`, augmented by the identity when asked.
    pub fn constant(b: &B, x: &B::Obj, depth: usize, augmented: bool) -> Self {
        let id = b.identity(x);
        Self {
            levels: vec![x.clone(); depth + 1],
            faces: (0..=depth)
                .map(|n| {
                    if n == 0 {
                        Vec::new()
                    } else {
                        vec![id.clone(); n + 1]
                    }
                })
                .collect(),
            degeneracies: (0..depth).map(|n| vec![id.clone(); n + 1]).collect(),
            augmentation: augmented.then_some(id.clone()),
        }
    }

    pub fn to_json(&self, b: &B) -> Value {
        let r = b.ring();
        json!({
            "levels": self.levels.iter().map(|x| b.object_to_json(x)).collect::<Vec<_>>(),
            "faces": self.faces.iter().map(|fs| fs.iter().map(|f| f.matrix.to_json(r)).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "degeneracies": self.degeneracies.iter().map(|ss| ss.iter().map(|s| s.matrix.to_json(r)).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "augmentation": self.augmentation.as_ref().map(|a| json!({
                "target": b.object_to_json(&a.cod),
                "matrix": a.matrix.to_json(r),
            })),
        })
    }
}

/// Every simplicial identity instance in the stored range.
pub fn validate_simplicial<B: Backend>(b: &B, s: &SimplicialObject<B>) -> IdentityReport {
    let top = s.truncation();
    let mut rep = IdentityReport::default();
    let shape_ok = s.faces.len() == top + 1
        && s.degeneracies.len() == top
        && (1..=top).all(|n| s.faces[n].len() == n + 1)
        && (0..top).all(|n| s.degeneracies[n].len() == n + 1);
    rep.check(shape_ok, || "operator counts".into());
    if !shape_ok {
        return rep;
    }
    for n in 1..=top {
        for (i, f) in s.faces[n].iter().enumerate() {
            rep.check(f.dom == s.levels[n] && f.cod == s.levels[n - 1], || {
                format!("∂_{i} on A_{n} has wrong ends")
            });
        }
    }
    for n in 0..top {
        for (i, f) in s.degeneracies[n].iter().enumerate() {
            rep.check(f.dom == s.levels[n] && f.cod == s.levels[n + 1], || {
                format!("σ_{i} on A_{n} has wrong ends")
            });
        }
    }
    if !rep.ok() {
        return rep;
    }
    for n in 2..=top {
        for j in 1..=n {
            for i in 0..j {
                let lhs = b.compose(s.face(n - 1, i), s.face(n, j));
                let rhs = b.compose(s.face(n - 1, j - 1), s.face(n, i));
                rep.check(lhs == rhs, || {
                    format!("∂_{i}∂_{j} = ∂_{}∂_{i} on A_{n}", j - 1)
                });
            }
        }
    }
    for n in 0..top {
        for j in 0..=n {
            for i in 0..=n + 1 {
                let lhs = b.compose(s.face(n + 1, i), s.degeneracy(n, j));
                let rhs = if i < j {
                    b.compose(s.degeneracy(n - 1, j - 1), s.face(n, i))
                } else if i == j || i == j + 1 {
                    b.identity(&s.levels[n])
                } else {
                    b.compose(s.degeneracy(n - 1, j), s.face(n, i - 1))
                };
                rep.check(lhs == rhs, || format!("∂_{i}σ_{j} on A_{n}"));
            }
        }
    }
    for n in 0..top.saturating_sub(1) {
        for j in 0..=n {
            for i in 0..=j {
                let lhs = b.compose(s.degeneracy(n + 1, i), s.degeneracy(n, j));
                let rhs = b.compose(s.degeneracy(n + 1, j + 1), s.degeneracy(n, i));
                rep.check(lhs == rhs, || {
                    format!("σ_{i}σ_{j} = σ_{}σ_{i} on A_{n}", j + 1)
                });
            }
        }
    }
    if let Some(a) = &s.augmentation {
        rep.check(a.dom == s.levels[0], || {
            "augmentation has wrong domain".into()
        });
        if top >= 1 && a.dom == s.levels[0] {
            rep.check(
                b.compose(a, s.face(1, 0)) == b.compose(a, s.face(1, 1)),
                || "∂_0∂_0 = ∂_0∂_1 at the augmentation".into(),
            );
        }
    }
    rep
}

pub fn validate_simplicial_map<B: Backend>(
    b: &B,
    f: &SimplicialMap<B>,
    a: &SimplicialObject<B>,
    t: &SimplicialObject<B>,
) -> IdentityReport {
    let top = a
        .truncation()
        .min(t.truncation())
        .min(f.components.len().saturating_sub(1));
    let mut rep = IdentityReport::default();
    for n in 1..=top {
        for i in 0..=n {
            let holds = b.compose(&f.components[n - 1], a.face(n, i))
                == b.compose(t.face(n, i), &f.components[n]);
            rep.check(holds, || format!("f commutes with ∂_{i} on A_{n}"));
        }
    }
    for n in 0..top {
        for i in 0..=n {
            let holds = b.compose(&f.components[n + 1], a.degeneracy(n, i))
                == b.compose(t.degeneracy(n, i), &f.components[n]);
            rep.check(holds, || format!("f commutes with σ_{i} on A_{n}"));
        }
    }
    rep
}

/// Boundary conditions and exchange laws of a simplicial homotopy.
pub fn validate_simplicial_homotopy<B: Backend>(
    b: &B,
    h: &SimplicialHomotopy<B>,
    a: &SimplicialObject<B>,
    t: &SimplicialObject<B>,
) -> IdentityReport {
    let mut rep = IdentityReport::default();
    let levels = h.maps.len().min(a.truncation() + 1).min(t.truncation());
    for n in 0..levels {
        let hn = &h.maps[n];
        rep.check(hn.len() == n + 1, || {
            format!("homotopy level {n} has {} maps", hn.len())
        });
        if hn.len() != n + 1 {
            continue;
        }
        rep.check(
            b.compose(t.face(n + 1, 0), &hn[0]) == h.f.components[n],
            || format!("∂_0𝕙_0 = f_{n}"),
        );
        rep.check(
            b.compose(t.face(n + 1, n + 1), &hn[n]) == h.g.components[n],
            || format!("∂_{}𝕙_{n} = g_{n}", n + 1),
        );
        for j in 0..=n {
            for i in 0..=n + 1 {
                let lhs = b.compose(t.face(n + 1, i), &hn[j]);
                let rhs = if i < j {
                    b.compose(&h.maps[n - 1][j - 1], a.face(n, i))
                } else if i == j && i != 0 {
                    b.compose(t.face(n + 1, i), &hn[i - 1])
                } else if i > j + 1 {
                    b.compose(&h.maps[n - 1][j], a.face(n, i - 1))
                } else {
                    continue;
                };
                rep.check(lhs == rhs, || format!("∂_{i}𝕙_{j} on A_{n}"));
            }
            if n + 1 < levels && n + 1 < t.truncation() {
                for i in 0..=n + 1 {
                    let lhs = b.compose(t.degeneracy(n + 1, i), &hn[j]);
                    let rhs = if i <= j {
                        b.compose(&h.maps[n + 1][j + 1], a.degeneracy(n, i))
                    } else {
                        b.compose(&h.maps[n + 1][j], a.degeneracy(n, i - 1))
                    };
                    rep.check(lhs == rhs, || format!("σ_{i}𝕙_{j} on A_{n}"));
                }
            }
        }
    }
    rep
}

#[derive(Clone, Debug)]
pub struct MooreComplex<B: Backend> {
    pub complex: ChainComplex<B>,
    /// `κ_n : N_n → A_n`.
    pub inclusions: Vec<Subobject<B>>,
    /// `∂_0` restricted to `N_0 = A_0`.
    pub augmentation: Option<Morphism<B>>,
}

/// Joint kernel of `∂_0..∂_{n−1}` on `A_n`.
pub fn normalized_level<B: Backend>(b: &B, s: &SimplicialObject<B>, n: usize) -> Subobject<B> {
    let x = &s.levels[n];
    let mut sub = Subobject {
        object: x.clone(),
        inclusion: b.identity(x),
        normality: crate::category::Normality::Normal,
    };
    for i in 0..n {
        let k = kernel_of(b, &b.compose(s.face(n, i), &sub.inclusion));
        sub = Subobject {
            inclusion: b.compose(&sub.inclusion, &k.inclusion),
            object: k.object,
            normality: sub.normality,
        };
    }
    sub
}

pub fn moore<B: Backend>(b: &B, s: &SimplicialObject<B>) -> Result<MooreComplex<B>> {
    let inclusions: Vec<_> = (0..=s.truncation())
        .map(|n| normalized_level(b, s, n))
        .collect();
    let diffs = (1..=s.truncation())
        .map(|n| {
            b.factor_through_mono(
                &b.compose(s.face(n, n), &inclusions[n].inclusion),
                &inclusions[n - 1].inclusion,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let objects = inclusions.iter().map(|k| k.object.clone()).collect();
    Ok(MooreComplex {
        complex: ChainComplex::new(objects, diffs),
        inclusions,
        augmentation: s.augmentation.clone(),
    })
}

/// `N(f)`, restricting each `f_n` to the normalized levels.
pub fn moore_map<B: Backend>(
    b: &B,
    f: &SimplicialMap<B>,
    na: &MooreComplex<B>,
    nb: &MooreComplex<B>,
) -> Result<ChainMap<B>> {
    let top = na
        .complex
        .truncation()
        .min(nb.complex.truncation())
        .min(f.components.len() - 1);
    let comps = (0..=top)
        .map(|n| {
            b.factor_through_mono(
                &b.compose(&f.components[n], &na.inclusions[n].inclusion),
                &nb.inclusions[n].inclusion,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ChainMap::new(
        na.complex.truncate(top),
        nb.complex.truncate(top),
        comps,
    ))
}

/// Converts `𝕙 : f ≃ g` into an approximate homotopy `N(f) ≃ N(g)` up to the largest safe degree.
pub fn simplicial_to_chain_homotopy<B: Backend>(
    e: &Engine<B>,
    a: &SimplicialObject<B>,
    t: &SimplicialObject<B>,
    h: &SimplicialHomotopy<B>,
    maxdeg: usize,
) -> Result<ApproxHomotopy<B>> {
    let na = moore(&**e, a)?;
    let nb = moore(&**e, t)?;
    let f = moore_map(&**e, &h.f, &na, &nb)?;
    let g = moore_map(&**e, &h.g, &na, &nb)?;
    let safe = a
        .truncation()
        .min(t.truncation().saturating_sub(1))
        .min(h.maps.len().saturating_sub(1));
    if t.truncation() == 0 || h.maps.is_empty() {
        return Ok(ApproxHomotopy {
            f,
            g,
            components: Vec::new(),
        });
    }
    let mut comps = Vec::new();
    for n in 0..=maxdeg.min(safe) {
        let kappa = &na.inclusions[n].inclusion;
        let fk = e.compose(&h.f.components[n], kappa);
        let dn = e.d_object(&na.inclusions[n].object)?;
        // T'_j = σ_j f_n κ_n − 𝕙_j κ_n on D(N_n).
        let term = |j: usize| {
            e.approx_difference(
                &e.compose(t.degeneracy(n, j), &fk),
                &e.compose(&h.maps[n][j], kappa),
            )
        };
        let mut acc = term(0)?;
        for j in 1..=n {
            let lead = e.compose(&term(j)?, &e.sigma_pow(&dn, j - 1)?);
            acc = e.approx_difference(&lead, &acc)?;
        }
        for i in 0..=n {
            if !e.is_zero_morphism(&e.compose(t.face(n + 1, i), &acc)) {
                return Err(Error::VanishingCheckFailed {
                    degree: n,
                    detail: format!("∂_{i} does not kill the running difference"),
                });
            }
        }
        comps.push(e.factor_through_mono(&acc, &nb.inclusions[n + 1].inclusion)?);
    }
    Ok(ApproxHomotopy {
        f,
        g,
        components: comps,
    })
}

/// The pieces of `0 → Λ(S) → S⁻ → S → 0`.
#[derive(Clone, Debug)]
pub struct Decalage<B: Backend> {
    pub minus: SimplicialObject<B>,
    pub lambda: SimplicialObject<B>,
    /// `Λ(S)_n → S⁻_n = A_{n+1}`.
    pub inclusion: SimplicialMap<B>,
    /// `∂_0 : A_{n+1} → A_n`.
    pub projection: SimplicialMap<B>,
    /// `σ_0 : A_n → A_{n+1}`.
    pub section: SimplicialMap<B>,
}

pub fn decalage<B: Backend>(b: &B, s: &SimplicialObject<B>) -> Result<Decalage<B>> {
    let top = s.truncation();
    let Some(aug) = &s.augmentation else {
        return Err(Error::InvalidObject(
            "décalage needs an augmented simplicial object".into(),
        ));
    };
    if top == 0 {
        return Err(Error::InsufficientTruncation(
            "décalage needs at least one level above 0".into(),
        ));
    }
    let minus = SimplicialObject {
        levels: s.levels[1..].to_vec(),
        faces: (0..top)
            .map(|n| {
                if n == 0 {
                    Vec::new()
                } else {
                    s.faces[n + 1][1..].to_vec()
                }
            })
            .collect(),
        degeneracies: (0..top - 1)
            .map(|n| s.degeneracies[n + 1][1..].to_vec())
            .collect(),
        augmentation: Some(s.face(1, 1).clone()),
    };
    let projection = SimplicialMap {
        components: (0..top).map(|n| s.face(n + 1, 0).clone()).collect(),
    };
    let section = SimplicialMap {
        components: (0..top).map(|n| s.degeneracy(n, 0).clone()).collect(),
    };
    let kernels: Vec<_> = projection
        .components
        .iter()
        .map(|p| kernel_of(b, p))
        .collect();
    let restrict = |m: &Morphism<B>, from: &Subobject<B>, to: &Subobject<B>| {
        b.factor_through_mono(&b.compose(m, &from.inclusion), &to.inclusion)
    };
    let faces = (0..top)
        .map(|n| {
            if n == 0 {
                return Ok(Vec::new());
            }
            minus.faces[n]
                .iter()
                .map(|f| restrict(f, &kernels[n], &kernels[n - 1]))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let degeneracies = (0..top - 1)
        .map(|n| {
            minus.degeneracies[n]
                .iter()
                .map(|d| restrict(d, &kernels[n], &kernels[n + 1]))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let aug_kernel = kernel_of(b, aug);
    let lambda_aug = restrict(s.face(1, 1), &kernels[0], &aug_kernel)?;
    let lambda = SimplicialObject {
        levels: kernels.iter().map(|k| k.object.clone()).collect(),
        faces,
        degeneracies,
        augmentation: Some(lambda_aug),
    };
    let inclusion = SimplicialMap {
        components: kernels.into_iter().map(|k| k.inclusion).collect(),
    };
    Ok(Decalage {
        minus,
        lambda,
        inclusion,
        projection,
        section,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct DecalageCheck {
    pub degree: usize,
    pub fingerprints_equal: bool,
    /// `Λⁿ(S)_0` and `N_n(S)` are the same subobject of `A_n`.
    pub same_subobject: bool,
    /// The level-wise sequences split: `∂_0σ_0 = 1`.
    pub split: bool,
}

impl DecalageCheck {
    pub fn ok(&self) -> bool {
        self.fingerprints_equal && self.same_subobject && self.split
    }
}

/// Checks `N_n(S) = (Λⁿ S)_0` for `1 ≤ n ≤ maxdeg`.
pub fn decalage_identity<B: Backend>(
    b: &B,
    s: &SimplicialObject<B>,
    maxdeg: usize,
) -> Result<Vec<DecalageCheck>> {
    if maxdeg > s.truncation() {
        return Err(Error::InsufficientTruncation(format!(
            "need truncation {maxdeg}, have {}",
            s.truncation()
        )));
    }
    let mut cur = s.clone();
    // embeddings[m]: level m of the current iterate into A_{m+k}.
    let mut embeddings: Vec<Morphism<B>> = s.levels.iter().map(|x| b.identity(x)).collect();
    let mut out = Vec::new();
    for n in 1..=maxdeg {
        let dec = decalage(b, &cur)?;
        let split = dec
            .projection
            .components
            .iter()
            .zip(&dec.section.components)
            .all(|(p, q)| b.compose(p, q) == b.identity(&q.dom));
        embeddings = dec
            .inclusion
            .components
            .iter()
            .enumerate()
            .map(|(m, i)| b.compose(&embeddings[m + 1], i))
            .collect();
        let nn = normalized_level(b, s, n);
        let lam0 = &dec.lambda.levels[0];
        out.push(DecalageCheck {
            degree: n,
            fingerprints_equal: b.fingerprint(lam0) == b.fingerprint(&nn.object),
            same_subobject: b.same_span(
                &s.levels[n],
                &b.image_vectors(&embeddings[0]),
                &b.image_vectors(&nn.inclusion),
            ),
            split,
        });
        cur = dec.lambda;
    }
    Ok(out)
}

/// Iterated power `X^k` with its projections.
struct Power<B: Backend> {
    object: B::Obj,
    projections: Vec<Morphism<B>>,
}

fn power<B: Backend>(b: &B, x: &B::Obj, k: usize) -> Power<B> {
    let mut object = x.clone();
    let mut projections = vec![b.identity(x)];
    for _ in 1..k {
        let p = b.product_of(&object, x);
        projections = projections
            .iter()
            .map(|q| b.compose(q, &p.pi1))
            .chain(std::iter::once(p.pi2.clone()))
            .collect();
        object = p.object;
    }
    Power {
        object,
        projections,
    }
}

fn tuple<B: Backend>(b: &B, pw: &Power<B>, maps: &[Morphism<B>]) -> Morphism<B> {
    let mut m = maps[0].matrix.clone();
    for f in &maps[1..] {
        m = m.vstack(&f.matrix);
    }
    b.mor(&maps[0].dom, &pw.object, m)
}

/// Čech nerve of a regular epi, as iterated fiber powers; for a split epi also the
/// contracting homotopy from the identity to `s∘e` applied coordinatewise.
pub fn cech_nerve<B: Backend>(
    e: &Engine<B>,
    epi: &Morphism<B>,
    depth: usize,
    section: Option<&Morphism<B>>,
) -> Result<(SimplicialObject<B>, Option<SimplicialHomotopy<B>>)> {
    if !e.is_regular_epi(epi) {
        return Err(Error::InvalidMorphism(
            "Čech nerve needs a regular epimorphism".into(),
        ));
    }
    if let Some(s) = section {
        if e.compose(epi, s) != e.identity(&epi.cod) {
            return Err(Error::InvalidMorphism(
                "section does not split the epimorphism".into(),
            ));
        }
    }
    let x = &epi.dom;
    let mut powers = Vec::new();
    let mut subs: Vec<Subobject<B>> = Vec::new();
    for n in 0..=depth {
        e.check_cap(|| format!("Čech level {n}"), e.dim(x) * (n + 1))?;
        let pw = power(&**e, x, n + 1);
        let mut sub = Subobject {
            object: pw.object.clone(),
            inclusion: e.identity(&pw.object),
            normality: crate::category::Normality::Unknown,
        };
        for k in 1..=n {
            let a = e.compose_all(&[epi, &pw.projections[0], &sub.inclusion]);
            let c = e.compose_all(&[epi, &pw.projections[k], &sub.inclusion]);
            let eq = e.equalizer(&a, &c)?;
            sub = Subobject {
                inclusion: e.compose(&sub.inclusion, &eq.inclusion),
                object: eq.object,
                normality: sub.normality,
            };
        }
        powers.push(pw);
        subs.push(sub);
    }
    // coords[n][k] : A_n → X.
    let coords: Vec<Vec<Morphism<B>>> = (0..=depth)
        .map(|n| {
            powers[n]
                .projections
                .iter()
                .map(|p| e.compose(p, &subs[n].inclusion))
                .collect()
        })
        .collect();
    let build = |to: usize, maps: Vec<Morphism<B>>| -> Result<Morphism<B>> {
        e.factor_through_mono(&tuple(&**e, &powers[to], &maps), &subs[to].inclusion)
    };
    let mut faces = vec![Vec::new()];
    for n in 1..=depth {
        let fs = (0..=n)
            .map(|i| {
                build(
                    n - 1,
                    (0..=n)
                        .filter(|&k| k != i)
                        .map(|k| coords[n][k].clone())
                        .collect(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        faces.push(fs);
    }
    let degeneracies = (0..depth)
        .map(|n| {
            (0..=n)
                .map(|i| {
                    let idx: Vec<usize> = (0..=n)
                        .flat_map(|k| if k == i { vec![k, k] } else { vec![k] })
                        .collect();
                    build(
                        n + 1,
                        idx.into_iter().map(|k| coords[n][k].clone()).collect(),
                    )
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let nerve = SimplicialObject {
        levels: subs.iter().map(|s| s.object.clone()).collect(),
        faces,
        degeneracies,
        augmentation: Some(e.compose(epi, &coords[0][0])),
    };
    let homotopy = match section {
        None => None,
        Some(s) => {
            let se = e.compose(s, epi);
            let ys: Vec<Morphism<B>> = (0..=depth).map(|n| e.compose(&se, &coords[n][0])).collect();
            let f = SimplicialMap {
                components: nerve.levels.iter().map(|l| e.identity(l)).collect(),
            };
            let g = SimplicialMap {
                components: (0..=depth)
                    .map(|n| build(n, vec![ys[n].clone(); n + 1]))
                    .collect::<Result<Vec<_>>>()?,
            };
            let maps = (0..depth)
                .map(|n| {
                    (0..=n)
                        .map(|j| {
                            let mut parts = vec![ys[n].clone(); j + 1];
                            parts.extend((j..=n).map(|k| coords[n][k].clone()));
                            build(n + 1, parts)
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            Some(SimplicialHomotopy { f, g, maps })
        }
    };
    Ok((nerve, homotopy))
}

/// Elements of a finite object in canonical form.
pub fn underlying_set<B: Backend>(b: &B, x: &B::Obj, cap: usize) -> Result<Vec<Vec<Elem<B>>>> {
    let ring = b.ring();
    let all = ring.elements().ok_or_else(|| {
        Error::Unsupported("underlying sets need a finite coefficient ring".into())
    })?;
    let mut out: Vec<Vec<Elem<B>>> = vec![Vec::new()];
    for t in b.torsion(x) {
        let residues: Vec<_> = if ring.is_zero(&t) {
            all.clone()
        } else {
            all.iter()
                .filter(|a| ring.reduce(a, &t) == **a)
                .cloned()
                .collect()
        };
        if out.len().saturating_mul(residues.len()) > cap {
            return Err(Error::DimensionBlowup {
                what: "underlying set".into(),
                predicted: out.len() * residues.len(),
                cap,
            });
        }
        out = out
            .into_iter()
            .flat_map(|p| {
                residues.iter().map(move |a| {
                    let mut q = p.clone();
                    q.push(a.clone());
                    q
                })
            })
            .collect();
    }
    Ok(out)
}

/// Comonadic resolution from the free-on-underlying-set adjunction, depth 0 or 1.
pub fn comonadic<B: Backend>(
    e: &Engine<B>,
    x: &B::Obj,
    depth: usize,
) -> Result<SimplicialObject<B>> {
    if depth > 1 {
        return Err(Error::Unsupported(
            "comonadic resolutions are generated to depth 1 only".into(),
        ));
    }
    let xs = underlying_set(&**e, x, e.dim_cap)?;
    let gx = e.free_object(xs.len());
    e.check_cap(|| "G(X)".into(), e.dim(&gx))?;
    let eps_x = e.free_extend(xs.len(), x, &xs);
    if depth == 0 {
        return Ok(SimplicialObject {
            levels: vec![gx],
            faces: vec![Vec::new()],
            degeneracies: Vec::new(),
            augmentation: Some(eps_x),
        });
    }
    let gxs = underlying_set(&**e, &gx, e.dim_cap)?;
    let ggx = e.free_object(gxs.len());
    e.check_cap(|| "G(G(X))".into(), e.dim(&ggx))?;
    let gens_gx = e.generators(&gx);
    let index_in = |set: &[Vec<Elem<B>>], v: &[Elem<B>]| {
        set.iter()
            .position(|w| w.as_slice() == v)
            .expect("element enumerated")
    };
    let d0 = e.free_extend(gxs.len(), &gx, &gxs);
    let d1_images: Vec<_> = gxs
        .iter()
        .map(|u| {
            let v = e
                .canonical(
                    x,
                    Matrix::from_columns(e.dim(x), &[eps_x.matrix.apply(e.ring(), u)]),
                )
                .column(0);
            gens_gx[index_in(&xs, &v)].clone()
        })
        .collect();
    let d1 = e.free_extend(gxs.len(), &gx, &d1_images);
    let gens_ggx = e.generators(&ggx);
    let s0_images: Vec<_> = gens_gx
        .iter()
        .map(|g| gens_ggx[index_in(&gxs, g)].clone())
        .collect();
    let s0 = e.free_extend(xs.len(), &ggx, &s0_images);
    Ok(SimplicialObject {
        levels: vec![gx, ggx],
        faces: vec![Vec::new(), vec![d0, d1]],
        degeneracies: vec![vec![s0]],
        augmentation: Some(eps_x),
    })
}

/// Surjections `[n] ↠ [k]` as nondecreasing sequences, `k ≤ kmax`.
fn surjections(n: usize, kmax: usize) -> Vec<Vec<usize>> {
    // A surjection is determined by the set of positions where it steps up.
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let k = mask.count_ones() as usize;
        if k > kmax {
            continue;
        }
        let mut seq = vec![0];
        for p in 0..n {
            seq.push(seq[p] + ((mask >> p) & 1) as usize);
        }
        out.push(seq);
    }
    out.sort_by_key(|s| (std::cmp::Reverse(s[n]), s.clone()));
    out
}

/// Dold–Kan `Γ(C)` of a module complex to the given depth; used only as a test oracle.
pub fn dk_gamma<R: Ring>(
    b: &ModBackend<R>,
    c: &ChainComplex<ModBackend<R>>,
    depth: usize,
    augmentation: Option<&Morphism<ModBackend<R>>>,
) -> SimplicialObject<ModBackend<R>> {
    let ring = b.ring();
    let kmax = c.truncation();
    let summands: Vec<Vec<Vec<usize>>> = (0..=depth).map(|n| surjections(n, kmax)).collect();
    let offsets: Vec<Vec<usize>> = summands
        .iter()
        .map(|ss| {
            let mut acc = 0;
            ss.iter()
                .map(|s| {
                    let o = acc;
                    acc += b.dim(&c.objects()[*s.last().expect("nonempty")]);
                    o
                })
                .collect()
        })
        .collect();
    let levels: Vec<ModObject<R::Elem>> = summands
        .iter()
        .map(|ss| {
            let t: Vec<R::Elem> = ss
                .iter()
                .flat_map(|s| c.objects()[*s.last().expect("nonempty")].torsion().to_vec())
                .collect();
            b.cyclic_sum(&t)
        })
        .collect();
    // θ* for a monotone θ : [m] → [n].
    let operator = |theta: &[usize], m: usize, n: usize| -> Morphism<ModBackend<R>> {
        let mut mat = Matrix::zeros(ring, b.dim(&levels[m]), b.dim(&levels[n]));
        for (si, eta) in summands[n].iter().enumerate() {
            let k = eta[n];
            let comp: Vec<usize> = theta.iter().map(|&t| eta[t]).collect();
            let mut image = comp.clone();
            image.dedup();
            let eps: Vec<usize> = comp
                .iter()
                .map(|v| image.iter().position(|w| w == v).expect("in image"))
                .collect();
            let block = if image.len() == k + 1 {
                Some(b.identity(&c.objects()[k]).matrix)
            } else if image.len() == k && image == (0..k).collect::<Vec<_>>() {
                Some(c.d(b, k).matrix)
            } else {
                None
            };
            let Some(block) = block else { continue };
            let ti = summands[m]
                .iter()
                .position(|s| *s == eps)
                .expect("factorization lands in a summand");
            let (r0, c0) = (offsets[m][ti], offsets[n][si]);
            for r in 0..block.rows() {
                for col in 0..block.cols() {
                    mat.set(r0 + r, c0 + col, block.get(r, col).clone());
                }
            }
        }
        b.mor(&levels[n], &levels[m], mat)
    };
    let faces = (0..=depth)
        .map(|n| {
            (0..if n == 0 { 0 } else { n + 1 })
                .map(|i| {
                    let theta: Vec<usize> = (0..n).map(|p| if p < i { p } else { p + 1 }).collect();
                    operator(&theta, n - 1, n)
                })
                .collect()
        })
        .collect();
    let degeneracies = (0..depth)
        .map(|n| {
            (0..=n)
                .map(|i| {
                    let theta: Vec<usize> = (0..=n + 1)
                        .map(|p| if p <= i { p } else { p - 1 })
                        .collect();
                    operator(&theta, n + 1, n)
                })
                .collect()
        })
        .collect();
    let augmentation = augmentation.map(|a| {
        let mut mat = Matrix::zeros(ring, b.dim(&a.cod), b.dim(&levels[0]));
        for r in 0..a.matrix.rows() {
            for col in 0..a.matrix.cols() {
                mat.set(r, col, a.matrix.get(r, col).clone());
            }
        }
        b.mor(&levels[0], &a.cod, mat)
    });
    SimplicialObject {
        levels,
        faces,
        degeneracies,
        augmentation,
    }
}

#[derive(Clone, Debug)]
pub struct SimplicialResolutionReport<B: Backend> {
    pub identities: IdentityReport,
    pub diagnostics: ResolutionDiagnostics,
    pub levels_free: bool,
    /// Projectivity of each `N_n`, `None` when the search was inconclusive.
    pub moore_projective: Vec<Option<bool>>,
    pub promoted: Option<ProjectiveResolution<B>>,
}

impl<B: Backend> SimplicialResolutionReport<B> {
    /// Exact with `H_0` the augmentation target.
    pub fn exact(&self) -> bool {
        let d = &self.diagnostics;
        self.identities.ok()
            && d.dd_failure.is_none()
            && d.augmentation_epi
            && d.augmentation_kills_d1
            && d.exact.iter().all(|&x| x)
            && d.h0_matches
    }
}

pub fn validate_simplicial_resolution<B: Backend>(
    e: &Engine<B>,
    s: &SimplicialObject<B>,
    budget: u64,
) -> Result<SimplicialResolutionReport<B>> {
    let identities = validate_simplicial(&**e, s);
    let aug = s.augmentation.clone().ok_or_else(|| {
        Error::InvalidObject("simplicial resolution needs an augmentation".into())
    })?;
    let m = moore(&**e, s)?;
    let mut witnesses = Vec::new();
    let mut moore_projective = Vec::new();
    for obj in m.complex.objects() {
        let w = match e.free_rank(obj) {
            Some(g) => (FreenessWitness::Free { generators: g }, Search::Found(())),
            None => e.projectivity_witness(obj, budget),
        };
        moore_projective.push(match &w.1 {
            Search::Found(()) => Some(true),
            Search::None { .. } => Some(false),
            Search::Unknown { .. } => None,
        });
        witnesses.push(w.0);
    }
    let candidate = ProjectiveResolution {
        complex: m.complex,
        resolved: aug.cod.clone(),
        augmentation: aug,
        witnesses,
        seed: 0,
    };
    let diagnostics = validate_resolution(&**e, &candidate);
    let levels_free = s.levels.iter().all(|l| e.free_rank(l).is_some());
    let promoted = (levels_free && identities.ok() && diagnostics.ok()).then_some(candidate);
    Ok(SimplicialResolutionReport {
        identities,
        diagnostics,
        levels_free,
        moore_projective,
        promoted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::lie2::Lie2Backend;
    use crate::category::Fingerprint;
    use crate::homotopy::{homology_agreement, verify_homotopy};
    use crate::resolution::build_resolution;
    use crate::ring::ResidueRing;

    fn z4() -> Engine<ModBackend<ResidueRing>> {
        Engine::new(ModBackend::new(ResidueRing::new(4).unwrap()))
    }

    #[test]
    fn constant_object_normalizes_to_degree_zero() {
        let e = z4();
        let x = e.cyclic_sum_i64(&[2, 0]);
        let s = SimplicialObject::constant(&*e, &x, 3, true);
        assert!(validate_simplicial(&*e, &s).ok());
        let m = moore(&*e, &s).unwrap();
        assert_eq!(m.complex.objects()[0], x);
        assert!(m.complex.objects()[1..].iter().all(|o| e.dim(o) == 0));
        let dec = decalage(&*e, &s).unwrap();
        assert!(dec.lambda.levels.iter().all(|l| e.dim(l) == 0));
    }

    #[test]
    fn corrupted_degeneracy_is_flagged() {
        let e = z4();
        let x = e.free_module(1);
        let mut s = SimplicialObject::constant(&*e, &x, 2, false);
        s.degeneracies[0][0] = e.zero_morphism(&x, &x);
        let rep = validate_simplicial(&*e, &s);
        assert!(rep.failures.iter().any(|f| f.contains("σ_0")));
    }

    #[test]
    fn lie_cech_nerve_of_abelianization() {
        let e = Engine::new(Lie2Backend::new(ResidueRing::prime_field(3).unwrap()).unwrap());
        let f2 = e.free_object(2);
        let v2 = e.abelian(2);
        let epi = e.free_extend(2, &v2, &[vec![1, 0], vec![0, 1]]);
        let (s, h) = cech_nerve(&e, &epi, 3, None).unwrap();
        assert!(h.is_none());
        assert!(validate_simplicial(&*e, &s).ok());
        let m = moore(&*e, &s).unwrap();
        let dims: Vec<usize> = m.complex.objects().iter().map(|o| e.dim(o)).collect();
        assert_eq!(dims, vec![3, 1, 0, 0]);
        assert_eq!(m.complex.objects()[0], f2);
        let rep = validate_simplicial_resolution(&e, &s, 1000).unwrap();
        assert!(rep.exact());
    }

    #[test]
    fn split_nerve_homotopy_converts_in_both_backends() {
        let e = z4();
        let x = e.free_module(2);
        let y = e.free_module(1);
        let epi = e
            .morphism(&x, &y, Matrix::from_rows(2, &[vec![1, 0]]))
            .unwrap();
        let sec = e
            .morphism(&y, &x, Matrix::from_rows(1, &[vec![1], vec![0]]))
            .unwrap();
        let (s, h) = cech_nerve(&e, &epi, 3, Some(&sec)).unwrap();
        let h = h.unwrap();
        assert!(validate_simplicial_homotopy(&*e, &h, &s, &s).ok());
        let ch = simplicial_to_chain_homotopy(&e, &s, &s, &h, 2).unwrap();
        assert_eq!(ch.components.len(), 3);
        assert!(verify_homotopy(&e, &ch).unwrap().iter().all(|&b| b));

        let l = Engine::new(Lie2Backend::new(ResidueRing::prime_field(3).unwrap()).unwrap());
        let f2 = l.free_object(2);
        let a1 = l.abelian(1);
        let epi = l.free_extend(2, &a1, &[vec![1], vec![0]]);
        let sec = l
            .morphism(&a1, &f2, Matrix::from_rows(1, &[vec![1], vec![0], vec![0]]))
            .unwrap();
        let (s, h) = cech_nerve(&l, &epi, 3, Some(&sec)).unwrap();
        let h = h.unwrap();
        assert!(validate_simplicial_homotopy(&*l, &h, &s, &s).ok());
        let ch = simplicial_to_chain_homotopy(&l, &s, &s, &h, 2).unwrap();
        assert!(verify_homotopy(&l, &ch).unwrap().iter().all(|&b| b));
        for n in 0..2 {
            let a = homology_agreement(&l, &ch, n).unwrap();
            assert!(a.identity_holds && a.maps_agree, "{a:?}");
        }
    }

    #[test]
    fn decalage_matches_normalization() {
        let e = z4();
        let x = e.free_module(2);
        let y = e.cyclic_sum_i64(&[2]);
        let epi = e
            .morphism(&x, &y, Matrix::from_rows(2, &[vec![1, 1]]))
            .unwrap();
        let (s, _) = cech_nerve(&e, &epi, 3, None).unwrap();
        let checks = decalage_identity(&*e, &s, 3).unwrap();
        assert!(checks.iter().all(|c| c.ok()), "{checks:?}");
    }

    #[test]
    fn gamma_normalizes_back() {
        let e = z4();
        let x = e.cyclic_sum_i64(&[2]);
        let r = build_resolution(&e, &x, 3, 0).unwrap();
        let g = dk_gamma(&e, &r.complex, 3, Some(&r.augmentation));
        assert!(
            validate_simplicial(&*e, &g).ok(),
            "{:?}",
            validate_simplicial(&*e, &g)
        );
        let m = moore(&*e, &g).unwrap();
        for n in 0..=3 {
            assert_eq!(
                e.fingerprint(&m.complex.objects()[n]),
                e.fingerprint(&r.complex.objects()[n])
            );
        }
        let rep = validate_simplicial_resolution(&e, &g, 1000).unwrap();
        assert!(rep.exact() && rep.promoted.is_some());
    }

    #[test]
    fn comonadic_levels() {
        let e = z4();
        let x = e.cyclic_sum_i64(&[2]);
        let s = comonadic(&e, &x, 1).unwrap();
        assert_eq!(e.free_rank(&s.levels[0]), Some(2));
        assert_eq!(e.free_rank(&s.levels[1]), Some(16));
        assert!(validate_simplicial(&*e, &s).ok());
        let m = moore(&*e, &s).unwrap();
        let h0 = crate::chains::homology(&*e, &m.complex, 0).unwrap();
        assert_eq!(
            e.fingerprint(&h0.homology),
            Fingerprint::Module {
                invariant_factors: vec!["2".into()]
            }
        );
    }
}
