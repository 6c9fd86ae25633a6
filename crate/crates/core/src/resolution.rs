//! Projective resolutions, liftings of morphisms, the horseshoe construction
//! and syzygies.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::category::{
    Backend, Category, Cover, FreenessWitness, Morphism, Search, ShortExactSequence, Subobject,
};
use crate::chains::{homology, kernel_of, ChainComplex, ChainMap};
use crate::diff::Engine;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::ring::Ring;

/// Budget for recognizing a non-free level as a retract of its free cover.
const RETRACT_BUDGET: u64 = 256;

#[derive(Clone, Debug)]
pub struct ProjectiveResolution<B: Backend> {
    pub complex: ChainComplex<B>,
    pub resolved: B::Obj,
    /// `d_0 : C_0 → X`.
    pub augmentation: Morphism<B>,
    pub witnesses: Vec<FreenessWitness<B>>,
    pub seed: u64,
}

/// Kernel of the augmented differential at one level and the lifted next differential.
#[derive(Clone, Debug)]
pub struct Level<B: Backend> {
    /// `ker d_n`, with `d_0` the augmentation.
    pub kernel: Subobject<B>,
    /// `d̄_{n+1} : C_{n+1} → ker d_n`.
    pub dbar: Morphism<B>,
}

impl<B: Backend> ProjectiveResolution<B> {
    pub fn truncation(&self) -> usize {
        self.complex.truncation()
    }

    pub fn object(&self, n: usize) -> &B::Obj {
        &self.complex.objects()[n]
    }

    /// Differential of the augmented complex: `d_0` is the augmentation.
    pub fn aug_d(&self, b: &B, n: usize) -> Morphism<B> {
        if n == 0 {
            self.augmentation.clone()
        } else {
            self.complex.d(b, n)
        }
    }

    /// Levels `0..N`; level `n` carries `d̄_{n+1}`.
    pub fn levels(&self, b: &B) -> Result<Vec<Level<B>>> {
        (0..self.truncation())
            .map(|n| {
                let kernel = kernel_of(b, &self.aug_d(b, n));
                let dbar = b.factor_through_mono(&self.complex.d(b, n + 1), &kernel.inclusion)?;
                Ok(Level { kernel, dbar })
            })
            .collect()
    }

    pub fn to_json(&self, b: &B) -> Value {
        json!({
            "resolved": b.object_to_json(&self.resolved),
            "augmentation": self.augmentation.matrix.to_json(b.ring()),
            "complex": self.complex.to_json(b),
            "witnesses": self.witnesses.iter().map(|w| w.label()).collect::<Vec<_>>(),
            "seed": self.seed,
            "truncation": self.truncation(),
        })
    }
}

fn random_unit<R: Ring>(ring: &R, rng: &mut ChaCha8Rng) -> R::Elem {
    match ring.elements() {
        Some(els) => {
            let units: Vec<_> = els.into_iter().filter(|a| ring.is_unit(a)).collect();
            units[rng.gen_range(0..units.len())].clone()
        }
        None if rng.gen_bool(0.5) => ring.one(),
        None => ring.neg(&ring.one()),
    }
}

/// A random invertible matrix: a permutation followed by elementary operations.
pub fn random_invertible<R: Ring>(ring: &R, k: usize, rng: &mut ChaCha8Rng) -> Matrix<R::Elem> {
    let mut perm: Vec<usize> = (0..k).collect();
    perm.shuffle(rng);
    let mut rows: Vec<Vec<R::Elem>> = perm
        .iter()
        .map(|&p| {
            (0..k)
                .map(|j| if j == p { ring.one() } else { ring.zero() })
                .collect()
        })
        .collect();
    if k >= 2 {
        for _ in 0..k * k {
            let i = rng.gen_range(0..k);
            let j = (i + rng.gen_range(1..k)) % k;
            let c = ring.random(rng);
            let src = rows[j].clone();
            for (a, s) in rows[i].iter_mut().zip(&src) {
                *a = ring.add(a, &ring.mul(&c, s));
            }
        }
    }
    for row in rows.iter_mut() {
        let u = random_unit(ring, rng);
        for a in row.iter_mut() {
            *a = ring.mul(&u, a);
        }
    }
    Matrix::from_rows(k, &rows)
}

/// Covers `y` by a free object; non-free retracts of free objects cover themselves.
/// With an rng, the cover is twisted by a random automorphism of the free object.
pub fn seeded_cover<B: Backend>(
    e: &Engine<B>,
    y: &B::Obj,
    rng: Option<&mut ChaCha8Rng>,
) -> Result<Cover<B>> {
    if e.free_rank(y).is_none() {
        if let (
            FreenessWitness::RetractOfFree {
                free,
                retraction,
                section,
            },
            _,
        ) = e.projectivity_witness(y, RETRACT_BUDGET)
        {
            return Ok(Cover {
                object: y.clone(),
                epi: e.identity(y),
                witness: FreenessWitness::RetractOfFree {
                    free,
                    retraction,
                    section,
                },
            });
        }
    }
    let cover = e.projective_cover(y);
    e.check_cap(|| "projective cover".into(), e.dim(&cover.object))?;
    let Some(rng) = rng else {
        return Ok(cover);
    };
    let k = e.free_rank(&cover.object).expect("covers are free");
    let u = random_invertible(e.ring(), k, rng);
    let gens = e.generators(&cover.object);
    let images: Vec<_> = (0..k)
        .map(|i| {
            let mut v = vec![e.ring().zero(); e.dim(&cover.object)];
            for (j, g) in gens.iter().enumerate() {
                let c = u.get(j, i);
                for (a, x) in v.iter_mut().zip(g) {
                    *a = e.ring().add(a, &e.ring().mul(c, x));
                }
            }
            v
        })
        .collect();
    let phi = e.free_extend(k, &cover.object, &images);
    Ok(Cover {
        epi: e.compose(&cover.epi, &phi),
        ..cover
    })
}

/// Cover-the-kernel resolution up to degree `maxdeg`. Seed 0 is canonical.
pub fn build_resolution<B: Backend>(
    e: &Engine<B>,
    x: &B::Obj,
    maxdeg: usize,
    seed: u64,
) -> Result<ProjectiveResolution<B>> {
    let mut rng = (seed != 0).then(|| ChaCha8Rng::seed_from_u64(seed));
    let c0 = seeded_cover(e, x, rng.as_mut())?;
    let augmentation = c0.epi.clone();
    let mut objects = vec![c0.object.clone()];
    let mut witnesses = vec![c0.witness];
    let mut diffs = Vec::new();
    let mut kernel = kernel_of(&**e, &augmentation);
    for _ in 1..=maxdeg {
        if e.dim(&kernel.object) == 0 {
            let z = e.zero_object();
            diffs.push(e.zero_morphism(&z, objects.last().expect("degree 0 exists")));
            objects.push(z);
            witnesses.push(FreenessWitness::Free { generators: 0 });
            kernel = kernel_of(&**e, diffs.last().expect("just pushed"));
            continue;
        }
        let cover = seeded_cover(e, &kernel.object, rng.as_mut())?;
        let d = e.compose(&kernel.inclusion, &cover.epi);
        kernel = kernel_of(&**e, &d);
        objects.push(cover.object);
        witnesses.push(cover.witness);
        diffs.push(d);
    }
    Ok(ProjectiveResolution {
        complex: ChainComplex::new(objects, diffs),
        resolved: x.clone(),
        augmentation,
        witnesses,
        seed,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct ResolutionDiagnostics {
    pub truncation: usize,
    /// First degree where `d∘d ≠ 0`.
    pub dd_failure: Option<usize>,
    pub augmentation_epi: bool,
    pub augmentation_kills_d1: bool,
    /// Exactness of the augmented complex at `C_n`, `n < N`.
    pub exact: Vec<bool>,
    pub h0_matches: bool,
    pub witnesses_valid: bool,
}

impl ResolutionDiagnostics {
    pub fn ok(&self) -> bool {
        self.dd_failure.is_none()
            && self.augmentation_epi
            && self.augmentation_kills_d1
            && self.exact.iter().all(|&x| x)
            && self.h0_matches
            && self.witnesses_valid
    }

    pub fn first_inexact(&self) -> Option<usize> {
        self.exact.iter().position(|x| !x)
    }
}

pub fn validate_resolution<B: Backend>(
    b: &B,
    r: &ProjectiveResolution<B>,
) -> ResolutionDiagnostics {
    let n = r.truncation();
    let c = &r.complex;
    let d1 = c.d(b, 1);
    let augmentation_kills_d1 = n == 0 || b.is_zero_morphism(&b.compose(&r.augmentation, &d1));
    let exact = (0..n)
        .map(|k| {
            let ker = kernel_of(b, &r.aug_d(b, k));
            b.factor_through_mono(&c.d(b, k + 1), &ker.inclusion)
                .is_ok_and(|dbar| b.is_regular_epi(&dbar))
        })
        .collect();
    // H_0 = coker d_1 must be the resolved object through the augmentation.
    let h0_matches = if n == 0 {
        b.is_iso(&r.augmentation)
            || b.same_span(&r.augmentation.dom, &b.kernel_vectors(&r.augmentation), &[])
    } else {
        homology(b, c, 0).is_ok_and(|h| {
            b.fingerprint(&h.homology) == b.fingerprint(&r.resolved)
                && b.factor_through_epi(
                    &r.augmentation,
                    &b.compose(&h.projection, &h.cycles.inclusion),
                )
                .is_ok_and(|u| b.is_iso(&u))
        })
    };
    ResolutionDiagnostics {
        truncation: n,
        dd_failure: c.validate(b).err(),
        augmentation_epi: b.is_regular_epi(&r.augmentation),
        augmentation_kills_d1,
        exact,
        h0_matches,
        witnesses_valid: r.witnesses.len() == n + 1
            && r.witnesses
                .iter()
                .zip(c.objects())
                .all(|(w, x)| w.is_projective() && b.validate_witness(x, w)),
    }
}

/// Chain map over `x` between resolutions, lifted level by level.
pub fn lift_morphism<B: Backend>(
    e: &Engine<B>,
    x: &Morphism<B>,
    c: &ProjectiveResolution<B>,
    t: &ProjectiveResolution<B>,
) -> Result<ChainMap<B>> {
    if x.dom != c.resolved || x.cod != t.resolved {
        return Err(Error::InvalidMorphism(
            "morphism does not connect the resolved objects".into(),
        ));
    }
    let top = c.truncation().min(t.truncation());
    let levels = t.levels(e)?;
    let mut comps = Vec::with_capacity(top + 1);
    let f0 = e.lift_through_regular_epi(
        &e.compose(x, &c.augmentation),
        &t.augmentation,
        &c.witnesses[0],
        e.budget,
    )?;
    comps.push(f0);
    for n in 1..=top {
        let run = e.compose(&comps[n - 1], &c.complex.d(e, n));
        let lvl = &levels[n - 1];
        let into_kernel = e.factor_through_mono(&run, &lvl.kernel.inclusion)?;
        comps.push(e.lift_through_regular_epi(
            &into_kernel,
            &lvl.dbar,
            &c.witnesses[n],
            e.budget,
        )?);
    }
    Ok(ChainMap::new(
        c.complex.truncate(top),
        t.complex.truncate(top),
        comps,
    ))
}

/// Checks a short exact sequence; returns the first failed condition.
pub fn validate_ses<B: Backend>(
    b: &B,
    s: &ShortExactSequence<B>,
) -> std::result::Result<(), String> {
    if s.k.cod != s.f.dom {
        return Err("k and f are not composable".into());
    }
    if !b.is_zero_morphism(&b.compose(&s.f, &s.k)) {
        return Err("f∘k ≠ 0".into());
    }
    if !b.is_mono(&s.k) {
        return Err("k is not mono".into());
    }
    if !b.is_regular_epi(&s.f) {
        return Err("f is not a regular epi".into());
    }
    if !b.same_span(&s.f.dom, &b.image_vectors(&s.k), &b.kernel_vectors(&s.f)) {
        return Err("k is not the kernel of f".into());
    }
    if let Some(sec) = &s.section {
        if b.compose(&s.f, sec) != b.identity(&s.f.cod) {
            return Err("section does not split f".into());
        }
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct HorseshoeOutput<B: Backend> {
    pub c: ProjectiveResolution<B>,
    pub a: ProjectiveResolution<B>,
    pub e: ProjectiveResolution<B>,
    pub alpha: Vec<Morphism<B>>,
    pub beta: Vec<Morphism<B>>,
    /// Sections `i_n` of `β_n`.
    pub sections: Vec<Morphism<B>>,
    pub ses: ShortExactSequence<B>,
}

/// Half horseshoe: resolutions of the ends of `ses` around a resolution of its quotient.
pub fn horseshoe<B: Backend>(
    en: &Engine<B>,
    ses: &ShortExactSequence<B>,
    eres: &ProjectiveResolution<B>,
    maxdeg: usize,
) -> Result<HorseshoeOutput<B>> {
    validate_ses(&**en, ses).map_err(Error::InvalidMorphism)?;
    if eres.resolved != ses.f.cod {
        return Err(Error::InvalidObject(
            "the given resolution does not resolve the quotient".into(),
        ));
    }
    if eres.truncation() < maxdeg {
        return Err(Error::InsufficientTruncation(format!(
            "resolution of the quotient stops at {}, need {maxdeg}",
            eres.truncation()
        )));
    }
    let e_levels = eres.levels(en)?;
    let mut alpha_m = ses.k.clone();
    let mut beta_m = ses.f.clone();
    let mut eps = eres.augmentation.clone();
    let mut gamma = ses.section.clone();
    let (mut c_objs, mut a_objs) = (Vec::new(), Vec::new());
    let (mut c_diffs, mut a_diffs) = (Vec::new(), Vec::new());
    let (mut c_wit, mut a_wit) = (Vec::new(), Vec::new());
    let (mut alpha, mut beta, mut sections) = (Vec::new(), Vec::new(), Vec::new());
    let mut prev_kc: Option<Subobject<B>> = None;
    let mut prev_ka: Option<Subobject<B>> = None;
    let (mut aug_c, mut aug_a) = (None, None);
    for n in 0..=maxdeg {
        let en_obj = eres.object(n).clone();
        let pb = en.pullback(&beta_m, &eps)?;
        let (p0, p1) = (&pb.p_f, &pb.p_g);
        let i = match &gamma {
            Some(g) => en.pullback_pair(&pb, &en.compose(g, &eps), &en.identity(&en_obj))?,
            None => en.lift_through_regular_epi(
                &en.identity(&en_obj),
                p0,
                &eres.witnesses[n],
                en.budget,
            )?,
        };
        let cover = en.projective_cover(&pb.object);
        en.check_cap(|| "horseshoe cover".into(), en.dim(&cover.object))?;
        let eps0 = &cover.epi;
        let beta_n = en.compose(p0, eps0);
        let i_n = en.lift_through_regular_epi(&i, eps0, &eres.witnesses[n], en.budget)?;
        let kb = kernel_of(&**en, &beta_n);
        let c_witness = match en.free_rank(&kb.object) {
            Some(g) => FreenessWitness::Free { generators: g },
            None => match en.projectivity_witness(&kb.object, en.budget) {
                (w, Search::Found(())) => w,
                (_, search) => return Err(Error::ConditionPObstruction {
                    level: n,
                    detail: format!(
                        "kernel of the split epimorphism β_{n} has no section on its cover ({})",
                        search.label()
                    ),
                    unknown: matches!(search, Search::Unknown { .. }),
                    witness: Box::new(json!({
                        "level": n,
                        "kernel": en.object_to_json(&kb.object),
                        "split_epi": en.morphism_to_json(&beta_n),
                        "section": en.morphism_to_json(&i_n),
                        "search": search.label(),
                        "explored": search.explored(),
                    })),
                }),
            },
        };
        let eta_a = en.compose(p1, eps0);
        let eta_c = en.factor_through_mono(&en.compose(&eta_a, &kb.inclusion), &alpha_m)?;
        match (&prev_kc, &prev_ka) {
            (Some(kc), Some(ka)) => {
                c_diffs.push(en.compose(&kc.inclusion, &eta_c));
                a_diffs.push(en.compose(&ka.inclusion, &eta_a));
            }
            _ => {
                aug_c = Some(eta_c.clone());
                aug_a = Some(eta_a.clone());
            }
        }
        c_objs.push(kb.object.clone());
        a_objs.push(cover.object.clone());
        c_wit.push(c_witness);
        a_wit.push(cover.witness.clone());
        let kc = kernel_of(&**en, &eta_c);
        let ka = kernel_of(&**en, &eta_a);
        if n < maxdeg {
            let lvl = &e_levels[n];
            let ke = &lvl.kernel;
            alpha_m =
                en.factor_through_mono(&en.compose(&kb.inclusion, &kc.inclusion), &ka.inclusion)?;
            beta_m = en.factor_through_mono(&en.compose(&beta_n, &ka.inclusion), &ke.inclusion)?;
            gamma = match gamma {
                Some(_) => {
                    Some(en.factor_through_mono(&en.compose(&i_n, &ke.inclusion), &ka.inclusion)?)
                }
                None => None,
            };
            eps = lvl.dbar.clone();
        }
        alpha.push(kb.inclusion);
        beta.push(beta_n);
        sections.push(i_n);
        prev_kc = Some(kc);
        prev_ka = Some(ka);
    }
    let c = ProjectiveResolution {
        complex: ChainComplex::new(c_objs, c_diffs),
        resolved: ses.k.dom.clone(),
        augmentation: aug_c.expect("degree 0 built"),
        witnesses: c_wit,
        seed: 0,
    };
    let a = ProjectiveResolution {
        complex: ChainComplex::new(a_objs, a_diffs),
        resolved: ses.f.dom.clone(),
        augmentation: aug_a.expect("degree 0 built"),
        witnesses: a_wit,
        seed: 0,
    };
    let e = ProjectiveResolution {
        complex: eres.complex.truncate(maxdeg),
        ..eres.clone()
    };
    Ok(HorseshoeOutput {
        c,
        a,
        e,
        alpha,
        beta,
        sections,
        ses: ses.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct HorseshoeDiagnostics {
    pub rows_valid: bool,
    /// Per degree: `α_n = ker β_n`, `β_n` regular epi, `β_n∘i_n = 1`.
    pub columns_exact: Vec<bool>,
    pub chain_maps: bool,
    /// Sections commute with the differentials and augmentations.
    pub split_compatible: bool,
}

impl HorseshoeDiagnostics {
    pub fn ok(&self) -> bool {
        self.rows_valid && self.columns_exact.iter().all(|&x| x) && self.chain_maps
    }
}

pub fn validate_horseshoe<B: Backend>(b: &B, h: &HorseshoeOutput<B>) -> HorseshoeDiagnostics {
    let rows_valid = validate_resolution(b, &h.c).ok() && validate_resolution(b, &h.a).ok();
    let columns_exact = (0..h.alpha.len())
        .map(|n| {
            let s = ShortExactSequence {
                k: h.alpha[n].clone(),
                f: h.beta[n].clone(),
                section: Some(h.sections[n].clone()),
            };
            validate_ses(b, &s).is_ok()
        })
        .collect();
    let mut chain_maps = b.compose(&h.a.augmentation, &h.alpha[0])
        == b.compose(&h.ses.k, &h.c.augmentation)
        && b.compose(&h.e.augmentation, &h.beta[0]) == b.compose(&h.ses.f, &h.a.augmentation);
    let mut split_compatible = match &h.ses.section {
        Some(g) => b.compose(&h.a.augmentation, &h.sections[0]) == b.compose(g, &h.e.augmentation),
        None => false,
    };
    for n in 1..h.alpha.len() {
        chain_maps &= b.compose(&h.a.complex.d(b, n), &h.alpha[n])
            == b.compose(&h.alpha[n - 1], &h.c.complex.d(b, n));
        chain_maps &= b.compose(&h.e.complex.d(b, n), &h.beta[n])
            == b.compose(&h.beta[n - 1], &h.a.complex.d(b, n));
        split_compatible &= b.compose(&h.a.complex.d(b, n), &h.sections[n])
            == b.compose(&h.sections[n - 1], &h.e.complex.d(b, n));
    }
    HorseshoeDiagnostics {
        rows_valid,
        columns_exact,
        chain_maps,
        split_compatible,
    }
}

impl<B: Backend> HorseshoeOutput<B> {
    pub fn alpha_map(&self) -> ChainMap<B> {
        ChainMap::new(
            self.c.complex.clone(),
            self.a.complex.clone(),
            self.alpha.clone(),
        )
    }

    pub fn beta_map(&self) -> ChainMap<B> {
        ChainMap::new(
            self.a.complex.clone(),
            self.e.complex.clone(),
            self.beta.clone(),
        )
    }
}

/// `0 → Ω(X) → P → X → 0` with `P` the canonical cover.
pub fn syzygy<B: Backend>(b: &B, x: &B::Obj) -> (B::Obj, ShortExactSequence<B>) {
    let cover = b.projective_cover(x);
    let k = kernel_of(b, &cover.epi);
    (
        k.object.clone(),
        ShortExactSequence {
            k: k.inclusion,
            f: cover.epi,
            section: None,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::lie2::Lie2Backend;
    use crate::backends::module::ModBackend;
    use crate::category::Fingerprint;
    use crate::ring::ResidueRing;

    fn z4() -> Engine<ModBackend<ResidueRing>> {
        Engine::new(ModBackend::new(ResidueRing::new(4).unwrap()))
    }

    #[test]
    fn periodic_resolution_of_z2() {
        let e = z4();
        let x = e.cyclic_sum_i64(&[2]);
        for seed in [0, 1, 2] {
            let r = build_resolution(&e, &x, 4, seed).unwrap();
            let d = validate_resolution(&*e, &r);
            assert!(d.ok(), "{d:?}");
            for obj in r.complex.objects() {
                assert_eq!(e.dim(obj), 1);
                assert_eq!(e.free_rank(obj), Some(1));
            }
            for n in 1..=4 {
                let m = &r.complex.d(&e, n).matrix;
                assert_eq!(*m.get(0, 0) % 2, 0);
                assert_ne!(*m.get(0, 0), 0);
            }
        }
    }

    #[test]
    fn projective_object_has_trivial_resolution() {
        let e = z4();
        let x = e.free_module(2);
        let r = build_resolution(&e, &x, 3, 0).unwrap();
        assert!(validate_resolution(&*e, &r).ok());
        assert!(r.complex.objects()[1..].iter().all(|o| e.dim(o) == 0));
    }

    #[test]
    fn lie_resolution_of_v2() {
        let e = Engine::new(Lie2Backend::new(ResidueRing::prime_field(3).unwrap()).unwrap());
        let v2 = e.abelian(2);
        let r = build_resolution(&e, &v2, 3, 0).unwrap();
        assert!(validate_resolution(&*e, &r).ok());
        let dims: Vec<usize> = r.complex.objects().iter().map(|o| e.dim(o)).collect();
        assert_eq!(dims, vec![3, 1, 0, 0]);
        let (omega, ses) = syzygy(&*e, &v2);
        assert_eq!(e.free_rank(&omega), Some(1));
        assert!(validate_ses(&*e, &ses).is_ok());
    }

    #[test]
    fn identity_lifts_between_seeds() {
        let e = z4();
        let x = e.cyclic_sum_i64(&[2]);
        let r0 = build_resolution(&e, &x, 3, 0).unwrap();
        let r1 = build_resolution(&e, &x, 3, 5).unwrap();
        let id = e.identity(&x);
        let same = lift_morphism(&e, &id, &r0, &r0).unwrap();
        assert_eq!(same, ChainMap::identity(&*e, &r0.complex));
        let f = lift_morphism(&e, &id, &r0, &r1).unwrap();
        assert_eq!(f.validate(&e), Ok(()));
        let zero = lift_morphism(&e, &e.zero_morphism(&x, &x), &r0, &r1).unwrap();
        assert!(zero.components.iter().all(|c| e.is_zero_morphism(c)));
    }

    #[test]
    fn horseshoe_on_tor_sequence() {
        let e = z4();
        let r = e.ring().clone();
        let z2 = e.cyclic_sum_i64(&[2]);
        let z4m = e.free_module(1);
        let k = e
            .morphism(&z2, &z4m, Matrix::from_rows(1, &[vec![2]]))
            .unwrap();
        let f = e.morphism(&z4m, &z2, Matrix::identity(&r, 1)).unwrap();
        let ses = ShortExactSequence {
            k,
            f,
            section: None,
        };
        let eres = build_resolution(&e, &z2, 3, 0).unwrap();
        let h = horseshoe(&e, &ses, &eres, 3).unwrap();
        let d = validate_horseshoe(&*e, &h);
        assert!(d.ok(), "{d:?}");
        assert!(h.a.complex.objects().iter().all(|o| e.dim(o) == 2));
        assert_eq!(
            e.fingerprint(&h.c.resolved),
            Fingerprint::Module {
                invariant_factors: vec!["2".into()]
            }
        );
    }

    #[test]
    fn split_horseshoe_has_compatible_sections() {
        let e = z4();
        let r = e.ring().clone();
        let z2 = e.cyclic_sum_i64(&[2]);
        let x = e.cyclic_sum_i64(&[2, 2]);
        let k = e
            .morphism(&z2, &x, Matrix::from_rows(1, &[vec![1], vec![0]]))
            .unwrap();
        let f = e
            .morphism(&x, &z2, Matrix::from_rows(2, &[vec![0, 1]]))
            .unwrap();
        let s = e
            .morphism(&z2, &x, Matrix::from_rows(1, &[vec![0], vec![1]]))
            .unwrap();
        let ses = ShortExactSequence {
            k,
            f,
            section: Some(s),
        };
        let eres = build_resolution(&e, &z2, 3, 0).unwrap();
        let h = horseshoe(&e, &ses, &eres, 3).unwrap();
        let d = validate_horseshoe(&*e, &h);
        assert!(d.ok() && d.split_compatible, "{d:?}");
        let _ = r;
    }

    #[test]
    fn injected_exactness_failure_is_flagged() {
        let e = z4();
        let x = e.cyclic_sum_i64(&[2]);
        let mut r = build_resolution(&e, &x, 3, 0).unwrap();
        let objs = r.complex.objects().to_vec();
        let mut diffs = r.complex.diffs().to_vec();
        diffs[1] = e.zero_morphism(&objs[2], &objs[1]);
        r.complex = ChainComplex::new(objs, diffs);
        let d = validate_resolution(&*e, &r);
        assert_eq!(d.first_inexact(), Some(1));
    }
}
