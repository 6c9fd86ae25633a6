//! Approximate chain homotopies between chain maps of resolutions.
//!
//! `h_n : D^{n+1}(C_n) → E_{n+1}` with `d_1 h_0 = f_0 − g_0` and
//! `d_{n+1} h_n = (f_n − g_n)∘ς^{n−1}_{D(C_n)} − h_{n−1}∘Dⁿ(d_n)`.

use serde_json::json;

use crate::category::{Backend, Category, FreenessWitness, Morphism};
use crate::chains::{cycles_map, homology, induced_homology_map, kernel_of, ChainMap};
use crate::diff::Engine;
use crate::error::{Error, Result};
use crate::resolution::ProjectiveResolution;

#[derive(Clone, Debug)]
pub struct ApproxHomotopy<B: Backend> {
    pub f: ChainMap<B>,
    pub g: ChainMap<B>,
    pub components: Vec<Morphism<B>>,
}

impl<B: Backend> ApproxHomotopy<B> {
    pub fn top(&self) -> usize {
        self.components.len().saturating_sub(1)
    }
}

/// Right-hand side of the defining equation at degree `n`.
pub fn homotopy_target<B: Backend>(
    e: &Engine<B>,
    f: &ChainMap<B>,
    g: &ChainMap<B>,
    prev: Option<&Morphism<B>>,
    n: usize,
) -> Result<Morphism<B>> {
    let fg = e.approx_difference(&f.components[n], &g.components[n])?;
    let Some(h) = prev else {
        return Ok(fg);
    };
    let cn = &f.source.objects()[n];
    let dcn = e.d_object(cn)?;
    let lhs = e.compose(&fg, &e.sigma_pow(&dcn, n - 1)?);
    let rhs = e.compose(h, &e.d_morphism_power(&f.source.d(e, n), n)?);
    e.approx_difference(&lhs, &rhs)
}

/// Builds `h` degree by degree up to `min(deg f, deg g, N_E − 1)`.
pub fn construct_homotopy<B: Backend>(
    e: &Engine<B>,
    f: &ChainMap<B>,
    g: &ChainMap<B>,
    target: &ProjectiveResolution<B>,
) -> Result<ApproxHomotopy<B>> {
    if f.source != g.source || f.target != g.target {
        return Err(Error::NotParallel("chain maps have different ends".into()));
    }
    if f.target != target.complex.truncate(f.target.truncation()) {
        return Err(Error::InvalidMorphism(
            "chain maps do not land in the given resolution".into(),
        ));
    }
    if e.compose(&target.augmentation, &f.components[0])
        != e.compose(&target.augmentation, &g.components[0])
    {
        return Err(Error::VanishingCheckFailed {
            degree: 0,
            detail: "f and g lie over different morphisms".into(),
        });
    }
    let levels = target.levels(e)?;
    let top = f
        .degree()
        .min(g.degree())
        .min(target.truncation().saturating_sub(1));
    let mut comps: Vec<Morphism<B>> = Vec::new();
    for n in 0..levels.len().min(top + 1) {
        let t = homotopy_target(e, f, g, comps.last(), n)?;
        let lvl = &levels[n];
        let into_kernel = e
            .factor_through_mono(&t, &lvl.kernel.inclusion)
            .map_err(|_| Error::VanishingCheckFailed {
                degree: n,
                detail: format!("d_{n}∘(target) does not vanish"),
            })?;
        let witness = match e.free_rank(&t.dom) {
            Some(k) => FreenessWitness::Free { generators: k },
            None => FreenessWitness::None,
        };
        let h = e
            .lift_through_regular_epi(&into_kernel, &lvl.dbar, &witness, e.budget)
            .map_err(|err| Error::DProjectivityObstruction {
                degree: n,
                detail: format!("D^{}(C_{n}) admits no lift: {err}", n + 1),
                witness: Box::new(json!({
                    "degree": n,
                    "object": e.object_to_json(&t.dom),
                    "target": e.morphism_to_json(&into_kernel),
                    "epi": e.morphism_to_json(&lvl.dbar),
                })),
            })?;
        comps.push(h);
    }
    Ok(ApproxHomotopy {
        f: f.clone(),
        g: g.clone(),
        components: comps,
    })
}

/// Per degree, whether the defining equation holds.
pub fn verify_homotopy<B: Backend>(e: &Engine<B>, h: &ApproxHomotopy<B>) -> Result<Vec<bool>> {
    let mut out = Vec::with_capacity(h.components.len());
    for (n, hn) in h.components.iter().enumerate() {
        let t = homotopy_target(e, &h.f, &h.g, n.checked_sub(1).map(|k| &h.components[k]), n)?;
        let d = h.f.target.d(e, n + 1);
        out.push(hn.cod == d.dom && hn.dom == t.dom && e.compose(&d, hn) == t);
    }
    Ok(out)
}

/// `h'_n = h_n∘Dⁿ(tw_{C_n})`, a homotopy from `g` to `f`.
pub fn reverse_homotopy<B: Backend>(
    e: &Engine<B>,
    h: &ApproxHomotopy<B>,
) -> Result<ApproxHomotopy<B>> {
    let comps = h
        .components
        .iter()
        .enumerate()
        .map(|(n, hn)| {
            let tw = e.twist(&h.f.source.objects()[n])?;
            Ok(e.compose(hn, &e.d_morphism_power(&tw, n)?))
        })
        .collect::<Result<_>>()?;
    Ok(ApproxHomotopy {
        f: h.g.clone(),
        g: h.f.clone(),
        components: comps,
    })
}

/// `h∘α`: components `h_n∘D^{n+1}(α_n)`.
pub fn whisker_pre<B: Backend>(
    e: &Engine<B>,
    h: &ApproxHomotopy<B>,
    alpha: &ChainMap<B>,
) -> Result<ApproxHomotopy<B>> {
    let comps = (0..h.components.len().min(alpha.degree() + 1))
        .map(|n| {
            Ok(e.compose(
                &h.components[n],
                &e.d_morphism_power(&alpha.components[n], n + 1)?,
            ))
        })
        .collect::<Result<_>>()?;
    Ok(ApproxHomotopy {
        f: h.f.compose(e, alpha),
        g: h.g.compose(e, alpha),
        components: comps,
    })
}

/// `β∘h`: components `β_{n+1}∘h_n`.
pub fn whisker_post<B: Backend>(
    e: &Engine<B>,
    beta: &ChainMap<B>,
    h: &ApproxHomotopy<B>,
) -> Result<ApproxHomotopy<B>> {
    let comps: Vec<_> = h
        .components
        .iter()
        .enumerate()
        .take_while(|(n, _)| *n < beta.degree())
        .map(|(n, hn)| e.compose(&beta.components[n + 1], hn))
        .collect();
    Ok(ApproxHomotopy {
        f: beta.compose(e, &h.f),
        g: beta.compose(e, &h.g),
        components: comps,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct HomologyAgreement {
    pub degree: usize,
    /// `d̄_{n+1} h_n D^{n+1}(κ_n) = (Z_n f − Z_n g)∘ςⁿ_{D(Z_n)}`.
    pub identity_holds: bool,
    pub maps_agree: bool,
}

/// Checks that `f` and `g` induce the same map on `H_n` through `h`.
pub fn homology_agreement<B: Backend>(
    e: &Engine<B>,
    h: &ApproxHomotopy<B>,
    n: usize,
) -> Result<HomologyAgreement> {
    if n >= h.components.len() || n >= h.f.source.truncation() {
        return Err(Error::DegreeOutOfRange {
            degree: n,
            truncation: h.components.len(),
        });
    }
    let c = &h.f.source;
    let t = &h.f.target;
    let hc = homology(&**e, c, n)?;
    let he = homology(&**e, t, n)?;
    let zc = kernel_of(&**e, &c.d(e, n));
    let zf = cycles_map(&**e, &h.f.components[n], &zc, &he.cycles)?;
    let zg = cycles_map(&**e, &h.g.components[n], &zc, &he.cycles)?;
    let dz = e.d_object(&zc.object)?;
    let rhs = e.compose(&e.approx_difference(&zf, &zg)?, &e.sigma_pow(&dz, n)?);
    let lhs = e.compose_all(&[
        &he.dbar,
        &h.components[n],
        &e.d_morphism_power(&zc.inclusion, n + 1)?,
    ]);
    let hf = induced_homology_map(&**e, &h.f, &hc, &he)?;
    let hg = induced_homology_map(&**e, &h.g, &hc, &he)?;
    Ok(HomologyAgreement {
        degree: n,
        identity_holds: lhs == rhs,
        maps_agree: hf == hg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::lie2::Lie2Backend;
    use crate::backends::module::ModBackend;
    use crate::resolution::{build_resolution, lift_morphism};
    use crate::ring::ResidueRing;

    #[test]
    fn module_homotopy_between_seeded_lifts() {
        let e = Engine::new(ModBackend::new(ResidueRing::new(4).unwrap()));
        let x = e.cyclic_sum_i64(&[2, 0]);
        let r0 = build_resolution(&e, &x, 3, 0).unwrap();
        let r1 = build_resolution(&e, &x, 3, 7).unwrap();
        let id = e.identity(&x);
        let f = lift_morphism(&e, &id, &r0, &r1).unwrap();
        let back = lift_morphism(&e, &id, &r1, &r0).unwrap();
        let round = back.compose(&e, &f);
        let one = ChainMap::identity(&*e, &r0.complex);
        let h = construct_homotopy(&e, &round, &one, &r0).unwrap();
        assert!(verify_homotopy(&e, &h).unwrap().iter().all(|&b| b));
        let rev = reverse_homotopy(&e, &h).unwrap();
        assert!(verify_homotopy(&e, &rev).unwrap().iter().all(|&b| b));
        for n in 0..h.components.len() {
            let a = homology_agreement(&e, &h, n).unwrap();
            assert!(a.identity_holds && a.maps_agree);
        }
    }

    #[test]
    fn lie_homotopy_on_v2() {
        let e = Engine::new(Lie2Backend::new(ResidueRing::prime_field(2).unwrap()).unwrap());
        let v2 = e.abelian(2);
        let r = build_resolution(&e, &v2, 2, 0).unwrap();
        let id = ChainMap::identity(&*e, &r.complex);
        let h = construct_homotopy(&e, &id, &id, &r).unwrap();
        assert!(verify_homotopy(&e, &h).unwrap().iter().all(|&b| b));
        let rev = reverse_homotopy(&e, &h).unwrap();
        assert!(verify_homotopy(&e, &rev).unwrap().iter().all(|&b| b));
    }

    #[test]
    fn lie_homotopy_between_seeded_lifts() {
        let e = Engine::new(Lie2Backend::new(ResidueRing::prime_field(2).unwrap()).unwrap());
        for x in [e.abelian(2), e.heisenberg()] {
            let r0 = build_resolution(&e, &x, 2, 0).unwrap();
            let r1 = build_resolution(&e, &x, 2, 3).unwrap();
            let id = e.identity(&x);
            let f = lift_morphism(&e, &id, &r0, &r1).unwrap();
            let back = lift_morphism(&e, &id, &r1, &r0).unwrap();
            let round = back.compose(&e, &f);
            let one = ChainMap::identity(&*e, &r0.complex);
            let h = construct_homotopy(&e, &round, &one, &r0).unwrap();
            assert_eq!(h.components.len(), 2);
            assert!(verify_homotopy(&e, &h).unwrap().iter().all(|&b| b));
            let rev = reverse_homotopy(&e, &h).unwrap();
            assert!(verify_homotopy(&e, &rev).unwrap().iter().all(|&b| b));
            let a = homology_agreement(&e, &h, 0).unwrap();
            assert!(a.identity_holds && a.maps_agree);
        }
    }
}
