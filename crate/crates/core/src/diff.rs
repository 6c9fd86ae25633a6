//! Difference objects `D(X) = ker(∇_X)`, approximate differences and the
//! morphisms `ς`, `ςⁿ` and the twist built from them.

use std::collections::HashMap;
use std::ops::Deref;
use std::sync::{Arc, RwLock};

use crate::category::{Backend, Category, Coproduct, Elem, Morphism};
use crate::error::{Error, Result};
use crate::linalg::Solver;
use crate::matrix::Matrix;

pub const DEFAULT_DIM_CAP: usize = 512;
pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Debug)]
pub struct DifferenceBundle<B: Backend> {
    pub object: B::Obj,
    pub d: B::Obj,
    pub coproduct: Coproduct<B>,
    /// `δ_X : D(X) → X + X`.
    pub delta: Morphism<B>,
    /// `∇_X : X + X → X`.
    pub nabla: Morphism<B>,
    /// `ς_X = ⟨1, 0⟩∘δ_X`.
    pub sigma: Morphism<B>,
    delta_solver: Solver<Elem<B>>,
}

impl<B: Backend> DifferenceBundle<B> {
    pub fn iota1(&self) -> &Morphism<B> {
        &self.coproduct.iota1
    }

    pub fn iota2(&self) -> &Morphism<B> {
        &self.coproduct.iota2
    }
}

/// A backend together with size caps, a search budget and a cache of
/// difference bundles. Dereferences to the backend.
#[derive(Debug)]
pub struct Engine<B: Backend> {
    backend: B,
    pub dim_cap: usize,
    pub budget: u64,
    cache: RwLock<HashMap<B::Obj, Arc<DifferenceBundle<B>>>>,
}

impl<B: Backend> Clone for Engine<B> {
    fn clone(&self) -> Self {
        Self {
            backend: self.backend.clone(),
            dim_cap: self.dim_cap,
            budget: self.budget,
            cache: RwLock::default(),
        }
    }
}

impl<B: Backend> Deref for Engine<B> {
    type Target = B;

    fn deref(&self) -> &B {
        &self.backend
    }
}

impl<B: Backend> Engine<B> {
    pub fn new(backend: B) -> Self {
        Self {
            backend,
            dim_cap: DEFAULT_DIM_CAP,
            budget: DEFAULT_BUDGET,
            cache: RwLock::default(),
        }
    }

    pub fn with_limits(backend: B, dim_cap: usize, budget: u64) -> Self {
        Self {
            dim_cap,
            budget,
            ..Self::new(backend)
        }
    }

    pub fn backend(&self) -> &B {
        &self.backend
    }

    pub fn check_cap(&self, what: impl FnOnce() -> String, predicted: usize) -> Result<()> {
        if predicted > self.dim_cap {
            return Err(Error::DimensionBlowup {
                what: what(),
                predicted,
                cap: self.dim_cap,
            });
        }
        Ok(())
    }

    pub fn difference(&self, x: &B::Obj) -> Result<Arc<DifferenceBundle<B>>> {
        if let Some(b) = self.cache.read().expect("cache lock").get(x) {
            return Ok(b.clone());
        }
        let b = &self.backend;
        self.check_cap(|| "D(X)".into(), b.predicted_difference_dim(x))?;
        let cop = b.coproduct_of(x, x);
        self.check_cap(|| "X + X".into(), b.dim(&cop.object))?;
        let id = b.identity(x);
        let nabla = b.copair(&cop, &id, &id);
        let (d, delta) = match b.difference_shortcut(x) {
            Some((d, m)) => {
                let delta = b.mor(&d, &cop.object, m);
                (d, delta)
            }
            None => {
                let k = b.kernel(&nabla);
                (k.object, k.inclusion)
            }
        };
        let sigma = b.compose(&b.copair(&cop, &id, &b.zero_morphism(x, x)), &delta);
        let delta_solver = b.solver(&delta);
        let bundle = Arc::new(DifferenceBundle {
            object: x.clone(),
            d,
            coproduct: cop,
            delta,
            nabla,
            sigma,
            delta_solver,
        });
        self.cache
            .write()
            .expect("cache lock")
            .insert(x.clone(), bundle.clone());
        Ok(bundle)
    }

    pub fn d_object(&self, x: &B::Obj) -> Result<B::Obj> {
        Ok(self.difference(x)?.d.clone())
    }

    /// `Dⁿ(X)`.
    pub fn d_power(&self, x: &B::Obj, n: usize) -> Result<B::Obj> {
        let mut cur = x.clone();
        for _ in 0..n {
            cur = self.d_object(&cur)?;
        }
        Ok(cur)
    }

    /// `f − g = ⟨f, g⟩∘δ : D(X) → Y`.
    pub fn approx_difference(&self, f: &Morphism<B>, g: &Morphism<B>) -> Result<Morphism<B>> {
        if f.dom != g.dom || f.cod != g.cod {
            return Err(Error::NotParallel(
                "approximate difference of non-parallel morphisms".into(),
            ));
        }
        let bundle = self.difference(&f.dom)?;
        Ok(self.compose(&self.copair(&bundle.coproduct, f, g), &bundle.delta))
    }

    fn factor_through_delta(&self, target: &DifferenceBundle<B>, m: &Morphism<B>) -> Morphism<B> {
        let b = &self.backend;
        let cols: Vec<Vec<Elem<B>>> = m
            .matrix
            .columns()
            .into_iter()
            .map(|c| {
                target
                    .delta_solver
                    .solve(b.ring(), &c)
                    .expect("composite lands in the difference object")
            })
            .collect();
        b.mor(
            &m.dom,
            &target.d,
            Matrix::from_columns(b.dim(&target.d), &cols),
        )
    }

    /// `D(h)`, the unique map with `δ_Y∘D(h) = (h + h)∘δ_X`.
    pub fn d_morphism(&self, h: &Morphism<B>) -> Result<Morphism<B>> {
        let bx = self.difference(&h.dom)?;
        let by = self.difference(&h.cod)?;
        let b = &self.backend;
        let hh = b.copair(
            &bx.coproduct,
            &b.compose(by.iota1(), h),
            &b.compose(by.iota2(), h),
        );
        Ok(self.factor_through_delta(&by, &b.compose(&hh, &bx.delta)))
    }

    pub fn d_morphism_power(&self, h: &Morphism<B>, n: usize) -> Result<Morphism<B>> {
        let mut cur = h.clone();
        for _ in 0..n {
            cur = self.d_morphism(&cur)?;
        }
        Ok(cur)
    }

    pub fn sigma(&self, x: &B::Obj) -> Result<Morphism<B>> {
        Ok(self.difference(x)?.sigma.clone())
    }

    /// `ςⁿ_X = ς_X∘ς_{D(X)}∘…∘ς_{Dⁿ⁻¹(X)} : Dⁿ(X) → X`.
    pub fn sigma_pow(&self, x: &B::Obj, n: usize) -> Result<Morphism<B>> {
        let mut acc = self.identity(x);
        let mut cur = x.clone();
        let mut stages = Vec::with_capacity(n);
        for _ in 0..n {
            let s = self.sigma(&cur)?;
            cur = s.dom.clone();
            stages.push(s);
        }
        for s in &stages {
            acc = self.compose(&acc, s);
        }
        Ok(acc)
    }

    /// The other composite `ς_X∘D(ς_X)∘…∘Dⁿ⁻¹(ς_X)`.
    pub fn sigma_pow_alt(&self, x: &B::Obj, n: usize) -> Result<Morphism<B>> {
        let mut acc = self.identity(x);
        let s = self.sigma(x)?;
        for k in 0..n {
            acc = self.compose(&acc, &self.d_morphism_power(&s, k)?);
        }
        Ok(acc)
    }

    /// Whether `D(ς_X)` and `ς_{D(X)}` coincide as maps `D²(X) → D(X)`. Not natural in general;
    /// callers record the answer rather than rely on it.
    pub fn sigma_commutes_with_d(&self, x: &B::Obj) -> Result<bool> {
        let dx = self.d_object(x)?;
        Ok(self.d_morphism(&self.sigma(x)?)? == self.sigma(&dx)?)
    }

    /// Restriction of `⟨ι₂, ι₁⟩` to `D(X)`.
    pub fn twist(&self, x: &B::Obj) -> Result<Morphism<B>> {
        let bx = self.difference(x)?;
        let swap = self.copair(&bx.coproduct, bx.iota2(), bx.iota1());
        Ok(self.factor_through_delta(&bx, &self.compose(&swap, &bx.delta)))
    }

    /// `f − 0`, which equals `f∘ς`.
    pub fn minus_zero(&self, f: &Morphism<B>) -> Result<Morphism<B>> {
        self.approx_difference(f, &self.zero_morphism(&f.dom, &f.cod))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::lie2::Lie2Backend;
    use crate::backends::module::ModBackend;
    use crate::ring::ResidueRing;

    #[test]
    fn module_difference_is_identity_shaped() {
        let e = Engine::new(ModBackend::new(ResidueRing::new(4).unwrap()));
        let x = e.cyclic_sum_i64(&[2, 0]);
        let b = e.difference(&x).unwrap();
        assert_eq!(b.d, x);
        assert!(e.is_zero_morphism(&e.compose(&b.nabla, &b.delta)));
        assert_eq!(b.sigma, e.identity(&x));
        let tw = e.twist(&x).unwrap();
        assert_eq!(tw, e.mor(&x, &x, e.identity(&x).matrix.neg(e.ring())));
    }

    #[test]
    fn lie_difference_dimensions() {
        let e = Engine::new(Lie2Backend::new(ResidueRing::prime_field(3).unwrap()).unwrap());
        let v2 = e.abelian(2);
        let b = e.difference(&v2).unwrap();
        assert_eq!(e.dim(&b.coproduct.object), 8);
        assert_eq!(e.dim(&b.d), 6);
        let zero = e.zero_object();
        assert_eq!(e.dim(&e.d_object(&zero).unwrap()), 0);
        let tw = e.twist(&v2).unwrap();
        assert_eq!(e.compose(&tw, &tw), e.identity(&b.d));
    }

    #[test]
    fn sigma_square_composites_agree_on_a1() {
        let e = Engine::new(Lie2Backend::new(ResidueRing::prime_field(3).unwrap()).unwrap());
        let a1 = e.abelian(1);
        assert_eq!(
            e.sigma_pow(&a1, 2).unwrap(),
            e.sigma_pow_alt(&a1, 2).unwrap()
        );
        assert!(e.is_regular_epi(&e.sigma(&a1).unwrap()));
    }

    #[test]
    fn sigma_against_d_sigma() {
        let m = Engine::new(ModBackend::new(ResidueRing::new(4).unwrap()));
        assert!(m.sigma_commutes_with_d(&m.cyclic_sum_i64(&[2, 0])).unwrap());
        // Over lie2 the two maps already differ on the one-dimensional algebra.
        let e = Engine::new(Lie2Backend::new(ResidueRing::prime_field(3).unwrap()).unwrap());
        let found: Vec<bool> = [e.abelian(1), e.abelian(2), e.heisenberg()]
            .iter()
            .map(|x| e.sigma_commutes_with_d(x).unwrap())
            .collect();
        assert_eq!(found, [false, false, false]);
    }

    #[test]
    fn blowup_is_reported() {
        let e = Engine::with_limits(
            Lie2Backend::new(ResidueRing::prime_field(3).unwrap()).unwrap(),
            10,
            100,
        );
        let v3 = e.abelian(3);
        assert!(matches!(
            e.difference(&v3),
            Err(Error::DimensionBlowup { predicted: 12, .. })
        ));
    }
}
