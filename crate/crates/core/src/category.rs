//! Backend-agnostic pointed-category constructions.
//!
//! A [`Backend`] supplies a handful of primitives (carriers, subobjects,
//! quotients, coproducts, free objects, extension from generators); the
//! blanket [`Category`] trait derives kernels, cokernels, images, pullbacks,
//! liftings and covers from them. Every object has a carrier `R^n` modulo a
//! diagonal torsion lattice and every morphism is a matrix between carriers.

use std::fmt::Debug;
use std::hash::Hash;

use rand::RngCore;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::{reduce_mod, Echelon, Solver};
use crate::matrix::Matrix;
use crate::ring::Ring;

pub type Elem<B> = <<B as Backend>::R as Ring>::Elem;
pub type Mat<B> = Matrix<Elem<B>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Mod,
    Lie2,
}

impl BackendKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BackendKind::Mod => "mod",
            BackendKind::Lie2 => "lie2",
        }
    }
}

/// Isomorphism invariants used to compare objects across pipelines.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Fingerprint {
    Module {
        invariant_factors: Vec<String>,
    },
    Lie {
        dim: usize,
        commutator_dim: usize,
        center_dim: usize,
        pencil: Vec<usize>,
    },
}

impl Fingerprint {
    pub fn is_zero(&self) -> bool {
        match self {
            Fingerprint::Module { invariant_factors } => invariant_factors.is_empty(),
            Fingerprint::Lie { dim, .. } => *dim == 0,
        }
    }
}

/// Bounded search result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Search<T> {
    Found(T),
    /// The whole candidate space was explored.
    None {
        explored: u64,
    },
    /// The budget ran out first.
    Unknown {
        explored: u64,
    },
}

impl<T> Search<T> {
    pub fn found(&self) -> Option<&T> {
        match self {
            Search::Found(t) => Some(t),
            _ => None,
        }
    }

    pub fn into_found(self) -> Option<T> {
        match self {
            Search::Found(t) => Some(t),
            _ => None,
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Search<U> {
        match self {
            Search::Found(t) => Search::Found(f(t)),
            Search::None { explored } => Search::None { explored },
            Search::Unknown { explored } => Search::Unknown { explored },
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Search::Found(_) => "found",
            Search::None { .. } => "none",
            Search::Unknown { .. } => "unknown",
        }
    }

    pub fn explored(&self) -> Option<u64> {
        match self {
            Search::Found(_) => None,
            Search::None { explored } | Search::Unknown { explored } => Some(*explored),
        }
    }
}

/// Primitive operations a concrete category must provide.
pub trait Backend: Clone + Debug + PartialEq + Eq + Hash + Send + Sync + 'static {
    type R: Ring;
    type Obj: Clone + Debug + PartialEq + Eq + Hash + Send + Sync + 'static;

    fn ring(&self) -> &Self::R;
    fn kind(&self) -> BackendKind;
    /// Number of carrier coordinates.
    fn dim(&self, x: &Self::Obj) -> usize;
    /// Torsion coefficient of each carrier coordinate; zero for a free coordinate.
    fn torsion(&self, x: &Self::Obj) -> Vec<Elem<Self>>;
    fn zero_object(&self) -> Self::Obj;
    fn validate_object(&self, x: &Self::Obj) -> std::result::Result<(), String>;
    /// Structure preservation of a matrix already reduced modulo the codomain torsion.
    fn check_structure(
        &self,
        dom: &Self::Obj,
        cod: &Self::Obj,
        m: &Mat<Self>,
    ) -> std::result::Result<(), String>;
    /// Subobject carried by the span of `gens`, which must be closed.
    fn subobject(&self, x: &Self::Obj, gens: &[Vec<Elem<Self>>]) -> Result<(Self::Obj, Mat<Self>)>;
    /// Generators of the smallest normal subobject containing `gens`.
    fn normal_closure(&self, x: &Self::Obj, gens: &[Vec<Elem<Self>>]) -> Vec<Vec<Elem<Self>>>;
    /// Quotient by the normal closure of `gens`, with its projection matrix.
    fn quotient(&self, x: &Self::Obj, gens: &[Vec<Elem<Self>>]) -> (Self::Obj, Mat<Self>);
    /// Product with componentwise structure; carrier is `x` then `y`.
    fn product(&self, x: &Self::Obj, y: &Self::Obj) -> Self::Obj;
    /// Binary coproduct; carrier starts with `x` then `y`, so injections are block inclusions.
    fn coproduct(&self, x: &Self::Obj, y: &Self::Obj) -> Self::Obj;
    /// Matrix of the copairing of `f: x → z` and `g: y → z`.
    fn couniv(
        &self,
        x: &Self::Obj,
        y: &Self::Obj,
        z: &Self::Obj,
        f: &Mat<Self>,
        g: &Mat<Self>,
    ) -> Mat<Self>;
    fn free_object(&self, n: usize) -> Self::Obj;
    /// Generator count when `x` is literally a free object.
    fn free_rank(&self, x: &Self::Obj) -> Option<usize>;
    /// Carrier vectors whose images determine any morphism out of `x`.
    fn generators(&self, x: &Self::Obj) -> Vec<Vec<Elem<Self>>>;
    /// Extends images of [`Backend::generators`] to a morphism, if consistent.
    fn extend(&self, x: &Self::Obj, y: &Self::Obj, images: &[Vec<Elem<Self>>])
        -> Option<Mat<Self>>;
    /// Searches for `g` with `e∘g = target`.
    fn find_lift(
        &self,
        target: &Morphism<Self>,
        e: &Morphism<Self>,
        budget: u64,
    ) -> Search<Mat<Self>>;
    fn fingerprint(&self, x: &Self::Obj) -> Fingerprint;
    /// Random object with at most `size` generators.
    fn sample_object(&self, rng: &mut dyn RngCore, size: usize) -> Self::Obj;
    fn sample_matrix(&self, rng: &mut dyn RngCore, x: &Self::Obj, y: &Self::Obj) -> Mat<Self>;
    /// Predicted carrier dimension of `D(x)`.
    fn predicted_difference_dim(&self, x: &Self::Obj) -> usize;
    /// Closed form for `D(x)` and `δ`, when the backend has one.
    fn difference_shortcut(&self, _x: &Self::Obj) -> Option<(Self::Obj, Mat<Self>)> {
        None
    }
    fn object_to_json(&self, x: &Self::Obj) -> Value;
    fn object_from_json(&self, v: &Value) -> Result<Self::Obj>;
}

/// A morphism with its canonical matrix (columns reduced modulo codomain torsion).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Morphism<B: Backend> {
    pub dom: B::Obj,
    pub cod: B::Obj,
    pub matrix: Mat<B>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normality {
    Normal,
    Plain,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subobject<B: Backend> {
    pub object: B::Obj,
    pub inclusion: Morphism<B>,
    pub normality: Normality,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coproduct<B: Backend> {
    pub object: B::Obj,
    pub left: B::Obj,
    pub right: B::Obj,
    pub iota1: Morphism<B>,
    pub iota2: Morphism<B>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Product<B: Backend> {
    pub object: B::Obj,
    pub pi1: Morphism<B>,
    pub pi2: Morphism<B>,
}

/// Pullback of `f: A → C` and `g: B → C`; `f∘p_g = g∘p_f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pullback<B: Backend> {
    pub object: B::Obj,
    /// Base change of `f`, landing in `dom g`.
    pub p_f: Morphism<B>,
    /// Base change of `g`, landing in `dom f`.
    pub p_g: Morphism<B>,
    /// Inclusion into `A × B`.
    pub inclusion: Morphism<B>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FreenessWitness<B: Backend> {
    Free {
        generators: usize,
    },
    RetractOfFree {
        free: B::Obj,
        retraction: Morphism<B>,
        section: Morphism<B>,
    },
    None,
}

impl<B: Backend> FreenessWitness<B> {
    pub fn label(&self) -> &'static str {
        match self {
            FreenessWitness::Free { .. } => "free",
            FreenessWitness::RetractOfFree { .. } => "retract-of-free",
            FreenessWitness::None => "none",
        }
    }

    pub fn is_projective(&self) -> bool {
        !matches!(self, FreenessWitness::None)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cover<B: Backend> {
    pub object: B::Obj,
    pub epi: Morphism<B>,
    pub witness: FreenessWitness<B>,
}

#[derive(Clone, Debug)]
pub struct MorphismFlags<B: Backend> {
    pub mono: bool,
    pub regular_epi: bool,
    pub split_epi: Search<Morphism<B>>,
    pub proper: bool,
    pub normal_mono: bool,
}

#[derive(Clone, Debug)]
pub struct ShortExactSequence<B: Backend> {
    pub k: Morphism<B>,
    pub f: Morphism<B>,
    pub section: Option<Morphism<B>>,
}

fn unit_vec<R: Ring>(ring: &R, n: usize, i: usize) -> Vec<R::Elem> {
    (0..n)
        .map(|j| if i == j { ring.one() } else { ring.zero() })
        .collect()
}

/// Constructions derived from the primitives; implemented for every backend.
pub trait Category: Backend {
    fn canonical(&self, cod: &Self::Obj, mut m: Mat<Self>) -> Mat<Self> {
        let t = self.torsion(cod);
        if t.iter().all(|x| self.ring().is_zero(x)) {
            return m;
        }
        for j in 0..m.cols() {
            let mut c = m.column(j);
            reduce_mod(self.ring(), &mut c, &t);
            for (i, x) in c.into_iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    /// Canonicalizes without structure checks; for matrices known to be morphisms.
    fn mor(&self, dom: &Self::Obj, cod: &Self::Obj, m: Mat<Self>) -> Morphism<Self> {
        assert_eq!(
            m.shape(),
            (self.dim(cod), self.dim(dom)),
            "matrix shape does not match objects"
        );
        Morphism {
            dom: dom.clone(),
            cod: cod.clone(),
            matrix: self.canonical(cod, m),
        }
    }

    /// Checked constructor.
    fn morphism(&self, dom: &Self::Obj, cod: &Self::Obj, m: Mat<Self>) -> Result<Morphism<Self>> {
        if m.shape() != (self.dim(cod), self.dim(dom)) {
            return Err(Error::Shape(format!(
                "matrix is {:?}, objects need {:?}",
                m.shape(),
                (self.dim(cod), self.dim(dom))
            )));
        }
        let f = self.mor(dom, cod, m);
        self.validate_morphism(&f).map_err(Error::InvalidMorphism)?;
        Ok(f)
    }

    /// Well-definedness on torsion plus structure preservation.
    fn validate_morphism(&self, f: &Morphism<Self>) -> std::result::Result<(), String> {
        let r = self.ring();
        let td = self.torsion(&f.dom);
        let tc = self.torsion(&f.cod);
        for (j, t) in td.iter().enumerate() {
            if r.is_zero(t) {
                continue;
            }
            let mut c: Vec<_> = f.matrix.column(j).iter().map(|x| r.mul(t, x)).collect();
            reduce_mod(r, &mut c, &tc);
            if c.iter().any(|x| !r.is_zero(x)) {
                return Err(format!(
                    "generator {j} of the domain has torsion not respected by the image"
                ));
            }
        }
        self.check_structure(&f.dom, &f.cod, &f.matrix)
    }

    fn identity(&self, x: &Self::Obj) -> Morphism<Self> {
        Morphism {
            dom: x.clone(),
            cod: x.clone(),
            matrix: self.canonical(x, Matrix::identity(self.ring(), self.dim(x))),
        }
    }

    fn zero_morphism(&self, x: &Self::Obj, y: &Self::Obj) -> Morphism<Self> {
        Morphism {
            dom: x.clone(),
            cod: y.clone(),
            matrix: Matrix::zeros(self.ring(), self.dim(y), self.dim(x)),
        }
    }

    /// `g∘f`.
    fn compose(&self, g: &Morphism<Self>, f: &Morphism<Self>) -> Morphism<Self> {
        assert_eq!(f.cod, g.dom, "composition of non-composable morphisms");
        Morphism {
            dom: f.dom.clone(),
            cod: g.cod.clone(),
            matrix: self.canonical(&g.cod, g.matrix.mul(self.ring(), &f.matrix)),
        }
    }

    fn compose_all(&self, maps: &[&Morphism<Self>]) -> Morphism<Self> {
        let mut it = maps.iter().rev();
        let first = (*it.next().expect("empty composite")).clone();
        it.fold(first, |acc, g| self.compose(g, &acc))
    }

    fn is_zero_morphism(&self, f: &Morphism<Self>) -> bool {
        f.matrix.is_zero(self.ring())
    }

    fn is_zero_object(&self, x: &Self::Obj) -> bool {
        self.dim(x) == 0
    }

    fn solver(&self, f: &Morphism<Self>) -> Solver<Elem<Self>> {
        Solver::new(self.ring(), &f.matrix, &self.torsion(&f.cod))
    }

    /// Carrier span of the image together with the codomain torsion lattice.
    fn span_echelon(&self, x: &Self::Obj, gens: &[Vec<Elem<Self>>]) -> Echelon<Elem<Self>> {
        let r = self.ring();
        let n = self.dim(x);
        let t = self.torsion(x);
        let mut rows: Vec<Vec<Elem<Self>>> = gens.to_vec();
        for (i, ti) in t.iter().enumerate() {
            if !r.is_zero(ti) {
                let mut v = vec![r.zero(); n];
                v[i] = ti.clone();
                rows.push(v);
            }
        }
        Echelon::new(r, n, rows)
    }

    /// Kernel generators as carrier vectors of the domain.
    fn kernel_vectors(&self, f: &Morphism<Self>) -> Vec<Vec<Elem<Self>>> {
        let r = self.ring();
        let td = self.torsion(&f.dom);
        self.solver(f)
            .kernel()
            .into_iter()
            .map(|mut v| {
                reduce_mod(r, &mut v, &td);
                v
            })
            .filter(|v| v.iter().any(|x| !r.is_zero(x)))
            .collect()
    }

    fn kernel(&self, f: &Morphism<Self>) -> Subobject<Self> {
        let gens = self.kernel_vectors(f);
        let (obj, m) = self
            .subobject(&f.dom, &gens)
            .expect("kernels are closed subobjects");
        Subobject {
            inclusion: self.mor(&obj, &f.dom, m),
            object: obj,
            normality: Normality::Normal,
        }
    }

    fn image_vectors(&self, f: &Morphism<Self>) -> Vec<Vec<Elem<Self>>> {
        f.matrix.columns()
    }

    fn is_normal_span(&self, x: &Self::Obj, gens: &[Vec<Elem<Self>>]) -> bool {
        let ech = self.span_echelon(x, gens);
        self.normal_closure(x, gens)
            .iter()
            .all(|v| ech.contains(self.ring(), v))
    }

    /// Regular epi followed by a mono; the mono's normality is computed.
    fn image_factorization(&self, f: &Morphism<Self>) -> (Morphism<Self>, Subobject<Self>) {
        let gens = self.image_vectors(f);
        let (obj, m) = self
            .subobject(&f.cod, &gens)
            .expect("images are closed subobjects");
        let inclusion = self.mor(&obj, &f.cod, m);
        let epi = self
            .factor_through_mono(f, &inclusion)
            .expect("f factors through its image");
        let normality = if self.is_normal_span(&f.cod, &gens) {
            Normality::Normal
        } else {
            Normality::Plain
        };
        (
            epi,
            Subobject {
                object: obj,
                inclusion,
                normality,
            },
        )
    }

    fn cokernel(&self, f: &Morphism<Self>) -> Morphism<Self> {
        let (obj, m) = self.quotient(&f.cod, &self.image_vectors(f));
        self.mor(&f.cod, &obj, m)
    }

    fn is_mono(&self, f: &Morphism<Self>) -> bool {
        self.kernel_vectors(f).is_empty()
    }

    fn is_regular_epi(&self, f: &Morphism<Self>) -> bool {
        let n = self.dim(&f.cod);
        let ech = self.span_echelon(&f.cod, &self.image_vectors(f));
        (0..n).all(|i| ech.contains(self.ring(), &unit_vec(self.ring(), n, i)))
    }

    fn is_iso(&self, f: &Morphism<Self>) -> bool {
        self.is_mono(f) && self.is_regular_epi(f)
    }

    fn is_proper(&self, f: &Morphism<Self>) -> bool {
        self.is_normal_span(&f.cod, &self.image_vectors(f))
    }

    /// Same carrier span (modulo torsion) of two families in `x`.
    fn same_span(&self, x: &Self::Obj, a: &[Vec<Elem<Self>>], b: &[Vec<Elem<Self>>]) -> bool {
        let ea = self.span_echelon(x, a);
        let eb = self.span_echelon(x, b);
        ea.contains_all(self.ring(), &eb) && eb.contains_all(self.ring(), &ea)
    }

    /// The unique `u` with `m∘u = g`, for `m` mono.
    fn factor_through_mono(
        &self,
        g: &Morphism<Self>,
        m: &Morphism<Self>,
    ) -> Result<Morphism<Self>> {
        if g.cod != m.cod {
            return Err(Error::NotFactorizable("codomains differ".into()));
        }
        let s = self.solver(m);
        let mut cols = Vec::with_capacity(self.dim(&g.dom));
        for (j, c) in g.matrix.columns().into_iter().enumerate() {
            let x = s
                .solve(self.ring(), &c)
                .ok_or_else(|| Error::NotFactorizable(format!("column {j} is not in the image")))?;
            cols.push(x);
        }
        Ok(self.mor(
            &g.dom,
            &m.dom,
            Matrix::from_columns(self.dim(&m.dom), &cols),
        ))
    }

    /// The unique `u` with `u∘q = m`, for `q` a regular epi.
    fn factor_through_epi(&self, m: &Morphism<Self>, q: &Morphism<Self>) -> Result<Morphism<Self>> {
        if m.dom != q.dom {
            return Err(Error::NotFactorizable("domains differ".into()));
        }
        let s = self.solver(q);
        let n = self.dim(&q.cod);
        let mut cols = Vec::with_capacity(n);
        for i in 0..n {
            let pre = s
                .solve(self.ring(), &unit_vec(self.ring(), n, i))
                .ok_or_else(|| Error::NotFactorizable("epimorphism is not surjective".into()))?;
            cols.push(m.matrix.apply(self.ring(), &pre));
        }
        let u = self.mor(
            &q.cod,
            &m.cod,
            Matrix::from_columns(self.dim(&m.cod), &cols),
        );
        if self.compose(&u, q) != *m {
            return Err(Error::NotFactorizable(
                "kernel of the epimorphism is not killed".into(),
            ));
        }
        Ok(u)
    }

    fn coproduct_of(&self, x: &Self::Obj, y: &Self::Obj) -> Coproduct<Self> {
        let obj = self.coproduct(x, y);
        let (nx, ny, n) = (self.dim(x), self.dim(y), self.dim(&obj));
        let r = self.ring();
        let i1 = Matrix::from_fn(n, nx, |i, j| if i == j { r.one() } else { r.zero() });
        let i2 = Matrix::from_fn(n, ny, |i, j| if i == j + nx { r.one() } else { r.zero() });
        Coproduct {
            iota1: self.mor(x, &obj, i1),
            iota2: self.mor(y, &obj, i2),
            left: x.clone(),
            right: y.clone(),
            object: obj,
        }
    }

    fn copair(
        &self,
        cop: &Coproduct<Self>,
        f: &Morphism<Self>,
        g: &Morphism<Self>,
    ) -> Morphism<Self> {
        assert_eq!(f.cod, g.cod, "copairing needs a common codomain");
        assert_eq!(
            (&f.dom, &g.dom),
            (&cop.left, &cop.right),
            "copairing domains mismatch"
        );
        let m = self.couniv(&cop.left, &cop.right, &f.cod, &f.matrix, &g.matrix);
        self.mor(&cop.object, &f.cod, m)
    }

    fn product_of(&self, x: &Self::Obj, y: &Self::Obj) -> Product<Self> {
        let obj = self.product(x, y);
        let (nx, ny) = (self.dim(x), self.dim(y));
        let r = self.ring();
        let p1 = Matrix::from_fn(nx, nx + ny, |i, j| if i == j { r.one() } else { r.zero() });
        let p2 = Matrix::from_fn(
            ny,
            nx + ny,
            |i, j| if j == i + nx { r.one() } else { r.zero() },
        );
        Product {
            pi1: self.mor(&obj, x, p1),
            pi2: self.mor(&obj, y, p2),
            object: obj,
        }
    }

    fn pairing(
        &self,
        prod: &Product<Self>,
        f: &Morphism<Self>,
        g: &Morphism<Self>,
    ) -> Morphism<Self> {
        assert_eq!(f.dom, g.dom, "pairing needs a common domain");
        self.mor(&f.dom, &prod.object, f.matrix.vstack(&g.matrix))
    }

    /// `{a : f(a) = g(a)}`.
    fn equalizer(&self, f: &Morphism<Self>, g: &Morphism<Self>) -> Result<Subobject<Self>> {
        if f.dom != g.dom || f.cod != g.cod {
            return Err(Error::NotParallel("equalizer of non-parallel maps".into()));
        }
        let diff = Morphism::<Self> {
            dom: f.dom.clone(),
            cod: f.cod.clone(),
            matrix: f.matrix.sub(self.ring(), &g.matrix),
        };
        let gens = self.kernel_vectors(&diff);
        let (obj, m) = self.subobject(&f.dom, &gens)?;
        Ok(Subobject {
            inclusion: self.mor(&obj, &f.dom, m),
            object: obj,
            normality: Normality::Unknown,
        })
    }

    fn pullback(&self, f: &Morphism<Self>, g: &Morphism<Self>) -> Result<Pullback<Self>> {
        if f.cod != g.cod {
            return Err(Error::NotParallel(
                "pullback needs a common codomain".into(),
            ));
        }
        let prod = self.product_of(&f.dom, &g.dom);
        let eq = self.equalizer(&self.compose(f, &prod.pi1), &self.compose(g, &prod.pi2))?;
        Ok(Pullback {
            object: eq.object.clone(),
            p_g: self.compose(&prod.pi1, &eq.inclusion),
            p_f: self.compose(&prod.pi2, &eq.inclusion),
            inclusion: eq.inclusion,
        })
    }

    /// Mediating map into a pullback from a commuting pair `a: T → dom f`, `b: T → dom g`.
    fn pullback_pair(
        &self,
        pb: &Pullback<Self>,
        a: &Morphism<Self>,
        b: &Morphism<Self>,
    ) -> Result<Morphism<Self>> {
        let pair = Morphism::<Self> {
            dom: a.dom.clone(),
            cod: pb.inclusion.cod.clone(),
            matrix: a.matrix.vstack(&b.matrix),
        };
        self.factor_through_mono(&pair, &pb.inclusion)
    }

    fn free(&self, n: usize) -> (Self::Obj, FreenessWitness<Self>) {
        (self.free_object(n), FreenessWitness::Free { generators: n })
    }

    /// Morphism out of a free object determined by generator images.
    fn free_extend(&self, n: usize, cod: &Self::Obj, images: &[Vec<Elem<Self>>]) -> Morphism<Self> {
        let p = self.free_object(n);
        let m = self
            .extend(&p, cod, images)
            .expect("free objects extend any generator images");
        self.mor(&p, cod, m)
    }

    /// Free object on the canonical generators of `x`, mapping onto it.
    fn projective_cover(&self, x: &Self::Obj) -> Cover<Self> {
        if let Some(n) = self.free_rank(x) {
            return Cover {
                object: x.clone(),
                epi: self.identity(x),
                witness: FreenessWitness::Free { generators: n },
            };
        }
        let gens = self.generators(x);
        let epi = self.free_extend(gens.len(), x, &gens);
        Cover {
            object: epi.dom.clone(),
            epi,
            witness: FreenessWitness::Free {
                generators: gens.len(),
            },
        }
    }

    fn find_section(&self, e: &Morphism<Self>, budget: u64) -> Search<Morphism<Self>> {
        let id = self.identity(&e.cod);
        self.find_lift(&id, e, budget)
            .map(|m| self.mor(&e.cod, &e.dom, m))
    }

    /// Freeness witness, certifying projectivity by a section of the canonical cover.
    fn projectivity_witness(
        &self,
        x: &Self::Obj,
        budget: u64,
    ) -> (FreenessWitness<Self>, Search<()>) {
        if let Some(n) = self.free_rank(x) {
            return (FreenessWitness::Free { generators: n }, Search::Found(()));
        }
        let cover = self.projective_cover(x);
        match self.find_section(&cover.epi, budget) {
            Search::Found(s) => (
                FreenessWitness::RetractOfFree {
                    free: cover.object,
                    retraction: cover.epi,
                    section: s,
                },
                Search::Found(()),
            ),
            other => (FreenessWitness::None, other.map(|_| ())),
        }
    }

    fn validate_witness(&self, x: &Self::Obj, w: &FreenessWitness<Self>) -> bool {
        match w {
            FreenessWitness::Free { generators } => self.free_rank(x) == Some(*generators),
            FreenessWitness::RetractOfFree {
                free,
                retraction,
                section,
            } => {
                self.free_rank(free).is_some()
                    && retraction.cod == *x
                    && section.dom == *x
                    && self.compose(retraction, section) == self.identity(x)
            }
            FreenessWitness::None => true,
        }
    }

    /// `g` with `e∘g = f`, guided by a projectivity witness of `dom f`.
    fn lift_through_regular_epi(
        &self,
        f: &Morphism<Self>,
        e: &Morphism<Self>,
        witness: &FreenessWitness<Self>,
        budget: u64,
    ) -> Result<Morphism<Self>> {
        if f.cod != e.cod {
            return Err(Error::NotFactorizable(
                "lift target and epimorphism disagree on codomain".into(),
            ));
        }
        match witness {
            FreenessWitness::Free { .. } if self.free_rank(&f.dom).is_some() => {
                let s = self.solver(e);
                let mut images = Vec::new();
                for g in self.generators(&f.dom) {
                    let y = f.matrix.apply(self.ring(), &g);
                    let x = s.solve(self.ring(), &y).ok_or_else(|| {
                        Error::NotFactorizable("epimorphism is not surjective".into())
                    })?;
                    images.push(x);
                }
                let m = self
                    .extend(&f.dom, &e.dom, &images)
                    .expect("free objects extend any generator images");
                let g = self.mor(&f.dom, &e.dom, m);
                debug_assert_eq!(self.compose(e, &g), *f);
                Ok(g)
            }
            FreenessWitness::RetractOfFree {
                free,
                retraction,
                section,
            } if retraction.cod == f.dom => {
                let wf = FreenessWitness::Free {
                    generators: self.free_rank(free).unwrap_or(0),
                };
                let g =
                    self.lift_through_regular_epi(&self.compose(f, retraction), e, &wf, budget)?;
                Ok(self.compose(&g, section))
            }
            _ => match self.find_lift(f, e, budget) {
                Search::Found(m) => Ok(self.mor(&f.dom, &e.dom, m)),
                Search::None { explored } => Err(Error::LiftNotFound {
                    explored,
                    exhausted: true,
                }),
                Search::Unknown { explored } => Err(Error::LiftNotFound {
                    explored,
                    exhausted: false,
                }),
            },
        }
    }

    fn classify_morphism(&self, f: &Morphism<Self>, budget: u64) -> MorphismFlags<Self> {
        let mono = self.is_mono(f);
        let regular_epi = self.is_regular_epi(f);
        let split_epi = if regular_epi {
            self.find_section(f, budget)
        } else {
            Search::None { explored: 0 }
        };
        let proper = self.is_proper(f);
        MorphismFlags {
            mono,
            regular_epi,
            split_epi,
            proper,
            normal_mono: mono && proper,
        }
    }

    /// Sum of two parallel morphisms' matrices; only meaningful in additive backends.
    fn add_matrices(&self, f: &Morphism<Self>, g: &Morphism<Self>) -> Morphism<Self> {
        self.mor(&f.dom, &f.cod, f.matrix.add(self.ring(), &g.matrix))
    }

    fn sample_morphism(
        &self,
        rng: &mut dyn RngCore,
        x: &Self::Obj,
        y: &Self::Obj,
    ) -> Morphism<Self> {
        let m = self.sample_matrix(rng, x, y);
        self.mor(x, y, m)
    }

    fn morphism_to_json(&self, f: &Morphism<Self>) -> Value {
        serde_json::json!({
            "dom": self.object_to_json(&f.dom),
            "cod": self.object_to_json(&f.cod),
            "matrix": f.matrix.to_json(self.ring()),
        })
    }
}

impl<B: Backend> Category for B {}

/// Generic bounded search for `g: P → X` with `e∘g = target`.
///
/// Linear constraints are solved first; the affine space of remaining choices
/// for the generator images is enumerated in lexicographic order and each
/// candidate is tested with [`Backend::extend`].
pub fn enumerate_lift<B: Backend>(
    b: &B,
    target: &Morphism<B>,
    e: &Morphism<B>,
    budget: u64,
) -> Search<Mat<B>> {
    let r = b.ring();
    if budget == 0 {
        return Search::Unknown { explored: 0 };
    }
    let s = b.solver(e);
    let gens = b.generators(&target.dom);
    let mut base = Vec::with_capacity(gens.len());
    for g in &gens {
        let y = target.matrix.apply(r, g);
        match s.solve(r, &y) {
            Some(x) => base.push(x),
            None => return Search::None { explored: 0 },
        }
    }
    let kernel = b.kernel_vectors(e);
    let slots = gens.len() * kernel.len();
    let check = |images: &[Vec<Elem<B>>]| -> Option<Mat<B>> {
        let m = b.extend(&target.dom, &e.dom, images)?;
        let g = b.mor(&target.dom, &e.dom, m);
        (b.compose(e, &g) == *target).then_some(g.matrix)
    };
    let Some(elements) = r.elements() else {
        return match check(&base) {
            Some(m) => Search::Found(m),
            None if slots == 0 => Search::None { explored: 1 },
            None => Search::Unknown { explored: 1 },
        };
    };
    let q = elements.len() as u64;
    let total = u32::try_from(slots).ok().and_then(|s| q.checked_pow(s));
    let limit = total.map_or(budget, |t| t.min(budget));
    let mut digits = vec![0usize; slots];
    let mut explored = 0u64;
    while explored < limit {
        let mut images = base.clone();
        for (gi, img) in images.iter_mut().enumerate() {
            for (ki, kv) in kernel.iter().enumerate() {
                let c = &elements[digits[gi * kernel.len() + ki]];
                if r.is_zero(c) {
                    continue;
                }
                for (a, k) in img.iter_mut().zip(kv) {
                    *a = r.add(a, &r.mul(c, k));
                }
            }
        }
        explored += 1;
        if let Some(m) = check(&images) {
            return Search::Found(m);
        }
        for d in digits.iter_mut().rev() {
            *d += 1;
            if *d < elements.len() {
                break;
            }
            *d = 0;
        }
    }
    match total {
        Some(t) if t <= budget => Search::None { explored },
        _ => Search::Unknown { explored },
    }
}
