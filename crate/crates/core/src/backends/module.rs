//! Finitely generated modules over a principal ideal ring.
//!
//! Objects are diagonal presentations `⊕ R/(d_i)` with each `d_i` a canonical
//! non-unit (zero for a free summand). Direct sums concatenate, so the list is
//! not required to be a divisibility chain; [`ModBackend::invariant_factors`]
//! recovers the canonical one.

use std::sync::Arc;

use rand::{Rng, RngCore};
use serde_json::{json, Value};

use crate::category::{Backend, BackendKind, Category, Elem, Fingerprint, Mat, Morphism, Search};
use crate::error::{Error, Result};
use crate::linalg::{invariant_factors, reduce_mod, smith, Echelon, Solver};
use crate::matrix::Matrix;
use crate::ring::{CoefficientDomain, Ring};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModObject<E> {
    torsion: Arc<[E]>,
}

impl<E: Clone> ModObject<E> {
    pub fn torsion(&self) -> &[E] {
        &self.torsion
    }

    pub fn rank(&self) -> usize {
        self.torsion.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModBackend<R: Ring> {
    ring: R,
}

/// A presentation brought to canonical form, with the comparison maps.
#[derive(Clone, Debug)]
pub struct Presented<E> {
    pub object: ModObject<E>,
    /// Raw generators to canonical generators.
    pub projection: Matrix<E>,
    /// Canonical generators as raw generator combinations.
    pub lift: Matrix<E>,
}

impl<R: Ring> ModBackend<R> {
    pub fn new(ring: R) -> Self {
        Self { ring }
    }

    /// Object from arbitrary torsion coefficients, normalized.
    pub fn cyclic_sum(&self, torsion: &[R::Elem]) -> ModObject<R::Elem> {
        let n = torsion.len();
        let rel = Matrix::from_fn(n, n, |i, j| {
            if i == j {
                torsion[i].clone()
            } else {
                self.ring.zero()
            }
        });
        self.present(n, &rel.transpose()).object
    }

    /// Convenience for small integer torsion lists.
    pub fn cyclic_sum_i64(&self, torsion: &[i64]) -> ModObject<R::Elem> {
        let t: Vec<_> = torsion.iter().map(|&d| self.ring.from_i64(d)).collect();
        self.cyclic_sum(&t)
    }

    pub fn free_module(&self, n: usize) -> ModObject<R::Elem> {
        self.free_object(n)
    }

    /// Canonical form of `R^rank / (columns of relators)`.
    pub fn present(&self, rank: usize, relators: &Matrix<R::Elem>) -> Presented<R::Elem> {
        assert_eq!(relators.rows(), rank, "relator length must equal rank");
        let r = &self.ring;
        let rel = relators.transpose();
        let s = smith(r, &rel);
        let kept: Vec<usize> = (0..rank).filter(|&i| !r.is_unit(&s.diag[i])).collect();
        let torsion: Vec<R::Elem> = kept.iter().map(|&i| s.diag[i].clone()).collect();
        let projection = Matrix::from_fn(kept.len(), rank, |a, j| s.q.get(j, kept[a]).clone());
        let lift = Matrix::from_fn(rank, kept.len(), |j, a| s.qinv.get(kept[a], j).clone());
        let object = ModObject {
            torsion: torsion.into(),
        };
        let projection = self.canonical(&object, projection);
        Presented {
            object,
            projection,
            lift,
        }
    }

    pub fn invariant_factors(&self, x: &ModObject<R::Elem>) -> Vec<R::Elem> {
        invariant_factors(&self.ring, &x.torsion)
    }

    fn torsion_candidates(&self) -> Vec<R::Elem> {
        let r = &self.ring;
        let mut out = match r.elements() {
            Some(els) => {
                let mut v: Vec<_> = els
                    .iter()
                    .map(|a| r.normalize(a).0)
                    .filter(|a| !r.is_unit(a))
                    .collect();
                v.sort();
                v.dedup();
                v
            }
            None if r.is_field() => vec![r.zero()],
            None => [0, 2, 3, 4, 6].iter().map(|&d| r.from_i64(d)).collect(),
        };
        if out.is_empty() {
            out.push(r.zero());
        }
        out
    }

    fn render_factor(&self, d: &R::Elem) -> String {
        match (self.ring.is_zero(d), self.ring.domain().modulus()) {
            (true, Some(m)) => m.to_string(),
            _ => self.ring.render(d),
        }
    }
}

impl<R: Ring> Backend for ModBackend<R> {
    type R = R;
    type Obj = ModObject<R::Elem>;

    fn ring(&self) -> &R {
        &self.ring
    }

    fn kind(&self) -> BackendKind {
        BackendKind::Mod
    }

    fn dim(&self, x: &Self::Obj) -> usize {
        x.torsion.len()
    }

    fn torsion(&self, x: &Self::Obj) -> Vec<R::Elem> {
        x.torsion.to_vec()
    }

    fn zero_object(&self) -> Self::Obj {
        ModObject {
            torsion: Vec::new().into(),
        }
    }

    fn validate_object(&self, x: &Self::Obj) -> std::result::Result<(), String> {
        for (i, d) in x.torsion.iter().enumerate() {
            if self.ring.normalize(d).0 != *d {
                return Err(format!(
                    "torsion coefficient {i} is not a canonical associate"
                ));
            }
            if self.ring.is_unit(d) {
                return Err(format!("torsion coefficient {i} is a unit"));
            }
        }
        Ok(())
    }

    fn check_structure(
        &self,
        _dom: &Self::Obj,
        _cod: &Self::Obj,
        _m: &Mat<Self>,
    ) -> std::result::Result<(), String> {
        Ok(())
    }

    fn subobject(&self, x: &Self::Obj, gens: &[Vec<R::Elem>]) -> Result<(Self::Obj, Mat<Self>)> {
        let r = &self.ring;
        let n = self.dim(x);
        let ech = self.span_echelon(x, gens);
        let basis: Vec<Vec<R::Elem>> = ech
            .rows()
            .iter()
            .map(|row| {
                let mut v = row.clone();
                reduce_mod(r, &mut v, &x.torsion);
                v
            })
            .filter(|v| v.iter().any(|a| !r.is_zero(a)))
            .collect();
        let k = basis.len();
        if k == 0 {
            return Ok((self.zero_object(), Matrix::zeros(r, n, 0)));
        }
        let w = Matrix::from_columns(n, &basis);
        let rel_rows = Solver::new(r, &w, &x.torsion).kernel();
        let rel = Matrix::from_rows(k, &rel_rows);
        let s = smith(r, &rel);
        let kept: Vec<usize> = (0..k).filter(|&i| !r.is_unit(&s.diag[i])).collect();
        let torsion: Vec<R::Elem> = kept.iter().map(|&i| s.diag[i].clone()).collect();
        let combos = Matrix::from_fn(k, kept.len(), |j, a| s.qinv.get(kept[a], j).clone());
        let incl = w.mul(r, &combos);
        Ok((
            ModObject {
                torsion: torsion.into(),
            },
            incl,
        ))
    }

    fn normal_closure(&self, _x: &Self::Obj, gens: &[Vec<R::Elem>]) -> Vec<Vec<R::Elem>> {
        gens.to_vec()
    }

    fn quotient(&self, x: &Self::Obj, gens: &[Vec<R::Elem>]) -> (Self::Obj, Mat<Self>) {
        let r = &self.ring;
        let n = self.dim(x);
        let mut cols: Vec<Vec<R::Elem>> = gens.to_vec();
        for (i, t) in x.torsion.iter().enumerate() {
            if !r.is_zero(t) {
                let mut v = vec![r.zero(); n];
                v[i] = t.clone();
                cols.push(v);
            }
        }
        let p = self.present(n, &Matrix::from_columns(n, &cols));
        (p.object, p.projection)
    }

    fn product(&self, x: &Self::Obj, y: &Self::Obj) -> Self::Obj {
        let t: Vec<_> = x.torsion.iter().chain(y.torsion.iter()).cloned().collect();
        ModObject { torsion: t.into() }
    }

    fn coproduct(&self, x: &Self::Obj, y: &Self::Obj) -> Self::Obj {
        self.product(x, y)
    }

    fn couniv(
        &self,
        _x: &Self::Obj,
        _y: &Self::Obj,
        _z: &Self::Obj,
        f: &Mat<Self>,
        g: &Mat<Self>,
    ) -> Mat<Self> {
        f.hstack(g)
    }

    fn free_object(&self, n: usize) -> Self::Obj {
        ModObject {
            torsion: vec![self.ring.zero(); n].into(),
        }
    }

    fn free_rank(&self, x: &Self::Obj) -> Option<usize> {
        x.torsion
            .iter()
            .all(|d| self.ring.is_zero(d))
            .then_some(x.torsion.len())
    }

    fn generators(&self, x: &Self::Obj) -> Vec<Vec<R::Elem>> {
        let n = self.dim(x);
        (0..n)
            .map(|i| Matrix::identity(&self.ring, n).column(i))
            .collect()
    }

    fn extend(&self, x: &Self::Obj, y: &Self::Obj, images: &[Vec<R::Elem>]) -> Option<Mat<Self>> {
        let r = &self.ring;
        for (t, v) in x.torsion.iter().zip(images) {
            if r.is_zero(t) {
                continue;
            }
            let mut w: Vec<_> = v.iter().map(|a| r.mul(t, a)).collect();
            reduce_mod(r, &mut w, &y.torsion);
            if w.iter().any(|a| !r.is_zero(a)) {
                return None;
            }
        }
        Some(Matrix::from_columns(self.dim(y), images))
    }

    /// Exact: each generator image solves `e x = y_j` together with `d_j x = 0`.
    fn find_lift(
        &self,
        target: &Morphism<Self>,
        e: &Morphism<Self>,
        budget: u64,
    ) -> Search<Mat<Self>> {
        if budget == 0 {
            return Search::Unknown { explored: 0 };
        }
        let r = &self.ring;
        let nx = self.dim(&e.dom);
        let mut solvers: Vec<(R::Elem, Solver<R::Elem>)> = Vec::new();
        let mut cols = Vec::new();
        for (j, t) in target.dom.torsion.iter().enumerate() {
            let idx = match solvers.iter().position(|(d, _)| d == t) {
                Some(i) => i,
                None => {
                    let stacked = e.matrix.vstack(&Matrix::identity(r, nx).scale(r, t));
                    let tors: Vec<_> = e
                        .cod
                        .torsion
                        .iter()
                        .chain(e.dom.torsion.iter())
                        .cloned()
                        .collect();
                    solvers.push((t.clone(), Solver::new(r, &stacked, &tors)));
                    solvers.len() - 1
                }
            };
            let mut rhs = target.matrix.column(j);
            rhs.extend((0..nx).map(|_| r.zero()));
            match solvers[idx].1.solve(r, &rhs) {
                Some(x) => cols.push(x),
                None => {
                    return Search::None {
                        explored: j as u64 + 1,
                    }
                }
            }
        }
        Search::Found(Matrix::from_columns(nx, &cols))
    }

    fn fingerprint(&self, x: &Self::Obj) -> Fingerprint {
        Fingerprint::Module {
            invariant_factors: self
                .invariant_factors(x)
                .iter()
                .map(|d| self.render_factor(d))
                .collect(),
        }
    }

    fn sample_object(&self, rng: &mut dyn RngCore, size: usize) -> Self::Obj {
        let n = rng.gen_range(0..=size);
        let cands = self.torsion_candidates();
        let t: Vec<_> = (0..n)
            .map(|_| cands[rng.gen_range(0..cands.len())].clone())
            .collect();
        ModObject { torsion: t.into() }
    }

    fn sample_matrix(&self, rng: &mut dyn RngCore, x: &Self::Obj, y: &Self::Obj) -> Mat<Self> {
        let r = &self.ring;
        let m = Matrix::from_fn(self.dim(y), self.dim(x), |i, j| {
            let c = r.colon(&x.torsion[j], &y.torsion[i]);
            r.mul(&c, &r.random(rng))
        });
        self.canonical(y, m)
    }

    fn predicted_difference_dim(&self, x: &Self::Obj) -> usize {
        self.dim(x)
    }

    /// `D(X) = X` with `δ = ⟨1, -1⟩`.
    fn difference_shortcut(&self, x: &Self::Obj) -> Option<(Self::Obj, Mat<Self>)> {
        let r = &self.ring;
        let n = self.dim(x);
        let id = Matrix::identity(r, n);
        Some((
            x.clone(),
            self.canonical(&self.product(x, x), id.vstack(&id.neg(r))),
        ))
    }

    fn object_to_json(&self, x: &Self::Obj) -> Value {
        let r = &self.ring;
        let n = self.dim(x);
        let rels: Vec<Vec<R::Elem>> = x
            .torsion
            .iter()
            .enumerate()
            .filter(|(_, t)| !r.is_zero(t))
            .map(|(i, t)| {
                (0..n)
                    .map(|k| if k == i { t.clone() } else { r.zero() })
                    .collect()
            })
            .collect();
        let m = Matrix::from_columns(n, &rels);
        json!({ "rank": n, "relations": m.to_json(r) })
    }

    fn object_from_json(&self, v: &Value) -> Result<Self::Obj> {
        Ok(self.presentation_from_json(v)?.object)
    }
}

impl<R: Ring> ModBackend<R> {
    /// Parses `{"rank": r, "relations": [[..]]}` (columns are relators).
    pub fn presentation_from_json(&self, v: &Value) -> Result<Presented<R::Elem>> {
        let rank = v
            .get("rank")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("module presentation needs an integer `rank`".into()))?
            as usize;
        let rels = v.get("relations").cloned().unwrap_or(Value::Array(vec![]));
        let arr = rels
            .as_array()
            .ok_or_else(|| Error::Parse("`relations` must be an array of rows".into()))?;
        let cols = arr.first().and_then(Value::as_array).map_or(0, Vec::len);
        let m = if rank == 0 {
            Matrix::zeros(&self.ring, 0, 0)
        } else {
            Matrix::from_json(&self.ring, &rels, rank, cols).map_err(Error::Parse)?
        };
        Ok(self.present(rank, &m))
    }

    pub fn domain(&self) -> CoefficientDomain {
        self.ring.domain()
    }

    /// The submodule span as an echelon form, for tests and reports.
    pub fn span(&self, x: &ModObject<R::Elem>, gens: &[Vec<R::Elem>]) -> Echelon<R::Elem> {
        self.span_echelon(x, gens)
    }

    /// Elements of a finite module, in lexicographic order.
    pub fn elements(&self, x: &ModObject<R::Elem>) -> Option<Vec<Vec<R::Elem>>> {
        let all = self.ring.elements()?;
        let mut out: Vec<Vec<R::Elem>> = vec![Vec::new()];
        for t in x.torsion.iter() {
            let residues: Vec<R::Elem> = if self.ring.is_zero(t) {
                all.clone()
            } else {
                let mut v: Vec<_> = all.iter().map(|a| self.ring.reduce(a, t)).collect();
                v.sort();
                v.dedup();
                v
            };
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
        Some(out)
    }

    pub fn order(&self, x: &ModObject<R::Elem>) -> Option<u64> {
        let m = self.ring.size()?;
        let mut total = 1u64;
        for t in x.torsion.iter() {
            let k = if self.ring.is_zero(t) {
                m
            } else {
                self.ring
                    .elements()?
                    .iter()
                    .filter(|a| self.ring.reduce(a, t) == **a)
                    .count() as u64
            };
            total = total.checked_mul(k)?;
        }
        Some(total)
    }
}

/// Scalar multiplication by a ring element as an endomorphism.
pub fn scalar<R: Ring>(
    b: &ModBackend<R>,
    x: &ModObject<R::Elem>,
    c: &R::Elem,
) -> Morphism<ModBackend<R>> {
    let n = b.dim(x);
    b.mor(x, x, Matrix::identity(b.ring(), n).scale(b.ring(), c))
}

pub type ModElem<R> = Elem<ModBackend<R>>;
