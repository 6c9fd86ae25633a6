//! Nilpotent Lie algebras of class at most two over a field.
//!
//! An object is a basis size plus sparse structure constants `[e_i, e_j]` for
//! `i < j`. The commutator subspace and a set of abelian generators (basis
//! indices not hit by a pivot of the commutator echelon form) are cached.

use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use rand::{Rng, RngCore};
use serde_json::{json, Value};

use crate::category::{
    enumerate_lift, Backend, BackendKind, Category, Fingerprint, Mat, Morphism, Search,
};
use crate::error::{Error, Result};
use crate::linalg::{Echelon, Solver};
use crate::matrix::Matrix;
use crate::ring::Ring;

type Sparse<E> = Vec<(usize, E)>;

#[derive(Debug)]
struct Derived<E> {
    comm: Echelon<E>,
    /// Abelian generators: non-pivot columns of `comm`.
    gens: Vec<usize>,
    /// Generator pairs `g < h` and the solver for `W·Λ = B` on them.
    pairs: Vec<(usize, usize)>,
    lambda: Solver<E>,
}

#[derive(Debug)]
struct Data<E> {
    dim: usize,
    brackets: Vec<(usize, usize, Sparse<E>)>,
    derived: OnceLock<Derived<E>>,
}

#[derive(Clone, Debug)]
pub struct Lie2Object<E> {
    inner: Arc<Data<E>>,
}

impl<E: PartialEq> PartialEq for Lie2Object<E> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.dim == other.inner.dim && self.inner.brackets == other.inner.brackets)
    }
}

impl<E: Eq> Eq for Lie2Object<E> {}

impl<E: Hash> Hash for Lie2Object<E> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.inner.dim.hash(state);
        self.inner.brackets.hash(state);
    }
}

impl<E: Clone> Lie2Object<E> {
    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    /// Nonzero structure constants as `(i, j, k, c)` with `i < j`.
    pub fn triples(&self) -> Vec<(usize, usize, usize, E)> {
        self.inner
            .brackets
            .iter()
            .flat_map(|(i, j, v)| v.iter().map(move |(k, c)| (*i, *j, *k, c.clone())))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lie2Backend<R: Ring> {
    ring: R,
}

impl<R: Ring> Lie2Backend<R> {
    pub fn new(ring: R) -> Result<Self> {
        if !ring.is_field() {
            return Err(Error::Unsupported(format!(
                "lie2 needs field coefficients, got {}",
                ring.domain()
            )));
        }
        Ok(Self { ring })
    }

    /// Builds an object from `(i, j, k, c)` triples meaning `[e_i, e_j]` has `c` at `e_k`.
    ///
    /// Triples with `i > j` are read antisymmetrically; conflicting or diagonal
    /// entries are rejected. The class-two law is checked.
    pub fn from_triples(
        &self,
        dim: usize,
        triples: &[(usize, usize, usize, R::Elem)],
    ) -> Result<Lie2Object<R::Elem>> {
        let r = &self.ring;
        let mut seen: BTreeMap<(usize, usize, usize), (bool, R::Elem)> = BTreeMap::new();
        for (i, j, k, c) in triples {
            if *i >= dim || *j >= dim || *k >= dim {
                return Err(Error::InvalidObject(format!(
                    "index out of range in ({i}, {j}, {k})"
                )));
            }
            if r.is_zero(c) {
                continue;
            }
            if i == j {
                return Err(Error::InvalidObject(format!(
                    "alternation violated: [e{i}, e{i}] has a nonzero coefficient"
                )));
            }
            let (a, b, v, flipped) = if i < j {
                (*i, *j, c.clone(), false)
            } else {
                (*j, *i, r.neg(c), true)
            };
            match seen.get(&(a, b, *k)) {
                Some((f, w)) if *f != flipped => {
                    if *w != v {
                        return Err(Error::InvalidObject(format!(
                            "antisymmetry violated: [e{a}, e{b}] and [e{b}, e{a}] disagree at e{k}"
                        )));
                    }
                }
                Some(_) => {
                    return Err(Error::InvalidObject(format!(
                        "duplicate structure constant for [e{i}, e{j}] at e{k}"
                    )));
                }
                None => {
                    seen.insert((a, b, *k), (flipped, v));
                }
            }
        }
        let mut brackets: Vec<(usize, usize, Sparse<R::Elem>)> = Vec::new();
        for ((a, b, k), (_, v)) in seen {
            match brackets.last_mut() {
                Some((x, y, s)) if *x == a && *y == b => s.push((k, v)),
                _ => brackets.push((a, b, vec![(k, v)])),
            }
        }
        let x = Self::raw(dim, brackets);
        self.validate_object(&x).map_err(Error::InvalidObject)?;
        Ok(x)
    }

    fn raw(dim: usize, brackets: Vec<(usize, usize, Sparse<R::Elem>)>) -> Lie2Object<R::Elem> {
        Lie2Object {
            inner: Arc::new(Data {
                dim,
                brackets,
                derived: OnceLock::new(),
            }),
        }
    }

    fn from_dense(
        &self,
        dim: usize,
        table: impl Fn(usize, usize) -> Vec<R::Elem>,
    ) -> Lie2Object<R::Elem> {
        let mut brackets = Vec::new();
        for i in 0..dim {
            for j in i + 1..dim {
                let v = table(i, j);
                let s: Sparse<R::Elem> = v
                    .into_iter()
                    .enumerate()
                    .filter(|(_, c)| !self.ring.is_zero(c))
                    .collect();
                if !s.is_empty() {
                    brackets.push((i, j, s));
                }
            }
        }
        Self::raw(dim, brackets)
    }

    /// Abelian algebra of dimension `n`.
    pub fn abelian(&self, n: usize) -> Lie2Object<R::Elem> {
        Self::raw(n, Vec::new())
    }

    /// Heisenberg algebra: `[x, y] = z`.
    pub fn heisenberg(&self) -> Lie2Object<R::Elem> {
        Self::raw(3, vec![(0, 1, vec![(2, self.ring.one())])])
    }

    /// Index of `[e_i, e_j]` (`i < j`) in the free algebra on `n` generators.
    pub fn free_pair_index(n: usize, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < n);
        n + i * (2 * n - i - 1) / 2 + (j - i - 1)
    }

    pub fn bracket(&self, x: &Lie2Object<R::Elem>, u: &[R::Elem], v: &[R::Elem]) -> Vec<R::Elem> {
        let r = &self.ring;
        let mut out = vec![r.zero(); x.dim()];
        for (i, j, s) in &x.inner.brackets {
            let c = r.sub(&r.mul(&u[*i], &v[*j]), &r.mul(&u[*j], &v[*i]));
            if r.is_zero(&c) {
                continue;
            }
            for (k, a) in s {
                out[*k] = r.add(&out[*k], &r.mul(&c, a));
            }
        }
        out
    }

    fn basis_bracket(&self, x: &Lie2Object<R::Elem>, i: usize, j: usize) -> Vec<R::Elem> {
        let r = &self.ring;
        let mut out = vec![r.zero(); x.dim()];
        let (a, b, sign) = if i < j { (i, j, false) } else { (j, i, true) };
        if a == b {
            return out;
        }
        if let Some((_, _, s)) = x.inner.brackets.iter().find(|(p, q, _)| *p == a && *q == b) {
            for (k, c) in s {
                out[*k] = if sign { r.neg(c) } else { c.clone() };
            }
        }
        out
    }

    fn derived<'a>(&self, x: &'a Lie2Object<R::Elem>) -> &'a Derived<R::Elem> {
        x.inner.derived.get_or_init(|| {
            let r = &self.ring;
            let n = x.dim();
            let comm = Echelon::new(
                r,
                n,
                x.inner
                    .brackets
                    .iter()
                    .map(|(i, j, _)| self.basis_bracket(x, *i, *j)),
            );
            let gens = comm.free_columns();
            let mut pairs = Vec::new();
            for (a, &g) in gens.iter().enumerate() {
                for &h in &gens[a + 1..] {
                    pairs.push((g, h));
                }
            }
            // Column p of Λ holds the coordinates of [e_g, e_h] in the comm basis.
            let cols: Vec<Vec<R::Elem>> = pairs
                .iter()
                .map(|&(g, h)| {
                    let b = self.basis_bracket(x, g, h);
                    comm.pivots().iter().map(|&p| b[p].clone()).collect()
                })
                .collect();
            let lam = Matrix::from_columns(comm.len(), &cols);
            let lambda = Solver::new(r, &lam.transpose(), &vec![r.zero(); pairs.len()]);
            Derived {
                comm,
                gens,
                pairs,
                lambda,
            }
        })
    }

    /// Basis of `[X, X]` in reduced echelon form.
    pub fn commutator(&self, x: &Lie2Object<R::Elem>) -> Vec<Vec<R::Elem>> {
        self.derived(x).comm.rows().to_vec()
    }

    pub fn commutator_dim(&self, x: &Lie2Object<R::Elem>) -> usize {
        self.derived(x).comm.len()
    }

    /// Basis indices whose classes form a basis of `X^ab`.
    pub fn abelian_generators(&self, x: &Lie2Object<R::Elem>) -> Vec<usize> {
        self.derived(x).gens.clone()
    }

    /// Abelianization `X → X^ab`, as the cokernel of the commutator inclusion.
    pub fn abelianization(&self, x: &Lie2Object<R::Elem>) -> Morphism<Self> {
        let (q, m) = self.quotient(x, &self.commutator(x));
        self.mor(x, &q, m)
    }

    /// Coordinates of the class of `v` in `X^ab`.
    pub fn ab_coords(&self, x: &Lie2Object<R::Elem>, v: &[R::Elem]) -> Vec<R::Elem> {
        let d = self.derived(x);
        let mut w = v.to_vec();
        d.comm.reduce(&self.ring, &mut w);
        d.gens.iter().map(|&g| w[g].clone()).collect()
    }

    /// Basis of the center `{v : [v, X] = 0}`.
    pub fn center(&self, x: &Lie2Object<R::Elem>) -> Vec<Vec<R::Elem>> {
        let n = x.dim();
        let r = &self.ring;
        // Stack ad(e_k) as blocks: column i is ([e_i, e_k])_k.
        let cols: Vec<Vec<R::Elem>> = (0..n)
            .map(|i| (0..n).flat_map(|k| self.basis_bracket(x, i, k)).collect())
            .collect();
        let m = Matrix::from_columns(n * n, &cols);
        Solver::new(r, &m, &vec![r.zero(); n * n]).kernel()
    }

    fn ad_rank(&self, x: &Lie2Object<R::Elem>, v: &[R::Elem]) -> usize {
        let n = x.dim();
        let cols: Vec<Vec<R::Elem>> = (0..n)
            .map(|k| {
                let mut e = vec![self.ring.zero(); n];
                e[k] = self.ring.one();
                self.bracket(x, v, &e)
            })
            .collect();
        Echelon::new(&self.ring, n, cols).len()
    }

    /// Histogram of `rank(ad v)` over all `v`, when small enough to enumerate;
    /// otherwise the maximal rank over basis vectors and their pairwise sums.
    fn pencil(&self, x: &Lie2Object<R::Elem>) -> Vec<usize> {
        let n = x.dim();
        let r = &self.ring;
        if n == 0 {
            return Vec::new();
        }
        if let (Some(els), Some(q)) = (r.elements(), r.size()) {
            if q.checked_pow(n as u32).is_some_and(|t| t <= 20_000) {
                let mut hist = vec![0usize; n + 1];
                let mut digits = vec![0usize; n];
                loop {
                    let v: Vec<R::Elem> = digits.iter().map(|&d| els[d].clone()).collect();
                    hist[self.ad_rank(x, &v)] += 1;
                    let mut carry = true;
                    for d in digits.iter_mut() {
                        *d += 1;
                        if *d < els.len() {
                            carry = false;
                            break;
                        }
                        *d = 0;
                    }
                    if carry {
                        break;
                    }
                }
                while hist.len() > 1 && hist.last() == Some(&0) {
                    hist.pop();
                }
                return hist;
            }
        }
        let mut best = 0;
        for i in 0..n {
            for j in i..n {
                let mut v = vec![r.zero(); n];
                v[i] = r.one();
                v[j] = r.add(&v[j], &r.one());
                best = best.max(self.ad_rank(x, &v));
            }
        }
        vec![best]
    }

    /// Bounded search for an isomorphism, after comparing fingerprints.
    pub fn find_iso(
        &self,
        x: &Lie2Object<R::Elem>,
        y: &Lie2Object<R::Elem>,
        budget: u64,
    ) -> Search<Morphism<Self>> {
        if self.fingerprint(x) != self.fingerprint(y) {
            return Search::None { explored: 0 };
        }
        let gens = self.abelian_generators(x);
        let Some(els) = self.ring.elements() else {
            return Search::Unknown { explored: 0 };
        };
        let n = y.dim();
        let slots = gens.len() * n;
        let mut digits = vec![0usize; slots];
        let mut explored = 0u64;
        loop {
            if explored >= budget {
                return Search::Unknown { explored };
            }
            explored += 1;
            let images: Vec<Vec<R::Elem>> = (0..gens.len())
                .map(|g| (0..n).map(|k| els[digits[g * n + k]].clone()).collect())
                .collect();
            if let Some(m) = self.extend(x, y, &images) {
                let f = self.mor(x, y, m);
                if self.is_iso(&f) {
                    return Search::Found(f);
                }
            }
            let mut carry = true;
            for d in digits.iter_mut().rev() {
                *d += 1;
                if *d < els.len() {
                    carry = false;
                    break;
                }
                *d = 0;
            }
            if carry {
                return Search::None { explored };
            }
        }
    }

    /// Random morphism; falls back to images in the center when sampled
    /// generator images do not extend.
    fn sample_images(
        &self,
        rng: &mut dyn RngCore,
        x: &Lie2Object<R::Elem>,
        y: &Lie2Object<R::Elem>,
    ) -> Mat<Self> {
        let r = &self.ring;
        let k = self.abelian_generators(x).len();
        let n = y.dim();
        for _ in 0..8 {
            let images: Vec<Vec<R::Elem>> = (0..k)
                .map(|_| (0..n).map(|_| r.random(rng)).collect())
                .collect();
            if let Some(m) = self.extend(x, y, &images) {
                return m;
            }
        }
        let center = self.center(y);
        let images: Vec<Vec<R::Elem>> = (0..k)
            .map(|_| {
                let mut v = vec![r.zero(); n];
                for c in &center {
                    let a = r.random(rng);
                    for (vi, ci) in v.iter_mut().zip(c) {
                        *vi = r.add(vi, &r.mul(&a, ci));
                    }
                }
                v
            })
            .collect();
        self.extend(x, y, &images)
            .expect("central images always extend")
    }
}

impl<R: Ring> Backend for Lie2Backend<R> {
    type R = R;
    type Obj = Lie2Object<R::Elem>;

    fn ring(&self) -> &R {
        &self.ring
    }

    fn kind(&self) -> BackendKind {
        BackendKind::Lie2
    }

    fn dim(&self, x: &Self::Obj) -> usize {
        x.dim()
    }

    fn torsion(&self, x: &Self::Obj) -> Vec<R::Elem> {
        vec![self.ring.zero(); x.dim()]
    }

    fn zero_object(&self) -> Self::Obj {
        Self::raw(0, Vec::new())
    }

    fn validate_object(&self, x: &Self::Obj) -> std::result::Result<(), String> {
        let r = &self.ring;
        let n = x.dim();
        let mut last = None;
        for (i, j, s) in &x.inner.brackets {
            if i >= j || *j >= n {
                return Err(format!(
                    "bracket index pair ({i}, {j}) is not strictly increasing and in range"
                ));
            }
            if last.is_some_and(|l| l >= (*i, *j)) {
                return Err("bracket entries are not sorted".into());
            }
            last = Some((*i, *j));
            if s.is_empty() || s.iter().any(|(k, c)| *k >= n || r.is_zero(c)) {
                return Err(format!(
                    "bracket [e{i}, e{j}] has a zero or out-of-range entry"
                ));
            }
            if s.windows(2).any(|w| w[0].0 >= w[1].0) {
                return Err(format!("bracket [e{i}, e{j}] entries are not sorted"));
            }
        }
        for (i, j, _) in &x.inner.brackets {
            let c = self.basis_bracket(x, *i, *j);
            for k in 0..n {
                let mut e = vec![r.zero(); n];
                e[k] = r.one();
                if self.bracket(x, &e, &c).iter().any(|a| !r.is_zero(a)) {
                    return Err(format!(
                        "class-2 law violated: [e{k}, [e{i}, e{j}]] is nonzero"
                    ));
                }
            }
        }
        Ok(())
    }

    fn check_structure(
        &self,
        dom: &Self::Obj,
        cod: &Self::Obj,
        m: &Mat<Self>,
    ) -> std::result::Result<(), String> {
        let r = &self.ring;
        let n = dom.dim();
        let cols = m.columns();
        for i in 0..n {
            for j in i + 1..n {
                let lhs = m.apply(r, &self.basis_bracket(dom, i, j));
                let rhs = self.bracket(cod, &cols[i], &cols[j]);
                if lhs != rhs {
                    return Err(format!("bracket not preserved on (e{i}, e{j})"));
                }
            }
        }
        Ok(())
    }

    fn subobject(&self, x: &Self::Obj, gens: &[Vec<R::Elem>]) -> Result<(Self::Obj, Mat<Self>)> {
        let r = &self.ring;
        let n = x.dim();
        let ech = Echelon::new(r, n, gens.iter().cloned());
        let basis = ech.rows();
        let k = basis.len();
        let mut table = vec![vec![Vec::new(); k]; k];
        for a in 0..k {
            for b in a + 1..k {
                let w = self.bracket(x, &basis[a], &basis[b]);
                if !ech.contains(r, &w) {
                    return Err(Error::NotClosed(format!(
                        "bracket of basis vectors {a} and {b} leaves the span"
                    )));
                }
                table[a][b] = ech.pivots().iter().map(|&p| w[p].clone()).collect();
            }
        }
        let obj = self.from_dense(k, |a, b| table[a][b].clone());
        Ok((obj, Matrix::from_columns(n, basis)))
    }

    /// In class two one round suffices: `S + [X, S]`.
    fn normal_closure(&self, x: &Self::Obj, gens: &[Vec<R::Elem>]) -> Vec<Vec<R::Elem>> {
        let r = &self.ring;
        let n = x.dim();
        let mut all: Vec<Vec<R::Elem>> = gens.to_vec();
        for g in gens {
            for k in 0..n {
                let mut e = vec![r.zero(); n];
                e[k] = r.one();
                all.push(self.bracket(x, &e, g));
            }
        }
        Echelon::new(r, n, all).rows().to_vec()
    }

    fn quotient(&self, x: &Self::Obj, gens: &[Vec<R::Elem>]) -> (Self::Obj, Mat<Self>) {
        let r = &self.ring;
        let n = x.dim();
        let ideal = Echelon::new(r, n, self.normal_closure(x, gens));
        let keep = ideal.free_columns();
        let project = |v: &[R::Elem]| -> Vec<R::Elem> {
            let mut w = v.to_vec();
            ideal.reduce(r, &mut w);
            keep.iter().map(|&c| w[c].clone()).collect()
        };
        let obj = self.from_dense(keep.len(), |a, b| {
            project(&self.basis_bracket(x, keep[a], keep[b]))
        });
        let cols: Vec<Vec<R::Elem>> = (0..n)
            .map(|j| {
                let mut e = vec![r.zero(); n];
                e[j] = r.one();
                project(&e)
            })
            .collect();
        (obj, Matrix::from_columns(keep.len(), &cols))
    }

    fn product(&self, x: &Self::Obj, y: &Self::Obj) -> Self::Obj {
        let dx = x.dim();
        let mut brackets = x.inner.brackets.clone();
        for (i, j, s) in &y.inner.brackets {
            brackets.push((
                i + dx,
                j + dx,
                s.iter().map(|(k, c)| (k + dx, c.clone())).collect(),
            ));
        }
        Self::raw(dx + y.dim(), brackets)
    }

    /// `X ⊕ Y ⊕ (X^ab ⊗ Y^ab)` with cross brackets in the tensor part.
    fn coproduct(&self, x: &Self::Obj, y: &Self::Obj) -> Self::Obj {
        let r = &self.ring;
        let (dx, dy) = (x.dim(), y.dim());
        let ky = self.abelian_generators(y).len();
        let kx = self.abelian_generators(x).len();
        let n = dx + dy + kx * ky;
        let px: Vec<Vec<R::Elem>> = (0..dx)
            .map(|i| {
                let mut e = vec![r.zero(); dx];
                e[i] = r.one();
                self.ab_coords(x, &e)
            })
            .collect();
        let py: Vec<Vec<R::Elem>> = (0..dy)
            .map(|j| {
                let mut e = vec![r.zero(); dy];
                e[j] = r.one();
                self.ab_coords(y, &e)
            })
            .collect();
        self.from_dense(n, |i, j| {
            let mut v = vec![r.zero(); n];
            if j < dx {
                for (k, c) in self.basis_bracket(x, i, j).into_iter().enumerate() {
                    v[k] = c;
                }
            } else if i >= dx && i < dx + dy && j < dx + dy {
                for (k, c) in self
                    .basis_bracket(y, i - dx, j - dx)
                    .into_iter()
                    .enumerate()
                {
                    v[dx + k] = c;
                }
            } else if i < dx && j < dx + dy {
                for (a, ca) in px[i].iter().enumerate() {
                    for (b, cb) in py[j - dx].iter().enumerate() {
                        v[dx + dy + a * ky + b] = r.mul(ca, cb);
                    }
                }
            }
            v
        })
    }

    fn couniv(
        &self,
        x: &Self::Obj,
        y: &Self::Obj,
        z: &Self::Obj,
        f: &Mat<Self>,
        g: &Mat<Self>,
    ) -> Mat<Self> {
        let gx = self.abelian_generators(x);
        let gy = self.abelian_generators(y);
        let fc = f.columns();
        let gc = g.columns();
        let mut cols: Vec<Vec<R::Elem>> = fc.clone();
        cols.extend(gc.iter().cloned());
        for &a in &gx {
            for &b in &gy {
                cols.push(self.bracket(z, &fc[a], &gc[b]));
            }
        }
        Matrix::from_columns(z.dim(), &cols)
    }

    fn free_object(&self, n: usize) -> Self::Obj {
        let one = self.ring.one();
        let mut brackets = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                brackets.push((i, j, vec![(Self::free_pair_index(n, i, j), one.clone())]));
            }
        }
        Self::raw(n + n * n.saturating_sub(1) / 2, brackets)
    }

    fn free_rank(&self, x: &Self::Obj) -> Option<usize> {
        let d = x.dim();
        let k = self.abelian_generators(x).len();
        (d == k + k * k.saturating_sub(1) / 2 && *x == self.free_object(k)).then_some(k)
    }

    fn generators(&self, x: &Self::Obj) -> Vec<Vec<R::Elem>> {
        let r = &self.ring;
        self.abelian_generators(x)
            .into_iter()
            .map(|g| {
                let mut e = vec![r.zero(); x.dim()];
                e[g] = r.one();
                e
            })
            .collect()
    }

    fn extend(&self, x: &Self::Obj, y: &Self::Obj, images: &[Vec<R::Elem>]) -> Option<Mat<Self>> {
        let r = &self.ring;
        let d = self.derived(x);
        assert_eq!(
            images.len(),
            d.gens.len(),
            "one image per abelian generator"
        );
        let ny = y.dim();
        let pos = |g: usize| {
            d.gens
                .iter()
                .position(|&h| h == g)
                .expect("generator index")
        };
        // Row t of W: coordinates (in Y) of the images of the comm basis.
        let mut w_rows: Vec<Vec<R::Elem>> = Vec::with_capacity(ny);
        let brackets: Vec<Vec<R::Elem>> = d
            .pairs
            .iter()
            .map(|&(g, h)| self.bracket(y, &images[pos(g)], &images[pos(h)]))
            .collect();
        for t in 0..ny {
            let rhs: Vec<R::Elem> = brackets.iter().map(|b| b[t].clone()).collect();
            w_rows.push(d.lambda.solve(r, &rhs)?);
        }
        let mut cols = vec![vec![r.zero(); ny]; x.dim()];
        for (a, &g) in d.gens.iter().enumerate() {
            cols[g] = images[a].clone();
        }
        for (l, (row, &p)) in d.comm.rows().iter().zip(d.comm.pivots()).enumerate() {
            let mut v: Vec<R::Elem> = w_rows.iter().map(|w| w[l].clone()).collect();
            for &g in &d.gens {
                if r.is_zero(&row[g]) {
                    continue;
                }
                let img = &images[pos(g)];
                for (vi, ii) in v.iter_mut().zip(img) {
                    *vi = r.sub(vi, &r.mul(&row[g], ii));
                }
            }
            cols[p] = v;
        }
        Some(Matrix::from_columns(ny, &cols))
    }

    fn find_lift(
        &self,
        target: &Morphism<Self>,
        e: &Morphism<Self>,
        budget: u64,
    ) -> Search<Mat<Self>> {
        enumerate_lift(self, target, e, budget)
    }

    fn fingerprint(&self, x: &Self::Obj) -> Fingerprint {
        Fingerprint::Lie {
            dim: x.dim(),
            commutator_dim: self.commutator_dim(x),
            center_dim: self.center(x).len(),
            pencil: self.pencil(x),
        }
    }

    /// Brackets of the first `k` basis vectors land in the span of the last `r`.
    fn sample_object(&self, rng: &mut dyn RngCore, size: usize) -> Self::Obj {
        let n = rng.gen_range(0..=size);
        let rr = if n >= 3 { rng.gen_range(0..=n / 2) } else { 0 };
        let k = n - rr;
        let r = &self.ring;
        let mut table: BTreeMap<(usize, usize), Vec<R::Elem>> = BTreeMap::new();
        for i in 0..k {
            for j in i + 1..k {
                let mut v = vec![r.zero(); n];
                for c in v.iter_mut().skip(k) {
                    *c = r.random(rng);
                }
                table.insert((i, j), v);
            }
        }
        let x = self.from_dense(n, |i, j| {
            table
                .get(&(i, j))
                .cloned()
                .unwrap_or_else(|| vec![r.zero(); n])
        });
        debug_assert!(self.validate_object(&x).is_ok());
        x
    }

    fn sample_matrix(&self, rng: &mut dyn RngCore, x: &Self::Obj, y: &Self::Obj) -> Mat<Self> {
        self.sample_images(rng, x, y)
    }

    fn predicted_difference_dim(&self, x: &Self::Obj) -> usize {
        let k = self.abelian_generators(x).len();
        x.dim() + k * k
    }

    fn object_to_json(&self, x: &Self::Obj) -> Value {
        let triples: Vec<Value> = x
            .triples()
            .into_iter()
            .map(|(i, j, k, c)| json!([i, j, k, self.ring.to_json(&c)]))
            .collect();
        json!({ "dim": x.dim(), "brackets": triples })
    }

    fn object_from_json(&self, v: &Value) -> Result<Self::Obj> {
        let dim = v
            .get("dim")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("lie2 presentation needs an integer `dim`".into()))?
            as usize;
        let mut triples = Vec::new();
        for t in v
            .get("brackets")
            .and_then(Value::as_array)
            .map(Vec::as_slice)
            .unwrap_or(&[])
        {
            let a = t
                .as_array()
                .filter(|a| a.len() == 4)
                .ok_or_else(|| Error::Parse("bracket entries are [i, j, k, value]".into()))?;
            let idx = |q: &Value| {
                q.as_u64()
                    .map(|u| u as usize)
                    .ok_or_else(|| Error::Parse("bracket index must be an integer".into()))
            };
            triples.push((
                idx(&a[0])?,
                idx(&a[1])?,
                idx(&a[2])?,
                self.ring.from_json(&a[3]).map_err(Error::Parse)?,
            ));
        }
        self.from_triples(dim, &triples)
    }
}
