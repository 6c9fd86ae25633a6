//! Exact linear algebra over principal ideal rings.
//!
//! [`Echelon`] is a Howell-style normal form for row spaces: over a field it is
//! the reduced row echelon form, over `Z` the Hermite normal form, and over
//! `Z/m` it additionally carries the annihilator rows needed for membership
//! tests to be exact. [`Solver`] and [`smith`] are built on it.

use crate::matrix::Matrix;
use crate::ring::Ring;

/// Reduces each coordinate of `v` modulo the matching torsion coefficient.
pub fn reduce_mod<R: Ring>(ring: &R, v: &mut [R::Elem], torsion: &[R::Elem]) {
    for (x, t) in v.iter_mut().zip(torsion) {
        if !ring.is_zero(t) {
            *x = ring.reduce(x, t);
        }
    }
}

fn axpy<R: Ring>(ring: &R, y: &mut [R::Elem], a: &R::Elem, x: &[R::Elem]) {
    if ring.is_zero(a) {
        return;
    }
    for (yi, xi) in y.iter_mut().zip(x) {
        if !ring.is_zero(xi) {
            *yi = ring.add(yi, &ring.mul(a, xi));
        }
    }
}

fn combine<R: Ring>(
    ring: &R,
    a: &R::Elem,
    x: &[R::Elem],
    b: &R::Elem,
    y: &[R::Elem],
) -> Vec<R::Elem> {
    x.iter()
        .zip(y)
        .map(|(xi, yi)| ring.add(&ring.mul(a, xi), &ring.mul(b, yi)))
        .collect()
}

fn is_zero_vec<R: Ring>(ring: &R, v: &[R::Elem]) -> bool {
    v.iter().all(|x| ring.is_zero(x))
}

/// Howell basis of a submodule of `R^width`, pivots strictly ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Echelon<E> {
    width: usize,
    rows: Vec<Vec<E>>,
    pivots: Vec<usize>,
}

impl<E: Clone + PartialEq> Echelon<E> {
    pub fn new<R: Ring<Elem = E>>(
        ring: &R,
        width: usize,
        gens: impl IntoIterator<Item = Vec<E>>,
    ) -> Self {
        let mut pool: Vec<Vec<E>> = gens
            .into_iter()
            .inspect(|g| assert_eq!(g.len(), width, "generator length mismatch"))
            .filter(|g| !is_zero_vec(ring, g))
            .collect();
        let mut rows: Vec<Vec<E>> = Vec::new();
        let mut pivots = Vec::new();
        for c in 0..width {
            if pool.is_empty() {
                break;
            }
            let mut pivot: Option<Vec<E>> = None;
            let mut rest = Vec::with_capacity(pool.len());
            for mut row in pool.drain(..) {
                if ring.is_zero(&row[c]) {
                    rest.push(row);
                    continue;
                }
                match pivot.as_mut() {
                    None => {
                        let (_, u) = ring.normalize(&row[c]);
                        for x in row.iter_mut() {
                            *x = ring.mul(&u, x);
                        }
                        pivot = Some(row);
                    }
                    Some(p) => {
                        let (q, r) = ring.div_rem(&row[c], &p[c]);
                        if ring.is_zero(&r) {
                            axpy(ring, &mut row, &ring.neg(&q), p);
                            rest.push(row);
                        } else {
                            let e = ring.gcdex(&p[c], &row[c]);
                            let mut np = combine(ring, &e.s, p, &e.t, &row);
                            let nr = combine(ring, &e.u, p, &e.v, &row);
                            let (_, u) = ring.normalize(&np[c]);
                            for x in np.iter_mut() {
                                *x = ring.mul(&u, x);
                            }
                            *p = np;
                            rest.push(nr);
                        }
                    }
                }
            }
            if let Some(p) = pivot {
                let ann = ring.annihilator(&p[c]);
                if !ring.is_zero(&ann) {
                    let extra: Vec<E> = p.iter().map(|x| ring.mul(&ann, x)).collect();
                    rest.push(extra);
                }
                rows.push(p);
                pivots.push(c);
            }
            pool = rest.into_iter().filter(|r| !is_zero_vec(ring, r)).collect();
        }
        for i in 0..rows.len() {
            let c = pivots[i];
            let (head, tail) = rows.split_at_mut(i);
            let pr = &tail[0];
            for row in head.iter_mut() {
                let (q, _) = ring.div_rem(&row[c], &pr[c]);
                axpy(ring, row, &ring.neg(&q), pr);
            }
        }
        Self {
            width,
            rows,
            pivots,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rows(&self) -> &[Vec<E>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Canonical representative of `v` modulo the row space.
    pub fn reduce<R: Ring<Elem = E>>(&self, ring: &R, v: &mut [E]) {
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            if ring.is_zero(&v[c]) {
                continue;
            }
            let (q, _) = ring.div_rem(&v[c], &row[c]);
            axpy(ring, v, &ring.neg(&q), row);
        }
    }

    pub fn contains<R: Ring<Elem = E>>(&self, ring: &R, v: &[E]) -> bool {
        let mut w = v.to_vec();
        self.reduce(ring, &mut w);
        is_zero_vec(ring, &w)
    }

    pub fn contains_all<R: Ring<Elem = E>>(&self, ring: &R, other: &Self) -> bool {
        other.rows.iter().all(|r| self.contains(ring, r))
    }

    /// Columns that carry no pivot.
    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.width)
            .filter(|c| !self.pivots.contains(c))
            .collect()
    }
}

/// Solves `A x ≡ b` modulo a diagonal torsion lattice on the codomain.
///
/// Built once per matrix; each right-hand side costs one reduction. Returned
/// solutions are canonical: reduced against the Howell basis of the kernel.
#[derive(Clone, Debug)]
pub struct Solver<E> {
    n: usize,
    k: usize,
    ech: Echelon<E>,
}

impl<E: Clone + PartialEq> Solver<E> {
    pub fn new<R: Ring<Elem = E>>(ring: &R, a: &Matrix<E>, torsion: &[E]) -> Self {
        let (n, k) = a.shape();
        assert_eq!(torsion.len(), n, "torsion length mismatch");
        let mut gens = Vec::with_capacity(n + k);
        for j in 0..k {
            let mut row = a.column(j);
            row.extend((0..k).map(|i| if i == j { ring.one() } else { ring.zero() }));
            gens.push(row);
        }
        for (i, t) in torsion.iter().enumerate() {
            if ring.is_zero(t) {
                continue;
            }
            let mut row = vec![ring.zero(); n + k];
            row[i] = t.clone();
            gens.push(row);
        }
        Self {
            n,
            k,
            ech: Echelon::new(ring, n + k, gens),
        }
    }

    pub fn solve<R: Ring<Elem = E>>(&self, ring: &R, b: &[E]) -> Option<Vec<E>> {
        assert_eq!(b.len(), self.n);
        let mut v = b.to_vec();
        v.extend((0..self.k).map(|_| ring.zero()));
        self.ech.reduce(ring, &mut v);
        if !is_zero_vec(ring, &v[..self.n]) {
            return None;
        }
        // Negate, then reduce against the kernel rows for the canonical representative.
        for x in v[self.n..].iter_mut() {
            *x = ring.neg(x);
        }
        self.ech.reduce(ring, &mut v);
        Some(v.split_off(self.n))
    }

    /// Generators (Howell basis) of `{x : A x ≡ 0}`.
    pub fn kernel(&self) -> Vec<Vec<E>> {
        self.ech
            .rows()
            .iter()
            .zip(self.ech.pivots())
            .filter(|(_, &p)| p >= self.n)
            .map(|(r, _)| r[self.n..].to_vec())
            .collect()
    }
}

/// Smith form of a relation matrix (rows are relations, columns generators).
///
/// `rel * q` has the same row space as `diag`, and `q * qinv = 1`. The diagonal
/// is canonical and forms a divisibility chain; its length is the column count.
#[derive(Clone, Debug)]
pub struct Smith<E> {
    pub diag: Vec<E>,
    pub q: Matrix<E>,
    pub qinv: Matrix<E>,
}

struct SmithWork<'a, R: Ring> {
    ring: &'a R,
    m: Vec<Vec<R::Elem>>,
    q: Vec<Vec<R::Elem>>,
    qinv: Vec<Vec<R::Elem>>,
}

impl<R: Ring> SmithWork<'_, R> {
    /// Column operation `(a, b) <- (s a + t b, u a + v b)` on `m` and `q`.
    fn col_op(&mut self, a: usize, b: usize, s: &R::Elem, t: &R::Elem, u: &R::Elem, v: &R::Elem) {
        let r = self.ring;
        for mat in [&mut self.m, &mut self.q] {
            for row in mat.iter_mut() {
                let (xa, xb) = (row[a].clone(), row[b].clone());
                row[a] = r.add(&r.mul(s, &xa), &r.mul(t, &xb));
                row[b] = r.add(&r.mul(u, &xa), &r.mul(v, &xb));
            }
        }
        let det = r.sub(&r.mul(s, v), &r.mul(t, u));
        let di = r
            .inverse(&det)
            .expect("column transform must be invertible");
        let (ra, rb) = (self.qinv[a].clone(), self.qinv[b].clone());
        let na = combine(r, &r.mul(&di, v), &ra, &r.mul(&di, &r.neg(u)), &rb);
        let nb = combine(r, &r.mul(&di, &r.neg(t)), &ra, &r.mul(&di, s), &rb);
        self.qinv[a] = na;
        self.qinv[b] = nb;
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for row in self.m.iter_mut().chain(self.q.iter_mut()) {
            row.swap(a, b);
        }
        self.qinv.swap(a, b);
    }

    fn row_op(&mut self, a: usize, b: usize, s: &R::Elem, t: &R::Elem, u: &R::Elem, v: &R::Elem) {
        let r = self.ring;
        let (ra, rb) = (self.m[a].clone(), self.m[b].clone());
        self.m[a] = combine(r, s, &ra, t, &rb);
        self.m[b] = combine(r, u, &ra, v, &rb);
    }

    fn normalize_row(&mut self, i: usize, c: usize) {
        let r = self.ring;
        let (_, u) = r.normalize(&self.m[i][c]);
        for x in self.m[i].iter_mut() {
            *x = r.mul(&u, x);
        }
    }
}

pub fn smith<R: Ring>(ring: &R, rel: &Matrix<R::Elem>) -> Smith<R::Elem> {
    let (nr, nc) = rel.shape();
    let id = Matrix::identity(ring, nc);
    let mut w = SmithWork {
        ring,
        m: (0..nr).map(|i| rel.row(i).to_vec()).collect(),
        q: (0..nc).map(|i| id.row(i).to_vec()).collect(),
        qinv: (0..nc).map(|i| id.row(i).to_vec()).collect(),
    };
    let one = ring.one();
    let zero = ring.zero();
    let steps = nr.min(nc);
    for t in 0..steps {
        let found =
            (t..nr).find_map(|i| (t..nc).find(|&j| !ring.is_zero(&w.m[i][j])).map(|j| (i, j)));
        let Some((i0, j0)) = found else { break };
        w.m.swap(t, i0);
        w.swap_cols(t, j0);
        w.normalize_row(t, t);
        loop {
            for i in t + 1..nr {
                if ring.is_zero(&w.m[i][t]) {
                    continue;
                }
                let (q, rem) = ring.div_rem(&w.m[i][t], &w.m[t][t]);
                if ring.is_zero(&rem) {
                    w.row_op(t, i, &one, &zero, &ring.neg(&q), &one);
                } else {
                    let e = ring.gcdex(&w.m[t][t], &w.m[i][t]);
                    w.row_op(t, i, &e.s, &e.t, &e.u, &e.v);
                    w.normalize_row(t, t);
                }
            }
            for j in t + 1..nc {
                if ring.is_zero(&w.m[t][j]) {
                    continue;
                }
                let (q, rem) = ring.div_rem(&w.m[t][j], &w.m[t][t]);
                if ring.is_zero(&rem) {
                    w.col_op(t, j, &one, &zero, &ring.neg(&q), &one);
                } else {
                    let e = ring.gcdex(&w.m[t][t], &w.m[t][j]);
                    w.col_op(t, j, &e.s, &e.t, &e.u, &e.v);
                    w.normalize_row(t, t);
                }
            }
            if (t + 1..nr).all(|i| ring.is_zero(&w.m[i][t])) {
                break;
            }
        }
    }
    // Divisibility chain via the gcd/lcm exchange on pairs of diagonal entries.
    let diag_of = |w: &SmithWork<R>, i: usize| {
        if i < nr {
            w.m[i][i].clone()
        } else {
            ring.zero()
        }
    };
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..nc {
            for j in i + 1..nc {
                let (a, b) = (diag_of(&w, i), diag_of(&w, j));
                if ring.divides(&a, &b) {
                    continue;
                }
                changed = true;
                w.col_op(i, j, &one, &one, &zero, &one);
                let e = ring.gcdex(&a, &b);
                w.row_op(i, j, &e.s, &e.t, &e.u, &e.v);
                w.normalize_row(i, i);
                let (q, rem) = ring.div_rem(&w.m[i][j], &w.m[i][i]);
                debug_assert!(ring.is_zero(&rem));
                w.col_op(i, j, &one, &zero, &ring.neg(&q), &one);
                w.normalize_row(j, j);
            }
        }
    }
    let diag = (0..nc)
        .map(|i| {
            if i < nr {
                ring.normalize(&w.m[i][i]).0
            } else {
                ring.zero()
            }
        })
        .collect();
    Smith {
        diag,
        q: Matrix::from_rows(nc, &w.q),
        qinv: Matrix::from_rows(nc, &w.qinv),
    }
}

/// Invariant factors of `⊕ R/(d_i)`, non-units only, in divisibility order.
pub fn invariant_factors<R: Ring>(ring: &R, torsion: &[R::Elem]) -> Vec<R::Elem> {
    let n = torsion.len();
    let rel = Matrix::from_fn(n, n, |i, j| {
        if i == j {
            torsion[i].clone()
        } else {
            ring.zero()
        }
    });
    smith(ring, &rel)
        .diag
        .into_iter()
        .filter(|d| !ring.is_unit(d))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{Integers, Rationals, ResidueRing};
    use num_bigint::BigInt;

    /// All R-linear combinations of `gens` in `(Z/m)^w`, by closure.
    fn brute_span(m: u64, w: usize, gens: &[Vec<u64>]) -> std::collections::HashSet<Vec<u64>> {
        let mut span = std::collections::HashSet::new();
        span.insert(vec![0; w]);
        let mut frontier = vec![vec![0; w]];
        while let Some(v) = frontier.pop() {
            for g in gens {
                let n: Vec<u64> = v.iter().zip(g).map(|(a, b)| (a + b) % m).collect();
                if span.insert(n.clone()) {
                    frontier.push(n);
                }
            }
        }
        span
    }

    #[test]
    fn howell_membership_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for m in [4u64, 6, 8, 12] {
            let r = ResidueRing::new(m).unwrap();
            for _ in 0..40 {
                let w = rng.gen_range(1..=3);
                let k = rng.gen_range(0..=3);
                let gens: Vec<Vec<u64>> = (0..k)
                    .map(|_| (0..w).map(|_| rng.gen_range(0..m)).collect())
                    .collect();
                let ech = Echelon::new(&r, w, gens.clone());
                let span = brute_span(m, w, &gens);
                let mut all = vec![vec![]];
                for _ in 0..w {
                    all = all
                        .into_iter()
                        .flat_map(|v: Vec<u64>| {
                            (0..m).map(move |x| {
                                let mut v = v.clone();
                                v.push(x);
                                v
                            })
                        })
                        .collect();
                }
                for v in &all {
                    assert_eq!(
                        ech.contains(&r, v),
                        span.contains(v),
                        "m={m} gens={gens:?} v={v:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn howell_needs_annihilator_rows() {
        // Over Z/4 the span of (2, 1) contains (0, 2); a plain echelon form misses it.
        let r = ResidueRing::new(4).unwrap();
        let ech = Echelon::new(&r, 2, vec![vec![2, 1]]);
        assert!(ech.contains(&r, &[0, 2]));
        assert!(!ech.contains(&r, &[0, 1]));
        assert_eq!(ech.pivots(), &[0, 1]);
    }

    #[test]
    fn rref_over_field() {
        let q = Rationals;
        let gens = vec![
            vec![q.from_i64(2), q.from_i64(4), q.from_i64(0)],
            vec![q.from_i64(1), q.from_i64(2), q.from_i64(1)],
        ];
        let ech = Echelon::new(&q, 3, gens);
        assert_eq!(ech.pivots(), &[0, 2]);
        assert_eq!(ech.rows()[0], vec![q.one(), q.from_i64(2), q.zero()]);
        assert_eq!(ech.free_columns(), vec![1]);
    }

    #[test]
    fn solver_with_torsion() {
        // 2x = 2 in Z/4 has solutions {1, 3}; canonical choice reduces by the kernel {0, 2}.
        let r = ResidueRing::new(4).unwrap();
        let a = Matrix::from_rows(1, &[vec![2]]);
        let s = Solver::new(&r, &a, &[0]);
        assert_eq!(s.solve(&r, &[2]), Some(vec![1]));
        assert_eq!(s.solve(&r, &[1]), None);
        assert_eq!(s.kernel(), vec![vec![2]]);
        // x ≡ 1 mod 2 inside Z/4: target carries torsion 2.
        let a = Matrix::from_rows(1, &[vec![1]]);
        let s = Solver::new(&r, &a, &[2]);
        assert_eq!(s.solve(&r, &[1]), Some(vec![1]));
        assert_eq!(s.kernel(), vec![vec![2]]);
    }

    #[test]
    fn smith_over_integers() {
        let z = Integers;
        let rel = Matrix::from_rows(
            2,
            &[
                vec![BigInt::from(2), BigInt::from(4)],
                vec![BigInt::from(6), BigInt::from(8)],
            ],
        );
        let s = smith(&z, &rel);
        assert_eq!(s.diag, vec![BigInt::from(2), BigInt::from(4)]);
        assert_eq!(s.q.mul(&z, &s.qinv), Matrix::identity(&z, 2));
    }

    #[test]
    fn invariant_factor_examples() {
        let r = ResidueRing::new(4).unwrap();
        assert_eq!(invariant_factors(&r, &[2, 0]), vec![2, 0]);
        assert_eq!(invariant_factors(&r, &[0, 2]), vec![2, 0]);
        let z = Integers;
        let f = invariant_factors(&z, &[BigInt::from(4), BigInt::from(6)]);
        assert_eq!(f, vec![BigInt::from(2), BigInt::from(12)]);
    }
}
