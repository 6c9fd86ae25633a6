//! Dense row-major matrices whose arithmetic is supplied by a [`Ring`].

use serde_json::Value;

use crate::ring::Ring;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Clone> Matrix<E> {
    pub fn filled(rows: usize, cols: usize, value: E) -> Self {
        Self {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(cols: usize, rows: &[Vec<E>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged row");
            data.extend(r.iter().cloned());
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// Builds a matrix from column vectors of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<E>]) -> Self {
        for c in columns {
            assert_eq!(c.len(), rows, "column length mismatch");
        }
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: E) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<E> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<E>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), self.cols, |i, j| self.get(idx[i], j).clone())
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |i, j| self.get(i, idx[j]).clone())
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        })
    }

    /// `[self; other]`.
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Self {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn data(&self) -> &[E] {
        &self.data
    }

    pub fn map<F: Clone>(&self, f: impl Fn(&E) -> F) -> Matrix<F> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<E: Clone + PartialEq> Matrix<E> {
    pub fn zeros<R: Ring<Elem = E>>(ring: &R, rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, ring.zero())
    }

    pub fn identity<R: Ring<Elem = E>>(ring: &R, n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ring.one() } else { ring.zero() })
    }

    pub fn is_zero<R: Ring<Elem = E>>(&self, ring: &R) -> bool {
        self.data.iter().all(|x| ring.is_zero(x))
    }

    pub fn mul<R: Ring<Elem = E>>(&self, ring: &R, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(ring, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if ring.is_zero(a) {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if ring.is_zero(b) {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = ring.add(&out.data[idx], &ring.mul(a, b));
                }
            }
        }
        out
    }

    pub fn apply<R: Ring<Elem = E>>(&self, ring: &R, v: &[E]) -> Vec<E> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = ring.zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !ring.is_zero(a) && !ring.is_zero(b) {
                        acc = ring.add(&acc, &ring.mul(a, b));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add<R: Ring<Elem = E>>(&self, ring: &R, rhs: &Self) -> Self {
        assert_eq!(self.shape(), rhs.shape());
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| ring.add(a, b))
                .collect(),
        }
    }

    pub fn sub<R: Ring<Elem = E>>(&self, ring: &R, rhs: &Self) -> Self {
        assert_eq!(self.shape(), rhs.shape());
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| ring.sub(a, b))
                .collect(),
        }
    }

    pub fn neg<R: Ring<Elem = E>>(&self, ring: &R) -> Self {
        self.map(|x| ring.neg(x))
    }

    pub fn scale<R: Ring<Elem = E>>(&self, ring: &R, c: &E) -> Self {
        self.map(|x| ring.mul(c, x))
    }

    /// Block-diagonal sum `diag(self, other)`.
    pub fn block_diag<R: Ring<Elem = E>>(&self, ring: &R, other: &Self) -> Self {
        let (r1, c1) = self.shape();
        Self::from_fn(r1 + other.rows, c1 + other.cols, |i, j| {
            match (i < r1, j < c1) {
                (true, true) => self.get(i, j).clone(),
                (false, false) => other.get(i - r1, j - c1).clone(),
                _ => ring.zero(),
            }
        })
    }

    pub fn to_json<R: Ring<Elem = E>>(&self, ring: &R) -> Value {
        Value::Array(
            (0..self.rows)
                .map(|i| Value::Array(self.row(i).iter().map(|x| ring.to_json(x)).collect()))
                .collect(),
        )
    }

    pub fn from_json<R: Ring<Elem = E>>(
        ring: &R,
        v: &Value,
        rows: usize,
        cols: usize,
    ) -> Result<Self, String> {
        let arr = v.as_array().ok_or("matrix must be an array of rows")?;
        if arr.len() != rows {
            return Err(format!("matrix has {} rows, expected {rows}", arr.len()));
        }
        let mut data = Vec::with_capacity(rows * cols);
        for (i, r) in arr.iter().enumerate() {
            let r = r.as_array().ok_or("matrix row must be an array")?;
            if r.len() != cols {
                return Err(format!("row {i} has {} entries, expected {cols}", r.len()));
            }
            for x in r {
                data.push(ring.from_json(x)?);
            }
        }
        Ok(Self { rows, cols, data })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::ResidueRing;

    #[test]
    fn product_and_transpose() {
        let r = ResidueRing::new(5).unwrap();
        let a = Matrix::from_rows(2, &[vec![1, 2], vec![3, 4]]);
        let b = Matrix::from_rows(2, &[vec![0, 1], vec![1, 0]]);
        assert_eq!(
            a.mul(&r, &b),
            Matrix::from_rows(2, &[vec![2, 1], vec![4, 3]])
        );
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(a.mul(&r, &Matrix::identity(&r, 2)), a);
        assert_eq!(a.apply(&r, &[1, 1]), vec![3, 2]);
    }

    #[test]
    fn stacking() {
        let r = ResidueRing::new(3).unwrap();
        let a = Matrix::from_rows(1, &[vec![1], vec![2]]);
        let b = a.hstack(&a);
        assert_eq!(b.shape(), (2, 2));
        assert_eq!(a.vstack(&a).shape(), (4, 1));
        let d = a.block_diag(&r, &a);
        assert_eq!(d.shape(), (4, 2));
        assert_eq!(*d.get(3, 1), 2);
        assert_eq!(*d.get(3, 0), 0);
    }

    #[test]
    fn empty_shapes() {
        let r = ResidueRing::new(4).unwrap();
        let a: Matrix<u64> = Matrix::zeros(&r, 0, 3);
        let b: Matrix<u64> = Matrix::zeros(&r, 3, 2);
        assert_eq!(a.mul(&r, &b).shape(), (0, 2));
        let c: Matrix<u64> = Matrix::zeros(&r, 2, 0);
        let d: Matrix<u64> = Matrix::zeros(&r, 0, 2);
        assert_eq!(c.mul(&r, &d), Matrix::zeros(&r, 2, 2));
    }
}
