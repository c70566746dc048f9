//! Dense exact matrices over a [`Field`], with the handful of Gaussian-elimination
//! kernels everything else reduces to. Pivoting is first-nonzero, so all derived
//! bases (kernels, cokernel complements, rref) are deterministic.

use crate::field::{Field, Scalar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    pub field: Field,
    pub rows: usize,
    pub cols: usize,
    entries: Vec<Scalar>, // row-major
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Matrix {
        Matrix {
            field,
            rows,
            cols,
            entries: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_fn(field: Field, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Matrix {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Matrix { field, rows, cols, entries }
    }

    /// Builds a matrix from integer rows; convenient in tests and builders.
    pub fn from_i64(field: Field, rows: &[&[i64]]) -> Matrix {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        Matrix::from_fn(field, r, c, |i, j| field.from_i64(rows[i][j]))
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        assert!(i < self.rows && j < self.cols);
        self.entries[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| self.field.is_zero(e))
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.field, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(self.field, self.rows, self.cols, |i, j| {
            self.field.add(self.get(i, j), other.get(i, j))
        })
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(self.field, self.rows, self.cols, |i, j| {
            self.field.sub(self.get(i, j), other.get(i, j))
        })
    }

    pub fn neg(&self) -> Matrix {
        Matrix::from_fn(self.field, self.rows, self.cols, |i, j| self.field.neg(self.get(i, j)))
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix::from_fn(self.field, self.rows, self.cols, |i, j| self.field.mul(c, self.get(i, j)))
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let f = self.field;
        Matrix::from_fn(f, self.rows, other.cols, |i, j| {
            let mut acc = f.zero();
            for k in 0..self.cols {
                acc = f.add(&acc, &f.mul(self.get(i, k), other.get(k, j)));
            }
            acc
        })
    }

    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows);
        Matrix::from_fn(self.field, self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        })
    }

    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        Matrix::from_fn(self.field, self.rows + other.rows, self.cols, |i, j| {
            if i < self.rows {
                self.get(i, j).clone()
            } else {
                other.get(i - self.rows, j).clone()
            }
        })
    }

    pub fn block_diag(field: Field, blocks: &[&Matrix]) -> Matrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Matrix::zeros(field, rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m.set(r0 + i, c0 + j, b.get(i, j).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }

    pub fn column(&self, j: usize) -> Matrix {
        Matrix::from_fn(self.field, self.rows, 1, |i, _| self.get(i, j).clone())
    }

    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        Matrix::from_fn(self.field, self.rows, cols.len(), |i, j| self.get(i, cols[j]).clone())
    }

    /// Kronecker product; basis order is row-major over (left index, right index).
    pub fn kronecker(&self, other: &Matrix) -> Matrix {
        let f = self.field;
        Matrix::from_fn(
            f,
            self.rows * other.rows,
            self.cols * other.cols,
            |i, j| {
                let (i1, i2) = (i / other.rows, i % other.rows);
                let (j1, j2) = (j / other.cols, j % other.cols);
                f.mul(self.get(i1, j1), other.get(i2, j2))
            },
        )
    }

    /// Reduced row echelon form; returns (rref, pivot column indices).
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            // first nonzero pivot in column c at or below row r
            let piv = (r..m.rows).find(|&i| !f.is_zero(m.get(i, c)));
            let Some(piv) = piv else { continue };
            if piv != r {
                for j in 0..m.cols {
                    let a = m.get(piv, j).clone();
                    let b = m.get(r, j).clone();
                    m.set(piv, j, b);
                    m.set(r, j, a);
                }
            }
            let inv = f.inv(m.get(r, c)).expect("nonzero pivot");
            for j in 0..m.cols {
                let v = f.mul(&inv, m.get(r, j));
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i != r && !f.is_zero(m.get(i, c)) {
                    let factor = m.get(i, c).clone();
                    for j in 0..m.cols {
                        let v = f.sub(m.get(i, j), &f.mul(&factor, m.get(r, j)));
                        m.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Solves A·X = B for any solution X, or `None` if the system is inconsistent.
    pub fn solve_right(&self, b: &Matrix) -> Option<Matrix> {
        assert_eq!(self.rows, b.rows, "dimension mismatch in solve_right");
        let f = self.field;
        let aug = self.hstack(b);
        let (r, pivots) = aug.rref();
        // inconsistent iff some pivot falls in the B block
        if pivots.iter().any(|&c| c >= self.cols) {
            return None;
        }
        let mut x = Matrix::zeros(f, self.cols, b.cols);
        for (row, &pc) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                x.set(pc, j, r.get(row, self.cols + j).clone());
            }
        }
        Some(x)
    }

    /// Columns form a deterministic basis of the right kernel {x : A·x = 0}.
    pub fn kernel_basis(&self) -> Matrix {
        let f = self.field;
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut k = Matrix::zeros(f, self.cols, free.len());
        for (idx, &fc) in free.iter().enumerate() {
            k.set(fc, idx, f.one());
            for (row, &pc) in pivots.iter().enumerate() {
                k.set(pc, idx, f.neg(r.get(row, fc)));
            }
        }
        k
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let x = self.solve_right(&Matrix::identity(self.field, self.rows))?;
        if self.mul(&x) == Matrix::identity(self.field, self.rows) {
            Some(x)
        } else {
            None
        }
    }

    /// Indices of standard basis vectors spanning a complement of the column space.
    /// Deterministic: greedy over ascending indices.
    pub fn cokernel_complement(&self) -> Vec<usize> {
        let f = self.field;
        let mut span = self.clone();
        let mut rank = span.rank();
        let mut picked = Vec::new();
        for i in 0..self.rows {
            let mut e = Matrix::zeros(f, self.rows, 1);
            e.set(i, 0, f.one());
            let cand = span.hstack(&e);
            let r = cand.rank();
            if r > rank {
                picked.push(i);
                span = cand;
                rank = r;
            }
        }
        picked
    }

    /// Projection onto the cokernel of this matrix (viewed as columns spanning a
    /// subspace of k^rows): returns (projection P, section S) with P·S = id on the
    /// quotient and P vanishing on the column space.
    pub fn cokernel_projection(&self) -> (Matrix, Matrix) {
        let f = self.field;
        let comp = self.cokernel_complement();
        let rank = self.rank();
        // pivot columns of self give a deterministic column-space basis
        let col_basis = {
            let (_, piv) = self.rref();
            self.select_columns(&piv)
        };
        let mut section = Matrix::zeros(f, self.rows, comp.len());
        for (j, &i) in comp.iter().enumerate() {
            section.set(i, j, f.one());
        }
        let basis = col_basis.hstack(&section);
        debug_assert_eq!(basis.cols, self.rows);
        let inv = basis.inverse().expect("complement construction yields a basis");
        // last rows of inv give coordinates along the complement
        let proj = Matrix::from_fn(f, comp.len(), self.rows, |i, j| inv.get(rank + i, j).clone());
        (proj, section)
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }
}
