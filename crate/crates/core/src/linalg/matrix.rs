use crate::{Error, Result};

/// Dense real matrix in column-major order: entry `(i, j)` lives at
/// `data[j * rows + i]`, so the backing array of an `M×N` matrix *is* the
/// vectorization that stacks columns (`x[N*n + m] = X[m, n]`).
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Wraps a column-major array. Rejects length mismatches and non-finite
    /// entries.
    pub fn from_data(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    /// Builds from a row-major closure; test and construction convenience.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                m.data[j * rows + i] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[j * self.rows + i]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[j * self.rows + i] = v;
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for j in 0..self.cols {
            for i in 0..self.rows {
                t.data[i * self.cols + j] = self.data[j * self.rows + i];
            }
        }
        t
    }

    /// `out = self * x` for a column vector `x`.
    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        out.fill(0.0);
        for j in 0..self.cols {
            let xj = x[j];
            if xj == 0.0 {
                continue;
            }
            let col = self.col(j);
            for i in 0..self.rows {
                out[i] += col[i] * xj;
            }
        }
    }

    /// `out = selfᵀ * y`.
    pub fn matvec_t(&self, y: &[f64], out: &mut [f64]) {
        debug_assert_eq!(y.len(), self.rows);
        debug_assert_eq!(out.len(), self.cols);
        for j in 0..self.cols {
            out[j] = super::dot(self.col(j), y);
        }
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for j in 0..other.cols {
            self.matvec(other.col(j), out.col_mut(j));
        }
        Ok(out)
    }

    pub fn frob_norm(&self) -> f64 {
        super::norm2(&self.data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn column_major_layout_stacks_columns() {
        // X = [1 3; 2 4]: vec(X) = [1, 2, 3, 4].
        let m = DenseMatrix::from_data(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(m.get(0, 0), 1.0);
        assert_eq!(m.get(1, 0), 2.0);
        assert_eq!(m.get(0, 1), 3.0);
        assert_eq!(m.get(1, 1), 4.0);
        assert_eq!(m.col(1), &[3.0, 4.0]);
    }

    #[test]
    fn from_data_rejects_bad_input() {
        assert!(DenseMatrix::from_data(2, 2, vec![0.0; 3]).is_err());
        assert!(DenseMatrix::from_data(1, 2, vec![f64::NAN, 0.0]).is_err());
        assert!(DenseMatrix::from_data(1, 2, vec![f64::INFINITY, 0.0]).is_err());
    }

    #[test]
    fn matvec_and_adjoint_agree_with_hand_product() {
        let m = DenseMatrix::from_data(2, 3, vec![1.0, 4.0, 2.0, 5.0, 3.0, 6.0]).unwrap();
        let mut y = [0.0; 2];
        m.matvec(&[1.0, 1.0, 1.0], &mut y);
        assert_eq!(y, [6.0, 15.0]);
        let mut x = [0.0; 3];
        m.matvec_t(&[1.0, 1.0], &mut x);
        assert_eq!(x, [5.0, 7.0, 9.0]);
    }

    #[test]
    fn transpose_and_mul() {
        let a = DenseMatrix::from_data(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let at = a.transpose();
        assert_eq!(at.get(0, 1), 2.0);
        let prod = a.mul(&DenseMatrix::identity(2)).unwrap();
        assert_eq!(prod, a);
    }
}
