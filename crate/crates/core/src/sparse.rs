use std::cmp::Ordering;

use nalgebra::DMatrix;

/// Symmetric matrix in CSR form with both triangles stored. Column indices
/// are 32-bit to keep the matrix small in cache.
#[derive(Debug, Clone, PartialEq)]
pub struct SymCsr {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    data: Vec<f64>,
}

impl SymCsr {
    pub(crate) fn from_parts(n: usize, indptr: Vec<usize>, indices: Vec<usize>, data: Vec<f64>) -> Self {
        debug_assert_eq!(indptr.len(), n + 1);
        debug_assert_eq!(indices.len(), data.len());
        assert!(u32::try_from(n).is_ok(), "matrix dimension {n} exceeds 32-bit indices");
        Self {
            n,
            indptr,
            indices: indices.into_iter().map(|j| j as u32).collect(),
            data,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    /// `y = A x`
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for (i, yi) in y.iter_mut().enumerate() {
            let range = self.indptr[i]..self.indptr[i + 1];
            *yi = self.indices[range.clone()]
                .iter()
                .zip(&self.data[range])
                .map(|(&j, &a)| a * x[j as usize])
                .sum();
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let range = self.indptr[i]..self.indptr[i + 1];
        match self.indices[range.clone()].binary_search(&(j as u32)) {
            Ok(pos) => self.data[range.start + pos],
            Err(_) => 0.0,
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.indptr[i]..self.indptr[i + 1];
        self.indices[range.clone()]
            .iter()
            .map(|&j| j as usize)
            .zip(self.data[range].iter().copied())
    }

    /// `x^T A x`
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let mut y = vec![0.0; self.n];
        self.matvec(x, &mut y);
        x.iter().zip(&y).map(|(a, b)| a * b).sum()
    }

    /// Frobenius norm of `self - other` (same dimension).
    pub fn frobenius_distance(&self, other: &SymCsr) -> f64 {
        assert_eq!(self.n, other.n);
        let mut total = 0.0;
        for i in 0..self.n {
            let mut a = self.row(i).peekable();
            let mut b = other.row(i).peekable();
            loop {
                let d = match (a.peek().copied(), b.peek().copied()) {
                    (None, None) => break,
                    (Some((ja, va)), Some((jb, vb))) => match ja.cmp(&jb) {
                        Ordering::Equal => {
                            a.next();
                            b.next();
                            va - vb
                        }
                        Ordering::Less => {
                            a.next();
                            va
                        }
                        Ordering::Greater => {
                            b.next();
                            -vb
                        }
                    },
                    (Some((_, va)), None) => {
                        a.next();
                        va
                    }
                    (None, Some((_, vb))) => {
                        b.next();
                        -vb
                    }
                };
                total += d * d;
            }
        }
        total.sqrt()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                m[(i, j)] = v;
            }
        }
        m
    }
}
