//! Symmetric sparse matrices stored as the lower triangle in CSC form.

use std::io::Write;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SparseSym {
    pub n: usize,
    pub col_ptr: Vec<usize>,
    pub row_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseSym {
    /// Builds from `(row, col, value)` entries, folding upper-triangle
    /// entries onto the lower triangle. Duplicates are summed in input order.
    pub fn from_triplets(n: usize, entries: &[(usize, usize, f64)]) -> Self {
        let mut t: Vec<(usize, usize, f64)> =
            entries.iter().map(|&(i, j, v)| (i.max(j), i.min(j), v)).collect();
        // Stable, so equal keys keep their accumulation order.
        t.sort_by_key(|&(i, j, _)| (j, i));
        let mut col_ptr = vec![0usize; n + 1];
        let mut row_idx = Vec::with_capacity(t.len());
        let mut values: Vec<f64> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in t {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                row_idx.push(i);
                values.push(v);
                col_ptr[j + 1] += 1;
                last = Some((i, j));
            }
        }
        for j in 0..n {
            col_ptr[j + 1] += col_ptr[j];
        }
        Self { n, col_ptr, row_idx, values }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Iterates stored `(row, col, value)` with `row >= col`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |j| {
            (self.col_ptr[j]..self.col_ptr[j + 1]).map(move |k| (self.row_idx[k], j, self.values[k]))
        })
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = (i.max(j), i.min(j));
        let range = self.col_ptr[c]..self.col_ptr[c + 1];
        match self.row_idx[range.clone()].binary_search(&r) {
            Ok(k) => self.values[range.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for j in 0..self.n {
            let xj = x[j];
            let mut acc = 0.0;
            for k in self.col_ptr[j]..self.col_ptr[j + 1] {
                let i = self.row_idx[k];
                let a = self.values[k];
                y[i] += a * xj;
                if i != j {
                    acc += a * x[i];
                }
            }
            y[j] += acc;
        }
    }

    /// `x^T A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        self.mul_vec(y).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// `A + s B` for matrices on the same index set.
    pub fn add_scaled(&self, s: f64, b: &SparseSym) -> SparseSym {
        let mut t: Vec<(usize, usize, f64)> = self.iter().collect();
        t.extend(b.iter().map(|(i, j, v)| (i, j, s * v)));
        SparseSym::from_triplets(self.n, &t)
    }

    /// Row sums of the full symmetric matrix.
    pub fn row_sums(&self) -> Vec<f64> {
        self.mul_vec(&vec![1.0; self.n])
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for (i, j, v) in self.iter() {
            d[i][j] = v;
            d[j][i] = v;
        }
        d
    }

    pub fn is_symmetric_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Coordinate dump, one `i j value` line per stored lower-triangle
    /// entry, 1-based.
    pub fn write_coo(&self, out: &mut impl Write) -> Result<()> {
        for (i, j, v) in self.iter() {
            writeln!(out, "{} {} {:?}", i + 1, j + 1, v)?;
        }
        Ok(())
    }

    pub fn to_faer(&self) -> Result<faer::sparse::SparseColMat<usize, f64>> {
        let trip: Vec<faer::sparse::Triplet<usize, usize, f64>> =
            self.iter().map(|(i, j, v)| faer::sparse::Triplet::new(i, j, v)).collect();
        faer::sparse::SparseColMat::try_new_from_triplets(self.n, self.n, &trip)
            .map_err(|e| Error::Factorization(format!("{e:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_product_and_duplicates() {
        let a = SparseSym::from_triplets(3, &[(0, 0, 2.0), (1, 0, -1.0), (0, 1, 0.5), (2, 2, 3.0), (1, 1, 1.0)]);
        assert_eq!(a.get(1, 0), -0.5);
        assert_eq!(a.get(0, 1), -0.5);
        assert_eq!(a.mul_vec(&[1.0, 2.0, 3.0]), vec![1.0, 1.5, 9.0]);
        let mut buf = Vec::new();
        a.write_coo(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "1 1 2.0\n2 1 -0.5\n2 2 1.0\n3 3 3.0\n");
    }
}
