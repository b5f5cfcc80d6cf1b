//! Dense row-major measurement matrices.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Read access shared by binary and real measurement matrices.
pub trait MeasurementMatrix {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    fn entry(&self, row: usize, col: usize) -> f64;

    /// `row · x` restricted to the listed columns, summed in the given order.
    fn sparse_row_dot(&self, row: usize, cols: &[usize], x: &[f64]) -> f64 {
        cols.iter().map(|&j| self.entry(row, j) * x[j]).sum()
    }
}

/// An `m × n` matrix over `{0, 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        check_shape(rows, cols)?;
        Ok(BinaryMatrix { rows, cols, data: alloc::vec![0; rows * cols] })
    }

    /// Builds from row-major 0/1 entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<u8>) -> Result<Self> {
        check_shape(rows, cols)?;
        Error::check_dim(rows * cols, data.len())?;
        if let Some(bad) = data.iter().find(|&&v| v > 1) {
            return Err(Error::param("entries", alloc::format!("binary entry {bad} is not 0 or 1")));
        }
        Ok(BinaryMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(m * n);
        for r in rows {
            Error::check_dim(n, r.len())?;
            data.extend_from_slice(r);
        }
        Self::from_row_major(m, n, data)
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.data[row * self.cols + col] != 0
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.data[row * self.cols + col] = u8::from(value);
    }

    pub fn row(&self, row: usize) -> &[u8] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn as_row_major(&self) -> &[u8] {
        &self.data
    }

    /// Row indices of the ones in column `col`.
    pub fn column_support(&self, col: usize) -> Vec<usize> {
        (0..self.rows).filter(|&i| self.get(i, col)).collect()
    }

    pub fn column_weight(&self, col: usize) -> usize {
        (0..self.rows).filter(|&i| self.get(i, col)).count()
    }

    /// The common column weight, or `None` if the weights differ.
    pub fn constant_column_weight(&self) -> Option<usize> {
        let w = self.column_weight(0);
        (1..self.cols).all(|j| self.column_weight(j) == w).then_some(w)
    }

    pub fn to_real(&self) -> RealMatrix {
        RealMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f64::from(v)).collect(),
        }
    }
}

impl MeasurementMatrix for BinaryMatrix {
    fn nrows(&self) -> usize {
        self.rows
    }
    fn ncols(&self) -> usize {
        self.cols
    }
    fn entry(&self, row: usize, col: usize) -> f64 {
        f64::from(self.data[row * self.cols + col])
    }
    fn sparse_row_dot(&self, row: usize, cols: &[usize], x: &[f64]) -> f64 {
        let r = self.row(row);
        cols.iter().filter(|&&j| r[j] != 0).map(|&j| x[j]).sum()
    }
}

/// An `m × n` matrix of finite reals.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        check_shape(rows, cols)?;
        Error::check_dim(rows * cols, data.len())?;
        if let Some(&bad) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(bad));
        }
        Ok(RealMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(m * n);
        for r in rows {
            Error::check_dim(n, r.len())?;
            data.extend_from_slice(r);
        }
        Self::from_row_major(m, n, data)
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(rows * cols, data.len());
        RealMatrix { rows, cols, data }
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn as_row_major(&self) -> &[f64] {
        &self.data
    }

    /// Keeps only the listed columns, in the listed order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<RealMatrix> {
        if cols.is_empty() {
            return Err(Error::param("cols", "column selection is empty"));
        }
        if let Some(&bad) = cols.iter().find(|&&j| j >= self.cols) {
            return Err(Error::param("cols", alloc::format!("column {bad} out of range")));
        }
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for i in 0..self.rows {
            let r = self.row(i);
            data.extend(cols.iter().map(|&j| r[j]));
        }
        Ok(RealMatrix { rows: self.rows, cols: cols.len(), data })
    }

    /// Keeps only the listed rows, in the listed order.
    pub fn select_rows(&self, rows: &[usize]) -> RealMatrix {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &i in rows {
            data.extend_from_slice(self.row(i));
        }
        RealMatrix { rows: rows.len(), cols: self.cols, data }
    }
}

impl MeasurementMatrix for RealMatrix {
    fn nrows(&self) -> usize {
        self.rows
    }
    fn ncols(&self) -> usize {
        self.cols
    }
    fn entry(&self, row: usize, col: usize) -> f64 {
        self.get(row, col)
    }
    fn sparse_row_dot(&self, row: usize, cols: &[usize], x: &[f64]) -> f64 {
        let r = self.row(row);
        cols.iter().map(|&j| r[j] * x[j]).sum()
    }
}

fn check_shape(rows: usize, cols: usize) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(Error::param("shape", alloc::format!("{rows}x{cols} matrix has an empty dimension")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn binary_rejects_non_binary_entries() {
        assert!(BinaryMatrix::from_row_major(1, 2, vec![0, 2]).is_err());
        assert!(BinaryMatrix::from_row_major(1, 2, vec![0, 1, 1]).is_err());
        assert!(BinaryMatrix::zeros(0, 3).is_err());
    }

    #[test]
    fn real_rejects_non_finite_entries() {
        assert!(matches!(
            RealMatrix::from_row_major(1, 2, vec![1.0, f64::NAN]),
            Err(Error::NonFinite(_))
        ));
        assert!(matches!(
            RealMatrix::from_row_major(1, 1, vec![f64::INFINITY]),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn column_queries() {
        let m = BinaryMatrix::from_rows(&[vec![1, 0, 1], vec![1, 1, 0]]).unwrap();
        assert_eq!(m.column_support(0), vec![0, 1]);
        assert_eq!(m.column_weight(1), 1);
        assert_eq!(m.constant_column_weight(), None);
        let c = BinaryMatrix::from_rows(&[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(c.constant_column_weight(), Some(1));
    }

    #[test]
    fn select_columns_keeps_order() {
        let a = RealMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        let s = a.select_columns(&[2, 0]).unwrap();
        assert_eq!(s.as_row_major(), &[3.0, 1.0, 6.0, 4.0]);
        assert!(a.select_columns(&[3]).is_err());
    }
}
