//! Coordinate/CSR sparse operators.
//!
//! Symmetric operators keep only the upper triangle (`row <= col`); the
//! matvec accounts for the mirrored half.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use crate::error::{arg_err, HeisError, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SparseOp {
    nrows: usize,
    ncols: usize,
    symmetric: bool,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseOp {
    /// Builds an operator from triplets. Duplicate coordinates are summed and
    /// exact zeros dropped. For symmetric operators an entry below the
    /// diagonal is folded onto its mirror, so each unordered pair should be
    /// supplied once.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        symmetric: bool,
        mut triplets: Vec<(usize, usize, f64)>,
    ) -> Result<Self> {
        if symmetric && nrows != ncols {
            return arg_err("a symmetric operator must be square");
        }
        for t in triplets.iter_mut() {
            if t.0 >= nrows || t.1 >= ncols {
                return arg_err(format!("entry ({}, {}) outside a {nrows}x{ncols} operator", t.0, t.1));
            }
            if !t.2.is_finite() {
                return Err(HeisError::Numerical(format!("non-finite entry at ({}, {})", t.0, t.1)));
            }
            if symmetric && t.0 > t.1 {
                std::mem::swap(&mut t.0, &mut t.1);
            }
        }
        triplets.sort_by_key(|t| (t.0, t.1));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            match merged.last_mut() {
                Some(last) if (last.0, last.1) == (r, c) => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|t| t.2 != 0.0);
        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::with_capacity(merged.len());
        let mut values = Vec::with_capacity(merged.len());
        for (r, c, v) in merged {
            row_ptr[r + 1] += 1;
            col_idx.push(c);
            values.push(v);
        }
        for i in 0..nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(SparseOp { nrows, ncols, symmetric, row_ptr, col_idx, values })
    }

    /// `n x n` identity scaled by `c`.
    pub fn scaled_identity(n: usize, c: f64) -> Self {
        let t = (0..n).map(|i| (i, i, c)).collect();
        Self::from_triplets(n, n, true, t).expect("valid identity")
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Number of stored entries (upper triangle only for symmetric ops).
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Stored entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.col_idx[k], self.values[k]))
        })
    }

    /// `y = A x`.
    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols, "matvec input length");
        assert_eq!(y.len(), self.nrows, "matvec output length");
        y.iter_mut().for_each(|v| *v = 0.0);
        for r in 0..self.nrows {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.col_idx[k];
                let v = self.values[k];
                acc += v * x[c];
                if self.symmetric && c != r {
                    y[c] += v * x[r];
                }
            }
            y[r] += acc;
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.matvec_into(x, &mut y);
        y
    }

    /// `y = Aᵀ x`.
    pub fn apply_transpose(&self, x: &[f64]) -> Vec<f64> {
        if self.symmetric {
            return self.apply(x);
        }
        assert_eq!(x.len(), self.nrows, "transpose matvec input length");
        let mut y = vec![0.0; self.ncols];
        for (r, c, v) in self.triplets() {
            y[c] += v * x[r];
        }
        y
    }

    pub fn transpose(&self) -> SparseOp {
        if self.symmetric {
            return self.clone();
        }
        let t = self.triplets().map(|(r, c, v)| (c, r, v)).collect();
        SparseOp::from_triplets(self.ncols, self.nrows, false, t).expect("transpose of valid op")
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for (r, c, v) in self.triplets() {
            m[(r, c)] += v;
            if self.symmetric && r != c {
                m[(c, r)] += v;
            }
        }
        m
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.nrows.min(self.ncols)];
        for (r, c, v) in self.triplets() {
            if r == c {
                d[r] += v;
            }
        }
        d
    }

    /// Maximum absolute row sum, an upper bound for the spectral norm of a
    /// symmetric operator.
    pub fn norm_bound(&self) -> f64 {
        let mut sums = vec![0.0; self.nrows.max(self.ncols)];
        for (r, c, v) in self.triplets() {
            sums[r] += v.abs();
            if self.symmetric && r != c {
                sums[c] += v.abs();
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    /// `self + c * other` for operators of equal shape and symmetry.
    pub fn add_scaled(&self, other: &SparseOp, c: f64) -> Result<SparseOp> {
        if (self.nrows, self.ncols, self.symmetric) != (other.nrows, other.ncols, other.symmetric) {
            return arg_err("operator shapes differ");
        }
        let t = self.triplets().chain(other.triplets().map(|(r, col, v)| (r, col, c * v))).collect();
        SparseOp::from_triplets(self.nrows, self.ncols, self.symmetric, t)
    }

    /// Coordinate text dump, `#dim` header followed by `row col value`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        if self.nrows == self.ncols {
            let _ = writeln!(out, "#dim {} symmetric={}", self.nrows, self.symmetric);
        } else {
            let _ = writeln!(out, "#dim {}x{} symmetric=false", self.nrows, self.ncols);
        }
        for (r, c, v) in self.triplets() {
            let _ = writeln!(out, "{r} {c} {v}");
        }
        out
    }

    /// Inverse of [`SparseOp::dump`].
    pub fn parse_dump(text: &str) -> Result<SparseOp> {
        let perr = |line: usize, message: String| HeisError::Parse { line, message };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| perr(1, "empty operator dump".into()))?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("#dim") {
            return Err(perr(1, "missing #dim header".into()));
        }
        let dims = parts.next().ok_or_else(|| perr(1, "missing dimension".into()))?;
        let (nrows, ncols) = match dims.split_once('x') {
            Some((r, c)) => (r.parse::<usize>(), c.parse::<usize>()),
            None => (dims.parse::<usize>(), dims.parse::<usize>()),
        };
        let (nrows, ncols) = (
            nrows.map_err(|e| perr(1, format!("bad dimension: {e}")))?,
            ncols.map_err(|e| perr(1, format!("bad dimension: {e}")))?,
        );
        let symmetric = match parts.next() {
            Some("symmetric=true") => true,
            Some("symmetric=false") | None => false,
            Some(other) => return Err(perr(1, format!("bad symmetry flag {other:?}"))),
        };
        let mut triplets = Vec::new();
        for (i, line) in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(perr(i + 1, format!("expected `row col value`, got {line:?}")));
            }
            let r = toks[0].parse::<usize>().map_err(|e| perr(i + 1, e.to_string()))?;
            let c = toks[1].parse::<usize>().map_err(|e| perr(i + 1, e.to_string()))?;
            let v = toks[2].parse::<f64>().map_err(|e| perr(i + 1, e.to_string()))?;
            triplets.push((r, c, v));
        }
        SparseOp::from_triplets(nrows, ncols, symmetric, triplets)
    }
}

/// Euclidean inner product.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
