use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::basis::{binomial, MagnonBasis};
use crate::error::{arg_err, Result};
use crate::graph::Graph;
use crate::sparse::SparseOp;

/// Threshold below which a Gram-Schmidt residual counts as linearly dependent.
pub const REORTH_TOL: f64 = 1e-12;

fn check_n(g: &Graph, n: usize) -> Result<()> {
    if n > g.vertex_count() {
        return arg_err(format!("magnon number {n} out of range for {} vertices", g.vertex_count()));
    }
    Ok(())
}

/// The Heisenberg Hamiltonian restricted to the `n`-magnon sector, in the
/// subset basis. Each subset `X` gets `½ Σ J(e)` over edges leaving `X` on
/// the diagonal and `-½ J` between subsets related by one hop along an edge.
pub fn hamiltonian_magnon(g: &Graph, n: usize) -> Result<SparseOp> {
    check_n(g, n)?;
    let basis = MagnonBasis::new(g.vertex_count(), n)?;
    let adj = g.adjacency();
    let rows: Vec<Vec<(usize, usize, f64)>> = (0..basis.dim())
        .into_par_iter()
        .map(|r| {
            let x = basis.unrank(r);
            let mut inside = vec![false; g.vertex_count()];
            for &a in &x {
                inside[a] = true;
            }
            let mut out = Vec::new();
            let mut diag = 0.0;
            for (k, &a) in x.iter().enumerate() {
                for &(b, j) in &adj[a] {
                    if inside[b] || j == 0.0 {
                        continue;
                    }
                    diag += 0.5 * j;
                    let mut y = x.clone();
                    y[k] = b;
                    let s = basis.rank_unsorted(&y);
                    if r < s {
                        out.push((r, s, -0.5 * j));
                    }
                }
            }
            if diag != 0.0 {
                out.push((r, r, diag));
            }
            out
        })
        .collect();
    let dim = basis.dim();
    SparseOp::from_triplets(dim, dim, true, rows.into_iter().flatten().collect())
}

/// Total lowering operator `S⁻` from the `(n-1)`- to the `n`-magnon sector.
pub fn lowering_matrix(g: &Graph, n: usize) -> Result<SparseOp> {
    if n == 0 {
        return arg_err("lowering target sector must be at least 1");
    }
    check_n(g, n)?;
    let v = g.vertex_count();
    let from = MagnonBasis::new(v, n - 1)?;
    let to = MagnonBasis::new(v, n)?;
    let mut triplets = Vec::with_capacity(from.dim() * (v - n + 1));
    for (c, x) in from.subsets().enumerate() {
        let mut inside = vec![false; v];
        for &a in &x {
            inside[a] = true;
        }
        for y in (0..v).filter(|&y| !inside[y]) {
            let mut s = x.clone();
            s.push(y);
            triplets.push((to.rank_unsorted(&s), c, 1.0));
        }
    }
    SparseOp::from_triplets(to.dim(), from.dim(), false, triplets)
}

/// Total-spin Casimir on the `n`-magnon sector, `(M² + M) I + S⁻S⁺` with
/// `M = |V|/2 - n`. `S⁻S⁺` has `n` on the diagonal and 1 between subsets
/// sharing `n - 1` elements.
pub fn casimir_magnon(g: &Graph, n: usize) -> Result<SparseOp> {
    check_n(g, n)?;
    let v = g.vertex_count();
    let basis = MagnonBasis::new(v, n)?;
    let m = v as f64 / 2.0 - n as f64;
    let mut triplets = Vec::new();
    for (r, x) in basis.subsets().enumerate() {
        triplets.push((r, r, m * m + m + n as f64));
        let mut inside = vec![false; v];
        for &a in &x {
            inside[a] = true;
        }
        for k in 0..n {
            for y in (0..v).filter(|&y| !inside[y]) {
                let mut s = x.clone();
                s[k] = y;
                let c = basis.rank_unsorted(&s);
                if r < c {
                    triplets.push((r, c, 1.0));
                }
            }
        }
    }
    SparseOp::from_triplets(basis.dim(), basis.dim(), true, triplets)
}

/// Modified Gram-Schmidt with one reorthogonalization pass. Returns the
/// normalized residual or `None` if `v` is dependent on the columns of `q`.
fn orthogonalize(q: &[DVector<f64>], mut v: DVector<f64>) -> Option<DVector<f64>> {
    let start = v.norm();
    if start == 0.0 {
        return None;
    }
    for _ in 0..2 {
        for col in q {
            let c = col.dot(&v);
            v.axpy(-c, col, 1.0);
        }
    }
    let r = v.norm();
    if r <= REORTH_TOL.sqrt() * start {
        None
    } else {
        Some(v / r)
    }
}

/// Orthonormal basis of the range of `S⁻` inside the `n`-magnon sector.
pub fn range_basis(g: &Graph, n: usize) -> Result<DMatrix<f64>> {
    check_n(g, n)?;
    let dim = binomial(g.vertex_count(), n).unwrap_or(0);
    if n == 0 {
        return Ok(DMatrix::zeros(1, 0));
    }
    let low = lowering_matrix(g, n)?;
    let mut cols: Vec<DVector<f64>> = Vec::new();
    let mut e = vec![0.0; low.ncols()];
    for c in 0..low.ncols() {
        e[c] = 1.0;
        let v = DVector::from_vec(low.apply(&e));
        e[c] = 0.0;
        if let Some(q) = orthogonalize(&cols, v) {
            cols.push(q);
        }
    }
    Ok(if cols.is_empty() { DMatrix::zeros(dim, 0) } else { DMatrix::from_columns(&cols) })
}

/// Orthonormal basis of the highest-weight vectors of the `n`-magnon sector.
#[derive(Clone, Debug)]
pub struct HighestWeightBasis {
    pub n: usize,
    /// Columns span `mag(n) ∩ ker S⁺`.
    pub vectors: DMatrix<f64>,
    /// Set when `n > ⌊|V|/2⌋`, where the space is empty.
    pub beyond_half: bool,
}

/// Complement of `range(S⁻)` in `mag(n)`, built by pivoted Gram-Schmidt
/// over the standard basis (largest remaining residual first).
pub fn highest_weight_basis(g: &Graph, n: usize) -> Result<HighestWeightBasis> {
    check_n(g, n)?;
    let v = g.vertex_count();
    let dim = binomial(v, n).unwrap_or(0);
    if 2 * n > v {
        return Ok(HighestWeightBasis { n, vectors: DMatrix::zeros(dim, 0), beyond_half: true });
    }
    let range = range_basis(g, n)?;
    let target = dim - range.ncols();
    let mut q: Vec<DVector<f64>> = range.column_iter().map(|c| c.into_owned()).collect();
    let mut residual: Vec<f64> = (0..dim).map(|i| 1.0 - range.row(i).norm_squared()).collect();
    let mut out = Vec::with_capacity(target);
    while out.len() < target {
        let (pivot, _) = residual
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &r)| if r > best.1 { (i, r) } else { best });
        let mut e = DVector::zeros(dim);
        e[pivot] = 1.0;
        let Some(col) = orthogonalize(&q, e) else {
            residual[pivot] = f64::NEG_INFINITY;
            continue;
        };
        for (i, r) in residual.iter_mut().enumerate() {
            *r -= col[i] * col[i];
        }
        residual[pivot] = f64::NEG_INFINITY;
        q.push(col.clone());
        out.push(col);
    }
    let vectors = if out.is_empty() { DMatrix::zeros(dim, 0) } else { DMatrix::from_columns(&out) };
    Ok(HighestWeightBasis { n, vectors, beyond_half: false })
}

/// Numerical rank via singular values, relative threshold `1e-10`.
pub fn numerical_rank(m: &DMatrix<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > 1e-10 * top.max(1.0)).count()
}
