//! The free n-particle space `ℓ²(V^n)`, its Laplacian and the contraction
//! onto the magnon sector.

use super::basis::MagnonBasis;
use crate::error::{arg_err, HeisError, Result};
use crate::graph::Graph;
use crate::sparse::SparseOp;

/// Largest `|V|^n` the free-space builders accept.
pub const MAX_FUNCTION_DIM: usize = 1 << 22;

/// Base-`|V|` indexing of tuples `(x_1..x_n)`, `x_1` most significant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FunctionSpaceIndex {
    pub n: usize,
    pub v: usize,
    dim: usize,
}

impl FunctionSpaceIndex {
    pub fn new(v: usize, n: usize) -> Result<Self> {
        let dim = (0..n)
            .try_fold(1usize, |acc, _| acc.checked_mul(v))
            .filter(|&d| d <= MAX_FUNCTION_DIM)
            .ok_or_else(|| HeisError::Size(format!("{v}^{n} exceeds {MAX_FUNCTION_DIM} tuples")))?;
        Ok(FunctionSpaceIndex { n, v, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn index(&self, tuple: &[usize]) -> usize {
        tuple.iter().fold(0, |acc, &x| acc * self.v + x)
    }

    pub fn tuple(&self, mut i: usize) -> Vec<usize> {
        let mut t = vec![0; self.n];
        for k in (0..self.n).rev() {
            t[k] = i % self.v;
            i /= self.v;
        }
        t
    }

    /// Membership in the deleted diagonal: some coordinate repeats.
    pub fn in_deleted_diagonal(tuple: &[usize]) -> bool {
        (0..tuple.len()).any(|i| (i + 1..tuple.len()).any(|j| tuple[i] == tuple[j]))
    }
}

/// Sum over particles of the single-particle Laplacian (½ convention).
pub fn free_laplacian(g: &Graph, n: usize) -> Result<SparseOp> {
    let idx = FunctionSpaceIndex::new(g.vertex_count(), n)?;
    let adj = g.adjacency();
    let mut triplets = Vec::new();
    for i in 0..idx.dim() {
        let t = idx.tuple(i);
        let mut diag = 0.0;
        for k in 0..n {
            for &(b, j) in &adj[t[k]] {
                if j == 0.0 {
                    continue;
                }
                diag += 0.5 * j;
                let mut s = t.clone();
                s[k] = b;
                let c = idx.index(&s);
                if i < c {
                    triplets.push((i, c, -0.5 * j));
                }
            }
        }
        if diag != 0.0 {
            triplets.push((i, i, diag));
        }
    }
    SparseOp::from_triplets(idx.dim(), idx.dim(), true, triplets)
}

/// Contraction `T`: `F ↦ (1/√n!) Σ F(x) Ω(x_1..x_n)` from `ℓ²(V^n)` onto
/// `mag(n)`. Tuples with a repeated vertex map to zero.
pub fn contraction_t(g: &Graph, n: usize) -> Result<SparseOp> {
    let map: Vec<Option<usize>> = (0..g.vertex_count()).map(Some).collect();
    contraction_embedded(g.vertex_count(), &map, g.vertex_count(), n)
}

/// Contraction composed with restriction from a host graph: functions on
/// `host^n` are restricted to tuples inside `sub` and then contracted onto
/// the `n`-magnon sector of `sub`.
pub fn contraction_t_restricted(host: &Graph, sub: &Graph, n: usize) -> Result<SparseOp> {
    let Some(into_host) = sub.embed_into(host) else {
        return arg_err("subgraph vertices are not all present in the host graph");
    };
    let mut map = vec![None; host.vertex_count()];
    for (s, &h) in into_host.iter().enumerate() {
        map[h] = Some(s);
    }
    contraction_embedded(host.vertex_count(), &map, sub.vertex_count(), n)
}

fn contraction_embedded(host_v: usize, map: &[Option<usize>], sub_v: usize, n: usize) -> Result<SparseOp> {
    if n > sub_v {
        return arg_err(format!("magnon number {n} exceeds {sub_v} vertices"));
    }
    let idx = FunctionSpaceIndex::new(host_v, n)?;
    let basis = MagnonBasis::new(sub_v, n)?;
    let scale = 1.0 / factorial(n).sqrt();
    let mut triplets = Vec::new();
    for i in 0..idx.dim() {
        let t = idx.tuple(i);
        let Some(image) = t.iter().map(|&x| map[x]).collect::<Option<Vec<usize>>>() else {
            continue;
        };
        if FunctionSpaceIndex::in_deleted_diagonal(&image) {
            continue;
        }
        triplets.push((basis.rank_unsorted(&image), i, scale));
    }
    SparseOp::from_triplets(basis.dim(), idx.dim(), false, triplets)
}

/// `Ŝ`: `G(x_1..x_{n+1}) = Σ_k F(x with the k-th entry removed)`.
pub fn lower_function(f: &[f64], v: usize, n: usize) -> Result<Vec<f64>> {
    let from = FunctionSpaceIndex::new(v, n)?;
    let to = FunctionSpaceIndex::new(v, n + 1)?;
    if f.len() != from.dim() {
        return arg_err(format!("function has {} values, expected {}", f.len(), from.dim()));
    }
    let mut g = vec![0.0; to.dim()];
    for (i, out) in g.iter_mut().enumerate() {
        let t = to.tuple(i);
        let mut acc = 0.0;
        for k in 0..=n {
            let mut s = t.clone();
            s.remove(k);
            acc += f[from.index(&s)];
        }
        *out = acc;
    }
    Ok(g)
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}
