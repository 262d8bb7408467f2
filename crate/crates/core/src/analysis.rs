//! Discrete trace and contraction inequalities, the nearest-good-point
//! extension `Ξ`, and distances to the good set.

use std::collections::VecDeque;

use num_complex::Complex64;
use serde::Serialize;

use crate::eigen::highest_weight_spectrum;
use crate::error::{arg_err, HeisError, Result};
use crate::graph::{box_points, make_box, make_lambda, Graph, LatticeBoxSpec};
use crate::sector::{contraction_t_restricted, factorial, free_laplacian, FunctionSpaceIndex, MagnonBasis};
use crate::sparse::{dot, norm};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `|f(1)|² ≤ (2L/3) Σ|f(ℓ) − f(ℓ+1)|² + (2(L−1)/L²) Σ|f(ℓ)|²`.
pub fn trace_check(f: &[Complex64]) -> Result<TraceCheck> {
    let l = f.len();
    if l < 2 {
        return arg_err("trace check needs L >= 2");
    }
    let lf = l as f64;
    let lhs = f[0].norm_sqr();
    let grad: f64 = f.windows(2).map(|w| (w[0] - w[1]).norm_sqr()).sum();
    let mass: f64 = f.iter().map(|z| z.norm_sqr()).sum();
    let rhs = 2.0 * lf / 3.0 * grad + 2.0 * (lf - 1.0) / (lf * lf) * mass;
    Ok(TraceCheck { lhs, rhs, holds: lhs <= rhs * (1.0 + 1e-12) })
}

/// Tuples of `(B^d(L⁺))^n` and their distance to the good set
/// `Λ(d,N)^n` minus the deleted diagonal.
#[derive(Clone, Debug)]
pub struct GoodSet {
    pub d: usize,
    pub n_vertices: usize,
    pub n: usize,
    pub l_plus: usize,
    /// Points of the enclosing box, lexicographic.
    pub points: Vec<Vec<i64>>,
    /// Vertex index in `Λ(d, N)` of each box point, if present.
    pub lambda_index: Vec<Option<usize>>,
    pub index: FunctionSpaceIndex,
    dist: Vec<u32>,
    nearest: Vec<usize>,
}

impl GoodSet {
    pub fn new(d: usize, n_vertices: usize, n: usize) -> Result<Self> {
        let spec = LatticeBoxSpec::new(d, n_vertices)?;
        if n > n_vertices {
            return Err(HeisError::Domain(format!("no {n} distinct points in a set of {n_vertices}")));
        }
        let lambda = make_lambda(d, n_vertices)?;
        let host = make_box(d, spec.l_plus)?;
        let points = box_points(d, spec.l_plus);
        let mut lambda_index = vec![None; points.len()];
        for (s, h) in lambda.embed_into(&host).expect("Λ(d,N) lies in its box").into_iter().enumerate() {
            lambda_index[h] = Some(s);
        }
        let index = FunctionSpaceIndex::new(points.len(), n)?;
        let adj = host.adjacency();
        let mut dist = vec![u32::MAX; index.dim()];
        let mut nearest = vec![usize::MAX; index.dim()];
        let mut queue = VecDeque::new();
        for i in 0..index.dim() {
            let t = index.tuple(i);
            if t.iter().all(|&p| lambda_index[p].is_some()) && !FunctionSpaceIndex::in_deleted_diagonal(&t) {
                dist[i] = 0;
                nearest[i] = i;
                queue.push_back(i);
            }
        }
        // FIFO order finalizes each layer before the next one is expanded,
        // so `nearest` ends up as the minimum over all shortest paths
        while let Some(v) = queue.pop_front() {
            let t = index.tuple(v);
            for k in 0..n {
                for &(q, _) in &adj[t[k]] {
                    let mut s = t.clone();
                    s[k] = q;
                    let u = index.index(&s);
                    if dist[u] == u32::MAX {
                        dist[u] = dist[v] + 1;
                        nearest[u] = nearest[v];
                        queue.push_back(u);
                    } else if dist[u] == dist[v] + 1 && nearest[v] < nearest[u] {
                        nearest[u] = nearest[v];
                    }
                }
            }
        }
        Ok(GoodSet { d, n_vertices, n, l_plus: spec.l_plus, points, lambda_index, index, dist, nearest })
    }

    pub fn is_good(&self, tuple_index: usize) -> bool {
        self.dist[tuple_index] == 0
    }

    /// ℓ¹ distance from a tuple to the good set.
    pub fn distance(&self, tuple_index: usize) -> usize {
        self.dist[tuple_index] as usize
    }

    /// Nearest good tuple, lexicographically smallest among ties.
    pub fn nearest(&self, tuple_index: usize) -> usize {
        self.nearest[tuple_index]
    }

    /// Index of a tuple of points.
    pub fn tuple_index(&self, tuple: &[Vec<i64>]) -> Result<usize> {
        if tuple.len() != self.n {
            return arg_err(format!("expected {} points, got {}", self.n, tuple.len()));
        }
        let mut idx = Vec::with_capacity(self.n);
        for p in tuple {
            if p.len() != self.d || p.iter().any(|&c| c < 1 || c > self.l_plus as i64) {
                return arg_err(format!("point {p:?} outside the box of side {}", self.l_plus));
            }
            idx.push(crate::graph::point_id(p, self.l_plus) as usize);
        }
        Ok(self.index.index(&idx))
    }

    /// `Ξ Ψ`: the symmetric function equal to `Ψ(X)/√n!` on good tuples and
    /// extended to the rest of the box by nearest-good-point lookup. The
    /// lookup is done on the sorted tuple so that the output is symmetric.
    pub fn extend(&self, psi: &[f64]) -> Result<Vec<f64>> {
        let basis = MagnonBasis::new(self.n_vertices, self.n)?;
        if psi.len() != basis.dim() {
            return arg_err(format!("vector has {} entries, sector has {}", psi.len(), basis.dim()));
        }
        let scale = 1.0 / factorial(self.n).sqrt();
        let mut out = vec![0.0; self.index.dim()];
        for (i, o) in out.iter_mut().enumerate() {
            let mut t = self.index.tuple(i);
            t.sort_unstable();
            let good = self.index.tuple(self.nearest[self.index.index(&t)]);
            let verts: Vec<usize> = good.iter().map(|&p| self.lambda_index[p].expect("good tuple")).collect();
            *o = scale * psi[basis.rank_unsorted(&verts)];
        }
        Ok(out)
    }
}

/// `ρ(R)` for a tuple of points of `B^d(L⁺)`.
pub fn rho(d: usize, n_vertices: usize, r: &[Vec<i64>]) -> Result<usize> {
    let gs = GoodSet::new(d, n_vertices, r.len())?;
    Ok(gs.distance(gs.tuple_index(r)?))
}

/// `nd + n max{n − 1, (n − 1)(2n − 2)}`.
pub fn rho_max(n: usize, d: usize) -> usize {
    let k = n.saturating_sub(1);
    n * d + n * k.max(k * (2 * n).saturating_sub(2))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DeficitCheck {
    /// `‖F‖² − ‖T̃F‖²`.
    pub deficit: f64,
    pub bound: f64,
    pub holds: bool,
    /// `2nL/3`.
    pub kinetic_coefficient: f64,
    /// `4n²d/⌊L/2⌋`.
    pub mass_coefficient: f64,
}

/// Tests `‖F‖² − ‖T̃F‖² ≤ (2nL/3)⟨F, 𝔥F⟩ + (4n²d/⌊L/2⌋)‖F‖²` with
/// `L = L⁺(d,N)` and `𝔥` the free Laplacian of `B^d(L)`.
pub fn contraction_deficit(d: usize, n_vertices: usize, n: usize, f: &[f64]) -> Result<DeficitCheck> {
    let spec = LatticeBoxSpec::new(d, n_vertices)?;
    let l = spec.l_plus;
    if l < 2 {
        return arg_err("the deficit bound needs L⁺ >= 2");
    }
    let host = make_box(d, l)?;
    let sub = make_lambda(d, n_vertices)?;
    let idx = FunctionSpaceIndex::new(host.vertex_count(), n)?;
    if f.len() != idx.dim() {
        return arg_err(format!("function has {} values, expected {}", f.len(), idx.dim()));
    }
    check_symmetric(f, &idx)?;
    let t = contraction_t_restricted(&host, &sub, n)?;
    let tf = t.apply(f);
    let h = free_laplacian(&host, n)?;
    let mass = dot(f, f);
    let kinetic = dot(f, &h.apply(f));
    let kinetic_coefficient = 2.0 * (n * l) as f64 / 3.0;
    let mass_coefficient = 4.0 * (n * n * d) as f64 / (l / 2) as f64;
    let deficit = mass - dot(&tf, &tf);
    let bound = kinetic_coefficient * kinetic + mass_coefficient * mass;
    Ok(DeficitCheck {
        deficit,
        bound,
        holds: deficit <= bound * (1.0 + 1e-10) + 1e-14,
        kinetic_coefficient,
        mass_coefficient,
    })
}

fn check_symmetric(f: &[f64], idx: &FunctionSpaceIndex) -> Result<()> {
    let scale = f.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    for i in 0..idx.dim() {
        let t = idx.tuple(i);
        for k in 0..idx.n.saturating_sub(1) {
            let mut s = t.clone();
            s.swap(k, k + 1);
            if (f[i] - f[idx.index(&s)]).abs() > 1e-10 * scale {
                return arg_err(format!("function is not symmetric at tuple {t:?}"));
            }
        }
    }
    Ok(())
}

/// `Ξ` as a free function.
pub fn extension_xi(d: usize, n_vertices: usize, n: usize, psi: &[f64]) -> Result<Vec<f64>> {
    GoodSet::new(d, n_vertices, n)?.extend(psi)
}

#[derive(Clone, Debug, Serialize)]
pub struct EnergyRatio {
    pub max_ratio: f64,
    /// `(E, ⟨ΞΨ, 𝔥ΞΨ⟩ / E)` per highest-weight eigenvector.
    pub ratios: Vec<(f64, f64)>,
}

/// `⟨ΞΨ, 𝔥ΞΨ⟩ / ⟨Ψ, HΨ⟩` over the highest-weight eigenvectors of
/// `H|mag(n)` on `Λ(d, N)`.
pub fn energy_ratio(d: usize, n_vertices: usize, n: usize) -> Result<EnergyRatio> {
    let lambda: Graph = make_lambda(d, n_vertices)?;
    let gs = GoodSet::new(d, n_vertices, n)?;
    let host = make_box(d, gs.l_plus)?;
    let h_free = free_laplacian(&host, n)?;
    let (values, vectors) = highest_weight_spectrum(&lambda, n)?;
    let mut ratios = Vec::new();
    for (k, &e) in values.iter().enumerate() {
        if e <= 1e-12 {
            continue;
        }
        let psi: Vec<f64> = vectors.column(k).iter().copied().collect();
        let psi_norm = norm(&psi);
        let xi = gs.extend(&psi)?;
        let num = dot(&xi, &h_free.apply(&xi));
        ratios.push((e, num / (e * psi_norm * psi_norm)));
    }
    let max_ratio = ratios.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    Ok(EnergyRatio { max_ratio, ratios })
}
