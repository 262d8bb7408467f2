//! Dense and Krylov eigensolvers, spectral counting and total-spin labels.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{arg_err, HeisError, Result};
use crate::graph::Graph;
use crate::sector::{casimir_magnon, hamiltonian_magnon, highest_weight_basis};
use crate::sparse::{dot, norm, SparseOp};

/// Default dimension limit of the dense path.
pub const DENSE_BUDGET: usize = 4096;

/// Absolute gap below which eigenvalues are treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// Tolerance on `|s(s+1) - c|` when assigning spin labels.
pub const LABEL_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dense,
    Krylov,
}

#[derive(Clone, Debug)]
pub struct EigResult {
    /// Ascending.
    pub values: Vec<f64>,
    /// Matching orthonormal eigenvectors as columns, if requested.
    pub vectors: Option<DMatrix<f64>>,
    pub residual_norms: Vec<f64>,
    pub method: Method,
}

/// Eigen-decomposition of a dense symmetric matrix, ascending order.
pub fn dense_eigh(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_columns(&order.iter().map(|&i| eig.eigenvectors.column(i)).collect::<Vec<_>>());
    (values, vectors)
}

/// All eigenvalues (and optionally eigenvectors) of a symmetric operator.
pub fn full_spectrum(op: &SparseOp, with_vectors: bool) -> Result<EigResult> {
    if !op.is_symmetric() {
        return arg_err("full_spectrum needs a symmetric operator");
    }
    if op.nrows() > DENSE_BUDGET {
        return Err(HeisError::Size(format!(
            "dimension {} exceeds the dense budget of {DENSE_BUDGET}; use the Krylov solver",
            op.nrows()
        )));
    }
    let a = op.to_dense();
    let (values, vectors) = dense_eigh(a.clone());
    let residual_norms = (0..values.len())
        .map(|k| {
            let v = vectors.column(k);
            (&a * v - v * values[k]).norm()
        })
        .collect();
    Ok(EigResult {
        values,
        vectors: with_vectors.then_some(vectors),
        residual_norms,
        method: Method::Dense,
    })
}

#[derive(Clone, Debug)]
pub struct LanczosOptions {
    /// Residual tolerance relative to `max(1, ‖A‖)`.
    pub tol: f64,
    pub seed: u64,
    /// Krylov basis size before a restart.
    pub krylov_dim: usize,
    pub max_restarts: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions { tol: 1e-10, seed: 0, krylov_dim: 200, max_restarts: 400 }
    }
}

#[derive(Clone, Debug)]
pub struct MinEig {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

struct Deflation<'a> {
    cols: Option<&'a DMatrix<f64>>,
}

impl Deflation<'_> {
    fn project(&self, v: &mut [f64]) {
        let Some(q) = self.cols else { return };
        for _ in 0..2 {
            for col in q.column_iter() {
                let c: f64 = col.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
                for (x, a) in v.iter_mut().zip(col.iter()) {
                    *x -= c * a;
                }
            }
        }
    }
}

fn orthogonalize_against(v: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = dot(b, v);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
    }
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize, defl: &Deflation, basis: &[Vec<f64>]) -> Option<Vec<f64>> {
    for _ in 0..4 {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        defl.project(&mut v);
        orthogonalize_against(&mut v, basis);
        defl.project(&mut v);
        let r = norm(&v);
        if r > 1e-8 {
            v.iter_mut().for_each(|x| *x /= r);
            return Some(v);
        }
    }
    None
}

/// Smallest eigenpair of `P A P` on the orthogonal complement of the
/// deflation columns (Lanczos, full reorthogonalization, explicit restart).
pub fn min_eig(op: &SparseOp, deflate: Option<&DMatrix<f64>>, opts: &LanczosOptions) -> Result<MinEig> {
    if !op.is_symmetric() {
        return arg_err("min_eig needs a symmetric operator");
    }
    let dim = op.nrows();
    let k = deflate.map_or(0, |q| q.ncols());
    if let Some(q) = deflate {
        if q.nrows() != dim {
            return arg_err("deflation columns have the wrong length");
        }
        let err = (q.transpose() * q - DMatrix::identity(k, k)).amax();
        if err > 1e-10 {
            return arg_err(format!("deflation columns are not orthonormal (error {err:e})"));
        }
    }
    if k >= dim {
        return Err(HeisError::Domain("deflation space fills the whole space".into()));
    }
    let defl = Deflation { cols: deflate };
    let scale = op.norm_bound().max(1.0);
    let threshold = opts.tol * scale;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut start = random_unit(&mut rng, dim, &defl, &[])
        .ok_or_else(|| HeisError::Numerical("could not draw a start vector".into()))?;
    let m_max = opts.krylov_dim.max(2).min(dim - k);
    let mut best: Option<MinEig> = None;
    let mut iterations = 0;

    for _ in 0..opts.max_restarts.max(1) {
        let mut basis: Vec<Vec<f64>> = vec![start.clone()];
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        loop {
            let j = basis.len() - 1;
            let mut w = op.apply(&basis[j]);
            defl.project(&mut w);
            iterations += 1;
            let alpha = dot(&basis[j], &w);
            alphas.push(alpha);
            orthogonalize_against(&mut w, &basis);
            defl.project(&mut w);
            if basis.len() >= m_max {
                break;
            }
            let beta = norm(&w);
            if beta > 1e-12 * scale {
                w.iter_mut().for_each(|x| *x /= beta);
                betas.push(beta);
                basis.push(w);
            } else {
                // invariant subspace reached; continue with a fresh direction
                match random_unit(&mut rng, dim, &defl, &basis) {
                    Some(v) => {
                        betas.push(0.0);
                        basis.push(v);
                    }
                    None => break,
                }
            }
        }
        let m = alphas.len();
        let mut t = DMatrix::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = alphas[i];
            if i + 1 < m {
                t[(i, i + 1)] = betas[i];
                t[(i + 1, i)] = betas[i];
            }
        }
        let (_, y) = dense_eigh(t);
        let mut x = vec![0.0; dim];
        for (i, b) in basis.iter().enumerate().take(m) {
            let c = y[(i, 0)];
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += c * bi;
            }
        }
        defl.project(&mut x);
        let r = norm(&x);
        x.iter_mut().for_each(|v| *v /= r);
        let mut ax = op.apply(&x);
        defl.project(&mut ax);
        let value = dot(&x, &ax);
        let residual = ax.iter().zip(&x).map(|(a, b)| (a - value * b).powi(2)).sum::<f64>().sqrt();
        let candidate = MinEig { value, vector: x.clone(), residual, iterations };
        if best.as_ref().is_none_or(|b| residual < b.residual) {
            best = Some(candidate.clone());
        }
        if residual <= threshold || m >= dim - k {
            return Ok(candidate);
        }
        start = x;
    }
    let best = best.expect("at least one restart ran");
    Err(HeisError::Convergence {
        iterations,
        best_value: best.value,
        residual: best.residual,
        best_vector: best.vector,
    })
}

/// Number of eigenvalues at or below `e` (up to the degeneracy tolerance).
pub fn spectral_count(values: &[f64], e: f64) -> usize {
    values.iter().filter(|&&v| v <= e + DEGENERACY_TOL).count()
}

/// `spectral_count` of an operator through its full spectrum.
pub fn spectral_count_op(op: &SparseOp, e: f64) -> Result<usize> {
    Ok(spectral_count(&full_spectrum(op, false)?.values, e))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpinLevel {
    pub energy: f64,
    /// Spin deviate, total spin `|V|/2 - n'`.
    pub n_prime: usize,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpinLabeledSpectrum {
    pub vertex_count: usize,
    pub n: usize,
    pub levels: Vec<SpinLevel>,
    /// Spin deviate of each eigenvector, in eigenvalue order.
    pub labels: Vec<usize>,
}

impl SpinLabeledSpectrum {
    /// Energies with spin deviate `n'`, repeated by multiplicity.
    pub fn energies_with(&self, n_prime: usize) -> Vec<f64> {
        self.levels
            .iter()
            .filter(|l| l.n_prime == n_prime)
            .flat_map(|l| std::iter::repeat_n(l.energy, l.multiplicity))
            .collect()
    }
}

/// Groups indices of sorted values into runs closer than the tolerance.
pub fn degenerate_groups(values: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut groups = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > tol {
            groups.push(start..i);
            start = i;
        }
    }
    groups
}

/// Assigns a spin deviate to every eigenvector of `H|mag(n)` by
/// diagonalizing the Casimir inside each degenerate eigenspace.
pub fn label_spins(g: &Graph, n: usize, eig: &EigResult) -> Result<SpinLabeledSpectrum> {
    let Some(vectors) = eig.vectors.as_ref() else {
        return arg_err("label_spins needs eigenvectors");
    };
    let v = g.vertex_count();
    let casimir = casimir_magnon(g, n)?;
    if casimir.nrows() != vectors.nrows() {
        return arg_err("eigenvectors do not live on the requested sector");
    }
    let mut levels = Vec::new();
    let mut labels = vec![0; eig.values.len()];
    for range in degenerate_groups(&eig.values, DEGENERACY_TOL) {
        let cols = vectors.columns(range.start, range.len()).into_owned();
        let mut c_cols = DMatrix::zeros(cols.nrows(), cols.ncols());
        for (j, col) in cols.column_iter().enumerate() {
            let y = casimir.apply(col.as_slice());
            c_cols.set_column(j, &DVector::from_vec(y));
        }
        let restricted = cols.transpose() * c_cols;
        let restricted = (&restricted + restricted.transpose()) * 0.5;
        let (cvals, _) = dense_eigh(restricted);
        let energy = eig.values[range.clone()].iter().sum::<f64>() / range.len() as f64;
        let mut counts: Vec<(usize, usize)> = Vec::new();
        for (offset, &c) in cvals.iter().enumerate() {
            let s = (-1.0 + (1.0 + 4.0 * c.max(0.0)).sqrt()) / 2.0;
            let n_prime = (v as f64 / 2.0 - s).round();
            let s_exact = v as f64 / 2.0 - n_prime;
            if n_prime < 0.0 || n_prime as usize > n || (s_exact * (s_exact + 1.0) - c).abs() > LABEL_TOL {
                return Err(HeisError::Labeling { value: c });
            }
            let n_prime = n_prime as usize;
            labels[range.start + offset] = n_prime;
            match counts.iter_mut().find(|e| e.0 == n_prime) {
                Some(e) => e.1 += 1,
                None => counts.push((n_prime, 1)),
            }
        }
        counts.sort();
        for (n_prime, multiplicity) in counts {
            levels.push(SpinLevel { energy, n_prime, multiplicity });
        }
    }
    Ok(SpinLabeledSpectrum { vertex_count: v, n, levels, labels })
}

/// Full spin-labeled spectrum of the `n`-magnon sector.
pub fn sector_spectrum(g: &Graph, n: usize) -> Result<SpinLabeledSpectrum> {
    let h = hamiltonian_magnon(g, n)?;
    let eig = full_spectrum(&h, true)?;
    label_spins(g, n, &eig)
}

/// Spectrum of `H` on the highest-weight subspace of `mag(n)`, with the
/// eigenvectors expressed in the sector basis.
pub fn highest_weight_spectrum(g: &Graph, n: usize) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let hw = highest_weight_basis(g, n)?;
    let q = hw.vectors;
    if q.ncols() == 0 {
        return Ok((Vec::new(), DMatrix::zeros(q.nrows(), 0)));
    }
    let h = hamiltonian_magnon(g, n)?;
    let mut hq = DMatrix::zeros(q.nrows(), q.ncols());
    for (j, col) in q.column_iter().enumerate() {
        hq.set_column(j, &DVector::from_vec(h.apply(col.as_slice())));
    }
    let small = q.transpose() * hq;
    let small = (&small + small.transpose()) * 0.5;
    let (values, y) = dense_eigh(small);
    Ok((values, q * y))
}

/// Spectrum of the Hamiltonian on the whole product space, assembled from
/// all magnon sectors.
pub fn assembled_spectrum(g: &Graph) -> Result<Vec<f64>> {
    let mut all = Vec::new();
    for n in 0..=g.vertex_count() {
        all.extend(full_spectrum(&hamiltonian_magnon(g, n)?, false)?.values);
    }
    all.sort_by(f64::total_cmp);
    Ok(all)
}
