//! Spin-wave trial states on `Λ(d, N)`, the ideal Bose gas on a box, and
//! mode counting.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{arg_err, HeisError, Result};
use crate::graph::{box_points, make_lambda, Graph, LatticeBoxSpec};
use crate::sector::{factorial, hamiltonian_magnon, FunctionSpaceIndex, MagnonBasis};
use crate::sparse::{dot, norm};

/// `γ = π²/2`: `E ≈ γ L⁻² Σ‖κ‖²` for low-lying spin waves.
pub const GAMMA: f64 = PI * PI / 2.0;

/// A lattice mode `κ ∈ {0, 1, …}^d`.
pub type ModeVector = Vec<usize>;

/// Occupation numbers of lattice modes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct OccupationFunction {
    pub d: usize,
    counts: BTreeMap<ModeVector, usize>,
}

impl OccupationFunction {
    pub fn from_modes(d: usize, modes: &[ModeVector]) -> Result<Self> {
        let mut counts = BTreeMap::new();
        for m in modes {
            if m.len() != d {
                return arg_err(format!("mode {m:?} does not have {d} components"));
            }
            *counts.entry(m.clone()).or_insert(0) += 1;
        }
        Ok(OccupationFunction { d, counts })
    }

    /// Total particle number `Σ ν(κ)`.
    pub fn n(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn counts(&self) -> &BTreeMap<ModeVector, usize> {
        &self.counts
    }

    /// Modes repeated by occupation, sorted.
    pub fn modes(&self) -> Vec<ModeVector> {
        self.counts.iter().flat_map(|(m, &c)| std::iter::repeat_n(m.clone(), c)).collect()
    }

    /// `n! / Π ν(κ)!`, the number of distinct mode arrangements.
    pub fn arrangement_count(&self) -> f64 {
        factorial(self.n()) / self.occupation_factorials()
    }

    /// `Π ν(κ)!`.
    pub fn occupation_factorials(&self) -> f64 {
        self.counts.values().map(|&c| factorial(c)).product()
    }

    /// Sum of two occupation functions.
    pub fn plus(&self, other: &OccupationFunction) -> OccupationFunction {
        let mut counts = self.counts.clone();
        for (m, &c) in &other.counts {
            *counts.entry(m.clone()).or_insert(0) += c;
        }
        OccupationFunction { d: self.d, counts }
    }
}

/// `f(ξ, r) = √2 cos(πξ(r - ½))`, with `f(0, r) = 1`.
pub fn f_profile(xi: f64, r: i64) -> f64 {
    if xi == 0.0 {
        1.0
    } else {
        2f64.sqrt() * (PI * xi * (r as f64 - 0.5)).cos()
    }
}

fn mode_value(mode: &[usize], point: &[i64], scale: usize) -> f64 {
    mode.iter().zip(point).map(|(&k, &r)| f_profile(k as f64 / scale as f64, r)).product()
}

/// Distinct orderings of a multiset given as sorted indices.
fn distinct_arrangements(sorted: &[usize]) -> Vec<Vec<usize>> {
    let mut cur = sorted.to_vec();
    let mut out = vec![cur.clone()];
    loop {
        let Some(i) = (0..cur.len().saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            return out;
        };
        let j = (i + 1..cur.len()).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
        out.push(cur.clone());
    }
}

/// Evaluates `Σ_arrangements Π_k g(mode_{a_k}, x_k)` for a tuple of
/// vertices, given a table `values[mode][vertex]`.
struct ArrangementSum {
    arrangements: Vec<Vec<usize>>,
    values: Vec<Vec<f64>>,
}

impl ArrangementSum {
    fn new(occ: &OccupationFunction, points: &[Vec<i64>], scale: usize) -> Self {
        let distinct: Vec<&ModeVector> = occ.counts.keys().collect();
        let sorted: Vec<usize> =
            occ.counts.values().enumerate().flat_map(|(i, &c)| std::iter::repeat_n(i, c)).collect();
        let values = distinct.iter().map(|m| points.iter().map(|p| mode_value(m, p, scale)).collect()).collect();
        ArrangementSum { arrangements: distinct_arrangements(&sorted), values }
    }

    fn eval(&self, tuple: &[usize]) -> f64 {
        self.arrangements
            .iter()
            .map(|a| a.iter().zip(tuple).map(|(&m, &x)| self.values[m][x]).product::<f64>())
            .sum()
    }
}

/// A spin-wave trial vector on the `n`-magnon sector of `Λ(d, N)`.
#[derive(Clone, Debug)]
pub struct TrialState {
    pub d: usize,
    pub n_vertices: usize,
    pub modes: Vec<ModeVector>,
    pub graph: Graph,
    /// Coefficients in the subset basis of the sector.
    pub coefficients: Vec<f64>,
}

/// The trial state `T̃ F` with
/// `F(x) = L^{-nd/2} Σ_π Π_k Π_j f(κ_{k,j}/L⁺, x_{π_k, j})`, `L = L(d,N)`.
pub fn trial_state(d: usize, n_vertices: usize, modes: &[ModeVector]) -> Result<TrialState> {
    let spec = LatticeBoxSpec::new(d, n_vertices)?;
    let occ = OccupationFunction::from_modes(d, modes)?;
    if let Some(m) = modes.iter().find(|m| m.iter().any(|&k| k >= spec.l_plus)) {
        return arg_err(format!("mode {m:?} has a component ≥ L⁺ = {}", spec.l_plus));
    }
    let n = modes.len();
    let graph = make_lambda(d, n_vertices)?;
    if n > graph.vertex_count() {
        return arg_err(format!("{n} modes exceed {n_vertices} sites"));
    }
    let points = &graph.lattice().expect("lambda graphs carry lattice data").points;
    let sum = ArrangementSum::new(&occ, points, spec.l_plus);
    let basis = MagnonBasis::new(graph.vertex_count(), n)?;
    let prefactor =
        factorial(n).sqrt() * occ.occupation_factorials() * (spec.l as f64).powf(-((n * d) as f64) / 2.0);
    let coefficients = (0..basis.dim())
        .into_par_iter()
        .map(|r| prefactor * sum.eval(&basis.unrank(r)))
        .collect();
    Ok(TrialState { d, n_vertices, modes: modes.to_vec(), graph, coefficients })
}

/// `‖(γ⁻¹ L² H − Σ κ²) Ψ̃‖ / ‖Ψ̃‖` with `L = L(d, N)`.
pub fn residual(d: usize, n_vertices: usize, modes: &[ModeVector]) -> Result<f64> {
    let state = trial_state(d, n_vertices, modes)?;
    let l = LatticeBoxSpec::new(d, n_vertices)?.l as f64;
    let h = hamiltonian_magnon(&state.graph, modes.len())?;
    let hv = h.apply(&state.coefficients);
    let target: f64 = modes.iter().flatten().map(|&k| (k * k) as f64).sum();
    let scale = l * l / GAMMA;
    let r: Vec<f64> = hv.iter().zip(&state.coefficients).map(|(a, b)| scale * a - target * b).collect();
    let denom = norm(&state.coefficients);
    if denom == 0.0 {
        return Err(HeisError::Domain("trial state vanishes".into()));
    }
    Ok(norm(&r) / denom)
}

/// Rayleigh quotient `⟨Ψ̃, HΨ̃⟩ / ⟨Ψ̃, Ψ̃⟩` of a trial state.
pub fn trial_energy(state: &TrialState) -> Result<f64> {
    let h = hamiltonian_magnon(&state.graph, state.modes.len())?;
    let hv = h.apply(&state.coefficients);
    Ok(dot(&hv, &state.coefficients) / dot(&state.coefficients, &state.coefficients))
}

/// Inner products `⟨Ψ̃(κ⃗), Ψ̃(κ⃗′)⟩` between trial states with equal `n`.
pub fn gram_matrix(d: usize, n_vertices: usize, tuples: &[Vec<ModeVector>]) -> Result<DMatrix<f64>> {
    if tuples.windows(2).any(|w| w[0].len() != w[1].len()) {
        return arg_err("all mode tuples must have the same length");
    }
    let states: Vec<Vec<f64>> =
        tuples.iter().map(|t| trial_state(d, n_vertices, t).map(|s| s.coefficients)).collect::<Result<_>>()?;
    let k = states.len();
    Ok(DMatrix::from_fn(k, k, |i, j| dot(&states[i], &states[j])))
}

/// Large-`L` limit `n! Σ_π Π_k 1{κ_{π_k} = κ′_k}` of [`gram_matrix`].
pub fn gram_limit(tuples: &[Vec<ModeVector>]) -> DMatrix<f64> {
    let occ: Vec<OccupationFunction> = tuples
        .iter()
        .map(|t| OccupationFunction::from_modes(t.first().map_or(0, |m| m.len()), t).expect("consistent modes"))
        .collect();
    let k = tuples.len();
    DMatrix::from_fn(k, k, |i, j| {
        if occ[i] == occ[j] {
            factorial(occ[i].n()) * occ[i].occupation_factorials()
        } else {
            0.0
        }
    })
}

/// The normalized symmetric Bose-gas eigenfunction `F̃(ν)` on `(B^d(L))^n`,
/// indexed by [`FunctionSpaceIndex`] over the box points in lexicographic
/// order.
pub fn bose_basis(d: usize, l: usize, occ: &OccupationFunction) -> Result<Vec<f64>> {
    if occ.d != d {
        return arg_err("occupation dimension mismatch");
    }
    if let Some(m) = occ.counts.keys().find(|m| m.iter().any(|&k| k >= l)) {
        return arg_err(format!("mode {m:?} outside {{0..{}}}^{d}", l - 1));
    }
    let points = box_points(d, l);
    let n = occ.n();
    let idx = FunctionSpaceIndex::new(points.len(), n)?;
    let sum = ArrangementSum::new(occ, &points, l);
    let prefactor = (l as f64).powf(-((n * d) as f64) / 2.0) / occ.arrangement_count().sqrt();
    Ok((0..idx.dim()).into_par_iter().map(|i| prefactor * sum.eval(&idx.tuple(i))).collect())
}

/// `λ(ν) = Σ_κ ν(κ) Σ_j 2 sin²(πκ_j / 2L)`.
pub fn bose_energy(l: usize, occ: &OccupationFunction) -> f64 {
    occ.counts
        .iter()
        .map(|(m, &c)| {
            c as f64 * m.iter().map(|&k| 2.0 * (PI * k as f64 / (2.0 * l as f64)).sin().powi(2)).sum::<f64>()
        })
        .sum()
}

/// All modes of `{0..L-1}^d`, lexicographic.
pub fn box_modes(d: usize, l: usize) -> Vec<ModeVector> {
    box_points(d, l).into_iter().map(|p| p.into_iter().map(|c| (c - 1) as usize).collect()).collect()
}

/// All occupation functions with `n` particles on the modes of `{0..L-1}^d`.
pub fn enumerate_occupations(d: usize, l: usize, n: usize) -> Vec<OccupationFunction> {
    let modes = box_modes(d, l);
    let mut out = Vec::new();
    let mut pick = Vec::with_capacity(n);
    fn rec(modes: &[ModeVector], start: usize, n: usize, d: usize, pick: &mut Vec<ModeVector>, out: &mut Vec<OccupationFunction>) {
        if pick.len() == n {
            out.push(OccupationFunction::from_modes(d, pick).expect("modes have d components"));
            return;
        }
        for i in start..modes.len() {
            pick.push(modes[i].clone());
            rec(modes, i, n, d, pick, out);
            pick.pop();
        }
    }
    rec(&modes, 0, n, d, &mut pick, &mut out);
    out
}

/// `R(d, n, m)`: multisets of `n` modes in `{0,1,…}^d` with `Σ‖κ‖² = m`.
pub fn mode_count_r(d: usize, n: usize, m: usize) -> u64 {
    let side = (m as f64).sqrt().floor() as usize + 1;
    let weights: Vec<usize> = box_modes(d, side)
        .into_iter()
        .map(|k| k.iter().map(|&c| c * c).sum::<usize>())
        .filter(|&w| w <= m)
        .collect();
    // count[k][s]: multisets of k modes from the first i modes with weight s
    let mut count = vec![vec![0u64; m + 1]; n + 1];
    count[0][0] = 1;
    for &w in &weights {
        for k in 1..=n {
            for s in w..=m {
                count[k][s] += count[k - 1][s - w];
            }
        }
    }
    count[n][m]
}

/// `min{m ≥ 1 : R(d, n, m) > R(d, n-1, m)}`.
pub fn jump_level(d: usize, n: usize) -> Option<usize> {
    if n == 0 || d == 0 {
        return None;
    }
    (1..=4 * n + 4).find(|&m| mode_count_r(d, n, m) > mode_count_r(d, n - 1, m))
}
