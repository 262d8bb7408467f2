//! Lowest energies per spin deviate, ordering checks, and the diluted
//! growth sequences along the `Λ(d, N)` family.

use rayon::prelude::*;
use serde::Serialize;

use crate::eigen::{dense_eigh, min_eig, LanczosOptions, Method};
use crate::error::{arg_err, HeisError, Result};
use crate::graph::{make_lambda, Graph};
use crate::sector::{casimir_magnon, hamiltonian_magnon, lowering_matrix};
use crate::sparse::SparseOp;

/// Absolute tolerance for comparisons between energy levels.
pub const ENERGY_TOL: f64 = 1e-9;

/// Sector dimension up to which `EnergyMethod::Auto` uses the dense path.
pub const AUTO_DENSE_LIMIT: usize = 1500;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EnergyMethod {
    #[default]
    Auto,
    Dense,
    Krylov,
}

#[derive(Clone, Debug)]
pub struct EnergyOptions {
    pub method: EnergyMethod,
    pub lanczos: LanczosOptions,
}

impl Default for EnergyOptions {
    fn default() -> Self {
        EnergyOptions { method: EnergyMethod::Auto, lanczos: LanczosOptions::default() }
    }
}

/// `E_n(G, J)` with default options: the lowest energy among states of
/// total spin `|V|/2 - n`. `+∞` when `n > ⌊|V|/2⌋`.
pub fn energy_level(g: &Graph, n: usize) -> Result<f64> {
    energy_level_with(g, n, &EnergyOptions::default())
}

pub fn energy_level_with(g: &Graph, n: usize, opts: &EnergyOptions) -> Result<f64> {
    let v = g.vertex_count();
    if 2 * n > v {
        return Ok(f64::INFINITY);
    }
    if n == 0 {
        return Ok(0.0);
    }
    let h = hamiltonian_magnon(g, n)?;
    let method = match opts.method {
        EnergyMethod::Auto if h.nrows() <= AUTO_DENSE_LIMIT => Method::Dense,
        EnergyMethod::Auto => Method::Krylov,
        EnergyMethod::Dense => Method::Dense,
        EnergyMethod::Krylov => Method::Krylov,
    };
    // H commutes with S⁻S⁺, whose nonzero eigenvalues on mag(n) are at least
    // 2(|V|/2 - n + 1); a large enough multiple lifts the range of S⁻ above
    // every highest-weight level.
    let m = v as f64 / 2.0 - n as f64;
    let shift = (h.norm_bound() + 1.0) / (m + 1.0);
    match method {
        Method::Dense => {
            let low = lowering_matrix(g, n)?.to_dense();
            let a = h.to_dense() + &low * low.transpose() * shift;
            let (values, _) = dense_eigh(a);
            Ok(values[0])
        }
        Method::Krylov => {
            let lowered = casimir_magnon(g, n)?.add_scaled(&SparseOp::scaled_identity(h.nrows(), m * m + m), -1.0)?;
            let op = h.add_scaled(&lowered, shift)?;
            Ok(min_eig(&op, None, &opts.lanczos)?.value)
        }
    }
}

/// `E_{n'}` for `n' ∈ {0..=n_max}`.
pub fn energy_levels(g: &Graph, n_max: usize, opts: &EnergyOptions) -> Result<Vec<f64>> {
    (0..=n_max).into_par_iter().map(|n| energy_level_with(g, n, opts)).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct FoelVerdict {
    pub n: usize,
    pub strict: bool,
    pub holds: bool,
    /// `(n', E_{n'})` pairs breaking the ordering.
    pub violations: Vec<(usize, f64)>,
    pub tolerance: f64,
    /// `(n', E_{n'})` for `n' ∈ {n..⌊|V|/2⌋}`.
    pub energies: Vec<(usize, f64)>,
    /// `min_{n' > n} E_{n'} - E_n`; `None` when there is no such `n'`.
    pub min_margin: Option<f64>,
    pub complete: bool,
    pub error: Option<String>,
    /// The strict variant for non-unit couplings is an extension of the
    /// unit-coupling definition.
    pub strict_on_couplings: bool,
}

/// Checks `E_{n'} ≥ E_n` (strict: `>` for `n' > n`) for all `n' ≥ n`.
pub fn foel_check(g: &Graph, n: usize, strict: bool, tol: f64) -> Result<FoelVerdict> {
    foel_check_with(g, n, strict, tol, &EnergyOptions::default())
}

pub fn foel_check_with(g: &Graph, n: usize, strict: bool, tol: f64, opts: &EnergyOptions) -> Result<FoelVerdict> {
    let half = g.vertex_count() / 2;
    if n > half {
        return arg_err(format!("level {n} exceeds ⌊|V|/2⌋ = {half}"));
    }
    let levels: Vec<(usize, Result<f64>)> =
        (n..=half).into_par_iter().map(|k| (k, energy_level_with(g, k, opts))).collect();
    let mut energies = Vec::new();
    let mut error = None;
    for (k, e) in levels {
        match e {
            Ok(e) => energies.push((k, e)),
            Err(err) => {
                error.get_or_insert_with(|| format!("E_{k}: {err}"));
            }
        }
    }
    let strict_on_couplings = strict && g.couplings().iter().any(|&j| j != 1.0);
    let Some(&(_, base)) = energies.first().filter(|e| e.0 == n) else {
        return Ok(FoelVerdict {
            n,
            strict,
            holds: false,
            violations: Vec::new(),
            tolerance: tol,
            energies,
            min_margin: None,
            complete: false,
            error,
            strict_on_couplings,
        });
    };
    let violations: Vec<(usize, f64)> = energies
        .iter()
        .filter(|&&(k, e)| k > n && if strict { e <= base + tol } else { e < base - tol })
        .copied()
        .collect();
    let min_margin = energies.iter().filter(|e| e.0 > n).map(|e| e.1 - base).reduce(f64::min);
    Ok(FoelVerdict {
        n,
        strict,
        holds: violations.is_empty() && error.is_none(),
        violations,
        tolerance: tol,
        energies,
        min_margin,
        complete: error.is_none(),
        error,
        strict_on_couplings,
    })
}

/// Which branch of the extension step produced the couplings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DilutionCase {
    /// Unit couplings already give an energy no larger than before.
    FullCoupling,
    /// Interpolated couplings matching the previous energy.
    Interpolated,
}

#[derive(Clone, Debug)]
pub struct Dilution {
    pub graph: Graph,
    pub energy: f64,
    pub t_star: f64,
    pub case: DilutionCase,
}

/// Couplings `(1 - t) J_prev + t` on edges inherited from `prev`, `t` on new
/// edges.
pub fn interpolated_couplings(prev: &Graph, next: &Graph, t: f64) -> Result<Vec<f64>> {
    let Some(map) = prev.embed_into(next) else {
        return arg_err("next graph does not contain the previous graph's vertices");
    };
    let mut inherited = vec![None; next.edge_count()];
    for (&(a, b), &j) in prev.edges().iter().zip(prev.couplings()) {
        let (x, y) = (map[a].min(map[b]), map[a].max(map[b]));
        match next.edges().binary_search(&(x, y)) {
            Ok(e) => inherited[e] = Some(j),
            Err(_) => return arg_err("next graph drops an edge of the previous graph"),
        }
    }
    Ok(inherited.into_iter().map(|j| j.map_or(t, |j| (1.0 - t) * j + t)).collect())
}

/// One step of the diluted extension: pick couplings on `next` so that the
/// `n`-level energy does not rise above `prev_energy`.
pub fn dilute_extend(
    prev: &Graph,
    prev_energy: f64,
    next: &Graph,
    n: usize,
    tol: f64,
    opts: &EnergyOptions,
) -> Result<Dilution> {
    if !prev_energy.is_finite() {
        return arg_err("previous energy is infinite; the sequence must start at |V| = 2n");
    }
    if !next.is_one_vertex_extension_of(prev) {
        return arg_err("next graph must add exactly one vertex and keep every edge");
    }
    let energy_at = |t: f64| -> Result<(Graph, f64)> {
        let g = next.with_couplings(interpolated_couplings(prev, next, t)?)?;
        let e = energy_level_with(&g, n, opts)?;
        Ok((g, e))
    };
    let (full, e_full) = energy_at(1.0)?;
    if e_full <= prev_energy + tol {
        return Ok(Dilution { graph: full, energy: e_full, t_star: 1.0, case: DilutionCase::FullCoupling });
    }
    let grid: Vec<f64> = (0..16).map(|i| i as f64 / 15.0).collect();
    let scan: Vec<f64> = grid.par_iter().map(|&t| energy_at(t).map(|r| r.1)).collect::<Result<_>>()?;
    if let Some(w) = scan.windows(2).position(|w| w[1] < w[0] - tol) {
        return Err(HeisError::Numerical(format!(
            "energy decreases along the interpolation between t = {} ({}) and t = {} ({})",
            grid[w],
            scan[w],
            grid[w + 1],
            scan[w + 1]
        )));
    }
    let Some(last_below) = scan.iter().rposition(|&e| e <= prev_energy + tol) else {
        return Err(HeisError::Numerical(format!(
            "no interpolation parameter reaches the previous energy {prev_energy} (E(0) = {})",
            scan[0]
        )));
    };
    let (mut lo, mut hi) = (grid[last_below], grid[(last_below + 1).min(15)]);
    if last_below == 15 {
        hi = 1.0;
    }
    for _ in 0..60 {
        if hi - lo <= f64::EPSILON {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if energy_at(mid)?.1 <= prev_energy + tol {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (graph, energy) = energy_at(lo)?;
    if (energy - prev_energy).abs() > 10.0 * tol {
        return Err(HeisError::Numerical(format!(
            "bisection ended at t = {lo} with energy {energy}, target {prev_energy}"
        )));
    }
    Ok(Dilution { graph, energy, t_star: lo, case: DilutionCase::Interpolated })
}

/// A growth sequence `G_{2n} ⊂ … ⊂ G_N` with diluted couplings.
#[derive(Clone, Debug)]
pub struct DilutedSequence {
    pub n: usize,
    /// Vertex counts of the graphs.
    pub sizes: Vec<usize>,
    /// Graphs carrying their couplings `J_k`.
    pub graphs: Vec<Graph>,
    /// Interpolation parameter of each step (`1` for the first graph).
    pub t: Vec<f64>,
    pub energies: Vec<f64>,
}

/// Named invariants of a diluted sequence with their status.
#[derive(Clone, Debug, Serialize)]
pub struct DilutionInvariants {
    pub couplings_at_most_one: bool,
    pub final_couplings_unit: bool,
    pub couplings_nondecreasing: bool,
    pub energies_nonincreasing: bool,
}

impl DilutionInvariants {
    pub fn all(&self) -> bool {
        self.couplings_at_most_one
            && self.final_couplings_unit
            && self.couplings_nondecreasing
            && self.energies_nonincreasing
    }
}

impl DilutedSequence {
    /// Builds the sequence along `graphs` (unit couplings), starting with
    /// `J ≡ 1` on the first graph.
    pub fn build(graphs: &[Graph], n: usize, tol: f64, opts: &EnergyOptions) -> Result<Self> {
        let first = graphs.first().ok_or_else(|| HeisError::Argument("empty graph sequence".into()))?;
        let mut seq = DilutedSequence {
            n,
            sizes: vec![first.vertex_count()],
            graphs: vec![first.clone()],
            t: vec![1.0],
            energies: vec![energy_level_with(first, n, opts)?],
        };
        for next in &graphs[1..] {
            let prev = seq.graphs.last().unwrap();
            let step = dilute_extend(prev, *seq.energies.last().unwrap(), next, n, tol, opts)?;
            seq.sizes.push(next.vertex_count());
            seq.t.push(step.t_star);
            seq.energies.push(step.energy);
            seq.graphs.push(step.graph);
        }
        Ok(seq)
    }

    pub fn check_invariants(&self, tol: f64) -> DilutionInvariants {
        let last = self.graphs.last();
        let mut nondecreasing = true;
        for w in self.graphs.windows(2) {
            let Some(map) = w[0].embed_into(&w[1]) else {
                nondecreasing = false;
                continue;
            };
            for (&(a, b), &j) in w[0].edges().iter().zip(w[0].couplings()) {
                if w[1].coupling_between(map[a], map[b]).is_none_or(|j2| j2 < j - tol) {
                    nondecreasing = false;
                }
            }
        }
        DilutionInvariants {
            couplings_at_most_one: self.graphs.iter().all(|g| g.couplings().iter().all(|&j| j <= 1.0 + tol)),
            final_couplings_unit: last.is_some_and(|g| g.couplings().iter().all(|&j| (j - 1.0).abs() <= tol)),
            couplings_nondecreasing: nondecreasing,
            energies_nonincreasing: self.energies.windows(2).all(|w| w[1] <= w[0] + tol),
        }
    }
}

/// Smallest index `k ≥ from` at which `seq[k]` equals the running minimum
/// of `seq[..=k]`. Indices are labelled starting from `first`.
pub fn new_low_index(seq: &[f64], first: usize, from: usize) -> Option<usize> {
    let mut running = f64::INFINITY;
    for (i, &t) in seq.iter().enumerate() {
        running = running.min(t);
        let label = first + i;
        if label >= from && t <= running {
            return Some(label);
        }
    }
    None
}

#[derive(Clone, Debug, Serialize)]
pub struct InductionRow {
    #[serde(rename = "N")]
    pub n_vertices: usize,
    #[serde(rename = "E_n", serialize_with = "crate::report::ser_energy")]
    pub e_n: f64,
    pub is_new_low: bool,
    /// Interpolation parameter of the diluted step into this graph.
    pub t_star: Option<f64>,
    #[serde(serialize_with = "crate::report::ser_energy")]
    pub e_diluted: f64,
    /// `min_{r ≥ n} E_r`.
    #[serde(serialize_with = "crate::report::ser_energy")]
    pub e_min_up: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct InductionVerdict {
    #[serde(rename = "N")]
    pub n_vertices: usize,
    /// `E_n(Λ(d,N)) ≤ E_r(Λ(d,k))` for all `k ≤ N`, `r ≥ n`.
    pub holds: bool,
    /// Offending `(k, r, E_r(Λ(d,k)))` cells.
    pub violations: Vec<(usize, usize, f64)>,
    /// FOEL-n of `Λ(d,N)` as implied by the inequality.
    pub foel_n: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct InductionReport {
    pub family: String,
    pub d: usize,
    pub n: usize,
    pub n_max: usize,
    pub tolerance: f64,
    pub rows: Vec<InductionRow>,
    pub verdicts: Vec<InductionVerdict>,
    pub dilution: DilutionInvariants,
    /// FOEL-n of the final graph read off from the computed levels.
    pub final_foel_n: bool,
    pub partial: bool,
    pub errors: Vec<String>,
}

/// Runs the induction harness on `Λ(d, N)` for `N ∈ {2n..=n_max}`.
pub fn induction_run(d: usize, n: usize, n_max: usize, tol: f64, opts: &EnergyOptions) -> Result<InductionReport> {
    if n == 0 {
        return arg_err("induction needs n >= 1");
    }
    if n_max < 2 * n {
        return arg_err(format!("N_max = {n_max} is below 2n = {}", 2 * n));
    }
    let sizes: Vec<usize> = (2 * n..=n_max).collect();
    let graphs: Vec<Graph> = sizes.iter().map(|&k| make_lambda(d, k)).collect::<Result<_>>()?;

    // energy cells E_r(Λ(d,k)) for r ∈ {n..⌊k/2⌋}
    let cells: Vec<(usize, usize)> =
        sizes.iter().enumerate().flat_map(|(i, &k)| (n..=k / 2).map(move |r| (i, r))).collect();
    let values: Vec<Result<f64>> =
        cells.par_iter().map(|&(i, r)| energy_level_with(&graphs[i], r, opts)).collect();
    let mut table = vec![Vec::new(); sizes.len()];
    let mut errors = Vec::new();
    for (&(i, r), v) in cells.iter().zip(values) {
        match v {
            Ok(e) => table[i].push((r, e)),
            Err(err) => errors.push(format!("N={} r={r}: {err}", sizes[i])),
        }
    }
    let e_n: Vec<f64> = table
        .iter()
        .map(|row| row.iter().find(|c| c.0 == n).map_or(f64::NAN, |c| c.1))
        .collect();

    let seq_result = DilutedSequence::build(&graphs, n, tol, opts);
    let (t_steps, e_diluted, dilution) = match &seq_result {
        Ok(seq) => {
            // the unit-coupling invariant applies up to the last new low
            let last_low = (0..sizes.len()).rev().find(|&i| e_n[i] <= e_n[..=i].iter().cloned().fold(f64::INFINITY, f64::min) + tol);
            let cut = last_low.unwrap_or(sizes.len() - 1) + 1;
            let truncated = DilutedSequence {
                n,
                sizes: seq.sizes[..cut].to_vec(),
                graphs: seq.graphs[..cut].to_vec(),
                t: seq.t[..cut].to_vec(),
                energies: seq.energies[..cut].to_vec(),
            };
            (seq.t.clone(), seq.energies.clone(), truncated.check_invariants(1e-8))
        }
        Err(err) => {
            errors.push(format!("dilution: {err}"));
            let fail = DilutionInvariants {
                couplings_at_most_one: false,
                final_couplings_unit: false,
                couplings_nondecreasing: false,
                energies_nonincreasing: false,
            };
            (vec![f64::NAN; sizes.len()], vec![f64::NAN; sizes.len()], fail)
        }
    };

    let mut rows = Vec::new();
    let mut verdicts = Vec::new();
    let mut running = f64::INFINITY;
    for (i, &k) in sizes.iter().enumerate() {
        let is_new_low = e_n[i] <= running + tol;
        running = running.min(e_n[i]);
        let e_min_up = table[i].iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
        rows.push(InductionRow {
            n_vertices: k,
            e_n: e_n[i],
            is_new_low,
            t_star: (i > 0).then(|| t_steps[i]),
            e_diluted: e_diluted[i],
            e_min_up,
        });
        if is_new_low {
            let violations: Vec<(usize, usize, f64)> = table[..=i]
                .iter()
                .zip(&sizes)
                .flat_map(|(row, &kk)| row.iter().map(move |&(r, e)| (kk, r, e)))
                .filter(|&(_, _, e)| e_n[i] > e + tol)
                .collect();
            let holds = violations.is_empty();
            verdicts.push(InductionVerdict { n_vertices: k, holds, violations, foel_n: holds });
        }
    }
    let last = table.last().unwrap();
    let final_foel_n = last.iter().all(|&(_, e)| e >= e_n[sizes.len() - 1] - tol);
    Ok(InductionReport {
        family: "lambda".into(),
        d,
        n,
        n_max,
        tolerance: tol,
        rows,
        verdicts,
        dilution,
        final_foel_n,
        partial: !errors.is_empty(),
        errors,
    })
}
