//! Command-line front end.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::analysis::{contraction_deficit, energy_ratio, trace_check, GoodSet};
use crate::eigen::{sector_spectrum, LanczosOptions};
use crate::error::{HeisError, Result};
use crate::foel::{foel_check_with, induction_run, EnergyMethod, EnergyOptions, ENERGY_TOL};
use crate::graph::{load_graph, make_box, make_lambda, make_path, make_ring, Graph, LatticeBoxSpec};
use crate::report::{energy_value, to_csv, GraphSummary, Report};
use crate::sector::{binomial, contraction_t_restricted, MagnonBasis};
use crate::spinwave::{residual, trial_energy, trial_state, ModeVector, GAMMA};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "heis", version, about = "Magnon-sector exact diagonalization of the Heisenberg ferromagnet")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Worker threads (overrides HEIS_THREADS).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,
    /// Energy comparison tolerance.
    #[arg(long, global = true, default_value_t = ENERGY_TOL)]
    pub tol: f64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Auto,
    Dense,
    Krylov,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Spin-labeled spectra per magnon sector.
    Spectrum {
        #[arg(long)]
        graph: String,
        #[arg(long, conflicts_with = "all_sectors")]
        sector: Option<usize>,
        #[arg(long)]
        all_sectors: bool,
        /// Multiply energies by the figure scale.
        #[arg(long)]
        figure_compat: bool,
        #[arg(long, default_value_t = 2.0)]
        figure_scale: f64,
    },
    /// Ordering of the lowest energies per spin deviate.
    Foel {
        #[arg(long)]
        graph: String,
        /// Level to check; all levels when omitted.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        strict: bool,
    },
    /// Induction harness along the Λ(d, N) family.
    Induct {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long = "N-max")]
        n_max: usize,
    },
    /// Spin-wave trial state diagnostics.
    Spinwave {
        #[arg(long)]
        d: usize,
        #[arg(long = "N")]
        n_vertices: usize,
        /// Modes separated by `;`, components by `,` (e.g. `1;2` or `1,0;0,1`).
        #[arg(long)]
        modes: String,
    },
    /// Randomized and exhaustive inequality sweeps.
    Ineq {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Trace,
    Deficit,
    Rho,
    Extension,
    All,
}

/// Parses `box:d=2,L=3`, `lambda:d=2,N=8`, `ring:L=6`, `path:L=8` or
/// `file:<path>`.
pub fn parse_graph_spec(spec: &str) -> Result<Graph> {
    let bad = |msg: String| HeisError::Argument(format!("graph spec {spec:?}: {msg}"));
    let (kind, rest) = spec.split_once(':').ok_or_else(|| bad("expected <kind>:<params>".into()))?;
    if kind == "file" {
        return load_graph(rest);
    }
    let mut params = std::collections::BTreeMap::new();
    for kv in rest.split(',').filter(|s| !s.is_empty()) {
        let (k, v) = kv.split_once('=').ok_or_else(|| bad(format!("expected key=value, got {kv:?}")))?;
        let v: usize = v.parse().map_err(|e| bad(format!("{k}: {e}")))?;
        params.insert(k.to_string(), v);
    }
    let get = |k: &str| params.get(k).copied().ok_or_else(|| bad(format!("missing parameter {k}")));
    let allowed: &[&str] = match kind {
        "box" => &["d", "L"],
        "lambda" => &["d", "N"],
        "ring" | "path" => &["L"],
        other => return Err(bad(format!("unknown graph kind {other:?}"))),
    };
    if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(bad(format!("unexpected parameter {k}")));
    }
    match kind {
        "box" => make_box(get("d")?, get("L")?),
        "lambda" => make_lambda(get("d")?, get("N")?),
        "ring" => make_ring(get("L")?),
        _ => make_path(get("L")?),
    }
}

/// Parses `1;2` or `1,0;0,1` into mode vectors of dimension `d`.
pub fn parse_modes(text: &str, d: usize) -> Result<Vec<ModeVector>> {
    text.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|m| {
            let v: Vec<usize> = m
                .split(',')
                .map(|c| c.trim().parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| HeisError::Argument(format!("mode {m:?}: {e}")))?;
            if v.len() != d {
                return Err(HeisError::Argument(format!("mode {m:?} needs {d} components")));
            }
            Ok(v)
        })
        .collect()
}

fn energy_options(common: &Common) -> EnergyOptions {
    EnergyOptions {
        method: match common.method {
            MethodArg::Auto => EnergyMethod::Auto,
            MethodArg::Dense => EnergyMethod::Dense,
            MethodArg::Krylov => EnergyMethod::Krylov,
        },
        lanczos: LanczosOptions { seed: common.seed, ..LanczosOptions::default() },
    }
}

fn method_name(m: MethodArg) -> &'static str {
    match m {
        MethodArg::Auto => "auto",
        MethodArg::Dense => "dense",
        MethodArg::Krylov => "krylov",
    }
}

/// A rendered report plus whether any checked property failed.
pub struct Outcome {
    pub text: String,
    pub violation: bool,
}

fn render(format: Format, report: Report, header: &[&str], rows: Vec<Vec<String>>, violation: bool) -> Result<Outcome> {
    let text = match format {
        Format::Json => report.to_json()?,
        Format::Csv => to_csv(header, &rows)?,
    };
    Ok(Outcome { text, violation })
}

fn fmt(x: f64) -> String {
    crate::report::fmt_energy(x)
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    let c = &cli.common;
    let tolerances = json!({
        "energy": c.tol,
        "degeneracy": crate::eigen::DEGENERACY_TOL,
        "spin_label": crate::eigen::LABEL_TOL,
        "lanczos_residual": LanczosOptions::default().tol,
    });
    let base_config = json!({"seed": c.seed, "method": method_name(c.method), "tol": c.tol});
    match &cli.command {
        Command::Spectrum { graph, sector, all_sectors: _, figure_compat, figure_scale } => {
            let g = parse_graph_spec(graph)?;
            let scale = if *figure_compat { *figure_scale } else { 1.0 };
            let sectors: Vec<usize> = match sector {
                Some(n) => vec![*n],
                None => (0..=g.vertex_count()).collect(),
            };
            let mut results = Vec::new();
            let mut rows = Vec::new();
            for &n in &sectors {
                let spec = sector_spectrum(&g, n)?;
                let levels: Vec<Value> = spec
                    .levels
                    .iter()
                    .map(|l| json!({"energy": l.energy * scale, "n_prime": l.n_prime, "multiplicity": l.multiplicity}))
                    .collect();
                for l in &spec.levels {
                    rows.push(vec![n.to_string(), fmt(l.energy * scale), l.n_prime.to_string(), l.multiplicity.to_string()]);
                }
                let hw: Vec<f64> = spec.energies_with(n).into_iter().map(|e| e * scale).collect();
                results.push(json!({
                    "n": n,
                    "dim": binomial(g.vertex_count(), n),
                    "levels": levels,
                    "highest_weight": hw,
                }));
            }
            let mut config = base_config;
            config["graph"] = json!(graph);
            config["sectors"] = json!(sectors);
            config["figure_compat"] = json!(figure_compat);
            config["figure_scale"] = json!(figure_scale);
            let report = Report::new("spectrum", config, tolerances, Some(GraphSummary::of(graph, &g)), json!(results));
            render(c.format, report, &["sector", "energy", "n_prime", "multiplicity"], rows, false)
        }
        Command::Foel { graph, n, strict } => {
            let g = parse_graph_spec(graph)?;
            let levels: Vec<usize> = match n {
                Some(n) => vec![*n],
                None => (0..=g.vertex_count() / 2).collect(),
            };
            let opts = energy_options(c);
            let mut verdicts = Vec::new();
            let mut rows = Vec::new();
            let mut violation = false;
            for &k in &levels {
                let v = foel_check_with(&g, k, *strict, c.tol, &opts)?;
                if !v.complete {
                    return Err(HeisError::Numerical(v.error.unwrap_or_else(|| "incomplete verdict".into())));
                }
                violation |= !v.holds;
                for &(np, e) in &v.energies {
                    let violating = v.violations.iter().any(|x| x.0 == np);
                    rows.push(vec![k.to_string(), np.to_string(), fmt(e), v.holds.to_string(), violating.to_string()]);
                }
                let mut val = serde_json::to_value(&v).map_err(|e| HeisError::Numerical(e.to_string()))?;
                val["energies"] = json!(v.energies.iter().map(|&(np, e)| json!([np, energy_value(e)])).collect::<Vec<_>>());
                verdicts.push(val);
            }
            let mut config = base_config;
            config["graph"] = json!(graph);
            config["levels"] = json!(levels);
            config["strict"] = json!(strict);
            let report = Report::new("foel", config, tolerances, Some(GraphSummary::of(graph, &g)), json!(verdicts));
            render(c.format, report, &["n", "n_prime", "energy", "holds", "violating"], rows, violation)
        }
        Command::Induct { d, n, n_max } => {
            let rep = induction_run(*d, *n, *n_max, c.tol, &energy_options(c))?;
            if rep.partial {
                return Err(HeisError::Numerical(rep.errors.join("; ")));
            }
            let violation = rep.verdicts.iter().any(|v| !v.holds) || !rep.dilution.all();
            let rows = rep
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.n_vertices.to_string(),
                        fmt(r.e_n),
                        r.is_new_low.to_string(),
                        r.t_star.map(fmt).unwrap_or_default(),
                        fmt(r.e_diluted),
                        fmt(r.e_min_up),
                    ]
                })
                .collect();
            let mut config = base_config;
            config["d"] = json!(d);
            config["n"] = json!(n);
            config["N_max"] = json!(n_max);
            let results = serde_json::to_value(&rep).map_err(|e| HeisError::Numerical(e.to_string()))?;
            let report = Report::new("induct", config, tolerances, None, results);
            render(c.format, report, &["N", "E_n", "is_new_low", "t_star", "E_diluted", "E_min_up"], rows, violation)
        }
        Command::Spinwave { d, n_vertices, modes } => {
            let modes = parse_modes(modes, *d)?;
            let state = trial_state(*d, *n_vertices, &modes)?;
            let side = LatticeBoxSpec::new(*d, *n_vertices)?.l;
            let l = side as f64;
            let energy = trial_energy(&state)?;
            let res = residual(*d, *n_vertices, &modes)?;
            let kappa_sq: f64 = modes.iter().flatten().map(|&k| (k * k) as f64).sum();
            let norm_sq: f64 = state.coefficients.iter().map(|x| x * x).sum();
            let predicted = GAMMA * kappa_sq / (l * l);
            let mut config = base_config;
            config["d"] = json!(d);
            config["N"] = json!(n_vertices);
            config["modes"] = json!(modes);
            let results = json!({
                "L": side,
                "norm_squared": norm_sq,
                "rayleigh_energy": energy,
                "predicted_energy": predicted,
                "residual": res,
            });
            let rows = vec![vec![side.to_string(), fmt(norm_sq), fmt(energy), fmt(predicted), fmt(res)]];
            let report = Report::new("spinwave", config, tolerances, Some(GraphSummary::of("lambda", &state.graph)), results);
            render(c.format, report, &["L", "norm_squared", "rayleigh_energy", "predicted_energy", "residual"], rows, false)
        }
        Command::Ineq { suite, samples } => {
            let rows = run_suites(*suite, *samples, c.seed)?;
            let violated: Vec<&str> = rows.iter().filter(|r| r.margin < 0.0).map(|r| r.case.as_str()).collect();
            let violation = !violated.is_empty();
            let mut config = base_config;
            config["suite"] = json!(format!("{suite:?}").to_lowercase());
            config["samples"] = json!(samples);
            let results: Vec<Value> = rows
                .iter()
                .map(|r| json!({"case": r.case, "lhs": r.lhs, "rhs": r.rhs, "margin": r.margin}))
                .collect();
            let csv_rows = rows.iter().map(|r| vec![r.case.clone(), fmt(r.lhs), fmt(r.rhs), fmt(r.margin)]).collect();
            let report =
                Report::new("ineq", config, tolerances, None, json!({"rows": results, "violations": violated}));
            render(c.format, report, &["case", "lhs", "rhs", "margin"], csv_rows, violation)
        }
    }
}

/// One inequality instance: `lhs ≤ rhs` with `margin = rhs − lhs`.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub case: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

fn row(case: String, lhs: f64, rhs: f64) -> SweepRow {
    SweepRow { case, lhs, rhs, margin: rhs - lhs }
}

/// Random symmetric function on `V^n`: values drawn on sorted tuples and
/// copied to their permutations.
pub fn random_symmetric(rng: &mut ChaCha8Rng, v: usize, n: usize) -> Vec<f64> {
    let idx = crate::sector::FunctionSpaceIndex::new(v, n).expect("small function space");
    let mut f = vec![f64::NAN; idx.dim()];
    for i in 0..idx.dim() {
        let mut t = idx.tuple(i);
        t.sort_unstable();
        let j = idx.index(&t);
        if f[j].is_nan() {
            f[j] = rng.random_range(-1.0..1.0);
        }
        f[i] = f[j];
    }
    f
}

pub fn run_suites(suite: Suite, samples: usize, seed: u64) -> Result<Vec<SweepRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let want = |s: Suite| suite == s || suite == Suite::All;
    if want(Suite::Trace) {
        let ls = [2usize, 4, 8, 16, 32];
        for i in 0..samples {
            let l = ls[i % ls.len()];
            let f: Vec<Complex64> =
                (0..l).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            let t = trace_check(&f)?;
            out.push(row(format!("trace/L={l}/{i}"), t.lhs, t.rhs));
        }
    }
    if want(Suite::Deficit) {
        let cases = [(1usize, 2usize, 8usize), (2, 2, 9)];
        for i in 0..samples {
            let (d, n, nv) = cases[i % cases.len()];
            let side = LatticeBoxSpec::new(d, nv)?.l_plus;
            let f = random_symmetric(&mut rng, side.pow(d as u32), n);
            let r = contraction_deficit(d, nv, n, &f)?;
            out.push(row(format!("deficit/d={d},n={n},N={nv}/{i}"), r.deficit, r.bound));
        }
    }
    if want(Suite::Rho) {
        for nv in 10..=16 {
            let gs = GoodSet::new(2, nv, 2)?;
            let worst = (0..gs.index.dim()).map(|i| gs.distance(i)).max().unwrap_or(0);
            out.push(row(format!("rho/d=2,n=2,N={nv}"), worst as f64, crate::analysis::rho_max(2, 2) as f64));
        }
    }
    if want(Suite::Extension) {
        let err = extension_identity_error(2, 8, 2)?;
        out.push(row("extension/identity/d=2,n=2,N=8".into(), err, 1e-12));
        let r8 = energy_ratio(2, 8, 2)?.max_ratio;
        let r12 = energy_ratio(2, 12, 2)?.max_ratio;
        let variation = (r8 - r12).abs() / r8.min(r12);
        out.push(row("extension/ratio_variation/N=8,12".into(), variation, 0.5));
    }
    Ok(out)
}

/// `max |T̃ Ξ e_X − e_X|` over the basis vectors of `mag(n)` on `Λ(d,N)`.
pub fn extension_identity_error(d: usize, n_vertices: usize, n: usize) -> Result<f64> {
    let gs = GoodSet::new(d, n_vertices, n)?;
    let host = make_box(d, gs.l_plus)?;
    let lambda = make_lambda(d, n_vertices)?;
    let t = contraction_t_restricted(&host, &lambda, n)?;
    let dim = MagnonBasis::new(n_vertices, n)?.dim();
    let mut worst: f64 = 0.0;
    let mut e = vec![0.0; dim];
    for k in 0..dim {
        e[k] = 1.0;
        let back = t.apply(&gs.extend(&e)?);
        for (i, v) in back.iter().enumerate() {
            worst = worst.max((v - e[i]).abs());
        }
        e[k] = 0.0;
    }
    Ok(worst)
}

fn configure_threads(common: &Common) {
    let env = std::env::var("HEIS_THREADS").ok().and_then(|v| v.parse::<usize>().ok());
    if let Some(t) = common.threads.or(env).filter(|&t| t > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
}

pub fn exit_code(err: &HeisError) -> i32 {
    match err {
        HeisError::Convergence { .. } | HeisError::Numerical(_) | HeisError::Labeling { .. } => EXIT_SOLVER,
        _ => EXIT_PARSE,
    }
}

/// Runs the CLI on the given arguments and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
        }
    };
    configure_threads(&cli.common);
    match execute(&cli) {
        Ok(outcome) => {
            let written = match &cli.common.output {
                Some(path) => std::fs::write(path, &outcome.text),
                None => {
                    print!("{}", outcome.text);
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return EXIT_PARSE;
            }
            if outcome.violation {
                EXIT_VIOLATION
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
