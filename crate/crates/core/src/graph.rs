//! Finite graphs with nonnegative edge couplings.
//!
//! Lattice generators (`make_box`, `make_lambda`) attach the point of
//! `Z^d` behind every vertex so that downstream code can work with
//! coordinates. A lattice vertex id is the row-major index of its point in
//! the enclosing box `{1..side}^d`, hence sorting ids sorts points
//! lexicographically.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{arg_err, HeisError, Result};

/// Largest vertex count any generator will produce.
pub const MAX_VERTICES: usize = 1 << 16;

/// Lattice metadata for graphs induced from `Z^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    pub d: usize,
    /// Side length of the enclosing box used for the id encoding.
    pub side: usize,
    /// Point of each vertex, indexed like `Graph::vertices`.
    pub points: Vec<Vec<i64>>,
}

/// A finite simple graph with a nonnegative coupling on every edge.
///
/// Vertices are kept sorted by id and edges are stored as sorted pairs of
/// vertex indices `(a, b)` with `a < b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    vertices: Vec<u64>,
    edges: Vec<(usize, usize)>,
    couplings: Vec<f64>,
    lattice: Option<Lattice>,
}

impl Graph {
    /// Builds a graph from vertex ids and edges given by id.
    pub fn new(vertices: Vec<u64>, edges: Vec<(u64, u64)>, couplings: Vec<f64>) -> Result<Self> {
        Self::build(vertices, edges, couplings, None)
    }

    fn build(
        mut vertices: Vec<u64>,
        edges: Vec<(u64, u64)>,
        couplings: Vec<f64>,
        lattice: Option<Lattice>,
    ) -> Result<Self> {
        if edges.len() != couplings.len() {
            return arg_err("edge and coupling counts differ");
        }
        if vertices.len() > MAX_VERTICES {
            return Err(HeisError::Size(format!(
                "{} vertices exceeds the maximum of {MAX_VERTICES}",
                vertices.len()
            )));
        }
        let unsorted = vertices.clone();
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return arg_err("duplicate vertex id");
        }
        let lattice = lattice.map(|mut lat| {
            // keep points aligned with the sorted vertex order
            let by_id: HashMap<u64, Vec<i64>> = unsorted.iter().copied().zip(lat.points).collect();
            lat.points = vertices.iter().map(|v| by_id[v].clone()).collect();
            lat
        });
        let index: HashMap<u64, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut seen = BTreeSet::new();
        let mut pairs = Vec::with_capacity(edges.len());
        for (&(u, v), &j) in edges.iter().zip(&couplings) {
            if u == v {
                return arg_err(format!("self-loop at vertex {u}"));
            }
            if j.is_nan() || j < 0.0 || !j.is_finite() {
                return arg_err(format!("invalid coupling {j} on edge {{{u},{v}}}"));
            }
            let (Some(&a), Some(&b)) = (index.get(&u), index.get(&v)) else {
                return arg_err(format!("edge {{{u},{v}}} references an unknown vertex"));
            };
            let key = (a.min(b), a.max(b));
            if !seen.insert(key) {
                return arg_err(format!("duplicate edge {{{u},{v}}}"));
            }
            pairs.push((key, j));
        }
        pairs.sort_by_key(|x| x.0);
        let (edges, couplings) = pairs.into_iter().unzip();
        Ok(Graph { vertices, edges, couplings, lattice })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[u64] {
        &self.vertices
    }

    /// Edges as pairs of vertex indices, `a < b`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn lattice(&self) -> Option<&Lattice> {
        self.lattice.as_ref()
    }

    pub fn index_of(&self, id: u64) -> Option<usize> {
        self.vertices.binary_search(&id).ok()
    }

    /// Coupling on the edge between two vertex indices, if the edge exists.
    pub fn coupling_between(&self, a: usize, b: usize) -> Option<f64> {
        let key = (a.min(b), a.max(b));
        self.edges.binary_search(&key).ok().map(|i| self.couplings[i])
    }

    /// Same graph with different couplings (one per edge, in edge order).
    pub fn with_couplings(&self, couplings: Vec<f64>) -> Result<Graph> {
        if couplings.len() != self.edges.len() {
            return arg_err("coupling vector length does not match the edge count");
        }
        if let Some(j) = couplings.iter().find(|j| j.is_nan() || **j < 0.0 || !j.is_finite()) {
            return arg_err(format!("invalid coupling {j}"));
        }
        Ok(Graph { couplings, ..self.clone() })
    }

    /// Weighted adjacency lists `(neighbor, coupling)`.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for (&(a, b), &j) in self.edges.iter().zip(&self.couplings) {
            adj[a].push((b, j));
            adj[b].push((a, j));
        }
        adj
    }

    /// Connectivity through edges with strictly positive coupling.
    pub fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        if n <= 1 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(w, j) in &adj[v] {
                if j > 0.0 && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Maps each vertex index of `self` to the matching vertex index of
    /// `other`. Lattice graphs are matched by point, other graphs by id.
    pub fn embed_into(&self, other: &Graph) -> Option<Vec<usize>> {
        match (self.lattice(), other.lattice()) {
            (Some(a), Some(b)) if a.d == b.d => {
                let pos: HashMap<&[i64], usize> =
                    b.points.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();
                a.points.iter().map(|p| pos.get(p.as_slice()).copied()).collect()
            }
            _ => self.vertices.iter().map(|&v| other.index_of(v)).collect(),
        }
    }

    /// True when `other` has exactly one extra vertex and contains every
    /// edge of `self` (under `embed_into`).
    pub fn is_one_vertex_extension_of(&self, prev: &Graph) -> bool {
        if self.vertex_count() != prev.vertex_count() + 1 {
            return false;
        }
        let Some(map) = prev.embed_into(self) else { return false };
        prev.edges.iter().all(|&(a, b)| self.coupling_between(map[a], map[b]).is_some())
    }
}

/// The data defining `Λ(d, N)`: `L = floor(N^{1/d})`, `L⁺ = ceil(N^{1/d})`
/// and the fill set of extra points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeBoxSpec {
    pub d: usize,
    pub n: usize,
    pub l: usize,
    pub l_plus: usize,
    pub fill: Vec<Vec<i64>>,
}

impl LatticeBoxSpec {
    pub fn new(d: usize, n: usize) -> Result<Self> {
        if d == 0 || n == 0 {
            return arg_err("lambda family needs d >= 1 and N >= 1");
        }
        if n > MAX_VERTICES {
            return Err(HeisError::Size(format!("N = {n} exceeds the maximum of {MAX_VERTICES}")));
        }
        let l = integer_root(n, d);
        let full = l.pow(d as u32);
        let l_plus = if full == n { l } else { l + 1 };
        let fill: Vec<Vec<i64>> = box_points(d, l_plus)
            .into_iter()
            .filter(|p| p.iter().any(|&c| c > l as i64))
            .take(n - full)
            .collect();
        Ok(LatticeBoxSpec { d, n, l, l_plus, fill })
    }

    /// All points of `Λ(d, N)`, sorted lexicographically.
    pub fn points(&self) -> Vec<Vec<i64>> {
        let mut pts: Vec<Vec<i64>> = box_points(self.d, self.l);
        pts.extend(self.fill.iter().cloned());
        pts.sort();
        pts
    }
}

/// Largest `l` with `l^d <= n`.
pub fn integer_root(n: usize, d: usize) -> usize {
    let mut l = (n as f64).powf(1.0 / d as f64).round() as usize + 1;
    while l > 0 && checked_pow(l, d).is_none_or(|p| p > n) {
        l -= 1;
    }
    while checked_pow(l + 1, d).is_some_and(|p| p <= n) {
        l += 1;
    }
    l
}

fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    (0..exp).try_fold(1usize, |acc, _| acc.checked_mul(base))
}

/// Points of `{1..side}^d` in lexicographic order.
pub fn box_points(d: usize, side: usize) -> Vec<Vec<i64>> {
    let count = checked_pow(side, d).unwrap_or(usize::MAX);
    let mut out = Vec::with_capacity(count.min(MAX_VERTICES));
    if side == 0 {
        return out;
    }
    let mut p = vec![1i64; d];
    loop {
        out.push(p.clone());
        let mut j = d;
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            if p[j] < side as i64 {
                p[j] += 1;
                break;
            }
            p[j] = 1;
        }
    }
}

/// Row-major index of a point of `{1..side}^d`.
pub fn point_id(p: &[i64], side: usize) -> u64 {
    p.iter().fold(0u64, |acc, &c| acc * side as u64 + (c - 1) as u64)
}

/// Inverse of [`point_id`].
pub fn id_point(mut id: u64, d: usize, side: usize) -> Vec<i64> {
    let mut p = vec![0i64; d];
    for j in (0..d).rev() {
        p[j] = (id % side as u64) as i64 + 1;
        id /= side as u64;
    }
    p
}

/// Graph induced from `Z^d` on a finite point set, unit couplings.
pub fn lattice_graph(d: usize, side: usize, mut points: Vec<Vec<i64>>) -> Result<Graph> {
    if points.len() > MAX_VERTICES {
        return Err(HeisError::Size(format!(
            "{} vertices exceeds the maximum of {MAX_VERTICES}",
            points.len()
        )));
    }
    points.sort();
    let set: BTreeSet<&[i64]> = points.iter().map(|p| p.as_slice()).collect();
    let ids: Vec<u64> = points.iter().map(|p| point_id(p, side)).collect();
    let mut edges = Vec::new();
    for p in &points {
        for j in 0..d {
            let mut q = p.clone();
            q[j] += 1;
            if set.contains(q.as_slice()) {
                edges.push((point_id(p, side), point_id(&q, side)));
            }
        }
    }
    let couplings = vec![1.0; edges.len()];
    let lattice = Lattice { d, side, points };
    Graph::build(ids, edges, couplings, Some(lattice))
}

/// The box `B^d(L) = {1..L}^d` with nearest-neighbour edges.
pub fn make_box(d: usize, l: usize) -> Result<Graph> {
    if d == 0 || l == 0 {
        return arg_err("box needs d >= 1 and L >= 1");
    }
    match checked_pow(l, d) {
        Some(n) if n <= MAX_VERTICES => lattice_graph(d, l, box_points(d, l)),
        _ => Err(HeisError::Size(format!("box {l}^{d} exceeds the maximum of {MAX_VERTICES} vertices"))),
    }
}

/// The growing family `Λ(d, N)`: the box `B^d(L)` plus the `N - L^d`
/// lexicographically smallest points of `B^d(L⁺) \ B^d(L)`.
pub fn make_lambda(d: usize, n: usize) -> Result<Graph> {
    let spec = LatticeBoxSpec::new(d, n)?;
    lattice_graph(d, spec.l_plus, spec.points())
}

/// Path graph on `L` vertices; identical to `make_box(1, L)`.
pub fn make_path(l: usize) -> Result<Graph> {
    make_box(1, l)
}

/// Cycle on `L >= 3` vertices with unit couplings.
pub fn make_ring(l: usize) -> Result<Graph> {
    if l < 3 {
        return arg_err(format!("ring length must be at least 3, got {l}"));
    }
    if l > MAX_VERTICES {
        return Err(HeisError::Size(format!("ring of length {l} is too large")));
    }
    let ids: Vec<u64> = (0..l as u64).collect();
    let edges: Vec<(u64, u64)> = (0..l as u64).map(|i| (i, (i + 1) % l as u64)).collect();
    let couplings = vec![1.0; l];
    Graph::new(ids, edges, couplings)
}

/// Parses the edge-list text format.
///
/// One edge per line as `u v [J]`; `#` starts a comment. Two comment
/// directives are understood: `#lattice d=<d> [side=<s>]` and
/// `#vertices <id> ...` (declares vertices, used for isolated ones).
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut vertices = BTreeSet::new();
    let mut edges = Vec::new();
    let mut couplings = Vec::new();
    let mut seen = BTreeSet::new();
    let mut lattice_hdr: Option<(usize, Option<usize>)> = None;
    let perr = |line: usize, message: String| HeisError::Parse { line, message };

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix("#lattice") {
            let mut d = None;
            let mut side = None;
            for tok in rest.split_whitespace() {
                if let Some(v) = tok.strip_prefix("d=") {
                    d = Some(v.parse::<usize>().map_err(|e| perr(line_no, format!("bad d: {e}")))?);
                } else if let Some(v) = tok.strip_prefix("side=") {
                    side = Some(v.parse::<usize>().map_err(|e| perr(line_no, format!("bad side: {e}")))?);
                }
            }
            let d = d.filter(|&d| d > 0).ok_or_else(|| perr(line_no, "lattice header needs d=<d>".into()))?;
            lattice_hdr = Some((d, side));
            continue;
        }
        if let Some(rest) = line.strip_prefix("#vertices") {
            for tok in rest.split_whitespace() {
                let v = tok.parse::<u64>().map_err(|e| perr(line_no, format!("bad vertex id {tok:?}: {e}")))?;
                vertices.insert(v);
            }
            continue;
        }
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks.len() < 2 || toks.len() > 3 {
            return Err(perr(line_no, format!("expected `u v [J]`, got {body:?}")));
        }
        let u = toks[0].parse::<u64>().map_err(|e| perr(line_no, format!("bad vertex id {:?}: {e}", toks[0])))?;
        let v = toks[1].parse::<u64>().map_err(|e| perr(line_no, format!("bad vertex id {:?}: {e}", toks[1])))?;
        let j = match toks.get(2) {
            Some(t) => t.parse::<f64>().map_err(|e| perr(line_no, format!("bad coupling {t:?}: {e}")))?,
            None => 1.0,
        };
        if u == v {
            return Err(perr(line_no, format!("self-loop at vertex {u}")));
        }
        if j.is_nan() || j < 0.0 || !j.is_finite() {
            return Err(perr(line_no, format!("coupling must be finite and nonnegative, got {j}")));
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(perr(line_no, format!("duplicate edge {{{u},{v}}}")));
        }
        vertices.insert(u);
        vertices.insert(v);
        edges.push((u, v));
        couplings.push(j);
    }

    let vertices: Vec<u64> = vertices.into_iter().collect();
    let lattice = match lattice_hdr {
        Some((d, Some(side))) => {
            let points = vertices.iter().map(|&id| id_point(id, d, side)).collect();
            Some(Lattice { d, side, points })
        }
        _ => None,
    };
    Graph::build(vertices, edges, couplings, lattice).map_err(|e| perr(0, e.to_string()))
}

/// Serializes a graph to the edge-list text format.
pub fn to_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    if let Some(lat) = g.lattice() {
        let _ = writeln!(out, "#lattice d={} side={}", lat.d, lat.side);
    }
    let mut has_edge = vec![false; g.vertex_count()];
    for &(a, b) in g.edges() {
        has_edge[a] = true;
        has_edge[b] = true;
    }
    let isolated: Vec<String> = g
        .vertices()
        .iter()
        .zip(&has_edge)
        .filter(|(_, &e)| !e)
        .map(|(v, _)| v.to_string())
        .collect();
    if !isolated.is_empty() {
        let _ = writeln!(out, "#vertices {}", isolated.join(" "));
    }
    for (&(a, b), &j) in g.edges().iter().zip(g.couplings()) {
        let _ = writeln!(out, "{} {} {}", g.vertices()[a], g.vertices()[b], j);
    }
    out
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<Graph> {
    let text = std::fs::read_to_string(path)?;
    parse_edge_list(&text)
}

pub fn save_graph(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_edge_list(g))?;
    Ok(())
}
