//! Discrete Ricci curvature: Ollivier curvature of vertex pairs and
//! Bakry–Émery curvature of vertices.
//!
//! Ollivier curvature is evaluated through the Laplacian characterization
//!
//! ```text
//! κ(x,y) = inf { ∇_xy 𝓛f : f ∈ Lip(1), ∇_xy f = 1 },   ∇_xy f = (f(x) − f(y)) / d(x,y),
//! ```
//!
//! posed as a linear program over `S = B₁(x) ∪ B₁(y)`. Any 1-Lipschitz
//! function on `S` (for the distance of the whole graph) extends to the
//! graph, so restricting to `S` loses nothing. The transport definition
//! `κ^ε = 1 − W(μ_x^ε, μ_y^ε)/d(x,y)` is available as an independent oracle.
//!
//! Bakry–Émery curvature `κ_BE(x)` is the best `K` with `Γ₂(f)(x) ≥ KΓ(f)(x)`
//! for all `f`; both sides are quadratic forms in the values of `f` on `B₂(x)`.

use std::fmt::Write as _;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{VertexId, VertexSet, WeightedGraph};
use crate::laplacian::{apply_laplacian, VertexFunction};
use crate::lp::{LinearProgram, LpStatus, Relation};
use crate::metric::PseudoMetric;
use crate::numeric::{fmt_sig, linear_fit};
use crate::radial::RadialProfile;

/// Tolerance quoted for LP-based curvature values.
pub const LP_TOL: f64 = 1e-9;
/// Relative threshold for the numerical rank of the `Γ` form.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OllivierMethod {
    DualLp,
    CycleFree,
    BirthDeath,
    Epsilon(f64),
}

impl OllivierMethod {
    pub fn name(self) -> String {
        match self {
            OllivierMethod::DualLp => "dual-lp".into(),
            OllivierMethod::CycleFree => "closed-form-cyclefree".into(),
            OllivierMethod::BirthDeath => "closed-form-birthdeath".into(),
            OllivierMethod::Epsilon(e) => format!("epsilon-oracle(eps={})", fmt_sig(e)),
        }
    }
}

fn distinct_pair(graph: &WeightedGraph, x: VertexId, y: VertexId) -> Result<usize> {
    graph.check(x)?;
    graph.check(y)?;
    if x == y {
        return Err(Error::pre("curvature needs two distinct vertices"));
    }
    graph.hops(x, y).finite().ok_or_else(|| {
        Error::pre(format!(
            "`{}` and `{}` lie in different components",
            graph.name(x),
            graph.name(y)
        ))
    })
}

/// Pairwise combinatorial distances among `set`, measured in the whole graph.
fn local_distances(graph: &WeightedGraph, set: &[VertexId], limit: usize) -> Vec<Vec<f64>> {
    set.iter()
        .map(|&u| {
            let d = graph.bfs_limited(u, limit);
            set.iter()
                .map(|&v| d[v.0].map_or(f64::INFINITY, |h| h as f64))
                .collect()
        })
        .collect()
}

/// `κ(x,y)` from the dual linear program on `B₁(x) ∪ B₁(y)`.
pub fn ollivier_dual_lp(graph: &WeightedGraph, x: VertexId, y: VertexId) -> Result<f64> {
    let dxy = distinct_pair(graph, x, y)?;
    let s = graph.ball(x, 1).union(&graph.ball(y, 1));
    let set = s.as_slice();
    let n = set.len();
    let pos = |v: VertexId| set.binary_search(&v).expect("member of S");
    let dist = local_distances(graph, set, dxy + 2);
    // shift so that every feasible value is nonnegative
    let shift = dxy as f64 + 1.0;
    let mut lp = LinearProgram::new(n);
    let mut c = vec![0.0; n];
    let (mx, my) = (graph.measure(x), graph.measure(y));
    for &(z, b) in graph.neighbors(x) {
        c[pos(x)] += b / mx;
        c[pos(z)] -= b / mx;
    }
    for &(z, b) in graph.neighbors(y) {
        c[pos(y)] -= b / my;
        c[pos(z)] += b / my;
    }
    for v in c.iter_mut() {
        *v /= dxy as f64;
    }
    lp.set_objective(c)?;
    for i in 0..n {
        for j in 0..n {
            if i == j || !dist[i][j].is_finite() {
                continue;
            }
            // implied by the two rows through a geodesic midpoint inside S
            let split = (0..n).any(|k| k != i && k != j && dist[i][k] + dist[k][j] == dist[i][j]);
            if !split {
                lp.add_sparse(&[(i, 1.0), (j, -1.0)], Relation::Le, dist[i][j])?;
            }
        }
    }
    lp.add_sparse(&[(pos(y), 1.0)], Relation::Eq, shift)?;
    lp.add_sparse(&[(pos(x), 1.0)], Relation::Eq, shift + dxy as f64)?;
    let sol = lp.solve()?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.objective),
        status => Err(Error::LinearProgram(format!(
            "curvature LP for (`{}`, `{}`) reported {status:?}",
            graph.name(x),
            graph.name(y)
        ))),
    }
}

/// Shortest cycle of length at most 5 through the edge `x ~ y`, if any.
pub fn short_cycle_through(graph: &WeightedGraph, x: VertexId, y: VertexId) -> Option<Vec<VertexId>> {
    let mut parent: Vec<Option<VertexId>> = vec![None; graph.len()];
    let mut depth = vec![usize::MAX; graph.len()];
    depth[y.0] = 0;
    let mut frontier = vec![y];
    for level in 0..4 {
        let mut next = Vec::new();
        for &u in &frontier {
            for &(v, _) in graph.neighbors(u) {
                // walk from y to x avoiding the edge itself
                if (u == y && v == x) || depth[v.0] != usize::MAX {
                    continue;
                }
                depth[v.0] = level + 1;
                parent[v.0] = Some(u);
                if v == x {
                    let mut cycle = vec![x];
                    let mut cur = x;
                    while let Some(p) = parent[cur.0] {
                        cycle.push(p);
                        cur = p;
                    }
                    cycle.push(x);
                    return Some(cycle);
                }
                next.push(v);
            }
        }
        frontier = next;
    }
    None
}

/// `κ(x,y) = 2b(x,y)(1/m(x) + 1/m(y)) − Deg(x) − Deg(y)` for an edge on no
/// 3-, 4- or 5-cycle.
pub fn ollivier_closed_form_cyclefree(graph: &WeightedGraph, x: VertexId, y: VertexId) -> Result<f64> {
    distinct_pair(graph, x, y)?;
    if !graph.adjacent(x, y) {
        return Err(Error::pre(format!(
            "`{}` and `{}` are not adjacent",
            graph.name(x),
            graph.name(y)
        )));
    }
    if let Some(cycle) = short_cycle_through(graph, x, y) {
        return Err(Error::CycleWitness(
            cycle.iter().map(|&v| graph.name(v).to_string()).collect(),
        ));
    }
    let b = graph.weight(x, y);
    Ok(2.0 * b * (1.0 / graph.measure(x) + 1.0 / graph.measure(y))
        - graph.degree(x)
        - graph.degree(y))
}

/// A birth-death chain on `0..n` with `b(i, i+1)` and `m(i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BirthDeathChain {
    pub weights: Vec<f64>,
    pub measure: Vec<f64>,
    /// Vertex of the graph at each chain position, when built from a graph.
    pub vertices: Vec<VertexId>,
}

impl BirthDeathChain {
    /// Reads a path graph rooted at its endpoint `root`.
    pub fn from_graph(graph: &WeightedGraph, root: VertexId) -> Result<Self> {
        graph.check(root)?;
        let not_chain = |why: &str| Error::pre(format!("not a birth-death chain: {why}"));
        if !graph.is_connected() {
            return Err(not_chain("graph is disconnected"));
        }
        if graph.edge_count() + 1 != graph.len() {
            return Err(not_chain("graph has cycles"));
        }
        if graph.len() > 1 && graph.neighbors(root).len() != 1 {
            return Err(not_chain("root is not an endpoint"));
        }
        let mut vertices = vec![root];
        let mut weights = Vec::new();
        let mut prev: Option<VertexId> = None;
        let mut cur = root;
        loop {
            let forward: Vec<&(VertexId, f64)> = graph
                .neighbors(cur)
                .iter()
                .filter(|(v, _)| Some(*v) != prev)
                .collect();
            match forward.as_slice() {
                [] => break,
                [&(v, b)] => {
                    weights.push(b);
                    vertices.push(v);
                    prev = Some(cur);
                    cur = v;
                }
                _ => return Err(not_chain("a vertex has more than two neighbours")),
            }
        }
        Ok(Self {
            measure: vertices.iter().map(|&v| graph.measure(v)).collect(),
            weights,
            vertices,
        })
    }

    /// The reduced chain `m(r) = m(S_r)`, `b(r, r+1) = ∂B(r)` of a profile.
    pub fn from_profile(profile: &RadialProfile) -> Self {
        Self {
            weights: profile.boundary().to_vec(),
            measure: profile.sphere_mass().to_vec(),
            vertices: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.measure.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measure.is_empty()
    }

    fn forward(&self, i: usize) -> f64 {
        self.weights.get(i).copied().unwrap_or(0.0)
    }

    fn backward(&self, i: usize) -> f64 {
        if i == 0 {
            0.0
        } else {
            self.weights[i - 1]
        }
    }

    /// `(b(i,i+1) − b(i,i−1))/m(i)`, with missing edges counted as zero.
    fn drift(&self, i: usize) -> f64 {
        (self.forward(i) - self.backward(i)) / self.measure[i]
    }
}

/// Closed-form `κ(j,k)` on a birth-death chain, `k > j ≥ 0`.
pub fn ollivier_birthdeath(chain: &BirthDeathChain, j: usize, k: usize) -> Result<f64> {
    if k <= j || k >= chain.len() {
        return Err(Error::pre(format!(
            "chain curvature needs 0 <= j < k < {}, got ({j}, {k})",
            chain.len()
        )));
    }
    Ok((chain.drift(j) - chain.drift(k)) / (k - j) as f64)
}

/// `μ_x^ε` on `{x} ∪ N(x)`.
fn idle_measure(graph: &WeightedGraph, x: VertexId, eps: f64) -> Vec<(VertexId, f64)> {
    let mut mu = vec![(x, 1.0 - eps * graph.degree(x))];
    let m = graph.measure(x);
    mu.extend(graph.neighbors(x).iter().map(|&(z, b)| (z, eps * b / m)));
    mu.sort_by_key(|p| p.0);
    mu
}

/// `κ^ε(x,y)/ε` from the Wasserstein distance of the lazy random-walk
/// measures.
pub fn ollivier_epsilon_oracle(graph: &WeightedGraph, x: VertexId, y: VertexId, eps: f64) -> Result<f64> {
    let dxy = distinct_pair(graph, x, y)?;
    let max_eps = 1.0 / graph.degree(x).max(graph.degree(y));
    if !(eps > 0.0 && eps <= max_eps) {
        return Err(Error::pre(format!(
            "ε must lie in (0, {}], got {eps}",
            fmt_sig(max_eps)
        )));
    }
    let mu = idle_measure(graph, x, eps);
    let nu = idle_measure(graph, y, eps);
    let sources: Vec<VertexId> = mu.iter().map(|p| p.0).collect();
    let targets: Vec<VertexId> = nu.iter().map(|p| p.0).collect();
    let (p, q) = (mu.len(), nu.len());
    let mut lp = LinearProgram::new(p * q);
    let mut cost = vec![0.0; p * q];
    for (i, &u) in sources.iter().enumerate() {
        let d = graph.bfs_limited(u, dxy + 2);
        for (j, &v) in targets.iter().enumerate() {
            cost[i * q + j] = d[v.0].expect("targets lie within reach") as f64;
        }
    }
    lp.set_objective(cost)?;
    for (i, &(_, mass)) in mu.iter().enumerate() {
        let row: Vec<(usize, f64)> = (0..q).map(|j| (i * q + j, 1.0)).collect();
        lp.add_sparse(&row, Relation::Eq, mass)?;
    }
    // the last column constraint is implied by the others
    for (j, &(_, mass)) in nu.iter().enumerate().take(q - 1) {
        let col: Vec<(usize, f64)> = (0..p).map(|i| (i * q + j, 1.0)).collect();
        lp.add_sparse(&col, Relation::Eq, mass)?;
    }
    let sol = lp.solve()?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::LinearProgram(format!(
            "transport LP reported {:?}",
            sol.status
        )));
    }
    Ok((1.0 - sol.objective / dxy as f64) / eps)
}

/// Any Ollivier method by name.
pub fn ollivier(graph: &WeightedGraph, x: VertexId, y: VertexId, method: OllivierMethod) -> Result<f64> {
    match method {
        OllivierMethod::DualLp => ollivier_dual_lp(graph, x, y),
        OllivierMethod::CycleFree => ollivier_closed_form_cyclefree(graph, x, y),
        OllivierMethod::Epsilon(e) => ollivier_epsilon_oracle(graph, x, y, e),
        OllivierMethod::BirthDeath => {
            let chain = BirthDeathChain::from_graph(graph, graph_endpoint(graph)?)?;
            let j = chain.vertices.iter().position(|&v| v == x).expect("chain vertex");
            let k = chain.vertices.iter().position(|&v| v == y).expect("chain vertex");
            ollivier_birthdeath(&chain, j.min(k), j.max(k))
        }
    }
}

/// Endpoint of a path graph that comes first in canonical order.
fn graph_endpoint(graph: &WeightedGraph) -> Result<VertexId> {
    graph
        .vertices()
        .find(|&v| graph.neighbors(v).len() <= 1)
        .ok_or_else(|| Error::pre("not a birth-death chain: no endpoint"))
}

/// Ollivier curvature of one edge.
#[derive(Debug, Clone)]
pub struct EdgeCurvature {
    pub x: VertexId,
    pub y: VertexId,
    pub value: f64,
    pub contaminated: bool,
}

/// Ollivier curvature of every edge, in canonical edge order. When `outer`
/// is the radius of a truncated realization around `root`, pairs whose
/// neighbourhoods reach the outer sphere are flagged.
pub fn edge_curvatures(
    graph: &WeightedGraph,
    method: OllivierMethod,
    boundary: Option<(VertexId, usize)>,
) -> Result<Vec<EdgeCurvature>> {
    let hops = boundary.map(|(root, _)| graph.bfs(root));
    let edges: Vec<(VertexId, VertexId)> = graph.edges().map(|(x, y, _)| (x, y)).collect();
    edges
        .par_iter()
        .map(|&(x, y)| {
            let contaminated = match (&hops, boundary) {
                (Some(h), Some((_, outer))) => {
                    let far = |v: VertexId| h[v.0].is_none_or(|d| d + 1 >= outer);
                    far(x) || far(y)
                }
                _ => false,
            };
            Ok(EdgeCurvature {
                x,
                y,
                value: ollivier(graph, x, y, method)?,
                contaminated,
            })
        })
        .collect()
}

/// `κ(r) = min_{y∈S_r} max_{x∈S_{r−1}, x∼y} κ(x,y)`, `κ(0) = 0`.
pub fn sphere_curvature(graph: &WeightedGraph, x0: VertexId, r: usize) -> Result<f64> {
    graph.check(x0)?;
    if r == 0 {
        return Ok(0.0);
    }
    let sphere = graph.sphere(x0, r);
    if sphere.is_empty() {
        return Err(Error::pre(format!("sphere of radius {r} is empty")));
    }
    let inner = graph.sphere(x0, r - 1);
    let per_vertex: Vec<f64> = sphere
        .as_slice()
        .par_iter()
        .map(|&y| {
            let mut best = f64::NEG_INFINITY;
            for &(x, _) in graph.neighbors(y) {
                if inner.contains(x) {
                    best = best.max(ollivier_dual_lp(graph, x, y)?);
                }
            }
            Ok(best)
        })
        .collect::<Result<_>>()?;
    Ok(per_vertex.into_iter().fold(f64::INFINITY, f64::min))
}

/// `κ(0..=R)`.
pub fn sphere_curvatures(graph: &WeightedGraph, x0: VertexId, radius: usize) -> Result<Vec<f64>> {
    (0..=radius).map(|r| sphere_curvature(graph, x0, r)).collect()
}

#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub sphere_curvature: Vec<f64>,
    /// `(x, 𝓛ρ(x), Σ_{j≤ρ(x)} κ(j) − Deg(x0))` for `x ∈ B_R`.
    pub rows: Vec<(VertexId, f64, f64)>,
    pub max_violation: f64,
    /// Equality check, present when the graph is a chain rooted at `x0`.
    pub chain_equality: Option<bool>,
}

impl ComparisonReport {
    pub fn holds(&self) -> bool {
        self.max_violation <= LP_TOL
    }
}

/// Checks `𝓛ρ(x) ≥ Σ_{j=1}^{ρ(x)} κ(j) − Deg(x0)` on `B_R(x0)`, `ρ = d(·, x0)`.
pub fn laplacian_comparison_check(graph: &WeightedGraph, x0: VertexId, radius: usize) -> Result<ComparisonReport> {
    graph.check(x0)?;
    if !graph.is_connected() {
        return Err(Error::pre("Laplacian comparison needs a connected graph"));
    }
    let hops = graph.bfs(x0);
    let ecc = hops.iter().map(|h| h.expect("connected")).max().unwrap_or(0);
    if radius > ecc {
        return Err(Error::pre(format!(
            "radius {radius} exceeds the eccentricity {ecc} of the root"
        )));
    }
    let kappa = sphere_curvatures(graph, x0, radius)?;
    let rho = VertexFunction::from_fn(graph, |v| hops[v.0].expect("connected") as f64);
    let mut partial = vec![0.0; radius + 1];
    for r in 1..=radius {
        partial[r] = partial[r - 1] + kappa[r];
    }
    let deg0 = graph.degree(x0);
    let rows: Vec<(VertexId, f64, f64)> = graph
        .vertices()
        .filter(|v| hops[v.0].expect("connected") <= radius)
        .map(|v| {
            let r = hops[v.0].expect("connected");
            (v, apply_laplacian(graph, &rho, v), partial[r] - deg0)
        })
        .collect();
    let max_violation = rows
        .iter()
        .map(|&(_, lhs, rhs)| rhs - lhs)
        .fold(f64::NEG_INFINITY, f64::max);
    let chain_equality = BirthDeathChain::from_graph(graph, x0)
        .ok()
        .map(|_| rows.iter().all(|&(_, lhs, rhs)| (lhs - rhs).abs() <= LP_TOL));
    Ok(ComparisonReport {
        sphere_curvature: kappa,
        rows,
        max_violation,
        chain_equality,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayVerdict {
    Satisfied,
    NotSatisfied,
    Borderline,
}

impl DecayVerdict {
    pub fn label(self) -> &'static str {
        match self {
            DecayVerdict::Satisfied => "criterion-satisfied",
            DecayVerdict::NotSatisfied => "not-satisfied",
            DecayVerdict::Borderline => "borderline",
        }
    }
}

/// Thresholds on the fitted `δ` in `κ(r) ≈ −(log r)^{1+δ}`.
pub const DECAY_SATISFIED: f64 = 0.05;
pub const DECAY_FAILED: f64 = 0.15;

#[derive(Debug, Clone)]
pub struct DecayReport {
    /// Smallest `C` with `κ(r) ≥ −C log r` on the tail.
    pub c: f64,
    /// Fitted `δ`; `NaN` when fewer than two tail radii are negatively curved.
    pub delta: f64,
    pub verdict: DecayVerdict,
}

impl DecayReport {
    pub fn policy() -> String {
        format!(
            "heuristic: fit log(-kappa) ~ (1+delta)*log log r over negative kappa on the tail r >= max(3, R/2); criterion-satisfied if delta < {}, not-satisfied if delta > {}, borderline otherwise; sharpness regime kappa ~ -(log r)^(1+eps) lies beyond the criterion",
            fmt_sig(DECAY_SATISFIED),
            fmt_sig(DECAY_FAILED)
        )
    }
}

/// Tests `κ(r) ≥ −C log r` for large `r` on a sampled sphere-curvature table.
pub fn curvature_sc_test(kappa: &[f64]) -> Result<DecayReport> {
    if kappa.len() < 11 {
        return Err(Error::pre(format!(
            "log-decay test needs sphere curvature up to R >= 10, got R = {}",
            kappa.len().saturating_sub(1)
        )));
    }
    let r_max = kappa.len() - 1;
    let tail: Vec<usize> = ((r_max / 2).max(3)..=r_max).collect();
    let c = tail
        .iter()
        .map(|&r| -kappa[r] / (r as f64).ln())
        .fold(0.0, f64::max);
    let (xs, ys): (Vec<f64>, Vec<f64>) = tail
        .iter()
        .filter(|&&r| kappa[r] < 0.0)
        .map(|&r| ((r as f64).ln().ln(), (-kappa[r]).ln()))
        .unzip();
    let delta = linear_fit(&xs, &ys).map_or(f64::NAN, |(s, _)| s - 1.0);
    let verdict = if delta.is_nan() || delta < DECAY_SATISFIED {
        DecayVerdict::Satisfied
    } else if delta > DECAY_FAILED {
        DecayVerdict::NotSatisfied
    } else {
        DecayVerdict::Borderline
    };
    Ok(DecayReport { c, delta, verdict })
}

/// Quadratic forms of `Γ(·)(x)` and `Γ₂(·)(x)` in the values on `B₂(x)`.
#[derive(Debug, Clone)]
pub struct LocalForms {
    pub ball: VertexSet,
    pub gamma: DMatrix<f64>,
    pub gamma2: DMatrix<f64>,
}

pub fn local_forms(graph: &WeightedGraph, x: VertexId) -> Result<LocalForms> {
    graph.check(x)?;
    let ball = graph.ball(x, 2);
    let idx = |v: VertexId| ball.as_slice().binary_search(&v).expect("inside B₂");
    let n = ball.len();
    let gamma_of = |v: VertexId| {
        let mut g = DMatrix::zeros(n, n);
        let c = 1.0 / (2.0 * graph.measure(v));
        let iv = idx(v);
        for &(z, b) in graph.neighbors(v) {
            let iz = idx(z);
            let w = c * b;
            g[(iz, iz)] += w;
            g[(iv, iv)] += w;
            g[(iz, iv)] -= w;
            g[(iv, iz)] -= w;
        }
        g
    };
    let lap_row = |v: VertexId| {
        let mut l = vec![0.0; n];
        let m = graph.measure(v);
        for &(z, b) in graph.neighbors(v) {
            l[idx(v)] += b / m;
            l[idx(z)] -= b / m;
        }
        l
    };
    let gx = gamma_of(x);
    let lx = lap_row(x);
    let mx = graph.measure(x);
    let mut q = DMatrix::zeros(n, n);
    for &(y, b) in graph.neighbors(x) {
        let w = b / (2.0 * mx);
        q += (gamma_of(y) - &gx) * w;
        let ly = lap_row(y);
        let (iy, ix) = (idx(y), idx(x));
        for k in 0..n {
            let dl = ly[k] - lx[k];
            if dl != 0.0 {
                // symmetric part of (e_y − e_x)(ℓ_y − ℓ_x)ᵀ
                q[(iy, k)] += 0.5 * w * dl;
                q[(k, iy)] += 0.5 * w * dl;
                q[(ix, k)] -= 0.5 * w * dl;
                q[(k, ix)] -= 0.5 * w * dl;
            }
        }
    }
    Ok(LocalForms {
        ball,
        gamma: gx,
        gamma2: q,
    })
}

#[derive(Debug, Clone)]
pub struct BakryEmery {
    pub kappa: f64,
    /// Numerical nullity of the `Γ` form on `B₂(x)`.
    pub null_dim: usize,
    /// Smallest eigenvalue of `Γ₂` on functions vanishing on `B₁(x)`.
    pub null_min: f64,
}

fn symmetric_eigenvalues(m: DMatrix<f64>, what: &str) -> Result<Vec<f64>> {
    let n = m.nrows();
    let sym = (&m + m.transpose()) * 0.5;
    SymmetricEigen::try_new(sym, f64::EPSILON, 1000 * n.max(10))
        .map(|e| e.eigenvalues.iter().copied().collect())
        .ok_or_else(|| Error::EigenFailure(format!("{what}: no convergence")))
}

/// `κ_BE(x)`: with `f(x) = 0` fixed, `Γ` is diagonal on the neighbours and
/// vanishes on `S₂(x)`, where `Γ₂` is positive definite. Minimizing `Γ₂`
/// over the `S₂` values leaves the Schur complement `S` on the neighbours,
/// and `κ_BE(x)` is the smallest eigenvalue of the pencil `(S, Γ)` there.
pub fn bakry_emery_curvature(graph: &WeightedGraph, x: VertexId) -> Result<BakryEmery> {
    let forms = local_forms(graph, x)?;
    let set = forms.ball.as_slice();
    let n = set.len();
    let ix = set.binary_search(&x).expect("center");
    let a: Vec<usize> = (0..n)
        .filter(|&i| i != ix && graph.adjacent(x, set[i]))
        .collect();
    let nn: Vec<usize> = (0..n).filter(|&i| i != ix && !a.contains(&i)).collect();

    let g_eigs = symmetric_eigenvalues(forms.gamma.clone(), "Γ form")?;
    let g_scale = g_eigs.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let null_dim = g_eigs.iter().filter(|v| v.abs() <= RANK_TOL * g_scale).count();
    let expected = nn.len() + 1;
    if null_dim != expected {
        return Err(Error::EigenFailure(format!(
            "Γ form at `{}` has numerical nullity {null_dim}, expected {expected}",
            graph.name(x)
        )));
    }
    if a.is_empty() {
        return Ok(BakryEmery {
            kappa: f64::INFINITY,
            null_dim,
            null_min: 0.0,
        });
    }
    let sub = |rows: &[usize], cols: &[usize]| {
        DMatrix::from_fn(rows.len(), cols.len(), |i, j| forms.gamma2[(rows[i], cols[j])])
    };
    let q_aa = sub(&a, &a);
    let (schur, null_min) = if nn.is_empty() {
        (q_aa, f64::INFINITY)
    } else {
        let q_nn = sub(&nn, &nn);
        let null_min = symmetric_eigenvalues(q_nn.clone(), "Γ₂ on S₂")?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if null_min < -RANK_TOL {
            return Err(Error::EigenFailure(format!(
                "Γ₂ is negative ({}) on functions vanishing near `{}`",
                fmt_sig(null_min),
                graph.name(x)
            )));
        }
        let chol = q_nn.cholesky().ok_or_else(|| {
            Error::EigenFailure(format!("Γ₂ on S₂(`{}`) is not positive definite", graph.name(x)))
        })?;
        let q_na = sub(&nn, &a);
        let correction = q_na.transpose() * chol.solve(&q_na);
        (q_aa - correction, null_min)
    };
    let mx = graph.measure(x);
    let scale: Vec<f64> = a
        .iter()
        .map(|&i| (2.0 * mx / graph.weight(x, set[i])).sqrt())
        .collect();
    let pencil = DMatrix::from_fn(a.len(), a.len(), |i, j| schur[(i, j)] * scale[i] * scale[j]);
    let kappa = symmetric_eigenvalues(pencil, "Bakry–Émery pencil")?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    Ok(BakryEmery {
        kappa,
        null_dim,
        null_min,
    })
}

/// `CD(K, ∞)` at `x`, i.e. `κ_BE(x) ≥ K − 1e-9`.
pub fn cd_check(graph: &WeightedGraph, x: VertexId, k: f64) -> Result<bool> {
    Ok(bakry_emery_curvature(graph, x)?.kappa >= k - LP_TOL)
}

/// `φ_n = min{max{(2n − ρ(·, x0))/n, 0}, 1}`.
pub fn cutoff_function(graph: &WeightedGraph, rho: &PseudoMetric, x0: VertexId, n: f64) -> Result<VertexFunction> {
    if !(n > 0.0) {
        return Err(Error::NonPositive {
            what: "cutoff scale".into(),
            value: n,
        });
    }
    let d = rho.distances_from(x0)?;
    Ok(VertexFunction::from_fn(graph, |v| match d[v.0] {
        Some(r) => ((2.0 * n - r) / n).clamp(0.0, 1.0),
        None => 0.0,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Edge,
    Vertex,
    Sphere,
}

#[derive(Debug, Clone)]
pub struct CurvatureRow {
    pub kind: RowKind,
    pub id1: String,
    pub id2: String,
    pub value: f64,
    pub method: String,
    pub flags: String,
}

/// Collected curvature values with their methods and flags.
#[derive(Debug, Clone, Default)]
pub struct CurvatureReport {
    pub rows: Vec<CurvatureRow>,
    pub decay: Option<DecayReport>,
}

impl CurvatureReport {
    pub fn push_edges(&mut self, graph: &WeightedGraph, edges: &[EdgeCurvature], method: OllivierMethod) {
        for e in edges {
            let mut flags = format!("tol={}", fmt_sig(LP_TOL));
            if e.contaminated {
                flags.push_str(";boundary-contaminated");
            }
            self.rows.push(CurvatureRow {
                kind: RowKind::Edge,
                id1: graph.name(e.x).into(),
                id2: graph.name(e.y).into(),
                value: e.value,
                method: method.name(),
                flags,
            });
        }
    }

    pub fn push_vertex(&mut self, graph: &WeightedGraph, x: VertexId, be: &BakryEmery) {
        self.rows.push(CurvatureRow {
            kind: RowKind::Vertex,
            id1: graph.name(x).into(),
            id2: String::new(),
            value: be.kappa,
            method: "bakry-emery-schur".into(),
            flags: format!("tol={};null_dim={}", fmt_sig(RANK_TOL), be.null_dim),
        });
    }

    /// Sphere curvature rows; radii `r ≥ outer − 1` are flagged when the
    /// graph is a truncated realization of radius `outer`.
    pub fn push_spheres(&mut self, graph: &WeightedGraph, x0: VertexId, kappa: &[f64], outer: Option<usize>) {
        for (r, &k) in kappa.iter().enumerate() {
            let mut flags = format!("tol={}", fmt_sig(LP_TOL));
            if outer.is_some_and(|o| r > 0 && r + 1 >= o) {
                flags.push_str(";boundary-contaminated");
            }
            self.rows.push(CurvatureRow {
                kind: RowKind::Sphere,
                id1: graph.name(x0).into(),
                id2: r.to_string(),
                value: k,
                method: "dual-lp".into(),
                flags,
            });
        }
    }

    /// `kind,id1,id2,value,method,flags`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("kind,id1,id2,value,method,flags\n");
        for row in &self.rows {
            let kind = match row.kind {
                RowKind::Edge => "edge",
                RowKind::Vertex => "vertex",
                RowKind::Sphere => "sphere",
            };
            let _ = writeln!(
                out,
                "{kind},{},{},{},{},{}",
                row.id1,
                row.id2,
                fmt_sig(row.value),
                row.method,
                row.flags
            );
        }
        if let Some(d) = &self.decay {
            let _ = writeln!(
                out,
                "# log-decay: C={} delta={} verdict={} ({})",
                fmt_sig(d.c),
                fmt_sig(d.delta),
                d.verdict.label(),
                DecayReport::policy()
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete, cycle, path, path_vertex, regular_tree};

    fn k2() -> WeightedGraph {
        WeightedGraph::parse("v a 1\nv b 1\ne a b 1").unwrap()
    }

    #[test]
    fn k2_values() {
        let g = k2();
        let (a, b) = (g.vertex("a").unwrap(), g.vertex("b").unwrap());
        assert!((ollivier_dual_lp(&g, a, b).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(ollivier_closed_form_cyclefree(&g, a, b).unwrap(), 2.0);
        // at ε = 1/2 both lazy measures are uniform on {a, b}, so W = 0
        let half = ollivier_epsilon_oracle(&g, a, b, 0.5).unwrap();
        assert!((half - 2.0).abs() < 1e-12);
        let small = ollivier_epsilon_oracle(&g, a, b, 1e-4).unwrap();
        assert!((small - 2.0).abs() < 1e-2);
        assert!(ollivier_epsilon_oracle(&g, a, a, 0.1).is_err());
        assert!(ollivier_epsilon_oracle(&g, a, b, 1.5).is_err());
        let be = bakry_emery_curvature(&g, a).unwrap();
        assert!((be.kappa - 2.0).abs() < 1e-12);
        assert_eq!(be.null_dim, 1);
    }

    #[test]
    fn path_end_to_middle() {
        let g = path(3, |_| 1.0, |_| 1.0);
        let (e, m) = (g.vertex("p0").unwrap(), g.vertex("p1").unwrap());
        assert!((ollivier_dual_lp(&g, e, m).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn regular_tree_edges() {
        let g = regular_tree(3, 3);
        let root = g.vertex("t00").unwrap();
        let child = g.neighbors(root)[0].0;
        assert!((ollivier_dual_lp(&g, root, child).unwrap() + 2.0).abs() < 1e-9);
        assert!((sphere_curvature(&g, root, 2).unwrap() + 2.0).abs() < 1e-9);
        assert_eq!(sphere_curvature(&g, root, 0).unwrap(), 0.0);
        assert!(sphere_curvature(&g, root, 7).is_err());
    }

    #[test]
    fn triangle_witness() {
        let g = complete(3);
        let (a, b) = (g.vertex("k0").unwrap(), g.vertex("k1").unwrap());
        match ollivier_closed_form_cyclefree(&g, a, b) {
            Err(Error::CycleWitness(c)) => assert_eq!(c.len(), 4),
            other => panic!("expected witness, got {other:?}"),
        }
        let c5 = cycle(5);
        let (a, b) = (c5.vertex("c0").unwrap(), c5.vertex("c1").unwrap());
        assert!(matches!(ollivier_closed_form_cyclefree(&c5, a, b), Err(Error::CycleWitness(_))));
        let c6 = cycle(6);
        let (a, b) = (c6.vertex("c0").unwrap(), c6.vertex("c1").unwrap());
        assert!(ollivier_closed_form_cyclefree(&c6, a, b).is_ok());
    }

    #[test]
    fn chain_closed_form() {
        let g = path(10, |_| 1.0, |_| 1.0);
        let chain = BirthDeathChain::from_graph(&g, g.vertex(&path_vertex(10, 0)).unwrap()).unwrap();
        assert_eq!(ollivier_birthdeath(&chain, 0, 1).unwrap(), 1.0);
        assert_eq!(ollivier_birthdeath(&chain, 0, 2).unwrap(), 0.5);
        assert_eq!(ollivier_birthdeath(&chain, 5, 6).unwrap(), 0.0);
        assert!(ollivier_birthdeath(&chain, 3, 3).is_err());
        let root = g.vertex(&path_vertex(10, 0)).unwrap();
        for r in 2..8 {
            assert!(sphere_curvature(&g, root, r).unwrap().abs() < 1e-9);
        }
        assert!(BirthDeathChain::from_graph(&complete(3), VertexId(0)).is_err());
        let mid = g.vertex(&path_vertex(10, 4)).unwrap();
        assert!(BirthDeathChain::from_graph(&g, mid).is_err());
    }

    #[test]
    fn decay_test_templates() {
        let table = |f: &dyn Fn(f64) -> f64| -> Vec<f64> {
            (0..=200).map(|r| if r == 0 { 0.0 } else { f(r as f64) }).collect()
        };
        assert_eq!(curvature_sc_test(&table(&|_| -5.0)).unwrap().verdict, DecayVerdict::Satisfied);
        let sq = curvature_sc_test(&table(&|r: f64| -r.ln().powi(2))).unwrap();
        assert_eq!(sq.verdict, DecayVerdict::NotSatisfied);
        let lin = curvature_sc_test(&table(&|r: f64| -r.ln())).unwrap();
        assert_eq!(lin.verdict, DecayVerdict::Satisfied);
        assert!((lin.c - 1.0).abs() < 1e-12);
        assert!(curvature_sc_test(&[0.0; 5]).is_err());
    }

    #[test]
    fn report_layout() {
        let g = k2();
        let edges = edge_curvatures(&g, OllivierMethod::DualLp, None).unwrap();
        let mut rep = CurvatureReport::default();
        rep.push_edges(&g, &edges, OllivierMethod::DualLp);
        let csv = rep.to_csv();
        assert_eq!(csv, "kind,id1,id2,value,method,flags\nedge,a,b,2,dual-lp,tol=1e-09\n");
    }
}
