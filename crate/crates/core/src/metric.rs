//! Pseudo metrics on weighted graphs, intrinsic-metric checks, jump sizes,
//! edge truncation and volume-growth tests.
//!
//! A pseudo metric `ρ` is intrinsic when `Σ_y b(x,y)ρ²(x,y) ≤ m(x)` at every
//! vertex and adapted when the same holds for `min{ρ, 1}`. The path metrics
//! built here use the edge lengths `σ(x,y) = max{Deg(x), Deg(y)}^{-1/2}`
//! (intrinsic) or `σ₁ = min{σ, 1}` (adapted).

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};
use std::fmt::Write as _;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::graph::{VertexId, WeightedGraph};
use crate::laplacian::MonotoneTable;
use crate::numeric::{compensated_sum, fmt_sig, linear_fit, trapezoid};
use crate::radial::RadialProfile;

/// Slack below which a vertex violates the intrinsic inequality.
pub const INTRINSIC_TOL: f64 = -1e-12;
/// Half-width of the indeterminate band around exponent thresholds.
pub const EXPONENT_BAND: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    Combinatorial,
    Sigma,
    Sigma1,
    Table,
}

impl MetricKind {
    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Combinatorial => "combinatorial",
            MetricKind::Sigma => "sigma",
            MetricKind::Sigma1 => "sigma1",
            MetricKind::Table => "table",
        }
    }
}

type Distances = Arc<Vec<Option<f64>>>;

/// A pseudo metric `ρ = min{c·ρ₀, C}` where `ρ₀` is a path metric or an
/// explicit table. Distances from a source are computed on demand and cached.
#[derive(Debug)]
pub struct PseudoMetric {
    kind: MetricKind,
    lengths: Vec<Vec<(VertexId, f64)>>,
    table: Option<Vec<f64>>,
    scale: f64,
    cap: f64,
    cache: Mutex<HashMap<usize, (Distances, Arc<Vec<Option<VertexId>>>)>>,
}

impl Clone for PseudoMetric {
    fn clone(&self) -> Self {
        Self {
            kind: self.kind,
            lengths: self.lengths.clone(),
            table: self.table.clone(),
            scale: self.scale,
            cap: self.cap,
            cache: Mutex::new(HashMap::new()),
        }
    }
}

/// Heap entry ordered by distance, then vertex index.
#[derive(Debug, PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

impl PseudoMetric {
    fn path_metric<F>(graph: &WeightedGraph, kind: MetricKind, length: F) -> Self
    where
        F: Fn(VertexId, VertexId, f64) -> f64,
    {
        let lengths = graph
            .vertices()
            .map(|x| {
                graph
                    .neighbors(x)
                    .iter()
                    .map(|&(y, b)| (y, length(x, y, b)))
                    .collect()
            })
            .collect();
        Self {
            kind,
            lengths,
            table: None,
            scale: 1.0,
            cap: f64::INFINITY,
            cache: Mutex::new(HashMap::new()),
        }
    }

    /// Combinatorial graph distance.
    pub fn combinatorial(graph: &WeightedGraph) -> Self {
        Self::path_metric(graph, MetricKind::Combinatorial, |_, _, _| 1.0)
    }

    /// Path metric of `σ(x,y) = max{Deg(x), Deg(y)}^{-1/2}`.
    pub fn sigma(graph: &WeightedGraph) -> Self {
        Self::path_metric(graph, MetricKind::Sigma, |x, y, _| {
            graph.degree(x).max(graph.degree(y)).sqrt().recip()
        })
    }

    /// Path metric of `σ₁ = min{σ, 1}`.
    pub fn sigma1(graph: &WeightedGraph) -> Self {
        Self::path_metric(graph, MetricKind::Sigma1, |x, y, _| {
            graph.degree(x).max(graph.degree(y)).sqrt().recip().min(1.0)
        })
    }

    /// Explicit distance table, row-major over canonical vertex order;
    /// `inf` marks unreachable pairs.
    pub fn table(graph: &WeightedGraph, rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = graph.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::pre(format!("distance table must be {n}x{n}")));
        }
        for i in 0..n {
            if rows[i][i] != 0.0 {
                return Err(Error::pre(format!("nonzero diagonal at `{}`", graph.name(VertexId(i)))));
            }
            for j in 0..n {
                let d = rows[i][j];
                if d.is_nan() || d < 0.0 || d != rows[j][i] {
                    return Err(Error::pre(format!(
                        "table entry ({}, {}) must be nonnegative and symmetric",
                        graph.name(VertexId(i)),
                        graph.name(VertexId(j))
                    )));
                }
            }
        }
        Ok(Self {
            kind: MetricKind::Table,
            lengths: Vec::new(),
            table: Some(rows.into_iter().flatten().collect()),
            scale: 1.0,
            cap: f64::INFINITY,
            cache: Mutex::new(HashMap::new()),
        })
    }

    /// `min{ρ, C}`.
    pub fn capped(&self, cap: f64) -> Result<Self> {
        if !(cap > 0.0) {
            return Err(Error::NonPositive {
                what: "metric cap".into(),
                value: cap,
            });
        }
        Ok(Self {
            cap: self.cap.min(cap),
            ..self.clone()
        })
    }

    /// `c·ρ`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::NonPositive {
                what: "metric scale".into(),
                value: factor,
            });
        }
        Ok(Self {
            scale: self.scale * factor,
            cap: self.cap,
            ..self.clone()
        })
    }

    pub fn kind(&self) -> MetricKind {
        self.kind
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    pub fn describe(&self) -> String {
        let mut s = self.kind.name().to_string();
        if self.scale != 1.0 {
            s = format!("{}*{s}", fmt_sig(self.scale));
        }
        if self.cap.is_finite() {
            s = format!("capped({s}, {})", fmt_sig(self.cap));
        }
        s
    }

    fn len(&self) -> usize {
        match &self.table {
            Some(t) => (t.len() as f64).sqrt().round() as usize,
            None => self.lengths.len(),
        }
    }

    fn check(&self, v: VertexId) -> Result<()> {
        if v.0 < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownVertex(format!("#{}", v.0)))
        }
    }

    /// Dijkstra from `source`; ties between equal-length paths keep the
    /// predecessor that comes first in canonical order.
    fn search(&self, source: usize) -> (Distances, Arc<Vec<Option<VertexId>>>) {
        if let Some(hit) = self.cache.lock().expect("metric cache").get(&source) {
            return hit.clone();
        }
        let n = self.len();
        let mut dist: Vec<Option<f64>> = vec![None; n];
        let mut pred: Vec<Option<VertexId>> = vec![None; n];
        if let Some(t) = &self.table {
            for j in 0..n {
                let d = t[source * n + j];
                dist[j] = d.is_finite().then_some(d);
            }
        } else {
            let mut done = vec![false; n];
            let mut heap = BinaryHeap::new();
            dist[source] = Some(0.0);
            heap.push(Reverse(Entry(0.0, source)));
            while let Some(Reverse(Entry(d, u))) = heap.pop() {
                if done[u] {
                    continue;
                }
                done[u] = true;
                for &(v, len) in &self.lengths[u] {
                    if done[v.0] {
                        continue;
                    }
                    let alt = d + len;
                    match dist[v.0] {
                        Some(cur) if alt > cur => {}
                        Some(cur) if alt == cur => {
                            if pred[v.0].is_some_and(|p| u < p.0) {
                                pred[v.0] = Some(VertexId(u));
                            }
                        }
                        _ => {
                            dist[v.0] = Some(alt);
                            pred[v.0] = Some(VertexId(u));
                            heap.push(Reverse(Entry(alt, v.0)));
                        }
                    }
                }
            }
        }
        let entry = (Arc::new(dist), Arc::new(pred));
        self.cache
            .lock()
            .expect("metric cache")
            .insert(source, entry.clone());
        entry
    }

    fn finish(&self, raw: Option<f64>) -> Option<f64> {
        match raw {
            Some(d) => Some((d * self.scale).min(self.cap)),
            None if self.cap.is_finite() => Some(self.cap),
            None => None,
        }
    }

    /// `ρ(x, y)`; `None` marks points at infinite distance.
    pub fn distance(&self, x: VertexId, y: VertexId) -> Result<Option<f64>> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.finish(self.search(x.0).0[y.0]))
    }

    /// `ρ(x, ·)` over all vertices.
    pub fn distances_from(&self, x: VertexId) -> Result<Vec<Option<f64>>> {
        self.check(x)?;
        Ok(self.search(x.0).0.iter().map(|&d| self.finish(d)).collect())
    }

    /// Vertices of a shortest path from `x` to `y` (path metrics only).
    pub fn shortest_path(&self, x: VertexId, y: VertexId) -> Result<Option<Vec<VertexId>>> {
        self.check(x)?;
        self.check(y)?;
        if self.table.is_some() {
            return Err(Error::pre("table metrics carry no paths"));
        }
        let (dist, pred) = self.search(x.0);
        if dist[y.0].is_none() {
            return Ok(None);
        }
        let mut path = vec![y];
        let mut cur = y;
        while cur != x {
            cur = pred[cur.0].expect("reachable vertices have predecessors");
            path.push(cur);
        }
        path.reverse();
        Ok(Some(path))
    }
}

/// Per-vertex slack `m(x) − Σ_y b(x,y)ρ²(x,y)` and its adapted variant.
#[derive(Debug, Clone)]
pub struct IntrinsicReport {
    pub slack: Vec<f64>,
    pub adapted_slack: Vec<f64>,
    pub min_slack: (VertexId, f64),
    pub min_adapted_slack: (VertexId, f64),
}

impl IntrinsicReport {
    pub fn intrinsic(&self) -> bool {
        self.min_slack.1 >= INTRINSIC_TOL
    }

    pub fn adapted(&self) -> bool {
        self.min_adapted_slack.1 >= INTRINSIC_TOL
    }
}

/// `ρ(x,y)` for every adjacent pair, listed per vertex.
fn edge_distances(graph: &WeightedGraph, rho: &PseudoMetric) -> Result<Vec<Vec<f64>>> {
    graph
        .vertices()
        .map(|x| {
            let d = rho.distances_from(x)?;
            Ok(graph
                .neighbors(x)
                .iter()
                .map(|&(y, _)| d[y.0].unwrap_or(f64::INFINITY))
                .collect())
        })
        .collect()
}

pub fn verify_intrinsic(graph: &WeightedGraph, rho: &PseudoMetric) -> Result<IntrinsicReport> {
    if graph.is_empty() {
        return Err(Error::pre("empty graph"));
    }
    let lengths = edge_distances(graph, rho)?;
    let mut slack = Vec::with_capacity(graph.len());
    let mut adapted_slack = Vec::with_capacity(graph.len());
    for x in graph.vertices() {
        let nb = graph.neighbors(x);
        let l = &lengths[x.0];
        let full = compensated_sum(nb.iter().zip(l).map(|(&(_, b), &d)| b * d * d));
        let adapted = compensated_sum(nb.iter().zip(l).map(|(&(_, b), &d)| {
            let c = d.min(1.0);
            b * c * c
        }));
        slack.push(graph.measure(x) - full);
        adapted_slack.push(graph.measure(x) - adapted);
    }
    let argmin = |v: &[f64]| {
        let (i, &s) = v
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty");
        (VertexId(i), s)
    };
    Ok(IntrinsicReport {
        min_slack: argmin(&slack),
        min_adapted_slack: argmin(&adapted_slack),
        slack,
        adapted_slack,
    })
}

/// Smallest `ρ(x, y)` over edges; an intrinsic metric with edge lengths at
/// least `C` forces `sup Deg ≤ 1/C²`.
pub fn min_edge_length(graph: &WeightedGraph, rho: &PseudoMetric) -> Result<Option<f64>> {
    Ok(edge_distances(graph, rho)?
        .into_iter()
        .flatten()
        .min_by(f64::total_cmp))
}

/// Jump size `j_r = sup{ρ(x,y) : x ∼ y, x, y ∉ B_r^ρ(x0)}`; zero when no
/// such edge exists.
pub fn jump_size(graph: &WeightedGraph, rho: &PseudoMetric, r: f64, x0: VertexId) -> Result<f64> {
    graph.check(x0)?;
    let from_root = rho.distances_from(x0)?;
    let outside = |v: VertexId| from_root[v.0].is_none_or(|d| d > r);
    let mut j: f64 = 0.0;
    for (x, y, _) in graph.edges() {
        if outside(x) && outside(y) {
            j = j.max(rho.distance(x, y)?.unwrap_or(f64::INFINITY));
        }
    }
    Ok(j)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GloballyLocal {
    Consistent,
    Inconsistent,
    Inconclusive,
}

impl GloballyLocal {
    pub fn label(self) -> &'static str {
        match self {
            GloballyLocal::Consistent => "globally-local-consistent",
            GloballyLocal::Inconsistent => "globally-local-inconsistent",
            GloballyLocal::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone)]
pub struct GloballyLocalReport {
    pub radii: Vec<f64>,
    pub jumps: Vec<f64>,
    /// `j_r·f(A r)/r` on the grid.
    pub ratios: Vec<f64>,
    /// Maximum of the ratios over the tail (last half of the grid).
    pub tail_max: f64,
    /// Log-log slope of the ratios over the tail.
    pub tail_slope: f64,
    pub verdict: GloballyLocal,
}

impl GloballyLocalReport {
    pub fn policy() -> String {
        format!(
            "heuristic: the limsup of j_r*f(A*r)/r is estimated by its maximum over the last half of the sampled radii (finite-sample estimate); consistent if the ratio is finite with log-log tail slope <= {}, inconsistent if the slope exceeds it",
            fmt_sig(EXPONENT_BAND)
        )
    }
}

/// Finite-sample check of `limsup_r j_r·f(A r)/r < ∞`.
pub fn globally_local_check(
    graph: &WeightedGraph,
    rho: &PseudoMetric,
    x0: VertexId,
    f: &MonotoneTable,
    a: f64,
    radii: &[f64],
) -> Result<GloballyLocalReport> {
    if !(a > 1.0) {
        return Err(Error::pre(format!("globally-local check needs A > 1, got {a}")));
    }
    if radii.len() < 2 || radii.iter().any(|&r| !(r > 0.0)) || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::pre("radii must be positive, strictly increasing, at least two"));
    }
    let jumps = radii
        .iter()
        .map(|&r| jump_size(graph, rho, r, x0))
        .collect::<Result<Vec<_>>>()?;
    let ratios: Vec<f64> = radii
        .iter()
        .zip(&jumps)
        .map(|(&r, &j)| j * f.eval(a * r) / r)
        .collect();
    let tail = radii.len() / 2;
    let tail_max = ratios[tail..].iter().copied().fold(0.0, f64::max);
    let (xs, ys): (Vec<f64>, Vec<f64>) = (tail..radii.len())
        .filter(|&i| ratios[i] > 0.0 && ratios[i].is_finite())
        .map(|i| (radii[i].ln(), ratios[i].ln()))
        .unzip();
    let all_zero = ratios[tail..].iter().all(|&q| q == 0.0);
    let tail_slope = linear_fit(&xs, &ys).map_or(f64::NAN, |(s, _)| s);
    let verdict = if !tail_max.is_finite() {
        GloballyLocal::Inconsistent
    } else if all_zero || tail_slope <= EXPONENT_BAND {
        GloballyLocal::Consistent
    } else if tail_slope > EXPONENT_BAND {
        GloballyLocal::Inconsistent
    } else {
        GloballyLocal::Inconclusive
    };
    Ok(GloballyLocalReport {
        radii: radii.to_vec(),
        jumps,
        ratios,
        tail_max,
        tail_slope,
        verdict,
    })
}

/// Result of removing long edges.
#[derive(Debug, Clone)]
pub struct Truncation {
    pub graph: WeightedGraph,
    pub threshold: f64,
    pub removed: usize,
}

impl Truncation {
    pub fn transfer_note(&self) -> &'static str {
        "if the truncated graph G_s is stochastically complete, then G is stochastically complete (SC transfers to G)"
    }
}

/// `G_s`: keeps the edges with `ρ(x,y) ≤ s`.
pub fn truncate_edges(graph: &WeightedGraph, rho: &PseudoMetric, s: f64) -> Result<Truncation> {
    if !(s > 0.0) {
        return Err(Error::NonPositive {
            what: "truncation threshold".into(),
            value: s,
        });
    }
    let lengths = edge_distances(graph, rho)?;
    let keep = |x: VertexId, y: VertexId| {
        let i = graph
            .neighbors(x)
            .binary_search_by(|p| p.0.cmp(&y))
            .expect("edge endpoints are adjacent");
        lengths[x.0][i] <= s
    };
    let truncated = graph.filter_edges(|x, y, _| keep(x, y));
    Ok(Truncation {
        removed: graph.edge_count() - truncated.edge_count(),
        graph: truncated,
        threshold: s,
    })
}

/// Volumes `V(r) = m(B_r^ρ(x0))` on a radius grid.
#[derive(Debug, Clone)]
pub struct VolumeTable {
    pub center: Option<VertexId>,
    pub metric: String,
    pub kind: MetricKind,
    pub standard_weights: bool,
    pub radii: Vec<f64>,
    pub ball_sizes: Vec<usize>,
    pub volumes: Vec<f64>,
    pub log_volumes: Vec<f64>,
    /// Ball already contains every vertex reachable from the center.
    pub saturated: Vec<bool>,
    /// Saturation together with edge lengths shrinking toward the outer
    /// spheres: balls of the underlying infinite graph are likely infinite.
    pub finite_ball_suspect: bool,
}

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::pre("volume table needs at least one radius"));
    }
    if radii.iter().any(|r| !(*r >= 0.0)) || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::pre("radii must be nonnegative and strictly increasing"));
    }
    Ok(())
}

fn check_monotone(volumes: &[f64]) -> Result<()> {
    if volumes.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::pre("volume sequence is not monotone"));
    }
    Ok(())
}

impl VolumeTable {
    /// Combinatorial volumes of a radial profile at radii `0..=R`.
    pub fn from_profile(profile: &RadialProfile, standard_weights: bool) -> Self {
        let volumes = profile.volume();
        let n = volumes.len();
        Self {
            center: None,
            metric: MetricKind::Combinatorial.name().into(),
            kind: MetricKind::Combinatorial,
            standard_weights,
            radii: (0..n).map(|r| r as f64).collect(),
            ball_sizes: Vec::new(),
            log_volumes: volumes.iter().map(|v| v.ln()).collect(),
            volumes,
            saturated: vec![false; n],
            finite_ball_suspect: false,
        }
    }

    /// Synthetic table from `ln V(r)` values (avoids overflow of fast growth).
    pub fn from_log_volumes(radii: Vec<f64>, log_volumes: Vec<f64>) -> Result<Self> {
        check_radii(&radii)?;
        if radii.len() != log_volumes.len() {
            return Err(Error::pre("radii and volumes differ in length"));
        }
        check_monotone(&log_volumes)?;
        let n = radii.len();
        Ok(Self {
            center: None,
            metric: "synthetic".into(),
            kind: MetricKind::Table,
            standard_weights: false,
            radii,
            ball_sizes: Vec::new(),
            volumes: log_volumes.iter().map(|l| l.exp()).collect(),
            log_volumes,
            saturated: vec![false; n],
            finite_ball_suspect: false,
        })
    }

    /// `radius,ball_size_vertices,volume_measure,saturated_flag`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("radius,ball_size_vertices,volume_measure,saturated_flag\n");
        for i in 0..self.radii.len() {
            let size = self
                .ball_sizes
                .get(i)
                .map_or_else(String::new, |s| s.to_string());
            let _ = writeln!(
                out,
                "{},{},{},{}",
                fmt_sig(self.radii[i]),
                size,
                fmt_sig(self.volumes[i]),
                u8::from(self.saturated[i])
            );
        }
        out
    }
}

/// Mean `ρ`-length of edges between combinatorial spheres `r` and `r+1`.
fn shell_lengths(graph: &WeightedGraph, rho: &PseudoMetric, x0: VertexId) -> Result<Vec<f64>> {
    let hops = graph.bfs(x0);
    let mut sums: Vec<(f64, usize)> = Vec::new();
    for (x, y, _) in graph.edges() {
        let (Some(a), Some(b)) = (hops[x.0], hops[y.0]) else {
            continue;
        };
        if a == b {
            continue;
        }
        let r = a.min(b);
        if sums.len() <= r {
            sums.resize(r + 1, (0.0, 0));
        }
        let d = rho.distance(x, y)?.unwrap_or(f64::INFINITY);
        sums[r].0 += d;
        sums[r].1 += 1;
    }
    Ok(sums
        .into_iter()
        .map(|(s, c)| if c == 0 { f64::NAN } else { s / c as f64 })
        .collect())
}

pub fn volume_growth(
    graph: &WeightedGraph,
    x0: VertexId,
    rho: &PseudoMetric,
    radii: &[f64],
) -> Result<VolumeTable> {
    graph.check(x0)?;
    check_radii(radii)?;
    let d = rho.distances_from(x0)?;
    let reachable = d.iter().filter(|v| v.is_some()).count();
    let mut order: Vec<(f64, VertexId)> = graph
        .vertices()
        .filter_map(|v| d[v.0].map(|dv| (dv, v)))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut ball_sizes = Vec::with_capacity(radii.len());
    let mut volumes = Vec::with_capacity(radii.len());
    let mut k = 0;
    let mut acc = crate::numeric::CompensatedSum::new();
    for &r in radii {
        while k < order.len() && order[k].0 <= r {
            acc.add(graph.measure(order[k].1));
            k += 1;
        }
        ball_sizes.push(k);
        volumes.push(acc.value());
    }
    let saturated: Vec<bool> = ball_sizes.iter().map(|&s| s == reachable).collect();
    let finite_ball_suspect = if saturated.iter().any(|&s| s) && rho.kind() != MetricKind::Combinatorial {
        let shells = shell_lengths(graph, rho, x0)?;
        match (shells.first(), shells.last()) {
            (Some(&inner), Some(&outer)) if shells.len() >= 2 => outer < 0.5 * inner,
            _ => false,
        }
    } else {
        false
    };
    Ok(VolumeTable {
        center: Some(x0),
        metric: rho.describe(),
        kind: rho.kind(),
        standard_weights: graph.is_standard(),
        radii: radii.to_vec(),
        ball_sizes,
        log_volumes: volumes.iter().map(|v| v.ln()).collect(),
        volumes,
        saturated,
        finite_ball_suspect,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolumeVerdict {
    Satisfied,
    NotSatisfied,
    Borderline,
    HypothesisViolated,
}

impl VolumeVerdict {
    pub fn label(self) -> &'static str {
        match self {
            VolumeVerdict::Satisfied => "criterion-satisfied",
            VolumeVerdict::NotSatisfied => "not-satisfied",
            VolumeVerdict::Borderline => "borderline",
            VolumeVerdict::HypothesisViolated => "hypothesis violated",
        }
    }
}

#[derive(Debug, Clone)]
pub struct GrigoryanReport {
    /// Trapezoid value of `∫ r / log^#(V(r)) dr` over the grid.
    pub partial_integral: f64,
    /// Fitted `β` in `log log V ≈ β log r` over the tail.
    pub beta: f64,
    /// `min over the tail of log V / (r log r)`.
    pub adapted_statistic: f64,
    pub verdict: VolumeVerdict,
    pub detail: String,
}

impl GrigoryanReport {
    pub fn policy() -> String {
        format!(
            "heuristic: fit log log V ~ beta*log r on the last half of the grid; criterion-satisfied if beta <= {}, not-satisfied if beta >= {}, borderline otherwise; divergence of the integral cannot be certified from finite data",
            fmt_sig(2.0 - EXPONENT_BAND),
            fmt_sig(2.0 + EXPONENT_BAND)
        )
    }
}

/// Volume test `∫^∞ r / log^#(V(r)) dr = ∞` with `log^# = max{log, 1}`.
pub fn grigoryan_test(table: &VolumeTable) -> Result<GrigoryanReport> {
    check_monotone(&table.log_volumes)?;
    let n = table.radii.len();
    let integrand: Vec<f64> = table
        .radii
        .iter()
        .zip(&table.log_volumes)
        .map(|(&r, &l)| r / l.max(1.0))
        .collect();
    let partial_integral = trapezoid(&table.radii, &integrand);
    let tail = n / 2;
    let (xs, ys): (Vec<f64>, Vec<f64>) = (tail..n)
        .filter(|&i| table.radii[i] > 1.0 && table.log_volumes[i] > 1.0)
        .map(|i| (table.radii[i].ln(), table.log_volumes[i].ln()))
        .unzip();
    let beta = linear_fit(&xs, &ys).map_or(f64::NAN, |(b, _)| b);
    let adapted_statistic = (tail..n)
        .filter(|&i| table.radii[i] > 1.0)
        .map(|i| table.log_volumes[i] / (table.radii[i] * table.radii[i].ln()))
        .fold(f64::INFINITY, f64::min);
    let (verdict, detail) = if table.finite_ball_suspect {
        (
            VolumeVerdict::HypothesisViolated,
            "balls not finite: the ball saturates the realization while edge lengths keep shrinking".to_string(),
        )
    } else if beta.is_nan() {
        (
            VolumeVerdict::Borderline,
            "too few tail points with log V > 1 to fit an exponent".to_string(),
        )
    } else if beta <= 2.0 - EXPONENT_BAND {
        (VolumeVerdict::Satisfied, String::new())
    } else if beta >= 2.0 + EXPONENT_BAND {
        (VolumeVerdict::NotSatisfied, String::new())
    } else {
        (VolumeVerdict::Borderline, String::new())
    };
    Ok(GrigoryanReport {
        partial_integral,
        beta,
        adapted_statistic,
        verdict,
        detail,
    })
}

#[derive(Debug, Clone)]
pub struct CubicVolumeReport {
    /// Fitted `α` in `V ≈ C r^α` over the tail.
    pub alpha: f64,
    /// `Ĉ = max V(r)/r³` over the first half of the tail.
    pub c_hat: f64,
    /// `V(r) ≤ Ĉ r³` on the second half of the tail.
    pub bound_holds: bool,
    pub verdict: VolumeVerdict,
    pub detail: String,
}

impl CubicVolumeReport {
    pub fn policy() -> String {
        format!(
            "heuristic: fit V ~ C*r^alpha on the last half of the grid; criterion-satisfied iff alpha <= {} and V(r) <= C_hat*r^3 on the second half of that tail, C_hat = max V/r^3 over its first half",
            fmt_sig(3.0 + EXPONENT_BAND)
        )
    }
}

/// Volume test `V(r) ≤ C r³` for standard weights and counting measure.
pub fn combinatorial_volume_test(table: &VolumeTable) -> Result<CubicVolumeReport> {
    if table.kind != MetricKind::Combinatorial {
        return Err(Error::pre(format!(
            "cubic volume test needs the combinatorial metric, got {}",
            table.metric
        )));
    }
    check_monotone(&table.volumes)?;
    let idx: Vec<usize> = (table.radii.len() / 2..table.radii.len())
        .filter(|&i| table.radii[i] >= 1.0)
        .collect();
    if idx.len() < 4 {
        return Err(Error::pre("cubic volume test needs at least four tail radii"));
    }
    let xs: Vec<f64> = idx.iter().map(|&i| table.radii[i].ln()).collect();
    let ys: Vec<f64> = idx.iter().map(|&i| table.volumes[i].ln()).collect();
    let alpha = linear_fit(&xs, &ys).map_or(f64::NAN, |(a, _)| a);
    let (first, second) = idx.split_at(idx.len() / 2);
    let cube = |i: usize| table.radii[i].powi(3);
    let c_hat = first
        .iter()
        .map(|&i| table.volumes[i] / cube(i))
        .fold(0.0, f64::max);
    let bound_holds = second
        .iter()
        .all(|&i| table.volumes[i] <= c_hat * cube(i) * (1.0 + 1e-9));
    let (verdict, detail) = if !table.standard_weights {
        (
            VolumeVerdict::HypothesisViolated,
            "standard weights and counting measure required".to_string(),
        )
    } else if alpha <= 3.0 + EXPONENT_BAND && bound_holds {
        (VolumeVerdict::Satisfied, String::new())
    } else {
        (VolumeVerdict::NotSatisfied, String::new())
    };
    Ok(CubicVolumeReport {
        alpha,
        c_hat,
        bound_holds,
        verdict,
        detail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{integer_vertex, integer_window, star};

    fn k2() -> WeightedGraph {
        WeightedGraph::parse("v a 1\nv b 1\ne a b 1").unwrap()
    }

    #[test]
    fn sigma_on_k2_is_tight() {
        let g = k2();
        let rho = PseudoMetric::sigma(&g);
        let (a, b) = (g.vertex("a").unwrap(), g.vertex("b").unwrap());
        assert_eq!(rho.distance(a, b).unwrap(), Some(1.0));
        let rep = verify_intrinsic(&g, &rho).unwrap();
        assert_eq!(rep.slack, vec![0.0, 0.0]);
        assert!(rep.intrinsic());
        let s1 = PseudoMetric::sigma1(&g);
        assert_eq!(s1.distance(a, b).unwrap(), Some(1.0));
        let capped = rho.capped(0.5).unwrap();
        assert_eq!(capped.distance(a, b).unwrap(), Some(0.5));
        assert_eq!(rho.capped(f64::INFINITY).unwrap().distance(a, b).unwrap(), Some(1.0));
    }

    #[test]
    fn sigma_on_integer_window() {
        let g = integer_window(10);
        let rho = PseudoMetric::sigma(&g);
        let o = g.vertex(&integer_vertex(0)).unwrap();
        let x = g.vertex(&integer_vertex(6)).unwrap();
        let d = rho.distance(o, x).unwrap().unwrap();
        assert!((d - 6.0 / 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn star_metrics() {
        let g = star(100);
        let s1 = PseudoMetric::sigma1(&g);
        let c = g.vertex("c").unwrap();
        let leaf = g.vertex("l000").unwrap();
        assert!((s1.distance(c, leaf).unwrap().unwrap() - 0.1).abs() < 1e-15);
        let g = star(10);
        let rep = verify_intrinsic(&g, &PseudoMetric::combinatorial(&g)).unwrap();
        assert_eq!(rep.slack[g.vertex("c").unwrap().0], 1.0 - 10.0);
        assert!(!rep.intrinsic());
    }

    #[test]
    fn unreachable_pairs() {
        let g = WeightedGraph::parse("v a 1\nv b 1\nv c 1\ne a b 1").unwrap();
        let rho = PseudoMetric::sigma(&g);
        let (a, c) = (g.vertex("a").unwrap(), g.vertex("c").unwrap());
        assert_eq!(rho.distance(a, c).unwrap(), None);
        assert_eq!(rho.capped(3.0).unwrap().distance(a, c).unwrap(), Some(3.0));
    }

    #[test]
    fn lexicographic_tie_break() {
        // two shortest paths a-b-d and a-c-d: predecessor of d is b
        let g = WeightedGraph::parse(
            "v a 1\nv b 1\nv c 1\nv d 1\ne a c 1\ne c d 1\ne a b 1\ne b d 1",
        )
        .unwrap();
        let rho = PseudoMetric::combinatorial(&g);
        let path = rho
            .shortest_path(g.vertex("a").unwrap(), g.vertex("d").unwrap())
            .unwrap()
            .unwrap();
        let names: Vec<&str> = path.iter().map(|&v| g.name(v)).collect();
        assert_eq!(names, ["a", "b", "d"]);
    }

    #[test]
    fn table_validation() {
        let g = k2();
        assert!(PseudoMetric::table(&g, vec![vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(PseudoMetric::table(&g, vec![vec![1.0, 1.0], vec![1.0, 0.0]]).is_err());
        let t = PseudoMetric::table(&g, vec![vec![0.0, 0.3], vec![0.3, 0.0]]).unwrap();
        assert!(verify_intrinsic(&g, &t).unwrap().intrinsic());
    }

    #[test]
    fn jump_sizes() {
        let g = integer_window(20);
        let o = g.vertex(&integer_vertex(0)).unwrap();
        let d = PseudoMetric::combinatorial(&g);
        assert_eq!(jump_size(&g, &d, 5.0, o).unwrap(), 1.0);
        assert_eq!(jump_size(&g, &d, 25.0, o).unwrap(), 0.0);
        let f = MonotoneTable::new(vec![(1.0, 1.0), (100.0, 100.0)]).unwrap();
        let radii: Vec<f64> = (1..=8).map(f64::from).collect();
        let rep = globally_local_check(&g, &d, o, &f, 2.0, &radii).unwrap();
        assert!((rep.tail_max - 2.0).abs() < 1e-12);
        assert_eq!(rep.verdict, GloballyLocal::Consistent);
        assert!(globally_local_check(&g, &d, o, &f, 1.0, &radii).is_err());
    }

    #[test]
    fn truncation_extremes() {
        let g = integer_window(5);
        let rho = PseudoMetric::sigma(&g);
        let all = truncate_edges(&g, &rho, 100.0).unwrap();
        assert_eq!(all.graph.edge_count(), g.edge_count());
        let none = truncate_edges(&g, &rho, 0.1).unwrap();
        assert_eq!(none.graph.edge_count(), 0);
        assert_eq!(none.removed, g.edge_count());
        assert!(all.transfer_note().contains("SC transfers to G"));
        assert!(truncate_edges(&g, &rho, 0.0).is_err());
    }

    #[test]
    fn synthetic_grigoryan() {
        let radii: Vec<f64> = (1..=200).map(|r| r as f64 * 0.5).collect();
        let cubic = VolumeTable::from_log_volumes(radii.clone(), radii.iter().map(|r| r.powi(3)).collect()).unwrap();
        assert_eq!(grigoryan_test(&cubic).unwrap().verdict, VolumeVerdict::NotSatisfied);
        let square = VolumeTable::from_log_volumes(radii.clone(), radii.iter().map(|r| r.powi(2)).collect()).unwrap();
        let rep = grigoryan_test(&square).unwrap();
        assert_eq!(rep.verdict, VolumeVerdict::Borderline);
        assert!((rep.beta - 2.0).abs() < 1e-12);
        let poly = VolumeTable::from_log_volumes(radii.clone(), radii.iter().map(|r| 2.0 * r.ln()).collect()).unwrap();
        assert_eq!(grigoryan_test(&poly).unwrap().verdict, VolumeVerdict::Satisfied);
        let bad = VolumeTable::from_log_volumes(vec![1.0, 2.0], vec![2.0, 1.0]);
        assert!(bad.is_err());
    }

    #[test]
    fn path_volume_is_cubically_bounded() {
        let g = integer_window(60);
        let o = g.vertex(&integer_vertex(0)).unwrap();
        let radii: Vec<f64> = (0..=50).map(f64::from).collect();
        let t = volume_growth(&g, o, &PseudoMetric::combinatorial(&g), &radii).unwrap();
        assert_eq!(t.volumes[0], 1.0);
        assert_eq!(t.volumes[7], 15.0);
        assert_eq!(combinatorial_volume_test(&t).unwrap().verdict, VolumeVerdict::Satisfied);
        let s = volume_growth(&g, o, &PseudoMetric::sigma(&g), &radii).unwrap();
        assert!(combinatorial_volume_test(&s).is_err());
        assert!(t.to_csv().starts_with("radius,ball_size_vertices,volume_measure,saturated_flag\n0,1,1,0\n"));
    }
}
