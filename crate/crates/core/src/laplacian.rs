//! Pointwise formal Laplacian, energy form and the `Γ`-calculus.
//!
//! Sign convention: `𝓛f(x) = (1/m(x)) Σ_y b(x,y)(f(x) − f(y))`, so `𝓛` is a
//! nonnegative operator. `Γ` is evaluated in its expanded difference form
//! `Γ(f,g)(x) = (1/2m(x)) Σ_y b(x,y)(f(x) − f(y))(g(x) − g(y))`, which avoids
//! the cancellation in `−½(𝓛(fg) − f𝓛g − g𝓛f)`.

use std::fmt::Write as _;
use std::ops::Index;

use crate::error::{Error, Result};
use crate::graph::{VertexId, VertexSet, WeightedGraph};
use crate::numeric::{compensated_sum, fmt_exact, trapezoid, CompensatedSum};

/// Real function defined on every vertex of one graph.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexFunction {
    values: Vec<f64>,
}

impl VertexFunction {
    pub fn new(graph: &WeightedGraph, values: Vec<f64>) -> Result<Self> {
        if values.len() != graph.len() {
            return Err(Error::pre(format!(
                "function has {} values for {} vertices",
                values.len(),
                graph.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::pre(format!(
                "function value at `{}` is not finite",
                graph.name(VertexId(pos))
            )));
        }
        Ok(Self { values })
    }

    /// Panics if `f` returns a non-finite value.
    pub fn from_fn<F: FnMut(VertexId) -> f64>(graph: &WeightedGraph, f: F) -> Self {
        let values: Vec<f64> = graph.vertices().map(f).collect();
        assert!(values.iter().all(|v| v.is_finite()), "non-finite function value");
        Self { values }
    }

    pub fn constant(graph: &WeightedGraph, c: f64) -> Self {
        Self::from_fn(graph, |_| c)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Parses `f <vertex-id> <value>` lines; every vertex must appear exactly once.
    pub fn parse(graph: &WeightedGraph, text: &str) -> Result<Self> {
        let mut values: Vec<Option<f64>> = vec![None; graph.len()];
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| Error::Parse {
                line: lineno + 1,
                msg: format!("{msg}: `{line}`"),
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let ["f", id, value] = fields.as_slice() else {
                return Err(bad("expected `f <vertex-id> <value>`"));
            };
            let v = graph.vertex(id)?;
            let value: f64 = value.parse().map_err(|_| bad("malformed number"))?;
            if !value.is_finite() {
                return Err(bad("non-finite value"));
            }
            if values[v.0].replace(value).is_some() {
                return Err(bad("vertex assigned twice"));
            }
        }
        let mut out = Vec::with_capacity(values.len());
        for (i, v) in values.into_iter().enumerate() {
            match v {
                Some(x) => out.push(x),
                None => {
                    return Err(Error::pre(format!(
                        "function missing a value for vertex `{}`",
                        graph.name(VertexId(i))
                    )))
                }
            }
        }
        Ok(Self { values: out })
    }

    pub fn to_text(&self, graph: &WeightedGraph) -> String {
        let mut out = String::new();
        for v in graph.vertices() {
            let _ = writeln!(out, "f {} {}", graph.name(v), fmt_exact(self.values[v.0]));
        }
        out
    }
}

impl Index<VertexId> for VertexFunction {
    type Output = f64;

    fn index(&self, v: VertexId) -> &f64 {
        &self.values[v.0]
    }
}

/// `𝓛f(x)`.
pub fn apply_laplacian(graph: &WeightedGraph, f: &VertexFunction, x: VertexId) -> f64 {
    let fx = f[x];
    compensated_sum(graph.neighbors(x).iter().map(|&(y, b)| b * (fx - f[y]))) / graph.measure(x)
}

/// `𝓛f` on every vertex.
pub fn laplacian(graph: &WeightedGraph, f: &VertexFunction) -> VertexFunction {
    VertexFunction {
        values: graph.vertices().map(|x| apply_laplacian(graph, f, x)).collect(),
    }
}

/// `𝓠(f,f) = ½ Σ_{x,y} b(x,y)(f(x) − f(y))²`, summed once per undirected edge.
pub fn energy(graph: &WeightedGraph, f: &VertexFunction) -> f64 {
    compensated_sum(graph.edges().map(|(x, y, b)| {
        let d = f[x] - f[y];
        b * d * d
    }))
}

/// `Γ(f, g)(x)` in expanded form.
pub fn gamma(graph: &WeightedGraph, f: &VertexFunction, g: &VertexFunction, x: VertexId) -> f64 {
    let (fx, gx) = (f[x], g[x]);
    compensated_sum(
        graph
            .neighbors(x)
            .iter()
            .map(|&(y, b)| b * (fx - f[y]) * (gx - g[y])),
    ) / (2.0 * graph.measure(x))
}

/// `Γ(f)(x) = Γ(f, f)(x)`.
pub fn gamma_sq(graph: &WeightedGraph, f: &VertexFunction, x: VertexId) -> f64 {
    gamma(graph, f, f, x)
}

/// `Γ₂(f)(x) = −½ 𝓛Γ(f)(x) + Γ(f, 𝓛f)(x)`; reads `f` only on `B₂(x)`.
pub fn gamma2(graph: &WeightedGraph, f: &VertexFunction, x: VertexId) -> f64 {
    let lap = |z: VertexId| apply_laplacian(graph, f, z);
    let gam = |z: VertexId| gamma_sq(graph, f, z);
    let (fx, lx, gx) = (f[x], lap(x), gam(x));
    let mut acc = CompensatedSum::new();
    for &(y, b) in graph.neighbors(x) {
        // −½ b (Γf(x) − Γf(y)) + ½ b (f(x) − f(y))(𝓛f(x) − 𝓛f(y))
        acc.add(-0.5 * b * (gx - gam(y)));
        acc.add(0.5 * b * (fx - f[y]) * (lx - lap(y)));
    }
    acc.value() / graph.measure(x)
}

/// Piecewise-linear nondecreasing positive function given by samples,
/// extended by constants beyond the first and last sample.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneTable {
    points: Vec<(f64, f64)>,
}

impl MonotoneTable {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::pre("monotone table needs at least one sample"));
        }
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::pre("monotone table abscissae must increase strictly"));
            }
            if w[1].1 < w[0].1 {
                return Err(Error::pre(format!(
                    "function table decreases between {} and {}",
                    w[0].0, w[1].0
                )));
            }
        }
        if let Some(&(s, v)) = points.iter().find(|p| !(p.1 > 0.0 && p.1.is_finite())) {
            return Err(Error::NonPositive {
                what: format!("growth function value at {s}"),
                value: v,
            });
        }
        Ok(Self { points })
    }

    pub fn constant(value: f64) -> Result<Self> {
        Self::new(vec![(0.0, value)])
    }

    /// Samples `f` on `grid`.
    pub fn sample<F: Fn(f64) -> f64>(grid: &[f64], f: F) -> Result<Self> {
        Self::new(grid.iter().map(|&s| (s, f(s))).collect())
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn eval(&self, s: f64) -> f64 {
        let pts = &self.points;
        if s <= pts[0].0 {
            return pts[0].1;
        }
        let last = pts[pts.len() - 1];
        if s >= last.0 {
            return last.1;
        }
        let i = pts.partition_point(|p| p.0 <= s);
        let (a, b) = (pts[i - 1], pts[i]);
        a.1 + (b.1 - a.1) * (s - a.0) / (b.0 - a.0)
    }
}

/// Outcome of checking the verifiable hypotheses of the Khas'minskii criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct KhasminskiiReport {
    /// Vertices outside `K` with `𝓛v + f(v) < −tol`, with the offending value.
    pub violations: Vec<(VertexId, f64)>,
    /// Vertices with `v < −tol`.
    pub negative: Vec<VertexId>,
    pub tolerance: f64,
    /// `(s, ∫_{s₀}^{s} dr / f(r))` on a grid over `[min(0, min v), max v]`.
    pub reciprocal_integral: Vec<(f64, f64)>,
    /// Increment of the reciprocal integral over the upper half of the sampled range.
    pub tail_increment: f64,
    /// Smallest value of `v` among vertices in the top decile of `Deg`, with that degree threshold.
    pub high_degree_min_v: Option<(f64, f64)>,
}

impl KhasminskiiReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.violations.is_empty() && self.negative.is_empty()
    }

    /// The divergence of `∫ dr/f(r)` cannot be certified from finitely many samples.
    pub fn divergence_note(&self) -> &'static str {
        "divergence of the reciprocal integral is not decidable from finite data; partial integrals reported"
    }
}

/// Checks `v ≥ 0` and `𝓛v + f(v) ≥ 0` on `X ∖ K` (absolute tolerance 1e-9).
pub fn khasminskii_check(
    graph: &WeightedGraph,
    v: &VertexFunction,
    f: &MonotoneTable,
    exclude: &VertexSet,
) -> Result<KhasminskiiReport> {
    const TOL: f64 = 1e-9;
    if v.len() != graph.len() {
        return Err(Error::pre("function does not match graph"));
    }
    let mut violations = Vec::new();
    let mut negative = Vec::new();
    for x in graph.vertices() {
        if v[x] < -TOL {
            negative.push(x);
        }
        if exclude.contains(x) {
            continue;
        }
        let value = apply_laplacian(graph, v, x) + f.eval(v[x]);
        if value < -TOL {
            violations.push((x, value));
        }
    }

    let lo = v.values().iter().copied().fold(0.0, f64::min);
    let hi = v.values().iter().copied().fold(lo, f64::max);
    let steps = 256usize;
    let grid: Vec<f64> = (0..=steps)
        .map(|i| lo + (hi - lo) * i as f64 / steps as f64)
        .collect();
    let recip: Vec<f64> = grid.iter().map(|&s| 1.0 / f.eval(s)).collect();
    let mut reciprocal_integral = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        reciprocal_integral.push((grid[i], trapezoid(&grid[..=i], &recip[..=i])));
    }
    let half = steps / 2;
    let tail_increment = reciprocal_integral[steps].1 - reciprocal_integral[half].1;

    let mut degrees: Vec<f64> = graph.vertices().map(|x| graph.degree(x)).collect();
    degrees.sort_by(f64::total_cmp);
    let high_degree_min_v = if degrees.is_empty() {
        None
    } else {
        let threshold = degrees[(degrees.len() * 9) / 10];
        graph
            .vertices()
            .filter(|&x| graph.degree(x) >= threshold)
            .map(|x| v[x])
            .reduce(f64::min)
            .map(|m| (m, threshold))
    };

    Ok(KhasminskiiReport {
        violations,
        negative,
        tolerance: TOL,
        reciprocal_integral,
        tail_increment,
        high_degree_min_v,
    })
}
