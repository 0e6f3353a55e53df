//! Seeded graphs and functions shared by the integration suites.
#![allow(dead_code)]

use heatgraph::generators::{
    complete, cycle, path, random_birth_death_chain, random_connected_graph, random_tree, regular_tree, star,
};
use heatgraph::radial::{realize_graph, GeneratorSpec, ParamSeq};
use heatgraph::laplacian::{gamma2, gamma_sq};
use heatgraph::{VertexFunction, VertexId, VertexSet, WeightedGraph};
use nalgebra::DMatrix;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_graph(seed: u64, n: usize, p: f64) -> WeightedGraph {
    random_connected_graph(n, p, &mut rng(seed))
}

pub fn random_function(graph: &WeightedGraph, seed: u64) -> VertexFunction {
    let mut r = rng(seed);
    VertexFunction::from_fn(graph, |_| r.random_range(-1.0..1.0))
}

pub fn antitree(sizes: &str, radius: usize) -> WeightedGraph {
    let spec = GeneratorSpec::antitree(ParamSeq::parse(sizes).unwrap(), radius);
    realize_graph(&spec, radius).unwrap().graph
}

/// Curvature corpus: model graphs plus seeded random ones.
pub fn corpus() -> Vec<(String, WeightedGraph)> {
    let mut out = vec![
        ("tree3".to_string(), regular_tree(3, 3)),
        ("tree4".to_string(), regular_tree(4, 2)),
        ("antitree".to_string(), antitree("1,2,3,4", 3)),
        ("path".to_string(), path(8, |i| 1.0 + i as f64, |_| 1.0)),
        ("cycle5".to_string(), cycle(5)),
        ("cycle6".to_string(), cycle(6)),
        ("k4".to_string(), complete(4)),
        ("star".to_string(), star(5)),
    ];
    for s in 0..5 {
        out.push((format!("rtree{s}"), random_tree(12, &mut rng(100 + s))));
        out.push((format!("rgraph{s}"), random_graph(200 + s, 10, 0.3)));
    }
    for s in 0..3 {
        out.push((format!("chain{s}"), random_birth_death_chain(10, &mut rng(300 + s))));
    }
    out
}

/// Every edge plus every pair at distance 2 or 3.
pub fn pairs(graph: &WeightedGraph) -> Vec<(VertexId, VertexId)> {
    let mut out = Vec::new();
    for x in graph.vertices() {
        let d = graph.bfs_limited(x, 3);
        for y in graph.vertices() {
            if y > x && d[y.0].is_some() {
                out.push((x, y));
            }
        }
    }
    out
}

/// `L_K = M^{-1}(D − B)` on `K`, assembled straight from the graph.
pub fn restricted_laplacian(g: &WeightedGraph, set: &VertexSet) -> DMatrix<f64> {
    let vs = set.as_slice();
    DMatrix::from_fn(vs.len(), vs.len(), |i, j| {
        let (x, y) = (vs[i], vs[j]);
        if i == j {
            g.degree(x)
        } else {
            -g.weight(x, y) / g.measure(x)
        }
    })
}

/// Quadratic forms of `Γ(·)(x)` and `Γ₂(·)(x)` on `B₂(x)` by polarization.
pub fn polarized_forms(g: &WeightedGraph, x: VertexId) -> (Vec<VertexId>, DMatrix<f64>, DMatrix<f64>) {
    let ball: Vec<VertexId> = g.ball(x, 2).iter().collect();
    let n = ball.len();
    let basis = |coeffs: &[(usize, f64)]| {
        let mut values = vec![0.0; g.len()];
        for &(i, c) in coeffs {
            values[ball[i].0] += c;
        }
        VertexFunction::new(g, values).unwrap()
    };
    let form = |q: &dyn Fn(&VertexFunction) -> f64| {
        let diag: Vec<f64> = (0..n).map(|i| q(&basis(&[(i, 1.0)]))).collect();
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                diag[i]
            } else {
                (q(&basis(&[(i, 1.0), (j, 1.0)])) - diag[i] - diag[j]) / 2.0
            }
        })
    };
    let gam = form(&|f| gamma_sq(g, f, x));
    let gam2 = form(&|f| gamma2(g, f, x));
    (ball, gam, gam2)
}

fn quad(m: &DMatrix<f64>, f: &[f64]) -> f64 {
    let n = f.len();
    (0..n).map(|i| (0..n).map(|j| f[i] * m[(i, j)] * f[j]).sum::<f64>()).sum()
}

/// Exact minimization of `(a + 2bs + cs²)/(d + 2es + gs²)` over `s`.
fn best_step(a: f64, b: f64, c: f64, d: f64, e: f64, g: f64) -> f64 {
    let ratio = |s: f64| {
        let den = d + 2.0 * e * s + g * s * s;
        if den > 1e-300 { (a + 2.0 * b * s + c * s * s) / den } else { f64::INFINITY }
    };
    let (qa, qb, qc) = (c * e - b * g, c * d - a * g, b * d - a * e);
    let mut roots = vec![0.0];
    if qa.abs() > 1e-300 {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            roots.push((-qb + disc.sqrt()) / (2.0 * qa));
            roots.push((-qb - disc.sqrt()) / (2.0 * qa));
        }
    } else if qb.abs() > 1e-300 {
        roots.push(-qc / qb);
    }
    roots
        .into_iter()
        .filter(|s| s.is_finite())
        .min_by(|&s, &t| ratio(s).total_cmp(&ratio(t)))
        .unwrap()
}

pub fn refine(q: &DMatrix<f64>, gm: &DMatrix<f64>, mut f: Vec<f64>, sweeps: usize) -> f64 {
    let n = f.len();
    for _ in 0..sweeps {
        for i in 0..n {
            let (a, d) = (quad(q, &f), quad(gm, &f));
            let b: f64 = (0..n).map(|j| q[(i, j)] * f[j]).sum();
            let e: f64 = (0..n).map(|j| gm[(i, j)] * f[j]).sum();
            f[i] += best_step(a, b, q[(i, i)], d, e, gm[(i, i)]);
        }
    }
    quad(q, &f) / quad(gm, &f)
}

/// Sampling oracle at `x`: `(κ_BE, smallest sampled Γ₂/Γ, refined ratio)`.
pub fn be_oracle(g: &WeightedGraph, x: VertexId, seed: u64, samples: usize) -> (f64, f64, f64) {
    let kappa = heatgraph::curvature::bakry_emery_curvature(g, x).unwrap().kappa;
    let (ball, gam, gam2) = polarized_forms(g, x);
    let mut r = rng(seed);
    let mut best = (f64::INFINITY, Vec::new());
    for _ in 0..samples {
        let values: Vec<f64> = (0..g.len()).map(|_| r.random_range(-1.0..1.0)).collect();
        let f = VertexFunction::new(g, values).unwrap();
        let den = gamma_sq(g, &f, x);
        if den <= 1e-12 {
            continue;
        }
        let ratio = gamma2(g, &f, x) / den;
        if ratio < best.0 {
            best = (ratio, ball.iter().map(|v| f[*v]).collect());
        }
    }
    let refined = refine(&gam2, &gam, best.1, 400);
    (kappa, best.0, refined)
}
