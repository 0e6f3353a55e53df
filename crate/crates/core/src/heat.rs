//! Restricted heat kernels on finite exhaustions and heat-loss diagnostics.
//!
//! For a finite vertex set `K`, the Dirichlet restriction `L_K` acts on
//! functions on `K` extended by zero: `L_K f(x) = 𝓛(f·1_K)(x)`. With
//! `M = diag(m|_K)` the matrix `A = M^{1/2} L_K M^{-1/2}` is symmetric, has
//! the full weighted degree on its diagonal and `−b(x,y)/√(m(x)m(y))` off the
//! diagonal. The restricted heat kernel is
//! `p_t^K(x,y) = (M^{-1/2} e^{−tA} M^{-1/2})_{xy}`, computed from one
//! symmetric eigendecomposition of `A` that is reused for every `t`.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{VertexId, VertexSet, WeightedGraph};
use crate::numeric::{compensated_sum, fmt_sig};

/// Largest vertex set accepted for dense restrictions.
pub const MAX_RESTRICTION: usize = 3000;

/// Symmetrized Dirichlet restriction of the Laplacian to a finite vertex set.
#[derive(Debug, Clone)]
pub struct DirichletRestriction {
    vertices: Vec<VertexId>,
    matrix: DMatrix<f64>,
    measure: Vec<f64>,
}

impl DirichletRestriction {
    pub fn new(graph: &WeightedGraph, set: &VertexSet) -> Result<Self> {
        if set.is_empty() {
            return Err(Error::pre("Dirichlet restriction of an empty set"));
        }
        for v in set.iter() {
            graph.check(v)?;
        }
        let n = set.len();
        if n > MAX_RESTRICTION {
            return Err(Error::SizeCap {
                what: "dense Dirichlet restriction".into(),
                size: n,
                cap: MAX_RESTRICTION,
            });
        }
        let vertices = set.as_slice().to_vec();
        let measure: Vec<f64> = vertices.iter().map(|&v| graph.measure(v)).collect();
        let mut matrix = DMatrix::zeros(n, n);
        for (i, &x) in vertices.iter().enumerate() {
            matrix[(i, i)] = graph.degree(x);
            for &(y, b) in graph.neighbors(x) {
                if let Ok(j) = vertices.binary_search(&y) {
                    matrix[(i, j)] = -b / (measure[i] * measure[j]).sqrt();
                }
            }
        }
        Ok(Self {
            vertices,
            matrix,
            measure,
        })
    }

    /// Restriction to every vertex of the graph (no Dirichlet boundary).
    pub fn whole(graph: &WeightedGraph) -> Result<Self> {
        Self::new(graph, &graph.vertices().collect())
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Symmetric matrix `A = M^{1/2} L_K M^{-1/2}`.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    pub fn position(&self, v: VertexId) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }

    /// `L_K f` for `f` given on the restriction's vertices.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        let n = self.len();
        let scaled = DVector::from_iterator(n, (0..n).map(|i| f[i] * self.measure[i].sqrt()));
        let out = &self.matrix * scaled;
        (0..n).map(|i| out[i] / self.measure[i].sqrt()).collect()
    }

    /// `⟨L_K f, f⟩` in `ℓ²(K, m)`.
    pub fn quadratic_form(&self, f: &[f64]) -> f64 {
        let lf = self.apply(f);
        compensated_sum((0..self.len()).map(|i| lf[i] * f[i] * self.measure[i]))
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        let n = self.len();
        let eig = SymmetricEigen::try_new(self.matrix.clone(), f64::EPSILON, 1000 * n.max(10))
            .ok_or_else(|| {
                Error::EigenFailure(format!("no convergence on a {n}x{n} restriction"))
            })?;
        let sqrt_m: Vec<f64> = self.measure.iter().map(|m| m.sqrt()).collect();
        // c_k = Σ_y Q_{yk} √m(y): coordinates of the constant function 1
        let weights = DVector::from_iterator(n, sqrt_m.iter().copied());
        let ones_coords = eig.eigenvectors.transpose() * weights;
        Ok(Spectrum {
            vertices: self.vertices.clone(),
            measure: self.measure.clone(),
            sqrt_m,
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
            ones_coords,
        })
    }
}

/// Eigendecomposition of a restriction, reused across times.
#[derive(Debug, Clone)]
pub struct Spectrum {
    vertices: Vec<VertexId>,
    measure: Vec<f64>,
    sqrt_m: Vec<f64>,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
    ones_coords: DVector<f64>,
}

impl Spectrum {
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn smallest_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn kernel(&self, t: f64) -> Result<HeatKernel> {
        check_time(t)?;
        let n = self.vertices.len();
        if t == 0.0 {
            return Ok(HeatKernel::identity(&self.vertices, &self.measure));
        }
        // U = M^{-1/2} Q, P = U diag(e^{-tλ}) U^T
        let mut u = self.eigenvectors.clone();
        for i in 0..n {
            let s = 1.0 / self.sqrt_m[i];
            for k in 0..n {
                u[(i, k)] *= s;
            }
        }
        let mut ud = u.clone();
        for k in 0..n {
            let e = (-t * self.eigenvalues[k]).exp();
            for i in 0..n {
                ud[(i, k)] *= e;
            }
        }
        let values = ud * u.transpose();
        Ok(HeatKernel {
            t,
            vertices: self.vertices.clone(),
            measure: self.measure.clone(),
            values,
        })
    }

    /// `Σ_y p_t(x,y) m(y)` for the vertex at position `i`.
    pub fn mass(&self, i: usize, t: f64) -> Result<f64> {
        check_time(t)?;
        if t == 0.0 {
            return Ok(1.0);
        }
        let n = self.vertices.len();
        let s = compensated_sum((0..n).map(|k| {
            self.eigenvectors[(i, k)] * (-t * self.eigenvalues[k]).exp() * self.ones_coords[k]
        }));
        Ok(s / self.sqrt_m[i])
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::pre(format!("time must be finite and nonnegative, got {t}")))
    }
}

/// Dense restricted heat kernel `p_t^K(x, y)` at one time.
#[derive(Debug, Clone)]
pub struct HeatKernel {
    t: f64,
    vertices: Vec<VertexId>,
    measure: Vec<f64>,
    values: DMatrix<f64>,
}

impl HeatKernel {
    fn identity(vertices: &[VertexId], measure: &[f64]) -> Self {
        let n = vertices.len();
        let mut values = DMatrix::zeros(n, n);
        for i in 0..n {
            values[(i, i)] = 1.0 / measure[i];
        }
        Self {
            t: 0.0,
            vertices: vertices.to_vec(),
            measure: measure.to_vec(),
            values,
        }
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    /// Kernel entries indexed by positions in [`HeatKernel::vertices`].
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn get(&self, x: VertexId, y: VertexId) -> Option<f64> {
        let i = self.vertices.binary_search(&x).ok()?;
        let j = self.vertices.binary_search(&y).ok()?;
        Some(self.values[(i, j)])
    }

    /// `(P_t f)(x) = Σ_y p_t(x,y) f(y) m(y)` for `f` on the kernel's vertices.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        let n = self.vertices.len();
        (0..n)
            .map(|i| compensated_sum((0..n).map(|j| self.values[(i, j)] * f[j] * self.measure[j])))
            .collect()
    }

    /// `Σ_y p_t(x,y) m(y)` at position `i`.
    pub fn mass(&self, i: usize) -> f64 {
        let n = self.vertices.len();
        compensated_sum((0..n).map(|j| self.values[(i, j)] * self.measure[j]))
    }
}

/// `p_t^K` for the restriction `K` at time `t`.
pub fn restricted_heat_kernel(restriction: &DirichletRestriction, t: f64) -> Result<HeatKernel> {
    check_time(t)?;
    if t == 0.0 {
        return Ok(HeatKernel::identity(&restriction.vertices, &restriction.measure));
    }
    restriction.spectrum()?.kernel(t)
}

/// Checks `0 ≤ Σ_y p_t(x,y) f(y) m(y) ≤ 1` at every `x` (tolerance 1e-10) for `0 ≤ f ≤ 1`.
pub fn markov_check(restriction: &DirichletRestriction, t: f64, f: &[f64]) -> Result<bool> {
    if f.len() != restriction.len() {
        return Err(Error::pre("function length does not match the restriction"));
    }
    if let Some(v) = f.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::pre(format!("Markov test function value {v} outside [0, 1]")));
    }
    let kernel = restricted_heat_kernel(restriction, t)?;
    Ok(kernel
        .apply(f)
        .iter()
        .all(|&u| (-1e-10..=1.0 + 1e-10).contains(&u)))
}

/// Heuristic verdict of a heat-loss profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeatVerdict {
    CompleteConsistent,
    IncompleteDetected,
    Inconclusive,
}

/// Defect below which the last radius is read as conservative.
pub const COMPLETE_DEFECT: f64 = 1e-6;
/// Stabilized defect above which heat loss is read as real.
pub const INCOMPLETE_DEFECT: f64 = 1e-2;
/// Maximal change between the last two radii for a stabilized defect.
pub const STABILIZATION: f64 = 1e-3;

impl HeatVerdict {
    pub fn label(self) -> &'static str {
        match self {
            HeatVerdict::CompleteConsistent => "complete-consistent",
            HeatVerdict::IncompleteDetected => "incomplete-detected",
            HeatVerdict::Inconclusive => "inconclusive",
        }
    }

    pub fn describe(self) -> String {
        format!(
            "{} (heuristic: complete-consistent if defect at last radius < {}; incomplete-detected if last two defects differ by < {} and exceed {}; finite exhaustion cannot prove completeness)",
            self.label(),
            fmt_sig(COMPLETE_DEFECT),
            fmt_sig(STABILIZATION),
            fmt_sig(INCOMPLETE_DEFECT)
        )
    }

    pub fn classify(defects: &[f64]) -> Self {
        let Some(&last) = defects.last() else {
            return HeatVerdict::Inconclusive;
        };
        if defects.len() >= 2 {
            let prev = defects[defects.len() - 2];
            if (last - prev).abs() < STABILIZATION && last > INCOMPLETE_DEFECT {
                return HeatVerdict::IncompleteDetected;
            }
        }
        if last < COMPLETE_DEFECT {
            HeatVerdict::CompleteConsistent
        } else {
            HeatVerdict::Inconclusive
        }
    }
}

/// Heat-kernel mass defect `1 − Σ_{y∈B_r} p_t^{B_r}(x0,y)m(y)` on a sequence of balls.
#[derive(Debug, Clone)]
pub struct HeatLossProfile {
    pub center: VertexId,
    pub t: f64,
    pub radii: Vec<usize>,
    pub ball_sizes: Vec<usize>,
    pub defects: Vec<f64>,
    pub verdict: HeatVerdict,
}

impl HeatLossProfile {
    pub fn last_defect(&self) -> f64 {
        *self.defects.last().expect("profiles have at least one radius")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("radius,ball_size,defect\n");
        for i in 0..self.radii.len() {
            let _ = writeln!(
                out,
                "{},{},{}",
                self.radii[i],
                self.ball_sizes[i],
                fmt_sig(self.defects[i])
            );
        }
        let _ = writeln!(out, "# verdict: {}", self.verdict.describe());
        out
    }
}

/// Mass defect at `x0` for the Dirichlet restriction to `set`.
pub fn heat_defect(graph: &WeightedGraph, set: &VertexSet, x0: VertexId, t: f64) -> Result<f64> {
    check_time(t)?;
    let restriction = DirichletRestriction::new(graph, set)?;
    let i = restriction
        .position(x0)
        .ok_or_else(|| Error::pre("center lies outside the exhaustion set"))?;
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 - restriction.spectrum()?.mass(i, t)?)
}

/// Heat loss at `x0` over the exhaustion by combinatorial balls `B_r(x0)`.
pub fn heat_loss_profile(
    graph: &WeightedGraph,
    x0: VertexId,
    t: f64,
    radii: &[usize],
) -> Result<HeatLossProfile> {
    graph.check(x0)?;
    check_time(t)?;
    if radii.is_empty() {
        return Err(Error::pre("heat-loss profile needs at least one radius"));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::pre("exhaustion radii must increase strictly"));
    }
    let dist = graph.bfs(x0);
    let balls: Vec<VertexSet> = radii
        .iter()
        .map(|&r| {
            graph
                .vertices()
                .filter(|v| matches!(dist[v.0], Some(d) if d <= r))
                .collect()
        })
        .collect();
    let defects: Vec<f64> = balls
        .par_iter()
        .map(|ball| heat_defect(graph, ball, x0, t))
        .collect::<Result<_>>()?;
    Ok(HeatLossProfile {
        center: x0,
        t,
        radii: radii.to_vec(),
        ball_sizes: balls.iter().map(VertexSet::len).collect(),
        verdict: HeatVerdict::classify(&defects),
        defects,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{integer_vertex, integer_window, path};

    #[test]
    fn singleton_restriction() {
        let g = path(3, |_| 2.0, |i| [1.0, 4.0, 1.0][i]);
        let mid = g.vertex("p1").unwrap();
        let r = DirichletRestriction::new(&g, &VertexSet::new(vec![mid])).unwrap();
        assert_eq!(r.matrix().shape(), (1, 1));
        assert_eq!(r.matrix()[(0, 0)], g.degree(mid));
        let t = 0.7;
        let k = restricted_heat_kernel(&r, t).unwrap();
        let expected = (-t * g.degree(mid)).exp() / 4.0;
        assert!((k.get(mid, mid).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn k2_whole_restriction() {
        let g = WeightedGraph::parse("v a 1\nv b 1\ne a b 1").unwrap();
        let r = DirichletRestriction::whole(&g).unwrap();
        assert_eq!(r.matrix(), &DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn zero_time_is_exact_identity() {
        let g = path(4, |_| 1.0, |i| (i + 1) as f64);
        let r = DirichletRestriction::whole(&g).unwrap();
        let k = restricted_heat_kernel(&r, 0.0).unwrap();
        for (i, x) in g.vertices().enumerate() {
            for y in g.vertices() {
                let expected = if x == y { 1.0 / (i + 1) as f64 } else { 0.0 };
                assert_eq!(k.get(x, y).unwrap(), expected);
            }
        }
        let z = integer_window(12);
        let origin = z.vertex(&integer_vertex(0)).unwrap();
        let p = heat_loss_profile(&z, origin, 0.0, &[1, 5, 10]).unwrap();
        assert!(p.defects.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn errors() {
        let g = path(3, |_| 1.0, |_| 1.0);
        assert!(DirichletRestriction::new(&g, &VertexSet::empty()).is_err());
        assert!(DirichletRestriction::new(&g, &VertexSet::new(vec![VertexId(7)])).is_err());
        let r = DirichletRestriction::whole(&g).unwrap();
        assert!(restricted_heat_kernel(&r, -1.0).is_err());
        assert!(markov_check(&r, 1.0, &[0.0, 2.0, 0.0]).is_err());
        let x0 = g.vertex("p0").unwrap();
        assert!(heat_loss_profile(&g, x0, 1.0, &[2, 1]).is_err());
        assert!(heat_loss_profile(&g, x0, 1.0, &[]).is_err());
    }

    #[test]
    fn verdict_thresholds() {
        assert_eq!(HeatVerdict::classify(&[0.2, 0.1004, 0.1]), HeatVerdict::IncompleteDetected);
        assert_eq!(HeatVerdict::classify(&[1e-3, 1e-9]), HeatVerdict::CompleteConsistent);
        assert_eq!(HeatVerdict::classify(&[0.3, 0.2]), HeatVerdict::Inconclusive);
        assert_eq!(HeatVerdict::classify(&[5e-3, 5e-3]), HeatVerdict::Inconclusive);
        assert!(HeatVerdict::Inconclusive.describe().contains("heuristic"));
    }

    #[test]
    fn csv_layout() {
        let z = integer_window(30);
        let origin = z.vertex(&integer_vertex(0)).unwrap();
        let p = heat_loss_profile(&z, origin, 1.0, &[5, 20]).unwrap();
        let csv = p.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "radius,ball_size,defect");
        assert!(lines[1].starts_with("5,11,"));
        assert!(lines[3].starts_with("# verdict: complete-consistent"));
    }
}
