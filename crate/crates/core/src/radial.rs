//! Weakly spherically symmetric graphs reduced to radial profiles.
//!
//! A graph is weakly spherically symmetric around `x0` when the inner and
//! outer degrees `Deg±(x) = (1/m(x)) Σ_{y ∈ S_{r±1}} b(x,y)` depend only on
//! `r = d(x, x0)`. Such a graph is summarized by the sphere masses `m(S_r)`,
//! the boundary weights `∂B(r) = Σ_{x∈S_r, y∈S_{r+1}} b(x,y)` and the radial
//! degrees. Stochastic completeness is then equivalent to divergence of
//! `Σ_r V(r)/∂B(r)` with `V(r) = m(B_r)`.
//!
//! Series terms and the λ-harmonic recursion are evaluated from the degrees
//! alone, so they stay finite for families whose sphere masses overflow.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::generators::path;
use crate::graph::{GraphBuilder, VertexId, VertexSet, WeightedGraph};
use crate::heat::{heat_defect, MAX_RESTRICTION};
use crate::numeric::{compensated_sum, fmt_exact, fmt_sig, CompensatedSum};
use crate::series::{SeriesClass, SeriesReport};

/// Largest realization produced by [`realize_graph`].
pub const MAX_REALIZATION: usize = 100_000;
/// Relative tolerance for constancy of radial degrees on spheres.
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    mass: Vec<f64>,
    boundary: Vec<f64>,
    deg_plus: Vec<f64>,
    deg_minus: Vec<f64>,
}

fn positive(what: impl Into<String>, value: f64) -> Result<()> {
    if value > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositive {
            what: what.into(),
            value,
        })
    }
}

fn finite_positive(what: impl Into<String>, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositive {
            what: what.into(),
            value,
        })
    }
}

impl RadialProfile {
    /// Profile from sphere masses `mS[0..=R]` and boundaries `dB[0..R]`.
    pub fn new(mass: Vec<f64>, boundary: Vec<f64>) -> Result<Self> {
        if mass.is_empty() || boundary.len() + 1 != mass.len() {
            return Err(Error::pre(format!(
                "profile needs R+1 sphere masses and R boundaries, got {} and {}",
                mass.len(),
                boundary.len()
            )));
        }
        for (r, &m) in mass.iter().enumerate() {
            finite_positive(format!("m(S_{r})"), m)?;
        }
        for (r, &b) in boundary.iter().enumerate() {
            finite_positive(format!("boundary dB({r})"), b)?;
        }
        let deg_plus = (0..boundary.len()).map(|r| boundary[r] / mass[r]).collect();
        let deg_minus = (0..mass.len())
            .map(|r| if r == 0 { 0.0 } else { boundary[r - 1] / mass[r] })
            .collect();
        Ok(Self {
            mass,
            boundary,
            deg_plus,
            deg_minus,
        })
    }

    /// Radius `R` of the profile (index of the last sphere).
    pub fn radius(&self) -> usize {
        self.boundary.len()
    }

    /// `m(S_r)` for `r = 0..=R`; may contain `+inf` for overflowing families.
    pub fn sphere_mass(&self) -> &[f64] {
        &self.mass
    }

    /// `∂B(r)` for `r = 0..R`.
    pub fn boundary(&self) -> &[f64] {
        &self.boundary
    }

    /// `Deg₊(r)` for `r = 0..R`.
    pub fn deg_plus(&self) -> &[f64] {
        &self.deg_plus
    }

    /// `Deg₋(r)` for `r = 0..=R`, with `Deg₋(0) = 0`.
    pub fn deg_minus(&self) -> &[f64] {
        &self.deg_minus
    }

    pub fn has_finite_masses(&self) -> bool {
        self.mass.iter().chain(&self.boundary).all(|v| v.is_finite())
    }

    /// `V(r) = Σ_{k≤r} m(S_k)`.
    pub fn volume(&self) -> Vec<f64> {
        let mut acc = CompensatedSum::new();
        self.mass
            .iter()
            .map(|&m| {
                acc.add(m);
                acc.value()
            })
            .collect()
    }

    /// Profile cut at radius `r ≤ R`.
    pub fn truncate(&self, r: usize) -> Result<Self> {
        if r > self.radius() {
            return Err(Error::pre(format!(
                "cannot truncate a radius-{} profile at {r}",
                self.radius()
            )));
        }
        Ok(Self {
            mass: self.mass[..=r].to_vec(),
            boundary: self.boundary[..r].to_vec(),
            deg_plus: self.deg_plus[..r].to_vec(),
            deg_minus: self.deg_minus[..=r].to_vec(),
        })
    }

    /// `r <index> <mS> <dB>` lines; the last sphere has no boundary column.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in 0..=self.radius() {
            let _ = write!(out, "r {r} {}", fmt_exact(self.mass[r]));
            if r < self.radius() {
                let _ = write!(out, " {}", fmt_exact(self.boundary[r]));
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut mass = Vec::new();
        let mut boundary = Vec::new();
        let mut closed = false;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let parse_err = |msg: String| Error::Parse { line, msg };
            let fields: Vec<&str> = body.split_whitespace().collect();
            if fields[0] != "r" || !(fields.len() == 3 || fields.len() == 4) {
                return Err(parse_err(format!("expected `r <index> <mS> [<dB>]`, got `{body}`")));
            }
            if closed {
                return Err(parse_err("sphere after the final line without boundary".into()));
            }
            let index: usize = fields[1]
                .parse()
                .map_err(|_| parse_err(format!("bad index `{}`", fields[1])))?;
            if index != mass.len() {
                return Err(parse_err(format!("expected index {}, got {index}", mass.len())));
            }
            let num = |s: &str| -> Result<f64> {
                s.parse::<f64>()
                    .map_err(|_| Error::Parse {
                        line,
                        msg: format!("bad number `{s}`"),
                    })
            };
            mass.push(num(fields[2])?);
            if fields.len() == 4 {
                boundary.push(num(fields[3])?);
            } else {
                closed = true;
            }
        }
        if !closed {
            return Err(Error::Parse {
                line: text.lines().count(),
                msg: "last sphere must omit the boundary column".into(),
            });
        }
        Self::new(mass, boundary)
    }
}

/// A parameter sequence indexed by the radius.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamSeq {
    Expr { text: String, expr: Expr },
    List(Vec<f64>),
}

impl ParamSeq {
    /// Comma-separated lists are explicit sequences; anything else is an
    /// expression in `r`.
    pub fn parse(text: &str) -> Result<Self> {
        if text.contains(',') {
            let values = text
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::pre(format!("bad list entry `{}`", s.trim())))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ParamSeq::List(values))
        } else {
            Ok(ParamSeq::Expr {
                text: text.trim().to_string(),
                expr: Expr::parse(text)?,
            })
        }
    }

    pub fn constant(c: f64) -> Self {
        ParamSeq::List(vec![c]).into_constant()
    }

    fn into_constant(self) -> Self {
        match self {
            ParamSeq::List(v) if v.len() == 1 => ParamSeq::Expr {
                text: fmt_exact(v[0]),
                expr: Expr::Num(v[0]),
            },
            other => other,
        }
    }

    pub fn value(&self, r: usize) -> Result<f64> {
        match self {
            ParamSeq::Expr { expr, .. } => Ok(expr.eval(r as f64)),
            ParamSeq::List(v) => v.get(r).copied().ok_or_else(|| {
                Error::pre(format!("parameter list has {} entries, index {r} requested", v.len()))
            }),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ParamSeq::Expr { text, .. } => text.clone(),
            ParamSeq::List(v) => v.iter().map(|x| fmt_exact(*x)).collect::<Vec<_>>().join(","),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Tree,
    AntiTree,
    BirthDeath,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Tree => "tree",
            Family::AntiTree => "antitree",
            Family::BirthDeath => "birthdeath",
        }
    }
}

/// Model family with its parameters and truncation radius.
///
/// * tree: `primary` is the branching `Deg₊(r)`;
/// * anti-tree: `primary` is the sphere size `a_r` (with `a_0 = 1`);
/// * birth-death: `primary` is `b(r, r+1)` and `measure` is `m(r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub family: Family,
    pub primary: ParamSeq,
    pub measure: ParamSeq,
    pub radius: usize,
}

impl GeneratorSpec {
    pub fn tree(deg_plus: ParamSeq, radius: usize) -> Self {
        Self {
            family: Family::Tree,
            primary: deg_plus,
            measure: ParamSeq::constant(1.0),
            radius,
        }
    }

    pub fn antitree(a: ParamSeq, radius: usize) -> Self {
        Self {
            family: Family::AntiTree,
            primary: a,
            measure: ParamSeq::constant(1.0),
            radius,
        }
    }

    pub fn birth_death(b: ParamSeq, m: ParamSeq, radius: usize) -> Self {
        Self {
            family: Family::BirthDeath,
            primary: b,
            measure: m,
            radius,
        }
    }

    fn primary_values(&self, count: usize) -> Result<Vec<f64>> {
        (0..count)
            .map(|r| {
                let v = self.primary.value(r)?;
                positive(format!("{} parameter at r = {r}", self.family.name()), v)?;
                Ok(v)
            })
            .collect()
    }

    fn measure_values(&self, count: usize) -> Result<Vec<f64>> {
        (0..count)
            .map(|r| {
                let v = self.measure.value(r)?;
                finite_positive(format!("m({r})"), v)?;
                Ok(v)
            })
            .collect()
    }

    /// Sizes of the spheres of the standard-weight realization.
    fn sphere_sizes(&self) -> Result<Vec<usize>> {
        let integral = |what: &str, v: f64| -> Result<usize> {
            if v.fract() == 0.0 && v >= 1.0 && v <= MAX_REALIZATION as f64 {
                Ok(v as usize)
            } else {
                Err(Error::pre(format!("{what} must be a positive integer to realize, got {v}")))
            }
        };
        let r_max = self.radius;
        match self.family {
            Family::Tree => {
                let deg = self.primary_values(r_max)?;
                let mut sizes = vec![1usize];
                for (r, &d) in deg.iter().enumerate() {
                    let d = integral(&format!("Deg+({r})"), d)?;
                    let next = sizes[r].saturating_mul(d);
                    sizes.push(next);
                    if sizes.iter().fold(0usize, |a, &s| a.saturating_add(s)) > MAX_REALIZATION {
                        break;
                    }
                }
                Ok(sizes)
            }
            Family::AntiTree => self
                .primary_values(r_max + 1)?
                .iter()
                .enumerate()
                .map(|(r, &a)| integral(&format!("a_{r}"), a))
                .collect(),
            Family::BirthDeath => Ok(vec![1; r_max + 1]),
        }
    }
}

/// Radial profile of a model family.
pub fn build_profile(spec: &GeneratorSpec) -> Result<RadialProfile> {
    let r_max = spec.radius;
    match spec.family {
        Family::Tree => {
            let deg_plus = spec.primary_values(r_max)?;
            let mut mass = vec![1.0];
            for &d in &deg_plus {
                mass.push(mass.last().expect("nonempty") * d);
            }
            let boundary = mass[1..].to_vec();
            let mut deg_minus = vec![1.0; r_max + 1];
            deg_minus[0] = 0.0;
            Ok(RadialProfile {
                mass,
                boundary,
                deg_plus,
                deg_minus,
            })
        }
        Family::AntiTree => {
            let a = spec.primary_values(r_max + 1)?;
            if a[0] != 1.0 {
                return Err(Error::pre(format!("anti-trees need a_0 = 1, got {}", a[0])));
            }
            let boundary: Vec<f64> = (0..r_max).map(|r| a[r] * a[r + 1]).collect();
            let deg_plus = (0..r_max).map(|r| a[r + 1]).collect();
            let deg_minus = (0..=r_max)
                .map(|r| if r == 0 { 0.0 } else { a[r - 1] })
                .collect();
            Ok(RadialProfile {
                mass: a,
                boundary,
                deg_plus,
                deg_minus,
            })
        }
        Family::BirthDeath => {
            let b = spec.primary_values(r_max)?;
            for (r, &v) in b.iter().enumerate() {
                finite_positive(format!("b({r}, {})", r + 1), v)?;
            }
            let m = spec.measure_values(r_max + 1)?;
            let deg_plus = (0..r_max).map(|r| b[r] / m[r]).collect();
            let deg_minus = (0..=r_max)
                .map(|r| if r == 0 { 0.0 } else { b[r - 1] / m[r] })
                .collect();
            Ok(RadialProfile {
                mass: m,
                boundary: b,
                deg_plus,
                deg_minus,
            })
        }
    }
}

/// A finite realization with its root and truncation radius.
#[derive(Debug, Clone)]
pub struct Realization {
    pub graph: WeightedGraph,
    pub root: VertexId,
    pub radius: usize,
}

fn width(n: usize) -> usize {
    n.max(1).to_string().len()
}

/// Standard-weight realization (birth-death chains use their own weights)
/// truncated at radius `R`. Vertex `i` of sphere `r` is named `s{r}_{i}`
/// with zero padding.
pub fn realize_graph(spec: &GeneratorSpec, radius: usize) -> Result<Realization> {
    let spec = GeneratorSpec {
        radius,
        ..spec.clone()
    };
    if spec.family == Family::BirthDeath {
        let profile = build_profile(&spec)?;
        let graph = path(
            radius + 1,
            |i| profile.boundary[i],
            |i| profile.mass[i],
        );
        let root = graph.vertex(&crate::generators::path_vertex(radius + 1, 0))?;
        return Ok(Realization {
            graph,
            root,
            radius,
        });
    }
    let sizes = spec.sphere_sizes()?;
    let total = sizes.iter().fold(0usize, |a, &s| a.saturating_add(s));
    if sizes.len() < radius + 1 || total > MAX_REALIZATION {
        return Err(Error::SizeCap {
            what: format!("{} realization up to radius {radius}", spec.family.name()),
            size: total,
            cap: MAX_REALIZATION,
        });
    }
    let rw = width(radius);
    let iw = width(sizes.iter().copied().max().unwrap_or(1).saturating_sub(1));
    let name = |r: usize, i: usize| format!("s{r:0rw$}_{i:0iw$}");
    let mut g = GraphBuilder::new();
    for (r, &n) in sizes.iter().enumerate() {
        for i in 0..n {
            g.add_vertex(&name(r, i), 1.0)?;
        }
    }
    for r in 0..radius {
        match spec.family {
            Family::Tree => {
                let children = sizes[r + 1] / sizes[r];
                for i in 0..sizes[r + 1] {
                    g.add_edge(&name(r, i / children), &name(r + 1, i), 1.0)?;
                }
            }
            Family::AntiTree => {
                for i in 0..sizes[r] {
                    for j in 0..sizes[r + 1] {
                        g.add_edge(&name(r, i), &name(r + 1, j), 1.0)?;
                    }
                }
            }
            Family::BirthDeath => unreachable!("handled above"),
        }
    }
    let graph = g.build();
    let root = graph.vertex(&name(0, 0))?;
    Ok(Realization {
        graph,
        root,
        radius,
    })
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= SYMMETRY_TOL * a.abs().max(b.abs())
}

/// Checks weak spherical symmetry around `x0` and extracts the profile.
pub fn radial_reduction(graph: &WeightedGraph, x0: VertexId) -> Result<RadialProfile> {
    graph.check(x0)?;
    if !graph.is_connected() {
        return Err(Error::pre("radial reduction needs a connected graph"));
    }
    let dist = graph.bfs(x0);
    let spheres = graph.spheres(x0);
    let radius = spheres.len() - 1;
    let mut mass = Vec::with_capacity(radius + 1);
    let mut boundary = Vec::with_capacity(radius);
    for (r, sphere) in spheres.iter().enumerate() {
        mass.push(compensated_sum(sphere.iter().map(|&v| graph.measure(v))));
        let mut outward = CompensatedSum::new();
        let mut reference: Option<(VertexId, f64, f64)> = None;
        for &x in sphere {
            let mut plus = CompensatedSum::new();
            let mut minus = CompensatedSum::new();
            for &(y, b) in graph.neighbors(x) {
                let dy = dist[y.0].expect("connected");
                if dy == r + 1 {
                    plus.add(b);
                    outward.add(b);
                } else if dy + 1 == r {
                    minus.add(b);
                }
            }
            let m = graph.measure(x);
            let (dp, dm) = (plus.value() / m, minus.value() / m);
            match reference {
                None => reference = Some((x, dp, dm)),
                Some((first, p0, m0)) => {
                    for (label, a, b) in [("Deg+", p0, dp), ("Deg-", m0, dm)] {
                        if !close(a, b) {
                            return Err(Error::NotWeaklySymmetric {
                                sphere: r,
                                first: graph.name(first).to_string(),
                                second: graph.name(x).to_string(),
                                detail: format!("{label} differs: {} vs {}", fmt_sig(a), fmt_sig(b)),
                            });
                        }
                    }
                }
            }
        }
        if r < radius {
            boundary.push(outward.value());
        }
    }
    RadialProfile::new(mass, boundary)
}

/// Terms `V(r)/∂B(r)` for `r < R`, evaluated through the overflow-free recursion
/// `T(r) = T(r−1)·Deg₋(r)/Deg₊(r) + 1/Deg₊(r)`.
pub fn sc_terms(profile: &RadialProfile, radius: usize) -> Result<Vec<f64>> {
    if radius == 0 || radius > profile.radius() {
        return Err(Error::pre(format!(
            "series radius must lie in 1..={}, got {radius}",
            profile.radius()
        )));
    }
    let mut terms = Vec::with_capacity(radius);
    let mut t = 0.0;
    for r in 0..radius {
        let dp = profile.deg_plus[r];
        t = if r == 0 {
            1.0 / dp
        } else {
            t * (profile.deg_minus[r] / dp) + 1.0 / dp
        };
        terms.push(t);
    }
    Ok(terms)
}

/// `Σ_{r<R} V(r)/∂B(r)`: divergence means stochastic completeness.
pub fn sc_series(profile: &RadialProfile, radius: usize) -> Result<SeriesReport> {
    Ok(SeriesReport::from_terms(sc_terms(profile, radius)?))
}

/// Maps a series classification to the completeness statement it supports.
pub fn completeness_label(class: SeriesClass) -> &'static str {
    match class {
        SeriesClass::Diverges => "stochastically complete",
        SeriesClass::Converges => "stochastically incomplete",
        SeriesClass::Inconclusive => "undecided",
    }
}

/// `Σ 1/Deg₊(r)` for spherically symmetric trees (`Deg₋ ≡ 1`).
pub fn tree_series(profile: &RadialProfile) -> Result<SeriesReport> {
    if let Some(r) = (1..=profile.radius()).find(|&r| !close(profile.deg_minus[r], 1.0)) {
        return Err(Error::pre(format!(
            "profile is not a spherically symmetric tree: Deg-({r}) = {}",
            fmt_sig(profile.deg_minus[r])
        )));
    }
    if !close(profile.mass[0], 1.0) {
        return Err(Error::pre("tree profiles have a root of unit mass"));
    }
    Ok(SeriesReport::from_terms(
        profile.deg_plus.iter().map(|d| 1.0 / d).collect(),
    ))
}

/// `Σ (Σ_{k≤r} a_k)/(a_r a_{r+1})` for anti-trees.
pub fn antitree_series(spec: &GeneratorSpec) -> Result<SeriesReport> {
    if spec.family != Family::AntiTree {
        return Err(Error::pre(format!(
            "anti-tree series requested for a {} spec",
            spec.family.name()
        )));
    }
    let a = spec.primary_values(spec.radius + 1)?;
    let mut volume = CompensatedSum::new();
    let terms = (0..spec.radius)
        .map(|r| {
            volume.add(a[r]);
            volume.value() / (a[r] * a[r + 1])
        })
        .collect();
    Ok(SeriesReport::from_terms(terms))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundedness {
    BoundedConsistent,
    UnboundedConsistent,
    Inconclusive,
}

/// Blow-up factor read as unboundedness.
pub const BLOWUP: f64 = 1e6;
/// Ratio `v(R)/v(R/2) − 1` below which `v` is read as bounded.
pub const PLATEAU: f64 = 1e-6;

impl Boundedness {
    pub fn label(self) -> &'static str {
        match self {
            Boundedness::BoundedConsistent => "bounded-consistent",
            Boundedness::UnboundedConsistent => "unbounded-consistent",
            Boundedness::Inconclusive => "inconclusive",
        }
    }

    pub fn policy() -> String {
        format!(
            "heuristic: unbounded-consistent if v(R) > {}*v(0); bounded-consistent if v(R)/v(R/2) < 1 + {}; otherwise the log-increments ln(v(r+1)/v(r)) are classified as a series ({})",
            fmt_sig(BLOWUP),
            fmt_sig(PLATEAU),
            SeriesClass::policy()
        )
    }
}

/// Radial solution of `𝓛v = λv` with `v(0) = 1`.
#[derive(Debug, Clone)]
pub struct LambdaHarmonic {
    pub lambda: f64,
    pub values: Vec<f64>,
    /// Set when the recursion stopped early because `v` left the floating range.
    pub truncated: bool,
    pub verdict: Boundedness,
    pub increments: Option<SeriesReport>,
}

impl LambdaHarmonic {
    /// A bounded solution for `λ < 0` means stochastic incompleteness.
    pub fn completeness_label(&self) -> &'static str {
        match self.verdict {
            Boundedness::BoundedConsistent => "stochastically incomplete",
            Boundedness::UnboundedConsistent => "stochastically complete",
            Boundedness::Inconclusive => "undecided",
        }
    }
}

/// Runs `v(r+1) = v(r) − λ·w(r)` with `w(r) = Σ_{k≤r} v(k)m(S_k)/∂B(r)`,
/// where `w(r) = w(r−1)·Deg₋(r)/Deg₊(r) + v(r)/Deg₊(r)`.
pub fn radial_lambda_harmonic(
    profile: &RadialProfile,
    lambda: f64,
    radius: usize,
) -> Result<LambdaHarmonic> {
    if !(lambda < 0.0) || !lambda.is_finite() {
        return Err(Error::pre(format!("λ must be negative and finite, got {lambda}")));
    }
    if radius == 0 || radius > profile.radius() {
        return Err(Error::pre(format!(
            "recursion radius must lie in 1..={}, got {radius}",
            profile.radius()
        )));
    }
    let mut values = vec![1.0];
    let mut w = 0.0;
    let mut truncated = false;
    for r in 0..radius {
        let v = values[r];
        let dp = profile.deg_plus[r];
        w = if r == 0 {
            v / dp
        } else {
            w * (profile.deg_minus[r] / dp) + v / dp
        };
        let next = v - lambda * w;
        if !(next < 1e300) {
            truncated = true;
            break;
        }
        values.push(next);
    }
    let last = *values.last().expect("v(0)");
    let mut increments = None;
    let verdict = if truncated || last > BLOWUP * values[0] {
        Boundedness::UnboundedConsistent
    } else if last / values[values.len() / 2] < 1.0 + PLATEAU {
        Boundedness::BoundedConsistent
    } else {
        let logs = values.windows(2).map(|p| (p[1] / p[0]).ln()).collect();
        let report = SeriesReport::from_terms(logs);
        let verdict = match report.class {
            SeriesClass::Converges => Boundedness::BoundedConsistent,
            SeriesClass::Diverges => Boundedness::UnboundedConsistent,
            SeriesClass::Inconclusive => Boundedness::Inconclusive,
        };
        increments = Some(report);
        verdict
    };
    Ok(LambdaHarmonic {
        lambda,
        values,
        truncated,
        verdict,
        increments,
    })
}

/// Birth-death chain `m(r) = m(S_r)`, `b(r, r+1) = ∂B(r)` on spheres `0..=n`.
pub fn reduced_chain(profile: &RadialProfile, last: usize) -> Result<WeightedGraph> {
    if last > profile.radius() {
        return Err(Error::pre("chain longer than the profile"));
    }
    for r in 0..=last {
        finite_positive(format!("m(S_{r})"), profile.mass[r])?;
        if r < last {
            finite_positive(format!("dB({r})"), profile.boundary[r])?;
        }
    }
    Ok(path(last + 1, |i| profile.boundary[i], |i| profile.mass[i]))
}

/// Heat-loss defect `1 − P_t^{B_R}1(x0)` computed on the reduced chain. The
/// edge `∂B(R)` to the next sphere, when the profile has one, acts as the
/// killing boundary of the ball.
pub fn radial_heat_loss(profile: &RadialProfile, t: f64, radius: usize) -> Result<f64> {
    if radius > profile.radius() {
        return Err(Error::pre(format!(
            "radius {radius} beyond the profile radius {}",
            profile.radius()
        )));
    }
    if radius + 1 > MAX_RESTRICTION {
        return Err(Error::SizeCap {
            what: "radial heat loss".into(),
            size: radius + 1,
            cap: MAX_RESTRICTION,
        });
    }
    let last = (radius + 1).min(profile.radius());
    let chain = reduced_chain(profile, last)?;
    let ball: VertexSet = chain.vertices().take(radius + 1).collect();
    heat_defect(&chain, &ball, VertexId(0), t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expr(s: &str) -> ParamSeq {
        ParamSeq::parse(s).unwrap()
    }

    #[test]
    fn tree_profile_and_realization() {
        let spec = GeneratorSpec::tree(expr("2"), 5);
        let p = build_profile(&spec).unwrap();
        assert_eq!(p.sphere_mass(), &[1.0, 2.0, 4.0, 8.0, 16.0, 32.0]);
        assert_eq!(p.boundary(), &[2.0, 4.0, 8.0, 16.0, 32.0]);
        let g = realize_graph(&spec, 3).unwrap();
        assert_eq!(g.graph.len(), 15);
        assert_eq!(realize_graph(&spec, 5).unwrap().graph.len(), 63);
    }

    #[test]
    fn antitree_profile_and_realization() {
        let spec = GeneratorSpec::antitree(expr("r+1"), 4);
        let p = build_profile(&spec).unwrap();
        assert_eq!(p.boundary()[2], 12.0);
        let small = GeneratorSpec::antitree(expr("1,2,3"), 2);
        let g = realize_graph(&small, 2).unwrap();
        assert_eq!(g.graph.len(), 6);
        assert_eq!(g.graph.edge_count(), 8);
        assert!(g.graph.is_connected());
        let bad = GeneratorSpec::antitree(expr("r+2"), 3);
        assert!(build_profile(&bad).is_err());
    }

    #[test]
    fn birth_death_profile() {
        let spec = GeneratorSpec::birth_death(expr("1"), expr("1"), 6);
        let p = build_profile(&spec).unwrap();
        assert!(p.boundary().iter().all(|&b| b == 1.0));
        assert!(p.sphere_mass().iter().all(|&m| m == 1.0));
        let g = realize_graph(&spec, 6).unwrap();
        assert_eq!(g.graph.edge_count(), 6);
        assert_eq!(radial_reduction(&g.graph, g.root).unwrap(), p);
    }

    #[test]
    fn nonpositive_parameters() {
        let spec = GeneratorSpec::birth_death(expr("0"), expr("1"), 3);
        assert!(matches!(build_profile(&spec), Err(Error::NonPositive { .. })));
        let spec = GeneratorSpec::tree(expr("1,2"), 4);
        assert!(build_profile(&spec).is_err());
    }

    #[test]
    fn size_cap() {
        let spec = GeneratorSpec::tree(expr("10"), 6);
        assert!(matches!(realize_graph(&spec, 6), Err(Error::SizeCap { .. })));
    }

    #[test]
    fn profile_text_round_trip() {
        let spec = GeneratorSpec::birth_death(expr("(r+1)^3"), expr("1,0.5,2,1"), 3);
        let p = build_profile(&spec).unwrap();
        let text = p.to_text();
        assert!(text.ends_with("r 3 1\n"));
        assert_eq!(RadialProfile::parse(&text).unwrap(), p);
        assert!(RadialProfile::parse("r 0 1 2\n").is_err());
        assert!(RadialProfile::parse("r 0 1 2\nr 2 1\n").is_err());
        assert!(RadialProfile::parse("r 0 1 -2\nr 1 1\n").is_err());
    }

    #[test]
    fn pruned_tree_is_not_symmetric() {
        let full = crate::generators::regular_tree(3, 3);
        let root = full.vertex("t00").unwrap();
        assert!(radial_reduction(&full, root).is_ok());
        let leaf = full.sphere(root, 3).as_slice()[0];
        let mut b = GraphBuilder::new();
        for v in full.vertices().filter(|&v| v != leaf) {
            b.add_vertex(full.name(v), 1.0).unwrap();
        }
        for (x, y, w) in full.edges().filter(|&(x, y, _)| x != leaf && y != leaf) {
            b.add_edge(full.name(x), full.name(y), w).unwrap();
        }
        let pruned = b.build();
        let root = pruned.vertex("t00").unwrap();
        match radial_reduction(&pruned, root) {
            Err(Error::NotWeaklySymmetric { sphere, .. }) => assert_eq!(sphere, 2),
            other => panic!("expected a witness, got {other:?}"),
        }
    }

    #[test]
    fn first_recursion_step() {
        let spec = GeneratorSpec::birth_death(expr("2"), expr("3"), 5);
        let p = build_profile(&spec).unwrap();
        let h = radial_lambda_harmonic(&p, -0.5, 5).unwrap();
        assert!((h.values[1] - (1.0 + 0.5 * 3.0 / 2.0)).abs() < 1e-15);
        assert!(radial_lambda_harmonic(&p, 0.0, 5).is_err());
    }

    #[test]
    fn zero_time_heat_loss() {
        let spec = GeneratorSpec::birth_death(expr("1"), expr("1"), 20);
        let p = build_profile(&spec).unwrap();
        assert_eq!(radial_heat_loss(&p, 0.0, 10).unwrap(), 0.0);
    }
}
