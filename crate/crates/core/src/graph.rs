//! Finite weighted graphs `(X, b, m)` and their combinatorial geometry.
//!
//! Vertices carry opaque string ids. The canonical vertex order is the
//! lexicographic order of the ids and every iteration in the crate follows
//! it, so results do not depend on insertion order. A [`VertexId`] is the
//! position of a vertex in that order.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, fmt_exact};

/// Index of a vertex in the canonical (lexicographic) order of its graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

impl VertexId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Combinatorial distance; unreachable pairs are tagged instead of encoded as a number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Hops {
    Finite(usize),
    Unreachable,
}

impl Hops {
    pub fn finite(self) -> Option<usize> {
        match self {
            Hops::Finite(d) => Some(d),
            Hops::Unreachable => None,
        }
    }
}

/// Immutable weighted graph with symmetric positive edge weights and a
/// positive vertex measure.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    ids: Vec<String>,
    index: HashMap<String, VertexId>,
    measure: Vec<f64>,
    adjacency: Vec<Vec<(VertexId, f64)>>,
    // Σ_y b(x,y), compensated, in canonical neighbor order
    edge_sums: Vec<f64>,
}

/// Sorted, duplicate-free set of vertices of one graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct VertexSet {
    members: Vec<VertexId>,
}

impl VertexSet {
    pub fn new(mut members: Vec<VertexId>) -> Self {
        members.sort_unstable();
        members.dedup();
        Self { members }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.members.iter().copied()
    }

    pub fn as_slice(&self) -> &[VertexId] {
        &self.members
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut all = self.members.clone();
        all.extend_from_slice(&other.members);
        VertexSet::new(all)
    }

    pub fn names<'g>(&self, graph: &'g WeightedGraph) -> Vec<&'g str> {
        self.iter().map(|v| graph.name(v)).collect()
    }
}

impl FromIterator<VertexId> for VertexSet {
    fn from_iter<T: IntoIterator<Item = VertexId>>(iter: T) -> Self {
        VertexSet::new(iter.into_iter().collect())
    }
}

/// Incremental construction of a [`WeightedGraph`].
#[derive(Debug, Default, Clone)]
pub struct GraphBuilder {
    names: Vec<String>,
    measure: Vec<f64>,
    lookup: HashMap<String, usize>,
    edges: Vec<(usize, usize, f64)>,
    seen: HashSet<(usize, usize)>,
}

fn check_positive(what: impl Into<String>, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositive {
            what: what.into(),
            value,
        })
    }
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, id: &str, measure: f64) -> Result<()> {
        if self.lookup.contains_key(id) {
            return Err(Error::DuplicateVertex(id.to_string()));
        }
        check_positive(format!("measure of `{id}`"), measure)?;
        self.lookup.insert(id.to_string(), self.names.len());
        self.names.push(id.to_string());
        self.measure.push(measure);
        Ok(())
    }

    pub fn add_edge(&mut self, a: &str, b: &str, weight: f64) -> Result<()> {
        let ia = *self
            .lookup
            .get(a)
            .ok_or_else(|| Error::UnknownVertex(a.to_string()))?;
        let ib = *self
            .lookup
            .get(b)
            .ok_or_else(|| Error::UnknownVertex(b.to_string()))?;
        if ia == ib {
            return Err(Error::SelfLoop(a.to_string()));
        }
        check_positive(format!("weight of `{a}` -- `{b}`"), weight)?;
        let key = (ia.min(ib), ia.max(ib));
        if !self.seen.insert(key) {
            return Err(Error::DuplicateEdge(a.to_string(), b.to_string()));
        }
        self.edges.push((ia, ib, weight));
        Ok(())
    }

    pub fn build(self) -> WeightedGraph {
        let n = self.names.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| self.names[a].cmp(&self.names[b]));
        let mut rank = vec![0usize; n];
        for (pos, &old) in order.iter().enumerate() {
            rank[old] = pos;
        }
        let ids: Vec<String> = order.iter().map(|&i| self.names[i].clone()).collect();
        let measure: Vec<f64> = order.iter().map(|&i| self.measure[i]).collect();
        let mut adjacency: Vec<Vec<(VertexId, f64)>> = vec![Vec::new(); n];
        for &(a, b, w) in &self.edges {
            let (ra, rb) = (rank[a], rank[b]);
            adjacency[ra].push((VertexId(rb), w));
            adjacency[rb].push((VertexId(ra), w));
        }
        for row in &mut adjacency {
            row.sort_by_key(|&(v, _)| v);
        }
        let edge_sums = adjacency
            .iter()
            .map(|row| compensated_sum(row.iter().map(|&(_, w)| w)))
            .collect();
        let index = ids
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), VertexId(i)))
            .collect();
        WeightedGraph {
            ids,
            index,
            measure,
            adjacency,
            edge_sums,
        }
    }
}

impl WeightedGraph {
    /// Parses the line-oriented graph format (`v <id> <m>`, `e <a> <b> <w>`, `# ...`).
    pub fn parse(text: &str) -> Result<Self> {
        let mut builder = GraphBuilder::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let bad = |msg: &str| Error::Parse {
                line: lineno + 1,
                msg: format!("{msg}: `{line}`"),
            };
            let number = |s: &str| s.parse::<f64>().map_err(|_| bad("malformed number"));
            match fields.as_slice() {
                ["v", id, m] => builder.add_vertex(id, number(m)?)?,
                ["e", a, b, w] => builder.add_edge(a, b, number(w)?)?,
                ["v", ..] | ["e", ..] => return Err(bad("wrong field count")),
                _ => return Err(bad("unknown declaration")),
            }
        }
        Ok(builder.build())
    }

    /// Canonical text form: vertices in canonical order, then edges with `id1 < id2`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, id) in self.ids.iter().enumerate() {
            let _ = writeln!(out, "v {} {}", id, fmt_exact(self.measure[i]));
        }
        for (x, y, w) in self.edges() {
            let _ = writeln!(out, "e {} {} {}", self.name(x), self.name(y), fmt_exact(w));
        }
        out
    }

    /// SHA-256 of the canonical text form, hex encoded.
    pub fn canonical_hash(&self) -> String {
        let digest = Sha256::digest(self.to_text().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.ids.len()).map(VertexId)
    }

    pub fn vertex(&self, id: &str) -> Result<VertexId> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.ids[v.0]
    }

    pub fn check(&self, v: VertexId) -> Result<()> {
        if v.0 < self.ids.len() {
            Ok(())
        } else {
            Err(Error::UnknownVertex(format!("#{}", v.0)))
        }
    }

    pub fn measure(&self, v: VertexId) -> f64 {
        self.measure[v.0]
    }

    pub fn measures(&self) -> &[f64] {
        &self.measure
    }

    /// Neighbors of `v` with edge weights, in canonical order.
    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, f64)] {
        &self.adjacency[v.0]
    }

    /// `b(x, y)`, zero for non-adjacent pairs.
    pub fn weight(&self, x: VertexId, y: VertexId) -> f64 {
        let row = &self.adjacency[x.0];
        match row.binary_search_by_key(&y, |&(v, _)| v) {
            Ok(pos) => row[pos].1,
            Err(_) => 0.0,
        }
    }

    pub fn adjacent(&self, x: VertexId, y: VertexId) -> bool {
        self.weight(x, y) > 0.0
    }

    /// `Σ_y b(x, y)`.
    pub fn edge_sum(&self, v: VertexId) -> f64 {
        self.edge_sums[v.0]
    }

    /// `Deg(x) = Σ_y b(x,y) / m(x)`.
    pub fn degree(&self, v: VertexId) -> f64 {
        self.edge_sums[v.0] / self.measure[v.0]
    }

    pub fn weighted_degree(&self, id: &str) -> Result<f64> {
        Ok(self.degree(self.vertex(id)?))
    }

    pub fn max_degree(&self) -> f64 {
        self.vertices().map(|v| self.degree(v)).fold(0.0, f64::max)
    }

    /// Edges as `(x, y, b)` with `x < y`, in canonical order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, f64)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(x, row)| {
            row.iter()
                .filter(move |&&(y, _)| y.0 > x)
                .map(move |&(y, w)| (VertexId(x), y, w))
        })
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Standard edge weights and counting measure.
    pub fn is_standard(&self) -> bool {
        self.measure.iter().all(|&m| m == 1.0) && self.edges().all(|(_, _, w)| w == 1.0)
    }

    /// Breadth-first hop counts from `source`; `None` marks unreachable vertices.
    pub fn bfs(&self, source: VertexId) -> Vec<Option<usize>> {
        self.bfs_limited(source, usize::MAX)
    }

    /// Breadth-first search that stops expanding past `limit` hops.
    pub fn bfs_limited(&self, source: VertexId, limit: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        dist[source.0] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(x) = queue.pop_front() {
            let dx = dist[x.0].expect("queued vertices are labelled");
            if dx >= limit {
                continue;
            }
            for &(y, _) in self.neighbors(x) {
                if dist[y.0].is_none() {
                    dist[y.0] = Some(dx + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    pub fn hops(&self, x: VertexId, y: VertexId) -> Hops {
        match self.bfs(x)[y.0] {
            Some(d) => Hops::Finite(d),
            None => Hops::Unreachable,
        }
    }

    /// Combinatorial distance between two named vertices.
    pub fn combinatorial_distance(&self, x: &str, y: &str) -> Result<Hops> {
        Ok(self.hops(self.vertex(x)?, self.vertex(y)?))
    }

    /// `S_r(x0) = { x : d(x, x0) = r }`.
    pub fn sphere(&self, center: VertexId, radius: usize) -> VertexSet {
        let dist = self.bfs_limited(center, radius);
        VertexSet::new(
            self.vertices()
                .filter(|v| dist[v.0] == Some(radius))
                .collect(),
        )
    }

    /// `B_r(x0) = { x : d(x, x0) ≤ r }`.
    pub fn ball(&self, center: VertexId, radius: usize) -> VertexSet {
        let dist = self.bfs_limited(center, radius);
        VertexSet::new(
            self.vertices()
                .filter(|v| matches!(dist[v.0], Some(d) if d <= radius))
                .collect(),
        )
    }

    /// All spheres around `center` in increasing radius, up to the eccentricity.
    pub fn spheres(&self, center: VertexId) -> Vec<Vec<VertexId>> {
        let dist = self.bfs(center);
        let mut spheres: Vec<Vec<VertexId>> = Vec::new();
        for v in self.vertices() {
            if let Some(d) = dist[v.0] {
                if spheres.len() <= d {
                    spheres.resize_with(d + 1, Vec::new);
                }
                spheres[d].push(v);
            }
        }
        spheres
    }

    pub fn connected_component(&self, center: VertexId) -> VertexSet {
        let dist = self.bfs(center);
        VertexSet::new(self.vertices().filter(|v| dist[v.0].is_some()).collect())
    }

    pub fn is_connected(&self) -> bool {
        self.is_empty() || self.connected_component(VertexId(0)).len() == self.len()
    }

    /// Same vertices and measure, keeping only edges accepted by `keep`.
    pub fn filter_edges<F>(&self, mut keep: F) -> WeightedGraph
    where
        F: FnMut(VertexId, VertexId, f64) -> bool,
    {
        let adjacency: Vec<Vec<(VertexId, f64)>> = self
            .adjacency
            .iter()
            .enumerate()
            .map(|(x, row)| {
                row.iter()
                    .copied()
                    .filter(|&(y, w)| {
                        let (a, b) = if x < y.0 { (VertexId(x), y) } else { (y, VertexId(x)) };
                        keep(a, b, w)
                    })
                    .collect()
            })
            .collect();
        let edge_sums = adjacency
            .iter()
            .map(|row: &Vec<(VertexId, f64)>| compensated_sum(row.iter().map(|&(_, w)| w)))
            .collect();
        WeightedGraph {
            ids: self.ids.clone(),
            index: self.index.clone(),
            measure: self.measure.clone(),
            adjacency,
            edge_sums,
        }
    }

    /// Same vertices and edges with a new measure.
    pub fn with_measure<F>(&self, mut measure: F) -> Result<WeightedGraph>
    where
        F: FnMut(VertexId) -> f64,
    {
        let measure: Vec<f64> = self.vertices().map(&mut measure).collect();
        for (v, &m) in measure.iter().enumerate() {
            check_positive(format!("measure of `{}`", self.ids[v]), m)?;
        }
        Ok(WeightedGraph {
            measure,
            ..self.clone()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k2() -> WeightedGraph {
        WeightedGraph::parse("v a 1\nv b 1\ne a b 1\n").unwrap()
    }

    #[test]
    fn smallest_graph() {
        let g = k2();
        assert_eq!(g.len(), 2);
        assert_eq!(g.edge_count(), 1);
        let (a, b) = (g.vertex("a").unwrap(), g.vertex("b").unwrap());
        assert_eq!(g.weight(a, b), 1.0);
        assert_eq!(g.weight(b, a), 1.0);
        assert_eq!(g.weighted_degree("a").unwrap(), 1.0);
        assert!(g.is_connected());
    }

    #[test]
    fn parse_errors() {
        assert_eq!(
            WeightedGraph::parse("v a 1\ne a a 1"),
            Err(Error::SelfLoop("a".into()))
        );
        assert_eq!(
            WeightedGraph::parse("v a 1\nv a 2"),
            Err(Error::DuplicateVertex("a".into()))
        );
        assert_eq!(
            WeightedGraph::parse("v a 1\ne a b 1\nv b 1"),
            Err(Error::UnknownVertex("b".into()))
        );
        assert!(matches!(
            WeightedGraph::parse("v a 0"),
            Err(Error::NonPositive { .. })
        ));
        assert!(matches!(
            WeightedGraph::parse("v a 1\nv b 1\ne a b -1"),
            Err(Error::NonPositive { .. })
        ));
        assert!(matches!(
            WeightedGraph::parse("v a 1\nv b nan"),
            Err(Error::NonPositive { .. })
        ));
        assert_eq!(
            WeightedGraph::parse("v a 1\nv b 1\ne a b 1\ne b a 2"),
            Err(Error::DuplicateEdge("b".into(), "a".into()))
        );
        assert!(matches!(
            WeightedGraph::parse("x a 1"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            WeightedGraph::parse("# header\nv a"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn edge_order_does_not_matter() {
        let g1 = WeightedGraph::parse("v c 2\nv a 1\nv b 1\ne a b 1\ne b c 0.5\n").unwrap();
        let g2 = WeightedGraph::parse("v a 1\nv b 1\nv c 2\ne c b 0.5\ne b a 1\n").unwrap();
        assert_eq!(g1, g2);
        assert_eq!(g1.canonical_hash(), g2.canonical_hash());
        assert_eq!(g1.to_text(), "v a 1\nv b 1\nv c 2\ne a b 1\ne b c 0.5\n");
    }

    #[test]
    fn isolated_vertex_and_unreachable() {
        let g = WeightedGraph::parse("v a 1\nv b 1\nv z 3\ne a b 1").unwrap();
        let z = g.vertex("z").unwrap();
        assert_eq!(g.degree(z), 0.0);
        assert_eq!(g.combinatorial_distance("a", "z").unwrap(), Hops::Unreachable);
        assert_eq!(g.combinatorial_distance("z", "z").unwrap(), Hops::Finite(0));
        assert!(!g.is_connected());
        let a = g.vertex("a").unwrap();
        for r in 0..4 {
            assert!(!g.ball(a, r).contains(z));
        }
        assert_eq!(g.connected_component(a).len(), 2);
    }

    #[test]
    fn degree_with_degree_measure_is_one() {
        let g = WeightedGraph::parse("v a 3\nv b 2\nv c 1\ne a b 2\ne a c 1").unwrap();
        for v in g.vertices() {
            assert_eq!(g.degree(v), 1.0);
        }
    }

    #[test]
    fn unknown_vertex_lookup() {
        let g = k2();
        assert_eq!(g.weighted_degree("q"), Err(Error::UnknownVertex("q".into())));
        assert!(g.combinatorial_distance("a", "q").is_err());
    }
}
