//! Unit disk graphs on a 1D segment or a 2D rectangle.
//!
//! Nodes are placed uniformly at random in the deployment region and two
//! nodes share an edge iff their Euclidean distance is strictly below one
//! radio range (the unit).

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use thiserror::Error;

/// Node identifier, dense in `0..n`. Id order is the tie-break order used
/// by the distributed election rules.
pub type NodeId = u16;

#[derive(Debug, Error, PartialEq)]
pub enum UdgError {
    #[error("deployment length must be positive, got {0}")]
    BadLength(f64),
    #[error("deployment density must be positive, got {0}")]
    BadDensity(f64),
    #[error("dimension must be 1 or 2, got {0}")]
    BadDimension(u8),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("graph parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// How many nodes a deployment draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Placement {
    /// `n ~ Poisson(lambda * length)`.
    Poisson,
    /// `n = round(lambda * length)`.
    #[default]
    FixedN,
}

/// Random deployment parameters: dimension, region size, node density.
///
/// In 1D nodes live on the segment `[0, length]`; in 2D on the rectangle
/// `[0,1] x [0,length]`. The unit of length is the radio range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeploymentSpec {
    pub dimension: u8,
    pub length: f64,
    pub density: f64,
    pub seed: u64,
    pub placement: Placement,
}

impl DeploymentSpec {
    pub fn new_1d(length: f64, density: f64, seed: u64) -> Self {
        DeploymentSpec { dimension: 1, length, density, seed, placement: Placement::FixedN }
    }

    pub fn new_2d(length: f64, density: f64, seed: u64) -> Self {
        DeploymentSpec { dimension: 2, length, density, seed, placement: Placement::FixedN }
    }

    fn validate(&self) -> Result<(), UdgError> {
        if !(self.length > 0.0) {
            return Err(UdgError::BadLength(self.length));
        }
        if !(self.density > 0.0) {
            return Err(UdgError::BadDensity(self.density));
        }
        if self.dimension != 1 && self.dimension != 2 {
            return Err(UdgError::BadDimension(self.dimension));
        }
        Ok(())
    }
}

/// Immutable undirected graph with node positions.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    dimension: u8,
    length: f64,
    seed: u64,
    /// `(x, y)`; in 1D `y` is 0 and `x` ranges over `[0, length]`.
    positions: Vec<(f64, f64)>,
    /// Sorted neighbor list per node.
    adjacency: Vec<Vec<NodeId>>,
    /// Unordered pairs with `u < v`, sorted.
    edges: Vec<(NodeId, NodeId)>,
}

impl Graph {
    /// Build a graph from explicit positions, applying the strict unit-disk
    /// edge rule.
    pub fn from_positions(
        dimension: u8,
        length: f64,
        seed: u64,
        positions: Vec<(f64, f64)>,
    ) -> Graph {
        let n = positions.len();
        let mut adjacency = vec![Vec::new(); n];
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                let dx = positions[u].0 - positions[v].0;
                let dy = positions[u].1 - positions[v].1;
                if dx * dx + dy * dy < 1.0 {
                    adjacency[u].push(v as NodeId);
                    adjacency[v].push(u as NodeId);
                    edges.push((u as NodeId, v as NodeId));
                }
            }
        }
        for a in adjacency.iter_mut() {
            a.sort_unstable();
        }
        edges.sort_unstable();
        Graph { n, dimension, length, seed, positions, adjacency, edges }
    }

    /// Build a graph from an explicit edge list (positions set to zero).
    /// Intended for small hand-made fixtures.
    pub fn from_edges(n: usize, edge_list: &[(NodeId, NodeId)]) -> Graph {
        let mut adjacency = vec![Vec::new(); n];
        let mut edges = Vec::new();
        for &(u, v) in edge_list {
            assert!(u != v && (u as usize) < n && (v as usize) < n, "bad edge ({u},{v})");
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            if !edges.contains(&(a, b)) {
                edges.push((a, b));
                adjacency[a as usize].push(b);
                adjacency[b as usize].push(a);
            }
        }
        for a in adjacency.iter_mut() {
            a.sort_unstable();
        }
        edges.sort_unstable();
        Graph { n, dimension: 0, length: 0.0, seed: 0, positions: vec![(0.0, 0.0); n], adjacency, edges }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn dimension(&self) -> u8 {
        self.dimension
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.n as NodeId).into_iter()
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn position(&self, u: NodeId) -> (f64, f64) {
        self.positions[u as usize]
    }

    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.adjacency[u as usize]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adjacency[u as usize].binary_search(&v).is_ok()
    }

    pub fn degree_of(&self, u: NodeId) -> usize {
        self.adjacency[u as usize].len()
    }

    /// Whether the whole graph is connected (empty graphs count as connected).
    pub fn is_graph_connected(&self) -> bool {
        let all: Vec<NodeId> = self.nodes().collect();
        is_connected(self, &all)
    }

    /// Line-oriented text serialization: `n length dim seed` header, then one
    /// `id x [y]` line per node, then one `u v` line per edge.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{} {} {} {}", self.n, self.length, self.dimension, self.seed).unwrap();
        for u in 0..self.n {
            let (x, y) = self.positions[u];
            if self.dimension == 2 {
                writeln!(out, "{u} {x} {y}").unwrap();
            } else {
                writeln!(out, "{u} {x}").unwrap();
            }
        }
        for &(u, v) in &self.edges {
            writeln!(out, "{u} {v}").unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Graph, UdgError> {
        let err = |line: usize, reason: &str| UdgError::Parse { line, reason: reason.into() };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| err(1, "empty input"))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 4 {
            return Err(err(1, "header must be `n length dim seed`"));
        }
        let n: usize = parts[0].parse().map_err(|_| err(1, "bad node count"))?;
        let length: f64 = parts[1].parse().map_err(|_| err(1, "bad length"))?;
        let dimension: u8 = parts[2].parse().map_err(|_| err(1, "bad dimension"))?;
        let seed: u64 = parts[3].parse().map_err(|_| err(1, "bad seed"))?;

        let mut positions = vec![(0.0, 0.0); n];
        for i in 0..n {
            let (ln, text) = lines.next().ok_or_else(|| err(i + 2, "missing node line"))?;
            let f: Vec<&str> = text.split_whitespace().collect();
            let want = if dimension == 2 { 3 } else { 2 };
            if f.len() != want {
                return Err(err(ln + 1, "bad node line"));
            }
            let id: usize = f[0].parse().map_err(|_| err(ln + 1, "bad node id"))?;
            if id != i {
                return Err(err(ln + 1, "node ids must be dense and in order"));
            }
            let x: f64 = f[1].parse().map_err(|_| err(ln + 1, "bad coordinate"))?;
            let y: f64 = if dimension == 2 {
                f[2].parse().map_err(|_| err(ln + 1, "bad coordinate"))?
            } else {
                0.0
            };
            positions[i] = (x, y);
        }

        let mut edge_list = Vec::new();
        for (ln, text) in lines {
            if text.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = text.split_whitespace().collect();
            if f.len() != 2 {
                return Err(err(ln + 1, "bad edge line"));
            }
            let u: NodeId = f[0].parse().map_err(|_| err(ln + 1, "bad edge endpoint"))?;
            let v: NodeId = f[1].parse().map_err(|_| err(ln + 1, "bad edge endpoint"))?;
            if (u as usize) >= n || (v as usize) >= n || u == v {
                return Err(err(ln + 1, "edge endpoint out of range"));
            }
            edge_list.push((u, v));
        }

        let mut g = Graph::from_edges(n, &edge_list);
        g.dimension = dimension;
        g.length = length;
        g.seed = seed;
        g.positions = positions;
        Ok(g)
    }
}

/// Generate a random unit disk graph. Deterministic given the spec's seed.
pub fn generate(spec: &DeploymentSpec) -> Result<Graph, UdgError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let expected = spec.density * spec.length;
    let n = match spec.placement {
        Placement::FixedN => expected.round() as usize,
        Placement::Poisson => {
            let poisson = Poisson::new(expected).expect("positive mean");
            poisson.sample(&mut rng) as usize
        }
    };
    let positions: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            if spec.dimension == 1 {
                (rng.gen_range(0.0..spec.length), 0.0)
            } else {
                // Rectangle [0,1] x [0,length]; x is the short side.
                (rng.gen_range(0.0..1.0), rng.gen_range(0.0..spec.length))
            }
        })
        .collect();
    Ok(Graph::from_positions(spec.dimension, spec.length, spec.seed, positions))
}

/// Generate, resampling (seed+1, seed+2, ...) until the graph is connected
/// and nonempty. Returns the graph and the number of discarded samples.
pub fn generate_connected(spec: &DeploymentSpec, max_tries: usize) -> Result<(Graph, usize), UdgError> {
    let mut s = *spec;
    for tries in 0..max_tries {
        let g = generate(&s)?;
        if g.node_count() > 0 && g.is_graph_connected() {
            return Ok((g, tries));
        }
        s.seed = s.seed.wrapping_add(1);
    }
    Err(UdgError::Parse { line: 0, reason: format!("no connected sample in {max_tries} tries") })
}

pub fn degree(g: &Graph, u: NodeId) -> Result<usize, UdgError> {
    if (u as usize) >= g.n {
        return Err(UdgError::UnknownNode(u));
    }
    Ok(g.degree_of(u))
}

/// Sum of degrees over a node set.
pub fn set_degree(g: &Graph, s: &[NodeId]) -> usize {
    s.iter().map(|&u| g.degree_of(u)).sum()
}

/// Whether the subgraph induced by `s` is connected. The empty set and
/// singletons count as connected.
pub fn is_connected(g: &Graph, s: &[NodeId]) -> bool {
    if s.len() <= 1 {
        return true;
    }
    let mut member = vec![false; g.n];
    for &u in s {
        member[u as usize] = true;
    }
    let mut seen = vec![false; g.n];
    let mut queue = VecDeque::new();
    seen[s[0] as usize] = true;
    queue.push_back(s[0]);
    let mut count = 1;
    while let Some(u) = queue.pop_front() {
        for &v in g.neighbors(u) {
            if member[v as usize] && !seen[v as usize] {
                seen[v as usize] = true;
                count += 1;
                queue.push_back(v);
            }
        }
    }
    count == s.len()
}

/// Whether every node is in `s` or adjacent to a member of `s`.
pub fn is_dominating(g: &Graph, s: &[NodeId]) -> bool {
    let mut covered = vec![false; g.n];
    for &u in s {
        covered[u as usize] = true;
        for &v in g.neighbors(u) {
            covered[v as usize] = true;
        }
    }
    covered.iter().all(|&c| c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph {
        Graph::from_edges(3, &[(0, 1), (1, 2)])
    }

    #[test]
    fn fixed_n_count_and_range() {
        let spec = DeploymentSpec::new_1d(10.0, 5.0, 42);
        let g = generate(&spec).unwrap();
        assert_eq!(g.node_count(), 50);
        assert!(g.nodes().all(|u| {
            let (x, y) = g.position(u);
            (0.0..=10.0).contains(&x) && y == 0.0
        }));
    }

    #[test]
    fn strict_unit_disk_rule() {
        let g = Graph::from_positions(1, 2.0, 0, vec![(0.0, 0.0), (0.5, 0.0), (1.5, 0.0)]);
        assert!(g.has_edge(0, 1));
        // distance exactly 1.0: no edge
        assert!(!g.has_edge(1, 2));
        assert!(!g.has_edge(0, 2));
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(generate(&DeploymentSpec::new_1d(0.0, 5.0, 0)).is_err());
        assert!(generate(&DeploymentSpec::new_1d(10.0, -1.0, 0)).is_err());
        let mut s = DeploymentSpec::new_1d(10.0, 5.0, 0);
        s.dimension = 3;
        assert_eq!(generate(&s).unwrap_err(), UdgError::BadDimension(3));
    }

    #[test]
    fn degree_basics() {
        let g = path3();
        assert_eq!(degree(&g, 1).unwrap(), 2);
        assert_eq!(degree(&g, 0).unwrap(), 1);
        assert_eq!(degree(&g, 9).unwrap_err(), UdgError::UnknownNode(9));
        let isolated = Graph::from_edges(1, &[]);
        assert_eq!(degree(&isolated, 0).unwrap(), 0);
        let triangle = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]);
        assert!(triangle.nodes().all(|u| triangle.degree_of(u) == 2));
    }

    #[test]
    fn set_degree_basics() {
        let g = path3();
        assert_eq!(set_degree(&g, &[]), 0);
        assert_eq!(set_degree(&g, &[0, 1]), 3);
        let all: Vec<NodeId> = g.nodes().collect();
        assert_eq!(set_degree(&g, &all), 2 * g.edge_count());
    }

    #[test]
    fn connectivity_predicate() {
        let g = path3();
        assert!(!is_connected(&g, &[0, 2]));
        assert!(is_connected(&g, &[1]));
        assert!(is_connected(&g, &[]));
        assert!(is_connected(&g, &[0, 1, 2]));
    }

    #[test]
    fn domination_predicate() {
        let g = path3();
        assert!(is_dominating(&g, &[1]));
        let p4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]);
        assert!(!is_dominating(&p4, &[1]));
        let all: Vec<NodeId> = g.nodes().collect();
        assert!(is_dominating(&g, &all));
    }

    #[test]
    fn handshake_and_symmetry_on_random_graphs() {
        for seed in 0..20 {
            let g = generate(&DeploymentSpec::new_1d(10.0, 3.0, seed)).unwrap();
            let degsum: usize = g.nodes().map(|u| g.degree_of(u)).sum();
            assert_eq!(degsum, 2 * g.edge_count());
            for u in g.nodes() {
                for &v in g.neighbors(u) {
                    assert!(g.has_edge(v, u));
                }
            }
        }
    }

    #[test]
    fn deterministic_and_round_trips() {
        let spec = DeploymentSpec::new_2d(4.0, 6.0, 7);
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a.to_text(), b.to_text());
        let back = Graph::from_text(&a.to_text()).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn poisson_placement_varies_n() {
        let mut spec = DeploymentSpec::new_1d(10.0, 5.0, 1);
        spec.placement = Placement::Poisson;
        let counts: Vec<usize> = (0..20)
            .map(|s| {
                let mut sp = spec;
                sp.seed = s;
                generate(&sp).unwrap().node_count()
            })
            .collect();
        assert!(counts.iter().any(|&c| c != counts[0]));
        let mean = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
        assert!((mean - 50.0).abs() < 15.0);
    }

    #[test]
    fn mean_interior_degree_1d() {
        // 2*lambda in the bulk, within 5%
        let lambda = 10.0;
        let ell = 10.0;
        let mut total = 0usize;
        let mut count = 0usize;
        for seed in 0..1000 {
            let g = generate(&DeploymentSpec::new_1d(ell, lambda, seed)).unwrap();
            for u in g.nodes() {
                let x = g.position(u).0;
                if x >= 1.0 && x <= ell - 1.0 {
                    total += g.degree_of(u);
                    count += 1;
                }
            }
        }
        let mean = total as f64 / count as f64;
        assert!((mean - 2.0 * lambda).abs() < 0.05 * 2.0 * lambda, "mean={mean}");
    }

    #[test]
    fn mean_interior_degree_2d() {
        // pi*lambda in the bulk, within 5%. The standard 1 x ell rectangle is
        // too narrow to have an interior 1 unit from every wall, so sample a
        // square region directly and apply the same edge rule.
        use rand::SeedableRng;
        let lambda = 10.0f64;
        let side = 4.0f64;
        let n = (lambda * side * side).round() as usize;
        let mut total = 0usize;
        let mut count = 0usize;
        for seed in 0..1000u64 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let positions: Vec<(f64, f64)> =
                (0..n).map(|_| (rng.gen_range(0.0..side), rng.gen_range(0.0..side))).collect();
            let g = Graph::from_positions(2, side, seed, positions);
            for u in g.nodes() {
                let (x, y) = g.position(u);
                if x >= 1.0 && x <= side - 1.0 && y >= 1.0 && y <= side - 1.0 {
                    total += g.degree_of(u);
                    count += 1;
                }
            }
        }
        let mean = total as f64 / count as f64;
        let expect = std::f64::consts::PI * lambda;
        assert!((mean - expect).abs() < 0.05 * expect, "mean={mean}");
    }
}
