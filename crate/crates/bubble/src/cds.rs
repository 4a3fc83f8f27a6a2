//! Connected dominating set election and exact search.
//!
//! Three routes to a flooding backbone:
//! - the id-based rule that each node evaluates from its two-hop view alone,
//! - the multipoint-relay rule layered on per-node MPR selections,
//! - an exact branch-and-bound minimizing the degree sum of the set.
//!
//! A single-commodity flow feasibility check is kept as an independent
//! cross-check of the connectivity constraint used by the exact search.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::udg::{self, Graph, NodeId};

#[derive(Debug, Error, PartialEq)]
pub enum CdsError {
    #[error("inconsistent views: {0} lists {1} as symmetric but {1} does not list {0}")]
    InconsistentViews(NodeId, NodeId),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph has {0} nodes, over the solver cap of {1}")]
    OverCap(usize, usize),
    #[error("root {0} is not a member of the candidate set")]
    RootNotMember(NodeId),
}

/// Which election route produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    WuLi1999,
    MprCds,
    Optimal,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::WuLi1999 => "wu-li-1999",
            Algorithm::MprCds => "mpr-cds",
            Algorithm::Optimal => "optimal",
        }
    }
}

/// An elected or computed backbone, with its cost fields.
#[derive(Debug, Clone, PartialEq)]
pub struct CdsResult {
    pub members: Vec<NodeId>,
    pub algorithm: Algorithm,
    pub degree_sum: usize,
    pub size: usize,
}

impl CdsResult {
    fn new(mut members: Vec<NodeId>, algorithm: Algorithm, g: &Graph) -> CdsResult {
        members.sort_unstable();
        members.dedup();
        let degree_sum = udg::set_degree(g, &members);
        let size = members.len();
        CdsResult { members, algorithm, degree_sum, size }
    }

    /// `algorithm size degree_sum member,member,...` on one line,
    /// members ascending.
    pub fn to_line(&self) -> String {
        let members = self
            .members
            .iter()
            .map(|m| m.to_string())
            .collect::<Vec<_>>()
            .join(",");
        format!("{} {} {} {}", self.algorithm.name(), self.size, self.degree_sum, members)
    }
}

/// What one node knows: its symmetric neighbors and, for each of them, the
/// symmetric-neighbor set they advertised. The distributed rules consult
/// nothing else.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoHopView {
    pub owner: NodeId,
    pub sym_neighbors: BTreeSet<NodeId>,
    pub neighbor_of: BTreeMap<NodeId, BTreeSet<NodeId>>,
}

impl TwoHopView {
    /// Nodes reachable in exactly two hops: advertised neighbors that are
    /// neither the owner nor direct neighbors.
    pub fn strict_two_hop(&self) -> BTreeSet<NodeId> {
        let mut out = BTreeSet::new();
        for set in self.neighbor_of.values() {
            for &z in set {
                if z != self.owner && !self.sym_neighbors.contains(&z) {
                    out.insert(z);
                }
            }
        }
        out
    }

    /// Whether `a` and `b` are adjacent as far as this view can tell.
    fn knows_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.neighbor_of.get(&a).map_or(false, |s| s.contains(&b))
            || self.neighbor_of.get(&b).map_or(false, |s| s.contains(&a))
    }
}

/// Build the converged two-hop view of every node from ground truth.
pub fn views_from_graph(g: &Graph) -> Vec<TwoHopView> {
    g.nodes()
        .map(|u| {
            let sym: BTreeSet<NodeId> = g.neighbors(u).iter().copied().collect();
            let neighbor_of = sym
                .iter()
                .map(|&v| (v, g.neighbors(v).iter().copied().collect()))
                .collect();
            TwoHopView { owner: u, sym_neighbors: sym, neighbor_of }
        })
        .collect()
}

/// The per-node id-based backbone flag evaluated on one two-hop view.
///
/// The node is in the backbone unless its smaller-id symmetric neighbors
/// dominate its whole neighborhood and form a connected set among
/// themselves (edges taken from the view). A node whose id is a local
/// minimum is always in.
pub fn wu_li_flag(view: &TwoHopView) -> bool {
    let x = view.owner;
    let neighbors = &view.sym_neighbors;
    if neighbors.is_empty() || x < *neighbors.iter().next().unwrap() {
        return true;
    }
    let smaller: Vec<NodeId> = neighbors.iter().copied().filter(|&y| y < x).collect();
    // domination of N(x) by the smaller-id set
    let dominated = neighbors.iter().all(|&z| {
        smaller.contains(&z)
            || smaller.iter().any(|&y| view.knows_edge(y, z))
    });
    if !dominated {
        return true;
    }
    // connectivity of the smaller-id set under the view's edges
    if smaller.len() > 1 {
        let mut seen = BTreeSet::new();
        let mut stack = vec![smaller[0]];
        seen.insert(smaller[0]);
        while let Some(a) = stack.pop() {
            for &b in &smaller {
                if !seen.contains(&b) && view.knows_edge(a, b) {
                    seen.insert(b);
                    stack.push(b);
                }
            }
        }
        if seen.len() != smaller.len() {
            return true;
        }
    }
    false
}

fn check_consistency(views: &[TwoHopView]) -> Result<(), CdsError> {
    let by_owner: BTreeMap<NodeId, &TwoHopView> = views.iter().map(|v| (v.owner, v)).collect();
    for v in views {
        for &y in &v.sym_neighbors {
            if let Some(w) = by_owner.get(&y) {
                if !w.sym_neighbors.contains(&v.owner) {
                    return Err(CdsError::InconsistentViews(v.owner, y));
                }
            }
        }
    }
    Ok(())
}

/// Run the id-based rule at every node and collect the elected set.
pub fn wu_li_1999(g: &Graph, views: &[TwoHopView]) -> Result<CdsResult, CdsError> {
    check_consistency(views)?;
    let members = views.iter().filter(|v| wu_li_flag(v)).map(|v| v.owner).collect();
    Ok(CdsResult::new(members, Algorithm::WuLi1999, g))
}

/// A node's chosen relays: a subset of its symmetric neighbors covering
/// every strict two-hop neighbor.
#[derive(Debug, Clone, PartialEq)]
pub struct MprSelection {
    pub selector: NodeId,
    pub mprs: BTreeSet<NodeId>,
}

/// Greedy relay selection: first take neighbors that are the unique cover
/// of some two-hop node, then repeatedly the neighbor covering the most
/// uncovered ones (ties: higher degree, then lower id).
pub fn select_mprs(view: &TwoHopView) -> MprSelection {
    let two_hop = view.strict_two_hop();
    let mut uncovered = two_hop.clone();
    let mut mprs = BTreeSet::new();

    let covers = |y: NodeId, z: NodeId| -> bool {
        view.neighbor_of.get(&y).map_or(false, |s| s.contains(&z))
    };

    // unique covers first
    for &z in &two_hop {
        let coverers: Vec<NodeId> = view
            .sym_neighbors
            .iter()
            .copied()
            .filter(|&y| covers(y, z))
            .collect();
        if coverers.len() == 1 {
            mprs.insert(coverers[0]);
        }
    }
    uncovered.retain(|&z| !mprs.iter().any(|&y| covers(y, z)));

    while !uncovered.is_empty() {
        let best = view
            .sym_neighbors
            .iter()
            .copied()
            .filter(|y| !mprs.contains(y))
            .max_by(|&a, &b| {
                let ca = uncovered.iter().filter(|&&z| covers(a, z)).count();
                let cb = uncovered.iter().filter(|&&z| covers(b, z)).count();
                let da = view.neighbor_of.get(&a).map_or(0, |s| s.len());
                let db = view.neighbor_of.get(&b).map_or(0, |s| s.len());
                // max_by keeps the last maximal element; compare so that the
                // preferred candidate (more coverage, higher degree, lower
                // id) is Ordering::Greater
                ca.cmp(&cb).then(da.cmp(&db)).then(b.cmp(&a))
            })
            .expect("two-hop nodes imply at least one neighbor");
        let gain = uncovered.iter().filter(|&&z| covers(best, z)).count();
        assert!(gain > 0, "uncoverable two-hop node in view");
        mprs.insert(best);
        uncovered.retain(|&z| !covers(best, z));
    }
    MprSelection { selector: view.owner, mprs }
}

/// The relay-based backbone: a node is in iff it is a local id minimum, or
/// it was selected as relay by its smallest-id neighbor and that neighbor's
/// id is below its own.
pub fn mpr_cds(
    g: &Graph,
    views: &[TwoHopView],
    selections: &[MprSelection],
) -> Result<CdsResult, CdsError> {
    check_consistency(views)?;
    let by_selector: BTreeMap<NodeId, &MprSelection> =
        selections.iter().map(|s| (s.selector, s)).collect();
    let mut members = Vec::new();
    for v in views {
        let x = v.owner;
        if v.sym_neighbors.is_empty() {
            members.push(x);
            continue;
        }
        let min = *v.sym_neighbors.iter().next().unwrap();
        if x < min {
            members.push(x);
        } else if min < x {
            if let Some(sel) = by_selector.get(&min) {
                if sel.mprs.contains(&x) {
                    members.push(x);
                }
            }
        }
    }
    Ok(CdsResult::new(members, Algorithm::MprCds, g))
}

/// Convenience: run relay selection at every node and elect.
pub fn mpr_cds_from_views(g: &Graph, views: &[TwoHopView]) -> Result<CdsResult, CdsError> {
    let selections: Vec<MprSelection> = views.iter().map(select_mprs).collect();
    mpr_cds(g, views, &selections)
}

pub const DEFAULT_SOLVER_CAP: usize = 20;

/// Exact minimum-degree-sum connected dominating set.
///
/// Branch and bound over node inclusion, nodes ordered by increasing
/// degree. Prunes on partial degree sum and on vertices that can no longer
/// be dominated; connectivity is checked on complete candidates. Ties are
/// broken by smaller degree sum, then fewer members, then lexicographic
/// member list, so the returned set is unique and reproducible.
pub fn optimal_cds(g: &Graph, cap: usize) -> Result<CdsResult, CdsError> {
    let n = g.node_count();
    if n > cap.min(32) {
        return Err(CdsError::OverCap(n, cap.min(32)));
    }
    if !g.is_graph_connected() {
        return Err(CdsError::Disconnected);
    }
    if n == 0 {
        return Ok(CdsResult::new(Vec::new(), Algorithm::Optimal, g));
    }

    // search order: increasing degree, then id
    let mut order: Vec<NodeId> = g.nodes().collect();
    order.sort_by_key(|&u| (g.degree_of(u), u));

    // closed neighborhood bitmasks over node ids
    let closed: Vec<u32> = g
        .nodes()
        .map(|u| {
            g.neighbors(u)
                .iter()
                .fold(1u32 << u, |m, &v| m | 1 << v)
        })
        .collect();
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };

    struct Search<'a> {
        g: &'a Graph,
        order: Vec<NodeId>,
        closed: Vec<u32>,
        full: u32,
        best: Option<(usize, Vec<NodeId>)>,
        chosen_dsum: usize,
    }

    impl Search<'_> {
        fn mask_connected(&self, mask: u32) -> bool {
            if mask == 0 {
                return false;
            }
            let start = mask.trailing_zeros() as usize;
            let mut seen = 1u32 << start;
            let mut frontier = seen;
            while frontier != 0 {
                let mut next = 0u32;
                let mut f = frontier;
                while f != 0 {
                    let u = f.trailing_zeros() as usize;
                    f &= f - 1;
                    next |= self.closed[u] & mask;
                }
                frontier = next & !seen;
                seen |= next;
            }
            seen == mask
        }

        /// chosen: included so far; undecided: not yet branched on.
        fn recurse(&mut self, depth: usize, chosen: u32, undecided: u32) {
            if let Some((bd, _)) = &self.best {
                if self.chosen_dsum > *bd {
                    return;
                }
            }
            // a vertex whose whole closed neighborhood is decided-out can
            // never be dominated
            let alive = chosen | undecided;
            for u in 0..self.g.node_count() {
                if self.closed[u] & alive == 0 {
                    return;
                }
            }
            if depth == self.order.len() {
                if chosen == 0 {
                    return;
                }
                let dominated = (0..self.g.node_count())
                    .all(|u| self.closed[u] & chosen != 0);
                if dominated && self.mask_connected(chosen) {
                    let members: Vec<NodeId> = (0..self.g.node_count() as NodeId)
                        .filter(|&u| chosen >> u & 1 == 1)
                        .collect();
                    let replace = match &self.best {
                        None => true,
                        Some((bd, bm)) => {
                            (self.chosen_dsum, members.len(), &members)
                                < (*bd, bm.len(), bm)
                        }
                    };
                    if replace {
                        self.best = Some((self.chosen_dsum, members));
                    }
                }
                return;
            }
            let u = self.order[depth];
            let bit = 1u32 << u;
            // include first so a dominating incumbent is found early
            self.chosen_dsum += self.g.degree_of(u);
            self.recurse(depth + 1, chosen | bit, undecided & !bit);
            self.chosen_dsum -= self.g.degree_of(u);
            self.recurse(depth + 1, chosen, undecided & !bit);
        }
    }

    let mut search = Search {
        g,
        order,
        closed,
        full,
        best: None,
        chosen_dsum: 0,
    };
    let full = search.full;
    search.recurse(0, 0, full);
    let (_, members) = search.best.expect("connected graph always has V itself as a CDS");
    Ok(CdsResult::new(members, Algorithm::Optimal, g))
}

/// Single-commodity flow feasibility for the connectivity constraint:
/// `root` must ship one unit to every other member of `s`, flow may only
/// touch selected nodes. Solved with augmenting paths, independently of
/// the graph-search connectivity predicate.
pub fn flow_feasible(g: &Graph, s: &[NodeId], root: NodeId) -> Result<bool, CdsError> {
    if !s.contains(&root) {
        return Err(CdsError::RootNotMember(root));
    }
    let k = s.len();
    if k == 1 {
        return Ok(true);
    }
    // network: source = root, super-sink t; each non-root member -> t with
    // capacity 1; edges between selected nodes with capacity k-1 each way
    let idx: BTreeMap<NodeId, usize> = s.iter().copied().enumerate().map(|(i, u)| (u, i)).collect();
    let t = k; // super sink
    let big = (g.node_count().max(2) - 1) as i64;
    let mut cap = vec![vec![0i64; k + 1]; k + 1];
    for (&u, &iu) in &idx {
        for &v in g.neighbors(u) {
            if let Some(&iv) = idx.get(&v) {
                cap[iu][iv] = big;
            }
        }
        if u != root {
            cap[iu][t] = 1;
        }
    }
    let source = idx[&root];
    let mut flow = 0i64;
    loop {
        // BFS augmenting path
        let mut prev = vec![usize::MAX; k + 1];
        prev[source] = source;
        let mut queue = std::collections::VecDeque::from([source]);
        while let Some(a) = queue.pop_front() {
            for b in 0..=k {
                if prev[b] == usize::MAX && cap[a][b] > 0 {
                    prev[b] = a;
                    queue.push_back(b);
                }
            }
        }
        if prev[t] == usize::MAX {
            break;
        }
        let mut bottleneck = i64::MAX;
        let mut b = t;
        while b != source {
            let a = prev[b];
            bottleneck = bottleneck.min(cap[a][b]);
            b = a;
        }
        let mut b = t;
        while b != source {
            let a = prev[b];
            cap[a][b] -= bottleneck;
            cap[b][a] += bottleneck;
            b = a;
        }
        flow += bottleneck;
    }
    Ok(flow == (k - 1) as i64)
}

/// Check a result against ground truth: dominating, connected, and cost
/// fields consistent.
pub fn validate(g: &Graph, r: &CdsResult) -> bool {
    udg::is_dominating(g, &r.members)
        && udg::is_connected(g, &r.members)
        && r.degree_sum == udg::set_degree(g, &r.members)
        && r.size == r.members.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::udg::DeploymentSpec;

    /// Exhaustive oracle: minimum degree-sum CDS with the same tie-breaks,
    /// by enumerating every subset. Only for small n.
    pub fn brute_force_optimal(g: &Graph) -> Vec<NodeId> {
        let n = g.node_count();
        assert!(n <= 16);
        let mut best: Option<(usize, Vec<NodeId>)> = None;
        for mask in 1u32..(1 << n) {
            let members: Vec<NodeId> =
                (0..n as NodeId).filter(|&u| mask >> u & 1 == 1).collect();
            if udg::is_dominating(g, &members) && udg::is_connected(g, &members) {
                let dsum = udg::set_degree(g, &members);
                let cand = (dsum, members);
                let replace = match &best {
                    None => true,
                    Some((bd, bm)) => {
                        (cand.0, cand.1.len(), &cand.1) < (*bd, bm.len(), bm)
                    }
                };
                if replace {
                    best = Some(cand);
                }
            }
        }
        best.expect("connected graph").1
    }

    // id-labelled fixtures from the rule walkthroughs use ids starting at 1
    fn triangle_123() -> Graph {
        Graph::from_edges(4, &[(1, 2), (2, 3), (1, 3)])
    }

    #[test]
    fn wu_li_triangle() {
        // node 0 is isolated in this fixture; drop it from the views
        let g = triangle_123();
        let views: Vec<TwoHopView> =
            views_from_graph(&g).into_iter().filter(|v| v.owner != 0).collect();
        let members: Vec<NodeId> =
            views.iter().filter(|v| wu_li_flag(v)).map(|v| v.owner).collect();
        assert_eq!(members, vec![1]);
    }

    #[test]
    fn wu_li_path() {
        let g = Graph::from_edges(4, &[(1, 2), (2, 3)]);
        let views: Vec<TwoHopView> =
            views_from_graph(&g).into_iter().filter(|v| v.owner != 0).collect();
        let members: Vec<NodeId> =
            views.iter().filter(|v| wu_li_flag(v)).map(|v| v.owner).collect();
        assert_eq!(members, vec![1, 2]);
    }

    #[test]
    fn wu_li_single_node() {
        let g = Graph::from_edges(1, &[]);
        let r = wu_li_1999(&g, &views_from_graph(&g)).unwrap();
        assert_eq!(r.members, vec![0]);
    }

    #[test]
    fn wu_li_rejects_inconsistent_views() {
        let g = Graph::from_edges(2, &[(0, 1)]);
        let mut views = views_from_graph(&g);
        views[1].sym_neighbors.clear();
        views[1].neighbor_of.clear();
        assert_eq!(
            wu_li_1999(&g, &views).unwrap_err(),
            CdsError::InconsistentViews(0, 1)
        );
    }

    #[test]
    fn mpr_selection_cases() {
        // no two-hop neighborhood
        let star = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]);
        let views = views_from_graph(&star);
        assert!(select_mprs(&views[0]).mprs.is_empty());
        // leaves of the star see each other at two hops via the center
        assert_eq!(select_mprs(&views[1]).mprs, BTreeSet::from([0]));

        // forced unique cover on a path
        let path = Graph::from_edges(5, &[(1, 2), (2, 3), (3, 4)]);
        let views = views_from_graph(&path);
        assert_eq!(select_mprs(&views[2]).mprs, BTreeSet::from([3]));
    }

    #[test]
    fn mpr_cds_triangle_and_path() {
        let g = triangle_123();
        let views: Vec<TwoHopView> =
            views_from_graph(&g).into_iter().filter(|v| v.owner != 0).collect();
        let sels: Vec<MprSelection> = views.iter().map(select_mprs).collect();
        let r = mpr_cds(&g, &views, &sels).unwrap();
        assert_eq!(r.members, vec![1]);

        let p = Graph::from_edges(5, &[(1, 2), (2, 3), (3, 4)]);
        let views: Vec<TwoHopView> =
            views_from_graph(&p).into_iter().filter(|v| v.owner != 0).collect();
        let sels: Vec<MprSelection> = views.iter().map(select_mprs).collect();
        let r = mpr_cds(&p, &views, &sels).unwrap();
        assert!(r.members.contains(&1));
        assert!(r.members.contains(&2));
        assert!(r.members.contains(&3));
        assert!(!r.members.contains(&4));
    }

    #[test]
    fn mpr_cds_single_node() {
        let g = Graph::from_edges(1, &[]);
        let r = mpr_cds_from_views(&g, &views_from_graph(&g)).unwrap();
        assert_eq!(r.members, vec![0]);
    }

    #[test]
    fn optimal_small_fixtures() {
        let path = Graph::from_edges(3, &[(0, 1), (1, 2)]);
        let r = optimal_cds(&path, DEFAULT_SOLVER_CAP).unwrap();
        assert_eq!(r.members, vec![1]);
        assert_eq!(r.degree_sum, 2);

        let tri = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]);
        let r = optimal_cds(&tri, DEFAULT_SOLVER_CAP).unwrap();
        assert_eq!(r.members, vec![0]);
        assert_eq!(r.degree_sum, 2);

        let star = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        let r = optimal_cds(&star, DEFAULT_SOLVER_CAP).unwrap();
        assert_eq!(r.members, vec![0]);
        assert_eq!(r.degree_sum, 4);
    }

    #[test]
    fn optimal_rejects_bad_input() {
        let disc = Graph::from_edges(3, &[(0, 1)]);
        assert_eq!(optimal_cds(&disc, 20).unwrap_err(), CdsError::Disconnected);
        let p = Graph::from_edges(3, &[(0, 1), (1, 2)]);
        assert_eq!(optimal_cds(&p, 2).unwrap_err(), CdsError::OverCap(3, 2));
    }

    #[test]
    fn optimal_on_complete_graph_is_single_node() {
        for n in 2..8u16 {
            let edges: Vec<(NodeId, NodeId)> = (0..n)
                .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
                .collect();
            let g = Graph::from_edges(n as usize, &edges);
            let r = optimal_cds(&g, 20).unwrap();
            assert_eq!(r.size, 1);
        }
    }

    #[test]
    fn optimal_matches_brute_force() {
        let mut checked = 0;
        let mut seed = 0u64;
        while checked < 60 {
            let spec = DeploymentSpec::new_1d(4.0, 2.0, seed);
            seed += 1;
            let g = udg::generate(&spec).unwrap();
            if g.node_count() < 2 || g.node_count() > 10 || !g.is_graph_connected() {
                continue;
            }
            let r = optimal_cds(&g, 20).unwrap();
            assert_eq!(r.members, brute_force_optimal(&g), "seed {seed}");
            checked += 1;
        }
    }

    #[test]
    fn flow_feasibility_examples() {
        let p = Graph::from_edges(3, &[(0, 1), (1, 2)]);
        assert!(flow_feasible(&p, &[0, 1, 2], 0).unwrap());
        assert!(!flow_feasible(&p, &[0, 2], 0).unwrap());
        assert!(flow_feasible(&p, &[1], 1).unwrap());
        assert_eq!(flow_feasible(&p, &[0, 1], 2).unwrap_err(), CdsError::RootNotMember(2));
    }

    #[test]
    fn flow_agrees_with_connectivity_exhaustively() {
        for seed in 0..10 {
            let spec = DeploymentSpec::new_1d(3.0, 2.0, seed);
            let g = udg::generate(&spec).unwrap();
            let n = g.node_count();
            if n == 0 || n > 8 {
                continue;
            }
            for mask in 1u32..(1 << n) {
                let s: Vec<NodeId> = (0..n as NodeId).filter(|&u| mask >> u & 1 == 1).collect();
                let root = s[0];
                assert_eq!(
                    flow_feasible(&g, &s, root).unwrap(),
                    udg::is_connected(&g, &s),
                    "seed {seed} mask {mask:b}"
                );
            }
        }
    }

    #[test]
    fn heuristics_sound_and_optimal_minimal_on_random_graphs() {
        let mut seed = 0u64;
        let mut checked = 0;
        while checked < 120 {
            let spec = DeploymentSpec::new_1d(6.0, 3.0, seed);
            seed += 1;
            let g = udg::generate(&spec).unwrap();
            if g.node_count() < 2 || !g.is_graph_connected() {
                continue;
            }
            let views = views_from_graph(&g);
            let wl = wu_li_1999(&g, &views).unwrap();
            let mpr = mpr_cds_from_views(&g, &views).unwrap();
            assert!(validate(&g, &wl), "seed {seed}");
            assert!(validate(&g, &mpr), "seed {seed}");
            if g.node_count() <= 16 {
                let opt = optimal_cds(&g, 20).unwrap();
                assert!(validate(&g, &opt));
                assert!(opt.degree_sum <= wl.degree_sum);
                assert!(opt.degree_sum <= mpr.degree_sum);
            }
            checked += 1;
        }
    }

    #[test]
    fn validate_edge_cases() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]);
        let empty = CdsResult { members: vec![], algorithm: Algorithm::Optimal, degree_sum: 0, size: 0 };
        assert!(!validate(&g, &empty));
        let all = CdsResult::new(vec![0, 1, 2], Algorithm::Optimal, &g);
        assert!(validate(&g, &all));
    }

    #[test]
    fn result_line_format() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]);
        let r = optimal_cds(&g, 20).unwrap();
        assert_eq!(r.to_line(), "optimal 1 2 1");
    }
}
