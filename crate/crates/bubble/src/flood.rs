//! Broadcast flooding cost over a backbone, under the cost model where one
//! local broadcast resolves into one unicast per neighbor.

use std::collections::VecDeque;

use num_rational::Ratio;
use thiserror::Error;

use crate::udg::{self, Graph, NodeId};

pub type Cost = Ratio<u64>;

#[derive(Debug, Error, PartialEq)]
pub enum FloodError {
    #[error("set is not a valid connected dominating set")]
    InvalidCds,
    #[error("initiator {0} is not a node of the graph")]
    BadInitiator(NodeId),
}

/// One simulated flood.
#[derive(Debug, Clone, PartialEq)]
pub struct FloodOutcome {
    pub initiator: NodeId,
    /// Total unicast sends.
    pub transmissions: usize,
    /// Nodes holding at least one copy (the initiator trivially included).
    pub reached: Vec<NodeId>,
    pub check_valve: bool,
}

fn require_valid_cds(g: &Graph, cds: &[NodeId]) -> Result<(), FloodError> {
    if udg::is_dominating(g, cds) && udg::is_connected(g, cds) {
        Ok(())
    } else {
        Err(FloodError::InvalidCds)
    }
}

/// Closed-form average flooding cost over all initiators:
/// `2|E|/n + (1 - 1/n) * deg(cds)`, exact.
pub fn flooding_cost_formula(g: &Graph, cds: &[NodeId]) -> Result<Cost, FloodError> {
    require_valid_cds(g, cds)?;
    let n = g.node_count() as u64;
    let e = g.edge_count() as u64;
    let d = udg::set_degree(g, cds) as u64;
    Ok(Ratio::new(2 * e, n) + Ratio::new(n - 1, n) * Ratio::from_integer(d))
}

/// Deliver one broadcast: the initiator unicasts to every neighbor; each
/// backbone member retransmits exactly once, on first receipt, to every
/// neighbor (minus the node it heard it from, when the check valve is on).
/// Duplicate receipts count as transmissions by the sender but trigger
/// nothing.
pub fn simulate_flood(
    g: &Graph,
    cds: &[NodeId],
    initiator: NodeId,
    check_valve: bool,
) -> Result<FloodOutcome, FloodError> {
    require_valid_cds(g, cds)?;
    let n = g.node_count();
    if initiator as usize >= n {
        return Err(FloodError::BadInitiator(initiator));
    }
    let mut in_cds = vec![false; n];
    for &u in cds {
        in_cds[u as usize] = true;
    }
    let mut received = vec![false; n];
    let mut retransmitted = vec![false; n];
    let mut transmissions = 0usize;
    // (receiver, sender) deliveries in FIFO order
    let mut queue: VecDeque<(NodeId, NodeId)> = VecDeque::new();

    transmissions += g.degree_of(initiator);
    retransmitted[initiator as usize] = true;
    for &v in g.neighbors(initiator) {
        queue.push_back((v, initiator));
    }

    while let Some((u, from)) = queue.pop_front() {
        let first = !received[u as usize];
        received[u as usize] = true;
        if first && in_cds[u as usize] && !retransmitted[u as usize] {
            retransmitted[u as usize] = true;
            for &v in g.neighbors(u) {
                if check_valve && v == from {
                    continue;
                }
                transmissions += 1;
                queue.push_back((v, u));
            }
        }
    }

    let mut reached: Vec<NodeId> = (0..n as NodeId)
        .filter(|&u| received[u as usize] || u == initiator)
        .collect();
    reached.sort_unstable();
    Ok(FloodOutcome { initiator, transmissions, reached, check_valve })
}

/// Mean simulated cost over all possible initiators, exact.
pub fn average_flood_cost(g: &Graph, cds: &[NodeId], check_valve: bool) -> Result<Cost, FloodError> {
    require_valid_cds(g, cds)?;
    let n = g.node_count() as u64;
    let mut total = 0u64;
    for u in g.nodes() {
        total += simulate_flood(g, cds, u, check_valve)?.transmissions as u64;
    }
    Ok(Ratio::new(total, n))
}
