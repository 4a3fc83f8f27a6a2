//! The average flooding cost over a backbone has a closed form:
//! `2|E|/n + (1 - 1/n) * deg(CDS)`. This example checks it against a
//! per-initiator event simulation, exactly, and shows what the
//! check valve saves.
//!
//! Run with: `cargo run --example flood_cost`

use bubble::cds;
use bubble::flood;
use bubble::udg::{self, DeploymentSpec};

fn main() {
    let spec = DeploymentSpec::new_1d(8.0, 4.0, 3);
    let (g, _) = udg::generate_connected(&spec, 100).unwrap();
    let views = cds::views_from_graph(&g);
    let r = cds::wu_li_1999(&g, &views).unwrap();
    println!(
        "graph n={} |E|={}, backbone size={} deg={}",
        g.node_count(),
        g.edge_count(),
        r.size,
        r.degree_sum
    );

    let formula = flood::flooding_cost_formula(&g, &r.members).unwrap();
    let measured = flood::average_flood_cost(&g, &r.members, false).unwrap();
    assert_eq!(formula, measured);
    println!("avg cost: formula = measured = {formula} unicasts");

    let valved = flood::average_flood_cost(&g, &r.members, true).unwrap();
    println!("with check valve: {valved} unicasts");

    // a single flood, from the node with the smallest id
    let one = flood::simulate_flood(&g, &r.members, 0, false).unwrap();
    println!(
        "flood from node 0: {} unicasts, reached {}/{} nodes",
        one.transmissions,
        one.reached.len(),
        g.node_count()
    );
}
