//! Elect a flooding backbone three ways and compare the results.
//!
//! Run with: `cargo run --example backbone_election`

use bubble::cds::{self, Algorithm};
use bubble::udg::{self, DeploymentSpec};

fn main() {
    // keep n small enough for the exact solver
    let spec = DeploymentSpec::new_1d(5.0, 3.0, 7);
    let (g, _) = udg::generate_connected(&spec, 100).unwrap();
    println!("graph: {} nodes, {} edges", g.node_count(), g.edge_count());

    let views = cds::views_from_graph(&g);
    let results = [
        cds::wu_li_1999(&g, &views).unwrap(),
        cds::mpr_cds_from_views(&g, &views).unwrap(),
        cds::optimal_cds(&g, 20).unwrap(),
    ];
    for r in &results {
        println!("{}", r.to_line());
        assert!(cds::validate(&g, r));
    }

    let optimal = results.iter().find(|r| r.algorithm == Algorithm::Optimal).unwrap();
    for r in &results {
        assert!(optimal.degree_sum <= r.degree_sum);
    }
    println!(
        "optimal degree-sum {} is minimal, as it must be",
        optimal.degree_sum
    );
}
