//! Deploy random unit disk graphs and look at their basic statistics.
//!
//! Run with: `cargo run --example graph_generation`

use bubble::udg::{self, DeploymentSpec, Placement};

fn main() {
    // a 1D segment of 10 radio ranges at density 5 nodes per range
    let spec = DeploymentSpec::new_1d(10.0, 5.0, 42);
    let (g, resamples) = udg::generate_connected(&spec, 100).unwrap();
    println!(
        "1d segment: {} nodes, {} edges ({} resamples to get connectivity)",
        g.node_count(),
        g.edge_count(),
        resamples
    );
    let mean_deg =
        g.nodes().map(|u| g.degree_of(u) as f64).sum::<f64>() / g.node_count() as f64;
    println!("mean degree {mean_deg:.2} (interior nodes approach 2λ = 10)");

    // same density on a 2D strip, Poisson-distributed head count
    let mut spec2 = DeploymentSpec::new_2d(10.0, 5.0, 42);
    spec2.placement = Placement::Poisson;
    let g2 = udg::generate(&spec2).unwrap();
    println!(
        "2d strip: {} nodes (Poisson draw), {} edges, connected: {}",
        g2.node_count(),
        g2.edge_count(),
        g2.is_graph_connected()
    );

    // graphs serialize to a plain text format and round-trip exactly
    let text = g.to_text();
    let back = udg::Graph::from_text(&text).unwrap();
    assert_eq!(g, back);
    println!("text round-trip ok ({} bytes)", text.len());
}
