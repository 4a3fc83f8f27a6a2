//! Drive the full protocol stack in the discrete-event simulator from a
//! scripted scenario, then inspect the trace and metrics.
//!
//! Run with: `cargo run --example scenario_run`

use bubble::sim::{self, Scenario};

const SCRIPT: &str = "\
# four members in a row; 2 goes silent, 0 keeps chatting
nodes 4
edge 0 1
edge 1 2
edge 2 3
seed 12
duration 20000000
at 6000000 chat 0 checking in
at 9000000 mute 2
at 12000000 chat 0 anyone there
at 15000000 demute 2 rosebud
";

fn main() {
    let scenario = Scenario::from_text(SCRIPT).unwrap();
    let sim = sim::run(scenario).unwrap();

    // muted members still hear the backbone's floods
    for line in sim.trace.iter().filter(|l| l.contains("kind=chat")) {
        println!("{line}");
    }
    let m = &sim.metrics;
    println!(
        "totals: {} unicasts, {} deliveries, {} duplicates discarded",
        m.unicasts, m.deliveries, m.duplicates
    );

    // the converged election on a path keeps members 0 and 1 in the CDS
    let (_, snap, periods) = sim::converge(
        Scenario::from_text("nodes 3\nedge 0 1\nedge 1 2\nduration 20000000\n").unwrap(),
        10,
    )
    .unwrap();
    println!(
        "3-node path converged in {periods} hello periods, backbone = {:?}",
        snap.cds_members()
    );
}
