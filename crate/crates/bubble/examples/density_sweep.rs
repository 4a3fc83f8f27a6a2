//! Reproduce the headline constants: backbone density per unit length
//! settles near 2 for the id-based rule and 1.5 for the relay-based rule,
//! and the interior degree-sum grows with slope 4ℓλ / 3ℓλ.
//!
//! Run with: `cargo run --release --example density_sweep`

use bubble::analysis::{self, SweepSpec};

fn main() {
    let mut spec = SweepSpec::new_1d(10.0, vec![10.0, 15.0, 20.0], 20);
    spec.seed_base = 5;
    let rows = analysis::sweep(&spec).unwrap();
    print!("{}", analysis::rows_to_csv(&rows));

    for fit in analysis::theorem2_fit(&rows).unwrap() {
        println!(
            "# {}: degree-sum slope {:.1} per λ, {:.2} per unit interior length",
            fit.algorithm.name(),
            fit.slope,
            fit.slope_per_length
        );
    }

    for report in analysis::check_valve_ratio(&SweepSpec::new_1d(10.0, vec![10.0], 10)).unwrap() {
        println!(
            "# {} check-valve backbone share: {:.3} ± {:.3} of the unvalved cost",
            report.algorithm.name(),
            report.mean_ratio,
            report.ci95
        );
    }
}
