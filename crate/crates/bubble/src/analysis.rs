//! Batch experiments: backbone density sweeps over deployment intensity,
//! degree-sum slope fits, and the check-valve savings report.

use num_rational::Ratio;
use rayon::prelude::*;
use thiserror::Error;

use crate::cds::{self, Algorithm};
use crate::flood;
use crate::udg::{self, DeploymentSpec, Graph};

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("no trials requested")]
    NoTrials,
    #[error("no algorithms requested")]
    NoAlgorithms,
    #[error("expected n = {0} exceeds solver cap {1}")]
    SolverCapExceeded(usize, usize),
    #[error("need at least 3 lambda points for a fit, got {0}")]
    InsufficientPoints(usize),
    #[error("deployment failed: {0}")]
    Deployment(String),
    #[error("election failed: {0}")]
    Election(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub dimension: u8,
    pub length: f64,
    pub lambdas: Vec<f64>,
    pub trials: usize,
    pub algorithms: Vec<Algorithm>,
    pub check_valve: bool,
    pub solver_cap: usize,
    pub seed_base: u64,
}

impl SweepSpec {
    pub fn new_1d(length: f64, lambdas: Vec<f64>, trials: usize) -> SweepSpec {
        SweepSpec {
            dimension: 1,
            length,
            lambdas,
            trials,
            algorithms: vec![Algorithm::WuLi1999, Algorithm::MprCds],
            check_valve: false,
            solver_cap: 20,
            seed_base: 0,
        }
    }
}

/// One aggregate line of a sweep, in CSV column order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub dimension: u8,
    pub length: f64,
    pub lambda: f64,
    pub algorithm: Algorithm,
    pub trials: usize,
    pub mean_size: f64,
    /// Backbone members per unit interior length (1D) or per unit area (2D).
    pub mean_density: f64,
    pub mean_degsum: f64,
    pub flood_formula: f64,
    pub flood_measured: f64,
    /// 95% half-width on the density estimate.
    pub ci95: f64,
    /// Degree sum restricted to members one radio range from the segment
    /// ends; the bulk quantity the slope constants describe. Not a CSV
    /// column.
    pub mean_interior_degsum: f64,
}

pub const CSV_HEADER: &str =
    "dim,ell,lambda,algorithm,trials,mean_size,mean_density,mean_degsum,flood_formula,flood_measured,ci95";

impl SweepRow {
    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4}",
            self.dimension,
            self.length,
            self.lambda,
            self.algorithm.name(),
            self.trials,
            self.mean_size,
            self.mean_density,
            self.mean_degsum,
            self.flood_formula,
            self.flood_measured,
            self.ci95,
        )
    }
}

pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    for r in rows {
        out.push('\n');
        out.push_str(&r.to_csv_line());
    }
    out.push('\n');
    out
}

struct Trial {
    n: usize,
    edges: usize,
    size: usize,
    density: f64,
    degsum: usize,
    interior_degsum: usize,
    formula: Ratio<u64>,
    measured: Ratio<u64>,
}

/// Interior backbone density: nodes at least one radio range from the
/// segment ends, per unit interior length. In 2D the strip is only one
/// unit wide, so the plain per-area count is reported instead.
fn density_of(g: &Graph, members: &[u16], dimension: u8, length: f64) -> f64 {
    match dimension {
        1 => {
            let interior = (length - 2.0).max(f64::MIN_POSITIVE);
            let count = members
                .iter()
                .filter(|&&m| {
                    let (x, _) = g.position(m);
                    x >= 1.0 && x <= length - 1.0
                })
                .count();
            count as f64 / interior
        }
        _ => members.len() as f64 / length,
    }
}

fn run_trial(
    spec: &SweepSpec,
    lambda: f64,
    algorithm: Algorithm,
    trial: usize,
) -> Result<Trial, AnalysisError> {
    let seed = spec
        .seed_base
        .wrapping_add((lambda * 1e6) as u64)
        .wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(trial as u64);
    let dspec = match spec.dimension {
        1 => DeploymentSpec::new_1d(spec.length, lambda, seed),
        _ => DeploymentSpec::new_2d(spec.length, lambda, seed),
    };
    let (g, _) = udg::generate_connected(&dspec, 1000)
        .map_err(|e| AnalysisError::Deployment(e.to_string()))?;
    let result = match algorithm {
        Algorithm::Optimal => cds::optimal_cds(&g, spec.solver_cap),
        Algorithm::WuLi1999 => {
            let views = cds::views_from_graph(&g);
            cds::wu_li_1999(&g, &views)
        }
        Algorithm::MprCds => {
            let views = cds::views_from_graph(&g);
            cds::mpr_cds_from_views(&g, &views)
        }
    }
    .map_err(|e| AnalysisError::Election(e.to_string()))?;
    let formula = flood::flooding_cost_formula(&g, &result.members)
        .map_err(|e| AnalysisError::Election(e.to_string()))?;
    let measured = flood::average_flood_cost(&g, &result.members, spec.check_valve)
        .map_err(|e| AnalysisError::Election(e.to_string()))?;
    if !spec.check_valve {
        debug_assert_eq!(measured, formula);
    }
    let interior_degsum = result
        .members
        .iter()
        .filter(|&&m| {
            let (x, _) = g.position(m);
            spec.dimension != 1 || (x >= 1.0 && x <= spec.length - 1.0)
        })
        .map(|&m| g.degree_of(m))
        .sum();
    Ok(Trial {
        n: g.node_count(),
        edges: g.edge_count(),
        size: result.size,
        density: density_of(&g, &result.members, spec.dimension, spec.length),
        degsum: result.degree_sum,
        interior_degsum,
        formula,
        measured,
    })
}

/// Run the full sweep. Trials execute in parallel; aggregation is a plain
/// ordered sum, so the result is independent of scheduling.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, AnalysisError> {
    if spec.trials == 0 {
        return Err(AnalysisError::NoTrials);
    }
    if spec.algorithms.is_empty() {
        return Err(AnalysisError::NoAlgorithms);
    }
    if spec.algorithms.contains(&Algorithm::Optimal) {
        for &lambda in &spec.lambdas {
            let expected = (lambda * spec.length).round() as usize;
            if expected > spec.solver_cap {
                return Err(AnalysisError::SolverCapExceeded(expected, spec.solver_cap));
            }
        }
    }
    let mut jobs: Vec<(f64, Algorithm)> = Vec::new();
    for &lambda in &spec.lambdas {
        for &algorithm in &spec.algorithms {
            jobs.push((lambda, algorithm));
        }
    }
    let rows: Result<Vec<SweepRow>, AnalysisError> = jobs
        .par_iter()
        .map(|&(lambda, algorithm)| {
            let trials: Result<Vec<Trial>, AnalysisError> = (0..spec.trials)
                .into_par_iter()
                .map(|t| run_trial(spec, lambda, algorithm, t))
                .collect();
            let trials = trials?;
            let k = trials.len() as f64;
            let mean_size = trials.iter().map(|t| t.size as f64).sum::<f64>() / k;
            let mean_density = trials.iter().map(|t| t.density).sum::<f64>() / k;
            let mean_degsum = trials.iter().map(|t| t.degsum as f64).sum::<f64>() / k;
            let mean_interior_degsum =
                trials.iter().map(|t| t.interior_degsum as f64).sum::<f64>() / k;
            let flood_formula =
                trials.iter().map(|t| ratio_f64(t.formula)).sum::<f64>() / k;
            let flood_measured =
                trials.iter().map(|t| ratio_f64(t.measured)).sum::<f64>() / k;
            let var = trials
                .iter()
                .map(|t| (t.density - mean_density).powi(2))
                .sum::<f64>()
                / (k - 1.0).max(1.0);
            let ci95 = 1.96 * (var / k).sqrt();
            Ok(SweepRow {
                dimension: spec.dimension,
                length: spec.length,
                lambda,
                algorithm,
                trials: spec.trials,
                mean_size,
                mean_density,
                mean_degsum,
                flood_formula,
                flood_measured,
                ci95,
                mean_interior_degsum,
            })
        })
        .collect();
    rows
}

fn ratio_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    pub algorithm: Algorithm,
    /// Least-squares slope of mean degree-sum against λ.
    pub slope: f64,
    pub intercept: f64,
    /// slope over the interior length, the per-unit-length bulk constant.
    pub slope_per_length: f64,
}

/// Fit mean interior degree-sum vs λ per algorithm over 1D sweep rows.
/// The slope is normalized by the interior length `ℓ - 2`, since the
/// published constants describe bulk behavior away from the segment ends.
pub fn theorem2_fit(rows: &[SweepRow]) -> Result<Vec<SlopeFit>, AnalysisError> {
    if rows.is_empty() {
        return Err(AnalysisError::InsufficientPoints(0));
    }
    let mut fits = Vec::new();
    let mut algorithms: Vec<Algorithm> = rows.iter().map(|r| r.algorithm).collect();
    algorithms.dedup();
    algorithms.sort_by_key(|a| a.name());
    algorithms.dedup();
    for algorithm in algorithms {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.algorithm == algorithm && r.dimension == 1)
            .map(|r| (r.lambda, r.mean_interior_degsum))
            .collect();
        if pts.len() < 3 {
            return Err(AnalysisError::InsufficientPoints(pts.len()));
        }
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        let intercept = (sy - slope * sx) / n;
        let length = rows
            .iter()
            .find(|r| r.algorithm == algorithm)
            .map(|r| r.length)
            .unwrap_or(1.0);
        let interior = (length - 2.0).max(f64::MIN_POSITIVE);
        fits.push(SlopeFit { algorithm, slope, intercept, slope_per_length: slope / interior });
    }
    Ok(fits)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValveReport {
    pub algorithm: Algorithm,
    pub lambda: f64,
    /// Mean of (valved cost − initiator part) / (unvalved backbone part).
    pub mean_ratio: f64,
    pub ci95: f64,
}

/// Measure how much of the backbone's retransmission bill the check valve
/// saves: a ratio of 1 means no savings, values below 1 mean the valved
/// backbone part shrank. Reported, not asserted.
pub fn check_valve_ratio(spec: &SweepSpec) -> Result<Vec<ValveReport>, AnalysisError> {
    if spec.trials == 0 {
        return Err(AnalysisError::NoTrials);
    }
    let mut reports = Vec::new();
    for &lambda in &spec.lambdas {
        for &algorithm in &spec.algorithms {
            let ratios: Result<Vec<f64>, AnalysisError> = (0..spec.trials)
                .into_par_iter()
                .map(|t| {
                    let mut s = spec.clone();
                    s.check_valve = false;
                    let plain = run_trial(&s, lambda, algorithm, t)?;
                    s.check_valve = true;
                    let valved = run_trial(&s, lambda, algorithm, t)?;
                    // same seed, so both runs see the same graph; split the
                    // formula into initiator part 2E/n and backbone part
                    // (1 - 1/n) * degsum
                    let n = plain.n as f64;
                    let initiator_part = 2.0 * plain.edges as f64 / n;
                    let backbone = (1.0 - 1.0 / n) * plain.degsum as f64;
                    let saved = ratio_f64(valved.measured) - initiator_part;
                    Ok(if backbone > 0.0 { saved / backbone } else { 1.0 })
                })
                .collect();
            let ratios = ratios?;
            let k = ratios.len() as f64;
            let mean = ratios.iter().sum::<f64>() / k;
            let var =
                ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (k - 1.0).max(1.0);
            reports.push(ValveReport {
                algorithm,
                lambda,
                mean_ratio: mean,
                ci95: 1.96 * (var / k).sqrt(),
            });
        }
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_linear_fit_recovered_exactly() {
        let rows: Vec<SweepRow> = [10.0, 15.0, 20.0]
            .iter()
            .map(|&lambda| SweepRow {
                dimension: 1,
                length: 10.0,
                lambda,
                algorithm: Algorithm::WuLi1999,
                trials: 1,
                mean_size: 0.0,
                mean_density: 0.0,
                mean_degsum: 0.0,
                flood_formula: 0.0,
                flood_measured: 0.0,
                ci95: 0.0,
                mean_interior_degsum: 40.0 * lambda + 7.0,
            })
            .collect();
        let fits = theorem2_fit(&rows).unwrap();
        assert_eq!(fits.len(), 1);
        assert!((fits[0].slope - 40.0).abs() < 1e-9);
        assert!((fits[0].intercept - 7.0).abs() < 1e-9);
        assert!((fits[0].slope_per_length - 5.0).abs() < 1e-9);
    }

    #[test]
    fn fit_needs_three_points() {
        let rows: Vec<SweepRow> = vec![];
        assert_eq!(theorem2_fit(&rows).unwrap_err(), AnalysisError::InsufficientPoints(0));
    }

    #[test]
    fn sweep_rejects_bad_specs() {
        let mut s = SweepSpec::new_1d(10.0, vec![10.0], 0);
        assert_eq!(sweep(&s).unwrap_err(), AnalysisError::NoTrials);
        s.trials = 1;
        s.algorithms.clear();
        assert_eq!(sweep(&s).unwrap_err(), AnalysisError::NoAlgorithms);
        let mut s = SweepSpec::new_1d(10.0, vec![10.0], 1);
        s.algorithms = vec![Algorithm::Optimal];
        assert_eq!(
            sweep(&s).unwrap_err(),
            AnalysisError::SolverCapExceeded(100, 20)
        );
    }

    #[test]
    fn sweep_is_deterministic() {
        let s = SweepSpec::new_1d(6.0, vec![4.0, 5.0], 3);
        let a = sweep(&s).unwrap();
        let b = sweep(&s).unwrap();
        assert_eq!(rows_to_csv(&a), rows_to_csv(&b));
        assert!(rows_to_csv(&a).starts_with(CSV_HEADER));
    }

    #[test]
    fn densities_match_expected_constants() {
        let s = SweepSpec::new_1d(10.0, vec![20.0], 8);
        let rows = sweep(&s).unwrap();
        let wu = rows.iter().find(|r| r.algorithm == Algorithm::WuLi1999).unwrap();
        let mpr = rows.iter().find(|r| r.algorithm == Algorithm::MprCds).unwrap();
        assert!(
            (wu.mean_density - 2.0).abs() / 2.0 < 0.15,
            "wu-li density {}",
            wu.mean_density
        );
        assert!(
            (mpr.mean_density - 1.5).abs() / 1.5 < 0.15,
            "mpr density {}",
            mpr.mean_density
        );
    }

    #[test]
    fn degree_slopes_match_expected_constants() {
        let s = SweepSpec::new_1d(10.0, vec![10.0, 15.0, 20.0], 8);
        let rows = sweep(&s).unwrap();
        let fits = theorem2_fit(&rows).unwrap();
        for fit in fits {
            let target = match fit.algorithm {
                Algorithm::WuLi1999 => 4.0,
                Algorithm::MprCds => 3.0,
                Algorithm::Optimal => continue,
            };
            assert!(
                (fit.slope_per_length - target).abs() / target < 0.15,
                "{} slope/l = {}",
                fit.algorithm.name(),
                fit.slope_per_length
            );
        }
    }

    #[test]
    fn optimal_degree_sum_minimal_every_trial() {
        for trial in 0..12 {
            let mut s = SweepSpec::new_1d(5.0, vec![3.0], 1);
            s.seed_base = 1000 + trial;
            s.algorithms = vec![Algorithm::Optimal, Algorithm::WuLi1999, Algorithm::MprCds];
            let t_opt = run_trial(&s, 3.0, Algorithm::Optimal, 0).unwrap();
            let t_wu = run_trial(&s, 3.0, Algorithm::WuLi1999, 0).unwrap();
            let t_mpr = run_trial(&s, 3.0, Algorithm::MprCds, 0).unwrap();
            assert!(t_opt.degsum <= t_wu.degsum, "trial {trial}");
            assert!(t_opt.degsum <= t_mpr.degsum, "trial {trial}");
        }
    }

    #[test]
    fn valve_ratio_in_unit_interval() {
        let mut s = SweepSpec::new_1d(6.0, vec![5.0], 5);
        s.seed_base = 9;
        let reports = check_valve_ratio(&s).unwrap();
        assert_eq!(reports.len(), 2);
        for r in reports {
            assert!(r.mean_ratio > 0.0 && r.mean_ratio <= 1.0, "{r:?}");
        }
    }

    #[test]
    fn measured_equals_formula_without_valve() {
        let s = SweepSpec::new_1d(8.0, vec![4.0], 6);
        for row in sweep(&s).unwrap() {
            assert!((row.flood_measured - row.flood_formula).abs() < 1e-12);
        }
    }
}
