//! Grid-convergence studies on one-dimensional steady cases.

use rayon::prelude::*;

use super::cases::{Case1D, Perturbation};
use super::norms::{error_norms, NodeSet};
use super::relax::relax_to_steady;
use crate::equilibria::{discrete_global_flux_solution, steady_field, SteadyStateSpec};
use crate::error::{Error, Result};
use crate::mesh::Field1D;
use crate::solver::{run, QuadratureMode, RunOptions, SchemeConfig};

/// Errors below this level are treated as round-off and left out of slope fits.
pub const SATURATION: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    /// Discrete steady state of the scheme against the exact equilibrium.
    SteadySolution,
    /// Evolve the projected equilibrium to the given time, then measure.
    FiniteTime(f64),
}

#[derive(Debug, Clone)]
pub struct ConvergenceCell {
    pub p: usize,
    pub n: usize,
    /// L1 errors over all nodes, `(h, hu, hv)`. NaN when the run failed.
    pub all: [f64; 3],
    /// L1 errors over element end points.
    pub end: [f64; 3],
    pub failure: Option<String>,
}

impl ConvergenceCell {
    pub fn saturated(&self) -> bool {
        self.all[0] < SATURATION || self.end[0] < SATURATION
    }
}

/// Least-squares slopes per variable; `None` when fewer than two usable intervals remain.
#[derive(Debug, Clone)]
pub struct SlopeFit {
    pub p: usize,
    pub all: [Option<f64>; 3],
    pub end: [Option<f64>; 3],
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub cells: Vec<ConvergenceCell>,
    pub slopes: Vec<SlopeFit>,
}

impl ConvergenceReport {
    pub fn slope(&self, p: usize) -> Option<&SlopeFit> {
        self.slopes.iter().find(|s| s.p == p)
    }

    pub fn cell(&self, p: usize, n: usize) -> Option<&ConvergenceCell> {
        self.cells.iter().find(|c| c.p == p && c.n == n)
    }
}

/// Observed order `-d log(err) / d log(N)` by least squares over unsaturated points.
pub fn fit_slope(ns: &[usize], errors: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = ns
        .iter()
        .zip(errors)
        .filter(|(_, e)| e.is_finite() && **e >= SATURATION)
        .map(|(n, e)| ((*n as f64).ln(), e.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some(-sxy / sxx)
}

fn steady_spec(case: &Case1D) -> Result<&SteadyStateSpec> {
    case.steady
        .as_ref()
        .ok_or_else(|| Error::Config(format!("case `{}` has no exact steady state", case.name)))
}

fn measure(
    case: &Case1D,
    config: SchemeConfig,
    n: usize,
    target: Target,
) -> Result<([f64; 3], [f64; 3])> {
    let spec = steady_spec(case)?;
    let scheme = case.scheme(config, n)?;
    let field = match target {
        Target::SteadySolution => match scheme.config.quadrature {
            QuadratureMode::GlobalFlux => discrete_global_flux_solution(&scheme, spec)?.field,
            QuadratureMode::Standard => {
                let u0 = case.initial_field(
                    &scheme.mesh,
                    &scheme.basis,
                    &Perturbation::channel(0.0, 0.0),
                )?;
                relax_to_steady(&scheme, &u0, 1e-12, 2_000_000)?
            }
        },
        Target::FiniteTime(t_final) => {
            let u0 = case.initial_field(
                &scheme.mesh,
                &scheme.basis,
                &Perturbation::channel(0.0, 0.0),
            )?;
            let out = run(&scheme, &u0.data, &RunOptions::until(t_final))?;
            Field1D {
                data: out.state,
                ..u0
            }
        }
    };
    let exact = |x: f64| steady_field(spec, x, &case.params);
    let all = error_norms(&field, &scheme.mesh, &scheme.basis, exact, NodeSet::All)?;
    let end = error_norms(&field, &scheme.mesh, &scheme.basis, exact, NodeSet::Ends)?;
    Ok((all, end))
}

/// Runs every `(p, N)` pair, in parallel, and fits slopes per degree.
///
/// Individual run failures are recorded in the cell rather than aborting the study.
pub fn convergence_study(
    case: &Case1D,
    config: impl Fn(usize) -> SchemeConfig + Sync,
    ps: &[usize],
    ns: &[usize],
    target: Target,
) -> Result<ConvergenceReport> {
    steady_spec(case)?;
    let pairs: Vec<(usize, usize)> = ps
        .iter()
        .flat_map(|&p| ns.iter().map(move |&n| (p, n)))
        .collect();
    let cells: Vec<ConvergenceCell> = pairs
        .par_iter()
        .map(|&(p, n)| match measure(case, config(p), n, target) {
            Ok((all, end)) => ConvergenceCell {
                p,
                n,
                all,
                end,
                failure: None,
            },
            Err(e) => ConvergenceCell {
                p,
                n,
                all: [f64::NAN; 3],
                end: [f64::NAN; 3],
                failure: Some(e.to_string()),
            },
        })
        .collect();
    let slopes = ps
        .iter()
        .map(|&p| {
            let row: Vec<&ConvergenceCell> = cells.iter().filter(|c| c.p == p).collect();
            let ns: Vec<usize> = row.iter().map(|c| c.n).collect();
            let fit = |pick: &dyn Fn(&ConvergenceCell) -> f64| {
                let errs: Vec<f64> = row.iter().map(|c| pick(c)).collect();
                fit_slope(&ns, &errs)
            };
            SlopeFit {
                p,
                all: [0, 1, 2].map(|k| fit(&|c| c.all[k])),
                end: [0, 1, 2].map(|k| fit(&|c| c.end[k])),
            }
        })
        .collect();
    Ok(ConvergenceReport { cells, slopes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::cases::lookup;

    #[test]
    fn slope_of_power_law() {
        let ns = [10, 20, 40, 80];
        let errs: Vec<f64> = ns.iter().map(|&n| 3.0 * (n as f64).powi(-3)).collect();
        assert!((fit_slope(&ns, &errs).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn saturated_points_are_dropped() {
        let ns = [10, 20, 40, 80];
        assert!(fit_slope(&ns, &[1e-6, 1e-8, 1e-13, 1e-13]).is_none());
        assert!(fit_slope(&ns, &[1e-4, 1e-6, 1e-8, 1e-14]).is_some());
        assert!(fit_slope(&ns, &[1e-4, f64::NAN, 1e-8, 1e-10]).is_some());
    }

    #[test]
    fn end_nodes_beat_all_nodes_for_p2() {
        let case = lookup("subcritical").unwrap().one_d().unwrap();
        let r = convergence_study(
            &case,
            SchemeConfig::well_balanced,
            &[2],
            &[25, 50],
            Target::SteadySolution,
        )
        .unwrap();
        for c in &r.cells {
            assert!(c.failure.is_none());
            assert!(c.end[0] < c.all[0]);
        }
    }

    #[test]
    fn case_without_equilibrium_is_rejected() {
        let case = lookup("geostrophic_1d").unwrap().one_d().unwrap();
        assert!(convergence_study(
            &case,
            SchemeConfig::well_balanced,
            &[1],
            &[10],
            Target::SteadySolution
        )
        .is_err());
    }
}
