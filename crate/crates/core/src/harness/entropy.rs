//! Entropy bookkeeping over runs and correction-coefficient diagnostics.

use super::cases::Case1D;
use crate::error::{Error, Result};
use crate::mesh::Field1D;
use crate::physics::State;
use crate::solver::{run, EntropySample, RunOptions, SchemeConfig, SemiDiscrete};

/// Evolves the perturbed case with entropy sampling at every step.
pub fn entropy_timeseries(
    case: &Case1D,
    config: SchemeConfig,
    n: usize,
    amplitude: f64,
    t_final: f64,
) -> Result<Vec<EntropySample>> {
    let scheme = case.scheme(config, n)?;
    let u0 = case.initial_field(&scheme.mesh, &scheme.basis, &case.perturbation(amplitude))?;
    Ok(run(
        &scheme,
        &u0.data,
        &RunOptions::until(t_final).with_entropy(),
    )?
    .entropy)
}

/// Largest deviation of the inflow-corrected total entropy from its initial value.
pub fn entropy_drift(series: &[EntropySample]) -> f64 {
    let e0 = series.first().map_or(0.0, |s| s.balance());
    series
        .iter()
        .map(|s| (s.balance() - e0).abs())
        .fold(0.0, f64::max)
}

/// `|N_tot(T) - N_tot(0)|`.
pub fn n_tot_drift(series: &[EntropySample]) -> f64 {
    match (series.first(), series.last()) {
        (Some(a), Some(b)) => (b.n_tot - a.n_tot).abs(),
        _ => 0.0,
    }
}

/// Largest `|alpha_K|` over elements for the nodal projection of the case's equilibrium.
pub fn max_alpha(case: &Case1D, config: SchemeConfig, n: usize) -> Result<f64> {
    let spec = case
        .steady
        .as_ref()
        .ok_or_else(|| Error::Config(format!("case `{}` has no equilibrium", case.name)))?;
    let scheme = case.scheme(config, n)?;
    let u = Field1D::try_from_fn(&scheme.mesh, &scheme.basis, |x| {
        crate::equilibria::steady_field(spec, x, &case.params)
    })?;
    let mut out = vec![State::ZERO; u.data.len()];
    let diag = scheme.rhs_with_diagnostics(0.0, &u.data, &mut out)?;
    Ok(diag
        .elements
        .iter()
        .map(|e| e.alpha.abs())
        .fold(0.0, f64::max))
}

/// Mass bookkeeping of a run: `defect = final - initial - inflow`.
#[derive(Debug, Clone, Copy)]
pub struct MassBalance {
    pub initial: f64,
    pub final_mass: f64,
    /// Time integral of the net boundary mass flux into the domain.
    pub inflow: f64,
    pub defect: f64,
    pub steps: usize,
}

pub fn mass_balance<S: SemiDiscrete + ?Sized>(
    scheme: &S,
    u0: &[State],
    t_final: f64,
) -> Result<MassBalance> {
    let out = run(scheme, u0, &RunOptions::until(t_final))?;
    let initial = scheme.total_mass(u0);
    let final_mass = scheme.total_mass(&out.state);
    let inflow = out.integrated.mass_inflow;
    Ok(MassBalance {
        initial,
        final_mass,
        inflow,
        defect: final_mass - initial - inflow,
        steps: out.steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::cases::lookup;

    fn sample(t: f64, e: f64, n: f64) -> EntropySample {
        EntropySample {
            t,
            total_entropy: e,
            inflow: 0.0,
            n_tot: n,
        }
    }

    #[test]
    fn drift_measures() {
        let s = [
            sample(0.0, 1.0, 1.0),
            sample(1.0, 0.7, 1.1),
            sample(2.0, 0.9, 0.95),
        ];
        assert!((entropy_drift(&s) - 0.3).abs() < 1e-15);
        assert!((n_tot_drift(&s) - 0.05).abs() < 1e-15);
        assert_eq!(entropy_drift(&[]), 0.0);
    }

    #[test]
    fn steady_run_is_flat() {
        let case = lookup("lake_at_rest").unwrap().one_d().unwrap();
        let s = entropy_timeseries(&case, SchemeConfig::well_balanced(2), 20, 0.0, 0.5).unwrap();
        assert!(s.len() > 2);
        assert!(entropy_drift(&s) <= 1e-12 * s[0].total_entropy.abs().max(1.0));
    }

    #[test]
    fn periodic_mass_is_conserved() {
        let case = lookup("coriolis_rest").unwrap().one_d().unwrap();
        let scheme = case
            .scheme(SchemeConfig::well_balanced(2), 20)
            .unwrap()
            .with_boundary(crate::solver::BoundarySpec::periodic())
            .unwrap();
        let u0 = case
            .initial_field(&scheme.mesh, &scheme.basis, &case.perturbation(0.1))
            .unwrap();
        let m = mass_balance(&scheme, &u0.data, 0.2).unwrap();
        assert_eq!(m.inflow, 0.0);
        assert!(m.defect.abs() < 1e-12 * m.initial);
    }
}
