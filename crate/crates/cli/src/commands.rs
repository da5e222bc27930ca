//! Subcommand implementations. Each writes its CSV files into `output_dir`.

use std::fs;
use std::path::{Path, PathBuf};

use balance_dg::equilibria::discrete_global_flux_solution;
use balance_dg::harness::{
    convergence_study, entropy_drift, entropy_timeseries, n_tot_drift, perturbation_experiment,
    relax_to_steady, Case, Case1D, PerturbationSetup, SchemePreset, Target,
};
use balance_dg::output::{
    to_file, write_convergence, write_entropy, write_profile, write_solution_1d, write_solution_2d,
};
use balance_dg::solver::{run, EntropyCorrection, QuadratureMode, RunOptions};
use balance_dg::solver2d::directional_steady_solution;
use balance_dg::{Error, Field1D, Field2D, Result};

use crate::config::{ConvergeTarget, RunConfig};

fn out_dir(cfg: &RunConfig) -> Result<PathBuf> {
    fs::create_dir_all(&cfg.output_dir)?;
    Ok(cfg.output_dir.clone())
}

fn one_d(cfg: &RunConfig) -> Result<Case1D> {
    cfg.case().one_d()
}

fn snapshot_name(t: f64) -> String {
    format!("solution_t{t}.csv")
}

/// Evolves the (perturbed) initial state to `t_final`.
pub fn run_case(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let dir = out_dir(cfg)?;
    let mut written = Vec::new();
    let opts = RunOptions {
        snapshot_times: cfg.snapshot_times.clone(),
        ..RunOptions::until(cfg.t_final()).with_entropy()
    };
    let entropy = match cfg.case() {
        Case::OneD(case) => {
            let scheme = case.scheme(cfg.scheme_config(), cfg.nx)?;
            let mut pert = case.perturbation(cfg.perturbation_amplitude);
            if let Some(x0) = cfg.perturbation_center {
                pert.center.0 = x0;
            }
            let u0 = case.initial_field(&scheme.mesh, &scheme.basis, &pert)?;
            let out = run(&scheme, &u0.data, &opts)?;
            for (t, u) in &out.snapshots {
                let path = dir.join(snapshot_name(*t));
                let f = Field1D {
                    data: u.clone(),
                    ..u0.clone()
                };
                to_file(&path, |w| write_solution_1d(w, &scheme, &f))?;
                written.push(path);
            }
            let f = Field1D {
                data: out.state,
                ..u0
            };
            let path = dir.join("solution.csv");
            to_file(&path, |w| write_solution_1d(w, &scheme, &f))?;
            written.push(path);
            out.entropy
        }
        Case::TwoD(case) => {
            let scheme = case.scheme(cfg.scheme_config(), cfg.nx, cfg.ny.unwrap_or(cfg.nx))?;
            let mut pert = case.perturbation(cfg.perturbation_amplitude);
            if let Some(x0) = cfg.perturbation_center {
                pert.center.0 = x0;
            }
            let u0 = case.initial_field(&scheme.mesh, &scheme.basis, &pert);
            let out = run(&scheme, &u0.data, &opts)?;
            for (t, u) in &out.snapshots {
                let path = dir.join(snapshot_name(*t));
                let f = Field2D {
                    data: u.clone(),
                    ..u0.clone()
                };
                to_file(&path, |w| write_solution_2d(w, &scheme, &f))?;
                written.push(path);
            }
            let f = Field2D {
                data: out.state,
                ..u0
            };
            let path = dir.join("solution.csv");
            to_file(&path, |w| write_solution_2d(w, &scheme, &f))?;
            written.push(path);
            out.entropy
        }
    };
    let path = dir.join("entropy.csv");
    to_file(&path, |w| write_entropy(w, &entropy))?;
    written.push(path);
    Ok(written)
}

/// Discrete steady state of the configured scheme.
pub fn steady(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let dir = out_dir(cfg)?;
    let path = dir.join("solution.csv");
    match cfg.case() {
        Case::OneD(case) => {
            let spec = case.steady.clone().ok_or_else(|| {
                Error::Config(format!("case `{}` has no steady state", case.name))
            })?;
            let scheme = case.scheme(cfg.scheme_config(), cfg.nx)?;
            let field = match cfg.quadrature {
                QuadratureMode::GlobalFlux => discrete_global_flux_solution(&scheme, &spec)?.field,
                QuadratureMode::Standard => {
                    let u0 =
                        case.initial_field(&scheme.mesh, &scheme.basis, &case.perturbation(0.0))?;
                    relax_to_steady(&scheme, &u0, 1e-12, 2_000_000)?
                }
            };
            to_file(&path, |w| write_solution_1d(w, &scheme, &field))?;
        }
        Case::TwoD(case) => {
            let scheme = case.scheme(cfg.scheme_config(), cfg.nx, cfg.ny.unwrap_or(cfg.nx))?;
            let field = match (&case.steady_1d, cfg.quadrature) {
                (Some(spec), QuadratureMode::GlobalFlux) => {
                    directional_steady_solution(&scheme, spec)?
                }
                _ if case.steady => {
                    case.initial_field(&scheme.mesh, &scheme.basis, &case.perturbation(0.0))
                }
                _ => {
                    return Err(Error::Config(format!(
                        "no discrete steady state available for case `{}` with this quadrature",
                        case.name
                    )))
                }
            };
            to_file(&path, |w| write_solution_2d(w, &scheme, &field))?;
        }
    }
    Ok(vec![path])
}

/// Grid convergence over `n_list` at degree `p`.
pub fn converge(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let case = one_d(cfg)?;
    let dir = out_dir(cfg)?;
    let target = match cfg.target {
        ConvergeTarget::Steady => Target::SteadySolution,
        ConvergeTarget::Finite => Target::FiniteTime(cfg.t_final()),
    };
    let base = cfg.scheme_config();
    let report = convergence_study(
        &case,
        |p| balance_dg::SchemeConfig { degree: p, ..base },
        &[cfg.p],
        &cfg.n_list,
        target,
    )?;
    for c in &report.cells {
        if let Some(f) = &c.failure {
            eprintln!("warning: p={} N={} failed: {f}", c.p, c.n);
        }
    }
    let path = dir.join("convergence.csv");
    to_file(&path, |w| write_convergence(w, &report))?;
    Ok(vec![path])
}

/// Perturbation runs with every scheme preset; profiles per preset and snapshot.
pub fn perturb(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let case = one_d(cfg)?;
    let dir = out_dir(cfg)?;
    let setup = PerturbationSetup {
        center: cfg.perturbation_center,
        t_final: Some(cfg.t_final()),
        snapshot_times: cfg.snapshot_times.clone(),
        cfl: Some(cfg.cfl),
        ..PerturbationSetup::new(cfg.p, cfg.nx, cfg.perturbation_amplitude)
    };
    let runs = perturbation_experiment(&case, &setup, &SchemePreset::ALL)?;
    let n_nodes = cfg.p + 1;
    let mut written = Vec::new();
    for r in &runs {
        println!("{} noise={:e}", r.preset.name(), r.noise);
        for (t, dh) in &r.profiles {
            let path = dir.join(format!("profile_{}_t{t}.csv", r.preset.name()));
            to_file(&path, |w| write_profile(w, &r.x, dh, n_nodes))?;
            written.push(path);
        }
    }
    Ok(written)
}

fn entropy_file(
    dir: &Path,
    name: &str,
    cfg: &RunConfig,
    case: &Case1D,
    correction: EntropyCorrection,
) -> Result<PathBuf> {
    let config = cfg.scheme_config().with_entropy_correction(correction);
    let series = entropy_timeseries(
        case,
        config,
        cfg.nx,
        cfg.perturbation_amplitude,
        cfg.t_final(),
    )?;
    println!(
        "{name}: entropy drift {:e}, N_tot drift {:e}",
        entropy_drift(&series),
        n_tot_drift(&series)
    );
    let path = dir.join(name);
    to_file(&path, |w| write_entropy(w, &series))?;
    Ok(path)
}

/// Entropy series of the configured scheme; with a correction on, also the uncorrected reference.
pub fn entropy(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let case = one_d(cfg)?;
    let dir = out_dir(cfg)?;
    let mut written = vec![entropy_file(
        &dir,
        "entropy.csv",
        cfg,
        &case,
        cfg.entropy_correction,
    )?];
    if cfg.entropy_correction != EntropyCorrection::Off {
        written.push(entropy_file(
            &dir,
            "entropy_off.csv",
            cfg,
            &case,
            EntropyCorrection::Off,
        )?);
    }
    Ok(written)
}
