//! Small-perturbation experiments on top of equilibria.

use rayon::prelude::*;

use super::cases::{Case1D, Perturbation};
use super::relax::relax_to_steady;
use crate::equilibria::discrete_global_flux_solution;
use crate::error::{Error, Result};
use crate::mesh::Field1D;
use crate::physics::max_wave_speed;
use crate::solver::{run, EntropyCorrection, RunOptions, Scheme1D, SchemeConfig};

/// Scheme variants compared in the perturbation tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemePreset {
    /// Standard quadrature with the basic source.
    Nwb,
    /// Global flux quadrature with the modified source.
    Wb,
    /// `Wb` plus entropy correction with the analytical entropy flux.
    WbEc,
    /// `Wb` plus entropy correction with the discrete global-flux entropy flux.
    WbEcGf,
}

impl SchemePreset {
    pub const ALL: [SchemePreset; 4] = [Self::Nwb, Self::Wb, Self::WbEc, Self::WbEcGf];

    pub fn config(self, p: usize) -> SchemeConfig {
        match self {
            Self::Nwb => SchemeConfig::non_well_balanced(p),
            Self::Wb => SchemeConfig::well_balanced(p),
            Self::WbEc => SchemeConfig::well_balanced(p)
                .with_entropy_correction(EntropyCorrection::AnalyticalFlux),
            Self::WbEcGf => SchemeConfig::well_balanced(p)
                .with_entropy_correction(EntropyCorrection::GlobalFluxFlux),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Nwb => "nwb",
            Self::Wb => "wb",
            Self::WbEc => "wb_ec",
            Self::WbEcGf => "wb_ec_gf",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scheme preset `{s}`")))
    }
}

/// How the unperturbed background state is put on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Initialization {
    /// Nodal values of the exact equilibrium.
    Analytic,
    /// Discrete steady state of the global-flux scheme.
    WbDiscrete,
    /// Discrete steady state of the standard-quadrature scheme, by relaxation.
    NwbDiscrete,
}

impl Initialization {
    pub fn name(self) -> &'static str {
        match self {
            Self::Analytic => "analytic",
            Self::WbDiscrete => "wb_discrete",
            Self::NwbDiscrete => "nwb_discrete",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        [Self::Analytic, Self::WbDiscrete, Self::NwbDiscrete]
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown initialization `{s}`")))
    }
}

#[derive(Debug, Clone)]
pub struct PerturbationSetup {
    pub p: usize,
    pub n: usize,
    pub amplitude: f64,
    /// Defaults to the case's perturbation center.
    pub center: Option<f64>,
    /// Defaults to the case's final time.
    pub t_final: Option<f64>,
    /// Profile output times; the final time is always included.
    pub snapshot_times: Vec<f64>,
    pub init: Initialization,
    /// CFL override for every preset.
    pub cfl: Option<f64>,
}

impl PerturbationSetup {
    pub fn new(p: usize, n: usize, amplitude: f64) -> Self {
        PerturbationSetup {
            p,
            n,
            amplitude,
            center: None,
            t_final: None,
            snapshot_times: Vec::new(),
            init: Initialization::Analytic,
            cfl: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PerturbationRun {
    pub preset: SchemePreset,
    /// Node coordinates.
    pub x: Vec<f64>,
    /// Unperturbed background depth `h*`.
    pub background: Vec<f64>,
    /// `(t, h - h*)` at each requested time.
    pub profiles: Vec<(f64, Vec<f64>)>,
    /// Largest `|h - h*|` seen when the same scheme evolves the unperturbed background.
    pub noise: f64,
    /// Largest `|h - h*|` of the perturbed run at nodes the wave cannot have reached,
    /// or `None` when no such node exists.
    pub far_field_noise: Option<f64>,
}

/// Background field for the requested initialization strategy.
pub fn background_field(
    case: &Case1D,
    p: usize,
    n: usize,
    init: Initialization,
) -> Result<Field1D> {
    let wb = case.scheme(SchemeConfig::well_balanced(p), n)?;
    let analytic = case.initial_field(&wb.mesh, &wb.basis, &Perturbation::channel(0.0, 0.0))?;
    match init {
        Initialization::Analytic => Ok(analytic),
        Initialization::WbDiscrete => {
            let spec = case
                .steady
                .as_ref()
                .ok_or_else(|| Error::Config(format!("case `{}` has no equilibrium", case.name)))?;
            Ok(discrete_global_flux_solution(&wb, spec)?.field)
        }
        Initialization::NwbDiscrete => {
            let nwb = case.scheme(SchemeConfig::non_well_balanced(p), n)?;
            relax_to_steady(&nwb, &analytic, 1e-12, 2_000_000)
        }
    }
}

fn preset_scheme(
    case: &Case1D,
    setup: &PerturbationSetup,
    preset: SchemePreset,
    bg: &Field1D,
) -> Result<Scheme1D> {
    let mut config = preset.config(setup.p);
    if let Some(c) = setup.cfl {
        config.cfl = c;
    }
    let scheme = case.scheme(config, setup.n)?;
    match setup.init {
        Initialization::Analytic => Ok(scheme),
        _ => scheme.with_boundary(case.boundary_from_field(bg)),
    }
}

fn single_run(
    case: &Case1D,
    setup: &PerturbationSetup,
    preset: SchemePreset,
    bg: &Field1D,
) -> Result<PerturbationRun> {
    let scheme = preset_scheme(case, setup, preset, bg)?;
    let t_final = setup.t_final.unwrap_or(case.t_final);
    let center = setup.center.unwrap_or(case.perturbation_center);
    let pert = Perturbation::channel(setup.amplitude, center);

    let mut u0 = bg.clone();
    for (s, x) in u0.data.iter_mut().zip(&scheme.x) {
        s.h += pert.at_x(*x);
    }
    let mut times = setup.snapshot_times.clone();
    times.push(t_final);
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    times.dedup();
    let out = run(
        &scheme,
        &u0.data,
        &RunOptions {
            snapshot_times: times,
            ..RunOptions::until(t_final)
        },
    )?;
    let profiles: Vec<(f64, Vec<f64>)> = out
        .snapshots
        .iter()
        .map(|(t, u)| (*t, u.iter().zip(&bg.data).map(|(a, b)| a.h - b.h).collect()))
        .collect();

    // background noise: the same scheme without the perturbation
    let checks: Vec<f64> = (1..=10).map(|k| t_final * k as f64 / 10.0).collect();
    let quiet = run(
        &scheme,
        &bg.data,
        &RunOptions {
            snapshot_times: checks,
            ..RunOptions::until(t_final)
        },
    )?;
    let noise = quiet
        .snapshots
        .iter()
        .flat_map(|(_, u)| u.iter().zip(&bg.data).map(|(a, b)| (a.h - b.h).abs()))
        .fold(0.0, f64::max);

    let speed = bg
        .data
        .iter()
        .map(|s| max_wave_speed(*s, scheme.params.g))
        .fold(0.0, f64::max);
    let sigma = (0.5 / pert.rate).sqrt();
    let reach = 5.0 * sigma + speed * t_final;
    let far: Vec<f64> = scheme
        .x
        .iter()
        .zip(out.state.iter().zip(&bg.data))
        .filter(|(x, _)| (**x - center).abs() > reach)
        .map(|(_, (a, b))| (a.h - b.h).abs())
        .collect();
    let far_field_noise = (!far.is_empty()).then(|| far.iter().copied().fold(0.0, f64::max));

    Ok(PerturbationRun {
        preset,
        x: scheme.x.clone(),
        background: bg.data.iter().map(|s| s.h).collect(),
        profiles,
        noise,
        far_field_noise,
    })
}

/// Evolves `h* + xi exp(-(x - x0)^2 / 100)` with each preset, in parallel.
pub fn perturbation_experiment(
    case: &Case1D,
    setup: &PerturbationSetup,
    presets: &[SchemePreset],
) -> Result<Vec<PerturbationRun>> {
    let bg = background_field(case, setup.p, setup.n, setup.init)?;
    presets
        .par_iter()
        .map(|&preset| single_run(case, setup, preset, &bg))
        .collect()
}

/// Runs the experiment for every initialization strategy.
pub fn initialization_comparison(
    case: &Case1D,
    setup: &PerturbationSetup,
    presets: &[SchemePreset],
) -> Result<Vec<(Initialization, Vec<PerturbationRun>)>> {
    [
        Initialization::Analytic,
        Initialization::WbDiscrete,
        Initialization::NwbDiscrete,
    ]
    .into_iter()
    .map(|init| {
        let s = PerturbationSetup {
            init,
            ..setup.clone()
        };
        Ok((init, perturbation_experiment(case, &s, presets)?))
    })
    .collect()
}
