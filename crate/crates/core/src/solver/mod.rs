//! One-dimensional DGSEM discretization, numerical flux, entropy correction
//! and explicit time integration.

mod flux;
mod scheme1d;
pub mod time;

use std::fmt;
use std::sync::Arc;

pub use flux::{numerical_flux, rusanov};
pub use scheme1d::{
    semidiscrete_rhs, source_flux_increments, ElementEntropy, RhsDiagnostics, Scheme1D,
};
pub use time::{
    advance, compensated_sum, run, EntropySample, Rates, RunOptions, RunOutput, SemiDiscrete,
    TimeIntegrator,
};

use crate::error::{Error, Result};
use crate::physics::{EntropyMode, SourceVariant, State};
use crate::quadrature::MAX_DEGREE;

/// How the source is integrated against the flux.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureMode {
    /// Nodal source added pointwise.
    Standard,
    /// Source integrated into a global flux `F - h I S`.
    GlobalFlux,
}

/// Interface dissipation of the numerical flux.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dissipation {
    None,
    Rusanov,
}

/// Cell entropy correction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntropyCorrection {
    Off,
    /// Target production from the analytical entropy flux.
    AnalyticalFlux,
    /// Target production from the global flux; vanishes on continuous discrete equilibria.
    GlobalFluxFlux,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub degree: usize,
    /// Weight of the right state in the central part of the interface flux.
    pub flux_alpha: f64,
    pub dissipation: Dissipation,
    pub source_variant: SourceVariant,
    pub quadrature: QuadratureMode,
    pub entropy_correction: EntropyCorrection,
    pub entropy_mode: EntropyMode,
    /// Weight of the right state in the interface entropy flux.
    pub entropy_lambda: f64,
    /// Lower bound on the correction denominator.
    pub entropy_floor: f64,
    /// Explicit integrator; chosen from the degree when `None`.
    pub time_integrator: Option<TimeIntegrator>,
    pub cfl: f64,
}

impl SchemeConfig {
    /// Global-flux quadrature with the modified source.
    pub fn well_balanced(degree: usize) -> Self {
        SchemeConfig {
            degree,
            flux_alpha: 0.5,
            dissipation: Dissipation::Rusanov,
            source_variant: SourceVariant::Modified,
            quadrature: QuadratureMode::GlobalFlux,
            entropy_correction: EntropyCorrection::Off,
            entropy_mode: EntropyMode::Total,
            entropy_lambda: 0.5,
            entropy_floor: 1e-8,
            time_integrator: None,
            cfl: 0.5,
        }
    }

    /// Standard collocated quadrature with the basic source.
    pub fn non_well_balanced(degree: usize) -> Self {
        SchemeConfig {
            source_variant: SourceVariant::Basic,
            quadrature: QuadratureMode::Standard,
            ..SchemeConfig::well_balanced(degree)
        }
    }

    pub fn with_entropy_correction(mut self, c: EntropyCorrection) -> Self {
        self.entropy_correction = c;
        self
    }

    pub fn integrator(&self) -> TimeIntegrator {
        self.time_integrator
            .unwrap_or_else(|| TimeIntegrator::for_degree(self.degree))
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_DEGREE).contains(&self.degree) {
            return Err(Error::UnsupportedDegree(self.degree));
        }
        if !(self.cfl > 0.0) {
            return Err(Error::Config(format!(
                "cfl must be positive, got {}",
                self.cfl
            )));
        }
        if !(0.0..=1.0).contains(&self.flux_alpha) || !(0.0..=1.0).contains(&self.entropy_lambda) {
            return Err(Error::Config("flux weights must lie in [0, 1]".into()));
        }
        if self.entropy_correction == EntropyCorrection::GlobalFluxFlux
            && self.quadrature != QuadratureMode::GlobalFlux
        {
            return Err(Error::Config(
                "global-flux entropy correction needs global-flux quadrature".into(),
            ));
        }
        Ok(())
    }
}

/// Prescribed boundary state as a function of `(x, y, t)`.
pub type BoundaryFn = Arc<dyn Fn(f64, f64, f64) -> State + Send + Sync>;

#[derive(Clone)]
pub enum Boundary {
    Periodic,
    /// Ghost state given by a function; the Riemann solver does the rest.
    Dirichlet(BoundaryFn),
    /// Mirror state with the normal momentum reversed.
    Reflective,
}

impl fmt::Debug for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Boundary::Periodic => f.write_str("Periodic"),
            Boundary::Dirichlet(_) => f.write_str("Dirichlet"),
            Boundary::Reflective => f.write_str("Reflective"),
        }
    }
}

/// Direction of a face normal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

impl Boundary {
    pub fn fixed(s: State) -> Self {
        Boundary::Dirichlet(Arc::new(move |_, _, _| s))
    }

    pub fn dirichlet(f: impl Fn(f64, f64, f64) -> State + Send + Sync + 'static) -> Self {
        Boundary::Dirichlet(Arc::new(f))
    }

    /// Exterior state seen by the face at `(x, y)`.
    pub fn ghost(&self, interior: State, x: f64, y: f64, t: f64, axis: Axis) -> State {
        match self {
            Boundary::Dirichlet(f) => f(x, y, t),
            Boundary::Reflective => match axis {
                Axis::X => State::new(interior.h, -interior.hu, interior.hv),
                Axis::Y => State::new(interior.h, interior.hu, -interior.hv),
            },
            Boundary::Periodic => interior,
        }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self, Boundary::Periodic)
    }
}

/// Boundary conditions at both ends of a 1D domain.
#[derive(Debug, Clone)]
pub struct BoundarySpec {
    pub left: Boundary,
    pub right: Boundary,
}

impl BoundarySpec {
    pub fn periodic() -> Self {
        BoundarySpec {
            left: Boundary::Periodic,
            right: Boundary::Periodic,
        }
    }

    pub fn fixed(left: State, right: State) -> Self {
        BoundarySpec {
            left: Boundary::fixed(left),
            right: Boundary::fixed(right),
        }
    }

    pub fn reflective() -> Self {
        BoundarySpec {
            left: Boundary::Reflective,
            right: Boundary::Reflective,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.left.is_periodic() != self.right.is_periodic() {
            return Err(Error::Config(
                "periodic boundaries must come in pairs".into(),
            ));
        }
        Ok(())
    }
}
