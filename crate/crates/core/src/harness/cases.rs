//! Catalog of the benchmark problems.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::equilibria::{
    critical_depth, steady_field, Branch, FrictionProfile, Regime, SteadyStateSpec,
};
use crate::error::{Error, Result};
use crate::mesh::{Field1D, Field2D, Mesh1D, Mesh2D};
use crate::physics::{Bathymetry, Coriolis, PhysParams, State};
use crate::quadrature::GLBasis;
use crate::solver::{Boundary, BoundarySpec, Scheme1D, SchemeConfig};
use crate::solver2d::{BoundarySpec2D, Scheme2D};

/// Standard gravity used by the channel-flow cases.
pub const GRAVITY: f64 = 9.80665;

pub type InitialFn1D = Arc<dyn Fn(f64) -> State + Send + Sync>;
pub type InitialFn2D = Arc<dyn Fn(f64, f64) -> State + Send + Sync>;

/// Gaussian bump on the depth, `amplitude * exp(-rate * |x - center|^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perturbation {
    pub amplitude: f64,
    pub center: (f64, f64),
    pub rate: f64,
}

impl Perturbation {
    /// One-dimensional perturbation `xi exp(-(x - x0)^2 / 100)`.
    pub fn channel(amplitude: f64, x0: f64) -> Self {
        Perturbation {
            amplitude,
            center: (x0, 0.0),
            rate: 0.01,
        }
    }

    pub fn at(&self, x: f64, y: f64) -> f64 {
        let dx = x - self.center.0;
        let dy = y - self.center.1;
        self.amplitude * (-self.rate * (dx * dx + dy * dy)).exp()
    }

    pub fn at_x(&self, x: f64) -> f64 {
        let dx = x - self.center.0;
        self.amplitude * (-self.rate * dx * dx).exp()
    }
}

#[derive(Debug, Clone)]
pub enum CaseBoundary1D {
    /// Dirichlet data from the unperturbed state at both ends.
    Steady,
    Fixed(State, State),
    Periodic,
}

/// A one-dimensional benchmark.
#[derive(Clone)]
pub struct Case1D {
    pub name: &'static str,
    pub domain: (f64, f64),
    pub params: PhysParams,
    pub steady: Option<SteadyStateSpec>,
    /// Unperturbed initial state; equals the steady state when there is one.
    pub initial: InitialFn1D,
    pub boundary: CaseBoundary1D,
    pub t_final: f64,
    pub perturbation_center: f64,
    pub default_n: usize,
}

/// A two-dimensional benchmark.
#[derive(Clone)]
pub struct Case2D {
    pub name: &'static str,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub params: PhysParams,
    pub initial: InitialFn2D,
    /// Whether `initial` is an exact steady state.
    pub steady: bool,
    /// One-dimensional equilibrium along x, extended in y.
    pub steady_1d: Option<SteadyStateSpec>,
    pub boundary: BoundarySpec2D,
    pub t_final: f64,
    pub perturbation: Perturbation,
    pub default_n: (usize, usize),
}

#[derive(Clone)]
pub enum Case {
    OneD(Case1D),
    TwoD(Case2D),
}

impl Case {
    pub fn name(&self) -> &'static str {
        match self {
            Case::OneD(c) => c.name,
            Case::TwoD(c) => c.name,
        }
    }

    pub fn t_final(&self) -> f64 {
        match self {
            Case::OneD(c) => c.t_final,
            Case::TwoD(c) => c.t_final,
        }
    }

    pub fn one_d(self) -> Result<Case1D> {
        match self {
            Case::OneD(c) => Ok(c),
            Case::TwoD(c) => Err(Error::Config(format!(
                "case `{}` is two-dimensional",
                c.name
            ))),
        }
    }

    pub fn two_d(self) -> Result<Case2D> {
        match self {
            Case::TwoD(c) => Ok(c),
            Case::OneD(c) => Err(Error::Config(format!(
                "case `{}` is one-dimensional",
                c.name
            ))),
        }
    }
}

impl Case1D {
    pub fn mesh(&self, n: usize) -> Result<Mesh1D> {
        Mesh1D::new(self.domain.0, self.domain.1, n)
    }

    /// Unperturbed state at `x`.
    pub fn base_state(&self, x: f64) -> Result<State> {
        match &self.steady {
            Some(spec) => steady_field(spec, x, &self.params),
            None => Ok((self.initial)(x)),
        }
    }

    /// Nodal projection of the perturbed initial state.
    pub fn initial_field(
        &self,
        mesh: &Mesh1D,
        basis: &GLBasis,
        pert: &Perturbation,
    ) -> Result<Field1D> {
        Field1D::try_from_fn(mesh, basis, |x| {
            let mut s = self.base_state(x)?;
            s.h += pert.at_x(x);
            Ok(s)
        })
    }

    pub fn boundary(&self) -> Result<BoundarySpec> {
        Ok(match &self.boundary {
            CaseBoundary1D::Steady => BoundarySpec::fixed(
                self.base_state(self.domain.0)?,
                self.base_state(self.domain.1)?,
            ),
            CaseBoundary1D::Fixed(l, r) => BoundarySpec::fixed(*l, *r),
            CaseBoundary1D::Periodic => BoundarySpec::periodic(),
        })
    }

    /// Dirichlet data taken from the end states of a nodal field.
    pub fn boundary_from_field(&self, field: &Field1D) -> BoundarySpec {
        match self.boundary {
            CaseBoundary1D::Periodic => BoundarySpec::periodic(),
            _ => BoundarySpec::fixed(field.first(), field.last()),
        }
    }

    pub fn scheme(&self, config: SchemeConfig, n: usize) -> Result<Scheme1D> {
        Scheme1D::new(self.mesh(n)?, config, self.params.clone(), self.boundary()?)
    }

    pub fn perturbation(&self, amplitude: f64) -> Perturbation {
        Perturbation::channel(amplitude, self.perturbation_center)
    }
}

impl Case2D {
    pub fn mesh(&self, nx: usize, ny: usize) -> Result<Mesh2D> {
        Mesh2D::new(self.x_range, self.y_range, nx, ny)
    }

    pub fn initial_field(&self, mesh: &Mesh2D, basis: &GLBasis, pert: &Perturbation) -> Field2D {
        Field2D::from_fn(mesh, basis, |x, y| {
            let mut s = (self.initial)(x, y);
            s.h += pert.at(x, y);
            s
        })
    }

    pub fn scheme(&self, config: SchemeConfig, nx: usize, ny: usize) -> Result<Scheme2D> {
        Scheme2D::new(
            self.mesh(nx, ny)?,
            config,
            self.params.clone(),
            self.boundary.clone(),
        )
    }

    pub fn perturbation(&self, amplitude: f64) -> Perturbation {
        Perturbation {
            amplitude,
            ..self.perturbation
        }
    }
}

/// Parabolic bump `0.2 - 0.05 (x - 10)^2` on `8 < x < 12`.
pub fn bump_bathymetry() -> Bathymetry {
    Bathymetry::along_x(
        |x| {
            if x > 8.0 && x < 12.0 {
                0.2 - 0.05 * (x - 10.0) * (x - 10.0)
            } else {
                0.0
            }
        },
        |x| {
            if x > 8.0 && x < 12.0 {
                -0.1 * (x - 10.0)
            } else {
                0.0
            }
        },
    )
}

/// Five parabolic bumps, each on `4.5k - 3 < x < 4.5k + 1.5`.
pub fn five_bump_bathymetry() -> Bathymetry {
    fn bump(x: f64) -> (f64, f64) {
        for k in 1..=5 {
            let k = k as f64;
            if x > 4.5 * k - 3.0 && x < 4.5 * k + 1.5 {
                let c = 4.5 * k - 0.75;
                return (0.2 - (x - c) * (x - c) / 20.0, -(x - c) / 10.0);
            }
        }
        (0.0, 0.0)
    }
    Bathymetry::along_x(|x| bump(x).0, |x| bump(x).1)
}

fn channel(name: &'static str, steady: SteadyStateSpec, params: PhysParams, x0: f64) -> Case1D {
    let spec = steady.clone();
    let p = params.clone();
    Case1D {
        name,
        domain: (0.0, 25.0),
        params,
        steady: Some(steady),
        initial: Arc::new(move |x| {
            steady_field(&spec, x, &p).unwrap_or(State::new(f64::NAN, 0.0, 0.0))
        }),
        boundary: CaseBoundary1D::Steady,
        t_final: 1.5,
        perturbation_center: x0,
        default_n: 50,
    }
}

/// Energy of the transcritical flow: critical at the crest of the bump.
pub fn transcritical_energy(q0: f64, g: f64) -> f64 {
    g * (0.2 + 1.5 * critical_depth(q0, g))
}

fn friction_case(name: &'static str, e0: f64, branch: Branch, cf: f64, x0: f64) -> Result<Case1D> {
    let params = PhysParams::new(GRAVITY)
        .with_bathymetry(bump_bathymetry())
        .with_friction(cf);
    let prof = FrictionProfile::new(
        4.42,
        e0,
        branch,
        &params,
        0.0,
        25.0,
        25.0 / 16384.0,
        &[8.0, 10.0, 12.0],
    )?;
    Ok(channel(
        name,
        SteadyStateSpec::Friction(Arc::new(prof)),
        params,
        x0,
    ))
}

/// Names of all cases.
pub const CASE_NAMES: &[&str] = &[
    "lake_at_rest",
    "subcritical",
    "supercritical",
    "transcritical",
    "coriolis_rest",
    "coriolis_moving",
    "friction_subcritical",
    "friction_supercritical",
    "geostrophic_1d",
    "lake_at_rest_2d",
    "equilibrium_1d_in_2d",
    "vortex",
    "geostrophic_2d",
    "kelvin_front",
];

/// Stationary vortex free surface `h + b` as a function of the radius.
fn vortex_surface(r: f64, xi: f64) -> f64 {
    let x2 = xi * xi;
    let extra = if r <= 0.2 {
        2.5 * (1.0 + 5.0 * x2) * r * r
    } else if r <= 0.4 {
        0.1 * (1.0 + 5.0 * x2) + 2.0 * r - 0.3 - 2.5 * r * r
            + x2 * (4.0 * (5.0 * r).ln() + 3.5 - 20.0 * r + 12.5 * r * r)
    } else {
        0.2 * (1.0 - 10.0 * x2 + 20.0 * x2 * 2f64.ln())
    };
    1.0 + x2 * extra
}

fn vortex_speed_factor(r: f64) -> f64 {
    if r <= 0.2 {
        5.0
    } else if r <= 0.4 {
        2.0 / r - 5.0
    } else {
        0.0
    }
}

/// Vortex bathymetry `0.1 (1 - 6.25 r^2)` for `r^2 < 0.16`.
pub fn vortex_bathymetry() -> Bathymetry {
    Bathymetry::new(
        |x, y| {
            let r2 = x * x + y * y;
            if r2 < 0.16 {
                0.1 * (1.0 - 6.25 * r2)
            } else {
                0.0
            }
        },
        |x, y| {
            if x * x + y * y < 0.16 {
                (-1.25 * x, -1.25 * y)
            } else {
                (0.0, 0.0)
            }
        },
    )
}

/// Stationary vortex state with amplitude `xi`.
pub fn vortex_state(x: f64, y: f64, xi: f64) -> State {
    let r = (x * x + y * y).sqrt();
    let b = vortex_bathymetry().at(x, y);
    let h = vortex_surface(r, xi) - b;
    let f = vortex_speed_factor(r);
    State::new(h, -xi * y * f * h, xi * x * f * h)
}

pub const VORTEX_XI: f64 = 0.1;

/// Looks up a case by name.
pub fn lookup(name: &str) -> Result<Case> {
    let g = GRAVITY;
    let bump = || PhysParams::new(g).with_bathymetry(bump_bathymetry());
    Ok(match name {
        "lake_at_rest" => Case::OneD(channel(
            "lake_at_rest",
            SteadyStateSpec::LakeAtRest { zeta0: 2.0 },
            bump(),
            10.0,
        )),
        "subcritical" => Case::OneD(channel(
            "subcritical",
            SteadyStateSpec::Moving {
                q0: 4.42,
                e0: 22.05535,
                regime: Regime::Fixed(Branch::Subcritical),
            },
            bump(),
            10.0,
        )),
        "supercritical" => Case::OneD(channel(
            "supercritical",
            SteadyStateSpec::Moving {
                q0: 4.42,
                e0: 28.8971,
                regime: Regime::Fixed(Branch::Supercritical),
            },
            bump(),
            6.25,
        )),
        "transcritical" => Case::OneD(channel(
            "transcritical",
            SteadyStateSpec::Moving {
                q0: 1.53,
                e0: transcritical_energy(1.53, g),
                regime: Regime::Transcritical { x_crit: 10.0 },
            },
            bump(),
            6.25,
        )),
        "coriolis_rest" => {
            let params = PhysParams::new(1.0).with_coriolis(Coriolis::constant(2.0));
            let mut c = channel(
                "coriolis_rest",
                SteadyStateSpec::CoriolisRest {
                    zeta0: 2.0,
                    x0: -5.0,
                },
                params,
                0.0,
            );
            c.domain = (-5.0, 5.0);
            c.t_final = 2.0;
            Case::OneD(c)
        }
        "coriolis_moving" => {
            // The manufactured flow has v = -x for unit rotation; with the
            // source sign used here this means omega = -1.
            let w = -1.0;
            let params = PhysParams::new(1.0)
                .with_coriolis(Coriolis::constant(w))
                .with_bathymetry(Bathymetry::along_x(
                    move |x| -0.5 * w * w * x * x - (2.0 * x).exp() - 0.5 * (-4.0 * x).exp(),
                    move |x| -w * w * x - 2.0 * (2.0 * x).exp() + 2.0 * (-4.0 * x).exp(),
                ));
            let mut c = channel(
                "coriolis_moving",
                SteadyStateSpec::CoriolisMoving,
                params,
                0.5,
            );
            c.domain = (0.0, 1.0);
            c.t_final = 1.0;
            c.default_n = 10;
            Case::OneD(c)
        }
        "friction_subcritical" => Case::OneD(friction_case(
            "friction_subcritical",
            22.05535,
            Branch::Subcritical,
            0.03,
            10.0,
        )?),
        "friction_supercritical" => Case::OneD(friction_case(
            "friction_supercritical",
            28.8971,
            Branch::Supercritical,
            0.05,
            6.25,
        )?),
        "geostrophic_1d" => {
            let l = 2.0;
            let t2 = 2f64.tanh();
            let init: InitialFn1D = Arc::new(move |x| {
                let v =
                    2.0 * (1.0 + (4.0 * x / l + 2.0).tanh()) * (1.0 - (4.0 * x / l - 2.0).tanh())
                        / ((1.0 + t2) * (1.0 + t2));
                State::new(1.0, 0.0, v)
            });
            Case::OneD(Case1D {
                name: "geostrophic_1d",
                domain: (-10.0, 15.0),
                params: PhysParams::new(1.0).with_coriolis(Coriolis::constant(1.0)),
                steady: None,
                initial: init,
                boundary: CaseBoundary1D::Fixed(
                    State::new(1.0, 0.0, 0.0),
                    State::new(1.0, 0.0, 0.0),
                ),
                t_final: 2.0 * PI,
                perturbation_center: 0.0,
                default_n: 200,
            })
        }
        "lake_at_rest_2d" => {
            let params = PhysParams::new(g).with_bathymetry(five_bump_bathymetry());
            let b = params.bathymetry.clone();
            let init: InitialFn2D = Arc::new(move |x, y| State::new(5.47 - b.at(x, y), 0.0, 0.0));
            let bc = init.clone();
            Case::TwoD(Case2D {
                name: "lake_at_rest_2d",
                x_range: (0.0, 25.0),
                y_range: (0.0, 25.0),
                params,
                initial: init,
                steady: true,
                steady_1d: Some(SteadyStateSpec::LakeAtRest { zeta0: 5.47 }),
                boundary: BoundarySpec2D::all(Boundary::dirichlet(move |x, y, _| bc(x, y))),
                t_final: 2.0,
                perturbation: Perturbation {
                    amplitude: 0.05,
                    center: (10.0, 12.5),
                    rate: 100.0,
                },
                default_n: (50, 50),
            })
        }
        "equilibrium_1d_in_2d" => {
            let params = PhysParams::new(g).with_bathymetry(five_bump_bathymetry());
            let spec = SteadyStateSpec::Moving {
                q0: 5.6865,
                e0: 54.183738,
                regime: Regime::Fixed(Branch::Subcritical),
            };
            let (s, p) = (spec.clone(), params.clone());
            let init: InitialFn2D = Arc::new(move |x, _| {
                steady_field(&s, x, &p).unwrap_or(State::new(f64::NAN, 0.0, 0.0))
            });
            let bc = init.clone();
            let dirichlet = Boundary::dirichlet(move |x, y, _| bc(x, y));
            Case::TwoD(Case2D {
                name: "equilibrium_1d_in_2d",
                x_range: (0.0, 25.0),
                y_range: (0.0, 25.0),
                params,
                initial: init,
                steady: true,
                steady_1d: Some(spec),
                boundary: BoundarySpec2D {
                    left: dirichlet.clone(),
                    right: dirichlet,
                    bottom: Boundary::Periodic,
                    top: Boundary::Periodic,
                },
                t_final: 2.0,
                perturbation: Perturbation {
                    amplitude: 0.05,
                    center: (10.0, 12.5),
                    rate: 100.0,
                },
                default_n: (50, 50),
            })
        }
        "vortex" => {
            let xi = VORTEX_XI;
            // Radial balance of the vortex data holds for g = 1/xi^2 and
            // omega = -1/xi with the source sign convention used here.
            let params = PhysParams::new(1.0 / (xi * xi))
                .with_coriolis(Coriolis::constant(-1.0 / xi))
                .with_bathymetry(vortex_bathymetry());
            let h_far = 1.0 + 0.2 * xi * xi * (1.0 - 10.0 * xi * xi + 20.0 * xi * xi * 2f64.ln());
            Case::TwoD(Case2D {
                name: "vortex",
                x_range: (-1.0, 1.0),
                y_range: (-1.0, 1.0),
                params,
                initial: Arc::new(move |x, y| vortex_state(x, y, xi)),
                steady: true,
                steady_1d: None,
                boundary: BoundarySpec2D::all(Boundary::fixed(State::new(h_far, 0.0, 0.0))),
                t_final: 0.05,
                perturbation: Perturbation {
                    amplitude: 1e-3,
                    center: (0.0, 0.0),
                    rate: 100.0,
                },
                default_n: (50, 50),
            })
        }
        "geostrophic_2d" => Case::TwoD(Case2D {
            name: "geostrophic_2d",
            x_range: (-10.0, 10.0),
            y_range: (-10.0, 10.0),
            params: PhysParams::new(1.0).with_coriolis(Coriolis::constant(1.0)),
            initial: Arc::new(|x, y| {
                let r = (2.5 * x * x + y * y / 2.5).sqrt();
                State::new(1.0 + 0.25 * (1.0 - ((r - 1.0) / 0.1).tanh()), 0.0, 0.0)
            }),
            steady: false,
            steady_1d: None,
            boundary: BoundarySpec2D::all(Boundary::fixed(State::new(1.0, 0.0, 0.0))),
            t_final: 20.0,
            perturbation: Perturbation {
                amplitude: 0.0,
                center: (0.0, 0.0),
                rate: 1.0,
            },
            default_n: (50, 50),
        }),
        "kelvin_front" => {
            let b = Bathymetry::along_x(
                |x| if x <= 40.0 { 0.0 } else { 0.025 * x - 1.0 },
                |x| if x <= 40.0 { 0.0 } else { 0.025 },
            );
            let params = PhysParams::new(1.0)
                .with_coriolis(Coriolis::beta_plane(-6.0, 1.0))
                .with_bathymetry(b.clone());
            let init: InitialFn2D = Arc::new(move |x, y| {
                let bx = b.at(x, y);
                let d2 = (x - 30.0) * (x - 30.0) + (y - 6.0) * (y - 6.0);
                State::new(2.0 - bx + 0.8 * (-d2 / 3.0).exp(), 0.0, 0.0)
            });
            let bc = init.clone();
            let dirichlet = Boundary::dirichlet(move |x, y, _| bc(x, y));
            Case::TwoD(Case2D {
                name: "kelvin_front",
                x_range: (0.0, 70.0),
                y_range: (0.0, 12.0),
                params,
                initial: init,
                steady: false,
                steady_1d: None,
                boundary: BoundarySpec2D {
                    left: dirichlet.clone(),
                    right: dirichlet,
                    bottom: Boundary::Reflective,
                    top: Boundary::Reflective,
                },
                t_final: 20.0,
                perturbation: Perturbation {
                    amplitude: 0.0,
                    center: (0.0, 0.0),
                    rate: 1.0,
                },
                default_n: (140, 24),
            })
        }
        other => return Err(Error::UnknownCase(other.to_string())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn every_name_resolves() {
        for name in CASE_NAMES {
            let c = lookup(name).unwrap();
            assert_eq!(c.name(), *name);
        }
        assert!(matches!(lookup("nope"), Err(Error::UnknownCase(_))));
    }

    #[test]
    fn channel_steady_values() {
        let c = lookup("subcritical").unwrap().one_d().unwrap();
        let s = c.base_state(0.0).unwrap();
        assert_abs_diff_eq!(s.h, 2.0, epsilon = 1e-4);
        assert_eq!(s.hu, 4.42);
        let sup = lookup("supercritical").unwrap().one_d().unwrap();
        assert_abs_diff_eq!(sup.base_state(0.0).unwrap().h, 0.66, epsilon = 1e-6);
    }

    #[test]
    fn transcritical_is_critical_at_crest() {
        let c = lookup("transcritical").unwrap().one_d().unwrap();
        let s = c.base_state(10.0).unwrap();
        assert_abs_diff_eq!(s.h, critical_depth(1.53, GRAVITY), epsilon = 1e-12);
        let up = c.base_state(5.0).unwrap();
        let down = c.base_state(15.0).unwrap();
        assert!(up.h > down.h);
    }

    #[test]
    fn coriolis_moving_matches_manufactured_data() {
        let c = lookup("coriolis_moving").unwrap().one_d().unwrap();
        assert_eq!(c.base_state(0.0).unwrap(), State::new(1.0, 1.0, 0.0));
        let x = 0.7f64;
        let s = c.base_state(x).unwrap();
        assert_abs_diff_eq!(s.hv, -x * (2.0 * x).exp(), epsilon = 1e-14);
        // Energy g zeta + k is constant (zero).
        let b = c.params.bathymetry.at(x, 0.0);
        assert_abs_diff_eq!(s.h + b + s.kinetic(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn perturbation_shape() {
        let p = Perturbation::channel(1e-3, 10.0);
        assert_abs_diff_eq!(p.at_x(10.0), 1e-3);
        assert_abs_diff_eq!(p.at_x(20.0), 1e-3 * (-1.0f64).exp(), epsilon = 1e-18);
    }

    #[test]
    fn vortex_far_field_is_constant() {
        let s = vortex_state(0.9, 0.1, VORTEX_XI);
        let t = vortex_state(-0.5, 0.6, VORTEX_XI);
        assert_abs_diff_eq!(s.h, t.h, epsilon = 1e-15);
        assert_eq!(s.hu, 0.0);
    }

    #[test]
    fn vortex_surface_is_continuous() {
        for r in [0.2, 0.4] {
            let a = vortex_surface(r - 1e-12, VORTEX_XI);
            let b = vortex_surface(r + 1e-12, VORTEX_XI);
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }
}
