//! Shallow water state, fluxes, sources, entropy pair and wave speeds.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Conserved variables `(h, hu, hv)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State {
    pub h: f64,
    pub hu: f64,
    pub hv: f64,
}

impl State {
    pub const ZERO: State = State {
        h: 0.0,
        hu: 0.0,
        hv: 0.0,
    };

    pub const fn new(h: f64, hu: f64, hv: f64) -> Self {
        State { h, hu, hv }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        State::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.h, self.hu, self.hv]
    }

    pub fn u(&self) -> f64 {
        self.hu / self.h
    }

    pub fn v(&self) -> f64 {
        self.hv / self.h
    }

    /// Specific kinetic energy `(u^2 + v^2) / 2`.
    pub fn kinetic(&self) -> f64 {
        let u = self.u();
        let v = self.v();
        0.5 * (u * u + v * v)
    }

    pub fn dot(&self, other: &State) -> f64 {
        self.h * other.h + self.hu * other.hu + self.hv * other.hv
    }

    pub fn max_abs(&self) -> f64 {
        self.h.abs().max(self.hu.abs()).max(self.hv.abs())
    }

    pub fn is_finite(&self) -> bool {
        self.h.is_finite() && self.hu.is_finite() && self.hv.is_finite()
    }

    pub fn component(&self, k: usize) -> f64 {
        match k {
            0 => self.h,
            1 => self.hu,
            _ => self.hv,
        }
    }
}

impl Add for State {
    type Output = State;
    fn add(self, o: State) -> State {
        State::new(self.h + o.h, self.hu + o.hu, self.hv + o.hv)
    }
}

impl Sub for State {
    type Output = State;
    fn sub(self, o: State) -> State {
        State::new(self.h - o.h, self.hu - o.hu, self.hv - o.hv)
    }
}

impl Neg for State {
    type Output = State;
    fn neg(self) -> State {
        State::new(-self.h, -self.hu, -self.hv)
    }
}

impl Mul<f64> for State {
    type Output = State;
    fn mul(self, s: f64) -> State {
        State::new(self.h * s, self.hu * s, self.hv * s)
    }
}

impl Mul<State> for f64 {
    type Output = State;
    fn mul(self, s: State) -> State {
        s * self
    }
}

impl AddAssign for State {
    fn add_assign(&mut self, o: State) {
        self.h += o.h;
        self.hu += o.hu;
        self.hv += o.hv;
    }
}

impl SubAssign for State {
    fn sub_assign(&mut self, o: State) {
        self.h -= o.h;
        self.hu -= o.hu;
        self.hv -= o.hv;
    }
}

/// 3x3 matrix acting on states.
pub type Mat3 = [[f64; 3]; 3];

pub fn mat_vec(m: &Mat3, s: State) -> State {
    let a = s.to_array();
    State::new(
        m[0][0] * a[0] + m[0][1] * a[1] + m[0][2] * a[2],
        m[1][0] * a[0] + m[1][1] * a[1] + m[1][2] * a[2],
        m[2][0] * a[0] + m[2][1] * a[1] + m[2][2] * a[2],
    )
}

type ScalarFn = dyn Fn(f64, f64) -> f64 + Send + Sync;
type GradFn = dyn Fn(f64, f64) -> (f64, f64) + Send + Sync;

/// Bottom topography `b(x, y)` with its gradient. One-dimensional problems ignore `y`.
#[derive(Clone)]
pub struct Bathymetry {
    value: Arc<ScalarFn>,
    grad: Arc<GradFn>,
}

impl fmt::Debug for Bathymetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Bathymetry")
    }
}

impl Bathymetry {
    pub fn new(
        value: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        grad: impl Fn(f64, f64) -> (f64, f64) + Send + Sync + 'static,
    ) -> Self {
        Bathymetry {
            value: Arc::new(value),
            grad: Arc::new(grad),
        }
    }

    pub fn flat() -> Self {
        Bathymetry::new(|_, _| 0.0, |_, _| (0.0, 0.0))
    }

    /// Topography that depends on `x` only.
    pub fn along_x(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        slope: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Bathymetry::new(move |x, _| value(x), move |x, _| (slope(x), 0.0))
    }

    pub fn at(&self, x: f64, y: f64) -> f64 {
        (self.value)(x, y)
    }

    pub fn gradient(&self, x: f64, y: f64) -> (f64, f64) {
        (self.grad)(x, y)
    }
}

/// Coriolis parameter `omega(y) = omega0 + beta * y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coriolis {
    pub omega0: f64,
    pub beta: f64,
}

impl Coriolis {
    pub fn none() -> Self {
        Coriolis {
            omega0: 0.0,
            beta: 0.0,
        }
    }

    pub fn constant(omega: f64) -> Self {
        Coriolis {
            omega0: omega,
            beta: 0.0,
        }
    }

    pub fn beta_plane(omega0: f64, beta: f64) -> Self {
        Coriolis { omega0, beta }
    }

    pub fn at(&self, y: f64) -> f64 {
        self.omega0 + self.beta * y
    }
}

/// Physical parameters of a problem.
#[derive(Debug, Clone)]
pub struct PhysParams {
    pub g: f64,
    pub coriolis: Coriolis,
    /// Linear friction coefficient `c_f`.
    pub friction: f64,
    pub bathymetry: Bathymetry,
}

impl PhysParams {
    pub fn new(g: f64) -> Self {
        PhysParams {
            g,
            coriolis: Coriolis::none(),
            friction: 0.0,
            bathymetry: Bathymetry::flat(),
        }
    }

    pub fn with_bathymetry(mut self, b: Bathymetry) -> Self {
        self.bathymetry = b;
        self
    }

    pub fn with_coriolis(mut self, c: Coriolis) -> Self {
        self.coriolis = c;
        self
    }

    pub fn with_friction(mut self, cf: f64) -> Self {
        self.friction = cf;
        self
    }
}

/// Which entropy is monitored: `g h^2/2 + h k` or the total energy including `g h b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntropyMode {
    Plain,
    Total,
}

/// Source discretization variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceVariant {
    /// `-h (0, g b' + c_f u + omega v, -omega u)` with analytic slopes.
    Basic,
    /// Bathymetry term written as `g zeta d(b) - d(b^2/2)` with discrete derivatives.
    Modified,
}

pub fn flux_x(s: State, g: f64) -> State {
    let u = s.u();
    State::new(s.hu, s.hu * u + 0.5 * g * s.h * s.h, s.hv * u)
}

pub fn flux_y(s: State, g: f64) -> State {
    let v = s.v();
    State::new(s.hv, s.hu * v, s.hv * v + 0.5 * g * s.h * s.h)
}

/// Both directional fluxes, rejecting non-positive depth.
pub fn flux(s: State, g: f64) -> Result<(State, State)> {
    if !(s.h > 0.0) {
        return Err(Error::NonPositiveDepth {
            h: s.h,
            x: f64::NAN,
        });
    }
    Ok((flux_x(s, g), flux_y(s, g)))
}

/// Jacobian of the x-flux with respect to the conserved variables.
pub fn flux_x_jacobian(s: State, g: f64) -> Mat3 {
    let u = s.u();
    let v = s.v();
    [
        [0.0, 1.0, 0.0],
        [g * s.h - u * u, 2.0 * u, 0.0],
        [-u * v, v, u],
    ]
}

/// Largest characteristic speed in x, `|u| + sqrt(g h)`.
pub fn max_wave_speed(s: State, g: f64) -> f64 {
    s.u().abs() + (g * s.h).sqrt()
}

pub fn max_wave_speed_y(s: State, g: f64) -> f64 {
    s.v().abs() + (g * s.h).sqrt()
}

/// Geometric data entering the source at one node.
#[derive(Debug, Clone, Copy, Default)]
pub struct SourceGeometry {
    /// Nodal bathymetry.
    pub b: f64,
    /// Slope of `b`: analytic for the basic variant, discrete for the modified one.
    pub db: f64,
    /// Discrete slope of `b^2/2` (modified variant only).
    pub dpb: f64,
    pub omega: f64,
}

/// Source written as `A U + c`; all supported sources are affine in the state.
#[derive(Debug, Clone, Copy, Default)]
pub struct AffineSource {
    pub a: Mat3,
    pub c: State,
}

impl AffineSource {
    /// Full one-dimensional source: bathymetry, friction on `hu` and both Coriolis terms.
    pub fn one_dimensional(
        geo: &SourceGeometry,
        g: f64,
        friction: f64,
        variant: SourceVariant,
    ) -> Self {
        let mut src = AffineSource::x_direction(geo, g, friction, variant);
        src.a[2] = [0.0, geo.omega, 0.0];
        src
    }

    /// Part of the 2D source integrated along x (acts on `hu` only).
    pub fn x_direction(
        geo: &SourceGeometry,
        g: f64,
        friction: f64,
        variant: SourceVariant,
    ) -> Self {
        let mut a = [[0.0; 3]; 3];
        a[1] = [-g * geo.db, -friction, -geo.omega];
        let c = match variant {
            SourceVariant::Basic => State::ZERO,
            SourceVariant::Modified => State::new(0.0, -(g * geo.b * geo.db - g * geo.dpb), 0.0),
        };
        AffineSource { a, c }
    }

    /// Part of the 2D source integrated along y (acts on `hv` only). Here
    /// `geo.db` and `geo.dpb` are y-derivatives.
    pub fn y_direction(
        geo: &SourceGeometry,
        g: f64,
        friction: f64,
        variant: SourceVariant,
    ) -> Self {
        let mut a = [[0.0; 3]; 3];
        a[2] = [-g * geo.db, geo.omega, -friction];
        let c = match variant {
            SourceVariant::Basic => State::ZERO,
            SourceVariant::Modified => State::new(0.0, 0.0, -(g * geo.b * geo.db - g * geo.dpb)),
        };
        AffineSource { a, c }
    }

    pub fn apply(&self, s: State) -> State {
        mat_vec(&self.a, s) + self.c
    }
}

/// Evaluates the one-dimensional source at a node.
pub fn source(
    s: State,
    geo: &SourceGeometry,
    params: &PhysParams,
    variant: SourceVariant,
) -> State {
    AffineSource::one_dimensional(geo, params.g, params.friction, variant).apply(s)
}

/// Entropy `eta` for the chosen mode.
pub fn entropy(s: State, b: f64, g: f64, mode: EntropyMode) -> f64 {
    let base = 0.5 * g * s.h * s.h + s.h * s.kinetic();
    match mode {
        EntropyMode::Plain => base,
        EntropyMode::Total => base + g * s.h * b,
    }
}

fn head(s: State, b: f64, g: f64, mode: EntropyMode) -> f64 {
    match mode {
        EntropyMode::Plain => g * s.h + s.kinetic(),
        EntropyMode::Total => g * (s.h + b) + s.kinetic(),
    }
}

pub fn entropy_flux_x(s: State, b: f64, g: f64, mode: EntropyMode) -> f64 {
    s.hu * head(s, b, g, mode)
}

pub fn entropy_flux_y(s: State, b: f64, g: f64, mode: EntropyMode) -> f64 {
    s.hv * head(s, b, g, mode)
}

/// Entropy and its x-flux.
pub fn entropy_pair(s: State, b: f64, g: f64, mode: EntropyMode) -> (f64, f64) {
    (entropy(s, b, g, mode), entropy_flux_x(s, b, g, mode))
}

/// Entropy variables `W = d eta / d U`.
pub fn entropy_variables(s: State, b: f64, g: f64, mode: EntropyMode) -> State {
    let first = match mode {
        EntropyMode::Plain => g * s.h - s.kinetic(),
        EntropyMode::Total => g * (s.h + b) - s.kinetic(),
    };
    State::new(first, s.u(), s.v())
}

/// Inverse of the entropy Hessian, `dU/dW`.
pub fn entropy_hessian_inverse(s: State, g: f64) -> Mat3 {
    let u = s.u();
    let v = s.v();
    let gh = g * s.h;
    [
        [1.0 / g, u / g, v / g],
        [u / g, (u * u + gh) / g, u * v / g],
        [v / g, u * v / g, (v * v + gh) / g],
    ]
}

/// Entropy Hessian `d^2 eta / dU^2`.
pub fn entropy_hessian(s: State, g: f64) -> Mat3 {
    let u = s.u();
    let v = s.v();
    let ih = 1.0 / s.h;
    [
        [(g * s.h + u * u + v * v) * ih, -u * ih, -v * ih],
        [-u * ih, ih, 0.0],
        [-v * ih, 0.0, ih],
    ]
}
