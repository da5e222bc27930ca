//! Analytical steady states and their discrete global-flux counterparts.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::mesh::Field1D;
use crate::physics::{flux_x, flux_x_jacobian, PhysParams, State};
use crate::solver::Scheme1D;

/// Root of the depth-energy relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Subcritical,
    Supercritical,
}

/// Which branch a moving steady state follows along the channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime {
    Fixed(Branch),
    /// Subcritical upstream of `x_crit`, supercritical downstream.
    Transcritical {
        x_crit: f64,
    },
}

impl Regime {
    pub fn branch_at(&self, x: f64) -> Branch {
        match *self {
            Regime::Fixed(b) => b,
            Regime::Transcritical { x_crit } if x < x_crit => Branch::Subcritical,
            Regime::Transcritical { .. } => Branch::Supercritical,
        }
    }
}

#[derive(Debug, Clone)]
pub enum SteadyStateSpec {
    /// `zeta = zeta0`, no motion.
    LakeAtRest { zeta0: f64 },
    /// Frictionless flow with constant discharge and energy.
    Moving { q0: f64, e0: f64, regime: Regime },
    /// Geostrophic balance with `u = 0` and `v = (g x / 2) exp(-x^2)`.
    CoriolisRest { zeta0: f64, x0: f64 },
    /// Manufactured Coriolis flow: `h = exp(2x)`, `hu = 1`, `hv = omega x exp(2x)`.
    CoriolisMoving,
    /// Flow with linear friction, energy integrated along the channel.
    Friction(Arc<FrictionProfile>),
}

impl SteadyStateSpec {
    pub fn branch_at(&self, x: f64) -> Branch {
        match self {
            SteadyStateSpec::Moving { regime, .. } => regime.branch_at(x),
            SteadyStateSpec::Friction(p) => p.branch,
            _ => Branch::Subcritical,
        }
    }
}

/// Critical depth `(q^2/g)^(1/3)`.
pub fn critical_depth(q0: f64, g: f64) -> f64 {
    (q0 * q0 / g).cbrt()
}

/// Smallest energy `g (h + b) + q^2 / (2 h^2)` reachable at bathymetry `b`.
pub fn critical_energy(q0: f64, b: f64, g: f64) -> f64 {
    g * b + 1.5 * g * critical_depth(q0, g)
}

/// Solves `g (h + b) + q0^2 / (2 h^2) = e0` for `h` on the requested branch.
pub fn solve_depth_from_energy(q0: f64, e0: f64, b: f64, g: f64, branch: Branch) -> Result<f64> {
    let rhs = e0 - g * b;
    if q0 == 0.0 {
        let h = rhs / g;
        if !(h > 0.0) {
            return Err(Error::NonPositiveDepth { h, x: f64::NAN });
        }
        return Ok(h);
    }
    let hc = critical_depth(q0, g);
    let crit = 1.5 * g * hc;
    let tol = 1e-12 * e0.abs().max(1.0);
    if rhs < crit - tol {
        return Err(Error::BelowCriticalEnergy {
            energy: e0,
            critical: crit + g * b,
            discharge: q0,
            bathymetry: b,
        });
    }
    if rhs <= crit {
        return Ok(hc);
    }
    let q2 = q0 * q0;
    let f = |h: f64| g * h + 0.5 * q2 / (h * h) - rhs;
    let df = |h: f64| g - q2 / (h * h * h);
    // The residual is convex in h, so Newton from outside the root is monotone.
    let mut h = match branch {
        Branch::Subcritical => rhs / g,
        Branch::Supercritical => q0.abs() / (2.0 * rhs).sqrt(),
    };
    for _ in 0..500 {
        let dh = f(h) / df(h);
        let next = h - dh;
        let stalled = match branch {
            Branch::Subcritical => next >= h || next < hc,
            Branch::Supercritical => next <= h || next > hc,
        };
        if stalled {
            break;
        }
        h = next;
        if dh.abs() <= 1e-16 * h {
            break;
        }
    }
    Ok(h)
}

/// Energy profile of a steady flow with linear friction, `E' = -c_f q / h`.
#[derive(Debug, Clone)]
pub struct FrictionProfile {
    pub q0: f64,
    pub branch: Branch,
    x: Vec<f64>,
    e: Vec<f64>,
    params: PhysParams,
}

impl FrictionProfile {
    /// Integrates from `x_start` (where the energy is `e0`) to `x_end` with
    /// classical RK4. Steps never exceed `max_step` and land on `breakpoints`.
    pub fn new(
        q0: f64,
        e0: f64,
        branch: Branch,
        params: &PhysParams,
        x_start: f64,
        x_end: f64,
        max_step: f64,
        breakpoints: &[f64],
    ) -> Result<Self> {
        let mut cuts: Vec<f64> = breakpoints
            .iter()
            .copied()
            .filter(|&b| b > x_start && b < x_end)
            .collect();
        cuts.push(x_end);
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut x = vec![x_start];
        let mut a = x_start;
        for c in cuts {
            let m = ((c - a) / max_step).ceil().max(1.0) as usize;
            for k in 1..=m {
                x.push(if k == m {
                    c
                } else {
                    a + (c - a) * k as f64 / m as f64
                });
            }
            a = c;
        }
        let mut prof = FrictionProfile {
            q0,
            branch,
            x: x.clone(),
            e: vec![e0],
            params: params.clone(),
        };
        let mut e = e0;
        for k in 1..x.len() {
            e = prof.step(x[k - 1], e, x[k] - x[k - 1])?;
            prof.e.push(e);
        }
        Ok(prof)
    }

    fn rate(&self, x: f64, e: f64) -> Result<f64> {
        let b = self.params.bathymetry.at(x, 0.0);
        let h = solve_depth_from_energy(self.q0, e, b, self.params.g, self.branch)?;
        Ok(-self.params.friction * self.q0 / h)
    }

    fn step(&self, x: f64, e: f64, dx: f64) -> Result<f64> {
        let k1 = self.rate(x, e)?;
        let k2 = self.rate(x + 0.5 * dx, e + 0.5 * dx * k1)?;
        let k3 = self.rate(x + 0.5 * dx, e + 0.5 * dx * k2)?;
        let k4 = self.rate(x + dx, e + dx * k3)?;
        Ok(e + dx / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
    }

    /// Energy at `x`, completing the last grid interval with a partial step.
    pub fn energy(&self, x: f64) -> Result<f64> {
        let k = match self.x.partition_point(|&xi| xi <= x) {
            0 => 0,
            k => k - 1,
        };
        let dx = x - self.x[k];
        if dx == 0.0 {
            return Ok(self.e[k]);
        }
        self.step(self.x[k], self.e[k], dx)
    }

    pub fn state(&self, x: f64) -> Result<State> {
        let e = self.energy(x)?;
        let b = self.params.bathymetry.at(x, 0.0);
        let h = solve_depth_from_energy(self.q0, e, b, self.params.g, self.branch)?;
        Ok(State::new(h, self.q0, 0.0))
    }
}

/// Pointwise analytical steady state.
pub fn steady_field(spec: &SteadyStateSpec, x: f64, params: &PhysParams) -> Result<State> {
    let g = params.g;
    let b = params.bathymetry.at(x, 0.0);
    match spec {
        SteadyStateSpec::LakeAtRest { zeta0 } => {
            let h = zeta0 - b;
            if !(h > 0.0) {
                return Err(Error::NonPositiveDepth { h, x });
            }
            Ok(State::new(h, 0.0, 0.0))
        }
        SteadyStateSpec::Moving { q0, e0, regime } => {
            let h = solve_depth_from_energy(*q0, *e0, b, g, regime.branch_at(x))?;
            Ok(State::new(h, *q0, 0.0))
        }
        SteadyStateSpec::CoriolisRest { zeta0, x0 } => {
            let w = params.coriolis.at(0.0);
            let zeta = zeta0 + 0.25 * w * ((-x * x).exp() - (-x0 * x0).exp());
            let h = zeta - b;
            if !(h > 0.0) {
                return Err(Error::NonPositiveDepth { h, x });
            }
            let v = 0.5 * g * x * (-x * x).exp();
            Ok(State::new(h, 0.0, h * v))
        }
        SteadyStateSpec::CoriolisMoving => {
            let w = params.coriolis.at(0.0);
            let h = (2.0 * x).exp();
            Ok(State::new(h, 1.0, w * x * h))
        }
        SteadyStateSpec::Friction(p) => p.state(x),
    }
}

/// Recovers the state from its x-flux `(q, q^2/h + g h^2/2, q v)` on a branch.
pub fn invert_flux(f: State, g: f64, branch: Branch) -> Result<State> {
    let q = f.h;
    let m = f.hu;
    if q == 0.0 {
        if !(m > 0.0) {
            return Err(Error::FluxNotInvertible {
                momentum: m,
                minimum: 0.0,
            });
        }
        return Ok(State::new((2.0 * m / g).sqrt(), 0.0, 0.0));
    }
    let q2 = q * q;
    let hc = critical_depth(q, g);
    let m_min = 1.5 * g * hc * hc;
    if m < m_min * (1.0 - 1e-14) {
        return Err(Error::FluxNotInvertible {
            momentum: m,
            minimum: m_min,
        });
    }
    let h = if m <= m_min {
        hc
    } else {
        let r = |h: f64| q2 / h + 0.5 * g * h * h - m;
        let dr = |h: f64| g * h - q2 / (h * h);
        let mut h = match branch {
            Branch::Subcritical => (2.0 * m / g).sqrt(),
            Branch::Supercritical => q2 / m,
        };
        for _ in 0..500 {
            let next = h - r(h) / dr(h);
            let stalled = match branch {
                Branch::Subcritical => next >= h || next < hc,
                Branch::Supercritical => next <= h || next > hc,
            };
            if stalled {
                break;
            }
            let done = (next - h).abs() <= 1e-16 * h;
            h = next;
            if done {
                break;
            }
        }
        h
    };
    Ok(State::new(h, q, f.hv * h / q))
}

/// Discrete equilibrium of the global-flux scheme.
#[derive(Debug, Clone)]
pub struct DiscreteSteadySolution {
    pub field: Field1D,
    /// Constant value of the global flux `F - h I S`.
    pub global_flux: State,
    /// Final Newton residual per element.
    pub residuals: Vec<f64>,
    pub iterations: Vec<usize>,
}

/// Newton tolerance on the per-element residual.
pub const STEADY_TOL: f64 = 1e-13;
const MAX_NEWTON: usize = 50;

fn near_critical(scheme: &Scheme1D, e: usize, u: &[State]) -> Option<f64> {
    let g = scheme.params.g;
    let n = scheme.n_nodes();
    u.iter().enumerate().find_map(|(i, s)| {
        let c = (g * s.h).sqrt();
        ((s.u().abs() - c).abs() < 1e-3 * c).then(|| scheme.x[e * n + i])
    })
}

/// Marches element by element from the left boundary state, solving
/// `F(U_i) - h sum_k I_ik S_k = F(U_0)` for the interior and right nodes.
///
/// The source discretization is the one configured in `scheme`.
pub fn discrete_global_flux_solution(
    scheme: &Scheme1D,
    spec: &SteadyStateSpec,
) -> Result<DiscreteSteadySolution> {
    let g = scheme.params.g;
    let n = scheme.n_nodes();
    let p = n - 1;
    let h = scheme.mesh.width();
    let ne = scheme.mesh.n_elem;
    let integ = &scheme.basis.integ;

    let anchor = steady_field(spec, scheme.mesh.x_left, &scheme.params)?;
    let mut field = Field1D::zeros(ne, n);
    let mut residuals = Vec::with_capacity(ne);
    let mut iterations = Vec::with_capacity(ne);
    let mut u0 = anchor;
    let global_flux = flux_x(anchor, g);

    let mut u = vec![State::ZERO; n];
    for e in 0..ne {
        let base = e * n;
        let src = &scheme.sources[base..base + n];
        u[0] = u0;
        for i in 1..n {
            u[i] = steady_field(spec, scheme.x[base + i], &scheme.params).unwrap_or(u[i - 1]);
        }
        let f0 = flux_x(u0, g);
        let s0 = src[0].apply(u0);

        let residual = |u: &[State]| -> DVector<f64> {
            let mut r = DVector::zeros(3 * p);
            for i in 1..n {
                let mut acc = s0 * integ[i][0];
                for k in 1..n {
                    acc += src[k].apply(u[k]) * integ[i][k];
                }
                let ri = flux_x(u[i], g) - acc * h - f0;
                for c in 0..3 {
                    r[3 * (i - 1) + c] = ri.component(c);
                }
            }
            r
        };

        let mut r = residual(&u);
        let mut it = 0;
        while r.amax() > STEADY_TOL && it < MAX_NEWTON {
            let mut jac = DMatrix::zeros(3 * p, 3 * p);
            for i in 1..n {
                for j in 1..n {
                    for a in 0..3 {
                        for b in 0..3 {
                            let mut v = -h * integ[i][j] * src[j].a[a][b];
                            if i == j {
                                v += flux_x_jacobian(u[j], g)[a][b];
                            }
                            jac[(3 * (i - 1) + a, 3 * (j - 1) + b)] = v;
                        }
                    }
                }
            }
            let delta = match jac.lu().solve(&(-&r)) {
                Some(d) => d,
                None => {
                    return Err(match near_critical(scheme, e, &u) {
                        Some(x) => Error::CriticalPoint { element: e, x },
                        None => Error::NewtonFailed {
                            element: e,
                            residual: r.amax(),
                            iterations: it,
                        },
                    })
                }
            };
            for i in 1..n {
                u[i] += State::new(
                    delta[3 * (i - 1)],
                    delta[3 * (i - 1) + 1],
                    delta[3 * (i - 1) + 2],
                );
            }
            it += 1;
            r = residual(&u);
            if !r.iter().all(|v| v.is_finite()) || u.iter().any(|s| !(s.h > 0.0)) {
                break;
            }
        }
        let res = r.amax();
        if !(res <= STEADY_TOL) {
            return Err(match near_critical(scheme, e, &u) {
                Some(x) => Error::CriticalPoint { element: e, x },
                None => Error::NewtonFailed {
                    element: e,
                    residual: res,
                    iterations: it,
                },
            });
        }
        field.data[base..base + n].copy_from_slice(&u);
        residuals.push(res);
        iterations.push(it);
        u0 = u[p];
    }
    Ok(DiscreteSteadySolution {
        field,
        global_flux,
        residuals,
        iterations,
    })
}

/// Independent construction of the same discrete equilibrium: collocation
/// in flux variables with a finite-difference Jacobian and explicit flux
/// inversion. Used as a cross-check of [`discrete_global_flux_solution`].
pub fn lobatto_iiia_flux_march(scheme: &Scheme1D, spec: &SteadyStateSpec) -> Result<Field1D> {
    let g = scheme.params.g;
    let n = scheme.n_nodes();
    let p = n - 1;
    let h = scheme.mesh.width();
    let ne = scheme.mesh.n_elem;
    let integ = &scheme.basis.integ;

    let mut u0 = steady_field(spec, scheme.mesh.x_left, &scheme.params)?;
    let mut field = Field1D::zeros(ne, n);
    for e in 0..ne {
        let base = e * n;
        let src = &scheme.sources[base..base + n];
        let xs = &scheme.x[base..base + n];
        let f0 = flux_x(u0, g);
        let s0 = src[0].apply(u0);
        // Stage values start from the left flux, i.e. a constant-flux guess.
        let mut z: Vec<f64> = (1..n).flat_map(|_| f0.to_array()).collect();

        let states = |z: &[f64]| -> Result<Vec<State>> {
            (1..n)
                .map(|i| {
                    let f = State::new(z[3 * (i - 1)], z[3 * (i - 1) + 1], z[3 * (i - 1) + 2]);
                    invert_flux(f, g, spec.branch_at(xs[i]))
                })
                .collect()
        };
        let residual = |z: &[f64]| -> Result<Vec<f64>> {
            let us = states(z)?;
            let mut r = vec![0.0; 3 * p];
            for i in 1..n {
                let mut acc = s0 * integ[i][0];
                for k in 1..n {
                    acc += src[k].apply(us[k - 1]) * integ[i][k];
                }
                for c in 0..3 {
                    r[3 * (i - 1) + c] =
                        z[3 * (i - 1) + c] - f0.component(c) - h * acc.component(c);
                }
            }
            Ok(r)
        };

        let mut r = residual(&z)?;
        let mut it = 0;
        let amax = |r: &[f64]| r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        while amax(&r) > STEADY_TOL && it < MAX_NEWTON {
            let m = 3 * p;
            let mut jac = DMatrix::zeros(m, m);
            for k in 0..m {
                let eps = 1e-7 * z[k].abs().max(1.0);
                let mut zp = z.clone();
                let mut zm = z.clone();
                zp[k] += eps;
                zm[k] -= eps;
                let rp = residual(&zp)?;
                let rm = residual(&zm)?;
                for i in 0..m {
                    jac[(i, k)] = (rp[i] - rm[i]) / (2.0 * eps);
                }
            }
            let rhs = -DVector::from_vec(r.clone());
            let delta = jac.lu().solve(&rhs).ok_or(Error::NewtonFailed {
                element: e,
                residual: amax(&r),
                iterations: it,
            })?;
            for k in 0..m {
                z[k] += delta[k];
            }
            r = residual(&z)?;
            it += 1;
        }
        if amax(&r) > STEADY_TOL {
            return Err(Error::NewtonFailed {
                element: e,
                residual: amax(&r),
                iterations: it,
            });
        }
        let us = states(&z)?;
        field.data[base] = u0;
        field.data[base + 1..base + n].copy_from_slice(&us);
        u0 = us[p - 1];
    }
    Ok(field)
}
