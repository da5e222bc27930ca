//! Explicit Runge-Kutta integration of a semi-discrete system.

use std::ops::{Add, Mul};

use crate::error::{Error, Result};
use crate::physics::State;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeIntegrator {
    /// Three-stage strong-stability-preserving scheme, used for `p <= 2`.
    Ssprk33,
    /// Classical four-stage scheme, used for `p >= 3`.
    Rk44,
}

impl TimeIntegrator {
    pub fn for_degree(p: usize) -> Self {
        if p <= 2 {
            TimeIntegrator::Ssprk33
        } else {
            TimeIntegrator::Rk44
        }
    }
}

/// Scalar budgets integrated alongside the solution.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Rates {
    /// Friction dissipation `int c_f h |u|^2 dx`.
    pub friction_dissipation: f64,
    /// Net mass flux entering through the boundary.
    pub mass_inflow: f64,
    /// Net entropy flux entering through the boundary.
    pub entropy_inflow: f64,
}

impl Add for Rates {
    type Output = Rates;
    fn add(self, o: Rates) -> Rates {
        Rates {
            friction_dissipation: self.friction_dissipation + o.friction_dissipation,
            mass_inflow: self.mass_inflow + o.mass_inflow,
            entropy_inflow: self.entropy_inflow + o.entropy_inflow,
        }
    }
}

impl Mul<f64> for Rates {
    type Output = Rates;
    fn mul(self, s: f64) -> Rates {
        Rates {
            friction_dissipation: self.friction_dissipation * s,
            mass_inflow: self.mass_inflow * s,
            entropy_inflow: self.entropy_inflow * s,
        }
    }
}

/// A spatial discretization `dU/dt = L(t, U)` that can be time-stepped.
pub trait SemiDiscrete: Sync {
    fn len(&self) -> usize;
    fn rate(&self, t: f64, u: &[State], out: &mut [State]) -> Result<Rates>;
    /// Largest stable step for the configured CFL number.
    fn stable_dt(&self, t: f64, u: &[State]) -> f64;
    fn total_entropy(&self, u: &[State]) -> f64;
    fn total_mass(&self, u: &[State]) -> f64;
    fn integrator(&self) -> TimeIntegrator;
    /// Human-readable location of degree of freedom `k`.
    fn describe(&self, k: usize) -> String;
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub t_final: f64,
    /// Overrides the CFL step.
    pub fixed_dt: Option<f64>,
    pub snapshot_times: Vec<f64>,
    pub record_entropy: bool,
    pub max_steps: Option<usize>,
}

impl RunOptions {
    pub fn until(t_final: f64) -> Self {
        RunOptions {
            t_final,
            ..Default::default()
        }
    }

    pub fn with_entropy(mut self) -> Self {
        self.record_entropy = true;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropySample {
    pub t: f64,
    pub total_entropy: f64,
    /// Entropy that entered through the domain boundary so far.
    pub inflow: f64,
    /// Entropy plus accumulated friction dissipation minus boundary inflow;
    /// constant for the exact dynamics.
    pub n_tot: f64,
}

impl EntropySample {
    /// Total entropy corrected for boundary inflow.
    pub fn balance(&self) -> f64 {
        self.total_entropy - self.inflow
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub state: Vec<State>,
    pub t: f64,
    pub steps: usize,
    pub snapshots: Vec<(f64, Vec<State>)>,
    pub entropy: Vec<EntropySample>,
    /// Time integrals of the budget rates.
    pub integrated: Rates,
}

/// Neumaier-compensated sum; keeps domain totals exact to a few ulps on large meshes.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        c += if sum.abs() >= v.abs() {
            (sum - t) + v
        } else {
            (v - t) + sum
        };
        sum = t;
    }
    sum + c
}

fn lincomb(out: &mut [State], terms: &[(f64, &[State])]) {
    for (k, o) in out.iter_mut().enumerate() {
        let mut acc = State::ZERO;
        for (c, v) in terms {
            acc += v[k] * *c;
        }
        *o = acc;
    }
}

fn check_state<S: SemiDiscrete + ?Sized>(
    scheme: &S,
    u: &[State],
    step: usize,
    t: f64,
) -> Result<()> {
    for (k, s) in u.iter().enumerate() {
        if !s.is_finite() || !(s.h > 0.0) {
            return Err(Error::Unstable {
                step,
                t,
                reason: format!("h = {} at {}", s.h, scheme.describe(k)),
            });
        }
    }
    Ok(())
}

fn stage<S: SemiDiscrete + ?Sized>(
    scheme: &S,
    t: f64,
    u: &[State],
    out: &mut [State],
    step: usize,
) -> Result<Rates> {
    scheme.rate(t, u, out).map_err(|e| match e {
        Error::NonPositiveDepth { h, x } => Error::Unstable {
            step,
            t,
            reason: format!("h = {h} at x = {x}"),
        },
        other => other,
    })
}

/// Advances `u` and the integrated budgets `acc` by one step `dt`.
pub fn advance<S: SemiDiscrete + ?Sized>(
    scheme: &S,
    t: f64,
    dt: f64,
    u: &mut [State],
    acc: &mut Rates,
    step: usize,
) -> Result<()> {
    let n = u.len();
    let mut k1 = vec![State::ZERO; n];
    let mut tmp = vec![State::ZERO; n];
    match scheme.integrator() {
        TimeIntegrator::Ssprk33 => {
            // increment form, so the state is only ever updated as u + dt * sum b_i k_i
            let mut k2 = vec![State::ZERO; n];
            let mut k3 = vec![State::ZERO; n];
            let r1 = stage(scheme, t, u, &mut k1, step)?;
            lincomb(&mut tmp, &[(1.0, u), (dt, &k1)]);
            let r2 = stage(scheme, t + dt, &tmp, &mut k2, step)?;
            lincomb(&mut tmp, &[(1.0, u), (0.25 * dt, &k1), (0.25 * dt, &k2)]);
            let r3 = stage(scheme, t + 0.5 * dt, &tmp, &mut k3, step)?;
            let c = dt / 6.0;
            lincomb(&mut tmp, &[(1.0, u), (c, &k1), (c, &k2), (4.0 * c, &k3)]);
            *acc = *acc + (r1 + r2 + r3 * 4.0) * c;
            u.copy_from_slice(&tmp);
        }
        TimeIntegrator::Rk44 => {
            let mut k2 = vec![State::ZERO; n];
            let mut k3 = vec![State::ZERO; n];
            let mut k4 = vec![State::ZERO; n];
            let r1 = stage(scheme, t, u, &mut k1, step)?;
            lincomb(&mut tmp, &[(1.0, u), (0.5 * dt, &k1)]);
            let r2 = stage(scheme, t + 0.5 * dt, &tmp, &mut k2, step)?;
            lincomb(&mut tmp, &[(1.0, u), (0.5 * dt, &k2)]);
            let r3 = stage(scheme, t + 0.5 * dt, &tmp, &mut k3, step)?;
            lincomb(&mut tmp, &[(1.0, u), (dt, &k3)]);
            let r4 = stage(scheme, t + dt, &tmp, &mut k4, step)?;
            let c = dt / 6.0;
            lincomb(
                &mut tmp,
                &[(1.0, u), (c, &k1), (2.0 * c, &k2), (2.0 * c, &k3), (c, &k4)],
            );
            *acc = *acc + (r1 + r2 * 2.0 + r3 * 2.0 + r4) * c;
            u.copy_from_slice(&tmp);
        }
    }
    check_state(scheme, u, step, t + dt)
}

/// Integrates from `t = 0` to `opts.t_final`.
pub fn run<S: SemiDiscrete + ?Sized>(
    scheme: &S,
    u0: &[State],
    opts: &RunOptions,
) -> Result<RunOutput> {
    check_state(scheme, u0, 0, 0.0)?;
    let mut u = u0.to_vec();
    let mut t = 0.0;
    let mut acc = Rates::default();
    let mut steps = 0;
    let mut snapshots = Vec::new();
    let mut entropy = Vec::new();
    let mut pending: Vec<f64> = opts
        .snapshot_times
        .iter()
        .copied()
        .filter(|&s| s >= 0.0 && s <= opts.t_final)
        .collect();
    pending.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pending.reverse();

    let record = |t: f64, u: &[State], acc: &Rates, out: &mut Vec<EntropySample>| {
        let e = scheme.total_entropy(u);
        out.push(EntropySample {
            t,
            total_entropy: e,
            inflow: acc.entropy_inflow,
            n_tot: e + acc.friction_dissipation - acc.entropy_inflow,
        });
    };
    if opts.record_entropy {
        record(t, &u, &acc, &mut entropy);
    }
    while pending.last().is_some_and(|&s| s <= 0.0) {
        snapshots.push((0.0, u.clone()));
        pending.pop();
    }

    let tol = 1e-12 * opts.t_final.max(1.0);
    while t < opts.t_final - tol {
        if opts.max_steps.is_some_and(|m| steps >= m) {
            break;
        }
        let mut dt = opts.fixed_dt.unwrap_or_else(|| scheme.stable_dt(t, &u));
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Unstable {
                step: steps,
                t,
                reason: format!("invalid time step {dt}"),
            });
        }
        let target = pending
            .last()
            .copied()
            .unwrap_or(opts.t_final)
            .min(opts.t_final);
        if t + dt > target - tol {
            dt = target - t;
        }
        advance(scheme, t, dt, &mut u, &mut acc, steps)?;
        steps += 1;
        t = if (t + dt - target).abs() <= tol {
            target
        } else {
            t + dt
        };
        while pending.last().is_some_and(|&s| s <= t + tol) {
            snapshots.push((t, u.clone()));
            pending.pop();
        }
        if opts.record_entropy {
            record(t, &u, &acc, &mut entropy);
        }
    }
    Ok(RunOutput {
        state: u,
        t,
        steps,
        snapshots,
        entropy,
        integrated: acc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Scalar decay `dh/dt = -h` replicated on every entry.
    struct Decay(usize, TimeIntegrator);

    impl SemiDiscrete for Decay {
        fn len(&self) -> usize {
            self.0
        }
        fn rate(&self, _t: f64, u: &[State], out: &mut [State]) -> Result<Rates> {
            for (o, s) in out.iter_mut().zip(u) {
                *o = State::new(-s.h, 0.0, 0.0);
            }
            Ok(Rates {
                friction_dissipation: u[0].h,
                ..Default::default()
            })
        }
        fn stable_dt(&self, _t: f64, _u: &[State]) -> f64 {
            0.01
        }
        fn total_entropy(&self, u: &[State]) -> f64 {
            u[0].h
        }
        fn total_mass(&self, u: &[State]) -> f64 {
            u[0].h
        }
        fn integrator(&self) -> TimeIntegrator {
            self.1
        }
        fn describe(&self, k: usize) -> String {
            k.to_string()
        }
    }

    #[test]
    fn orders_of_accuracy() {
        for (integ, order) in [(TimeIntegrator::Ssprk33, 3.0), (TimeIntegrator::Rk44, 4.0)] {
            let sys = Decay(2, integ);
            let u0 = vec![State::new(1.0, 0.0, 0.0); 2];
            let err = |dt: f64| {
                let mut o = RunOptions::until(1.0);
                o.fixed_dt = Some(dt);
                let r = run(&sys, &u0, &o).unwrap();
                (r.state[0].h - (-1.0f64).exp()).abs()
            };
            let rate = (err(0.1) / err(0.05)).log2();
            assert!((rate - order).abs() < 0.2, "{integ:?} rate {rate}");
        }
    }

    #[test]
    fn budgets_integrate_with_the_state() {
        // d(acc)/dt = h, so h + acc stays equal to 1.
        let sys = Decay(1, TimeIntegrator::Rk44);
        let r = run(
            &sys,
            &[State::new(1.0, 0.0, 0.0)],
            &RunOptions::until(2.0).with_entropy(),
        )
        .unwrap();
        let last = r.entropy.last().unwrap();
        assert!((last.n_tot - 1.0).abs() < 1e-9);
        assert!((r.t - 2.0).abs() < 1e-14);
    }

    #[test]
    fn snapshots_hit_requested_times() {
        let sys = Decay(1, TimeIntegrator::Ssprk33);
        let mut o = RunOptions::until(1.0);
        o.snapshot_times = vec![0.0, 0.333, 1.0];
        let r = run(&sys, &[State::new(1.0, 0.0, 0.0)], &o).unwrap();
        let times: Vec<f64> = r.snapshots.iter().map(|s| s.0).collect();
        assert_eq!(times.len(), 3);
        assert!((times[1] - 0.333).abs() < 1e-12);
    }

    #[test]
    fn negative_depth_is_reported() {
        let sys = Decay(1, TimeIntegrator::Ssprk33);
        let mut o = RunOptions::until(10.0);
        o.fixed_dt = Some(5.0);
        assert!(matches!(
            run(&sys, &[State::new(1.0, 0.0, 0.0)], &o),
            Err(Error::Unstable { .. })
        ));
    }
}
