//! Pseudo-time relaxation towards a discrete steady state.

use crate::error::{Error, Result};
use crate::mesh::Field1D;
use crate::physics::State;
use crate::solver::{advance, Rates, Scheme1D, SemiDiscrete};

/// Steps the scheme explicitly until `max |dU/dt| <= tol`.
pub fn relax_to_steady(
    scheme: &Scheme1D,
    u0: &Field1D,
    tol: f64,
    max_steps: usize,
) -> Result<Field1D> {
    let mut u = u0.clone();
    let mut r = vec![State::ZERO; u.data.len()];
    let mut acc = Rates::default();
    let mut t = 0.0;
    let mut residual = f64::INFINITY;
    let mut step = 0;
    while step <= max_steps {
        if step % 20 == 0 {
            scheme.rate(t, &u.data, &mut r)?;
            residual = r.iter().map(|s| s.max_abs()).fold(0.0, f64::max);
            if residual <= tol {
                return Ok(u);
            }
        }
        let dt = scheme.stable_dt(t, &u.data);
        advance(scheme, t, dt, &mut u.data, &mut acc, step)?;
        t += dt;
        step += 1;
    }
    Err(Error::RelaxationFailed {
        residual,
        steps: max_steps,
    })
}
