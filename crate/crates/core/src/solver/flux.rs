use crate::physics::{max_wave_speed, State};

use super::{Dissipation, SchemeConfig};

/// Central flux with optional Rusanov dissipation for a given signal speed.
pub fn rusanov(
    left: State,
    right: State,
    flux_left: State,
    flux_right: State,
    speed: f64,
    alpha: f64,
    dissipation: Dissipation,
) -> State {
    let central = flux_right * alpha + flux_left * (1.0 - alpha);
    match dissipation {
        Dissipation::None => central,
        Dissipation::Rusanov => central - (right - left) * (0.5 * speed),
    }
}

/// Single-valued x-directed interface flux between `left` and `right` states.
pub fn numerical_flux(
    left: State,
    right: State,
    flux_left: State,
    flux_right: State,
    config: &SchemeConfig,
    g: f64,
) -> State {
    let s = max_wave_speed(left, g).max(max_wave_speed(right, g));
    rusanov(
        left,
        right,
        flux_left,
        flux_right,
        s,
        config.flux_alpha,
        config.dissipation,
    )
}
