use balance_dg::equilibria::discrete_global_flux_solution;
use balance_dg::harness::{entropy_drift, entropy_timeseries, fit_slope, lookup, CASE_NAMES};
use balance_dg::solver::{run, EntropyCorrection, RunOptions, SchemeConfig};

#[test]
fn every_case_builds_and_takes_a_step() {
    for name in CASE_NAMES {
        let case = lookup(name).unwrap();
        match case.one_d() {
            Ok(c) => {
                let s = c.scheme(SchemeConfig::well_balanced(2), 8).unwrap();
                let u = c
                    .initial_field(&s.mesh, &s.basis, &c.perturbation(0.0))
                    .unwrap();
                let out = run(
                    &s,
                    &u.data,
                    &RunOptions {
                        max_steps: Some(3),
                        ..RunOptions::until(1.0)
                    },
                );
                assert!(out.is_ok(), "{name}: {:?}", out.err());
                assert!(out.unwrap().state.iter().all(|v| v.h > 0.0), "{name}");
            }
            Err(_) => {
                let c = lookup(name).unwrap().two_d().unwrap();
                let s = c.scheme(SchemeConfig::well_balanced(2), 4, 4).unwrap();
                let u = c.initial_field(&s.mesh, &s.basis, &c.perturbation(0.0));
                let out = run(
                    &s,
                    &u.data,
                    &RunOptions {
                        max_steps: Some(3),
                        ..RunOptions::until(1.0)
                    },
                );
                assert!(out.is_ok(), "{name}: {:?}", out.err());
            }
        }
    }
}

#[test]
fn global_flux_steady_state_stays_put_under_evolution() {
    let case = lookup("subcritical").unwrap().one_d().unwrap();
    let spec = case.steady.clone().unwrap();
    let s = case.scheme(SchemeConfig::well_balanced(3), 20).unwrap();
    let us = discrete_global_flux_solution(&s, &spec).unwrap().field;
    let s = s.with_boundary(case.boundary_from_field(&us)).unwrap();
    let out = run(&s, &us.data, &RunOptions::until(0.5)).unwrap();
    let dev = out
        .state
        .iter()
        .zip(&us.data)
        .map(|(a, b)| (*a - *b).max_abs())
        .fold(0.0, f64::max);
    assert!(dev < 1e-11, "{dev:e}");
}

#[test]
fn runs_are_bitwise_repeatable() {
    let case = lookup("transcritical").unwrap().one_d().unwrap();
    let cfg =
        SchemeConfig::well_balanced(2).with_entropy_correction(EntropyCorrection::AnalyticalFlux);
    let go = || {
        let s = case.scheme(cfg, 16).unwrap();
        let u = case
            .initial_field(&s.mesh, &s.basis, &case.perturbation(1e-3))
            .unwrap();
        run(&s, &u.data, &RunOptions::until(0.3)).unwrap().state
    };
    let (a, b) = (go(), go());
    assert!(a
        .iter()
        .zip(&b)
        .all(|(x, y)| x.h.to_bits() == y.h.to_bits() && x.hu.to_bits() == y.hu.to_bits()));
}

#[test]
fn correction_reduces_short_run_drift() {
    let case = lookup("subcritical").unwrap().one_d().unwrap();
    let plain = SchemeConfig::well_balanced(2);
    let on = plain.with_entropy_correction(EntropyCorrection::AnalyticalFlux);
    let d_off = entropy_drift(&entropy_timeseries(&case, plain, 20, 0.1, 2.0).unwrap());
    let d_on = entropy_drift(&entropy_timeseries(&case, on, 20, 0.1, 2.0).unwrap());
    assert!(d_on < d_off, "{d_on:e} vs {d_off:e}");
}

#[test]
fn slope_fit_recovers_known_order() {
    let ns = [10, 20, 40, 80];
    let errs: Vec<f64> = ns.iter().map(|&n| 3.0 * (n as f64).powi(-3)).collect();
    assert!((fit_slope(&ns, &errs).unwrap() - 3.0).abs() < 1e-12);
}
