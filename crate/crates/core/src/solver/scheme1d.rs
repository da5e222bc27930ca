use crate::error::{Error, Result};
use crate::mesh::{Field1D, Mesh1D};
use crate::physics::{
    entropy, entropy_flux_x, entropy_hessian_inverse, entropy_variables, flux_x, mat_vec,
    max_wave_speed, AffineSource, EntropyMode, PhysParams, SourceGeometry, SourceVariant, State,
};
use crate::quadrature::{GLBasis, MAX_NODES};

use super::time::{compensated_sum, Rates, SemiDiscrete, TimeIntegrator};
use super::{numerical_flux, Axis, BoundarySpec, EntropyCorrection, QuadratureMode, SchemeConfig};

/// Entropy bookkeeping of one element for one right-hand-side evaluation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ElementEntropy {
    /// Entropy production of the uncorrected scheme.
    pub phi: f64,
    /// Target production.
    pub psi: f64,
    pub alpha: f64,
    /// `|| dW/dx ||^2` in the entropy-Hessian metric.
    pub norm2: f64,
    pub floor_active: bool,
    /// `|K| d(mean eta)/dt` of the final update; equals `-psi` when corrected.
    pub entropy_rate: f64,
}

/// Per-element diagnostics of a right-hand-side evaluation.
#[derive(Debug, Clone, Default)]
pub struct RhsDiagnostics {
    pub elements: Vec<ElementEntropy>,
    pub rates: Rates,
}

/// Assembled 1D operator: mesh, basis, physics and boundary data.
#[derive(Debug, Clone)]
pub struct Scheme1D {
    pub mesh: Mesh1D,
    pub basis: GLBasis,
    pub config: SchemeConfig,
    pub params: PhysParams,
    pub boundary: BoundarySpec,
    /// Nodal coordinates.
    pub x: Vec<f64>,
    /// Nodal bathymetry.
    pub b: Vec<f64>,
    /// Analytic bathymetry slope at the nodes.
    pub slope: Vec<f64>,
    pub sources: Vec<AffineSource>,
    inv_hw: Vec<f64>,
}

/// Per-node offsets `h sum_k I_ik S_k` of the global flux.
pub fn source_flux_increments(s: &[State], basis: &GLBasis, h: f64) -> Vec<State> {
    let n = basis.n_nodes();
    (0..n)
        .map(|i| {
            let mut acc = State::ZERO;
            for k in 0..n {
                acc += s[k] * basis.integ[i][k];
            }
            acc * h
        })
        .collect()
}

impl Scheme1D {
    pub fn new(
        mesh: Mesh1D,
        config: SchemeConfig,
        params: PhysParams,
        boundary: BoundarySpec,
    ) -> Result<Self> {
        config.validate()?;
        boundary.validate()?;
        let basis = GLBasis::new(config.degree)?;
        let n = basis.n_nodes();
        let h = mesh.width();
        let x = mesh.nodes(&basis);
        let b: Vec<f64> = x.iter().map(|&xi| params.bathymetry.at(xi, 0.0)).collect();
        let slope: Vec<f64> = x
            .iter()
            .map(|&xi| params.bathymetry.gradient(xi, 0.0).0)
            .collect();
        let omega = params.coriolis.at(0.0);

        let mut sources = Vec::with_capacity(x.len());
        let mut db = vec![0.0; n];
        let mut dpb = vec![0.0; n];
        for e in 0..mesh.n_elem {
            let be = &b[e * n..(e + 1) * n];
            basis.differentiate(be, &mut db);
            let pb: Vec<f64> = be.iter().map(|v| 0.5 * v * v).collect();
            basis.differentiate(&pb, &mut dpb);
            for i in 0..n {
                let k = e * n + i;
                let geo = match config.source_variant {
                    SourceVariant::Basic => SourceGeometry {
                        b: b[k],
                        db: slope[k],
                        dpb: 0.0,
                        omega,
                    },
                    SourceVariant::Modified => SourceGeometry {
                        b: b[k],
                        db: db[i] / h,
                        dpb: dpb[i] / h,
                        omega,
                    },
                };
                sources.push(AffineSource::one_dimensional(
                    &geo,
                    params.g,
                    params.friction,
                    config.source_variant,
                ));
            }
        }
        let inv_hw = basis.weights.iter().map(|w| 1.0 / (h * w)).collect();
        Ok(Scheme1D {
            mesh,
            basis,
            config,
            params,
            boundary,
            x,
            b,
            slope,
            sources,
            inv_hw,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.basis.n_nodes()
    }

    /// Replaces the boundary conditions.
    pub fn with_boundary(mut self, boundary: BoundarySpec) -> Result<Self> {
        boundary.validate()?;
        self.boundary = boundary;
        Ok(self)
    }

    /// Nodal source values of one element.
    pub fn element_sources(&self, e: usize, u: &[State]) -> Vec<State> {
        let n = self.n_nodes();
        (0..n)
            .map(|i| self.sources[e * n + i].apply(u[e * n + i]))
            .collect()
    }

    fn check_admissible(&self, u: &[State]) -> Result<()> {
        for (k, s) in u.iter().enumerate() {
            if !(s.h > 0.0) || !s.is_finite() {
                return Err(Error::NonPositiveDepth {
                    h: s.h,
                    x: self.x[k],
                });
            }
        }
        Ok(())
    }

    /// Left and right states at each of the `N + 1` faces.
    fn face_states(&self, u: &[State], t: f64) -> Vec<(State, State)> {
        let n = self.n_nodes();
        let ne = self.mesh.n_elem;
        let last = u.len() - 1;
        let mut faces = Vec::with_capacity(ne + 1);
        for f in 0..=ne {
            let (l, r) = if f == 0 || f == ne {
                if self.boundary.left.is_periodic() {
                    (u[last], u[0])
                } else if f == 0 {
                    let g = self
                        .boundary
                        .left
                        .ghost(u[0], self.mesh.x_left, 0.0, t, Axis::X);
                    (g, u[0])
                } else {
                    let g = self
                        .boundary
                        .right
                        .ghost(u[last], self.mesh.x_right, 0.0, t, Axis::X);
                    (u[last], g)
                }
            } else {
                (u[f * n - 1], u[f * n])
            };
            faces.push((l, r));
        }
        faces
    }

    /// Semi-discrete right-hand side `dU/dt`.
    pub fn rhs(&self, t: f64, u: &[State], out: &mut [State]) -> Result<Rates> {
        self.evaluate(t, u, out, None)
    }

    /// Right-hand side with per-element entropy diagnostics.
    pub fn rhs_with_diagnostics(
        &self,
        t: f64,
        u: &[State],
        out: &mut [State],
    ) -> Result<RhsDiagnostics> {
        let mut elements = vec![ElementEntropy::default(); self.mesh.n_elem];
        let rates = self.evaluate(t, u, out, Some(&mut elements))?;
        Ok(RhsDiagnostics { elements, rates })
    }

    fn evaluate(
        &self,
        t: f64,
        u: &[State],
        out: &mut [State],
        mut diag: Option<&mut [ElementEntropy]>,
    ) -> Result<Rates> {
        self.check_admissible(u)?;
        let g = self.params.g;
        let cf = self.params.friction;
        let n = self.n_nodes();
        let p = n - 1;
        let h = self.mesh.width();
        let ne = self.mesh.n_elem;
        let cfg = &self.config;
        let mode = cfg.entropy_mode;
        let lam = cfg.entropy_lambda;
        let basis = &self.basis;

        let faces = self.face_states(u, t);
        let face_b = |f: usize| -> f64 {
            if f == ne {
                self.b[ne * n - 1]
            } else {
                self.b[f * n]
            }
        };
        let mut fhat = Vec::with_capacity(ne + 1);
        let mut eta_hat = Vec::with_capacity(ne + 1);
        for (f, &(l, r)) in faces.iter().enumerate() {
            let (fl, fr) = (flux_x(l, g), flux_x(r, g));
            let fh = numerical_flux(l, r, fl, fr, cfg, g);
            let central = fr * cfg.flux_alpha + fl * (1.0 - cfg.flux_alpha);
            let bf = face_b(f);
            let physical = (f == 0 || f == ne) && !self.boundary.left.is_periodic();
            fhat.push(fh);
            eta_hat.push(if physical {
                // entropy flux matching the applied flux, so a boundary jump
                // leaves no production for the correction to absorb
                let (s, fs) = if f == 0 { (r, fr) } else { (l, fl) };
                entropy_flux_x(s, bf, g, mode) + entropy_variables(s, bf, g, mode).dot(&(fh - fs))
            } else {
                // the dissipative flux carries the weighted mean of the entropy
                // variables, which keeps the element mismatch quadratic in the jump
                let wm = entropy_variables(r, bf, g, mode) * lam
                    + entropy_variables(l, bf, g, mode) * (1.0 - lam);
                lam * entropy_flux_x(r, bf, g, mode)
                    + (1.0 - lam) * entropy_flux_x(l, bf, g, mode)
                    + wm.dot(&(fh - central))
            });
        }

        let mut rates = Rates {
            mass_inflow: fhat[0].h - fhat[ne].h,
            entropy_inflow: eta_hat[0] - eta_hat[ne],
            friction_dissipation: 0.0,
        };

        let mut fx = [State::ZERO; MAX_NODES];
        let mut src = [State::ZERO; MAX_NODES];
        let mut gfl = [State::ZERO; MAX_NODES];
        let mut dgf = [State::ZERO; MAX_NODES];
        let mut w = [State::ZERO; MAX_NODES];
        let mut dw = [State::ZERO; MAX_NODES];
        let mut a0dw = [State::ZERO; MAX_NODES];

        for e in 0..ne {
            let base = e * n;
            let ue = &u[base..base + n];
            let du = &mut out[base..base + n];
            for i in 0..n {
                fx[i] = flux_x(ue[i], g);
                src[i] = self.sources[base + i].apply(ue[i]);
            }
            match cfg.quadrature {
                QuadratureMode::GlobalFlux => {
                    for i in 0..n {
                        let mut acc = State::ZERO;
                        for k in 0..n {
                            acc += src[k] * basis.integ[i][k];
                        }
                        gfl[i] = fx[i] - acc * h;
                    }
                }
                QuadratureMode::Standard => gfl[..n].copy_from_slice(&fx[..n]),
            }
            for i in 0..n {
                let mut acc = State::ZERO;
                for j in 0..n {
                    acc += (gfl[j] - gfl[0]) * basis.diff[i][j];
                }
                dgf[i] = acc;
                du[i] = acc * (-1.0 / h);
                if cfg.quadrature == QuadratureMode::Standard {
                    du[i] += src[i];
                }
            }
            du[0] += (fhat[e] - fx[0]) * self.inv_hw[0];
            du[p] -= (fhat[e + 1] - fx[p]) * self.inv_hw[p];

            let mut dissipation = 0.0;
            let mut bathy_work = 0.0;
            for i in 0..n {
                let s = ue[i];
                let wq = h * basis.weights[i];
                dissipation += wq * cf * s.hu * s.hu / s.h;
                bathy_work += wq * g * s.hu * self.slope[base + i];
            }
            rates.friction_dissipation += dissipation;

            let correct = cfg.entropy_correction != EntropyCorrection::Off;
            if !correct && diag.is_none() {
                continue;
            }

            for i in 0..n {
                w[i] = entropy_variables(ue[i], self.b[base + i], g, mode);
            }
            let mut phi = 0.0;
            for i in 0..n {
                phi -= w[i].dot(&du[i]) / self.inv_hw[i];
            }
            let (bl, br) = (self.b[base], self.b[base + p]);
            let psi = match cfg.entropy_correction {
                EntropyCorrection::GlobalFluxFlux => {
                    let mut vol = 0.0;
                    for i in 0..n {
                        vol += basis.weights[i] * w[i].dot(&dgf[i]);
                    }
                    vol + (eta_hat[e + 1] - entropy_flux_x(ue[p], br, g, mode))
                        - (eta_hat[e] - entropy_flux_x(ue[0], bl, g, mode))
                }
                _ => {
                    let work = match mode {
                        EntropyMode::Total => dissipation,
                        EntropyMode::Plain => dissipation + bathy_work,
                    };
                    eta_hat[e + 1] - eta_hat[e] + work
                }
            };
            for i in 0..n {
                let mut acc = State::ZERO;
                for j in 0..n {
                    acc += w[j] * basis.diff[i][j];
                }
                dw[i] = acc;
            }
            let mut norm2 = 0.0;
            for q in 0..n {
                a0dw[q] = mat_vec(&entropy_hessian_inverse(ue[q], g), dw[q]);
                norm2 += basis.weights[q] * dw[q].dot(&a0dw[q]);
            }
            norm2 /= h;
            let floor_active = norm2 < cfg.entropy_floor;
            let alpha = if correct {
                (psi - phi) / norm2.max(cfg.entropy_floor)
            } else {
                0.0
            };
            if correct {
                for i in 0..n {
                    let mut d = State::ZERO;
                    for q in 0..n {
                        d += a0dw[q] * (basis.weights[q] * basis.diff[q][i]);
                    }
                    du[i] -= d * (alpha * self.inv_hw[i] / h);
                }
            }
            if let Some(diag) = diag.as_deref_mut() {
                let mut rate = 0.0;
                for i in 0..n {
                    rate += w[i].dot(&du[i]) / self.inv_hw[i];
                }
                diag[e] = ElementEntropy {
                    phi,
                    psi,
                    alpha,
                    norm2,
                    floor_active,
                    entropy_rate: rate,
                };
            }
        }
        Ok(rates)
    }
}

/// Convenience wrapper returning `dU/dt` as a new field.
pub fn semidiscrete_rhs(field: &Field1D, scheme: &Scheme1D, t: f64) -> Result<Field1D> {
    let mut out = Field1D::zeros(field.n_elem, field.n_nodes);
    scheme.rhs(t, &field.data, &mut out.data)?;
    Ok(out)
}

impl SemiDiscrete for Scheme1D {
    fn len(&self) -> usize {
        self.x.len()
    }

    fn rate(&self, t: f64, u: &[State], out: &mut [State]) -> Result<Rates> {
        self.rhs(t, u, out)
    }

    fn stable_dt(&self, t: f64, u: &[State]) -> f64 {
        let s = u
            .iter()
            .map(|s| max_wave_speed(*s, self.params.g))
            .fold(0.0, f64::max);
        let p = self.config.degree as f64;
        let h = self.mesh.width();
        let dt = self.config.cfl * h / ((2.0 * p + 1.0) * s);
        if self.config.entropy_correction == EntropyCorrection::Off {
            return dt;
        }
        // The correction acts as a diffusion with coefficient |alpha| / h^2.
        let mut out = vec![State::ZERO; u.len()];
        let alpha = match self.rhs_with_diagnostics(t, u, &mut out) {
            Ok(d) => d.elements.iter().map(|e| e.alpha.abs()).fold(0.0, f64::max),
            Err(_) => return dt,
        };
        let rate = alpha * self.basis.stiffness_radius() / (h * h);
        1.0 / (1.0 / dt + rate / self.config.cfl)
    }

    fn total_entropy(&self, u: &[State]) -> f64 {
        let n = self.n_nodes();
        let h = self.mesh.width();
        compensated_sum(u.iter().enumerate().map(|(k, s)| {
            h * self.basis.weights[k % n]
                * entropy(*s, self.b[k], self.params.g, self.config.entropy_mode)
        }))
    }

    fn total_mass(&self, u: &[State]) -> f64 {
        let n = self.n_nodes();
        let h = self.mesh.width();
        compensated_sum(
            u.iter()
                .enumerate()
                .map(|(k, s)| h * self.basis.weights[k % n] * s.h),
        )
    }

    fn integrator(&self) -> TimeIntegrator {
        self.config.integrator()
    }

    fn describe(&self, k: usize) -> String {
        let n = self.n_nodes();
        format!("element {} node {} (x = {})", k / n, k % n, self.x[k])
    }
}
