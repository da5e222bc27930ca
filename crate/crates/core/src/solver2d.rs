//! Tensor-product extension on Cartesian meshes. Each direction is treated
//! with the one-dimensional operators, including the global-flux quadrature.

use rayon::prelude::*;

use crate::equilibria::{discrete_global_flux_solution, SteadyStateSpec};
use crate::error::{Error, Result};
use crate::mesh::{Field2D, Mesh2D};
use crate::physics::{
    entropy, entropy_flux_x, entropy_flux_y, entropy_hessian_inverse, entropy_variables, flux_x,
    flux_y, mat_vec, max_wave_speed, max_wave_speed_y, AffineSource, EntropyMode, PhysParams,
    SourceGeometry, SourceVariant, State,
};
use crate::quadrature::{GLBasis, MAX_NODES};
use crate::solver::{
    compensated_sum, rusanov, Axis, Boundary, BoundarySpec, ElementEntropy, EntropyCorrection,
    QuadratureMode, Rates, Scheme1D, SchemeConfig, SemiDiscrete, TimeIntegrator,
};

/// Boundary conditions on the four sides of a rectangle.
#[derive(Debug, Clone)]
pub struct BoundarySpec2D {
    pub left: Boundary,
    pub right: Boundary,
    pub bottom: Boundary,
    pub top: Boundary,
}

impl BoundarySpec2D {
    pub fn all(b: Boundary) -> Self {
        BoundarySpec2D {
            left: b.clone(),
            right: b.clone(),
            bottom: b.clone(),
            top: b,
        }
    }

    pub fn periodic() -> Self {
        BoundarySpec2D::all(Boundary::Periodic)
    }

    pub fn reflective_all() -> Self {
        BoundarySpec2D::all(Boundary::Reflective)
    }

    pub fn validate(&self) -> Result<()> {
        if self.left.is_periodic() != self.right.is_periodic()
            || self.bottom.is_periodic() != self.top.is_periodic()
        {
            return Err(Error::Config(
                "periodic boundaries must come in pairs".into(),
            ));
        }
        Ok(())
    }
}

/// Interface data along one family of faces.
struct FaceData {
    flux: Vec<State>,
    eta: Vec<f64>,
    /// Net inflow through the domain boundary.
    mass_in: f64,
    eta_in: f64,
}

/// Assembled 2D operator.
#[derive(Debug, Clone)]
pub struct Scheme2D {
    pub mesh: Mesh2D,
    pub basis: GLBasis,
    pub config: SchemeConfig,
    pub params: PhysParams,
    pub boundary: BoundarySpec2D,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub b: Vec<f64>,
    pub grad_b: Vec<(f64, f64)>,
    pub src_x: Vec<AffineSource>,
    pub src_y: Vec<AffineSource>,
}

impl Scheme2D {
    pub fn new(
        mesh: Mesh2D,
        config: SchemeConfig,
        params: PhysParams,
        boundary: BoundarySpec2D,
    ) -> Result<Self> {
        config.validate()?;
        boundary.validate()?;
        let basis = GLBasis::new(config.degree)?;
        let n = basis.n_nodes();
        let np2 = n * n;
        let (hx, hy) = (mesh.x.width(), mesh.y.width());
        let total = mesh.n_elem() * np2;
        let mut x = vec![0.0; total];
        let mut y = vec![0.0; total];
        for ey in 0..mesh.y.n_elem {
            for ex in 0..mesh.x.n_elem {
                let base = mesh.element(ex, ey) * np2;
                for j in 0..n {
                    for i in 0..n {
                        x[base + j * n + i] = mesh.x.node_x(&basis, ex, i);
                        y[base + j * n + i] = mesh.y.node_x(&basis, ey, j);
                    }
                }
            }
        }
        let b: Vec<f64> = x
            .iter()
            .zip(&y)
            .map(|(&a, &c)| params.bathymetry.at(a, c))
            .collect();
        let grad_b: Vec<(f64, f64)> = x
            .iter()
            .zip(&y)
            .map(|(&a, &c)| params.bathymetry.gradient(a, c))
            .collect();

        let mut src_x = vec![AffineSource::default(); total];
        let mut src_y = vec![AffineSource::default(); total];
        let mut line = vec![0.0; n];
        let mut pline = vec![0.0; n];
        let mut d1 = vec![0.0; n];
        let mut d2 = vec![0.0; n];
        let (g, cf, variant) = (params.g, params.friction, config.source_variant);
        for el in 0..mesh.n_elem() {
            let base = el * np2;
            for dir in [Axis::X, Axis::Y] {
                for l in 0..n {
                    let idx = |k: usize| match dir {
                        Axis::X => base + l * n + k,
                        Axis::Y => base + k * n + l,
                    };
                    for k in 0..n {
                        line[k] = b[idx(k)];
                        pline[k] = 0.5 * line[k] * line[k];
                    }
                    basis.differentiate(&line, &mut d1);
                    basis.differentiate(&pline, &mut d2);
                    let h = if dir == Axis::X { hx } else { hy };
                    for k in 0..n {
                        let q = idx(k);
                        let omega = params.coriolis.at(y[q]);
                        let geo = match variant {
                            SourceVariant::Basic => SourceGeometry {
                                b: b[q],
                                db: if dir == Axis::X {
                                    grad_b[q].0
                                } else {
                                    grad_b[q].1
                                },
                                dpb: 0.0,
                                omega,
                            },
                            SourceVariant::Modified => SourceGeometry {
                                b: b[q],
                                db: d1[k] / h,
                                dpb: d2[k] / h,
                                omega,
                            },
                        };
                        match dir {
                            Axis::X => src_x[q] = AffineSource::x_direction(&geo, g, cf, variant),
                            Axis::Y => src_y[q] = AffineSource::y_direction(&geo, g, cf, variant),
                        }
                    }
                }
            }
        }
        Ok(Scheme2D {
            mesh,
            basis,
            config,
            params,
            boundary,
            x,
            y,
            b,
            grad_b,
            src_x,
            src_y,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.basis.n_nodes()
    }

    pub fn with_boundary(mut self, boundary: BoundarySpec2D) -> Result<Self> {
        boundary.validate()?;
        self.boundary = boundary;
        Ok(self)
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

    /// Numerical fluxes on all faces normal to `axis`.
    ///
    /// Face `f` of line `l` node `k` is stored at `(l * (m + 1) + f) * n + k`,
    /// where `m` is the number of elements along `axis` and `l` runs over the
    /// element lines in the other direction.
    fn faces(&self, u: &[State], t: f64, axis: Axis) -> FaceData {
        let n = self.n_nodes();
        let np2 = n * n;
        let p = n - 1;
        let g = self.params.g;
        let cfg = &self.config;
        let lam = cfg.entropy_lambda;
        let mode = cfg.entropy_mode;
        let (m, lines, lo, hi, width_other) = match axis {
            Axis::X => (
                self.mesh.x.n_elem,
                self.mesh.y.n_elem,
                &self.boundary.left,
                &self.boundary.right,
                self.mesh.y.width(),
            ),
            Axis::Y => (
                self.mesh.y.n_elem,
                self.mesh.x.n_elem,
                &self.boundary.bottom,
                &self.boundary.top,
                self.mesh.x.width(),
            ),
        };
        // Node index of element `e` along the axis, line `l`, node (along, across).
        let node = |e: usize, l: usize, a: usize, c: usize| -> usize {
            match axis {
                Axis::X => self.mesh.element(e, l) * np2 + c * n + a,
                Axis::Y => self.mesh.element(l, e) * np2 + a * n + c,
            }
        };
        let nf = lines * (m + 1) * n;
        let mut flux = vec![State::ZERO; nf];
        let mut eta = vec![0.0; nf];
        let mut mass_in = 0.0;
        let mut eta_in = 0.0;
        let (fl, speed, feta): (
            fn(State, f64) -> State,
            fn(State, f64) -> f64,
            fn(State, f64, f64, EntropyMode) -> f64,
        ) = match axis {
            Axis::X => (flux_x, max_wave_speed, entropy_flux_x),
            Axis::Y => (flux_y, max_wave_speed_y, entropy_flux_y),
        };
        for l in 0..lines {
            for f in 0..=m {
                for c in 0..n {
                    let (li, ri) = if f == 0 || f == m {
                        (node(m - 1, l, p, c), node(0, l, 0, c))
                    } else {
                        (node(f - 1, l, p, c), node(f, l, 0, c))
                    };
                    let (mut ul, mut ur) = (u[li], u[ri]);
                    let bface = if f == m { self.b[li] } else { self.b[ri] };
                    if !lo.is_periodic() {
                        if f == 0 {
                            ul = lo.ghost(ur, self.x[ri], self.y[ri], t, axis);
                        } else if f == m {
                            ur = hi.ghost(ul, self.x[li], self.y[li], t, axis);
                        }
                    }
                    let s = speed(ul, g).max(speed(ur, g));
                    let (fa, fb) = (fl(ul, g), fl(ur, g));
                    let fh = rusanov(ul, ur, fa, fb, s, cfg.flux_alpha, cfg.dissipation);
                    let physical = (f == 0 || f == m) && !lo.is_periodic();
                    // same entropy fluxes as in 1D: consistent with the applied
                    // flux on the boundary, mean-variable dissipation inside
                    let eh = if physical {
                        let (si, fi) = if f == 0 { (ur, fb) } else { (ul, fa) };
                        feta(si, bface, g, mode)
                            + entropy_variables(si, bface, g, mode).dot(&(fh - fi))
                    } else {
                        let central = fb * cfg.flux_alpha + fa * (1.0 - cfg.flux_alpha);
                        let wm = entropy_variables(ur, bface, g, mode) * lam
                            + entropy_variables(ul, bface, g, mode) * (1.0 - lam);
                        lam * feta(ur, bface, g, mode)
                            + (1.0 - lam) * feta(ul, bface, g, mode)
                            + wm.dot(&(fh - central))
                    };
                    let k = (l * (m + 1) + f) * n + c;
                    flux[k] = fh;
                    eta[k] = eh;
                    let wq = width_other * self.basis.weights[c];
                    if f == 0 {
                        mass_in += wq * fh.h;
                        eta_in += wq * eh;
                    } else if f == m {
                        mass_in -= wq * fh.h;
                        eta_in -= wq * eh;
                    }
                }
            }
        }
        FaceData {
            flux,
            eta,
            mass_in,
            eta_in,
        }
    }

    pub fn rhs(&self, t: f64, u: &[State], out: &mut [State]) -> Result<Rates> {
        self.evaluate(t, u, out, None)
    }

    pub fn rhs_with_diagnostics(
        &self,
        t: f64,
        u: &[State],
        out: &mut [State],
    ) -> Result<(Rates, Vec<ElementEntropy>)> {
        let mut diag = vec![ElementEntropy::default(); self.mesh.n_elem()];
        let r = self.evaluate(t, u, out, Some(&mut diag))?;
        Ok((r, diag))
    }

    fn evaluate(
        &self,
        t: f64,
        u: &[State],
        out: &mut [State],
        diag: Option<&mut [ElementEntropy]>,
    ) -> Result<Rates> {
        self.check_admissible(u)?;
        let fx = self.faces(u, t, Axis::X);
        let fy = self.faces(u, t, Axis::Y);
        let n = self.n_nodes();
        let np2 = n * n;
        let want_diag = diag.is_some();
        let results: Vec<(f64, ElementEntropy)> = out
            .par_chunks_mut(np2)
            .enumerate()
            .map(|(el, du)| self.element_rhs(el, u, du, &fx, &fy, want_diag))
            .collect();
        let mut rates = Rates {
            mass_inflow: fx.mass_in + fy.mass_in,
            entropy_inflow: fx.eta_in + fy.eta_in,
            friction_dissipation: 0.0,
        };
        for (d, _) in &results {
            rates.friction_dissipation += d;
        }
        if let Some(diag) = diag {
            for (k, (_, e)) in results.into_iter().enumerate() {
                diag[k] = e;
            }
        }
        Ok(rates)
    }

    fn element_rhs(
        &self,
        el: usize,
        u: &[State],
        du: &mut [State],
        fx: &FaceData,
        fy: &FaceData,
        want_diag: bool,
    ) -> (f64, ElementEntropy) {
        let n = self.n_nodes();
        let np2 = n * n;
        let p = n - 1;
        let g = self.params.g;
        let cf = self.params.friction;
        let cfg = &self.config;
        let mode = cfg.entropy_mode;
        let basis = &self.basis;
        let w = &basis.weights;
        let (hx, hy) = (self.mesh.x.width(), self.mesh.y.width());
        let (nx, ny) = (self.mesh.x.n_elem, self.mesh.y.n_elem);
        let (ex, ey) = (el % nx, el / nx);
        let base = el * np2;
        let ue = &u[base..base + np2];
        let global = cfg.quadrature == QuadratureMode::GlobalFlux;
        let correct = cfg.entropy_correction != EntropyCorrection::Off;
        let need_entropy = correct || want_diag;

        for d in du.iter_mut() {
            *d = State::ZERO;
        }
        // Divergence of the global flux, reference units, per direction.
        let mut divg = [State::ZERO; MAX_NODES * MAX_NODES];

        let mut fl = [State::ZERO; MAX_NODES];
        let mut gl = [State::ZERO; MAX_NODES];
        let mut sl = [State::ZERO; MAX_NODES];
        for dir in [Axis::X, Axis::Y] {
            let (h, srcs, fluxf): (f64, &[AffineSource], fn(State, f64) -> State) = match dir {
                Axis::X => (hx, &self.src_x, flux_x),
                Axis::Y => (hy, &self.src_y, flux_y),
            };
            for l in 0..n {
                let idx = |k: usize| match dir {
                    Axis::X => l * n + k,
                    Axis::Y => k * n + l,
                };
                for k in 0..n {
                    let q = idx(k);
                    fl[k] = fluxf(ue[q], g);
                    sl[k] = srcs[base + q].apply(ue[q]);
                }
                if global {
                    for i in 0..n {
                        let mut acc = State::ZERO;
                        for k in 0..n {
                            acc += sl[k] * basis.integ[i][k];
                        }
                        gl[i] = fl[i] - acc * h;
                    }
                } else {
                    gl[..n].copy_from_slice(&fl[..n]);
                }
                let (f_lo, f_hi) = match dir {
                    Axis::X => (
                        fx.flux[(ey * (nx + 1) + ex) * n + l],
                        fx.flux[(ey * (nx + 1) + ex + 1) * n + l],
                    ),
                    Axis::Y => (
                        fy.flux[(ex * (ny + 1) + ey) * n + l],
                        fy.flux[(ex * (ny + 1) + ey + 1) * n + l],
                    ),
                };
                for i in 0..n {
                    let mut acc = State::ZERO;
                    for j in 0..n {
                        acc += (gl[j] - gl[0]) * basis.diff[i][j];
                    }
                    let q = idx(i);
                    divg[q] += acc * (1.0 / h);
                    du[q] -= acc * (1.0 / h);
                    if !global {
                        du[q] += sl[i];
                    }
                }
                du[idx(0)] += (f_lo - fl[0]) * (1.0 / (h * w[0]));
                du[idx(p)] -= (f_hi - fl[p]) * (1.0 / (h * w[p]));
            }
        }

        let mut dissipation = 0.0;
        let mut bathy_work = 0.0;
        for j in 0..n {
            for i in 0..n {
                let q = j * n + i;
                let s = ue[q];
                let wq = hx * hy * w[i] * w[j];
                dissipation += wq * cf * (s.hu * s.hu + s.hv * s.hv) / s.h;
                let (bx, by) = self.grad_b[base + q];
                bathy_work += wq * g * (s.hu * bx + s.hv * by);
            }
        }
        if !need_entropy {
            return (dissipation, ElementEntropy::default());
        }

        let mut wv = [State::ZERO; MAX_NODES * MAX_NODES];
        for q in 0..np2 {
            wv[q] = entropy_variables(ue[q], self.b[base + q], g, mode);
        }
        let mut phi = 0.0;
        for j in 0..n {
            for i in 0..n {
                let q = j * n + i;
                phi -= hx * hy * w[i] * w[j] * wv[q].dot(&du[q]);
            }
        }
        let bq = |q: usize| self.b[base + q];
        let psi = match cfg.entropy_correction {
            EntropyCorrection::GlobalFluxFlux => {
                let mut v = 0.0;
                for j in 0..n {
                    for i in 0..n {
                        let q = j * n + i;
                        v += hx * hy * w[i] * w[j] * wv[q].dot(&divg[q]);
                    }
                }
                for l in 0..n {
                    let (lo, hi) = (l * n, l * n + p);
                    let xl = fx.eta[(ey * (nx + 1) + ex) * n + l];
                    let xr = fx.eta[(ey * (nx + 1) + ex + 1) * n + l];
                    v += hy
                        * w[l]
                        * ((xr - entropy_flux_x(ue[hi], bq(hi), g, mode))
                            - (xl - entropy_flux_x(ue[lo], bq(lo), g, mode)));
                    let (bo, to) = (l, p * n + l);
                    let yb = fy.eta[(ex * (ny + 1) + ey) * n + l];
                    let yt = fy.eta[(ex * (ny + 1) + ey + 1) * n + l];
                    v += hx
                        * w[l]
                        * ((yt - entropy_flux_y(ue[to], bq(to), g, mode))
                            - (yb - entropy_flux_y(ue[bo], bq(bo), g, mode)));
                }
                v
            }
            _ => {
                let mut v = match mode {
                    EntropyMode::Total => dissipation,
                    EntropyMode::Plain => dissipation + bathy_work,
                };
                for l in 0..n {
                    v += hy
                        * w[l]
                        * (fx.eta[(ey * (nx + 1) + ex + 1) * n + l]
                            - fx.eta[(ey * (nx + 1) + ex) * n + l]);
                    v += hx
                        * w[l]
                        * (fy.eta[(ex * (ny + 1) + ey + 1) * n + l]
                            - fy.eta[(ex * (ny + 1) + ey) * n + l]);
                }
                v
            }
        };

        let mut a0x = [State::ZERO; MAX_NODES * MAX_NODES];
        let mut a0y = [State::ZERO; MAX_NODES * MAX_NODES];
        let mut norm2 = 0.0;
        for j in 0..n {
            for i in 0..n {
                let q = j * n + i;
                let mut dx = State::ZERO;
                let mut dy = State::ZERO;
                for k in 0..n {
                    dx += wv[j * n + k] * basis.diff[i][k];
                    dy += wv[k * n + i] * basis.diff[j][k];
                }
                let dx = dx * (1.0 / hx);
                let dy = dy * (1.0 / hy);
                let a0 = entropy_hessian_inverse(ue[q], g);
                a0x[q] = mat_vec(&a0, dx);
                a0y[q] = mat_vec(&a0, dy);
                norm2 += hx * hy * w[i] * w[j] * (dx.dot(&a0x[q]) + dy.dot(&a0y[q]));
            }
        }
        let floor_active = norm2 < cfg.entropy_floor;
        let alpha = if correct {
            (psi - phi) / norm2.max(cfg.entropy_floor)
        } else {
            0.0
        };
        if correct {
            for j in 0..n {
                for i in 0..n {
                    let mut d = State::ZERO;
                    for a in 0..n {
                        d += a0x[j * n + a] * (hy * w[j] * w[a] * basis.diff[a][i]);
                        d += a0y[a * n + i] * (hx * w[i] * w[a] * basis.diff[a][j]);
                    }
                    du[j * n + i] -= d * (alpha / (hx * hy * w[i] * w[j]));
                }
            }
        }
        let mut rate = 0.0;
        for j in 0..n {
            for i in 0..n {
                let q = j * n + i;
                rate += hx * hy * w[i] * w[j] * wv[q].dot(&du[q]);
            }
        }
        (
            dissipation,
            ElementEntropy {
                phi,
                psi,
                alpha,
                norm2,
                floor_active,
                entropy_rate: rate,
            },
        )
    }
}

impl SemiDiscrete for Scheme2D {
    fn len(&self) -> usize {
        self.x.len()
    }

    fn rate(&self, t: f64, u: &[State], out: &mut [State]) -> Result<Rates> {
        self.rhs(t, u, out)
    }

    fn stable_dt(&self, t: f64, u: &[State]) -> f64 {
        let g = self.params.g;
        let (hx, hy) = (self.mesh.x.width(), self.mesh.y.width());
        let s = u
            .iter()
            .map(|s| max_wave_speed(*s, g) / hx + max_wave_speed_y(*s, g) / hy)
            .fold(0.0, f64::max);
        let p = self.config.degree as f64;
        let dt = self.config.cfl / ((2.0 * p + 1.0) * s);
        if self.config.entropy_correction == EntropyCorrection::Off {
            return dt;
        }
        let mut out = vec![State::ZERO; u.len()];
        let alpha = match self.rhs_with_diagnostics(t, u, &mut out) {
            Ok((_, d)) => d.iter().map(|e| e.alpha.abs()).fold(0.0, f64::max),
            Err(_) => return dt,
        };
        let rate = alpha * self.basis.stiffness_radius() * (1.0 / (hx * hx) + 1.0 / (hy * hy));
        1.0 / (1.0 / dt + rate / self.config.cfl)
    }

    fn total_entropy(&self, u: &[State]) -> f64 {
        let n = self.n_nodes();
        let area = self.mesh.x.width() * self.mesh.y.width();
        let w = &self.basis.weights;
        compensated_sum(u.iter().enumerate().map(|(k, s)| {
            let q = k % (n * n);
            area * w[q % n]
                * w[q / n]
                * entropy(*s, self.b[k], self.params.g, self.config.entropy_mode)
        }))
    }

    fn total_mass(&self, u: &[State]) -> f64 {
        let n = self.n_nodes();
        let area = self.mesh.x.width() * self.mesh.y.width();
        let w = &self.basis.weights;
        compensated_sum(u.iter().enumerate().map(|(k, s)| {
            let q = k % (n * n);
            area * w[q % n] * w[q / n] * s.h
        }))
    }

    fn integrator(&self) -> TimeIntegrator {
        self.config.integrator()
    }

    fn describe(&self, k: usize) -> String {
        format!("node {} (x = {}, y = {})", k, self.x[k], self.y[k])
    }
}

/// Extends a discrete 1D equilibrium along x uniformly in y. Only valid for
/// bathymetry that does not depend on y.
pub fn directional_steady_solution(scheme: &Scheme2D, spec: &SteadyStateSpec) -> Result<Field2D> {
    let s1 = Scheme1D::new(
        scheme.mesh.x,
        scheme.config,
        scheme.params.clone(),
        BoundarySpec::periodic(),
    )?;
    let sol = discrete_global_flux_solution(&s1, spec)?;
    let n = scheme.n_nodes();
    let field = Field2D::from_fn(&scheme.mesh, &scheme.basis, |_, _| State::ZERO);
    let mut field = field;
    for ey in 0..scheme.mesh.y.n_elem {
        for ex in 0..scheme.mesh.x.n_elem {
            for j in 0..n {
                for i in 0..n {
                    let k = field.index(ex, ey, i, j);
                    field.data[k] = sol.field.node(ex, i);
                }
            }
        }
    }
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::{Bathymetry, Coriolis};
    use crate::solver::Dissipation;

    fn lake(cfg: SchemeConfig) -> (Scheme2D, Field2D) {
        let params = PhysParams::new(9.81).with_bathymetry(Bathymetry::new(
            |x, y| 0.3 * (-(x - 0.5).powi(2) * 10.0 - (y - 0.4).powi(2) * 8.0).exp(),
            |x, y| {
                let e = 0.3 * (-(x - 0.5).powi(2) * 10.0 - (y - 0.4).powi(2) * 8.0).exp();
                (-20.0 * (x - 0.5) * e, -16.0 * (y - 0.4) * e)
            },
        ));
        let mesh = Mesh2D::new((0.0, 1.0), (0.0, 1.0), 6, 5).unwrap();
        let b = params.bathymetry.clone();
        let s = Scheme2D::new(mesh, cfg, params, BoundarySpec2D::reflective_all()).unwrap();
        let f = Field2D::from_fn(&mesh, &s.basis, |x, y| {
            State::new(1.0 - b.at(x, y), 0.0, 0.0)
        });
        (s, f)
    }

    #[test]
    fn lake_at_rest_is_preserved_by_modified_source() {
        let (s, f) = lake(SchemeConfig::well_balanced(3));
        let mut out = f.clone();
        s.rhs(0.0, &f.data, &mut out.data).unwrap();
        let m = out.data.iter().map(|d| d.max_abs()).fold(0.0, f64::max);
        assert!(m < 1e-12, "{m}");
    }

    #[test]
    fn basic_source_is_not_well_balanced() {
        let (s, f) = lake(SchemeConfig::non_well_balanced(3));
        let mut out = f.clone();
        s.rhs(0.0, &f.data, &mut out.data).unwrap();
        let m = out.data.iter().map(|d| d.max_abs()).fold(0.0, f64::max);
        assert!(m > 1e-6, "{m}");
    }

    #[test]
    fn unpaired_periodic_rejected() {
        let mut b = BoundarySpec2D::periodic();
        b.top = Boundary::Reflective;
        assert!(b.validate().is_err());
    }

    fn periodic_bump(cfg: SchemeConfig) -> (Scheme2D, Field2D) {
        let params = PhysParams::new(9.81).with_coriolis(Coriolis::constant(0.7));
        let mesh = Mesh2D::new((0.0, 1.0), (0.0, 1.0), 5, 4).unwrap();
        let s = Scheme2D::new(mesh, cfg, params, BoundarySpec2D::periodic()).unwrap();
        let f = Field2D::from_fn(&mesh, &s.basis, |x, y| {
            let r = (x - 0.5).powi(2) + (y - 0.5).powi(2);
            State::new(1.0 + 0.2 * (-20.0 * r).exp(), 0.3 + 0.1 * y, -0.2 * x)
        });
        (s, f)
    }

    #[test]
    fn corrected_cell_entropy_balance() {
        for corr in [
            EntropyCorrection::AnalyticalFlux,
            EntropyCorrection::GlobalFluxFlux,
        ] {
            for diss in [Dissipation::None, Dissipation::Rusanov] {
                let mut cfg = SchemeConfig::well_balanced(3).with_entropy_correction(corr);
                cfg.dissipation = diss;
                let (s, f) = periodic_bump(cfg);
                let mut out = f.clone();
                let (_, d) = s.rhs_with_diagnostics(0.0, &f.data, &mut out.data).unwrap();
                for e in &d {
                    let r = e.entropy_rate + e.psi;
                    assert!(r.abs() < 1e-12 * e.phi.abs().max(1.0), "{e:?}");
                }
                if corr == EntropyCorrection::AnalyticalFlux {
                    let total: f64 = d.iter().map(|e| e.entropy_rate).sum();
                    assert!(total.abs() < 1e-12, "{diss:?} {total}");
                }
            }
        }
    }
}
