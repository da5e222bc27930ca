//! Gauss-Lobatto nodal basis on the reference interval [0, 1].
//!
//! Provides the nodes, weights, differentiation matrix, boundary matrix and
//! the integration matrix used by the global-flux quadrature.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Largest supported polynomial degree.
pub const MAX_DEGREE: usize = 8;
/// Largest number of nodes per element direction.
pub const MAX_NODES: usize = MAX_DEGREE + 1;

/// Gauss-Lobatto nodal basis of degree `p` on [0, 1].
#[derive(Debug, Clone)]
pub struct GLBasis {
    pub degree: usize,
    /// Nodes in increasing order, `nodes[0] = 0`, `nodes[p] = 1`.
    pub nodes: Vec<f64>,
    /// Quadrature weights, summing to one.
    pub weights: Vec<f64>,
    /// `diff[i][j]` is the derivative of the j-th Lagrange polynomial at node i.
    pub diff: Vec<Vec<f64>>,
    /// `integ[j][k]` is the integral of the k-th Lagrange polynomial over [0, nodes[j]].
    pub integ: Vec<Vec<f64>>,
    /// Diagonal of the boundary matrix, `diag(-1, 0, .., 0, 1)`.
    pub boundary: Vec<f64>,
    bary: Vec<f64>,
    stiffness: f64,
}

fn stiffness_radius(diff: &[Vec<f64>], weights: &[f64]) -> f64 {
    let n = weights.len();
    // symmetric similarity transform M^{1/2} (M^-1 D^T M D) M^{-1/2}
    let k = DMatrix::from_fn(n, n, |i, j| {
        (0..n)
            .map(|q| weights[q] * diff[q][i] * diff[q][j])
            .sum::<f64>()
            / (weights[i] * weights[j]).sqrt()
    });
    k.symmetric_eigenvalues().max()
}

/// Legendre polynomial `P_n` and its derivative at `x`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    let (mut d0, mut d1) = (0.0, 1.0);
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        let d2 = d0 + (2.0 * kf + 1.0) * p1;
        p0 = p1;
        p1 = p2;
        d0 = d1;
        d1 = d2;
    }
    (p1, d1)
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = -(std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, z);
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// Gauss-Lobatto nodes and weights on [-1, 1] for degree `p`.
fn gauss_lobatto(p: usize) -> (Vec<f64>, Vec<f64>) {
    let n = p + 1;
    let mut x = vec![0.0; n];
    x[0] = -1.0;
    x[p] = 1.0;
    let nf = p as f64;
    for i in 1..p {
        // Newton on P_p', seeded with Chebyshev-Lobatto points.
        let mut z = -(std::f64::consts::PI * i as f64 / nf).cos();
        for _ in 0..100 {
            let (pp, dp) = legendre(p, z);
            let d2p = (2.0 * z * dp - nf * (nf + 1.0) * pp) / (1.0 - z * z);
            let dz = dp / d2p;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = z;
    }
    // Enforce exact symmetry.
    for i in 0..n / 2 {
        let s = 0.5 * (x[p - i] - x[i]);
        x[i] = -s;
        x[p - i] = s;
    }
    if n % 2 == 1 {
        x[p / 2] = 0.0;
    }
    let w = x
        .iter()
        .map(|&z| {
            let (pp, _) = legendre(p, z);
            2.0 / (nf * (nf + 1.0) * pp * pp)
        })
        .collect();
    (x, w)
}

impl GLBasis {
    /// Builds the basis of degree `p`, `1 <= p <= 8`.
    pub fn new(p: usize) -> Result<Self> {
        if !(1..=MAX_DEGREE).contains(&p) {
            return Err(Error::UnsupportedDegree(p));
        }
        let n = p + 1;
        let (x, w) = gauss_lobatto(p);
        let nodes: Vec<f64> = x.iter().map(|&z| 0.5 * (z + 1.0)).collect();
        let weights: Vec<f64> = w.iter().map(|&v| 0.5 * v).collect();

        let bary: Vec<f64> = (0..n)
            .map(|j| {
                let prod: f64 = (0..n)
                    .filter(|&m| m != j)
                    .map(|m| nodes[j] - nodes[m])
                    .product();
                1.0 / prod
            })
            .collect();

        let mut diff = vec![vec![0.0; n]; n];
        for i in 0..n {
            let mut row_sum = 0.0;
            for j in 0..n {
                if i != j {
                    diff[i][j] = bary[j] / bary[i] / (nodes[i] - nodes[j]);
                    row_sum += diff[i][j];
                }
            }
            diff[i][i] = -row_sum;
        }

        let mut basis = GLBasis {
            degree: p,
            nodes,
            weights,
            diff,
            integ: vec![vec![0.0; n]; n],
            boundary: (0..n)
                .map(|i| match i {
                    0 => -1.0,
                    i if i == p => 1.0,
                    _ => 0.0,
                })
                .collect(),
            bary,
            stiffness: 0.0,
        };

        let (gx, gw) = gauss_legendre(n);
        for j in 1..n {
            let xj = basis.nodes[j];
            for k in 0..n {
                basis.integ[j][k] = gx
                    .iter()
                    .zip(&gw)
                    .map(|(&z, &wq)| 0.5 * xj * wq * basis.lagrange(k, 0.5 * xj * (z + 1.0)))
                    .sum();
            }
        }
        // The last row integrates over the whole element and must equal the weights.
        basis.integ[p].clone_from(&basis.weights);
        basis.stiffness = stiffness_radius(&basis.diff, &basis.weights);
        Ok(basis)
    }

    pub fn n_nodes(&self) -> usize {
        self.degree + 1
    }

    /// Value of the k-th Lagrange polynomial at reference coordinate `x`.
    pub fn lagrange(&self, k: usize, x: f64) -> f64 {
        let mut v = 1.0;
        for m in 0..self.n_nodes() {
            if m != k {
                v *= (x - self.nodes[m]) / (self.nodes[k] - self.nodes[m]);
            }
        }
        v
    }

    /// Evaluates the interpolant of nodal `values` at reference coordinate `x`.
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        let n = self.n_nodes();
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..n {
            let dx = x - self.nodes[j];
            if dx == 0.0 {
                return values[j];
            }
            let t = self.bary[j] / dx;
            num += t * values[j];
            den += t;
        }
        num / den
    }

    /// Applies the differentiation matrix to nodal values (reference coordinates).
    pub fn differentiate(&self, values: &[f64], out: &mut [f64]) {
        for (i, row) in self.diff.iter().enumerate() {
            out[i] = row.iter().zip(values).map(|(d, v)| d * v).sum();
        }
    }

    /// Spectral radius of the weak second-derivative operator `M^-1 D^T M D` on [0, 1].
    pub fn stiffness_radius(&self) -> f64 {
        self.stiffness
    }

    /// Quadrature of nodal values over [0, 1].
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }
}

/// Builds the Gauss-Lobatto basis of degree `p`.
pub fn build_basis(p: usize) -> Result<GLBasis> {
    GLBasis::new(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rejects_degree_out_of_range() {
        assert!(matches!(GLBasis::new(0), Err(Error::UnsupportedDegree(0))));
        assert!(matches!(GLBasis::new(9), Err(Error::UnsupportedDegree(9))));
    }

    #[test]
    fn degree_two_matches_simpson() {
        let b = GLBasis::new(2).unwrap();
        assert_abs_diff_eq!(b.nodes[1], 0.5, epsilon = 1e-15);
        let w = [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0];
        let integ = [
            [0.0, 0.0, 0.0],
            [5.0 / 24.0, 1.0 / 3.0, -1.0 / 24.0],
            [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
        ];
        for i in 0..3 {
            assert_abs_diff_eq!(b.weights[i], w[i], epsilon = 1e-15);
            for k in 0..3 {
                assert_abs_diff_eq!(b.integ[i][k], integ[i][k], epsilon = 1e-14);
            }
        }
        let d = [[-3.0, 4.0, -1.0], [-1.0, 0.0, 1.0], [1.0, -4.0, 3.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(b.diff[i][j], d[i][j], epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn degree_one_is_trapezoid() {
        let b = GLBasis::new(1).unwrap();
        assert_eq!(b.nodes, vec![0.0, 1.0]);
        assert_abs_diff_eq!(b.weights[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(b.integ[1][0], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn summation_by_parts_holds() {
        for p in 1..=MAX_DEGREE {
            let b = GLBasis::new(p).unwrap();
            let n = p + 1;
            for i in 0..n {
                for j in 0..n {
                    let q = b.weights[i] * b.diff[i][j] + b.weights[j] * b.diff[j][i];
                    let bij = if i == j { b.boundary[i] } else { 0.0 };
                    assert_abs_diff_eq!(q, bij, epsilon = 1e-13);
                }
            }
        }
    }

    #[test]
    fn quadrature_exact_up_to_degree_2p_minus_1() {
        for p in 1..=MAX_DEGREE {
            let b = GLBasis::new(p).unwrap();
            for d in 0..=(2 * p - 1) {
                let vals: Vec<f64> = b.nodes.iter().map(|x| x.powi(d as i32)).collect();
                assert_abs_diff_eq!(b.integrate(&vals), 1.0 / (d as f64 + 1.0), epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn integration_matrix_integrates_polynomials() {
        for p in 1..=MAX_DEGREE {
            let b = GLBasis::new(p).unwrap();
            for d in 0..=p {
                let vals: Vec<f64> = b.nodes.iter().map(|x| x.powi(d as i32)).collect();
                for j in 0..=p {
                    let approx: f64 = (0..=p).map(|k| b.integ[j][k] * vals[k]).sum();
                    let exact = b.nodes[j].powi(d as i32 + 1) / (d as f64 + 1.0);
                    assert_abs_diff_eq!(approx, exact, epsilon = 1e-13);
                }
            }
        }
    }

    #[test]
    fn interpolation_reproduces_nodal_values() {
        let b = GLBasis::new(4).unwrap();
        let vals: Vec<f64> = b.nodes.iter().map(|x| x.powi(3) - x).collect();
        for x in [0.1, 0.37, 0.9] {
            assert_abs_diff_eq!(b.interpolate(&vals, x), x * x * x - x, epsilon = 1e-14);
        }
    }

    #[test]
    fn stiffness_radius_of_linear_basis() {
        let b = GLBasis::new(1).unwrap();
        assert_abs_diff_eq!(b.stiffness_radius(), 4.0, epsilon = 1e-13);
        let mut last = 0.0;
        for p in 2..=8 {
            let r = GLBasis::new(p).unwrap().stiffness_radius();
            assert!(r > last);
            last = r;
        }
    }
}
