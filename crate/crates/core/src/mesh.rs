//! Uniform meshes and nodal fields.

use crate::error::{Error, Result};
use crate::physics::State;
use crate::quadrature::GLBasis;

/// Uniform partition of `[x_left, x_right]` into `n_elem` elements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh1D {
    pub x_left: f64,
    pub x_right: f64,
    pub n_elem: usize,
}

impl Mesh1D {
    pub fn new(x_left: f64, x_right: f64, n_elem: usize) -> Result<Self> {
        if n_elem == 0 || !(x_right > x_left) {
            return Err(Error::Config(format!(
                "invalid mesh [{x_left}, {x_right}] with {n_elem} elements"
            )));
        }
        Ok(Mesh1D {
            x_left,
            x_right,
            n_elem,
        })
    }

    pub fn width(&self) -> f64 {
        (self.x_right - self.x_left) / self.n_elem as f64
    }

    pub fn element_left(&self, e: usize) -> f64 {
        self.x_left + e as f64 * self.width()
    }

    /// Physical coordinate of node `i` of element `e`.
    pub fn node_x(&self, basis: &GLBasis, e: usize, i: usize) -> f64 {
        if i == basis.degree && e + 1 == self.n_elem {
            return self.x_right;
        }
        self.element_left(e) + self.width() * basis.nodes[i]
    }

    /// All node coordinates, element by element.
    pub fn nodes(&self, basis: &GLBasis) -> Vec<f64> {
        (0..self.n_elem)
            .flat_map(|e| (0..basis.n_nodes()).map(move |i| (e, i)))
            .map(|(e, i)| self.node_x(basis, e, i))
            .collect()
    }

    /// Element containing `x` and the reference coordinate inside it.
    pub fn locate(&self, x: f64) -> (usize, f64) {
        let s = (x - self.x_left) / self.width();
        let e = (s.floor().max(0.0) as usize).min(self.n_elem - 1);
        (e, s - e as f64)
    }
}

/// Uniform Cartesian mesh of `nx * ny` rectangles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh2D {
    pub x: Mesh1D,
    pub y: Mesh1D,
}

impl Mesh2D {
    pub fn new(x_range: (f64, f64), y_range: (f64, f64), nx: usize, ny: usize) -> Result<Self> {
        Ok(Mesh2D {
            x: Mesh1D::new(x_range.0, x_range.1, nx)?,
            y: Mesh1D::new(y_range.0, y_range.1, ny)?,
        })
    }

    pub fn n_elem(&self) -> usize {
        self.x.n_elem * self.y.n_elem
    }

    /// Linear element index, x fastest.
    pub fn element(&self, ex: usize, ey: usize) -> usize {
        ey * self.x.n_elem + ex
    }
}

/// Nodal values on a 1D mesh, stored element by element.
#[derive(Debug, Clone, PartialEq)]
pub struct Field1D {
    pub n_elem: usize,
    pub n_nodes: usize,
    pub data: Vec<State>,
}

impl Field1D {
    pub fn zeros(n_elem: usize, n_nodes: usize) -> Self {
        Field1D {
            n_elem,
            n_nodes,
            data: vec![State::ZERO; n_elem * n_nodes],
        }
    }

    /// Nodal projection of `f`.
    pub fn from_fn(mesh: &Mesh1D, basis: &GLBasis, f: impl Fn(f64) -> State) -> Self {
        let data = mesh.nodes(basis).into_iter().map(f).collect();
        Field1D {
            n_elem: mesh.n_elem,
            n_nodes: basis.n_nodes(),
            data,
        }
    }

    /// Fallible nodal projection.
    pub fn try_from_fn(
        mesh: &Mesh1D,
        basis: &GLBasis,
        f: impl Fn(f64) -> Result<State>,
    ) -> Result<Self> {
        let data = mesh
            .nodes(basis)
            .into_iter()
            .map(f)
            .collect::<Result<Vec<_>>>()?;
        Ok(Field1D {
            n_elem: mesh.n_elem,
            n_nodes: basis.n_nodes(),
            data,
        })
    }

    pub fn node(&self, e: usize, i: usize) -> State {
        self.data[e * self.n_nodes + i]
    }

    pub fn element(&self, e: usize) -> &[State] {
        &self.data[e * self.n_nodes..(e + 1) * self.n_nodes]
    }

    pub fn first(&self) -> State {
        self.data[0]
    }

    pub fn last(&self) -> State {
        self.data[self.data.len() - 1]
    }

    /// Largest nodal difference over all components.
    pub fn max_diff(&self, other: &Field1D) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).max_abs())
            .fold(0.0, f64::max)
    }
}

/// Nodal values on a 2D mesh. Elements are ordered x fastest; inside an
/// element node `(i, j)` sits at `j * n + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    pub nx: usize,
    pub ny: usize,
    pub n_nodes: usize,
    pub data: Vec<State>,
}

impl Field2D {
    pub fn from_fn(mesh: &Mesh2D, basis: &GLBasis, f: impl Fn(f64, f64) -> State) -> Self {
        let n = basis.n_nodes();
        let mut data = Vec::with_capacity(mesh.n_elem() * n * n);
        for ey in 0..mesh.y.n_elem {
            for ex in 0..mesh.x.n_elem {
                for j in 0..n {
                    let y = mesh.y.node_x(basis, ey, j);
                    for i in 0..n {
                        data.push(f(mesh.x.node_x(basis, ex, i), y));
                    }
                }
            }
        }
        Field2D {
            nx: mesh.x.n_elem,
            ny: mesh.y.n_elem,
            n_nodes: n,
            data,
        }
    }

    pub fn per_element(&self) -> usize {
        self.n_nodes * self.n_nodes
    }

    pub fn index(&self, ex: usize, ey: usize, i: usize, j: usize) -> usize {
        (ey * self.nx + ex) * self.per_element() + j * self.n_nodes + i
    }

    pub fn node(&self, ex: usize, ey: usize, i: usize, j: usize) -> State {
        self.data[self.index(ex, ey, i, j)]
    }

    pub fn max_diff(&self, other: &Field2D) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).max_abs())
            .fold(0.0, f64::max)
    }
}
