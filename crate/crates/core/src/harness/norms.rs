//! Discrete L1 error norms.

use crate::error::Result;
use crate::mesh::{Field1D, Field2D, Mesh1D, Mesh2D};
use crate::physics::State;
use crate::quadrature::GLBasis;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeSet {
    /// Every nodal value, interface nodes counted once per element.
    All,
    /// Element end points only, shared interfaces counted once.
    Ends,
}

/// Mean absolute nodal error per conserved variable `(h, hu, hv)`.
pub fn error_norms(
    field: &Field1D,
    mesh: &Mesh1D,
    basis: &GLBasis,
    exact: impl Fn(f64) -> Result<State>,
    mode: NodeSet,
) -> Result<[f64; 3]> {
    let n = basis.n_nodes();
    let mut sum = [0.0; 3];
    let mut count = 0usize;
    let mut add = |u: State, x: f64| -> Result<()> {
        let d = u - exact(x)?;
        for (k, s) in sum.iter_mut().enumerate() {
            *s += d.component(k).abs();
        }
        count += 1;
        Ok(())
    };
    match mode {
        NodeSet::All => {
            for e in 0..field.n_elem {
                for i in 0..n {
                    add(field.node(e, i), mesh.node_x(basis, e, i))?;
                }
            }
        }
        NodeSet::Ends => {
            add(field.node(0, 0), mesh.node_x(basis, 0, 0))?;
            for e in 0..field.n_elem {
                add(field.node(e, n - 1), mesh.node_x(basis, e, n - 1))?;
            }
        }
    }
    Ok(sum.map(|s| s / count as f64))
}

/// Mean absolute nodal error over all nodes of a two-dimensional field.
pub fn error_norms_2d(
    field: &Field2D,
    mesh: &Mesh2D,
    basis: &GLBasis,
    exact: impl Fn(f64, f64) -> State,
) -> [f64; 3] {
    let n = basis.n_nodes();
    let mut sum = [0.0; 3];
    for ey in 0..field.ny {
        for ex in 0..field.nx {
            for j in 0..n {
                let y = mesh.y.node_x(basis, ey, j);
                for i in 0..n {
                    let x = mesh.x.node_x(basis, ex, i);
                    let d = field.node(ex, ey, i, j) - exact(x, y);
                    for (k, s) in sum.iter_mut().enumerate() {
                        *s += d.component(k).abs();
                    }
                }
            }
        }
    }
    sum.map(|s| s / field.data.len() as f64)
}
