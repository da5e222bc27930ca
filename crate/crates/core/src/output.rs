//! CSV writers for solutions, entropy series, convergence tables and
//! perturbation profiles.
//!
//! Floats are printed with 17 significant digits and rows are ordered element
//! by element, so repeated runs produce identical bytes.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::Result;
use crate::harness::ConvergenceReport;
use crate::mesh::{Field1D, Field2D};
use crate::solver::{EntropySample, Scheme1D};
use crate::solver2d::Scheme2D;

pub const SOLUTION_HEADER_1D: &str = "element,node,x,h,hu,hv,b";
pub const SOLUTION_HEADER_2D: &str = "element,node,x,y,h,hu,hv,b";
pub const ENTROPY_HEADER: &str = "t,total_entropy,n_tot";
pub const CONVERGENCE_HEADER: &str =
    "p,N,err_all_h,err_end_h,err_all_hu,err_end_hu,err_all_hv,err_end_hv,slope_all,slope_end";
pub const PROFILE_HEADER: &str = "element,node,x,dh";

/// Float in the shared output format.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:.16e}")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "nan".into(), fmt_f64)
}

pub fn write_solution_1d<W: Write>(w: &mut W, scheme: &Scheme1D, field: &Field1D) -> Result<()> {
    writeln!(w, "{SOLUTION_HEADER_1D}")?;
    let n = field.n_nodes;
    for (k, s) in field.data.iter().enumerate() {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            k / n,
            k % n,
            fmt_f64(scheme.x[k]),
            fmt_f64(s.h),
            fmt_f64(s.hu),
            fmt_f64(s.hv),
            fmt_f64(scheme.b[k])
        )?;
    }
    Ok(())
}

/// Same schema as 1D with a `y` column; `node` is the in-element index `j * n + i`.
pub fn write_solution_2d<W: Write>(w: &mut W, scheme: &Scheme2D, field: &Field2D) -> Result<()> {
    writeln!(w, "{SOLUTION_HEADER_2D}")?;
    let per = field.per_element();
    for (k, s) in field.data.iter().enumerate() {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            k / per,
            k % per,
            fmt_f64(scheme.x[k]),
            fmt_f64(scheme.y[k]),
            fmt_f64(s.h),
            fmt_f64(s.hu),
            fmt_f64(s.hv),
            fmt_f64(scheme.b[k])
        )?;
    }
    Ok(())
}

pub fn write_entropy<W: Write>(w: &mut W, series: &[EntropySample]) -> Result<()> {
    writeln!(w, "{ENTROPY_HEADER}")?;
    for s in series {
        writeln!(
            w,
            "{},{},{}",
            fmt_f64(s.t),
            fmt_f64(s.total_entropy),
            fmt_f64(s.n_tot)
        )?;
    }
    Ok(())
}

/// One row per `(p, N)` cell; the slope columns repeat the fit of `h` for the cell's degree.
pub fn write_convergence<W: Write>(w: &mut W, report: &ConvergenceReport) -> Result<()> {
    writeln!(w, "{CONVERGENCE_HEADER}")?;
    for c in &report.cells {
        let (sa, se) = report
            .slope(c.p)
            .map_or((None, None), |s| (s.all[0], s.end[0]));
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            c.p,
            c.n,
            fmt_f64(c.all[0]),
            fmt_f64(c.end[0]),
            fmt_f64(c.all[1]),
            fmt_f64(c.end[1]),
            fmt_f64(c.all[2]),
            fmt_f64(c.end[2]),
            fmt_opt(sa),
            fmt_opt(se)
        )?;
    }
    Ok(())
}

/// Depth deviation `h - h*` at the nodes of a 1D mesh with `n_nodes` per element.
pub fn write_profile<W: Write>(w: &mut W, x: &[f64], dh: &[f64], n_nodes: usize) -> Result<()> {
    writeln!(w, "{PROFILE_HEADER}")?;
    for (k, (x, d)) in x.iter().zip(dh).enumerate() {
        writeln!(
            w,
            "{},{},{},{}",
            k / n_nodes,
            k % n_nodes,
            fmt_f64(*x),
            fmt_f64(*d)
        )?;
    }
    Ok(())
}

/// Creates `path` and hands a buffered writer to `f`.
pub fn to_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    f(&mut w)?;
    w.flush()?;
    Ok(())
}
