//! Legacy ASCII VTK snapshots of cell-averaged fields.

use std::io::{self, Write};

use crate::evolve::State;
use crate::wgops::WgSpace;
use crate::Sym2;

/// Per-cell means of the discrete stress and interior velocity.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CellMeans {
    pub stress: Vec<Sym2>,
    pub velocity: Vec<[f64; 2]>,
}

pub fn cell_means(space: &WgSpace, eta: &[f64], beta: &[f64]) -> CellMeans {
    let l = &space.layout;
    let mut out = CellMeans::default();
    for lc in &space.cells {
        let area = space.mesh.cell_area(lc.cell);
        let mean = |coeffs: &[f64], cs: &crate::polyspace::CellSpace| cs.quad.integrate(|x| cs.eval(coeffs, x)) / area;
        out.stress.push([0, 1, 2].map(|c| mean(&eta[l.stress_range(lc.cell, c)], &lc.stress)));
        out.velocity.push([0, 1].map(|r| mean(&beta[l.velocity_range(lc.cell, r)], &lc.velocity)));
    }
    out
}

/// Writes the mesh with cell data `sigma11`, `sigma22`, `sigma12` and the
/// vector `velocity`.
pub fn write_vtk<W: Write>(mut w: W, space: &WgSpace, state: &State) -> io::Result<()> {
    let mesh = &space.mesh;
    let means = cell_means(space, &state.eta, &state.beta);
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "wgmaxwell step {} t={}", state.step, state.time)?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(w, "POINTS {} double", mesh.vertices.len())?;
    for p in &mesh.vertices {
        writeln!(w, "{} {} 0", p[0], p[1])?;
    }
    let nc = mesh.num_cells();
    writeln!(w, "CELLS {} {}", nc, 4 * nc)?;
    for c in &mesh.cells {
        writeln!(w, "3 {} {} {}", c[0], c[1], c[2])?;
    }
    writeln!(w, "CELL_TYPES {nc}")?;
    for _ in 0..nc {
        writeln!(w, "5")?;
    }
    writeln!(w, "CELL_DATA {nc}")?;
    for (c, name) in ["sigma11", "sigma22", "sigma12"].iter().enumerate() {
        writeln!(w, "SCALARS {name} double 1")?;
        writeln!(w, "LOOKUP_TABLE default")?;
        for s in &means.stress {
            writeln!(w, "{:e}", s[c])?;
        }
    }
    writeln!(w, "VECTORS velocity double")?;
    for v in &means.velocity {
        writeln!(w, "{:e} {:e} 0", v[0], v[1])?;
    }
    Ok(())
}
