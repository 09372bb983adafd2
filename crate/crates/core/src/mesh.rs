//! Uniform triangulations of the unit square.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::{Error, Point, Result};

/// How each of the `M x M` squares is split into triangles.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Pattern {
    /// Two right triangles, diagonal from lower-left to upper-right.
    #[default]
    DiagonalNe,
    /// Two right triangles, diagonal from lower-right to upper-left.
    DiagonalNw,
    /// Four triangles meeting at the square's center.
    Crisscross,
}

impl Pattern {
    pub const ALL: [Pattern; 3] = [Pattern::DiagonalNe, Pattern::DiagonalNw, Pattern::Crisscross];

    pub fn as_str(self) -> &'static str {
        match self {
            Pattern::DiagonalNe => "diagonal-ne",
            Pattern::DiagonalNw => "diagonal-nw",
            Pattern::Crisscross => "crisscross",
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "diagonal-ne" | "ne" => Ok(Pattern::DiagonalNe),
            "diagonal-nw" | "nw" => Ok(Pattern::DiagonalNw),
            "crisscross" => Ok(Pattern::Crisscross),
            other => Err(Error::InvalidConfig(format!("unknown mesh pattern '{other}'"))),
        }
    }
}

/// A mesh edge. `vertices[0] < vertices[1]` fixes the global orientation used
/// to parameterize traces on the edge.
#[derive(Clone, Debug)]
pub struct Edge {
    pub vertices: [usize; 2],
    pub cells: [usize; 2],
    pub num_cells: usize,
    pub boundary: bool,
}

impl Edge {
    pub fn adjacent_cells(&self) -> &[usize] {
        &self.cells[..self.num_cells]
    }
}

/// Local edge `i` of a cell runs from local vertex `i` to `i + 1` (mod 3).
#[derive(Clone, Copy, Debug)]
pub struct CellEdge {
    pub edge: usize,
    /// `+1` if the global edge orientation agrees with the counterclockwise
    /// traversal of the cell, `-1` otherwise.
    pub sign: f64,
    /// Unit normal pointing out of the cell.
    pub normal: Point,
}

#[derive(Clone, Debug)]
pub struct Mesh {
    pub m: usize,
    pub pattern: Pattern,
    pub vertices: Vec<Point>,
    /// Counterclockwise vertex triples.
    pub cells: Vec<[usize; 3]>,
    pub edges: Vec<Edge>,
    pub cell_edges: Vec<[CellEdge; 3]>,
    /// Cell diameters (longest edge).
    pub cell_diameters: Vec<f64>,
    pub edge_lengths: Vec<f64>,
}

/// Builds the `M x M` uniform triangulation of `[0,1]^2`.
pub fn build_uniform_mesh(m: usize, pattern: Pattern) -> Result<Mesh> {
    if m == 0 {
        return Err(Error::InvalidConfig("mesh resolution M must be at least 1".into()));
    }
    let n = m + 1;
    let inv = 1.0 / m as f64;
    let mut vertices: Vec<Point> = Vec::with_capacity(n * n + m * m);
    for j in 0..n {
        for i in 0..n {
            vertices.push([i as f64 * inv, j as f64 * inv]);
        }
    }
    let lattice = |i: usize, j: usize| j * n + i;

    let mut cells = Vec::new();
    for j in 0..m {
        for i in 0..m {
            let a = lattice(i, j);
            let b = lattice(i + 1, j);
            let c = lattice(i + 1, j + 1);
            let d = lattice(i, j + 1);
            match pattern {
                Pattern::DiagonalNe => {
                    cells.push([a, b, c]);
                    cells.push([a, c, d]);
                }
                Pattern::DiagonalNw => {
                    cells.push([a, b, d]);
                    cells.push([b, c, d]);
                }
                Pattern::Crisscross => {
                    let e = vertices.len();
                    vertices.push([(i as f64 + 0.5) * inv, (j as f64 + 0.5) * inv]);
                    cells.push([a, b, e]);
                    cells.push([b, c, e]);
                    cells.push([c, d, e]);
                    cells.push([d, a, e]);
                }
            }
        }
    }

    let mut edge_index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut cell_edges = Vec::with_capacity(cells.len());
    for (cell, verts) in cells.iter().enumerate() {
        let mut local = [CellEdge { edge: 0, sign: 1.0, normal: [0.0, 0.0] }; 3];
        for (i, slot) in local.iter_mut().enumerate() {
            let p = verts[i];
            let q = verts[(i + 1) % 3];
            let key = (p.min(q), p.max(q));
            let e = *edge_index.entry(key).or_insert_with(|| {
                edges.push(Edge { vertices: [key.0, key.1], cells: [cell, usize::MAX], num_cells: 0, boundary: false });
                edges.len() - 1
            });
            let edge = &mut edges[e];
            edge.cells[edge.num_cells] = cell;
            edge.num_cells += 1;

            let (xp, xq) = (vertices[p], vertices[q]);
            let (dx, dy) = (xq[0] - xp[0], xq[1] - xp[1]);
            let len = dx.hypot(dy);
            *slot = CellEdge { edge: e, sign: if p < q { 1.0 } else { -1.0 }, normal: [dy / len, -dx / len] };
        }
        cell_edges.push(local);
    }
    for edge in &mut edges {
        edge.boundary = edge.num_cells == 1;
    }

    let edge_lengths: Vec<f64> = edges
        .iter()
        .map(|e| {
            let (a, b) = (vertices[e.vertices[0]], vertices[e.vertices[1]]);
            (b[0] - a[0]).hypot(b[1] - a[1])
        })
        .collect();
    let cell_diameters = cell_edges.iter().map(|ce| ce.iter().map(|c| edge_lengths[c.edge]).fold(0.0, f64::max)).collect();

    Ok(Mesh { m, pattern, vertices, cells, edges, cell_edges, cell_diameters, edge_lengths })
}

impl Mesh {
    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_boundary_edges(&self) -> usize {
        self.edges.iter().filter(|e| e.boundary).count()
    }

    pub fn cell_points(&self, cell: usize) -> [Point; 3] {
        self.cells[cell].map(|v| self.vertices[v])
    }

    pub fn cell_area(&self, cell: usize) -> f64 {
        let [a, b, c] = self.cell_points(cell);
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
    }

    pub fn cell_centroid(&self, cell: usize) -> Point {
        let [a, b, c] = self.cell_points(cell);
        [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
    }

    /// Endpoints of an edge in its global orientation.
    pub fn edge_points(&self, edge: usize) -> [Point; 2] {
        self.edges[edge].vertices.map(|v| self.vertices[v])
    }

    pub fn edge_midpoint(&self, edge: usize) -> Point {
        let [a, b] = self.edge_points(edge);
        [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
    }

    /// Point on the edge at parameter `s` in `[-1/2, 1/2]`, measured in units
    /// of the edge length along the global orientation.
    pub fn edge_point(&self, edge: usize, s: f64) -> Point {
        let [a, b] = self.edge_points(edge);
        let mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
        [mid[0] + s * (b[0] - a[0]), mid[1] + s * (b[1] - a[1])]
    }

    /// Outward normal of `cell` on one of its edges.
    pub fn outward_normal(&self, cell: usize, edge: usize) -> Option<Point> {
        self.cell_edges[cell].iter().find(|c| c.edge == edge).map(|c| c.normal)
    }
}

/// Shape statistics of a mesh.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshStats {
    /// Maximum cell diameter.
    pub h: f64,
    /// Smallest interior angle over all cells, in degrees.
    pub min_angle: f64,
}

pub fn mesh_stats(mesh: &Mesh) -> MeshStats {
    let h = mesh.cell_diameters.iter().copied().fold(0.0, f64::max);
    let mut min_angle = f64::INFINITY;
    for cell in 0..mesh.num_cells() {
        let p = mesh.cell_points(cell);
        for i in 0..3 {
            let o = p[i];
            let a = p[(i + 1) % 3];
            let b = p[(i + 2) % 3];
            let u = [a[0] - o[0], a[1] - o[1]];
            let v = [b[0] - o[0], b[1] - o[1]];
            let cos = (u[0] * v[0] + u[1] * v[1]) / (u[0].hypot(u[1]) * v[0].hypot(v[1]));
            min_angle = min_angle.min(cos.clamp(-1.0, 1.0).acos().to_degrees());
        }
    }
    MeshStats { h, min_angle }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(m: &Mesh) -> (usize, usize, usize, usize) {
        (m.num_cells(), m.vertices.len(), m.num_edges(), m.num_boundary_edges())
    }

    #[test]
    fn small_mesh_counts() {
        assert_eq!(counts(&build_uniform_mesh(1, Pattern::DiagonalNe).unwrap()), (2, 4, 5, 4));
        assert_eq!(counts(&build_uniform_mesh(2, Pattern::DiagonalNe).unwrap()), (8, 9, 16, 8));
        assert_eq!(counts(&build_uniform_mesh(2, Pattern::Crisscross).unwrap()), (16, 13, 28, 8));
    }

    #[test]
    fn zero_resolution_rejected() {
        assert!(matches!(build_uniform_mesh(0, Pattern::DiagonalNe), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn invariants_hold_for_all_patterns() {
        for pattern in Pattern::ALL {
            for m in [1, 2, 3, 5, 8] {
                let mesh = build_uniform_mesh(m, pattern).unwrap();
                let (c, v, e, _) = counts(&mesh);
                assert_eq!(v as i64 - e as i64 + (c as i64 + 1), 2, "Euler relation");

                let mut total = 0.0;
                for cell in 0..c {
                    let area = mesh.cell_area(cell);
                    assert!(area > 0.0);
                    total += area;
                    let g = mesh.cell_centroid(cell);
                    for ce in &mesh.cell_edges[cell] {
                        let mid = mesh.edge_midpoint(ce.edge);
                        let d = (mid[0] - g[0]) * ce.normal[0] + (mid[1] - g[1]) * ce.normal[1];
                        assert!(d > 0.0);
                        assert!((ce.normal[0].hypot(ce.normal[1]) - 1.0).abs() < 1e-14);
                    }
                }
                assert!((total - 1.0).abs() < 1e-12);

                for (i, edge) in mesh.edges.iter().enumerate() {
                    assert_eq!(edge.num_cells, if edge.boundary { 1 } else { 2 });
                    if edge.boundary {
                        let [a, b] = mesh.edge_points(i);
                        let on = |p: Point| p[0].abs() < 1e-14 || (p[0] - 1.0).abs() < 1e-14 || p[1].abs() < 1e-14 || (p[1] - 1.0).abs() < 1e-14;
                        let mid = mesh.edge_midpoint(i);
                        assert!(on(a) && on(b) && on(mid));
                    } else {
                        // the two sides see opposite normals
                        let n0 = mesh.outward_normal(edge.cells[0], i).unwrap();
                        let n1 = mesh.outward_normal(edge.cells[1], i).unwrap();
                        assert!((n0[0] + n1[0]).abs() < 1e-14 && (n0[1] + n1[1]).abs() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn refinement_quadruples_cells_and_halves_h() {
        for pattern in Pattern::ALL {
            let coarse = build_uniform_mesh(4, pattern).unwrap();
            let fine = build_uniform_mesh(8, pattern).unwrap();
            assert_eq!(fine.num_cells(), 4 * coarse.num_cells());
            if pattern != Pattern::Crisscross {
                assert_eq!(mesh_stats(&fine).h, 0.5 * mesh_stats(&coarse).h);
            }
        }
    }

    #[test]
    fn stats_of_diagonal_meshes() {
        let s2 = mesh_stats(&build_uniform_mesh(2, Pattern::DiagonalNe).unwrap());
        assert!((s2.h - 2f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((s2.min_angle - 45.0).abs() < 1e-12);
        let s4 = mesh_stats(&build_uniform_mesh(4, Pattern::DiagonalNw).unwrap());
        assert!((s4.h - 2f64.sqrt() / 4.0).abs() < 1e-15);
        assert!((s4.min_angle - 45.0).abs() < 1e-12);
    }

    #[test]
    fn pattern_round_trips_through_str() {
        for p in Pattern::ALL {
            assert_eq!(p.as_str().parse::<Pattern>().unwrap(), p);
        }
        assert!("hexagonal".parse::<Pattern>().is_err());
    }
}
