//! wasm-bindgen front end for the static page in `www/`.
//!
//! Three operations are exported: mesh geometry with shape statistics, a
//! single manufactured-solution run returning cell means and errors, and a
//! small spatial convergence study rendered as markdown. Each has a plain Rust
//! counterpart so it can be tested natively.

use wasm_bindgen::prelude::*;
use wgmaxwell::evolve::{check_energy_identity, initial_state, step_count, Forcing, Simulation};
use wgmaxwell::mesh::{build_uniform_mesh, mesh_stats, Mesh, Pattern};
use wgmaxwell::mms::{error_norms, Example, ManufacturedCase};
use wgmaxwell::study::{render_markdown, run_study_with_threads, Mode, StudyConfig};
use wgmaxwell::system::assemble_blocks;
use wgmaxwell::vtk::cell_means;
use wgmaxwell::wgops::WgSpace;
use wgmaxwell::{Error, Result};

/// Largest `M` the page accepts; bigger runs belong in the CLI.
pub const MAX_MESH: usize = 32;

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<T> {
    s.parse()
}

fn check_mesh(m: usize) -> Result<()> {
    if m == 0 || m > MAX_MESH {
        return Err(Error::InvalidConfig(format!("mesh size {m} outside 1..={MAX_MESH}")));
    }
    Ok(())
}

fn flat_vertices(mesh: &Mesh) -> Vec<f64> {
    mesh.vertices.iter().flat_map(|p| [p[0], p[1]]).collect()
}

fn flat_cells(mesh: &Mesh) -> Vec<u32> {
    mesh.cells.iter().flat_map(|c| c.map(|v| v as u32)).collect()
}

#[wasm_bindgen]
#[derive(Clone, Debug)]
pub struct MeshView {
    vertices: Vec<f64>,
    cells: Vec<u32>,
    h: f64,
    min_angle: f64,
    num_edges: usize,
    boundary_edges: usize,
}

#[wasm_bindgen]
impl MeshView {
    /// Vertex coordinates, `x0, y0, x1, y1, ...`.
    #[wasm_bindgen(getter)]
    pub fn vertices(&self) -> Vec<f64> {
        self.vertices.clone()
    }

    /// Counterclockwise vertex triples.
    #[wasm_bindgen(getter)]
    pub fn cells(&self) -> Vec<u32> {
        self.cells.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn h(&self) -> f64 {
        self.h
    }

    #[wasm_bindgen(getter, js_name = minAngle)]
    pub fn min_angle(&self) -> f64 {
        self.min_angle
    }

    #[wasm_bindgen(getter, js_name = numCells)]
    pub fn num_cells(&self) -> usize {
        self.cells.len() / 3
    }

    #[wasm_bindgen(getter, js_name = numEdges)]
    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    #[wasm_bindgen(getter, js_name = boundaryEdges)]
    pub fn boundary_edges(&self) -> usize {
        self.boundary_edges
    }
}

pub fn mesh_view(m: usize, pattern: &str) -> Result<MeshView> {
    check_mesh(m)?;
    let mesh = build_uniform_mesh(m, parse(pattern)?)?;
    let stats = mesh_stats(&mesh);
    Ok(MeshView {
        vertices: flat_vertices(&mesh),
        cells: flat_cells(&mesh),
        h: stats.h,
        min_angle: stats.min_angle,
        num_edges: mesh.num_edges(),
        boundary_edges: mesh.num_boundary_edges(),
    })
}

#[wasm_bindgen]
#[derive(Clone, Debug)]
pub struct SimulationView {
    mesh: MeshView,
    sigma11: Vec<f64>,
    sigma22: Vec<f64>,
    sigma12: Vec<f64>,
    speed: Vec<f64>,
    err_stress: f64,
    err_strain: f64,
    err_velocity: f64,
    energy_residual: f64,
    unknowns: usize,
    steps: usize,
}

#[wasm_bindgen]
impl SimulationView {
    #[wasm_bindgen(getter)]
    pub fn mesh(&self) -> MeshView {
        self.mesh.clone()
    }

    /// Cell means of one stress component (`"11"`, `"22"`, `"12"`) or of the
    /// velocity magnitude (`"speed"`).
    pub fn field(&self, name: &str) -> Vec<f64> {
        match name {
            "11" => self.sigma11.clone(),
            "22" => self.sigma22.clone(),
            "12" => self.sigma12.clone(),
            _ => self.speed.clone(),
        }
    }

    #[wasm_bindgen(getter, js_name = errStress)]
    pub fn err_stress(&self) -> f64 {
        self.err_stress
    }

    /// `sqrt(dt)`-scaled relative strain error.
    #[wasm_bindgen(getter, js_name = errStrain)]
    pub fn err_strain(&self) -> f64 {
        self.err_strain
    }

    #[wasm_bindgen(getter, js_name = errVelocity)]
    pub fn err_velocity(&self) -> f64 {
        self.err_velocity
    }

    #[wasm_bindgen(getter, js_name = energyResidual)]
    pub fn energy_residual(&self) -> f64 {
        self.energy_residual
    }

    #[wasm_bindgen(getter)]
    pub fn unknowns(&self) -> usize {
        self.unknowns
    }

    #[wasm_bindgen(getter)]
    pub fn steps(&self) -> usize {
        self.steps
    }
}

pub fn simulate_run(example: &str, k: usize, m: usize, pattern: &str, dt: f64, t_final: f64) -> Result<SimulationView> {
    check_mesh(m)?;
    if !(1..=2).contains(&k) {
        return Err(Error::InvalidConfig(format!("k must be 1 or 2, got {k}")));
    }
    let case = ManufacturedCase::from(parse::<Example>(example)?);
    let space = WgSpace::new(build_uniform_mesh(m, parse(pattern)?)?, k)?;
    let blocks = assemble_blocks(&space, &case.law);
    let forcing = Forcing::separable(&space, |x| case.forcing_profile(x), ManufacturedCase::stress_time_factor);
    let steps = step_count(t_final, dt)?;
    let mut sim = Simulation::new(&space, &blocks, dt, forcing, initial_state(&space, |x| case.initial_stress(x)))?;
    sim.run(steps, |_| Ok(()))?;

    let state = &sim.state;
    let errors = error_norms(&space, &state.eta, &state.beta, &case, state.time, dt);
    let means = cell_means(&space, &state.eta, &state.beta);
    let stats = mesh_stats(&space.mesh);
    let component = |c: usize| means.stress.iter().map(|s| s[c]).collect();
    Ok(SimulationView {
        mesh: MeshView {
            vertices: flat_vertices(&space.mesh),
            cells: flat_cells(&space.mesh),
            h: stats.h,
            min_angle: stats.min_angle,
            num_edges: space.mesh.num_edges(),
            boundary_edges: space.mesh.num_boundary_edges(),
        },
        sigma11: component(0),
        sigma22: component(1),
        sigma12: component(2),
        speed: means.velocity.iter().map(|v| v[0].hypot(v[1])).collect(),
        err_stress: errors.stress,
        err_strain: errors.strain_scaled,
        err_velocity: errors.velocity,
        energy_residual: check_energy_identity(&sim.ledger),
        unknowns: sim.stats().unknowns,
        steps,
    })
}

/// Spatial study over `meshes` at a fixed `dt`, as a markdown table.
pub fn convergence_table(example: &str, k: usize, meshes: &[usize], dt: f64, t_final: f64) -> Result<String> {
    if let Some(&m) = meshes.iter().max() {
        check_mesh(m)?;
    }
    let config = StudyConfig { example: parse(example)?, k, mode: Mode::Spatial, meshes: meshes.to_vec(), dt: Some(dt), t_final, ..Default::default() };
    let table = run_study_with_threads(&config, 1)?;
    Ok(render_markdown(&table))
}

fn js_err(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub fn mesh(m: usize, pattern: &str) -> std::result::Result<MeshView, JsError> {
    mesh_view(m, pattern).map_err(js_err)
}

#[wasm_bindgen]
pub fn simulate(example: &str, k: usize, m: usize, pattern: &str, dt: f64, t_final: f64) -> std::result::Result<SimulationView, JsError> {
    simulate_run(example, k, m, pattern, dt, t_final).map_err(js_err)
}

#[wasm_bindgen]
pub fn convergence(example: &str, k: usize, meshes: Vec<u32>, dt: f64, t_final: f64) -> std::result::Result<String, JsError> {
    let meshes: Vec<usize> = meshes.into_iter().map(|m| m as usize).collect();
    convergence_table(example, k, &meshes, dt, t_final).map_err(js_err)
}

/// Patterns accepted by [`mesh`] and [`simulate`].
#[wasm_bindgen]
pub fn patterns() -> Vec<String> {
    Pattern::ALL.iter().map(|p| p.as_str().to_string()).collect()
}
