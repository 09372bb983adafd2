use wgmaxwell_web::{convergence_table, mesh_view, patterns, simulate_run, MAX_MESH};

#[test]
fn mesh_geometry_and_stats() {
    let m = mesh_view(4, "crisscross").unwrap();
    assert_eq!(m.num_cells(), 64);
    assert_eq!(m.vertices().len(), 2 * (25 + 16));
    assert_eq!(m.cells().len(), 3 * 64);
    assert_eq!(m.boundary_edges(), 16);
    assert!((m.h() - 0.25).abs() < 1e-12);
    assert!((m.min_angle() - 45.0).abs() < 1e-9);
    assert!(m.cells().iter().all(|&v| (v as usize) < m.vertices().len() / 2));
}

#[test]
fn rejects_bad_input() {
    assert!(mesh_view(0, "diagonal-ne").is_err());
    assert!(mesh_view(MAX_MESH + 1, "diagonal-ne").is_err());
    assert!(mesh_view(4, "hexagonal").is_err());
    assert!(simulate_run("polynomial", 3, 2, "diagonal-ne", 0.1, 1.0).is_err());
    assert!(simulate_run("polynomial", 1, 2, "diagonal-ne", -0.1, 1.0).is_err());
    assert!(simulate_run("cubic", 1, 2, "diagonal-ne", 0.1, 1.0).is_err());
}

#[test]
fn simulation_fields_and_errors() {
    let s = simulate_run("trig", 1, 4, "diagonal-nw", 0.05, 1.0).unwrap();
    assert_eq!(s.steps(), 20);
    let n = s.mesh().num_cells();
    for name in ["11", "22", "12", "speed"] {
        let f = s.field(name);
        assert_eq!(f.len(), n);
        assert!(f.iter().all(|v| v.is_finite()));
    }
    assert!(s.field("speed").iter().all(|v| *v >= 0.0));
    assert!(s.err_stress() > 0.0 && s.err_stress() < 1.0);
    assert!(s.err_velocity() > 0.0);
    assert!(s.energy_residual() < 1e-10);
    assert!(s.unknowns() > 0);
}

#[test]
fn convergence_markdown() {
    let md = convergence_table("polynomial", 1, &[2, 4], 0.05, 0.5).unwrap();
    let lines: Vec<&str> = md.lines().collect();
    assert!(lines[0].starts_with('|'));
    assert!(md.contains("2x2") && md.contains("4x4"));
    assert!(convergence_table("polynomial", 1, &[2, 64], 0.05, 0.5).is_err());
}

#[test]
fn pattern_names() {
    assert_eq!(patterns(), ["diagonal-ne", "diagonal-nw", "crisscross"]);
}
