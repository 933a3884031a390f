use std::f64::consts::{FRAC_PI_2, PI};

use mixbeam::constitutive::CrossSection;
use mixbeam::model::*;
use mixbeam::so3::{exp_rotvec, relative_rotvec, Vector3};
use mixbeam::solver::{Solver, SolverConfig};
use mixbeam::{BeamError, Vec3};

fn cs() -> CrossSection {
    CrossSection::new(1e4, 5e3, 5e3, 1e2, 1e2, 1e2).unwrap()
}

fn supports_only(mesh: Mesh) -> Problem {
    let load_case = LoadCase {
        supports: vec![
            BoundaryCondition::ClampPosition { node: 0, value: mesh.nodes[0].r0 },
            BoundaryCondition::ClampRotation { node: 0 },
        ],
        phases: Vec::new(),
    };
    Problem { mesh, load_case }
}

/// Largest residual entry of the reference state relative to the
/// magnitude of the terms that were summed into it.
fn undeformed_residual(mesh: Mesh) -> f64 {
    let p = supports_only(mesh);
    let s = Solver::new(&p, SolverConfig::default()).unwrap();
    let asm = s.assemble(&s.reference_state(), 0, 0.0).unwrap();
    let r = asm.residual.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = asm.scale.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    r / scale
}

#[test]
fn dof_count_of_two_linear_elements() {
    let mesh = build_straight(1.0, 2, 1, cs()).unwrap();
    assert_eq!(dof_layout(&mesh).unwrap().n_dofs, 36);
    // per element 9k more DOFs for every order
    for k in 1..=4 {
        let mesh = build_straight(1.0, 3, k, cs()).unwrap();
        assert_eq!(dof_layout(&mesh).unwrap().n_dofs, 6 * 4 + 3 * 9 * k);
    }
}

#[test]
fn element_maps_cover_all_dofs_once_apart_from_nodes() {
    let (mesh, _) = build_fork(1.0, 1.0, 2, 2, 3, cs()).unwrap();
    let l = dof_layout(&mesh).unwrap();
    let mut hits = vec![0usize; l.n_dofs];
    for e in 0..mesh.elements.len() {
        for g in l.element_map(&mesh, e) {
            hits[g] += 1;
        }
    }
    for (i, &h) in hits.iter().enumerate() {
        if i < l.n_node_dofs() {
            let node = i / 6;
            assert_eq!(h, mesh.nodes[node].elements.len(), "node dof {i}");
        } else {
            assert_eq!(h, 1, "element dof {i}");
        }
    }
}

#[test]
fn arc_geometry() {
    let (r, angle, n) = (100.0, PI / 4.0, 8);
    for k in 1..=4 {
        let mesh = build_arc(r, angle, n, k, cs()).unwrap();
        assert!((mesh.total_length() - r * angle).abs() < 1e-12);
        let tip = mesh.nodes.last().unwrap().r0;
        let exact = Vector3([r * angle.sin(), r * (1.0 - angle.cos()), 0.0]);
        assert!((tip - exact).max_abs() < 1e-12);
        for w in mesh.elements.windows(2) {
            let rel = relative_rotvec(&exp_rotvec(&w[0].psi0_lo), &exp_rotvec(&w[1].psi0_lo));
            assert!((rel - Vec3::unit(2) * (angle / n as f64)).max_abs() < 1e-12, "k={k}: {rel:?}");
        }
        if k >= 2 {
            for def in &mesh.elements {
                let rel = relative_rotvec(&def.frame0[0], &def.frame0[1]);
                assert!((rel - Vec3::unit(2) * (angle / n as f64)).max_abs() < 1e-12);
            }
        }
    }
}

#[test]
fn helix_geometry() {
    let h = HelixCurve { r0: 10.0, h0: 50.0, n_coils: 2.0 };
    let c = 50.0 / (2.0 * PI * 2.0 * 10.0);
    assert!((h.length() - (1.0 + c * c).sqrt() * 2.0 * PI * 2.0 * 10.0).abs() < 1e-12);
    assert!((h.position(0.0) - Vector3([0.0, -10.0, 0.0])).max_abs() < 1e-14);
    assert!((h.position(h.length())[2] - 50.0).abs() < 1e-12);
    // frame follows the tangent
    for s in [0.0, 13.0, 77.0] {
        let d = 1e-6;
        let t = (h.position(s + d) - h.position(s - d)) * (0.5 / d);
        assert!((h.frame(s).rotate(&Vec3::unit(0)) - t).max_abs() < 1e-8);
    }
    let mesh = build_helix(10.0, 50.0, 2.0, 12, 3, cs()).unwrap();
    assert!((mesh.total_length() - h.length()).abs() < 1e-10);
    assert!((mesh.nodes.last().unwrap().r0[2] - 50.0).abs() < 1e-10);
}

#[test]
fn polyline_kink_rotation() {
    let pts = [Vec3::zeros(), Vec3::unit(0), Vec3::unit(0) + Vec3::unit(1)];
    let mesh = build_polyline(&pts, 2, 2, cs()).unwrap();
    assert_eq!(mesh.elements.len(), 4);
    let (a, b) = (&mesh.elements[1], &mesh.elements[2]);
    assert_eq!(a.nodes[1], b.nodes[0]);
    let rel = relative_rotvec(&a.frame0[1], &b.frame0[0]);
    assert!((rel.norm() - FRAC_PI_2).abs() < 1e-12);
}

#[test]
fn fork_topology() {
    let (mesh, pts) = build_fork(1.0, 1.0, 3, 4, 2, cs()).unwrap();
    assert_eq!(mesh.nodes[pts.branch].elements.len(), 3);
    assert!((mesh.nodes[pts.branch].r0 - Vec3::unit(0)).max_abs() < 1e-14);
    assert!((mesh.nodes[pts.tip_upper].r0 - Vector3([2.0, 1.0, 0.0])).max_abs() < 1e-14);
    assert!((mesh.nodes[pts.tip_lower].r0 - Vector3([2.0, -1.0, 0.0])).max_abs() < 1e-14);
    assert_eq!(mesh.nodes[pts.root].elements.len(), 1);
    assert_eq!(mesh.elements.len(), 11);
}

#[test]
fn undeformed_state_is_in_equilibrium_for_every_builder() {
    let tol = 1e-13;
    for k in 1..=4 {
        let meshes = [
            ("straight", build_straight(2.0, 3, k, cs()).unwrap()),
            ("arc", build_arc(3.0, 2.0, 5, k, cs()).unwrap()),
            ("helix", build_helix(10.0, 50.0, 2.0, 10, k, cs()).unwrap()),
            (
                "polyline",
                build_polyline(
                    &[Vec3::zeros(), Vec3::unit(0), Vec3::unit(0) + Vec3::unit(1), Vector3([1.0, 1.0, 1.0])],
                    2,
                    k,
                    cs(),
                )
                .unwrap(),
            ),
            ("fork", build_fork(1.0, 1.0, 2, 3, k, cs()).unwrap().0),
        ];
        for (name, mesh) in meshes {
            let r = undeformed_residual(mesh);
            assert!(r < tol, "{name} k={k}: relative residual {r:e}");
        }
    }
}

#[test]
fn invalid_meshes_are_rejected() {
    assert!(matches!(
        build_polyline(&[Vec3::zeros(), Vec3::zeros()], 1, 1, cs()),
        Err(BeamError::InvalidMesh(_))
    ));
    assert!(build_straight(1.0, 0, 1, cs()).is_err());
    assert!(build_straight(f64::NAN, 2, 1, cs()).is_err());
    let bad = CrossSection { ea: 0.0, ..cs() };
    assert!(matches!(build_straight(1.0, 2, 1, bad), Err(BeamError::CrossSection(_))));
}

#[test]
fn load_case_validation() {
    let mesh = build_straight(1.0, 2, 1, cs()).unwrap();
    let clamp = BoundaryCondition::ClampRotation { node: 0 };
    let ok = LoadCase { supports: vec![clamp.clone()], phases: Vec::new() };
    assert!(ok.validate(&mesh).is_ok());

    let missing = LoadCase {
        supports: Vec::new(),
        phases: vec![LoadPhase {
            increments: 1,
            conditions: vec![BoundaryCondition::PointForce { node: 9, force: Vec3::unit(0) }],
        }],
    };
    assert!(missing.validate(&mesh).is_err());

    let twice = LoadCase {
        supports: vec![clamp.clone()],
        phases: vec![LoadPhase {
            increments: 1,
            conditions: vec![BoundaryCondition::PrescribeRotation { node: 0, rotation: Vec3::unit(2) }],
        }],
    };
    assert!(twice.validate(&mesh).is_err());

    let zero_inc = LoadCase { supports: vec![clamp], phases: vec![LoadPhase { increments: 0, conditions: vec![] }] };
    assert!(zero_inc.validate(&mesh).is_err());

    let force_support = LoadCase {
        supports: vec![BoundaryCondition::PointForce { node: 1, force: Vec3::unit(0) }],
        phases: Vec::new(),
    };
    assert!(force_support.validate(&mesh).is_err());
}

#[test]
fn problem_serde_roundtrip() {
    let mesh = build_arc(2.0, 1.0, 3, 2, cs()).unwrap();
    let p = supports_only(mesh);
    let json = serde_json::to_string(&p).unwrap();
    let back: Problem = serde_json::from_str(&json).unwrap();
    assert_eq!(p, back);
}
