//! Problem documents for `beam run`: geometry, cross-section, supports,
//! load phases and solver settings in one TOML file.
//!
//! ```toml
//! [geometry]
//! type = "straight"
//! length = 1.0
//! n_elem = 8
//! order = 2
//!
//! [cross_section]
//! ea = 1.0e-2
//! ga2 = 5.0e-3
//! ga3 = 5.0e-3
//! git = 8.3e-6
//! ei2 = 8.3e-6
//! ei3 = 8.3e-6
//!
//! [[bcs]]
//! type = "clamp_position"
//! node = 0
//! value = [0.0, 0.0, 0.0]
//!
//! [[bcs]]
//! type = "clamp_rotation"
//! node = 0
//!
//! [[loads]]
//! increments = 8
//! conditions = [{ type = "point_moment", node = 8, moment = [0.0, 0.0, 1.047e-4] }]
//!
//! [solver]
//! tol_res = 1e-10
//! ```
//!
//! Node ids follow the builders: for a single curve, `0` is the start and
//! `n_elem` the end. The fork numbers root, branch, upper tip, lower tip as
//! reported by `beam run`.

use mixbeam::constitutive::CrossSection;
use mixbeam::model::{
    build_arc, build_fork, build_helix, build_polyline, build_straight, BoundaryCondition, LoadCase,
    LoadPhase, Mesh, Problem,
};
use mixbeam::solver::{SolveReport, Solver, SolverConfig, StepRecord};
use mixbeam::{BeamError, Vec3};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape {
    /// Along `e₁` from the origin.
    Straight { length: f64 },
    /// In the x₁x₂-plane from the origin, opening `angle` in radians.
    Arc { radius: f64, angle: f64 },
    Helix { r0: f64, h0: f64, n_coils: f64 },
    /// `n_elem` elements per segment.
    Polyline { points: Vec<Vec3> },
    /// Shaft of `length`, then two quarter circles of `radius`; `n_elem`
    /// elements on each of the three parts.
    Fork { length: f64, radius: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    #[serde(flatten)]
    pub shape: Shape,
    pub n_elem: usize,
    pub order: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDoc {
    pub geometry: Geometry,
    pub cross_section: CrossSection,
    /// Supports, active throughout.
    #[serde(default)]
    pub bcs: Vec<BoundaryCondition>,
    /// Load phases applied one after the other.
    #[serde(default)]
    pub loads: Vec<LoadPhase>,
    #[serde(default)]
    pub solver: SolverConfig,
}

#[derive(Debug, thiserror::Error)]
pub enum ProblemError {
    #[error("cannot parse problem: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid problem: {0}")]
    Model(#[from] BeamError),
}

impl ProblemDoc {
    pub fn from_toml(s: &str) -> Result<Self, ProblemError> {
        Ok(toml::from_str(s)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("problem documents serialize")
    }

    pub fn mesh(&self) -> Result<Mesh, BeamError> {
        let g = &self.geometry;
        let cs = self.cross_section;
        cs.validate()?;
        match &g.shape {
            Shape::Straight { length } => build_straight(*length, g.n_elem, g.order, cs),
            Shape::Arc { radius, angle } => build_arc(*radius, *angle, g.n_elem, g.order, cs),
            Shape::Helix { r0, h0, n_coils } => build_helix(*r0, *h0, *n_coils, g.n_elem, g.order, cs),
            Shape::Polyline { points } => build_polyline(points, g.n_elem, g.order, cs),
            Shape::Fork { length, radius } => {
                build_fork(*length, *radius, g.n_elem, g.n_elem, g.order, cs).map(|(m, _)| m)
            }
        }
    }

    pub fn problem(&self) -> Result<Problem, BeamError> {
        let mesh = self.mesh()?;
        let load_case = LoadCase { supports: self.bcs.clone(), phases: self.loads.clone() };
        load_case.validate(&mesh)?;
        self.solver.validate()?;
        Ok(Problem { mesh, load_case })
    }
}

/// Final state of a `beam run`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub n_nodes: usize,
    pub n_elements: usize,
    pub n_dofs: usize,
    /// Reference and deformed nodal positions.
    pub nodes: Vec<NodeResult>,
    pub steps: Vec<StepRecord>,
    pub newton_total_iters: usize,
    pub wall_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeResult {
    pub id: usize,
    pub r0: Vec3,
    pub r: Vec3,
    pub psi: Vec3,
}

impl RunResult {
    pub fn new(solver: &Solver, report: &SolveReport) -> Self {
        let mesh = solver.mesh();
        let x = &report.state;
        Self {
            n_nodes: mesh.nodes.len(),
            n_elements: mesh.elements.len(),
            n_dofs: solver.layout.n_dofs,
            nodes: mesh
                .nodes
                .iter()
                .map(|n| NodeResult {
                    id: n.id,
                    r0: n.r0,
                    r: solver.layout.node_position(x, n.id),
                    psi: solver.layout.node_rotation(x, n.id),
                })
                .collect(),
            steps: report.steps.clone(),
            newton_total_iters: report.total_iterations(),
            wall_ms: report.wall_ms,
        }
    }
}
