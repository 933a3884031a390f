//! Global assembly, Newton iteration, load stepping and error metrics.

use std::time::Instant;

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::element::{
    condensable_indices, condense, element_system_with, eval_centerline, eval_moment, Condensed,
    ElementLoads, Integration, LocalSystem,
};
use crate::error::BeamError;
use crate::model::{BoundaryCondition, DofLayout, Mesh, MomentFrame, Problem};
use crate::quadrature::QuadratureRule;
use crate::real::first_order;
use crate::so3::{exp_rotvec, log_rotation, tangent_map, Vector3};
use crate::{Rotation, Vec3};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearSolver {
    #[default]
    SparseLu,
    /// Dense LU; for small systems and tests.
    DenseLu,
}

/// Linearization used for the Newton tangent.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NewtonScheme {
    /// Exact Hessian of the energy.
    Consistent,
    /// Force resultants at the γ points are carried as iteration variables
    /// and updated with the linearized strains; only the geometric part of
    /// the tangent changes, so converged states are the same. Far fewer
    /// iterations for slender beams.
    #[default]
    MixedForce,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Residual tolerance relative to the largest applied load; absolute
    /// for purely kinematic loading.
    pub tol_res: f64,
    /// Increment tolerance relative to `max(1, ‖x‖∞)`.
    pub tol_inc: f64,
    pub max_iter: usize,
    pub condense: bool,
    pub linear_solver: LinearSolver,
    pub integration: Integration,
    pub newton: NewtonScheme,
    /// Keep the converged state of every load step in the report.
    pub keep_snapshots: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol_res: 1e-10,
            tol_inc: 1e-10,
            max_iter: 50,
            condense: true,
            linear_solver: LinearSolver::SparseLu,
            integration: Integration::ReducedGamma,
            newton: NewtonScheme::MixedForce,
            keep_snapshots: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), BeamError> {
        if !(self.tol_res > 0.0 && self.tol_inc > 0.0 && self.max_iter >= 1) {
            return Err(BeamError::InvalidBoundaryCondition(
                "solver tolerances must be positive and max_iter at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Newton history of one load step.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub phase: usize,
    pub step: usize,
    pub lambda: f64,
    pub iterations: usize,
    /// Residual norm at the start of every iteration, including the final one.
    pub residuals: Vec<f64>,
    /// Max-norm of every increment.
    pub increments: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub steps: Vec<StepRecord>,
    /// Converged states after each step, when requested.
    pub snapshots: Vec<Vec<f64>>,
    pub state: Vec<f64>,
    pub wall_ms: f64,
}

impl SolveReport {
    pub fn total_iterations(&self) -> usize {
        self.steps.iter().map(|s| s.iterations).sum()
    }
}

/// Failed continuation with everything computed up to the failure.
#[derive(Debug, Clone, thiserror::Error)]
#[error("{error}")]
pub struct ContinuationError {
    pub error: BeamError,
    pub partial: SolveReport,
}

/// Element and nodal contributions at one state.
#[derive(Clone, Debug)]
pub struct Assembly {
    pub locals: Vec<LocalSystem>,
    /// Global residual over all DOFs.
    pub residual: Vec<f64>,
    /// Part of `residual` from nodal loads.
    pub nodal_residual: Vec<f64>,
    /// Nodal load tangent entries `(row, col, value)`.
    pub nodal_tangent: Vec<(usize, usize, f64)>,
    /// `Σ|K||x|` per DOF, the magnitude of the terms summed into the residual.
    pub scale: Vec<f64>,
}

/// Load factor of a condition introduced in `cond_phase` while `phase` is
/// being ramped to `lambda`.
#[inline]
fn phase_factor(cond_phase: usize, phase: usize, lambda: f64) -> f64 {
    use std::cmp::Ordering::*;
    match cond_phase.cmp(&phase) {
        Less => 1.0,
        Equal => lambda,
        Greater => 0.0,
    }
}

/// Maps rotation vectors to norm at most π.
pub fn wrap_rotvec(psi: &Vec3) -> Vec3 {
    let n = psi.norm();
    if n > std::f64::consts::PI {
        *psi * (1.0 - 2.0 * std::f64::consts::PI * (n / (2.0 * std::f64::consts::PI)).round() / n)
    } else {
        *psi
    }
}

pub struct Solver<'p> {
    pub problem: &'p Problem,
    pub layout: DofLayout,
    pub config: SolverConfig,
    maps: Vec<Vec<usize>>,
    constrained: Vec<bool>,
    /// Unknowns are `x / dof_scale`; the moment unknowns are scaled by the
    /// bending stiffness so that all blocks of the tangent are comparable.
    dof_scale: Vec<f64>,
}

impl<'p> Solver<'p> {
    pub fn new(problem: &'p Problem, config: SolverConfig) -> Result<Self, BeamError> {
        config.validate()?;
        problem.mesh.validate()?;
        problem.load_case.validate(&problem.mesh)?;
        let layout = DofLayout::new(&problem.mesh)?;
        let maps: Vec<Vec<usize>> = (0..problem.mesh.elements.len()).map(|e| layout.element_map(&problem.mesh, e)).collect();
        let mut constrained = vec![false; layout.n_dofs];
        let lc = &problem.load_case;
        for c in lc.supports.iter().chain(lc.phases.iter().flat_map(|p| p.conditions.iter())) {
            let base = match *c {
                BoundaryCondition::ClampPosition { node, .. } => layout.node_r(node),
                BoundaryCondition::ClampRotation { node }
                | BoundaryCondition::PrescribeRotation { node, .. } => layout.node_psi(node),
                _ => continue,
            };
            for i in 0..3 {
                constrained[base + i] = true;
            }
        }
        let mut dof_scale = vec![1.0; layout.n_dofs];
        for (e, def) in problem.mesh.elements.iter().enumerate() {
            let c = def.section.c_kappa();
            let s = (c[0] * c[1] * c[2]).cbrt();
            let ll = def.layout();
            let map = &maps[e];
            for j in 0..=def.order {
                for i in 0..3 {
                    dof_scale[map[ll.m(j, i)]] = s;
                }
            }
        }
        Ok(Self { problem, layout, config, maps, constrained, dof_scale })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.problem.mesh
    }

    /// Factor between unscaled and scaled unknowns, per DOF.
    pub fn dof_scale(&self) -> &[f64] {
        &self.dof_scale
    }

    pub fn is_constrained(&self, dof: usize) -> bool {
        self.constrained[dof]
    }

    pub fn reference_state(&self) -> Vec<f64> {
        self.layout.reference_state(self.mesh())
    }

    fn conditions(&self) -> impl Iterator<Item = (usize, &BoundaryCondition)> {
        self.problem
            .load_case
            .phases
            .iter()
            .enumerate()
            .flat_map(|(p, ph)| ph.conditions.iter().map(move |c| (p, c)))
    }

    /// Writes prescribed positions and rotations into `x`.
    pub fn apply_prescribed(&self, x: &mut [f64], phase: usize, lambda: f64) {
        let l = &self.layout;
        for c in &self.problem.load_case.supports {
            match *c {
                BoundaryCondition::ClampPosition { node, value } => {
                    x[l.node_r(node)..l.node_r(node) + 3].copy_from_slice(&value.0);
                }
                BoundaryCondition::ClampRotation { node } => {
                    x[l.node_psi(node)..l.node_psi(node) + 3].fill(0.0);
                }
                _ => {}
            }
        }
        let mut rot: Vec<Option<Rotation>> = vec![None; l.n_nodes];
        for (p, c) in self.conditions() {
            let f = phase_factor(p, phase, lambda);
            match *c {
                BoundaryCondition::ClampPosition { node, value } => {
                    x[l.node_r(node)..l.node_r(node) + 3].copy_from_slice(&value.0);
                }
                BoundaryCondition::ClampRotation { node } => {
                    rot[node].get_or_insert(Rotation::identity());
                }
                BoundaryCondition::PrescribeRotation { node, rotation } => {
                    let q = rot[node].unwrap_or(Rotation::identity());
                    rot[node] = Some(q.compose(&exp_rotvec(&(rotation * f))));
                }
                _ => {}
            }
        }
        for (node, q) in rot.into_iter().enumerate() {
            if let Some(q) = q {
                x[l.node_psi(node)..l.node_psi(node) + 3].copy_from_slice(&log_rotation(&q).0);
            }
        }
    }

    fn element_loads(&self, phase: usize, lambda: f64) -> Vec<ElementLoads> {
        let mut loads = vec![ElementLoads::default(); self.mesh().elements.len()];
        for (p, c) in self.conditions() {
            let f = phase_factor(p, phase, lambda);
            match *c {
                BoundaryCondition::DistributedForce { element, force } => loads[element].force += force * f,
                BoundaryCondition::DistributedCouple { element, couple } => {
                    loads[element].couple += couple * f
                }
                _ => {}
            }
        }
        loads
    }

    /// Residual and tangent contributions of all elements and nodal loads,
    /// with respect to the scaled unknowns.
    pub fn assemble(&self, x: &[f64], phase: usize, lambda: f64) -> Result<Assembly, BeamError> {
        self.assemble_with(x, phase, lambda, None)
    }

    /// [`Self::assemble`] with given force resultants at the γ points of
    /// every element (see [`NewtonScheme::MixedForce`]).
    pub fn assemble_with(
        &self,
        x: &[f64],
        phase: usize,
        lambda: f64,
        forces: Option<&[Vec<Vec3>]>,
    ) -> Result<Assembly, BeamError> {
        let mesh = self.mesh();
        let l = &self.layout;
        let loads = self.element_loads(phase, lambda);
        let mut residual = vec![0.0; l.n_dofs];
        let mut scale = vec![0.0; l.n_dofs];
        let mut locals = Vec::with_capacity(mesh.elements.len());
        for (e, def) in mesh.elements.iter().enumerate() {
            let map = &self.maps[e];
            let dofs = l.gather(mesh, e, x);
            let f = forces.map(|f| f[e].as_slice());
            let mut sys = element_system_with(def, &dofs, &loads[e], 1.0, self.config.integration, f)?;
            let w = &self.dof_scale;
            for (i, &gi) in map.iter().enumerate() {
                sys.residual[i] *= w[gi];
                for (j, &gj) in map.iter().enumerate() {
                    sys.tangent[(i, j)] *= w[gi] * w[gj];
                }
            }
            for (i, &gi) in map.iter().enumerate() {
                residual[gi] += sys.residual[i];
                let mut s = sys.residual[i].abs();
                for (j, &gj) in map.iter().enumerate() {
                    s += sys.tangent[(i, j)].abs() * (x[gj] / w[gj]).abs();
                }
                scale[gi] += s;
            }
            locals.push(sys);
        }
        let mut nodal_tangent = Vec::new();
        let mut nodal_residual = vec![0.0; l.n_dofs];
        for (p, c) in self.conditions() {
            let f = phase_factor(p, phase, lambda);
            if f == 0.0 {
                continue;
            }
            match *c {
                BoundaryCondition::PointForce { node, force } => {
                    let b = l.node_r(node);
                    for i in 0..3 {
                        nodal_residual[b + i] -= f * force[i];
                        scale[b + i] += (f * force[i]).abs();
                    }
                }
                BoundaryCondition::PointMoment { node, moment, frame } => {
                    let b = l.node_psi(node);
                    let psi = l.node_rotation(x, node);
                    let frame0 = mesh.nodes[node].frame0;
                    let material = frame == MomentFrame::Material;
                    // generalized force Tᵀ(ψV)·m, m spatial or Λ_V·M
                    let g = first_order::<3, 3, _>(&psi.0, |v| {
                        let psi = Vector3(*v);
                        let m = if material {
                            exp_rotvec(&psi).rotate(&frame0.lift().rotate(&moment.lift()))
                        } else {
                            moment.lift()
                        };
                        tangent_map(&psi).tr_mul_vec(&m).0
                    });
                    for i in 0..3 {
                        nodal_residual[b + i] -= f * g.value[i];
                        scale[b + i] += (f * g.value[i]).abs();
                        for j in 0..3 {
                            nodal_tangent.push((b + i, b + j, -f * g.jac[i][j]));
                        }
                    }
                }
                _ => {}
            }
        }
        for (r, v) in residual.iter_mut().zip(&nodal_residual) {
            *r += v;
        }
        Ok(Assembly { locals, residual, nodal_residual, nodal_tangent, scale })
    }

    /// Norm of the residual over unconstrained DOFs and the roundoff floor
    /// below which it cannot be reduced.
    pub fn residual_norms(&self, asm: &Assembly) -> (f64, f64) {
        let mut r2 = 0.0;
        let mut s2 = 0.0;
        for i in 0..self.layout.n_dofs {
            if !self.constrained[i] {
                r2 += asm.residual[i] * asm.residual[i];
                s2 += asm.scale[i] * asm.scale[i];
            }
        }
        (r2.sqrt(), 1e2 * f64::EPSILON * s2.sqrt())
    }

    /// Equation number of every DOF in the linear system, `None` if eliminated.
    fn equations(&self) -> (Vec<Option<usize>>, usize) {
        let mut eq = vec![None; self.layout.n_dofs];
        let mut n = 0;
        for (i, slot) in eq.iter_mut().enumerate() {
            if self.constrained[i] {
                continue;
            }
            if self.config.condense && !self.layout.is_condensed_global(self.mesh(), i) {
                continue;
            }
            *slot = Some(n);
            n += 1;
        }
        (eq, n)
    }

    /// Newton increment for the current assembly, in unscaled units.
    pub fn increment(&self, asm: &Assembly) -> Result<Vec<f64>, BeamError> {
        let (eq, n) = self.equations();
        let mut trips: Vec<(usize, usize, f64)> = Vec::new();
        let mut rhs = vec![0.0; n];
        let mut condensed: Vec<Condensed> = Vec::new();
        if self.config.condense {
            for (i, e) in eq.iter().enumerate() {
                if let Some(e) = e {
                    rhs[*e] = -asm.nodal_residual[i];
                }
            }
            for (e, sys) in asm.locals.iter().enumerate() {
                let map = &self.maps[e];
                let k = self.mesh().elements[e].order;
                let c = condense(&sys.tangent, &sys.residual, &condensable_indices(k))
                    .map_err(|_| BeamError::SingularCondensationBlock { element: e })?;
                for (a, &la) in c.kept.iter().enumerate() {
                    let Some(ra) = eq[map[la]] else { continue };
                    rhs[ra] -= c.residual[a];
                    for (b, &lb) in c.kept.iter().enumerate() {
                        if let Some(cb) = eq[map[lb]] {
                            trips.push((ra, cb, c.tangent[(a, b)]));
                        }
                    }
                }
                condensed.push(c);
            }
        } else {
            for (i, e) in eq.iter().enumerate() {
                if let Some(e) = e {
                    rhs[*e] = -asm.residual[i];
                }
            }
            for (e, sys) in asm.locals.iter().enumerate() {
                let map = &self.maps[e];
                for (a, &ga) in map.iter().enumerate() {
                    let Some(ra) = eq[ga] else { continue };
                    for (b, &gb) in map.iter().enumerate() {
                        if let Some(cb) = eq[gb] {
                            trips.push((ra, cb, sys.tangent[(a, b)]));
                        }
                    }
                }
            }
        }
        for &(r, c, v) in &asm.nodal_tangent {
            if let (Some(r), Some(c)) = (eq[r], eq[c]) {
                trips.push((r, c, v));
            }
        }
        let sol = solve_triplets(n, trips, &rhs, self.config.linear_solver)?;

        let mut dx = vec![0.0; self.layout.n_dofs];
        for (i, e) in eq.iter().enumerate() {
            if let Some(e) = e {
                dx[i] = sol[*e];
            }
        }
        for (e, c) in condensed.iter().enumerate() {
            let map = &self.maps[e];
            let dg = DVector::from_fn(c.kept.len(), |a, _| dx[map[c.kept[a]]]);
            let dc = c.back_substitute(&dg);
            for (a, &la) in c.condensed.iter().enumerate() {
                dx[map[la]] = dc[a];
            }
        }
        if dx.iter().any(|v| !v.is_finite()) {
            return Err(BeamError::SingularTangent);
        }
        for (d, w) in dx.iter_mut().zip(&self.dof_scale) {
            *d *= w;
        }
        Ok(dx)
    }

    /// Newton iteration at fixed load level, in place.
    pub fn solve_step(
        &self,
        x: &mut [f64],
        phase: usize,
        step: usize,
        lambda: f64,
    ) -> Result<StepRecord, BeamError> {
        self.apply_prescribed(x, phase, lambda);
        let scale = self.problem.load_case.load_scale();
        let tol_res = self.config.tol_res * if scale > 0.0 { scale } else { 1.0 };
        let mut rec = StepRecord { phase, step, lambda, ..Default::default() };
        let mut last_inc = f64::INFINITY;
        let mut last_xmax = 1.0f64;
        let mut forces: Option<Vec<Vec<Vec3>>> = None;
        loop {
            let asm = self.assemble_with(x, phase, lambda, forces.as_deref())?;
            let (res, floor) = self.residual_norms(&asm);
            rec.residuals.push(res);
            let res_ok = res <= tol_res || res <= floor;
            let inc_ok = rec.iterations == 0 || last_inc <= self.config.tol_inc * last_xmax.max(1.0);
            if res_ok && inc_ok {
                return Ok(rec);
            }
            if rec.iterations >= self.config.max_iter || !res.is_finite() {
                return Err(BeamError::NonConvergence {
                    step,
                    lambda,
                    iterations: rec.iterations,
                    residual: res,
                    increment: last_inc,
                });
            }
            let dx = self.increment(&asm)?;
            if self.config.newton == NewtonScheme::MixedForce {
                forces = Some(self.predicted_forces(&asm, &dx));
            }
            let mut inc: f64 = 0.0;
            let mut xmax: f64 = 0.0;
            for (xi, di) in x.iter_mut().zip(&dx) {
                *xi += di;
                inc = inc.max(di.abs());
                xmax = xmax.max(xi.abs());
            }
            rec.increments.push(inc);
            rec.iterations += 1;
            last_inc = inc;
            last_xmax = xmax;
        }
    }

    fn predicted_forces(&self, asm: &Assembly, dx: &[f64]) -> Vec<Vec<Vec3>> {
        asm.locals
            .iter()
            .zip(&self.maps)
            .zip(&self.mesh().elements)
            .map(|((sys, map), def)| {
                let dl: Vec<f64> = map.iter().map(|&g| dx[g]).collect();
                sys.strain_points.iter().map(|p| p.predicted_force(&def.section, &dl)).collect()
            })
            .collect()
    }

    /// Wraps element-constant rotations and free nodal rotations to norm ≤ π.
    pub fn normalize_rotations(&self, x: &mut [f64]) {
        let l = &self.layout;
        for n in 0..l.n_nodes {
            let b = l.node_psi(n);
            if self.constrained[b] {
                continue;
            }
            let w = wrap_rotvec(&Vector3([x[b], x[b + 1], x[b + 2]]));
            x[b..b + 3].copy_from_slice(&w.0);
        }
        for (e, def) in self.mesh().elements.iter().enumerate() {
            let b = l.element_offsets[e] + 6 * def.order;
            let w = wrap_rotvec(&Vector3([x[b], x[b + 1], x[b + 2]]));
            x[b..b + 3].copy_from_slice(&w.0);
        }
    }

    /// Runs all load phases from the reference state.
    pub fn continuation(&self) -> Result<SolveReport, ContinuationError> {
        self.continuation_from(self.reference_state())
    }

    pub fn continuation_from(&self, mut x: Vec<f64>) -> Result<SolveReport, ContinuationError> {
        let start = Instant::now();
        let mut report = SolveReport::default();
        for (p, phase) in self.problem.load_case.phases.iter().enumerate() {
            for i in 1..=phase.increments {
                let lambda = i as f64 / phase.increments as f64;
                match self.solve_step(&mut x, p, report.steps.len(), lambda) {
                    Ok(rec) => report.steps.push(rec),
                    Err(error) => {
                        report.state = x;
                        report.wall_ms = start.elapsed().as_secs_f64() * 1e3;
                        return Err(ContinuationError { error, partial: report });
                    }
                }
                self.normalize_rotations(&mut x);
                if self.config.keep_snapshots {
                    report.snapshots.push(x.clone());
                }
            }
        }
        report.state = x;
        report.wall_ms = start.elapsed().as_secs_f64() * 1e3;
        Ok(report)
    }
}

/// Solves the system given as unsorted triplets with duplicates.
fn solve_triplets(
    n: usize,
    mut trips: Vec<(usize, usize, f64)>,
    rhs: &[f64],
    kind: LinearSolver,
) -> Result<Vec<f64>, BeamError> {
    if n == 0 {
        return Ok(Vec::new());
    }
    // deterministic merge of duplicates, column-major
    trips.sort_unstable_by(|a, b| (a.1, a.0).cmp(&(b.1, b.0)));
    let mut merged: Vec<Triplet<usize, usize, f64>> = Vec::with_capacity(trips.len());
    for (r, c, v) in trips {
        match merged.last_mut() {
            Some(t) if t.row == r && t.col == c => t.val += v,
            _ => merged.push(Triplet::new(r, c, v)),
        }
    }
    let sol = match kind {
        LinearSolver::SparseLu => {
            let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &merged)
                .map_err(|_| BeamError::SingularTangent)?;
            let lu = a.sp_lu().map_err(|_| BeamError::SingularTangent)?;
            let mut b = faer::Mat::<f64>::from_fn(n, 1, |i, _| rhs[i]);
            lu.solve_in_place(b.as_mut());
            (0..n).map(|i| b[(i, 0)]).collect::<Vec<_>>()
        }
        LinearSolver::DenseLu => {
            let mut a = DMatrix::<f64>::zeros(n, n);
            for t in &merged {
                a[(t.row, t.col)] += t.val;
            }
            let b = DVector::from_column_slice(rhs);
            let x = a.lu().solve(&b).ok_or(BeamError::SingularTangent)?;
            x.iter().copied().collect()
        }
    };
    if sol.iter().any(|v| !v.is_finite()) {
        return Err(BeamError::SingularTangent);
    }
    Ok(sol)
}

/// `(1/norm)·sqrt((1/L)∫‖r − r_ref‖² ds)` with `(2k + 2)`-point Gauss rules
/// per element; `reference` is a function of arclength.
pub fn error_l2_position<F>(mesh: &Mesh, layout: &DofLayout, x: &[f64], reference: F, norm: f64) -> f64
where
    F: Fn(f64) -> Vec3,
{
    let mut sum = 0.0;
    for (e, def) in mesh.elements.iter().enumerate() {
        let dofs = layout.gather(mesh, e, x);
        let jac = def.jacobian();
        for (xi, w) in QuadratureRule::gauss(2 * def.order + 2).iter() {
            let s = def.span[0] + (xi + 1.0) * jac;
            let d = eval_centerline(&dofs.r, xi).0 - reference(s);
            sum += w * jac * d.norm_squared();
        }
    }
    (sum / mesh.total_length()).sqrt() / norm
}

/// Stored complementary moment energy `∫ ½ M·C_κ⁻¹·M ds`.
pub fn moment_energy(mesh: &Mesh, layout: &DofLayout, x: &[f64]) -> f64 {
    let mut sum = 0.0;
    for (e, def) in mesh.elements.iter().enumerate() {
        let dofs = layout.gather(mesh, e, x);
        let c = def.section.c_kappa();
        for (xi, w) in QuadratureRule::gauss(def.order + 1).iter() {
            let m = eval_moment(&dofs.m, xi);
            sum += w * def.jacobian() * 0.5 * (m[0] * m[0] / c[0] + m[1] * m[1] / c[1] + m[2] * m[2] / c[2]);
        }
    }
    sum
}

/// Least-squares slope of `log e` over `log h`, ignoring errors below
/// `floor`. `None` with fewer than two usable points.
pub fn convergence_rate_above(h: &[f64], e: &[f64], floor: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = h
        .iter()
        .zip(e)
        .filter(|(_, &e)| e > floor && e.is_finite())
        .map(|(&h, &e)| (h.ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// [`convergence_rate_above`] with the floor at `1e2` machine epsilons.
pub fn convergence_rate(h: &[f64], e: &[f64]) -> Option<f64> {
    convergence_rate_above(h, e, 1e2 * f64::EPSILON)
}
