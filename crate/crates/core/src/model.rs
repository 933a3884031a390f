//! Meshes, geometry builders, boundary conditions and the global DOF layout.

use serde::{Deserialize, Serialize};

use crate::constitutive::CrossSection;
use crate::element::{ElementDef, ElementDofs, LocalLayout};
use crate::error::BeamError;
use crate::so3::{exp_rotvec, Vector3};
use crate::{Rotation, RotVec, Vec3};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: usize,
    pub r0: Vec3,
    /// Incident elements in increasing order.
    pub elements: Vec<usize>,
    /// Initial frame seen from the first incident element; material nodal
    /// moments are expressed in it.
    pub frame0: Rotation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub nodes: Vec<Node>,
    pub elements: Vec<ElementDef>,
}

impl Mesh {
    /// Assembles a mesh from node positions and elements and validates it.
    pub fn new(positions: Vec<Vec3>, elements: Vec<ElementDef>) -> Result<Self, BeamError> {
        let mut nodes: Vec<Node> = positions
            .into_iter()
            .enumerate()
            .map(|(id, r0)| Node { id, r0, elements: Vec::new(), frame0: Rotation::identity() })
            .collect();
        for (e, def) in elements.iter().enumerate() {
            if def.id != e {
                return Err(BeamError::InvalidMesh(format!("element {e} carries id {}", def.id)));
            }
            if def.nodes[0] == def.nodes[1] {
                return Err(BeamError::InvalidMesh(format!("element {e} connects a node to itself")));
            }
            for (end, &n) in def.nodes.iter().enumerate() {
                let node = nodes.get_mut(n).ok_or_else(|| {
                    BeamError::InvalidMesh(format!("element {e} references missing node {n}"))
                })?;
                if node.elements.is_empty() {
                    node.frame0 = def.frame0[end];
                }
                node.elements.push(e);
            }
        }
        let mesh = Self { nodes, elements };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn validate(&self) -> Result<(), BeamError> {
        if self.elements.is_empty() {
            return Err(BeamError::InvalidMesh("mesh has no elements".into()));
        }
        for n in &self.nodes {
            if n.elements.is_empty() {
                return Err(BeamError::DanglingNode(n.id));
            }
        }
        for def in &self.elements {
            if !(def.length() > 0.0) {
                return Err(BeamError::InvalidMesh(format!("element {} has zero length", def.id)));
            }
            let chord = (def.r0[1] - def.r0[0]).norm();
            if !(chord > 0.0) {
                return Err(BeamError::InvalidMesh(format!("element {} has coincident ends", def.id)));
            }
            def.section.validate()?;
        }
        // connectivity by union-find over element endpoints
        let mut parent: Vec<usize> = (0..self.nodes.len()).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        for def in &self.elements {
            let (a, b) = (find(&mut parent, def.nodes[0]), find(&mut parent, def.nodes[1]));
            parent[a] = b;
        }
        let root = find(&mut parent, 0);
        for i in 0..self.nodes.len() {
            if find(&mut parent, i) != root {
                return Err(BeamError::InvalidMesh("mesh is not connected".into()));
            }
        }
        Ok(())
    }

    pub fn total_length(&self) -> f64 {
        self.elements.iter().map(|e| e.length()).sum()
    }

    /// Order of the elements if all share one.
    pub fn order(&self) -> Option<usize> {
        let k = self.elements[0].order;
        self.elements.iter().all(|e| e.order == k).then_some(k)
    }
}

/// Incremental mesh construction from parametrized curves.
#[derive(Clone, Debug, Default)]
pub struct MeshBuilder {
    positions: Vec<Vec3>,
    elements: Vec<ElementDef>,
}

impl MeshBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, r: Vec3) -> usize {
        self.positions.push(r);
        self.positions.len() - 1
    }

    pub fn position(&self, node: usize) -> Vec3 {
        self.positions[node]
    }

    /// Meshes `curve` on arclength `[s0, s1]` with `n_elem` equal elements.
    /// `start`/`end` reuse existing nodes; otherwise new nodes are created.
    /// Returns the first and last node ids.
    #[allow(clippy::too_many_arguments)]
    pub fn add_curve<F>(
        &mut self,
        start: Option<usize>,
        end: Option<usize>,
        s: [f64; 2],
        n_elem: usize,
        order: usize,
        section: CrossSection,
        curve: F,
    ) -> Result<(usize, usize), BeamError>
    where
        F: Fn(f64) -> (Vec3, Rotation),
    {
        if n_elem == 0 {
            return Err(BeamError::InvalidMesh("a segment needs at least one element".into()));
        }
        if !(s[1] > s[0]) {
            return Err(BeamError::InvalidMesh("segment length must be positive".into()));
        }
        let h = (s[1] - s[0]) / n_elem as f64;
        let first = match start {
            Some(n) => n,
            None => self.add_node(curve(s[0]).0),
        };
        let mut prev = first;
        for i in 0..n_elem {
            let sa = s[0] + i as f64 * h;
            let sb = if i + 1 == n_elem { s[1] } else { s[0] + (i + 1) as f64 * h };
            let next = match (i + 1 == n_elem, end) {
                (true, Some(n)) => n,
                _ => self.add_node(curve(sb).0),
            };
            let id = self.elements.len();
            self.elements.push(ElementDef::from_curve(id, order, [prev, next], [sa, sb], section, &curve)?);
            prev = next;
        }
        Ok((first, prev))
    }

    pub fn build(self) -> Result<Mesh, BeamError> {
        Mesh::new(self.positions, self.elements)
    }
}

fn rot_z(angle: f64) -> Rotation {
    exp_rotvec(&(Vec3::unit(2) * angle))
}

/// Straight beam of length `len` along `e₁` from the origin, frames identity.
pub fn build_straight(
    len: f64,
    n_elem: usize,
    order: usize,
    section: CrossSection,
) -> Result<Mesh, BeamError> {
    build_polyline(&[Vec3::zeros(), Vec3::unit(0) * len], n_elem, order, section)
}

/// Circular arc of radius `radius` and opening `angle` in the x₁x₂-plane,
/// starting at the origin with tangent `e₁` and bending towards `+e₂`.
pub fn build_arc(
    radius: f64,
    angle: f64,
    n_elem: usize,
    order: usize,
    section: CrossSection,
) -> Result<Mesh, BeamError> {
    let mut b = MeshBuilder::new();
    b.add_curve(None, None, [0.0, radius * angle], n_elem, order, section, arc_curve(radius))?;
    b.build()
}

/// Position and frame of the arc used by [`build_arc`].
pub fn arc_curve(radius: f64) -> impl Fn(f64) -> (Vec3, Rotation) {
    move |s: f64| {
        let t = s / radius;
        // 1 − cos t = 2 sin²(t/2) keeps small angles accurate
        let h = (0.5 * t).sin();
        (Vector3([radius * t.sin(), 2.0 * radius * h * h, 0.0]), rot_z(t))
    }
}

/// Helix of radius `r0`, height `h0` and `n_coils` turns:
/// `r(s) = R₀ sin α e₁ − R₀ cos α e₂ + c R₀ α e₃`, `α = s/(R₀√(1+c²))`,
/// `c = h₀/(2πnR₀)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HelixCurve {
    pub r0: f64,
    pub h0: f64,
    pub n_coils: f64,
}

impl HelixCurve {
    pub fn slope(&self) -> f64 {
        self.h0 / (2.0 * std::f64::consts::PI * self.n_coils * self.r0)
    }

    pub fn length(&self) -> f64 {
        let c = self.slope();
        (1.0 + c * c).sqrt() * 2.0 * std::f64::consts::PI * self.n_coils * self.r0
    }

    fn alpha(&self, s: f64) -> f64 {
        let c = self.slope();
        s / (self.r0 * (1.0 + c * c).sqrt())
    }

    pub fn position(&self, s: f64) -> Vec3 {
        let a = self.alpha(s);
        let c = self.slope();
        Vector3([self.r0 * a.sin(), -self.r0 * a.cos(), c * self.r0 * a])
    }

    /// Material curvature of the helix frame, constant along `s`.
    pub fn curvature(&self) -> Vec3 {
        let c = self.slope();
        Vector3([c, 0.0, 1.0]) * (1.0 / (self.r0 * (1.0 + c * c)))
    }

    /// Initial frame rotation `exp(−atan(c) e₂)`; it maps `e₁` to the
    /// tangent at `s = 0`.
    pub fn initial_rotation(&self) -> RotVec {
        Vec3::unit(1) * (-self.slope().atan())
    }

    /// Frame `exp(ψ(0))·exp(s K)` with `K` the constant material curvature:
    /// `g₁` is the tangent and `g₃` stays in the plane of `e₃` and the tangent.
    pub fn frame(&self, s: f64) -> Rotation {
        exp_rotvec(&self.initial_rotation()).compose(&exp_rotvec(&(self.curvature() * s)))
    }
}

/// Meshes the helix itself as an initially curved beam.
pub fn build_helix(
    r0: f64,
    h0: f64,
    n_coils: f64,
    n_elem: usize,
    order: usize,
    section: CrossSection,
) -> Result<Mesh, BeamError> {
    let helix = HelixCurve { r0, h0, n_coils };
    let mut b = MeshBuilder::new();
    b.add_curve(None, None, [0.0, helix.length()], n_elem, order, section, |s| {
        (helix.position(s), helix.frame(s))
    })?;
    b.build()
}

/// Rotation of smallest angle taking `e₁` to the unit vector `d`.
pub fn frame_along(d: &Vec3) -> Rotation {
    let d = *d * (1.0 / d.norm());
    let e1 = Vec3::unit(0);
    let axis = e1.cross(&d);
    let s = axis.norm();
    let c = e1.dot(&d);
    if s < 1e-14 {
        return if c > 0.0 { Rotation::identity() } else { rot_z(std::f64::consts::PI) };
    }
    exp_rotvec(&(axis * (s.atan2(c) / s)))
}

/// Straight segments through `points`, `n_elem_per_segment` elements each,
/// with kinks at interior points. Arclength accumulates along the path.
pub fn build_polyline(
    points: &[Vec3],
    n_elem_per_segment: usize,
    order: usize,
    section: CrossSection,
) -> Result<Mesh, BeamError> {
    if points.len() < 2 {
        return Err(BeamError::InvalidMesh("a polyline needs at least two points".into()));
    }
    let mut b = MeshBuilder::new();
    let mut last = None;
    let mut s0 = 0.0;
    for w in points.windows(2) {
        let (p, q) = (w[0], w[1]);
        let len = (q - p).norm();
        if !(len > 0.0) {
            return Err(BeamError::InvalidMesh("polyline has a zero-length segment".into()));
        }
        let dir = (q - p) * (1.0 / len);
        let frame = frame_along(&dir);
        let (_, end) = b.add_curve(
            last,
            None,
            [s0, s0 + len],
            n_elem_per_segment,
            order,
            section,
            move |s| (p + dir * (s - s0), frame),
        )?;
        last = Some(end);
        s0 += len;
    }
    b.build()
}

/// Node ids of the fork's characteristic points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForkPoints {
    pub root: usize,
    pub branch: usize,
    pub tip_upper: usize,
    pub tip_lower: usize,
}

/// Shaft from the origin to `P_B = (L, 0, 0)` that branches into a
/// semicircle of radius `R` centred at `(L + R, 0, 0)`; the two quarter-circle
/// tines end at `(L + R, ±R, 0)`.
pub fn build_fork(
    len: f64,
    radius: f64,
    n_elem_shaft: usize,
    n_elem_tine: usize,
    order: usize,
    section: CrossSection,
) -> Result<(Mesh, ForkPoints), BeamError> {
    use std::f64::consts::{FRAC_PI_2, PI};
    let mut b = MeshBuilder::new();
    let (root, branch) = b.add_curve(None, None, [0.0, len], n_elem_shaft, order, section, |s| {
        (Vec3::unit(0) * s, Rotation::identity())
    })?;
    let centre = Vec3::unit(0) * (len + radius);
    let quarter = FRAC_PI_2 * radius;
    // upper tine: polar angle φ = π − s/R
    let upper = move |s: f64| {
        let phi = PI - s / radius;
        (centre + Vector3([radius * phi.cos(), radius * phi.sin(), 0.0]), rot_z(phi - FRAC_PI_2))
    };
    // lower tine: φ = π + s/R
    let lower = move |s: f64| {
        let phi = PI + s / radius;
        (centre + Vector3([radius * phi.cos(), radius * phi.sin(), 0.0]), rot_z(phi - 1.5 * PI))
    };
    let (_, tip_upper) = b.add_curve(Some(branch), None, [0.0, quarter], n_elem_tine, order, section, upper)?;
    let (_, tip_lower) = b.add_curve(Some(branch), None, [0.0, quarter], n_elem_tine, order, section, lower)?;
    let mesh = b.build()?;
    Ok((mesh, ForkPoints { root, branch, tip_upper, tip_lower }))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentFrame {
    /// Fixed direction in space.
    #[default]
    Spatial,
    /// Follows the nodal frame: `m = Λ_V·M_ext`.
    Material,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BoundaryCondition {
    /// `r = value` at the node.
    ClampPosition { node: usize, value: Vec3 },
    /// `ψV = 0` at the node.
    ClampRotation { node: usize },
    /// `ψV = ∠exp(λ·rotation)`.
    PrescribeRotation { node: usize, rotation: RotVec },
    PointForce { node: usize, force: Vec3 },
    PointMoment {
        node: usize,
        moment: Vec3,
        #[serde(default)]
        frame: MomentFrame,
    },
    /// Dead load per unit length, uniform over the element.
    DistributedForce { element: usize, force: Vec3 },
    /// Spatial couple per unit length, uniform over the element. Experimental.
    DistributedCouple { element: usize, couple: Vec3 },
}

impl BoundaryCondition {
    pub fn is_kinematic(&self) -> bool {
        matches!(
            self,
            Self::ClampPosition { .. } | Self::ClampRotation { .. } | Self::PrescribeRotation { .. }
        )
    }

    fn node(&self) -> Option<usize> {
        match *self {
            Self::ClampPosition { node, .. }
            | Self::ClampRotation { node }
            | Self::PrescribeRotation { node, .. }
            | Self::PointForce { node, .. }
            | Self::PointMoment { node, .. } => Some(node),
            _ => None,
        }
    }

    /// Magnitude used to scale the residual tolerance.
    pub fn magnitude(&self) -> f64 {
        match self {
            Self::PointForce { force, .. } => force.norm(),
            Self::PointMoment { moment, .. } => moment.norm(),
            Self::DistributedForce { force, .. } => force.norm(),
            Self::DistributedCouple { couple, .. } => couple.norm(),
            _ => 0.0,
        }
    }
}

/// Conditions ramped with `λ ∈ [0, 1]` in equal increments. Conditions of
/// earlier phases stay at full value, later ones are inactive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoadPhase {
    pub increments: usize,
    pub conditions: Vec<BoundaryCondition>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LoadCase {
    /// Kinematic supports active throughout.
    pub supports: Vec<BoundaryCondition>,
    pub phases: Vec<LoadPhase>,
}

impl LoadCase {
    pub fn validate(&self, mesh: &Mesh) -> Result<(), BeamError> {
        let bad = |m: String| Err(BeamError::InvalidBoundaryCondition(m));
        for s in &self.supports {
            if !matches!(s, BoundaryCondition::ClampPosition { .. } | BoundaryCondition::ClampRotation { .. }) {
                return bad(format!("{s:?} is not a support; put it in a load phase"));
            }
        }
        let all = self.supports.iter().chain(self.phases.iter().flat_map(|p| p.conditions.iter()));
        for c in all {
            if let Some(n) = c.node() {
                if n >= mesh.nodes.len() {
                    return bad(format!("node {n} does not exist"));
                }
            }
            match c {
                BoundaryCondition::DistributedForce { element, .. }
                | BoundaryCondition::DistributedCouple { element, .. }
                    if *element >= mesh.elements.len() =>
                {
                    return bad(format!("element {element} does not exist"));
                }
                _ => {}
            }
            let finite = match c {
                BoundaryCondition::ClampPosition { value: v, .. }
                | BoundaryCondition::PrescribeRotation { rotation: v, .. }
                | BoundaryCondition::PointForce { force: v, .. }
                | BoundaryCondition::PointMoment { moment: v, .. }
                | BoundaryCondition::DistributedForce { force: v, .. }
                | BoundaryCondition::DistributedCouple { couple: v, .. } => v.is_finite(),
                BoundaryCondition::ClampRotation { .. } => true,
            };
            if !finite {
                return bad(format!("{c:?} has non-finite data"));
            }
        }
        // one kinematic condition per node and block, among the supports and
        // within each phase
        let mut lists: Vec<Vec<&BoundaryCondition>> = vec![self.supports.iter().collect()];
        for p in &self.phases {
            if p.increments == 0 {
                return bad("a load phase needs at least one increment".into());
            }
            lists.push(p.conditions.iter().collect());
        }
        let mut pos_support = vec![false; mesh.nodes.len()];
        let mut rot_support = vec![false; mesh.nodes.len()];
        for (li, list) in lists.iter().enumerate() {
            let mut pos = vec![false; mesh.nodes.len()];
            let mut rot = vec![false; mesh.nodes.len()];
            for c in list {
                let (slot, sup, n) = match **c {
                    BoundaryCondition::ClampPosition { node, .. } => (&mut pos, &pos_support, node),
                    BoundaryCondition::ClampRotation { node } | BoundaryCondition::PrescribeRotation { node, .. } => {
                        (&mut rot, &rot_support, node)
                    }
                    _ => continue,
                };
                if slot[n] || (li > 0 && sup[n]) {
                    return bad(format!("node {n} has more than one kinematic condition on the same block"));
                }
                slot[n] = true;
            }
            if li == 0 {
                pos_support = pos;
                rot_support = rot;
            }
        }
        Ok(())
    }

    pub fn load_scale(&self) -> f64 {
        self.phases
            .iter()
            .flat_map(|p| p.conditions.iter())
            .map(|c| c.magnitude())
            .fold(0.0, f64::max)
    }
}

/// A mesh together with its loading.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    pub mesh: Mesh,
    pub load_case: LoadCase,
}

/// Global numbering: node blocks `[r, ψV]` first, then per element
/// `[r_int | M | ψ_lo | ψ_ho]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DofLayout {
    pub n_nodes: usize,
    pub element_offsets: Vec<usize>,
    pub n_dofs: usize,
}

impl DofLayout {
    pub fn new(mesh: &Mesh) -> Result<Self, BeamError> {
        for n in &mesh.nodes {
            if n.elements.is_empty() {
                return Err(BeamError::DanglingNode(n.id));
            }
        }
        let mut off = 6 * mesh.nodes.len();
        let mut element_offsets = Vec::with_capacity(mesh.elements.len());
        for e in &mesh.elements {
            element_offsets.push(off);
            off += 9 * e.order;
        }
        Ok(Self { n_nodes: mesh.nodes.len(), element_offsets, n_dofs: off })
    }

    #[inline]
    pub fn node_r(&self, node: usize) -> usize {
        6 * node
    }

    #[inline]
    pub fn node_psi(&self, node: usize) -> usize {
        6 * node + 3
    }

    /// Number of DOFs shared between elements.
    pub fn n_node_dofs(&self) -> usize {
        6 * self.n_nodes
    }

    /// Global index of every local DOF of element `e`, in local order.
    pub fn element_map(&self, mesh: &Mesh, e: usize) -> Vec<usize> {
        let def = &mesh.elements[e];
        let k = def.order;
        let l = LocalLayout { k };
        let base = self.element_offsets[e];
        let mut map = vec![0; l.len()];
        for c in 0..3 {
            for (end, &n) in def.nodes.iter().enumerate() {
                map[l.r(end, c)] = self.node_r(n) + c;
                map[l.psi_v(end, c)] = self.node_psi(n) + c;
            }
            for a in 2..=k {
                map[l.r(a, c)] = base + 3 * (a - 2) + c;
            }
            for j in 0..=k {
                map[l.m(j, c)] = base + 3 * (k - 1) + 3 * j + c;
            }
            map[l.psi_lo(c)] = base + 6 * k + c;
            for j in 1..k {
                map[l.psi_ho(j, c)] = base + 6 * k + 3 + 3 * (j - 1) + c;
            }
        }
        map
    }

    /// DOFs kept in the condensed global system: node blocks and internal
    /// centerline modes.
    pub fn is_condensed_global(&self, mesh: &Mesh, dof: usize) -> bool {
        if dof < self.n_node_dofs() {
            return true;
        }
        let e = self.element_offsets.partition_point(|&o| o <= dof) - 1;
        dof - self.element_offsets[e] < 3 * (mesh.elements[e].order - 1)
    }

    /// Reference state: initial geometry, zero moments and nodal rotations.
    pub fn reference_state(&self, mesh: &Mesh) -> Vec<f64> {
        let mut x = vec![0.0; self.n_dofs];
        for (e, def) in mesh.elements.iter().enumerate() {
            let map = self.element_map(mesh, e);
            for (i, v) in def.reference_dofs().to_vector().into_iter().enumerate() {
                x[map[i]] = v;
            }
        }
        x
    }

    pub fn gather(&self, mesh: &Mesh, e: usize, x: &[f64]) -> ElementDofs {
        let map = self.element_map(mesh, e);
        let local: Vec<f64> = map.iter().map(|&g| x[g]).collect();
        ElementDofs::from_slice(mesh.elements[e].order, &local)
    }

    pub fn node_position(&self, x: &[f64], node: usize) -> Vec3 {
        let i = self.node_r(node);
        Vector3([x[i], x[i + 1], x[i + 2]])
    }

    pub fn node_rotation(&self, x: &[f64], node: usize) -> RotVec {
        let i = self.node_psi(node);
        Vector3([x[i], x[i + 1], x[i + 2]])
    }
}

/// Convenience: DOF layout of a mesh.
pub fn dof_layout(mesh: &Mesh) -> Result<DofLayout, BeamError> {
    DofLayout::new(mesh)
}
