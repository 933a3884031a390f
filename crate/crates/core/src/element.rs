//! The mixed beam element.
//!
//! Fields per element of order `k`:
//! - centerline `r`: continuous, order `k`, end values shared with neighbours;
//! - stress couple `M`: Legendre coefficients `P₀ … P_k`, element-local;
//! - rotation `Λ_E = exp(ψ_lo)·exp(ψ_ho(ξ))`, `ψ_ho = Σ_{j=1}^{k−1} c_j P_j`;
//! - nodal incremental rotations `ψV` at both ends, shared by all incident
//!   elements and coupled to `Λ_E` through the interface terms.
//!
//! Local DOF order (length `9k + 12`):
//! `[r (3(k+1)) | ψV_left, ψV_right (6) | M (3(k+1)) | ψ_lo (3) | ψ_ho (3(k−1))]`.
//! The first `3k + 9` entries are the globally coupled part, the rest can
//! be condensed.

use nalgebra::{DMatrix, DVector};
use num_dual::{Dual2SVec64, DualSVec64};
use serde::{Deserialize, Serialize};

use crate::constitutive::{
    complementary_kappa, dual_energy_kappa, energy_gamma, force_strain, CrossSection,
};
use crate::error::BeamError;
use crate::quadrature::{centerline_basis, legendre_basis, QuadratureRule};
use crate::real::{first_order, second_order, Real};
use crate::so3::{exp_rotvec, log_rotation, relative_rotvec, tangent_map, UnitQuaternion, Vector3};
use crate::{Rotation, RotVec, Vec3};

/// Relative rotations at or beyond this angle are rejected.
const MAX_ANGLE: f64 = std::f64::consts::PI - 1e-6;

/// Quadrature for the force-strain energy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integration {
    /// `k + 1` Gauss points everywhere.
    Full,
    /// `k` Gauss points for the force-strain energy, `k + 1` elsewhere.
    #[default]
    #[serde(alias = "reduced")]
    ReducedGamma,
}

/// Distributed loads per unit reference length at `λ = 1`, spatial frame.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ElementLoads {
    pub force: Vec3,
    /// Distributed couple; non-conservative, experimental.
    pub couple: Vec3,
}

impl ElementLoads {
    pub fn is_zero(&self) -> bool {
        self.force.max_abs() == 0.0 && self.couple.max_abs() == 0.0
    }
}

/// Reference data of one element.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementDef {
    pub id: usize,
    pub order: usize,
    pub nodes: [usize; 2],
    /// Arclength of the two ends.
    pub span: [f64; 2],
    /// Initial centerline, `k + 1` coefficients in the centerline basis.
    pub r0: Vec<Vec3>,
    pub psi0_lo: RotVec,
    /// `k − 1` Legendre coefficients of the initial higher-order rotation.
    pub psi0_ho: Vec<RotVec>,
    /// Discrete initial rotation at both ends.
    pub frame0: [Rotation; 2],
    pub section: CrossSection,
}

/// Current values of all element fields.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementDofs {
    pub r: Vec<Vec3>,
    pub psi_v: [RotVec; 2],
    pub m: Vec<Vec3>,
    pub psi_lo: RotVec,
    pub psi_ho: Vec<RotVec>,
}

/// Index helpers for the local DOF vector of an order-`k` element.
#[derive(Clone, Copy, Debug)]
pub struct LocalLayout {
    pub k: usize,
}

impl LocalLayout {
    #[inline]
    pub fn r(&self, a: usize, c: usize) -> usize {
        3 * a + c
    }
    #[inline]
    pub fn psi_v(&self, end: usize, c: usize) -> usize {
        3 * (self.k + 1) + 3 * end + c
    }
    #[inline]
    pub fn m(&self, j: usize, c: usize) -> usize {
        3 * self.k + 9 + 3 * j + c
    }
    #[inline]
    pub fn psi_lo(&self, c: usize) -> usize {
        6 * self.k + 12 + c
    }
    /// `j` runs from 1 to `k − 1`.
    #[inline]
    pub fn psi_ho(&self, j: usize, c: usize) -> usize {
        6 * self.k + 15 + 3 * (j - 1) + c
    }
    /// Size of the globally coupled part.
    #[inline]
    pub fn n_global(&self) -> usize {
        3 * self.k + 9
    }
    #[inline]
    pub fn len(&self) -> usize {
        9 * self.k + 12
    }
}

impl ElementDef {
    /// Builds an element on `[s0, s1]` of a curve given by its position and
    /// frame as functions of arclength.
    ///
    /// The centerline is interpolated at Chebyshev–Lobatto points. The frame
    /// is split into its midpoint value and an L²-projection of the relative
    /// rotation onto `P₁ … P_{k−1}`.
    pub fn from_curve<F>(
        id: usize,
        order: usize,
        nodes: [usize; 2],
        span: [f64; 2],
        section: CrossSection,
        curve: F,
    ) -> Result<Self, BeamError>
    where
        F: Fn(f64) -> (Vec3, Rotation),
    {
        if order == 0 {
            return Err(BeamError::InvalidMesh("element order must be at least 1".into()));
        }
        if !(span[1] - span[0] > 0.0) {
            return Err(BeamError::InvalidMesh(format!("element {id} has non-positive length")));
        }
        section.validate()?;
        let k = order;
        let jac = 0.5 * (span[1] - span[0]);
        let s_of = |xi: f64| span[0] + (xi + 1.0) * jac;

        let ra = curve(span[0]).0;
        let rb = curve(span[1]).0;
        let mut r0 = vec![ra, rb];
        if k >= 2 {
            let m = k - 1;
            let mut a = DMatrix::zeros(m, m);
            let mut rhs = [DVector::zeros(m), DVector::zeros(m), DVector::zeros(m)];
            for i in 0..m {
                let xi = -(std::f64::consts::PI * (i + 1) as f64 / k as f64).cos();
                let (n, _) = centerline_basis(k, xi);
                let r = curve(s_of(xi)).0 - ra * n[0] - rb * n[1];
                for j in 0..m {
                    a[(i, j)] = n[j + 2];
                }
                for c in 0..3 {
                    rhs[c][i] = r[c];
                }
            }
            let lu = a.lu();
            let sol: Vec<DVector<f64>> = rhs
                .iter()
                .map(|b| lu.solve(b).expect("interpolation matrix is regular"))
                .collect();
            for j in 0..m {
                r0.push(Vector3([sol[0][j], sol[1][j], sol[2][j]]));
            }
        }

        let psi0_lo = log_rotation(&curve(0.5 * (span[0] + span[1])).1);
        let lam_lo = exp_rotvec(&psi0_lo);
        let mut psi0_ho = vec![Vec3::zeros(); k - 1];
        if k >= 2 {
            let q = QuadratureRule::gauss(2 * k + 8);
            for (xi, w) in q.iter() {
                let rel = relative_rotvec(&lam_lo, &curve(s_of(xi)).1);
                let (p, _) = legendre_basis(k - 1, xi);
                for j in 1..k {
                    psi0_ho[j - 1] += rel * (w * p[j] * (2 * j + 1) as f64 * 0.5);
                }
            }
        }
        let mut def = Self {
            id,
            order,
            nodes,
            span,
            r0,
            psi0_lo,
            psi0_ho,
            frame0: [Rotation::identity(); 2],
            section,
        };
        def.frame0 = [
            local_rotation(&def.psi0_lo, &def.psi0_ho, -1.0)
                .map_err(|_| def.too_large(std::f64::consts::PI))?,
            local_rotation(&def.psi0_lo, &def.psi0_ho, 1.0)
                .map_err(|_| def.too_large(std::f64::consts::PI))?,
        ];
        Ok(def)
    }

    fn too_large(&self, angle: f64) -> BeamError {
        BeamError::RelativeRotationTooLarge { element: self.id, angle }
    }

    pub fn layout(&self) -> LocalLayout {
        LocalLayout { k: self.order }
    }

    pub fn length(&self) -> f64 {
        self.span[1] - self.span[0]
    }

    /// `ds/dξ`.
    pub fn jacobian(&self) -> f64 {
        0.5 * self.length()
    }

    pub fn reference_dofs(&self) -> ElementDofs {
        let k = self.order;
        ElementDofs {
            r: self.r0.clone(),
            psi_v: [Vec3::zeros(); 2],
            m: vec![Vec3::zeros(); k + 1],
            psi_lo: self.psi0_lo,
            psi_ho: self.psi0_ho.clone(),
        }
    }

    pub fn reference_position(&self, xi: f64) -> Vec3 {
        eval_centerline(&self.r0, xi).0
    }

    pub fn reference_rotation(&self, xi: f64) -> Rotation {
        exp_rotvec(&self.psi0_lo).compose(&exp_rotvec(&eval_ho(&self.psi0_ho, xi).0))
    }

    /// Strains of the reference configuration at `xi`.
    fn reference_strains(&self, xi: f64) -> (Vec3, Vec3) {
        let jac = self.jacobian();
        let dr0 = eval_centerline(&self.r0, xi).1;
        let (h0, dh0) = eval_ho(&self.psi0_ho, xi);
        let lam0 = exp_rotvec(&self.psi0_lo) * exp_rotvec(&h0);
        let gamma0 = force_strain(&lam0, &(dr0 * (1.0 / jac)));
        let kappa0 = tangent_map(&h0).tr_mul_vec(&(dh0 * (1.0 / jac)));
        (gamma0, kappa0)
    }
}

/// `(r(ξ), dr/dξ)` from centerline coefficients.
pub fn eval_centerline(r: &[Vec3], xi: f64) -> (Vec3, Vec3) {
    let k = r.len() - 1;
    let (n, dn) = centerline_basis(k, xi);
    let mut v = Vec3::zeros();
    let mut d = Vec3::zeros();
    for a in 0..=k {
        v += r[a] * n[a];
        d += r[a] * dn[a];
    }
    (v, d)
}

/// `(ψ_ho(ξ), dψ_ho/dξ)` from coefficients of `P₁ … P_{k−1}`.
pub fn eval_ho(c: &[RotVec], xi: f64) -> (Vec3, Vec3) {
    let (p, dp) = legendre_basis(c.len(), xi);
    let mut v = Vec3::zeros();
    let mut d = Vec3::zeros();
    for (j, cj) in c.iter().enumerate() {
        v += *cj * p[j + 1];
        d += *cj * dp[j + 1];
    }
    (v, d)
}

/// `M(ξ)` from Legendre coefficients `P₀ … P_k`.
pub fn eval_moment(m: &[Vec3], xi: f64) -> Vec3 {
    let (p, _) = legendre_basis(m.len() - 1, xi);
    m.iter().zip(&p).fold(Vec3::zeros(), |acc, (mj, pj)| acc + *mj * *pj)
}

/// `exp(ψ_lo)·exp(ψ_ho(ξ))`.
pub fn local_rotation(psi_lo: &RotVec, psi_ho: &[RotVec], xi: f64) -> Result<Rotation, BeamError> {
    let h = eval_ho(psi_ho, xi).0;
    let angle = h.norm();
    if angle >= MAX_ANGLE {
        return Err(BeamError::RelativeRotationTooLarge { element: usize::MAX, angle });
    }
    Ok(exp_rotvec(psi_lo).compose(&exp_rotvec(&h)))
}

/// `sign · ∠(Λ_Eᵀ·Λ_V)·M` with `Λ_V = exp(ψV)·Λ₀`.
pub fn interface_jump(
    lambda_e: &Rotation,
    psi_v: &RotVec,
    frame0: &Rotation,
    m_end: &Vec3,
    sign: f64,
) -> Result<f64, BeamError> {
    let lam_v = exp_rotvec(psi_v).compose(frame0);
    let rel = relative_rotvec(lambda_e, &lam_v);
    let angle = rel.norm();
    if angle >= MAX_ANGLE {
        return Err(BeamError::RelativeRotationTooLarge { element: usize::MAX, angle });
    }
    Ok(sign * rel.dot(m_end))
}

impl ElementDofs {
    pub fn to_vector(&self) -> Vec<f64> {
        let k = self.r.len() - 1;
        let l = LocalLayout { k };
        let mut x = vec![0.0; l.len()];
        for c in 0..3 {
            for a in 0..=k {
                x[l.r(a, c)] = self.r[a][c];
                x[l.m(a, c)] = self.m[a][c];
            }
            for e in 0..2 {
                x[l.psi_v(e, c)] = self.psi_v[e][c];
            }
            x[l.psi_lo(c)] = self.psi_lo[c];
            for j in 1..k {
                x[l.psi_ho(j, c)] = self.psi_ho[j - 1][c];
            }
        }
        x
    }

    pub fn from_slice(k: usize, x: &[f64]) -> Self {
        let l = LocalLayout { k };
        let v = |f: &dyn Fn(usize) -> usize| Vector3([x[f(0)], x[f(1)], x[f(2)]]);
        Self {
            r: (0..=k).map(|a| v(&|c| l.r(a, c))).collect(),
            psi_v: [v(&|c| l.psi_v(0, c)), v(&|c| l.psi_v(1, c))],
            m: (0..=k).map(|j| v(&|c| l.m(j, c))).collect(),
            psi_lo: v(&|c| l.psi_lo(c)),
            psi_ho: (1..k).map(|j| v(&|c| l.psi_ho(j, c))).collect(),
        }
    }
}

fn gamma_rule(k: usize, integration: Integration) -> QuadratureRule {
    match integration {
        Integration::Full => QuadratureRule::gauss(k + 1),
        Integration::ReducedGamma => QuadratureRule::gauss(k),
    }
}

fn check_ho(def: &ElementDef, dofs: &ElementDofs, points: &[f64]) -> Result<(), BeamError> {
    for &xi in points.iter().chain([-1.0, 1.0].iter()) {
        let angle = eval_ho(&dofs.psi_ho, xi).0.norm();
        if angle >= MAX_ANGLE {
            return Err(def.too_large(angle));
        }
    }
    Ok(())
}

/// Split of the element energy into its parts.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EnergyParts {
    /// `∫ φ_γ ds`.
    pub gamma: f64,
    /// `∫ κ·M ds`.
    pub kappa_m: f64,
    /// `∫ −½ M·C_κ⁻¹·M ds`.
    pub complementary: f64,
    /// Interface terms at both ends.
    pub jump: f64,
    /// Potential of the dead distributed force, `−λ∫q·r ds`.
    pub load: f64,
}

impl EnergyParts {
    pub fn total(&self) -> f64 {
        self.gamma + self.kappa_m + self.complementary + self.jump + self.load
    }
}

/// Element energy, evaluated directly in floating point.
pub fn element_energy(
    def: &ElementDef,
    dofs: &ElementDofs,
    loads: &ElementLoads,
    lambda: f64,
    integration: Integration,
) -> Result<f64, BeamError> {
    element_energy_parts(def, dofs, loads, lambda, integration).map(|p| p.total())
}

pub fn element_energy_parts(
    def: &ElementDef,
    dofs: &ElementDofs,
    loads: &ElementLoads,
    lambda: f64,
    integration: Integration,
) -> Result<EnergyParts, BeamError> {
    let k = def.order;
    let jac = def.jacobian();
    let cs = &def.section;
    let full = QuadratureRule::gauss(k + 1);
    check_ho(def, dofs, &full.points)?;
    let lam_lo = exp_rotvec(&dofs.psi_lo);
    let mut parts = EnergyParts::default();

    for (xi, w) in gamma_rule(k, integration).iter() {
        let (gamma0, _) = def.reference_strains(xi);
        let dr = eval_centerline(&dofs.r, xi).1 * (1.0 / jac);
        let h = eval_ho(&dofs.psi_ho, xi).0;
        let gamma = force_strain(&(lam_lo * exp_rotvec(&h)), &dr) - gamma0;
        parts.gamma += w * jac * energy_gamma(&gamma, cs);
    }
    for (xi, w) in full.iter() {
        let (_, kappa0) = def.reference_strains(xi);
        let (h, dh) = eval_ho(&dofs.psi_ho, xi);
        let kappa = tangent_map(&h).tr_mul_vec(&(dh * (1.0 / jac))) - kappa0;
        let m = eval_moment(&dofs.m, xi);
        parts.kappa_m += w * jac * kappa.dot(&m);
        parts.complementary += w * jac * complementary_kappa(&m, cs);
        if loads.force.max_abs() > 0.0 {
            let r = eval_centerline(&dofs.r, xi).0;
            parts.load -= lambda * w * jac * loads.force.dot(&r);
        }
    }
    for (end, (xi, sign)) in [(-1.0, -1.0), (1.0, 1.0)].into_iter().enumerate() {
        let lam_e = local_rotation(&dofs.psi_lo, &dofs.psi_ho, xi).map_err(|_| def.too_large(MAX_ANGLE))?;
        let m_end = eval_moment(&dofs.m, xi);
        parts.jump += interface_jump(&lam_e, &dofs.psi_v[end], &def.frame0[end], &m_end, sign)
            .map_err(|e| match e {
                BeamError::RelativeRotationTooLarge { angle, .. } => def.too_large(angle),
                other => other,
            })?;
    }
    Ok(parts)
}

/// Force strain at one integration point of the γ rule and its derivative
/// with respect to the local DOFs.
#[derive(Clone, Debug)]
pub struct StrainPoint {
    pub gamma: Vec3,
    pub jac: DMatrix<f64>,
}

impl StrainPoint {
    /// `C_γ·(γ + B·Δx)`, the force resultant predicted for an increment.
    pub fn predicted_force(&self, cs: &CrossSection, dx: &[f64]) -> Vec3 {
        let c = cs.c_gamma();
        Vector3(std::array::from_fn(|a| {
            let lin: f64 = (0..dx.len()).map(|p| self.jac[(a, p)] * dx[p]).sum();
            c[a] * (self.gamma[a] + lin)
        }))
    }
}

/// Energy, gradient (residual) and Hessian (tangent) of one element.
#[derive(Clone, Debug)]
pub struct LocalSystem {
    pub energy: f64,
    pub residual: DVector<f64>,
    pub tangent: DMatrix<f64>,
    pub strain_points: Vec<StrainPoint>,
}

impl LocalSystem {
    fn zeros(n: usize) -> Self {
        Self {
            energy: 0.0,
            residual: DVector::zeros(n),
            tangent: DMatrix::zeros(n, n),
            strain_points: Vec::new(),
        }
    }
}

fn strain_at<T: Real>(v: &[T; 9], gamma0: &Vec3) -> Vector3<T> {
    let dr = Vector3([v[0], v[1], v[2]]);
    let lam = exp_rotvec(&Vector3([v[3], v[4], v[5]])) * exp_rotvec(&Vector3([v[6], v[7], v[8]]));
    force_strain(&lam, &dr) - gamma0.lift()
}

/// One linear map from local DOFs to an AD variable: `(variable, dof, coeff)`.
type Entries = Vec<(usize, usize, f64)>;

fn gather<const N: usize>(x: &[f64], entries: &Entries) -> [f64; N] {
    let mut v = [0.0; N];
    for &(i, p, c) in entries {
        v[i] += c * x[p];
    }
    v
}

fn accumulate_second<const N: usize, F>(
    x: &[f64],
    entries: &Entries,
    w: f64,
    sys: &mut LocalSystem,
    f: F,
) where
    F: FnOnce(&[Dual2SVec64<N>; N]) -> Dual2SVec64<N>,
{
    let s = second_order(&gather::<N>(x, entries), f);
    sys.energy += w * s.value;
    for &(i, p, ci) in entries {
        sys.residual[p] += w * ci * s.grad[i];
        for &(j, q, cj) in entries {
            sys.tangent[(p, q)] += w * ci * cj * s.hess[i][j];
        }
    }
}

/// Adds a non-potential generalized force `w·f(x)` to the residual rows given
/// by `entries` together with its Jacobian.
fn accumulate_first<const N: usize, F>(
    x: &[f64],
    entries: &Entries,
    w: f64,
    sys: &mut LocalSystem,
    f: F,
) where
    F: FnOnce(&[DualSVec64<N>; N]) -> [DualSVec64<N>; N],
{
    let j = first_order(&gather::<N>(x, entries), f);
    for &(i, p, ci) in entries {
        sys.residual[p] += w * ci * j.value[i];
        for &(l, q, cl) in entries {
            sys.tangent[(p, q)] += w * ci * cl * j.jac[i][l];
        }
    }
}

/// Residual and tangent of one element: the gradient and Hessian of
/// [`element_energy`] plus the distributed-couple virtual work.
pub fn element_system(
    def: &ElementDef,
    dofs: &ElementDofs,
    loads: &ElementLoads,
    lambda: f64,
    integration: Integration,
) -> Result<LocalSystem, BeamError> {
    element_system_with(def, dofs, loads, lambda, integration, None)
}

/// [`element_system`] where the geometric part of the force-strain tangent
/// uses the given force resultants, one per point of the γ rule, instead of
/// `C_γ·γ`. The residual is unchanged.
pub fn element_system_with(
    def: &ElementDef,
    dofs: &ElementDofs,
    loads: &ElementLoads,
    lambda: f64,
    integration: Integration,
    forces: Option<&[Vec3]>,
) -> Result<LocalSystem, BeamError> {
    let k = def.order;
    let l = def.layout();
    let jac = def.jacobian();
    let cs = def.section;
    let full = QuadratureRule::gauss(k + 1);
    check_ho(def, dofs, &full.points)?;
    let x = dofs.to_vector();
    let mut sys = LocalSystem::zeros(l.len());

    // force strain: variables r′ (0..3), ψ_lo (3..6), ψ_ho(ξ) (6..9)
    let c_gamma = cs.c_gamma();
    for (ip, (xi, w)) in gamma_rule(k, integration).iter().enumerate() {
        let (gamma0, _) = def.reference_strains(xi);
        let (_, dn) = centerline_basis(k, xi);
        let (p, _) = legendre_basis(k, xi);
        let mut e: Entries = Vec::with_capacity(6 * k + 3);
        for c in 0..3 {
            for a in 0..=k {
                e.push((c, l.r(a, c), dn[a] / jac));
            }
            e.push((3 + c, l.psi_lo(c), 1.0));
            for j in 1..k {
                e.push((6 + c, l.psi_ho(j, c), p[j]));
            }
        }
        let xv = gather::<9>(&x, &e);
        let b = first_order::<3, 9, _>(&xv, |v| strain_at(v, &gamma0).0);
        let gamma = Vector3(b.value);
        let n = forces.map_or(gamma.component_mul(&c_gamma), |f| f[ip]);
        let geo = second_order::<9, _>(&xv, |v| strain_at(v, &gamma0).dot(&n.lift()));
        let wj = w * jac;
        sys.energy += wj * energy_gamma(&gamma, &cs);
        let mut point = StrainPoint { gamma, jac: DMatrix::zeros(3, l.len()) };
        for &(i, p, ci) in &e {
            for a in 0..3 {
                sys.residual[p] += wj * ci * b.jac[a][i] * c_gamma[a] * gamma[a];
                point.jac[(a, p)] += ci * b.jac[a][i];
            }
            for &(j, q, cj) in &e {
                let mut h = geo.hess[i][j];
                for a in 0..3 {
                    h += b.jac[a][i] * c_gamma[a] * b.jac[a][j];
                }
                sys.tangent[(p, q)] += wj * ci * cj * h;
            }
        }
        sys.strain_points.push(point);
    }

    // moment strain and complementary energy: ψ_ho(ξ) (0..3), ψ_ho′ (3..6), M(ξ) (6..9)
    for (xi, w) in full.iter() {
        let (_, kappa0) = def.reference_strains(xi);
        let (p, dp) = legendre_basis(k, xi);
        let mut e: Entries = Vec::with_capacity(9 * k);
        for c in 0..3 {
            for j in 1..k {
                e.push((c, l.psi_ho(j, c), p[j]));
                e.push((3 + c, l.psi_ho(j, c), dp[j] / jac));
            }
            for j in 0..=k {
                e.push((6 + c, l.m(j, c), p[j]));
            }
        }
        accumulate_second::<9, _>(&x, &e, w * jac, &mut sys, |v| {
            let h = Vector3([v[0], v[1], v[2]]);
            let dh = Vector3([v[3], v[4], v[5]]);
            let m = Vector3([v[6], v[7], v[8]]);
            let kappa = tangent_map(&h).tr_mul_vec(&dh) - kappa0.lift();
            dual_energy_kappa(&m, &kappa, &cs)
        });

        if lambda != 0.0 && !loads.is_zero() {
            let (n, _) = centerline_basis(k, xi);
            let wl = lambda * w * jac;
            for a in 0..=k {
                for c in 0..3 {
                    sys.residual[l.r(a, c)] -= wl * n[a] * loads.force[c];
                }
            }
            sys.energy -= wl * loads.force.dot(&eval_centerline(&dofs.r, xi).0);
            if loads.couple.max_abs() > 0.0 {
                // ψ_lo (0..3), ψ_ho(ξ) (3..6)
                let mut e: Entries = Vec::with_capacity(3 * k);
                for c in 0..3 {
                    e.push((c, l.psi_lo(c), 1.0));
                    for j in 1..k {
                        e.push((3 + c, l.psi_ho(j, c), p[j]));
                    }
                }
                let couple = loads.couple;
                accumulate_first::<6, _>(&x, &e, -wl, &mut sys, |v| {
                    let lo = Vector3([v[0], v[1], v[2]]);
                    let h = Vector3([v[3], v[4], v[5]]);
                    let c = couple.lift();
                    let a = tangent_map(&lo).tr_mul_vec(&c);
                    let b = tangent_map(&h).tr_mul_vec(&exp_rotvec(&lo).rotate_inverse(&c));
                    [a[0], a[1], a[2], b[0], b[1], b[2]]
                });
            }
        }
    }

    // interfaces: ψ_lo (0..3), ψ_ho(end) (3..6), ψV (6..9), M(end) (9..12)
    for (end, (xi, sign)) in [(-1.0f64, -1.0f64), (1.0, 1.0)].into_iter().enumerate() {
        let lam_e = local_rotation(&dofs.psi_lo, &dofs.psi_ho, xi).map_err(|_| def.too_large(MAX_ANGLE))?;
        let lam_v = exp_rotvec(&dofs.psi_v[end]).compose(&def.frame0[end]);
        let angle = relative_rotvec(&lam_e, &lam_v).norm();
        if angle >= MAX_ANGLE {
            return Err(def.too_large(angle));
        }
        let (p, _) = legendre_basis(k, xi);
        let mut e: Entries = Vec::with_capacity(3 * (k + 3));
        for c in 0..3 {
            e.push((c, l.psi_lo(c), 1.0));
            for j in 1..k {
                e.push((3 + c, l.psi_ho(j, c), p[j]));
            }
            e.push((6 + c, l.psi_v(end, c), 1.0));
            for j in 0..=k {
                e.push((9 + c, l.m(j, c), p[j]));
            }
        }
        let frame0 = def.frame0[end];
        accumulate_second::<12, _>(&x, &e, sign, &mut sys, |v| {
            let lo = exp_rotvec(&Vector3([v[0], v[1], v[2]]));
            let h = exp_rotvec(&Vector3([v[3], v[4], v[5]]));
            let pv = exp_rotvec(&Vector3([v[6], v[7], v[8]]));
            let m = Vector3([v[9], v[10], v[11]]);
            let rel: UnitQuaternion<_> = h.inverse() * lo.inverse() * pv * frame0.lift();
            log_rotation(&rel).dot(&m)
        });
    }
    Ok(sys)
}

/// Gradient of the element energy plus non-conservative distributed terms.
pub fn element_residual(
    def: &ElementDef,
    dofs: &ElementDofs,
    loads: &ElementLoads,
    lambda: f64,
    integration: Integration,
) -> Result<DVector<f64>, BeamError> {
    element_system(def, dofs, loads, lambda, integration).map(|s| s.residual)
}

pub fn element_tangent(
    def: &ElementDef,
    dofs: &ElementDofs,
    loads: &ElementLoads,
    lambda: f64,
    integration: Integration,
) -> Result<DMatrix<f64>, BeamError> {
    element_system(def, dofs, loads, lambda, integration).map(|s| s.tangent)
}

/// Static condensation of a local system.
#[derive(Clone, Debug)]
pub struct Condensed {
    /// Retained local indices, in increasing order.
    pub kept: Vec<usize>,
    pub condensed: Vec<usize>,
    pub tangent: DMatrix<f64>,
    pub residual: DVector<f64>,
    /// `K_cc⁻¹·K_cg`.
    x: DMatrix<f64>,
    /// `K_cc⁻¹·R_c`.
    y: DVector<f64>,
}

impl Condensed {
    /// Increment of the condensed DOFs for a given increment of the kept
    /// ones: `Δx_c = −K_cc⁻¹(R_c + K_cg·Δx_g)`.
    pub fn back_substitute(&self, dx_kept: &DVector<f64>) -> DVector<f64> {
        -(&self.y + &self.x * dx_kept)
    }
}

/// Schur complement of `tangent` with respect to the `condensable` indices.
/// Fails with `SingularCondensationBlock { element: usize::MAX }`; callers
/// attach the element id.
pub fn condense(
    tangent: &DMatrix<f64>,
    residual: &DVector<f64>,
    condensable: &[usize],
) -> Result<Condensed, BeamError> {
    let n = tangent.nrows();
    let mut is_c = vec![false; n];
    for &i in condensable {
        is_c[i] = true;
    }
    let kept: Vec<usize> = (0..n).filter(|&i| !is_c[i]).collect();
    let cond: Vec<usize> = (0..n).filter(|&i| is_c[i]).collect();
    let (ng, nc) = (kept.len(), cond.len());
    let sub = |rows: &[usize], cols: &[usize]| {
        DMatrix::from_fn(rows.len(), cols.len(), |i, j| tangent[(rows[i], cols[j])])
    };
    let k_gg = sub(&kept, &kept);
    let r_g = DVector::from_fn(ng, |i, _| residual[kept[i]]);
    if nc == 0 {
        return Ok(Condensed {
            kept,
            condensed: cond,
            tangent: k_gg,
            residual: r_g,
            x: DMatrix::zeros(0, ng),
            y: DVector::zeros(0),
        });
    }
    let k_cc = sub(&cond, &cond);
    let k_cg = sub(&cond, &kept);
    let k_gc = sub(&kept, &cond);
    let r_c = DVector::from_fn(nc, |i, _| residual[cond[i]]);
    let singular = BeamError::SingularCondensationBlock { element: usize::MAX };
    let lu = k_cc.lu();
    if !lu.is_invertible() {
        return Err(singular);
    }
    let x = lu.solve(&k_cg).ok_or(singular.clone())?;
    let y = lu.solve(&r_c).ok_or(singular.clone())?;
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(singular);
    }
    Ok(Condensed {
        tangent: k_gg - &k_gc * &x,
        residual: r_g - &k_gc * &y,
        kept,
        condensed: cond,
        x,
        y,
    })
}

/// Local indices of the condensable block `[M | ψ_lo | ψ_ho]`.
pub fn condensable_indices(k: usize) -> Vec<usize> {
    let l = LocalLayout { k };
    (l.n_global()..l.len()).collect()
}
