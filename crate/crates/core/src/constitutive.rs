//! Strain measures and the linear, diagonal constitutive law.

use serde::{Deserialize, Serialize};

use crate::real::Real;
use crate::so3::{tangent_map, UnitQuaternion, Vector3};

/// Diagonal cross-section stiffnesses in the material frame.
///
/// `ea`, `ga2`, `ga3` act on the force strain, `git`, `ei2`, `ei3` on the
/// moment strain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossSection {
    pub ea: f64,
    pub ga2: f64,
    pub ga3: f64,
    pub git: f64,
    pub ei2: f64,
    pub ei3: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("cross-section stiffness `{name}` must be finite and positive, got {value}")]
pub struct InvalidCrossSection {
    pub name: &'static str,
    pub value: f64,
}

impl CrossSection {
    pub fn new(
        ea: f64,
        ga2: f64,
        ga3: f64,
        git: f64,
        ei2: f64,
        ei3: f64,
    ) -> Result<Self, InvalidCrossSection> {
        let cs = Self { ea, ga2, ga3, git, ei2, ei3 };
        cs.validate()?;
        Ok(cs)
    }

    /// Stiffnesses of a solid circular section of radius `r`.
    pub fn circular(e: f64, g: f64, r: f64) -> Result<Self, InvalidCrossSection> {
        let a = std::f64::consts::PI * r * r;
        let i = 0.25 * std::f64::consts::PI * r.powi(4);
        Self::new(e * a, g * a, g * a, 2.0 * g * i, e * i, e * i)
    }

    pub fn validate(&self) -> Result<(), InvalidCrossSection> {
        let entries = [
            ("EA", self.ea),
            ("GA2", self.ga2),
            ("GA3", self.ga3),
            ("GIt", self.git),
            ("EI2", self.ei2),
            ("EI3", self.ei3),
        ];
        for (name, value) in entries {
            if !(value.is_finite() && value > 0.0) {
                return Err(InvalidCrossSection { name, value });
            }
        }
        Ok(())
    }

    #[inline]
    pub fn c_gamma(&self) -> Vector3<f64> {
        Vector3([self.ea, self.ga2, self.ga3])
    }

    #[inline]
    pub fn c_kappa(&self) -> Vector3<f64> {
        Vector3([self.git, self.ei2, self.ei3])
    }
}

/// Material strains.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrainState {
    pub gamma: Vector3<f64>,
    pub kappa: Vector3<f64>,
}

/// Material stress resultants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StressResultants {
    pub n_material: Vector3<f64>,
    pub m_material: Vector3<f64>,
}

/// `Λᵀ·r′ − e₁`.
#[inline]
pub fn force_strain<T: Real>(lambda: &UnitQuaternion<T>, r_prime: &Vector3<T>) -> Vector3<T> {
    let mut g = lambda.rotate_inverse(r_prime);
    g[0] = g[0] - T::one();
    g
}

/// `Tᵀ(ψ)·ψ′ − Tᵀ(ψ₀)·ψ₀′`.
pub fn curvature_local<T: Real>(
    psi: &Vector3<T>,
    psi_prime: &Vector3<T>,
    psi0: &Vector3<T>,
    psi0_prime: &Vector3<T>,
) -> Vector3<T> {
    tangent_map(psi).tr_mul_vec(psi_prime) - tangent_map(psi0).tr_mul_vec(psi0_prime)
}

/// `½ γ·C_γ·γ`.
#[inline]
pub fn energy_gamma<T: Real>(gamma: &Vector3<T>, cs: &CrossSection) -> T {
    let c = cs.c_gamma();
    T::from_f64(0.5)
        * (T::from_f64(c[0]) * gamma[0] * gamma[0]
            + T::from_f64(c[1]) * gamma[1] * gamma[1]
            + T::from_f64(c[2]) * gamma[2] * gamma[2])
}

/// `C_γ·γ`.
#[inline]
pub fn stress_n<T: Real>(gamma: &Vector3<T>, cs: &CrossSection) -> Vector3<T> {
    gamma.component_mul(&cs.c_gamma().lift())
}

/// `½ κ·C_κ·κ`.
#[inline]
pub fn energy_kappa(kappa: &Vector3<f64>, cs: &CrossSection) -> f64 {
    0.5 * kappa.dot(&kappa.component_mul(&cs.c_kappa()))
}

/// `−½ M·C_κ⁻¹·M`, the complementary moment energy with flipped sign.
#[inline]
pub fn complementary_kappa<T: Real>(m: &Vector3<T>, cs: &CrossSection) -> T {
    let c = cs.c_kappa();
    -T::from_f64(0.5)
        * (m[0] * m[0] / T::from_f64(c[0])
            + m[1] * m[1] / T::from_f64(c[1])
            + m[2] * m[2] / T::from_f64(c[2]))
}

/// `κ·M − ½ M·C_κ⁻¹·M`.
#[inline]
pub fn dual_energy_kappa<T: Real>(m: &Vector3<T>, kappa: &Vector3<T>, cs: &CrossSection) -> T {
    kappa.dot(m) + complementary_kappa(m, cs)
}

/// Spatial resultants `n = Λ·N`, `m = Λ·M`.
pub fn spatial_resultants<T: Real>(
    lambda: &UnitQuaternion<T>,
    n: &Vector3<T>,
    m: &Vector3<T>,
) -> (Vector3<T>, Vector3<T>) {
    (lambda.rotate(n), lambda.rotate(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::so3::exp_rotvec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type V = Vector3<f64>;

    fn cs() -> CrossSection {
        CrossSection::new(100.0, 40.0, 30.0, 2.0, 3.0, 5.0).unwrap()
    }

    fn rv(rng: &mut ChaCha8Rng, s: f64) -> V {
        Vector3(std::array::from_fn(|_| rng.random_range(-s..s)))
    }

    #[test]
    fn validation() {
        assert!(CrossSection::new(1.0, 1.0, 1.0, 1.0, 1.0, 0.0).is_err());
        assert!(CrossSection::new(1.0, f64::NAN, 1.0, 1.0, 1.0, 1.0).is_err());
        let c = CrossSection::circular(1.0, 0.5, 1.0).unwrap();
        assert!((c.git - c.ei2).abs() < 1e-15);
    }

    #[test]
    fn force_strain_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let l0 = exp_rotvec(&rv(&mut rng, 1.0));
        let g = force_strain(&l0, &l0.rotate(&V::unit(0)));
        assert!(g.norm() < 1e-15);
        let g = force_strain(&UnitQuaternion::identity(), &(V::unit(0) * 1.3));
        assert!((g - V::unit(0) * 0.3).norm() < 1e-15);
    }

    #[test]
    fn strains_are_objective() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..1000 {
            let l = exp_rotvec(&rv(&mut rng, 1.5));
            let r = exp_rotvec(&rv(&mut rng, 1.5));
            let rp = rv(&mut rng, 2.0);
            let a = force_strain(&l, &rp);
            let b = force_strain(&r.compose(&l), &r.rotate(&rp));
            assert!((a - b).norm() <= 1e-12);
        }
    }

    #[test]
    fn curvature_cases() {
        let z = V::zeros();
        let p = V::new(0.2, -0.3, 0.9);
        let pp = V::new(1.0, 0.5, -0.2);
        assert!(curvature_local(&p, &pp, &p, &pp).norm() < 1e-15);
        // constant axis: ψ = c s e3
        for s in [0.0, 0.3, 2.0] {
            let k = curvature_local(&(V::unit(2) * (0.7 * s)), &(V::unit(2) * 0.7), &z, &z);
            assert!((k - V::unit(2) * 0.7).norm() < 1e-15);
        }
    }

    #[test]
    fn curvature_matches_frame_derivative() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let h = 1e-6;
        for _ in 0..200 {
            let (a, b, c) = (rv(&mut rng, 1.0), rv(&mut rng, 1.0), rv(&mut rng, 1.0));
            let psi = |s: f64| a + b * s + c * (s * s);
            let s = rng.random_range(-0.5..0.5);
            let lam = exp_rotvec(&psi(s)).matrix();
            let dl = (exp_rotvec(&psi(s + h)).matrix() - exp_rotvec(&psi(s - h)).matrix())
                .scale(0.5 / h);
            let fd = (lam.transpose() * dl).vee();
            let z = V::zeros();
            let k = curvature_local(&psi(s), &(b + c * (2.0 * s)), &z, &z);
            assert!((fd - k).norm() <= 1e-5 * k.norm().max(1.0));
        }
    }

    #[test]
    fn energy_gamma_cases() {
        let z = V::zeros();
        assert_eq!(energy_gamma(&z, &cs()), 0.0);
        assert_eq!(stress_n(&z, &cs()), z);
        assert_eq!(energy_gamma(&V::unit(0), &cs()), 50.0);
        assert_eq!(stress_n(&V::unit(0), &cs()), V::unit(0) * 100.0);
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let h = 1e-6;
        for _ in 0..200 {
            let g = rv(&mut rng, 1.0);
            let d = rv(&mut rng, 1.0);
            let fd = (energy_gamma(&(g + d * h), &cs()) - energy_gamma(&(g - d * h), &cs())) / (2.0 * h);
            let an = stress_n(&g, &cs()).dot(&d);
            assert!((fd - an).abs() <= 1e-8 * an.abs().max(1.0));
        }
    }

    #[test]
    fn dual_energy_cases() {
        let c = cs();
        let kappa = V::new(0.3, -0.1, 0.25);
        assert_eq!(dual_energy_kappa(&V::zeros(), &kappa, &c), 0.0);
        let m_star = kappa.component_mul(&c.c_kappa());
        let v = dual_energy_kappa(&m_star, &kappa, &c);
        assert!((v - energy_kappa(&kappa, &c)).abs() < 1e-15);
        let h = 1e-6;
        let mut grad = V::zeros();
        for i in 0..3 {
            let e = V::unit(i) * h;
            grad[i] = (dual_energy_kappa(&(m_star + e), &kappa, &c)
                - dual_energy_kappa(&(m_star - e), &kappa, &c))
                / (2.0 * h);
        }
        assert!(grad.norm() <= 1e-10);
    }

    #[test]
    fn legendre_duality_grid() {
        let c = cs();
        let kappa = V::new(0.3, -0.1, 0.25);
        let m_star = kappa.component_mul(&c.c_kappa());
        let max = energy_kappa(&kappa, &c);
        let n = 11;
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let off = |t: usize| -1.0 + 2.0 * t as f64 / (n - 1) as f64;
                    let m = m_star + V::new(off(i), off(j), off(l));
                    assert!(dual_energy_kappa(&m, &kappa, &c) <= max + 1e-10);
                }
            }
        }
    }

    #[test]
    fn spatial_resultant_cases() {
        let n = V::new(1.0, 2.0, 3.0);
        let m = V::new(-1.0, 0.5, 0.0);
        assert_eq!(spatial_resultants(&UnitQuaternion::identity(), &n, &m), (n, m));
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..100 {
            let l = exp_rotvec(&rv(&mut rng, 2.0));
            let (ns, ms) = spatial_resultants(&l, &n, &m);
            assert!((ns.norm() - n.norm()).abs() < 1e-12);
            assert!((ms.norm() - m.norm()).abs() < 1e-12);
            assert!((l.rotate_inverse(&ns) - n).norm() < 1e-12);
        }
    }
}
