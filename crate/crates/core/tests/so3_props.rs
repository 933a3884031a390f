use mixbeam::constitutive::{curvature_local, force_strain};
use mixbeam::so3::{exp_rotvec, log_rotation, relative_rotvec, tangent_map, Vector3};
use mixbeam::Vec3;
use proptest::prelude::*;

fn vec3(r: f64) -> impl Strategy<Value = Vec3> {
    [-r..r, -r..r, -r..r].prop_map(Vector3)
}

/// Rotation vectors with norm below `max`.
fn rotvec(max: f64) -> impl Strategy<Value = Vec3> {
    vec3(max).prop_filter("inside the ball", move |v| v.norm() < max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn exp_log_roundtrip(psi in rotvec(std::f64::consts::PI - 1e-6)) {
        let back = log_rotation(&exp_rotvec(&psi));
        prop_assert!((back - psi).max_abs() <= 1e-10, "{psi:?} -> {back:?}");
    }

    #[test]
    fn log_exp_roundtrip_on_rotations(psi in rotvec(3.0 * std::f64::consts::PI)) {
        let q = exp_rotvec(&psi);
        let q2 = exp_rotvec(&log_rotation(&q));
        prop_assert!((q.matrix() - q2.matrix()).max_abs() <= 1e-10);
        prop_assert!(log_rotation(&q).norm() <= std::f64::consts::PI + 1e-12);
    }

    #[test]
    fn tangent_map_is_the_spin_of_exp(psi in rotvec(3.0), d in vec3(1.0)) {
        let h = 1e-6;
        let q = exp_rotvec(&psi);
        let spin = |s: f64| log_rotation(&(exp_rotvec(&(psi + d * s)) * q.inverse()));
        let fd = (spin(h) - spin(-h)) * (0.5 / h);
        let exact = tangent_map(&psi).mul_vec(&d);
        prop_assert!((fd - exact).max_abs() <= 1e-5 * (1.0 + exact.max_abs()), "{fd:?} vs {exact:?}");
    }

    #[test]
    fn relative_rotvec_ignores_common_rotation(a in rotvec(3.0), b in rotvec(3.0), q in rotvec(3.0)) {
        let (a, b, q) = (exp_rotvec(&a), exp_rotvec(&b), exp_rotvec(&q));
        let plain = relative_rotvec(&a, &b);
        prop_assume!(plain.norm() < std::f64::consts::PI - 1e-6);
        let moved = relative_rotvec(&(q * a), &(q * b));
        prop_assert!((plain - moved).max_abs() <= 1e-12);
    }

    #[test]
    fn force_strain_is_objective(psi in rotvec(3.0), q in rotvec(3.0), rp in vec3(2.0)) {
        let lam = exp_rotvec(&psi);
        let q = exp_rotvec(&q);
        let g = force_strain(&lam, &rp);
        let g2 = force_strain(&(q * lam), &q.rotate(&rp));
        prop_assert!((g - g2).max_abs() <= 1e-12);
    }

    #[test]
    fn curvature_is_objective(a in rotvec(2.5), b in vec3(0.3), q in rotvec(3.0)) {
        // ψ(s) = a + s b at s = 0; the superimposed field is log(Q exp(ψ(s)))
        let q = exp_rotvec(&q);
        let kappa = curvature_local(&a, &b, &Vec3::zeros(), &Vec3::zeros());
        let moved = |s: f64| log_rotation(&(q * exp_rotvec(&(a + b * s))));
        let m0 = moved(0.0);
        prop_assume!(m0.norm() < std::f64::consts::PI - 0.05);
        let h = 1e-5;
        let dm = (moved(h) - moved(-h)) * (0.5 / h);
        let kappa2 = curvature_local(&m0, &dm, &Vec3::zeros(), &Vec3::zeros());
        prop_assert!((kappa - kappa2).max_abs() <= 1e-7, "{kappa:?} vs {kappa2:?}");
    }
}

#[test]
fn exp_of_quarter_turn() {
    let q = exp_rotvec(&(Vec3::unit(2) * std::f64::consts::FRAC_PI_2));
    assert!((q.rotate(&Vec3::unit(0)) - Vec3::unit(1)).max_abs() < 1e-15);
}
