use mixbeam::constitutive::{energy_gamma, CrossSection};
use mixbeam::element::*;
use mixbeam::quadrature::{legendre_basis, QuadratureRule};
use mixbeam::so3::{exp_rotvec, log_rotation, Vector3};
use mixbeam::{Rotation, Vec3};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn section() -> CrossSection {
    CrossSection::new(1e3, 4e2, 3e2, 20.0, 30.0, 50.0).unwrap()
}

fn arc_element(k: usize, angle: f64) -> ElementDef {
    let r = 2.0;
    let curve = |s: f64| {
        let t = s / r;
        (
            Vector3([r * t.sin(), r * (1.0 - t.cos()), 0.0]),
            exp_rotvec(&(Vec3::unit(2) * t)),
        )
    };
    ElementDef::from_curve(0, k, [0, 1], [0.3, 0.3 + r * angle], section(), curve).unwrap()
}

fn straight_element(k: usize, len: f64) -> ElementDef {
    let curve = |s: f64| (Vector3([s, 0.0, 0.0]), Rotation::identity());
    ElementDef::from_curve(0, k, [0, 1], [0.0, len], section(), curve).unwrap()
}

fn perturbed(def: &ElementDef, rng: &mut ChaCha8Rng, amp: f64) -> ElementDofs {
    let mut d = def.reference_dofs();
    let mut v = || Vector3(std::array::from_fn(|_| rng.random_range(-amp..amp)));
    for r in d.r.iter_mut() {
        *r += v();
    }
    for m in d.m.iter_mut() {
        *m = v() * 50.0;
    }
    d.psi_lo += v();
    for h in d.psi_ho.iter_mut() {
        *h += v() * 0.5;
    }
    d.psi_v = [v(), v()];
    d
}

fn energy_at(def: &ElementDef, x: &[f64], loads: &ElementLoads, integ: Integration) -> f64 {
    let d = ElementDofs::from_slice(def.order, x);
    element_energy(def, &d, loads, 0.7, integ).unwrap()
}

#[test]
fn undeformed_state_has_no_energy_or_residual() {
    for k in 1..=4 {
        for def in [arc_element(k, 0.6), straight_element(k, 1.5)] {
            let d = def.reference_dofs();
            for integ in [Integration::Full, Integration::ReducedGamma] {
                let e = element_energy(&def, &d, &ElementLoads::default(), 0.0, integ).unwrap();
                assert!(e.abs() < 1e-12);
                let r = element_residual(&def, &d, &ElementLoads::default(), 0.0, integ).unwrap();
                assert!(r.amax() < 1e-12 * 1e3, "k={k}: {}", r.amax());
            }
        }
    }
}

#[test]
fn stretched_straight_element_energy() {
    let (len, alpha) = (1.7, 1.2);
    let def = straight_element(1, len);
    let mut d = def.reference_dofs();
    for r in d.r.iter_mut() {
        *r = *r * alpha;
    }
    let e = element_energy(&def, &d, &ElementLoads::default(), 0.0, Integration::Full).unwrap();
    let exact = 0.5 * section().ea * (alpha - 1.0).powi(2) * len;
    assert!((e - exact).abs() < 1e-12 * exact);
}

#[test]
fn pure_moment_element_energy() {
    // constant M e3 with nodal rotations ±θ/2 about e3 relative to a frozen Λ_E
    let (len, m, theta) = (1.3, 4.0, 0.4);
    let def = straight_element(1, len);
    let mut d = def.reference_dofs();
    d.m[0] = Vec3::unit(2) * m;
    d.psi_v = [Vec3::unit(2) * (-0.5 * theta), Vec3::unit(2) * (0.5 * theta)];
    let e = element_energy(&def, &d, &ElementLoads::default(), 0.0, Integration::Full).unwrap();
    // −½M²L/EI₃ + (+1)(θ/2)M + (−1)(−θ/2)M
    let exact = -0.5 * m * m * len / section().ei3 + theta * m;
    assert!((e - exact).abs() < 1e-13);
}

#[test]
fn jump_terms_of_two_elements_sum_to_discrete_work() {
    let theta = 0.3;
    let m = 2.5;
    let v = Vec3::unit(2) * (0.5 * theta);
    let id = Rotation::identity();
    let right_end_of_1 = interface_jump(&id, &v, &id, &(Vec3::unit(2) * m), 1.0).unwrap();
    let left_end_of_2 =
        interface_jump(&exp_rotvec(&(Vec3::unit(2) * theta)), &v, &id, &(Vec3::unit(2) * m), -1.0)
            .unwrap();
    assert!((right_end_of_1 + left_end_of_2 - m * theta).abs() < 1e-14);
    // continuity and the undeformed state give no contribution
    let l = exp_rotvec(&Vec3::new(0.1, 0.2, -0.3));
    let j = interface_jump(&l, &Vec3::zeros(), &l, &Vec3::new(1.0, 2.0, 3.0), 1.0).unwrap();
    assert!(j.abs() < 1e-15);
    let lam_v = exp_rotvec(&Vec3::new(0.3, 0.0, 0.1)).compose(&l);
    let j = interface_jump(&lam_v, &Vec3::new(0.3, 0.0, 0.1), &l, &Vec3::new(1.0, 2.0, 3.0), -1.0).unwrap();
    assert!(j.abs() < 1e-15);
}

#[test]
fn local_rotation_cases() {
    let lo = Vec3::new(0.2, -0.4, 0.9);
    let q0 = exp_rotvec(&lo);
    for xi in [-1.0, 0.1, 1.0] {
        assert_eq!(local_rotation(&lo, &[], xi).unwrap(), q0);
        let r = local_rotation(&lo, &[Vec3::zeros(), Vec3::zeros()], xi).unwrap();
        assert!((r.matrix() - q0.matrix()).max_abs() < 1e-15);
    }
    // superimposed rotation on ψ_lo only
    let ho = [Vec3::new(0.3, 0.1, 0.0), Vec3::new(0.0, -0.2, 0.4)];
    let rr = exp_rotvec(&Vec3::new(-1.0, 0.5, 0.3));
    let lo2 = log_rotation(&rr.compose(&q0));
    let a = local_rotation(&lo, &ho, 0.3).unwrap();
    let b = local_rotation(&lo2, &ho, 0.3).unwrap();
    assert!((rr.compose(&a).matrix() - b.matrix()).max_abs() < 1e-12);
    assert!(local_rotation(&lo, &[Vec3::unit(0) * 3.2], 1.0).is_err());
}

#[test]
fn residual_matches_energy_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let h = 1e-7;
    let loads = ElementLoads { force: Vec3::new(3.0, -2.0, 1.0), couple: Vec3::zeros() };
    for k in 1..=4 {
        for integ in [Integration::Full, Integration::ReducedGamma] {
            for _ in 0..5 {
                let def = arc_element(k, 0.8);
                let d = perturbed(&def, &mut rng, 0.2);
                let x = d.to_vector();
                let sys = element_system(&def, &d, &loads, 0.7, integ).unwrap();
                let e = energy_at(&def, &x, &loads, integ);
                assert!((sys.energy - e).abs() <= 1e-10 * e.abs().max(1.0));
                let scale = sys.residual.amax().max(1.0);
                for i in 0..x.len() {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[i] += h;
                    xm[i] -= h;
                    let fd = (energy_at(&def, &xp, &loads, integ) - energy_at(&def, &xm, &loads, integ))
                        / (2.0 * h);
                    assert!(
                        (fd - sys.residual[i]).abs() <= 1e-6 * scale,
                        "k={k} dof {i}: fd {fd} ad {}",
                        sys.residual[i]
                    );
                }
            }
        }
    }
}

#[test]
fn tangent_matches_residual_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let h = 1e-6;
    let loads = ElementLoads { force: Vec3::new(1.0, 0.0, -2.0), couple: Vec3::new(0.5, 1.0, -0.3) };
    for k in 1..=4 {
        for _ in 0..5 {
            let def = arc_element(k, 0.8);
            let d = perturbed(&def, &mut rng, 0.2);
            let x = d.to_vector();
            let sys = element_system(&def, &d, &loads, 0.9, Integration::ReducedGamma).unwrap();
            let res = |x: &[f64]| {
                let d = ElementDofs::from_slice(k, x);
                element_residual(&def, &d, &loads, 0.9, Integration::ReducedGamma).unwrap()
            };
            let dir: Vec<f64> = (0..x.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let xp: Vec<f64> = x.iter().zip(&dir).map(|(a, b)| a + h * b).collect();
            let xm: Vec<f64> = x.iter().zip(&dir).map(|(a, b)| a - h * b).collect();
            let fd = (res(&xp) - res(&xm)) / (2.0 * h);
            let an = &sys.tangent * DVector::from_vec(dir);
            let err = (&fd - &an).amax();
            assert!(err <= 1e-5 * an.amax().max(1.0), "k={k}: {err}");
        }
    }
}

#[test]
fn tangent_is_symmetric_without_follower_terms() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for k in 1..=4 {
        let def = arc_element(k, 0.5);
        let zero = element_system(&def, &def.reference_dofs(), &ElementLoads::default(), 0.0, Integration::Full)
            .unwrap();
        assert!((&zero.tangent - zero.tangent.transpose()).amax() <= 1e-10);
        let d = perturbed(&def, &mut rng, 0.3);
        let s = element_system(&def, &d, &ElementLoads::default(), 0.0, Integration::Full).unwrap();
        assert!((&s.tangent - s.tangent.transpose()).amax() <= 1e-10 * s.tangent.amax());
    }
}

#[test]
fn moment_block_is_diagonal_gram_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for k in 1..=4 {
        let def = arc_element(k, 0.5);
        let d = perturbed(&def, &mut rng, 0.3);
        let s = element_system(&def, &d, &ElementLoads::default(), 0.0, Integration::ReducedGamma).unwrap();
        let l = def.layout();
        let ck = def.section.c_kappa();
        let jac = def.jacobian();
        for i in 0..=k {
            for j in 0..=k {
                for a in 0..3 {
                    for b in 0..3 {
                        // −∫P_iP_j/C ds = −δ_ij δ_ab · 2/(2i+1) · J / C_a
                        let exact = if i == j && a == b {
                            -2.0 / (2 * i + 1) as f64 * jac / ck[a]
                        } else {
                            0.0
                        };
                        let v = s.tangent[(l.m(i, a), l.m(j, b))];
                        assert!((v - exact).abs() < 1e-14, "k={k} ({i},{a}),({j},{b}): {v} vs {exact}");
                    }
                }
            }
        }
    }
}

#[test]
fn moment_rows_vanish_at_constitutive_moment() {
    // constant curvature state of a straight k=2 element: ψ_ho = c P1
    let def = straight_element(2, 1.0);
    let mut d = def.reference_dofs();
    let c = Vec3::new(0.0, 0.0, 0.1);
    d.psi_ho[0] = c;
    // κ = Tᵀ(h)h′ = h′ along a fixed axis
    let kappa = c * (1.0 / def.jacobian());
    d.m[0] = kappa.component_mul(&def.section.c_kappa());
    // jump terms also feed the M rows; match them by nodal rotations
    d.psi_v = [-c, c];
    let r = element_residual(&def, &d, &ElementLoads::default(), 0.0, Integration::Full).unwrap();
    let l = def.layout();
    for j in 0..=2 {
        for a in 0..3 {
            assert!(r[l.m(j, a)].abs() < 1e-13, "row ({j},{a}) = {}", r[l.m(j, a)]);
        }
    }
}

#[test]
fn reduced_rule_equals_projected_strain_energy() {
    // a degree-k strain γ(ξ): k-point Gauss of ½γ·Cγ·γ equals the exact
    // integral of the energy of its L² projection onto P^{k−1}
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let cs = section();
    for k in 1..=5 {
        let coeffs: Vec<Vec3> = (0..=k)
            .map(|_| Vector3(std::array::from_fn(|_| rng.random_range(-1.0..1.0))))
            .collect();
        let gamma = |xi: f64, upto: usize| {
            let (p, _) = legendre_basis(k, xi);
            (0..=upto).fold(Vec3::zeros(), |acc, j| acc + coeffs[j] * p[j])
        };
        let reduced: f64 =
            QuadratureRule::gauss(k).iter().map(|(x, w)| w * energy_gamma(&gamma(x, k), &cs)).sum();
        let projected: f64 = QuadratureRule::gauss(k + 2)
            .iter()
            .map(|(x, w)| w * energy_gamma(&gamma(x, k - 1), &cs))
            .sum();
        assert!((reduced - projected).abs() < 1e-12 * projected.abs().max(1.0), "k={k}");
    }
}

#[test]
fn superimposed_rotation_leaves_energies_unchanged() {
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    for k in 1..=4 {
        for _ in 0..20 {
            let def = arc_element(k, 0.7);
            let d = perturbed(&def, &mut rng, 0.2);
            let rr = exp_rotvec(&Vector3(std::array::from_fn(|_| rng.random_range(-2.0..2.0))));
            let mut e = d.clone();
            e.psi_lo = log_rotation(&rr.compose(&exp_rotvec(&d.psi_lo)));
            for r in e.r.iter_mut() {
                *r = rr.rotate(r);
            }
            // R·exp(ψV)·Λ₀ = exp(ψV')·Λ₀ with ψV' = log(R·exp(ψV))
            for end in 0..2 {
                e.psi_v[end] = log_rotation(&rr.compose(&exp_rotvec(&d.psi_v[end])));
            }
            let a = element_energy_parts(&def, &d, &ElementLoads::default(), 0.0, Integration::Full)
                .unwrap();
            let b = element_energy_parts(&def, &e, &ElementLoads::default(), 0.0, Integration::Full)
                .unwrap();
            let tol = 1e-12 * a.gamma.abs().max(a.kappa_m.abs()).max(1.0);
            assert!((a.gamma - b.gamma).abs() <= tol);
            assert!((a.kappa_m - b.kappa_m).abs() <= tol);
            assert!((a.complementary - b.complementary).abs() <= tol);
            assert!((a.jump - b.jump).abs() <= tol);
        }
    }
}

#[test]
fn condensation_matches_dense_elimination() {
    let mut rng = ChaCha8Rng::seed_from_u64(27);
    let n = 10;
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    let k = &a * a.transpose() + DMatrix::identity(n, n) * n as f64;
    let r = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
    let cset = [1, 4, 5, 8];
    let c = condense(&k, &r, &cset).unwrap();
    // full solve
    let full = k.clone().lu().solve(&(-&r)).unwrap();
    let dg = c.tangent.clone().lu().solve(&(-&c.residual)).unwrap();
    let dc = c.back_substitute(&dg);
    for (i, &g) in c.kept.iter().enumerate() {
        assert!((dg[i] - full[g]).abs() < 1e-12);
    }
    for (i, &cc) in c.condensed.iter().enumerate() {
        assert!((dc[i] - full[cc]).abs() < 1e-12);
    }
    // explicit Schur complement oracle
    let kept = &c.kept;
    let cond = &c.condensed;
    let sub = |rows: &[usize], cols: &[usize]| DMatrix::from_fn(rows.len(), cols.len(), |i, j| k[(rows[i], cols[j])]);
    let schur = sub(kept, kept) - sub(kept, cond) * sub(cond, cond).try_inverse().unwrap() * sub(cond, kept);
    assert!((schur - &c.tangent).amax() < 1e-12);
    // empty set is the identity operation
    let e = condense(&k, &r, &[]).unwrap();
    assert_eq!(e.tangent, k);
    assert_eq!(e.residual, r);
    // singular block
    let mut ks = k.clone();
    for j in 0..n {
        ks[(1, j)] = 0.0;
        ks[(j, 1)] = 0.0;
    }
    assert!(matches!(
        condense(&ks, &r, &cset),
        Err(mixbeam::BeamError::SingularCondensationBlock { .. })
    ));
}

#[test]
fn condensable_block_of_element_is_regular() {
    for k in 1..=4 {
        let def = arc_element(k, 0.5);
        let s = element_system(&def, &def.reference_dofs(), &ElementLoads::default(), 0.0, Integration::ReducedGamma)
            .unwrap();
        assert!(condense(&s.tangent, &s.residual, &condensable_indices(k)).is_ok(), "k={k}");
    }
}
