mod common;

use common::rel_diff;
use klshell::constitution::{resultants, Pipeline};
use klshell::kinematics::{surface_from_forms, ReferencePointState, SurfacePointState};
use klshell::material::{fiber_from_angle, MaterialSpec};
use klshell::tensor::Sym2;
use klshell::verify::{material_catalog, pipelines, random_pair};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn flat_pair(
    a: Sym2,
    b: Sym2,
    fibers: &[nalgebra::Vector3<f64>],
) -> (SurfacePointState, ReferencePointState) {
    let s_ref = surface_from_forms(&Sym2::identity(), &Sym2::zero(), None).unwrap();
    let r = ReferencePointState::new(&s_ref, fibers, 1.0).unwrap();
    (surface_from_forms(&a, &b, Some(r.area_density)).unwrap(), r)
}

/// Homogeneous in-plane stretch of a flat sheet: every pipeline gives the
/// same membrane stress and no moment.
#[test]
fn pipelines_agree_in_the_membrane_regime() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for (name, m) in material_catalog(0.1).unwrap() {
        for _ in 0..10 {
            let a = Sym2::new(
                rng.random_range(0.7..1.5),
                rng.random_range(0.7..1.5),
                rng.random_range(-0.2..0.2),
            );
            let (s, r) = flat_pair(a, Sym2::zero(), &m.fibers);
            let reference = resultants(Pipeline::Np { n_gp: 2 }, &m, &s, &r).unwrap().0;
            for p in pipelines() {
                let (x, _) = resultants(p, &m, &s, &r).unwrap();
                assert!(
                    rel_diff(&x.tau, &reference.tau) < 1e-10,
                    "{name} {}",
                    p.label()
                );
                assert!(
                    x.m0.norm() < 1e-12 * x.tau.norm().max(1.0),
                    "{name} {}",
                    p.label()
                );
            }
        }
    }
}

#[test]
fn ap_scales_with_thickness() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for (name, m) in material_catalog(0.1).unwrap() {
        if m.switch_enabled() {
            continue;
        }
        let m2 = MaterialSpec {
            thickness: 0.2,
            ..m.clone()
        };
        for _ in 0..10 {
            let (s, r) = random_pair(&mut rng, 0.1, &m.fibers).unwrap();
            let (x, _) = resultants(Pipeline::Ap, &m, &s, &r).unwrap();
            let (y, _) = resultants(Pipeline::Ap, &m2, &s, &r).unwrap();
            assert!(rel_diff(&y.tau, &(x.tau * 2.0)) < 1e-12, "{name}");
            assert!(rel_diff(&y.m0, &(x.m0 * 8.0)) < 1e-12, "{name}");
        }
    }
}

#[test]
fn np_coupling_tangents_coincide() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for (_, m) in material_catalog(0.1).unwrap() {
        let (s, r) = random_pair(&mut rng, 0.1, &m.fibers).unwrap();
        for n in [2, 5] {
            let (_, t) = resultants(Pipeline::Np { n_gp: n }, &m, &s, &r).unwrap();
            assert!((t.d - t.e).norm() <= 1e-12 * t.d.norm());
        }
    }
}

/// For smooth materials NP converges monotonically to the dense thickness
/// integral. Its distance to AP tends to AP's truncation error, which need
/// not be approached monotonically.
#[test]
fn np_converges_with_more_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let gap = |x: &klshell::constitution::StressResultants,
               y: &klshell::constitution::StressResultants| {
        (x.tau - y.tau).norm() / y.tau.norm() + (x.m0 - y.m0).norm() / y.m0.norm()
    };
    for (name, m) in material_catalog(0.1).unwrap() {
        if m.switch_enabled() {
            continue;
        }
        for _ in 0..10 {
            let (s, r) = random_pair(&mut rng, 0.1, &m.fibers).unwrap();
            let dense = resultants(Pipeline::Np { n_gp: 64 }, &m, &s, &r).unwrap().0;
            let np: Vec<_> = [2, 3, 5, 8]
                .iter()
                .map(|&n| resultants(Pipeline::Np { n_gp: n }, &m, &s, &r).unwrap().0)
                .collect();
            let errs: Vec<f64> = np.iter().map(|x| gap(x, &dense)).collect();
            assert!(
                errs.windows(2).all(|w| w[1] <= w[0].max(1e-13)),
                "{name}: {errs:?}"
            );
        }
    }
}

#[test]
fn partial_section_limits() {
    let fibers = vec![fiber_from_angle(30.0), fiber_from_angle(-30.0)];
    let t = 0.1;
    for kappa in [0.0, 0.226] {
        let sw = MaterialSpec::preset("goh", t, fibers.clone(), kappa, true).unwrap();
        let full = MaterialSpec::preset("goh", t, fibers.clone(), kappa, false).unwrap();
        // Compressed everywhere: only the matrix carries load.
        let (s, r) = flat_pair(
            Sym2::new(0.8, 0.85, 0.02),
            Sym2::new(0.1, -0.05, 0.02),
            &fibers,
        );
        let (x, _) = resultants(Pipeline::Ap, &sw, &s, &r).unwrap();
        let (y, _) = resultants(Pipeline::Ap, &sw.matrix_only(), &s, &r).unwrap();
        assert!(rel_diff(&x.tau, &y.tau) < 1e-14 && rel_diff(&x.m0, &y.m0) < 1e-14);
        // Stretched through the whole thickness: the switch changes nothing.
        let (s, r) = flat_pair(
            Sym2::new(1.3, 1.25, 0.02),
            Sym2::new(0.1, -0.05, 0.02),
            &fibers,
        );
        let (x, tx) = resultants(Pipeline::Ap, &sw, &s, &r).unwrap();
        let (y, ty) = resultants(Pipeline::Ap, &full, &s, &r).unwrap();
        assert!(rel_diff(&x.tau, &y.tau) < 1e-12 && rel_diff(&x.m0, &y.m0) < 1e-12);
        assert!((tx.f - ty.f).norm() < 1e-12 * ty.f.norm());
    }
}

#[test]
fn dd_bending_matches_ap_for_small_curvature() {
    let m = MaterialSpec::preset("nh", 0.1, vec![], 0.0, false).unwrap();
    let (s, r) = flat_pair(Sym2::identity(), Sym2::zero(), &[]);
    let (x, _) = resultants(Pipeline::Dd, &m, &s, &r).unwrap();
    assert_eq!((x.tau.norm(), x.m0.norm()), (0.0, 0.0));
    // K·T = 0.01 with no membrane strain.
    let (s, r) = flat_pair(Sym2::identity(), Sym2::new(0.1, 0.0, 0.0), &[]);
    let (dd, _) = resultants(Pipeline::Dd, &m, &s, &r).unwrap();
    let (ap, _) = resultants(Pipeline::Ap, &m, &s, &r).unwrap();
    assert!(
        rel_diff(&dd.m0, &ap.m0) < 0.01,
        "{:?} vs {:?}",
        dd.m0,
        ap.m0
    );
}

/// Pure bending of the GOH strip with the switch at the cantilever's end
/// curvature for 90°: AP against a 64-point thickness integral. The gap is
/// the first-order truncation and shrinks as `T²`.
#[test]
fn partial_ap_moment_converges_to_dense_quadrature() {
    let fibers = vec![fiber_from_angle(30.0), fiber_from_angle(-30.0)];
    let kappa = std::f64::consts::FRAC_PI_2 / 9.0;
    let err = |t: f64| {
        let m = MaterialSpec::preset("goh", t, fibers.clone(), 0.0, true).unwrap();
        let (s, r) = flat_pair(Sym2::identity(), Sym2::new(0.0, kappa, 0.0), &fibers);
        let (ap, _) = resultants(Pipeline::Ap, &m, &s, &r).unwrap();
        let (np, _) = resultants(Pipeline::Np { n_gp: 64 }, &m, &s, &r).unwrap();
        rel_diff(&ap.m0, &np.m0)
    };
    let e: Vec<f64> = [0.15, 0.075, 0.0375, 0.01875]
        .iter()
        .map(|&t| err(t))
        .collect();
    for w in e.windows(2) {
        assert!(w[0] / w[1] > 3.5, "{e:?}");
    }
}
