use klshell::iga::{make_cylinder_sector, make_strip, NurbsPatch};
use klshell::kinematics::surface_point;
use proptest::prelude::*;

fn cylinder() -> NurbsPatch {
    make_cylinder_sector(0.1, 2.0, 3.0, 1.2, 3, 4)
        .unwrap()
        .patch
}

fn at(patch: &NurbsPatch, s: f64, t: f64) -> (f64, f64) {
    let (du, dv) = patch.domain();
    (du[0] + s * (du[1] - du[0]), dv[0] + t * (dv[1] - dv[0]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partition_of_unity(s in 0.0..=1.0f64, t in 0.0..=1.0f64) {
        let patch = cylinder();
        let (u, v) = at(&patch, s, t);
        let b = patch.basis_eval(u, v).unwrap();
        prop_assert!((b.r.iter().sum::<f64>() - 1.0).abs() < 1e-13);
        for d in [&b.du, &b.dv, &b.duu, &b.duv, &b.dvv] {
            prop_assert!(d.iter().sum::<f64>().abs() < 1e-10);
        }
        prop_assert!(b.r.iter().all(|&r| r >= -1e-15));
    }

    #[test]
    fn rational_basis_derivatives_match_differences(s in 0.05..0.95f64, t in 0.05..0.95f64) {
        let patch = cylinder();
        let (u, v) = at(&patch, s, t);
        let h = 1e-6;
        let b = patch.basis_eval(u, v).unwrap();
        let bu = [patch.basis_eval(u + h, v).unwrap(), patch.basis_eval(u - h, v).unwrap()];
        let bv = [patch.basis_eval(u, v + h).unwrap(), patch.basis_eval(u, v - h).unwrap()];
        for k in 0..b.r.len() {
            // The stencil may straddle a knot; basis on both sides shares `idx` only within a span.
            if bu.iter().chain(&bv).any(|x| x.idx != b.idx) {
                return Ok(());
            }
            let fd = |p: &[klshell::iga::BasisEval; 2], f: fn(&klshell::iga::BasisEval, usize) -> f64| {
                (f(&p[0], k) - f(&p[1], k)) / (2.0 * h)
            };
            prop_assert!((fd(&bu, |e, k| e.r[k]) - b.du[k]).abs() < 1e-7);
            prop_assert!((fd(&bv, |e, k| e.r[k]) - b.dv[k]).abs() < 1e-7);
            prop_assert!((fd(&bu, |e, k| e.du[k]) - b.duu[k]).abs() < 1e-5);
            prop_assert!((fd(&bv, |e, k| e.du[k]) - b.duv[k]).abs() < 1e-5);
            prop_assert!((fd(&bv, |e, k| e.dv[k]) - b.dvv[k]).abs() < 1e-5);
        }
    }

    #[test]
    fn knot_insertion_keeps_the_surface(knot in 0.01..0.99f64, dir in 0usize..2, s in 0.0..=1.0f64, t in 0.0..=1.0f64) {
        let patch = cylinder();
        let mut refined = patch.clone();
        let (du, dv) = patch.domain();
        let k = if dir == 0 { du[0] + knot * (du[1] - du[0]) } else { dv[0] + knot * (dv[1] - dv[0]) };
        refined.insert_knot(dir, k);
        let (u, v) = at(&patch, s, t);
        let a = patch.eval(u, v).unwrap();
        let b = refined.eval(u, v).unwrap();
        prop_assert!((a.x - b.x).norm() < 1e-12);
        prop_assert!((a.x1 - b.x1).norm() < 1e-10);
        prop_assert!((a.x2 - b.x2).norm() < 1e-10);
    }

    #[test]
    fn cylinder_points_lie_on_the_circle(s in 0.0..=1.0f64, t in 0.0..=1.0f64) {
        let patch = cylinder();
        let (u, v) = at(&patch, s, t);
        let x = patch.eval(u, v).unwrap().x;
        prop_assert!((x.xy().norm() - 2.0).abs() < 1e-12);
    }
}

/// Tangents and normal agree across every interior element boundary, seen from both spans.
#[test]
fn normal_is_continuous_across_elements() {
    let mut mesh = make_strip(0.1, 3.0, 9.0, 3, 4).unwrap();
    // A curved control net so the check is not trivially flat.
    for p in mesh.patch.ctrl.iter_mut() {
        p.z = 0.3 * (p.x * 0.7).sin() + 0.2 * (p.y * 0.4).cos();
    }
    let patch = &mesh.patch;
    let spans_u = patch.spans(0);
    let spans_v = patch.spans(1);
    for w in spans_u.windows(2) {
        let u = w[0].2;
        for &(sv, v0, v1) in &spans_v {
            let v = 0.5 * (v0 + v1);
            let pts = &patch.ctrl;
            let left =
                surface_point(&patch.basis_on_span(w[0].0, sv, u, v).map(pts), None).unwrap();
            let right =
                surface_point(&patch.basis_on_span(w[1].0, sv, u, v).map(pts), None).unwrap();
            assert!((left.normal - right.normal).norm() < 1e-12);
        }
    }
    for w in spans_v.windows(2) {
        let v = w[0].2;
        for &(su, u0, u1) in &spans_u {
            let u = 0.5 * (u0 + u1);
            let pts = &patch.ctrl;
            let a = patch.basis_on_span(su, w[0].0, u, v).map(pts);
            let b = patch.basis_on_span(su, w[1].0, u, v).map(pts);
            assert!((a.x1 - b.x1).norm() < 1e-12 && (a.x2 - b.x2).norm() < 1e-12);
        }
    }
}
