//! AP and DD against converged thickness integration. The first-order
//! expansion about the mid-surface leaves an error that vanishes as `T²`.

use klshell::constitution::{resultants, Pipeline};
use klshell::material::{fiber_from_angle, MaterialSpec};
use klshell::verify::random_pair;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rel(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let d: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt();
    d / b.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Relative errors of `(τ, M0)` against NP(40) at thicknesses `t0 / 2^k`,
/// with the deformation held fixed.
fn errors(name: &str, p: Pipeline, seed: u64, levels: usize) -> Vec<(f64, f64)> {
    let fibers: Vec<_> = match name {
        "amr" => vec![fiber_from_angle(45.0), fiber_from_angle(-45.0)],
        "goh" => vec![fiber_from_angle(30.0), fiber_from_angle(-30.0)],
        _ => vec![],
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t0 = 0.2;
    let (s, r) = random_pair(&mut rng, t0, &fibers).unwrap();
    (0..levels)
        .map(|k| {
            let t = t0 / 2f64.powi(k as i32);
            let m = MaterialSpec::preset(name, t, fibers.clone(), 0.226, false).unwrap();
            let (a, _) = resultants(p, &m, &s, &r).unwrap();
            let (x, _) = resultants(Pipeline::Np { n_gp: 40 }, &m, &s, &r).unwrap();
            (rel(&a.tau.0, &x.tau.0), rel(&a.m0.0, &x.m0.0))
        })
        .collect()
}

fn order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

#[test]
fn ap_resultants_converge_quadratically_in_thickness() {
    for name in ["nh", "mr", "fung", "amr", "goh"] {
        for seed in 0..4 {
            let e = errors(name, Pipeline::Ap, seed, 4);
            let (c, f) = (e[2], e[3]);
            assert!(order(c.0, f.0) > 1.8, "{name} seed {seed}: tau {e:?}");
            assert!(order(c.1, f.1) > 1.8, "{name} seed {seed}: m0 {e:?}");
        }
    }
}

#[test]
fn dd_membrane_stress_converges_quadratically_in_thickness() {
    for name in ["nh", "mr", "fung", "amr", "goh"] {
        for seed in 0..4 {
            let e = errors(name, Pipeline::Dd, seed, 3);
            assert!(order(e[1].0, e[2].0) > 1.8, "{name} seed {seed}: tau {e:?}");
        }
    }
}
