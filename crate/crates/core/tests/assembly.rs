use klshell::verify::{global_tangent_error, material_catalog, pipelines, random_systems};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn global_tangent_matches_residual_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut failures = vec![];
    for (name, m) in material_catalog(0.15).unwrap() {
        for p in pipelines() {
            for (label, sys, u) in random_systems(&mut rng, &m, p).unwrap() {
                let n = sys.n_dofs();
                let cols: Vec<usize> = (0..6).map(|_| rng.random_range(0..n)).collect();
                let e = global_tangent_error(&sys, &u, 1.0, &cols, 1e-6, false).unwrap();
                println!("{label:<34} {name:<22} {:<4} {e:.3e}", p.label());
                if e > 1e-5 {
                    failures.push(format!("{label} {name} {}: {e:.3e}", p.label()));
                }
            }
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
}
