use klshell::verify::{run_verify, VerifyOptions};

fn reduced(seed: u64) -> VerifyOptions {
    VerifyOptions {
        states: 5,
        scan_triples: 200,
        scan_samples: 20_000,
        columns: 3,
        ..VerifyOptions::new(seed)
    }
}

#[test]
fn corrupted_tangents_are_reported() {
    let report = run_verify(&VerifyOptions {
        corrupt_tangent: true,
        ..reduced(3)
    })
    .unwrap();
    assert!(!report.passed());
    let failed: Vec<_> = report
        .checks
        .iter()
        .filter(|c| !c.passed())
        .map(|c| c.name.as_str())
        .collect();
    assert!(
        failed.iter().any(|n| n.starts_with("tangent ")),
        "{failed:?}"
    );
    assert!(
        failed.iter().any(|n| n.starts_with("global tangent ")),
        "{failed:?}"
    );
    assert!(
        failed.iter().all(|n| !n.starts_with("switch")),
        "{failed:?}"
    );
    assert!(report.render().contains("FAIL tangent"));
}

#[test]
fn reduced_suite_passes_for_ten_seeds() {
    for seed in 0..10 {
        let report = run_verify(&reduced(seed)).unwrap();
        assert!(report.passed(), "{}", report.render());
    }
}
