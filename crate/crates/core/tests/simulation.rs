use levy_lie::chen_strichartz::Coordinates;
use levy_lie::levy_sim::{
    exact_linear_solution, iterated_ito, mc_compare, power_bracket, simulate_path, taylor_flow, Event, LevyPath,
    QuadraticVariation, SdeSpec, LINEAR_JUMP_DIFFUSION_TOML,
};
use levy_lie::verify::{self, Corruption, Status, VerifyConfig};
use levy_lie::word_algebra::AlphabetSpec;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn pure_jump_product_laws_hold_for_any_seed(seed in any::<u64>()) {
        let spec = verify::pure_jump_spec();
        for coords in [Coordinates::I, Coordinates::J] {
            let e = verify::product_law_error(&spec, 20, seed, 3, coords, QuadraticVariation::Realised).unwrap();
            prop_assert!(e.max_relative < 1e-9, "{:?}: {}", coords, e.max_relative);
        }
    }

    #[test]
    fn paths_are_reproducible(seed in any::<u64>(), sample in 0u64..1000) {
        let spec = verify::jump_diffusion_spec(0.01);
        let a = simulate_path(&spec, seed, sample, spec.grid_step).unwrap();
        let b = simulate_path(&spec, seed, sample, spec.grid_step).unwrap();
        prop_assert_eq!(a.events.len(), b.events.len());
        prop_assert!(a.events.iter().zip(&b.events).all(|(x, y)| x.time == y.time && x.size == y.size));
    }
}

#[test]
fn deterministic_path_integrals() {
    // one jump of size 2 at time 0.25 on [0, 1], no compensator
    let path = LevyPath::from_events(1.0, 0, 1, vec![Event { time: 0.25, driver: 1, size: 2.0 }], vec![0.0, 0.0]);
    let spec = AlphabetSpec::new(0, 1, 4).unwrap();
    let w = |s: &str| spec.parse_word(s).unwrap();
    let qv = QuadraticVariation::Realised;
    assert!((iterated_ito(&w("1"), &path, 1.0, qv) - 2.0).abs() < 1e-15);
    assert!((iterated_ito(&w("1^(3)"), &path, 1.0, qv) - 8.0).abs() < 1e-15);
    // a single jump cannot be integrated against itself strictly before
    assert_eq!(iterated_ito(&w("1 1"), &path, 1.0, qv), 0.0);
    // ∫ s ds up to the jump, then times the jump size
    assert!((iterated_ito(&w("0 1"), &path, 1.0, qv) - 0.5).abs() < 1e-15);
    assert!((iterated_ito(&w("1 0"), &path, 1.0, qv) - 1.5).abs() < 1e-15);
    assert!((power_bracket(&path, 1, 2, 1.0).unwrap() - 4.0).abs() < 1e-15);
}

#[test]
fn linear_taylor_flow_converges_to_exact_solution() {
    let spec = SdeSpec::from_toml_str(LINEAR_JUMP_DIFFUSION_TOML).unwrap();
    let f = spec.observable().unwrap();
    let path = simulate_path(&spec, 5, 0, spec.grid_step).unwrap();
    let exact = exact_linear_solution(&spec, &path, 0.1).unwrap();
    let errors: Vec<f64> = (1..=6).map(|g| (taylor_flow(&spec, &f, &path, 0.1, g).unwrap() - exact).abs()).collect();
    assert!(errors[5] < 1e-3 * errors[0].max(1e-12) || errors[5] < 1e-9, "{errors:?}");
}

#[test]
fn monte_carlo_is_reproducible() {
    let spec = SdeSpec::from_toml_str(LINEAR_JUMP_DIFFUSION_TOML).unwrap();
    let f = spec.observable().unwrap();
    let a = mc_compare(&spec, &f, &[1, 2], 200, &[0.1, 0.05], 3).unwrap();
    let b = mc_compare(&spec, &f, &[1, 2], 200, &[0.05, 0.1], 3).unwrap();
    assert_eq!(a, b);
    assert_eq!(a[0].time, 0.05);
    assert!(mc_compare(&spec, &f, &[1], 0, &[0.1], 3).is_err());
}

#[test]
fn malformed_specs_are_rejected() {
    assert!(SdeSpec::from_toml_str("dimension = ").is_err());
    let bad_step = LINEAR_JUMP_DIFFUSION_TOML.replace("grid_step = 0.001", "grid_step = 0.03");
    assert!(SdeSpec::from_toml_str(&bad_step).is_err());
    let unknown = format!("{LINEAR_JUMP_DIFFUSION_TOML}\nbogus = 1\n");
    assert!(SdeSpec::from_toml_str(&unknown).is_err());
}

#[test]
fn verify_suites_have_no_failures() {
    let report = verify::run_all(&VerifyConfig::default());
    let failures: Vec<_> = report.failures().map(|c| format!("{}.{}: {}", c.suite, c.name, c.detail)).collect();
    assert!(failures.is_empty(), "{failures:?}");
    let warned: Vec<_> = report.checks.iter().filter(|c| c.status == Status::Warn).map(|c| c.name.as_str()).collect();
    assert_eq!(
        warned,
        ["omega_table_signs", "degree4_reference_signs", "eulerian_binomial_placement", "ito_single_prefactor"]
    );
}

#[test]
fn corruption_is_detected() {
    let expect = [
        (Corruption::LogFlowmap, "exp_of_log"),
        (Corruption::MagnusTree, "three_route_magnus"),
        (Corruption::HoffmanLog, "letter_primitive"),
    ];
    for (c, check) in expect {
        let cfg = VerifyConfig { corrupt: Some(c), ..VerifyConfig::default() };
        let report = verify::run_all(&cfg);
        assert!(!report.passed());
        assert!(report.failures().any(|f| f.name == check), "{c:?}");
    }
}
