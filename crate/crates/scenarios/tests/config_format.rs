use dipole_squeeze::{MotionParams, SystemParams};
use dipole_squeeze_scenarios::config::{parse, ConfigError, GridSpec, ScenarioConfig, PRESETS};
use dipole_squeeze_scenarios::{preset, Output};
use proptest::prelude::*;

fn fig3_text() -> String {
    preset("fig3").unwrap().to_text()
}

fn replace_line(text: &str, key: &str, new: &str) -> String {
    text.lines()
        .map(|l| if l.starts_with(&format!("{key} =")) { new.to_string() } else { l.to_string() })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn canonical_fig3_text() {
    let expected = "\
name = fig3
delta = -125000 kappa0
delta_c = -24 kappa0
g = 1250 kappa0
omega = 12500 kappa0
gamma = 0 kappa0
kappa = 1 kappa0
kx1 = 0 rad
kx2 = 3.141592653589793 rad
n_max = 15
grid = -5 5 201 kappa0
outputs = spectrum, steady, coefficients, validity
";
    assert_eq!(fig3_text(), expected);
}

#[test]
fn comments_blank_lines_and_key_order_are_free() {
    let text = "\
# emission curve
outputs = validity, spectrum   # order is normalised

grid = -1 1 3 kappa0
n_max = 4
kx2 = 3.141592653589793 rad
kx1 = 0 rad
kappa = 1 kappa0
gamma = 10000 kappa0
gamma_prime = 0.5 kappa0
omega = 12500 kappa0
g = 1250 kappa0
delta_c = -24 kappa0
delta = -125000 kappa0
name = emission
";
    let cfg = parse(text).unwrap();
    assert_eq!(cfg.gamma_prime_override, Some(0.5));
    assert_eq!(cfg.params.n_max, 4);
    let outs: Vec<Output> = cfg.outputs.iter().collect();
    assert_eq!(outs, vec![Output::Spectrum, Output::Validity]);
    assert_eq!(parse(&cfg.to_text()).unwrap(), cfg);
}

#[test]
fn every_preset_parses_back() {
    for name in PRESETS {
        let cfg = preset(name).unwrap();
        assert_eq!(cfg.to_text().parse::<ScenarioConfig>().unwrap(), cfg);
    }
}

#[test]
fn rejected_inputs() {
    let base = fig3_text();
    type Check = fn(&ConfigError) -> bool;
    let cases: Vec<(String, Check)> = vec![
        (format!("{base}colour = red\n"), |e| matches!(e, ConfigError::UnknownKey { line: 13, .. })),
        (format!("{base}kappa = 2 kappa0\n"), |e| matches!(e, ConfigError::DuplicateKey { .. })),
        (replace_line(&base, "kappa", "kappa = 1"), |e| {
            matches!(e, ConfigError::Unit { expected: "kappa0", .. })
        }),
        (replace_line(&base, "kx2", "kx2 = 180 deg"), |e| {
            matches!(e, ConfigError::Unit { expected: "rad", .. })
        }),
        (replace_line(&base, "delta", "delta = nan kappa0"), |e| matches!(e, ConfigError::Value { .. })),
        (replace_line(&base, "kappa", "kappa = -1 kappa0"), |e| matches!(e, ConfigError::Physics(_))),
        (replace_line(&base, "n_max", "n_max = 1000"), |e| matches!(e, ConfigError::Value { .. })),
        (replace_line(&base, "name", "name = ../escape"), |e| matches!(e, ConfigError::Value { .. })),
        (replace_line(&base, "grid", "grid = 5 -5 201 kappa0"), |e| matches!(e, ConfigError::Grid(_))),
        (replace_line(&base, "grid", "grid = -5 5 201"), |e| matches!(e, ConfigError::Unit { .. })),
        (replace_line(&base, "outputs", "outputs = spectrum, plots"), |e| {
            matches!(e, ConfigError::Value { .. })
        }),
        (replace_line(&base, "outputs", "outputs = steady, steady"), |e| {
            matches!(e, ConfigError::Value { .. })
        }),
        (replace_line(&base, "gamma", "gamma: 0 kappa0"), |e| matches!(e, ConfigError::Syntax { .. })),
        (replace_line(&base, "omega", ""), |e| matches!(e, ConfigError::MissingKey("omega"))),
        (format!("{base}motion.nu = 100 kappa0\n"), |e| matches!(e, ConfigError::PartialMotion(_))),
        (
            format!(
                "{base}motion.nu = 100 kappa0\nmotion.k_qbar = 1.5\nmotion.phi1 = 0 rad\nmotion.phi2 = 0 rad\n"
            ),
            |e| matches!(e, ConfigError::Physics(_)),
        ),
    ];
    for (text, check) in cases {
        let err = parse(&text).unwrap_err();
        assert!(check(&err), "unexpected {err:?} for\n{text}");
    }
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e6..1e6f64,
        (-300i32..300).prop_map(|e| 10f64.powi(e)),
        Just(0.0),
        any::<f64>().prop_filter("finite", |v| v.is_finite()),
    ]
}

fn nonneg() -> impl Strategy<Value = f64> {
    finite().prop_map(f64::abs)
}

prop_compose! {
    fn configs()(
        name in "[A-Za-z0-9_-]{1,12}",
        delta in finite(), delta_c in finite(), g in nonneg(), omega in nonneg(),
        gamma in nonneg(), kappa in nonneg(), kx1 in finite(), kx2 in finite(),
        n_max in 1usize..=40,
        gp in proptest::option::of(nonneg()),
        motion in proptest::option::of((1e-3..1e6f64, 0.0..1.0f64, finite(), finite())),
        start in -1e3..1e3f64, width in 1e-6..1e3f64, count in 2usize..1000,
        outs in proptest::collection::vec(any::<bool>(), 4)
            .prop_filter("at least one output", |v| v.iter().any(|b| *b)),
    ) -> ScenarioConfig {
        ScenarioConfig {
            name,
            params: SystemParams { delta, delta_c, g, omega, gamma, kappa, kx1, kx2, n_max },
            motion: motion.map(|(nu, k_qbar, phi1, phi2)| MotionParams { nu, k_qbar, phi1, phi2 }),
            gamma_prime_override: gp,
            grid: GridSpec::new(start, start + width, count).unwrap(),
            outputs: Output::ALL.into_iter().zip(outs).filter(|(_, on)| *on).map(|(o, _)| o).collect(),
        }
    }
}

proptest! {
    #[test]
    fn round_trip_is_byte_identical(cfg in configs()) {
        let text = cfg.to_text();
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.to_text(), text);
    }

    #[test]
    fn arbitrary_text_never_panics(s in "\\PC*") {
        let _ = parse(&s);
    }

    #[test]
    fn arbitrary_lines_never_panic(lines in proptest::collection::vec("[a-z_.]{1,14} = [-0-9.e a-z,]{0,30}", 0..20)) {
        let _ = parse(&lines.join("\n"));
    }
}
