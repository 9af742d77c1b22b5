mod common;

use phipsim::channel::{filtration_sequence, selective_pulse};
use phipsim::linalg::max_abs_diff;
use phipsim::random::{random_state, seeded};
use phipsim::seq::{compile, format, parse, parse_bytes, Statement};
use phipsim::{Spin, SpinSystemParams};
use proptest::prelude::*;
use rand::{Rng, RngCore};

fn read(name: &str) -> String {
    std::fs::read_to_string(common::sequence_path(name)).unwrap()
}

#[test]
fn shipped_sequences_parse_and_compile() {
    for name in [
        "selective_i.pseq",
        "selective_s.pseq",
        "filtration.pseq",
        "thermal_readout.pseq",
        "slow_addition.pseq",
    ] {
        let ast = parse(&read(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
        compile(&ast, &SpinSystemParams::default()).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn written_out_selective_pulse_matches_library_recipe() {
    let p = SpinSystemParams::default();
    let compiled = compile(&parse(&read("selective_i.pseq")).unwrap(), &p).unwrap();
    let library = selective_pulse(Spin::I, &p).unwrap();
    let mut rng = seeded(3);
    for _ in 0..50 {
        let rho = random_state(&mut rng);
        let a = compiled.program.apply(&rho).unwrap();
        let b = library.apply(&rho).unwrap();
        assert!(max_abs_diff(a.matrix(), b.matrix()) < 1e-12);
    }
    let acq = compiled.acquisition.unwrap();
    assert_eq!(acq.n_points, 16384);
}

#[test]
fn filtration_file_matches_library_program() {
    let p = SpinSystemParams::default();
    let compiled = compile(&parse(&read("filtration.pseq")).unwrap(), &p).unwrap();
    let library = filtration_sequence(&p).unwrap();
    let mut rng = seeded(4);
    for _ in 0..50 {
        let rho = random_state(&mut rng);
        let a = compiled.program.apply(&rho).unwrap();
        let b = library.apply(&rho).unwrap();
        assert!(max_abs_diff(a.matrix(), b.matrix()) < 1e-12);
    }
}

#[test]
fn two_hundred_random_asts_round_trip() {
    let mut rng = seeded(200);
    for k in 0..200 {
        let ast = common::random_ast(&mut rng);
        let text = format(&ast);
        let back = parse(&text).unwrap_or_else(|e| panic!("case {k}: {e}\n{text}"));
        assert_eq!(back, ast, "case {k}:\n{text}");
        assert_eq!(format(&back), text, "case {k}: formatting is not a fixed point");
    }
}

#[test]
fn errors_carry_line_and_column() {
    let e = parse("pulse 90 0\n\n  delay abc\n").unwrap_err();
    let first = e.first();
    assert_eq!((first.span.line, first.span.column), (3, 9));
    assert!(first.message.contains("abc"));
}

#[test]
fn compile_needs_delta_nu_only_when_used() {
    let p = SpinSystemParams { delta_nu_hz: f64::NAN, ..Default::default() };
    assert!(compile(&parse("pulse 90 0\n").unwrap(), &p).is_ok());
    assert!(compile(&parse("gradient_period\n").unwrap(), &p).is_err());
    let ok = compile(&parse("delta_nu 300\nselective S\n").unwrap(), &p).unwrap();
    assert_eq!(ok.program.params.delta_nu_hz, 300.0);
}

const KEYWORDS: &[&str] = &[
    "pulse", "selective", "delay", "gradient_period", "zqdephase", "relax", "acquire", "nu",
    "delta_nu", "j", "temp", "t1", "t2", "f_active", "I", "S", "off", "weak", "strong", "#", "90",
    "-1", "1e400", "NaN", "0.5", "\n", " ", "\t", "é", "\u{0}",
];

#[test]
fn token_soup_never_panics() {
    let mut rng = seeded(99);
    for _ in 0..5000 {
        let n = rng.random_range(0..30);
        let text: String = (0..n)
            .map(|_| KEYWORDS[rng.random_range(0..KEYWORDS.len())])
            .collect::<Vec<_>>()
            .join(if rng.random_bool(0.5) { " " } else { "\n" });
        if let Ok(ast) = parse(&text) {
            let again = parse(&format(&ast)).unwrap();
            assert_eq!(again, ast);
            let _ = compile(&ast, &SpinSystemParams::default());
        }
    }
}

#[test]
fn random_bytes_never_panic() {
    let mut rng = seeded(1234);
    for _ in 0..5000 {
        let mut buf = vec![0u8; rng.random_range(0..200)];
        rng.fill_bytes(&mut buf);
        let _ = parse_bytes(&buf);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn arbitrary_text_never_panics(text in "\\PC{0,200}") {
        let _ = parse(&text);
    }

    #[test]
    fn any_pulse_round_trips(angle in -1e6f64..1e6, phase in -1e6f64..1e6) {
        let text = format!("pulse {angle} {phase}\n");
        let ast = parse(&text).unwrap();
        prop_assert_eq!(ast.statements[0].node, Statement::Pulse { angle_deg: angle, phase_deg: phase });
        prop_assert_eq!(format(&ast), text);
    }
}
