mod common;

use approx::assert_abs_diff_eq;
use phipsim::channel::hard_pulse;
use phipsim::random::{random_state, seeded};
use phipsim::spectro::{
    calibrate, component_regions, doublet_component_recovery, doublet_fid, fourier, imbalance_to_populations,
    integrate, j_double, readout_components, simulate_calibration, synthesize_fid, NoiseSpec, ReadoutConfig,
};
use phipsim::state::{make_pseudo_pure, make_singlet, thermal_from_b};
use phipsim::{BellPopulations, DensityMatrix, SpinSystemParams, ThermalMode};
use rand::Rng;

fn params() -> SpinSystemParams {
    SpinSystemParams::default()
}

#[test]
fn fid_spectrum_and_integrals_are_linear_in_the_state() {
    let p = params();
    let (n, dwell) = (2048, 1.0 / (4.0 * p.delta_nu_hz));
    let mut rng = seeded(31);
    for _ in 0..20 {
        let a = random_state(&mut rng);
        let b = random_state(&mut rng);
        let w: f64 = rng.random_range(0.0..1.0);
        let mix = DensityMatrix::mixture(&[(w, &a), (1.0 - w, &b)]).unwrap();
        let fa = synthesize_fid(&a, &p, n, dwell).unwrap();
        let fb = synthesize_fid(&b, &p, n, dwell).unwrap();
        let fm = synthesize_fid(&mix, &p, n, dwell).unwrap();
        let combo = fa.scaled(w).add(&fb.scaled(1.0 - w)).unwrap();
        for (x, y) in fm.samples().iter().zip(combo.samples()) {
            assert!((x - y).norm() < 1e-12);
        }
        let (sa, sb, sm) = (fourier(&fa, 1.0), fourier(&fb, 1.0), fourier(&fm, 1.0));
        for k in 0..sm.len() {
            let lin = sa.values[k] * w + sb.values[k] * (1.0 - w);
            assert!((sm.values[k] - lin).norm() < 1e-10);
        }
        for (lo, hi) in component_regions(&p) {
            let lin = w * integrate(&sa, lo, hi).unwrap() + (1.0 - w) * integrate(&sb, lo, hi).unwrap();
            assert_abs_diff_eq!(integrate(&sm, lo, hi).unwrap(), lin, epsilon = 1e-10);
        }
    }
}

#[test]
fn doubling_b_doubles_thermal_lines() {
    let p = params();
    let b = p.b_factor();
    let spec = |bb: f64| {
        let rho = hard_pulse(90.0, 90.0).apply(&thermal_from_b(bb, ThermalMode::Linearized).unwrap());
        fourier(&synthesize_fid(&rho, &p, 4096, 1.0 / (4.0 * p.delta_nu_hz)).unwrap(), 0.0)
    };
    let (s1, s2) = (spec(b), spec(2.0 * b));
    assert_eq!(s1.peak_hz(), s2.peak_hz());
    for (x, y) in s1.values.iter().zip(&s2.values) {
        assert!((y - x * 2.0).norm() < 1e-12 * (1.0 + x.norm()));
    }
}

#[test]
fn unit_lorentzian_integrates_to_one() {
    let fid = doublet_fid(0.0, 0.0, 2.0, 0.5, 0.5, 8192, 1e-3).unwrap();
    let s = fourier(&fid, 0.0);
    let (lo, hi) = s.axis_range();
    assert_abs_diff_eq!(integrate(&s, lo, hi).unwrap(), 1.0, epsilon = 1e-3);
}

#[test]
fn antiphase_doublet_cancels_over_the_whole_multiplet() {
    let fid = doublet_fid(0.0, 5.0, 2.0, 1.0, -1.0, 8192, 1e-3).unwrap();
    let s = fourier(&fid, 0.0);
    let (lo, hi) = s.axis_range();
    assert_abs_diff_eq!(integrate(&s, lo, hi).unwrap(), 0.0, epsilon = 1e-3);
}

#[test]
fn well_separated_component_recovers_its_line_area() {
    // 40 Hz splitting, 0.3 Hz lines: tails cost less than 1% of the area
    let oracle = common::antiphase_recovery_oracle(40.0, 0.3, 0);
    assert!(oracle > 0.99);
    let fid = doublet_fid(0.0, 40.0, 0.3, 1.0, -1.0, 16384, 1e-3).unwrap();
    let got = integrate(&fourier(&fid, 0.0), 0.0, 40.0).unwrap();
    assert_abs_diff_eq!(got, 1.0, epsilon = 1e-2);
    assert_abs_diff_eq!(got, oracle, epsilon = 1e-3);
}

#[test]
fn j_doubling_matches_lorentzian_oracle() {
    for (j, fwhm) in [(5.0, 2.0), (5.0, 5.0), (7.0, 1.0), (3.0, 0.5)] {
        for rounds in 0..=4 {
            let got = doublet_component_recovery(j, fwhm, rounds).unwrap();
            let want = common::antiphase_recovery_oracle(j, fwhm, rounds);
            assert_abs_diff_eq!(got, want, epsilon = 1e-3);
        }
    }
    // the recovery gain grows with the splitting; at width = J the oracle
    // itself stops short of 95%
    let before = doublet_component_recovery(5.0, 2.0, 0).unwrap();
    let after = doublet_component_recovery(5.0, 2.0, 4).unwrap();
    assert!(before < 0.70 && after >= 0.95, "{before} -> {after}");
    assert!(common::antiphase_recovery_oracle(5.0, 5.0, 4) < 0.95);
}

#[test]
fn in_phase_doublet_becomes_one_two_one_triplet() {
    let j = 5.0;
    let fid = doublet_fid(0.0, j, 0.2, 1.0, 1.0, 16384, 1e-3).unwrap();
    let s = fourier(&j_double(&fid, j, 1).unwrap(), 0.0);
    let left = integrate(&s, -1.5 * j, -0.5 * j).unwrap();
    let mid = integrate(&s, -0.5 * j, 0.5 * j).unwrap();
    let right = integrate(&s, 0.5 * j, 1.5 * j).unwrap();
    assert_abs_diff_eq!(left, 1.0, epsilon = 0.05);
    assert_abs_diff_eq!(mid, 2.0, epsilon = 0.05);
    assert_abs_diff_eq!(right, 1.0, epsilon = 0.05);
}

fn bell_state(p: [f64; 4]) -> DensityMatrix {
    BellPopulations::new(p[0], p[1], p[2], p[3]).to_state().unwrap()
}

#[test]
fn imbalance_inversion_examples() {
    let p = params();
    let cfg = ReadoutConfig::for_params(&p);
    for want in [[1.0, 0.0, 0.0, 0.0], [0.937, 0.045, 0.009, 0.009], [0.5, 0.5, 0.0, 0.0]] {
        let y = readout_components(&bell_state(want), &p, &cfg).unwrap();
        let got = imbalance_to_populations(&y, &p).unwrap().as_array();
        for (g, w) in got.iter().zip(want) {
            assert_abs_diff_eq!(*g, w, epsilon = 1e-6);
        }
    }
}

#[test]
fn calibration_is_linear_in_the_ph2_signal() {
    let p = params();
    let thermal = [p.b_factor() / 4.0, p.b_factor() / 4.0];
    let base = calibrate(&[0.2, -0.2, 0.2, -0.2], &thermal, 1.0, &p).unwrap();
    for x in [0.1, 0.5, 2.0, 7.0] {
        let scaled = calibrate(&[0.2 * x, -0.2 * x, 0.2 * x, -0.2 * x], &thermal, 1.0, &p).unwrap();
        assert_abs_diff_eq!(scaled.epsilon / base.epsilon, x, epsilon = 1e-12);
        assert_eq!(scaled.corrected_ratio, scaled.raw_ratio * p.f_active);
    }
}

#[test]
fn simulated_calibration_recovers_polarization() {
    let p = params();
    let cfg = ReadoutConfig::for_params(&p);
    for eps in [0.1, 0.5, 0.916] {
        let r = simulate_calibration(eps, &p, &cfg, 3072.0 * 1000.0, None).unwrap();
        assert!((r.epsilon - eps).abs() < 0.01 * eps.max(0.1), "{eps}: {}", r.epsilon);
        assert_eq!(r.epsilon_err, 0.0);
    }
}

#[test]
fn noisy_calibration_reports_spread() {
    let p = params();
    let cfg = ReadoutConfig { n_points: 4096, ..ReadoutConfig::for_params(&p) };
    let quiet = simulate_calibration(0.916, &p, &cfg, 1e3, Some(NoiseSpec { sigma: 1e-4, seed: 1 })).unwrap();
    let loud = simulate_calibration(0.916, &p, &cfg, 1e3, Some(NoiseSpec { sigma: 1e-3, seed: 1 })).unwrap();
    assert!(quiet.epsilon_err > 0.0);
    assert!(loud.epsilon_err > quiet.epsilon_err);
}

#[test]
fn pseudo_singlet_components_scale_with_epsilon() {
    let p = params();
    let cfg = ReadoutConfig::for_params(&p);
    let full = readout_components(&make_singlet(), &p, &cfg).unwrap();
    let part = readout_components(&make_pseudo_pure(0.3, &make_singlet()).unwrap(), &p, &cfg).unwrap();
    for (f, q) in full.iter().zip(part) {
        assert_abs_diff_eq!(q, 0.3 * f, epsilon = 1e-12);
    }
}
