#![allow(dead_code)]

use nalgebra::DMatrix;
use phipsim::channel::{
    filtration_sequence, free_evolution, gradient_period, hard_pulse, relax, selective_pulse,
    zeeman_dephase, zq_dephase,
};
use phipsim::seq::{HeaderKey, SequenceAst, Spanned, Statement};
use phipsim::{ChannelProgram, Coupling, Mat4, SpinSystemParams, Spin, C64};
use rand::Rng;

/// Choi matrix `Σ |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)`.
pub fn choi(map: impl Fn(&Mat4) -> Mat4) -> DMatrix<C64> {
    let mut out = DMatrix::<C64>::zeros(16, 16);
    for i in 0..4 {
        for j in 0..4 {
            let mut e = Mat4::zeros();
            e[(i, j)] = C64::new(1.0, 0.0);
            let img = map(&e);
            for a in 0..4 {
                for b in 0..4 {
                    out[(4 * i + a, 4 * j + b)] = img[(a, b)];
                }
            }
        }
    }
    out
}

pub fn choi_min_eigenvalue(map: impl Fn(&Mat4) -> Mat4) -> f64 {
    let c = choi(map);
    let h = (&c + c.adjoint()) * C64::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Largest deviation of `Tr_out(C)` from the identity.
pub fn trace_preservation_defect(map: impl Fn(&Mat4) -> Mat4) -> f64 {
    let c = choi(map);
    let mut worst = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            let mut s = C64::new(0.0, 0.0);
            for a in 0..4 {
                s += c[(4 * i + a, 4 * j + a)];
            }
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((s - C64::new(want, 0.0)).norm());
        }
    }
    worst
}

/// One program per channel family, with a few pulse angles and phases.
pub fn representative_programs(params: &SpinSystemParams) -> Vec<(String, ChannelProgram)> {
    let single = |label: &str, ch| {
        (label.to_string(), ChannelProgram::new(vec![ch], *params))
    };
    let mut v = vec![
        single("pulse 90 0", hard_pulse(90.0, 0.0)),
        single("pulse 37 211", hard_pulse(37.0, 211.0)),
        single("pulse 180 90", hard_pulse(180.0, 90.0)),
        single("delay weak", free_evolution(3.1e-3, params, Coupling::Weak).unwrap()),
        single("delay strong", free_evolution(3.1e-3, params, Coupling::Strong).unwrap()),
        single("delay off", free_evolution(3.1e-3, params, Coupling::Off).unwrap()),
        single("zeeman_dephase", zeeman_dephase()),
        single("zqdephase", zq_dephase()),
        single("gradient_period", gradient_period(params, Coupling::Off)),
        single("relax", relax(0.4, params).unwrap()),
    ];
    v.push(("selective I".into(), selective_pulse(Spin::I, params).unwrap()));
    v.push(("selective S".into(), selective_pulse(Spin::S, params).unwrap()));
    v.push(("filtration".into(), filtration_sequence(params).unwrap()));
    v
}

fn finite<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    // mix of round and arbitrary decimals to exercise number formatting
    match rng.random_range(0..3) {
        0 => rng.random_range(lo..hi).round(),
        1 => (rng.random_range(lo..hi) * 1e4).round() / 1e4,
        _ => rng.random_range(lo..hi),
    }
}

/// Random well-formed AST with at most one acquire.
pub fn random_ast<R: Rng>(rng: &mut R) -> SequenceAst {
    let mut ast = SequenceAst::new();
    for key in HeaderKey::ALL {
        if rng.random_bool(0.4) {
            let v = if key == HeaderKey::FActive {
                rng.random_range(0.01..=1.0)
            } else {
                finite(rng, 1e-3, 1e9).max(1e-3)
            };
            ast.set_header(key, Spanned::bare(v));
        }
    }
    let n = rng.random_range(0..12);
    let mut acquired = false;
    for _ in 0..n {
        let st = match rng.random_range(0..7) {
            0 => Statement::Pulse {
                angle_deg: finite(rng, -720.0, 720.0),
                phase_deg: finite(rng, -360.0, 360.0),
            },
            1 => Statement::Selective(if rng.random_bool(0.5) { Spin::I } else { Spin::S }),
            2 => Statement::Delay {
                t_s: finite(rng, 0.0, 2.0).abs(),
                coupling: [Coupling::Off, Coupling::Weak, Coupling::Strong][rng.random_range(0..3)],
            },
            3 => Statement::GradientPeriod,
            4 => Statement::ZqDephase,
            5 => Statement::Relax { t_s: finite(rng, 0.0, 5.0).abs() },
            _ if !acquired => {
                acquired = true;
                Statement::Acquire {
                    n_points: 1 << rng.random_range(1..15),
                    dwell_s: finite(rng, 1e-5, 1e-2).max(1e-5),
                }
            }
            _ => Statement::ZqDephase,
        };
        ast.push(st);
    }
    ast
}

/// Fraction of the area of a unit Lorentzian at `center` (full width
/// `fwhm`) lying in `[lo, hi]`.
pub fn lorentzian_mass(center: f64, fwhm: f64, lo: f64, hi: f64) -> f64 {
    let g = fwhm / 2.0;
    (((hi - center) / g).atan() - ((lo - center) / g).atan()) / std::f64::consts::PI
}

/// Integral over `[0, s]` of a unit antiphase doublet with lines at `±s/2`,
/// `s = j·2^rounds`.
pub fn antiphase_recovery_oracle(j: f64, fwhm: f64, rounds: u32) -> f64 {
    let s = j * f64::from(1u32 << rounds);
    lorentzian_mass(s / 2.0, fwhm, 0.0, s) - lorentzian_mass(-s / 2.0, fwhm, 0.0, s)
}

pub fn sequence_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../sequences")
        .join(name)
}
