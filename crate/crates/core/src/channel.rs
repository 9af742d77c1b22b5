//! Completely-positive trace-preserving maps on two-spin states.
//!
//! Every [`Channel`] is self-contained: parameter-dependent pieces (evolution
//! unitaries, relaxation factors, the thermal target) are computed when the
//! channel is built, so applying one needs nothing but the state.
//!
//! Rotating frame: the carrier sits at the midpoint of the two resonances,
//! spin I is offset by `−δν/2` and spin S by `+δν/2`. Free evolution is
//! `exp(−iHt)` with `H/2π = Ω_I·Iz + Ω_S·Sz + J·IzSz` (weak coupling) or
//! `+ J·I·S` (strong coupling).

use log::warn;
use nalgebra::Vector4;

use crate::error::{Error, Result};
use crate::linalg::{self, c, Mat2};
use crate::state::{self, Axis, DensityMatrix, SpinSystemParams, TOTAL_M};
use crate::{Mat4, C64};

const TAU: f64 = std::f64::consts::TAU;

/// Which spin a selective operation addresses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Spin {
    I,
    S,
}

impl Spin {
    pub fn as_str(self) -> &'static str {
        match self {
            Spin::I => "I",
            Spin::S => "S",
        }
    }
}

/// Scalar-coupling treatment during free evolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Coupling {
    /// J switched off (offsets only).
    Off,
    /// `2πJ·IzSz`.
    Weak,
    /// `2πJ·I·S`.
    Strong,
}

impl Coupling {
    pub fn as_str(self) -> &'static str {
        match self {
            Coupling::Off => "off",
            Coupling::Weak => "weak",
            Coupling::Strong => "strong",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ChannelKind {
    /// Hard pulse of `angle_deg` about the axis at `phase_deg` in the xy-plane.
    Pulse {
        angle_deg: f64,
        phase_deg: f64,
        u: Mat4,
    },
    /// Free evolution for `t_s`.
    Delay { t_s: f64, coupling: Coupling, u: Mat4 },
    /// Any other unitary.
    Unitary { u: Mat4 },
    /// Ideal gradient crush: removes every coherence with Δm ≠ 0.
    ZeemanDephase,
    /// Slow-addition dephasing: removes every coherence, including the
    /// zero-quantum one.
    ZqDephase,
    /// Free evolution for `t_s` followed by an ideal gradient crush.
    GradientPeriod { t_s: f64, coupling: Coupling, u: Mat4 },
    /// T1/T2 relaxation toward the exact thermal populations.
    Relax {
        t_s: f64,
        t1_s: f64,
        t2_s: f64,
        equilibrium: [f64; 4],
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    pub kind: ChannelKind,
    pub label: String,
}

impl Channel {
    pub fn unitary(u: Mat4, label: impl Into<String>) -> Result<Self> {
        let defect = linalg::unitarity_defect(&u);
        if defect > state::EXACT_TOL {
            return Err(Error::InvalidParameter(format!(
                "matrix is not unitary (defect {defect:e})"
            )));
        }
        Ok(Self {
            kind: ChannelKind::Unitary { u },
            label: label.into(),
        })
    }

    /// The unitary of a unitary-kind channel.
    pub fn unitary_matrix(&self) -> Option<&Mat4> {
        match &self.kind {
            ChannelKind::Pulse { u, .. } | ChannelKind::Delay { u, .. } | ChannelKind::Unitary { u } => {
                Some(u)
            }
            _ => None,
        }
    }

    /// Duration in seconds; pulses are instantaneous.
    pub fn duration_s(&self) -> f64 {
        match self.kind {
            ChannelKind::Delay { t_s, .. }
            | ChannelKind::GradientPeriod { t_s, .. }
            | ChannelKind::Relax { t_s, .. } => t_s,
            _ => 0.0,
        }
    }

    pub fn apply(&self, rho: &DensityMatrix) -> DensityMatrix {
        DensityMatrix::new_unchecked(self.apply_matrix(rho.matrix()))
    }

    /// Applies the map to an arbitrary matrix (the maps are linear).
    pub fn apply_matrix(&self, m: &Mat4) -> Mat4 {
        match &self.kind {
            ChannelKind::Pulse { u, .. } | ChannelKind::Delay { u, .. } | ChannelKind::Unitary { u } => {
                u * m * u.adjoint()
            }
            ChannelKind::ZeemanDephase => zeeman_mask(m),
            ChannelKind::ZqDephase => Mat4::from_diagonal(&m.diagonal()),
            ChannelKind::GradientPeriod { u, .. } => zeeman_mask(&(u * m * u.adjoint())),
            ChannelKind::Relax {
                t_s,
                t1_s,
                t2_s,
                equilibrium,
            } => {
                let d1 = (-t_s / t1_s).exp();
                let d2 = (-t_s / t2_s).exp();
                Mat4::from_fn(|r, col| {
                    if r == col {
                        let tr = m.trace();
                        c(equilibrium[r]) * tr * c(1.0 - d1) + m[(r, r)] * c(d1)
                    } else {
                        m[(r, col)] * c(d2)
                    }
                })
            }
        }
    }
}

fn zeeman_mask(m: &Mat4) -> Mat4 {
    Mat4::from_fn(|r, col| {
        if TOTAL_M[r] == TOTAL_M[col] {
            m[(r, col)]
        } else {
            linalg::ZERO
        }
    })
}

/// Total spin operators `Fa = Ia + Sa`.
#[cfg(test)]
fn total(axis: Axis) -> Mat4 {
    state::op(axis, Axis::E) + state::op(Axis::E, axis)
}

/// Unitary of a hard pulse: `exp(−iθ(cosφ·Fx + sinφ·Fy))`.
pub fn pulse_unitary(angle_deg: f64, phase_deg: f64) -> Mat4 {
    let (theta, phi) = (angle_deg.to_radians(), phase_deg.to_radians());
    // exp(−iθ/2 (cosφ σx + sinφ σy)) on each spin
    let (ch, sh) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let off = C64::new(0.0, -sh) * C64::from_polar(1.0, -phi);
    let one = Mat2::new(c(ch), off, C64::new(0.0, -sh) * C64::from_polar(1.0, phi), c(ch));
    linalg::kron(&one, &one)
}

pub fn hard_pulse(angle_deg: f64, phase_deg: f64) -> Channel {
    Channel {
        kind: ChannelKind::Pulse {
            angle_deg,
            phase_deg,
            u: pulse_unitary(angle_deg, phase_deg),
        },
        label: format!("pulse {angle_deg} {phase_deg}"),
    }
}

/// Rotating-frame Hamiltonian divided by 2π (in Hz).
pub fn hamiltonian_hz(offset_i_hz: f64, offset_s_hz: f64, j_hz: f64, coupling: Coupling) -> Mat4 {
    let zeeman = state::op(Axis::Z, Axis::E) * c(offset_i_hz) + state::op(Axis::E, Axis::Z) * c(offset_s_hz);
    // 2IzSz/2 = IzSz
    let iz_sz = state::op(Axis::Z, Axis::Z) * c(0.5);
    match coupling {
        Coupling::Off => zeeman,
        Coupling::Weak => zeeman + iz_sz * c(j_hz),
        Coupling::Strong => {
            let i_dot_s = [Axis::X, Axis::Y, Axis::Z]
                .iter()
                .fold(Mat4::zeros(), |acc, &a| acc + state::op(a, a) * c(0.5));
            zeeman + i_dot_s * c(j_hz)
        }
    }
}

/// `exp(−i·2π·H·t)` for the rotating-frame Hamiltonian.
pub fn evolution_unitary(
    offset_i_hz: f64,
    offset_s_hz: f64,
    j_hz: f64,
    coupling: Coupling,
    t_s: f64,
) -> Mat4 {
    match coupling {
        Coupling::Off | Coupling::Weak => {
            let j = if coupling == Coupling::Weak { j_hz } else { 0.0 };
            // diagonal: E(mI, mS) = Ω_I mI + Ω_S mS + J mI mS
            let m = [(0.5, 0.5), (0.5, -0.5), (-0.5, 0.5), (-0.5, -0.5)];
            let phases = Vector4::from_fn(|i, _| {
                let (mi, ms) = m[i];
                let e = offset_i_hz * mi + offset_s_hz * ms + j * mi * ms;
                C64::from_polar(1.0, -TAU * e * t_s)
            });
            Mat4::from_diagonal(&phases)
        }
        Coupling::Strong => {
            let h = hamiltonian_hz(offset_i_hz, offset_s_hz, j_hz, coupling) * c(TAU);
            linalg::unitary_from_hamiltonian(&h, t_s)
        }
    }
}

/// Free evolution for `t_s` under the rotating-frame Hamiltonian of `params`.
///
/// Weak coupling with `δν ≤ 5J` is computed but logged as a warning.
pub fn free_evolution(t_s: f64, params: &SpinSystemParams, coupling: Coupling) -> Result<Channel> {
    if !(t_s >= 0.0 && t_s.is_finite()) {
        return Err(Error::InvalidParameter(format!("delay {t_s} s must be ≥ 0")));
    }
    if coupling == Coupling::Weak && params.delta_nu_hz <= 5.0 * params.j_hz {
        warn!(
            "weak-coupling evolution with δν = {} Hz ≤ 5J = {} Hz",
            params.delta_nu_hz,
            5.0 * params.j_hz
        );
    }
    let (oi, os) = params.offsets_hz();
    Ok(Channel {
        kind: ChannelKind::Delay {
            t_s,
            coupling,
            u: evolution_unitary(oi, os, params.j_hz, coupling, t_s),
        },
        label: format!("delay {t_s}"),
    })
}

pub fn zeeman_dephase() -> Channel {
    Channel {
        kind: ChannelKind::ZeemanDephase,
        label: "zeeman_dephase".into(),
    }
}

pub fn zq_dephase() -> Channel {
    Channel {
        kind: ChannelKind::ZqDephase,
        label: "zqdephase".into(),
    }
}

/// Gradient period: `1/δν` of free evolution then an ideal crush.
pub fn gradient_period(params: &SpinSystemParams, coupling: Coupling) -> Channel {
    let t_s = 1.0 / params.delta_nu_hz;
    let (oi, os) = params.offsets_hz();
    Channel {
        kind: ChannelKind::GradientPeriod {
            t_s,
            coupling,
            u: evolution_unitary(oi, os, params.j_hz, coupling, t_s),
        },
        label: "gradient_period".into(),
    }
}

/// Relaxation for `t_s`: coherences decay with T2, populations recover toward
/// the exact thermal populations with T1.
pub fn relax(t_s: f64, params: &SpinSystemParams) -> Result<Channel> {
    if !(t_s >= 0.0 && t_s.is_finite()) {
        return Err(Error::InvalidParameter(format!("relaxation time {t_s} s must be ≥ 0")));
    }
    params.validate()?;
    Ok(Channel {
        kind: ChannelKind::Relax {
            t_s,
            t1_s: params.t1_s,
            t2_s: params.t2_s,
            equilibrium: state::boltzmann_populations(params.b_factor()),
        },
        label: format!("relax {t_s}"),
    })
}

/// Pulse phases `(first, second)` in degrees of the jump-return selective
/// pulse. The two phases differ by 135°; the sign is fixed by which spin sits
/// at the negative offset, and the absolute phase is chosen so the target
/// ends up rotated from +z to +x, like a 90° pulse about +y.
pub fn selective_phases(target: Spin) -> (f64, f64) {
    match target {
        Spin::I => (135.0, 0.0),
        Spin::S => (45.0, 180.0),
    }
}

/// Hard 90° – `1/(4δν)` delay with J off – hard 90°.
pub fn selective_pulse(target: Spin, params: &SpinSystemParams) -> Result<ChannelProgram> {
    selective_pulse_with(target, params, Coupling::Off)
}

/// [`selective_pulse`] with an explicit coupling treatment for the delay.
pub fn selective_pulse_with(
    target: Spin,
    params: &SpinSystemParams,
    coupling: Coupling,
) -> Result<ChannelProgram> {
    params.validate()?;
    let (p1, p2) = selective_phases(target);
    let delay = free_evolution(1.0 / (4.0 * params.delta_nu_hz), params, coupling)?;
    Ok(ChannelProgram::new(
        vec![hard_pulse(90.0, p1), delay, hard_pulse(90.0, p2)],
        *params,
    ))
}

/// Gradient period – hard 90° (phase x) – gradient period, J off.
pub fn filtration_sequence(params: &SpinSystemParams) -> Result<ChannelProgram> {
    filtration_sequence_with(params, Coupling::Off)
}

pub fn filtration_sequence_with(params: &SpinSystemParams, coupling: Coupling) -> Result<ChannelProgram> {
    params.validate()?;
    Ok(ChannelProgram::new(
        vec![
            gradient_period(params, coupling),
            hard_pulse(90.0, 0.0),
            gradient_period(params, coupling),
        ],
        *params,
    ))
}

/// Ordered channels applied left to right.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelProgram {
    pub channels: Vec<Channel>,
    pub params: SpinSystemParams,
}

impl ChannelProgram {
    pub fn new(channels: Vec<Channel>, params: SpinSystemParams) -> Self {
        Self { channels, params }
    }

    pub fn empty(params: SpinSystemParams) -> Self {
        Self::new(Vec::new(), params)
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.channels.iter().map(Channel::duration_s).sum()
    }

    pub fn then(mut self, other: ChannelProgram) -> Self {
        self.channels.extend(other.channels);
        self
    }

    pub fn push(&mut self, channel: Channel) {
        self.channels.push(channel);
    }

    /// Applies every channel in order and checks the result is still a state.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let out = self.apply_unchecked(rho);
        out.validate().map_err(Error::ChannelInvariant)?;
        Ok(out)
    }

    pub fn apply_unchecked(&self, rho: &DensityMatrix) -> DensityMatrix {
        self.channels.iter().fold(rho.clone(), |acc, ch| ch.apply(&acc))
    }

    pub fn apply_matrix(&self, m: &Mat4) -> Mat4 {
        self.channels.iter().fold(*m, |acc, ch| ch.apply_matrix(&acc))
    }
}

/// Convenience: apply a program to a state.
pub fn apply(program: &ChannelProgram, rho: &DensityMatrix) -> Result<DensityMatrix> {
    program.apply(rho)
}
