//! Two-spin-½ states and their standard views.
//!
//! # Basis
//!
//! Matrices are written in the Zeeman product basis `|00⟩, |01⟩, |10⟩, |11⟩`
//! where the first label is spin I, the second spin S, and `0` is spin up.
//! With this convention
//!
//! | name | ket |
//! |------|-----|
//! | S0 (Ψ⁻) | (|01⟩ − |10⟩)/√2 |
//! | T0 (Ψ⁺) | (|01⟩ + |10⟩)/√2 |
//! | T+1 | |11⟩ (both down) |
//! | T−1 | |00⟩ (both up) |
//! | Φ± | (|00⟩ ± |11⟩)/√2 |
//!
//! Bell populations are always reported in the order (S0, T0, T+1, T−1).
//!
//! # Product-operator units
//!
//! [`ProductOperatorCoeffs`] expands ρ over the sixteen NMR product operators
//! `E`, `Ia`, `Sb` and `2IaSb` (a, b ∈ {x, y, z}) with `Ix = ½σx⊗𝟙`,
//! `Sx = ½𝟙⊗σx`. The coefficients are exactly the numbers that appear in
//! front of each operator when a trace-one state is written out in that
//! basis, so the singlet reads `¼E − ½(2IxSx + 2IySy + 2IzSz)` and a valid
//! state always has `c[E,E] = ¼`. [`ProductOperatorCoeffs::pauli`] gives the
//! same information in the Pauli normalization `ρ = Σ r_ab σa⊗σb`, where the
//! singlet has `r_xx = r_yy = r_zz = −¼`.

use std::fmt;
use std::str::FromStr;

use nalgebra::Vector4;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::consts::{BOLTZMANN, PLANCK};
use crate::error::{Error, Result};
use crate::linalg::{self, c, kron, sigma_x, sigma_y, sigma_z, Mat2};
use crate::{Mat4, C64};

/// Tolerance for exact-algebra invariants (Hermiticity, trace).
pub const EXACT_TOL: f64 = 1e-12;
/// Tolerance below zero allowed for eigenvalues of a valid state.
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Largest `B = hν/kT` accepted by the linearized thermal state.
pub const HIGH_TEMPERATURE_LIMIT: f64 = 0.1;

/// Total magnetic quantum number `m_I + m_S` of each Zeeman basis state.
pub const TOTAL_M: [i32; 4] = [1, 0, 0, -1];

/// A validated two-spin density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(Mat4);

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(m: Mat4) -> Result<Self> {
        check_state(&m).map_err(Error::InvalidState)?;
        Ok(Self(m))
    }

    pub(crate) fn new_unchecked(m: Mat4) -> Self {
        Self(m)
    }

    /// Projector onto a (not necessarily normalized) ket.
    pub fn from_ket(ket: &Vector4<C64>) -> Result<Self> {
        let norm = ket.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidState("zero or non-finite ket".into()));
        }
        let k = ket / c(norm);
        Ok(Self(k * k.adjoint()))
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    pub fn into_matrix(self) -> Mat4 {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// tr(ρ²).
    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::min_eigenvalue(&self.0)
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        let v = linalg::hermitian_eigen(&self.0).0;
        [v[0], v[1], v[2], v[3]]
    }

    /// ⟨ψ|ρ|ψ⟩ for a normalized ket.
    pub fn expectation_ket(&self, ket: &Vector4<C64>) -> f64 {
        (ket.adjoint() * self.0 * ket)[(0, 0)].re
    }

    /// Uhlmann fidelity `(tr √(√ρ σ √ρ))²`. Reduces to ⟨ψ|ρ|ψ⟩ when either
    /// argument is pure.
    pub fn fidelity(&self, other: &DensityMatrix) -> f64 {
        let sqrt_rho = linalg::psd_sqrt(&self.0);
        let inner = sqrt_rho * other.0 * sqrt_rho;
        let t: f64 = linalg::hermitian_eigen(&inner)
            .0
            .iter()
            .map(|v| v.max(0.0).sqrt())
            .sum();
        t * t
    }

    pub fn bell_populations(&self) -> BellPopulations {
        BellPopulations::from_state(self)
    }

    pub fn product_operators(&self) -> ProductOperatorCoeffs {
        ProductOperatorCoeffs::from_state(self)
    }

    /// Convex combination `Σ wᵢ ρᵢ`. Weights must be non-negative and sum to 1.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if parts.iter().any(|(w, _)| *w < 0.0 || !w.is_finite()) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "mixture weights must be non-negative and sum to 1 (sum {total})"
            )));
        }
        let m = parts
            .iter()
            .fold(Mat4::zeros(), |acc, (w, rho)| acc + rho.0 * c(*w));
        Ok(Self(m))
    }

    /// Checks the invariants on a state produced by a channel.
    pub fn validate(&self) -> std::result::Result<(), String> {
        check_state(&self.0)
    }

    pub fn to_dump(&self) -> StateDump {
        StateDump::from_state(self)
    }
}

fn check_state(m: &Mat4) -> std::result::Result<(), String> {
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err("non-finite entry".into());
    }
    let herm = linalg::hermiticity_defect(m);
    if herm > EXACT_TOL {
        return Err(format!("not Hermitian (defect {herm:e})"));
    }
    let tr = m.trace();
    if (tr.re - 1.0).abs() > EXACT_TOL || tr.im.abs() > EXACT_TOL {
        return Err(format!("trace {tr} differs from 1"));
    }
    let min = linalg::min_eigenvalue(m);
    if min < -POSITIVITY_TOL {
        return Err(format!("negative eigenvalue {min:e}"));
    }
    Ok(())
}

/// Normalized kets of the Bell-type basis, in (S0, T0, T+1, T−1) order.
pub fn bell_kets() -> [Vector4<C64>; 4] {
    let h = c(std::f64::consts::FRAC_1_SQRT_2);
    let z = linalg::ZERO;
    let o = linalg::ONE;
    [
        Vector4::new(z, h, -h, z),
        Vector4::new(z, h, h, z),
        Vector4::new(z, z, z, o),
        Vector4::new(o, z, z, z),
    ]
}

/// The named pure (or maximally mixed) states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NamedState {
    Singlet,
    T0,
    TPlus,
    TMinus,
    PhiPlus,
    PhiMinus,
    ZeemanGround,
    MaximallyMixed,
}

impl NamedState {
    pub const ALL: [NamedState; 8] = [
        NamedState::Singlet,
        NamedState::T0,
        NamedState::TPlus,
        NamedState::TMinus,
        NamedState::PhiPlus,
        NamedState::PhiMinus,
        NamedState::ZeemanGround,
        NamedState::MaximallyMixed,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            NamedState::Singlet => "singlet",
            NamedState::T0 => "T0",
            NamedState::TPlus => "Tplus",
            NamedState::TMinus => "Tminus",
            NamedState::PhiPlus => "PhiPlus",
            NamedState::PhiMinus => "PhiMinus",
            NamedState::ZeemanGround => "ZeemanGround",
            NamedState::MaximallyMixed => "MaximallyMixed",
        }
    }

    pub fn ket(self) -> Option<Vector4<C64>> {
        let [s0, t0, tp, tm] = bell_kets();
        let h = c(std::f64::consts::FRAC_1_SQRT_2);
        match self {
            NamedState::Singlet => Some(s0),
            NamedState::T0 => Some(t0),
            NamedState::TPlus => Some(tp),
            NamedState::TMinus | NamedState::ZeemanGround => Some(tm),
            NamedState::PhiPlus => Some((tm + tp) * h),
            NamedState::PhiMinus => Some((tm - tp) * h),
            NamedState::MaximallyMixed => None,
        }
    }

    pub fn state(self) -> DensityMatrix {
        match self.ket() {
            Some(k) => DensityMatrix(k * k.adjoint()),
            None => maximally_mixed(),
        }
    }
}

impl fmt::Display for NamedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NamedState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace(['_', '-'], "");
        let state = match key.as_str() {
            "singlet" | "s0" | "psiminus" => NamedState::Singlet,
            "t0" | "psiplus" => NamedState::T0,
            "tplus" | "t+1" | "t+" => NamedState::TPlus,
            "tminus" | "t1" | "t-" => NamedState::TMinus,
            "phiplus" => NamedState::PhiPlus,
            "phiminus" => NamedState::PhiMinus,
            "zeemanground" | "ground" => NamedState::ZeemanGround,
            "maximallymixed" | "mixed" | "identity" => NamedState::MaximallyMixed,
            _ => {
                return Err(Error::UnknownState {
                    name: s.to_string(),
                    valid: NamedState::ALL.map(|n| n.as_str()).join(", "),
                })
            }
        };
        Ok(state)
    }
}

pub fn make_singlet() -> DensityMatrix {
    NamedState::Singlet.state()
}

pub fn make_named_state(name: &str) -> Result<DensityMatrix> {
    Ok(name.parse::<NamedState>()?.state())
}

pub fn maximally_mixed() -> DensityMatrix {
    DensityMatrix(Mat4::identity() * c(0.25))
}

/// `(1 − ε)𝟙/4 + ε·target`.
pub fn make_pseudo_pure(epsilon: f64, target: &DensityMatrix) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::OutOfRange(format!(
            "polarization {epsilon} outside [0, 1]"
        )));
    }
    target.validate().map_err(Error::InvalidState)?;
    Ok(DensityMatrix(
        Mat4::identity() * c((1.0 - epsilon) / 4.0) + target.0 * c(epsilon),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThermalMode {
    /// `¼E + ¼B(Iz + Sz)`, valid for `B ≪ 1`.
    Linearized,
    /// Boltzmann populations over the Zeeman energies `−hν(m_I + m_S)`.
    Exact,
}

pub fn make_thermal(params: &SpinSystemParams, mode: ThermalMode) -> Result<DensityMatrix> {
    params.validate()?;
    thermal_from_b(params.b_factor(), mode)
}

/// Thermal state for a given `B = hν/kT`.
pub fn thermal_from_b(b: f64, mode: ThermalMode) -> Result<DensityMatrix> {
    if !(b >= 0.0 && b.is_finite()) {
        return Err(Error::InvalidParameter(format!("B = {b} must be finite and ≥ 0")));
    }
    match mode {
        ThermalMode::Linearized => {
            if b > HIGH_TEMPERATURE_LIMIT {
                return Err(Error::OutOfRange(format!(
                    "B = {b} exceeds the high-temperature limit {HIGH_TEMPERATURE_LIMIT}"
                )));
            }
            let fz = op(Axis::Z, Axis::E) + op(Axis::E, Axis::Z);
            Ok(DensityMatrix(Mat4::identity() * c(0.25) + fz * c(b / 4.0)))
        }
        ThermalMode::Exact => Ok(DensityMatrix(Mat4::from_diagonal(
            &Vector4::from(boltzmann_populations(b)).map(c),
        ))),
    }
}

/// Populations of `|00⟩, |01⟩, |10⟩, |11⟩` at `B = hν/kT`.
pub fn boltzmann_populations(b: f64) -> [f64; 4] {
    // shift by the largest exponent so large B cannot overflow
    let w = TOTAL_M.map(|m| (b * (m as f64 - 1.0)).exp());
    let z: f64 = w.iter().sum();
    w.map(|x| x / z)
}

/// One factor of a product operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    E,
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 4] = [Axis::E, Axis::X, Axis::Y, Axis::Z];

    fn index(self) -> usize {
        self as usize
    }

    fn pauli(self) -> Mat2 {
        match self {
            Axis::E => Mat2::identity(),
            Axis::X => sigma_x(),
            Axis::Y => sigma_y(),
            Axis::Z => sigma_z(),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Axis::E => 'E',
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }
}

/// The product operator for `(a, b)`: `E`, `Ia`, `Sb` or `2IaSb`.
pub fn op(a: Axis, b: Axis) -> Mat4 {
    // Ia = ½σa⊗𝟙 and 2IaSb = ½σa⊗σb share the same ½
    let scale = if (a, b) == (Axis::E, Axis::E) { 1.0 } else { 0.5 };
    kron(&a.pauli(), &b.pauli()) * c(scale)
}

/// Human-readable name of a product operator, e.g. `2IxSz`.
pub fn op_name(a: Axis, b: Axis) -> String {
    match (a, b) {
        (Axis::E, Axis::E) => "E".into(),
        (_, Axis::E) => format!("I{}", a.symbol()),
        (Axis::E, _) => format!("S{}", b.symbol()),
        _ => format!("2I{}S{}", a.symbol(), b.symbol()),
    }
}

/// Coefficients of ρ over the sixteen product operators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductOperatorCoeffs {
    c: [[f64; 4]; 4],
}

impl ProductOperatorCoeffs {
    pub fn from_state(rho: &DensityMatrix) -> Self {
        Self::from_matrix(&rho.0)
    }

    pub fn from_matrix(m: &Mat4) -> Self {
        let mut out = [[0.0; 4]; 4];
        for a in Axis::ALL {
            for b in Axis::ALL {
                let p = op(a, b);
                let norm = (p * p).trace().re;
                out[a.index()][b.index()] = (p * m).trace().re / norm;
            }
        }
        Self { c: out }
    }

    pub fn zero() -> Self {
        Self { c: [[0.0; 4]; 4] }
    }

    pub fn get(&self, a: Axis, b: Axis) -> f64 {
        self.c[a.index()][b.index()]
    }

    pub fn set(&mut self, a: Axis, b: Axis, value: f64) {
        self.c[a.index()][b.index()] = value;
    }

    /// Coefficient in the Pauli normalization `ρ = Σ r_ab σa⊗σb`.
    pub fn pauli(&self, a: Axis, b: Axis) -> f64 {
        let scale = match (a, b) {
            (Axis::E, Axis::E) => 1.0,
            _ => 0.5,
        };
        self.get(a, b) * scale
    }

    pub fn to_matrix(&self) -> Mat4 {
        let mut m = Mat4::zeros();
        for a in Axis::ALL {
            for b in Axis::ALL {
                m += op(a, b) * c(self.get(a, b));
            }
        }
        m
    }

    /// Rebuilds and validates the state.
    pub fn to_state(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.to_matrix())
    }

    /// `(name, coefficient)` pairs in `E, Ix, …, 2IzSz` order.
    pub fn entries(&self) -> Vec<(String, f64)> {
        let mut v = Vec::with_capacity(16);
        for a in Axis::ALL {
            for b in Axis::ALL {
                v.push((op_name(a, b), self.get(a, b)));
            }
        }
        v
    }

    /// Coefficients of the operators that produce a detectable signal
    /// (single-quantum: one transverse factor, the other `E` or `z`).
    pub fn observable(&self) -> Vec<(String, f64)> {
        let mut v = Vec::new();
        for a in Axis::ALL {
            for b in Axis::ALL {
                if is_single_quantum(a, b) {
                    v.push((op_name(a, b), self.get(a, b)));
                }
            }
        }
        v
    }
}

/// True for product operators carrying single-quantum coherence.
pub fn is_single_quantum(a: Axis, b: Axis) -> bool {
    let transverse = |x: Axis| matches!(x, Axis::X | Axis::Y);
    let longitudinal = |x: Axis| matches!(x, Axis::E | Axis::Z);
    (transverse(a) && longitudinal(b)) || (longitudinal(a) && transverse(b))
}

/// Populations in the (S0, T0, T+1, T−1) basis plus the size of what is left
/// off the diagonal in that basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BellPopulations {
    pub p_s: f64,
    pub p_t0: f64,
    pub p_tplus: f64,
    pub p_tminus: f64,
    /// Frobenius norm of the off-diagonal part of ρ in the Bell-type basis.
    pub off_bell: f64,
}

impl BellPopulations {
    pub fn from_state(rho: &DensityMatrix) -> Self {
        let kets = bell_kets();
        let basis = Mat4::from_fn(|r, col| kets[col][r]);
        let rotated = basis.adjoint() * rho.0 * basis;
        let mut off = 0.0;
        for r in 0..4 {
            for col in 0..4 {
                if r != col {
                    off += rotated[(r, col)].norm_sqr();
                }
            }
        }
        Self {
            p_s: rotated[(0, 0)].re,
            p_t0: rotated[(1, 1)].re,
            p_tplus: rotated[(2, 2)].re,
            p_tminus: rotated[(3, 3)].re,
            off_bell: off.sqrt(),
        }
    }

    pub fn new(p_s: f64, p_t0: f64, p_tplus: f64, p_tminus: f64) -> Self {
        Self {
            p_s,
            p_t0,
            p_tplus,
            p_tminus,
            off_bell: 0.0,
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.p_s, self.p_t0, self.p_tplus, self.p_tminus]
    }

    /// The Bell-diagonal state with these populations. Residual coherences
    /// are not represented.
    pub fn to_state(&self) -> Result<DensityMatrix> {
        let kets = bell_kets();
        let m = self
            .as_array()
            .iter()
            .zip(kets.iter())
            .fold(Mat4::zeros(), |acc, (p, k)| acc + k * k.adjoint() * c(*p));
        DensityMatrix::new(m)
    }
}

impl Serialize for BellPopulations {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.as_array().serialize(s)
    }
}

impl<'de> Deserialize<'de> for BellPopulations {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [a, b, c, e] = <[f64; 4]>::deserialize(d)?;
        Ok(Self::new(a, b, c, e))
    }
}

/// Spectrometer and molecule constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinSystemParams {
    /// Larmor frequency ν (Hz).
    pub nu_hz: f64,
    /// Resonance-frequency difference between spins I and S (Hz).
    pub delta_nu_hz: f64,
    /// Scalar coupling J (Hz).
    pub j_hz: f64,
    pub temp_k: f64,
    pub t1_s: f64,
    pub t2_s: f64,
    /// Fraction of the sample inside the detection coil.
    pub f_active: f64,
}

impl Default for SpinSystemParams {
    /// 400 MHz, 295 K, δν = 492 Hz, T1 = 1.7 s, T2 = 0.58 s, f = 0.368.
    /// J = 5 Hz is a typical cis-dihydride coupling and only a demo value.
    fn default() -> Self {
        Self {
            nu_hz: 400e6,
            delta_nu_hz: 492.0,
            j_hz: 5.0,
            temp_k: 295.0,
            t1_s: 1.7,
            t2_s: 0.58,
            f_active: 0.368,
        }
    }
}

impl SpinSystemParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("nu_hz", self.nu_hz),
            ("delta_nu_hz", self.delta_nu_hz),
            ("j_hz", self.j_hz),
            ("temp_k", self.temp_k),
            ("t1_s", self.t1_s),
            ("t2_s", self.t2_s),
            ("f_active", self.f_active),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be positive")));
            }
        }
        if self.f_active > 1.0 {
            return Err(Error::InvalidParameter(format!(
                "f_active = {} must lie in (0, 1]",
                self.f_active
            )));
        }
        // the independent-exponential relaxation model is only completely
        // positive for T2 ≤ T1
        if self.t2_s > self.t1_s {
            return Err(Error::InvalidParameter(format!(
                "t2_s = {} exceeds t1_s = {}",
                self.t2_s, self.t1_s
            )));
        }
        Ok(())
    }

    /// `B = hν/kT`.
    pub fn b_factor(&self) -> f64 {
        PLANCK * self.nu_hz / (BOLTZMANN * self.temp_k)
    }

    /// Rotating-frame offsets (Hz) of spins I and S with the carrier at the
    /// midpoint: `(−δν/2, +δν/2)`.
    pub fn offsets_hz(&self) -> (f64, f64) {
        (-self.delta_nu_hz / 2.0, self.delta_nu_hz / 2.0)
    }
}

/// On-disk form of a state: `{"basis": "zeeman", "re": [[..]], "im": [[..]]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateDump {
    pub basis: String,
    pub re: [[f64; 4]; 4],
    pub im: [[f64; 4]; 4],
}

impl StateDump {
    pub fn from_state(rho: &DensityMatrix) -> Self {
        let mut re = [[0.0; 4]; 4];
        let mut im = [[0.0; 4]; 4];
        for r in 0..4 {
            for col in 0..4 {
                re[r][col] = rho.0[(r, col)].re;
                im[r][col] = rho.0[(r, col)].im;
            }
        }
        Self {
            basis: "zeeman".into(),
            re,
            im,
        }
    }

    pub fn to_state(&self) -> Result<DensityMatrix> {
        if self.basis != "zeeman" {
            return Err(Error::InvalidState(format!(
                "unsupported basis `{}` (expected `zeeman`)",
                self.basis
            )));
        }
        DensityMatrix::new(Mat4::from_fn(|r, col| {
            C64::new(self.re[r][col], self.im[r][col])
        }))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
