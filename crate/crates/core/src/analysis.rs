//! Entanglement measures, equivalent temperature/field, ortho/para statistics.

use serde::{Deserialize, Serialize};

use crate::consts::{BOLTZMANN, GAMMA_1H_HZ_PER_T, PLANCK, THETA_ROT_H2_K};
use crate::error::{Error, Result};
use crate::linalg::{self, kron, sigma_y};
use crate::state::{make_pseudo_pure, make_singlet, BellPopulations, DensityMatrix, SpinSystemParams};
use crate::{Mat4, C64};

/// A state counts as entangled when its partial transpose has an eigenvalue
/// below `−ENTANGLEMENT_TOL`.
pub const ENTANGLEMENT_TOL: f64 = 1e-10;

/// Reported in place of temperatures too large to be meaningful (K).
pub const TEMPERATURE_CEILING_K: f64 = 1e9;

/// Transpose on the second spin: `ρ^T_B[(i,j),(k,l)] = ρ[(i,l),(k,j)]`.
pub fn partial_transpose(m: &Mat4) -> Mat4 {
    Mat4::from_fn(|r, c| {
        let (i, j) = (r >> 1, r & 1);
        let (k, l) = (c >> 1, c & 1);
        m[((i << 1) | l, (k << 1) | j)]
    })
}

pub fn min_pt_eigenvalue(rho: &DensityMatrix) -> f64 {
    linalg::min_eigenvalue(&partial_transpose(rho.matrix()))
}

/// Wootters concurrence.
pub fn concurrence(rho: &DensityMatrix) -> f64 {
    let yy = kron(&sigma_y(), &sigma_y());
    let m = rho.matrix();
    let tilde = yy * m.conjugate() * yy;
    let root = linalg::psd_sqrt(m);
    let r = root * tilde * root;
    let (vals, _) = linalg::hermitian_eigen(&r);
    let mut l: Vec<f64> = vals.iter().map(|v| v.max(0.0).sqrt()).collect();
    l.sort_by(|a, b| b.total_cmp(a));
    (l[0] - l[1] - l[2] - l[3]).max(0.0)
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |q: f64| if q <= 0.0 { 0.0 } else { -q * q.log2() };
    term(p) + term(1.0 - p)
}

/// Entanglement of formation (bits) for a given concurrence.
pub fn eof_from_concurrence(c: f64) -> f64 {
    let c = c.clamp(0.0, 1.0);
    binary_entropy((1.0 + (1.0 - c * c).sqrt()) / 2.0)
}

pub fn eof(rho: &DensityMatrix) -> f64 {
    eof_from_concurrence(concurrence(rho))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport {
    pub min_pt_eigenvalue: f64,
    pub entangled: bool,
    pub concurrence: f64,
    pub eof: f64,
    pub bell: BellPopulations,
    pub off_bell: f64,
}

impl EntanglementReport {
    pub fn from_state(rho: &DensityMatrix) -> Self {
        let min_pt = min_pt_eigenvalue(rho);
        let c = concurrence(rho);
        let bell = rho.bell_populations();
        Self {
            min_pt_eigenvalue: min_pt,
            entangled: min_pt < -ENTANGLEMENT_TOL,
            concurrence: c,
            eof: eof_from_concurrence(c),
            off_bell: bell.off_bell,
            bell,
        }
    }
}

/// `(1 − ε)𝟙/4 + ε·S0`.
pub fn werner_state(epsilon: f64) -> Result<DensityMatrix> {
    make_pseudo_pure(epsilon, &make_singlet())
}

/// `a·S0 + (1 − a)[x·T0 + (1 − x)·½(T+1 + T−1)]`.
pub fn singlet_mixture_state(a: f64, x: f64) -> Result<DensityMatrix> {
    for (name, v) in [("a", a), ("x", x)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::OutOfRange(format!("{name} = {v} outside [0, 1]")));
        }
    }
    let rest = 1.0 - a;
    let side = rest * (1.0 - x) / 2.0;
    BellPopulations::new(a, rest * x, side, side).to_state()
}

/// PPT verdict for [`singlet_mixture_state`].
pub fn singlet_mixture_entangled(a: f64, x: f64) -> Result<bool> {
    Ok(min_pt_eigenvalue(&singlet_mixture_state(a, x)?) < -ENTANGLEMENT_TOL)
}

/// Bisection for an increasing `f` on `[lo, hi]` until the bracket is below
/// `rel_tol·|hi|`.
pub fn bisect(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, rel_tol: f64) -> Result<f64> {
    let (flo, fhi) = (f(lo), f(hi));
    if !(flo <= 0.0 && fhi >= 0.0) {
        return Err(Error::NoConvergence(format!(
            "root not bracketed: f({lo}) = {flo}, f({hi}) = {fhi}"
        )));
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= rel_tol * hi.abs() {
            return Ok(0.5 * (lo + hi));
        }
    }
    Err(Error::NoConvergence(format!("bracket [{lo}, {hi}] after 400 halvings")))
}

/// Temperature and field at which a thermal spin-½ ensemble has polarization
/// ε.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalentConditions {
    pub temp_k_at_field: f64,
    pub field_t_at_temp: f64,
    pub gamma_hz_per_t: f64,
}

/// Single-spin polarization `tanh(hν/2kT)`.
pub fn spin_polarization(nu_hz: f64, temp_k: f64) -> f64 {
    (PLANCK * nu_hz / (2.0 * BOLTZMANN * temp_k)).tanh()
}

/// Solves `tanh(hν/2kT) = ε` for T at the spectrometer frequency and for the
/// field at the sample temperature, using the ¹H gyromagnetic ratio.
pub fn effective_conditions(epsilon: f64, params: &SpinSystemParams) -> Result<EquivalentConditions> {
    effective_conditions_with(epsilon, params, GAMMA_1H_HZ_PER_T)
}

pub fn effective_conditions_with(
    epsilon: f64,
    params: &SpinSystemParams,
    gamma_hz_per_t: f64,
) -> Result<EquivalentConditions> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::OutOfRange(format!("polarization {epsilon} outside (0, 1)")));
    }
    params.validate()?;
    // x = hν/2kT
    let mut hi = 1.0f64;
    while hi.tanh() < epsilon {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::NoConvergence(format!("no bracket for ε = {epsilon}")));
        }
    }
    let mut lo = hi / 2.0;
    while lo.tanh() >= epsilon {
        hi = lo;
        lo /= 2.0;
        if lo == 0.0 {
            return Err(Error::NoConvergence(format!("no bracket for ε = {epsilon}")));
        }
    }
    let x = bisect(|x| x.tanh() - epsilon, lo, hi, 1e-13)?;
    let temp = PLANCK * params.nu_hz / (2.0 * BOLTZMANN * x);
    let nu = 2.0 * BOLTZMANN * params.temp_k * x / PLANCK;
    Ok(EquivalentConditions {
        temp_k_at_field: if temp.is_finite() { temp.min(TEMPERATURE_CEILING_K) } else { TEMPERATURE_CEILING_K },
        field_t_at_temp: nu / gamma_hz_per_t,
        gamma_hz_per_t,
    })
}

/// `2/B`: the signal ratio between a pure singlet readout and a thermal
/// state.
pub fn max_enhancement(params: &SpinSystemParams) -> f64 {
    2.0 / params.b_factor()
}

/// Equilibrium para fraction of H₂ at `temp_k`, from the rotational
/// partition sums with nuclear-spin weights 1 (even J) and 3 (odd J).
pub fn para_fraction(temp_k: f64) -> Result<f64> {
    if !(temp_k > 0.0) {
        return Err(Error::InvalidParameter(format!("temperature {temp_k} K must be positive")));
    }
    let (mut even, mut odd) = (0.0, 0.0);
    let mut prev = f64::INFINITY;
    for j in 0u32.. {
        let jf = j as f64;
        let term = (2.0 * jf + 1.0) * (-THETA_ROT_H2_K * jf * (jf + 1.0) / temp_k).exp();
        if j % 2 == 0 {
            even += term;
        } else {
            odd += term;
        }
        if j > 0 && term < 1e-15 && term <= prev {
            break;
        }
        prev = term;
    }
    Ok(even / (even + 3.0 * odd))
}

/// Normalized product state `|a⟩⊗|b⟩`.
pub fn product_state(a: [C64; 2], b: [C64; 2]) -> Result<DensityMatrix> {
    let ket = nalgebra::Vector4::new(a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]);
    let norm = ket.norm();
    DensityMatrix::from_ket(&(ket / C64::new(norm, 0.0)))
}
