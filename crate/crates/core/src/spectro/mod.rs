//! Time- and frequency-domain signal processing.
//!
//! Spectrum normalization: the FID is zero-filled to twice its length, its
//! first point is halved, and the discrete transform is scaled by
//! `2·dwell`. With that choice the real (absorption) part of a line from
//! `a·exp(i2πft − t/T2)` is a Lorentzian whose area is `a`, so integrals are
//! directly in product-operator units: the Ix term of a state with coefficient
//! `c` gives a doublet of total area `c`.

mod readout;
mod svg;

pub use readout::{
    calibrate, calibrate_ratio, component_regions, imbalance_to_populations,
    imbalance_to_populations_with, multiplet_regions, readout_components, readout_fid,
    readout_matrix, simulate_calibration, thermal_fid, thermal_multiplets, CalibrationResult, NoiseSpec, ReadoutConfig,
    BOOTSTRAP_REPLICATES,
};
pub use svg::{render_svg, Panel};

use std::fmt::Write;

use rand_distr::{Distribution, Normal};
use rustfft::FftPlanner;

use crate::channel::{evolution_unitary, Coupling};
use crate::error::{Error, Result};
use crate::linalg;
use crate::state::{DensityMatrix, SpinSystemParams, TOTAL_M};
use crate::{Mat4, C64};

/// Sampled free-induction decay.
#[derive(Clone, Debug, PartialEq)]
pub struct Fid {
    samples: Vec<C64>,
    dwell_s: f64,
}

impl Fid {
    pub fn new(samples: Vec<C64>, dwell_s: f64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "FID needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        if !(dwell_s > 0.0 && dwell_s.is_finite()) {
            return Err(Error::InvalidParameter(format!("dwell {dwell_s} s must be positive")));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("FID contains non-finite samples".into()));
        }
        Ok(Self { samples, dwell_s })
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn dwell_s(&self) -> f64 {
        self.dwell_s
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dwell_s
    }

    pub fn scaled(&self, factor: f64) -> Fid {
        Fid {
            samples: self.samples.iter().map(|z| z * factor).collect(),
            dwell_s: self.dwell_s,
        }
    }

    /// Pointwise sum of two FIDs on the same time grid.
    pub fn add(&self, other: &Fid) -> Result<Fid> {
        if self.len() != other.len() || self.dwell_s != other.dwell_s {
            return Err(Error::InvalidParameter("FIDs sampled on different grids".into()));
        }
        Ok(Fid {
            samples: self.samples.iter().zip(&other.samples).map(|(a, b)| a + b).collect(),
            dwell_s: self.dwell_s,
        })
    }

    /// Adds independent Gaussian noise of standard deviation `sigma` to the
    /// real and imaginary parts.
    pub fn with_noise<R: rand::Rng + ?Sized>(&self, sigma: f64, rng: &mut R) -> Result<Fid> {
        let normal = Normal::new(0.0, sigma)
            .map_err(|e| Error::InvalidParameter(format!("noise sigma {sigma}: {e}")))?;
        Ok(Fid {
            samples: self
                .samples
                .iter()
                .map(|z| z + C64::new(normal.sample(rng), normal.sample(rng)))
                .collect(),
            dwell_s: self.dwell_s,
        })
    }

    /// CSV with header `t_s,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_s,re,im\n");
        for (k, z) in self.samples.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", self.time(k), z.re, z.im);
        }
        out
    }
}

/// Frequency-domain data on an increasing axis (rotating-frame offsets).
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub freqs_hz: Vec<f64>,
    pub values: Vec<C64>,
}

impl Spectrum {
    pub fn new(freqs_hz: Vec<f64>, values: Vec<C64>) -> Result<Self> {
        if freqs_hz.len() != values.len() || freqs_hz.len() < 2 {
            return Err(Error::InvalidParameter("spectrum axis and values differ in length".into()));
        }
        if freqs_hz.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("spectrum axis must be strictly increasing".into()));
        }
        Ok(Self { freqs_hz, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Frequency of the largest real value.
    pub fn peak_hz(&self) -> f64 {
        let (k, _) = self
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.re.total_cmp(&b.1.re))
            .expect("spectrum is non-empty");
        self.freqs_hz[k]
    }

    pub fn axis_range(&self) -> (f64, f64) {
        (self.freqs_hz[0], self.freqs_hz[self.len() - 1])
    }

    pub fn integrate(&self, lo_hz: f64, hi_hz: f64) -> Result<f64> {
        integrate(self, lo_hz, hi_hz)
    }

    /// CSV with header `freq_hz,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("freq_hz,re,im\n");
        for (f, z) in self.freqs_hz.iter().zip(&self.values) {
            let _ = writeln!(out, "{},{},{}", f, z.re, z.im);
        }
        out
    }
}

/// Simulates `s(t_k) = tr(ρ(t_k)(I⁺ + S⁺))` under weak-coupling free
/// evolution with T2 decay of every coherence.
pub fn synthesize_fid(
    rho0: &DensityMatrix,
    params: &SpinSystemParams,
    n: usize,
    dwell_s: f64,
) -> Result<Fid> {
    synthesize_fid_matrix(rho0.matrix(), params, n, dwell_s)
}

/// [`synthesize_fid`] for an arbitrary (e.g. traceless deviation) matrix.
pub fn synthesize_fid_matrix(
    rho0: &Mat4,
    params: &SpinSystemParams,
    n: usize,
    dwell_s: f64,
) -> Result<Fid> {
    if !n.is_power_of_two() || n < 2 {
        return Err(Error::NotPowerOfTwo(n));
    }
    params.validate()?;
    if !(dwell_s > 0.0 && dwell_s.is_finite()) {
        return Err(Error::InvalidParameter(format!("dwell {dwell_s} s must be positive")));
    }
    let (oi, os) = params.offsets_hz();
    let u = evolution_unitary(oi, os, params.j_hz, Coupling::Weak, dwell_s);
    let u_dag = u.adjoint();
    let decay = (-dwell_s / params.t2_s).exp();
    let observable = raising_total();

    let mut rho = *rho0;
    let mut samples = Vec::with_capacity(n);
    for _ in 0..n {
        samples.push((rho * observable).trace());
        rho = u * rho * u_dag;
        for r in 0..4 {
            for col in 0..4 {
                if r != col {
                    rho[(r, col)] *= decay;
                }
            }
        }
    }
    Fid::new(samples, dwell_s)
}

/// `I⁺ + S⁺` with `I⁺ = |0⟩⟨1| ⊗ 𝟙` (raising toward spin up).
pub fn raising_total() -> Mat4 {
    let mut plus = linalg::Mat2::zeros();
    plus[(0, 1)] = linalg::ONE;
    let id = linalg::Mat2::identity();
    linalg::kron(&plus, &id) + linalg::kron(&id, &plus)
}

/// Total-m selection rule helper: true when `(r, c)` is a single-quantum
/// element.
pub fn is_single_quantum_element(r: usize, col: usize) -> bool {
    (TOTAL_M[r] - TOTAL_M[col]).abs() == 1
}

/// Zero-fill ×2, exponential apodization of `apodize_hz` (added Lorentzian
/// full width), first-point halving and a `2·dwell`-scaled DFT. The axis runs
/// over `k/(N·dwell)` for `k = −N/2 … N/2 − 1`.
pub fn fourier(fid: &Fid, apodize_hz: f64) -> Spectrum {
    let prepared = prepare(fid, apodize_hz);
    let n_total = prepared.len();
    let mut buf = prepared;
    FftPlanner::<f64>::new()
        .plan_fft_forward(n_total)
        .process(&mut buf);
    let scale = 2.0 * fid.dwell_s;
    let half = n_total / 2;
    let df = 1.0 / (n_total as f64 * fid.dwell_s);
    let freqs_hz = (0..n_total).map(|k| (k as f64 - half as f64) * df).collect();
    let values = (0..n_total).map(|k| buf[(k + half) % n_total] * scale).collect();
    Spectrum { freqs_hz, values }
}

/// The time-domain sequence that [`fourier`] transforms.
pub fn prepare(fid: &Fid, apodize_hz: f64) -> Vec<C64> {
    let n = fid.len();
    let mut out = Vec::with_capacity(2 * n);
    for (k, z) in fid.samples.iter().enumerate() {
        let window = (-std::f64::consts::PI * apodize_hz * fid.time(k)).exp();
        let first = if k == 0 { 0.5 } else { 1.0 };
        out.push(z * window * first);
    }
    out.resize(2 * n, C64::new(0.0, 0.0));
    out
}

/// Multiplies the FID by `2cos(π·J·t)` and doubles J, `rounds` times. Each
/// round turns an antiphase doublet of splitting J into one of splitting 2J
/// with the same line areas.
pub fn j_double(fid: &Fid, j_apparent_hz: f64, rounds: u32) -> Result<Fid> {
    if !(j_apparent_hz > 0.0 && j_apparent_hz.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "apparent J {j_apparent_hz} Hz must be positive"
        )));
    }
    let mut out = fid.clone();
    let mut j = j_apparent_hz;
    for _ in 0..rounds {
        for (k, z) in out.samples.iter_mut().enumerate() {
            *z *= 2.0 * (std::f64::consts::PI * j * k as f64 * fid.dwell_s).cos();
        }
        j *= 2.0;
    }
    Ok(out)
}

/// Two Lorentzian lines at `center ± splitting/2` with areas `high_area` and
/// `low_area` and full width at half height `fwhm_hz`.
pub fn doublet_fid(
    center_hz: f64,
    splitting_hz: f64,
    fwhm_hz: f64,
    high_area: f64,
    low_area: f64,
    n: usize,
    dwell_s: f64,
) -> Result<Fid> {
    let tau = std::f64::consts::TAU;
    let samples = (0..n)
        .map(|k| {
            let t = k as f64 * dwell_s;
            let env = (-std::f64::consts::PI * fwhm_hz * t).exp();
            let hi = C64::from_polar(high_area, tau * (center_hz + splitting_hz / 2.0) * t);
            let lo = C64::from_polar(1.0, tau * (center_hz - splitting_hz / 2.0) * t) * low_area;
            (hi + lo) * env
        })
        .collect();
    Fid::new(samples, dwell_s)
}

/// Fraction of the upper line of a unit antiphase doublet (splitting `j_hz`,
/// width `fwhm_hz`) recovered by integrating `[center, center + splitting]`
/// after `rounds` of J-doubling.
pub fn doublet_component_recovery(j_hz: f64, fwhm_hz: f64, rounds: u32) -> Result<f64> {
    let fid = doublet_fid(0.0, j_hz, fwhm_hz, 1.0, -1.0, 8192, 1e-3)?;
    let spec = fourier(&j_double(&fid, j_hz, rounds)?, 0.0);
    let split = j_hz * f64::from(1u32 << rounds);
    integrate(&spec, 0.0, split)
}

/// Trapezoidal integral of the real part over `[lo_hz, hi_hz]`, with linear
/// interpolation at the region edges.
pub fn integrate(spectrum: &Spectrum, lo_hz: f64, hi_hz: f64) -> Result<f64> {
    let (min, max) = spectrum.axis_range();
    if !(lo_hz < hi_hz) || lo_hz < min || hi_hz > max {
        return Err(Error::RegionOutsideAxis {
            lo: lo_hz,
            hi: hi_hz,
            min,
            max,
        });
    }
    let f = &spectrum.freqs_hz;
    let y: Vec<f64> = spectrum.values.iter().map(|z| z.re).collect();
    let mut total = 0.0;
    for k in 0..f.len() - 1 {
        let (a, b) = (f[k].max(lo_hz), f[k + 1].min(hi_hz));
        if b <= a {
            continue;
        }
        let slope = (y[k + 1] - y[k]) / (f[k + 1] - f[k]);
        let ya = y[k] + slope * (a - f[k]);
        let yb = y[k] + slope * (b - f[k]);
        total += 0.5 * (ya + yb) * (b - a);
    }
    Ok(total)
}
