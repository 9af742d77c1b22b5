use nalgebra::{SMatrix, SVector};
use serde::{Deserialize, Serialize};

use super::{fourier, integrate, j_double, synthesize_fid, Fid, Spectrum};
use crate::channel::{hard_pulse, selective_pulse, Spin};
use crate::error::{Error, Result};
use crate::random;
use crate::state::{
    make_pseudo_pure, make_singlet, make_thermal, BellPopulations, DensityMatrix, SpinSystemParams,
    ThermalMode,
};

pub const BOOTSTRAP_REPLICATES: usize = 100;

/// Relative singular-value floor below which the readout cannot be inverted.
const SINGULAR_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub epsilon: f64,
    pub epsilon_err: f64,
    pub raw_ratio: f64,
    pub corrected_ratio: f64,
    pub max_enhancement: f64,
}

/// Acquisition and processing settings for the readout pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReadoutConfig {
    pub n_points: usize,
    pub dwell_s: f64,
    pub j_doubling_rounds: u32,
    pub apodize_hz: f64,
}

impl ReadoutConfig {
    /// Spectral width of four times δν and an acquisition long enough for
    /// ten T2 periods.
    pub fn for_params(params: &SpinSystemParams) -> Self {
        let dwell_s = 1.0 / (4.0 * params.delta_nu_hz);
        let wanted = (10.0 * params.t2_s / dwell_s).ceil().max(256.0) as usize;
        Self {
            n_points: wanted.next_power_of_two(),
            dwell_s,
            j_doubling_rounds: 4,
            apodize_hz: 0.0,
        }
    }

    fn check(&self, params: &SpinSystemParams) -> Result<()> {
        if !self.n_points.is_power_of_two() || self.n_points < 2 {
            return Err(Error::NotPowerOfTwo(self.n_points));
        }
        let nyquist = 0.5 / self.dwell_s;
        if params.delta_nu_hz >= nyquist {
            return Err(Error::InvalidParameter(format!(
                "dwell {} s folds lines at ±{} Hz (Nyquist {nyquist} Hz)",
                self.dwell_s, params.delta_nu_hz
            )));
        }
        Ok(())
    }
}

/// Integration windows `[I low, I high, S low, S high]`: each half of a
/// multiplet, from its center out to half the I–S separation.
pub fn component_regions(params: &SpinSystemParams) -> [(f64, f64); 4] {
    let (oi, os) = params.offsets_hz();
    let h = params.delta_nu_hz / 2.0;
    [(oi - h, oi), (oi, oi + h), (os - h, os), (os, os + h)]
}

/// Whole-multiplet windows `[I, S]`.
pub fn multiplet_regions(params: &SpinSystemParams) -> [(f64, f64); 2] {
    let (oi, os) = params.offsets_hz();
    let h = params.delta_nu_hz / 2.0;
    [(oi - h, oi + h), (os - h, os + h)]
}

fn integrate_all<const N: usize>(spectrum: &Spectrum, regions: [(f64, f64); N]) -> Result<[f64; N]> {
    let mut out = [0.0; N];
    for (o, (lo, hi)) in out.iter_mut().zip(regions) {
        *o = integrate(spectrum, lo, hi)?;
    }
    Ok(out)
}

/// FID after the selective I pulse, before any processing.
pub fn readout_fid(rho: &DensityMatrix, params: &SpinSystemParams, config: &ReadoutConfig) -> Result<Fid> {
    config.check(params)?;
    let pulsed = selective_pulse(Spin::I, params)?.apply_unchecked(rho);
    synthesize_fid(&pulsed, params, config.n_points, config.dwell_s)
}

fn process_components(fid: &Fid, params: &SpinSystemParams, config: &ReadoutConfig) -> Result<[f64; 4]> {
    let doubled = j_double(fid, params.j_hz, config.j_doubling_rounds)?;
    integrate_all(&fourier(&doubled, config.apodize_hz), component_regions(params))
}

/// Selective I pulse, acquisition, J-doubling and integration of the four
/// multiplet halves.
pub fn readout_components(
    rho: &DensityMatrix,
    params: &SpinSystemParams,
    config: &ReadoutConfig,
) -> Result<[f64; 4]> {
    process_components(&readout_fid(rho, params, config)?, params, config)
}

/// FID of the thermal reference after a 90° pulse about y.
pub fn thermal_fid(params: &SpinSystemParams, config: &ReadoutConfig) -> Result<Fid> {
    config.check(params)?;
    let rho = hard_pulse(90.0, 90.0).apply(&make_thermal(params, ThermalMode::Exact)?);
    synthesize_fid(&rho, params, config.n_points, config.dwell_s)
}

fn process_multiplets(fid: &Fid, params: &SpinSystemParams, config: &ReadoutConfig) -> Result<[f64; 2]> {
    integrate_all(&fourier(fid, config.apodize_hz), multiplet_regions(params))
}

/// Integrals of the I and S multiplets of one thermal scan.
pub fn thermal_multiplets(params: &SpinSystemParams, config: &ReadoutConfig) -> Result<[f64; 2]> {
    process_multiplets(&thermal_fid(params, config)?, params, config)
}

/// Column `b` holds the component integrals produced by Bell state `b`
/// (order S0, T0, T+1, T−1).
pub fn readout_matrix(params: &SpinSystemParams, config: &ReadoutConfig) -> Result<SMatrix<f64, 4, 4>> {
    let mut m = SMatrix::<f64, 4, 4>::zeros();
    for b in 0..4 {
        let mut p = [0.0; 4];
        p[b] = 1.0;
        let state = BellPopulations::new(p[0], p[1], p[2], p[3]).to_state()?;
        let y = readout_components(&state, params, config)?;
        for (r, v) in y.into_iter().enumerate() {
            m[(r, b)] = v;
        }
    }
    Ok(m)
}

/// Bell populations of a Bell-diagonal state from its four component
/// integrals, using the default readout for `params`.
pub fn imbalance_to_populations(integrals: &[f64; 4], params: &SpinSystemParams) -> Result<BellPopulations> {
    imbalance_to_populations_with(integrals, params, &ReadoutConfig::for_params(params))
}

/// The identity gives no signal, so the readout matrix has rank three and the
/// populations are fixed only together with `Σp = 1`. The stacked 5×4 system
/// is solved in the least-squares sense.
pub fn imbalance_to_populations_with(
    integrals: &[f64; 4],
    params: &SpinSystemParams,
    config: &ReadoutConfig,
) -> Result<BellPopulations> {
    let m = readout_matrix(params, config)?;
    let mut a = SMatrix::<f64, 5, 4>::zeros();
    a.fixed_view_mut::<4, 4>(0, 0).copy_from(&m);
    a.row_mut(4).fill(1.0);
    let mut rhs = SVector::<f64, 5>::zeros();
    rhs.fixed_rows_mut::<4>(0).copy_from_slice(integrals);
    rhs[4] = 1.0;

    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > SINGULAR_TOL * smax) {
        return Err(Error::SingularReadout(smin / smax));
    }
    let p = svd
        .solve(&rhs, 0.0)
        .map_err(|_| Error::SingularReadout(smin / smax))?;
    Ok(BellPopulations::new(p[0], p[1], p[2], p[3]))
}

/// `ε = raw·f_active / max_enhancement`.
pub fn calibrate_ratio(raw_ratio: f64, f_active: f64, max_enhancement: f64) -> Result<CalibrationResult> {
    if !(raw_ratio > 0.0 && raw_ratio.is_finite()) {
        return Err(Error::InvalidParameter(format!("raw ratio {raw_ratio} must be positive")));
    }
    if !(f_active > 0.0 && f_active <= 1.0) {
        return Err(Error::OutOfRange(format!("f_active {f_active} outside (0, 1]")));
    }
    if !(max_enhancement > 0.0 && max_enhancement.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "max enhancement {max_enhancement} must be positive"
        )));
    }
    let corrected_ratio = raw_ratio * f_active;
    let epsilon = corrected_ratio / max_enhancement;
    if epsilon > 1.0 + 1e-6 {
        log::warn!("calibrated epsilon {epsilon} exceeds 1");
    }
    Ok(CalibrationResult {
        epsilon,
        epsilon_err: 0.0,
        raw_ratio,
        corrected_ratio,
        max_enhancement,
    })
}

/// Ratio of summed absolute ph2 integrals to summed absolute thermal
/// integrals divided by `scan_norm`.
pub fn calibrate(
    ph2_integrals: &[f64],
    thermal_integrals: &[f64],
    scan_norm: f64,
    params: &SpinSystemParams,
) -> Result<CalibrationResult> {
    params.validate()?;
    if !(scan_norm > 0.0 && scan_norm.is_finite()) {
        return Err(Error::InvalidParameter(format!("scan_norm {scan_norm} must be positive")));
    }
    let thermal: f64 = thermal_integrals.iter().map(|x| x.abs()).sum();
    if !(thermal > 0.0) {
        return Err(Error::InvalidParameter("thermal integrals are all zero".into()));
    }
    let ph2: f64 = ph2_integrals.iter().map(|x| x.abs()).sum();
    calibrate_ratio(ph2 / (thermal / scan_norm), params.f_active, 2.0 / params.b_factor())
}

/// Additive Gaussian FID noise for uncertainty estimates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub sigma: f64,
    pub seed: u64,
}

/// Full simulated calibration of a pseudo-pure singlet of polarization
/// `epsilon`.
///
/// The thermal reference is `scan_norm` accumulated scans of the exact
/// thermal state, weighted by `f_active` (the thermal signal comes from that
/// fraction of the hyperpolarized volume). With noise, the reported ε comes
/// from the first noisy realization and `epsilon_err` is the standard
/// deviation over [`BOOTSTRAP_REPLICATES`] further realizations.
pub fn simulate_calibration(
    epsilon: f64,
    params: &SpinSystemParams,
    config: &ReadoutConfig,
    scan_norm: f64,
    noise: Option<NoiseSpec>,
) -> Result<CalibrationResult> {
    params.validate()?;
    let rho = make_pseudo_pure(epsilon, &make_singlet())?;
    let ph2_fid = readout_fid(&rho, params, config)?;
    let thermal = thermal_fid(params, config)?.scaled(scan_norm * params.f_active);

    let estimate = |ph2: &Fid, th: &Fid| -> Result<CalibrationResult> {
        let y = process_components(ph2, params, config)?;
        let t = process_multiplets(th, params, config)?;
        calibrate(&y, &t, scan_norm, params)
    };

    let Some(noise) = noise else {
        return estimate(&ph2_fid, &thermal);
    };
    let mut rng = random::seeded(noise.seed);
    let draw = |rng: &mut random::Rng| -> Result<CalibrationResult> {
        let a = ph2_fid.with_noise(noise.sigma, rng)?;
        let b = thermal.with_noise(noise.sigma, rng)?;
        estimate(&a, &b)
    };
    let mut result = draw(&mut rng)?;
    let mut samples = Vec::with_capacity(BOOTSTRAP_REPLICATES);
    for _ in 0..BOOTSTRAP_REPLICATES {
        samples.push(draw(&mut rng)?.epsilon);
    }
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    let var = samples.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (samples.len() - 1) as f64;
    result.epsilon_err = var.sqrt();
    Ok(result)
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;
    use crate::state::bell_kets;

    fn params() -> SpinSystemParams {
        SpinSystemParams::default()
    }

    #[test]
    fn default_config_covers_both_multiplets() {
        let p = params();
        let c = ReadoutConfig::for_params(&p);
        assert_eq!(c.n_points, 16384);
        assert!(0.5 / c.dwell_s > p.delta_nu_hz);
        let bad = ReadoutConfig { dwell_s: 1.5e-3, ..c };
        assert!(readout_components(&make_singlet(), &p, &bad).is_err());
    }

    #[test]
    fn regions_tile_the_multiplets() {
        let r = component_regions(&params());
        assert_eq!(r, [(-492.0, -246.0), (-246.0, 0.0), (0.0, 246.0), (246.0, 492.0)]);
    }

    #[test]
    fn singlet_components_are_antiphase() {
        let y = readout_components(&make_singlet(), &params(), &ReadoutConfig::for_params(&params())).unwrap();
        for v in y {
            assert_abs_diff_eq!(v.abs(), 0.25, epsilon = 5e-3);
        }
        assert!(y[0] * y[1] < 0.0 && y[2] * y[3] < 0.0);
    }

    #[test]
    fn readout_matrix_rank_three() {
        let m = readout_matrix(&params(), &ReadoutConfig::for_params(&params())).unwrap();
        let sv = m.singular_values();
        let mut s: Vec<f64> = sv.iter().copied().collect();
        s.sort_by(f64::total_cmp);
        assert!(s[0] < 1e-6 * s[3], "{s:?}");
        assert!(s[1] > 1e-2 * s[3], "{s:?}");
        let ones = m * nalgebra::Vector4::repeat(1.0);
        assert!(ones.amax() < 1e-9);
    }

    #[test]
    fn inversion_recovers_bell_diagonal_states() {
        let p = params();
        let cfg = ReadoutConfig::for_params(&p);
        let target = BellPopulations::new(0.6, 0.1, 0.2, 0.1);
        let y = readout_components(&target.to_state().unwrap(), &p, &cfg).unwrap();
        let got = imbalance_to_populations_with(&y, &p, &cfg).unwrap();
        for (a, b) in got.as_array().iter().zip(target.as_array()) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-9);
        }
        assert_eq!(bell_kets().len(), 4);
    }

    #[test]
    fn calibrate_ratio_examples() {
        let r = calibrate_ratio(77000.0, 0.368, 31028.0).unwrap();
        assert_abs_diff_eq!(r.epsilon, 0.9133, epsilon = 1e-4);
        assert_eq!(r.corrected_ratio, 77000.0 * 0.368);
        let r = calibrate_ratio(31028.0, 1.0, 31028.0).unwrap();
        assert_eq!(r.epsilon, 1.0);
        assert!(calibrate_ratio(0.0, 0.5, 1.0).is_err());
        assert!(calibrate_ratio(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn calibrate_rejects_zero_thermal() {
        assert!(calibrate(&[1.0], &[0.0, 0.0], 1.0, &params()).is_err());
        assert!(calibrate(&[1.0], &[1.0], 0.0, &params()).is_err());
    }

    #[test]
    fn noisy_calibration_is_reproducible() {
        let p = params();
        let cfg = ReadoutConfig { n_points: 4096, ..ReadoutConfig::for_params(&p) };
        let noise = Some(NoiseSpec { sigma: 1e-3, seed: 7 });
        let a = simulate_calibration(0.5, &p, &cfg, 1e4, noise).unwrap();
        let b = simulate_calibration(0.5, &p, &cfg, 1e4, noise).unwrap();
        assert_eq!(a, b);
        assert!(a.epsilon_err > 0.0);
    }
}
