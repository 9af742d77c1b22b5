//! Physical constants, all in SI units.

/// Planck constant h (J·s), exact in the 2019 SI.
pub const PLANCK: f64 = 6.626_070_15e-34;

/// Boltzmann constant k (J/K), exact in the 2019 SI.
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// γ/2π for ¹H (Hz/T), CODATA proton value rounded to 6 figures.
pub const GAMMA_1H_HZ_PER_T: f64 = 42.5775e6;

/// Rotational temperature Θ = ħ²/(2Ik) of H₂ (K).
pub const THETA_ROT_H2_K: f64 = 87.6;
