//! Two-spin-½ density-matrix simulator for parahydrogen-derived initial states.
//!
//! The crate covers the whole chain from state preparation to certification:
//!
//! * [`state`]: density matrices in the Zeeman product basis, named states,
//!   product-operator and Bell-basis views, state metrics and JSON dumps.
//! * [`channel`]: completely-positive trace-preserving maps (hard and
//!   selective pulses, free evolution, gradient dephasing, relaxation) and
//!   ordered channel programs such as the filtration sequence.
//! * [`seq`]: the `.pseq` pulse-sequence text format (parser, canonical
//!   formatter, compiler to channel programs).
//! * [`spectro`]: FID synthesis, Fourier transform, J-doubling, integration,
//!   enhancement calibration and multiplet-imbalance inversion.
//! * [`analysis`]: partial-transpose test, concurrence, entanglement of
//!   formation, effective temperature/field solvers, ortho/para statistics.
//! * [`repro`]: the fixed reproduction table driven by the CLI.
//!
//! The basis convention is fixed once for the whole crate: `|0⟩` is spin up
//! (the lower Zeeman level for positive γ) and two-spin kets are ordered
//! `|00⟩, |01⟩, |10⟩, |11⟩` with spin I first.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod channel;
pub mod consts;
pub mod error;
pub mod linalg;
pub mod random;
pub mod repro;
pub mod seq;
pub mod spectro;
pub mod state;

pub use analysis::{EntanglementReport, EquivalentConditions};
pub use channel::{Channel, ChannelKind, ChannelProgram, Coupling, Spin};
pub use error::{Error, Result};
pub use spectro::{CalibrationResult, Fid, Spectrum};
pub use state::{
    Axis, BellPopulations, DensityMatrix, NamedState, ProductOperatorCoeffs, SpinSystemParams,
    ThermalMode,
};

/// Complex scalar used throughout.
pub type C64 = nalgebra::Complex<f64>;
/// Dense 4×4 complex matrix in the Zeeman product basis.
pub type Mat4 = nalgebra::Matrix4<C64>;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/conventions.md")]
    mod conventions {}
    #[doc = include_str!("../../../book/src/states.md")]
    mod states {}
    #[doc = include_str!("../../../book/src/channels.md")]
    mod channels {}
    #[doc = include_str!("../../../book/src/sequences.md")]
    mod sequences {}
    #[doc = include_str!("../../../book/src/spectra.md")]
    mod spectra {}
    #[doc = include_str!("../../../book/src/entanglement.md")]
    mod entanglement {}
    #[doc = include_str!("../../../book/src/conditions.md")]
    mod conditions {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
