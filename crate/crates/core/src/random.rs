//! Seeded random states for property checks and noise.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::c;
use crate::state::DensityMatrix;
use crate::{Mat4, C64};

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian sample (unit variance per component).
pub fn complex_normal<R: rand::Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// `A·A†/tr(A·A†)` for a Ginibre matrix `A`.
pub fn random_state<R: rand::Rng + ?Sized>(rng: &mut R) -> DensityMatrix {
    let a = Mat4::from_fn(|_, _| complex_normal(rng));
    let m = a * a.adjoint();
    let tr = m.trace().re;
    // Hermitize to remove round-off asymmetry from the product
    let m = (m + m.adjoint()) * c(0.5 / tr);
    DensityMatrix::new(m).expect("Ginibre construction yields a valid state")
}

/// Haar-ish random pure state.
pub fn random_pure_state<R: rand::Rng + ?Sized>(rng: &mut R) -> DensityMatrix {
    let ket = nalgebra::Vector4::from_fn(|_, _| complex_normal(rng));
    DensityMatrix::from_ket(&ket).expect("non-zero ket")
}
