//! Small dense helpers for 2×2 and 4×4 complex matrices.

use nalgebra::{Matrix2, Vector4};

use crate::{Mat4, C64};

pub type Mat2 = Matrix2<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn sigma_x() -> Mat2 {
    Mat2::new(ZERO, ONE, ONE, ZERO)
}

pub fn sigma_y() -> Mat2 {
    Mat2::new(ZERO, -I, I, ZERO)
}

pub fn sigma_z() -> Mat2 {
    Mat2::new(ONE, ZERO, ZERO, -ONE)
}

/// Kronecker product `a ⊗ b`, spin I (first factor) is the high index bit.
pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    Mat4::from_fn(|r, col| a[(r / 2, col / 2)] * b[(r % 2, col % 2)])
}

pub fn dagger(m: &Mat4) -> Mat4 {
    m.adjoint()
}

/// Largest absolute entry of `m − m†`.
pub fn hermiticity_defect(m: &Mat4) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigen-decomposition of a Hermitian matrix. Only the Hermitian part of `m`
/// is used. Eigenvalues are returned in ascending order with matching columns.
pub fn hermitian_eigen(m: &Mat4) -> (Vector4<f64>, Mat4) {
    let h = (m + m.adjoint()) * c(0.5);
    let eig = h.symmetric_eigen();
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = Vector4::from_fn(|i, _| eig.eigenvalues[order[i]]);
    let vectors = Mat4::from_fn(|r, col| eig.eigenvectors[(r, order[col])]);
    (values, vectors)
}

pub fn min_eigenvalue(m: &Mat4) -> f64 {
    hermitian_eigen(m).0[0]
}

/// Applies `f` to the eigenvalues of a Hermitian matrix.
pub fn hermitian_map(m: &Mat4, f: impl Fn(f64) -> f64) -> Mat4 {
    let (values, vectors) = hermitian_eigen(m);
    let diag = Mat4::from_diagonal(&values.map(|v| c(f(v))));
    vectors * diag * vectors.adjoint()
}

/// Principal square root of a positive semidefinite Hermitian matrix;
/// negative round-off eigenvalues are clamped to zero.
pub fn psd_sqrt(m: &Mat4) -> Mat4 {
    hermitian_map(m, |v| v.max(0.0).sqrt())
}

/// `exp(−i·h·t)` for Hermitian `h`.
pub fn unitary_from_hamiltonian(h: &Mat4, t: f64) -> Mat4 {
    let (values, vectors) = hermitian_eigen(h);
    let diag = Mat4::from_diagonal(&values.map(|v| C64::from_polar(1.0, -v * t)));
    vectors * diag * vectors.adjoint()
}

/// Largest absolute entry of `u†u − 𝟙`.
pub fn unitarity_defect(u: &Mat4) -> f64 {
    (u.adjoint() * u - Mat4::identity())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &Mat4, b: &Mat4) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
