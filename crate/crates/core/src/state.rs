// Copyright 2026 qsteer contributors
// SPDX-License-Identifier: Apache-2.0

//! Reduced two-level density matrix in the adiabatic basis.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Default tolerance of the positivity monitor.
pub const DEFAULT_POS_TOL: f64 = 1e-6;

/// Density matrix of the two-level system in the instantaneous eigenbasis.
///
/// Only ρ_gg and ρ_ge are stored. ρ_ee = 1 − ρ_gg and ρ_eg = ρ_ge*, so the
/// representation cannot express a non-unit trace or a non-Hermitian matrix.
/// Positivity is *not* enforced; see [`DensityMatrix2::min_eigenvalue`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix2 {
    pub rho_gg: f64,
    pub rho_ge_re: f64,
    pub rho_ge_im: f64,
}

impl DensityMatrix2 {
    pub fn new(rho_gg: f64, rho_ge: Complex64) -> Self {
        Self {
            rho_gg,
            rho_ge_re: rho_ge.re,
            rho_ge_im: rho_ge.im,
        }
    }

    /// Pure instantaneous ground state.
    pub fn ground() -> Self {
        Self::new(1.0, Complex64::new(0.0, 0.0))
    }

    /// Pure instantaneous excited state.
    pub fn excited() -> Self {
        Self::new(0.0, Complex64::new(0.0, 0.0))
    }

    pub fn maximally_mixed() -> Self {
        Self::new(0.5, Complex64::new(0.0, 0.0))
    }

    pub fn rho_ee(&self) -> f64 {
        1.0 - self.rho_gg
    }

    pub fn rho_ge(&self) -> Complex64 {
        Complex64::new(self.rho_ge_re, self.rho_ge_im)
    }

    pub fn rho_eg(&self) -> Complex64 {
        self.rho_ge().conj()
    }

    /// Tr ρ² = ρ_gg² + ρ_ee² + 2|ρ_ge|².
    pub fn purity(&self) -> f64 {
        let ee = self.rho_ee();
        self.rho_gg * self.rho_gg + ee * ee + 2.0 * self.rho_ge().norm_sqr()
    }

    /// Eigenvalues (ascending) of the reconstructed Hermitian 2×2 matrix.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let z = self.rho_gg - 0.5;
        let r = (z * z + self.rho_ge().norm_sqr()).sqrt();
        [0.5 - r, 0.5 + r]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Amount by which the state leaves the physical set, or `None` if it
    /// lies within `pos_tol` of it.
    pub fn positivity_violation(&self, pos_tol: f64) -> Option<f64> {
        let lam = self.min_eigenvalue();
        (lam < -pos_tol).then_some(-lam)
    }

    pub fn is_finite(&self) -> bool {
        self.rho_gg.is_finite() && self.rho_ge_re.is_finite() && self.rho_ge_im.is_finite()
    }

    /// Full 2×2 matrix in the ordered basis (g, e).
    pub fn to_matrix(&self) -> [[Complex64; 2]; 2] {
        let ge = self.rho_ge();
        [
            [Complex64::new(self.rho_gg, 0.0), ge],
            [ge.conj(), Complex64::new(self.rho_ee(), 0.0)],
        ]
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.rho_gg, self.rho_ge_re, self.rho_ge_im]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self {
            rho_gg: a[0],
            rho_ge_re: a[1],
            rho_ge_im: a[2],
        }
    }

    /// Component-wise maximum distance.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.rho_gg - other.rho_gg)
            .abs()
            .max((self.rho_ge_re - other.rho_ge_re).abs())
            .max((self.rho_ge_im - other.rho_ge_im).abs())
    }
}

impl Default for DensityMatrix2 {
    fn default() -> Self {
        Self::ground()
    }
}

/// Time derivative of a [`DensityMatrix2`]: (dρ_gg/dt, dρ_ge/dt).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateRate {
    pub d_gg: f64,
    pub d_ge: Complex64,
}

impl StateRate {
    pub fn to_array(&self) -> [f64; 3] {
        [self.d_gg, self.d_ge.re, self.d_ge.im]
    }

    pub fn norm(&self) -> f64 {
        (self.d_gg * self.d_gg + self.d_ge.norm_sqr()).sqrt()
    }
}

/// A positivity-monitor event recorded during integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositivityViolation {
    pub t: f64,
    pub cycle: usize,
    pub min_eigenvalue: f64,
}
