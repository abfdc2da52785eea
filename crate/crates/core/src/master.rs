// Copyright 2026 qsteer contributors
// SPDX-License-Identifier: Apache-2.0

//! Right-hand sides of the two-level master equations in the adiabatic basis.
//!
//! All four variants are evaluated by one routine that switches groups of
//! terms on and off, so the reductions between variants hold bit-for-bit:
//!
//! | group                                  | Full | Secular | Bloch | Unitary |
//! |----------------------------------------|------|---------|-------|---------|
//! | basis-rotation drive (w)               |  ✓   |   ✓     |       |   ✓     |
//! | precession iω0ρ_ge                     |  ✓   |   ✓     |  ✓    |   ✓     |
//! | relaxation/excitation of ρ_gg          |  ✓   |   ✓     |  ✓    |         |
//! | secular coherence decay Γ_ge           |      |   ✓     |  ✓    |         |
//! | non-secular Redfield terms             |  ✓   |         |       |         |
//! | drive × environment, population        |  ✓   |   ✓     |       |         |
//! | drive × environment, coherence (full)  |  ✓   |         |       |         |
//! | drive × environment, coherence (sec.)  |      |   ✓     |       |         |
//!
//! The Lamb shift is not included.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{AdiabaticFrame, SpectralTriple};
use crate::state::{DensityMatrix2, StateRate};

/// Which master equation drives the state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhsVariant {
    /// Drive, environment and their cross terms, non-secular terms kept.
    Full,
    /// Same, with the secular approximation.
    Secular,
    /// Static-basis relaxation and dephasing only.
    Bloch,
    /// Environment-free von Neumann evolution in the moving basis.
    Unitary,
}

impl RhsVariant {
    pub const ALL: [RhsVariant; 4] = [
        RhsVariant::Full,
        RhsVariant::Secular,
        RhsVariant::Bloch,
        RhsVariant::Unitary,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            RhsVariant::Full => "full",
            RhsVariant::Secular => "secular",
            RhsVariant::Bloch => "bloch",
            RhsVariant::Unitary => "unitary",
        }
    }

    fn terms(self) -> Terms {
        match self {
            RhsVariant::Full => Terms {
                drive: true,
                population_env: true,
                secular_decay: false,
                nonsecular: true,
                cross_population: true,
                cross_full: true,
                cross_secular: false,
            },
            RhsVariant::Secular => Terms {
                drive: true,
                population_env: true,
                secular_decay: true,
                nonsecular: false,
                cross_population: true,
                cross_full: false,
                cross_secular: true,
            },
            RhsVariant::Bloch => Terms {
                drive: false,
                population_env: true,
                secular_decay: true,
                nonsecular: false,
                cross_population: false,
                cross_full: false,
                cross_secular: false,
            },
            RhsVariant::Unitary => Terms {
                drive: true,
                population_env: false,
                secular_decay: false,
                nonsecular: false,
                cross_population: false,
                cross_full: false,
                cross_secular: false,
            },
        }
    }

    fn needs_gap(self) -> bool {
        matches!(self, RhsVariant::Full | RhsVariant::Secular)
    }
}

impl std::str::FromStr for RhsVariant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(RhsVariant::Full),
            "secular" => Ok(RhsVariant::Secular),
            "bloch" => Ok(RhsVariant::Bloch),
            "unitary" => Ok(RhsVariant::Unitary),
            other => Err(format!("unknown master-equation variant `{other}`")),
        }
    }
}

impl std::fmt::Display for RhsVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy)]
struct Terms {
    drive: bool,
    population_env: bool,
    secular_decay: bool,
    nonsecular: bool,
    cross_population: bool,
    cross_full: bool,
    cross_secular: bool,
}

/// Evaluate the selected master equation.
pub fn rhs(
    variant: RhsVariant,
    frame: &AdiabaticFrame,
    sp: &SpectralTriple,
    rho: &DensityMatrix2,
) -> Result<StateRate> {
    if variant.needs_gap() && frame.omega0 == 0.0 {
        return Err(Error::DegenerateGap { omega0: frame.omega0 });
    }
    Ok(evaluate(variant.terms(), frame, sp, rho))
}

/// Full non-secular master equation including the drive–environment cross terms.
pub fn rhs_full(frame: &AdiabaticFrame, sp: &SpectralTriple, rho: &DensityMatrix2) -> Result<StateRate> {
    rhs(RhsVariant::Full, frame, sp, rho)
}

/// Master equation in the secular approximation.
pub fn rhs_secular(frame: &AdiabaticFrame, sp: &SpectralTriple, rho: &DensityMatrix2) -> Result<StateRate> {
    rhs(RhsVariant::Secular, frame, sp, rho)
}

/// Bloch equations; the drive elements of `frame` are ignored.
pub fn rhs_bloch(frame: &AdiabaticFrame, sp: &SpectralTriple, rho: &DensityMatrix2) -> StateRate {
    evaluate(RhsVariant::Bloch.terms(), frame, sp, rho)
}

/// von Neumann equation in the moving basis.
pub fn rhs_unitary(frame: &AdiabaticFrame, rho: &DensityMatrix2) -> StateRate {
    evaluate(RhsVariant::Unitary.terms(), frame, &SpectralTriple::ZERO, rho)
}

/// Stationary state of a frozen-frame equation.
///
/// Every variant is affine in (ρ_gg, Re ρ_ge, Im ρ_ge), so the root is found
/// by one 3×3 linear solve. `None` when the system is singular (e.g. the
/// unitary variant without drive has a family of fixed points).
pub fn frozen_fixed_point(
    variant: RhsVariant,
    frame: &AdiabaticFrame,
    sp: &SpectralTriple,
) -> Result<Option<DensityMatrix2>> {
    let f = |x: [f64; 3]| -> Result<[f64; 3]> { Ok(rhs(variant, frame, sp, &DensityMatrix2::from_array(x))?.to_array()) };
    let c = f([0.0; 3])?;
    let mut a = [[0.0; 4]; 3];
    for j in 0..3 {
        let mut e = [0.0; 3];
        e[j] = 1.0;
        let col = f(e)?;
        for i in 0..3 {
            a[i][j] = col[i] - c[i];
        }
    }
    for i in 0..3 {
        a[i][3] = -c[i];
    }
    Ok(solve3(a).map(DensityMatrix2::from_array))
}

/// Gaussian elimination with partial pivoting on an augmented 3×4 matrix.
fn solve3(mut a: [[f64; 4]; 3]) -> Option<[f64; 3]> {
    let scale = a.iter().flat_map(|r| r[..3].iter()).fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return None;
    }
    for k in 0..3 {
        let p = (k..3).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[p][k].abs() <= 1e-14 * scale {
            return None;
        }
        a.swap(k, p);
        for i in k + 1..3 {
            let m = a[i][k] / a[k][k];
            for j in k..4 {
                a[i][j] -= m * a[k][j];
            }
        }
    }
    let mut x = [0.0; 3];
    for k in (0..3).rev() {
        let s: f64 = (k + 1..3).map(|j| a[k][j] * x[j]).sum();
        x[k] = (a[k][3] - s) / a[k][k];
    }
    Some(x)
}

fn evaluate(t: Terms, frame: &AdiabaticFrame, sp: &SpectralTriple, rho: &DensityMatrix2) -> StateRate {
    let i = Complex64::i();
    let w0 = frame.omega0;
    let m1 = frame.m1;
    let m2 = frame.m2();
    let m2sq = m2.norm_sqr();
    let w = frame.w_ge();
    let r = rho.rho_ge();
    let gg = rho.rho_gg;
    let (sp_, sm, s0) = (sp.s_plus, sp.s_minus, sp.s_zero);
    let s_sum = sm + sp_;

    let mut d_gg = 0.0;
    let mut d_ge = Complex64::new(0.0, 0.0);

    if t.drive {
        d_gg += -2.0 * (w.conj() * r).im;
        d_ge += i * w * (2.0 * gg - 1.0) + i * (frame.w_ee - frame.w_gg) * r;
    }
    d_ge += i * w0 * r;

    if t.population_env {
        // Γ↓ ρ_ee − Γ↑ ρ_gg
        d_gg += sp_ * m2sq - s_sum * m2sq * gg;
    }
    if t.secular_decay {
        let gamma_ge = 0.5 * sm * m2sq + 0.5 * sp_ * m2sq + 2.0 * s0 * m1 * m1;
        d_ge += -gamma_ge * r;
    }

    // Re(m2* x) for x = ρ_ge and x = w_ge
    let proj_rho = m2.im * r.im + m2.re * r.re;
    let proj_w = m2.im * w.im + m2.re * w.re;

    if t.nonsecular {
        d_gg += 2.0 * proj_rho * s0 * m1;
        d_ge += -sp_ * m1 * m2 + s_sum * m1 * m2 * gg;
        d_ge += -2.0 * s0 * m1 * m1 * r;
        d_ge += -i * s_sum * m2 * (m2.re * r.im - m2.im * r.re);
    }

    if t.cross_population || t.cross_full || t.cross_secular {
        let a = (2.0 * s0 - sm - sp_) / w0;
        let b = (s0 - sp_) / w0;
        let c = (sm - sp_) / w0;

        if t.cross_full {
            d_gg += -2.0 * a * proj_w * proj_rho;
        }
        if t.cross_population {
            d_gg += 2.0 * a * m1 * proj_w * gg;
            d_gg += -2.0 * b * m1 * proj_w;
        }
        if t.cross_full {
            d_ge += -2.0 * a * m1 * m1 * w * gg;
            d_ge += 2.0 * b * m1 * m1 * w;
            d_ge += -i * m2 * c * (m2.im * w.re - m2.re * w.im);
            d_ge += -2.0 * a * m1 * (i * m2 * (w.im * r.re - w.re * r.im) - proj_w * r);
        }
        if t.cross_secular {
            d_ge += a * (2.0 * m2 * w.conj() + w * m2.conj()) * m1 * r;
        }
    }

    StateRate { d_gg, d_ge }
}
