// Copyright 2026 qsteer contributors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form quasi-stationary states and charge-asymmetry predictions.
//!
//! Nothing here calls the adaptive integrator; cycle integrals use
//! composite Gauss–Legendre quadrature per waveform segment or the
//! fixed-step RK4 reference.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::environment::OhmicSpectrum;
use crate::error::Result;
use crate::frame::{AdiabaticFrame, SpectralTriple};
use crate::integrator::rk4_fixed;
use crate::observables::{charge_integrands, ChargeAccumulator};
use crate::sluice::{angle_rates, frame_at, segment_waveform, ControlPoint, SluiceParams, SEGMENTS};
use crate::state::{DensityMatrix2, StateRate};
use crate::units;

/// Which closed form produced a [`QuasiStationarySolution`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    AdiabaticGround,
    NonAdiabaticMixed,
    SecularZeroT,
    FiniteT,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiStationarySolution {
    pub rho_gg: f64,
    pub rho_ge: Complex64,
    pub regime: Regime,
    /// Reasons the formula may be outside its regime of validity.
    pub warnings: Vec<String>,
}

impl QuasiStationarySolution {
    fn new(rho_gg: f64, rho_ge: Complex64, regime: Regime) -> Self {
        Self {
            rho_gg,
            rho_ge,
            regime,
            warnings: Vec::new(),
        }
    }

    pub fn state(&self) -> DensityMatrix2 {
        DensityMatrix2::new(self.rho_gg, self.rho_ge)
    }
}

/// Adiabatic ground state: ρ_gg = 1, ρ_ge = −w_ge/ω0.
pub fn qs_ideal(frame: &AdiabaticFrame) -> QuasiStationarySolution {
    QuasiStationarySolution::new(1.0, -frame.w_ge() / frame.omega0, Regime::AdiabaticGround)
}

/// Smallest ħω0/k_BT for which the exponential expansion is advertised.
pub const FINITE_T_MIN_RATIO: f64 = 2.0;

/// Low-temperature quasi-stationary state:
/// ρ_gg = 1 − e^{−x}, ρ_ge = −(w_ge/ω0)(1 − 2e^{−x}), x = ħω0/k_BT.
pub fn qs_finite_t(frame: &AdiabaticFrame, temp_kelvin: f64) -> QuasiStationarySolution {
    let x = frame.omega0 / units::kelvin_to_rad_s(temp_kelvin);
    let b = (-x).exp();
    let mut s = QuasiStationarySolution::new(
        1.0 - b,
        -(frame.w_ge() / frame.omega0) * (1.0 - 2.0 * b),
        Regime::FiniteT,
    );
    if x < FINITE_T_MIN_RATIO {
        s.warnings.push(format!(
            "hbar*omega0/kT = {x:.3} < {FINITE_T_MIN_RATIO}: excitation rates are not exponentially small"
        ));
    }
    s
}

/// Detailed-balance population Γ↓/(Γ↓ + Γ↑).
pub fn bloch_fixed_point(frame: &AdiabaticFrame, sp: &SpectralTriple) -> f64 {
    let down = sp.gamma_down(frame);
    let up = sp.gamma_up(frame);
    down / (down + up)
}

/// Secular decay rate Γ = S(ω0)|m2|² + 4S(0)m1².
pub fn secular_gamma(frame: &AdiabaticFrame, sp: &SpectralTriple) -> f64 {
    sp.s_plus * frame.m2().norm_sqr() + 4.0 * sp.s_zero * frame.m1 * frame.m1
}

/// Zero-temperature secular state: ρ_ge = −2i w_ge/(2iω0 − Γ).
pub fn qs_secular_zero_t(frame: &AdiabaticFrame, sp: &SpectralTriple) -> QuasiStationarySolution {
    let i = Complex64::i();
    let gamma = secular_gamma(frame, sp);
    let mut s = QuasiStationarySolution::new(
        1.0,
        -2.0 * i * frame.w_ge() / (2.0 * i * frame.omega0 - gamma),
        Regime::SecularZeroT,
    );
    if sp.s_minus != 0.0 {
        s.warnings.push("spectrum has an excitation channel; formula assumes T = 0".into());
    }
    s
}

/// Undriven Bloch–Redfield equation −i[H, ρ] − [Y, Λρ − ρΛ†] assembled from
/// explicit 2×2 matrices, Λ_kl = Y_kl S(E_l − E_k)/2. Independent of the
/// term-by-term master equation; the drive (w) is ignored.
pub fn redfield_static(frame: &AdiabaticFrame, sp: &SpectralTriple, rho: &DensityMatrix2) -> StateRate {
    type M = [[Complex64; 2]; 2];
    let c = |x: f64| Complex64::new(x, 0.0);
    let mul = |a: &M, b: &M| -> M {
        let mut o = [[c(0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    o[i][j] += a[i][k] * b[k][j];
                }
            }
        }
        o
    };
    let dag = |a: &M| -> M { [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]] };
    let sub = |a: &M, b: &M| -> M {
        [[a[0][0] - b[0][0], a[0][1] - b[0][1]], [a[1][0] - b[1][0], a[1][1] - b[1][1]]]
    };
    let m2 = frame.m2();
    let y: M = [[c(frame.m1), m2], [m2.conj(), c(-frame.m1)]];
    let lam: M = [
        [c(frame.m1 * sp.s_zero / 2.0), m2 * sp.s_plus / 2.0],
        [m2.conj() * sp.s_minus / 2.0, c(-frame.m1 * sp.s_zero / 2.0)],
    ];
    let h: M = [[c(-frame.omega0 / 2.0), c(0.0)], [c(0.0), c(frame.omega0 / 2.0)]];
    let r = rho.to_matrix();
    let x = sub(&mul(&lam, &r), &mul(&r, &dag(&lam)));
    let diss = sub(&mul(&x, &y), &mul(&y, &x));
    let comm = sub(&mul(&h, &r), &mul(&r, &h));
    let i = Complex64::i();
    StateRate {
        d_gg: (-i * comm[0][0] + diss[0][0]).re,
        d_ge: -i * comm[0][1] + diss[0][1],
    }
}

/// Fully mixed state reached under fast unitary driving.
pub fn qs_nonadiabatic() -> QuasiStationarySolution {
    QuasiStationarySolution::new(0.5, Complex64::new(0.0, 0.0), Regime::NonAdiabaticMixed)
}

/// Difference between the non-secular and secular zero-T coherences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecularCorrection {
    /// δρ = ρ_ge − ρ_ge^sec.
    pub delta_rho: Complex64,
    pub gamma_rate: f64,
}

pub fn secular_correction(frame: &AdiabaticFrame, sp: &SpectralTriple) -> SecularCorrection {
    SecularCorrection {
        delta_rho: qs_ideal(frame).rho_ge - qs_secular_zero_t(frame, sp).rho_ge,
        gamma_rate: secular_gamma(frame, sp),
    }
}

/// Weak-damping expansion −(w_ge/ω0)(1 − iΓ/2ω0 − Γ²/4ω0²).
pub fn secular_expansion(frame: &AdiabaticFrame, sp: &SpectralTriple) -> Complex64 {
    let x = secular_gamma(frame, sp) / frame.omega0;
    -(frame.w_ge() / frame.omega0) * Complex64::new(1.0 - 0.25 * x * x, -0.5 * x)
}

// 8-point Gauss–Legendre rule on [−1, 1].
const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Subintervals per segment of the composite rule.
pub const DEFAULT_PANELS: usize = 512;

/// ∫ over one cycle of `f(frame, cp)`, segment by segment.
pub fn cycle_quadrature<F>(params: &SluiceParams, panels: usize, mut f: F) -> Result<f64>
where
    F: FnMut(&AdiabaticFrame, &ControlPoint) -> f64,
{
    let dur = params.segment_duration();
    let h = dur / panels as f64;
    let mut total = 0.0;
    for seg in 0..SEGMENTS {
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * h;
            for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
                for s in [-1.0, 1.0] {
                    let cp = segment_waveform(params, seg, mid + s * x * 0.5 * h);
                    let frame = frame_at(params, &cp)?;
                    total += w * 0.5 * h * f(&frame, &cp);
                }
            }
        }
    }
    Ok(total)
}

/// Charges obtained by feeding a prescribed state ρ(frame) into the current
/// integrands, integrated with fixed-step RK4 (`steps` per segment).
pub fn prescribed_state_charge<F>(params: &SluiceParams, steps: usize, state: F) -> Result<ChargeAccumulator>
where
    F: Fn(&AdiabaticFrame) -> DensityMatrix2,
{
    let dur = params.segment_duration();
    let mut q = [0.0, 0.0];
    for seg in 0..SEGMENTS {
        q = rk4_fixed(
            |t, _: &[f64; 2]| {
                let cp = segment_waveform(params, seg, t);
                let frame = frame_at(params, &cp)?;
                let (l, r) = charge_integrands(&frame, &cp, params, &state(&frame));
                Ok([l, r])
            },
            0.0,
            dur,
            q,
            steps,
        )?;
    }
    Ok(ChargeAccumulator {
        q_left: q[0],
        q_right: q[1],
    })
}

/// Charge pumped per cycle by the ideal adiabatic ground state.
pub fn ideal_pumped_charge(params: &SluiceParams, steps: usize) -> Result<ChargeAccumulator> {
    prescribed_state_charge(params, steps, |f| qs_ideal(f).state())
}

/// Same for the adiabatic excited state (ρ_gg = 0, ρ_ge = +w_ge/ω0).
pub fn excited_pumped_charge(params: &SluiceParams, steps: usize) -> Result<ChargeAccumulator> {
    prescribed_state_charge(params, steps, |f| DensityMatrix2::new(0.0, f.w_ge() / f.omega0))
}

/// ΔQ obtained by inserting the exact zero-T secular coherence into the two
/// current integrands: ∫(dQ_L/dt − dQ_R/dt) dt.
pub fn delta_q_secular_state(params: &SluiceParams, spec: &OhmicSpectrum, panels: usize) -> Result<f64> {
    let mut err = None;
    let v = cycle_quadrature(params, panels, |frame, cp| {
        let sp = match spec.triple(frame.omega0) {
            Ok(sp) => sp,
            Err(e) => {
                err.get_or_insert(e);
                return 0.0;
            }
        };
        let rho = qs_secular_zero_t(frame, &sp).state();
        let (l, r) = charge_integrands(frame, cp, params, &rho);
        l - r
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// The three pieces of the explicit ΔQ integrand, each already integrated
/// over one cycle (units of 2e).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExplicitDeltaQ {
    /// −γ̇ part.
    pub gamma_term: f64,
    /// η̇ part depending on η only (exact differential).
    pub eta_only_term: f64,
    /// Remaining η̇ part.
    pub eta_mixed_term: f64,
}

impl ExplicitDeltaQ {
    pub fn total(&self) -> f64 {
        self.gamma_term + self.eta_only_term + self.eta_mixed_term
    }
}

/// Cycle integral of the explicit charge asymmetry
///
/// ΔQ/2e = g² ∫ dt [ −γ̇ (½R̃(1−η²)² + (1−η²)^{3/2} S0 η²/(2E12))
///          + η̇ g² (½R̃²(1−η²)² − (η²−1) S0² η⁴/(2E12²) + R̃(1−η²)^{3/2} S0 η²/E12) ]
///
/// with ħ = 1, R̃ = e²R/ħ and S0 = S(0) in rad/s.
pub fn delta_q_explicit(params: &SluiceParams, spec: &OhmicSpectrum, panels: usize) -> Result<ExplicitDeltaQ> {
    let g2 = params.g * params.g;
    let r = spec.charge_factor * units::HBAR * spec.r;
    let s0 = spec.spectrum(0.0);
    let mut out = ExplicitDeltaQ {
        gamma_term: 0.0,
        eta_only_term: 0.0,
        eta_mixed_term: 0.0,
    };
    out.gamma_term = cycle_quadrature(params, panels, |f, _| {
        let (gamma_dot, _) = angle_rates(f);
        let c = 1.0 - f.eta * f.eta;
        -g2 * gamma_dot * (0.5 * r * c * c + c.powf(1.5) * s0 * f.eta * f.eta / (2.0 * f.e12))
    })?;
    out.eta_only_term = cycle_quadrature(params, panels, |f, _| {
        let (_, eta_dot) = angle_rates(f);
        let c = 1.0 - f.eta * f.eta;
        g2 * eta_dot * g2 * 0.5 * r * r * c * c
    })?;
    out.eta_mixed_term = cycle_quadrature(params, panels, |f, _| {
        let (_, eta_dot) = angle_rates(f);
        let eta2 = f.eta * f.eta;
        let c = 1.0 - eta2;
        g2 * eta_dot
            * g2
            * (-(eta2 - 1.0) * s0 * s0 * eta2 * eta2 / (2.0 * f.e12 * f.e12)
                + r * c.powf(1.5) * s0 * eta2 / f.e12)
    })?;
    Ok(out)
}

/// The four closed-form leading contributions to ΔQ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeadingTerms {
    pub a1: f64,
    pub a2: f64,
    pub a4: f64,
    pub a5: f64,
    pub warnings: Vec<String>,
}

impl LeadingTerms {
    pub fn total(&self) -> f64 {
        self.a1 + self.a2 + self.a4 + self.a5
    }
}

/// Ratio treated as "much smaller" in the regime checks.
pub const REGIME_RATIO: f64 = 0.1;

/// A1, A2, A4, A5 in natural units (ħ = 1, energies in rad/s, R̃ = e²R/ħ,
/// S0 = S(0) in rad/s), transcribed term by term.
pub fn delta_q_leading_terms(params: &SluiceParams, spec: &OhmicSpectrum) -> LeadingTerms {
    let p = params;
    let g2 = p.g * p.g;
    let r = spec.charge_factor * units::HBAR * spec.r;
    let s0 = spec.spectrum(0.0);
    let (m, big) = (p.dng_min, p.dng_max);
    let d = p.e_c * m * big;

    let a1 = (p.j_l_min * p.j_r_max + p.j_r_min * p.j_l_max) * (big.powi(3) - m.abs().powi(3)) * g2 * s0
        / (16.0 * d.powi(3));
    let a2 = (p.j_r_min * p.j_l_max.powi(3) + p.j_l_min * p.j_r_max.powi(3)) * (big.powi(4) - m.powi(4)) * g2 * r
        / (96.0 * d.powi(4));
    let a4 = (p.j_l_max.powi(2) - p.j_r_max.powi(2)) * (m.powi(4) + big.powi(4)) * g2 * g2 * s0 * s0
        / (64.0 * d.powi(4));
    let a5 = (p.j_l_max.powi(4) - p.j_r_max.powi(4)) * (m.powi(5) + big.abs().powi(5)) * g2 * g2 * s0 * s0
        / (128.0 * d.powi(5));

    let mut warnings = Vec::new();
    if (p.phi - std::f64::consts::FRAC_PI_2).abs() > 1e-9 {
        warnings.push(format!("phi = {} differs from pi/2", p.phi));
    }
    for (name, lo, hi) in [("J_L", p.j_l_min, p.j_l_max), ("J_R", p.j_r_min, p.j_r_max)] {
        if lo / hi > REGIME_RATIO {
            warnings.push(format!("{name}^m/{name}^M = {:.3} is not small", lo / hi));
        }
        if hi / p.e_c > REGIME_RATIO {
            warnings.push(format!("{name}^M/E_C = {:.3} is not small", hi / p.e_c));
        }
    }
    let j_over_ec = p.j_l_max.max(p.j_r_max) / p.e_c;
    for (name, v) in [("dng_max", big), ("dng_min", m)] {
        if j_over_ec / v.abs() > REGIME_RATIO {
            warnings.push(format!("|{name}| = {:.3} is not large compared with J^M/E_C = {j_over_ec:.3}", v.abs()));
        }
    }
    LeadingTerms {
        a1,
        a2,
        a4,
        a5,
        warnings,
    }
}
