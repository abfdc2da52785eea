// Copyright 2026 qsteer contributors
// SPDX-License-Identifier: Apache-2.0

//! Noise spectra of the gate-voltage environment.
//!
//! Spectra returned here are already multiplied by [`units::CHARGE_FACTOR`],
//! so S(ω)·|m|² is a rate in 1/s.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::frame::SpectralTriple;
use crate::units::{self, E_CHARGE, HBAR, K_B};

/// Default distance from a half flux quantum below which the SQUID
/// inductance is treated as divergent.
pub const DEFAULT_FLUX_GUARD: f64 = 1e-6;

/// Thermal ohmic voltage noise of a resistor,
/// S(ω) = 2ħωR / (1 − e^{−ħω/k_BT}), with a separate pure-dephasing level
/// S(0) = 2 k_B T₀ R.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OhmicSpectrum {
    /// Resistance, Ω.
    pub r: f64,
    /// Bath temperature, K.
    pub temp: f64,
    /// Effective dephasing temperature, K.
    pub t0: f64,
    /// Multiplier from V²·s to the rate-valued spectrum.
    pub charge_factor: f64,
}

impl OhmicSpectrum {
    pub fn new(r: f64, temp: f64, t0: f64) -> Result<Self> {
        let s = Self {
            r,
            temp,
            t0,
            charge_factor: units::CHARGE_FACTOR,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(invalid("r", "resistance must be positive"));
        }
        if !(self.temp >= 0.0 && self.temp.is_finite()) {
            return Err(invalid("temp", "temperature must be >= 0"));
        }
        if !(self.t0 > 0.0 && self.t0.is_finite()) {
            return Err(invalid("t0", "dephasing temperature must be positive"));
        }
        if !(self.charge_factor > 0.0) {
            return Err(invalid("charge_factor", "must be positive"));
        }
        Ok(())
    }

    /// Boltzmann factor e^{−ħω/k_BT} for ω ≥ 0 (exactly 0 at T = 0).
    pub fn boltzmann(&self, omega: f64) -> f64 {
        if self.temp == 0.0 {
            0.0
        } else {
            (-HBAR * omega / (K_B * self.temp)).exp()
        }
    }

    /// S(ω) for any real ω. At ω = 0 this is the dephasing level 2k_BT₀R.
    pub fn spectrum(&self, omega: f64) -> f64 {
        if omega == 0.0 {
            return self.charge_factor * 2.0 * K_B * self.t0 * self.r;
        }
        let w = omega.abs();
        let s_pos = if self.temp == 0.0 {
            2.0 * HBAR * w * self.r
        } else {
            let x = HBAR * w / (K_B * self.temp);
            // 1 − e^{−x} without cancellation for small x
            2.0 * HBAR * w * self.r / (-(-x).exp_m1())
        };
        let s_pos = self.charge_factor * s_pos;
        if omega > 0.0 {
            s_pos
        } else {
            s_pos * self.boltzmann(w)
        }
    }

    /// {S(ω0), S(−ω0), S(0)}.
    pub fn triple(&self, omega0: f64) -> Result<SpectralTriple> {
        if !(omega0 > 0.0) {
            return Err(Error::DegenerateGap { omega0 });
        }
        let s_plus = self.spectrum(omega0);
        Ok(SpectralTriple {
            s_plus,
            s_minus: s_plus * self.boltzmann(omega0),
            s_zero: self.spectrum(0.0),
        })
    }
}

/// Bare-spectrum convenience wrapper.
pub fn ohmic_triple(spec: &OhmicSpectrum, omega0: f64) -> Result<SpectralTriple> {
    spec.triple(omega0)
}

/// A resistor coupled to the island through an array of `m_squids`
/// flux-tunable SQUIDs (each a parallel R_S, L(φ), C_S cell) in series with
/// the coupling capacitor C_E.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngineeredEnvironment {
    pub base: OhmicSpectrum,
    pub m_squids: u32,
    /// Coupling capacitance, F.
    pub c_e: f64,
    /// SQUID shunt capacitance, F.
    pub c_s: f64,
    /// SQUID shunt resistance, Ω.
    pub r_s: f64,
    /// Maximum SQUID critical current, A.
    pub i_c: f64,
    /// Flux through each SQUID in units of Φ₀.
    pub flux: f64,
    pub flux_guard: f64,
}

impl EngineeredEnvironment {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        for (name, v) in [("c_e", self.c_e), ("c_s", self.c_s), ("r_s", self.r_s), ("i_c", self.i_c)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, "must be positive"));
            }
        }
        if !self.flux.is_finite() {
            return Err(invalid("flux", "must be finite"));
        }
        Ok(())
    }

    pub fn with_flux(self, flux: f64) -> Self {
        Self { flux, ..self }
    }

    /// L₀ = ħ/(2π e I_C).
    pub fn l0(&self) -> f64 {
        HBAR / (2.0 * PI * E_CHARGE * self.i_c)
    }

    /// L(φ) = L₀ / |cos(πφ/Φ₀)|. The modulus keeps the Josephson inductance
    /// positive and makes the spectrum Φ₀-periodic in flux.
    pub fn inductance(&self) -> Result<f64> {
        let c = (PI * self.flux).cos().abs();
        if c.abs() <= self.flux_guard {
            return Err(Error::DivergingInductance {
                flux: self.flux,
                guard: self.flux_guard,
            });
        }
        Ok(self.l0() / c)
    }

    /// Impedance of one parallel R_S–L–C_S cell.
    pub fn z_squid(&self, omega: f64) -> Result<Complex64> {
        let l = self.inductance()?;
        let i = Complex64::i();
        let num = i * l * omega * self.r_s;
        let den = i * l * omega + self.r_s * (1.0 - l * omega * omega * self.c_s);
        Ok(num / den)
    }

    /// |Z_CE / Z_tot|² with Z_tot = R + Z_CE + m Z_RLC.
    ///
    /// Written as 1/|1 + iωC_E (R + m Z_RLC)|², which stays finite at ω = 0.
    pub fn filter(&self, omega: f64) -> Result<f64> {
        let z_chain = self.base.r + self.m_squids as f64 * self.z_squid(omega)?;
        let d = Complex64::new(1.0, 0.0) + Complex64::i() * omega * self.c_e * z_chain;
        Ok(1.0 / d.norm_sqr())
    }

    /// S̃(ω, φ) = |Z_CE/Z_tot|² S(ω).
    pub fn spectrum(&self, omega: f64) -> Result<f64> {
        Ok(self.filter(omega)? * self.base.spectrum(omega))
    }

    /// Filtered triple. The filter is even in ω, so S(±ω0) share one factor.
    pub fn triple(&self, omega0: f64) -> Result<SpectralTriple> {
        let bare = self.base.triple(omega0)?;
        let k = self.filter(omega0)?;
        Ok(SpectralTriple {
            s_plus: k * bare.s_plus,
            s_minus: k * bare.s_minus,
            s_zero: self.filter(0.0)? * bare.s_zero,
        })
    }
}

/// Engineered-spectrum convenience wrapper.
pub fn engineered_spectrum(env: &EngineeredEnvironment, omega: f64) -> Result<f64> {
    env.spectrum(omega)
}

/// Which environment feeds the master equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectrumModel {
    /// No environment.
    None,
    Ohmic(OhmicSpectrum),
    Engineered(EngineeredEnvironment),
    /// A gap-independent triple (frozen-frame tests).
    Fixed(SpectralTriple),
}

impl SpectrumModel {
    pub fn triple(&self, omega0: f64) -> Result<SpectralTriple> {
        match self {
            SpectrumModel::None => Ok(SpectralTriple::ZERO),
            SpectrumModel::Ohmic(s) => s.triple(omega0),
            SpectrumModel::Engineered(e) => e.triple(omega0),
            SpectrumModel::Fixed(t) => Ok(*t),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SpectrumModel::None => Ok(()),
            SpectrumModel::Ohmic(s) => s.validate(),
            SpectrumModel::Engineered(e) => e.validate(),
            SpectrumModel::Fixed(t) => t.validate(),
        }
    }

    /// Bath temperature, K (0 where not applicable).
    pub fn temperature(&self) -> f64 {
        match self {
            SpectrumModel::Ohmic(s) => s.temp,
            SpectrumModel::Engineered(e) => e.base.temp,
            _ => 0.0,
        }
    }
}
