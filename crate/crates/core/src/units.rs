// Copyright 2026 qsteer contributors
// SPDX-License-Identifier: Apache-2.0

//! Physical constants and boundary conversions.
//!
//! The dynamics run in units with ħ = 1: energies are angular frequencies in
//! rad/s, time is in seconds, and charge is counted in Cooper pairs (2e).
//! Everything arriving in kelvin, hertz, ohms or farads is converted here.

/// Reduced Planck constant, J·s (exact SI value).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Elementary charge, C (exact SI value).
pub const E_CHARGE: f64 = 1.602_176_634e-19;
/// Boltzmann constant, J/K (exact SI value).
pub const K_B: f64 = 1.380_649e-23;
/// Magnetic flux quantum h/(2e), Wb.
pub const FLUX_QUANTUM: f64 = std::f64::consts::PI * HBAR / E_CHARGE;

/// Energy expressed as a temperature (E/k_B in K) to an angular frequency.
pub fn kelvin_to_rad_s(kelvin: f64) -> f64 {
    K_B * kelvin / HBAR
}

/// Angular frequency back to an equivalent temperature in kelvin.
pub fn rad_s_to_kelvin(omega: f64) -> f64 {
    HBAR * omega / K_B
}

/// Ordinary frequency (Hz) to angular frequency (rad/s).
pub fn hz_to_rad_s(hz: f64) -> f64 {
    2.0 * std::f64::consts::PI * hz
}

/// Energy in joules to rad/s.
pub fn joule_to_rad_s(joule: f64) -> f64 {
    joule / HBAR
}

/// Resistance in units of ħ/e², i.e. e²R/ħ.
pub fn ohm_to_dimensionless(ohm: f64) -> f64 {
    E_CHARGE * E_CHARGE * ohm / HBAR
}

/// Factor turning a voltage noise spectrum (V²·s) into the rate-valued
/// spectrum seen by the two-level coupling: the electron charge of the
/// coupling operator is absorbed into the bath operator, and the ħ² of the
/// golden-rule rate is divided out.
pub const CHARGE_FACTOR: f64 = (E_CHARGE / HBAR) * (E_CHARGE / HBAR);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_kelvin_charging_energy_is_about_21_ghz() {
        let f = kelvin_to_rad_s(1.0) / (2.0 * std::f64::consts::PI);
        assert!((f / 1e9 - 20.84).abs() < 0.01, "{f}");
    }

    #[test]
    fn temperature_round_trip() {
        let t = 0.0317;
        assert!((rad_s_to_kelvin(kelvin_to_rad_s(t)) - t).abs() < 1e-15);
    }

    #[test]
    fn resistance_scale() {
        // ħ/e² ≈ 4108.24 Ω
        assert!((ohm_to_dimensionless(4108.236) - 1.0).abs() < 1e-5);
    }
}
