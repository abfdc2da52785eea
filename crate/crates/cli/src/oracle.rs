//! Standalone analytic predictions for a parameter snapshot.

use qsteer_core::dynamics::cycle_adiabaticity;
use qsteer_core::environment::{OhmicSpectrum, SpectrumModel};
use qsteer_core::oracles::{
    bloch_fixed_point, delta_q_explicit, delta_q_leading_terms, delta_q_secular_state, excited_pumped_charge,
    ideal_pumped_charge, qs_finite_t, qs_ideal, qs_secular_zero_t, DEFAULT_PANELS,
};
use qsteer_core::sluice::frame_at_time;
use serde_json::{json, Value};

use crate::config::PointParams;
use crate::error::ConfigError;

/// RK4 steps per cycle for the prescribed-state charge oracles.
const CHARGE_STEPS: usize = 60_000;

/// Cycle phases sampled by the quasi-stationary table.
const QS_SAMPLES: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OracleName {
    /// Charge pumped by the adiabatic ground state.
    IdealCharge,
    /// Charge pumped by the adiabatic excited state.
    ExcitedCharge,
    /// α(t) summary: ᾱ, α_max and the minimum gap.
    Adiabaticity,
    /// Closed-form quasi-stationary states sampled over the cycle.
    QuasiStationary,
    /// Secular charge asymmetry from the explicit cycle integral.
    DeltaQExplicit,
    /// Secular charge asymmetry from the exact secular state.
    DeltaQSecularState,
    /// The four closed-form leading contributions to the asymmetry.
    LeadingTerms,
}

fn ohmic(p: &PointParams) -> Result<OhmicSpectrum, ConfigError> {
    match p.spectra {
        SpectrumModel::Ohmic(s) => Ok(s),
        _ => Err(ConfigError::Invalid("this oracle needs environment.kind = \"ohmic\"".into())),
    }
}

fn physics(e: qsteer_core::error::Error) -> ConfigError {
    ConfigError::Invalid(e.to_string())
}

pub fn run_oracle(name: OracleName, p: &PointParams) -> Result<Value, ConfigError> {
    let s = &p.sluice;
    Ok(match name {
        OracleName::IdealCharge | OracleName::ExcitedCharge => {
            let c = if name == OracleName::IdealCharge {
                ideal_pumped_charge(s, CHARGE_STEPS)
            } else {
                excited_pumped_charge(s, CHARGE_STEPS)
            }
            .map_err(physics)?;
            json!({ "q_left": c.q_left, "q_right": c.q_right, "q_avg": c.q_avg(), "steps": CHARGE_STEPS })
        }
        OracleName::Adiabaticity => {
            let a = cycle_adiabaticity(s, 4096).map_err(physics)?;
            json!({ "alpha_bar": a.alpha_bar, "alpha_max": a.alpha_max(), "delta_min_rad_s": a.delta_min, "period_s": a.period })
        }
        OracleName::QuasiStationary => {
            let temp = p.spectra.temperature();
            let mut rows = Vec::with_capacity(QS_SAMPLES);
            for i in 0..QS_SAMPLES {
                let phase = (i as f64 + 0.5) / QS_SAMPLES as f64;
                let frame = frame_at_time(s, phase * s.period()).map_err(physics)?;
                let ideal = qs_ideal(&frame);
                let mut row = json!({
                    "phase": phase,
                    "omega0": frame.omega0,
                    "ideal_rho_ge": [ideal.rho_ge.re, ideal.rho_ge.im],
                });
                if temp > 0.0 {
                    let ft = qs_finite_t(&frame, temp);
                    row["finite_t_rho_gg"] = json!(ft.rho_gg);
                    row["finite_t_warnings"] = json!(ft.warnings);
                }
                if p.spectra != SpectrumModel::None {
                    let sp = p.spectra.triple(frame.omega0).map_err(physics)?;
                    row["bloch_rho_gg"] = json!(bloch_fixed_point(&frame, &sp));
                    let sec = qs_secular_zero_t(&frame, &sp);
                    row["secular_rho_ge"] = json!([sec.rho_ge.re, sec.rho_ge.im]);
                    row["secular_warnings"] = json!(sec.warnings);
                }
                rows.push(row);
            }
            json!({ "temperature_k": temp, "samples": rows })
        }
        OracleName::DeltaQExplicit => {
            let d = delta_q_explicit(s, &ohmic(p)?, DEFAULT_PANELS).map_err(physics)?;
            json!({
                "delta_q": d.total(),
                "gamma_term": d.gamma_term,
                "eta_only_term": d.eta_only_term,
                "eta_mixed_term": d.eta_mixed_term,
                "panels": DEFAULT_PANELS,
            })
        }
        OracleName::DeltaQSecularState => {
            let d = delta_q_secular_state(s, &ohmic(p)?, DEFAULT_PANELS).map_err(physics)?;
            json!({ "delta_q": d, "panels": DEFAULT_PANELS })
        }
        OracleName::LeadingTerms => {
            let t = delta_q_leading_terms(s, &ohmic(p)?);
            json!({ "a1": t.a1, "a2": t.a2, "a4": t.a4, "a5": t.a5, "total": t.total(), "warnings": t.warnings })
        }
    })
}
