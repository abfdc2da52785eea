// Copyright 2026 qsteer contributors
// SPDX-License-Identifier: Apache-2.0

//! Multi-cycle integration of the sluice master equations.
//!
//! The integrated vector is (ρ_gg, Re ρ_ge, Im ρ_ge, Q_L, Q_R): the charge
//! quadratures ride along with the state and share its error control. Time is
//! tracked as (cycle, phase) so that waveform evaluation never suffers from
//! the round-off of a large absolute time.

use log::{debug, warn};
use serde::{Deserialize, Serialize};

use crate::environment::SpectrumModel;
use crate::error::{invalid, Result};
use crate::frame::{AdiabaticFrame, AdiabaticityReport, SpectralTriple};
use crate::integrator::{Dp45, StepStats};
use crate::master::{rhs, RhsVariant};
use crate::observables::{charge_integrands, superadiabatic_population, ChargeAccumulator};
use crate::sluice::{frame_at, segment_of, segment_waveform, SluiceParams, SEGMENTS};
use crate::state::{DensityMatrix2, PositivityViolation, DEFAULT_POS_TOL};

/// Length of the integrated vector.
pub const DIM: usize = 5;

/// Default number of comparison points per cycle.
pub const DEFAULT_GRID_POINTS: usize = 256;

/// Default stationarity tolerance.
pub const DEFAULT_STATIONARITY_TOL: f64 = 1e-7;

/// Maximum number of individual positivity events kept in a record.
pub const MAX_LOGGED_VIOLATIONS: usize = 1000;

/// What the trajectory record keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleMode {
    /// The per-cycle comparison grid.
    Grid,
    /// Every accepted step.
    Steps,
    /// Per-cycle summaries only.
    Off,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Upper bound on the step, seconds. `None` selects
    /// min(T_p/6, 2π/(20·max ω0)).
    pub max_step: Option<f64>,
    pub n_cycles_max: usize,
    pub stationarity_tol: f64,
    /// Forced step boundaries as fractions of the period. The six waveform
    /// corners are always added.
    pub segment_boundaries: Vec<f64>,
    pub grid_points: usize,
    pub pos_tol: f64,
    pub sample_mode: SampleMode,
    /// Stop as soon as the stationarity criterion is met.
    pub stop_at_convergence: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_step: None,
            n_cycles_max: 200,
            stationarity_tol: DEFAULT_STATIONARITY_TOL,
            segment_boundaries: (0..SEGMENTS).map(|s| s as f64 / SEGMENTS as f64).collect(),
            grid_points: DEFAULT_GRID_POINTS,
            pos_tol: DEFAULT_POS_TOL,
            sample_mode: SampleMode::Grid,
            stop_at_convergence: true,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(invalid("rel_tol", "must be > 0"));
        }
        if !(self.abs_tol > 0.0) {
            return Err(invalid("abs_tol", "must be > 0"));
        }
        if let Some(h) = self.max_step {
            if !(h > 0.0) {
                return Err(invalid("max_step", "must be > 0"));
            }
        }
        if self.n_cycles_max == 0 {
            return Err(invalid("n_cycles_max", "must be at least 1"));
        }
        if !(self.stationarity_tol > 0.0) {
            return Err(invalid("stationarity_tol", "must be > 0"));
        }
        if self.grid_points == 0 {
            return Err(invalid("grid_points", "must be at least 1"));
        }
        if !(self.pos_tol >= 0.0) {
            return Err(invalid("pos_tol", "must be >= 0"));
        }
        if self.segment_boundaries.iter().any(|x| !(0.0..1.0).contains(x)) {
            return Err(invalid("segment_boundaries", "fractions must lie in [0, 1)"));
        }
        Ok(())
    }
}

/// Summary of one completed cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleSummary {
    pub index: usize,
    pub charge: ChargeAccumulator,
    /// Max component-wise distance to the previous cycle on the comparison grid.
    pub distance: Option<f64>,
    /// Mean of ρ_gg over the comparison grid.
    pub mean_rho_gg: f64,
    pub min_superadiabatic_population: f64,
    pub max_positivity_violation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub variant: RhsVariant,
    pub period: f64,
    pub max_step: f64,
    pub stationarity_tol: f64,
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix2>,
    pub frames: Vec<AdiabaticFrame>,
    pub cycles: Vec<CycleSummary>,
    pub positivity_violations: Vec<PositivityViolation>,
    pub n_positivity_violations: usize,
    pub max_positivity_violation: f64,
    pub converged_cycle: Option<usize>,
    pub final_state: DensityMatrix2,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub rhs_evaluations: usize,
}

impl TrajectoryRecord {
    /// Last completed cycle.
    pub fn last_cycle(&self) -> Option<&CycleSummary> {
        self.cycles.last()
    }

    /// Average of the per-cycle mean ρ_gg over the last `n` cycles.
    pub fn running_mean_rho_gg(&self, n: usize) -> f64 {
        let n = n.min(self.cycles.len()).max(1);
        let tail = &self.cycles[self.cycles.len().saturating_sub(n)..];
        tail.iter().map(|c| c.mean_rho_gg).sum::<f64>() / tail.len() as f64
    }
}

/// First cycle whose distance to its predecessor is below the record's
/// stationarity tolerance, and whether one exists. When none does the index
/// of the last cycle is returned.
pub fn reach_quasi_stationary(record: &TrajectoryRecord) -> (usize, bool) {
    for c in &record.cycles {
        if matches!(c.distance, Some(d) if d < record.stationarity_tol) {
            return (c.index, true);
        }
    }
    (record.cycles.len().saturating_sub(1), false)
}

fn segment_start(params: &SluiceParams, seg: usize) -> f64 {
    seg as f64 * params.segment_duration()
}

fn spectral_triple(variant: RhsVariant, spectra: &SpectrumModel, omega0: f64) -> Result<SpectralTriple> {
    match variant {
        RhsVariant::Unitary => Ok(SpectralTriple::ZERO),
        _ => spectra.triple(omega0),
    }
}

/// Frame and derivative of the integrated vector at phase `tau` of segment `seg`.
fn evaluate(
    variant: RhsVariant,
    params: &SluiceParams,
    spectra: &SpectrumModel,
    seg: usize,
    tau: f64,
    y: &[f64; DIM],
) -> Result<[f64; DIM]> {
    let cp = segment_waveform(params, seg, tau - segment_start(params, seg));
    let frame = frame_at(params, &cp)?;
    let sp = spectral_triple(variant, spectra, frame.omega0)?;
    let rho = DensityMatrix2::from_array([y[0], y[1], y[2]]);
    let d = rhs(variant, &frame, &sp, &rho)?;
    let (ql, qr) = charge_integrands(&frame, &cp, params, &rho);
    Ok([d.d_gg, d.d_ge.re, d.d_ge.im, ql, qr])
}

/// Largest gap over the cycle, sampled densely inside every segment.
pub fn max_gap(params: &SluiceParams) -> Result<f64> {
    let dur = params.segment_duration();
    let mut best: f64 = 0.0;
    for seg in 0..SEGMENTS {
        for i in 0..=64 {
            let cp = segment_waveform(params, seg, dur * i as f64 / 64.0);
            best = best.max(frame_at(params, &cp)?.omega0);
        }
    }
    Ok(best)
}

/// Default step bound min(T_p/6, 2π/(20·max ω0)).
pub fn default_max_step(params: &SluiceParams) -> Result<f64> {
    let w = max_gap(params)?;
    Ok(params.segment_duration().min(2.0 * std::f64::consts::PI / (20.0 * w)))
}

/// Local α(t) on a uniform grid of one cycle and ᾱ = 1/(Δ_min T_p).
pub fn cycle_adiabaticity(params: &SluiceParams, n: usize) -> Result<AdiabaticityReport> {
    let tp = params.period();
    let times: Vec<f64> = (0..n).map(|i| tp * i as f64 / n as f64).collect();
    let frames = times
        .iter()
        .map(|&t| {
            let seg = segment_of(params, t);
            frame_at(params, &segment_waveform(params, seg, t - segment_start(params, seg)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = AdiabaticityReport::from_frames(times, &frames, tp)?;
    // the gap minimum can sit between grid points
    let dur = params.segment_duration();
    for seg in 0..SEGMENTS {
        for i in 0..=256 {
            let w = frame_at(params, &segment_waveform(params, seg, dur * i as f64 / 256.0))?.omega0;
            report.delta_min = report.delta_min.min(w);
        }
    }
    report.alpha_bar = 1.0 / (report.delta_min * tp);
    Ok(report)
}

/// One forced step boundary within a cycle.
#[derive(Debug, Clone, Copy)]
struct Boundary {
    tau: f64,
    grid: Option<usize>,
}

fn cycle_boundaries(params: &SluiceParams, cfg: &IntegratorConfig) -> Vec<Boundary> {
    let tp = params.period();
    let mut pts: Vec<Boundary> = (0..cfg.grid_points)
        .map(|j| Boundary {
            tau: tp * j as f64 / cfg.grid_points as f64,
            grid: Some(j),
        })
        .collect();
    for s in 0..SEGMENTS {
        pts.push(Boundary {
            tau: segment_start(params, s),
            grid: None,
        });
    }
    for &x in &cfg.segment_boundaries {
        pts.push(Boundary { tau: x * tp, grid: None });
    }
    pts.push(Boundary { tau: tp, grid: None });
    pts.sort_by(|a, b| a.tau.total_cmp(&b.tau));
    let merge = 1e-12 * tp;
    let mut out: Vec<Boundary> = Vec::with_capacity(pts.len());
    for p in pts {
        match out.last_mut() {
            Some(last) if (p.tau - last.tau).abs() <= merge => {
                last.grid = last.grid.or(p.grid);
                // corners win over grid times so segments meet exactly
                if p.grid.is_none() {
                    last.tau = p.tau;
                }
            }
            _ => out.push(p),
        }
    }
    out
}

/// Evolve `rho0` through successive pumping cycles.
pub fn integrate_cycles(
    variant: RhsVariant,
    params: &SluiceParams,
    spectra: &SpectrumModel,
    cfg: &IntegratorConfig,
    rho0: DensityMatrix2,
) -> Result<TrajectoryRecord> {
    cfg.validate()?;
    for w in params.validate()? {
        debug!("sluice parameters: {w}");
    }
    if variant != RhsVariant::Unitary {
        spectra.validate()?;
    }
    if !rho0.is_finite() {
        return Err(invalid("rho0", "non-finite initial state"));
    }
    let tp = params.period();
    let max_step = match cfg.max_step {
        Some(h) => h,
        None => default_max_step(params)?,
    };
    let dp = Dp45::new(cfg.rel_tol, cfg.abs_tol, max_step)?;
    let bounds = cycle_boundaries(params, cfg);

    let mut rec = TrajectoryRecord {
        variant,
        period: tp,
        max_step,
        stationarity_tol: cfg.stationarity_tol,
        times: Vec::new(),
        states: Vec::new(),
        frames: Vec::new(),
        cycles: Vec::new(),
        positivity_violations: Vec::new(),
        n_positivity_violations: 0,
        max_positivity_violation: 0.0,
        converged_cycle: None,
        final_state: rho0,
        accepted_steps: 0,
        rejected_steps: 0,
        rhs_evaluations: 0,
    };

    let mut y = [rho0.rho_gg, rho0.rho_ge_re, rho0.rho_ge_im, 0.0, 0.0];
    let mut h = 0.0;
    let mut prev_grid: Option<Vec<[f64; 3]>> = None;
    let mut stats = StepStats::default();

    for k in 0..cfg.n_cycles_max {
        let t_cycle = k as f64 * tp;
        y[3] = 0.0;
        y[4] = 0.0;
        let mut grid = vec![[0.0; 3]; cfg.grid_points];
        let mut min_pg = f64::INFINITY;
        let mut cycle_violation: f64 = 0.0;

        let mut record_grid = |rec: &mut TrajectoryRecord, j: usize, seg: usize, tau: f64, y: &[f64; DIM]| -> Result<()> {
            let rho = DensityMatrix2::from_array([y[0], y[1], y[2]]);
            let frame = frame_at(params, &segment_waveform(params, seg, tau - segment_start(params, seg)))?;
            grid[j] = rho.to_array();
            min_pg = min_pg.min(superadiabatic_population(&frame, &rho));
            if cfg.sample_mode == SampleMode::Grid {
                rec.times.push(t_cycle + tau);
                rec.states.push(rho);
                rec.frames.push(frame);
            }
            Ok(())
        };

        for win in bounds.windows(2) {
            let (a, b) = (win[0], win[1]);
            let seg = segment_of(params, 0.5 * (a.tau + b.tau));
            if let Some(j) = a.grid {
                record_grid(&mut rec, j, seg, a.tau, &y)?;
            }
            let pos_tol = cfg.pos_tol;
            let mode = cfg.sample_mode;
            let mut step_log = |tau: f64, yy: &[f64; DIM]| {
                let rho = DensityMatrix2::from_array([yy[0], yy[1], yy[2]]);
                if let Some(v) = rho.positivity_violation(pos_tol) {
                    if rec.n_positivity_violations == 0 {
                        warn!(
                            "{} dynamics left the physical set at t = {:e} s (min eigenvalue {:e}); continuing",
                            variant,
                            t_cycle + tau,
                            -v
                        );
                    }
                    rec.n_positivity_violations += 1;
                    rec.max_positivity_violation = rec.max_positivity_violation.max(v);
                    cycle_violation = cycle_violation.max(v);
                    if rec.positivity_violations.len() < MAX_LOGGED_VIOLATIONS {
                        rec.positivity_violations.push(PositivityViolation {
                            t: t_cycle + tau,
                            cycle: k,
                            min_eigenvalue: -v,
                        });
                    }
                }
                if mode == SampleMode::Steps {
                    rec.times.push(t_cycle + tau);
                    rec.states.push(rho);
                    if let Ok(f) = frame_at(params, &segment_waveform(params, seg, tau - segment_start(params, seg))) {
                        rec.frames.push(f);
                    } else {
                        rec.times.pop();
                        rec.states.pop();
                    }
                }
            };
            let (y_new, st) = dp.integrate(
                |tau, yy: &[f64; DIM]| evaluate(variant, params, spectra, seg, tau, yy),
                a.tau,
                b.tau,
                y,
                &mut h,
                &mut step_log,
            )?;
            y = y_new;
            stats += st;
        }

        let distance = prev_grid.as_ref().map(|p| {
            p.iter()
                .zip(&grid)
                .flat_map(|(u, v)| (0..3).map(move |i| (u[i] - v[i]).abs()))
                .fold(0.0, f64::max)
        });
        let mean_rho_gg = grid.iter().map(|g| g[0]).sum::<f64>() / grid.len() as f64;
        rec.cycles.push(CycleSummary {
            index: k,
            charge: ChargeAccumulator {
                q_left: y[3],
                q_right: y[4],
            },
            distance,
            mean_rho_gg,
            min_superadiabatic_population: min_pg,
            max_positivity_violation: cycle_violation,
        });
        prev_grid = Some(grid);

        if rec.converged_cycle.is_none() && matches!(distance, Some(d) if d < cfg.stationarity_tol) {
            rec.converged_cycle = Some(k);
            if cfg.stop_at_convergence {
                break;
            }
        }
    }

    let n = rec.cycles.len();
    if matches!(cfg.sample_mode, SampleMode::Grid | SampleMode::Steps) {
        let rho = DensityMatrix2::from_array([y[0], y[1], y[2]]);
        let seg = SEGMENTS - 1;
        let frame = frame_at(params, &segment_waveform(params, seg, tp - segment_start(params, seg)))?;
        if cfg.sample_mode == SampleMode::Grid {
            rec.times.push(n as f64 * tp);
            rec.states.push(rho);
            rec.frames.push(frame);
        }
    }
    rec.final_state = DensityMatrix2::from_array([y[0], y[1], y[2]]);
    rec.accepted_steps = stats.accepted;
    rec.rejected_steps = stats.rejected;
    rec.rhs_evaluations = stats.evaluations;
    Ok(rec)
}

/// Evolve under a frozen frame and spectrum for `duration` seconds.
pub fn integrate_frozen(
    variant: RhsVariant,
    frame: &AdiabaticFrame,
    sp: &SpectralTriple,
    rho0: DensityMatrix2,
    duration: f64,
    dp: &Dp45,
) -> Result<DensityMatrix2> {
    let mut h = 0.0;
    let (y, _) = dp.integrate(frozen_rhs(variant, frame, sp), 0.0, duration, rho0.to_array(), &mut h, |_, _| {})?;
    Ok(DensityMatrix2::from_array(y))
}

/// Right-hand side of a frozen-frame problem as a plain vector field.
pub fn frozen_rhs(
    variant: RhsVariant,
    frame: &AdiabaticFrame,
    sp: &SpectralTriple,
) -> impl FnMut(f64, &[f64; 3]) -> Result<[f64; 3]> {
    let (frame, sp) = (*frame, *sp);
    move |_, y| Ok(rhs(variant, &frame, &sp, &DensityMatrix2::from_array(*y))?.to_array())
}
