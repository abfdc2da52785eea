//! Independent trajectories over a grid, run in parallel and gathered in order.

use log::{info, warn};
use qsteer_core::dynamics::{cycle_adiabaticity, integrate_cycles, reach_quasi_stationary, TrajectoryRecord};
use qsteer_core::frame::local_alpha;
use qsteer_core::master::RhsVariant;
use qsteer_core::observables::superadiabatic_population;
use qsteer_core::state::DensityMatrix2;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{PointParams, SweepSpec};
use crate::error::ConfigError;

/// Samples per cycle used for the reported ᾱ.
const ALPHA_SAMPLES: usize = 1024;

/// One grid point of a sweep. Numeric fields are NaN when the trajectory failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub index: usize,
    pub value: f64,
    pub variant: RhsVariant,
    pub ok: bool,
    pub converged: bool,
    /// Completed cycles; equals the cycle count to stationarity when converged.
    pub cycles: usize,
    pub q_left: f64,
    pub q_right: f64,
    pub q_avg: f64,
    pub delta_q: f64,
    pub min_superadiabatic_population: f64,
    pub max_positivity_violation: f64,
    pub alpha_bar: f64,
    pub mean_rho_gg: f64,
    pub error: Option<String>,
}

impl Row {
    fn failed(index: usize, value: f64, variant: RhsVariant, error: String) -> Self {
        Self {
            index,
            value,
            variant,
            ok: false,
            converged: false,
            cycles: 0,
            q_left: f64::NAN,
            q_right: f64::NAN,
            q_avg: f64::NAN,
            delta_q: f64::NAN,
            min_superadiabatic_population: f64::NAN,
            max_positivity_violation: f64::NAN,
            alpha_bar: f64::NAN,
            mean_rho_gg: f64::NAN,
            error: Some(error),
        }
    }
}

/// Last-cycle samples of one grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TracePoint {
    pub index: usize,
    pub value: f64,
    pub phase: f64,
    pub rho_gg: f64,
    pub rho_ge_re: f64,
    pub rho_ge_im: f64,
    pub superadiabatic_population: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesResult {
    pub spec: SweepSpec,
    pub rows: Vec<Row>,
    pub trace: Vec<TracePoint>,
}

impl SeriesResult {
    pub fn failed_rows(&self) -> usize {
        self.rows.iter().filter(|r| !r.ok).count()
    }
}

/// Run one trajectory to quasi-stationarity.
pub fn run_point(p: &PointParams) -> qsteer_core::error::Result<TrajectoryRecord> {
    integrate_cycles(p.variant, &p.sluice, &p.spectra, &p.integrator, DensityMatrix2::ground())
}

fn summarise(index: usize, value: f64, p: &PointParams) -> (Row, Vec<TracePoint>) {
    let rec = match run_point(p) {
        Ok(r) => r,
        Err(e) => {
            warn!("grid point {index} ({value}) failed: {e}");
            return (Row::failed(index, value, p.variant, e.to_string()), Vec::new());
        }
    };
    let alpha_bar = cycle_adiabaticity(&p.sluice, ALPHA_SAMPLES)
        .map(|a| a.alpha_bar)
        .unwrap_or(f64::NAN);
    let (_, converged) = reach_quasi_stationary(&rec);
    let last = rec.last_cycle().expect("at least one cycle is always integrated");
    let row = Row {
        index,
        value,
        variant: p.variant,
        ok: true,
        converged,
        cycles: rec.cycles.len(),
        q_left: last.charge.q_left,
        q_right: last.charge.q_right,
        q_avg: last.charge.q_avg(),
        delta_q: last.charge.asymmetry(),
        min_superadiabatic_population: last.min_superadiabatic_population,
        max_positivity_violation: last.max_positivity_violation,
        alpha_bar,
        mean_rho_gg: last.mean_rho_gg,
        error: None,
    };
    let n = p.integrator.grid_points + 1;
    let start = rec.states.len().saturating_sub(n);
    let trace = (start..rec.states.len())
        .map(|i| {
            let (rho, frame) = (&rec.states[i], &rec.frames[i]);
            let phase = rec.times[i] / rec.period - (rec.cycles.len() - 1) as f64;
            TracePoint {
                index,
                value,
                phase,
                rho_gg: rho.rho_gg,
                rho_ge_re: rho.rho_ge_re,
                rho_ge_im: rho.rho_ge_im,
                superadiabatic_population: superadiabatic_population(frame, rho),
                alpha: local_alpha(frame).unwrap_or(f64::NAN),
            }
        })
        .collect();
    (row, trace)
}

/// Run every grid point of `spec`. Rows come back in grid order whatever
/// the scheduling; a failing point is marked and the sweep continues.
pub fn run_sweep(spec: &SweepSpec) -> Result<SeriesResult, ConfigError> {
    let points = spec
        .grid
        .iter()
        .map(|&v| spec.point(v))
        .collect::<Result<Vec<_>, _>>()?;
    info!("series `{}`: {} points along {}", spec.label, points.len(), spec.axis);
    let results: Vec<(Row, Vec<TracePoint>)> = points
        .par_iter()
        .zip(spec.grid.par_iter())
        .enumerate()
        .map(|(i, (p, &v))| summarise(i, v, p))
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    let mut trace = Vec::new();
    for (r, t) in results {
        rows.push(r);
        if spec.trace {
            trace.extend(t);
        }
    }
    Ok(SeriesResult {
        spec: spec.clone(),
        rows,
        trace,
    })
}
