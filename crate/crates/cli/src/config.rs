//! Run descriptions: a fixed parameter snapshot plus one or more sweep series.
//!
//! ```toml
//! name = "coupling-scan"
//!
//! [fixed]
//! variant = "full"
//! [fixed.sluice]
//! f = "10 MHz"
//! g = 0.01
//! [fixed.environment]
//! kind = "ohmic"
//! r = "300 kOhm"
//!
//! [[series]]
//! label = "f10"
//! axis = "coupling_g"
//! grid = { start = 0.005, stop = 0.1, count = 12, log = true }
//!
//! [[series]]
//! label = "f75"
//! axis = "coupling_g"
//! grid = [0.01, 0.02, 0.05]
//! set = { sluice = { f = "75 MHz" } }
//! ```
//!
//! Every table under `fixed` is optional and defaults to the symmetric
//! sluice with a 300 kΩ zero-temperature resistor. `set` is merged key by key
//! over `fixed` for one series.

use std::fmt;
use std::path::Path;

use qsteer_core::dynamics::{IntegratorConfig, SampleMode, DEFAULT_GRID_POINTS, DEFAULT_STATIONARITY_TOL};
use qsteer_core::environment::{EngineeredEnvironment, OhmicSpectrum, SpectrumModel, DEFAULT_FLUX_GUARD};
use qsteer_core::master::RhsVariant;
use qsteer_core::sluice::SluiceParams;
use qsteer_core::state::DEFAULT_POS_TOL;
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::quantity::{Dimension, Quantity};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SluiceSection {
    pub e_c: Quantity,
    pub j_l_max: Quantity,
    pub j_l_min: Quantity,
    pub j_r_max: Quantity,
    pub j_r_min: Quantity,
    pub dng_max: f64,
    pub dng_min: f64,
    pub phi: Quantity,
    pub g: f64,
    pub f: Quantity,
}

impl Default for SluiceSection {
    fn default() -> Self {
        Self {
            e_c: Quantity::with_unit(1.0, "K"),
            j_l_max: Quantity::with_unit(0.1, "E_C"),
            j_l_min: Quantity::with_unit(0.003, "E_C"),
            j_r_max: Quantity::with_unit(0.1, "E_C"),
            j_r_min: Quantity::with_unit(0.003, "E_C"),
            dng_max: 0.3,
            dng_min: -0.3,
            phi: Quantity::with_unit(0.5, "pi"),
            g: 0.01,
            f: Quantity::with_unit(10.0, "MHz"),
        }
    }
}

impl SluiceSection {
    pub fn resolve(&self) -> Result<SluiceParams, ConfigError> {
        let e_c = self.e_c.to_si(Dimension::Energy, "sluice.e_c", None)?;
        let energy = |q: &Quantity, key: &str| q.to_si(Dimension::Energy, key, Some(e_c));
        Ok(SluiceParams {
            e_c,
            j_l_max: energy(&self.j_l_max, "sluice.j_l_max")?,
            j_l_min: energy(&self.j_l_min, "sluice.j_l_min")?,
            j_r_max: energy(&self.j_r_max, "sluice.j_r_max")?,
            j_r_min: energy(&self.j_r_min, "sluice.j_r_min")?,
            dng_max: self.dng_max,
            dng_min: self.dng_min,
            phi: self.phi.to_si(Dimension::Angle, "sluice.phi", None)?,
            g: self.g,
            f: self.f.to_si(Dimension::Frequency, "sluice.f", None)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvironmentKind {
    None,
    Ohmic,
    Engineered,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnvironmentSection {
    pub kind: EnvironmentKind,
    pub r: Quantity,
    pub temperature: Quantity,
    pub t0: Quantity,
    pub m_squids: u32,
    pub c_e: Quantity,
    pub c_s: Quantity,
    pub r_s: Quantity,
    pub i_c: Quantity,
    pub flux: f64,
    pub flux_guard: f64,
}

impl Default for EnvironmentSection {
    fn default() -> Self {
        Self {
            kind: EnvironmentKind::Ohmic,
            r: Quantity::with_unit(300.0, "kOhm"),
            temperature: Quantity::with_unit(0.0, "K"),
            t0: Quantity::with_unit(0.1, "K"),
            m_squids: 100,
            c_e: Quantity::with_unit(1.0, "fF"),
            c_s: Quantity::with_unit(0.3, "fF"),
            r_s: Quantity::with_unit(500.0, "Ohm"),
            i_c: Quantity::with_unit(4.0, "nA"),
            flux: 0.0,
            flux_guard: DEFAULT_FLUX_GUARD,
        }
    }
}

impl EnvironmentSection {
    fn ohmic(&self) -> Result<OhmicSpectrum, ConfigError> {
        OhmicSpectrum::new(
            self.r.to_si(Dimension::Resistance, "environment.r", None)?,
            self.temperature.to_si(Dimension::Temperature, "environment.temperature", None)?,
            self.t0.to_si(Dimension::Temperature, "environment.t0", None)?,
        )
        .map_err(|e| ConfigError::Invalid(format!("environment: {e}")))
    }

    pub fn resolve(&self) -> Result<SpectrumModel, ConfigError> {
        Ok(match self.kind {
            EnvironmentKind::None => SpectrumModel::None,
            EnvironmentKind::Ohmic => SpectrumModel::Ohmic(self.ohmic()?),
            EnvironmentKind::Engineered => SpectrumModel::Engineered(EngineeredEnvironment {
                base: self.ohmic()?,
                m_squids: self.m_squids,
                c_e: self.c_e.to_si(Dimension::Capacitance, "environment.c_e", None)?,
                c_s: self.c_s.to_si(Dimension::Capacitance, "environment.c_s", None)?,
                r_s: self.r_s.to_si(Dimension::Resistance, "environment.r_s", None)?,
                i_c: self.i_c.to_si(Dimension::Current, "environment.i_c", None)?,
                flux: self.flux,
                flux_guard: self.flux_guard,
            }),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorSection {
    pub rel_tol: f64,
    pub abs_tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_step: Option<Quantity>,
    pub n_cycles_max: usize,
    pub stationarity_tol: f64,
    pub grid_points: usize,
    pub pos_tol: f64,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        let d = IntegratorConfig::default();
        Self {
            rel_tol: d.rel_tol,
            abs_tol: d.abs_tol,
            max_step: None,
            n_cycles_max: d.n_cycles_max,
            stationarity_tol: DEFAULT_STATIONARITY_TOL,
            grid_points: DEFAULT_GRID_POINTS,
            pos_tol: DEFAULT_POS_TOL,
        }
    }
}

impl IntegratorSection {
    pub fn resolve(&self, sample_mode: SampleMode) -> Result<IntegratorConfig, ConfigError> {
        let cfg = IntegratorConfig {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self
                .max_step
                .as_ref()
                .map(|q| q.to_si(Dimension::Time, "integrator.max_step", None))
                .transpose()?,
            n_cycles_max: self.n_cycles_max,
            stationarity_tol: self.stationarity_tol,
            grid_points: self.grid_points,
            pos_tol: self.pos_tol,
            sample_mode,
            ..IntegratorConfig::default()
        };
        cfg.validate().map_err(|e| ConfigError::Invalid(format!("integrator: {e}")))?;
        Ok(cfg)
    }
}

/// The parameter snapshot every grid point starts from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct PointConfig {
    pub variant: Variant,
    pub sluice: SluiceSection,
    pub environment: EnvironmentSection,
    pub integrator: IntegratorSection,
}

/// Serde-friendly wrapper defaulting to the full master equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Variant(pub RhsVariant);

impl Default for Variant {
    fn default() -> Self {
        Variant(RhsVariant::Full)
    }
}

/// The swept quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    PhasePhi,
    CouplingG,
    FrequencyF,
    Flux,
    Temperature,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::PhasePhi => "phase_phi",
            Axis::CouplingG => "coupling_g",
            Axis::FrequencyF => "frequency_f",
            Axis::Flux => "flux",
            Axis::Temperature => "temperature",
        }
    }

    /// Column header including the working unit.
    pub fn column(self) -> &'static str {
        match self {
            Axis::PhasePhi => "phi_rad",
            Axis::CouplingG => "g",
            Axis::FrequencyF => "f_hz",
            Axis::Flux => "flux_phi0",
            Axis::Temperature => "temperature_k",
        }
    }

    fn dimension(self) -> Dimension {
        match self {
            Axis::PhasePhi => Dimension::Angle,
            Axis::CouplingG | Axis::Flux => Dimension::Dimensionless,
            Axis::FrequencyF => Dimension::Frequency,
            Axis::Temperature => Dimension::Temperature,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Explicit values or an evenly spaced range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    List(Vec<Quantity>),
    Range {
        start: Quantity,
        stop: Quantity,
        count: usize,
        #[serde(default)]
        log: bool,
    },
}

impl GridSpec {
    pub fn values(&self, axis: Axis) -> Result<Vec<f64>, ConfigError> {
        let key = format!("grid ({axis})");
        let conv = |q: &Quantity| q.to_si(axis.dimension(), &key, None);
        match self {
            GridSpec::List(v) => v.iter().map(conv).collect(),
            GridSpec::Range { start, stop, count, log } => {
                let (a, b) = (conv(start)?, conv(stop)?);
                let n = *count;
                if n == 1 {
                    return Ok(vec![a]);
                }
                if *log && !(a > 0.0 && b > 0.0) {
                    return Err(ConfigError::Invalid(format!("{key}: log spacing needs positive bounds")));
                }
                Ok((0..n)
                    .map(|i| {
                        let s = i as f64 / (n - 1) as f64;
                        if *log {
                            a * (b / a).powf(s)
                        } else {
                            a + (b - a) * s
                        }
                    })
                    .collect())
            }
        }
    }
}

/// Observables a series may emit. All are emitted when none are requested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Output {
    QLeft,
    QRight,
    QAvg,
    DeltaQ,
    MinSuperadiabaticPopulation,
    MaxPositivityViolation,
    AlphaBar,
    MeanRhoGg,
}

impl Output {
    pub const ALL: [Output; 8] = [
        Output::QLeft,
        Output::QRight,
        Output::QAvg,
        Output::DeltaQ,
        Output::MinSuperadiabaticPopulation,
        Output::MaxPositivityViolation,
        Output::AlphaBar,
        Output::MeanRhoGg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Output::QLeft => "q_left",
            Output::QRight => "q_right",
            Output::QAvg => "q_avg",
            Output::DeltaQ => "delta_q",
            Output::MinSuperadiabaticPopulation => "min_superadiabatic_population",
            Output::MaxPositivityViolation => "max_positivity_violation",
            Output::AlphaBar => "alpha_bar",
            Output::MeanRhoGg => "mean_rho_gg",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesConfig {
    pub label: String,
    pub axis: Axis,
    pub grid: GridSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub outputs: Vec<Output>,
    /// Also write the last-cycle trace of every grid point.
    #[serde(default)]
    pub trace: bool,
    /// Partial `fixed` snapshot merged over the run's for this series.
    #[serde(default, skip_serializing_if = "toml::Table::is_empty")]
    pub set: toml::Table,
}

/// A whole run as written in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub name: String,
    #[serde(default)]
    pub fixed: toml::Table,
    pub series: Vec<SeriesConfig>,
}

/// A series with every unit converted and the grid expanded.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub label: String,
    pub axis: Axis,
    pub grid: Vec<f64>,
    pub fixed: PointConfig,
    pub variant: RhsVariant,
    pub outputs: Vec<Output>,
    pub trace: bool,
}

/// Fully resolved inputs of one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct PointParams {
    pub variant: RhsVariant,
    pub sluice: SluiceParams,
    pub spectra: SpectrumModel,
    pub integrator: IntegratorConfig,
}

fn merge(base: &mut toml::Table, over: &toml::Table) {
    for (k, v) in over {
        match (base.get_mut(k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            _ => {
                base.insert(k.clone(), v.clone());
            }
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str, origin: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: origin.to_string(),
            message: e.to_string(),
        })
    }

    /// Load a TOML run file, or the `config` echoed in a run manifest (`.json`).
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let origin = path.display().to_string();
        if path.extension().is_some_and(|e| e == "json") {
            #[derive(Deserialize)]
            struct Manifest {
                config: RunConfig,
            }
            let m: Manifest = serde_json::from_str(&text).map_err(|e| ConfigError::Parse {
                path: origin,
                message: e.to_string(),
            })?;
            Ok(m.config)
        } else {
            Self::from_toml_str(&text, &origin)
        }
    }

    /// The `fixed` snapshot on its own, with no series applied.
    pub fn snapshot(&self) -> Result<PointParams, ConfigError> {
        let fixed: PointConfig = toml::Value::Table(self.fixed.clone())
            .try_into()
            .map_err(|e: toml::de::Error| ConfigError::Parse {
                path: "fixed".into(),
                message: e.to_string(),
            })?;
        Ok(PointParams {
            variant: fixed.variant.0,
            sluice: fixed.sluice.resolve()?,
            spectra: fixed.environment.resolve()?,
            integrator: fixed.integrator.resolve(SampleMode::Off)?,
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("run configs always serialise")
    }

    /// Resolve every series, validating units, grids and physical parameters.
    pub fn resolve(&self) -> Result<Vec<SweepSpec>, ConfigError> {
        if self.series.is_empty() {
            return Err(ConfigError::Invalid("run has no [[series]]".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        self.series
            .iter()
            .map(|s| {
                if !seen.insert(s.label.as_str()) {
                    return Err(ConfigError::Invalid(format!("duplicate series label `{}`", s.label)));
                }
                if s.label.is_empty() || !s.label.chars().all(|c| c.is_ascii_alphanumeric() || "_-.".contains(c)) {
                    return Err(ConfigError::Invalid(format!(
                        "series label `{}` must be non-empty and use only [A-Za-z0-9_.-]",
                        s.label
                    )));
                }
                let mut table = self.fixed.clone();
                merge(&mut table, &s.set);
                let fixed: PointConfig = toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| {
                    ConfigError::Parse {
                        path: format!("series `{}`", s.label),
                        message: e.to_string(),
                    }
                })?;
                let grid = s.grid.values(s.axis)?;
                if grid.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(ConfigError::Invalid(format!(
                        "series `{}`: grid must be strictly increasing",
                        s.label
                    )));
                }
                let mut outputs = if s.outputs.is_empty() { Output::ALL.to_vec() } else { s.outputs.clone() };
                outputs.sort();
                outputs.dedup();
                let spec = SweepSpec {
                    label: s.label.clone(),
                    axis: s.axis,
                    variant: fixed.variant.0,
                    fixed,
                    grid,
                    outputs,
                    trace: s.trace,
                };
                spec.validate()?;
                Ok(spec)
            })
            .collect()
    }
}

impl SweepSpec {
    /// Check the snapshot and every grid point against the model's validations.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let physics = |source| ConfigError::Physics {
            series: self.label.clone(),
            source,
        };
        if self.grid.is_empty() {
            self.base()?.sluice.validate().map_err(physics)?;
            return Ok(());
        }
        for &v in &self.grid {
            let p = self.point(v)?;
            p.sluice.validate().map_err(physics)?;
            if p.variant != RhsVariant::Unitary {
                p.spectra.validate().map_err(physics)?;
            }
        }
        Ok(())
    }

    /// Parameters of the snapshot before the axis value is applied.
    pub fn base(&self) -> Result<PointParams, ConfigError> {
        let sample_mode = if self.trace { SampleMode::Grid } else { SampleMode::Off };
        Ok(PointParams {
            variant: self.variant,
            sluice: self.fixed.sluice.resolve()?,
            spectra: self.fixed.environment.resolve()?,
            integrator: self.fixed.integrator.resolve(sample_mode)?,
        })
    }

    /// Parameters of the grid point with axis value `value`.
    pub fn point(&self, value: f64) -> Result<PointParams, ConfigError> {
        let mut p = self.base()?;
        match self.axis {
            Axis::PhasePhi => p.sluice.phi = value,
            Axis::CouplingG => p.sluice.g = value,
            Axis::FrequencyF => p.sluice.f = value,
            Axis::Flux => match &mut p.spectra {
                SpectrumModel::Engineered(e) => e.flux = value,
                _ => {
                    return Err(ConfigError::Invalid(format!(
                        "series `{}`: the flux axis needs environment.kind = \"engineered\"",
                        self.label
                    )))
                }
            },
            Axis::Temperature => match &mut p.spectra {
                SpectrumModel::Ohmic(s) => s.temp = value,
                SpectrumModel::Engineered(e) => e.base.temp = value,
                _ => {
                    return Err(ConfigError::Invalid(format!(
                        "series `{}`: the temperature axis needs an ohmic or engineered environment",
                        self.label
                    )))
                }
            },
        }
        Ok(p)
    }
}
