// Copyright 2026 qsteer contributors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by the physics layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("degenerate gap: omega0 = {omega0}")]
    DegenerateGap { omega0: f64 },

    #[error("singular adiabatic coordinate: eta^2 = 1 (E12 = 0) at this control point")]
    SingularCoordinate,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("flux {flux} is within {guard} of a half flux quantum; SQUID inductance diverges")]
    DivergingInductance { flux: f64, guard: f64 },

    #[error("step size underflow at t = {t:e} s (h = {h:e} s); problem is stiff or the tolerances are too tight")]
    StepUnderflow { t: f64, h: f64 },

    #[error("cycle {cycle} is not fully contained in the record ({available} complete cycles)")]
    CycleOutOfRange { cycle: usize, available: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
