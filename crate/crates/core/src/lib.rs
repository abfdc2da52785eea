// Copyright 2026 qsteer contributors
// SPDX-License-Identifier: Apache-2.0

pub mod dynamics;
pub mod environment;
pub mod error;
pub mod frame;
pub mod integrator;
pub mod master;
pub mod observables;
pub mod oracles;
pub mod sluice;
pub mod state;
pub mod units;
