// Copyright 2026 The pmme Authors
// SPDX-License-Identifier: Apache-2.0

//! Scenario-file front end for `pmme-core`: each command reads a config,
//! runs one pipeline and writes deterministic CSV or text files.

pub mod commands;
pub mod config;
pub mod error;
pub mod ini;
pub mod output;

pub use commands::RunReport;
pub use config::ScenarioConfig;
pub use error::{CliError, Result};
