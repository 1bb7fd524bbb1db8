// SPDX-License-Identifier: Apache-2.0

//! Free-fermion simulation of linear quenches in the transverse-field Ising
//! chain with classical noise on the transverse field.

pub mod cli;
pub mod config;
pub mod correlators;
pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod experiments;
pub mod model;
pub mod observables;
pub mod oracle;
pub mod output;
pub mod pipeline;
pub mod scaling;

pub use error::{QuenchError, Result};
