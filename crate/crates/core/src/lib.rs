//! Survival amplitudes and probabilities of unstable states built from a
//! continuum of masses, plus their short- and long-time asymptotics.
//!
//! Everything is dimensionless in units of a scale mass `m_s`: `ξ = m/m_s`,
//! `ρ = p/m_s`, `τ = m_s t`.

pub mod amplitude;
pub mod analysis;
pub mod asymptotics;
pub mod error;
pub mod grid;
pub mod mdd;
pub mod par;
pub mod quadrature;
pub mod report;

pub use amplitude::{amp_single, amp_two, prob_two, series, SeriesResult, TwoMassState};
pub use asymptotics::{long_time, short_time, AsymptoticModel, Regime};
pub use error::{Error, Result};
pub use mdd::{make_toy_mdd, MddSpec, ToyMddParams};
pub use par::Execution;
pub use quadrature::QuadConfig;
