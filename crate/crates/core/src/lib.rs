//! Secrecy performance of decode-and-forward (DF) relay wiretap systems.
//!
//! A source S reaches a destination D through a DF relay R over independent
//! Rayleigh-fading hops while an eavesdropper E listens to R (case I), to S
//! (case II) or to both (case III). The crate provides:
//!
//! * [`model`]: validated SNR, rate and scenario parameters, dB helpers.
//! * [`channel`]: counter-based, stream-splittable Rayleigh channel draws.
//! * [`capacity`]: instantaneous end-to-end secrecy capacities per case,
//!   plus the conventional case I expression for comparison.
//! * [`analytic`]: exact secrecy outage probabilities (SOP), high-SNR limits,
//!   convergence slopes and the ordering relations between the cases.
//! * [`montecarlo`]: reproducible parallel SOP estimation with Wilson
//!   confidence intervals.
//! * [`sweep`]: SNR sweeps pairing analytic, asymptotic and simulated values,
//!   diversity-order fitting and CSV / JSON-lines tables.
//! * [`validate`]: the self-check suite behind `df-secrecy validate`.

pub mod analytic;
pub mod capacity;
pub mod channel;
mod error;
pub mod model;
pub mod montecarlo;
pub mod stats;
pub mod sweep;
pub mod validate;

pub use error::{Error, Result};
pub use model::{CaseId, RateThreshold, ScenarioScaling, SnrTriple};
