//! Stochastic-geometry toolkit for the downlink of a UAV-assisted cellular
//! network with clustered users.
//!
//! The network has three tiers: the cluster-center UAV of the typical user
//! (tier 0), the remaining field UAVs (tier 1, a homogeneous PPP at altitude
//! `H`), and terrestrial base stations (tier 2, an independent PPP). Users
//! form Thomas clusters around the ground projections of the UAVs; the
//! typical user sits at the origin and its cluster-center UAV is tier 0.
//!
//! Two independent evaluation routes are provided and cross-validated:
//!
//! * an analytic engine ([`association`], [`coverage`]) that evaluates the
//!   association probabilities, SINR coverage and area spectral efficiency
//!   by adaptive quadrature over the path-loss distributions in [`pathloss`];
//! * a Monte Carlo network simulator ([`simulator`]) that samples planar
//!   point-process realizations and applies the association and SINR rules
//!   directly.
//!
//! All computation is in linear SI units (watts, meters, points per m²);
//! dB/dBm conversions happen at the configuration boundary only.

pub mod association;
pub mod coverage;
pub mod model;
pub mod pathloss;
pub mod quadrature;
pub mod simulator;

pub use association::{AnalyticOptions, AssociationProfile, CenterNormalization, CenterTailMode};
pub use coverage::{CoverageReport, EventTerm, ExclusionRule};
pub use model::{LinkState, MultiHeightParams, SystemParams, TierRef};
pub use quadrature::{IntegrationResult, QuadratureError, Tolerance};
pub use simulator::{Realization, SimConfig, SimEstimate};

/// Error raised by the analytic engine when a quadrature fails inside a
/// named association or coverage term.
#[derive(Debug, thiserror::Error)]
#[error("{context}: {source}")]
pub struct EvalError {
    /// Which analytic term was being evaluated, e.g. `"A1,los"` or `"PC2"`.
    pub context: String,
    #[source]
    pub source: QuadratureError,
}

impl EvalError {
    pub(crate) fn new(context: impl Into<String>, source: QuadratureError) -> Self {
        Self { context: context.into(), source }
    }
}
