//! Domain types, unit conversions and validation for the two-tier (and
//! multi-height) network parameters.
//!
//! Everything here is immutable after validation and safe to share across
//! parallel workers. Powers, biases and noise variances are stored linear;
//! dB/dBm values are converted at the configuration boundary.

use thiserror::Error;

/// Link propagation state of a UAV-to-user link.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum LinkState {
    #[default]
    Los,
    Nlos,
}

impl LinkState {
    pub const BOTH: [LinkState; 2] = [LinkState::Los, LinkState::Nlos];

    pub fn label(self) -> &'static str {
        match self {
            LinkState::Los => "los",
            LinkState::Nlos => "nlos",
        }
    }
}

/// Identifies the serving or interfering tier.
///
/// `FieldUav(m)` carries the height-group index `m` (1-based); in the
/// baseline single-height model it is always `FieldUav(1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TierRef {
    CenterUav,
    FieldUav(usize),
    GroundBs,
}

/// All network and environment constants of the baseline model.
///
/// Index convention for the per-tier arrays: `[0]` cluster-center UAV,
/// `[1]` field UAVs, `[2]` ground BSs.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    /// Density of field UAVs (points per m²).
    pub lambda_u: f64,
    /// Density of ground BSs (points per m²).
    pub lambda_b: f64,
    /// UAV altitude H (m).
    pub height: f64,
    /// Standard deviation of the user cluster around the UAV projection (m).
    pub sigma_c: f64,
    /// Path-loss exponents (must exceed 2 for interference integrals to converge).
    pub alpha_los: f64,
    pub alpha_nlos: f64,
    pub alpha_b: f64,
    /// Additional path losses (linear).
    pub eta_los: f64,
    pub eta_nlos: f64,
    pub eta_b: f64,
    /// Environment constants of the LOS-probability curve.
    pub env_b: f64,
    pub env_c: f64,
    /// Transmit powers P_0, P_1, P_2 (W).
    pub p_tx: [f64; 3],
    /// Biasing factors B_0, B_1, B_2 (linear).
    pub bias: [f64; 3],
    /// Noise variances sigma_k^2 (W).
    pub noise: [f64; 3],
    /// SINR thresholds Gamma_k (linear).
    pub sinr_threshold: [f64; 3],
}

impl SystemParams {
    /// Baseline parameter point used throughout the experiments:
    /// lambda_U = 1e-4, lambda_B = 1e-5, H = 10 m, sigma_c = 5 m,
    /// alpha = 3 / 3.5 / 3.5, eta = 1 / 10 / 1, b = 11.95, c = 0.136,
    /// P = 37 / 37 / 40 dBm, B = 1, Gamma = 0 dB, noise = -90 dBm.
    pub fn defaults() -> Self {
        SystemParams {
            lambda_u: 1e-4,
            lambda_b: 1e-5,
            height: 10.0,
            sigma_c: 5.0,
            alpha_los: 3.0,
            alpha_nlos: 3.5,
            alpha_b: 3.5,
            eta_los: 1.0,
            eta_nlos: 10.0,
            eta_b: 1.0,
            env_b: 11.95,
            env_c: 0.136,
            p_tx: [dbm_to_watts(37.0), dbm_to_watts(37.0), dbm_to_watts(40.0)],
            bias: [1.0, 1.0, 1.0],
            noise: [dbm_to_watts(-90.0); 3],
            sinr_threshold: [1.0, 1.0, 1.0],
        }
    }

    /// Biased transmit power P_k * B_k of tier `k`.
    pub fn biased_power(&self, k: usize) -> f64 {
        self.p_tx[k] * self.bias[k]
    }
}

/// Parameters of the multi-height extension: M groups of field UAVs, the
/// m-th group at altitude `heights[m-1]` with density `lambda_m[m-1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiHeightParams {
    pub heights: Vec<f64>,
    pub lambda_m: Vec<f64>,
    /// Per-group transmit powers (W).
    pub p_tx_m: Vec<f64>,
    /// Per-group biasing factors (linear).
    pub bias_m: Vec<f64>,
    /// Height group (1-based) whose cluster the typical user belongs to.
    /// The cluster-center UAV inherits this group's altitude, power and bias.
    pub anchor_tier: usize,
}

impl MultiHeightParams {
    pub fn group_count(&self) -> usize {
        self.heights.len()
    }
}

/// One failed validation check.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{field}: {reason}")]
pub struct Violation {
    pub field: &'static str,
    pub reason: &'static str,
}

/// Converts a power in dBm to watts: 10^((x - 30)/10).
pub fn dbm_to_watts(x: f64) -> f64 {
    10f64.powf((x - 30.0) / 10.0)
}

/// Converts a ratio in dB to linear: 10^(x/10).
pub fn db_to_linear(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

/// Checks every invariant of `params` and returns it unchanged when valid;
/// otherwise returns the full list of violated invariants.
pub fn validate(params: SystemParams) -> Result<SystemParams, Vec<Violation>> {
    let mut errs = Vec::new();
    let mut check = |ok: bool, field: &'static str, reason: &'static str| {
        if !ok {
            errs.push(Violation { field, reason });
        }
    };

    check(params.lambda_u >= 0.0 && params.lambda_u.is_finite(), "lambda_u", "must be nonnegative");
    check(params.lambda_b >= 0.0 && params.lambda_b.is_finite(), "lambda_b", "must be nonnegative");
    check(params.height > 0.0 && params.height.is_finite(), "height", "must be positive");
    check(params.sigma_c > 0.0 && params.sigma_c.is_finite(), "sigma_c", "must be positive");
    check(params.alpha_los > 2.0, "alpha_los", "must exceed 2");
    check(params.alpha_nlos > 2.0, "alpha_nlos", "must exceed 2");
    check(params.alpha_b > 2.0, "alpha_b", "must exceed 2");
    check(params.eta_los > 0.0, "eta_los", "must be positive");
    check(params.eta_nlos > 0.0, "eta_nlos", "must be positive");
    check(params.eta_b > 0.0, "eta_b", "must be positive");
    check(params.env_b > 0.0 && params.env_b.is_finite(), "env_b", "must be positive");
    check(params.env_c > 0.0 && params.env_c.is_finite(), "env_c", "must be positive");
    check(params.p_tx.iter().all(|p| *p > 0.0 && p.is_finite()), "p_tx", "must be positive");
    check(params.bias.iter().all(|b| *b > 0.0 && b.is_finite()), "bias", "must be positive");
    check(params.noise.iter().all(|n| *n >= 0.0 && n.is_finite()), "noise", "must be nonnegative");
    check(
        params.sinr_threshold.iter().all(|g| *g > 0.0 && g.is_finite()),
        "sinr_threshold",
        "must be positive",
    );

    if errs.is_empty() {
        Ok(params)
    } else {
        Err(errs)
    }
}

/// Validates the multi-height extension against its base parameters.
///
/// The group densities must sum to `base.lambda_u` (within relative 1e-12)
/// so that the multi-height model is a thinning of the baseline UAV process.
pub fn validate_multi_height(
    mh: MultiHeightParams,
    base: &SystemParams,
) -> Result<MultiHeightParams, Vec<Violation>> {
    let mut errs = Vec::new();
    let m = mh.heights.len();
    if m == 0 {
        errs.push(Violation { field: "heights", reason: "must have at least one group" });
    }
    if mh.lambda_m.len() != m || mh.p_tx_m.len() != m || mh.bias_m.len() != m {
        errs.push(Violation {
            field: "lambda_m/p_tx_m/bias_m",
            reason: "must all have the same length as heights",
        });
        return Err(errs);
    }
    if mh.heights.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
        errs.push(Violation { field: "heights", reason: "must be positive" });
    }
    if mh.lambda_m.iter().any(|l| !(*l >= 0.0 && l.is_finite())) {
        errs.push(Violation { field: "lambda_m", reason: "must be nonnegative" });
    }
    if mh.p_tx_m.iter().any(|p| !(*p > 0.0 && p.is_finite())) {
        errs.push(Violation { field: "p_tx_m", reason: "must be positive" });
    }
    if mh.bias_m.iter().any(|b| !(*b > 0.0 && b.is_finite())) {
        errs.push(Violation { field: "bias_m", reason: "must be positive" });
    }
    let sum: f64 = mh.lambda_m.iter().sum();
    let scale = base.lambda_u.abs().max(f64::MIN_POSITIVE);
    if ((sum - base.lambda_u) / scale).abs() > 1e-12 {
        errs.push(Violation { field: "lambda_m", reason: "group densities must sum to lambda_u" });
    }
    if !(1..=m).contains(&mh.anchor_tier) {
        errs.push(Violation { field: "anchor_tier", reason: "must be within 1..=M" });
    }
    if errs.is_empty() {
        Ok(mh)
    } else {
        Err(errs)
    }
}

/// Internal per-tier view shared by the analytic engine and the simulator.
///
/// Row 0 is the cluster-center UAV, rows `1..=M` the field-UAV groups and
/// the last row the ground BSs, matching the tier ordering of the coverage
/// and association formulas. The baseline model is the `M = 1` layout.
#[derive(Debug, Clone)]
pub(crate) struct TierLayout {
    /// Altitude of the anchor group (serving the typical user's cluster).
    pub center_height: f64,
    pub center_power: f64,
    pub center_bias: f64,
    /// Field groups: (height, density, power, bias).
    pub fields: Vec<FieldGroup>,
    pub bs_power: f64,
    pub bs_bias: f64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct FieldGroup {
    pub height: f64,
    pub lambda: f64,
    pub power: f64,
    pub bias: f64,
}

impl TierLayout {
    pub fn baseline(p: &SystemParams) -> Self {
        TierLayout {
            center_height: p.height,
            center_power: p.p_tx[0],
            center_bias: p.bias[0],
            fields: vec![FieldGroup {
                height: p.height,
                lambda: p.lambda_u,
                power: p.p_tx[1],
                bias: p.bias[1],
            }],
            bs_power: p.p_tx[2],
            bs_bias: p.bias[2],
        }
    }

    pub fn multi_height(p: &SystemParams, mh: &MultiHeightParams) -> Self {
        let anchor = mh.anchor_tier - 1;
        TierLayout {
            center_height: mh.heights[anchor],
            center_power: mh.p_tx_m[anchor],
            center_bias: mh.bias_m[anchor],
            fields: (0..mh.group_count())
                .map(|i| FieldGroup {
                    height: mh.heights[i],
                    lambda: mh.lambda_m[i],
                    power: mh.p_tx_m[i],
                    bias: mh.bias_m[i],
                })
                .collect(),
            bs_power: p.p_tx[2],
            bs_bias: p.bias[2],
        }
    }

    pub fn center_biased_power(&self) -> f64 {
        self.center_power * self.center_bias
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dbm_scale_identities() {
        assert!((dbm_to_watts(30.0) - 1.0).abs() < 1e-15);
        assert!((dbm_to_watts(40.0) - 10.0).abs() < 1e-14);
        assert!((dbm_to_watts(-90.0) - 1e-12).abs() < 1e-27);
    }

    #[test]
    fn defaults_are_valid() {
        let p = SystemParams::defaults();
        assert!(validate(p).is_ok());
    }

    #[test]
    fn alpha_at_convergence_boundary_rejected() {
        let p = SystemParams { alpha_los: 2.0, ..SystemParams::defaults() };
        let errs = validate(p).unwrap_err();
        assert!(errs.iter().any(|v| v.field == "alpha_los" && v.reason.contains("exceed 2")));
    }

    #[test]
    fn degenerate_cluster_rejected() {
        let p = SystemParams { sigma_c: 0.0, ..SystemParams::defaults() };
        let errs = validate(p).unwrap_err();
        assert!(errs.iter().any(|v| v.field == "sigma_c" && v.reason.contains("positive")));
    }

    #[test]
    fn multiple_violations_all_reported() {
        let p = SystemParams {
            sigma_c: -1.0,
            alpha_b: 1.5,
            lambda_u: -1e-4,
            ..SystemParams::defaults()
        };
        let errs = validate(p).unwrap_err();
        assert_eq!(errs.len(), 3);
    }

    #[test]
    fn validate_is_idempotent() {
        let p = SystemParams::defaults();
        let once = validate(p.clone()).unwrap();
        let twice = validate(once.clone()).unwrap();
        assert_eq!(once, twice);
        assert_eq!(once, p);
    }

    #[test]
    fn multi_height_density_sum_enforced() {
        let base = SystemParams::defaults();
        let ok = MultiHeightParams {
            heights: vec![10.0, 20.0],
            lambda_m: vec![5e-5, 5e-5],
            p_tx_m: vec![base.p_tx[1]; 2],
            bias_m: vec![1.0; 2],
            anchor_tier: 1,
        };
        assert!(validate_multi_height(ok.clone(), &base).is_ok());

        let bad = MultiHeightParams { lambda_m: vec![5e-5, 6e-5], ..ok.clone() };
        let errs = validate_multi_height(bad, &base).unwrap_err();
        assert!(errs.iter().any(|v| v.field == "lambda_m"));

        let bad_anchor = MultiHeightParams { anchor_tier: 3, ..ok };
        assert!(validate_multi_height(bad_anchor, &base).is_err());
    }

    proptest! {
        #[test]
        fn dbm_is_increasing_and_decade_scaled(x in -120.0f64..60.0) {
            let w = dbm_to_watts(x);
            prop_assert!(dbm_to_watts(x + 0.5) > w);
            let decade = dbm_to_watts(x + 10.0);
            prop_assert!((decade / w - 10.0).abs() < 1e-12);
        }
    }
}
