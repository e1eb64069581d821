//! Distributional building blocks of the path-loss model: LOS probability,
//! per-tier path-loss laws, the CCDF/PDF of the cluster-center (tier 0)
//! path loss, and the intensity measures of the field-UAV and BS path-loss
//! processes.
//!
//! Conventions used throughout:
//!
//! * `state` selects the LOS/NLOS parameter pair (eta_s, alpha_s);
//! * the UAV path-loss support starts at `eta_s * H^alpha_s` because a UAV
//!   is never closer than its altitude; `(x/eta_s)^{2/alpha_s} - H^2` is
//!   clamped at zero wherever it appears, which extends each formula
//!   continuously below support;
//! * the LOS probability always takes a horizontal distance, so path-loss
//!   arguments are converted back through [`horizontal_distance`] first.
//!
//! Most operations have `*_at` variants taking an explicit altitude (and
//! density where relevant); the plain forms use the baseline height in
//! [`SystemParams`]. The multi-height engine reuses the `*_at` forms with
//! per-group altitudes and densities.

use std::f64::consts::PI;

use crate::model::{LinkState, SystemParams, TierRef};
use crate::quadrature::{self, QuadratureError, Tolerance};

/// Per-state distribution bundle of one tier's path-loss process: its
/// support, CCDF, density and (for the point-process tiers) intensity
/// measure, all viewed through one handle.
///
/// The ground-BS tier carries a single implicit state; its `state` field
/// is ignored by the formulas.
#[derive(Debug, Clone, Copy)]
pub struct PathLossLaw<'a> {
    pub tier: TierRef,
    pub state: LinkState,
    pub params: &'a SystemParams,
    /// Smallest attainable path loss: `eta_s H^{alpha_s}` for UAV tiers
    /// (a UAV is never closer than its altitude), zero for the BS tier.
    pub support_min: f64,
}

impl<'a> PathLossLaw<'a> {
    pub fn new(params: &'a SystemParams, tier: TierRef, state: LinkState) -> Self {
        let support_min = match tier {
            TierRef::GroundBs => 0.0,
            _ => support_min(params, state),
        };
        PathLossLaw { tier, state, params, support_min }
    }

    /// Tail probability of this law at path loss `x`.
    ///
    /// For the center UAV this is the per-state Rayleigh factor; for the
    /// process tiers it is the void probability `exp(-Lambda([0,x)))`.
    pub fn ccdf(&self, x: f64, tol: Tolerance) -> Result<f64, QuadratureError> {
        match self.tier {
            TierRef::CenterUav => Ok(ccdf_l0_state_factor(self.params, x, self.state)),
            TierRef::FieldUav(_) => ccdf_l1_state(self.params, x, self.state, tol),
            TierRef::GroundBs => Ok(ccdf_l2(self.params, x)),
        }
    }

    /// Density of the law: the path-loss PDF for the center UAV, the
    /// intensity density for the process tiers.
    pub fn density(&self, x: f64) -> f64 {
        match self.tier {
            TierRef::CenterUav => pdf_l0(self.params, x, self.state),
            TierRef::FieldUav(_) => intensity_density_l1(self.params, x, self.state),
            TierRef::GroundBs => intensity_density_l2(self.params, x),
        }
    }

    /// Expected number of process points below path loss `x`; zero for the
    /// center UAV, which is a single point rather than a process.
    pub fn intensity(&self, x: f64, tol: Tolerance) -> Result<f64, QuadratureError> {
        match self.tier {
            TierRef::CenterUav => Ok(0.0),
            TierRef::FieldUav(_) => intensity_l1(self.params, x, self.state, tol),
            TierRef::GroundBs => Ok(intensity_l2(self.params, x)),
        }
    }
}

/// LOS probability of a UAV link at horizontal distance `r` and the
/// baseline altitude: `1 / (1 + b exp(-c (theta_deg - b)))` where
/// `theta_deg` is the elevation angle in degrees (90 at `r = 0`).
pub fn p_los(params: &SystemParams, r: f64) -> f64 {
    p_los_at(params, params.height, r)
}

pub(crate) fn p_los_at(params: &SystemParams, height: f64, r: f64) -> f64 {
    let theta_deg = height.atan2(r).to_degrees();
    1.0 / (1.0 + params.env_b * (-params.env_c * (theta_deg - params.env_b)).exp())
}

/// Probability of link state `state` at horizontal distance `r`.
pub fn p_state(params: &SystemParams, r: f64, state: LinkState) -> f64 {
    p_state_at(params, params.height, r, state)
}

pub(crate) fn p_state_at(params: &SystemParams, height: f64, r: f64, state: LinkState) -> f64 {
    match state {
        LinkState::Los => p_los_at(params, height, r),
        LinkState::Nlos => 1.0 - p_los_at(params, height, r),
    }
}

/// (eta_s, alpha_s) for the given link state.
pub(crate) fn state_law(params: &SystemParams, state: LinkState) -> (f64, f64) {
    match state {
        LinkState::Los => (params.eta_los, params.alpha_los),
        LinkState::Nlos => (params.eta_nlos, params.alpha_nlos),
    }
}

/// UAV path loss at horizontal distance `r`: `eta_s (r^2 + H^2)^{alpha_s/2}`.
pub fn pathloss_uav(params: &SystemParams, r: f64, state: LinkState) -> f64 {
    pathloss_uav_at(params, params.height, r, state)
}

pub(crate) fn pathloss_uav_at(params: &SystemParams, height: f64, r: f64, state: LinkState) -> f64 {
    let (eta, alpha) = state_law(params, state);
    eta * (r * r + height * height).powf(0.5 * alpha)
}

/// Ground-BS path loss at distance `r`: `eta_B r^{alpha_B}`.
pub fn pathloss_bs(params: &SystemParams, r: f64) -> f64 {
    params.eta_b * r.powf(params.alpha_b)
}

/// Smallest attainable UAV path loss in `state`: `eta_s H^{alpha_s}`.
pub fn support_min(params: &SystemParams, state: LinkState) -> f64 {
    support_min_at(params, params.height, state)
}

pub(crate) fn support_min_at(params: &SystemParams, height: f64, state: LinkState) -> f64 {
    let (eta, alpha) = state_law(params, state);
    eta * height.powf(alpha)
}

/// Horizontal distance at which a state-`s` UAV link has path loss `x`:
/// `sqrt(max(0, (x/eta_s)^{2/alpha_s} - H^2))`, the inverse of
/// [`pathloss_uav`] clamped at the support boundary.
pub fn horizontal_distance(params: &SystemParams, x: f64, state: LinkState) -> f64 {
    horizontal_distance_at(params, params.height, x, state)
}

pub(crate) fn horizontal_distance_at(
    params: &SystemParams,
    height: f64,
    x: f64,
    state: LinkState,
) -> f64 {
    let (eta, alpha) = state_law(params, state);
    ((x / eta).powf(2.0 / alpha) - height * height).max(0.0).sqrt()
}

/// Per-state CCDF factor of the tier-0 path loss, the Rayleigh tail
/// `exp(-(1/(2 sigma_c^2)) ((x/eta_s)^{2/alpha_s} - H^2))`, clamped to 1
/// below support.
pub fn ccdf_l0_state_factor(params: &SystemParams, x: f64, state: LinkState) -> f64 {
    ccdf_l0_state_factor_at(params, params.height, x, state)
}

pub(crate) fn ccdf_l0_state_factor_at(
    params: &SystemParams,
    height: f64,
    x: f64,
    state: LinkState,
) -> f64 {
    let r = horizontal_distance_at(params, height, x, state);
    (-r * r / (2.0 * params.sigma_c * params.sigma_c)).exp()
}

/// Closed-form CCDF of the tier-0 path loss:
/// `sum_s P_s(r_s(x)) exp(-(r_s(x))^2 / (2 sigma_c^2))`.
///
/// The state weight is evaluated at the inversion radius `r_s(x)`, which
/// decouples the link state from the cluster distance. The result is exact
/// at the density level (see [`pdf_l0`]) but is not the tail integral of
/// that density; [`ccdf_l0_exact`] computes the true tail, and the two can
/// differ noticeably (and this closed form can even be locally increasing)
/// when the cluster spread straddles the LOS-to-NLOS transition region.
pub fn ccdf_l0(params: &SystemParams, x: f64) -> f64 {
    ccdf_l0_at(params, params.height, x)
}

pub(crate) fn ccdf_l0_at(params: &SystemParams, height: f64, x: f64) -> f64 {
    LinkState::BOTH
        .iter()
        .map(|&s| {
            let r = horizontal_distance_at(params, height, x, s);
            p_state_at(params, height, r, s) * ccdf_l0_state_factor_at(params, height, x, s)
        })
        .sum()
}

/// Tail probability of the tier-0 path loss under the distance-dependent
/// link-state model, `sum_s int_{r_s(x)}^inf P_s(t) f_D(t) dt`, evaluated
/// by quadrature. This is the tail integral of the joint density used by
/// [`pdf_l0`] weighted with `P_s(r_s(l))`, hence the exact complement to
/// the association and coverage densities.
pub fn ccdf_l0_exact(params: &SystemParams, x: f64, tol: Tolerance) -> Result<f64, QuadratureError> {
    ccdf_l0_exact_at(params, params.height, x, tol)
}

pub(crate) fn ccdf_l0_exact_at(
    params: &SystemParams,
    height: f64,
    x: f64,
    tol: Tolerance,
) -> Result<f64, QuadratureError> {
    let sig2 = params.sigma_c * params.sigma_c;
    let mut total = 0.0;
    for &s in &LinkState::BOTH {
        let r = horizontal_distance_at(params, height, x, s);
        let tail = quadrature::integrate_semi_infinite(
            |t| p_state_at(params, height, t, s) * (t / sig2) * (-t * t / (2.0 * sig2)).exp(),
            r,
            tol,
        )?;
        total += tail.value;
    }
    Ok(total)
}

/// PDF of the tier-0 path loss in state `s`:
/// `(1/sigma_c^2) x^{2/alpha_s - 1} / (alpha_s eta_s^{2/alpha_s})
///  exp(-(1/(2 sigma_c^2))((x/eta_s)^{2/alpha_s} - H^2))`, zero below support.
pub fn pdf_l0(params: &SystemParams, x: f64, state: LinkState) -> f64 {
    pdf_l0_at(params, params.height, x, state)
}

pub(crate) fn pdf_l0_at(params: &SystemParams, height: f64, x: f64, state: LinkState) -> f64 {
    if x < support_min_at(params, height, state) {
        return 0.0;
    }
    let (eta, alpha) = state_law(params, state);
    let sig2 = params.sigma_c * params.sigma_c;
    let jac = x.powf(2.0 / alpha - 1.0) / (alpha * eta.powf(2.0 / alpha));
    jac / sig2 * ccdf_l0_state_factor_at(params, height, x, state)
}

/// Joint density of (state = s, tier-0 path loss = x):
/// `P_s(r_s(x)) * f_{L0,s}(x)`. Summed over states it integrates to one.
pub fn pdf_l0_weighted(params: &SystemParams, x: f64, state: LinkState) -> f64 {
    pdf_l0_weighted_at(params, params.height, x, state)
}

pub(crate) fn pdf_l0_weighted_at(
    params: &SystemParams,
    height: f64,
    x: f64,
    state: LinkState,
) -> f64 {
    let r = horizontal_distance_at(params, height, x, state);
    p_state_at(params, height, r, state) * pdf_l0_at(params, height, x, state)
}

/// Expected number of state-`s` field UAVs with path loss below `x`:
/// `2 pi lambda_U int_0^{r_s(x)} P_s(r) r dr`, zero at or below support.
pub fn intensity_l1(
    params: &SystemParams,
    x: f64,
    state: LinkState,
    tol: Tolerance,
) -> Result<f64, QuadratureError> {
    intensity_l1_at(params, params.height, params.lambda_u, x, state, tol)
}

pub(crate) fn intensity_l1_at(
    params: &SystemParams,
    height: f64,
    lambda: f64,
    x: f64,
    state: LinkState,
    tol: Tolerance,
) -> Result<f64, QuadratureError> {
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let radius = horizontal_distance_at(params, height, x, state);
    if radius <= 0.0 {
        return Ok(0.0);
    }
    let integral = quadrature::integrate(
        |r| p_state_at(params, height, r, state) * r,
        0.0,
        radius,
        tol,
    )?;
    Ok(2.0 * PI * lambda * integral.value)
}

/// Combined tier-1 intensity `Lambda_1([0,x)) = sum_s Lambda_{1,s}([0,x))`.
pub fn intensity_l1_total(
    params: &SystemParams,
    x: f64,
    tol: Tolerance,
) -> Result<f64, QuadratureError> {
    intensity_l1_total_at(params, params.height, params.lambda_u, x, tol)
}

pub(crate) fn intensity_l1_total_at(
    params: &SystemParams,
    height: f64,
    lambda: f64,
    x: f64,
    tol: Tolerance,
) -> Result<f64, QuadratureError> {
    let mut total = 0.0;
    for &s in &LinkState::BOTH {
        total += intensity_l1_at(params, height, lambda, x, s, tol)?;
    }
    Ok(total)
}

/// Expected number of BSs with path loss below `x`:
/// `pi lambda_B (x/eta_B)^{2/alpha_B}`.
pub fn intensity_l2(params: &SystemParams, x: f64) -> f64 {
    intensity_l2_with(params, params.lambda_b, x)
}

pub(crate) fn intensity_l2_with(params: &SystemParams, lambda: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    PI * lambda * (x / params.eta_b).powf(2.0 / params.alpha_b)
}

/// Intensity density of the state-`s` field-UAV path-loss process:
/// `2 pi lambda_U x^{2/alpha_s - 1} / (alpha_s eta_s^{2/alpha_s}) P_s(r_s(x))`,
/// zero at or below support.
pub fn intensity_density_l1(params: &SystemParams, x: f64, state: LinkState) -> f64 {
    intensity_density_l1_at(params, params.height, params.lambda_u, x, state)
}

pub(crate) fn intensity_density_l1_at(
    params: &SystemParams,
    height: f64,
    lambda: f64,
    x: f64,
    state: LinkState,
) -> f64 {
    if x <= support_min_at(params, height, state) {
        return 0.0;
    }
    let (eta, alpha) = state_law(params, state);
    let r = horizontal_distance_at(params, height, x, state);
    2.0 * PI * lambda * x.powf(2.0 / alpha - 1.0) / (alpha * eta.powf(2.0 / alpha))
        * p_state_at(params, height, r, state)
}

/// Intensity density of the BS path-loss process:
/// `2 pi lambda_B x^{2/alpha_B - 1} / (alpha_B eta_B^{2/alpha_B})`.
pub fn intensity_density_l2(params: &SystemParams, x: f64) -> f64 {
    intensity_density_l2_with(params, params.lambda_b, x)
}

pub(crate) fn intensity_density_l2_with(params: &SystemParams, lambda: f64, x: f64) -> f64 {
    2.0 * PI * lambda * x.powf(2.0 / params.alpha_b - 1.0)
        / (params.alpha_b * params.eta_b.powf(2.0 / params.alpha_b))
}

/// CCDF of the state-`s` field-UAV path loss: `exp(-Lambda_{1,s}([0,x)))`.
pub fn ccdf_l1_state(
    params: &SystemParams,
    x: f64,
    state: LinkState,
    tol: Tolerance,
) -> Result<f64, QuadratureError> {
    Ok((-intensity_l1(params, x, state, tol)?).exp())
}

/// Combined tier-1 path-loss CCDF: `exp(-Lambda_1([0,x)))` with
/// `Lambda_1 = Lambda_{1,LOS} + Lambda_{1,NLOS}`.
pub fn ccdf_l1(params: &SystemParams, x: f64, tol: Tolerance) -> Result<f64, QuadratureError> {
    Ok((-intensity_l1_total(params, x, tol)?).exp())
}

/// Tier-2 path-loss CCDF: `exp(-Lambda_2([0,x)))`.
pub fn ccdf_l2(params: &SystemParams, x: f64) -> f64 {
    (-intensity_l2(params, x)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SystemParams;

    const INNER: Tolerance = Tolerance::INNER;

    fn table() -> SystemParams {
        SystemParams::defaults()
    }

    #[test]
    fn p_los_overhead_and_45_degrees() {
        let p = table();
        // direct scalar evaluation of the elevation-angle logistic
        let expect_overhead = 1.0 / (1.0 + 11.95 * (-0.136f64 * (90.0 - 11.95)).exp());
        assert!((p_los(&p, 0.0) - expect_overhead).abs() < 1e-12);
        assert!((expect_overhead - 0.99971).abs() < 5e-6);
        let expect_45 = 1.0 / (1.0 + 11.95 * (-0.136f64 * (45.0 - 11.95)).exp());
        assert!((p_los(&p, 10.0) - expect_45).abs() < 1e-12);
        assert!((expect_45 - 0.8823).abs() < 1e-4);
    }

    #[test]
    fn p_los_is_decreasing_in_distance() {
        let p = table();
        let mut prev = p_los(&p, 0.0);
        for i in 1..200 {
            let r = i as f64;
            let cur = p_los(&p, r);
            assert!(cur <= prev, "p_los increased at r = {r}");
            prev = cur;
        }
    }

    #[test]
    fn uav_pathloss_values_and_inverse() {
        let p = table();
        assert!((pathloss_uav(&p, 0.0, LinkState::Los) - 1000.0).abs() < 1e-9);
        let nlos0 = pathloss_uav(&p, 0.0, LinkState::Nlos);
        assert!((nlos0 - 10.0 * 10f64.powf(3.5)).abs() < 1e-8);
        // invertibility: horizontal distance recovered from the path loss
        for r in [0.0, 3.0, 17.5, 240.0] {
            for s in LinkState::BOTH {
                let x = pathloss_uav(&p, r, s);
                assert!((horizontal_distance(&p, x, s) - r).abs() < 1e-8 * (1.0 + r));
            }
        }
    }

    #[test]
    fn bs_pathloss_values() {
        let p = table();
        assert!((pathloss_bs(&p, 1.0) - 1.0).abs() < 1e-12);
        assert!((pathloss_bs(&p, 100.0) - 1e7).abs() < 1e-4);
        assert_eq!(pathloss_bs(&p, 0.0), 0.0);
    }

    #[test]
    fn ccdf_l0_support_and_tail() {
        let p = table();
        // at the smallest support the LOS factor is P_LOS(0) and the NLOS
        // state is clamped, so the two weights sum to exactly one
        let x0 = support_min(&p, LinkState::Los);
        assert!((x0 - 1000.0).abs() < 1e-9);
        assert!((ccdf_l0(&p, x0) - 1.0).abs() < 1e-12);
        assert!(ccdf_l0(&p, 1e12) < 1e-12);
    }

    #[test]
    fn ccdf_l0_closed_form_is_not_monotone_at_table_point() {
        // The closed form evaluates the NLOS weight at the inversion radius,
        // which collapses to P_NLOS(0) over the whole clamp region
        // [1000, eta_N H^alpha_N); just above that boundary the weight grows
        // toward the cluster-average NLOS probability, so the curve rises.
        // This documents the artifact; the true tail is ccdf_l0_exact.
        let p = table();
        let clamp_edge = support_min(&p, LinkState::Nlos);
        let below = ccdf_l0(&p, clamp_edge);
        let above = ccdf_l0(&p, 3.0 * clamp_edge);
        assert!(
            above > 10.0 * below,
            "expected the documented rise, got {below:.3e} -> {above:.3e}"
        );
    }

    #[test]
    fn ccdf_l0_exact_is_monotone_and_tracks_state_mass() {
        let p = table();
        let mut prev = f64::INFINITY;
        for i in 0..200 {
            let x = 10f64.powf(3.0 + 4.0 * i as f64 / 199.0);
            let v = ccdf_l0_exact(&p, x, INNER).unwrap();
            assert!(v <= prev + 1e-9, "exact ccdf rose at x = {x}");
            assert!((0.0..=1.0 + 1e-9).contains(&v));
            prev = v;
        }
        assert!((ccdf_l0_exact(&p, 1000.0, INNER).unwrap() - 1.0).abs() < 1e-7);
    }

    #[test]
    fn pdf_l0_normalizes_per_state() {
        // pushforward of the Rayleigh cluster density: integrates to one
        let p = table();
        for s in LinkState::BOTH {
            let lo = support_min(&p, s);
            let total = quadrature::integrate_semi_infinite(
                |x| pdf_l0(&p, x, s),
                lo,
                Tolerance::default(),
            )
            .unwrap();
            assert!((total.value - 1.0).abs() < 1e-6, "state {s:?}: {}", total.value);
        }
    }

    #[test]
    fn pdf_l0_weighted_normalizes_over_states() {
        let p = table();
        let lo = support_min(&p, LinkState::Los);
        let total = quadrature::integrate_semi_infinite_with_breakpoints(
            |x| LinkState::BOTH.iter().map(|&s| pdf_l0_weighted(&p, x, s)).sum::<f64>(),
            lo,
            &[support_min(&p, LinkState::Nlos)],
            Tolerance::default(),
        )
        .unwrap();
        assert!((total.value - 1.0).abs() < 1e-6, "{}", total.value);
    }

    #[test]
    fn pdf_l0_zero_below_support() {
        let p = table();
        assert_eq!(pdf_l0(&p, 999.0, LinkState::Los), 0.0);
        assert_eq!(pdf_l0(&p, 3e4, LinkState::Nlos), 0.0);
    }

    #[test]
    fn pdf_l0_matches_state_ccdf_derivative() {
        let p = table();
        for s in LinkState::BOTH {
            let lo = support_min(&p, s);
            for i in 1..40 {
                let x = lo * (1.0 + 0.35 * i as f64);
                let h = x * 1e-6;
                let num = -(ccdf_l0_state_factor(&p, x + h, s)
                    - ccdf_l0_state_factor(&p, x - h, s))
                    / (2.0 * h);
                let ana = pdf_l0(&p, x, s);
                assert!(
                    (num - ana).abs() <= 1e-5 * ana.abs().max(1e-300),
                    "state {s:?} x={x}: fd {num:e} vs pdf {ana:e}"
                );
            }
        }
    }

    #[test]
    fn intensity_l1_vanishes_at_support() {
        let p = table();
        for s in LinkState::BOTH {
            let lo = support_min(&p, s);
            assert_eq!(intensity_l1(&p, lo, s, INNER).unwrap(), 0.0);
            assert_eq!(intensity_l1(&p, 0.5 * lo, s, INNER).unwrap(), 0.0);
            assert!(intensity_l1(&p, 4.0 * lo, s, INNER).unwrap() > 0.0);
        }
    }

    #[test]
    fn intensity_l1_parameter_collapse() {
        // with identical LOS/NLOS laws the thinning probabilities sum to one
        // and the total intensity has the closed form pi lambda ((x/eta)^{2/alpha} - H^2)
        let p = SystemParams {
            eta_nlos: 1.0,
            alpha_nlos: 3.0,
            ..table()
        };
        for x in [2e3, 1e4, 1e6] {
            let total = intensity_l1_total(&p, x, INNER).unwrap();
            let expect = PI * p.lambda_u * ((x / p.eta_los).powf(2.0 / p.alpha_los) - 100.0);
            assert!((total - expect).abs() < 1e-8 * expect, "x={x}: {total} vs {expect}");
        }
    }

    #[test]
    fn intensity_l1_collapse_removes_environment_dependence() {
        let p1 = SystemParams { eta_nlos: 1.0, alpha_nlos: 3.0, ..table() };
        let p2 = SystemParams { env_b: 4.88, env_c: 0.429, ..p1.clone() };
        for x in [2e3, 5e4] {
            let a = intensity_l1_total(&p1, x, INNER).unwrap();
            let b = intensity_l1_total(&p2, x, INNER).unwrap();
            assert!((a - b).abs() < 1e-9 * a.max(1e-30));
        }
    }

    #[test]
    fn intensity_l2_values() {
        let p = table();
        assert_eq!(intensity_l2(&p, 0.0), 0.0);
        // direct scalar evaluation: pi * 1e-5 * (1e6)^{4/7}
        let expect = PI * 1e-5 * 1e6f64.powf(4.0 / 7.0);
        assert!((intensity_l2(&p, 1e6) - expect).abs() < 1e-12);
        assert!((expect - 8.43e-2).abs() < 1e-4);
        let doubled = SystemParams { lambda_b: 2e-5, ..table() };
        assert!((intensity_l2(&doubled, 1e6) - 2.0 * expect).abs() < 1e-12);
    }

    #[test]
    fn intensity_density_l1_consistency() {
        let p = table();
        for s in LinkState::BOTH {
            let lo = support_min(&p, s);
            // fundamental theorem of calculus against the measure
            for x in [2.0 * lo, 8.0 * lo, 40.0 * lo] {
                let measured = intensity_l1(&p, x, s, INNER).unwrap();
                let integrated = quadrature::integrate(
                    |t| intensity_density_l1(&p, t, s),
                    lo,
                    x,
                    Tolerance::default(),
                )
                .unwrap()
                .value;
                assert!(
                    (measured - integrated).abs() < 1e-6 * measured.max(1e-12),
                    "state {s:?} x={x}: {measured} vs {integrated}"
                );
            }
            // finite differences of the measure reproduce the density
            let x = 10.0 * lo;
            let h = x * 1e-5;
            let fd = (intensity_l1(&p, x + h, s, INNER).unwrap()
                - intensity_l1(&p, x - h, s, INNER).unwrap())
                / (2.0 * h);
            let ana = intensity_density_l1(&p, x, s);
            assert!((fd - ana).abs() < 1e-4 * ana, "state {s:?}: {fd:e} vs {ana:e}");
            assert!(intensity_density_l1(&p, 1e4, LinkState::Los) > 0.0);
        }
    }

    #[test]
    fn intensity_density_l1_boundary_uses_zero_distance() {
        let p = table();
        let lo = support_min(&p, LinkState::Los);
        let just_above = lo * (1.0 + 1e-12);
        let d = intensity_density_l1(&p, just_above, LinkState::Los);
        let expect = 2.0 * PI * p.lambda_u * just_above.powf(2.0 / 3.0 - 1.0) / 3.0
            * p_los(&p, 0.0);
        assert!((d - expect).abs() < 1e-6 * expect);
    }

    #[test]
    fn intensity_density_l2_closed_form() {
        let p = table();
        // 2 pi lambda_B / alpha_B at x = 1 with eta_B = 1
        let expect = 2.0 * PI * 1e-5 / 3.5;
        assert!((intensity_density_l2(&p, 1.0) - expect).abs() < 1e-18);
        assert!((expect - 1.795e-5).abs() < 1e-8);
        // derivative consistency with the measure
        for x in [10.0, 1e4, 1e7] {
            let h = x * 1e-6;
            let fd = (intensity_l2(&p, x + h) - intensity_l2(&p, x - h)) / (2.0 * h);
            let ana = intensity_density_l2(&p, x);
            assert!((fd - ana).abs() < 1e-6 * ana);
        }
        let doubled = SystemParams { lambda_b: 2e-5, ..table() };
        assert!((intensity_density_l2(&doubled, 5.0) - 2.0 * intensity_density_l2(&p, 5.0)).abs() < 1e-20);
    }

    #[test]
    fn tier_ccdfs() {
        let p = table();
        // below support the void probability is one
        let lo = support_min(&p, LinkState::Los);
        assert_eq!(ccdf_l1(&p, lo, INNER).unwrap(), 1.0);
        let empty = SystemParams { lambda_u: 0.0, ..table() };
        assert_eq!(ccdf_l1(&empty, 1e9, INNER).unwrap(), 1.0);
        // composition of the Lambda_2 example
        let expect = (-PI * 1e-5 * 1e6f64.powf(4.0 / 7.0)).exp();
        assert!((ccdf_l2(&p, 1e6) - expect).abs() < 1e-12);
        assert!((expect - 0.9192).abs() < 1e-4);
    }

    #[test]
    fn pathloss_law_bundles_are_consistent() {
        let p = table();
        for tier in [TierRef::CenterUav, TierRef::FieldUav(1), TierRef::GroundBs] {
            for s in LinkState::BOTH {
                let law = PathLossLaw::new(&p, tier, s);
                match tier {
                    TierRef::GroundBs => assert_eq!(law.support_min, 0.0),
                    _ => assert!(law.support_min > 0.0),
                }
                let mut prev = f64::INFINITY;
                for i in 0..60 {
                    let x = 10f64.powf(2.0 + 5.0 * i as f64 / 59.0);
                    let c = law.ccdf(x, INNER).unwrap();
                    assert!((0.0..=1.0).contains(&c) && c <= prev + 1e-12, "{tier:?} {s:?}");
                    assert!(law.density(x) >= 0.0);
                    assert!(law.intensity(x, INNER).unwrap() >= 0.0);
                    prev = c;
                }
                if law.support_min > 0.0 {
                    assert_eq!(law.density(0.5 * law.support_min), 0.0);
                    assert_eq!(law.ccdf(0.5 * law.support_min, INNER).unwrap(), 1.0);
                }
            }
        }
    }

    #[test]
    fn tier_ccdfs_monotone_on_log_grid() {
        let p = table();
        let mut prev1 = f64::INFINITY;
        let mut prev2 = f64::INFINITY;
        for i in 0..200 {
            let x = 10f64.powf(2.0 + 6.0 * i as f64 / 199.0);
            let c1 = ccdf_l1(&p, x, INNER).unwrap();
            let c2 = ccdf_l2(&p, x);
            assert!(c1 <= prev1 + 1e-12 && (0.0..=1.0).contains(&c1));
            assert!(c2 <= prev2 + 1e-12 && (0.0..=1.0).contains(&c2));
            for s in LinkState::BOTH {
                let f = ccdf_l0_state_factor(&p, x, s);
                assert!((0.0..=1.0).contains(&f));
            }
            prev1 = c1;
            prev2 = c2;
        }
    }
}
