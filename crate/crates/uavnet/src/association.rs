//! Averaged-biased-received-power association probabilities for the five
//! association events: center UAV in LOS or NLOS, field UAV in LOS or
//! NLOS, and ground BS.
//!
//! The user associates with the tier maximizing `P_k B_k / L_k`, so the
//! probability of each event is an integral over the serving path loss of
//! the event density times the void probabilities of every competitor
//! region. The shared [`Engine`] evaluates those integrands for both the
//! baseline layout and the multi-height extension; the coverage module
//! reuses it with the extra SINR factors multiplied in.

use crate::model::{LinkState, SystemParams, TierLayout};
use crate::pathloss;
use crate::quadrature::{self, QuadratureError, Tolerance};
use crate::EvalError;

/// Which tail function of the center-UAV path loss the engine consumes.
///
/// `ClosedForm` is the printed closed form (state weight evaluated at the
/// inversion radius); `Exact` is the tail integral of the joint
/// state/path-loss density, which is the distribution the simulator
/// samples. The two agree when the cluster is compact relative to the
/// LOS transition region and diverge otherwise; see `ccdf_l0` vs
/// `ccdf_l0_exact`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CenterTailMode {
    ClosedForm,
    Exact,
}

/// Handling of the center-UAV interference Laplace transform when serving
/// from another tier: `Paper` keeps the truncated integral unnormalized,
/// `Conditioned` renormalizes by the truncated mass so the transform is a
/// proper conditional expectation (equal to one at `u = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CenterNormalization {
    Paper,
    Conditioned,
}

/// Knobs of the analytic engine. The defaults are the self-consistent
/// combination (`Exact` tail, `Conditioned` transform) under which the
/// association events partition unity and the analytic results reproduce
/// the Monte Carlo simulator; the `ClosedForm`/`Paper` settings evaluate
/// the printed formulas verbatim for fidelity audits.
#[derive(Debug, Clone, Copy)]
pub struct AnalyticOptions {
    /// Accuracy of the outermost integral of each quantity.
    pub tol_outer: Tolerance,
    /// Accuracy of integrals nested inside another integrand.
    pub tol_inner: Tolerance,
    pub center_tail: CenterTailMode,
    pub center_normalization: CenterNormalization,
}

impl Default for AnalyticOptions {
    fn default() -> Self {
        AnalyticOptions {
            tol_outer: Tolerance::OUTER,
            tol_inner: Tolerance::INNER,
            center_tail: CenterTailMode::Exact,
            center_normalization: CenterNormalization::Conditioned,
        }
    }
}

impl AnalyticOptions {
    /// The printed-formula combination: closed-form center tail and the
    /// unnormalized center-interferer transform.
    pub fn paper_literal() -> Self {
        AnalyticOptions {
            center_tail: CenterTailMode::ClosedForm,
            center_normalization: CenterNormalization::Paper,
            ..AnalyticOptions::default()
        }
    }
}

/// The five association probabilities and the integration slack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssociationProfile {
    pub a0_los: f64,
    pub a0_nlos: f64,
    pub a1_los: f64,
    pub a1_nlos: f64,
    pub a2: f64,
    /// `1 - sum` of the five probabilities; reported, never renormalized
    /// away, so integration-quality regressions stay visible.
    pub residual: f64,
}

impl AssociationProfile {
    pub fn sum(&self) -> f64 {
        self.a0_los + self.a0_nlos + self.a1_los + self.a1_nlos + self.a2
    }
}

/// Shared evaluation context of the analytic engine.
pub(crate) struct Engine<'a> {
    pub params: &'a SystemParams,
    pub layout: TierLayout,
    pub opts: AnalyticOptions,
}

impl<'a> Engine<'a> {
    pub fn baseline(params: &'a SystemParams, opts: AnalyticOptions) -> Self {
        Engine { params, layout: TierLayout::baseline(params), opts }
    }

    pub fn with_layout(params: &'a SystemParams, layout: TierLayout, opts: AnalyticOptions) -> Self {
        Engine { params, layout, opts }
    }

    /// `sum_j Lambda_j([0, (P_j B_j / serving_pb) l))` over every competitor
    /// process (all field groups plus the BS tier).
    pub fn competing_exponent(&self, serving_pb: f64, l: f64) -> Result<f64, QuadratureError> {
        let mut sum = 0.0;
        for g in &self.layout.fields {
            let x = g.power * g.bias / serving_pb * l;
            sum += pathloss::intensity_l1_total_at(
                self.params,
                g.height,
                g.lambda,
                x,
                self.opts.tol_inner,
            )?;
        }
        let xb = self.layout.bs_power * self.layout.bs_bias / serving_pb * l;
        sum += pathloss::intensity_l2_with(self.params, self.params.lambda_b, xb);
        Ok(sum)
    }

    /// Tail probability of the center-UAV path loss per the configured mode.
    pub fn center_tail(&self, x: f64) -> Result<f64, QuadratureError> {
        match self.opts.center_tail {
            CenterTailMode::ClosedForm => {
                Ok(pathloss::ccdf_l0_at(self.params, self.layout.center_height, x))
            }
            CenterTailMode::Exact => {
                pathloss::ccdf_l0_exact_at(self.params, self.layout.center_height, x, self.opts.tol_inner)
            }
        }
    }

    /// Association-weight integrand of the center-UAV event in state `s`.
    pub fn assoc_center_integrand(&self, state: LinkState, l: f64) -> Result<f64, QuadratureError> {
        let dens = pathloss::pdf_l0_weighted_at(self.params, self.layout.center_height, l, state);
        if dens == 0.0 {
            return Ok(0.0);
        }
        let expo = self.competing_exponent(self.layout.center_biased_power(), l)?;
        Ok(dens * (-expo).exp())
    }

    /// Association-weight integrand of the field-group `g` event in state `s`.
    pub fn assoc_field_integrand(
        &self,
        group: usize,
        state: LinkState,
        l: f64,
    ) -> Result<f64, QuadratureError> {
        let g = &self.layout.fields[group];
        let dens = pathloss::intensity_density_l1_at(self.params, g.height, g.lambda, l, state);
        if dens == 0.0 {
            return Ok(0.0);
        }
        let pb = g.power * g.bias;
        let tail = self.center_tail(self.layout.center_biased_power() / pb * l)?;
        let expo = self.competing_exponent(pb, l)?;
        Ok(dens * tail * (-expo).exp())
    }

    /// Association-weight integrand of the BS event.
    pub fn assoc_bs_integrand(&self, l: f64) -> Result<f64, QuadratureError> {
        let dens = pathloss::intensity_density_l2_with(self.params, self.params.lambda_b, l);
        if dens == 0.0 {
            return Ok(0.0);
        }
        let pb = self.layout.bs_power * self.layout.bs_bias;
        let tail = self.center_tail(self.layout.center_biased_power() / pb * l)?;
        let expo = self.competing_exponent(pb, l)?;
        Ok(dens * tail * (-expo).exp())
    }

    /// Path-loss values at which some factor of a serving-tier integrand has
    /// a support kink, scaled back into the serving tier's variable, plus
    /// quantile seeds of the center path-loss law. The seeds matter when the
    /// cluster is much tighter than the support scale: the center density is
    /// then a narrow spike that an unseeded first panel can step over.
    pub fn integrand_breakpoints(&self, serving_pb: f64) -> Vec<f64> {
        let c_scale = serving_pb / self.layout.center_biased_power();
        let mut pts = Vec::new();
        for s in LinkState::BOTH {
            let supp_c = pathloss::support_min_at(self.params, self.layout.center_height, s);
            pts.push(supp_c * c_scale);
            for g in &self.layout.fields {
                let supp = pathloss::support_min_at(self.params, g.height, s);
                pts.push(supp * serving_pb / (g.power * g.bias));
            }
        }
        for l in self.center_density_seeds() {
            pts.push(l * c_scale);
        }
        pts
    }

    /// Path losses of the center UAV at a few cluster-radius quantiles.
    pub fn center_density_seeds(&self) -> Vec<f64> {
        let mut pts = Vec::with_capacity(2 * 5);
        for s in LinkState::BOTH {
            for q in [0.5, 1.0, 2.0, 4.0, 8.0] {
                let d = q * self.params.sigma_c;
                pts.push(pathloss::pathloss_uav_at(self.params, self.layout.center_height, d, s));
            }
        }
        pts
    }

    pub fn assoc_center(&self, state: LinkState) -> Result<f64, EvalError> {
        let ctx = || format!("A0,{}", state.label());
        let lo = pathloss::support_min_at(self.params, self.layout.center_height, state);
        let pb = self.layout.center_biased_power();
        let r = integrate_checked(
            |l| self.assoc_center_integrand(state, l),
            lo,
            &self.integrand_breakpoints(pb),
            self.opts.tol_outer,
        )
        .map_err(|e| EvalError::new(ctx(), e))?;
        Ok(r.value)
    }

    pub fn assoc_field(&self, group: usize, state: LinkState) -> Result<f64, EvalError> {
        let g = &self.layout.fields[group];
        let ctx = || {
            if self.layout.fields.len() == 1 {
                format!("A1,{}", state.label())
            } else {
                format!("A{},{}", group + 1, state.label())
            }
        };
        if g.lambda == 0.0 {
            return Ok(0.0);
        }
        let lo = pathloss::support_min_at(self.params, g.height, state);
        let pb = g.power * g.bias;
        let r = integrate_checked(
            |l| self.assoc_field_integrand(group, state, l),
            lo,
            &self.integrand_breakpoints(pb),
            self.opts.tol_outer,
        )
        .map_err(|e| EvalError::new(ctx(), e))?;
        Ok(r.value)
    }

    pub fn assoc_bs(&self) -> Result<f64, EvalError> {
        if self.params.lambda_b == 0.0 {
            return Ok(0.0);
        }
        let pb = self.layout.bs_power * self.layout.bs_bias;
        let r = integrate_checked(
            |l| self.assoc_bs_integrand(l),
            0.0,
            &self.integrand_breakpoints(pb),
            self.opts.tol_outer,
        )
        .map_err(|e| EvalError::new("A2", e))?;
        Ok(r.value)
    }
}

/// Integrates a fallible integrand over `[lo, inf)`. Inner failures poison
/// the sample with NaN; the first stashed error is reported instead of the
/// resulting NonFinite so the caller sees the root cause.
pub(crate) fn integrate_checked<F>(
    f: F,
    lo: f64,
    breakpoints: &[f64],
    tol: Tolerance,
) -> Result<crate::quadrature::IntegrationResult, QuadratureError>
where
    F: Fn(f64) -> Result<f64, QuadratureError>,
{
    let inner_err = std::cell::RefCell::new(None);
    let result = quadrature::integrate_semi_infinite_with_breakpoints(
        |l| match f(l) {
            Ok(v) => v,
            Err(e) => {
                inner_err.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        lo,
        breakpoints,
        tol,
    );
    match result {
        Ok(r) => Ok(r),
        Err(outer) => Err(inner_err.into_inner().unwrap_or(outer)),
    }
}

/// Probability that the typical user associates with its cluster-center
/// UAV through a state-`s` link.
pub fn assoc_prob_0(params: &SystemParams, state: LinkState) -> Result<f64, EvalError> {
    assoc_prob_0_with(params, state, &AnalyticOptions::default())
}

pub fn assoc_prob_0_with(
    params: &SystemParams,
    state: LinkState,
    opts: &AnalyticOptions,
) -> Result<f64, EvalError> {
    Engine::baseline(params, *opts).assoc_center(state)
}

/// Probability of association with a field UAV through a state-`s` link.
pub fn assoc_prob_1(params: &SystemParams, state: LinkState) -> Result<f64, EvalError> {
    assoc_prob_1_with(params, state, &AnalyticOptions::default())
}

pub fn assoc_prob_1_with(
    params: &SystemParams,
    state: LinkState,
    opts: &AnalyticOptions,
) -> Result<f64, EvalError> {
    Engine::baseline(params, *opts).assoc_field(0, state)
}

/// Probability of association with a ground BS.
pub fn assoc_prob_2(params: &SystemParams) -> Result<f64, EvalError> {
    assoc_prob_2_with(params, &AnalyticOptions::default())
}

pub fn assoc_prob_2_with(params: &SystemParams, opts: &AnalyticOptions) -> Result<f64, EvalError> {
    Engine::baseline(params, *opts).assoc_bs()
}

/// All five association probabilities plus the partition residual.
pub fn assoc_profile(params: &SystemParams) -> Result<AssociationProfile, EvalError> {
    assoc_profile_with(params, &AnalyticOptions::default())
}

pub fn assoc_profile_with(
    params: &SystemParams,
    opts: &AnalyticOptions,
) -> Result<AssociationProfile, EvalError> {
    let engine = Engine::baseline(params, *opts);
    let a0_los = engine.assoc_center(LinkState::Los)?;
    let a0_nlos = engine.assoc_center(LinkState::Nlos)?;
    let a1_los = engine.assoc_field(0, LinkState::Los)?;
    let a1_nlos = engine.assoc_field(0, LinkState::Nlos)?;
    let a2 = engine.assoc_bs()?;
    let sum = a0_los + a0_nlos + a1_los + a1_nlos + a2;
    Ok(AssociationProfile { a0_los, a0_nlos, a1_los, a1_nlos, a2, residual: 1.0 - sum })
}
