//! Laplace transforms of per-tier interference, conditional and total SINR
//! coverage, area spectral efficiency, and the multi-height extension.
//!
//! The total coverage is a sum over association events. For each event the
//! integrand is the association-weight integrand of that event multiplied
//! by the noise factor `exp(-Gamma_k l sigma_k^2 / P_k)` and the Laplace
//! transforms of the interference from every tier, evaluated at
//! `u = Gamma_k l / P_k`. Interferers of tier `j` are confined outside the
//! exclusion threshold `(P_j B_j / P_k B_k) l`, which is where the
//! association rule guarantees no stronger candidate exists.

use crate::association::{AnalyticOptions, CenterNormalization, Engine};
use crate::model::{LinkState, MultiHeightParams, SystemParams, TierLayout, TierRef};
use crate::pathloss;
use crate::quadrature::QuadratureError;
use crate::EvalError;

/// Per-tier path-loss exclusion thresholds around the typical user, fixed
/// by the serving tier and its path loss.
#[derive(Debug, Clone)]
pub struct ExclusionRule {
    pub serving: TierRef,
    pub serving_pathloss: f64,
    /// Threshold below which no center-UAV interferer can exist.
    pub center: f64,
    /// Per-field-group thresholds (index 0 is group 1).
    pub fields: Vec<f64>,
    /// Threshold for BS interferers.
    pub bs: f64,
}

impl ExclusionRule {
    /// Baseline-layout rule for serving tier `serving` at path loss `l`.
    pub fn new(params: &SystemParams, serving: TierRef, l: f64) -> Self {
        Self::for_layout(&TierLayout::baseline(params), serving, l)
    }

    pub(crate) fn for_layout(layout: &TierLayout, serving: TierRef, l: f64) -> Self {
        let serving_pb = match serving {
            TierRef::CenterUav => layout.center_biased_power(),
            TierRef::FieldUav(m) => {
                let g = &layout.fields[m - 1];
                g.power * g.bias
            }
            TierRef::GroundBs => layout.bs_power * layout.bs_bias,
        };
        ExclusionRule {
            serving,
            serving_pathloss: l,
            center: layout.center_biased_power() / serving_pb * l,
            fields: layout.fields.iter().map(|g| g.power * g.bias / serving_pb * l).collect(),
            bs: layout.bs_power * layout.bs_bias / serving_pb * l,
        }
    }
}

/// One association event's contribution to the total coverage:
/// conditional coverage times association weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventTerm {
    pub tier: TierRef,
    /// Link state for UAV events; `None` for the BS event.
    pub state: Option<LinkState>,
    pub value: f64,
}

/// Coverage of one parameter point: per-event terms, their total, and the
/// optional area spectral efficiency (filled when thresholds are uniform).
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub per_event: Vec<EventTerm>,
    pub total: f64,
    pub ase: Option<f64>,
    /// Sum of the outer-integral error estimates behind `total`.
    pub quadrature_err: f64,
    /// Fingerprint of the parameter and option set that produced the report.
    pub params_hash: u64,
}

impl CoverageReport {
    /// Sum of the event terms served by the given tier kind.
    pub fn tier_term(&self, tier: fn(&TierRef) -> bool) -> f64 {
        self.per_event.iter().filter(|t| tier(&t.tier)).map(|t| t.value).sum()
    }

    pub fn center_term(&self) -> f64 {
        self.tier_term(|t| matches!(t, TierRef::CenterUav))
    }

    pub fn field_term(&self) -> f64 {
        self.tier_term(|t| matches!(t, TierRef::FieldUav(_)))
    }

    pub fn bs_term(&self) -> f64 {
        self.tier_term(|t| matches!(t, TierRef::GroundBs))
    }
}

impl<'a> Engine<'a> {
    /// Laplace transform of the center-UAV interference at `u`, given the
    /// exclusion rule. Equal to one when the center UAV itself serves.
    fn laplace_center(&self, u: f64, rule: &ExclusionRule) -> Result<f64, QuadratureError> {
        if matches!(rule.serving, TierRef::CenterUav) {
            return Ok(1.0);
        }
        let height = self.layout.center_height;
        let lo = rule.center;
        let p0 = self.layout.center_power;
        let mut breaks = self.center_density_seeds();
        for s in LinkState::BOTH {
            breaks.push(pathloss::support_min_at(self.params, height, s));
        }
        let numer_r = crate::association::integrate_checked(
            |x| {
                let dens: f64 = LinkState::BOTH
                    .iter()
                    .map(|&s| pathloss::pdf_l0_weighted_at(self.params, height, x, s))
                    .sum();
                Ok(dens / (1.0 + u * p0 / x))
            },
            lo,
            &breaks,
            self.opts.tol_inner,
        )?;
        let numer = numer_r.value;
        match self.opts.center_normalization {
            CenterNormalization::Paper => Ok(numer),
            CenterNormalization::Conditioned => {
                // renormalize by the truncated mass of the same density
                let mass =
                    pathloss::ccdf_l0_exact_at(self.params, height, lo, self.opts.tol_inner)?;
                if mass <= f64::MIN_POSITIVE {
                    Ok(1.0)
                } else {
                    Ok((numer / mass).min(1.0))
                }
            }
        }
    }

    /// Laplace transform of the interference from field group `g` (0-based).
    fn laplace_field_group(
        &self,
        group: usize,
        u: f64,
        rule: &ExclusionRule,
    ) -> Result<f64, QuadratureError> {
        let g = &self.layout.fields[group];
        if g.lambda == 0.0 || u == 0.0 {
            return Ok(1.0);
        }
        let lo = rule.fields[group];
        let p = g.power;
        let mut exponent = 0.0;
        for s in LinkState::BOTH {
            let supp = pathloss::support_min_at(self.params, g.height, s);
            let from = lo.max(supp);
            exponent += crate::association::integrate_checked(
                |x| {
                    let up = u * p / x;
                    Ok(up / (1.0 + up)
                        * pathloss::intensity_density_l1_at(self.params, g.height, g.lambda, x, s))
                },
                from,
                &[supp],
                self.opts.tol_inner,
            )?
            .value;
        }
        Ok((-exponent).exp())
    }

    /// Laplace transform of the BS-tier interference.
    fn laplace_bs(&self, u: f64, rule: &ExclusionRule) -> Result<f64, QuadratureError> {
        if self.params.lambda_b == 0.0 || u == 0.0 {
            return Ok(1.0);
        }
        let p = self.layout.bs_power;
        let exponent = crate::association::integrate_checked(
            |x| {
                let up = u * p / x;
                Ok(up / (1.0 + up)
                    * pathloss::intensity_density_l2_with(self.params, self.params.lambda_b, x))
            },
            rule.bs.max(0.0),
            &[],
            self.opts.tol_inner,
        )?
        .value;
        Ok((-exponent).exp())
    }

    /// Product of all interference Laplace transforms at `u`.
    fn laplace_product(&self, u: f64, rule: &ExclusionRule) -> Result<f64, QuadratureError> {
        let mut prod = self.laplace_center(u, rule)?;
        for g in 0..self.layout.fields.len() {
            prod *= self.laplace_field_group(g, u, rule)?;
            if prod == 0.0 {
                return Ok(0.0);
            }
        }
        prod *= self.laplace_bs(u, rule)?;
        Ok(prod)
    }

    /// Coverage term of the center-UAV event in state `s`:
    /// the association integrand times the SINR factors.
    fn coverage_center(
        &self,
        state: LinkState,
        gamma: f64,
        noise: f64,
    ) -> Result<(f64, f64), EvalError> {
        let ctx = || format!("PC0,{}", state.label());
        let lo = pathloss::support_min_at(self.params, self.layout.center_height, state);
        let p0 = self.layout.center_power;
        let value = crate::association::integrate_checked(
            |l| {
                let dens = self.assoc_center_integrand(state, l)?;
                if dens == 0.0 {
                    return Ok(0.0);
                }
                let u = gamma * l / p0;
                let rule = ExclusionRule::for_layout(&self.layout, TierRef::CenterUav, l);
                Ok(dens * (-u * noise).exp() * self.laplace_product(u, &rule)?)
            },
            lo,
            &self.integrand_breakpoints(self.layout.center_biased_power()),
            self.opts.tol_outer,
        )
        .map_err(|e| EvalError::new(ctx(), e))?;
        Ok((value.value, value.err_estimate))
    }

    fn coverage_field(
        &self,
        group: usize,
        state: LinkState,
        gamma: f64,
        noise: f64,
    ) -> Result<(f64, f64), EvalError> {
        let g = &self.layout.fields[group];
        let ctx = || format!("PC{},{}", group + 1, state.label());
        if g.lambda == 0.0 {
            return Ok((0.0, 0.0));
        }
        let lo = pathloss::support_min_at(self.params, g.height, state);
        let p = g.power;
        let pb = g.power * g.bias;
        let value = crate::association::integrate_checked(
            |l| {
                let dens = self.assoc_field_integrand(group, state, l)?;
                if dens == 0.0 {
                    return Ok(0.0);
                }
                let u = gamma * l / p;
                let rule = ExclusionRule::for_layout(&self.layout, TierRef::FieldUav(group + 1), l);
                Ok(dens * (-u * noise).exp() * self.laplace_product(u, &rule)?)
            },
            lo,
            &self.integrand_breakpoints(pb),
            self.opts.tol_outer,
        )
        .map_err(|e| EvalError::new(ctx(), e))?;
        Ok((value.value, value.err_estimate))
    }

    fn coverage_bs(&self, gamma: f64, noise: f64) -> Result<(f64, f64), EvalError> {
        if self.params.lambda_b == 0.0 {
            return Ok((0.0, 0.0));
        }
        let p = self.layout.bs_power;
        let pb = self.layout.bs_power * self.layout.bs_bias;
        let value = crate::association::integrate_checked(
            |l| {
                let dens = self.assoc_bs_integrand(l)?;
                if dens == 0.0 {
                    return Ok(0.0);
                }
                let u = gamma * l / p;
                let rule = ExclusionRule::for_layout(&self.layout, TierRef::GroundBs, l);
                Ok(dens * (-u * noise).exp() * self.laplace_product(u, &rule)?)
            },
            0.0,
            &self.integrand_breakpoints(pb),
            self.opts.tol_outer,
        )
        .map_err(|e| EvalError::new("PC2", e))?;
        Ok((value.value, value.err_estimate))
    }

    /// Full coverage report over every association event of the layout.
    ///
    /// `thresholds` and the noise variances map by tier class: index 0 for
    /// the center UAV, 1 for every field group, 2 for the BS tier.
    fn coverage_report(&self, thresholds: [f64; 3]) -> Result<CoverageReport, EvalError> {
        let noise = &self.params.noise;
        let mut per_event = Vec::with_capacity(2 * self.layout.fields.len() + 3);
        let mut quadrature_err = 0.0;
        for s in LinkState::BOTH {
            let (value, err) = self.coverage_center(s, thresholds[0], noise[0])?;
            quadrature_err += err;
            per_event.push(EventTerm { tier: TierRef::CenterUav, state: Some(s), value });
        }
        for g in 0..self.layout.fields.len() {
            for s in LinkState::BOTH {
                let (value, err) = self.coverage_field(g, s, thresholds[1], noise[1])?;
                quadrature_err += err;
                per_event.push(EventTerm { tier: TierRef::FieldUav(g + 1), state: Some(s), value });
            }
        }
        let (bs_value, bs_err) = self.coverage_bs(thresholds[2], noise[2])?;
        quadrature_err += bs_err;
        per_event.push(EventTerm { tier: TierRef::GroundBs, state: None, value: bs_value });
        let total = per_event.iter().map(|t| t.value).sum();
        let uniform = thresholds[1] == thresholds[0] && thresholds[2] == thresholds[0];
        let ase = uniform.then(|| ase_from_terms(self.params, &per_event, thresholds[0]));
        Ok(CoverageReport {
            per_event,
            total,
            ase,
            quadrature_err,
            params_hash: fingerprint(self.params, &self.layout, thresholds, &self.opts),
        })
    }
}

/// Area spectral efficiency from per-event coverage terms at a common
/// threshold: `(lambda_U * sum of UAV terms + lambda_B * BS term) log2(1 + Gamma)`.
fn ase_from_terms(params: &SystemParams, terms: &[EventTerm], gamma: f64) -> f64 {
    let uav: f64 = terms
        .iter()
        .filter(|t| !matches!(t.tier, TierRef::GroundBs))
        .map(|t| t.value)
        .sum();
    let bs: f64 = terms
        .iter()
        .filter(|t| matches!(t.tier, TierRef::GroundBs))
        .map(|t| t.value)
        .sum();
    (params.lambda_u * uav + params.lambda_b * bs) * (1.0 + gamma).log2()
}

/// Laplace transform of the center-UAV interference (baseline layout).
pub fn laplace_i0(params: &SystemParams, u: f64, rule: &ExclusionRule) -> Result<f64, EvalError> {
    laplace_i0_with(params, u, rule, &AnalyticOptions::default())
}

pub fn laplace_i0_with(
    params: &SystemParams,
    u: f64,
    rule: &ExclusionRule,
    opts: &AnalyticOptions,
) -> Result<f64, EvalError> {
    Engine::baseline(params, *opts)
        .laplace_center(u, rule)
        .map_err(|e| EvalError::new("L_I0", e))
}

/// Laplace transform of the field-UAV interference (baseline layout).
pub fn laplace_i1(params: &SystemParams, u: f64, rule: &ExclusionRule) -> Result<f64, EvalError> {
    laplace_i1_with(params, u, rule, &AnalyticOptions::default())
}

pub fn laplace_i1_with(
    params: &SystemParams,
    u: f64,
    rule: &ExclusionRule,
    opts: &AnalyticOptions,
) -> Result<f64, EvalError> {
    Engine::baseline(params, *opts)
        .laplace_field_group(0, u, rule)
        .map_err(|e| EvalError::new("L_I1", e))
}

/// Laplace transform of the BS interference (baseline layout).
pub fn laplace_i2(params: &SystemParams, u: f64, rule: &ExclusionRule) -> Result<f64, EvalError> {
    laplace_i2_with(params, u, rule, &AnalyticOptions::default())
}

pub fn laplace_i2_with(
    params: &SystemParams,
    u: f64,
    rule: &ExclusionRule,
    opts: &AnalyticOptions,
) -> Result<f64, EvalError> {
    Engine::baseline(params, *opts)
        .laplace_bs(u, rule)
        .map_err(|e| EvalError::new("L_I2", e))
}

/// Total SINR coverage probability of the baseline network with per-tier
/// thresholds `[Gamma_0, Gamma_1, Gamma_2]` (linear).
pub fn total_coverage(
    params: &SystemParams,
    thresholds: [f64; 3],
) -> Result<CoverageReport, EvalError> {
    total_coverage_with(params, thresholds, &AnalyticOptions::default())
}

pub fn total_coverage_with(
    params: &SystemParams,
    thresholds: [f64; 3],
    opts: &AnalyticOptions,
) -> Result<CoverageReport, EvalError> {
    Engine::baseline(params, *opts).coverage_report(thresholds)
}

/// Area spectral efficiency at a common threshold `gamma` (linear).
pub fn ase(params: &SystemParams, gamma: f64) -> Result<f64, EvalError> {
    ase_with(params, gamma, &AnalyticOptions::default())
}

pub fn ase_with(params: &SystemParams, gamma: f64, opts: &AnalyticOptions) -> Result<f64, EvalError> {
    let report = total_coverage_with(params, [gamma; 3], opts)?;
    Ok(report.ase.expect("uniform thresholds always produce an ASE"))
}

/// Coverage of the multi-height model for a user clustered around an
/// anchor-group UAV. Thresholds map by tier class as in [`total_coverage`]:
/// index 0 for the cluster-center UAV, 1 for every field group, 2 for BSs.
pub fn total_coverage_multiheight(
    params: &SystemParams,
    mh: &MultiHeightParams,
    thresholds: [f64; 3],
) -> Result<CoverageReport, EvalError> {
    total_coverage_multiheight_with(params, mh, thresholds, &AnalyticOptions::default())
}

pub fn total_coverage_multiheight_with(
    params: &SystemParams,
    mh: &MultiHeightParams,
    thresholds: [f64; 3],
    opts: &AnalyticOptions,
) -> Result<CoverageReport, EvalError> {
    let layout = TierLayout::multi_height(params, mh);
    Engine::with_layout(params, layout, *opts).coverage_report(thresholds)
}

/// Association profile of the multi-height model; events are ordered
/// center LOS/NLOS, then each field group LOS/NLOS, then the BS tier.
pub fn assoc_events_multiheight(
    params: &SystemParams,
    mh: &MultiHeightParams,
    opts: &AnalyticOptions,
) -> Result<Vec<EventTerm>, EvalError> {
    let layout = TierLayout::multi_height(params, mh);
    let engine = Engine::with_layout(params, layout, *opts);
    let mut events = Vec::new();
    for s in LinkState::BOTH {
        events.push(EventTerm {
            tier: TierRef::CenterUav,
            state: Some(s),
            value: engine.assoc_center(s)?,
        });
    }
    for g in 0..engine.layout.fields.len() {
        for s in LinkState::BOTH {
            events.push(EventTerm {
                tier: TierRef::FieldUav(g + 1),
                state: Some(s),
                value: engine.assoc_field(g, s)?,
            });
        }
    }
    events.push(EventTerm { tier: TierRef::GroundBs, state: None, value: engine.assoc_bs()? });
    Ok(events)
}

/// FNV-1a fingerprint of everything that determines a coverage report.
fn fingerprint(
    params: &SystemParams,
    layout: &TierLayout,
    thresholds: [f64; 3],
    opts: &AnalyticOptions,
) -> u64 {
    struct Fnv(u64);
    impl Fnv {
        fn eat_u64(&mut self, v: u64) {
            self.0 ^= v;
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
        fn eat_f(&mut self, v: f64) {
            self.eat_u64(v.to_bits());
        }
    }
    let mut fnv = Fnv(0xcbf2_9ce4_8422_2325);
    for v in [
        params.lambda_u,
        params.lambda_b,
        params.height,
        params.sigma_c,
        params.alpha_los,
        params.alpha_nlos,
        params.alpha_b,
        params.eta_los,
        params.eta_nlos,
        params.eta_b,
        params.env_b,
        params.env_c,
    ] {
        fnv.eat_f(v);
    }
    for arr in [&params.p_tx, &params.bias, &params.noise, &params.sinr_threshold] {
        for &v in arr {
            fnv.eat_f(v);
        }
    }
    fnv.eat_f(layout.center_height);
    fnv.eat_f(layout.center_power);
    fnv.eat_f(layout.center_bias);
    for g in &layout.fields {
        fnv.eat_f(g.height);
        fnv.eat_f(g.lambda);
        fnv.eat_f(g.power);
        fnv.eat_f(g.bias);
    }
    for v in thresholds {
        fnv.eat_f(v);
    }
    fnv.eat_u64(matches!(opts.center_tail, crate::association::CenterTailMode::Exact) as u64);
    fnv.eat_u64(matches!(opts.center_normalization, CenterNormalization::Conditioned) as u64);
    fnv.eat_f(opts.tol_outer.rel);
    fnv.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::association::{assoc_profile, CenterTailMode};
    use crate::model::db_to_linear;

    fn table() -> SystemParams {
        SystemParams::defaults()
    }

    fn opts() -> AnalyticOptions {
        AnalyticOptions::default()
    }

    #[test]
    fn laplace_center_is_one_when_center_serves() {
        let p = table();
        let rule = ExclusionRule::new(&p, TierRef::CenterUav, 2000.0);
        assert_eq!(laplace_i0(&p, 0.7, &rule).unwrap(), 1.0);
    }

    #[test]
    fn laplace_center_at_zero_is_exclusion_mass() {
        let p = table();
        let rule = ExclusionRule::new(&p, TierRef::FieldUav(1), 2000.0);
        // conditioned: proper conditional expectation, exactly one at u = 0
        let v = laplace_i0(&p, 0.0, &rule).unwrap();
        assert!((v - 1.0).abs() < 1e-6, "conditioned at u=0: {v}");
        // paper: the unnormalized truncated integral equals the tail mass
        let paper = AnalyticOptions {
            center_normalization: CenterNormalization::Paper,
            ..opts()
        };
        let vp = laplace_i0_with(&p, 0.0, &rule, &paper).unwrap();
        let mass = pathloss::ccdf_l0_exact(&p, rule.center, paper.tol_inner).unwrap();
        assert!((vp - mass).abs() < 1e-6, "paper at u=0: {vp} vs mass {mass}");
        assert!(vp <= 1.0);
    }

    #[test]
    fn laplace_transforms_monotone_in_u() {
        let p = table();
        for serving in [TierRef::FieldUav(1), TierRef::GroundBs] {
            let l = match serving {
                TierRef::GroundBs => 1e6,
                _ => 2000.0,
            };
            let rule = ExclusionRule::new(&p, serving, l);
            let mut prev = [f64::INFINITY; 3];
            for i in 0..50 {
                let u = 10f64.powf(-6.0 + 10.0 * i as f64 / 49.0);
                let vals = [
                    laplace_i0(&p, u, &rule).unwrap(),
                    laplace_i1(&p, u, &rule).unwrap(),
                    laplace_i2(&p, u, &rule).unwrap(),
                ];
                for (k, v) in vals.iter().enumerate() {
                    assert!(*v > 0.0 && *v <= 1.0, "transform {k} out of range: {v}");
                    assert!(*v <= prev[k] + 1e-9, "transform {k} rose at u={u}");
                }
                prev = vals;
            }
        }
    }

    #[test]
    fn laplace_field_trivial_cases() {
        let p = table();
        let rule = ExclusionRule::new(&p, TierRef::FieldUav(1), 2000.0);
        assert_eq!(laplace_i1(&p, 0.0, &rule).unwrap(), 1.0);
        let empty = SystemParams { lambda_u: 0.0, ..table() };
        assert_eq!(laplace_i1(&empty, 3.0, &rule).unwrap(), 1.0);
        let no_bs = SystemParams { lambda_b: 0.0, ..table() };
        assert_eq!(laplace_i2(&no_bs, 3.0, &rule).unwrap(), 1.0);
        assert_eq!(laplace_i2(&p, 0.0, &rule).unwrap(), 1.0);
    }

    #[test]
    fn laplace_field_log_linear_in_density() {
        // the PGFL exponent is linear in the intensity
        let p = table();
        let l0 = 2000.0;
        let u = p.sinr_threshold[0] * l0 / p.p_tx[0];
        let rule = ExclusionRule::new(&p, TierRef::CenterUav, l0);
        let base = laplace_i1(&p, u, &rule).unwrap();
        let doubled_params = SystemParams { lambda_u: 2e-4, ..table() };
        let doubled = laplace_i1(&doubled_params, u, &rule).unwrap();
        assert!(base > 0.0 && base < 1.0);
        assert!((doubled.ln() - 2.0 * base.ln()).abs() < 1e-6 * base.ln().abs());
    }

    #[test]
    fn coverage_approaches_association_sum_at_tiny_threshold() {
        let p = table();
        let report = total_coverage(&p, [1e-9; 3]).unwrap();
        let prof = assoc_profile(&p).unwrap();
        assert!(
            (report.total - prof.sum()).abs() < 2e-3,
            "coverage {} vs association sum {}",
            report.total,
            prof.sum()
        );
        assert!((report.total - 1.0).abs() < 2e-3);
    }

    #[test]
    fn coverage_total_matches_event_sum_and_range() {
        let p = table();
        let report = total_coverage(&p, [1.0; 3]).unwrap();
        let sum: f64 = report.per_event.iter().map(|t| t.value).sum();
        assert!((report.total - sum).abs() < 1e-12);
        assert!(report.total > 0.0 && report.total <= 1.0);
        assert_eq!(report.per_event.len(), 5);
    }

    #[test]
    fn coverage_decreases_with_height() {
        let p10 = table();
        let p30 = SystemParams { height: 30.0, ..table() };
        let c10 = total_coverage(&p10, [1.0; 3]).unwrap().total;
        let c30 = total_coverage(&p30, [1.0; 3]).unwrap().total;
        assert!(c10 > c30, "H=10: {c10}, H=30: {c30}");
    }

    #[test]
    fn coverage_nonincreasing_in_threshold() {
        let p = table();
        let mut prev = f64::INFINITY;
        for g_db in [-10.0, -5.0, 0.0, 5.0, 10.0, 20.0] {
            let g = db_to_linear(g_db);
            let c = total_coverage(&p, [g; 3]).unwrap().total;
            assert!(c <= prev + 1e-6, "coverage rose at {g_db} dB");
            prev = c;
        }
    }

    #[test]
    fn coverage_nonincreasing_in_each_tier_threshold() {
        let p = table();
        for k in 0..3 {
            let mut prev = f64::INFINITY;
            for g_db in [-6.0, 0.0, 6.0, 12.0] {
                let mut thresholds = [1.0; 3];
                thresholds[k] = db_to_linear(g_db);
                let c = total_coverage(&p, thresholds).unwrap().total;
                assert!(c <= prev + 1e-6, "coverage rose in Gamma_{k} at {g_db} dB");
                prev = c;
            }
        }
    }

    #[test]
    fn removing_noise_strictly_helps_when_noise_matters() {
        // noise elevated far above the Table-I floor so its term is resolvable
        let noisy = SystemParams { noise: [db_to_linear(-40.0 - 30.0); 3], ..table() };
        let clean = SystemParams { noise: [0.0; 3], ..table() };
        for g_db in [-5.0, 0.0, 10.0] {
            let g = db_to_linear(g_db);
            let with_noise = total_coverage(&noisy, [g; 3]).unwrap().total;
            let without = total_coverage(&clean, [g; 3]).unwrap().total;
            assert!(
                without > with_noise,
                "at {g_db} dB: noise-free {without} !> noisy {with_noise}"
            );
        }
    }

    #[test]
    fn ase_positive_and_bs_term_removable() {
        let p = table();
        let v = ase(&p, 1.0).unwrap();
        assert!(v > 0.0);
        // removing the BS tier drops exactly the BS summand
        let no_bs = SystemParams { lambda_b: 0.0, ..table() };
        let report = total_coverage(&no_bs, [1.0; 3]).unwrap();
        let expect = no_bs.lambda_u * (report.center_term() + report.field_term()) * 2f64.log2();
        assert!((ase(&no_bs, 1.0).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn multiheight_single_group_reduces_to_baseline() {
        let p = table();
        let mh = MultiHeightParams {
            heights: vec![p.height],
            lambda_m: vec![p.lambda_u],
            p_tx_m: vec![p.p_tx[0]],
            bias_m: vec![p.bias[0]],
            anchor_tier: 1,
        };
        let base = total_coverage(&p, [1.0; 3]).unwrap();
        let multi = total_coverage_multiheight(&p, &mh, [1.0; 3]).unwrap();
        assert!((base.total - multi.total).abs() < 1e-6);
        assert_eq!(multi.per_event.len(), 5);
    }

    #[test]
    fn params_hash_tracks_configuration() {
        let p = table();
        let a = total_coverage(&p, [1.0; 3]).unwrap();
        let b = total_coverage(&p, [1.0; 3]).unwrap();
        assert_eq!(a.params_hash, b.params_hash);
        let c = total_coverage(&p, [2.0; 3]).unwrap();
        assert_ne!(a.params_hash, c.params_hash);
        let shifted = SystemParams { sigma_c: 6.0, ..table() };
        let d = total_coverage(&shifted, [1.0; 3]).unwrap();
        assert_ne!(a.params_hash, d.params_hash);
    }

    #[test]
    fn per_tier_thresholds_drop_ase() {
        let p = table();
        let report = total_coverage(&p, [1.0, 1.0, 2.0]).unwrap();
        assert!(report.ase.is_none());
    }
}
