//! Independent Monte Carlo oracle for the analytic engine.
//!
//! Realizations sample the generative model directly: field UAVs and BSs as
//! homogeneous PPPs in a disc window around the typical user, the
//! cluster-center UAV at a Rayleigh(sigma_c) offset, one LOS/NLOS state per
//! UAV link drawn from the elevation-angle probability at that UAV's own
//! horizontal distance, and unit-mean exponential fading per link. The
//! association and SINR rules are applied verbatim, with no use of the
//! analytic formulas.
//!
//! Determinism: every realization derives its random stream from
//! `(seed, realization index)` through a counter-based generator, and all
//! reductions run over fixed-size chunks folded in index order, so results
//! are bit-identical regardless of how many worker threads run.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, Poisson};
use rayon::prelude::*;

use crate::model::{FieldGroup, LinkState, MultiHeightParams, SystemParams, TierLayout};
use crate::pathloss;

/// Fixed reduction chunk so parallel scheduling cannot perturb results.
const CHUNK: usize = 256;

/// Monte Carlo run configuration.
#[derive(Debug, Clone)]
pub struct SimConfig {
    /// Radius of the sampling disc around the typical user (m).
    pub window_radius: f64,
    pub n_realizations: usize,
    pub seed: u64,
    /// Confidence level of the reported interval.
    pub ci_level: f64,
    /// Use the exact (Clopper-Pearson) interval instead of the normal
    /// approximation; intended for small realization counts.
    pub exact_binomial_ci: bool,
    /// Multi-height layout; `None` runs the baseline single-height model.
    pub mh: Option<MultiHeightParams>,
}

impl SimConfig {
    pub fn new(params: &SystemParams, n_realizations: usize, seed: u64) -> Self {
        SimConfig {
            window_radius: Self::default_window_radius(params),
            n_realizations,
            seed,
            ci_level: 0.95,
            exact_binomial_ci: false,
            mh: None,
        }
    }

    /// `max(5000 m, 10 / sqrt(min positive density))`: wide enough that the
    /// truncated interference is negligible under `alpha > 2` (checked by
    /// the window-sufficiency test).
    pub fn default_window_radius(params: &SystemParams) -> f64 {
        let min_density = [params.lambda_u, params.lambda_b]
            .into_iter()
            .filter(|d| *d > 0.0)
            .fold(f64::INFINITY, f64::min);
        if min_density.is_finite() {
            5000f64.max(10.0 / min_density.sqrt())
        } else {
            5000.0
        }
    }

    fn layout(&self, params: &SystemParams) -> TierLayout {
        match &self.mh {
            Some(mh) => TierLayout::multi_height(params, mh),
            None => TierLayout::baseline(params),
        }
    }
}

/// One sampled UAV with its link state and fading toward the typical user.
#[derive(Debug, Clone, Copy)]
pub struct UavPoint {
    pub x: f64,
    pub y: f64,
    pub height: f64,
    /// Height-group index, 1-based; always 1 in the baseline model.
    pub group: usize,
    pub state: LinkState,
    pub fading: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct BsPoint {
    pub x: f64,
    pub y: f64,
    pub fading: f64,
}

/// One network snapshot around the typical user at the origin.
#[derive(Debug, Clone, Default)]
pub struct Realization {
    /// Ground projection of the cluster-center UAV relative to the user.
    pub center_offset: (f64, f64),
    pub center_state: LinkState,
    pub center_fading: f64,
    pub uav_points: Vec<UavPoint>,
    pub bs_points: Vec<BsPoint>,
}

impl Realization {
    /// Debug dump, one CSV record per node: tier, x, y, height, state, pathloss.
    pub fn dump_csv(&self, params: &SystemParams, config: &SimConfig) -> String {
        let layout = config.layout(params);
        let mut out = String::from("tier,x,y,height,state,pathloss\n");
        let (cx, cy) = self.center_offset;
        let d = (cx * cx + cy * cy).sqrt();
        let l0 = pathloss::pathloss_uav_at(params, layout.center_height, d, self.center_state);
        out.push_str(&format!(
            "center,{cx},{cy},{},{},{l0}\n",
            layout.center_height,
            self.center_state.label()
        ));
        for u in &self.uav_points {
            let r = (u.x * u.x + u.y * u.y).sqrt();
            let l = pathloss::pathloss_uav_at(params, u.height, r, u.state);
            out.push_str(&format!(
                "field{},{},{},{},{},{l}\n",
                u.group,
                u.x,
                u.y,
                u.height,
                u.state.label()
            ));
        }
        for b in &self.bs_points {
            let r = (b.x * b.x + b.y * b.y).sqrt();
            let l = pathloss::pathloss_bs(params, r);
            out.push_str(&format!("bs,{},{},0,los,{l}\n", b.x, b.y));
        }
        out
    }
}

/// Mean/dispersion summary of a Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub ci: (f64, f64),
    pub n: usize,
    pub seed: u64,
}

impl SimEstimate {
    fn bernoulli(successes: u64, n: usize, config: &SimConfig) -> Self {
        let mean = successes as f64 / n as f64;
        let stderr = (mean * (1.0 - mean) / n as f64).sqrt();
        let ci = if config.exact_binomial_ci {
            clopper_pearson(successes, n as u64, config.ci_level)
        } else {
            let z = normal_quantile(0.5 + 0.5 * config.ci_level);
            ((mean - z * stderr).max(0.0), (mean + z * stderr).min(1.0))
        };
        SimEstimate { mean, stderr, ci, n, seed: config.seed }
    }
}

/// Which association event a realization resolved to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssocEvent {
    Center(LinkState),
    /// Field-UAV group (1-based) and the serving link's state.
    Field(usize, LinkState),
    Bs,
}

impl AssocEvent {
    /// Dense event index: center LOS/NLOS, each group LOS/NLOS, then BS.
    pub fn index(&self) -> usize {
        match *self {
            AssocEvent::Center(LinkState::Los) => 0,
            AssocEvent::Center(LinkState::Nlos) => 1,
            AssocEvent::Field(g, LinkState::Los) => 2 * g,
            AssocEvent::Field(g, LinkState::Nlos) => 2 * g + 1,
            AssocEvent::Bs => usize::MAX, // placed last; resolved by caller
        }
    }
}

/// Per-realization outcome record.
#[derive(Debug, Clone, Copy)]
pub struct Outcome {
    pub event: AssocEvent,
    pub serving_pathloss: f64,
    pub sinr: f64,
    /// Interference sums excluding the serving node: center / field / BS.
    pub interference: [f64; 3],
    /// Smallest field-UAV path loss in the window (`inf` when none).
    pub nearest_field_pathloss: f64,
    pub center_pathloss: f64,
    pub center_state: LinkState,
}

/// Samples realization `stream` of the configured model. Fully determined
/// by `(config.seed, stream)`.
pub fn sample_realization(params: &SystemParams, config: &SimConfig, stream: u64) -> Realization {
    let layout = config.layout(params);
    let mut real = Realization::default();
    sample_into(params, &layout, config, stream, &mut real);
    real
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn sample_into(
    params: &SystemParams,
    layout: &TierLayout,
    config: &SimConfig,
    stream: u64,
    real: &mut Realization,
) {
    let mut rng = rng_for(config.seed, stream);
    let radius = config.window_radius;
    let area = std::f64::consts::PI * radius * radius;

    // cluster-center UAV: Rayleigh(sigma_c) offset, uniform angle
    let d = params.sigma_c * (-2.0 * (1.0 - rng.random::<f64>()).ln()).sqrt();
    let phi = 2.0 * std::f64::consts::PI * rng.random::<f64>();
    real.center_offset = (d * phi.cos(), d * phi.sin());
    let p_los_center = pathloss::p_los_at(params, layout.center_height, d);
    real.center_state =
        if rng.random::<f64>() < p_los_center { LinkState::Los } else { LinkState::Nlos };
    real.center_fading = rng.sample(Exp1);

    // field UAVs: one PPP of total density lambda_U, thinned into height
    // groups with probability lambda_m / lambda_U
    real.uav_points.clear();
    let lambda_u: f64 = layout.fields.iter().map(|g| g.lambda).sum();
    if lambda_u > 0.0 {
        let count = Poisson::new(lambda_u * area).expect("positive mean").sample(&mut rng) as usize;
        real.uav_points.reserve(count);
        for _ in 0..count {
            let r = radius * rng.random::<f64>().sqrt();
            let th = 2.0 * std::f64::consts::PI * rng.random::<f64>();
            let group = pick_group(&layout.fields, lambda_u, rng.random::<f64>());
            let height = layout.fields[group].height;
            let state = if rng.random::<f64>() < pathloss::p_los_at(params, height, r) {
                LinkState::Los
            } else {
                LinkState::Nlos
            };
            real.uav_points.push(UavPoint {
                x: r * th.cos(),
                y: r * th.sin(),
                height,
                group: group + 1,
                state,
                fading: rng.sample(Exp1),
            });
        }
    }

    real.bs_points.clear();
    if params.lambda_b > 0.0 {
        let count =
            Poisson::new(params.lambda_b * area).expect("positive mean").sample(&mut rng) as usize;
        real.bs_points.reserve(count);
        for _ in 0..count {
            let r = radius * rng.random::<f64>().sqrt();
            let th = 2.0 * std::f64::consts::PI * rng.random::<f64>();
            real.bs_points.push(BsPoint {
                x: r * th.cos(),
                y: r * th.sin(),
                fading: rng.sample(Exp1),
            });
        }
    }
}

fn pick_group(fields: &[FieldGroup], lambda_total: f64, u: f64) -> usize {
    let mut acc = 0.0;
    for (i, g) in fields.iter().enumerate() {
        acc += g.lambda / lambda_total;
        if u < acc {
            return i;
        }
    }
    fields.len() - 1
}

/// Applies the association and SINR rules to one realization.
pub fn evaluate_realization(
    params: &SystemParams,
    config: &SimConfig,
    real: &Realization,
) -> Outcome {
    let layout = config.layout(params);
    evaluate(params, &layout, real)
}

fn evaluate(params: &SystemParams, layout: &TierLayout, real: &Realization) -> Outcome {
    let (cx, cy) = real.center_offset;
    let d = (cx * cx + cy * cy).sqrt();
    let center_pathloss = pathloss::pathloss_uav_at(params, layout.center_height, d, real.center_state);
    let center_rx = layout.center_power * real.center_fading / center_pathloss;

    // candidate = (biased power, tier order, event, pathloss, faded rx power)
    let mut best_event = AssocEvent::Center(real.center_state);
    let mut best_weight = layout.center_biased_power() / center_pathloss;
    let mut best_order = (0usize, 0usize);
    let mut best_pathloss = center_pathloss;
    let mut best_signal = center_rx;

    let mut field_interf = 0.0;
    let mut nearest_field = f64::INFINITY;
    for (i, u) in real.uav_points.iter().enumerate() {
        let g = &layout.fields[u.group - 1];
        let r = (u.x * u.x + u.y * u.y).sqrt();
        let l = pathloss::pathloss_uav_at(params, u.height, r, u.state);
        nearest_field = nearest_field.min(l);
        let weight = g.power * g.bias / l;
        field_interf += g.power * u.fading / l;
        let order = (u.group, i + 1);
        if weight > best_weight
            || (weight == best_weight && order < best_order && !matches!(best_event, AssocEvent::Center(_)))
        {
            best_event = AssocEvent::Field(u.group, u.state);
            best_weight = weight;
            best_order = order;
            best_pathloss = l;
            best_signal = g.power * u.fading / l;
        }
    }

    let mut bs_interf = 0.0;
    for bpt in &real.bs_points {
        let r = (bpt.x * bpt.x + bpt.y * bpt.y).sqrt();
        let l = pathloss::pathloss_bs(params, r);
        if l <= 0.0 {
            continue; // a BS exactly on top of the user is a measure-zero event
        }
        let weight = layout.bs_power * layout.bs_bias / l;
        bs_interf += layout.bs_power * bpt.fading / l;
        // strict comparison: a tie keeps the lower-tier incumbent
        if weight > best_weight {
            best_event = AssocEvent::Bs;
            best_weight = weight;
            best_pathloss = l;
            best_signal = layout.bs_power * bpt.fading / l;
        }
    }

    // interference = all received powers minus the serving link
    let total_rx = center_rx + field_interf + bs_interf;
    let interference_total = total_rx - best_signal;
    let tier_class = match best_event {
        AssocEvent::Center(_) => 0,
        AssocEvent::Field(..) => 1,
        AssocEvent::Bs => 2,
    };
    let sinr = best_signal / (params.noise[tier_class] + interference_total);

    let interference = [
        if matches!(best_event, AssocEvent::Center(_)) { 0.0 } else { center_rx },
        field_interf - if matches!(best_event, AssocEvent::Field(..)) { best_signal } else { 0.0 },
        bs_interf - if matches!(best_event, AssocEvent::Bs) { best_signal } else { 0.0 },
    ];

    Outcome {
        event: best_event,
        serving_pathloss: best_pathloss,
        sinr,
        interference,
        nearest_field_pathloss: nearest_field,
        center_pathloss,
        center_state: real.center_state,
    }
}

/// Per-event association frequencies and conditional coverage counts.
#[derive(Debug, Clone)]
pub struct CoverageBreakdown {
    /// Events ordered center LOS/NLOS, each group LOS/NLOS, then BS.
    pub assoc_counts: Vec<u64>,
    pub covered_counts: Vec<u64>,
    pub n: usize,
}

impl CoverageBreakdown {
    pub fn event_count(groups: usize) -> usize {
        2 * groups + 3
    }

    fn slot(&self, event: AssocEvent) -> usize {
        match event {
            AssocEvent::Bs => self.assoc_counts.len() - 1,
            other => other.index(),
        }
    }

    pub fn assoc_frequency(&self, event: AssocEvent) -> f64 {
        self.assoc_counts[self.slot(event)] as f64 / self.n as f64
    }

    pub fn covered_frequency(&self, event: AssocEvent) -> f64 {
        self.covered_counts[self.slot(event)] as f64 / self.n as f64
    }
}

/// Runs the simulator and estimates the total SINR coverage probability,
/// with the per-event association/coverage breakdown.
pub fn estimate_coverage(
    params: &SystemParams,
    config: &SimConfig,
    thresholds: [f64; 3],
) -> (SimEstimate, CoverageBreakdown) {
    let layout = config.layout(params);
    let events = CoverageBreakdown::event_count(layout.fields.len());
    let n = config.n_realizations;
    let chunks: Vec<(Vec<u64>, Vec<u64>)> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk_idx| {
            let mut assoc = vec![0u64; events];
            let mut covered = vec![0u64; events];
            let mut real = Realization::default();
            let lo = chunk_idx * CHUNK;
            let hi = (lo + CHUNK).min(n);
            for stream in lo..hi {
                sample_into(params, &layout, config, stream as u64, &mut real);
                let out = evaluate(params, &layout, &real);
                let slot = match out.event {
                    AssocEvent::Bs => events - 1,
                    other => other.index(),
                };
                assoc[slot] += 1;
                let gamma = match out.event {
                    AssocEvent::Center(_) => thresholds[0],
                    AssocEvent::Field(..) => thresholds[1],
                    AssocEvent::Bs => thresholds[2],
                };
                if out.sinr > gamma {
                    covered[slot] += 1;
                }
            }
            (assoc, covered)
        })
        .collect();

    let mut assoc_counts = vec![0u64; events];
    let mut covered_counts = vec![0u64; events];
    for (a, c) in chunks {
        for i in 0..events {
            assoc_counts[i] += a[i];
            covered_counts[i] += c[i];
        }
    }
    let covered_total: u64 = covered_counts.iter().sum();
    let estimate = SimEstimate::bernoulli(covered_total, n, config);
    (estimate, CoverageBreakdown { assoc_counts, covered_counts, n })
}

/// Estimates the area spectral efficiency at a common threshold by plugging
/// the empirical per-tier coverage frequencies into the density-weighted sum.
pub fn estimate_ase(params: &SystemParams, config: &SimConfig, gamma: f64) -> SimEstimate {
    let (_, breakdown) = estimate_coverage(params, config, [gamma; 3]);
    let n = breakdown.n as f64;
    let events = breakdown.assoc_counts.len();
    let uav_cov: u64 = breakdown.covered_counts[..events - 1].iter().sum();
    let bs_cov = breakdown.covered_counts[events - 1];
    let p_u = uav_cov as f64 / n;
    let p_b = bs_cov as f64 / n;
    let rate = (1.0 + gamma).log2();
    let mean = (params.lambda_u * p_u + params.lambda_b * p_b) * rate;
    // delta method over the multinomial (uav-covered, bs-covered) counts
    let var = (params.lambda_u * params.lambda_u * p_u * (1.0 - p_u)
        + params.lambda_b * params.lambda_b * p_b * (1.0 - p_b)
        - 2.0 * params.lambda_u * params.lambda_b * p_u * p_b)
        / n;
    let stderr = var.max(0.0).sqrt() * rate;
    let z = normal_quantile(0.5 + 0.5 * config.ci_level);
    SimEstimate {
        mean,
        stderr,
        ci: (mean - z * stderr, mean + z * stderr),
        n: breakdown.n,
        seed: config.seed,
    }
}

/// Empirical mean count of state-`s` field UAVs with path loss below `x`,
/// the Monte Carlo counterpart of the tier-1 intensity measure.
pub fn estimate_intensity_l1(
    params: &SystemParams,
    config: &SimConfig,
    x: f64,
    state: LinkState,
) -> SimEstimate {
    let layout = config.layout(params);
    let n = config.n_realizations;
    let sums: Vec<(f64, f64)> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk_idx| {
            let mut real = Realization::default();
            let (mut s1, mut s2) = (0.0, 0.0);
            let lo = chunk_idx * CHUNK;
            let hi = (lo + CHUNK).min(n);
            for stream in lo..hi {
                sample_into(params, &layout, config, stream as u64, &mut real);
                let count = real
                    .uav_points
                    .iter()
                    .filter(|u| {
                        u.state == state && {
                            let r = (u.x * u.x + u.y * u.y).sqrt();
                            pathloss::pathloss_uav_at(params, u.height, r, u.state) < x
                        }
                    })
                    .count() as f64;
                s1 += count;
                s2 += count * count;
            }
            (s1, s2)
        })
        .collect();
    let (s1, s2) = sums.iter().fold((0.0, 0.0), |(a, b), (c, d)| (a + c, b + d));
    let nf = n as f64;
    let mean = s1 / nf;
    let var = (s2 / nf - mean * mean).max(0.0);
    let stderr = (var / nf).sqrt();
    let z = normal_quantile(0.5 + 0.5 * config.ci_level);
    SimEstimate { mean, stderr, ci: (mean - z * stderr, mean + z * stderr), n, seed: config.seed }
}

/// Monte Carlo estimate of the interference Laplace transform
/// `E[exp(-u I_tier)]` under the exclusion rule, for cross-checking the
/// analytic transforms. For the center tier the `conditioned` flag selects
/// between the conditional expectation (given the center lies outside the
/// exclusion region) and the unnormalized truncated mean.
pub fn estimate_laplace(
    params: &SystemParams,
    config: &SimConfig,
    rule: &crate::coverage::ExclusionRule,
    u: f64,
    tier: crate::model::TierRef,
    conditioned: bool,
) -> SimEstimate {
    use crate::model::TierRef;
    let layout = config.layout(params);
    let n = config.n_realizations;
    let sums: Vec<(f64, f64, u64)> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk_idx| {
            let mut real = Realization::default();
            let (mut s1, mut s2, mut accept) = (0.0, 0.0, 0u64);
            let lo = chunk_idx * CHUNK;
            let hi = (lo + CHUNK).min(n);
            for stream in lo..hi {
                sample_into(params, &layout, config, stream as u64, &mut real);
                let sample = match tier {
                    TierRef::CenterUav => {
                        let (cx, cy) = real.center_offset;
                        let d = (cx * cx + cy * cy).sqrt();
                        let l = pathloss::pathloss_uav_at(
                            params,
                            layout.center_height,
                            d,
                            real.center_state,
                        );
                        if l > rule.center {
                            accept += 1;
                            (-u * layout.center_power * real.center_fading / l).exp()
                        } else {
                            0.0
                        }
                    }
                    TierRef::FieldUav(_) => {
                        accept += 1;
                        let mut interf = 0.0;
                        for pt in &real.uav_points {
                            let g = &layout.fields[pt.group - 1];
                            let r = (pt.x * pt.x + pt.y * pt.y).sqrt();
                            let l = pathloss::pathloss_uav_at(params, pt.height, r, pt.state);
                            if l > rule.fields[pt.group - 1] {
                                interf += g.power * pt.fading / l;
                            }
                        }
                        (-u * interf).exp()
                    }
                    TierRef::GroundBs => {
                        accept += 1;
                        let mut interf = 0.0;
                        for pt in &real.bs_points {
                            let r = (pt.x * pt.x + pt.y * pt.y).sqrt();
                            let l = pathloss::pathloss_bs(params, r);
                            if l > rule.bs {
                                interf += layout.bs_power * pt.fading / l;
                            }
                        }
                        (-u * interf).exp()
                    }
                };
                s1 += sample;
                s2 += sample * sample;
            }
            (s1, s2, accept)
        })
        .collect();
    let (s1, s2, accept) =
        sums.iter().fold((0.0, 0.0, 0u64), |(a, b, c), (d, e, f)| (a + d, b + e, c + f));
    let denom = if conditioned { accept as f64 } else { n as f64 };
    let mean = s1 / denom;
    let var = (s2 / denom - mean * mean).max(0.0);
    let stderr = (var / denom).sqrt();
    let z = normal_quantile(0.5 + 0.5 * config.ci_level);
    SimEstimate { mean, stderr, ci: (mean - z * stderr, mean + z * stderr), n, seed: config.seed }
}

/// Collects the per-realization nearest-field-UAV path losses (for the
/// distributional Kolmogorov-Smirnov checks) and the center path losses.
pub fn sample_pathloss_statistics(
    params: &SystemParams,
    config: &SimConfig,
) -> (Vec<f64>, Vec<(LinkState, f64)>) {
    let layout = config.layout(params);
    let n = config.n_realizations;
    let mut per_chunk: Vec<(Vec<f64>, Vec<(LinkState, f64)>)> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk_idx| {
            let mut real = Realization::default();
            let mut nearest = Vec::with_capacity(CHUNK);
            let mut center = Vec::with_capacity(CHUNK);
            let lo = chunk_idx * CHUNK;
            let hi = (lo + CHUNK).min(n);
            for stream in lo..hi {
                sample_into(params, &layout, config, stream as u64, &mut real);
                let out = evaluate(params, &layout, &real);
                if out.nearest_field_pathloss.is_finite() {
                    nearest.push(out.nearest_field_pathloss);
                }
                center.push((out.center_state, out.center_pathloss));
            }
            (nearest, center)
        })
        .collect();
    let mut nearest = Vec::with_capacity(n);
    let mut center = Vec::with_capacity(n);
    for (nf, c) in per_chunk.drain(..) {
        nearest.extend(nf);
        center.extend(c);
    }
    (nearest, center)
}

/// One-sample Kolmogorov-Smirnov statistic of `samples` against the CDF
/// `cdf`. Sorts a copy of the samples.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        let hi = (i as f64 + 1.0) / n - f;
        let lo = f - i as f64 / n;
        d = d.max(hi).max(lo);
    }
    d
}

/// Critical value of the one-sample KS statistic at significance `alpha`
/// for large n (asymptotic Kolmogorov distribution).
pub fn ks_critical(n: usize, alpha: f64) -> f64 {
    // K_alpha with Q(K) = alpha via the two-term series, ample for alpha >= 1e-3
    let k = (-(0.5 * alpha).ln() / 2.0).sqrt();
    k / (n as f64).sqrt()
}

/// Inverse standard normal CDF (Acklam's rational approximation, |eps| < 1.2e-9).
pub(crate) fn normal_quantile(p: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 1.0);
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    let p_low = 0.02425;
    if p < p_low {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - p_low {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -normal_quantile(1.0 - p)
    }
}

/// Exact (Clopper-Pearson) binomial confidence interval by bisection on the
/// binomial tail, evaluated with a log-space pmf recurrence.
fn clopper_pearson(successes: u64, n: u64, level: f64) -> (f64, f64) {
    let alpha = 1.0 - level;
    let k = successes;
    // lower: P(X >= k | p) = alpha/2; upper: P(X <= k | p) = alpha/2
    let lower = if k == 0 { 0.0 } else { binom_search(|p| binom_sf(n, k - 1, p) - alpha / 2.0) };
    let upper =
        if k == n { 1.0 } else { binom_search(|p| binom_sf(n, k, p) - (1.0 - alpha / 2.0)) };
    (lower, upper)
}

/// P(X >= k+1) for X ~ Binomial(n, p), i.e. the upper tail beyond `k`.
fn binom_sf(n: u64, k: u64, p: f64) -> f64 {
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    // log pmf at j, advanced by the ratio recurrence
    let mut log_pmf = n as f64 * lq;
    let mut tail = 0.0;
    for j in 0..=n {
        if j > k {
            tail += log_pmf.exp();
        }
        if j < n {
            log_pmf += ((n - j) as f64).ln() - ((j + 1) as f64).ln() + lp - lq;
        }
    }
    tail.min(1.0)
}

fn binom_search(f: impl Fn(f64) -> f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}
