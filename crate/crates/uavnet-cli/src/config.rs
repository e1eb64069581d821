//! TOML configuration schema and conversion into validated domain types.
//!
//! The document is flat key/value with dotted sections. Every key has a
//! Table-I default, so an empty document is a valid configuration. Keys in
//! dB or dBm carry an explicit `_db`/`_dbm` suffix; everything else is
//! linear SI. Unknown keys are hard errors.

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;
use uavnet::association::{AnalyticOptions, CenterNormalization, CenterTailMode};
use uavnet::model::{self, dbm_to_watts, MultiHeightParams, SystemParams};
use uavnet::simulator::SimConfig;
use uavnet::Tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Coverage,
    Association,
    Ase,
    Simulate,
    Validate,
    Sweep,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub mode: Option<Mode>,
    #[serde(default)]
    pub network: NetworkSection,
    pub multi_height: Option<MultiHeightSection>,
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub sim: SimSection,
    #[serde(default)]
    pub analysis: AnalysisSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    pub lambda_u: Option<f64>,
    pub lambda_b: Option<f64>,
    pub height_m: Option<f64>,
    /// Cluster spread as a standard deviation; exclusive with the variance key.
    pub sigma_c_m: Option<f64>,
    pub sigma_c_var_m2: Option<f64>,
    pub alpha_los: Option<f64>,
    pub alpha_nlos: Option<f64>,
    pub alpha_b: Option<f64>,
    pub eta_los: Option<f64>,
    pub eta_nlos: Option<f64>,
    pub eta_b: Option<f64>,
    pub env_b: Option<f64>,
    pub env_c: Option<f64>,
    pub p_tx_dbm: Option<[f64; 3]>,
    pub bias: Option<[f64; 3]>,
    pub noise_dbm: Option<[f64; 3]>,
    pub sinr_threshold_db: Option<[f64; 3]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiHeightSection {
    pub heights_m: Vec<f64>,
    pub lambda_m: Vec<f64>,
    pub p_tx_dbm: Option<Vec<f64>>,
    pub bias: Option<Vec<f64>>,
    pub anchor_tier: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub variable: String,
    pub grid: Vec<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub window_radius_m: Option<f64>,
    pub realizations: Option<usize>,
    pub seed: Option<u64>,
    pub ci_level: Option<f64>,
    pub exact_binomial_ci: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    pub tol_rel: Option<f64>,
    /// `"exact"` (default) or `"closed_form"`.
    pub center_tail: Option<String>,
    /// `"conditioned"` (default) or `"paper"`.
    pub center_interferer_normalization: Option<String>,
}

/// A fully validated experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub mode: Mode,
    pub params: SystemParams,
    pub mh: Option<MultiHeightParams>,
    pub sweep: Option<(String, Vec<f64>)>,
    pub sim: SimConfig,
    pub opts: AnalyticOptions,
}

/// Sweepable parameter names.
pub const SWEEP_VARIABLES: &[&str] = &[
    "lambda_u", "lambda_b", "height", "sigma_c", "alpha_los", "alpha_nlos", "alpha_b",
    "alpha_all", "eta_los", "eta_nlos", "eta_b", "gamma_db", "bias_0", "bias_1", "bias_2",
];

/// Applies one sweep value to a parameter set.
pub fn apply_sweep(params: &SystemParams, variable: &str, value: f64) -> Result<SystemParams> {
    let mut p = params.clone();
    match variable {
        "lambda_u" => p.lambda_u = value,
        "lambda_b" => p.lambda_b = value,
        "height" => p.height = value,
        "sigma_c" => p.sigma_c = value,
        "alpha_los" => p.alpha_los = value,
        "alpha_nlos" => p.alpha_nlos = value,
        "alpha_b" => p.alpha_b = value,
        "alpha_all" => {
            p.alpha_los = value;
            p.alpha_nlos = value;
            p.alpha_b = value;
        }
        "eta_los" => p.eta_los = value,
        "eta_nlos" => p.eta_nlos = value,
        "eta_b" => p.eta_b = value,
        "gamma_db" => p.sinr_threshold = [model::db_to_linear(value); 3],
        "bias_0" => p.bias[0] = value,
        "bias_1" => p.bias[1] = value,
        "bias_2" => p.bias[2] = value,
        other => bail!("unknown sweep variable `{other}`; expected one of {SWEEP_VARIABLES:?}"),
    }
    model::validate(p).map_err(|errs| {
        anyhow!(
            "sweep point {variable} = {value} violates: {}",
            errs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
        )
    })
}

pub fn parse_config(text: &str) -> Result<ExperimentSpec> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| anyhow!("config parse error: {e}"))?;
    build_spec(file)
}

pub fn build_spec(file: ConfigFile) -> Result<ExperimentSpec> {
    let defaults = SystemParams::defaults();
    let net = &file.network;

    let sigma_c = match (net.sigma_c_m, net.sigma_c_var_m2) {
        (Some(_), Some(_)) => {
            bail!("network.sigma_c_m and network.sigma_c_var_m2 are mutually exclusive")
        }
        (Some(s), None) => s,
        (None, Some(v)) => {
            if v <= 0.0 {
                bail!("network.sigma_c_var_m2: must be positive");
            }
            v.sqrt()
        }
        (None, None) => defaults.sigma_c,
    };

    let params = SystemParams {
        lambda_u: net.lambda_u.unwrap_or(defaults.lambda_u),
        lambda_b: net.lambda_b.unwrap_or(defaults.lambda_b),
        height: net.height_m.unwrap_or(defaults.height),
        sigma_c,
        alpha_los: net.alpha_los.unwrap_or(defaults.alpha_los),
        alpha_nlos: net.alpha_nlos.unwrap_or(defaults.alpha_nlos),
        alpha_b: net.alpha_b.unwrap_or(defaults.alpha_b),
        eta_los: net.eta_los.unwrap_or(defaults.eta_los),
        eta_nlos: net.eta_nlos.unwrap_or(defaults.eta_nlos),
        eta_b: net.eta_b.unwrap_or(defaults.eta_b),
        env_b: net.env_b.unwrap_or(defaults.env_b),
        env_c: net.env_c.unwrap_or(defaults.env_c),
        p_tx: net.p_tx_dbm.map(|p| p.map(dbm_to_watts)).unwrap_or(defaults.p_tx),
        bias: net.bias.unwrap_or(defaults.bias),
        noise: net.noise_dbm.map(|n| n.map(dbm_to_watts)).unwrap_or(defaults.noise),
        sinr_threshold: net
            .sinr_threshold_db
            .map(|g| g.map(model::db_to_linear))
            .unwrap_or(defaults.sinr_threshold),
    };
    let params = model::validate(params).map_err(|errs| {
        anyhow!(
            "network: {}",
            errs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
        )
    })?;

    let mh = match &file.multi_height {
        None => None,
        Some(sec) => {
            let m = sec.heights_m.len();
            let mh = MultiHeightParams {
                heights: sec.heights_m.clone(),
                lambda_m: sec.lambda_m.clone(),
                p_tx_m: sec
                    .p_tx_dbm
                    .as_ref()
                    .map(|v| v.iter().map(|x| dbm_to_watts(*x)).collect())
                    .unwrap_or_else(|| vec![params.p_tx[1]; m]),
                bias_m: sec.bias.clone().unwrap_or_else(|| vec![params.bias[1]; m]),
                anchor_tier: sec.anchor_tier,
            };
            Some(model::validate_multi_height(mh, &params).map_err(|errs| {
                anyhow!(
                    "multi_height: {}",
                    errs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
                )
            })?)
        }
    };

    let sweep = match &file.sweep {
        None => None,
        Some(sec) => {
            if sec.grid.is_empty() {
                bail!("sweep.grid: must be nonempty");
            }
            if sec.grid.windows(2).any(|w| w[0] >= w[1]) {
                bail!("sweep.grid: must be strictly increasing");
            }
            if !SWEEP_VARIABLES.contains(&sec.variable.as_str()) {
                bail!(
                    "sweep.variable: unknown variable `{}`; expected one of {SWEEP_VARIABLES:?}",
                    sec.variable
                );
            }
            if mh.is_some() && matches!(sec.variable.as_str(), "height" | "lambda_u") {
                bail!(
                    "sweep.variable: `{}` conflicts with the explicit multi_height layout",
                    sec.variable
                );
            }
            // every grid point must produce valid parameters
            for &v in &sec.grid {
                apply_sweep(&params, &sec.variable, v)
                    .with_context(|| format!("sweep.grid value {v}"))?;
            }
            Some((sec.variable.clone(), sec.grid.clone()))
        }
    };

    let mut sim = SimConfig::new(&params, file.sim.realizations.unwrap_or(100_000),
        file.sim.seed.unwrap_or(42));
    if let Some(r) = file.sim.window_radius_m {
        if r <= 0.0 {
            bail!("sim.window_radius_m: must be positive");
        }
        sim.window_radius = r;
    }
    if let Some(c) = file.sim.ci_level {
        if !(0.0 < c && c < 1.0) {
            bail!("sim.ci_level: must lie in (0, 1)");
        }
        sim.ci_level = c;
    }
    if sim.n_realizations == 0 {
        bail!("sim.realizations: must be at least 1");
    }
    sim.exact_binomial_ci = file.sim.exact_binomial_ci.unwrap_or(false);
    sim.mh = mh.clone();

    let mut opts = AnalyticOptions::default();
    if let Some(rel) = file.analysis.tol_rel {
        opts.tol_outer =
            Tolerance::new(rel, opts.tol_outer.abs, opts.tol_outer.max_evals)
                .map_err(|e| anyhow!("analysis.tol_rel: {e}"))?;
        opts.tol_inner = Tolerance::new(rel * 0.01, opts.tol_inner.abs, opts.tol_inner.max_evals)
            .map_err(|e| anyhow!("analysis.tol_rel: {e}"))?;
    }
    match file.analysis.center_tail.as_deref() {
        None | Some("exact") => {}
        Some("closed_form") => opts.center_tail = CenterTailMode::ClosedForm,
        Some(other) => bail!("analysis.center_tail: unknown value `{other}`"),
    }
    match file.analysis.center_interferer_normalization.as_deref() {
        None | Some("conditioned") => {}
        Some("paper") => opts.center_normalization = CenterNormalization::Paper,
        Some(other) => bail!("analysis.center_interferer_normalization: unknown value `{other}`"),
    }

    let mode = file.mode.unwrap_or(Mode::Coverage);
    if matches!(mode, Mode::Sweep) && sweep.is_none() {
        bail!("mode `sweep` requires a [sweep] section");
    }

    Ok(ExperimentSpec { mode, params, mh, sweep, sim, opts })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_yields_table_defaults() {
        let spec = parse_config("").unwrap();
        let d = SystemParams::defaults();
        assert_eq!(spec.params, d);
        assert_eq!(spec.mode, Mode::Coverage);
        assert!(spec.sweep.is_none());
        assert_eq!(spec.sim.window_radius, 5000.0);
    }

    #[test]
    fn invalid_alpha_is_reported_with_key() {
        let err = parse_config("[network]\nalpha_los = 2.0\n").unwrap_err();
        let msg = format!("{err:#}");
        assert!(msg.contains("alpha_los"), "{msg}");
        assert!(msg.contains("exceed 2"), "{msg}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse_config("[network]\nalpha_loss = 3.0\n").unwrap_err();
        let msg = format!("{err:#}");
        assert!(msg.contains("alpha_loss"), "{msg}");
    }

    #[test]
    fn sweep_plan_builds() {
        let spec = parse_config("[sweep]\nvariable = \"height\"\ngrid = [10.0, 20.0, 30.0]\n")
            .unwrap();
        let (var, grid) = spec.sweep.unwrap();
        assert_eq!(var, "height");
        assert_eq!(grid.len(), 3);
    }

    #[test]
    fn sweep_grid_must_be_sorted_and_valid() {
        assert!(parse_config("[sweep]\nvariable = \"height\"\ngrid = [20.0, 10.0]\n").is_err());
        assert!(parse_config("[sweep]\nvariable = \"nope\"\ngrid = [1.0]\n").is_err());
        // a grid point that violates model invariants is a config error
        assert!(parse_config("[sweep]\nvariable = \"alpha_all\"\ngrid = [1.5, 3.0]\n").is_err());
    }

    #[test]
    fn sigma_keys_are_exclusive_and_variance_converts() {
        assert!(parse_config("[network]\nsigma_c_m = 5.0\nsigma_c_var_m2 = 25.0\n").is_err());
        let spec = parse_config("[network]\nsigma_c_var_m2 = 25.0\n").unwrap();
        assert!((spec.params.sigma_c - 5.0).abs() < 1e-12);
    }

    #[test]
    fn dbm_keys_convert_to_linear() {
        let spec = parse_config("[network]\np_tx_dbm = [30.0, 30.0, 30.0]\n").unwrap();
        assert!((spec.params.p_tx[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn multi_height_defaults_inherit_field_power() {
        let text = "[multi_height]\nheights_m = [10.0, 20.0]\nlambda_m = [5e-5, 5e-5]\nanchor_tier = 1\n";
        let spec = parse_config(text).unwrap();
        let mh = spec.mh.unwrap();
        assert_eq!(mh.p_tx_m, vec![spec.params.p_tx[1]; 2]);
        assert_eq!(mh.anchor_tier, 1);
    }

    #[test]
    fn analysis_modes_parse() {
        let spec = parse_config(
            "[analysis]\ncenter_tail = \"closed_form\"\ncenter_interferer_normalization = \"paper\"\n",
        )
        .unwrap();
        assert_eq!(spec.opts.center_tail, CenterTailMode::ClosedForm);
        assert_eq!(spec.opts.center_normalization, CenterNormalization::Paper);
        assert!(parse_config("[analysis]\ncenter_tail = \"wat\"\n").is_err());
    }
}
