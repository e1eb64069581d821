//! Built-in experiment presets mirroring the standard figure sweeps, one
//! command each. Presets with several curves return one spec per curve;
//! the runner writes `<stem>_<label>.csv` per curve.

use anyhow::{bail, Result};
use uavnet::model::{dbm_to_watts, MultiHeightParams, SystemParams};

use crate::config::{parse_config, ExperimentSpec, Mode};

fn base_spec(mode: Mode) -> ExperimentSpec {
    let mut spec = parse_config("").expect("empty config is valid");
    spec.mode = mode;
    spec
}

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let mut v = Vec::new();
    let mut x = lo;
    while x <= hi + 1e-9 {
        v.push(x);
        x += step;
    }
    v
}

fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let n = ((hi / lo).log10() * per_decade as f64).round() as usize;
    (0..=n).map(|i| lo * 10f64.powf(i as f64 / per_decade as f64)).collect()
}

/// Returns the labeled curve specs of a named preset.
pub fn preset(name: &str) -> Result<Vec<(String, ExperimentSpec)>> {
    match name {
        // association probability vs cluster spread, two altitudes
        "fig2" => Ok([10.0, 30.0]
            .into_iter()
            .map(|h| {
                let mut spec = base_spec(Mode::Association);
                spec.params.height = h;
                spec.sweep = Some(("sigma_c".into(), grid(1.0, 20.0, 1.0)));
                (format!("h{h:.0}"), spec)
            })
            .collect()),
        // coverage vs threshold, three altitudes
        "fig3" => Ok([10.0, 20.0, 30.0]
            .into_iter()
            .map(|h| {
                let mut spec = base_spec(Mode::Coverage);
                spec.params.height = h;
                spec.sweep = Some(("gamma_db".into(), grid(-10.0, 20.0, 2.0)));
                (format!("h{h:.0}"), spec)
            })
            .collect()),
        // coverage vs common path-loss exponent, two altitudes
        "fig4" => Ok([10.0, 30.0]
            .into_iter()
            .map(|h| {
                let mut spec = base_spec(Mode::Coverage);
                spec.params.height = h;
                spec.sweep = Some(("alpha_all".into(), grid(2.5, 5.0, 0.25)));
                (format!("h{h:.0}"), spec)
            })
            .collect()),
        // coverage vs threshold, three UAV densities
        "fig5" => Ok([1e-5, 1e-4, 1e-3]
            .into_iter()
            .map(|lam| {
                let mut spec = base_spec(Mode::Coverage);
                spec.params.lambda_u = lam;
                spec.sweep = Some(("gamma_db".into(), grid(-10.0, 20.0, 2.0)));
                (format!("lu{lam:.0e}"), spec)
            })
            .collect()),
        // area spectral efficiency vs UAV density, three cluster spreads
        "fig6" => Ok([2.0, 5.0, 10.0]
            .into_iter()
            .map(|sigma| {
                let mut spec = base_spec(Mode::Ase);
                spec.params.sigma_c = sigma;
                spec.sweep = Some(("lambda_u".into(), log_grid(1e-6, 1e-3, 4)));
                (format!("sc{sigma:.0}"), spec)
            })
            .collect()),
        // multi-height coverage vs threshold: two height groups with an even
        // density split, anchored at either group, next to the single-height
        // baselines, for two cluster spreads
        "fig7" => {
            let mut curves = Vec::new();
            for sigma in [5.0, 10.0] {
                for anchor in [1usize, 2] {
                    let mut spec = base_spec(Mode::Coverage);
                    spec.params.sigma_c = sigma;
                    let mh = MultiHeightParams {
                        heights: vec![10.0, 20.0],
                        lambda_m: vec![spec.params.lambda_u / 2.0; 2],
                        p_tx_m: vec![dbm_to_watts(37.0); 2],
                        bias_m: vec![1.0; 2],
                        anchor_tier: anchor,
                    };
                    spec.sim.mh = Some(mh.clone());
                    spec.mh = Some(mh);
                    spec.sweep = Some(("gamma_db".into(), grid(-10.0, 20.0, 2.0)));
                    curves.push((format!("sc{sigma:.0}_mh_anchor{anchor}"), spec));
                }
                for h in [10.0, 20.0] {
                    let mut spec = base_spec(Mode::Coverage);
                    spec.params.sigma_c = sigma;
                    spec.params.height = h;
                    spec.sweep = Some(("gamma_db".into(), grid(-10.0, 20.0, 2.0)));
                    curves.push((format!("sc{sigma:.0}_single_h{h:.0}"), spec));
                }
            }
            Ok(curves)
        }
        other => bail!("unknown preset `{other}`; expected fig2..fig7"),
    }
}

/// Table-I parameters shared by every preset.
#[allow(dead_code)]
pub fn table_defaults() -> SystemParams {
    SystemParams::defaults()
}
