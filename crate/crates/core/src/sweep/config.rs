use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::grid::{parse_lambda_grid, parse_tc_grid, Mode, SweepGrid};
use crate::error::{Error, Result};
use crate::metrics::SearchSettings;
use crate::montecarlo::SimConfig;
use crate::params::{PowerModel, SystemParams};
use crate::units::{db_to_linear, dbm_to_watt};

/// Everything a run needs, resolved to linear SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    pub params: SystemParams,
    pub power: PowerModel,
    pub sim: SimConfig,
    pub grid: SweepGrid,
    pub search: SearchSettings,
}

impl Default for LoadedConfig {
    fn default() -> Self {
        Self {
            params: SystemParams { t_c: 4, ..Default::default() },
            power: PowerModel::default(),
            sim: SimConfig::default(),
            grid: SweepGrid::default(),
            search: SearchSettings::default(),
        }
    }
}

impl LoadedConfig {
    /// Re-checks every component after command-line overrides.
    pub fn validate(&self) -> Result<()> {
        self.params.ensure_valid()?;
        let v = self.power.validate();
        if !v.is_empty() {
            return Err(Error::InvalidParams(v));
        }
        self.sim.validate()?;
        self.grid.validate(&self.params)
    }
}

/// On-disk layout. dB quantities carry a `_db`/`_dbm` suffix; pathloss
/// intercepts are given as positive loss in dB.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ConfigFile {
    p_c_dbm: Option<f64>,
    p_d_dbm: Option<f64>,
    u_c: Option<u32>,
    t_c: Option<u32>,
    lambda_d: Option<f64>,
    cell_radius: Option<f64>,
    bandwidth: Option<f64>,
    noise_power_dbm: Option<f64>,
    noise_figure_db: Option<f64>,
    apply_noise_figure: Option<bool>,
    d2d_distance: Option<f64>,
    alpha_c: Option<f64>,
    alpha_d: Option<f64>,
    a_c_db: Option<f64>,
    a_d_db: Option<f64>,
    eta: Option<f64>,
    c0: Option<f64>,
    c1: Option<f64>,
    c2: Option<f64>,
    sim: Option<SimConfig>,
    grid: Option<GridFile>,
    search: Option<SearchFile>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum TcSpec {
    List(Vec<u32>),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum LambdaSpec {
    List(Vec<f64>),
    Text(String),
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct GridFile {
    tc: Option<TcSpec>,
    lambda_d: Option<LambdaSpec>,
    mode: Option<Mode>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SearchFile {
    beta_min_db: Option<f64>,
    beta_max_db: Option<f64>,
    grid_points: Option<usize>,
    rel_tol: Option<f64>,
}

pub fn load_config(path: &Path) -> Result<LoadedConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::File { path: path.to_path_buf(), source })?;
    parse_config(&text, path)
}

/// Parses a JSON configuration; `origin` only labels error messages.
pub fn parse_config(text: &str, origin: &Path) -> Result<LoadedConfig> {
    let config_err = |message: String| Error::Config { path: PathBuf::from(origin), message };
    let file: ConfigFile = serde_json::from_str(text)
        .map_err(|e| config_err(format!("line {}, column {}: {e}", e.line(), e.column())))?;

    let d = LoadedConfig::default();
    let conv = |v: Option<f64>, f: fn(f64) -> Result<f64>, default: f64, field: &str| -> Result<f64> {
        match v {
            Some(x) => f(x).map_err(|e| config_err(format!("field `{field}`: {e}"))),
            None => Ok(default),
        }
    };
    let loss = |x: f64| db_to_linear(-x);
    let p = &d.params;
    let params = SystemParams {
        p_c: conv(file.p_c_dbm, dbm_to_watt, p.p_c, "p_c_dbm")?,
        p_d: conv(file.p_d_dbm, dbm_to_watt, p.p_d, "p_d_dbm")?,
        u_c: file.u_c.unwrap_or(p.u_c),
        t_c: file.t_c.unwrap_or(p.t_c),
        lambda_d: file.lambda_d.unwrap_or(p.lambda_d),
        cell_radius: file.cell_radius.unwrap_or(p.cell_radius),
        bandwidth: file.bandwidth.unwrap_or(p.bandwidth),
        noise_power: conv(file.noise_power_dbm, dbm_to_watt, p.noise_power, "noise_power_dbm")?,
        noise_figure_db: file.noise_figure_db.unwrap_or(p.noise_figure_db),
        apply_noise_figure: file.apply_noise_figure.unwrap_or(p.apply_noise_figure),
        d2d_distance: file.d2d_distance.unwrap_or(p.d2d_distance),
        alpha_c: file.alpha_c.unwrap_or(p.alpha_c),
        alpha_d: file.alpha_d.unwrap_or(p.alpha_d),
        a_c: conv(file.a_c_db, loss, p.a_c, "a_c_db")?,
        a_d: conv(file.a_d_db, loss, p.a_d, "a_d_db")?,
    };
    let power = PowerModel {
        eta: file.eta.unwrap_or(d.power.eta),
        c0: file.c0.unwrap_or(d.power.c0),
        c1: file.c1.unwrap_or(d.power.c1),
        c2: file.c2.unwrap_or(d.power.c2),
    };
    let g = file.grid.unwrap_or_default();
    let grid = SweepGrid {
        tc_values: match g.tc {
            Some(TcSpec::List(v)) => v,
            Some(TcSpec::Text(s)) => parse_tc_grid(&s).map_err(|e| config_err(format!("field `grid.tc`: {e}")))?,
            None => d.grid.tc_values,
        },
        lambda_values: match g.lambda_d {
            Some(LambdaSpec::List(v)) => v,
            Some(LambdaSpec::Text(s)) => {
                parse_lambda_grid(&s).map_err(|e| config_err(format!("field `grid.lambda_d`: {e}")))?
            }
            None => d.grid.lambda_values,
        },
        mode: g.mode.unwrap_or(d.grid.mode),
    };
    let s = file.search.unwrap_or_default();
    let search = SearchSettings {
        beta_min_db: s.beta_min_db.unwrap_or(d.search.beta_min_db),
        beta_max_db: s.beta_max_db.unwrap_or(d.search.beta_max_db),
        grid_points: s.grid_points.unwrap_or(d.search.grid_points),
        rel_tol: s.rel_tol.unwrap_or(d.search.rel_tol),
    };
    let loaded = LoadedConfig { params, power, sim: file.sim.unwrap_or_default(), grid, search };
    loaded.validate().map_err(|e| config_err(e.to_string()))?;
    Ok(loaded)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<LoadedConfig> {
        parse_config(text, Path::new("test.json"))
    }

    #[test]
    fn empty_object_is_defaults() {
        let c = parse("{}").unwrap();
        assert_eq!(c, LoadedConfig::default());
        assert_eq!(c.params.t_c, 4);
        assert!((c.params.p_c - 12.589).abs() < 1e-3);
    }

    #[test]
    fn partial_override() {
        let c = parse(r#"{"lambda_d": 1e-4}"#).unwrap();
        assert_eq!(c.params, SystemParams { lambda_d: 1e-4, ..Default::default() });
        assert_eq!(c.power, PowerModel::default());
    }

    #[test]
    fn db_fields_convert() {
        let c = parse(r#"{"p_d_dbm": 30, "a_d_db": 10, "noise_power_dbm": -100}"#).unwrap();
        assert!((c.params.p_d - 1.0).abs() < 1e-12);
        assert!((c.params.a_d - 0.1).abs() < 1e-12);
        assert!((c.params.noise_power - 1e-13).abs() < 1e-25);
    }

    #[test]
    fn violation_forwarded() {
        let e = parse(r#"{"u_c": 8, "t_c": 4, "grid": {"tc": [8]}}"#).unwrap_err();
        assert!(matches!(e, Error::Config { .. }));
        assert!(e.to_string().contains("u_c ≤ t_c"), "{e}");
    }

    #[test]
    fn parse_errors_name_location() {
        let e = parse("{\n  \"alpha_c\": \"x\"\n}").unwrap_err().to_string();
        assert!(e.contains("line 2"), "{e}");
        let e = parse(r#"{"alpha_k": 3}"#).unwrap_err().to_string();
        assert!(e.contains("alpha_k"), "{e}");
    }

    #[test]
    fn nested_sections() {
        let c = parse(
            r#"{"sim": {"trials": 500, "master_seed": 7},
                "grid": {"tc": "4:8:2", "lambda_d": [0, 1e-5], "mode": "both"},
                "search": {"grid_points": 50}}"#,
        )
        .unwrap();
        assert_eq!(c.sim.trials, 500);
        assert_eq!(c.sim.window_factor, 5.0);
        assert_eq!(c.grid.tc_values, vec![4, 6, 8]);
        assert_eq!(c.grid.lambda_values, vec![0.0, 1e-5]);
        assert_eq!(c.grid.mode, Mode::Both);
        assert_eq!(c.search.grid_points, 50);
    }

    #[test]
    fn missing_file() {
        assert!(matches!(load_config(Path::new("/nonexistent/cfg.json")), Err(Error::File { .. })));
    }
}
