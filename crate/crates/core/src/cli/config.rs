//! The TOML problem configuration.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::expr::{parse, Expr};
use crate::problem::{Grid, GridParams, PicardParams, ProblemSpec, SOURCE_VARS};

fn zero() -> String {
    "0".to_string()
}

/// Time horizon and spatial window. Defaults: `T = 1`, `[-3, 3]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowConfig {
    #[serde(rename = "T", default = "WindowConfig::default_t")]
    pub t_final: f64,
    #[serde(default = "WindowConfig::default_xmin")]
    pub xmin: f64,
    #[serde(default = "WindowConfig::default_xmax")]
    pub xmax: f64,
}

impl WindowConfig {
    fn default_t() -> f64 {
        1.0
    }
    fn default_xmin() -> f64 {
        -3.0
    }
    fn default_xmax() -> f64 {
        3.0
    }
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig {
            t_final: Self::default_t(),
            xmin: Self::default_xmin(),
            xmax: Self::default_xmax(),
        }
    }
}

/// Default: `nt = 128` time levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "GridConfig::default_nt")]
    pub nt: usize,
}

impl GridConfig {
    fn default_nt() -> usize {
        128
    }
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { nt: Self::default_nt() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PicardConfig {
    #[serde(default = "PicardConfig::default_tol")]
    pub tol: f64,
    #[serde(default = "PicardConfig::default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "PicardConfig::default_strip_safety")]
    pub strip_safety: f64,
}

impl PicardConfig {
    fn default_tol() -> f64 {
        PicardParams::default().tol
    }
    fn default_max_iter() -> usize {
        PicardParams::default().max_iter
    }
    fn default_strip_safety() -> f64 {
        PicardParams::default().strip_safety
    }
}

impl Default for PicardConfig {
    fn default() -> Self {
        PicardConfig {
            tol: Self::default_tol(),
            max_iter: Self::default_max_iter(),
            strip_safety: Self::default_strip_safety(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub a: f64,
    pub x0: f64,
    #[serde(rename = "A")]
    pub value_at_x0: f64,
    #[serde(default = "zero")]
    pub phi1: String,
    #[serde(default = "zero")]
    pub phi2: String,
    #[serde(default = "zero")]
    pub psi1: String,
    #[serde(default = "zero")]
    pub psi2: String,
    #[serde(rename = "F", default = "zero")]
    pub source: String,
    #[serde(rename = "f", default = "zero")]
    pub nonlinearity: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lipschitz: Option<f64>,
    /// Known solution in `t`, `x`, used as the reference by `converge`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    #[serde(default)]
    pub window: WindowConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub picard: PicardConfig,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

impl Config {
    pub fn from_toml_str(text: &str) -> std::result::Result<Config, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError(e.to_string()))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configs always serialize")
    }

    pub fn spec(&self) -> Result<ProblemSpec> {
        ProblemSpec::builder(self.a, self.x0, self.value_at_x0)
            .phi1(&self.phi1)
            .phi2(&self.phi2)
            .psi1(&self.psi1)
            .psi2(&self.psi2)
            .source(&self.source)
            .nonlinearity(&self.nonlinearity)
            .lipschitz(self.lipschitz)
            .build()
    }

    /// Checks everything a solve would check up front: expressions,
    /// window, grid and Picard controls.
    pub fn validate(&self) -> Result<ProblemSpec> {
        let spec = self.spec()?;
        Grid::new(&spec, &self.grid_params())?;
        self.picard_params().validate()?;
        self.exact_expr()?;
        Ok(spec)
    }

    pub fn grid_params(&self) -> GridParams {
        GridParams {
            t_final: self.window.t_final,
            x_lo: self.window.xmin,
            x_hi: self.window.xmax,
            nt: self.grid.nt,
        }
    }

    pub fn picard_params(&self) -> PicardParams {
        PicardParams {
            tol: self.picard.tol,
            max_iter: self.picard.max_iter,
            strip_safety: self.picard.strip_safety,
        }
    }

    pub fn exact_expr(&self) -> Result<Option<Expr>> {
        self.exact
            .as_deref()
            .map(|src| parse(src, SOURCE_VARS).map_err(crate::Error::expr("exact")))
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_round_trip() {
        let c = Config::from_toml_str("a = 1.0\nx0 = 0.0\nA = 1.0\nphi2 = \"1\"\n").unwrap();
        assert_eq!(c.grid.nt, 128);
        assert_eq!(c.window, WindowConfig::default());
        assert_eq!(c.picard, PicardConfig::default());
        assert_eq!(c.psi1, "0");
        let again = Config::from_toml_str(&c.to_toml_string()).unwrap();
        assert_eq!(again, c);
        assert!(c.spec().is_ok());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(Config::from_toml_str("a = 1.0\nx0 = 0.0\nA = 0.0\nb = 2\n").is_err());
        assert!(Config::from_toml_str("a = 1.0\nx0 = 0.0\nA = 0.0\n[grid]\nnx = 2\n").is_err());
        assert!(Config::from_toml_str("x0 = 0.0\nA = 0.0\n").is_err());
    }

    #[test]
    fn bad_expression_surfaces_as_library_error() {
        let c = Config::from_toml_str("a = 1.0\nx0 = 0.0\nA = 0.0\nphi1 = \"sin(\"\n").unwrap();
        assert!(matches!(c.spec(), Err(crate::Error::Expression { field: "phi1", .. })));
    }
}
