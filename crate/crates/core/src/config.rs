//! Run configuration: JSON file, dotted-path overrides, and resolution into
//! solver inputs.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Result, VortexError};
use crate::metric::RadialMetricMode;
use crate::params::{make_grid, Grid2D, PhysicalParams, RadialGrid, RadialGridSpec};
use crate::planar::SolveOptions;
use crate::radial::{RadialOptions, VEquation};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(rename = "R")]
    pub half_extent: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RadialConfig {
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
    /// Explicit node list; overrides the graded construction.
    pub nodes: Option<Vec<f64>>,
    pub ratio: Option<f64>,
    pub h_max: Option<f64>,
    pub r_far: Option<f64>,
    pub metric_mode: Option<RadialMetricMode>,
    pub v_equation: Option<VEquation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub tol: Option<f64>,
    /// Outer iterations (planar) or fixed-point iterations (radial).
    pub max_iter: Option<usize>,
    /// Damping of the radial fixed-point iteration.
    pub omega: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub lambda: f64,
    #[serde(rename = "G")]
    pub g_newton: f64,
    pub g0: f64,
    pub points: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radial: Option<RadialConfig>,
    #[serde(default)]
    pub solver: SolverConfig,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| VortexError::Config(e.to_string()))?;
        cfg.check_shape()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    fn check_shape(&self) -> Result<()> {
        if self.grid.is_none() && self.radial.is_none() {
            return Err(VortexError::Config(
                "one of `grid` (planar) or `radial` is required".into(),
            ));
        }
        Ok(())
    }

    pub fn params(&self) -> PhysicalParams {
        PhysicalParams::new(self.lambda, self.g_newton, self.g0, self.points.clone())
    }

    pub fn grid2d(&self) -> Result<Grid2D> {
        let g = self
            .grid
            .as_ref()
            .ok_or_else(|| VortexError::Config("planar run needs a `grid` section".into()))?;
        make_grid(g.half_extent, g.n, &self.points)
    }

    pub fn radial_grid(&self) -> Result<RadialGrid> {
        let r = self.radial.clone().unwrap_or_default();
        if let Some(nodes) = r.nodes {
            return RadialGrid::from_nodes(nodes);
        }
        let d = RadialGridSpec::default();
        RadialGrid::graded(&RadialGridSpec {
            r_min: r.r_min.unwrap_or(d.r_min),
            r_max: r.r_max.unwrap_or(d.r_max),
            ratio: r.ratio.unwrap_or(d.ratio),
            h_max: r.h_max.unwrap_or(d.h_max),
            r_far: r.r_far.unwrap_or(d.r_far),
        })
    }

    pub fn planar_options(&self) -> SolveOptions {
        let d = SolveOptions::default();
        SolveOptions {
            tol: self.solver.tol.unwrap_or(d.tol),
            max_outer: self.solver.max_iter.unwrap_or(d.max_outer),
            max_inner: d.max_inner,
        }
    }

    pub fn radial_options(&self) -> RadialOptions {
        let d = RadialOptions::default();
        let r = self.radial.clone().unwrap_or_default();
        RadialOptions {
            tol: self.solver.tol.unwrap_or(d.tol),
            max_iter: self.solver.max_iter.unwrap_or(d.max_iter),
            omega: self.solver.omega.unwrap_or(d.omega),
            metric_mode: r.metric_mode.unwrap_or(d.metric_mode),
            v_equation: r.v_equation.unwrap_or(d.v_equation),
            shoot: d.shoot,
        }
    }

    /// The radial ansatz puts every vortex at the origin.
    pub fn check_radial_points(&self) -> Result<()> {
        if self.points.iter().any(|p| p[0] != 0.0 || p[1] != 0.0) {
            return Err(VortexError::InvalidParams(
                "radial runs need every vortex point at the origin".into(),
            ));
        }
        Ok(())
    }

    /// Applies `key=value` overrides in order (last one wins). Keys are dotted
    /// paths into the JSON form and must already exist, except for optional
    /// entries of the `radial` and `solver` sections. `N` is a pseudo-key that
    /// replaces the points by `N` copies of the first point (the origin when
    /// there is none).
    pub fn with_overrides(&self, overrides: &[(String, String)]) -> Result<Self> {
        let mut root = serde_json::to_value(self)?;
        for (key, raw) in overrides {
            if key == "N" {
                let n: usize = raw
                    .parse()
                    .map_err(|_| VortexError::Config(format!("N must be a non-negative integer, got `{raw}`")))?;
                let base = self.points.first().copied().unwrap_or([0.0, 0.0]);
                root["points"] = serde_json::to_value(vec![base; n])?;
                continue;
            }
            let value = parse_value(raw);
            set_path(&mut root, key, value)?;
        }
        let cfg: Self = serde_json::from_value(root).map_err(|e| VortexError::Config(e.to_string()))?;
        cfg.check_shape()?;
        Ok(cfg)
    }
}

/// Sections whose absent entries may be created by an override.
const OPEN_SECTIONS: [&str; 3] = ["radial", "solver", "grid"];

fn set_path(root: &mut Value, key: &str, value: Value) -> Result<()> {
    let parts: Vec<&str> = key.split('.').collect();
    let mut node = root;
    for (depth, part) in parts.iter().enumerate() {
        let last = depth + 1 == parts.len();
        let obj = node
            .as_object_mut()
            .ok_or_else(|| VortexError::Config(format!("`{key}`: `{part}` is not inside an object")))?;
        let open = depth == 1 && OPEN_SECTIONS.contains(&parts[0]);
        if !obj.contains_key(*part) {
            if !(open || (depth == 0 && OPEN_SECTIONS.contains(part))) {
                return Err(VortexError::Config(format!("unknown config key `{key}`")));
            }
            obj.insert(part.to_string(), if last { Value::Null } else { Value::Object(Default::default()) });
        }
        let child = obj.get_mut(*part).expect("inserted above");
        if last {
            *child = value;
            return Ok(());
        }
        if child.is_null() {
            *child = Value::Object(Default::default());
        }
        node = child;
    }
    Ok(())
}

/// JSON when it parses, otherwise a bare string.
fn parse_value(raw: &str) -> Value {
    serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()))
}

/// Splits `KEY=VALUE`.
pub fn parse_assignment(s: &str) -> Result<(String, String)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| VortexError::Config(format!("expected KEY=VALUE, got `{s}`")))?;
    if k.is_empty() {
        return Err(VortexError::Config(format!("empty key in `{s}`")));
    }
    Ok((k.trim().to_string(), v.trim().to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const PLANAR: &str = r#"{"lambda": 1, "G": 0, "g0": 1, "points": [[0, 0]], "grid": {"R": 20, "n": 257}}"#;

    #[test]
    fn parses_and_resolves() {
        let c = Config::from_json(PLANAR).unwrap();
        assert_eq!(c.grid2d().unwrap().h, 40.0 / 256.0);
        assert_eq!(c.planar_options().tol, SolveOptions::default().tol);
    }

    #[test]
    fn overrides_last_one_wins() {
        let c = Config::from_json(PLANAR).unwrap();
        let o = vec![
            ("solver.tol".to_string(), "1e-9".to_string()),
            ("G".to_string(), "0.01".to_string()),
            ("G".to_string(), "0.02".to_string()),
            ("N".to_string(), "3".to_string()),
        ];
        let c2 = c.with_overrides(&o).unwrap();
        assert_eq!(c2.solver.tol, Some(1e-9));
        assert_eq!(c2.g_newton, 0.02);
        assert_eq!(c2.points.len(), 3);
        assert_eq!(c.g_newton, 0.0);
    }

    #[test]
    fn rejects_unknown_keys() {
        let c = Config::from_json(PLANAR).unwrap();
        assert!(c.with_overrides(&[("foo".into(), "1".into())]).is_err());
        assert!(c.with_overrides(&[("grid.m".into(), "1".into())]).is_err());
        assert!(Config::from_json(r#"{"lambda": 1, "G": 0, "g0": 1, "points": []}"#).is_err());
        assert!(parse_assignment("novalue").is_err());
    }

    #[test]
    fn radial_section_defaults() {
        let c = Config::from_json(r#"{"lambda": 2, "G": 0.01, "g0": 1, "points": [[0,0],[0,0]], "radial": {"r_max": 500}}"#)
            .unwrap();
        let g = c.radial_grid().unwrap();
        assert_eq!(g.r_max, 500.0);
        assert!(c.check_radial_points().is_ok());
        let c2 = c.with_overrides(&[("radial.metric_mode".into(), "self_consistent".into())]).unwrap();
        assert_eq!(c2.radial_options().metric_mode, RadialMetricMode::SelfConsistent);
    }
}
