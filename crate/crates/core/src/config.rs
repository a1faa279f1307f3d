//! Flat key-value configuration files mirroring the CLI flags.
//!
//! One `key = value` pair per line, `#` comments, keys named exactly like the
//! long CLI flags. CLI flags override file values. The repeatable `material`
//! key defines user materials:
//!
//! ```text
//! sphere = K,Au
//! substrate = Inf
//! radius-nm = 10,50
//! z-min = 0.5
//! z-max = 40
//! points = 80
//! spacing = linear
//! method = mode_sum
//! format = csv
//! material = Glass epsilon 2.25
//! material = MyMetal drude 11.2 0.02
//! ```

use std::path::Path;

use crate::error::{Error, Result};
use crate::materials::DielectricModel;

/// Parsed configuration with every field optional; unset fields defer to
/// CLI flags or defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    pub spheres: Option<Vec<String>>,
    pub substrates: Option<Vec<String>>,
    pub radii_nm: Option<Vec<f64>>,
    pub z_min_nm: Option<f64>,
    pub z_max_nm: Option<f64>,
    pub points: Option<usize>,
    pub spacing: Option<String>,
    pub method: Option<String>,
    pub format: Option<String>,
    pub output: Option<String>,
    pub ambient: Option<f64>,
    pub damping: Option<f64>,
    pub threads: Option<usize>,
    pub materials: Vec<(String, DielectricModel)>,
}

fn parse_f64(value: &str, line: usize) -> Result<f64> {
    value.trim().parse().map_err(|_| Error::ConfigParse {
        line,
        message: format!("expected a number, got '{value}'"),
    })
}

fn parse_list_f64(value: &str, line: usize) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|v| parse_f64(v, line))
        .collect::<Result<Vec<_>>>()
}

fn parse_material(value: &str, line: usize) -> Result<(String, DielectricModel)> {
    let parts: Vec<&str> = value.split_whitespace().collect();
    let bad = |message: String| Error::ConfigParse { line, message };
    match parts.as_slice() {
        [name, kind, eps] if kind.eq_ignore_ascii_case("epsilon") => {
            let model = DielectricModel::constant(parse_f64(eps, line)?)
                .map_err(|e| bad(e.to_string()))?;
            Ok((name.to_string(), model))
        }
        [name, kind, omega_p, damping] if kind.eq_ignore_ascii_case("drude") => {
            let model =
                DielectricModel::drude(parse_f64(omega_p, line)?, parse_f64(damping, line)?)
                    .map_err(|e| bad(e.to_string()))?;
            Ok((name.to_string(), model))
        }
        _ => Err(bad(format!(
            "material must be '<name> epsilon <value>' or '<name> drude <omega_p_ev> <damping_ratio>', got '{value}'"
        ))),
    }
}

/// Parse configuration text.
pub fn parse_config(text: &str) -> Result<ConfigFile> {
    let mut config = ConfigFile::default();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::ConfigParse {
            line: line_no,
            message: format!("expected 'key = value', got '{line}'"),
        })?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "sphere" => {
                config.spheres = Some(value.split(',').map(|s| s.trim().to_string()).collect())
            }
            "substrate" => {
                config.substrates = Some(value.split(',').map(|s| s.trim().to_string()).collect())
            }
            "radius-nm" => config.radii_nm = Some(parse_list_f64(value, line_no)?),
            "z-min" => config.z_min_nm = Some(parse_f64(value, line_no)?),
            "z-max" => config.z_max_nm = Some(parse_f64(value, line_no)?),
            "points" => {
                config.points = Some(value.parse().map_err(|_| Error::ConfigParse {
                    line: line_no,
                    message: format!("expected an integer, got '{value}'"),
                })?)
            }
            "spacing" => config.spacing = Some(value.to_string()),
            "method" => config.method = Some(value.to_string()),
            "format" => config.format = Some(value.to_string()),
            "output" => config.output = Some(value.to_string()),
            "ambient" => config.ambient = Some(parse_f64(value, line_no)?),
            "damping" => config.damping = Some(parse_f64(value, line_no)?),
            "threads" => {
                config.threads = Some(value.parse().map_err(|_| Error::ConfigParse {
                    line: line_no,
                    message: format!("expected an integer, got '{value}'"),
                })?)
            }
            "material" => config.materials.push(parse_material(value, line_no)?),
            other => {
                return Err(Error::ConfigParse {
                    line: line_no,
                    message: format!("unknown key '{other}'"),
                })
            }
        }
    }
    Ok(config)
}

/// Read and parse a configuration file.
pub fn load_config(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}
