//! Parameter sweeps over (z, R, sphere, substrate), plot-ready CSV/JSON
//! emission, and log-log power-law fitting.
//!
//! Rows are evaluated in parallel but always emitted in the deterministic
//! nested input order (sphere, substrate, radius, z ascending), with
//! locale-independent 12-significant-digit formatting, so identical sweep
//! specs produce byte-identical files regardless of the worker count.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dos::{dos_interaction_energy, QuadratureSpec};
use crate::emit::{fmt_float_12sig, write_atomic};
use crate::error::{Error, Result};
use crate::materials::{DielectricModel, MaterialLibrary};
use crate::modes::{force, interaction_energy, mode_frequencies, DerivativeMethod, EnergyMethod};
use crate::system::SystemSpec;

/// Spacing of the z grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridSpacing {
    Linear,
    Log,
}

/// Output file format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// One full sweep description: grids, materials, method, and output shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub z_min_nm: f64,
    pub z_max_nm: f64,
    pub points: usize,
    pub spacing: GridSpacing,
    pub radii_nm: Vec<f64>,
    pub spheres: Vec<String>,
    pub substrates: Vec<String>,
    pub ambient_epsilon: f64,
    pub method: EnergyMethod,
    /// Replaces every sphere's damping ratio when set (DOS route only).
    pub damping_override: Option<f64>,
}

impl SweepSpec {
    pub fn validate(&self, library: &MaterialLibrary) -> Result<()> {
        if self.points < 2 {
            return Err(Error::InvalidGrid(format!(
                "grid needs at least 2 points, got {}",
                self.points
            )));
        }
        if !(self.z_min_nm < self.z_max_nm) {
            return Err(Error::InvalidGrid(format!(
                "z range must satisfy min < max, got [{}, {}]",
                self.z_min_nm, self.z_max_nm
            )));
        }
        if self.z_min_nm < 0.0 {
            return Err(Error::InvalidGrid("z must be >= 0".into()));
        }
        if matches!(self.spacing, GridSpacing::Log) && self.z_min_nm <= 0.0 {
            return Err(Error::InvalidGrid(
                "log spacing requires z_min > 0; contact points need linear spacing".into(),
            ));
        }
        if self.radii_nm.is_empty() || self.radii_nm.iter().any(|&r| r <= 0.0) {
            return Err(Error::InvalidGrid("radii must be positive".into()));
        }
        if self.spheres.is_empty() || self.substrates.is_empty() {
            return Err(Error::InvalidGrid(
                "at least one sphere and one substrate are required".into(),
            ));
        }
        if !(self.ambient_epsilon > 0.0) {
            return Err(Error::InvalidGrid(
                "ambient permittivity must be > 0".into(),
            ));
        }
        if let Some(d) = self.damping_override {
            if !(d > 0.0) {
                return Err(Error::InvalidGrid("damping override must be > 0".into()));
            }
        }
        for name in self.spheres.iter().chain(&self.substrates) {
            library.resolve(name)?;
        }
        Ok(())
    }

    /// The z grid, ascending, hitting both endpoints exactly.
    pub fn z_grid(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                if i == 0 {
                    return self.z_min_nm;
                }
                if i == n - 1 {
                    return self.z_max_nm;
                }
                let t = i as f64 / (n - 1) as f64;
                match self.spacing {
                    GridSpacing::Linear => self.z_min_nm + (self.z_max_nm - self.z_min_nm) * t,
                    GridSpacing::Log => {
                        (self.z_min_nm.ln() + (self.z_max_nm.ln() - self.z_min_nm.ln()) * t).exp()
                    }
                }
            })
            .collect()
    }
}

/// One evaluated sweep point. Field order is the emitted column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub z_nm: f64,
    #[serde(rename = "R_nm")]
    pub r_nm: f64,
    #[serde(rename = "z_over_R")]
    pub z_over_r: f64,
    pub f_c: f64,
    pub n_parallel: f64,
    pub n_perp: f64,
    pub omega_parallel_ev: f64,
    pub omega_perp_ev: f64,
    pub energy_ev: f64,
    pub force_ev_per_nm: f64,
    #[serde(rename = "force_pN")]
    pub force_pn: f64,
    pub method: String,
    pub sphere: String,
    pub substrate: String,
}

/// CSV header; must match the `SweepRow` field order exactly.
pub const CSV_HEADER: &str = "z_nm,R_nm,z_over_R,f_c,n_parallel,n_perp,omega_parallel_ev,\
omega_perp_ev,energy_ev,force_ev_per_nm,force_pN,method,sphere,substrate";

fn evaluate_row(
    sphere_name: &str,
    sphere: &DielectricModel,
    substrate_name: &str,
    substrate: &DielectricModel,
    radius_nm: f64,
    z_nm: f64,
    ambient: f64,
    method: EnergyMethod,
    damping_override: Option<f64>,
) -> Result<SweepRow> {
    let sphere_model = match (method, damping_override, sphere) {
        (EnergyMethod::Dos, Some(ratio), DielectricModel::Drude { omega_p_ev, .. }) => {
            DielectricModel::drude(*omega_p_ev, ratio)?
        }
        _ => *sphere,
    };
    let system = SystemSpec::new(radius_nm, z_nm, sphere_model, *substrate, ambient)?;
    let decomposition = system.decomposition()?;
    let spectrum = mode_frequencies(&decomposition, &system.sphere)?;
    let f_c = system.contrast_factor()?;

    let energy_ev = match method {
        EnergyMethod::ModeSum => interaction_energy(&system)?.energy_ev,
        EnergyMethod::Dos => {
            let quad = QuadratureSpec::for_plasma_frequency(match system.sphere {
                DielectricModel::Drude { omega_p_ev, .. } => omega_p_ev,
                _ => unreachable!("mode_frequencies already required a Drude sphere"),
            });
            dos_interaction_energy(&system, &quad)?.energy_ev
        }
    };

    // Contact points fall back to the analytic derivative automatically.
    let derivative = match method {
        EnergyMethod::ModeSum => DerivativeMethod::Analytic,
        EnergyMethod::Dos if z_nm == 0.0 => DerivativeMethod::Analytic,
        EnergyMethod::Dos => DerivativeMethod::CentralDifference,
    };
    let f = force(&system, derivative)?;

    Ok(SweepRow {
        z_nm,
        r_nm: radius_nm,
        z_over_r: z_nm / radius_nm,
        f_c,
        n_parallel: decomposition.n_parallel(),
        n_perp: decomposition.n_perpendicular(),
        omega_parallel_ev: spectrum.omega_parallel_ev(),
        omega_perp_ev: spectrum.omega_perpendicular_ev(),
        energy_ev,
        force_ev_per_nm: f.force_ev_per_nm,
        force_pn: f.force_pn,
        method: method.as_str().to_string(),
        sphere: sphere_name.to_string(),
        substrate: substrate_name.to_string(),
    })
}

/// Run a sweep, producing one row per (sphere, substrate, R, z) tuple in
/// deterministic nested input order.
pub fn run_sweep(spec: &SweepSpec, library: &MaterialLibrary) -> Result<Vec<SweepRow>> {
    spec.validate(library)?;
    let z_grid = spec.z_grid();

    let mut tasks = Vec::new();
    for sphere_name in &spec.spheres {
        let (sphere_canonical, sphere_model) = library.resolve(sphere_name)?;
        for substrate_name in &spec.substrates {
            let (substrate_canonical, substrate_model) = library.resolve(substrate_name)?;
            for &radius in &spec.radii_nm {
                for &z in &z_grid {
                    tasks.push((
                        sphere_canonical.to_string(),
                        *sphere_model,
                        substrate_canonical.to_string(),
                        *substrate_model,
                        radius,
                        z,
                    ));
                }
            }
        }
    }

    tasks
        .par_iter()
        .map(
            |(sphere_name, sphere, substrate_name, substrate, radius, z)| {
                evaluate_row(
                    sphere_name,
                    sphere,
                    substrate_name,
                    substrate,
                    *radius,
                    *z,
                    spec.ambient_epsilon,
                    spec.method,
                    spec.damping_override,
                )
            },
        )
        .collect()
}

/// Render rows as CSV with the pinned header and 12-significant-digit floats.
pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 192 + CSV_HEADER.len() + 1);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let floats = [
            row.z_nm,
            row.r_nm,
            row.z_over_r,
            row.f_c,
            row.n_parallel,
            row.n_perp,
            row.omega_parallel_ev,
            row.omega_perp_ev,
            row.energy_ev,
            row.force_ev_per_nm,
            row.force_pn,
        ];
        for v in floats {
            out.push_str(&fmt_float_12sig(v));
            out.push(',');
        }
        out.push_str(&row.method);
        out.push(',');
        out.push_str(&row.sphere);
        out.push(',');
        out.push_str(&row.substrate);
        out.push('\n');
    }
    out
}

/// Render rows as a JSON array that re-ingests to identical rows.
pub fn rows_to_json(rows: &[SweepRow]) -> Result<String> {
    serde_json::to_string_pretty(rows).map_err(|e| Error::Io {
        path: "<json>".into(),
        source: std::io::Error::other(e),
    })
}

/// Write rows to `path` atomically in the requested format.
pub fn write_rows(rows: &[SweepRow], format: OutputFormat, path: &Path) -> Result<()> {
    let contents = match format {
        OutputFormat::Csv => rows_to_csv(rows),
        OutputFormat::Json => rows_to_json(rows)?,
    };
    write_atomic(path, contents.as_bytes())
}

/// Columns addressable by the power-law fit.
pub fn column_value(row: &SweepRow, column: &str) -> Result<f64> {
    Ok(match column {
        "z_nm" => row.z_nm,
        "R_nm" => row.r_nm,
        "z_over_R" => row.z_over_r,
        "f_c" => row.f_c,
        "n_parallel" => row.n_parallel,
        "n_perp" => row.n_perp,
        "omega_parallel_ev" => row.omega_parallel_ev,
        "omega_perp_ev" => row.omega_perp_ev,
        "energy_ev" => row.energy_ev,
        "force_ev_per_nm" => row.force_ev_per_nm,
        "force_pN" => row.force_pn,
        _ => return Err(Error::UnknownColumn(column.to_string())),
    })
}

/// Least-squares line on (log|x|, log|y|).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub slope: f64,
    pub slope_std_error: f64,
    /// Intercept in log space: log|y| = intercept + slope·log|x|.
    pub intercept: f64,
    /// Root-mean-square residual of log|y|.
    pub residual_rms: f64,
    pub points_used: usize,
}

/// Fit log|y| = a + b·log|x| over the rows whose x column lies in
/// [x_min, x_max]. Requires at least 8 rows in range and a single sign of y.
pub fn fit_power_law(
    rows: &[SweepRow],
    x_column: &str,
    y_column: &str,
    x_min: f64,
    x_max: f64,
) -> Result<PowerLawFit> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for row in rows {
        let x = column_value(row, x_column)?;
        if x < x_min || x > x_max {
            continue;
        }
        xs.push(x);
        ys.push(column_value(row, y_column)?);
    }
    fit_power_law_samples(&xs, &ys)
}

/// Power-law fit on raw samples; see [`fit_power_law`].
pub fn fit_power_law_samples(xs: &[f64], ys: &[f64]) -> Result<PowerLawFit> {
    if xs.len() < 8 {
        return Err(Error::FitTooFewPoints(xs.len()));
    }
    let positive = ys.iter().filter(|&&y| y > 0.0).count();
    let negative = ys.iter().filter(|&&y| y < 0.0).count();
    if (positive > 0 && negative > 0) || positive + negative < ys.len() {
        return Err(Error::FitSignChange);
    }

    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.abs().ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.abs().ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidGrid("x range collapses to one point".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let dof = (xs.len() - 2).max(1) as f64;
    Ok(PowerLawFit {
        slope,
        slope_std_error: (rss / dof / sxx).sqrt(),
        intercept,
        residual_rms: (rss / n).sqrt(),
        points_used: xs.len(),
    })
}

/// Sweep behind the energy-vs-z/R figure: every sphere preset over every
/// substrate preset, z/R log-spaced over [0.01, 10], R = 50 nm.
pub fn fig2_spec(points: usize) -> SweepSpec {
    let radius = 50.0;
    SweepSpec {
        z_min_nm: 0.01 * radius,
        z_max_nm: 10.0 * radius,
        points,
        spacing: GridSpacing::Log,
        radii_nm: vec![radius],
        spheres: ["K", "Au", "Ag", "Al"].map(String::from).to_vec(),
        substrates: ["Inf", "Al2O3", "TiO2"].map(String::from).to_vec(),
        ambient_epsilon: 1.0,
        method: EnergyMethod::ModeSum,
        damping_override: None,
    }
}

/// Sweeps behind the force-vs-z figure: K over Al2O3 and Al over Inf,
/// R ∈ {10, 50, 100, 500} nm, z linear over [0, 40] nm (contact included).
pub fn fig3_specs(points: usize) -> Vec<SweepSpec> {
    [("K", "Al2O3"), ("Al", "Inf")]
        .into_iter()
        .map(|(sphere, substrate)| SweepSpec {
            z_min_nm: 0.0,
            z_max_nm: 40.0,
            points,
            spacing: GridSpacing::Linear,
            radii_nm: vec![10.0, 50.0, 100.0, 500.0],
            spheres: vec![sphere.to_string()],
            substrates: vec![substrate.to_string()],
            ambient_epsilon: 1.0,
            method: EnergyMethod::ModeSum,
            damping_override: None,
        })
        .collect()
}

/// Sweep behind the force-vs-material figure: all four metals at R = 50 nm
/// over Al2O3 and TiO2, z linear over [0, 40] nm.
pub fn fig4_spec(points: usize) -> SweepSpec {
    SweepSpec {
        z_min_nm: 0.0,
        z_max_nm: 40.0,
        points,
        spacing: GridSpacing::Linear,
        radii_nm: vec![50.0],
        spheres: ["K", "Au", "Ag", "Al"].map(String::from).to_vec(),
        substrates: ["Al2O3", "TiO2"].map(String::from).to_vec(),
        ambient_epsilon: 1.0,
        method: EnergyMethod::ModeSum,
        damping_override: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn small_spec() -> SweepSpec {
        SweepSpec {
            z_min_nm: 1.0,
            z_max_nm: 100.0,
            points: 5,
            spacing: GridSpacing::Log,
            radii_nm: vec![10.0, 50.0],
            spheres: vec!["K".into(), "Al".into()],
            substrates: vec!["Inf".into()],
            ambient_epsilon: 1.0,
            method: EnergyMethod::ModeSum,
            damping_override: None,
        }
    }

    #[test]
    fn row_count_and_order() {
        let lib = MaterialLibrary::standard();
        let rows = run_sweep(&small_spec(), &lib).unwrap();
        assert_eq!(rows.len(), 2 * 1 * 2 * 5);
        assert_eq!(rows[0].sphere, "K");
        assert_eq!(rows[0].r_nm, 10.0);
        assert_eq!(rows[0].z_nm, 1.0);
        assert_eq!(rows[4].z_nm, 100.0);
        assert_eq!(rows[5].r_nm, 50.0);
        assert_eq!(rows[10].sphere, "Al");
        assert!(rows.iter().all(|r| r.energy_ev < 0.0));
        assert!(rows.iter().all(|r| r.force_pn < 0.0));
    }

    #[test]
    fn rows_identical_across_worker_counts() {
        let lib = MaterialLibrary::standard();
        let spec = small_spec();
        let csv: Vec<String> = [1usize, 4]
            .iter()
            .map(|&threads| {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .unwrap();
                let rows = pool.install(|| run_sweep(&spec, &lib)).unwrap();
                rows_to_csv(&rows)
            })
            .collect();
        assert_eq!(csv[0], csv[1]);
    }

    #[test]
    fn csv_header_matches_field_order() {
        let lib = MaterialLibrary::standard();
        let rows = run_sweep(&small_spec(), &lib).unwrap();
        let csv = rows_to_csv(&rows[..1]);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(fields.len(), 14);
        assert_eq!(fields[0], fmt_float_12sig(rows[0].z_nm));
        assert_eq!(fields[11], "mode_sum");
        assert_eq!(fields[12], "K");
        assert_eq!(fields[13], "Inf");
    }

    #[test]
    fn json_round_trip_is_identity() {
        let lib = MaterialLibrary::standard();
        let rows = run_sweep(&small_spec(), &lib).unwrap();
        let text = rows_to_json(&rows).unwrap();
        let back: Vec<SweepRow> = serde_json::from_str(&text).unwrap();
        assert_eq!(rows, back);
    }

    #[test]
    fn zero_contrast_rows_are_null() {
        let lib = {
            let mut lib = MaterialLibrary::standard();
            lib.add_user("Vacuum", DielectricModel::constant(1.0).unwrap())
                .unwrap();
            lib
        };
        let spec = SweepSpec {
            substrates: vec!["Vacuum".into()],
            ..small_spec()
        };
        let rows = run_sweep(&spec, &lib).unwrap();
        assert!(rows.iter().all(|r| r.energy_ev == 0.0 && r.force_pn == 0.0));
        assert!(rows.iter().all(|r| r.f_c == 0.0));
    }

    #[test]
    fn validation_failures() {
        let lib = MaterialLibrary::standard();
        let mut spec = small_spec();
        spec.points = 1;
        assert!(matches!(run_sweep(&spec, &lib), Err(Error::InvalidGrid(_))));

        let mut spec = small_spec();
        spec.z_min_nm = 0.0;
        assert!(matches!(run_sweep(&spec, &lib), Err(Error::InvalidGrid(_))));
        spec.spacing = GridSpacing::Linear;
        assert!(run_sweep(&spec, &lib).is_ok());

        let mut spec = small_spec();
        spec.spheres = vec!["Kryptonite".into()];
        assert!(matches!(
            run_sweep(&spec, &lib),
            Err(Error::UnknownMaterial { .. })
        ));
    }

    #[test]
    fn fig_presets_have_expected_row_counts() {
        let lib = MaterialLibrary::standard();
        let fig2 = run_sweep(&fig2_spec(200), &lib).unwrap();
        assert_eq!(fig2.len(), 2400);
        assert_relative_eq!(fig2[0].z_over_r, 0.01, max_relative = 1e-12);
        assert_relative_eq!(fig2[199].z_over_r, 10.0, max_relative = 1e-12);

        let fig3: Vec<SweepRow> = fig3_specs(81)
            .iter()
            .flat_map(|s| run_sweep(s, &lib).unwrap())
            .collect();
        assert_eq!(fig3.len(), 2 * 4 * 81);
        assert_eq!(fig3[0].z_nm, 0.0);

        let fig4 = run_sweep(&fig4_spec(81), &lib).unwrap();
        assert_eq!(fig4.len(), 4 * 2 * 81);
    }

    #[test]
    fn synthetic_power_law_is_recovered_exactly() {
        let xs: Vec<f64> = (1..=20).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x.powi(-3)).collect();
        let fit = fit_power_law_samples(&xs, &ys).unwrap();
        assert_relative_eq!(fit.slope, -3.0, epsilon = 1e-12);
        assert!(fit.slope_std_error < 1e-12);
        assert!(fit.residual_rms < 1e-12);
    }

    #[test]
    fn fit_rejects_mixed_signs_and_short_ranges() {
        let xs: Vec<f64> = (1..=10).map(|i| i as f64).collect();
        let mut ys: Vec<f64> = xs.iter().map(|x| x.powi(-2)).collect();
        ys[3] = -ys[3];
        assert!(matches!(
            fit_power_law_samples(&xs, &ys),
            Err(Error::FitSignChange)
        ));
        assert!(matches!(
            fit_power_law_samples(&xs[..5], &ys[..5]),
            Err(Error::FitTooFewPoints(5))
        ));
    }

    #[test]
    fn fit_selects_rows_by_range_and_column() {
        let lib = MaterialLibrary::standard();
        let spec = SweepSpec {
            z_min_nm: 1.0,
            z_max_nm: 1000.0,
            points: 40,
            spacing: GridSpacing::Log,
            radii_nm: vec![10.0],
            spheres: vec!["Al".into()],
            substrates: vec!["Inf".into()],
            ambient_epsilon: 1.0,
            method: EnergyMethod::ModeSum,
            damping_override: None,
        };
        let rows = run_sweep(&spec, &lib).unwrap();
        let fit = fit_power_law(&rows, "z_over_R", "energy_ev", 10.0, 100.0).unwrap();
        assert!(fit.points_used >= 8);
        assert!(fit.slope < -2.5 && fit.slope > -3.5);
        assert!(matches!(
            fit_power_law(&rows, "bogus", "energy_ev", 10.0, 100.0),
            Err(Error::UnknownColumn(_))
        ));
    }

    #[test]
    fn atomic_write_produces_file() {
        let lib = MaterialLibrary::standard();
        let rows = run_sweep(&small_spec(), &lib).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rows.csv");
        write_rows(&rows, OutputFormat::Csv, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), rows.len() + 1);
    }
}
