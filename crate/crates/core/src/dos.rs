//! Density of states of the proper modes and the quadrature energy route.
//!
//! With finite Drude damping every mode broadens into a Lorentzian:
//!
//!   ρ(ω) = (2ω_p/π) Σ_s √n_s (ωγ) / [(ω² − ω_p²n_s)² + (ωγ)²],   γ = 1/τ,
//!
//! which is the reference implementation here. The Green's-trace route
//! ρ(ω) = −(1/π) Im[Tr G(u(ω))]·(2ω/ω_p²) with u(ω) = ω(ω + iγ)/ω_p² is the
//! validation path; the two differ by a √n_s vs ω/ω_p prefactor off
//! resonance and agree on it. The interaction energy is ½∫ħωρ dω minus the
//! same integral at z → ∞; both spectra are evaluated inside one integrand
//! at shared quadrature nodes so discretization bias cancels, and the
//! truncated 1/ω³ tail beyond ω_max is added in closed form.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::emit::{fmt_float_12sig, write_atomic};
use crate::error::{Error, Result};
use crate::materials::DielectricModel;
use crate::modes::{EnergyMethod, EnergyResult};
use crate::quadrature::integrate_with_breakpoints;
use crate::spectral::{greens_trace, SpectralDecomposition, N0};
use crate::system::SystemSpec;

/// Which spectral-density formula backs a profile or energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DosRoute {
    LorentzianSum,
    GreensTrace,
}

impl DosRoute {
    pub fn as_str(&self) -> &'static str {
        match self {
            DosRoute::LorentzianSum => "lorentzian_sum",
            DosRoute::GreensTrace => "greens_trace",
        }
    }
}

/// Density of states sampled on a frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DosProfile {
    pub omega_ev: Vec<f64>,
    pub rho_per_ev: Vec<f64>,
    pub damping_ratio: f64,
    pub route: DosRoute,
}

impl DosProfile {
    /// CSV export, columns `omega_ev,rho_per_ev`, written atomically.
    pub fn write_csv(&self, path: &std::path::Path) -> Result<()> {
        let mut out = String::from("omega_ev,rho_per_ev\n");
        for (w, r) in self.omega_ev.iter().zip(&self.rho_per_ev) {
            out.push_str(&fmt_float_12sig(*w));
            out.push(',');
            out.push_str(&fmt_float_12sig(*r));
            out.push('\n');
        }
        write_atomic(path, out.as_bytes())
    }
}

/// Truncation point, tolerance, and panel budget for the energy quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub omega_max_ev: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadratureSpec {
    /// Defaults for a sphere with the given plasma frequency:
    /// ω_max = 10 ω_p, relative tolerance 1e-8.
    pub fn for_plasma_frequency(omega_p_ev: f64) -> Self {
        QuadratureSpec {
            omega_max_ev: 10.0 * omega_p_ev,
            rel_tol: 1e-8,
            max_subdivisions: 20_000,
        }
    }

    fn validate(&self, omega_p_ev: f64) -> Result<()> {
        if self.omega_max_ev < 5.0 * omega_p_ev {
            return Err(Error::InvalidQuadratureSpec(format!(
                "omega_max = {} eV is below 5 omega_p = {} eV",
                self.omega_max_ev,
                5.0 * omega_p_ev
            )));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-4) {
            return Err(Error::InvalidQuadratureSpec(format!(
                "relative tolerance must lie in (0, 1e-4], got {}",
                self.rel_tol
            )));
        }
        Ok(())
    }
}

fn drude_params(sphere: &DielectricModel) -> Result<(f64, f64)> {
    match *sphere {
        DielectricModel::Drude {
            omega_p_ev,
            damping_ratio,
        } => {
            if damping_ratio <= 0.0 {
                return Err(Error::DegenerateDamping);
            }
            Ok((omega_p_ev, damping_ratio))
        }
        ref other => Err(Error::UnsupportedSphereModel {
            model: other.label(),
        }),
    }
}

/// Lorentzian-sum density of states at a single frequency, in eV⁻¹.
pub fn rho_lorentzian(
    decomposition: &SpectralDecomposition,
    omega_p_ev: f64,
    gamma_ev: f64,
    omega_ev: f64,
) -> f64 {
    let mut rho = 0.0;
    for mode in &decomposition.modes {
        let n_s = mode.eigenvalue;
        let center = omega_p_ev * omega_p_ev * n_s;
        let detune = omega_ev * omega_ev - center;
        let width = omega_ev * gamma_ev;
        rho += mode.multiplicity as f64 * n_s.sqrt() * width / (detune * detune + width * width);
    }
    2.0 * omega_p_ev / std::f64::consts::PI * rho
}

/// Green's-trace density of states at a single frequency, in eV⁻¹.
pub fn rho_greens(
    decomposition: &SpectralDecomposition,
    omega_p_ev: f64,
    gamma_ev: f64,
    omega_ev: f64,
) -> f64 {
    let u = Complex64::new(omega_ev, 0.0) * Complex64::new(omega_ev, gamma_ev)
        / (omega_p_ev * omega_p_ev);
    // Im u > 0 for ω > 0, so the trace is never evaluated on a pole.
    let trace = greens_trace(u, decomposition).expect("u off the real axis");
    -(1.0 / std::f64::consts::PI) * trace.im * (2.0 * omega_ev / (omega_p_ev * omega_p_ev))
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::InvalidGrid(
            "DOS grid needs at least two frequencies".into(),
        ));
    }
    if grid[0] < 0.0 {
        return Err(Error::InvalidGrid(
            "DOS grid must start at omega >= 0".into(),
        ));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid(
            "DOS grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Density of states via the explicit Lorentzian sum, sampled on `grid`.
pub fn dos_lorentzian(
    decomposition: &SpectralDecomposition,
    sphere: &DielectricModel,
    grid: &[f64],
) -> Result<DosProfile> {
    let (omega_p, ratio) = drude_params(sphere)?;
    validate_grid(grid)?;
    let gamma = ratio * omega_p;
    Ok(DosProfile {
        omega_ev: grid.to_vec(),
        rho_per_ev: grid
            .iter()
            .map(|&w| rho_lorentzian(decomposition, omega_p, gamma, w))
            .collect(),
        damping_ratio: ratio,
        route: DosRoute::LorentzianSum,
    })
}

/// Density of states via the Green's-operator trace, sampled on `grid`.
pub fn dos_greens(
    decomposition: &SpectralDecomposition,
    sphere: &DielectricModel,
    grid: &[f64],
) -> Result<DosProfile> {
    let (omega_p, ratio) = drude_params(sphere)?;
    validate_grid(grid)?;
    let gamma = ratio * omega_p;
    Ok(DosProfile {
        omega_ev: grid.to_vec(),
        rho_per_ev: grid
            .iter()
            .map(|&w| rho_greens(decomposition, omega_p, gamma, w))
            .collect(),
        damping_ratio: ratio,
        route: DosRoute::GreensTrace,
    })
}

/// Quadrature breakpoints: the interval ends plus geometric brackets around
/// every resonance so the initial panels resolve widths down to γ.
fn resonance_breakpoints(
    decomposition: &SpectralDecomposition,
    omega_p: f64,
    gamma: f64,
    omega_max: f64,
) -> Vec<f64> {
    let mut centers: Vec<f64> = decomposition
        .modes
        .iter()
        .map(|m| omega_p * m.eigenvalue.sqrt())
        .collect();
    centers.push(omega_p * N0.sqrt());
    let mut points = vec![0.0, omega_max];
    for &c in &centers {
        points.push(c);
        let mut k = 1.0;
        while k <= 16384.0 {
            let lo = c - k * gamma;
            let hi = c + k * gamma;
            if lo > 0.0 {
                points.push(lo);
            }
            if hi < omega_max {
                points.push(hi);
            }
            k *= 4.0;
        }
    }
    points.retain(|&p| (0.0..=omega_max).contains(&p));
    points
}

/// Closed-form ½∫_Ω^∞ ħωρ dω of the large-ω expansion, for the z-dependent
/// spectrum minus the z → ∞ reference. Expressed through the mode shifts so
/// the near-cancellation of the two tails costs no precision.
fn energy_tail_difference(
    decomposition: &SpectralDecomposition,
    omega_p: f64,
    gamma: f64,
    omega_max: f64,
    route: DosRoute,
) -> f64 {
    let sqrt_n0 = N0.sqrt();
    match route {
        DosRoute::LorentzianSum => {
            let mut tail = 0.0;
            for mode in &decomposition.modes {
                let n_s = mode.eigenvalue;
                let root_sum = n_s.sqrt() + sqrt_n0;
                let d_sqrt = mode.shift / root_sum; // √n_s − √n₀
                let leading = d_sqrt / omega_max;
                // √n(2ω_p²n − γ²) differenced against the reference value.
                let d_n32 = mode.shift * (n_s + (n_s * N0).sqrt() + N0) / root_sum;
                let next = (2.0 * omega_p * omega_p * d_n32 - gamma * gamma * d_sqrt)
                    / (3.0 * omega_max.powi(3));
                tail += mode.multiplicity as f64 * (leading + next);
            }
            omega_p * gamma / std::f64::consts::PI * tail
        }
        DosRoute::GreensTrace => {
            // 1/ω coefficients carry total multiplicity on both sides and
            // cancel exactly; the 1/ω³ difference survives.
            let shift_sum: f64 = decomposition
                .modes
                .iter()
                .map(|m| m.multiplicity as f64 * m.shift)
                .sum();
            gamma * omega_p * omega_p * shift_sum / (std::f64::consts::PI * omega_max * omega_max)
        }
    }
}

/// Interaction energy from the density of states: V(z) − V(z→∞) with
/// V = ½∫ħωρ(ω)dω, using the Lorentzian-sum route.
pub fn dos_interaction_energy(system: &SystemSpec, quad: &QuadratureSpec) -> Result<EnergyResult> {
    dos_interaction_energy_via(system, quad, DosRoute::LorentzianSum)
}

/// Same as [`dos_interaction_energy`] with an explicit route choice.
pub fn dos_interaction_energy_via(
    system: &SystemSpec,
    quad: &QuadratureSpec,
    route: DosRoute,
) -> Result<EnergyResult> {
    let (omega_p, ratio) = drude_params(&system.sphere)?;
    quad.validate(omega_p)?;
    let gamma = ratio * omega_p;

    let decomposition = system.decomposition()?;
    let reference = SpectralDecomposition::reference();

    let rho = |d: &SpectralDecomposition, w: f64| match route {
        DosRoute::LorentzianSum => rho_lorentzian(d, omega_p, gamma, w),
        DosRoute::GreensTrace => rho_greens(d, omega_p, gamma, w),
    };
    let integrand = |w: f64| 0.5 * w * (rho(&decomposition, w) - rho(&reference, w));

    let points = resonance_breakpoints(&decomposition, omega_p, gamma, quad.omega_max_ev);
    let abs_floor = 1e-20 * omega_p;
    let integral = integrate_with_breakpoints(
        integrand,
        &points,
        quad.rel_tol,
        abs_floor,
        quad.max_subdivisions,
    )?;

    let tail = energy_tail_difference(&decomposition, omega_p, gamma, quad.omega_max_ev, route);
    Ok(EnergyResult {
        energy_ev: integral.value + tail,
        method: EnergyMethod::Dos,
        system: system.clone(),
        contact_regime: system.gap_nm == 0.0,
    })
}

/// ∫ρ dω over [0, ω_max] plus the analytic tail, for normalization checks.
pub fn integrated_dos(
    decomposition: &SpectralDecomposition,
    sphere: &DielectricModel,
    quad: &QuadratureSpec,
    route: DosRoute,
) -> Result<f64> {
    let (omega_p, ratio) = drude_params(sphere)?;
    quad.validate(omega_p)?;
    let gamma = ratio * omega_p;
    let rho = |w: f64| match route {
        DosRoute::LorentzianSum => rho_lorentzian(decomposition, omega_p, gamma, w),
        DosRoute::GreensTrace => rho_greens(decomposition, omega_p, gamma, w),
    };
    let points = resonance_breakpoints(decomposition, omega_p, gamma, quad.omega_max_ev);
    let integral =
        integrate_with_breakpoints(rho, &points, quad.rel_tol, 1e-20, quad.max_subdivisions)?;

    let omega_max = quad.omega_max_ev;
    let mut tail = 0.0;
    for mode in &decomposition.modes {
        let n_s = mode.eigenvalue;
        let center_sq = omega_p * omega_p * n_s;
        tail += match route {
            // ρ_s → (2ω_p√n_s γ/π)[ω⁻³ + (2ω_s² − γ²)ω⁻⁵]
            DosRoute::LorentzianSum => {
                mode.multiplicity as f64 * 2.0 * omega_p * n_s.sqrt() * gamma / std::f64::consts::PI
                    * (0.5 / (omega_max * omega_max)
                        + (2.0 * center_sq - gamma * gamma) / (4.0 * omega_max.powi(4)))
            }
            // ρ_s → (2γ/π)[ω⁻² + (2ω_s² − γ²)ω⁻⁴]
            DosRoute::GreensTrace => {
                mode.multiplicity as f64 * 2.0 * gamma / std::f64::consts::PI
                    * (1.0 / omega_max
                        + (2.0 * center_sq - gamma * gamma) / (3.0 * omega_max.powi(3)))
            }
        };
    }
    Ok(integral.value + tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{eigen_decompose, interaction_matrix, Geometry};
    use approx::assert_relative_eq;

    fn sphere(omega_p: f64, ratio: f64) -> DielectricModel {
        DielectricModel::drude(omega_p, ratio).unwrap()
    }

    fn split_decomposition() -> SpectralDecomposition {
        let g = Geometry::new(10.0, 10.0).unwrap();
        eigen_decompose(&interaction_matrix(&g, -1.0)).unwrap()
    }

    #[test]
    fn rejects_zero_damping() {
        let d = SpectralDecomposition::reference();
        let s = sphere(3.8, 0.0);
        let grid = [0.0, 1.0, 2.0];
        assert!(matches!(
            dos_lorentzian(&d, &s, &grid),
            Err(Error::DegenerateDamping)
        ));
        assert!(matches!(
            dos_greens(&d, &s, &grid),
            Err(Error::DegenerateDamping)
        ));
    }

    #[test]
    fn rejects_bad_grid() {
        let d = SpectralDecomposition::reference();
        let s = sphere(3.8, 0.01);
        assert!(dos_lorentzian(&d, &s, &[1.0, 1.0]).is_err());
        assert!(dos_lorentzian(&d, &s, &[-0.5, 1.0]).is_err());
        assert!(dos_lorentzian(&d, &s, &[1.0]).is_err());
    }

    #[test]
    fn lorentzian_profile_is_nonnegative_and_peaks_on_resonance() {
        let d = SpectralDecomposition::reference();
        let s = sphere(3.8, 1e-3);
        let center = 3.8 / 3.0_f64.sqrt();
        let grid: Vec<f64> = (0..4001).map(|i| center - 0.02 + 1e-5 * i as f64).collect();
        let profile = dos_lorentzian(&d, &s, &grid).unwrap();
        assert!(profile.rho_per_ev.iter().all(|&r| r >= 0.0));
        let peak_idx = profile
            .rho_per_ev
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert!((profile.omega_ev[peak_idx] - center).abs() <= 1e-5);
    }

    #[test]
    fn greens_profile_matches_lorentzian_peaks() {
        // Grid step γ/5 resolves the peaks at the physical linewidth; the two
        // routes then agree on every peak position to within one step.
        let argmax = |v: &[f64]| {
            v.iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .unwrap()
                .0
        };
        let omega_p = 15.8;
        for ratio in [1e-2, 1e-3] {
            let d = split_decomposition();
            let s = sphere(omega_p, ratio);
            let gamma = ratio * omega_p;
            let step = gamma / 5.0;
            let lo = 0.5 * omega_p;
            let n = ((0.2 * omega_p) / step) as usize;
            let grid: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
            let lor = dos_lorentzian(&d, &s, &grid).unwrap();
            let gre = dos_greens(&d, &s, &grid).unwrap();
            assert!(gre.rho_per_ev.iter().all(|&r| r >= 0.0));
            assert!(
                (grid[argmax(&lor.rho_per_ev)] - grid[argmax(&gre.rho_per_ev)]).abs()
                    <= step + 1e-12,
                "peak mismatch at damping {ratio}"
            );
        }
    }

    #[test]
    fn normalization_approaches_mode_count() {
        // Each narrow Lorentzian integrates to one state.
        let d = split_decomposition();
        let s = sphere(15.8, 1e-4);
        let quad = QuadratureSpec::for_plasma_frequency(15.8);
        let total = integrated_dos(&d, &s, &quad, DosRoute::LorentzianSum).unwrap();
        assert!((total - 3.0).abs() < 1e-3, "total = {total}");

        // Cross-check against a high-resolution trapezoid sum on [0, 3ω_p].
        let n = 1_800_000_usize;
        let omega_hi = 3.0 * 15.8;
        let gamma = 1e-4 * 15.8;
        let h = omega_hi / n as f64;
        let mut trapezoid = 0.0;
        for i in 0..=n {
            let w = i as f64 * h;
            let weight = if i == 0 || i == n { 0.5 } else { 1.0 };
            trapezoid += weight * rho_lorentzian(&d, 15.8, gamma, w);
        }
        trapezoid *= h;
        assert!((trapezoid - 3.0).abs() < 1.5e-3, "trapezoid = {trapezoid}");
        assert!((trapezoid - total).abs() < 1e-3);
    }

    #[test]
    fn greens_normalization_is_exact_per_mode() {
        let d = split_decomposition();
        let s = sphere(15.8, 1e-3);
        let quad = QuadratureSpec::for_plasma_frequency(15.8);
        let total = integrated_dos(&d, &s, &quad, DosRoute::GreensTrace).unwrap();
        assert!((total - 3.0).abs() < 1e-4, "total = {total}");
    }

    #[test]
    fn no_contrast_energy_is_zero() {
        let system = SystemSpec::new(
            25.0,
            5.0,
            sphere(3.8, 1e-3),
            DielectricModel::constant(1.0).unwrap(),
            1.0,
        )
        .unwrap();
        let quad = QuadratureSpec::for_plasma_frequency(3.8);
        let e = dos_interaction_energy(&system, &quad).unwrap();
        assert!(e.energy_ev.abs() < 1e-12);
    }

    #[test]
    fn tabulated_damping_energy_is_finite_negative_and_grid_stable() {
        let system = SystemSpec::new(
            50.0,
            5.0,
            sphere(3.8, 0.105),
            DielectricModel::constant(3.13).unwrap(),
            1.0,
        )
        .unwrap();
        let quad = QuadratureSpec::for_plasma_frequency(3.8);
        let e = dos_interaction_energy(&system, &quad).unwrap();
        assert!(e.energy_ev < 0.0);
        assert!(e.energy_ev.is_finite());

        // Doubled resolution: tighter tolerance, same answer within it.
        let strict = QuadratureSpec {
            rel_tol: quad.rel_tol / 100.0,
            ..quad
        };
        let e2 = dos_interaction_energy(&system, &strict).unwrap();
        assert_relative_eq!(e.energy_ev, e2.energy_ev, max_relative = 1e-6);
    }

    #[test]
    fn small_damping_matches_mode_sum() {
        let system = SystemSpec::new(
            10.0,
            10.0,
            sphere(15.8, 1e-5),
            DielectricModel::PerfectConductor,
            1.0,
        )
        .unwrap();
        let quad = QuadratureSpec::for_plasma_frequency(15.8);
        let dos_e = dos_interaction_energy(&system, &quad).unwrap().energy_ev;
        let mode_e = crate::modes::interaction_energy(&system).unwrap().energy_ev;
        assert_relative_eq!(dos_e, mode_e, max_relative = 1e-3);
    }

    #[test]
    fn rejects_undersized_omega_max() {
        let system = SystemSpec::new(
            10.0,
            10.0,
            sphere(15.8, 1e-3),
            DielectricModel::PerfectConductor,
            1.0,
        )
        .unwrap();
        let quad = QuadratureSpec {
            omega_max_ev: 15.8,
            rel_tol: 1e-8,
            max_subdivisions: 1000,
        };
        assert!(matches!(
            dos_interaction_energy(&system, &quad),
            Err(Error::InvalidQuadratureSpec(_))
        ));
    }

    #[test]
    fn profile_csv_has_expected_header() {
        let d = SpectralDecomposition::reference();
        let s = sphere(3.8, 1e-2);
        let grid: Vec<f64> = (0..50).map(|i| 0.1 + 0.1 * i as f64).collect();
        let profile = dos_lorentzian(&d, &s, &grid).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dos.csv");
        profile.write_csv(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("omega_ev,rho_per_ev\n"));
        assert_eq!(text.lines().count(), 51);
    }
}
