//! Proper-mode frequencies, the mode-sum interaction energy, and the force.
//!
//! The mode sum is evaluated through the per-mode frequency shifts
//! ω_s − ω′ = ω_p (n_s − n₀)/(√n_s + √n₀) rather than by subtracting two
//! near-equal zero-point sums; this keeps the interaction energy accurate to
//! relative rounding even at separations where it is ~1e-9 of a single mode's
//! energy. Dissipation is excluded here: with finite damping the spectral
//! variable is complex and real mode frequencies are ill-defined, so damping
//! enters only through the density-of-states route.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::materials::DielectricModel;
use crate::spectral::{ModeAxis, SpectralDecomposition, N0};
use crate::system::SystemSpec;

/// 1 eV/nm = 1.602176634e-19 J / 1e-9 m = 160.2176634 pN.
pub const EV_PER_NM_TO_PN: f64 = 160.2176634;

/// Route used to produce an interaction energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyMethod {
    ModeSum,
    Dos,
}

impl EnergyMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            EnergyMethod::ModeSum => "mode_sum",
            EnergyMethod::Dos => "dos",
        }
    }
}

/// Derivative path used for the force.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeMethod {
    Analytic,
    CentralDifference,
}

/// One proper mode: frequency in eV with its multiplicity and axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub omega_ev: f64,
    pub multiplicity: usize,
    pub axis: ModeAxis,
}

/// Proper-mode frequencies at finite gap plus the z → ∞ reference mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSpectrum {
    pub modes: Vec<Mode>,
    /// ω′ = ω_p √n₀, the triply degenerate mode of the isolated sphere.
    pub reference_omega_ev: f64,
}

impl ModeSpectrum {
    pub fn omega_parallel_ev(&self) -> f64 {
        self.modes
            .iter()
            .find(|m| matches!(m.axis, ModeAxis::Parallel | ModeAxis::Isotropic))
            .map(|m| m.omega_ev)
            .unwrap_or(self.reference_omega_ev)
    }

    pub fn omega_perpendicular_ev(&self) -> f64 {
        self.modes
            .iter()
            .find(|m| matches!(m.axis, ModeAxis::Perpendicular | ModeAxis::Isotropic))
            .map(|m| m.omega_ev)
            .unwrap_or(self.reference_omega_ev)
    }
}

/// Interaction energy in eV with the configuration it was computed for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyResult {
    pub energy_ev: f64,
    pub method: EnergyMethod,
    pub system: SystemSpec,
    /// Set at z = 0, where the dipole model is used outside its comfort zone.
    pub contact_regime: bool,
}

/// Signed force; negative values point toward the substrate (attraction).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForceResult {
    pub force_ev_per_nm: f64,
    pub force_pn: f64,
    pub method: DerivativeMethod,
    pub system: SystemSpec,
    pub contact_regime: bool,
}

fn drude_plasma_frequency(sphere: &DielectricModel) -> Result<f64> {
    match sphere {
        DielectricModel::Drude { omega_p_ev, .. } => Ok(*omega_p_ev),
        other => Err(Error::UnsupportedSphereModel {
            model: other.label(),
        }),
    }
}

/// Proper-mode frequencies by inverting u(ω_s) = n_s for an undamped Drude
/// sphere in vacuum-like ambient: ω_s = ω_p √n_s.
pub fn mode_frequencies(
    decomposition: &SpectralDecomposition,
    sphere: &DielectricModel,
) -> Result<ModeSpectrum> {
    let omega_p = drude_plasma_frequency(sphere)?;
    let mut modes = Vec::with_capacity(decomposition.modes.len());
    for m in &decomposition.modes {
        if !(m.eigenvalue > 0.0) {
            return Err(Error::NonPositiveEigenvalue {
                eigenvalue: m.eigenvalue,
            });
        }
        modes.push(Mode {
            omega_ev: omega_p * m.eigenvalue.sqrt(),
            multiplicity: m.multiplicity,
            axis: m.axis,
        });
    }
    Ok(ModeSpectrum {
        modes,
        reference_omega_ev: omega_p * N0.sqrt(),
    })
}

/// Zero-point mode-sum interaction energy, Σ_s ħω_s/2 − Σ_s ħω′_s/2, in eV.
pub fn interaction_energy(system: &SystemSpec) -> Result<EnergyResult> {
    let omega_p = drude_plasma_frequency(&system.sphere)?;
    let decomposition = system.decomposition()?;
    let sqrt_n0 = N0.sqrt();
    let mut energy = 0.0;
    for m in &decomposition.modes {
        if !(m.eigenvalue > 0.0) {
            return Err(Error::NonPositiveEigenvalue {
                eigenvalue: m.eigenvalue,
            });
        }
        // (√n_s − √n₀) via the shift to avoid cancellation of near-equal roots.
        let delta = m.shift / (m.eigenvalue.sqrt() + sqrt_n0);
        energy += 0.5 * omega_p * m.multiplicity as f64 * delta;
    }
    Ok(EnergyResult {
        energy_ev: energy,
        method: EnergyMethod::ModeSum,
        system: system.clone(),
        contact_regime: system.gap_nm == 0.0,
    })
}

/// d𝓔/dz of the mode-sum energy in eV/nm, from the closed-form derivative.
fn energy_gradient(system: &SystemSpec) -> Result<f64> {
    let omega_p = drude_plasma_frequency(&system.sphere)?;
    let fc = system.contrast_factor()?;
    let geometry = system.geometry();
    let x3 = geometry.radius_ratio_cubed();
    let dx3_dz = -3.0 * x3 / (system.gap_nm + system.radius_nm);
    let bracket = (1.0 + fc * x3).powf(-0.5) + (1.0 + 2.0 * fc * x3).powf(-0.5);
    Ok(0.5 * omega_p * N0.sqrt() * fc * dx3_dz * bracket)
}

/// Casimir force F = −d𝓔/dz, via the analytic derivative or central
/// differences of the mode-sum energy.
///
/// The finite-difference step is relative to (z+R), not z, so it does not
/// collapse at small gaps; it is clamped to keep z − h ≥ 0.
pub fn force(system: &SystemSpec, method: DerivativeMethod) -> Result<ForceResult> {
    let force_ev_per_nm = match method {
        DerivativeMethod::Analytic => -energy_gradient(system)?,
        DerivativeMethod::CentralDifference => {
            if system.gap_nm <= 0.0 {
                return Err(Error::DerivativeAtContact);
            }
            let h = (1e-5 * (system.gap_nm + system.radius_nm))
                .max(1e-8)
                .min(system.gap_nm);
            let above = interaction_energy(&system.with_gap(system.gap_nm + h)?)?;
            let below = interaction_energy(&system.with_gap(system.gap_nm - h)?)?;
            -(above.energy_ev - below.energy_ev) / (2.0 * h)
        }
    };
    Ok(ForceResult {
        force_ev_per_nm,
        force_pn: force_ev_per_nm * EV_PER_NM_TO_PN,
        method,
        system: system.clone(),
        contact_regime: system.gap_nm == 0.0,
    })
}
