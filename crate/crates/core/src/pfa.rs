//! Proximity-force-approximation comparator.
//!
//! Two standard sphere-plate estimates are offered: the ideal retarded form
//! F = −π³ħcR/(360 z³) and the non-retarded Hamaker form F = −A_H R/(6z²).
//! Both assume z ≪ R; comparing them against the spectral result quantifies
//! how far outside that regime a small sphere sits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modes::{force, DerivativeMethod, EV_PER_NM_TO_PN};
use crate::system::SystemSpec;

/// ħc in eV·nm.
pub const HBAR_C_EV_NM: f64 = 197.327;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PfaVariant {
    IdealRetarded,
    HamakerNonRetarded,
}

impl PfaVariant {
    pub fn as_str(&self) -> &'static str {
        match self {
            PfaVariant::IdealRetarded => "ideal_retarded",
            PfaVariant::HamakerNonRetarded => "hamaker_nonretarded",
        }
    }
}

/// Proximity-theorem force with the inputs it was computed from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PfaResult {
    pub force_ev_per_nm: f64,
    pub force_pn: f64,
    pub variant: PfaVariant,
    pub radius_nm: f64,
    pub gap_nm: f64,
    pub hamaker_ev: Option<f64>,
}

/// Sphere-plate proximity-theorem force.
pub fn pfa_force(
    radius_nm: f64,
    gap_nm: f64,
    variant: PfaVariant,
    hamaker_ev: Option<f64>,
) -> Result<PfaResult> {
    if !(radius_nm > 0.0) {
        return Err(Error::InvalidGeometry(format!(
            "radius must be > 0, got {radius_nm}"
        )));
    }
    if !(gap_nm > 0.0) {
        return Err(Error::PfaAtContact);
    }
    let force_ev_per_nm = match variant {
        PfaVariant::IdealRetarded => {
            let pi = std::f64::consts::PI;
            -pi.powi(3) * HBAR_C_EV_NM * radius_nm / (360.0 * gap_nm.powi(3))
        }
        PfaVariant::HamakerNonRetarded => {
            let a_h = hamaker_ev.ok_or(Error::MissingHamakerConstant)?;
            if !(a_h > 0.0) {
                return Err(Error::MissingHamakerConstant);
            }
            -a_h * radius_nm / (6.0 * gap_nm * gap_nm)
        }
    };
    Ok(PfaResult {
        force_ev_per_nm,
        force_pn: force_ev_per_nm * EV_PER_NM_TO_PN,
        variant,
        radius_nm,
        gap_nm,
        hamaker_ev: match variant {
            PfaVariant::HamakerNonRetarded => hamaker_ev,
            PfaVariant::IdealRetarded => None,
        },
    })
}

/// Side-by-side report of the proximity-theorem and spectral forces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PfaComparison {
    pub pfa: PfaResult,
    pub spectral_force_ev_per_nm: f64,
    pub spectral_force_pn: f64,
    /// |F_pfa| / |F_spectral|; absent when the spectral force vanishes.
    pub ratio_abs: Option<f64>,
    /// Set when the ratio falls in [1e2, 1e4].
    pub large_discrepancy: bool,
    /// Set when the spectral force is zero and the ratio is undefined.
    pub not_applicable: bool,
}

/// Compare the proximity-theorem force against the spectral mode-sum force
/// for the same sphere and gap.
pub fn compare_with_spectral(
    system: &SystemSpec,
    variant: PfaVariant,
    hamaker_ev: Option<f64>,
) -> Result<PfaComparison> {
    let pfa = pfa_force(system.radius_nm, system.gap_nm, variant, hamaker_ev)?;
    let spectral = force(system, DerivativeMethod::Analytic)?;
    let ratio_abs = if spectral.force_ev_per_nm == 0.0 {
        None
    } else {
        Some(pfa.force_ev_per_nm.abs() / spectral.force_ev_per_nm.abs())
    };
    Ok(PfaComparison {
        spectral_force_ev_per_nm: spectral.force_ev_per_nm,
        spectral_force_pn: spectral.force_pn,
        large_discrepancy: ratio_abs.is_some_and(|r| (1e2..=1e4).contains(&r)),
        not_applicable: ratio_abs.is_none(),
        ratio_abs,
        pfa,
    })
}
