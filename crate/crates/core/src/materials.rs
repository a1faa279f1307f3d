//! Dielectric-function models, the spectral variable u(ω), and the substrate
//! contrast factor, plus the preset material table.
//!
//! Frequencies and energies are carried in eV throughout (ħ = 1 in these
//! units). The Drude damping rate is stored as the dimensionless ratio
//! (τω_p)⁻¹, so the rate in eV is `damping_ratio * omega_p_ev`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Local dielectric response of a sphere, substrate, or ambient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DielectricModel {
    /// Free-electron metal: ε(ω) = 1 − ω_p² / [ω(ω + i/τ)].
    Drude {
        omega_p_ev: f64,
        /// Dimensionless (τω_p)⁻¹; the damping rate in eV is `damping_ratio * omega_p_ev`.
        damping_ratio: f64,
    },
    /// Real, frequency-independent permittivity.
    Constant { epsilon: f64 },
    /// ε → ∞ limit; has no finite permittivity value.
    PerfectConductor,
}

impl DielectricModel {
    pub fn drude(omega_p_ev: f64, damping_ratio: f64) -> Result<Self> {
        if !(omega_p_ev > 0.0) {
            return Err(Error::InvalidModel(format!(
                "Drude plasma frequency must be > 0, got {omega_p_ev}"
            )));
        }
        if !(damping_ratio >= 0.0) {
            return Err(Error::InvalidModel(format!(
                "Drude damping ratio must be >= 0, got {damping_ratio}"
            )));
        }
        Ok(DielectricModel::Drude {
            omega_p_ev,
            damping_ratio,
        })
    }

    pub fn constant(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::InvalidModel(format!(
                "constant permittivity must be > 0, got {epsilon}"
            )));
        }
        Ok(DielectricModel::Constant { epsilon })
    }

    /// Damping rate 1/τ in eV, zero for non-Drude models.
    pub fn damping_rate_ev(&self) -> f64 {
        match self {
            DielectricModel::Drude {
                omega_p_ev,
                damping_ratio,
            } => damping_ratio * omega_p_ev,
            _ => 0.0,
        }
    }

    pub fn label(&self) -> String {
        match self {
            DielectricModel::Drude {
                omega_p_ev,
                damping_ratio,
            } => format!("drude(omega_p={omega_p_ev} eV, damping={damping_ratio})"),
            DielectricModel::Constant { epsilon } => format!("constant(epsilon={epsilon})"),
            DielectricModel::PerfectConductor => "perfect_conductor".to_string(),
        }
    }
}

/// Dimensionless spectral variable u(ω) = [1 − ε_sph(ω)/ε_amb]⁻¹.
///
/// For an undamped Drude sphere in vacuum this reduces to (ω/ω_p)², real
/// and monotonically increasing in ω².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralVariable {
    pub u: Complex64,
}

/// Complex permittivity of a model at frequency `omega_ev`.
///
/// A perfect conductor is rejected: callers must branch on the variant.
pub fn epsilon_at(model: &DielectricModel, omega_ev: f64) -> Result<Complex64> {
    match *model {
        DielectricModel::Constant { epsilon } => Ok(Complex64::new(epsilon, 0.0)),
        DielectricModel::Drude {
            omega_p_ev,
            damping_ratio,
        } => {
            if !(omega_ev > 0.0) {
                return Err(Error::NonPositiveFrequency { omega_ev });
            }
            let gamma = damping_ratio * omega_p_ev;
            let denom = Complex64::new(omega_ev, 0.0) * Complex64::new(omega_ev, gamma);
            Ok(Complex64::new(1.0, 0.0) - omega_p_ev * omega_p_ev / denom)
        }
        DielectricModel::PerfectConductor => Err(Error::PerfectConductorEpsilon),
    }
}

/// Spectral variable u(ω) = [1 − ε_sph(ω)/ε_amb]⁻¹ of a sphere in an ambient.
pub fn spectral_variable(
    sphere: &DielectricModel,
    ambient_epsilon: f64,
    omega_ev: f64,
) -> Result<SpectralVariable> {
    if !(ambient_epsilon > 0.0) {
        return Err(Error::InvalidModel(format!(
            "ambient permittivity must be > 0, got {ambient_epsilon}"
        )));
    }
    if matches!(sphere, DielectricModel::PerfectConductor) {
        return Err(Error::UnsupportedSphereModel {
            model: sphere.label(),
        });
    }
    let eps = epsilon_at(sphere, omega_ev)?;
    let denom = Complex64::new(1.0, 0.0) - eps / ambient_epsilon;
    if denom.norm() == 0.0 {
        return Err(Error::SingularSpectralVariable);
    }
    Ok(SpectralVariable { u: denom.inv() })
}

/// Substrate contrast factor f_c = (ε_amb − ε_sub)/(ε_amb + ε_sub).
///
/// Restricted to real constant substrates and the perfect-conductor limit,
/// which returns exactly −1.
pub fn contrast_factor(substrate: &DielectricModel, ambient_epsilon: f64) -> Result<f64> {
    if !(ambient_epsilon > 0.0) {
        return Err(Error::InvalidModel(format!(
            "ambient permittivity must be > 0, got {ambient_epsilon}"
        )));
    }
    match *substrate {
        DielectricModel::Constant { epsilon } => {
            Ok((ambient_epsilon - epsilon) / (ambient_epsilon + epsilon))
        }
        DielectricModel::PerfectConductor => Ok(-1.0),
        DielectricModel::Drude { .. } => Err(Error::UnsupportedSubstrate),
    }
}

/// Named material presets plus user extensions.
///
/// Lookup is case-insensitive; the presets themselves are immutable and user
/// materials may not shadow them.
#[derive(Debug, Clone)]
pub struct MaterialLibrary {
    // key: lowercased name, value: (canonical name, model)
    entries: BTreeMap<String, (String, DielectricModel)>,
    preset_keys: Vec<String>,
}

impl MaterialLibrary {
    /// Library with the standard presets: K, Au, Ag, Al spheres and
    /// Al2O3, TiO2, Inf substrates.
    pub fn standard() -> Self {
        let presets: [(&str, DielectricModel); 7] = [
            (
                "K",
                DielectricModel::Drude {
                    omega_p_ev: 3.80,
                    damping_ratio: 0.105,
                },
            ),
            (
                "Au",
                DielectricModel::Drude {
                    omega_p_ev: 8.55,
                    damping_ratio: 0.0126,
                },
            ),
            (
                "Ag",
                DielectricModel::Drude {
                    omega_p_ev: 9.60,
                    damping_ratio: 0.00188,
                },
            ),
            (
                "Al",
                DielectricModel::Drude {
                    omega_p_ev: 15.80,
                    damping_ratio: 0.04,
                },
            ),
            ("Al2O3", DielectricModel::Constant { epsilon: 3.13 }),
            ("TiO2", DielectricModel::Constant { epsilon: 7.81 }),
            ("Inf", DielectricModel::PerfectConductor),
        ];
        let mut entries = BTreeMap::new();
        let mut preset_keys = Vec::new();
        for (name, model) in presets {
            let key = name.to_ascii_lowercase();
            entries.insert(key.clone(), (name.to_string(), model));
            preset_keys.push(key);
        }
        MaterialLibrary {
            entries,
            preset_keys,
        }
    }

    /// Register a user material; preset names cannot be shadowed.
    pub fn add_user(&mut self, name: &str, model: DielectricModel) -> Result<()> {
        let key = name.to_ascii_lowercase();
        if self.preset_keys.contains(&key) {
            return Err(Error::PresetShadowed(name.to_string()));
        }
        self.entries.insert(key, (name.to_string(), model));
        Ok(())
    }

    /// Case-insensitive lookup returning the canonical name and model.
    pub fn resolve(&self, name: &str) -> Result<(&str, &DielectricModel)> {
        let key = name.to_ascii_lowercase();
        self.entries
            .get(&key)
            .map(|(canonical, model)| (canonical.as_str(), model))
            .ok_or_else(|| Error::UnknownMaterial {
                name: name.to_string(),
                available: self.available_names().join(", "),
            })
    }

    pub fn available_names(&self) -> Vec<String> {
        self.entries
            .values()
            .map(|(canonical, _)| canonical.clone())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn constant_epsilon_is_real() {
        let m = DielectricModel::constant(3.13).unwrap();
        let eps = epsilon_at(&m, 1.0).unwrap();
        assert_eq!(eps, Complex64::new(3.13, 0.0));
    }

    #[test]
    fn undamped_drude_vanishes_at_plasma_frequency() {
        let m = DielectricModel::drude(3.80, 0.0).unwrap();
        let eps = epsilon_at(&m, 3.80).unwrap();
        assert_eq!(eps.re, 0.0);
        assert_eq!(eps.im, 0.0);
    }

    #[test]
    fn damped_drude_matches_rationalized_form() {
        // Independent oracle: Re ε = 1 − ω_p²/(ω²+γ²), Im ε = ω_p²γ/[ω(ω²+γ²)].
        let (omega_p, ratio, omega) = (8.55, 0.0126, 4.0);
        let gamma = ratio * omega_p;
        let re = 1.0 - omega_p * omega_p / (omega * omega + gamma * gamma);
        let im = omega_p * omega_p * gamma / (omega * (omega * omega + gamma * gamma));
        let eps = epsilon_at(&DielectricModel::drude(omega_p, ratio).unwrap(), omega).unwrap();
        assert_relative_eq!(eps.re, re, max_relative = 1e-14);
        assert_relative_eq!(eps.im, im, max_relative = 1e-14);
    }

    #[test]
    fn drude_rejects_nonpositive_frequency() {
        let m = DielectricModel::drude(3.80, 0.105).unwrap();
        assert!(matches!(
            epsilon_at(&m, 0.0),
            Err(Error::NonPositiveFrequency { .. })
        ));
        assert!(matches!(
            epsilon_at(&m, -1.0),
            Err(Error::NonPositiveFrequency { .. })
        ));
    }

    #[test]
    fn perfect_conductor_has_no_epsilon() {
        assert!(matches!(
            epsilon_at(&DielectricModel::PerfectConductor, 1.0),
            Err(Error::PerfectConductorEpsilon)
        ));
    }

    #[test]
    fn spectral_variable_at_plasma_frequency_is_one() {
        let m = DielectricModel::drude(3.80, 0.0).unwrap();
        let v = spectral_variable(&m, 1.0, 3.80).unwrap();
        assert_relative_eq!(v.u.re, 1.0, max_relative = 1e-14);
        assert_eq!(v.u.im, 0.0);
    }

    #[test]
    fn spectral_variable_undamped_is_frequency_ratio_squared() {
        let m = DielectricModel::drude(3.80, 0.0).unwrap();
        let omega = 3.80 / 3.0_f64.sqrt();
        let v = spectral_variable(&m, 1.0, omega).unwrap();
        assert_relative_eq!(v.u.re, 1.0 / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn spectral_variable_damped_matches_drude_closed_form() {
        // u = ω(ω + i/τ)/ω_p² for a Drude sphere in vacuum.
        let (omega_p, ratio, omega) = (15.8, 0.04, 5.0);
        let gamma = ratio * omega_p;
        let expected =
            Complex64::new(omega, 0.0) * Complex64::new(omega, gamma) / (omega_p * omega_p);
        let v = spectral_variable(&DielectricModel::drude(omega_p, ratio).unwrap(), 1.0, omega)
            .unwrap();
        assert_relative_eq!(v.u.re, expected.re, max_relative = 1e-12);
        assert_relative_eq!(v.u.im, expected.im, max_relative = 1e-12);
    }

    #[test]
    fn spectral_variable_singular_when_sphere_matches_ambient() {
        let m = DielectricModel::constant(2.0).unwrap();
        assert!(matches!(
            spectral_variable(&m, 2.0, 1.0),
            Err(Error::SingularSpectralVariable)
        ));
    }

    #[test]
    fn contrast_factor_paper_values() {
        let amb = 1.0;
        let al2o3 = DielectricModel::constant(3.13).unwrap();
        let tio2 = DielectricModel::constant(7.81).unwrap();
        assert!((contrast_factor(&al2o3, amb).unwrap() - (-0.516)).abs() < 5e-4);
        assert!((contrast_factor(&tio2, amb).unwrap() - (-0.773)).abs() < 5e-4);
        assert_eq!(
            contrast_factor(&DielectricModel::PerfectConductor, amb).unwrap(),
            -1.0
        );
    }

    #[test]
    fn contrast_factor_vanishes_when_substrate_matches_ambient() {
        let m = DielectricModel::constant(1.0).unwrap();
        assert_eq!(contrast_factor(&m, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn contrast_factor_rejects_dispersive_substrate() {
        let m = DielectricModel::drude(9.6, 0.00188).unwrap();
        assert!(matches!(
            contrast_factor(&m, 1.0),
            Err(Error::UnsupportedSubstrate)
        ));
    }

    #[test]
    fn library_resolves_case_insensitively() {
        let lib = MaterialLibrary::standard();
        let (name, model) = lib.resolve("al2o3").unwrap();
        assert_eq!(name, "Al2O3");
        assert_eq!(*model, DielectricModel::Constant { epsilon: 3.13 });
        let (name, _) = lib.resolve("INF").unwrap();
        assert_eq!(name, "Inf");
    }

    #[test]
    fn library_rejects_unknown_and_shadowing() {
        let mut lib = MaterialLibrary::standard();
        let err = lib.resolve("unobtanium").unwrap_err();
        assert!(err.to_string().contains("Al2O3"));
        assert!(matches!(
            lib.add_user("au", DielectricModel::constant(2.0).unwrap()),
            Err(Error::PresetShadowed(_))
        ));
        lib.add_user("Glass", DielectricModel::constant(2.25).unwrap())
            .unwrap();
        assert!(lib.resolve("glass").is_ok());
    }

    proptest! {
        #[test]
        fn contrast_factor_decreasing_and_bounded(
            eps1 in 1.0001f64..500.0,
            delta in 0.001f64..100.0,
        ) {
            let amb = 1.0;
            let f1 = contrast_factor(&DielectricModel::constant(eps1).unwrap(), amb).unwrap();
            let f2 = contrast_factor(&DielectricModel::constant(eps1 + delta).unwrap(), amb).unwrap();
            prop_assert!(f2 < f1);
            prop_assert!(f1 > -1.0 && f1 < 0.0);
        }

        #[test]
        fn spectral_variable_round_trip(n in 1e-6f64..1.0, omega_p in 0.5f64..20.0) {
            // ω solving u(ω) = n under an undamped Drude sphere in vacuum.
            let omega = omega_p * n.sqrt();
            let m = DielectricModel::drude(omega_p, 0.0).unwrap();
            let v = spectral_variable(&m, 1.0, omega).unwrap();
            prop_assert!(v.u.im == 0.0);
            prop_assert!((v.u.re - n).abs() <= 1e-12 * n);
        }

        #[test]
        fn spectral_variable_monotone_in_omega(
            omega_p in 0.5f64..20.0,
            w1 in 0.01f64..0.99,
            w2 in 0.01f64..0.99,
        ) {
            prop_assume!(w1 < w2);
            let m = DielectricModel::drude(omega_p, 0.0).unwrap();
            let u1 = spectral_variable(&m, 1.0, w1 * omega_p).unwrap().u.re;
            let u2 = spectral_variable(&m, 1.0, w2 * omega_p).unwrap().u.re;
            prop_assert!(u1 >= 0.0);
            prop_assert!(u1 < u2);
        }
    }
}
