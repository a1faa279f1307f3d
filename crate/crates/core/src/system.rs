//! A fully specified sphere-over-substrate configuration.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::materials::{contrast_factor, DielectricModel};
use crate::spectral::{eigen_decompose, interaction_matrix, Geometry, SpectralDecomposition};

/// Sphere radius, gap, sphere and substrate materials, and ambient permittivity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub radius_nm: f64,
    pub gap_nm: f64,
    pub sphere: DielectricModel,
    pub substrate: DielectricModel,
    pub ambient_epsilon: f64,
}

impl SystemSpec {
    pub fn new(
        radius_nm: f64,
        gap_nm: f64,
        sphere: DielectricModel,
        substrate: DielectricModel,
        ambient_epsilon: f64,
    ) -> Result<Self> {
        Geometry::new(radius_nm, gap_nm)?;
        // Validate the substrate supports a real contrast factor up front.
        contrast_factor(&substrate, ambient_epsilon)?;
        Ok(SystemSpec {
            radius_nm,
            gap_nm,
            sphere,
            substrate,
            ambient_epsilon,
        })
    }

    pub fn geometry(&self) -> Geometry {
        Geometry {
            radius_nm: self.radius_nm,
            gap_nm: self.gap_nm,
        }
    }

    pub fn contrast_factor(&self) -> Result<f64> {
        contrast_factor(&self.substrate, self.ambient_epsilon)
    }

    /// Eigendecomposition of the interaction matrix for this configuration.
    pub fn decomposition(&self) -> Result<SpectralDecomposition> {
        let fc = self.contrast_factor()?;
        eigen_decompose(&interaction_matrix(&self.geometry(), fc))
    }

    /// Same system displaced to a different gap.
    pub fn with_gap(&self, gap_nm: f64) -> Result<Self> {
        SystemSpec::new(
            self.radius_nm,
            gap_nm,
            self.sphere,
            self.substrate,
            self.ambient_epsilon,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn rejects_dispersive_substrate() {
        let sphere = DielectricModel::drude(3.8, 0.105).unwrap();
        let substrate = DielectricModel::drude(9.6, 0.00188).unwrap();
        assert!(matches!(
            SystemSpec::new(10.0, 1.0, sphere, substrate, 1.0),
            Err(Error::UnsupportedSubstrate)
        ));
    }

    #[test]
    fn rejects_bad_geometry() {
        let sphere = DielectricModel::drude(3.8, 0.105).unwrap();
        let substrate = DielectricModel::PerfectConductor;
        assert!(SystemSpec::new(0.0, 1.0, sphere, substrate, 1.0).is_err());
        assert!(SystemSpec::new(10.0, -1.0, sphere, substrate, 1.0).is_err());
    }
}
