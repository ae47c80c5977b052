use serde::{Deserialize, Serialize};

use crate::error::{KreinError, Result};

/// Numerical tolerances shared by classification, projection and verification.
///
/// `cluster_tol` and `rank_tol` are relative to the spectral norm of the
/// operator under study, `definiteness_tol` to the spectral norm of the Gram
/// matrix. `normality_tol` bounds the normalized commutator
/// `‖NN⁺ - N⁺N‖_F / max(1, ‖N‖_F²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceConfig {
    pub cluster_tol: f64,
    pub rank_tol: f64,
    pub definiteness_tol: f64,
    pub normality_tol: f64,
    pub contour_nodes: usize,
    /// One step of residual correction after each Sylvester solve.
    pub iterative_refinement: bool,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            cluster_tol: 1e-5,
            rank_tol: 1e-8,
            definiteness_tol: 1e-8,
            normality_tol: 1e-8,
            contour_nodes: 128,
            iterative_refinement: false,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("cluster_tol", self.cluster_tol),
            ("rank_tol", self.rank_tol),
            ("definiteness_tol", self.definiteness_tol),
            ("normality_tol", self.normality_tol),
        ];
        for (name, v) in named {
            if !(v.is_finite() && v > 0.0) {
                return Err(KreinError::InvalidTolerance(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if self.contour_nodes < 16 {
            return Err(KreinError::InvalidTolerance(format!(
                "contour_nodes must be at least 16, got {}",
                self.contour_nodes
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        ToleranceConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_too_few_nodes() {
        let cfg = ToleranceConfig {
            contour_nodes: 8,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn partial_overrides_keep_defaults() {
        let cfg: ToleranceConfig = serde_json::from_str(r#"{"rank_tol": 1e-6}"#).unwrap();
        assert_eq!(cfg.rank_tol, 1e-6);
        assert_eq!(cfg.contour_nodes, 128);
    }
}
