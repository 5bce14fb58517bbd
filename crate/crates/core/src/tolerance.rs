use serde::{Deserialize, Serialize};

/// Numerical thresholds shared by the spectral routines.
///
/// Every threshold is relative; see the individual fields for the scale each
/// one is measured against.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Bound on `|p(λ)| / max(1, ‖A‖_F)^n` for a returned eigenvalue.
    pub tol_eig: f64,
    /// Single-linkage threshold for grouping eigenvalues, times `max(1, ρ(A))`.
    pub cluster_tol: f64,
    /// Zero threshold for discriminants, times `(1 + max|coef|)^(2n-2)`.
    pub disc_zero_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            tol_eig: 1e-9,
            cluster_tol: 1e-7,
            disc_zero_tol: 1e-8,
        }
    }
}
