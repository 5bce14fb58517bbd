//! Continuous eigenvalue paths along matrix paths.

pub mod assign;
pub mod loops;
pub mod path;
pub mod tracker;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use assign::{hungarian, match_eigs, Matching};
pub use loops::{
    deformation_check, monodromy, scaling_pairing_invariance_check, segment_pairing,
    DeformationReport, GridFn, LoopReport, PairingPermutation, ScalingReport, SegmentPairing,
    Transition,
};
pub use path::{MatrixPath, PathFn, PathKind};
pub use tracker::{track, CollisionEvent, CollisionKind, TrackedBundle};

/// Step control for [`track`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrackerConfig {
    /// Uniform steps per path segment before any refinement.
    pub initial_steps: usize,
    /// Smallest parameter step bisection may produce.
    pub min_step: f64,
    /// A matched eigenvalue may move at most this fraction of the current minimum gap.
    pub gap_safety: f64,
    /// Relative gap below which two eigenpaths count as collided.
    pub collision_tol: f64,
    /// Bisection depth limit per initial step.
    pub max_refinements: usize,
    /// A match is ambiguous when the runner-up assignment is within this
    /// fraction of the optimal cost.
    pub ambiguity_ratio: f64,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            initial_steps: 64,
            min_step: 1e-10,
            gap_safety: 0.5,
            collision_tol: 1e-8,
            max_refinements: 40,
            ambiguity_ratio: 0.1,
        }
    }
}

impl TrackerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gap_safety > 0.0 && self.gap_safety < 1.0) {
            return Err(Error::argument(format!(
                "gap_safety must lie in (0, 1), got {}",
                self.gap_safety
            )));
        }
        if !(self.min_step > 0.0) {
            return Err(Error::argument(format!("min_step must be positive, got {}", self.min_step)));
        }
        if self.initial_steps == 0 {
            return Err(Error::argument("initial_steps must be at least 1"));
        }
        if !(self.collision_tol >= 0.0) || !(self.ambiguity_ratio >= 0.0) {
            return Err(Error::argument("collision_tol and ambiguity_ratio must be non-negative"));
        }
        Ok(())
    }
}
