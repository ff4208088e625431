use serde::{Deserialize, Serialize};

use crate::linalg::DEFAULT_RANK_TOL;

/// Float-backend thresholds. Exact backends ignore all of them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative pivot threshold for rank decisions.
    pub rank: f64,
    /// Angular distance under which two projective points are equal.
    pub angle: f64,
    /// Scale-normalized residual under which an evaluator counts as zero.
    pub vanish: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank: DEFAULT_RANK_TOL,
            angle: 1e-6,
            vanish: 1e-7,
        }
    }
}
