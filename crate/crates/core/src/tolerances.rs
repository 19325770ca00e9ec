//! Numeric tolerances shared by the analysis routines.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// `|Q|` below this counts as on the variety.
    pub on_variety: f64,
    /// `||z| − 1|` below this counts as on the unit circle.
    pub unit_modulus: f64,
    /// Curvature magnitude below this makes a direction degenerate.
    pub degenerate_curvature: f64,
    /// Gradient norm below this flags a singular point.
    pub singular_gradient: f64,
    /// Unitarity tolerance for floating coins.
    pub float_unitarity: f64,
    /// Angular samples per torus circle.
    pub grid: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            on_variety: 1e-10,
            unit_modulus: 1e-8,
            degenerate_curvature: 1e-9,
            singular_gradient: 1e-7,
            float_unitarity: 1e-12,
            grid: 2048,
        }
    }
}

impl Tolerances {
    /// Rejects non-positive or non-finite tolerances.
    pub fn check(&self) -> crate::Result<()> {
        let vals = [
            ("on_variety", self.on_variety),
            ("unit_modulus", self.unit_modulus),
            ("degenerate_curvature", self.degenerate_curvature),
            ("singular_gradient", self.singular_gradient),
            ("float_unitarity", self.float_unitarity),
        ];
        for (name, v) in vals {
            if !(v.is_finite() && v > 0.0) {
                return Err(crate::QrwError::Config(format!("tolerance {name} = {v} must be positive")));
            }
        }
        if self.grid < 8 {
            return Err(crate::QrwError::Config(format!("grid = {} is below 8", self.grid)));
        }
        Ok(())
    }
}
