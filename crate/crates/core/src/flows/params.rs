use crate::error::{Error, Result};
use crate::fields::Grid;
use serde::{Deserialize, Serialize};

/// Largest `dt * rho` kept inside the RK4 stability region for spectra on
/// the real axis and on the rays at 45 degrees from it.
pub const RK4_REACH: f64 = 2.4;

/// Which evolution equation is integrated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowKind {
    /// `u_t = tau(u)`.
    Heat,
    /// `u_t = alpha tau - beta J tau`.
    LandauLifshitz,
    /// Damped wave approximation with parameter `delta`.
    Wave,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowParams {
    pub alpha: f64,
    pub beta: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Safety factor applied to the stability bound, in `(0, 1]`.
    #[serde(default = "default_cfl")]
    pub cfl: f64,
}

fn default_delta() -> f64 {
    1.0
}

fn default_cfl() -> f64 {
    0.9
}

impl Default for FlowParams {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 0.0,
            delta: 1.0,
            cfl: default_cfl(),
        }
    }
}

impl FlowParams {
    pub fn heat() -> Self {
        Self::default()
    }

    pub fn ll(alpha: f64, beta: f64) -> Self {
        Self {
            alpha,
            beta,
            ..Self::default()
        }
    }

    /// `|z| = sqrt(alpha^2 + beta^2)`.
    pub fn z_abs(&self) -> f64 {
        self.alpha.hypot(self.beta)
    }

    pub fn validate(&self, kind: FlowKind) -> Result<()> {
        let bad = |field: &str, reason: &str| {
            Err(Error::InvalidParam {
                field: field.into(),
                reason: reason.into(),
            })
        };
        if !self.alpha.is_finite() || self.alpha < 0.0 {
            return bad("alpha", "must be finite and >= 0");
        }
        if !self.beta.is_finite() {
            return bad("beta", "must be finite");
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return bad("cfl", "must lie in (0, 1]");
        }
        match kind {
            FlowKind::Heat => {}
            FlowKind::LandauLifshitz => {
                if self.z_abs() == 0.0 {
                    return bad("alpha", "alpha and beta cannot both vanish");
                }
            }
            FlowKind::Wave => {
                if !(self.alpha > 0.0) {
                    return bad("alpha", "wave scheme needs alpha > 0");
                }
                if !(self.delta > 0.0 && self.delta.is_finite()) {
                    return bad("delta", "must be finite and > 0");
                }
            }
        }
        Ok(())
    }

    /// Stability bound for one explicit RK4 step on `grid`, before the safety
    /// factor.
    ///
    /// The discrete Laplacian has spectral radius at most
    /// `lambda = 4 (max e^{2x2} / h1^2 + 1 / h2^2)`. Parabolic flows scale it
    /// by `|z|`; the wave system oscillates at `sqrt(alpha lambda / delta)`
    /// and damps at rate `(alpha^2 + alpha |beta|) / (|z|^2 delta)`.
    pub fn stability_bound(&self, kind: FlowKind, grid: &Grid) -> f64 {
        let lambda = 4.0 * grid.stiffness();
        match kind {
            FlowKind::Heat => RK4_REACH / lambda,
            FlowKind::LandauLifshitz => RK4_REACH / (self.z_abs() * lambda),
            FlowKind::Wave => {
                let z2 = self.alpha * self.alpha + self.beta * self.beta;
                let omega = (self.alpha * lambda / self.delta).sqrt();
                let damp = (self.alpha * self.alpha + self.alpha * self.beta.abs()) / (z2 * self.delta);
                RK4_REACH / (omega + damp)
            }
        }
    }

    pub fn admissible_dt(&self, kind: FlowKind, grid: &Grid) -> f64 {
        self.cfl * self.stability_bound(kind, grid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(FlowParams::ll(1.0, 1.0).validate(FlowKind::LandauLifshitz).is_ok());
        let e = FlowParams::ll(-1.0, 0.0).validate(FlowKind::LandauLifshitz);
        assert!(format!("{}", e.unwrap_err()).contains("alpha"));
        let mut p = FlowParams::ll(1.0, 0.0);
        p.delta = 0.0;
        assert!(p.validate(FlowKind::Wave).is_err());
        p.cfl = 1.5;
        assert!(p.validate(FlowKind::LandauLifshitz).is_err());
        assert!(FlowParams::ll(0.0, 1.0).validate(FlowKind::LandauLifshitz).is_ok());
    }

    #[test]
    fn dt_scales_with_spacing_and_z() {
        let g = Grid::new((-2.0, 2.0), (-1.5, 1.5), 33, 33).unwrap();
        let p = FlowParams::ll(1.0, 1.0);
        let a = p.admissible_dt(FlowKind::LandauLifshitz, &g);
        let b = p.admissible_dt(FlowKind::LandauLifshitz, &g.refined());
        assert!((a / b - 4.0).abs() < 1e-9);
        let h = FlowParams::heat().admissible_dt(FlowKind::Heat, &g);
        assert!((h / a - 2f64.sqrt()).abs() < 1e-12);
    }
}
