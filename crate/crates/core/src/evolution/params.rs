//! Coefficients of the unified equation family
//!
//! ```text
//! i d_t psi / psi - mu0 V = i (nu1 R1 + nu2 R2) + sum_k mu_k R_k + alpha1 ln|psi|^2
//! ```
//!
//! plus an optional current coupling `mu0 A.J/rho`. Everything here is already
//! divided by `hbar psi`, so the linear Schrodinger equation sits at
//! `mu0 = 1/hbar`, `nu1 = -hbar/2m`, `(mu2, mu3, mu5) = (-hbar/4m, hbar/2m, hbar/8m)`
//! and all other coefficients zero.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{Grid, RealField};
use crate::functionals::DensityFloor;
use crate::gauge::{pushforward_coefficients, GammaPath};

/// One instant's worth of coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coefficients {
    pub mu0: f64,
    pub nu1: f64,
    pub nu2: f64,
    /// `mu1..mu5`
    pub mu: [f64; 5],
    pub alpha1: f64,
}

impl Coefficients {
    pub fn linear(hbar: f64, mass: f64) -> Self {
        let h = hbar / mass;
        Self {
            mu0: 1.0 / hbar,
            nu1: -0.5 * h,
            nu2: 0.0,
            mu: [0.0, -0.25 * h, 0.5 * h, 0.0, 0.125 * h],
            alpha1: 0.0,
        }
    }

    /// Coefficients left after the kinetic part is regrouped as `nu1 lap psi`:
    /// `(mu1, mu2 - nu1/2, mu3 + nu1, mu4, mu5 + nu1/4)`.
    pub fn residual_mu(&self) -> [f64; 5] {
        let [m1, m2, m3, m4, m5] = self.mu;
        [m1, m2 - 0.5 * self.nu1, m3 + self.nu1, m4, m5 + 0.25 * self.nu1]
    }

    /// True when only `nu1 lap psi` and `mu0 V` survive.
    pub fn is_kinetic_only(&self) -> bool {
        self.nu2 == 0.0 && self.alpha1 == 0.0 && self.residual_mu().iter().all(|&m| m == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        [self.mu0, self.nu1, self.nu2, self.alpha1].iter().chain(&self.mu).all(|v| v.is_finite())
    }

    /// Largest absolute difference between two coefficient sets.
    pub fn max_difference(&self, other: &Self) -> f64 {
        let a = [self.mu0, self.nu1, self.nu2, self.alpha1];
        let b = [other.mu0, other.nu1, other.nu2, other.alpha1];
        a.iter()
            .zip(&b)
            .chain(self.mu.iter().zip(&other.mu))
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }
}

/// Doebner-Goldin model parameters: diffusion `D`, nonlinear scale `D'` and
/// the five weights `c1..c5`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DgParams {
    pub d: f64,
    pub d_prime: f64,
    pub c: [f64; 5],
}

/// Time dependence of the coefficients.
#[derive(Clone)]
pub enum Schedule {
    Constant(Coefficients),
    Varying(Arc<dyn Fn(f64) -> Coefficients + Send + Sync>),
}

impl fmt::Debug for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(c) => write!(f, "Constant({c:?})"),
            Self::Varying(_) => write!(f, "Varying"),
        }
    }
}

/// Full specification of one member of the unified family on a grid.
#[derive(Clone, Debug)]
pub struct UnifiedParams {
    hbar: f64,
    mass: f64,
    schedule: Schedule,
    potential: Option<Arc<RealField>>,
    coupling: Option<Arc<Vec<Vec<f64>>>>,
    floor: DensityFloor,
}

impl UnifiedParams {
    pub fn from_coefficients(c: Coefficients, hbar: f64, mass: f64) -> Self {
        assert!(hbar > 0.0 && mass > 0.0, "hbar and mass must be positive");
        Self {
            hbar,
            mass,
            schedule: Schedule::Constant(c),
            potential: None,
            coupling: None,
            floor: DensityFloor::default(),
        }
    }

    /// Linear Schrodinger equation.
    pub fn linear(hbar: f64, mass: f64) -> Self {
        Self::from_coefficients(Coefficients::linear(hbar, mass), hbar, mass)
    }

    /// Logarithmic nonlinearity `alpha1 ln|psi|^2` on top of the linear equation.
    pub fn from_bbm(alpha1: f64, hbar: f64, mass: f64) -> Self {
        let mut c = Coefficients::linear(hbar, mass);
        c.alpha1 += alpha1 / hbar;
        Self::from_coefficients(c, hbar, mass)
    }

    /// `nu2 = D/2`, `mu_k += D' c_k`.
    pub fn from_dg(dg: DgParams, hbar: f64, mass: f64) -> Self {
        let mut c = Coefficients::linear(hbar, mass);
        c.nu2 = 0.5 * dg.d;
        for (m, ck) in c.mu.iter_mut().zip(&dg.c) {
            *m += dg.d_prime * ck;
        }
        Self::from_coefficients(c, hbar, mass)
    }

    /// Equation obeyed by `N_gamma[psi]` for `psi` solving the linear equation.
    pub fn from_gauge(gamma: &GammaPath, hbar: f64, mass: f64) -> Self {
        let lin = Coefficients::linear(hbar, mass);
        match gamma.constant_value() {
            Some(g) => Self::from_coefficients(pushforward_coefficients(&lin, g, 0.0), hbar, mass),
            None => {
                let gamma = gamma.clone();
                Self::linear(hbar, mass).with_schedule(move |t| {
                    pushforward_coefficients(&lin, gamma.value(t), gamma.rate(t))
                })
            }
        }
    }

    /// Linear equation with the current coupling `A.J/rho`; `A` carries the
    /// units of a potential.
    pub fn haag_bannier(coupling: &[RealField], hbar: f64, mass: f64) -> Result<Self> {
        Self::linear(hbar, mass).with_coupling(coupling)
    }

    /// Same `hbar`, `mass`, potential and coupling with new coefficients.
    pub fn with_schedule(&self, f: impl Fn(f64) -> Coefficients + Send + Sync + 'static) -> Self {
        Self { schedule: Schedule::Varying(Arc::new(f)), ..self.clone() }
    }

    pub fn with_coefficients(&self, c: Coefficients) -> Self {
        Self { schedule: Schedule::Constant(c), ..self.clone() }
    }

    pub fn with_potential(mut self, v: RealField) -> Self {
        self.potential = Some(Arc::new(v));
        self
    }

    pub fn with_coupling(mut self, a: &[RealField]) -> Result<Self> {
        let Some(first) = a.first() else {
            return Err(Error::InvalidArgument("coupling needs one component per axis".into()));
        };
        if a.len() != first.grid().dims() || a.iter().any(|c| c.grid() != first.grid()) {
            return Err(Error::InvalidArgument("coupling needs one component per axis".into()));
        }
        let comps: Vec<Vec<f64>> = a.iter().map(|c| c.values().to_vec()).collect();
        self.coupling =
            if comps.iter().flatten().all(|&v| v == 0.0) { None } else { Some(Arc::new(comps)) };
        Ok(self)
    }

    pub fn with_floor(mut self, floor: DensityFloor) -> Self {
        self.floor = floor;
        self
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn floor(&self) -> DensityFloor {
        self.floor
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn potential(&self) -> Option<&RealField> {
        self.potential.as_deref()
    }

    pub fn coupling(&self) -> Option<&[Vec<f64>]> {
        self.coupling.as_deref().map(|v| v.as_slice())
    }

    pub fn coefficients(&self, t: f64) -> Coefficients {
        match &self.schedule {
            Schedule::Constant(c) => *c,
            Schedule::Varying(f) => f(t),
        }
    }

    pub fn is_time_dependent(&self) -> bool {
        matches!(self.schedule, Schedule::Varying(_))
    }

    /// Linear Schrodinger equation exactly, so the split-step flow applies.
    pub fn is_linear_point(&self) -> bool {
        match &self.schedule {
            Schedule::Constant(c) => {
                self.coupling.is_none()
                    && c.max_difference(&Coefficients::linear(self.hbar, self.mass)) == 0.0
            }
            Schedule::Varying(_) => false,
        }
    }

    /// Checks that potential and coupling live on `grid`.
    pub fn check_grid(&self, grid: &Grid) -> Result<()> {
        if let Some(v) = &self.potential {
            if v.grid() != grid {
                return Err(Error::GridMismatch);
            }
        }
        if let Some(a) = &self.coupling {
            if a.len() != grid.dims() || a.iter().any(|c| c.len() != grid.len()) {
                return Err(Error::GridMismatch);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauge_zero_is_linear_point() {
        let p = UnifiedParams::from_gauge(&GammaPath::Constant(0.0), 1.0, 1.0);
        assert!(p.is_linear_point());
        assert!(UnifiedParams::from_dg(DgParams { d: 0.0, d_prime: 0.0, c: [1.0; 5] }, 1.0, 1.0)
            .is_linear_point());
    }

    #[test]
    fn gauge_two_coefficients() {
        let c = UnifiedParams::from_gauge(&GammaPath::Constant(2.0), 1.0, 1.0).coefficients(0.0);
        let expect = Coefficients {
            mu0: 1.0,
            nu1: -0.5,
            nu2: 0.5,
            mu: [1.0, -0.25 - 1.0, 0.5, -1.0, 0.125 + 0.5],
            alpha1: 0.0,
        };
        assert!(c.max_difference(&expect) < 1e-15, "{c:?}");
    }

    #[test]
    fn gauge_coefficients_scale_with_hbar_over_m() {
        let (hbar, m, g) = (0.7, 2.5, 1.3);
        let c = UnifiedParams::from_gauge(&GammaPath::Constant(g), hbar, m).coefficients(0.0);
        let h = hbar / m;
        assert!((c.nu2 - h * g / 4.0).abs() < 1e-15);
        assert!((c.mu[0] - h * g / 2.0).abs() < 1e-15);
        assert!((c.mu[3] + h * g / 2.0).abs() < 1e-15);
        assert!((c.mu[1] - (-h / 4.0 - h * g * g / 4.0)).abs() < 1e-15);
        assert!((c.mu[4] - (h / 8.0 + h * g * g / 8.0)).abs() < 1e-15);
    }

    #[test]
    fn time_dependent_gauge_log_coefficient() {
        let p = UnifiedParams::from_gauge(
            &GammaPath::Sine { amplitude: 1.0, omega: 1.0, phase: 0.0 },
            1.0,
            1.0,
        );
        assert!(p.is_time_dependent());
        assert!((p.coefficients(0.3).alpha1 + 0.5 * 0.3f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn residuals_vanish_at_linear_point() {
        let c = Coefficients::linear(1.3, 0.4);
        assert!(c.is_kinetic_only());
        let mut bbm = UnifiedParams::from_bbm(2.0, 2.0, 1.0).coefficients(0.0);
        assert_eq!(bbm.alpha1, 1.0);
        bbm.alpha1 = 0.0;
        assert!(bbm.is_kinetic_only());
    }
}
