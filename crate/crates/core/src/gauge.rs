//! Strictly local nonlinear gauge transformations.
//!
//! A transform is fixed by `(delta, gamma, Lambda; kappa, theta)` and acts
//! pointwise as
//!
//! ```text
//! N[psi] = kappa |psi|^delta exp{i (gamma ln|psi| + Lambda arg psi + theta)}
//! ```
//!
//! It is invertible on L2 only for `delta = 1`, `Lambda = +-1` and a kappa
//! bounded away from zero and infinity, and norm preserving iff `kappa == 1`.
//! Other parameter sets are accepted only in formal mode.
//!
//! For `Lambda = +-1` the phase `Lambda arg psi` is realised by using `psi` or
//! its conjugate directly, so no phase unwrapping is ever needed. The
//! logarithm is taken of the floored modulus `sqrt(rho~)`, with the same
//! smooth floor the functionals use.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolution::{Coefficients, UnifiedParams};
use crate::field::{RealField, WaveFunction};
use crate::functionals::DensityFloor;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type FieldFn = Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>;

/// Continuous solution `c'(c) = |c|^(delta + i gamma) (c / conj c)^(Lambda/2)`
/// of Cauchy's power equation `c'(c1 c2) = c'(c1) c'(c2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CauchyPower {
    pub delta: f64,
    pub gamma: f64,
    pub lambda: i32,
}

impl CauchyPower {
    pub fn eval(&self, c: Complex64) -> Result<Complex64> {
        if c.norm_sqr() == 0.0 {
            return Err(Error::ZeroArgument);
        }
        let (r, arg) = c.to_polar();
        Ok(Complex64::from_polar(
            r.powf(self.delta),
            self.gamma * r.ln() + self.lambda as f64 * arg,
        ))
    }
}

pub fn c_prime(p: &CauchyPower, c: Complex64) -> Result<Complex64> {
    p.eval(c)
}

/// Time profile of the gauge parameter `gamma(t)` and its rate.
#[derive(Clone)]
pub enum GammaPath {
    Constant(f64),
    /// `value + rate * t`
    Linear { value: f64, rate: f64 },
    /// `amplitude * sin(omega t + phase)`
    Sine { amplitude: f64, omega: f64, phase: f64 },
    /// Arbitrary path; without a rate function the rate is a central
    /// difference with step `1e-5 max(1, |t|)` (error `O(1e-10)` for smooth paths).
    Custom { value: ScalarFn, rate: Option<ScalarFn> },
}

impl fmt::Debug for GammaPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(v) => write!(f, "Constant({v})"),
            Self::Linear { value, rate } => write!(f, "Linear({value} + {rate} t)"),
            Self::Sine { amplitude, omega, phase } => {
                write!(f, "Sine({amplitude} sin({omega} t + {phase}))")
            }
            Self::Custom { rate, .. } => write!(f, "Custom(rate: {})", rate.is_some()),
        }
    }
}

impl GammaPath {
    pub fn custom(value: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::Custom { value: Arc::new(value), rate: None }
    }

    pub fn custom_with_rate(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        rate: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::Custom { value: Arc::new(value), rate: Some(Arc::new(rate)) }
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            Self::Constant(v) => *v,
            Self::Linear { value, rate } => value + rate * t,
            Self::Sine { amplitude, omega, phase } => amplitude * (omega * t + phase).sin(),
            Self::Custom { value, .. } => value(t),
        }
    }

    pub fn rate(&self, t: f64) -> f64 {
        match self {
            Self::Constant(_) => 0.0,
            Self::Linear { rate, .. } => *rate,
            Self::Sine { amplitude, omega, phase } => amplitude * omega * (omega * t + phase).cos(),
            Self::Custom { rate: Some(r), .. } => r(t),
            Self::Custom { value, rate: None } => {
                let h = 1e-5 * t.abs().max(1.0);
                (value(t + h) - value(t - h)) / (2.0 * h)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Self::Constant(v) => *v == 0.0,
            Self::Linear { value, rate } => *value == 0.0 && *rate == 0.0,
            Self::Sine { amplitude, .. } => *amplitude == 0.0,
            Self::Custom { .. } => false,
        }
    }

    pub fn constant_value(&self) -> Option<f64> {
        match self {
            Self::Constant(v) => Some(*v),
            Self::Linear { value, rate } if *rate == 0.0 => Some(*value),
            _ => None,
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        match self {
            Self::Constant(v) => Self::Constant(s * v),
            Self::Linear { value, rate } => Self::Linear { value: s * value, rate: s * rate },
            Self::Sine { amplitude, omega, phase } => {
                Self::Sine { amplitude: s * amplitude, omega: *omega, phase: *phase }
            }
            Self::Custom { .. } => {
                let a = self.clone();
                let b = self.clone();
                Self::custom_with_rate(move |t| s * a.value(t), move |t| s * b.rate(t))
            }
        }
    }

    pub fn sum(&self, other: &Self) -> Self {
        match (self, other) {
            (Self::Constant(a), Self::Constant(b)) => Self::Constant(a + b),
            (Self::Constant(a), Self::Linear { value, rate })
            | (Self::Linear { value, rate }, Self::Constant(a)) => {
                Self::Linear { value: a + value, rate: *rate }
            }
            (Self::Linear { value: v1, rate: r1 }, Self::Linear { value: v2, rate: r2 }) => {
                Self::Linear { value: v1 + v2, rate: r1 + r2 }
            }
            _ => {
                let (a, b) = (self.clone(), other.clone());
                let (c, d) = (self.clone(), other.clone());
                Self::custom_with_rate(move |t| a.value(t) + b.value(t), move |t| c.rate(t) + d.rate(t))
            }
        }
    }
}

/// Real phase field `theta(x, t)`.
#[derive(Clone, Default)]
pub enum PhaseField {
    #[default]
    Zero,
    Static(Arc<Vec<f64>>),
    Dynamic(FieldFn),
}

impl fmt::Debug for PhaseField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => write!(f, "Zero"),
            Self::Static(v) => write!(f, "Static({} cells)", v.len()),
            Self::Dynamic(_) => write!(f, "Dynamic"),
        }
    }
}

impl PhaseField {
    pub fn from_field(field: &RealField) -> Self {
        Self::Static(Arc::new(field.values().to_vec()))
    }

    pub fn dynamic(f: impl Fn(f64) -> Vec<f64> + Send + Sync + 'static) -> Self {
        Self::Dynamic(Arc::new(f))
    }

    pub fn at(&self, t: f64) -> Option<Vec<f64>> {
        match self {
            Self::Zero => None,
            Self::Static(v) => Some(v.as_ref().clone()),
            Self::Dynamic(f) => Some(f(t)),
        }
    }

    fn scaled(&self, s: f64) -> Self {
        match self {
            Self::Zero => Self::Zero,
            Self::Static(v) => Self::Static(Arc::new(v.iter().map(|x| s * x).collect())),
            Self::Dynamic(f) => {
                let f = f.clone();
                Self::dynamic(move |t| f(t).into_iter().map(|x| s * x).collect())
            }
        }
    }

    fn sum(&self, other: &Self) -> Self {
        match (self, other) {
            (Self::Zero, x) | (x, Self::Zero) => x.clone(),
            (Self::Static(a), Self::Static(b)) => {
                Self::Static(Arc::new(a.iter().zip(b.iter()).map(|(x, y)| x + y).collect()))
            }
            _ => {
                let (a, b) = (self.clone(), other.clone());
                Self::dynamic(move |t| {
                    let x = a.at(t).unwrap_or_default();
                    let y = b.at(t).unwrap_or_default();
                    x.iter().zip(&y).map(|(p, q)| p + q).collect()
                })
            }
        }
    }

    /// `gamma(t) * weights`, static when gamma is constant.
    fn gamma_weighted(weights: Arc<Vec<f64>>, gamma: &GammaPath) -> Self {
        if let Some(g) = gamma.constant_value() {
            if g == 0.0 {
                return Self::Zero;
            }
            return Self::Static(Arc::new(weights.iter().map(|w| g * w).collect()));
        }
        let gamma = gamma.clone();
        Self::dynamic(move |t| {
            let g = gamma.value(t);
            weights.iter().map(|w| g * w).collect()
        })
    }
}

/// `N_(delta, gamma, Lambda; kappa, theta)`.
#[derive(Clone, Debug)]
pub struct GaugeTransform {
    delta: f64,
    gamma: GammaPath,
    lambda: i32,
    kappa: Option<Arc<Vec<f64>>>,
    theta: PhaseField,
    floor: DensityFloor,
    formal: bool,
}

impl Default for GaugeTransform {
    fn default() -> Self {
        Self::identity()
    }
}

impl GaugeTransform {
    pub fn identity() -> Self {
        Self {
            delta: 1.0,
            gamma: GammaPath::Constant(0.0),
            lambda: 1,
            kappa: None,
            theta: PhaseField::Zero,
            floor: DensityFloor::default(),
            formal: false,
        }
    }

    /// Pure gauge `N_gamma[psi] = psi exp(i gamma ln|psi|)`.
    pub fn pure(gamma: f64) -> Self {
        Self::pure_path(GammaPath::Constant(gamma))
    }

    pub fn pure_path(gamma: GammaPath) -> Self {
        Self { gamma, ..Self::identity() }
    }

    /// Complex conjugation (`Lambda = -1`).
    pub fn conjugation() -> Self {
        Self { lambda: -1, ..Self::identity() }
    }

    /// Linear local unitary `U_theta`.
    pub fn local_unitary(theta: &RealField) -> Self {
        Self { theta: PhaseField::from_field(theta), ..Self::identity() }
    }

    /// General parameter set. `delta != 1` or `|Lambda| != 1` requires
    /// [`GaugeTransform::formal`].
    pub fn new(delta: f64, gamma: GammaPath, lambda: i32) -> Self {
        Self { delta, gamma, lambda, ..Self::identity() }
    }

    pub fn with_theta(mut self, theta: PhaseField) -> Self {
        self.theta = theta;
        self
    }

    pub fn with_kappa(mut self, kappa: &RealField) -> Result<Self> {
        let v = kappa.values();
        if v.iter().any(|&k| !(k > 0.0 && k.is_finite())) {
            return Err(Error::NonInvertible("kappa must be positive and bounded".into()));
        }
        self.kappa = if v.iter().all(|&k| k == 1.0) { None } else { Some(Arc::new(v.to_vec())) };
        Ok(self)
    }

    pub fn with_floor(mut self, floor: DensityFloor) -> Self {
        self.floor = floor;
        self
    }

    /// Opts into parameter sets that are only defined on a subset of L2.
    pub fn formal(mut self) -> Self {
        self.formal = true;
        self
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn gamma(&self) -> &GammaPath {
        &self.gamma
    }

    pub fn lambda(&self) -> i32 {
        self.lambda
    }

    pub fn theta(&self) -> &PhaseField {
        &self.theta
    }

    pub fn kappa(&self) -> Option<&[f64]> {
        self.kappa.as_deref().map(|v| v.as_slice())
    }

    pub fn floor(&self) -> DensityFloor {
        self.floor
    }

    pub fn is_norm_preserving(&self) -> bool {
        self.kappa.is_none() && self.delta == 1.0
    }

    pub fn is_invertible(&self) -> bool {
        self.delta == 1.0 && (self.lambda == 1 || self.lambda == -1)
    }

    fn check_admissible(&self) -> Result<()> {
        if self.is_invertible() || self.formal {
            Ok(())
        } else {
            Err(Error::NonInvertible(format!(
                "delta = {}, Lambda = {} (enable formal mode to use it anyway)",
                self.delta, self.lambda
            )))
        }
    }

    fn check_len(&self, n: usize) -> Result<()> {
        let bad = |what: &str, len: usize| {
            Err(Error::InvalidArgument(format!("{what} has {len} cells, state has {n}")))
        };
        if let Some(k) = &self.kappa {
            if k.len() != n {
                return bad("kappa", k.len());
            }
        }
        if let PhaseField::Static(t) = &self.theta {
            if t.len() != n {
                return bad("theta", t.len());
            }
        }
        Ok(())
    }

    /// Applies the transform at time `t`.
    pub fn apply(&self, psi: &WaveFunction, t: f64) -> Result<WaveFunction> {
        self.check_admissible()?;
        let n = psi.amplitudes().len();
        self.check_len(n)?;
        let rho = psi.density();
        let max_rho = rho.iter().copied().fold(0.0, f64::max);
        if max_rho == 0.0 {
            return Ok(WaveFunction::zeros(psi.grid()));
        }
        let threshold = self.floor.threshold(max_rho);
        let gamma = self.gamma.value(t);
        let theta = self.theta.at(t);
        if let Some(th) = &theta {
            if th.len() != n {
                return Err(Error::InvalidArgument("theta has wrong size".into()));
            }
        }
        let linear_lambda = self.delta == 1.0 && (self.lambda == 1 || self.lambda == -1);

        let out = psi
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                let mut phase = 0.0;
                if gamma != 0.0 {
                    phase += gamma * 0.5 * DensityFloor::regularize(rho[i], threshold).ln();
                }
                if let Some(th) = &theta {
                    phase += th[i];
                }
                let kappa = self.kappa.as_ref().map_or(1.0, |k| k[i]);
                let v = if linear_lambda {
                    let base = if self.lambda == 1 { p } else { p.conj() };
                    if phase == 0.0 {
                        base
                    } else {
                        base * Complex64::from_polar(1.0, phase)
                    }
                } else if rho[i] == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    let (r, arg) = p.to_polar();
                    Complex64::from_polar(r.powf(self.delta), phase + self.lambda as f64 * arg)
                };
                if kappa == 1.0 {
                    v
                } else {
                    v * kappa
                }
            })
            .collect();
        WaveFunction::new(psi.grid(), out)
    }

    /// `N_(1, -Lambda gamma, Lambda; 1/kappa, Lambda (gamma ln kappa - theta))`.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_invertible() {
            return Err(Error::NonInvertible(format!(
                "delta = {}, Lambda = {}",
                self.delta, self.lambda
            )));
        }
        let l = self.lambda as f64;
        let mut theta = self.theta.scaled(-l);
        let kappa = self.kappa.as_ref().map(|k| {
            let log_k = Arc::new(k.iter().map(|v| v.ln()).collect::<Vec<_>>());
            theta = theta.sum(&PhaseField::gamma_weighted(log_k, &self.gamma.scaled(l)));
            Arc::new(k.iter().map(|v| 1.0 / v).collect::<Vec<_>>())
        });
        Ok(Self {
            delta: 1.0,
            gamma: self.gamma.scaled(-l),
            lambda: self.lambda,
            kappa,
            theta,
            floor: self.floor,
            formal: self.formal,
        })
    }

    /// `self ∘ other`: apply `other` first.
    ///
    /// Closed form: `delta = d1 d2`, `gamma = g1 d2 + L1 g2`, `Lambda = L1 L2`,
    /// `kappa = k1 k2^d1`, `theta = th1 + L1 th2 + g1 ln k2`.
    pub fn compose(&self, other: &Self) -> Self {
        let l1 = self.lambda as f64;
        let gamma = self.gamma.scaled(other.delta).sum(&other.gamma.scaled(l1));
        let mut theta = self.theta.sum(&other.theta.scaled(l1));
        if let Some(k2) = &other.kappa {
            let log_k2 = Arc::new(k2.iter().map(|v| v.ln()).collect::<Vec<_>>());
            theta = theta.sum(&PhaseField::gamma_weighted(log_k2, &self.gamma));
        }
        let kappa = match (&self.kappa, &other.kappa) {
            (None, None) => None,
            (Some(k1), None) => Some(k1.clone()),
            (k1, Some(k2)) => Some(Arc::new(
                k2.iter()
                    .enumerate()
                    .map(|(i, v)| k1.as_ref().map_or(1.0, |k| k[i]) * v.powf(self.delta))
                    .collect(),
            )),
        };
        Self {
            delta: self.delta * other.delta,
            gamma,
            lambda: self.lambda * other.lambda,
            kappa,
            theta,
            floor: self.floor,
            formal: self.formal || other.formal,
        }
    }
}

/// `(U_theta psi)(x) = exp(i theta(x)) psi(x)`.
pub fn apply_local_unitary(theta: &RealField, psi: &WaveFunction) -> Result<WaveFunction> {
    if theta.grid() != psi.grid() {
        return Err(Error::GridMismatch);
    }
    let out = psi
        .amplitudes()
        .iter()
        .zip(theta.values())
        .map(|(p, &th)| p * Complex64::from_polar(1.0, th))
        .collect();
    WaveFunction::new(psi.grid(), out)
}

/// Coefficients of the equation satisfied by `N_gamma[psi]` when `psi` solves
/// the equation with coefficients `c`.
///
/// With `J' = J + (gamma/2) grad rho` the functionals of the transformed state
/// relate by `R1 = R1' - (gamma/2) R2`, `R3 = R3' - gamma R4' + (gamma^2/4) R5`,
/// `R4 = R4' - (gamma/2) R5`, while `R2`, `R5` and `|psi|` are unchanged; the
/// phase picks up `-gamma_dot ln|psi| - gamma d_t ln|psi|`. Collecting terms:
///
/// ```text
/// nu1' = nu1                  nu2' = nu2 - gamma nu1 / 2
/// mu1' = mu1 - gamma nu1      mu2' = mu2 - gamma mu1 / 2 + gamma^2 nu1 / 2 - gamma nu2
/// mu3' = mu3                  mu4' = mu4 - gamma mu3
/// mu5' = mu5 + gamma^2 mu3 / 4 - gamma mu4 / 2
/// alpha1' = alpha1 - gamma_dot / 2
/// ```
pub fn pushforward_coefficients(c: &Coefficients, gamma: f64, gamma_dot: f64) -> Coefficients {
    let [m1, m2, m3, m4, m5] = c.mu;
    Coefficients {
        mu0: c.mu0,
        nu1: c.nu1,
        nu2: c.nu2 - 0.5 * gamma * c.nu1,
        mu: [
            m1 - gamma * c.nu1,
            m2 - 0.5 * gamma * m1 + 0.5 * gamma * gamma * c.nu1 - gamma * c.nu2,
            m3,
            m4 - gamma * m3,
            m5 + 0.25 * gamma * gamma * m3 - 0.5 * gamma * m4,
        ],
        alpha1: c.alpha1 - 0.5 * gamma_dot,
    }
}

/// Pushforward of a parameter set under a constant-rate gauge `N_gamma`.
pub fn pushforward_params(p: &UnifiedParams, gamma: f64, gamma_dot: f64) -> Result<UnifiedParams> {
    let path = if gamma_dot == 0.0 {
        GammaPath::Constant(gamma)
    } else {
        GammaPath::Custom {
            value: Arc::new(move |_| gamma),
            rate: Some(Arc::new(move |_| gamma_dot)),
        }
    };
    pushforward_path(p, &path)
}

/// Pushforward under a time-dependent gauge `N_gamma(t)`.
///
/// The vector coupling `A.J/rho` does not stay inside the family (it produces
/// `A.grad rho / rho`), so parameter sets with a coupling are rejected.
pub fn pushforward_path(p: &UnifiedParams, gamma: &GammaPath) -> Result<UnifiedParams> {
    if p.coupling().is_some() {
        return Err(Error::NotClosed("vector coupling A.J/rho".into()));
    }
    let base = p.clone();
    let gamma = gamma.clone();
    Ok(p.with_schedule(move |t| {
        pushforward_coefficients(&base.coefficients(t), gamma.value(t), gamma.rate(t))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Grid;
    use std::f64::consts::E;

    fn grid() -> Grid {
        Grid::new(&[128], &[24.0]).unwrap()
    }

    fn packet() -> WaveFunction {
        WaveFunction::gaussian(&grid(), &[0.5], 1.2, &[0.8]).unwrap()
    }

    /// Periodic, nowhere below the density floor.
    fn nodeless() -> WaveFunction {
        let w = 2.0 * std::f64::consts::PI / 24.0;
        WaveFunction::from_fn(&grid(), |x| {
            let env = 0.2 + (-(x[0] - 0.5).powi(2) / 4.0).exp();
            Complex64::from_polar(env, 0.8 * (w * x[0]).sin())
        })
        .unwrap()
        .normalized()
        .unwrap()
    }

    fn close(a: &WaveFunction, b: &WaveFunction, tol: f64) {
        let d = a.distance(b).unwrap();
        assert!(d <= tol, "distance {d:e} > {tol:e}");
    }

    #[test]
    fn c_prime_of_one_is_one() {
        for &(d, g, l) in &[(1.0, 0.0, 1), (0.5, 2.0, -1), (2.0, -1.5, 3)] {
            let v = CauchyPower { delta: d, gamma: g, lambda: l }.eval(Complex64::new(1.0, 0.0));
            assert!((v.unwrap() - 1.0).norm() < 1e-15);
        }
    }

    #[test]
    fn c_prime_closed_form() {
        let p = CauchyPower { delta: 1.0, gamma: 2.0, lambda: 1 };
        let v = p.eval(Complex64::new(E, 0.0)).unwrap();
        let expect = Complex64::new(E * 2f64.cos(), E * 2f64.sin());
        assert!((v - expect).norm() < 1e-15);
    }

    #[test]
    fn c_prime_rejects_zero() {
        let p = CauchyPower { delta: 1.0, gamma: 1.0, lambda: 1 };
        assert!(matches!(p.eval(Complex64::new(0.0, 0.0)), Err(Error::ZeroArgument)));
    }

    #[test]
    fn identity_is_identity() {
        let psi = packet();
        let out = GaugeTransform::identity().apply(&psi, 0.0).unwrap();
        assert_eq!(out.amplitudes(), psi.amplitudes());
    }

    #[test]
    fn pure_gauge_on_constant() {
        let g = grid();
        let psi = WaveFunction::from_fn(&g, |_| Complex64::new(2.0, 0.0)).unwrap();
        let out = GaugeTransform::pure(0.7).apply(&psi, 0.0).unwrap();
        let expect = Complex64::from_polar(2.0, 0.7 * 2f64.ln());
        assert!(out.amplitudes().iter().all(|v| (v - expect).norm() < 1e-15));
    }

    #[test]
    fn conjugation_is_conjugate() {
        let psi = packet();
        let out = GaugeTransform::conjugation().apply(&psi, 0.0).unwrap();
        assert_eq!(out.amplitudes(), psi.conj().amplitudes());
        let back = GaugeTransform::conjugation().inverse().unwrap();
        assert_eq!(back.lambda(), -1);
        assert!(back.gamma().is_zero());
        close(&back.apply(&out, 0.0).unwrap(), &psi, 0.0);
    }

    #[test]
    fn pure_inverse_and_invert_identity() {
        let psi = packet();
        let n = GaugeTransform::pure(1.3);
        let inv = n.inverse().unwrap();
        assert_eq!(inv.gamma().constant_value(), Some(-1.3));
        close(&inv.apply(&n.apply(&psi, 0.0).unwrap(), 0.0).unwrap(), &psi, 1e-10);
        let id = GaugeTransform::identity().inverse().unwrap();
        assert_eq!(id.apply(&psi, 0.0).unwrap().amplitudes(), psi.amplitudes());
    }

    #[test]
    fn inverse_with_kappa_and_theta() {
        let g = grid();
        let kappa = RealField::from_fn(&g, |x| 1.0 + 0.3 * (x[0] / 3.0).sin());
        let theta = RealField::from_fn(&g, |x| 0.2 * x[0] * x[0]);
        for lambda in [1, -1] {
            let n = GaugeTransform::new(1.0, GammaPath::Constant(0.9), lambda)
                .with_kappa(&kappa)
                .unwrap()
                .with_theta(PhaseField::from_field(&theta));
            assert!(!n.is_norm_preserving());
            let psi = nodeless();
            let round = n.inverse().unwrap().apply(&n.apply(&psi, 0.0).unwrap(), 0.0).unwrap();
            close(&round, &psi, 1e-10);
        }
    }

    #[test]
    fn non_invertible_needs_formal_mode() {
        let psi = nodeless();
        let n = GaugeTransform::new(2.0, GammaPath::Constant(0.0), 1);
        assert!(matches!(n.apply(&psi, 0.0), Err(Error::NonInvertible(_))));
        assert!(n.inverse().is_err());
        let out = n.clone().formal().apply(&psi, 0.0).unwrap();
        for (o, p) in out.amplitudes().iter().zip(psi.amplitudes()) {
            assert!((o.norm() - p.norm_sqr()).abs() < 1e-14);
        }
    }

    #[test]
    fn c_prime_agrees_with_apply_on_constants() {
        let g = grid();
        for lambda in [1, -1] {
            let c = Complex64::new(0.7, -1.1);
            let psi = WaveFunction::from_fn(&g, |_| c).unwrap();
            let n = GaugeTransform::new(1.0, GammaPath::Constant(1.4), lambda);
            let p = CauchyPower { delta: 1.0, gamma: 1.4, lambda };
            let expect = p.eval(c).unwrap();
            let out = n.apply(&psi, 0.0).unwrap();
            assert!(out.amplitudes().iter().all(|v| (v - expect).norm() < 1e-14));
        }
    }

    #[test]
    fn composition_of_pure_gauges_adds() {
        let psi = nodeless();
        let one = GaugeTransform::pure(1.0);
        let twice = one.apply(&one.apply(&psi, 0.0).unwrap(), 0.0).unwrap();
        close(&twice, &GaugeTransform::pure(2.0).apply(&psi, 0.0).unwrap(), 1e-12);
        assert_eq!(one.compose(&one).gamma().constant_value(), Some(2.0));
    }

    #[test]
    fn compose_with_identity() {
        let psi = nodeless();
        let n = GaugeTransform::pure(0.4);
        let a = n.compose(&GaugeTransform::identity()).apply(&psi, 0.0).unwrap();
        let b = GaugeTransform::identity().compose(&n).apply(&psi, 0.0).unwrap();
        let c = n.apply(&psi, 0.0).unwrap();
        close(&a, &c, 0.0);
        close(&b, &c, 0.0);
    }

    #[test]
    fn compose_closed_form_matches_sequential() {
        let g = grid();
        let kappa = RealField::from_fn(&g, |x| 1.2 + 0.2 * (x[0] / 2.0).cos());
        let theta = RealField::from_fn(&g, |x| 0.3 * x[0]);
        let a = GaugeTransform::new(1.0, GammaPath::Constant(0.6), -1)
            .with_theta(PhaseField::from_field(&theta));
        let b = GaugeTransform::new(1.0, GammaPath::Constant(-1.1), 1).with_kappa(&kappa).unwrap();
        let psi = nodeless();
        let seq = a.apply(&b.apply(&psi, 0.0).unwrap(), 0.0).unwrap();
        let closed = a.compose(&b).apply(&psi, 0.0).unwrap();
        close(&seq, &closed, 1e-12);
    }

    #[test]
    fn local_unitaries_multiply() {
        let g = grid();
        let psi = packet();
        let t1 = RealField::from_fn(&g, |x| x[0].sin());
        let t2 = RealField::from_fn(&g, |x| 0.1 * x[0] * x[0]);
        let t12 = RealField::from_fn(&g, |x| x[0].sin() + 0.1 * x[0] * x[0]);
        let seq = apply_local_unitary(&t1, &apply_local_unitary(&t2, &psi).unwrap()).unwrap();
        let direct = apply_local_unitary(&t12, &psi).unwrap();
        for (a, b) in seq.amplitudes().iter().zip(direct.amplitudes()) {
            assert!((a - b).norm() < 1e-15);
        }
        let zero = apply_local_unitary(&RealField::constant(&g, 0.0), &psi).unwrap();
        assert_eq!(zero.amplitudes(), psi.amplitudes());
        for (a, b) in seq.amplitudes().iter().zip(psi.amplitudes()) {
            assert!((a.norm() - b.norm()).abs() < 1e-15);
        }
    }

    #[test]
    fn time_dependent_gamma() {
        let psi = packet();
        let n = GaugeTransform::pure_path(GammaPath::Sine { amplitude: 1.0, omega: 1.0, phase: 0.0 });
        let at = n.apply(&psi, 0.8).unwrap();
        close(&at, &GaugeTransform::pure(0.8f64.sin()).apply(&psi, 0.0).unwrap(), 1e-15);
        let custom = GammaPath::custom(|t: f64| t * t);
        assert!((custom.rate(1.5) - 3.0).abs() < 1e-9);
    }

    #[test]
    fn gamma_path_algebra() {
        let a = GammaPath::Sine { amplitude: 2.0, omega: 3.0, phase: 0.1 };
        let b = GammaPath::Linear { value: 1.0, rate: -0.5 };
        let s = a.sum(&b.scaled(2.0));
        for t in [0.0, 0.3, 1.7] {
            assert!((s.value(t) - (a.value(t) + 2.0 * b.value(t))).abs() < 1e-15);
            assert!((s.rate(t) - (a.rate(t) + 2.0 * b.rate(t))).abs() < 1e-15);
        }
    }
}
