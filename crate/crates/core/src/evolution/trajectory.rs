//! Driving a state over an interval and recording what happened.

use num_complex::Complex64;

use super::linear::LinearPropagator;
use super::params::UnifiedParams;
use super::unified::{rk4_in_place, StepOptions};
use crate::error::{Error, Result};
use crate::field::{RealField, WaveFunction};
use crate::gauge::GaugeTransform;

/// Which integrator [`evolve`] uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Method {
    /// Split-step at the linear point, RK4 otherwise.
    #[default]
    Auto,
    SplitStep,
    Rk4,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolveOptions {
    pub t_final: f64,
    /// Requested step; the actual step is `t_final / ceil(t_final / dt)`.
    pub dt: f64,
    /// Record every `stride` steps. The final state is always recorded.
    pub stride: usize,
    pub method: Method,
    pub step: StepOptions,
}

impl EvolveOptions {
    pub fn new(t_final: f64, dt: f64) -> Self {
        Self { t_final, dt, stride: usize::MAX, method: Method::Auto, step: StepOptions::default() }
    }

    pub fn stride(mut self, stride: usize) -> Self {
        self.stride = stride.max(1);
        self
    }

    pub fn method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    /// Number of steps and the uniform step that lands exactly on `t_final`.
    pub fn steps(&self) -> Result<(usize, f64)> {
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::InvalidArgument(format!("t_final = {}", self.t_final)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("dt = {} must be positive", self.dt)));
        }
        if self.t_final == 0.0 {
            return Ok((0, self.dt));
        }
        let n = ((self.t_final / self.dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        Ok((n, self.t_final / n as f64))
    }
}

/// Per-record diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diagnostics {
    pub t: f64,
    pub norm: f64,
    /// `<H_lin> / ||psi||^2` with `H_lin = -hbar^2/2m lap + V`; not conserved
    /// away from the linear point.
    pub linear_energy: f64,
    pub max_abs: f64,
    pub floored_cells: usize,
}

impl Diagnostics {
    pub fn measure(
        psi: &WaveFunction,
        t: f64,
        potential: Option<&RealField>,
        hbar: f64,
        mass: f64,
        floored_cells: usize,
    ) -> Self {
        Self {
            t,
            norm: psi.norm(),
            linear_energy: linear_energy(psi, potential, hbar, mass),
            max_abs: psi.max_abs(),
            floored_cells,
        }
    }
}

/// Expectation of the linear Hamiltonian, kinetic part in Fourier space.
pub fn linear_energy(psi: &WaveFunction, potential: Option<&RealField>, hbar: f64, mass: f64) -> f64 {
    let grid = psi.grid();
    let mut spec = psi.amplitudes().to_vec();
    grid.forward(&mut spec);
    let (mut kin, mut total) = (0.0, 0.0);
    for (c, k2) in spec.iter().zip(grid.wavenumber_squared()) {
        let w = c.norm_sqr();
        kin += w * k2;
        total += w;
    }
    if total == 0.0 {
        return 0.0;
    }
    let mut e = hbar * hbar / (2.0 * mass) * kin / total;
    if let Some(v) = potential {
        let ns: f64 = psi.density().iter().sum();
        let pot: f64 = psi.density().iter().zip(v.values()).map(|(r, v)| r * v).sum();
        e += pot / ns;
    }
    e
}

/// Recorded states of one run.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<WaveFunction>,
    pub diagnostics: Vec<Diagnostics>,
    /// Step actually used.
    pub dt: f64,
    pub steps: usize,
    pub method: Method,
}

impl Trajectory {
    pub fn last(&self) -> &WaveFunction {
        self.states.last().expect("trajectory always holds the initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory always holds the initial time")
    }
}

/// Integrates `psi0` under `p` from `0` to `opts.t_final`.
pub fn evolve(psi0: &WaveFunction, p: &UnifiedParams, opts: &EvolveOptions) -> Result<Trajectory> {
    evolve_observed(psi0, p, opts, |_, _| {})
}

/// Like [`evolve`], additionally handing the amplitudes after every step to
/// `observer`.
pub fn evolve_observed(
    psi0: &WaveFunction,
    p: &UnifiedParams,
    opts: &EvolveOptions,
    mut observer: impl FnMut(f64, &[Complex64]),
) -> Result<Trajectory> {
    p.check_grid(psi0.grid())?;
    let (n, dt) = opts.steps()?;
    let method = match opts.method {
        Method::Auto if p.is_linear_point() => Method::SplitStep,
        Method::Auto => Method::Rk4,
        m => m,
    };
    if method == Method::SplitStep && !p.is_linear_point() {
        return Err(Error::InvalidArgument(
            "split-step flow needs the linear point without coupling".into(),
        ));
    }
    let grid = psi0.grid().clone();
    let (hbar, mass) = (p.hbar(), p.mass());
    let propagator = match method {
        Method::SplitStep => Some(LinearPropagator::new(&grid, p.potential(), dt, hbar, mass)?),
        _ => None,
    };
    let mut amps: Vec<Complex64> = psi0.amplitudes().to_vec();
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![psi0.clone()],
        diagnostics: vec![Diagnostics::measure(psi0, 0.0, p.potential(), hbar, mass, 0)],
        dt,
        steps: n,
        method,
    };
    let stride = opts.stride.max(1);
    for s in 0..n {
        let floored = match &propagator {
            Some(prop) => {
                prop.step_in_place(&mut amps);
                0
            }
            None => rk4_in_place(&grid, &mut amps, p, s as f64 * dt, dt, &opts.step)?,
        };
        let t = if s + 1 == n { opts.t_final } else { (s + 1) as f64 * dt };
        observer(t, &amps);
        if (s + 1) % stride == 0 || s + 1 == n {
            let psi = WaveFunction::from_parts(&grid, amps.clone());
            traj.diagnostics.push(Diagnostics::measure(&psi, t, p.potential(), hbar, mass, floored));
            traj.times.push(t);
            traj.states.push(psi);
        }
    }
    Ok(traj)
}

/// `psi'_t = N(t)[U(t) N(0)^-1 psi'_0]` with `U` the split-step linear flow.
pub fn conjugated_evolve(
    psi0_prime: &WaveFunction,
    n: &GaugeTransform,
    potential: Option<&RealField>,
    hbar: f64,
    mass: f64,
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    if !(n.is_invertible() && n.is_norm_preserving()) {
        return Err(Error::NonInvertible("conjugated flow needs a norm-preserving invertible gauge".into()));
    }
    let mut p = UnifiedParams::linear(hbar, mass);
    if let Some(v) = potential {
        p = p.with_potential(v.clone());
    }
    let psi0 = n.inverse()?.apply(psi0_prime, 0.0)?;
    let linear = evolve(&psi0, &p, &opts.method(Method::SplitStep))?;
    let mut traj = Trajectory { states: Vec::with_capacity(linear.states.len()), diagnostics: Vec::new(), ..linear.clone() };
    for (&t, psi) in linear.times.iter().zip(&linear.states) {
        let out = n.apply(psi, t)?;
        traj.diagnostics.push(Diagnostics::measure(&out, t, potential, hbar, mass, 0));
        traj.states.push(out);
    }
    Ok(traj)
}
