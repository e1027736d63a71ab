//! Scenario configuration.
//!
//! A scenario is a TOML document with the sections below; unknown keys are
//! rejected with the offending key and line. Every numeric key has a default
//! except the grid shape and the integrator step.
//!
//! ```toml
//! seed = 7
//!
//! [grid]
//! points = [256]
//! lengths = [12.0]
//!
//! [initial]              # kind = gaussian | periodic_gaussian | plane_wave | random
//! kind = "periodic_gaussian"
//! center = [0.0]
//! sigma = 1.0
//! momentum = [0.0]
//!
//! [equation]             # family = linear | bbm | dg | gauge | unified | haag_bannier
//! family = "gauge"
//! hbar = 1.0
//! mass = 1.0
//!
//! [gauge]
//! gamma = 1.0            # or { kind = "sine", amplitude = 1.0, omega = 1.0, phase = 0.0 }
//!
//! [integrator]
//! dt = 2e-4
//! t_final = 0.5
//!
//! [output]
//! dir = "out"
//! stride = 100
//! ```
//!
//! Family keys: `bbm` takes `alpha1`; `dg` takes `d`, `d_prime` (default 1)
//! and `c` (five weights); `unified` takes `mu0`, `nu1`, `nu2`, `mu`,
//! `alpha1`; `haag_bannier` takes a constant `coupling` vector. `gauge`
//! reads `gamma` and `gamma_dot` from the `[gauge]` section. Any family
//! accepts `[equation.potential]` with `kind = "harmonic"`, `omega` and
//! `center`, and a relative density `floor`.
//!
//! Optional sections: `[gauge_check]`, `[convergence]`, `[mixture]` and
//! `[sweep]`, read only by the subcommand of the same name.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::evolution::{Coefficients, Dealias, DgParams, EvolveOptions, Method, StepOptions, UnifiedParams};
use crate::field::{Grid, RealField, WaveFunction};
use crate::functionals::DensityFloor;
use crate::gauge::{GammaPath, GaugeTransform, PhaseField};

/// Bumped whenever a key or a CSV column changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub seed: u64,
    pub grid: GridConfig,
    #[serde(default)]
    pub initial: InitialState,
    #[serde(default)]
    pub equation: EquationConfig,
    #[serde(default)]
    pub gauge: GaugeConfig,
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge_check: Option<GaugeCheckConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixture: Option<MixtureConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub points: Vec<usize>,
    pub lengths: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    Gaussian { center: Vec<f64>, sigma: f64, momentum: Vec<f64> },
    PeriodicGaussian { center: Vec<f64>, sigma: f64, momentum: Vec<f64> },
    /// `exp(i 2 pi m.x / L)` with integer mode numbers `m`.
    PlaneWave { modes: Vec<i64> },
    /// [`crate::ensembles::random_nodeless_state`] drawn from the top-level seed.
    Random,
}

impl Default for InitialState {
    fn default() -> Self {
        Self::PeriodicGaussian { center: vec![0.0], sigma: 1.0, momentum: vec![0.0] }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    #[default]
    Linear,
    Bbm,
    Dg,
    Gauge,
    Unified,
    HaagBannier,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationConfig {
    #[serde(default)]
    pub family: Family,
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub mass: f64,
    #[serde(default = "default_floor")]
    pub floor: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_prime: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<[f64; 5]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<[f64; 5]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<PotentialConfig>,
}

impl Default for EquationConfig {
    fn default() -> Self {
        Self {
            family: Family::Linear,
            hbar: 1.0,
            mass: 1.0,
            floor: DensityFloor::DEFAULT,
            alpha1: None,
            d: None,
            d_prime: None,
            c: None,
            mu0: None,
            nu1: None,
            nu2: None,
            mu: None,
            coupling: None,
            potential: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialConfig {
    /// `m omega^2 |x - center|^2 / 2`.
    Harmonic { omega: f64, #[serde(default)] center: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GammaConfig {
    Constant(f64),
    Profile(GammaProfile),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GammaProfile {
    Sine { amplitude: f64, omega: f64, #[serde(default)] phase: f64 },
    Linear { value: f64, rate: f64 },
}

/// A real field given either as a sinusoid along one axis or as a file of
/// whitespace-separated values in row-major cell order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldConfig {
    /// `offset + amplitude sin(2 pi mode x_axis / L + phase)`.
    Sinusoid {
        amplitude: f64,
        mode: i64,
        #[serde(default)]
        axis: usize,
        #[serde(default)]
        phase: f64,
        #[serde(default)]
        offset: f64,
    },
    File { file: PathBuf },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeConfig {
    #[serde(default = "zero_gamma")]
    pub gamma: GammaConfig,
    /// With a constant `gamma`, turns it into `gamma + gamma_dot t`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_dot: Option<f64>,
    #[serde(default = "one_i32")]
    pub lambda: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<FieldConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<FieldConfig>,
}

impl Default for GaugeConfig {
    fn default() -> Self {
        Self { gamma: zero_gamma(), gamma_dot: None, lambda: 1, theta: None, kappa: None }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodConfig {
    #[default]
    Auto,
    SplitStep,
    Rk4,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DealiasConfig {
    None,
    #[default]
    HouLi,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub dt: f64,
    #[serde(default = "one")]
    pub t_final: f64,
    #[serde(default)]
    pub method: MethodConfig,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default = "default_growth")]
    pub max_growth: f64,
    #[serde(default)]
    pub dealias: DealiasConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_stride")]
    pub stride: usize,
    #[serde(default)]
    pub snapshots: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: default_dir(), stride: default_stride(), snapshots: false }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeCheckConfig {
    /// Time steps of the slope measurement; defaults to `dt, dt/2, dt/4`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<f64>>,
    /// Exit with the threshold code if the deviation at `integrator.dt` exceeds it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Expected slope and allowed spread, checked only when both are set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order_tolerance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceConfig {
    /// At least three time steps.
    pub levels: Vec<f64>,
    /// Step of the reference run; defaults to a quarter of the finest level.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_dt: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    /// Packets at `-+separation/2` moving towards each other with `+-momentum`.
    #[default]
    Colliding,
    /// `1 + cos(qx)/2` and `(1 - cos(qx)/2) e^{iqx}` with `q` the box's first mode.
    TwoMode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureConfig {
    #[serde(default)]
    pub construction: Construction,
    #[serde(default = "default_separation")]
    pub separation: f64,
    #[serde(default = "default_momentum")]
    pub momentum: f64,
    #[serde(default = "one")]
    pub sigma: f64,
    /// Upper edge of the momentum bands; defaults to half the Nyquist wavenumber.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_cut: Option<f64>,
    /// Conjugate observables and initial states by the `[gauge]` transform.
    #[serde(default)]
    pub conjugate: bool,
}

impl Default for MixtureConfig {
    fn default() -> Self {
        Self {
            construction: Construction::Colliding,
            separation: default_separation(),
            momentum: default_momentum(),
            sigma: 1.0,
            k_cut: None,
            conjugate: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Dotted config key to list of values; runs cover the Cartesian product
    /// in key order.
    pub parameters: BTreeMap<String, Vec<toml::Value>>,
}

fn one() -> f64 {
    1.0
}
fn one_i32() -> i32 {
    1
}
fn zero_gamma() -> GammaConfig {
    GammaConfig::Constant(0.0)
}
fn default_floor() -> f64 {
    DensityFloor::DEFAULT
}
fn default_cfl() -> f64 {
    StepOptions::default().cfl
}
fn default_growth() -> f64 {
    StepOptions::default().max_growth
}
fn default_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_stride() -> usize {
    100
}
fn default_separation() -> f64 {
    8.0
}
fn default_momentum() -> f64 {
    4.0
}

impl ScenarioConfig {
    /// Parses and validates. Errors carry the key and line.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            e => e,
        })
    }

    /// Canonical form with every default filled in.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    /// SHA-256 of [`ScenarioConfig::to_toml`], hex encoded.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, why: String| Err(Error::Config(format!("{key}: {why}")));
        let d = self.grid.points.len();
        if !(1..=3).contains(&d) || self.grid.lengths.len() != d {
            return bad("grid", "points and lengths need 1 to 3 matching entries".into());
        }
        if !(self.integrator.dt > 0.0 && self.integrator.dt.is_finite()) {
            return bad("integrator.dt", format!("{} must be positive", self.integrator.dt));
        }
        if !(self.integrator.t_final >= 0.0 && self.integrator.t_final.is_finite()) {
            return bad("integrator.t_final", format!("{} must be >= 0", self.integrator.t_final));
        }
        if !(self.integrator.cfl > 0.0) {
            return bad("integrator.cfl", "must be positive".into());
        }
        if self.output.stride == 0 {
            return bad("output.stride", "must be at least 1".into());
        }
        let e = &self.equation;
        if !(e.hbar > 0.0 && e.mass > 0.0) {
            return bad("equation", "hbar and mass must be positive".into());
        }
        DensityFloor::new(e.floor).map_err(|m| Error::Config(format!("equation.floor: {m}")))?;
        let allowed: &[&str] = match e.family {
            Family::Linear | Family::Gauge => &[],
            Family::Bbm => &["alpha1"],
            Family::Dg => &["d", "d_prime", "c"],
            Family::Unified => &["mu0", "nu1", "nu2", "mu", "alpha1"],
            Family::HaagBannier => &["coupling"],
        };
        let present = [
            ("alpha1", e.alpha1.is_some()),
            ("d", e.d.is_some()),
            ("d_prime", e.d_prime.is_some()),
            ("c", e.c.is_some()),
            ("mu0", e.mu0.is_some()),
            ("nu1", e.nu1.is_some()),
            ("nu2", e.nu2.is_some()),
            ("mu", e.mu.is_some()),
            ("coupling", e.coupling.is_some()),
        ];
        for (key, set) in present {
            if set && !allowed.contains(&key) {
                return bad(&format!("equation.{key}"), format!("does not apply to family {:?}", e.family));
            }
        }
        if e.family == Family::Bbm && e.alpha1.is_none() {
            return bad("equation.alpha1", "required for family bbm".into());
        }
        if e.family == Family::Dg && e.d.is_none() {
            return bad("equation.d", "required for family dg".into());
        }
        if let Some(a) = &e.coupling {
            if a.len() != d {
                return bad("equation.coupling", format!("needs {d} components"));
            }
        }
        if self.gauge.lambda != 1 && self.gauge.lambda != -1 {
            return bad("gauge.lambda", "must be +1 or -1".into());
        }
        if let Some(c) = &self.convergence {
            if c.levels.len() < 3 {
                return bad("convergence.levels", format!("need at least 3 levels, got {}", c.levels.len()));
            }
        }
        Ok(())
    }

    pub fn build_grid(&self) -> Result<Grid> {
        Grid::new(&self.grid.points, &self.grid.lengths)
    }

    pub fn build_initial(&self, grid: &Grid) -> Result<WaveFunction> {
        match &self.initial {
            InitialState::Gaussian { center, sigma, momentum } => {
                WaveFunction::gaussian(grid, center, *sigma, momentum)
            }
            InitialState::PeriodicGaussian { center, sigma, momentum } => {
                WaveFunction::periodic_gaussian(grid, center, *sigma, momentum)
            }
            InitialState::PlaneWave { modes } => {
                if modes.len() != grid.dims() {
                    return Err(Error::Config("initial.modes: one mode number per axis".into()));
                }
                let k: Vec<f64> = modes
                    .iter()
                    .zip(grid.lengths())
                    .map(|(&m, &l)| std::f64::consts::TAU * m as f64 / l)
                    .collect();
                WaveFunction::from_fn(grid, |x| {
                    num_complex::Complex64::from_polar(1.0, x.iter().zip(&k).map(|(x, k)| x * k).sum())
                })?
                .normalized()
            }
            InitialState::Random => {
                crate::ensembles::random_nodeless_state(grid, &mut crate::ensembles::seeded_rng(self.seed))
            }
        }
    }

    pub fn gamma_path(&self) -> GammaPath {
        match (&self.gauge.gamma, self.gauge.gamma_dot) {
            (GammaConfig::Constant(g), None) => GammaPath::Constant(*g),
            (GammaConfig::Constant(g), Some(rate)) => GammaPath::Linear { value: *g, rate },
            (GammaConfig::Profile(GammaProfile::Sine { amplitude, omega, phase }), _) => {
                GammaPath::Sine { amplitude: *amplitude, omega: *omega, phase: *phase }
            }
            (GammaConfig::Profile(GammaProfile::Linear { value, rate }), _) => {
                GammaPath::Linear { value: *value, rate: *rate }
            }
        }
    }

    /// The full `[gauge]` transform.
    pub fn build_gauge(&self, grid: &Grid) -> Result<GaugeTransform> {
        let floor = DensityFloor::new(self.equation.floor)?;
        let mut n = GaugeTransform::new(1.0, self.gamma_path(), self.gauge.lambda).with_floor(floor);
        if let Some(theta) = &self.gauge.theta {
            n = n.with_theta(PhaseField::from_field(&build_field(grid, theta, "gauge.theta")?));
        }
        if let Some(kappa) = &self.gauge.kappa {
            n = n.with_kappa(&build_field(grid, kappa, "gauge.kappa")?)?;
        }
        Ok(n)
    }

    /// True when `[gauge]` is a pure `N_gamma`.
    pub fn gauge_is_pure(&self) -> bool {
        self.gauge.lambda == 1 && self.gauge.theta.is_none() && self.gauge.kappa.is_none()
    }

    pub fn build_potential(&self, grid: &Grid) -> Result<Option<RealField>> {
        let mass = self.equation.mass;
        match &self.equation.potential {
            None => Ok(None),
            Some(PotentialConfig::Harmonic { omega, center }) => {
                let c: Vec<f64> = if center.is_empty() { vec![0.0; grid.dims()] } else { center.clone() };
                if c.len() != grid.dims() {
                    return Err(Error::Config("equation.potential.center: one entry per axis".into()));
                }
                Ok(Some(RealField::from_fn(grid, |x| {
                    0.5 * mass * omega * omega * x.iter().zip(&c).map(|(x, c)| (x - c).powi(2)).sum::<f64>()
                })))
            }
        }
    }

    pub fn build_params(&self, grid: &Grid) -> Result<UnifiedParams> {
        let e = &self.equation;
        let (hbar, mass) = (e.hbar, e.mass);
        let mut p = match e.family {
            Family::Linear => UnifiedParams::linear(hbar, mass),
            Family::Bbm => UnifiedParams::from_bbm(e.alpha1.unwrap_or(0.0), hbar, mass),
            Family::Dg => UnifiedParams::from_dg(
                DgParams { d: e.d.unwrap_or(0.0), d_prime: e.d_prime.unwrap_or(1.0), c: e.c.unwrap_or([0.0; 5]) },
                hbar,
                mass,
            ),
            Family::Gauge => {
                if !self.gauge_is_pure() {
                    return Err(Error::Config(
                        "family gauge needs a pure gauge: lambda = 1, no theta, no kappa".into(),
                    ));
                }
                UnifiedParams::from_gauge(&self.gamma_path(), hbar, mass)
            }
            Family::Unified => {
                let lin = Coefficients::linear(hbar, mass);
                UnifiedParams::from_coefficients(
                    Coefficients {
                        mu0: e.mu0.unwrap_or(lin.mu0),
                        nu1: e.nu1.unwrap_or(lin.nu1),
                        nu2: e.nu2.unwrap_or(lin.nu2),
                        mu: e.mu.unwrap_or(lin.mu),
                        alpha1: e.alpha1.unwrap_or(lin.alpha1),
                    },
                    hbar,
                    mass,
                )
            }
            Family::HaagBannier => {
                let a = e.coupling.clone().unwrap_or_else(|| vec![0.0; grid.dims()]);
                let comps: Vec<RealField> = a.iter().map(|&v| RealField::constant(grid, v)).collect();
                UnifiedParams::haag_bannier(&comps, hbar, mass)?
            }
        };
        if let Some(v) = self.build_potential(grid)? {
            p = p.with_potential(v);
        }
        Ok(p.with_floor(DensityFloor::new(e.floor)?))
    }

    pub fn evolve_options(&self) -> EvolveOptions {
        let i = &self.integrator;
        let mut opts = EvolveOptions::new(i.t_final, i.dt).stride(self.output.stride).method(match i.method {
            MethodConfig::Auto => Method::Auto,
            MethodConfig::SplitStep => Method::SplitStep,
            MethodConfig::Rk4 => Method::Rk4,
        });
        opts.step = StepOptions {
            cfl: i.cfl,
            max_growth: i.max_growth,
            dealias: match i.dealias {
                DealiasConfig::None => Dealias::None,
                DealiasConfig::HouLi => Dealias::HouLi,
            },
        };
        opts
    }

    /// Copy with the value at a dotted key replaced, re-validated.
    pub fn with_override(&self, key: &str, value: &toml::Value) -> Result<Self> {
        let mut doc = toml::Value::try_from(self).map_err(|e| Error::Config(e.to_string()))?;
        let mut slot = &mut doc;
        let parts: Vec<&str> = key.split('.').collect();
        for (i, part) in parts.iter().enumerate() {
            let table = slot
                .as_table_mut()
                .ok_or_else(|| Error::Config(format!("{key}: {part} is not inside a section")))?;
            if i + 1 == parts.len() {
                table.insert((*part).to_string(), value.clone());
                break;
            }
            slot = table.entry((*part).to_string()).or_insert_with(|| toml::Value::Table(Default::default()));
        }
        let text = toml::to_string(&doc).map_err(|e| Error::Config(e.to_string()))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("override {key} = {value}: {m}")),
            e => e,
        })
    }
}

fn build_field(grid: &Grid, f: &FieldConfig, key: &str) -> Result<RealField> {
    match f {
        FieldConfig::Sinusoid { amplitude, mode, axis, phase, offset } => {
            if *axis >= grid.dims() {
                return Err(Error::Config(format!("{key}.axis: {axis} on a {}-d grid", grid.dims())));
            }
            let k = std::f64::consts::TAU * *mode as f64 / grid.lengths()[*axis];
            Ok(RealField::from_fn(grid, |x| offset + amplitude * (k * x[*axis] + phase).sin()))
        }
        FieldConfig::File { file } => {
            let text = std::fs::read_to_string(file)
                .map_err(|e| Error::Config(format!("{key}.file {}: {e}", file.display())))?;
            let values = text
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Config(format!("{key}.file {}: {e}", file.display())))?;
            RealField::new(grid, values).map_err(|e| Error::Config(format!("{key}.file: {e}")))
        }
    }
}
